use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};

/// Which representation optimizations are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One big modulus, coefficient domain, arbitrary-precision residues.
    Vanilla,
    /// Limb-decomposed, coefficient domain.
    #[serde(rename = "rns")]
    RnsOnly,
    /// Single word modulus, evaluation domain.
    #[serde(rename = "ntt")]
    NttOnly,
    /// Limb-decomposed, evaluation domain.
    RnsNtt,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Vanilla, Mode::RnsOnly, Mode::NttOnly, Mode::RnsNtt];

    pub fn uses_ntt(self) -> bool {
        matches!(self, Mode::NttOnly | Mode::RnsNtt)
    }

    pub fn uses_rns(self) -> bool {
        matches!(self, Mode::RnsOnly | Mode::RnsNtt)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Vanilla => "vanilla",
            Mode::RnsOnly => "rns",
            Mode::NttOnly => "ntt",
            Mode::RnsNtt => "rns_ntt",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "vanilla" => Mode::Vanilla,
            "rns" => Mode::RnsOnly,
            "ntt" => Mode::NttOnly,
            "rns_ntt" => Mode::RnsNtt,
            other => bail!(Config, "unknown mode {other:?}"),
        })
    }
}

pub const DEFAULT_SIGMA: f64 = 3.2;

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub ring_degree: usize,
    pub q0_bits: u32,
    pub limbs: usize,
    pub delta_log2: u32,
    pub mode: Mode,
    pub slots: usize,
    /// Exact number of nonzero secret coefficients; uniform ternary if unset.
    pub hamming_weight: Option<usize>,
    pub sigma: f64,
    /// Vanilla only: use the product of `limbs` primes as one big modulus.
    pub wide_modulus: bool,
}

impl SchemeParams {
    /// Full packing, default noise, no sparsity.
    pub fn new(mode: Mode, ring_degree: usize, q0_bits: u32, limbs: usize, delta_log2: u32) -> Self {
        Self {
            ring_degree,
            q0_bits,
            limbs,
            delta_log2,
            mode,
            slots: ring_degree / 2,
            hamming_weight: None,
            sigma: DEFAULT_SIGMA,
            wide_modulus: false,
        }
    }

    pub fn with_slots(mut self, slots: usize) -> Self {
        self.slots = slots;
        self
    }

    pub fn with_hamming_weight(mut self, h: usize) -> Self {
        self.hamming_weight = Some(h);
        self
    }

    pub fn with_wide_modulus(mut self) -> Self {
        self.wide_modulus = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ring_degree;
        if n < 2 || !n.is_power_of_two() {
            bail!(Parameter, "ring degree {n} is not a power of two >= 2");
        }
        if !(2..=60).contains(&self.q0_bits) {
            bail!(Parameter, "q0 bit length {} outside [2, 60]", self.q0_bits);
        }
        if self.limbs == 0 {
            bail!(Parameter, "limb count must be at least 1");
        }
        if self.wide_modulus && self.mode != Mode::Vanilla {
            bail!(Parameter, "a wide modulus is only available in vanilla mode");
        }
        if matches!(self.mode, Mode::NttOnly) && self.limbs != 1 {
            bail!(Parameter, "{} mode requires a single limb", self.mode);
        }
        if self.mode == Mode::Vanilla && self.limbs != 1 && !self.wide_modulus {
            bail!(Parameter, "vanilla mode requires a single limb unless the modulus is wide");
        }
        if self.delta_log2 == 0 || self.delta_log2 >= self.q0_bits {
            bail!(
                Parameter,
                "scaling factor 2^{} must be below q0 = 2^{}",
                self.delta_log2,
                self.q0_bits
            );
        }
        if self.slots == 0 || self.slots > n / 2 {
            bail!(Parameter, "slot count {} outside [1, N/2 = {}]", self.slots, n / 2);
        }
        if let Some(h) = self.hamming_weight {
            if h > n {
                bail!(Parameter, "hamming weight {h} exceeds ring degree {n}");
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            bail!(Parameter, "noise deviation {} must be positive", self.sigma);
        }
        Ok(())
    }

    /// Largest input magnitude the encoder accepts: `2^(q0_bits - delta_log2 - 1)`.
    pub fn input_budget(&self) -> f64 {
        2f64.powi(self.q0_bits as i32 - self.delta_log2 as i32 - 1)
    }

    pub fn gap(&self) -> usize {
        self.ring_degree / 2 / self.slots.next_power_of_two()
    }
}
