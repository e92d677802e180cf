//! Single-bit faults on stored residues at fixed pipeline stages.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::index;

use crate::ckks::{Ciphertext, CkksContext, Plaintext, Poly};
use crate::error::{bail, Error, Result};
use crate::ring_arith::Domain;
use crate::seed::derive_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    PostEncode,
    PostEncrypt,
    PreDecode,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::PostEncode, Stage::PostEncrypt, Stage::PreDecode];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::PostEncode => "post_encode",
            Stage::PostEncrypt => "post_encrypt",
            Stage::PreDecode => "pre_decode",
        }
    }

    /// Targets that exist at this stage.
    pub fn targets(self) -> &'static [Target] {
        match self {
            Stage::PostEncode | Stage::PreDecode => &[Target::Plaintext],
            Stage::PostEncrypt => &[Target::C0, Target::C1],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "post_encode" => Stage::PostEncode,
            "post_encrypt" => Stage::PostEncrypt,
            "pre_decode" => Stage::PreDecode,
            other => bail!(Argument, "unknown stage {other:?}"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Plaintext,
    C0,
    C1,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::Plaintext, Target::C0, Target::C1];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Plaintext => "pt",
            Target::C0 => "c0",
            Target::C1 => "c1",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pt" => Target::Plaintext,
            "c0" => Target::C0,
            "c1" => Target::C1,
            other => bail!(Argument, "unknown target {other:?}"),
        })
    }
}

/// One bit of one stored residue. Text form: `stage:target:limb:coeff:bit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultSpec {
    pub stage: Stage,
    pub target: Target,
    pub limb: usize,
    pub coeff: usize,
    pub bit: u32,
}

impl FaultSpec {
    pub fn new(stage: Stage, target: Target, limb: usize, coeff: usize, bit: u32) -> Result<Self> {
        if !stage.targets().contains(&target) {
            bail!(Argument, "target {target} does not exist at stage {stage}");
        }
        Ok(Self {
            stage,
            target,
            limb,
            coeff,
            bit,
        })
    }

    pub fn validate(&self, ctx: &CkksContext) -> Result<()> {
        if !self.stage.targets().contains(&self.target) {
            bail!(Argument, "target {} does not exist at stage {}", self.target, self.stage);
        }
        if self.limb >= ctx.storage_limbs() {
            bail!(Argument, "limb {} out of range for {} limbs", self.limb, ctx.storage_limbs());
        }
        if self.coeff >= ctx.degree() {
            bail!(Argument, "coefficient {} out of range for N = {}", self.coeff, ctx.degree());
        }
        if self.bit >= ctx.injectable_width() {
            bail!(Argument, "bit {} outside injectable width {}", self.bit, ctx.injectable_width());
        }
        Ok(())
    }
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}:{}", self.stage, self.target, self.limb, self.coeff, self.bit)
    }
}

impl FromStr for FaultSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [stage, target, limb, coeff, bit] = parts[..] else {
            bail!(Argument, "fault spec {s:?} is not stage:target:limb:coeff:bit");
        };
        let num = |v: &str| -> Result<u64> {
            v.parse()
                .map_err(|_| Error::Argument(format!("bad number {v:?} in fault spec")))
        };
        Self::new(
            stage.parse()?,
            target.parse()?,
            num(limb)? as usize,
            num(coeff)? as usize,
            u32::try_from(num(bit)?).map_err(|_| Error::Argument("bit out of range".into()))?,
        )
    }
}

/// Where an evaluation-domain residue is flipped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FaultSite {
    /// The stored word, whatever its domain.
    #[default]
    Native,
    /// Inverse NTT of the limb, flip a coefficient, forward NTT.
    CoefficientHook,
}

/// Result of flipping one bit of a residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flip<T> {
    pub value: T,
    /// The XOR result was at least the modulus and had to be reduced.
    pub wrapped: bool,
}

/// `(v XOR 2^j) mod q` for a word residue, `j < 64`.
pub fn flip_bit_word(v: u64, j: u32, q: u64) -> Result<Flip<u64>> {
    if j >= 64 {
        bail!(Argument, "bit {j} outside the 64-bit word");
    }
    let x = v ^ (1u64 << j);
    Ok(Flip {
        value: x % q,
        wrapped: x >= q,
    })
}

/// `(v XOR 2^j) mod Q` for an arbitrary-precision residue, `j < bits(Q)`.
pub fn flip_bit_big(v: &BigUint, j: u32, q: &BigUint) -> Result<Flip<BigUint>> {
    if u64::from(j) >= q.bits() {
        bail!(Argument, "bit {j} outside the {}-bit modulus", q.bits());
    }
    let mut x = v.clone();
    x.set_bit(u64::from(j), !v.bit(u64::from(j)));
    let wrapped = &x >= q;
    if wrapped {
        x %= q;
    }
    Ok(Flip { value: x, wrapped })
}

/// Flip bit `(limb, coeff, bit)` of a stored polynomial in place.
pub fn flip_poly(
    ctx: &CkksContext,
    p: &mut Poly,
    limb: usize,
    coeff: usize,
    bit: u32,
    site: FaultSite,
) -> Result<bool> {
    match p {
        Poly::Big(b) => {
            if limb != 0 {
                bail!(Argument, "limb {limb} out of range for a single big modulus");
            }
            let q = b.modulus().value().clone();
            let c = b
                .coeffs_mut()
                .get_mut(coeff)
                .ok_or_else(|| Error::Argument(format!("coefficient {coeff} out of range")))?;
            let f = flip_bit_big(c, bit, &q)?;
            *c = f.value;
            Ok(f.wrapped)
        }
        Poly::Rns(r) => {
            let n = r.degree();
            if coeff >= n {
                bail!(Argument, "coefficient {coeff} out of range for N = {n}");
            }
            let hook = site == FaultSite::CoefficientHook && r.domain() == Domain::Evaluation;
            let l = r
                .limbs_mut()
                .get_mut(limb)
                .ok_or_else(|| Error::Argument(format!("limb {limb} out of range")))?;
            let q = l.modulus().value();
            if hook {
                let t = &ctx.ntt_tables()[limb];
                t.inverse_in_place(l.coeffs_mut());
                let f = flip_bit_word(l.coeffs()[coeff], bit, q)?;
                l.coeffs_mut()[coeff] = f.value;
                t.forward_in_place(l.coeffs_mut());
                Ok(f.wrapped)
            } else {
                let f = flip_bit_word(l.coeffs()[coeff], bit, q)?;
                l.coeffs_mut()[coeff] = f.value;
                Ok(f.wrapped)
            }
        }
    }
}

/// Snapshot of the pipeline at a fault stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineState {
    Encoded(Plaintext),
    Encrypted(Ciphertext),
    Decrypted(Plaintext),
}

impl PipelineState {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineState::Encoded(_) => Stage::PostEncode,
            PipelineState::Encrypted(_) => Stage::PostEncrypt,
            PipelineState::Decrypted(_) => Stage::PreDecode,
        }
    }
}

/// Apply `spec` to an owned copy of `state`; returns the faulted state and
/// the wrap flag.
pub fn inject(
    ctx: &CkksContext,
    state: &PipelineState,
    spec: &FaultSpec,
    site: FaultSite,
) -> Result<(PipelineState, bool)> {
    spec.validate(ctx)?;
    if state.stage() != spec.stage {
        bail!(State, "state is at {}, fault targets {}", state.stage(), spec.stage);
    }
    let mut out = state.clone();
    let poly = match (&mut out, spec.target) {
        (PipelineState::Encoded(pt), Target::Plaintext) => &mut pt.poly,
        (PipelineState::Decrypted(pt), Target::Plaintext) => &mut pt.poly,
        (PipelineState::Encrypted(ct), Target::C0) => &mut ct.c0,
        (PipelineState::Encrypted(ct), Target::C1) => &mut ct.c1,
        _ => bail!(State, "target {} is not present at {}", spec.target, spec.stage),
    };
    let wrapped = flip_poly(ctx, poly, spec.limb, spec.coeff, spec.bit, site)?;
    Ok((out, wrapped))
}

/// How to choose faults from the full enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    /// Every `k`-th spec in enumeration order, starting at the first.
    Strided(usize),
    /// `count` distinct specs chosen by a seeded stream, kept in enumeration order.
    RandomSubset { count: usize, seed: u64 },
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sampling::Exhaustive => f.write_str("exhaustive"),
            Sampling::Strided(k) => write!(f, "strided:{k}"),
            Sampling::RandomSubset { count, seed } => write!(f, "random:{count}:{seed}"),
        }
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("sampling {s:?} is not exhaustive, strided:k or random:count:seed"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts[..] {
            ["exhaustive"] => Ok(Sampling::Exhaustive),
            ["strided", k] => {
                let k: usize = k.parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(bad());
                }
                Ok(Sampling::Strided(k))
            }
            ["random", count, seed] => Ok(Sampling::RandomSubset {
                count: count.parse().map_err(|_| bad())?,
                seed: seed.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// The ordered space `(stage, target) × limb × coeff × bit`.
#[derive(Clone, Debug)]
pub struct FaultSpace {
    blocks: Vec<(Stage, Target)>,
    limbs: usize,
    degree: usize,
    width: u32,
}

impl FaultSpace {
    pub fn new(ctx: &CkksContext, stages: &[Stage], targets: &[Target]) -> Self {
        let mut blocks = Vec::new();
        for stage in Stage::ALL {
            if !stages.contains(&stage) {
                continue;
            }
            for &target in stage.targets() {
                if targets.contains(&target) {
                    blocks.push((stage, target));
                }
            }
        }
        Self {
            blocks,
            limbs: ctx.storage_limbs(),
            degree: ctx.degree(),
            width: ctx.injectable_width(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len() * self.limbs * self.degree * self.width as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, idx: usize) -> FaultSpec {
        let w = self.width as usize;
        let bit = (idx % w) as u32;
        let rest = idx / w;
        let coeff = rest % self.degree;
        let rest = rest / self.degree;
        let limb = rest % self.limbs;
        let (stage, target) = self.blocks[rest / self.limbs];
        FaultSpec {
            stage,
            target,
            limb,
            coeff,
            bit,
        }
    }

    pub fn sample(&self, sampling: Sampling) -> Vec<FaultSpec> {
        let len = self.len();
        match sampling {
            Sampling::Exhaustive => (0..len).map(|i| self.get(i)).collect(),
            Sampling::Strided(k) => (0..len).step_by(k.max(1)).map(|i| self.get(i)).collect(),
            Sampling::RandomSubset { count, seed } => {
                if count >= len {
                    return (0..len).map(|i| self.get(i)).collect();
                }
                let mut rng = derive_rng(seed, &["sampling"]);
                let mut picks = index::sample(&mut rng, len, count).into_vec();
                picks.sort_unstable();
                picks.into_iter().map(|i| self.get(i)).collect()
            }
        }
    }
}

/// Faults for the given stage and target filters, in enumeration order.
pub fn enumerate_faults(
    ctx: &CkksContext,
    stages: &[Stage],
    targets: &[Target],
    sampling: Sampling,
) -> Vec<FaultSpec> {
    FaultSpace::new(ctx, stages, targets).sample(sampling)
}
