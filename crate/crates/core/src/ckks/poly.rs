use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{bail, Result};
use crate::ring_arith::{add_shifted, mod_mul, BigPoly, Domain};
use crate::rns::RnsPoly;

/// A ring element in whichever representation the active mode uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Poly {
    Big(BigPoly),
    Rns(RnsPoly),
}

impl Poly {
    pub fn degree(&self) -> usize {
        match self {
            Poly::Big(p) => p.degree(),
            Poly::Rns(p) => p.degree(),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Poly::Big(_) => Domain::Coefficient,
            Poly::Rns(p) => p.domain(),
        }
    }

    pub fn as_big(&self) -> Option<&BigPoly> {
        match self {
            Poly::Big(p) => Some(p),
            Poly::Rns(_) => None,
        }
    }

    pub fn as_rns(&self) -> Option<&RnsPoly> {
        match self {
            Poly::Rns(p) => Some(p),
            Poly::Big(_) => None,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Poly::Big(a), Poly::Big(b)) => Poly::Big(a.add(b)?),
            (Poly::Rns(a), Poly::Rns(b)) => Poly::Rns(a.add(b)?),
            _ => bail!(State, "representation mismatch"),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Poly::Big(a), Poly::Big(b)) => Poly::Big(a.sub(b)?),
            (Poly::Rns(a), Poly::Rns(b)) => Poly::Rns(a.sub(b)?),
            _ => bail!(State, "representation mismatch"),
        })
    }

    pub fn neg(&self) -> Self {
        match self {
            Poly::Big(p) => Poly::Big(p.neg()),
            Poly::Rns(p) => Poly::Rns(p.neg()),
        }
    }

    /// Product with the secret: schoolbook in the coefficient domain,
    /// pointwise against the transformed secret in the evaluation domain.
    pub(crate) fn mul_secret(&self, s: &[i8], s_eval: Option<&RnsPoly>) -> Result<Self> {
        match (self, self.domain()) {
            (Poly::Big(p), _) => Ok(Poly::Big(p.mul_ternary(s)?)),
            (Poly::Rns(p), Domain::Coefficient) => Ok(Poly::Rns(p.mul_ternary(s)?)),
            (Poly::Rns(p), Domain::Evaluation) => match s_eval {
                Some(se) => Ok(Poly::Rns(p.pointwise_mul(se)?)),
                None => bail!(State, "evaluation-domain product without a transformed secret"),
            },
        }
    }

    /// [`Self::mul_secret`] for a polynomial with few nonzero entries.
    pub(crate) fn mul_secret_sparse(&self, s: &[i8], s_eval: Option<&RnsPoly>) -> Result<Self> {
        let n = self.degree();
        if s.len() != n {
            bail!(Argument, "secret length {} does not match degree {n}", s.len());
        }
        let support: Vec<(usize, i8)> = s
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i, v))
            .collect();
        match (self, self.domain()) {
            (Poly::Big(p), _) => {
                let q = p.modulus().value();
                let mut out = BigPoly::zero(n, p.modulus().clone());
                for (i, d) in p.coeffs().iter().enumerate() {
                    if d.is_zero() {
                        continue;
                    }
                    for &(k, sv) in &support {
                        let idx = i + k;
                        let (slot, neg) = if idx < n { (idx, sv < 0) } else { (idx - n, sv > 0) };
                        let c = &mut out.coeffs_mut()[slot];
                        if neg {
                            *c = if &*c >= d { &*c - d } else { q - d + &*c };
                        } else {
                            *c += d;
                            if &*c >= q {
                                *c -= q;
                            }
                        }
                    }
                }
                Ok(Poly::Big(out))
            }
            (Poly::Rns(p), Domain::Coefficient) => {
                let mut out = p.clone();
                for (dst, src) in out.limbs_mut().iter_mut().zip(p.limbs()) {
                    let q = src.modulus().value();
                    dst.coeffs_mut().fill(0);
                    // d · X^i · s, shifting the secret instead of the operand
                    let mut spread = vec![0u64; n];
                    for (i, &d) in src.coeffs().iter().enumerate() {
                        if d == 0 {
                            continue;
                        }
                        spread.fill(0);
                        for &(k, sv) in &support {
                            spread[k] = if sv > 0 { d } else { q - d };
                        }
                        add_shifted(dst.coeffs_mut(), &spread, i, q, false);
                    }
                }
                Ok(Poly::Rns(out))
            }
            (Poly::Rns(p), Domain::Evaluation) => {
                let Some(se) = s_eval else {
                    bail!(State, "evaluation-domain product without a transformed secret");
                };
                let mut out = p.clone();
                for (dst, sl) in out.limbs_mut().iter_mut().zip(se.limbs()) {
                    let q = sl.modulus().value();
                    for (c, &w) in dst.coeffs_mut().iter_mut().zip(sl.coeffs()) {
                        if *c != 0 {
                            *c = mod_mul(*c, w, q);
                        }
                    }
                }
                Ok(Poly::Rns(out))
            }
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        match self {
            Poly::Big(p) => p.coeffs().iter().all(BigUint::is_zero),
            Poly::Rns(p) => p.limbs().iter().all(|l| l.coeffs().iter().all(|&c| c == 0)),
        }
    }
}
