//! Residue number system: limb decomposition and exact CRT reconstruction.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::error::{bail, Result};
use crate::ring_arith::{
    centered_big, find_ntt_prime, mod_inv, reduce_signed_big, CompositeModulus, Domain,
    PrimeModulus, RingPoly,
};

/// An ordered chain of pairwise distinct primes with CRT constants.
#[derive(Clone, Debug)]
pub struct LimbChain {
    moduli: Vec<PrimeModulus>,
    modulus: Arc<CompositeModulus>,
    /// `Q_k = Q / q_k`.
    q_hat: Vec<BigUint>,
    /// `Q_k^{-1} mod q_k`.
    q_hat_inv: Vec<u64>,
    /// `Q_k · (Q_k^{-1} mod q_k)`, the CRT basis element for limb `k`.
    basis: Vec<BigUint>,
}

impl LimbChain {
    pub fn new(moduli: Vec<PrimeModulus>) -> Result<Self> {
        let modulus = Arc::new(CompositeModulus::from_factors(moduli.clone())?);
        let q = modulus.value();
        let mut q_hat = Vec::with_capacity(moduli.len());
        let mut q_hat_inv = Vec::with_capacity(moduli.len());
        let mut basis = Vec::with_capacity(moduli.len());
        for m in &moduli {
            let qk = m.value();
            let hat = q / qk;
            let hat_mod = (&hat % qk).to_u64().expect("residue fits a word");
            let Some(inv) = mod_inv(hat_mod, qk) else {
                bail!(Parameter, "moduli are not pairwise coprime");
            };
            basis.push(&hat * inv);
            q_hat.push(hat);
            q_hat_inv.push(inv);
        }
        Ok(Self {
            moduli,
            modulus,
            q_hat,
            q_hat_inv,
            basis,
        })
    }

    /// `L` distinct NTT-friendly primes of `q0_bits` bits, largest first.
    pub fn build_chain(q0_bits: u32, limbs: usize, degree: usize) -> Result<Self> {
        if limbs == 0 {
            bail!(Parameter, "limb count must be at least 1");
        }
        let mut moduli: Vec<PrimeModulus> = Vec::with_capacity(limbs);
        for _ in 0..limbs {
            let exclude: Vec<u64> = moduli.iter().map(|m| m.value()).collect();
            moduli.push(find_ntt_prime(q0_bits, degree, &exclude)?);
        }
        Self::new(moduli)
    }

    pub fn moduli(&self) -> &[PrimeModulus] {
        &self.moduli
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn modulus(&self) -> &Arc<CompositeModulus> {
        &self.modulus
    }

    pub fn q_hat(&self, k: usize) -> &BigUint {
        &self.q_hat[k]
    }

    pub fn q_hat_inv(&self, k: usize) -> u64 {
        self.q_hat_inv[k]
    }

    pub fn decompose_coeff(&self, x: &BigUint) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|m| (x % m.value()).to_u64().expect("residue fits a word"))
            .collect()
    }

    /// `(Σ r_k · inv_k · Q_k) mod Q`.
    pub fn reconstruct_coeff(&self, residues: &[u64]) -> BigUint {
        let sum = residues
            .iter()
            .zip(&self.basis)
            .fold(BigUint::zero(), |acc, (&r, b)| acc + b * r);
        sum % self.modulus.value()
    }

    pub fn decompose(&self, p: &crate::ring_arith::BigPoly) -> Result<RnsPoly> {
        if p.modulus().value() != self.modulus.value() {
            bail!(Argument, "polynomial modulus does not match the chain");
        }
        let n = p.degree();
        let mut limbs: Vec<Vec<u64>> = vec![Vec::with_capacity(n); self.len()];
        for c in p.coeffs() {
            for (limb, r) in limbs.iter_mut().zip(self.decompose_coeff(c)) {
                limb.push(r);
            }
        }
        let limbs = limbs
            .into_iter()
            .zip(&self.moduli)
            .map(|(coeffs, &m)| RingPoly {
                coeffs,
                modulus: m,
                domain: Domain::Coefficient,
            })
            .collect();
        Ok(RnsPoly { limbs })
    }

    fn check(&self, r: &RnsPoly) -> Result<()> {
        if r.limbs.len() != self.len() {
            bail!(Argument, "expected {} limbs, got {}", self.len(), r.limbs.len());
        }
        for (l, m) in r.limbs.iter().zip(&self.moduli) {
            if l.modulus.value() != m.value() {
                bail!(Argument, "limb modulus {} does not match chain", l.modulus.value());
            }
        }
        if r.domain() != Domain::Coefficient {
            bail!(State, "CRT reconstruction requires the coefficient domain");
        }
        Ok(())
    }

    pub fn crt_reconstruct(&self, r: &RnsPoly) -> Result<crate::ring_arith::BigPoly> {
        self.check(r)?;
        let coeffs = (0..r.degree())
            .map(|i| self.reconstruct_at(r, i))
            .collect();
        crate::ring_arith::BigPoly::new(coeffs, self.modulus.clone())
    }

    /// Reconstruct a single coefficient without checks.
    pub(crate) fn reconstruct_at(&self, r: &RnsPoly, i: usize) -> BigUint {
        let residues: Vec<u64> = r.limbs.iter().map(|l| l.coeffs[i]).collect();
        self.reconstruct_coeff(&residues)
    }

    /// Centered reconstructed values at the given indices.
    pub fn reconstruct_centered(&self, r: &RnsPoly, indices: &[usize]) -> Result<Vec<BigInt>> {
        self.check(r)?;
        Ok(indices
            .iter()
            .map(|&i| centered_big(&self.reconstruct_at(r, i), self.modulus.value()))
            .collect())
    }

    /// Change of the reconstructed value when limb `k` changes by `e`:
    /// `(e · Q_k · inv_k) mod Q`, centered.
    pub fn predict_rns_error(&self, e: &BigInt, k: usize) -> Result<BigInt> {
        if k >= self.len() {
            bail!(Argument, "limb index {k} out of range for {} limbs", self.len());
        }
        let basis = BigInt::from_biguint(Sign::Plus, self.basis[k].clone());
        let q = self.modulus.value();
        Ok(centered_big(&reduce_signed_big(&(e * basis), q), q))
    }
}

/// Free-function form of [`LimbChain::predict_rns_error`].
pub fn predict_rns_error(e: &BigInt, k: usize, chain: &LimbChain) -> Result<BigInt> {
    chain.predict_rns_error(e, k)
}

/// One residue polynomial per chain modulus, all in the same domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsPoly {
    pub(crate) limbs: Vec<RingPoly>,
}

impl RnsPoly {
    pub fn new(limbs: Vec<RingPoly>) -> Result<Self> {
        let Some(first) = limbs.first() else {
            bail!(Argument, "an RNS polynomial needs at least one limb");
        };
        if limbs
            .iter()
            .any(|l| l.degree() != first.degree() || l.domain() != first.domain())
        {
            bail!(Argument, "limbs disagree on length or domain");
        }
        Ok(Self { limbs })
    }

    pub fn zero(chain: &LimbChain, degree: usize, domain: Domain) -> Self {
        Self {
            limbs: chain
                .moduli()
                .iter()
                .map(|&m| RingPoly::zero(degree, m, domain))
                .collect(),
        }
    }

    pub fn limbs(&self) -> &[RingPoly] {
        &self.limbs
    }

    pub fn limbs_mut(&mut self) -> &mut [RingPoly] {
        &mut self.limbs
    }

    pub fn degree(&self) -> usize {
        self.limbs[0].degree()
    }

    pub fn domain(&self) -> Domain {
        self.limbs[0].domain()
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&RingPoly, &RingPoly) -> Result<RingPoly>,
    ) -> Result<Self> {
        if self.limbs.len() != other.limbs.len() {
            bail!(
                Argument,
                "limb count mismatch: {} vs {}",
                self.limbs.len(),
                other.limbs.len()
            );
        }
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(Self { limbs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RingPoly::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RingPoly::sub)
    }

    pub fn neg(&self) -> Self {
        Self {
            limbs: self.limbs.iter().map(RingPoly::neg).collect(),
        }
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RingPoly::pointwise_mul)
    }

    pub fn negacyclic_mul_schoolbook(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, RingPoly::negacyclic_mul_schoolbook)
    }

    pub fn mul_ternary(&self, ternary: &[i8]) -> Result<Self> {
        let limbs = self
            .limbs
            .iter()
            .map(|l| l.mul_ternary(ternary))
            .collect::<Result<_>>()?;
        Ok(Self { limbs })
    }
}
