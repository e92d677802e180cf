//! Exact modular arithmetic over `Z_q[X]/(X^N + 1)`.
//!
//! Word-sized prime moduli back the RNS and NTT representations; arbitrary
//! precision composite moduli back the single-big-modulus representation.
//! Residues are always stored non-negative in `[0, q)`; the signed view is
//! obtained with [`centered`] only when a value is handed to the decoder.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{bail, Error, Result};

/// `(a * b) mod q` through a 128-bit intermediate.
#[inline]
pub fn mod_mul(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

#[inline]
pub fn mod_add(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub fn mod_sub(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub fn mod_pow(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, q);
        }
        base = mod_mul(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Modular inverse by the extended Euclidean algorithm; `None` if `a` is not a unit.
pub fn mod_inv(a: u64, q: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (q as i128, (a % q) as i128);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(q as i128) as u64)
}

/// Signed representative of `x` in `(-q/2, q/2]`.
#[inline]
pub fn centered(x: u64, q: u64) -> i64 {
    debug_assert!(x < q);
    if x <= q / 2 {
        x as i64
    } else {
        -((q - x) as i64)
    }
}

/// Signed representative of a big residue in `(-Q/2, Q/2]`.
pub fn centered_big(x: &BigUint, q: &BigUint) -> BigInt {
    let half: BigUint = q >> 1u32;
    if x <= &half {
        BigInt::from_biguint(Sign::Plus, x.clone())
    } else {
        -BigInt::from_biguint(Sign::Plus, q - x)
    }
}

/// Reduce a signed integer into `[0, q)`.
#[inline]
pub fn reduce_signed(v: i128, q: u64) -> u64 {
    v.rem_euclid(q as i128) as u64
}

pub fn reduce_signed_big(v: &BigInt, q: &BigUint) -> BigUint {
    let qi = BigInt::from_biguint(Sign::Plus, q.clone());
    let r = ((v % &qi) + &qi) % &qi;
    r.to_biguint().expect("non-negative after reduction")
}

/// Deterministic Miller-Rabin, exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn bit_length(q: u64) -> u32 {
    64 - q.leading_zeros()
}

/// Negacyclic root data for one ring degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NegacyclicRoots {
    pub degree: usize,
    /// Primitive `2N`-th root of unity.
    pub psi: u64,
    pub psi_inv: u64,
    pub n_inv: u64,
}

/// A word-sized prime modulus, optionally carrying the roots needed for the
/// negacyclic NTT at one ring degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    value: u64,
    bits: u32,
    roots: Option<NegacyclicRoots>,
}

impl PrimeModulus {
    /// A prime usable for CRT and coefficient arithmetic only.
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 62 {
            bail!(Parameter, "modulus {q} exceeds 62 bits");
        }
        if !is_prime(q) {
            bail!(Parameter, "modulus {q} is not prime");
        }
        Ok(Self {
            value: q,
            bits: bit_length(q),
            roots: None,
        })
    }

    /// A prime with `q ≡ 1 (mod 2N)` together with its canonical `ψ`.
    pub fn ntt_friendly(q: u64, degree: usize) -> Result<Self> {
        let mut m = Self::new(q)?;
        if !degree.is_power_of_two() {
            bail!(Parameter, "ring degree {degree} is not a power of two");
        }
        let psi = find_primitive_root(q, 2 * degree as u64)?;
        m.roots = Some(NegacyclicRoots {
            degree,
            psi,
            psi_inv: mod_inv(psi, q).expect("psi is a unit"),
            n_inv: mod_inv(degree as u64 % q, q).expect("N is a unit mod q"),
        });
        Ok(m)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn roots(&self) -> Option<&NegacyclicRoots> {
        self.roots.as_ref()
    }

    pub fn psi(&self) -> Option<u64> {
        self.roots.map(|r| r.psi)
    }
}

/// Search downward from `2^bits - 1` for the largest prime `q` with
/// `q ≡ 1 (mod 2N)` that is not in `exclude`.
pub fn find_ntt_prime(bits: u32, degree: usize, exclude: &[u64]) -> Result<PrimeModulus> {
    if !(2..=62).contains(&bits) {
        bail!(Parameter, "prime bit length {bits} outside [2, 62]");
    }
    if !degree.is_power_of_two() {
        bail!(Parameter, "ring degree {degree} is not a power of two");
    }
    let step = 2 * degree as u64;
    let top = (1u64 << bits) - 1;
    let floor = 1u64 << (bits - 1);
    if step >= top {
        bail!(Parameter, "no {bits}-bit prime can be 1 mod {step}");
    }
    let mut q = (top - 1) / step * step + 1;
    while q >= floor {
        if !exclude.contains(&q) && is_prime(q) {
            return PrimeModulus::ntt_friendly(q, degree);
        }
        if q < step {
            break;
        }
        q -= step;
    }
    bail!(
        Parameter,
        "no {bits}-bit prime congruent to 1 mod {step} outside the exclusion set"
    )
}

/// The smallest primitive `order`-th root of unity modulo the prime `q`,
/// where `order` is a power of two.
///
/// A generator candidate `g` yields `ψ₀ = g^((q-1)/order)`; once `ψ₀` has
/// full order, every primitive root is `ψ₀^k` for odd `k` and the minimum is
/// returned.
pub fn find_primitive_root(q: u64, order: u64) -> Result<u64> {
    if order < 2 || !order.is_power_of_two() {
        bail!(Parameter, "root order {order} is not a power of two");
    }
    if q < 3 || (q - 1) % order != 0 {
        bail!(Parameter, "{q} is not congruent to 1 mod {order}");
    }
    let half = order / 2;
    let cofactor = (q - 1) / order;
    let mut first = None;
    for g in 2..q {
        let cand = mod_pow(g, cofactor, q);
        if mod_pow(cand, half, q) == q - 1 {
            first = Some(cand);
            break;
        }
    }
    let psi0 = first.ok_or_else(|| Error::Parameter(format!("no primitive root mod {q}")))?;
    let step = mod_mul(psi0, psi0, q);
    let mut cur = psi0;
    let mut best = psi0;
    for _ in 0..half {
        best = best.min(cur);
        cur = mod_mul(cur, step, q);
    }
    Ok(best)
}

/// An arbitrary-precision modulus `Q`, optionally with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeModulus {
    value: BigUint,
    bits: u64,
    factors: Vec<PrimeModulus>,
}

impl CompositeModulus {
    pub fn from_factors(factors: Vec<PrimeModulus>) -> Result<Self> {
        if factors.is_empty() {
            bail!(Argument, "a composite modulus needs at least one factor");
        }
        for (i, a) in factors.iter().enumerate() {
            if factors[..i].iter().any(|b| b.value == a.value) {
                bail!(Argument, "repeated modulus factor {}", a.value);
            }
        }
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * BigUint::from(f.value));
        Ok(Self {
            bits: value.bits(),
            value,
            factors,
        })
    }

    /// A bare modulus without factorization.
    pub fn from_value(value: BigUint) -> Result<Self> {
        if value <= BigUint::one() {
            bail!(Argument, "modulus must exceed 1");
        }
        Ok(Self {
            bits: value.bits(),
            value,
            factors: Vec::new(),
        })
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn factors(&self) -> &[PrimeModulus] {
        &self.factors
    }

    /// `Q` as a word when it fits.
    pub fn as_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Coefficient,
    Evaluation,
}

/// Polynomial with word residues modulo one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPoly {
    pub(crate) coeffs: Vec<u64>,
    pub(crate) modulus: PrimeModulus,
    pub(crate) domain: Domain,
}

impl RingPoly {
    pub fn new(coeffs: Vec<u64>, modulus: PrimeModulus, domain: Domain) -> Result<Self> {
        if !coeffs.len().is_power_of_two() {
            bail!(Argument, "length {} is not a power of two", coeffs.len());
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= modulus.value) {
            bail!(Argument, "coefficient {c} not reduced mod {}", modulus.value);
        }
        Ok(Self {
            coeffs,
            modulus,
            domain,
        })
    }

    pub fn zero(degree: usize, modulus: PrimeModulus, domain: Domain) -> Self {
        Self {
            coeffs: vec![0; degree],
            modulus,
            domain,
        }
    }

    pub fn from_signed(values: &[i64], modulus: PrimeModulus, domain: Domain) -> Result<Self> {
        let q = modulus.value;
        Self::new(
            values.iter().map(|&v| reduce_signed(v as i128, q)).collect(),
            modulus,
            domain,
        )
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [u64] {
        &mut self.coeffs
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            bail!(
                Argument,
                "length mismatch: {} vs {}",
                self.coeffs.len(),
                other.coeffs.len()
            );
        }
        if self.modulus.value != other.modulus.value {
            bail!(
                Argument,
                "modulus mismatch: {} vs {}",
                self.modulus.value,
                other.modulus.value
            );
        }
        if self.domain != other.domain {
            bail!(State, "domain mismatch: {:?} vs {:?}", self.domain, other.domain);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = self.modulus.value;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| mod_add(a, b, q))
            .collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = self.modulus.value;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| mod_sub(a, b, q))
            .collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn neg(&self) -> Self {
        let q = self.modulus.value;
        let coeffs = self.coeffs.iter().map(|&a| mod_sub(0, a, q)).collect();
        Self { coeffs, ..*self }
    }

    /// Coefficient-wise product; the evaluation-domain multiplier.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.domain != Domain::Evaluation {
            bail!(State, "pointwise product requires the evaluation domain");
        }
        let q = self.modulus.value;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| mod_mul(a, b, q))
            .collect();
        Ok(Self { coeffs, ..*self })
    }

    /// Schoolbook product modulo `X^N + 1`.
    pub fn negacyclic_mul_schoolbook(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.domain != Domain::Coefficient {
            bail!(State, "schoolbook product requires the coefficient domain");
        }
        let n = self.coeffs.len();
        let q = self.modulus.value;
        let mut out = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let p = mod_mul(a, b, q);
                let k = i + j;
                if k < n {
                    out[k] = mod_add(out[k], p, q);
                } else {
                    out[k - n] = mod_sub(out[k - n], p, q);
                }
            }
        }
        Ok(Self {
            coeffs: out,
            ..*self
        })
    }

    /// Schoolbook product with a ternary polynomial (entries in `{-1, 0, 1}`).
    ///
    /// Same result as [`Self::negacyclic_mul_schoolbook`] against the lifted
    /// ternary polynomial, using only modular additions.
    pub fn mul_ternary(&self, ternary: &[i8]) -> Result<Self> {
        let n = self.coeffs.len();
        if ternary.len() != n {
            bail!(Argument, "length mismatch: {} vs {}", n, ternary.len());
        }
        if self.domain != Domain::Coefficient {
            bail!(State, "ternary product requires the coefficient domain");
        }
        let q = self.modulus.value;
        let mut out = vec![0u64; n];
        for (j, &s) in ternary.iter().enumerate() {
            match s {
                0 => {}
                1 => add_shifted(&mut out, &self.coeffs, j, q, false),
                -1 => add_shifted(&mut out, &self.coeffs, j, q, true),
                other => bail!(Argument, "non-ternary entry {other}"),
            }
        }
        Ok(Self {
            coeffs: out,
            ..*self
        })
    }
}

/// `out += ± X^shift · src (mod X^N + 1)`.
pub(crate) fn add_shifted(out: &mut [u64], src: &[u64], shift: usize, q: u64, negate: bool) {
    let n = src.len();
    let (head, tail) = src.split_at(n - shift);
    let (out_lo, out_hi) = out.split_at_mut(shift);
    // src[0..n-shift] lands on out[shift..n] with the requested sign,
    // src[n-shift..n] wraps onto out[0..shift] with the opposite sign.
    if negate {
        for (o, &c) in out_hi.iter_mut().zip(head) {
            *o = mod_sub(*o, c, q);
        }
        for (o, &c) in out_lo.iter_mut().zip(tail) {
            *o = mod_add(*o, c, q);
        }
    } else {
        for (o, &c) in out_hi.iter_mut().zip(head) {
            *o = mod_add(*o, c, q);
        }
        for (o, &c) in out_lo.iter_mut().zip(tail) {
            *o = mod_sub(*o, c, q);
        }
    }
}

/// Free-function form of [`RingPoly::negacyclic_mul_schoolbook`].
pub fn negacyclic_mul_schoolbook(a: &RingPoly, b: &RingPoly) -> Result<RingPoly> {
    a.negacyclic_mul_schoolbook(b)
}

/// Polynomial with arbitrary-precision residues modulo a composite `Q`.
/// Always in the coefficient domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigPoly {
    pub(crate) coeffs: Vec<BigUint>,
    pub(crate) modulus: Arc<CompositeModulus>,
}

impl BigPoly {
    pub fn new(coeffs: Vec<BigUint>, modulus: Arc<CompositeModulus>) -> Result<Self> {
        if !coeffs.len().is_power_of_two() {
            bail!(Argument, "length {} is not a power of two", coeffs.len());
        }
        if coeffs.iter().any(|c| c >= &modulus.value) {
            bail!(Argument, "coefficient not reduced mod Q");
        }
        Ok(Self { coeffs, modulus })
    }

    pub fn zero(degree: usize, modulus: Arc<CompositeModulus>) -> Self {
        Self {
            coeffs: vec![BigUint::zero(); degree],
            modulus,
        }
    }

    pub fn from_signed(values: &[i64], modulus: Arc<CompositeModulus>) -> Result<Self> {
        let coeffs = values
            .iter()
            .map(|&v| reduce_signed_big(&BigInt::from(v), &modulus.value))
            .collect();
        Self::new(coeffs, modulus)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [BigUint] {
        &mut self.coeffs
    }

    pub fn modulus(&self) -> &Arc<CompositeModulus> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            bail!(
                Argument,
                "length mismatch: {} vs {}",
                self.coeffs.len(),
                other.coeffs.len()
            );
        }
        if self.modulus.value != other.modulus.value {
            bail!(Argument, "modulus mismatch");
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = &self.modulus.value;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| {
                let s = a + b;
                if &s >= q {
                    s - q
                } else {
                    s
                }
            })
            .collect();
        Ok(Self {
            coeffs,
            modulus: self.modulus.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = &self.modulus.value;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| if a >= b { a - b } else { q - b + a })
            .collect();
        Ok(Self {
            coeffs,
            modulus: self.modulus.clone(),
        })
    }

    pub fn neg(&self) -> Self {
        let q = &self.modulus.value;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| if a.is_zero() { BigUint::zero() } else { q - a })
            .collect();
        Self {
            coeffs,
            modulus: self.modulus.clone(),
        }
    }

    /// Schoolbook product modulo `X^N + 1` and `Q`.
    pub fn negacyclic_mul_schoolbook(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.coeffs.len();
        let mut pos = vec![BigUint::zero(); n];
        let mut neg = vec![BigUint::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k < n {
                    pos[k] += a * b;
                } else {
                    neg[k - n] += a * b;
                }
            }
        }
        Ok(self.fold_signed(pos, neg))
    }

    /// Schoolbook product with a ternary polynomial.
    pub fn mul_ternary(&self, ternary: &[i8]) -> Result<Self> {
        let n = self.coeffs.len();
        if ternary.len() != n {
            bail!(Argument, "length mismatch: {} vs {}", n, ternary.len());
        }
        if let Some(bad) = ternary.iter().find(|s| !(-1..=1).contains(*s)) {
            bail!(Argument, "non-ternary entry {bad}");
        }
        if let Some(q) = self.modulus.as_u64() {
            // Single-word modulus: i128 accumulators cannot overflow for N <= 2^60.
            let words: Vec<u64> = self.coeffs.iter().map(|c| c.to_u64().unwrap()).collect();
            let mut acc = vec![0i128; n];
            for (j, &s) in ternary.iter().enumerate() {
                if s == 0 {
                    continue;
                }
                for (i, &c) in words.iter().enumerate() {
                    let k = i + j;
                    let term = if s > 0 { c as i128 } else { -(c as i128) };
                    if k < n {
                        acc[k] += term;
                    } else {
                        acc[k - n] -= term;
                    }
                }
            }
            let coeffs = acc
                .into_iter()
                .map(|v| BigUint::from(reduce_signed(v, q)))
                .collect();
            return Ok(Self {
                coeffs,
                modulus: self.modulus.clone(),
            });
        }
        let mut pos = vec![BigUint::zero(); n];
        let mut neg = vec![BigUint::zero(); n];
        for (j, &s) in ternary.iter().enumerate() {
            if s == 0 {
                continue;
            }
            for (i, c) in self.coeffs.iter().enumerate() {
                let k = i + j;
                let (slot, flip) = if k < n { (k, false) } else { (k - n, true) };
                if (s > 0) != flip {
                    pos[slot] += c;
                } else {
                    neg[slot] += c;
                }
            }
        }
        Ok(self.fold_signed(pos, neg))
    }

    fn fold_signed(&self, pos: Vec<BigUint>, neg: Vec<BigUint>) -> Self {
        let q = &self.modulus.value;
        let coeffs = pos
            .into_iter()
            .zip(neg)
            .map(|(p, m)| {
                let p = p % q;
                let m = m % q;
                if p >= m {
                    p - m
                } else {
                    q - m + p
                }
            })
            .collect();
        Self {
            coeffs,
            modulus: self.modulus.clone(),
        }
    }
}
