//! Slot encoding (negacyclic DFT with gap packing) and the negacyclic NTT.
//!
//! The DFT is an explicit matrix product evaluated in double-double
//! arithmetic over an exactly reduced cosine table. Real inputs make every
//! entry of interest a cosine: the encoder only needs `Re(W⁻¹)` and the
//! decoder only returns `Re(W·m)`.

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::dd::{cos_table, pow2, Dd};
use crate::error::{bail, Result};
use crate::ring_arith::{mod_add, mod_mul, mod_pow, mod_sub, Domain, PrimeModulus, RingPoly};

/// Parameters of the slot encoder for one `(N, n, Δ)`.
#[derive(Clone, Debug)]
pub struct EncodingContext {
    degree: usize,
    slots: usize,
    n_prime: usize,
    gap: usize,
    delta_log2: u32,
    /// `cos(2πk/M)` with `M = 4n'`.
    cos: Vec<Dd>,
}

impl EncodingContext {
    pub fn new(degree: usize, slots: usize, delta_log2: u32) -> Result<Self> {
        if degree < 2 || !degree.is_power_of_two() {
            bail!(Argument, "ring degree {degree} is not a power of two >= 2");
        }
        if slots == 0 {
            bail!(Argument, "slot count must be at least 1");
        }
        if slots > degree / 2 {
            bail!(Capacity, "{slots} slots exceed N/2 = {}", degree / 2);
        }
        if delta_log2 > 120 {
            bail!(Argument, "scaling factor 2^{delta_log2} out of range");
        }
        let n_prime = slots.next_power_of_two();
        Ok(Self {
            degree,
            slots,
            n_prime,
            gap: degree / 2 / n_prime,
            delta_log2,
            cos: cos_table(4 * n_prime),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn gap(&self) -> usize {
        self.gap
    }

    pub fn delta_log2(&self) -> u32 {
        self.delta_log2
    }

    fn m(&self) -> usize {
        4 * self.n_prime
    }

    /// Whether index `i` of the big polynomial carries slot information.
    pub fn is_used(&self, i: usize) -> bool {
        i < self.degree && i % self.gap == 0
    }

    /// Big-polynomial indices read by the decoder, in order.
    pub fn used_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..2 * self.n_prime).map(move |t| t * self.gap)
    }

    /// Scale, transform and round `z` into signed coefficients.
    pub fn encode(&self, z: &[f64]) -> Result<Vec<i128>> {
        if z.is_empty() {
            bail!(Argument, "empty input vector");
        }
        if z.len() > self.degree / 2 {
            bail!(Capacity, "{} values exceed N/2 = {}", z.len(), self.degree / 2);
        }
        if z.len() != self.slots {
            bail!(Argument, "expected {} values, got {}", self.slots, z.len());
        }
        if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
            bail!(Argument, "non-finite input {bad}");
        }
        let max = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if max >= pow2(124 - self.delta_log2 as i32) {
            bail!(Capacity, "input magnitude {max} overflows the coefficient range");
        }
        let m = self.m();
        let two_n = 2 * self.n_prime;
        // The mirrored extension (u, reverse(u)) pairs row r with row
        // 2n'-1-r, whose cosines agree, so only the first n rows are summed
        // and the 1/(2n') normalization becomes 1/n'.
        let mut out = vec![0i128; self.degree];
        for c in 0..two_n {
            let mut acc = Dd::ZERO;
            for (r, &u) in z.iter().enumerate() {
                if u == 0.0 {
                    continue;
                }
                let k = ((2 * r + 1) * c) % m;
                acc = acc.add(self.cos[k].mul_f64(u));
            }
            let scaled = acc
                .scale_pow2(self.delta_log2 as i32)
                .div_f64(self.n_prime as f64);
            out[c * self.gap] = scaled.round_half_away();
        }
        Ok(out)
    }

    fn decode_with(&self, coeff: impl Fn(usize) -> Dd) -> Vec<f64> {
        let m = self.m();
        let cols: Vec<(usize, Dd)> = (0..2 * self.n_prime)
            .map(|t| (t, coeff(t * self.gap)))
            .filter(|(_, v)| v.hi != 0.0 || v.lo != 0.0)
            .collect();
        let scale = -(self.delta_log2 as i32);
        (0..self.slots)
            .map(|r| {
                let step = 2 * r + 1;
                let mut acc = Dd::ZERO;
                for &(t, v) in &cols {
                    let cos = self.cos[(step * t) % m];
                    if cos.hi == 0.0 {
                        continue;
                    }
                    acc = acc.add(cos.mul(v));
                }
                acc.scale_pow2(scale).to_f64()
            })
            .collect()
    }

    /// Read the used coefficients of `m`, divide by `Δ`, apply `W` and keep
    /// the real part of the first `n` entries.
    pub fn decode(&self, m: &[i128]) -> Result<Vec<f64>> {
        if m.len() != self.degree {
            bail!(Argument, "expected {} coefficients, got {}", self.degree, m.len());
        }
        Ok(self.decode_with(|i| Dd::from_i128(m[i])))
    }

    /// [`Self::decode`] for arbitrary-precision signed coefficients.
    pub fn decode_big(&self, m: &[BigInt]) -> Result<Vec<f64>> {
        if m.len() != self.degree {
            bail!(Argument, "expected {} coefficients, got {}", self.degree, m.len());
        }
        Ok(self.decode_with(|i| Dd::from_bigint(&m[i])))
    }

    /// L2 norm of the decoded error caused by adding `2^j` at coefficient `i`.
    pub fn predict_l2_norm(&self, i: usize, j: u32) -> f64 {
        if !self.is_used(i) {
            return 0.0;
        }
        let t = i / self.gap;
        let m = self.m();
        let sq = (0..self.slots).fold(Dd::ZERO, |acc, r| {
            let c = self.cos[((2 * r + 1) * t) % m];
            acc.add(c.mul(c))
        });
        sq.sqrt()
            .scale_pow2(j as i32 - self.delta_log2 as i32)
            .to_f64()
    }

    /// The `2n' × 2n'` matrix with rows `(ξ^((2r+1)c))_c`, `ξ = exp(-2πi/(4n'))`.
    pub fn vandermonde(&self) -> Vec<Vec<Complex64>> {
        let m = self.m() as f64;
        let two_n = 2 * self.n_prime;
        (0..two_n)
            .map(|r| {
                (0..two_n)
                    .map(|c| {
                        let k = ((2 * r + 1) * c) % self.m();
                        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / m)
                    })
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`Self::vandermonde`]: `(1/2n')` times its conjugate transpose.
    pub fn vandermonde_inverse(&self) -> Vec<Vec<Complex64>> {
        let w = self.vandermonde();
        let two_n = w.len();
        let scale = 1.0 / two_n as f64;
        (0..two_n)
            .map(|r| (0..two_n).map(|c| w[c][r].conj() * scale).collect())
            .collect()
    }
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

fn bit_reverse_permute<T>(a: &mut [T]) {
    let bits = a.len().trailing_zeros();
    for i in 0..a.len() {
        let j = bit_reverse(i, bits);
        if i < j {
            a.swap(i, j);
        }
    }
}

/// Twiddle tables for the negacyclic NTT over one prime and one degree.
///
/// Output convention: entry `r` of the evaluation vector is
/// `Σ_c p_c ψ^((2r+1)c)`, in natural order.
#[derive(Clone, Debug)]
pub struct NttTables {
    modulus: PrimeModulus,
    degree: usize,
    /// `ψ^bitrev(k)`.
    psi_rev: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    n_inv: u64,
}

impl NttTables {
    pub fn new(modulus: PrimeModulus) -> Result<Self> {
        let Some(roots) = modulus.roots().copied() else {
            bail!(Parameter, "modulus {} has no negacyclic roots", modulus.value());
        };
        let n = roots.degree;
        let q = modulus.value();
        let bits = n.trailing_zeros();
        let mut psi_rev = vec![0; n];
        let mut psi_inv_rev = vec![0; n];
        let (mut p, mut pi) = (1u64, 1u64);
        for k in 0..n {
            let b = bit_reverse(k, bits);
            psi_rev[b] = p;
            psi_inv_rev[b] = pi;
            p = mod_mul(p, roots.psi, q);
            pi = mod_mul(pi, roots.psi_inv, q);
        }
        Ok(Self {
            modulus,
            degree: n,
            psi_rev,
            psi_inv_rev,
            n_inv: roots.n_inv,
        })
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn check(&self, p: &RingPoly, want: Domain) -> Result<()> {
        if p.modulus().value() != self.modulus.value() {
            bail!(
                Argument,
                "modulus mismatch: {} vs {}",
                p.modulus().value(),
                self.modulus.value()
            );
        }
        if p.degree() != self.degree {
            bail!(Argument, "length mismatch: {} vs {}", p.degree(), self.degree);
        }
        if p.domain() != want {
            bail!(State, "expected {want:?} domain, found {:?}", p.domain());
        }
        Ok(())
    }

    /// In-place forward transform of a raw coefficient vector.
    pub fn forward_in_place(&self, a: &mut [u64]) {
        let q = self.modulus.value();
        let n = self.degree;
        let mut t = n;
        let mut m = 1;
        while m < n {
            t /= 2;
            for i in 0..m {
                let s = self.psi_rev[m + i];
                let j1 = 2 * i * t;
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = mod_mul(a[j + t], s, q);
                    a[j] = mod_add(u, v, q);
                    a[j + t] = mod_sub(u, v, q);
                }
            }
            m *= 2;
        }
        bit_reverse_permute(a);
    }

    /// In-place inverse transform of a raw evaluation vector.
    pub fn inverse_in_place(&self, a: &mut [u64]) {
        let q = self.modulus.value();
        let n = self.degree;
        bit_reverse_permute(a);
        let mut t = 1;
        let mut m = n;
        while m > 1 {
            let h = m / 2;
            let mut j1 = 0;
            for i in 0..h {
                let s = self.psi_inv_rev[h + i];
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = a[j + t];
                    a[j] = mod_add(u, v, q);
                    a[j + t] = mod_mul(mod_sub(u, v, q), s, q);
                }
                j1 += 2 * t;
            }
            t *= 2;
            m = h;
        }
        for x in a.iter_mut() {
            *x = mod_mul(*x, self.n_inv, q);
        }
    }
}

pub fn ntt_forward(p: &RingPoly, t: &NttTables) -> Result<RingPoly> {
    t.check(p, Domain::Coefficient)?;
    let mut out = p.clone();
    t.forward_in_place(&mut out.coeffs);
    out.domain = Domain::Evaluation;
    Ok(out)
}

pub fn ntt_inverse(p: &RingPoly, t: &NttTables) -> Result<RingPoly> {
    t.check(p, Domain::Evaluation)?;
    let mut out = p.clone();
    t.inverse_in_place(&mut out.coeffs);
    out.domain = Domain::Coefficient;
    Ok(out)
}

/// Dense `W_NTT` action, `O(N²)`; reference for the fast transform.
pub fn ntt_dense(coeffs: &[u64], modulus: &PrimeModulus) -> Result<Vec<u64>> {
    let Some(roots) = modulus.roots() else {
        bail!(Parameter, "modulus {} has no negacyclic roots", modulus.value());
    };
    let q = modulus.value();
    let n = coeffs.len();
    if n != roots.degree {
        bail!(Argument, "length mismatch: {} vs {}", n, roots.degree);
    }
    Ok((0..n)
        .map(|r| {
            coeffs.iter().enumerate().fold(0u64, |acc, (c, &p)| {
                let w = mod_pow(roots.psi, ((2 * r + 1) * c) as u64 % (2 * n as u64), q);
                mod_add(acc, mod_mul(p, w, q), q)
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_arith::{find_ntt_prime, mod_inv};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_poly(rng: &mut ChaCha8Rng, m: PrimeModulus, n: usize) -> RingPoly {
        let q = m.value();
        RingPoly::new((0..n).map(|_| rng.gen_range(0..q)).collect(), m, Domain::Coefficient).unwrap()
    }

    /// Gauss-Jordan inverse of a square matrix mod a prime.
    fn invert_mod(mut a: Vec<Vec<u64>>, q: u64) -> Vec<Vec<u64>> {
        let n = a.len();
        let mut inv: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != 0).expect("singular");
            a.swap(col, piv);
            inv.swap(col, piv);
            let f = mod_inv(a[col][col], q).unwrap();
            for j in 0..n {
                a[col][j] = mod_mul(a[col][j], f, q);
                inv[col][j] = mod_mul(inv[col][j], f, q);
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let g = a[r][col];
                    for j in 0..n {
                        a[r][j] = mod_sub(a[r][j], mod_mul(g, a[col][j], q), q);
                        inv[r][j] = mod_sub(inv[r][j], mod_mul(g, inv[col][j], q), q);
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn forward_matches_dense_matrix_n4_q17() {
        let m = PrimeModulus::ntt_friendly(17, 4).unwrap();
        assert_eq!(m.psi(), Some(2));
        let t = NttTables::new(m).unwrap();
        let p = RingPoly::new(vec![1, 2, 3, 4], m, Domain::Coefficient).unwrap();
        // hand evaluation: a_r = Σ p_c 2^((2r+1)c) mod 17
        let expected: Vec<u64> = (0..4u64)
            .map(|r| (0..4u64).map(|c| (c + 1) * mod_pow(2, (2 * r + 1) * c, 17)).sum::<u64>() % 17)
            .collect();
        let f = ntt_forward(&p, &t).unwrap();
        assert_eq!(f.coeffs(), &expected[..]);
        assert_eq!(f.domain(), Domain::Evaluation);
    }

    #[test]
    fn inverse_matches_dense_inverse_n4_q17() {
        let m = PrimeModulus::ntt_friendly(17, 4).unwrap();
        let t = NttTables::new(m).unwrap();
        let w: Vec<Vec<u64>> = (0..4u64)
            .map(|r| (0..4u64).map(|c| mod_pow(2, (2 * r + 1) * c, 17)).collect())
            .collect();
        let w_inv = invert_mod(w, 17);
        for eval in [[5u64, 0, 16, 3], [1, 1, 1, 1], [0, 7, 0, 9]] {
            let want: Vec<u64> = (0..4)
                .map(|i| (0..4).map(|k| w_inv[i][k] * eval[k]).sum::<u64>() % 17)
                .collect();
            let p = RingPoly::new(eval.to_vec(), m, Domain::Evaluation).unwrap();
            assert_eq!(ntt_inverse(&p, &t).unwrap().coeffs(), &want[..]);
        }
    }

    #[test]
    fn forward_matches_dense_at_larger_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2usize, 8, 32, 128] {
            let m = find_ntt_prime(40, n, &[]).unwrap();
            let t = NttTables::new(m).unwrap();
            for _ in 0..5 {
                let p = rand_poly(&mut rng, m, n);
                let f = ntt_forward(&p, &t).unwrap();
                assert_eq!(f.coeffs(), &ntt_dense(p.coeffs(), &m).unwrap()[..]);
            }
        }
    }

    #[test]
    fn constant_and_zero_polynomials() {
        let m = find_ntt_prime(30, 16, &[]).unwrap();
        let t = NttTables::new(m).unwrap();
        let mut c = vec![0u64; 16];
        c[0] = 12345;
        let f = ntt_forward(&RingPoly::new(c, m, Domain::Coefficient).unwrap(), &t).unwrap();
        assert!(f.coeffs().iter().all(|&x| x == 12345));
        let z = RingPoly::zero(16, m, Domain::Evaluation);
        assert!(ntt_inverse(&z, &t).unwrap().coeffs().iter().all(|&x| x == 0));
    }

    #[test]
    fn single_evaluation_error_spreads() {
        let m = find_ntt_prime(60, 16, &[]).unwrap();
        let t = NttTables::new(m).unwrap();
        let mut e = RingPoly::zero(16, m, Domain::Evaluation);
        e.coeffs_mut()[3] = 1 << 20;
        let c = ntt_inverse(&e, &t).unwrap();
        assert!(c.coeffs().iter().all(|&x| x != 0));
    }

    #[test]
    fn wrong_domain_is_state_error() {
        let m = find_ntt_prime(30, 8, &[]).unwrap();
        let t = NttTables::new(m).unwrap();
        let e = RingPoly::zero(8, m, Domain::Evaluation);
        assert!(matches!(ntt_forward(&e, &t), Err(crate::Error::State(_))));
        let c = RingPoly::zero(8, m, Domain::Coefficient);
        assert!(matches!(ntt_inverse(&c, &t), Err(crate::Error::State(_))));
    }

    #[test]
    fn ntt_product_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [4usize, 8, 64, 256] {
            let m = find_ntt_prime(59, n, &[]).unwrap();
            let t = NttTables::new(m).unwrap();
            for _ in 0..10 {
                let a = rand_poly(&mut rng, m, n);
                let b = rand_poly(&mut rng, m, n);
                let fa = ntt_forward(&a, &t).unwrap();
                let fb = ntt_forward(&b, &t).unwrap();
                let c = ntt_inverse(&fa.pointwise_mul(&fb).unwrap(), &t).unwrap();
                assert_eq!(c, a.negacyclic_mul_schoolbook(&b).unwrap());
            }
        }
    }

    #[test]
    fn vandermonde_inverse_is_inverse() {
        for (n, slots) in [(8usize, 4usize), (16, 2), (64, 32), (32, 3)] {
            let ctx = EncodingContext::new(n, slots, 20).unwrap();
            let w = ctx.vandermonde();
            let wi = ctx.vandermonde_inverse();
            let d = w.len();
            for r in 0..d {
                for c in 0..d {
                    let s: Complex64 = (0..d).map(|k| w[r][k] * wi[k][c]).sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((s.re - want).abs() < 1e-9 && s.im.abs() < 1e-9);
                }
            }
        }
    }

    /// Dense complex oracle for encode: conjugate-extend, multiply by the
    /// explicit inverse matrix, scale, round.
    fn encode_oracle(ctx: &EncodingContext, z: &[f64]) -> Vec<i128> {
        let np = ctx.n_prime();
        let mut u = vec![0.0; np];
        u[..z.len()].copy_from_slice(z);
        let ext: Vec<Complex64> = u
            .iter()
            .chain(u.iter().rev())
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let wi = ctx.vandermonde_inverse();
        let delta = 2f64.powi(ctx.delta_log2() as i32);
        let mut out = vec![0i128; ctx.degree()];
        for (c, row) in wi.iter().enumerate() {
            let v: Complex64 = row.iter().zip(&ext).map(|(a, b)| a * b).sum();
            out[c * ctx.gap()] = (v.re * delta).round() as i128;
        }
        out
    }

    #[test]
    fn encode_matches_dense_oracle_small() {
        let ctx = EncodingContext::new(4, 2, 10).unwrap();
        let coeffs = ctx.encode(&[1.0, 1.0]).unwrap();
        assert_eq!(coeffs, encode_oracle(&ctx, &[1.0, 1.0]));
        // u = (1,1): only the constant column survives, 1024
        assert_eq!(coeffs, vec![1024, 0, 0, 0]);
        let back = ctx.decode(&coeffs).unwrap();
        for v in back {
            assert!((v - 1.0).abs() <= 4.0 / (std::f64::consts::PI * 1024.0));
        }
        let ctx = EncodingContext::new(16, 8, 20).unwrap();
        let z = [3.25, 200.0, 17.5, 0.0, 99.9, 1.0, 128.0, 255.0];
        assert_eq!(ctx.encode(&z).unwrap(), encode_oracle(&ctx, &z));
    }

    #[test]
    fn gap_layout() {
        let ctx = EncodingContext::new(8, 2, 20).unwrap();
        assert_eq!(ctx.gap(), 2);
        let c = ctx.encode(&[5.0, 77.0]).unwrap();
        for (i, v) in c.iter().enumerate() {
            if i % 2 == 1 {
                assert_eq!(*v, 0);
            }
        }
        assert!(c.iter().step_by(2).any(|&v| v != 0));
    }

    #[test]
    fn capacity_and_argument_errors() {
        assert!(matches!(EncodingContext::new(8, 5, 20), Err(crate::Error::Capacity(_))));
        assert!(matches!(EncodingContext::new(8, 0, 20), Err(crate::Error::Argument(_))));
        let ctx = EncodingContext::new(8, 4, 20).unwrap();
        assert!(matches!(ctx.encode(&[1.0; 5]), Err(crate::Error::Capacity(_))));
        assert!(ctx.encode(&[]).is_err());
    }

    #[test]
    fn zero_round_trip() {
        let ctx = EncodingContext::new(16, 8, 30).unwrap();
        assert!(ctx.encode(&[0.0; 8]).unwrap().iter().all(|&v| v == 0));
        assert!(ctx.decode(&[0; 16]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn predictor_matches_dense_matrix() {
        let ctx = EncodingContext::new(4, 2, 50).unwrap();
        let w = ctx.vandermonde();
        for i in 0..4 {
            for j in [0u32, 10, 50, 59] {
                // e = 2^j at position i, decode = Re(W e / Δ) restricted to n rows
                let scale = 2f64.powi(j as i32 - 50);
                let norm = (0..2).map(|r| (w[r][i].re * scale).powi(2)).sum::<f64>().sqrt();
                let p = ctx.predict_l2_norm(i, j);
                assert!((p - norm).abs() <= 1e-12 * scale, "i={i} j={j} {p} {norm}");
            }
        }
        assert_eq!(ctx.predict_l2_norm(2, 40), 0.0);
        assert_eq!(ctx.predict_l2_norm(0, 50), 2f64.sqrt());
    }

    #[test]
    fn half_degree_column_is_silent() {
        for n in [4usize, 16, 1024] {
            let ctx = EncodingContext::new(n, n / 2, 30).unwrap();
            for j in 0..64 {
                assert_eq!(ctx.predict_l2_norm(n / 2, j), 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_within_bound(log_n in 2u32..=7, slots_frac in 0.0f64..1.0, dlog in prop::sample::select(vec![20u32, 40, 50]), seed in any::<u64>()) {
            let n = 1usize << log_n;
            let slots = 1 + ((slots_frac * (n / 2) as f64) as usize).min(n / 2 - 1);
            let ctx = EncodingContext::new(n, slots, dlog).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<f64> = (0..slots).map(|_| rng.gen_range(0.0..256.0)).collect();
            let back = ctx.decode(&ctx.encode(&z).unwrap()).unwrap();
            let bound = n as f64 / (std::f64::consts::PI * 2f64.powi(dlog as i32));
            for (a, b) in z.iter().zip(&back) {
                prop_assert!((a - b).abs() <= bound);
            }
        }

        #[test]
        fn off_support_is_ignored(log_n in 3u32..=7, log_slots in 0u32..=2, idx in any::<usize>(), v in any::<i64>(), seed in any::<u64>()) {
            let n = 1usize << log_n;
            let slots = 1usize << log_slots.min(log_n - 2);
            let ctx = EncodingContext::new(n, slots, 30).unwrap();
            prop_assume!(ctx.gap() > 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<f64> = (0..slots).map(|_| rng.gen_range(0.0..256.0)).collect();
            let mut c = ctx.encode(&z).unwrap();
            let golden = ctx.decode(&c).unwrap();
            let mut i = idx % n;
            if i % ctx.gap() == 0 { i += 1; }
            c[i] = c[i].wrapping_add(v as i128);
            prop_assert_eq!(ctx.decode(&c).unwrap(), golden);
        }

        #[test]
        fn predictor_scaling(log_n in 2u32..=8, i_frac in 0.0f64..1.0, j in 0u32..60, dlog in 10u32..60) {
            let n = 1usize << log_n;
            let ctx = EncodingContext::new(n, n / 2, dlog).unwrap();
            let i = ((i_frac * n as f64) as usize).min(n - 1);
            let p = ctx.predict_l2_norm(i, j);
            prop_assume!(p > 0.0);
            let p2 = ctx.predict_l2_norm(i, j + 1);
            prop_assert!((p2 / p - 2.0).abs() <= 1e-9 * 2.0);
            let other = EncodingContext::new(n, n / 2, dlog + 3).unwrap();
            prop_assert!((p / other.predict_l2_norm(i, j) - 8.0).abs() <= 1e-9 * 8.0);
        }

        #[test]
        fn ntt_round_trip(log_n in 1u32..=9, seed in any::<u64>()) {
            let n = 1usize << log_n;
            let m = find_ntt_prime(60, n, &[]).unwrap();
            let t = NttTables::new(m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = rand_poly(&mut rng, m, n);
            prop_assert_eq!(ntt_inverse(&ntt_forward(&p, &t).unwrap(), &t).unwrap(), p);
        }
    }
}
