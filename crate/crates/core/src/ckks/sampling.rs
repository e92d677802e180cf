//! Secret, noise and uniform samplers over a caller-supplied stream.
//!
//! Every sampler consumes the stream in a fixed order so that identical
//! seeds give identical polynomials across representations.

use num_bigint::BigUint;
use rand::seq::index;
use rand::{Rng, RngCore};

/// Uniform over `{-1, 0, 1}` per coefficient.
pub fn ternary_uniform<R: RngCore>(rng: &mut R, n: usize) -> Vec<i8> {
    (0..n).map(|_| rng.gen_range(0..3i8) - 1).collect()
}

/// Exactly `h` nonzero entries at uniformly chosen positions with uniform signs.
pub fn ternary_sparse<R: RngCore>(rng: &mut R, n: usize, h: usize) -> Vec<i8> {
    let mut out = vec![0i8; n];
    let mut positions = index::sample(rng, n, h).into_vec();
    positions.sort_unstable();
    for p in positions {
        out[p] = if rng.gen::<bool>() { 1 } else { -1 };
    }
    out
}

/// Rounded continuous Gaussian (polar method), truncated at `±6σ`.
pub fn gaussian<R: RngCore>(rng: &mut R, n: usize, sigma: f64) -> Vec<i64> {
    let bound = 6.0 * sigma;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s >= 1.0 || s == 0.0 {
            continue;
        }
        let f = (-2.0 * s.ln() / s).sqrt();
        for x in [u * f * sigma, v * f * sigma] {
            if x.abs() <= bound && out.len() < n {
                out.push(x.round() as i64);
            }
        }
    }
    out
}

/// Uniform in `[0, q)` by rejection on `bits(q)`-bit words.
pub fn uniform_word<R: RngCore>(rng: &mut R, q: u64) -> u64 {
    let bits = 64 - (q - 1).leading_zeros();
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    loop {
        let x = rng.next_u64() & mask;
        if x < q {
            return x;
        }
    }
}

/// Uniform in `[0, q)` for an arbitrary-precision modulus.
pub fn uniform_big<R: RngCore>(rng: &mut R, q: &BigUint) -> BigUint {
    let bits = (q - 1u32).bits();
    let words = bits.div_ceil(64) as usize;
    let top = bits - 64 * (words as u64 - 1);
    let top_mask = if top == 64 { u64::MAX } else { (1u64 << top) - 1 };
    loop {
        let mut digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        digits[words - 1] &= top_mask;
        let mut bytes = Vec::with_capacity(words * 8);
        for d in &digits {
            bytes.extend_from_slice(&d.to_le_bytes());
        }
        let x = BigUint::from_bytes_le(&bytes);
        if &x < q {
            return x;
        }
    }
}

/// `n` coefficients over the given word moduli, coefficient-major, limb-minor.
pub fn uniform_limbs<R: RngCore>(rng: &mut R, n: usize, moduli: &[u64]) -> Vec<Vec<u64>> {
    let mut limbs = vec![Vec::with_capacity(n); moduli.len()];
    for _ in 0..n {
        for (limb, &q) in limbs.iter_mut().zip(moduli) {
            limb.push(uniform_word(rng, q));
        }
    }
    limbs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn ternary_counts() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let t = ternary_uniform(&mut rng, 30_000);
        for v in [-1i8, 0, 1] {
            let c = t.iter().filter(|&&x| x == v).count();
            assert!((9_000..11_000).contains(&c), "{v}: {c}");
        }
        let s = ternary_sparse(&mut rng, 16, 4);
        assert_eq!(s.iter().filter(|&&x| x != 0).count(), 4);
        assert!(s.iter().all(|x| (-1..=1).contains(x)));
    }

    #[test]
    fn gaussian_moments_and_tail() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let g = gaussian(&mut rng, 100_000, 3.2);
        assert!(g.iter().all(|x| x.abs() <= 19));
        let mean = g.iter().sum::<i64>() as f64 / g.len() as f64;
        let var = g.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / g.len() as f64;
        assert!(mean.abs() < 0.05);
        // rounding adds 1/12 to the variance
        assert!((var - (3.2f64.powi(2) + 1.0 / 12.0)).abs() < 0.3, "{var}");
    }

    #[test]
    fn uniform_ranges() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert!(uniform_word(&mut rng, 17) < 17);
        }
        let q = BigUint::from(1u8) << 130u32;
        let q = q - 5u32;
        for _ in 0..200 {
            assert!(uniform_big(&mut rng, &q) < q);
        }
        let hits: std::collections::HashSet<u64> = (0..500).map(|_| uniform_word(&mut rng, 17)).collect();
        assert_eq!(hits.len(), 17);
    }

    #[test]
    fn single_word_big_matches_word_sampler() {
        let q = (1u64 << 59) + 21;
        let mut a = ChaCha20Rng::seed_from_u64(4);
        let mut b = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..100 {
            assert_eq!(uniform_big(&mut a, &BigUint::from(q)), BigUint::from(uniform_word(&mut b, q)));
        }
    }
}
