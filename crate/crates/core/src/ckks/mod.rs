//! Key generation and the client pipeline: encode, encrypt, decrypt, decode.

mod params;
mod poly;
pub mod sampling;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::RngCore;

pub use params::{Mode, SchemeParams, DEFAULT_SIGMA};
pub use poly::Poly;

use crate::error::{bail, Result};
use crate::ring_arith::{
    centered, centered_big, reduce_signed, reduce_signed_big, BigPoly, CompositeModulus, Domain,
    RingPoly,
};
use crate::rns::{LimbChain, RnsPoly};
use crate::seed::derive_rng;
use crate::transforms::{EncodingContext, NttTables};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    s: Vec<i8>,
    /// NTT of `s` per limb, in evaluation-domain modes.
    s_eval: Option<RnsPoly>,
    seed: u64,
}

impl SecretKey {
    pub fn coeffs(&self) -> &[i8] {
        &self.s
    }

    pub fn eval(&self) -> Option<&RnsPoly> {
        self.s_eval.as_ref()
    }

    /// Scheme seed the key was derived from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn hamming_weight(&self) -> usize {
        self.s.iter().filter(|&&x| x != 0).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub p0: Poly,
    pub p1: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaintext {
    pub poly: Poly,
    pub delta_log2: u32,
    pub slots: usize,
}

impl Plaintext {
    pub fn domain(&self) -> Domain {
        self.poly.domain()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub c0: Poly,
    pub c1: Poly,
}

/// Everything derived from [`SchemeParams`]: moduli, encoder, NTT tables.
#[derive(Clone, Debug)]
pub struct CkksContext {
    params: SchemeParams,
    chain: LimbChain,
    /// Single big modulus for vanilla mode, without factorization.
    big: Arc<CompositeModulus>,
    encoder: EncodingContext,
    ntt: Vec<NttTables>,
}

impl CkksContext {
    pub fn new(params: SchemeParams) -> Result<Self> {
        params.validate()?;
        let chain = LimbChain::build_chain(params.q0_bits, params.limbs, params.ring_degree)?;
        let big = Arc::new(CompositeModulus::from_value(chain.modulus().value().clone())?);
        let encoder = EncodingContext::new(params.ring_degree, params.slots, params.delta_log2)?;
        let ntt = if params.mode.uses_ntt() {
            chain
                .moduli()
                .iter()
                .map(|&m| NttTables::new(m))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            params,
            chain,
            big,
            encoder,
            ntt,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.params.mode
    }

    pub fn degree(&self) -> usize {
        self.params.ring_degree
    }

    pub fn chain(&self) -> &LimbChain {
        &self.chain
    }

    pub fn encoder(&self) -> &EncodingContext {
        &self.encoder
    }

    pub fn ntt_tables(&self) -> &[NttTables] {
        &self.ntt
    }

    /// The full modulus `Q`.
    pub fn modulus(&self) -> &Arc<CompositeModulus> {
        &self.big
    }

    /// Domain in which plaintexts and ciphertexts are stored.
    pub fn storage_domain(&self) -> Domain {
        if self.params.mode.uses_ntt() {
            Domain::Evaluation
        } else {
            Domain::Coefficient
        }
    }

    /// Number of stored words per coefficient: 1 for vanilla, `L` otherwise.
    pub fn storage_limbs(&self) -> usize {
        match self.params.mode {
            Mode::Vanilla => 1,
            _ => self.chain.len(),
        }
    }

    /// Valid bit positions for a fault: `bits(Q)` for vanilla, 64 for words.
    pub fn injectable_width(&self) -> u32 {
        match self.params.mode {
            Mode::Vanilla => self.big.bits() as u32,
            _ => 64,
        }
    }

    /// Signed small coefficients in the storage representation.
    pub fn poly_from_signed(&self, values: &[i128]) -> Result<Poly> {
        if values.len() != self.degree() {
            bail!(Argument, "expected {} coefficients, got {}", self.degree(), values.len());
        }
        match self.params.mode {
            Mode::Vanilla => {
                let q = self.big.value();
                let coeffs = values
                    .iter()
                    .map(|&v| reduce_signed_big(&BigInt::from(v), q))
                    .collect();
                Ok(Poly::Big(BigPoly::new(coeffs, self.big.clone())?))
            }
            _ => {
                let limbs = self
                    .chain
                    .moduli()
                    .iter()
                    .map(|&m| {
                        let q = m.value();
                        RingPoly {
                            coeffs: values.iter().map(|&v| reduce_signed(v, q)).collect(),
                            modulus: m,
                            domain: Domain::Coefficient,
                        }
                    })
                    .collect();
                self.to_storage(Poly::Rns(RnsPoly { limbs }))
            }
        }
    }

    fn small_poly(&self, values: &[i64]) -> Result<Poly> {
        let wide: Vec<i128> = values.iter().map(|&v| v as i128).collect();
        self.poly_from_signed(&wide)
    }

    /// Forward NTT of every limb if the mode stores evaluations.
    pub fn to_storage(&self, p: Poly) -> Result<Poly> {
        match p {
            Poly::Rns(mut r) if self.params.mode.uses_ntt() && r.domain() == Domain::Coefficient => {
                for (l, t) in r.limbs.iter_mut().zip(&self.ntt) {
                    t.forward_in_place(&mut l.coeffs);
                    l.domain = Domain::Evaluation;
                }
                Ok(Poly::Rns(r))
            }
            other => Ok(other),
        }
    }

    /// Inverse NTT of every limb if needed.
    pub fn to_coefficient(&self, p: &Poly) -> Result<Poly> {
        match p {
            Poly::Rns(r) if r.domain() == Domain::Evaluation => {
                if self.ntt.len() != r.limbs.len() {
                    bail!(State, "no NTT tables for an evaluation-domain polynomial");
                }
                let mut r = r.clone();
                for (l, t) in r.limbs.iter_mut().zip(&self.ntt) {
                    t.inverse_in_place(&mut l.coeffs);
                    l.domain = Domain::Coefficient;
                }
                Ok(Poly::Rns(r))
            }
            other => Ok(other.clone()),
        }
    }

    fn ternary_eval(&self, t: &[i8]) -> Result<Option<RnsPoly>> {
        if !self.params.mode.uses_ntt() {
            return Ok(None);
        }
        let wide: Vec<i64> = t.iter().map(|&x| x as i64).collect();
        match self.small_poly(&wide)? {
            Poly::Rns(r) => Ok(Some(r)),
            Poly::Big(_) => bail!(State, "evaluation domain requires limbs"),
        }
    }

    /// Product of a storage-domain polynomial with a ternary polynomial.
    pub fn mul_ternary(&self, p: &Poly, t: &[i8]) -> Result<Poly> {
        let te = self.ternary_eval(t)?;
        p.mul_secret(t, te.as_ref())
    }

    fn sample_uniform<R: RngCore>(&self, rng: &mut R) -> Result<Poly> {
        let n = self.degree();
        match self.params.mode {
            Mode::Vanilla => {
                let q = self.big.value();
                let coeffs = (0..n).map(|_| sampling::uniform_big(rng, q)).collect();
                Ok(Poly::Big(BigPoly::new(coeffs, self.big.clone())?))
            }
            _ => {
                let moduli: Vec<u64> = self.chain.moduli().iter().map(|m| m.value()).collect();
                let domain = self.storage_domain();
                // uniform in either domain, so evaluations are sampled directly
                let limbs = sampling::uniform_limbs(rng, n, &moduli)
                    .into_iter()
                    .zip(self.chain.moduli())
                    .map(|(coeffs, &m)| RingPoly {
                        coeffs,
                        modulus: m,
                        domain,
                    })
                    .collect();
                Ok(Poly::Rns(RnsPoly { limbs }))
            }
        }
    }

    fn sample_secret<R: RngCore>(&self, rng: &mut R) -> Vec<i8> {
        let n = self.degree();
        match self.params.hamming_weight {
            Some(h) => sampling::ternary_sparse(rng, n, h),
            None => sampling::ternary_uniform(rng, n),
        }
    }

    /// Keys from the stream `derive_rng(seed, ["keygen"])`, drawn in the
    /// order `s`, `e0`, `a`.
    pub fn keygen(&self, seed: u64) -> Result<(SecretKey, PublicKey)> {
        let mut rng = derive_rng(seed, &["keygen"]);
        let s = self.sample_secret(&mut rng);
        let e0 = sampling::gaussian(&mut rng, self.degree(), self.params.sigma);
        let a = self.sample_uniform(&mut rng)?;
        let s_eval = self.ternary_eval(&s)?;
        let p0 = a
            .mul_secret(&s, s_eval.as_ref())?
            .neg()
            .add(&self.small_poly(&e0)?)?;
        Ok((SecretKey { s, s_eval, seed }, PublicKey { p0, p1: a }))
    }

    pub fn encode(&self, z: &[f64]) -> Result<Plaintext> {
        let budget = self.params.input_budget();
        if let Some(v) = z.iter().find(|v| v.abs() >= budget) {
            bail!(Capacity, "input {v} exceeds the integer budget {budget}");
        }
        let coeffs = self.encoder.encode(z)?;
        Ok(Plaintext {
            poly: self.poly_from_signed(&coeffs)?,
            delta_log2: self.params.delta_log2,
            slots: self.params.slots,
        })
    }

    fn check_pt(&self, pt: &Plaintext) -> Result<()> {
        if pt.poly.degree() != self.degree() || pt.domain() != self.storage_domain() {
            bail!(State, "plaintext does not match the context representation");
        }
        Ok(())
    }

    /// `([m + a·s + e]_Q, [-a]_Q)` for explicit `a` and `e`.
    pub fn encrypt_sk_with(&self, pt: &Plaintext, sk: &SecretKey, a: &Poly, e: &[i64]) -> Result<Ciphertext> {
        self.check_pt(pt)?;
        let c0 = a
            .mul_secret(&sk.s, sk.s_eval.as_ref())?
            .add(&self.small_poly(e)?)?
            .add(&pt.poly)?;
        Ok(Ciphertext { c0, c1: a.neg() })
    }

    /// Secret-key encryption drawing `e` then `a` from `rng`.
    pub fn encrypt_sk<R: RngCore>(&self, pt: &Plaintext, sk: &SecretKey, rng: &mut R) -> Result<Ciphertext> {
        let e = sampling::gaussian(rng, self.degree(), self.params.sigma);
        let a = self.sample_uniform(rng)?;
        self.encrypt_sk_with(pt, sk, &a, &e)
    }

    /// `([m + p0·v + e1]_Q, [p1·v + e2]_Q)` for explicit randomness.
    pub fn encrypt_pk_with(
        &self,
        pt: &Plaintext,
        pk: &PublicKey,
        v: &[i8],
        e1: &[i64],
        e2: &[i64],
    ) -> Result<Ciphertext> {
        self.check_pt(pt)?;
        let c0 = self
            .mul_ternary(&pk.p0, v)?
            .add(&self.small_poly(e1)?)?
            .add(&pt.poly)?;
        let c1 = self.mul_ternary(&pk.p1, v)?.add(&self.small_poly(e2)?)?;
        Ok(Ciphertext { c0, c1 })
    }

    /// Public-key encryption drawing `v`, `e1`, `e2` from `rng`.
    pub fn encrypt_pk<R: RngCore>(&self, pt: &Plaintext, pk: &PublicKey, rng: &mut R) -> Result<Ciphertext> {
        let n = self.degree();
        let v = sampling::ternary_uniform(rng, n);
        let e1 = sampling::gaussian(rng, n, self.params.sigma);
        let e2 = sampling::gaussian(rng, n, self.params.sigma);
        self.encrypt_pk_with(pt, pk, &v, &e1, &e2)
    }

    /// `[c0 + c1·s]_Q`.
    pub fn decrypt(&self, ct: &Ciphertext, sk: &SecretKey) -> Result<Plaintext> {
        if ct.c0.domain() != ct.c1.domain() || ct.c0.domain() != self.storage_domain() {
            bail!(State, "ciphertext does not match the context representation");
        }
        let poly = ct.c0.add(&ct.c1.mul_secret(&sk.s, sk.s_eval.as_ref())?)?;
        Ok(Plaintext {
            poly,
            delta_log2: self.params.delta_log2,
            slots: self.params.slots,
        })
    }

    /// Decryption of `ct` reusing a decryption `golden_m` of `golden_ct`:
    /// `m + (c0' - c0) + (c1' - c1)·s`, exact modulo `Q`.
    pub fn decrypt_incremental(
        &self,
        ct: &Ciphertext,
        golden_ct: &Ciphertext,
        golden_m: &Plaintext,
        sk: &SecretKey,
    ) -> Result<Plaintext> {
        let d0 = ct.c0.sub(&golden_ct.c0)?;
        let d1 = ct.c1.sub(&golden_ct.c1)?;
        let mut poly = golden_m.poly.add(&d0)?;
        if !d1.is_zero() {
            poly = poly.add(&d1.mul_secret_sparse(&sk.s, sk.s_eval.as_ref())?)?;
        }
        Ok(Plaintext { poly, ..golden_m.clone() })
    }

    /// Centered coefficients in `(-Q/2, Q/2]`, coefficient domain.
    pub fn centered_coeffs(&self, p: &Poly) -> Result<Vec<BigInt>> {
        let all: Vec<usize> = (0..self.degree()).collect();
        self.centered_at(p, &all)
    }

    fn centered_at(&self, p: &Poly, indices: &[usize]) -> Result<Vec<BigInt>> {
        match self.to_coefficient(p)? {
            Poly::Big(b) => {
                let q = b.modulus().value();
                Ok(indices.iter().map(|&i| centered_big(&b.coeffs()[i], q)).collect())
            }
            Poly::Rns(r) if r.limbs.len() == 1 => {
                let l = &r.limbs[0];
                let q = l.modulus.value();
                Ok(indices
                    .iter()
                    .map(|&i| BigInt::from(centered(l.coeffs[i], q)))
                    .collect())
            }
            Poly::Rns(r) => self.chain.reconstruct_centered(&r, indices),
        }
    }

    /// Centered coefficients of a polynomial, then slot decoding.
    pub fn decode_poly(&self, p: &Poly) -> Result<Vec<f64>> {
        let used: Vec<usize> = self.encoder.used_indices().collect();
        let vals = self.centered_at(p, &used)?;
        let n = self.degree();
        let small: Option<Vec<i128>> = vals.iter().map(|v| v.to_i128()).collect();
        match small {
            Some(small) => {
                let mut full = vec![0i128; n];
                for (&i, v) in used.iter().zip(small) {
                    full[i] = v;
                }
                self.encoder.decode(&full)
            }
            None => {
                let mut full = vec![BigInt::default(); n];
                for (&i, v) in used.iter().zip(vals) {
                    full[i] = v;
                }
                self.encoder.decode_big(&full)
            }
        }
    }

    pub fn decode(&self, pt: &Plaintext) -> Result<Vec<f64>> {
        self.check_pt(pt)?;
        self.decode_poly(&pt.poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_arith::mod_sub;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn input(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(0.0..256.0)).collect()
    }

    #[test]
    fn keygen_is_deterministic_and_sparse() {
        let ctx = CkksContext::new(SchemeParams::new(Mode::RnsOnly, 16, 30, 2, 20).with_hamming_weight(4)).unwrap();
        let (s1, p1) = ctx.keygen(9).unwrap();
        let (s2, p2) = ctx.keygen(9).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(p1, p2);
        assert_eq!(s1.hamming_weight(), 4);
        let (s3, _) = ctx.keygen(10).unwrap();
        assert_ne!(s1, s3);
    }

    #[test]
    fn public_key_relation() {
        for mode in Mode::ALL {
            let limbs = if mode.uses_rns() { 2 } else { 1 };
            let ctx = CkksContext::new(SchemeParams::new(mode, 32, 40, limbs, 20)).unwrap();
            let (sk, pk) = ctx.keygen(1).unwrap();
            let e0 = pk.p0.add(&ctx.mul_ternary(&pk.p1, sk.coeffs()).unwrap()).unwrap();
            let bound = BigInt::from((6.0 * 3.2 * 32f64.sqrt()) as i64);
            for c in ctx.centered_coeffs(&e0).unwrap() {
                assert!(c.magnitude() <= bound.magnitude(), "{mode}: {c}");
            }
        }
    }

    #[test]
    fn sk_encryption_noise_is_exactly_e() {
        let ctx = CkksContext::new(SchemeParams::new(Mode::RnsOnly, 16, 40, 2, 20)).unwrap();
        let (sk, _) = ctx.keygen(3).unwrap();
        let pt = ctx.encode(&input(1, 8)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let ct = ctx.encrypt_sk(&pt, &sk, &mut rng).unwrap();
        // replay: the first draws of the same stream are e
        let mut replay = ChaCha20Rng::seed_from_u64(77);
        let e = sampling::gaussian(&mut replay, 16, 3.2);
        let m = ctx.decrypt(&ct, &sk).unwrap();
        let diff = ctx.centered_coeffs(&m.poly.sub(&pt.poly).unwrap()).unwrap();
        let want: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(diff, want);
        assert!(e.iter().all(|x| x.abs() as f64 <= 6.0 * 3.2));
    }

    #[test]
    fn degenerate_randomness() {
        let ctx = CkksContext::new(SchemeParams::new(Mode::Vanilla, 8, 40, 1, 20)).unwrap();
        let (sk, pk) = ctx.keygen(3).unwrap();
        let pt = ctx.encode(&input(1, 4)).unwrap();
        let zero = ctx.poly_from_signed(&[0; 8]).unwrap();
        let ct = ctx.encrypt_sk_with(&pt, &sk, &zero, &[0; 8]).unwrap();
        assert_eq!(ct.c0, pt.poly);
        assert!(ct.c1.is_zero());
        assert_eq!(ctx.decrypt(&ct, &sk).unwrap(), pt);
        let e1 = [1, -2, 0, 3, 0, 0, -1, 5];
        let e2 = [0, 0, 4, 0, -3, 0, 0, 1];
        let ct = ctx.encrypt_pk_with(&pt, &pk, &[0; 8], &e1, &e2).unwrap();
        assert_eq!(ct.c0, pt.poly.add(&ctx.small_poly(&e1).unwrap()).unwrap());
        assert_eq!(ct.c1, ctx.small_poly(&e2).unwrap());
    }

    #[test]
    fn pk_noise_replay() {
        let ctx = CkksContext::new(SchemeParams::new(Mode::Vanilla, 16, 50, 1, 30)).unwrap();
        let (sk, pk) = ctx.keygen(5).unwrap();
        let pt = ctx.encode(&input(2, 8)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let ct = ctx.encrypt_pk(&pt, &pk, &mut rng).unwrap();
        let ct2 = ctx.encrypt_pk(&pt, &pk, &mut ChaCha20Rng::seed_from_u64(99)).unwrap();
        assert_eq!(ct, ct2);
        let mut replay = ChaCha20Rng::seed_from_u64(99);
        let v = sampling::ternary_uniform(&mut replay, 16);
        let e1 = sampling::gaussian(&mut replay, 16, 3.2);
        let e2 = sampling::gaussian(&mut replay, 16, 3.2);
        let mut kr = derive_rng(5, &["keygen"]);
        let _s = sampling::ternary_uniform(&mut kr, 16);
        let e0 = sampling::gaussian(&mut kr, 16, 3.2);
        // e1 + e2·s + e0·v by direct integer convolution
        let conv = |a: &[i64], b: &[i8]| -> Vec<i64> {
            let mut out = vec![0i64; 16];
            for i in 0..16 {
                for j in 0..16 {
                    let p = a[i] * b[j] as i64;
                    if i + j < 16 { out[i + j] += p } else { out[i + j - 16] -= p }
                }
            }
            out
        };
        let es = conv(&e2, sk.coeffs());
        let ev = conv(&e0, &v);
        let want: Vec<BigInt> = (0..16).map(|i| BigInt::from(e1[i] + es[i] + ev[i])).collect();
        let m = ctx.decrypt(&ct, &sk).unwrap();
        assert_eq!(ctx.centered_coeffs(&m.poly.sub(&pt.poly).unwrap()).unwrap(), want);
        let l1s: i64 = sk.coeffs().iter().map(|&x| x.abs() as i64).sum();
        let l1v: i64 = v.iter().map(|&x| x.abs() as i64).sum();
        let bound = 6.0 * 3.2 * (1 + l1s + l1v) as f64;
        assert!(want.iter().all(|w| w.to_f64().unwrap().abs() <= bound));
    }

    #[test]
    fn modes_decode_identically() {
        let z = input(4, 8);
        let mut outputs = Vec::new();
        for mode in Mode::ALL {
            let limbs = if mode.uses_rns() { 2 } else { 1 };
            let ctx = CkksContext::new(SchemeParams::new(mode, 16, 50, limbs, 30)).unwrap();
            let (sk, pk) = ctx.keygen(11).unwrap();
            let pt = ctx.encode(&z).unwrap();
            let ct = ctx.encrypt_pk(&pt, &pk, &mut derive_rng(11, &["enc"])).unwrap();
            outputs.push(ctx.decode(&ctx.decrypt(&ct, &sk).unwrap()).unwrap());
        }
        for o in &outputs[1..] {
            assert_eq!(o, &outputs[0]);
        }
        for (a, b) in outputs[0].iter().zip(&z) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn rns_encode_is_decomposed_vanilla_encode() {
        let z = input(5, 8);
        let van = CkksContext::new(SchemeParams::new(Mode::Vanilla, 16, 40, 2, 20).with_wide_modulus()).unwrap();
        let rns = CkksContext::new(SchemeParams::new(Mode::RnsOnly, 16, 40, 2, 20)).unwrap();
        let pv = van.encode(&z).unwrap();
        let pr = rns.encode(&z).unwrap();
        let big = BigPoly::new(pv.poly.as_big().unwrap().coeffs().to_vec(), rns.chain().modulus().clone()).unwrap();
        assert_eq!(&rns.chain().decompose(&big).unwrap(), pr.poly.as_rns().unwrap());
        assert_eq!(van.decode(&pv).unwrap(), rns.decode(&pr).unwrap());
    }

    #[test]
    fn incremental_decrypt_matches_full() {
        for mode in Mode::ALL {
            let limbs = if mode.uses_rns() { 3 } else { 1 };
            let ctx = CkksContext::new(SchemeParams::new(mode, 16, 40, limbs, 20)).unwrap();
            let (sk, pk) = ctx.keygen(2).unwrap();
            let pt = ctx.encode(&input(6, 8)).unwrap();
            let ct = ctx.encrypt_pk(&pt, &pk, &mut derive_rng(2, &["enc"])).unwrap();
            let m = ctx.decrypt(&ct, &sk).unwrap();
            let mut bad = ct.clone();
            match &mut bad.c1 {
                Poly::Big(b) => b.coeffs_mut()[5] += 12345u32,
                Poly::Rns(r) => {
                    let l = &mut r.limbs_mut()[limbs - 1];
                    let q = l.modulus().value();
                    l.coeffs_mut()[5] = mod_sub(l.coeffs()[5], 7, q);
                }
            }
            if let Poly::Big(b) = &mut bad.c1 {
                let q = b.modulus().value().clone();
                b.coeffs_mut()[5] %= q;
            }
            assert_eq!(
                ctx.decrypt_incremental(&bad, &ct, &m, &sk).unwrap(),
                ctx.decrypt(&bad, &sk).unwrap(),
                "{mode}"
            );
        }
    }

    #[test]
    fn capacity_error_on_large_input() {
        let ctx = CkksContext::new(SchemeParams::new(Mode::Vanilla, 8, 40, 1, 30)).unwrap();
        assert!(matches!(ctx.encode(&[512.0, 0.0, 0.0, 0.0]), Err(crate::Error::Capacity(_))));
        assert!(ctx.encode(&[511.0, 0.0, 0.0, 0.0]).is_ok());
    }
}
