//! Double-double floating point: an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub(crate) const PI: Dd = Dd {
    hi: 3.141_592_653_589_793,
    lo: 1.224_646_799_147_353_2e-16,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i128(v: i128) -> Self {
        let hi = v as f64;
        // hi is within 2^75 of v for |v| < 2^127, so the remainder is exact
        // in i128 and rounds once more into lo.
        let rem = v.wrapping_sub(hi as i128);
        let (hi, lo) = quick_two_sum(hi, rem as f64);
        Dd { hi, lo }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        if let Some(small) = v.to_i128() {
            return Self::from_i128(small);
        }
        let hi = v.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rem = v - BigInt::from_f64(hi).unwrap_or_else(BigInt::zero);
        let lo = rem.to_f64().unwrap_or(0.0);
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// Nearest double.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.sub(Dd::from_f64(d).mul_f64(q1));
        let q2 = r.hi / d;
        let r = r.sub(Dd::from_f64(d).mul_f64(q2));
        let q3 = r.hi / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    /// Exact multiplication by `2^k`.
    #[inline]
    pub fn scale_pow2(self, k: i32) -> Dd {
        let f = pow2(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step from the double estimate
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = self.sub(Dd { hi: p, lo: e });
        Dd::from_f64(x).add(Dd::from_f64(r.hi / (2.0 * x)))
    }

    /// Round to the nearest integer, ties away from zero.
    pub fn round_half_away(self) -> i128 {
        let Dd { hi, lo } = self;
        let r = hi.round();
        if r != hi {
            let d = hi - r;
            if d.abs() == 0.5 {
                let lower = hi - 0.5;
                return if lo > 0.0 {
                    lower as i128 + 1
                } else if lo < 0.0 {
                    lower as i128
                } else {
                    r as i128
                };
            }
            // hi sits at least one ulp away from the nearest half-integer and
            // |lo| is at most half an ulp.
            return r as i128;
        }
        let r2 = lo.round();
        if (lo - r2).abs() == 0.5 {
            let floor = (lo - 0.5) as i128;
            let positive = if hi != 0.0 { hi > 0.0 } else { lo > 0.0 };
            return r as i128 + floor + i128::from(positive);
        }
        r as i128 + r2 as i128
    }
}

pub(crate) fn pow2(k: i32) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        2f64.powi(k)
    }
}

fn sin_taylor(x: Dd) -> Dd {
    // |x| <= pi/4: terms fall below 1e-33 well before 30 iterations
    let x2 = x.mul(x);
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    for _ in 0..30 {
        term = term.mul(x2).div_f64(-((k + 1.0) * (k + 2.0)));
        k += 2.0;
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 {
            break;
        }
    }
    sum
}

fn cos_taylor(x: Dd) -> Dd {
    let x2 = x.mul(x);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut k = 0.0;
    for _ in 0..30 {
        term = term.mul(x2).div_f64(-((k + 1.0) * (k + 2.0)));
        k += 2.0;
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 {
            break;
        }
    }
    sum
}

/// `cos(2πk/m)` for `k = 0..m`, `m` a multiple of 4.
///
/// Argument reduction is done on the integer `k`, so quarter-turn entries
/// are exactly `0` or `±1`.
pub(crate) fn cos_table(m: usize) -> Vec<Dd> {
    assert!(m % 4 == 0 && m > 0);
    let quarter = m / 4;
    // sin/cos of 2πr/m for r in [0, quarter], reduced to [0, π/4]
    let first_octant = |r: usize| -> (Dd, Dd) {
        let theta = |r: usize| PI.mul_f64(2.0 * r as f64).div_f64(m as f64);
        if 2 * r <= quarter {
            let t = theta(r);
            (sin_taylor(t), cos_taylor(t))
        } else {
            let t = theta(quarter - r);
            (cos_taylor(t), sin_taylor(t))
        }
    };
    (0..m)
        .map(|k| {
            let (quad, r) = (k / quarter, k % quarter);
            if r == 0 {
                return match quad {
                    0 => Dd::ONE,
                    2 => Dd::ONE.neg(),
                    _ => Dd::ZERO,
                };
            }
            let (s, c) = first_octant(r);
            match quad {
                0 => c,
                1 => s.neg(),
                2 => c.neg(),
                _ => s,
            }
        })
        .collect()
}
