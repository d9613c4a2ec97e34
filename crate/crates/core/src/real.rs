//! Double-double floating point numbers.
//!
//! A [`Real`] is an unevaluated sum `hi + lo` of two `f64` with
//! `|lo| <= ulp(hi) / 2`, which gives about 32 significant decimal digits.
//! Only the operations needed by the Landau computation are provided:
//! the four field operations, square root, natural logarithm and
//! exponential, integer powers and decimal rendering.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

/// Number of significant decimal digits a [`Real`] carries reliably.
pub const REAL_DIGITS: u32 = 31;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Real {
    hi: f64,
    lo: f64,
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

impl Real {
    pub const ZERO: Real = Real { hi: 0.0, lo: 0.0 };
    pub const ONE: Real = Real { hi: 1.0, lo: 0.0 };
    pub const INFINITY: Real = Real {
        hi: f64::INFINITY,
        lo: 0.0,
    };
    pub const LN_2: Real = Real {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const LN_10: Real = Real {
        hi: std::f64::consts::LN_10,
        lo: -2.170_756_223_382_249_4e-16,
    };

    #[inline]
    pub const fn from_parts(hi: f64, lo: f64) -> Real {
        Real { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn from_u64(v: u64) -> Real {
        let hi = v as f64;
        // the rounding error of the conversion fits in an f64 exactly
        let lo = (v as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Real { hi, lo }
    }

    pub fn from_i64(v: i64) -> Real {
        if v < 0 {
            -Real::from_u64(v.unsigned_abs())
        } else {
            Real::from_u64(v as u64)
        }
    }

    pub fn from_i128(v: i128) -> Real {
        let hi = v as f64;
        let rest = v - hi as i128;
        Real::from(hi) + Real::from(rest as f64)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0
    }

    pub fn abs(self) -> Real {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplication by a power of two, exact.
    #[inline]
    pub fn mul_pow2(self, f: f64) -> Real {
        Real {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn mul_f64(self, b: f64) -> Real {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Real { hi, lo }
    }

    pub fn floor(self) -> Real {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (hi, lo) = quick_two_sum(hi, lo);
            Real { hi, lo }
        } else {
            Real { hi, lo: 0.0 }
        }
    }

    pub fn sqr(self) -> Real {
        self * self
    }

    pub fn sqrt(self) -> Real {
        if self.hi <= 0.0 {
            return Real::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = Real::from(self.hi * x);
        let diff = (self - ax.sqr()).hi * (x * 0.5);
        ax + Real::from(diff)
    }

    pub fn powi(self, mut e: u32) -> Real {
        let mut base = self;
        let mut acc = Real::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Real {
        const INV_K: f64 = 1.0 / 512.0;
        if self.hi > 709.0 {
            return Real::INFINITY;
        }
        if self.hi < -745.0 {
            return Real::ZERO;
        }
        if self.is_zero() {
            return Real::ONE;
        }
        let m = (self.hi / Real::LN_2.hi + 0.5).floor();
        let r = (self - Real::LN_2.mul_f64(m)).mul_pow2(INV_K);
        let inv_fact = inverse_factorials();

        // exp(r) - 1 by Taylor expansion, r is tiny here
        let mut s = r + r.sqr().mul_pow2(0.5);
        let mut p = r.sqr();
        for c in inv_fact.iter() {
            p *= r;
            let t = p * *c;
            s += t;
            if t.hi.abs() <= 1e-35 * s.hi.abs() {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2, nine times undoes the 1/512 scaling
        for _ in 0..9 {
            s = s.mul_pow2(2.0) + s.sqr();
        }
        let s = s + Real::ONE;
        let scale = 2f64.powi(m as i32);
        s.mul_pow2(scale)
    }

    /// Natural logarithm. One Newton step on `exp` doubles the precision
    /// of the `f64` starting value.
    pub fn ln(self) -> Real {
        if self.hi <= 0.0 {
            return Real::from(f64::NAN);
        }
        if self == Real::ONE {
            return Real::ZERO;
        }
        let y = Real::from(self.hi.ln());
        y + self * (-y).exp() - Real::ONE
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(self, digits: usize) -> String {
        if !self.is_finite() {
            return format!("{}", self.hi);
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_sign_negative();
        let mut x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        x = scale_pow10(x, -e);
        // correct an off-by-one exponent guess
        if x.hi >= 10.0 {
            x = x / Real::from(10.0);
            e += 1;
        } else if x.hi < 1.0 {
            x = x.mul_f64(10.0);
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Real::from(d)).mul_f64(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    ds.pop();
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        let body: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
        if (-5..digits as i32).contains(&e) {
            if e >= 0 {
                let split = (e + 1) as usize;
                out.push_str(&body[..split]);
                let frac = body[split..].trim_end_matches('0');
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            } else {
                out.push_str("0.");
                for _ in 0..(-e - 1) {
                    out.push('0');
                }
                out.push_str(body.trim_end_matches('0'));
            }
        } else {
            out.push_str(&body[..1]);
            let frac = body[1..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
            out.push_str(&format!("e{e}"));
        }
        out
    }
}

fn scale_pow10(x: Real, e: i32) -> Real {
    let ten = Real::from(10.0);
    let p = ten.powi(e.unsigned_abs());
    if e >= 0 {
        x * p
    } else {
        x / p
    }
}

fn inverse_factorials() -> &'static [Real] {
    static TABLE: OnceLock<Vec<Real>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // 1/3!, 1/4!, ..., 1/20!
        let mut out = Vec::new();
        let mut f = Real::from(2.0);
        for i in 3..=20u32 {
            f = f.mul_f64(i as f64);
            out.push(Real::ONE / f);
        }
        out
    })
}

impl From<f64> for Real {
    #[inline]
    fn from(v: f64) -> Real {
        Real { hi: v, lo: 0.0 }
    }
}

impl From<u64> for Real {
    fn from(v: u64) -> Real {
        Real::from_u64(v)
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Real {
        Real::from_i64(v)
    }
}

impl From<u32> for Real {
    fn from(v: u32) -> Real {
        Real::from(v as f64)
    }
}

impl From<i32> for Real {
    fn from(v: i32) -> Real {
        Real::from(v as f64)
    }
}

impl Add for Real {
    type Output = Real;
    #[inline]
    fn add(self, b: Real) -> Real {
        if !self.hi.is_finite() || !b.hi.is_finite() {
            return Real::from(self.hi + b.hi);
        }
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Real { hi, lo }
    }
}

impl Sub for Real {
    type Output = Real;
    #[inline]
    fn sub(self, b: Real) -> Real {
        self + (-b)
    }
}

impl Neg for Real {
    type Output = Real;
    #[inline]
    fn neg(self) -> Real {
        Real {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Real {
    type Output = Real;
    #[inline]
    fn mul(self, b: Real) -> Real {
        if !self.hi.is_finite() || !b.hi.is_finite() {
            return Real::from(self.hi * b.hi);
        }
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Real { hi, lo }
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, b: Real) -> Real {
        if !self.hi.is_finite() || !b.hi.is_finite() || b.hi == 0.0 {
            return Real::from(self.hi / b.hi);
        }
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Real { hi, lo } + Real::from(q3)
    }
}

impl AddAssign for Real {
    #[inline]
    fn add_assign(&mut self, b: Real) {
        *self = *self + b;
    }
}

impl SubAssign for Real {
    #[inline]
    fn sub_assign(&mut self, b: Real) {
        *self = *self - b;
    }
}

impl MulAssign for Real {
    #[inline]
    fn mul_assign(&mut self, b: Real) {
        *self = *self * b;
    }
}

impl PartialOrd for Real {
    #[inline]
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Real {
    /// Total order for finite values and infinities; NaN sorts last.
    pub fn total_cmp(&self, other: &Real) -> Ordering {
        self.hi
            .total_cmp(&other.hi)
            .then_with(|| self.lo.total_cmp(&other.lo))
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(32))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.pad(&self.to_decimal_string(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Real, b: Real, rel: f64) -> bool {
        let d = (a - b).abs().to_f64();
        d <= rel * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn ln2_constant_matches_series() {
        // ln 2 = sum 1/(k 2^k)
        let mut s = Real::ZERO;
        let mut p = Real::ONE;
        for k in 1..120u32 {
            p = p.mul_pow2(0.5);
            s += p / Real::from(k);
        }
        assert!(close(s, Real::LN_2, 1e-31), "{s:?}");
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &v in &[2.0, 3.0, 10.0, 12345.678, 1.0e8, 0.001, 192678883.0] {
            let x = Real::from(v);
            let back = x.ln().exp();
            // exp turns an absolute error in ln into a relative one
            let tol = 1e-31 * v.ln().abs().max(1.0) * 4.0;
            assert!(close(back, x, tol), "{v}: {back:?}");
        }
    }

    #[test]
    fn ln_of_ten_matches_constant() {
        assert!(close(Real::from(10.0).ln(), Real::LN_10, 1e-31));
    }

    #[test]
    fn ln_is_additive_on_products() {
        let a = Real::from(3847u64).ln() + Real::from(3947u64).ln();
        let b = Real::from(3847u64 * 3947).ln();
        assert!(close(a, b, 1e-31));
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Real::from(2.0);
        let r = x.sqrt();
        assert!(close(r * r, x, 1e-31));
    }

    #[test]
    fn from_u64_is_exact_for_large_values() {
        let v = (1u64 << 60) + 12345;
        let r = Real::from_u64(v);
        assert_eq!(r.hi() as i128 + r.lo() as i128, v as i128);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Real::from(12.5).to_decimal_string(10), "12.5");
        assert_eq!(Real::from(-0.25).to_decimal_string(10), "-0.25");
        let third = Real::ONE / Real::from(3.0);
        assert_eq!(
            third.to_decimal_string(30),
            "0.333333333333333333333333333333"
        );
        assert_eq!(Real::from(1.0e40).to_decimal_string(5), "1e40");
    }
}
