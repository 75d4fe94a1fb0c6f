//! Extended-precision arithmetic: real, complex and log-domain complex values.
//!
//! [`BigReal`] wraps an MPFR float of configurable precision (default 256
//! bits). [`BigComplex`] is a plain re/im pair of those. [`LogComplex`] stores
//! a nonzero complex number as (log-modulus, phase) so that quantities like
//! `a_n e^{p_n(z)}` stay representable no matter how large their modulus is;
//! an exact-zero sentinel (`log_mag = -inf`, `phase = 0`) keeps "zero"
//! distinguishable from "small".

mod complex;
mod log;

pub use complex::BigComplex;
pub use log::{softplus_log_mag, LogComplex};

use crate::error::{Error, Result};
use rug::float::Special;
use rug::ops::CompleteRound;
use rug::Float;
use std::cmp::Ordering;
use std::fmt;

/// Working precision in bits. At least 64; the pipeline default is 256.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_BITS: u32 = 256;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidParameter(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Decimal digits sufficient for an exact parse-back at this precision.
    pub fn decimal_digits(self) -> usize {
        (self.0 as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    /// Doubled precision, for cancellation-prone intermediates.
    pub(crate) fn doubled(self) -> Precision {
        Precision(self.0 * 2)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(Self::DEFAULT_BITS)
    }
}

/// Arbitrary-precision real number.
///
/// Values are finite except for the deliberate `-inf` used as the log-domain
/// zero sentinel; no operation produces NaN on the domains used here.
#[derive(Clone, Debug)]
pub struct BigReal(pub(crate) Float);

impl BigReal {
    // ---- Constructors ----

    pub fn zero(prec: Precision) -> Self {
        BigReal(Float::new(prec.bits()))
    }

    pub fn one(prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), 1))
    }

    pub fn from_u32(v: u32, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), v))
    }

    pub fn from_i64(v: i64, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), v))
    }

    pub fn from_usize(v: usize, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), v as u64))
    }

    pub fn from_f64(v: f64, prec: Precision) -> Self {
        debug_assert!(!v.is_nan());
        BigReal(Float::with_val(prec.bits(), v))
    }

    pub fn from_integer(v: &rug::Integer, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), v))
    }

    /// Exact ratio of two small integers at the given precision.
    pub fn from_ratio(num: i64, den: i64, prec: Precision) -> Self {
        debug_assert!(den != 0);
        let n = Float::with_val(prec.bits(), num);
        BigReal(n / Float::with_val(prec.bits(), den))
    }

    pub fn pi(prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), rug::float::Constant::Pi))
    }

    /// The log-domain zero sentinel.
    pub fn neg_infinity(prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), Special::NegInfinity))
    }

    /// 2^exp, exact.
    pub fn pow2(exp: i32, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), 1) << exp)
    }

    /// Parse a decimal string (`-inf` accepted as the sentinel).
    pub fn parse(s: &str, prec: Precision) -> Result<Self> {
        let t = s.trim();
        if t == "-inf" {
            return Ok(Self::neg_infinity(prec));
        }
        let incomplete =
            Float::parse(t).map_err(|e| Error::Parse(format!("bad decimal `{t}`: {e}")))?;
        let f = Float::with_val(prec.bits(), incomplete);
        if f.is_nan() || f.is_infinite() {
            return Err(Error::Parse(format!("non-finite value `{t}`")));
        }
        Ok(BigReal(f))
    }

    // ---- Queries ----

    pub fn precision(&self) -> Precision {
        Precision(self.0.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_neg_infinity(&self) -> bool {
        self.0.is_infinite() && self.0.is_sign_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Full-precision decimal string; round-trips exactly through
    /// [`BigReal::parse`] at the same precision. The sentinel prints `-inf`.
    pub fn to_decimal_string(&self) -> String {
        if self.is_neg_infinity() {
            return "-inf".to_string();
        }
        self.0
            .to_string_radix(10, Some(self.precision().decimal_digits()))
    }

    /// Round (or extend) to a different precision.
    pub fn to_precision(&self, prec: Precision) -> Self {
        let mut f = self.0.clone();
        f.set_prec(prec.bits());
        BigReal(f)
    }

    // ---- Math ----

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }

    /// Natural log; zero maps to the `-inf` sentinel.
    pub fn ln(&self) -> Self {
        BigReal(self.0.clone().ln())
    }

    /// `ln(1 + self)`, accurate near zero.
    pub fn ln_1p(&self) -> Self {
        BigReal(self.0.clone().ln_1p())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }

    pub fn square(&self) -> Self {
        BigReal(self.0.clone().square())
    }

    pub fn hypot(&self, other: &Self) -> Self {
        BigReal(self.0.hypot_ref(&other.0).complete(self.out_prec(other)))
    }

    /// Two-argument arctangent of `self`/`other` (y, x order).
    pub fn atan2(&self, other: &Self) -> Self {
        BigReal(self.0.atan2_ref(&other.0).complete(self.out_prec(other)))
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.0.prec()));
        (BigReal(s), BigReal(c))
    }

    /// sin(pi * self), exact at representable multiples of 1/2.
    pub fn sin_pi(&self) -> Self {
        BigReal(self.0.clone().sin_pi())
    }

    /// cos(pi * self), exact at representable multiples of 1/2.
    pub fn cos_pi(&self) -> Self {
        BigReal(self.0.clone().cos_pi())
    }

    /// `self^exponent` for nonnegative base.
    pub fn pow(&self, exponent: &Self) -> Self {
        use rug::ops::Pow;
        BigReal(self.0.clone().pow(&exponent.0))
    }

    /// IEEE remainder of `self` by `modulus` (result in `[-m/2, m/2]`).
    pub fn remainder(&self, modulus: &Self) -> Self {
        BigReal(self.0.clone().remainder(&modulus.0))
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Total order; values here are never NaN.
    pub fn cmp_total(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("NaN in BigReal")
    }

    fn out_prec(&self, other: &Self) -> u32 {
        self.0.prec().max(other.0.prec())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! bigreal_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal(Float::with_val(self.out_prec(rhs), &self.0 $op &rhs.0))
            }
        }
        impl std::ops::$trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self) $op (&rhs)
            }
        }
        impl std::ops::$trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self) $op rhs
            }
        }
        impl std::ops::$trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self $op (&rhs)
            }
        }
    };
}

bigreal_binop!(Add, add, +);
bigreal_binop!(Sub, sub, -);
bigreal_binop!(Mul, mul, *);
bigreal_binop!(Div, div, /);

impl std::ops::Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal((-&self.0).complete(self.0.prec()))
    }
}

impl std::ops::Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

/// Normalize an angle in radians to the half-open interval `(-pi, pi]`.
pub(crate) fn normalize_phase(phi: Float) -> Float {
    let prec = phi.prec();
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let two_pi = Float::with_val(prec, &pi * 2u32);
    let neg_pi = -pi.clone();
    let mut r = phi.remainder(&two_pi);
    if r > pi {
        r -= &two_pi;
    } else if r <= neg_pi {
        r += &two_pi;
    }
    r
}
