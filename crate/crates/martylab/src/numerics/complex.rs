//! Complex numbers with extended-precision components.

use super::{BigReal, Precision};
use std::fmt;

/// A complex number as a re/im pair of [`BigReal`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: Precision) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::zero(prec))
    }

    pub fn one(prec: Precision) -> Self {
        BigComplex::new(BigReal::one(prec), BigReal::zero(prec))
    }

    pub fn i(prec: Precision) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::one(prec))
    }

    pub fn from_f64s(re: f64, im: f64, prec: Precision) -> Self {
        BigComplex::new(BigReal::from_f64(re, prec), BigReal::from_f64(im, prec))
    }

    pub fn from_real(re: BigReal) -> Self {
        let prec = re.precision();
        BigComplex::new(re, BigReal::zero(prec))
    }

    pub fn precision(&self) -> Precision {
        Precision::new(self.re.precision().bits().max(self.im.precision().bits()))
            .expect("component precision below minimum")
    }

    /// Exact zero test (both components identically zero).
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, s: &BigReal) -> Self {
        BigComplex::new(&self.re * s, &self.im * s)
    }

    pub fn norm_sqr(&self) -> BigReal {
        &self.re.square() + &self.im.square()
    }

    /// Modulus.
    pub fn abs(&self) -> BigReal {
        self.re.hypot(&self.im)
    }

    /// Argument in `(-pi, pi]` (0 for the origin).
    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    /// Multiplicative inverse; caller guarantees nonzero.
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        BigComplex::new(&self.re / &n, -&self.im / &n)
    }

    pub fn mul_add(&self, mul: &Self, add: &Self) -> Self {
        &(self * mul) + add
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re.to_f64(), self.im.to_f64())
    }
}

impl std::ops::Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl std::ops::Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl std::ops::Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl std::ops::Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        self * &rhs.recip()
    }
}

impl std::ops::Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-&self.re, -&self.im)
    }
}

macro_rules! bigcomplex_owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    )*};
}
bigcomplex_owned_ops!(Add::add, Sub::sub, Mul::mul, Div::div);
