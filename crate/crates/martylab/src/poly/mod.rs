//! Polynomial algebra: dense univariate over [`BigComplex`], sparse
//! multivariate over exact integers.

mod multi;

pub use multi::{Monomial, MultiPoly, Var};

use crate::numerics::{BigComplex, BigReal, Precision};

/// Dense univariate polynomial, `coeffs[i]` the coefficient of `z^i`.
///
/// Canonical form: empty vector for the zero polynomial, nonzero trailing
/// coefficient otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigComplex>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigComplex) -> Self {
        Poly { coeffs: vec![c] }.normalized()
    }

    pub fn from_coeffs(coeffs: Vec<BigComplex>) -> Self {
        Poly { coeffs }.normalized()
    }

    /// `c * z^deg`.
    pub fn monomial(c: BigComplex, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let prec = c.precision();
        let mut coeffs = vec![BigComplex::zero(prec); deg + 1];
        coeffs[deg] = c;
        Poly { coeffs }
    }

    /// `z^n - 1`, the zero set of which is the n-th roots of unity.
    pub fn unit_roots_poly(n: usize, prec: Precision) -> Self {
        let mut coeffs = vec![BigComplex::zero(prec); n + 1];
        coeffs[0] = -&BigComplex::one(prec);
        coeffs[n] = BigComplex::one(prec);
        Poly { coeffs }
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest nonzero index; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero past the degree).
    pub fn coeff(&self, i: usize, prec: Precision) -> BigComplex {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| BigComplex::zero(prec))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let prec = z.precision();
        let mut iter = self.coeffs.iter().rev();
        let mut acc = match iter.next() {
            Some(c) => c.clone(),
            None => return BigComplex::zero(prec),
        };
        for c in iter {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&BigReal::from_usize(i, c.precision())))
            .collect();
        Poly { coeffs }.normalized()
    }

    /// Formal antiderivative with prescribed value at 0.
    pub fn antiderivative(&self, constant: BigComplex) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(constant);
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&BigReal::from_ratio(1, (i + 1) as i64, c.precision())));
        }
        Poly { coeffs }.normalized()
    }

    pub fn scale(&self, s: &BigComplex) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
        .normalized()
    }

    pub fn powi(&self, e: u32) -> Self {
        let prec = self.precision().unwrap_or_default();
        let mut acc = Poly::constant(BigComplex::one(prec));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division: `self = quotient * divisor + remainder` with
    /// `deg remainder < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let d = divisor.degree().unwrap();
        if self.degree().map_or(true, |n| n < d) {
            return (Poly::zero(), self.clone());
        }
        let prec = self
            .precision()
            .unwrap()
            .bits()
            .max(divisor.precision().unwrap().bits());
        let prec = Precision::new(prec).unwrap();
        let lead_inv = divisor.coeffs[d].recip();
        let mut rem = self.coeffs.clone();
        let n = rem.len() - 1;
        let mut quot = vec![BigComplex::zero(prec); n - d + 1];
        for i in (d..=n).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let factor = &rem[i] * &lead_inv;
            for j in 0..d {
                rem[i - d + j] = &rem[i - d + j] - &(&factor * &divisor.coeffs[j]);
            }
            rem[i] = BigComplex::zero(prec);
            quot[i - d] = factor;
        }
        rem.truncate(d);
        (Poly { coeffs: quot }.normalized(), Poly { coeffs: rem }.normalized())
    }

    /// Highest precision among coefficients.
    pub fn precision(&self) -> Option<Precision> {
        self.coeffs
            .iter()
            .map(|c| c.precision().bits())
            .max()
            .map(|b| Precision::new(b).expect("precision below minimum"))
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            coeffs[i] = &coeffs[i] + c;
        }
        Poly { coeffs }.normalized()
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let prec = Precision::new(
            self.precision()
                .unwrap()
                .bits()
                .max(rhs.precision().unwrap().bits()),
        )
        .unwrap();
        let mut coeffs =
            vec![BigComplex::zero(prec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly { coeffs }.normalized()
    }
}

/// `e^{2 pi i num/den}` via sin_pi/cos_pi of the reduced fraction, so cardinal
/// angles (multiples of a quarter turn) come out bit-exact. Two calls with the
/// same rational value of `num/den` return bitwise identical points.
pub fn unit_circle_point(num: u64, den: u64, prec: Precision) -> BigComplex {
    assert!(den > 0);
    let frac = BigReal::from_i64(2 * num as i64, prec) / BigReal::from_i64(den as i64, prec);
    BigComplex::new(frac.cos_pi(), frac.sin_pi())
}

/// The n-th roots of unity `e^{2 pi i l/n}`, `l = 0..n-1`.
pub fn roots_of_unity(n: usize, prec: Precision) -> Vec<BigComplex> {
    assert!(n >= 1, "roots_of_unity requires n >= 1");
    (0..n).map(|l| unit_circle_point(l as u64, n as u64, prec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64s(re, im, p())
    }

    fn poly(coeffs: &[(f64, f64)]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&(re, im)| c(re, im)).collect())
    }

    // ---- evaluation ----

    #[test]
    fn zero_poly_evaluates_to_zero() {
        assert!(Poly::zero().eval(&c(2.0, -3.0)).is_zero());
    }

    #[test]
    fn z_squared_minus_one_at_i() {
        let g = Poly::unit_roots_poly(2, p());
        assert_eq!(g.eval(&BigComplex::i(p())), c(-2.0, 0.0));
    }

    #[test]
    fn cubic_at_one_plus_i() {
        // (1+i)^3 = -2+2i, plus 2(1+i) = 2+2i, total 4i
        let f = poly(&[(0.0, 0.0), (2.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let v = f.eval(&c(1.0, 1.0));
        assert_eq!(v, c(0.0, 4.0));
    }

    // ---- calculus ----

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(poly(&[(5.0, 1.0)]).derivative().is_zero());
    }

    #[test]
    fn derivative_of_unit_roots_poly() {
        let g = Poly::unit_roots_poly(5, p());
        let d = g.derivative();
        assert_eq!(d.degree(), Some(4));
        assert_eq!(d.coeff(4, p()), c(5.0, 0.0));
    }

    #[test]
    fn derivative_general() {
        let f = poly(&[(0.0, 0.0), (1.0, 1.0), (3.0, 0.0)]);
        let d = f.derivative();
        assert_eq!(d.coeff(0, p()), c(1.0, 1.0));
        assert_eq!(d.coeff(1, p()), c(6.0, 0.0));
    }

    #[test]
    fn antiderivative_basics() {
        assert!(Poly::zero().antiderivative(c(0.0, 0.0)).is_zero());
        let f = poly(&[(0.0, 0.0), (2.0, 0.0)]);
        let af = f.antiderivative(c(0.0, 0.0));
        assert_eq!(af, poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]));
    }

    #[test]
    fn antiderivative_then_derivative_is_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let deg = rng.gen_range(0..8);
            let f = Poly::from_coeffs(
                (0..=deg)
                    .map(|_| c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)))
                    .collect(),
            );
            let back = f.antiderivative(c(0.3, -0.7)).derivative();
            if f.is_zero() {
                assert!(back.is_zero());
                continue;
            }
            for i in 0..f.coeffs().len() {
                let err = (&back.coeff(i, p()) - &f.coeff(i, p())).abs();
                assert!(err < BigReal::pow2(-200, p()));
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let h = BigReal::pow2(-(Precision::DEFAULT_BITS as i32) / 2, p());
        let tol = BigReal::pow2(-(Precision::DEFAULT_BITS as i32) / 4, p());
        for _ in 0..100 {
            let deg = rng.gen_range(1..7);
            let f = Poly::from_coeffs(
                (0..=deg)
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect(),
            );
            let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let zp = BigComplex::new(&z.re + &h, z.im.clone());
            let zm = BigComplex::new(&z.re - &h, z.im.clone());
            let fd = (&f.eval(&zp) - &f.eval(&zm)).scale(&(BigReal::one(p()) / (&h + &h)));
            let d = f.derivative().eval(&z);
            let denom = BigReal::one(p()).max(&d.abs());
            assert!((&fd - &d).abs() <= &tol * &denom);
        }
    }

    // ---- roots of unity ----

    #[test]
    fn small_orders_are_exact() {
        let one = BigComplex::one(p());
        assert_eq!(roots_of_unity(1, p()), vec![one.clone()]);
        assert_eq!(roots_of_unity(2, p()), vec![one.clone(), -&one]);
        assert_eq!(
            roots_of_unity(4, p()),
            vec![
                one.clone(),
                BigComplex::i(p()),
                -&one,
                -&BigComplex::i(p())
            ]
        );
    }

    #[test]
    fn roots_kill_unit_roots_poly() {
        for n in [3usize, 5, 7] {
            let g = Poly::unit_roots_poly(n, p());
            for z in roots_of_unity(n, p()) {
                assert!(g.eval(&z).abs() < BigReal::pow2(-250, p()));
            }
        }
    }

    #[test]
    fn equal_fractions_give_identical_points() {
        // 2/6 and 1/3 of a turn must agree bitwise for exact-zero detection
        let a = unit_circle_point(2, 6, p());
        let b = unit_circle_point(1, 3, p());
        assert_eq!(a, b);
    }
}
