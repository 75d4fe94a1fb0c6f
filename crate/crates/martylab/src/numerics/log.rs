//! Log-domain complex values: modulus kept as a natural log, phase in radians.

use super::{normalize_phase, BigComplex, BigReal, Precision};

/// A complex number stored as `exp(log_mag) * e^{i * phase}`.
///
/// `log_mag = -inf` (with phase 0) is the exact-zero sentinel. The phase is
/// normalized to `(-pi, pi]` after every operation.
#[derive(Clone, Debug, PartialEq)]
pub struct LogComplex {
    log_mag: BigReal,
    phase: BigReal,
}

impl LogComplex {
    /// The exact-zero sentinel.
    pub fn zero(prec: Precision) -> Self {
        LogComplex {
            log_mag: BigReal::neg_infinity(prec),
            phase: BigReal::zero(prec),
        }
    }

    pub fn one(prec: Precision) -> Self {
        LogComplex {
            log_mag: BigReal::zero(prec),
            phase: BigReal::zero(prec),
        }
    }

    /// Build from log-modulus and phase; the phase is normalized, and a
    /// `-inf` log-modulus collapses to the canonical zero.
    pub fn from_polar_log(log_mag: BigReal, phase: BigReal) -> Self {
        if log_mag.is_neg_infinity() {
            return Self::zero(log_mag.precision());
        }
        LogComplex {
            log_mag,
            phase: BigReal(normalize_phase(phase.0)),
        }
    }

    pub fn from_big(z: &BigComplex) -> Self {
        let prec = z.precision();
        if z.is_zero() {
            return Self::zero(prec);
        }
        LogComplex {
            log_mag: z.abs().ln(),
            phase: BigReal(normalize_phase(z.arg().0)),
        }
    }

    /// Back to rectangular form. Overflows only if `exp(log_mag)` exceeds the
    /// MPFR exponent range, far beyond anything this pipeline produces.
    pub fn to_big(&self, prec: Precision) -> BigComplex {
        if self.is_zero() {
            return BigComplex::zero(prec);
        }
        let mag = self.log_mag.to_precision(prec).exp();
        let (s, c) = self.phase.to_precision(prec).sin_cos();
        BigComplex::new(&mag * &c, &mag * &s)
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag.is_neg_infinity()
    }

    pub fn log_mag(&self) -> &BigReal {
        &self.log_mag
    }

    pub fn phase(&self) -> &BigReal {
        &self.phase
    }

    pub fn precision(&self) -> Precision {
        self.log_mag.precision()
    }

    fn out_prec(&self, other: &Self) -> Precision {
        Precision::new(
            self.precision()
                .bits()
                .max(other.precision().bits()),
        )
        .expect("precision below minimum")
    }

    /// Complex multiplication: log-moduli add, phases add. Zero absorbs.
    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.out_prec(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(prec);
        }
        LogComplex {
            log_mag: &self.log_mag + &other.log_mag,
            phase: BigReal(normalize_phase((&self.phase + &other.phase).0)),
        }
    }

    /// Complex addition. The larger-modulus term is factored out so the
    /// exponential never overflows: `log|a+b| = log|a| + log|1 + r e^{i dphi}|`
    /// with `r <= 1`. The residual is evaluated at doubled precision since it
    /// cancels when the operands nearly annihilate. Exactly antipodal
    /// representations (equal log-moduli, phases differing by exactly pi)
    /// return the zero sentinel.
    pub fn add(&self, other: &Self) -> Self {
        let prec = self.out_prec(other);
        if self.is_zero() {
            return other.clone().carry_to(prec);
        }
        if other.is_zero() {
            return self.clone().carry_to(prec);
        }
        let (hi, lo) = if other.log_mag > self.log_mag {
            (other, self)
        } else {
            (self, other)
        };
        let diff = &lo.log_mag - &hi.log_mag;
        let dphi = BigReal(normalize_phase((&lo.phase - &hi.phase).0));
        if diff.is_zero() && dphi.abs() == BigReal::pi(prec) {
            return Self::zero(prec);
        }
        let wide = prec.doubled();
        let r = diff.to_precision(wide).exp();
        let (s, c) = dphi.to_precision(wide).sin_cos();
        let u = &r * &c;
        let v = &r * &s;
        // |1 + r e^{i dphi}|^2 = 1 + (2u + r^2)
        let t = &(&u + &u) + &r.square();
        let one_plus_t = &BigReal::one(wide) + &t;
        if one_plus_t.is_zero() {
            return Self::zero(prec);
        }
        let half = BigReal::from_ratio(1, 2, wide);
        let log_mag = (&hi.log_mag.to_precision(wide) + &(&t.ln_1p() * &half)).to_precision(prec);
        let one_plus_u = &BigReal::one(wide) + &u;
        let phase = (&hi.phase.to_precision(wide) + &v.atan2(&one_plus_u)).to_precision(prec);
        LogComplex::from_polar_log(log_mag, phase)
    }

    /// Negation: rotate the phase by pi. Zero stays zero.
    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let pi = BigReal::pi(self.precision());
        LogComplex::from_polar_log(self.log_mag.clone(), &self.phase + &pi)
    }

    /// Multiply by `exp(delta)` for real `delta`: shift the log-modulus.
    pub fn scale_log(&self, delta: &BigReal) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LogComplex {
            log_mag: &self.log_mag + delta,
            phase: self.phase.clone(),
        }
    }

    /// `log(1 + |self|^alpha)`, evaluated stably for any magnitude.
    pub fn softplus_alpha(&self, alpha: &BigReal) -> BigReal {
        softplus_log_mag(&self.log_mag, alpha)
    }

    fn carry_to(self, prec: Precision) -> Self {
        if self.precision() == prec {
            self
        } else {
            LogComplex {
                log_mag: self.log_mag.to_precision(prec),
                phase: self.phase.to_precision(prec),
            }
        }
    }
}

/// `log(1 + exp(alpha * log_mag))`, stable on both branches; the `-inf`
/// sentinel (exact zero) gives `log 1 = 0`.
pub fn softplus_log_mag(log_mag: &BigReal, alpha: &BigReal) -> BigReal {
    assert!(
        alpha > &BigReal::zero(alpha.precision()),
        "softplus_log_mag requires alpha > 0"
    );
    let prec = log_mag.precision();
    if log_mag.is_neg_infinity() {
        return BigReal::zero(prec);
    }
    let t = alpha * log_mag;
    if t <= BigReal::zero(prec) {
        t.exp().ln_1p()
    } else {
        &t + &(-&t).exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn lc(log_mag: f64, phase: f64) -> LogComplex {
        LogComplex::from_polar_log(BigReal::from_f64(log_mag, p()), BigReal::from_f64(phase, p()))
    }

    fn tol(bits: i32) -> BigReal {
        BigReal::pow2(bits, p())
    }

    // ---- multiplication ----

    #[test]
    fn unit_times_unit() {
        let one = LogComplex::one(p());
        let r = one.mul(&one);
        assert!(r.log_mag().is_zero() && r.phase().is_zero());
    }

    #[test]
    fn zero_absorbs() {
        let z = LogComplex::zero(p());
        let a = lc(3.5, 1.0);
        assert!(z.mul(&a).is_zero());
        assert!(a.mul(&z).is_zero());
    }

    #[test]
    fn two_i_times_three_i() {
        // 2i * 3i = -6
        let half_pi = BigReal::pi(p()) / BigReal::from_u32(2, p());
        let a = LogComplex::from_polar_log(BigReal::from_u32(2, p()).ln(), half_pi.clone());
        let b = LogComplex::from_polar_log(BigReal::from_u32(3, p()).ln(), half_pi);
        let r = a.mul(&b);
        let expect = LogComplex::from_big(&BigComplex::from_f64s(-6.0, 0.0, p()));
        assert!((r.log_mag() - expect.log_mag()).abs() < tol(-240));
        assert_eq!(r.phase(), &BigReal::pi(p()));
    }

    // ---- addition ----

    #[test]
    fn additive_identity() {
        let a = lc(2.0, 0.25);
        let r = a.add(&LogComplex::zero(p()));
        assert_eq!(&r, &a);
    }

    #[test]
    fn antipodal_cancellation_is_exact() {
        let a = LogComplex::one(p());
        let b = LogComplex::from_polar_log(BigReal::zero(p()), BigReal::pi(p()));
        assert!(a.add(&b).is_zero());
        assert!(b.add(&a).is_zero());
    }

    #[test]
    fn three_plus_four_i() {
        let a = LogComplex::from_big(&BigComplex::from_f64s(3.0, 0.0, p()));
        let b = LogComplex::from_big(&BigComplex::from_f64s(0.0, 4.0, p()));
        let r = a.add(&b);
        let direct = LogComplex::from_big(&BigComplex::from_f64s(3.0, 4.0, p()));
        assert!((r.log_mag() - direct.log_mag()).abs() < tol(-240));
        assert!((r.phase() - direct.phase()).abs() < tol(-240));
    }

    // ---- softplus ----

    #[test]
    fn softplus_of_zero() {
        assert!(LogComplex::zero(p())
            .softplus_alpha(&BigReal::from_u32(3, p()))
            .is_zero());
    }

    #[test]
    fn softplus_unit_modulus_alpha_two() {
        let x = LogComplex::one(p());
        let r = x.softplus_alpha(&BigReal::from_u32(2, p()));
        let ln2 = BigReal::from_u32(2, p()).ln();
        assert!((&r - &ln2).abs() < tol(-250));
    }

    #[test]
    fn softplus_huge_modulus() {
        let x = LogComplex::from_polar_log(BigReal::from_u32(1000, p()), BigReal::zero(p()));
        let r = x.softplus_alpha(&BigReal::one(p()));
        // independent route: 1000 + ln(1 + e^{-1000})
        let expect = BigReal::from_u32(1000, p())
            + (-BigReal::from_u32(1000, p())).exp().ln_1p();
        let rel = (&(&r - &expect) / &expect).abs();
        assert!(rel < tol(-252));
        assert!((&r - &BigReal::from_u32(1000, p())).abs() < BigReal::from_f64(1e-300, p()));
    }

    // ---- invariants against direct complex arithmetic ----

    #[test]
    fn agrees_with_direct_arithmetic_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1ab);
        let tol = tol(-248); // 2^{-precision+8}
        for _ in 0..10_000 {
            let a = BigComplex::from_f64s(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), p());
            let b = BigComplex::from_f64s(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), p());
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let (la, lb) = (LogComplex::from_big(&a), LogComplex::from_big(&b));

            let prod = la.mul(&lb).to_big(p());
            let direct = &a * &b;
            assert!((&prod - &direct).abs() <= &tol * &direct.abs());

            let sum = la.add(&lb).to_big(p());
            let direct = &a + &b;
            // tolerance relative to the operand scale; the sum itself may cancel
            let scale = a.abs().max(&b.abs());
            assert!((&sum - &direct).abs() <= &tol * &scale);

            // phases stay normalized
            let pi = BigReal::pi(p());
            for v in [la.mul(&lb), la.add(&lb)] {
                if !v.is_zero() {
                    assert!(v.phase() <= &pi && v.phase() > &-pi.clone());
                }
            }

            // commutativity
            assert_eq!(la.mul(&lb), lb.mul(&la));
            let ab = la.add(&lb);
            let ba = lb.add(&la);
            if !ab.is_zero() && !ba.is_zero() {
                assert!((ab.log_mag() - ba.log_mag()).abs() <= &tol * &BigReal::one(p()));
            }
        }
    }

    #[test]
    fn mul_associative_to_tolerance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let vals: Vec<LogComplex> = (0..3)
                .map(|_| {
                    LogComplex::from_polar_log(
                        BigReal::from_f64(rng.gen_range(-50.0..50.0), p()),
                        BigReal::from_f64(rng.gen_range(-3.0..3.0), p()),
                    )
                })
                .collect();
            let left = vals[0].mul(&vals[1]).mul(&vals[2]);
            let right = vals[0].mul(&vals[1].mul(&vals[2]));
            assert!((left.log_mag() - right.log_mag()).abs() < tol(-248));
        }
    }

    #[test]
    fn round_trip_precision() {
        let z = BigComplex::from_f64s(-0.75, 2.5, p());
        let back = LogComplex::from_big(&z).to_big(p());
        assert!((&back - &z).abs() < &tol(-250) * &z.abs());
    }
}
