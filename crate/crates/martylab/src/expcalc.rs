//! Derivative calculus for exp-products `h = g * e^p` with polynomial `g`, `p`.
//!
//! Every derivative of `h` factors as `h^(k) = e^p * B_k` with `B_k` a
//! polynomial (the *bracket*). Two independent routes to `B_k` are shipped:
//!
//! - [`bracket_direct`]: the recursion `B_0 = g`, `B_{k+1} = B_k' + p' B_k`,
//!   immediate from differentiating `e^p B_k`;
//! - [`bracket_lemma`]: the structural form `B_k = k g' p^(k-1) + g phi_k(p',
//!   ..., p^(k-1)) + psi_k(g', ..., g^(k), p', ..., p^(k-2)) + g p^(k)` where
//!   `phi_k`, `psi_k` are universal integer-coefficient polynomials produced
//!   by [`PhiPsiRegistry::build`].
//!
//! The two routes agree with exact coefficient equality on integer input;
//! disagreement anywhere fails the verification suite loudly. The
//! construction pipeline needs the `psi` polynomials symbolically, the
//! verifier only the direct recursion.

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, BigReal, LogComplex, Precision};
use crate::poly::{MultiPoly, Poly, Var};
use std::collections::BTreeMap;

/// The function `g * e^p`.
#[derive(Clone, Debug)]
pub struct ExpProduct {
    pub g: Poly,
    pub p: Poly,
}

impl ExpProduct {
    pub fn new(g: Poly, p: Poly) -> Self {
        ExpProduct { g, p }
    }

    pub fn precision(&self) -> Precision {
        match (self.g.precision(), self.p.precision()) {
            (Some(a), Some(b)) => Precision::new(a.bits().max(b.bits())).unwrap(),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => Precision::default(),
        }
    }
}

/// The universal polynomials `phi_k`, `psi_k` for `k = 2..=k_max`.
///
/// `phi_k` lives in the variables `x_1..x_{k-1}`, `psi_k` in `y_1..y_k,
/// x_1..x_{k-2}`; `x_m` stands for `p^(m)` and `y_m` for `g^(m)`.
#[derive(Clone, Debug)]
pub struct PhiPsiRegistry {
    k_max: u32,
    phi: Vec<MultiPoly>,
    psi: Vec<MultiPoly>,
}

impl PhiPsiRegistry {
    /// Run the recursion up to `k_max >= 2`:
    ///
    /// phi_{k+1} = sum_{m=1}^{k-1} (d phi_k / d x_m) x_{m+1} + x_1 phi_k + x_1 x_k
    /// psi_{k+1} = k y_2 x_{k-1} + y_1 phi_k
    ///           + sum_{m=1}^{k} (d psi_k / d y_m) y_{m+1}
    ///           + sum_{m=1}^{k-2} (d psi_k / d x_m) x_{m+1}
    ///           + k y_1 x_1 x_{k-1} + x_1 psi_k
    ///
    /// with base case phi_2 = x_1^2, psi_2 = y_2.
    pub fn build(k_max: u32) -> Result<Self> {
        if k_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "registry needs k_max >= 2, got {k_max}"
            )));
        }
        let x = |m: u32| MultiPoly::var(Var::X(m));
        let y = |m: u32| MultiPoly::var(Var::Y(m));

        let mut phi = vec![x(1).mul(&x(1))];
        let mut psi = vec![y(2)];
        for k in 2..k_max {
            let phi_k = phi.last().unwrap();
            let psi_k = psi.last().unwrap();

            let mut phi_next = phi_k.mul(&x(1)).add(&x(1).mul(&x(k)));
            for m in 1..k {
                phi_next = phi_next.add(&phi_k.partial(Var::X(m)).mul(&x(m + 1)));
            }

            let mut psi_next = y(2)
                .mul(&x(k - 1))
                .mul_scalar(k as i64)
                .add(&y(1).mul(phi_k))
                .add(&y(1).mul(&x(1)).mul(&x(k - 1)).mul_scalar(k as i64))
                .add(&psi_k.mul(&x(1)));
            for m in 1..=k {
                psi_next = psi_next.add(&psi_k.partial(Var::Y(m)).mul(&y(m + 1)));
            }
            for m in 1..k.saturating_sub(1) {
                psi_next = psi_next.add(&psi_k.partial(Var::X(m)).mul(&x(m + 1)));
            }

            phi.push(phi_next);
            psi.push(psi_next);
        }

        let reg = PhiPsiRegistry { k_max, phi, psi };
        debug_assert!(reg.check_variable_arity());
        Ok(reg)
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// `phi_k` for `2 <= k <= k_max`.
    pub fn phi(&self, k: u32) -> &MultiPoly {
        assert!((2..=self.k_max).contains(&k), "phi_{k} not in registry");
        &self.phi[(k - 2) as usize]
    }

    /// `psi_k` for `2 <= k <= k_max`.
    pub fn psi(&self, k: u32) -> &MultiPoly {
        assert!((2..=self.k_max).contains(&k), "psi_{k} not in registry");
        &self.psi[(k - 2) as usize]
    }

    fn check_variable_arity(&self) -> bool {
        for k in 2..=self.k_max {
            for v in self.phi(k).vars() {
                match v {
                    Var::X(m) if m <= k - 1 => {}
                    _ => return false,
                }
            }
            for v in self.psi(k).vars() {
                match v {
                    Var::Y(m) if m >= 1 && m <= k => {}
                    Var::X(m) if m >= 1 && k >= 2 && m <= k - 2 => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Derivative chain `f, f', ..., f^(max)`.
fn derivative_chain(f: &Poly, max: u32) -> Vec<Poly> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(f.clone());
    for _ in 0..max {
        out.push(out.last().unwrap().derivative());
    }
    out
}

/// Bracket polynomial by the direct recursion `B_0 = g`, `B_{k+1} = B_k' + p' B_k`.
pub fn bracket_direct(h: &ExpProduct, k: u32) -> Poly {
    let dp = h.p.derivative();
    let mut b = h.g.clone();
    for _ in 0..k {
        b = &b.derivative() + &(&dp * &b);
    }
    b
}

/// Bracket polynomial assembled from the structural form of order `k`
/// (`2 <= k <= reg.k_max`), substituting the derivative chains of `g` and `p`
/// for the registry variables.
pub fn bracket_lemma(h: &ExpProduct, k: u32, reg: &PhiPsiRegistry) -> Result<Poly> {
    if !(2..=reg.k_max()).contains(&k) {
        return Err(Error::KOutOfRange {
            k,
            k_max: reg.k_max(),
        });
    }
    let prec = h.precision();
    let dg = derivative_chain(&h.g, k);
    let dp = derivative_chain(&h.p, k);

    let mut assign: BTreeMap<Var, Poly> = BTreeMap::new();
    for m in 1..=k {
        assign.insert(Var::Y(m), dg[m as usize].clone());
        if m <= k - 1 {
            assign.insert(Var::X(m), dp[m as usize].clone());
        }
    }

    let k_scalar = Poly::constant(BigComplex::from_real(BigReal::from_u32(k, prec)));
    let lead = &(&k_scalar * &dg[1]) * &dp[(k - 1) as usize];
    let phi_term = &h.g * &reg.phi(k).eval_poly(&assign, prec)?;
    let psi_term = reg.psi(k).eval_poly(&assign, prec)?;
    let tail = &h.g * &dp[k as usize];
    Ok(&(&(&lead + &phi_term) + &psi_term) + &tail)
}

/// Precomputed brackets `B_0..B_max_order` of one exp-product, for cheap
/// repeated log-domain evaluation of scaled derivatives during sweeps.
#[derive(Clone, Debug)]
pub struct BracketSeries {
    p: Poly,
    brackets: Vec<Poly>,
}

impl BracketSeries {
    /// Brackets via the direct recursion.
    pub fn direct(h: &ExpProduct, max_order: u32) -> Self {
        let dp = h.p.derivative();
        let mut brackets = Vec::with_capacity(max_order as usize + 1);
        brackets.push(h.g.clone());
        for _ in 0..max_order {
            let b: &Poly = brackets.last().unwrap();
            brackets.push(&b.derivative() + &(&dp * b));
        }
        BracketSeries {
            p: h.p.clone(),
            brackets,
        }
    }

    pub fn max_order(&self) -> u32 {
        (self.brackets.len() - 1) as u32
    }

    pub fn bracket(&self, order: u32) -> &Poly {
        &self.brackets[order as usize]
    }

    /// `log_scale + h^(order)(z)` in log domain: one Horner evaluation of the
    /// bracket plus one of the exponent.
    pub fn eval_log(&self, order: u32, z: &BigComplex, log_scale: &BigReal) -> LogComplex {
        let prec = z.precision();
        let bz = self.brackets[order as usize].eval(z);
        if bz.is_zero() {
            return LogComplex::zero(prec);
        }
        let pz = self.p.eval(z);
        LogComplex::from_polar_log(
            &(log_scale + &pz.re) + &bz.abs().ln(),
            &pz.im + &bz.arg(),
        )
    }

    /// Log-moduli of `exp(log_scale) h^(order)(z)` for several orders at once,
    /// sharing the exponent evaluation and skipping all phase work (`-inf`
    /// entries mark exact bracket zeros). This is the sweep hot path.
    pub fn eval_log_mags(&self, orders: &[u32], z: &BigComplex, log_scale: &BigReal) -> Vec<BigReal> {
        let prec = z.precision();
        let log_exp = &self.p.eval(z).re + log_scale;
        orders
            .iter()
            .map(|&order| {
                let bz = self.brackets[order as usize].eval(z);
                if bz.is_zero() {
                    BigReal::neg_infinity(prec)
                } else {
                    &log_exp + &bz.abs().ln()
                }
            })
            .collect()
    }
}

/// Log-domain value of `exp(log_scale) * h^(k)(z)`; zero sentinel when the
/// bracket vanishes exactly at `z`.
pub fn log_eval_deriv(h: &ExpProduct, k: u32, z: &BigComplex, log_scale: &BigReal) -> LogComplex {
    BracketSeries::direct(h, k).eval_log(k, z, log_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Integer;

    fn p() -> Precision {
        Precision::default()
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64s(re, im, p())
    }

    fn real_poly(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| c(v as f64, 0.0)).collect())
    }

    fn x(m: u32) -> MultiPoly {
        MultiPoly::var(Var::X(m))
    }

    fn y(m: u32) -> MultiPoly {
        MultiPoly::var(Var::Y(m))
    }

    // ---- registry closed forms ----

    #[test]
    fn registry_base_case() {
        let reg = PhiPsiRegistry::build(2).unwrap();
        assert_eq!(reg.phi(2), &x(1).mul(&x(1)));
        assert_eq!(reg.psi(2), &y(2));
    }

    #[test]
    fn registry_rejects_low_order() {
        assert!(PhiPsiRegistry::build(1).is_err());
    }

    #[test]
    fn registry_order_three_closed_forms() {
        let reg = PhiPsiRegistry::build(3).unwrap();
        let phi3 = x(1).mul(&x(1)).mul(&x(1)).add(&x(1).mul(&x(2)).mul_scalar(3));
        let psi3 = y(3)
            .add(&x(1).mul(&y(2)).mul_scalar(3))
            .add(&x(1).mul(&x(1)).mul(&y(1)).mul_scalar(3));
        assert_eq!(reg.phi(3), &phi3);
        assert_eq!(reg.psi(3), &psi3);
    }

    // ---- independent symbolic oracle ----
    //
    // Differentiate g*e^p formally, tracking the bracket as an exact integer
    // polynomial in y_0 := g, y_j := g^(j), x_j := p^(j): T_0 = y_0 and
    // T_{k+1} = D(T_k) + x_1 T_k, where D shifts each variable's index up via
    // the chain rule. Splitting off the terms that contain y_0 recovers phi_k
    // and psi_k without ever running the registry recursion.

    fn shift_derivative(t: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for v in t.vars() {
            let succ = match v {
                Var::X(m) => Var::X(m + 1),
                Var::Y(m) => Var::Y(m + 1),
            };
            out = out.add(&t.partial(v).mul(&MultiPoly::var(succ)));
        }
        out
    }

    fn leibniz_bracket(k: u32) -> MultiPoly {
        let mut t = MultiPoly::var(Var::Y(0));
        for _ in 0..k {
            t = shift_derivative(&t).add(&t.mul(&x(1)));
        }
        t
    }

    fn split_bracket(t: &MultiPoly, k: u32) -> (MultiPoly, MultiPoly) {
        // t = y_0 * (phi_k + x_k) + [k y_1 x_{k-1} + psi_k]
        let mut with_g = Vec::new();
        let mut without_g = Vec::new();
        for (m, coeff) in t.terms() {
            match m.exponent_of(Var::Y(0)) {
                0 => without_g.push((m.clone(), coeff.clone())),
                1 => with_g.push((
                    crate::poly::Monomial::from_exponents(
                        m.exponents().filter(|&(v, _)| v != Var::Y(0)),
                    ),
                    coeff.clone(),
                )),
                _ => panic!("bracket term with g-power > 1"),
            }
        }
        let phi = MultiPoly::from_terms(with_g).add(&x(k).mul_scalar(-1));
        let psi = MultiPoly::from_terms(without_g)
            .add(&y(1).mul(&x(k - 1)).mul_scalar(-(k as i64)));
        (phi, psi)
    }

    #[test]
    fn registry_matches_leibniz_oracle_up_to_six() {
        let reg = PhiPsiRegistry::build(6).unwrap();
        for k in 2..=6 {
            let (phi, psi) = split_bracket(&leibniz_bracket(k), k);
            assert_eq!(reg.phi(k), &phi, "phi_{k}");
            assert_eq!(reg.psi(k), &psi, "psi_{k}");
        }
    }

    // ---- brackets ----

    #[test]
    fn bracket_zero_order_is_g() {
        let h = ExpProduct::new(real_poly(&[-1, 0, 1]), real_poly(&[0, 2]));
        assert_eq!(bracket_direct(&h, 0), h.g);
    }

    #[test]
    fn second_bracket_of_linear_g_no_exponent() {
        let h = ExpProduct::new(real_poly(&[0, 1]), Poly::zero());
        assert!(bracket_direct(&h, 2).is_zero());
    }

    #[test]
    fn third_bracket_of_pure_exponential() {
        let h = ExpProduct::new(real_poly(&[1]), real_poly(&[0, 1]));
        assert_eq!(bracket_direct(&h, 3), real_poly(&[1]));
    }

    #[test]
    fn lemma_reduces_to_plain_derivative_without_exponent() {
        let reg = PhiPsiRegistry::build(2).unwrap();
        let h = ExpProduct::new(real_poly(&[-1, 0, 1]), Poly::zero());
        assert_eq!(bracket_lemma(&h, 2, &reg).unwrap(), real_poly(&[2]));
    }

    #[test]
    fn lemma_on_pure_exponential() {
        let reg = PhiPsiRegistry::build(2).unwrap();
        let h = ExpProduct::new(real_poly(&[1]), real_poly(&[0, 1]));
        assert_eq!(bracket_lemma(&h, 2, &reg).unwrap(), real_poly(&[1]));
    }

    #[test]
    fn lemma_out_of_range_errors() {
        let reg = PhiPsiRegistry::build(3).unwrap();
        let h = ExpProduct::new(real_poly(&[1]), real_poly(&[0, 1]));
        assert!(matches!(
            bracket_lemma(&h, 4, &reg),
            Err(Error::KOutOfRange { k: 4, k_max: 3 })
        ));
        assert!(bracket_lemma(&h, 1, &reg).is_err());
    }

    fn random_int_poly(rng: &mut impl rand::Rng, max_deg: usize) -> Poly {
        let deg = rng.gen_range(0..=max_deg);
        Poly::from_coeffs(
            (0..=deg)
                .map(|_| c(rng.gen_range(-9..=9) as f64, rng.gen_range(-9..=9) as f64))
                .collect(),
        )
    }

    #[test]
    fn lemma_equals_direct_on_random_input() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let reg = PhiPsiRegistry::build(6).unwrap();
        for _ in 0..40 {
            let h = ExpProduct::new(random_int_poly(&mut rng, 5), random_int_poly(&mut rng, 5));
            for k in 2..=6 {
                assert_eq!(
                    bracket_lemma(&h, k, &reg).unwrap(),
                    bracket_direct(&h, k),
                    "k={k}"
                );
            }
        }
    }

    #[test]
    fn bracket_recursion_matches_finite_differences_on_reals() {
        // For real g, p and real t, d/dt [e^{p(t)} B_k(t)] = e^{p(t)} B_{k+1}(t).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let bits = Precision::DEFAULT_BITS as i32;
        let h_step = BigReal::pow2(-bits / 2, p());
        let tol = BigReal::pow2(-bits / 4, p());
        for _ in 0..25 {
            let g = random_int_poly(&mut rng, 4);
            let pp = random_int_poly(&mut rng, 3);
            // keep both real so the sampled function is real-valued
            let realify = |f: &Poly| {
                Poly::from_coeffs(
                    f.coeffs()
                        .iter()
                        .map(|z| BigComplex::from_real(z.re.clone()))
                        .collect(),
                )
            };
            let h = ExpProduct::new(realify(&g), realify(&pp));
            let k = rng.gen_range(0..4u32);
            let bk = bracket_direct(&h, k);
            let bk1 = bracket_direct(&h, k + 1);
            let t = BigReal::from_f64(rng.gen_range(-1.0..1.0), p());
            let sample = |t: &BigReal| {
                let z = BigComplex::from_real(t.clone());
                h.p.eval(&z).re.exp() * bk.eval(&z).re
            };
            let fd = (sample(&(&t + &h_step)) - sample(&(&t - &h_step)))
                / (&h_step + &h_step);
            let z = BigComplex::from_real(t.clone());
            let exact = h.p.eval(&z).re.exp() * bk1.eval(&z).re;
            let denom = BigReal::one(p()).max(&exact.abs());
            assert!((&fd - &exact).abs() <= &tol * &denom);
        }
    }

    #[test]
    fn bracket_coefficients_are_exact_integers() {
        // integer inputs keep every bracket coefficient an exact integer
        let h = ExpProduct::new(real_poly(&[-1, 0, 0, 1]), real_poly(&[1, -2, 3]));
        let b = bracket_direct(&h, 4);
        for coeff in b.coeffs() {
            let re = coeff.re.to_f64();
            assert_eq!(re, re.round());
            assert!(Integer::from(re as i64) == re as i64);
        }
    }

    // ---- log-domain evaluation ----

    #[test]
    fn exact_zero_of_g_gives_sentinel() {
        let h = ExpProduct::new(real_poly(&[-1, 1]), Poly::zero());
        let v = log_eval_deriv(&h, 0, &c(1.0, 0.0), &BigReal::zero(p()));
        assert!(v.is_zero());
    }

    #[test]
    fn huge_exponent_stays_in_log_domain() {
        let h = ExpProduct::new(real_poly(&[1]), real_poly(&[0, 1]));
        let v = log_eval_deriv(&h, 0, &c(1000.0, 0.0), &BigReal::zero(p()));
        assert_eq!(v.log_mag(), &BigReal::from_u32(1000, p()));
    }

    #[test]
    fn scaled_first_derivative() {
        // 3 * g'(2) = 3 * 4 = 12 for g = z^2 - 1
        let h = ExpProduct::new(real_poly(&[-1, 0, 1]), Poly::zero());
        let scale = BigReal::from_u32(3, p()).ln();
        let v = log_eval_deriv(&h, 1, &c(2.0, 0.0), &scale);
        let expect = BigReal::from_u32(12, p()).ln();
        assert!((v.log_mag() - &expect).abs() < BigReal::pow2(-248, p()));
        assert!(v.phase().is_zero());
    }

    #[test]
    fn scale_shift_property() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let h = ExpProduct::new(real_poly(&[-1, 0, 1]), real_poly(&[0, 1, 1]));
        for _ in 0..50 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let s = BigReal::from_f64(rng.gen_range(-100.0..100.0), p());
            let k = rng.gen_range(0..4u32);
            let base = log_eval_deriv(&h, k, &z, &BigReal::zero(p()));
            let scaled = log_eval_deriv(&h, k, &z, &s);
            if base.is_zero() {
                assert!(scaled.is_zero());
                continue;
            }
            assert_eq!(scaled.phase(), base.phase());
            assert!(
                (&(scaled.log_mag() - base.log_mag()) - &s).abs() < BigReal::pow2(-240, p())
            );
        }
    }
}
