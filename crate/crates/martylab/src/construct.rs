//! The counterexample pipeline.
//!
//! For parameters `k0 >= 2`, `alpha > 1`, `C > 0` it builds members
//! `f_n = a_n (z^n - 1) e^{p_n}` on the disk `|z| < 2`:
//!
//! 1. pick integer exponents `1 < p/q < min(alpha, 2)` and a validated bound
//!    `M` for `(1 + x^{p/q})/(1 + x^alpha)`;
//! 2. prescribe values of `p_n', ..., p_n^(k0)` at the n-th roots of unity so
//!    that `h_n'', ..., h_n^(k0+1)` all vanish there, and realize them with a
//!    Hermite interpolant;
//! 3. bound the entire quotient `(h^(k0))^q / h^p` over the closed disk via a
//!    boundary-circle search (`log c_n`), and pick `log a_n` large enough for
//!    both the quotient chain and unit-circle blow-up;
//! 4. verify every member (vanishing brackets + full quotient grid) and fail
//!    loudly otherwise.
//!
//! All moduli are handled as logs end to end; `a_n` and `c_n` are never
//! materialized as plain numbers.

use crate::error::{Error, Result};
use crate::expcalc::{bracket_lemma, ExpProduct, PhiPsiRegistry};
use crate::hermite::{hermite_interpolate, HermiteData};
use crate::numerics::{BigComplex, BigReal, Precision};
use crate::poly::{roots_of_unity, unit_circle_point, Poly, Var};
use crate::sweep::{golden_max, scan_values, top_candidates};
use crate::verify::{self, GridReport, MemberEvaluator, Region, VanishingReport};
use std::collections::BTreeMap;

/// Global parameters of one constructed family.
#[derive(Clone, Debug)]
pub struct CounterexampleSpec {
    pub k0: u32,
    pub alpha: BigReal,
    pub c_bound: BigReal,
    pub p: u32,
    pub q: u32,
    pub m_bound: BigReal,
    pub precision: Precision,
}

impl CounterexampleSpec {
    /// Validate the inputs, pick `(p, q)` and establish the bound `M`.
    pub fn build(k0: u32, alpha: BigReal, c_bound: BigReal, precision: Precision) -> Result<Self> {
        if k0 < 2 {
            return Err(Error::InvalidParameter(format!(
                "k0 must be >= 2, got {k0}"
            )));
        }
        let one = BigReal::one(precision);
        if !(alpha > one) {
            return Err(Error::InvalidParameter(
                "alpha must be > 1 for the construction".to_string(),
            ));
        }
        if !(c_bound > BigReal::zero(precision)) {
            return Err(Error::InvalidParameter("C must be > 0".to_string()));
        }
        let alpha = alpha.to_precision(precision);
        let c_bound = c_bound.to_precision(precision);
        let (p, q) = select_pq(&alpha);
        debug_assert!(2 * q > p);
        let m_bound = bound_m(p, q, &alpha)?;
        Ok(CounterexampleSpec {
            k0,
            alpha,
            c_bound,
            p,
            q,
            m_bound,
            precision,
        })
    }

    pub fn log_c(&self) -> BigReal {
        self.c_bound.ln()
    }

    pub fn log_m(&self) -> BigReal {
        self.m_bound.ln()
    }

    /// `p/q` as a real exponent.
    pub fn p_over_q(&self) -> BigReal {
        BigReal::from_ratio(self.p as i64, self.q as i64, self.precision)
    }
}

/// One member `f_n = a_n h_n`, `h_n = (z^n - 1) e^{p_n}`, kept in log scale.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub n: u32,
    pub log_cn: BigReal,
    pub log_an: BigReal,
    pub h: ExpProduct,
}

impl FamilyMember {
    /// The exponent polynomial `p_n`.
    pub fn pn(&self) -> &Poly {
        &self.h.p
    }
}

/// Verification evidence attached to one member.
#[derive(Clone, Debug)]
pub struct MemberVerification {
    pub vanishing: VanishingReport,
    pub quotient: GridReport,
}

/// A full constructed family with per-member verification reports.
#[derive(Debug)]
pub struct ConstructedFamily {
    pub spec: CounterexampleSpec,
    pub members: Vec<FamilyMember>,
    pub verification: Vec<MemberVerification>,
}

/// Search and grid parameters; the defaults match the verification suite.
#[derive(Clone, Debug)]
pub struct ConstructOptions {
    /// Samples per circle in boundary searches.
    pub circle_samples: usize,
    /// Grid cells refined by golden section around the best candidates.
    pub refine_candidates: usize,
    /// Golden-section iterations per refined cell.
    pub refine_iterations: usize,
    /// Resolution of the attached quotient verification grid.
    pub grid_resolution: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            circle_samples: 4096,
            refine_candidates: 8,
            refine_iterations: 160,
            grid_resolution: 401,
        }
    }
}

/// Multiplicative safety margin (1.05) applied to every searched extremum.
fn safety_log(prec: Precision) -> BigReal {
    BigReal::from_ratio(21, 20, prec).ln()
}

// ---------------------------------------------------------------------------
// Exponent selection and the bound M
// ---------------------------------------------------------------------------

/// Smallest `q` admitting an integer `p` with `1 < p/q < min(alpha, 2)`
/// strictly, then the smallest such `p`. Comparisons carry a guard band of
/// `2^(-precision/2)` so boundary ties (e.g. alpha exactly 3/2) are rejected.
pub fn select_pq(alpha: &BigReal) -> (u32, u32) {
    let prec = alpha.precision();
    let cap = alpha.min(&BigReal::from_u32(2, prec));
    let guard = BigReal::pow2(-(prec.bits() as i32) / 2, prec);
    for q in 1..=1_000_000u32 {
        let upper = &BigReal::from_u32(q, prec) * &cap;
        for p in q + 1..=2 * q {
            if &upper - &BigReal::from_u32(p, prec) > guard {
                return (p, q);
            }
        }
    }
    unreachable!("min(alpha, 2) > 1 always admits a pair");
}

const BOUND_M_GRID: usize = 2048;
const BOUND_M_REFINE_CELLS: usize = 3;
const BOUND_M_REFINE_ITERATIONS: usize = 200;
const BOUND_M_VALIDATION_GRID: usize = 100_000;

/// `log h(x)` for `h(x) = (1 + x^{p/q})/(1 + x^alpha)`, stable for any `x >= 0`.
fn log_upper_ratio(x: &BigReal, p_over_q: &BigReal, alpha: &BigReal) -> BigReal {
    let prec = x.precision();
    if x.is_zero() {
        return BigReal::zero(prec);
    }
    let lx = x.ln();
    let softplus = |t: BigReal| {
        if t <= BigReal::zero(prec) {
            t.exp().ln_1p()
        } else {
            &t + &(-&t).exp().ln_1p()
        }
    };
    softplus(p_over_q * &lx) - softplus(alpha * &lx)
}

/// Validated upper bound for `(1 + x^{p/q})/(1 + x^alpha)` over `[0, inf)`.
///
/// The search runs on `[0, x_star]` with `x_star` chosen so that
/// `h(x) <= 2 x^{p/q - alpha} < 1` beyond it (possible since `p/q < alpha`):
/// a geometric grid, golden-section refinement around the top cells, and a
/// multiplicative 1e-3 safety factor. The estimate is then re-validated on an
/// independent dense grid; failure is an error, never a silent clamp.
pub fn bound_m(p: u32, q: u32, alpha: &BigReal) -> Result<BigReal> {
    let prec = alpha.precision();
    let p_over_q = BigReal::from_ratio(p as i64, q as i64, prec);
    if !(p_over_q > BigReal::one(prec)) || !(alpha > &p_over_q) {
        return Err(Error::InvalidParameter(format!(
            "bound_m needs 1 < p/q < alpha, got p={p}, q={q}"
        )));
    }

    let gap = alpha - &p_over_q;
    let x_star = &(&BigReal::from_u32(2, prec).ln() / &gap).exp() * &BigReal::from_u32(2, prec);
    let x_star = x_star.max(&BigReal::from_u32(2, prec));
    if !(log_upper_ratio(&x_star, &p_over_q, alpha) < BigReal::zero(prec)) {
        return Err(Error::BoundValidation(
            "tail cutoff failed to push the ratio below 1".to_string(),
        ));
    }

    // geometric grid over [x_star * 2^-40, x_star], plus the origin
    let span_log = BigReal::from_u32(40, prec) * BigReal::from_u32(2, prec).ln();
    let ratio = (&span_log / &BigReal::from_usize(BOUND_M_GRID - 1, prec)).exp();
    let mut xs = Vec::with_capacity(BOUND_M_GRID + 1);
    xs.push(BigReal::zero(prec));
    let mut x = &x_star * &BigReal::pow2(-40, prec);
    for _ in 0..BOUND_M_GRID {
        xs.push(x.clone());
        x = &x * &ratio;
    }
    let last = xs.len() - 1;
    xs[last] = x_star.clone();

    let values = scan_values(xs.len(), |i| log_upper_ratio(&xs[i], &p_over_q, alpha));
    let mut best = values
        .iter()
        .cloned()
        .reduce(|a, b| a.max(&b))
        .expect("nonempty");
    for idx in top_candidates(&values, BOUND_M_REFINE_CELLS) {
        let lo = &xs[idx.saturating_sub(1)];
        let hi = &xs[(idx + 1).min(last)];
        let (_, v) = golden_max(
            |x| log_upper_ratio(x, &p_over_q, alpha),
            lo,
            hi,
            BOUND_M_REFINE_ITERATIONS,
        );
        best = best.max(&v);
    }

    let m_hat = &best.exp() * &BigReal::from_ratio(1001, 1000, prec);

    // independent dense validation
    let log_m_hat = m_hat.ln();
    let steps = BigReal::from_usize(BOUND_M_VALIDATION_GRID - 1, prec);
    let step = &x_star / &steps;
    let violation = crate::sweep::scan_filtered_max(BOUND_M_VALIDATION_GRID, |i| {
        let x = &BigReal::from_usize(i, prec) * &step;
        let v = log_upper_ratio(&x, &p_over_q, alpha);
        (v > log_m_hat).then_some(v)
    });
    if let Some(hit) = violation.best {
        return Err(Error::BoundValidation(format!(
            "dense grid exceeds the bound: log h = {} at sample {}",
            hit.value.to_f64(),
            hit.index
        )));
    }
    Ok(m_hat)
}

// ---------------------------------------------------------------------------
// Derivative prescription and the exponent polynomial
// ---------------------------------------------------------------------------

/// Prescribed values of `q := p_n'` (orders `0..k0-1`) at every n-th root of
/// unity that force `h_n'', ..., h_n^(k0+1)` to vanish there:
///
/// - order 0: `p_n'(z_l) = -g''/(2 g')` at `z_l`;
/// - order k-1 (k = 2..k0): `p_n^(k)(z_l) = -psi_{k+1}(g', ..., g^(k+1),
///   p_n', ..., p_n^(k-1)) / ((k+1) g')` at `z_l`, consuming only previously
///   prescribed values at that node.
pub fn prescribe_derivatives(
    n: u32,
    k0: u32,
    reg: &PhiPsiRegistry,
    prec: Precision,
) -> Result<HermiteData> {
    if reg.k_max() < k0 + 1 {
        return Err(Error::KOutOfRange {
            k: k0 + 1,
            k_max: reg.k_max(),
        });
    }
    let g = Poly::unit_roots_poly(n as usize, prec);
    let mut dg = vec![g];
    for _ in 0..k0 + 1 {
        dg.push(dg.last().unwrap().derivative());
    }
    let roots = roots_of_unity(n as usize, prec);
    let two = BigComplex::from_f64s(2.0, 0.0, prec);

    let mut values = Vec::with_capacity(roots.len());
    for root in &roots {
        let gvals: Vec<BigComplex> = (0..=k0 + 1).map(|m| dg[m as usize].eval(root)).collect();
        let g1 = &gvals[1];
        if g1.is_zero() {
            return Err(Error::InvalidParameter(
                "derivative of the base polynomial vanishes at a node".to_string(),
            ));
        }
        let mut prescribed = vec![-&(&gvals[2] / &(&two * g1))];
        for k in 2..=k0 {
            let mut assign: BTreeMap<Var, BigComplex> = BTreeMap::new();
            for m in 1..=k + 1 {
                assign.insert(Var::Y(m), gvals[m as usize].clone());
            }
            for m in 1..=k - 1 {
                assign.insert(Var::X(m), prescribed[(m - 1) as usize].clone());
            }
            let psi_val = reg.psi(k + 1).eval(&assign, prec)?;
            let denom = g1.scale(&BigReal::from_u32(k + 1, prec));
            prescribed.push(-&(&psi_val / &denom));
        }
        values.push(prescribed);
    }
    HermiteData::new(roots, values)
}

/// The exponent polynomial `p_n` (degree at most `n * k0`): interpolate the
/// prescribed data for `p_n'` and integrate with constant term 0.
pub fn build_pn(n: u32, k0: u32, reg: &PhiPsiRegistry, prec: Precision) -> Result<Poly> {
    let data = prescribe_derivatives(n, k0, reg, prec)?;
    let q = hermite_interpolate(&data)?;
    Ok(q.antiderivative(BigComplex::zero(prec)))
}

// ---------------------------------------------------------------------------
// The scale constants c_n and a_n
// ---------------------------------------------------------------------------

/// `log` of the entire quotient `|(h^(k0))^q / h^p|` at `z`, using a
/// precomputed bracket `B_k0`:
/// `(q - p) Re p_n(z) + q log|B_k0(z)| - p log|g_n(z)|`.
///
/// Meaningful away from the removable singularities on `|z| = 1`.
pub fn entire_quotient_log(
    h: &ExpProduct,
    bracket_k0: &Poly,
    p_exp: u32,
    q_exp: u32,
    z: &BigComplex,
) -> BigReal {
    let prec = z.precision();
    let pz = h.p.eval(z);
    let scale = &BigReal::from_i64(q_exp as i64 - p_exp as i64, prec) * &pz.re;
    let bracket_term = &BigReal::from_u32(q_exp, prec) * &bracket_k0.eval(z).abs().ln();
    let g_term = &BigReal::from_u32(p_exp, prec) * &h.g.eval(z).abs().ln();
    let out = &(&scale + &bracket_term) - &g_term;
    debug_assert!(!out.to_f64().is_nan());
    out
}

fn polar_point(radius: &BigReal, angle: &BigReal) -> BigComplex {
    let (s, c) = angle.sin_cos();
    BigComplex::new(radius * &c, radius * &s)
}

/// Grid-plus-golden extremum of a log-scale function on the circle of given
/// radius; `maximize = false` searches the minimum.
fn circle_extreme<F>(f: F, radius: &BigReal, options: &ConstructOptions, maximize: bool) -> BigReal
where
    F: Fn(&BigComplex) -> BigReal + Sync + Send,
{
    let prec = radius.precision();
    let samples = options.circle_samples;
    let signed = |v: BigReal| if maximize { v } else { -v };

    let values = scan_values(samples, |i| {
        let z = unit_circle_point(i as u64, samples as u64, prec).scale(radius);
        signed(f(&z))
    });
    let mut best = values
        .iter()
        .cloned()
        .reduce(|a, b| a.max(&b))
        .expect("nonempty");

    let two_pi = &BigReal::pi(prec) * &BigReal::from_u32(2, prec);
    let cell = &two_pi / &BigReal::from_usize(samples, prec);
    for idx in top_candidates(&values, options.refine_candidates) {
        let center = &BigReal::from_usize(idx, prec) * &cell;
        let lo = &center - &cell;
        let hi = &center + &cell;
        let (_, v) = golden_max(
            |t| signed(f(&polar_point(radius, t))),
            &lo,
            &hi,
            options.refine_iterations,
        );
        best = best.max(&v);
    }
    signed(best)
}

/// `log c_n`: maximum of the entire quotient over the closed disk of radius 2.
///
/// The quotient is entire (the `2q > p` multiplicity surplus cancels the
/// poles), so its maximum over the closed disk sits on the boundary circle by
/// the maximum modulus principle; only `|z| = 2` is searched, keeping clear
/// of the removable singularities at the roots of unity. A 1.05 safety factor
/// covers the non-rigorous search.
pub fn compute_log_cn(
    h: &ExpProduct,
    bracket_k0: &Poly,
    spec: &CounterexampleSpec,
    options: &ConstructOptions,
) -> BigReal {
    let prec = spec.precision;
    let radius = BigReal::from_u32(2, prec);
    let max = circle_extreme(
        |z| entire_quotient_log(h, bracket_k0, spec.p, spec.q, z),
        &radius,
        options,
        true,
    );
    &max + &safety_log(prec)
}

/// `log a_n`: the larger of
///
/// (i)  `(log c_n + q log M - q log C)/(p - q)`, which drives the quotient
///      chain below `(C/M)^q`, and
/// (ii) `log n - log min |h_n|` over `{|z| <= 1 - 1/n} ∪ {1 + 1/n <= |z| <= 2}`,
///      which forces `|f_n| >= n` off the unit circle.
///
/// `h_n` is zero-free off `|z| = 1`, so the minimum in (ii) is attained on
/// the bounding circles; for `n = 1` the inner disk degenerates to the
/// origin. The searched minimum is deflated by the 1.05 safety factor.
pub fn compute_log_an(
    h: &ExpProduct,
    n: u32,
    log_cn: &BigReal,
    spec: &CounterexampleSpec,
    options: &ConstructOptions,
) -> BigReal {
    let prec = spec.precision;
    let log_h = |z: &BigComplex| &h.g.eval(z).abs().ln() + &h.p.eval(z).re;

    let q_real = BigReal::from_u32(spec.q, prec);
    let branch_quotient = &(&(log_cn + &(&q_real * &spec.log_m())) - &(&q_real * &spec.log_c()))
        / &BigReal::from_u32(spec.p - spec.q, prec);

    let mut min_log_h = log_h(&BigComplex::new(
        BigReal::from_u32(2, prec),
        BigReal::zero(prec),
    ));
    let mut radii = vec![BigReal::from_u32(2, prec)];
    if n == 1 {
        // the inner region degenerates to the single point z = 0
        min_log_h = min_log_h.min(&log_h(&BigComplex::zero(prec)));
    } else {
        radii.push(BigReal::from_ratio(n as i64 - 1, n as i64, prec));
        radii.push(BigReal::from_ratio(n as i64 + 1, n as i64, prec));
    }
    for radius in &radii {
        min_log_h = min_log_h.min(&circle_extreme(&log_h, radius, options, false));
    }

    let branch_divergence = &BigReal::from_u32(n, prec).ln() - &(&min_log_h - &safety_log(prec));
    branch_quotient.max(&branch_divergence)
}

// ---------------------------------------------------------------------------
// End-to-end family construction
// ---------------------------------------------------------------------------

fn stage<T>(name: &'static str, n: u32, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        e @ Error::VerificationFailed { .. } => e,
        other => Error::StageFailed {
            stage: name,
            n,
            source: Box::new(other),
        },
    })
}

/// Build and verify members for every `n` in `n_list`.
///
/// Each member runs: exponent polynomial, bracket (structural form), `log
/// c_n`, `log a_n`, vanishing check (direct brackets) and the full quotient
/// grid against `log C`. The first failure aborts with its stage name and
/// member index.
pub fn construct_family(
    k0: u32,
    alpha: BigReal,
    c_bound: BigReal,
    n_list: &[u32],
    precision: Precision,
    options: &ConstructOptions,
) -> Result<ConstructedFamily> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty member list".to_string()));
    }
    if n_list.iter().any(|&n| n == 0) {
        return Err(Error::InvalidParameter(
            "member indices start at 1".to_string(),
        ));
    }
    let mut ns: Vec<u32> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();

    let spec = CounterexampleSpec::build(k0, alpha, c_bound, precision)?;
    let reg = PhiPsiRegistry::build(k0 + 1)?;

    let mut members = Vec::with_capacity(ns.len());
    let mut verification = Vec::with_capacity(ns.len());
    for &n in &ns {
        let pn = stage("build_pn", n, build_pn(n, k0, &reg, precision))?;
        let h = ExpProduct::new(Poly::unit_roots_poly(n as usize, precision), pn);
        let bracket_k0 = stage("bracket", n, bracket_lemma(&h, k0, &reg))?;
        let log_cn = compute_log_cn(&h, &bracket_k0, &spec, options);
        let log_an = compute_log_an(&h, n, &log_cn, &spec, options);
        let member = FamilyMember {
            n,
            log_cn,
            log_an,
            h,
        };

        let vanishing = verify::check_vanishing(&member, k0);
        if !vanishing.pass {
            return Err(Error::VerificationFailed {
                stage: "check_vanishing",
                n,
                detail: "bracket values at roots exceed the relative tolerance".to_string(),
            });
        }

        let evaluator = MemberEvaluator::new(&member, k0);
        let region = Region::disk(BigComplex::zero(precision), BigReal::from_u32(2, precision));
        let quotient = verify::grid_sup(
            &evaluator,
            &region,
            k0,
            &spec.alpha,
            options.grid_resolution,
            &spec.log_c(),
        );
        if !quotient.pass {
            return Err(Error::VerificationFailed {
                stage: "grid_sup",
                n,
                detail: format!(
                    "max log quotient {} exceeds log C {} near z = {}",
                    quotient.max_log_quotient.to_f64(),
                    quotient.threshold_log.to_f64(),
                    quotient.argmax
                ),
            });
        }

        members.push(member);
        verification.push(MemberVerification {
            vanishing,
            quotient,
        });
    }

    Ok(ConstructedFamily {
        spec,
        members,
        verification,
    })
}
