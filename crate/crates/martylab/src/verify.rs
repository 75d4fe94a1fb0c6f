//! Grid-based diagnostics: Marty-type quotients, spherical derivatives,
//! vanishing checks and non-normality witnesses.
//!
//! Everything works through the [`Evaluator`] abstraction, a pure map from
//! (point, derivative order) to a log-domain value, so the same sweeps apply
//! to constructed family members and to closed-form exemplar families alike.

use crate::construct::{ConstructedFamily, FamilyMember};
use crate::error::{Error, Result};
use crate::expcalc::{bracket_direct, BracketSeries, ExpProduct};
use crate::numerics::{BigComplex, BigReal, LogComplex, Precision};
use crate::poly::{roots_of_unity, unit_circle_point};
use crate::sweep;

/// A holomorphic function exposed through log-domain derivative evaluation.
///
/// Implementations must be pure: concurrent calls from sweep workers see no
/// shared mutable state.
pub trait Evaluator: Send + Sync {
    /// Log-domain value of the `order`-th derivative at `z`.
    fn eval_log(&self, z: &BigComplex, order: u32) -> LogComplex;

    fn label(&self) -> &str;

    /// Human-readable description of the natural domain.
    fn domain_desc(&self) -> &str;

    /// `log |f^(k)(z)| - log(1 + |f(z)|^alpha)` in one call. Implementations
    /// with shared structure between orders may override this sweep hot path;
    /// the result must match the two-evaluation default.
    fn quotient_log_mag(&self, z: &BigComplex, k: u32, alpha: &BigReal) -> BigReal {
        let numerator = self.eval_log(z, k);
        let denominator = self.eval_log(z, 0).softplus_alpha(alpha);
        numerator.log_mag() - &denominator
    }
}

/// Scaled exp-product member `exp(log_scale) * g * e^p` with its zero set
/// known exactly: evaluation at a stored root short-circuits to the exact-zero
/// sentinel, as the construction places genuine zeros there.
pub struct MemberEvaluator {
    label: String,
    domain: String,
    log_scale: BigReal,
    series: BracketSeries,
    roots: Vec<BigComplex>,
}

impl MemberEvaluator {
    /// Wrap a constructed member, precomputing brackets (direct recursion) up
    /// to `max_order`.
    pub fn new(member: &FamilyMember, max_order: u32) -> Self {
        Self::from_parts(member.n, &member.h, member.log_an.clone(), max_order)
    }

    pub fn from_parts(n: u32, h: &ExpProduct, log_scale: BigReal, max_order: u32) -> Self {
        let prec = log_scale.precision();
        MemberEvaluator {
            label: format!("member n={n}"),
            domain: "closed disk |z| <= 2".to_string(),
            log_scale,
            series: BracketSeries::direct(h, max_order),
            roots: roots_of_unity(n as usize, prec),
        }
    }

    pub fn max_order(&self) -> u32 {
        self.series.max_order()
    }
}

impl Evaluator for MemberEvaluator {
    fn eval_log(&self, z: &BigComplex, order: u32) -> LogComplex {
        if order == 0 && self.roots.iter().any(|r| r == z) {
            return LogComplex::zero(z.precision());
        }
        self.series.eval_log(order, z, &self.log_scale)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn domain_desc(&self) -> &str {
        &self.domain
    }

    fn quotient_log_mag(&self, z: &BigComplex, k: u32, alpha: &BigReal) -> BigReal {
        let mut mags = self
            .series
            .eval_log_mags(&[k, 0], z, &self.log_scale)
            .into_iter();
        let log_fk = mags.next().expect("two orders requested");
        let mut log_f = mags.next().expect("two orders requested");
        if self.roots.iter().any(|r| r == z) {
            log_f = BigReal::neg_infinity(z.precision());
        }
        &log_fk - &crate::numerics::softplus_log_mag(&log_f, alpha)
    }
}

/// The exemplar family `f_n(z) = n (e^z - e^{zeta z})`, `zeta = e^{2 pi i/k}`,
/// with all derivatives in closed form: `f_n^(j) = n (e^z - zeta^j e^{zeta z})`.
/// It satisfies `f_n^(k) = f_n`, so the quotient with exponent 1 stays below
/// 1, while all members share the zeros `2 pi i j / (1 - zeta)`.
pub struct Remark3Evaluator {
    n: u32,
    k: u32,
    zeta: BigComplex,
    label: String,
    domain: String,
    prec: Precision,
}

impl Remark3Evaluator {
    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn zeta(&self) -> &BigComplex {
        &self.zeta
    }

    /// The strip `-1 < Re((1 - zeta) z) < 1` clipped to `|z| <= clip_radius`.
    pub fn strip_region(&self, clip_radius: BigReal) -> Region {
        let direction = &BigComplex::one(self.prec) - &self.zeta;
        Region::strip(direction, BigReal::one(self.prec), clip_radius)
    }
}

/// Build the exemplar family evaluator (`k >= 2`, `n >= 1`).
pub fn remark3_family(k: u32, n: u32, prec: Precision) -> Result<Remark3Evaluator> {
    if k < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "remark3 family needs k >= 2 and n >= 1, got k={k}, n={n}"
        )));
    }
    Ok(Remark3Evaluator {
        n,
        k,
        zeta: unit_circle_point(1, k as u64, prec),
        label: format!("n(e^z - e^(zeta z)) with k={k}, n={n}"),
        domain: "strip -1 < Re((1 - zeta) z) < 1".to_string(),
        prec,
    })
}

impl Evaluator for Remark3Evaluator {
    fn eval_log(&self, z: &BigComplex, order: u32) -> LogComplex {
        let bits = z.precision().bits().max(self.prec.bits());
        let prec = Precision::new(bits).unwrap();
        let log_n = BigReal::from_u32(self.n, prec).ln();
        // n e^z
        let first = LogComplex::from_polar_log(&log_n + &z.re, z.im.clone());
        // -n zeta^order e^{zeta z}
        let mut coeff = -&BigComplex::one(prec);
        for _ in 0..order {
            coeff = &coeff * &self.zeta;
        }
        let zz = &self.zeta * z;
        let second = LogComplex::from_polar_log(
            &(&log_n + &coeff.abs().ln()) + &zz.re,
            &coeff.arg() + &zz.im,
        );
        first.add(&second)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn domain_desc(&self) -> &str {
        &self.domain
    }
}

// ---------------------------------------------------------------------------
// Quotients
// ---------------------------------------------------------------------------

/// `log |f^(k)(z)| - log(1 + |f(z)|^alpha)`; `-inf` when the derivative
/// vanishes exactly.
pub fn marty_quotient(f: &dyn Evaluator, z: &BigComplex, k: u32, alpha: &BigReal) -> BigReal {
    assert!(k >= 1, "marty_quotient needs k >= 1");
    f.quotient_log_mag(z, k, alpha)
}

/// `log f#(z) = log |f'(z)| - log(1 + |f(z)|^2)`.
pub fn spherical_derivative(f: &dyn Evaluator, z: &BigComplex) -> BigReal {
    let two = BigReal::from_u32(2, z.precision());
    marty_quotient(f, z, 1, &two)
}

// ---------------------------------------------------------------------------
// Regions and grid sweeps
// ---------------------------------------------------------------------------

/// Geometric region sampled by [`grid_sup`]; membership is closed (boundary
/// points included).
#[derive(Clone, Debug)]
pub enum RegionKind {
    Disk {
        center: BigComplex,
        radius: BigReal,
    },
    Annulus {
        center: BigComplex,
        inner: BigReal,
        outer: BigReal,
    },
    Rect {
        re_min: BigReal,
        re_max: BigReal,
        im_min: BigReal,
        im_max: BigReal,
    },
    /// `|Re(direction * z)| <= bound`, clipped to `|z| <= clip_radius`.
    Strip {
        direction: BigComplex,
        bound: BigReal,
        clip_radius: BigReal,
    },
}

/// A region with an optional origin-centered open annulus to skip (used to
/// avoid sampling removable singularities).
#[derive(Clone, Debug)]
pub struct Region {
    pub kind: RegionKind,
    pub exclusion: Option<(BigReal, BigReal)>,
}

impl Region {
    pub fn disk(center: BigComplex, radius: BigReal) -> Self {
        Region {
            kind: RegionKind::Disk { center, radius },
            exclusion: None,
        }
    }

    pub fn annulus(center: BigComplex, inner: BigReal, outer: BigReal) -> Self {
        Region {
            kind: RegionKind::Annulus {
                center,
                inner,
                outer,
            },
            exclusion: None,
        }
    }

    pub fn strip(direction: BigComplex, bound: BigReal, clip_radius: BigReal) -> Self {
        Region {
            kind: RegionKind::Strip {
                direction,
                bound,
                clip_radius,
            },
            exclusion: None,
        }
    }

    pub fn with_exclusion(mut self, inner: BigReal, outer: BigReal) -> Self {
        self.exclusion = Some((inner, outer));
        self
    }

    /// Bounding box as (re_min, re_max, im_min, im_max).
    pub fn bounding_box(&self) -> (BigReal, BigReal, BigReal, BigReal) {
        match &self.kind {
            RegionKind::Disk { center, radius } => (
                &center.re - radius,
                &center.re + radius,
                &center.im - radius,
                &center.im + radius,
            ),
            RegionKind::Annulus { center, outer, .. } => (
                &center.re - outer,
                &center.re + outer,
                &center.im - outer,
                &center.im + outer,
            ),
            RegionKind::Rect {
                re_min,
                re_max,
                im_min,
                im_max,
            } => (
                re_min.clone(),
                re_max.clone(),
                im_min.clone(),
                im_max.clone(),
            ),
            RegionKind::Strip { clip_radius, .. } => (
                -clip_radius.clone(),
                clip_radius.clone(),
                -clip_radius.clone(),
                clip_radius.clone(),
            ),
        }
    }

    pub fn contains(&self, z: &BigComplex) -> bool {
        if let Some((inner, outer)) = &self.exclusion {
            let r = z.abs();
            if &r > inner && &r < outer {
                return false;
            }
        }
        match &self.kind {
            RegionKind::Disk { center, radius } => (z - center).abs() <= *radius,
            RegionKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = (z - center).abs();
                &r >= inner && &r <= outer
            }
            RegionKind::Rect {
                re_min,
                re_max,
                im_min,
                im_max,
            } => z.re >= *re_min && z.re <= *re_max && z.im >= *im_min && z.im <= *im_max,
            RegionKind::Strip {
                direction,
                bound,
                clip_radius,
            } => {
                let proj = (direction * z).re.abs();
                proj <= *bound && z.abs() <= *clip_radius
            }
        }
    }
}

/// Result of a quotient sweep over a region grid.
#[derive(Clone, Debug)]
pub struct GridReport {
    pub resolution: usize,
    pub max_log_quotient: BigReal,
    pub argmax: BigComplex,
    pub threshold_log: BigReal,
    pub pass: bool,
    pub samples_evaluated: usize,
}

/// Sweep `marty_quotient` over a closed `resolution x resolution` grid
/// covering the region's bounding box, skipping points outside the region.
///
/// The reported max never decreases under refinement when the grids nest;
/// power-of-two-plus-one resolutions nest exactly.
pub fn grid_sup(
    f: &dyn Evaluator,
    region: &Region,
    k: u32,
    alpha: &BigReal,
    resolution: usize,
    threshold_log: &BigReal,
) -> GridReport {
    assert!(resolution >= 3, "grid_sup needs resolution >= 3");
    let (re_min, re_max, im_min, im_max) = region.bounding_box();
    let prec = re_min.precision();
    let steps = BigReal::from_usize(resolution - 1, prec);
    let re_step = &(&re_max - &re_min) / &steps;
    let im_step = &(&im_max - &im_min) / &steps;

    let point_at = |flat: usize| {
        let row = flat / resolution;
        let col = flat % resolution;
        BigComplex::new(
            &re_min + &(&BigReal::from_usize(col, prec) * &re_step),
            &im_min + &(&BigReal::from_usize(row, prec) * &im_step),
        )
    };

    let outcome = sweep::scan_filtered_max(resolution * resolution, |flat| {
        let z = point_at(flat);
        region.contains(&z).then(|| marty_quotient(f, &z, k, alpha))
    });

    let (max_log_quotient, argmax) = match outcome.best {
        Some(hit) => (hit.value, point_at(hit.index)),
        None => (BigReal::neg_infinity(prec), BigComplex::zero(prec)),
    };
    let pass = max_log_quotient <= *threshold_log;
    GridReport {
        resolution,
        max_log_quotient,
        argmax,
        threshold_log: threshold_log.clone(),
        pass,
        samples_evaluated: outcome.evaluated,
    }
}

// ---------------------------------------------------------------------------
// Vanishing conditions
// ---------------------------------------------------------------------------

/// One bracket-at-root measurement: `|B_order(root)|` against the scale of
/// the same bracket on a small circle around the root.
#[derive(Clone, Debug)]
pub struct VanishingEntry {
    pub root_index: usize,
    pub order: u32,
    pub bracket_abs: BigReal,
    pub scale: BigReal,
    pub pass: bool,
}

/// Log-log slope of `max |B_k0|` over shrinking circles around a root; `None`
/// when the bracket vanishes identically nearby (infinite multiplicity).
#[derive(Clone, Debug)]
pub struct SlopeEntry {
    pub root_index: usize,
    pub slope: Option<BigReal>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub entries: Vec<VanishingEntry>,
    pub slopes: Vec<SlopeEntry>,
    pub pass: bool,
}

const SCALE_CIRCLE_SAMPLES: usize = 64;

fn max_abs_on_circle(poly: &crate::poly::Poly, center: &BigComplex, radius: &BigReal) -> BigReal {
    let prec = center.precision();
    let mut max = BigReal::zero(prec);
    for i in 0..SCALE_CIRCLE_SAMPLES {
        let dir = unit_circle_point(i as u64, SCALE_CIRCLE_SAMPLES as u64, prec);
        let z = center + &dir.scale(radius);
        max = max.max(&poly.eval(&z).abs());
    }
    max
}

/// Check that `B_j` vanishes at every n-th root of unity for `j = 2..=k0+1`
/// (relative tolerance 1e-8 against the bracket's scale nearby) and that
/// `B_k0` vanishes to order at least 2 at each root (log-log slope >= 1.9
/// over circles of radius 1e-2, 1e-3, 1e-4). Brackets come from the direct
/// recursion, independent of the structural form used by the construction.
pub fn check_vanishing(member: &FamilyMember, k0: u32) -> VanishingReport {
    vanishing_of(&member.h, member.n, k0)
}

pub(crate) fn vanishing_of(h: &ExpProduct, n: u32, k0: u32) -> VanishingReport {
    let prec = h.precision();
    let roots = roots_of_unity(n as usize, prec);
    let tolerance = BigReal::from_f64(1e-8, prec);
    let scale_radius = BigReal::from_ratio(1, 10, prec);
    let one = BigReal::one(prec);

    let mut entries = Vec::new();
    let mut slopes = Vec::new();
    let mut all_pass = true;

    for j in 2..=k0 + 1 {
        let bracket = bracket_direct(h, j);
        for (root_index, root) in roots.iter().enumerate() {
            let bracket_abs = bracket.eval(root).abs();
            let scale = max_abs_on_circle(&bracket, root, &scale_radius);
            let pass = bracket_abs <= &tolerance * &one.max(&scale);
            all_pass &= pass;
            entries.push(VanishingEntry {
                root_index,
                order: j,
                bracket_abs,
                scale,
                pass,
            });
        }
    }

    let bracket = bracket_direct(h, k0);
    let radii: Vec<BigReal> = [-2i32, -3, -4]
        .iter()
        .map(|&e| BigReal::from_f64(10f64.powi(e), prec))
        .collect();
    for (root_index, root) in roots.iter().enumerate() {
        let maxima: Vec<BigReal> = radii
            .iter()
            .map(|r| max_abs_on_circle(&bracket, root, r))
            .collect();
        let (slope, pass) = if maxima.iter().any(|m| m.is_zero()) {
            (None, true)
        } else {
            let xs: Vec<BigReal> = radii.iter().map(BigReal::ln).collect();
            let ys: Vec<BigReal> = maxima.iter().map(BigReal::ln).collect();
            let slope = least_squares_slope(&xs, &ys, prec);
            let pass = slope >= BigReal::from_ratio(19, 10, prec);
            (Some(slope), pass)
        };
        all_pass &= pass;
        slopes.push(SlopeEntry {
            root_index,
            slope,
            pass,
        });
    }

    VanishingReport {
        entries,
        slopes,
        pass: all_pass,
    }
}

fn least_squares_slope(xs: &[BigReal], ys: &[BigReal], prec: Precision) -> BigReal {
    let count = BigReal::from_usize(xs.len(), prec);
    let sum = |vals: &[BigReal]| vals.iter().fold(BigReal::zero(prec), |acc, v| &acc + v);
    let x_mean = &sum(xs) / &count;
    let y_mean = &sum(ys) / &count;
    let mut cov = BigReal::zero(prec);
    let mut var = BigReal::zero(prec);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - &x_mean;
        cov = &cov + &(&dx * &(y - &y_mean));
        var = &var + &dx.square();
    }
    &cov / &var
}

// ---------------------------------------------------------------------------
// Non-normality witnesses
// ---------------------------------------------------------------------------

/// Numerical witness that no subsequence can converge near the unit circle:
/// exact zeros on it, next to uniformly large modulus just inside it.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub n: u32,
    pub zeros_exact: bool,
    pub min_log_modulus: BigReal,
    pub log_n: BigReal,
    pub pass: bool,
}

const WITNESS_CIRCLE_SAMPLES: usize = 1024;

/// Check member `n >= 2`: `f_n` hits the exact-zero sentinel at all n-th
/// roots of unity, while `log |f_n| >= log n` on the circle `|z| = 1 - 1/n`.
pub fn nonnormality_witness(family: &ConstructedFamily, n: u32) -> Result<WitnessReport> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "witness needs n >= 2, got {n}"
        )));
    }
    let member = family
        .members
        .iter()
        .find(|m| m.n == n)
        .ok_or_else(|| Error::InvalidParameter(format!("no member with n={n}")))?;
    let prec = family.spec.precision;
    let eval = MemberEvaluator::new(member, 0);

    let zeros_exact = roots_of_unity(n as usize, prec)
        .iter()
        .all(|root| eval.eval_log(root, 0).is_zero());

    let radius = BigReal::from_ratio(n as i64 - 1, n as i64, prec);
    let values = sweep::scan_values(WITNESS_CIRCLE_SAMPLES, |i| {
        let z = unit_circle_point(i as u64, WITNESS_CIRCLE_SAMPLES as u64, prec).scale(&radius);
        eval.eval_log(&z, 0).log_mag().clone()
    });
    let min_log_modulus = values.into_iter().reduce(|a, b| a.min(&b)).expect("nonempty");

    let log_n = BigReal::from_u32(n, prec).ln();
    let pass = zeros_exact && min_log_modulus >= log_n;
    Ok(WitnessReport {
        n,
        zeros_exact,
        min_log_modulus,
        log_n,
        pass,
    })
}

/// Max spherical derivative over the unit circle, sampled at a multiple of
/// `align` points so that the align-th roots of unity land on exact sample
/// points (where member evaluators report their genuine zeros).
pub fn max_spherical_on_unit_circle(
    f: &dyn Evaluator,
    min_samples: usize,
    align: u32,
    prec: Precision,
) -> BigReal {
    let align = align.max(1) as usize;
    let samples = align * min_samples.div_ceil(align);
    let values = sweep::scan_values(samples, |i| {
        let z = unit_circle_point(i as u64, samples as u64, prec);
        spherical_derivative(f, &z)
    });
    values.into_iter().reduce(|a, b| a.max(&b)).expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn p() -> Precision {
        Precision::default()
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64s(re, im, p())
    }

    /// Constant-value evaluator with vanishing derivatives.
    struct ConstEvaluator {
        value: LogComplex,
    }

    impl Evaluator for ConstEvaluator {
        fn eval_log(&self, z: &BigComplex, order: u32) -> LogComplex {
            if order == 0 {
                self.value.clone()
            } else {
                LogComplex::zero(z.precision())
            }
        }
        fn label(&self) -> &str {
            "constant"
        }
        fn domain_desc(&self) -> &str {
            "plane"
        }
    }

    /// Unscaled exp-product evaluator without root knowledge (plain brackets).
    struct PlainEvaluator {
        series: BracketSeries,
    }

    impl PlainEvaluator {
        fn new(h: &ExpProduct, max_order: u32) -> Self {
            PlainEvaluator {
                series: BracketSeries::direct(h, max_order),
            }
        }
    }

    impl Evaluator for PlainEvaluator {
        fn eval_log(&self, z: &BigComplex, order: u32) -> LogComplex {
            self.series.eval_log(order, z, &BigReal::zero(z.precision()))
        }
        fn label(&self) -> &str {
            "exp-product"
        }
        fn domain_desc(&self) -> &str {
            "plane"
        }
    }

    // ---- quotients ----

    #[test]
    fn quotient_of_zero_function_is_neg_infinity() {
        let f = ConstEvaluator {
            value: LogComplex::zero(p()),
        };
        let q = marty_quotient(&f, &c(0.3, 0.1), 2, &BigReal::from_u32(3, p()));
        assert!(q.is_neg_infinity());
    }

    #[test]
    fn quotient_with_vanishing_value_and_unit_derivative() {
        // |f(z)| = 0, |f'(z)| = 1: log(1/(1+0)) = 0
        let h = ExpProduct::new(
            Poly::from_coeffs(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            Poly::zero(),
        );
        let f = PlainEvaluator::new(&h, 1);
        let q = marty_quotient(&f, &c(0.0, 0.0), 1, &BigReal::from_u32(2, p()));
        assert!(q.is_zero());
    }

    #[test]
    fn spherical_derivative_equals_quotient_alpha_two() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = ExpProduct::new(
            Poly::from_coeffs(vec![c(-1.0, 0.5), c(0.0, 0.0), c(1.0, 0.0)]),
            Poly::from_coeffs(vec![c(0.0, 0.0), c(0.5, -0.25)]),
        );
        let f = PlainEvaluator::new(&h, 1);
        for _ in 0..25 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let a = spherical_derivative(&f, &z);
            let b = marty_quotient(&f, &z, 1, &BigReal::from_u32(2, p()));
            assert!((&a - &b).abs() <= BigReal::pow2(-248, p()));
        }
    }

    // ---- regions and grids ----

    #[test]
    fn disk_membership_is_closed() {
        let region = Region::disk(BigComplex::zero(p()), BigReal::one(p()));
        assert!(region.contains(&c(1.0, 0.0)));
        assert!(region.contains(&c(0.0, -1.0)));
        assert!(!region.contains(&c(1.0, 0.1)));
    }

    #[test]
    fn exclusion_annulus_is_open() {
        let region = Region::disk(BigComplex::zero(p()), BigReal::from_u32(2, p()))
            .with_exclusion(BigReal::from_f64(0.98, p()), BigReal::from_f64(1.02, p()));
        assert!(region.contains(&c(0.98, 0.0)));
        assert!(region.contains(&c(1.02, 0.0)));
        assert!(!region.contains(&c(1.0, 0.0)));
    }

    #[test]
    fn zero_function_passes_any_positive_threshold() {
        let f = ConstEvaluator {
            value: LogComplex::zero(p()),
        };
        let region = Region::disk(BigComplex::zero(p()), BigReal::one(p()));
        let report = grid_sup(
            &f,
            &region,
            1,
            &BigReal::from_u32(2, p()),
            33,
            &BigReal::one(p()).ln(),
        );
        assert!(report.pass);
        assert!(report.max_log_quotient.is_neg_infinity());
        assert!(report.samples_evaluated > 0);
    }

    #[test]
    fn nested_grids_never_lose_the_max() {
        let h = ExpProduct::new(
            Poly::from_coeffs(vec![c(0.3, 0.0), c(0.0, 1.5)]),
            Poly::from_coeffs(vec![c(0.0, 0.0), c(0.2, 0.1)]),
        );
        let f = PlainEvaluator::new(&h, 2);
        let region = Region::disk(BigComplex::zero(p()), BigReal::from_u32(2, p()));
        let alpha = BigReal::from_f64(1.5, p());
        let threshold = BigReal::from_u32(100, p());
        let coarse = grid_sup(&f, &region, 2, &alpha, 33, &threshold);
        let fine = grid_sup(&f, &region, 2, &alpha, 65, &threshold);
        assert!(fine.max_log_quotient >= coarse.max_log_quotient);
    }

    // ---- remark-3 family ----

    #[test]
    fn remark3_vanishes_at_origin_exactly() {
        for k in [2, 3, 5] {
            for n in [1, 4] {
                let f = remark3_family(k, n, p()).unwrap();
                assert!(f.eval_log(&BigComplex::zero(p()), 0).is_zero());
            }
        }
    }

    #[test]
    fn remark3_kth_derivative_reproduces_function() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for k in [2u32, 3] {
            let f = remark3_family(k, 5, p()).unwrap();
            for _ in 0..50 {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0));
                let v0 = f.eval_log(&z, 0);
                let vk = f.eval_log(&z, k);
                if v0.is_zero() {
                    continue;
                }
                let diff = vk.add(&v0.neg());
                // relative smallness in log domain
                assert!(
                    diff.is_zero()
                        || diff.log_mag() - v0.log_mag() <= BigReal::pow2(-248, p())
                );
            }
        }
    }

    #[test]
    fn remark3_common_zeros() {
        // z_j = 2 pi i j / (1 - zeta) are zeros for every n
        let prec = p();
        for k in [2u32, 3] {
            let f = remark3_family(k, 3, prec).unwrap();
            let one_minus_zeta = &BigComplex::one(prec) - f.zeta();
            let two_pi_i = BigComplex::new(
                BigReal::zero(prec),
                BigReal::pi(prec) * BigReal::from_u32(2, prec),
            );
            for j in -2i64..=2 {
                let zj = &(&two_pi_i * &BigComplex::from_real(BigReal::from_i64(j, prec)))
                    / &one_minus_zeta;
                let v = f.eval_log(&zj, 0);
                // |f(z_j)| relative to the term scale n e^{Re z_j}
                let term_scale = &BigReal::from_u32(3, prec).ln() + &zj.re;
                assert!(v.is_zero() || v.log_mag() - &term_scale <= BigReal::pow2(-240, prec));
            }
        }
    }

    #[test]
    fn remark3_quotient_below_one_on_strip() {
        let f = remark3_family(2, 7, p()).unwrap();
        let region = f.strip_region(BigReal::from_u32(3, p()));
        let report = grid_sup(&f, &region, 2, &BigReal::one(p()), 41, &BigReal::zero(p()));
        assert!(report.pass, "quotient must stay below 1 (log below 0)");
        assert!(report.max_log_quotient < BigReal::zero(p()));
    }

    #[test]
    fn remark3_spherical_derivative_at_origin() {
        // f'(0) = n (1 - zeta); for k = 2 that is 2n
        let n = 6u32;
        let f = remark3_family(2, n, p()).unwrap();
        let s = spherical_derivative(&f, &BigComplex::zero(p()));
        let expect = BigReal::from_u32(2 * n, p()).ln();
        assert!((&s - &expect).abs() < BigReal::from_f64(1e-60, p()));
    }

    // ---- evaluator consistency ----

    #[test]
    fn finite_difference_consistency_of_shipped_evaluators() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let bits = Precision::DEFAULT_BITS as i32;
        let step = BigReal::pow2(-bits / 3, p());
        let tol = BigReal::from_f64(1e-6, p());
        let h = ExpProduct::new(
            Poly::from_coeffs(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            Poly::from_coeffs(vec![c(0.0, 0.0), c(0.3, 0.0), c(-0.1, 0.2)]),
        );
        let evaluators: Vec<Box<dyn Evaluator>> = vec![
            Box::new(PlainEvaluator::new(&h, 1)),
            Box::new(remark3_family(2, 4, p()).unwrap()),
        ];
        for f in &evaluators {
            for _ in 0..10 {
                let z = c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
                let zp = BigComplex::new(&z.re + &step, z.im.clone());
                let zm = BigComplex::new(&z.re - &step, z.im.clone());
                let num = f.eval_log(&zp, 0).add(&f.eval_log(&zm, 0).neg());
                let fd = num.scale_log(&-(&step + &step).ln());
                let d = f.eval_log(&z, 1);
                let err = fd.add(&d.neg());
                // |fd - f'| <= tol * (1 + |f'|)
                let bound = &tol * &(&BigReal::one(p()) + &d.log_mag().exp());
                assert!(
                    err.is_zero() || err.log_mag() <= &bound.ln(),
                    "finite difference check failed for {}",
                    f.label()
                );
            }
        }
    }
}
