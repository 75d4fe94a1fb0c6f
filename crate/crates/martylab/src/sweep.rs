//! Deterministic search primitives used by every sweep in the crate.
//!
//! Scans are data-parallel over point indices when the `parallel` feature is
//! enabled (the default) and plain loops otherwise; both paths are always
//! compiled when the feature is on so benchmarks can compare them. Reductions
//! carry the sample index and break value ties toward the smaller index, so
//! the result is independent of the reduction order and runs are reproducible
//! bit for bit.

use crate::numerics::BigReal;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Best sample of a scan: its flat index and value.
#[derive(Clone, Debug)]
pub struct ScanHit {
    pub index: usize,
    pub value: BigReal,
}

/// Outcome of a filtered scan: best accepted sample plus how many were accepted.
#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub best: Option<ScanHit>,
    pub evaluated: usize,
}

fn better(a: ScanHit, b: ScanHit) -> ScanHit {
    match a.value.cmp_total(&b.value) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.index <= b.index {
                a
            } else {
                b
            }
        }
    }
}

fn combine(a: ScanOutcome, b: ScanOutcome) -> ScanOutcome {
    ScanOutcome {
        best: match (a.best, b.best) {
            (Some(x), Some(y)) => Some(better(x, y)),
            (x, None) => x,
            (None, y) => y,
        },
        evaluated: a.evaluated + b.evaluated,
    }
}

fn outcome_of<F: Fn(usize) -> Option<BigReal>>(f: &F, i: usize) -> ScanOutcome {
    match f(i) {
        Some(value) => ScanOutcome {
            best: Some(ScanHit { index: i, value }),
            evaluated: 1,
        },
        None => ScanOutcome {
            best: None,
            evaluated: 0,
        },
    }
}

/// Sequential filtered max scan.
pub fn scan_filtered_max_seq<F>(count: usize, f: F) -> ScanOutcome
where
    F: Fn(usize) -> Option<BigReal> + Sync + Send,
{
    (0..count).fold(
        ScanOutcome {
            best: None,
            evaluated: 0,
        },
        |acc, i| combine(acc, outcome_of(&f, i)),
    )
}

/// Parallel filtered max scan.
#[cfg(feature = "parallel")]
pub fn scan_filtered_max_par<F>(count: usize, f: F) -> ScanOutcome
where
    F: Fn(usize) -> Option<BigReal> + Sync + Send,
{
    (0..count)
        .into_par_iter()
        .map(|i| outcome_of(&f, i))
        .reduce(
            || ScanOutcome {
                best: None,
                evaluated: 0,
            },
            combine,
        )
}

/// Filtered max scan on the default execution path.
pub fn scan_filtered_max<F>(count: usize, f: F) -> ScanOutcome
where
    F: Fn(usize) -> Option<BigReal> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        scan_filtered_max_par(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        scan_filtered_max_seq(count, f)
    }
}

/// Evaluate `f` at every index, sequentially.
pub fn scan_values_seq<F>(count: usize, f: F) -> Vec<BigReal>
where
    F: Fn(usize) -> BigReal + Sync + Send,
{
    (0..count).map(f).collect()
}

/// Evaluate `f` at every index, in parallel (order preserved).
#[cfg(feature = "parallel")]
pub fn scan_values_par<F>(count: usize, f: F) -> Vec<BigReal>
where
    F: Fn(usize) -> BigReal + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

/// Evaluate `f` at every index on the default execution path.
pub fn scan_values<F>(count: usize, f: F) -> Vec<BigReal>
where
    F: Fn(usize) -> BigReal + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        scan_values_par(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        scan_values_seq(count, f)
    }
}

/// Indices of the `k` largest values, ordered by value descending with index
/// ascending among ties.
pub fn top_candidates(values: &[BigReal], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .cmp_total(&values[a])
            .then_with(|| a.cmp(&b))
    });
    order.truncate(k);
    order
}

/// Golden-section maximization of a scalar function on `[lo, hi]`.
///
/// Runs a fixed number of interval reductions and returns the best sampled
/// point and value; callers follow it with a safety factor, never trusting the
/// search to be exact.
pub fn golden_max<F>(f: F, lo: &BigReal, hi: &BigReal, iterations: usize) -> (BigReal, BigReal)
where
    F: Fn(&BigReal) -> BigReal,
{
    let prec = lo.precision();
    let inv_phi = (BigReal::from_u32(5, prec).sqrt() - BigReal::one(prec))
        / BigReal::from_u32(2, prec);
    let mut a = lo.clone();
    let mut b = hi.clone();
    let mut x1 = &b - &(&inv_phi * &(&b - &a));
    let mut x2 = &a + &(&inv_phi * &(&b - &a));
    let mut f1 = f(&x1);
    let mut f2 = f(&x2);
    let (mut best_x, mut best_v) = if f1 >= f2 {
        (x1.clone(), f1.clone())
    } else {
        (x2.clone(), f2.clone())
    };
    for _ in 0..iterations {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = &b - &(&inv_phi * &(&b - &a));
            f1 = f(&x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = &a + &(&inv_phi * &(&b - &a));
            f2 = f(&x2);
        }
        let (x, v) = if f1 >= f2 { (&x1, &f1) } else { (&x2, &f2) };
        if *v > best_v {
            best_x = x.clone();
            best_v = v.clone();
        }
    }
    (best_x, best_v)
}
