//! Confluent (Hermite) interpolation over complex nodes.
//!
//! Given values of a function and its first consecutive derivatives at each
//! node, [`hermite_interpolate`] produces the minimal-degree interpolant by a
//! Newton scheme with confluent divided differences. [`hermite_oracle`]
//! solves the corresponding confluent Vandermonde system by elimination
//! instead; it exists as an independent cross-check and is not used by the
//! construction pipeline.

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, BigReal, Precision};
use crate::poly::Poly;

/// Interpolation data: distinct nodes, and per node the prescribed values of
/// orders `0..m_node`.
#[derive(Clone, Debug)]
pub struct HermiteData {
    nodes: Vec<BigComplex>,
    values: Vec<Vec<BigComplex>>,
}

impl HermiteData {
    pub fn new(nodes: Vec<BigComplex>, values: Vec<Vec<BigComplex>>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::EmptyData);
        }
        if values.iter().any(|v| v.is_empty()) {
            return Err(Error::EmptyData);
        }
        let prec = nodes
            .iter()
            .map(|z| z.precision().bits())
            .max()
            .expect("nonempty");
        let min_sep = BigReal::pow2(-(prec as i32) / 2, Precision::new(prec).unwrap());
        for (i, a) in nodes.iter().enumerate() {
            for b in nodes.iter().skip(i + 1) {
                if (a - b).abs() <= min_sep {
                    return Err(Error::DuplicateNodes);
                }
            }
        }
        Ok(HermiteData { nodes, values })
    }

    pub fn nodes(&self) -> &[BigComplex] {
        &self.nodes
    }

    pub fn values(&self) -> &[Vec<BigComplex>] {
        &self.values
    }

    pub fn total_conditions(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn precision(&self) -> Precision {
        let bits = self
            .nodes
            .iter()
            .map(|z| z.precision().bits())
            .chain(
                self.values
                    .iter()
                    .flatten()
                    .map(|v| v.precision().bits()),
            )
            .max()
            .expect("nonempty");
        Precision::new(bits).expect("precision below minimum")
    }
}

/// Newton-form interpolant with confluent divided differences.
///
/// Degree is at most `total_conditions - 1` and every prescribed derivative
/// is reproduced (up to roundoff at working precision).
pub fn hermite_interpolate(data: &HermiteData) -> Result<Poly> {
    let prec = data.precision();
    let m = data.total_conditions();

    // flatten: node index per row, repeated once per prescribed order
    let mut node_of = Vec::with_capacity(m);
    for (l, vals) in data.values().iter().enumerate() {
        node_of.extend(std::iter::repeat(l).take(vals.len()));
    }
    let xs: Vec<&BigComplex> = node_of.iter().map(|&l| &data.nodes()[l]).collect();

    // factorials up to the largest prescribed order
    let max_orders = data.values().iter().map(Vec::len).max().unwrap();
    let mut factorial = vec![BigReal::one(prec)];
    for j in 1..max_orders {
        factorial.push(&factorial[j - 1] * &BigReal::from_usize(j, prec));
    }

    let mut col: Vec<BigComplex> = node_of
        .iter()
        .map(|&l| data.values()[l][0].clone())
        .collect();
    let mut newton_coeffs = vec![col[0].clone()];
    for j in 1..m {
        let mut next = Vec::with_capacity(m - j);
        for i in 0..m - j {
            let entry = if node_of[i] == node_of[i + j] {
                // all abscissas in between coincide: the divided difference
                // is the prescribed j-th derivative over j!
                data.values()[node_of[i]][j]
                    .scale(&(BigReal::one(prec) / &factorial[j]))
            } else {
                let num = &col[i + 1] - &col[i];
                let den = xs[i + j] - xs[i];
                &num / &den
            };
            next.push(entry);
        }
        newton_coeffs.push(next[0].clone());
        col = next;
    }

    // expand the Newton form into monomial coefficients
    let mut q = Poly::constant(newton_coeffs[m - 1].clone());
    for j in (0..m - 1).rev() {
        let linear = Poly::from_coeffs(vec![-xs[j], BigComplex::one(prec)]);
        q = &(&q * &linear) + &Poly::constant(newton_coeffs[j].clone());
    }
    Ok(q)
}

/// Independent oracle: assemble the confluent Vandermonde system in the
/// monomial basis and solve it by Gaussian elimination with partial pivoting.
pub fn hermite_oracle(data: &HermiteData) -> Result<Poly> {
    let prec = data.precision();
    let m = data.total_conditions();

    let mut matrix: Vec<Vec<BigComplex>> = Vec::with_capacity(m);
    let mut rhs: Vec<BigComplex> = Vec::with_capacity(m);
    for (l, vals) in data.values().iter().enumerate() {
        let z = &data.nodes()[l];
        // powers z^0..z^{m-1}
        let mut powers = Vec::with_capacity(m);
        powers.push(BigComplex::one(prec));
        for i in 1..m {
            powers.push(&powers[i - 1] * z);
        }
        for (j, v) in vals.iter().enumerate() {
            let mut row = vec![BigComplex::zero(prec); m];
            for (i, cell) in row.iter_mut().enumerate().skip(j) {
                // d^j/dz^j z^i = i (i-1) ... (i-j+1) z^{i-j}
                let mut fall = BigReal::one(prec);
                for t in 0..j {
                    fall = &fall * &BigReal::from_usize(i - t, prec);
                }
                *cell = powers[i - j].scale(&fall);
            }
            matrix.push(row);
            rhs.push(v.clone());
        }
    }

    solve_dense(matrix, rhs, prec).map(Poly::from_coeffs)
}

/// Gaussian elimination with partial pivoting over [`BigComplex`].
fn solve_dense(
    mut a: Vec<Vec<BigComplex>>,
    mut b: Vec<BigComplex>,
    prec: Precision,
) -> Result<Vec<BigComplex>> {
    let m = a.len();
    let scale = a
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(BigReal::zero(prec), |acc, v| acc.max(&v));
    let floor = &scale * &BigReal::pow2(-(3 * prec.bits() as i32) / 4, prec);

    for col in 0..m {
        let (pivot_row, pivot_abs) = (col..m)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|(_, x), (_, y)| x.cmp_total(y))
            .expect("nonempty");
        if pivot_abs.is_zero() || pivot_abs <= floor {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);

        let inv = a[col][col].recip();
        for r in col + 1..m {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..m {
                a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
            }
            b[r] = &b[r] - &(&factor * &b[col]);
        }
    }

    let mut x = vec![BigComplex::zero(prec); m];
    for row in (0..m).rev() {
        let mut acc = b[row].clone();
        for c in row + 1..m {
            acc = &acc - &(&a[row][c] * &x[c]);
        }
        x[row] = &acc / &a[row][row];
    }
    Ok(x)
}

/// Largest relative residual `|q^(j)(node) - value| / (1 + |value|)` over all
/// prescribed conditions.
pub fn max_relative_residual(data: &HermiteData, q: &Poly) -> BigReal {
    let prec = data.precision();
    let mut worst = BigReal::zero(prec);
    for (l, vals) in data.values().iter().enumerate() {
        let mut deriv = q.clone();
        for v in vals {
            let err = (&deriv.eval(&data.nodes()[l]) - v).abs();
            let rel = &err / &(&BigReal::one(prec) + &v.abs());
            worst = worst.max(&rel);
            deriv = deriv.derivative();
        }
    }
    worst
}
