//! Sparse multivariate polynomials with exact integer coefficients.
//!
//! These carry the universal polynomials of the bracket calculus: the two
//! variable families `x_1, x_2, ...` (derivatives of the exponent polynomial)
//! and `y_1, y_2, ...` (derivatives of the polynomial factor). All arithmetic
//! is exact, so identities checked against them are exact, not approximate.

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, Precision};
use crate::poly::Poly;
use rug::Integer;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// A variable: `X(m)` prints as `x_m`, `Y(m)` as `y_m` (indices start at 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X(u32),
    Y(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(m) => write!(f, "x_{m}"),
            Var::Y(m) => write!(f, "y_{m}"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad variable name `{s}` (want x_<i> or y_<i>)"));
        let (family, index) = s.split_once('_').ok_or_else(bad)?;
        let index: u32 = index.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        match family {
            "x" => Ok(Var::X(index)),
            "y" => Ok(Var::Y(index)),
            _ => Err(bad()),
        }
    }
}

/// Product of variable powers; no zero exponents stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<Var, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        let mut m = BTreeMap::new();
        m.insert(v, 1);
        Monomial(m)
    }

    /// Build from (variable, exponent) pairs; zero exponents are dropped.
    pub fn from_exponents<I: IntoIterator<Item = (Var, u32)>>(iter: I) -> Self {
        Monomial(iter.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn exponents(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().map(|(&v, &e)| (v, e))
    }

    pub fn exponent_of(&self, v: Var) -> u32 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (&v, &e) in &other.0 {
            *m.entry(v).or_insert(0) += e;
        }
        Monomial(m)
    }

    fn without_one_power(&self, v: Var) -> Self {
        let mut m = self.0.clone();
        match m.get_mut(&v) {
            Some(e) if *e > 1 => *e -= 1,
            Some(_) => {
                m.remove(&v);
            }
            None => unreachable!("caller checked the exponent"),
        }
        Monomial(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial over the integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Integer>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Monomial::one(), Integer::from(c));
        }
        MultiPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), Integer::from(1));
        MultiPoly { terms }
    }

    /// Build from explicit terms, combining duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Integer)>>(iter: I) -> Self {
        let mut out = MultiPoly::zero();
        for (m, c) in iter {
            out.insert_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Integer)> {
        self.terms.iter()
    }

    /// All variables that actually occur.
    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.exponents().map(|(v, _)| v))
            .collect()
    }

    fn insert_term(&mut self, mono: Monomial, coeff: Integer) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), Integer::from(ca * cb));
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: i64) -> Self {
        if c == 0 {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), Integer::from(v * c)))
                .collect(),
        }
    }

    pub fn mul_var(&self, v: Var) -> Self {
        self.mul(&MultiPoly::var(v))
    }

    /// Formal partial derivative. Variables absent from a term (or from the
    /// whole polynomial) differentiate to zero.
    pub fn partial(&self, v: Var) -> Self {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e == 0 {
                continue;
            }
            out.insert_term(m.without_one_power(v), Integer::from(c * e));
        }
        out
    }

    /// Evaluate with complex values for the variables.
    pub fn eval(&self, assignment: &BTreeMap<Var, BigComplex>, prec: Precision) -> Result<BigComplex> {
        let mut acc = BigComplex::zero(prec);
        for (m, c) in &self.terms {
            let mut term = BigComplex::from_real(crate::numerics::BigReal::from_integer(c, prec));
            for (v, e) in m.exponents() {
                let val = assignment
                    .get(&v)
                    .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                for _ in 0..e {
                    term = &term * val;
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Evaluate with univariate polynomials substituted for the variables.
    pub fn eval_poly(&self, assignment: &BTreeMap<Var, Poly>, prec: Precision) -> Result<Poly> {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(BigComplex::from_real(
                crate::numerics::BigReal::from_integer(c, prec),
            ));
            for (v, e) in m.exponents() {
                let val = assignment
                    .get(&v)
                    .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                for _ in 0..e {
                    term = &term * val;
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if first {
                write!(f, "{c}*{m}")?;
                first = false;
            } else if *c < 0 {
                write!(f, " - {}*{m}", Integer::from(-c.clone()))?;
            } else {
                write!(f, " + {c}*{m}")?;
            }
        }
        Ok(())
    }
}
