//! Sparse multivariate polynomials with exact coefficients.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, so a
//! polynomial never needs to know how many variables it lives over.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rational_string, Module, Rational, Ring, Scalar};

pub type Monomial = Vec<u32>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn monomial_mul(a: &[u32], b: &[u32]) -> Monomial {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, e) in out.iter_mut().zip(short) {
        *o += e;
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn constant(c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Polynomial { terms }
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(i: usize) -> Self {
        Self::monomial(S::one(), {
            let mut m = vec![0; i + 1];
            m[i] = 1;
            m
        })
    }

    pub fn monomial(c: S, exps: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(trim(exps), c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(trim(m), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// One more than the largest variable index that occurs.
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Vec::is_empty)
    }

    pub fn constant_term(&self) -> S {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(S::zero)
    }

    pub fn coefficient(&self, exps: &[u32]) -> S {
        self.terms.get(&trim(exps.to_vec())).cloned().unwrap_or_else(S::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[var] -= 1;
            out.add_term(trim(m2), c.clone() * S::from_int(e as i64));
        }
        out
    }

    pub fn evaluate(&self, point: &[S]) -> Result<S> {
        let needed = self.num_vars();
        if point.len() < needed {
            return Err(Error::DimensionMismatch { expected: needed, got: point.len() });
        }
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    t = t * x.powi(e);
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Substitutes `subs[i]` for variable `i`; variables past `subs.len()`
    /// must not occur.
    pub fn compose(&self, subs: &[Polynomial<S>]) -> Result<Self> {
        let needed = self.num_vars();
        if subs.len() < needed {
            return Err(Error::DimensionMismatch { expected: needed, got: subs.len() });
        }
        let mut powers: Vec<Vec<Polynomial<S>>> = vec![vec![Self::one()]; needed];
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap().clone() * subs[v].clone();
                    powers[v].push(next);
                }
                t = t * powers[v][e as usize].clone();
            }
            out = out + t;
        }
        Ok(out)
    }

    /// Replaces variable `var` by the constant `value`.
    pub fn substitute(&self, var: usize, value: &S) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            let mut m2 = m.clone();
            if e > 0 {
                m2[var] = 0;
            }
            out.add_term(trim(m2), c.clone() * value.powi(e));
        }
        out
    }

    /// `den^d · p(var := num/den)` where `d` is the degree of `p` in `var`.
    ///
    /// The result is a polynomial that vanishes exactly when `p` does on the
    /// locus `den ≠ 0`.
    pub fn substitute_fraction(&self, var: usize, num: &Self, den: &Self) -> Self {
        let d = self.degree_in(var);
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            let mut rest = m.clone();
            if e > 0 {
                rest[var] = 0;
            }
            let mut t = Self::monomial(c.clone(), rest);
            t = t * pow(num, e) * pow(den, d - e);
            out = out + t;
        }
        out
    }

    /// Keeps only the monomials in which no variable `>= n` occurs, i.e.
    /// sets those variables to zero.
    pub fn truncate_vars(&self, n: usize) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.len() <= n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Shifts variable indices down by `offset`, dropping monomials that use
    /// any variable below `offset`.
    pub fn shift_vars_down(&self, offset: usize) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().take(offset).all(|&e| e == 0))
                .map(|(m, c)| (trim(m.iter().skip(offset).copied().collect()), c.clone()))
                .collect(),
        }
    }

    /// The weighted degree `w` with `p(δ_λ x) = λ^w p(x)`, where `δ_λ`
    /// scales variable `i` by `λ^{weights[i]}`. `None` for the zero
    /// polynomial or when monomials of different weight occur.
    pub fn homogeneous_weight(&self, weights: &[u32]) -> Option<u32> {
        let mut found = None;
        for m in self.terms.keys() {
            if m.len() > weights.len() {
                return None;
            }
            let w: u32 = m.iter().zip(weights).map(|(e, w)| e * w).sum();
            match found {
                None => found = Some(w),
                Some(prev) if prev != w => return None,
                _ => {}
            }
        }
        found
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, name: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Print higher-degree monomials first.
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (m, c)) in entries.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = if negative { -c.clone() } else { c.clone() };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { name(v) } else { format!("{}^{}", name(v), e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, vars.join("*"))?;
            }
        }
        Ok(())
    }

    pub fn display_with<'a>(&'a self, name: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        struct D<'a, S>(&'a Polynomial<S>, &'a dyn Fn(usize) -> String);
        impl<S: Scalar> fmt::Display for D<'_, S> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        D(self, name)
    }
}

fn pow<S: Scalar>(p: &Polynomial<S>, e: u32) -> Polynomial<S> {
    let mut out = Polynomial::one();
    for _ in 0..e {
        out = out * p.clone();
    }
    out
}

/// Default variable names `x1, x2, …` (1-based).
pub fn default_var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &default_var_name)
    }
}

impl<S: Scalar> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Scalar> Zero for Polynomial<S> {
    fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Scalar> One for Polynomial<S> {
    fn one() -> Self {
        Self::constant(S::one())
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Polynomial { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(monomial_mul(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Ring for Polynomial<S> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::constant(S::from_ratio(num, den))
    }
}

impl<S: Scalar> Module<S> for Polynomial<S> {
    fn scale(&self, s: &S) -> Self {
        Polynomial::scale(self, s)
    }
}

/// One monomial in the JSON exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialJson {
    #[serde(with = "rational_string")]
    pub coeff: Rational,
    pub exp: Vec<u32>,
}

impl Polynomial<Rational> {
    pub fn to_json(&self) -> Vec<MonomialJson> {
        self.terms
            .iter()
            .map(|(m, c)| MonomialJson { coeff: c.clone(), exp: m.clone() })
            .collect()
    }

    pub fn from_json(terms: &[MonomialJson]) -> Self {
        Self::from_terms(terms.iter().map(|t| (t.exp.clone(), t.coeff.clone())))
    }
}
