use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::Scalar;
use crate::error::{Error, Result};

/// Ordered variable names of a chart. Shared between every polynomial of the chart.
pub type Vars = Arc<[String]>;

/// Build a variable list from names.
pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub fn var_index(vars: &[String], name: &str) -> Result<usize> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

/// Multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex monomials with no zero
/// coefficients stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Scalar::one())
    }

    pub fn constant(vars: &Vars, c: Scalar) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn from_int(vars: &Vars, c: i64) -> Self {
        Self::constant(vars, Scalar::from_integer(c.into()))
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let i = var_index(vars, name)?;
        Ok(Self::var_at(vars, i))
    }

    pub fn var_at(vars: &Vars, index: usize) -> Self {
        Self::monomial(vars, Monomial::var(vars.len(), index, 1), Scalar::one())
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.len(), vars.len(), "monomial length must match the variable count");
        let mut p = Self::zero(vars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(vars: &Vars, terms: I) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), vars.len(), "monomial length must match the variable count");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(m.clone()).or_insert_with(Scalar::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&Monomial::one(self.nvars()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Leading term under the canonical graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.exponents()[index]).max().unwrap_or(0)
    }

    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.exponents()[index] > 0)
    }

    /// Minimal total degree of a term; `None` for the zero polynomial.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    fn check_ring(&self, other: &Polynomial) {
        assert!(
            self.vars == other.vars,
            "polynomials over different variable lists: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    /// Divide every term by `m`; `None` unless `m` divides each term.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Polynomial> {
        let mut terms = BTreeMap::new();
        for (k, a) in &self.terms {
            terms.insert(m.quotient_of(k)?, a.clone());
        }
        Some(Polynomial { vars: self.vars.clone(), terms })
    }

    /// Per-variable minimum exponent over all terms (the largest monomial dividing `self`).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.nvars()),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Make the leading coefficient one (zero stays zero).
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn differentiate(&self, name: &str) -> Result<Polynomial> {
        let i = var_index(&self.vars, name)?;
        Ok(self.differentiate_at(i))
    }

    pub fn differentiate_at(&self, index: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[index] -= 1;
            out.add_term(Monomial::new(exps), c * Scalar::from_integer(e.into()));
        }
        out
    }

    /// Coefficient of `x_index^k`, as a polynomial free of `x_index`.
    pub fn coefficient_in(&self, index: usize, k: u32) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.exponents()[index] == k {
                let mut exps = m.exponents().to_vec();
                exps[index] = 0;
                out.add_term(Monomial::new(exps), c.clone());
            }
        }
        out
    }

    /// Simultaneous substitution. Variables absent from `images` map to the
    /// same-named variable of `target`.
    pub fn substitute(&self, images: &BTreeMap<String, Polynomial>, target: &Vars) -> Result<Polynomial> {
        for (name, img) in images {
            var_index(&self.vars, name)?;
            if img.vars() != target {
                return Err(Error::RingMismatch(format!(
                    "image of `{name}` is over {:?}, expected {:?}",
                    img.vars(),
                    target
                )));
            }
        }
        let mut resolved = Vec::with_capacity(self.nvars());
        for name in self.vars.iter() {
            match images.get(name) {
                Some(p) => resolved.push(p.clone()),
                None => resolved.push(Polynomial::var(target, name)?),
            }
        }
        Ok(self.compose(&resolved, target))
    }

    /// Substitute `images[i]` for the i-th variable.
    pub fn compose(&self, images: &[Polynomial], target: &Vars) -> Polynomial {
        debug_assert_eq!(images.len(), self.nvars());
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(target), p.clone()]).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Substitute `x_index = numerator / denominator` and clear the denominator:
    /// returns `denominator^d * self(..)` where `d = degree_in(index)`.
    pub fn substitute_fraction(&self, index: usize, numerator: &Polynomial, denominator: &Polynomial) -> Polynomial {
        self.check_ring(numerator);
        self.check_ring(denominator);
        let d = self.degree_in(index);
        let mut out = Polynomial::zero(&self.vars);
        let mut num_pow = Polynomial::one(&self.vars);
        for k in 0..=d {
            let coeff = self.coefficient_in(index, k);
            if !coeff.is_zero() {
                out = &out + &(&(&coeff * &num_pow) * &denominator.pow(d - k));
            }
            num_pow = &num_pow * numerator;
        }
        out
    }

    /// Translate the origin to `point`: `x_i -> x_i + point_i`.
    pub fn translate(&self, point: &[Scalar]) -> Result<Polynomial> {
        if point.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), found: point.len() });
        }
        let images: Vec<Polynomial> = (0..self.nvars())
            .map(|i| &Polynomial::var_at(&self.vars, i) + &Polynomial::constant(&self.vars, point[i].clone()))
            .collect();
        Ok(self.compose(&images, &self.vars))
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), found: point.len() });
        }
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t *= x;
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Set `x_index = 0` and drop that variable from the ring.
    pub fn restrict_to_zero(&self, index: usize, target: &Vars) -> Polynomial {
        debug_assert_eq!(target.len() + 1, self.nvars());
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            if m.exponents()[index] != 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps.remove(index);
            out.add_term(Monomial::new(exps), c.clone());
        }
        out
    }

    /// Re-express over `target`, matching variables by name. Variables absent
    /// from `target` must not occur in `self`.
    pub fn embed(&self, target: &Vars) -> Result<Polynomial> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.vars.iter().map(|v| var_index(target, v).ok()).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0; target.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => exps[j] += e,
                    None => return Err(Error::UnknownVariable(self.vars[i].clone())),
                }
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Exact division by `divisor`, `None` if there is a remainder.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.check_ring(divisor);
        let (dm, dc) = divisor.leading_term()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quotient = Polynomial::zero(&self.vars);
        while let Some((m, c)) = rem.leading_term() {
            let qm = dm.quotient_of(m)?;
            let qc = c / &dc;
            let q = Polynomial::monomial(&self.vars, qm, qc);
            rem = &rem - &(&q * divisor);
            quotient = &quotient + &q;
        }
        Some(quotient)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.check_ring(rhs);
        let mut out = Polynomial::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Scalar::one())
    }
}

fn write_scalar(f: &mut fmt::Formatter<'_>, c: &Scalar) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    /// Terms from the graded-lex largest down, in the grammar accepted by the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], e) })
                .collect();
            if factors.is_empty() {
                write_scalar(f, &abs)?;
            } else {
                if !abs.is_one() {
                    write_scalar(f, &abs)?;
                    write!(f, "*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self} over {:?})", self.vars)
    }
}
