//! Derivative ideals, orders, and monomial parts.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::poly::{var_index, Monomial, Polynomial, Scalar};

/// A natural number or infinity. `Finite(_) < Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinity,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(a) => Some(a),
            Order::Infinity => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(a) => write!(f, "{a}"),
            Order::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(a) => s.serialize_u32(*a),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(a) => Ok(Order::Finite(a)),
            Raw::S(s) if s == "inf" => Ok(Order::Infinity),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad order `{s}`"))),
        }
    }
}

/// An ideal with a mark, plus the exceptional record of its chart.
#[derive(Clone, Debug)]
pub struct MarkedIdeal {
    pub ideal: Ideal,
    pub mark: u32,
    /// (variable, multiplicity or birth stage)
    pub exceptional: Vec<(String, u32)>,
}

impl MarkedIdeal {
    pub fn new(ideal: Ideal, mark: u32) -> Result<MarkedIdeal> {
        if mark == 0 {
            return Err(Error::InvalidArgument("mark must be at least 1".into()));
        }
        Ok(MarkedIdeal { ideal, mark, exceptional: Vec::new() })
    }

    pub fn with_exceptional(mut self, exceptional: Vec<(String, u32)>) -> Result<MarkedIdeal> {
        for (v, _) in &exceptional {
            var_index(self.ideal.vars(), v)?;
        }
        self.exceptional = exceptional;
        Ok(self)
    }

    pub fn t_ideal(&self) -> Ideal {
        derivative_ideal(&self.ideal, self.mark - 1)
    }
}

/// Successive derivative ideals `D^{≤0} I ⊆ D^{≤1} I ⊆ ...`.
struct Tower {
    ideal: Ideal,
    /// partials of exact order `level`, tagged with the smallest variable
    /// index still allowed, so each multi-index is produced once
    frontier: Vec<(Polynomial, usize)>,
}

impl Tower {
    fn new(i: &Ideal) -> Tower {
        Tower { ideal: i.clone(), frontier: i.gens().iter().map(|g| (g.clone(), 0)).collect() }
    }

    fn step(&mut self) {
        let n = self.ideal.vars().len();
        let mut next = Vec::new();
        let mut gens = self.ideal.gens().to_vec();
        for (g, from) in &self.frontier {
            for v in *from..n {
                let d = g.differentiate_at(v);
                if d.is_zero() {
                    continue;
                }
                if !gens.iter().any(|h| h.monic() == d.monic()) {
                    gens.push(d.clone());
                }
                next.push((d, v));
            }
        }
        self.frontier = next;
        self.ideal = Ideal::new(self.ideal.vars(), gens);
    }
}

/// `D^{≤k} I`: all partial derivatives of order at most `k` of the generators.
pub fn derivative_ideal(i: &Ideal, k: u32) -> Ideal {
    let mut t = Tower::new(i);
    for _ in 0..k {
        t.step();
    }
    t.ideal
}

/// `T(I, a) = D^{≤a-1} I`.
pub fn t_ideal(i: &Ideal, a: u32) -> Result<Ideal> {
    if a == 0 {
        return Err(Error::InvalidArgument("mark must be at least 1".into()));
    }
    Ok(derivative_ideal(i, a - 1))
}

/// Smallest `a` with `D^{≤a} I` the unit ideal; infinity for the zero ideal.
pub fn max_order(i: &Ideal) -> Result<Order> {
    max_order_localized(i, &[])
}

/// As [`max_order`] on the open set where every element of `inverted` is a unit.
pub fn max_order_localized(i: &Ideal, inverted: &[Polynomial]) -> Result<Order> {
    if i.is_zero() {
        return Ok(Order::Infinity);
    }
    let bound = i.gens().iter().filter_map(Polynomial::degree).min().unwrap_or(0);
    let mut t = Tower::new(i);
    for a in 0..=bound {
        if t.ideal.is_unit_localized(inverted)? {
            return Ok(Order::Finite(a));
        }
        t.step();
    }
    // a generator of degree `bound` has a nonzero constant partial of that order
    unreachable!("derivative tower of a nonzero ideal must reach the unit ideal")
}

/// Order of `I` at a rational point.
pub fn ord_at_point(i: &Ideal, point: &[Scalar]) -> Result<Order> {
    let n = i.vars().len();
    if point.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: point.len() });
    }
    let mut best = Order::Infinity;
    for g in i.gens() {
        let o = g.translate(point)?.order_at_origin().map_or(Order::Infinity, Order::Finite);
        best = best.min(o);
    }
    Ok(best)
}

/// Largest monomial in the exceptional variables dividing every generator,
/// and the generators with it divided out.
pub fn monomial_part<S: AsRef<str>>(i: &Ideal, exceptional: &[S]) -> Result<(Monomial, Ideal)> {
    let n = i.vars().len();
    let idx = exceptional.iter().map(|v| var_index(i.vars(), v.as_ref())).collect::<Result<Vec<_>>>()?;
    if i.is_zero() {
        return Ok((Monomial::one(n), i.clone()));
    }
    let mut exps = vec![u32::MAX; n];
    for g in i.gens() {
        let c = g.monomial_content();
        for (e, &k) in exps.iter_mut().zip(c.exponents()) {
            *e = (*e).min(k);
        }
    }
    for (v, e) in exps.iter_mut().enumerate() {
        if !idx.contains(&v) {
            *e = 0;
        }
    }
    let m = Monomial::new(exps);
    let rest = i.map(i.vars(), |g| g.div_monomial(&m).expect("content divides every generator"));
    Ok((m, rest))
}
