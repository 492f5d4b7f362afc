//! Buchberger's algorithm with the sugar selection strategy.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_traits::{One, Zero};

use super::MonomialOrder;
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, Scalar, Vars};

/// Default S-pair budget per basis computation.
pub const DEFAULT_SPAIR_CAP: usize = 200_000;

static SPAIR_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_SPAIR_CAP);

/// Set the process-wide S-pair budget.
pub fn set_spair_cap(cap: usize) {
    SPAIR_CAP.store(cap.max(1), AtomicOrdering::Relaxed);
}

pub fn spair_cap() -> usize {
    SPAIR_CAP.load(AtomicOrdering::Relaxed)
}

/// Read `RES_KERNEL_SPAIR_CAP` and install it. Returns the active cap.
pub fn spair_cap_from_env() -> usize {
    if let Some(cap) = std::env::var("RES_KERNEL_SPAIR_CAP").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        set_spair_cap(cap);
    }
    spair_cap()
}

type Term = (Vec<u32>, Scalar);

/// Terms sorted strictly descending in the working order.
#[derive(Clone, Debug)]
struct Sorted(Vec<Term>);

impl Sorted {
    fn from_poly(p: &Polynomial, ord: MonomialOrder) -> Sorted {
        let mut terms: Vec<Term> = p.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())).collect();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        Sorted(terms)
    }

    fn to_poly(&self, vars: &Vars) -> Polynomial {
        Polynomial::from_terms(vars, self.0.iter().map(|(e, c)| (Monomial::new(e.clone()), c.clone())))
    }

    fn lm(&self) -> &[u32] {
        &self.0[0].0
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_constant(&self) -> bool {
        self.0.len() == 1 && self.0[0].0.iter().all(|&e| e == 0)
    }

    fn monic(mut self) -> Sorted {
        if let Some((_, lc)) = self.0.first() {
            if !lc.is_one() {
                let inv = lc.recip();
                for t in &mut self.0 {
                    t.1 = &t.1 * &inv;
                }
            }
        }
        self
    }

    /// self - c * x^m * other
    fn sub_scaled(&self, c: &Scalar, m: &[u32], other: &Sorted, ord: MonomialOrder) -> Sorted {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let shifted = other.0.iter().map(|(e, k)| (add_exp(e, m), k * c));
        let mut a = self.0.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match ord.cmp(&x.0, &y.0) {
                    Ordering::Greater => out.push(a.next().unwrap()),
                    Ordering::Less => {
                        let (e, k) = b.next().unwrap();
                        out.push((e, -k));
                    }
                    Ordering::Equal => {
                        let (e, k1) = a.next().unwrap();
                        let (_, k2) = b.next().unwrap();
                        let k = k1 - k2;
                        if !k.is_zero() {
                            out.push((e, k));
                        }
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (e, k) = b.next().unwrap();
                    out.push((e, -k));
                }
                (None, None) => break,
            }
        }
        Sorted(out)
    }
}

fn add_exp(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn quotient(b: &[u32], a: &[u32]) -> Vec<u32> {
    b.iter().zip(a).map(|(x, y)| x - y).collect()
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn degree(a: &[u32]) -> u32 {
    a.iter().sum()
}

/// Full reduction of `p` modulo `basis` (every term, not only the leading one).
fn normal_form(mut p: Sorted, basis: &[Sorted], ord: MonomialOrder) -> Sorted {
    let mut rest: Vec<Term> = Vec::new();
    'outer: while !p.is_zero() {
        let (lead, lc) = p.0[0].clone();
        for g in basis {
            if divides(g.lm(), &lead) {
                let m = quotient(&lead, g.lm());
                let c = &lc / &g.0[0].1;
                p = p.sub_scaled(&c, &m, g, ord);
                continue 'outer;
            }
        }
        rest.push(p.0.remove(0));
    }
    Sorted(rest)
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Vec<u32>,
    sugar: u32,
}

/// A reduced Groebner basis together with the order it was computed for.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    vars: Vars,
    order: MonomialOrder,
    elems: Vec<Sorted>,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.elems.iter().map(|s| s.to_poly(&self.vars)).collect()
    }

    /// The basis is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.elems.len() == 1 && self.elems[0].is_constant()
    }

    /// Normal form of `p` with respect to the basis.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let s = Sorted::from_poly(p, self.order);
        normal_form(s, &self.elems, self.order).to_poly(&self.vars)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }

    /// Largest leading-term total degree in the basis.
    pub fn max_degree(&self) -> u32 {
        self.elems.iter().map(|s| degree(s.lm())).max().unwrap_or(0)
    }

    /// S-polynomial of basis elements `i` and `j`, for external verification.
    pub fn s_polynomial(&self, i: usize, j: usize) -> Polynomial {
        s_poly(&self.elems[i], &self.elems[j], self.order).to_poly(&self.vars)
    }
}

fn s_poly(f: &Sorted, g: &Sorted, ord: MonomialOrder) -> Sorted {
    let l = lcm(f.lm(), g.lm());
    let mf = quotient(&l, f.lm());
    let mg = quotient(&l, g.lm());
    let cf = f.0[0].1.recip();
    let fs = Sorted(Vec::new()).sub_scaled(&-cf, &mf, f, ord);
    let cg = g.0[0].1.recip();
    fs.sub_scaled(&cg, &mg, g, ord)
}

fn unit_basis(vars: &Vars, order: MonomialOrder) -> GroebnerBasis {
    GroebnerBasis { vars: vars.clone(), order, elems: vec![Sorted(vec![(vec![0; vars.len()], Scalar::one())])] }
}

/// Reduced Groebner basis of the ideal generated by `gens`.
///
/// Fails with [`Error::ResourceCap`] once more than the configured number of
/// S-polynomials has been reduced.
pub fn groebner_basis(vars: &Vars, gens: &[Polynomial], order: MonomialOrder) -> Result<GroebnerBasis> {
    groebner_basis_capped(vars, gens, order, spair_cap())
}

/// As [`groebner_basis`] with an explicit S-pair budget.
pub fn groebner_basis_capped(vars: &Vars, gens: &[Polynomial], order: MonomialOrder, cap: usize) -> Result<GroebnerBasis> {
    let mut basis: Vec<Sorted> = Vec::new();
    let mut sugar: Vec<u32> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let mut start: Vec<Sorted> =
        gens.iter().filter(|g| !g.is_zero()).map(|g| Sorted::from_poly(g, order).monic()).collect();
    if start.iter().any(Sorted::is_constant) {
        return Ok(unit_basis(vars, order));
    }
    // lowest leading monomials first keeps the initial reductions small
    start.sort_by(|a, b| ord_cmp(order, a.lm(), b.lm()));

    let add = |basis: &mut Vec<Sorted>,
               sugar: &mut Vec<u32>,
               pairs: &mut Vec<Pair>,
               pending: &mut HashSet<(usize, usize)>,
               g: Sorted,
               s: u32| {
        let j = basis.len();
        for (i, h) in basis.iter().enumerate() {
            let l = lcm(h.lm(), g.lm());
            let coprime = degree(&l) == degree(h.lm()) + degree(g.lm());
            if coprime {
                continue;
            }
            let si = sugar[i] + degree(&l) - degree(h.lm());
            let sj = s + degree(&l) - degree(g.lm());
            pairs.push(Pair { i, j, lcm: l, sugar: si.max(sj) });
            pending.insert((i, j));
        }
        basis.push(g);
        sugar.push(s);
    };

    for g in start {
        let g = normal_form(g, &basis, order);
        if g.is_zero() {
            continue;
        }
        let g = g.monic();
        if g.is_constant() {
            return Ok(unit_basis(vars, order));
        }
        let s = g.0.iter().map(|t| degree(&t.0)).max().unwrap_or(0);
        add(&mut basis, &mut sugar, &mut pairs, &mut pending, g, s);
    }

    let mut reduced = 0usize;
    while !pairs.is_empty() {
        let mut best = 0;
        for (k, p) in pairs.iter().enumerate().skip(1) {
            let b = &pairs[best];
            let better = p.sugar.cmp(&b.sugar).then_with(|| ord_cmp(order, &p.lcm, &b.lcm)).then((p.j, p.i).cmp(&(b.j, b.i)));
            if better == Ordering::Less {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        pending.remove(&(pair.i, pair.j));

        // chain criterion
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && divides(basis[k].lm(), &pair.lcm)
                && !pending.contains(&(pair.i.min(k), pair.i.max(k)))
                && !pending.contains(&(pair.j.min(k), pair.j.max(k)))
        });
        if chain {
            continue;
        }

        reduced += 1;
        if reduced > cap {
            return Err(Error::ResourceCap { cap });
        }
        let s = s_poly(&basis[pair.i], &basis[pair.j], order);
        let r = normal_form(s, &basis, order);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.is_constant() {
            return Ok(unit_basis(vars, order));
        }
        add(&mut basis, &mut sugar, &mut pairs, &mut pending, r, pair.sugar);
    }

    Ok(GroebnerBasis { vars: vars.clone(), order, elems: inter_reduce(basis, order) })
}

fn ord_cmp(order: MonomialOrder, a: &[u32], b: &[u32]) -> Ordering {
    order.cmp(a, b)
}

fn inter_reduce(basis: Vec<Sorted>, order: MonomialOrder) -> Vec<Sorted> {
    // minimal basis: drop elements whose leading monomial is a multiple of another's
    let mut minimal: Vec<Sorted> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(l, h)| {
            l != k && divides(h.lm(), g.lm()) && (h.lm() != g.lm() || l < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Sorted> =
            minimal.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, h)| h.clone()).collect();
        let lead = Sorted(vec![minimal[k].0[0].clone()]);
        let tail = Sorted(minimal[k].0[1..].to_vec());
        let tail = normal_form(tail, &others, order);
        let mut terms = lead.0;
        terms.extend(tail.0);
        out.push(Sorted(terms).monic());
    }
    out.sort_by(|a, b| ord_cmp(order, b.lm(), a.lm()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_many, parse_polynomial, vars};

    fn gb(names: &[&str], gens: &[&str], ord: MonomialOrder) -> Vec<String> {
        let v = vars(names);
        let gens = parse_many(gens, &v).unwrap();
        groebner_basis(&v, &gens, ord).unwrap().polynomials().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn already_reduced() {
        assert_eq!(gb(&["x", "y"], &["x^2", "y"], MonomialOrder::Lex), vec!["x^2", "y"]);
    }

    #[test]
    fn linear_system() {
        for ord in [MonomialOrder::Lex, MonomialOrder::GrLex, MonomialOrder::GRevLex] {
            assert_eq!(gb(&["x", "y"], &["x + y", "x - y"], ord), vec!["x", "y"]);
        }
    }

    #[test]
    fn contains_unit() {
        assert_eq!(gb(&["x"], &["x", "x + 1"], MonomialOrder::GRevLex), vec!["1"]);
    }

    #[test]
    fn twisted_cubic_lex() {
        let v = vars(&["x", "y", "z"]);
        let gens = parse_many(&["y - x^2", "z - x^3"], &v).unwrap();
        let basis = groebner_basis(&v, &gens, MonomialOrder::Lex).unwrap();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                assert!(basis.contains(&basis.s_polynomial(i, j)));
            }
        }
        // y^3 - z^2 lies in the ideal
        assert!(basis.contains(&parse_polynomial("y^3 - z^2", &v).unwrap()));
        assert!(!basis.contains(&parse_polynomial("y - z", &v).unwrap()));
    }

    #[test]
    fn cap_is_reported() {
        let v = vars(&["x", "y", "z"]);
        let gens = parse_many(&["x*y - z", "y*z - x", "x*z - y"], &v).unwrap();
        let out = groebner_basis_capped(&v, &gens, MonomialOrder::GRevLex, 1);
        assert_eq!(out.unwrap_err(), Error::ResourceCap { cap: 1 });
    }
}
