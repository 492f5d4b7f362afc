//! Brute-force oracles shared by the integration tests. They only use the
//! library for parsing and polynomial arithmetic.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use res_kernel::chart::CoordinateChange;
use res_kernel::ideal::Ideal;
use res_kernel::poly::{parse_polynomial, var_index, vars, Polynomial, Vars};
use res_kernel::trace::{run_input, TraceChange, TraceDocument, TraceInput, TraceMode, TraceNode};

pub fn principalize_doc(v: &[&str], gens: &[&str], exc: &[&str]) -> TraceDocument {
    let input = TraceInput {
        mode: TraceMode::Principalize,
        vars: v.iter().map(|s| s.to_string()).collect(),
        ideal: gens.iter().map(|s| s.to_string()).collect(),
        exceptional: exc.iter().map(|s| s.to_string()).collect(),
        mark: None,
        budget: 64,
        contact: None,
    };
    run_input(input, true).expect("driver runs")
}

pub fn order_reduce_doc(v: &[&str], gens: &[&str], mark: u32, contact: Option<&str>) -> TraceDocument {
    let input = TraceInput {
        mode: TraceMode::OrderReduce,
        vars: v.iter().map(|s| s.to_string()).collect(),
        ideal: gens.iter().map(|s| s.to_string()).collect(),
        exceptional: Vec::new(),
        mark: Some(mark),
        budget: 64,
        contact: contact.map(String::from),
    };
    run_input(input, false).expect("driver runs")
}

/// Inputs the driver is expected to finish on.
pub fn corpus() -> Vec<TraceDocument> {
    let xy = ["x", "y"];
    let xyz = ["x", "y", "z"];
    let mut out = Vec::new();
    for g in [
        "y^2 - x^3",
        "y^2 - x^5",
        "y^3 - x^4",
        "y^3 - x^5",
        "y^2 - x^4",
        "y^2 - x^2 - x^3",
        "x^2 + y^2",
        "x*y*(x - y)",
        "x*y",
        "x^2*y",
        "y - x^2",
    ] {
        out.push(principalize_doc(&xy, &[g], &[]));
    }
    out.push(principalize_doc(&xy, &["x^2", "y^2"], &[]));
    out.push(principalize_doc(&xy, &["y^2 - x - 1"], &["x"]));
    out.push(principalize_doc(&xy, &["x^3*(y^2 - x)"], &["x"]));
    out.push(principalize_doc(&xyz, &["z^2 - x*y"], &[]));
    out.push(principalize_doc(&xyz, &["x*y", "y*z"], &[]));
    out.push(order_reduce_doc(&xy, &["x*y"], 2, None));
    out.push(order_reduce_doc(&xy, &["y^2 - x^3"], 2, None));
    out.push(order_reduce_doc(&xyz, &["z^2 - x*y"], 2, None));
    out
}

// ---------------------------------------------------------------------------
// Macaulay matrices

type Row = BTreeMap<Vec<u32>, BigRational>;

fn row_of(p: &Polynomial) -> Row {
    p.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())).collect()
}

fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    for _ in 0..d {
        let mut next = Vec::new();
        for m in &out {
            for i in 0..n {
                let mut e = m.clone();
                e[i] += 1;
                next.push(e);
            }
        }
        out.extend(next);
        out.sort();
        out.dedup();
    }
    out
}

/// Row echelon form of the span of `m * g` over all generators `g` and
/// monomials `m` with `deg(m g) <= d`.
pub struct Macaulay {
    pivots: BTreeMap<Vec<u32>, Row>,
}

fn axpy(row: &mut Row, c: &BigRational, other: &Row) {
    for (k, v) in other {
        let e = row.entry(k.clone()).or_insert_with(BigRational::zero);
        *e -= c * v;
        if e.is_zero() {
            row.remove(k);
        }
    }
}

impl Macaulay {
    pub fn new(gens: &[Polynomial], d: u32) -> Macaulay {
        let mut mac = Macaulay { pivots: BTreeMap::new() };
        for g in gens {
            let Some(dg) = g.degree() else { continue };
            if dg > d {
                continue;
            }
            let base = row_of(g);
            for m in monomials_up_to(g.nvars(), d - dg) {
                let shifted: Row = base
                    .iter()
                    .map(|(e, c)| (e.iter().zip(&m).map(|(a, b)| a + b).collect(), c.clone()))
                    .collect();
                mac.insert(shifted);
            }
        }
        mac
    }

    fn reduce(&self, mut row: Row) -> Row {
        // eliminate from the largest key down; pivots are largest keys
        let mut cursor: Option<Vec<u32>> = None;
        loop {
            let key = match &cursor {
                None => row.keys().next_back().cloned(),
                Some(c) => row.range(..c.clone()).next_back().map(|(k, _)| k.clone()),
            };
            let Some(key) = key else { return row };
            if let Some(p) = self.pivots.get(&key) {
                let c = row[&key].clone() / &p[&key];
                axpy(&mut row, &c, p);
            }
            cursor = Some(key);
        }
    }

    fn insert(&mut self, row: Row) {
        let row = self.reduce(row);
        if let Some(k) = row.keys().next_back().cloned() {
            self.pivots.insert(k, row);
        }
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(row_of(p)).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Smallest `d0 >= deg` of every basis element such that every element of
/// `basis` lies in the degree-`d0` Macaulay span of `gens`. With a degree
/// compatible basis, `p` is in the ideal iff it lies in the span at
/// `deg p + d0`.
pub fn degree_bound(gens: &[Polynomial], basis: &[Polynomial], limit: u32) -> Option<u32> {
    let start = basis.iter().chain(gens).filter_map(|b| b.degree()).max().unwrap_or(0);
    (start..=limit).find(|&d| {
        let m = Macaulay::new(gens, d);
        basis.iter().all(|b| m.contains(b))
    })
}

// ---------------------------------------------------------------------------
// Lattice hull of a 2-dimensional cone

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// The lattice points on the compact boundary of the convex hull of the
/// nonzero lattice points of the cone spanned by `u` and `v`, strictly between
/// `u` and `v`, ordered from `u` to `v`. These are the rays of the minimal
/// regular subdivision.
pub fn hull_rays(u: (i64, i64), v: (i64, i64)) -> Vec<(i64, i64)> {
    assert!(cross((0, 0), u, v) > 0, "cone must be given counterclockwise");
    let k = 2 * (u.0.abs() + u.1.abs() + v.0.abs() + v.1.abs());
    let far_u = (k * u.0, k * u.1);
    let far_v = (k * v.0, k * v.1);
    let mut pts = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            let p = (a, b);
            if p == (0, 0) {
                continue;
            }
            // inside the parallelogram spanned by far_u and far_v
            let s = cross((0, 0), p, far_v);
            let t = cross((0, 0), far_u, p);
            let area = cross((0, 0), far_u, far_v);
            if s >= 0 && t >= 0 && s <= area && t <= area {
                pts.push(p);
            }
        }
    }
    pts.push(far_u);
    pts.push(far_v);
    pts.sort_unstable();
    pts.dedup();
    // walk from u to v keeping every point on the right, nearest first on ties
    let mut chain = vec![u];
    let mut cur = u;
    while cur != v {
        let mut best: Option<(i64, i64)> = None;
        for &p in &pts {
            if chain.contains(&p) {
                continue;
            }
            match best {
                None => best = Some(p),
                Some(b) => {
                    let c = cross(cur, b, p);
                    let ahead = (p.0 - cur.0) * (b.0 - cur.0) + (p.1 - cur.1) * (b.1 - cur.1) > 0;
                    let closer = (p.0 - cur.0).abs() + (p.1 - cur.1).abs() < (b.0 - cur.0).abs() + (b.1 - cur.1).abs();
                    if c > 0 || (c == 0 && ahead && closer) {
                        best = Some(p);
                    }
                }
            }
        }
        cur = best.expect("hull has a next point");
        assert!(cur != far_u && cur != far_v, "walked around the far side");
        chain.push(cur);
    }
    chain[1..chain.len() - 1].to_vec()
}

// ---------------------------------------------------------------------------
// Transform identities checked straight from a trace document

fn poly(v: &Vars, s: &str) -> Polynomial {
    parse_polynomial(s, v).expect("trace polynomial parses")
}

fn polys(v: &Vars, s: &[String]) -> Vec<Polynomial> {
    s.iter().map(|g| poly(v, g)).collect()
}

/// `q` divided by every inverted element as often as possible, and by its
/// leading coefficient.
fn strip_units(mut q: Polynomial, inverted: &[Polynomial]) -> Polynomial {
    for u in inverted {
        if u.is_constant() {
            continue;
        }
        while let Some(r) = q.exact_div(u) {
            q = r;
        }
    }
    match q.leading_term() {
        Some((_, c)) => q.scale(&(BigRational::one() / c)),
        None => q,
    }
}

fn is_exceptional_monomial(q: &Polynomial, exc: &[usize]) -> bool {
    q.num_terms() == 1
        && q.terms().all(|(m, _)| m.exponents().iter().enumerate().all(|(i, &e)| e == 0 || exc.contains(&i)))
}

fn change_of(v: &Vars, c: &TraceChange) -> CoordinateChange {
    match c {
        TraceChange::Localize { element } => CoordinateChange::Localize { element: poly(v, element) },
        TraceChange::Substitute { var, numerator, denominator } => {
            CoordinateChange::Substitute { var: var.clone(), numerator: poly(v, numerator), denominator: poly(v, denominator) }
        }
    }
}

/// Every partial derivative of order `< a` of every generator.
fn t_gens(gens: &[Polynomial], a: u32) -> Vec<Polynomial> {
    let mut layer: Vec<Polynomial> = gens.to_vec();
    let mut out = layer.clone();
    for _ in 1..a {
        let mut next = Vec::new();
        for g in &layer {
            for k in 0..g.nvars() {
                let d = g.differentiate_at(k);
                if !d.is_zero() {
                    next.push(d);
                }
            }
        }
        next.sort_by_key(|p| p.to_string());
        next.dedup();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Violations of
/// - `total = (exceptional monomial) * unit * controlled`, generator by generator,
/// - `T(work, mark)` inside the center ideal,
/// - child total = pullback of the parent total, and
/// - pullback of the parent's work = `x^mark` times the child's controlled
///   transform, generator by generator.
pub fn transform_violations(doc: &TraceDocument) -> Vec<String> {
    let v = vars(&doc.input.vars);
    let mut bad = Vec::new();
    let by_id: BTreeMap<&str, &TraceNode> = doc.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    for n in &doc.nodes {
        if n.reason.is_some() {
            continue;
        }
        let inverted = polys(&v, &n.inverted);
        let exc: Vec<usize> = n.exceptional.iter().map(|e| var_index(&v, &e.var).unwrap()).collect();
        let total = polys(&v, &n.total);
        let ctl = polys(&v, &n.controlled);
        if total.len() != ctl.len() {
            bad.push(format!("{}: {} total generators vs {} controlled", n.id, total.len(), ctl.len()));
            continue;
        }
        let mut quotient: Option<Polynomial> = None;
        for (t, c) in total.iter().zip(&ctl) {
            match t.exact_div(c) {
                Some(q) => {
                    let q = strip_units(q, &inverted);
                    if !is_exceptional_monomial(&q, &exc) {
                        bad.push(format!("{}: {t} / {c} is not an exceptional monomial", n.id));
                    }
                    if quotient.as_ref().is_some_and(|p| *p != q) {
                        bad.push(format!("{}: generators differ in their exceptional factor", n.id));
                    }
                    quotient = Some(q);
                }
                None => bad.push(format!("{}: {c} does not divide {t}", n.id)),
            }
        }

        let Some(center) = &n.center else { continue };
        let changes: Vec<CoordinateChange> = n.changes.iter().map(|c| change_of(&v, c)).collect();
        let mut total_i = Ideal::new(&v, total);
        let mut work = Ideal::new(&v, ctl);
        for c in &changes {
            total_i = c.apply_ideal(&total_i).unwrap();
            work = c.apply_ideal(&work).unwrap();
        }
        let cidx: Vec<usize> = center.iter().map(|c| var_index(&v, c).unwrap()).collect();
        for g in t_gens(work.gens(), n.mark) {
            let off_center = g.terms().any(|(m, _)| cidx.iter().all(|&i| m.exponents()[i] == 0));
            if off_center {
                bad.push(format!("{}: {g} in T(I, {}) is not in the center ideal", n.id, n.mark));
            }
        }
        for &ci in &cidx {
            let name = &v[ci];
            let Some(kid) = by_id.get(format!("{}/{}-chart", n.id, name).as_str()) else {
                bad.push(format!("{}: missing {name}-chart", n.id));
                continue;
            };
            let xc = Polynomial::var_at(&v, ci);
            let images: BTreeMap<String, Polynomial> = cidx
                .iter()
                .filter(|&&j| j != ci)
                .map(|&j| (v[j].clone(), &xc * &Polynomial::var_at(&v, j)))
                .collect();
            let pull = |p: &Polynomial| p.substitute(&images, &v).unwrap();
            let kid_total = polys(&v, &kid.total);
            let expect: Vec<Polynomial> = total_i.gens().iter().map(pull).collect();
            if kid_total != expect {
                bad.push(format!("{}: total transform mismatch", kid.id));
            }
            let inh = polys(&v, kid.inherited.as_ref().expect("child has a controlled transform"));
            let xa = xc.pow(n.mark);
            let lhs: Vec<Polynomial> = work.gens().iter().map(pull).collect();
            let rhs: Vec<Polynomial> = inh.iter().map(|g| &xa * g).collect();
            if lhs != rhs {
                bad.push(format!("{}: pullback is not {name}^{} times the controlled transform", kid.id, n.mark));
            }
        }
    }
    bad
}
