//! Choice of the next blow-up center for a marked ideal on a chart.
//!
//! The search recurses through maximal contact hypersurfaces. Coordinate
//! changes found at any depth are applied to the whole chart, so the center
//! returned is always a coordinate subspace of the updated chart.

use num_traits::Zero;

use crate::chart::{Chart, CoordinateChange};
use crate::contact::{contact_candidates, factorial, linear_split, restricted_coefficient_ideal, scan_pairs, straightening};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{derivative_ideal, max_order_localized, monomial_part, Order};
use crate::poly::{var_index, vars as make_vars, Monomial, Polynomial, Scalar, Vars};

const MAX_DEPTH: usize = 12;

/// A center together with the coordinate changes that make it a coordinate
/// subspace.
#[derive(Clone, Debug)]
pub struct CenterChoice {
    pub changes: Vec<CoordinateChange>,
    pub center: Vec<String>,
    /// The chart after the changes.
    pub chart: Chart,
    /// The reduced ideal after the changes.
    pub ideal: Ideal,
}

struct Ctx<'a> {
    chart: Chart,
    /// The ideal being order-reduced, in current coordinates. Localizations
    /// are only allowed at elements that generate the unit ideal together with
    /// it.
    top: Ideal,
    changes: Vec<CoordinateChange>,
    preferred: Option<&'a str>,
}

impl Ctx<'_> {
    fn apply(&mut self, change: CoordinateChange) -> Result<()> {
        let full = embed_change(&change, &self.chart.vars)?;
        self.chart.apply_change(&full)?;
        self.top = full.apply_ideal(&self.top)?;
        self.changes.push(full);
        Ok(())
    }

    /// `p` may be inverted: `top` has no zeros on `V(p)`.
    fn may_invert(&self, p: &Polynomial) -> Result<bool> {
        let p = p.embed(&self.chart.vars)?;
        let with = self.top.sum(&Ideal::principal(p));
        with.is_unit_localized(&self.chart.inverted)
    }

    /// Units of the chart restricted to a sub-ring (other variables set to 0).
    fn inverted_on(&self, ring: &Vars) -> Vec<Polynomial> {
        self.chart
            .inverted
            .iter()
            .map(|g| restrict_to_ring(g, ring))
            .filter(|g| !g.is_zero() && !g.is_constant())
            .collect()
    }

    fn is_exceptional(&self, name: &str) -> bool {
        self.chart.is_exceptional(name)
    }
}

fn embed_change(change: &CoordinateChange, vars: &Vars) -> Result<CoordinateChange> {
    Ok(match change {
        CoordinateChange::Localize { element } => CoordinateChange::Localize { element: element.embed(vars)? },
        CoordinateChange::Substitute { var, numerator, denominator } => CoordinateChange::Substitute {
            var: var.clone(),
            numerator: numerator.embed(vars)?,
            denominator: denominator.embed(vars)?,
        },
    })
}

/// Set every variable missing from `ring` to zero and re-express over `ring`.
fn restrict_to_ring(p: &Polynomial, ring: &Vars) -> Polynomial {
    let mut q = p.clone();
    for (k, name) in p.vars().iter().enumerate() {
        if !ring.contains(name) {
            let zero = Polynomial::zero(q.vars());
            let images: Vec<Polynomial> =
                (0..q.nvars()).map(|j| if j == k { zero.clone() } else { Polynomial::var_at(q.vars(), j) }).collect();
            q = q.compose(&images, &q.vars().clone());
        }
    }
    q.embed(ring).expect("restricted polynomial only involves ring variables")
}

/// Find an admissible center for `(ideal, mark)` on `chart`.
///
/// `preferred` names a variable to try first when choosing maximal contact.
pub fn find_center(chart: &Chart, ideal: &Ideal, mark: u32, preferred: Option<&str>) -> Result<CenterChoice> {
    let mut ctx = Ctx { chart: chart.clone(), top: ideal.clone(), changes: Vec::new(), preferred };
    let e: Vec<String> = chart.exceptional_names();
    let mut center = search(&mut ctx, ideal.clone(), mark, &e, 0)?;
    center.sort_by_key(|v| var_index(&chart.vars, v).unwrap_or(usize::MAX));
    center.dedup();
    Ok(CenterChoice { changes: ctx.changes, center, chart: ctx.chart, ideal: ctx.top })
}

fn search(ctx: &mut Ctx, j: Ideal, b: u32, e: &[String], depth: usize) -> Result<Vec<String>> {
    if depth > MAX_DEPTH {
        return Err(Error::UnsupportedCenter(format!("no center found within {MAX_DEPTH} levels for ({j}, {b})")));
    }
    let ring = j.vars().clone();
    let inverted = ctx.inverted_on(&ring);
    let e_ring: Vec<String> = e.iter().filter(|v| ring.contains(v)).cloned().collect();
    let (m, jp) = monomial_part(&j, &e_ring)?;
    let c = match max_order_localized(&jp, &inverted)? {
        Order::Finite(c) => c,
        Order::Infinity => return Err(Error::InvalidArgument(format!("zero ideal has no center: ({j}, {b})"))),
    };
    if c >= b {
        return contact_step(ctx, jp, c, &e_ring, depth);
    }
    if c == 0 {
        return monomial_center(&ring, &m, &e_ring, b);
    }
    // 0 < c < b: points of order >= b need ord(M) >= b - c where J' has order c
    let companion = jp.power(b - c).sum(&Ideal::principal(Polynomial::monomial(&ring, m.clone(), Scalar::from_integer(1.into())).pow(c)));
    search(ctx, companion.minimized()?, c * (b - c), e, depth + 1)
}

/// Smallest set of exceptional variables whose exponents in `m` sum to at
/// least `b`; ties prefer a larger sum, then earlier variables.
fn monomial_center(ring: &Vars, m: &Monomial, e: &[String], b: u32) -> Result<Vec<String>> {
    let idx: Vec<usize> = e.iter().filter_map(|v| var_index(ring, v).ok()).filter(|&k| m.exponents()[k] > 0).collect();
    let mut best: Option<(usize, u32, Vec<usize>)> = None;
    for mask in 1u32..(1 << idx.len()) {
        let set: Vec<usize> = (0..idx.len()).filter(|i| mask & (1 << i) != 0).map(|i| idx[i]).collect();
        let sum: u32 = set.iter().map(|&k| m.exponents()[k]).sum();
        if sum < b {
            continue;
        }
        let better = match &best {
            None => true,
            Some((n, s, prev)) => (set.len(), std::cmp::Reverse(sum), &set) < (*n, std::cmp::Reverse(*s), prev),
        };
        if better {
            best = Some((set.len(), sum, set));
        }
    }
    match best {
        Some((_, _, set)) => Ok(set.into_iter().map(|k| ring[k].clone()).collect()),
        None => Err(Error::InvalidArgument(format!("monomial {m:?} already has order below {b}"))),
    }
}

fn contact_step(ctx: &mut Ctx, jp: Ideal, c: u32, e: &[String], depth: usize) -> Result<Vec<String>> {
    let ring = jp.vars().clone();
    let t = derivative_ideal(&jp, c - 1);
    let candidates = contact_candidates(&t)?;
    let mut chosen = None;
    for (h, k) in scan_pairs(&candidates, &ring, ctx.preferred) {
        let Some((coef, g)) = linear_split(h, k) else { continue };
        let name = &ring[k];
        let mut localize = Vec::new();
        if ctx.is_exceptional(name) {
            let x = Polynomial::var_at(&ring, k);
            if !ctx.may_invert(&x)? {
                continue;
            }
            localize.push(x);
        }
        if !coef.is_constant() {
            if !ctx.may_invert(&coef)? {
                continue;
            }
            localize.push(coef.clone());
        }
        chosen = Some((k, coef, g, localize));
        break;
    }

    let Some((k, coef, g, localize)) = chosen else {
        if c == 1 {
            let min = jp.minimized()?;
            if min.gens().len() == 1 {
                return tangency_center(ctx, &min.gens()[0], e);
            }
        }
        // the whole locus of order >= c, if it is a coordinate subspace
        let inverted = ctx.inverted_on(&ring);
        if let Some(sub) = as_subspace(&t, &inverted)? {
            if !sub.is_empty() {
                return blow_up_subspace(ctx, &ring, &sub);
            }
        }
        return Err(Error::NoAlgebraicContact(format!("({jp}, {c})")));
    };

    let name = ring[k].clone();
    for u in localize {
        ctx.apply(CoordinateChange::Localize { element: u })?;
    }
    let x = Polynomial::var_at(&ring, k);
    let mut jp = jp;
    if let Some(change) = straightening(&name, &x, &coef, &g) {
        jp = change.apply_ideal(&jp)?;
        ctx.apply(change)?;
    }
    if ring.len() == 1 {
        return Ok(vec![name]);
    }
    let restricted = restricted_coefficient_ideal(&jp, c, &name)?;
    if restricted.is_zero() {
        return Ok(vec![name]);
    }
    let sub_inverted = ctx.inverted_on(restricted.vars());
    if restricted.is_unit_localized(&sub_inverted)? {
        return Err(Error::UnsupportedCenter(format!("coefficient ideal of ({jp}, {c}) is a unit on {{{name} = 0}}")));
    }
    let sub_e: Vec<String> = e.iter().filter(|v| **v != name).cloned().collect();
    let mut center = search(ctx, restricted, factorial(c)? as u32, &sub_e, depth + 1)?;
    center.push(name);
    Ok(center)
}

/// A translated coordinate subspace: `x_k = value` for the listed variables.
type Subspace = Vec<(usize, Scalar)>;

/// The loci `V(h, x_S, ∂h/∂x_k for k ∉ S)` over subsets `S` of the
/// exceptional variables that are nonempty on the chart: where `V(h)` is
/// singular or fails to cross the exceptional divisor normally.
pub(crate) fn non_snc_loci(h: &Polynomial, e: &[String], inverted: &[Polynomial]) -> Result<Vec<Ideal>> {
    let ring = h.vars().clone();
    let e_idx: Vec<usize> = e.iter().filter_map(|v| var_index(&ring, v).ok()).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << e_idx.len()) {
        let s: Vec<usize> = (0..e_idx.len()).filter(|i| mask & (1 << i) != 0).map(|i| e_idx[i]).collect();
        let mut gens = vec![h.clone()];
        for k in 0..ring.len() {
            if s.contains(&k) {
                gens.push(Polynomial::var_at(&ring, k));
            } else {
                gens.push(h.differentiate_at(k));
            }
        }
        let piece = Ideal::new(&ring, gens);
        if !piece.is_unit_localized(inverted)? {
            out.push(piece);
        }
    }
    Ok(out)
}

/// `V(h)` is smooth and has normal crossings with the exceptional divisor on
/// the chart.
pub fn is_snc_hypersurface(chart: &Chart, h: &Polynomial) -> Result<bool> {
    Ok(non_snc_loci(h, &chart.exceptional_names(), &chart.inverted)?.is_empty())
}

/// For an order-one hypersurface `h` without usable contact, blow up the
/// locus where `V(h)` fails to have normal crossings with the exceptional
/// divisor, provided that locus is a single (translated) coordinate subspace.
fn tangency_center(ctx: &mut Ctx, h: &Polynomial, e: &[String]) -> Result<Vec<String>> {
    let ring = h.vars().clone();
    let inverted = ctx.inverted_on(&ring);
    let mut pieces: Vec<Subspace> = Vec::new();
    for piece in non_snc_loci(h, e, &inverted)? {
        match as_subspace(&piece, &inverted)? {
            Some(sub) => pieces.push(sub),
            None => {
                return Err(Error::UnsupportedCenter(format!(
                    "non-normal-crossings locus of {h} is not a coordinate subspace"
                )))
            }
        }
    }
    if pieces.is_empty() {
        return Err(Error::NoAlgebraicContact(format!("({h}) has normal crossings but no polynomial contact")));
    }
    pieces.sort_by_key(|p| p.len());
    let big = pieces[0].clone();
    for p in &pieces[1..] {
        if !big.iter().all(|fixed| p.contains(fixed)) {
            return Err(Error::UnsupportedCenter(format!("non-normal-crossings locus of {h} has several components")));
        }
    }
    if big.is_empty() {
        return Err(Error::UnsupportedCenter(format!("{h} vanishes on the whole chart")));
    }
    blow_up_subspace(ctx, &ring, &big)
}

/// Translate the subspace to the origin and return its coordinates as a center.
fn blow_up_subspace(ctx: &mut Ctx, ring: &Vars, sub: &Subspace) -> Result<Vec<String>> {
    let mut center = Vec::new();
    for (k, value) in sub {
        let name = ring[*k].clone();
        if !value.is_zero() {
            if ctx.is_exceptional(&name) {
                return Err(Error::UnsupportedCenter(format!("locus sits at {name} = {value} off the exceptional divisor")));
            }
            let x = Polynomial::var_at(ring, *k);
            let shifted = &x + &Polynomial::constant(ring, value.clone());
            ctx.apply(CoordinateChange::Substitute { var: name.clone(), numerator: shifted, denominator: Polynomial::one(ring) })?;
        }
        center.push(name);
    }
    Ok(center)
}

/// If `V(piece)` is `{x_k = p_k for k in K}` for rational `p_k`, return those
/// coordinates.
fn as_subspace(piece: &Ideal, inverted: &[Polynomial]) -> Result<Option<Subspace>> {
    let ring = piece.vars().clone();
    let mut fixed: Subspace = Vec::new();
    for k in 0..ring.len() {
        let others: Vec<String> = ring.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.clone()).collect();
        let with_units = add_inverses(piece, inverted)?;
        let mut elim_drop = others.clone();
        elim_drop.extend(with_units.1.iter().cloned());
        let univariate = with_units.0.eliminate(&elim_drop)?;
        let Some(u) = univariate.minimized()?.gens().first().cloned() else { continue };
        if let Some(root) = single_rational_root(&u) {
            fixed.push((k, root));
        }
    }
    // V(piece) is contained in the subspace; it is all of it iff every
    // generator vanishes identically there
    for g in piece.gens() {
        let mut q = g.clone();
        for (k, value) in &fixed {
            let images: Vec<Polynomial> = (0..ring.len())
                .map(|j| if j == *k { Polynomial::constant(&ring, value.clone()) } else { Polynomial::var_at(&ring, j) })
                .collect();
            q = q.compose(&images, &ring);
        }
        if !q.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(fixed))
}

/// Adjoin `1 - t_i u_i` for each inverted `u_i`, returning the extended ideal
/// and the names of the auxiliary variables.
fn add_inverses(i: &Ideal, inverted: &[Polynomial]) -> Result<(Ideal, Vec<String>)> {
    if inverted.is_empty() {
        return Ok((i.clone(), Vec::new()));
    }
    let mut aux = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for n in 0..inverted.len() {
        let mut name = format!("_u{n}");
        while i.vars().contains(&name) {
            name.push('_');
        }
        aux.push(name.clone());
        names.push(name);
    }
    names.extend(i.vars().iter().cloned());
    let ext = make_vars(&names);
    let mut gens = i.gens().iter().map(|g| g.embed(&ext)).collect::<Result<Vec<_>>>()?;
    for (n, u) in inverted.iter().enumerate() {
        let t = Polynomial::var_at(&ext, n);
        gens.push(&Polynomial::one(&ext) - &(&t * &u.embed(&ext)?));
    }
    Ok((Ideal::new(&ext, gens), aux))
}

/// `Some(p)` if `u = c (x - p)^m` for a rational `p`.
fn single_rational_root(u: &Polynomial) -> Option<Scalar> {
    let k = (0..u.nvars()).find(|&k| u.involves(k))?;
    let m = u.degree_in(k);
    let lead = u.coefficient_in(k, m).as_constant()?;
    let next = u.coefficient_in(k, m - 1).as_constant().unwrap_or_else(|| Scalar::from_integer(0.into()));
    let p = -(next / (lead.clone() * Scalar::from_integer((m as i64).into())));
    let x = Polynomial::var_at(u.vars(), k);
    let candidate = (&x - &Polynomial::constant(u.vars(), p.clone())).pow(m).scale(&lead);
    (candidate == *u).then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_many, parse_polynomial, vars};

    fn ideal(v: &Vars, gens: &[&str]) -> Ideal {
        Ideal::new(v, parse_many(gens, v).unwrap())
    }

    #[test]
    fn cusp_first_center_is_the_origin() {
        let v = vars(&["x", "y"]);
        let out = find_center(&Chart::root(&v), &ideal(&v, &["y^2 - x^3"]), 2, None).unwrap();
        assert_eq!(out.center, vec!["x", "y"]);
        assert!(out.changes.is_empty());
    }

    #[test]
    fn smooth_curve_is_straightened() {
        let v = vars(&["x", "y"]);
        let out = find_center(&Chart::root(&v), &ideal(&v, &["y - x^2"]), 1, None).unwrap();
        assert_eq!(out.center, vec!["y"]);
        assert_eq!(out.ideal.gens()[0], parse_polynomial("y", &v).unwrap());
    }

    #[test]
    fn tangent_to_the_exceptional_divisor() {
        let v = vars(&["x", "y"]);
        let chart = Chart::root(&v).with_exceptional(&["x"]).unwrap();
        let out = find_center(&chart, &ideal(&v, &["y^2 - x"]), 1, None).unwrap();
        assert_eq!(out.center, vec!["x", "y"]);
    }

    #[test]
    fn translated_locus() {
        let v = vars(&["x", "y"]);
        let chart = Chart::root(&v).with_exceptional(&["x", "y"]).unwrap();
        let out = find_center(&chart, &ideal(&v, &["y - 1"]), 1, None).unwrap();
        // y is a unit along y = 1, so it is inverted and then translated
        assert_eq!(out.center, vec!["y"]);
        assert_eq!(out.chart.exceptional_names(), vec!["x"]);
        assert_eq!(out.ideal.gens()[0], parse_polynomial("y", &v).unwrap());
    }

    #[test]
    fn monomial_centers() {
        let v = vars(&["x", "y"]);
        let chart = Chart::root(&v).with_exceptional(&["x", "y"]).unwrap();
        let out = find_center(&chart, &ideal(&v, &["x^2*y"]), 3, None).unwrap();
        assert_eq!(out.center, vec!["x", "y"]);
        let out = find_center(&chart, &ideal(&v, &["x^2*y"]), 2, None).unwrap();
        assert_eq!(out.center, vec!["x"]);
    }

    #[test]
    fn rational_roots() {
        let v = vars(&["x"]);
        assert_eq!(single_rational_root(&parse_polynomial("(x - 3/2)^3", &v).unwrap()), Some(Scalar::new(3.into(), 2.into())));
        assert_eq!(single_rational_root(&parse_polynomial("x^2 - 1", &v).unwrap()), None);
    }
}
