//! Maximal contact, coefficient ideals and homogenization.

use std::cmp::Ordering;

use crate::chart::CoordinateChange;
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{derivative_ideal, MarkedIdeal};
use crate::poly::{var_index, vars as make_vars, Polynomial, Scalar, Vars};

/// Largest mark for which coefficient ideals are formed.
pub const MAX_COEFFICIENT_MARK: u32 = 8;

/// A hypersurface of maximal contact `h = 0` and the coordinate change that
/// turns `h` into the chart variable `hypersurface_var`.
#[derive(Clone, Debug)]
pub struct ContactDatum {
    pub element: Polynomial,
    pub straightening: Option<CoordinateChange>,
    pub hypersurface_var: String,
}

pub(crate) fn factorial(a: u32) -> Result<u64> {
    if a > MAX_COEFFICIENT_MARK {
        return Err(Error::MarkTooLarge(a as u64));
    }
    Ok((1..=a as u64).product())
}

/// Order contact candidates: lower degree first, then fewer terms, then larger
/// graded-lex terms.
pub(crate) fn candidate_cmp(a: &Polynomial, b: &Polynomial) -> Ordering {
    a.degree().cmp(&b.degree()).then(a.num_terms().cmp(&b.num_terms())).then_with(|| {
        for ((ma, _), (mb, _)) in a.terms().rev().zip(b.terms().rev()) {
            match mb.cmp(ma) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    })
}

/// Generators and reduced basis elements of `t`, monic, deduplicated, in scan order.
pub(crate) fn contact_candidates(t: &Ideal) -> Result<Vec<Polynomial>> {
    let mut out: Vec<Polynomial> = Vec::new();
    for g in t.gens().iter().cloned().chain(t.basis()?.polynomials()) {
        let g = g.monic();
        if !g.is_constant() && !out.contains(&g) {
            out.push(g);
        }
    }
    out.sort_by(candidate_cmp);
    Ok(out)
}

/// Split `h = c * x_k + g` with `c`, `g` free of `x_k`, if `h` has degree one in `x_k`.
pub(crate) fn linear_split(h: &Polynomial, k: usize) -> Option<(Polynomial, Polynomial)> {
    if h.degree_in(k) != 1 {
        return None;
    }
    Some((h.coefficient_in(k, 1), h.coefficient_in(k, 0)))
}

/// The straightening `x_k(old) = (x_k - g) / c` for `h = c x_k + g`, or `None`
/// when `h` is already a multiple of `x_k`.
pub(crate) fn straightening(var: &str, x: &Polynomial, c: &Polynomial, g: &Polynomial) -> Option<CoordinateChange> {
    if g.is_zero() {
        return None;
    }
    Some(CoordinateChange::Substitute { var: var.to_string(), numerator: x - g, denominator: c.clone() })
}

/// First element of `T(I, a)` of the form `c x_j + g` with `c` a nonzero
/// constant, `g` free of `x_j`, and `x_j` not exceptional.
pub fn find_maximal_contact(m: &MarkedIdeal, preferred: Option<&str>) -> Result<ContactDatum> {
    let vars = m.ideal.vars().clone();
    let t = m.t_ideal();
    let candidates = contact_candidates(&t)?;
    for (h, k) in scan_pairs(&candidates, &vars, preferred) {
        if m.exceptional.iter().any(|(v, _)| *v == vars[k]) {
            continue;
        }
        let Some((c, g)) = linear_split(h, k) else { continue };
        if !c.is_constant() {
            continue;
        }
        let x = Polynomial::var_at(&vars, k);
        return Ok(ContactDatum {
            straightening: straightening(&vars[k], &x, &c, &g),
            element: h.clone(),
            hypersurface_var: vars[k].clone(),
        });
    }
    Err(Error::NoAlgebraicContact(format!("({}, {})", m.ideal, m.mark)))
}

/// (candidate, variable) pairs in scan order. A preferred variable is tried
/// against every candidate before any other variable.
pub(crate) fn scan_pairs<'a>(
    candidates: &'a [Polynomial],
    vars: &Vars,
    preferred: Option<&str>,
) -> Vec<(&'a Polynomial, usize)> {
    let pref = preferred.and_then(|p| var_index(vars, p).ok());
    let mut out = Vec::new();
    if let Some(k) = pref {
        out.extend(candidates.iter().map(|h| (h, k)));
    }
    for h in candidates {
        out.extend((0..vars.len()).filter(|&k| Some(k) != pref).map(|k| (h, k)));
    }
    out
}

/// Depress `f` in `var`: `var -> var - (coefficient of var^{a-1}) / a`.
pub fn tschirnhaus(f: &Polynomial, var: &str, a: u32) -> Result<CoordinateChange> {
    let k = var_index(f.vars(), var)?;
    let lead = f.coefficient_in(k, a);
    if a == 0 || f.degree_in(k) != a || lead.as_constant() != Some(Scalar::from_integer(1.into())) {
        return Err(Error::NotMonic { var: var.to_string(), degree: a });
    }
    let sub = f.coefficient_in(k, a - 1).scale(&Scalar::new(1.into(), (a as i64).into()));
    let x = Polynomial::var_at(f.vars(), k);
    Ok(CoordinateChange::Substitute { var: var.to_string(), numerator: &x - &sub, denominator: Polynomial::one(f.vars()) })
}

/// Set `var = 0` and drop it from the ring.
pub fn restrict_to_hypersurface(i: &Ideal, var: &str) -> Result<Ideal> {
    let k = var_index(i.vars(), var)?;
    let names: Vec<String> = i.vars().iter().filter(|v| *v != var).cloned().collect();
    let target = make_vars(&names);
    Ok(Ideal::new(&target, i.gens().iter().map(|g| g.restrict_to_zero(k, &target))))
}

/// `(C(I, a), a!)` with `C(I, a) = Σ_{i<a} (D^{≤i} I)^{a!/(a-i)}`.
pub fn coefficient_ideal(m: &MarkedIdeal) -> Result<MarkedIdeal> {
    let a = m.mark;
    let fact = factorial(a)?;
    let mut acc = Ideal::zero(m.ideal.vars());
    for i in 0..a {
        let d = derivative_ideal(&m.ideal, i).minimized()?;
        acc = acc.sum(&power_minimized(&d, (fact / (a - i) as u64) as u32)?);
    }
    Ok(MarkedIdeal { ideal: acc.minimized()?, mark: fact as u32, exceptional: m.exceptional.clone() })
}

/// `C(I, a)` restricted to `var = 0`, restricting each derivative ideal before
/// taking powers.
pub fn restricted_coefficient_ideal(i: &Ideal, a: u32, var: &str) -> Result<Ideal> {
    let fact = factorial(a)?;
    let mut acc: Option<Ideal> = None;
    for k in 0..a {
        let d = restrict_to_hypersurface(&derivative_ideal(i, k), var)?.minimized()?;
        let p = power_minimized(&d, (fact / (a - k) as u64) as u32)?;
        acc = Some(match acc {
            None => p,
            Some(s) => s.sum(&p),
        });
    }
    acc.expect("mark is at least 1").minimized()
}

/// `H(I, a) = Σ_{i=0}^{a} D^{≤i}(I) T(I, a)^i`.
pub fn homogenization(m: &MarkedIdeal) -> Result<Ideal> {
    let t = m.t_ideal().minimized()?;
    let mut acc = Ideal::zero(m.ideal.vars());
    let mut t_pow = Ideal::unit(m.ideal.vars());
    for i in 0..=m.mark {
        let d = derivative_ideal(&m.ideal, i).minimized()?;
        acc = acc.sum(&d.product(&t_pow));
        t_pow = t_pow.product(&t).minimized()?;
    }
    acc.minimized()
}

fn power_minimized(i: &Ideal, k: u32) -> Result<Ideal> {
    if i.is_zero() {
        return Ok(if k == 0 { Ideal::unit(i.vars()) } else { i.clone() });
    }
    let mut acc = Ideal::unit(i.vars());
    for _ in 0..k {
        acc = acc.product(i).minimized()?;
    }
    Ok(acc)
}
