//! Affine blow-up charts and the total, controlled and strict transforms.
//!
//! Charts keep their variable names through blow-ups: in the `x_i` chart of a
//! center `V(x_S)`, the old `x_j` (`j ∈ S`, `j ≠ i`) becomes `x_i * x_j` and the
//! new coordinate keeps the name `x_j`.
//!
//! A chart may also be an open subset of an affine space: `inverted` lists the
//! polynomials that are units on it.

use std::fmt;

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::poly::{var_index, Monomial, Polynomial, Vars};

/// A tracked change of coordinates on a chart.
#[derive(Clone, Debug, PartialEq)]
pub enum CoordinateChange {
    /// Restrict to the open set where `element` does not vanish.
    Localize { element: Polynomial },
    /// The old coordinate `var` equals `numerator / denominator` in the new
    /// coordinates. The denominator must be a unit on the chart and neither
    /// polynomial may involve `var`.
    Substitute { var: String, numerator: Polynomial, denominator: Polynomial },
}

impl CoordinateChange {
    /// Express `p` in the new coordinates. Substitutions clear denominators,
    /// which multiplies by a unit of the chart.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        match self {
            CoordinateChange::Localize { .. } => Ok(p.clone()),
            CoordinateChange::Substitute { var, numerator, denominator } => {
                let k = var_index(p.vars(), var)?;
                let num = numerator.embed(p.vars())?;
                let den = denominator.embed(p.vars())?;
                Ok(p.substitute_fraction(k, &num, &den))
            }
        }
    }

    pub fn apply_ideal(&self, i: &Ideal) -> Result<Ideal> {
        let gens = i.gens().iter().map(|g| self.apply(g)).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(i.vars(), gens))
    }
}

impl fmt::Display for CoordinateChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordinateChange::Localize { element } => write!(f, "invert {element}"),
            CoordinateChange::Substitute { var, numerator, denominator } => {
                if denominator.as_constant().is_some_and(|c| c == num_traits::One::one()) {
                    write!(f, "{var} = {numerator}")
                } else {
                    write!(f, "{var} = ({numerator})/({denominator})")
                }
            }
        }
    }
}

/// One entry of a chart's history.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartEvent {
    Change(CoordinateChange),
    BlowUp { center: Vec<String>, chart_var: String },
}

/// An affine coordinate patch.
#[derive(Clone, Debug)]
pub struct Chart {
    pub id: String,
    pub vars: Vars,
    /// Exceptional coordinates with the stage at which each was created.
    pub exceptional: Vec<(String, u32)>,
    pub inverted: Vec<Polynomial>,
    pub log: Vec<ChartEvent>,
}

/// A chart produced by a blow-up, with the pullback of every parent coordinate.
#[derive(Clone, Debug)]
pub struct BlowUpChart {
    pub chart: Chart,
    pub chart_var: String,
    pub images: Vec<Polynomial>,
}

impl Chart {
    pub fn root(vars: &Vars) -> Chart {
        Chart { id: "root".into(), vars: vars.clone(), exceptional: Vec::new(), inverted: Vec::new(), log: Vec::new() }
    }

    /// Declare initial exceptional coordinates (stage 0).
    pub fn with_exceptional<S: AsRef<str>>(mut self, names: &[S]) -> Result<Chart> {
        for n in names {
            let n = n.as_ref();
            var_index(&self.vars, n)?;
            if !self.is_exceptional(n) {
                self.exceptional.push((n.to_string(), 0));
            }
        }
        Ok(self)
    }

    pub fn is_exceptional(&self, name: &str) -> bool {
        self.exceptional.iter().any(|(v, _)| v == name)
    }

    pub fn exceptional_names(&self) -> Vec<String> {
        self.exceptional.iter().map(|(v, _)| v.clone()).collect()
    }

    /// Whether `p` is a unit on this chart.
    pub fn is_unit(&self, p: &Polynomial) -> Result<bool> {
        if p.is_zero() {
            return Ok(false);
        }
        if p.is_constant() {
            return Ok(true);
        }
        Ideal::principal(p.clone()).is_unit_localized(&self.inverted)
    }

    /// Apply a coordinate change to the chart itself (not to any ideal).
    pub fn apply_change(&mut self, change: &CoordinateChange) -> Result<()> {
        match change {
            CoordinateChange::Localize { element } => {
                let e = element.embed(&self.vars)?;
                if e.is_zero() {
                    return Err(Error::InvalidArgument("cannot invert zero".into()));
                }
                let content = e.monomial_content();
                let vars = self.vars.clone();
                self.exceptional.retain(|(v, _)| {
                    let k = var_index(&vars, v).expect("exceptional variables are chart variables");
                    content.exponents()[k] == 0
                });
                if !e.is_constant() && !self.inverted.contains(&e) {
                    self.inverted.push(e);
                }
            }
            CoordinateChange::Substitute { var, numerator, denominator } => {
                let k = var_index(&self.vars, var)?;
                if self.is_exceptional(var) {
                    return Err(Error::InvalidArgument(format!("cannot move exceptional coordinate `{var}`")));
                }
                let num = numerator.embed(&self.vars)?;
                let den = denominator.embed(&self.vars)?;
                if den.involves(k) || num.degree_in(k) > 1 {
                    return Err(Error::InvalidArgument(format!("substitution for `{var}` is not invertible")));
                }
                if !self.is_unit(&den)? {
                    return Err(Error::InvalidArgument(format!("denominator {den} is not a unit on the chart")));
                }
                let inverted = self.inverted.iter().map(|g| change.apply(g)).collect::<Result<Vec<_>>>()?;
                self.inverted = inverted.into_iter().map(|g| g.monic()).collect();
            }
        }
        self.log.push(ChartEvent::Change(change.clone()));
        Ok(())
    }

    /// The charts of the blow-up along `V(center)`, one per center variable in
    /// chart order. A single-variable center gives the same chart with that
    /// variable made exceptional.
    pub fn blow_up_charts<S: AsRef<str>>(&self, center: &[S], stage: u32) -> Result<Vec<BlowUpChart>> {
        if center.is_empty() {
            return Err(Error::InvalidArgument("empty center".into()));
        }
        let mut idx = Vec::new();
        for c in center {
            let k = var_index(&self.vars, c.as_ref())?;
            if !idx.contains(&k) {
                idx.push(k);
            }
        }
        idx.sort_unstable();
        let names: Vec<String> = idx.iter().map(|&k| self.vars[k].clone()).collect();
        let n = self.vars.len();
        let mut out = Vec::with_capacity(idx.len());
        for &i in &idx {
            let xi = Polynomial::var_at(&self.vars, i);
            let images: Vec<Polynomial> = (0..n)
                .map(|j| {
                    let xj = Polynomial::var_at(&self.vars, j);
                    if j != i && idx.contains(&j) {
                        &xi * &xj
                    } else {
                        xj
                    }
                })
                .collect();
            let name = self.vars[i].clone();
            let mut exceptional: Vec<(String, u32)> =
                self.exceptional.iter().filter(|(v, _)| *v != name).cloned().collect();
            exceptional.push((name.clone(), stage));
            exceptional.sort_by_key(|(v, _)| var_index(&self.vars, v).unwrap_or(usize::MAX));
            let inverted = self.inverted.iter().map(|g| g.compose(&images, &self.vars)).collect();
            let mut log = self.log.clone();
            log.push(ChartEvent::BlowUp { center: names.clone(), chart_var: name.clone() });
            let chart = Chart {
                id: format!("{}/{}-chart", self.id, name),
                vars: self.vars.clone(),
                exceptional,
                inverted,
                log,
            };
            out.push(BlowUpChart { chart, chart_var: name, images });
        }
        Ok(out)
    }

    /// Generators with every non-constant inverted factor divided out and
    /// scaled monic; the display form of an ideal "up to units".
    pub fn unit_normalize(&self, i: &Ideal) -> Vec<Polynomial> {
        i.gens()
            .iter()
            .map(|g| {
                let mut g = g.clone();
                for u in &self.inverted {
                    while let Some(q) = g.exact_div(u) {
                        if q.is_zero() {
                            break;
                        }
                        g = q;
                    }
                }
                g.monic()
            })
            .collect()
    }
}

impl BlowUpChart {
    pub fn pullback(&self, p: &Polynomial) -> Polynomial {
        p.compose(&self.images, &self.chart.vars)
    }

    fn exceptional_index(&self) -> usize {
        var_index(&self.chart.vars, &self.chart_var).expect("chart variable exists")
    }
}

/// `I O_{Y'}`: substitute the chart map into every generator.
pub fn total_transform(i: &Ideal, child: &BlowUpChart) -> Ideal {
    i.map(&child.chart.vars, |g| child.pullback(g))
}

/// Total transform divided by the `a`-th power of the new exceptional
/// coordinate. Inexact division means the center was not admissible.
pub fn controlled_transform(i: &Ideal, a: u32, child: &BlowUpChart) -> Result<Ideal> {
    let n = child.chart.vars.len();
    let e = Monomial::var(n, child.exceptional_index(), a);
    let mut gens = Vec::with_capacity(i.gens().len());
    for g in i.gens() {
        match child.pullback(g).div_monomial(&e) {
            Some(q) => gens.push(q),
            None => {
                return Err(Error::InadmissibleCenter {
                    center: center_of(child),
                    detail: format!("pullback of {g} is not divisible by {}^{a}", child.chart_var),
                })
            }
        }
    }
    Ok(Ideal::new(&child.chart.vars, gens))
}

/// Saturation of the total transform by the new exceptional coordinate.
pub fn strict_transform(i: &Ideal, child: &BlowUpChart) -> Result<Ideal> {
    let x = Polynomial::var_at(&child.chart.vars, child.exceptional_index());
    total_transform(i, child).saturate(&x)
}

fn center_of(child: &BlowUpChart) -> Vec<String> {
    match child.chart.log.last() {
        Some(ChartEvent::BlowUp { center, .. }) => center.clone(),
        _ => vec![child.chart_var.clone()],
    }
}
