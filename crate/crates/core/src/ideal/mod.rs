//! Ideals of a polynomial ring and their decision procedures.

mod groebner;
mod order;

use std::fmt;
use std::sync::{Arc, OnceLock};

pub use groebner::{
    groebner_basis, groebner_basis_capped, set_spair_cap, spair_cap, spair_cap_from_env, GroebnerBasis,
    DEFAULT_SPAIR_CAP,
};
pub use order::MonomialOrder;

use crate::error::{Error, Result};
use crate::poly::{var_index, vars as make_vars, Polynomial, Vars};

/// How [`Ideal::combine`] merges two ideals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    Sum,
    Product,
    /// k-fold power of the left operand; the right operand is ignored.
    Power(u32),
}

/// A finitely generated ideal over a fixed variable list.
///
/// The graded reverse lex basis is computed lazily and cached.
#[derive(Clone)]
pub struct Ideal {
    vars: Vars,
    gens: Vec<Polynomial>,
    basis: Arc<OnceLock<GroebnerBasis>>,
}

impl Ideal {
    /// Build an ideal; zero generators are dropped. Panics if a generator lives
    /// over a different variable list.
    pub fn new(vars: &Vars, gens: impl IntoIterator<Item = Polynomial>) -> Ideal {
        let gens: Vec<Polynomial> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        for g in &gens {
            assert!(g.vars()[..] == vars[..], "generator over {:?}, ideal over {:?}", g.vars(), vars);
        }
        Ideal { vars: vars.clone(), gens, basis: Arc::new(OnceLock::new()) }
    }

    /// Like [`Ideal::new`], but reports a mismatched generator as an error.
    pub fn try_new(vars: &Vars, gens: impl IntoIterator<Item = Polynomial>) -> Result<Ideal> {
        let gens: Vec<Polynomial> = gens.into_iter().collect();
        if let Some(g) = gens.iter().find(|g| g.vars()[..] != vars[..]) {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", g.vars(), vars)));
        }
        Ok(Ideal::new(vars, gens))
    }

    pub fn principal(f: Polynomial) -> Ideal {
        let vars = f.vars().clone();
        Ideal::new(&vars, [f])
    }

    pub fn unit(vars: &Vars) -> Ideal {
        Ideal::new(vars, [Polynomial::one(vars)])
    }

    pub fn zero(vars: &Vars) -> Ideal {
        Ideal::new(vars, [])
    }

    /// The ideal generated by the named variables.
    pub fn of_variables<S: AsRef<str>>(vars: &Vars, names: &[S]) -> Result<Ideal> {
        let gens = names.iter().map(|n| Polynomial::var(vars, n.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(vars, gens))
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Reduced basis for an arbitrary order (not cached).
    pub fn groebner_basis(&self, order: MonomialOrder) -> Result<GroebnerBasis> {
        groebner_basis(&self.vars, &self.gens, order)
    }

    /// Cached graded reverse lex basis.
    pub fn basis(&self) -> Result<&GroebnerBasis> {
        if let Some(b) = self.basis.get() {
            return Ok(b);
        }
        let b = groebner_basis(&self.vars, &self.gens, MonomialOrder::GRevLex)?;
        Ok(self.basis.get_or_init(|| b))
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool> {
        check(&self.vars, p)?;
        if p.is_zero() {
            return Ok(true);
        }
        Ok(self.basis()?.contains(p))
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        for g in &other.gens {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality as ideals (mutual membership).
    pub fn same_ideal(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }

    pub fn is_unit(&self) -> Result<bool> {
        if self.gens.iter().any(Polynomial::is_constant) {
            return Ok(true);
        }
        if self.gens.is_empty() {
            return Ok(false);
        }
        Ok(self.basis()?.is_unit())
    }

    /// The ideal generated by its reduced graded reverse lex basis.
    pub fn minimized(&self) -> Result<Ideal> {
        let gens = self.basis()?.polynomials();
        let out = Ideal::new(&self.vars, gens);
        let _ = out.basis.set(self.basis()?.clone());
        Ok(out)
    }

    pub fn combine(&self, other: &Ideal, mode: Combine) -> Result<Ideal> {
        if let Combine::Power(k) = mode {
            return Ok(self.power(k));
        }
        if self.vars[..] != other.vars[..] {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", self.vars, other.vars)));
        }
        Ok(match mode {
            Combine::Sum => self.sum(other),
            _ => self.product(other),
        })
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        Ideal::new(&self.vars, self.gens.iter().chain(&other.gens).cloned())
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for f in &self.gens {
            for g in &other.gens {
                gens.push(f * g);
            }
        }
        Ideal::new(&self.vars, dedup(gens))
    }

    pub fn power(&self, k: u32) -> Ideal {
        let mut acc = Ideal::unit(&self.vars);
        for _ in 0..k {
            acc = acc.product(self);
        }
        acc
    }

    /// Apply `f` to every generator.
    pub fn map(&self, target: &Vars, f: impl Fn(&Polynomial) -> Polynomial) -> Ideal {
        Ideal::new(target, self.gens.iter().map(f))
    }

    /// `I : f^∞`, computed by eliminating `t` from `I + (1 - t f)`.
    pub fn saturate(&self, f: &Polynomial) -> Result<Ideal> {
        check(&self.vars, f)?;
        if f.is_zero() {
            return Err(Error::InvalidArgument("cannot saturate by zero".into()));
        }
        if f.is_constant() || self.is_zero() {
            return Ok(self.clone());
        }
        let (ext, t) = self.with_aux_variable()?;
        let mut gens: Vec<Polynomial> = self.gens.iter().map(|g| g.embed(&ext)).collect::<Result<_>>()?;
        let tf = &t * &f.embed(&ext)?;
        gens.push(&Polynomial::one(&ext) - &tf);
        let basis = groebner_basis(&ext, &gens, MonomialOrder::Block(1))?;
        let kept = basis.polynomials().into_iter().filter(|g| !g.involves(0));
        let out = kept.map(|g| g.embed(&self.vars)).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(&self.vars, out))
    }

    /// `I ∩ k[remaining variables]`, returned over the remaining variables in
    /// their original order.
    pub fn eliminate<S: AsRef<str>>(&self, drop: &[S]) -> Result<Ideal> {
        let mut dropped = Vec::new();
        for name in drop {
            let i = var_index(&self.vars, name.as_ref())?;
            if !dropped.contains(&i) {
                dropped.push(i);
            }
        }
        if dropped.is_empty() {
            return Ok(self.clone());
        }
        let kept_names: Vec<String> =
            (0..self.vars.len()).filter(|i| !dropped.contains(i)).map(|i| self.vars[i].clone()).collect();
        let mut order_names: Vec<String> = dropped.iter().map(|&i| self.vars[i].clone()).collect();
        order_names.extend(kept_names.iter().cloned());
        let ext = make_vars(&order_names);
        let target = make_vars(&kept_names);
        let gens = self.gens.iter().map(|g| g.embed(&ext)).collect::<Result<Vec<_>>>()?;
        let basis = groebner_basis(&ext, &gens, MonomialOrder::Block(dropped.len()))?;
        let k = dropped.len();
        let out = basis
            .polynomials()
            .into_iter()
            .filter(|g| (0..k).all(|i| !g.involves(i)))
            .map(|g| g.embed(&target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(&target, out))
    }

    /// Whether `I` becomes the unit ideal after inverting every element of
    /// `inverted`.
    pub fn is_unit_localized(&self, inverted: &[Polynomial]) -> Result<bool> {
        if inverted.is_empty() {
            return self.is_unit();
        }
        if self.is_unit()? {
            return Ok(true);
        }
        self.localized_check(inverted, None)
    }

    /// Membership of `p` in `I` after inverting every element of `inverted`.
    pub fn contains_localized(&self, p: &Polynomial, inverted: &[Polynomial]) -> Result<bool> {
        if self.contains(p)? {
            return Ok(true);
        }
        if inverted.is_empty() {
            return Ok(false);
        }
        self.localized_check(inverted, Some(p))
    }

    fn localized_check(&self, inverted: &[Polynomial], p: Option<&Polynomial>) -> Result<bool> {
        let (ext, t) = self.with_aux_variable()?;
        let mut g = Polynomial::one(&ext);
        for h in inverted {
            check(&self.vars, h)?;
            g = &g * &h.embed(&ext)?;
        }
        let mut gens: Vec<Polynomial> = self.gens.iter().map(|f| f.embed(&ext)).collect::<Result<_>>()?;
        gens.push(&Polynomial::one(&ext) - &(&t * &g));
        let basis = groebner_basis(&ext, &gens, MonomialOrder::GRevLex)?;
        Ok(match p {
            None => basis.is_unit(),
            Some(p) => basis.contains(&p.embed(&ext)?),
        })
    }

    fn with_aux_variable(&self) -> Result<(Vars, Polynomial)> {
        let mut name = String::from("_t");
        while self.vars.contains(&name) {
            name.push('_');
        }
        let mut names = vec![name];
        names.extend(self.vars.iter().cloned());
        let ext = make_vars(&names);
        let t = Polynomial::var_at(&ext, 0);
        Ok((ext, t))
    }
}

fn check(vars: &Vars, p: &Polynomial) -> Result<()> {
    if p.vars()[..] != vars[..] {
        return Err(Error::RingMismatch(format!("{:?} vs {:?}", p.vars(), vars)));
    }
    Ok(())
}

fn dedup(mut gens: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::with_capacity(gens.len());
    for g in gens.drain(..) {
        let m = g.monic();
        if !out.iter().any(|h| h.monic() == m) {
            out.push(g);
        }
    }
    out
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{self}")
    }
}
