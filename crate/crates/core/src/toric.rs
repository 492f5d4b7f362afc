//! Rational polyhedral cones and fans over the lattice Z^d.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Ray = Vec<BigInt>;

fn ray_string(r: &[BigInt]) -> String {
    let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn ray(v: &[i64]) -> Ray {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn is_primitive(r: &[BigInt]) -> bool {
    r.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
}

fn det2(a: &[BigInt], b: &[BigInt]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Determinant of a square integer matrix (Bareiss).
fn det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn rank(rows: &[Ray]) -> usize {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rk = 0;
    for c in 0..ncols {
        let Some(p) = (rk..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rk, p);
        for i in 0..m.len() {
            if i != rk && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[rk][c];
                for j in c..ncols {
                    let d = &f * &m[rk][j];
                    m[i][j] -= d;
                }
            }
        }
        rk += 1;
    }
    rk
}

/// Coefficients of `v` in the span of the linearly independent `cols`.
fn solve(cols: &[&Ray], v: &[BigInt]) -> Option<Vec<BigRational>> {
    let d = v.len();
    let k = cols.len();
    // augmented d x (k+1)
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| BigRational::from_integer(c[i].clone())).collect();
            row.push(BigRational::from_integer(v[i].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let p = (r..d).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..=k {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..d {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=k {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(r);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&i| m[i][k].clone()).collect())
}

/// A rational polyhedral cone given by primitive ray generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    rays: Vec<Ray>,
}

impl Cone {
    /// The cone spanned by `rays`. Rays must be primitive, pairwise
    /// non-parallel and irredundant, and the cone strongly convex.
    pub fn new(rays: Vec<Ray>) -> Result<Cone> {
        if let Some(d) = rays.first().map(|r| r.len()) {
            if let Some(r) = rays.iter().find(|r| r.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: r.len() });
            }
        }
        for r in &rays {
            if !is_primitive(r) {
                return Err(Error::InvalidFan(format!("ray {} is not primitive", ray_string(r))));
            }
        }
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if rank(&[rays[i].clone(), rays[j].clone()]) < 2 {
                    return Err(Error::InvalidFan(format!(
                        "rays {} and {} are parallel",
                        ray_string(&rays[i]),
                        ray_string(&rays[j])
                    )));
                }
            }
        }
        let cone = Cone { rays };
        if !cone.is_simplicial() {
            for (i, r) in cone.rays.iter().enumerate() {
                let others = Cone { rays: cone.rays.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.clone()).collect() };
                if others.contains(r) {
                    return Err(Error::InvalidFan(format!("ray {} is redundant", ray_string(r))));
                }
                let neg: Ray = r.iter().map(|x| -x).collect();
                if cone.contains(&neg) {
                    return Err(Error::InvalidFan("cone is not strongly convex".into()));
                }
            }
        }
        Ok(cone)
    }

    pub fn from_i64(rays: &[&[i64]]) -> Result<Cone> {
        Cone::new(rays.iter().map(|r| ray(r)).collect())
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        rank(&self.rays)
    }

    pub fn is_simplicial(&self) -> bool {
        rank(&self.rays) == self.rays.len()
    }

    pub fn has_ray(&self, r: &[BigInt]) -> bool {
        self.rays.iter().any(|x| x.as_slice() == r)
    }

    /// Nonnegative coefficients expressing `v` in the rays of a simplicial cone.
    fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigRational>> {
        let cols: Vec<&Ray> = self.rays.iter().collect();
        let c = solve(&cols, v)?;
        c.iter().all(|x| !x.is_negative()).then_some(c)
    }

    /// `v` lies in the cone (exact; Carathéodory over simplicial subcones).
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        if self.is_simplicial() {
            return self.coordinates(v).is_some();
        }
        let d = v.len();
        for k in 1..=d.min(self.rays.len()) {
            for idx in combinations(self.rays.len(), k) {
                let sub: Vec<&Ray> = idx.iter().map(|&i| &self.rays[i]).collect();
                if rank(&sub.iter().map(|r| (*r).clone()).collect::<Vec<_>>()) < k {
                    continue;
                }
                if let Some(c) = solve(&sub, v) {
                    if c.iter().all(|x| !x.is_negative()) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Faces of a simplicial cone (all subsets of its rays).
    pub fn faces(&self) -> Result<Vec<Cone>> {
        if !self.is_simplicial() {
            return Err(Error::NonSimplicial);
        }
        let mut out = Vec::new();
        for k in 0..=self.rays.len() {
            for idx in combinations(self.rays.len(), k) {
                out.push(Cone { rays: idx.iter().map(|&i| self.rays[i].clone()).collect() });
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rays.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Lattice index of the span of the rays in its saturation: gcd of the
/// maximal minors.
pub fn multiplicity(c: &Cone) -> Result<BigInt> {
    if !c.is_simplicial() {
        return Err(Error::NonSimplicial);
    }
    let k = c.rays.len();
    if k == 0 {
        return Ok(BigInt::one());
    }
    let d = c.rays[0].len();
    let mut g = BigInt::zero();
    for cols in combinations(d, k) {
        let m: Vec<Vec<BigInt>> = c.rays.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
        g = g.gcd(&det(&m));
        if g.is_one() {
            break;
        }
    }
    Ok(g)
}

pub fn cone_is_smooth(c: &Cone) -> bool {
    c.is_simplicial() && multiplicity(c).is_ok_and(|m| m.is_one())
}

/// A fan, stored by its maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    cones: Vec<Cone>,
}

impl Fan {
    /// Drops cones that are faces of other listed cones. In dimension 2 the
    /// cones are checked to meet along common faces.
    pub fn new(dim: usize, cones: Vec<Cone>) -> Result<Fan> {
        for c in &cones {
            if let Some(r) = c.rays.iter().find(|r| r.len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
        }
        let mut maximal: Vec<Cone> = Vec::new();
        for (i, c) in cones.iter().enumerate() {
            let dominated = cones.iter().enumerate().any(|(j, o)| {
                j != i && c.rays.iter().all(|r| o.has_ray(r)) && (o.rays.len() > c.rays.len() || j < i)
            });
            if !dominated {
                maximal.push(c.clone());
            }
        }
        let fan = Fan { dim, cones: maximal };
        if dim == 2 {
            fan.check_planar()?;
        }
        Ok(fan)
    }

    fn check_planar(&self) -> Result<()> {
        for (i, a) in self.cones.iter().enumerate() {
            for b in &self.cones[i + 1..] {
                // an interior point of one cone inside the other, or a ray of
                // one strictly inside the other, means a bad intersection
                for (p, q) in [(a, b), (b, a)] {
                    let mid: Ray = p.rays.iter().fold(vec![BigInt::zero(); 2], |acc, r| vec![&acc[0] + &r[0], &acc[1] + &r[1]]);
                    let mid_in = !p.rays.is_empty() && q.contains(&mid) && !(p.rays.len() == 1 && q.has_ray(&p.rays[0]));
                    let ray_inside = p.rays.iter().any(|r| q.contains(r) && !q.has_ray(r));
                    if mid_in || ray_inside {
                        return Err(Error::InvalidFan(format!("cones <{p}> and <{q}> overlap")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// All rays of the fan, deduplicated, in order of first appearance.
    pub fn rays(&self) -> Vec<Ray> {
        let mut out: Vec<Ray> = Vec::new();
        for c in &self.cones {
            for r in &c.rays {
                if !out.contains(r) {
                    out.push(r.clone());
                }
            }
        }
        out
    }

    pub fn in_support(&self, v: &[BigInt]) -> bool {
        self.cones.iter().any(|c| c.contains(v))
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for c in &self.cones {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Fan {
    type Err = Error;

    /// `dim d` followed by one cone per line, rays separated by `;` or wrapped
    /// in brackets, entries by commas or spaces. Blank lines and `#` comments are ignored.
    fn from_str(s: &str) -> Result<Fan> {
        let mut lines = s.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidFan("empty input".into()))?;
        let dim: usize = header
            .strip_prefix("dim")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| Error::InvalidFan(format!("expected `dim d`, got `{header}`")))?;
        let mut cones = Vec::new();
        for line in lines {
            let mut rays = Vec::new();
            // bracketed rays need no separator
            let parts: Vec<&str> = if line.starts_with(['(', '<', '[']) {
                line.split([')', '>', ']'])
                    .map(|p| p.trim().trim_start_matches(';').trim())
                    .filter(|p| !p.is_empty())
                    .collect()
            } else {
                line.split(';').collect()
            };
            for part in parts {
                let part = part.trim().trim_start_matches(['(', '<', '[']).trim_end_matches([')', '>', ']']);
                let r: Ray = part
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<BigInt>().map_err(|_| Error::InvalidFan(format!("bad integer `{t}`"))))
                    .collect::<Result<_>>()?;
                if r.len() != dim {
                    return Err(Error::InvalidFan(format!("ray `{part}` does not have {dim} entries")));
                }
                rays.push(r);
            }
            cones.push(Cone::new(rays).map_err(|e| match e {
                Error::InvalidFan(_) => e,
                other => Error::InvalidFan(other.to_string()),
            })?);
        }
        Fan::new(dim, cones)
    }
}

/// Insert `ray`: every cone containing it is replaced by the joins of the ray
/// with its faces not containing the minimal face through the ray.
pub fn stellar_subdivide(fan: &Fan, ray: &[BigInt]) -> Result<Fan> {
    if ray.len() != fan.dim {
        return Err(Error::DimensionMismatch { expected: fan.dim, found: ray.len() });
    }
    if !is_primitive(ray) {
        return Err(Error::InvalidArgument(format!("ray {} is not primitive", ray_string(ray))));
    }
    if !fan.in_support(ray) {
        return Err(Error::RayOutsideSupport(ray_string(ray)));
    }
    let mut out = Vec::new();
    for c in &fan.cones {
        if c.has_ray(ray) || !c.contains(ray) {
            out.push(c.clone());
            continue;
        }
        let coords = c.coordinates(ray).ok_or(Error::NonSimplicial)?;
        for (j, cj) in coords.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let mut rays = c.rays.clone();
            rays[j] = ray.to_vec();
            out.push(Cone { rays });
        }
    }
    Fan::new(fan.dim, out)
}

/// Minimal resolution of a 2-dimensional fan by Hirzebruch–Jung continued
/// fractions.
pub fn resolve_fan_2d(fan: &Fan) -> Result<Fan> {
    if fan.dim != 2 {
        return Err(Error::InvalidArgument(format!("resolve_fan_2d needs dimension 2, got {}", fan.dim)));
    }
    let mut out = Vec::new();
    for c in &fan.cones {
        if c.rays.len() < 2 {
            out.push(c.clone());
            continue;
        }
        for r in hj_rays(&c.rays[0], &c.rays[1]).windows(2) {
            out.push(Cone { rays: vec![r[0].clone(), r[1].clone()] });
        }
    }
    Fan::new(2, out)
}

/// The chain `u = w_0, w_1, ..., w_s = v` of the minimal resolution of <u, v>.
pub fn hj_rays(u: &[BigInt], v: &[BigInt]) -> Vec<Ray> {
    let (mut a, b) = if det2(u, v).is_positive() { (u.to_vec(), v.to_vec()) } else { (v.to_vec(), u.to_vec()) };
    let mut chain = vec![a.clone()];
    loop {
        let m = det2(&a, &b);
        if m.is_one() {
            break;
        }
        // w = (b + k a)/m with det(a, w) = 1; choose 0 < k < m making it integral
        let k = (1..)
            .map(BigInt::from)
            .find(|k| (&b[0] + k * &a[0]).is_multiple_of(&m) && (&b[1] + k * &a[1]).is_multiple_of(&m))
            .expect("a is primitive");
        let w: Ray = vec![(&b[0] + &k * &a[0]) / &m, (&b[1] + &k * &a[1]) / &m];
        chain.push(w.clone());
        a = w;
    }
    chain.push(b);
    if det2(u, v).is_negative() {
        chain.reverse();
    }
    chain
}

pub fn is_regular_fan(fan: &Fan) -> bool {
    fan.cones.iter().all(cone_is_smooth)
}

/// Every cone of `fine` lies in some cone of `coarse`.
pub fn refines(fine: &Fan, coarse: &Fan) -> bool {
    fine.cones.iter().all(|c| coarse.cones.iter().any(|o| c.rays.iter().all(|r| o.contains(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fan(s: &str) -> Fan {
        s.parse().unwrap()
    }

    #[test]
    fn smoothness() {
        assert!(cone_is_smooth(&Cone::from_i64(&[&[1, 0], &[0, 1]]).unwrap()));
        assert!(!cone_is_smooth(&Cone::from_i64(&[&[1, 0], &[1, 2]]).unwrap()));
        assert!(cone_is_smooth(&Cone::from_i64(&[&[1, 0, 0], &[0, 1, 0]]).unwrap()));
        assert!(!cone_is_smooth(&Cone::from_i64(&[&[1, 0, 0], &[1, 2, 0]]).unwrap()));
        assert!(cone_is_smooth(&Cone::from_i64(&[&[1, 1, 0], &[0, 1, 1]]).unwrap()));
    }

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(&Cone::from_i64(&[&[1, 0], &[1, 2]]).unwrap()).unwrap(), BigInt::from(2));
        for n in 1..9 {
            assert_eq!(multiplicity(&Cone::from_i64(&[&[1, 0], &[1, n]]).unwrap()).unwrap(), BigInt::from(n));
        }
        let square = Cone::from_i64(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]).unwrap();
        assert_eq!(multiplicity(&square), Err(Error::NonSimplicial));
        assert!(!cone_is_smooth(&square));
    }

    #[test]
    fn invalid_cones() {
        assert!(Cone::from_i64(&[&[2, 0]]).is_err());
        assert!(Cone::from_i64(&[&[1, 0], &[2, 1], &[1, 1]]).is_err());
        assert!(Cone::from_i64(&[&[1, 0], &[0, 1], &[-1, 0]]).is_err());
    }

    #[test]
    fn plane_blow_up() {
        let f = fan("dim 2\n1,0; 0,1\n");
        let g = stellar_subdivide(&f, &ray(&[1, 1])).unwrap();
        assert_eq!(g.cones().len(), 2);
        assert!(is_regular_fan(&g));
        assert_eq!(g.to_string(), "dim 2\n1,1; 0,1\n1,0; 1,1\n");
        assert_eq!(stellar_subdivide(&g, &ray(&[1, 1])).unwrap(), g);
        assert!(matches!(stellar_subdivide(&f, &ray(&[-1, 1])), Err(Error::RayOutsideSupport(_))));
    }

    #[test]
    fn quadric_cone_split() {
        let f = fan("dim 2\n(1,0); (1,2)");
        let g = stellar_subdivide(&f, &ray(&[1, 1])).unwrap();
        for c in g.cones() {
            assert_eq!(multiplicity(c).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn three_dim_subdivision() {
        let f = fan("dim 3\n1,0,0; 0,1,0; 0,0,1");
        let g = stellar_subdivide(&f, &ray(&[1, 1, 1])).unwrap();
        assert_eq!(g.cones().len(), 3);
        assert!(is_regular_fan(&g));
        let h = stellar_subdivide(&f, &ray(&[1, 1, 0])).unwrap();
        assert_eq!(h.cones().len(), 2);
        assert!(refines(&h, &f));
    }

    #[test]
    fn hj_examples() {
        for n in 2..13 {
            let f: Fan = format!("dim 2\n1,0; 1,{n}").parse().unwrap();
            let r = resolve_fan_2d(&f).unwrap();
            assert_eq!(r.cones().len() as i64, n);
            assert!(is_regular_fan(&r) && refines(&r, &f));
            let mut rays = r.rays();
            rays.sort();
            let mut want: Vec<Ray> = (0..=n).map(|k| ray(&[1, k])).collect();
            want.sort();
            assert_eq!(rays, want);
        }
        let f = fan("dim 2\n1,0; 2,3");
        let r = resolve_fan_2d(&f).unwrap();
        assert!(is_regular_fan(&r));
        assert_eq!(hj_rays(&ray(&[1, 0]), &ray(&[2, 3])), vec![ray(&[1, 0]), ray(&[1, 1]), ray(&[2, 3])]);
        let g = fan("dim 2\n1,0; 1,1\n1,1; 0,1");
        assert_eq!(resolve_fan_2d(&g).unwrap(), g);
    }

    #[test]
    fn trivial_fans() {
        assert!(is_regular_fan(&fan("dim 2")));
        assert!(is_regular_fan(&Fan::new(3, vec![Cone::new(vec![]).unwrap()]).unwrap()));
        assert!(!is_regular_fan(&fan("dim 2\n1,0; 1,2\n1,2; 0,1")));
    }

    #[test]
    fn overlapping_cones_rejected() {
        assert!("dim 2\n1,0; 0,1\n1,1; -1,1".parse::<Fan>().is_err());
        assert!("dim 2\n1,0; 0,1\n1,1".parse::<Fan>().is_err());
        assert!("dim 2\n1,0; 0,1\n0,1; -1,0\n-1,0; 0,-1\n0,-1; 1,0".parse::<Fan>().is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<Fan>().is_err());
        assert!("dim x".parse::<Fan>().is_err());
        assert!("dim 2\n1,0,0".parse::<Fan>().is_err());
        assert!("dim 2\n1,a".parse::<Fan>().is_err());
    }

    proptest! {
        #[test]
        fn hj_is_regular_and_refines(a in -9i64..10, b in -9i64..10, c in -9i64..10, d in -9i64..10) {
            let u = ray(&[a, b]);
            let v = ray(&[c, d]);
            prop_assume!(is_primitive(&u) && is_primitive(&v) && !det2(&u, &v).is_zero());
            let f = Fan::new(2, vec![Cone::new(vec![u, v]).unwrap()]).unwrap();
            let r = resolve_fan_2d(&f).unwrap();
            prop_assert!(is_regular_fan(&r));
            prop_assert!(refines(&r, &f));
        }

        #[test]
        fn stellar_split_multiplicity(n in 2i64..20, p in 1i64..19, q in 1i64..19) {
            // <(1,0),(1,n)> split at an interior primitive ray
            let r = ray(&[p, q]);
            let f = Fan::new(2, vec![Cone::from_i64(&[&[1, 0], &[1, n]]).unwrap()]).unwrap();
            prop_assume!(is_primitive(&r) && f.in_support(&r) && !f.cones()[0].has_ray(&r));
            let g = stellar_subdivide(&f, &r).unwrap();
            prop_assert_eq!(g.cones().len(), 2);
            // det(u,v) * w = det(w,v) * u + det(u,w) * v
            let total: BigInt = g.cones().iter().map(|c| multiplicity(c).unwrap()).sum();
            let weighted = det2(&ray(&[1, 0]), &r) + det2(&r, &ray(&[1, n]));
            prop_assert_eq!(total, weighted);
            // support preserved on a sample point
            let s = ray(&[2 * n, n * n]);
            prop_assert_eq!(f.in_support(&s), g.in_support(&s));
        }
    }
}
