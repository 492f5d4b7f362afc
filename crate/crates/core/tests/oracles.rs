mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use res_kernel::ideal::Ideal;
use res_kernel::poly::{scalar, vars, Monomial, Polynomial};
use res_kernel::toric::{resolve_fan_2d, Fan};

use common::{degree_bound, hull_rays, Macaulay};

fn poly_strategy(n: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0u32..=2, n), -3i64..=3), 1..=3)
}

fn build(n: usize, terms: &[(Vec<u32>, i64)]) -> Polynomial {
    let v = vars(&["x", "y", "z"][..n]);
    Polynomial::from_terms(&v, terms.iter().map(|(e, c)| (Monomial::new(e.clone()), scalar(*c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn membership_agrees_with_macaulay(
        n in 1usize..=3,
        a in poly_strategy(3),
        b in poly_strategy(3),
        m in poly_strategy(3),
        noise in poly_strategy(3),
    ) {
        let trim = |t: &Vec<(Vec<u32>, i64)>| t.iter().map(|(e, c)| (e[..n].to_vec(), *c)).collect::<Vec<_>>();
        let gens: Vec<Polynomial> = [trim(&a), trim(&b)].iter().map(|t| build(n, t)).filter(|p| !p.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let v = gens[0].vars().clone();
        let ideal = Ideal::new(&v, gens.clone());
        let basis = ideal.basis().unwrap().polynomials();
        let d0 = degree_bound(&gens, &basis, 20).expect("degree bound");
        let inside = &(&build(n, &trim(&m)) * &gens[0]) + gens.last().unwrap();
        let outside = &inside + &build(n, &trim(&noise));
        for p in [inside, outside, Polynomial::var_at(&v, 0)] {
            let d = p.degree().unwrap_or(0) + d0;
            prop_assert_eq!(Macaulay::new(&gens, d).contains(&p), ideal.contains(&p).unwrap(), "{} in {}", p, ideal);
        }
    }

    #[test]
    fn basis_elements_reduce_to_zero_and_lie_in_the_ideal(
        n in 1usize..=3,
        a in poly_strategy(3),
        b in poly_strategy(3),
    ) {
        let trim = |t: &Vec<(Vec<u32>, i64)>| t.iter().map(|(e, c)| (e[..n].to_vec(), *c)).collect::<Vec<_>>();
        let gens: Vec<Polynomial> = [trim(&a), trim(&b)].iter().map(|t| build(n, t)).filter(|p| !p.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let v = gens[0].vars().clone();
        let ideal = Ideal::new(&v, gens.clone());
        let basis = ideal.basis().unwrap();
        let d0 = degree_bound(&gens, &basis.polynomials(), 20);
        prop_assert!(d0.is_some(), "basis of {} not in any Macaulay span", ideal);
        for g in &gens {
            prop_assert!(basis.reduce(g).is_zero());
        }
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                prop_assert!(basis.reduce(&basis.s_polynomial(i, j)).is_zero());
            }
        }
    }

    #[test]
    fn cone_resolution_matches_the_lattice_hull(
        a in 1i64..=9,
        b in -9i64..=9,
        c in -9i64..=9,
        d in 1i64..=9,
    ) {
        // u = (a, b), v = (c, d) counterclockwise
        let det = a * d - b * c;
        prop_assume!(det > 1 && a.gcd(&b) == 1 && c.gcd(&d) == 1);
        let fan: Fan = format!("dim 2\n{a},{b}; {c},{d}\n").parse().unwrap();
        let res = resolve_fan_2d(&fan).unwrap();
        let old = fan.rays();
        let mut rays: Vec<(i64, i64)> = res
            .rays()
            .iter()
            .filter(|r| !old.contains(r))
            .map(|r| (i64::try_from(&r[0]).unwrap(), i64::try_from(&r[1]).unwrap()))
            .collect();
        // sort counterclockwise from u
        rays.sort_by(|p, q| (p.0 * q.1 - p.1 * q.0).cmp(&0).reverse());
        prop_assert_eq!(rays, hull_rays((a, b), (c, d)));
        for cone in res.cones() {
            let r = cone.rays();
            let m = &r[0][0] * &r[1][1] - &r[0][1] * &r[1][0];
            prop_assert!(m == BigInt::from(1) || m == BigInt::from(-1));
        }
    }
}
