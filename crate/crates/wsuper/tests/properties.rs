//! Property tests for the structural invariants.

use std::collections::HashMap;

use proptest::prelude::*;

use wsuper::envelope::{oracle_normal_form, EnvelopingAlgebra, Mono, Poly, Rewriter};
use wsuper::grading::{GradingOptions, MinimalGrading};
use wsuper::highest::{
    central_character, matchability_defect, matchability_remainder, psi_c, psi_difference, reflected_partner,
    MatchablePair,
};
use wsuper::linalg::{self, Matrix};
use wsuper::scalar::{rat, Scalar};
use wsuper::superalgebra::{build_from_spec, Family, LieSuperalgebra};
use wsuper::wgen::{Flavor, WAlgebra};

thread_local! {
    static SPO23: WAlgebra = WAlgebra::from_spec("spo:2|3", Flavor::Finite).unwrap();
    static SPO25: WAlgebra = WAlgebra::from_spec("spo:2|5", Flavor::Finite).unwrap();
    static SL21: LieSuperalgebra = build_from_spec("sl:2|1").unwrap();
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Scalar::frac(n, d))
}

/// Elements of ℚ(√2, √−3).
fn tower_element() -> impl Strategy<Value = Scalar> {
    (rational(), rational(), rational(), rational()).prop_map(|(a, b, c, d)| {
        let r2 = Scalar::sqrt_of(&rat(2, 1));
        let r3 = Scalar::sqrt_of(&rat(-3, 1));
        let r6 = &r2 * &r3;
        &(&(&a + &(&b * &r2)) + &(&c * &r3)) + &(&d * &r6)
    })
}

fn lambda(rank: usize) -> impl Strategy<Value = Vec<Scalar>> {
    proptest::collection::vec(rational(), rank)
}

fn pbw_poly(w: &WAlgebra, raw: &[(Vec<usize>, Scalar)]) -> Poly {
    let n = w.gens().len();
    let mut p = Poly::zero();
    for (idx, c) in raw {
        let mut idx: Vec<usize> = idx.iter().map(|&i| i % n).collect();
        idx.sort();
        let mut m: Mono = Vec::new();
        for g in idx {
            match m.last_mut() {
                Some((lg, e)) if *lg as usize == g => *e += 1,
                _ => m.push((g as u16, 1)),
            }
        }
        if m.iter().all(|&(g, e)| e == 1 || !w.gens()[g as usize].parity) {
            p.add_term(m, c.clone());
        }
    }
    p
}

fn raw_poly() -> impl Strategy<Value = Vec<(Vec<usize>, Scalar)>> {
    proptest::collection::vec((proptest::collection::vec(0usize..64, 0..=3), rational()), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn scalar_field_laws(x in tower_element(), y in tower_element(), z in tower_element()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
        prop_assert_eq!(Scalar::parse(&x.render()).unwrap(), x.clone());
        prop_assert!((&x - &x).terms().is_empty());
    }

    #[test]
    fn poly_stores_no_zero_terms(raw in raw_poly()) {
        SPO23.with(|w| {
            let p = pbw_poly(w, &raw);
            let mut q = p.clone();
            q.add_scaled(&p, &-Scalar::one());
            prop_assert!(q.is_zero() && q.is_empty());
            prop_assert!(p.terms.iter().all(|(_, c)| !c.is_zero()));
            Ok(())
        })?;
    }

    #[test]
    fn normal_form_matches_oracle(word in proptest::collection::vec(0usize..8, 1..=4), perm_seed in any::<u64>()) {
        SL21.with(|g| {
            let n = g.dim();
            let mut order: Vec<usize> = (0..n).collect();
            let mut s = perm_seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (s >> 33) as usize % (i + 1));
            }
            let alg = EnvelopingAlgebra::with_order(g, order, HashMap::new());
            let ug = Rewriter::new(alg.clone());
            let pos: Vec<usize> = word.iter().map(|&b| alg.pos(b % n)).collect();
            prop_assert_eq!(ug.word(&pos), oracle_normal_form(&alg, &pos));
            Ok(())
        })?;
    }

    #[test]
    fn bracket_is_super_skew_and_jacobi(
        a in proptest::collection::vec(rational(), 8),
        b in proptest::collection::vec(rational(), 8),
        i in 0usize..8,
    ) {
        SL21.with(|g| {
            // homogeneous components of random elements
            let even = |v: &Vec<Scalar>| -> Vec<Scalar> {
                v.iter().enumerate().map(|(k, c)| if g.parity[k] { Scalar::zero() } else { c.clone() }).collect()
            };
            let x = even(&a);
            let y = b.clone();
            let z = g.basis_elem(i);
            let xy = g.bracket(&x, &y);
            let yx = g.bracket(&y, &x);
            prop_assert!(xy.iter().zip(&yx).all(|(p, q)| (p + q).is_zero()));
            // x even: [x,[y,z]] = [[x,y],z] + [y,[x,z]]
            let lhs = g.bracket(&x, &g.bracket(&y, &z));
            let r1 = g.bracket(&xy, &z);
            let r2 = g.bracket(&y, &g.bracket(&x, &z));
            prop_assert!(lhs.iter().zip(r1.iter().zip(&r2)).all(|(l, (p, q))| (l - &(p + q)).is_zero()));
            prop_assert_eq!(g.form_of(&xy, &z), g.form_of(&x, &g.bracket(&y, &z)));
            Ok(())
        })?;
    }

    #[test]
    fn straightening_round_trip(raw in raw_poly()) {
        SPO23.with(|w| {
            let p = pbw_poly(w, &raw);
            prop_assert_eq!(w.basis.coordinates(&w.basis.evaluate(&p)).unwrap(), p);
            Ok(())
        })?;
    }

    #[test]
    fn presentation_is_associative(a in 0usize..8, b in 0usize..8, c in 0usize..8, d in 0usize..8) {
        SPO23.with(|w| {
            let rw = Rewriter::new(w.presentation().unwrap());
            let x = rw.word(&[a, b]);
            let y = Poly::gen(c);
            let z = rw.word(&[d, a]);
            prop_assert_eq!(rw.mul(&rw.mul(&x, &y), &z), rw.mul(&x, &rw.mul(&y, &z)));
            Ok(())
        })?;
    }

    #[test]
    fn products_stay_invariant(a in 0usize..8, b in 0usize..8) {
        SPO23.with(|w| {
            let x = w.element(w.gens()[a].lift.clone()).unwrap();
            let y = w.element(w.gens()[b].lift.clone()).unwrap();
            let xy = w.w_multiply(&x, &y).unwrap();
            prop_assert!(xy.kdeg <= x.kdeg + y.kdeg);
            prop_assert_eq!(w.ctx.is_invariant(&xy.value, &w.invariance_span()), (true, None));
            Ok(())
        })?;
    }

    #[test]
    fn psi_forms_agree(l in lambda(2)) {
        SPO25.with(|w| {
            let cc = central_character(w, &l, None).unwrap();
            prop_assert_eq!(Some(cc.psi_c), cc.expanded);
            Ok(())
        })?;
    }

    #[test]
    fn remainder_is_quarter_defect(l in lambda(1), c in rational(), k in 0usize..3) {
        SPO23.with(|w| {
            let pair = MatchablePair { lambda: l, c };
            let quarter = &Scalar::frac(1, 4) * &matchability_defect(w, &pair).unwrap();
            let m: Mono = if k == 0 { vec![] } else { vec![((k - 1) as u16, 1)] };
            let r = matchability_remainder(w, &pair, &m).unwrap();
            prop_assert_eq!(r, Poly::monomial(m, quarter));
            Ok(())
        })?;
    }

    #[test]
    fn reflection_is_an_involution_within_a_block(l in lambda(2)) {
        SPO25.with(|w| {
            let mu = reflected_partner(w, &l).unwrap();
            prop_assert_eq!(reflected_partner(w, &mu).unwrap(), l.clone());
            prop_assert!(psi_difference(w, &l, &mu, None).unwrap().is_zero());
            prop_assert_eq!(psi_c(w, &mu, None).unwrap(), psi_c(w, &l, None).unwrap());
            Ok(())
        })?;
    }
}

fn invertible(entries: &[Scalar], n: usize) -> Option<Matrix> {
    let m: Matrix = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
    linalg::inverse(&m).map(|_| m)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn grading_scalars_ignore_the_he_basis(entries in proptest::collection::vec(rational(), 4)) {
        let Some(p) = invertible(&entries, 2) else { return Ok(()) };
        for spec in ["spo:2|5", "sl:3|1"] {
            let fam = Family::parse(spec).unwrap();
            let g0 = MinimalGrading::build(&fam, &GradingOptions::default()).unwrap();
            let g1 = MinimalGrading::build(&fam, &GradingOptions { theta_hint: None, he_change: Some(p.clone()) }).unwrap();
            prop_assert_eq!((g0.s, g0.r), (g1.s, g1.r));
            let (w0, w1) = (g0.weights_delta_rho(), g1.weights_delta_rho());
            prop_assert_eq!(&linalg::mat_vec(&p, &w0.delta_bar), &w1.delta_bar);
            prop_assert_eq!(&linalg::mat_vec(&p, &w0.rho_bar), &w1.rho_bar);
            prop_assert_eq!(w0.pair(&w0.delta_bar, &w0.delta_bar), w1.pair(&w1.delta_bar, &w1.delta_bar));
            prop_assert_eq!(w0.pair(&w0.rho_bar, &w0.delta_bar), w1.pair(&w1.rho_bar, &w1.delta_bar));
            prop_assert_eq!(
                w0.pair(&w0.rho_e0_bar, &w0.rho_e0_bar),
                w1.pair(&w1.rho_e0_bar, &w1.rho_e0_bar)
            );
        }
    }
}
