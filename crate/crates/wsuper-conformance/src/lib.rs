//! Reference oracles and sampling helpers for the acceptance suite.
//!
//! Everything here is computed without the engine's rewriting or module
//! code, so it can stand as an independent check of those paths.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wsuper::envelope::{Mono, Poly};
use wsuper::highest::VermaTruncation;
use wsuper::linalg::{self, Matrix};
use wsuper::scalar::Scalar;
use wsuper::wgen::{Role, WAlgebra};

/// Number of PBW monomials of each lowering degree `0..=n`: the
/// coefficients of `∏ (1 + t)` over odd lowering generators times
/// `∏ 1/(1 − t)` over even ones, doubled once for Θ_F.
pub fn pbw_counts(w: &WAlgebra, n: usize) -> Vec<usize> {
    let mut series = vec![0usize; n + 1];
    series[0] = 1;
    for g in w.gens() {
        match g.role {
            Role::ThetaF => series.iter_mut().for_each(|x| *x *= 2),
            Role::Lowering if g.parity => {
                for d in (1..=n).rev() {
                    series[d] += series[d - 1];
                }
            }
            Role::Lowering => {
                for d in 1..=n {
                    series[d] += series[d - 1];
                }
            }
            _ => {}
        }
    }
    series
}

/// Basis vectors of a truncation counted by lowering degree.
pub fn degree_histogram(z: &VermaTruncation) -> Vec<usize> {
    let mut h = vec![0usize; z.bound + 1];
    for &d in &z.lowering_degree {
        h[d] += 1;
    }
    h
}

/// Weight-space dimensions keyed by the rendered weight.
pub fn weight_dims(z: &VermaTruncation) -> BTreeMap<Vec<String>, usize> {
    z.weight_spaces().iter().map(|s| (render(&s.weight), s.dim())).collect()
}

/// The same, with each weight first mapped through `p`.
pub fn weight_dims_moved(z: &VermaTruncation, p: &Matrix) -> BTreeMap<Vec<String>, usize> {
    z.weight_spaces().iter().map(|s| (render(&linalg::mat_vec(p, &s.weight)), s.dim())).collect()
}

fn render(f: &[Scalar]) -> Vec<String> {
    f.iter().map(|x| x.render()).collect()
}

pub fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Scalar {
    Scalar::frac(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// A random polynomial in the W generators, already in PBW form: at most
/// three monomials of at most three factors, odd exponents at most one.
pub fn random_pbw_element(w: &WAlgebra, rng: &mut ChaCha8Rng) -> Poly {
    let n = w.gens().len();
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(0..=3);
        let mut idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
        idx.sort();
        let mut m: Mono = Vec::new();
        for g in idx {
            match m.last_mut() {
                Some((lg, e)) if *lg as usize == g => *e += 1,
                _ => m.push((g as u16, 1)),
            }
        }
        if m.iter().any(|&(g, e)| e > 1 && w.gens()[g as usize].parity) {
            continue;
        }
        p.add_term(m, small_rational(rng, 5, 4));
    }
    p
}

/// A random invertible `n × n` rational matrix.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    loop {
        let m: Matrix = (0..n).map(|_| (0..n).map(|_| small_rational(rng, 4, 3)).collect()).collect();
        if linalg::inverse(&m).is_some() {
            return m;
        }
    }
}

/// A uniformly shuffled `0..n`.
pub fn random_order(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use wsuper::wgen::Flavor;

    #[test]
    fn pbw_counts_spo23() {
        // x1 even, g1 odd, F: 2·(1 + t)/(1 − t) = 2 + 4t + 4t² + …
        let w = WAlgebra::from_spec("spo:2|3", Flavor::Finite).unwrap();
        assert_eq!(pbw_counts(&w, 4), vec![2, 4, 4, 4, 4]);
    }

    #[test]
    fn pbw_counts_osp12() {
        let w = WAlgebra::from_spec("osp:1|2", Flavor::Finite).unwrap();
        assert_eq!(pbw_counts(&w, 3), vec![2, 0, 0, 0]);
    }
}
