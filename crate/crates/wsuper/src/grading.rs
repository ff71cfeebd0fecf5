//! Minimal roots, the sl(2)-triple, the short grading and adapted bases.
//!
//! All later modules work in the *adapted basis* built here:
//!
//! ```text
//! e | g(1) | h, h^e, x, x*, y, y* | u_1..u_s, v_1..v_r | f
//! ```
//!
//! which is also the PBW order used for monomials in U(g) and Q^fin.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{FieldTower, Rational, Scalar};
use crate::superalgebra::{
    self, build_algebra, classify_minimal_case, lex_positive, root_decomposition, root_value, Elem, Family,
    LieSuperalgebra, MinimalCase, RootDatum,
};

/// A linear functional on h^e, stored as its values on the h^e basis.
pub type Functional = Vec<Scalar>;

/// δ̄, ρ̄ and ρ̄_{e,0} together with the induced form on (h^e)*.
#[derive(Clone, Debug)]
pub struct WeightData {
    pub delta_bar: Functional,
    pub rho_bar: Functional,
    pub rho_e0_bar: Functional,
    /// Inverse of the Gram matrix of h^e; pairs functionals.
    pub gram_inv: Matrix,
}

impl WeightData {
    /// `(φ, ψ) = φᵀ G⁻¹ ψ`.
    pub fn pair(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        pair_with(&self.gram_inv, a, b)
    }
}

pub fn pair_with(gram_inv: &Matrix, a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() && !gram_inv[i][j].is_zero() {
                acc += &(&(x * y) * &gram_inv[i][j]);
            }
        }
    }
    acc
}

/// Named subspaces of g as lists of adapted basis indices.
#[derive(Clone, Debug, Default)]
pub struct Subalgebras {
    pub m: Vec<usize>,
    pub m_prime: Vec<usize>,
    pub n: Vec<usize>,
    pub n_prime: Vec<usize>,
    pub n0: Vec<usize>,
    pub p: Vec<usize>,
}

/// Everything attached to a minimal root.
#[derive(Clone, Debug)]
pub struct MinimalGrading {
    /// Original matrix algebra, form rescaled so that `(e, f) = 1`.
    pub base: LieSuperalgebra,
    /// Roots of `base` with the positive system adapted to θ.
    pub datum: RootDatum,
    /// Index of θ in `datum.roots`.
    pub theta: usize,
    /// The algebra re-expressed in the adapted basis.
    pub g: LieSuperalgebra,
    /// Adapted basis vectors in `base` coordinates.
    pub adapted: Vec<Elem>,
    pub e: usize,
    pub h: usize,
    pub f: usize,
    /// g(1) basis; `g1[k] = [z_k, e]` for the k-th element of `z`.
    pub g1: Vec<usize>,
    pub he: Vec<usize>,
    pub x: Vec<usize>,
    pub xs: Vec<usize>,
    pub y: Vec<usize>,
    pub ys: Vec<usize>,
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    /// `u` followed by `v`: the basis S(−1) of g(−1).
    pub z: Vec<usize>,
    /// Dual basis `z*_α` as (sign, index) with `⟨z*_α, z_β⟩ = δ_{αβ}`.
    pub zstar: Vec<(Scalar, usize)>,
    pub vmid: Option<usize>,
    pub s: usize,
    pub r: usize,
    pub odd_type: bool,
    pub case: MinimalCase,
    /// ad h eigenvalue of each adapted basis vector.
    pub degree: Vec<i64>,
    /// h^e weight of each adapted basis vector (values on the h^e basis).
    pub weight: Vec<Functional>,
    /// Root index (into `datum.roots`) of each adapted basis vector, if any.
    pub root_of: Vec<Option<usize>>,
    pub gram: Matrix,
    pub gram_inv: Matrix,
    /// E and F spanning the odd part of the osp(1|2) through θ (type odd).
    pub big_e: Option<Elem>,
    pub big_f: Option<Elem>,
    pub tower: FieldTower,
    pub subalgebras: Subalgebras,
}

/// Candidate minimal roots: even roots whose sl(2)-triple gives a short
/// grading with one-dimensional g(2).
pub fn minimal_candidates(g: &LieSuperalgebra, datum: &RootDatum) -> Vec<usize> {
    (0..datum.roots.len())
        .filter(|&i| !datum.roots[i].odd && classify_minimal_case(g, datum, i).is_ok())
        .collect()
}

fn upper_triangular(g: &LieSuperalgebra, idx: usize) -> bool {
    match g.matrices.get(idx) {
        Some(m) => m
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, x)| x.is_zero() || i < j)),
        None => false,
    }
}

/// Choose θ, honoring `hint` (an index into `datum.roots`) when valid.
pub fn select_minimal_root(g: &LieSuperalgebra, datum: &RootDatum, hint: Option<usize>) -> Result<usize> {
    let valid = minimal_candidates(g, datum);
    let list = || {
        valid
            .iter()
            .map(|&i| format!("{} ({})", i, g.labels[datum.roots[i].vector]))
            .collect::<Vec<_>>()
            .join(", ")
    };
    if let Some(hn) = hint {
        if valid.contains(&hn) {
            return Ok(hn);
        }
        return Err(Error::Selection(format!(
            "root {} is not a minimal root; valid candidates: {}",
            hn,
            list()
        )));
    }
    valid
        .iter()
        .copied()
        .find(|&i| upper_triangular(g, datum.roots[i].vector))
        .or_else(|| valid.first().copied())
        .ok_or_else(|| Error::Selection("no minimal root".into()))
}

fn rational(x: &Scalar) -> Result<Rational> {
    x.to_rational().ok_or_else(|| Error::Internal(format!("expected a rational, got {}", x)))
}

fn to_i64(x: &Scalar) -> Result<i64> {
    let q = rational(x)?;
    if !q.is_integer() {
        return Err(Error::Grading(format!("non-integral eigenvalue {}", q)));
    }
    let n: i64 = q.to_integer().try_into().map_err(|_| Error::Grading("eigenvalue overflow".into()))?;
    Ok(n)
}

/// Options for building a grading.
#[derive(Clone, Debug, Default)]
pub struct GradingOptions {
    pub theta_hint: Option<usize>,
    /// Rows are the new h^e basis vectors in terms of the canonical one.
    pub he_change: Option<Matrix>,
}

impl MinimalGrading {
    pub fn from_spec(spec: &str) -> Result<MinimalGrading> {
        Self::build(&Family::parse(spec)?, &GradingOptions::default())
    }

    pub fn build(family: &Family, opts: &GradingOptions) -> Result<MinimalGrading> {
        let mut base = build_algebra(family)?;
        let mut datum = root_decomposition(&base)?;
        let theta = select_minimal_root(&base, &datum, opts.theta_hint)?;
        let case = classify_minimal_case(&base, &datum, theta)?;
        let (e, h, f) = superalgebra::sl2_data(&base, &datum, theta)?;
        let raw = base.form_of(&e, &f);
        let kappa = raw.inv().map_err(|_| Error::Grading("(e, f) vanishes".into()))?;
        base.rescale_form(&kappa);

        // h^e = ker θ inside the Cartan subalgebra, rational basis
        let k = base.cartan.len();
        let theta_row = vec![datum.roots[theta].values.clone()];
        let canonical = linalg::nullspace(&theta_row, k);
        let he_cart: Vec<Vec<Scalar>> = match &opts.he_change {
            Some(p) => {
                if p.len() != canonical.len() || linalg::inverse(p).is_none() {
                    return Err(Error::Precondition("h^e basis change must be invertible".into()));
                }
                linalg::mat_mul(p, &canonical)
            }
            None => canonical.clone(),
        };
        let cart_to_elem = |c: &[Scalar]| -> Elem {
            let mut v = base.zero();
            for (kk, &idx) in base.cartan.iter().enumerate() {
                v[idx] = c[kk].clone();
            }
            v
        };
        let restrict = |vals: &[Scalar], basis: &[Vec<Scalar>]| -> Functional {
            basis
                .iter()
                .map(|t| {
                    let mut acc = Scalar::zero();
                    for (a, b) in vals.iter().zip(t) {
                        acc += &(a * b);
                    }
                    acc
                })
                .collect()
        };
        // positivity uses the canonical basis so it is unaffected by he_change
        let degree_of_root: Vec<i64> = datum
            .roots
            .iter()
            .map(|r| to_i64(&root_value(&base, r, &h)))
            .collect::<Result<_>>()?;
        for (i, r) in datum.roots.iter().enumerate() {
            let bar = restrict(&r.values, &canonical);
            datum.positive[i] = if bar.iter().all(|x| x.is_zero()) {
                degree_of_root[i] > 0
            } else {
                lex_positive(&bar)
            };
        }
        let bars: Vec<Functional> = datum.roots.iter().map(|r| restrict(&r.values, &he_cart)).collect();
        let canon_bars: Vec<Functional> = datum.roots.iter().map(|r| restrict(&r.values, &canonical)).collect();

        let odd_type = case.odd_type;
        let theta_vals = datum.roots[theta].values.clone();
        let half: Vec<Scalar> = theta_vals.iter().map(|x| x * &Scalar::frac(1, 2)).collect();
        let last = if odd_type {
            datum.find(&half).first().copied()
        } else {
            Some(theta)
        };
        datum.simple = datum.simple_from_positive(last);

        let roots_in = |deg: i64, odd: bool| -> Vec<usize> {
            (0..datum.roots.len())
                .filter(|&i| degree_of_root[i] == deg && datum.roots[i].odd == odd)
                .collect()
        };
        let neg_bar = |i: usize| !canon_bars[i].iter().all(|x| x.is_zero()) && !lex_positive(&canon_bars[i]);
        let pos_bar = |i: usize| lex_positive(&canon_bars[i]);
        let vec_of = |i: usize| base.basis_elem(datum.roots[i].vector);
        let chi_pair = |a: &Elem, b: &Elem| base.form_of(&e, &base.bracket(a, b));

        // Dual families: given `neg` vectors and candidate partners `pos`,
        // return partners p_j with pairing(neg_i, p_j) = target·δ_ij.
        let dualize = |neg: &[Elem], pos: &[Elem], pairing: &dyn Fn(&Elem, &Elem) -> Scalar, target: Scalar| -> Result<Vec<Elem>> {
            let n = neg.len();
            if pos.len() != n {
                return Err(Error::Grading("unbalanced root spaces".into()));
            }
            if n == 0 {
                return Ok(Vec::new());
            }
            let m: Matrix = neg.iter().map(|a| pos.iter().map(|b| pairing(a, b)).collect()).collect();
            let minv = linalg::inverse(&m).ok_or_else(|| Error::Grading("degenerate pairing".into()))?;
            // p_j = Σ_k pos_k · (M⁻¹)_{kj} · target
            Ok((0..n)
                .map(|j| {
                    let mut acc = base.zero();
                    for (kk, pk) in pos.iter().enumerate() {
                        let c = &minv[kk][j] * &target;
                        if !c.is_zero() {
                            acc = superalgebra::lin_comb(&Scalar::one(), &acc, &c, pk);
                        }
                    }
                    acc
                })
                .collect())
        };

        // g(0): x (even, negative), x*; y (odd, negative), y*
        let form_pair = |a: &Elem, b: &Elem| base.form_of(b, a); // (p, n)
        let x_roots: Vec<usize> = roots_in(0, false).into_iter().filter(|&i| neg_bar(i)).collect();
        let xs_roots: Vec<usize> = roots_in(0, false).into_iter().filter(|&i| pos_bar(i)).collect();
        let y_roots: Vec<usize> = roots_in(0, true).into_iter().filter(|&i| neg_bar(i)).collect();
        let ys_roots: Vec<usize> = roots_in(0, true).into_iter().filter(|&i| pos_bar(i)).collect();
        let x_vecs: Vec<Elem> = x_roots.iter().map(|&i| vec_of(i)).collect();
        let y_vecs: Vec<Elem> = y_roots.iter().map(|&i| vec_of(i)).collect();
        let xs_vecs = dualize(&x_vecs, &xs_roots.iter().map(|&i| vec_of(i)).collect::<Vec<_>>(), &form_pair, Scalar::one())?;
        let ys_vecs = dualize(&y_vecs, &ys_roots.iter().map(|&i| vec_of(i)).collect::<Vec<_>>(), &form_pair, Scalar::one())?;

        // g(−1)
        let u_neg_roots: Vec<usize> = roots_in(-1, false).into_iter().filter(|&i| neg_bar(i)).collect();
        let u_pos_roots: Vec<usize> = roots_in(-1, false).into_iter().filter(|&i| pos_bar(i)).collect();
        let v_neg_roots: Vec<usize> = roots_in(-1, true).into_iter().filter(|&i| neg_bar(i)).collect();
        let v_pos_roots: Vec<usize> = roots_in(-1, true).into_iter().filter(|&i| pos_bar(i)).collect();
        let v_zero_roots: Vec<usize> = roots_in(-1, true)
            .into_iter()
            .filter(|&i| !neg_bar(i) && !pos_bar(i))
            .collect();
        if !roots_in(-1, false).iter().all(|&i| neg_bar(i) || pos_bar(i)) {
            return Err(Error::Grading("even g(-1) root with zero h^e weight".into()));
        }
        if v_zero_roots.len() > 1 {
            return Err(Error::UnsupportedFamily("g(-1) has a multi-dimensional h^e-weight-zero odd part".into()));
        }
        let u_neg: Vec<Elem> = u_neg_roots.iter().map(|&i| vec_of(i)).collect();
        let v_neg: Vec<Elem> = v_neg_roots.iter().map(|&i| vec_of(i)).collect();
        let u_star = dualize(&u_neg, &u_pos_roots.iter().map(|&i| vec_of(i)).collect::<Vec<_>>(), &chi_pair, -Scalar::one())?;
        let v_star = dualize(&v_neg, &v_pos_roots.iter().map(|&i| vec_of(i)).collect::<Vec<_>>(), &chi_pair, Scalar::one())?;
        let mut tower = FieldTower::rationals();
        let vmid_vec = match v_zero_roots.first() {
            Some(&i) => {
                let v0 = vec_of(i);
                let c = chi_pair(&v0, &v0);
                let cq = rational(&c)?;
                tower = tower.adjoin_sqrt(&cq)?;
                let root = Scalar::sqrt_of(&cq);
                Some(superalgebra::scale(&root.inv()?, &v0))
            }
            None => None,
        };
        let mut u_list = u_neg.clone();
        u_list.extend(u_star.iter().rev().cloned());
        let mut v_list = v_neg.clone();
        if let Some(vm) = &vmid_vec {
            v_list.push(vm.clone());
        }
        v_list.extend(v_star.iter().rev().cloned());
        let s = u_list.len();
        let r = v_list.len();
        if (r % 2 == 1) != odd_type {
            return Err(Error::Consistency("parity type disagrees with dim g(-1)_odd".into()));
        }

        // adapted basis
        let mut adapted: Vec<Elem> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let push = |adapted: &mut Vec<Elem>, labels: &mut Vec<String>, v: Elem, l: String| -> usize {
            adapted.push(v);
            labels.push(l);
            adapted.len() - 1
        };
        let ie = push(&mut adapted, &mut labels, e.clone(), "e".into());
        let mut z_labels = Vec::new();
        for i in 0..s {
            z_labels.push(format!("u{}", i + 1));
        }
        for i in 0..r {
            z_labels.push(format!("v{}", i + 1));
        }
        let z_vecs: Vec<Elem> = u_list.iter().chain(v_list.iter()).cloned().collect();
        let mut g1 = Vec::new();
        for (zv, zl) in z_vecs.iter().zip(&z_labels) {
            let w = base.bracket(zv, &e);
            g1.push(push(&mut adapted, &mut labels, w, format!("[{},e]", zl)));
        }
        let ih = push(&mut adapted, &mut labels, h.clone(), "h".into());
        let mut he = Vec::new();
        for (i, t) in he_cart.iter().enumerate() {
            he.push(push(&mut adapted, &mut labels, cart_to_elem(t), format!("t{}", i + 1)));
        }
        let mut x = Vec::new();
        for (i, v) in x_vecs.iter().enumerate() {
            x.push(push(&mut adapted, &mut labels, v.clone(), format!("x{}", i + 1)));
        }
        let mut xs = Vec::new();
        for (i, v) in xs_vecs.iter().enumerate() {
            xs.push(push(&mut adapted, &mut labels, v.clone(), format!("x*{}", i + 1)));
        }
        let mut y = Vec::new();
        for (i, v) in y_vecs.iter().enumerate() {
            y.push(push(&mut adapted, &mut labels, v.clone(), format!("y{}", i + 1)));
        }
        let mut ys = Vec::new();
        for (i, v) in ys_vecs.iter().enumerate() {
            ys.push(push(&mut adapted, &mut labels, v.clone(), format!("y*{}", i + 1)));
        }
        let mut z = Vec::new();
        for (zv, zl) in z_vecs.iter().zip(&z_labels) {
            z.push(push(&mut adapted, &mut labels, zv.clone(), zl.clone()));
        }
        let u: Vec<usize> = z[..s].to_vec();
        let v: Vec<usize> = z[s..].to_vec();
        let vmid = if odd_type { Some(v[(r - 1) / 2]) } else { None };
        let iff = push(&mut adapted, &mut labels, f.clone(), "f".into());
        if adapted.len() != base.dim() {
            return Err(Error::Grading(format!(
                "adapted basis has {} vectors, algebra has dimension {}",
                adapted.len(),
                base.dim()
            )));
        }
        let g = base.change_basis(&adapted, labels)?;

        // dual basis of S(−1)
        let mut zstar = Vec::new();
        for a in 0..s {
            let sign = if a < s / 2 { Scalar::one() } else { -Scalar::one() };
            zstar.push((sign, u[s - 1 - a]));
        }
        for a in 0..r {
            zstar.push((Scalar::one(), v[r - 1 - a]));
        }

        // degrees and weights in the adapted basis
        let mut degree = Vec::with_capacity(g.dim());
        let mut weight = Vec::with_capacity(g.dim());
        let mut root_of = Vec::with_capacity(g.dim());
        let hev: Vec<Elem> = he.iter().map(|&i| g.basis_elem(i)).collect();
        let hadapt = g.basis_elem(ih);
        for i in 0..g.dim() {
            let xi = g.basis_elem(i);
            let d = g.bracket(&hadapt, &xi);
            let dv = d[i].clone();
            if !superalgebra::is_zero_elem(&superalgebra::lin_comb(&Scalar::one(), &d, &(-&dv), &xi)) {
                return Err(Error::Grading(format!("{} is not an ad h eigenvector", g.labels[i])));
            }
            degree.push(to_i64(&dv)?);
            let mut wt = Vec::new();
            for t in &hev {
                let br = g.bracket(t, &xi);
                let val = br[i].clone();
                if !superalgebra::is_zero_elem(&superalgebra::lin_comb(&Scalar::one(), &br, &(-&val), &xi)) {
                    return Err(Error::Grading(format!("{} is not an h^e weight vector", g.labels[i])));
                }
                wt.push(val);
            }
            weight.push(wt);
            // root lookup by matching weight and degree
            let found = (0..datum.roots.len()).find(|&ri| {
                degree_of_root[ri] == *degree.last().unwrap()
                    && bars[ri] == *weight.last().unwrap()
                    && datum.roots[ri].odd == g.parity[i]
            });
            root_of.push(if g.cartan.contains(&i) { None } else { found });
        }
        let gram: Matrix = he.iter().map(|&a| he.iter().map(|&b| g.form[a][b].clone()).collect()).collect();
        let gram_inv = if gram.is_empty() {
            Vec::new()
        } else {
            linalg::inverse(&gram).ok_or_else(|| Error::Grading("degenerate form on h^e".into()))?
        };

        let (big_e, big_f) = match vmid {
            Some(vm) => {
                tower = tower.adjoin_sqrt(&Rational::from_integer((-2).into()))?;
                let s2 = Scalar::sqrt_of(&Rational::from_integer((-2).into()));
                let fv = superalgebra::scale(&s2, &g.basis_elem(vm));
                let ev = g.bracket(&fv, &g.basis_elem(ie));
                (Some(ev), Some(fv))
            }
            None => (None, None),
        };
        for row in &g.table {
            for entries in row {
                for (_, c) in entries {
                    for m in c.radicands() {
                        tower = tower.adjoin_sqrt(&Rational::from_integer(m.into()))?;
                    }
                }
            }
        }

        let mut grading = MinimalGrading {
            base,
            datum,
            theta,
            g,
            adapted,
            e: ie,
            h: ih,
            f: iff,
            g1,
            he,
            x,
            xs,
            y,
            ys,
            u,
            v,
            z,
            zstar,
            vmid,
            s,
            r,
            odd_type,
            case,
            degree,
            weight,
            root_of,
            gram,
            gram_inv,
            big_e,
            big_f,
            tower,
            subalgebras: Subalgebras::default(),
        };
        grading.subalgebras = grading.admissible_subalgebras();
        Ok(grading)
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn rank_he(&self) -> usize {
        self.he.len()
    }

    /// Basis of g(i) as adapted indices.
    pub fn space(&self, i: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.degree[k] == i).collect()
    }

    /// (even, odd) dimensions of g(i) for i = −2..2.
    pub fn dims_per_degree(&self) -> Vec<(usize, usize)> {
        (-2..=2)
            .map(|i| {
                let sp = self.space(i);
                let odd = sp.iter().filter(|&&k| self.g.parity[k]).count();
                (sp.len() - odd, odd)
            })
            .collect()
    }

    /// g^e(0) basis: h^e, x, x*, y, y*.
    pub fn ge0(&self) -> Vec<usize> {
        let mut out = self.he.clone();
        out.extend(&self.x);
        out.extend(&self.xs);
        out.extend(&self.y);
        out.extend(&self.ys);
        out
    }

    /// `χ(x) = (e, x)` for a basis vector.
    pub fn chi(&self, i: usize) -> Scalar {
        self.g.form[self.e][i].clone()
    }

    /// `⟨a, b⟩ = (e, [a, b])` on g(−1).
    pub fn pairing(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        self.g.form_of(&self.g.basis_elem(self.e), &self.g.bracket(a, b))
    }

    /// The ♯ map `x ↦ x − ½(h, x)h` on g(0).
    pub fn sharp(&self, x: &[Scalar]) -> Elem {
        let hv = self.g.basis_elem(self.h);
        let c = &self.g.form_of(&hv, x) * &Scalar::frac(-1, 2);
        superalgebra::lin_comb(&Scalar::one(), x, &c, &hv)
    }

    /// Values of a Cartan-weight functional (adapted coordinates) on h^e.
    pub fn restrict_root(&self, root: usize) -> Functional {
        let r = &self.datum.roots[root];
        self.he
            .iter()
            .map(|&t| root_value(&self.base, r, &self.adapted[t]))
            .collect()
    }

    fn admissible_subalgebras(&self) -> Subalgebras {
        let s2 = self.s / 2;
        let rneg = self.r / 2;
        let mut g1prime: Vec<usize> = self.u[s2..].to_vec();
        let vstart = if self.odd_type { rneg + 1 } else { rneg };
        g1prime.extend(&self.v[vstart..]);
        let mut m = vec![self.f];
        m.extend(&g1prime);
        let mut m_prime = m.clone();
        if let Some(vm) = self.vmid {
            m_prime.push(vm);
        }
        let n = vec![self.f];
        let mut n_prime = n.clone();
        n_prime.extend(&self.z);
        let mut n0 = n.clone();
        n0.extend(self.z.iter().filter(|&&k| Some(k) != self.vmid));
        let p: Vec<usize> = (0..self.dim()).filter(|&k| self.degree[k] >= 0).collect();
        Subalgebras { m, m_prime, n, n_prime, n0, p }
    }

    /// `χ([a, b]) = 0` for every pair in the span.
    pub fn chi_vanishes_on_brackets(&self, span: &[usize]) -> bool {
        let ev = self.g.basis_elem(self.e);
        span.iter().all(|&a| {
            span.iter().all(|&b| {
                let br = self.g.bracket(&self.g.basis_elem(a), &self.g.basis_elem(b));
                self.g.form_of(&ev, &br).is_zero()
            })
        })
    }

    /// The grading element h₀ ∈ h^e (coordinates on the h^e basis) with
    /// `[h₀, e_α] = ht_θ(α) e_α`.
    pub fn compute_h0(&self) -> Result<Functional> {
        if !self.odd_type {
            return Err(Error::NotApplicable("h0 is defined for type odd only".into()));
        }
        if self.he.is_empty() {
            return Ok(Vec::new());
        }
        let simple = &self.datum.simple;
        let k = simple.len();
        // rows: simple roots restricted to h^e; h0 coords c solve
        // Σ_j c_j α_i(t_j) = 1 for i < k, 0 for the last simple root
        let a: Matrix = simple.iter().map(|&i| self.restrict_root(i)).collect();
        let b: Vec<Scalar> = (0..k).map(|i| if i + 1 == k { Scalar::zero() } else { Scalar::one() }).collect();
        linalg::solve(&a, &b).ok_or_else(|| Error::Internal("h0 system inconsistent".into()))
    }

    /// `ht_θ(α)`: sum of simple-root coefficients of α, excluding the last.
    pub fn ht_theta(&self, root: usize) -> Result<Scalar> {
        let simple = &self.datum.simple;
        let k = simple.len();
        let cols: Matrix = (0..self.base.cartan.len())
            .map(|c| simple.iter().map(|&s| self.datum.roots[s].values[c].clone()).collect())
            .collect();
        let coeffs = linalg::solve(&cols, &self.datum.roots[root].values)
            .ok_or_else(|| Error::Internal("root not in the span of simple roots".into()))?;
        let mut acc = Scalar::zero();
        for c in &coeffs[..k - 1] {
            acc += c;
        }
        Ok(acc)
    }

    /// Change-of-basis matrix data for `h^e`: values of the h^e basis
    /// vectors as Cartan coordinates.
    pub fn weights_delta_rho(&self) -> WeightData {
        let half = Scalar::frac(1, 2);
        let nd = self.rank_he();
        let mut delta = vec![Scalar::zero(); nd];
        let add = |acc: &mut Functional, w: &[Scalar], c: &Scalar| {
            for (a, b) in acc.iter_mut().zip(w) {
                *a += &(c * b);
            }
        };
        for &i in &self.u[..self.s / 2] {
            add(&mut delta, &self.weight[i], &(-&half));
        }
        for &i in &self.v[..self.r / 2] {
            add(&mut delta, &self.weight[i], &half);
        }
        let mut rho = vec![Scalar::zero(); nd];
        for (ri, root) in self.datum.roots.iter().enumerate() {
            if self.datum.positive[ri] {
                let c = if root.odd { -&half } else { half.clone() };
                add(&mut rho, &self.restrict_root(ri), &c);
            }
        }
        let mut rho_e0 = vec![Scalar::zero(); nd];
        for &i in &self.xs {
            add(&mut rho_e0, &self.weight[i], &half);
        }
        for &i in &self.ys {
            add(&mut rho_e0, &self.weight[i], &(-&half));
        }
        WeightData { delta_bar: delta, rho_bar: rho, rho_e0_bar: rho_e0, gram_inv: self.gram_inv.clone() }
    }

    /// Whether `x` ∈ g lies in g^e.
    pub fn in_ge(&self, x: &[Scalar]) -> bool {
        superalgebra::is_zero_elem(&self.g.bracket(&self.g.basis_elem(self.e), x))
    }

    /// Decompose g^e into g(0)^♯ ⊕ g(1) ⊕ g(2) and return the dimensions
    /// of the kernel of ad e and of the three summands.
    pub fn ge_dimension_check(&self) -> (usize, usize, usize, usize) {
        let dim = self.dim();
        let ev = self.g.basis_elem(self.e);
        // matrix of ad e: columns are [e, x_j]
        let cols: Vec<Elem> = (0..dim).map(|j| self.g.bracket(&ev, &self.g.basis_elem(j))).collect();
        let m: Matrix = (0..dim).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let ker = linalg::nullspace(&m, dim).len();
        let g0 = self.space(0);
        let sharp_img: Matrix = g0.iter().map(|&i| self.sharp(&self.g.basis_elem(i))).collect();
        let sharp_rank = linalg::rank(&sharp_img);
        (ker, sharp_rank, self.space(1).len(), self.space(2).len())
    }

    /// Sign of a functional's lexicographic order on the canonical h^e basis.
    pub fn is_zero_functional(f: &[Scalar]) -> bool {
        f.iter().all(|x| x.is_zero())
    }
}

/// Evaluate a functional on an h^e element given by h^e coordinates.
pub fn eval_functional(f: &[Scalar], coords: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (a, b) in f.iter().zip(coords) {
        acc += &(a * b);
    }
    acc
}

/// Rational check helper used by tests and reports.
pub fn is_nonnegative_integer(x: &Scalar) -> bool {
    match x.to_rational() {
        Some(q) => q.is_integer() && !q.is_negative(),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grading(spec: &str) -> MinimalGrading {
        MinimalGrading::from_spec(spec).unwrap()
    }

    #[test]
    fn osp12_grading() {
        let gr = grading("osp:1|2");
        assert_eq!(gr.dims_per_degree(), vec![(1, 0), (0, 1), (1, 0), (0, 1), (1, 0)]);
        assert_eq!((gr.s, gr.r), (0, 1));
        assert!(gr.odd_type);
        let g = &gr.g;
        let (e, h, f) = (g.basis_elem(gr.e), g.basis_elem(gr.h), g.basis_elem(gr.f));
        assert_eq!(g.bracket(&e, &f), h);
        assert_eq!(g.form_of(&e, &f), Scalar::one());
        let big_e = gr.big_e.clone().unwrap();
        let big_f = gr.big_f.clone().unwrap();
        assert_eq!(g.bracket(&big_e, &big_f), h);
        assert_eq!(g.bracket(&big_f, &big_f), superalgebra::scale(&Scalar::from_int(-2), &f));
        assert_eq!(g.bracket(&big_e, &big_e), superalgebra::scale(&Scalar::from_int(2), &e));
        assert_eq!(g.bracket(&e, &big_f), superalgebra::scale(&Scalar::from_int(-1), &big_e));
        assert_eq!(g.bracket(&f, &big_e), superalgebra::scale(&Scalar::from_int(-1), &big_f));
        // v1 = F/√−2 has ⟨v1, v1⟩ = 1
        let v1 = g.basis_elem(gr.v[0]);
        assert_eq!(gr.pairing(&v1, &v1), Scalar::one());
        assert_eq!(gr.compute_h0().unwrap(), Vec::<Scalar>::new());
        assert_eq!(gr.subalgebras.m, vec![gr.f]);
        assert_eq!(gr.subalgebras.m_prime.len(), 2);
    }

    #[test]
    fn theta_squared_is_two() {
        for spec in ["osp:1|2", "spo:2|3", "sl:2|1", "sl:3|1", "psl:2|2", "gl:2|1", "spo:4|1"] {
            let gr = grading(spec);
            let hv = gr.g.basis_elem(gr.h);
            assert_eq!(gr.g.form_of(&hv, &hv), Scalar::from_int(2), "{}", spec);
            assert_eq!(gr.space(2).len(), 1);
            assert_eq!(gr.space(-2).len(), 1);
        }
    }

    #[test]
    fn spo23_grading() {
        let gr = grading("spo:2|3");
        assert_eq!((gr.s, gr.r), (0, 3));
        assert!(gr.odd_type);
        assert!(gr.degree.iter().all(|d| (-2..=2).contains(d)));
        // v2 spans the −θ/2 root space: zero h^e weight, degree −1
        let vm = gr.vmid.unwrap();
        assert_eq!(vm, gr.v[1]);
        assert!(gr.weight[vm].iter().all(|x| x.is_zero()));
        assert!(gr.chi_vanishes_on_brackets(&gr.subalgebras.m));
        let h0 = gr.compute_h0().unwrap();
        for (ri, _) in gr.datum.roots.iter().enumerate() {
            let ht = gr.ht_theta(ri).unwrap();
            let val = eval_functional(&gr.restrict_root(ri), &h0);
            assert_eq!(ht, val);
            assert!(ht.is_rational());
        }
    }

    #[test]
    fn pairing_invariants() {
        for spec in ["osp:1|2", "spo:2|3", "sl:2|1", "sl:3|1", "spo:4|1", "psl:2|2", "sl:1|2"] {
            let gr = grading(spec);
            let g = &gr.g;
            for (i, &a) in gr.u.iter().enumerate() {
                for (j, &b) in gr.u.iter().enumerate() {
                    let want = if i + j + 1 == gr.s {
                        if i < gr.s / 2 { -Scalar::one() } else { Scalar::one() }
                    } else {
                        Scalar::zero()
                    };
                    assert_eq!(gr.pairing(&g.basis_elem(a), &g.basis_elem(b)), want, "{} u", spec);
                }
            }
            for (i, &a) in gr.v.iter().enumerate() {
                for (j, &b) in gr.v.iter().enumerate() {
                    let want = if i + j + 1 == gr.r { Scalar::one() } else { Scalar::zero() };
                    assert_eq!(gr.pairing(&g.basis_elem(a), &g.basis_elem(b)), want, "{} v", spec);
                }
            }
            for (a, &za) in gr.z.iter().enumerate() {
                for (b, (sg, zs)) in gr.zstar.iter().enumerate() {
                    let p = &gr.pairing(&g.basis_elem(*zs), &g.basis_elem(za)) * sg;
                    assert_eq!(p, if a == b { Scalar::one() } else { Scalar::zero() }, "{}", spec);
                }
            }
            assert!(gr.chi_vanishes_on_brackets(&gr.subalgebras.m), "{}", spec);
            let m_dim = 1 + (gr.s + gr.r - gr.r % 2) / 2;
            assert_eq!(gr.subalgebras.m.len(), m_dim);
        }
    }

    #[test]
    fn ge_decomposition_dimensions() {
        for spec in ["osp:1|2", "spo:2|3", "sl:2|1", "psl:2|2"] {
            let gr = grading(spec);
            let (ker, sharp, g1, g2) = gr.ge_dimension_check();
            assert_eq!(ker, sharp + g1 + g2, "{}", spec);
        }
    }

    #[test]
    fn osp32_short_root_hint_rejected() {
        let fam = Family::parse("osp:3|2").unwrap();
        let g = build_algebra(&fam).unwrap();
        let d = root_decomposition(&g).unwrap();
        // an even root of the so(3) part: even root vector with entries in the odd block
        let p = fam.superdim().0;
        let so3 = (0..d.roots.len())
            .find(|&i| {
                !d.roots[i].odd && g.matrices[d.roots[i].vector].iter().enumerate().any(|(a, row)| a >= p && row.iter().any(|x| !x.is_zero()))
            })
            .unwrap();
        let err = MinimalGrading::build(&fam, &GradingOptions { theta_hint: Some(so3), he_change: None }).unwrap_err();
        assert!(matches!(err, Error::Selection(_)));
        assert!(err.to_string().contains("valid candidates"));
    }

    #[test]
    fn classification_labels() {
        let gr = grading("spo:2|3");
        assert_eq!(gr.case.ge0_label, "so(3)");
        assert!(gr.case.odd_type && gr.case.completely_reducible);
        let gr = grading("sl:2|3");
        assert_eq!(gr.case.ge0_label, "gl(3)");
        assert!(!gr.case.odd_type && !gr.case.completely_reducible);
        let gr = grading("osp:1|2");
        assert_eq!(gr.case.ge0_label, "trivial");
        assert!(gr.case.odd_type && gr.case.completely_reducible);
    }

    #[test]
    fn restriction_identity_rho() {
        for spec in ["spo:2|3", "sl:2|1", "spo:4|1", "sl:3|1"] {
            let gr = grading(spec);
            let wd = gr.weights_delta_rho();
            for i in 0..gr.rank_he() {
                let two_delta = &wd.delta_bar[i] + &wd.delta_bar[i];
                assert_eq!(wd.rho_bar[i], &wd.rho_e0_bar[i] + &two_delta, "{}", spec);
            }
        }
    }
}
