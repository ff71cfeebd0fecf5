//! The Cartan-type W-superalgebra U(g₀, e), where g₀ is the centralizer of
//! h^e, and the projection π from the zero-weight part of U(g, e).
//!
//! U(g₀, e) is realized inside `(Q₀)_χ = U(g₀)/U(g₀)(f − 1)`.  The
//! projection normal-orders a lift in the triangular order
//! `(g₋, g₀, g₊)`, keeps the monomials lying in U(g₀) and reduces `f` to
//! `χ(f) = 1`.

use std::collections::HashMap;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::envelope::{EnvelopingAlgebra, Mono, Poly, Presented, Rewriter};
use crate::error::{Error, Result};
use crate::grading::{Functional, MinimalGrading};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::wgen::{Ambient, Check, GenBasis, Generator, Role, WAlgebra};

/// Restricted-root triangular decomposition `g = g₋ ⊕ g₀ ⊕ g₊` in adapted
/// indices.
#[derive(Clone, Debug)]
pub struct Triangular {
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    pub plus: Vec<usize>,
}

fn is_zero_weight(w: &[Scalar]) -> bool {
    w.iter().all(|c| c.is_zero())
}

/// Sort adapted basis vectors by the sign of their h^e weight.  Negative
/// weights are those of x, y and the first halves of the u and v lists.
pub fn triangular(gr: &MinimalGrading) -> Result<Triangular> {
    let mut neg: Vec<Functional> = Vec::new();
    let lows = gr.x.iter().chain(&gr.y).chain(&gr.u[..gr.s / 2]).chain(&gr.v[..gr.r / 2]);
    for &i in lows {
        if !neg.contains(&gr.weight[i]) {
            neg.push(gr.weight[i].clone());
        }
    }
    let negate = |w: &Functional| -> Functional { w.iter().map(|c| -c).collect() };
    let pos: Vec<Functional> = neg.iter().map(negate).collect();
    if neg.iter().any(|w| pos.contains(w) || is_zero_weight(w)) {
        return Err(Error::Consistency("restricted positive system is not well defined".into()));
    }
    let mut t = Triangular { minus: Vec::new(), zero: Vec::new(), plus: Vec::new() };
    for i in 0..gr.dim() {
        let w = &gr.weight[i];
        if is_zero_weight(w) {
            t.zero.push(i);
        } else if neg.contains(w) {
            t.minus.push(i);
        } else if pos.contains(w) {
            t.plus.push(i);
        } else {
            return Err(Error::Consistency(format!("weight of {} is neither positive nor negative", gr.g.labels[i])));
        }
    }
    Ok(t)
}

/// `(Q₀)_χ` together with the triangular reordering engine for π.
pub struct CartanCtx {
    pub gr: Rc<MinimalGrading>,
    pub tri: Triangular,
    /// U(g) in the order `g₋, g₀, g₊`, no tails.
    ordered: Rewriter<EnvelopingAlgebra>,
    /// `(Q₀)_χ`: order `g₋, g₊, g₀` with `f` last and `f ↦ χ(f)`.
    pub q0: Rewriter<EnvelopingAlgebra>,
}

impl CartanCtx {
    pub fn new(gr: Rc<MinimalGrading>) -> Result<Self> {
        let tri = triangular(&gr)?;
        if tri.zero.last() != Some(&gr.f) {
            return Err(Error::Internal("f must be the last vector of g₀".into()));
        }
        let mut order = tri.minus.clone();
        order.extend(&tri.zero);
        order.extend(&tri.plus);
        let ordered = Rewriter::new(EnvelopingAlgebra::with_order(&gr.g, order, HashMap::new()));
        let mut order0 = tri.minus.clone();
        order0.extend(&tri.plus);
        order0.extend(&tri.zero);
        let mut tails = HashMap::new();
        tails.insert(gr.dim() - 1, Poly::constant(gr.chi(gr.f)));
        let q0 = Rewriter::new(EnvelopingAlgebra::with_order(&gr.g, order0, tails));
        Ok(CartanCtx { gr, tri, ordered, q0 })
    }

    /// Adapted index of a `(Q₀)_χ` generator.
    pub fn adapted(&self, pos: usize) -> usize {
        self.q0.alg.order[pos]
    }

    pub fn pos(&self, adapted: usize) -> usize {
        self.q0.alg.pos(adapted)
    }

    /// `x ⊗ 1_χ` in `(Q₀)_χ` for `x ∈ g₀`.
    pub fn linear(&self, x: &[Scalar]) -> Poly {
        let p = self.q0.alg.elem(x);
        self.q0.act_poly(&p, &Poly::one())
    }

    pub fn render(&self, p: &Poly) -> String {
        p.render(&|i| self.label(i))
    }

    /// π on the zero-weight part of Q^fin (elements written in adapted
    /// indices).
    pub fn project(&self, x: &Poly) -> Result<Poly> {
        let gr = &self.gr;
        let mut lifted = Poly::zero();
        for (m, c) in &x.terms {
            let mut w = vec![Scalar::zero(); gr.rank_he()];
            let mut word = Vec::new();
            for &(g, e) in m {
                for (a, b) in w.iter_mut().zip(&gr.weight[g as usize]) {
                    *a += &(&Scalar::from_int(e as i64) * b);
                }
                for _ in 0..e {
                    word.push(self.ordered.alg.pos(g as usize));
                }
            }
            if !is_zero_weight(&w) {
                return Err(Error::Precondition("π is defined on the zero-weight part only".into()));
            }
            lifted.add_scaled(&self.ordered.word(&word), c);
        }
        let lo = self.tri.minus.len();
        let hi = lo + self.tri.zero.len();
        let chi_f = gr.chi(gr.f);
        let mut out = Poly::zero();
        for (m, c) in &lifted.terms {
            if !m.iter().all(|&(g, _)| (lo..hi).contains(&(g as usize))) {
                continue;
            }
            let mut coeff = c.clone();
            let mut mono: Mono = Vec::new();
            for &(g, e) in m {
                let a = self.ordered.alg.order[g as usize];
                if a == gr.f {
                    coeff = &coeff * &chi_f.pow(e as u32);
                } else {
                    mono.push((self.pos(a) as u16, e));
                }
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

impl Ambient for CartanCtx {
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.q0.act_poly(a, b)
    }
    fn supercommutator(&self, a: &Poly, b: &Poly) -> Poly {
        let odd = |p: &Poly| self.q0.poly_parity(p).unwrap_or(false);
        let sign = if odd(a) && odd(b) { Scalar::one() } else { -Scalar::one() };
        let mut out = self.q0.act_poly(a, b);
        out.add_scaled(&self.q0.act_poly(b, a), &sign);
        out
    }
    fn kweight(&self, i: usize) -> i64 {
        self.gr.degree[self.adapted(i)] + 2
    }
    fn hweight(&self, i: usize) -> Functional {
        self.gr.weight[self.adapted(i)].clone()
    }
    fn label(&self, i: usize) -> String {
        self.gr.g.labels[self.adapted(i)].clone()
    }
}

/// U(g₀, e) with its generators `Θ′_F, Θ′_{h_i}, C′_θ, Θ′_E` (type odd) or
/// `Θ′_{h_i}, C′_θ` (type even).
pub struct CartanW {
    pub ctx: Rc<CartanCtx>,
    pub basis: GenBasis,
    pub presentation: Rc<Presented>,
    pub odd_type: bool,
}

impl CartanW {
    pub fn build(gr: Rc<MinimalGrading>) -> Result<CartanW> {
        let ctx = Rc::new(CartanCtx::new(gr.clone())?);
        let g = &gr.g;
        let expected = gr.rank_he() + 3 + if gr.odd_type { 2 } else { 0 };
        if ctx.tri.zero.len() != expected {
            return Err(Error::Consistency(format!(
                "g₀ has dimension {}, expected {}",
                ctx.tri.zero.len(),
                expected
            )));
        }
        let mk = |name: &str, role: Role, lead_adapted: usize, lift: Poly, kdeg: i64| -> Generator {
            let lead = ctx.pos(lead_adapted);
            let lead_coeff = lift.coeff(&vec![(lead as u16, 1)]);
            Generator { name: name.into(), role, lead, lead_coeff, parity: g.parity[lead_adapted], kdeg, lift }
        };
        let e = ctx.linear(&g.basis_elem(gr.e));
        let h = ctx.linear(&g.basis_elem(gr.h));
        let mut c_theta = e.scaled(&Scalar::from_int(2));
        c_theta.add_scaled(&ctx.q0.act_poly(&h, &h), &Scalar::frac(1, 2));
        let mut gens = Vec::new();
        if gr.odd_type {
            let big_f = gr.big_f.clone().ok_or_else(|| Error::Internal("missing F".into()))?;
            let big_e = gr.big_e.clone().ok_or_else(|| Error::Internal("missing E".into()))?;
            let fl = ctx.linear(&big_f);
            let el = ctx.linear(&big_e);
            c_theta.add_scaled(&h, &Scalar::frac(-3, 2));
            c_theta.add(&ctx.q0.act_poly(&fl, &el));
            let mut theta_e = el.clone();
            theta_e.add_scaled(&ctx.q0.act_poly(&fl, &h), &Scalar::frac(1, 2));
            theta_e.add_scaled(&fl, &Scalar::frac(-3, 4));
            gens.push(mk("F'", Role::ThetaF, gr.vmid.unwrap(), fl, 1));
            push_cartan(&mut gens, &gr, &ctx, &mk);
            gens.push(mk("C'", Role::Casimir, gr.e, c_theta, 4));
            let crit = gr.g1[gr.s + gr.r / 2];
            gens.push(mk("E'", Role::Critical, crit, theta_e, 3));
        } else {
            c_theta.add_scaled(&h, &-Scalar::one());
            push_cartan(&mut gens, &gr, &ctx, &mk);
            gens.push(mk("C'", Role::Casimir, gr.e, c_theta, 4));
        }
        let basis = GenBasis::new(ctx.clone() as Rc<dyn Ambient>, gens);
        let table = basis.commutator_table()?;
        let presentation = Rc::new(basis.presented(&table));
        Ok(CartanW { ctx, basis, presentation, odd_type: gr.odd_type })
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.basis.index_of(name)
    }

    fn idx(&self, role: Role) -> usize {
        self.basis.gens.iter().position(|g| g.role == role).expect("generator present")
    }

    /// The presentation as stated in closed form: `[Θ′_F, Θ′_F] = −2`,
    /// `[Θ′_E, Θ′_E] = C′_θ + 1/8`, all other brackets zero.
    pub fn tabulated(&self) -> Vec<Vec<Poly>> {
        let n = self.basis.len();
        let mut t: Vec<Vec<Poly>> = (0..n).map(|i| vec![Poly::zero(); i + 1]).collect();
        if self.odd_type {
            let f = self.idx(Role::ThetaF);
            let e = self.idx(Role::Critical);
            let c = self.idx(Role::Casimir);
            t[f][f] = Poly::constant(Scalar::from_int(-2));
            t[e][e] = Poly::gen(c).plus(&Poly::constant(Scalar::frac(1, 8)));
        }
        t
    }

    pub fn compare_with_tabulated(&self) -> Check {
        let tab = self.tabulated();
        let mut bad = Vec::new();
        for (i, row) in tab.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                let got = &self.presentation.table[i][j];
                if got != want {
                    bad.push(format!(
                        "[{}, {}] = {} (tabulated {})",
                        self.basis.gens[i].name,
                        self.basis.gens[j].name,
                        self.basis.render(got),
                        self.basis.render(want)
                    ));
                }
            }
        }
        Check::from_list("cartan-presentation", "derived U(g0,e) brackets equal the tabulated ones", bad)
    }

    /// The engine for products in U(g₀, e), in generator coordinates.
    pub fn algebra(&self) -> Rewriter<Rc<Presented>> {
        Rewriter::new(self.presentation.clone())
    }

    /// π followed by straightening into U(g₀, e) generators.
    pub fn project(&self, x: &Poly) -> Result<Poly> {
        let p = self.ctx.project(x)?;
        self.basis.coordinates(&p)
    }

    /// The shift `C′_θ ↦ C′_θ + ε` (type odd) or `Θ′_{h_i} ↦ Θ′_{h_i} − δ(h_i)`
    /// (type even), applied to a polynomial in the generators.
    pub fn shift(&self, alg: &Rewriter<Rc<Presented>>, x: &Poly, shifts: &HashMap<usize, Scalar>) -> Poly {
        let images: Vec<Poly> = (0..self.basis.len())
            .map(|k| {
                let mut p = Poly::gen(k);
                if let Some(s) = shifts.get(&k) {
                    p.add_term(Vec::new(), s.clone());
                }
                p
            })
            .collect();
        let mut out = Poly::zero();
        for (m, c) in &x.terms {
            let mut acc = Poly::one();
            for &(g, e) in m.iter().rev() {
                for _ in 0..e {
                    acc = alg.act_poly(&images[g as usize], &acc);
                }
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// Shift map used by π_ε for the given W-algebra constants.
    pub fn shift_map(&self, w: &WAlgebra) -> HashMap<usize, Scalar> {
        let mut m = HashMap::new();
        if self.odd_type {
            if let Some(eps) = &w.epsilon {
                if !eps.is_zero() {
                    m.insert(self.idx(Role::Casimir), eps.clone());
                }
            }
        } else {
            for (k, gen) in self.basis.gens.iter().enumerate() {
                if let Role::Cartan(i) = gen.role {
                    let d = w.weights.delta_bar[i].clone();
                    if !d.is_zero() {
                        m.insert(k, -d);
                    }
                }
            }
        }
        m
    }

    /// Kernel of bracketing with every generator, among PBW monomials of
    /// Kazhdan degree at most `bound`, compared with the span of monomials in
    /// `Θ′_{h_i}` and `C′_θ`.
    pub fn center_check(&self, bound: i64) -> Result<CenterReport> {
        let alg = self.algebra();
        let monos = pbw_monomials(&self.basis, bound);
        let n = monos.len();
        let mut rows: Matrix = Vec::new();
        for k in 0..self.basis.len() {
            let xk = Poly::gen(k);
            let mut block: HashMap<Mono, Vec<Scalar>> = HashMap::new();
            for (col, m) in monos.iter().enumerate() {
                let mp = Poly::monomial(m.clone(), Scalar::one());
                let br = alg.supercommutator(&xk, &mp);
                for (bm, c) in &br.terms {
                    let row = block.entry(bm.clone()).or_insert_with(|| vec![Scalar::zero(); n]);
                    row[col] = c.clone();
                }
            }
            rows.extend(block.into_values());
        }
        let kernel = linalg::nullspace(&rows, n);
        let central: Vec<usize> = monos
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                m.iter().all(|&(g, _)| matches!(self.basis.gens[g as usize].role, Role::Cartan(_) | Role::Casimir))
            })
            .map(|(i, _)| i)
            .collect();
        // the kernel must be exactly the span of the central monomials
        let mut inside = true;
        for v in &kernel {
            if v.iter().enumerate().any(|(i, c)| !c.is_zero() && !central.contains(&i)) {
                inside = false;
            }
        }
        Ok(CenterReport {
            bound,
            monomials: n,
            kernel_dim: kernel.len(),
            expected_dim: central.len(),
            passed: inside && kernel.len() == central.len(),
        })
    }

    /// The two-dimensional module V_λ (type odd) or the one-dimensional
    /// module (type even), as matrices per generator.
    pub fn simple_module(&self, lambda: &[Scalar]) -> Result<SmallModule> {
        self.simple_module_with_level(lambda, None)
    }

    /// As `simple_module`, with `C′` acting by `level` in type even. In type
    /// odd the level is forced to −1/8.
    pub fn simple_module_with_level(&self, lambda: &[Scalar], level: Option<&Scalar>) -> Result<SmallModule> {
        if self.odd_type {
            if let Some(c) = level {
                if *c != Scalar::frac(-1, 8) {
                    return Err(Error::Precondition("C′ acts by −1/8 on V_λ in type odd".into()));
                }
            }
        }
        let gr = &self.ctx.gr;
        if lambda.len() != gr.rank_he() {
            return Err(Error::Precondition(format!("λ needs {} coordinates", gr.rank_he())));
        }
        let dim = if self.odd_type { 2 } else { 1 };
        let mut mats = Vec::new();
        for gen in &self.basis.gens {
            let mut m = linalg::zeros(dim, dim);
            match gen.role {
                Role::Cartan(i) => {
                    for (k, row) in m.iter_mut().enumerate() {
                        row[k] = lambda[i].clone();
                    }
                }
                Role::Casimir => {
                    let c = if self.odd_type { Scalar::frac(-1, 8) } else { level.cloned().unwrap_or_else(Scalar::zero) };
                    for (k, row) in m.iter_mut().enumerate() {
                        row[k] = c.clone();
                    }
                }
                Role::ThetaF => {
                    // column convention: m[row][col]; F v = Fv, F (Fv) = −v
                    m[1][0] = Scalar::one();
                    m[0][1] = -Scalar::one();
                }
                _ => {}
            }
            mats.push(m);
        }
        let parity = if self.odd_type { vec![false, true] } else { vec![false] };
        Ok(SmallModule { mats, parity })
    }
}

fn push_cartan<F>(gens: &mut Vec<Generator>, gr: &MinimalGrading, ctx: &CartanCtx, mk: &F)
where
    F: Fn(&str, Role, usize, Poly, i64) -> Generator,
{
    for (i, &t) in gr.he.iter().enumerate() {
        let lift = ctx.linear(&gr.g.basis_elem(t));
        gens.push(mk(&format!("h{}'", i + 1), Role::Cartan(i), t, lift, 2));
    }
}

/// Outcome of the center computation.
#[derive(Clone, Debug)]
pub struct CenterReport {
    pub bound: i64,
    pub monomials: usize,
    pub kernel_dim: usize,
    pub expected_dim: usize,
    pub passed: bool,
}

/// PBW monomials in the generators up to a Kazhdan degree bound; odd
/// generators appear at most once.
pub fn pbw_monomials(basis: &GenBasis, bound: i64) -> Vec<Mono> {
    let gens = &basis.gens;
    let mut out = Vec::new();
    fn rec(gens: &[Generator], k: usize, left: i64, cur: &mut Mono, out: &mut Vec<Mono>) {
        if k == gens.len() {
            out.push(cur.clone());
            return;
        }
        rec(gens, k + 1, left, cur, out);
        let max_e = if gens[k].parity { 1 } else { i64::MAX };
        let mut e = 1;
        while e <= max_e && e * gens[k].kdeg <= left {
            cur.push((k as u16, e as u16));
            rec(gens, k + 1, left - e * gens[k].kdeg, cur, out);
            cur.pop();
            e += 1;
        }
    }
    rec(gens, 0, bound, &mut Vec::new(), &mut out);
    out
}

/// A finite-dimensional module given by one matrix per generator
/// (`mats[k][row][col]`), with basis parities.
#[derive(Clone, Debug)]
pub struct SmallModule {
    pub mats: Vec<Matrix>,
    pub parity: Vec<bool>,
}

impl SmallModule {
    /// Matrix of a polynomial in the generators.
    pub fn eval(&self, p: &Poly) -> Matrix {
        let n = self.parity.len();
        let mut out = linalg::zeros(n, n);
        for (m, c) in &p.terms {
            let mut acc = linalg::identity(n);
            for &(g, e) in m {
                for _ in 0..e {
                    acc = linalg::mat_mul(&acc, &self.mats[g as usize]);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if !acc[i][j].is_zero() {
                        out[i][j] += &(c * &acc[i][j]);
                    }
                }
            }
        }
        out
    }

    /// Every defining bracket acts correctly.
    pub fn verify(&self, pres: &Presented) -> Check {
        let n = pres.names.len();
        let mut bad = Vec::new();
        for i in 0..n {
            for j in 0..=i {
                let a = &self.mats[i];
                let b = &self.mats[j];
                let sign = if pres.parity[i] && pres.parity[j] { Scalar::one() } else { -Scalar::one() };
                let mut lhs = linalg::mat_mul(a, b);
                let ba = linalg::mat_mul(b, a);
                for (r, row) in lhs.iter_mut().enumerate() {
                    for (c, x) in row.iter_mut().enumerate() {
                        *x += &(&sign * &ba[r][c]);
                    }
                }
                if lhs != self.eval(&pres.table[i][j]) {
                    bad.push(format!("[{}, {}]", pres.names[i], pres.names[j]));
                }
            }
        }
        Check::from_list("module", "generators satisfy the defining brackets", bad)
    }

    /// Dimension of the space of odd module endomorphisms.
    pub fn odd_endomorphisms(&self, parities: &[bool]) -> Vec<Matrix> {
        let n = self.parity.len();
        // unknowns: entries J[r][c] with parity(r) != parity(c)
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| self.parity[r] != self.parity[c])
            .collect();
        let mut rows: Matrix = Vec::new();
        for (k, m) in self.mats.iter().enumerate() {
            // J M − (−1)^{|k|} M J = 0
            let sign = if parities[k] { Scalar::one() } else { -Scalar::one() };
            for r in 0..n {
                for c in 0..n {
                    let mut row = vec![Scalar::zero(); slots.len()];
                    for (s, &(a, b)) in slots.iter().enumerate() {
                        // (J M)[r][c] picks J[r][b]·M[b][c] with a == r
                        if a == r {
                            row[s] += &m[b][c];
                        }
                        // (M J)[r][c] picks M[r][a]·J[a][b] with b == c
                        if b == c {
                            row[s] += &(&sign * &m[r][a]);
                        }
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        linalg::nullspace(&rows, slots.len())
            .into_iter()
            .map(|v| {
                let mut j = linalg::zeros(n, n);
                for (s, &(a, b)) in slots.iter().enumerate() {
                    j[a][b] = v[s].clone();
                }
                j
            })
            .collect()
    }
}

/// PBW monomials of U(g, e) of h^e weight zero up to a Kazhdan bound.
pub fn zero_weight_monomials(w: &WAlgebra, bound: i64) -> Vec<Mono> {
    let weights: Vec<Functional> = (0..w.basis.len()).map(|k| w.basis.weight(k)).collect();
    pbw_monomials(&w.basis, bound)
        .into_iter()
        .filter(|m| {
            let mut acc = vec![Scalar::zero(); w.gr.rank_he()];
            for &(g, e) in m {
                for (a, b) in acc.iter_mut().zip(&weights[g as usize]) {
                    *a += &(&Scalar::from_int(e as i64) * b);
                }
            }
            is_zero_weight(&acc)
        })
        .collect()
}

/// π and π_ε on U(g, e)₀.
pub struct Projection<'a> {
    pub w: &'a WAlgebra,
    pub cartan: &'a CartanW,
    alg: Rewriter<Rc<Presented>>,
    shifts: HashMap<usize, Scalar>,
}

impl<'a> Projection<'a> {
    pub fn new(w: &'a WAlgebra, cartan: &'a CartanW) -> Self {
        let alg = cartan.algebra();
        let shifts = cartan.shift_map(w);
        Projection { w, cartan, alg, shifts }
    }

    /// π of a Q^fin element of weight zero, in U(g₀, e) coordinates.
    pub fn pi(&self, x: &Poly) -> Result<Poly> {
        self.cartan.project(x)
    }

    /// π_ε of a polynomial in the W generators.
    pub fn pi_eps(&self, x: &Poly) -> Result<Poly> {
        let p = self.pi(&self.w.basis.evaluate(x))?;
        Ok(self.cartan.shift(&self.alg, &p, &self.shifts))
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.alg.act_poly(a, b)
    }

    /// Multiplicativity on random zero-weight products.
    pub fn multiplicativity(&self, samples: usize, bound: i64, seed: u64) -> Result<Check> {
        let monos = zero_weight_monomials(self.w, bound);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = &self.w.ctx;
        let mut bad = Vec::new();
        for _ in 0..samples {
            let mut pick = || -> Poly {
                let mut p = Poly::zero();
                for _ in 0..rng.gen_range(1..=2) {
                    let m = monos.choose(&mut rng).unwrap().clone();
                    p.add_term(m, Scalar::frac(rng.gen_range(-3..=3i64).max(1), rng.gen_range(1..=3)));
                }
                p
            };
            let a = pick();
            let b = pick();
            let qa = self.w.basis.evaluate(&a);
            let qb = self.w.basis.evaluate(&b);
            let lhs = self.cartan.shift(&self.alg, &self.pi(&ctx.mul(&qa, &qb))?, &self.shifts);
            let rhs = self.mul(&self.pi_eps(&a)?, &self.pi_eps(&b)?);
            if lhs != rhs {
                bad.push(format!(
                    "{} * {}: {}",
                    self.w.basis.render(&a),
                    self.w.basis.render(&b),
                    self.cartan.basis.render(&lhs.sub(&rhs))
                ));
            }
        }
        Ok(Check::from_list("pi-multiplicative", "π_ε(ab) = π_ε(a)π_ε(b) on zero-weight samples", bad))
    }

    /// `π_ε([Θ_{[v,e]}, Θ_{[v,e]}])` in U(g₀, e) coordinates (type odd).
    pub fn critical_bracket(&self) -> Result<Poly> {
        let k = self.w.index("E").ok_or_else(|| Error::NotApplicable("type odd only".into()))?;
        let e = &self.w.gens()[k].lift;
        let br = self.w.ctx.supercommutator(e, e);
        let p = self.pi(&br)?;
        Ok(self.cartan.shift(&self.alg, &p, &self.shifts))
    }

    /// Images of the W generators of weight zero under π.
    pub fn generator_images(&self) -> Result<Vec<(String, Poly)>> {
        let mut out = Vec::new();
        for gen in self.w.gens() {
            if is_zero_weight(&self.w.gr.weight[gen.lead]) {
                out.push((gen.name.clone(), self.pi(&gen.lift)?));
            }
        }
        Ok(out)
    }
}

/// Weight of a polynomial in W generators if it is homogeneous.
pub fn restricted_weight(w: &WAlgebra, x: &Poly) -> Option<Functional> {
    let mut found: Option<Functional> = None;
    for m in x.terms.keys() {
        let mut acc = vec![Scalar::zero(); w.gr.rank_he()];
        for &(g, e) in m {
            for (a, b) in acc.iter_mut().zip(&w.basis.weight(g as usize)) {
                *a += &(&Scalar::from_int(e as i64) * b);
            }
        }
        match &found {
            None => found = Some(acc),
            Some(f) if *f != acc => return None,
            _ => {}
        }
    }
    found.or_else(|| Some(vec![Scalar::zero(); w.gr.rank_he()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wgen::Flavor;

    fn osp12() -> (WAlgebra, CartanW) {
        let w = WAlgebra::from_spec("osp:1|2", Flavor::Finite).unwrap();
        let c = CartanW::build(w.gr.clone()).unwrap();
        (w, c)
    }

    #[test]
    fn osp12_presentation_matches_table() {
        let (_, c) = osp12();
        let chk = c.compare_with_tabulated();
        assert!(chk.passed, "{}", chk.residual);
    }

    #[test]
    fn osp12_critical_bracket() {
        let (w, c) = osp12();
        let pr = Projection::new(&w, &c);
        let got = pr.critical_bracket().unwrap();
        let ci = c.index("C'").unwrap();
        let want = Poly::gen(ci).scaled(&Scalar::frac(-1, 2)).plus(&Poly::constant(Scalar::frac(-1, 16)));
        assert_eq!(got, want, "{}", c.basis.render(&got));
    }

    #[test]
    fn simple_module_is_type_q() {
        let (_, c) = osp12();
        let m = c.simple_module(&[]).unwrap();
        assert!(m.verify(&c.presentation).passed);
        let par: Vec<bool> = c.basis.gens.iter().map(|g| g.parity).collect();
        let js = m.odd_endomorphisms(&par);
        assert_eq!(js.len(), 1);
    }

    #[test]
    fn center_small_bound() {
        let (_, c) = osp12();
        let r = c.center_check(8).unwrap();
        assert!(r.passed, "{:?}", r);
    }
}
