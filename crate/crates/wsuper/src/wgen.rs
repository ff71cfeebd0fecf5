//! Generators of the minimal W-superalgebra inside Q^fin, the structural
//! constants c₀ and ε, PBW straightening in the generators, and the
//! relation suite.
//!
//! Elements of Q^fin = U(g)/U(g)(f − 1) are [`Poly`]s over the adapted basis
//! of [`MinimalGrading::g`] with `f` removed (it is a tail generator
//! evaluating to `χ(f) = 1`).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use crate::envelope::{EnvelopingAlgebra, Mono, Poly, Presented, Rewriter};
use crate::error::{Error, Result};
use crate::grading::{pair_with, Functional, MinimalGrading, WeightData};
use crate::scalar::Scalar;
use crate::superalgebra::{self, Elem};

/// Version tag of the relation suite, embedded in reports.
pub const RELATION_SUITE_VERSION: &str = "wsuper-relations-1";

/// Q^fin as a rewriting system.
pub type QFin = Rewriter<EnvelopingAlgebra>;

/// Which W-superalgebra: the finite one (with Θ_F in type odd) or the
/// refined one `W′ = Q^{ad m′}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Finite,
    Refined,
}

impl Flavor {
    pub fn parse(s: &str) -> Result<Flavor> {
        match s {
            "finite" => Ok(Flavor::Finite),
            "refined" => Ok(Flavor::Refined),
            other => Err(Error::Parse(format!("unknown flavor '{}' (expected finite or refined)", other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Flavor::Finite => "finite",
            Flavor::Refined => "refined",
        }
    }
}

/// Lexicographic comparison of normal monomials in which a smaller
/// generator index is more significant.
pub fn lex_cmp(a: &Mono, b: &Mono) -> Ordering {
    for k in 0.. {
        match (a.get(k), b.get(k)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(ga, ea)), Some(&(gb, eb))) => {
                if ga != gb {
                    return if ga < gb { Ordering::Greater } else { Ordering::Less };
                }
                if ea != eb {
                    return ea.cmp(&eb);
                }
            }
        }
    }
    unreachable!()
}

/// Q^fin of a grading together with the elementary operations on it.
pub struct QFinCtx {
    pub gr: Rc<MinimalGrading>,
    pub q: QFin,
    /// Kazhdan weight `deg + 2` of each adapted basis vector.
    pub kweight: Vec<i64>,
}

impl QFinCtx {
    pub fn new(gr: Rc<MinimalGrading>) -> Self {
        let g = &gr.g;
        let n = g.dim();
        assert_eq!(gr.f, n - 1, "f must be the last adapted basis vector");
        let mut tails = HashMap::new();
        tails.insert(gr.f, Poly::constant(gr.chi(gr.f)));
        let q = Rewriter::new(EnvelopingAlgebra::with_order(g, (0..n).collect(), tails));
        let kweight = gr.degree.iter().map(|d| d + 2).collect();
        QFinCtx { gr, q, kweight }
    }

    pub fn label(&self, i: usize) -> String {
        self.gr.g.labels[i].clone()
    }

    pub fn render(&self, p: &Poly) -> String {
        p.render(&|i| self.label(i))
    }

    pub fn basis(&self, i: usize) -> Elem {
        self.gr.g.basis_elem(i)
    }

    pub fn bracket(&self, a: &[Scalar], b: &[Scalar]) -> Elem {
        self.gr.g.bracket(a, b)
    }

    /// `x ⊗ 1_χ` for `x ∈ g`.
    pub fn linear(&self, x: &[Scalar]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&self.q.act_gen(i, &Vec::new()), c);
            }
        }
        out
    }

    /// `x · p` for `x ∈ g`.
    pub fn act_elem(&self, x: &[Scalar], p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&self.q.act_gen_on(i, p), c);
            }
        }
        out
    }

    /// Product of (lifts of) two Q^fin elements.
    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.q.act_poly(a, b)
    }

    pub fn parity(&self, p: &Poly) -> bool {
        self.q.poly_parity(p).unwrap_or(false)
    }

    pub fn supercommutator(&self, a: &Poly, b: &Poly) -> Poly {
        let sign = if self.parity(a) && self.parity(b) { Scalar::one() } else { -Scalar::one() };
        let mut out = self.mul(a, b);
        out.add_scaled(&self.mul(b, a), &sign);
        out
    }

    /// `ad a (x ⊗ 1) = (a x − (−1)^{|a||x|} x a) ⊗ 1` for a basis vector `a`.
    pub fn ad_action(&self, a: usize, x: &Poly) -> Poly {
        let pa = self.gr.g.parity[a];
        let sign = if pa && self.parity(x) { Scalar::one() } else { -Scalar::one() };
        let mut out = self.q.act_gen_on(a, x);
        let a1 = self.q.act_gen(a, &Vec::new());
        out.add_scaled(&self.q.act_poly(x, &a1), &sign);
        out
    }

    /// Invariance under the span of the given basis vectors, with the first
    /// failing vector as witness.
    pub fn is_invariant(&self, x: &Poly, span: &[usize]) -> (bool, Option<usize>) {
        for &a in span {
            if !self.ad_action(a, x).is_zero() {
                return (false, Some(a));
            }
        }
        (true, None)
    }

    pub fn kazhdan_degree(&self, x: &Poly) -> Option<i64> {
        x.degree_by(&|g| self.kweight[g])
    }

    /// `z*_α` as an algebra element.
    pub fn zstar(&self, a: usize) -> Elem {
        let (c, i) = &self.gr.zstar[a];
        superalgebra::scale(c, &self.basis(*i))
    }

    fn in_degree(&self, x: &[Scalar], d: i64) -> bool {
        x.iter().enumerate().all(|(i, c)| c.is_zero() || self.gr.degree[i] == d)
    }

    /// `Θ_v = (v − ½ Σ z_α [z*_α, v]) ⊗ 1` for `v ∈ g^e(0)`.
    pub fn theta_v(&self, v: &[Scalar]) -> Result<Poly> {
        if !self.in_degree(v, 0) || !self.gr.in_ge(v) {
            return Err(Error::Domain("Θ_v needs v in g^e(0)".into()));
        }
        let mut out = self.linear(v);
        let half = Scalar::frac(-1, 2);
        for (a, &za) in self.gr.z.iter().enumerate() {
            let inner = self.bracket(&self.zstar(a), v);
            if superalgebra::is_zero_elem(&inner) {
                continue;
            }
            let t = self.act_elem(&self.basis(za), &self.linear(&inner));
            out.add_scaled(&t, &half);
        }
        Ok(out)
    }

    /// Θ_w for `w ∈ g^e(1) = g(1)`.
    pub fn theta_w(&self, w: &[Scalar]) -> Result<Poly> {
        if !self.in_degree(w, 1) || superalgebra::is_zero_elem(w) {
            return Err(Error::Domain("Θ_w needs a nonzero w in g(1)".into()));
        }
        let mut out = self.linear(w);
        let third = Scalar::frac(1, 3);
        for (a, &za) in self.gr.z.iter().enumerate() {
            let inner = self.bracket(&self.zstar(a), w);
            if superalgebra::is_zero_elem(&inner) {
                continue;
            }
            let lin = self.linear(&inner);
            out.add_scaled(&self.act_elem(&self.basis(za), &lin), &-Scalar::one());
            for (b, &zb) in self.gr.z.iter().enumerate() {
                let inner2 = self.bracket(&self.zstar(b), &inner);
                if superalgebra::is_zero_elem(&inner2) {
                    continue;
                }
                let t = self.act_elem(&self.basis(zb), &self.linear(&inner2));
                let t = self.act_elem(&self.basis(za), &t);
                out.add_scaled(&t, &third);
            }
        }
        let wf = self.bracket(w, &self.basis(self.gr.f));
        out.add_scaled(&self.linear(&wf), &Scalar::frac(-2, 3));
        Ok(out)
    }

    /// The Casimir-type generator C.
    pub fn casimir(&self) -> Poly {
        let gr = &self.gr;
        let e = self.basis(gr.e);
        let h = self.basis(gr.h);
        let mut out = self.linear(&e).scaled(&Scalar::from_int(2));
        let hh = self.act_elem(&h, &self.linear(&h));
        out.add_scaled(&hh, &Scalar::frac(1, 2));
        let sr = Scalar::from_int(gr.s as i64 - gr.r as i64);
        let coef = -(&Scalar::one() + &(&sr * &Scalar::frac(1, 2)));
        out.add_scaled(&self.linear(&h), &coef);
        out.add(&self.casimir_ge0());
        for (a, &za) in gr.z.iter().enumerate() {
            let ez = self.bracket(&e, &self.zstar(a));
            let sign = if gr.g.parity[za] { Scalar::from_int(-2) } else { Scalar::from_int(2) };
            let t = self.act_elem(&ez, &self.linear(&self.basis(za)));
            out.add_scaled(&t, &sign);
        }
        out
    }

    /// C₀, the Casimir of g^e(0), with the h^e part written through the
    /// inverse Gram matrix.
    pub fn casimir_ge0(&self) -> Poly {
        let gr = &self.gr;
        let mut out = Poly::zero();
        for (i, &a) in gr.he.iter().enumerate() {
            for (j, &b) in gr.he.iter().enumerate() {
                let c = &gr.gram_inv[i][j];
                if !c.is_zero() {
                    out.add_scaled(&self.q.word(&[a, b]), c);
                }
            }
        }
        for (&x, &xs) in gr.x.iter().zip(&gr.xs) {
            out.add(&self.q.word(&[x, xs]));
            out.add(&self.q.word(&[xs, x]));
        }
        for (&y, &ys) in gr.y.iter().zip(&gr.ys) {
            out.add(&self.q.word(&[y, ys]));
            out.add_scaled(&self.q.word(&[ys, y]), &-Scalar::one());
        }
        out
    }

    /// Θ_F = v_mid ⊗ 1 (type odd).
    pub fn theta_f(&self) -> Result<Poly> {
        match self.gr.vmid {
            Some(vm) => Ok(self.linear(&self.basis(vm))),
            None => Err(Error::NotApplicable("Θ_F exists only in type odd".into())),
        }
    }

    /// Θ_Cas, assembled from the Θ_v the way C₀ is assembled from g^e(0).
    pub fn theta_cas(&self) -> Poly {
        let gr = &self.gr;
        let c = self;
        let tv = |i: usize| c.theta_v(&gr.g.basis_elem(i)).expect("g^e(0) basis vector");
        let mut out = Poly::zero();
        for (i, &a) in gr.he.iter().enumerate() {
            for (j, &b) in gr.he.iter().enumerate() {
                let k = &gr.gram_inv[i][j];
                if !k.is_zero() {
                    out.add_scaled(&c.mul(&tv(a), &tv(b)), k);
                }
            }
        }
        for (&x, &xs) in gr.x.iter().zip(&gr.xs) {
            out.add(&c.mul(&tv(x), &tv(xs)));
            out.add(&c.mul(&tv(xs), &tv(x)));
        }
        for (&y, &ys) in gr.y.iter().zip(&gr.ys) {
            out.add(&c.mul(&tv(y), &tv(ys)));
            out.add_scaled(&c.mul(&tv(ys), &tv(y)), &-Scalar::one());
        }
        out
    }

    /// Θ of an element of g(0), passed through ♯.
    pub fn theta_sharp(&self, x: &[Scalar]) -> Result<Poly> {
        let s = self.gr.sharp(x);
        if superalgebra::is_zero_elem(&s) {
            return Ok(Poly::zero());
        }
        self.theta_v(&s)
    }

    /// Right-hand side of the `[Θ_{w₁}, Θ_{w₂}]` relation.
    pub fn w_bracket_rhs(&self, w1: &[Scalar], w2: &[Scalar], c0: &Scalar) -> Result<Poly> {
        let gr = &self.gr;
        let g = &gr.g;
        let c = self;
        let p = g.form_of(&g.bracket(w1, w2), &g.basis_elem(gr.f));
        let mut out = Poly::zero();
        if !p.is_zero() {
            let mut inner = c.casimir();
            inner.add_scaled(&self.theta_cas(), &-Scalar::one());
            inner.add_scaled(&Poly::one(), &-c0);
            out.add_scaled(&inner, &(&p * &Scalar::frac(1, 2)));
        }
        let p1 = g.parity_of(w1).unwrap_or(false);
        let p2 = g.parity_of(w2).unwrap_or(false);
        let sign = if p1 && p2 { -Scalar::one() } else { Scalar::one() };
        for (a, &za) in gr.z.iter().enumerate() {
            let zv = g.basis_elem(za);
            let zs = c.zstar(a);
            let t1 = c.mul(&c.theta_sharp(&g.bracket(w1, &zv))?, &c.theta_sharp(&g.bracket(&zs, w2))?);
            let t2 = c.mul(&c.theta_sharp(&g.bracket(w2, &zv))?, &c.theta_sharp(&g.bracket(&zs, w1))?);
            out.add_scaled(&t1, &Scalar::frac(-1, 2));
            out.add_scaled(&t2, &(&sign * &Scalar::frac(1, 2)));
        }
        Ok(out)
    }
}

/// The closed-form double-bracket expression for c₀, evaluated on a pair
/// `w₁, w₂ ∈ g(1)` with `([w₁, w₂], f) ≠ 0`.  This is not the constant the
/// engine uses; see [`compute_c0`].
pub fn c0_closed_form_pair(gr: &MinimalGrading, w1: &[Scalar], w2: &[Scalar]) -> Result<Scalar> {
    let g = &gr.g;
    let fv = g.basis_elem(gr.f);
    let ev = g.basis_elem(gr.e);
    let p = g.form_of(&g.bracket(w1, w2), &fv);
    if p.is_zero() {
        return Err(Error::Precondition("([w1, w2], f) = 0".into()));
    }
    let zs: Vec<Elem> = gr.z.iter().map(|&i| g.basis_elem(i)).collect();
    let zst: Vec<Elem> = gr.zstar.iter().map(|(c, i)| superalgebra::scale(c, &g.basis_elem(*i))).collect();
    let mut sum = Scalar::zero();
    for a in 0..zs.len() {
        let left1 = g.bracket(w1, &zs[a]);
        let right1 = g.bracket(&zst[a], w2);
        if superalgebra::is_zero_elem(&left1) || superalgebra::is_zero_elem(&right1) {
            continue;
        }
        for b in 0..zs.len() {
            let l = g.bracket(&left1, &zs[b]);
            let r = g.bracket(&zst[b], &right1);
            let top = g.bracket(&l, &r);
            sum += &g.form_of(&ev, &top);
        }
    }
    let sr = Scalar::from_int(3 * (gr.s as i64 - gr.r as i64) + 4);
    let rhs = &(&sum * &Scalar::frac(1, 12)) - &(&(&sr * &Scalar::frac(1, 12)) * &p);
    Ok(&rhs * &p.inv()?)
}

/// First pair of g(1) basis vectors with nonzero `([w₁, w₂], f)`.
pub fn c0_pairs(gr: &MinimalGrading) -> Vec<(usize, usize)> {
    let g = &gr.g;
    let fv = g.basis_elem(gr.f);
    let mut out = Vec::new();
    for (i, &a) in gr.g1.iter().enumerate() {
        for &b in &gr.g1[i..] {
            let p = g.form_of(&g.bracket(&g.basis_elem(a), &g.basis_elem(b)), &fv);
            if !p.is_zero() {
                out.push((a, b));
            }
        }
    }
    out
}

/// The closed-form value on the first valid pair.
pub fn c0_closed_form(gr: &MinimalGrading) -> Result<Scalar> {
    let &(a, b) = c0_pairs(gr).first().ok_or_else(no_pair)?;
    c0_closed_form_pair(gr, &gr.g.basis_elem(a), &gr.g.basis_elem(b))
}

fn no_pair() -> Error {
    Error::Precondition("no pair in g(1) pairs nontrivially with f".into())
}

/// The constant c₀ for which `[Θ_{w₁}, Θ_{w₂}]` equals its expansion, read
/// off from the given pair.  Fails if the two sides differ by more than a
/// constant.
pub fn c0_from_pair(ctx: &QFinCtx, a: usize, b: usize) -> Result<Scalar> {
    let g = &ctx.gr.g;
    let (wa, wb) = (g.basis_elem(a), g.basis_elem(b));
    let p = g.form_of(&g.bracket(&wa, &wb), &g.basis_elem(ctx.gr.f));
    if p.is_zero() {
        return Err(Error::Precondition("([w1, w2], f) = 0".into()));
    }
    let lhs = ctx.supercommutator(&ctx.theta_w(&wa)?, &ctx.theta_w(&wb)?);
    let res = lhs.sub(&ctx.w_bracket_rhs(&wa, &wb, &Scalar::zero())?);
    if res.terms.keys().any(|m| !m.is_empty()) {
        return Err(Error::Verification(format!(
            "[Θ_w1, Θ_w2] differs from its expansion by a nonconstant term: {}",
            ctx.render(&res)
        )));
    }
    // lhs = rhs(0) − ½P·c₀
    Ok(&(&res.constant_term() * &Scalar::from_int(-2)) * &p.inv()?)
}

/// c₀ as the constant of the `[Θ_{w₁}, Θ_{w₂}]` relation, on the first
/// valid pair.
pub fn compute_c0(ctx: &QFinCtx) -> Result<Scalar> {
    let &(a, b) = c0_pairs(&ctx.gr).first().ok_or_else(no_pair)?;
    c0_from_pair(ctx, a, b)
}

/// `ε = c₀ + 1/8 + 2(ρ̄_{e,0}, δ̄) + 3(δ̄, δ̄)` (type odd).
pub fn compute_epsilon(gr: &MinimalGrading, c0: &Scalar) -> Result<Scalar> {
    if !gr.odd_type {
        return Err(Error::NotApplicable("ε is defined in type odd only".into()));
    }
    let wd = gr.weights_delta_rho();
    let mut eps = c0 + &Scalar::frac(1, 8);
    eps += &(&wd.pair(&wd.rho_e0_bar, &wd.delta_bar) * &Scalar::from_int(2));
    eps += &(&wd.pair(&wd.delta_bar, &wd.delta_bar) * &Scalar::from_int(3));
    Ok(eps)
}

/// Role of a W generator in highest-weight theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Θ_x, Θ_y, Θ_f, Θ_g: negative restricted weight.
    Lowering,
    /// Θ_F (type odd, finite flavor).
    ThetaF,
    /// Θ_{h_i}.
    Cartan(usize),
    Casimir,
    /// Θ_{[v_mid, e]}.
    Critical,
    /// Θ_{f*}, Θ_{g*}, Θ_{x*}, Θ_{y*}.
    Raising,
}

/// One generator of a W-type algebra realized in Q^fin.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub role: Role,
    /// Adapted basis vector carrying the leading term.
    pub lead: usize,
    /// Coefficient of `lead` in the lift.
    pub lead_coeff: Scalar,
    pub parity: bool,
    pub kdeg: i64,
    pub lift: Poly,
}

/// An algebra of [`Poly`]s in which W-type generators are realized.
pub trait Ambient {
    fn mul(&self, a: &Poly, b: &Poly) -> Poly;
    fn supercommutator(&self, a: &Poly, b: &Poly) -> Poly;
    /// Kazhdan weight of an ambient generator.
    fn kweight(&self, i: usize) -> i64;
    /// h^e weight of an ambient generator.
    fn hweight(&self, i: usize) -> Functional;
    fn label(&self, i: usize) -> String;
}

impl Ambient for QFinCtx {
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        QFinCtx::mul(self, a, b)
    }
    fn supercommutator(&self, a: &Poly, b: &Poly) -> Poly {
        QFinCtx::supercommutator(self, a, b)
    }
    fn kweight(&self, i: usize) -> i64 {
        self.kweight[i]
    }
    fn hweight(&self, i: usize) -> Functional {
        self.gr.weight[i].clone()
    }
    fn label(&self, i: usize) -> String {
        QFinCtx::label(self, i)
    }
}

/// Generators realized in an ambient algebra, with straightening into
/// ordered monomials in those generators.
pub struct GenBasis {
    pub amb: Rc<dyn Ambient>,
    pub gens: Vec<Generator>,
    yset: HashMap<usize, usize>,
    images: RefCell<HashMap<Mono, Rc<Poly>>>,
}

impl GenBasis {
    pub fn new(amb: Rc<dyn Ambient>, gens: Vec<Generator>) -> Self {
        let yset = gens.iter().enumerate().map(|(k, g)| (g.lead, k)).collect();
        GenBasis { amb, gens, yset, images: RefCell::new(HashMap::new()) }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.name.clone()).collect()
    }

    pub fn render(&self, p: &Poly) -> String {
        p.render(&|i| self.gens[i].name.clone())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Q^fin image of an ordered generator monomial.
    pub fn image(&self, m: &Mono) -> Rc<Poly> {
        if let Some(p) = self.images.borrow().get(m) {
            return p.clone();
        }
        let p = if m.is_empty() {
            Poly::one()
        } else {
            let (g0, e0) = m[0];
            let mut rest = m.clone();
            if e0 == 1 {
                rest.remove(0);
            } else {
                rest[0].1 -= 1;
            }
            let tail = self.image(&rest);
            self.amb.mul(&self.gens[g0 as usize].lift, &tail)
        };
        let rc = Rc::new(p);
        self.images.borrow_mut().insert(m.clone(), rc.clone());
        rc
    }

    /// Evaluate a polynomial in the generators.
    pub fn evaluate(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &p.terms {
            out.add_scaled(&self.image(m), c);
        }
        out
    }

    fn leading(&self, x: &Poly) -> Option<(i64, Mono)> {
        let amb = &self.amb;
        let d = x.degree_by(&|g| amb.kweight(g))?;
        x.terms
            .keys()
            .filter(|m| crate::envelope::mono_degree(m, &|g| amb.kweight(g)) == d)
            .filter(|m| m.iter().all(|(g, _)| self.yset.contains_key(&(*g as usize))))
            .max_by(|a, b| lex_cmp(a, b))
            .map(|m| (d, m.clone()))
    }

    /// Coordinates of `x` in the ordered monomials of the generators.
    pub fn coordinates(&self, x: &Poly) -> Result<Poly> {
        let mut rem = x.clone();
        let mut out = Poly::zero();
        let mut steps = 0usize;
        while !rem.is_zero() {
            steps += 1;
            if steps > 100_000 {
                return Err(Error::Straightening("elimination did not terminate".into()));
            }
            let (d, lead) = self.leading(&rem).ok_or_else(|| {
                Error::Straightening(format!(
                    "top Kazhdan component has no monomial in the leading vectors: {}",
                    rem.render(&|i| self.amb.label(i))
                ))
            })?;
            let mut tm: Mono = lead.iter().map(|&(g, e)| (self.yset[&(g as usize)] as u16, e)).collect();
            tm.sort();
            let img = self.image(&tm);
            match self.leading(&img) {
                Some((d2, l2)) if d2 == d && l2 == lead => {}
                _ => {
                    return Err(Error::Straightening(format!(
                        "leading term of {} is not the product of leading terms",
                        self.render(&Poly::monomial(tm, Scalar::one()))
                    )))
                }
            }
            let lc = img.coeff(&lead);
            let c = &rem.coeff(&lead) * &lc.inv()?;
            out.add_term(tm, c.clone());
            rem.add_scaled(&img, &-c);
        }
        Ok(out)
    }

    /// `[Θ_i, Θ_j]` as a polynomial in the generators, for all `i >= j`.
    pub fn commutator_table(&self) -> Result<Vec<Vec<Poly>>> {
        let n = self.len();
        let mut table = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..=i {
                let br = self.amb.supercommutator(&self.gens[i].lift, &self.gens[j].lift);
                table[i].push(self.coordinates(&br)?);
            }
        }
        Ok(table)
    }

    pub fn presented(&self, table: &[Vec<Poly>]) -> Presented {
        Presented::from_lower(self.names(), self.gens.iter().map(|g| g.parity).collect(), table)
    }

    /// h^e weight of each generator (the weight of its leading vector).
    pub fn weight(&self, k: usize) -> Functional {
        self.amb.hweight(self.gens[k].lead)
    }
}

/// An element of the W-superalgebra: a Q^fin element certified invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct WElement {
    pub value: Poly,
    pub kdeg: i64,
    pub flavor: Flavor,
}

/// The minimal W-superalgebra of a grading.
pub struct WAlgebra {
    pub gr: Rc<MinimalGrading>,
    pub ctx: Rc<QFinCtx>,
    pub flavor: Flavor,
    pub basis: GenBasis,
    pub c0: Scalar,
    pub epsilon: Option<Scalar>,
    pub weights: WeightData,
    table: RefCell<Option<Rc<Presented>>>,
}

impl WAlgebra {
    pub fn build(gr: MinimalGrading, flavor: Flavor) -> Result<WAlgebra> {
        let gr = Rc::new(gr);
        let ctx = Rc::new(QFinCtx::new(gr.clone()));
        Self::with_ctx(ctx, flavor)
    }

    pub fn from_spec(spec: &str, flavor: Flavor) -> Result<WAlgebra> {
        Self::build(MinimalGrading::from_spec(spec)?, flavor)
    }

    pub fn with_ctx(ctx: Rc<QFinCtx>, flavor: Flavor) -> Result<WAlgebra> {
        let gr = ctx.gr.clone();
        let mut gens = Vec::new();
        let g = &gr.g;
        let mk = |name: String, role: Role, lead: usize, lift: Poly, kdeg: i64| -> Generator {
            let lead_coeff = lift.coeff(&vec![(lead as u16, 1)]);
            Generator { name, role, lead, lead_coeff, parity: g.parity[lead], kdeg, lift }
        };
        let tv = |i: usize| ctx.theta_v(&g.basis_elem(i));
        let tw = |i: usize| ctx.theta_w(&g.basis_elem(i));
        let s2 = gr.s / 2;
        let rh = gr.r / 2;
        for (i, &x) in gr.x.iter().enumerate() {
            gens.push(mk(format!("x{}", i + 1), Role::Lowering, x, tv(x)?, 2));
        }
        for (i, &y) in gr.y.iter().enumerate() {
            gens.push(mk(format!("y{}", i + 1), Role::Lowering, y, tv(y)?, 2));
        }
        for k in 0..s2 {
            let w = gr.g1[k];
            gens.push(mk(format!("f{}", k + 1), Role::Lowering, w, tw(w)?, 3));
        }
        for j in 0..rh {
            let w = gr.g1[gr.s + j];
            gens.push(mk(format!("g{}", j + 1), Role::Lowering, w, tw(w)?, 3));
        }
        if gr.odd_type && flavor == Flavor::Finite {
            let vm = gr.vmid.expect("type odd has v_mid");
            gens.push(mk("F".into(), Role::ThetaF, vm, ctx.theta_f()?, 1));
        }
        for (i, &t) in gr.he.iter().enumerate() {
            gens.push(mk(format!("h{}", i + 1), Role::Cartan(i), t, tv(t)?, 2));
        }
        gens.push(mk("C".into(), Role::Casimir, gr.e, ctx.casimir(), 4));
        if gr.odd_type {
            let w = gr.g1[gr.s + rh];
            gens.push(mk("E".into(), Role::Critical, w, tw(w)?, 3));
        }
        for k in s2..gr.s {
            let w = gr.g1[k];
            gens.push(mk(format!("f{}*", gr.s - k), Role::Raising, w, tw(w)?, 3));
        }
        let vstart = if gr.odd_type { rh + 1 } else { rh };
        for j in vstart..gr.r {
            let w = gr.g1[gr.s + j];
            gens.push(mk(format!("g{}*", gr.r - j), Role::Raising, w, tw(w)?, 3));
        }
        for (i, &x) in gr.xs.iter().enumerate() {
            gens.push(mk(format!("x{}*", i + 1), Role::Raising, x, tv(x)?, 2));
        }
        for (i, &y) in gr.ys.iter().enumerate() {
            gens.push(mk(format!("y{}*", i + 1), Role::Raising, y, tv(y)?, 2));
        }
        let c0 = compute_c0(&ctx)?;
        let epsilon = if gr.odd_type { Some(compute_epsilon(&gr, &c0)?) } else { None };
        let weights = gr.weights_delta_rho();
        let basis = GenBasis::new(ctx.clone() as Rc<dyn Ambient>, gens);
        Ok(WAlgebra { gr, ctx, flavor, basis, c0, epsilon, weights, table: RefCell::new(None) })
    }

    pub fn gens(&self) -> &[Generator] {
        &self.basis.gens
    }

    pub fn gen(&self, name: &str) -> Option<&Generator> {
        self.basis.gens.iter().find(|g| g.name == name)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.basis.index_of(name)
    }

    /// The span whose adjoint action must vanish on the algebra.
    pub fn invariance_span(&self) -> Vec<usize> {
        let sub = &self.gr.subalgebras;
        if self.gr.odd_type && self.flavor == Flavor::Finite {
            sub.n0.clone()
        } else {
            sub.n_prime.clone()
        }
    }

    /// Wrap a Q^fin element after certifying invariance.
    pub fn element(&self, value: Poly) -> Result<WElement> {
        let (ok, witness) = self.ctx.is_invariant(&value, &self.invariance_span());
        if !ok {
            return Err(Error::Consistency(format!(
                "element is not invariant (witness {})",
                self.ctx.label(witness.unwrap_or(0))
            )));
        }
        let kdeg = self.ctx.kazhdan_degree(&value).unwrap_or(0);
        Ok(WElement { value, kdeg, flavor: self.flavor })
    }

    pub fn w_multiply(&self, a: &WElement, b: &WElement) -> Result<WElement> {
        if a.flavor != b.flavor {
            return Err(Error::Precondition("flavors differ".into()));
        }
        self.element(self.ctx.mul(&a.value, &b.value))
    }

    /// The abstract presentation (commutator table in the generators).
    pub fn presentation(&self) -> Result<Rc<Presented>> {
        if let Some(p) = self.table.borrow().as_ref() {
            return Ok(p.clone());
        }
        let t = self.basis.commutator_table()?;
        let p = Rc::new(self.basis.presented(&t));
        *self.table.borrow_mut() = Some(p.clone());
        Ok(p)
    }

    /// Right-hand side of the expansion of Θ_{[v,e]}² (type odd), with all
    /// h^e sums written through the induced form.
    pub fn critical_square_rhs(&self) -> Result<Poly> {
        let gr = &self.gr;
        let g = &gr.g;
        let c = &self.ctx;
        let vm = gr.vmid.ok_or_else(|| Error::NotApplicable("type odd only".into()))?;
        let ve = g.bracket(&g.basis_elem(vm), &g.basis_elem(gr.e));
        let tv = |i: usize| c.theta_v(&g.basis_elem(i));
        let quarter = Scalar::frac(1, 4);
        let half = Scalar::frac(1, 2);
        let mut out = c.casimir().scaled(&-&quarter);
        out.add_scaled(&Poly::one(), &(&self.c0 * &quarter));
        for (i, &a) in gr.he.iter().enumerate() {
            for (j, &b) in gr.he.iter().enumerate() {
                let k = &gr.gram_inv[i][j];
                if !k.is_zero() {
                    out.add_scaled(&c.mul(&tv(a)?, &tv(b)?), &(k * &quarter));
                }
            }
        }
        for (&x, &xs) in gr.x.iter().zip(&gr.xs) {
            out.add_scaled(&c.mul(&tv(x)?, &tv(xs)?), &half);
        }
        for (&y, &ys) in gr.y.iter().zip(&gr.ys) {
            out.add_scaled(&c.mul(&tv(y)?, &tv(ys)?), &half);
        }
        // Θ_{t_φ} for φ = ¼(Σβ₀ − Σβ₁ − Σ_{i≤s/2} γ₀ + Σ_{i≤(r−1)/2} γ₁)
        let nd = gr.rank_he();
        let mut phi = vec![Scalar::zero(); nd];
        let mut acc = |idx: &[usize], sign: i64| {
            for &i in idx {
                for (p, w) in phi.iter_mut().zip(&gr.weight[i]) {
                    *p += &(&Scalar::from_int(sign) * w);
                }
            }
        };
        acc(&gr.xs, 1);
        acc(&gr.ys, -1);
        acc(&gr.u[..gr.s / 2], -1);
        acc(&gr.v[..gr.r / 2], 1);
        out.add_scaled(&self.theta_t_of(&phi)?, &quarter);
        for i in 0..gr.s / 2 {
            let ui = g.basis_elem(gr.u[i]);
            let uis = c.zstar(i);
            let t = c.mul(&c.theta_sharp(&g.bracket(&ve, &ui))?, &c.theta_sharp(&g.bracket(&uis, &ve))?);
            out.add_scaled(&t, &-Scalar::one());
        }
        for i in 0..gr.r / 2 {
            let vi = g.basis_elem(gr.v[i]);
            let vis = c.zstar(gr.s + i);
            let t = c.mul(&c.theta_sharp(&g.bracket(&ve, &vi))?, &c.theta_sharp(&g.bracket(&vis, &ve))?);
            out.add_scaled(&t, &-Scalar::one());
        }
        Ok(out)
    }

    /// `t_φ ∈ h^e` with `(t_φ, t) = φ(t)`, as h^e coordinates.
    pub fn dual_of(&self, phi: &[Scalar]) -> Vec<Scalar> {
        crate::linalg::mat_vec(&self.gr.gram_inv, phi)
    }

    /// Θ_{t_φ}.
    pub fn theta_t_of(&self, phi: &[Scalar]) -> Result<Poly> {
        let coords = self.dual_of(phi);
        let mut t = self.gr.g.zero();
        for (k, &i) in self.gr.he.iter().enumerate() {
            t[i] = coords[k].clone();
        }
        if superalgebra::is_zero_elem(&t) {
            return Ok(Poly::zero());
        }
        self.ctx.theta_v(&t)
    }

    /// Run the relation suite.
    pub fn verify_relations(&self) -> Result<Vec<Check>> {
        let gr = &self.gr;
        let g = &gr.g;
        let c = &self.ctx;
        let mut out = Vec::new();
        let ge0 = gr.ge0();

        // generators are invariant and have the right leading shape
        let span = self.invariance_span();
        let mut bad = Vec::new();
        for gen in self.gens() {
            let (ok, w) = c.is_invariant(&gen.lift, &span);
            if !ok {
                bad.push(format!("{} (witness {})", gen.name, c.label(w.unwrap())));
            }
            if gen.lead_coeff.is_zero() || c.kazhdan_degree(&gen.lift) != Some(gen.kdeg) {
                bad.push(format!("{} leading term", gen.name));
            }
        }
        out.push(Check::from_list("generators", "generators invariant with leading term Y_k", bad));

        // brackets among the Θ_v
        let mut bad = Vec::new();
        for (i, &a) in ge0.iter().enumerate() {
            for &b in &ge0[i..] {
                let lhs = c.supercommutator(&c.theta_v(&g.basis_elem(a))?, &c.theta_v(&g.basis_elem(b))?);
                let br = g.bracket(&g.basis_elem(a), &g.basis_elem(b));
                let rhs = if superalgebra::is_zero_elem(&br) { Poly::zero() } else { c.theta_v(&br)? };
                let res = lhs.sub(&rhs);
                if !res.is_zero() {
                    bad.push(format!("({}, {}): {}", c.label(a), c.label(b), c.render(&res)));
                }
            }
        }
        out.push(Check::from_list("bracket-v-v", "[Θ_v1, Θ_v2] = Θ_[v1,v2]", bad));

        // Θ_v against Θ_w
        let mut bad = Vec::new();
        for &a in &ge0 {
            for &w in &gr.g1 {
                let lhs = c.supercommutator(&c.theta_v(&g.basis_elem(a))?, &c.theta_w(&g.basis_elem(w))?);
                let br = g.bracket(&g.basis_elem(a), &g.basis_elem(w));
                let rhs = if superalgebra::is_zero_elem(&br) { Poly::zero() } else { c.theta_w(&br)? };
                let res = lhs.sub(&rhs);
                if !res.is_zero() {
                    bad.push(format!("({}, {}): {}", c.label(a), c.label(w), c.render(&res)));
                }
            }
        }
        out.push(Check::from_list("bracket-v-w", "[Θ_v, Θ_w] = Θ_[v,w]", bad));

        // brackets among the Θ_w
        let mut bad = Vec::new();
        for (i, &a) in gr.g1.iter().enumerate() {
            for &b in &gr.g1[i..] {
                let wa = g.basis_elem(a);
                let wb = g.basis_elem(b);
                let lhs = c.supercommutator(&c.theta_w(&wa)?, &c.theta_w(&wb)?);
                let rhs = c.w_bracket_rhs(&wa, &wb, &self.c0)?;
                let res = lhs.sub(&rhs);
                if !res.is_zero() {
                    bad.push(format!("({}, {}): {}", c.label(a), c.label(b), c.render(&res)));
                }
            }
        }
        out.push(Check::from_list("bracket-w-w", "[Θ_w1, Θ_w2] expansion with c0", bad));

        // centrality of C
        let cas = c.casimir();
        let mut bad = Vec::new();
        for gen in self.gens() {
            let res = c.supercommutator(&cas, &gen.lift);
            if !res.is_zero() {
                bad.push(format!("{}: {}", gen.name, c.render(&res)));
            }
        }
        out.push(Check::from_list("casimir-central", "[C, generators] = 0", bad));

        // Θ_F is central up to its square
        if gr.odd_type && self.flavor == Flavor::Finite {
            let tf = c.theta_f()?;
            let mut bad = Vec::new();
            for gen in self.gens() {
                let res = c.supercommutator(&tf, &gen.lift);
                let want = if gen.role == Role::ThetaF { Poly::one() } else { Poly::zero() };
                let res = res.sub(&want);
                if !res.is_zero() {
                    bad.push(format!("{}: {}", gen.name, c.render(&res)));
                }
            }
            out.push(Check::from_list("theta-f", "[Θ_F, Θ_k] = 0 and [Θ_F, Θ_F] = 1", bad));
        }

        // structure polynomials
        let pres = self.presentation()?;
        if gr.odd_type && self.flavor == Flavor::Finite {
            let fi = self.gens().iter().position(|x| x.role == Role::ThetaF).unwrap();
            let mut bad = Vec::new();
            for i in 0..self.basis.len() {
                let want = if i == fi { Poly::one() } else { Poly::zero() };
                let got = &pres.table[i][fi];
                if *got != want {
                    bad.push(format!("F_({}, F) = {}", self.gens()[i].name, self.basis.render(got)));
                }
            }
            out.push(Check::from_list("structure-theta-f", "F_{i,F} = 0, F_{F,F} = 1", bad));
        }
        let mut bad = Vec::new();
        let gens = self.gens();
        for i in 0..gens.len() {
            for j in 0..=i {
                if gens[i].role == Role::ThetaF || gens[j].role == Role::ThetaF {
                    continue;
                }
                if let Some(msg) = self.linear_part_mismatch(&pres, i, j) {
                    bad.push(msg);
                }
            }
        }
        out.push(Check::from_list("structure-linear", "linear part of F_ij matches [Y_i, Y_j]", bad));

        // straightening round trip on the table
        let mut bad = Vec::new();
        for i in 0..gens.len() {
            for j in 0..=i {
                let lhs = c.supercommutator(&gens[i].lift, &gens[j].lift);
                let back = self.basis.evaluate(&pres.table[i][j]);
                if lhs != back {
                    bad.push(format!("({}, {})", gens[i].name, gens[j].name));
                }
            }
        }
        out.push(Check::from_list("structure-evaluation", "F_ij evaluates back to [Θ_i, Θ_j]", bad));

        if gr.odd_type {
            out.extend(self.bracket_identity_checks()?);
        }
        Ok(out)
    }

    fn linear_part_mismatch(&self, pres: &Presented, i: usize, j: usize) -> Option<String> {
        let gens = self.gens();
        let g = &self.gr.g;
        let br = g.bracket(&g.basis_elem(gens[i].lead), &g.basis_elem(gens[j].lead));
        let target = gens[i].kdeg + gens[j].kdeg - 2;
        let fij = &pres.table[i][j];
        for (k, gk) in gens.iter().enumerate() {
            if gk.kdeg != target || gk.role == Role::ThetaF {
                continue;
            }
            let want = &br[gk.lead] * &gk.lead_coeff.inv().ok()?;
            let got = fij.coeff(&vec![(k as u16, 1)]);
            if want != got {
                return Some(format!(
                    "F_({}, {}) coefficient of {}: got {}, expected {}",
                    gens[i].name, gens[j].name, gk.name, got, want
                ));
            }
        }
        let lead_set: Vec<usize> = gens.iter().map(|x| x.lead).collect();
        for (idx, val) in br.iter().enumerate() {
            if !val.is_zero() && !lead_set.contains(&idx) {
                return Some(format!("[Y_{}, Y_{}] leaves g^e", gens[i].name, gens[j].name));
            }
        }
        None
    }

    fn bracket_identity_checks(&self) -> Result<Vec<Check>> {
        let gr = &self.gr;
        let g = &gr.g;
        let c = &self.ctx;
        let mut out = Vec::new();
        let vm = gr.vmid.unwrap();
        let vv = g.basis_elem(vm);
        let ev = g.basis_elem(gr.e);
        let ve = g.bracket(&vv, &ev);
        let ve_ve = g.bracket(&ve, &ve);
        let res = superalgebra::lin_comb(&Scalar::one(), &ve_ve, &Scalar::one(), &ev);
        out.push(Check::from_residual_elem("ve-ve", "[[v,e],[v,e]] = -e", &res, g));
        let ve_v = g.bracket(&ve, &vv);
        let res = superalgebra::lin_comb(&Scalar::one(), &ve_v, &Scalar::frac(1, 2), &g.basis_elem(gr.h));
        out.push(Check::from_residual_elem("ve-v", "[[v,e],v] = -h/2", &res, g));
        for (name, lows, highs, desc) in
            [("xstar-x", &gr.x, &gr.xs, "[x*_i, x_i] = t_beta"), ("ystar-y", &gr.y, &gr.ys, "[y*_i, y_i] = t_beta")]
        {
            let mut bad = Vec::new();
            for (&lo, &hi) in lows.iter().zip(highs.iter()) {
                let br = g.bracket(&g.basis_elem(hi), &g.basis_elem(lo));
                let coords = self.dual_of(&gr.weight[hi]);
                let mut want = g.zero();
                for (k, &t) in gr.he.iter().enumerate() {
                    want[t] = coords[k].clone();
                }
                if br != want {
                    bad.push(format!("{}", g.labels[hi]));
                }
            }
            out.push(Check::from_list(name, desc, bad));
        }
        // Θ_{[v,e]}² against its expansion, compared after straightening
        let e_idx = self.gens().iter().position(|x| x.role == Role::Critical).unwrap();
        let te = &self.gens()[e_idx].lift;
        let lhs = c.mul(te, te);
        let rhs = self.critical_square_rhs()?;
        let lc = self.basis.coordinates(&lhs)?;
        let rc = self.basis.coordinates(&rhs)?;
        let res = lc.sub(&rc);
        let mut chk = Check::from_list(
            "critical-square",
            "Θ_[v,e]^2 expansion after straightening",
            if res.is_zero() { Vec::new() } else { vec![self.basis.render(&res)] },
        );
        chk.residual = if res.is_zero() { String::new() } else { self.basis.render(&res) };
        out.push(chk);
        Ok(out)
    }
}

/// Outcome of one identity in the relation suite.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub description: String,
    pub passed: bool,
    /// Empty on success; otherwise the exact nonzero residual(s).
    pub residual: String,
}

impl Check {
    pub fn from_list(name: &str, description: &str, failures: Vec<String>) -> Check {
        Check {
            name: name.into(),
            description: description.into(),
            passed: failures.is_empty(),
            residual: failures.join("; "),
        }
    }

    pub fn from_residual_elem(name: &str, description: &str, res: &[Scalar], g: &superalgebra::LieSuperalgebra) -> Check {
        let parts: Vec<String> = res
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})*{}", c, g.labels[i]))
            .collect();
        Check::from_list(name, description, if parts.is_empty() { Vec::new() } else { vec![parts.join(" + ")] })
    }
}

/// Pair a functional with another through the grading's Gram inverse.
pub fn pair(gr: &MinimalGrading, a: &[Scalar], b: &[Scalar]) -> Scalar {
    pair_with(&gr.gram_inv, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osp12() -> WAlgebra {
        WAlgebra::from_spec("osp:1|2", Flavor::Finite).unwrap()
    }

    #[test]
    fn osp12_c0_and_epsilon() {
        let w = osp12();
        assert_eq!(w.c0, Scalar::frac(-1, 8));
        assert_eq!(w.epsilon.clone().unwrap(), Scalar::zero());
        assert_eq!(c0_closed_form(&w.gr).unwrap(), Scalar::frac(-1, 16));
    }

    #[test]
    fn osp12_theta_e_matches_closed_form() {
        let w = osp12();
        let gr = &w.gr;
        let c = &w.ctx;
        let e_gen = w.gen("E").unwrap();
        // √−2 Θ_[v,e] = E + ½Fh − ¾F with E = [F, e], F = √−2 v
        let s2 = Scalar::sqrt_of(&crate::scalar::rat(-2, 1));
        let lhs = e_gen.lift.scaled(&s2);
        let big_e = gr.big_e.clone().unwrap();
        let big_f = gr.big_f.clone().unwrap();
        let mut rhs = c.linear(&big_e);
        let fh = c.act_elem(&big_f, &c.linear(&gr.g.basis_elem(gr.h)));
        rhs.add_scaled(&fh, &Scalar::frac(1, 2));
        rhs.add_scaled(&c.linear(&big_f), &Scalar::frac(-3, 4));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn osp12_theta_f_square() {
        let w = osp12();
        let c = &w.ctx;
        let tf = c.theta_f().unwrap();
        assert_eq!(c.supercommutator(&tf, &tf), Poly::one());
        assert_eq!(c.mul(&tf, &tf), Poly::constant(Scalar::frac(1, 2)));
    }

    #[test]
    fn kazhdan_degrees_of_generators() {
        let w = osp12();
        for gen in w.gens() {
            assert_eq!(w.ctx.kazhdan_degree(&gen.lift), Some(gen.kdeg), "{}", gen.name);
        }
    }

    #[test]
    fn sl21_theta_f_not_applicable() {
        let w = WAlgebra::from_spec("sl:2|1", Flavor::Finite).unwrap();
        assert!(matches!(w.ctx.theta_f(), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn osp12_theta_v_domain_error() {
        let w = osp12();
        let e = w.gr.g.basis_elem(w.gr.e);
        assert!(matches!(w.ctx.theta_v(&e), Err(Error::Domain(_))));
    }
}
