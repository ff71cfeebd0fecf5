//! Highest weight theory for U(g, e) at truncated scale.
//!
//! Verma modules Z(λ, c) and the modules M_e(λ) are realized on PBW
//! monomials in the lowering generators (and Θ_F) applied to a top vector,
//! with the remaining generators acting on the top vector through fixed
//! "tail" values. The induced Whittaker model M(λ) is realized the same way
//! over U(g). Truncation is by lowering degree for the former and by
//! Kazhdan degree for the latter.

use std::collections::HashMap;

use crate::cartanw::{CartanW, Projection, SmallModule};
use crate::envelope::{EnvelopingAlgebra, Mono, Poly, Presented, Rewriter};
use crate::error::{Error, Result};
use crate::grading::{eval_functional, is_nonnegative_integer, Functional};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::superalgebra::Elem;
use crate::wgen::{Check, Flavor, Role, WAlgebra};

fn f_add(a: &[Scalar], b: &[Scalar]) -> Functional {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn f_sub(a: &[Scalar], b: &[Scalar]) -> Functional {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn f_scale(c: &Scalar, a: &[Scalar]) -> Functional {
    a.iter().map(|x| c * x).collect()
}

fn render_functional(f: &[Scalar]) -> String {
    let parts: Vec<String> = f.iter().map(|x| x.render()).collect();
    format!("[{}]", parts.join(", "))
}

fn check_len(w: &WAlgebra, lambda: &[Scalar]) -> Result<()> {
    let k = w.gr.rank_he();
    if lambda.len() != k {
        return Err(Error::Precondition(format!("λ needs {} coordinates, got {}", k, lambda.len())));
    }
    Ok(())
}

fn two() -> Scalar {
    Scalar::from_int(2)
}

/// A weight together with a level.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchablePair {
    pub lambda: Functional,
    pub c: Scalar,
}

/// The unique level `c` making `(λ, c)` matchable (type odd).
pub fn matchable_c(w: &WAlgebra, lambda: &[Scalar]) -> Result<Scalar> {
    if !w.gr.odd_type {
        return Err(Error::NotApplicable("type even: every level is allowed".into()));
    }
    check_len(w, lambda)?;
    let wd = &w.weights;
    let shift = f_add(&wd.rho_e0_bar, &wd.delta_bar);
    Ok(&(&w.c0 + &wd.pair(lambda, lambda)) + &(&two() * &wd.pair(lambda, &shift)))
}

/// `matchable_c(λ) − c`; zero exactly for matchable pairs.
pub fn matchability_defect(w: &WAlgebra, pair: &MatchablePair) -> Result<Scalar> {
    Ok(&matchable_c(w, &pair.lambda)? - &pair.c)
}

pub fn is_matchable(w: &WAlgebra, pair: &MatchablePair) -> Result<bool> {
    if !w.gr.odd_type {
        check_len(w, &pair.lambda)?;
        return Ok(true);
    }
    Ok(matchability_defect(w, pair)?.is_zero())
}

/// Dimension of one weight space of a truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpace {
    pub weight: Functional,
    pub h0: Option<Scalar>,
    pub even: usize,
    pub odd: usize,
}

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.even + self.odd
    }
}

/// A cyclic module `U(g, e)·v₀` truncated by lowering degree.
///
/// Basis vectors are PBW monomials in the free generators (lowering ones and
/// Θ_F) applied to `v₀`. `actions[k][row][col]` is generator `k` on basis
/// vector `col`; `truncated[k][col]` records that part of the image left the
/// window and was dropped from the matrix.
pub struct VermaTruncation {
    pub lambda: Functional,
    pub c: Scalar,
    pub bound: usize,
    pub names: Vec<String>,
    pub roles: Vec<Role>,
    pub gen_parity: Vec<bool>,
    pub gen_weight: Vec<Functional>,
    pub basis: Vec<Mono>,
    pub index: HashMap<Mono, usize>,
    pub parity: Vec<bool>,
    pub lowering_degree: Vec<usize>,
    pub offsets: Vec<Functional>,
    pub h0: Option<Functional>,
    pub actions: Vec<Matrix>,
    pub truncated: Vec<Vec<bool>>,
    pub rewriter: Rewriter<Presented>,
    pub nfree: usize,
}

impl VermaTruncation {
    fn induced(w: &WAlgebra, lambda: &[Scalar], c: &Scalar, bound: usize, tails: HashMap<usize, Poly>) -> Result<Self> {
        let pres = w.presentation()?;
        let gens = w.gens();
        let nfree = gens.iter().take_while(|g| matches!(g.role, Role::Lowering | Role::ThetaF)).count();
        if gens[nfree..].iter().any(|g| matches!(g.role, Role::Lowering | Role::ThetaF)) {
            return Err(Error::Internal("free generators must precede the others".into()));
        }
        let rewriter = Rewriter::new(pres.with_tails(tails));
        let names = pres.names.clone();
        let roles: Vec<Role> = gens.iter().map(|g| g.role).collect();
        let gen_parity = pres.parity.clone();
        let gen_weight: Vec<Functional> = (0..gens.len()).map(|k| w.basis.weight(k)).collect();

        let mut basis = Vec::new();
        fn rec(k: usize, nfree: usize, left: usize, roles: &[Role], par: &[bool], cur: &mut Mono, out: &mut Vec<Mono>) {
            if k == nfree {
                out.push(cur.clone());
                return;
            }
            rec(k + 1, nfree, left, roles, par, cur, out);
            let counts = roles[k] == Role::Lowering;
            let max_e = if par[k] {
                1
            } else if counts {
                left
            } else {
                // an even free generator outside the lowering set does not occur
                0
            };
            for e in 1..=max_e {
                let cost = if counts { e } else { 0 };
                if cost > left {
                    break;
                }
                cur.push((k as u16, e as u16));
                rec(k + 1, nfree, left - cost, roles, par, cur, out);
                cur.pop();
            }
        }
        rec(0, nfree, bound, &roles, &gen_parity, &mut Vec::new(), &mut basis);
        let lowdeg = |m: &Mono| -> usize {
            m.iter().filter(|(g, _)| roles[*g as usize] == Role::Lowering).map(|&(_, e)| e as usize).sum()
        };
        basis.sort_by(|a, b| lowdeg(a).cmp(&lowdeg(b)).then_with(|| a.cmp(b)));
        let index: HashMap<Mono, usize> = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let parity: Vec<bool> = basis.iter().map(|m| rewriter.parity(m)).collect();
        let lowering_degree: Vec<usize> = basis.iter().map(lowdeg).collect();
        let rank = w.gr.rank_he();
        let offsets: Vec<Functional> = basis
            .iter()
            .map(|m| {
                let mut acc = vec![Scalar::zero(); rank];
                for &(g, e) in m {
                    let s = Scalar::from_int(e as i64);
                    acc = f_add(&acc, &f_scale(&s, &gen_weight[g as usize]));
                }
                acc
            })
            .collect();
        let h0 = if w.gr.odd_type { w.gr.compute_h0().ok() } else { None };

        let n = basis.len();
        let mut actions = Vec::with_capacity(gens.len());
        let mut truncated = Vec::with_capacity(gens.len());
        for k in 0..gens.len() {
            let mut mat = linalg::zeros(n, n);
            let mut flags = vec![false; n];
            for (col, m) in basis.iter().enumerate() {
                let img = rewriter.act_gen(k, m);
                for (mono, coef) in &img.terms {
                    match index.get(mono) {
                        Some(&row) => mat[row][col] = coef.clone(),
                        None => flags[col] = true,
                    }
                }
            }
            actions.push(mat);
            truncated.push(flags);
        }
        Ok(VermaTruncation {
            lambda: lambda.to_vec(),
            c: c.clone(),
            bound,
            names,
            roles,
            gen_parity,
            gen_weight,
            basis,
            index,
            parity,
            lowering_degree,
            offsets,
            h0,
            actions,
            truncated,
            rewriter,
            nfree,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `(even, odd)` dimensions.
    pub fn sdim(&self) -> (usize, usize) {
        let odd = self.parity.iter().filter(|&&p| p).count();
        (self.dim() - odd, odd)
    }

    /// True when no generator image left the window.
    pub fn untruncated(&self) -> bool {
        self.truncated.iter().all(|f| f.iter().all(|&b| !b))
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Absolute weight of a basis vector.
    pub fn weight(&self, i: usize) -> Functional {
        f_add(&self.lambda, &self.offsets[i])
    }

    /// `λ(h₀)` shifted by the offset, when h₀ exists.
    pub fn h0_eigenvalue(&self, i: usize) -> Option<Scalar> {
        self.h0.as_ref().map(|h| eval_functional(&self.weight(i), h))
    }

    /// Weight spaces in order of first appearance.
    pub fn weight_spaces(&self) -> Vec<WeightSpace> {
        let mut out: Vec<WeightSpace> = Vec::new();
        for i in 0..self.dim() {
            let wt = self.weight(i);
            let pos = match out.iter().position(|s| s.weight == wt) {
                Some(p) => p,
                None => {
                    out.push(WeightSpace { weight: wt, h0: self.h0_eigenvalue(i), even: 0, odd: 0 });
                    out.len() - 1
                }
            };
            if self.parity[i] {
                out[pos].odd += 1;
            } else {
                out[pos].even += 1;
            }
        }
        out
    }

    /// Basis indices of the top weight space.
    pub fn top_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.offsets[i].iter().all(|x| x.is_zero())).collect()
    }

    /// Exact action on a module element given in monomial coordinates.
    pub fn act(&self, k: usize, v: &Poly) -> Poly {
        self.rewriter.act_gen_on(k, v)
    }

    pub fn vector(&self, coords: &[Scalar]) -> Poly {
        let mut p = Poly::zero();
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                p.add_term(self.basis[i].clone(), c.clone());
            }
        }
        p
    }

    pub fn render(&self, v: &Poly) -> String {
        let s = v.render(&|g| self.names[g].clone());
        if v.terms.keys().any(|m| m.is_empty()) || v.is_zero() {
            s.replace(" 1 ", " v0 ")
        } else {
            s
        }
    }

    /// Weight-zero generators restricted to the top space, as a small module.
    pub fn top_module(&self) -> SmallModule {
        let top = self.top_indices();
        let mats = self
            .actions
            .iter()
            .map(|a| top.iter().map(|&r| top.iter().map(|&c| a[r][c].clone()).collect()).collect())
            .collect();
        SmallModule { mats, parity: top.iter().map(|&i| self.parity[i]).collect() }
    }

    /// Module axioms `a(bv) ∓ b(av) = [a, b]v` on basis vectors of lowering
    /// degree at most `depth`, computed without truncation.
    pub fn module_axioms(&self, depth: usize) -> Check {
        let pres = &self.rewriter.alg;
        let n = self.names.len();
        let mut bad = Vec::new();
        for (col, m) in self.basis.iter().enumerate() {
            if self.lowering_degree[col] > depth {
                continue;
            }
            let v = Poly::monomial(m.clone(), Scalar::one());
            for a in 0..n {
                for b in 0..=a {
                    let sign = if self.gen_parity[a] && self.gen_parity[b] { Scalar::one() } else { -Scalar::one() };
                    let mut lhs = self.act(a, &self.act(b, &v));
                    lhs.add_scaled(&self.act(b, &self.act(a, &v)), &sign);
                    let rhs = self.rewriter.act_poly(&pres.table[a][b], &v);
                    if lhs != rhs {
                        bad.push(format!("[{}, {}] on {}", self.names[a], self.names[b], self.render(&v)));
                    }
                }
            }
        }
        Check::from_list("module-axioms", "generators act compatibly with the defining brackets", bad)
    }

    /// Every weight offset is a non-positive integral combination of the
    /// restricted simple roots.
    pub fn dominance_check(&self, w: &WAlgebra) -> Result<Check> {
        let betas = restricted_simple_roots(w)?;
        let k = w.gr.rank_he();
        let mut bad = Vec::new();
        for (i, off) in self.offsets.iter().enumerate() {
            if k == 0 {
                continue;
            }
            // columns are the βs
            let a: Matrix = (0..k).map(|r| betas.iter().map(|b| b[r].clone()).collect()).collect();
            let neg: Vec<Scalar> = off.iter().map(|x| -x).collect();
            match linalg::solve(&a, &neg) {
                Some(n) if n.iter().all(is_nonnegative_integer) => {
                    if i > 0 && n.iter().all(|x| x.is_zero()) && !self.top_indices().contains(&i) {
                        bad.push(format!("offset of {} vanishes", self.render(&Poly::monomial(self.basis[i].clone(), Scalar::one()))));
                    }
                }
                _ => bad.push(format!("offset {} is not dominated", render_functional(off))),
            }
        }
        Ok(Check::from_list("dominance", "all weights lie in λ − ℤ₊(restricted simple roots)", bad))
    }

    /// h₀ eigenvalues lie in `λ(h₀) − ℤ₊`, with equality only on the top space.
    pub fn h0_check(&self) -> Check {
        let mut bad = Vec::new();
        if let Some(h0) = &self.h0 {
            for (i, off) in self.offsets.iter().enumerate() {
                let d = -&eval_functional(off, h0);
                let top = off.iter().all(|x| x.is_zero());
                if !is_nonnegative_integer(&d) || (d.is_zero() != top) {
                    bad.push(format!("basis vector {} has h0 shift {}", i, d.render()));
                }
            }
        }
        Check::from_list("h0-spectrum", "h₀ eigenvalues are λ(h₀) − k with k ∈ ℤ₊, k = 0 only at the top", bad)
    }
}

/// Restrictions to h^e of the simple roots other than the last one.
pub fn restricted_simple_roots(w: &WAlgebra) -> Result<Vec<Functional>> {
    let gr = &w.gr;
    let simple = &gr.datum.simple;
    let out: Vec<Functional> = simple[..simple.len() - 1].iter().map(|&s| gr.restrict_root(s)).collect();
    if out.len() != gr.rank_he() || linalg::rank(&out) != gr.rank_he() {
        return Err(Error::NotApplicable("restricted simple roots do not form a basis of (h^e)*".into()));
    }
    Ok(out)
}

/// Tails of the Verma module: Θ_{h_i} ↦ λ_i, C ↦ c, all others ↦ 0.
fn verma_tails(w: &WAlgebra, lambda: &[Scalar], c: &Scalar) -> HashMap<usize, Poly> {
    let mut tails = HashMap::new();
    for (k, g) in w.gens().iter().enumerate() {
        let t = match g.role {
            Role::Lowering | Role::ThetaF => continue,
            Role::Cartan(i) => Poly::constant(lambda[i].clone()),
            Role::Casimir => Poly::constant(c.clone()),
            Role::Critical | Role::Raising => Poly::zero(),
        };
        tails.insert(k, t);
    }
    tails
}

/// The Verma module Z(λ, c) truncated at lowering degree `bound`.
pub fn verma_truncate(w: &WAlgebra, pair: &MatchablePair, bound: usize) -> Result<VermaTruncation> {
    check_len(w, &pair.lambda)?;
    if w.gr.odd_type {
        let d = matchability_defect(w, pair)?;
        if !d.is_zero() {
            return Err(Error::Matchability(format!(
                "(λ = {}, c = {}) violates the matchability condition; matchable level is {}",
                render_functional(&pair.lambda),
                pair.c.render(),
                matchable_c(w, &pair.lambda)?.render()
            )));
        }
    }
    VermaTruncation::induced(w, &pair.lambda, &pair.c, bound, verma_tails(w, &pair.lambda, &pair.c))
}

/// `½[Θ_{[v,e]}, Θ_{[v,e]}]·m − Θ_{[v,e]}(Θ_{[v,e]}·m)` for a monomial `m`
/// applied to the top vector, with the Verma tails at an arbitrary pair.
/// In a genuine module this vanishes; it equals `¼(matchable_c(λ) − c)·m`.
pub fn matchability_remainder(w: &WAlgebra, pair: &MatchablePair, m: &Mono) -> Result<Poly> {
    check_len(w, &pair.lambda)?;
    let k = w.index("E").ok_or_else(|| Error::NotApplicable("type odd only".into()))?;
    let pres = w.presentation()?;
    let rw = Rewriter::new(pres.with_tails(verma_tails(w, &pair.lambda, &pair.c)));
    let v = Poly::monomial(m.clone(), Scalar::one());
    let half = rw.act_poly(&pres.table[k][k], &v).scaled(&Scalar::frac(1, 2));
    let twice = rw.act_gen_on(k, &rw.act_gen_on(k, &v));
    Ok(half.sub(&twice))
}

/// The module M_e(λ), induced from the simple U(g₀, e)-module V_λ through
/// π_ε (type odd), or from the one-dimensional module of level `level`
/// (type even).
pub fn highest_weight_module(
    w: &WAlgebra,
    cartan: &CartanW,
    lambda: &[Scalar],
    level: Option<&Scalar>,
    bound: usize,
) -> Result<VermaTruncation> {
    check_len(w, lambda)?;
    let vmod = cartan.simple_module_with_level(lambda, level)?;
    let proj = Projection::new(w, cartan);
    let f_idx = w.gens().iter().position(|g| g.role == Role::ThetaF);
    // π_ε(Θ_F) = b₁ F′ identifies F′v_λ with b₁⁻¹ Θ_F v₀
    let b1 = match (cartan.odd_type, f_idx) {
        (true, Some(k)) => {
            let img = proj.pi_eps(&Poly::gen(k))?;
            let fp = cartan.index("F'").ok_or_else(|| Error::Internal("no F' in U(g0, e)".into()))?;
            Some(img.coeff(&vec![(fp as u16, 1)]))
        }
        _ => None,
    };
    let mut tails = HashMap::new();
    for (k, g) in w.gens().iter().enumerate() {
        match g.role {
            Role::Lowering | Role::ThetaF => continue,
            Role::Raising => {
                tails.insert(k, Poly::zero());
            }
            _ => {
                let img = proj.pi_eps(&Poly::gen(k))?;
                let mat = vmod.eval(&img);
                let mut t = Poly::constant(mat[0][0].clone());
                if mat.len() > 1 && !mat[1][0].is_zero() {
                    match (f_idx, &b1) {
                        (Some(fk), Some(b)) => t.add_term(vec![(fk as u16, 1)], &mat[1][0] * &b.inv()?),
                        _ => {
                            return Err(Error::NotApplicable(format!(
                                "{} moves the top vector of V_λ but no Θ_F generator is present",
                                g.name
                            )))
                        }
                    }
                }
                tails.insert(k, t);
            }
        }
    }
    let c = match w.index("C").and_then(|k| tails.get(&k)) {
        Some(p) => p.constant_term(),
        None => Scalar::zero(),
    };
    // the top vector carries the Θ_{h_i} eigenvalues read off the tails
    let mut top = lambda.to_vec();
    for (k, g) in w.gens().iter().enumerate() {
        if let Role::Cartan(i) = g.role {
            top[i] = tails[&k].constant_term();
        }
    }
    VermaTruncation::induced(w, &top, &c, bound, tails)
}

/// The Verma pair whose module maps onto M_e(λ): top weight `λ + δ̄` in
/// type odd (λ in type even) and level ψ(C).
pub fn highest_weight_pair(w: &WAlgebra, lambda: &[Scalar], level: Option<&Scalar>) -> Result<MatchablePair> {
    let top = if w.gr.odd_type { f_add(lambda, &w.weights.delta_bar) } else { lambda.to_vec() };
    Ok(MatchablePair { lambda: top, c: psi_c(w, lambda, level)? })
}

/// Action matrices of M_e(λ) and of the Verma module of
/// `highest_weight_pair` agree on the common window.
pub fn compare_with_verma(w: &WAlgebra, me: &VermaTruncation, pair: &MatchablePair) -> Result<Check> {
    let z = verma_truncate(w, pair, me.bound)?;
    let mut bad = Vec::new();
    if z.basis != me.basis || z.lambda != me.lambda {
        bad.push("bases or top weights differ".to_string());
    } else {
        for k in 0..z.names.len() {
            if z.actions[k] != me.actions[k] {
                bad.push(z.names[k].clone());
            }
        }
    }
    Ok(Check::from_list("me-vs-verma", "M_e(λ) equals the Verma module at (λ + δ̄, ψ(C))", bad))
}

/// Top space of M_e(λ) against V_λ: the weight-zero generators act on
/// `(v₀, Θ_F v₀)` as π_ε of themselves on `(v_λ, b₁F′v_λ)`.
pub fn top_space_matches(
    w: &WAlgebra,
    cartan: &CartanW,
    trunc: &VermaTruncation,
    lambda: &[Scalar],
    level: Option<&Scalar>,
) -> Result<Check> {
    let vmod = cartan.simple_module_with_level(lambda, level)?;
    let proj = Projection::new(w, cartan);
    let top = trunc.top_indices();
    let tm = trunc.top_module();
    let mut scale = vec![Scalar::one(); top.len()];
    if top.len() == 2 {
        let fk = trunc.roles.iter().position(|r| *r == Role::ThetaF).ok_or_else(|| Error::Internal("no Θ_F".into()))?;
        let fp = cartan.index("F'").ok_or_else(|| Error::Internal("no F'".into()))?;
        scale[1] = proj.pi_eps(&Poly::gen(fk))?.coeff(&vec![(fp as u16, 1)]);
    }
    if top.len() != vmod.parity.len() {
        return Ok(Check::from_list("top-space", "top space is V_λ", vec![format!("top dimension {}", top.len())]));
    }
    let mut bad = Vec::new();
    for (k, g) in w.gens().iter().enumerate() {
        if !w.basis.weight(k).iter().all(|x| x.is_zero()) {
            continue;
        }
        let want = vmod.eval(&proj.pi_eps(&Poly::gen(k))?);
        // T·A = M·T with T = diag(scale)
        let n = top.len();
        for r in 0..n {
            for c in 0..n {
                let lhs = &scale[r] * &tm.mats[k][r][c];
                let rhs = &want[r][c] * &scale[c];
                if lhs != rhs {
                    bad.push(format!("{} at ({}, {})", g.name, r, c));
                }
            }
        }
    }
    Ok(Check::from_list("top-space", "weight-zero generators act on the top space as on V_λ", bad))
}

/// A vector killed by all raising generators and by Θ_{[v,e]}.
#[derive(Clone, Debug)]
pub struct SingularVector {
    pub weight: Functional,
    pub vector: Poly,
}

fn killers(trunc: &VermaTruncation) -> Vec<usize> {
    (0..trunc.names.len()).filter(|&k| matches!(trunc.roles[k], Role::Raising | Role::Critical)).collect()
}

/// Whether `v` is killed by every raising generator and by Θ_{[v,e]}.
pub fn is_singular(trunc: &VermaTruncation, v: &Poly) -> bool {
    killers(trunc).into_iter().all(|k| trunc.act(k, v).is_zero())
}

/// Singular vectors of lowering degree at most `depth` outside the top
/// weight space, one basis per weight space.
pub fn maximal_vector_scan(trunc: &VermaTruncation, depth: usize) -> Result<Vec<SingularVector>> {
    if depth > trunc.bound {
        return Err(Error::Precondition(format!("depth {} exceeds the truncation bound {}", depth, trunc.bound)));
    }
    let ks = killers(trunc);
    let mut out = Vec::new();
    for ws in trunc.weight_spaces() {
        if ws.weight == trunc.lambda {
            continue;
        }
        let cols: Vec<usize> =
            (0..trunc.dim()).filter(|&i| trunc.weight(i) == ws.weight && trunc.lowering_degree[i] <= depth).collect();
        if cols.is_empty() {
            continue;
        }
        let mut row_of: HashMap<(usize, Mono), usize> = HashMap::new();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for (j, &i) in cols.iter().enumerate() {
            let v = Poly::monomial(trunc.basis[i].clone(), Scalar::one());
            for &k in &ks {
                for (m, c) in &trunc.act(k, &v).terms {
                    let r = *row_of.entry((k, m.clone())).or_insert_with(|| {
                        rows.push(vec![Scalar::zero(); cols.len()]);
                        rows.len() - 1
                    });
                    rows[r][j] = c.clone();
                }
            }
        }
        for v in linalg::nullspace(&rows, cols.len()) {
            let mut p = Poly::zero();
            for (j, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    p.add_term(trunc.basis[cols[j]].clone(), c.clone());
                }
            }
            out.push(SingularVector { weight: ws.weight.clone(), vector: p });
        }
    }
    Ok(out)
}

/// Evidence that the simple quotient is of type Q (type odd, finite
/// flavor) or of type M.
#[derive(Clone, Debug)]
pub struct TypeCertificate {
    /// Odd endomorphisms of the top space as a module over the weight-zero
    /// generators.
    pub odd_commutant_dim: usize,
    /// Right multiplication by Θ_F commutes with every generator.
    pub j_commutes: Option<bool>,
    /// Its square is ½.
    pub j_square_half: Option<bool>,
}

impl TypeCertificate {
    pub fn is_type_q(&self) -> bool {
        self.odd_commutant_dim == 1 && self.j_commutes == Some(true) && self.j_square_half == Some(true)
    }
}

pub fn type_certificate(trunc: &VermaTruncation) -> TypeCertificate {
    let tm = trunc.top_module();
    let odd_commutant_dim = tm.odd_endomorphisms(&trunc.gen_parity).len();
    let fk = trunc.roles.iter().position(|r| *r == Role::ThetaF);
    let (j_commutes, j_square_half) = match fk {
        None => (None, None),
        Some(fk) => {
            let fv = Poly::gen(fk);
            let j = |v: &Poly| -> Poly {
                let mut out = Poly::zero();
                for (m, c) in &v.terms {
                    out.add_scaled(&trunc.rewriter.act_poly(&Poly::monomial(m.clone(), Scalar::one()), &fv), c);
                }
                out
            };
            let mut commutes = true;
            let mut square = true;
            for m in &trunc.basis {
                let v = Poly::monomial(m.clone(), Scalar::one());
                let jv = j(&v);
                if j(&jv) != v.scaled(&Scalar::frac(1, 2)) {
                    square = false;
                }
                for k in 0..trunc.names.len() {
                    if trunc.act(k, &jv) != j(&trunc.act(k, &v)) {
                        commutes = false;
                    }
                }
            }
            (Some(commutes), Some(square))
        }
    };
    TypeCertificate { odd_commutant_dim, j_commutes, j_square_half }
}

/// The value ψ(C) of the central character of M_e(λ), together with the
/// second closed form and the value read off the top vector.
#[derive(Clone, Debug)]
pub struct CentralCharacter {
    pub lambda: Functional,
    pub level: Option<Scalar>,
    pub psi_c: Scalar,
    /// The same value through `(λ,λ) + (λ, 2ρ̄_{e,0} + 4δ̄)` (type odd).
    pub expanded: Option<Scalar>,
}

/// ψ(C) from the closed form.
pub fn psi_c(w: &WAlgebra, lambda: &[Scalar], level: Option<&Scalar>) -> Result<Scalar> {
    check_len(w, lambda)?;
    let wd = &w.weights;
    if w.gr.odd_type {
        let l2r = f_add(lambda, &f_scale(&two(), &wd.rho_bar));
        let mut v = &w.c0 + &wd.pair(lambda, &l2r);
        v += &(&two() * &wd.pair(&wd.rho_e0_bar, &wd.delta_bar));
        v += &(&Scalar::from_int(3) * &wd.pair(&wd.delta_bar, &wd.delta_bar));
        Ok(v)
    } else {
        let c = level.ok_or_else(|| Error::Precondition("type even needs a level".into()))?;
        // C acts on V as C′ + (h′, h′ + 2ρ̄); π_ε shifts h′ by −δ̄
        let mu = f_sub(lambda, &wd.delta_bar);
        let m2r = f_add(&mu, &f_scale(&two(), &wd.rho_bar));
        Ok(c + &wd.pair(&mu, &m2r))
    }
}

/// The expanded form `c₀ + (λ,λ) + (λ, 2ρ̄_{e,0} + 4δ̄) + 2(ρ̄_{e,0},δ̄) + 3(δ̄,δ̄)`.
pub fn psi_c_expanded(w: &WAlgebra, lambda: &[Scalar]) -> Result<Scalar> {
    if !w.gr.odd_type {
        return Err(Error::NotApplicable("type odd only".into()));
    }
    check_len(w, lambda)?;
    let wd = &w.weights;
    let lin = f_add(&f_scale(&two(), &wd.rho_e0_bar), &f_scale(&Scalar::from_int(4), &wd.delta_bar));
    let mut v = &w.c0 + &wd.pair(lambda, lambda);
    v += &wd.pair(lambda, &lin);
    v += &(&two() * &wd.pair(&wd.rho_e0_bar, &wd.delta_bar));
    v += &(&Scalar::from_int(3) * &wd.pair(&wd.delta_bar, &wd.delta_bar));
    Ok(v)
}

/// ψ(C) read from π_ε(C) on the top vector of V_λ.
pub fn psi_c_direct(w: &WAlgebra, cartan: &CartanW, lambda: &[Scalar], level: Option<&Scalar>) -> Result<Scalar> {
    let k = w.index("C").ok_or_else(|| Error::Internal("no C".into()))?;
    let vmod = cartan.simple_module_with_level(lambda, level)?;
    let proj = Projection::new(w, cartan);
    let mat = vmod.eval(&proj.pi_eps(&Poly::gen(k))?);
    if mat.len() > 1 && !mat[1][0].is_zero() {
        return Err(Error::Consistency("C does not act by a scalar on V_λ".into()));
    }
    Ok(mat[0][0].clone())
}

pub fn central_character(w: &WAlgebra, lambda: &[Scalar], level: Option<&Scalar>) -> Result<CentralCharacter> {
    let psi = psi_c(w, lambda, level)?;
    let expanded = if w.gr.odd_type { Some(psi_c_expanded(w, lambda)?) } else { None };
    Ok(CentralCharacter {
        lambda: lambda.to_vec(),
        level: level.cloned(),
        psi_c: psi,
        expanded,
    })
}

/// `ψ^μ(C) − ψ^λ(C)` at a common level.
pub fn psi_difference(w: &WAlgebra, lambda: &[Scalar], mu: &[Scalar], level: Option<&Scalar>) -> Result<Scalar> {
    Ok(&psi_c(w, mu, level)? - &psi_c(w, lambda, level)?)
}

/// The reflection of λ through the centre of the quadric `ψ = ψ(λ)`; it
/// always lies in the block of λ.
pub fn reflected_partner(w: &WAlgebra, lambda: &[Scalar]) -> Result<Functional> {
    check_len(w, lambda)?;
    let wd = &w.weights;
    let mut centre = f_scale(&-Scalar::one(), &wd.rho_bar);
    if !w.gr.odd_type {
        centre = f_add(&centre, &wd.delta_bar);
    }
    Ok(f_sub(&f_scale(&two(), &centre), lambda))
}

/// Group the inputs by equal ψ(C), in order of first appearance.
pub fn block_partition(w: &WAlgebra, items: &[(Functional, Option<Scalar>)]) -> Result<Vec<Vec<usize>>> {
    let mut keys: Vec<Scalar> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, (lambda, level)) in items.iter().enumerate() {
        let psi = psi_c(w, lambda, level.as_ref())?;
        match keys.iter().position(|k| *k == psi) {
            Some(p) => blocks[p].push(i),
            None => {
                keys.push(psi);
                blocks.push(vec![i]);
            }
        }
    }
    Ok(blocks)
}

/// Per weight space of the Whittaker vectors in the window.
#[derive(Clone, Debug)]
pub struct WhSpace {
    pub offset: Functional,
    pub dim: usize,
    pub verma_dim: usize,
}

/// Outcome of comparing Wh(M) with a Verma module.
#[derive(Clone, Debug)]
pub struct WhComparison {
    pub pair: MatchablePair,
    pub spaces: Vec<WhSpace>,
    pub checks: Vec<Check>,
}

impl WhComparison {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.spaces.iter().all(|s| s.dim == s.verma_dim)
    }
}

/// The induced g-module M(λ) (type odd) or M(λ, c) (type even), realized
/// on U(g) with tails on the top vector `1_λ` and truncated by Kazhdan
/// degree.
pub struct WhittakerModel<'a> {
    pub w: &'a WAlgebra,
    pub lambda: Functional,
    pub level: Option<Scalar>,
    pub bound: i64,
    /// `order[k]` = adapted basis index of engine generator k.
    pub order: Vec<usize>,
    pub nfree: usize,
    pub kweight: Vec<i64>,
    /// `e·1_λ` as a polynomial in the free generators.
    pub e_tail: Poly,
    pub m: Rewriter<EnvelopingAlgebra>,
    lifts: Vec<Poly>,
    conditions: Vec<usize>,
    m0_free: Vec<bool>,
}

impl<'a> WhittakerModel<'a> {
    pub fn build(w: &'a WAlgebra, lambda: &[Scalar], level: Option<&Scalar>, bound: i64) -> Result<Self> {
        check_len(w, lambda)?;
        let gr = &w.gr;
        if gr.odd_type && w.flavor == Flavor::Refined {
            return Err(Error::NotApplicable("the Whittaker model is built for the finite flavor in type odd".into()));
        }
        if !gr.odd_type && level.is_none() {
            return Err(Error::Precondition("type even needs a level".into()));
        }
        if bound < 2 {
            return Err(Error::Precondition("Kazhdan bound must be at least 2".into()));
        }
        let g = &gr.g;
        let n = g.dim();
        let s2 = gr.s / 2;
        let rh = gr.r / 2;
        let mut free: Vec<usize> = Vec::new();
        free.extend(&gr.u[..s2]);
        free.extend(&gr.v[..rh]);
        if let Some(vm) = gr.vmid {
            free.push(vm);
        }
        free.extend(&gr.x);
        free.extend(&gr.y);
        free.extend((0..s2).map(|i| gr.g1[i]));
        free.extend((0..rh).map(|i| gr.g1[gr.s + i]));
        free.push(gr.h);
        let nfree = free.len();
        let crit = if gr.odd_type { Some(gr.g1[gr.s + rh]) } else { None };
        let mut order = free.clone();
        order.push(gr.f);
        if let Some(cr) = crit {
            order.push(cr);
        }
        order.push(gr.e);
        order.extend(&gr.he);
        let rest: Vec<usize> = (0..n).filter(|i| !order.contains(i)).collect();
        order.extend(&rest);
        if order.len() != n {
            return Err(Error::Internal("engine order does not cover g".into()));
        }

        // sign check: free root vectors are negative, annihilated ones positive
        let positive = |i: usize| gr.root_of[i].map(|r| gr.datum.positive[r]);
        for &i in &free {
            if i != gr.h && Some(i) != gr.vmid && positive(i) != Some(false) {
                return Err(Error::Consistency(format!("free vector {} is not a negative root vector", g.labels[i])));
            }
        }
        for &i in &rest {
            if positive(i) != Some(true) {
                return Err(Error::Consistency(format!("annihilated vector {} is not a positive root vector", g.labels[i])));
            }
        }

        let mut position = vec![0usize; n];
        for (k, &b) in order.iter().enumerate() {
            position[b] = k;
        }
        let p_h = position[gr.h];
        let h1 = Poly::gen(p_h);
        let h2 = Poly::monomial(vec![(p_h as u16, 2)], Scalar::one());

        let mut tails: HashMap<usize, Poly> = HashMap::new();
        tails.insert(position[gr.f], Poly::constant(gr.chi(gr.f)));
        for (i, &t) in gr.he.iter().enumerate() {
            tails.insert(position[t], Poly::constant(lambda[i].clone()));
        }
        for &i in &rest {
            tails.insert(position[i], Poly::zero());
        }
        if let Some(cr) = crit {
            let (ke, be) = single_support(gr.big_e.as_ref(), "E")?;
            let (kf, bf) = single_support(gr.big_f.as_ref(), "F")?;
            if ke != cr || Some(kf) != gr.vmid {
                return Err(Error::Consistency("E and F are not on the critical and middle lines".into()));
            }
            // E·1 = (¾F − ½Fh)·1
            let p_f = position[kf] as u16;
            let mut t = Poly::zero();
            t.add_term(vec![(p_f, 1)], &Scalar::frac(3, 4) * &bf);
            t.add_term(vec![(p_f, 1), (p_h as u16, 1)], &Scalar::frac(-1, 2) * &bf);
            tails.insert(position[cr], t.scaled(&be.inv()?));
        }
        // e·1 from C_θ·1 = −⅛ (type odd) or c (type even)
        let p_e = position[gr.e];
        let e_tail = {
            let mut pre = tails.clone();
            pre.insert(p_e, Poly::zero());
            let rw = Rewriter::new(EnvelopingAlgebra::with_order(g, order.clone(), pre));
            let one = Poly::one();
            if gr.odd_type {
                let bige = rw.alg.elem(gr.big_e.as_ref().unwrap());
                let bigf = rw.alg.elem(gr.big_f.as_ref().unwrap());
                let fe = rw.act_poly(&bigf, &rw.act_poly(&bige, &one));
                let mut r0 = h2.scaled(&Scalar::frac(1, 2));
                r0.add_scaled(&h1, &Scalar::frac(-3, 2));
                r0.add(&fe);
                Poly::constant(Scalar::frac(-1, 8)).sub(&r0).scaled(&Scalar::frac(1, 2))
            } else {
                let mut r0 = h2.scaled(&Scalar::frac(1, 2));
                r0.add_scaled(&h1, &-Scalar::one());
                Poly::constant(level.unwrap().clone()).sub(&r0).scaled(&Scalar::frac(1, 2))
            }
        };
        tails.insert(p_e, e_tail.clone());
        let m = Rewriter::new(EnvelopingAlgebra::with_order(g, order.clone(), tails));

        let kweight: Vec<i64> = order.iter().map(|&b| gr.degree[b] + 2).collect();
        let lifts: Vec<Poly> = w
            .gens()
            .iter()
            .map(|gen| {
                let mut p = Poly::zero();
                for (mono, c) in &gen.lift.terms {
                    let mm: Mono = mono.iter().map(|&(a, e)| (position[a as usize] as u16, e)).collect();
                    p.add_term(mm, c.clone());
                }
                p
            })
            .collect();
        let sub = &gr.subalgebras;
        let conditions: Vec<usize> = sub.m.iter().filter(|&&i| i != gr.f).map(|&i| position[i]).collect();
        let mut m0_free = vec![true; nfree];
        for &i in gr.u[..s2].iter().chain(&gr.v[..rh]) {
            m0_free[position[i]] = false;
        }
        m0_free[p_h] = false;
        Ok(WhittakerModel {
            w,
            lambda: lambda.to_vec(),
            level: level.cloned(),
            bound,
            order,
            nfree,
            kweight,
            e_tail,
            m,
            lifts,
            conditions,
            m0_free,
        })
    }

    fn pos(&self, basis: usize) -> usize {
        self.m.alg.pos(basis)
    }

    pub fn one(&self) -> Poly {
        Poly::one()
    }

    /// Action of an element of g.
    pub fn act_elem(&self, x: &[Scalar], v: &Poly) -> Poly {
        self.m.act_poly(&self.m.alg.elem(x), v)
    }

    /// Action of the lift of a W generator (valid on Whittaker vectors).
    pub fn act_lift(&self, k: usize, v: &Poly) -> Poly {
        self.m.act_poly(&self.lifts[k], v)
    }

    pub fn render(&self, v: &Poly) -> String {
        v.render(&|k| self.w.gr.g.labels[self.order[k]].clone())
    }

    fn kdeg(&self, m: &Mono) -> i64 {
        m.iter().map(|&(g, e)| self.kweight[g as usize] * e as i64).sum()
    }

    fn offset(&self, m: &Mono) -> Functional {
        let mut acc = vec![Scalar::zero(); self.w.gr.rank_he()];
        for &(g, e) in m {
            acc = f_add(&acc, &f_scale(&Scalar::from_int(e as i64), &self.w.gr.weight[self.order[g as usize]]));
        }
        acc
    }

    /// PBW monomials in the free generators of Kazhdan degree ≤ bound.
    pub fn window(&self) -> Vec<Mono> {
        let mut out = Vec::new();
        let par: Vec<bool> = (0..self.nfree).map(|k| self.m.alg.parity[k]).collect();
        fn rec(k: usize, left: i64, kw: &[i64], par: &[bool], cur: &mut Mono, out: &mut Vec<Mono>) {
            if k == par.len() {
                out.push(cur.clone());
                return;
            }
            rec(k + 1, left, kw, par, cur, out);
            let max_e = if par[k] { 1 } else { i64::MAX };
            let mut e = 1;
            while e <= max_e && e * kw[k] <= left {
                cur.push((k as u16, e as u16));
                rec(k + 1, left - e * kw[k], kw, par, cur, out);
                cur.pop();
                e += 1;
            }
        }
        rec(0, self.bound, &self.kweight, &par, &mut Vec::new(), &mut out);
        out
    }

    /// Whittaker vectors in the window, per h^e weight offset.
    pub fn whittaker_vectors(&self) -> Vec<(Functional, Vec<Poly>)> {
        let window = self.window();
        let mut groups: Vec<(Functional, Vec<Mono>)> = Vec::new();
        for m in window {
            let off = self.offset(&m);
            match groups.iter_mut().find(|(o, _)| *o == off) {
                Some((_, v)) => v.push(m),
                None => groups.push((off, vec![m])),
            }
        }
        let p_f = self.pos(self.w.gr.f);
        let chi_f = self.w.gr.chi(self.w.gr.f);
        let mut out = Vec::new();
        for (off, monos) in groups {
            let mut row_of: HashMap<(usize, Mono), usize> = HashMap::new();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for (j, m) in monos.iter().enumerate() {
                let v = Poly::monomial(m.clone(), Scalar::one());
                let mut ops: Vec<(usize, Poly)> = Vec::new();
                let mut fv = self.m.act_gen_on(p_f, &v);
                fv.add_scaled(&v, &-&chi_f);
                ops.push((usize::MAX, fv));
                for &k in &self.conditions {
                    ops.push((k, self.m.act_gen_on(k, &v)));
                }
                for (k, img) in ops {
                    for (mm, c) in &img.terms {
                        let r = *row_of.entry((k, mm.clone())).or_insert_with(|| {
                            rows.push(vec![Scalar::zero(); monos.len()]);
                            rows.len() - 1
                        });
                        rows[r][j] = c.clone();
                    }
                }
            }
            let vecs: Vec<Poly> = linalg::nullspace(&rows, monos.len())
                .into_iter()
                .map(|v| {
                    let mut p = Poly::zero();
                    for (j, c) in v.iter().enumerate() {
                        if !c.is_zero() {
                            p.add_term(monos[j].clone(), c.clone());
                        }
                    }
                    p
                })
                .collect();
            out.push((off, vecs));
        }
        out
    }

    /// Projection to the span of monomials free of u, the lower v's and h.
    pub fn project_m0(&self, v: &Poly) -> Poly {
        v.filter(&|m: &Mono| m.iter().all(|&(g, _)| self.m0_free[g as usize]))
    }

    /// The Casimir C_θ of the osp(1|2) or sl(2) triple acting on `v`.
    pub fn c_theta(&self, v: &Poly) -> Poly {
        let gr = &self.w.gr;
        let g = &gr.g;
        let e = g.basis_elem(gr.e);
        let f = g.basis_elem(gr.f);
        let h = g.basis_elem(gr.h);
        let mut out = self.act_elem(&e, &self.act_elem(&f, v));
        out.add(&self.act_elem(&f, &self.act_elem(&e, v)));
        out.add_scaled(&self.act_elem(&h, &self.act_elem(&h, v)), &Scalar::frac(1, 2));
        if let (Some(be), Some(bf)) = (&gr.big_e, &gr.big_f) {
            out.add_scaled(&self.act_elem(be, &self.act_elem(bf, v)), &Scalar::frac(-1, 2));
            out.add_scaled(&self.act_elem(bf, &self.act_elem(be, v)), &Scalar::frac(1, 2));
        }
        out
    }

    /// The identity battery on the top vector and on low-degree vectors.
    pub fn battery(&self) -> Vec<Check> {
        let w = self.w;
        let gr = &w.gr;
        let g = &gr.g;
        let wd = &w.weights;
        let one = self.one();
        let mut checks = Vec::new();

        // osp(1|2) or sl(2) relations among e, h, f, E, F
        let mut bad = Vec::new();
        let (e, h, f) = (g.basis_elem(gr.e), g.basis_elem(gr.h), g.basis_elem(gr.f));
        let sc = |c: i64, x: &Elem| -> Elem { x.iter().map(|a| &Scalar::from_int(c) * a).collect() };
        let mut rel = vec![("[h,e] = 2e", g.bracket(&h, &e), sc(2, &e)), ("[h,f] = −2f", g.bracket(&h, &f), sc(-2, &f)), ("[e,f] = h", g.bracket(&e, &f), h.clone())];
        if let (Some(be), Some(bf)) = (&gr.big_e, &gr.big_f) {
            rel.push(("[h,E] = E", g.bracket(&h, be), be.clone()));
            rel.push(("[h,F] = −F", g.bracket(&h, bf), sc(-1, bf)));
            rel.push(("[e,F] = −E", g.bracket(&e, bf), sc(-1, be)));
            rel.push(("[f,E] = −F", g.bracket(&f, be), sc(-1, bf)));
            rel.push(("[E,E] = 2e", g.bracket(be, be), sc(2, &e)));
            rel.push(("[E,F] = h", g.bracket(be, bf), h.clone()));
            rel.push(("[F,F] = −2f", g.bracket(bf, bf), sc(-2, &f)));
            rel.push(("[e,E] = 0", g.bracket(&e, be), g.zero()));
            rel.push(("[f,F] = 0", g.bracket(&f, bf), g.zero()));
        }
        for (name, lhs, rhs) in rel {
            if lhs != rhs {
                bad.push(name.to_string());
            }
        }
        checks.push(Check::from_list("triple", "e, h, f (and E, F) span osp(1|2) or sl(2) with the standard brackets", bad));

        // module axioms on low Kazhdan degree vectors
        let mut bad = Vec::new();
        let n = g.dim();
        for m in self.window().into_iter().filter(|m| self.kdeg(m) <= 2) {
            let v = Poly::monomial(m.clone(), Scalar::one());
            for a in 0..n {
                for b in 0..=a {
                    let (xa, xb) = (g.basis_elem(a), g.basis_elem(b));
                    let sign = if g.parity[a] && g.parity[b] { Scalar::one() } else { -Scalar::one() };
                    let mut lhs = self.act_elem(&xa, &self.act_elem(&xb, &v));
                    lhs.add_scaled(&self.act_elem(&xb, &self.act_elem(&xa, &v)), &sign);
                    if lhs != self.act_elem(&g.bracket(&xa, &xb), &v) {
                        bad.push(format!("[{}, {}] on {}", g.labels[a], g.labels[b], self.render(&v)));
                    }
                }
            }
        }
        checks.push(Check::from_list("g-module", "M(λ) is a g-module on vectors of Kazhdan degree ≤ 2", bad));

        // Θ_t·1 = (λ + δ̄)(t)·1
        let mut bad = Vec::new();
        for (k, gen) in w.gens().iter().enumerate() {
            if let Role::Cartan(i) = gen.role {
                let want = one.scaled(&(&self.lambda[i] + &wd.delta_bar[i]));
                let got = self.act_lift(k, &one);
                if got != want {
                    bad.push(format!("{}: {}", gen.name, self.render(&got)));
                }
            }
        }
        checks.push(Check::from_list("cartan-on-top", "Θ_t·1_λ = (λ + δ̄)(t)·1_λ", bad));

        // positive generators kill 1
        let mut bad = Vec::new();
        for (k, gen) in w.gens().iter().enumerate() {
            if matches!(gen.role, Role::Raising | Role::Critical) {
                let got = self.act_lift(k, &one);
                if !got.is_zero() {
                    bad.push(format!("{}: {}", gen.name, self.render(&got)));
                }
            }
        }
        checks.push(Check::from_list("raising-on-top", "Θ_w·1_λ = 0 for positive w, including Θ_{[v,e]}", bad));

        // C_θ·1
        let want_ct = if gr.odd_type { Scalar::frac(-1, 8) } else { self.level.clone().unwrap() };
        let got = self.c_theta(&one);
        checks.push(Check::from_list(
            "c-theta-on-top",
            "C_θ·1_λ = −⅛·1_λ (type odd) or c·1_λ (type even)",
            if got == one.scaled(&want_ct) { vec![] } else { vec![self.render(&got)] },
        ));

        // C·1
        let kc = w.index("C").unwrap();
        let got = self.act_lift(kc, &one);
        let want = self.casimir_on_top();
        checks.push(Check::from_list(
            "casimir-on-top",
            "C·1_λ = −⅛ + (λ, λ+2ρ̄) (type odd) or c + (λ+2ρ̄, λ) (type even)",
            if got == one.scaled(&want) { vec![] } else { vec![self.render(&got)] },
        ));

        // f·1 = 1 and the E line
        let mut bad = Vec::new();
        if self.act_elem(&f, &one) != one {
            bad.push("f·1 ≠ 1".into());
        }
        if let (Some(be), Some(bf)) = (&gr.big_e, &gr.big_f) {
            let mut r = self.act_elem(be, &one);
            r.add_scaled(&self.act_elem(bf, &one), &Scalar::frac(-3, 4));
            r.add_scaled(&self.act_elem(bf, &self.act_elem(&h, &one)), &Scalar::frac(1, 2));
            if !r.is_zero() {
                bad.push(format!("(E − ¾F + ½Fh)·1 = {}", self.render(&r)));
            }
        }
        checks.push(Check::from_list("defining-ideal", "f − 1 and E − ¾F + ½Fh annihilate 1_λ", bad));
        checks
    }

    /// Expected value of C on 1_λ.
    pub fn casimir_on_top(&self) -> Scalar {
        let wd = &self.w.weights;
        let l2r = f_add(&self.lambda, &f_scale(&two(), &wd.rho_bar));
        let q = wd.pair(&self.lambda, &l2r);
        if self.w.gr.odd_type {
            &Scalar::frac(-1, 8) + &q
        } else {
            self.level.as_ref().unwrap() + &q
        }
    }

    /// The Verma pair matched by Wh(M).
    pub fn verma_pair(&self) -> MatchablePair {
        let wd = &self.w.weights;
        let mut c = self.casimir_on_top();
        if let Some(eps) = &self.w.epsilon {
            c += eps;
        }
        MatchablePair { lambda: f_add(&self.lambda, &wd.delta_bar), c }
    }

    /// Compare Wh(M) ∩ M^N with the Verma module of `verma_pair()` through
    /// `Φ(Θ-monomial·v₀) = lift(Θ-monomial)·1_λ`, under the action twisted
    /// by `C ↦ C − ε`.
    pub fn compare_with_verma(&self) -> Result<WhComparison> {
        let w = self.w;
        let pair = self.verma_pair();
        let kd = |k: usize| w.gens()[k].kdeg;
        let max_low = (self.bound / 2).max(0) as usize;
        let verma = verma_truncate(w, &pair, max_low + 1)?;
        let vkdeg = |m: &Mono| -> i64 { m.iter().map(|&(g, e)| kd(g as usize) * e as i64).sum() };
        let vbasis: Vec<Mono> = verma.basis.iter().filter(|m| vkdeg(m) <= self.bound).cloned().collect();

        let mut phi_memo: HashMap<Mono, Poly> = HashMap::new();
        let mut phi = |m: &Mono| -> Poly {
            if let Some(p) = phi_memo.get(m) {
                return p.clone();
            }
            let mut cur = Poly::one();
            for &(g, e) in m.iter().rev() {
                for _ in 0..e {
                    cur = self.act_lift(g as usize, &cur);
                }
            }
            phi_memo.insert(m.clone(), cur.clone());
            cur
        };

        let wh = self.whittaker_vectors();
        let mut spaces = Vec::new();
        let mut bad_span = Vec::new();
        let mut bad_inj = Vec::new();
        for (off, vecs) in &wh {
            let mine: Vec<&Mono> = vbasis.iter().filter(|m| verma_offset(&verma, m) == *off).collect();
            spaces.push(WhSpace { offset: off.clone(), dim: vecs.len(), verma_dim: mine.len() });
            // images lie in Wh and are independent
            let imgs: Vec<Poly> = mine.iter().map(|m| phi(m)).collect();
            for (m, p) in mine.iter().zip(&imgs) {
                if !self.is_whittaker(p) {
                    bad_span.push(format!("Φ({}) is not a Whittaker vector", verma.render(&Poly::monomial((*m).clone(), Scalar::one()))));
                }
            }
            if poly_rank(&imgs) != imgs.len() {
                bad_span.push(format!("Φ is not injective on weight {}", render_functional(off)));
            }
            let proj: Vec<Poly> = vecs.iter().map(|v| self.project_m0(v)).collect();
            if poly_rank(&proj) != vecs.len() {
                bad_inj.push(format!("weight {}", render_functional(off)));
            }
        }
        for m in vbasis.iter() {
            let off = verma_offset(&verma, m);
            if !wh.iter().any(|(o, _)| *o == off) {
                spaces.push(WhSpace { offset: off, dim: 0, verma_dim: 1 });
            }
        }

        // intertwining: lift_k·Φ(b) = Φ(k·b), with C twisted by ε
        let eps = w.epsilon.clone().unwrap_or_else(Scalar::zero);
        let kc = w.index("C");
        let mut bad_act = Vec::new();
        for b in &vbasis {
            let pb = phi(b);
            for k in 0..w.gens().len() {
                if vkdeg(b) + kd(k) > self.bound + 1 {
                    continue;
                }
                let lhs = self.act_lift(k, &pb);
                let img = verma.rewriter.act_gen(k, b);
                let mut rhs = Poly::zero();
                for (m, c) in &img.terms {
                    rhs.add_scaled(&phi(m), c);
                }
                if Some(k) == kc {
                    rhs.add_scaled(&pb, &-&eps);
                }
                if lhs != rhs {
                    bad_act.push(format!("{} on {}", w.gens()[k].name, verma.render(&Poly::monomial(b.clone(), Scalar::one()))));
                }
            }
        }
        let checks = vec![
            Check::from_list("wh-image", "Φ maps the Verma window injectively into Wh(M)", bad_span),
            Check::from_list("wh-projection", "the projection Wh(M) → M₀ is injective", bad_inj),
            Check::from_list("wh-intertwines", "Φ intertwines the U(g, e)-actions (C twisted by ε)", bad_act),
        ];
        Ok(WhComparison { pair, spaces, checks })
    }

    pub fn is_whittaker(&self, v: &Poly) -> bool {
        let p_f = self.pos(self.w.gr.f);
        let mut fv = self.m.act_gen_on(p_f, v);
        fv.add_scaled(v, &-&self.w.gr.chi(self.w.gr.f));
        fv.is_zero() && self.conditions.iter().all(|&k| self.m.act_gen_on(k, v).is_zero())
    }
}

fn verma_offset(v: &VermaTruncation, m: &Mono) -> Functional {
    let mut acc = vec![Scalar::zero(); v.lambda.len()];
    for &(g, e) in m {
        acc = f_add(&acc, &f_scale(&Scalar::from_int(e as i64), &v.gen_weight[g as usize]));
    }
    acc
}

fn single_support(x: Option<&Elem>, name: &str) -> Result<(usize, Scalar)> {
    let x = x.ok_or_else(|| Error::NotApplicable(format!("no {} in type even", name)))?;
    let nz: Vec<usize> = (0..x.len()).filter(|&i| !x[i].is_zero()).collect();
    if nz.len() != 1 {
        return Err(Error::Consistency(format!("{} is not a multiple of a basis vector", name)));
    }
    Ok((nz[0], x[nz[0]].clone()))
}

fn poly_rank(ps: &[Poly]) -> usize {
    let mut monos: Vec<Mono> = ps.iter().flat_map(|p| p.terms.keys().cloned()).collect();
    monos.sort();
    monos.dedup();
    let rows: Matrix = ps.iter().map(|p| monos.iter().map(|m| p.coeff(m)).collect()).collect();
    if rows.is_empty() {
        0
    } else {
        linalg::rank(&rows)
    }
}

/// Build the Whittaker model and run its identity battery, failing with a
/// verification error on the first broken identity.
pub fn whittaker_model<'a>(w: &'a WAlgebra, lambda: &[Scalar], level: Option<&Scalar>, bound: i64) -> Result<WhittakerModel<'a>> {
    let model = WhittakerModel::build(w, lambda, level, bound)?;
    for chk in model.battery() {
        if !chk.passed {
            return Err(Error::Verification(format!("{} ({}): {}", chk.name, chk.description, chk.residual)));
        }
    }
    Ok(model)
}

/// Rank of the elements of the monomial span, exposed for tests.
pub fn span_rank(ps: &[Poly]) -> usize {
    poly_rank(ps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(spec: &str) -> WAlgebra {
        WAlgebra::from_spec(spec, Flavor::Finite).unwrap()
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::frac(n, d)
    }

    #[test]
    fn matchable_level_osp12_is_c0() {
        let w = alg("osp:1|2");
        assert_eq!(matchable_c(&w, &[]).unwrap(), w.c0);
        assert_eq!(w.c0, q(-1, 8));
    }

    #[test]
    fn matchable_level_spo23_and_quadratic_growth() {
        let w = alg("spo:2|3");
        let c1 = matchable_c(&w, &[q(1, 1)]).unwrap();
        assert_eq!(c1, q(-1, 2));
        let c2 = matchable_c(&w, &[q(2, 1)]).unwrap();
        assert_ne!(&c2 - &w.c0, &two() * &(&c1 - &w.c0));
    }

    #[test]
    fn matchable_level_not_applicable_in_type_even() {
        let w = alg("sl:2|1");
        assert!(matches!(matchable_c(&w, &[q(1, 1)]), Err(Error::NotApplicable(_))));
        let pair = MatchablePair { lambda: vec![q(1, 1)], c: q(7, 3) };
        assert!(is_matchable(&w, &pair).unwrap());
    }

    #[test]
    fn osp12_verma_is_two_dimensional() {
        let w = alg("osp:1|2");
        let pair = MatchablePair { lambda: vec![], c: w.c0.clone() };
        let z = verma_truncate(&w, &pair, 5).unwrap();
        assert_eq!(z.sdim(), (1, 1));
        assert!(z.untruncated());
        assert!(z.module_axioms(5).passed);
    }

    #[test]
    fn non_matchable_pair_is_rejected() {
        let w = alg("spo:2|3");
        let pair = MatchablePair { lambda: vec![q(1, 1)], c: q(1, 1) };
        match verma_truncate(&w, &pair, 2) {
            Err(Error::Matchability(msg)) => assert!(msg.contains("matchability condition")),
            other => panic!("unexpected {:?}", other.map(|t| t.dim())),
        }
    }

    #[test]
    fn remainder_is_quarter_defect() {
        let w = alg("spo:2|3");
        let pair = MatchablePair { lambda: vec![q(2, 3)], c: q(5, 7) };
        let quarter_defect = &q(1, 4) * &matchability_defect(&w, &pair).unwrap();
        assert!(!quarter_defect.is_zero());
        let monos: Vec<Mono> = vec![vec![], vec![(0, 1)], vec![(1, 1)], vec![(2, 1)], vec![(0, 2), (2, 1)]];
        for m in monos {
            let r = matchability_remainder(&w, &pair, &m).unwrap();
            assert_eq!(r, Poly::monomial(m.clone(), quarter_defect.clone()), "{:?}", m);
        }
    }

    #[test]
    fn spo23_top_space_is_v0_and_theta_f_v0() {
        let w = alg("spo:2|3");
        let lam = vec![q(1, 2)];
        let pair = MatchablePair { lambda: lam.clone(), c: matchable_c(&w, &lam).unwrap() };
        let z = verma_truncate(&w, &pair, 3).unwrap();
        let top = z.top_indices();
        let f = z.gen_index("F").unwrap() as u16;
        let got: Vec<Mono> = top.iter().map(|&i| z.basis[i].clone()).collect();
        assert_eq!(got, vec![vec![], vec![(f, 1)]]);
        assert!(z.h0_check().passed);
        assert!(z.dominance_check(&w).unwrap().passed);
    }

    #[test]
    fn osp12_highest_weight_module() {
        let w = alg("osp:1|2");
        let cw = CartanW::build(w.gr.clone()).unwrap();
        let me = highest_weight_module(&w, &cw, &[], None, 4).unwrap();
        assert_eq!(me.sdim(), (1, 1));
        assert_eq!(me.c, q(-1, 8));
        assert!(top_space_matches(&w, &cw, &me, &[], None).unwrap().passed);
    }

    #[test]
    fn highest_weight_module_is_a_verma_module() {
        for (spec, level) in [("spo:2|3", None), ("sl:2|1", Some(q(2, 5)))] {
            let w = alg(spec);
            let cw = CartanW::build(w.gr.clone()).unwrap();
            let lam = vec![q(-3, 4)];
            let me = highest_weight_module(&w, &cw, &lam, level.as_ref(), 3).unwrap();
            let pair = highest_weight_pair(&w, &lam, level.as_ref()).unwrap();
            assert!(compare_with_verma(&w, &me, &pair).unwrap().passed, "{}", spec);
            assert!(top_space_matches(&w, &cw, &me, &lam, level.as_ref()).unwrap().passed, "{}", spec);
            assert!(me.module_axioms(2).passed);
        }
    }

    #[test]
    fn osp12_has_no_singular_vectors_and_is_type_q() {
        let w = alg("osp:1|2");
        let z = verma_truncate(&w, &MatchablePair { lambda: vec![], c: w.c0.clone() }, 3).unwrap();
        assert!(maximal_vector_scan(&z, 3).unwrap().is_empty());
        assert!(type_certificate(&z).is_type_q());
    }

    #[test]
    fn planted_vector_is_not_singular() {
        let w = alg("spo:2|3");
        let lam = vec![q(1, 3)];
        let z = verma_truncate(&w, &MatchablePair { lambda: lam.clone(), c: matchable_c(&w, &lam).unwrap() }, 3).unwrap();
        let planted = Poly::monomial(vec![(0, 1)], Scalar::one());
        assert!(!is_singular(&z, &planted));
        assert!(is_singular(&z, &Poly::one()));
    }

    #[test]
    fn type_m_without_theta_f() {
        let w = alg("sl:2|1");
        let z = verma_truncate(&w, &MatchablePair { lambda: vec![q(1, 2)], c: q(1, 1) }, 3).unwrap();
        let cert = type_certificate(&z);
        assert_eq!(cert.odd_commutant_dim, 0);
        assert!(cert.j_commutes.is_none());
    }

    #[test]
    fn psi_forms_agree_spo23() {
        let w = alg("spo:2|3");
        let cw = CartanW::build(w.gr.clone()).unwrap();
        for n in -4..4 {
            let lam = vec![q(n, 3)];
            let cc = central_character(&w, &lam, None).unwrap();
            assert_eq!(Some(cc.psi_c.clone()), cc.expanded);
            assert_eq!(psi_c_direct(&w, &cw, &lam, None).unwrap(), cc.psi_c);
        }
    }

    #[test]
    fn psi_type_even_matches_direct_value() {
        let w = alg("sl:2|1");
        let cw = CartanW::build(w.gr.clone()).unwrap();
        let lam = vec![q(5, 2)];
        let c = q(-1, 3);
        assert_eq!(psi_c(&w, &lam, Some(&c)).unwrap(), psi_c_direct(&w, &cw, &lam, Some(&c)).unwrap());
        assert!(matches!(psi_c(&w, &lam, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn blocks() {
        let w = alg("spo:2|3");
        let lam = vec![q(1, 3)];
        let mu = reflected_partner(&w, &lam).unwrap();
        assert_ne!(mu, lam);
        assert!(psi_difference(&w, &lam, &mu, None).unwrap().is_zero());
        let items = vec![(lam.clone(), None), (vec![q(7, 1)], None), (mu, None), (lam, None)];
        assert_eq!(block_partition(&w, &items).unwrap(), vec![vec![0, 2, 3], vec![1]]);
    }

    #[test]
    fn whittaker_model_osp12() {
        let w = alg("osp:1|2");
        let m = whittaker_model(&w, &[], None, 4).unwrap();
        // e·1 = (−¼h² + ½h − 3/16)·1
        let h = m.m.alg.pos(w.gr.h) as u16;
        let mut want = Poly::constant(q(-3, 16));
        want.add_term(vec![(h, 1)], q(1, 2));
        want.add_term(vec![(h, 2)], q(-1, 4));
        assert_eq!(m.e_tail, want);
        assert!(m.compare_with_verma().unwrap().passed());
    }
}
