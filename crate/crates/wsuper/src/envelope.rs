//! PBW normal forms by super-commutator rewriting.
//!
//! The same engine serves four roles:
//!
//! * normal ordering in U(g),
//! * the quotient Q^fin = U(g)/U(g)(f − 1) (a *tail* generator `f` that
//!   evaluates to 1 on the cyclic vector),
//! * the abstract W-superalgebra given by generators and commutator
//!   polynomials (see `wgen`),
//! * induced modules whose cyclic vector is killed or scaled by some
//!   generators (see `highest`).
//!
//! A [`PbwAlgebra`] is a finite list of homogeneous generators with a total
//! order (their index), a supercommutator `bracket(i, j)` for `i > j`
//! returning a polynomial of lower filtration degree, and optional tail
//! rules `x_i · 1 = rule(i)`.  Tail generators must come after all free
//! generators.  A [`Rewriter`] acts by generators on normal monomials of the
//! free generators and memoizes every step.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::scalar::Scalar;
use crate::superalgebra::LieSuperalgebra;

/// Normal monomial: strictly increasing generator indices with positive
/// exponents; odd generators have exponent 1.
pub type Mono = Vec<(u16, u16)>;

/// Sparse polynomial (or module element) over normal monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn gen(i: usize) -> Self {
        Self::monomial(vec![(i as u16, 1)], Scalar::one())
    }

    pub fn monomial(m: Mono, c: Scalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn add(&mut self, other: &Poly) {
        self.add_scaled(other, &Scalar::one());
    }

    pub fn scaled(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add(other);
        out
    }

    /// Constant coefficient.
    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff(&self, m: &Mono) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Maximum of `Σ weight(g)·exp` over the terms (`None` for zero).
    pub fn degree_by(&self, weight: &dyn Fn(usize) -> i64) -> Option<i64> {
        self.terms.keys().map(|m| mono_degree(m, weight)).max()
    }

    /// Keep only terms satisfying a predicate.
    pub fn filter(&self, keep: &dyn Fn(&Mono) -> bool) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Rename generators; the caller guarantees the map preserves order.
    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut body = Vec::new();
            for &(g, e) in m {
                if e == 1 {
                    body.push(names(g as usize));
                } else {
                    body.push(format!("{}^{}", names(g as usize), e));
                }
            }
            if body.is_empty() {
                parts.push(format!("({})", c));
            } else {
                parts.push(format!("({})*{}", c, body.join("*")));
            }
        }
        parts.join(" + ")
    }
}

pub fn mono_degree(m: &Mono, weight: &dyn Fn(usize) -> i64) -> i64 {
    m.iter().map(|&(g, e)| weight(g as usize) * e as i64).sum()
}

pub fn mono_len(m: &Mono) -> usize {
    m.iter().map(|&(_, e)| e as usize).sum()
}

/// A filtered superalgebra with a PBW basis, possibly with tail rules.
pub trait PbwAlgebra {
    fn n_gens(&self) -> usize;
    fn is_odd(&self, i: usize) -> bool;
    /// `[x_i, x_j]` for `i > j` (and for `i == j` odd), in normal form.
    fn bracket(&self, i: usize, j: usize) -> Poly;
    /// Value of `x_i · 1` for a tail generator, `None` for free ones.
    fn tail(&self, i: usize) -> Option<Poly>;
}

pub fn mono_parity(alg: &dyn PbwAlgebra, m: &Mono) -> bool {
    m.iter().filter(|&&(g, e)| alg.is_odd(g as usize) && e % 2 == 1).count() % 2 == 1
}

/// Memoizing normal-ordering engine.
pub struct Rewriter<A: PbwAlgebra> {
    pub alg: A,
    memo: RefCell<HashMap<(u16, Mono), Rc<Poly>>>,
    brackets: RefCell<HashMap<(u16, u16), Rc<Poly>>>,
}

impl<A: PbwAlgebra> Rewriter<A> {
    pub fn new(alg: A) -> Self {
        Rewriter { alg, memo: RefCell::new(HashMap::new()), brackets: RefCell::new(HashMap::new()) }
    }

    pub fn memo_size(&self) -> usize {
        self.memo.borrow().len()
    }

    fn bracket_cached(&self, i: usize, j: usize) -> Rc<Poly> {
        let key = (i as u16, j as u16);
        if let Some(p) = self.brackets.borrow().get(&key) {
            return p.clone();
        }
        let p = Rc::new(self.alg.bracket(i, j));
        self.brackets.borrow_mut().insert(key, p.clone());
        p
    }

    /// `x_g · m` in normal form.
    pub fn act_gen(&self, g: usize, m: &Mono) -> Rc<Poly> {
        let key = (g as u16, m.clone());
        if let Some(p) = self.memo.borrow().get(&key) {
            return p.clone();
        }
        let result = self.act_gen_uncached(g, m);
        let rc = Rc::new(result);
        self.memo.borrow_mut().insert(key, rc.clone());
        rc
    }

    fn act_gen_uncached(&self, g: usize, m: &Mono) -> Poly {
        if m.is_empty() {
            return match self.alg.tail(g) {
                Some(p) => p,
                None => Poly::gen(g),
            };
        }
        let (y, ky) = m[0];
        let y = y as usize;
        if g < y {
            let mut out = Vec::with_capacity(m.len() + 1);
            out.push((g as u16, 1));
            out.extend_from_slice(m);
            return Poly::monomial(out, Scalar::one());
        }
        let mut rest = m.clone();
        if ky == 1 {
            rest.remove(0);
        } else {
            rest[0].1 -= 1;
        }
        if g == y {
            if !self.alg.is_odd(g) {
                let mut out = m.clone();
                out[0].1 += 1;
                return Poly::monomial(out, Scalar::one());
            }
            // x² = ½[x, x] for odd x
            let br = self.bracket_cached(g, g);
            return self.act_poly(&br, &Poly::monomial(rest, Scalar::one())).scaled(&Scalar::frac(1, 2));
        }
        // g > y: x·y·rest = ±y·(x·rest) + [x,y]·rest
        let inner = self.act_gen(g, &rest);
        let sign = if self.alg.is_odd(g) && self.alg.is_odd(y) { -Scalar::one() } else { Scalar::one() };
        let mut out = Poly::zero();
        for (mono, c) in &inner.terms {
            let p = self.act_gen(y, mono);
            out.add_scaled(&p, &(&sign * c));
        }
        let br = self.bracket_cached(g, y);
        if !br.is_zero() {
            let t = self.act_poly(&br, &Poly::monomial(rest, Scalar::one()));
            out.add(&t);
        }
        out
    }

    /// `x_g · v` for a module element `v`.
    pub fn act_gen_on(&self, g: usize, v: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &v.terms {
            out.add_scaled(&self.act_gen(g, m), c);
        }
        out
    }

    /// `p · v` where `p` is a polynomial in the generators (its monomials are
    /// read as ordered products) and `v` a module element.
    pub fn act_poly(&self, p: &Poly, v: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &p.terms {
            let mut cur = v.clone();
            for &(g, e) in m.iter().rev() {
                for _ in 0..e {
                    cur = self.act_gen_on(g as usize, &cur);
                    if cur.is_zero() {
                        break;
                    }
                }
            }
            out.add_scaled(&cur, c);
        }
        out
    }

    /// Normal form of an ordered word of generators applied to 1.
    pub fn word(&self, w: &[usize]) -> Poly {
        let mut cur = Poly::one();
        for &g in w.iter().rev() {
            cur = self.act_gen_on(g, &cur);
        }
        cur
    }

    /// Product in the algebra (when there are no tail rules) or action.
    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.act_poly(a, b)
    }

    pub fn parity(&self, m: &Mono) -> bool {
        m.iter().filter(|&&(g, e)| self.alg.is_odd(g as usize) && e % 2 == 1).count() % 2 == 1
    }

    /// Parity of a homogeneous element (`None` if zero or mixed).
    pub fn poly_parity(&self, p: &Poly) -> Option<bool> {
        let mut par = None;
        for m in p.terms.keys() {
            let q = self.parity(m);
            match par {
                None => par = Some(q),
                Some(x) if x != q => return None,
                _ => {}
            }
        }
        par
    }

    /// Supercommutator `[a, b] = ab − (−1)^{|a||b|} ba` of homogeneous
    /// elements, computed on lifts (no tail rules should be present).
    pub fn supercommutator(&self, a: &Poly, b: &Poly) -> Poly {
        let pa = self.poly_parity(a).unwrap_or(false);
        let pb = self.poly_parity(b).unwrap_or(false);
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        let sign = if pa && pb { Scalar::one() } else { -Scalar::one() };
        let mut out = ab;
        out.add_scaled(&ba, &sign);
        out
    }
}

/// U(g) (optionally with tail rules) for a Lie superalgebra, with the engine
/// order given by `order[k]` = basis index of the k-th generator.
#[derive(Clone)]
pub struct EnvelopingAlgebra {
    pub order: Vec<usize>,
    pub position: Vec<usize>,
    pub parity: Vec<bool>,
    table: Vec<Vec<Poly>>,
    pub tails: HashMap<usize, Poly>,
}

impl EnvelopingAlgebra {
    /// Engine generators in the algebra's own basis order, no tails.
    pub fn new(g: &LieSuperalgebra) -> Self {
        Self::with_order(g, (0..g.dim()).collect(), HashMap::new())
    }

    /// `order[k]` is the basis index of engine generator k; `tails` are keyed
    /// by engine index and must be the last generators.
    pub fn with_order(g: &LieSuperalgebra, order: Vec<usize>, tails: HashMap<usize, Poly>) -> Self {
        let n = g.dim();
        let mut position = vec![0; n];
        for (k, &b) in order.iter().enumerate() {
            position[b] = k;
        }
        let parity: Vec<bool> = order.iter().map(|&b| g.parity[b]).collect();
        let mut table = vec![vec![Poly::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut p = Poly::zero();
                for (k, c) in &g.table[order[i]][order[j]] {
                    p.add_term(vec![(position[*k] as u16, 1)], c.clone());
                }
                table[i][j] = p;
            }
        }
        let min_tail = tails.keys().min().copied().unwrap_or(n);
        debug_assert!(tails.keys().all(|&t| t >= min_tail) && (min_tail..n).all(|t| tails.contains_key(&t)));
        EnvelopingAlgebra { order, position, parity, table, tails }
    }

    /// Engine-index image of a basis element.
    pub fn pos(&self, basis: usize) -> usize {
        self.position[basis]
    }

    /// Linear element of g as a polynomial in engine generators.
    pub fn elem(&self, x: &[Scalar]) -> Poly {
        let mut p = Poly::zero();
        for (b, c) in x.iter().enumerate() {
            if !c.is_zero() {
                p.add_term(vec![(self.position[b] as u16, 1)], c.clone());
            }
        }
        p
    }
}

impl PbwAlgebra for EnvelopingAlgebra {
    fn n_gens(&self) -> usize {
        self.order.len()
    }
    fn is_odd(&self, i: usize) -> bool {
        self.parity[i]
    }
    fn bracket(&self, i: usize, j: usize) -> Poly {
        self.table[i][j].clone()
    }
    fn tail(&self, i: usize) -> Option<Poly> {
        self.tails.get(&i).cloned()
    }
}

impl<T: PbwAlgebra + ?Sized> PbwAlgebra for Rc<T> {
    fn n_gens(&self) -> usize {
        (**self).n_gens()
    }
    fn is_odd(&self, i: usize) -> bool {
        (**self).is_odd(i)
    }
    fn bracket(&self, i: usize, j: usize) -> Poly {
        (**self).bracket(i, j)
    }
    fn tail(&self, i: usize) -> Option<Poly> {
        (**self).tail(i)
    }
}

/// An algebra given by generators, parities and commutator polynomials
/// `[x_i, x_j]` in normal form, optionally with tail rules.
#[derive(Clone, Debug)]
pub struct Presented {
    pub names: Vec<String>,
    pub parity: Vec<bool>,
    /// `table[i][j] = [x_i, x_j]` for all i, j.
    pub table: Vec<Vec<Poly>>,
    pub tails: HashMap<usize, Poly>,
}

impl Presented {
    /// Build from the brackets with `i >= j`; the rest follow from
    /// super skew-symmetry.
    pub fn from_lower(names: Vec<String>, parity: Vec<bool>, lower: &[Vec<Poly>]) -> Self {
        let n = names.len();
        let mut table = vec![vec![Poly::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                table[i][j] = lower[i][j].clone();
                if i != j {
                    let sign = if parity[i] && parity[j] { Scalar::one() } else { -Scalar::one() };
                    table[j][i] = lower[i][j].scaled(&sign);
                }
            }
        }
        Presented { names, parity, table, tails: HashMap::new() }
    }

    pub fn with_tails(&self, tails: HashMap<usize, Poly>) -> Self {
        let mut out = self.clone();
        out.tails = tails;
        out
    }
}

impl PbwAlgebra for Presented {
    fn n_gens(&self) -> usize {
        self.names.len()
    }
    fn is_odd(&self, i: usize) -> bool {
        self.parity[i]
    }
    fn bracket(&self, i: usize, j: usize) -> Poly {
        self.table[i][j].clone()
    }
    fn tail(&self, i: usize) -> Option<Poly> {
        self.tails.get(&i).cloned()
    }
}

/// U(g) in a given basis order, without tails.
pub type Ug = Rewriter<EnvelopingAlgebra>;

/// Normal form of a word of basis indices in U(g) (basis order = PBW order).
pub fn normal_form(ug: &Ug, word: &[usize]) -> Poly {
    let w: Vec<usize> = word.iter().map(|&b| ug.alg.pos(b)).collect();
    ug.word(&w)
}

/// Independent reference: reduce a word by repeatedly swapping the leftmost
/// out-of-order adjacent pair in the free algebra, with no memoization.
/// Exponential in the word length; meant for short test words only.
pub fn oracle_normal_form(alg: &dyn PbwAlgebra, word: &[usize]) -> Poly {
    let mut words: Vec<(Vec<usize>, Scalar)> = vec![(word.to_vec(), Scalar::one())];
    let mut out = Poly::zero();
    while let Some((w, c)) = words.pop() {
        if c.is_zero() {
            continue;
        }
        let pos = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1] || (w[i] == w[i + 1] && alg.is_odd(w[i])));
        match pos {
            None => {
                let mut m: Mono = Vec::new();
                for &g in &w {
                    match m.last_mut() {
                        Some((lg, e)) if *lg as usize == g => *e += 1,
                        _ => m.push((g as u16, 1)),
                    }
                }
                out.add_term(m, c);
            }
            Some(i) => {
                let (a, b) = (w[i], w[i + 1]);
                if a == b {
                    // odd square
                    let br = alg.bracket(a, a);
                    for (m, bc) in &br.terms {
                        let mut nw = w[..i].to_vec();
                        for &(g, e) in m {
                            for _ in 0..e {
                                nw.push(g as usize);
                            }
                        }
                        nw.extend_from_slice(&w[i + 2..]);
                        words.push((nw, &(&c * bc) * &Scalar::frac(1, 2)));
                    }
                } else {
                    let sign = if alg.is_odd(a) && alg.is_odd(b) { -Scalar::one() } else { Scalar::one() };
                    let mut sw = w.clone();
                    sw.swap(i, i + 1);
                    words.push((sw, &c * &sign));
                    let br = alg.bracket(a, b);
                    for (m, bc) in &br.terms {
                        let mut nw = w[..i].to_vec();
                        for &(g, e) in m {
                            for _ in 0..e {
                                nw.push(g as usize);
                            }
                        }
                        nw.extend_from_slice(&w[i + 2..]);
                        words.push((nw, &c * bc));
                    }
                }
            }
        }
    }
    out
}

/// Kazhdan weight of each engine generator: `deg + 2` for a vector in g(deg).
pub fn kazhdan_weights(order: &[usize], degree: &[i64]) -> Vec<i64> {
    order.iter().map(|&b| degree[b] + 2).collect()
}

/// Kazhdan degree of an element given per-generator weights.
pub fn kazhdan_degree(p: &Poly, weights: &[i64]) -> Option<i64> {
    p.degree_by(&|g| weights[g])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::build_from_spec;

    #[test]
    fn single_swap() {
        let g = build_from_spec("sl:2|1").unwrap();
        let ug = Rewriter::new(EnvelopingAlgebra::new(&g));
        for x in 0..g.dim() {
            for y in 0..x {
                let got = ug.word(&[x, y]);
                let mut want = Poly::zero();
                let sign = if g.parity[x] && g.parity[y] { -Scalar::one() } else { Scalar::one() };
                want.add_term(vec![(y as u16, 1), (x as u16, 1)], sign);
                for (k, c) in &g.table[x][y] {
                    want.add_term(vec![(*k as u16, 1)], c.clone());
                }
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn odd_square() {
        let g = build_from_spec("osp:1|2").unwrap();
        let ug = Rewriter::new(EnvelopingAlgebra::new(&g));
        for z in (0..g.dim()).filter(|&i| g.parity[i]) {
            let got = ug.word(&[z, z]);
            let mut want = Poly::zero();
            for (k, c) in &g.table[z][z] {
                want.add_term(vec![(*k as u16, 1)], c * &Scalar::frac(1, 2));
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn agrees_with_oracle_on_all_short_words() {
        let g = build_from_spec("osp:1|2").unwrap();
        let alg = EnvelopingAlgebra::new(&g);
        let ug = Rewriter::new(alg.clone());
        let n = g.dim();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(ug.word(&[a, b, c]), oracle_normal_form(&alg, &[a, b, c]));
                }
            }
        }
    }

    #[test]
    fn associativity_sampled() {
        let g = build_from_spec("sl:2|1").unwrap();
        let ug = Rewriter::new(EnvelopingAlgebra::new(&g));
        let n = g.dim();
        for a in 0..n {
            for b in (0..n).step_by(2) {
                for c in (1..n).step_by(3) {
                    let pa = Poly::gen(a);
                    let pb = ug.word(&[b, c]);
                    let pc = ug.word(&[c, a, b]);
                    let left = ug.mul(&ug.mul(&pa, &pb), &pc);
                    let right = ug.mul(&pa, &ug.mul(&pb, &pc));
                    assert_eq!(left, right);
                }
            }
        }
    }
}
