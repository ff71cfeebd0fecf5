//! Basic classical Lie superalgebras from matrix realizations.
//!
//! Every algebra is realized inside gl(p|q): brackets are supercommutators of
//! matrices and the invariant form is the supertrace form `str(XY)`.  Structure
//! constants are read back by exact coordinate extraction, so nothing is
//! tabulated by hand.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// Coordinates of an algebra element in the algebra's basis.
pub type Elem = Vec<Scalar>;

/// Which matrix family an algebra belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// gl(m|n)
    Gl { m: usize, n: usize },
    /// sl(m|n), m ≠ n (n = 0 gives the Lie algebra sl(m))
    Sl { m: usize, n: usize },
    /// psl(n|n)
    Psl { n: usize },
    /// spo(2n|m), i.e. osp(m|2n): even space of dimension 2n carries a
    /// symplectic form, odd space of dimension m a symmetric one.
    Spo { n: usize, m: usize },
}

impl Family {
    /// Parse the `family:params` grammar, e.g. `spo:2|3`, `osp:1|2`, `sl:2|1`.
    pub fn parse(spec: &str) -> Result<Family> {
        let spec = spec.trim();
        let lower = spec.to_ascii_lowercase();
        for bad in ["g3", "g(3)", "f4", "f(4)", "d21", "d(2,1", "d(2|1"] {
            if lower.starts_with(bad) {
                return Err(Error::UnsupportedFamily(format!(
                    "{} (exceptional families G(3), F(4), D(2,1;alpha) are not realized)",
                    spec
                )));
            }
        }
        let (name, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected family:params, got `{}`", spec)))?;
        let (a, b) = params
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("expected a|b parameters, got `{}`", params)))?;
        let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad parameter `{}`", a)))?;
        let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad parameter `{}`", b)))?;
        let fam = match name.trim().to_ascii_lowercase().as_str() {
            "gl" => Family::Gl { m: a, n: b },
            "sl" => {
                if a == b {
                    return Err(Error::UnsupportedFamily(format!(
                        "sl({}|{}) is not simple; use psl:{}|{}",
                        a, b, a, b
                    )));
                }
                Family::Sl { m: a, n: b }
            }
            "psl" => {
                if a != b {
                    return Err(Error::Parse("psl needs equal parameters".into()));
                }
                Family::Psl { n: a }
            }
            "spo" => {
                if a % 2 != 0 {
                    return Err(Error::Parse("spo(2n|m) needs an even first parameter".into()));
                }
                Family::Spo { n: a / 2, m: b }
            }
            "osp" => {
                if b % 2 != 0 {
                    return Err(Error::Parse("osp(m|2n) needs an even second parameter".into()));
                }
                Family::Spo { n: b / 2, m: a }
            }
            other => return Err(Error::UnsupportedFamily(other.to_string())),
        };
        fam.check_size()?;
        Ok(fam)
    }

    fn check_size(&self) -> Result<()> {
        let (p, q) = self.superdim();
        if p + q > 8 || p + q < 2 {
            return Err(Error::UnsupportedFamily(format!("{} is outside the supported size range", self)));
        }
        match self {
            Family::Psl { n } if *n < 2 => Err(Error::UnsupportedFamily("psl(1|1) is nilpotent".into())),
            Family::Spo { n, .. } if *n == 0 => Err(Error::UnsupportedFamily(format!(
                "{} has no symplectic part, hence no minimal even root of the required kind",
                self
            ))),
            _ => Ok(()),
        }
    }

    /// Dimensions (p|q) of the defining superspace.
    pub fn superdim(&self) -> (usize, usize) {
        match *self {
            Family::Gl { m, n } | Family::Sl { m, n } => (m, n),
            Family::Psl { n } => (n, n),
            Family::Spo { n, m } => (2 * n, m),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Gl { .. } => "gl",
            Family::Sl { .. } => "sl",
            Family::Psl { .. } => "psl",
            Family::Spo { .. } => "spo",
        }
    }

    pub fn params(&self) -> (usize, usize) {
        match *self {
            Family::Gl { m, n } | Family::Sl { m, n } => (m, n),
            Family::Psl { n } => (n, n),
            Family::Spo { n, m } => (2 * n, m),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.params();
        write!(f, "{}({}|{})", self.name(), a, b)
    }
}

/// A finite-dimensional Lie superalgebra with structure constants and form.
#[derive(Clone, Debug)]
pub struct LieSuperalgebra {
    pub family: Family,
    pub labels: Vec<String>,
    /// `true` for odd basis vectors.
    pub parity: Vec<bool>,
    /// `table[i][j]` is the sparse expansion of `[x_i, x_j]`.
    pub table: Vec<Vec<Vec<(usize, Scalar)>>>,
    /// Gram matrix of the invariant form.
    pub form: Matrix,
    /// Basis indices spanning the Cartan subalgebra.
    pub cartan: Vec<usize>,
    /// Matrix realization of each basis vector, when available.
    pub matrices: Vec<Matrix>,
}

fn elementary(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = linalg::zeros(n, n);
    m[i][j] = Scalar::one();
    m
}

fn flatten(m: &Matrix) -> Vec<Scalar> {
    m.iter().flat_map(|r| r.iter().cloned()).collect()
}

fn supertrace(m: &Matrix, p: usize) -> Scalar {
    let mut acc = Scalar::zero();
    for (i, row) in m.iter().enumerate() {
        if i < p {
            acc += &row[i];
        } else {
            acc -= &row[i];
        }
    }
    acc
}

fn is_odd_entry(p: usize, i: usize, j: usize) -> bool {
    (i < p) != (j < p)
}

fn matrix_parity(m: &Matrix, p: usize) -> Option<bool> {
    let mut par = None;
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                let o = is_odd_entry(p, i, j);
                match par {
                    None => par = Some(o),
                    Some(q) if q != o => return None,
                    _ => {}
                }
            }
        }
    }
    par
}

fn supercommutator(a: &Matrix, pa: bool, b: &Matrix, pb: bool) -> Matrix {
    let ab = linalg::mat_mul(a, b);
    let ba = linalg::mat_mul(b, a);
    let sign = if pa && pb { Scalar::one() } else { -Scalar::one() };
    ab.iter()
        .zip(&ba)
        .map(|(r1, r2)| r1.iter().zip(r2).map(|(x, y)| x + &(&sign * y)).collect())
        .collect()
}

struct Realization {
    size: usize,
    even: usize,
    basis: Vec<(String, Matrix)>,
    cartan: Vec<usize>,
    /// extra spanning matrices whose coordinates are discarded (the center of sl(n|n))
    quotient: Vec<Matrix>,
}

fn realize_gl_like(family: &Family) -> Realization {
    let (p, q) = family.superdim();
    let n = p + q;
    let sign = |i: usize| if i < p { 1i64 } else { -1 };
    let mut basis = Vec::new();
    let mut cartan = Vec::new();
    let mut quotient = Vec::new();
    match family {
        Family::Gl { .. } => {
            for i in 0..n {
                cartan.push(basis.len());
                basis.push((format!("E{},{}", i + 1, i + 1), elementary(n, i, i)));
            }
        }
        Family::Sl { .. } | Family::Psl { .. } => {
            let count = if matches!(family, Family::Psl { .. }) { n - 2 } else { n - 1 };
            for i in 0..count {
                let mut d = elementary(n, i, i);
                d[i + 1][i + 1] = Scalar::from_int(-sign(i) * sign(i + 1));
                cartan.push(basis.len());
                basis.push((format!("H{}", i + 1), d));
            }
            if matches!(family, Family::Psl { .. }) {
                quotient.push(linalg::identity(n));
            }
        }
        Family::Spo { .. } => unreachable!(),
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push((format!("E{},{}", i + 1, j + 1), elementary(n, i, j)));
            }
        }
    }
    Realization { size: n, even: p, basis, cartan, quotient }
}

fn realize_spo(n: usize, m: usize) -> Realization {
    let ev = 2 * n;
    let size = ev + m;
    let mut b = linalg::zeros(size, size);
    let partner = |i: usize| if i < ev { ev - 1 - i } else { ev + (m - 1 - (i - ev)) };
    for i in 0..ev {
        b[i][partner(i)] = Scalar::from_int(if i < n { 1 } else { -1 });
    }
    for i in ev..size {
        b[i][partner(i)] = Scalar::one();
    }
    // constraint map: X ↦ B(X e_a, e_b) + (−1)^{|X||a|} B(e_a, X e_b)
    let constraint = |x: &Matrix, odd: bool| -> Vec<Scalar> {
        let mut out = Vec::with_capacity(size * size);
        for a in 0..size {
            for bb in 0..size {
                let mut acc = Scalar::zero();
                for c in 0..size {
                    if !x[c][a].is_zero() && !b[c][bb].is_zero() {
                        acc += &(&x[c][a] * &b[c][bb]);
                    }
                }
                let s = if odd && a >= ev { -Scalar::one() } else { Scalar::one() };
                for c in 0..size {
                    if !b[a][c].is_zero() && !x[c][bb].is_zero() {
                        acc += &(&s * &(&b[a][c] * &x[c][bb]));
                    }
                }
                out.push(acc);
            }
        }
        out
    };
    let mut seen = vec![vec![false; size]; size];
    let mut basis = Vec::new();
    let mut cartan = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if seen[i][j] {
                continue;
            }
            let (i2, j2) = (partner(j), partner(i));
            seen[i][j] = true;
            seen[i2][j2] = true;
            let mut group = vec![(i, j)];
            if (i2, j2) != (i, j) {
                group.push((i2, j2));
            }
            let odd = is_odd_entry(ev, i, j);
            let cols: Vec<Vec<Scalar>> = group.iter().map(|&(a, c)| constraint(&elementary(size, a, c), odd)).collect();
            // rows = equations, columns = group unknowns
            let eqs: Matrix = (0..size * size).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
            for sol in linalg::nullspace(&eqs, group.len()) {
                let lead = sol.iter().find(|x| !x.is_zero()).cloned().expect("nonzero kernel vector");
                let lead_inv = lead.inv().expect("nonzero");
                let mut mat = linalg::zeros(size, size);
                for (&(a, c), coef) in group.iter().zip(&sol) {
                    mat[a][c] += &(coef * &lead_inv);
                }
                let diag = i == j;
                if diag {
                    cartan.push(basis.len());
                    basis.push((format!("H{}", cartan.len()), mat));
                } else {
                    basis.push((format!("X{},{}", i + 1, j + 1), mat));
                }
            }
        }
    }
    // Cartan first, then root vectors in discovery order.
    let mut ordered = Vec::new();
    for &c in &cartan {
        ordered.push(basis[c].clone());
    }
    for (k, item) in basis.iter().enumerate() {
        if !cartan.contains(&k) {
            ordered.push(item.clone());
        }
    }
    let cartan = (0..cartan.len()).collect();
    Realization { size, even: ev, basis: ordered, cartan, quotient: Vec::new() }
}

/// Construct the algebra described by `family` with its supertrace form.
pub fn build_algebra(family: &Family) -> Result<LieSuperalgebra> {
    family.check_size()?;
    let real = match family {
        Family::Spo { n, m } => realize_spo(*n, *m),
        _ => realize_gl_like(family),
    };
    from_realization(family.clone(), real)
}

/// Convenience wrapper: parse and build.
pub fn build_from_spec(spec: &str) -> Result<LieSuperalgebra> {
    build_algebra(&Family::parse(spec)?)
}

fn from_realization(family: Family, real: Realization) -> Result<LieSuperalgebra> {
    let p = real.even;
    let dim = real.basis.len();
    let mut parity = Vec::with_capacity(dim);
    for (label, m) in &real.basis {
        parity.push(matrix_parity(m, p).ok_or_else(|| Error::Internal(format!("{} is not homogeneous", label)))?);
    }
    let mut rows: Matrix = real.basis.iter().map(|(_, m)| flatten(m)).collect();
    rows.extend(real.quotient.iter().map(flatten));
    let (cols, inv) = linalg::coordinate_chart(&rows)
        .ok_or_else(|| Error::Internal("matrix basis is linearly dependent".into()))?;
    let inv_t = linalg::transpose(&inv);
    let coords = |m: &Matrix| -> Vec<Scalar> {
        let flat = flatten(m);
        let restricted: Vec<Scalar> = cols.iter().map(|&c| flat[c].clone()).collect();
        let mut c = linalg::mat_vec(&inv_t, &restricted);
        c.truncate(dim);
        c
    };
    let mut table = vec![vec![Vec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let br = supercommutator(&real.basis[i].1, parity[i], &real.basis[j].1, parity[j]);
            let c = coords(&br);
            table[i][j] = c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        }
    }
    let mut form = linalg::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let prod = linalg::mat_mul(&real.basis[i].1, &real.basis[j].1);
            form[i][j] = supertrace(&prod, p);
        }
    }
    let _ = real.size;
    Ok(LieSuperalgebra {
        family,
        labels: real.basis.iter().map(|(l, _)| l.clone()).collect(),
        parity,
        table,
        form,
        cartan: real.cartan,
        matrices: real.basis.into_iter().map(|(_, m)| m).collect(),
    })
}

impl LieSuperalgebra {
    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn dim_even(&self) -> usize {
        self.parity.iter().filter(|p| !**p).count()
    }

    pub fn dim_odd(&self) -> usize {
        self.dim() - self.dim_even()
    }

    pub fn zero(&self) -> Elem {
        vec![Scalar::zero(); self.dim()]
    }

    pub fn basis_elem(&self, i: usize) -> Elem {
        let mut v = self.zero();
        v[i] = Scalar::one();
        v
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.table[i][j] {
                    out[*k] += &(&ab * c);
                }
            }
        }
        out
    }

    pub fn form_of(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() && !self.form[i][j].is_zero() {
                    acc += &(&(a * b) * &self.form[i][j]);
                }
            }
        }
        acc
    }

    /// Parity of a homogeneous element, `None` for zero or mixed elements.
    pub fn parity_of(&self, x: &[Scalar]) -> Option<bool> {
        let mut par = None;
        for (i, a) in x.iter().enumerate() {
            if !a.is_zero() {
                match par {
                    None => par = Some(self.parity[i]),
                    Some(p) if p != self.parity[i] => return None,
                    _ => {}
                }
            }
        }
        par
    }

    /// Rescale the invariant form by a nonzero scalar.
    pub fn rescale_form(&mut self, k: &Scalar) {
        for row in self.form.iter_mut() {
            for x in row.iter_mut() {
                if !x.is_zero() {
                    *x = &*x * k;
                }
            }
        }
    }

    /// Re-express the algebra in a new basis given by coordinate vectors.
    pub fn change_basis(&self, new_basis: &[Elem], labels: Vec<String>) -> Result<LieSuperalgebra> {
        let dim = self.dim();
        if new_basis.len() != dim {
            return Err(Error::Internal("basis change needs a full basis".into()));
        }
        let mut parity = Vec::with_capacity(dim);
        for (l, v) in labels.iter().zip(new_basis) {
            parity.push(self.parity_of(v).ok_or_else(|| Error::Internal(format!("{} is not homogeneous", l)))?);
        }
        // columns of p are new basis vectors in old coordinates
        let pmat: Matrix = (0..dim).map(|r| new_basis.iter().map(|v| v[r].clone()).collect()).collect();
        let pinv = linalg::inverse(&pmat).ok_or_else(|| Error::Internal("basis change is singular".into()))?;
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let br = self.bracket(&new_basis[i], &new_basis[j]);
                let c = linalg::mat_vec(&pinv, &br);
                table[i][j] = c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
            }
        }
        let mut form = linalg::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                form[i][j] = self.form_of(&new_basis[i], &new_basis[j]);
            }
        }
        let cartan = (0..dim)
            .filter(|&i| {
                let v = &new_basis[i];
                v.iter().enumerate().all(|(k, x)| x.is_zero() || self.cartan.contains(&k))
            })
            .collect();
        let matrices = if self.matrices.len() == dim {
            new_basis
                .iter()
                .map(|v| {
                    let n = self.matrices[0].len();
                    let mut m = linalg::zeros(n, n);
                    for (k, c) in v.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        for a in 0..n {
                            for b in 0..n {
                                if !self.matrices[k][a][b].is_zero() {
                                    m[a][b] += &(c * &self.matrices[k][a][b]);
                                }
                            }
                        }
                    }
                    m
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(LieSuperalgebra { family: self.family.clone(), labels, parity, table, form, cartan, matrices })
    }
}

/// `a·x + b·y` on coordinate vectors.
pub fn lin_comb(a: &Scalar, x: &[Scalar], b: &Scalar, y: &[Scalar]) -> Elem {
    x.iter().zip(y).map(|(p, q)| &(a * p) + &(b * q)).collect()
}

pub fn scale(a: &Scalar, x: &[Scalar]) -> Elem {
    x.iter().map(|p| a * p).collect()
}

pub fn is_zero_elem(x: &[Scalar]) -> bool {
    x.iter().all(|c| c.is_zero())
}

/// Check super skew-symmetry, the super Jacobi identity, and the form
/// axioms.  Returns one message per violation; empty means valid.
pub fn validate(g: &LieSuperalgebra) -> Vec<String> {
    let dim = g.dim();
    let mut report = Vec::new();
    let sgn = |a: bool, b: bool| if a && b { -Scalar::one() } else { Scalar::one() };
    for i in 0..dim {
        for j in 0..dim {
            let xij = g.bracket(&g.basis_elem(i), &g.basis_elem(j));
            let xji = g.bracket(&g.basis_elem(j), &g.basis_elem(i));
            let s = sgn(g.parity[i], g.parity[j]);
            let ok = xij.iter().zip(&xji).all(|(a, b)| (a + &(&s * b)).is_zero());
            if !ok {
                report.push(format!("skew-symmetry fails for ({}, {})", g.labels[i], g.labels[j]));
            }
            for (k, _) in &g.table[i][j] {
                if g.parity[*k] != (g.parity[i] ^ g.parity[j]) {
                    report.push(format!("bracket of ({}, {}) has wrong parity", g.labels[i], g.labels[j]));
                }
            }
        }
    }
    for i in 0..dim {
        let xi = g.basis_elem(i);
        for j in 0..dim {
            let xj = g.basis_elem(j);
            let xij = g.bracket(&xi, &xj);
            for k in 0..dim {
                let xk = g.basis_elem(k);
                // [x,[y,z]] = [[x,y],z] + (−1)^{|x||y|}[y,[x,z]]
                let lhs = g.bracket(&xi, &g.bracket(&xj, &xk));
                let r1 = g.bracket(&xij, &xk);
                let r2 = g.bracket(&xj, &g.bracket(&xi, &xk));
                let s = sgn(g.parity[i], g.parity[j]);
                let ok = (0..dim).all(|t| (&lhs[t] - &(&r1[t] + &(&s * &r2[t]))).is_zero());
                if !ok {
                    report.push(format!(
                        "Jacobi identity fails for ({}, {}, {})",
                        g.labels[i], g.labels[j], g.labels[k]
                    ));
                }
                // ([x,y],z) = (x,[y,z])
                let a = g.form_of(&xij, &xk);
                let b = g.form_of(&xi, &g.bracket(&xj, &xk));
                if a != b {
                    report.push(format!(
                        "form invariance fails for ({}, {}, {})",
                        g.labels[i], g.labels[j], g.labels[k]
                    ));
                }
            }
            let fij = &g.form[i][j];
            if !fij.is_zero() && g.parity[i] != g.parity[j] {
                report.push(format!("form is not even on ({}, {})", g.labels[i], g.labels[j]));
            }
            let s = sgn(g.parity[i], g.parity[j]);
            if *fij != &s * &g.form[j][i] {
                report.push(format!("form is not supersymmetric on ({}, {})", g.labels[i], g.labels[j]));
            }
        }
    }
    if linalg::rank(&g.form) < dim {
        report.push("form is degenerate".into());
    }
    report
}

/// A root with its root vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    /// Values on the Cartan basis vectors `g.cartan`.
    pub values: Vec<Scalar>,
    pub odd: bool,
    /// Basis index of the root vector.
    pub vector: usize,
}

/// Root system of an algebra relative to its Cartan subalgebra.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub roots: Vec<Root>,
    /// Indices into `roots` of the simple roots, ordered.
    pub simple: Vec<usize>,
    /// Per root: positive under the current positive system.
    pub positive: Vec<bool>,
}

/// Simultaneous ad-Cartan eigenspace decomposition.
pub fn root_decomposition(g: &LieSuperalgebra) -> Result<RootDatum> {
    let mut roots = Vec::new();
    for b in 0..g.dim() {
        if g.cartan.contains(&b) {
            continue;
        }
        let xb = g.basis_elem(b);
        let mut values = Vec::with_capacity(g.cartan.len());
        for &c in &g.cartan {
            let br = g.bracket(&g.basis_elem(c), &xb);
            let val = br[b].clone();
            let clean = br.iter().enumerate().all(|(k, x)| k == b || x.is_zero());
            if !clean {
                return Err(Error::Decomposition(format!(
                    "{} is not an eigenvector of ad {}",
                    g.labels[b], g.labels[c]
                )));
            }
            values.push(val);
        }
        if values.iter().all(|v| v.is_zero()) {
            return Err(Error::Decomposition(format!("{} has zero weight", g.labels[b])));
        }
        roots.push(Root { values, odd: g.parity[b], vector: b });
    }
    let positive = roots.iter().map(|r| lex_positive(&r.values)).collect();
    let mut datum = RootDatum { roots, simple: Vec::new(), positive };
    datum.simple = datum.simple_from_positive(None);
    Ok(datum)
}

/// Sign of the first nonzero rational coordinate.
pub fn lex_positive(v: &[Scalar]) -> bool {
    for x in v {
        if let Some(q) = x.to_rational() {
            if q > num_traits::Zero::zero() {
                return true;
            }
            if q < num_traits::Zero::zero() {
                return false;
            }
        }
    }
    false
}

fn add_vals(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl RootDatum {
    pub fn find(&self, values: &[Scalar]) -> Vec<usize> {
        (0..self.roots.len()).filter(|&i| self.roots[i].values == values).collect()
    }

    /// Indecomposable positive roots; `last` (if given) is moved to the end.
    pub fn simple_from_positive(&self, last: Option<usize>) -> Vec<usize> {
        let pos: Vec<usize> = (0..self.roots.len()).filter(|&i| self.positive[i]).collect();
        let mut simple = Vec::new();
        let mut seen: Vec<Vec<Scalar>> = Vec::new();
        for &a in &pos {
            let va = &self.roots[a].values;
            if seen.contains(va) {
                continue;
            }
            let decomposable = pos.iter().any(|&b| {
                pos.iter().any(|&c| add_vals(&self.roots[b].values, &self.roots[c].values) == *va)
            });
            if !decomposable {
                seen.push(va.clone());
                simple.push(a);
            }
        }
        if let Some(l) = last {
            if let Some(p) = simple.iter().position(|&x| x == l) {
                simple.remove(p);
                simple.push(l);
            }
        }
        simple
    }
}

/// Output of [`classify_minimal_case`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalCase {
    pub odd_type: bool,
    pub ge0_label: String,
    pub completely_reducible: bool,
    /// (even|odd) dimension of g^e(0) as computed, for cross-checking the label.
    pub ge0_dims: (usize, usize),
}

/// Coroot `h` of an even root, normalized so that `θ(h) = 2`, plus the
/// matching negative root vector scaled so that `[e, f] = h`.
pub fn sl2_data(g: &LieSuperalgebra, datum: &RootDatum, theta: usize) -> Result<(Elem, Elem, Elem)> {
    let r = &datum.roots[theta];
    if r.odd {
        return Err(Error::Selection(format!("{} is an odd root", g.labels[r.vector])));
    }
    let neg: Vec<Scalar> = r.values.iter().map(|x| -x).collect();
    let neg_idx = *datum
        .find(&neg)
        .first()
        .ok_or_else(|| Error::Selection("negative root missing".into()))?;
    let e = g.basis_elem(r.vector);
    let f0 = g.basis_elem(datum.roots[neg_idx].vector);
    let h0 = g.bracket(&e, &f0);
    // θ(h0)
    let mut t = Scalar::zero();
    for (k, &c) in g.cartan.iter().enumerate() {
        t += &(&r.values[k] * &h0[c]);
    }
    if t.is_zero() {
        return Err(Error::Selection(format!("{} has θ(h) = 0", g.labels[r.vector])));
    }
    let scale = &Scalar::from_int(2) / &t;
    let f: Elem = f0.iter().map(|x| x * &scale).collect();
    let h = g.bracket(&e, &f);
    Ok((e, h, f))
}

/// Value of a root on a Cartan element given in algebra coordinates.
pub fn root_value(g: &LieSuperalgebra, root: &Root, h: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (k, &c) in g.cartan.iter().enumerate() {
        if !h[c].is_zero() {
            acc += &(&root.values[k] * &h[c]);
        }
    }
    acc
}

fn block_of_theta(g: &LieSuperalgebra, root: &Root) -> Option<(bool, usize, usize)> {
    // returns (in_even_block, row, col) of the matrix entry of the root vector
    let m = g.matrices.get(root.vector)?;
    let p = g.family.superdim().0;
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                return Some((i < p, i, j));
            }
        }
    }
    None
}

fn label_dims(label: &str) -> Option<(usize, usize)> {
    // sum of simple pieces separated by " + "
    let mut total = (0, 0);
    for piece in label.split(" + ") {
        let piece = piece.trim();
        let d = if piece == "trivial" {
            (0, 0)
        } else {
            let (name, rest) = piece.split_once('(')?;
            let args = rest.trim_end_matches(')');
            let (a, b) = match args.split_once('|') {
                Some((a, b)) => (a.parse::<usize>().ok()?, b.parse::<usize>().ok()?),
                None => (args.parse::<usize>().ok()?, 0),
            };
            match name {
                "gl" => (a * a + b * b, 2 * a * b),
                "sl" => (a * a + b * b - 1, 2 * a * b),
                "so" => (a * (a.saturating_sub(1)) / 2, 0),
                "sp" => (a / 2 * (a + 1), 0),
                "spo" => (a / 2 * (a + 1) + b * (b.saturating_sub(1)) / 2, a * b),
                "osp" => (b / 2 * (b + 1) + a * (a.saturating_sub(1)) / 2, a * b),
                _ => return None,
            }
        };
        total = (total.0 + d.0, total.1 + d.1);
    }
    Some(total)
}

fn reducible_piece(piece: &str) -> bool {
    let piece = piece.trim();
    if piece == "trivial" {
        return true;
    }
    let Some((name, rest)) = piece.split_once('(') else { return false };
    let args = rest.trim_end_matches(')');
    let (a, b) = match args.split_once('|') {
        Some((a, b)) => (a.parse::<usize>().unwrap_or(0), b.parse::<usize>().unwrap_or(0)),
        None => (args.parse::<usize>().unwrap_or(0), 0),
    };
    match name {
        "gl" => a + b == 0,
        "sl" => b == 0 && a >= 2,
        "so" => a != 2,
        "sp" => true,
        // spo(2k|m): completely reducible iff it is a Lie algebra or m = 1
        "spo" => b == 1 || b == 0 || (a == 0 && b != 2),
        "osp" => a == 1 || b == 0 && a != 2 || a == 0,
        _ => false,
    }
}

/// Parity type, g^e(0) label and complete reducibility for a minimal root.
pub fn classify_minimal_case(g: &LieSuperalgebra, datum: &RootDatum, theta: usize) -> Result<MinimalCase> {
    let (_, h, _) = sl2_data(g, datum, theta).map_err(|e| Error::Classification(e.to_string()))?;
    let mut r = 0;
    let mut g2 = 0;
    let mut ge0 = (0usize, 0usize);
    for root in &datum.roots {
        let v = root_value(g, root, &h);
        let q = v
            .to_rational()
            .ok_or_else(|| Error::Classification("irrational eigenvalue".into()))?;
        let qi = if q.is_integer() { q.to_integer().try_into().unwrap_or(99i64) } else { 99 };
        if !(-2..=2).contains(&qi) {
            return Err(Error::Classification(format!("{} is not minimal (eigenvalue {})", g.labels[datum.roots[theta].vector], q)));
        }
        if qi == 2 {
            g2 += 1;
        }
        if qi == -1 && root.odd {
            r += 1;
        }
        if qi == 0 {
            if root.odd {
                ge0.1 += 1;
            } else {
                ge0.0 += 1;
            }
        }
    }
    if g2 != 1 {
        return Err(Error::Classification("dim g(2) is not 1".into()));
    }
    ge0.0 += g.cartan.len() - 1;
    let odd_type = r % 2 == 1;
    let root = &datum.roots[theta];
    let (in_even, _, _) = block_of_theta(g, root).ok_or_else(|| Error::Classification("no matrix realization".into()))?;
    let label = match g.family {
        Family::Gl { m, n } | Family::Sl { m, n } => {
            let (p, q) = if in_even { (m, n) } else { (n, m) };
            let base = if p == 2 {
                if q == 0 { "trivial".to_string() } else { format!("gl({})", q) }
            } else {
                format!("gl({}|{})", p - 2, q)
            };
            if matches!(g.family, Family::Gl { .. }) {
                if base == "trivial" { "gl(1)".to_string() } else { format!("{} + gl(1)", base) }
            } else {
                base
            }
        }
        Family::Psl { n } => {
            if n == 2 { "sl(2)".to_string() } else { format!("sl({}|{})", n - 2, n) }
        }
        Family::Spo { n, m } => {
            if in_even {
                if n == 1 {
                    if m <= 1 { "trivial".to_string() } else { format!("so({})", m) }
                } else {
                    format!("spo({}|{})", 2 * n - 2, m)
                }
            } else if m == 4 {
                format!("sl(2) + sp({})", 2 * n)
            } else {
                format!("osp({}|{}) + sl(2)", m - 4, 2 * n)
            }
        }
    };
    let completely_reducible = label.split(" + ").all(reducible_piece);
    if let Some(d) = label_dims(&label) {
        if d != ge0 {
            return Err(Error::Consistency(format!(
                "label {} has dimension {}|{} but g^e(0) has {}|{}",
                label, d.0, d.1, ge0.0, ge0.1
            )));
        }
    }
    Ok(MinimalCase { odd_type, ge0_label: label, completely_reducible, ge0_dims: ge0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lookup(g: &LieSuperalgebra, x: &Elem) -> String {
        let mut parts = Vec::new();
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("{}*{}", c, g.labels[i]));
            }
        }
        parts.join(" + ")
    }

    #[test]
    fn osp12_dimensions_and_validity() {
        let g = build_from_spec("osp:1|2").unwrap();
        assert_eq!((g.dim_even(), g.dim_odd()), (3, 2));
        assert!(validate(&g).is_empty(), "{:?}", validate(&g));
    }

    #[test]
    fn spo23_and_sl21_dimensions() {
        let g = build_from_spec("spo:2|3").unwrap();
        assert_eq!((g.dim_even(), g.dim_odd()), (6, 6));
        assert!(validate(&g).is_empty());
        let g = build_from_spec("sl:2|1").unwrap();
        assert_eq!((g.dim_even(), g.dim_odd()), (4, 4));
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn psl22_is_valid() {
        let g = build_from_spec("psl:2|2").unwrap();
        assert_eq!((g.dim_even(), g.dim_odd()), (6, 8));
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn perturbed_constant_is_reported() {
        let mut g = build_from_spec("osp:1|2").unwrap();
        // bump one nonzero structure constant
        let (i, j) = (0..g.dim())
            .flat_map(|i| (0..g.dim()).map(move |j| (i, j)))
            .find(|&(i, j)| !g.table[i][j].is_empty() && g.parity[i] && g.parity[j])
            .unwrap();
        g.table[i][j][0].1 += &Scalar::one();
        let report = validate(&g);
        assert!(report.iter().any(|m| m.starts_with("Jacobi identity fails")), "{:?}", report);
    }

    #[test]
    fn exceptional_families_rejected() {
        for s in ["G3", "F4", "D21:1|1"] {
            assert!(matches!(Family::parse(s), Err(Error::UnsupportedFamily(_))));
        }
    }

    #[test]
    fn root_counts() {
        let g = build_from_spec("osp:1|2").unwrap();
        let d = root_decomposition(&g).unwrap();
        assert_eq!(d.roots.len(), 4);
        assert_eq!(d.roots.iter().filter(|r| r.odd).count(), 2);
        let g = build_from_spec("sl:2|1").unwrap();
        let d = root_decomposition(&g).unwrap();
        assert_eq!(d.roots.iter().filter(|r| r.odd).count(), 4);
        assert_eq!(d.roots.iter().filter(|r| !r.odd).count(), 2);
        let g = build_from_spec("spo:2|3").unwrap();
        let d = root_decomposition(&g).unwrap();
        assert_eq!(d.roots.len() + g.cartan.len(), g.dim());
        assert_eq!(d.roots.len(), 10);
        for r in &d.roots {
            let neg: Vec<Scalar> = r.values.iter().map(|x| -x).collect();
            assert!(d.find(&neg).iter().any(|&k| d.roots[k].odd == r.odd), "{}", lookup(&g, &g.basis_elem(r.vector)));
        }
    }
}
