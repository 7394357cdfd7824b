//! Classical matrix Lie algebras with fixed ordered bases.
//!
//! Basis orders (1-based matrix indices):
//! - `gl_N`: `E_ij` row-major.
//! - `sl_N`: `E_ij` for `i < j` row-major, then `H_i = E_ii - E_{i+1,i+1}`,
//!   then `E_ij` for `i > j` row-major. For `sl_2` this is `(e, h, f)`.
//! - `so_N`, `sp_N`: the algebra preserving the antidiagonal form `J`
//!   (`J = sum E_{i,N+1-i}` for `so`, with the lower half negated for `sp`).
//!   One basis element per orbit `{(u,v), (v',u')}` with `u' = N+1-u`,
//!   namely `E_uv - s E_{v'u'}` (`s = 1` for `so`, `s = eps_u eps_v` for
//!   `sp`), listed row-major by the smaller representative.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SpanSolver};
use crate::report::Check;
use crate::scalars::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gl,
    Sl,
    So,
    Sp,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gl => "gl",
            Family::Sl => "sl",
            Family::So => "so",
            Family::Sp => "sp",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Family::Gl),
            "sl" => Ok(Family::Sl),
            "so" => Ok(Family::So),
            "sp" => Ok(Family::Sp),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

/// Square matrix over a field, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(field: Field, n: usize) -> Matrix {
        Matrix { n, data: vec![field.zero(); n * n] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// `E_ij` with 0-based indices.
    pub fn unit(field: Field, n: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zero(field, n);
        m.data[i * n + j] = field.one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, data: rows.into_iter().flatten().collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let field = self.data[0].field();
        let mut out = Matrix::zero(field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).add(&other.mul(self).scale(&-self.data[0].field().one()))
    }

    pub fn trace(&self) -> Scalar {
        let field = self.data[0].field();
        (0..self.n).fold(field.zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn pow(&self, e: u64) -> Matrix {
        let field = self.data[0].field();
        let mut acc = Matrix::identity(field, self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootVector {
    /// `e_u - e_v` for the diagonal torus.
    pub root: String,
    /// Basis index of the chosen root vector.
    pub index: usize,
}

/// Sparse expansion `sum c_k x_k` in the basis.
pub type Sparse = Vec<(usize, Scalar)>;

/// A finite-dimensional matrix Lie algebra with all tables precomputed.
#[derive(Clone, Debug)]
pub struct LieAlgebraSpec {
    family: Family,
    size: usize,
    field: Field,
    labels: Vec<String>,
    basis: Vec<Matrix>,
    /// `brackets[i][j]` expands `[x_i, x_j]`.
    brackets: Vec<Vec<Sparse>>,
    form: Vec<Vec<Scalar>>,
    restricted: Option<Vec<Sparse>>,
    rank: usize,
    coxeter: u64,
    dual_coxeter: u64,
    root_vectors: Vec<RootVector>,
}

fn label(prefix: char, n: usize, i: usize, j: usize) -> String {
    if n < 10 {
        format!("{prefix}{}{}", i + 1, j + 1)
    } else {
        format!("{prefix}{},{}", i + 1, j + 1)
    }
}

/// Coxeter number, dual Coxeter number and rank.
pub fn classical_numbers(family: Family, n: usize) -> Result<(u64, u64, usize)> {
    let bad = || Error::BadSize { family: family.to_string(), size: n };
    let n64 = n as u64;
    match family {
        Family::Gl if n >= 1 => Ok((n64, n64, n)),
        Family::Sl if n >= 2 => Ok((n64, n64, n - 1)),
        Family::So if n >= 3 => {
            let h = if n % 2 == 1 { n64 - 1 } else { n64 - 2 };
            Ok((h, n64 - 2, n / 2))
        }
        Family::Sp if n >= 2 && n.is_multiple_of(2) => Ok((n64, n64 / 2 + 1, n / 2)),
        _ => Err(bad()),
    }
}

/// Degrees of the basic invariants: char-poly degrees, with the Pfaffian in
/// even orthogonal type.
pub fn invariant_degrees(family: Family, n: usize) -> Vec<u32> {
    let n32 = n as u32;
    match family {
        Family::Gl => (1..=n32).collect(),
        Family::Sl => (2..=n32).collect(),
        Family::Sp => (1..=n32 / 2).map(|k| 2 * k).collect(),
        Family::So if n % 2 == 1 => (1..=n32 / 2).map(|k| 2 * k).collect(),
        Family::So => {
            let r = n32 / 2;
            let mut d: Vec<u32> = (1..r).map(|k| 2 * k).collect();
            d.push(r);
            d.sort_unstable();
            d
        }
    }
}

fn classical_basis(family: Family, n: usize, field: Field) -> (Vec<Matrix>, Vec<String>, Vec<RootVector>) {
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    let mut roots = Vec::new();
    let root = |u: usize, v: usize| format!("e{}-e{}", u + 1, v + 1);
    match family {
        Family::Gl => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        roots.push(RootVector { root: root(i, j), index: basis.len() });
                    }
                    basis.push(Matrix::unit(field, n, i, j));
                    labels.push(label('E', n, i, j));
                }
            }
        }
        Family::Sl => {
            let mut push_offdiag = |upper: bool, basis: &mut Vec<Matrix>, labels: &mut Vec<String>| {
                for i in 0..n {
                    for j in 0..n {
                        if (upper && i < j) || (!upper && i > j) {
                            roots.push(RootVector { root: root(i, j), index: basis.len() });
                            basis.push(Matrix::unit(field, n, i, j));
                            labels.push(label('E', n, i, j));
                        }
                    }
                }
            };
            push_offdiag(true, &mut basis, &mut labels);
            for i in 0..n - 1 {
                let h = Matrix::unit(field, n, i, i)
                    .add(&Matrix::unit(field, n, i + 1, i + 1).scale(&field.int(-1)));
                basis.push(h);
                labels.push(format!("H{}", i + 1));
            }
            push_offdiag(false, &mut basis, &mut labels);
        }
        Family::So | Family::Sp => {
            let prime = |u: usize| n - 1 - u;
            let eps = |u: usize| if family == Family::Sp && u >= n / 2 { -1 } else { 1 };
            for u in 0..n {
                for v in 0..n {
                    let partner = (prime(v), prime(u));
                    if partner < (u, v) {
                        continue;
                    }
                    let m = if partner == (u, v) {
                        if family == Family::So {
                            continue;
                        }
                        Matrix::unit(field, n, u, v)
                    } else {
                        let s = if family == Family::So { 1 } else { eps(u) * eps(v) };
                        Matrix::unit(field, n, u, v)
                            .add(&Matrix::unit(field, n, partner.0, partner.1).scale(&field.int(-s)))
                    };
                    if u != v {
                        roots.push(RootVector { root: root(u, v), index: basis.len() });
                    }
                    basis.push(m);
                    labels.push(label('X', n, u, v));
                }
            }
        }
    }
    (basis, labels, roots)
}

/// Builds `gl_N`, `sl_N`, `so_N` or `sp_N` over `field`.
///
/// The invariant form is the trace form for `sl` and `sp`, half the trace
/// form for `so` (both equal the normalised Killing form), and
/// `Tr(xy) - Tr(x)Tr(y)/N` for `gl`.
pub fn build_classical(family: Family, n: usize, field: Field) -> Result<LieAlgebraSpec> {
    let (coxeter, dual_coxeter, rank) = classical_numbers(family, n)?;
    if let Field::Prime(p) = field {
        if p <= coxeter {
            return Err(Error::BadCharacteristic { family: family.to_string(), p, bound: coxeter });
        }
    }
    let (basis, labels, root_vectors) = classical_basis(family, n, field);
    let dim = basis.len();

    let flat: Vec<Vec<Scalar>> = basis.iter().map(|m| m.entries().to_vec()).collect();
    let solver = SpanSolver::new(field, &flat)?;
    let coords = |m: &Matrix| -> Result<Sparse> {
        let c = solver
            .solve(m.entries())
            .ok_or_else(|| Error::Invalid("matrix outside the Lie algebra".into()))?;
        Ok(c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
    };

    let mut brackets = vec![vec![Vec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            brackets[i][j] = coords(&basis[i].commutator(&basis[j]))?;
        }
    }

    let inv_n = if family == Family::Gl { field.int(n as i64).inv()? } else { field.zero() };
    let mut form = vec![vec![field.zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let tr = basis[i].mul(&basis[j]).trace();
            form[i][j] = match family {
                Family::Gl => tr - basis[i].trace() * basis[j].trace() * &inv_n,
                Family::So => tr * field.int(2).inv()?,
                Family::Sl | Family::Sp => tr,
            };
        }
    }

    let restricted = match field {
        Field::Prime(p) => Some(basis.iter().map(|b| coords(&b.pow(p))).collect::<Result<Vec<_>>>()?),
        Field::Rational => None,
    };

    Ok(LieAlgebraSpec {
        family,
        size: n,
        field,
        labels,
        basis,
        brackets,
        form,
        restricted,
        rank,
        coxeter,
        dual_coxeter,
        root_vectors,
    })
}

impl LieAlgebraSpec {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coxeter(&self) -> u64 {
        self.coxeter
    }

    pub fn dual_coxeter(&self) -> u64 {
        self.dual_coxeter
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn root_vectors(&self) -> &[RootVector] {
        &self.root_vectors
    }

    pub fn invariant_degrees(&self) -> Vec<u32> {
        invariant_degrees(self.family, self.size)
    }

    /// `[x_i, x_j]` in the basis.
    pub fn bracket(&self, i: usize, j: usize) -> &Sparse {
        &self.brackets[i][j]
    }

    pub fn kappa(&self, i: usize, j: usize) -> &Scalar {
        &self.form[i][j]
    }

    pub fn form(&self) -> &[Vec<Scalar>] {
        &self.form
    }

    /// `x_i^[p]` in the basis (characteristic `p` only).
    pub fn restricted_power(&self, i: usize) -> Option<&Sparse> {
        self.restricted.as_ref().map(|r| &r[i])
    }

    /// The critical level `-h^vee`.
    pub fn critical_level(&self) -> Scalar {
        self.field.int(-(self.dual_coxeter as i64))
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field.zero(); self.dim()];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in &self.brackets[i][j] {
                    out[*k] += &(&ab * c);
                }
            }
        }
        out
    }

    pub fn kappa_vec(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let mut acc = self.field.zero();
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                acc += &(a * b * &self.form[i][j]);
            }
        }
        acc
    }

    pub fn unit_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    /// Matrix of `ad(x_i)`: column `j` holds `[x_i, x_j]`.
    pub fn ad(&self, i: usize) -> Vec<Vec<Scalar>> {
        let d = self.dim();
        let mut m = vec![vec![self.field.zero(); d]; d];
        for j in 0..d {
            for (k, c) in &self.brackets[i][j] {
                m[*k][j] = c.clone();
            }
        }
        m
    }

    /// Matrix realisation of a coordinate vector.
    pub fn matrix_of(&self, x: &[Scalar]) -> Matrix {
        let mut m = Matrix::zero(self.field, self.size);
        for (c, b) in x.iter().zip(&self.basis) {
            if !c.is_zero() {
                m = m.add(&b.scale(c));
            }
        }
        m
    }

    /// Basis `{x^a}` with `kappa(x_a, x^b) = delta_ab`, as coordinate vectors.
    pub fn dual_basis(&self) -> Result<Vec<Vec<Scalar>>> {
        // x^b = sum_c G^{-1}_{cb} x_c since kappa(x_a, x^b) = (G G^{-1})_{ab}
        let inv = linalg::inverse(self.field, &self.form)?;
        Ok((0..self.dim()).map(|b| (0..self.dim()).map(|c| inv[c][b].clone()).collect()).collect())
    }

    /// Dual basis with respect to the trace form of the natural representation,
    /// as matrices. This is the dictionary identifying coordinates on `g*`
    /// with matrix entries.
    pub fn trace_dual_matrices(&self) -> Result<Vec<Matrix>> {
        let d = self.dim();
        let gram: Vec<Vec<Scalar>> = (0..d)
            .map(|i| (0..d).map(|j| self.basis[i].mul(&self.basis[j]).trace()).collect())
            .collect();
        let inv = linalg::inverse(self.field, &gram)?;
        Ok((0..d)
            .map(|b| {
                let coeffs: Vec<Scalar> = (0..d).map(|c| inv[c][b].clone()).collect();
                self.matrix_of(&coeffs)
            })
            .collect())
    }

    /// Smallest `k` with `ad(x_i)^k = 0`, if any up to `dim + 1`.
    pub fn nilpotency_order(&self, i: usize) -> Option<u32> {
        let ad = self.ad(i);
        let d = self.dim();
        let mut power = identity(self.field, d);
        for k in 1..=(d as u32 + 1) {
            power = mat_mul(&ad, &power);
            if power.iter().flatten().all(Scalar::is_zero) {
                return Some(k);
            }
        }
        None
    }

    /// Structured text serialisation.
    pub fn to_document(&self) -> SpecDocument {
        let s = |x: &Scalar| x.to_string();
        SpecDocument {
            family: self.family,
            size: self.size,
            characteristic: self.field,
            labels: self.labels.clone(),
            basis: self.basis.iter().map(|m| m.rows().iter().map(|r| r.iter().map(s).collect()).collect()).collect(),
            structure_constants: self
                .brackets
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().enumerate().flat_map(move |(j, sp)| {
                        sp.iter().map(move |(k, c)| (i, j, *k, c.to_string()))
                    })
                })
                .collect(),
            form: self.form.iter().map(|r| r.iter().map(s).collect()).collect(),
            restricted_powers: self.restricted.as_ref().map(|r| {
                r.iter().map(|sp| sp.iter().map(|(k, c)| (*k, c.to_string())).collect()).collect()
            }),
            rank: self.rank,
            coxeter: self.coxeter,
            dual_coxeter: self.dual_coxeter,
            root_vectors: self.root_vectors.clone(),
        }
    }

    /// Loads a document verbatim: tables are taken as given, not recomputed.
    pub fn from_document(doc: &SpecDocument) -> Result<LieAlgebraSpec> {
        let field = doc.characteristic;
        let parse = |s: &String| field.parse(s);
        let dim = doc.labels.len();
        let basis = doc
            .basis
            .iter()
            .map(|m| {
                m.iter()
                    .map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
                    .map(Matrix::from_rows)
            })
            .collect::<Result<Vec<_>>>()?;
        if basis.len() != dim || doc.form.len() != dim {
            return Err(Error::Invalid("table sizes disagree with the label list".into()));
        }
        let mut brackets = vec![vec![Vec::new(); dim]; dim];
        for (i, j, k, c) in &doc.structure_constants {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(Error::Invalid(format!("structure constant index out of range: ({i},{j},{k})")));
            }
            let c = parse(c)?;
            if !c.is_zero() {
                brackets[*i][*j].push((*k, c));
            }
        }
        let form = doc
            .form
            .iter()
            .map(|r| r.iter().map(parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let restricted = doc
            .restricted_powers
            .as_ref()
            .map(|r| {
                r.iter()
                    .map(|sp| sp.iter().map(|(k, c)| Ok((*k, parse(c)?))).collect::<Result<Sparse>>())
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(LieAlgebraSpec {
            family: doc.family,
            size: doc.size,
            field,
            labels: doc.labels.clone(),
            basis,
            brackets,
            form,
            restricted,
            rank: doc.rank,
            coxeter: doc.coxeter,
            dual_coxeter: doc.dual_coxeter,
            root_vectors: doc.root_vectors.clone(),
        })
    }

    /// Overwrites one structure constant, keeping the table sparse. Intended
    /// for negative controls.
    pub fn with_structure_constant(mut self, i: usize, j: usize, k: usize, c: Scalar) -> LieAlgebraSpec {
        let entry = &mut self.brackets[i][j];
        entry.retain(|(kk, _)| *kk != k);
        if !c.is_zero() {
            entry.push((k, c));
            entry.sort_by_key(|(kk, _)| *kk);
        }
        self
    }
}

/// Serialised form of a [`LieAlgebraSpec`]; field order is stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub family: Family,
    pub size: usize,
    pub characteristic: Field,
    pub labels: Vec<String>,
    pub basis: Vec<Vec<Vec<String>>>,
    /// `(i, j, k, c)` with `[x_i, x_j] = sum c x_k`.
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    pub form: Vec<Vec<String>>,
    pub restricted_powers: Option<Vec<Vec<(usize, String)>>>,
    pub rank: usize,
    pub coxeter: u64,
    pub dual_coxeter: u64,
    pub root_vectors: Vec<RootVector>,
}

fn identity(field: Field, d: usize) -> Vec<Vec<Scalar>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
}

pub(crate) fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let field = a[0][0].field();
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    let mut out = vec![vec![field.zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    out[i][j] += &(&a[i][t] * &b[t][j]);
                }
            }
        }
    }
    out
}

fn sparse_to_vec(field: Field, dim: usize, sp: &Sparse) -> Vec<Scalar> {
    let mut v = vec![field.zero(); dim];
    for (k, c) in sp {
        v[*k] += c;
    }
    v
}

/// Runs every structural invariant; failures carry a witness.
pub fn validate_spec(spec: &LieAlgebraSpec) -> Vec<Check> {
    let field = spec.field;
    let d = spec.dim();
    let mut checks = Vec::new();
    let name = |s: &str| format!("{}_{}: {s}", spec.family, spec.size);
    let lbl = |i: usize| spec.label(i).to_string();

    let br = |i: usize, j: usize| sparse_to_vec(field, d, spec.bracket(i, j));

    // matrices and table agree
    let mut witness = None;
    'outer: for i in 0..d {
        for j in 0..d {
            if spec.matrix_of(&br(i, j)) != spec.basis[i].commutator(&spec.basis[j]) {
                witness = Some(format!("[{}, {}]", lbl(i), lbl(j)));
                break 'outer;
            }
        }
    }
    checks.push(Check::from_witness(name("brackets match matrix commutators"), witness));

    let mut witness = None;
    'outer: for i in 0..d {
        for j in 0..d {
            let sum: Vec<Scalar> = br(i, j).iter().zip(br(j, i)).map(|(a, b)| a + &b).collect();
            if sum.iter().any(|x| !x.is_zero()) {
                witness = Some(format!("[{}, {}] + [{}, {}] != 0", lbl(i), lbl(j), lbl(j), lbl(i)));
                break 'outer;
            }
        }
    }
    checks.push(Check::from_witness(name("antisymmetry"), witness));

    let mut witness = None;
    'outer: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let x = spec.unit_vec(i);
                let y = spec.unit_vec(j);
                let z = spec.unit_vec(k);
                let a = spec.bracket_vec(&x, &spec.bracket_vec(&y, &z));
                let b = spec.bracket_vec(&y, &spec.bracket_vec(&z, &x));
                let c = spec.bracket_vec(&z, &spec.bracket_vec(&x, &y));
                if a.iter().zip(&b).zip(&c).any(|((a, b), c)| !(a + b + c).is_zero()) {
                    witness = Some(format!("({}, {}, {})", lbl(i), lbl(j), lbl(k)));
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check::from_witness(name("Jacobi identity"), witness));

    let mut witness = None;
    'outer: for i in 0..d {
        for j in 0..d {
            if spec.form[i][j] != spec.form[j][i] {
                witness = Some(format!("kappa({}, {})", lbl(i), lbl(j)));
                break 'outer;
            }
        }
    }
    checks.push(Check::from_witness(name("form symmetric"), witness));

    let mut witness = None;
    'outer: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let (x, y, z) = (spec.unit_vec(i), spec.unit_vec(j), spec.unit_vec(k));
                let v = spec.kappa_vec(&spec.bracket_vec(&x, &y), &z) + spec.kappa_vec(&y, &spec.bracket_vec(&x, &z));
                if !v.is_zero() {
                    witness = Some(format!("x={}, y={}, z={}", lbl(i), lbl(j), lbl(k)));
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check::from_witness(name("form invariant"), witness));

    // nondegenerate, or with kernel exactly the centre for gl
    let kernel = linalg::nullspace(field, d, spec.form.iter().cloned());
    let form_check = if spec.family == Family::Gl {
        let identity_coords = spec.basis.iter().enumerate().map(|(i, _)| {
            let n = spec.size;
            if i % (n + 1) == 0 { field.one() } else { field.zero() }
        });
        let identity_coords: Vec<Scalar> = identity_coords.collect();
        let ok = kernel.len() == 1
            && linalg::rank(field, d, [kernel[0].clone(), identity_coords]) == 1;
        Check::from_witness(
            name("form kernel is the centre"),
            (!ok).then(|| format!("kernel dimension {}", kernel.len())),
        )
    } else {
        Check::from_witness(
            name("form nondegenerate"),
            (!kernel.is_empty()).then(|| format!("kernel dimension {}", kernel.len())),
        )
    };
    checks.push(form_check);

    if let Field::Prime(p) = field {
        let mut witness = None;
        for i in 0..d {
            let Some(rp) = spec.restricted_power(i) else {
                witness = Some("restricted powers missing".to_string());
                break;
            };
            let v = sparse_to_vec(field, d, rp);
            if spec.matrix_of(&v) != spec.basis[i].pow(p) {
                witness = Some(format!("{}^[p] is not the p-th matrix power", lbl(i)));
                break;
            }
            let lhs: Vec<Vec<Scalar>> = {
                let mut m = vec![vec![field.zero(); d]; d];
                for j in 0..d {
                    let col = spec.bracket_vec(&v, &spec.unit_vec(j));
                    for (k, c) in col.into_iter().enumerate() {
                        m[k][j] = c;
                    }
                }
                m
            };
            let ad = spec.ad(i);
            let mut rhs = identity(field, d);
            for _ in 0..p {
                rhs = mat_mul(&ad, &rhs);
            }
            if lhs != rhs {
                witness = Some(format!("ad({}^[p]) != ad({})^p", lbl(i), lbl(i)));
                break;
            }
        }
        checks.push(Check::from_witness(name("restricted structure"), witness));
    }

    let mut witness = None;
    for rv in &spec.root_vectors {
        match spec.nilpotency_order(rv.index) {
            None => {
                witness = Some(format!("{} is not ad-nilpotent", lbl(rv.index)));
                break;
            }
            Some(k) => {
                if let Field::Prime(p) = field {
                    if k as u64 >= p {
                        witness = Some(format!("ad({}) has nilpotency order {k} >= p", lbl(rv.index)));
                        break;
                    }
                }
                if k as u64 > 2 * spec.coxeter {
                    witness = Some(format!("ad({}) has nilpotency order {k} > 2h - 1", lbl(rv.index)));
                    break;
                }
            }
        }
    }
    checks.push(Check::from_witness(name("root vectors ad-nilpotent"), witness));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2(field: Field) -> LieAlgebraSpec {
        build_classical(Family::Sl, 2, field).unwrap()
    }

    #[test]
    fn sl2_trace_form() {
        let g = sl2(Field::Rational);
        assert_eq!(g.labels(), ["E12", "H1", "E21"]);
        let (e, h, f) = (0, 1, 2);
        assert_eq!(g.kappa(e, f), &Field::Rational.one());
        assert_eq!(g.kappa(h, h), &Field::Rational.int(2));
        assert!(g.kappa(e, e).is_zero());
        assert_eq!(g.bracket(e, f), &vec![(h, Field::Rational.one())]);
    }

    #[test]
    fn gl1_form_vanishes() {
        for field in [Field::Rational, Field::Prime(2), Field::Prime(5)] {
            let g = build_classical(Family::Gl, 1, field).unwrap();
            assert!(g.kappa(0, 0).is_zero());
            assert_eq!(g.dual_basis(), Err(Error::DegenerateForm));
        }
    }

    #[test]
    fn sl2_restricted_powers_mod_5() {
        let f5 = Field::Prime(5);
        let g = sl2(f5);
        assert!(g.restricted_power(0).unwrap().is_empty());
        assert_eq!(g.restricted_power(1).unwrap(), &vec![(1, f5.one())]);
        assert!(g.restricted_power(2).unwrap().is_empty());
    }

    #[test]
    fn sl2_dual_basis() {
        let q = Field::Rational;
        let dual = sl2(q).dual_basis().unwrap();
        let half = q.parse("1/2").unwrap();
        assert_eq!(dual[0], vec![q.zero(), q.zero(), q.one()]);
        assert_eq!(dual[1], vec![q.zero(), half, q.zero()]);
        assert_eq!(dual[2], vec![q.one(), q.zero(), q.zero()]);
    }

    #[test]
    fn dual_basis_is_dual_for_sl3() {
        let g = build_classical(Family::Sl, 3, Field::Prime(7)).unwrap();
        let dual = g.dual_basis().unwrap();
        for a in 0..g.dim() {
            for b in 0..g.dim() {
                let v = g.kappa_vec(&g.unit_vec(a), &dual[b]);
                assert_eq!(v.is_one(), a == b);
                assert!(a == b || v.is_zero());
            }
        }
    }

    #[test]
    fn form_is_normalised_killing_form() {
        // kappa = Tr(ad x ad y) / (2 h^vee) in every non-gl family
        let q = Field::Rational;
        for (fam, n) in [(Family::Sl, 2), (Family::Sl, 3), (Family::Sp, 4), (Family::So, 5), (Family::So, 6)] {
            let g = build_classical(fam, n, q).unwrap();
            let scale = q.int(2 * g.dual_coxeter() as i64).inv().unwrap();
            for i in 0..g.dim() {
                for j in 0..g.dim() {
                    let m = mat_mul(&g.ad(i), &g.ad(j));
                    let tr = (0..g.dim()).fold(q.zero(), |s, k| s + &m[k][k]);
                    assert_eq!(&(tr * &scale), g.kappa(i, j), "{fam}_{n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn dimensions_and_ranks() {
        let q = Field::Rational;
        for (fam, n, dim, rank) in [
            (Family::Gl, 3, 9, 3),
            (Family::Sl, 4, 15, 3),
            (Family::So, 5, 10, 2),
            (Family::So, 6, 15, 3),
            (Family::Sp, 4, 10, 2),
            (Family::Sp, 6, 21, 3),
        ] {
            let g = build_classical(fam, n, q).unwrap();
            assert_eq!((g.dim(), g.rank()), (dim, rank), "{fam}_{n}");
            // root vectors: dim minus the diagonal Cartan part
            let cartan = if fam == Family::Gl { n } else { rank };
            assert_eq!(g.root_vectors().len(), dim - cartan);
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            build_classical(Family::Sl, 2, Field::Prime(2)),
            Err(Error::BadCharacteristic { p: 2, .. })
        ));
        assert!(matches!(build_classical(Family::Sp, 3, Field::Rational), Err(Error::BadSize { .. })));
        assert!(matches!(
            build_classical(Family::Sp, 4, Field::Prime(3)),
            Err(Error::BadCharacteristic { .. })
        ));
    }

    #[test]
    fn validator_passes_on_classical() {
        for (fam, n, field) in [
            (Family::Sl, 2, Field::Prime(5)),
            (Family::Sp, 4, Field::Prime(7)),
            (Family::Gl, 2, Field::Prime(5)),
            (Family::So, 5, Field::Prime(7)),
            (Family::Sl, 3, Field::Rational),
        ] {
            let g = build_classical(fam, n, field).unwrap();
            for c in validate_spec(&g) {
                assert!(c.passed(), "{c:?}");
            }
        }
    }

    #[test]
    fn validator_reports_jacobi_witness() {
        let f = Field::Prime(5);
        let g = sl2(f).with_structure_constant(1, 0, 0, f.int(3));
        let checks = validate_spec(&g);
        let jacobi = checks.iter().find(|c| c.name.contains("Jacobi")).unwrap();
        assert!(!jacobi.passed());
        assert!(jacobi.witness.as_ref().unwrap().starts_with('('));
    }

    #[test]
    fn document_roundtrip() {
        let g = build_classical(Family::Sp, 4, Field::Prime(7)).unwrap();
        let doc = g.to_document();
        let text = serde_json::to_string(&doc).unwrap();
        let back: SpecDocument = serde_json::from_str(&text).unwrap();
        let h = LieAlgebraSpec::from_document(&back).unwrap();
        assert_eq!(h.to_document(), doc);
        assert!(validate_spec(&h).iter().all(Check::passed));
    }
}
