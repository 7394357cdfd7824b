//! Differential polynomials: the coordinate ring `k[J_m g*]` of the jet
//! scheme of `g*` and its limit `k[J_inf g*]`.
//!
//! The variable `x^i_{-j}` (`j >= 1`) is the coordinate attached to basis
//! element `x_i` at depth `j`; under truncation `m` only `j <= m + 1` occur.
//! The Hasse-Schmidt derivation acts on variables by
//! `d^(k) x_{-n-1} = C(n+k, k) x_{-n-k-1}` and on products by the divided
//! Leibniz rule.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::liealg::{Family, LieAlgebraSpec, Matrix};
use crate::linalg::{self, Echelon};
use crate::scalars::{binomial, Field, Scalar};
use crate::vacuum::{PbwMonomial, VState, VacuumModule};

/// The coordinate `x^basis_{-depth}`. Ordered by basis, then depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub basis: u32,
    pub depth: u32,
}

impl Var {
    pub fn new(basis: usize, depth: u32) -> Var {
        assert!(depth >= 1, "jet variables have depth >= 1");
        Var { basis: basis as u32, depth }
    }
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetMonomial(Vec<(Var, u32)>);

impl JetMonomial {
    pub fn one() -> JetMonomial {
        JetMonomial(Vec::new())
    }

    pub fn from_vars(vars: impl IntoIterator<Item = Var>) -> JetMonomial {
        let mut counts: BTreeMap<Var, u32> = BTreeMap::new();
        for v in vars {
            *counts.entry(v).or_insert(0) += 1;
        }
        JetMonomial(counts.into_iter().collect())
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Var, u32)>) -> JetMonomial {
        let mut counts: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e > 0 {
                *counts.entry(v).or_insert(0) += e;
            }
        }
        JetMonomial(counts.into_iter().collect())
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.depth * e).sum()
    }

    pub fn max_depth(&self) -> u32 {
        self.0.iter().map(|(v, _)| v.depth).max().unwrap_or(0)
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &JetMonomial) -> JetMonomial {
        JetMonomial::from_factors(self.0.iter().chain(&other.0).copied())
    }

    pub fn pow(&self, e: u32) -> JetMonomial {
        JetMonomial(self.0.iter().map(|(v, x)| (*v, x * e)).collect())
    }

    /// `self / v` when `v` divides `self`.
    fn without_one(&self, v: Var) -> JetMonomial {
        let mut out = Vec::with_capacity(self.0.len());
        for &(w, e) in &self.0 {
            if w == v {
                if e > 1 {
                    out.push((w, e - 1));
                }
            } else {
                out.push((w, e));
            }
        }
        JetMonomial(out)
    }

    /// Variables with multiplicity.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().flat_map(|(v, e)| std::iter::repeat_n(*v, *e as usize))
    }

    /// `[(basis, depth, exponent)]`.
    pub fn to_triples(&self) -> Vec<(u32, u32, u32)> {
        self.0.iter().map(|(v, e)| (v.basis, v.depth, *e)).collect()
    }
}

impl Serialize for JetMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_triples().serialize(s)
    }
}

fn join_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

/// A sparse polynomial in the jet variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffPoly {
    field: Field,
    /// `Some(m)`: only depths `<= m + 1` allowed.
    trunc: Option<u32>,
    terms: BTreeMap<JetMonomial, Scalar>,
}

impl DiffPoly {
    pub fn zero(field: Field) -> DiffPoly {
        DiffPoly { field, trunc: None, terms: BTreeMap::new() }
    }

    pub fn constant(c: Scalar) -> DiffPoly {
        let mut p = DiffPoly::zero(c.field());
        p.add_term(JetMonomial::one(), c);
        p
    }

    pub fn one(field: Field) -> DiffPoly {
        DiffPoly::constant(field.one())
    }

    pub fn var(field: Field, basis: usize, depth: u32) -> DiffPoly {
        DiffPoly::monomial(field, JetMonomial::from_vars([Var::new(basis, depth)]), field.one())
    }

    pub fn monomial(field: Field, m: JetMonomial, c: Scalar) -> DiffPoly {
        let mut p = DiffPoly::zero(field);
        p.add_term(m, c);
        p
    }

    /// Places this polynomial in `k[J_m g*]`.
    pub fn with_trunc(mut self, m: u32) -> Result<DiffPoly> {
        let depth = self.max_depth();
        if depth > m + 1 {
            return Err(Error::TruncationOverflow { depth, trunc: m });
        }
        self.trunc = Some(self.trunc.map_or(m, |t| t.max(m)));
        Ok(self)
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    pub fn field(&self) -> Field {
        self.field
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

    pub fn terms(&self) -> impl Iterator<Item = (&JetMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &JetMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn max_depth(&self) -> u32 {
        self.terms.keys().map(JetMonomial::max_depth).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(JetMonomial::degree).max().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.terms.keys().map(JetMonomial::weight).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: JetMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &DiffPoly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn plus(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_scaled(other, &self.field.one());
        out.trunc = join_trunc(self.trunc, other.trunc);
        out
    }

    pub fn minus(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_scaled(other, &-self.field.one());
        out.trunc = join_trunc(self.trunc, other.trunc);
        out
    }

    pub fn scaled(&self, c: &Scalar) -> DiffPoly {
        let mut out = DiffPoly { field: self.field, trunc: self.trunc, terms: BTreeMap::new() };
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero(self.field);
        out.trunc = join_trunc(self.trunc, other.trunc);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one(self.field);
        acc.trunc = self.trunc;
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Degree-`d` homogeneous component.
    pub fn degree_component(&self, d: u32) -> DiffPoly {
        DiffPoly {
            field: self.field,
            trunc: self.trunc,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// `d f / d v`.
    pub fn partial(&self, v: Var) -> DiffPoly {
        let mut out = DiffPoly { field: self.field, trunc: self.trunc, terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                out.add_term(m.without_one(v), c * &self.field.int(e as i64));
            }
        }
        out
    }

    pub fn evaluate(&self, point: impl Fn(Var) -> Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                t *= &point(*v).pow(*e as u64);
            }
            acc += &t;
        }
        acc
    }

    /// Ring homomorphism determined by images of variables.
    pub fn substitute(&self, image: impl Fn(Var) -> DiffPoly) -> DiffPoly {
        let mut cache: HashMap<Var, DiffPoly> = HashMap::new();
        let mut out = DiffPoly::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = DiffPoly::constant(c.clone());
            for (v, e) in m.factors() {
                let img = cache.entry(*v).or_insert_with(|| image(*v));
                t = t.mul(&img.pow(*e));
            }
            out.add_scaled(&t, &self.field.one());
        }
        out.trunc = self.trunc;
        out
    }

    pub fn map_coefficients(&self, field: Field, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero(field);
        out.trunc = self.trunc;
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Whether `self = c * other` for some scalar `c`; returns `c`.
    pub fn proportionality(&self, other: &DiffPoly) -> Option<Scalar> {
        let (m, b) = other.terms.iter().next()?;
        let c = self.coefficient(m).checked_div(b).ok()?;
        (other.scaled(&c).terms == self.terms).then_some(c)
    }

    /// Equality of terms, ignoring the truncation tag.
    pub fn same_terms(&self, other: &DiffPoly) -> bool {
        self.field == other.field && self.terms == other.terms
    }

    /// Writes each variable with the algebra's basis labels.
    pub fn display_with<'a>(&'a self, spec: &'a LieAlgebraSpec) -> impl fmt::Display + 'a {
        struct D<'a>(&'a DiffPoly, &'a LieAlgebraSpec);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write_poly(f, self.0, |v| format!("{}[-{}]", self.1.label(v.basis as usize), v.depth))
            }
        }
        D(self, spec)
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &DiffPoly, name: impl Fn(Var) -> String) -> fmt::Result {
    if p.terms.is_empty() {
        return f.write_str("0");
    }
    for (i, (m, c)) in p.terms.iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        write!(f, "({c})")?;
        for (v, e) in m.factors() {
            write!(f, "·{}", name(*v))?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, |v| format!("x{}[-{}]", v.basis, v.depth))
    }
}

impl Serialize for DiffPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&(m, c.to_string()))?;
        }
        seq.end()
    }
}

/// `d^(k) f`.
pub fn hasse_derive(k: u32, f: &DiffPoly) -> Result<DiffPoly> {
    let field = f.field;
    let mut out = DiffPoly::zero(field);
    out.trunc = f.trunc;
    if k == 0 {
        return Ok(f.clone());
    }
    let k = k as usize;
    for (mono, c) in &f.terms {
        // layers[j] collects the z^j coefficient of the image under
        // x_{-d} -> sum_i C(d-1+i, i) x_{-d-i} z^i
        let mut layers: Vec<BTreeMap<JetMonomial, Scalar>> = vec![BTreeMap::new(); k + 1];
        layers[0].insert(JetMonomial::one(), c.clone());
        for v in mono.vars() {
            let mut next: Vec<BTreeMap<JetMonomial, Scalar>> = vec![BTreeMap::new(); k + 1];
            for (j, layer) in layers.iter().enumerate() {
                for i in 0..=(k - j) {
                    let b = binomial(v.depth as i64 - 1 + i as i64, i as u64, field);
                    if b.is_zero() {
                        continue;
                    }
                    let shifted = JetMonomial::from_vars([Var { basis: v.basis, depth: v.depth + i as u32 }]);
                    for (m, x) in layer {
                        let t = x * &b;
                        let key = m.mul(&shifted);
                        let e = next[j + i].entry(key).or_insert_with(|| field.zero());
                        *e += &t;
                    }
                }
            }
            for layer in next.iter_mut() {
                layer.retain(|_, x| !x.is_zero());
            }
            layers = next;
        }
        for (m, x) in std::mem::take(&mut layers[k]) {
            out.add_term(m, x);
        }
    }
    if let Some(m) = f.trunc {
        let depth = out.max_depth();
        if depth > m + 1 {
            return Err(Error::TruncationOverflow { depth, trunc: m });
        }
    }
    Ok(out)
}

/// The generators `{d^(i) a : a in gens, 0 <= i <= m}` of the jet ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JetIdeal {
    pub generators: Vec<DiffPoly>,
    pub trunc: u32,
}

pub fn jet_ideal(gens: &[DiffPoly], m: u32) -> Result<JetIdeal> {
    let mut generators = Vec::new();
    for g in gens {
        let g = g.clone().with_trunc(m)?;
        for i in 0..=m {
            generators.push(hasse_derive(i, &g)?);
        }
    }
    Ok(JetIdeal { generators, trunc: m })
}

/// What a basic invariant is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantKind {
    /// `(-1)^{d+1} e_d(X)`: minus the `lambda^{N-d}` coefficient of `det(lambda - X)`.
    CharPoly(u32),
    /// `Pf(J X)` for `so_{2n}`.
    Pfaffian(u32),
}

impl InvariantKind {
    pub fn degree(self) -> u32 {
        match self {
            InvariantKind::CharPoly(d) | InvariantKind::Pfaffian(d) => d,
        }
    }
}

/// The basic invariants in order of degree.
pub fn invariant_kinds(spec: &LieAlgebraSpec) -> Vec<InvariantKind> {
    let n = spec.size() as u32;
    let mut kinds: Vec<InvariantKind> = match spec.family() {
        Family::Gl => (1..=n).map(InvariantKind::CharPoly).collect(),
        Family::Sl => (2..=n).map(InvariantKind::CharPoly).collect(),
        Family::Sp => (1..=n / 2).map(|k| InvariantKind::CharPoly(2 * k)).collect(),
        Family::So if n % 2 == 1 => (1..=n / 2).map(|k| InvariantKind::CharPoly(2 * k)).collect(),
        Family::So => {
            let mut k: Vec<InvariantKind> = (1..n / 2).map(|k| InvariantKind::CharPoly(2 * k)).collect();
            k.push(InvariantKind::Pfaffian(n / 2));
            k
        }
    };
    kinds.sort_by_key(|k| (k.degree(), matches!(k, InvariantKind::Pfaffian(_))));
    kinds
}

/// The matrix `X = sum_c x_{c,-1} M^c`, `{M^c}` trace-dual to the basis.
pub fn generic_matrix(spec: &LieAlgebraSpec) -> Result<Vec<Vec<DiffPoly>>> {
    let field = spec.field();
    let duals = spec.trace_dual_matrices()?;
    let n = spec.size();
    let mut x = vec![vec![DiffPoly::zero(field); n]; n];
    for (c, m) in duals.iter().enumerate() {
        let v = DiffPoly::var(field, c, 1);
        for i in 0..n {
            for j in 0..n {
                let e = m.get(i, j);
                if !e.is_zero() {
                    x[i][j].add_scaled(&v, e);
                }
            }
        }
    }
    Ok(x)
}

/// Trace-pairing dictionary: `(label of x_c, dual matrix M^c)`. The
/// coordinate `x_{c,-1}` is the entry pattern `M^c` of the generic matrix.
pub fn trace_dictionary(spec: &LieAlgebraSpec) -> Result<Vec<(String, Vec<Vec<String>>)>> {
    Ok(spec
        .trace_dual_matrices()?
        .iter()
        .enumerate()
        .map(|(c, m): (usize, &Matrix)| {
            (spec.label(c).to_string(), m.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
        })
        .collect())
}

fn permutations(items: &[usize]) -> Vec<(Vec<usize>, bool)> {
    // Heap's algorithm; bool is "odd"
    fn go(k: usize, a: &mut Vec<usize>, odd: bool, out: &mut Vec<(Vec<usize>, bool)>) -> bool {
        if k <= 1 {
            out.push((a.clone(), odd));
            return odd;
        }
        let mut odd = go(k - 1, a, odd, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            odd = go(k - 1, a, !odd, out);
        }
        odd
    }
    let mut out = Vec::new();
    go(items.len(), &mut items.to_vec(), false, &mut out);
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..n {
            acc.push(i);
            go(i + 1, n, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn principal_minor_sum(x: &[Vec<DiffPoly>], d: usize, field: Field) -> DiffPoly {
    let mut total = DiffPoly::zero(field);
    for s in subsets(x.len(), d) {
        for (perm, odd) in permutations(&s) {
            let mut t = DiffPoly::one(field);
            for (row, col) in s.iter().zip(&perm) {
                t = t.mul(&x[*row][*col]);
                if t.is_zero() {
                    break;
                }
            }
            let sign = if odd { -field.one() } else { field.one() };
            total.add_scaled(&t, &sign);
        }
    }
    total
}

fn pfaffian(a: &[Vec<DiffPoly>], idx: &[usize], field: Field) -> DiffPoly {
    if idx.is_empty() {
        return DiffPoly::one(field);
    }
    let first = idx[0];
    let mut total = DiffPoly::zero(field);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        if a[first][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&t| t != first && t != j).collect();
        let sign = if pos % 2 == 1 { field.one() } else { -field.one() };
        total.add_scaled(&a[first][j].mul(&pfaffian(a, &rest, field)), &sign);
    }
    total
}

/// `P_i` (1-based) in the depth-1 variables.
pub fn build_invariant_p(spec: &LieAlgebraSpec, i: usize) -> Result<DiffPoly> {
    let kinds = invariant_kinds(spec);
    let kind = *kinds
        .get(i.wrapping_sub(1))
        .ok_or_else(|| Error::Invalid(format!("invariant index {i} outside 1..={}", kinds.len())))?;
    let field = spec.field();
    let x = generic_matrix(spec)?;
    match kind {
        InvariantKind::CharPoly(d) => {
            let e = principal_minor_sum(&x, d as usize, field);
            Ok(if d % 2 == 1 { e } else { e.scaled(&-field.one()) })
        }
        InvariantKind::Pfaffian(_) => {
            let n = spec.size();
            // (J X)_{ij} = X_{n-1-i, j}
            let jx: Vec<Vec<DiffPoly>> = (0..n).map(|i| x[n - 1 - i].clone()).collect();
            let idx: Vec<usize> = (0..n).collect();
            Ok(pfaffian(&jx, &idx, field))
        }
    }
}

/// All basic invariants `P_1, ..., P_r`.
pub fn invariants(spec: &LieAlgebraSpec) -> Result<Vec<DiffPoly>> {
    (1..=invariant_kinds(spec).len()).map(|i| build_invariant_p(spec, i)).collect()
}

/// `P_{i,-j} = d^(j-1) P_i`, weight `d_i + j - 1`.
pub fn p_series(spec: &LieAlgebraSpec, i: usize, j: u32, trunc: Option<u32>) -> Result<DiffPoly> {
    if j == 0 {
        return Err(Error::Invalid("P_{i,-j} needs j >= 1".into()));
    }
    let mut p = build_invariant_p(spec, i)?;
    if let Some(m) = trunc {
        p = p.with_trunc(m)?;
    }
    hasse_derive(j - 1, &p)
}

/// Image of a single variable under `x t^m`.
fn derivation_on_var(spec: &LieAlgebraSpec, x: usize, m: u32, v: Var) -> Vec<(Var, Scalar)> {
    if v.depth <= m {
        return Vec::new();
    }
    spec.bracket(x, v.basis as usize)
        .iter()
        .map(|(k, c)| (Var { basis: *k as u32, depth: v.depth - m }, c.clone()))
        .collect()
}

/// The derivation `x t^m` of the coadjoint current action (no central term).
pub fn coadjoint_derivation(spec: &LieAlgebraSpec, x: usize, m: u32, f: &DiffPoly) -> DiffPoly {
    let field = f.field;
    let mut out = DiffPoly::zero(field);
    out.trunc = f.trunc;
    for (mono, c) in &f.terms {
        for &(v, e) in mono.factors() {
            let image = derivation_on_var(spec, x, m, v);
            if image.is_empty() {
                continue;
            }
            let rest = mono.without_one(v);
            let ce = c * &field.int(e as i64);
            for (w, b) in image {
                out.add_term(rest.mul(&JetMonomial::from_vars([w])), &ce * &b);
            }
        }
    }
    out
}

fn exp_images(spec: &LieAlgebraSpec, alpha: usize, m: u32, v: Var) -> Result<Vec<DiffPoly>> {
    // coefficients of s^k in exp(s D)(v), as linear polynomials
    let field = spec.field();
    let order = spec.nilpotency_order(alpha).ok_or_else(|| Error::NilpotencyOrderTooLarge {
        root: spec.label(alpha).to_string(),
        order: u32::MAX,
        p: field.characteristic(),
    })?;
    if let Field::Prime(p) = field {
        if order as u64 >= p {
            return Err(Error::NilpotencyOrderTooLarge { root: spec.label(alpha).to_string(), order, p });
        }
    }
    let mut out = Vec::new();
    let mut current = DiffPoly::var(field, v.basis as usize, v.depth);
    let mut factorial = field.one();
    for k in 0..order {
        if k > 0 {
            current = coadjoint_derivation(spec, alpha, m, &current);
            factorial *= &field.int(k as i64);
        }
        if current.is_zero() {
            break;
        }
        out.push(current.scaled(&factorial.inv()?));
    }
    Ok(out)
}

/// `u_{alpha,m}(s) f = exp(s D) f` with `D = x_alpha t^m`, applied as the ring
/// automorphism `v -> sum_k s^k D^k(v) / k!` on variables.
pub fn one_param_action(spec: &LieAlgebraSpec, alpha: usize, m: u32, s: &Scalar, f: &DiffPoly) -> Result<DiffPoly> {
    let field = spec.field();
    let mut images: HashMap<Var, DiffPoly> = HashMap::new();
    for mono in f.terms.keys() {
        for (v, _) in mono.factors() {
            if !images.contains_key(v) {
                let mut img = DiffPoly::zero(field);
                for (k, c) in exp_images(spec, alpha, m, *v)?.iter().enumerate() {
                    img.add_scaled(c, &s.pow(k as u64));
                }
                images.insert(*v, img);
            }
        }
    }
    Ok(f.substitute(|v| images[&v].clone()))
}

/// `u_{alpha,m}(s) f` for a formal parameter `s`: the coefficients of
/// `s^0, s^1, ...`. Invariance means every coefficient past the first is zero.
pub fn one_param_action_formal(spec: &LieAlgebraSpec, alpha: usize, m: u32, f: &DiffPoly) -> Result<Vec<DiffPoly>> {
    let field = spec.field();
    let mul = |a: &[DiffPoly], b: &[DiffPoly]| -> Vec<DiffPoly> {
        let mut out = vec![DiffPoly::zero(field); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if !x.is_zero() && !y.is_zero() {
                    out[i + j].add_scaled(&x.mul(y), &field.one());
                }
            }
        }
        out
    };
    let mut images: HashMap<Var, Vec<DiffPoly>> = HashMap::new();
    let mut total: Vec<DiffPoly> = vec![DiffPoly::zero(field)];
    for (mono, c) in &f.terms {
        let mut t = vec![DiffPoly::constant(c.clone())];
        for v in mono.vars() {
            if let std::collections::hash_map::Entry::Vacant(e) = images.entry(v) {
                e.insert(exp_images(spec, alpha, m, v)?);
            }
            t = mul(&t, &images[&v]);
        }
        if t.len() > total.len() {
            total.resize(t.len(), DiffPoly::zero(field));
        }
        for (k, x) in t.iter().enumerate() {
            total[k].add_scaled(x, &field.one());
        }
    }
    while total.len() > 1 && total.last().is_some_and(DiffPoly::is_zero) {
        total.pop();
    }
    Ok(total)
}

/// `d/dx^i_{-1-s} d^(m) P - [m >= s] d^(m-s) (dP/dx^i_{-1})`.
pub fn rewriteders_residual(p: &DiffPoly, i: usize, s: u32, m: u32) -> Result<DiffPoly> {
    let lhs = hasse_derive(m, p)?.partial(Var::new(i, 1 + s));
    if m < s {
        return Ok(lhs);
    }
    let rhs = hasse_derive(m - s, &p.partial(Var::new(i, 1)))?;
    Ok(lhs.minus(&rhs))
}

/// All variables at truncation `m`, sorted.
pub fn variables(dim: usize, m: u32) -> Vec<Var> {
    let mut v: Vec<Var> = (0..dim).flat_map(|b| (1..=m + 1).map(move |d| Var::new(b, d))).collect();
    v.sort();
    v
}

/// Monomials of degree exactly `d` in `vars`, sorted.
pub fn monomials_of_degree(vars: &[Var], d: u32) -> Vec<JetMonomial> {
    fn go(vars: &[Var], start: usize, left: u32, acc: &mut Vec<Var>, out: &mut Vec<JetMonomial>) {
        if left == 0 {
            out.push(JetMonomial::from_vars(acc.iter().copied()));
            return;
        }
        for i in start..vars.len() {
            acc.push(vars[i]);
            go(vars, i, left - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(vars, 0, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Result of [`jacobian_rank`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobianReport {
    pub rank: usize,
    /// `(m + 1) r`.
    pub full_rank: usize,
    /// Blocks above the diagonal vanish identically and diagonal blocks all
    /// equal `dP_{i,-1}/dx_{-1}`.
    pub block_structure: bool,
}

/// Rank of `(dP_{i,-j} / dx^a_{-s})` at `point`, `1 <= j, s <= m + 1`.
pub fn jacobian_rank(spec: &LieAlgebraSpec, m: u32, point: &dyn Fn(Var) -> Scalar) -> Result<JacobianReport> {
    let field = spec.field();
    let r = invariant_kinds(spec).len();
    let dim = spec.dim();
    let depth = (m + 1) as usize;
    let mut series = Vec::with_capacity(r * depth);
    for i in 1..=r {
        for j in 1..=m + 1 {
            series.push(p_series(spec, i, j, Some(m))?);
        }
    }
    let mut rows = Vec::with_capacity(dim * depth);
    let mut block_structure = true;
    for a in 0..dim {
        for s in 1..=m + 1 {
            let v = Var::new(a, s);
            let mut row = Vec::with_capacity(r * depth);
            for i in 0..r {
                let diag = series[i * depth].partial(Var::new(a, 1));
                for j in 1..=m + 1 {
                    let d = series[i * depth + (j - 1) as usize].partial(v);
                    if s > j && !d.is_zero() {
                        block_structure = false;
                    }
                    if s == j && !d.same_terms(&diag) {
                        block_structure = false;
                    }
                    row.push(d.evaluate(point));
                }
            }
            rows.push(row);
        }
    }
    Ok(JacobianReport { rank: linalg::rank(field, r * depth, rows), full_rank: r * depth, block_structure })
}

/// Points of `J_m g*` as `(basis, depth, value)` triples; unlisted
/// coordinates are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsDocument {
    pub points: Vec<Vec<(u32, u32, String)>>,
}

impl PointsDocument {
    pub fn resolve(&self, spec: &LieAlgebraSpec, m: u32) -> Result<Vec<BTreeMap<Var, Scalar>>> {
        let field = spec.field();
        let mut out = Vec::with_capacity(self.points.len());
        for (idx, triples) in self.points.iter().enumerate() {
            let mut point: BTreeMap<Var, Scalar> = variables(spec.dim(), m).into_iter().map(|v| (v, field.zero())).collect();
            for (basis, depth, value) in triples {
                if *basis as usize >= spec.dim() || *depth == 0 || *depth > m + 1 {
                    return Err(Error::Invalid(format!(
                        "point {idx}: coordinate ({basis}, {depth}) outside J_{m} of a {}-dimensional algebra",
                        spec.dim()
                    )));
                }
                point.insert(Var::new(*basis as usize, *depth), field.parse(value)?);
            }
            out.push(point);
        }
        Ok(out)
    }
}

/// Dimension of the coadjoint stabiliser of the depth-1 part of `point`.
pub fn stabiliser_dimension(spec: &LieAlgebraSpec, point: &dyn Fn(Var) -> Scalar) -> usize {
    let d = spec.dim();
    let xi: Vec<Scalar> = (0..d).map(|c| point(Var::new(c, 1))).collect();
    let rows = (0..d).map(|y| {
        (0..d)
            .map(|z| {
                spec.bracket(y, z).iter().fold(spec.field().zero(), |acc, (k, c)| acc + c * &xi[*k])
            })
            .collect::<Vec<_>>()
    });
    d - linalg::rank(spec.field(), d, rows)
}

/// Whether the depth-1 part of `point` is a regular element of `g*`.
pub fn is_regular(spec: &LieAlgebraSpec, point: &dyn Fn(Var) -> Scalar) -> bool {
    let r = if spec.family() == Family::Gl { spec.size() } else { spec.rank() };
    stabiliser_dimension(spec, point) == r
}

/// Invariant subspace to compute in [`invariant_ring_dimensions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantMode {
    /// Common kernel of every `x t^{m'}`, `m' <= m`.
    Lie,
    /// Fixed points of every `u_{alpha,m'}(s)`, `s in F_p`, `m' <= m`.
    Group,
    /// Lie invariants modulo p-th powers times lower invariants.
    PthPowersQuotient,
}

impl std::str::FromStr for InvariantMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<InvariantMode> {
        match s {
            "lie" => Ok(InvariantMode::Lie),
            "group" => Ok(InvariantMode::Group),
            "p-th-powers-quotient" => Ok(InvariantMode::PthPowersQuotient),
            other => Err(Error::Invalid(format!("unknown invariant mode {other}"))),
        }
    }
}

fn kernel_in(
    field: Field,
    basis: &[JetMonomial],
    maps: &mut dyn Iterator<Item = Box<dyn Fn(&DiffPoly) -> Result<DiffPoly> + '_>>,
) -> Result<Vec<DiffPoly>> {
    let cols = basis.len();
    let mut echelon = Echelon::new(field, cols);
    for map in maps {
        if echelon.is_full() {
            break;
        }
        let mut rows: BTreeMap<JetMonomial, Vec<Scalar>> = BTreeMap::new();
        for (col, mono) in basis.iter().enumerate() {
            let img = map(&DiffPoly::monomial(field, mono.clone(), field.one()))?;
            for (t, c) in img.terms {
                rows.entry(t).or_insert_with(|| vec![field.zero(); cols])[col] = c;
            }
        }
        for row in rows.into_values() {
            echelon.insert(row);
        }
    }
    Ok(echelon
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut p = DiffPoly::zero(field);
            for (mono, c) in basis.iter().zip(v) {
                p.add_term(mono.clone(), c);
            }
            p
        })
        .collect())
}

/// Invariant polynomials of degree `delta` at truncation `m` (a basis).
pub fn invariants_of_degree(
    spec: &LieAlgebraSpec,
    m: u32,
    delta: u32,
    mode: InvariantMode,
    capacity: usize,
) -> Result<Vec<DiffPoly>> {
    let field = spec.field();
    let vars = variables(spec.dim(), m);
    let basis = monomials_of_degree(&vars, delta);
    if basis.len() > capacity {
        return Err(Error::CapacityExceeded { at: delta, needed: basis.len(), cap: capacity });
    }
    match mode {
        InvariantMode::Lie | InvariantMode::PthPowersQuotient => {
            // every x t^{m'} is homogeneous, so split by weight
            let mut by_weight: BTreeMap<u32, Vec<JetMonomial>> = BTreeMap::new();
            for mono in basis {
                by_weight.entry(mono.weight()).or_default().push(mono);
            }
            let mut out = Vec::new();
            for part in by_weight.values() {
                let mut maps = (0..=m).flat_map(|mm| {
                    (0..spec.dim()).map(move |x| {
                        Box::new(move |f: &DiffPoly| Ok(coadjoint_derivation(spec, x, mm, f)))
                            as Box<dyn Fn(&DiffPoly) -> Result<DiffPoly>>
                    })
                });
                out.extend(kernel_in(field, part, &mut maps)?);
            }
            Ok(out)
        }
        InvariantMode::Group => {
            let p = match field {
                Field::Prime(p) => p,
                Field::Rational => return Err(Error::Invalid("group mode needs a prime characteristic".into())),
            };
            let roots: Vec<usize> = spec.root_vectors().iter().map(|r| r.index).collect();
            let mut maps = roots.into_iter().flat_map(|alpha| {
                (0..=m).flat_map(move |mm| {
                    (1..p).map(move |s| {
                        let s = field.int(s as i64);
                        Box::new(move |f: &DiffPoly| Ok(one_param_action(spec, alpha, mm, &s, f)?.minus(f)))
                            as Box<dyn Fn(&DiffPoly) -> Result<DiffPoly>>
                    })
                })
            });
            kernel_in(field, &basis, &mut maps)
        }
    }
}

/// Per-degree dimensions `0..=d` of the invariant ring of `J_m g*`.
pub fn invariant_ring_dimensions(
    spec: &LieAlgebraSpec,
    m: u32,
    d: u32,
    mode: InvariantMode,
    capacity: usize,
) -> Result<Vec<usize>> {
    match mode {
        InvariantMode::Lie | InvariantMode::Group => {
            (0..=d).map(|delta| Ok(invariants_of_degree(spec, m, delta, mode, capacity)?.len())).collect()
        }
        InvariantMode::PthPowersQuotient => {
            let p = match spec.field() {
                Field::Prime(p) => p as u32,
                Field::Rational => return Err(Error::Invalid("p-th powers need a prime characteristic".into())),
            };
            let field = spec.field();
            let vars = variables(spec.dim(), m);
            let lie: Vec<Vec<DiffPoly>> = (0..=d)
                .map(|delta| invariants_of_degree(spec, m, delta, InvariantMode::Lie, capacity))
                .collect::<Result<_>>()?;
            let mut out = Vec::new();
            for delta in 0..=d {
                let basis = monomials_of_degree(&vars, delta);
                let index: HashMap<&JetMonomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let mut echelon = Echelon::new(field, basis.len());
                let mut q = 1;
                while p * q <= delta {
                    for mono in monomials_of_degree(&vars, q) {
                        let power = DiffPoly::monomial(field, mono.pow(p), field.one());
                        for g in &lie[(delta - p * q) as usize] {
                            let prod = power.mul(g);
                            let mut row = vec![field.zero(); basis.len()];
                            for (t, c) in prod.terms() {
                                row[index[t]] = c.clone();
                            }
                            echelon.insert(row);
                        }
                    }
                    q += 1;
                }
                out.push(lie[delta as usize].len() - echelon.rank());
            }
            Ok(out)
        }
    }
}

/// Coefficients `0..=d` of `prod_g (1 + t^g + ... + t^{(b-1) g})` over the
/// generator degrees `g`, with `b = bound` (unbounded when `None`).
pub fn monomial_counts(generator_degrees: &[u32], d: u32, bound: Option<u32>) -> Vec<u64> {
    let d = d as usize;
    let mut series = vec![0u64; d + 1];
    series[0] = 1;
    for &g in generator_degrees {
        let g = g as usize;
        if g == 0 {
            continue;
        }
        let mut next = vec![0u64; d + 1];
        for (i, &c) in series.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut e = 0usize;
            while i + e * g <= d && bound.is_none_or(|b| (e as u32) < b) {
                next[i + e * g] += c;
                e += 1;
            }
        }
        series = next;
    }
    series
}

/// Degrees of `P_{i,-j}` for `j <= m + 1`.
pub fn p_series_degrees(spec: &LieAlgebraSpec, m: u32) -> Vec<u32> {
    invariant_kinds(spec).iter().flat_map(|k| std::iter::repeat_n(k.degree(), m as usize + 1)).collect()
}

/// Predicted invariant-ring dimensions: restricted monomials in the
/// `P_{i,-j}` times arbitrary monomials in the `(m+1) dim g` p-th powers
/// (`p = 0`: all monomials in the `P_{i,-j}`).
pub fn predicted_invariant_dimensions(spec: &LieAlgebraSpec, m: u32, d: u32) -> Vec<u64> {
    let gens = p_series_degrees(spec, m);
    match spec.field() {
        Field::Rational => monomial_counts(&gens, d, None),
        Field::Prime(p) => {
            let restricted = monomial_counts(&gens, d, Some(p as u32));
            let powers = monomial_counts(&vec![p as u32; spec.dim() * (m as usize + 1)], d, None);
            (0..=d as usize).map(|i| (0..=i).map(|j| restricted[j] * powers[i - j]).sum()).collect()
        }
    }
}

/// `a_(n) b` in the Poisson vertex algebra `gr V^k(g)`: the top part of the
/// vertex-algebra product when the level is given filtration degree one.
///
/// Both arguments are lifted monomial-wise to PBW monomials; each coefficient
/// of the product is a polynomial in the level, recovered by interpolation.
pub fn pva_product(module: &VacuumModule, a: &DiffPoly, n: u32, b: &DiffPoly) -> Result<DiffPoly> {
    let spec = module.shared_spec();
    let field = spec.field();
    let trunc = join_trunc(a.trunc, b.trunc);
    let mut out = DiffPoly::zero(field);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let top = (ma.degree() + mb.degree()) as i64 - 1;
            if top < 0 {
                continue;
            }
            let prod = pva_monomials(&spec, module.level().value.clone(), ma, n, mb, top as u32)?;
            out.add_scaled(&prod, &(ca * cb));
        }
    }
    out.trunc = trunc;
    if let Some(m) = trunc {
        let depth = out.max_depth();
        if depth > m + 1 {
            return Err(Error::TruncationOverflow { depth, trunc: m });
        }
    }
    Ok(out)
}

fn pva_monomials(
    spec: &Arc<LieAlgebraSpec>,
    level: Scalar,
    a: &JetMonomial,
    n: u32,
    b: &JetMonomial,
    top: u32,
) -> Result<DiffPoly> {
    let field = spec.field();
    // level degree of any surviving term is at most top / 2 + 1
    let points = (top / 2 + 2) as usize;
    if let Field::Prime(p) = field {
        if points as u64 > p {
            return Err(Error::Invalid(format!(
                "level interpolation needs {points} distinct levels, more than p = {p}"
            )));
        }
    }
    let la = PbwMonomial::from_jet(a);
    let lb = PbwMonomial::from_jet(b);
    let sa = VState::monomial(field, la, field.one());
    let sb = VState::monomial(field, lb, field.one());
    let samples: Vec<(Scalar, VState)> = (0..points)
        .map(|t| {
            let k = field.int(t as i64);
            let module = VacuumModule::new(spec.clone(), k.clone())?;
            Ok((k, module.nth_product(&sa, n as i64, &sb)))
        })
        .collect::<Result<_>>()?;
    let mut monos: Vec<&PbwMonomial> = samples.iter().flat_map(|(_, v)| v.terms().map(|(m, _)| m)).collect();
    monos.sort();
    monos.dedup();
    let mut out = DiffPoly::zero(field);
    for mono in monos {
        let ys: Vec<Scalar> = samples.iter().map(|(_, v)| v.coefficient(mono)).collect();
        let xs: Vec<Scalar> = samples.iter().map(|(k, _)| k.clone()).collect();
        let coeffs = interpolate(&xs, &ys)?;
        let len = mono.len() as u32;
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let grade = len + e as u32;
            if grade > top {
                return Err(Error::Invalid(format!("filtration violated: grade {grade} above {top}")));
            }
            if grade == top {
                out.add_term(mono.to_jet(), c * &level.pow(e as u64));
            }
        }
    }
    Ok(out)
}

/// Coefficients of the unique polynomial of degree `< xs.len()` through the
/// points.
fn interpolate(xs: &[Scalar], ys: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = xs.len();
    let field = xs[0].field();
    let rows: Vec<Vec<Scalar>> = xs.iter().map(|x| (0..n).map(|e| x.pow(e as u64)).collect()).collect();
    let inv = linalg::inverse(field, &rows)?;
    Ok((0..n).map(|i| (0..n).fold(field.zero(), |acc, j| acc + &inv[i][j] * &ys[j])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::build_classical;
    use proptest::prelude::*;

    fn sl2(field: Field) -> LieAlgebraSpec {
        build_classical(Family::Sl, 2, field).unwrap()
    }

    const E: usize = 0;
    const H: usize = 1;
    const F: usize = 2;

    fn v(field: Field, b: usize, d: u32) -> DiffPoly {
        DiffPoly::var(field, b, d)
    }

    #[test]
    fn hasse_on_variables_and_products() {
        let q = Field::Rational;
        assert_eq!(hasse_derive(1, &v(q, E, 1)).unwrap(), v(q, E, 2));
        let prod = v(q, E, 1).mul(&v(q, F, 1));
        let expect = v(q, E, 2).mul(&v(q, F, 1)).plus(&v(q, E, 1).mul(&v(q, F, 2)));
        assert_eq!(hasse_derive(1, &prod).unwrap(), expect);
        assert_eq!(hasse_derive(2, &v(q, E, 2)).unwrap(), v(q, E, 4).scaled(&q.int(3)));
    }

    #[test]
    fn truncation_overflow() {
        let q = Field::Rational;
        let x = v(q, E, 1).with_trunc(1).unwrap();
        assert!(hasse_derive(1, &x).is_ok());
        assert_eq!(hasse_derive(2, &x), Err(Error::TruncationOverflow { depth: 3, trunc: 1 }));
    }

    #[test]
    fn sl2_invariant() {
        let q = Field::Rational;
        let g = sl2(q);
        let p = build_invariant_p(&g, 1).unwrap();
        let expect = v(q, H, 1).pow(2).scaled(&q.parse("1/4").unwrap()).plus(&v(q, E, 1).mul(&v(q, F, 1)));
        assert_eq!(p, expect);
        let p2 = p_series(&g, 1, 2, None).unwrap();
        let expect2 = v(q, H, 1)
            .mul(&v(q, H, 2))
            .scaled(&q.parse("1/2").unwrap())
            .plus(&v(q, E, 2).mul(&v(q, F, 1)))
            .plus(&v(q, E, 1).mul(&v(q, F, 2)));
        assert_eq!(p2, expect2);
    }

    #[test]
    fn gl1_invariant() {
        let f = Field::Prime(5);
        let g = build_classical(Family::Gl, 1, f).unwrap();
        assert_eq!(build_invariant_p(&g, 1).unwrap(), v(f, 0, 1));
    }

    #[test]
    fn invariants_are_lie_invariant() {
        for (fam, n, field) in [
            (Family::Sl, 3, Field::Rational),
            (Family::Sp, 4, Field::Prime(7)),
            (Family::So, 5, Field::Prime(7)),
            (Family::So, 6, Field::Rational),
            (Family::Gl, 3, Field::Prime(5)),
        ] {
            let g = build_classical(fam, n, field).unwrap();
            let ps = invariants(&g).unwrap();
            assert_eq!(ps.len(), invariant_kinds(&g).len());
            for (i, p) in ps.iter().enumerate() {
                assert!(!p.is_zero(), "{fam}_{n} P_{}", i + 1);
                assert_eq!(p.degree(), invariant_kinds(&g)[i].degree());
                for x in 0..g.dim() {
                    assert!(coadjoint_derivation(&g, x, 0, p).is_zero(), "{fam}_{n} P_{} x{x}", i + 1);
                }
            }
        }
    }

    #[test]
    fn coadjoint_examples() {
        let q = Field::Rational;
        let g = sl2(q);
        assert_eq!(coadjoint_derivation(&g, E, 0, &v(q, F, 1)), v(q, H, 1));
        assert!(coadjoint_derivation(&g, E, 1, &v(q, F, 1)).is_zero());
        assert_eq!(coadjoint_derivation(&g, E, 1, &v(q, F, 2)), v(q, H, 1));
    }

    #[test]
    fn ladder_relation() {
        // [D_{x,m}, d^(1)] = m D_{x,m-1} on variables
        let f = Field::Prime(7);
        let g = build_classical(Family::Sl, 3, f).unwrap();
        for x in 0..g.dim() {
            for y in 0..g.dim() {
                for j in 1..4 {
                    for m in 1..4u32 {
                        let var = v(f, y, j);
                        let a = coadjoint_derivation(&g, x, m, &hasse_derive(1, &var).unwrap());
                        let b = hasse_derive(1, &coadjoint_derivation(&g, x, m, &var)).unwrap();
                        let c = coadjoint_derivation(&g, x, m - 1, &var).scaled(&f.int(m as i64));
                        assert_eq!(a.minus(&b), c);
                    }
                }
            }
        }
    }

    #[test]
    fn exponential_example() {
        let f = Field::Prime(5);
        let g = sl2(f);
        let s = f.int(3);
        let out = one_param_action(&g, E, 0, &s, &v(f, F, 1)).unwrap();
        let expect = v(f, F, 1).plus(&v(f, H, 1).scaled(&s)).minus(&v(f, E, 1).scaled(&s.pow(2)));
        assert_eq!(out, expect);
        assert_eq!(one_param_action(&g, E, 0, &f.zero(), &v(f, F, 1)).unwrap(), v(f, F, 1));
    }

    #[test]
    fn group_invariance_of_p_series() {
        for (fam, n) in [(Family::Sl, 2), (Family::Sl, 3)] {
            let f = Field::Prime(7);
            let g = build_classical(fam, n, f).unwrap();
            for j in 1..=3 {
                let p = p_series(&g, 1, j, None).unwrap();
                for rv in g.root_vectors() {
                    for m in 0..=3 {
                        let formal = one_param_action_formal(&g, rv.index, m, &p).unwrap();
                        assert_eq!(formal.len(), 1, "{fam}_{n} j={j} m={m}");
                        assert_eq!(one_param_action(&g, rv.index, m, &f.int(4), &p).unwrap(), p);
                    }
                }
            }
        }
    }

    #[test]
    fn jet_ideal_examples() {
        let q = Field::Rational;
        let x = v(q, E, 1);
        let ideal = jet_ideal(std::slice::from_ref(&x), 2).unwrap();
        let got: Vec<DiffPoly> = ideal.generators.iter().map(|g| DiffPoly { trunc: None, ..g.clone() }).collect();
        assert_eq!(got, vec![v(q, E, 1), v(q, E, 2), v(q, E, 3)]);
        let sq = jet_ideal(&[x.pow(2)], 1).unwrap();
        assert!(sq.generators[1].same_terms(&v(q, E, 1).mul(&v(q, E, 2)).scaled(&q.int(2))));
        assert!(jet_ideal(&[], 3).unwrap().generators.is_empty());
    }

    #[test]
    fn invariant_dimensions_sl2_p5() {
        let g = sl2(Field::Prime(5));
        let lie = invariant_ring_dimensions(&g, 0, 6, InvariantMode::Lie, 10_000).unwrap();
        assert_eq!(lie, vec![1, 0, 1, 0, 1, 3, 1]);
        let group = invariant_ring_dimensions(&g, 0, 4, InvariantMode::Group, 10_000).unwrap();
        assert_eq!(group, vec![1, 0, 1, 0, 1]);
        let m1 = invariant_ring_dimensions(&g, 1, 4, InvariantMode::Lie, 10_000).unwrap();
        assert_eq!(m1, vec![1, 0, 2, 0, 3]);
        let predicted: Vec<usize> =
            predicted_invariant_dimensions(&g, 0, 6).into_iter().map(|x| x as usize).collect();
        assert_eq!(predicted, lie);
    }

    #[test]
    fn pth_power_quotient_counts_restricted_monomials() {
        let g = sl2(Field::Prime(5));
        let q = invariant_ring_dimensions(&g, 0, 10, InvariantMode::PthPowersQuotient, 10_000).unwrap();
        let expect: Vec<usize> =
            monomial_counts(&p_series_degrees(&g, 0), 10, Some(5)).into_iter().map(|x| x as usize).collect();
        assert_eq!(q, expect);
    }

    #[test]
    fn jacobian_examples() {
        let f = Field::Prime(5);
        let g = sl2(f);
        let zero = |_: Var| f.zero();
        let j0 = jacobian_rank(&g, 0, &zero).unwrap();
        assert_eq!(j0.rank, 0);
        assert!(j0.block_structure);
        // x_f = 1: the linear form dual to the regular nilpotent e
        let point = |v: Var| if v.basis == F as u32 && v.depth == 1 { f.one() } else { f.zero() };
        assert!(is_regular(&g, &point));
        let j1 = jacobian_rank(&g, 1, &point).unwrap();
        assert_eq!((j1.rank, j1.full_rank, j1.block_structure), (2, 2, true));
    }

    #[test]
    fn rewriteders_examples() {
        let q = Field::Rational;
        let p = v(q, E, 1).mul(&v(q, F, 1));
        assert!(rewriteders_residual(&p, E, 1, 1).unwrap().is_zero());
        assert!(rewriteders_residual(&p, E, 2, 1).unwrap().is_zero());
    }

    #[test]
    fn pva_generators() {
        let q = Field::Rational;
        let g = sl2(q);
        let module = VacuumModule::new(g, q.int(3)).unwrap();
        assert_eq!(pva_product(&module, &v(q, E, 1), 0, &v(q, F, 1)).unwrap(), v(q, H, 1));
        assert_eq!(pva_product(&module, &v(q, E, 1), 1, &v(q, F, 1)).unwrap(), DiffPoly::constant(q.int(3)));
        assert!(pva_product(&module, &v(q, E, 1), 2, &v(q, F, 1)).unwrap().is_zero());
    }

    proptest! {
        #[test]
        fn hasse_composition(i in 0u32..6, j in 0u32..6, seed in 0u64..1000) {
            let f = Field::Prime(5);
            let poly = small_poly(f, seed);
            let lhs = hasse_derive(i, &hasse_derive(j, &poly).unwrap()).unwrap();
            let rhs = hasse_derive(i + j, &poly).unwrap().scaled(&binomial((i + j) as i64, i as u64, f));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hasse_leibniz(k in 0u32..6, s1 in 0u64..1000, s2 in 0u64..1000) {
            let f = Field::Prime(7);
            let (a, b) = (small_poly(f, s1), small_poly(f, s2));
            let lhs = hasse_derive(k, &a.mul(&b)).unwrap();
            let mut rhs = DiffPoly::zero(f);
            for i in 0..=k {
                rhs.add_scaled(&hasse_derive(i, &a).unwrap().mul(&hasse_derive(k - i, &b).unwrap()), &f.one());
            }
            prop_assert_eq!(lhs, rhs);
        }
    }

    fn small_poly(f: Field, seed: u64) -> DiffPoly {
        let mut p = DiffPoly::zero(f);
        let mut s = seed;
        for _ in 0..3 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (s >> 33) as usize % 3;
            let d = 1 + (s >> 40) as u32 % 3;
            let e = 1 + (s >> 50) as u32 % 2;
            let c = f.int(1 + (s >> 20) as i64 % 4);
            p.add_scaled(&v(f, b, d).pow(e).mul(&v(f, (b + 1) % 3, 1)), &c);
        }
        p
    }
}
