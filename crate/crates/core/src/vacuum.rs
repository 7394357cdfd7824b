//! The vacuum module `V^k(g)` on its PBW basis.
//!
//! A state is a linear combination of canonical monomials
//! `x^{i_1}_{-n_1-1} ... x^{i_m}_{-n_m-1}|0>` with `n_1 <= ... <= n_m` and basis
//! indices nondecreasing among equal modes. The level lives in the
//! [`VacuumModule`], never in a state: central terms are evaluated to scalars
//! the moment they appear.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jets::{DiffPoly, JetMonomial, Var};
use crate::liealg::LieAlgebraSpec;
use crate::linalg::Echelon;
use crate::scalars::{binomial, Field, Scalar};

/// The creation mode `x^basis_{-depth}`, `depth >= 1`.
///
/// Ordered by depth, then basis index: the canonical PBW order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub depth: u32,
    pub basis: u32,
}

impl Mode {
    pub fn new(basis: usize, depth: u32) -> Mode {
        assert!(depth >= 1, "creation modes have depth >= 1");
        Mode { depth, basis: basis as u32 }
    }

    /// The mode index `n` of `x_n`.
    pub fn index(self) -> i64 {
        -(self.depth as i64)
    }
}

/// A canonical PBW monomial. Ordered by weight, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwMonomial {
    weight: u32,
    modes: Modes,
}

type Modes = SmallVec<[Mode; 6]>;

impl PbwMonomial {
    pub fn vacuum() -> PbwMonomial {
        PbwMonomial::default()
    }

    /// `None` unless `modes` is already in canonical order.
    pub fn new(modes: Vec<Mode>) -> Option<PbwMonomial> {
        if modes.windows(2).any(|w| w[0] > w[1]) || modes.iter().any(|m| m.depth == 0) {
            return None;
        }
        let weight = modes.iter().map(|m| m.depth).sum();
        Some(PbwMonomial { weight, modes: modes.into() })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// PBW length.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    fn tail(&self) -> PbwMonomial {
        PbwMonomial { weight: self.weight - self.modes[0].depth, modes: SmallVec::from_slice(&self.modes[1..]) }
    }

    fn prepend(&self, m: Mode) -> PbwMonomial {
        debug_assert!(self.modes.first().is_none_or(|f| m <= *f));
        let mut modes = Modes::with_capacity(self.modes.len() + 1);
        modes.push(m);
        modes.extend_from_slice(&self.modes);
        PbwMonomial { weight: self.weight + m.depth, modes }
    }

    /// Commutative image in the jet variables.
    pub fn to_jet(&self) -> JetMonomial {
        JetMonomial::from_vars(self.modes.iter().map(|m| Var { basis: m.basis, depth: m.depth }))
    }

    /// Canonical PBW lift of a commutative monomial.
    pub fn from_jet(j: &JetMonomial) -> PbwMonomial {
        let mut modes: Vec<Mode> = j
            .factors()
            .iter()
            .flat_map(|(v, e)| std::iter::repeat_n(Mode { depth: v.depth, basis: v.basis }, *e as usize))
            .collect();
        modes.sort_unstable();
        PbwMonomial::new(modes).expect("sorted")
    }

    /// `[(basis index, mode index)]`.
    pub fn to_pairs(&self) -> Vec<(u32, i64)> {
        self.modes.iter().map(|m| (m.basis, m.index())).collect()
    }
}

impl Serialize for PbwMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

/// A finite linear combination of PBW monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VState {
    field: Field,
    terms: BTreeMap<PbwMonomial, Scalar>,
}

impl VState {
    pub fn zero(field: Field) -> VState {
        VState { field, terms: BTreeMap::new() }
    }

    pub fn vacuum(field: Field) -> VState {
        VState::monomial(field, PbwMonomial::vacuum(), field.one())
    }

    pub fn monomial(field: Field, m: PbwMonomial, c: Scalar) -> VState {
        let mut v = VState::zero(field);
        v.add_term(m, c);
        v
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

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &PbwMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Largest weight present (0 for the zero state).
    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(PbwMonomial::weight).max().unwrap_or(0)
    }

    pub fn max_length(&self) -> usize {
        self.terms.keys().map(PbwMonomial::len).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut w = self.terms.keys().map(PbwMonomial::weight);
        match w.next() {
            None => true,
            Some(first) => w.all(|x| x == first),
        }
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: Scalar) {
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

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &VState, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            match self.terms.get_mut(m) {
                Some(e) => {
                    *e += &(x * c);
                    if e.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(m.clone(), x * c);
                }
            }
        }
    }

    pub fn scaled(&self, c: &Scalar) -> VState {
        let mut out = VState::zero(self.field);
        out.add_scaled(self, c);
        out
    }

    pub fn plus(&self, other: &VState) -> VState {
        let mut out = self.clone();
        out.add_scaled(other, &self.field.one());
        out
    }

    pub fn minus(&self, other: &VState) -> VState {
        let mut out = self.clone();
        out.add_scaled(other, &-self.field.one());
        out
    }

    /// Weight-`w` component.
    pub fn component(&self, w: u32) -> VState {
        VState {
            field: self.field,
            terms: self.terms.iter().filter(|(m, _)| m.weight == w).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Coefficient-wise image under a ring map into another field.
    pub fn map_coefficients(&self, field: Field, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<VState> {
        let mut out = VState::zero(field);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Top PBW-length part in the commutative jet variables.
    pub fn symbol(&self) -> DiffPoly {
        let mut out = DiffPoly::zero(self.field);
        let top = self.max_length();
        for (m, c) in &self.terms {
            if m.len() == top {
                out.add_term(m.to_jet(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for VState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for mode in &m.modes {
                write!(f, "·x{}[-{}]", mode.basis, mode.depth)?;
            }
            f.write_str("|0>")?;
        }
        Ok(())
    }
}

impl Serialize for VState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&(m, c.to_string()))?;
        }
        seq.end()
    }
}

/// A level together with whether it is critical for the ambient algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Level {
    pub value: Scalar,
    pub critical: bool,
}

impl Level {
    pub fn new(spec: &LieAlgebraSpec, value: Scalar) -> Level {
        let critical = value == spec.critical_level();
        Level { value, critical }
    }
}

type ActCache = FxHashMap<(u32, i64), FxHashMap<PbwMonomial, Arc<VState>>>;
type ProdCache = FxHashMap<i64, FxHashMap<PbwMonomial, FxHashMap<PbwMonomial, Arc<VState>>>>;

/// Unordered accumulator; sorted once when finished.
struct Acc {
    field: Field,
    map: FxHashMap<PbwMonomial, Scalar>,
}

impl Acc {
    fn new(field: Field) -> Acc {
        Acc { field, map: FxHashMap::default() }
    }

    fn add_term(&mut self, m: PbwMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.map.get_mut(&m) {
            Some(e) => *e += &c,
            None => {
                self.map.insert(m, c);
            }
        }
    }

    fn add_scaled(&mut self, other: &VState, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let one = c.is_one();
        for (m, x) in &other.terms {
            let t = if one { x.clone() } else { x * c };
            match self.map.get_mut(m) {
                Some(e) => *e += &t,
                None => {
                    self.map.insert(m.clone(), t);
                }
            }
        }
    }

    fn finish(self) -> VState {
        let terms = self.map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        VState { field: self.field, terms }
    }
}

/// `V^k(g)` for a fixed algebra and level, with memoized straightening.
///
/// Caches are shared behind read-write locks, so one module can serve
/// several worker threads; results never depend on evaluation order.
pub struct VacuumModule {
    spec: Arc<LieAlgebraSpec>,
    level: Level,
    act_cache: RwLock<ActCache>,
    prod_cache: RwLock<ProdCache>,
}

impl fmt::Debug for VacuumModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VacuumModule")
            .field("family", &self.spec.family())
            .field("size", &self.spec.size())
            .field("level", &self.level)
            .finish()
    }
}

impl VacuumModule {
    pub fn new(spec: impl Into<Arc<LieAlgebraSpec>>, level: Scalar) -> Result<VacuumModule> {
        let spec = spec.into();
        if level.field() != spec.field() {
            return Err(Error::CharacteristicMismatch {
                left: spec.field().characteristic(),
                right: level.field().characteristic(),
            });
        }
        let level = Level::new(&spec, level);
        Ok(VacuumModule {
            spec,
            level,
            act_cache: RwLock::new(ActCache::default()),
            prod_cache: RwLock::new(ProdCache::default()),
        })
    }

    /// At `k = -h^vee`.
    pub fn critical(spec: impl Into<Arc<LieAlgebraSpec>>) -> Result<VacuumModule> {
        let spec = spec.into();
        let k = spec.critical_level();
        VacuumModule::new(spec, k)
    }

    pub fn spec(&self) -> &LieAlgebraSpec {
        &self.spec
    }

    pub fn shared_spec(&self) -> Arc<LieAlgebraSpec> {
        self.spec.clone()
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn field(&self) -> Field {
        self.spec.field()
    }

    pub fn vacuum(&self) -> VState {
        VState::vacuum(self.field())
    }

    /// `x_{-depth}|0>`.
    pub fn generator(&self, x: usize, depth: u32) -> VState {
        let m = PbwMonomial::vacuum().prepend(Mode::new(x, depth));
        VState::monomial(self.field(), m, self.field().one())
    }

    /// Applies creation modes right to left: `modes[0] modes[1] ... |0>`.
    pub fn word(&self, modes: &[Mode]) -> VState {
        let mut v = self.vacuum();
        for m in modes.iter().rev() {
            v = self.apply_mode(m.basis as usize, m.index(), &v);
        }
        v
    }

    /// `x_n v`, re-straightened.
    pub fn apply_mode(&self, x: usize, n: i64, v: &VState) -> VState {
        self.apply_state(x as u32, n, v)
    }

    fn apply_state(&self, x: u32, n: i64, v: &VState) -> VState {
        let mut out = Acc::new(self.field());
        for (m, c) in &v.terms {
            out.add_scaled(&self.act(x, n, m), c);
        }
        out.finish()
    }

    fn act(&self, x: u32, n: i64, m: &PbwMonomial) -> Arc<VState> {
        let field = self.field();
        if n >= 0 && n > m.weight as i64 {
            return Arc::new(VState::zero(field));
        }
        if n < 0 {
            let new = Mode { depth: (-n) as u32, basis: x };
            if m.modes.first().is_none_or(|f| new <= *f) {
                return Arc::new(VState::monomial(field, m.prepend(new), field.one()));
            }
        } else if m.is_vacuum() {
            return Arc::new(VState::zero(field));
        }
        if let Some(hit) = self.act_cache.read().expect("cache poisoned").get(&(x, n)).and_then(|c| c.get(m)) {
            return hit.clone();
        }

        let first = m.modes[0];
        let rest = m.tail();
        let mut out = Acc::new(field);
        if n < 0 {
            // x_n m1 rest = m1 (x_n rest) + [x, m1]_{n - d1} rest
            for (mono, c) in &self.act(x, n, &rest).terms {
                out.add_term(mono.prepend(first), c.clone());
            }
        } else {
            // x_n m1 rest = m1 (x_n rest) + [x, m1]_{n - d1} rest + n kappa k delta rest
            let inner = self.act(x, n, &rest);
            for (mono, c) in &inner.terms {
                out.add_scaled(&self.act(first.basis, first.index(), mono), c);
            }
            if n == first.depth as i64 {
                let c = self.spec.kappa(x as usize, first.basis as usize) * &self.level.value * field.int(n);
                out.add_term(rest.clone(), c);
            }
        }
        for (z, c) in self.spec.bracket(x as usize, first.basis as usize) {
            out.add_scaled(&self.act(*z as u32, n + first.index(), &rest), c);
        }

        let out = Arc::new(out.finish());
        self.act_cache.write().expect("cache poisoned").entry((x, n)).or_default().insert(m.clone(), out.clone());
        out
    }

    /// `T^(k) v`.
    pub fn translate(&self, k: u32, v: &VState) -> VState {
        let field = self.field();
        let mut out = Acc::new(field);
        if k == 0 {
            return v.clone();
        }
        for (m, c) in &v.terms {
            if m.is_vacuum() {
                continue;
            }
            let len = m.len();
            let mut parts = vec![0u32; len];
            compositions(k, &mut parts, 0, &mut |parts| {
                let mut coeff = c.clone();
                for (mode, &ki) in m.modes.iter().zip(parts.iter()) {
                    coeff *= &binomial(mode.depth as i64 - 1 + ki as i64, ki as u64, field);
                    if coeff.is_zero() {
                        return;
                    }
                }
                let mut s = self.vacuum();
                for (mode, &ki) in m.modes.iter().zip(parts.iter()).rev() {
                    s = self.apply_state(mode.basis, -((mode.depth + ki) as i64), &s);
                }
                out.add_scaled(&s, &coeff);
            });
        }
        out.finish()
    }

    /// `a_(n) b`.
    pub fn nth_product(&self, a: &VState, n: i64, b: &VState) -> VState {
        let mut out = Acc::new(self.field());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_scaled(&self.product(ma, n, mb), &(ca * cb));
            }
        }
        out.finish()
    }

    fn product(&self, a: &PbwMonomial, n: i64, c: &PbwMonomial) -> Arc<VState> {
        let field = self.field();
        if a.is_vacuum() {
            return Arc::new(if n == -1 {
                VState::monomial(field, c.clone(), field.one())
            } else {
                VState::zero(field)
            });
        }
        let (wa, wc) = (a.weight as i64, c.weight as i64);
        if n >= wa + wc {
            return Arc::new(VState::zero(field));
        }
        if let Some(hit) =
            self.prod_cache.read().expect("cache poisoned").get(&n).and_then(|t| t.get(a)).and_then(|t| t.get(c))
        {
            return hit.clone();
        }

        // a = x_{-k-1} a' = (T^(k) x)_(-1) a', and (T^(k) x)_(m) = (-1)^k C(m,k) x_{m-k}
        let first = a.modes[0];
        let x = first.basis;
        let k = (first.depth - 1) as i64;
        let rest = a.tail();
        let sign = if k % 2 == 0 { field.one() } else { -field.one() };
        let mut out = Acc::new(field);
        if rest.is_vacuum() {
            let coeff = binomial(n, k as u64, field) * &sign;
            out.add_scaled(&self.act(x, n - k, c), &coeff);
        } else {
            let wr = rest.weight as i64;
            // sum_{j>=0} C(j+k,k) x_{-1-j-k} (a'_(n+j) c)
            for j in 0..(wr + wc - n).max(0) {
                let inner = self.product(&rest, n + j, c);
                if inner.is_zero() {
                    continue;
                }
                let coeff = binomial(j + k, k as u64, field);
                if coeff.is_zero() {
                    continue;
                }
                for (mono, cm) in &inner.terms {
                    out.add_scaled(&self.act(x, -1 - j - k, mono), &(cm * &coeff));
                }
            }
            // sum_{j>=k} (-1)^k C(j,k) a'_(n-1-j) (x_{j-k} c)
            for j in k..=k + wc {
                let coeff = binomial(j, k as u64, field) * &sign;
                if coeff.is_zero() {
                    continue;
                }
                let inner = self.act(x, j - k, c);
                for (mono, cm) in &inner.terms {
                    out.add_scaled(&self.product(&rest, n - 1 - j, mono), &(cm * &coeff));
                }
            }
        }

        let out = Arc::new(out.finish());
        self.prod_cache
            .write()
            .expect("cache poisoned")
            .entry(n)
            .or_default()
            .entry(a.clone())
            .or_default()
            .insert(c.clone(), out.clone());
        out
    }

    /// LHS minus RHS of the Borcherds identity applied to `c`:
    /// `sum_j C(m,j) (a_(n+j) b)_(m+k-j) c
    ///  - sum_j (-1)^j C(n,j) [a_(m+n-j) (b_(k+j) c) - (-1)^n b_(n+k-j) (a_(m+j) c)]`.
    pub fn borcherds_residual(&self, a: &VState, b: &VState, c: &VState, m: i64, n: i64, k: i64) -> VState {
        let field = self.field();
        let (wa, wb, wc) = (a.max_weight() as i64, b.max_weight() as i64, c.max_weight() as i64);
        let mut out = Acc::new(field);
        let alt = |j: i64| if j.rem_euclid(2) == 0 { field.one() } else { -field.one() };

        for j in 0..(wa + wb - n).max(0) {
            let coeff = binomial(m, j as u64, field);
            if coeff.is_zero() {
                continue;
            }
            let ab = self.nth_product(a, n + j, b);
            out.add_scaled(&self.nth_product(&ab, m + k - j, c), &coeff);
        }
        for j in 0..(wb + wc - k).max(0) {
            let coeff = binomial(n, j as u64, field) * alt(j);
            if coeff.is_zero() {
                continue;
            }
            let bc = self.nth_product(b, k + j, c);
            out.add_scaled(&self.nth_product(a, m + n - j, &bc), &-coeff);
        }
        for j in 0..(wa + wc - m).max(0) {
            let coeff = binomial(n, j as u64, field) * alt(j) * alt(n);
            if coeff.is_zero() {
                continue;
            }
            let ac = self.nth_product(a, m + j, c);
            out.add_scaled(&self.nth_product(b, n + k - j, &ac), &coeff);
        }
        out.finish()
    }

    /// First `(x, n)` with `x_n v != 0`, `0 <= n <= wt(v)`.
    pub fn centrality_witness(&self, v: &VState) -> Option<(usize, i64)> {
        let w = v.max_weight() as i64;
        for n in 0..=w {
            for x in 0..self.spec.dim() {
                if !self.apply_mode(x, n, v).is_zero() {
                    return Some((x, n));
                }
            }
        }
        None
    }

    /// Whether `v` is killed by `g[t]`; modes beyond the weight of `v` lower
    /// it below zero and act trivially, so `0 <= n <= wt(v)` is exhaustive.
    pub fn is_central(&self, v: &VState) -> bool {
        self.centrality_witness(v).is_none()
    }

    /// `(x_{-j})^p |0> - (x^[p])_{-pj} |0>`.
    pub fn pcentre_state(&self, x: usize, j: u32) -> Result<VState> {
        let Field::Prime(p) = self.field() else {
            return Err(Error::Invalid("p-centre states need a prime characteristic".into()));
        };
        let rp = self.spec.restricted_power(x).ok_or_else(|| Error::Invalid("restricted powers missing".into()))?;
        let mut v = self.vacuum();
        for _ in 0..p {
            v = self.apply_mode(x, -(j as i64), &v);
        }
        for (z, c) in rp {
            v.add_term(PbwMonomial::vacuum().prepend(Mode::new(*z, j * p as u32)), -c);
        }
        Ok(v)
    }

    /// Canonical monomials of weight `w`, sorted.
    pub fn weight_basis(&self, w: u32) -> Vec<PbwMonomial> {
        weight_basis(self.spec.dim(), w)
    }

    /// Basis of the weight-`w` centre, as coordinate vectors over
    /// [`VacuumModule::weight_basis`].
    pub fn centre_kernel(&self, w: u32, capacity: usize) -> Result<Vec<Vec<Scalar>>> {
        let basis = self.weight_basis(w);
        if basis.len() > capacity {
            return Err(Error::CapacityExceeded { at: w, needed: basis.len(), cap: capacity });
        }
        let field = self.field();
        let cols = basis.len();
        let mut echelon = Echelon::new(field, cols);
        for n in 0..=w as i64 {
            for x in 0..self.spec.dim() {
                if echelon.is_full() {
                    break;
                }
                let images: Vec<Arc<VState>> = basis.par_iter().map(|m| self.act(x as u32, n, m)).collect();
                let mut rows: BTreeMap<&PbwMonomial, Vec<Scalar>> = BTreeMap::new();
                for (col, img) in images.iter().enumerate() {
                    for (target, c) in &img.terms {
                        rows.entry(target).or_insert_with(|| vec![field.zero(); cols])[col] = c.clone();
                    }
                }
                for row in rows.into_values() {
                    echelon.insert(row);
                }
            }
        }
        Ok(echelon.nullspace())
    }

    /// Per-weight centre dimensions for weights `0..=weight_cap`.
    pub fn centre_dimension(&self, weight_cap: u32, capacity: usize) -> Result<Vec<usize>> {
        (0..=weight_cap).map(|w| Ok(self.centre_kernel(w, capacity)?.len())).collect()
    }

    /// A random state of the given weight with up to `terms` monomials and
    /// coefficients in `{-2, ..., 2}`.
    pub fn random_state<R: Rng>(&self, rng: &mut R, weight: u32, terms: usize) -> VState {
        let basis = self.weight_basis(weight);
        let mut v = VState::zero(self.field());
        for _ in 0..terms {
            let m = basis[rng.gen_range(0..basis.len())].clone();
            let c = rng.gen_range(-2i64..=2);
            v.add_term(m, self.field().int(c));
        }
        v
    }

    /// Number of memoized straightening results.
    pub fn cache_size(&self) -> usize {
        let act: usize = self.act_cache.read().expect("cache poisoned").values().map(|c| c.len()).sum();
        let prod: usize = self.prod_cache.read().expect("cache poisoned").values().flat_map(|t| t.values()).map(|c| c.len()).sum();
        act + prod
    }
}

fn compositions(k: u32, parts: &mut [u32], at: usize, f: &mut impl FnMut(&[u32])) {
    if at + 1 == parts.len() {
        parts[at] = k;
        f(parts);
        return;
    }
    for i in 0..=k {
        parts[at] = i;
        compositions(k - i, parts, at + 1, f);
    }
}

/// Canonical PBW monomials of weight `w` for an algebra of dimension `dim`.
pub fn weight_basis(dim: usize, w: u32) -> Vec<PbwMonomial> {
    fn go(dim: u32, remaining: u32, min: Mode, acc: &mut Vec<Mode>, out: &mut Vec<PbwMonomial>) {
        if remaining == 0 {
            out.push(PbwMonomial::new(acc.clone()).expect("generated in order"));
            return;
        }
        for depth in min.depth..=remaining {
            let start = if depth == min.depth { min.basis } else { 0 };
            for basis in start..dim {
                let m = Mode { depth, basis };
                acc.push(m);
                go(dim, remaining - depth, m, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(dim as u32, w, Mode { depth: 1, basis: 0 }, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `dim V_w` for `w = 0..=d`: coefficients of `prod_n (1 - q^n)^{-dim}`.
pub fn weight_space_dimensions(dim: usize, d: u32) -> Vec<u128> {
    let d = d as usize;
    let mut series = vec![0u128; d + 1];
    series[0] = 1;
    for n in 1..=d {
        for _ in 0..dim {
            // multiply by 1 / (1 - q^n)
            for i in n..=d {
                series[i] += series[i - n];
            }
        }
    }
    series
}
