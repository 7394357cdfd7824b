//! Segal-Sugawara vectors: the quadratic Casimir vector in every type and the
//! column-determinant family for `gl_N`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{self, InvariantKind};
use crate::liealg::{build_classical, Family, LieAlgebraSpec};
use crate::report::Check;
use crate::scalars::{binomial, reduce_rational, Field, Scalar};
use crate::vacuum::{Mode, VState, VacuumModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Casimir,
    Cdet,
}

/// A list of central vectors `S_{i,-1}` with everything needed to re-verify
/// them independently.
#[derive(Clone, Debug, Serialize)]
pub struct SSFamily {
    pub family: Family,
    pub size: usize,
    pub characteristic: Field,
    pub level: Scalar,
    pub provenance: Provenance,
    /// Built over `Q` and reduced.
    pub reduced: bool,
    /// Weights `d_i`.
    pub weights: Vec<u32>,
    pub vectors: Vec<VState>,
    /// `symbol(S_{i,-1}) = c_i P_{i,-1}`; `None` when not proportional.
    pub normalization: Vec<Option<Scalar>>,
    pub preimage: Option<Vec<VState>>,
}

impl SSFamily {
    /// `S_{i,-j} = T^(j-1) S_{i,-1}` (`i` 0-based here).
    pub fn derived(&self, module: &VacuumModule, i: usize, j: u32) -> VState {
        module.translate(j - 1, &self.vectors[i])
    }
}

/// `(1/2) sum_a x_{a,-1} x^a_{-1} |0>` with `{x^a}` the form-dual basis.
pub fn casimir_vector(module: &VacuumModule) -> Result<VState> {
    let spec = module.spec();
    let field = spec.field();
    let dual = spec.dual_basis()?;
    let half = field.int(2).inv()?;
    let mut s = VState::zero(field);
    for (a, xa) in dual.iter().enumerate() {
        for (c, coeff) in xa.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            s.add_scaled(&module.word(&[Mode::new(a, 1), Mode::new(c, 1)]), &(coeff * &half));
        }
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Letter {
    Tau,
    /// `E_ij[-m]`, 0-based indices.
    E(u32, u32, u32),
}

/// `E`-letters followed by `tau^r`.
type Normal = (Vec<(u32, u32, u32)>, u32);

/// Appends one letter to normally ordered words, moving `tau` to the right
/// with `tau^r E[-m] = sum_k C(r,k) m(m+1)...(m+k-1) E[-m-k] tau^{r-k}`.
fn append(field: Field, words: &BTreeMap<Normal, Scalar>, letter: Letter) -> BTreeMap<Normal, Scalar> {
    let mut out: BTreeMap<Normal, Scalar> = BTreeMap::new();
    let mut add = |k: Normal, c: Scalar| {
        if c.is_zero() {
            return;
        }
        let e = out.entry(k).or_insert_with(|| field.zero());
        *e += &c;
    };
    for ((es, r), c) in words {
        match letter {
            Letter::Tau => add((es.clone(), r + 1), c.clone()),
            Letter::E(i, j, m) => {
                let mut rising = field.one();
                for k in 0..=*r {
                    if k > 0 {
                        rising *= &field.int((m + k - 1) as i64);
                    }
                    let coeff = binomial(*r as i64, k as u64, field) * &rising;
                    let mut w = es.clone();
                    w.push((i, j, m + k));
                    add((w, r - k), c * &coeff);
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn go(k: usize, perm: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, bool)>) {
        if k == perm.len() {
            let mut odd = false;
            for i in 0..perm.len() {
                for j in i + 1..perm.len() {
                    if perm[i] > perm[j] {
                        odd = !odd;
                    }
                }
            }
            out.push((perm.clone(), odd));
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            go(k + 1, perm, out);
            perm.swap(k, i);
        }
    }
    go(0, &mut perm, &mut out);
    out.sort();
    out
}

/// `S_1, ..., S_N` in `V^{-N}(gl_N)` from the column determinant of
/// `tau + E[-1]`.
pub fn molev_cdet(n: usize, field: Field) -> Result<Vec<VState>> {
    let spec = build_classical(Family::Gl, n, field)?;
    let module = VacuumModule::critical(spec)?;
    cdet_vectors(&module)
}

fn cdet_vectors(module: &VacuumModule) -> Result<Vec<VState>> {
    let spec = module.spec();
    let n = spec.size();
    let field = spec.field();
    let mut total: BTreeMap<Normal, Scalar> = BTreeMap::new();
    for (sigma, odd) in permutations(n) {
        // A_{sigma(1) 1} A_{sigma(2) 2} ... A_{sigma(N) N}
        let mut words: BTreeMap<Normal, Scalar> = BTreeMap::new();
        words.insert((Vec::new(), 0), if odd { -field.one() } else { field.one() });
        for (col, &row) in sigma.iter().enumerate() {
            let mut next = append(field, &words, Letter::E(row as u32, col as u32, 1));
            if row == col {
                for (k, c) in append(field, &words, Letter::Tau) {
                    let e = next.entry(k).or_insert_with(|| field.zero());
                    *e += &c;
                }
            }
            next.retain(|_, c| !c.is_zero());
            words = next;
        }
        for (k, c) in words {
            let e = total.entry(k).or_insert_with(|| field.zero());
            *e += &c;
        }
    }
    let mut out = vec![VState::zero(field); n];
    for ((es, r), c) in total {
        if c.is_zero() || r as usize >= n {
            continue;
        }
        let i = n - r as usize;
        let modes: Vec<Mode> = es.iter().map(|&(a, b, m)| Mode::new(a as usize * n + b as usize, m)).collect();
        out[i - 1].add_scaled(&module.word(&modes), &c);
    }
    Ok(out)
}

fn normalizations(spec: &LieAlgebraSpec, vectors: &[VState]) -> Result<Vec<Option<Scalar>>> {
    let ps = jets::invariants(spec)?;
    Ok(vectors.iter().zip(&ps).map(|(s, p)| s.symbol().proportionality(p)).collect())
}

fn family_from(module: &VacuumModule, provenance: Provenance, vectors: Vec<VState>) -> Result<SSFamily> {
    let spec = module.spec();
    let kinds = jets::invariant_kinds(spec);
    let weights = kinds.iter().take(vectors.len()).map(|k| k.degree()).collect();
    Ok(SSFamily {
        family: spec.family(),
        size: spec.size(),
        characteristic: spec.field(),
        level: module.level().value.clone(),
        provenance,
        reduced: false,
        weights,
        normalization: normalizations(spec, &vectors)?,
        vectors,
        preimage: None,
    })
}

/// The Casimir family `{S_{1,-1}}` at the module's level.
pub fn casimir_family(module: &VacuumModule) -> Result<SSFamily> {
    let s = casimir_vector(module)?;
    family_from(module, Provenance::Casimir, vec![s])
}

/// The full column-determinant family of `gl_N` at the module's level.
pub fn cdet_family(module: &VacuumModule) -> Result<SSFamily> {
    if module.spec().family() != Family::Gl {
        return Err(Error::UnsupportedFamily(format!("cdet needs gl, got {}", module.spec().family())));
    }
    let vectors = cdet_vectors(module)?;
    family_from(module, Provenance::Cdet, vectors)
}

/// The natural family for the module's algebra: cdet for `gl`, Casimir
/// otherwise.
pub fn default_family(module: &VacuumModule) -> Result<SSFamily> {
    match module.spec().family() {
        Family::Gl => cdet_family(module),
        _ => casimir_family(module),
    }
}

/// Coefficient-wise reduction of a family built over `Q`.
pub fn reduce_family(family: &SSFamily, p: u64) -> Result<SSFamily> {
    if family.characteristic != Field::Rational {
        return Err(Error::Invalid("only families over Q can be reduced".into()));
    }
    let target = Field::prime(p)?;
    let spec = build_classical(family.family, family.size, target)?;
    let level = family.level.as_rational().map(|q| reduce_rational(&q, p)).transpose()?.expect("rational level");
    let mut vectors = Vec::new();
    for v in &family.vectors {
        let mut out = VState::zero(target);
        for (m, c) in v.terms() {
            let q = c.as_rational().expect("rational coefficient");
            let r = reduce_rational(&q, p).map_err(|_| Error::DenominatorDivisibleByP {
                value: format!("{c} at {:?}", m.to_pairs()),
                p,
            })?;
            out.add_term(m.clone(), r);
        }
        vectors.push(out);
    }
    Ok(SSFamily {
        family: family.family,
        size: family.size,
        characteristic: target,
        level,
        provenance: family.provenance,
        reduced: true,
        weights: family.weights.clone(),
        normalization: normalizations(&spec, &vectors)?,
        vectors,
        preimage: Some(family.vectors.clone()),
    })
}

/// Centrality of `S_{i,-j}` and `symbol(S_{i,-j}) = c_i P_{i,-j}` for `j <= max_j`.
pub fn family_checks(family: &SSFamily, module: &VacuumModule, max_j: u32) -> Result<Vec<Check>> {
    checks_with(family, module, |_| max_j)
}

/// As [`family_checks`], for every `S_{i,-j}` of weight `d_i + j - 1 <= weight_cap`.
pub fn family_checks_to_weight(family: &SSFamily, module: &VacuumModule, weight_cap: u32) -> Result<Vec<Check>> {
    checks_with(family, module, |d| (weight_cap + 1).saturating_sub(d))
}

fn checks_with(family: &SSFamily, module: &VacuumModule, max_j: impl Fn(u32) -> u32) -> Result<Vec<Check>> {
    let spec = module.spec();
    let mut checks = Vec::new();
    for (i, s) in family.vectors.iter().enumerate() {
        let c = &family.normalization[i];
        checks.push(Check::from_witness(
            format!("S_{}: symbol proportional to P_{}", i + 1, i + 1),
            c.is_none().then(|| format!("symbol {}", s.symbol().display_with(spec))),
        ));
        for j in 1..=max_j(family.weights[i]) {
            let sj = family.derived(module, i, j);
            let witness = module
                .centrality_witness(&sj)
                .map(|(x, n)| format!("{}_{n} does not kill S_{{{},-{j}}}", spec.label(x), i + 1));
            checks.push(Check::from_witness(format!("S_{{{},-{j}}} central", i + 1), witness));
            if let Some(c) = c {
                let p = jets::p_series(spec, i + 1, j, None)?;
                let sym = sj.symbol();
                let ok = sym.same_terms(&p.scaled(c));
                checks.push(Check::from_witness(
                    format!("S_{{{},-{j}}}: symbol = {c} P_{{{},-{j}}}", i + 1, i + 1),
                    (!ok).then(|| format!("symbol {}", sym.display_with(spec))),
                ));
            }
        }
    }
    Ok(checks)
}

/// Per-weight counts `0..=d` of monomials in the `S_{i,-j}` with exponents
/// below `p` times monomials in the p-centre generators (`dim g` of weight
/// `p j` for each `j >= 1`). In characteristic zero every exponent is allowed
/// and there is no p-centre.
pub fn predicted_centre_dimensions(spec: &LieAlgebraSpec, d: u32) -> Vec<u64> {
    let mut gens = Vec::new();
    for kind in jets::invariant_kinds(spec) {
        let di = match kind {
            InvariantKind::CharPoly(x) | InvariantKind::Pfaffian(x) => x,
        };
        for j in 1.. {
            let w = di + j - 1;
            if w > d {
                break;
            }
            gens.push(w);
        }
    }
    match spec.field() {
        Field::Rational => jets::monomial_counts(&gens, d, None),
        Field::Prime(p) => {
            let restricted = jets::monomial_counts(&gens, d, Some(p as u32));
            let mut pc = Vec::new();
            let mut j = 1u32;
            while (p as u32) * j <= d {
                pc.extend(std::iter::repeat_n(p as u32 * j, spec.dim()));
                j += 1;
            }
            let powers = jets::monomial_counts(&pc, d, None);
            (0..=d as usize).map(|i| (0..=i).map(|j| restricted[j] * powers[i - j]).sum()).collect()
        }
    }
}
