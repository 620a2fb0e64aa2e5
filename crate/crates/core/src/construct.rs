//! Assembling a function of arity `m + 1` from prescribed identification
//! minors, and the explicit tables built that way whose identification minors
//! are all equivalent although the table is neither 2-set-transitive nor
//! equivalent to an ofo-determined table.
//!
//! Given a support map `g'`, a family `g^I` of `m`-ary tables agreeing with
//! `g = g' ∘ supp` on tuples with fewer than `m` distinct entries, a family of
//! permutations `ρ_I` of `[m]` and a bijection `φ` on the 2-subsets of
//! `[m + 1]`, the assembled table sends `b = a δ_I` to `g^{φ(I)}(a ρ_I)`.
//! In total mode `m = k` and every `b ∈ A^{k+1}` has such a preimage; in
//! partial mode `2 ≤ m ≤ k` and the table lives on `A^{m+1}_=`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::decomp::{DecompError, SuppTable};
use crate::ftable::{FunctionTable, PartialFunctionTable, Table, TableError};
use crate::tuples::{
    apply_index_map, delta, has_repeat, supp, Alphabet, IndexPair, Odometer, Permutation, Symbol,
    Tuple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `m = k`, table on all of `A^{k+1}`.
    Total,
    /// `2 ≤ m ≤ k`, table on `A^{m+1}_=`.
    Partial { m: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpPhiSpec {
    pub domain_size: usize,
    pub codomain_size: usize,
    pub mode: Mode,
    /// `g'`
    pub base: SuppTable,
    /// `g^I`
    pub minors: BTreeMap<IndexPair, FunctionTable>,
    /// `ρ_I`
    pub rhos: BTreeMap<IndexPair, Permutation>,
    /// `φ`
    pub phi: BTreeMap<IndexPair, IndexPair>,
}

impl GpPhiSpec {
    /// Arity `m` of the prescribed minors.
    pub fn base_arity(&self) -> usize {
        match self.mode {
            Mode::Total => self.domain_size,
            Mode::Partial { m } => m,
        }
    }

    /// Arity `m + 1` of the assembled table.
    pub fn arity(&self) -> usize {
        self.base_arity() + 1
    }

    pub fn pairs(&self) -> Vec<IndexPair> {
        IndexPair::all(self.arity())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    Missing {
        what: &'static str,
        pair: IndexPair,
    },
    Extra {
        what: &'static str,
        pair: IndexPair,
    },
    MinorShape {
        pair: IndexPair,
        reason: String,
    },
    RhoDegree {
        pair: IndexPair,
        degree: usize,
    },
    PhiNotBijective {
        image: IndexPair,
    },
    PhiOutOfRange {
        pair: IndexPair,
        image: IndexPair,
    },
    MinorDisagrees {
        pair: IndexPair,
        tuple: Tuple,
        expected: Symbol,
        found: Symbol,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "{s}"),
            Violation::Missing { what, pair } => write!(f, "{what} missing for {pair}"),
            Violation::Extra { what, pair } => write!(
                f,
                "{what} given for {pair}, which is not a pair of positions"
            ),
            Violation::MinorShape { pair, reason } => write!(f, "g^{pair}: {reason}"),
            Violation::RhoDegree { pair, degree } => {
                write!(f, "rho_{pair} has degree {degree}")
            }
            Violation::PhiNotBijective { image } => write!(f, "phi hits {image} more than once"),
            Violation::PhiOutOfRange { pair, image } => {
                write!(f, "phi({pair}) = {image} is out of range")
            }
            Violation::MinorDisagrees {
                pair,
                tuple,
                expected,
                found,
            } => write!(
                f,
                "g^{pair}{tuple} = {found} but g'(supp{tuple}) = {expected}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("invalid specification: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("assembled value at {0} depends on the chosen preimage")]
    Inconsistent(Tuple),
    #[error("{0}")]
    Parameters(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

/// Lists every broken invariant of `spec`; empty means buildable.
pub fn validate(spec: &GpPhiSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = spec.domain_size;
    let m = spec.base_arity();
    if let Mode::Partial { m } = spec.mode {
        if m < 2 || m > k {
            out.push(Violation::Shape(format!(
                "partial mode needs 2 <= m <= {k}, got m = {m}"
            )));
            return out;
        }
    } else if k < 2 {
        out.push(Violation::Shape(format!(
            "total mode needs k >= 2, got {k}"
        )));
        return out;
    }
    if spec.base.alphabet().size() != k || spec.base.codomain_size() != spec.codomain_size {
        out.push(Violation::Shape("g' has the wrong alphabet".into()));
        return out;
    }
    if spec.base.max_size() < m.min(k) {
        out.push(Violation::Shape(format!(
            "g' covers sets of size at most {}, needs {}",
            spec.base.max_size(),
            m.min(k)
        )));
        return out;
    }
    let pairs: BTreeSet<IndexPair> = spec.pairs().into_iter().collect();
    for (what, keys) in [
        ("g^I", spec.minors.keys().copied().collect::<BTreeSet<_>>()),
        ("rho_I", spec.rhos.keys().copied().collect()),
        ("phi", spec.phi.keys().copied().collect()),
    ] {
        for &pair in pairs.difference(&keys) {
            out.push(Violation::Missing { what, pair });
        }
        for &pair in keys.difference(&pairs) {
            out.push(Violation::Extra { what, pair });
        }
    }
    let mut hit = BTreeSet::new();
    for (&pair, &image) in &spec.phi {
        if !pairs.contains(&image) {
            out.push(Violation::PhiOutOfRange { pair, image });
        } else if !hit.insert(image) {
            out.push(Violation::PhiNotBijective { image });
        }
    }
    for (&pair, rho) in &spec.rhos {
        if rho.degree() != m {
            out.push(Violation::RhoDegree {
                pair,
                degree: rho.degree(),
            });
        }
    }
    let alphabet = Alphabet::new(k).expect("validated by SuppTable");
    for (&pair, g) in &spec.minors {
        if g.domain_size() != k || g.codomain_size() != spec.codomain_size || g.arity() != m {
            out.push(Violation::MinorShape {
                pair,
                reason: format!(
                    "expected arity {m} over {k} symbols into {}, got arity {} over {} into {}",
                    spec.codomain_size,
                    g.arity(),
                    g.domain_size(),
                    g.codomain_size()
                ),
            });
            continue;
        }
        let mut odo = Odometer::new(alphabet, m);
        let mut idx = 0;
        while let Some(a) = odo.next_tuple() {
            let s = supp(a).expect("m >= 2");
            if s.len() < m {
                let expected = spec.base.get(s).expect("validated coverage");
                let found = g.at(idx);
                if found != expected {
                    out.push(Violation::MinorDisagrees {
                        pair,
                        tuple: Tuple::from(a),
                        expected,
                        found,
                    });
                }
            }
            idx += 1;
        }
    }
    out
}

/// The assembled table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Built {
    Total(FunctionTable),
    Partial(PartialFunctionTable),
}

impl Built {
    pub fn total(self) -> Option<FunctionTable> {
        match self {
            Built::Total(f) => Some(f),
            Built::Partial(_) => None,
        }
    }

    pub fn partial(self) -> Option<PartialFunctionTable> {
        match self {
            Built::Partial(f) => Some(f),
            Built::Total(_) => None,
        }
    }
}

/// `g^{φ(I)}(a ρ_I)` for `b = a δ_I`.
fn value_via(spec: &GpPhiSpec, b: &[Symbol], pair: IndexPair) -> Symbol {
    let mut a: Vec<Symbol> = b.to_vec();
    a.remove(pair.max());
    let rho = spec.rhos[&pair].as_index_map();
    let arg = apply_index_map(&a, &rho).expect("degree validated");
    spec.minors[&spec.phi[&pair]].get(&arg)
}

fn preimage_pairs(b: &[Symbol]) -> impl Iterator<Item = IndexPair> + '_ {
    IndexPair::all(b.len())
        .into_iter()
        .filter(move |&p| b[p.min()] == b[p.max()])
}

/// Every domain point at which two preimages `(a, I)` disagree.
pub fn consistency_sweep(spec: &GpPhiSpec) -> Vec<Tuple> {
    if !validate(spec).is_empty() {
        return Vec::new();
    }
    let alphabet = Alphabet::new(spec.domain_size).expect("validated");
    let mut bad = Vec::new();
    let mut odo = Odometer::new(alphabet, spec.arity());
    while let Some(b) = odo.next_tuple() {
        let mut values = preimage_pairs(b).map(|p| value_via(spec, b, p));
        if let Some(first) = values.next() {
            if values.any(|v| v != first) {
                bad.push(Tuple::from(b));
            }
        }
    }
    bad
}

pub fn build(spec: &GpPhiSpec) -> Result<Built, ConstructError> {
    let violations = validate(spec);
    if !violations.is_empty() {
        return Err(ConstructError::Invalid(violations));
    }
    if cfg!(debug_assertions) {
        if let Some(t) = consistency_sweep(spec).into_iter().next() {
            return Err(ConstructError::Inconsistent(t));
        }
    }
    let (k, b, n) = (spec.domain_size, spec.codomain_size, spec.arity());
    let alphabet = Alphabet::new(k).expect("validated");
    let mut values = Vec::new();
    let mut odo = Odometer::new(alphabet, n);
    while let Some(t) = odo.next_tuple() {
        values.push(preimage_pairs(t).next().map(|p| value_via(spec, t, p)));
    }
    match spec.mode {
        Mode::Total => {
            let values = values
                .into_iter()
                .map(|v| v.expect("n > k forces a repeat"))
                .collect();
            Ok(Built::Total(FunctionTable::new(k, b, n, values)?))
        }
        Mode::Partial { .. } => Ok(Built::Partial(PartialFunctionTable::new(k, b, n, values)?)),
    }
}

/// `d_I = (1, .., m) ρ'_I δ_I` with `ρ'_I(p) = p − min I + 1 (mod m)`,
/// values in `1..=m` (stored 0-based). The only repeated symbol is the first
/// one, at exactly the positions of `I`.
pub fn d_tuple(m: usize, pair: IndexPair) -> Result<Tuple, ConstructError> {
    if m < 2 {
        return Err(ConstructError::Parameters(format!(
            "d_I needs m >= 2, got {m}"
        )));
    }
    let d = delta(pair, m + 1).map_err(TableError::from)?;
    let i = pair.min();
    let shifted: Vec<Symbol> = (0..m).map(|p| ((p + m - i) % m) as Symbol).collect();
    let t = apply_index_map(&shifted, &d).expect("lengths match");
    debug_assert!((0..=m).all(|p| (t[p] == 0) == pair.contains(p)));
    Ok(t)
}

fn check_alpha_beta(b: usize, alpha: Symbol, beta: Symbol) -> Result<(), ConstructError> {
    if alpha == beta {
        return Err(ConstructError::Parameters(
            "alpha and beta must differ".into(),
        ));
    }
    if alpha as usize >= b || beta as usize >= b {
        return Err(ConstructError::Parameters(format!(
            "alpha and beta must be below the codomain size {b}"
        )));
    }
    Ok(())
}

/// The spec behind [`prop4_partial_function`]: constant `g' = β`, every
/// `g^I = h` with `h(a) = α` only at `a = (1, .., m)`, `ρ_I` the rotation
/// `(i, i+1, .., m, 1, .., i−1)` for `i = min I`, and `φ = id`.
pub fn prop4_partial_spec(
    k: usize,
    m: usize,
    b: usize,
    alpha: Symbol,
    beta: Symbol,
) -> Result<GpPhiSpec, ConstructError> {
    if m < 2 || m > k {
        return Err(ConstructError::Parameters(format!(
            "need 2 <= m <= k, got m = {m}, k = {k}"
        )));
    }
    check_alpha_beta(b, alpha, beta)?;
    let mode = if m == k {
        Mode::Total
    } else {
        Mode::Partial { m }
    };
    let staircase: Vec<Symbol> = (0..m as Symbol).collect();
    let h = FunctionTable::from_fn(k, b, m, |a| {
        if a == staircase.as_slice() {
            alpha
        } else {
            beta
        }
    })?;
    let pairs = IndexPair::all(m + 1);
    let rotation =
        |i: usize| Permutation::new((0..m).map(|p| (p + i) % m).collect()).expect("rotation");
    Ok(GpPhiSpec {
        domain_size: k,
        codomain_size: b,
        mode,
        base: SuppTable::constant(k, b, m, beta)?,
        minors: pairs.iter().map(|&p| (p, h.clone())).collect(),
        rhos: pairs.iter().map(|&p| (p, rotation(p.min()))).collect(),
        phi: pairs.iter().map(|&p| (p, p)).collect(),
    })
}

pub fn prop4_spec(
    k: usize,
    b: usize,
    alpha: Symbol,
    beta: Symbol,
) -> Result<GpPhiSpec, ConstructError> {
    if k < 2 {
        return Err(ConstructError::Parameters(format!("need k >= 2, got {k}")));
    }
    prop4_partial_spec(k, k, b, alpha, beta)
}

/// The `(k+1)`-ary table equal to `α` exactly at the tuples `d_I`.
pub fn prop4_function(
    k: usize,
    b: usize,
    alpha: Symbol,
    beta: Symbol,
) -> Result<FunctionTable, ConstructError> {
    let spec = prop4_spec(k, b, alpha, beta)?;
    Ok(build(&spec)?.total().expect("total mode"))
}

/// The partial analogue on `A^{m+1}_=`.
pub fn prop4_partial_function(
    k: usize,
    m: usize,
    b: usize,
    alpha: Symbol,
    beta: Symbol,
) -> Result<PartialFunctionTable, ConstructError> {
    let mut spec = prop4_partial_spec(k, m, b, alpha, beta)?;
    spec.mode = Mode::Partial { m };
    Ok(build(&spec)?.partial().expect("partial mode"))
}

/// Positions where a table takes the value `alpha`, as tuples.
pub fn level_set<T: Table + ?Sized>(f: &T, alpha: Symbol) -> BTreeSet<Tuple> {
    let mut out = BTreeSet::new();
    let mut odo = Odometer::new(f.alphabet(), f.arity());
    let mut idx = 0;
    while let Some(t) = odo.next_tuple() {
        if f.value(idx) == Some(alpha) {
            out.insert(Tuple::from(t));
        }
        idx += 1;
    }
    out
}

/// Whether every defined point of a partial-mode table has a repeat.
pub fn lives_on_repeats(f: &PartialFunctionTable) -> bool {
    let mut odo = Odometer::new(f.alphabet(), f.arity());
    let mut idx = 0;
    while let Some(t) = odo.next_tuple() {
        if f.is_defined(idx) != has_repeat(t) {
            return false;
        }
        idx += 1;
    }
    true
}
