//! The unique-identification-minor test, classification, verification
//! suites and the conjecture search.
//!
//! Classification runs every test on `f` and, when `n ≤ k`, also on the
//! restriction `f|_{A^n_=}`, since identification minors only ever read
//! tuples with a repeated entry. For `n > k` the restriction is `f` itself.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::construct::{self, ConstructError};
use crate::decomp::{self, DecompError, OfoTable};
use crate::ftable::{
    are_equivalent_same_arity, identification_minor, identification_minors, FunctionTable,
    PartialFunctionTable, Table, TableError,
};
use crate::symmetry::{self, hat_sigma, invariance_group};
use crate::tuples::{
    all_tuples, delta, ofo, repeat_free_count, Alphabet, IndexPair, Permutation, Symbol,
};

/// Exhaustive enumeration is refused beyond this many tables.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error("arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("{what} needs {size} cases, above the limit of {limit}")]
    Guard {
        what: String,
        size: String,
        limit: u64,
    },
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("{0}")]
    Parameters(String),
}

/// True iff all identification minors of `f` are pairwise equivalent.
pub fn has_uim<T: Table + ?Sized>(f: &T) -> Result<bool, AnalysisError> {
    if f.arity() < 2 {
        return Err(AnalysisError::ArityTooSmall(f.arity()));
    }
    let minors = identification_minors(f)?;
    uim_of_minors(&minors)
}

fn uim_of_minors(minors: &[(IndexPair, FunctionTable)]) -> Result<bool, AnalysisError> {
    let (_, first) = &minors[0];
    for (_, g) in &minors[1..] {
        if g != first && are_equivalent_same_arity(first, g)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Category {
    #[serde(rename = "2ST")]
    TwoSetTransitive,
    #[serde(rename = "OFO-EQ")]
    OfoEquivalent,
    #[serde(rename = "OTHER")]
    Other,
    #[serde(rename = "NOT-UIM")]
    NotUim,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::TwoSetTransitive,
        Category::OfoEquivalent,
        Category::Other,
        Category::NotUim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::TwoSetTransitive => "2ST",
            Category::OfoEquivalent => "OFO-EQ",
            Category::Other => "OTHER",
            Category::NotUim => "NOT-UIM",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Symmetry and ofo tests of a table, shared by the full record and the
/// restricted sub-record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub totally_symmetric: bool,
    pub two_set_transitive: bool,
    pub ofo_determined: bool,
    pub equiv_ofo_determined: bool,
    pub inv_group_order: usize,
}

impl Shape {
    fn of<T: Table + ?Sized>(f: &T) -> Shape {
        let n = f.arity();
        let group = invariance_group(f);
        let ofo_determined = decomp::is_ofo_determined(f);
        Shape {
            totally_symmetric: group.order() == (1..=n).product::<usize>(),
            two_set_transitive: n >= 2 && symmetry::is_2_set_transitive(&group).unwrap_or(false),
            ofo_determined,
            equiv_ofo_determined: ofo_determined || decomp::equiv_to_ofo_determined(f).is_some(),
            inv_group_order: group.order(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub arity: usize,
    pub has_uim: bool,
    #[serde(flatten)]
    pub shape: Shape,
    /// `n = 2`, where a single 2-subset makes transitivity automatic.
    pub degenerate_arity: bool,
    /// Only decided for total tables.
    pub supp_determined: Option<bool>,
    /// Tests on `f|_{A^n_=}`, attached when `n ≤ k`.
    pub restricted: Option<Shape>,
    pub category: Category,
}

impl Classification {
    fn assemble(
        arity: usize,
        has_uim: bool,
        shape: Shape,
        supp: Option<bool>,
        restricted: Option<Shape>,
    ) -> Self {
        let either = |p: fn(&Shape) -> bool| p(&shape) || restricted.as_ref().is_some_and(p);
        let category = if !has_uim {
            Category::NotUim
        } else if either(|s| s.two_set_transitive) {
            Category::TwoSetTransitive
        } else if either(|s| s.equiv_ofo_determined) {
            Category::OfoEquivalent
        } else {
            Category::Other
        };
        Classification {
            arity,
            has_uim,
            shape,
            degenerate_arity: arity == 2,
            supp_determined: supp,
            restricted,
            category,
        }
    }

    /// Tables that a theorem says must have a unique identification minor.
    pub fn uim_by_theorem(&self) -> bool {
        let s = [Some(&self.shape), self.restricted.as_ref()];
        s.iter()
            .flatten()
            .any(|s| s.two_set_transitive || s.equiv_ofo_determined)
    }
}

pub fn classify(f: &FunctionTable) -> Result<Classification, AnalysisError> {
    let n = f.arity();
    let has = has_uim(f)?;
    let restricted = if n <= f.alphabet().size() {
        Some(Shape::of(&f.restrict_to_repeats()?))
    } else {
        None
    };
    Ok(Classification::assemble(
        n,
        has,
        Shape::of(f),
        Some(decomp::is_supp_determined(f)),
        restricted,
    ))
}

/// Classification of a partial table, which must be defined on `A^n_=`.
pub fn classify_partial(f: &PartialFunctionTable) -> Result<Classification, AnalysisError> {
    let has = has_uim(f)?;
    Ok(Classification::assemble(
        f.arity(),
        has,
        Shape::of(f),
        None,
        None,
    ))
}

/// The table whose values are the base-`b` digits of `index`, most
/// significant first.
pub fn table_from_index(
    k: usize,
    b: usize,
    n: usize,
    mut index: u64,
) -> Result<FunctionTable, TableError> {
    let len = Alphabet::new(k)?.tuple_count(n)?;
    let mut values = vec![0; len];
    for v in values.iter_mut().rev() {
        *v = (index % b as u64) as Symbol;
        index /= b as u64;
    }
    FunctionTable::new(k, b, n, values)
}

/// `b^(k^n)` if it fits in a `u64`.
pub fn table_count(k: usize, b: usize, n: usize) -> Option<u64> {
    let len = u32::try_from((k as u64).checked_pow(n as u32)?).ok()?;
    (b as u64).checked_pow(len)
}

fn exhaustive_count(k: usize, b: usize, n: usize, what: &str) -> Result<u64, AnalysisError> {
    match table_count(k, b, n) {
        Some(c) if c <= EXHAUSTIVE_LIMIT => Ok(c),
        c => Err(AnalysisError::Guard {
            what: what.to_string(),
            size: c.map_or_else(|| format!("{b}^({k}^{n})"), |c| c.to_string()),
            limit: EXHAUSTIVE_LIMIT,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchParams {
    pub k: usize,
    pub b: usize,
    pub n: usize,
    #[serde(flatten)]
    pub mode: SearchMode,
}

/// Sampled tables draw each value independently and uniformly from
/// `0..b`, which is a uniform draw of the table index. Sample `s` of seed
/// `seed` reads ChaCha8 seeded by `seed_from_u64(seed)` on stream `s`; each
/// value takes one `next_u64`, rejecting draws at or above the largest
/// multiple of `b`, and keeps the remainder mod `b`.
pub fn sample_table(
    k: usize,
    b: usize,
    n: usize,
    seed: u64,
    sample: u64,
) -> Result<FunctionTable, TableError> {
    let len = Alphabet::new(k)?.tuple_count(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    let values = (0..len)
        .map(|_| uniform_below(&mut rng, b as u64) as Symbol)
        .collect();
    FunctionTable::new(k, b, n, values)
}

fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FlagCounts {
    pub has_uim: u64,
    pub totally_symmetric: u64,
    pub two_set_transitive: u64,
    pub ofo_determined: u64,
    pub equiv_ofo_determined: u64,
    pub supp_determined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Table index in exhaustive mode, sample number in sampled mode.
    pub position: u64,
    pub values: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotFailure {
    pub position: u64,
    /// 1-based.
    pub sigma: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotChecks {
    pub performed: u64,
    pub failures: Vec<SpotFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub parameters: SearchParams,
    pub tables_classified: u64,
    pub categories: BTreeMap<Category, u64>,
    pub flags: FlagCounts,
    /// True when `n > k + 1`, the range of the conjecture.
    pub conjecture_range: bool,
    /// Tables in category OTHER, in position order.
    pub other_witnesses: Vec<Witness>,
    /// OTHER witnesses inside the conjecture range.
    pub potential_counterexamples: u64,
    /// 2ST or OFO-EQ tables without a unique identification minor.
    pub theorem_violations: Vec<u64>,
    pub spot_checks: SpotChecks,
    /// Not part of the reproducible content.
    pub timing: Timing,
}

#[derive(Default)]
struct Tally {
    classified: u64,
    categories: BTreeMap<Category, u64>,
    flags: FlagCounts,
    others: Vec<Witness>,
    violations: Vec<u64>,
}

impl Tally {
    fn add(&mut self, position: u64, f: &FunctionTable) -> Result<(), AnalysisError> {
        let c = classify(f)?;
        self.classified += 1;
        *self.categories.entry(c.category).or_default() += 1;
        let fl = &mut self.flags;
        fl.has_uim += c.has_uim as u64;
        fl.totally_symmetric += c.shape.totally_symmetric as u64;
        fl.two_set_transitive += c.shape.two_set_transitive as u64;
        fl.ofo_determined += c.shape.ofo_determined as u64;
        fl.equiv_ofo_determined += c.shape.equiv_ofo_determined as u64;
        fl.supp_determined += c.supp_determined.unwrap_or(false) as u64;
        if c.category == Category::Other {
            self.others.push(Witness {
                position,
                values: f.values().to_vec(),
            });
        }
        if c.uim_by_theorem() && !c.has_uim {
            self.violations.push(position);
        }
        Ok(())
    }

    /// `other` must cover later positions than `self`.
    fn merge(mut self, other: Tally) -> Tally {
        self.classified += other.classified;
        for (c, v) in other.categories {
            *self.categories.entry(c).or_default() += v;
        }
        let (a, b) = (&mut self.flags, other.flags);
        a.has_uim += b.has_uim;
        a.totally_symmetric += b.totally_symmetric;
        a.two_set_transitive += b.two_set_transitive;
        a.ofo_determined += b.ofo_determined;
        a.equiv_ofo_determined += b.equiv_ofo_determined;
        a.supp_determined += b.supp_determined;
        self.others.extend(other.others);
        self.violations.extend(other.violations);
        self
    }
}

const CHUNK: u64 = 1024;

/// Table at a search position.
type TableSource = dyn Fn(u64) -> Result<FunctionTable, TableError> + Sync;
const SPOT_CHECKS: u64 = 100;

/// Classifies every table (or every sample) in parallel on the current
/// rayon pool. Positions are split into fixed chunks and merged in order,
/// so the report does not depend on the thread count.
pub fn search(params: SearchParams) -> Result<SearchReport, AnalysisError> {
    let SearchParams { k, b, n, mode } = params;
    if n < 2 {
        return Err(AnalysisError::ArityTooSmall(n));
    }
    let start = Instant::now();
    let (total, table_at): (u64, Box<TableSource>) = match mode {
        SearchMode::Exhaustive => (
            exhaustive_count(k, b, n, "exhaustive search")?,
            Box::new(move |i| table_from_index(k, b, n, i)),
        ),
        SearchMode::Sampled { samples, seed } => {
            // surfaces shape errors before the parallel phase
            FunctionTable::constant(k, b, n, 0)?;
            (samples, Box::new(move |s| sample_table(k, b, n, seed, s)))
        }
    };

    let chunks = total.div_ceil(CHUNK);
    let tallies = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::default();
            for pos in c * CHUNK..((c + 1) * CHUNK).min(total) {
                tally.add(pos, &table_at(pos)?)?;
            }
            Ok(tally)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);

    let spot_seed = match mode {
        SearchMode::Exhaustive => 0,
        SearchMode::Sampled { seed, .. } => seed,
    };
    let spot_checks = spot_check(total, spot_seed, &*table_at)?;

    let mut categories = tally.categories;
    for c in Category::ALL {
        categories.entry(c).or_insert(0);
    }
    let conjecture_range = n > k + 1;
    Ok(SearchReport {
        parameters: params,
        tables_classified: tally.classified,
        categories,
        flags: tally.flags,
        conjecture_range,
        potential_counterexamples: if conjecture_range {
            tally.others.len() as u64
        } else {
            0
        },
        other_witnesses: tally.others,
        theorem_violations: tally.violations,
        spot_checks,
        timing: Timing {
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
    })
}

/// Checks that category and UIM status survive `f ↦ f ∘ σ̂` for seeded
/// random `(f, σ)`.
fn spot_check(total: u64, seed: u64, table_at: &TableSource) -> Result<SpotChecks, AnalysisError> {
    let mut failures = Vec::new();
    let mut performed = 0;
    if total == 0 {
        return Ok(SpotChecks {
            performed,
            failures,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    for _ in 0..SPOT_CHECKS {
        let position = uniform_below(&mut rng, total);
        let f = table_at(position)?;
        let n = f.arity();
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            images.swap(i, uniform_below(&mut rng, i as u64 + 1) as usize);
        }
        let sigma = Permutation::new(images).expect("shuffled identity");
        let g = f.precompose(&sigma.as_index_map())?;
        let (cf, cg) = (classify(&f)?, classify(&g)?);
        performed += 1;
        if cf.category != cg.category || cf.has_uim != cg.has_uim {
            failures.push(SpotFailure {
                position,
                sigma: sigma.one_based(),
            });
        }
    }
    Ok(SpotChecks {
        performed,
        failures,
    })
}

pub const SUITES: [&str; 8] = [
    "ofo-identities",
    "lemma-ofodeltaI",
    "prop-ofominor",
    "lemma-hatsigma",
    "prop-suppord",
    "prop-42",
    "prop-52",
    "uim-2st",
];

/// Optional overrides; each suite documents its defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub k: Option<usize>,
    pub b: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// The parameters after defaults were applied.
    pub parameters: BTreeMap<&'static str, usize>,
    pub cases: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

struct Run {
    cases: u64,
    counterexample: Option<String>,
}

impl Run {
    fn new() -> Self {
        Run {
            cases: 0,
            counterexample: None,
        }
    }

    /// Records a case; keeps the first failure and reports whether to stop.
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) -> bool {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
        self.counterexample.is_some()
    }

    fn merge(&mut self, other: Run) {
        self.cases += other.cases;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }
}

/// Descriptions of suites and their default parameters.
///
/// * `ofo-identities` (`k=3`, `n=6`): idempotence on strings of length at
///   most 4, string associativity on triples, band homomorphism on pairs,
///   each part of length at most 4 and total length at most `n`.
/// * `lemma-ofodeltaI` (`k=3`, `n=5`): every alphabet size up to `k` and
///   arity `2..=n`.
/// * `prop-ofominor` (`k=2`, `b=2`, `n=4`): every ofo table, arities `3..=n`.
/// * `lemma-hatsigma` (`n=6`): degrees `2..=n`.
/// * `prop-suppord` (`k=2`, `b=2`, `n=4`): needs `n > k + 1`.
/// * `prop-42` (`b=2`): `k` alone if given, else `k ∈ {2,3,4}`.
/// * `prop-52` (`b=2`): `(k, m)` if both given, else `(3,2)`, `(4,3)`, `(4,2)`.
/// * `uim-2st` (`k=2`, `b=2`, `n=4`): every table of the given shape.
pub fn verify_suite(name: &str, params: SuiteParams) -> Result<SuiteReport, AnalysisError> {
    let mut used = BTreeMap::new();
    let mut get = |key: &'static str, value: Option<usize>, default: usize| {
        let v = value.unwrap_or(default);
        used.insert(key, v);
        v
    };
    let run = match name {
        "ofo-identities" => {
            let (k, n) = (get("k", params.k, 3), get("n", params.n, 6));
            ofo_identities(k, n)?
        }
        "lemma-ofodeltaI" => {
            let (k, n) = (get("k", params.k, 3), get("n", params.n, 5));
            lemma_ofo_delta(k, n)?
        }
        "prop-ofominor" => {
            let (k, b, n) = (
                get("k", params.k, 2),
                get("b", params.b, 2),
                get("n", params.n, 4),
            );
            ofo_minors(k, b, n)?
        }
        "lemma-hatsigma" => lemma_hat_sigma(get("n", params.n, 6))?,
        "prop-suppord" => {
            let (k, b, n) = (
                get("k", params.k, 2),
                get("b", params.b, 2),
                get("n", params.n, 4),
            );
            supp_equivalences(k, b, n)?
        }
        "prop-42" => {
            let b = get("b", params.b, 2);
            let ks = match params.k {
                Some(k) => vec![get("k", Some(k), k)],
                None => vec![2, 3, 4],
            };
            explicit_total(&ks, b)?
        }
        "prop-52" => {
            let b = get("b", params.b, 2);
            let cases = match (params.k, params.m) {
                (Some(k), Some(m)) => vec![(get("k", Some(k), k), get("m", Some(m), m))],
                (None, None) => vec![(3, 2), (4, 3), (4, 2)],
                _ => {
                    return Err(AnalysisError::Parameters(
                        "prop-52 takes both --k and --m or neither".into(),
                    ))
                }
            };
            explicit_partial(&cases, b)?
        }
        "uim-2st" => {
            let (k, b, n) = (
                get("k", params.k, 2),
                get("b", params.b, 2),
                get("n", params.n, 4),
            );
            uim_2st(k, b, n)?
        }
        other => return Err(AnalysisError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        parameters: used,
        cases: run.cases,
        passed: run.counterexample.is_none(),
        counterexample: run.counterexample,
    })
}

fn guard(what: &str, size: u64, limit: u64) -> Result<(), AnalysisError> {
    if size > limit {
        return Err(AnalysisError::Guard {
            what: what.to_string(),
            size: size.to_string(),
            limit,
        });
    }
    Ok(())
}

fn show(t: &[Symbol]) -> String {
    crate::Tuple::new(t.to_vec()).to_string()
}

fn strings_up_to(k: usize, max_len: usize) -> Vec<Vec<Symbol>> {
    let alphabet = Alphabet::new(k).expect("checked");
    (0..=max_len)
        .flat_map(|len| all_tuples(alphabet, len).map(|t| t.into_vec()))
        .collect()
}

fn ofo_identities(k: usize, n: usize) -> Result<Run, AnalysisError> {
    Alphabet::new(k).map_err(TableError::from)?;
    let part = n.min(4);
    guard(
        "ofo-identities",
        (k as u64).saturating_pow(part as u32),
        1 << 12,
    )?;
    let strings = strings_up_to(k, part);
    let cat = |parts: &[&[Symbol]]| parts.concat();
    let mut run = Run::new();
    for u in &strings {
        let once = ofo(u);
        if run.check(ofo(&once) == once, || {
            format!("ofo(ofo(u)) != ofo(u) for u = {}", show(u))
        }) {
            return Ok(run);
        }
    }
    let per_u: Vec<Run> = strings
        .par_iter()
        .map(|u| {
            let mut run = Run::new();
            for v in strings.iter().filter(|v| u.len() + v.len() <= n) {
                let uv = cat(&[u, v]);
                let hom = ofo(&cat(&[&ofo(u), &ofo(v)])) == ofo(&uv);
                if run.check(hom, || {
                    format!(
                        "ofo(ofo(u)ofo(v)) != ofo(uv) for u = {}, v = {}",
                        show(u),
                        show(v)
                    )
                }) {
                    return run;
                }
                for w in strings.iter().filter(|w| uv.len() + w.len() <= n) {
                    let assoc = ofo(&cat(&[u, &ofo(v), w])) == ofo(&cat(&[u, v, w]));
                    if run.check(assoc, || {
                        format!(
                            "ofo(u ofo(v) w) != ofo(uvw) for u = {}, v = {}, w = {}",
                            show(u),
                            show(v),
                            show(w)
                        )
                    }) {
                        return run;
                    }
                }
            }
            run
        })
        .collect();
    for r in per_u {
        run.merge(r);
    }
    Ok(run)
}

fn lemma_ofo_delta(k_max: usize, n_max: usize) -> Result<Run, AnalysisError> {
    Alphabet::new(k_max).map_err(TableError::from)?;
    guard(
        "lemma-ofodeltaI",
        (k_max as u64).saturating_pow(n_max.saturating_sub(1) as u32),
        1 << 22,
    )?;
    let mut run = Run::new();
    for k in 1..=k_max {
        let alphabet = Alphabet::new(k).expect("checked");
        for n in 2..=n_max {
            for pair in IndexPair::all(n) {
                let d = delta(pair, n).expect("fits");
                for t in all_tuples(alphabet, n - 1) {
                    let td = crate::tuples::apply_index_map(&t, &d).expect("arity matches");
                    if run.check(ofo(&t) == ofo(&td), || {
                        format!("k = {k}: ofo{t} != ofo{td} for I = {pair}")
                    }) {
                        return Ok(run);
                    }
                }
            }
        }
    }
    Ok(run)
}

fn all_ofo_tables(k: usize, b: usize, max_len: usize) -> Result<Vec<OfoTable>, AnalysisError> {
    let alphabet = Alphabet::new(k).map_err(TableError::from)?;
    let entries = repeat_free_count(alphabet, max_len) - 1;
    let count = (b as u64).checked_pow(entries as u32).unwrap_or(u64::MAX);
    guard("ofo table enumeration", count, 1 << 20)?;
    (0..count)
        .map(|mut i| {
            let mut values = vec![0; entries];
            for v in values.iter_mut().rev() {
                *v = (i % b as u64) as Symbol;
                i /= b as u64;
            }
            Ok(OfoTable::from_values(k, b, max_len, &values)?)
        })
        .collect()
}

fn ofo_minors(k: usize, b: usize, n_max: usize) -> Result<Run, AnalysisError> {
    let mut run = Run::new();
    let tables = all_ofo_tables(k, b, n_max)?;
    for n in 3..=n_max {
        for star in &tables {
            let f = decomp::compose_ofo(star, n)?;
            let expected = decomp::compose_ofo(star, n - 1)?;
            for (pair, minor) in identification_minors(&f)? {
                if run.check(minor == expected, || {
                    format!(
                        "n = {n}: minor {pair} of f* ∘ ofo differs from f* ∘ ofo on {} arguments",
                        n - 1
                    )
                }) {
                    return Ok(run);
                }
            }
        }
    }
    Ok(run)
}

fn lemma_hat_sigma(n_max: usize) -> Result<Run, AnalysisError> {
    guard("lemma-hatsigma", (1..=n_max as u64).product(), 40320)?;
    let mut run = Run::new();
    for n in 2..=n_max {
        for sigma in Permutation::all(n) {
            for pair in IndexPair::all(n) {
                let (hat, j) = hat_sigma(&sigma, pair).expect("valid input");
                let lhs = hat
                    .as_index_map()
                    .compose(&delta(j, n).expect("fits"))
                    .expect("arity");
                let rhs = delta(pair, n)
                    .expect("fits")
                    .compose(&sigma.as_index_map())
                    .expect("arity");
                let ok = lhs == rhs && hat.apply(j.min()) == pair.min();
                if run.check(ok, || format!("σ = {sigma}, I = {pair}: σ̂ = {hat} fails")) {
                    return Ok(run);
                }
            }
        }
    }
    Ok(run)
}

/// Runs `check` on every table of the given shape, in parallel, reporting
/// the failure at the least index.
fn over_all_tables<F>(
    k: usize,
    b: usize,
    n: usize,
    what: &str,
    check: F,
) -> Result<Run, AnalysisError>
where
    F: Fn(u64, &FunctionTable) -> Result<Option<String>, AnalysisError> + Sync,
{
    let total = exhaustive_count(k, b, n, what)?;
    let chunks = total.div_ceil(CHUNK);
    let runs = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut run = Run::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let f = table_from_index(k, b, n, i)?;
                let failure = check(i, &f)?;
                let stop = run.check(failure.is_none(), || {
                    format!(
                        "table {i} {:?}: {}",
                        f.values(),
                        failure.clone().unwrap_or_default()
                    )
                });
                if stop {
                    break;
                }
            }
            Ok(run)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let mut run = Run::new();
    for r in runs {
        run.merge(r);
    }
    Ok(run)
}

fn supp_equivalences(k: usize, b: usize, n: usize) -> Result<Run, AnalysisError> {
    if n <= k + 1 {
        return Err(AnalysisError::Parameters(format!(
            "prop-suppord needs n > k + 1, got k = {k}, n = {n}"
        )));
    }
    let pairs = IndexPair::all(n);
    over_all_tables(k, b, n, "prop-suppord", |_, f| {
        let group = invariance_group(f);
        let ts = group.order() == (1..=n).product::<usize>();
        let tst = symmetry::is_2_set_transitive(&group).unwrap_or(false);
        let od = decomp::is_ofo_determined(f);
        let sd = decomp::is_supp_determined(f);
        if (ts && od) != sd || (tst && od) != sd {
            return Ok(Some(format!(
                "totally symmetric {ts}, 2-set-transitive {tst}, ofo-determined {od}, supp-determined {sd}"
            )));
        }
        if sd {
            for &i in &pairs {
                for &j in &pairs {
                    if decomp::check_pi_ij_condition(f, i, j)?.is_none() {
                        return Ok(Some(format!("no π with I = {i}, J = {j}")));
                    }
                }
            }
        }
        Ok(None)
    })
}

fn explicit_total(ks: &[usize], b: usize) -> Result<Run, AnalysisError> {
    let mut run = Run::new();
    for &k in ks {
        guard("prop-42", k as u64, 5)?;
        let f = construct::prop4_function(k, b, 1, 0)?;
        let uim = has_uim(&f)?;
        if run.check(uim, || format!("k = {k}: minors are not all equivalent")) {
            break;
        }
        let eq = decomp::equiv_to_ofo_determined(&f);
        if run.check(eq.is_none(), || {
            format!("k = {k}: equivalent to an ofo-determined table")
        }) {
            break;
        }
        if k > 2 {
            let group = invariance_group(&f);
            if run.check(group.is_trivial(), || {
                format!("k = {k}: invariance group has order {}", group.order())
            }) {
                break;
            }
        }
    }
    Ok(run)
}

fn explicit_partial(cases: &[(usize, usize)], b: usize) -> Result<Run, AnalysisError> {
    let mut run = Run::new();
    for &(k, m) in cases {
        guard("prop-52", k as u64, 5)?;
        let f = construct::prop4_partial_function(k, m, b, 1, 0)?;
        let what = |s: &str| format!("k = {k}, m = {m}: {s}");
        if run.check(construct::lives_on_repeats(&f), || {
            what("not defined exactly on repeats")
        }) {
            break;
        }
        let mut minors_ok = true;
        for pair in IndexPair::all(m + 1) {
            let minor = identification_minor(&f, pair)?;
            minors_ok &= decomp::equiv_to_ofo_determined(&minor).is_some();
        }
        if run.check(minors_ok, || {
            what("a minor is not equivalent to an ofo-determined table")
        }) {
            break;
        }
        if run.check(has_uim(&f)?, || what("minors are not all equivalent")) {
            break;
        }
        let eq = decomp::equiv_to_ofo_determined(&f);
        if run.check(eq.is_none(), || {
            what("equivalent to an ofo-determined partial table")
        }) {
            break;
        }
        if m >= 3 {
            let tst = symmetry::is_2_set_transitive(&invariance_group(&f)).unwrap_or(false);
            if run.check(!tst, || what("invariance group is 2-set-transitive")) {
                break;
            }
        }
    }
    Ok(run)
}

fn uim_2st(k: usize, b: usize, n: usize) -> Result<Run, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::ArityTooSmall(n));
    }
    over_all_tables(k, b, n, "uim-2st", |_, f| {
        if symmetry::is_2_set_transitive_fn(f) && !has_uim(f)? {
            return Ok(Some(
                "2-set-transitive without a unique identification minor".into(),
            ));
        }
        Ok(None)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj3() -> FunctionTable {
        FunctionTable::from_fn(2, 2, 3, |t| (t.iter().sum::<u8>() >= 2) as u8).unwrap()
    }

    #[test]
    fn uim_examples() {
        for i in 0..16u64 {
            assert!(has_uim(&table_from_index(2, 2, 2, i).unwrap()).unwrap());
        }
        let and12 = FunctionTable::from_fn(2, 2, 3, |t| t[0] & t[1]).unwrap();
        assert!(!has_uim(&and12).unwrap());
        assert!(has_uim(&construct::prop4_function(3, 2, 1, 0).unwrap()).unwrap());
        assert!(matches!(
            has_uim(&FunctionTable::projection(2, 1, 0).unwrap()),
            Err(AnalysisError::ArityTooSmall(1))
        ));
    }

    #[test]
    fn classification_examples() {
        let c = classify(&maj3()).unwrap();
        assert!(c.has_uim);
        assert_eq!(c.category, Category::TwoSetTransitive);

        let star = OfoTable::from_fn(2, 2, 4, |t| t[0]).unwrap();
        let c = classify(&decomp::compose_ofo(&star, 4).unwrap()).unwrap();
        assert!(c.has_uim);
        assert_eq!(c.category, Category::OfoEquivalent);
        assert!(c.restricted.is_none());

        let c = classify(&construct::prop4_function(3, 2, 1, 0).unwrap()).unwrap();
        assert!(c.has_uim);
        assert_eq!(c.category, Category::Other);
        assert_eq!(c.shape.inv_group_order, 1);

        let and12 = FunctionTable::from_fn(2, 2, 3, |t| t[0] & t[1]).unwrap();
        assert_eq!(classify(&and12).unwrap().category, Category::NotUim);
    }

    #[test]
    fn restriction_is_attached_for_small_arity() {
        let f = FunctionTable::from_fn(3, 2, 3, |t| (t[0] == t[1]) as u8).unwrap();
        let c = classify(&f).unwrap();
        assert!(c.restricted.is_some());
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["category"], c.category.name());
        assert!(json.get("restricted").is_some());
    }

    #[test]
    fn index_decoding_is_big_endian() {
        let f = table_from_index(2, 2, 2, 0b0001).unwrap();
        assert_eq!(f.values(), &[0, 0, 0, 1]);
        let f = table_from_index(2, 3, 1, 5).unwrap();
        assert_eq!(f.values(), &[1, 2]);
        assert_eq!(table_count(2, 2, 4), Some(65536));
        assert_eq!(table_count(3, 2, 4), None);
    }

    #[test]
    fn sampling_is_reproducible_and_in_range() {
        let a = sample_table(3, 3, 3, 7, 11).unwrap();
        assert_eq!(a, sample_table(3, 3, 3, 7, 11).unwrap());
        assert_ne!(a, sample_table(3, 3, 3, 7, 12).unwrap());
        assert!(a.values().iter().all(|&v| v < 3));
    }

    #[test]
    fn small_search_is_consistent() {
        let params = SearchParams {
            k: 2,
            b: 2,
            n: 3,
            mode: SearchMode::Exhaustive,
        };
        let r = search(params).unwrap();
        assert_eq!(r.tables_classified, 256);
        assert_eq!(r.categories.values().sum::<u64>(), 256);
        assert!(r.theorem_violations.is_empty());
        assert!(r.spot_checks.failures.is_empty());
        assert!(!r.conjecture_range);
        // the k = 2 function of the explicit construction lands in a UIM category
        let f = construct::prop4_function(2, 2, 1, 0).unwrap();
        assert_ne!(classify(&f).unwrap().category, Category::NotUim);

        let guarded = search(SearchParams {
            k: 3,
            b: 2,
            n: 4,
            mode: SearchMode::Exhaustive,
        });
        assert!(matches!(guarded, Err(AnalysisError::Guard { .. })));
    }

    #[test]
    fn sampled_search_is_deterministic() {
        let params = SearchParams {
            k: 3,
            b: 2,
            n: 3,
            mode: SearchMode::Sampled {
                samples: 300,
                seed: 5,
            },
        };
        let mut a = search(params).unwrap();
        let mut b = search(params).unwrap();
        a.timing.elapsed_ms = 0;
        b.timing.elapsed_ms = 0;
        assert_eq!(a, b);
    }

    #[test]
    fn quick_suites_pass() {
        for (name, params) in [
            (
                "lemma-ofodeltaI",
                SuiteParams {
                    k: Some(2),
                    n: Some(4),
                    ..Default::default()
                },
            ),
            (
                "prop-ofominor",
                SuiteParams {
                    n: Some(3),
                    ..Default::default()
                },
            ),
            (
                "lemma-hatsigma",
                SuiteParams {
                    n: Some(4),
                    ..Default::default()
                },
            ),
            (
                "prop-42",
                SuiteParams {
                    k: Some(3),
                    ..Default::default()
                },
            ),
            (
                "prop-52",
                SuiteParams {
                    k: Some(3),
                    m: Some(2),
                    ..Default::default()
                },
            ),
            (
                "uim-2st",
                SuiteParams {
                    n: Some(3),
                    ..Default::default()
                },
            ),
            (
                "ofo-identities",
                SuiteParams {
                    k: Some(2),
                    n: Some(4),
                    ..Default::default()
                },
            ),
        ] {
            let r = verify_suite(name, params).unwrap();
            assert!(r.passed, "{name}: {:?}", r.counterexample);
            assert!(r.cases > 0);
        }
        assert!(matches!(
            verify_suite("nope", SuiteParams::default()),
            Err(AnalysisError::UnknownSuite(_))
        ));
        assert!(verify_suite(
            "prop-suppord",
            SuiteParams {
                n: Some(3),
                ..Default::default()
            }
        )
        .is_err());
    }
}
