//! Factoring tables through `ofo` and `supp`.
//!
//! A table is ofo-determined when it is constant on every fiber of `ofo`
//! (the tuples sharing an order of first occurrence), and supp-determined
//! when it is constant on every fiber of `supp`. The factor maps are
//! [`OfoTable`] (on repeat-free tuples) and [`SuppTable`] (on nonempty sets).

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::action;
use crate::ftable::{identification_minor, FunctionTable, Table, TableError};
use crate::tuples::{
    enumerate_repeat_free, ofo, repeat_free_count, repeat_free_rank, supp, Alphabet, IndexPair,
    Odometer, Permutation, Symbol, SymbolSet, Tuple,
};

/// Largest alphabet for which support tables (indexed by subsets) are built.
pub const MAX_SUPP_ALPHABET: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("factor table covers tuples of length at most {have}, arity {arity} needs {need}")]
    TooShort {
        have: usize,
        need: usize,
        arity: usize,
    },
    #[error("factor table is undefined at {0}")]
    Missing(String),
    #[error("alphabet of size {0} is too large for a support table")]
    AlphabetTooLarge(usize),
    #[error("factor table has {found} entries, expected {expected}")]
    EntryCount { expected: usize, found: usize },
    #[error("value {value} at {key} is outside a codomain of size {codomain}")]
    ValueOutOfRange {
        key: String,
        value: Symbol,
        codomain: usize,
    },
}

/// `f*`: a value for every repeat-free tuple of length `1..=max_len`.
///
/// Entries whose ofo-fiber never meets the decomposed table's domain are
/// filled with symbol 0 and marked unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OfoTable {
    alphabet: Alphabet,
    codomain: usize,
    max_len: usize,
    // indexed by repeat-free rank; slot 0 is the empty tuple and unused
    values: Vec<Symbol>,
    constrained: Vec<bool>,
}

impl OfoTable {
    pub fn from_fn(
        k: usize,
        b: usize,
        max_len: usize,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self, DecompError> {
        let alphabet = Alphabet::new(k).map_err(TableError::from)?;
        let tuples = enumerate_repeat_free(alphabet, max_len);
        let mut values = vec![0; tuples.len()];
        let mut constrained = vec![true; tuples.len()];
        constrained[0] = false;
        for (v, t) in values.iter_mut().zip(&tuples).skip(1) {
            *v = f(t);
            if *v as usize >= b {
                return Err(DecompError::ValueOutOfRange {
                    key: t.zero_based(),
                    value: *v,
                    codomain: b,
                });
            }
        }
        Ok(OfoTable {
            alphabet,
            codomain: b,
            max_len: max_len.min(k),
            values,
            constrained,
        })
    }

    /// Values for the repeat-free tuples of length `1..=max_len`, in the
    /// order of [`enumerate_repeat_free`] (the empty tuple omitted).
    pub fn from_values(
        k: usize,
        b: usize,
        max_len: usize,
        values: &[Symbol],
    ) -> Result<Self, DecompError> {
        let alphabet = Alphabet::new(k).map_err(TableError::from)?;
        let expected = repeat_free_count(alphabet, max_len) - 1;
        if values.len() != expected {
            return Err(DecompError::EntryCount {
                expected,
                found: values.len(),
            });
        }
        OfoTable::from_fn(k, b, max_len, |t| {
            values[repeat_free_rank(t, alphabet).expect("repeat-free") - 1]
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn get(&self, t: &[Symbol]) -> Option<Symbol> {
        if t.is_empty() || t.len() > self.max_len {
            return None;
        }
        repeat_free_rank(t, self.alphabet).map(|r| self.values[r])
    }

    pub fn is_constrained(&self, t: &[Symbol]) -> bool {
        if t.is_empty() || t.len() > self.max_len {
            return false;
        }
        repeat_free_rank(t, self.alphabet).is_some_and(|r| self.constrained[r])
    }

    /// `(tuple, value, constrained)` for every entry, in enumeration order.
    pub fn entries(&self) -> Vec<(Tuple, Symbol, bool)> {
        enumerate_repeat_free(self.alphabet, self.max_len)
            .into_iter()
            .zip(self.values.iter().zip(&self.constrained))
            .skip(1)
            .map(|(t, (&v, &c))| (t, v, c))
            .collect()
    }

    pub fn unconstrained_count(&self) -> usize {
        self.constrained.iter().skip(1).filter(|c| !**c).count()
    }

    fn value_by_rank(&self, r: usize) -> Symbol {
        self.values[r]
    }
}

/// `f*` ∘ `ofo` on `A^n`.
pub fn compose_ofo(f_star: &OfoTable, n: usize) -> Result<FunctionTable, DecompError> {
    let alphabet = f_star.alphabet;
    let need = n.min(alphabet.size());
    if f_star.max_len < need {
        return Err(DecompError::TooShort {
            have: f_star.max_len,
            need,
            arity: n,
        });
    }
    // validates the shape before the rank cache is built
    FunctionTable::constant(alphabet.size(), f_star.codomain, n, 0)?;
    let ranks = action::ofo_ranks(alphabet, n);
    let values = ranks
        .iter()
        .map(|&r| f_star.value_by_rank(r as usize))
        .collect();
    Ok(FunctionTable::new(
        alphabet.size(),
        f_star.codomain,
        n,
        values,
    )?)
}

fn decompose_along<T: Table + ?Sized>(
    f: &T,
    ranks: &[u32],
    pull: Option<&[u32]>,
) -> Option<OfoTable> {
    let alphabet = f.alphabet();
    let max_len = f.arity().min(alphabet.size());
    let count = repeat_free_count(alphabet, max_len);
    let mut values = vec![0; count];
    let mut constrained = vec![false; count];
    for t in 0..f.len() {
        let Some(v) = f.value(t) else { continue };
        let r = match pull {
            Some(p) => ranks[p[t] as usize],
            None => ranks[t],
        } as usize;
        if constrained[r] {
            if values[r] != v {
                return None;
            }
        } else {
            constrained[r] = true;
            values[r] = v;
        }
    }
    Some(OfoTable {
        alphabet,
        codomain: f.codomain_size(),
        max_len,
        values,
        constrained,
    })
}

/// `f*` with `f = f* ∘ ofo` on the domain of `f`, if one exists.
pub fn ofo_decompose<T: Table + ?Sized>(f: &T) -> Option<OfoTable> {
    let ranks = action::ofo_ranks(f.alphabet(), f.arity());
    decompose_along(f, &ranks, None)
}

pub fn is_ofo_determined<T: Table + ?Sized>(f: &T) -> bool {
    ofo_decompose(f).is_some()
}

/// Lexicographically least `σ` (with its `f*`) such that
/// `f(t) = f*(ofo(t σ))` for every `t` in the domain of `f`.
///
/// The domain must be closed under argument permutations (all of `A^n`, or
/// `A^n_=`) for this to express equivalence to an ofo-determined table.
pub fn equiv_to_ofo_determined<T: Table + ?Sized>(f: &T) -> Option<(Permutation, OfoTable)> {
    let ranks = action::ofo_ranks(f.alphabet(), f.arity());
    action::for_each_permutation(
        f.alphabet(),
        f.arity(),
        |sigma, pull| match decompose_along(f, &ranks, Some(pull)) {
            Some(star) => ControlFlow::Break((sigma.clone(), star)),
            None => ControlFlow::Continue(()),
        },
    )
}

/// `f'`: a value for every nonempty subset of `A` with at most `max_size`
/// elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuppTable {
    alphabet: Alphabet,
    codomain: usize,
    max_size: usize,
    values: BTreeMap<SymbolSet, Symbol>,
}

fn subsets(k: usize, max_size: usize) -> impl Iterator<Item = SymbolSet> {
    (1u64..(1u64 << k))
        .filter(move |m| m.count_ones() as usize <= max_size)
        .map(SymbolSet::from_mask)
}

impl SuppTable {
    pub fn from_fn(
        k: usize,
        b: usize,
        max_size: usize,
        f: impl Fn(SymbolSet) -> Symbol,
    ) -> Result<Self, DecompError> {
        let map = subsets(k.min(MAX_SUPP_ALPHABET), max_size)
            .map(|s| (s, f(s)))
            .collect();
        SuppTable::new(k, b, max_size, map)
    }

    pub fn constant(k: usize, b: usize, max_size: usize, c: Symbol) -> Result<Self, DecompError> {
        SuppTable::from_fn(k, b, max_size, |_| c)
    }

    /// Checks that `values` covers exactly the nonempty subsets of size at
    /// most `max_size`.
    pub fn new(
        k: usize,
        b: usize,
        max_size: usize,
        values: BTreeMap<SymbolSet, Symbol>,
    ) -> Result<Self, DecompError> {
        let alphabet = Alphabet::new(k).map_err(TableError::from)?;
        if k > MAX_SUPP_ALPHABET {
            return Err(DecompError::AlphabetTooLarge(k));
        }
        let max_size = max_size.min(k);
        let expected: Vec<SymbolSet> = subsets(k, max_size).collect();
        for s in &expected {
            match values.get(s) {
                None => return Err(DecompError::Missing(s.zero_based())),
                Some(&v) if v as usize >= b => {
                    return Err(DecompError::ValueOutOfRange {
                        key: s.zero_based(),
                        value: v,
                        codomain: b,
                    })
                }
                Some(_) => {}
            }
        }
        if values.len() != expected.len() {
            return Err(DecompError::EntryCount {
                expected: expected.len(),
                found: values.len(),
            });
        }
        Ok(SuppTable {
            alphabet,
            codomain: b,
            max_size,
            values,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn get(&self, s: SymbolSet) -> Option<Symbol> {
        self.values.get(&s).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (SymbolSet, Symbol)> + '_ {
        self.values.iter().map(|(&s, &v)| (s, v))
    }
}

/// `f'` ∘ `supp` on `A^n`.
pub fn compose_supp(f_prime: &SuppTable, n: usize) -> Result<FunctionTable, DecompError> {
    let need = n.min(f_prime.alphabet.size());
    if f_prime.max_size < need {
        return Err(DecompError::TooShort {
            have: f_prime.max_size,
            need,
            arity: n,
        });
    }
    let k = f_prime.alphabet.size();
    Ok(FunctionTable::from_fn(k, f_prime.codomain, n, |t| {
        f_prime.values[&supp(t).expect("n >= 1")]
    })?)
}

/// `f'` with `f = f' ∘ supp`, if one exists.
pub fn supp_decompose(f: &FunctionTable) -> Option<SuppTable> {
    let k = f.alphabet().size();
    if k > MAX_SUPP_ALPHABET {
        return None;
    }
    let mut values: BTreeMap<SymbolSet, Symbol> = BTreeMap::new();
    let mut odo = Odometer::new(f.alphabet(), f.arity());
    let mut idx = 0;
    while let Some(t) = odo.next_tuple() {
        let v = f.at(idx);
        idx += 1;
        let s = supp(t).expect("arity >= 1");
        if *values.entry(s).or_insert(v) != v {
            return None;
        }
    }
    SuppTable::new(k, f.codomain_size(), f.arity(), values).ok()
}

pub fn is_supp_determined(f: &FunctionTable) -> bool {
    supp_decompose(f).is_some()
}

/// Lexicographically least bijection `π` of `[n-1]` with `π(min J) = min I`
/// and `f(a δ_I) = f((a π) δ_J)` for every `a ∈ A^{n-1}`.
pub fn check_pi_ij_condition(
    f: &FunctionTable,
    i: IndexPair,
    j: IndexPair,
) -> Result<Option<Permutation>, TableError> {
    let f_i = identification_minor(f, i)?;
    let f_j = identification_minor(f, j)?;
    let len = f_i.len();
    Ok(action::for_each_permutation(
        f.alphabet(),
        f.arity() - 1,
        |pi, pull| {
            if pi.apply(j.min()) != i.min() {
                return ControlFlow::Continue(());
            }
            if (0..len).all(|a| f_i.at(a) == f_j.at(pull[a] as usize)) {
                ControlFlow::Break(pi.clone())
            } else {
                ControlFlow::Continue(())
            }
        },
    ))
}

/// `ofo` of the `t σ`, exposed for callers that replay `f* ∘ ofo ∘ σ̂`.
pub fn ofo_after(sigma: &Permutation, t: &[Symbol]) -> Tuple {
    Tuple::new(ofo(&sigma.act(t).expect("degree matches").into_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::is_totally_symmetric;
    use crate::tuples::all_tuples;

    fn maj3() -> FunctionTable {
        FunctionTable::from_fn(2, 2, 3, |t| (t.iter().sum::<u8>() >= 2) as u8).unwrap()
    }

    fn pair(i: usize, j: usize) -> IndexPair {
        IndexPair::from_one_based(i, j).unwrap()
    }

    #[test]
    fn compose_ofo_examples() {
        let first = OfoTable::from_fn(2, 2, 3, |t| t[0]).unwrap();
        let f = compose_ofo(&first, 3).unwrap();
        assert_eq!(f, FunctionTable::projection(2, 3, 0).unwrap());

        let c = OfoTable::from_fn(2, 2, 3, |_| 1).unwrap();
        assert_eq!(
            compose_ofo(&c, 3).unwrap(),
            FunctionTable::constant(2, 2, 3, 1).unwrap()
        );

        let star = OfoTable::from_values(2, 2, 2, &[0, 1, 1, 0]).unwrap();
        let f = compose_ofo(&star, 3).unwrap();
        assert_eq!(f.get(&[0, 1, 0]), f.get(&[0, 1, 1]));
        assert_eq!(Some(f.get(&[0, 1, 0])), star.get(&[0, 1]));

        let short = OfoTable::from_fn(3, 2, 1, |_| 0).unwrap();
        assert!(matches!(
            compose_ofo(&short, 3),
            Err(DecompError::TooShort { .. })
        ));
    }

    #[test]
    fn ofo_decompose_examples() {
        for v in 0..16u8 {
            let f = FunctionTable::new(2, 2, 2, (0..4).map(|i| (v >> i) & 1).collect()).unwrap();
            let star = ofo_decompose(&f).expect("ofo is injective on A^2 for k=2");
            assert_eq!(star.unconstrained_count(), 0);
        }
        assert!(ofo_decompose(&maj3()).is_none());
    }

    #[test]
    fn ofo_roundtrip_exhaustive() {
        for k in 1..=3usize {
            let a = Alphabet::new(k).unwrap();
            for n in 1..=4usize {
                let entries = repeat_free_count(a, n) - 1;
                let total = 1u64 << entries;
                for code in 0..total {
                    let vals: Vec<u8> = (0..entries).map(|i| ((code >> i) & 1) as u8).collect();
                    let star = OfoTable::from_values(k, 2, n, &vals).unwrap();
                    let f = compose_ofo(&star, n).unwrap();
                    let back = ofo_decompose(&f).unwrap();
                    for (t, v, c) in back.entries() {
                        if c {
                            assert_eq!(star.get(&t), Some(v));
                        }
                    }
                    assert_eq!(compose_ofo(&back, n).unwrap(), f);
                }
            }
        }
    }

    #[test]
    fn partial_unconstrained_entries() {
        // on A^2_= with k=2 only (0,0) and (1,1) are defined
        let f = FunctionTable::from_fn(2, 2, 2, |t| t[1]).unwrap();
        let star = ofo_decompose(&f.restrict_to_repeats().unwrap()).unwrap();
        assert!(!star.is_constrained(&[0, 1]));
        assert_eq!(star.get(&[0, 1]), Some(0));
        assert!(star.is_constrained(&[1]));
    }

    #[test]
    fn supp_decompose_examples() {
        assert!(supp_decompose(&FunctionTable::constant(3, 2, 3, 1).unwrap()).is_some());
        let any_one = FunctionTable::from_fn(2, 2, 3, |t| t.contains(&1) as u8).unwrap();
        let fp = supp_decompose(&any_one).unwrap();
        assert_eq!(compose_supp(&fp, 3).unwrap(), any_one);
        assert!(supp_decompose(&maj3()).is_none());
    }

    #[test]
    fn supp_determined_tables_are_symmetric() {
        for code in 0..8u8 {
            let fp = SuppTable::from_fn(2, 2, 3, |s| (code >> (s.mask() - 1)) & 1).unwrap();
            let f = compose_supp(&fp, 3).unwrap();
            assert!(is_totally_symmetric(&f));
            assert!(is_ofo_determined(&f));
        }
    }

    #[test]
    fn equiv_to_ofo_examples() {
        let star = OfoTable::from_fn(3, 3, 3, |t| t[t.len() - 1]).unwrap();
        let f = compose_ofo(&star, 3).unwrap();
        let (sigma, _) = equiv_to_ofo_determined(&f).unwrap();
        assert!(sigma.is_identity());

        let rev = Permutation::from_one_based(&[3, 2, 1]).unwrap();
        let g = f.precompose(&rev.as_index_map()).unwrap();
        assert!(!is_ofo_determined(&g));
        let (sigma, g_star) = equiv_to_ofo_determined(&g).unwrap();
        // the least witness need not be `rev` itself
        assert!(sigma <= rev);
        for t in all_tuples(Alphabet::new(3).unwrap(), 3) {
            assert_eq!(Some(g.get(&t)), g_star.get(&ofo_after(&sigma, &t)));
        }
        assert!(equiv_to_ofo_determined(&maj3()).is_none());
    }

    #[test]
    fn pi_ij_examples() {
        let f = maj3();
        for p in IndexPair::all(3) {
            assert!(check_pi_ij_condition(&f, p, p)
                .unwrap()
                .unwrap()
                .is_identity());
        }
        for code in 0..4u8 {
            let fp = SuppTable::from_fn(2, 2, 4, |s| (code >> (s.len() - 1)) & 1).unwrap();
            let f = compose_supp(&fp, 4).unwrap();
            for i in IndexPair::all(4) {
                for j in IndexPair::all(4) {
                    let pi = check_pi_ij_condition(&f, i, j).unwrap().unwrap();
                    assert_eq!(pi.apply(j.min()), i.min());
                }
            }
        }
        let g = FunctionTable::from_fn(2, 2, 3, |t| t[0] & t[1]).unwrap();
        // g_{12} is a projection, g_{13} is a conjunction
        assert!(check_pi_ij_condition(&g, pair(1, 2), pair(1, 3))
            .unwrap()
            .is_none());
    }
}
