//! Dense function tables `A^n → B`, total and partial, with identification
//! minors, the minor quasi-order and equivalence.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::action;
use crate::tuples::{
    decode_unchecked, encode_unchecked, Alphabet, IndexMap, IndexPair, Odometer, Permutation,
    Symbol, Tuple, TupleError,
};

/// Largest table (number of entries) accepted by the constructors.
pub const MAX_TABLE_LEN: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error("codomain size must be between 1 and 256, got {0}")]
    BadCodomain(usize),
    #[error("arity must be at least {needed}, got {arity}")]
    ArityTooSmall { arity: usize, needed: usize },
    #[error("table has {found} values, expected {expected}")]
    ValueCount { expected: usize, found: usize },
    #[error("value {value} at index {index} is outside a codomain of size {codomain}")]
    ValueOutOfRange {
        index: usize,
        value: usize,
        codomain: usize,
    },
    #[error("table with {0} entries exceeds the size limit")]
    TooLarge(usize),
    #[error("tables have different alphabets: domain {left}/{right}, codomain {left_b}/{right_b}")]
    AlphabetMismatch {
        left: usize,
        right: usize,
        left_b: usize,
        right_b: usize,
    },
    #[error("tables have different arities: {left} and {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("partial table is undefined at {tuple}")]
    Undefined { tuple: Tuple },
}

/// Read access shared by total and partial tables.
pub trait Table {
    fn alphabet(&self) -> Alphabet;
    fn codomain_size(&self) -> usize;
    fn arity(&self) -> usize;
    /// Value at an encode index, `None` where undefined.
    fn value(&self, index: usize) -> Option<Symbol>;

    fn len(&self) -> usize {
        self.alphabet()
            .tuple_count(self.arity())
            .expect("validated on construction")
    }

    fn is_empty(&self) -> bool {
        false
    }

    fn is_total(&self) -> bool {
        (0..self.len()).all(|i| self.value(i).is_some())
    }

    fn defined_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.value(i).is_some()).count()
    }

    fn value_at(&self, t: &[Symbol]) -> Option<Symbol> {
        if t.len() != self.arity() || self.alphabet().check(t).is_err() {
            return None;
        }
        self.value(encode_unchecked(t, self.alphabet().size()))
    }
}

fn check_shape(
    k: usize,
    b: usize,
    n: usize,
    min_arity: usize,
) -> Result<(Alphabet, usize), TableError> {
    let alphabet = Alphabet::new(k)?;
    if b == 0 || b > 256 {
        return Err(TableError::BadCodomain(b));
    }
    if n < min_arity {
        return Err(TableError::ArityTooSmall {
            arity: n,
            needed: min_arity,
        });
    }
    let len = alphabet.tuple_count(n)?;
    if len > MAX_TABLE_LEN {
        return Err(TableError::TooLarge(len));
    }
    Ok((alphabet, len))
}

/// A total function `A^n → B`, values in encode order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionTable {
    alphabet: Alphabet,
    codomain: usize,
    arity: usize,
    values: Vec<Symbol>,
}

impl FunctionTable {
    pub fn new(k: usize, b: usize, n: usize, values: Vec<Symbol>) -> Result<Self, TableError> {
        let (alphabet, len) = check_shape(k, b, n, 1)?;
        if values.len() != len {
            return Err(TableError::ValueCount {
                expected: len,
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|&v| v as usize >= b) {
            return Err(TableError::ValueOutOfRange {
                index,
                value: values[index] as usize,
                codomain: b,
            });
        }
        Ok(FunctionTable {
            alphabet,
            codomain: b,
            arity: n,
            values,
        })
    }

    /// Tabulates `f` over `A^n`; panics if `f` leaves the codomain.
    pub fn from_fn(
        k: usize,
        b: usize,
        n: usize,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self, TableError> {
        let (alphabet, len) = check_shape(k, b, n, 1)?;
        let mut values = Vec::with_capacity(len);
        let mut odo = Odometer::new(alphabet, n);
        while let Some(t) = odo.next_tuple() {
            values.push(f(t));
        }
        FunctionTable::new(k, b, n, values)
    }

    pub fn constant(k: usize, b: usize, n: usize, c: Symbol) -> Result<Self, TableError> {
        FunctionTable::from_fn(k, b, n, |_| c)
    }

    /// The `i`-th projection (0-based), as a function into `A`.
    pub fn projection(k: usize, n: usize, i: usize) -> Result<Self, TableError> {
        if i >= n {
            return Err(TableError::ArityTooSmall {
                arity: n,
                needed: i + 1,
            });
        }
        FunctionTable::from_fn(k, k, n, |t| t[i])
    }

    pub fn domain_size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn values(&self) -> &[Symbol] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Symbol> {
        self.values
    }

    pub fn at(&self, index: usize) -> Symbol {
        self.values[index]
    }

    /// Panics on a tuple of the wrong shape.
    pub fn get(&self, t: &[Symbol]) -> Symbol {
        assert_eq!(t.len(), self.arity, "arity mismatch");
        self.values[encode_unchecked(t, self.alphabet.size())]
    }

    pub fn identification_minor(&self, pair: IndexPair) -> Result<FunctionTable, TableError> {
        identification_minor(self, pair)
    }

    pub fn identification_minors(&self) -> Result<Vec<(IndexPair, FunctionTable)>, TableError> {
        identification_minors(self)
    }

    /// `g ∘ τ̂` for `self = g` of arity `m` and `τ: [m] → [n]`, so that
    /// `(g ∘ τ̂)(t) = g(t τ)` for every `t ∈ A^n`.
    pub fn precompose(&self, tau: &IndexMap) -> Result<FunctionTable, TableError> {
        if tau.source_arity() != self.arity {
            return Err(TableError::ArityMismatch {
                left: tau.source_arity(),
                right: self.arity,
            });
        }
        let (_, _) = check_shape(self.alphabet.size(), self.codomain, tau.target_arity(), 1)?;
        let pull = tau.pullback(self.alphabet)?;
        Ok(FunctionTable {
            alphabet: self.alphabet,
            codomain: self.codomain,
            arity: tau.target_arity(),
            values: pull.iter().map(|&j| self.values[j as usize]).collect(),
        })
    }

    /// Positions (0-based) on which the function actually depends.
    pub fn essential_args(&self) -> BTreeSet<usize> {
        let k = self.alphabet.size();
        let n = self.arity;
        let mut out = BTreeSet::new();
        for i in 0..n {
            let stride = k.pow((n - 1 - i) as u32);
            let depends = (0..self.values.len()).any(|idx| {
                let digit = (idx / stride) % k;
                digit == 0 && (1..k).any(|s| self.values[idx + s * stride] != self.values[idx])
            });
            if depends {
                out.insert(i);
            }
        }
        out
    }

    /// The restriction to `A^n_=`, the tuples with a repeated entry.
    pub fn restrict_to_repeats(&self) -> Result<PartialFunctionTable, TableError> {
        if self.arity < 2 {
            return Err(TableError::ArityTooSmall {
                arity: self.arity,
                needed: 2,
            });
        }
        let mask = action::repeat_mask(self.alphabet, self.arity);
        let values = self
            .values
            .iter()
            .zip(mask.iter())
            .map(|(&v, &rep)| rep.then_some(v))
            .collect();
        Ok(PartialFunctionTable {
            alphabet: self.alphabet,
            codomain: self.codomain,
            arity: self.arity,
            values,
        })
    }
}

impl Table for FunctionTable {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn codomain_size(&self) -> usize {
        self.codomain
    }

    fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    fn value(&self, index: usize) -> Option<Symbol> {
        self.values.get(index).copied()
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn is_total(&self) -> bool {
        true
    }

    fn defined_count(&self) -> usize {
        self.values.len()
    }
}

/// A function defined on a subset `S ⊆ A^n`; undefined entries are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialFunctionTable {
    alphabet: Alphabet,
    codomain: usize,
    arity: usize,
    values: Vec<Option<Symbol>>,
}

impl PartialFunctionTable {
    pub fn new(
        k: usize,
        b: usize,
        n: usize,
        values: Vec<Option<Symbol>>,
    ) -> Result<Self, TableError> {
        let (alphabet, len) = check_shape(k, b, n, 1)?;
        if values.len() != len {
            return Err(TableError::ValueCount {
                expected: len,
                found: values.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| matches!(v, Some(x) if *x as usize >= b))
        {
            return Err(TableError::ValueOutOfRange {
                index,
                value: values[index].unwrap() as usize,
                codomain: b,
            });
        }
        Ok(PartialFunctionTable {
            alphabet,
            codomain: b,
            arity: n,
            values,
        })
    }

    /// Tabulates `f` on `A^n_=`, leaving repeat-free tuples undefined.
    pub fn on_repeats(
        k: usize,
        b: usize,
        n: usize,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self, TableError> {
        let (alphabet, _) = check_shape(k, b, n, 2)?;
        let mask = action::repeat_mask(alphabet, n);
        let mut values = Vec::with_capacity(mask.len());
        let mut odo = Odometer::new(alphabet, n);
        let mut idx = 0;
        while let Some(t) = odo.next_tuple() {
            values.push(mask[idx].then(|| f(t)));
            idx += 1;
        }
        PartialFunctionTable::new(k, b, n, values)
    }

    pub fn domain_size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn values(&self) -> &[Option<Symbol>] {
        &self.values
    }

    pub fn get(&self, t: &[Symbol]) -> Option<Symbol> {
        self.value_at(t)
    }

    pub fn is_defined(&self, index: usize) -> bool {
        self.values[index].is_some()
    }

    /// True when the defined set is exactly `A^n_=`.
    pub fn is_on_repeats(&self) -> bool {
        self.arity >= 2
            && action::repeat_mask(self.alphabet, self.arity)
                .iter()
                .zip(&self.values)
                .all(|(&rep, v)| rep == v.is_some())
    }

    pub fn identification_minor(&self, pair: IndexPair) -> Result<FunctionTable, TableError> {
        identification_minor(self, pair)
    }

    pub fn identification_minors(&self) -> Result<Vec<(IndexPair, FunctionTable)>, TableError> {
        identification_minors(self)
    }

    /// `f ∘ σ̂`: the table `t ↦ f(t σ)`, with the defined set moved along.
    pub fn precompose(&self, sigma: &Permutation) -> Result<PartialFunctionTable, TableError> {
        if sigma.degree() != self.arity {
            return Err(TableError::ArityMismatch {
                left: sigma.degree(),
                right: self.arity,
            });
        }
        let pull = sigma.as_index_map().pullback(self.alphabet)?;
        Ok(PartialFunctionTable {
            alphabet: self.alphabet,
            codomain: self.codomain,
            arity: self.arity,
            values: pull.iter().map(|&j| self.values[j as usize]).collect(),
        })
    }

    /// Total extension filling every undefined entry with `fill`.
    pub fn fill_undefined(&self, fill: Symbol) -> Result<FunctionTable, TableError> {
        FunctionTable::new(
            self.alphabet.size(),
            self.codomain,
            self.arity,
            self.values.iter().map(|v| v.unwrap_or(fill)).collect(),
        )
    }
}

impl Table for PartialFunctionTable {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn codomain_size(&self) -> usize {
        self.codomain
    }

    fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    fn value(&self, index: usize) -> Option<Symbol> {
        self.values.get(index).copied().flatten()
    }

    fn len(&self) -> usize {
        self.values.len()
    }
}

fn undefined_at(index: usize, n: usize, alphabet: Alphabet) -> TableError {
    TableError::Undefined {
        tuple: Tuple::new(decode_unchecked(index, n, alphabet.size())),
    }
}

/// `f_I = f ∘ δ_I`, i.e. `f_I(a) = f(a δ_I)` for every `a ∈ A^{n-1}`.
///
/// For a partial `f` every `a δ_I` must be defined; this always holds on
/// `A^n_=` because `a δ_I` repeats the entry at `min I`.
pub fn identification_minor<T: Table + ?Sized>(
    f: &T,
    pair: IndexPair,
) -> Result<FunctionTable, TableError> {
    let n = f.arity();
    if n < 2 {
        return Err(TableError::ArityTooSmall {
            arity: n,
            needed: 2,
        });
    }
    if !pair.fits(n) {
        return Err(TupleError::BadPair {
            a: pair.min() + 1,
            b: pair.max() + 1,
            arity: n,
        }
        .into());
    }
    let alphabet = f.alphabet();
    let pulls = action::delta_pullbacks(alphabet, n);
    let values = pulls[pair.rank(n)]
        .iter()
        .map(|&j| {
            f.value(j as usize)
                .ok_or_else(|| undefined_at(j as usize, n, alphabet))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FunctionTable {
        alphabet,
        codomain: f.codomain_size(),
        arity: n - 1,
        values,
    })
}

/// All identification minors, in lexicographic order of the pairs.
pub fn identification_minors<T: Table + ?Sized>(
    f: &T,
) -> Result<Vec<(IndexPair, FunctionTable)>, TableError> {
    IndexPair::all(f.arity())
        .into_iter()
        .map(|p| Ok((p, identification_minor(f, p)?)))
        .collect()
}

fn check_alphabets<F: Table + ?Sized, G: Table + ?Sized>(f: &F, g: &G) -> Result<(), TableError> {
    if f.alphabet() != g.alphabet() || f.codomain_size() != g.codomain_size() {
        return Err(TableError::AlphabetMismatch {
            left: f.alphabet().size(),
            right: g.alphabet().size(),
            left_b: f.codomain_size(),
            right_b: g.codomain_size(),
        });
    }
    Ok(())
}

/// Searches, in lexicographic order, for `τ: [m] → [n]` with
/// `f(t) = g(t τ)` for all `t ∈ A^n`, where `f` has arity `n` and `g` arity `m`.
pub fn is_minor_of(f: &FunctionTable, g: &FunctionTable) -> Result<Option<IndexMap>, TableError> {
    check_alphabets(f, g)?;
    let (n, m) = (f.arity, g.arity);
    let k = f.alphabet.size();
    let target = Alphabet::new(n.max(1))?;
    let mut maps = Odometer::new(target, m);
    while let Some(images) = maps.next_tuple() {
        let mut tuples = Odometer::new(f.alphabet, n);
        let mut idx = 0;
        let mut ok = true;
        while let Some(t) = tuples.next_tuple() {
            let j = images
                .iter()
                .fold(0usize, |acc, &i| acc * k + t[i as usize] as usize);
            if g.values[j] != f.values[idx] {
                ok = false;
                break;
            }
            idx += 1;
        }
        if ok {
            let images = images.iter().map(|&i| i as usize).collect();
            return Ok(Some(IndexMap::new(n, images)?));
        }
    }
    Ok(None)
}

/// Lexicographically least `σ ∈ S_n` with `σ̂` mapping the domain of `f`
/// onto the domain of `g` and `f(t) = g(t σ)` on the domain of `f`.
pub fn are_equivalent_same_arity<F, G>(f: &F, g: &G) -> Result<Option<Permutation>, TableError>
where
    F: Table + ?Sized,
    G: Table + ?Sized,
{
    check_alphabets(f, g)?;
    if f.arity() != g.arity() {
        return Err(TableError::ArityMismatch {
            left: f.arity(),
            right: g.arity(),
        });
    }
    if f.defined_count() != g.defined_count() {
        return Ok(None);
    }
    let len = f.len();
    Ok(action::for_each_permutation(
        f.alphabet(),
        f.arity(),
        |sigma, pull| {
            let matches = (0..len).all(|t| match f.value(t) {
                None => true,
                v => g.value(pull[t] as usize) == v,
            });
            if matches {
                ControlFlow::Break(sigma.clone())
            } else {
                ControlFlow::Continue(())
            }
        },
    ))
}

/// Mutual minors; tables of different arity are compared by minor search.
pub fn are_equivalent(f: &FunctionTable, g: &FunctionTable) -> Result<bool, TableError> {
    Ok(is_minor_of(f, g)?.is_some() && is_minor_of(g, f)?.is_some())
}
