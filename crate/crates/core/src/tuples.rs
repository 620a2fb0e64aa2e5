//! Tuples over a finite alphabet, index maps acting on them, and the
//! order-of-first-occurrence (`ofo`) and support (`supp`) string functions.
//!
//! Symbols and argument positions are stored 0-based. Every `Display`
//! implementation in this module renders them 1-based, so `(0, 0, 1)` prints
//! as `(1,1,2)` and the identity permutation of degree 3 prints as `[1,2,3]`.

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

/// A symbol of a finite alphabet, `0..size`.
pub type Symbol = u8;

/// Largest supported alphabet; supports are stored as 64-bit masks.
pub const MAX_ALPHABET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("alphabet size must be between 1 and {MAX_ALPHABET}, got {0}")]
    BadAlphabet(usize),
    #[error("symbol {symbol} at position {position} is outside an alphabet of size {size}")]
    SymbolOutOfRange {
        symbol: Symbol,
        position: usize,
        size: usize,
    },
    #[error("index {index} is out of range for tuples of length {arity} over {size} symbols")]
    IndexOutOfRange {
        index: usize,
        size: usize,
        arity: usize,
    },
    #[error("expected a tuple of length {expected}, got length {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("{size}^{arity} tuples do not fit in memory")]
    TooLarge { size: usize, arity: usize },
    #[error("invalid index pair {{{a},{b}}} for arity {arity}")]
    BadPair { a: usize, b: usize, arity: usize },
    #[error("the support of the empty tuple is undefined")]
    EmptySupport,
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("index map image {image} is outside 1..={target}")]
    ImageOutOfRange { image: usize, target: usize },
}

/// A finite alphabet `A = {0, .., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, TupleError> {
        if size == 0 || size > MAX_ALPHABET {
            return Err(TupleError::BadAlphabet(size));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    /// Number of tuples of length `arity`, `size^arity`.
    pub fn tuple_count(self, arity: usize) -> Result<usize, TupleError> {
        u32::try_from(arity)
            .ok()
            .and_then(|a| self.0.checked_pow(a))
            .ok_or(TupleError::TooLarge {
                size: self.0,
                arity,
            })
    }

    pub fn check(self, t: &[Symbol]) -> Result<(), TupleError> {
        match t.iter().position(|&s| s as usize >= self.0) {
            Some(position) => Err(TupleError::SymbolOutOfRange {
                symbol: t[position],
                position,
                size: self.0,
            }),
            None => Ok(()),
        }
    }
}

/// A finite sequence of symbols. The empty tuple is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(Vec<Symbol>);

impl Tuple {
    pub fn new(elements: Vec<Symbol>) -> Self {
        Tuple(elements)
    }

    pub fn empty() -> Self {
        Tuple(Vec::new())
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Symbol> {
        self.0
    }

    pub fn concat(&self, other: &[Symbol]) -> Tuple {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Tuple(v)
    }

    pub fn ofo(&self) -> Tuple {
        Tuple(ofo(&self.0))
    }

    pub fn has_repeat(&self) -> bool {
        has_repeat(&self.0)
    }

    /// Renders with 0-based symbols, e.g. `(0,0,1)`.
    pub fn zero_based(&self) -> String {
        render_list('(', ')', self.0.iter().map(|&s| s as usize))
    }
}

impl Deref for Tuple {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Tuple {
    fn from(v: Vec<Symbol>) -> Self {
        Tuple(v)
    }
}

impl From<&[Symbol]> for Tuple {
    fn from(v: &[Symbol]) -> Self {
        Tuple(v.to_vec())
    }
}

impl FromIterator<Symbol> for Tuple {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Tuple(iter.into_iter().collect())
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_list(
            '(',
            ')',
            self.0.iter().map(|&s| s as usize + 1),
        ))
    }
}

fn render_list(open: char, close: char, items: impl Iterator<Item = usize>) -> String {
    let body: Vec<String> = items.map(|i| i.to_string()).collect();
    format!("{open}{}{close}", body.join(","))
}

/// Big-endian index of `t` among all tuples of its length: the first
/// coordinate is the most significant digit.
pub fn encode(t: &[Symbol], alphabet: Alphabet) -> Result<usize, TupleError> {
    alphabet.check(t)?;
    alphabet.tuple_count(t.len())?;
    Ok(encode_unchecked(t, alphabet.size()))
}

#[inline]
pub(crate) fn encode_unchecked(t: &[Symbol], k: usize) -> usize {
    t.iter().fold(0, |acc, &s| acc * k + s as usize)
}

pub fn decode(index: usize, arity: usize, alphabet: Alphabet) -> Result<Tuple, TupleError> {
    let count = alphabet.tuple_count(arity)?;
    if index >= count {
        return Err(TupleError::IndexOutOfRange {
            index,
            size: alphabet.size(),
            arity,
        });
    }
    Ok(Tuple(decode_unchecked(index, arity, alphabet.size())))
}

pub(crate) fn decode_unchecked(mut index: usize, arity: usize, k: usize) -> Vec<Symbol> {
    let mut v = vec![0; arity];
    for slot in v.iter_mut().rev() {
        *slot = (index % k) as Symbol;
        index /= k;
    }
    v
}

/// Steps through `A^n` in encode order without allocating per tuple.
#[derive(Debug, Clone)]
pub struct Odometer {
    k: Symbol,
    digits: Vec<Symbol>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(alphabet: Alphabet, arity: usize) -> Self {
        Odometer {
            k: alphabet.size() as Symbol,
            digits: vec![0; arity],
            started: false,
            done: false,
        }
    }

    /// Advances to the next tuple; returns it, or `None` once exhausted.
    pub fn next_tuple(&mut self) -> Option<&[Symbol]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.k {
                return Some(&self.digits);
            }
            *d = 0;
        }
        self.done = true;
        None
    }
}

/// All tuples of length `arity`, in encode order.
pub fn all_tuples(alphabet: Alphabet, arity: usize) -> impl Iterator<Item = Tuple> {
    let mut odo = Odometer::new(alphabet, arity);
    std::iter::from_fn(move || odo.next_tuple().map(Tuple::from))
}

/// A map `τ: [m] → [n]` between argument positions, stored 0-based.
///
/// It acts on `n`-tuples from the right: `a τ = (a_τ(1), .., a_τ(m))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMap {
    target: usize,
    images: Vec<usize>,
}

impl IndexMap {
    pub fn new(target: usize, images: Vec<usize>) -> Result<Self, TupleError> {
        if let Some(&image) = images.iter().find(|&&i| i >= target) {
            return Err(TupleError::ImageOutOfRange {
                image: image + 1,
                target,
            });
        }
        Ok(IndexMap { target, images })
    }

    pub fn from_one_based(target: usize, images: &[usize]) -> Result<Self, TupleError> {
        if let Some(&image) = images.iter().find(|&&i| i == 0 || i > target) {
            return Err(TupleError::ImageOutOfRange { image, target });
        }
        Ok(IndexMap {
            target,
            images: images.iter().map(|i| i - 1).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        IndexMap {
            target: n,
            images: (0..n).collect(),
        }
    }

    pub fn source_arity(&self) -> usize {
        self.images.len()
    }

    pub fn target_arity(&self) -> usize {
        self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &IndexMap) -> Result<IndexMap, TupleError> {
        if other.target != self.images.len() {
            return Err(TupleError::ArityMismatch {
                expected: self.images.len(),
                found: other.target,
            });
        }
        Ok(IndexMap {
            target: self.target,
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn fiber(&self, j: usize) -> Vec<usize> {
        (0..self.images.len())
            .filter(|&i| self.images[i] == j)
            .collect()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target];
        for &i in &self.images {
            hit[i] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// For every `t ∈ A^n` (by encode index), the encode index of `t τ ∈ A^m`.
    pub fn pullback(&self, alphabet: Alphabet) -> Result<Vec<u32>, TupleError> {
        let count = alphabet.tuple_count(self.target)?;
        alphabet.tuple_count(self.images.len())?;
        let k = alphabet.size();
        let mut out = Vec::with_capacity(count);
        let mut odo = Odometer::new(alphabet, self.target);
        while let Some(t) = odo.next_tuple() {
            let idx = self
                .images
                .iter()
                .fold(0usize, |acc, &i| acc * k + t[i] as usize);
            out.push(idx as u32);
        }
        Ok(out)
    }
}

impl fmt::Display for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_list('[', ']', self.images.iter().map(|i| i + 1)))
    }
}

/// `(t_τ(1), .., t_τ(m))` for `t` of length `n` and `τ: [m] → [n]`.
pub fn apply_index_map(t: &[Symbol], tau: &IndexMap) -> Result<Tuple, TupleError> {
    if t.len() != tau.target {
        return Err(TupleError::ArityMismatch {
            expected: tau.target,
            found: t.len(),
        });
    }
    Ok(tau.images.iter().map(|&i| t[i]).collect())
}

/// A 2-element subset `{lo, hi}` of argument positions, `lo < hi`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPair {
    lo: usize,
    hi: usize,
}

impl IndexPair {
    /// Accepts the two positions in either order.
    pub fn new(a: usize, b: usize) -> Result<Self, TupleError> {
        if a == b {
            return Err(TupleError::BadPair { a, b, arity: 0 });
        }
        Ok(IndexPair {
            lo: a.min(b),
            hi: a.max(b),
        })
    }

    pub fn from_one_based(a: usize, b: usize) -> Result<Self, TupleError> {
        if a == 0 || b == 0 {
            return Err(TupleError::BadPair { a, b, arity: 0 });
        }
        IndexPair::new(a - 1, b - 1)
    }

    pub fn min(self) -> usize {
        self.lo
    }

    pub fn max(self) -> usize {
        self.hi
    }

    pub fn one_based(self) -> [usize; 2] {
        [self.lo + 1, self.hi + 1]
    }

    pub fn contains(self, i: usize) -> bool {
        i == self.lo || i == self.hi
    }

    pub fn fits(self, arity: usize) -> bool {
        self.hi < arity
    }

    /// Image of the set under a permutation.
    pub fn image(self, sigma: &Permutation) -> IndexPair {
        let (a, b) = (sigma.apply(self.lo), sigma.apply(self.hi));
        IndexPair {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    /// All 2-element subsets of `[n]` in lexicographic order.
    pub fn all(n: usize) -> Vec<IndexPair> {
        (0..n)
            .flat_map(|lo| (lo + 1..n).map(move |hi| IndexPair { lo, hi }))
            .collect()
    }

    /// Position of this pair in `IndexPair::all(n)`.
    pub fn rank(self, n: usize) -> usize {
        // pairs with a smaller `lo` come first
        self.lo * n - self.lo * (self.lo + 1) / 2 + (self.hi - self.lo - 1)
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo + 1, self.hi + 1)
    }
}

/// The identification map `δ_I: [n] → [n−1]` that sends `max I` to `min I`
/// and shifts every later position down by one.
pub fn delta(pair: IndexPair, n: usize) -> Result<IndexMap, TupleError> {
    if n < 2 || !pair.fits(n) {
        return Err(TupleError::BadPair {
            a: pair.lo + 1,
            b: pair.hi + 1,
            arity: n,
        });
    }
    let images = (0..n)
        .map(|i| match i.cmp(&pair.hi) {
            std::cmp::Ordering::Less => i,
            std::cmp::Ordering::Equal => pair.lo,
            std::cmp::Ordering::Greater => i - 1,
        })
        .collect();
    Ok(IndexMap {
        target: n - 1,
        images,
    })
}

/// A bijection on `[n]`, one-line notation, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, TupleError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(TupleError::NotAPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self, TupleError> {
        if images.contains(&0) {
            return Err(TupleError::NotAPermutation(images.to_vec()));
        }
        Permutation::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`. Panics if the degrees differ.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn as_index_map(&self) -> IndexMap {
        IndexMap {
            target: self.images.len(),
            images: self.images.clone(),
        }
    }

    /// `t σ = (t_σ(1), .., t_σ(n))`.
    pub fn act(&self, t: &[Symbol]) -> Result<Tuple, TupleError> {
        apply_index_map(t, &self.as_index_map())
    }

    /// Next permutation in lexicographic order of the one-line notation.
    pub fn next_lex(&self) -> Option<Permutation> {
        let mut v = self.images.clone();
        let n = v.len();
        if n < 2 {
            return None;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        Some(Permutation { images: v })
    }

    /// Every permutation of `[n]`, lexicographically, starting at the identity.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        std::iter::successors(Some(Permutation::identity(n)), |p| p.next_lex())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_list('[', ']', self.images.iter().map(|i| i + 1)))
    }
}

/// Keeps only the first occurrence of each element.
pub fn ofo<T: PartialEq + Clone>(s: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(s.len());
    for x in s {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

pub fn has_repeat(t: &[Symbol]) -> bool {
    let mut seen = 0u64;
    for &s in t {
        let bit = 1u64 << s;
        if seen & bit != 0 {
            return true;
        }
        seen |= bit;
    }
    false
}

/// A set of symbols, as a bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolSet(u64);

impl SymbolSet {
    pub fn from_mask(mask: u64) -> Self {
        SymbolSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn insert(&mut self, s: Symbol) {
        self.0 |= 1u64 << s;
    }

    pub fn contains(self, s: Symbol) -> bool {
        self.0 & (1u64 << s) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Symbol> {
        (0..64u8).filter(move |&s| self.contains(s))
    }

    /// Renders with 0-based symbols, e.g. `{0,2}`.
    pub fn zero_based(self) -> String {
        render_list('{', '}', self.iter().map(|s| s as usize))
    }
}

impl FromIterator<Symbol> for SymbolSet {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut set = SymbolSet::default();
        for s in iter {
            set.insert(s);
        }
        set
    }
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_list('{', '}', self.iter().map(|s| s as usize + 1)))
    }
}

/// The set of distinct symbols of a nonempty tuple.
pub fn supp(t: &[Symbol]) -> Result<SymbolSet, TupleError> {
    if t.is_empty() {
        return Err(TupleError::EmptySupport);
    }
    Ok(t.iter().copied().collect())
}

/// `k! / (k - r)!`.
fn arrangements(k: usize, r: usize) -> usize {
    (k - r + 1..=k).product()
}

/// Every repeat-free tuple of length `0..=min(max_len, k)`, each once,
/// ordered by length and then lexicographically.
pub fn enumerate_repeat_free(alphabet: Alphabet, max_len: usize) -> Vec<Tuple> {
    let k = alphabet.size();
    let top = max_len.min(k);
    let mut out = vec![Tuple::empty()];
    let mut layer = vec![Vec::<Symbol>::new()];
    for _ in 0..top {
        let mut next = Vec::with_capacity(layer.len() * k);
        for t in &layer {
            for s in 0..k as Symbol {
                if !t.contains(&s) {
                    let mut u = t.clone();
                    u.push(s);
                    next.push(u);
                }
            }
        }
        out.extend(next.iter().cloned().map(Tuple));
        layer = next;
    }
    out
}

/// Number of repeat-free tuples of length `0..=min(max_len, k)`.
pub fn repeat_free_count(alphabet: Alphabet, max_len: usize) -> usize {
    let k = alphabet.size();
    (0..=max_len.min(k)).map(|r| arrangements(k, r)).sum()
}

/// Position of a repeat-free tuple in the order of [`enumerate_repeat_free`];
/// `None` if it has a repeat or a symbol outside the alphabet.
pub fn repeat_free_rank(t: &[Symbol], alphabet: Alphabet) -> Option<usize> {
    let k = alphabet.size();
    let r = t.len();
    if r > k || alphabet.check(t).is_err() || has_repeat(t) {
        return None;
    }
    let offset: usize = (0..r).map(|j| arrangements(k, j)).sum();
    let mut used = 0u64;
    let mut rank = 0;
    for (p, &s) in t.iter().enumerate() {
        let below = (0..s).filter(|&x| used & (1u64 << x) == 0).count();
        rank += below * arrangements(k - p - 1, r - p - 1);
        used |= 1u64 << s;
    }
    Some(offset + rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: usize) -> Alphabet {
        Alphabet::new(k).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&[0, 0, 0], a(2)).unwrap(), 0);
        assert_eq!(encode(&[1, 0], a(2)).unwrap(), 2);
        assert!(matches!(
            encode(&[0, 2], a(2)),
            Err(TupleError::SymbolOutOfRange { position: 1, .. })
        ));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(0, 3, a(2)).unwrap().as_slice(), &[0, 0, 0]);
        assert_eq!(decode(2, 2, a(2)).unwrap().as_slice(), &[1, 0]);
        assert_eq!(decode(26, 3, a(3)).unwrap().as_slice(), &[2, 2, 2]);
        assert!(decode(27, 3, a(3)).is_err());
    }

    #[test]
    fn encode_decode_roundtrip_small() {
        for k in 1..=3 {
            for n in 0..=4 {
                for (i, t) in all_tuples(a(k), n).enumerate() {
                    assert_eq!(encode(&t, a(k)).unwrap(), i);
                    assert_eq!(decode(i, n, a(k)).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn apply_index_map_examples() {
        let swap = IndexMap::from_one_based(2, &[2, 1]).unwrap();
        assert_eq!(apply_index_map(&[3, 7], &swap).unwrap().as_slice(), &[7, 3]);
        let dup = IndexMap::from_one_based(2, &[1, 2, 2]).unwrap();
        assert_eq!(
            apply_index_map(&[3, 7], &dup).unwrap().as_slice(),
            &[3, 7, 7]
        );
        let d = delta(IndexPair::from_one_based(2, 4).unwrap(), 5).unwrap();
        // (1,2,3,4) in 1-based symbol notation
        let t = apply_index_map(&[0, 1, 2, 3], &d).unwrap();
        assert_eq!(t.to_string(), "(1,2,3,2,4)");
        assert!(apply_index_map(&[0, 1, 2], &d).is_err());
    }

    #[test]
    fn delta_examples() {
        let d = |i, j, n| {
            delta(IndexPair::from_one_based(i, j).unwrap(), n)
                .unwrap()
                .one_based()
        };
        assert_eq!(d(1, 2, 3), vec![1, 1, 2]);
        assert_eq!(d(1, 3, 3), vec![1, 2, 1]);
        assert_eq!(d(2, 4, 5), vec![1, 2, 3, 2, 4]);
        assert!(delta(IndexPair::from_one_based(2, 4).unwrap(), 3).is_err());
    }

    #[test]
    fn delta_fibers() {
        for n in 2..=7 {
            for pair in IndexPair::all(n) {
                let d = delta(pair, n).unwrap();
                assert!(d.is_surjective());
                for j in 0..n - 1 {
                    let fiber = d.fiber(j);
                    if j == pair.min() {
                        assert_eq!(fiber, vec![pair.min(), pair.max()]);
                    } else {
                        assert_eq!(fiber.len(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn ofo_examples() {
        let s = |w: &str| {
            ofo(&w.chars().collect::<Vec<_>>())
                .into_iter()
                .collect::<String>()
        };
        assert_eq!(s("balloon"), "balon");
        assert_eq!(s("kayak"), "kay");
        assert_eq!(s(""), "");
        assert_eq!(ofo(&[0u8, 1, 0, 2]), vec![0, 1, 2]);
    }

    #[test]
    fn supp_examples() {
        assert_eq!(supp(&[0, 1, 0]).unwrap(), [0u8, 1].into_iter().collect());
        assert_eq!(supp(&[4]).unwrap().to_string(), "{5}");
        assert_eq!(supp(&[]), Err(TupleError::EmptySupport));
        for n in 1..=5 {
            for t in all_tuples(a(3), n) {
                assert_eq!(supp(&t.ofo()).unwrap(), supp(&t).unwrap());
            }
        }
    }

    #[test]
    fn repeat_free_enumeration() {
        let got: Vec<String> = enumerate_repeat_free(a(2), 2)
            .iter()
            .map(|t| t.zero_based())
            .collect();
        assert_eq!(got, ["()", "(0)", "(1)", "(0,1)", "(1,0)"]);
        assert_eq!(enumerate_repeat_free(a(3), 3).len(), 1 + 3 + 6 + 6);
        assert_eq!(
            enumerate_repeat_free(a(2), 5),
            enumerate_repeat_free(a(2), 2)
        );
        assert_eq!(repeat_free_count(a(3), 3), 16);
    }

    #[test]
    fn repeat_free_rank_matches_enumeration() {
        for k in 1..=5 {
            for (i, t) in enumerate_repeat_free(a(k), k).iter().enumerate() {
                assert_eq!(repeat_free_rank(t, a(k)), Some(i));
            }
        }
        assert_eq!(repeat_free_rank(&[0, 0], a(2)), None);
    }

    #[test]
    fn permutations_lex_order() {
        let all: Vec<Permutation> = Permutation::all(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all[0].is_identity());
        let p = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(p.to_string(), "[2,3,1]");
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn pair_rank_matches_order() {
        for n in 2..=8 {
            for (i, p) in IndexPair::all(n).into_iter().enumerate() {
                assert_eq!(p.rank(n), i);
            }
        }
    }

    #[test]
    fn pullback_agrees_with_apply() {
        let tau = IndexMap::from_one_based(3, &[3, 1, 1, 2]).unwrap();
        let pull = tau.pullback(a(3)).unwrap();
        for (i, t) in all_tuples(a(3), 3).enumerate() {
            let image = apply_index_map(&t, &tau).unwrap();
            assert_eq!(pull[i] as usize, encode(&image, a(3)).unwrap());
        }
    }
}
