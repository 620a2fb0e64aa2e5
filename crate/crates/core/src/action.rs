//! Memoized index arithmetic shared by the table operations: where each
//! tuple of `A^n` lands under every permutation, every identification map
//! and `ofo`. Everything here is keyed by `(k, n)` and immutable once built.

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::ControlFlow;
use std::sync::{Arc, OnceLock, RwLock};

use crate::tuples::{
    delta, has_repeat, ofo, repeat_free_rank, Alphabet, IndexPair, Odometer, Permutation,
};

/// Above this many stored entries the permutation pullbacks are computed on
/// the fly instead of cached.
const PERMUTATION_CACHE_LIMIT: usize = 1 << 21;

type Cache<K, V> = OnceLock<RwLock<HashMap<K, Arc<V>>>>;

fn memo<K, V>(cache: &'static Cache<K, V>, key: K, build: impl FnOnce() -> V) -> Arc<V>
where
    K: Eq + Hash + Copy,
{
    let lock = cache.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = lock.read().unwrap().get(&key) {
        return Arc::clone(v);
    }
    let value = Arc::new(build());
    let mut map = lock.write().unwrap();
    Arc::clone(map.entry(key).or_insert(value))
}

pub(crate) struct PermutationAction {
    pub perms: Vec<Permutation>,
    /// `pullbacks[p][t]` is the index of `t σ_p` for `t ∈ A^n`.
    pub pullbacks: Vec<Vec<u32>>,
}

fn permutation_pullback(sigma: &Permutation, alphabet: Alphabet, n: usize, out: &mut Vec<u32>) {
    let k = alphabet.size();
    out.clear();
    let mut odo = Odometer::new(alphabet, n);
    while let Some(t) = odo.next_tuple() {
        let idx = sigma
            .images()
            .iter()
            .fold(0usize, |acc, &i| acc * k + t[i] as usize);
        out.push(idx as u32);
    }
}

fn permutation_action(alphabet: Alphabet, n: usize) -> Option<Arc<PermutationAction>> {
    static CACHE: Cache<(usize, usize), PermutationAction> = OnceLock::new();
    let count = alphabet.tuple_count(n).ok()?;
    let factorial: usize = (1..=n).product();
    if count.checked_mul(factorial)? > PERMUTATION_CACHE_LIMIT {
        return None;
    }
    Some(memo(&CACHE, (alphabet.size(), n), || {
        let perms: Vec<Permutation> = Permutation::all(n).collect();
        let pullbacks = perms
            .iter()
            .map(|p| {
                let mut v = Vec::with_capacity(count);
                permutation_pullback(p, alphabet, n, &mut v);
                v
            })
            .collect();
        PermutationAction { perms, pullbacks }
    }))
}

/// Visits every `σ ∈ S_n` in lexicographic order together with its pullback
/// on `A^n`, stopping early when `visit` breaks.
pub(crate) fn for_each_permutation<B>(
    alphabet: Alphabet,
    n: usize,
    mut visit: impl FnMut(&Permutation, &[u32]) -> ControlFlow<B>,
) -> Option<B> {
    if let Some(action) = permutation_action(alphabet, n) {
        for (p, pull) in action.perms.iter().zip(&action.pullbacks) {
            if let ControlFlow::Break(b) = visit(p, pull) {
                return Some(b);
            }
        }
        return None;
    }
    let mut buf = Vec::new();
    for p in Permutation::all(n) {
        permutation_pullback(&p, alphabet, n, &mut buf);
        if let ControlFlow::Break(b) = visit(&p, &buf) {
            return Some(b);
        }
    }
    None
}

/// `delta_pullbacks(k, n)[I.rank(n)][a]` is the index in `A^n` of `a δ_I`
/// for `a ∈ A^{n-1}`.
pub(crate) fn delta_pullbacks(alphabet: Alphabet, n: usize) -> Arc<Vec<Vec<u32>>> {
    static CACHE: Cache<(usize, usize), Vec<Vec<u32>>> = OnceLock::new();
    memo(&CACHE, (alphabet.size(), n), || {
        IndexPair::all(n)
            .into_iter()
            .map(|pair| {
                delta(pair, n)
                    .and_then(|d| d.pullback(alphabet))
                    .expect("pair fits arity")
            })
            .collect()
    })
}

/// For every `t ∈ A^n`, the repeat-free rank of `ofo(t)`.
pub(crate) fn ofo_ranks(alphabet: Alphabet, n: usize) -> Arc<Vec<u32>> {
    static CACHE: Cache<(usize, usize), Vec<u32>> = OnceLock::new();
    memo(&CACHE, (alphabet.size(), n), || {
        let mut out = Vec::new();
        let mut odo = Odometer::new(alphabet, n);
        while let Some(t) = odo.next_tuple() {
            let rank = repeat_free_rank(&ofo(t), alphabet).expect("ofo is repeat-free");
            out.push(rank as u32);
        }
        out
    })
}

/// For every `t ∈ A^n`, whether `t` has a repeated entry.
pub(crate) fn repeat_mask(alphabet: Alphabet, n: usize) -> Arc<Vec<bool>> {
    static CACHE: Cache<(usize, usize), Vec<bool>> = OnceLock::new();
    memo(&CACHE, (alphabet.size(), n), || {
        let mut out = Vec::new();
        let mut odo = Odometer::new(alphabet, n);
        while let Some(t) = odo.next_tuple() {
            out.push(has_repeat(t));
        }
        out
    })
}
