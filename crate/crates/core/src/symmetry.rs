//! Invariance groups of tables and 2-set-transitivity.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::action;
use crate::ftable::Table;
use crate::tuples::{delta, IndexPair, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("permutation {perm} has degree {found}, expected {expected}")]
    DegreeMismatch {
        perm: Permutation,
        expected: usize,
        found: usize,
    },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("index pair {pair} does not fit degree {degree}")]
    BadPair { pair: IndexPair, degree: usize },
}

/// A subgroup of `S_n`, stored as its sorted list of elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    /// Validates identity, closure under composition and inverses.
    pub fn new(degree: usize, elements: Vec<Permutation>) -> Result<Self, SymmetryError> {
        let group = PermutationGroup::from_elements(degree, elements)?;
        group.validate()?;
        Ok(group)
    }

    fn from_elements(degree: usize, mut elements: Vec<Permutation>) -> Result<Self, SymmetryError> {
        if let Some(p) = elements.iter().find(|p| p.degree() != degree) {
            return Err(SymmetryError::DegreeMismatch {
                perm: p.clone(),
                expected: degree,
                found: p.degree(),
            });
        }
        elements.sort();
        elements.dedup();
        Ok(PermutationGroup { degree, elements })
    }

    pub fn validate(&self) -> Result<(), SymmetryError> {
        if !self.contains(&Permutation::identity(self.degree)) {
            return Err(SymmetryError::NotAGroup("missing identity".into()));
        }
        for p in &self.elements {
            if !self.contains(&p.inverse()) {
                return Err(SymmetryError::NotAGroup(format!("missing inverse of {p}")));
            }
            for q in &self.elements {
                let pq = p.compose(q);
                if !self.contains(&pq) {
                    return Err(SymmetryError::NotAGroup(format!(
                        "{p} ∘ {q} = {pq} is missing"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn symmetric(degree: usize) -> Self {
        PermutationGroup {
            degree,
            elements: Permutation::all(degree).collect(),
        }
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            elements: vec![Permutation::identity(degree)],
        }
    }

    /// The subgroup generated by `generators`.
    pub fn generated_by(degree: usize, generators: &[Permutation]) -> Result<Self, SymmetryError> {
        let mut seen: BTreeSet<Permutation> = BTreeSet::from([Permutation::identity(degree)]);
        let mut frontier: Vec<Permutation> = seen.iter().cloned().collect();
        for g in generators {
            if g.degree() != degree {
                return Err(SymmetryError::DegreeMismatch {
                    perm: g.clone(),
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        while let Some(p) = frontier.pop() {
            for g in generators {
                let q = p.compose(g);
                if seen.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        Ok(PermutationGroup {
            degree,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Orbit of a 2-element subset under the group.
    pub fn pair_orbit(&self, pair: IndexPair) -> BTreeSet<IndexPair> {
        self.elements.iter().map(|s| pair.image(s)).collect()
    }
}

/// `{ σ ∈ S_n : σ̂ maps the domain of f onto itself and f = f ∘ σ̂ }`.
pub fn invariance_group<T: Table + ?Sized>(f: &T) -> PermutationGroup {
    let n = f.arity();
    let len = f.len();
    let mut elements = Vec::new();
    action::for_each_permutation::<()>(f.alphabet(), n, |sigma, pull| {
        let invariant = (0..len).all(|t| match f.value(t) {
            None => true,
            v => f.value(pull[t] as usize) == v,
        });
        if invariant {
            elements.push(sigma.clone());
        }
        ControlFlow::Continue(())
    });
    let group = PermutationGroup {
        degree: n,
        elements,
    };
    debug_assert!(group.validate().is_ok());
    group
}

pub fn is_totally_symmetric<T: Table + ?Sized>(f: &T) -> bool {
    invariance_group(f).order() == (1..=f.arity()).product::<usize>()
}

/// True iff the orbit of `{1,2}` is every 2-element subset of `[n]`.
pub fn is_2_set_transitive(group: &PermutationGroup) -> Result<bool, SymmetryError> {
    let n = group.degree;
    if n < 2 {
        return Err(SymmetryError::DegreeTooSmall(n));
    }
    let seed = IndexPair::new(0, 1).expect("distinct");
    Ok(group.pair_orbit(seed).len() == n * (n - 1) / 2)
}

/// 2-set-transitivity of the invariance group. Arity below 2 has no
/// 2-element subsets and reports `false`.
pub fn is_2_set_transitive_fn<T: Table + ?Sized>(f: &T) -> bool {
    f.arity() >= 2 && is_2_set_transitive(&invariance_group(f)).unwrap_or(false)
}

/// For `σ ∈ S_n` and `I`, returns `(σ̂, J)` with `J = σ⁻¹(I)`,
/// `σ̂ ∘ δ_J = δ_I ∘ σ` and `σ̂(min J) = min I`.
pub fn hat_sigma(
    sigma: &Permutation,
    pair: IndexPair,
) -> Result<(Permutation, IndexPair), SymmetryError> {
    let n = sigma.degree();
    if n < 2 {
        return Err(SymmetryError::DegreeTooSmall(n));
    }
    if !pair.fits(n) {
        return Err(SymmetryError::BadPair { pair, degree: n });
    }
    let inverse = sigma.inverse();
    let j = pair.image(&inverse);
    let delta_i = delta(pair, n).expect("pair fits");
    let delta_j = delta(j, n).expect("pair fits");

    let mut images = vec![usize::MAX; n - 1];
    for i in 0..n {
        let slot = &mut images[delta_j.image(i)];
        let target = delta_i.image(sigma.apply(i));
        assert!(
            *slot == usize::MAX || *slot == target,
            "σ maps the fiber of J onto the fiber of I"
        );
        *slot = target;
    }
    let hat = Permutation::new(images).expect("σ̂ is a bijection");
    assert_eq!(hat.apply(j.min()), pair.min());
    Ok((hat, j))
}
