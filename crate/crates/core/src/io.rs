//! JSON interchange.
//!
//! Function tables are stored as
//! `{"arity":n,"codomain_size":b,"domain_size":k,"values":[...]}` with the
//! values in encode order and 0-based symbols; a partial table writes `null`
//! for every undefined entry. Argument positions (index pairs, permutations)
//! are written 1-based, as everywhere else they are shown to people.
//!
//! Every writer emits canonical JSON: keys sorted, no insignificant
//! whitespace, one trailing newline. Reading a file and writing it back
//! reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::construct::{GpPhiSpec, Mode};
use crate::decomp::{DecompError, OfoTable, SuppTable};
use crate::ftable::{FunctionTable, PartialFunctionTable, Table, TableError};
use crate::tuples::{IndexPair, Permutation, Symbol, SymbolSet, TupleError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error("{0}")]
    Schema(String),
}

/// Either kind of table, as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyTable {
    Total(FunctionTable),
    Partial(PartialFunctionTable),
}

impl Table for AnyTable {
    fn alphabet(&self) -> crate::Alphabet {
        match self {
            AnyTable::Total(f) => f.alphabet(),
            AnyTable::Partial(f) => f.alphabet(),
        }
    }

    fn codomain_size(&self) -> usize {
        match self {
            AnyTable::Total(f) => f.codomain_size(),
            AnyTable::Partial(f) => f.codomain_size(),
        }
    }

    fn arity(&self) -> usize {
        match self {
            AnyTable::Total(f) => f.arity(),
            AnyTable::Partial(f) => f.arity(),
        }
    }

    fn value(&self, index: usize) -> Option<Symbol> {
        match self {
            AnyTable::Total(f) => f.value(index),
            AnyTable::Partial(f) => f.value(index),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    arity: usize,
    codomain_size: usize,
    domain_size: usize,
    values: Vec<Option<u64>>,
}

fn symbol(v: u64, codomain: usize, index: usize) -> Result<Symbol, FormatError> {
    if v >= codomain as u64 {
        return Err(TableError::ValueOutOfRange {
            index,
            value: v as usize,
            codomain,
        }
        .into());
    }
    Ok(v as Symbol)
}

fn table_from_doc(doc: TableDoc) -> Result<AnyTable, FormatError> {
    let TableDoc {
        arity,
        codomain_size,
        domain_size,
        values,
    } = doc;
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.map(|v| symbol(v, codomain_size, i)).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    if values.iter().all(Option::is_some) {
        let values = values.into_iter().map(Option::unwrap).collect();
        Ok(AnyTable::Total(FunctionTable::new(
            domain_size,
            codomain_size,
            arity,
            values,
        )?))
    } else {
        Ok(AnyTable::Partial(PartialFunctionTable::new(
            domain_size,
            codomain_size,
            arity,
            values,
        )?))
    }
}

/// Parses a table file; a table with any `null` entry is partial.
pub fn parse_table(text: &str) -> Result<AnyTable, FormatError> {
    let doc: TableDoc = serde_json::from_str(text)?;
    table_from_doc(doc)
}

pub fn table_value<T: Table + ?Sized>(f: &T) -> Value {
    let values: Vec<Value> = (0..f.len())
        .map(|i| f.value(i).map_or(Value::Null, |v| json!(v)))
        .collect();
    json!({
        "arity": f.arity(),
        "codomain_size": f.codomain_size(),
        "domain_size": f.alphabet().size(),
        "values": values,
    })
}

/// Canonical text of any serializable value.
pub fn canonical<S: Serialize + ?Sized>(value: &S) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    // serde_json's map is ordered by key
    let mut s = serde_json::to_string(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_table<T: Table + ?Sized>(f: &T) -> String {
    canonical(&table_value(f))
}

pub fn ofo_table_value(t: &OfoTable) -> Value {
    let mut values = Map::new();
    let mut unconstrained = Vec::new();
    for (tuple, v, c) in t.entries() {
        let key = tuple.zero_based();
        if !c {
            unconstrained.push(json!(key));
        }
        values.insert(key, json!(v));
    }
    json!({
        "codomain_size": t.codomain_size(),
        "domain_size": t.alphabet().size(),
        "max_len": t.max_len(),
        "unconstrained": unconstrained,
        "values": values,
    })
}

fn supp_map_value(t: &SuppTable) -> Value {
    let map: Map<String, Value> = t
        .entries()
        .map(|(s, v)| (s.zero_based(), json!(v)))
        .collect();
    Value::Object(map)
}

pub fn supp_table_value(t: &SuppTable) -> Value {
    json!({
        "codomain_size": t.codomain_size(),
        "domain_size": t.alphabet().size(),
        "max_size": t.max_size(),
        "values": supp_map_value(t),
    })
}

/// Parses a 0-based set rendering such as `{0,2}`.
pub fn parse_symbol_set(s: &str) -> Result<SymbolSet, FormatError> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| FormatError::Schema(format!("expected a set like {{0,1}}, got {s:?}")))?;
    let mut set = SymbolSet::default();
    for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
        let v: u8 = part
            .trim()
            .parse()
            .map_err(|_| FormatError::Schema(format!("bad symbol {part:?} in {s:?}")))?;
        if v as usize >= crate::tuples::MAX_ALPHABET {
            return Err(FormatError::Schema(format!(
                "symbol {v} too large in {s:?}"
            )));
        }
        set.insert(v);
    }
    Ok(set)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    minor: TableDoc,
    pair: [usize; 2],
    phi: [usize; 2],
    rho: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    base: BTreeMap<String, u64>,
    codomain_size: usize,
    domain_size: usize,
    family: Vec<FamilyDoc>,
    m: usize,
    mode: String,
}

pub fn spec_value(spec: &GpPhiSpec) -> Value {
    let family: Vec<Value> = spec
        .minors
        .iter()
        .map(|(&pair, g)| {
            let rho = spec.rhos.get(&pair).map(|r| r.one_based());
            let phi = spec.phi.get(&pair).map(|p| p.one_based());
            json!({
                "minor": table_value(g),
                "pair": pair.one_based(),
                "phi": phi,
                "rho": rho,
            })
        })
        .collect();
    let mode = match spec.mode {
        Mode::Total => "total",
        Mode::Partial { .. } => "partial",
    };
    json!({
        "base": supp_map_value(&spec.base),
        "codomain_size": spec.codomain_size,
        "domain_size": spec.domain_size,
        "family": family,
        "m": spec.base_arity(),
        "mode": mode,
    })
}

pub fn write_spec(spec: &GpPhiSpec) -> String {
    canonical(&spec_value(spec))
}

/// Parses a construction spec. Structural problems are reported here;
/// invariant breaches are left to [`crate::construct::validate`].
pub fn parse_spec(text: &str) -> Result<GpPhiSpec, FormatError> {
    let doc: SpecDoc = serde_json::from_str(text)?;
    let mode = match doc.mode.as_str() {
        "total" => {
            if doc.m != doc.domain_size {
                return Err(FormatError::Schema(format!(
                    "total mode needs m = domain_size, got m = {}",
                    doc.m
                )));
            }
            Mode::Total
        }
        "partial" => Mode::Partial { m: doc.m },
        other => return Err(FormatError::Schema(format!("unknown mode {other:?}"))),
    };
    let mut base = BTreeMap::new();
    for (key, v) in &doc.base {
        let set = parse_symbol_set(key)?;
        if base
            .insert(set, symbol(*v, doc.codomain_size, 0)?)
            .is_some()
        {
            return Err(FormatError::Schema(format!("duplicate base key {key:?}")));
        }
    }
    let base = SuppTable::new(doc.domain_size, doc.codomain_size, doc.m, base)?;
    let pair = |p: [usize; 2]| IndexPair::from_one_based(p[0], p[1]);
    let mut minors = BTreeMap::new();
    let mut rhos = BTreeMap::new();
    let mut phi = BTreeMap::new();
    for entry in doc.family {
        let key = pair(entry.pair)?;
        let g = match table_from_doc(entry.minor)? {
            AnyTable::Total(g) => g,
            AnyTable::Partial(_) => {
                return Err(FormatError::Schema(format!(
                    "minor for {key} must be total"
                )))
            }
        };
        if minors.insert(key, g).is_some() {
            return Err(FormatError::Schema(format!(
                "duplicate family entry for {key}"
            )));
        }
        rhos.insert(key, Permutation::from_one_based(&entry.rho)?);
        phi.insert(key, pair(entry.phi)?);
    }
    Ok(GpPhiSpec {
        domain_size: doc.domain_size,
        codomain_size: doc.codomain_size,
        mode,
        base,
        minors,
        rhos,
        phi,
    })
}
