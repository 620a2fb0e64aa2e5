//! The acceptance criteria, each under its time limit. One line per
//! criterion goes to stderr (uncaptured) so `cargo test` shows the tally.

use std::collections::HashSet;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use uimlab::analysis::{has_uim, table_from_index};
use uimlab::construct::{d_tuple, lives_on_repeats, prop4_function, prop4_partial_function};
use uimlab::decomp::{
    check_pi_ij_condition, compose_ofo, equiv_to_ofo_determined, is_ofo_determined,
    is_supp_determined, OfoTable,
};
use uimlab::ftable::identification_minors;
use uimlab::symmetry::{
    hat_sigma, invariance_group, is_2_set_transitive, is_2_set_transitive_fn, is_totally_symmetric,
};
use uimlab::tuples::{all_tuples, ofo};
use uimlab::{Alphabet, FunctionTable, IndexPair, Permutation};

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ofo_oracle<T: Copy + Eq + std::hash::Hash>(s: &[T]) -> Vec<T> {
    let mut seen = HashSet::new();
    s.iter().copied().filter(|x| seen.insert(*x)).collect()
}

/// δ_I on 0-based positions, written out from its definition.
fn delta_oracle(lo: usize, hi: usize, i: usize) -> usize {
    use std::cmp::Ordering::*;
    match i.cmp(&hi) {
        Less => i,
        Equal => lo,
        Greater => i - 1,
    }
}

fn all_tables(k: usize, b: usize, n: usize) -> impl Iterator<Item = FunctionTable> {
    let count = (b as u64).pow(k.pow(n as u32) as u32);
    (0..count).map(move |i| table_from_index(k, b, n, i).unwrap())
}

fn c1_d_tuples() -> Check {
    let printed: [((usize, usize), [u8; 5]); 10] = [
        ((1, 2), [1, 1, 2, 3, 4]),
        ((1, 3), [1, 2, 1, 3, 4]),
        ((1, 4), [1, 2, 3, 1, 4]),
        ((1, 5), [1, 2, 3, 4, 1]),
        ((2, 3), [4, 1, 1, 2, 3]),
        ((2, 4), [4, 1, 2, 1, 3]),
        ((2, 5), [4, 1, 2, 3, 1]),
        ((3, 4), [3, 4, 1, 1, 2]),
        ((3, 5), [3, 4, 1, 2, 1]),
        // printed with the label {3,6}
        ((4, 5), [2, 3, 4, 1, 1]),
    ];
    for ((i, j), d) in printed {
        let t = d_tuple(4, IndexPair::from_one_based(i, j).unwrap()).map_err(|e| e.to_string())?;
        let got: Vec<u8> = t.iter().map(|x| x + 1).collect();
        ensure(got == d, || {
            format!("d_{{{i},{j}}} = {got:?}, printed {d:?}")
        })?;
    }
    Ok(())
}

fn c2_ofo_words() -> Check {
    for (word, expected) in [
        ("balloon", "balon"),
        ("kayak", "kay"),
        ("motorcycle", "motrcyle"),
        ("seaplane", "seapln"),
        ("sleigh", "sleigh"),
        ("submarine", "submarine"),
    ] {
        let chars: Vec<char> = word.chars().collect();
        let got: String = ofo(&chars).into_iter().collect();
        ensure(got == expected, || format!("ofo({word}) = {got}"))?;
    }
    Ok(())
}

fn c3_ofo_delta() -> Check {
    for k in 1..=3 {
        let a = Alphabet::new(k).unwrap();
        for n in 2..=5 {
            for t in all_tuples(a, n - 1) {
                for hi in 1..n {
                    for lo in 0..hi {
                        let td: Vec<u8> = (0..n).map(|i| t[delta_oracle(lo, hi, i)]).collect();
                        ensure(ofo_oracle(&t) == ofo(&td), || {
                            format!("k={k} t={t} I={{{},{}}}", lo + 1, hi + 1)
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn c4_ofo_minor() -> Check {
    // f* on the repeat-free tuples (0), (1), (0,1), (1,0)
    let keys: [&[u8]; 4] = [&[0], &[1], &[0, 1], &[1, 0]];
    for bits in 0u8..16 {
        let value = |t: &[u8]| (bits >> keys.iter().position(|k| *k == t).unwrap()) & 1;
        let star = OfoTable::from_fn(2, 2, 4, |t| value(t)).unwrap();
        for n in 3..=4 {
            let f = compose_ofo(&star, n).unwrap();
            let oracle = FunctionTable::from_fn(2, 2, n - 1, |t| value(&ofo_oracle(t))).unwrap();
            for (pair, minor) in identification_minors(&f).unwrap() {
                ensure(minor == oracle, || {
                    format!("f* #{bits}, n = {n}, minor {pair}")
                })?;
            }
        }
    }
    Ok(())
}

fn c5_hat_sigma() -> Check {
    for n in 2..=6 {
        for sigma in Permutation::all(n) {
            for hi in 1..n {
                for lo in 0..hi {
                    let pair = IndexPair::new(lo, hi).unwrap();
                    let (hat, j) = hat_sigma(&sigma, pair).map_err(|e| e.to_string())?;
                    let inv = sigma.inverse();
                    let (a, b) = (inv.apply(lo), inv.apply(hi));
                    let (jlo, jhi) = (a.min(b), a.max(b));
                    ensure(j == IndexPair::new(jlo, jhi).unwrap(), || {
                        format!("J for σ = {sigma}, I = {pair}")
                    })?;
                    for i in 0..n {
                        let lhs = hat.apply(delta_oracle(jlo, jhi, i));
                        let rhs = delta_oracle(lo, hi, sigma.apply(i));
                        ensure(lhs == rhs, || {
                            format!("σ = {sigma}, I = {pair}, i = {}", i + 1)
                        })?;
                    }
                    ensure(hat.apply(jlo) == lo, || {
                        format!("σ̂(min J) for σ = {sigma}, I = {pair}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn c6_two_set_transitive_uim() -> Check {
    for n in 3..=4 {
        let mut count = 0;
        for f in all_tables(2, 2, n) {
            if is_2_set_transitive_fn(&f) {
                count += 1;
                ensure(has_uim(&f).unwrap(), || {
                    format!("n = {n}: {:?}", f.values())
                })?;
            }
        }
        ensure(count > 0, || format!("n = {n}: no 2-set-transitive tables"))?;
    }
    Ok(())
}

fn c7_supp_sets() -> Check {
    let (mut ts_od, mut tst_od, mut sd) = (Vec::new(), Vec::new(), Vec::new());
    let pairs = IndexPair::all(4);
    for (i, f) in all_tables(2, 2, 4).enumerate() {
        let group = invariance_group(&f);
        let od = is_ofo_determined(&f);
        if is_totally_symmetric(&f) && od {
            ts_od.push(i);
        }
        if is_2_set_transitive(&group).unwrap() && od {
            tst_od.push(i);
        }
        if is_supp_determined(&f) {
            sd.push(i);
            for &a in &pairs {
                for &b in &pairs {
                    let pi = check_pi_ij_condition(&f, a, b).unwrap();
                    ensure(pi.is_some(), || {
                        format!("table {i}: no π for I = {a}, J = {b}")
                    })?;
                }
            }
        }
    }
    ensure(ts_od == sd && tst_od == sd, || {
        format!("sizes {} / {} / {}", ts_od.len(), tst_od.len(), sd.len())
    })?;
    // oracle: 2^|{ {0}, {1}, {0,1} }| assignments
    ensure(sd.len() == 8, || {
        format!("{} supp-determined tables", sd.len())
    })
}

fn c8_explicit_functions() -> Check {
    for k in 2..=4 {
        let f = prop4_function(k, 2, 1, 0).map_err(|e| e.to_string())?;
        ensure(has_uim(&f).unwrap(), || format!("k = {k}: no UIM"))?;
        ensure(equiv_to_ofo_determined(&f).is_none(), || {
            format!("k = {k}: ofo-equivalent")
        })?;
        if k >= 3 {
            let g = invariance_group(&f);
            ensure(g.is_trivial(), || {
                format!("k = {k}: |Inv f| = {}", g.order())
            })?;
        }
    }
    Ok(())
}

fn c9_partial_variant() -> Check {
    for (k, m) in [(3, 2), (4, 3), (4, 2)] {
        let f = prop4_partial_function(k, m, 2, 1, 0).map_err(|e| e.to_string())?;
        ensure(lives_on_repeats(&f), || {
            format!("(k,m) = ({k},{m}): domain")
        })?;
        for (pair, minor) in identification_minors(&f).unwrap() {
            ensure(equiv_to_ofo_determined(&minor).is_some(), || {
                format!("(k,m) = ({k},{m}): minor {pair} not ≡ f* ∘ ofo")
            })?;
        }
        ensure(equiv_to_ofo_determined(&f).is_none(), || {
            format!("(k,m) = ({k},{m}): ofo-equivalent")
        })?;
        if m >= 3 {
            let tst = is_2_set_transitive(&invariance_group(&f)).unwrap();
            ensure(!tst, || format!("(k,m) = ({k},{m}): 2-set-transitive"))?;
        }
    }
    Ok(())
}

fn c10_ofo_algebra() -> Check {
    let a = Alphabet::new(3).unwrap();
    let words: Vec<Vec<u8>> = (0..=4)
        .flat_map(|len| all_tuples(a, len).map(|t| t.into_vec()))
        .collect();
    for u in &words {
        ensure(ofo(&ofo(u)) == ofo(u), || format!("idempotence at {u:?}"))?;
        for v in words.iter().filter(|v| u.len() + v.len() <= 6) {
            let uv = [u.as_slice(), v].concat();
            ensure(ofo(&[ofo(u), ofo(v)].concat()) == ofo(&uv), || {
                format!("homomorphism at {u:?} {v:?}")
            })?;
            for w in words.iter().filter(|w| uv.len() + w.len() <= 6) {
                let lhs = ofo(&[u.as_slice(), &ofo(v), w].concat());
                ensure(lhs == ofo_oracle(&[uv.as_slice(), w].concat()), || {
                    format!("associativity at {u:?} {v:?} {w:?}")
                })?;
            }
        }
    }
    Ok(())
}

fn c11_search_run() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> Result<Value, String> {
        let report = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_uimlab"))
            .args([
                "search",
                "--k",
                "2",
                "--b",
                "2",
                "--n",
                "4",
                "--exhaustive",
                "--report",
            ])
            .arg(&report)
            .output()
            .map_err(|e| e.to_string())?;
        // 1 means OTHER witnesses were found, which is still a completed run
        ensure(matches!(out.status.code(), Some(0 | 1)), || {
            format!("exit {:?}", out.status.code())
        })?;
        let text = std::fs::read_to_string(&report).map_err(|e| e.to_string())?;
        let mut v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        v.as_object_mut().unwrap().remove("timing");
        Ok(v)
    };
    let (a, b) = (run("a.json")?, run("b.json")?);
    ensure(a == b, || "reports differ between runs".into())?;
    ensure(a["tables_classified"] == 65536, || {
        "not all tables classified".into()
    })?;
    let cat = |c: &str| a["categories"][c].as_u64().unwrap();
    let total: u64 = ["2ST", "OFO-EQ", "OTHER", "NOT-UIM"]
        .iter()
        .map(|c| cat(c))
        .sum();
    ensure(total == 65536, || format!("categories sum to {total}"))?;
    let uim = a["flags"]["has_uim"].as_u64().unwrap();
    ensure(cat("2ST") + cat("OFO-EQ") + cat("OTHER") == uim, || {
        "a UIM table is unaccounted for".into()
    })?;
    let witnesses = a["other_witnesses"].as_array().unwrap();
    ensure(witnesses.len() as u64 == cat("OTHER"), || {
        "OTHER tables not all emitted".into()
    })?;
    ensure(
        witnesses
            .iter()
            .all(|w| w["values"].as_array().unwrap().len() == 16),
        || "truncated witness".into(),
    )?;
    ensure(
        a["theorem_violations"].as_array().unwrap().is_empty(),
        || "theorem cross-check failed".into(),
    )
}

#[test]
fn acceptance_criteria() {
    type Criterion = (&'static str, Duration, fn() -> Check);
    let criteria: [Criterion; 11] = [
        ("1 d_I table fidelity", Duration::from_secs(1), c1_d_tuples),
        ("2 ofo examples", Duration::from_secs(1), c2_ofo_words),
        (
            "3 ofo(t) = ofo(t δ_I)",
            Duration::from_secs(30),
            c3_ofo_delta,
        ),
        (
            "4 minors of f* ∘ ofo",
            Duration::from_secs(60),
            c4_ofo_minor,
        ),
        ("5 σ̂ equations", Duration::from_secs(30), c5_hat_sigma),
        (
            "6 2-set-transitive ⇒ UIM",
            Duration::from_secs(600),
            c6_two_set_transitive_uim,
        ),
        (
            "7 supp-determined set equality",
            Duration::from_secs(600),
            c7_supp_sets,
        ),
        (
            "8 explicit UIM functions",
            Duration::from_secs(60),
            c8_explicit_functions,
        ),
        (
            "9 partial variant",
            Duration::from_secs(120),
            c9_partial_variant,
        ),
        ("10 ofo algebra", Duration::from_secs(120), c10_ofo_algebra),
        (
            "11 conjecture evidence run",
            Duration::from_secs(900),
            c11_search_run,
        ),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let line = match &result {
            Ok(()) if elapsed <= limit => format!("PASS  {name} ({elapsed:.2?} of {limit:?})\n"),
            Ok(()) => format!("FAIL  {name}: took {elapsed:.2?}, limit {limit:?}\n"),
            Err(e) => format!("FAIL  {name}: {e}\n"),
        };
        if !line.starts_with("PASS") {
            failed.push(name);
        }
        err.write_all(line.as_bytes()).unwrap();
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
