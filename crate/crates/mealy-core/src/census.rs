//! Exhaustive enumeration and classification of small machines.
//!
//! Enumeration is stratified: with the reversible filter each letter's
//! transition column ranges over permutations of the states, otherwise
//! over all functions; dually for output rows under the invertible
//! filter. Raw counts therefore match the closed forms, e.g.
//! `(k!)^m · (m!)^k` invertible-reversible machines on `k` states and
//! `m` letters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    exponential_growth_certificate, freeness_check, FreenessVerdict, DEFAULT_SCAN_BUDGET,
};
use crate::error::{Error, Result};
use crate::format;
use crate::machine::MealyMachine;
use crate::power::{
    level_transitive_up_to, minimized_power_sizes, DEFAULT_ORBIT_BUDGET, DEFAULT_SIZE_LIMIT,
};

/// Default cap on the number of machines a census may enumerate.
pub const DEFAULT_CENSUS_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusFilter {
    pub invertible: bool,
    pub reversible: bool,
    pub up_to_iso: bool,
}

impl Default for CensusFilter {
    fn default() -> Self {
        CensusFilter {
            invertible: true,
            reversible: true,
            up_to_iso: false,
        }
    }
}

/// Emits every machine of the given shape passing the filters, exactly
/// once, in lexicographic table order. With `up_to_iso`, only the
/// shortlex-least representative of each simultaneous state/letter
/// relabeling orbit is kept.
pub fn enumerate_machines(
    n_states: usize,
    n_letters: usize,
    filter: CensusFilter,
    cap: u64,
) -> Result<Vec<MealyMachine>> {
    if n_states == 0 || n_letters == 0 {
        return Err(Error::InvalidArgument(
            "census needs at least one state and one letter".into(),
        ));
    }
    let delta_choices = column_count(n_states, filter.reversible)?;
    let rho_choices = column_count(n_letters, filter.invertible)?;
    let total = checked_pow(delta_choices, n_letters)?
        .checked_mul(checked_pow(rho_choices, n_states)?)
        .ok_or(Error::CapExceeded {
            required: u128::MAX,
            cap,
        })?;
    if total > cap as u128 {
        return Err(Error::CapExceeded {
            required: total,
            cap,
        });
    }

    let state_maps = all_maps(n_states, filter.reversible);
    let letter_maps = all_maps(n_letters, filter.invertible);
    let state_labels: Vec<String> = (0..n_states).map(state_label).collect();
    let letter_labels: Vec<String> = (0..n_letters).map(|i| i.to_string()).collect();

    let mut out = Vec::new();
    let mut delta_pick = vec![0usize; n_letters];
    loop {
        let mut rho_pick = vec![0usize; n_states];
        loop {
            let mut delta = vec![0u32; n_states * n_letters];
            let mut rho = vec![0u32; n_states * n_letters];
            for x in 0..n_states {
                for i in 0..n_letters {
                    delta[x * n_letters + i] = state_maps[delta_pick[i]][x];
                    rho[x * n_letters + i] = letter_maps[rho_pick[x]][i];
                }
            }
            if !filter.up_to_iso || is_canonical(n_states, n_letters, &delta, &rho) {
                let m = MealyMachine::new(n_states, n_letters, delta, rho)?
                    .with_labels(Some(state_labels.clone()), Some(letter_labels.clone()))?;
                out.push(m);
            }
            if !advance(&mut rho_pick, letter_maps.len()) {
                break;
            }
        }
        if !advance(&mut delta_pick, state_maps.len()) {
            break;
        }
    }
    Ok(out)
}

fn state_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("q{i}")
    }
}

fn column_count(n: usize, permutations_only: bool) -> Result<u128> {
    let v = if permutations_only {
        factorial(n)
    } else {
        checked_pow(n as u128, n)?
    };
    Ok(v)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn checked_pow(base: u128, exp: usize) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(Error::CapExceeded {
            required: u128::MAX,
            cap: 0,
        })?;
    }
    Ok(acc)
}

/// All maps `{0..n} → {0..n}` in lexicographic order: permutations only,
/// or every function.
fn all_maps(n: usize, permutations_only: bool) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut map = vec![0u32; n];
    loop {
        let ok = !permutations_only || {
            let mut seen = vec![false; n];
            map.iter().all(|&v| {
                let fresh = !seen[v as usize];
                seen[v as usize] = true;
                fresh
            })
        };
        if ok {
            out.push(map.clone());
        }
        let mut j = n;
        let mut carried = false;
        while j > 0 {
            j -= 1;
            map[j] += 1;
            if (map[j] as usize) < n {
                carried = true;
                break;
            }
            map[j] = 0;
        }
        if !carried {
            break;
        }
    }
    out
}

fn advance(pick: &mut [usize], bound: usize) -> bool {
    let mut j = pick.len();
    while j > 0 {
        j -= 1;
        pick[j] += 1;
        if pick[j] < bound {
            return true;
        }
        pick[j] = 0;
    }
    false
}

/// Canonical iff no simultaneous relabeling produces a lexicographically
/// smaller `(delta, rho)` table pair.
fn is_canonical(n_states: usize, n_letters: usize, delta: &[u32], rho: &[u32]) -> bool {
    let state_perms = all_maps(n_states, true);
    let letter_perms = all_maps(n_letters, true);
    let original: (&[u32], &[u32]) = (delta, rho);
    let mut d2 = vec![0u32; delta.len()];
    let mut r2 = vec![0u32; rho.len()];
    for sp in &state_perms {
        for lp in &letter_perms {
            for x in 0..n_states {
                for i in 0..n_letters {
                    let nx = sp[x] as usize;
                    let ni = lp[i] as usize;
                    d2[nx * n_letters + ni] = sp[delta[x * n_letters + i] as usize];
                    r2[nx * n_letters + ni] = lp[rho[x * n_letters + i] as usize];
                }
            }
            if (d2.as_slice(), r2.as_slice()) < original {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusParams {
    pub n_states: usize,
    pub n_letters: usize,
    pub filter: CensusFilter,
    pub depth: usize,
}

/// One classified machine. `machine` is the canonical one-line `.mealy`
/// serialization and keys the record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub machine: String,
    pub states: usize,
    pub letters: usize,
    pub invertible: bool,
    pub reversible: bool,
    pub connected: bool,
    pub msize: u64,
    pub dual_lt_depth: usize,
    pub verdict: String,
    pub sizes: Vec<u64>,
    pub free: String,
    pub rel_len: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub params: CensusParams,
    pub records: Vec<CensusRecord>,
    pub summary: CensusSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub total: u64,
    pub by_verdict: BTreeMap<String, u64>,
    pub by_freeness: BTreeMap<String, u64>,
}

/// Runs the full analysis pipeline on one machine at the given depth.
pub fn classify_machine(machine: &MealyMachine, depth: usize) -> CensusRecord {
    let invertible = machine.is_invertible();
    let reversible = machine.is_reversible();
    let (minimized, _) = crate::minimize::minimize(machine);
    let mut record = CensusRecord {
        machine: format::render_compact(machine),
        states: machine.n_states(),
        letters: machine.n_letters(),
        invertible,
        reversible,
        connected: machine.is_connected(),
        msize: minimized.n_states() as u64,
        dual_lt_depth: 0,
        verdict: "NOT-APPLICABLE".to_string(),
        sizes: Vec::new(),
        free: String::new(),
        rel_len: None,
        error: None,
    };

    let record_error = |record: &mut CensusRecord, e: Error| {
        if record.error.is_none() {
            record.error = Some(e.to_string());
        }
    };

    match level_transitive_up_to(&machine.dual(), depth, DEFAULT_ORBIT_BUDGET) {
        Ok(t) => record.dual_lt_depth = t.transitive_up_to,
        Err(e) => record_error(&mut record, e),
    }
    match minimized_power_sizes(machine, depth, DEFAULT_SIZE_LIMIT) {
        Ok(r) => record.sizes = r.sizes,
        Err(e) => record_error(&mut record, e),
    }
    if invertible && reversible {
        match exponential_growth_certificate(machine, depth, DEFAULT_SIZE_LIMIT, DEFAULT_ORBIT_BUDGET)
        {
            Ok(c) => record.verdict = c.verdict.to_string(),
            Err(e) => record_error(&mut record, e),
        }
    }
    match freeness_check(machine, depth, DEFAULT_SIZE_LIMIT, DEFAULT_SCAN_BUDGET) {
        Ok(f) => {
            record.free = match f.verdict {
                FreenessVerdict::FreeToDepth => format!("FREE-TO-DEPTH({})", f.depth_completed),
                FreenessVerdict::NotFree => "NOT-FREE".to_string(),
            };
            record.rel_len = f.witness.map(|w| w.v_len);
        }
        Err(e) => record_error(&mut record, e),
    }
    record
}

/// Enumerates and classifies a whole family; per-record failures are
/// carried in the record and do not stop the run.
pub fn classify_census(params: CensusParams, cap: u64) -> Result<CensusReport> {
    let machines = enumerate_machines(params.n_states, params.n_letters, params.filter, cap)?;
    let mut records: Vec<CensusRecord> = machines
        .iter()
        .map(|m| classify_machine(m, params.depth))
        .collect();
    records.sort_by(|a, b| {
        (a.states, a.letters, &a.machine).cmp(&(b.states, b.letters, &b.machine))
    });
    let summary = summarize(&records);
    Ok(CensusReport {
        params,
        records,
        summary,
    })
}

pub fn summarize(records: &[CensusRecord]) -> CensusSummary {
    let mut by_verdict = BTreeMap::new();
    let mut by_freeness = BTreeMap::new();
    for r in records {
        *by_verdict.entry(r.verdict.clone()).or_insert(0) += 1;
        let free_key = if r.free.starts_with("FREE-TO-DEPTH") {
            "FREE-TO-DEPTH".to_string()
        } else if r.free.is_empty() {
            "UNKNOWN".to_string()
        } else {
            r.free.clone()
        };
        *by_freeness.entry(free_key).or_insert(0) += 1;
    }
    CensusSummary {
        total: records.len() as u64,
        by_verdict,
        by_freeness,
    }
}

// ---------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------

pub const CSV_HEADER: &str =
    "machine,states,letters,invertible,reversible,connected,msize,dual_lt_depth,verdict,sizes,free,rel_len";

fn record_to_csv(r: &CensusRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.machine,
        r.states,
        r.letters,
        r.invertible,
        r.reversible,
        r.connected,
        r.msize,
        r.dual_lt_depth,
        r.verdict,
        r.sizes
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("|"),
        r.free,
        r.rel_len.map(|l| l.to_string()).unwrap_or_default(),
    )
}

/// Renders records as CSV with the fixed column set.
pub fn render_csv(records: &[CensusRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_to_csv(r));
        out.push('\n');
    }
    out
}

/// Merges new records into an existing CSV body. Rows are keyed by the
/// canonical machine serialization: existing rows for other machines are
/// kept verbatim, re-census of a known machine replaces its row, and the
/// result is sorted, so reruns are idempotent.
pub fn merge_csv(existing: Option<&str>, records: &[CensusRecord]) -> Result<String> {
    let mut rows: BTreeMap<(usize, usize, String), String> = BTreeMap::new();
    if let Some(body) = existing {
        let mut lines = body.lines();
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            Some(other) => {
                return Err(Error::InvalidArgument(format!(
                    "existing census file has an unexpected header: {other}"
                )))
            }
            None => {}
        }
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let machine = fields.next().unwrap_or_default().to_string();
            let states: usize = fields.next().and_then(|f| f.parse().ok()).unwrap_or(0);
            let letters: usize = fields.next().and_then(|f| f.parse().ok()).unwrap_or(0);
            rows.insert((states, letters, machine), line.to_string());
        }
    }
    for r in records {
        rows.insert(
            (r.states, r.letters, r.machine.clone()),
            record_to_csv(r),
        );
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for line in rows.values() {
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}
