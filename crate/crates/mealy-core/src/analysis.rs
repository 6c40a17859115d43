//! Executable forms of the structural results: growth computation, the
//! exponential-growth certificate, the two-sided Nerode-class
//! decomposition check, the stabilization proposition, a finiteness
//! probe, and freeness/relation search.
//!
//! Depth-bounded checks never decide the underlying open problems, so
//! verdicts are explicit about their strength: `…-CERTIFIED` facts are
//! verified at the stated depth, `…-EVIDENCE` verdicts are heuristic.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{MealyMachine, StateWord};
use crate::minimize::{bfs_canonical_bytes, nerode_partition, same_action_states};
use crate::power::{
    explicit_power, level_transitive_up_to, minimized_power_sizes, reduce, PowerSequence,
    TransitivityReport,
};

/// Default cap on the number of words enumerated by witness searches.
pub const DEFAULT_SCAN_BUDGET: u64 = 1 << 20;

// ---------------------------------------------------------------------
// Cross-length action identification
// ---------------------------------------------------------------------

/// Interns distinct actions across the minimized powers `B_1, …, B_d`.
///
/// Elements are keyed by reachable-part size and a 128-bit hash of the
/// canonical signature bytes; hash-bucket hits are confirmed by an exact
/// synchronized walk, so equality never depends on the hash.
struct ActionInterner {
    buckets: HashMap<(u32, u128), Vec<u32>>,
    /// element id → (level, state in `B_level`) of first occurrence
    elems: Vec<(u32, u32)>,
}

impl ActionInterner {
    fn new() -> Self {
        ActionInterner {
            buckets: HashMap::new(),
            elems: Vec::new(),
        }
    }

    fn intern(&mut self, seq: &PowerSequence, level: usize, state: u32) -> (u32, bool) {
        let machine = seq.machine_at(level);
        let bytes = bfs_canonical_bytes(machine, state);
        let size = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
        let key = (size, fnv128(&bytes));
        if let Some(ids) = self.buckets.get(&key) {
            for &id in ids {
                let (l2, s2) = self.elems[id as usize];
                let other = seq.machine_at(l2 as usize);
                if same_action_states(machine, state, other, s2)
                    .expect("powers of one machine share the alphabet")
                {
                    return (id, false);
                }
            }
        }
        let id = self.elems.len() as u32;
        self.elems.push((level as u32, state));
        self.buckets.entry(key).or_default().push(id);
        (id, true)
    }
}

fn fnv128(bytes: &[u8]) -> u128 {
    const OFFSET: u128 = 0x6c62272e07bb014262b821756295c58d;
    const PRIME: u128 = 0x0000000001000000000000000000013b;
    let mut h = OFFSET;
    for &b in bytes {
        h ^= b as u128;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Counts the actions first seen at each level of the power sequence.
fn count_new_per_level(seq: &PowerSequence) -> Vec<u64> {
    let mut interner = ActionInterner::new();
    let mut new_counts = Vec::new();
    for k in 1..=seq.depth_completed() {
        let b = seq.machine_at(k);
        let mut fresh = 0u64;
        for st in 0..b.n_states() as u32 {
            if interner.intern(seq, k, st).1 {
                fresh += 1;
            }
        }
        new_counts.push(fresh);
    }
    new_counts
}

// ---------------------------------------------------------------------
// Growth
// ---------------------------------------------------------------------

/// Growth function of the generated semigroup: `gamma[k-1]` counts the
/// distinct actions induced by nonempty state words of length at most
/// `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub max_len: usize,
    pub gamma: Vec<u64>,
    pub new_at_length: Vec<u64>,
    /// `"states"` or `"states-and-inverses"`.
    pub generators: String,
    pub truncated: bool,
}

/// Computes the growth function exactly: length-`k` elements are the
/// states of `B_k`, deduplicated across lengths by exact action equality.
///
/// With `group_generators` the machine is extended with its inverse, so
/// the count is over the symmetric generating set.
pub fn growth_function(
    machine: &MealyMachine,
    max_len: usize,
    size_limit: u64,
    group_generators: bool,
) -> Result<GrowthReport> {
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be at least 1".into()));
    }
    let (gen_machine, label) = if group_generators {
        (
            machine.disjoint_union(&machine.inverse()?)?,
            "states-and-inverses",
        )
    } else {
        (machine.clone(), "states")
    };
    let seq = PowerSequence::build(&gen_machine, max_len, size_limit)?;
    let new_counts = count_new_per_level(&seq);
    let mut gamma = Vec::with_capacity(new_counts.len());
    let mut acc = 0u64;
    for &c in &new_counts {
        acc += c;
        gamma.push(acc);
    }
    Ok(GrowthReport {
        max_len,
        gamma,
        new_at_length: new_counts,
        generators: label.to_string(),
        truncated: seq.truncated(),
    })
}

// ---------------------------------------------------------------------
// Exponential growth certificate
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateVerdict {
    #[serde(rename = "EXPONENTIAL-CERTIFIED")]
    ExponentialCertified,
    #[serde(rename = "HYPOTHESIS-FAILED")]
    HypothesisFailed,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for CertificateVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CertificateVerdict::ExponentialCertified => "EXPONENTIAL-CERTIFIED",
            CertificateVerdict::HypothesisFailed => "HYPOTHESIS-FAILED",
            CertificateVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Outcome of the exponential-growth pipeline on an invertible reversible
/// machine: dual level-transitivity to the stated depth plus doubling
/// minimized-power sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verdict: CertificateVerdict,
    pub depth: usize,
    pub sizes: Vec<u64>,
    pub ratios: Vec<(u64, u64)>,
    pub all_ratios_integral: bool,
    /// `s_n ≥ 2^n` for every computed level.
    pub lower_bound_ok: bool,
    pub transitivity: TransitivityReport,
    pub failed_level: Option<usize>,
    pub witnesses: Option<(String, String)>,
    pub reason: Option<String>,
}

/// Certifies exponential growth to finite depth: the dual action must be
/// transitive on every level up to `depth` and every size ratio
/// `s_{n+1}/s_n` must be an integer at least 2 (which forces
/// `s_n ≥ 2^n`).
pub fn exponential_growth_certificate(
    machine: &MealyMachine,
    depth: usize,
    size_limit: u64,
    orbit_budget: u64,
) -> Result<CertificateReport> {
    machine.require_invertible()?;
    machine.require_reversible()?;
    let transitivity = level_transitive_up_to(&machine.dual(), depth, orbit_budget)?;
    let sizes_report = minimized_power_sizes(machine, depth, size_limit)?;

    let lower_bound_ok = sizes_report
        .sizes
        .iter()
        .enumerate()
        .all(|(i, &s)| (s as u128) >= (1u128 << (i + 1).min(127)));
    let ratios_ok = sizes_report
        .ratios
        .iter()
        .all(|&(num, den)| den == 1 && num >= 2);

    let mut report = CertificateReport {
        verdict: CertificateVerdict::Inconclusive,
        depth,
        sizes: sizes_report.sizes.clone(),
        ratios: sizes_report.ratios.clone(),
        all_ratios_integral: sizes_report.all_ratios_integral,
        lower_bound_ok,
        transitivity: transitivity.clone(),
        failed_level: None,
        witnesses: None,
        reason: None,
    };

    if machine.n_states() == 1 {
        // The dual acts on an arity-1 tree: every level is a single word,
        // so transitivity is vacuous and proves nothing about growth.
        report.verdict = CertificateVerdict::HypothesisFailed;
        report.failed_level = Some(1);
        report.reason = Some(
            "degenerate hypothesis: the dual acts on an arity-1 tree (one state), \
             so level-transitivity is vacuous"
                .to_string(),
        );
        return Ok(report);
    }
    if let Some(level) = transitivity.failure_level {
        report.verdict = CertificateVerdict::HypothesisFailed;
        report.failed_level = Some(level);
        report.witnesses = transitivity.witnesses.clone();
        report.reason = Some(format!(
            "dual action is not transitive at level {level}"
        ));
        return Ok(report);
    }
    if let Some(level) = transitivity.budget_exceeded_at {
        report.reason = Some(format!(
            "orbit budget exhausted before level {level}; hypothesis unverified"
        ));
        return Ok(report);
    }
    if sizes_report.truncated {
        report.reason = Some(format!(
            "size limit {size_limit} reached after level {}; sizes incomplete",
            report.sizes.len()
        ));
        return Ok(report);
    }
    if !ratios_ok || !lower_bound_ok {
        report.reason = Some(
            "minimized power sizes do not double at every level; transitivity \
             verified only to finite depth, so no certificate"
                .to_string(),
        );
        return Ok(report);
    }
    report.verdict = CertificateVerdict::ExponentialCertified;
    Ok(report)
}

// ---------------------------------------------------------------------
// Two-sided class decomposition (consecutive powers)
// ---------------------------------------------------------------------

/// One class `D` of `Q^{n+1}` decomposed against the classes of `Q^n`
/// from both sides: `D = ⋃ C_{i_q}·q = ⋃ q·C_{i'_q}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecomposition {
    pub class: usize,
    /// `(q, i)` pairs of the right decomposition `⋃ C_i · q`.
    pub right: Vec<(String, usize)>,
    /// `(q, i)` pairs of the left decomposition `⋃ q · C_i`.
    pub left: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Checks {
    /// Every part of every class decomposed exactly onto a class below.
    pub decompositions_exact: bool,
    /// For each `(D, q)` at most one class `C_i` satisfies `C_i·q ⊆ D`,
    /// so the index `i_{q,D}` is well defined; dually on the left.
    pub right_index_unambiguous: bool,
    pub left_index_unambiguous: bool,
    /// `#Q_D = #Q'_D` for every class `D`.
    pub side_cardinalities_equal: bool,
    /// `#Q_D` is one constant across all `D`.
    pub cardinality_constant: bool,
    /// The class-size ratio law `#Q_D · s_{n+1} = |Q| · s_n`.
    pub ratio_law: bool,
    /// `#Q_D = |Q|` for all D ⟺ `s_{n+1} = s_n`, with `Q_D = Q'_D = Q`.
    pub size_equality_biconditional: bool,
}

impl Lemma1Checks {
    pub fn all_ok(&self) -> bool {
        self.decompositions_exact
            && self.right_index_unambiguous
            && self.left_index_unambiguous
            && self.side_cardinalities_equal
            && self.cardinality_constant
            && self.ratio_law
            && self.size_equality_biconditional
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub n_states: usize,
    pub size_n: u64,
    pub size_n1: u64,
    /// `s_{n+1}/s_n` as a reduced rational.
    pub msize_ratio: (u64, u64),
    /// `#Q_D`: the ratio of class cardinalities between the two levels.
    pub class_cardinality_ratio: u64,
    pub classes_n: Vec<Vec<String>>,
    pub classes_n1: Vec<Vec<String>>,
    pub decompositions: Vec<ClassDecomposition>,
    pub checks: Lemma1Checks,
}

/// Reconstructs both decompositions of every Nerode class of `Q^{n+1}`
/// over the classes of `Q^n` and verifies the cardinality claims. The
/// hypotheses (invertible, reversible, dual transitive up to `n+1`) are
/// checked first.
pub fn lemma1_verify(
    machine: &MealyMachine,
    n: usize,
    size_limit: u64,
    orbit_budget: u64,
) -> Result<Lemma1Report> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    machine
        .require_invertible()
        .map_err(|e| Error::HypothesisUnmet(e.to_string()))?;
    machine
        .require_reversible()
        .map_err(|e| Error::HypothesisUnmet(e.to_string()))?;
    let trans = level_transitive_up_to(&machine.dual(), n + 1, orbit_budget)?;
    if let Some(level) = trans.failure_level {
        let (w1, w2) = trans.witnesses.clone().unwrap_or_default();
        return Err(Error::HypothesisUnmet(format!(
            "dual action is not transitive at level {level}: state words {w1} and {w2} lie in distinct orbits"
        )));
    }
    if trans.budget_exceeded_at.is_some() {
        return Err(Error::SizeLimitExceeded {
            required: (machine.n_states() as u128).pow(n as u32 + 1),
            limit: orbit_budget,
        });
    }

    let q = machine.n_states();
    let power_n = explicit_power(machine, n, size_limit)?;
    let power_n1 = explicit_power(machine, n + 1, size_limit)?;
    let part_n = nerode_partition(&power_n);
    let part_n1 = nerode_partition(&power_n1);
    let s_n = part_n.n_classes() as u64;
    let s_n1 = part_n1.n_classes() as u64;

    let qn: usize = q.pow(n as u32);
    let mut checks = Lemma1Checks {
        decompositions_exact: true,
        right_index_unambiguous: true,
        left_index_unambiguous: true,
        side_cardinalities_equal: true,
        cardinality_constant: true,
        ratio_law: true,
        size_equality_biconditional: true,
    };
    let mut decompositions = Vec::with_capacity(part_n1.n_classes());
    let mut common_cardinality: Option<usize> = None;

    for (d_ix, d_members) in part_n1.classes.iter().enumerate() {
        // right: group members of D by their last coordinate
        let mut right_groups: Vec<Vec<u32>> = vec![Vec::new(); q];
        // left: group by the first coordinate
        let mut left_groups: Vec<Vec<u32>> = vec![Vec::new(); q];
        for &w in d_members {
            right_groups[w as usize % q].push(w / q as u32);
            left_groups[w as usize / qn].push(w % qn as u32);
        }
        let right = match_groups(&right_groups, &part_n, machine, &mut checks);
        let left = match_groups(&left_groups, &part_n, machine, &mut checks);

        // independent uniqueness check: no q admits two distinct classes
        // whose append (resp. prepend) lands inside D
        for q_ix in 0..q as u32 {
            let rights = (0..part_n.n_classes()).filter(|&i| {
                part_n.classes[i]
                    .iter()
                    .all(|&w| part_n1.class_of[w as usize * q + q_ix as usize] as usize == d_ix)
            });
            if rights.count() > 1 {
                checks.right_index_unambiguous = false;
            }
            let lefts = (0..part_n.n_classes()).filter(|&i| {
                part_n.classes[i]
                    .iter()
                    .all(|&w| part_n1.class_of[q_ix as usize * qn + w as usize] as usize == d_ix)
            });
            if lefts.count() > 1 {
                checks.left_index_unambiguous = false;
            }
        }

        if right.len() != left.len() {
            checks.side_cardinalities_equal = false;
        }
        match common_cardinality {
            None => common_cardinality = Some(right.len()),
            Some(c) if c != right.len() => checks.cardinality_constant = false,
            _ => {}
        }
        decompositions.push(ClassDecomposition {
            class: d_ix,
            right,
            left,
        });
    }

    let r = common_cardinality.unwrap_or(0) as u64;
    // #Q_D · s_{n+1} = |Q| · s_n, i.e. #Q_D is the class-size ratio
    if r * s_n1 != q as u64 * s_n {
        checks.ratio_law = false;
    }
    let sizes_equal = s_n == s_n1;
    let ratio_is_full = r == q as u64;
    let all_sides_full = decompositions
        .iter()
        .all(|d| d.right.len() == q && d.left.len() == q);
    if sizes_equal != ratio_is_full || sizes_equal != all_sides_full {
        checks.size_equality_biconditional = false;
    }

    let word_strings = |part: &crate::minimize::StatePartition, len: usize| -> Vec<Vec<String>> {
        part.classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|&w| format_power_word(machine, w as u64, len))
                    .collect()
            })
            .collect()
    };

    Ok(Lemma1Report {
        n,
        n_states: q,
        size_n: s_n,
        size_n1: s_n1,
        msize_ratio: reduce(s_n1, s_n),
        class_cardinality_ratio: r,
        classes_n: word_strings(&part_n, n),
        classes_n1: word_strings(&part_n1, n + 1),
        decompositions,
        checks,
    })
}

/// Matches each nonempty group against a full class of the lower power;
/// exactness failures are recorded rather than fatal.
fn match_groups(
    groups: &[Vec<u32>],
    part_n: &crate::minimize::StatePartition,
    machine: &MealyMachine,
    checks: &mut Lemma1Checks,
) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    for (q_ix, group) in groups.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let class_ix = part_n.class_of[group[0] as usize] as usize;
        let mut sorted = group.clone();
        sorted.sort_unstable();
        if sorted != part_n.classes[class_ix] {
            checks.decompositions_exact = false;
        }
        out.push((machine.state_name(q_ix as u32), class_ix));
    }
    out
}

/// Digits of the lexicographic power-state index, rendered with the base
/// machine's labels.
fn format_power_word(machine: &MealyMachine, index: u64, len: usize) -> String {
    let q = machine.n_states() as u64;
    let mut digits = vec![0u32; len];
    let mut idx = index;
    for d in digits.iter_mut().rev() {
        *d = (idx % q) as u32;
        idx /= q;
    }
    machine.format_state_word(&StateWord(digits))
}

// ---------------------------------------------------------------------
// Stabilization proposition
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepStatus {
    #[serde(rename = "HOLDS")]
    Holds,
    #[serde(rename = "VACUOUS")]
    Vacuous,
    #[serde(rename = "VIOLATED")]
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub depth: usize,
    pub sizes: Vec<u64>,
    /// Status of `s_{n+1} = s_n ⇒ s_{n+2} = s_{n+1}` for each applicable `n`.
    pub steps: Vec<(usize, StepStatus)>,
    pub dual_transitive_up_to: usize,
    pub violated: bool,
    pub truncated: bool,
}

/// Checks, over the computed size sequence, that one stabilization step
/// forces the next: whenever `s_{n+1} = s_n`, also `s_{n+2} = s_{n+1}`.
pub fn proposition_verify(
    machine: &MealyMachine,
    depth: usize,
    size_limit: u64,
    orbit_budget: u64,
) -> Result<PropositionReport> {
    machine.require_invertible()?;
    machine.require_reversible()?;
    if depth < 3 {
        return Err(Error::InvalidArgument(
            "depth must be at least 3 to observe a stabilization step".into(),
        ));
    }
    let sizes_report = minimized_power_sizes(machine, depth, size_limit)?;
    let trans = level_transitive_up_to(&machine.dual(), depth, orbit_budget)?;
    let sizes = &sizes_report.sizes;
    let mut steps = Vec::new();
    let mut violated = false;
    for n in 1..=sizes.len().saturating_sub(2) {
        let status = if sizes[n] == sizes[n - 1] {
            if sizes[n + 1] == sizes[n] {
                StepStatus::Holds
            } else {
                violated = true;
                StepStatus::Violated
            }
        } else {
            StepStatus::Vacuous
        };
        steps.push((n, status));
    }
    Ok(PropositionReport {
        depth,
        sizes: sizes.clone(),
        steps,
        dual_transitive_up_to: trans.transitive_up_to,
        violated,
        truncated: sizes_report.truncated,
    })
}

// ---------------------------------------------------------------------
// Finiteness probe
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinitenessVerdict {
    #[serde(rename = "FINITE-EVIDENCE")]
    FiniteEvidence,
    #[serde(rename = "INFINITE-EVIDENCE")]
    InfiniteEvidence,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl std::fmt::Display for FinitenessVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FinitenessVerdict::FiniteEvidence => "FINITE-EVIDENCE",
            FinitenessVerdict::InfiniteEvidence => "INFINITE-EVIDENCE",
            FinitenessVerdict::Unknown => "UNKNOWN",
        })
    }
}

/// Stabilization window: this many consecutive equal maxima count as
/// finiteness evidence.
pub const FINITENESS_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessReport {
    pub verdict: FinitenessVerdict,
    pub depth: usize,
    pub size_bound: u64,
    /// Per power `k`, the largest minimized size over the connected
    /// components of `A^k`.
    pub max_component_msize: Vec<u64>,
    pub window: usize,
    pub reason: String,
    pub truncated: bool,
}

/// Tracks the maximal minimized component size across powers. The
/// verdicts are evidence, not proof: the bounded-components criterion is
/// existential and gives no computable threshold.
pub fn finiteness_probe(
    machine: &MealyMachine,
    depth: usize,
    size_bound: u64,
    size_limit: u64,
) -> Result<FinitenessReport> {
    machine.require_reversible()?;
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut maxima = Vec::new();
    let mut truncated = false;
    for k in 1..=depth {
        let required = (machine.n_states() as u128).pow(k as u32);
        if required > size_limit as u128 {
            truncated = true;
            break;
        }
        let power = explicit_power(machine, k, size_limit)?;
        let part = nerode_partition(&power);
        let components = power.connected_components();
        let mut max_this = 0u64;
        for comp in &components {
            let mut class_ids: Vec<u32> = comp.iter().map(|&s| part.class_of[s as usize]).collect();
            class_ids.sort_unstable();
            class_ids.dedup();
            max_this = max_this.max(class_ids.len() as u64);
        }
        maxima.push(max_this);
    }

    let (verdict, reason) = judge_finiteness(&maxima, size_bound, truncated);
    Ok(FinitenessReport {
        verdict,
        depth,
        size_bound,
        max_component_msize: maxima,
        window: FINITENESS_WINDOW,
        reason,
        truncated,
    })
}

fn judge_finiteness(maxima: &[u64], size_bound: u64, truncated: bool) -> (FinitenessVerdict, String) {
    if let Some((k, &m)) = maxima.iter().enumerate().find(|(_, &m)| m > size_bound) {
        return (
            FinitenessVerdict::InfiniteEvidence,
            format!("component minimization size {m} exceeds bound {size_bound} at power {}", k + 1),
        );
    }
    let w = FINITENESS_WINDOW;
    if maxima.len() >= w {
        let tail = &maxima[maxima.len() - w..];
        if tail.windows(2).all(|p| p[0] < p[1]) {
            return (
                FinitenessVerdict::InfiniteEvidence,
                format!("maxima grow strictly across the last {w} powers: {tail:?}"),
            );
        }
        if tail.windows(2).all(|p| p[0] == p[1]) {
            return (
                FinitenessVerdict::FiniteEvidence,
                format!("maxima stable at {} for the last {w} powers", tail[0]),
            );
        }
    }
    let why = if truncated {
        "size limit cut the probe short"
    } else {
        "no stabilization or strict growth window observed"
    };
    (FinitenessVerdict::Unknown, why.to_string())
}

// ---------------------------------------------------------------------
// Freeness and relations
// ---------------------------------------------------------------------

/// A pair of distinct state words inducing the same action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationWitness {
    pub u: String,
    pub v: String,
    pub u_len: usize,
    pub v_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreenessVerdict {
    #[serde(rename = "FREE-TO-DEPTH")]
    FreeToDepth,
    #[serde(rename = "NOT-FREE")]
    NotFree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub verdict: FreenessVerdict,
    pub depth: usize,
    /// Levels actually verified (smaller than `depth` only when a limit
    /// interfered).
    pub depth_completed: usize,
    pub witness: Option<RelationWitness>,
    pub truncated: bool,
}

/// Checks whether all nonempty state words of length at most `depth`
/// induce pairwise distinct actions. At fixed length this is
/// `s_k = |Q|^k`; across lengths, interned signatures detect repeats.
/// The first collision, in shortlex scanning order, becomes the witness.
pub fn freeness_check(
    machine: &MealyMachine,
    depth: usize,
    size_limit: u64,
    scan_budget: u64,
) -> Result<FreenessReport> {
    let scan = scan_elements(machine, depth, size_limit, scan_budget, true)?;
    Ok(FreenessReport {
        verdict: if scan.first_witness.is_some() {
            FreenessVerdict::NotFree
        } else {
            FreenessVerdict::FreeToDepth
        },
        depth,
        depth_completed: scan.depth_completed,
        witness: scan.first_witness,
        truncated: scan.truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationsReport {
    pub max_len: usize,
    pub relations: Vec<RelationWitness>,
    pub truncated: bool,
}

/// Enumerates minimal relations up to `max_len`: for each collision, the
/// shortlex-first word of the action is paired with the first later word
/// inducing it, and pairs whose later word is reducible by an earlier
/// relation are dropped.
pub fn find_relations(
    machine: &MealyMachine,
    max_len: usize,
    size_limit: u64,
    scan_budget: u64,
) -> Result<RelationsReport> {
    let scan = scan_elements(machine, max_len, size_limit, scan_budget, false)?;
    Ok(RelationsReport {
        max_len,
        relations: scan.relations,
        truncated: scan.truncated,
    })
}

struct ScanOutcome {
    depth_completed: usize,
    truncated: bool,
    first_witness: Option<RelationWitness>,
    relations: Vec<RelationWitness>,
}

/// Shortlex scan of all state words up to `depth`, identifying actions
/// across levels. With `stop_at_first` the scan ends at the first
/// collision.
fn scan_elements(
    machine: &MealyMachine,
    depth: usize,
    size_limit: u64,
    scan_budget: u64,
    stop_at_first: bool,
) -> Result<ScanOutcome> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let seq = PowerSequence::build(machine, depth, size_limit)?;
    let mut interner = ActionInterner::new();
    // element id → shortlex-first word
    let mut first_word: Vec<Vec<u32>> = Vec::new();
    // right sides of emitted relations, for the reducibility filter
    let mut emitted_rhs: Vec<Vec<u32>> = Vec::new();
    let mut relations = Vec::new();
    let mut first_witness = None;
    let q = machine.n_states();
    let mut truncated = seq.truncated();
    let mut depth_completed = 0;
    let mut states_prev: Vec<u32> = Vec::new();
    let mut scanned = 0u64;

    'levels: for k in 1..=seq.depth_completed() {
        // element id of every B_k state, interned against earlier levels
        let b = seq.machine_at(k);
        let mut elem_of_state = Vec::with_capacity(b.n_states());
        for st in 0..b.n_states() as u32 {
            let (id, is_new) = interner.intern(&seq, k, st);
            if is_new {
                first_word.push(Vec::new());
            }
            elem_of_state.push(id);
        }

        let states_k = seq.extend_word_states(k, &states_prev);
        scanned += states_k.len() as u64;
        if scanned > scan_budget {
            truncated = true;
            break 'levels;
        }
        let mut word = vec![0u32; k];
        for (w_ix, &st) in states_k.iter().enumerate() {
            decode_base(w_ix as u64, q as u64, &mut word);
            let elem = elem_of_state[st as usize] as usize;
            if first_word[elem].is_empty() {
                first_word[elem] = word.clone();
            } else {
                let u = &first_word[elem];
                let witness = RelationWitness {
                    u: machine.format_state_word(&StateWord(u.clone())),
                    v: machine.format_state_word(&StateWord(word.clone())),
                    u_len: u.len(),
                    v_len: word.len(),
                };
                if first_witness.is_none() {
                    first_witness = Some(witness.clone());
                    if stop_at_first {
                        depth_completed = k;
                        break 'levels;
                    }
                }
                if !emitted_rhs.iter().any(|rhs| contains_factor(&word, rhs)) {
                    emitted_rhs.push(word.clone());
                    relations.push(witness);
                }
            }
        }
        states_prev = states_k;
        depth_completed = k;
    }

    Ok(ScanOutcome {
        depth_completed,
        truncated,
        first_witness,
        relations,
    })
}

fn decode_base(mut idx: u64, base: u64, digits: &mut [u32]) {
    for d in digits.iter_mut().rev() {
        *d = (idx % base) as u32;
        idx /= base;
    }
}

fn contains_factor(word: &[u32], factor: &[u32]) -> bool {
    if factor.is_empty() || factor.len() > word.len() {
        return false;
    }
    word.windows(factor.len()).any(|w| w == factor)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::power::{DEFAULT_ORBIT_BUDGET, DEFAULT_SIZE_LIMIT};

    fn certify(name: &str, depth: usize) -> CertificateReport {
        exponential_growth_certificate(
            &builtin(name).unwrap(),
            depth,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap()
    }

    #[test]
    fn growth_of_identity_is_constant_one() {
        let rep = growth_function(&builtin("identity2x2").unwrap(), 5, DEFAULT_SIZE_LIMIT, false)
            .unwrap();
        assert_eq!(rep.gamma, vec![1; 5]);
        assert_eq!(rep.new_at_length, vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn growth_of_fig1_starts_at_two() {
        let rep =
            growth_function(&builtin("fig1").unwrap(), 4, DEFAULT_SIZE_LIMIT, false).unwrap();
        assert_eq!(rep.new_at_length[0], 2);
        assert_eq!(rep.gamma[0], 2);
        // gamma is nondecreasing and bounded by the word count
        for w in rep.gamma.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn growth_matches_brute_force_on_small_machines() {
        for name in ["fig1", "adding", "identity1x2"] {
            let m = builtin(name).unwrap();
            let rep = growth_function(&m, 4, DEFAULT_SIZE_LIMIT, false).unwrap();
            // brute force: enumerate all words, dedup by action on Σ^{≤7}
            let mut seen: std::collections::HashSet<Vec<u32>> = Default::default();
            let mut gamma_oracle = Vec::new();
            let mut words: Vec<Vec<u32>> = vec![Vec::new()];
            for _len in 1..=4usize {
                let mut next = Vec::new();
                for w in &words {
                    for x in 0..m.n_states() as u32 {
                        let mut w2 = w.clone();
                        w2.push(x);
                        next.push(w2);
                    }
                }
                for w in &next {
                    let key = action_table(&m, w, 7);
                    seen.insert(key);
                }
                gamma_oracle.push(seen.len() as u64);
                words = next;
            }
            assert_eq!(rep.gamma, gamma_oracle, "machine {name}");
        }
    }

    /// Flattened images of every word of length ≤ max, as an exact
    /// action fingerprint for tiny oracle machines.
    fn action_table(m: &crate::machine::MealyMachine, u: &[u32], max: usize) -> Vec<u32> {
        let mut out = Vec::new();
        let letters = m.n_letters() as u64;
        for len in 1..=max {
            for packed in 0..letters.pow(len as u32) {
                let mut digits = vec![0u32; len];
                decode_base(packed, letters, &mut digits);
                let mut cur = digits;
                for &x in u {
                    cur = m.apply_state(x, &cur);
                }
                out.extend(cur);
            }
        }
        out
    }

    #[test]
    fn group_growth_counts_symmetric_generators() {
        let m = builtin("fig1").unwrap();
        let rep = growth_function(&m, 3, DEFAULT_SIZE_LIMIT, true).unwrap();
        assert_eq!(rep.generators, "states-and-inverses");
        // brute force over the union machine with the inverse states
        let union = m.disjoint_union(&m.inverse().unwrap()).unwrap();
        let mut seen: std::collections::HashSet<Vec<u32>> = Default::default();
        let mut gamma_oracle = Vec::new();
        let mut words: Vec<Vec<u32>> = vec![Vec::new()];
        for _len in 1..=3usize {
            let mut next = Vec::new();
            for w in &words {
                for x in 0..union.n_states() as u32 {
                    let mut w2 = w.clone();
                    w2.push(x);
                    next.push(w2);
                }
            }
            for w in &next {
                seen.insert(action_table(&union, w, 8));
            }
            gamma_oracle.push(seen.len() as u64);
            words = next;
        }
        assert_eq!(rep.gamma, gamma_oracle);
        // identity elements appear at length 2 (x·x⁻¹), so gamma grows
        // slower than the free count from there on
        assert_eq!(rep.gamma[0], 4);
    }

    #[test]
    fn fig1_certificate_is_exponential() {
        let rep = certify("fig1", 8);
        assert_eq!(rep.verdict, CertificateVerdict::ExponentialCertified);
        assert_eq!(rep.sizes[0], 2);
        assert!(rep.all_ratios_integral);
        assert!(rep.lower_bound_ok);
        for (i, &s) in rep.sizes.iter().enumerate() {
            assert!(s >= 1 << (i + 1));
        }
    }

    #[test]
    fn identity_certificates_fail_the_hypothesis() {
        let rep = certify("identity2x2", 4);
        assert_eq!(rep.verdict, CertificateVerdict::HypothesisFailed);
        assert_eq!(rep.failed_level, Some(1));
        assert!(rep.witnesses.is_some());

        // the one-state identity is degenerate: its dual tree has arity 1
        let rep = certify("identity1x2", 4);
        assert_eq!(rep.verdict, CertificateVerdict::HypothesisFailed);
        assert_eq!(rep.failed_level, Some(1));
        assert!(rep.reason.as_deref().unwrap_or("").contains("degenerate"));
    }

    #[test]
    fn adding_machine_is_rejected_by_the_certificate() {
        let err = exponential_growth_certificate(
            &builtin("adding").unwrap(),
            4,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotReversible { .. }));
    }

    #[test]
    fn certificate_budget_truncation_is_inconclusive() {
        let rep = exponential_growth_certificate(
            &builtin("fig1").unwrap(),
            8,
            20, // cuts the size sequence after level 2
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap();
        assert_eq!(rep.verdict, CertificateVerdict::Inconclusive);
        assert!(rep.reason.is_some());
    }

    #[test]
    fn lemma1_holds_on_fig1_level_one() {
        let rep = lemma1_verify(
            &builtin("fig1").unwrap(),
            1,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap();
        assert!(rep.checks.all_ok(), "{:?}", rep.checks);
        assert_eq!(rep.size_n, 2);
        assert_eq!(rep.size_n1, 4);
        assert_eq!(rep.class_cardinality_ratio, 2);
        assert_eq!(rep.msize_ratio, (2, 1));
        assert_eq!(rep.classes_n, vec![vec!["x", "y"], vec!["z", "t"]]);
        // every class of Q^2 decomposes from exactly two right factors
        for d in &rep.decompositions {
            assert_eq!(d.right.len(), 2);
            assert_eq!(d.left.len(), 2);
        }
    }

    #[test]
    fn lemma1_is_trivial_on_the_one_state_machine() {
        // single state q over one letter: dual is a one-state machine on
        // one letter, transitive at every level
        let m = crate::format::parse("states q\nletters 0\nq 0 -> q 0\n").unwrap();
        let rep = lemma1_verify(&m, 1, DEFAULT_SIZE_LIMIT, DEFAULT_ORBIT_BUDGET).unwrap();
        assert!(rep.checks.all_ok());
        assert_eq!(rep.class_cardinality_ratio, 1);
        assert_eq!(rep.size_n, rep.size_n1);
    }

    #[test]
    fn lemma1_rejects_an_untransitive_dual() {
        let err = lemma1_verify(
            &builtin("identity2x2").unwrap(),
            1,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap_err();
        match err {
            Error::HypothesisUnmet(msg) => assert!(msg.contains("not transitive"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn proposition_holds_on_constant_sequences() {
        let rep = proposition_verify(
            &builtin("identity2x2").unwrap(),
            5,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap();
        assert!(!rep.violated);
        assert!(rep.steps.iter().all(|&(_, s)| s == StepStatus::Holds));
    }

    #[test]
    fn proposition_is_vacuous_on_fig1() {
        let rep = proposition_verify(
            &builtin("fig1").unwrap(),
            6,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap();
        assert!(!rep.violated);
        assert!(rep.steps.iter().all(|&(_, s)| s == StepStatus::Vacuous));
        assert_eq!(rep.dual_transitive_up_to, 6);
    }

    #[test]
    fn finiteness_probe_on_identity_and_fig1() {
        let rep = finiteness_probe(&builtin("identity2x2").unwrap(), 4, 64, DEFAULT_SIZE_LIMIT)
            .unwrap();
        assert_eq!(rep.verdict, FinitenessVerdict::FiniteEvidence);
        assert_eq!(rep.max_component_msize, vec![1, 1, 1, 1]);

        let rep = finiteness_probe(&builtin("fig1").unwrap(), 4, 1_000, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(rep.verdict, FinitenessVerdict::InfiniteEvidence);

        let err = finiteness_probe(&builtin("adding").unwrap(), 4, 64, DEFAULT_SIZE_LIMIT)
            .unwrap_err();
        assert!(matches!(err, Error::NotReversible { .. }));
    }

    #[test]
    fn fig1_is_not_free_with_the_shortest_witness() {
        let rep = freeness_check(
            &builtin("fig1").unwrap(),
            4,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_SCAN_BUDGET,
        )
        .unwrap();
        assert_eq!(rep.verdict, FreenessVerdict::NotFree);
        let w = rep.witness.unwrap();
        assert_eq!((w.u.as_str(), w.v.as_str()), ("x", "y"));
        assert_eq!((w.u_len, w.v_len), (1, 1));
    }

    #[test]
    fn freeness_catches_cross_length_collisions() {
        // the one-state identity never fails the per-length count
        // (|Q|^k = 1 throughout); only the cross-length comparison finds
        // the idempotence relation
        let rep = freeness_check(
            &builtin("identity1x2").unwrap(),
            3,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_SCAN_BUDGET,
        )
        .unwrap();
        assert_eq!(rep.verdict, FreenessVerdict::NotFree);
        let w = rep.witness.unwrap();
        assert_eq!((w.u_len, w.v_len), (1, 2));
    }

    #[test]
    fn fig1_relations_at_length_one() {
        let rep = find_relations(
            &builtin("fig1").unwrap(),
            1,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_SCAN_BUDGET,
        )
        .unwrap();
        let pairs: Vec<(&str, &str)> = rep
            .relations
            .iter()
            .map(|r| (r.u.as_str(), r.v.as_str()))
            .collect();
        assert_eq!(pairs, vec![("x", "y"), ("z", "t")]);
    }

    #[test]
    fn identity_relation_is_idempotence() {
        let rep = find_relations(
            &builtin("identity1x2").unwrap(),
            2,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_SCAN_BUDGET,
        )
        .unwrap();
        let pairs: Vec<(&str, &str)> = rep
            .relations
            .iter()
            .map(|r| (r.u.as_str(), r.v.as_str()))
            .collect();
        assert_eq!(pairs, vec![("q0", "q0.q0")]);
    }

    #[test]
    fn reducible_relations_are_filtered() {
        let rep = find_relations(
            &builtin("identity1x2").unwrap(),
            4,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_SCAN_BUDGET,
        )
        .unwrap();
        // q0q0q0 contains the emitted right side q0q0 as a factor
        assert_eq!(rep.relations.len(), 1);
    }

    #[test]
    fn relation_witnesses_agree_on_words_up_to_ten() {
        let m = builtin("fig1").unwrap();
        let rep = find_relations(&m, 2, DEFAULT_SIZE_LIMIT, DEFAULT_SCAN_BUDGET).unwrap();
        assert!(!rep.relations.is_empty());
        for r in &rep.relations {
            let u = m.parse_state_word(&r.u).unwrap();
            let v = m.parse_state_word(&r.v).unwrap();
            for len in 0..=10usize {
                for packed in 0..(1u64 << len) {
                    let s: Vec<u32> = (0..len).map(|b| ((packed >> b) & 1) as u32).collect();
                    let sw = crate::machine::LetterWord(s);
                    assert_eq!(m.apply(&u, &sw).unwrap(), m.apply(&v, &sw).unwrap());
                }
            }
        }
    }
}
