//! Powers of a machine and depth-bounded level-transitivity.
//!
//! The `n`-th power acts on the same alphabet with state set `Q^n`; its
//! states induce the composed actions `ρ_u`. Sizes of the *minimized*
//! powers drive the growth results, so the sequence `s_n = #𝔪(A^n)` is
//! computed by iterated minimization `B_{k+1} = 𝔪(B_k · A)` and memoized
//! together with the quotient maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::MealyMachine;
use crate::minimize::minimize;

/// Default cap on the state count of any machine built by the power
/// iteration or an explicit power.
pub const DEFAULT_SIZE_LIMIT: u64 = 1_000_000;

/// Default cap on `|Σ|^n`, the number of words visited per level by the
/// orbit search.
pub const DEFAULT_ORBIT_BUDGET: u64 = 1 << 26;

/// Explicit `n`-th power: state set `Q^n` in lexicographic order (first
/// coordinate most significant), built by iterated left-associative
/// product.
pub fn explicit_power(machine: &MealyMachine, n: usize, size_limit: u64) -> Result<MealyMachine> {
    if n == 0 {
        return Err(Error::InvalidArgument("power exponent must be at least 1".into()));
    }
    let required = (machine.n_states() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if required > size_limit as u128 {
        return Err(Error::SizeLimitExceeded {
            required,
            limit: size_limit,
        });
    }
    let base = machine.clone().with_labels(None, None).expect("label reset");
    let mut acc = base.clone();
    for _ in 1..n {
        acc = acc.product(&base)?;
    }
    // label small powers with their state words
    let labels = if machine.state_labels().is_some() && acc.n_states() <= 1 << 16 {
        let mut labels = Vec::with_capacity(acc.n_states());
        let mut word = vec![0u32; n];
        loop {
            labels.push(machine.format_state_word(&crate::machine::StateWord(word.clone())));
            // next word in lexicographic order
            let mut j = n;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                word[j] += 1;
                if (word[j] as usize) < machine.n_states() {
                    break;
                }
                word[j] = 0;
            }
            if word.iter().all(|&x| x == 0) {
                break;
            }
        }
        Some(labels)
    } else {
        None
    };
    acc.with_labels(labels, machine.letter_labels().map(|l| l.to_vec()))
}

/// The memoized sequence `B_k = 𝔪(A^k)`, computed as `B_1 = 𝔪(A)` and
/// `B_{k+1} = 𝔪(B_k · A)`, together with the quotient maps needed to
/// locate the class of any explicit state word.
#[derive(Debug, Clone)]
pub struct PowerSequence {
    base: MealyMachine,
    /// `machines[k-1]` is `B_k`.
    machines: Vec<MealyMachine>,
    /// `quotients[0][q]` maps a base state to its `B_1` class;
    /// `quotients[k][b * |Q| + q]` maps a `(B_k, Q)` product state to its
    /// `B_{k+1}` class.
    quotients: Vec<Vec<u32>>,
    truncated: bool,
    size_limit: u64,
}

impl PowerSequence {
    /// Builds the sequence up to `depth`, stopping early (with the
    /// truncation flag) once the next product would exceed `size_limit`
    /// states.
    pub fn build(machine: &MealyMachine, depth: usize, size_limit: u64) -> Result<PowerSequence> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let base = machine.clone().with_labels(None, None).expect("label reset");
        let mut machines = Vec::new();
        let mut quotients = Vec::new();
        let mut truncated = false;
        if (base.n_states() as u64) > size_limit {
            truncated = true;
        } else {
            let (b1, p1) = minimize(&base);
            machines.push(b1);
            quotients.push(p1.class_of);
            while machines.len() < depth {
                let last = machines.last().unwrap();
                let required = last.n_states() as u64 * base.n_states() as u64;
                if required > size_limit {
                    truncated = true;
                    break;
                }
                let prod = last.product(&base)?;
                let (bk, pk) = minimize(&prod);
                machines.push(bk);
                quotients.push(pk.class_of);
            }
        }
        Ok(PowerSequence {
            base,
            machines,
            quotients,
            truncated,
            size_limit,
        })
    }

    pub fn base(&self) -> &MealyMachine {
        &self.base
    }

    /// Number of levels actually computed.
    pub fn depth_completed(&self) -> usize {
        self.machines.len()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn size_limit(&self) -> u64 {
        self.size_limit
    }

    /// `B_k` for `1 ≤ k ≤ depth_completed()`.
    pub fn machine_at(&self, k: usize) -> &MealyMachine {
        &self.machines[k - 1]
    }

    /// `s_k = #𝔪(A^k)` for the computed levels.
    pub fn sizes(&self) -> Vec<u64> {
        self.machines.iter().map(|m| m.n_states() as u64).collect()
    }

    /// The `B_k` state realizing the action of an explicit state word.
    pub fn state_of_word(&self, word: &[u32]) -> u32 {
        assert!(!word.is_empty() && word.len() <= self.machines.len());
        let q = self.base.n_states() as u32;
        let mut st = self.quotients[0][word[0] as usize];
        for (k, &x) in word.iter().enumerate().skip(1) {
            st = self.quotients[k][(st * q + x) as usize];
        }
        st
    }

    /// Extends the lexicographic word→class table from level `k-1` to
    /// level `k` (`prev` is ignored for `k == 1`).
    pub fn extend_word_states(&self, k: usize, prev: &[u32]) -> Vec<u32> {
        let q = self.base.n_states();
        if k == 1 {
            return (0..q).map(|x| self.quotients[0][x]).collect();
        }
        let quot = &self.quotients[k - 1];
        let mut out = Vec::with_capacity(prev.len() * q);
        for &st in prev {
            let row = st as usize * q;
            for x in 0..q {
                out.push(quot[row + x]);
            }
        }
        out
    }
}

/// The sequence `s_n = #𝔪(A^n)` with ratio and stabilization
/// diagnostics. Ratios are exact reduced rationals `[num, den]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSequenceReport {
    pub depth: usize,
    pub sizes: Vec<u64>,
    pub ratios: Vec<(u64, u64)>,
    pub all_ratios_integral: bool,
    /// First `n` with `s_{n+1} = s_n`, if any.
    pub stabilized_at: Option<usize>,
    pub truncated: bool,
}

impl PowerSequenceReport {
    pub fn from_sequence(seq: &PowerSequence, requested_depth: usize) -> PowerSequenceReport {
        let sizes = seq.sizes();
        let mut ratios = Vec::new();
        let mut all_int = true;
        let mut stabilized_at = None;
        for w in sizes.windows(2) {
            let (num, den) = reduce(w[1], w[0]);
            if den != 1 {
                all_int = false;
            }
            ratios.push((num, den));
        }
        for (i, w) in sizes.windows(2).enumerate() {
            if w[1] == w[0] {
                stabilized_at = Some(i + 1);
                break;
            }
        }
        PowerSequenceReport {
            depth: requested_depth,
            sizes,
            ratios,
            all_ratios_integral: all_int,
            stabilized_at,
            truncated: seq.truncated(),
        }
    }
}

/// `s_n = #𝔪(A^n)` for `n = 1..=depth` via iterated minimized powers.
pub fn minimized_power_sizes(
    machine: &MealyMachine,
    depth: usize,
    size_limit: u64,
) -> Result<PowerSequenceReport> {
    let seq = PowerSequence::build(machine, depth, size_limit)?;
    Ok(PowerSequenceReport::from_sequence(&seq, depth))
}

/// Whether each level `Σ^n`, `n ≤ depth`, is a single orbit under the
/// state actions, with witnesses for the first failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub levels_checked: usize,
    pub transitive_up_to: usize,
    pub failure_level: Option<usize>,
    /// Two words in distinct orbits at the first failing level.
    pub witnesses: Option<(String, String)>,
    /// Level at which `|Σ|^n` outgrew the word budget, if any.
    pub budget_exceeded_at: Option<usize>,
}

impl TransitivityReport {
    /// Transitive through every requested level, with no budget cutoff.
    pub fn fully_transitive(&self) -> bool {
        self.failure_level.is_none() && self.budget_exceeded_at.is_none()
    }
}

/// Decides, for each `n ≤ depth`, whether the orbit of `0^n` under the
/// maps `ρ_x` covers `Σ^n`. Words are packed into integers and visited
/// sets are dense bitsets, so a binary alphabet at depth 16 stays cheap.
///
/// Applied to the dual machine this checks, to finite depth, the
/// hypothesis that the dual action is level-transitive.
pub fn level_transitive_up_to(
    machine: &MealyMachine,
    depth: usize,
    budget_words: u64,
) -> Result<TransitivityReport> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let m = machine.n_letters() as u64;
    let mut report = TransitivityReport {
        levels_checked: 0,
        transitive_up_to: 0,
        failure_level: None,
        witnesses: None,
        budget_exceeded_at: None,
    };
    for n in 1..=depth {
        let total = match m.checked_pow(n as u32) {
            Some(t) if t <= budget_words => t,
            _ => {
                report.budget_exceeded_at = Some(n);
                break;
            }
        };
        match orbit_of_zero(machine, n, total) {
            None => {
                report.levels_checked = n;
                report.transitive_up_to = n;
            }
            Some(missing) => {
                report.levels_checked = n;
                report.failure_level = Some(n);
                let zero = crate::machine::LetterWord(vec![0; n]);
                let other = crate::machine::LetterWord(decode_word(missing, m, n));
                report.witnesses = Some((
                    machine.format_letter_word(&zero),
                    machine.format_letter_word(&other),
                ));
                break;
            }
        }
    }
    Ok(report)
}

/// BFS closure of `0^n` under all state actions. Returns the first word
/// (in lexicographic order) left uncovered, or `None` when the orbit is
/// all of `Σ^n`.
fn orbit_of_zero(machine: &MealyMachine, n: usize, total: u64) -> Option<u64> {
    let m = machine.n_letters() as u64;
    let mut visited = BitSet::new(total);
    visited.set(0);
    let mut count = 1u64;
    let mut frontier = vec![0u64];
    let mut digits = vec![0u32; n];
    while let Some(idx) = frontier.pop() {
        decode_into(idx, m, &mut digits);
        for x in 0..machine.n_states() as u32 {
            let mut out = 0u64;
            let mut cur = x;
            for &d in digits.iter() {
                out = out * m + machine.output(cur, d) as u64;
                cur = machine.transition(cur, d);
            }
            if !visited.get(out) {
                visited.set(out);
                count += 1;
                frontier.push(out);
            }
        }
    }
    if count == total {
        None
    } else {
        Some(visited.first_unset(total))
    }
}

fn decode_word(idx: u64, m: u64, n: usize) -> Vec<u32> {
    let mut digits = vec![0u32; n];
    decode_into(idx, m, &mut digits);
    digits
}

fn decode_into(mut idx: u64, m: u64, digits: &mut [u32]) {
    for d in digits.iter_mut().rev() {
        *d = (idx % m) as u32;
        idx /= m;
    }
}

struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(bits: u64) -> BitSet {
        BitSet {
            words: vec![0; bits.div_ceil(64) as usize],
        }
    }

    #[inline]
    fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
    }

    #[inline]
    fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] & (1u64 << (i & 63)) != 0
    }

    fn first_unset(&self, bound: u64) -> u64 {
        for (w, &word) in self.words.iter().enumerate() {
            if word != u64::MAX {
                let bit = (!word).trailing_zeros() as u64;
                let idx = (w as u64) * 64 + bit;
                if idx < bound {
                    return idx;
                }
            }
        }
        bound
    }
}

/// Reduces a fraction of positive integers to lowest terms.
pub(crate) fn reduce(num: u64, den: u64) -> (u64, u64) {
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
