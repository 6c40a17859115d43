//! The core machine type and its algebra: dual, inverse, product, word
//! actions and connectivity.
//!
//! States and letters are dense 0-based indices everywhere; display labels
//! are carried separately and never influence an algorithm.

use crate::error::{Error, Result};

/// A finite, complete, deterministic letter-to-letter transducer.
///
/// Immutable by construction: every operation returns a new machine, so
/// machines can be shared freely between threads and memoized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MealyMachine {
    n_states: usize,
    n_letters: usize,
    /// Transition table, state-major: `delta[x * n_letters + i]`.
    delta: Vec<u32>,
    /// Output table, state-major: `rho[x * n_letters + i]`.
    rho: Vec<u32>,
    state_labels: Option<Vec<String>>,
    letter_labels: Option<Vec<String>>,
}

/// A word over the state set, i.e. an element of `Q^*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateWord(pub Vec<u32>);

/// A word over the alphabet, i.e. an element of `Σ^*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LetterWord(pub Vec<u32>);

impl StateWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl LetterWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for StateWord {
    fn from(v: Vec<u32>) -> Self {
        StateWord(v)
    }
}

impl From<Vec<u32>> for LetterWord {
    fn from(v: Vec<u32>) -> Self {
        LetterWord(v)
    }
}

impl MealyMachine {
    /// Builds a machine from raw tables, checking that every entry is in
    /// range. `delta` and `rho` are state-major `(state, letter)` tables.
    pub fn new(n_states: usize, n_letters: usize, delta: Vec<u32>, rho: Vec<u32>) -> Result<Self> {
        if n_states == 0 || n_letters == 0 {
            return Err(Error::InvalidArgument(
                "a machine needs at least one state and one letter".into(),
            ));
        }
        if delta.len() != n_states * n_letters || rho.len() != n_states * n_letters {
            return Err(Error::InvalidArgument(format!(
                "table size mismatch: expected {} entries, got delta={} rho={}",
                n_states * n_letters,
                delta.len(),
                rho.len()
            )));
        }
        if let Some(&bad) = delta.iter().find(|&&s| s as usize >= n_states) {
            return Err(Error::InvalidState {
                index: bad as usize,
                bound: n_states,
            });
        }
        if let Some(&bad) = rho.iter().find(|&&a| a as usize >= n_letters) {
            return Err(Error::InvalidLetter {
                index: bad as usize,
                bound: n_letters,
            });
        }
        Ok(MealyMachine {
            n_states,
            n_letters,
            delta,
            rho,
            state_labels: None,
            letter_labels: None,
        })
    }

    /// Attaches display labels. Labels must be pairwise distinct and match
    /// the state/letter counts.
    pub fn with_labels(
        mut self,
        state_labels: Option<Vec<String>>,
        letter_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(ref ls) = state_labels {
            check_labels(ls, self.n_states, "state")?;
        }
        if let Some(ref ls) = letter_labels {
            check_labels(ls, self.n_letters, "letter")?;
        }
        self.state_labels = state_labels;
        self.letter_labels = letter_labels;
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_letters(&self) -> usize {
        self.n_letters
    }

    /// `δ_i(x)`: the successor of state `x` on input letter `i`.
    #[inline]
    pub fn transition(&self, x: u32, i: u32) -> u32 {
        self.delta[x as usize * self.n_letters + i as usize]
    }

    /// `ρ_x(i)`: the letter output by state `x` on input letter `i`.
    #[inline]
    pub fn output(&self, x: u32, i: u32) -> u32 {
        self.rho[x as usize * self.n_letters + i as usize]
    }

    /// The output row of a state: `[ρ_x(0), ρ_x(1), …]`.
    #[inline]
    pub fn output_row(&self, x: u32) -> &[u32] {
        let b = x as usize * self.n_letters;
        &self.rho[b..b + self.n_letters]
    }

    /// The transition row of a state: `[δ_0(x), δ_1(x), …]`.
    #[inline]
    pub fn transition_row(&self, x: u32) -> &[u32] {
        let b = x as usize * self.n_letters;
        &self.delta[b..b + self.n_letters]
    }

    pub fn delta_table(&self) -> &[u32] {
        &self.delta
    }

    pub fn rho_table(&self) -> &[u32] {
        &self.rho
    }

    /// Table equality, ignoring labels.
    pub fn same_tables(&self, other: &MealyMachine) -> bool {
        self.n_states == other.n_states
            && self.n_letters == other.n_letters
            && self.delta == other.delta
            && self.rho == other.rho
    }

    pub fn state_labels(&self) -> Option<&[String]> {
        self.state_labels.as_deref()
    }

    pub fn letter_labels(&self) -> Option<&[String]> {
        self.letter_labels.as_deref()
    }

    /// Display name of a state: its label, or its index.
    pub fn state_name(&self, x: u32) -> String {
        match &self.state_labels {
            Some(ls) => ls[x as usize].clone(),
            None => x.to_string(),
        }
    }

    /// Display name of a letter: its label, or its index.
    pub fn letter_name(&self, i: u32) -> String {
        match &self.letter_labels {
            Some(ls) => ls[i as usize].clone(),
            None => i.to_string(),
        }
    }

    fn state_names(&self) -> Vec<String> {
        (0..self.n_states as u32).map(|x| self.state_name(x)).collect()
    }

    fn letter_names(&self) -> Vec<String> {
        (0..self.n_letters as u32).map(|i| self.letter_name(i)).collect()
    }

    /// True iff every `ρ_x` is a permutation of the alphabet.
    pub fn is_invertible(&self) -> bool {
        self.non_invertible_state().is_none()
    }

    /// First state whose output map is not a permutation, if any.
    pub fn non_invertible_state(&self) -> Option<u32> {
        let mut seen = vec![false; self.n_letters];
        for x in 0..self.n_states as u32 {
            seen.fill(false);
            for i in 0..self.n_letters as u32 {
                let o = self.output(x, i) as usize;
                if seen[o] {
                    return Some(x);
                }
                seen[o] = true;
            }
        }
        None
    }

    /// True iff every `δ_i` is a permutation of the state set, i.e. the
    /// dual machine is invertible.
    pub fn is_reversible(&self) -> bool {
        self.non_reversible_letter().is_none()
    }

    /// First letter whose transition map is not a permutation, if any.
    pub fn non_reversible_letter(&self) -> Option<u32> {
        let mut seen = vec![false; self.n_states];
        for i in 0..self.n_letters as u32 {
            seen.fill(false);
            for x in 0..self.n_states as u32 {
                let y = self.transition(x, i) as usize;
                if seen[y] {
                    return Some(i);
                }
                seen[y] = true;
            }
        }
        None
    }

    /// Fails with the precise offender when the machine is not invertible.
    pub fn require_invertible(&self) -> Result<()> {
        match self.non_invertible_state() {
            None => Ok(()),
            Some(x) => Err(Error::NotInvertible {
                state: self.state_name(x),
            }),
        }
    }

    /// Fails with the precise offender when the machine is not reversible.
    pub fn require_reversible(&self) -> Result<()> {
        match self.non_reversible_letter() {
            None => Ok(()),
            Some(i) => Err(Error::NotReversible {
                letter: self.letter_name(i),
            }),
        }
    }

    /// The dual machine `(Σ, Q, ρ, δ)`: states and letters exchange roles.
    ///
    /// Transition of dual-state `i` on input `x` goes to `ρ_x(i)` and
    /// outputs `δ_i(x)`. The dual of the dual is the original machine,
    /// table for table.
    pub fn dual(&self) -> MealyMachine {
        let n = self.n_letters; // dual states
        let m = self.n_states; // dual letters
        let mut delta = vec![0u32; n * m];
        let mut rho = vec![0u32; n * m];
        for i in 0..n as u32 {
            for x in 0..m as u32 {
                delta[i as usize * m + x as usize] = self.output(x, i);
                rho[i as usize * m + x as usize] = self.transition(x, i);
            }
        }
        MealyMachine {
            n_states: n,
            n_letters: m,
            delta,
            rho,
            state_labels: self.letter_labels.clone(),
            letter_labels: self.state_labels.clone(),
        }
    }

    /// The inverse machine, defined for invertible machines: state `x⁻¹`
    /// on input `i` outputs the unique `j` with `ρ_x(j) = i` and moves to
    /// `(δ_j(x))⁻¹`. Inverting twice restores the original tables.
    pub fn inverse(&self) -> Result<MealyMachine> {
        self.require_invertible()?;
        let n = self.n_states;
        let m = self.n_letters;
        let mut delta = vec![0u32; n * m];
        let mut rho = vec![0u32; n * m];
        for x in 0..n as u32 {
            for j in 0..m as u32 {
                let i = self.output(x, j); // ρ_x(j) = i, so x⁻¹ maps i back to j
                delta[x as usize * m + i as usize] = self.transition(x, j);
                rho[x as usize * m + i as usize] = j;
            }
        }
        let state_labels = self
            .state_labels
            .as_ref()
            .map(|ls| ls.iter().map(|l| toggle_inverse_mark(l)).collect());
        Ok(MealyMachine {
            n_states: n,
            n_letters: m,
            delta,
            rho,
            state_labels,
            letter_labels: self.letter_labels.clone(),
        })
    }

    /// Checks that `other` works over the same alphabet: equal letter
    /// counts, and equal letter labels when both machines carry them.
    pub fn require_same_alphabet(&self, other: &MealyMachine) -> Result<()> {
        if self.n_letters != other.n_letters {
            return Err(Error::AlphabetMismatch {
                left: self.n_letters.to_string(),
                right: other.n_letters.to_string(),
            });
        }
        if let (Some(a), Some(b)) = (&self.letter_labels, &other.letter_labels) {
            if a != b {
                return Err(Error::AlphabetMismatch {
                    left: format!("[{}]", a.join(" ")),
                    right: format!("[{}]", b.join(" ")),
                });
            }
        }
        Ok(())
    }

    /// The product machine on `Q_self × Q_other`: state `(a, b)` acts as
    /// `ρ_b ∘ ρ_a` (left factor applied first). On input `i` it outputs
    /// `ρ_b(ρ_a(i))` and moves to `(δ_i(a), δ_{ρ_a(i)}(b))`.
    ///
    /// State `(a, b)` has index `a * |Q_other| + b`, so iterating the
    /// product enumerates power states lexicographically.
    pub fn product(&self, other: &MealyMachine) -> Result<MealyMachine> {
        self.require_same_alphabet(other)?;
        let na = self.n_states;
        let nb = other.n_states;
        let m = self.n_letters;
        let n = na * nb;
        let mut delta = vec![0u32; n * m];
        let mut rho = vec![0u32; n * m];
        for a in 0..na as u32 {
            for b in 0..nb as u32 {
                let s = a as usize * nb + b as usize;
                for i in 0..m as u32 {
                    let mid = self.output(a, i);
                    rho[s * m + i as usize] = other.output(b, mid);
                    let a2 = self.transition(a, i);
                    let b2 = other.transition(b, mid);
                    delta[s * m + i as usize] = a2 * nb as u32 + b2;
                }
            }
        }
        let state_labels = match (&self.state_labels, &other.state_labels) {
            (Some(la), Some(lb)) => Some(join_label_pairs(la, lb)),
            _ => None,
        };
        MealyMachine {
            n_states: n,
            n_letters: m,
            delta,
            rho,
            state_labels,
            letter_labels: self.letter_labels.clone().or_else(|| other.letter_labels.clone()),
        }
        .with_labels_unchecked()
    }

    // Labels produced by join_label_pairs stay distinct whenever the
    // factors' labels are, but re-validate in debug builds.
    fn with_labels_unchecked(self) -> Result<MealyMachine> {
        #[cfg(debug_assertions)]
        {
            if let Some(ref ls) = self.state_labels {
                check_labels(ls, self.n_states, "state")?;
            }
        }
        Ok(self)
    }

    /// Disjoint union of two machines over the same alphabet; states of
    /// `other` are shifted past the states of `self`.
    pub fn disjoint_union(&self, other: &MealyMachine) -> Result<MealyMachine> {
        self.require_same_alphabet(other)?;
        let na = self.n_states;
        let nb = other.n_states;
        let m = self.n_letters;
        let mut delta = Vec::with_capacity((na + nb) * m);
        let mut rho = Vec::with_capacity((na + nb) * m);
        delta.extend_from_slice(&self.delta);
        rho.extend_from_slice(&self.rho);
        for x in 0..nb {
            for i in 0..m {
                delta.push(other.delta[x * m + i] + na as u32);
                rho.push(other.rho[x * m + i]);
            }
        }
        let state_labels = match (&self.state_labels, &other.state_labels) {
            (Some(la), Some(lb)) => {
                let mut ls = la.clone();
                ls.extend(lb.iter().cloned());
                // unions of a machine with a relabeled copy stay distinct;
                // fall back to indices if the caller merged clashing names
                let mut sorted = ls.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() == ls.len() {
                    Some(ls)
                } else {
                    None
                }
            }
            _ => None,
        };
        MealyMachine {
            n_states: na + nb,
            n_letters: m,
            delta,
            rho,
            state_labels,
            letter_labels: self.letter_labels.clone().or_else(|| other.letter_labels.clone()),
        }
        .with_labels_unchecked()
    }

    /// Action of a single state on a letter word: walks `s` through the
    /// machine from `x`, collecting outputs.
    pub fn apply_state(&self, x: u32, s: &[u32]) -> Vec<u32> {
        let mut cur = x;
        let mut out = Vec::with_capacity(s.len());
        for &i in s {
            out.push(self.output(cur, i));
            cur = self.transition(cur, i);
        }
        out
    }

    /// `ρ_u(s)` for a state word `u = x_1 ⋯ x_n`: applies `ρ_{x_1}` first,
    /// then `ρ_{x_2}`, and so on (`ρ_u = ρ_{x_n} ∘ ⋯ ∘ ρ_{x_1}`).
    ///
    /// The result has the same length as `s`, and the image of a prefix is
    /// the prefix of the image.
    pub fn apply(&self, u: &StateWord, s: &LetterWord) -> Result<LetterWord> {
        if u.is_empty() {
            return Err(Error::EmptyStateWord);
        }
        self.check_state_word(u)?;
        self.check_letter_word(s)?;
        let mut cur = s.0.clone();
        for &x in &u.0 {
            cur = self.apply_state(x, &cur);
        }
        Ok(LetterWord(cur))
    }

    pub fn check_state_word(&self, u: &StateWord) -> Result<()> {
        for &x in &u.0 {
            if x as usize >= self.n_states {
                return Err(Error::InvalidState {
                    index: x as usize,
                    bound: self.n_states,
                });
            }
        }
        Ok(())
    }

    pub fn check_letter_word(&self, s: &LetterWord) -> Result<()> {
        for &i in &s.0 {
            if i as usize >= self.n_letters {
                return Err(Error::InvalidLetter {
                    index: i as usize,
                    bound: self.n_letters,
                });
            }
        }
        Ok(())
    }

    /// Weakly connected components of the transition digraph (edges
    /// `x → δ_i(x)`), as a partition of the states. Components are listed
    /// by least member, members ascending.
    pub fn connected_components(&self) -> Vec<Vec<u32>> {
        let mut uf = UnionFind::new(self.n_states);
        for x in 0..self.n_states as u32 {
            for i in 0..self.n_letters as u32 {
                uf.union(x as usize, self.transition(x, i) as usize);
            }
        }
        let comps = uf.into_partition();
        // A component of a reversible machine is always strongly
        // connected; guard the algebra against regressions here.
        debug_assert!(!self.is_reversible() || {
            let sccs = self.strongly_connected_components();
            sccs.len() == comps.len()
        });
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Strongly connected components (Tarjan), listed by least member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<u32>> {
        let n = self.n_states;
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut comps: Vec<Vec<u32>> = Vec::new();

        // Iterative Tarjan: (node, next edge to try).
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&(v, ei)) = call.last() {
                if ei < self.n_letters {
                    call.last_mut().unwrap().1 += 1;
                    let w = self.transition(v as u32, ei as u32) as usize;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            comp.push(w as u32);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// States reachable from `x` (including `x`), in BFS order with
    /// letters visited in index order.
    pub fn reachable_from(&self, x: u32) -> Vec<u32> {
        let mut seen = vec![false; self.n_states];
        let mut order = vec![x];
        seen[x as usize] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for i in 0..self.n_letters as u32 {
                let w = self.transition(v, i);
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    order.push(w);
                }
            }
        }
        order
    }

    /// Renders a state word with this machine's labels. Single-character
    /// labels concatenate; otherwise members are joined with dots.
    pub fn format_state_word(&self, u: &StateWord) -> String {
        format_word(&u.0, &self.state_names())
    }

    /// Renders a letter word with this machine's labels.
    pub fn format_letter_word(&self, s: &LetterWord) -> String {
        format_word(&s.0, &self.letter_names())
    }

    /// Parses a state word: comma-separated labels, or concatenated
    /// single-character labels.
    pub fn parse_state_word(&self, input: &str) -> Result<StateWord> {
        parse_word(input, &self.state_names(), "state").map(StateWord)
    }

    /// Parses a letter word; the empty string is the empty word.
    pub fn parse_letter_word(&self, input: &str) -> Result<LetterWord> {
        if input.is_empty() {
            return Ok(LetterWord(Vec::new()));
        }
        parse_word(input, &self.letter_names(), "letter").map(LetterWord)
    }
}

fn check_labels(labels: &[String], expected: usize, kind: &'static str) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "{kind} labels: expected {expected}, got {}",
            labels.len()
        )));
    }
    let mut sorted: Vec<&String> = labels.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidArgument(format!(
                "duplicate {kind} label '{}'",
                w[0]
            )));
        }
    }
    Ok(())
}

/// `x` becomes `x'` and `x'` becomes `x`, so double inversion restores
/// the original labels.
fn toggle_inverse_mark(label: &str) -> String {
    match label.strip_suffix('\'') {
        Some(base) => base.to_string(),
        None => format!("{label}'"),
    }
}

fn join_label_pairs(la: &[String], lb: &[String]) -> Vec<String> {
    let compact = la.iter().chain(lb).all(|l| l.chars().count() == 1);
    let mut out = Vec::with_capacity(la.len() * lb.len());
    for a in la {
        for b in lb {
            if compact {
                out.push(format!("{a}{b}"));
            } else {
                out.push(format!("{a}.{b}"));
            }
        }
    }
    out
}

fn format_word(indices: &[u32], names: &[String]) -> String {
    if indices.is_empty() {
        return String::new();
    }
    let compact = names.iter().all(|l| l.chars().count() == 1);
    let parts: Vec<&str> = indices.iter().map(|&i| names[i as usize].as_str()).collect();
    if compact {
        parts.concat()
    } else {
        parts.join(".")
    }
}

fn parse_word(input: &str, names: &[String], kind: &'static str) -> Result<Vec<u32>> {
    let lookup = |token: &str| -> Result<u32> {
        names
            .iter()
            .position(|n| n == token)
            .map(|p| p as u32)
            .ok_or_else(|| Error::WordParse {
                input: input.to_string(),
                kind,
                reason: format!("unknown {kind} '{token}'"),
            })
    };
    if input.contains(',') || input.contains('.') {
        let sep = if input.contains(',') { ',' } else { '.' };
        return input.split(sep).map(|t| lookup(t.trim())).collect();
    }
    if names.iter().all(|l| l.chars().count() == 1) {
        return input.chars().map(|c| lookup(&c.to_string())).collect();
    }
    // multi-character labels: a single token may still name one state
    if let Ok(ix) = lookup(input) {
        return Ok(vec![ix]);
    }
    Err(Error::WordParse {
        input: input.to_string(),
        kind,
        reason: "labels are not single characters; separate them with commas".into(),
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so components come out canonical
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn into_partition(mut self) -> Vec<Vec<u32>> {
        let n = self.parent.len();
        let mut byroot: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
        for x in 0..n {
            let r = self.find(x);
            byroot.entry(r).or_default().push(x as u32);
        }
        byroot.into_values().collect()
    }
}
