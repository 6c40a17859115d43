//! Nerode equivalence, minimization, and exact equality of induced tree
//! actions via canonical signatures.
//!
//! Two states are Nerode-equivalent iff they induce the same action on
//! `Σ^*`. The equivalence is the fixpoint of the refinements `≡_k`:
//! `x ≡_0 y` iff the output rows agree, and `x ≡_{k+1} y` iff `x ≡_k y`
//! and `δ_i(x) ≡_k δ_i(y)` for every letter `i`.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::machine::{MealyMachine, StateWord};

/// A partition of a machine's state set.
///
/// Class ids are dense from 0 and ordered by least member, so partitions
/// of the same machine compare structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePartition {
    /// Class id of each state.
    pub class_of: Vec<u32>,
    /// Members of each class, ascending.
    pub classes: Vec<Vec<u32>>,
    /// Refinement rounds until the partition stopped changing.
    pub rounds: usize,
}

impl StatePartition {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Least member of a class, used as its representative.
    pub fn representative(&self, class: u32) -> u32 {
        self.classes[class as usize][0]
    }
}

/// Computes the Nerode partition by Moore-style global refinement: every
/// round re-keys every state by its class and its successors' classes.
pub fn nerode_partition(machine: &MealyMachine) -> StatePartition {
    let n = machine.n_states();
    let m = machine.n_letters();

    // ≡_0 : group by exact output row
    let mut class_of = group_by_key(n, |x| machine.output_row(x as u32).to_vec());
    let mut n_classes = count_classes(&class_of);
    let mut rounds = 0;

    loop {
        let next = group_by_key(n, |x| {
            let mut key = Vec::with_capacity(m + 1);
            key.push(class_of[x]);
            for i in 0..m as u32 {
                key.push(class_of[machine.transition(x as u32, i) as usize]);
            }
            key
        });
        let next_count = count_classes(&next);
        if next_count == n_classes {
            break;
        }
        class_of = next;
        n_classes = next_count;
        rounds += 1;
    }

    let mut classes = vec![Vec::new(); n_classes];
    for (x, &c) in class_of.iter().enumerate() {
        classes[c as usize].push(x as u32);
    }
    StatePartition {
        class_of,
        classes,
        rounds,
    }
}

/// Quotients a machine by its Nerode partition: one state per class,
/// `δ̃_i([x]) = [δ_i(x)]`, `ρ̃_[x] = ρ_x`. Returns the minimized machine
/// together with the partition.
pub fn minimize(machine: &MealyMachine) -> (MealyMachine, StatePartition) {
    let part = nerode_partition(machine);
    let k = part.n_classes();
    let m = machine.n_letters();
    let mut delta = vec![0u32; k * m];
    let mut rho = vec![0u32; k * m];
    for c in 0..k {
        let rep = part.representative(c as u32);
        for i in 0..m as u32 {
            delta[c * m + i as usize] = part.class_of[machine.transition(rep, i) as usize];
            rho[c * m + i as usize] = machine.output(rep, i);
        }
    }
    let state_labels = machine
        .state_labels()
        .map(|ls| (0..k).map(|c| ls[part.representative(c as u32) as usize].clone()).collect());
    let letter_labels = machine.letter_labels().map(|ls| ls.to_vec());
    let quotient = MealyMachine::new(k, m, delta, rho)
        .and_then(|q| q.with_labels(state_labels, letter_labels))
        .expect("quotient of a valid machine is valid");
    (quotient, part)
}

/// Canonical, order-comparable fingerprint of the action induced by one
/// state: the minimized reachable part of the state, renumbered by BFS
/// from the root with letters in index order, serialized as
/// `(n, m, root, output rows, transition rows)`.
///
/// Two signatures are byte-equal iff the two states induce the same
/// action on `Σ^*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionSignature {
    bytes: Vec<u8>,
}

impl ActionSignature {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// SHA-256 of the canonical bytes, as lowercase hex. Reports show
    /// digests instead of raw canonical tables.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(&self.bytes);
        let out = hasher.finalize();
        let mut s = String::with_capacity(64);
        for b in out {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }
}

/// Signature of the action induced by state `x` of `machine`.
pub fn action_signature(machine: &MealyMachine, x: u32) -> Result<ActionSignature> {
    if x as usize >= machine.n_states() {
        return Err(Error::InvalidState {
            index: x as usize,
            bound: machine.n_states(),
        });
    }
    // restrict to the reachable part, then minimize it
    let order = machine.reachable_from(x);
    let mut renumber = vec![u32::MAX; machine.n_states()];
    for (pos, &s) in order.iter().enumerate() {
        renumber[s as usize] = pos as u32;
    }
    let m = machine.n_letters();
    let mut delta = Vec::with_capacity(order.len() * m);
    let mut rho = Vec::with_capacity(order.len() * m);
    for &s in &order {
        for i in 0..m as u32 {
            delta.push(renumber[machine.transition(s, i) as usize]);
            rho.push(machine.output(s, i));
        }
    }
    let sub = MealyMachine::new(order.len(), m, delta, rho)?;
    let (quotient, part) = minimize(&sub);
    let root = part.class_of[0]; // x became state 0 of the submachine
    Ok(ActionSignature {
        bytes: bfs_canonical_bytes(&quotient, root),
    })
}

/// BFS-canonical serialization of the part of `machine` reachable from
/// `root`. This is only a sound action fingerprint when that reachable
/// part is minimized; `action_signature` guarantees it, and the power
/// iteration reuses it directly on already-minimized machines.
pub(crate) fn bfs_canonical_bytes(machine: &MealyMachine, root: u32) -> Vec<u8> {
    let m = machine.n_letters();
    let mut renumber = vec![u32::MAX; machine.n_states()];
    let mut order = vec![root];
    renumber[root as usize] = 0;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for i in 0..m as u32 {
            let w = machine.transition(v, i);
            if renumber[w as usize] == u32::MAX {
                renumber[w as usize] = order.len() as u32;
                order.push(w);
            }
        }
    }
    let n = order.len();
    let mut bytes = Vec::with_capacity(12 + n * m * 8);
    push_u32(&mut bytes, n as u32);
    push_u32(&mut bytes, m as u32);
    push_u32(&mut bytes, 0); // the root is state 0 in BFS order
    for &v in &order {
        for i in 0..m as u32 {
            push_u32(&mut bytes, machine.output(v, i));
        }
        for i in 0..m as u32 {
            push_u32(&mut bytes, renumber[machine.transition(v, i) as usize]);
        }
    }
    bytes
}

fn push_u32(bytes: &mut Vec<u8>, v: u32) {
    bytes.extend_from_slice(&v.to_le_bytes());
}

/// Exact equality of the actions induced by `a` in `ma` and `b` in `mb`,
/// decided by a synchronized walk over reachable state pairs. Sound and
/// complete for complete deterministic machines, minimized or not.
pub fn same_action_states(ma: &MealyMachine, a: u32, mb: &MealyMachine, b: u32) -> Result<bool> {
    ma.require_same_alphabet(mb)?;
    let m = ma.n_letters();
    let mut seen = std::collections::HashSet::new();
    let mut queue = vec![(a, b)];
    seen.insert((a, b));
    while let Some((x, y)) = queue.pop() {
        if ma.output_row(x) != mb.output_row(y) {
            return Ok(false);
        }
        for i in 0..m as u32 {
            let nx = ma.transition(x, i);
            let ny = mb.transition(y, i);
            if seen.insert((nx, ny)) {
                queue.push((nx, ny));
            }
        }
    }
    Ok(true)
}

/// Default cap on the reachable part of an on-the-fly word machine.
pub const WORD_MACHINE_LIMIT: u64 = 1 << 20;

/// The machine of the composed action `ρ_u`: the part of the `|u|`-fold
/// product reachable from the state tuple `u`, built lazily. State 0 is
/// the tuple `u` itself.
pub fn word_machine(machine: &MealyMachine, u: &StateWord, limit: u64) -> Result<MealyMachine> {
    if u.is_empty() {
        return Err(Error::EmptyStateWord);
    }
    machine.check_state_word(u)?;
    let m = machine.n_letters();
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut tuples: Vec<Vec<u32>> = vec![u.0.clone()];
    ids.insert(u.0.clone(), 0);
    let mut delta: Vec<u32> = Vec::new();
    let mut rho: Vec<u32> = Vec::new();
    let mut head = 0;
    while head < tuples.len() {
        let tuple = tuples[head].clone();
        head += 1;
        for i in 0..m as u32 {
            let mut cur = i;
            let mut next = Vec::with_capacity(tuple.len());
            for &x in &tuple {
                next.push(machine.transition(x, cur));
                cur = machine.output(x, cur);
            }
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = tuples.len() as u32;
                    if tuples.len() as u64 >= limit {
                        return Err(Error::SizeLimitExceeded {
                            required: tuples.len() as u128 + 1,
                            limit,
                        });
                    }
                    ids.insert(next.clone(), id);
                    tuples.push(next);
                    id
                }
            };
            delta.push(id);
            rho.push(cur);
        }
    }
    MealyMachine::new(tuples.len(), m, delta, rho)
}

/// Signature of the action of a whole state word.
pub fn word_signature(machine: &MealyMachine, u: &StateWord) -> Result<ActionSignature> {
    if u.len() == 1 {
        return action_signature(machine, u.0[0]);
    }
    let wm = word_machine(machine, u, WORD_MACHINE_LIMIT)?;
    action_signature(&wm, 0)
}

/// Do `ρ_u` (in `ma`) and `ρ_v` (in `mb`) coincide as maps on `Σ^*`?
/// Decided by comparing the signatures of the corresponding product
/// states.
pub fn same_action(
    ma: &MealyMachine,
    u: &StateWord,
    mb: &MealyMachine,
    v: &StateWord,
) -> Result<bool> {
    ma.require_same_alphabet(mb)?;
    Ok(word_signature(ma, u)? == word_signature(mb, v)?)
}

fn group_by_key<K: std::hash::Hash + Eq>(n: usize, key: impl Fn(usize) -> K) -> Vec<u32> {
    let mut ids: HashMap<K, u32> = HashMap::new();
    let mut class_of = Vec::with_capacity(n);
    for x in 0..n {
        let k = key(x);
        let next = ids.len() as u32;
        let id = *ids.entry(k).or_insert(next);
        class_of.push(id);
    }
    class_of
}

fn count_classes(class_of: &[u32]) -> usize {
    class_of.iter().map(|&c| c as usize).max().map_or(0, |c| c + 1)
}
