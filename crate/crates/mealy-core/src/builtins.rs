//! Built-in example machines, addressable as `builtin:<name>`.
//!
//! * `fig1`: a 4-state invertible reversible machine whose dual action is
//!   transitive on every checked level while the machine itself does not
//!   generate a free semigroup.
//! * `adding`: the 2-state binary odometer (invertible, not reversible).
//! * `identity<k>x<m>`: `k` states over `m` letters, all transitions
//!   self-loops outputting their input.

use crate::error::{Error, Result};
use crate::format;
use crate::machine::MealyMachine;

pub const FIG1_TEXT: &str = "\
states x y z t
letters 0 1
x 0 -> x 0
x 1 -> z 1
y 0 -> y 0
y 1 -> t 1
z 0 -> z 1
z 1 -> y 0
t 0 -> t 1
t 1 -> x 0
";

pub const ADDING_TEXT: &str = "\
states e a
letters 0 1
e 0 -> e 0
e 1 -> e 1
a 0 -> e 1
a 1 -> a 0
";

/// Maximum identity builtin dimension; keeps `identity99x99` from being a
/// footgun while covering everything the test corpus needs.
const IDENTITY_MAX: usize = 16;

/// Looks up a builtin machine by name.
pub fn builtin(name: &str) -> Result<MealyMachine> {
    match name {
        "fig1" => format::parse(FIG1_TEXT),
        "adding" => format::parse(ADDING_TEXT),
        _ => match parse_identity_name(name) {
            Some((k, m)) => identity(k, m),
            None => Err(Error::UnknownBuiltin(name.to_string())),
        },
    }
}

/// The `.mealy` source of a builtin.
pub fn builtin_text(name: &str) -> Result<String> {
    builtin(name).map(|m| format::render(&m))
}

/// Names listed by the service and CLI. The `identity<k>x<m>` family is
/// open-ended; the registry shows the two shapes the test corpus uses.
pub fn builtin_names() -> Vec<&'static str> {
    vec!["fig1", "adding", "identity1x2", "identity2x2"]
}

/// `k` states over `m` letters, every transition a self-loop `i|i`.
pub fn identity(k: usize, m: usize) -> Result<MealyMachine> {
    if k == 0 || m == 0 || k > IDENTITY_MAX || m > IDENTITY_MAX {
        return Err(Error::InvalidArgument(format!(
            "identity builtin dimensions must be in 1..={IDENTITY_MAX}, got {k}x{m}"
        )));
    }
    let mut delta = Vec::with_capacity(k * m);
    let mut rho = Vec::with_capacity(k * m);
    for x in 0..k as u32 {
        for i in 0..m as u32 {
            delta.push(x);
            rho.push(i);
        }
    }
    let state_labels = (0..k).map(|x| format!("q{x}")).collect();
    let letter_labels = (0..m).map(|i| i.to_string()).collect();
    MealyMachine::new(k, m, delta, rho)?.with_labels(Some(state_labels), Some(letter_labels))
}

fn parse_identity_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("identity")?;
    let (k, m) = rest.split_once('x')?;
    Some((k.parse().ok()?, m.parse().ok()?))
}

/// Resolves a machine source: `builtin:<name>` or `.mealy` text.
pub fn resolve_source(builtin_name: Option<&str>, text: Option<&str>) -> Result<MealyMachine> {
    match (builtin_name, text) {
        (Some(name), None) => builtin(name),
        (None, Some(t)) => format::parse(t),
        _ => Err(Error::InvalidArgument(
            "provide exactly one machine source: a builtin name or .mealy text".into(),
        )),
    }
}
