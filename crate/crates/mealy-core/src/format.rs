//! The `.mealy` text format.
//!
//! ```text
//! # odometer on two letters
//! states e a
//! letters 0 1
//! e 0 -> e 0
//! e 1 -> e 1
//! a 0 -> e 1
//! a 1 -> a 0
//! ```
//!
//! The first two significant lines declare the state and letter names;
//! after that there must be exactly one `<state> <letter> -> <state'>
//! <letter'>` line per (state, letter) pair, in any order. `#` starts a
//! comment, tokens are whitespace-separated.

use crate::error::{Error, ParseError, Position, Result};
use crate::machine::MealyMachine;

/// Parses `.mealy` text into a validated machine.
pub fn parse(text: &str) -> Result<MealyMachine> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(ln, raw)| (ln + 1, strip_comment(raw)))
        .filter(|(_, l)| !l.trim().is_empty());

    let (states_line, states_raw) = lines.next().ok_or_else(|| syntax(1, 1, "empty input"))?;
    let state_labels = parse_header(states_line, states_raw, "states")?;
    let (letters_line, letters_raw) = lines
        .next()
        .ok_or_else(|| syntax(states_line + 1, 1, "missing 'letters' line"))?;
    let letter_labels = parse_header(letters_line, letters_raw, "letters")?;

    check_distinct(&state_labels, states_line, "state")?;
    check_distinct(&letter_labels, letters_line, "letter")?;

    let k = state_labels.len();
    let m = letter_labels.len();
    let state_ix = |tok: &str, pos: Position| -> Result<u32> {
        state_labels
            .iter()
            .position(|l| l == tok)
            .map(|p| p as u32)
            .ok_or_else(|| {
                ParseError::UnknownLabel {
                    pos,
                    kind: "state",
                    label: tok.to_string(),
                }
                .into()
            })
    };
    let letter_ix = |tok: &str, pos: Position| -> Result<u32> {
        letter_labels
            .iter()
            .position(|l| l == tok)
            .map(|p| p as u32)
            .ok_or_else(|| {
                ParseError::UnknownLabel {
                    pos,
                    kind: "letter",
                    label: tok.to_string(),
                }
                .into()
            })
    };

    let mut delta = vec![u32::MAX; k * m];
    let mut rho = vec![u32::MAX; k * m];

    for (ln, raw) in lines {
        let toks = tokens_with_cols(&raw);
        if toks.len() != 5 || toks[2].1 != "->" {
            return Err(syntax(
                ln,
                toks.first().map(|t| t.0).unwrap_or(1),
                "expected '<state> <letter> -> <state> <letter>'",
            ));
        }
        let pos_at = |i: usize| Position {
            line: ln,
            col: toks[i].0,
        };
        let x = state_ix(toks[0].1, pos_at(0))?;
        let i = letter_ix(toks[1].1, pos_at(1))?;
        let x2 = state_ix(toks[3].1, pos_at(3))?;
        let o = letter_ix(toks[4].1, pos_at(4))?;
        let cell = x as usize * m + i as usize;
        if delta[cell] != u32::MAX {
            return Err(ParseError::DuplicateTransition {
                pos: pos_at(0),
                state: toks[0].1.to_string(),
                letter: toks[1].1.to_string(),
            }
            .into());
        }
        delta[cell] = x2;
        rho[cell] = o;
    }

    for x in 0..k {
        for i in 0..m {
            if delta[x * m + i] == u32::MAX {
                return Err(ParseError::Incomplete {
                    state: state_labels[x].clone(),
                    letter: letter_labels[i].clone(),
                }
                .into());
            }
        }
    }

    MealyMachine::new(k, m, delta, rho)?.with_labels(Some(state_labels), Some(letter_labels))
}

/// Renders a machine as `.mealy` text: header lines, then transition
/// lines in state-major, letter-minor order. Parsing the result gives
/// back the same tables.
pub fn render(machine: &MealyMachine) -> String {
    let mut out = String::new();
    out.push_str("states");
    for x in 0..machine.n_states() as u32 {
        out.push(' ');
        out.push_str(&machine.state_name(x));
    }
    out.push('\n');
    out.push_str("letters");
    for i in 0..machine.n_letters() as u32 {
        out.push(' ');
        out.push_str(&machine.letter_name(i));
    }
    out.push('\n');
    for x in 0..machine.n_states() as u32 {
        for i in 0..machine.n_letters() as u32 {
            out.push_str(&format!(
                "{} {} -> {} {}\n",
                machine.state_name(x),
                machine.letter_name(i),
                machine.state_name(machine.transition(x, i)),
                machine.letter_name(machine.output(x, i)),
            ));
        }
    }
    out
}

/// One-line rendering used as a canonical machine key (census CSV):
/// the `.mealy` text with newlines replaced by `;`.
pub fn render_compact(machine: &MealyMachine) -> String {
    render(machine).trim_end().replace('\n', ";")
}

/// Parses the compact one-line form back into a machine.
pub fn parse_compact(line: &str) -> Result<MealyMachine> {
    parse(&line.replace(';', "\n"))
}

fn strip_comment(line: &str) -> String {
    match line.find('#') {
        Some(p) => line[..p].to_string(),
        None => line.to_string(),
    }
}

fn syntax(line: usize, col: usize, msg: &str) -> Error {
    ParseError::Syntax {
        pos: Position { line, col },
        msg: msg.to_string(),
    }
    .into()
}

fn tokens_with_cols(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, ch)) in (1..).zip(line.char_indices()) {
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                out.push((c, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some((i, col));
        }
    }
    if let Some((s, c)) = start {
        out.push((c, &line[s..]));
    }
    out
}

fn parse_header(line_no: usize, raw: String, keyword: &str) -> Result<Vec<String>> {
    let toks = tokens_with_cols(&raw);
    if toks.is_empty() || toks[0].1 != keyword {
        return Err(syntax(
            line_no,
            toks.first().map(|t| t.0).unwrap_or(1),
            &format!("expected '{keyword} <name> ...'"),
        ));
    }
    if toks.len() < 2 {
        return Err(syntax(line_no, toks[0].0, &format!("'{keyword}' needs at least one name")));
    }
    Ok(toks[1..].iter().map(|(_, t)| t.to_string()).collect())
}

fn check_distinct(labels: &[String], line: usize, kind: &'static str) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(ParseError::DuplicateName {
                pos: Position { line, col: 1 },
                kind,
                label: l.clone(),
            }
            .into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
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

    #[test]
    fn parses_fig1() {
        let m = parse(FIG1).unwrap();
        assert_eq!(m.n_states(), 4);
        assert_eq!(m.n_letters(), 2);
        assert_eq!(m.state_name(2), "z");
        assert_eq!(m.transition(2, 1), 1); // z --1--> y
        assert_eq!(m.output(2, 1), 0);
    }

    #[test]
    fn render_parse_round_trip() {
        let m = parse(FIG1).unwrap();
        let again = parse(&render(&m)).unwrap();
        assert_eq!(again, m);
        let compact = render_compact(&m);
        assert!(!compact.contains('\n'));
        assert_eq!(parse_compact(&compact).unwrap(), m);
    }

    #[test]
    fn one_state_identity() {
        let m = parse("states q\nletters a b\nq a -> q a\nq b -> q b\n").unwrap();
        assert_eq!(m.n_states(), 1);
        assert_eq!(m.output(0, 1), 1);
    }

    #[test]
    fn missing_transition_reports_incomplete() {
        let text = FIG1.lines().filter(|l| !l.starts_with("t 1")).collect::<Vec<_>>().join("\n");
        let err = parse(&text).unwrap_err();
        assert_eq!(err.to_string(), "incomplete: state t, letter 1");
    }

    #[test]
    fn duplicate_transition_is_nondeterministic() {
        let text = format!("{FIG1}x 0 -> t 1\n");
        let err = parse(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("duplicate transition"), "{msg}");
        assert!(msg.contains("nondeterministic"), "{msg}");
        assert!(msg.contains("line 11"), "{msg}");
    }

    #[test]
    fn unknown_label_reports_position() {
        let text = "states a\nletters 0\na 0 -> b 0\n";
        let err = parse(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown state label 'b'"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\n\nstates q   # trailing\nletters 0\n\nq 0 -> q 0  # loop\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn duplicate_state_name_is_rejected() {
        let err = parse("states q q\nletters 0\nq 0 -> q 0\n").unwrap_err();
        assert!(err.to_string().contains("duplicate state name"));
    }

    #[test]
    fn syntax_error_reports_line_and_col() {
        let err = parse("states a\nletters 0\na 0 => a 0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }
}
