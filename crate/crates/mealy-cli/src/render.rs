//! Text renderings of the service reports. Every fact in the text output
//! also appears in the JSON report and vice versa.

use mealy_core::analysis::{
    CertificateReport, FinitenessReport, FreenessReport, FreenessVerdict, GrowthReport,
    Lemma1Report, PropositionReport, RelationsReport, StepStatus,
};
use mealy_core::census::{CensusReport, CensusSummary};
use mealy_core::power::{PowerSequenceReport, TransitivityReport};
use mealy_core::wire::{InfoReport, MinimizeResponse, Tagged};

fn ratio(r: (u64, u64)) -> String {
    if r.1 == 1 {
        r.0.to_string()
    } else {
        format!("{}/{}", r.0, r.1)
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn info(t: &Tagged<InfoReport>) -> String {
    let r = &t.report;
    format!(
        "machine: {}\nstates: {}\nletters: {}\nstate labels: {}\nletter labels: {}\n\
         invertible: {}\nreversible: {}\nconnected: {}\ncomponents: {}\nmsize: {}\n",
        t.machine,
        r.states,
        r.letters,
        r.state_labels.join(" "),
        r.letter_labels.join(" "),
        r.invertible,
        r.reversible,
        r.connected,
        r.components,
        r.msize,
    )
}

pub fn minimize(resp: &MinimizeResponse) -> String {
    let mut out = resp.machine.mealy.clone();
    out.push_str(&format!("# rounds: {}\n", resp.partition.rounds));
    for (i, class) in resp.partition.classes.iter().enumerate() {
        out.push_str(&format!("# class {i}: {}\n", class.join(" ")));
    }
    out
}

pub fn transitive(t: &Tagged<TransitivityReport>, dual: bool) -> String {
    let r = &t.report;
    let mut out = format!(
        "machine: {}{}\nlevels checked: {}\ntransitive up to level: {}\n",
        t.machine,
        if dual { " (dual)" } else { "" },
        r.levels_checked,
        r.transitive_up_to,
    );
    if let Some(level) = r.failure_level {
        out.push_str(&format!("fails at level: {level}\n"));
        if let Some((a, b)) = &r.witnesses {
            out.push_str(&format!("witnesses: {a} {b}\n"));
        }
    }
    if let Some(level) = r.budget_exceeded_at {
        out.push_str(&format!("word budget exceeded at level: {level}\n"));
    }
    out
}

pub fn msizes(t: &Tagged<PowerSequenceReport>) -> String {
    let r = &t.report;
    format!(
        "machine: {}\ndepth: {}\nsizes: {}\nratios: {}\nall ratios integral: {}\n\
         stabilized at: {}\ntruncated: {}\n",
        t.machine,
        r.depth,
        join(&r.sizes),
        r.ratios.iter().map(|&x| ratio(x)).collect::<Vec<_>>().join(" "),
        r.all_ratios_integral,
        r.stabilized_at.map(|n| n.to_string()).unwrap_or_else(|| "none".into()),
        r.truncated,
    )
}

pub fn growth(t: &Tagged<GrowthReport>) -> String {
    let r = &t.report;
    format!(
        "machine: {}\nmax length: {}\ngenerators: {}\ngamma: {}\nnew at length: {}\ntruncated: {}\n",
        t.machine,
        r.max_len,
        r.generators,
        join(&r.gamma),
        join(&r.new_at_length),
        r.truncated,
    )
}

pub fn certify(t: &Tagged<CertificateReport>) -> String {
    let r = &t.report;
    let mut out = format!(
        "machine: {}\nverdict: {}\ndepth: {}\nsizes: {}\nratios: {}\n\
         all ratios integral: {}\nlower bound s_n >= 2^n: {}\ndual transitive up to: {}\n",
        t.machine,
        r.verdict,
        r.depth,
        join(&r.sizes),
        r.ratios.iter().map(|&x| ratio(x)).collect::<Vec<_>>().join(" "),
        r.all_ratios_integral,
        r.lower_bound_ok,
        r.transitivity.transitive_up_to,
    );
    if let Some(level) = r.failed_level {
        out.push_str(&format!("hypothesis fails at level: {level}\n"));
    }
    if let Some((a, b)) = &r.witnesses {
        out.push_str(&format!("witnesses: {a} {b}\n"));
    }
    if let Some(reason) = &r.reason {
        out.push_str(&format!("reason: {reason}\n"));
    }
    out
}

pub fn lemma1(t: &Tagged<Lemma1Report>) -> String {
    let r = &t.report;
    let c = &r.checks;
    let mut out = format!(
        "machine: {}\nn: {}\nsize of m(A^n): {}\nsize of m(A^n+1): {}\n\
         msize ratio: {}\nclass cardinality ratio: {}\n",
        t.machine,
        r.n,
        r.size_n,
        r.size_n1,
        ratio(r.msize_ratio),
        r.class_cardinality_ratio,
    );
    out.push_str(&format!(
        "checks: decompositions exact: {}, right index unambiguous: {}, \
         left index unambiguous: {}, side cardinalities equal: {}, \
         cardinality constant: {}, ratio law: {}, size-equality biconditional: {}\n",
        c.decompositions_exact,
        c.right_index_unambiguous,
        c.left_index_unambiguous,
        c.side_cardinalities_equal,
        c.cardinality_constant,
        c.ratio_law,
        c.size_equality_biconditional,
    ));
    out.push_str(&format!("all checks hold: {}\n", c.all_ok()));
    let fmt_classes = |classes: &[Vec<String>]| {
        classes
            .iter()
            .map(|cl| format!("{{{}}}", cl.join(" ")))
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&format!("classes of Q^{}: {}\n", r.n, fmt_classes(&r.classes_n)));
    out.push_str(&format!(
        "classes of Q^{}: {}\n",
        r.n + 1,
        fmt_classes(&r.classes_n1)
    ));
    for d in &r.decompositions {
        let side = |pairs: &[(String, usize)]| {
            pairs
                .iter()
                .map(|(q, i)| format!("{q}->C{i}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "class {}: right [{}] left [{}]\n",
            d.class,
            side(&d.right),
            side(&d.left)
        ));
    }
    out
}

pub fn proposition(t: &Tagged<PropositionReport>) -> String {
    let r = &t.report;
    let steps = r
        .steps
        .iter()
        .map(|&(n, s)| {
            let tag = match s {
                StepStatus::Holds => "HOLDS",
                StepStatus::Vacuous => "VACUOUS",
                StepStatus::Violated => "VIOLATED",
            };
            format!("n={n}: {tag}")
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "machine: {}\ndepth: {}\nsizes: {}\nsteps: {}\ndual transitive up to: {}\n\
         violated: {}\ntruncated: {}\n",
        t.machine,
        r.depth,
        join(&r.sizes),
        steps,
        r.dual_transitive_up_to,
        r.violated,
        r.truncated,
    )
}

pub fn finiteness(t: &Tagged<FinitenessReport>) -> String {
    let r = &t.report;
    format!(
        "machine: {}\nverdict: {}\ndepth: {}\nsize bound: {}\n\
         max component msize per power: {}\nwindow: {}\nreason: {}\ntruncated: {}\n",
        t.machine,
        r.verdict,
        r.depth,
        r.size_bound,
        join(&r.max_component_msize),
        r.window,
        r.reason,
        r.truncated,
    )
}

pub fn freeness(t: &Tagged<FreenessReport>) -> String {
    let r = &t.report;
    let mut out = format!("machine: {}\n", t.machine);
    match r.verdict {
        FreenessVerdict::FreeToDepth => {
            out.push_str(&format!("verdict: FREE-TO-DEPTH({})\n", r.depth_completed))
        }
        FreenessVerdict::NotFree => out.push_str("verdict: NOT-FREE\n"),
    }
    if let Some(w) = &r.witness {
        out.push_str(&format!(
            "witness: {} = {} (lengths {} and {})\n",
            w.u, w.v, w.u_len, w.v_len
        ));
    }
    out.push_str(&format!(
        "depth requested: {}\ndepth completed: {}\ntruncated: {}\n",
        r.depth, r.depth_completed, r.truncated
    ));
    out
}

pub fn relations(t: &Tagged<RelationsReport>) -> String {
    let r = &t.report;
    let mut out = format!(
        "machine: {}\nmax length: {}\nrelations found: {}\n",
        t.machine,
        r.max_len,
        r.relations.len()
    );
    for w in &r.relations {
        out.push_str(&format!(
            "{} = {} (lengths {} and {})\n",
            w.u, w.v, w.u_len, w.v_len
        ));
    }
    out.push_str(&format!("truncated: {}\n", r.truncated));
    out
}

pub fn census_summary(r: &CensusReport) -> String {
    let mut out = format!(
        "census: {} states x {} letters, depth {}\n\
         filters: invertible={} reversible={} up-to-iso={}\nmachines: {}\n",
        r.params.n_states,
        r.params.n_letters,
        r.params.depth,
        r.params.filter.invertible,
        r.params.filter.reversible,
        r.params.filter.up_to_iso,
        r.summary.total,
    );
    out.push_str(&summary_lines(&r.summary));
    out
}

fn summary_lines(s: &CensusSummary) -> String {
    let mut out = String::new();
    for (verdict, count) in &s.by_verdict {
        out.push_str(&format!("verdict {verdict}: {count}\n"));
    }
    for (free, count) in &s.by_freeness {
        out.push_str(&format!("freeness {free}: {count}\n"));
    }
    out
}
