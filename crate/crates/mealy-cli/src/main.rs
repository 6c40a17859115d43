//! Command-line client for the Mealy workbench.
//!
//! Every subcommand talks to the HTTP service: either a remote one given
//! with `--server`, or an ephemeral in-process server started on a
//! loopback port for the duration of the command.
//!
//! Exit codes: 0 when the command succeeds and any checked property
//! holds, 1 when a checked property fails (a transitivity failure, a
//! relation found, a certificate not granted), 2 on usage or input
//! errors.

mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mealy_client::{Client, ClientError};
use mealy_core::analysis::{CertificateVerdict, FinitenessVerdict, FreenessVerdict};
use mealy_core::census;
use mealy_core::wire::*;

#[derive(Parser)]
#[command(name = "mealy", version, about = "Workbench for Mealy automata and the semigroups they generate")]
struct Cli {
    /// Base URL of a running service; default is an in-process server.
    #[arg(long, global = true)]
    server: Option<String>,

    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Override every size limit / word budget of the operation.
    #[arg(long, global = true)]
    limit: Option<u64>,

    /// Reserved; all algorithms are deterministic.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summary facts: sizes, predicates, connectivity, minimized size.
    Info { source: String },
    /// Exchange the roles of states and letters.
    Dual { source: String },
    /// Invert every state's action (machine must be invertible).
    Inverse { source: String },
    /// Nerode-minimize the machine.
    Minimize { source: String },
    /// Product machine: left factor acts first.
    Product { left: String, right: String },
    /// Explicit n-th power on the state set Q^n.
    Power {
        source: String,
        #[arg(short)]
        n: usize,
    },
    /// Apply the action of a state word to a letter word.
    Apply {
        source: String,
        #[arg(short)]
        u: String,
        #[arg(short)]
        s: String,
    },
    /// Check single-orbit levels up to a depth (--dual for the dual).
    Transitive {
        source: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        dual: bool,
    },
    /// Sizes of iterated minimized powers.
    Msizes {
        source: String,
        #[arg(long)]
        depth: usize,
    },
    /// Growth function of the generated semigroup.
    Growth {
        source: String,
        #[arg(long = "max-len")]
        max_len: usize,
        /// Count over states and inverses (the group generating set).
        #[arg(long)]
        group: bool,
    },
    /// Exponential-growth certificate pipeline.
    Certify {
        source: String,
        #[arg(long)]
        depth: usize,
    },
    /// Verify both class decompositions between consecutive powers.
    VerifyLemma1 {
        source: String,
        #[arg(short)]
        n: usize,
    },
    /// Verify that one size stabilization forces the next.
    VerifyProposition {
        source: String,
        #[arg(long)]
        depth: usize,
    },
    /// Probe for finiteness evidence via component minimizations.
    Finiteness {
        source: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        bound: u64,
    },
    /// Check that short state words induce pairwise distinct actions.
    Freeness {
        source: String,
        #[arg(long)]
        depth: usize,
    },
    /// List minimal relations between state words.
    Relations {
        source: String,
        #[arg(long = "max-len")]
        max_len: usize,
    },
    /// Enumerate and classify all machines of a shape.
    Census {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        letters: usize,
        #[arg(long)]
        depth: usize,
        /// Write (merge) the CSV into this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Drop the invertible+reversible filters.
        #[arg(long)]
        unrestricted: bool,
        /// Keep one representative per relabeling orbit.
        #[arg(long = "up-to-iso")]
        up_to_iso: bool,
    },
    /// Graphviz DOT rendering of the transition graph.
    ExportDot { source: String },
    /// Print the .mealy text of a builtin machine.
    Builtin { name: String },
}

fn main() {
    let cli = Cli::parse();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .expect("tokio runtime");
    let code = runtime.block_on(run(cli));
    std::process::exit(code);
}

/// Starts an in-process server when no remote is given; returns the base
/// URL to talk to.
async fn endpoint(server: &Option<String>) -> Result<String, String> {
    if let Some(url) = server {
        return Ok(url.clone());
    }
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
        .await
        .map_err(|e| format!("cannot bind a loopback port: {e}"))?;
    let addr = listener.local_addr().map_err(|e| e.to_string())?;
    tokio::spawn(async move {
        let _ = mealy_service::serve(listener).await;
    });
    Ok(format!("http://{addr}"))
}

fn load_source(source: &str) -> Result<MachineSource, String> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok(MachineSource::builtin(name));
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| format!("cannot read machine file '{source}': {e}"))?;
    Ok(MachineSource::text(&text))
}

fn emit<T: serde::Serialize>(json: bool, value: &T, text: String) {
    if json {
        let mut body = serde_json::to_string_pretty(value).expect("reports serialize");
        body.push('\n');
        write_stdout(&body);
    } else {
        write_stdout(&text);
    }
}

/// Writes to stdout, treating a closed pipe as a normal exit instead of
/// a panic (so `mealy ... | head` stays quiet).
fn write_stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("mealy: cannot write output: {e}");
        std::process::exit(2);
    }
}

async fn run(cli: Cli) -> i32 {
    match execute(&cli).await {
        Ok(code) => code,
        Err(CliFailure::Input(msg)) => {
            eprintln!("mealy: {msg}");
            2
        }
        Err(CliFailure::Client(ClientError::Api { message, .. })) => {
            eprintln!("mealy: {message}");
            2
        }
        Err(CliFailure::Client(e)) => {
            eprintln!("mealy: {e}");
            2
        }
    }
}

enum CliFailure {
    Input(String),
    Client(ClientError),
}

impl From<ClientError> for CliFailure {
    fn from(e: ClientError) -> Self {
        CliFailure::Client(e)
    }
}

impl From<String> for CliFailure {
    fn from(e: String) -> Self {
        CliFailure::Input(e)
    }
}

async fn execute(cli: &Cli) -> Result<i32, CliFailure> {
    let base = endpoint(&cli.server).await.map_err(CliFailure::Input)?;
    let client = Client::new(&base);
    let json = cli.json;
    let limit = cli.limit;

    match &cli.command {
        Command::Info { source } => {
            let resp = client
                .info(&MachineRequest {
                    machine: load_source(source)?,
                })
                .await?;
            emit(json, &resp, render::info(&resp));
            Ok(0)
        }
        Command::Dual { source } => {
            let resp = client
                .dual(&MachineRequest {
                    machine: load_source(source)?,
                })
                .await?;
            emit(json, &resp, resp.machine.mealy.clone());
            Ok(0)
        }
        Command::Inverse { source } => {
            let resp = client
                .inverse(&MachineRequest {
                    machine: load_source(source)?,
                })
                .await?;
            emit(json, &resp, resp.machine.mealy.clone());
            Ok(0)
        }
        Command::Minimize { source } => {
            let resp = client
                .minimize(&MachineRequest {
                    machine: load_source(source)?,
                })
                .await?;
            emit(json, &resp, render::minimize(&resp));
            Ok(0)
        }
        Command::Product { left, right } => {
            let resp = client
                .product(&ProductRequest {
                    left: load_source(left)?,
                    right: load_source(right)?,
                })
                .await?;
            emit(json, &resp, resp.machine.mealy.clone());
            Ok(0)
        }
        Command::Power { source, n } => {
            let resp = client
                .power(&PowerRequest {
                    machine: load_source(source)?,
                    n: *n,
                    limit,
                })
                .await?;
            emit(json, &resp, resp.machine.mealy.clone());
            Ok(0)
        }
        Command::Apply { source, u, s } => {
            let resp = client
                .apply(&ApplyRequest {
                    machine: load_source(source)?,
                    u: u.clone(),
                    s: s.clone(),
                })
                .await?;
            emit(json, &resp, format!("{}\n", resp.output));
            Ok(0)
        }
        Command::Transitive { source, depth, dual } => {
            let resp = client
                .transitive(&TransitiveRequest {
                    machine: load_source(source)?,
                    depth: *depth,
                    dual: *dual,
                    budget: limit,
                })
                .await?;
            emit(json, &resp, render::transitive(&resp, *dual));
            Ok(if resp.report.failure_level.is_some() { 1 } else { 0 })
        }
        Command::Msizes { source, depth } => {
            let resp = client
                .msizes(&MsizesRequest {
                    machine: load_source(source)?,
                    depth: *depth,
                    limit,
                })
                .await?;
            emit(json, &resp, render::msizes(&resp));
            Ok(0)
        }
        Command::Growth {
            source,
            max_len,
            group,
        } => {
            let resp = client
                .growth(&GrowthRequest {
                    machine: load_source(source)?,
                    max_len: *max_len,
                    limit,
                    group: *group,
                })
                .await?;
            emit(json, &resp, render::growth(&resp));
            Ok(0)
        }
        Command::Certify { source, depth } => {
            let resp = client
                .certify(&CertifyRequest {
                    machine: load_source(source)?,
                    depth: *depth,
                    limit,
                    budget: limit,
                })
                .await?;
            emit(json, &resp, render::certify(&resp));
            Ok(match resp.report.verdict {
                CertificateVerdict::ExponentialCertified => 0,
                _ => 1,
            })
        }
        Command::VerifyLemma1 { source, n } => {
            let resp = client
                .lemma1(&Lemma1Request {
                    machine: load_source(source)?,
                    n: *n,
                    limit,
                    budget: limit,
                })
                .await?;
            emit(json, &resp, render::lemma1(&resp));
            Ok(if resp.report.checks.all_ok() { 0 } else { 1 })
        }
        Command::VerifyProposition { source, depth } => {
            let resp = client
                .proposition(&PropositionRequest {
                    machine: load_source(source)?,
                    depth: *depth,
                    limit,
                    budget: limit,
                })
                .await?;
            emit(json, &resp, render::proposition(&resp));
            Ok(if resp.report.violated { 1 } else { 0 })
        }
        Command::Finiteness {
            source,
            depth,
            bound,
        } => {
            let resp = client
                .finiteness(&FinitenessRequest {
                    machine: load_source(source)?,
                    depth: *depth,
                    bound: *bound,
                    limit,
                })
                .await?;
            emit(json, &resp, render::finiteness(&resp));
            Ok(match resp.report.verdict {
                FinitenessVerdict::Unknown => 1,
                _ => 0,
            })
        }
        Command::Freeness { source, depth } => {
            let resp = client
                .freeness(&FreenessRequest {
                    machine: load_source(source)?,
                    depth: *depth,
                    limit,
                    budget: limit,
                })
                .await?;
            emit(json, &resp, render::freeness(&resp));
            Ok(match resp.report.verdict {
                FreenessVerdict::FreeToDepth => 0,
                FreenessVerdict::NotFree => 1,
            })
        }
        Command::Relations { source, max_len } => {
            let resp = client
                .relations(&RelationsRequest {
                    machine: load_source(source)?,
                    max_len: *max_len,
                    limit,
                    budget: limit,
                })
                .await?;
            emit(json, &resp, render::relations(&resp));
            Ok(if resp.report.relations.is_empty() { 0 } else { 1 })
        }
        Command::Census {
            states,
            letters,
            depth,
            out,
            unrestricted,
            up_to_iso,
        } => {
            let resp = client
                .census(&CensusRequest {
                    states: *states,
                    letters: *letters,
                    depth: *depth,
                    invertible: !*unrestricted,
                    reversible: !*unrestricted,
                    up_to_iso: *up_to_iso,
                    cap: limit,
                })
                .await?;
            match out {
                Some(path) => {
                    let existing = match std::fs::read_to_string(path) {
                        Ok(body) => Some(body),
                        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
                        Err(e) => {
                            return Err(CliFailure::Input(format!(
                                "cannot read census file '{}': {e}",
                                path.display()
                            )))
                        }
                    };
                    let merged = census::merge_csv(existing.as_deref(), &resp.records)
                        .map_err(|e| CliFailure::Input(e.to_string()))?;
                    std::fs::write(path, merged).map_err(|e| {
                        CliFailure::Input(format!(
                            "cannot write census file '{}': {e}",
                            path.display()
                        ))
                    })?;
                    emit(json, &resp, render::census_summary(&resp));
                }
                None => {
                    if json {
                        emit(json, &resp, String::new());
                    } else {
                        write_stdout(&census::render_csv(&resp.records));
                        eprint!("{}", render::census_summary(&resp));
                    }
                }
            }
            Ok(0)
        }
        Command::ExportDot { source } => {
            let resp = client
                .dot(&MachineRequest {
                    machine: load_source(source)?,
                })
                .await?;
            emit(json, &resp, resp.dot.clone());
            Ok(0)
        }
        Command::Builtin { name } => {
            let resp = client.builtin(name).await?;
            emit(json, &resp, resp.mealy.clone());
            Ok(0)
        }
    }
}

