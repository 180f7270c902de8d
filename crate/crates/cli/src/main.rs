//! `graphmix` command-line front end. Every command prints one JSON report
//! (or NDJSON for `path`); failures print `{"error": …}` and exit non-zero.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use graphmix::canonical::{
    enumerate_pairings, hinge_canonical_path, js_canonical_path, sample_pairing, switch_path, symmetric_difference,
    CanonicalError, Pairing,
};
use graphmix::chains::{run, ChainError, ChainKind, ChainSpec};
use graphmix::graphcore::{classify_membership, GraphError, GraphView, Instance, InstanceError, LabeledGraph};
use graphmix::realize::{realize, RealizeError};
use graphmix::stability::{bounded_repair, jdm_hypotheses, jdm_repair, stability_report, StabilityError};
use graphmix::statespace::{enumerate, mixing_time, spectral_gap, transition_matrix, Guard, StateSpaceError};

#[derive(Debug, Error)]
enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    StateSpace(#[from] StateSpaceError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Instance(_) => "instance",
            CliError::Graph(_) => "graph",
            CliError::Realize(_) => "realize",
            CliError::Chain(_) => "chain",
            CliError::StateSpace(StateSpaceError::TooLarge(_)) => "too_large",
            CliError::StateSpace(_) => "state_space",
            CliError::Stability(StabilityError::StateSpace(StateSpaceError::TooLarge(_))) => "too_large",
            CliError::Stability(_) => "stability",
            CliError::Canonical(_) => "canonical",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "graphmix", version, about = "Sample and analyse graphs with prescribed degrees")]
struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a chain for a number of steps.
    Sample {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        chain: Option<String>,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        seed: u64,
        /// Start state (edge list); defaults to the deterministic realization.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        perturbed: bool,
    },
    /// Build one realization.
    Realize {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Count the state space.
    Enumerate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        perturbed: bool,
    },
    /// Spectral gap and mixing time of a chain on an enumerable instance.
    Diagnose {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        chain: Option<String>,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
    /// Evaluate the stability inequalities.
    Stability {
        #[arg(long)]
        instance: PathBuf,
        /// Also compute k and |𝒢′|/|𝒢| by enumeration.
        #[arg(long)]
        exact_k: bool,
    },
    /// Repair a perturbed state back to a realization.
    Repair {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Canonical path between two realizations, one move per line.
    Path {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        /// Seed for a uniform pairing; the first pairing otherwise.
        #[arg(long)]
        pairing: Option<u64>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_instance(path: &Path) -> Result<(Instance, String), CliError> {
    let inst = Instance::from_json(&read(path)?)?;
    let hash = format!("{:x}", Sha256::digest(inst.to_json().as_bytes()));
    Ok((inst, hash))
}

fn load_graph(path: &Path, inst: &Instance) -> Result<LabeledGraph, CliError> {
    let g = LabeledGraph::parse_edge_list(&read(path)?)?;
    if g.order() > inst.order() {
        return Err(CliError::Usage(format!("{} has more vertices than the instance", path.display())));
    }
    // Isolated trailing vertices are not visible in an edge list.
    let mut full = LabeledGraph::empty(inst.order());
    for e in g.edges() {
        full.add_edge(e.lo(), e.hi())?;
    }
    Ok(full)
}

fn chain_kind(name: Option<&str>, inst: &Instance, perturbed: bool) -> Result<ChainKind, CliError> {
    match name {
        None => Ok(ChainKind::default_for(inst, perturbed)),
        Some(s) => ChainKind::parse(s).ok_or_else(|| CliError::Usage(format!("unknown chain {s:?}"))),
    }
}

fn edges_json(g: &LabeledGraph) -> Value {
    json!(g.edges().map(|e| [e.lo(), e.hi()]).collect::<Vec<_>>())
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialises")
}

/// Output: a single JSON object, or NDJSON lines.
enum Report {
    Object(Map<String, Value>),
    Lines(Vec<Value>),
}

fn envelope(command: &str, hash: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("instance_hash".into(), json!(hash));
    m
}

fn execute(cmd: &Command) -> Result<Report, CliError> {
    let guard = Guard::default();
    match cmd {
        Command::Sample { instance, chain, steps, seed, graph, perturbed } => {
            let (inst, hash) = load_instance(instance)?;
            let kind = chain_kind(chain.as_deref(), &inst, *perturbed)?;
            let start = match graph {
                Some(p) => load_graph(p, &inst)?,
                None => realize(&inst)?,
            };
            let spec = ChainSpec::new(kind, inst.clone(), *seed)?;
            let mut accepted = 0u64;
            let mut count = |_: u64, rec: &graphmix::chains::TransitionRecord, _: &LabeledGraph| {
                accepted += rec.accepted as u64;
            };
            let end = run(&spec, start, *steps, Some(&mut count))?;
            let mut m = envelope("sample", &hash);
            m.insert("chain".into(), to_value(&kind));
            m.insert("seed".into(), json!(seed));
            m.insert("steps".into(), json!(steps));
            m.insert("accepted".into(), json!(accepted));
            m.insert("membership".into(), to_value(&classify_membership(&end, &inst)));
            m.insert("edges".into(), edges_json(&end));
            Ok(Report::Object(m))
        }
        Command::Realize { instance } => {
            let (inst, hash) = load_instance(instance)?;
            let g = realize(&inst)?;
            let mut m = envelope("realize", &hash);
            m.insert("edges".into(), edges_json(&g));
            Ok(Report::Object(m))
        }
        Command::Enumerate { instance, perturbed } => {
            let (inst, hash) = load_instance(instance)?;
            let space = enumerate(&inst, *perturbed, guard)?;
            let mut m = envelope("enumerate", &hash);
            m.insert("perturbed".into(), json!(perturbed));
            m.insert("count".into(), json!(space.len()));
            m.insert("exact".into(), json!(space.exact_ids().len()));
            Ok(Report::Object(m))
        }
        Command::Diagnose { instance, chain, eps } => {
            let (inst, hash) = load_instance(instance)?;
            let kind = chain_kind(chain.as_deref(), &inst, false)?;
            let space = enumerate(&inst, kind.perturbed_space(), guard)?;
            let spec = ChainSpec::new(kind, inst, 0)?;
            let p = transition_matrix(&spec, &space)?;
            let gap = spectral_gap(&p)?;
            let mix = mixing_time(&p, *eps)?;
            let n = space.len() as f64;
            let mut m = envelope("diagnose", &hash);
            m.insert("chain".into(), to_value(&kind));
            m.insert("states".into(), json!(space.len()));
            m.insert("lambda1".into(), json!(gap.lambda1));
            m.insert("gap".into(), json!(gap.gap));
            m.insert("eps".into(), json!(eps));
            m.insert("mixing_time".into(), json!(mix.tau));
            m.insert("worst_state".into(), edges_json(&space.labeled(mix.worst_state)));
            m.insert("sinclair_bound".into(), json!((n / eps).ln() / gap.gap));
            Ok(Report::Object(m))
        }
        Command::Stability { instance, exact_k } => {
            let (inst, hash) = load_instance(instance)?;
            let rep = stability_report(&inst, *exact_k, guard)?;
            let mut m = envelope("stability", &hash);
            for v in &rep.verdicts {
                m.insert(v.name.clone(), json!(v.holds));
            }
            for (k, v) in to_value(&rep).as_object().expect("report is an object") {
                if k != "verdicts" {
                    m.insert(k.clone(), v.clone());
                }
            }
            Ok(Report::Object(m))
        }
        Command::Repair { instance, graph, depth } => {
            let (inst, hash) = load_instance(instance)?;
            let g = load_graph(graph, &inst)?;
            let mut m = envelope("repair", &hash);
            match &inst {
                Instance::Pam(p) if jdm_hypotheses(p) => {
                    let moves = jdm_repair(&g, p)?;
                    let end = graphmix::stability::apply_hinge_moves(&g, &moves)?;
                    m.insert("method".into(), json!("regular_classes"));
                    m.insert("moves".into(), json!(moves.iter().map(|&(i, j, k)| json!({"i": i, "j": j, "k": k})).collect::<Vec<_>>()));
                    m.insert("length".into(), json!(moves.len()));
                    m.insert("edges".into(), edges_json(&end));
                }
                _ => {
                    let steps = bounded_repair(&g, &inst, *depth)?;
                    let mut end = g.clone();
                    for s in &steps {
                        end.apply(&s.removed, &s.added)?;
                    }
                    m.insert("method".into(), json!("bounded_search"));
                    m.insert("length".into(), json!(steps.len()));
                    m.insert("moves".into(), to_value(&steps));
                    m.insert("edges".into(), edges_json(&end));
                }
            }
            Ok(Report::Object(m))
        }
        Command::Path { chain, instance, from, to, pairing } => {
            let (inst, hash) = load_instance(instance)?;
            let (g, g2) = (load_graph(from, &inst)?, load_graph(to, &inst)?);
            let head = |n: usize| {
                let mut m = envelope("path", &hash);
                m.insert("chain".into(), json!(chain));
                m.insert("moves".into(), json!(n));
                Value::Object(m)
            };
            let pick = |g: &LabeledGraph, g2: &LabeledGraph| -> Result<Pairing, CliError> {
                let diff = symmetric_difference(g, g2)?;
                Ok(match pairing {
                    Some(seed) => sample_pairing(&diff, &mut rand_chacha::ChaCha8Rng::seed_from_u64(*seed))?,
                    None => enumerate_pairings(&diff)?.next().expect("at least one pairing"),
                })
            };
            let lines: Vec<Value> = match chain.as_str() {
                "js" => {
                    let psi = pick(&g, &g2)?;
                    let path = js_canonical_path(&g, &g2, &psi)?;
                    path.steps.iter().enumerate().map(|(t, s)| json!({"t": t, "move": to_value(s)})).collect()
                }
                "hinge" => {
                    let Instance::Pam(p) = &inst else {
                        return Err(CliError::Usage("hinge paths need a pam instance".into()));
                    };
                    let psi = pick(&g, &g2)?;
                    let (path, _) = hinge_canonical_path(&g, &g2, p, &psi)?;
                    path.steps.iter().enumerate().map(|(t, s)| json!({"t": t, "move": to_value(s)})).collect()
                }
                "switch" => {
                    let moves = switch_path(&g, &g2)?;
                    moves.iter().enumerate().map(|(t, s)| json!({"t": t, "move": to_value(s)})).collect()
                }
                other => return Err(CliError::Usage(format!("path supports js, hinge and switch, not {other:?}"))),
            };
            let mut out = vec![head(lines.len())];
            out.extend(lines);
            Ok(Report::Lines(out))
        }
    }
}

fn render(report: &Report) -> String {
    match report {
        Report::Object(m) => serde_json::to_string_pretty(m).expect("report serialises") + "\n",
        Report::Lines(ls) => ls.iter().map(|l| l.to_string() + "\n").collect(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    let v = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
    println!("{v}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim().to_string())),
    };
    match execute(&cli.command).and_then(|r| emit(&render(&r), cli.out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
