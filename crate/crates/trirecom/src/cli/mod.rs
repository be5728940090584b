//! Command-line front end. Exit codes: 0 success, 1 domain failure, 2 usage
//! error.

pub mod files;
pub mod svg;

use crate::lattice::TriRegion;
use crate::oracle::{build_state_graph, check_connected, eccentricity_stats, enumerate_omega, export, rigid_states};
use crate::partition::{classify, ground_state, parse_perm, Partition, SizeTargets};
use crate::pathfinder::{path_with, Granularity};
use crate::trace::verify_trace;
use clap::{Args, Parser, Subcommand, ValueEnum};
use files::{read_json, write_atomic, StateFile, TraceFile};
use std::collections::VecDeque;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "trirecom", version, about = "Recombination paths between three-district partitions of a triangular region")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Instance {
    /// Side length of the triangular region.
    #[arg(long)]
    n: usize,
    /// District size targets, e.g. 5,5,5.
    #[arg(long, value_parser = parse_targets)]
    k: [usize; 3],
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GranularityArg {
    Flip,
    Recom,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and verify a path between two states.
    Path {
        #[command(flatten)]
        instance: Instance,
        /// Source state file.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Target state file.
        #[arg(long)]
        to: Option<PathBuf>,
        /// Ground state order such as 123; fills the source first, then the target.
        #[arg(long)]
        ground: Vec<String>,
        /// Where to write the trace file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "recom")]
        granularity: GranularityArg,
    },
    /// Enumerate the state space of a small instance.
    Enumerate {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 1)]
        slack: usize,
        /// Write the state graph (states and adjacency) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check every step of a trace file.
    Verify {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Degree, connectivity and eccentricity summary of a small instance.
    Stats {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 1)]
        slack: usize,
        /// Exact diameter when the state count is at most this.
        #[arg(long, default_value_t = 4000)]
        sources: usize,
    },
    /// Show the exact-size rigid partition on the side-3 region.
    RigidDemo,
    /// Draw a state or every state of a trace as SVG.
    Render {
        #[arg(long, conflicts_with_all = ["trace", "ground"])]
        state: Option<PathBuf>,
        #[arg(long, conflicts_with = "ground")]
        trace: Option<PathBuf>,
        /// Draw a ground state; needs --n and --k.
        #[arg(long, requires_all = ["n", "k"])]
        ground: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_parser = parse_targets)]
        k: Option<[usize; 3]>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_targets(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated sizes, got {s:?}"));
    }
    let mut k = [0; 3];
    for (slot, part) in k.iter_mut().zip(parts) {
        *slot = part.trim().parse().map_err(|_| format!("{part:?} is not a size"))?;
    }
    Ok(k)
}

/// A failure with its exit code.
struct Exit {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit { code: EXIT_USAGE, message: message.into() }
}

fn failure(message: impl ToString) -> Exit {
    Exit { code: EXIT_FAILURE, message: message.to_string() }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn region_of(n: usize) -> Result<Arc<TriRegion>, Exit> {
    TriRegion::new(n).map(Arc::new).map_err(|e| usage(e.to_string()))
}

fn targets_of(region: &TriRegion, k: &[usize; 3]) -> Result<SizeTargets, Exit> {
    let targets = SizeTargets::new(k[0], k[1], k[2]);
    targets.check(region).map_err(|e| usage(e.to_string()))?;
    Ok(targets)
}

fn ground_of(region: &Arc<TriRegion>, targets: SizeTargets, perm: &str) -> Result<Partition, Exit> {
    let perm = parse_perm(perm).ok_or_else(|| usage(format!("{perm:?} is not an order of 1, 2, 3")))?;
    ground_state(region.clone(), targets, perm).map_err(|e| usage(e.to_string()))
}

fn load_state(path: &Path) -> Result<Partition, Exit> {
    read_json::<StateFile>(path).and_then(|f| f.to_partition()).map_err(failure)
}

fn load_trace(path: &Path) -> Result<TraceFile, Exit> {
    read_json::<TraceFile>(path).map_err(failure)
}

fn out_err(e: std::io::Error) -> Exit {
    failure(e)
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), Exit> {
    match command {
        Command::Path { instance, from, to, ground, out, granularity } => {
            let region = region_of(instance.n)?;
            let targets = targets_of(&region, &instance.k)?;
            let mut grounds: VecDeque<String> = ground.into();
            let mut endpoint = |file: Option<PathBuf>, role: &str| -> Result<Partition, Exit> {
                match (file, grounds.pop_front()) {
                    (Some(f), g) => {
                        if let Some(g) = g {
                            grounds.push_front(g);
                        }
                        load_state(&f)
                    }
                    (None, Some(g)) => ground_of(&region, targets, &g),
                    (None, None) => Err(usage(format!("no {role} given: use --{} FILE or --ground PERM", if role == "source" { "from" } else { "to" }))),
                }
            };
            let sigma = endpoint(from, "source")?;
            let tau = endpoint(to, "target")?;
            if !grounds.is_empty() {
                return Err(usage("too many --ground values"));
            }
            for p in [&sigma, &tau] {
                if p.region().n() != instance.n || p.targets() != targets {
                    return Err(usage("state file does not match --n and --k"));
                }
            }
            let g = match granularity {
                GranularityArg::Flip => Granularity::Flip,
                GranularityArg::Recom => Granularity::Recom,
            };
            let trace = path_with(&sigma, &tau, g).map_err(failure)?;
            if let Some(out) = out {
                write_atomic(&out, &TraceFile::from_trace(&trace).to_json()).map_err(failure)?;
            }
            let n3 = (instance.n * instance.n * instance.n) as f64;
            writeln!(stdout, "steps: {}", trace.len()).map_err(out_err)?;
            writeln!(stdout, "budget ratio: {:.4}", trace.len() as f64 / n3).map_err(out_err)?;
            Ok(())
        }
        Command::Enumerate { instance, slack, out } => {
            let region = region_of(instance.n)?;
            let targets = targets_of(&region, &instance.k)?;
            if slack > 1 {
                return Err(usage("slack must be 0 or 1"));
            }
            let states = enumerate_omega(&region, targets, slack).map_err(failure)?;
            let graph = build_state_graph(states);
            let (_, components) = check_connected(&graph);
            writeln!(stdout, "states: {}", graph.len()).map_err(out_err)?;
            writeln!(stdout, "edges: {}", graph.edge_count()).map_err(out_err)?;
            writeln!(stdout, "components: {components}").map_err(out_err)?;
            if let (Some(out), Some(data)) = (out, export(&graph)) {
                let text = serde_json::to_string(&data).map_err(failure)? + "\n";
                write_atomic(&out, &text).map_err(failure)?;
            }
            Ok(())
        }
        Command::Verify { trace } => {
            let file = load_trace(&trace)?;
            let t = file.to_trace().map_err(failure)?;
            let report = verify_trace(&t.source, &t.steps).map_err(failure)?;
            writeln!(stdout, "ok: {} steps", report.steps).map_err(out_err)?;
            writeln!(stdout, "last: {}", report.last.label_string()).map_err(out_err)?;
            Ok(())
        }
        Command::Stats { instance, slack, sources } => {
            let region = region_of(instance.n)?;
            let targets = targets_of(&region, &instance.k)?;
            if slack > 1 {
                return Err(usage("slack must be 0 or 1"));
            }
            let states = enumerate_omega(&region, targets, slack).map_err(failure)?;
            let summary = eccentricity_stats(&build_state_graph(states), sources);
            let text = serde_json::to_string_pretty(&summary).map_err(failure)?;
            writeln!(stdout, "{text}").map_err(out_err)
        }
        Command::RigidDemo => {
            let region = region_of(3)?;
            let targets = SizeTargets::new(2, 2, 2);
            let states = enumerate_omega(&region, targets, 0).map_err(failure)?;
            let graph = build_state_graph(states);
            let rigid = rigid_states(&graph);
            let Some(p) = rigid.first() else {
                return Err(failure("no rigid state found"));
            };
            let i = graph.index_of(p).expect("state comes from the graph");
            if graph.shape_degree(i) != 0 {
                return Err(failure("reported rigid state has a move"));
            }
            writeln!(stdout, "n=3, k=(2,2,2), exact sizes: {} states, {} rigid", graph.len(), rigid.len())
                .map_err(out_err)?;
            writeln!(stdout, "labels: {}", p.label_string()).map_err(out_err)?;
            write!(stdout, "{p}").map_err(out_err)?;
            writeln!(
                stdout,
                "moves changing a district: {} (relabelings of equal-size districts: {})",
                graph.shape_degree(i),
                graph.degree(i)
            )
            .map_err(out_err)
        }
        Command::Render { state, trace, ground, n, k, out } => {
            let frames: Vec<(Partition, String)> = if let Some(path) = state {
                let p = load_state(&path)?;
                let caption = p.label_string();
                vec![(p, caption)]
            } else if let Some(path) = trace {
                let t = load_trace(&path)?.to_trace().map_err(failure)?;
                let mut frames = vec![(t.source.clone(), "source".to_string())];
                for (j, (s, note)) in t.steps.iter().zip(&t.annotations).enumerate() {
                    let p = Partition::new(t.source.region_arc().clone(), s.after.clone(), t.source.targets())
                        .map_err(failure)?;
                    frames.push((p, format!("step {}, keep {}\n{note}", j + 1, s.untouched)));
                }
                frames
            } else if let (Some(perm), Some(n), Some(k)) = (ground, n, k) {
                let region = region_of(n)?;
                let targets = targets_of(&region, &k)?;
                vec![(ground_of(&region, targets, &perm)?, format!("ground {perm}"))]
            } else {
                return Err(usage("render needs --state, --trace or --ground"));
            };
            for (p, _) in &frames {
                if !classify(p).1.valid() {
                    return Err(failure("a state to draw has a district that is not simply connected"));
                }
            }
            write_atomic(&out, &svg::render(&frames, 6)).map_err(failure)?;
            writeln!(stdout, "frames: {}", frames.len()).map_err(out_err)
        }
    }
}
