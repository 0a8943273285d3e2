//! The `xilab` command line: one binary, one subcommand per operation,
//! deterministic reports. Exit codes: 0 all requested checks pass, 1 a check
//! failed, 2 usage or input problem, 3 internal invariant violation.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use xilab_core::SizeGuard;

mod io;
mod nonsing_cmds;
mod report;
mod rgraph_cmds;
mod shell_cmds;
mod site_cmds;
mod xi_cmds;

pub use report::{Format, Report};

/// How a command fails outside of an honest negative check result.
#[derive(Debug)]
pub enum CmdFail {
    /// Bad arguments, unreadable or malformed inputs, guard limits: exit 2.
    Usage(String),
    /// A library invariant broke mid-computation: exit 3.
    Internal(String),
}

impl CmdFail {
    fn code(&self) -> i32 {
        match self {
            CmdFail::Usage(_) => 2,
            CmdFail::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdFail::Usage(m) | CmdFail::Internal(m) => m,
        }
    }
}

/// Classify a core error escaping a computation whose inputs were already
/// validated: guard trips ask the user for a bigger budget, everything else
/// means a broken invariant.
fn compute_fail(e: xilab_core::Error) -> CmdFail {
    match e {
        xilab_core::Error::SizeGuardExceeded { .. } => CmdFail::Usage(format!(
            "{e} (set XI_LAB_GUARD to raise the element budget)"
        )),
        xilab_core::Error::Internal { .. } => CmdFail::Internal(e.to_string()),
        other => CmdFail::Internal(format!("unexpected failure on validated inputs: {other}")),
    }
}

#[derive(Parser)]
#[command(
    name = "xilab",
    version,
    about = "Workbench for finite presheaf toposes: local state classifiers, \
             singularity measurements, probes, shells, and non-singular maps"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in the report header; sampling commands derive their
    /// choices from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a finite category given by catalog name or file.
    CatValidate {
        /// Catalog site name or path to a category file.
        #[arg(long)]
        category: String,
    },
    /// List the built-in sites.
    CatCatalog,
    /// Compute the local state classifier of a site.
    Xi {
        #[arg(long)]
        category: String,
        /// Leave degenerate edges out of DOT output.
        #[arg(long, default_value_t = false)]
        skip_degenerate: bool,
    },
    /// Measure a presheaf: the canonical kernel map into the classifier.
    Sigma {
        #[arg(long)]
        category: String,
        /// Path to a presheaf file.
        #[arg(long)]
        presheaf: PathBuf,
    },
    /// Global points of a presheaf.
    Points {
        #[arg(long)]
        category: String,
        #[arg(long)]
        presheaf: PathBuf,
    },
    /// Operations on probes (selections of congruences).
    Probes {
        #[command(subcommand)]
        action: ProbesAction,
    },
    /// Check the shell axioms for every probe of a site against the
    /// exhaustive presheaf sample up to a carrier bound.
    ShellCheck {
        #[arg(long)]
        category: String,
        /// Carrier bound for the exhaustive presheaf sample.
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Probe/subpresheaf census: bijection, saturation vs upper closure,
    /// and skeleton round-trips over all presheaves up to a bound.
    Census {
        #[arg(long)]
        category: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Test a map of presheaves for non-singularity (kernel preservation).
    Nonsingular {
        #[arg(long)]
        category: String,
        /// Path to a map file.
        #[arg(long)]
        map: PathBuf,
    },
    /// Largest subobject of the source on which a map becomes non-singular.
    Coreflect {
        #[arg(long)]
        category: String,
        #[arg(long)]
        map: PathBuf,
    },
    /// Non-singular maps between two presheaves.
    PetitHom {
        #[arg(long)]
        category: String,
        /// Source presheaf file, then target presheaf file.
        #[arg(long, num_args = 1, action = clap::ArgAction::Append)]
        presheaf: Vec<PathBuf>,
    },
    /// Whether a map is cartesian for a saturated probe's skeleton comonad.
    Cartesian {
        #[arg(long)]
        category: String,
        #[arg(long)]
        map: PathBuf,
        /// Path to a probe file.
        #[arg(long)]
        probe: PathBuf,
    },
    /// Fast commands for reflexive graphs (presheaves on the edge site).
    Rgraph {
        #[command(subcommand)]
        action: RgraphAction,
    },
    /// Compare the colimit of the identity diagram with the terminal object.
    ColimitIdentity {
        #[arg(long)]
        category: String,
    },
}

#[derive(Subcommand)]
enum ProbesAction {
    /// All probes of the site's classifier, saturation marked.
    Enumerate {
        #[arg(long)]
        category: String,
    },
    /// Upper closure of a probe.
    Saturate {
        #[arg(long)]
        category: String,
        #[arg(long)]
        probe: PathBuf,
    },
    /// Pointwise intersection of a family of probes.
    Intersect {
        #[arg(long)]
        category: String,
        /// Repeat for each probe file.
        #[arg(long, required = true, num_args = 1, action = clap::ArgAction::Append)]
        probe: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum RgraphAction {
    /// Label every non-degenerate edge loop/non-loop.
    Sigma {
        /// Path to a graph file.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = false)]
        skip_degenerate: bool,
    },
    /// Test a graph map for non-singularity.
    Nonsingular {
        /// Path to a graph map file.
        #[arg(long)]
        map: PathBuf,
    },
    /// Points, components, and the Leibniz core of a graph.
    Leibniz {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = false)]
        skip_degenerate: bool,
    },
    /// Classifying map of a lightly dense subgraph.
    Classify {
        #[arg(long)]
        graph: PathBuf,
        /// Path to a subgraph file.
        #[arg(long)]
        subgraph: PathBuf,
    },
    /// Enumerate graphs up to a node bound and verify the identification of
    /// maps over the one-loop graph with (set, distinguished subset) pairs.
    Sierpinski {
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Reproduce the descent counterexample for non-singular maps.
    Calibration,
}

/// Parse and execute; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let guard = SizeGuard::from_env();
    let outcome = dispatch(&cli.command, &guard);
    let report = match outcome {
        Ok(report) => report,
        Err(fail) => {
            eprintln!("error: {}", fail.message());
            return fail.code();
        }
    };
    let rendered = match report.render(cli.format, cli.seed, &guard) {
        Ok(s) => s,
        Err(fail) => {
            eprintln!("error: {}", fail.message());
            return fail.code();
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    } else {
        print!("{rendered}");
    }
    if report.pass {
        0
    } else {
        1
    }
}

fn dispatch(command: &Command, guard: &SizeGuard) -> Result<Report, CmdFail> {
    match command {
        Command::CatValidate { category } => site_cmds::cat_validate(category, guard),
        Command::CatCatalog => site_cmds::cat_catalog(),
        Command::ColimitIdentity { category } => site_cmds::colimit_identity(category, guard),
        Command::Xi {
            category,
            skip_degenerate,
        } => xi_cmds::xi(category, *skip_degenerate, guard),
        Command::Sigma { category, presheaf } => xi_cmds::sigma(category, presheaf, guard),
        Command::Points { category, presheaf } => xi_cmds::points(category, presheaf, guard),
        Command::Probes { action } => match action {
            ProbesAction::Enumerate { category } => xi_cmds::probes_enumerate(category, guard),
            ProbesAction::Saturate { category, probe } => {
                xi_cmds::probes_saturate(category, probe, guard)
            }
            ProbesAction::Intersect { category, probe } => {
                xi_cmds::probes_intersect(category, probe, guard)
            }
        },
        Command::ShellCheck { category, bound } => {
            shell_cmds::shell_check(category, *bound, guard)
        }
        Command::Census { category, bound } => shell_cmds::census(category, *bound, guard),
        Command::Nonsingular { category, map } => {
            nonsing_cmds::nonsingular(category, map, guard)
        }
        Command::Coreflect { category, map } => nonsing_cmds::coreflect(category, map, guard),
        Command::PetitHom { category, presheaf } => {
            nonsing_cmds::petit_hom(category, presheaf, guard)
        }
        Command::Cartesian {
            category,
            map,
            probe,
        } => nonsing_cmds::cartesian(category, map, probe, guard),
        Command::Rgraph { action } => match action {
            RgraphAction::Sigma {
                graph,
                skip_degenerate,
            } => rgraph_cmds::sigma(graph, *skip_degenerate),
            RgraphAction::Nonsingular { map } => rgraph_cmds::nonsingular(map),
            RgraphAction::Leibniz {
                graph,
                skip_degenerate,
            } => rgraph_cmds::leibniz(graph, *skip_degenerate),
            RgraphAction::Classify { graph, subgraph } => {
                rgraph_cmds::classify(graph, subgraph)
            }
            RgraphAction::Sierpinski { bound } => rgraph_cmds::sierpinski(*bound, guard),
            RgraphAction::Calibration => rgraph_cmds::calibration(guard),
        },
    }
}
