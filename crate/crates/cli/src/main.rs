use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ltlbc::automaton::translate;
use ltlbc::problem::Problem;
use ltlbc::sim::{falsify, trajectory_csv, FalsifyOptions};
use ltlbc::verifier::{verify_problem, Verdict, VerifyOptions};

const EXIT_SATISFIED: u8 = 0;
const EXIT_INCONCLUSIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Verify polynomial dynamical systems against LTL specifications without
/// the next operator.
#[derive(Parser)]
#[command(name = "ltlbc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline. Exit 0 when satisfied, 1 when inconclusive.
    Verify {
        problem: PathBuf,
        #[command(flatten)]
        opts: VerifyArgs,
        /// Write the verdict as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write all certificates, Gram matrices included, as JSON.
        #[arg(long)]
        certificates: Option<PathBuf>,
        /// Write every barrier SDP in SDPA format into this directory.
        #[arg(long)]
        emit_sdpa: Option<PathBuf>,
    },
    /// Verify, then sample every certificate on a grid for contour plots.
    Plotdata {
        problem: PathBuf,
        #[command(flatten)]
        opts: VerifyArgs,
        /// Grid points per axis.
        #[arg(long, default_value_t = 400)]
        grid: usize,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Simulate trajectories and search for a violating trace.
    Simulate {
        problem: PathBuf,
        /// Replace the problem's formula.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Directory for the counterexample trajectory CSV.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the automaton of the negated specification.
    Automaton {
        problem: PathBuf,
        #[arg(long)]
        formula: Option<String>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Replace the problem's formula.
    #[arg(long)]
    formula: Option<String>,
    /// Highest barrier degree tried.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Barrier level on the target set.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seconds per obligation.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Seed for sampled validation and falsification searches.
    #[arg(long)]
    seed: Option<u64>,
    /// Report zero timings so reports compare byte for byte.
    #[arg(long)]
    normalize_timings: bool,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load(path: &Path, formula: Option<&str>) -> Result<Problem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let p = Problem::parse(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(match formula {
        Some(f) => p.with_formula(f)?,
        None => p,
    })
}

fn options(p: &Problem, a: &VerifyArgs) -> VerifyOptions {
    let mut o = VerifyOptions::from_problem(&p.options);
    if let Some(d) = a.max_degree {
        o.barrier.max_degree = d;
    }
    if let Some(e) = a.epsilon {
        o.barrier.epsilon = e;
    }
    if let Some(t) = a.time_budget {
        o.time_budget = t;
    }
    if let Some(s) = a.seed {
        o.barrier.seed = s;
        o.disjoint.seed = s;
    }
    o.normalize_timings = a.normalize_timings;
    o
}

fn summary(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "formula: {}", v.formula);
    let _ = writeln!(
        s,
        "automaton: {} states, {} transitions, {} pruned",
        v.automaton.states,
        v.automaton.transitions,
        v.automaton.pruned.len()
    );
    for st in &v.states {
        match st.condition {
            Some(c) => {
                let _ = writeln!(s, "q{}: {:?} condition holds", st.state, c);
            }
            None => {
                let _ = writeln!(s, "q{}: no condition established", st.state);
                for r in &st.reasons {
                    let _ = writeln!(s, "  {r}");
                }
                if let Some((id, m)) = st.near_miss {
                    let _ = writeln!(s, "  best margin {m:.3e} at obligation {id}");
                }
            }
        }
    }
    for o in &v.obligations {
        let how = |e: &Option<ltlbc::verifier::Evidence>| match e {
            Some(e) => match e.degree {
                Some(d) => format!("{:?} (degree {d})", e.method),
                None => format!("{:?}", e.method),
            },
            None => "-".into(),
        };
        let _ = writeln!(
            s,
            "obligation {} {:?} path {:?} triple {:?}: {} direct {} repeated {}",
            o.id,
            o.family,
            o.path,
            o.triple,
            if o.discharged { "discharged" } else { "open" },
            how(&o.direct),
            how(&o.repeated)
        );
    }
    let _ = writeln!(s, "verdict: {:?}", v.status);
    s
}

fn run_verify(
    problem: &Path,
    a: &VerifyArgs,
    report: Option<&Path>,
    certificates: Option<&Path>,
    emit_sdpa: Option<&Path>,
) -> Result<u8, Failure> {
    let p = load(problem, a.formula.as_deref())?;
    let mut o = options(&p, a);
    if let Some(dir) = emit_sdpa {
        fs::create_dir_all(dir)?;
        o.sdpa_dir = Some(dir.to_path_buf());
    }
    let v = verify_problem(&p, &o)?;
    print!("{}", summary(&v));
    if let Some(path) = report {
        fs::write(path, v.to_json())?;
    }
    if let Some(path) = certificates {
        let certs: Vec<serde_json::Value> = v
            .certificates()
            .into_iter()
            .map(|(id, c)| serde_json::json!({ "obligation": id, "certificate": *c }))
            .collect();
        fs::write(path, serde_json::to_string_pretty(&certs)?)?;
    }
    Ok(if v.is_satisfied() {
        EXIT_SATISFIED
    } else {
        EXIT_INCONCLUSIVE
    })
}

fn run_plotdata(problem: &Path, a: &VerifyArgs, grid: usize, out: &Path) -> Result<u8, Failure> {
    if grid == 0 {
        return Err(Failure("grid must have at least one point per axis".into()));
    }
    let p = load(problem, a.formula.as_deref())?;
    if p.system.variables.len() != 2 {
        return Err(Failure("plot grids need exactly two variables".into()));
    }
    let v = verify_problem(&p, &options(&p, a))?;
    let certs = v.certificates();
    if certs.is_empty() {
        return Err(Failure("no certificate was produced".into()));
    }
    let regions = &p.system.regions;
    let bounds = regions
        .domain()
        .bounds()
        .ok_or_else(|| Failure("domain has no bounding box".into()))?;
    fs::create_dir_all(out)?;
    let vars = &p.system.variables;
    for (id, c) in certs {
        let lie = c.lie_derivative(&p.system.field);
        let mut s = format!("{},{},B,LfB,domain", vars[0], vars[1]);
        for name in regions.props() {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        let coord = |d: usize, k: usize| {
            if grid == 1 {
                0.5 * (bounds.lo[d] + bounds.hi[d])
            } else {
                bounds.lo[d] + (bounds.hi[d] - bounds.lo[d]) * k as f64 / (grid - 1) as f64
            }
        };
        for i in 0..grid {
            for j in 0..grid {
                let x = [coord(0, i), coord(1, j)];
                let _ = write!(
                    s,
                    "{},{},{},{},{}",
                    x[0],
                    x[1],
                    c.barrier.evaluate(&x),
                    lie.evaluate(&x),
                    u8::from(regions.domain().contains(&x, 0.0))
                );
                for k in 0..regions.props().len() {
                    let _ = write!(s, ",{}", u8::from(regions.region(k).contains(&x, 0.0)));
                }
                s.push('\n');
            }
        }
        let path = out.join(format!("barrier_obligation{id}.csv"));
        fs::write(&path, s)?;
        println!("wrote {}", path.display());
    }
    Ok(EXIT_SATISFIED)
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    problem: &Path,
    formula: Option<&str>,
    seed: Option<u64>,
    samples: Option<usize>,
    horizon: Option<f64>,
    step: Option<f64>,
    out: &Path,
) -> Result<u8, Failure> {
    let p = load(problem, formula)?;
    let d = FalsifyOptions::default();
    let opts = FalsifyOptions {
        samples: samples.or(p.options.samples).unwrap_or(d.samples),
        horizon: horizon.or(p.options.horizon).unwrap_or(d.horizon),
        step: step.or(p.options.step).unwrap_or(d.step),
        seed: seed.or(p.options.seed).unwrap_or(d.seed),
    };
    if !(opts.step > 0.0) || !(opts.horizon >= opts.step) {
        return Err(Failure("need step > 0 and horizon >= step".into()));
    }
    let negated = translate(&p.formula.negate(), p.system.regions.props());
    match falsify(&p.system, &negated, &opts) {
        None => {
            println!("no counterexample found in {} samples", opts.samples);
            Ok(EXIT_SATISFIED)
        }
        Some(c) => {
            fs::create_dir_all(out)?;
            let path = out.join(format!("counterexample_{}.csv", c.sample));
            fs::write(&path, trajectory_csv(&c.trajectory, &p.system))?;
            println!(
                "counterexample from {:?}: {}",
                c.x0,
                c.describe(p.system.regions.props())
            );
            println!("wrote {}", path.display());
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn run_automaton(problem: &Path, formula: Option<&str>) -> Result<u8, Failure> {
    let p = load(problem, formula)?;
    let a = translate(&p.formula.negate(), p.system.regions.props());
    print!("{}", a.to_text());
    Ok(EXIT_SATISFIED)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify {
            problem,
            opts,
            report,
            certificates,
            emit_sdpa,
        } => run_verify(
            problem,
            opts,
            report.as_deref(),
            certificates.as_deref(),
            emit_sdpa.as_deref(),
        ),
        Command::Plotdata {
            problem,
            opts,
            grid,
            out,
        } => run_plotdata(problem, opts, *grid, out),
        Command::Simulate {
            problem,
            formula,
            seed,
            samples,
            horizon,
            step,
            out,
        } => run_simulate(
            problem,
            formula.as_deref(),
            *seed,
            *samples,
            *horizon,
            *step,
            out,
        ),
        Command::Automaton { problem, formula } => run_automaton(problem, formula.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
