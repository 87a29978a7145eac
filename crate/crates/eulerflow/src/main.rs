use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eulerflow::bench::{bench_grid, format_table};
use eulerflow::format::{parse_instance, parse_solution, write_instance, write_solution, InstanceFile};
use eulerflow::generate::{gen_grid, gen_outer_boundary, GridParams};
use eulerflow::parallel::solve_parallel;
use eulerflow::viz::{emit_dot, emit_svg};
use eulerflow_core::oracle::{brute_force, check_uncrossed, uncross, OracleConfig, OracleOutcome};
use eulerflow_core::preprocess::normalize;
use eulerflow_core::solver::{
    solve_outer_boundary, solve_traced, verify_solution, SchemeFamily, SideTest, SolverConfig, Strategy,
};
use eulerflow_core::Verdict;

const FEASIBLE: u8 = 0;
const INFEASIBLE: u8 = 1;
const ERROR: u8 = 2;
const UNDECIDED: u8 = 3;

#[derive(Parser)]
#[command(name = "eulerflow", version, about = "Arc-disjoint paths on Eulerian planar acyclic digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance with the scheme solver.
    Solve(SolveArgs),
    /// Decide an instance by exhaustive search.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a solution against its instance.
    Check { instance: PathBuf, solution: PathBuf },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Rewrite a solution so that it is uncrossed.
    Uncross {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time the solver on growing grid instances.
    Bench {
        #[arg(long, value_enum, default_value_t = BenchFamily::Grid)]
        family: BenchFamily,
        #[arg(long, value_delimiter = ',', required = true)]
        scale: Vec<u32>,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
    },
    /// Draw an instance, optionally with a solution.
    Viz {
        instance: PathBuf,
        solution: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = VizFormat::Dot)]
        format: VizFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Use the greedy solver for instances with all terminals on the outer face.
    #[arg(long)]
    outer_boundary: bool,
    /// Enumerate matrix schemes on this many threads (enumeration order is kept).
    #[arg(long)]
    parallel: Option<usize>,
    /// Print every trial and how it failed.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Give up after this many trials (exit code 3).
    #[arg(long)]
    max_schemes: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Lazy)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sides)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = SideArg::Rotation)]
    side_test: SideArg,
}

#[derive(Subcommand)]
enum GenFamily {
    Grid {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        corners: bool,
        #[arg(long)]
        no_scramble: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Outer {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFamily {
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum VizFormat {
    Dot,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Lazy,
    Enumerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sides,
    Matrix,
    Pairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Rotation,
    Faces,
}

type Outcome = Result<u8, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<InstanceFile, String> {
    parse_instance(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn verdict_code(v: &Verdict, out: Option<&PathBuf>) -> Outcome {
    match v {
        Verdict::Feasible(sol) => {
            println!("feasible");
            if let Some(p) = out {
                write(p, &write_solution(sol))?;
            }
            Ok(FEASIBLE)
        }
        Verdict::Infeasible => {
            println!("infeasible");
            Ok(INFEASIBLE)
        }
        Verdict::Undecided => {
            println!("undecided: trial limit reached");
            Ok(UNDECIDED)
        }
    }
}

fn solve_cmd(a: &SolveArgs) -> Outcome {
    let file = load(&a.file)?;
    if a.outer_boundary {
        let key = file.outer_face.ok_or("--outer-boundary needs an outer_face in the instance file")?;
        let v = solve_outer_boundary(&file.instance, key).map_err(|e| e.to_string())?;
        return verdict_code(&v, a.out.as_ref());
    }
    let config = SolverConfig {
        strategy: match a.strategy {
            StrategyArg::Lazy => Strategy::Lazy,
            StrategyArg::Enumerate => Strategy::Enumerate,
        },
        family: match a.family {
            FamilyArg::Sides => SchemeFamily::Sides,
            FamilyArg::Matrix => SchemeFamily::Matrix,
            FamilyArg::Pairs => SchemeFamily::PairBehaviours,
        },
        side_test: match a.side_test {
            SideArg::Rotation => SideTest::Rotation,
            SideArg::Faces => SideTest::Faces,
        },
        max_trials: a.max_schemes,
    };
    if a.parallel.is_some() && config.family != SchemeFamily::Matrix {
        return Err("--parallel enumerates matrix schemes; pass --family matrix".into());
    }
    let report = match a.parallel {
        Some(n) => solve_parallel(&file.instance, &config, n).map_err(|e| e.to_string())?,
        None => {
            let trace = a.trace;
            solve_traced(&file.instance, &config, &mut |p, ev| {
                if !trace {
                    return;
                }
                // A lazy trial stands for every combination of its candidate values.
                let span: u128 = ev.candidates.iter().map(|c| c.len() as u128).product();
                let status = match &ev.result {
                    Ok(()) => "ok".to_string(),
                    Err(f) => format!("{:?}: {f}", f.mode()),
                };
                let extra = if span > 1 { format!(" (+{} equivalent)", span - 1) } else { String::new() };
                eprintln!("{}{extra} => {status}", p.describe(ev));
            })
            .map_err(|e| e.to_string())?
        }
    };
    eprintln!("schemes: {}, trials: {}", report.scheme_count, report.stats.trials);
    verdict_code(&report.verdict, a.out.as_ref())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve(a) => solve_cmd(&a),
        Command::Oracle { file, budget, out } => {
            let f = load(&file)?;
            let rep = brute_force(&f.instance, &OracleConfig { budget });
            eprintln!("nodes: {}", rep.nodes);
            match rep.outcome {
                OracleOutcome::Feasible(sol) => verdict_code(&Verdict::Feasible(sol), out.as_ref()),
                OracleOutcome::Infeasible => verdict_code(&Verdict::Infeasible, None),
                OracleOutcome::BudgetExceeded => {
                    println!("undecided: budget exhausted");
                    Ok(UNDECIDED)
                }
            }
        }
        Command::Check { instance, solution } => {
            let f = load(&instance)?;
            let sol = parse_solution(&read(&solution)?).map_err(|e| format!("{}: {e}", solution.display()))?;
            match verify_solution(&f.instance, &sol) {
                Ok(()) => {
                    println!("ok");
                    Ok(FEASIBLE)
                }
                Err(v) => {
                    println!("invalid: {v}");
                    Ok(INFEASIBLE)
                }
            }
        }
        Command::Gen { family } => {
            let (file, out) = match family {
                GenFamily::Grid { width, height, k, r, corners, no_scramble, seed, out } => {
                    let p = GridParams { width, height, k, r, corners, scramble: !no_scramble };
                    (gen_grid(&p, seed).map_err(|e| e.to_string())?, out)
                }
                GenFamily::Outer { n, k, seed, out } => (gen_outer_boundary(n, k, seed).map_err(|e| e.to_string())?, out),
            };
            write(&out, &write_instance(&file))?;
            Ok(FEASIBLE)
        }
        Command::Uncross { instance, solution, out } => {
            let f = load(&instance)?;
            let sol = parse_solution(&read(&solution)?).map_err(|e| format!("{}: {e}", solution.display()))?;
            verify_solution(&f.instance, &sol).map_err(|e| format!("not a solution: {e}"))?;
            let norm = normalize(&f.instance).map_err(|e| e.to_string())?;
            let lifted = norm.lift_solution(&sol).ok_or("solution does not fit the normalized instance")?;
            let done = uncross(norm.graph(), &norm.order, &lifted).map_err(|e| e.to_string())?;
            check_uncrossed(norm.graph(), &done.solution).map_err(|e| e.to_string())?;
            let projected = done.solution.project(&norm, f.instance.demands.len());
            verify_solution(&f.instance, &projected).map_err(|e| format!("uncrossing broke the solution: {e}"))?;
            eprintln!("swaps: {}", done.swaps.len());
            write(&out, &write_solution(&projected))?;
            Ok(FEASIBLE)
        }
        Command::Bench { family: BenchFamily::Grid, scale, k, r, seeds } => {
            let rows = bench_grid(&scale, k, r, seeds, Duration::from_millis(50)).map_err(|e| e.to_string())?;
            print!("{}", format_table(&rows));
            Ok(FEASIBLE)
        }
        Command::Viz { instance, solution, format, out } => {
            let f = load(&instance)?;
            let sol = match solution {
                Some(p) => Some(parse_solution(&read(&p)?).map_err(|e| format!("{}: {e}", p.display()))?),
                None => None,
            };
            let text = match format {
                VizFormat::Dot => emit_dot(&f, sol.as_ref()),
                VizFormat::Svg => emit_svg(&f, sol.as_ref()).map_err(|e| e.to_string())?,
            };
            write(&out, &text)?;
            Ok(FEASIBLE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ERROR } else { FEASIBLE };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}
