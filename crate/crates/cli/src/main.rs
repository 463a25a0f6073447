use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use sqrect::corpus;
use sqrect::dumbbell::Dumbbell;
use sqrect::grid::GridComplex;
use sqrect::io::{self, Input, IoError};
use sqrect::layout::{self, LayoutError, SquaredLayout};
use sqrect::phi;
use sqrect::solver::{solve_optimal, ModulusResult, Normalization, SolveError, SolveOptions};
use sqrect::vector::WeightVector;

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sqrect",
    version,
    about = "Optimal weights and squared rectangles for tiled quadrilaterals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the optimal weight function and lay out the squared rectangle.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        config: RunConfig,
        #[command(flatten)]
        out: Outputs,
    },
    /// Apply binary subdivision `--level` times.
    Subdivide {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check that the weights are uniform on the middle of the bar.
    VerifyDumbbell {
        input: PathBuf,
        /// Check these weights (a result document) instead of solving.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Uniformity tolerance relative to the height.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        config: RunConfig,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Exact operations on weight vectors, given as JSON arrays of "p/q" strings
    /// (literal or a file path).
    Phi {
        #[command(subcommand)]
        op: PhiOp,
    },
    /// Write random quadrilaterals or dumbbells.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Largest number of tiles (of a quadrilateral, or of each ball).
        #[arg(long, default_value_t = 10)]
        max_tiles: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Reproduce the named shapes and their squared rectangles at several levels.
    Figures {
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        /// Highest subdivision level.
        #[arg(long, default_value_t = 3)]
        max_level: u32,
        #[command(flatten)]
        config: RunConfig,
    },
}

#[derive(Subcommand)]
enum PhiOp {
    Apply {
        vector: String,
    },
    Iterate {
        vector: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    Mu {
        vector: String,
    },
    Preimage {
        vector: String,
    },
    /// Minimal-area extension to a rectangle with `--columns` columns.
    Extend {
        vector: String,
        #[arg(long, default_value_t = 2)]
        columns: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Quadrilateral,
    Dumbbell,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    HeightOne,
    Integer,
}

#[derive(Args, Clone)]
struct RunConfig {
    #[arg(long, default_value_t = 1e-12)]
    tol_feas: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_kkt: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_layout: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "height-one")]
    normalize: NormalizeArg,
    /// Refine the solution in rational arithmetic.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    level: u32,
}

#[derive(Args)]
struct Outputs {
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    NoConvergence(String),
    Failed(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::MaxIterationsExceeded { .. } => Failure::NoConvergence(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

impl From<LayoutError> for Failure {
    fn from(e: LayoutError) -> Self {
        Failure::Failed(e.to_string())
    }
}

impl RunConfig {
    fn options(&self) -> Result<SolveOptions, Failure> {
        for (name, v) in [
            ("tol-feas", self.tol_feas),
            ("tol-kkt", self.tol_kkt),
            ("tol-layout", self.tol_layout),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Invalid(format!("--{name} must be positive")));
            }
        }
        let normalization = match self.normalize {
            NormalizeArg::HeightOne => Normalization::HeightOne,
            NormalizeArg::Integer => Normalization::Integer,
        };
        if normalization == Normalization::Integer && !self.exact {
            return Err(Failure::Invalid(
                "--normalize integer requires --exact".into(),
            ));
        }
        Ok(SolveOptions {
            tol_feas: self.tol_feas,
            tol_kkt: self.tol_kkt,
            max_iter: self.max_iter,
            normalization,
            exact: self.exact,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::NoConvergence(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NO_CONVERGENCE)
        }
        Err(Failure::Failed(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn read_input(path: &Path) -> Result<Input, Failure> {
    Ok(io::parse_input(&fs::read_to_string(path)?)?)
}

fn read_vector(arg: &str) -> Result<WeightVector, Failure> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)?
    };
    Ok(io::parse_vector(&text)?)
}

fn write_json(v: &Value, path: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("values serialize") + "\n";
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Solves and lays out; the layout is validated but returned either way.
fn solve_and_place(
    c: &GridComplex,
    config: &RunConfig,
) -> Result<(ModulusResult, SquaredLayout, bool), Failure> {
    let r = solve_optimal(c, &config.options()?)?;
    let l = layout::place(c, &r);
    let report = layout::validate_layout(&l, config.tol_layout, layout::DEFAULT_SAMPLES);
    if !report.passed() {
        eprintln!("layout failed validation: {report:?}");
    }
    Ok((r, l, report.passed()))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { input, config, out } => {
            let input = read_input(&input)?.subdivide_times(config.level);
            let c = input.complex();
            let (r, l, ok) = solve_and_place(c, &config)?;
            let mut doc = io::result_json(c, &r);
            doc["layout"] = layout::emit_json(&l);
            write_json(&doc, out.json.as_deref())?;
            if let Some(p) = &out.svg {
                layout::emit_svg(&l, p, c.len() <= 400)?;
            }
            eprintln!(
                "{} tiles, modulus {:.12}, {} iterations",
                c.len(),
                r.modulus,
                r.iterations
            );
            if !ok {
                return Err(Failure::Failed("layout failed validation".into()));
            }
        }
        Command::Subdivide { input, level, json } => {
            let input = read_input(&input)?.subdivide_times(level);
            write_json(&input.to_json(), json.as_deref())?;
        }
        Command::VerifyDumbbell {
            input,
            weights,
            tol,
            config,
            json,
        } => {
            let Input::Dumbbell(d) = read_input(&input)? else {
                return Err(Failure::Invalid("input is not a dumbbell".into()));
            };
            let d = d.subdivide_times(config.level);
            let rho = match weights {
                Some(p) => io::parse_weights(d.complex(), &fs::read_to_string(p)?)?,
                None => solve_optimal(d.complex(), &config.options()?)?.rho,
            };
            let report = d.check_virtually_bar_uniform(&rho, tol);
            let doc = json!({
                "passed": report.passed(),
                "height": report.height,
                "bar_height": d.bar_height(),
                "middle_tiles": report.qualifying_tiles.len(),
                "max_deviation": report.max_deviation,
                "relative_deviation": report.max_deviation / report.height,
                "violating_tiles": report.violating_tiles,
                "tolerance": tol,
            });
            write_json(&doc, json.as_deref())?;
            eprintln!(
                "{} middle tiles, max deviation {:e} of the height",
                report.qualifying_tiles.len(),
                report.max_deviation / report.height
            );
            if !report.passed() {
                return Err(Failure::Failed(
                    "weights are not uniform on the middle of the bar".into(),
                ));
            }
        }
        Command::Phi { op } => {
            let doc = match op {
                PhiOp::Apply { vector } => io::vector_json(&phi::phi(&read_vector(&vector)?).y),
                PhiOp::Iterate { vector, times } => {
                    io::vector_json(&phi::iterate_phi(&read_vector(&vector)?, times))
                }
                PhiOp::Mu { vector } => {
                    let m = phi::mu(&read_vector(&vector)?);
                    json!({ "mu": m.mu, "per_index": m.per_index })
                }
                PhiOp::Preimage { vector } => {
                    let x = phi::minimal_preimage(&read_vector(&vector)?)
                        .map_err(|e| Failure::Invalid(e.to_string()))?;
                    io::vector_json(&x)
                }
                PhiOp::Extend { vector, columns } => {
                    if columns == 0 {
                        return Err(Failure::Invalid("--columns must be positive".into()));
                    }
                    io::matrix_json(&phi::extend_rectangle(&read_vector(&vector)?, columns))
                }
            };
            write_json(&doc, None)?;
        }
        Command::Generate {
            kind,
            seed,
            count,
            max_tiles,
            json,
        } => {
            if max_tiles == 0 {
                return Err(Failure::Invalid("--max-tiles must be positive".into()));
            }
            let docs: Vec<Value> = match kind {
                Kind::Quadrilateral => corpus::quadrilateral_corpus(seed, count, max_tiles)
                    .into_iter()
                    .map(|c| Input::Complex(c).to_json())
                    .collect(),
                Kind::Dumbbell => corpus::dumbbell_corpus(seed, count, max_tiles)
                    .into_iter()
                    .map(|d| Input::Dumbbell(d).to_json())
                    .collect(),
            };
            write_json(&Value::Array(docs), json.as_deref())?;
        }
        Command::Figures {
            out,
            max_level,
            config,
        } => figures(&out, max_level, &config)?,
    }
    Ok(())
}

fn figures(out: &Path, max_level: u32, config: &RunConfig) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    let shapes: Vec<(&str, Input)> = vec![
        ("diamond", Input::Dumbbell(corpus::diamond_dumbbell())),
        ("ell", Input::Complex(corpus::ell())),
        ("domino", Input::Dumbbell(corpus::domino_dumbbell())),
    ];
    let jobs: Vec<(&str, u32, Input)> = shapes
        .iter()
        .flat_map(|(name, s)| (0..=max_level).map(move |k| (*name, k, s.subdivide_times(k))))
        .collect();
    let results: Vec<Result<String, Failure>> = jobs
        .par_iter()
        .map(|(name, k, input)| {
            let c = input.complex();
            let stem = out.join(format!("{name}-{k}"));
            write_json(&input.to_json(), Some(&stem.with_extension("json")))?;
            let (r, l, ok) = solve_and_place(c, config)?;
            let mut doc = io::result_json(c, &r);
            doc["layout"] = layout::emit_json(&l);
            write_json(&doc, Some(&out.join(format!("{name}-{k}-result.json"))))?;
            layout::emit_svg(&l, &out.join(format!("{name}-{k}.svg")), c.len() <= 400)?;
            let bar = match input {
                Input::Dumbbell(d) => bar_summary(d, &r),
                Input::Complex(_) => String::new(),
            };
            let status = if ok { "" } else { " LAYOUT INVALID" };
            Ok(format!(
                "{name} level {k}: {} tiles, modulus {:.12}{bar}{status}",
                c.len(),
                r.modulus
            ))
        })
        .collect();
    let mut failed = false;
    for r in results {
        match r {
            Ok(line) => {
                failed |= line.ends_with("INVALID");
                eprintln!("{line}");
            }
            Err(Failure::Failed(m)) | Err(Failure::NoConvergence(m)) | Err(Failure::Invalid(m)) => {
                failed = true;
                eprintln!("{m}");
            }
        }
    }
    if failed {
        return Err(Failure::Failed("some figures failed".into()));
    }
    Ok(())
}

/// Largest deviation from uniform on the middle of the bar and on the whole
/// bar, relative to the height.
fn bar_summary(d: &Dumbbell, r: &ModulusResult) -> String {
    let middle = d.check_virtually_bar_uniform(&r.rho, 0.0);
    let whole = d.check_uniform_on(d.bar().tiles().collect(), &r.rho, 0.0);
    format!(
        ", bar deviation {:.1e} (middle) {:.1e} (whole)",
        middle.max_deviation / middle.height,
        whole.max_deviation / whole.height
    )
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn arguments_are_consistent() {
        super::Cli::command().debug_assert();
    }
}
