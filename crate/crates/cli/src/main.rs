//! `drum`: Dirichlet eigenfrequencies and eigenmodes of planar domains.
//!
//! Exit codes: 0 success, 1 malformed shape or arguments, 2 no convergence or
//! not an eigenfrequency, 3 Weyl-audit warning (results are still written).

mod plot;
mod shape;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use drum_core::geometry::{Boundary, DiscreteBoundary};
use drum_core::modes::{boundary_density, evaluate_mode};
use drum_core::operator::Representation;
use drum_core::rootfind::BoydOptions;
use drum_core::solver::{convergence_study, solve_interval, sweep_sigma_min, Eta, NRule, SolveOptions};
use drum_core::Error as CoreError;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "drum", version, about = "Dirichlet Laplacian eigenfrequencies of smooth planar domains")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Grid,
    Png,
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Coupling: "kappa", "0" (double layer only) or a fixed value.
    #[arg(long, default_value = "kappa")]
    eta: Eta,
    /// Node rule "max(A,B+C*kappa)" or a fixed count; "auto" picks by shape.
    #[arg(long, default_value = "auto")]
    n_rule: String,
    /// Largest accepted |Im| of a root; "auto" picks by shape.
    #[arg(long, default_value = "auto")]
    beta: String,
    /// Roots closer than this are refined by SVD.
    #[arg(long, default_value_t = 1e-3)]
    close_root_s: f64,
    /// σ_min threshold for SVD roots.
    #[arg(long, default_value_t = 1e-6)]
    svd_tol: f64,
    /// Skip the a posteriori error estimates.
    #[arg(long)]
    no_estimates: bool,
}

impl SolverArgs {
    fn options(&self, boundary: &Boundary) -> Result<SolveOptions, Failure> {
        let mut o = SolveOptions::for_boundary(boundary);
        o.eta = self.eta;
        if self.n_rule != "auto" {
            o.n_rule = self.n_rule.parse().map_err(|e: CoreError| Failure::Usage(e.to_string()))?;
        }
        if self.beta != "auto" {
            o.boyd.beta_max = self
                .beta
                .parse()
                .ok()
                .filter(|b: &f64| *b > 0.0)
                .ok_or_else(|| Failure::Usage(format!("bad --beta {:?}", self.beta)))?;
        }
        o.close_root_s = self.close_root_s;
        o.svd_tol = self.svd_tol;
        o.estimate_errors = !self.no_estimates;
        Ok(o)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenfrequencies in an interval, as JSON (or CSV).
    Solve {
        #[arg(long)]
        shape: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        interval: Vec<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest singular value of the double-layer and combined matrices on a κ grid.
    Sweep {
        #[arg(long)]
        shape: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        interval: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value = "auto")]
        n_rule: String,
        /// Representations to sample.
        #[arg(long, value_delimiter = ',', default_value = "dlp,cfie")]
        repr: Vec<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a plot of log10 σ_min here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// |f_N(κ)| and the nearest root for a list of node counts.
    Converge {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        kappa: f64,
        /// Even node counts, ascending.
        #[arg(long, value_delimiter = ',', default_value = "80,100,120,140,160,180,200,220,240")]
        ns: Vec<usize>,
        #[arg(long, default_value = "0")]
        eta: Eta,
        /// Half-width of the root search interval around κ.
        #[arg(long, default_value_t = 0.05)]
        bracket: f64,
        #[arg(long, default_value_t = 1e-14)]
        beta: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenmodes on a grid: one file per mode plus an optional montage.
    Modes {
        #[arg(long)]
        shape: String,
        /// Compute the eigenfrequencies in this interval first.
        #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "kappa")]
        interval: Option<Vec<f64>>,
        /// Eigenfrequencies to reconstruct.
        #[arg(long, value_delimiter = ',', required_unless_present = "interval")]
        kappa: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["NX", "NY"], default_values_t = [200, 200])]
        grid: Vec<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "grid")]
        format: Format,
        /// Output directory.
        #[arg(long, default_value = "modes")]
        out: PathBuf,
        /// Also write montage.png with this many tiles per row.
        #[arg(long)]
        montage: Option<usize>,
    },
    /// Available shape types and presets.
    Shapes {
        #[arg(long)]
        json: bool,
    },
    /// Checks that the command-line defaults match the library defaults.
    Selftest,
}

#[derive(Debug)]
pub enum Failure {
    Shape(String),
    Usage(String),
    NoConvergence(String),
    Weyl,
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Shape(_) | Failure::Usage(_) | Failure::Other(_) => 1,
            Failure::NoConvergence(_) => 2,
            Failure::Weyl => 3,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidShape(m) => Failure::Shape(m),
            e @ (CoreError::NoConvergence { .. } | CoreError::NotAnEigenfrequency { .. }) => {
                Failure::NoConvergence(e.to_string())
            }
            e @ (CoreError::Contract(_) | CoreError::Domain { .. }) => Failure::Usage(e.to_string()),
            e => Failure::Other(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Weyl) => {
            eprintln!("warning: root count disagrees with the Weyl estimate");
            ExitCode::from(3)
        }
        Err(f) => {
            match &f {
                Failure::Shape(m) => eprintln!("error: malformed shape: {m}"),
                Failure::Usage(m) | Failure::NoConvergence(m) => eprintln!("error: {m}"),
                Failure::Other(e) => eprintln!("error: {e:#}"),
                Failure::Weyl => unreachable!(),
            }
            ExitCode::from(f.code())
        }
    }
}

fn interval(v: &[f64]) -> Result<(f64, f64), Failure> {
    match v {
        [a, b] if *a > 0.0 && a < b && b.is_finite() => Ok((*a, *b)),
        _ => Err(Failure::Usage(format!("need 0 < a < b, got {v:?}"))),
    }
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn unsupported(cmd: &str, f: Format) -> Failure {
    let name = f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    Failure::Usage(format!("{cmd} does not write {name} output"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve {
            shape,
            interval: iv,
            solver,
            format,
            out,
        } => {
            let (_, boundary) = shape::load(&shape)?;
            let (a, b) = interval(&iv)?;
            let opts = solver.options(&boundary)?;
            let sol = solve_interval(&boundary, a, b, &opts)?;
            let body = match format {
                Format::Json => sol.to_json() + "\n",
                Format::Csv => {
                    let mut s = String::from("kappa,beta,method,N,err_est,spurious,sigma_min\n");
                    for e in &sol.eigenfrequencies {
                        s.push_str(&format!(
                            "{:.16},{:e},{},{},{},{},{}\n",
                            e.kappa,
                            e.beta,
                            e.method.as_str(),
                            e.n_used,
                            fmt_opt(e.err_est),
                            e.spurious,
                            fmt_opt(e.sigma_min)
                        ));
                    }
                    s
                }
                f => return Err(unsupported("solve", f)),
            };
            emit(out.as_deref(), &body)?;
            if sol.weyl_warning() {
                return Err(Failure::Weyl);
            }
            Ok(())
        }
        Command::Sweep {
            shape,
            interval: iv,
            samples,
            n_rule,
            repr,
            format,
            out,
            plot,
        } => {
            let (_, boundary) = shape::load(&shape)?;
            let (a, b) = interval(&iv)?;
            let rule = if n_rule == "auto" {
                SolveOptions::for_boundary(&boundary).n_rule
            } else {
                n_rule.parse().map_err(|e: CoreError| Failure::Usage(e.to_string()))?
            };
            let reps: Vec<Representation> = repr
                .iter()
                .map(|r| match r.as_str() {
                    "dlp" => Ok(Representation::Dlp),
                    "cfie" => Ok(Representation::Cfie),
                    other => Err(Failure::Usage(format!("unknown representation {other:?}"))),
                })
                .collect::<Result<_, _>>()?;
            let mut columns: Vec<(Representation, Vec<f64>)> = Vec::new();
            let mut kappa = Vec::new();
            for rep in reps {
                let rows = sweep_sigma_min(&boundary, a, b, samples, rep, &rule)?;
                kappa = rows.iter().map(|r| r.0).collect();
                columns.push((rep, rows.into_iter().map(|r| r.1).collect()));
            }
            let get = |rep: Representation, i: usize| {
                columns
                    .iter()
                    .find(|c| c.0 == rep)
                    .map(|c| format!("{:e}", c.1[i]))
                    .unwrap_or_default()
            };
            match format {
                Format::Csv => {
                    let mut s = String::from("kappa,sigma_min_dlp,sigma_min_cfie\n");
                    for (i, k) in kappa.iter().enumerate() {
                        s.push_str(&format!(
                            "{k:.12},{},{}\n",
                            get(Representation::Dlp, i),
                            get(Representation::Cfie, i)
                        ));
                    }
                    emit(out.as_deref(), &s)?;
                }
                Format::Png => {
                    let p = out.ok_or_else(|| Failure::Usage("--format png needs --out".into()))?;
                    let series: Vec<Vec<f64>> = columns.iter().map(|c| c.1.clone()).collect();
                    plot::sweep_plot(&kappa, &series).save(&p).context("writing plot")?;
                }
                f => return Err(unsupported("sweep", f)),
            }
            if let Some(p) = plot {
                let series: Vec<Vec<f64>> = columns.iter().map(|c| c.1.clone()).collect();
                plot::sweep_plot(&kappa, &series).save(&p).context("writing plot")?;
            }
            Ok(())
        }
        Command::Converge {
            shape,
            kappa,
            ns,
            eta,
            bracket,
            beta,
            format,
            out,
        } => {
            let (_, boundary) = shape::load(&shape)?;
            if ns.windows(2).any(|w| w[1] <= w[0]) || ns.iter().any(|n| n % 2 != 0) {
                return Err(Failure::Usage("--ns must be even and ascending".into()));
            }
            let boyd = BoydOptions {
                beta_max: beta,
                ..BoydOptions::default()
            };
            let rows = convergence_study(&boundary, kappa, &ns, eta, bracket, &boyd)?;
            let body = match format {
                Format::Csv => {
                    let mut s = String::from("N,det_abs,root\n");
                    for r in &rows {
                        let root = r.root.map(|x| format!("{x:.16}")).unwrap_or_default();
                        s.push_str(&format!("{},{:e},{root}\n", r.n, r.det_abs));
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&rows).context("serializing")? + "\n",
                f => return Err(unsupported("converge", f)),
            };
            emit(out.as_deref(), &body)
        }
        Command::Modes {
            shape,
            interval: iv,
            kappa,
            grid,
            solver,
            format,
            out,
            montage,
        } => {
            let (_, boundary) = shape::load(&shape)?;
            let opts = solver.options(&boundary)?;
            let mut weyl = false;
            let mut kappas = match iv {
                Some(iv) => {
                    let (a, b) = interval(&iv)?;
                    let mut o = opts.clone();
                    o.estimate_errors = false;
                    let sol = solve_interval(&boundary, a, b, &o)?;
                    weyl = sol.weyl_warning();
                    sol.kappas()
                }
                None => kappa,
            };
            // a double root yields one mode here
            kappas.dedup();
            let (nx, ny) = (grid[0], grid[1]);
            if nx == 0 || ny == 0 {
                return Err(Failure::Usage("--grid needs positive sizes".into()));
            }
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let bbox = padded_bbox(&boundary);
            let mut grids = Vec::new();
            let mut index = Vec::new();
            for (i, &k) in kappas.iter().enumerate() {
                let disc = DiscreteBoundary::with_total(&boundary, opts.n_rule.at(k))?;
                let d = boundary_density(&disc, k)?;
                let g = evaluate_mode(&disc, &d.values, k, bbox, nx, ny)?;
                let name = match format {
                    Format::Grid => format!("mode_{:03}.grid", i + 1),
                    Format::Csv => format!("mode_{:03}.csv", i + 1),
                    Format::Png => format!("mode_{:03}.png", i + 1),
                    f => return Err(unsupported("modes", f)),
                };
                let path = out.join(&name);
                match format {
                    Format::Grid => g.write_binary(io::BufWriter::new(fs::File::create(&path)?))?,
                    Format::Csv => g.write_csv(io::BufWriter::new(fs::File::create(&path)?))?,
                    _ => plot::mode_image(&g).save(&path).context("writing png")?,
                }
                index.push(ModeEntry {
                    kappa: k,
                    file: name,
                    sigma_min: d.sigma,
                    norm_constant: g.norm_constant,
                    grid_norm: g.grid_norm,
                });
                grids.push(g);
            }
            if let Some(cols) = montage.filter(|_| !grids.is_empty()) {
                plot::montage(&grids, cols).save(out.join("montage.png")).context("writing montage")?;
            }
            let body = serde_json::to_string_pretty(&index).context("serializing")? + "\n";
            fs::write(out.join("modes.json"), body)?;
            if weyl {
                return Err(Failure::Weyl);
            }
            Ok(())
        }
        Command::Shapes { json } => {
            if json {
                let body = serde_json::to_string_pretty(&shape::presets()).context("serializing")? + "\n";
                emit(None, &body)
            } else {
                emit(None, &shape::listing_text())
            }
        }
        Command::Selftest => selftest(),
    }
}

#[derive(Serialize)]
struct ModeEntry {
    kappa: f64,
    file: String,
    sigma_min: f64,
    norm_constant: f64,
    grid_norm: f64,
}

fn padded_bbox(boundary: &Boundary) -> [f64; 4] {
    let b = boundary.bbox();
    let pad = 0.02 * (b[1] - b[0]).max(b[3] - b[2]);
    [b[0] - pad, b[1] + pad, b[2] - pad, b[3] + pad]
}

fn default_of(sub: &str, arg: &str) -> String {
    let cmd = Cli::command();
    let s = cmd.find_subcommand(sub).unwrap_or_else(|| panic!("no subcommand {sub}"));
    let a = s
        .get_arguments()
        .find(|a| a.get_id() == arg)
        .unwrap_or_else(|| panic!("no argument {sub} --{arg}"));
    a.get_default_values()
        .iter()
        .map(|v| v.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ")
}

fn selftest() -> Result<(), Failure> {
    let lib = SolveOptions::default();
    let mut failures = Vec::new();
    let mut check = |what: &str, ok: bool| {
        println!("{}: {what}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failures.push(what.to_string());
        }
    };
    let f = |s: String| s.parse::<f64>().unwrap_or(f64::NAN);
    for sub in ["solve", "modes"] {
        check(
            &format!("{sub} --eta default is kappa"),
            default_of(sub, "eta").parse::<Eta>().ok() == Some(lib.eta),
        );
        check(
            &format!("{sub} --close-root-s default {}", lib.close_root_s),
            f(default_of(sub, "close_root_s")) == lib.close_root_s,
        );
        check(
            &format!("{sub} --svd-tol default {}", lib.svd_tol),
            f(default_of(sub, "svd_tol")) == lib.svd_tol,
        );
        check(&format!("{sub} --n-rule default auto"), default_of(sub, "n_rule") == "auto");
        check(&format!("{sub} --beta default auto"), default_of(sub, "beta") == "auto");
    }
    check(
        &format!("generic N rule {}", NRule::generic()),
        lib.n_rule == NRule::generic() && NRule::generic().to_string().parse::<NRule>().ok() == Some(lib.n_rule),
    );
    check(&format!("generic beta {}", lib.boyd.beta_max), lib.boyd.beta_max == 1e-14);
    let crescent = shape::load("crescent")?.1;
    let co = SolveOptions::for_boundary(&crescent);
    check(
        &format!("crescent N rule {} and beta {}", co.n_rule, co.boyd.beta_max),
        co.n_rule == NRule::crescent() && co.boyd.beta_max == 1e-12,
    );
    check(
        "converge --beta default 1e-14",
        f(default_of("converge", "beta")) == 1e-14,
    );
    check("converge --eta default 0", default_of("converge", "eta").parse::<Eta>().ok() == Some(Eta::Zero));
    check("sweep --n-rule default auto", default_of("sweep", "n_rule") == "auto");
    // end-to-end on the unit disk
    let disk = shape::load("disk")?.1;
    let mut o = lib.clone();
    o.estimate_errors = false;
    let sol = solve_interval(&disk, 2.0, 3.0, &o)?;
    check(
        "unit disk first eigenfrequency 2.404825557695773",
        sol.kappas().len() == 1 && (sol.kappas()[0] - 2.404825557695773).abs() <= 1e-10,
    );
    if failures.is_empty() {
        println!("selftest passed");
        Ok(())
    } else {
        Err(Failure::Other(anyhow::anyhow!("selftest failed: {}", failures.join("; "))))
    }
}
