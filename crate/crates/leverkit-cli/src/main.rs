//! Command-line driver for leverkit.
//!
//! Exit codes: 0 on success, 2 when a run finished but a threshold went
//! unmet or a sweep row failed (partial result), 1 on errors.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use leverkit::bench::{fig1_csv, figure1_sweep, run_bench, Algorithm, BenchConfig};
use leverkit::bounds::{verify_general_bound, verify_topk_bound};
use leverkit::instances::{altschuler_instance, powerlaw_instance, random_lowrank_instance};
use leverkit::io::{
    load_matrix, split_columns, write_matrix_csv, write_matrix_market, write_report, LoadOptions,
    MatrixFormat, RunParams, RunReport, Timings,
};
use leverkit::linalg::{projection_energy, svd, DenseMatrix, IndexSet, DEFAULT_RANK_TOL};
use leverkit::selection::{
    gcss, greedy_gcss, random_baseline, sparse_cca, CcaOptions, GcssOptions, SigmaOmegaMode,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "leverkit", version, about = "Generalized leverage scores: selection, verification, benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Basis matrix A.
    #[arg(long)]
    input: PathBuf,
    /// Target matrix B (defaults to A where meaningful).
    #[arg(long)]
    input_b: Option<PathBuf>,
    /// Input format: csv or matrix-market (mm).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Skip one CSV header row.
    #[arg(long)]
    header: bool,
    /// Subtract each column's mean after loading (CCA preprocessing;
    /// never applied silently).
    #[arg(long)]
    center: bool,
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
}

#[derive(Args, Clone)]
struct OutArg {
    /// Write the report/table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit generalized leverage scores for a singular-vector set R.
    Scores {
        #[command(flatten)]
        input: InputArgs,
        /// Explicit 1-based singular indices, e.g. --r-set 2,4.
        #[arg(long, value_delimiter = ',')]
        r_set: Option<Vec<usize>>,
        /// Prefix size: R = {1..r_size} (the rank-k scores).
        #[arg(long)]
        r_size: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Deterministic leverage-score column selection for a target matrix.
    Gcss {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        /// Explicit R override.
        #[arg(long, value_delimiter = ',')]
        r_set: Option<Vec<usize>>,
        /// Fixed |R| chosen by projection energy (experimental mode).
        #[arg(long)]
        r_size: Option<usize>,
        /// Truncate the selection to its top-k columns.
        #[arg(long)]
        k: Option<usize>,
        /// sigma_omega convention: proof or statement.
        #[arg(long, default_value = "proof")]
        sigma_omega_mode: String,
        /// Omit timing fields from the report.
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Two-sided selection approximating the total canonical correlations.
    Cca {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value = "proof")]
        sigma_omega_mode: String,
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Greedy forward selection baseline.
    Greedy {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Uniform-random baseline over seeded trials.
    Random {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Generate synthetic instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Verify the angle bounds on an explicit instance or a seeded ensemble.
    Verify {
        /// Explicit instance: basis matrix A.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        header: bool,
        /// Selected 1-based columns S.
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<usize>>,
        /// Check the top-k bound for this k.
        #[arg(long)]
        k: Option<usize>,
        /// Check the general bound for this R.
        #[arg(long, value_delimiter = ',')]
        r_set: Option<Vec<usize>>,
        /// Ensemble mode: number of random instances.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
    },
    /// Sweep |R| fractions and k values, comparing GLS, greedy and random.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        /// Column fraction that becomes A when no --input-b is given.
        #[arg(long, default_value_t = 0.5)]
        split: f64,
        #[arg(long, default_value_t = 0.75)]
        retained: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.5])]
        r_fractions: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        k_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "gls,greedy,random")]
        algorithms: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        timing_reps: usize,
        #[arg(long)]
        dry_run: bool,
        /// Output directory for the aggregate CSV and per-cell reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adversarial-instance sweep over theta (CSV output).
    Fig1 {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 0.5, 0.2, 0.1, 0.05, 0.01])]
        thetas: Vec<f64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The adversarial instance on which greedy stalls.
    Altschuler {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long)]
        out_b: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Matrix with power-law rank-k leverage decay.
    Powerlaw {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Random low-rank pair (A, B).
    Lowrank {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long)]
        out_b: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

/// Run outcome: success, or finished-with-unmet-thresholds (exit 2).
enum Outcome {
    Ok,
    Partial,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parse_format(s: &str) -> Result<MatrixFormat> {
    Ok(s.parse::<MatrixFormat>()?)
}

fn parse_mode(s: &str) -> Result<SigmaOmegaMode> {
    match s {
        "proof" => Ok(SigmaOmegaMode::Proof),
        "statement" => Ok(SigmaOmegaMode::Statement),
        other => bail!("sigma-omega-mode must be 'proof' or 'statement', got '{other}'"),
    }
}

fn center_columns(m: DenseMatrix) -> Result<DenseMatrix> {
    let mut inner = m.into_inner();
    for mut col in inner.column_iter_mut() {
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        col.add_scalar_mut(-mean);
    }
    Ok(DenseMatrix::from_dmatrix(inner)?)
}

fn load_one(path: &Path, format: &str, header: bool, center: bool) -> Result<DenseMatrix> {
    let fmt = parse_format(format)?;
    let m = load_matrix(path, fmt, &LoadOptions { has_header: header })
        .with_context(|| format!("loading {}", path.display()))?;
    if center {
        center_columns(m)
    } else {
        Ok(m)
    }
}

struct LoadedPair {
    a: DenseMatrix,
    b: DenseMatrix,
    label: String,
}

fn load_pair(args: &InputArgs) -> Result<LoadedPair> {
    let a = load_one(&args.input, &args.format, args.header, args.center)?;
    let (b, label) = match &args.input_b {
        Some(p) => (
            load_one(p, &args.format, args.header, args.center)?,
            format!("{}+{}", args.input.display(), p.display()),
        ),
        None => (a.clone(), args.input.display().to_string()),
    };
    if a.rows() != b.rows() {
        bail!("A has {} rows but B has {}", a.rows(), b.rows());
    }
    Ok(LoadedPair { a, b, label })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(report: &RunReport, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => Ok(write_report(report, path)?),
        None => {
            print!("{}", report.render());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Scores { input, r_set, r_size, out } => {
            let a = load_one(&input.input, &input.format, input.header, input.center)?;
            let fac = svd(&a, input.rank_tol, None)?;
            let r = match (r_set, r_size) {
                (Some(set), None) => IndexSet::new(set)?,
                (None, Some(k)) => IndexSet::prefix(k)?,
                _ => bail!("give exactly one of --r-set or --r-size"),
            };
            let scores = leverkit::generalized_leverage_scores(&fac, &r)?;
            let mut text = String::from("column,score\n");
            for (i, s) in scores.scores().iter().enumerate() {
                text.push_str(&format!("{},{}\n", i + 1, leverkit::io::fmt_f64(*s)));
            }
            emit(&text, &out.out)?;
            Ok(Outcome::Ok)
        }

        Command::Gcss {
            input,
            epsilon,
            delta,
            r_set,
            r_size,
            k,
            sigma_omega_mode,
            dry_run,
            out,
        } => {
            let pair = load_pair(&input)?;
            let mut opts = GcssOptions::new(epsilon, delta);
            opts.rank_tol = input.rank_tol;
            opts.sigma_omega_mode = parse_mode(&sigma_omega_mode)?;
            opts.r_size_cap = r_size;
            opts.r_override = r_set.map(IndexSet::new).transpose()?;

            let (svd_ms, total_ms, res) = {
                let t = Instant::now();
                let fac_only = svd(&pair.a, input.rank_tol, None)?;
                let svd_ms = t.elapsed().as_secs_f64() * 1e3;
                drop(fac_only);
                let t = Instant::now();
                let res = gcss(&pair.a, &pair.b, &opts)?;
                (svd_ms, t.elapsed().as_secs_f64() * 1e3, res)
            };

            // optional truncation to the top-k selected columns
            let mut selected: Vec<usize> = res.selection.indices().to_vec();
            let mut truncated = false;
            if let Some(k) = k {
                if k == 0 {
                    bail!("--k must be >= 1");
                }
                if k < selected.len() {
                    selected.truncate(k);
                    truncated = true;
                }
            }
            let objective = if truncated {
                let c = pair.a.column_subset(&selected)?;
                projection_energy(&c, &pair.b)?
            } else {
                res.objective
            };
            let denominator = projection_energy(&pair.a, &pair.b)?;

            let mut rep = RunReport::new("gcss", &pair.label);
            rep.params = RunParams {
                epsilon: Some(epsilon),
                delta: Some(delta),
                k,
                r_size: Some(res.r_set.len()),
                rank_tol: Some(input.rank_tol),
                sigma_omega_mode: Some(opts.sigma_omega_mode),
                ..RunParams::default()
            };
            rep.selected = selected;
            rep.objective = objective;
            rep.objective_ratio =
                Some(if denominator > 1e-300 { objective / denominator } else { 0.0 });
            rep.bound = Some(res.bound);
            rep.thresholds_met = Some(res.thresholds_met && !truncated);
            if !dry_run {
                rep.timings = Some(Timings {
                    svd_ms,
                    selection_ms: (total_ms - svd_ms).max(0.0),
                    total_ms,
                });
            }
            emit_report(&rep, &out.out)?;
            if res.thresholds_met && !truncated {
                Ok(Outcome::Ok)
            } else {
                Ok(Outcome::Partial)
            }
        }

        Command::Cca { input, epsilon, delta, sigma_omega_mode, dry_run, out } => {
            if input.input_b.is_none() {
                bail!("cca requires --input-b");
            }
            let pair = load_pair(&input)?;
            let mut opts = CcaOptions::new(epsilon, delta);
            opts.rank_tol = input.rank_tol;
            opts.sigma_omega_mode = parse_mode(&sigma_omega_mode)?;
            let t = Instant::now();
            let res = sparse_cca(&pair.a, &pair.b, &opts)?;
            let total_ms = t.elapsed().as_secs_f64() * 1e3;

            let mut rep = RunReport::new("cca", &pair.label);
            rep.params = RunParams {
                epsilon: Some(epsilon),
                delta: Some(delta),
                rank_tol: Some(input.rank_tol),
                sigma_omega_mode: Some(opts.sigma_omega_mode),
                ..RunParams::default()
            };
            rep.selected = res.s_a.indices().to_vec();
            rep.objective = res.achieved;
            rep.objective_ratio = Some(if res.q > 1e-300 { res.achieved / res.q } else { 0.0 });
            rep.bound = Some(res.bound);
            rep.thresholds_met = Some(res.thresholds_met);
            if !dry_run {
                rep.timings = Some(Timings { svd_ms: 0.0, selection_ms: total_ms, total_ms });
            }
            emit_report(&rep, &out.out)?;
            println!("# columns from B: {:?}", res.s_b.indices());
            if res.thresholds_met {
                Ok(Outcome::Ok)
            } else {
                Ok(Outcome::Partial)
            }
        }

        Command::Greedy { input, k, dry_run, out } => {
            let pair = load_pair(&input)?;
            let t = Instant::now();
            let res = greedy_gcss(&pair.a, &pair.b, k)?;
            let total_ms = t.elapsed().as_secs_f64() * 1e3;
            let denominator = projection_energy(&pair.a, &pair.b)?;

            let mut rep = RunReport::new("greedy", &pair.label);
            rep.params = RunParams { k: Some(k), ..RunParams::default() };
            rep.selected = res.indices.clone();
            rep.objective = res.trace.last().copied().unwrap_or(0.0);
            rep.objective_ratio =
                Some(if denominator > 1e-300 { rep.objective / denominator } else { 0.0 });
            if !dry_run {
                rep.timings = Some(Timings { svd_ms: 0.0, selection_ms: total_ms, total_ms });
            }
            emit_report(&rep, &out.out)?;
            if res.stopped_early {
                Ok(Outcome::Partial)
            } else {
                Ok(Outcome::Ok)
            }
        }

        Command::Random { input, k, trials, seed, dry_run, out } => {
            let pair = load_pair(&input)?;
            let t = Instant::now();
            let res = random_baseline(&pair.a, &pair.b, k, trials, seed)?;
            let total_ms = t.elapsed().as_secs_f64() * 1e3;
            let denominator = projection_energy(&pair.a, &pair.b)?;

            let mut rep = RunReport::new("random", &pair.label);
            rep.params =
                RunParams { k: Some(k), seed: Some(seed), trials: Some(trials), ..RunParams::default() };
            rep.objective = res.mean;
            rep.objective_ratio =
                Some(if denominator > 1e-300 { res.mean / denominator } else { 0.0 });
            if !dry_run {
                rep.timings = Some(Timings { svd_ms: 0.0, selection_ms: total_ms, total_ms });
            }
            emit_report(&rep, &out.out)?;
            Ok(Outcome::Ok)
        }

        Command::Gen(gen) => {
            run_gen(gen)?;
            Ok(Outcome::Ok)
        }

        Command::Verify { input, format, header, s, k, r_set, count, seed, epsilon } => {
            let mut all_ok = true;
            match (input, count) {
                (Some(path), None) => {
                    let a = load_one(&path, &format, header, false)?;
                    let s = s.context("explicit verification requires --s")?;
                    match (k, r_set) {
                        (Some(k), None) => {
                            let rep = verify_topk_bound(&a, &s, k)?;
                            println!("{rep}");
                            all_ok &= rep.satisfied;
                        }
                        (None, Some(r)) => {
                            let checks =
                                verify_general_bound(&a, &s, &IndexSet::new(r)?, epsilon)?;
                            for rep in checks.reports() {
                                println!("{rep}");
                            }
                            all_ok &= checks.all_satisfied();
                        }
                        _ => bail!("give exactly one of --k or --r-set"),
                    }
                }
                (None, Some(count)) => {
                    for i in 0..count {
                        let inst_seed = seed.wrapping_add(i as u64);
                        let pair = random_lowrank_instance(8, 6, 4, 1e-3, inst_seed)?;
                        let fac = svd(&pair.a, DEFAULT_RANK_TOL, None)?;
                        let rho = fac.numerical_rank();
                        let k = 1 + (i % rho);
                        let s = vec![1 + (i % 6), 1 + ((i + 2) % 6)];
                        let rep = verify_topk_bound(&pair.a, &s, k)?;
                        println!("seed={inst_seed} {rep}");
                        all_ok &= rep.satisfied;
                        if rho >= 2 {
                            let r = IndexSet::new(vec![rho / 2, rho])?;
                            let checks = verify_general_bound(&pair.a, &s, &r, epsilon)?;
                            for rep in checks.reports() {
                                println!("seed={inst_seed} {rep}");
                            }
                            all_ok &= checks.all_satisfied();
                        }
                    }
                }
                _ => bail!("give exactly one of --input (explicit) or --count (ensemble)"),
            }
            if all_ok {
                println!("all bounds satisfied");
                Ok(Outcome::Ok)
            } else {
                bail!("one or more bounds violated");
            }
        }

        Command::Bench {
            input,
            split,
            retained,
            r_fractions,
            k_grid,
            algorithms,
            trials,
            seed,
            timing_reps,
            dry_run,
            out,
        } => {
            let (a, b, label) = match &input.input_b {
                Some(_) => {
                    let pair = load_pair(&input)?;
                    (pair.a, pair.b, pair.label)
                }
                None => {
                    let x = load_one(&input.input, &input.format, input.header, false)?;
                    let pair = split_columns(&x, split, input.center)?;
                    (pair.a, pair.b, format!("{}[split={split}]", input.input.display()))
                }
            };
            let algorithms: Vec<Algorithm> = algorithms
                .iter()
                .map(|s| s.parse::<Algorithm>().map_err(Into::into))
                .collect::<Result<_>>()?;
            let cfg = BenchConfig {
                retained_energy: retained,
                r_fractions,
                k_grid,
                algorithms,
                trials,
                seed,
                rank_tol: input.rank_tol,
                timing_reps,
                dry_run,
            };
            let mut reports = run_bench(&a, &b, &cfg)?;
            for r in &mut reports {
                r.instance = label.clone();
            }

            let mut csv = String::from(RunReport::csv_header());
            csv.push('\n');
            for r in &reports {
                csv.push_str(&r.to_csv_row());
                csv.push('\n');
            }
            let failed = reports.iter().filter(|r| r.error.is_some()).count();
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join("bench.csv"), &csv)?;
                    for r in &reports {
                        let frac = r
                            .r_fraction
                            .map(|f| format!("_f{:.3}", f))
                            .unwrap_or_default();
                        let name = format!(
                            "{}{}_k{}.report",
                            r.algorithm,
                            frac,
                            r.params.k.unwrap_or(0)
                        );
                        write_report(r, &dir.join(name))?;
                    }
                    println!("wrote {} rows to {}", reports.len(), dir.display());
                }
                None => print!("{csv}"),
            }
            if failed > 0 {
                eprintln!("{failed} rows failed");
                Ok(Outcome::Partial)
            } else {
                Ok(Outcome::Ok)
            }
        }

        Command::Fig1 { n, thetas, out } => {
            let rows = figure1_sweep(n, &thetas)?;
            emit(&fig1_csv(&rows), &out.out)?;
            Ok(Outcome::Ok)
        }
    }
}

fn write_matrix(path: &Path, m: &DenseMatrix, format: &str) -> Result<()> {
    match parse_format(format)? {
        MatrixFormat::Csv => write_matrix_csv(path, m)?,
        MatrixFormat::MatrixMarket => write_matrix_market(path, m)?,
    }
    Ok(())
}

fn run_gen(gen: GenCommand) -> Result<()> {
    match gen {
        GenCommand::Altschuler { n, theta, out_a, out_b, format } => {
            let inst = altschuler_instance(n, theta)?;
            write_matrix(&out_a, &inst.a, &format)?;
            write_matrix(&out_b, &inst.b, &format)?;
            println!("wrote {} and {} [{}]", out_a.display(), out_b.display(), inst.metadata);
        }
        GenCommand::Powerlaw { m, n, k, eta, seed, out_a, format } => {
            let inst = powerlaw_instance(m, n, k, eta, seed)?;
            write_matrix(&out_a, &inst.matrix, &format)?;
            println!(
                "wrote {} [{}; saturated head = {}]",
                out_a.display(),
                inst.metadata,
                inst.saturated
            );
        }
        GenCommand::Lowrank { m, n, rank, noise, seed, out_a, out_b, format } => {
            let inst = random_lowrank_instance(m, n, rank, noise, seed)?;
            write_matrix(&out_a, &inst.a, &format)?;
            write_matrix(&out_b, &inst.b, &format)?;
            println!("wrote {} and {} [{}]", out_a.display(), out_b.display(), inst.metadata);
        }
    }
    Ok(())
}
