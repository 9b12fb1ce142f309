use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use critstate::harness::compare::{compare, curve_set, CompareMethod};
use critstate::harness::persist::{load_arm, load_run, probe_output, save_experiment};
use critstate::harness::run::{emit_si_grid, grid_to_csv, knack_analysis, run_experiment};
use critstate::harness::ExperimentConfig;
use critstate::stats::{
    fit_curve_model, synthetic_curves, wilcoxon_rank_sum, CurveSet, McmcConfig,
};
use critstate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "critstate",
    version,
    about = "Critical-state exploration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every (policy, seed) pair and write results.
    Train(Box<TrainArgs>),
    /// Compare two arms by steps-to-optimal (wilcoxon) or learning curves (bayes).
    Compare(CompareArgs),
    /// Write the normalised SI grid of one run.
    SiMap(SiMapArgs),
    /// Match ratio of the top-K SI states against the final checkpoint.
    MatchRatio(MatchRatioArgs),
    /// Check the statistics on synthetic data with known answers.
    StatsSelftest(SelftestArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// key=value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    /// Comma-separated: epsilon-greedy, proposed, e-exploitation, default.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    eps_start: Option<String>,
    #[arg(long)]
    eps_end: Option<String>,
    #[arg(long)]
    anneal_steps: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Exploitation ratio of e-exploitation; defaults to k*q.
    #[arg(long)]
    e: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    #[arg(long)]
    seed_count: Option<String>,
    /// Explicit comma-separated seed list.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    total_steps: Option<String>,
    #[arg(long)]
    eval_every: Option<String>,
    #[arg(long)]
    checkpoint_every: Option<String>,
    /// all-states or recent.
    #[arg(long)]
    si_source: Option<String>,
    #[arg(long)]
    buffer_capacity: Option<String>,
    #[arg(long)]
    refresh_every: Option<String>,
    #[arg(long)]
    eval_step_cap: Option<String>,
    #[arg(long)]
    episode_step_cap: Option<String>,
    #[arg(long)]
    stop_at_optimal: Option<String>,
    #[arg(long)]
    top_k: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<String>,
    #[arg(long, short)]
    output: Option<String>,
}

impl TrainArgs {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("env", &self.env),
            ("policy", &self.policy),
            ("eps_start", &self.eps_start),
            ("eps_end", &self.eps_end),
            ("anneal_steps", &self.anneal_steps),
            ("k", &self.k),
            ("q", &self.q),
            ("e", &self.e),
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("base_seed", &self.base_seed),
            ("seed_count", &self.seed_count),
            ("seeds", &self.seeds),
            ("total_steps", &self.total_steps),
            ("eval_every", &self.eval_every),
            ("checkpoint_every", &self.checkpoint_every),
            ("si_source", &self.si_source),
            ("buffer_capacity", &self.buffer_capacity),
            ("refresh_every", &self.refresh_every),
            ("eval_step_cap", &self.eval_step_cap),
            ("episode_step_cap", &self.episode_step_cap),
            ("stop_at_optimal", &self.stop_at_optimal),
            ("top_k", &self.top_k),
            ("workers", &self.workers),
            ("output", &self.output),
        ]
    }
}

#[derive(Args)]
struct McmcArgs {
    #[arg(long, default_value_t = 4)]
    chains: usize,
    #[arg(long, default_value_t = 20_000)]
    iterations: usize,
    #[arg(long, default_value_t = 10_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 5)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    mcmc_seed: u64,
    /// Trailing-mean window applied to the posterior delta curve; 1 disables smoothing.
    #[arg(long, default_value_t = 10)]
    smoothing: usize,
}

impl McmcArgs {
    fn config(&self) -> McmcConfig {
        McmcConfig {
            chains: self.chains,
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: self.mcmc_seed,
            smoothing_window: self.smoothing,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    /// Arm directory (runs/<hash>) or, for bayes, a `step,run_id,return` CSV.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// wilcoxon or bayes.
    #[arg(long, default_value = "wilcoxon")]
    method: String,
    /// Write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-step delta summaries (bayes only).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    mcmc: McmcArgs,
}

#[derive(Args)]
struct SiMapArgs {
    /// Run directory (runs/<hash>/<seed>).
    #[arg(long)]
    run: PathBuf,
    /// Latest snapshot at or before this step; defaults to the final one.
    #[arg(long)]
    step: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchRatioArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn train(args: &TrainArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for (key, value) in args.overrides() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    let root = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"));
    probe_output(&root)?;
    let started = Instant::now();
    let records = run_experiment(&cfg)?;
    let arms = save_experiment(&root, &cfg, &records)?;
    for (kind, dir) in cfg.policies.iter().zip(&arms) {
        let arm: Vec<_> = records
            .iter()
            .filter(|r| r.policy == *kind)
            .cloned()
            .collect();
        let reached: Vec<f64> = arm
            .iter()
            .filter_map(|r| r.steps_to_optimal.map(|s| s as f64))
            .collect();
        let (mean, std) = critstate::stats::mean_std(&reached);
        println!(
            "{:<16} {}/{} reached optimal, steps mean {:.1} std {:.1} -> {}",
            kind.as_str(),
            reached.len(),
            arm.len(),
            mean,
            std,
            dir.display()
        );
    }
    eprintln!("finished in {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn load_curves(path: &Path) -> Result<CurveSet> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        CurveSet::parse_csv(label, &text)
    } else {
        let arm = load_arm(path)?;
        curve_set(arm[0].policy.as_str(), &arm)
    }
}

fn run_compare(args: &CompareArgs) -> Result<()> {
    let method: CompareMethod = args.method.parse()?;
    let mcmc = args.mcmc.config();
    let (json, summary, csv) =
        if method == CompareMethod::Bayes && (args.a.is_file() || args.b.is_file()) {
            let post = fit_curve_model(&load_curves(&args.a)?, &load_curves(&args.b)?, &mcmc)?;
            let summary = format!(
                "significant intervals: {:?}\nacceptance {:.3}, min ESS {:.0}\n",
                post.significant, post.diagnostics.acceptance_rate, post.diagnostics.ess_min
            );
            (
                serde_json::to_string_pretty(&post)?,
                summary,
                Some(post.to_csv()),
            )
        } else {
            let a = load_arm(&args.a)?;
            let b = load_arm(&args.b)?;
            let report = compare(&a, &b, method, &mcmc)?;
            let csv = report.bayes.as_ref().map(|p| p.to_csv());
            (
                serde_json::to_string_pretty(&report)?,
                report.summary.clone(),
                csv,
            )
        };
    print!("{summary}");
    if let Some(p) = &args.json {
        write_or_print(Some(p), &json)?;
    }
    if let (Some(p), Some(csv)) = (&args.csv, csv) {
        write_or_print(Some(p), &csv)?;
    }
    Ok(())
}

fn si_map(args: &SiMapArgs) -> Result<()> {
    let record = load_run(&args.run)?;
    let step = args.step.unwrap_or(u64::MAX);
    let grid = emit_si_grid(&record, step)?;
    write_or_print(args.out.as_deref(), &grid_to_csv(&grid))
}

fn match_ratio(args: &MatchRatioArgs) -> Result<()> {
    let record = load_run(&args.run)?;
    let k = knack_analysis(&record, args.top_k)?;
    let mut csv = String::from("step,distance,match_ratio\n");
    for i in 0..k.steps.len() {
        csv.push_str(&format!(
            "{},{:?},{:?}\n",
            k.steps[i], k.distances[i], k.match_ratio[i]
        ));
    }
    write_or_print(args.out.as_deref(), &csv)?;
    eprintln!(
        "match >= 0.9 at {:?}, return rise at {:?}, match first: {}",
        k.first_match_step, k.first_return_step, k.match_precedes_return
    );
    Ok(())
}

fn selftest(args: &SelftestArgs) -> Result<bool> {
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };

    let w = wilcoxon_rank_sum(&[1.0, 2.0], &[3.0, 4.0])?;
    check(
        "wilcoxon exact",
        (w.p_value - 1.0 / 3.0).abs() < 1e-12,
        format!("p = {}", w.p_value),
    );

    let cfg = McmcConfig {
        seed: args.seed,
        ..McmcConfig::default()
    };
    let (p, b) = synthetic_curves(50, 10, 5.0, 1.0, args.seed)?;
    let post = fit_curve_model(&p, &b, &cfg)?;
    let n = post.steps.len() as f64;
    let excl = (0..post.steps.len())
        .filter(|&t| post.delta_q025[t] > 0.0)
        .count() as f64
        / n;
    let cover = (0..post.steps.len())
        .filter(|&t| post.delta_q025[t] <= 5.0 && 5.0 <= post.delta_q975[t])
        .count() as f64
        / n;
    check(
        "bayes offset 5",
        excl >= 0.8 && cover >= 0.9,
        format!("excludes 0 on {excl:.2}, covers 5 on {cover:.2}"),
    );

    let (p, b) = synthetic_curves(50, 10, 0.0, 1.0, args.seed + 1)?;
    let post = fit_curve_model(&p, &b, &cfg)?;
    let zero = (0..post.steps.len())
        .filter(|&t| post.delta_q025[t] <= 0.0 && 0.0 <= post.delta_q975[t])
        .count() as f64
        / n;
    check(
        "bayes null",
        zero >= 0.9,
        format!("contains 0 on {zero:.2}"),
    );
    Ok(ok)
}

fn exit_code(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) | Error::Schedule(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => train(a),
        Command::Compare(a) => run_compare(a),
        Command::SiMap(a) => si_map(a),
        Command::MatchRatio(a) => match_ratio(a),
        Command::StatsSelftest(a) => match selftest(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(3),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
