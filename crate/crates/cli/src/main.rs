mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lgptp::data::{load_csv, save_csv, Preset};
use lgptp::evolution::{Mode, ProgressSink, Silent};
use lgptp::experiment::{mean_std, run_repeat, RunReport};
use lgptp::export::{to_dot, FrequencyTable};
use lgptp::Program;

use crate::config::{ConfigFile, Overrides};

const INCOMPLETE: &str = "INCOMPLETE";

#[derive(Parser)]
#[command(
    name = "lgptp",
    version,
    about = "Linear genetic programming with tunable primitives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated grouped cross-validation on a CSV dataset.
    Train(TrainArgs),
    /// Graphviz DAG of a saved model.
    ExportDag {
        /// Model file in the program text format.
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Terminal range frequency table over every fold model of a run.
    ReportFrequency {
        run_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Applies a treatment preset and writes the transformed CSV.
    Preprocess {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        preset: Preset,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    preset: Option<Preset>,
    /// Suppress per-fold progress on stderr.
    #[arg(long)]
    quiet: bool,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_or_print(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn summary_tsv(reports: &[RunReport]) -> String {
    let mut s = String::from("repeat\tfolds\ttest_r2_mean\ttest_r2_std\n");
    let mut all = Vec::new();
    for r in reports {
        s.push_str(&format!(
            "{}\t{}\t{:?}\t{:?}\n",
            r.repeat,
            r.folds.len(),
            r.test_r2_mean,
            r.test_r2_std
        ));
        all.extend(r.folds.iter().map(|f| f.test_r2));
    }
    let (m, sd) = mean_std(&all);
    s.push_str(&format!("all\t{}\t{m:?}\t{sd:?}\n", all.len()));
    s
}

fn train(args: &TrainArgs) -> Result<()> {
    let overrides = Overrides {
        mode: args.mode,
        seed: args.seed,
        preset: args.preset,
    };
    let config = config::load(args.config.as_deref(), &overrides)?;
    let raw = load_csv(&args.data)?;
    let data = raw.treated(&config.preset.treatments())?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let marker = args.out.join(INCOMPLETE);
    write_file(&marker, "run in progress or failed\n")?;
    write_file(
        &args.out.join("resolved_config.toml"),
        &ConfigFile::from_experiment(&config).to_toml()?,
    )?;

    let mut reports = Vec::with_capacity(config.repeats);
    let mut frequency = FrequencyTable::new(data.features());
    let mut timing = String::from("repeat\tseconds\n");
    for repeat in 0..config.repeats {
        let start = Instant::now();
        let report = run_repeat(&data, &config, repeat, args.workers, |_| {
            Box::new(Silent) as Box<dyn ProgressSink>
        })?;
        timing.push_str(&format!("{repeat}\t{:.3}\n", start.elapsed().as_secs_f64()));

        let dir = args.out.join(format!("repeat_{repeat:02}"));
        fs::create_dir_all(&dir)?;
        for fold in &report.folds {
            write_file(&dir.join(format!("fold_{}.model", fold.fold)), &fold.model)?;
            write_file(&dir.join(format!("fold_{}.dot", fold.fold)), &fold.dag)?;
            if !args.quiet {
                eprintln!(
                    "repeat {repeat} fold {}: train R2 {:.4}, test R2 {:.4}, effective size {}",
                    fold.fold, fold.train_r2, fold.test_r2, fold.effective_size
                );
            }
        }
        write_file(
            &dir.join("report.json"),
            &serde_json::to_string_pretty(&report)?,
        )?;
        frequency.merge(&report.frequency);
        reports.push(report);
    }

    let summary = summary_tsv(&reports);
    write_file(&args.out.join("summary.tsv"), &summary)?;
    write_file(&args.out.join("frequency.tsv"), &frequency.to_tsv())?;
    write_file(&args.out.join("timing.tsv"), &timing)?;
    fs::remove_file(&marker)?;
    if !args.quiet {
        eprint!("{summary}");
    }
    Ok(())
}

fn export_dag(model: &Path, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let program: Program = text
        .parse()
        .with_context(|| format!("parsing {}", model.display()))?;
    write_or_print(out, &to_dot(&program))
}

/// Frequency table recomputed from the fold models of every report in
/// `run_dir`.
fn report_frequency(run_dir: &Path, out: Option<&Path>) -> Result<()> {
    let mut reports: Vec<PathBuf> = fs::read_dir(run_dir)
        .with_context(|| format!("reading {}", run_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path().join("report.json")))
        .filter(|p| p.is_file())
        .collect();
    reports.sort();
    if reports.is_empty() {
        bail!("no run reports under {}", run_dir.display());
    }
    let mut table: Option<FrequencyTable> = None;
    for path in &reports {
        let text = fs::read_to_string(path)?;
        let report: RunReport =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let t = table.get_or_insert_with(|| FrequencyTable::new(report.features));
        if t.features != report.features {
            bail!(
                "{} has {} features, expected {}",
                path.display(),
                report.features,
                t.features
            );
        }
        for fold in &report.folds {
            let program: Program = fold
                .model
                .parse()
                .with_context(|| format!("{} fold {}", path.display(), fold.fold))?;
            t.add(&program);
        }
    }
    write_or_print(out, &table.expect("at least one report").to_tsv())
}

fn preprocess(data: &Path, preset: Preset, out: &Path) -> Result<()> {
    let d = load_csv(data)?.treated(&preset.treatments())?;
    save_csv(&d, out)?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Train(args) => train(args),
        Command::ExportDag { model, out } => export_dag(model, out.as_deref()),
        Command::ReportFrequency { run_dir, out } => report_frequency(run_dir, out.as_deref()),
        Command::Preprocess { data, preset, out } => preprocess(data, *preset, out),
    }
}
