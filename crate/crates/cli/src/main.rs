use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use qdiv_core::experiment::DEFAULT_PAIR_BUDGET;
use qdiv_core::oracle::DEFAULT_BUDGET;
use qdiv_core::{
    build_maximizer, count_ordered, count_unordered, emit_tables, hellinger_squared,
    make_comparable, run_pairwise_experiment, run_rank_comparison, run_uniform_study,
    verify_maximizer_sweep, EnumerationSpec, Error, Measure, QuantumDistribution, SelfComparison,
};

/// Quantum distributions, their KL maximizer and the normalized divergence.
#[derive(Parser)]
#[command(name = "qdiv", version)]
struct Cli {
    /// Worker threads (defaults to all cores). Never changes output bytes.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count unordered and ordered distributions of M dots over n cells.
    Count {
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        dots: u64,
    },
    /// Compare two distributions given as comma-separated multiplicities.
    Compare {
        #[arg(long)]
        p: QuantumDistribution,
        #[arg(long)]
        q: QuantumDistribution,
        #[arg(long, value_enum, default_value_t = MeasureArg::All)]
        measure: MeasureArg,
        /// Bring P and Q to a common quantum first.
        #[arg(long)]
        rescale: bool,
    },
    /// Build the distribution that maximizes KL(P || .) for the same dots.
    Maximize {
        #[arg(long)]
        p: QuantumDistribution,
    },
    /// Check the constructed maximizer against brute force for every P.
    Verify {
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        dots: u64,
        /// Cap on the number of candidate Q per P.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// All measures for every pair of unordered distributions.
    Pairwise {
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        dots: u64,
        #[arg(long)]
        out: PathBuf,
        /// Cap on the number of pairs.
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        budget: u128,
    },
    /// Every ordered distribution against the uniform one.
    UniformStudy {
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        dots: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maxima and mean/max ratios over a grid of uniform studies.
    Tables {
        /// Inclusive range `a..b` or a comma list.
        #[arg(long, default_value = "6..10")]
        cells: String,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        multipliers: Vec<u64>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Leave the uniform distribution's self-comparison out of the means.
        #[arg(long)]
        exclude_self: bool,
    },
    /// Per-measure rankings of a uniform study and their Spearman matrix.
    Rank {
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        dots: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    All,
    Kl,
    Kn,
    Jsd,
    Hellinger,
    Jaccard,
}

impl MeasureArg {
    fn measures(self) -> Vec<Measure> {
        match self {
            MeasureArg::All => vec![
                Measure::Kl,
                Measure::Kn,
                Measure::Jsd,
                Measure::Hellinger,
                Measure::JaccardDistance,
            ],
            MeasureArg::Kl => vec![Measure::Kl],
            MeasureArg::Kn => vec![Measure::Kn],
            MeasureArg::Jsd => vec![Measure::Jsd],
            MeasureArg::Hellinger => vec![Measure::Hellinger],
            MeasureArg::Jaccard => vec![Measure::JaccardDistance],
        }
    }
}

fn parse_cells(s: &str) -> anyhow::Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .with_context(|| format!("bad range start in {s:?}"))?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("bad range end in {s:?}"))?;
        if a > b {
            bail!("empty range {s:?}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .with_context(|| format!("bad cell count {t:?}"))
        })
        .collect()
}

/// `dir/name.csv` -> `dir/name.<suffix>.csv`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}{ext}"))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_with<F>(path: &Path, f: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut w = create(path)?;
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Count { cells, dots } => {
            writeln!(out, "unordered={}", count_unordered(dots, cells)?)?;
            writeln!(out, "ordered={}", count_ordered(dots, cells)?)?;
        }
        Command::Compare {
            p,
            q,
            measure,
            rescale,
        } => {
            let (p, q) = if rescale {
                make_comparable(&p, &q)?
            } else {
                (p, q)
            };
            for m in measure.measures() {
                writeln!(out, "{m}={:.6}", m.eval(&p, &q)?)?;
            }
            if matches!(measure, MeasureArg::All) {
                writeln!(out, "hellinger_squared={:.6}", hellinger_squared(&p, &q)?)?;
            }
        }
        Command::Maximize { p } => {
            let r = build_maximizer(&p);
            writeln!(out, "maximizer={}", r.maximizer)?;
            writeln!(out, "cell={}", r.argmin_cell + 1)?;
            writeln!(out, "kl_max={:.6}", r.max_divergence)?;
        }
        Command::Verify {
            cells,
            dots,
            budget,
        } => {
            let report = verify_maximizer_sweep(EnumerationSpec::new(dots, cells)?, budget)?;
            for v in &report.violations {
                eprintln!(
                    "violation: P={} Q={} kl(P,U)={:.12} kl(P,Q)={:.12}",
                    v.p, v.q, v.kl_via_maximizer, v.kl_via_q
                );
            }
            writeln!(out, "checked={}", report.checked)?;
            writeln!(out, "violations={}", report.violations.len())?;
            writeln!(out, "max_gap={:.6e}", report.max_gap)?;
        }
        Command::Pairwise {
            cells,
            dots,
            out: path,
            budget,
        } => {
            let exp = run_pairwise_experiment(dots, cells, budget)?;
            let summary = exp.summary()?;
            write_with(&path, |w| exp.write_csv(w))?;
            write_with(&sibling(&path, "index"), |w| exp.write_index_csv(w))?;
            write_with(&sibling(&path, "summary"), |w| summary.write_csv(w))?;
            writeln!(out, "pairs={}", exp.len())?;
            for (a, b, r) in &summary.correlations {
                writeln!(out, "pearson({a},{b})={r:.6}")?;
            }
        }
        Command::UniformStudy {
            cells,
            dots,
            out: path,
        } => {
            let study = run_uniform_study(dots, cells)?;
            write_with(&path, |w| study.write_csv(w))?;
            writeln!(out, "rows={}", study.rows.len())?;
        }
        Command::Tables {
            cells,
            multipliers,
            out_dir,
            exclude_self,
        } => {
            let cells = parse_cells(&cells).map_err(|e| Error::Precondition(e.to_string()))?;
            let conv = if exclude_self {
                SelfComparison::Exclude
            } else {
                SelfComparison::Include
            };
            let tables = emit_tables(&cells, &multipliers, conv)?;
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("cannot create {}", out_dir.display()))?;
            write_with(&out_dir.join("table_max.csv"), |w| {
                tables.write_maxima_csv(w)
            })?;
            write_with(&out_dir.join("table_mean_over_max.csv"), |w| {
                tables.write_ratios_csv(w)
            })?;
            write_with(&out_dir.join("records.csv"), |w| {
                tables.write_records_csv(w)
            })?;
            writeln!(out, "experiments={}", tables.grid.len())?;
        }
        Command::Rank {
            cells,
            dots,
            out: path,
        } => {
            let ranks = run_rank_comparison(dots, cells)?;
            write_with(&path, |w| ranks.write_ranks_csv(w))?;
            write_with(&sibling(&path, "spearman"), |w| ranks.write_spearman_csv(w))?;
            writeln!(out, "rows={}", ranks.study.rows.len())?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_budget() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
