use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use spherekit_core::decoder::{check_brute_force, Features};
use spherekit_core::report::{emit_svg, rows_from_records, write_csv, GainSummary, Metric};
use spherekit_core::sim::snr_grid;
use spherekit_core::{make_constellation, run_experiment, DecoderKind, ExperimentConfig, Representation};

/// Compare conventional and reduced-complexity sphere decoding over a
/// Rayleigh flat-fading MIMO channel.
#[derive(Debug, Clone, Parser)]
#[command(name = "spherekit", version)]
struct CliArgs {
    /// Transmit and receive antennas.
    #[arg(long, default_value_t = 2)]
    n: usize,

    /// QAM order (4, 16 or 64).
    #[arg(long = "mod", default_value_t = 4)]
    modulation: usize,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    snr_start: f64,

    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    snr_stop: f64,

    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    snr_step: f64,

    /// Channel realizations per SNR point.
    #[arg(long, default_value_t = 100)]
    realizations: usize,

    /// Vector symbols per channel realization.
    #[arg(long, default_value_t = 200)]
    symbols: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Comma list of conventional, proposed, ml.
    #[arg(long, default_value = "conventional,proposed", value_delimiter = ',')]
    decoders: Vec<DecoderKind>,

    /// Proposed-decoder features: comma subset of table,mcache,reuse (or all, none).
    #[arg(long, default_value = "all")]
    features: Features,

    /// Lattice layout searched by the conventional decoder.
    #[arg(long, default_value = "stacked")]
    conventional_representation: Representation,

    /// Multiplier on the initial squared radius 2·N·σ².
    #[arg(long, default_value_t = 1.0)]
    radius_scale: f64,

    #[arg(long, default_value = "results.csv")]
    out_csv: PathBuf,

    /// Write `<prefix>_<metric>.svg` charts.
    #[arg(long)]
    out_svg_prefix: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, env = "SPHEREKIT_THREADS", default_value_t = 0)]
    threads: usize,
}

impl CliArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            n: self.n,
            modulation: self.modulation,
            snr_db: snr_grid(self.snr_start, self.snr_stop, self.snr_step),
            realizations: self.realizations,
            symbols_per_realization: self.symbols,
            seed: self.seed,
            decoders: self.decoders.clone(),
            features: self.features,
            conventional_representation: self.conventional_representation,
            radius_scale: self.radius_scale,
        }
    }
}

fn usage(msg: String) -> clap::Error {
    CliArgs::command().error(ErrorKind::ValueValidation, msg)
}

fn parse_args<I, T>(argv: I) -> Result<CliArgs, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = CliArgs::try_parse_from(argv)?;
    let c = make_constellation(args.modulation)
        .map_err(|e| usage(format!("invalid value for '--mod': {e}")))?;
    if args.n == 0 {
        return Err(usage("'--n' must be at least 1".into()));
    }
    if args.snr_step.is_nan() || args.snr_step <= 0.0 {
        return Err(usage("'--snr-step' must be positive".into()));
    }
    if args.snr_start.is_nan() || args.snr_stop.is_nan() || args.snr_start > args.snr_stop {
        return Err(usage("'--snr-start' must not exceed '--snr-stop'".into()));
    }
    if args.realizations == 0 {
        return Err(usage("'--realizations' must be at least 1".into()));
    }
    if args.symbols == 0 {
        return Err(usage("'--symbols' must be at least 1".into()));
    }
    if args.decoders.is_empty() {
        return Err(usage("'--decoders' must name at least one decoder".into()));
    }
    if !(args.radius_scale > 0.0 && args.radius_scale.is_finite()) {
        return Err(usage("'--radius-scale' must be positive".into()));
    }
    if args.decoders.contains(&DecoderKind::Ml) {
        check_brute_force(args.n, &c).map_err(|e| usage(format!("'--decoders ml': {e}")))?;
    }
    Ok(args)
}

fn svg_path(prefix: &Path, metric: Metric) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!("_{}.svg", metric.column()));
    PathBuf::from(name)
}

fn run(args: &CliArgs) -> anyhow::Result<()> {
    let cfg = args.config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .context("building thread pool")?;
    let records = pool.install(|| run_experiment(&cfg))?;
    let rows = rows_from_records(&records);

    write_csv(&rows, &args.out_csv)
        .with_context(|| format!("writing {}", args.out_csv.display()))?;
    if let Some(prefix) = &args.out_svg_prefix {
        for metric in Metric::ALL {
            let path = svg_path(prefix, metric);
            emit_svg(&rows, metric, &path).with_context(|| format!("writing {}", path.display()))?;
        }
    }

    println!(
        "# {}x{} {}-QAM, {} realizations x {} symbols, seed {}, features {}",
        cfg.n, cfg.n, cfg.modulation, cfg.realizations, cfg.symbols_per_realization, cfg.seed, cfg.features
    );
    println!("# SNR = N·Es/σ² per receive antenna; δ² = {}·2·N·σ²", cfg.radius_scale);
    println!(
        "{:>8} {:>14} {:>12} {:>12} {:>10} {:>9} {:>10}",
        "snr_db", "decoder", "avg_mults", "avg_adds", "visited", "restarts", "ver"
    );
    for rec in &records {
        for t in &rec.tallies {
            println!(
                "{:>8.2} {:>14} {:>12.2} {:>12.2} {:>10.2} {:>9.4} {:>10.3e}",
                rec.snr_db,
                t.kind.name(),
                t.avg_mults(),
                t.avg_adds(),
                t.avg_visited(),
                t.avg_restarts(),
                t.ver()
            );
        }
    }

    let has = |k| cfg.decoders.contains(&k);
    if has(DecoderKind::Conventional) && has(DecoderKind::Proposed) {
        let gains = GainSummary::from_rows(&rows)?;
        println!();
        println!("{:>8} {:>10} {:>10}", "snr_db", "mult_gain", "add_gain");
        let pct = |g: Option<f64>| g.map_or("n/a".to_string(), |g| format!("{:.1}%", 100.0 * g));
        for p in &gains.points {
            println!("{:>8.2} {:>10} {:>10}", p.snr_db, pct(p.mult_gain), pct(p.add_gain));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match parse_args(std::env::args_os()) {
        Ok(a) => a,
        Err(e) => e.exit(),
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
