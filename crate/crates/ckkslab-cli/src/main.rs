use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ckkslab::apps::{run_demo, Dataset, DemoConfig};
use ckkslab::ckks::CkksParams;
use ckkslab::cost::search::{param_search, SearchSpace};
use ckkslab::cost::OptimizationSet;
use ckkslab::dram::{compare_mappings, DramSetup, Pattern};
use ckkslab::fixtures::{Presets, Targets};
use ckkslab::report::{
    cost_deviations, cost_tables, optimized_rows, sweep, throughput_table, to_csv, to_json, SweepStep,
};
use ckkslab::selftest::{self, CRITERIA};
use clap::{Parser, Subcommand, ValueEnum};
use plotters::prelude::*;
use serde::Serialize;

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ckkslab", version, about = "CKKS cost tables, parameter search, DRAM mapping and encrypted training")]
struct Cli {
    /// Preset name; defaults depend on the subcommand.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 21)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cost tables under a cost preset, with deviations from the published values.
    Tables,
    /// Bootstrap cost as optimizations are enabled one at a time; also writes an SVG chart.
    Sweep,
    /// Exhaustive bootstrapping parameter search.
    Search {
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Disable every optimization.
        #[arg(long)]
        baseline: bool,
    },
    /// DRAM address-mapping comparison.
    Dram {
        /// TOML setup; the shipped DDR4 configuration by default.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Encrypted logistic regression with bootstrapping on a functional preset.
    LrDemo {
        /// CSV with a "label" (or "y") column; synthetic blobs otherwise.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        iterations: usize,
        #[arg(long, default_value_t = 1.0)]
        lr: f64,
    },
    /// Runs the numbered reproduction checks.
    Selftest {
        /// Criterion numbers to run; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

struct Ctx {
    out: PathBuf,
    format: Format,
}

impl Ctx {
    fn write<T: Serialize>(&self, stem: &str, rows: &[T]) -> Result<PathBuf> {
        let path = self.out.join(format!("{stem}.{}", self.format.ext()));
        let text = match self.format {
            Format::Csv => to_csv(rows)?,
            Format::Json => to_json(rows)? + "\n",
        };
        fs::write(&path, text)?;
        Ok(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Ok(false) means a gate failed.
fn run(cli: Cli) -> Result<bool> {
    fs::create_dir_all(&cli.out)?;
    let ctx = Ctx { out: cli.out.clone(), format: cli.format };
    let preset = cli.preset.as_deref();
    match cli.command {
        Command::Tables => tables(&ctx, preset.unwrap_or("baseline")),
        Command::Sweep => sweep_cmd(&ctx, preset.unwrap_or("best-case")),
        Command::Search { top, baseline } => search(&ctx, top, baseline),
        Command::Dram { config } => dram(&ctx, config.as_deref()),
        Command::LrDemo { data, iterations, lr } => {
            lr_demo(&ctx, preset.unwrap_or("toy-boot"), data.as_deref(), iterations, lr, cli.seed)
        }
        Command::Selftest { only } => Ok(selftest_cmd(&ctx, &only)?),
    }
}

fn tables(ctx: &Ctx, name: &str) -> Result<bool> {
    let presets = Presets::load()?;
    let targets = Targets::load()?;
    let preset = presets.cost(name)?;
    let rows = cost_tables(preset, &targets)?;
    for r in &rows {
        println!("{:14} {:14} {:>10.4} GOP {:>10.4} GB  AI {:.3}", r.table, r.name, r.gop, r.gb, r.ai);
    }
    println!("wrote {}", ctx.write("tables", &rows)?.display());
    println!("wrote {}", ctx.write("throughput", &throughput_table(&targets)?)?.display());

    // The published cells describe the two shipped presets.
    let devs = match name {
        "baseline" => cost_deviations(&rows, &targets),
        "best-case" => {
            let (opt, devs) = optimized_rows(preset, &targets)?;
            println!("wrote {}", ctx.write("optimized", &opt)?.display());
            devs
        }
        _ => return Ok(true),
    };
    println!("wrote {}", ctx.write("deviations", &devs)?.display());
    let bad: Vec<_> = devs.iter().filter(|d| !d.within).collect();
    for d in &bad {
        println!("outside tolerance: {} {} {}: {:.4} vs {:.4}", d.table, d.name, d.column, d.model, d.published);
    }
    println!("{} of {} gated cells within tolerance", devs.len() - bad.len(), devs.len());
    Ok(bad.is_empty())
}

fn sweep_cmd(ctx: &Ctx, name: &str) -> Result<bool> {
    let presets = Presets::load()?;
    let steps = sweep(presets.cost(name)?)?;
    for s in &steps {
        println!("{:2} {:18} {:>9.3} GOP {:>9.3} GB  AI {:.3}", s.step, s.flag, s.gop, s.gb, s.ai);
    }
    println!("wrote {}", ctx.write("sweep", &steps)?.display());
    let svg = ctx.out.join("sweep.svg");
    plot_sweep(&steps, &svg)?;
    println!("wrote {}", svg.display());
    Ok(true)
}

fn plot_sweep(steps: &[SweepStep], path: &Path) -> Result<()> {
    let root = SVGBackend::new(path, (900, 500)).into_drawing_area();
    root.fill(&WHITE)?;
    let max_ai = steps.iter().map(|s| s.ai).fold(0.0, f64::max) * 1.15;
    let labels: Vec<String> = steps.iter().map(|s| s.flag.clone()).collect();
    let mut chart = ChartBuilder::on(&root)
        .caption("Bootstrap arithmetic intensity by cumulative optimization", ("sans-serif", 20))
        .margin(15)
        .x_label_area_size(90)
        .y_label_area_size(60)
        .build_cartesian_2d((0..steps.len()).into_segmented(), 0.0..max_ai)?;
    chart
        .configure_mesh()
        .disable_x_mesh()
        .y_desc("ops / byte")
        .x_labels(steps.len())
        .x_label_formatter(&|v| match v {
            SegmentValue::CenterOf(i) => labels.get(*i).cloned().unwrap_or_default(),
            _ => String::new(),
        })
        .x_label_style(("sans-serif", 11).into_font().transform(FontTransform::Rotate90))
        .draw()?;
    // Explicit bars keep the SVG element order stable.
    chart.draw_series(steps.iter().map(|s| {
        let mut bar = Rectangle::new(
            [(SegmentValue::Exact(s.step), 0.0), (SegmentValue::Exact(s.step + 1), s.ai)],
            BLUE.mix(0.6).filled(),
        );
        bar.set_margin(0, 0, 6, 6);
        bar
    }))?;
    root.present()?;
    Ok(())
}

#[derive(Serialize)]
struct SearchRow {
    rank: usize,
    max_level: usize,
    dnum: usize,
    fft_iters: usize,
    radices: String,
    baby_steps: String,
    level_out: i64,
    gop: f64,
    dram_gb: f64,
    intensity: f64,
    throughput: f64,
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn search(ctx: &Ctx, top: usize, baseline: bool) -> Result<bool> {
    let targets = Targets::load()?;
    let opts = if baseline { OptimizationSet::empty() } else { OptimizationSet::all() };
    let entries = param_search(&SearchSpace::standard(), opts)?;
    let rows: Vec<SearchRow> = entries
        .iter()
        .take(top)
        .enumerate()
        .map(|(i, e)| SearchRow {
            rank: i + 1,
            max_level: e.max_level,
            dnum: e.dnum,
            fft_iters: e.fft_iters,
            radices: join(&e.radices),
            baby_steps: join(&e.baby_steps),
            level_out: e.level_out,
            gop: e.gop,
            dram_gb: e.dram_gb,
            intensity: e.intensity,
            throughput: e.throughput,
        })
        .collect();
    for r in &rows {
        println!(
            "{:3}. L={:2} dnum={} fftIter={}  level_out {:2}  {:8.2} GB  AI {:.2}  throughput {:.2}",
            r.rank, r.max_level, r.dnum, r.fft_iters, r.level_out, r.dram_gb, r.intensity, r.throughput
        );
    }
    println!("{} feasible points; wrote {}", entries.len(), ctx.write("search", &rows)?.display());
    if baseline {
        return Ok(true);
    }
    let t = targets.search;
    Ok(entries.first().is_some_and(|e| (e.max_level, e.dnum, e.fft_iters) == (t.max_level, t.dnum, t.fft_iters)))
}

fn dram(ctx: &Ctx, config: Option<&Path>) -> Result<bool> {
    let setup = match config {
        Some(p) => DramSetup::from_toml(&fs::read_to_string(p)?)?,
        None => DramSetup::default_setup(),
    };
    let traces = [Pattern::LimbWise, Pattern::SlotWise].map(|p| setup.workload.trace(p, &setup.config));
    let maps: Vec<(&str, _)> = setup.mappings.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let c = compare_mappings(&traces, &maps, &setup.config)?;
    for e in &c.entries {
        println!(
            "{:10} {:10} {:8.3} ms  {:8} activations  {:8} bank-group conflicts",
            e.mapping,
            e.pattern.label(),
            e.ms,
            e.activations,
            e.bank_group_conflicts
        );
    }
    println!("wrote {}", ctx.write("dram", &c.entries)?.display());
    match c.improvement("baseline", "optimized") {
        Some(imp) => {
            println!("total-time improvement x{imp:.2}");
            let t = Targets::load()?.dram;
            Ok(config.is_some() || (t.improvement_min..=t.improvement_max).contains(&imp))
        }
        None => Ok(true),
    }
}

fn lr_demo(ctx: &Ctx, name: &str, data: Option<&Path>, iterations: usize, lr: f64, seed: u64) -> Result<bool> {
    let preset = Presets::load()?.ckks(name)?.clone();
    let boot = preset.boot_config().ok_or_else(|| format!("preset {name:?} cannot bootstrap"))?;
    let params = CkksParams::new(preset.spec)?;
    let dataset = match data {
        Some(p) => Some(Dataset::from_csv(fs::File::open(p)?)?),
        None => None,
    };
    let cfg = DemoConfig { iterations, lr, seed, ..DemoConfig::default() };
    let report = run_demo(&params, boot, &cfg, dataset)?;
    for r in &report.iterations {
        println!(
            "iteration {:2}  level {:2}  bootstraps {}  loss {:.6}  plaintext {:.6}  accuracy {:.3}  weight error {:.2e}",
            r.iteration, r.level, r.bootstraps, r.loss, r.plain_loss, r.accuracy, r.max_weight_error
        );
    }
    println!("wrote {}", ctx.write("lr_demo", &report.iterations)?.display());
    Ok(report.max_weight_error() < 2f64.powi(-6))
}

#[derive(Serialize)]
struct SelftestRow {
    criterion: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn selftest_cmd(ctx: &Ctx, only: &[u8]) -> Result<bool> {
    let mut rows = Vec::new();
    for (criterion, _, _) in CRITERIA {
        if !only.is_empty() && !only.contains(&criterion) {
            continue;
        }
        let c = selftest::run(criterion);
        println!("{}", c.line());
        rows.push(SelftestRow { criterion, name: c.name, passed: c.passed, detail: c.detail });
    }
    println!("wrote {}", ctx.write("selftest", &rows)?.display());
    Ok(rows.iter().all(|r| r.passed))
}
