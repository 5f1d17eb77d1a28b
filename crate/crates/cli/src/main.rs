use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qtraffic::arch::{load_architecture, ArchConfig, Architecture};
use qtraffic::bench::{BenchFamily, BenchParams, BenchSpec};
use qtraffic::circuit::{parse_circuit, serialize_circuit};
use qtraffic::mapper::{compile, parse_compiled, write_compiled, MapperOptions};
use qtraffic::pipeline::{
    analyze_program, run_pipeline, sweep, write_bundle, OutputOptions, RunConfig,
};
use qtraffic::seed::derive_seed;
use qtraffic::traffic::ReportOptions;

/// Multi-core quantum circuit compiler and inter-core traffic analyzer.
#[derive(Parser, Debug)]
#[command(name = "qtraffic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a benchmark circuit.
    Generate {
        #[command(flatten)]
        bench: BenchArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Output file (stdout when omitted).
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Compile a circuit file onto a multi-core platform.
    Compile {
        input: PathBuf,
        #[command(flatten)]
        arch: ArchArgs,
        #[command(flatten)]
        mapper: MapperArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Output file (stdout when omitted).
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Schedule a compiled file and write its traffic report.
    Analyze {
        input: PathBuf,
        /// Platform timing; cores and capacity default to the file header.
        #[command(flatten)]
        arch: ArchArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[arg(short = 'o', long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Generate, compile and analyze one configuration.
    Pipeline {
        #[command(flatten)]
        bench: BenchArgs,
        #[command(flatten)]
        arch: ArchArgs,
        #[command(flatten)]
        mapper: MapperArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short = 'o', long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Run the pipeline over benchmarks x core counts and write a summary.
    Sweep {
        /// Comma-separated benchmark families.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "qft,grover,cuccaro,qv,random"
        )]
        bench: Vec<BenchFamily>,
        /// Comma-separated core counts.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        cores: Vec<usize>,
        /// Qubits per core.
        #[arg(long, default_value_t = 8)]
        capacity: usize,
        #[command(flatten)]
        params: ParamArgs,
        /// Platform timing; cores and capacity come from the sweep.
        #[command(flatten)]
        arch: ArchArgs,
        #[command(flatten)]
        mapper: MapperArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Parallel sweep cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short = 'o', long = "out-dir")]
        out_dir: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SeedArg {
    /// Root seed for every random stage.
    #[arg(long, env = "QTRAFFIC_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    bench: BenchFamily,
    /// Circuit width.
    #[arg(long)]
    qubits: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Random circuit gate count.
    #[arg(long)]
    gates: Option<usize>,
    /// Random circuit two-qubit gate probability.
    #[arg(long)]
    twoq: Option<f64>,
    /// Quantum volume layers.
    #[arg(long)]
    depth: Option<usize>,
    /// Grover iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Grover marked bitstring, qubit 0 first.
    #[arg(long)]
    marked: Option<String>,
}

impl ParamArgs {
    fn params(&self) -> BenchParams {
        BenchParams {
            iterations: self.iterations,
            marked: self.marked.clone(),
            depth: self.depth,
            gates: self.gates,
            two_qubit_fraction: self.twoq,
        }
    }
}

#[derive(Args, Debug)]
struct ArchArgs {
    /// Platform shorthand: cores=<n>,capacity=<m>[,teleport=<ns>][,cycle=<ns>].
    #[arg(long)]
    arch: Option<String>,
    /// Platform JSON document.
    #[arg(long, conflicts_with = "arch")]
    arch_file: Option<PathBuf>,
}

impl ArchArgs {
    fn config(&self) -> Result<Option<ArchConfig>> {
        if let Some(s) = &self.arch {
            return Ok(Some(ArchConfig::from_shorthand(s).context("--arch")?));
        }
        if let Some(p) = &self.arch_file {
            let text = read(p)?;
            return Ok(Some(
                ArchConfig::from_json(&text).with_context(|| p.display().to_string())?,
            ));
        }
        Ok(None)
    }

    fn required(&self) -> Result<ArchConfig> {
        self.config()?
            .context("an architecture is required (--arch or --arch-file)")
    }
}

#[derive(Args, Debug)]
struct MapperArgs {
    /// Lookahead window in slices.
    #[arg(long)]
    lookahead: Option<usize>,
    /// Cost of one qubit migration relative to one unit of interaction weight.
    #[arg(long)]
    migration_penalty: Option<f64>,
    /// Fill unused platform qubits with idle virtual qubits.
    #[arg(long)]
    pad: bool,
}

impl MapperArgs {
    fn options(&self, seed: u64) -> MapperOptions {
        let mut o = MapperOptions {
            seed: derive_seed(seed, "mapper", 0),
            pad: self.pad,
            ..Default::default()
        };
        if let Some(w) = self.lookahead {
            o.lookahead = w;
        }
        if let Some(m) = self.migration_penalty {
            o.migration_penalty = m;
        }
        o
    }
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Moving-average window in slices (default: 5% of the slice count).
    #[arg(long)]
    window: Option<usize>,
    /// Also write the trace raster indexed by virtual qubit.
    #[arg(long = "virtual")]
    virtual_raster: bool,
}

impl ReportArgs {
    fn options(&self) -> ReportOptions {
        ReportOptions {
            window: self.window,
        }
    }

    fn outputs(&self) -> OutputOptions {
        OutputOptions {
            virtual_raster: self.virtual_raster,
            ..Default::default()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench_spec(b: &BenchArgs, seed: u64) -> BenchSpec {
    BenchSpec {
        family: b.bench,
        width: b.qubits,
        seed: derive_seed(seed, "bench", 0),
        params: b.params.params(),
    }
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map_or_else(
        || "circuit".to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { bench, seed, out } => {
            let c = bench_spec(&bench, seed.seed).generate()?;
            write_out(out.as_deref(), &serialize_circuit(&c))
        }
        Command::Compile {
            input,
            arch,
            mapper,
            seed,
            out,
        } => {
            let c = parse_circuit(&read(&input)?).with_context(|| input.display().to_string())?;
            let arch = load_architecture(&arch.required()?)?;
            let p = compile(&c, &arch, &mapper.options(seed.seed))?;
            write_out(out.as_deref(), &write_compiled(&p))
        }
        Command::Analyze {
            input,
            arch,
            report,
            out_dir,
        } => {
            let p = parse_compiled(&read(&input)?).with_context(|| input.display().to_string())?;
            let mut cfg = arch.config()?.unwrap_or_default();
            for (field, value, name) in [
                (&mut cfg.num_cores, p.num_cores, "cores"),
                (&mut cfg.capacity, p.capacity, "capacity"),
            ] {
                match *field {
                    Some(v) if v != value => {
                        bail!("architecture {name} {v} differs from the compiled file ({value})")
                    }
                    _ => *field = Some(value),
                }
            }
            let arch: Architecture = load_architecture(&cfg)?;
            let out = analyze_program(p, &arch, &report.options())?;
            write_bundle(&out, None, &file_stem(&input), &report.outputs(), &out_dir)?;
            Ok(())
        }
        Command::Pipeline {
            bench,
            arch,
            mapper,
            report,
            seed,
            out_dir,
        } => {
            let cfg = RunConfig {
                seed: seed.seed,
                bench: bench_spec(&bench, seed.seed),
                arch: arch.required()?,
                mapper: mapper.options(seed.seed),
                report: report.options(),
                outputs: report.outputs(),
            };
            let out = run_pipeline(&cfg)?;
            let name = out
                .circuit
                .as_ref()
                .map_or_else(|| bench.bench.to_string(), |c| c.name.clone());
            write_bundle(&out, Some(&cfg), &name, &cfg.outputs, &out_dir)?;
            Ok(())
        }
        Command::Sweep {
            bench,
            cores,
            capacity,
            params,
            arch,
            mapper,
            report,
            seed,
            jobs,
            out_dir,
        } => {
            let mut arch_cfg = arch.config()?.unwrap_or_default();
            arch_cfg.capacity = Some(capacity);
            let benches: Vec<BenchSpec> = bench
                .iter()
                .map(|&family| BenchSpec {
                    family,
                    width: 0,
                    seed: 0,
                    params: params.params(),
                })
                .collect();
            let Some(first) = benches.first() else {
                bail!("--bench lists no benchmark");
            };
            let base = RunConfig {
                seed: seed.seed,
                bench: first.clone(),
                arch: arch_cfg,
                mapper: mapper.options(seed.seed),
                report: report.options(),
                outputs: report.outputs(),
            };
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("cannot create {}", out_dir.display()))?;
            let rows = sweep(&base, &benches, &cores, capacity, jobs, Some(&out_dir))?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            if failed > 0 {
                bail!(
                    "{failed} of {} sweep cells failed; see {}",
                    rows.len(),
                    out_dir.join("summary.csv").display()
                );
            }
            Ok(())
        }
    }
}

fn one_line(e: &anyhow::Error) -> String {
    let msg = format!("{e:#}");
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::FAILURE
        }
    }
}
