//! End-to-end runs: generate, compile, schedule, analyze and write a report
//! bundle, for one configuration or a sweep over benchmarks and core counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arch::{load_architecture, ArchConfig, ArchError, Architecture};
use crate::bench::{BenchError, BenchSpec};
use crate::circuit::{serialize_circuit, Circuit};
use crate::mapper::{compile, write_compiled, CompiledProgram, MapperError, MapperOptions};
use crate::report::{
    metrics_json, raster_stem, series_csv, sha256_hex, to_stable_json, write_file,
    write_trace_raster, MetricsContext, ReportError, TOOL_VERSION,
};
use crate::schedule::{schedule_asap, Schedule, ScheduleError};
use crate::seed::derive_seed;
use crate::traffic::{
    build_report, build_trace, MetricsReport, ReportOptions, TraceAxis, TrafficError,
};

/// Rasters above this many cells are skipped (and noted in the manifest).
pub const DEFAULT_MAX_RASTER_CELLS: usize = 1 << 24;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("benchmark: {0}")]
    Bench(#[from] BenchError),
    #[error("architecture: {0}")]
    Arch(#[from] ArchError),
    #[error("compile: {0}")]
    Mapper(#[from] MapperError),
    #[error("schedule: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("metrics: {0}")]
    Traffic(#[from] TrafficError),
    #[error("{0}")]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputOptions {
    pub rasters: bool,
    /// Also write the raster indexed by virtual qubit.
    pub virtual_raster: bool,
    pub schedule_csv: bool,
    pub max_raster_cells: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            rasters: true,
            virtual_raster: false,
            schedule_csv: true,
            max_raster_cells: DEFAULT_MAX_RASTER_CELLS,
        }
    }
}

/// One pipeline configuration, recorded verbatim in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Root seed; the benchmark and mapper seeds derive from it.
    pub seed: u64,
    pub bench: BenchSpec,
    pub arch: ArchConfig,
    pub mapper: MapperOptions,
    pub report: ReportOptions,
    pub outputs: OutputOptions,
}

impl RunConfig {
    pub fn new(bench: BenchSpec, arch: ArchConfig, seed: u64) -> Self {
        let mut cfg = RunConfig {
            seed,
            bench,
            arch,
            mapper: MapperOptions::default(),
            report: ReportOptions::default(),
            outputs: OutputOptions::default(),
        };
        cfg.apply_seed();
        cfg
    }

    /// Propagates the root seed to the benchmark and mapper stages.
    pub fn apply_seed(&mut self) {
        self.bench.seed = derive_seed(self.seed, "bench", 0);
        self.mapper.seed = derive_seed(self.seed, "mapper", 0);
    }
}

/// In-memory results of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub arch: Architecture,
    pub circuit: Option<Circuit>,
    pub program: CompiledProgram,
    pub schedule: Schedule,
    pub report: MetricsReport,
}

/// Schedules a compiled program and derives its metrics.
pub fn analyze_program(
    program: CompiledProgram,
    arch: &Architecture,
    opts: &ReportOptions,
) -> Result<RunOutput, PipelineError> {
    let schedule = schedule_asap(&program, arch)?;
    let report = build_report(&program, &schedule, opts)?;
    Ok(RunOutput {
        arch: arch.clone(),
        circuit: None,
        program,
        schedule,
        report,
    })
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutput, PipelineError> {
    let arch = load_architecture(&cfg.arch)?;
    let circuit = cfg.bench.generate()?;
    let program = compile(&circuit, &arch, &cfg.mapper)?;
    let mut out = analyze_program(program, &arch, &cfg.report)?;
    out.circuit = Some(circuit);
    Ok(out)
}

fn bench_value(cfg: Option<&RunConfig>, name: &str) -> Value {
    match cfg {
        Some(cfg) => {
            let mut v = serde_json::to_value(&cfg.bench).expect("serializable");
            v["name"] = json!(name);
            v
        }
        None => json!({ "name": name }),
    }
}

/// Writes every artifact of `out` into `dir` and returns the file hashes.
///
/// Files: `circuit.cq` (when the run generated it), `compiled.cq`,
/// `schedule.csv`, `series.csv`, trace rasters, `metrics.json` and
/// `manifest.json`, which hashes all the others.
pub fn write_bundle(
    out: &RunOutput,
    cfg: Option<&RunConfig>,
    name: &str,
    outputs: &OutputOptions,
    dir: &Path,
) -> Result<BTreeMap<String, String>, PipelineError> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut hashes = BTreeMap::new();
    let mut notes: Vec<String> = Vec::new();
    let emit = |hashes: &mut BTreeMap<String, String>, file: &str, body: &str| {
        write_file(&dir.join(file), body.as_bytes())?;
        hashes.insert(file.to_string(), sha256_hex(body.as_bytes()));
        Ok::<(), PipelineError>(())
    };

    if let Some(c) = &out.circuit {
        emit(&mut hashes, "circuit.cq", &serialize_circuit(c))?;
    }
    emit(&mut hashes, "compiled.cq", &write_compiled(&out.program))?;
    if outputs.schedule_csv {
        emit(&mut hashes, "schedule.csv", &out.schedule.to_csv())?;
    }
    emit(
        &mut hashes,
        "series.csv",
        &series_csv(&out.report.teleports_per_slice, &out.report.moving_avg),
    )?;
    if outputs.rasters {
        let cells =
            out.schedule.width * out.schedule.makespan_ns.div_ceil(out.schedule.cycle_ns) as usize;
        if cells > outputs.max_raster_cells {
            notes.push(format!(
                "trace rasters skipped: {cells} cells exceed the limit of {}",
                outputs.max_raster_cells
            ));
        } else {
            let mut axes = vec![TraceAxis::Physical];
            if outputs.virtual_raster {
                axes.push(TraceAxis::Virtual);
            }
            for axis in axes {
                let grid = build_trace(&out.schedule, axis);
                hashes.extend(write_trace_raster(&grid, dir, raster_stem(axis))?);
            }
        }
    }

    let seed = cfg.map_or(out.program.options.seed, |c| c.seed);
    let ctx = MetricsContext {
        bench: bench_value(cfg, name),
        arch: &out.arch,
        seed,
        hashes: hashes.clone(),
    };
    emit(
        &mut hashes,
        "metrics.json",
        &metrics_json(&out.report, &ctx),
    )?;

    let manifest = json!({
        "tool": "qtraffic",
        "version": TOOL_VERSION,
        "seed": seed,
        "bench": bench_value(cfg, name),
        "arch": out.arch.to_config(),
        "mapper": out.program.options,
        "config": cfg,
        "files": hashes,
        "notes": notes,
    });
    let manifest_text = to_stable_json(&manifest);
    write_file(&dir.join("manifest.json"), manifest_text.as_bytes())?;
    hashes.insert("manifest.json".into(), sha256_hex(manifest_text.as_bytes()));
    Ok(hashes)
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub bench: String,
    pub cores: usize,
    pub capacity: usize,
    pub result: Result<SweepMetrics, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetrics {
    pub burstiness_cov: f64,
    pub hotspotness_cov: f64,
    pub mean_teleports: f64,
    pub makespan_ns: u64,
}

pub const SUMMARY_HEADER: &str =
    "bench,cores,capacity,burstiness_cov,hotspotness_cov,mean_teleports,makespan_ns,error";

pub fn summary_csv(rows: &[SweepRow]) -> String {
    use crate::circuit::format_real;
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = write!(out, "{},{},{},", r.bench, r.cores, r.capacity);
        match &r.result {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},",
                    format_real(m.burstiness_cov),
                    format_real(m.hotspotness_cov),
                    format_real(m.mean_teleports),
                    m.makespan_ns
                );
            }
            Err(e) => {
                let msg: String = e
                    .chars()
                    .map(|c| {
                        if matches!(c, ',' | '\n' | '\r' | '"') {
                            ' '
                        } else {
                            c
                        }
                    })
                    .collect();
                let _ = writeln!(out, ",,,,{msg}");
            }
        }
    }
    out
}

/// Runs `base` for every benchmark family in `benches` and every core count,
/// with width = cores x capacity. Each cell writes its bundle to
/// `<dir>/<bench>_c<cores>` when `dir` is given. A failing cell becomes an
/// error row; the others proceed.
pub fn sweep(
    base: &RunConfig,
    benches: &[BenchSpec],
    cores: &[usize],
    capacity: usize,
    jobs: usize,
    dir: Option<&Path>,
) -> Result<Vec<SweepRow>, PipelineError> {
    let cells: Vec<(BenchSpec, usize)> = benches
        .iter()
        .flat_map(|b| cores.iter().map(move |&c| (b.clone(), c)))
        .collect();
    let run_cell = |(bench, ncores): &(BenchSpec, usize)| -> SweepRow {
        let mut cfg = base.clone();
        cfg.bench = bench.clone();
        cfg.bench.width = ncores * capacity;
        cfg.arch.num_cores = Some(*ncores);
        cfg.arch.capacity = Some(capacity);
        cfg.apply_seed();
        let name = format!("{}_c{}", bench.family, ncores);
        let result = run_pipeline(&cfg).and_then(|out| {
            if let Some(dir) = dir {
                write_bundle(&out, Some(&cfg), &name, &cfg.outputs, &dir.join(&name))?;
            }
            Ok(SweepMetrics {
                burstiness_cov: out.report.burstiness_cov,
                hotspotness_cov: out.report.hotspotness_cov,
                mean_teleports: out.report.mean_teleports_per_slice,
                makespan_ns: out.report.makespan_ns,
            })
        });
        SweepRow {
            bench: bench.family.to_string(),
            cores: *ncores,
            capacity,
            result: result.map_err(|e| e.to_string()),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let rows: Vec<SweepRow> = pool.install(|| cells.par_iter().map(run_cell).collect());
    if let Some(dir) = dir {
        let text = summary_csv(&rows);
        write_file(&dir.join("summary.csv"), text.as_bytes())?;
    }
    Ok(rows)
}
