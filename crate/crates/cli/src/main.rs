// SPDX-License-Identifier: Apache-2.0
//! Command-line front end for the pad-ring pipeline.
//!
//! Exit codes: 0 success/clean, 1 internal or I/O failure, 2 validation or
//! infeasible-design failure, 3 DRC violations, 4 LVS mismatches, 5 both.
//! `bench` exits 0 whenever the run completes; pass rates are data.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ioring_core::bench::{run_bench_to_dir, BenchReport, Tier};
use ioring_core::pipeline::{parse_ablation_args, Ablation, PipelineOutput};
use ioring_core::structurer::{StructurerConfig, StructurerMode};
use ioring_core::{
    parse_intent_graph, parse_pin_plan, serialize_intent_graph, IntentGraph, KnowledgeBase,
    PadPlanSpec, PlanFormat,
};

#[derive(Parser)]
#[command(
    name = "ioring",
    version,
    about = "Pad-ring synthesis and verification pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Knowledge-base JSON document (built-in default when omitted).
    #[arg(long, global = true)]
    kb: Option<PathBuf>,

    /// Machine-readable JSON on stdout instead of human text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for bench evaluation.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Fail on pins without a pattern match instead of emitting unresolved
    /// markers.
    #[arg(long, global = true)]
    strict: bool,

    /// Pipeline ablations: no_kb, no_intent_graph, no_adaptor.
    #[arg(long, global = true, value_delimiter = ',')]
    ablate: Vec<String>,

    /// Structurer backend: deterministic | external.
    #[arg(long, global = true, default_value = "deterministic")]
    structurer: String,

    /// External structurer endpoint URL (or IORING_ENDPOINT).
    #[arg(long, global = true)]
    endpoint: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the intent graph from a pad plan.
    Structure {
        /// Pad plan file (.csv or .json).
        #[arg(long)]
        spec: PathBuf,
        /// Input format; inferred from the extension when omitted.
        #[arg(long)]
        format: Option<String>,
        #[arg(short, long, default_value = "intent.json")]
        out: PathBuf,
    },
    /// Resolve geometry from an intent graph and emit the layout script.
    Resolve {
        #[arg(long)]
        intent: PathBuf,
        #[arg(short, long, default_value = "layout.script")]
        out: PathBuf,
    },
    /// Full pipeline: spec or intent in, verified artifact bundle out.
    Build {
        #[arg(long, conflicts_with = "intent")]
        spec: Option<PathBuf>,
        #[arg(long)]
        intent: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        /// Output directory for the artifact bundle.
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Re-run DRC and LVS from an intent graph; write report JSON.
    Verify {
        #[arg(long)]
        intent: PathBuf,
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
        /// Case identifier stamped into the reports.
        #[arg(long)]
        case_id: Option<String>,
    },
    /// Emit a single artifact from an intent graph.
    Emit {
        #[arg(long)]
        intent: PathBuf,
        /// One of: script, svg, netlist.
        #[arg(long)]
        what: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Generate and evaluate the benchmark suite.
    Bench {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Restrict to one tier: simple | medium | hard.
        #[arg(long)]
        tier: Option<String>,
        /// Report JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-case artifact bundles.
        #[arg(long)]
        cases_dir: Option<PathBuf>,
    },
    /// Re-print the metrics table of an existing bench report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}

type CliError = Box<dyn std::error::Error>;

fn run(cli: Cli) -> Result<u8, CliError> {
    let kb = match &cli.kb {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("reading {}: {}", path.display(), e))?;
            KnowledgeBase::load(&text)?
        }
        None => KnowledgeBase::load_default(),
    };
    let ablation = parse_ablation_args(&cli.ablate)?;
    let cfg = structurer_config(&cli)?;

    match &cli.command {
        Command::Structure { spec, format, out } => {
            cmd_structure(&cli, &kb, &cfg, spec, format.as_deref(), out)
        }
        Command::Resolve { intent, out } => cmd_resolve(&kb, intent, out),
        Command::Build {
            spec,
            intent,
            format,
            out_dir,
        } => cmd_build(
            &cli,
            &kb,
            &cfg,
            ablation,
            spec.as_deref(),
            intent.as_deref(),
            format.as_deref(),
            out_dir,
        ),
        Command::Verify {
            intent,
            out_dir,
            case_id,
        } => cmd_verify(&kb, intent, out_dir, case_id.as_deref()),
        Command::Emit { intent, what, out } => cmd_emit(&kb, intent, what, out),
        Command::Bench {
            seed,
            tier,
            out,
            cases_dir,
        } => cmd_bench(
            &cli,
            &kb,
            ablation,
            *seed,
            tier.as_deref(),
            out.as_deref(),
            cases_dir.as_deref(),
        ),
        Command::Report { input } => cmd_report(&cli, input),
    }
}

fn structurer_config(cli: &Cli) -> Result<StructurerConfig, CliError> {
    let mode = match cli.structurer.as_str() {
        "deterministic" => StructurerMode::Deterministic,
        "external" => StructurerMode::External,
        other => return Err(format!("unknown structurer `{}`", other).into()),
    };
    let endpoint = cli
        .endpoint
        .clone()
        .or_else(|| std::env::var("IORING_ENDPOINT").ok());
    if mode == StructurerMode::External && endpoint.is_none() {
        return Err("external structurer requires --endpoint or IORING_ENDPOINT".into());
    }
    Ok(StructurerConfig {
        mode,
        endpoint,
        strict: cli.strict,
    })
}

/// Replace-by-rename so a rerun never leaves a torn file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp~");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn load_plan(path: &Path, format: Option<&str>) -> Result<PadPlanSpec, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {}", path.display(), e))?;
    let fmt = match format {
        Some("csv") => PlanFormat::Csv,
        Some("json") => PlanFormat::Json,
        Some(other) => return Err(format!("unknown format `{}`", other).into()),
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => PlanFormat::Csv,
            Some("json") => PlanFormat::Json,
            _ => return Err("cannot infer format; pass --format csv|json".into()),
        },
    };
    Ok(parse_pin_plan(&text, fmt)?)
}

fn load_graph(path: &Path) -> Result<IntentGraph, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {}", path.display(), e))?;
    Ok(parse_intent_graph(&text)?)
}

fn cmd_structure(
    cli: &Cli,
    kb: &KnowledgeBase,
    cfg: &StructurerConfig,
    spec_path: &Path,
    format: Option<&str>,
    out: &Path,
) -> Result<u8, CliError> {
    let spec = load_plan(spec_path, format)?;
    let graph = match ioring_core::build_intent(&spec, kb, cfg) {
        Ok(graph) => graph,
        Err(e) => {
            // Structuring failure is a validation-class outcome: report it
            // and exit 2 rather than 1.
            if cli.json {
                let v = serde_json::json!({"passed": false, "error": e.to_string()});
                println!("{}", v);
            }
            eprintln!("structure failed: {}", e);
            return Ok(2);
        }
    };
    let report = ioring_core::validate_intent_graph(&graph, kb);
    write_atomic(out, &serialize_intent_graph(&graph))?;
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for issue in &report.issues {
            eprintln!("[{:?}] {}: {}", issue.severity, issue.code, issue.message);
        }
        eprintln!(
            "intent graph: {} nodes -> {} ({})",
            graph.nodes.len(),
            out.display(),
            if report.passed { "valid" } else { "INVALID" }
        );
    }
    Ok(if report.passed { 0 } else { 2 })
}

fn cmd_resolve(kb: &KnowledgeBase, intent: &Path, out: &Path) -> Result<u8, CliError> {
    let graph = load_graph(intent)?;
    let report = ioring_core::validate_intent_graph(&graph, kb);
    if report.blocks_resolution() {
        for issue in &report.issues {
            eprintln!("[{:?}] {}: {}", issue.severity, issue.code, issue.message);
        }
        return Ok(2);
    }
    let layout = match ioring_core::resolve_geometry(&graph, kb) {
        Ok(layout) => layout,
        Err(e) => {
            eprintln!("resolve failed: {}", e);
            return Ok(2);
        }
    };
    let netlist = ioring_core::generate_netlist(&graph, kb);
    let script = ioring_core::emit_script(&layout, &netlist, &graph)?;
    write_atomic(out, &script)?;
    eprintln!("{} instances -> {}", layout.instances.len(), out.display());
    Ok(0)
}

fn empty_bundle(out_dir: &Path, case_id: &str) -> Result<(), CliError> {
    write_atomic(&out_dir.join("layout.script"), "")?;
    write_atomic(&out_dir.join("netlist.txt"), "")?;
    write_atomic(&out_dir.join("render.svg"), "")?;
    let drc = serde_json::json!({
        "tool": "drc", "case_id": case_id, "passed": false,
        "violations": [{"rule_code": "PIPELINE", "message": "adaptor stage disabled", "location": [0,0,0,0], "instances": []}],
    });
    let lvs = serde_json::json!({
        "tool": "lvs", "case_id": case_id, "status": "mismatch",
        "diffs": [{"kind": "missing_instance", "detail": "adaptor stage disabled"}],
    });
    write_atomic(&out_dir.join("drc.json"), &format!("{:#}\n", drc))?;
    write_atomic(&out_dir.join("lvs.json"), &format!("{:#}\n", lvs))?;
    Ok(())
}

fn write_bundle(out_dir: &Path, case_id: &str, output: &PipelineOutput) -> Result<(), CliError> {
    if let Some(graph) = &output.graph {
        write_atomic(&out_dir.join("intent.json"), &serialize_intent_graph(graph))?;
    }
    write_atomic(
        &out_dir.join("layout.script"),
        output.script.as_deref().unwrap_or(""),
    )?;
    write_atomic(
        &out_dir.join("netlist.txt"),
        output.netlist_text.as_deref().unwrap_or(""),
    )?;
    write_atomic(&out_dir.join("render.svg"), output.svg.as_deref().unwrap_or(""))?;
    if let Some(drc) = &output.drc {
        write_atomic(&out_dir.join("drc.json"), &drc.to_json(case_id))?;
    }
    if let Some(lvs) = &output.lvs {
        write_atomic(&out_dir.join("lvs.json"), &lvs.to_json(case_id))?;
    }
    Ok(())
}

fn verdict_code(output: &PipelineOutput) -> u8 {
    match (output.drc_ok(), output.lvs_ok()) {
        (true, true) => 0,
        (false, true) => 3,
        (true, false) => 4,
        (false, false) => 5,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    cli: &Cli,
    kb: &KnowledgeBase,
    cfg: &StructurerConfig,
    ablation: Ablation,
    spec: Option<&Path>,
    intent: Option<&Path>,
    format: Option<&str>,
    out_dir: &Path,
) -> Result<u8, CliError> {
    let case_id = spec
        .or(intent)
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "build".to_string());

    let output = match (spec, intent) {
        (Some(spec_path), None) => {
            let plan = load_plan(spec_path, format)?;
            ioring_core::run_pipeline(&plan, kb, cfg, ablation)
        }
        (None, Some(intent_path)) => {
            let graph = load_graph(intent_path)?;
            ioring_core::run_pipeline_from_graph(graph, kb, ablation)
        }
        _ => return Err("build needs exactly one of --spec or --intent".into()),
    };

    if let Some(e) = &output.structure_error {
        eprintln!("structure failed: {}", e);
        if ablation.no_adaptor || ablation.no_intent_graph {
            empty_bundle(out_dir, &case_id)?;
            return Ok(5);
        }
        return Ok(2);
    }
    if let Some(report) = &output.validation {
        for issue in &report.issues {
            eprintln!("[{:?}] {}: {}", issue.severity, issue.code, issue.message);
        }
        // Structural breakage stops the build; signoff-class findings
        // (domain leaks) flow through to DRC/LVS below.
        if report.blocks_resolution() {
            write_bundle(out_dir, &case_id, &output)?;
            return Ok(2);
        }
    }
    if ablation.no_adaptor {
        if let Some(graph) = &output.graph {
            write_atomic(&out_dir.join("intent.json"), &serialize_intent_graph(graph))?;
        }
        empty_bundle(out_dir, &case_id)?;
        eprintln!("adaptor disabled: layout artifacts empty, signoff failed");
        return Ok(5);
    }
    if let Some(e) = &output.resolve_error {
        eprintln!("resolve failed: {}", e);
        write_bundle(out_dir, &case_id, &output)?;
        return Ok(2);
    }
    write_bundle(out_dir, &case_id, &output)?;

    let code = verdict_code(&output);
    if cli.json {
        let v = serde_json::json!({
            "case_id": case_id,
            "drc_passed": output.drc_ok(),
            "lvs_clean": output.lvs_ok(),
            "exit": code,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        eprintln!(
            "build {}: DRC {}, LVS {}",
            case_id,
            if output.drc_ok() { "clean" } else { "FAIL" },
            if output.lvs_ok() { "clean" } else { "FAIL" },
        );
    }
    Ok(code)
}

fn cmd_verify(
    kb: &KnowledgeBase,
    intent: &Path,
    out_dir: &Path,
    case_id: Option<&str>,
) -> Result<u8, CliError> {
    let case_id = case_id
        .map(str::to_string)
        .or_else(|| intent.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "verify".to_string());
    let graph = load_graph(intent)?;
    let output = ioring_core::run_pipeline_from_graph(graph, kb, Ablation::default());
    if let Some(report) = &output.validation {
        for issue in &report.issues {
            eprintln!("[{:?}] {}: {}", issue.severity, issue.code, issue.message);
        }
        if report.blocks_resolution() {
            return Ok(2);
        }
    }
    if let Some(e) = &output.resolve_error {
        eprintln!("resolve failed: {}", e);
        return Ok(2);
    }
    if let Some(drc) = &output.drc {
        write_atomic(&out_dir.join("drc.json"), &drc.to_json(&case_id))?;
    }
    if let Some(lvs) = &output.lvs {
        write_atomic(&out_dir.join("lvs.json"), &lvs.to_json(&case_id))?;
    }
    eprintln!(
        "verify {}: DRC {}, LVS {}",
        case_id,
        if output.drc_ok() { "clean" } else { "FAIL" },
        if output.lvs_ok() { "clean" } else { "FAIL" },
    );
    Ok(verdict_code(&output))
}

fn cmd_emit(kb: &KnowledgeBase, intent: &Path, what: &str, out: &Path) -> Result<u8, CliError> {
    let graph = load_graph(intent)?;
    let report = ioring_core::validate_intent_graph(&graph, kb);
    if report.blocks_resolution() {
        eprintln!("intent graph invalid; run `structure` or `verify` for details");
        return Ok(2);
    }
    let layout = match ioring_core::resolve_geometry(&graph, kb) {
        Ok(layout) => layout,
        Err(e) => {
            eprintln!("resolve failed: {}", e);
            return Ok(2);
        }
    };
    let netlist = ioring_core::generate_netlist(&graph, kb);
    let text = match what {
        "script" => ioring_core::emit_script(&layout, &netlist, &graph)?,
        "svg" => ioring_core::emit_svg(&layout, kb),
        "netlist" => ioring_core::emit_netlist_text(&netlist),
        other => return Err(format!("unknown artifact `{}`", other).into()),
    };
    write_atomic(out, &text)?;
    Ok(0)
}

fn cmd_bench(
    cli: &Cli,
    kb: &KnowledgeBase,
    ablation: Ablation,
    seed: u64,
    tier: Option<&str>,
    out: Option<&Path>,
    cases_dir: Option<&Path>,
) -> Result<u8, CliError> {
    let tier = match tier {
        Some(name) => Some(Tier::parse(name).ok_or_else(|| format!("unknown tier `{}`", name))?),
        None => None,
    };
    let report = run_bench_to_dir(seed, tier, ablation, kb, cli.jobs.max(1), cases_dir)
        .map_err(|e| format!("writing case bundles: {}", e))?;
    if let Some(path) = out {
        write_atomic(path, &report.to_json())?;
    }
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_table());
    }
    Ok(0)
}

fn cmd_report(cli: &Cli, input: &Path) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| format!("reading {}: {}", input.display(), e))?;
    let report = BenchReport::from_json(&text)?;
    // Re-derive the table from the per-case results; a hand-edited report
    // with a stale table is reported on the recomputed numbers.
    let table = ioring_core::aggregate_metrics(&report.cases)?;
    let fresh = BenchReport { table, ..report };
    if cli.json {
        println!("{}", fresh.to_json());
    } else {
        print!("{}", fresh.render_table());
    }
    Ok(0)
}
