//! `cvsynth`: the staged batch pipeline.
//!
//! ```text
//! cvsynth mock-corpus --out corpus --seed 7
//! cvsynth build-tables --seed 7
//! cvsynth enumerate --seed 7
//! cvsynth generate --seed 7
//! cvsynth validate --seed 7
//! ```
//!
//! Exit codes: 0 success, 1 validation thresholds or audits failed, 2 bad
//! input or configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use cvsynth_core::config::RunConfig;
use cvsynth_core::contentgen::{
    enumerate_plausible_params, generate_batch, read_dataset, write_dataset, CountPolicy, GenerationContext,
    PlausibleCombination, MANIFEST_FILE,
};
use cvsynth_core::corpus::io::{load_corpus, write_raw_dir, write_raw_jsonl, IngestOptions};
use cvsynth_core::mock::{generate_mock_corpus, MockCorpusSpec};
use cvsynth_core::render::render_dataset;
use cvsynth_core::similarity::resolve_provider;
use cvsynth_core::structgen::CombineStrategy;
use cvsynth_core::tables::{IntermediateTables, TablePaths};
use cvsynth_core::validate::{build_report, emit_report, render_text};

const PARAMS_FILE: &str = "params.json";
const REPORT_JSON: &str = "generation_report.json";
const REPORT_TEXT: &str = "generation_report.txt";

#[derive(Parser)]
#[command(name = "cvsynth", version, about = "Privacy-preserving synthetic CV generation")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every stage. Flags override the config file.
#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (mandatory unless the config file sets it)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Reference corpus: a directory of CV JSON files or a JSON-lines file
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,

    /// Directory holding the intermediate tables
    #[arg(long, global = true)]
    tables: Option<PathBuf>,

    /// Directory for the enumerated parameters and the generated dataset
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Directory for validation reports
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Directory for Markdown renderings
    #[arg(long, global = true)]
    rendered: Option<PathBuf>,

    /// Smallest reference group a combination may be generated from
    #[arg(long, global = true)]
    min_group: Option<usize>,

    /// Parallel generation attempts
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded mock reference corpus
    MockCorpus {
        /// Output directory (or file with --jsonl)
        #[arg(long)]
        out: PathBuf,
        /// Number of mock CVs
        #[arg(long)]
        total: Option<usize>,
        /// JSON corpus spec; defaults to the built-in one
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Write a single JSON-lines file instead of a directory
        #[arg(long)]
        jsonl: bool,
    },
    /// Build the intermediate tables from the reference corpus
    BuildTables,
    /// List the parameter combinations with enough reference CVs
    Enumerate,
    /// Run one generation attempt per enumerated combination
    Generate {
        /// CVs requested per combination
        #[arg(long, conflicts_with = "group_fraction")]
        per_combo_count: Option<usize>,
        /// Request this fraction of each combination's reference group instead
        #[arg(long)]
        group_fraction: Option<f64>,
        /// How per-parameter section sizes are combined: mean, median, min, max or random
        #[arg(long)]
        combine_strategy: Option<CombineStrategy>,
        /// Most skills listed per CV
        #[arg(long)]
        skills_cap: Option<usize>,
    },
    /// Compare the generated dataset with the reference corpus
    Validate,
    /// Render the generated dataset as Markdown
    Render,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(cvsynth_core::Error::InvalidRecords(diags)) = e.downcast_ref::<cvsynth_core::Error>() {
                for d in diags {
                    eprintln!("  {d}");
                }
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Command::MockCorpus {
        out,
        total,
        spec,
        jsonl,
    } = &cli.command
    {
        return mock_corpus(&cli.common, out, *total, spec.as_deref(), *jsonl);
    }
    let cfg = resolve_config(&cli.common)?;
    match cli.command {
        Command::MockCorpus { .. } => unreachable!("handled above"),
        Command::BuildTables => build_tables(&cfg),
        Command::Enumerate => enumerate(&cfg),
        Command::Generate {
            per_combo_count,
            group_fraction,
            combine_strategy,
            skills_cap,
        } => {
            let mut cfg = cfg;
            if let Some(n) = per_combo_count {
                cfg.generation.count = CountPolicy::Fixed(n);
            }
            if let Some(f) = group_fraction {
                cfg.generation.count = CountPolicy::GroupFraction(f);
            }
            if let Some(s) = combine_strategy {
                cfg.generation.strategy = s;
            }
            if let Some(c) = skills_cap {
                cfg.generation.skills_cap = c;
            }
            cfg.check()?;
            generate(&cfg)
        }
        Command::Validate => validate(&cfg),
        Command::Render => render(&cfg),
    }
}

fn resolve_config(common: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = match (&common.config, common.seed) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(seed)) => RunConfig::new(seed),
        (None, None) => bail!("a master seed is required: pass --seed or a --config file"),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    let paths = &mut cfg.paths;
    for (flag, slot) in [
        (&common.corpus, &mut paths.corpus),
        (&common.tables, &mut paths.tables),
        (&common.output, &mut paths.output),
        (&common.report, &mut paths.report),
        (&common.rendered, &mut paths.rendered),
    ] {
        if let Some(p) = flag {
            *slot = p.clone();
        }
    }
    if let Some(m) = common.min_group {
        cfg.generation.min_group = m;
    }
    if common.workers.is_some() {
        cfg.workers = common.workers;
    }
    cfg.check()?;
    Ok(cfg)
}

fn ingest_options(cfg: &RunConfig) -> IngestOptions {
    IngestOptions {
        now: cfg.generation.now,
        ..IngestOptions::default()
    }
}

fn load_tables(cfg: &RunConfig) -> anyhow::Result<IntermediateTables> {
    IntermediateTables::load(&TablePaths::in_dir(&cfg.paths.tables)).with_context(|| {
        format!(
            "cannot load tables from {}; run `cvsynth build-tables` first",
            cfg.paths.tables.display()
        )
    })
}

fn mock_corpus(
    common: &Common,
    out: &Path,
    total: Option<usize>,
    spec: Option<&Path>,
    jsonl: bool,
) -> anyhow::Result<ExitCode> {
    let mut spec: MockCorpusSpec = match spec {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => MockCorpusSpec::default(),
    };
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    if let Some(n) = total {
        spec.total = n;
    }
    let records = generate_mock_corpus(&spec)?;
    if jsonl {
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        write_raw_jsonl(&records, out)?;
    } else {
        write_raw_dir(&records, out)?;
    }
    println!(
        "wrote {} mock CVs (seed {}) to {}",
        records.len(),
        spec.seed,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn build_tables(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let corpus = load_corpus(&cfg.paths.corpus, &ingest_options(cfg))
        .with_context(|| format!("loading corpus {}", cfg.paths.corpus.display()))?;
    let resolved = resolve_provider(&cfg.provider, |k| std::env::var(k).ok());
    if let Some(why) = &resolved.fallback {
        eprintln!("warning: using the lexical similarity provider: {why}");
    }
    let tables = IntermediateTables::build(&corpus, &cfg.tables, resolved.provider.as_ref(), cfg.master_seed)?;
    tables.save(&TablePaths::in_dir(&cfg.paths.tables))?;
    println!(
        "{} CVs -> {} anonymized, {} combinations, {} named-entity groups, {} degree groups, {} role groups ({})",
        corpus.len(),
        tables.anonymized.len(),
        tables.combinations.len(),
        tables.named_entities.len(),
        tables.skill_relevance.degree_to_skill.len(),
        tables.skill_relevance.role_to_skill.len(),
        cfg.paths.tables.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn enumerate(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let tables = load_tables(cfg)?;
    let found = enumerate_plausible_params(&tables.anonymized, cfg.generation.min_group);
    for c in &found {
        println!("{:5}  {}", c.reference_count, c.params);
    }
    fs::create_dir_all(&cfg.paths.output)?;
    let path = cfg.paths.output.join(PARAMS_FILE);
    fs::write(&path, serde_json::to_string_pretty(&found)? + "\n")?;
    println!(
        "{} combinations with at least {} reference CVs -> {}",
        found.len(),
        cfg.generation.min_group,
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Remove a previous run's dataset so stale CVs never survive a rerun.
fn clear_dataset(dir: &Path) -> anyhow::Result<()> {
    let cvs = dir.join("cvs");
    if cvs.exists() {
        fs::remove_dir_all(&cvs)?;
    }
    for f in [MANIFEST_FILE, REPORT_JSON, REPORT_TEXT] {
        let p = dir.join(f);
        if p.exists() {
            fs::remove_file(p)?;
        }
    }
    Ok(())
}

fn generate(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let tables = load_tables(cfg)?;
    let params_path = cfg.paths.output.join(PARAMS_FILE);
    let text = fs::read_to_string(&params_path)
        .with_context(|| format!("cannot read {}; run `cvsynth enumerate` first", params_path.display()))?;
    let plan: Vec<PlausibleCombination> = serde_json::from_str(&text)?;
    let combos: Vec<_> = plan.into_iter().map(|c| c.params).collect();

    let resolved = resolve_provider(&cfg.provider, |k| std::env::var(k).ok());
    let ctx = GenerationContext::new(&tables, resolved.provider.as_ref(), &cfg.generation)?;
    let mut batch = generate_batch(&ctx, &combos, cfg.master_seed, cfg.workers)?;
    batch.report.provider_fallback = resolved.fallback.clone();
    batch.report.config = serde_json::to_value(cfg)?;

    let out = &cfg.paths.output;
    clear_dataset(out)?;
    write_dataset(out, &batch.cvs)?;
    fs::write(
        out.join(REPORT_JSON),
        serde_json::to_string_pretty(&batch.report)? + "\n",
    )?;
    fs::write(out.join(REPORT_TEXT), batch.report.render_text())?;
    if cfg.paths.rendered.exists() {
        fs::remove_dir_all(&cfg.paths.rendered)?;
    }
    render_dataset(&batch.cvs, &cfg.paths.rendered)?;

    let t = &batch.report.totals;
    println!(
        "{} combinations: produced {}/{} CVs in {} attempts -> {}",
        t.combinations,
        t.produced,
        t.requested,
        t.attempts,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn validate(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let corpus = load_corpus(&cfg.paths.corpus, &ingest_options(cfg))
        .with_context(|| format!("loading corpus {}", cfg.paths.corpus.display()))?;
    let tables = load_tables(cfg)?;
    let synthetic = read_dataset(&cfg.paths.output, &ingest_options(cfg)).with_context(|| {
        format!(
            "reading dataset {}; run `cvsynth generate` first",
            cfg.paths.output.display()
        )
    })?;
    if synthetic.is_empty() {
        bail!("the synthetic dataset in {} is empty", cfg.paths.output.display());
    }
    let report = build_report(&corpus, &synthetic, &tables.combinations, &cfg.validation)?;
    emit_report(&report, &cfg.paths.report)?;
    print!("{}", render_text(&report));
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn render(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let synthetic = read_dataset(&cfg.paths.output, &ingest_options(cfg))
        .with_context(|| format!("reading dataset {}", cfg.paths.output.display()))?;
    render_dataset(&synthetic, &cfg.paths.rendered)?;
    println!("rendered {} CVs -> {}", synthetic.len(), cfg.paths.rendered.display());
    Ok(ExitCode::SUCCESS)
}
