use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;

use chartcorpus::catalog::{load_catalog, synth_catalog};
use chartcorpus::chartgen::{series_from_meta, ChartKind, ChartMeta};
use chartcorpus::corpus::{self, CatalogSource, CorpusConfig, DescriptionRecord, Manifest, MANIFEST_FILE};
use chartcorpus::evalmetrics::{corpus_report, overall_report, score_pair, RougeVariant};
use chartcorpus::narrate::{baseline_generate, generate_description};
use chartcorpus::rng::SplitMix64;
use chartcorpus::templatebank::{load_bank, TemplateBank};

#[derive(Parser)]
#[command(name = "chartcorpus", version, about = "Synthetic chart corpus generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus from a TOML config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count_scale: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the chart and description grid of a corpus.
    Stats { dir: PathBuf },
    /// Re-check every record of a corpus; exits nonzero on any violation.
    Validate { dir: PathBuf },
    /// Describe one chart from its meta file.
    Describe {
        #[arg(long)]
        meta: PathBuf,
        /// Template bank; the bundled bank when omitted.
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Use the unstructured baseline generator.
        #[arg(long)]
        baseline: bool,
        /// Print the description as JSON with move tags.
        #[arg(long)]
        json: bool,
    },
    /// Score hypothesis descriptions against references.
    Eval {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Corpus directory or manifest used to group scores by chart kind.
        #[arg(long)]
        by_kind: Option<PathBuf>,
        #[arg(long, default_value = "rouge-l")]
        rouge: RougeVariant,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect a statistics catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Print the move census of a template bank.
    Bank {
        #[arg(long)]
        bank: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Counts of indicators, entities, observations and covered years.
    Stats {
        #[arg(long, default_value = "synthetic(346, 76)")]
        source: CatalogSource,
        /// Seed for synthetic catalogs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn bank(path: Option<&Path>) -> Result<TemplateBank> {
    Ok(match path {
        Some(p) => load_bank(p)?,
        None => TemplateBank::bundled(),
    })
}

#[derive(Deserialize)]
struct TextLine {
    image_index: u64,
    text: String,
}

fn read_lines(path: &Path) -> Result<BTreeMap<u64, Vec<String>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let l: TextLine = serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), n + 1))?;
        out.entry(l.image_index).or_default().push(l.text);
    }
    Ok(out)
}

fn manifest_at(path: &Path) -> Result<Manifest> {
    let file = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { config, seed, count_scale, jobs, out } => {
            let mut cfg = CorpusConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(c) = count_scale {
                cfg.count_scale = c;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let manifest = corpus::generate_corpus(&cfg, jobs)?;
            print!("{}", corpus::CorpusStats::from_manifest(&manifest));
            eprintln!("wrote {}", cfg.output_dir.display());
        }
        Command::Stats { dir } => print!("{}", corpus::stats(&dir)?),
        Command::Validate { dir } => {
            let report = corpus::validate_corpus(&dir);
            for v in &report.violations {
                println!("{v}");
            }
            println!("{} records checked, {} violations", report.records_checked, report.violations.len());
            if !report.is_clean() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Describe { meta, bank: bank_path, seed, baseline, json } => {
            let text = std::fs::read_to_string(&meta).with_context(|| format!("reading {}", meta.display()))?;
            let m: ChartMeta = serde_json::from_str(&text).with_context(|| format!("parsing {}", meta.display()))?;
            let b = bank(bank_path.as_deref())?;
            let series = series_from_meta(&m);
            let mut rng = SplitMix64::new(seed);
            let d = if baseline { baseline_generate(&m, &series, &b, &mut rng)? } else { generate_description(&m, &series, &b, 0, &mut rng)? };
            if json {
                let rec = DescriptionRecord { image_index: d.image_index, variant_index: d.variant_index, text: d.text(), sentences: d.sentences };
                println!("{}", serde_json::to_string_pretty(&rec)?);
            } else {
                for s in &d.sentences {
                    println!("{:<5} {}", s.move_tag.as_str(), s.text);
                }
            }
        }
        Command::Eval { hyp, reference, by_kind, rouge, out } => {
            let hyps = read_lines(&hyp)?;
            let refs = read_lines(&reference)?;
            let kinds: Option<BTreeMap<u64, ChartKind>> =
                by_kind.map(|p| manifest_at(&p).map(|m| m.records.iter().map(|r| (r.image_index, r.kind)).collect())).transpose()?;
            let mut pairs = Vec::new();
            for (idx, hs) in &hyps {
                let Some(rs) = refs.get(idx) else { bail!("no reference for image_index {idx}") };
                let rs: Vec<&str> = rs.iter().map(String::as_str).collect();
                for h in hs {
                    let kind = match &kinds {
                        Some(k) => Some(*k.get(idx).with_context(|| format!("image_index {idx} not in the manifest"))?),
                        None => None,
                    };
                    pairs.push((kind, score_pair(h, &rs)?.scores));
                }
            }
            let report = match kinds {
                Some(_) => corpus_report(&pairs.iter().map(|(k, s)| (k.unwrap(), *s)).collect::<Vec<_>>(), rouge)?,
                None => overall_report(&pairs.iter().map(|(_, s)| *s).collect::<Vec<_>>(), rouge)?,
            };
            print!("{report}");
            if let Some(o) = out {
                std::fs::write(&o, serde_json::to_string_pretty(&report)? + "\n").with_context(|| format!("writing {}", o.display()))?;
            }
        }
        Command::Catalog { command: CatalogCommand::Stats { source, seed } } => {
            let cat = match source {
                CatalogSource::Synthetic { indicators, entities } => synth_catalog(seed, indicators, entities)?,
                CatalogSource::File(p) => load_catalog(&p)?,
            };
            print!("{}", cat.stats());
        }
        Command::Bank { bank: path } => print!("{}", bank(path.as_deref())?.census()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
