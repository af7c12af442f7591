//! Corpus assembly: configuration, per-record generation, on-disk layout,
//! statistics and integrity checking.
//!
//! A corpus directory holds `charts/NNNNNN.svg`, `meta/NNNNNN.json`,
//! `descriptions/NNNNNN.txt` (one JSON description per line) and
//! `manifest.json`. Record `i` is generated from its own seed
//! `mix_all(seed, [category, kind, index_in_cell])`, so records can be
//! produced in any order or in isolation.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{load_catalog, perturb_to_trend, sample_series, synth_catalog, Catalog, CatalogError, SampleOptions, MAX_POINTS};
use crate::chartgen::{build_chart_spec, check_meta, render, series_from_meta, ChartKind, ChartMeta};
use crate::narrate::{check_move_order, extract_facts, generate_description_set_n, hallucinated_numbers, PlanConfig, Sentence};
use crate::rng::{mix, mix_all, SplitMix64};
use crate::templatebank::{load_bank, BankError, ChartCategory, TemplateBank};
use crate::trend::{classify_trend_lenient, ClassifierConfig, TrendClass, TrendSpec};

pub const CORPUS_FORMAT_VERSION: u32 = 1;
/// Extra attempts after the first failure of a record.
pub const MAX_RETRIES: u64 = 5;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Bank(#[from] BankError),
    #[error("record {image_index} failed after {attempts} attempts: {last}")]
    Record { image_index: u64, attempts: u64, last: String },
    #[error("output directory {0} is not empty")]
    OutputNotEmpty(PathBuf),
}

type Result<T, E = CorpusError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct KindCounts {
    pub line: u64,
    pub horizontal_bar: u64,
    pub vertical_bar: u64,
    pub scatter: u64,
}

impl KindCounts {
    pub fn get(&self, kind: ChartKind) -> u64 {
        match kind {
            ChartKind::Line => self.line,
            ChartKind::HorizontalBar => self.horizontal_bar,
            ChartKind::VerticalBar => self.vertical_bar,
            ChartKind::Scatter => self.scatter,
        }
    }
}

/// Charts per (category, kind) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CellCounts {
    pub temporal_trend: KindCounts,
    pub temporal_random: KindCounts,
    pub categorical: KindCounts,
}

impl CellCounts {
    pub fn get(&self, category: ChartCategory, kind: ChartKind) -> u64 {
        match category {
            ChartCategory::TemporalTrend => self.temporal_trend.get(kind),
            ChartCategory::TemporalRandom => self.temporal_random.get(kind),
            ChartCategory::Categorical => self.categorical.get(kind),
        }
    }
}

impl Default for CellCounts {
    fn default() -> Self {
        Self {
            temporal_trend: KindCounts { line: 880, horizontal_bar: 480, vertical_bar: 880, scatter: 880 },
            temporal_random: KindCounts { line: 1049, horizontal_bar: 676, vertical_bar: 1049, scatter: 1049 },
            categorical: KindCounts { line: 951, horizontal_bar: 436, vertical_bar: 951, scatter: 951 },
        }
    }
}

/// Where statistical data comes from: a catalog file or `synthetic(indicators, entities)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CatalogSource {
    Synthetic { indicators: usize, entities: usize },
    File(PathBuf),
}

impl Default for CatalogSource {
    fn default() -> Self {
        CatalogSource::Synthetic { indicators: 346, entities: 76 }
    }
}

impl FromStr for CatalogSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("synthetic(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if let [a, b] = parts[..] {
                let n = |p: &str| p.parse::<usize>().map_err(|_| format!("bad count `{p}` in `{s}`"));
                return Ok(CatalogSource::Synthetic { indicators: n(a)?, entities: n(b)? });
            }
            return Err(format!("expected synthetic(indicators, entities), found `{s}`"));
        }
        if t.is_empty() {
            return Err("empty catalog source".into());
        }
        Ok(CatalogSource::File(PathBuf::from(t)))
    }
}

impl TryFrom<String> for CatalogSource {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<CatalogSource> for String {
    fn from(c: CatalogSource) -> String {
        c.to_string()
    }
}

impl fmt::Display for CatalogSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogSource::Synthetic { indicators, entities } => write!(f, "synthetic({indicators}, {entities})"),
            CatalogSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn three() -> u32 {
    3
}
fn two_series_default() -> f64 {
    0.3
}
fn half() -> f64 {
    0.5
}
fn default_output() -> PathBuf {
    PathBuf::from("corpus")
}

/// Corpus generation settings, read from TOML. See `crates/cli/corpus.example.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Not echoed into the manifest, so corpora written to different places compare equal.
    #[serde(default = "default_output", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default = "one")]
    pub count_scale: f64,
    #[serde(default)]
    pub cells: CellCounts,
    #[serde(default)]
    pub catalog: CatalogSource,
    /// Bank file; the bundled bank when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_bank: Option<PathBuf>,
    #[serde(default = "three")]
    pub descriptions_per_chart: u32,
    /// Chance that a chart plots two series instead of one.
    #[serde(default = "two_series_default")]
    pub two_series_probability: f64,
    /// Chance that a temporal-random chart keeps its sampled data unperturbed.
    #[serde(default = "half")]
    pub raw_random_probability: f64,
    #[serde(default)]
    pub generator: PlanConfig,
}

impl CorpusConfig {
    /// Default grid and settings with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        toml::from_str(&format!("seed = {seed}")).expect("minimal config parses")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CorpusError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CorpusError::Config(m));
        if !(self.count_scale.is_finite() && self.count_scale > 0.0) {
            return bad(format!("count_scale must be positive, got {}", self.count_scale));
        }
        for (name, p) in [
            ("two_series_probability", self.two_series_probability),
            ("raw_random_probability", self.raw_random_probability),
            ("generator.m2_probability", self.generator.m2_probability),
            ("generator.m4_probability", self.generator.m4_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.descriptions_per_chart == 0 {
            return bad("descriptions_per_chart must be at least 1".into());
        }
        let g = &self.generator;
        if g.m3_min == 0 || g.m3_min > g.m3_max || g.m31_min == 0 || g.m31_min > g.m31_max {
            return bad("generator counts need 1 <= min <= max for m3 and m31".into());
        }
        Ok(())
    }

    /// Scaled count of a cell: exact at scale 1, otherwise floored with a minimum of 1 for non-empty cells.
    pub fn scaled_count(&self, category: ChartCategory, kind: ChartKind) -> u64 {
        scale_count(self.cells.get(category, kind), self.count_scale)
    }
}

pub fn scale_count(count: u64, scale: f64) -> u64 {
    if count == 0 {
        0
    } else if scale == 1.0 {
        count
    } else {
        ((count as f64 * scale).floor() as u64).max(1)
    }
}

/// Position of a record in the cell grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordSlot {
    pub image_index: u64,
    pub category: ChartCategory,
    pub kind: ChartKind,
    pub index_in_cell: u64,
}

fn category_index(c: ChartCategory) -> u64 {
    ChartCategory::ALL.iter().position(|x| *x == c).unwrap() as u64
}

fn kind_index(k: ChartKind) -> u64 {
    ChartKind::ALL.iter().position(|x| *x == k).unwrap() as u64
}

pub fn record_seed(global: u64, category: ChartCategory, kind: ChartKind, index_in_cell: u64) -> u64 {
    mix_all(global, &[category_index(category), kind_index(kind), index_in_cell])
}

/// Seed of attempt `k`; attempt 0 uses the record seed itself.
pub fn attempt_seed(record_seed: u64, attempt: u64) -> u64 {
    if attempt == 0 {
        record_seed
    } else {
        mix(record_seed, attempt)
    }
}

/// Records in image-index order: categories, then kinds, then index within the cell.
pub fn record_slots(cfg: &CorpusConfig) -> Vec<RecordSlot> {
    let mut out = Vec::new();
    for category in ChartCategory::ALL {
        for kind in ChartKind::ALL {
            for index_in_cell in 0..cfg.scaled_count(category, kind) {
                out.push(RecordSlot { image_index: out.len() as u64, category, kind, index_in_cell });
            }
        }
    }
    out
}

pub fn index_name(image_index: u64) -> String {
    format!("{image_index:06}")
}

/// One line of a descriptions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptionRecord {
    pub image_index: u64,
    pub variant_index: u32,
    pub sentences: Vec<Sentence>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub image_index: u64,
    pub chart: String,
    pub meta: String,
    pub descriptions: String,
    pub category: ChartCategory,
    pub kind: ChartKind,
    pub trend_classes: Vec<TrendClass>,
    pub record_seed: u64,
    pub attempt: u64,
    pub description_count: usize,
}

/// File contents of one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordFiles {
    pub svg: String,
    pub meta_json: String,
    pub descriptions_jsonl: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSummary {
    pub category: ChartCategory,
    pub kind: ChartKind,
    pub charts: u64,
    pub descriptions: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub config: CorpusConfig,
    pub cells: Vec<CellSummary>,
    pub total_charts: u64,
    pub total_descriptions: u64,
    pub records: Vec<CorpusRecord>,
}

/// Loaded inputs shared by every record.
pub struct Generator {
    config: CorpusConfig,
    catalog: Catalog,
    bank: TemplateBank,
    slots: Vec<RecordSlot>,
}

const PERTURB_RANDOM: [TrendClass; 2] = [TrendClass::RandomFluctuation, TrendClass::Plateau];

impl Generator {
    pub fn new(config: CorpusConfig) -> Result<Self> {
        config.validate()?;
        let catalog = match &config.catalog {
            CatalogSource::Synthetic { indicators, entities } => synth_catalog(config.seed, *indicators, *entities)?,
            CatalogSource::File(p) => load_catalog(p)?,
        };
        let bank = match &config.template_bank {
            Some(p) => load_bank(p)?,
            None => TemplateBank::bundled(),
        };
        let slots = record_slots(&config);
        Ok(Self { config, catalog, bank, slots })
    }

    pub fn config(&self) -> &CorpusConfig {
        &self.config
    }

    pub fn slots(&self) -> &[RecordSlot] {
        &self.slots
    }

    /// Builds record `image_index`, retrying with derived seeds on failure.
    pub fn record(&self, image_index: u64) -> Result<(CorpusRecord, RecordFiles)> {
        let slot = *self.slots.get(image_index as usize).ok_or_else(|| {
            CorpusError::Config(format!("image index {image_index} outside the corpus of {}", self.slots.len()))
        })?;
        let seed = record_seed(self.config.seed, slot.category, slot.kind, slot.index_in_cell);
        let mut last = String::new();
        for attempt in 0..=MAX_RETRIES {
            match self.try_record(slot, attempt_seed(seed, attempt)) {
                Ok((mut record, files)) => {
                    record.record_seed = seed;
                    record.attempt = attempt;
                    return Ok((record, files));
                }
                Err(e) => {
                    log::warn!("record {image_index} attempt {attempt}: {e}");
                    last = e;
                }
            }
        }
        Err(CorpusError::Record { image_index, attempts: MAX_RETRIES + 1, last })
    }

    fn try_record(&self, slot: RecordSlot, seed: u64) -> std::result::Result<(CorpusRecord, RecordFiles), String> {
        let cfg = &self.config;
        let mut rng = SplitMix64::new(seed);
        let temporal = slot.category.is_temporal();
        let arity = if rng.chance(cfg.two_series_probability) { 2 } else { 1 };
        let opts = SampleOptions { min_len: if temporal { 5 } else { 3 }, max_len: MAX_POINTS };
        let mut sample = sample_series(&self.catalog, temporal, arity, opts, &mut rng).map_err(|e| e.to_string())?;

        let perturb = |s: &crate::catalog::DataSeries, class: TrendClass, rng: &mut SplitMix64| {
            perturb_to_trend(s, &TrendSpec::preset(class, s.y_values.len()), rng).map_err(|e| e.to_string())
        };
        match slot.category {
            ChartCategory::TemporalTrend => {
                let focal = TrendClass::DIRECTIONAL[(slot.index_in_cell % 6) as usize];
                sample.series[0] = perturb(&sample.series[0], focal, &mut rng)?;
                for i in 1..sample.series.len() {
                    let class = *rng.pick(&TrendClass::DIRECTIONAL);
                    sample.series[i] = perturb(&sample.series[i], class, &mut rng)?;
                }
            }
            ChartCategory::TemporalRandom => {
                let raw = rng.chance(cfg.raw_random_probability);
                let focal = classify_trend_lenient(&sample.series[0].y_values, &ClassifierConfig::default()).map_err(|e| e.to_string())?;
                // Raw data whose focal series has a direction would be described as a trend chart.
                if !raw || focal.is_directional() {
                    for i in 0..sample.series.len() {
                        let class = *rng.pick(&PERTURB_RANDOM);
                        sample.series[i] = perturb(&sample.series[i], class, &mut rng)?;
                    }
                }
            }
            ChartCategory::Categorical => {}
        }

        let spec = build_chart_spec(&sample, slot.kind, slot.image_index, &mut rng).map_err(|e| e.to_string())?;
        let (svg, meta) = render(&spec).map_err(|e| e.to_string())?;
        let problems = check_meta(&meta);
        if !problems.is_empty() {
            return Err(problems.join("; "));
        }
        let series = series_from_meta(&meta);
        let descs = generate_description_set_n(&meta, &series, &self.bank, cfg.descriptions_per_chart, &mut rng, &cfg.generator)
            .map_err(|e| e.to_string())?;

        let name = index_name(slot.image_index);
        let mut meta_json = serde_json::to_string_pretty(&meta).map_err(|e| e.to_string())?;
        meta_json.push('\n');
        let mut descriptions_jsonl = String::new();
        for d in &descs {
            let rec = DescriptionRecord { image_index: d.image_index, variant_index: d.variant_index, text: d.text(), sentences: d.sentences.clone() };
            descriptions_jsonl.push_str(&serde_json::to_string(&rec).map_err(|e| e.to_string())?);
            descriptions_jsonl.push('\n');
        }
        let record = CorpusRecord {
            image_index: slot.image_index,
            chart: format!("charts/{name}.svg"),
            meta: format!("meta/{name}.json"),
            descriptions: format!("descriptions/{name}.txt"),
            category: slot.category,
            kind: slot.kind,
            trend_classes: meta.series.iter().map(|s| s.trend_class).collect(),
            record_seed: seed,
            attempt: 0,
            description_count: descs.len(),
        };
        Ok((record, RecordFiles { svg, meta_json, descriptions_jsonl }))
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn cell_summaries(records: &[CorpusRecord]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    for category in ChartCategory::ALL {
        for kind in ChartKind::ALL {
            let rs = records.iter().filter(|r| r.category == category && r.kind == kind);
            let (charts, descriptions) = rs.fold((0, 0), |(c, d), r| (c + 1, d + r.description_count as u64));
            out.push(CellSummary { category, kind, charts, descriptions });
        }
    }
    out
}

/// Generates the whole corpus into `config.output_dir` using `jobs` worker threads (all cores when `None`).
pub fn generate_corpus(config: &CorpusConfig, jobs: Option<usize>) -> Result<Manifest> {
    let out = config.output_dir.clone();
    if out.exists() && std::fs::read_dir(&out).map_err(io_err(&out))?.next().is_some() {
        return Err(CorpusError::OutputNotEmpty(out));
    }
    let generator = Generator::new(config.clone())?;
    for sub in ["charts", "meta", "descriptions"] {
        let d = out.join(sub);
        std::fs::create_dir_all(&d).map_err(io_err(&d))?;
    }
    let work = || -> Result<Vec<CorpusRecord>> {
        generator
            .slots()
            .par_iter()
            .map(|slot| {
                let (record, files) = generator.record(slot.image_index)?;
                write_file(&out.join(&record.chart), &files.svg)?;
                write_file(&out.join(&record.meta), &files.meta_json)?;
                write_file(&out.join(&record.descriptions), &files.descriptions_jsonl)?;
                Ok(record)
            })
            .collect()
    };
    let records = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CorpusError::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let cells = cell_summaries(&records);
    let manifest = Manifest {
        format_version: CORPUS_FORMAT_VERSION,
        config: config.clone(),
        total_charts: records.len() as u64,
        total_descriptions: records.iter().map(|r| r.description_count as u64).sum(),
        cells,
        records,
    };
    let path = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|source| CorpusError::Json { path: path.clone(), source })?;
    text.push('\n');
    write_file(&path, &text)?;
    Ok(manifest)
}

/// Regenerates the three files of one record without touching the rest of the corpus.
pub fn regenerate_record(config: &CorpusConfig, image_index: u64) -> Result<RecordFiles> {
    Ok(Generator::new(config.clone())?.record(image_index)?.1)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|source| CorpusError::Json { path, source })
}

/// Chart and description counts on the category by kind grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub cells: Vec<CellSummary>,
    pub total_charts: u64,
    pub total_descriptions: u64,
}

impl CorpusStats {
    pub fn from_manifest(m: &Manifest) -> Self {
        let mut cells = Vec::new();
        for category in ChartCategory::ALL {
            for kind in ChartKind::ALL {
                let found = m.cells.iter().find(|c| c.category == category && c.kind == kind);
                cells.push(found.cloned().unwrap_or(CellSummary { category, kind, charts: 0, descriptions: 0 }));
            }
        }
        Self { total_charts: cells.iter().map(|c| c.charts).sum(), total_descriptions: cells.iter().map(|c| c.descriptions).sum(), cells }
    }

    pub fn charts(&self, category: ChartCategory, kind: ChartKind) -> u64 {
        self.cells.iter().find(|c| c.category == category && c.kind == kind).map_or(0, |c| c.charts)
    }

    pub fn kind_total(&self, kind: ChartKind) -> u64 {
        self.cells.iter().filter(|c| c.kind == kind).map(|c| c.charts).sum()
    }

    fn row(&self, category: ChartCategory) -> (u64, u64) {
        self.cells.iter().filter(|c| c.category == category).fold((0, 0), |(a, b), c| (a + c.charts, b + c.descriptions))
    }
}

pub fn stats(dir: &Path) -> Result<CorpusStats> {
    Ok(CorpusStats::from_manifest(&load_manifest(dir)?))
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<12}", "")?;
        for k in ChartKind::ALL {
            write!(f, " {:>15}", k.as_str())?;
        }
        writeln!(f, " {:>8} {:>13}", "charts", "descriptions")?;
        for (label, cat) in [("trend", ChartCategory::TemporalTrend), ("random", ChartCategory::TemporalRandom), ("categorical", ChartCategory::Categorical)] {
            write!(f, "{label:<12}")?;
            for k in ChartKind::ALL {
                write!(f, " {:>15}", self.charts(cat, k))?;
            }
            let (c, d) = self.row(cat);
            writeln!(f, " {c:>8} {d:>13}")?;
        }
        write!(f, "{:<12}", "total")?;
        for k in ChartKind::ALL {
            write!(f, " {:>15}", self.kind_total(k))?;
        }
        writeln!(f, " {:>8} {:>13}", self.total_charts, self.total_descriptions)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub image_index: Option<u64>,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.image_index {
            Some(i) => write!(f, "[{}] {}: {}", index_name(i), self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub records_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records with at least one violation.
    pub fn flagged_records(&self) -> BTreeSet<u64> {
        self.violations.iter().filter_map(|v| v.image_index).collect()
    }

    fn push(&mut self, image_index: Option<u64>, path: &str, message: impl Into<String>) {
        self.violations.push(Violation { image_index, path: path.to_string(), message: message.into() });
    }
}

fn check_svg(dir: &Path, r: &CorpusRecord, report: &mut ValidationReport) {
    let i = Some(r.image_index);
    match std::fs::read_to_string(dir.join(&r.chart)) {
        Err(e) => report.push(i, &r.chart, format!("unreadable: {e}")),
        Ok(svg) => {
            if !svg.starts_with("<svg") || !svg.trim_end().ends_with("</svg>") {
                report.push(i, &r.chart, "not a complete SVG document");
            }
        }
    }
}

fn check_descriptions(dir: &Path, r: &CorpusRecord, meta: Option<&ChartMeta>, report: &mut ValidationReport) {
    let i = Some(r.image_index);
    let path = r.descriptions.as_str();
    let text = match std::fs::read_to_string(dir.join(path)) {
        Ok(t) => t,
        Err(e) => return report.push(i, path, format!("unreadable: {e}")),
    };
    let facts = meta.and_then(|m| extract_facts(m, &series_from_meta(m)).ok());
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() {
        report.push(i, path, "no descriptions");
    }
    if lines.len() != r.description_count {
        report.push(i, path, format!("{} descriptions, manifest says {}", lines.len(), r.description_count));
    }
    for (n, line) in lines.iter().enumerate() {
        let d: DescriptionRecord = match serde_json::from_str(line) {
            Ok(d) => d,
            Err(e) => {
                report.push(i, path, format!("line {}: {e}", n + 1));
                continue;
            }
        };
        let at = |m: String| format!("line {}: {m}", n + 1);
        if d.image_index != r.image_index {
            report.push(i, path, at(format!("image_index {}", d.image_index)));
        }
        if d.variant_index as usize != n {
            report.push(i, path, at(format!("variant_index {}", d.variant_index)));
        }
        let joined = d.sentences.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ");
        if joined != d.text {
            report.push(i, path, at("text differs from its sentences".into()));
        }
        if d.text.contains('{') || d.text.contains('}') || joined.contains('{') || joined.contains('}') {
            report.push(i, path, at("residual slot marker".into()));
        }
        let tags: Vec<_> = d.sentences.iter().map(|s| s.move_tag).collect();
        if let Err(e) = check_move_order(&tags) {
            report.push(i, path, at(format!("move order: {e}")));
        }
        if let Some(f) = &facts {
            let bad = hallucinated_numbers(&joined, f);
            if !bad.is_empty() {
                report.push(i, path, at(format!("numbers not in the chart: {}", bad.join(", "))));
            }
        }
    }
}

fn list_dir(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

/// Re-checks every record of the corpus at `dir`; never stops at the first problem.
pub fn validate_corpus(dir: &Path) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = match load_manifest(dir) {
        Ok(m) => m,
        Err(e) => {
            report.push(None, MANIFEST_FILE, e.to_string());
            return report;
        }
    };
    let recomputed = cell_summaries(&m.records);
    if recomputed != m.cells {
        report.push(None, MANIFEST_FILE, "cell counts disagree with the record list");
    }
    if m.total_charts != m.records.len() as u64 {
        report.push(None, MANIFEST_FILE, format!("total_charts {} for {} records", m.total_charts, m.records.len()));
    }
    let descs: u64 = m.records.iter().map(|r| r.description_count as u64).sum();
    if m.total_descriptions != descs {
        report.push(None, MANIFEST_FILE, format!("total_descriptions {} but records sum to {descs}", m.total_descriptions));
    }
    for (sub, ext, pick) in [
        ("charts", "svg", (|r: &CorpusRecord| r.chart.clone()) as fn(&CorpusRecord) -> String),
        ("meta", "json", |r| r.meta.clone()),
        ("descriptions", "txt", |r| r.descriptions.clone()),
    ] {
        let expected: BTreeSet<String> = m.records.iter().map(pick).collect();
        for name in list_dir(&dir.join(sub)) {
            let rel = format!("{sub}/{name}");
            if !expected.contains(&rel) {
                report.push(None, &rel, format!("not listed in the manifest (expected .{ext} records only)"));
            }
        }
    }
    for (pos, r) in m.records.iter().enumerate() {
        report.records_checked += 1;
        let i = Some(r.image_index);
        if r.image_index != pos as u64 {
            report.push(i, MANIFEST_FILE, format!("record at position {pos} has image_index {}", r.image_index));
        }
        check_svg(dir, r, &mut report);
        let meta = match std::fs::read_to_string(dir.join(&r.meta)) {
            Err(e) => {
                report.push(i, &r.meta, format!("unreadable: {e}"));
                None
            }
            Ok(t) => match serde_json::from_str::<ChartMeta>(&t) {
                Err(e) => {
                    report.push(i, &r.meta, format!("malformed: {e}"));
                    None
                }
                Ok(meta) => {
                    if meta.image_index != r.image_index {
                        report.push(i, &r.meta, format!("image_index {}", meta.image_index));
                    }
                    if meta.chart_kind != r.kind {
                        report.push(i, &r.meta, format!("chart kind {} but manifest says {}", meta.chart_kind, r.kind));
                    }
                    for p in check_meta(&meta) {
                        report.push(i, &r.meta, p);
                    }
                    Some(meta)
                }
            },
        };
        check_descriptions(dir, r, meta.as_ref(), &mut report);
    }
    report
}
