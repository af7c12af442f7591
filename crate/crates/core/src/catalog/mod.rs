//! Indicator/entity statistics: ingest, synthesis, sampling, and trend perturbation.
//!
//! A catalog on disk is two comma-separated files. The data file
//! (`<name>.csv`) has the header `indicator_id,entity_id,year,value`; the
//! companion dictionary (`<name>.dict.csv`) has the header
//! `record,id,name,unit,kind` and one row per indicator
//! (`indicator,<id>,<name>,<unit>,<value kind>`) or entity
//! (`entity,<id>,<name>,,<entity kind>`). Both files may start with a
//! `# catalog-format: 1` comment. See `docs/catalog-format.md`.

mod words;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::trend::{classify_trend, synth_trend_series, TrendError, TrendSpec};

pub const FORMAT_VERSION: u32 = 1;
pub const YEAR_MIN: i32 = 1950;
pub const YEAR_MAX: i32 = 2016;
pub const VALUE_MAX: f64 = 3.5e15;
pub const MIN_POINTS: usize = 2;
pub const MAX_POINTS: usize = 8;

const DATA_HEADER: [&str; 4] = ["indicator_id", "entity_id", "year", "value"];
const DICT_HEADER: [&str; 5] = ["record", "id", "name", "unit", "kind"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Malformed { path: PathBuf, line: u64, reason: String },
    #[error("{path}:{line}: value {value} outside {kind} bounds [{lo}, {hi}]")]
    OutOfRange { path: PathBuf, line: u64, value: f64, kind: ValueKind, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid catalog: {0}")]
    Invalid(String),
    #[error("insufficient coverage: {0}")]
    InsufficientCoverage(String),
    #[error(transparent)]
    Trend(#[from] TrendError),
}

pub type Result<T, E = CatalogError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    PositiveInteger,
    Float,
    Percentage,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::PositiveInteger => "positive-integer",
            ValueKind::Float => "float",
            ValueKind::Percentage => "percentage",
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            ValueKind::Percentage => (0.0, 100.0),
            _ => (0.0, VALUE_MAX),
        }
    }

    pub fn admits(self, v: f64) -> bool {
        let (lo, hi) = self.bounds();
        v.is_finite() && v >= lo && v <= hi
    }

    pub fn clip(self, v: f64) -> f64 {
        let (lo, hi) = self.bounds();
        v.clamp(lo, hi)
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "positive-integer" => Ok(ValueKind::PositiveInteger),
            "float" => Ok(ValueKind::Float),
            "percentage" => Ok(ValueKind::Percentage),
            other => Err(format!("unknown value kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicator {
    pub id: String,
    pub name: String,
    pub unit: String,
    pub value_kind: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub name: String,
    pub kind: String,
}

/// A run of consecutive covered years for one (indicator, entity) pair.
#[derive(Debug, Clone, Copy)]
struct YearRun {
    start: i32,
    len: usize,
}

#[derive(Debug, Clone)]
struct PairRuns {
    indicator: usize,
    entity: usize,
    runs: Vec<YearRun>,
    longest: usize,
}

#[derive(Debug, Clone)]
struct CrossSection {
    indicator: usize,
    year: i32,
    entities: Vec<usize>,
}

/// Immutable set of indicators, entities, and yearly observations.
#[derive(Debug, Clone)]
pub struct Catalog {
    indicators: Vec<Indicator>,
    entities: Vec<Entity>,
    /// (indicator index, entity index) → year → value.
    observations: BTreeMap<(usize, usize), BTreeMap<i32, f64>>,
    pairs: Vec<PairRuns>,
    sections: Vec<CrossSection>,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.indicators == other.indicators
            && self.entities == other.entities
            && self.observations == other.observations
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CatalogStats {
    pub indicators: usize,
    pub entities: usize,
    pub observations: usize,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
}

impl fmt::Display for CatalogStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "indicators    {}", self.indicators)?;
        writeln!(f, "entities      {}", self.entities)?;
        writeln!(f, "observations  {}", self.observations)?;
        match (self.year_min, self.year_max) {
            (Some(a), Some(b)) => writeln!(f, "years         {a}-{b}"),
            _ => writeln!(f, "years         -"),
        }
    }
}

impl Catalog {
    /// Builds a catalog from observations keyed by (indicator index, entity index, year).
    pub fn new(
        indicators: Vec<Indicator>,
        entities: Vec<Entity>,
        observations: BTreeMap<(usize, usize), BTreeMap<i32, f64>>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for i in &indicators {
            if !seen.insert(("i", i.id.as_str())) {
                return Err(CatalogError::Invalid(format!("duplicate indicator id `{}`", i.id)));
            }
        }
        for e in &entities {
            if e.name.trim().is_empty() {
                return Err(CatalogError::Invalid(format!("entity `{}` has an empty name", e.id)));
            }
            if !seen.insert(("e", e.id.as_str())) {
                return Err(CatalogError::Invalid(format!("duplicate entity id `{}`", e.id)));
            }
        }
        for (&(ii, ei), years) in &observations {
            let ind = indicators
                .get(ii)
                .ok_or_else(|| CatalogError::Invalid(format!("indicator index {ii} out of range")))?;
            if ei >= entities.len() {
                return Err(CatalogError::Invalid(format!("entity index {ei} out of range")));
            }
            for (&y, &v) in years {
                if !(YEAR_MIN..=YEAR_MAX).contains(&y) {
                    return Err(CatalogError::Invalid(format!("year {y} outside {YEAR_MIN}-{YEAR_MAX}")));
                }
                if !ind.value_kind.admits(v) {
                    return Err(CatalogError::Invalid(format!(
                        "value {v} for `{}` outside {} bounds",
                        ind.id, ind.value_kind
                    )));
                }
            }
        }
        let mut cat = Self { indicators, entities, observations, pairs: Vec::new(), sections: Vec::new() };
        cat.build_index();
        Ok(cat)
    }

    fn build_index(&mut self) {
        self.pairs.clear();
        self.sections.clear();
        let mut by_section: BTreeMap<(usize, i32, &str), Vec<usize>> = BTreeMap::new();
        for (&(ii, ei), years) in &self.observations {
            let mut runs = Vec::new();
            let mut iter = years.keys().copied();
            if let Some(first) = iter.next() {
                let mut cur = YearRun { start: first, len: 1 };
                for y in iter {
                    if y == cur.start + cur.len as i32 {
                        cur.len += 1;
                    } else {
                        runs.push(cur);
                        cur = YearRun { start: y, len: 1 };
                    }
                }
                runs.push(cur);
            }
            runs.retain(|r| r.len >= MIN_POINTS);
            if let Some(longest) = runs.iter().map(|r| r.len).max() {
                self.pairs.push(PairRuns { indicator: ii, entity: ei, runs, longest });
            }
            for &y in years.keys() {
                by_section.entry((ii, y, self.entities[ei].kind.as_str())).or_default().push(ei);
            }
        }
        self.sections = by_section
            .into_iter()
            .filter(|(_, ents)| ents.len() >= MIN_POINTS)
            .map(|((indicator, year, _), entities)| CrossSection { indicator, year, entities })
            .collect();
    }

    pub fn indicators(&self) -> &[Indicator] {
        &self.indicators
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn value(&self, indicator: usize, entity: usize, year: i32) -> Option<f64> {
        self.observations.get(&(indicator, entity)).and_then(|m| m.get(&year)).copied()
    }

    /// All observations as (indicator index, entity index, year, value), sorted.
    pub fn observations(&self) -> impl Iterator<Item = (usize, usize, i32, f64)> + '_ {
        self.observations
            .iter()
            .flat_map(|(&(i, e), ys)| ys.iter().map(move |(&y, &v)| (i, e, y, v)))
    }

    pub fn stats(&self) -> CatalogStats {
        let years = self.observations.values().flat_map(|m| m.keys().copied());
        let (lo, hi) = years.fold((None, None), |(lo, hi): (Option<i32>, Option<i32>), y| {
            (Some(lo.map_or(y, |l| l.min(y))), Some(hi.map_or(y, |h| h.max(y))))
        });
        CatalogStats {
            indicators: self.indicators.len(),
            entities: self.entities.len(),
            observations: self.observations.values().map(BTreeMap::len).sum(),
            year_min: lo,
            year_max: hi,
        }
    }
}

/// `foo.csv` → `foo.dict.csv`.
pub fn dictionary_path(data_path: &Path) -> PathBuf {
    let stem = data_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    data_path.with_file_name(format!("{stem}.dict.csv"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CatalogError + '_ {
    move |source| CatalogError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> CatalogError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CatalogError::Io { path: path.to_path_buf(), source },
        other => CatalogError::Malformed { path: path.to_path_buf(), line, reason: format!("{other:?}") },
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(file))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<std::fs::File>, expect: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?;
    if headers.iter().ne(expect.iter().copied()) {
        return Err(CatalogError::Malformed {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header `{}`, found `{}`", expect.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    Ok(())
}

fn check_version(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    for (n, line) in text.lines().enumerate() {
        let Some(rest) = line.trim().strip_prefix('#') else { break };
        if let Some(v) = rest.trim().strip_prefix("catalog-format:") {
            let v: u32 = v.trim().parse().map_err(|_| CatalogError::Malformed {
                path: path.to_path_buf(),
                line: n as u64 + 1,
                reason: format!("bad format version `{}`", v.trim()),
            })?;
            if v != FORMAT_VERSION {
                return Err(CatalogError::Malformed {
                    path: path.to_path_buf(),
                    line: n as u64 + 1,
                    reason: format!("unsupported catalog format {v} (expected {FORMAT_VERSION})"),
                });
            }
        }
    }
    Ok(())
}

/// Loads a catalog data file and its companion dictionary.
pub fn load_catalog(data_path: &Path) -> Result<Catalog> {
    let dict_path = dictionary_path(data_path);
    check_version(&dict_path)?;
    check_version(data_path)?;

    let mut indicators = Vec::new();
    let mut entities = Vec::new();
    let mut ind_ix = HashMap::new();
    let mut ent_ix = HashMap::new();
    let mut rdr = reader(&dict_path)?;
    check_header(&dict_path, &mut rdr, &DICT_HEADER)?;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&dict_path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |reason: String| CatalogError::Malformed { path: dict_path.clone(), line, reason };
        let (id, name) = (rec[1].to_string(), rec[2].to_string());
        if id.is_empty() {
            return Err(malformed("empty id".into()));
        }
        match &rec[0] {
            "indicator" => {
                let value_kind = rec[4].parse::<ValueKind>().map_err(malformed)?;
                if ind_ix.insert(id.clone(), indicators.len()).is_some() {
                    return Err(malformed(format!("duplicate indicator id `{id}`")));
                }
                indicators.push(Indicator { id, name, unit: rec[3].to_string(), value_kind });
            }
            "entity" => {
                if name.is_empty() {
                    return Err(malformed(format!("entity `{id}` has an empty name")));
                }
                if ent_ix.insert(id.clone(), entities.len()).is_some() {
                    return Err(malformed(format!("duplicate entity id `{id}`")));
                }
                entities.push(Entity { id, name, kind: rec[4].to_string() });
            }
            other => return Err(malformed(format!("unknown record type `{other}`"))),
        }
    }

    let mut observations: BTreeMap<(usize, usize), BTreeMap<i32, f64>> = BTreeMap::new();
    let mut rdr = reader(data_path)?;
    check_header(data_path, &mut rdr, &DATA_HEADER)?;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(data_path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |reason: String| CatalogError::Malformed { path: data_path.to_path_buf(), line, reason };
        let ii = *ind_ix.get(&rec[0]).ok_or_else(|| malformed(format!("unknown indicator `{}`", &rec[0])))?;
        let ei = *ent_ix.get(&rec[1]).ok_or_else(|| malformed(format!("unknown entity `{}`", &rec[1])))?;
        let year: i32 = rec[2].parse().map_err(|_| malformed(format!("bad year `{}`", &rec[2])))?;
        if !(YEAR_MIN..=YEAR_MAX).contains(&year) {
            return Err(malformed(format!("year {year} outside {YEAR_MIN}-{YEAR_MAX}")));
        }
        let value: f64 = rec[3].parse().map_err(|_| malformed(format!("bad value `{}`", &rec[3])))?;
        let kind = indicators[ii].value_kind;
        if !kind.admits(value) {
            let (lo, hi) = kind.bounds();
            return Err(CatalogError::OutOfRange { path: data_path.to_path_buf(), line, value, kind, lo, hi });
        }
        if observations.entry((ii, ei)).or_default().insert(year, value).is_some() {
            return Err(malformed(format!("duplicate observation ({}, {}, {year})", &rec[0], &rec[1])));
        }
    }
    Catalog::new(indicators, entities, observations)
}

/// Writes `catalog` to `data_path` and its companion dictionary.
pub fn write_catalog(catalog: &Catalog, data_path: &Path) -> Result<()> {
    use std::io::Write;

    let dict_path = dictionary_path(data_path);
    let open = |p: &Path| -> Result<std::fs::File> {
        let mut f = std::fs::File::create(p).map_err(io_err(p))?;
        writeln!(f, "# catalog-format: {FORMAT_VERSION}").map_err(io_err(p))?;
        Ok(f)
    };
    let mut w = csv::Writer::from_writer(open(&dict_path)?);
    let werr = |p: &Path, e: csv::Error| csv_err(p, e);
    w.write_record(DICT_HEADER).map_err(|e| werr(&dict_path, e))?;
    for i in &catalog.indicators {
        w.write_record(["indicator", &i.id, &i.name, &i.unit, i.value_kind.as_str()])
            .map_err(|e| werr(&dict_path, e))?;
    }
    for e in &catalog.entities {
        w.write_record(["entity", &e.id, &e.name, "", &e.kind]).map_err(|e| werr(&dict_path, e))?;
    }
    w.flush().map_err(io_err(&dict_path))?;

    let mut w = csv::Writer::from_writer(open(data_path)?);
    w.write_record(DATA_HEADER).map_err(|e| werr(data_path, e))?;
    for (ii, ei, y, v) in catalog.observations() {
        w.write_record([
            catalog.indicators[ii].id.as_str(),
            catalog.entities[ei].id.as_str(),
            &y.to_string(),
            &v.to_string(),
        ])
        .map_err(|e| werr(data_path, e))?;
    }
    w.flush().map_err(io_err(data_path))?;
    Ok(())
}

fn indicator_pool() -> Vec<(String, &'static str, ValueKind)> {
    let mut out = Vec::new();
    for c in words::COMMODITIES {
        for (pre, post, unit, kind) in words::COMMODITY_MEASURES {
            out.push((format!("{pre}{c}{post}"), *unit, *kind));
        }
    }
    for g in words::GROUPS {
        for (pre, post, unit, kind) in words::GROUP_MEASURES {
            out.push((format!("{pre}{g}{post}"), *unit, *kind));
        }
    }
    for (name, unit, kind) in words::STANDALONE {
        out.push((name.to_string(), *unit, *kind));
    }
    out
}

/// Deterministic synthetic catalog with plausible names and magnitudes.
pub fn synth_catalog(seed: u64, n_indicators: usize, n_entities: usize) -> Result<Catalog> {
    if n_indicators == 0 || n_entities == 0 {
        return Err(CatalogError::Param(format!(
            "need at least one indicator and one entity, got {n_indicators} and {n_entities}"
        )));
    }
    let mut rng = SplitMix64::new(seed);

    let mut base = indicator_pool();
    rng.shuffle(&mut base);
    let mut scoped: Vec<_> = words::SCOPES
        .iter()
        .flat_map(|s| base.iter().map(move |(n, u, k)| (format!("{n}{s}"), *u, *k)))
        .collect();
    rng.shuffle(&mut scoped);
    base.extend(scoped);
    if n_indicators > base.len() {
        return Err(CatalogError::Param(format!(
            "at most {} synthetic indicators available, requested {n_indicators}",
            base.len()
        )));
    }
    let indicators: Vec<Indicator> = base
        .into_iter()
        .take(n_indicators)
        .enumerate()
        .map(|(i, (name, unit, value_kind))| Indicator {
            id: format!("ind_{:04}", i + 1),
            name,
            unit: unit.to_string(),
            value_kind,
        })
        .collect();

    let mut ents: Vec<(&str, &str)> = words::COUNTRIES
        .iter()
        .map(|n| (*n, "country"))
        .chain(words::CITIES.iter().map(|n| (*n, "city")))
        .chain(words::STATES.iter().map(|n| (*n, "state")))
        .collect();
    rng.shuffle(&mut ents);
    if n_entities > ents.len() {
        return Err(CatalogError::Param(format!(
            "at most {} synthetic entities available, requested {n_entities}",
            ents.len()
        )));
    }
    let entities: Vec<Entity> = ents
        .into_iter()
        .take(n_entities)
        .enumerate()
        .map(|(i, (name, kind))| Entity { id: format!("ent_{:04}", i + 1), name: name.to_string(), kind: kind.to_string() })
        .collect();

    let log_max = VALUE_MAX.log10();
    let mut observations = BTreeMap::new();
    for (ii, ind) in indicators.iter().enumerate() {
        // Leave room above the indicator's base level for entity spread and drift.
        let base_log = rng.uniform(0.0, log_max - 1.5);
        let base_pct = rng.uniform(2.0, 60.0);
        for ei in 0..entities.len() {
            if !rng.chance(0.7) {
                continue;
            }
            let start = rng.range_inclusive(YEAR_MIN as usize, (YEAR_MAX - 7) as usize) as i32;
            let end = rng.range_inclusive(start as usize + 7, YEAR_MAX as usize) as i32;
            let drift = rng.uniform(-0.03, 0.03);
            let mut series = BTreeMap::new();
            match ind.value_kind {
                ValueKind::Percentage => {
                    let mut level = (base_pct * rng.uniform(0.5, 1.5)).clamp(0.5, 99.5);
                    for y in start..=end {
                        series.insert(y, (level * 100.0).round() / 100.0);
                        level = (level * (1.0 + drift) + 1.5 * rng.next_normal()).clamp(0.0, 100.0);
                    }
                }
                kind => {
                    let mut log_level = base_log + rng.uniform(-0.7, 0.7);
                    for y in start..=end {
                        let v = 10f64.powf(log_level).clamp(1.0, VALUE_MAX);
                        let v = if kind == ValueKind::PositiveInteger { v.round() } else { round_sig(v, 6) };
                        series.insert(y, v);
                        log_level += drift + 0.02 * rng.next_normal();
                    }
                }
            }
            observations.insert((ii, ei), series);
        }
    }
    Catalog::new(indicators, entities, observations)
}

fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let scale = 10f64.powi(digits - 1 - v.abs().log10().floor() as i32);
    (v * scale).round() / scale
}

/// One plotted series: labels, values, and how to read them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSeries {
    pub series_name: String,
    pub x_labels: Vec<String>,
    pub y_values: Vec<f64>,
    pub y_unit: String,
    pub temporal: bool,
    pub value_kind: ValueKind,
}

impl DataSeries {
    pub fn validate(&self) -> Result<()> {
        let n = self.x_labels.len();
        if n != self.y_values.len() {
            return Err(CatalogError::Invalid(format!(
                "`{}`: {} labels but {} values",
                self.series_name,
                n,
                self.y_values.len()
            )));
        }
        if !(MIN_POINTS..=MAX_POINTS).contains(&n) {
            return Err(CatalogError::Invalid(format!(
                "`{}`: {n} points outside {MIN_POINTS}-{MAX_POINTS}",
                self.series_name
            )));
        }
        if let Some(v) = self.y_values.iter().find(|v| !self.value_kind.admits(**v)) {
            return Err(CatalogError::Invalid(format!(
                "`{}`: value {v} outside {} bounds",
                self.series_name, self.value_kind
            )));
        }
        if self.temporal {
            let years: Option<Vec<i32>> = self.x_labels.iter().map(|l| l.parse().ok()).collect();
            match years {
                Some(ys) if ys.windows(2).all(|w| w[0] < w[1]) => {}
                _ => {
                    return Err(CatalogError::Invalid(format!(
                        "`{}`: temporal labels must be increasing years",
                        self.series_name
                    )))
                }
            }
        }
        Ok(())
    }
}

/// The series drawn for one chart plus the context needed to title it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSample {
    pub indicator: Indicator,
    /// Kind shared by the entities on the x axis (categorical) or in the legend (temporal).
    pub entity_kind: String,
    pub series: Vec<DataSeries>,
}

/// Bounds on the number of x positions drawn by [`sample_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOptions {
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { min_len: MIN_POINTS, max_len: MAX_POINTS }
    }
}

const SAMPLE_TRIES: usize = 200;

/// Draws one or two series sharing x labels and unit.
///
/// Temporal samples take consecutive covered years of one indicator; two
/// series are two entities over the same years. Categorical samples take
/// entities of one kind at a single year; two series are two years.
pub fn sample_series(
    catalog: &Catalog,
    temporal: bool,
    arity: usize,
    opts: SampleOptions,
    rng: &mut SplitMix64,
) -> Result<SeriesSample> {
    if !(1..=2).contains(&arity) {
        return Err(CatalogError::Param(format!("arity must be 1 or 2, got {arity}")));
    }
    if opts.min_len < MIN_POINTS || opts.max_len > MAX_POINTS || opts.min_len > opts.max_len {
        return Err(CatalogError::Param(format!("bad length bounds {}..={}", opts.min_len, opts.max_len)));
    }
    let sample = if temporal {
        sample_temporal(catalog, arity, opts, rng)?
    } else {
        sample_categorical(catalog, arity, opts, rng)?
    };
    for s in &sample.series {
        s.validate()?;
    }
    Ok(sample)
}

fn sample_temporal(catalog: &Catalog, arity: usize, opts: SampleOptions, rng: &mut SplitMix64) -> Result<SeriesSample> {
    let pairs: Vec<&PairRuns> = catalog.pairs.iter().filter(|p| p.longest >= opts.min_len).collect();
    if pairs.is_empty() {
        return Err(CatalogError::InsufficientCoverage(format!(
            "no (indicator, entity) pair covers {} consecutive years",
            opts.min_len
        )));
    }
    for _ in 0..SAMPLE_TRIES {
        let pair = *rng.pick(&pairs);
        let len = rng.range_inclusive(opts.min_len, opts.max_len.min(pair.longest));
        let runs: Vec<&YearRun> = pair.runs.iter().filter(|r| r.len >= len).collect();
        let run = *rng.pick(&runs);
        let start = run.start + rng.below(run.len - len + 1) as i32;
        let years: Vec<i32> = (start..start + len as i32).collect();

        let mut ents = vec![pair.entity];
        if arity == 2 {
            let others: Vec<usize> = (0..catalog.entities.len())
                .filter(|&e| e != pair.entity)
                .filter(|&e| years.iter().all(|&y| catalog.value(pair.indicator, e, y).is_some()))
                .collect();
            if others.is_empty() {
                continue;
            }
            ents.push(*rng.pick(&others));
        }
        let ind = &catalog.indicators[pair.indicator];
        let x_labels: Vec<String> = years.iter().map(|y| y.to_string()).collect();
        let series = ents
            .iter()
            .map(|&e| DataSeries {
                series_name: catalog.entities[e].name.clone(),
                x_labels: x_labels.clone(),
                y_values: years.iter().map(|&y| catalog.value(pair.indicator, e, y).unwrap()).collect(),
                y_unit: ind.unit.clone(),
                temporal: true,
                value_kind: ind.value_kind,
            })
            .collect();
        return Ok(SeriesSample {
            indicator: ind.clone(),
            entity_kind: catalog.entities[pair.entity].kind.clone(),
            series,
        });
    }
    Err(CatalogError::InsufficientCoverage(format!(
        "no temporal sample with {arity} series found after {SAMPLE_TRIES} draws"
    )))
}

fn sample_categorical(catalog: &Catalog, arity: usize, opts: SampleOptions, rng: &mut SplitMix64) -> Result<SeriesSample> {
    let sections: Vec<&CrossSection> = catalog.sections.iter().filter(|s| s.entities.len() >= opts.min_len).collect();
    if sections.is_empty() {
        return Err(CatalogError::InsufficientCoverage(format!(
            "no indicator-year has {} entities of one kind",
            opts.min_len
        )));
    }
    for _ in 0..SAMPLE_TRIES {
        let sec = *rng.pick(&sections);
        let len = rng.range_inclusive(opts.min_len, opts.max_len.min(sec.entities.len()));
        let mut picked: Vec<usize> = rng.sample_indices(sec.entities.len(), len).into_iter().map(|i| sec.entities[i]).collect();
        picked.sort_unstable();

        let mut years = vec![sec.year];
        if arity == 2 {
            let mut others: Vec<i32> = catalog
                .observations
                .get(&(sec.indicator, picked[0]))
                .map(|m| m.keys().copied().filter(|&y| y != sec.year).collect())
                .unwrap_or_default();
            others.retain(|&y| picked.iter().all(|&e| catalog.value(sec.indicator, e, y).is_some()));
            if others.is_empty() {
                continue;
            }
            years.push(*rng.pick(&others));
            years.sort_unstable();
        }
        let ind = &catalog.indicators[sec.indicator];
        let x_labels: Vec<String> = picked.iter().map(|&e| catalog.entities[e].name.clone()).collect();
        let series = years
            .iter()
            .map(|&y| DataSeries {
                series_name: y.to_string(),
                x_labels: x_labels.clone(),
                y_values: picked.iter().map(|&e| catalog.value(sec.indicator, e, y).unwrap()).collect(),
                y_unit: ind.unit.clone(),
                temporal: false,
                value_kind: ind.value_kind,
            })
            .collect();
        return Ok(SeriesSample {
            indicator: ind.clone(),
            entity_kind: catalog.entities[picked[0]].kind.clone(),
            series,
        });
    }
    Err(CatalogError::InsufficientCoverage(format!(
        "no categorical sample with {arity} series found after {SAMPLE_TRIES} draws"
    )))
}

/// Replaces the values of `series` with a synthetic series of the requested trend.
///
/// The synthetic path is scaled multiplicatively so its mean matches the
/// original series (shrunk further if that would exceed the value-kind
/// ceiling); multiplicative scaling leaves the trend class unchanged.
/// Positive-integer series are rounded, so the result is re-classified and
/// redrawn if rounding changed its class.
pub fn perturb_to_trend(series: &DataSeries, spec: &TrendSpec<f64>, rng: &mut SplitMix64) -> Result<DataSeries> {
    series.validate()?;
    let n = series.y_values.len();
    let mut spec = *spec;
    spec.params.n_points = n;
    let target_mean = series.y_values.iter().sum::<f64>() / n as f64;
    let (_, hi) = series.value_kind.bounds();
    for _ in 0..crate::trend::MAX_SYNTH_ATTEMPTS {
        let synth = synth_trend_series(&spec, rng.next_u64())?;
        let mean = synth.iter().sum::<f64>() / n as f64;
        let peak = synth.iter().copied().fold(f64::MIN, f64::max);
        let mut factor = if target_mean > 0.0 { target_mean / mean } else { 1.0 };
        if series.value_kind == ValueKind::PositiveInteger && mean * factor < 1000.0 {
            factor = 1000.0 / mean;
        }
        if peak * factor > hi {
            factor = hi / peak;
        }
        let mut values: Vec<f64> = synth.iter().map(|v| series.value_kind.clip(v * factor)).collect();
        if series.value_kind == ValueKind::PositiveInteger {
            values.iter_mut().for_each(|v| *v = v.round());
        }
        if n < 3 || classify_trend(&values)? == spec.class {
            return Ok(DataSeries { y_values: values, ..series.clone() });
        }
    }
    Err(CatalogError::Trend(TrendError::Unrealizable {
        class: spec.class,
        transform: spec.transform,
        s0: spec.params.s0,
        mu: spec.params.mu,
        sigma: spec.params.sigma,
        n_points: n,
        attempts: crate::trend::MAX_SYNTH_ATTEMPTS,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trend::TrendClass;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    const DICT: &str = "# catalog-format: 1\nrecord,id,name,unit,kind\n\
        indicator,gdp,GDP,US dollars,float\n\
        indicator,lit,literacy rate,percent,percentage\n\
        entity,fr,France,,country\n\
        entity,jp,Japan,,country\n";

    #[test]
    fn loads_three_rows() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "c.dict.csv", DICT);
        let data = write(
            dir.path(),
            "c.csv",
            "indicator_id,entity_id,year,value\ngdp,fr,1990,1.5e12\ngdp,fr,1991,1.6e12\nlit,jp,2000,99.0\n",
        );
        let cat = load_catalog(&data).unwrap();
        let st = cat.stats();
        assert_eq!((st.indicators, st.entities, st.observations), (2, 2, 3));
        assert_eq!(cat.value(0, 0, 1991), Some(1.6e12));
    }

    #[test]
    fn percentage_out_of_range_names_line() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "c.dict.csv", DICT);
        let data = write(
            dir.path(),
            "c.csv",
            "# catalog-format: 1\nindicator_id,entity_id,year,value\nlit,fr,2000,50\nlit,fr,2001,123.0\n",
        );
        match load_catalog(&data) {
            Err(CatalogError::OutOfRange { line, value, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(value, 123.0);
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "c.dict.csv", DICT);
        for body in [
            "gdp,fr,19x0,1\n",
            "gdp,fr,1940,1\n",
            "gdp,zz,1990,1\n",
            "gdp,fr,1990,abc\n",
            "gdp,fr,1990,1\ngdp,fr,1990,2\n",
            "gdp,fr,1990\n",
        ] {
            let data = write(dir.path(), "c.csv", &format!("indicator_id,entity_id,year,value\n{body}"));
            assert!(
                matches!(load_catalog(&data), Err(CatalogError::Malformed { .. })),
                "accepted {body:?}"
            );
        }
    }

    #[test]
    fn missing_file() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_catalog(&dir.path().join("none.csv")), Err(CatalogError::Io { .. })));
    }

    #[test]
    fn synth_is_deterministic_and_bounded() {
        let a = synth_catalog(7, 2, 2).unwrap();
        let b = synth_catalog(7, 2, 2).unwrap();
        assert_eq!(a, b);
        let c = synth_catalog(7, 40, 10).unwrap();
        for (ii, _, _, v) in c.observations() {
            assert!(c.indicators()[ii].value_kind.admits(v));
        }
        assert!(c.indicators().iter().any(|i| i.value_kind == ValueKind::Percentage));
        assert!(matches!(synth_catalog(1, 0, 3), Err(CatalogError::Param(_))));
    }

    #[test]
    fn single_pair_catalog_samples_its_years() {
        let ind = vec![Indicator { id: "i".into(), name: "rice production".into(), unit: "t".into(), value_kind: ValueKind::Float }];
        let ent = vec![Entity { id: "e".into(), name: "Peru".into(), kind: "country".into() }];
        let mut obs = BTreeMap::new();
        obs.insert((0, 0), (1990..=1997).map(|y| (y, y as f64)).collect());
        let cat = Catalog::new(ind, ent, obs).unwrap();
        let mut rng = SplitMix64::new(1);
        for _ in 0..50 {
            let s = sample_series(&cat, true, 1, SampleOptions::default(), &mut rng).unwrap();
            let xs = &s.series[0].x_labels;
            assert!((2..=8).contains(&xs.len()));
            assert!(xs.iter().all(|x| (1990..=1997).contains(&x.parse::<i32>().unwrap())));
        }
        assert!(matches!(
            sample_series(&cat, true, 2, SampleOptions::default(), &mut rng),
            Err(CatalogError::InsufficientCoverage(_))
        ));
        assert!(matches!(
            sample_series(&cat, false, 1, SampleOptions::default(), &mut rng),
            Err(CatalogError::InsufficientCoverage(_))
        ));
    }

    #[test]
    fn two_series_share_labels() {
        let cat = synth_catalog(3, 20, 20).unwrap();
        let mut rng = SplitMix64::new(11);
        for temporal in [true, false] {
            for _ in 0..50 {
                let s = sample_series(&cat, temporal, 2, SampleOptions::default(), &mut rng).unwrap();
                assert_eq!(s.series.len(), 2);
                assert_eq!(s.series[0].x_labels, s.series[1].x_labels);
                assert_eq!(s.series[0].y_unit, s.series[1].y_unit);
                assert_ne!(s.series[0].series_name, s.series[1].series_name);
            }
        }
    }

    fn pct_series() -> DataSeries {
        DataSeries {
            series_name: "Chile".into(),
            x_labels: (2000..2008).map(|y| y.to_string()).collect(),
            y_values: vec![80.0, 85.0, 90.0, 95.0, 97.0, 98.0, 99.0, 99.5],
            y_unit: "percent".into(),
            temporal: true,
            value_kind: ValueKind::Percentage,
        }
    }

    #[test]
    fn perturb_respects_percentage_bounds_and_class() {
        let mut rng = SplitMix64::new(4);
        for class in TrendClass::DIRECTIONAL {
            let out = perturb_to_trend(&pct_series(), &TrendSpec::preset(class, 8), &mut rng).unwrap();
            assert!(out.y_values.iter().all(|v| (0.0..=100.0).contains(v)));
            assert_eq!(classify_trend(&out.y_values).unwrap(), class);
            assert_eq!(out.x_labels, pct_series().x_labels);
        }
    }

    #[test]
    fn perturb_plateau_stays_flat() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..100 {
            let out = perturb_to_trend(&pct_series(), &TrendSpec::preset(TrendClass::Plateau, 8), &mut rng).unwrap();
            let (lo, hi) = out.y_values.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            let mean = out.y_values.iter().sum::<f64>() / 8.0;
            assert!((hi - lo) / mean < 0.05);
        }
    }

    #[test]
    fn perturb_increase_reads_linear() {
        let mut rng = SplitMix64::new(42);
        let mut s = pct_series();
        s.value_kind = ValueKind::PositiveInteger;
        s.y_unit = "people".into();
        let out = perturb_to_trend(&s, &TrendSpec::preset(TrendClass::LinearIncrease, 8), &mut rng).unwrap();
        assert_eq!(classify_trend(&out.y_values).unwrap(), TrendClass::LinearIncrease);
        assert!(out.y_values.iter().all(|v| v.fract() == 0.0));
    }
}
