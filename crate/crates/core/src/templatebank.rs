//! Slotted sentence templates tagged with rhetorical moves and applicability conditions.
//!
//! Bank files are tab-separated with the header
//! `id, move, category, trend, arity, origin, text`; see `docs/template-schema.md`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trend::TrendClass;

pub const BANK_HEADER: &str = "id\tmove\tcategory\ttrend\tarity\torigin\ttext";

/// Every slot name a template may use.
pub const SLOTS: [&str; 21] = [
    "title",
    "chart_kind_phrase",
    "y_label",
    "x_label",
    "unit",
    "series_name",
    "series_name_2",
    "x_first",
    "x_last",
    "x_at_max",
    "x_at_min",
    "y_first",
    "y_last",
    "y_max",
    "y_min",
    "y_mean",
    "delta",
    "trend_phrase",
    "comparison_phrase",
    "n_categories",
    "entity_list",
];

const SEED_BANK: &str = include_str!("../data/seed_bank.tsv");

#[derive(Debug, Error)]
pub enum BankError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{source_name}:{line}: {reason}")]
    Parse { source_name: String, line: usize, reason: String },
    #[error("{source_name}:{line}: unknown move tag `{tag}`")]
    UnknownMove { source_name: String, line: usize, tag: String },
    #[error("template `{id}`: unknown slot `{{{slot}}}`")]
    UnknownSlot { id: String, slot: String },
    #[error("template `{id}`: {reason}")]
    Invalid { id: String, reason: String },
    #[error("coverage hole in obligatory moves ({}): {}", moves.join(", "), cells.join("; "))]
    CoverageHole { moves: Vec<String>, cells: Vec<String> },
    #[error("no template for ({0})")]
    EmptyQuery(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveTag {
    M1,
    M2,
    M3,
    M3_1,
    M4,
    M5,
}

impl MoveTag {
    pub const ALL: [MoveTag; 6] = [MoveTag::M1, MoveTag::M2, MoveTag::M3, MoveTag::M3_1, MoveTag::M4, MoveTag::M5];
    pub const OBLIGATORY: [MoveTag; 4] = [MoveTag::M1, MoveTag::M3, MoveTag::M3_1, MoveTag::M5];

    pub fn as_str(self) -> &'static str {
        match self {
            MoveTag::M1 => "M1",
            MoveTag::M2 => "M2",
            MoveTag::M3 => "M3",
            MoveTag::M3_1 => "M3_1",
            MoveTag::M4 => "M4",
            MoveTag::M5 => "M5",
        }
    }

    /// Position in the canonical order M1 < M2 < {M3, M3_1, M4} < M5.
    pub fn rank(self) -> u8 {
        match self {
            MoveTag::M1 => 0,
            MoveTag::M2 => 1,
            MoveTag::M3 | MoveTag::M3_1 | MoveTag::M4 => 2,
            MoveTag::M5 => 3,
        }
    }
}

impl fmt::Display for MoveTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MoveTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MoveTag::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown move tag `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartCategory {
    TemporalTrend,
    TemporalRandom,
    Categorical,
}

impl ChartCategory {
    pub const ALL: [ChartCategory; 3] = [ChartCategory::TemporalTrend, ChartCategory::TemporalRandom, ChartCategory::Categorical];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartCategory::TemporalTrend => "temporal-trend",
            ChartCategory::TemporalRandom => "temporal-random",
            ChartCategory::Categorical => "categorical",
        }
    }

    pub fn is_temporal(self) -> bool {
        self != ChartCategory::Categorical
    }
}

impl fmt::Display for ChartCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChartCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ChartCategory::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown chart category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Human,
    Paraphrase,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Human => "human",
            Origin::Paraphrase => "paraphrase",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub move_tag: MoveTag,
    /// `None` means any category.
    pub categories: Option<Vec<ChartCategory>>,
    /// `None` means any trend class.
    pub trends: Option<Vec<TrendClass>>,
    /// `None` means any series count.
    pub arity: Option<u8>,
    pub origin: Origin,
    pub text: String,
}

impl Template {
    pub fn slots(&self) -> Result<Vec<&str>, String> {
        parse_slots(&self.text)
    }

    pub fn uses(&self, slot: &str) -> bool {
        self.slots().map(|s| s.contains(&slot)).unwrap_or(false)
    }

    pub fn applies(&self, category: ChartCategory, trend: TrendClass, arity: u8) -> bool {
        self.categories.as_ref().is_none_or(|c| c.contains(&category))
            && self.trends.as_ref().is_none_or(|t| t.contains(&trend))
            && self.arity.is_none_or(|a| a == arity)
    }

    /// Number of wildcard conditions; exact matches sort first.
    fn wildcards(&self) -> usize {
        self.categories.is_none() as usize + self.trends.is_none() as usize + self.arity.is_none() as usize
    }

    fn validate(&self) -> Result<(), BankError> {
        let invalid = |reason: &str| BankError::Invalid { id: self.id.clone(), reason: reason.to_string() };
        let slots = self.slots().map_err(|r| invalid(&r))?;
        if let Some(bad) = slots.iter().find(|s| !SLOTS.contains(s)) {
            return Err(BankError::UnknownSlot { id: self.id.clone(), slot: bad.to_string() });
        }
        if slots.contains(&"series_name_2") && self.arity != Some(2) {
            return Err(invalid("{series_name_2} needs arity 2"));
        }
        if slots.contains(&"comparison_phrase") && self.arity.is_none() {
            return Err(invalid("{comparison_phrase} needs arity 1 or 2"));
        }
        if matches!(self.move_tag, MoveTag::M3 | MoveTag::M4) && slots.contains(&"trend_phrase") && self.trends.is_none() {
            return Err(invalid("M3/M4 templates using {trend_phrase} must list their trend classes"));
        }
        if self.text.trim().is_empty() {
            return Err(invalid("empty text"));
        }
        Ok(())
    }

    fn to_line(&self) -> String {
        let cat = match &self.categories {
            None => "any".to_string(),
            Some(c) => c.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("|"),
        };
        let trend = match &self.trends {
            None => "any".to_string(),
            Some(t) => t.iter().map(|t| t.as_str()).collect::<Vec<_>>().join("|"),
        };
        let arity = self.arity.map_or("any".to_string(), |a| a.to_string());
        format!("{}\t{}\t{}\t{}\t{}\t{}\t{}", self.id, self.move_tag, cat, trend, arity, self.origin.as_str(), self.text)
    }
}

/// Slot names in order of appearance. Braces must pair up and not nest.
pub fn parse_slots(text: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return Err("unmatched `}`".into());
        }
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or("unmatched `{`")?;
        let name = &after[..close];
        if name.contains('{') || name.is_empty() {
            return Err(format!("malformed slot `{{{name}}}`"));
        }
        out.push(name);
        rest = &after[close + 1..];
    }
    Ok(out)
}

/// Counts of templates per move and origin.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BankCensus {
    pub total: usize,
    pub by_move: BTreeMap<String, usize>,
    pub human_by_move: BTreeMap<String, usize>,
    pub paraphrase_by_move: BTreeMap<String, usize>,
}

impl fmt::Display for BankCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<6} {:>6} {:>6} {:>10}", "move", "total", "human", "paraphrase")?;
        for m in MoveTag::ALL {
            let k = m.as_str();
            let get = |map: &BTreeMap<String, usize>| map.get(k).copied().unwrap_or(0);
            writeln!(f, "{:<6} {:>6} {:>6} {:>10}", k, get(&self.by_move), get(&self.human_by_move), get(&self.paraphrase_by_move))?;
        }
        writeln!(f, "{:<6} {:>6}", "all", self.total)
    }
}

type Cell = (MoveTag, ChartCategory, TrendClass, u8);

#[derive(Debug, Clone)]
pub struct TemplateBank {
    templates: Vec<Template>,
    index: HashMap<Cell, Vec<usize>>,
}

impl TemplateBank {
    /// Validates templates and their coverage of the obligatory moves.
    pub fn new(templates: Vec<Template>) -> Result<Self, BankError> {
        let mut ids = HashSet::new();
        for t in &templates {
            t.validate()?;
            if !ids.insert(t.id.as_str()) {
                return Err(BankError::Invalid { id: t.id.clone(), reason: "duplicate id".into() });
            }
        }
        let mut index = HashMap::new();
        for m in MoveTag::ALL {
            for c in ChartCategory::ALL {
                for tr in TrendClass::ALL {
                    for a in [1u8, 2] {
                        let mut hits: Vec<usize> = (0..templates.len())
                            .filter(|&i| templates[i].move_tag == m && templates[i].applies(c, tr, a))
                            .collect();
                        hits.sort_by_key(|&i| templates[i].wildcards());
                        if !hits.is_empty() {
                            index.insert((m, c, tr, a), hits);
                        }
                    }
                }
            }
        }
        let bank = Self { templates, index };
        let holes = bank.coverage_holes();
        if !holes.is_empty() {
            let mut moves: Vec<String> = holes.iter().map(|h| h.0.to_string()).collect();
            moves.dedup();
            let cells = holes.iter().map(|(m, c, t, a)| format!("{m}/{c}/{t}/arity {a}")).collect();
            return Err(BankError::CoverageHole { moves, cells });
        }
        Ok(bank)
    }

    /// Obligatory cells without a template, in move order.
    pub fn coverage_holes(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for m in MoveTag::OBLIGATORY {
            for c in ChartCategory::ALL {
                for t in TrendClass::ALL {
                    for a in [1u8, 2] {
                        if !self.index.contains_key(&(m, c, t, a)) {
                            out.push((m, c, t, a));
                        }
                    }
                }
            }
        }
        out
    }

    /// The bank shipped with the library.
    pub fn bundled() -> Self {
        parse_bank(SEED_BANK, "seed_bank.tsv").expect("bundled bank is valid")
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.id == id)
    }

    /// Applicable templates for a cell, exact matches before wildcard matches, file order within each.
    pub fn query(&self, m: MoveTag, category: ChartCategory, trend: TrendClass, arity: u8) -> Result<Vec<&Template>, BankError> {
        match self.index.get(&(m, category, trend, arity)) {
            Some(ix) => Ok(ix.iter().map(|&i| &self.templates[i]).collect()),
            None => Err(BankError::EmptyQuery(format!("{m}, {category}, {trend}, arity {arity}"))),
        }
    }

    pub fn census(&self) -> BankCensus {
        let mut c = BankCensus { total: self.templates.len(), ..Default::default() };
        for t in &self.templates {
            let k = t.move_tag.to_string();
            *c.by_move.entry(k.clone()).or_default() += 1;
            let map = match t.origin {
                Origin::Human => &mut c.human_by_move,
                Origin::Paraphrase => &mut c.paraphrase_by_move,
            };
            *map.entry(k).or_default() += 1;
        }
        c
    }

    /// Bank file text: header plus one line per template in bank order.
    pub fn serialize(&self) -> String {
        let mut s = String::from(BANK_HEADER);
        s.push('\n');
        for t in &self.templates {
            s.push_str(&t.to_line());
            s.push('\n');
        }
        s
    }
}

fn parse_set<T: FromStr<Err = String>>(field: &str) -> Result<Option<Vec<T>>, String> {
    if field == "any" {
        return Ok(None);
    }
    field.split('|').map(|p| p.trim().parse()).collect::<Result<Vec<T>, _>>().map(Some)
}

/// Parses bank text. `source_name` is used in diagnostics.
pub fn parse_bank(text: &str, source_name: &str) -> Result<TemplateBank, BankError> {
    let parse_err = |line: usize, reason: String| BankError::Parse { source_name: source_name.to_string(), line, reason };
    let mut templates = Vec::new();
    let mut header_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        if !header_seen {
            if raw != BANK_HEADER {
                return Err(parse_err(line, "expected header `id\\tmove\\tcategory\\ttrend\\tarity\\torigin\\ttext`".into()));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = raw.splitn(7, '\t').collect();
        if f.len() != 7 {
            return Err(parse_err(line, format!("expected 7 tab-separated fields, found {}", f.len())));
        }
        let move_tag = f[1].parse().map_err(|_| BankError::UnknownMove {
            source_name: source_name.to_string(),
            line,
            tag: f[1].to_string(),
        })?;
        let categories = parse_set::<ChartCategory>(f[2]).map_err(|e| parse_err(line, e))?;
        let trends = parse_set::<TrendClass>(f[3]).map_err(|e| parse_err(line, e.to_string()))?;
        let arity = match f[4] {
            "any" => None,
            "1" => Some(1),
            "2" => Some(2),
            other => return Err(parse_err(line, format!("arity must be 1, 2, or any, found `{other}`"))),
        };
        let origin = match f[5] {
            "human" => Origin::Human,
            "paraphrase" => Origin::Paraphrase,
            other => return Err(parse_err(line, format!("origin must be human or paraphrase, found `{other}`"))),
        };
        templates.push(Template { id: f[0].to_string(), move_tag, categories, trends, arity, origin, text: f[6].to_string() });
    }
    if !header_seen {
        return Err(parse_err(0, "empty bank".into()));
    }
    TemplateBank::new(templates)
}

pub fn load_bank(path: &Path) -> Result<TemplateBank, BankError> {
    let text = std::fs::read_to_string(path).map_err(|source| BankError::Io { path: path.to_path_buf(), source })?;
    parse_bank(&text, &path.display().to_string())
}
