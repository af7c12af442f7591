//! Description synthesis: fact extraction, move planning, and template realization.

mod facts;
mod format;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use facts::{chart_category, cross_facts, extract_facts, series_facts, ChartFacts, CrossFacts, Dominance, SeriesFacts};
pub use format::{format_number, format_plain, round_sig, unsupported_numbers, QUALIFIERS};

use crate::catalog::DataSeries;
use crate::chartgen::ChartMeta;
use crate::rng::SplitMix64;
use crate::templatebank::{parse_slots, BankError, ChartCategory, MoveTag, Template, TemplateBank};
use crate::trend::TrendClass;

#[derive(Debug, Error)]
pub enum NarrateError {
    #[error("inconsistent chart data: {0}")]
    Inconsistent(String),
    #[error("template `{template}`: no fact for slot `{{{slot}}}`")]
    MissingFact { template: String, slot: String },
    #[error("template `{template}`: {reason}")]
    Malformed { template: String, reason: String },
    #[error(transparent)]
    Bank(#[from] BankError),
}

/// Verb phrases per trend class. No phrase is shared between classes.
pub fn trend_phrases(t: TrendClass) -> &'static [&'static str] {
    match t {
        TrendClass::LinearIncrease => &["rises steadily", "increases at a steady pace"],
        TrendClass::ConvexIncrease => &["rises at an accelerating pace", "grows faster and faster"],
        TrendClass::ConcaveIncrease => &["rises quickly before levelling off", "grows at a slowing pace"],
        TrendClass::LinearDecrease => &["falls steadily", "declines at a steady pace"],
        TrendClass::ConvexDecrease => &["drops sharply before levelling off", "declines at a slowing pace"],
        TrendClass::ConcaveDecrease => &["falls at an accelerating pace", "declines faster and faster"],
        TrendClass::RandomFluctuation => &["fluctuates without a clear direction", "moves up and down irregularly"],
        TrendClass::Plateau => &["stays roughly flat", "remains nearly unchanged"],
    }
}

/// Probabilities and count ranges for optional and repeated moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConfig {
    pub m2_probability: f64,
    pub m4_probability: f64,
    pub m3_min: u32,
    pub m3_max: u32,
    pub m31_min: u32,
    pub m31_max: u32,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self { m2_probability: 0.5, m4_probability: 0.5, m3_min: 1, m3_max: 2, m31_min: 1, m31_max: 2 }
    }
}

/// One planned sentence: its move and the series it talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub move_tag: MoveTag,
    pub series_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovePlan {
    pub steps: Vec<PlanStep>,
}

impl MovePlan {
    pub fn tags(&self) -> Vec<MoveTag> {
        self.steps.iter().map(|s| s.move_tag).collect()
    }
}

/// Plans a move sequence. Temporal charts get M3 groups per series, categorical
/// charts get them in total, alternating between series.
pub fn plan_moves(category: ChartCategory, arity: usize, rng: &mut SplitMix64, cfg: &PlanConfig) -> MovePlan {
    let arity = arity.max(1);
    let mut steps = vec![PlanStep { move_tag: MoveTag::M1, series_index: 0 }];
    if rng.chance(cfg.m2_probability) {
        steps.push(PlanStep { move_tag: MoveTag::M2, series_index: 0 });
    }
    let group = |steps: &mut Vec<PlanStep>, rng: &mut SplitMix64, series_index: usize| {
        steps.push(PlanStep { move_tag: MoveTag::M3, series_index });
        for _ in 0..rng.range_inclusive(cfg.m31_min as usize, cfg.m31_max as usize) {
            steps.push(PlanStep { move_tag: MoveTag::M3_1, series_index });
        }
    };
    if category.is_temporal() {
        for s in 0..arity {
            for _ in 0..rng.range_inclusive(cfg.m3_min as usize, cfg.m3_max as usize) {
                group(&mut steps, rng, s);
            }
        }
    } else {
        let n = rng.range_inclusive(cfg.m3_min as usize, cfg.m3_max as usize);
        for g in 0..n {
            group(&mut steps, rng, g % arity);
        }
    }
    if rng.chance(cfg.m4_probability) {
        steps.push(PlanStep { move_tag: MoveTag::M4, series_index: 0 });
    }
    steps.push(PlanStep { move_tag: MoveTag::M5, series_index: 0 });
    MovePlan { steps }
}

/// First violation of the move-order rules, if any.
pub fn check_move_order(tags: &[MoveTag]) -> Result<(), String> {
    if tags.first() != Some(&MoveTag::M1) {
        return Err("does not begin with M1".into());
    }
    if tags.last() != Some(&MoveTag::M5) {
        return Err("does not end with M5".into());
    }
    if !tags.contains(&MoveTag::M3) {
        return Err("has no M3".into());
    }
    let mut seen_m3 = false;
    for (i, t) in tags.iter().enumerate() {
        if i > 0 && t.rank() < tags[i - 1].rank() {
            return Err(format!("{t} after {} at position {i}", tags[i - 1]));
        }
        match t {
            MoveTag::M1 if i > 0 => return Err(format!("repeated M1 at position {i}")),
            MoveTag::M5 if i + 1 < tags.len() => return Err(format!("M5 before the end at position {i}")),
            MoveTag::M3_1 if !matches!(tags[i - 1], MoveTag::M3 | MoveTag::M3_1) => {
                return Err(format!("M3_1 at position {i} does not follow M3 or M3_1"))
            }
            MoveTag::M4 if !seen_m3 => return Err(format!("M4 at position {i} before any M3")),
            MoveTag::M3 => seen_m3 = true,
            _ => {}
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub move_tag: MoveTag,
    pub template_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Description {
    pub image_index: u64,
    pub variant_index: u32,
    pub sentences: Vec<Sentence>,
}

impl Description {
    /// Sentences joined by single spaces.
    pub fn text(&self) -> String {
        self.sentences.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn tags(&self) -> Vec<MoveTag> {
        self.sentences.iter().map(|s| s.move_tag).collect()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.text.split_whitespace().count()).sum()
    }
}

/// `A`, `A and B`, `A, B and C`.
pub fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn comparison_phrase(facts: &ChartFacts, series_index: usize) -> Option<&'static str> {
    match &facts.cross {
        Some(c) => {
            let d = match (c.dominance, series_index) {
                (Dominance::First, 1) => Dominance::Second,
                (Dominance::Second, 1) => Dominance::First,
                (d, _) => d,
            };
            Some(match d {
                Dominance::First => "is higher than",
                Dominance::Second => "is lower than",
                Dominance::Tie => "is level with",
                Dominance::Mixed => "is sometimes higher and sometimes lower than",
            })
        }
        None => {
            let s = facts.series.get(series_index)?;
            Some(if s.y_last > s.y_first {
                "finishes above its starting level"
            } else if s.y_last < s.y_first {
                "finishes below its starting level"
            } else {
                "finishes at its starting level"
            })
        }
    }
}

fn capitalize_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Fills every slot of `template` from `facts`, describing series `series_index`.
pub fn realize(template: &Template, facts: &ChartFacts, series_index: usize, rng: &mut SplitMix64) -> Result<String, NarrateError> {
    let malformed = |reason: String| NarrateError::Malformed { template: template.id.clone(), reason };
    let missing = |slot: &str| NarrateError::MissingFact { template: template.id.clone(), slot: slot.to_string() };
    let slots = parse_slots(&template.text).map_err(malformed)?;
    let s = facts.series.get(series_index).ok_or_else(|| malformed(format!("no series {series_index}")))?;
    let mut out = String::with_capacity(template.text.len() + 64);
    let mut rest = template.text.as_str();
    for slot in slots {
        let open = rest.find('{').expect("slot parsed");
        out.push_str(&rest[..open]);
        rest = &rest[open + slot.len() + 2..];
        let value = match slot {
            "title" => facts.title.clone(),
            "chart_kind_phrase" => facts.kind_phrase.clone(),
            "y_label" => facts.y_label.clone(),
            "x_label" => facts.x_label.clone(),
            "unit" => facts.unit.clone(),
            "series_name" => s.name.clone(),
            "series_name_2" => {
                let other = if series_index == 0 { 1 } else { 0 };
                facts.series.get(other).filter(|_| facts.series.len() == 2).ok_or_else(|| missing(slot))?.name.clone()
            }
            "x_first" => s.x_first.clone(),
            "x_last" => s.x_last.clone(),
            "x_at_max" => s.x_at_max.clone(),
            "x_at_min" => s.x_at_min.clone(),
            "y_first" => format_number(s.y_first, rng),
            "y_last" => format_number(s.y_last, rng),
            "y_max" => format_number(s.y_max, rng),
            "y_min" => format_number(s.y_min, rng),
            "y_mean" => format_number(s.y_mean, rng),
            "delta" => format_number(s.delta.abs(), rng),
            "trend_phrase" => rng.pick(trend_phrases(s.trend)).to_string(),
            "comparison_phrase" => comparison_phrase(facts, series_index).ok_or_else(|| missing(slot))?.to_string(),
            "n_categories" => facts.x_labels.len().to_string(),
            "entity_list" => {
                if facts.temporal {
                    join_list(&facts.series.iter().map(|s| s.name.clone()).collect::<Vec<_>>())
                } else {
                    join_list(&facts.x_labels)
                }
            }
            other => return Err(missing(other)),
        };
        out.push_str(&value);
    }
    out.push_str(rest);
    Ok(capitalize_first(&out))
}

/// Numbers a faithful description may contain, in their printed form.
pub fn allowed_numbers(facts: &ChartFacts) -> Vec<String> {
    facts.numbers().into_iter().map(|v| format_plain(v).0).collect()
}

/// Digit-bearing spans of `text` that match no fact of `facts`.
pub fn hallucinated_numbers(text: &str, facts: &ChartFacts) -> Vec<String> {
    unsupported_numbers(text, &allowed_numbers(facts), &facts.labels())
}

/// Draws templates without replacement within one description; a cell whose
/// templates are all used starts over with its full list.
struct Sampler<'b> {
    used: Vec<&'b str>,
}

impl<'b> Sampler<'b> {
    fn draw(&mut self, candidates: &[&'b Template], rng: &mut SplitMix64) -> &'b Template {
        let fresh: Vec<&'b Template> = candidates.iter().copied().filter(|t| !self.used.contains(&t.id.as_str())).collect();
        let pool = if fresh.is_empty() { candidates.to_vec() } else { fresh };
        let t = *rng.pick(&pool);
        self.used.push(&t.id);
        t
    }
}

/// Structured description of one chart.
pub fn generate_description(
    meta: &ChartMeta,
    series: &[DataSeries],
    bank: &TemplateBank,
    variant_index: u32,
    rng: &mut SplitMix64,
) -> Result<Description, NarrateError> {
    generate_description_with(meta, series, bank, variant_index, rng, &PlanConfig::default())
}

pub fn generate_description_with(
    meta: &ChartMeta,
    series: &[DataSeries],
    bank: &TemplateBank,
    variant_index: u32,
    rng: &mut SplitMix64,
    cfg: &PlanConfig,
) -> Result<Description, NarrateError> {
    let facts = extract_facts(meta, series)?;
    describe_facts(&facts, bank, variant_index, rng, cfg)
}

/// [`generate_description_with`] on already extracted facts.
pub fn describe_facts(
    facts: &ChartFacts,
    bank: &TemplateBank,
    variant_index: u32,
    rng: &mut SplitMix64,
    cfg: &PlanConfig,
) -> Result<Description, NarrateError> {
    let plan = plan_moves(facts.category, facts.series.len(), rng, cfg);
    let mut sampler = Sampler { used: Vec::new() };
    let mut sentences = Vec::with_capacity(plan.steps.len());
    let mut focal_trend_said = false;
    for step in &plan.steps {
        let trend = facts.series[step.series_index].trend;
        let mut candidates = bank.query(step.move_tag, facts.category, trend, facts.arity())?;
        // The first M3 about the focal series of a trend chart names its trend.
        if step.move_tag == MoveTag::M3 && step.series_index == 0 && facts.category == ChartCategory::TemporalTrend && !focal_trend_said {
            let phrased: Vec<&Template> = candidates.iter().copied().filter(|t| t.uses("trend_phrase")).collect();
            if !phrased.is_empty() {
                candidates = phrased;
            }
            focal_trend_said = true;
        }
        let t = sampler.draw(&candidates, rng);
        sentences.push(Sentence { text: realize(t, facts, step.series_index, rng)?, move_tag: t.move_tag, template_id: t.id.clone() });
    }
    Ok(Description { image_index: facts.image_index, variant_index, sentences })
}

/// Up to `n` descriptions with exact-text duplicates removed, variant indices renumbered from 0.
pub fn generate_description_set_n(
    meta: &ChartMeta,
    series: &[DataSeries],
    bank: &TemplateBank,
    n: u32,
    rng: &mut SplitMix64,
    cfg: &PlanConfig,
) -> Result<Vec<Description>, NarrateError> {
    let facts = extract_facts(meta, series)?;
    let mut out: Vec<Description> = Vec::new();
    for v in 0..n.max(1) {
        let d = describe_facts(&facts, bank, v, rng, cfg)?;
        let text = d.text();
        if !out.iter().any(|o| o.text() == text) {
            out.push(d);
        }
    }
    for (i, d) in out.iter_mut().enumerate() {
        d.variant_index = i as u32;
    }
    Ok(out)
}

/// Three candidate descriptions, deduplicated.
pub fn generate_description_set(
    meta: &ChartMeta,
    series: &[DataSeries],
    bank: &TemplateBank,
    rng: &mut SplitMix64,
) -> Result<Vec<Description>, NarrateError> {
    generate_description_set_n(meta, series, bank, 3, rng, &PlanConfig::default())
}

/// Unstructured comparison generator: 4 to 10 sentences drawn from every
/// applicable template regardless of move, in draw order.
pub fn baseline_generate(meta: &ChartMeta, series: &[DataSeries], bank: &TemplateBank, rng: &mut SplitMix64) -> Result<Description, NarrateError> {
    let facts = extract_facts(meta, series)?;
    let k = rng.range_inclusive(4, 10);
    let mut sampler = Sampler { used: Vec::new() };
    let mut sentences = Vec::with_capacity(k);
    for _ in 0..k {
        let si = rng.below(facts.series.len());
        let trend = facts.series[si].trend;
        let candidates: Vec<&Template> = bank.templates().iter().filter(|t| t.applies(facts.category, trend, facts.arity())).collect();
        let t = sampler.draw(&candidates, rng);
        sentences.push(Sentence { text: realize(t, &facts, si, rng)?, move_tag: t.move_tag, template_id: t.id.clone() });
    }
    Ok(Description { image_index: facts.image_index, variant_index: 0, sentences })
}
