//! Facts read off a rendered chart.

use serde::Serialize;

use super::NarrateError;
use crate::catalog::DataSeries;
use crate::chartgen::{ChartKind, ChartMeta};
use crate::templatebank::ChartCategory;
use crate::trend::{classify_trend_lenient, ClassifierConfig, TrendClass};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFacts {
    pub name: String,
    pub x_first: String,
    pub x_last: String,
    pub y_first: f64,
    pub y_last: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// First x label holding the minimum.
    pub x_at_min: String,
    /// First x label holding the maximum.
    pub x_at_max: String,
    pub y_mean: f64,
    pub trend: TrendClass,
    /// `y_last - y_first`.
    pub delta: f64,
    /// `delta / y_first`, `None` when the series starts at zero.
    pub relative_delta: Option<f64>,
}

/// Which series lies above the other over the shared x positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    First,
    Second,
    Tie,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossFacts {
    pub dominance: Dominance,
    /// First series minus second at the first x position.
    pub gap_first: f64,
    pub gap_last: f64,
    /// Consecutive x labels between which the sign of the gap flips.
    pub crossings: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartFacts {
    pub image_index: u64,
    pub category: ChartCategory,
    pub kind: ChartKind,
    pub kind_phrase: String,
    pub title: String,
    /// Lower-case name of the category axis, e.g. `year` or `country`.
    pub x_label: String,
    /// Indicator name as it reads inside a sentence.
    pub y_label: String,
    pub unit: String,
    pub temporal: bool,
    pub x_labels: Vec<String>,
    pub series: Vec<SeriesFacts>,
    pub cross: Option<CrossFacts>,
}

impl ChartFacts {
    pub fn arity(&self) -> u8 {
        self.series.len() as u8
    }

    /// Every numeric fact a sentence may quote.
    pub fn numbers(&self) -> Vec<f64> {
        let mut out = vec![self.x_labels.len() as f64];
        for s in &self.series {
            out.extend([s.y_first, s.y_last, s.y_min, s.y_max, s.y_mean, s.delta.abs()]);
        }
        out
    }

    /// Label texts that may appear verbatim in a sentence.
    pub fn labels(&self) -> Vec<String> {
        let mut out = vec![self.title.clone(), self.y_label.clone(), self.x_label.clone(), self.unit.clone()];
        out.extend(self.x_labels.iter().cloned());
        out.extend(self.series.iter().map(|s| s.name.clone()));
        out
    }
}

fn lower_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn series_facts(s: &DataSeries) -> Result<SeriesFacts, NarrateError> {
    let n = s.y_values.len();
    if n < 2 || n != s.x_labels.len() {
        return Err(NarrateError::Inconsistent(format!("series `{}` has {} labels and {n} values", s.series_name, s.x_labels.len())));
    }
    let y = &s.y_values;
    let (mut imin, mut imax) = (0, 0);
    for i in 1..n {
        if y[i] < y[imin] {
            imin = i;
        }
        if y[i] > y[imax] {
            imax = i;
        }
    }
    let delta = y[n - 1] - y[0];
    Ok(SeriesFacts {
        name: s.series_name.clone(),
        x_first: s.x_labels[0].clone(),
        x_last: s.x_labels[n - 1].clone(),
        y_first: y[0],
        y_last: y[n - 1],
        y_min: y[imin],
        y_max: y[imax],
        x_at_min: s.x_labels[imin].clone(),
        x_at_max: s.x_labels[imax].clone(),
        y_mean: y.iter().sum::<f64>() / n as f64,
        trend: classify_trend_lenient(y, &ClassifierConfig::default()).map_err(|e| NarrateError::Inconsistent(e.to_string()))?,
        delta,
        relative_delta: if y[0] != 0.0 { Some(delta / y[0]) } else { None },
    })
}

pub fn cross_facts(a: &DataSeries, b: &DataSeries) -> CrossFacts {
    let gaps: Vec<f64> = a.y_values.iter().zip(&b.y_values).map(|(x, y)| x - y).collect();
    let dominance = if gaps.iter().all(|g| *g == 0.0) {
        Dominance::Tie
    } else if gaps.iter().all(|g| *g >= 0.0) {
        Dominance::First
    } else if gaps.iter().all(|g| *g <= 0.0) {
        Dominance::Second
    } else {
        Dominance::Mixed
    };
    let crossings = (0..gaps.len().saturating_sub(1))
        .filter(|&i| gaps[i] * gaps[i + 1] < 0.0)
        .map(|i| (a.x_labels[i].clone(), a.x_labels[i + 1].clone()))
        .collect();
    CrossFacts { dominance, gap_first: gaps[0], gap_last: gaps[gaps.len() - 1], crossings }
}

/// Category of a chart from whether it is temporal and the trend of its first series.
pub fn chart_category(temporal: bool, focal: TrendClass) -> ChartCategory {
    match (temporal, focal.is_directional()) {
        (false, _) => ChartCategory::Categorical,
        (true, true) => ChartCategory::TemporalTrend,
        (true, false) => ChartCategory::TemporalRandom,
    }
}

/// Reads the facts of a chart; `series` must match the meta's data points exactly.
pub fn extract_facts(meta: &ChartMeta, series: &[DataSeries]) -> Result<ChartFacts, NarrateError> {
    if series.len() != meta.series.len() || series.is_empty() || series.len() > 2 {
        return Err(NarrateError::Inconsistent(format!("{} series for {} in meta", series.len(), meta.series.len())));
    }
    for (s, m) in series.iter().zip(&meta.series) {
        let same = s.series_name == m.name
            && s.y_values.len() == m.points.len()
            && s.x_labels.iter().zip(&s.y_values).zip(&m.points).all(|((x, y), p)| *x == p.x_label && *y == p.y_value);
        if !same {
            return Err(NarrateError::Inconsistent(format!("series `{}` does not match the meta data points", s.series_name)));
        }
    }
    let facts: Vec<SeriesFacts> = series.iter().map(series_facts).collect::<Result<_, _>>()?;
    let cross = (series.len() == 2).then(|| cross_facts(&series[0], &series[1]));
    Ok(ChartFacts {
        image_index: meta.image_index,
        category: chart_category(meta.temporal, facts[0].trend),
        kind: meta.chart_kind,
        kind_phrase: meta.chart_kind.phrase().to_string(),
        title: meta.title.text.clone(),
        x_label: lower_first(&meta.x_label.text),
        y_label: meta.indicator.clone(),
        unit: meta.y_unit.clone(),
        temporal: meta.temporal,
        x_labels: series[0].x_labels.clone(),
        series: facts,
        cross,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::ValueKind;

    fn ds(name: &str, ys: &[f64]) -> DataSeries {
        DataSeries {
            series_name: name.into(),
            x_labels: (0..ys.len()).map(|i| (2014 + i).to_string()).collect(),
            y_values: ys.to_vec(),
            y_unit: "t".into(),
            temporal: true,
            value_kind: ValueKind::Float,
        }
    }

    #[test]
    fn single_series_facts() {
        let f = series_facts(&ds("A", &[10.0, 20.0, 30.0])).unwrap();
        assert_eq!((f.y_max, f.x_at_max.as_str(), f.delta), (30.0, "2016", 20.0));
        assert_eq!(f.y_mean, 20.0);
    }

    #[test]
    fn dominance_and_crossings() {
        let a = ds("A", &[1.0, 2.0, 3.0]);
        assert_eq!(cross_facts(&a, &a).dominance, Dominance::Tie);
        assert_eq!(cross_facts(&a, &ds("B", &[0.0, 1.0, 3.0])).dominance, Dominance::First);
        let c = cross_facts(&ds("A", &[1.0, 5.0, 2.0, 6.0]), &ds("B", &[3.0, 3.0, 3.0, 3.0]));
        assert_eq!(c.dominance, Dominance::Mixed);
        assert_eq!(
            c.crossings,
            vec![("2014".into(), "2015".into()), ("2015".into(), "2016".into()), ("2016".into(), "2017".into())]
        );
    }
}
