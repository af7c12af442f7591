//! BLEU and ROUGE scores for generated descriptions, reported on a 0 to 100 scale.
//!
//! Tokenization is frozen: text is lower-cased and split on whitespace, then
//! punctuation at either end of a chunk is peeled off into one token per
//! character. Punctuation inside a chunk stays, so `12,000`, `2.5` and
//! `long-term` are single tokens.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chartgen::ChartKind;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no scored pairs to report")]
    EmptyReport,
    #[error("no references given")]
    NoReferences,
}

pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.to_lowercase().split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| c.is_ascii_punctuation()).count();
        if lead == chars.len() {
            out.extend(chars.iter().map(|c| c.to_string()));
            continue;
        }
        let trail = chars.iter().rev().take_while(|c| c.is_ascii_punctuation()).count();
        out.extend(chars[..lead].iter().map(|c| c.to_string()));
        out.push(chars[lead..chars.len() - trail].iter().collect());
        out.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
    }
    out
}

fn ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut m = HashMap::new();
    if n == 0 || tokens.len() < n {
        return m;
    }
    for w in tokens.windows(n) {
        *m.entry(w.iter().map(|t| t.as_ref()).collect()).or_insert(0) += 1;
    }
    m
}

/// Sentence BLEU with uniform weights over orders `1..=max_n`.
///
/// Counts are clipped by the largest count in any single reference. An order
/// with zero matches gets add-one smoothing, except unigrams: no shared
/// unigram scores 0. Orders longer than the hypothesis are left out of the
/// mean. The brevity penalty uses the shortest reference length.
pub fn bleu<S: AsRef<str>>(hyp: &[S], refs: &[Vec<S>], max_n: usize) -> f64 {
    if hyp.is_empty() || refs.is_empty() || max_n == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n.min(hyp.len()) {
        let h = ngrams(hyp, n);
        let total: usize = h.values().sum();
        let ref_grams: Vec<_> = refs.iter().map(|r| ngrams(r, n)).collect();
        let matched: usize = h
            .iter()
            .map(|(g, &c)| c.min(ref_grams.iter().map(|r| r.get(g).copied().unwrap_or(0)).max().unwrap_or(0)))
            .sum();
        let p = if matched > 0 {
            matched as f64 / total as f64
        } else if n == 1 {
            return 0.0;
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += p.ln();
        orders += 1;
    }
    let c = hyp.len() as f64;
    let r = refs.iter().map(|r| r.len()).min().unwrap_or(0) as f64;
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    100.0 * bp * (log_sum / orders as f64).exp()
}

fn f1(overlap: usize, hyp_len: usize, ref_len: usize) -> f64 {
    if overlap == 0 || hyp_len == 0 || ref_len == 0 {
        return 0.0;
    }
    let p = overlap as f64 / hyp_len as f64;
    let r = overlap as f64 / ref_len as f64;
    100.0 * 2.0 * p * r / (p + r)
}

/// ROUGE-N F1 against the best-matching reference.
pub fn rouge_n<S: AsRef<str>>(hyp: &[S], refs: &[Vec<S>], n: usize) -> f64 {
    let h = ngrams(hyp, n);
    let hyp_total: usize = h.values().sum();
    refs.iter()
        .map(|r| {
            let rg = ngrams(r, n);
            let overlap: usize = h.iter().map(|(g, &c)| c.min(rg.get(g).copied().unwrap_or(0))).sum();
            f1(overlap, hyp_total, rg.values().sum())
        })
        .fold(0.0, f64::max)
}

pub fn lcs_len<S: AsRef<str>>(a: &[S], b: &[S]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x.as_ref() == y.as_ref() { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// ROUGE-L F1 from the longest common subsequence, best reference.
pub fn rouge_l<S: AsRef<str>>(hyp: &[S], refs: &[Vec<S>]) -> f64 {
    refs.iter().map(|r| f1(lcs_len(hyp, r), hyp.len(), r.len())).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub bleu: f64,
    pub rouge_1: f64,
    pub rouge_2: f64,
    pub rouge_l: f64,
}

impl Scores {
    fn add(&mut self, o: &Scores) {
        self.bleu += o.bleu;
        self.rouge_1 += o.rouge_1;
        self.rouge_2 += o.rouge_2;
        self.rouge_l += o.rouge_l;
    }

    fn scale(&mut self, k: f64) {
        self.bleu *= k;
        self.rouge_1 *= k;
        self.rouge_2 *= k;
        self.rouge_l *= k;
    }

    pub fn get(&self, m: RougeVariant) -> f64 {
        match m {
            RougeVariant::Rouge1 => self.rouge_1,
            RougeVariant::Rouge2 => self.rouge_2,
            RougeVariant::RougeL => self.rouge_l,
        }
    }
}

/// A hypothesis, its references, and all scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub hypothesis: Vec<String>,
    pub references: Vec<Vec<String>>,
    pub scores: Scores,
}

/// Scores raw texts with BLEU-4, ROUGE-1, ROUGE-2 and ROUGE-L.
pub fn score_pair(hyp: &str, refs: &[&str]) -> Result<ScoredPair, EvalError> {
    if refs.is_empty() {
        return Err(EvalError::NoReferences);
    }
    let h = tokenize(hyp);
    let rs: Vec<Vec<String>> = refs.iter().map(|r| tokenize(r)).collect();
    let scores = Scores { bleu: bleu(&h, &rs, 4), rouge_1: rouge_n(&h, &rs, 1), rouge_2: rouge_n(&h, &rs, 2), rouge_l: rouge_l(&h, &rs) };
    Ok(ScoredPair { hypothesis: h, references: rs, scores })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RougeVariant {
    Rouge1,
    Rouge2,
    #[default]
    RougeL,
}

impl RougeVariant {
    pub fn label(self) -> &'static str {
        match self {
            RougeVariant::Rouge1 => "ROUGE-1",
            RougeVariant::Rouge2 => "ROUGE-2",
            RougeVariant::RougeL => "ROUGE-L",
        }
    }
}

impl std::str::FromStr for RougeVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rouge-1" | "1" => Ok(RougeVariant::Rouge1),
            "rouge-2" | "2" => Ok(RougeVariant::Rouge2),
            "rouge-l" | "l" => Ok(RougeVariant::RougeL),
            _ => Err(format!("unknown ROUGE variant `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub group: String,
    pub count: usize,
    pub mean: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// `bar`, `line`, `scatter` (when present) and then `overall`.
    pub rows: Vec<ReportRow>,
    pub rouge: RougeVariant,
}

/// Report group of a chart kind; both bar orientations count as `bar`.
pub fn kind_group(kind: ChartKind) -> &'static str {
    match kind {
        ChartKind::HorizontalBar | ChartKind::VerticalBar => "bar",
        ChartKind::Line => "line",
        ChartKind::Scatter => "scatter",
    }
}

/// Unweighted per-pair means grouped by chart kind, plus the overall mean.
pub fn corpus_report(pairs: &[(ChartKind, Scores)], rouge: RougeVariant) -> Result<Report, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyReport);
    }
    let mean_of = |group: &str, it: &mut dyn Iterator<Item = &Scores>| {
        let mut sum = Scores::default();
        let mut n = 0;
        for s in it {
            sum.add(s);
            n += 1;
        }
        sum.scale(1.0 / n.max(1) as f64);
        ReportRow { group: group.to_string(), count: n, mean: sum }
    };
    let mut rows = Vec::new();
    for g in ["bar", "line", "scatter"] {
        let row = mean_of(g, &mut pairs.iter().filter(|(k, _)| kind_group(*k) == g).map(|(_, s)| s));
        if row.count > 0 {
            rows.push(row);
        }
    }
    rows.push(mean_of("overall", &mut pairs.iter().map(|(_, s)| s)));
    Ok(Report { rows, rouge })
}

/// Report with only the overall row, for pairs without kind annotations.
pub fn overall_report(scores: &[Scores], rouge: RougeVariant) -> Result<Report, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyReport);
    }
    let mut mean = Scores::default();
    scores.iter().for_each(|s| mean.add(s));
    mean.scale(1.0 / scores.len() as f64);
    Ok(Report { rows: vec![ReportRow { group: "overall".into(), count: scores.len(), mean }], rouge })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:>6} {:>8} {:>8}", "kind", "n", "BLEU", self.rouge.label())?;
        for r in &self.rows {
            writeln!(f, "{:<8} {:>6} {:>8.2} {:>8.2}", r.group, r.count, r.mean.bleu, r.mean.get(self.rouge))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(t("The cat, sat."), vec!["the", "cat", ",", "sat", "."]);
        assert!(t("").is_empty());
        assert_eq!(t("about 300g"), vec!["about", "300g"]);
        assert_eq!(t("(12,000 people)."), vec!["(", "12,000", "people", ")", "."]);
        assert_eq!(t("a -- b"), vec!["a", "-", "-", "b"]);
    }

    #[test]
    fn bleu_examples() {
        let h = t("the cat sat");
        assert!((bleu(&h, &[h.clone()], 4) - 100.0).abs() < 1e-9);
        assert_eq!(bleu(&h, &[t("dogs run far")], 4), 0.0);
        // Oracle: 100 * exp(1 - 4/3).
        assert!((bleu(&h, &[t("the cat sat down")], 4) - 71.653_131_057_378_93).abs() < 1e-9);
        assert_eq!(bleu::<String>(&[], &[h.clone()], 4), 0.0);
    }

    #[test]
    fn bleu_smooths_higher_orders() {
        // Unigrams 2/2 match, bigram 0/1 smoothed to 1/2: sqrt(1 * 0.5).
        let s = bleu(&t("b a"), &[t("a b")], 2);
        assert!((s - 100.0 * 0.5f64.sqrt()).abs() < 1e-9, "{s}");
    }

    #[test]
    fn rouge_examples() {
        let h = t("a b c");
        assert!((rouge_l(&h, &[t("a c")]) - 80.0).abs() < 1e-9);
        assert!((rouge_n(&h, &[h.clone()], 3) - 100.0).abs() < 1e-9);
        assert_eq!(rouge_n(&h, &[t("x y")], 1), 0.0);
        assert_eq!(rouge_l::<String>(&[], &[h.clone()]), 0.0);
        assert_eq!(lcs_len(&t("a b c d e"), &t("b x d e")), 3);
    }

    #[test]
    fn report_layout() {
        let a = Scores { bleu: 10.0, rouge_1: 0.0, rouge_2: 0.0, rouge_l: 20.0 };
        let b = Scores { bleu: 30.0, rouge_1: 0.0, rouge_2: 0.0, rouge_l: 40.0 };
        let c = Scores { bleu: 50.0, rouge_1: 0.0, rouge_2: 0.0, rouge_l: 90.0 };
        let r = corpus_report(&[(ChartKind::VerticalBar, a), (ChartKind::HorizontalBar, b), (ChartKind::Line, c)], RougeVariant::RougeL).unwrap();
        let groups: Vec<&str> = r.rows.iter().map(|r| r.group.as_str()).collect();
        assert_eq!(groups, vec!["bar", "line", "overall"]);
        assert_eq!(r.rows[0].mean.bleu, 20.0);
        assert_eq!(r.rows[2].mean.bleu, 30.0);
        assert!((r.rows[2].mean.rouge_l - 50.0).abs() < 1e-12);
        assert_eq!(corpus_report(&[], RougeVariant::RougeL), Err(EvalError::EmptyReport));
        assert!(r.to_string().contains("ROUGE-L"));
    }
}
