use proptest::prelude::*;

use chartcorpus::catalog::{load_catalog, sample_series, synth_catalog, write_catalog, DataSeries, Indicator, SampleOptions, SeriesSample, ValueKind};
use chartcorpus::chartgen::{build_chart_spec, check_meta, render, series_from_meta, AxisOrientation, ChartKind};
use chartcorpus::evalmetrics::{bleu, rouge_l, rouge_n};
use chartcorpus::narrate::{
    check_move_order, extract_facts, format_plain, generate_description, hallucinated_numbers, plan_moves, round_sig, PlanConfig,
};
use chartcorpus::rng::SplitMix64;
use chartcorpus::templatebank::{parse_bank, ChartCategory, MoveTag, TemplateBank};
use chartcorpus::trend::{apply_transform, classify_trend, gbm_path, trend_features, GbmParams, ShapeTransform, TrendClass};

fn series_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..1.0e6, 3..=8)
}

fn temporal(name: &str, ys: &[f64]) -> DataSeries {
    DataSeries {
        series_name: name.into(),
        x_labels: (0..ys.len()).map(|i| (1990 + i).to_string()).collect(),
        y_values: ys.to_vec(),
        y_unit: "tonnes".into(),
        temporal: true,
        value_kind: ValueKind::Float,
    }
}

fn sample_of(series: Vec<DataSeries>) -> SeriesSample {
    SeriesSample {
        indicator: Indicator { id: "i1".into(), name: "rice production".into(), unit: "tonnes".into(), value_kind: ValueKind::Float },
        entity_kind: "country".into(),
        series,
    }
}

fn tokens() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]).prop_map(String::from), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gbm_starts_at_s0_and_is_deterministic(s0 in 0.01f64..1e6, mu in -0.5f64..0.5, sigma in 0.0f64..0.3, n in 2usize..20, seed: u64) {
        let p = GbmParams::new(s0, mu, sigma, n).unwrap();
        let a = gbm_path(&p, seed).unwrap();
        prop_assert_eq!(a[0], s0);
        prop_assert_eq!(a, gbm_path(&p, seed).unwrap());
    }

    #[test]
    fn zero_volatility_is_the_closed_form(s0 in 0.01f64..1e6, mu in -0.5f64..0.5, n in 2usize..20, seed: u64) {
        let path = gbm_path(&GbmParams::new(s0, mu, 0.0, n).unwrap(), seed).unwrap();
        for (i, y) in path.iter().enumerate() {
            let want = s0 * (mu * i as f64).exp();
            prop_assert!((y - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn transforms_are_involutions(s in series_strategy()) {
        prop_assert_eq!(apply_transform(&apply_transform(&s, ShapeTransform::TimeReverse).unwrap(), ShapeTransform::TimeReverse).unwrap(), s.clone());
        for t in [ShapeTransform::Identity, ShapeTransform::VerticalReflect, ShapeTransform::ReflectReverse] {
            let back = apply_transform(&apply_transform(&s, t).unwrap(), t).unwrap();
            for (a, b) in back.iter().zip(&s) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn reflection_swaps_direction(s in series_strategy()) {
        let r = apply_transform(&s, ShapeTransform::VerticalReflect).unwrap();
        let (f, g) = (trend_features(&s).unwrap(), trend_features(&r).unwrap());
        prop_assert!((f.slope + g.slope).abs() < 1e-9);
        prop_assert!((f.curvature + g.curvature).abs() < 1e-6 * f.curvature.abs().max(1.0));
        // Away from the plateau cut, where the shifted mean could tip the ratio.
        let near_cut = |x: f64| (0.04..0.06).contains(&x);
        let near_slope = (f.slope.abs() - 0.5).abs() < 1e-9;
        let near_curv = (f.curvature.abs() - 1.0).abs() < 1e-6;
        if !near_cut(f.relative_range) && !near_cut(g.relative_range) && !near_slope && !near_curv {
            let (a, b) = (classify_trend(&s).unwrap(), classify_trend(&r).unwrap());
            if a != TrendClass::Plateau && b != TrendClass::Plateau {
                prop_assert_eq!(b, a.reflected());
            }
        }
    }

    #[test]
    fn rendered_meta_holds_its_invariants(a in series_strategy(), two: bool, kind in 0usize..4, seed: u64) {
        let mut series = vec![temporal("Chile", &a)];
        if two {
            series.push(temporal("Peru", &a.iter().rev().map(|v| v * 0.7).collect::<Vec<_>>()));
        }
        let kind = ChartKind::ALL[kind];
        let spec = build_chart_spec(&sample_of(series), kind, 3, &mut SplitMix64::new(seed)).unwrap();
        let (svg, meta) = render(&spec).unwrap();
        prop_assert!(check_meta(&meta).is_empty(), "{:?}", check_meta(&meta));
        prop_assert_eq!(&render(&spec).unwrap().0, &svg);
        prop_assert!((1..=2).contains(&meta.legend.entries.len()));
        let axis = meta.value_axis.transform();
        for s in &meta.series {
            for p in &s.points {
                let c = if kind == ChartKind::HorizontalBar { p.canvas[0] } else { p.canvas[1] };
                prop_assert_eq!(meta.value_axis.orientation == AxisOrientation::Horizontal, kind == ChartKind::HorizontalBar);
                prop_assert!((axis.forward(p.y_value) - c).abs() <= 0.5);
            }
        }
    }

    #[test]
    fn descriptions_are_ordered_grounded_and_deterministic(a in series_strategy(), two: bool, seed: u64) {
        let mut series = vec![temporal("Chile", &a)];
        if two {
            series.push(temporal("Peru", &a.iter().map(|v| v * 1.3 + 7.0).collect::<Vec<_>>()));
        }
        let spec = build_chart_spec(&sample_of(series), ChartKind::Line, 1, &mut SplitMix64::new(seed)).unwrap();
        let meta = render(&spec).unwrap().1;
        let series = series_from_meta(&meta);
        let bank = TemplateBank::bundled();
        let d = generate_description(&meta, &series, &bank, 0, &mut SplitMix64::new(seed)).unwrap();
        prop_assert!(check_move_order(&d.tags()).is_ok());
        let facts = extract_facts(&meta, &series).unwrap();
        prop_assert!(hallucinated_numbers(&d.text(), &facts).is_empty(), "{}", d.text());
        let residual = d.text().contains(['{', '}']);
        prop_assert!(!residual);
        prop_assert_eq!(d, generate_description(&meta, &series, &bank, 0, &mut SplitMix64::new(seed)).unwrap());
    }

    #[test]
    fn plans_satisfy_order_rules(seed: u64, cat in 0usize..3, arity in 1usize..=2, p2 in 0.0f64..=1.0, p4 in 0.0f64..=1.0) {
        let cfg = PlanConfig { m2_probability: p2, m4_probability: p4, ..PlanConfig::default() };
        let plan = plan_moves(ChartCategory::ALL[cat], arity, &mut SplitMix64::new(seed), &cfg);
        prop_assert!(check_move_order(&plan.tags()).is_ok());
    }

    #[test]
    fn two_figure_rounding_stays_close(v in 1e-3f64..3.5e15) {
        let r = round_sig(v, 2);
        prop_assert!((r - v).abs() <= 0.05 * v);
        let (s, exact) = format_plain(v);
        prop_assert_eq!(exact, (r - v).abs() <= 1e-9 * v);
        prop_assert!(s.chars().any(|c| c.is_ascii_digit()));
    }

    #[test]
    fn metric_identity_and_bounds(h in tokens(), r in tokens()) {
        prop_assert!((bleu(&h, &[h.clone()], 4) - 100.0).abs() < 1e-9);
        prop_assert!((rouge_n(&h, &[h.clone()], 1) - 100.0).abs() < 1e-9);
        prop_assert!((rouge_l(&h, &[h.clone()]) - 100.0).abs() < 1e-9);
        for s in [bleu(&h, &[r.clone()], 4), rouge_n(&h, &[r.clone()], 2), rouge_l(&h, &[r.clone()])] {
            prop_assert!((0.0..=100.0 + 1e-9).contains(&s));
        }
    }

    #[test]
    fn metrics_ignore_reference_order_and_grow_with_references(h in tokens(), r1 in tokens(), r2 in tokens()) {
        let one = vec![r1.clone()];
        let ab = vec![r1.clone(), r2.clone()];
        let ba = vec![r2, r1];
        prop_assert_eq!(bleu(&h, &ab, 4), bleu(&h, &ba, 4));
        prop_assert_eq!(rouge_l(&h, &ab), rouge_l(&h, &ba));
        prop_assert_eq!(rouge_n(&h, &ab, 2), rouge_n(&h, &ba, 2));
        prop_assert!(bleu(&h, &ab, 4) + 1e-9 >= bleu(&h, &one, 4));
        prop_assert!(rouge_l(&h, &ab) + 1e-9 >= rouge_l(&h, &one));
        prop_assert!(rouge_n(&h, &ab, 1) + 1e-9 >= rouge_n(&h, &one, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampled_series_respect_bounds(seed: u64, temporal_flag: bool, arity in 1usize..=2) {
        let cat = synth_catalog(seed, 12, 20).unwrap();
        let opts = SampleOptions::default();
        let a = sample_series(&cat, temporal_flag, arity, opts, &mut SplitMix64::new(seed)).unwrap();
        prop_assert_eq!(&a, &sample_series(&cat, temporal_flag, arity, opts, &mut SplitMix64::new(seed)).unwrap());
        for s in &a.series {
            prop_assert!((2..=8).contains(&s.y_values.len()));
            prop_assert!(s.y_values.iter().all(|v| s.value_kind.admits(*v)));
        }
    }

    #[test]
    fn catalog_file_round_trip(seed: u64) {
        let cat = synth_catalog(seed, 4, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_catalog(&cat, &path).unwrap();
        prop_assert!(load_catalog(&path).unwrap() == cat);
    }
}

#[test]
fn bank_round_trip_and_obligatory_queries() {
    let bank = TemplateBank::bundled();
    let again = parse_bank(&bank.serialize(), "rt").unwrap();
    assert_eq!(bank.templates(), again.templates());
    for m in MoveTag::OBLIGATORY {
        for c in ChartCategory::ALL {
            for t in TrendClass::ALL {
                for a in [1, 2] {
                    assert!(!bank.query(m, c, t, a).unwrap().is_empty());
                }
            }
        }
    }
}
