//! Trend-controlled series synthesis and rule-based trend classification.
//!
//! Series are drawn from a geometric Brownian motion on the unit grid
//! `x_i = i`:
//!
//! ```text
//! Y_i = s0 * exp((mu - sigma^2 / 2) * x_i + sigma * W_i),   W_0 = 0
//! ```
//!
//! The sign of the drift `mu - sigma^2 / 2` picks the direction, its magnitude
//! the curvature, and a [`ShapeTransform`] turns accelerating curves into
//! decelerating ones.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{mix, SplitMix64};
use crate::scalar::Scalar;

/// Maximum number of synthesis attempts before a spec is declared unrealizable.
pub const MAX_SYNTH_ATTEMPTS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrendError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("empty input series")]
    EmptyInput,
    #[error("series too short for classification: {len} points (need at least 3)")]
    TooShort { len: usize },
    #[error(
        "trend {class} unrealizable after {attempts} attempts \
         (s0={s0}, mu={mu}, sigma={sigma}, n_points={n_points}, transform={transform})"
    )]
    Unrealizable {
        class: TrendClass,
        transform: ShapeTransform,
        s0: f64,
        mu: f64,
        sigma: f64,
        n_points: usize,
        attempts: usize,
    },
}

pub type Result<T, E = TrendError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendClass {
    LinearIncrease,
    LinearDecrease,
    ConvexIncrease,
    ConcaveIncrease,
    ConvexDecrease,
    ConcaveDecrease,
    RandomFluctuation,
    Plateau,
}

impl TrendClass {
    pub const ALL: [TrendClass; 8] = [
        TrendClass::LinearIncrease,
        TrendClass::LinearDecrease,
        TrendClass::ConvexIncrease,
        TrendClass::ConcaveIncrease,
        TrendClass::ConvexDecrease,
        TrendClass::ConcaveDecrease,
        TrendClass::RandomFluctuation,
        TrendClass::Plateau,
    ];

    /// The six classes with a definite direction.
    pub const DIRECTIONAL: [TrendClass; 6] = [
        TrendClass::LinearIncrease,
        TrendClass::LinearDecrease,
        TrendClass::ConvexIncrease,
        TrendClass::ConcaveIncrease,
        TrendClass::ConvexDecrease,
        TrendClass::ConcaveDecrease,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TrendClass::LinearIncrease => "linear-increase",
            TrendClass::LinearDecrease => "linear-decrease",
            TrendClass::ConvexIncrease => "convex-increase",
            TrendClass::ConcaveIncrease => "concave-increase",
            TrendClass::ConvexDecrease => "convex-decrease",
            TrendClass::ConcaveDecrease => "concave-decrease",
            TrendClass::RandomFluctuation => "random-fluctuation",
            TrendClass::Plateau => "plateau",
        }
    }

    pub fn is_increase(self) -> bool {
        matches!(
            self,
            TrendClass::LinearIncrease | TrendClass::ConvexIncrease | TrendClass::ConcaveIncrease
        )
    }

    pub fn is_decrease(self) -> bool {
        matches!(
            self,
            TrendClass::LinearDecrease | TrendClass::ConvexDecrease | TrendClass::ConcaveDecrease
        )
    }

    pub fn is_directional(self) -> bool {
        self.is_increase() || self.is_decrease()
    }

    /// Class of the vertically mirrored series: direction and curvature flip,
    /// random and plateau are fixed points.
    pub fn reflected(self) -> TrendClass {
        match self {
            TrendClass::LinearIncrease => TrendClass::LinearDecrease,
            TrendClass::LinearDecrease => TrendClass::LinearIncrease,
            TrendClass::ConvexIncrease => TrendClass::ConcaveDecrease,
            TrendClass::ConcaveDecrease => TrendClass::ConvexIncrease,
            TrendClass::ConcaveIncrease => TrendClass::ConvexDecrease,
            TrendClass::ConvexDecrease => TrendClass::ConcaveIncrease,
            other => other,
        }
    }

    /// Synthesis recipe: sign of the drift before transforming, and the transform.
    ///
    /// | class              | drift | transform          |
    /// |--------------------|-------|--------------------|
    /// | linear-increase    |  > 0  | identity           |
    /// | linear-decrease    |  < 0  | identity           |
    /// | convex-increase    |  > 0  | identity           |
    /// | concave-increase   |  > 0  | reflect + reverse  |
    /// | convex-decrease    |  < 0  | identity           |
    /// | concave-decrease   |  < 0  | reflect + reverse  |
    /// | random-fluctuation |  = 0  | identity           |
    /// | plateau            |  = 0  | identity           |
    pub fn recipe(self) -> (DriftSign, ShapeTransform) {
        use ShapeTransform::*;
        match self {
            TrendClass::LinearIncrease | TrendClass::ConvexIncrease => (DriftSign::Positive, Identity),
            TrendClass::ConcaveIncrease => (DriftSign::Positive, ReflectReverse),
            TrendClass::LinearDecrease | TrendClass::ConvexDecrease => (DriftSign::Negative, Identity),
            TrendClass::ConcaveDecrease => (DriftSign::Negative, ReflectReverse),
            TrendClass::RandomFluctuation | TrendClass::Plateau => (DriftSign::Zero, Identity),
        }
    }
}

impl fmt::Display for TrendClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrendClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TrendClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown trend class `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftSign {
    Positive,
    Negative,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeTransform {
    Identity,
    VerticalReflect,
    TimeReverse,
    /// Reflect, then reverse: a half-turn of the curve.
    ReflectReverse,
}

impl ShapeTransform {
    pub const ALL: [ShapeTransform; 4] = [
        ShapeTransform::Identity,
        ShapeTransform::VerticalReflect,
        ShapeTransform::TimeReverse,
        ShapeTransform::ReflectReverse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeTransform::Identity => "identity",
            ShapeTransform::VerticalReflect => "vertical-reflect",
            ShapeTransform::TimeReverse => "time-reverse",
            ShapeTransform::ReflectReverse => "vertical-reflect+time-reverse",
        }
    }
}

impl fmt::Display for ShapeTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Geometric Brownian motion parameters on the unit x-grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmParams<T = f64> {
    pub s0: T,
    pub mu: T,
    pub sigma: T,
    pub n_points: usize,
}

impl<T: Scalar> GbmParams<T> {
    pub fn new(s0: T, mu: T, sigma: T, n_points: usize) -> Result<Self> {
        let p = Self { s0, mu, sigma, n_points };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0.is_finite() && self.s0 > T::zero()) {
            return Err(TrendError::InvalidParam {
                field: "s0",
                reason: format!("must be finite and > 0, got {}", self.s0),
            });
        }
        if !self.mu.is_finite() {
            return Err(TrendError::InvalidParam {
                field: "mu",
                reason: format!("must be finite, got {}", self.mu),
            });
        }
        if !(self.sigma.is_finite() && self.sigma >= T::zero()) {
            return Err(TrendError::InvalidParam {
                field: "sigma",
                reason: format!("must be finite and >= 0, got {}", self.sigma),
            });
        }
        if self.n_points < 2 {
            return Err(TrendError::InvalidParam {
                field: "n_points",
                reason: format!("must be >= 2, got {}", self.n_points),
            });
        }
        Ok(())
    }

    /// `mu - sigma^2 / 2`.
    pub fn drift(&self) -> T {
        self.mu - self.sigma * self.sigma / T::lit(2.0)
    }
}

/// Seeded GBM path. `Y_0 == s0` exactly; draws follow `docs/rng.md`.
pub fn gbm_path<T: Scalar>(params: &GbmParams<T>, seed: u64) -> Result<Vec<T>> {
    params.validate()?;
    let mut rng = SplitMix64::new(seed);
    let drift = params.drift();
    let mut w = T::zero();
    let mut out = Vec::with_capacity(params.n_points);
    out.push(params.s0);
    for i in 1..params.n_points {
        w = w + T::lit(rng.next_normal());
        let x = T::from_usize_lossy(i);
        out.push(params.s0 * (drift * x + params.sigma * w).exp());
    }
    Ok(out)
}

pub fn apply_transform<T: Scalar>(series: &[T], t: ShapeTransform) -> Result<Vec<T>> {
    if series.is_empty() {
        return Err(TrendError::EmptyInput);
    }
    let reflect = |s: &[T]| -> Vec<T> {
        let (lo, hi) = min_max(s);
        s.iter().map(|&y| (hi + lo) - y).collect()
    };
    Ok(match t {
        ShapeTransform::Identity => series.to_vec(),
        ShapeTransform::VerticalReflect => reflect(series),
        ShapeTransform::TimeReverse => series.iter().rev().copied().collect(),
        ShapeTransform::ReflectReverse => {
            let mut v = reflect(series);
            v.reverse();
            v
        }
    })
}

/// Requested trend: the target class plus the GBM parameters and transform that realize it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendSpec<T = f64> {
    pub class: TrendClass,
    pub params: GbmParams<T>,
    pub transform: ShapeTransform,
}

/// Knobs for [`TrendSpec::preset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetShape {
    /// Total log-change `|drift| * (n - 1)` for linear classes.
    pub linear_log_change: f64,
    /// Total log-change for convex/concave classes.
    pub curved_log_change: f64,
    /// Per-step volatility as a fraction of the per-step drift.
    pub noise_fraction: f64,
    pub random_sigma: f64,
    pub plateau_sigma: f64,
    pub s0: f64,
}

impl Default for PresetShape {
    fn default() -> Self {
        Self {
            linear_log_change: 0.4,
            curved_log_change: 3.0,
            noise_fraction: 0.1,
            random_sigma: 0.1,
            plateau_sigma: 0.003,
            s0: 100.0,
        }
    }
}

impl<T: Scalar> TrendSpec<T> {
    /// Default preset for `class` on an `n_points` grid.
    pub fn preset(class: TrendClass, n_points: usize) -> Self {
        Self::preset_with(class, n_points, &PresetShape::default())
    }

    pub fn preset_with(class: TrendClass, n_points: usize, shape: &PresetShape) -> Self {
        let steps = n_points.saturating_sub(1).max(1) as f64;
        let (sign, transform) = class.recipe();
        let (drift, sigma) = match class {
            TrendClass::LinearIncrease | TrendClass::LinearDecrease => {
                let d = shape.linear_log_change / steps;
                (d, shape.noise_fraction * d)
            }
            TrendClass::RandomFluctuation => (0.0, shape.random_sigma),
            TrendClass::Plateau => (0.0, shape.plateau_sigma),
            _ => {
                let d = shape.curved_log_change / steps;
                (d, shape.noise_fraction * d)
            }
        };
        let drift = match sign {
            DriftSign::Positive => drift,
            DriftSign::Negative => -drift,
            DriftSign::Zero => 0.0,
        };
        let sigma = T::lit(sigma);
        let mu = T::lit(drift) + sigma * sigma / T::lit(2.0);
        Self {
            class,
            params: GbmParams { s0: T::lit(shape.s0), mu, sigma, n_points },
            transform,
        }
    }

    /// Parameter validity plus drift-sign consistency with the class.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let drift = self.params.drift();
        let tol = T::lit(1e-9);
        let (sign, _) = self.class.recipe();
        let ok = match sign {
            DriftSign::Positive => drift > T::zero(),
            DriftSign::Negative => drift < T::zero(),
            DriftSign::Zero => drift.abs() <= tol,
        };
        if !ok {
            return Err(TrendError::InvalidParam {
                field: "mu",
                reason: format!("drift {} inconsistent with class {}", drift, self.class),
            });
        }
        if self.class == TrendClass::Plateau && self.params.sigma > T::lit(0.01) {
            return Err(TrendError::InvalidParam {
                field: "sigma",
                reason: format!("plateau needs sigma <= 0.01, got {}", self.params.sigma),
            });
        }
        Ok(())
    }

    fn unrealizable(&self, attempts: usize) -> TrendError {
        TrendError::Unrealizable {
            class: self.class,
            transform: self.transform,
            s0: self.params.s0.to_f64_lossy(),
            mu: self.params.mu.to_f64_lossy(),
            sigma: self.params.sigma.to_f64_lossy(),
            n_points: self.params.n_points,
            attempts,
        }
    }
}

/// GBM path, transformed, resampled until it classifies as `spec.class`.
///
/// Attempt 0 uses `seed`; attempt `k` uses `mix(seed, k)`.
pub fn synth_trend_series<T: Scalar>(spec: &TrendSpec<T>, seed: u64) -> Result<Vec<T>> {
    synth_trend_series_with(spec, seed, &ClassifierConfig::default())
}

pub fn synth_trend_series_with<T: Scalar>(
    spec: &TrendSpec<T>,
    seed: u64,
    cfg: &ClassifierConfig,
) -> Result<Vec<T>> {
    spec.validate()?;
    if spec.params.n_points < 3 {
        return Err(TrendError::TooShort { len: spec.params.n_points });
    }
    for attempt in 0..MAX_SYNTH_ATTEMPTS {
        let s = if attempt == 0 { seed } else { mix(seed, attempt as u64) };
        let path = gbm_path(&spec.params, s)?;
        let shaped = apply_transform(&path, spec.transform)?;
        if classify_trend_with(&shaped, cfg)? == spec.class {
            return Ok(shaped);
        }
    }
    Err(spec.unrealizable(MAX_SYNTH_ATTEMPTS))
}

/// Thresholds for [`classify_trend`], in normalized units (both axes mapped to `[0, 1]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    /// `range / |mean|` below this is a plateau.
    pub plateau_ratio: f64,
    /// `|slope|` below this is a random fluctuation.
    pub random_slope: f64,
    /// `|mean second derivative|` below this is linear.
    pub linear_curvature: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { plateau_ratio: 0.05, random_slope: 0.5, linear_curvature: 1.0 }
    }
}

/// Shape statistics the classifier thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFeatures<T = f64> {
    pub relative_range: T,
    /// Least-squares slope of the min-max normalized series against `x` in `[0, 1]`.
    pub slope: T,
    /// Mean second difference of the normalized series divided by `h^2`, `h = 1/(n-1)`.
    pub curvature: T,
}

pub fn trend_features<T: Scalar>(series: &[T]) -> Result<TrendFeatures<T>> {
    let n = series.len();
    if n < 3 {
        return Err(TrendError::TooShort { len: n });
    }
    let (lo, hi) = min_max(series);
    let range = hi - lo;
    let nt = T::from_usize_lossy(n);
    let mean = series.iter().fold(T::zero(), |a, &b| a + b) / nt;
    let relative_range = if range == T::zero() {
        T::zero()
    } else if mean == T::zero() {
        T::infinity()
    } else {
        range / mean.abs()
    };
    if range == T::zero() {
        return Ok(TrendFeatures { relative_range, slope: T::zero(), curvature: T::zero() });
    }
    let norm: Vec<T> = series.iter().map(|&y| (y - lo) / range).collect();
    let h = T::one() / T::from_usize_lossy(n - 1);
    let xs: Vec<T> = (0..n).map(|i| T::from_usize_lossy(i) * h).collect();
    let x_mean = xs.iter().fold(T::zero(), |a, &b| a + b) / nt;
    let y_mean = norm.iter().fold(T::zero(), |a, &b| a + b) / nt;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&norm) {
        sxy = sxy + (x - x_mean) * (y - y_mean);
        sxx = sxx + (x - x_mean) * (x - x_mean);
    }
    let slope = sxy / sxx;
    let second: T = norm
        .windows(3)
        .map(|w| w[2] - w[1] - w[1] + w[0])
        .fold(T::zero(), |a, b| a + b);
    let curvature = second / T::from_usize_lossy(n - 2) / (h * h);
    Ok(TrendFeatures { relative_range, slope, curvature })
}

/// Classifies with the default thresholds.
pub fn classify_trend<T: Scalar>(series: &[T]) -> Result<TrendClass> {
    classify_trend_with(series, &ClassifierConfig::default())
}

pub fn classify_trend_with<T: Scalar>(series: &[T], cfg: &ClassifierConfig) -> Result<TrendClass> {
    let f = trend_features(series)?;
    if f.relative_range < T::lit(cfg.plateau_ratio) {
        return Ok(TrendClass::Plateau);
    }
    if f.slope.abs() < T::lit(cfg.random_slope) {
        return Ok(TrendClass::RandomFluctuation);
    }
    let up = f.slope > T::zero();
    let class = if f.curvature.abs() < T::lit(cfg.linear_curvature) {
        if up {
            TrendClass::LinearIncrease
        } else {
            TrendClass::LinearDecrease
        }
    } else {
        match (up, f.curvature > T::zero()) {
            (true, true) => TrendClass::ConvexIncrease,
            (true, false) => TrendClass::ConcaveIncrease,
            (false, true) => TrendClass::ConvexDecrease,
            (false, false) => TrendClass::ConcaveDecrease,
        }
    };
    Ok(class)
}

/// Like [`classify_trend`] but also accepts two-point series, which can only be
/// a plateau or a linear rise/fall.
pub fn classify_trend_lenient<T: Scalar>(series: &[T], cfg: &ClassifierConfig) -> Result<TrendClass> {
    match series {
        [] => Err(TrendError::EmptyInput),
        [_] => Err(TrendError::TooShort { len: 1 }),
        [a, b] => {
            let mean = (*a + *b) / T::lit(2.0);
            let diff = *b - *a;
            let flat = diff == T::zero()
                || (mean != T::zero() && (diff / mean).abs() < T::lit(cfg.plateau_ratio));
            Ok(if flat {
                TrendClass::Plateau
            } else if diff > T::zero() {
                TrendClass::LinearIncrease
            } else {
                TrendClass::LinearDecrease
            })
        }
        _ => classify_trend_with(series, cfg),
    }
}

fn min_max<T: Scalar>(s: &[T]) -> (T, T) {
    s.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &y| (lo.min(y), hi.max(y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_zero_is_closed_form() {
        let p = GbmParams::new(100.0, 0.1, 0.0, 5).unwrap();
        let path: Vec<f64> = gbm_path(&p, 12345).unwrap();
        let expect = [100.0, 110.51709180756477, 122.14027581601698, 134.98588075760032, 149.18246976412703];
        for (a, b) in path.iter().zip(expect) {
            assert!(((a - b) / b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(path[0], 100.0);
    }

    #[test]
    fn invalid_params_name_the_field() {
        let cases = [
            (GbmParams { s0: 0.0, mu: 0.1, sigma: 0.1, n_points: 5 }, "s0"),
            (GbmParams { s0: 1.0, mu: f64::NAN, sigma: 0.1, n_points: 5 }, "mu"),
            (GbmParams { s0: 1.0, mu: 0.1, sigma: -0.1, n_points: 5 }, "sigma"),
            (GbmParams { s0: 1.0, mu: 0.1, sigma: 0.1, n_points: 1 }, "n_points"),
        ];
        for (p, name) in cases {
            match gbm_path(&p, 0) {
                Err(TrendError::InvalidParam { field, .. }) => assert_eq!(field, name),
                other => panic!("expected param error for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn transform_examples() {
        let s = [1.0, 2.0, 4.0];
        assert_eq!(apply_transform(&s, ShapeTransform::Identity).unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(apply_transform(&s, ShapeTransform::VerticalReflect).unwrap(), vec![4.0, 3.0, 1.0]);
        assert_eq!(apply_transform(&s, ShapeTransform::TimeReverse).unwrap(), vec![4.0, 2.0, 1.0]);
        assert_eq!(apply_transform(&s, ShapeTransform::ReflectReverse).unwrap(), vec![1.0, 3.0, 4.0]);
        assert_eq!(apply_transform::<f64>(&[], ShapeTransform::Identity), Err(TrendError::EmptyInput));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_trend(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), TrendClass::LinearIncrease);
        assert_eq!(classify_trend(&[5.0, 5.0, 5.0, 5.0]).unwrap(), TrendClass::Plateau);
        assert_eq!(classify_trend(&[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap(), TrendClass::ConvexIncrease);
        assert_eq!(classify_trend(&[16.0, 8.0, 4.0, 2.0, 1.0]).unwrap(), TrendClass::ConvexDecrease);
        assert_eq!(classify_trend(&[1.0, 9.0, 13.0, 15.0, 16.0]).unwrap(), TrendClass::ConcaveIncrease);
        assert_eq!(classify_trend(&[10.0, 20.0, 10.0, 20.0, 10.0]).unwrap(), TrendClass::RandomFluctuation);
        assert_eq!(classify_trend(&[1.0, 2.0]), Err(TrendError::TooShort { len: 2 }));
    }

    #[test]
    fn hand_computed_features() {
        // [1,2,4,8,16]: normalized (0, 1/15, 3/15, 7/15, 1); second differences
        // 1/15, 2/15, 4/15 average 7/45, divided by h^2 = 1/16.
        let f: TrendFeatures<f64> = trend_features(&[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        assert!((f.curvature - 7.0 / 45.0 * 16.0).abs() < 1e-12);
        assert!((f.relative_range - 15.0 / 6.2).abs() < 1e-12);
    }

    #[test]
    fn lenient_two_points() {
        let cfg = ClassifierConfig::default();
        assert_eq!(classify_trend_lenient(&[10.0, 20.0], &cfg).unwrap(), TrendClass::LinearIncrease);
        assert_eq!(classify_trend_lenient(&[20.0, 10.0], &cfg).unwrap(), TrendClass::LinearDecrease);
        assert_eq!(classify_trend_lenient(&[100.0, 101.0], &cfg).unwrap(), TrendClass::Plateau);
    }

    #[test]
    fn presets_validate_and_follow_recipe() {
        for class in TrendClass::ALL {
            for n in 3..=8 {
                let spec = TrendSpec::<f64>::preset(class, n);
                spec.validate().unwrap();
                assert_eq!(spec.transform, class.recipe().1);
            }
        }
    }

    #[test]
    fn drift_sign_mismatch_rejected() {
        let mut spec = TrendSpec::<f64>::preset(TrendClass::LinearIncrease, 8);
        spec.params.mu = -0.2;
        assert!(matches!(spec.validate(), Err(TrendError::InvalidParam { field: "mu", .. })));
    }

    #[test]
    fn unrealizable_after_ten_attempts() {
        // A plateau-strength series can never read as a steep curve.
        let mut spec = TrendSpec::<f64>::preset(TrendClass::ConvexIncrease, 8);
        spec.params.mu = 1e-4;
        spec.params.sigma = 0.0;
        match synth_trend_series(&spec, 1) {
            Err(TrendError::Unrealizable { class, attempts, .. }) => {
                assert_eq!(class, TrendClass::ConvexIncrease);
                assert_eq!(attempts, MAX_SYNTH_ATTEMPTS);
            }
            other => panic!("expected unrealizable, got {other:?}"),
        }
    }

    #[test]
    fn f32_path_tracks_f64() {
        let p64 = GbmParams::new(50.0, 0.03, 0.02, 8).unwrap();
        let p32 = GbmParams::new(50.0f32, 0.03, 0.02, 8).unwrap();
        let a = gbm_path(&p64, 9).unwrap();
        let b = gbm_path(&p32, 9).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(((*x - *y as f64) / x).abs() < 1e-5);
        }
    }

    #[test]
    fn class_names_round_trip() {
        for c in TrendClass::ALL {
            assert_eq!(c.as_str().parse::<TrendClass>().unwrap(), c);
            assert_eq!(c.reflected().reflected(), c);
        }
    }
}
