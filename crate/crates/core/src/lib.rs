//! Synthetic chart corpus: statistics catalogs, trend-shaped series, SVG charts with
//! pixel-level metadata, move-structured descriptions, and BLEU/ROUGE scoring.
//!
//! The numeric core (`trend`, tick and axis math) is generic over [`scalar::Scalar`];
//! the aliases below pin it to `f32` or `f64`.

pub mod catalog;
pub mod chartgen;
pub mod corpus;
pub mod evalmetrics;
pub mod narrate;
pub mod rng;
pub mod scalar;
pub mod templatebank;
pub mod trend;

pub use scalar::Scalar;

pub type GbmParamsF32 = trend::GbmParams<f32>;
pub type GbmParamsF64 = trend::GbmParams<f64>;
pub type TrendSpecF32 = trend::TrendSpec<f32>;
pub type TrendSpecF64 = trend::TrendSpec<f64>;
pub type TrendFeaturesF32 = trend::TrendFeatures<f32>;
pub type TrendFeaturesF64 = trend::TrendFeatures<f64>;
pub type LinearAxisF32 = chartgen::LinearAxis<f32>;
pub type LinearAxisF64 = chartgen::LinearAxis<f64>;
