//! "Nice" axis ticks and tick-label formatting.

use crate::scalar::Scalar;

const MANTISSAS: [f64; 3] = [1.0, 2.0, 5.0];

/// Pads a degenerate interval so ticks have something to span.
pub fn pad_degenerate<T: Scalar>(lo: T, hi: T) -> (T, T) {
    if hi > lo {
        return (lo, hi);
    }
    let d = T::one().max(lo.abs() * T::lit(0.05));
    (lo - d, hi + d)
}

/// Ticks at consecutive multiples of a step from `{1, 2, 5}·10^k` that cover
/// `[lo, hi]`, with between `target - 1` and `target + 2` ticks.
///
/// Among admissible steps the one whose tick count is closest to `target`
/// wins; ties go to the larger step.
pub fn nice_ticks<T: Scalar>(lo: T, hi: T, target: usize) -> Vec<T> {
    let target = target.clamp(3, 8);
    nice_ticks_within(lo, hi, target - 1, target + 2, target)
}

/// Like [`nice_ticks`] with explicit bounds on the tick count.
pub fn nice_ticks_within<T: Scalar>(lo: T, hi: T, min_count: usize, max_count: usize, target: usize) -> Vec<T> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (lo, hi) = pad_degenerate(lo, hi);
    let span = hi - lo;
    let k0 = (span / T::from_usize_lossy(target.max(1))).log10().floor().to_i32().unwrap_or(0);

    let mut best: Option<(usize, i32, usize, Vec<T>)> = None;
    for k in (k0 - 2)..=(k0 + 2) {
        for (mi, &m) in MANTISSAS.iter().enumerate() {
            let ticks = ticks_for_step(lo, hi, T::lit(m), k);
            let n = ticks.len();
            if n < min_count || n > max_count {
                continue;
            }
            let dist = n.abs_diff(target);
            // Larger step = larger (k, mantissa index); prefer it on ties.
            let better = match &best {
                None => true,
                Some((d, bk, bm, _)) => dist < *d || (dist == *d && (k, mi) > (*bk, *bm)),
            };
            if better {
                best = Some((dist, k, mi, ticks));
            }
        }
    }
    match best {
        Some((_, _, _, t)) => t,
        // Only reachable for pathological bounds; fall back to the plain endpoints.
        None => vec![lo, hi],
    }
}

/// Ticks `(f + j)·m·10^k` from the last multiple at or below `lo` to the first at or above `hi`.
fn ticks_for_step<T: Scalar>(lo: T, hi: T, m: T, k: i32) -> Vec<T> {
    let ten = T::lit(10.0);
    let at = |i: T| if k >= 0 { i * m * ten.powi(k) } else { i * m / ten.powi(-k) };
    let step = at(T::one());
    let mut first = (lo / step).floor();
    while at(first) > lo {
        first = first - T::one();
    }
    let mut last = (hi / step).ceil();
    while at(last) < hi {
        last = last + T::one();
    }
    let count = (last - first).to_usize().unwrap_or(usize::MAX).saturating_add(1);
    if count > 64 {
        return Vec::new();
    }
    (0..count).map(|j| at(first + T::from_usize_lossy(j))).collect()
}

const SUFFIXES: [(f64, &str); 5] = [(1e15, "Q"), (1e12, "T"), (1e9, "B"), (1e6, "M"), (1e3, "K")];

/// Compact tick labels (`0`, `250`, `1.5K`, `3M`, ...) sharing one scale.
pub fn format_ticks(ticks: &[f64]) -> Vec<String> {
    let top = ticks.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let (scale, suffix) = SUFFIXES.iter().copied().find(|(s, _)| top >= *s).unwrap_or((1.0, ""));
    let step = ticks.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min);
    let decimals = if step.is_finite() && step > 0.0 {
        let s = step / scale;
        (0..6).find(|&d| {
            let v = s * 10f64.powi(d as i32);
            (v - v.round()).abs() < 1e-6 * v.max(1.0)
        })
        .unwrap_or(6)
    } else {
        0
    };
    ticks
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return "0".to_string();
            }
            let s = format!("{:.*}", decimals, t / scale);
            if suffix.is_empty() {
                s
            } else {
                format!("{s}{suffix}")
            }
        })
        .collect()
}
