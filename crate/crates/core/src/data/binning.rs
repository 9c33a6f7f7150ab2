//! Equal-frequency binning of numeric columns.

use crate::error::DataError;

/// Numeric interval `[lo, hi)`, or `[lo, hi]` when `hi_closed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && (v < self.hi || (self.hi_closed && v <= self.hi))
    }
}

/// Binning result. `flagged` is set when fewer than the requested number of
/// bins could be produced (tied values or too few distinct values).
#[derive(Debug, Clone)]
pub struct Bins {
    pub intervals: Vec<Interval>,
    pub flagged: bool,
}

/// Split `values` into up to `k` equal-frequency bins.
///
/// Bin boundaries are midpoints between consecutive distinct sorted values,
/// chosen nearest to the rank cuts at `i*n/k` (ties resolved towards the
/// lower position, duplicate choices collapsed). The bins cover `[min, max]`:
/// all are `[lo, hi)` except the last, which is closed above. If `k` exceeds
/// the number of distinct values, one interval per distinct value is returned
/// and the result is flagged.
pub fn equal_frequency_bins(values: &[f64], k: usize) -> Result<Bins, DataError> {
    if values.is_empty() {
        return Err(DataError::InvalidBinning("empty value vector".into()));
    }
    if k == 0 {
        return Err(DataError::InvalidBinning("k must be >= 1".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(DataError::InvalidBinning("NaN in values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let min = sorted[0];
    let max = sorted[n - 1];

    // positions j where sorted[j-1] < sorted[j]; midpoints there are the only
    // admissible boundaries
    let cut_positions: Vec<usize> = (1..n).filter(|&j| sorted[j - 1] < sorted[j]).collect();
    let n_distinct = cut_positions.len() + 1;

    if n_distinct == 1 {
        // constant vector: single degenerate bin
        return Ok(Bins {
            intervals: vec![Interval {
                lo: min,
                hi: max,
                hi_closed: true,
            }],
            flagged: k > 1,
        });
    }

    let midpoint = |j: usize| (sorted[j - 1] + sorted[j]) / 2.0;

    let boundaries: Vec<f64> = if k > n_distinct {
        // one interval per distinct value
        cut_positions.iter().map(|&j| midpoint(j)).collect()
    } else {
        let mut chosen: Vec<usize> = Vec::with_capacity(k - 1);
        for i in 1..k {
            let target = i as f64 * n as f64 / k as f64;
            let best = *cut_positions
                .iter()
                .min_by(|&&a, &&b| {
                    let da = (a as f64 - target).abs();
                    let db = (b as f64 - target).abs();
                    da.total_cmp(&db).then(a.cmp(&b))
                })
                .expect("at least one cut position");
            chosen.push(best);
        }
        chosen.sort_unstable();
        chosen.dedup();
        chosen.into_iter().map(midpoint).collect()
    };

    let mut intervals = Vec::with_capacity(boundaries.len() + 1);
    let mut lo = min;
    for &b in &boundaries {
        intervals.push(Interval {
            lo,
            hi: b,
            hi_closed: false,
        });
        lo = b;
    }
    intervals.push(Interval {
        lo,
        hi: max,
        hi_closed: true,
    });
    let flagged = intervals.len() < k;
    Ok(Bins { intervals, flagged })
}
