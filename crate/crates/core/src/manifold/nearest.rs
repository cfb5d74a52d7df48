use nalgebra::DVector;
use serde::Serialize;

use super::FrequencyDataMap;
use crate::error::{Error, Result};
use crate::linalg::golden_section;
use crate::lti::BalancedRealization;
use crate::reduction::{balanced_truncate, bspa, interpolated_reduce};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    MaxAbs,
}

impl Metric {
    pub fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        match self {
            Metric::Euclidean => (a - b).norm(),
            Metric::MaxAbs => (a - b).abs().max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestResult {
    pub eta_star: Vec<f64>,
    pub distance: f64,
    pub bt_distance: f64,
    pub bspa_distance: f64,
}

const PRESAMPLE: usize = 100;

/// Closest point to `target` along the BT–BSPA interpolation family.
///
/// Each knob is searched over `[0, θ]`: a uniform presample (endpoints
/// included) picks the best cell, golden-section search refines it to 1e-10,
/// and the better of the two is kept, so the result is never worse than
/// either endpoint. With `k > 1` the knobs are cycled by coordinate descent.
pub fn nearest_on_family(
    target: &DVector<f64>,
    bal: &BalancedRealization,
    k: usize,
    map: &FrequencyDataMap,
    metric: Metric,
) -> Result<NearestResult> {
    let dist_of = |eta: &[f64]| -> Result<f64> {
        let red = interpolated_reduce(bal, k, eta)?;
        Ok(metric.distance(&map.map(&red.reduced)?, target))
    };
    let bt_distance = metric.distance(&map.map(&balanced_truncate(bal, k)?.reduced)?, target);
    let bspa_distance = metric.distance(&map.map(&bspa(bal, k)?.reduced)?, target);
    let n = bal.order();
    let thetas: Vec<f64> = (0..k).map(|j| bal.hsv()[n - k + j]).collect();
    if target.len() != map.data_dim(bal.sys().outputs(), bal.sys().inputs()) {
        return Err(Error::invalid("target", "dimension does not match the frequency map"));
    }

    let mut eta = vec![0.0; k];
    let mut best = dist_of(&eta)?;
    let sweeps = if k == 1 { 1 } else { 20 };
    for _ in 0..sweeps {
        let before = best;
        for j in 0..k {
            let theta = thetas[j];
            let mut probe = eta.clone();
            let mut grid = Vec::with_capacity(PRESAMPLE + 1);
            for i in 0..=PRESAMPLE {
                probe[j] = theta * i as f64 / PRESAMPLE as f64;
                grid.push((probe[j], dist_of(&probe)?));
            }
            let (imin, &(mut e_best, mut d_best)) = grid
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .expect("non-empty presample");
            let lo = grid[imin.saturating_sub(1)].0;
            let hi = grid[(imin + 1).min(PRESAMPLE)].0;
            if hi > lo {
                let (e, d) = golden_section(
                    |x| {
                        let mut p = eta.clone();
                        p[j] = x;
                        dist_of(&p)
                    },
                    lo,
                    hi,
                    1e-10,
                )?;
                if d < d_best {
                    e_best = e;
                    d_best = d;
                }
            }
            if d_best < best {
                best = d_best;
                eta[j] = e_best;
            }
        }
        if before - best <= 1e-15 * before.max(1.0) {
            break;
        }
    }
    Ok(NearestResult {
        eta_star: eta,
        distance: best.min(bt_distance.min(bspa_distance)),
        bt_distance,
        bspa_distance,
    })
}
