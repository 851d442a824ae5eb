//! Central finite differences against the analytic gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{Example, MlmError, TinyMlm};

/// Outcome for one sampled coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordCheck {
    pub index: usize,
    pub tensor: String,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub coords: Vec<CoordCheck>,
    pub max_rel_err: f64,
}

impl GradCheckReport {
    pub fn worst(&self) -> Option<&CoordCheck> {
        self.coords
            .iter()
            .max_by(|a, b| a.rel_err.total_cmp(&b.rel_err))
    }
}

/// `|a - n| / max(|a|, |n|, floor)`. The floor keeps coordinates whose true
/// gradient is at rounding level from dominating.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Compares the gradient of the mean batch loss with
/// `(L(theta + h e_k) - L(theta - h e_k)) / 2h` on `n_coords` coordinates
/// drawn uniformly (with replacement) from the flattened parameters.
pub fn check_gradients(
    model: &TinyMlm,
    batch: &[Example],
    n_coords: usize,
    step: f64,
    floor: f64,
    seed: u64,
) -> Result<GradCheckReport, MlmError> {
    let (_, grads) = model.loss_and_gradients(batch)?;
    let total = model.params.count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = model.clone();
    let mut coords = Vec::with_capacity(n_coords);
    for _ in 0..n_coords {
        let k = rng.random_range(0..total as u64) as usize;
        let theta = model.params.get_flat(k);
        probe.params.set_flat(k, theta + step);
        let plus = probe.loss(batch)?;
        probe.params.set_flat(k, theta - step);
        let minus = probe.loss(batch)?;
        probe.params.set_flat(k, theta);
        let numeric = (plus - minus) / (2.0 * step);
        let analytic = grads.get_flat(k);
        coords.push(CoordCheck {
            index: k,
            tensor: model.params.flat_name(k),
            analytic,
            numeric,
            rel_err: relative_error(analytic, numeric, floor),
        });
    }
    let max_rel_err = coords.iter().map(|c| c.rel_err).fold(0.0, f64::max);
    Ok(GradCheckReport { coords, max_rel_err })
}
