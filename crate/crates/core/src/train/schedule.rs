use super::TrainConfig;

/// Number of warmup steps: `ceil(fraction * total)`, where products within
/// 1e-9 of an integer count as that integer.
pub fn warmup_steps(total_steps: usize, warmup_fraction: f64) -> usize {
    let w = warmup_fraction * total_steps as f64;
    let r = w.round();
    if (w - r).abs() < 1e-9 {
        r as usize
    } else {
        w.ceil() as usize
    }
}

/// Learning rate for optimizer step `step` (0-based): linear from 0 to the
/// peak over the warmup steps, then linear down to 0 at `total_steps`.
pub fn lr_at(step: usize, total_steps: usize, cfg: &TrainConfig) -> f64 {
    let peak = cfg.learning_rate;
    if step >= total_steps {
        return 0.0;
    }
    let w = warmup_steps(total_steps, cfg.warmup_fraction);
    if step < w {
        peak * step as f64 / w as f64
    } else {
        peak * (total_steps - step) as f64 / (total_steps - w) as f64
    }
}
