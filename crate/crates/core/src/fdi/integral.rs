//! Global detector on the accumulated gap between real and nominal cost:
//! a behaviour fault is signalled once `∫₀ᵗ (H − H_nom) dτ ≥ δ·t`.

use serde::{Deserialize, Serialize};

/// Trapezoidal integral of `h − h_nom` over `[times[0], t]`. Samples are
/// linearly interpolated inside a partial final interval; `t` past the last
/// sample is clamped to it.
pub fn gap_integral(times: &[f64], h: &[f64], h_nom: &[f64], t: f64) -> f64 {
    assert!(
        times.len() == h.len() && h.len() == h_nom.len(),
        "series not aligned"
    );
    let gap = |k: usize| h[k] - h_nom[k];
    let mut acc = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        if t <= t0 {
            break;
        }
        if t >= t1 {
            acc += 0.5 * (gap(k - 1) + gap(k)) * (t1 - t0);
        } else {
            let frac = (t - t0) / (t1 - t0);
            let g_t = gap(k - 1) + frac * (gap(k) - gap(k - 1));
            acc += 0.5 * (gap(k - 1) + g_t) * (t - t0);
            break;
        }
    }
    acc
}

/// True when the accumulated gap at `t` has reached `delta_threshold·t`.
pub fn integral_detector(
    times: &[f64],
    h: &[f64],
    h_nom: &[f64],
    delta_threshold: f64,
    t: f64,
) -> bool {
    gap_integral(times, h, h_nom, t) >= delta_threshold * t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralSample {
    pub t: f64,
    pub integral: f64,
    pub flag: bool,
}

/// Streaming form of [`integral_detector`] fed one sample per FDI tick.
#[derive(Debug, Clone)]
pub struct IntegralDetector {
    delta_threshold: f64,
    last: Option<(f64, f64)>,
    integral: f64,
}

impl IntegralDetector {
    pub fn new(delta_threshold: f64) -> Self {
        Self {
            delta_threshold,
            last: None,
            integral: 0.0,
        }
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Adds the sample at `t`. The first sample only anchors the integral
    /// and never flags.
    pub fn push(&mut self, t: f64, h: f64, h_nom: f64) -> IntegralSample {
        let gap = h - h_nom;
        let flag = match self.last {
            Some((t0, g0)) => {
                self.integral += 0.5 * (g0 + gap) * (t - t0);
                self.integral >= self.delta_threshold * t
            }
            None => false,
        };
        self.last = Some((t, gap));
        IntegralSample {
            t,
            integral: self.integral,
            flag,
        }
    }
}
