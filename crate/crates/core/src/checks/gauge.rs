use serde::Serialize;

use crate::error::{Error, Result};

pub const GAUGE_BINS: usize = 32;

/// Binned supremum of a response over an argument, on logarithmic bins
/// spanning the observed argument range.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalGauge {
    pub name: String,
    /// `GAUGE_BINS + 1` increasing breakpoints.
    pub bins: Vec<f64>,
    /// Largest response per bin; `None` for empty bins.
    pub sup_values: Vec<Option<f64>>,
    /// Running maximum of `sup_values`.
    pub monotone_envelope: Vec<Option<f64>>,
    pub counts: Vec<usize>,
    #[serde(skip)]
    samples: Vec<(f64, f64)>,
    #[serde(skip)]
    prefix_max: Vec<f64>,
}

impl EmpiricalGauge {
    pub fn from_samples(name: &str, mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Sampling(format!("gauge `{name}` has no samples")));
        }
        if samples.iter().any(|&(t, v)| !(t > 0.0 && t.is_finite() && v.is_finite())) {
            return Err(Error::validation(name, "gauge arguments must be positive and finite"));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let lo = samples[0].0;
        let mut hi = samples.last().unwrap().0;
        if hi <= lo {
            hi = lo * (1.0 + 1e-9);
        }
        let span = (hi / lo).ln();
        let bins: Vec<f64> = (0..=GAUGE_BINS)
            .map(|i| {
                if i == GAUGE_BINS {
                    hi
                } else {
                    lo * (span * i as f64 / GAUGE_BINS as f64).exp()
                }
            })
            .collect();
        let mut sup_values = vec![None::<f64>; GAUGE_BINS];
        let mut counts = vec![0; GAUGE_BINS];
        for &(t, v) in &samples {
            let i = ((GAUGE_BINS as f64 * (t / lo).ln() / span).floor() as usize).min(GAUGE_BINS - 1);
            sup_values[i] = Some(sup_values[i].map_or(v, |s| s.max(v)));
            counts[i] += 1;
        }
        let mut monotone_envelope = Vec::with_capacity(GAUGE_BINS);
        let mut run: Option<f64> = None;
        for s in &sup_values {
            run = match (run, s) {
                (Some(r), Some(s)) => Some(r.max(*s)),
                (None, s) => *s,
                (r, None) => r,
            };
            monotone_envelope.push(run);
        }
        let mut prefix_max = Vec::with_capacity(samples.len());
        let mut m = f64::NEG_INFINITY;
        for &(_, v) in &samples {
            m = m.max(v);
            prefix_max.push(m);
        }
        Ok(EmpiricalGauge {
            name: name.into(),
            bins,
            sup_values,
            monotone_envelope,
            counts,
            samples,
            prefix_max,
        })
    }

    /// Largest response over samples with argument `<= t`.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let n = self.samples.partition_point(|s| s.0 <= t);
        (n > 0).then(|| self.prefix_max[n - 1])
    }

    /// Envelope value of the bin containing `t` (clamped to the range).
    pub fn envelope_at(&self, t: f64) -> Option<f64> {
        let i = self.bins[1..].partition_point(|&b| b < t).min(GAUGE_BINS - 1);
        self.monotone_envelope[i]
    }

    pub fn populated_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Raw `(argument, response)` samples, sorted by argument.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn range(&self) -> (f64, f64) {
        (self.bins[0], self.bins[GAUGE_BINS])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_dominates_bins() {
        let s: Vec<(f64, f64)> = (1..200).map(|i| (i as f64 * 0.01, ((i * 37) % 11) as f64)).collect();
        let g = EmpiricalGauge::from_samples("g", s).unwrap();
        assert_eq!(g.bins.len(), GAUGE_BINS + 1);
        for i in 0..GAUGE_BINS {
            if let Some(s) = g.sup_values[i] {
                assert!(g.monotone_envelope[i].unwrap() >= s);
            }
            if i > 0 {
                assert!(g.monotone_envelope[i] >= g.monotone_envelope[i - 1]);
            }
        }
        assert_eq!(g.eval(0.005), None);
        assert_eq!(g.eval(10.0), Some(10.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(EmpiricalGauge::from_samples("g", vec![]).is_err());
        assert!(EmpiricalGauge::from_samples("g", vec![(0.0, 1.0)]).is_err());
    }
}
