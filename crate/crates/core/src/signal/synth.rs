//! Synthetic signal generators and cohorts.
//!
//! Fractional Gaussian noise is produced by circulant embedding of the exact
//! fGn autocovariance (Davies-Harte), so its cumulative sum is fractional
//! Brownian motion with fractal dimension `2 - H`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{Channel, ClassLabel, Recording, DEFAULT_MONTAGE, DEFAULT_SAMPLING_RATE_HZ, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::Param(format!("Hurst exponent must lie in (0, 1), got {hurst}")))
    }
}

fn fgn_autocovariance(lag: usize, hurst: f64) -> f64 {
    let k = lag as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Unit-variance fractional Gaussian noise of length `n`.
pub fn gen_fgn(n: usize, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    check_hurst(hurst)?;
    if n < 2 {
        return Err(Error::Param(format!("fGn length must be at least 2, got {n}")));
    }
    let half = n.next_power_of_two();
    let size = 2 * half;

    let mut row: Vec<Complex64> = (0..size)
        .map(|j| {
            let lag = if j <= half { j } else { size - j };
            Complex64::new(fgn_autocovariance(lag, hurst), 0.0)
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(size);
    fft.process(&mut row);
    // The embedding is nonnegative definite for every H in (0, 1); clamp
    // round-off below zero.
    let eigen: Vec<f64> = row.iter().map(|c| c.re.max(0.0)).collect();

    let mut rng = seeded(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let m = size as f64;
    let mut w = vec![Complex64::new(0.0, 0.0); size];
    w[0] = Complex64::new((eigen[0] / m).sqrt() * normal(), 0.0);
    w[half] = Complex64::new((eigen[half] / m).sqrt() * normal(), 0.0);
    for j in 1..half {
        let s = (eigen[j] / (2.0 * m)).sqrt();
        let z = Complex64::new(s * normal(), s * normal());
        w[j] = z;
        w[size - j] = z.conj();
    }
    fft.process(&mut w);
    Ok(w.into_iter().take(n).map(|c| c.re).collect())
}

/// Logistic map `x <- r x (1 - x)` after 1000 burn-in iterations.
pub fn gen_logistic_map(n: usize, r: f64, x0: f64) -> Result<Vec<f64>> {
    if n < MIN_SAMPLES {
        return Err(Error::Param(format!("logistic map length must be at least {MIN_SAMPLES}, got {n}")));
    }
    if !(3.0..=4.0).contains(&r) {
        return Err(Error::Param(format!("logistic map r must lie in [3, 4], got {r}")));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Param(format!("logistic map x0 must lie in (0, 1), got {x0}")));
    }
    if x0 == 1.0 - 1.0 / r {
        return Err(Error::Param(format!("x0 = {x0} is a fixed point for r = {r}")));
    }
    let step = |x: f64| r * x * (1.0 - x);
    let mut x = (0..1000).fold(x0, |x, _| step(x));
    Ok((0..n)
        .map(|_| {
            x = step(x);
            x
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n_patients: usize,
    pub n_controls: usize,
    pub channels: usize,
    pub epoch_samples: usize,
    pub seed: u64,
    pub patient_hurst: f64,
    pub control_hurst: f64,
    /// Weight of white noise blended into the fGn increments before
    /// integration; 0 gives pure fBm.
    pub noise_mix: f64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        Self {
            n_patients: 14,
            n_controls: 20,
            channels: DEFAULT_MONTAGE.len(),
            epoch_samples: 10_000,
            seed: 42,
            patient_hurst: 0.3,
            control_hurst: 0.7,
            noise_mix: 0.1,
        }
    }
}

impl CohortSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_patients == 0 || self.n_controls == 0 || self.channels == 0 {
            return Err(Error::Config(format!(
                "patients, controls and channels must each be at least 1 (got {}, {}, {})",
                self.n_patients, self.n_controls, self.channels
            )));
        }
        if self.epoch_samples < MIN_SAMPLES {
            return Err(Error::Config(format!(
                "epoch_samples must be at least {MIN_SAMPLES}, got {}",
                self.epoch_samples
            )));
        }
        check_hurst(self.patient_hurst).map_err(|e| Error::Config(format!("patient_hurst: {e}")))?;
        check_hurst(self.control_hurst).map_err(|e| Error::Config(format!("control_hurst: {e}")))?;
        if !(0.0..=1.0).contains(&self.noise_mix) {
            return Err(Error::Config(format!("noise_mix must lie in [0, 1], got {}", self.noise_mix)));
        }
        Ok(())
    }

    pub fn channel_labels(&self) -> Vec<String> {
        if self.channels <= DEFAULT_MONTAGE.len() {
            DEFAULT_MONTAGE[..self.channels].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.channels).map(|i| format!("Ch{i}")).collect()
        }
    }

    /// Subject ids and labels in generation order: patients first.
    pub fn subjects(&self) -> Vec<(String, ClassLabel)> {
        let width = self.n_patients.max(self.n_controls).to_string().len().max(2);
        let patients = (1..=self.n_patients).map(|i| (format!("P{i:0width$}"), ClassLabel::Patient));
        let controls = (1..=self.n_controls).map(|i| (format!("C{i:0width$}"), ClassLabel::Control));
        patients.chain(controls).collect()
    }
}

fn synth_channel(spec: &CohortSpec, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    let n = spec.epoch_samples;
    let fgn = gen_fgn(n, hurst, derive_seed(seed, &[0]))?;
    let mut rng = seeded(derive_seed(seed, &[1]));
    let mut level = 0.0;
    Ok(fgn
        .into_iter()
        .map(|g| {
            let white: f64 = StandardNormal.sample(&mut rng);
            level += (1.0 - spec.noise_mix) * g + spec.noise_mix * white;
            level
        })
        .collect())
}

/// Generates one recording per subject; each channel is an independent
/// fBm-derived epoch seeded from `(seed, subject index, channel index)`.
pub fn synth_cohort(spec: &CohortSpec) -> Result<Vec<Recording>> {
    spec.validate()?;
    let labels = spec.channel_labels();
    spec.subjects()
        .into_par_iter()
        .enumerate()
        .map(|(s, (subject_id, label))| {
            let hurst = match label {
                ClassLabel::Patient => spec.patient_hurst,
                ClassLabel::Control => spec.control_hurst,
            };
            let channels = labels
                .iter()
                .enumerate()
                .map(|(c, l)| {
                    Ok(Channel {
                        label: l.clone(),
                        samples: synth_channel(spec, hurst, derive_seed(spec.seed, &[s as u64, c as u64]))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Recording::new(subject_id, label, DEFAULT_SAMPLING_RATE_HZ, channels)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_sd(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    fn autocorr(x: &[f64], lag: usize) -> f64 {
        let (mean, sd) = mean_sd(x);
        let n = x.len();
        let c: f64 = (0..n - lag).map(|i| (x[i] - mean) * (x[i + lag] - mean)).sum();
        c / (n as f64 * sd * sd)
    }

    #[test]
    fn white_noise_at_half() {
        let n = 4096;
        let x = gen_fgn(n, 0.5, 1).unwrap();
        assert_eq!(x.len(), n);
        let bound = 3.0 / (n as f64).sqrt();
        assert!(autocorr(&x, 1).abs() < bound, "lag-1 {}", autocorr(&x, 1));
        let (mean, sd) = mean_sd(&x);
        assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt());
        assert!((sd - 1.0).abs() < 0.05);
    }

    #[test]
    fn white_noise_lags_one_to_five() {
        for seed in 0..5 {
            let n = 8192;
            let x = gen_fgn(n, 0.5, seed).unwrap();
            for lag in 1..=5 {
                assert!(autocorr(&x, lag).abs() < 4.0 / (n as f64).sqrt());
            }
        }
    }

    #[test]
    fn persistent_noise_has_theoretical_lag_one_correlation() {
        // rho(1) = 2^(2H-1) - 1
        let hurst = 0.8;
        let expected = 2f64.powf(2.0 * hurst - 1.0) - 1.0;
        let x = gen_fgn(1 << 15, hurst, 3).unwrap();
        assert!((autocorr(&x, 1) - expected).abs() < 0.03);
    }

    #[test]
    fn arbitrary_lengths_and_determinism() {
        let a = gen_fgn(1000, 0.3, 11).unwrap();
        let b = gen_fgn(1000, 0.3, 11).unwrap();
        let c = gen_fgn(1000, 0.3, 12).unwrap();
        assert_eq!(a.len(), 1000);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(gen_fgn(2, 0.9, 0).unwrap().len(), 2);
    }

    #[test]
    fn invalid_hurst() {
        assert!(matches!(gen_fgn(100, 0.0, 1), Err(Error::Param(_))));
        assert!(matches!(gen_fgn(100, 1.0, 1), Err(Error::Param(_))));
        assert!(gen_fgn(1, 0.5, 1).is_err());
    }

    #[test]
    fn logistic_period_two() {
        let x = gen_logistic_map(1000, 3.2, 0.4).unwrap();
        for i in 2..x.len() {
            assert!((x[i] - x[i - 2]).abs() < 1e-12);
        }
        assert!((x[0] - x[1]).abs() > 0.1);
    }

    #[test]
    fn logistic_errors() {
        assert!(gen_logistic_map(1000, 3.5, 0.0).is_err());
        assert!(gen_logistic_map(1000, 3.5, 1.2).is_err());
        assert!(gen_logistic_map(1000, 2.5, 0.4).is_err());
        assert!(gen_logistic_map(50, 3.5, 0.4).is_err());
        assert!(gen_logistic_map(1000, 4.0, 0.75).is_err());
    }

    #[test]
    fn cohort_cardinality() {
        let spec = CohortSpec {
            epoch_samples: 1000,
            ..CohortSpec::default()
        };
        let cohort = synth_cohort(&spec).unwrap();
        assert_eq!(cohort.len(), 34);
        assert_eq!(cohort.iter().filter(|r| r.class_label().is_patient()).count(), 14);
        for r in &cohort {
            assert_eq!(r.channels().len(), 19);
            assert!(r.channels().iter().all(|c| c.samples.len() == 1000));
        }
        assert_eq!(cohort[0].channel_labels().next(), Some("Fp1"));
        assert_eq!(cohort[33].channel_labels().last(), Some("O2"));
    }

    #[test]
    fn minimal_cohort_has_distinct_subjects() {
        let spec = CohortSpec {
            n_patients: 1,
            n_controls: 1,
            channels: 1,
            epoch_samples: 500,
            ..CohortSpec::default()
        };
        let cohort = synth_cohort(&spec).unwrap();
        assert_eq!(cohort.len(), 2);
        assert_ne!(cohort[0].subject_id(), cohort[1].subject_id());
    }

    #[test]
    fn cohort_is_deterministic() {
        let spec = CohortSpec {
            n_patients: 2,
            n_controls: 2,
            channels: 3,
            epoch_samples: 300,
            seed: 5,
            ..CohortSpec::default()
        };
        assert_eq!(synth_cohort(&spec).unwrap(), synth_cohort(&spec).unwrap());
        let other = CohortSpec { seed: 6, ..spec.clone() };
        assert_ne!(synth_cohort(&spec).unwrap(), synth_cohort(&other).unwrap());
    }

    #[test]
    fn cohort_validation() {
        let bad = [
            CohortSpec { n_patients: 0, ..CohortSpec::default() },
            CohortSpec { epoch_samples: 99, ..CohortSpec::default() },
            CohortSpec { patient_hurst: 1.0, ..CohortSpec::default() },
            CohortSpec { noise_mix: 1.5, ..CohortSpec::default() },
        ];
        for spec in bad {
            assert!(matches!(synth_cohort(&spec), Err(Error::Config(_))));
        }
    }

    #[test]
    fn wide_montage_gets_generic_labels() {
        let spec = CohortSpec { channels: 21, ..CohortSpec::default() };
        let labels = spec.channel_labels();
        assert_eq!(labels.len(), 21);
        assert_eq!(labels[20], "Ch21");
    }
}
