mod common;

use common::{cumsum, naive_match_counts, reference_higuchi};
use eegcx::features::{higuchi_fd, population_sd, sample_entropy, HfdParams, SampEnParams};
use eegcx::signal::{gen_fgn, gen_logistic_map, synth_cohort, ClassLabel, CohortSpec};

fn naive_sampen(x: &[f64]) -> f64 {
    let r = 0.15 * population_sd(x);
    let (b, a) = naive_match_counts(x, 2, r);
    -(a as f64 / b as f64).ln()
}

#[test]
fn fbm_dimension_tracks_hurst() {
    for (h, expected) in [(0.7, 1.3), (0.3, 1.7)] {
        let path = cumsum(&gen_fgn(1 << 14, h, 7).unwrap());
        let reference = reference_higuchi(&path, 8);
        assert!((reference - expected).abs() <= 0.1, "H={h}: reference FD {reference}");
        let fd = higuchi_fd(&path, &HfdParams::default()).unwrap();
        assert!((fd - expected).abs() <= 0.1, "H={h}: FD {fd}");
    }
}

#[test]
fn white_fgn_mean_shrinks() {
    for n in [1000, 10_000, 100_000] {
        let x = gen_fgn(n, 0.5, 3).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        let sd = population_sd(&x);
        assert!(sd.is_finite());
        assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt(), "n={n}: mean {mean}");
    }
}

#[test]
fn logistic_map_entropy_regimes() {
    let chaotic = gen_logistic_map(5000, 4.0, 0.4).unwrap();
    let e = naive_sampen(&chaotic);
    assert!(e > 0.4, "chaotic SampEn {e}");
    assert!((sample_entropy(&chaotic, &SampEnParams::default()).unwrap() - e).abs() < 1e-12);

    let periodic = gen_logistic_map(1000, 3.2, 0.4).unwrap();
    let e = naive_sampen(&periodic);
    assert!(e < 0.01, "period-2 SampEn {e}");
    assert!((sample_entropy(&periodic, &SampEnParams::default()).unwrap() - e).abs() < 1e-12);
}

/// For iid data the chance that two (m+1)-templates match given that their
/// first m points match is the one-step match probability.
#[test]
fn iid_entropy_equals_one_step_match_probability() {
    let x = gen_fgn(5000, 0.5, 11).unwrap();
    let r = 0.15 * population_sd(&x);
    let mut close = 0u64;
    let mut pairs = 0u64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            pairs += 1;
            if (x[i] - x[j]).abs() <= r {
                close += 1;
            }
        }
    }
    let expected = -(close as f64 / pairs as f64).ln();
    let e = sample_entropy(&x, &SampEnParams::default()).unwrap();
    assert!((e - expected).abs() <= 0.05, "SampEn {e} vs {expected}");
}

#[test]
fn default_cohort_patients_are_rougher() {
    let cohort = synth_cohort(&CohortSpec::default()).unwrap();
    let (mut p, mut np, mut c, mut nc) = (0.0, 0, 0.0, 0);
    for rec in &cohort {
        for ch in rec.channels() {
            let fd = higuchi_fd(&ch.samples, &HfdParams::default()).unwrap();
            if rec.class_label() == ClassLabel::Patient {
                p += fd;
                np += 1;
            } else {
                c += fd;
                nc += 1;
            }
        }
    }
    assert_eq!((np, nc), (14 * 19, 20 * 19));
    assert!(p / np as f64 > c / nc as f64);
}
