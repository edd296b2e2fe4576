//! Reproducible random streams and the statistical test battery.
//!
//! Streams are counter-keyed: a replica's generator depends only on
//! `(master seed, replica index, purpose tag)`, never on scheduling, so the
//! whole suite is bit-identical across thread counts.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("need at least {0} samples")]
    Undersized(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Counter-based random stream factory.
#[derive(Debug, Clone, Copy)]
pub struct Streams {
    master_seed: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl Streams {
    pub fn new(master_seed: u64) -> Self {
        Streams { master_seed }
    }

    pub fn seed(&self) -> u64 {
        self.master_seed
    }

    /// Independent generator for `(replica, purpose)`.
    pub fn stream(&self, replica: u64, purpose: u32) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut s = splitmix(self.master_seed);
        s = splitmix(s ^ replica.wrapping_mul(0xd1342543de82ef95));
        s = splitmix(s ^ (purpose as u64).wrapping_mul(0xaf251af3b0f025b5));
        let mut word = s;
        for chunk in key.chunks_mut(8) {
            word = splitmix(word);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// One row of a [`StatReport`]: a named functional at a parameter value, with
/// the test statistic and a point estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub functional: String,
    pub parameter: f64,
    pub n_effective: u64,
    pub statistic: f64,
    pub p_value: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatReport {
    pub experiment: String,
    pub rows: Vec<ReportRow>,
}

impl StatReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        StatReport { experiment: experiment.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: ReportRow) {
        debug_assert!((0.0..=1.0).contains(&row.p_value) || row.p_value.is_nan());
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// CSV with the fixed schema
    /// `experiment,functional,beta,n_effective,statistic,p_value,ratio,std_error,pass`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("experiment,functional,beta,n_effective,statistic,p_value,ratio,std_error,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                self.experiment,
                r.functional,
                r.parameter,
                r.n_effective,
                r.statistic,
                r.p_value,
                r.estimate,
                r.std_error,
                r.pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Regularized lower incomplete gamma P(a, x), with the prefactor kept in
/// log scale so small shapes do not underflow to 0 near the origin.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    let log_pre = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // series: P = pre * sum_{n>=0} x^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        ((log_pre + sum.ln()).exp()).clamp(0.0, 1.0)
    } else {
        // Lentz continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (1.0 - (log_pre.exp() * h)).clamp(0.0, 1.0)
    }
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        s += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Standard normal two-sided p-value for a z score.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}

pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Two-sided Kolmogorov-Smirnov test between two samples; asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_unstable_by(|u, v| u.partial_cmp(v).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if diff > d {
            d = diff;
        }
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok((d, kolmogorov_sf(lambda)))
}

/// One-sample KS against a reference CDF.
pub fn ks_one_sample<C: Fn(f64) -> f64>(samples: &[f64], cdf: C) -> Result<(f64, f64), StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|u, v| u.partial_cmp(v).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        d = d.max(((i + 1) as f64 / n - c).abs()).max((c - i as f64 / n).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    Ok((d, kolmogorov_sf(lambda)))
}

/// z test of the sample mean against a target.
pub fn mean_test(samples: &[f64], target: f64) -> Result<(f64, f64), StatsError> {
    if samples.len() < 30 {
        return Err(StatsError::Undersized(30));
    }
    let (mean, se) = mean_and_se(samples);
    if se == 0.0 {
        // constant sample: pass only on exact equality
        return Ok(if mean == target { (0.0, 1.0) } else { (f64::INFINITY, 0.0) });
    }
    let z = (mean - target) / se;
    Ok((z, normal_two_sided_p(z)))
}

/// KS test against the Gamma(shape, scale) CDF.
pub fn gamma_ks(samples: &[f64], shape: f64, scale: f64) -> Result<(f64, f64), StatsError> {
    if shape <= 0.0 || scale <= 0.0 {
        return Err(StatsError::InvalidParameter("gamma shape/scale must be positive"));
    }
    ks_one_sample(samples, |x| gamma_p(shape, x / scale))
}

/// Chi-square goodness of fit on counts vs expected counts
/// (df = cells - 1).
pub fn chi2_gof(observed: &[u64], expected: &[f64]) -> Result<(f64, f64), StatsError> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(StatsError::InvalidParameter("need >= 2 matching cells"));
    }
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            return Err(StatsError::InvalidParameter("expected counts must be positive"));
        }
        let d = o as f64 - e;
        stat += d * d / e;
    }
    let df = (observed.len() - 1) as f64;
    let p = 1.0 - gamma_p(df / 2.0, stat / 2.0);
    Ok((stat, p))
}

fn pearson_r(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Pearson correlation tested against zero correlation.
///
/// The statistic reported is the Fisher z-transform on the standard-error
/// scale, `atanh(r)·sqrt(n − 3)`, at every sample size. For n ≥ 30 the
/// p-value is the normal tail of that statistic; for smaller samples, where
/// the Fisher approximation is not reliable, it is replaced by a Monte Carlo
/// permutation p-value (fixed internal seed, 10⁴ shuffles).
pub fn correlation_test(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    if xs.len() != ys.len() || xs.len() < 8 {
        return Err(StatsError::Undersized(8));
    }
    let n = xs.len() as f64;
    let r = pearson_r(xs, ys);
    let z = r.clamp(-0.999999, 0.999999).atanh() * (n - 3.0).sqrt();
    let p = if xs.len() >= 30 {
        normal_two_sided_p(z)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9d2c_5680_1c64_e6db);
        let mut perm: Vec<f64> = ys.to_vec();
        let trials = 10_000usize;
        let mut at_least = 0usize;
        for _ in 0..trials {
            perm.shuffle(&mut rng);
            if pearson_r(xs, &perm).abs() >= r.abs() {
                at_least += 1;
            }
        }
        (at_least + 1) as f64 / (trials + 1) as f64
    };
    Ok((r, z, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

    #[test]
    fn streams_reproducible_and_distinct() {
        let s = Streams::new(7);
        let mut a = s.stream(3, 1);
        let mut b = s.stream(3, 1);
        let mut c = s.stream(4, 1);
        let va: Vec<u64> = (0..4).map(|_| a.gen()).collect();
        let vb: Vec<u64> = (0..4).map(|_| b.gen()).collect();
        let vc: Vec<u64> = (0..4).map(|_| c.gen()).collect();
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn gamma_p_oracles() {
        // P(1, x) = 1 - exp(-x)
        for x in [0.1, 1.0, 3.0, 10.0] {
            assert!((gamma_p(1.0, x) - (1.0 - (-x as f64).exp())).abs() < 1e-12);
        }
        // P(1/2, x) = erf(sqrt(x)); tolerance set by the reference erf
        for x in [0.01, 0.5, 2.0, 8.0] {
            assert!((gamma_p(0.5, x) - erf::erf(x.sqrt())).abs() < 1e-10);
        }
        // tiny shape near the origin must not underflow:
        // P(a, x) ~ x^a / Gamma(a+1) for x -> 0
        let a = 0.01f64;
        let x = 1e-31f64;
        let approx = (a * x.ln() - ln_gamma(a + 1.0)).exp();
        assert!((gamma_p(a, x) - approx).abs() < 1e-3, "{} vs {}", gamma_p(a, x), approx);
        assert_eq!(gamma_p(0.3, 0.0), 0.0);
        assert!(gamma_p(0.3, 1e3) > 1.0 - 1e-12);
    }

    #[test]
    fn ks_identical_lists() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let (d, p) = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(d, 0.0);
        assert!(p > 0.999);
    }

    #[test]
    fn ks_separates_shifted_normals() {
        let s = Streams::new(11);
        let mut rng = s.stream(0, 0);
        let a: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..10_000)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x + 1.0
            })
            .collect();
        let (_, p) = ks_two_sample(&a, &b).unwrap();
        assert!(p < 1e-10);
    }

    #[test]
    fn ks_null_calibration_uniform() {
        // a, b both Uniform(0,1): p > 0.001 in >= 99% of meta-replicas
        let s = Streams::new(23);
        let mut ok = 0;
        let meta = 200;
        for m in 0..meta {
            let mut rng = s.stream(m, 0);
            let a: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
            let b: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
            let (_, p) = ks_two_sample(&a, &b).unwrap();
            if p > 0.001 {
                ok += 1;
            }
        }
        assert!(ok as f64 >= 0.99 * meta as f64, "only {ok}/{meta} meta-replicas passed");
    }

    #[test]
    fn mean_test_cases() {
        let xs = vec![0.5; 100];
        let (z, p) = mean_test(&xs, 0.5).unwrap();
        assert_eq!(z, 0.0);
        assert_eq!(p, 1.0);
        let (_, p) = mean_test(&xs, 0.6).unwrap();
        assert_eq!(p, 0.0);

        // shifted target by ~10 standard errors
        let s = Streams::new(5);
        let mut rng = s.stream(0, 0);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x
            })
            .collect();
        let shift = 10.0 / (xs.len() as f64).sqrt();
        let (_, p) = mean_test(&xs, shift).unwrap();
        assert!(p < 1e-10);
    }

    #[test]
    fn correlation_test_cases() {
        let s = Streams::new(11);
        let mut rng = s.stream(0, 1);
        let xs: Vec<f64> = (0..400).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ys: Vec<f64> = (0..400).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (r, z, p) = correlation_test(&xs, &ys).unwrap();
        assert!(r.abs() < 0.2 && z.abs() < 4.0 && p > 1e-4);

        let zs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| x + 0.5 * y).collect();
        let (r, _, p) = correlation_test(&xs, &zs).unwrap();
        assert!(r > 0.5 && p < 1e-10);

        // small samples switch to the permutation p-value
        let (r, _, p) = correlation_test(&xs[..15], &xs[..15]).unwrap();
        assert!((r - 1.0).abs() < 1e-12 && p < 0.01);
        let (_, _, p) = correlation_test(&xs[..15], &ys[..15]).unwrap();
        assert!(p > 0.01);
        assert!(correlation_test(&xs[..5], &ys[..5]).is_err());
    }

    #[test]
    fn gamma_ks_accepts_and_rejects() {
        let s = Streams::new(9);
        let mut rng = s.stream(0, 0);
        let g = Gamma::new(0.5, 1.0).unwrap();
        let xs: Vec<f64> = (0..100_000).map(|_| g.sample(&mut rng) / 4.0).collect();
        let (_, p) = gamma_ks(&xs, 0.5, 0.25).unwrap();
        assert!(p > 0.001);

        let exp: Vec<f64> = (0..10_000)
            .map(|_| {
                let e: f64 = Exp1.sample(&mut rng);
                e
            })
            .collect();
        let (_, p) = gamma_ks(&exp, 1.0, 1.0).unwrap();
        assert!(p > 0.001);

        let (_, p) = gamma_ks(&xs, 1.0, 0.25).unwrap();
        assert!(p < 1e-6);
    }

    #[test]
    fn chi2_detects_bias() {
        let (_, p) = chi2_gof(&[5000, 5000], &[5000.0, 5000.0]).unwrap();
        assert!(p > 0.9);
        let (_, p) = chi2_gof(&[6000, 4000], &[5000.0, 5000.0]).unwrap();
        assert!(p < 1e-10);
    }
}
