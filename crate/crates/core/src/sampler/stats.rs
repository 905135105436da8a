use num_complex::Complex64 as C64;
use serde::Serialize;

/// Mean of a complex observable with separate errors on both parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithError {
    pub mean: C64,
    /// `sqrt(err_re^2 + err_im^2)`.
    pub std_error: f64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub tau_int: f64,
    pub n_effective: f64,
    pub n_samples: usize,
}

/// Smallest number of blocks kept while doubling the block size.
const MIN_BLOCKS: usize = 32;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Standard error of the mean from blocking: block sizes double while at
/// least [`MIN_BLOCKS`] blocks remain, and the largest error seen is kept.
pub fn blocking_error(x: &[f64]) -> f64 {
    let mut level: Vec<f64> = x.to_vec();
    let mut best = 0.0f64;
    while level.len() >= MIN_BLOCKS {
        let m = mean(&level);
        let n = level.len() as f64;
        let var = level.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        best = best.max((var / n).sqrt());
        level = level.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    }
    if x.len() < MIN_BLOCKS && x.len() > 1 {
        let m = mean(x);
        let n = x.len() as f64;
        best = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    }
    best
}

/// Integrated autocorrelation time with automatic windowing (window `W`
/// is the first lag with `W >= c tau(W)`, `c = 6`).
pub fn tau_int(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.5;
    }
    let m = mean(x);
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0 = d.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let ct = d[..n - t].iter().zip(&d[t..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        tau += ct / c0;
        if t as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Combine equally long chains of one observable.
pub fn estimate(chains: &[Vec<C64>]) -> EstimateWithError {
    let k = chains.len().max(1) as f64;
    let n_samples: usize = chains.iter().map(Vec::len).sum();
    let mut mean_acc = C64::default();
    let (mut var_re, mut var_im, mut tau) = (0.0, 0.0, 0.0);
    for c in chains {
        let re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let im: Vec<f64> = c.iter().map(|z| z.im).collect();
        mean_acc += C64::new(mean(&re), mean(&im));
        var_re += blocking_error(&re).powi(2);
        var_im += blocking_error(&im).powi(2);
        tau += 0.5 * (tau_int(&re) + tau_int(&im));
    }
    let tau = tau / k;
    let (se_re, se_im) = (var_re.sqrt() / k, var_im.sqrt() / k);
    EstimateWithError {
        mean: mean_acc / k,
        std_error: (se_re * se_re + se_im * se_im).sqrt(),
        std_error_re: se_re,
        std_error_im: se_im,
        tau_int: tau,
        n_effective: (n_samples as f64 / (2.0 * tau)).min(n_samples as f64),
        n_samples,
    }
}
