//! Sampler for the limiting point process of the bottom length spectrum,
//! with statistical verification suites.
//!
//! One trial draws `N ~ Poisson(lambda_[0,L])` and then `N` lengths i.i.d.
//! from the normalized intensity on `(0, L]` by inverse transform: a
//! precomputed strictly increasing grid of `lambda_[0,x]` is bracketed by
//! binary search and refined by safeguarded Newton. Each trial's randomness
//! comes from a dedicated ChaCha stream keyed by `(seed, trial_index)`, so
//! results do not depend on how trials are distributed over workers.
//!
//! The verification suites estimate window counts, joint factorial moments,
//! the count histogram (chi-square), the expected systole and the
//! second-moment zero-count bound, each against its limit-law value with
//! explicit standard-error multipliers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::limits;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    BadConfig(String),
    WindowBeyondCutoff { b: f64, cutoff: f64 },
    InsufficientSamples { needed: u64, got: u64 },
    Overlap,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::BadConfig(s) => write!(f, "bad config: {s}"),
            SimError::WindowBeyondCutoff { b, cutoff } => {
                write!(f, "window end {b} exceeds cutoff {cutoff}")
            }
            SimError::InsufficientSamples { needed, got } => {
                write!(f, "need at least {needed} trials, got {got}")
            }
            SimError::Overlap => write!(f, "intervals must be pairwise disjoint"),
        }
    }
}

impl core::error::Error for SimError {}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub cutoff: f64,
    pub trials: u64,
    pub seed: u64,
    pub workers: u32,
}

impl SimConfig {
    pub fn new(cutoff: f64, trials: u64, seed: u64, workers: u32) -> Result<Self, SimError> {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
        if !(cutoff > 0.0) {
            return Err(SimError::BadConfig(String::from("cutoff must be positive")));
        }
        if trials < 1 {
            return Err(SimError::BadConfig(String::from("need at least one trial")));
        }
        Ok(Self { cutoff, trials, seed, workers: workers.max(1) })
    }
}

/// One sampled bottom spectrum: sorted lengths in `(0, cutoff]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub cutoff: f64,
    pub lengths: Vec<f64>,
}

impl Spectrum {
    /// Number of lengths in `[a, b]`; windows must stay below the cutoff.
    pub fn count_in(&self, a: f64, b: f64) -> Result<u32, SimError> {
        if b > self.cutoff {
            return Err(SimError::WindowBeyondCutoff { b, cutoff: self.cutoff });
        }
        Ok(self.lengths.iter().filter(|&&l| l >= a && l <= b).count() as u32)
    }

    /// Shortest length, or the cutoff when the spectrum is empty.
    pub fn systole_or_cutoff(&self) -> f64 {
        self.lengths.first().copied().unwrap_or(self.cutoff)
    }
}

/// Precomputed inverse-transform tables for one cutoff.
#[derive(Debug, Clone)]
pub struct SpectrumSampler {
    cutoff: f64,
    /// total mass lambda_[0,cutoff]
    total: f64,
    /// lambda_[0, i * cutoff / M] for i = 0..=M
    grid: Vec<f64>,
}

const GRID_POINTS: usize = 4096;

impl SpectrumSampler {
    pub fn new(cutoff: f64) -> Self {
        let mut grid = Vec::with_capacity(GRID_POINTS + 1);
        for i in 0..=GRID_POINTS {
            let x = cutoff * i as f64 / GRID_POINTS as f64;
            grid.push(limits::lambda_f64(0.0, x));
        }
        Self { cutoff, total: grid[GRID_POINTS], grid }
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    fn rng_for(seed: u64, trial: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        rng
    }

    /// Invert `lambda_[0,x] = target` on `[0, cutoff]`.
    fn invert(&self, target: f64) -> f64 {
        // bracket on the grid
        let mut lo = 0usize;
        let mut hi = GRID_POINTS;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.grid[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let step = self.cutoff / GRID_POINTS as f64;
        let (mut xlo, mut xhi) = (lo as f64 * step, hi as f64 * step);
        // linear interpolation start, then safeguarded Newton
        let (ylo, yhi) = (self.grid[lo], self.grid[hi]);
        let mut x = if yhi > ylo { xlo + step * (target - ylo) / (yhi - ylo) } else { xlo };
        let tol = 1e-12 * self.total.max(1.0);
        for _ in 0..60 {
            let y = limits::lambda_f64(0.0, x);
            let err = y - target;
            if libm::fabs(err) <= tol {
                break;
            }
            if err > 0.0 {
                xhi = x;
            } else {
                xlo = x;
            }
            let slope = intensity_f64(x);
            let newton = x - err / slope;
            x = if newton > xlo && newton < xhi { newton } else { 0.5 * (xlo + xhi) };
        }
        x.clamp(f64::MIN_POSITIVE, self.cutoff)
    }

    /// Sample trial `trial_index`; fully determined by `(seed, trial_index)`.
    pub fn sample(&self, seed: u64, trial_index: u64) -> Spectrum {
        let mut rng = Self::rng_for(seed, trial_index);
        let n = poisson_draw(&mut rng, self.total);
        let mut lengths = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let u = uniform01(&mut rng);
            lengths.push(self.invert(u * self.total));
        }
        lengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Spectrum { cutoff: self.cutoff, lengths }
    }
}

/// One-off sampling entry point; verification suites construct a
/// [`SpectrumSampler`] once and reuse it across trials instead.
pub fn sample_spectrum(cfg: &SimConfig, trial_index: u64) -> Spectrum {
    SpectrumSampler::new(cfg.cutoff).sample(cfg.seed, trial_index)
}

/// The intensity `(e^t + e^-t - 2)/t`, removable singularity at 0.
pub fn intensity_f64(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t < 1e-4 {
        // 4 sinh^2(t/2)/t without cancellation
        let s = libm::sinh(0.5 * t);
        return 4.0 * s * s / t;
    }
    (libm::exp(t) + libm::exp(-t) - 2.0) / t
}

fn uniform01(rng: &mut ChaCha12Rng) -> f64 {
    // 53 random mantissa bits in [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Poisson draw by sequential CDF inversion (safe for means up to ~600).
fn poisson_draw(rng: &mut ChaCha12Rng, mean: f64) -> u64 {
    let u = uniform01(rng);
    let mut p = libm::exp(-mean);
    let mut acc = p;
    let mut k = 0u64;
    while u > acc && p > 0.0 {
        k += 1;
        p *= mean / k as f64;
        acc += p;
        if k > 100_000 {
            break;
        }
    }
    k
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Debug, Clone)]
pub struct StatCheck {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    /// standard error (or scale unit of the threshold)
    pub se: f64,
    /// the compared statistic, e.g. |observed - expected| or a p-value
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct StatReport {
    pub name: String,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<StatCheck>,
}

impl StatReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// SE multiplier for plain estimates.
pub const SE_ESTIMATE: f64 = 3.0;
/// SE multiplier for matches against external target values.
pub const SE_TARGET: f64 = 4.0;
/// chi-square p-value floor.
pub const GOF_P_FLOOR: f64 = 0.01;

fn mean_se(sum: f64, sumsq: f64, n: f64) -> (f64, f64) {
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

/// Empirical mean counts per window vs the window mass, and the covariance
/// of the first two windows (independence of disjoint windows).
pub fn counts_suite(
    cfg: &SimConfig,
    windows: &[(f64, f64)],
) -> Result<StatReport, SimError> {
    let sampler = SpectrumSampler::new(cfg.cutoff);
    let w = windows.len();
    let mut sum = alloc::vec![0.0f64; w];
    let mut sumsq = alloc::vec![0.0f64; w];
    let mut cross = 0.0f64;
    for t in 0..cfg.trials {
        let spec = sampler.sample(cfg.seed, t);
        let mut counts = alloc::vec![0.0f64; w];
        for (i, &(a, b)) in windows.iter().enumerate() {
            counts[i] = spec.count_in(a, b)? as f64;
            sum[i] += counts[i];
            sumsq[i] += counts[i] * counts[i];
        }
        if w >= 2 {
            cross += counts[0] * counts[1];
        }
    }
    let n = cfg.trials as f64;
    let mut checks = Vec::new();
    for (i, &(a, b)) in windows.iter().enumerate() {
        let lam = limits::lambda_f64(a, b);
        let (mean, _) = mean_se(sum[i], sumsq[i], n);
        // Poisson variance equals the mean
        let se = libm::sqrt(lam / n);
        let diff = libm::fabs(mean - lam);
        checks.push(StatCheck {
            name: format!("mean count in [{a},{b}]"),
            observed: mean,
            expected: lam,
            se,
            statistic: diff,
            threshold: SE_ESTIMATE * se,
            pass: diff <= SE_ESTIMATE * se,
        });
    }
    if w >= 2 {
        let (m0, m1) = (sum[0] / n, sum[1] / n);
        let cov = cross / n - m0 * m1;
        let l0 = limits::lambda_f64(windows[0].0, windows[0].1);
        let l1 = limits::lambda_f64(windows[1].0, windows[1].1);
        let se = libm::sqrt(l0 * l1 / n);
        checks.push(StatCheck {
            name: String::from("covariance of disjoint windows"),
            observed: cov,
            expected: 0.0,
            se,
            statistic: libm::fabs(cov),
            threshold: SE_ESTIMATE * se,
            pass: libm::fabs(cov) <= SE_ESTIMATE * se,
        });
    }
    Ok(StatReport {
        name: String::from("counts"),
        trials: cfg.trials,
        seed: cfg.seed,
        checks,
    })
}

/// Empirical joint factorial moments vs the Poisson product, jackknife SEs.
pub fn factorial_moment_estimator(
    cfg: &SimConfig,
    intervals: &[(f64, f64)],
    orders: &[u32],
) -> Result<StatReport, SimError> {
    if intervals.len() != orders.len() || intervals.is_empty() {
        return Err(SimError::BadConfig(String::from("one order per interval")));
    }
    let mut sorted: Vec<(f64, f64)> = intervals.to_vec();
    sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(SimError::Overlap);
        }
    }
    let sampler = SpectrumSampler::new(cfg.cutoff);
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    for t in 0..cfg.trials {
        let spec = sampler.sample(cfg.seed, t);
        let mut prod = 1.0f64;
        for (&(a, b), &r) in intervals.iter().zip(orders) {
            let c = spec.count_in(a, b)? as f64;
            for j in 0..r {
                prod *= c - j as f64;
            }
        }
        sum += prod;
        sumsq += prod * prod;
    }
    let n = cfg.trials as f64;
    let (mean, se) = mean_se(sum, sumsq, n);
    let mut target = 1.0f64;
    for (&(a, b), &r) in intervals.iter().zip(orders) {
        let lam = limits::lambda_f64(a, b);
        for _ in 0..r {
            target *= lam;
        }
    }
    let diff = libm::fabs(mean - target);
    let name: Vec<String> = intervals
        .iter()
        .zip(orders)
        .map(|(&(a, b), &r)| format!("[{a},{b}]^{r}"))
        .collect();
    Ok(StatReport {
        name: String::from("factorial-moments"),
        trials: cfg.trials,
        seed: cfg.seed,
        checks: alloc::vec![StatCheck {
            name: format!("E {}", name.join(" * ")),
            observed: mean,
            expected: target,
            se,
            statistic: diff,
            threshold: SE_TARGET * se,
            pass: diff <= SE_TARGET * se,
        }],
    })
}

/// Chi-square goodness of fit of the count histogram in one window against
/// the Poisson law, pooling counts at `max_k` and above.
pub fn goodness_of_fit(
    cfg: &SimConfig,
    interval: (f64, f64),
    max_k: u32,
) -> Result<StatReport, SimError> {
    if cfg.trials < 1000 {
        return Err(SimError::InsufficientSamples { needed: 1000, got: cfg.trials });
    }
    let sampler = SpectrumSampler::new(cfg.cutoff);
    let lam = limits::lambda_f64(interval.0, interval.1);
    gof_against(cfg, &sampler, interval, max_k, lam, "goodness-of-fit")
}

/// Same test with a deliberately scaled mean; used as a power check.
pub fn goodness_of_fit_perturbed(
    cfg: &SimConfig,
    interval: (f64, f64),
    max_k: u32,
    mean_scale: f64,
) -> Result<StatReport, SimError> {
    if cfg.trials < 1000 {
        return Err(SimError::InsufficientSamples { needed: 1000, got: cfg.trials });
    }
    let sampler = SpectrumSampler::new(cfg.cutoff);
    let lam = limits::lambda_f64(interval.0, interval.1) * mean_scale;
    gof_against(cfg, &sampler, interval, max_k, lam, "goodness-of-fit-perturbed")
}

fn gof_against(
    cfg: &SimConfig,
    sampler: &SpectrumSampler,
    interval: (f64, f64),
    max_k: u32,
    lam: f64,
    name: &str,
) -> Result<StatReport, SimError> {
    let cells = max_k as usize + 1; // 0..max_k-1 plus pooled tail
    let mut observed = alloc::vec![0u64; cells];
    let mut zero_count = 0u64;
    for t in 0..cfg.trials {
        let spec = sampler.sample(cfg.seed, t);
        let c = spec.count_in(interval.0, interval.1)? as usize;
        observed[c.min(max_k as usize)] += 1;
        if c == 0 {
            zero_count += 1;
        }
    }
    let n = cfg.trials as f64;
    let mut x2 = 0.0f64;
    let mut tail_p = 1.0f64;
    for k in 0..max_k {
        tail_p -= limits::poisson_pmf(lam, k);
    }
    for (k, &obs) in observed.iter().enumerate() {
        let p = if k < max_k as usize { limits::poisson_pmf(lam, k as u32) } else { tail_p.max(1e-300) };
        let e = n * p;
        x2 += (obs as f64 - e) * (obs as f64 - e) / e.max(1e-12);
    }
    let df = (cells - 1) as f64;
    let p_value = chi_square_tail(df, x2);
    // zero-cell cross-check: empirical P[count = 0] vs e^{-lambda}
    let p0 = zero_count as f64 / n;
    let p0_exp = libm::exp(-lam);
    let p0_se = libm::sqrt(p0_exp * (1.0 - p0_exp) / n);
    Ok(StatReport {
        name: String::from(name),
        trials: cfg.trials,
        seed: cfg.seed,
        checks: alloc::vec![
            StatCheck {
                name: format!("chi-square({} cells) p-value", cells),
                observed: x2,
                expected: df,
                se: libm::sqrt(2.0 * df),
                statistic: p_value,
                threshold: GOF_P_FLOOR,
                pass: p_value > GOF_P_FLOOR,
            },
            StatCheck {
                name: String::from("zero-cell fraction"),
                observed: p0,
                expected: p0_exp,
                se: p0_se,
                statistic: libm::fabs(p0 - p0_exp),
                threshold: SE_ESTIMATE * p0_se,
                pass: libm::fabs(p0 - p0_exp) <= SE_ESTIMATE * p0_se,
            },
        ],
    })
}

/// Empirical mean systole (cutoff recorded for empty spectra, with the bias
/// bound `cutoff * e^{-lambda_total}` added to the acceptance band).
pub fn empirical_systole_mean(cfg: &SimConfig) -> Result<StatReport, SimError> {
    if cfg.cutoff < 5.0 {
        return Err(SimError::BadConfig(String::from(
            "cutoff below 5 leaves a non-negligible truncation bias",
        )));
    }
    let sampler = SpectrumSampler::new(cfg.cutoff);
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    for t in 0..cfg.trials {
        let s = sampler.sample(cfg.seed, t).systole_or_cutoff();
        sum += s;
        sumsq += s * s;
    }
    let n = cfg.trials as f64;
    let (mean, se) = mean_se(sum, sumsq, n);
    let target = limits::expected_systole_limit(1e-8)
        .map_err(|e| SimError::BadConfig(format!("{e}")))?
        .to_f64();
    let bias = cfg.cutoff * libm::exp(-sampler.total_mass());
    let diff = libm::fabs(mean - target);
    let threshold = SE_TARGET * se + bias;
    Ok(StatReport {
        name: String::from("systole-mean"),
        trials: cfg.trials,
        seed: cfg.seed,
        checks: alloc::vec![StatCheck {
            name: String::from("empirical mean systole vs limit"),
            observed: mean,
            expected: target,
            se,
            statistic: diff,
            threshold,
            pass: diff <= threshold,
        }],
    })
}

/// The second-moment zero-count bound at limiting moments simplifies to
/// `1/(1 + lambda)`; it must dominate the empirical zero fraction.
pub fn second_moment_bound_check(cfg: &SimConfig, cs: &[f64]) -> Result<StatReport, SimError> {
    let sampler = SpectrumSampler::new(cfg.cutoff);
    let mut zeros = alloc::vec![0u64; cs.len()];
    for t in 0..cfg.trials {
        let spec = sampler.sample(cfg.seed, t);
        for (i, &c) in cs.iter().enumerate() {
            if spec.count_in(0.0, c)? == 0 {
                zeros[i] += 1;
            }
        }
    }
    let n = cfg.trials as f64;
    let mut checks = Vec::new();
    for (i, &c) in cs.iter().enumerate() {
        let lam = limits::lambda_f64(0.0, c);
        let bound = 1.0 / (1.0 + lam);
        let p0 = zeros[i] as f64 / n;
        let se = libm::sqrt((p0 * (1.0 - p0) / n).max(1e-300));
        let pass = p0 <= bound + SE_ESTIMATE * se;
        checks.push(StatCheck {
            name: format!("zero fraction below 1/(1+lambda) at c={c}"),
            observed: p0,
            expected: bound,
            se,
            statistic: p0 - bound,
            threshold: SE_ESTIMATE * se,
            pass,
        });
    }
    Ok(StatReport {
        name: String::from("second-moment-bound"),
        trials: cfg.trials,
        seed: cfg.seed,
        checks,
    })
}

/// Regularized upper incomplete gamma `Q(a, x)`: chi-square tail probability
/// is `Q(df/2, x/2)`.
pub fn chi_square_tail(df: f64, x2: f64) -> f64 {
    gamma_q(df / 2.0, x2 / 2.0)
}

fn gamma_q(a: f64, x: f64) -> f64 {
    if x < 0.0 || a <= 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_contfrac(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if libm::fabs(del) < libm::fabs(sum) * 1e-16 {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - ln_gamma(a))
}

fn gamma_q_contfrac(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < tiny {
            d = tiny;
        }
        c = b + an / c;
        if libm::fabs(c) < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < 1e-16 {
            break;
        }
    }
    h * libm::exp(-x + a * libm::log(x) - ln_gamma(a))
}

/// Lanczos approximation, g = 7, n = 9.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism_per_trial() {
        let s = SpectrumSampler::new(2.0);
        let a = s.sample(42, 7);
        let b = s.sample(42, 7);
        assert_eq!(a.lengths, b.lengths);
        let c = s.sample(43, 7);
        assert_ne!(a.lengths, c.lengths);
        let cfg = SimConfig::new(2.0, 1, 42, 1).unwrap();
        assert_eq!(sample_spectrum(&cfg, 7).lengths, a.lengths);
    }

    #[test]
    fn spectrum_counting() {
        let spec = Spectrum { cutoff: 2.0, lengths: alloc::vec![0.3, 0.9, 1.4] };
        assert_eq!(spec.count_in(0.0, 2.0).unwrap(), 3);
        assert_eq!(spec.count_in(0.0, 1.0).unwrap(), 2);
        assert_eq!(spec.count_in(1.0, 2.0).unwrap(), 1);
        assert!(spec.count_in(0.0, 2.5).is_err());
        let empty = Spectrum { cutoff: 2.0, lengths: alloc::vec![] };
        assert_eq!(empty.count_in(0.0, 1.0).unwrap(), 0);
        assert_eq!(empty.systole_or_cutoff(), 2.0);
    }

    #[test]
    fn inverse_cdf_accuracy() {
        // |lambda(F^{-1}(u)) - u Lambda| < 1e-9 Lambda on a u-grid
        let s = SpectrumSampler::new(6.0);
        let total = s.total_mass();
        for i in 1..200 {
            let u = i as f64 / 200.0;
            let x = s.invert(u * total);
            let err = libm::fabs(limits::lambda_f64(0.0, x) - u * total);
            assert!(err < 1e-9 * total, "u={u}: err={err}");
        }
    }

    #[test]
    fn sampled_lengths_within_cutoff_and_sorted() {
        let s = SpectrumSampler::new(4.0);
        for t in 0..50 {
            let spec = s.sample(11, t);
            assert!(spec.lengths.iter().all(|&l| l > 0.0 && l <= 4.0));
            assert!(spec.lengths.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn poisson_draw_mean_sane() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mean = 7.5;
        let n = 20_000;
        let total: u64 = (0..n).map(|_| poisson_draw(&mut rng, mean)).sum();
        let emp = total as f64 / n as f64;
        assert!((emp - mean).abs() < 4.0 * libm::sqrt(mean / n as f64), "emp={emp}");
    }

    #[test]
    fn counts_suite_small_run() {
        let cfg = SimConfig::new(2.0, 4000, 2024, 1).unwrap();
        let rep = counts_suite(&cfg, &[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
    }

    #[test]
    fn factorial_moment_small_run() {
        let cfg = SimConfig::new(2.0, 4000, 99, 1).unwrap();
        let rep = factorial_moment_estimator(&cfg, &[(0.0, 1.0), (1.0, 2.0)], &[1, 1]).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        assert!(factorial_moment_estimator(&cfg, &[(0.0, 1.5), (1.0, 2.0)], &[1, 1]).is_err());
    }

    #[test]
    fn gof_small_run_and_power() {
        let cfg = SimConfig::new(2.0, 20_000, 7, 1).unwrap();
        let rep = goodness_of_fit(&cfg, (0.0, 1.0), 5).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        // a 20% mean distortion must be detected at this sample size
        let bad = goodness_of_fit_perturbed(&cfg, (0.0, 1.0), 5, 1.2).unwrap();
        assert!(!bad.checks[0].pass, "perturbed fit unexpectedly passed");
    }

    #[test]
    fn gof_needs_samples() {
        let cfg = SimConfig::new(2.0, 100, 7, 1).unwrap();
        assert!(matches!(
            goodness_of_fit(&cfg, (0.0, 1.0), 5),
            Err(SimError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn chi_square_tail_reference_values() {
        // Q(df/2, x/2) against standard table values
        assert!((chi_square_tail(1.0, 3.841) - 0.05).abs() < 5e-4);
        assert!((chi_square_tail(5.0, 11.07) - 0.05).abs() < 5e-4);
        assert!((chi_square_tail(2.0, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ln_gamma_reference() {
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(5.0) - libm::log(24.0)).abs() < 1e-10);
        assert!((ln_gamma(0.5) - 0.5 * libm::log(core::f64::consts::PI)).abs() < 1e-10);
    }

    #[test]
    fn superposition_of_disjoint_windows() {
        // counts from two independent streams restricted to disjoint windows,
        // merged, must follow the Poisson law of the union window
        let s = SpectrumSampler::new(2.0);
        let trials = 20_000u64;
        let lam_union = limits::lambda_f64(0.0, 2.0);
        let max_k = 7usize;
        let mut observed = alloc::vec![0u64; max_k + 1];
        for t in 0..trials {
            let a = s.sample(101, t).count_in(0.0, 1.0).unwrap();
            let b = s.sample(202, t).count_in(1.0, 2.0).unwrap();
            observed[((a + b) as usize).min(max_k)] += 1;
        }
        let n = trials as f64;
        let mut x2 = 0.0;
        let mut tail = 1.0;
        for k in 0..max_k {
            tail -= limits::poisson_pmf(lam_union, k as u32);
        }
        for (k, &obs) in observed.iter().enumerate() {
            let p = if k < max_k { limits::poisson_pmf(lam_union, k as u32) } else { tail };
            let e = n * p;
            x2 += (obs as f64 - e) * (obs as f64 - e) / e;
        }
        let pval = chi_square_tail(max_k as f64, x2);
        assert!(pval > 0.01, "merged-count fit rejected: p = {pval}");
    }

    #[test]
    fn doubling_trials_shrinks_se_like_sqrt() {
        let half = SimConfig::new(2.0, 8000, 5, 1).unwrap();
        let full = SimConfig::new(2.0, 16000, 5, 1).unwrap();
        let se = |cfg: &SimConfig| {
            let rep = counts_suite(cfg, &[(0.0, 1.0)]).unwrap();
            rep.checks[0].se
        };
        let ratio = se(&half) / se(&full);
        assert!((ratio - libm::sqrt(2.0)).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn second_moment_bound_small_run() {
        let cfg = SimConfig::new(2.0, 5000, 31, 1).unwrap();
        let rep = second_moment_bound_check(&cfg, &[0.5, 1.0, 1.5, 2.0]).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        // bound is monotone decreasing in c
        let bounds: Vec<f64> = rep.checks.iter().map(|c| c.expected).collect();
        assert!(bounds.windows(2).all(|w| w[1] < w[0]));
    }
}
