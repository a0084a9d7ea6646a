//! Deterministic expectation of functions of one log-increment `L̃_Δ`.
//!
//! The increment is `b̃Δ + √(c̃Δ) G + Σ_{k≤K} y_{J_k}`. We condition on the
//! jump count `K` (Poisson, truncated at `K_max`), enumerate the multiset of
//! atoms hit, and integrate the Gaussian coordinate by Gauss-Hermite.
//!
//! The integrands `(1 + πZ)^(1-p)` and `Z (1 + πZ)^(-p)` grow geometrically
//! in the number of jumps, so `K_max` bounds the weighted tail
//! `Σ_{k > K_max} P(K = k) M^k` with `M` the mean per-jump growth factor
//! over `π ∈ [0, 1]`, not just the probability tail.

use crate::error::{Error, Result};
use crate::model::LogTriplet;

/// Allowed Poisson mass beyond `K_max`.
pub const POISSON_TAIL: f64 = 1e-12;
/// Above this many jump configurations the quadrature gives up.
pub const MAX_JUMP_CONFIGS: usize = 1_000_000;

/// Gauss-Hermite nodes and weights for `∫ f(t) e^{-t²} dt`, found by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "need at least one node");
    const PI_M4: f64 = 0.751_125_544_464_942_5; // π^(-1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PI_M4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z_prev = z;
            z = z_prev - p1 / pp;
            if (z - z_prev).abs() <= 3e-14 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-mean + k as f64 * mean.ln() - ln_factorial(k)).exp()
}

/// `ln Σ_{j > k} e^{ln_first + Σ ln(mean / i)}`: the log of a Poisson tail
/// whose first term `P(K = k + 1)` has log `ln_first`. Summed forward
/// relative to that term so tiny tails keep their relative precision.
fn ln_tail_from(k: usize, mean: f64, ln_first: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = k + 1;
    loop {
        j += 1;
        term *= mean / j as f64;
        sum += term;
        if j as f64 > mean && term < sum * 1e-17 {
            break;
        }
    }
    ln_first + sum.ln()
}

fn ln_poisson_pmf(k: usize, mean: f64) -> f64 {
    -mean + k as f64 * mean.ln() - ln_factorial(k)
}

/// `P(K > k)` for `K ~ Poisson(mean)`.
pub fn poisson_tail(k: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    ln_tail_from(k, mean, ln_poisson_pmf(k + 1, mean)).exp()
}

/// Smallest `K_max` with `P(K > K_max) <= POISSON_TAIL`.
pub fn poisson_cutoff(mean: f64) -> usize {
    weighted_cutoff(mean, 1.0)
}

/// `Σ_{k > K} P(K = k) M^k = e^{m(M-1)} P(K' > K)` with `K' ~ Poisson(mM)`.
pub fn weighted_poisson_tail(k: usize, mean: f64, growth: f64) -> f64 {
    let tilted = mean * growth;
    if tilted == 0.0 {
        return 0.0;
    }
    (mean * (growth - 1.0) + ln_tail_from(k, tilted, ln_poisson_pmf(k + 1, tilted))).exp()
}

/// Smallest `K_max` whose weighted tail is at most `POISSON_TAIL`, capped
/// at [`MAX_JUMP_CONFIGS`] since no larger cutoff can be enumerated.
pub fn weighted_cutoff(mean: f64, growth: f64) -> usize {
    let tilted = mean * growth;
    if tilted == 0.0 {
        return 0;
    }
    let ln_tol = POISSON_TAIL.ln() - mean * (growth - 1.0);
    // P(K' >= floor(mM)) >= 1/2, so no cutoff below floor(mM) - 1 can work.
    let mut k = (tilted.floor() as usize).saturating_sub(1);
    let mut ln_first = ln_poisson_pmf(k + 1, tilted);
    while k < MAX_JUMP_CONFIGS && ln_tail_from(k, tilted, ln_first) > ln_tol {
        k += 1;
        ln_first += tilted.ln() - ((k + 1) as f64).ln();
    }
    k
}

/// Mean factor by which one jump can multiply the integrand for
/// `π ∈ [0, 1]`. From `1 + πZ >= min(1, 1 + Z)`, a jump of log-size `y`
/// contributes at most `max(1, e^{-p y})` to `(1 + πZ)^(-p)` and
/// `max(1, e^y)` to `|Z|`; averaging over the atom law gives the rate of
/// the tilted jump count.
pub fn jump_growth(log: &LogTriplet, p: f64) -> f64 {
    let lambda = log.total_intensity();
    if lambda == 0.0 {
        return 1.0;
    }
    log.atoms
        .iter()
        .map(|a| a.intensity / lambda * a.size.exp().max(1.0) * (-p * a.size).exp().max(1.0))
        .sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of atom multisets with at most `k_max` elements drawn from `atoms` kinds.
pub fn jump_config_count(atoms: usize, k_max: usize) -> f64 {
    if atoms == 0 {
        return 1.0;
    }
    (0..=k_max)
        .map(|k| binomial(k + atoms - 1, atoms - 1))
        .sum()
}

/// Weighted nodes `(weight, x)` for the log-increment `x`.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<(f64, f64)>,
    pub max_jumps: usize,
}

impl QuadRule {
    /// Builds the rule for one increment of length `dt`. Returns `Ok(None)`
    /// when the jump enumeration would exceed [`MAX_JUMP_CONFIGS`].
    /// `p` is the utility exponent and only sets the jump cutoff.
    pub fn build(
        log: &LogTriplet,
        dt: f64,
        p: f64,
        max_jumps: Option<usize>,
        gh_nodes: usize,
    ) -> Result<Option<Self>> {
        if gh_nodes == 0 {
            return Err(Error::InvalidArgument(
                "Gauss-Hermite node count must be positive".into(),
            ));
        }
        let lambda = log.total_intensity();
        let mean = lambda * dt;
        let growth = jump_growth(log, p);
        let k_max = if log.atoms.is_empty() {
            0
        } else {
            match max_jumps {
                Some(k) => {
                    let tail = weighted_poisson_tail(k, mean, growth);
                    if tail > POISSON_TAIL {
                        return Err(Error::InvalidArgument(format!(
                            "K_max = {k} leaves weighted Poisson tail {tail:e} > {POISSON_TAIL:e}"
                        )));
                    }
                    k
                }
                None => weighted_cutoff(mean, growth),
            }
        };
        if jump_config_count(log.atoms.len(), k_max) > MAX_JUMP_CONFIGS as f64 {
            return Ok(None);
        }

        let configs = jump_configs(log, mean, k_max);
        let (gx, gw) = if log.diffusion > 0.0 {
            let (x, w) = gauss_hermite(gh_nodes);
            let scale = (2.0 * log.diffusion * dt).sqrt();
            let norm = std::f64::consts::PI.sqrt();
            (
                x.into_iter().map(|t| scale * t).collect(),
                w.into_iter().map(|w| w / norm).collect(),
            )
        } else {
            (vec![0.0], vec![1.0])
        };

        let drift = log.path_drift() * dt;
        let mut nodes = Vec::with_capacity(configs.len() * gx.len());
        for &(cw, jump) in &configs {
            for (&g, &w) in gx.iter().zip(&gw) {
                nodes.push((cw * w, drift + jump + g));
            }
        }
        Ok(Some(Self {
            nodes,
            max_jumps: k_max,
        }))
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        // Nodes whose weight underflowed can sit where f overflows.
        self.nodes
            .iter()
            .filter(|n| n.0 > 0.0)
            .map(|&(w, x)| w * f(x))
            .sum()
    }
}

/// `(probability, jump sum)` for every atom multiset with at most `k_max` jumps.
fn jump_configs(log: &LogTriplet, mean: f64, k_max: usize) -> Vec<(f64, f64)> {
    if log.atoms.is_empty() {
        return vec![(1.0, 0.0)];
    }
    let lambda = log.total_intensity();
    let ln_probs: Vec<f64> = log
        .atoms
        .iter()
        .map(|a| (a.intensity / lambda).ln())
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; log.atoms.len()];
    for k in 0..=k_max {
        let ln_pk = poisson_pmf(k, mean).ln() + ln_factorial(k);
        enumerate(&mut counts, 0, k, &mut |counts| {
            let mut ln_w = ln_pk;
            let mut jump = 0.0;
            for (i, &n) in counts.iter().enumerate() {
                ln_w += n as f64 * ln_probs[i] - ln_factorial(n);
                jump += n as f64 * log.atoms[i].size;
            }
            out.push((ln_w.exp(), jump));
        });
    }
    out
}

fn enumerate(counts: &mut [usize], pos: usize, remaining: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for n in 0..=remaining {
        counts[pos] = n;
        enumerate(counts, pos + 1, remaining - n, visit);
    }
}
