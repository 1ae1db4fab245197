use crate::error::{Error, Result};

/// Bivariate limit of `(W, T)` when `m2 ~ rho m1` with `0 < rho < 1`.
///
/// `P{X = 0, Y = l} = (rho - rho^l) / (1 + rho)^(l + 1)` and, for `k >= 1`,
/// `P{X = k, Y = l} = (1 - rho) / (rho (1 + rho)) (rho / (1 + rho))^l (2 rho / (1 + rho))^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimitLaw {
    rho: f64,
}

impl JointLimitLaw {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::parameter("rho", rho, "must lie in (0, 1)"));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn pmf(&self, k: u32, l: u32) -> f64 {
        let rho = self.rho;
        if l == 0 {
            return 0.0;
        }
        let l = l as i32;
        if k == 0 {
            (rho - rho.powi(l)) / (1.0 + rho).powi(l + 1)
        } else {
            (1.0 - rho) / (rho * (1.0 + rho))
                * (rho / (1.0 + rho)).powi(l)
                * (2.0 * rho / (1.0 + rho)).powi(k as i32)
        }
    }

    /// `E exp(s X + t Y)`, defined while `e^t < 1 + rho`, `rho e^t < 1 + rho`
    /// and `2 rho e^s < 1 + rho`.
    pub fn mgf(&self, s: f64, t: f64) -> Result<f64> {
        let rho = self.rho;
        let (es, et) = (s.exp(), t.exp());
        let factors = [1.0 + rho - et, 1.0 + rho - rho * et, 1.0 + rho - 2.0 * rho * es];
        if factors.iter().any(|&f| f <= 0.0) {
            return Err(Error::domain("joint mgf", format!("(s, t) = ({s}, {t}) lies outside the convergence region")));
        }
        Ok(rho * (1.0 - rho) * et * (et + 2.0 * es - 2.0 * es * et) / (factors[0] * factors[1] * factors[2]))
    }

    /// Summation ranges `(max k, max l)` after which every remaining term of
    /// the first and second moment sums is below `tolerance` in total.
    fn truncation(&self, tolerance: f64) -> (u32, u32) {
        let rho = self.rho;
        // Tails of sum_{n > N} n^2 r^n, bounded by a geometric series from N on.
        let cut = |ratio: f64| -> u32 {
            let mut n = 1u32;
            loop {
                let nf = f64::from(n);
                let bound = (nf + 1.0).powi(2) * ratio.powf(nf) / (1.0 - ratio).powi(3);
                if bound < tolerance {
                    return n;
                }
                n += 1;
            }
        };
        let x_ratio = 2.0 * rho / (1.0 + rho);
        let y_ratio = 1.0 / (1.0 + rho);
        (cut(x_ratio), cut(y_ratio))
    }
}

/// `E X`, `E Y`, second moments, variances, covariance and correlation of the
/// joint central limit, in closed form and re-derived by truncated summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub rho: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub second_x: f64,
    pub second_y: f64,
    pub mixed: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub covariance: f64,
    pub correlation: f64,
    /// Largest absolute gap between a closed form and its truncated sum.
    pub max_summation_gap: f64,
}

/// Tolerance for closed forms against truncated sums.
pub const SUMMATION_TOLERANCE: f64 = 1e-8;

/// `C_rho = -sqrt(2 rho) (1 - rho) / sqrt((1 + rho)(1 + rho - 2 rho^2 + rho^3 + rho^4))`.
///
/// Accepts the closed interval `[0, 1]`: the expression is continuous there
/// and vanishes at both ends.
pub fn correlation_coefficient(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::parameter("rho", rho, "must lie in [0, 1]"));
    }
    let p = 1.0 + rho - 2.0 * rho * rho + rho.powi(3) + rho.powi(4);
    Ok(-(2.0 * rho).sqrt() * (1.0 - rho) / ((1.0 + rho) * p).sqrt())
}

pub fn correlation_analysis(rho: f64) -> Result<CorrelationReport> {
    let law = JointLimitLaw::new(rho)?;
    let r2 = rho * rho;
    let mean_x = 2.0 * rho / (1.0 - rho);
    let mean_y = (r2 + 1.0) / rho;
    let second_x = 2.0 * rho * (1.0 + 3.0 * rho) / (1.0 - rho).powi(2);
    let second_y = (2.0 * r2 * r2 + r2 * rho + rho + 2.0) / r2;
    let mixed = 2.0 * rho * (1.0 + rho) / (1.0 - rho);
    let var_x = 2.0 * rho * (1.0 + rho) / (1.0 - rho).powi(2);
    let var_y = (1.0 + rho - 2.0 * r2 + r2 * rho + r2 * r2) / r2;
    let covariance = -2.0;
    let correlation = correlation_coefficient(rho)?;

    let (max_k, max_l) = law.truncation(1e-15);
    let mut sums = [0.0f64; 6]; // mass, X, Y, X^2, Y^2, XY
    for k in 0..=max_k {
        let kf = f64::from(k);
        for l in 1..=max_l {
            let p = law.pmf(k, l);
            let lf = f64::from(l);
            for (acc, term) in sums.iter_mut().zip([1.0, kf, lf, kf * kf, lf * lf, kf * lf]) {
                *acc += p * term;
            }
        }
    }
    let summed_var_x = sums[3] - sums[1] * sums[1];
    let summed_var_y = sums[4] - sums[2] * sums[2];
    let summed_cov = sums[5] - sums[1] * sums[2];
    let summed_corr = summed_cov / (summed_var_x * summed_var_y).sqrt();
    let pairs = [
        (1.0, sums[0]),
        (mean_x, sums[1]),
        (mean_y, sums[2]),
        (second_x, sums[3]),
        (second_y, sums[4]),
        (mixed, sums[5]),
        (var_x, summed_var_x),
        (var_y, summed_var_y),
        (covariance, summed_cov),
        (correlation, summed_corr),
        (var_x, second_x - mean_x * mean_x),
        (var_y, second_y - mean_y * mean_y),
        (covariance, mixed - mean_x * mean_y),
    ];
    let max_summation_gap = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if max_summation_gap > SUMMATION_TOLERANCE {
        return Err(Error::Verification(format!(
            "closed-form moments at rho = {rho} differ from truncated sums by {max_summation_gap:e}"
        )));
    }
    Ok(CorrelationReport {
        rho,
        mean_x,
        mean_y,
        second_x,
        second_y,
        mixed,
        var_x,
        var_y,
        covariance,
        correlation,
        max_summation_gap,
    })
}

/// `kappa(rho) = 1 - 3 rho - 3 rho^2 + 3 rho^3 - 6 rho^4 - 2 rho^5 + 2 rho^6`;
/// its root in `(0, 1)` is the stationary point of `C_rho`.
pub fn kappa(rho: f64) -> f64 {
    [2.0, -2.0, -6.0, 3.0, -3.0, -3.0, 1.0]
        .iter()
        .fold(0.0, |acc, c| acc * rho + c)
}

/// Location and value of the minimum of `C_rho` over `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumCorrelation {
    pub rho: f64,
    pub correlation: f64,
    /// Minimizer of `C_rho` on a grid of step `1e-5`, as an independent check.
    pub grid_rho: f64,
}

/// Bisection for the root of `kappa`, cross-checked against a grid search of `C_rho`.
pub fn min_correlation() -> Result<MinimumCorrelation> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if !(kappa(lo) > 0.0 && kappa(hi) < 0.0) {
        return Err(Error::Verification("kappa does not change sign on (0, 1)".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kappa(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let rho = 0.5 * (lo + hi);
    let correlation = correlation_coefficient(rho)?;

    let step = 1e-5;
    let mut grid_rho = step;
    let mut grid_min = f64::INFINITY;
    let mut i = 1u32;
    while f64::from(i) * step < 1.0 {
        let r = f64::from(i) * step;
        let c = correlation_coefficient(r)?;
        if c < grid_min {
            grid_min = c;
            grid_rho = r;
        }
        i += 1;
    }
    if (grid_rho - rho).abs() > 2.0 * step || grid_min < correlation - 1e-12 {
        return Err(Error::Verification(format!(
            "root of kappa at {rho} disagrees with the grid minimizer {grid_rho}"
        )));
    }
    Ok(MinimumCorrelation {
        rho,
        correlation,
        grid_rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_law_is_normalized_with_known_marginals() {
        let law = JointLimitLaw::new(0.4).unwrap();
        let (mut total, mut x0, mut y1) = (0.0, 0.0, 0.0);
        for k in 0..400 {
            for l in 0..400 {
                let p = law.pmf(k, l);
                assert!(p >= 0.0);
                total += p;
                if k == 0 {
                    x0 += p;
                }
                if l == 1 {
                    y1 += p;
                }
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
        // P{X = 0} = (1 - rho) / (1 + rho); P{Y = 1} = (rho + rho) / (1 + rho)^2.
        assert!((x0 - 0.6 / 1.4).abs() < 1e-12);
        assert!((y1 - 0.8 / 1.96).abs() < 1e-12);
    }

    #[test]
    fn analysis_agrees_with_sums() {
        for rho in [0.05, 0.1, 0.269, 0.5, 0.9, 0.95] {
            let report = correlation_analysis(rho).unwrap();
            assert!(report.max_summation_gap < 1e-9, "{rho}: {}", report.max_summation_gap);
            assert_eq!(report.covariance, -2.0);
        }
        assert!(correlation_analysis(1.0).is_err());
        assert_eq!(correlation_coefficient(0.0).unwrap(), 0.0);
        assert_eq!(correlation_coefficient(1.0).unwrap(), 0.0);
        assert!(correlation_coefficient(1.5).is_err());
    }

    #[test]
    fn mgf_at_origin_and_domain() {
        let law = JointLimitLaw::new(0.3).unwrap();
        assert!((law.mgf(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(law.mgf(1.0, 0.0).is_err());
        // Direct summation at an interior point.
        let (s, t) = (0.1, -0.2);
        let mut direct = 0.0;
        for k in 0..300 {
            for l in 1..300 {
                direct += law.pmf(k, l) * (s * f64::from(k) + t * f64::from(l)).exp();
            }
        }
        assert!((law.mgf(s, t).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn minimum_correlation() {
        let min = min_correlation().unwrap();
        assert!((min.rho - 0.269_187).abs() < 1e-5, "{}", min.rho);
        assert!((min.correlation + 0.444_039).abs() < 1e-5, "{}", min.correlation);
        assert!(kappa(min.rho).abs() < 1e-12);
    }
}
