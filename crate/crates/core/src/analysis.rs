//! Fitting and convergence helpers used by the limit checks.

use crate::error::{Error, Result};

/// Least-squares line `y = slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("fit", "need at least two paired samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("fit", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Sign changes of `y(t)`, located by cubic interpolation through the four
/// samples around each bracket and refined by bisection.
pub fn zero_crossings(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len().min(y.len());
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        if y[i] == 0.0 {
            out.push(t[i]);
            continue;
        }
        if y[i] * y[i + 1] >= 0.0 {
            continue;
        }
        let lo = i.saturating_sub(1).min(n.saturating_sub(4));
        let pts: Vec<(f64, f64)> = (lo..lo + 4.min(n)).map(|k| (t[k], y[k])).collect();
        let interp = |x: f64| lagrange(&pts, x);
        let (mut a, mut b) = (t[i], t[i + 1]);
        let mut fa = y[i];
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = interp(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

fn lagrange(pts: &[(f64, f64)], x: f64) -> f64 {
    let mut sum = 0.0;
    for (j, &(xj, yj)) in pts.iter().enumerate() {
        let mut w = 1.0;
        for (k, &(xk, _)) in pts.iter().enumerate() {
            if k != j {
                w *= (x - xk) / (xj - xk);
            }
        }
        sum += w * yj;
    }
    sum
}

/// Angular frequency of an oscillating signal from a linear fit of its
/// zero-crossing times against their index (crossings are half a period
/// apart).
pub fn fit_angular_frequency(t: &[f64], y: &[f64]) -> Result<f64> {
    let zc = zero_crossings(t, y);
    if zc.len() < 3 {
        return Err(Error::invalid("fit", "fewer than three zero crossings"));
    }
    let k: Vec<f64> = (0..zc.len()).map(|i| i as f64).collect();
    let (half_period, _) = linear_fit(&k, &zc)?;
    Ok(std::f64::consts::PI / half_period)
}

/// Exponential decay rate from a log-linear fit of `|y|`.
pub fn fit_decay_rate(t: &[f64], y: &[f64]) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, v)| **v != 0.0)
        .map(|(a, v)| (*a, v.abs().ln()))
        .collect();
    let (x, ly): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (slope, _) = linear_fit(&x, &ly)?;
    Ok(-slope)
}

/// Observed orders `ln(e_i/e_{i+1}) / ln(h_i/h_{i+1})` between successive
/// refinements.
pub fn convergence_orders(h: &[f64], err: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(err.windows(2))
        .map(|(hw, ew)| (ew[0] / ew[1]).ln() / (hw[0] / hw[1]).ln())
        .collect()
}

/// `‖a − b‖₂ / ‖b‖₂`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den).sqrt()
}

/// Mean and variance of a non-negative profile sampled at `x`.
pub fn profile_moments(x: &[f64], w: &[f64]) -> (f64, f64) {
    let total: f64 = w.iter().sum();
    let mean = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / total;
    let var = x
        .iter()
        .zip(w)
        .map(|(a, b)| (a - mean) * (a - mean) * b)
        .sum::<f64>()
        / total;
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_is_exact_for_lines() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (s, c) = linear_fit(&x, &y).unwrap();
        assert!((s - 2.5).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]).is_err());
    }

    #[test]
    fn frequency_of_sampled_cosine() {
        let w = 1.7;
        let t: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| (w * t + 0.3).cos()).collect();
        let fit = fit_angular_frequency(&t, &y).unwrap();
        assert!((fit - w).abs() / w < 1e-9, "{fit}");
    }

    #[test]
    fn decay_rate_of_exponential() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| -3.0 * (-0.4 * t).exp()).collect();
        assert!((fit_decay_rate(&t, &y).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn orders_and_norms() {
        let o = convergence_orders(&[0.1, 0.05, 0.025], &[1e-2, 2.5e-3, 6.25e-4]);
        assert!(o.iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert_eq!(relative_l2(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        let (m, v) = profile_moments(&[-1.0, 0.0, 1.0], &[1.0, 2.0, 1.0]);
        assert!(m.abs() < 1e-15 && (v - 0.5).abs() < 1e-15);
    }
}
