use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeVariable {
    #[default]
    Nodes,
    Edges,
}

/// `width ≈ amplitude · size^(−exponent)` fitted by least squares in log-log space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthFit {
    pub size_variable: SizeVariable,
    /// Points used in the fit.
    pub sizes: Vec<f64>,
    pub widths: Vec<f64>,
    pub amplitude: f64,
    pub amplitude_se: f64,
    pub exponent: f64,
    pub exponent_se: f64,
    /// `ln width − fitted ln width` per point.
    pub residuals: Vec<f64>,
    /// Input points dropped for a non-positive width or size.
    pub excluded: usize,
}

pub fn fit_power_law(sizes: &[f64], widths: &[f64]) -> Result<WidthFit> {
    fit_power_law_with(sizes, widths, SizeVariable::Nodes)
}

pub fn fit_power_law_with(sizes: &[f64], widths: &[f64], size_variable: SizeVariable) -> Result<WidthFit> {
    if sizes.len() != widths.len() {
        return Err(Error::Fit(format!("{} sizes but {} widths", sizes.len(), widths.len())));
    }
    let (kept_sizes, kept_widths): (Vec<f64>, Vec<f64>) = sizes
        .iter()
        .zip(widths)
        .filter(|&(&s, &w)| {
            let ok = s > 0.0 && w > 0.0 && s.is_finite() && w.is_finite();
            if !ok {
                log::warn!("excluding point (size {s}, width {w}) from the power-law fit");
            }
            ok
        })
        .map(|(&s, &w)| (s, w))
        .unzip();
    let m = kept_sizes.len();
    if m < 3 {
        return Err(Error::Fit(format!("need at least 3 positive points, have {m}")));
    }
    let x: Vec<f64> = kept_sizes.iter().map(|s| s.ln()).collect();
    let y: Vec<f64> = kept_widths.iter().map(|w| w.ln()).collect();
    let mf = m as f64;
    let mx = x.iter().sum::<f64>() / mf;
    let my = y.iter().sum::<f64>() / mf;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all sizes are equal".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - (intercept + slope * xi)).collect();
    let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / (mf - 2.0);
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / mf + mx * mx / sxx)).sqrt();
    let amplitude = intercept.exp();
    Ok(WidthFit {
        size_variable,
        sizes: kept_sizes,
        widths: kept_widths,
        amplitude,
        // delta method on A = exp(intercept)
        amplitude_se: amplitude * intercept_se,
        exponent: -slope,
        exponent_se: slope_se,
        residuals,
        excluded: sizes.len() - m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_planted_law() {
        let sizes: Vec<f64> = (1..=10).map(|i| 1000.0 * i as f64).collect();
        let widths: Vec<f64> = sizes.iter().map(|n| 2.75 * n.powf(-0.4)).collect();
        let fit = fit_power_law(&sizes, &widths).unwrap();
        assert!((fit.amplitude / 2.75 - 1.0).abs() < 1e-6);
        assert!((fit.exponent / 0.4 - 1.0).abs() < 1e-6);
        assert!(fit.exponent_se < 1e-9);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-9));
    }

    #[test]
    fn drops_non_positive_widths() {
        let sizes = [100.0, 200.0, 400.0, 800.0];
        let widths = [0.5, 0.0, 0.125, 0.0625];
        let fit = fit_power_law(&sizes, &widths).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!((fit.exponent - 1.0).abs() < 1e-9);
        assert!(fit_power_law(&sizes, &[0.5, 0.0, -1.0, 0.1]).is_err());
    }

    #[test]
    fn noisy_fit_reports_uncertainty() {
        let sizes = [500.0, 1000.0, 2000.0, 4000.0];
        let widths = [0.2, 0.15, 0.12, 0.08];
        let fit = fit_power_law(&sizes, &widths).unwrap();
        assert!(fit.exponent > 0.0 && fit.exponent_se > 0.0 && fit.amplitude_se > 0.0);
        // residuals of an OLS fit with intercept sum to zero
        assert!(fit.residuals.iter().sum::<f64>().abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn planted_exponents_recovered(a in 0.05f64..2.0, amp in 0.01f64..100.0, base in 10.0f64..1000.0) {
            let sizes: Vec<f64> = (0..5).map(|i| base * 2f64.powi(i)).collect();
            let widths: Vec<f64> = sizes.iter().map(|n| amp * n.powf(-a)).collect();
            let fit = fit_power_law(&sizes, &widths).unwrap();
            prop_assert!((fit.exponent - a).abs() < 1e-9 * a.max(1.0));
            prop_assert!((fit.amplitude / amp - 1.0).abs() < 1e-8);
        }
    }
}
