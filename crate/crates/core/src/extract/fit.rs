//! Gaussian line fits by Levenberg-Marquardt.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{g_from_centers, Spectrum};
use crate::{domain, Error, Result};

pub fn gaussian(x: f64, center: f64, sigma: f64) -> f64 {
    let u = (x - center) / sigma;
    (-0.5 * u * u).exp()
}

struct LmResult {
    params: Vec<f64>,
    rss: f64,
    /// Parameter covariance scaled by the residual variance.
    covariance: Option<DMatrix<f64>>,
    converged: bool,
}

/// Minimise `Σ (y − f(x; p))²`. `model` returns the value and gradient in `p`.
fn levenberg_marquardt(
    x: &[f64],
    y: &[f64],
    p0: &[f64],
    model: impl Fn(f64, &[f64]) -> (f64, Vec<f64>),
) -> LmResult {
    let n = x.len();
    let m = p0.len();
    let eval = |p: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, m);
        for i in 0..n {
            let (f, g) = model(x[i], p);
            r[i] = y[i] - f;
            for k in 0..m {
                j[(i, k)] = g[k];
            }
        }
        (r, j)
    };
    let mut p = p0.to_vec();
    let (mut r, mut j) = eval(&p);
    let mut rss = r.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..500 {
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let mut a = jtj.clone();
        for k in 0..m {
            a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
        }
        let Some(step) = a.cholesky().map(|c| c.solve(&jtr)) else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
            continue;
        };
        let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let (rt, jt) = eval(&trial);
        let rss_t = rt.norm_squared();
        if rss_t.is_finite() && rss_t <= rss {
            let small_step = step
                .iter()
                .zip(&trial)
                .all(|(s, v)| s.abs() <= 1e-10 * (v.abs() + 1e-10));
            let small_gain = rss - rss_t <= 1e-14 * rss.max(1e-300);
            p = trial;
            r = rt;
            j = jt;
            rss = rss_t;
            lambda = (lambda / 3.0).max(1e-12);
            if small_step || small_gain {
                converged = true;
                break;
            }
        } else {
            lambda *= 4.0;
            if lambda > 1e12 {
                // no downhill direction left: a (possibly flat) minimum
                converged = true;
                break;
            }
        }
    }
    let dof = n.saturating_sub(m).max(1) as f64;
    let covariance = (j.transpose() * &j)
        .try_inverse()
        .map(|c| c * (rss / dof));
    LmResult {
        params: p,
        rss,
        covariance,
        converged,
    }
}

/// One Gaussian on a constant background; energies in μeV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingletFit {
    pub center: f64,
    pub sigma: f64,
    pub amplitude: f64,
    pub baseline: f64,
    pub rss: f64,
}

/// Two Gaussians with a shared width on a constant background; energies in μeV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubletFit {
    /// Ordered `c1 ≤ c2`.
    pub centers: [f64; 2],
    pub sigma: f64,
    pub amplitudes: [f64; 2],
    pub baseline: f64,
    pub center_errors: [f64; 2],
    pub sigma_error: f64,
    pub amplitude_errors: [f64; 2],
    /// Root-mean-square residual (counts).
    pub residual: f64,
}

impl DoubletFit {
    /// Integrated line areas `A·σ·√(2π)`.
    pub fn areas(&self) -> [f64; 2] {
        let k = self.sigma * (2.0 * std::f64::consts::PI).sqrt();
        [self.amplitudes[0] * k, self.amplitudes[1] * k]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}

/// Shift energies to the window mean and scale counts to unit peak so the
/// normal equations stay well conditioned.
fn normalise(s: &Spectrum) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let x0 = 0.5 * (s.energy[0] + s.energy[s.len() - 1]);
    let ymax = s.counts.iter().cloned().fold(0.0, f64::max).max(1e-300);
    (
        s.energy.iter().map(|e| e - x0).collect(),
        s.counts.iter().map(|c| c / ymax).collect(),
        x0,
        ymax,
    )
}

fn counts_at(x: &[f64], y: &[f64], at: f64) -> f64 {
    let k = x.partition_point(|v| *v < at).min(x.len() - 1);
    y[k]
}

pub fn fit_single_gaussian(s: &Spectrum) -> Result<SingletFit> {
    let (x, y, x0, ymax) = normalise(s);
    let base = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let imax = (0..y.len()).max_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap_or(0);
    let span = x[x.len() - 1] - x[0];
    let mut best: Option<LmResult> = None;
    for width in [span / 20.0, span / 8.0, span / 50.0] {
        let p0 = [x[imax], width, y[imax] - base, base];
        let fit = levenberg_marquardt(&x, &y, &p0, |xi, p| {
            let g = gaussian(xi, p[0], p[1]);
            let u = (xi - p[0]) / p[1];
            (
                p[2] * g + p[3],
                vec![p[2] * g * u / p[1], p[2] * g * u * u / p[1], g, 1.0],
            )
        });
        if best.as_ref().is_none_or(|b| fit.rss < b.rss) {
            best = Some(fit);
        }
    }
    let f = best.ok_or_else(|| Error::Numerical("no fit".into()))?;
    Ok(SingletFit {
        center: f.params[0] + x0,
        sigma: f.params[1].abs(),
        amplitude: f.params[2] * ymax,
        baseline: f.params[3] * ymax,
        rss: f.rss * ymax * ymax,
    })
}

/// Fit two shared-width Gaussians starting from two centre guesses (μeV).
///
/// Fails with [`Error::UnresolvedDoublet`] when the fit does not converge,
/// the centres merge below σ/4, one component is under 1% of the other, or
/// a single Gaussian describes the data as well.
pub fn fit_double_gaussian(s: &Spectrum, init: [f64; 2]) -> Result<DoubletFit> {
    let (lo, hi) = (s.energy[0], s.energy[s.len() - 1]);
    if init.iter().any(|c| !(*c >= lo && *c <= hi)) {
        return domain("initial centres must lie within the spectrum");
    }
    let (x, y, x0, ymax) = normalise(s);
    let base = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let (g1, g2) = (init[0].min(init[1]) - x0, init[0].max(init[1]) - x0);
    let sep = (g2 - g1).max(2.0 * (x[1] - x[0]));
    let span = x[x.len() - 1] - x[0];
    let mut best: Option<LmResult> = None;
    for width in [sep / 4.0, sep / 2.0, sep, span / 20.0] {
        let a1 = (counts_at(&x, &y, g1) - base).max(1e-3);
        let a2 = (counts_at(&x, &y, g2) - base).max(1e-3);
        let p0 = [g1, g2, width, a1, a2, base];
        let fit = levenberg_marquardt(&x, &y, &p0, |xi, p| {
            let s = p[2];
            let (ga, gb) = (gaussian(xi, p[0], s), gaussian(xi, p[1], s));
            let (ua, ub) = ((xi - p[0]) / s, (xi - p[1]) / s);
            (
                p[3] * ga + p[4] * gb + p[5],
                vec![
                    p[3] * ga * ua / s,
                    p[4] * gb * ub / s,
                    (p[3] * ga * ua * ua + p[4] * gb * ub * ub) / s,
                    ga,
                    gb,
                    1.0,
                ],
            )
        });
        if fit.converged && fit.params.iter().all(|v| v.is_finite()) && best.as_ref().is_none_or(|b| fit.rss < b.rss) {
            best = Some(fit);
        }
    }
    let f = best.ok_or_else(|| Error::UnresolvedDoublet("fit did not converge".into()))?;
    let p = &f.params;
    let sigma = p[2].abs();
    let mut comps = [(p[0], p[3], 0usize, 3usize), (p[1], p[4], 1, 4)];
    comps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (c1, c2) = (comps[0].0, comps[1].0);
    let (a1, a2) = (comps[0].1, comps[1].1);
    if (c2 - c1).abs() < sigma / 4.0 {
        return Err(Error::UnresolvedDoublet(format!(
            "centres {:.3} and {:.3} μeV are closer than σ/4",
            c1 + x0,
            c2 + x0
        )));
    }
    if a1 <= 0.0 || a2 <= 0.0 || a1.min(a2) / a1.max(a2) < 1e-2 {
        return Err(Error::UnresolvedDoublet("one component is negligible".into()));
    }
    if c1 < x[0] || c2 > x[x.len() - 1] {
        return Err(Error::UnresolvedDoublet("a centre left the fit window".into()));
    }
    let single = fit_single_gaussian(s)?;
    let rss_single = single.rss / (ymax * ymax);
    let floor = 1e-12 * y.iter().map(|v| v * v).sum::<f64>();
    if rss_single <= 1.2 * f.rss + floor {
        return Err(Error::UnresolvedDoublet(
            "a single line fits the data as well as two".into(),
        ));
    }
    let err = |k: usize| {
        f.covariance
            .as_ref()
            .map(|c| c[(k, k)].max(0.0).sqrt())
            .unwrap_or(f64::NAN)
    };
    Ok(DoubletFit {
        centers: [c1 + x0, c2 + x0],
        sigma,
        amplitudes: [a1 * ymax, a2 * ymax],
        baseline: p[5] * ymax,
        center_errors: [err(comps[0].2), err(comps[1].2)],
        sigma_error: err(2),
        amplitude_errors: [err(comps[0].3) * ymax, err(comps[1].3) * ymax],
        residual: (f.rss / x.len() as f64).sqrt() * ymax,
    })
}

/// The `n` tallest local maxima of a three-point smoothed spectrum, returned
/// in ascending energy (μeV).
pub fn find_peaks(s: &Spectrum, n: usize) -> Vec<f64> {
    let y = &s.counts;
    let len = y.len();
    let sm: Vec<f64> = (0..len)
        .map(|i| {
            let a = y[i.saturating_sub(1)];
            let c = y[(i + 1).min(len - 1)];
            0.25 * a + 0.5 * y[i] + 0.25 * c
        })
        .collect();
    let mut maxima: Vec<usize> = (1..len.saturating_sub(1))
        .filter(|&i| sm[i] > sm[i - 1] && sm[i] >= sm[i + 1])
        .collect();
    maxima.sort_by(|&a, &b| sm[b].total_cmp(&sm[a]));
    let mut out: Vec<f64> = maxima.into_iter().take(n).map(|i| s.energy[i]).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Result of fitting the two Voigt doublets of a four-line spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GExtraction {
    pub low: DoubletFit,
    pub high: DoubletFit,
    /// The four fitted centres (μeV), ascending.
    pub centers: [f64; 4],
    pub g_e: f64,
    pub g_t: f64,
}

/// Fit lines 1-2 and 3-4 as separate doublets, split halfway between the
/// second and third guess, and convert the centres to `(|g_e|, |g_t|)`.
/// Without guesses the four tallest peaks are used.
pub fn extract_g_factors(s: &Spectrum, b: f64, guesses: Option<[f64; 4]>) -> Result<GExtraction> {
    let g = match guesses {
        Some(g) => g,
        None => {
            let p = find_peaks(s, 4);
            if p.len() < 4 {
                return Err(Error::UnresolvedDoublet(format!(
                    "found {} peaks, need 4",
                    p.len()
                )));
            }
            [p[0], p[1], p[2], p[3]]
        }
    };
    let mut g = g;
    g.sort_by(f64::total_cmp);
    let split = 0.5 * (g[1] + g[2]);
    let lo_edge = g[0] - (split - g[0]);
    let hi_edge = g[3] + (g[3] - split);
    let low = fit_double_gaussian(&s.window(lo_edge, split)?, [g[0], g[1]])?;
    let high = fit_double_gaussian(&s.window(split, hi_edge)?, [g[2], g[3]])?;
    let centers = [low.centers[0], low.centers[1], high.centers[0], high.centers[1]];
    let (g_e, g_t) = g_from_centers(centers.map(|c| c * 1e-6), b)?;
    Ok(GExtraction {
        low,
        high,
        centers,
        g_e,
        g_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn doublet(c: [f64; 2], sigma: f64, amp: [f64; 2], grid: (f64, f64, usize), snr: Option<u64>) -> Spectrum {
        let (a, b, n) = grid;
        let e: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let peak = amp[0].max(amp[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(snr.unwrap_or(0));
        let noise = Normal::new(0.0, peak / 100.0).unwrap();
        let counts = e
            .iter()
            .map(|x| {
                let v = 5.0 + amp[0] * gaussian(*x, c[0], sigma) + amp[1] * gaussian(*x, c[1], sigma);
                let n = if snr.is_some() { noise.sample(&mut rng) } else { 0.0 };
                (v + n).max(0.0)
            })
            .collect();
        Spectrum::new(e, counts).unwrap()
    }

    #[test]
    fn noiseless_doublet_is_exact() {
        let s = doublet([-20.0, 25.0], 10.0, [100.0, 60.0], (-100.0, 100.0, 401), None);
        let f = fit_double_gaussian(&s, [-15.0, 20.0]).unwrap();
        assert_relative_eq!(f.centers[0], -20.0, epsilon = 1e-6);
        assert_relative_eq!(f.centers[1], 25.0, epsilon = 1e-6);
        assert_relative_eq!(f.sigma, 10.0, epsilon = 1e-6);
        assert_relative_eq!(f.amplitudes[1], 60.0, epsilon = 1e-4);
    }

    #[test]
    fn noisy_doublet_within_sigma_over_20() {
        for seed in 1..6 {
            let s = doublet([-20.0, 25.0], 10.0, [100.0, 80.0], (-100.0, 100.0, 401), Some(seed));
            let f = fit_double_gaussian(&s, [-10.0, 10.0]).unwrap();
            assert!((f.centers[0] + 20.0).abs() < 0.5, "{:?}", f.centers);
            assert!((f.centers[1] - 25.0).abs() < 0.5, "{:?}", f.centers);
            assert!(f.center_errors[0] > 0.0 && f.center_errors[0] < 0.5);
        }
    }

    #[test]
    fn single_line_is_unresolved() {
        let s = doublet([0.0, 0.0], 10.0, [100.0, 0.0], (-100.0, 100.0, 401), None);
        match fit_double_gaussian(&s, [-5.0, 5.0]) {
            Err(Error::UnresolvedDoublet(_)) => {}
            other => panic!("expected unresolved doublet, got {other:?}"),
        }
        let noisy = doublet([0.0, 0.0], 10.0, [100.0, 0.0], (-100.0, 100.0, 401), Some(9));
        assert!(matches!(
            fit_double_gaussian(&noisy, [-5.0, 5.0]),
            Err(Error::UnresolvedDoublet(_))
        ));
        assert!(fit_double_gaussian(&s, [-500.0, 5.0]).is_err());
    }

    #[test]
    fn cross_section_from_quoted_parameters() {
        // energies in μeV: 1.687580 and 1.687720 eV with σ = 44 μeV
        let s = doublet([1_687_580.0, 1_687_720.0], 44.0, [1.0, 1.0], (1_687_300.0, 1_688_000.0, 351), Some(4));
        let f = fit_double_gaussian(&s, [1_687_560.0, 1_687_740.0]).unwrap();
        assert!((f.centers[0] - 1_687_580.0).abs() < 1.0);
        assert!((f.centers[1] - 1_687_720.0).abs() < 1.0);
        assert!((f.sigma - 44.0).abs() < 2.0);
        assert!(f.to_json().contains("\"centers\""));
    }

    #[test]
    fn four_line_extraction() {
        let b = 6.0;
        let mu = crate::spinmodel::MU_B * b;
        let (ge, gt) = (0.12, 0.25);
        let (e, _, _) = crate::optics::transition_energies(0.0, ge * mu, gt * mu);
        let n = 1201;
        let grid: Vec<f64> = (0..n).map(|i| -100.0 + 200.0 * i as f64 / (n - 1) as f64).collect();
        let counts: Vec<f64> = grid
            .iter()
            .map(|x| 1.0 + e.iter().map(|c| 50.0 * gaussian(*x, *c, 3.0)).sum::<f64>())
            .collect();
        let s = Spectrum::new(grid, counts).unwrap();
        let r = extract_g_factors(&s, b, None).unwrap();
        assert_relative_eq!(r.g_e, ge, epsilon = 1e-4);
        assert_relative_eq!(r.g_t, gt, epsilon = 1e-4);
    }
}
