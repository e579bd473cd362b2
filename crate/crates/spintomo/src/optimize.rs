//! Sensitivity figures of merit for the tomographic schemes and their
//! minimization over incident wave numbers.
//!
//! Each figure of merit is the Jacobian volume factor of the map from
//! probabilities to Bloch components; the smaller it is, the less the
//! reconstruction amplifies errors in the observed probabilities. The
//! minimizer is a deterministic grid scan followed by golden-section
//! refinement: derivative-free and reproducible.

use rayon::prelude::*;

use crate::scattering::{Channel, Kappa};
use crate::spin_algebra::UnitDirection;
use crate::tomography::strategy1_frame_scheme;
use crate::{Error, Result};

/// det M_t(Ω) = (1+Ω²)³(1+9Ω²)²/(4Ω⁴), the inverse-map Jacobian of the
/// transmission frame scheme.
pub fn det_mt(omega: f64) -> f64 {
    let om2 = omega * omega;
    (1.0 + om2).powi(3) * (1.0 + 9.0 * om2).powi(2) / (4.0 * om2 * om2)
}

/// λ(Ω) = (1+Ω²)(1+9Ω²)/(4Ω²), the error-amplification factor of the
/// transmission parallel scheme. Minimum 4 at Ω = 1/√3.
pub fn lambda_t(omega: f64) -> f64 {
    let om2 = omega * omega;
    (1.0 + om2) * (1.0 + 9.0 * om2) / (4.0 * om2)
}

/// Reflection analog of [`lambda_t`]: the coefficient multiplying P^r in the
/// parallel reconstruction, 1/(2 b_r) = (1+Ω²)(1+9Ω²)/(2Ω²) = 2λ(Ω).
pub fn lambda_r(omega: f64) -> f64 {
    2.0 * lambda_t(omega)
}

/// det N(Ω1,Ω2) = −(1+Ω1²)²(1+9Ω1²)²(1+Ω2²)(1+9Ω2²)/(4Ω1³Ω2(Ω1−Ω2)),
/// the inverse-map Jacobian of the mixed momentum scheme. Pole at Ω1 = Ω2.
pub fn det_n(omega1: f64, omega2: f64) -> Result<f64> {
    if omega1 == omega2 {
        return Err(Error::DegenerateScheme {
            provenance: format!("strategy2-momentum omega1=omega2={omega1}"),
        });
    }
    let o1 = omega1 * omega1;
    let o2 = omega2 * omega2;
    Ok(-(1.0 + o1).powi(2) * (1.0 + 9.0 * o1).powi(2) * (1.0 + o2) * (1.0 + 9.0 * o2)
        / (4.0 * o1 * omega1 * omega2 * (omega1 - omega2)))
}

/// Inverse-map Jacobian of the reflection frame scheme, computed numerically
/// from the flipped-orientation scheme matrix (no printed closed form).
pub fn det_mr_numeric(kappa: Kappa) -> f64 {
    let scheme = strategy1_frame_scheme(
        UnitDirection::z_axis(),
        UnitDirection::x_axis(),
        kappa,
        Channel::Reflection,
    )
    .expect("canonical axes are orthogonal");
    1.0 / scheme.matrix.det().abs()
}

/// The 1D figures of merit, all evaluated at a wave number κ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureOfMerit {
    DetMt,
    DetMr,
    LambdaT,
    LambdaR,
}

impl FigureOfMerit {
    pub fn eval(self, kappa: f64) -> f64 {
        let omega = 1.0 / kappa;
        match self {
            FigureOfMerit::DetMt => det_mt(omega),
            FigureOfMerit::DetMr => det_mr_numeric(Kappa::new(kappa).expect("positive kappa")),
            FigureOfMerit::LambdaT => lambda_t(omega),
            FigureOfMerit::LambdaR => lambda_r(omega),
        }
    }
}

/// |det N|^{1/3} as a function of the two wave numbers, the quantity the
/// momentum scheme minimizes. Infinite on and near the κ1 = κ2 diagonal
/// (relative gap below 1e-3), which the minimizer skips.
pub fn abs_det_n_cuberoot(kappa1: f64, kappa2: f64) -> f64 {
    let gap = (kappa1 - kappa2).abs() / kappa1.max(kappa2);
    if gap < 1e-3 {
        return f64::INFINITY;
    }
    match det_n(1.0 / kappa1, 1.0 / kappa2) {
        Ok(d) => d.abs().cbrt(),
        Err(_) => f64::INFINITY,
    }
}

/// Result of a 1D minimization.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub argmin: f64,
    pub value: f64,
    /// Grid cell that bracketed the minimum before refinement.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Result of a 2D minimization.
#[derive(Debug, Clone)]
pub struct Optimum2d {
    pub argmin: (f64, f64),
    pub value: f64,
    pub evaluations: usize,
}

const GRID_POINTS: usize = 128;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Minimize a unimodal positive function over [lo, hi]: 128-point log grid
/// scan, then golden-section refinement of the bracketing cell. The argmin
/// is resolved to better than 1e-8.
pub fn minimize_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Optimum> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::InvalidPlan(format!("bad search range [{lo}, {hi}]")));
    }
    let grid = log_grid(lo, hi, GRID_POINTS);
    let values: Vec<f64> = grid.iter().map(|&k| f(k)).collect();
    let mut evaluations = GRID_POINTS;
    let idx = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if idx == 0 || idx == GRID_POINTS - 1 {
        return Err(Error::NoInteriorMinimum { lo, hi });
    }
    let bracket = (grid[idx - 1], grid[idx + 1]);
    let (mut a, mut b) = bracket;

    const PHI_STEP: f64 = 0.381_966_011_250_105_1; // 2 - golden ratio
    let mut x1 = a + PHI_STEP * (b - a);
    let mut x2 = b - PHI_STEP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evaluations += 2;
    while (b - a) > 1e-12 * (a.abs() + b.abs()) && evaluations < 500 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + PHI_STEP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - PHI_STEP * (b - a);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (argmin, value) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    Ok(Optimum {
        argmin,
        value,
        bracket,
        evaluations,
    })
}

/// Minimize f(κ1,κ2) over the box [lo1,hi1]×[lo2,hi2]: coarse log grid, then
/// repeated local zooming. Infinite values (the diagonal pole) are skipped.
/// Evaluations are pure, so the rayon fan-out changes nothing but wall time.
pub fn minimize_2d(
    f: impl Fn(f64, f64) -> f64 + Sync,
    bounds: [f64; 4],
) -> Result<Optimum2d> {
    let [lo1, hi1, lo2, hi2] = bounds;
    for &(lo, hi) in &[(lo1, hi1), (lo2, hi2)] {
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
            return Err(Error::InvalidPlan(format!("bad search box [{lo}, {hi}]")));
        }
    }
    const COARSE: usize = 160;
    let g1 = log_grid(lo1, hi1, COARSE);
    let g2 = log_grid(lo2, hi2, COARSE);
    let coarse: Vec<(usize, f64)> = (0..COARSE * COARSE)
        .into_par_iter()
        .map(|idx| (idx, f(g1[idx / COARSE], g2[idx % COARSE])))
        .collect();
    let mut evaluations = COARSE * COARSE;
    let (best_idx, mut best_val) = coarse
        .iter()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|&(i, v)| (i, v))
        .ok_or(Error::NoInteriorMinimum { lo: lo1, hi: hi1 })?;
    let mut best = (g1[best_idx / COARSE], g2[best_idx % COARSE]);

    // local zoom: linear sub-grids shrinking around the incumbent
    let mut half1 = best.0 * ((hi1 / lo1).ln() / (COARSE - 1) as f64).exp_m1();
    let mut half2 = best.1 * ((hi2 / lo2).ln() / (COARSE - 1) as f64).exp_m1();
    const LOCAL: usize = 21;
    for _ in 0..24 {
        let l1: Vec<f64> = (0..LOCAL)
            .map(|i| {
                (best.0 - half1 + 2.0 * half1 * i as f64 / (LOCAL - 1) as f64).clamp(lo1, hi1)
            })
            .collect();
        let l2: Vec<f64> = (0..LOCAL)
            .map(|i| {
                (best.1 - half2 + 2.0 * half2 * i as f64 / (LOCAL - 1) as f64).clamp(lo2, hi2)
            })
            .collect();
        for &k1 in &l1 {
            for &k2 in &l2 {
                let v = f(k1, k2);
                evaluations += 1;
                if v < best_val {
                    best_val = v;
                    best = (k1, k2);
                }
            }
        }
        half1 *= 0.35;
        half2 *= 0.35;
    }
    Ok(Optimum2d {
        argmin: best,
        value: best_val,
        evaluations,
    })
}
