//! Linear-inversion tomography: the 3x3 schemes of both strategies, their
//! numeric inversion, and the single-component parallel scheme.
//!
//! A scheme packages a real 3x3 matrix B, an offset, and an orthonormal
//! frame such that the three detection probabilities satisfy
//! `P = B·(frame components of v) + offset` exactly. Inversion is a plain
//! LU solve with partial pivoting; the printed closed-form inverses are
//! used only as cross-checks in tests.

use std::fmt;

use crate::scattering::{
    reflection_coefficients, transmission_coefficients, Channel, Kappa,
};
use crate::spin_algebra::{BlochVector, UnitDirection, Vec3};
use crate::{Error, Result};

/// Frames must be orthogonal to this tolerance; inputs are normalized but
/// never silently re-orthogonalized.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Relative gap below which the two Strategy II momenta count as equal.
pub const MOMENTUM_DEGENERACY_TOL: f64 = 1e-9;

const CONDITION_LIMIT: f64 = 1e12;

/// Real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn zero() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub fn diagonal(d: f64) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = d;
        }
        m
    }

    pub fn matvec(&self, x: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.0[i][j] * x[j];
            }
        }
        out
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// LU solve with partial pivoting. `None` when a pivot vanishes.
    pub fn solve(&self, rhs: [f64; 3]) -> Option<[f64; 3]> {
        let mut a = self.0;
        let mut b = rhs;
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col] == 0.0 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for row in (0..3).rev() {
            let mut s = b[row];
            for k in row + 1..3 {
                s -= a[row][k] * x[k];
            }
            x[row] = s / a[row][row];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat3> {
        let mut inv = Mat3::zero();
        for j in 0..3 {
            let mut e = [0.0; 3];
            e[j] = 1.0;
            let col = self.solve(e)?;
            for i in 0..3 {
                inv.0[i][j] = col[i];
            }
        }
        Some(inv)
    }

    /// Max-row-sum (infinity) norm.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Infinity-norm condition number; infinite for singular matrices.
    pub fn condition_inf(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm_inf() * inv.norm_inf(),
            None => f64::INFINITY,
        }
    }

    /// Numerical rank via row-echelon elimination with partial pivoting.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let mut a = self.0;
        let scale = self
            .0
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0;
        }
        let tol = rel_tol * scale;
        let mut rank = 0;
        for col in 0..3 {
            if rank >= 3 {
                break;
            }
            let piv = (rank..3)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col].abs() <= tol {
                continue;
            }
            a.swap(rank, piv);
            for row in rank + 1..3 {
                let f = a[row][col] / a[rank][col];
                for k in col..3 {
                    a[row][k] -= f * a[rank][k];
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Which scheme produced a matrix; carried along for error reporting.
#[derive(Debug, Clone)]
pub struct SchemeProvenance {
    pub strategy: &'static str,
    pub channel: Option<Channel>,
    pub kappas: Vec<f64>,
}

impl fmt::Display for SchemeProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.strategy)?;
        if let Some(ch) = self.channel {
            write!(f, " channel={}", ch.short())?;
        }
        write!(f, " kappa=")?;
        for (i, k) in self.kappas.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// A tomographically complete linear map from Bloch components to three
/// detection probabilities.
#[derive(Debug, Clone)]
pub struct SchemeMatrix {
    pub matrix: Mat3,
    pub offset: [f64; 3],
    /// Orthonormal axes whose v-components the matrix rows address.
    pub frame: [UnitDirection; 3],
    pub provenance: SchemeProvenance,
}

impl SchemeMatrix {
    /// Frame components of a lab-frame vector.
    pub fn frame_components(&self, v: Vec3) -> [f64; 3] {
        [
            self.frame[0].as_vec3().dot(v),
            self.frame[1].as_vec3().dot(v),
            self.frame[2].as_vec3().dot(v),
        ]
    }

    /// The exact probabilities this scheme predicts for state `v`.
    pub fn probabilities(&self, v: &BlochVector) -> [f64; 3] {
        let p = self.matrix.matvec(self.frame_components(v.as_vec3()));
        [
            p[0] + self.offset[0],
            p[1] + self.offset[1],
            p[2] + self.offset[2],
        ]
    }

    pub fn condition_number(&self) -> f64 {
        self.matrix.condition_inf()
    }
}

/// Raw and clipped output of a linear inversion.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Unconstrained solution; may leave the Bloch ball under noise.
    pub v_raw: Vec3,
    /// Radial projection of `v_raw` onto the ball.
    pub v_clipped: BlochVector,
    pub condition_number: f64,
    pub was_clipped: bool,
}

fn orthogonality_check(a: UnitDirection, b: UnitDirection) -> Result<()> {
    let dot = a.dot(b);
    if dot.abs() > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal { dot });
    }
    Ok(())
}

/// Strategy I frame scheme: fixed n_i, detection along the orthonormal frame
/// (n_1, n_i×n_1, n_i) for transmission, or along the flipped axes for
/// reflection.
pub fn strategy1_frame_scheme(
    n_i: UnitDirection,
    n_1: UnitDirection,
    kappa: Kappa,
    channel: Channel,
) -> Result<SchemeMatrix> {
    orthogonality_check(n_i, n_1)?;
    let n_2 = UnitDirection::new(n_i.cross(n_1))?;
    let frame = [n_1, n_2, n_i];
    let omega = kappa.omega();
    let (matrix, offset) = match channel {
        Channel::Transmission => {
            let co = transmission_coefficients(omega);
            (
                Mat3([
                    [3.0 * co.b, -co.c, co.b],
                    [co.c, 3.0 * co.b, co.b],
                    [0.0, 0.0, 4.0 * co.b],
                ]),
                [co.a, co.a, co.a + co.a_prime],
            )
        }
        Channel::Reflection => {
            // detection along −n_a restores the v-dependence lost at n_f=n_i
            let co = reflection_coefficients(omega);
            (
                Mat3([
                    [-co.b, co.c, -co.b],
                    [-co.c, -co.b, -co.b],
                    [0.0, 0.0, -2.0 * co.b],
                ]),
                [co.a, co.a, co.a - co.a_prime],
            )
        }
    };
    Ok(SchemeMatrix {
        matrix,
        offset,
        frame,
        provenance: SchemeProvenance {
            strategy: "strategy1-frame",
            channel: Some(channel),
            kappas: vec![kappa.get()],
        },
    })
}

/// Strategy I parallel scheme over three orthogonal preparation axes,
/// n_f = n_i per axis for transmission, n_f = −n_i for reflection.
pub fn strategy1_parallel_scheme(
    axes: [UnitDirection; 3],
    kappa: Kappa,
    channel: Channel,
) -> Result<SchemeMatrix> {
    orthogonality_check(axes[0], axes[1])?;
    orthogonality_check(axes[1], axes[2])?;
    orthogonality_check(axes[0], axes[2])?;
    let omega = kappa.omega();
    let (matrix, offset) = match channel {
        Channel::Transmission => {
            let co = transmission_coefficients(omega);
            (Mat3::diagonal(4.0 * co.b), [co.a + co.a_prime; 3])
        }
        Channel::Reflection => {
            let co = reflection_coefficients(omega);
            (Mat3::diagonal(-2.0 * co.b), [co.a - co.a_prime; 3])
        }
    };
    Ok(SchemeMatrix {
        matrix,
        offset,
        frame: axes,
        provenance: SchemeProvenance {
            strategy: "strategy1-parallel",
            channel: Some(channel),
            kappas: vec![kappa.get()],
        },
    })
}

/// Strategy II mixed scheme with n_f ⊥ n_i: rows are P^r(Ω1), P^t(Ω1),
/// P^t(Ω2) over the frame (n_f, n_i, n_f×n_i). Requires κ1 ≠ κ2.
pub fn strategy2_scheme(
    n_i: UnitDirection,
    n_f: UnitDirection,
    kappa1: Kappa,
    kappa2: Kappa,
) -> Result<SchemeMatrix> {
    orthogonality_check(n_i, n_f)?;
    let provenance = SchemeProvenance {
        strategy: "strategy2-momentum",
        channel: None,
        kappas: vec![kappa1.get(), kappa2.get()],
    };
    let gap = (kappa1.get() - kappa2.get()).abs() / kappa1.get().max(kappa2.get());
    if gap < MOMENTUM_DEGENERACY_TOL {
        return Err(Error::DegenerateScheme {
            provenance: provenance.to_string(),
        });
    }
    let perp = UnitDirection::new(n_f.cross(n_i))?;
    let r1 = reflection_coefficients(kappa1.omega());
    let t1 = transmission_coefficients(kappa1.omega());
    let t2 = transmission_coefficients(kappa2.omega());
    Ok(SchemeMatrix {
        matrix: Mat3([
            [r1.b, -r1.b, r1.c],
            [3.0 * t1.b, t1.b, t1.c],
            [3.0 * t2.b, t2.b, t2.c],
        ]),
        offset: [r1.a, t1.a, t2.a],
        frame: [n_f, n_i, perp],
        provenance,
    })
}

/// Solve `B·v_frame + offset = probs` and map back to the lab frame.
pub fn invert_scheme(scheme: &SchemeMatrix, probs: [f64; 3]) -> Result<ReconstructionResult> {
    let condition_number = scheme.condition_number();
    if !condition_number.is_finite() || condition_number > CONDITION_LIMIT {
        return Err(Error::DegenerateScheme {
            provenance: scheme.provenance.to_string(),
        });
    }
    let rhs = [
        probs[0] - scheme.offset[0],
        probs[1] - scheme.offset[1],
        probs[2] - scheme.offset[2],
    ];
    let comps = scheme.matrix.solve(rhs).ok_or_else(|| Error::DegenerateScheme {
        provenance: scheme.provenance.to_string(),
    })?;
    let v_raw = scheme.frame[0].as_vec3().scaled(comps[0])
        + scheme.frame[1].as_vec3().scaled(comps[1])
        + scheme.frame[2].as_vec3().scaled(comps[2]);
    let norm = v_raw.norm();
    let was_clipped = norm > 1.0;
    let v_clipped = if was_clipped {
        BlochVector::new(v_raw.scaled(1.0 / norm))?
    } else {
        BlochVector::new(v_raw)?
    };
    Ok(ReconstructionResult {
        v_raw,
        v_clipped,
        condition_number,
        was_clipped,
    })
}

/// The component n_i·v from a single parallel-detection probability.
///
/// Transmission: n_i·v = [P(1+Ω²)(1+9Ω²) − (1+5Ω²)]/(4Ω²).
/// Reflection (detection along −n_i): n_i·v = (a_r − a'_r − P)/(2 b_r).
pub fn strategy1_parallel_component(p: f64, omega: f64, channel: Channel) -> f64 {
    match channel {
        Channel::Transmission => {
            let om2 = omega * omega;
            (p * (1.0 + om2) * (1.0 + 9.0 * om2) - (1.0 + 5.0 * om2)) / (4.0 * om2)
        }
        Channel::Reflection => {
            let co = reflection_coefficients(omega);
            (co.a - co.a_prime - p) / (2.0 * co.b)
        }
    }
}

/// Assemble v from the three parallel components along orthogonal axes.
pub fn reconstruct_parallel(
    axes: [UnitDirection; 3],
    probs: [f64; 3],
    kappa: Kappa,
    channel: Channel,
) -> Result<ReconstructionResult> {
    let scheme = strategy1_parallel_scheme(axes, kappa, channel)?;
    invert_scheme(&scheme, probs)
}

/// Rank report for the transmission-only momentum scheme.
#[derive(Debug, Clone)]
pub struct RankReport {
    pub matrix: Mat3,
    pub rank: usize,
}

/// The transmission-only Strategy II matrix. Its first two columns are
/// proportional (ratio 3), so the rank is 2 for every κ triple.
pub fn strategy2_transmission_only_rank(
    kappa1: Kappa,
    kappa2: Kappa,
    kappa3: Kappa,
) -> RankReport {
    let mut matrix = Mat3::zero();
    for (row, kappa) in [kappa1, kappa2, kappa3].into_iter().enumerate() {
        let co = transmission_coefficients(kappa.omega());
        matrix.0[row] = [3.0 * co.b, co.b, co.c];
    }
    RankReport {
        matrix,
        rank: matrix.rank(1e-10),
    }
}
