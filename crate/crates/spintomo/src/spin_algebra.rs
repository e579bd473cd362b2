//! Complex linear algebra over the probe spin space (2x2) and the joint
//! probe-target spin space (4x4), with Pauli/Bloch conversions and the
//! singlet/triplet decomposition of the Heisenberg coupling.
//!
//! Conventions, fixed once for the whole crate:
//! - joint basis ordering |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with the probe spin as the
//!   first tensor factor everywhere;
//! - "up" is along +z of the lab frame; arbitrary directions are handled
//!   through [`pauli_dot`], never by re-basing.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Absolute tolerance for hermiticity and trace checks. All quantities in
/// this crate are O(1) dimensionless.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Plain real 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(self, s: f64) -> Vec3 {
        Vec3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    /// Rodrigues rotation of `self` about `axis` by `angle` radians.
    pub fn rotated(self, axis: UnitDirection, angle: f64) -> Vec3 {
        let k = axis.as_vec3();
        let (s, c) = angle.sin_cos();
        self.scaled(c) + k.cross(self).scaled(s) + k.scaled(k.dot(self) * (1.0 - c))
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Unit vector on the sphere; spin preparation and detection axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitDirection(Vec3);

impl UnitDirection {
    /// Normalizes `v` to unit length. Rejects near-zero or non-finite input.
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::InvalidDirection);
        }
        Ok(UnitDirection(v.scaled(1.0 / n)))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn x_axis() -> Self {
        UnitDirection(Vec3::new(1.0, 0.0, 0.0))
    }

    pub fn y_axis() -> Self {
        UnitDirection(Vec3::new(0.0, 1.0, 0.0))
    }

    pub fn z_axis() -> Self {
        UnitDirection(Vec3::new(0.0, 0.0, 1.0))
    }

    pub fn as_vec3(self) -> Vec3 {
        self.0
    }

    pub fn dot(self, o: UnitDirection) -> f64 {
        self.0.dot(o.0)
    }

    pub fn cross(self, o: UnitDirection) -> Vec3 {
        self.0.cross(o.0)
    }
}

impl Neg for UnitDirection {
    type Output = UnitDirection;
    fn neg(self) -> UnitDirection {
        UnitDirection(-self.0)
    }
}

/// Bloch vector of a qubit density operator; |v| <= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(Vec3);

impl BlochVector {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n > 1.0 + 1e-12 {
            return Err(Error::BlochNormTooLarge { norm: n });
        }
        Ok(BlochVector(v))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn zero() -> Self {
        BlochVector(Vec3::ZERO)
    }

    pub fn as_vec3(self) -> Vec3 {
        self.0
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

/// 2x2 complex matrix, row-major. Houses single-spin operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex2x2(pub [[Complex64; 2]; 2]);

impl Complex2x2 {
    pub fn zero() -> Self {
        Complex2x2([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = Complex64::new(1.0, 0.0);
        m.0[1][1] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs_diff(&self, o: &Complex2x2) -> f64 {
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        d
    }

    /// Max deviation of the matrix from its own adjoint.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn herm_eigenvalues(&self) -> (f64, f64) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1].norm();
        let mid = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mid - r, mid + r)
    }

    /// Tensor product with probe factor first: `self ⊗ other`.
    pub fn kron(&self, other: &Complex2x2) -> Complex4x4 {
        let mut m = Complex4x4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[i][j] * other.0[k][l];
                    }
                }
            }
        }
        m
    }
}

impl Add for Complex2x2 {
    type Output = Complex2x2;
    fn add(self, o: Complex2x2) -> Complex2x2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for Complex2x2 {
    type Output = Complex2x2;
    fn sub(self, o: Complex2x2) -> Complex2x2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl Mul for Complex2x2 {
    type Output = Complex2x2;
    fn mul(self, o: Complex2x2) -> Complex2x2 {
        let mut m = Complex2x2::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    m.0[i][j] += self.0[i][k] * o.0[k][j];
                }
            }
        }
        m
    }
}

/// 4x4 complex matrix over the joint probe ⊗ target spin space, row-major,
/// basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex4x4(pub [[Complex64; 4]; 4]);

impl Complex4x4 {
    pub fn zero() -> Self {
        Complex4x4([[Complex64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs_diff(&self, o: &Complex4x4) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        d
    }

    /// Partial trace over the target (second) factor, leaving the probe 2x2.
    pub fn ptrace_target(&self) -> Complex2x2 {
        let mut m = Complex2x2::zero();
        for p in 0..2 {
            for q in 0..2 {
                for a in 0..2 {
                    m.0[p][q] += self.0[2 * p + a][2 * q + a];
                }
            }
        }
        m
    }
}

impl Add for Complex4x4 {
    type Output = Complex4x4;
    fn add(self, o: Complex4x4) -> Complex4x4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for Complex4x4 {
    type Output = Complex4x4;
    fn sub(self, o: Complex4x4) -> Complex4x4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl Mul for Complex4x4 {
    type Output = Complex4x4;
    fn mul(self, o: Complex4x4) -> Complex4x4 {
        let mut m = Complex4x4::zero();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    m.0[i][j] += self.0[i][k] * o.0[k][j];
                }
            }
        }
        m
    }
}

pub fn sigma_x() -> Complex2x2 {
    let mut m = Complex2x2::zero();
    m.0[0][1] = Complex64::new(1.0, 0.0);
    m.0[1][0] = Complex64::new(1.0, 0.0);
    m
}

pub fn sigma_y() -> Complex2x2 {
    let mut m = Complex2x2::zero();
    m.0[0][1] = Complex64::new(0.0, -1.0);
    m.0[1][0] = Complex64::new(0.0, 1.0);
    m
}

pub fn sigma_z() -> Complex2x2 {
    let mut m = Complex2x2::zero();
    m.0[0][0] = Complex64::new(1.0, 0.0);
    m.0[1][1] = Complex64::new(-1.0, 0.0);
    m
}

/// n·σ for a unit direction n: Hermitian, traceless, squares to identity.
pub fn pauli_dot(n: UnitDirection) -> Complex2x2 {
    let v = n.as_vec3();
    let mut m = Complex2x2::zero();
    m.0[0][0] = Complex64::new(v.z, 0.0);
    m.0[1][1] = Complex64::new(-v.z, 0.0);
    m.0[0][1] = Complex64::new(v.x, -v.y);
    m.0[1][0] = Complex64::new(v.x, v.y);
    m
}

/// ρ = (1 + v·σ)/2. Hermitian, unit trace, eigenvalues (1 ± |v|)/2.
pub fn bloch_to_density(v: &BlochVector) -> Complex2x2 {
    let w = v.as_vec3();
    let mut m = Complex2x2::identity();
    m.0[0][0] += Complex64::new(w.z, 0.0);
    m.0[1][1] -= Complex64::new(w.z, 0.0);
    m.0[0][1] += Complex64::new(w.x, -w.y);
    m.0[1][0] += Complex64::new(w.x, w.y);
    m.scaled(Complex64::new(0.5, 0.0))
}

/// Inverse of [`bloch_to_density`]. Rejects non-Hermitian or wrong-trace input.
pub fn density_to_bloch(rho: &Complex2x2) -> Result<BlochVector> {
    let residual = rho.hermiticity_residual();
    if residual > HERMITICITY_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > HERMITICITY_TOL || tr.im.abs() > HERMITICITY_TOL {
        return Err(Error::WrongTrace { trace: tr.re });
    }
    let x = 2.0 * rho.0[0][1].re;
    let y = -2.0 * rho.0[0][1].im;
    let z = rho.0[0][0].re - rho.0[1][1].re;
    BlochVector::from_components(x, y, z)
}

/// The Heisenberg coupling σ_X·σ_A = σx⊗σx + σy⊗σy + σz⊗σz.
pub fn heisenberg_coupling() -> Complex4x4 {
    sigma_x().kron(&sigma_x()) + sigma_y().kron(&sigma_y()) + sigma_z().kron(&sigma_z())
}

/// Projectors (P1, P3) onto the spin-singlet and spin-triplet subspaces:
/// P1 = (1 − σ_X·σ_A)/4, P3 = (3 + σ_X·σ_A)/4.
pub fn singlet_triplet_projectors() -> (Complex4x4, Complex4x4) {
    let coupling = heisenberg_coupling();
    let quarter = Complex64::new(0.25, 0.0);
    let p1 = (Complex4x4::identity() - coupling).scaled(quarter);
    let p3 = (Complex4x4::identity().scaled(Complex64::new(3.0, 0.0)) + coupling).scaled(quarter);
    (p1, p3)
}
