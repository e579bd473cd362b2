//! Scattering of the probe qubit off the target through a delta-shaped
//! Heisenberg coupling: exact transmission/reflection operators and the
//! associated detection probabilities.
//!
//! Momenta are handled as the dimensionless wave number κ = ħ²k/(mg); the
//! interaction strength is Ω = 1/κ. Probabilities come in two algebraically
//! independent routes, a closed-form coefficient expression (the production
//! path) and an operator-trace expression (retained as an oracle); the two
//! must agree to machine precision.

use num_complex::Complex64;

use crate::spin_algebra::{
    pauli_dot, singlet_triplet_projectors, BlochVector, Complex2x2, Complex4x4,
    UnitDirection, HERMITICITY_TOL,
};
use crate::{Error, Result};

/// Dimensionless incident wave number κ = ħ²k/(mg), strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidWaveNumber { value });
        }
        Ok(Kappa(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The dimensionless interaction strength Ω = mg/ħ²k = 1/κ.
    pub fn omega(self) -> f64 {
        1.0 / self.0
    }
}

/// Which way the probe leaves the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Transmission,
    Reflection,
}

impl Channel {
    pub fn short(self) -> &'static str {
        match self {
            Channel::Transmission => "t",
            Channel::Reflection => "r",
        }
    }
}

/// Singlet/triplet transmission and reflection amplitudes at a given Ω.
///
/// Each channel is separately unitary, |t_s|² + |r_s|² = 1, and t_s = 1 + r_s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelAmplitudes {
    pub t1: Complex64,
    pub r1: Complex64,
    pub t3: Complex64,
    pub r3: Complex64,
}

/// t1 = 1/(1−3iΩ), r1 = 3iΩ/(1−3iΩ), t3 = 1/(1+iΩ), r3 = −iΩ/(1+iΩ).
pub fn channel_amplitudes(omega: f64) -> ChannelAmplitudes {
    let one = Complex64::new(1.0, 0.0);
    let i_om = Complex64::new(0.0, omega);
    let t1 = one / (one - 3.0 * i_om);
    let t3 = one / (one + i_om);
    ChannelAmplitudes {
        t1,
        r1: 3.0 * i_om * t1,
        t3,
        r3: -i_om * t3,
    }
}

/// R = r1·P1 + r3·P3 on the joint spin space.
pub fn reflection_operator(omega: f64) -> Complex4x4 {
    let amps = channel_amplitudes(omega);
    let (p1, p3) = singlet_triplet_projectors();
    p1.scaled(amps.r1) + p3.scaled(amps.r3)
}

/// T = 1 + R = t1·P1 + t3·P3 on the joint spin space.
pub fn transmission_operator(omega: f64) -> Complex4x4 {
    Complex4x4::identity() + reflection_operator(omega)
}

/// The real quadruple (a, a', b, c) entering one channel's probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityCoefficients {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub c: f64,
    pub channel: Channel,
}

/// Transmission coefficients:
/// a_t = (1+7Ω²)/(2(1+Ω²)(1+9Ω²)), a'_t = (1+3Ω²)/(2(1+Ω²)(1+9Ω²)),
/// b_t = Ω²/((1+Ω²)(1+9Ω²)), c_t = −Ω/((1+Ω²)(1+9Ω²)).
pub fn transmission_coefficients(omega: f64) -> ProbabilityCoefficients {
    let om2 = omega * omega;
    let d = (1.0 + om2) * (1.0 + 9.0 * om2);
    ProbabilityCoefficients {
        a: (1.0 + 7.0 * om2) / (2.0 * d),
        a_prime: (1.0 + 3.0 * om2) / (2.0 * d),
        b: om2 / d,
        c: -omega / d,
        channel: Channel::Transmission,
    }
}

/// Reflection coefficients:
/// a_r = 3Ω²(1+3Ω²)/(2(1+Ω²)(1+9Ω²)), a'_r = −Ω²(1−9Ω²)/(2(1+Ω²)(1+9Ω²)),
/// b_r = Ω²/((1+Ω²)(1+9Ω²)), c_r = 3Ω³/((1+Ω²)(1+9Ω²)).
pub fn reflection_coefficients(omega: f64) -> ProbabilityCoefficients {
    let om2 = omega * omega;
    let d = (1.0 + om2) * (1.0 + 9.0 * om2);
    ProbabilityCoefficients {
        a: 3.0 * om2 * (1.0 + 3.0 * om2) / (2.0 * d),
        a_prime: -om2 * (1.0 - 9.0 * om2) / (2.0 * d),
        b: om2 / d,
        c: 3.0 * om2 * omega / d,
        channel: Channel::Reflection,
    }
}

pub fn coefficients(omega: f64, channel: Channel) -> ProbabilityCoefficients {
    match channel {
        Channel::Transmission => transmission_coefficients(omega),
        Channel::Reflection => reflection_coefficients(omega),
    }
}

/// One detector configuration: prepare along n_i, detect along n_f in the
/// given channel at wave number κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetup {
    pub n_i: UnitDirection,
    pub n_f: UnitDirection,
    pub kappa: Kappa,
    pub channel: Channel,
}

fn clamp_unit_interval(p: f64) -> f64 {
    debug_assert!(
        p > -1e-12 && p < 1.0 + 1e-12,
        "probability {p} out of bounds"
    );
    p.clamp(0.0, 1.0)
}

/// Detection probability from the closed-form coefficient expression.
///
/// Transmission couples to b_t[3(n_f·v) + (n_i·v)], reflection to
/// b_r[(n_f·v) − (n_i·v)]; both add a'(n_f·n_i) and c·v·(n_f×n_i).
pub fn probability_closed_form(setup: &MeasurementSetup, v: &BlochVector) -> f64 {
    let co = coefficients(setup.kappa.omega(), setup.channel);
    let nf = setup.n_f.as_vec3();
    let ni = setup.n_i.as_vec3();
    let w = v.as_vec3();
    let spin_term = match setup.channel {
        Channel::Transmission => co.b * (3.0 * nf.dot(w) + ni.dot(w)),
        Channel::Reflection => co.b * (nf.dot(w) - ni.dot(w)),
    };
    let p = co.a + co.a_prime * nf.dot(ni) + spin_term + co.c * w.dot(nf.cross(ni));
    clamp_unit_interval(p)
}

fn check_density(rho: &Complex2x2) -> Result<()> {
    let residual = rho.hermiticity_residual();
    if residual > HERMITICITY_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > HERMITICITY_TOL {
        return Err(Error::WrongTrace { trace: tr.re });
    }
    Ok(())
}

/// Detection probability from the operator trace
/// P = Tr{(|ψ_f⟩⟨ψ_f| ⊗ 1) S (|ψ_i⟩⟨ψ_i| ⊗ ρ_A) S†} with S = T or R.
///
/// Oracle path; must match [`probability_closed_form`] to 1e-12.
pub fn probability_trace(setup: &MeasurementSetup, rho_a: &Complex2x2) -> Result<f64> {
    check_density(rho_a)?;
    let half = Complex64::new(0.5, 0.0);
    let psi_i = (Complex2x2::identity() + pauli_dot(setup.n_i)).scaled(half);
    let psi_f = (Complex2x2::identity() + pauli_dot(setup.n_f)).scaled(half);
    let omega = setup.kappa.omega();
    let s = match setup.channel {
        Channel::Transmission => transmission_operator(omega),
        Channel::Reflection => reflection_operator(omega),
    };
    let rho_in = psi_i.kron(rho_a);
    let out = s * rho_in * s.adjoint();
    let val = (psi_f.kron(&Complex2x2::identity()) * out).trace();
    if val.im.abs() > 1e-10 {
        return Err(Error::ImaginaryResidue { residual: val.im });
    }
    let p = val.re;
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Spin state of the probe after transmission, ρ̃_X = Tr_A{T(|n_i⟩⟨n_i| ⊗ ρ_A)T†},
/// returned unnormalized together with its trace.
pub fn probe_state_after_transmission(
    rho_a: &Complex2x2,
    omega: f64,
    n_i: UnitDirection,
) -> Result<(Complex2x2, f64)> {
    check_density(rho_a)?;
    let half = Complex64::new(0.5, 0.0);
    let psi_i = (Complex2x2::identity() + pauli_dot(n_i)).scaled(half);
    let t = transmission_operator(omega);
    let out = t * psi_i.kron(rho_a) * t.adjoint();
    let reduced = out.ptrace_target();
    Ok((reduced, reduced.trace().re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::{bloch_to_density, Vec3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_direction(rng: &mut impl Rng) -> UnitDirection {
        loop {
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if v.norm() > 1e-3 {
                return UnitDirection::new(v).unwrap();
            }
        }
    }

    fn random_bloch(rng: &mut impl Rng) -> BlochVector {
        let d = random_direction(rng);
        let r: f64 = rng.gen_range(0.0f64..1.0);
        BlochVector::new(d.as_vec3().scaled(r.cbrt())).unwrap()
    }

    fn random_kappa(rng: &mut impl Rng) -> Kappa {
        Kappa::new(10f64.powf(rng.gen_range(-3.0..3.0))).unwrap()
    }

    #[test]
    fn kappa_validation() {
        assert!(Kappa::new(0.0).is_err());
        assert!(Kappa::new(-1.0).is_err());
        assert!(Kappa::new(f64::NAN).is_err());
        assert!(Kappa::new(f64::INFINITY).is_err());
        assert!((Kappa::new(2.0).unwrap().omega() - 0.5).abs() < 1e-15);
        assert!((Kappa::new(3f64.sqrt()).unwrap().omega() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((Kappa::new(1.0).unwrap().omega() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn amplitudes_at_unit_omega() {
        let amps = channel_amplitudes(1.0);
        assert!((amps.t1.norm_sqr() - 0.1).abs() < 1e-14);
        assert!((amps.r1.norm_sqr() - 0.9).abs() < 1e-14);
    }

    #[test]
    fn amplitude_unitarity_on_log_grid() {
        for i in 0..100 {
            let omega = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
            let amps = channel_amplitudes(omega);
            assert!((amps.t1.norm_sqr() + amps.r1.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((amps.t3.norm_sqr() + amps.r3.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((amps.t1 - (Complex64::new(1.0, 0.0) + amps.r1)).norm() < 1e-12);
            assert!((amps.t3 - (Complex64::new(1.0, 0.0) + amps.r3)).norm() < 1e-12);
        }
    }

    #[test]
    fn free_propagation_limit() {
        let amps = channel_amplitudes(1e-9);
        assert!((amps.t1 - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(amps.r1.norm() < 1e-8);
        let t = transmission_operator(1e-9);
        assert!(t.max_abs_diff(&Complex4x4::identity()) < 1e-8);
        let r = reflection_operator(1e-9);
        assert!(r.max_abs_diff(&Complex4x4::zero()) < 1e-8);
    }

    #[test]
    fn operator_identities() {
        for &omega in &[0.01, 0.3, 1.0, 3.0, 100.0] {
            let t = transmission_operator(omega);
            let r = reflection_operator(omega);
            assert!((t - r).max_abs_diff(&Complex4x4::identity()) < 1e-12);
            let flux = t.adjoint() * t + r.adjoint() * r;
            assert!(flux.max_abs_diff(&Complex4x4::identity()) < 1e-12);
        }
    }

    #[test]
    fn transmission_operator_closed_form() {
        // numerator form (1 − 2iΩ − iΩ σ_X·σ_A)/((1−3iΩ)(1+iΩ))
        let omega = 0.7;
        let i_om = Complex64::new(0.0, omega);
        let denom = (Complex64::new(1.0, 0.0) - 3.0 * i_om) * (Complex64::new(1.0, 0.0) + i_om);
        let num = Complex4x4::identity().scaled(Complex64::new(1.0, -2.0 * omega))
            + crate::spin_algebra::heisenberg_coupling().scaled(-i_om);
        let expected = num.scaled(denom.inv());
        assert!(transmission_operator(omega).max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn coefficient_values_at_unit_omega() {
        let c = transmission_coefficients(1.0);
        assert!((c.a - 0.2).abs() < 1e-15);
        assert!((c.a_prime - 0.1).abs() < 1e-15);
        assert!((c.b - 0.05).abs() < 1e-15);
        assert!((c.c + 0.05).abs() < 1e-15);
    }

    #[test]
    fn coefficient_limits_and_signs() {
        // Ω→∞ is total reflection at k→0
        let t = transmission_coefficients(1e6);
        assert!(t.a < 1e-10);
        let r = reflection_coefficients(1e6);
        assert!((r.a - 0.5).abs() < 1e-10);
        for &omega in &[0.01, 0.5, 1.0, 7.0] {
            let t = transmission_coefficients(omega);
            let r = reflection_coefficients(omega);
            assert!(t.c < 0.0);
            assert!(r.c > 0.0);
            assert!((t.b - r.b).abs() < 1e-16);
        }
    }

    #[test]
    fn trace_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let setup = MeasurementSetup {
                n_i: random_direction(&mut rng),
                n_f: random_direction(&mut rng),
                kappa: random_kappa(&mut rng),
                channel: if rng.gen() {
                    Channel::Transmission
                } else {
                    Channel::Reflection
                },
            };
            let v = random_bloch(&mut rng);
            let p_closed = probability_closed_form(&setup, &v);
            let p_trace = probability_trace(&setup, &bloch_to_density(&v)).unwrap();
            assert!(
                (p_closed - p_trace).abs() < 1e-12,
                "mismatch {p_closed} vs {p_trace}"
            );
        }
    }

    #[test]
    fn no_interaction_anchors() {
        let n = UnitDirection::z_axis();
        let v = BlochVector::from_components(0.2, -0.1, 0.4).unwrap();
        let kappa = Kappa::new(1e9).unwrap();
        let t = MeasurementSetup {
            n_i: n,
            n_f: n,
            kappa,
            channel: Channel::Transmission,
        };
        assert!((probability_closed_form(&t, &v) - 1.0).abs() < 1e-12);
        let r = MeasurementSetup {
            n_i: n,
            n_f: UnitDirection::x_axis(),
            kappa,
            channel: Channel::Reflection,
        };
        assert!(probability_closed_form(&r, &v) < 1e-12);
    }

    #[test]
    fn reflection_parallel_detection_ignores_state() {
        let n = UnitDirection::from_components(0.3, -0.5, 0.81).unwrap();
        let setup = MeasurementSetup {
            n_i: n,
            n_f: n,
            kappa: Kappa::new(1.3).unwrap(),
            channel: Channel::Reflection,
        };
        let p0 = probability_closed_form(&setup, &BlochVector::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let v = random_bloch(&mut rng);
            assert!((probability_closed_form(&setup, &v) - p0).abs() < 1e-14);
        }
    }

    #[test]
    fn four_outcome_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n_i = random_direction(&mut rng);
            let n_f = random_direction(&mut rng);
            let kappa = random_kappa(&mut rng);
            let v = random_bloch(&mut rng);
            let mut total = 0.0;
            for channel in [Channel::Transmission, Channel::Reflection] {
                for detect in [n_f, -n_f] {
                    total += probability_closed_form(
                        &MeasurementSetup {
                            n_i,
                            n_f: detect,
                            kappa,
                            channel,
                        },
                        &v,
                    );
                }
            }
            assert!((total - 1.0).abs() < 1e-12, "total {total}");
        }
    }

    #[test]
    fn probe_state_after_transmission_coefficients() {
        // aligned spins stay aligned: only the triplet sector acts
        let omega = 0.8;
        let up = bloch_to_density(&BlochVector::from_components(0.0, 0.0, 1.0).unwrap());
        let (rho, norm) =
            probe_state_after_transmission(&up, omega, UnitDirection::z_axis()).unwrap();
        assert!(rho.0[1][1].norm() < 1e-14);
        assert!(rho.0[0][1].norm() < 1e-14);
        assert!(norm > 0.0);

        // |↓⟩⟨↓| weight after normalization: 4Ω²/(1+9Ω²)·ρ↓↓
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let v = random_bloch(&mut rng);
            let rho_a = bloch_to_density(&v);
            let (rho, _) =
                probe_state_after_transmission(&rho_a, omega, UnitDirection::z_axis()).unwrap();
            assert!(rho.hermiticity_residual() < 1e-13);
            let (lo, _) = rho.herm_eigenvalues();
            assert!(lo > -1e-13);
            let rho_dd = rho_a.0[1][1].re;
            let expected = 4.0 * omega * omega / (1.0 + 9.0 * omega * omega) * rho_dd;
            let scaled = rho.0[1][1].re * (1.0 + omega * omega);
            assert!((scaled - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn probe_state_matches_trace_oracle() {
        // cross-check the reduced state against scattering probabilities:
        // Tr{ψ_f ρ̃_X} must equal the transmission probability
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let v = random_bloch(&mut rng);
            let n_i = random_direction(&mut rng);
            let n_f = random_direction(&mut rng);
            let kappa = random_kappa(&mut rng);
            let rho_a = bloch_to_density(&v);
            let (rho_x, _) =
                probe_state_after_transmission(&rho_a, kappa.omega(), n_i).unwrap();
            let half = Complex64::new(0.5, 0.0);
            let psi_f = (Complex2x2::identity() + pauli_dot(n_f)).scaled(half);
            let p = (psi_f * rho_x).trace().re;
            let setup = MeasurementSetup {
                n_i,
                n_f,
                kappa,
                channel: Channel::Transmission,
            };
            assert!((p - probability_closed_form(&setup, &v)).abs() < 1e-12);
        }
    }
}
