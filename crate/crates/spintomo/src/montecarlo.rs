//! Finite-shot simulation of the scattering experiments: multinomial shot
//! noise over the four exclusive detector outcomes, reconstruction from the
//! empirical frequencies, and error statistics versus shot count and κ.
//!
//! Determinism contract: every replica owns a ChaCha stream derived from
//! (seed, replica index), and results are reduced in replica order, so the
//! output is bitwise identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::scattering::{probability_closed_form, Channel, Kappa, MeasurementSetup};
use crate::spin_algebra::{BlochVector, UnitDirection, Vec3};
use crate::tomography::{
    invert_scheme, strategy1_frame_scheme, strategy1_parallel_scheme, strategy2_scheme,
    ReconstructionResult, SchemeMatrix,
};
use crate::{Error, Result};

/// Shot counts for the four exclusive detector outcomes: transmitted or
/// reflected, spin along +n_f or −n_f.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub transmitted_plus: u64,
    pub transmitted_minus: u64,
    pub reflected_plus: u64,
    pub reflected_minus: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.transmitted_plus + self.transmitted_minus + self.reflected_plus + self.reflected_minus
    }
}

/// Exact probabilities of the four exclusive outcomes; they sum to 1.
pub fn outcome_probabilities(
    n_i: UnitDirection,
    n_f: UnitDirection,
    kappa: Kappa,
    v: &BlochVector,
) -> [f64; 4] {
    let mut p = [0.0; 4];
    for (slot, (channel, detect)) in [
        (Channel::Transmission, n_f),
        (Channel::Transmission, -n_f),
        (Channel::Reflection, n_f),
        (Channel::Reflection, -n_f),
    ]
    .into_iter()
    .enumerate()
    {
        p[slot] = probability_closed_form(
            &MeasurementSetup {
                n_i,
                n_f: detect,
                kappa,
                channel,
            },
            v,
        );
    }
    p
}

/// Multinomial draw over four categories via chained binomials.
fn multinomial4(rng: &mut impl Rng, shots: u64, p: [f64; 4]) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    for i in 0..3 {
        if remaining == 0 {
            break;
        }
        let q = if mass_left <= f64::MIN_POSITIVE {
            1.0
        } else {
            (p[i] / mass_left).clamp(0.0, 1.0)
        };
        let draw = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("probability clamped to [0, 1]")
                .sample(rng)
        };
        out[i] = draw;
        remaining -= draw;
        mass_left = (mass_left - p[i]).max(0.0);
    }
    out[3] = remaining;
    out
}

/// Sample the detector outcomes of `shots` incident probes.
pub fn sample_shots(
    n_i: UnitDirection,
    n_f: UnitDirection,
    kappa: Kappa,
    v: &BlochVector,
    shots: u64,
    rng: &mut impl Rng,
) -> OutcomeCounts {
    let p = outcome_probabilities(n_i, n_f, kappa, v);
    let c = multinomial4(rng, shots, p);
    OutcomeCounts {
        transmitted_plus: c[0],
        transmitted_minus: c[1],
        reflected_plus: c[2],
        reflected_minus: c[3],
    }
}

/// Seeded convenience wrapper around [`sample_shots`].
pub fn sample_shots_seeded(
    n_i: UnitDirection,
    n_f: UnitDirection,
    kappa: Kappa,
    v: &BlochVector,
    shots: u64,
    seed: u64,
) -> OutcomeCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_shots(n_i, n_f, kappa, v, shots, &mut rng)
}

/// One scheme row realized as a detector configuration: the estimated
/// probability is the fraction of shots landing in `channel` with spin +detect.
#[derive(Debug, Clone, Copy)]
pub struct RowMeasurement {
    pub n_i: UnitDirection,
    pub detect: UnitDirection,
    pub kappa: Kappa,
    pub channel: Channel,
}

/// Which tomographic scheme a simulated experiment drives.
#[derive(Debug, Clone)]
pub enum StrategyPlan {
    Frame {
        n_i: UnitDirection,
        n_1: UnitDirection,
        kappa: Kappa,
        channel: Channel,
    },
    Parallel {
        axes: [UnitDirection; 3],
        kappa: Kappa,
        channel: Channel,
    },
    Momentum {
        n_i: UnitDirection,
        n_f: UnitDirection,
        kappa1: Kappa,
        kappa2: Kappa,
    },
}

impl StrategyPlan {
    pub fn scheme(&self) -> Result<SchemeMatrix> {
        match self {
            StrategyPlan::Frame {
                n_i,
                n_1,
                kappa,
                channel,
            } => strategy1_frame_scheme(*n_i, *n_1, *kappa, *channel),
            StrategyPlan::Parallel {
                axes,
                kappa,
                channel,
            } => strategy1_parallel_scheme(*axes, *kappa, *channel),
            StrategyPlan::Momentum {
                n_i,
                n_f,
                kappa1,
                kappa2,
            } => strategy2_scheme(*n_i, *n_f, *kappa1, *kappa2),
        }
    }

    /// The three detector configurations matching the scheme rows, in row order.
    pub fn row_measurements(&self) -> Result<[RowMeasurement; 3]> {
        let scheme = self.scheme()?;
        Ok(match self {
            StrategyPlan::Frame {
                n_i,
                kappa,
                channel,
                ..
            } => scheme.frame.map(|axis| RowMeasurement {
                n_i: *n_i,
                detect: match channel {
                    Channel::Transmission => axis,
                    Channel::Reflection => -axis,
                },
                kappa: *kappa,
                channel: *channel,
            }),
            StrategyPlan::Parallel {
                axes,
                kappa,
                channel,
            } => axes.map(|axis| RowMeasurement {
                n_i: axis,
                detect: match channel {
                    Channel::Transmission => axis,
                    Channel::Reflection => -axis,
                },
                kappa: *kappa,
                channel: *channel,
            }),
            StrategyPlan::Momentum {
                n_i,
                n_f,
                kappa1,
                kappa2,
            } => [
                RowMeasurement {
                    n_i: *n_i,
                    detect: *n_f,
                    kappa: *kappa1,
                    channel: Channel::Reflection,
                },
                RowMeasurement {
                    n_i: *n_i,
                    detect: *n_f,
                    kappa: *kappa1,
                    channel: Channel::Transmission,
                },
                RowMeasurement {
                    n_i: *n_i,
                    detect: *n_f,
                    kappa: *kappa2,
                    channel: Channel::Transmission,
                },
            ],
        })
    }
}

/// A full simulated experiment: scheme, shots per detector row, RNG seed.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub strategy: StrategyPlan,
    pub shots: u64,
    pub seed: u64,
}

/// Error statistics over the replication loop.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// Mean Euclidean Bloch distance |v_est − v_true|.
    pub mean_error: f64,
    pub std_error: f64,
    /// Mean trace distance, |v_est − v_true|/2 for qubits.
    pub mean_trace_distance: f64,
    /// Fraction of replicas whose raw estimate left the Bloch ball.
    pub clip_rate: f64,
}

/// Everything a simulated experiment produces.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    /// Reconstruction from the first replica.
    pub reconstruction: ReconstructionResult,
    pub report: ErrorReport,
    /// Bloch-distance error of each replica, in replica order.
    pub per_replica_errors: Vec<f64>,
}

fn estimate_row_probability(
    row: &RowMeasurement,
    v: &BlochVector,
    shots: u64,
    rng: &mut impl Rng,
) -> f64 {
    let counts = sample_shots(row.n_i, row.detect, row.kappa, v, shots, rng);
    let hit = match row.channel {
        Channel::Transmission => counts.transmitted_plus,
        Channel::Reflection => counts.reflected_plus,
    };
    hit as f64 / shots as f64
}

fn replica_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_replica(
    scheme: &SchemeMatrix,
    rows: &[RowMeasurement; 3],
    v_true: &BlochVector,
    shots: u64,
    rng: &mut impl Rng,
) -> Result<ReconstructionResult> {
    let mut probs = [0.0; 3];
    for (slot, row) in rows.iter().enumerate() {
        probs[slot] = estimate_row_probability(row, v_true, shots, rng);
    }
    invert_scheme(scheme, probs)
}

/// Run the replication loop and summarize reconstruction errors.
pub fn estimate_and_reconstruct(
    plan: &ExperimentPlan,
    v_true: &BlochVector,
    replicas: usize,
) -> Result<SimulationOutput> {
    if plan.shots == 0 {
        return Err(Error::InvalidPlan("shots must be >= 1".into()));
    }
    if replicas == 0 {
        return Err(Error::InvalidPlan("replicas must be >= 1".into()));
    }
    let scheme = plan.strategy.scheme()?;
    let rows = plan.strategy.row_measurements()?;
    let results: Vec<Result<ReconstructionResult>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(plan.seed, r as u64);
            run_replica(&scheme, &rows, v_true, plan.shots, &mut rng)
        })
        .collect();
    let mut recs = Vec::with_capacity(replicas);
    for r in results {
        recs.push(r?);
    }
    let per_replica_errors: Vec<f64> = recs
        .iter()
        .map(|rec| (rec.v_clipped.as_vec3() - v_true.as_vec3()).norm())
        .collect();
    let report = summarize(&per_replica_errors, &recs);
    Ok(SimulationOutput {
        reconstruction: recs.swap_remove(0),
        report,
        per_replica_errors,
    })
}

/// Reconstruct from exact (infinite-shot) probabilities; zero error by
/// construction, useful as a pipeline shortcut.
pub fn reconstruct_exact(strategy: &StrategyPlan, v_true: &BlochVector) -> Result<ReconstructionResult> {
    let scheme = strategy.scheme()?;
    invert_scheme(&scheme, scheme.probabilities(v_true))
}

fn summarize(errors: &[f64], recs: &[ReconstructionResult]) -> ErrorReport {
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    let clipped = recs.iter().filter(|r| r.was_clipped).count() as f64;
    ErrorReport {
        mean_error: mean,
        std_error: var.sqrt(),
        mean_trace_distance: mean / 2.0,
        clip_rate: clipped / n,
    }
}

/// One row of the κ sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub kappa: f64,
    pub mean_error: f64,
    pub std_error: f64,
    pub clip_rate: f64,
}

/// Which Strategy I scheme a κ sweep drives, on canonical lab axes.
#[derive(Debug, Clone, Copy)]
pub enum SweepScheme {
    Frame(Channel),
    Parallel(Channel),
}

fn sweep_plan(scheme: SweepScheme, kappa: Kappa) -> StrategyPlan {
    match scheme {
        SweepScheme::Frame(channel) => StrategyPlan::Frame {
            n_i: UnitDirection::z_axis(),
            n_1: UnitDirection::x_axis(),
            kappa,
            channel,
        },
        SweepScheme::Parallel(channel) => StrategyPlan::Parallel {
            axes: [
                UnitDirection::x_axis(),
                UnitDirection::y_axis(),
                UnitDirection::z_axis(),
            ],
            kappa,
            channel,
        },
    }
}

/// Mean reconstruction error per κ, averaged over the supplied true states
/// (replica r uses `v_set[r % len]`).
pub fn error_vs_kappa_sweep(
    scheme: SweepScheme,
    kappa_grid: &[f64],
    shots: u64,
    replicas: usize,
    v_set: &[BlochVector],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if shots == 0 || replicas == 0 || kappa_grid.is_empty() || v_set.is_empty() {
        return Err(Error::InvalidPlan(
            "sweep needs shots, replicas, kappa grid and states".into(),
        ));
    }
    let mut table = Vec::with_capacity(kappa_grid.len());
    for (ki, &k) in kappa_grid.iter().enumerate() {
        let kappa = Kappa::new(k)?;
        let plan = sweep_plan(scheme, kappa);
        let scheme_matrix = plan.scheme()?;
        let rows = plan.row_measurements()?;
        let results: Vec<Result<(f64, bool)>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let stream = (ki as u64) * (replicas as u64) + r as u64;
                let mut rng = replica_rng(seed, stream);
                let v_true = &v_set[r % v_set.len()];
                let rec = run_replica(&scheme_matrix, &rows, v_true, shots, &mut rng)?;
                let err = (rec.v_clipped.as_vec3() - v_true.as_vec3()).norm();
                Ok((err, rec.was_clipped))
            })
            .collect();
        let mut errors = Vec::with_capacity(replicas);
        let mut clipped = 0usize;
        for r in results {
            let (e, c) = r?;
            errors.push(e);
            clipped += c as usize;
        }
        let n = errors.len() as f64;
        let mean = errors.iter().sum::<f64>() / n;
        let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
        table.push(SweepRow {
            kappa: k,
            mean_error: mean,
            std_error: var.sqrt(),
            clip_rate: clipped as f64 / n,
        });
    }
    Ok(table)
}

/// Uniform direction on the sphere.
pub fn sample_unit_direction(rng: &mut impl Rng) -> UnitDirection {
    loop {
        let v = Vec3::new(
            rng.sample::<f64, _>(rand_distr::StandardNormal),
            rng.sample::<f64, _>(rand_distr::StandardNormal),
            rng.sample::<f64, _>(rand_distr::StandardNormal),
        );
        if v.norm() > 1e-6 {
            return UnitDirection::new(v).expect("finite nonzero vector");
        }
    }
}

/// Uniform state in the Bloch ball.
pub fn sample_bloch_ball(rng: &mut impl Rng) -> BlochVector {
    let d = sample_unit_direction(rng);
    let r: f64 = rng.gen_range(0.0..1.0);
    BlochVector::new(d.as_vec3().scaled(r.cbrt())).expect("radius <= 1")
}
