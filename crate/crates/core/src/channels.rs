//! Qubit channels as executable maps.

use crate::error::{check_unit, Error, Result};
use crate::linalg2::{Complex, Ensemble, Herm2, QubitState, TOL_STATE};

/// A 2×2 complex matrix, row-major.
pub type Mat2 = [[Complex; 2]; 2];

/// Tolerance on `‖Σ Eᵢ* Eᵢ − I‖` for user-supplied Kraus sets.
pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-10;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    AmplitudeDamping {
        gamma: f64,
    },
    /// `Δ_λ(ρ) = (1 − λ)ρ + λ I/2`.
    Depolarizing {
        lambda: f64,
    },
    GeneralKraus(Vec<Mat2>),
}

impl Channel {
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        Ok(Channel::AmplitudeDamping { gamma })
    }

    pub fn depolarizing(lambda: f64) -> Result<Self> {
        check_unit("lambda", lambda)?;
        Ok(Channel::Depolarizing { lambda })
    }

    pub fn general_kraus(kraus: Vec<Mat2>) -> Result<Self> {
        let ch = Channel::GeneralKraus(kraus);
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Channel::AmplitudeDamping { gamma } => check_unit("gamma", *gamma).map(drop),
            Channel::Depolarizing { lambda } => check_unit("lambda", *lambda).map(drop),
            Channel::GeneralKraus(ops) => {
                if ops.is_empty() {
                    return Err(Error::Completeness(1.0));
                }
                let defect = completeness_defect(ops);
                if defect.is_finite() && defect <= KRAUS_COMPLETENESS_TOL {
                    Ok(())
                } else {
                    Err(Error::Completeness(defect))
                }
            }
        }
    }

    /// Applies the channel. The channel is assumed valid.
    pub fn apply(&self, state: &QubitState) -> QubitState {
        match *self {
            Channel::AmplitudeDamping { gamma } => QubitState::from_parts(
                state.a + (1.0 - state.a) * gamma,
                state.b * (1.0 - gamma).sqrt(),
            ),
            // derived from Δ_λ(ρ) = (1 − λ)ρ + λ I/2 entrywise
            Channel::Depolarizing { lambda } => QubitState::from_parts(
                (1.0 - lambda) * state.a + 0.5 * lambda,
                state.b * (1.0 - lambda),
            ),
            Channel::GeneralKraus(ref ops) => {
                let rho = herm_to_mat(&state.to_herm2());
                let out = ops.iter().fold([[ZERO; 2]; 2], |acc, e| {
                    add(&acc, &mul(&mul(e, &rho), &adjoint(e)))
                });
                // (1,1) entry is 1 − a up to rounding; the (0,0) entry carries a
                QubitState::from_parts(out[0][0].re, out[0][1])
            }
        }
    }

    /// Whether `b → −b` commutes with the channel action, which makes output
    /// entropies depend on the coherence only through `|b|`.
    pub fn is_mirror_covariant(&self) -> bool {
        matches!(
            self,
            Channel::AmplitudeDamping { .. } | Channel::Depolarizing { .. }
        )
    }
}

/// Validated wrapper around [`Channel::apply`].
pub fn apply(channel: &Channel, state: &QubitState) -> Result<QubitState> {
    channel.validate()?;
    let state = QubitState::new(state.a, state.b)?;
    Ok(channel.apply(&state))
}

/// The operation elements `E₀ = diag(1, √(1−γ))`, `E₁ = √γ |0⟩⟨1|`.
pub fn kraus_amplitude_damping(gamma: f64) -> Result<Vec<Mat2>> {
    check_unit("gamma", gamma)?;
    let e0 = [[ONE, ZERO], [ZERO, Complex::new((1.0 - gamma).sqrt(), 0.0)]];
    let e1 = [[ZERO, Complex::new(gamma.sqrt(), 0.0)], [ZERO, ZERO]];
    Ok(vec![e0, e1])
}

/// Pauli form `{√(1−3λ/4) I, √(λ/4) X, √(λ/4) Y, √(λ/4) Z}`.
pub fn kraus_depolarizing(lambda: f64) -> Result<Vec<Mat2>> {
    check_unit("lambda", lambda)?;
    let c0 = Complex::new((1.0 - 0.75 * lambda).sqrt(), 0.0);
    let c = (0.25 * lambda).sqrt();
    let i = Complex::new(0.0, 1.0);
    Ok(vec![
        [[c0, ZERO], [ZERO, c0]],
        [[ZERO, ONE * c], [ONE * c, ZERO]],
        [[ZERO, -i * c], [i * c, ZERO]],
        [[ONE * c, ZERO], [ZERO, -ONE * c]],
    ])
}

/// Output eigenvalues of the amplitude-damping channel in closed form,
/// `λ± = ½(1 ± √((1 + 2a(γ−1) − 2γ)² − 4|b|²(γ−1)))`.
pub fn output_eigenvalues_ad(gamma: f64, state: &QubitState) -> Result<(f64, f64)> {
    check_unit("gamma", gamma)?;
    let state = QubitState::new(state.a, state.b)?;
    let a = state.a;
    let lead = 1.0 + 2.0 * a * (gamma - 1.0) - 2.0 * gamma;
    let radicand = lead * lead - 4.0 * state.b.norm_sqr() * (gamma - 1.0);
    let r = radicand.max(0.0).sqrt();
    Ok((0.5 * (1.0 + r), 0.5 * (1.0 - r)))
}

/// Replaces each `(p, (a, b))` by `(p/2, (a, b))` and `(p/2, (a, −b))`.
///
/// States on the real axis pass through, and entries equal within
/// [`TOL_STATE`] are merged by adding probabilities (first occurrence keeps
/// its position), so the map is idempotent.
pub fn symmetrize(ensemble: &Ensemble) -> Ensemble {
    let mut out: Vec<(f64, QubitState)> = Vec::with_capacity(2 * ensemble.len());
    let mut push =
        |p: f64, s: QubitState| match out.iter_mut().find(|(_, t)| t.approx_eq(&s, TOL_STATE)) {
            Some(entry) => entry.0 += p,
            None => out.push((p, s)),
        };
    for &(p, s) in ensemble.iter() {
        if s.b.norm() <= TOL_STATE {
            push(p, s);
        } else {
            push(0.5 * p, s);
            push(0.5 * p, s.mirror());
        }
    }
    Ensemble::with_any_len(out).expect("symmetrize preserves total probability")
}

/// Convex combination of two memoryless channels: each block of uses goes
/// through `ch1` with probability `weight1`, else through `ch2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedChannelPair {
    pub ch1: Channel,
    pub ch2: Channel,
    pub weight1: f64,
}

impl MixedChannelPair {
    pub fn new(ch1: Channel, ch2: Channel, weight1: f64) -> Result<Self> {
        ch1.validate()?;
        ch2.validate()?;
        check_unit("weight1", weight1)?;
        Ok(Self { ch1, ch2, weight1 })
    }

    pub fn weight2(&self) -> f64 {
        1.0 - self.weight1
    }
}

pub fn completeness_defect(ops: &[Mat2]) -> f64 {
    let sum = ops
        .iter()
        .fold([[ZERO; 2]; 2], |acc, e| add(&acc, &mul(&adjoint(e), e)));
    let mut worst: f64 = 0.0;
    for (i, row) in sum.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

fn herm_to_mat(m: &Herm2) -> Mat2 {
    [
        [Complex::new(m.m00, 0.0), m.m01],
        [m.m10(), Complex::new(m.m11, 0.0)],
    ]
}

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut r = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

fn add(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [x[0][0] + y[0][0], x[0][1] + y[0][1]],
        [x[1][0] + y[1][0], x[1][1] + y[1][1]],
    ]
}

fn adjoint(x: &Mat2) -> Mat2 {
    [
        [x[0][0].conj(), x[1][0].conj()],
        [x[0][1].conj(), x[1][1].conj()],
    ]
}
