//! 2×2 Hermitian algebra, qubit states and entropy functions.
//!
//! A qubit state is written in the population/coherence form
//!
//! ```text
//!     ρ = | a   b     |
//!         | b̄   1 − a |
//! ```
//!
//! so it lies in the Bloch ball iff `(a − ½)² + |b|² ≤ ¼`, and is pure on the
//! boundary `|b|² = a(1 − a)`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Validation tolerance for state invariants (trace, positivity, Bloch ball).
pub const TOL_STATE: f64 = 1e-9;

/// Validation tolerance for ensemble probabilities.
pub const TOL_PROB: f64 = 1e-9;

/// Carathéodory bound d² for d = 2.
pub const MAX_ENSEMBLE_STATES: usize = 4;

/// A 2×2 Hermitian matrix stored as its two diagonal entries and the upper
/// off-diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm2 {
    pub m00: f64,
    pub m11: f64,
    pub m01: Complex,
}

impl Herm2 {
    pub fn new(m00: f64, m11: f64, m01: Complex) -> Self {
        Self { m00, m11, m01 }
    }

    pub fn diag(m00: f64, m11: f64) -> Self {
        Self::new(m00, m11, Complex::new(0.0, 0.0))
    }

    /// The maximally mixed state I/2.
    pub fn maximally_mixed() -> Self {
        Self::diag(0.5, 0.5)
    }

    pub fn trace(&self) -> f64 {
        self.m00 + self.m11
    }

    pub fn m10(&self) -> Complex {
        self.m01.conj()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        eigenvalues_herm2(self)
    }

    pub fn is_finite(&self) -> bool {
        self.m00.is_finite()
            && self.m11.is_finite()
            && self.m01.re.is_finite()
            && self.m01.im.is_finite()
    }
}

/// Closed-form eigenvalues `(λ₊, λ₋)` with `λ₊ ≥ λ₋`.
///
/// The radicand `(tr/2)² − det` is evaluated as `((m00 − m11)/2)² + |m01|²`,
/// which is the same quantity without the cancellation.
pub fn eigenvalues_herm2(m: &Herm2) -> (f64, f64) {
    let half_trace = 0.5 * m.trace();
    let half_diff = 0.5 * (m.m00 - m.m11);
    let radicand = half_diff * half_diff + m.m01.norm_sqr();
    let r = radicand.max(0.0).sqrt();
    (half_trace + r, half_trace - r)
}

/// Binary entropy `H(p) = −p log₂ p − (1 − p) log₂(1 − p)` in bits.
///
/// Inputs within [`TOL_STATE`] outside `[0, 1]` are clamped.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-TOL_STATE..=1.0 + TOL_STATE).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(h2(p))
}

/// Binary entropy without the domain check; `p` is clamped to `[0, 1]`.
///
/// Evaluated on the smaller of `p` and `1 − p`, so `H(p)` and `H(1 − p)` agree
/// to rounding, and with `ln_1p` so small arguments keep full precision.
pub(crate) fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let q = p.min(1.0 - p);
    if q == 0.0 {
        return 0.0;
    }
    if q == 0.5 {
        return 1.0;
    }
    -(q * q.ln() + (1.0 - q) * (-q).ln_1p()) / LN_2
}

/// Von Neumann entropy `−tr ρ log₂ ρ` of a qubit density matrix.
pub fn von_neumann_entropy(m: &Herm2) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::InvalidState("non-finite matrix entry".into()));
    }
    let tr = m.trace();
    if (tr - 1.0).abs() > TOL_STATE {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    let (_, lo) = eigenvalues_herm2(m);
    if lo < -TOL_STATE {
        return Err(Error::InvalidState(format!("negative eigenvalue {lo}")));
    }
    Ok(h2(lo))
}

/// A qubit density matrix in `(a, b)` form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub a: f64,
    #[serde(with = "complex_serde")]
    pub b: Complex,
}

impl QubitState {
    /// Validated constructor; rejects points outside the Bloch ball.
    pub fn new(a: f64, b: Complex) -> Result<Self> {
        if !(a.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::InvalidState("non-finite component".into()));
        }
        if !(-TOL_STATE..=1.0 + TOL_STATE).contains(&a) {
            return Err(Error::InvalidState(format!(
                "population a = {a} outside [0, 1]"
            )));
        }
        let ball = (a - 0.5).powi(2) + b.norm_sqr();
        if ball > 0.25 + TOL_STATE {
            return Err(Error::InvalidState(format!(
                "(a − ½)² + |b|² = {ball} exceeds ¼"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::new(a, Complex::new(b, 0.0))
    }

    /// Crate-internal constructor for values that are valid up to rounding,
    /// such as channel outputs and convex combinations.
    pub(crate) fn from_parts(a: f64, b: Complex) -> Self {
        Self { a, b }
    }

    /// The pure state with population `a` and real, non-negative coherence.
    pub fn pure_real(a: f64) -> Result<Self> {
        Self::pure(a, 0.0)
    }

    /// The pure state with population `a` and coherence `√(a(1−a)) e^{iφ}`.
    pub fn pure(a: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Domain {
                name: "a",
                value: a,
                range: "[0, 1]",
            });
        }
        let r = (a * (1.0 - a)).sqrt();
        Self::new(a, Complex::from_polar(r, phase))
    }

    /// Reflection in the real b-axis: `b → −b`.
    pub fn mirror(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
        }
    }

    pub fn to_herm2(&self) -> Herm2 {
        Herm2::new(self.a, 1.0 - self.a, self.b)
    }

    /// Reads the `(a, b)` form back from a matrix; the trace is assumed to be 1.
    pub fn from_herm2(m: &Herm2) -> Self {
        Self { a: m.m00, b: m.m01 }
    }

    pub fn is_pure(&self) -> bool {
        (self.b.norm_sqr() - self.a * (1.0 - self.a)).abs() <= TOL_STATE
    }

    /// Bloch vector `(x, y, z)` with `ρ = (I + x X + y Y + z Z)/2`.
    pub fn bloch(&self) -> [f64; 3] {
        [2.0 * self.b.re, -2.0 * self.b.im, 2.0 * self.a - 1.0]
    }

    pub fn entropy(&self) -> f64 {
        // a valid state cannot fail the density-matrix checks
        h2(eigenvalues_herm2(&self.to_herm2()).1)
    }

    pub(crate) fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.a - other.a).abs() <= tol && (self.b - other.b).norm() <= tol
    }
}

/// A finite probability ensemble `{p_j, ρ_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    entries: Vec<(f64, QubitState)>,
}

impl Ensemble {
    /// Builds an ensemble of 1 to [`MAX_ENSEMBLE_STATES`] entries whose
    /// probabilities are non-negative and sum to 1 within [`TOL_PROB`].
    pub fn new(entries: Vec<(f64, QubitState)>) -> Result<Self> {
        if entries.len() > MAX_ENSEMBLE_STATES {
            return Err(Error::InvalidEnsemble(format!(
                "{} states exceed the bound of {MAX_ENSEMBLE_STATES}",
                entries.len()
            )));
        }
        Self::with_any_len(entries)
    }

    /// Same checks as [`Ensemble::new`] without the size cap. Used for
    /// symmetrized ensembles, which may hold up to twice as many entries.
    pub(crate) fn with_any_len(entries: Vec<(f64, QubitState)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        let mut total = 0.0;
        for (p, _) in &entries {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "probability {p} is negative"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > TOL_PROB {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn single(state: QubitState) -> Self {
        Self {
            entries: vec![(1.0, state)],
        }
    }

    /// `{(½, ρ_a), (½, ρ′_a)}` for the real pure state at population `a`.
    pub fn mirror_pair(a: f64) -> Result<Self> {
        let s = QubitState::pure_real(a)?;
        Ok(Self {
            entries: vec![(0.5, s), (0.5, s.mirror())],
        })
    }

    pub fn entries(&self) -> &[(f64, QubitState)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, QubitState)> {
        self.entries.iter()
    }

    pub fn mix(&self) -> QubitState {
        mix(self)
    }
}

/// Probability-weighted average `Σ p_j ρ_j`.
pub fn mix(ensemble: &Ensemble) -> QubitState {
    let a = ensemble.entries.iter().map(|(p, s)| p * s.a).sum();
    let b = ensemble
        .entries
        .iter()
        .fold(Complex::new(0.0, 0.0), |acc, (p, s)| acc + s.b * *p);
    QubitState::from_parts(a, b)
}

mod complex_serde {
    use super::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex::new(re, im))
    }
}
