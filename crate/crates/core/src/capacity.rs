//! Holevo χ, the amplitude-damping χ(a) curve and the capacity solvers.
//!
//! For the amplitude-damping channel the optimal ensemble is a mirror pair
//! `{(½, ρ_a), (½, ρ′_a)}` of pure states with `b = ±√(a(1−a))`. The pair
//! average is diagonal, so
//!
//! ```text
//!     χ_AD(a) = H((1−a)(1−γ)) − H((1−x)/2),   x = √(1 − 4γ(1−γ)(1−a)²)
//! ```
//!
//! which is concave in `a` with its maximizer in `[½, 1)`. The maximizer is
//! the root of `χ′_AD`, found by bisection.
//!
//! Everything here is in bits. The natural-log expressions for the
//! derivatives are divided by `ln 2` where noted.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::channels::Channel;
use crate::error::{check_open_unit, check_unit, Error, Result};
use crate::linalg2::{h2, von_neumann_entropy, Complex, Ensemble, Herm2};
use crate::search;

/// Default bracket width for the capacity solver.
pub const DEFAULT_TOL: f64 = 1e-10;

/// The solver brackets the maximizer in `[½, 1 − BRACKET_EPS]`.
pub const BRACKET_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RootBisection,
    GoldenSection,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    pub a_max: f64,
    pub capacity_bits: f64,
    /// `|χ′(a_max)|` in bits; zero for closed forms.
    pub residual: f64,
    pub iterations: u32,
    pub method: Method,
}

impl CapacityResult {
    fn closed_form(a_max: f64, capacity_bits: f64) -> Self {
        Self {
            a_max,
            capacity_bits,
            residual: 0.0,
            iterations: 0,
            method: Method::ClosedForm,
        }
    }

    /// The maximizing mirror pair at `a_max`.
    pub fn optimal_ensemble(&self) -> Ensemble {
        Ensemble::mirror_pair(self.a_max).expect("a_max lies in [0, 1]")
    }
}

/// `χ = S(Σ pⱼ Φ(ρⱼ)) − Σ pⱼ S(Φ(ρⱼ))`.
pub fn holevo_chi(channel: &Channel, ensemble: &Ensemble) -> Result<f64> {
    channel.validate()?;
    let mut mixed = Herm2::diag(0.0, 0.0);
    let mut conditional = 0.0;
    for (p, state) in ensemble.iter() {
        let out = channel.apply(state).to_herm2();
        conditional += p * von_neumann_entropy(&out)?;
        mixed.m00 += p * out.m00;
        mixed.m11 += p * out.m11;
        mixed.m01 += out.m01 * *p;
    }
    Ok(von_neumann_entropy(&mixed)? - conditional)
}

/// `x` and `1 − x` for `x = √(1 − k d²)`, `k = 4γ(1−γ)`, `d = 1 − a`.
///
/// `1 − x` is taken as `k d²/(1 + x)` so it keeps its precision when `x → 1`.
pub(crate) fn ad_radius(gamma: f64, a: f64) -> (f64, f64) {
    let d = 1.0 - a;
    let kd2 = 4.0 * gamma * (1.0 - gamma) * d * d;
    let x = (1.0 - kd2).max(0.0).sqrt();
    (x, kd2 / (1.0 + x))
}

/// `ln((1 + x)/(1 − x)) / x`, finite as `x → 0`.
pub(crate) fn log_ratio_over_x(x: f64, one_minus_x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        2.0 * (1.0 + x2 / 3.0 + x2 * x2 / 5.0)
    } else {
        ((1.0 + x) / one_minus_x).ln() / x
    }
}

pub(crate) fn chi_ad_unchecked(gamma: f64, a: f64) -> f64 {
    let (_, one_minus_x) = ad_radius(gamma, a);
    // both terms coincide at a = 0, where rounding can leave −1 ulp
    (h2((1.0 - a) * (1.0 - gamma)) - h2(0.5 * one_minus_x)).max(0.0)
}

/// χ of the amplitude-damping channel on the mirror pair at population `a`.
pub fn chi_ad_curve(gamma: f64, a: f64) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("a", a)?;
    Ok(chi_ad_unchecked(gamma, a))
}

pub(crate) fn chi_ad_derivative_unchecked(gamma: f64, a: f64) -> f64 {
    let d = 1.0 - a;
    let (x, one_minus_x) = ad_radius(gamma, a);
    let damping = -(1.0 - gamma) * ((a + gamma * d) / ((1.0 - gamma) * d)).ln();
    let coherence = 2.0 * gamma * (1.0 - gamma) * d * log_ratio_over_x(x, one_minus_x);
    (damping + coherence) / LN_2
}

/// `dχ_AD/da` in bits, whose root is the maximizer:
///
/// ```text
///     χ′(a) ln 2 = −(1−γ) ln[(a + γ(1−a)) / ((1−γ)(1−a))]
///                  + (2γ(1−γ)(1−a)/x) ln[(1+x)/(1−x)]
/// ```
///
/// Singular at `a = 1` and at `γ ∈ {0, 1}`.
pub fn chi_ad_derivative(gamma: f64, a: f64) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Domain {
            name: "a",
            value: a,
            range: "[0, 1)",
        });
    }
    Ok(chi_ad_derivative_unchecked(gamma, a))
}

/// Product-state capacity of the amplitude-damping channel.
///
/// Bisection on `χ′_AD` over `[½, 1 − ε]`: `χ′(½) > 0` for every interior
/// `γ` and `χ′ → −∞` as `a → 1`. `γ = 0` and `γ = 1` are closed forms.
pub fn capacity_amplitude_damping(gamma: f64, tol: f64) -> Result<CapacityResult> {
    check_unit("gamma", gamma)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            range: "(0, ∞)",
        });
    }
    if gamma == 0.0 {
        return Ok(CapacityResult::closed_form(0.5, 1.0));
    }
    if gamma == 1.0 {
        // constant channel, every a is a maximizer
        return Ok(CapacityResult::closed_form(0.5, 0.0));
    }
    let root = search::bisect(
        |a| chi_ad_derivative_unchecked(gamma, a),
        0.5,
        1.0 - BRACKET_EPS,
        tol,
    )?;
    Ok(CapacityResult {
        a_max: root.x,
        capacity_bits: chi_ad_unchecked(gamma, root.x).max(0.0),
        residual: root.residual,
        iterations: root.iterations,
        method: Method::RootBisection,
    })
}

/// `1 − H(λ/2)`, attained by any pair of orthogonal pure states.
pub fn capacity_depolarizing(lambda: f64) -> Result<CapacityResult> {
    check_unit("lambda", lambda)?;
    Ok(CapacityResult::closed_form(0.5, 1.0 - h2(0.5 * lambda)))
}

pub(crate) fn chi_dep_unchecked(lambda: f64, a: f64) -> f64 {
    h2((1.0 - lambda) * a + 0.5 * lambda) - h2(0.5 * lambda)
}

/// χ of the depolarizing channel on the mirror pair at population `a`,
/// `H((1−λ)a + λ/2) − H(λ/2)`. Symmetric about `a = ½`, where it peaks.
pub fn chi_dep_curve(lambda: f64, a: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    check_unit("a", a)?;
    Ok(chi_dep_unchecked(lambda, a))
}

/// Output entropy `S(a) = H((1−x)/2)` of the pure real state at `a`.
pub fn output_entropy_ad(gamma: f64, a: f64) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("a", a)?;
    Ok(h2(0.5 * ad_radius(gamma, a).1))
}

/// The pure real state `ρ_a` pushed through the amplitude-damping channel.
pub fn sigma(gamma: f64, a: f64) -> Result<Herm2> {
    check_unit("gamma", gamma)?;
    check_unit("a", a)?;
    let coherence = (a * (1.0 - a)).sqrt() * (1.0 - gamma).sqrt();
    Ok(Herm2::new(
        a + (1.0 - a) * gamma,
        (1.0 - a) * (1.0 - gamma),
        Complex::new(coherence, 0.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg2::{binary_entropy, QubitState};
    use approx::assert_abs_diff_eq;

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn chi_of_single_state_vanishes() {
        let s = QubitState::pure(0.3, 0.2).unwrap();
        for ch in [
            Channel::amplitude_damping(0.4).unwrap(),
            Channel::depolarizing(0.2).unwrap(),
        ] {
            assert_abs_diff_eq!(
                holevo_chi(&ch, &Ensemble::single(s)).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn chi_of_orthogonal_poles() {
        let poles = Ensemble::new(vec![
            (0.5, QubitState::pure_real(0.0).unwrap()),
            (0.5, QubitState::pure_real(1.0).unwrap()),
        ])
        .unwrap();
        let id = Channel::amplitude_damping(0.0).unwrap();
        assert_abs_diff_eq!(holevo_chi(&id, &poles).unwrap(), 1.0, epsilon = 1e-15);
        for l in [0.1, 0.5, 0.8] {
            let dep = Channel::depolarizing(l).unwrap();
            // S(I/2) − H(λ/2) evaluated term by term
            let expected = 1.0 - binary_entropy(l / 2.0).unwrap();
            assert_abs_diff_eq!(holevo_chi(&dep, &poles).unwrap(), expected, epsilon = 1e-14);
            assert_abs_diff_eq!(
                capacity_depolarizing(l).unwrap().capacity_bits,
                expected,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn chi_ad_curve_examples() {
        assert_eq!(chi_ad_curve(0.0, 0.5).unwrap(), 1.0);
        for g in [0.0, 0.3, 1.0] {
            assert_eq!(chi_ad_curve(g, 1.0).unwrap(), 0.0);
        }
        let x = (1.0f64 - 0.5 + 0.25).sqrt();
        let expected = binary_entropy(0.25).unwrap() - binary_entropy((1.0 - x) / 2.0).unwrap();
        assert_abs_diff_eq!(chi_ad_curve(0.5, 0.5).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 0.4567, epsilon = 1e-4);
        assert!(chi_ad_curve(1.5, 0.5).is_err());
        assert!(chi_ad_curve(0.5, -0.5).is_err());
    }

    #[test]
    fn chi_ad_curve_matches_two_entropy_definition() {
        for g in [0.05, 0.3, 0.5, 0.77, 0.99] {
            let ch = Channel::amplitude_damping(g).unwrap();
            for i in 0..=50 {
                let a = i as f64 / 50.0;
                let direct = holevo_chi(&ch, &Ensemble::mirror_pair(a).unwrap()).unwrap();
                assert_abs_diff_eq!(chi_ad_curve(g, a).unwrap(), direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn derivative_at_half_matches_printed_formula() {
        for g in [0.1, 0.5, 0.9] {
            let x = (1.0f64 - g + g * g).sqrt();
            let printed = (-(1.0 - g) * ((1.0 + g) / (1.0 - g)).ln()
                + g * (1.0 - g) / x * ((1.0 + x) / (1.0 - x)).ln())
                / LN_2;
            let d = chi_ad_derivative(g, 0.5).unwrap();
            assert_abs_diff_eq!(d, printed, epsilon = 1e-13);
            assert!(d > 0.0);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let fd = central_diff(|a| chi_ad_unchecked(0.3, a), 0.7, 1e-6);
        assert_abs_diff_eq!(chi_ad_derivative(0.3, 0.7).unwrap(), fd, epsilon = 1e-5);
    }

    #[test]
    fn derivative_finite_where_x_vanishes() {
        // γ = ½, a = 0 gives x = 0
        let d = chi_ad_derivative(0.5, 0.0).unwrap();
        let fd = central_diff(|a| chi_ad_unchecked(0.5, a), 1e-5, 1e-6);
        assert!(d.is_finite());
        assert_abs_diff_eq!(d, fd, epsilon = 1e-4);
    }

    #[test]
    fn derivative_domain() {
        assert!(chi_ad_derivative(0.0, 0.5).is_err());
        assert!(chi_ad_derivative(1.0, 0.5).is_err());
        assert!(chi_ad_derivative(0.5, 1.0).is_err());
    }

    #[test]
    fn capacity_endpoints() {
        let zero = capacity_amplitude_damping(0.0, DEFAULT_TOL).unwrap();
        assert_eq!(
            (zero.capacity_bits, zero.a_max, zero.method),
            (1.0, 0.5, Method::ClosedForm)
        );
        let one = capacity_amplitude_damping(1.0, DEFAULT_TOL).unwrap();
        assert_eq!(one.capacity_bits, 0.0);
        assert!(capacity_amplitude_damping(0.5, 0.0).is_err());
        assert!(capacity_amplitude_damping(-0.5, 1e-10).is_err());
    }

    #[test]
    fn capacity_at_half_matches_grid_oracle() {
        // exhaustive grid on [½, 1] with step 1e-6, χ evaluated through the
        // generic two-entropy route
        let ch = Channel::amplitude_damping(0.5).unwrap();
        let (mut best_a, mut best) = (0.5, f64::NEG_INFINITY);
        for i in 0..=500_000 {
            let a = 0.5 + i as f64 * 1e-6;
            let v = holevo_chi(&ch, &Ensemble::mirror_pair(a).unwrap()).unwrap();
            if v > best {
                best = v;
                best_a = a;
            }
        }
        let r = capacity_amplitude_damping(0.5, DEFAULT_TOL).unwrap();
        assert_eq!(r.method, Method::RootBisection);
        assert!(r.capacity_bits >= best - 1e-12);
        assert_abs_diff_eq!(r.capacity_bits, best, epsilon = 1e-10);
        assert_abs_diff_eq!(r.a_max, best_a, epsilon = 2e-6);
        // frozen reference values
        assert_abs_diff_eq!(r.capacity_bits, 0.471_729_390_598_584, epsilon = 1e-12);
        assert_abs_diff_eq!(r.a_max, 0.596_105_227, epsilon = 1e-6);
        assert!(r.residual <= DEFAULT_TOL);
    }

    #[test]
    fn depolarizing_examples() {
        assert_eq!(capacity_depolarizing(0.0).unwrap().capacity_bits, 1.0);
        assert_eq!(capacity_depolarizing(1.0).unwrap().capacity_bits, 0.0);
        let c = capacity_depolarizing(0.5).unwrap().capacity_bits;
        assert_abs_diff_eq!(c, 1.0 - binary_entropy(0.25).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(c, 0.188_722, epsilon = 1e-6);
        assert!(capacity_depolarizing(1.2).is_err());
    }

    #[test]
    fn chi_dep_curve_examples() {
        for l in [0.0, 0.2, 0.9] {
            assert_abs_diff_eq!(
                chi_dep_curve(l, 0.5).unwrap(),
                capacity_depolarizing(l).unwrap().capacity_bits,
                epsilon = 1e-15
            );
        }
        for a in [0.1, 0.3, 0.8] {
            assert_abs_diff_eq!(
                chi_dep_curve(0.0, a).unwrap(),
                binary_entropy(a).unwrap(),
                epsilon = 1e-15
            );
        }
        let expected = binary_entropy(0.625).unwrap() - binary_entropy(0.25).unwrap();
        assert_abs_diff_eq!(chi_dep_curve(0.5, 0.75).unwrap(), expected, epsilon = 1e-15);
        let via_chi = holevo_chi(
            &Channel::depolarizing(0.5).unwrap(),
            &Ensemble::mirror_pair(0.75).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(via_chi, expected, epsilon = 1e-12);
    }

    #[test]
    fn sigma_entropy_matches_output_entropy() {
        for (g, a) in [(0.2, 0.1), (0.5, 0.5), (0.9, 0.8)] {
            let s = von_neumann_entropy(&sigma(g, a).unwrap()).unwrap();
            assert_abs_diff_eq!(s, output_entropy_ad(g, a).unwrap(), epsilon = 1e-12);
        }
    }
}
