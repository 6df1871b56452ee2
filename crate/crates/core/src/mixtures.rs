//! Capacities of convex combinations of two memoryless channels.
//!
//! The product-state capacity of the mixture is the supremum over ensembles
//! of the smaller of the two branch Holevo quantities. The supremum is taken
//! over the mirror-pair family `{(½, ρ_a), (½, ρ′_a)}`; [`crate::oracle`] can
//! certify that restriction against general ensembles of up to four states.
//!
//! Both branch curves are concave in `a`, so their pointwise minimum is
//! concave and its maximum sits either at the maximizer of the binding branch
//! or at a crossing of the two curves.

use serde::Serialize;

use crate::capacity::{
    self, ad_radius, capacity_amplitude_damping, capacity_depolarizing, chi_ad_unchecked,
    chi_dep_unchecked, log_ratio_over_x, CapacityResult, DEFAULT_TOL,
};
use crate::channels::{Channel, MixedChannelPair};
use crate::error::{check_open_unit, check_unit, Error, Result};
use crate::oracle::{self, OracleConfig, OracleOutcome};
use crate::search;

/// Default a-resolution of the sup-min search.
pub const DEFAULT_RESOLUTION: f64 = 1e-6;

/// Amplitude-damping parameter of the stored separation example.
pub const SEPARATION_GAMMA: f64 = 0.52;
/// Depolarizing parameter of the stored separation example.
pub const SEPARATION_LAMBDA: f64 = 0.25;

/// Number of cells used to scan for crossings of the branch curves.
const CROSSING_SCAN_CELLS: usize = 1000;

/// Branch values closer than this are reported as a tie.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinBranch {
    Channel1,
    Channel2,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxResult {
    pub capacity_bits: f64,
    pub a_star: f64,
    pub min_branch: MinBranch,
    pub certified_by_oracle: bool,
    /// Single-channel capacities of the two branches.
    pub branch_capacities: [f64; 2],
    /// Interior points where the two χ curves cross.
    pub crossings: Vec<f64>,
}

impl MinimaxResult {
    /// `min(branch capacities) − capacity`; positive when the mixture is
    /// strictly worse than its worse branch.
    pub fn separation_gap(&self) -> f64 {
        self.branch_capacities[0].min(self.branch_capacities[1]) - self.capacity_bits
    }
}

/// χ of a supported branch channel on the mirror pair at `a`.
pub fn branch_chi(channel: &Channel, a: f64) -> Result<f64> {
    check_unit("a", a)?;
    let curve = branch_curve(channel)?;
    Ok(curve(a))
}

fn branch_curve(channel: &Channel) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    channel.validate()?;
    match *channel {
        Channel::AmplitudeDamping { gamma } => Ok(Box::new(move |a| chi_ad_unchecked(gamma, a))),
        Channel::Depolarizing { lambda } => Ok(Box::new(move |a| chi_dep_unchecked(lambda, a))),
        Channel::GeneralKraus(_) => Err(Error::Unsupported(
            "mixtures accept amplitude-damping and depolarizing branches only",
        )),
    }
}

/// Sup over the mirror-pair family of `min(χ₁(a), χ₂(a))`.
pub fn minimax_capacity(pair: &MixedChannelPair, resolution: f64) -> Result<MinimaxResult> {
    if !(resolution > 0.0 && resolution < 1.0) {
        return Err(Error::Domain {
            name: "resolution",
            value: resolution,
            range: "(0, 1)",
        });
    }
    check_unit("weight1", pair.weight1)?;
    let chi1 = branch_curve(&pair.ch1)?;
    let chi2 = branch_curve(&pair.ch2)?;

    let max1 = search::golden_max(&chi1, 0.0, 1.0, resolution);
    let max2 = search::golden_max(&chi2, 0.0, 1.0, resolution);
    let branch_capacities = [max1.value, max2.value];

    // a branch that is never selected does not constrain the supremum
    if pair.weight1 == 1.0 || pair.weight1 == 0.0 {
        let (best, branch) = if pair.weight1 == 1.0 {
            (max1, MinBranch::Channel1)
        } else {
            (max2, MinBranch::Channel2)
        };
        return Ok(MinimaxResult {
            capacity_bits: best.value,
            a_star: best.x,
            min_branch: branch,
            certified_by_oracle: false,
            branch_capacities,
            crossings: Vec::new(),
        });
    }

    let diff = |a: f64| chi1(a) - chi2(a);
    let crossings = scan_crossings(&diff);

    let mut candidates: Vec<f64> = Vec::with_capacity(3 + crossings.len());
    if chi1(max1.x) <= chi2(max1.x) {
        candidates.push(max1.x);
    }
    if chi2(max2.x) <= chi1(max2.x) {
        candidates.push(max2.x);
    }
    if candidates.is_empty() {
        // each maximizer is cut off by the other branch, so the curves cross
        // between them
        let (lo, hi) = (max1.x.min(max2.x), max1.x.max(max2.x));
        candidates.push(search::bisect(diff, lo, hi, f64::EPSILON)?.x);
    }
    candidates.extend(crossings.iter().copied());

    let min_chi = |a: f64| chi1(a).min(chi2(a));
    let a_star = candidates.into_iter().fold(f64::NAN, |best, a| {
        if best.is_nan() || min_chi(a) > min_chi(best) {
            a
        } else {
            best
        }
    });
    let (v1, v2) = (chi1(a_star), chi2(a_star));
    let min_branch = if (v1 - v2).abs() <= TIE_TOL {
        MinBranch::Tie
    } else if v1 < v2 {
        MinBranch::Channel1
    } else {
        MinBranch::Channel2
    };
    Ok(MinimaxResult {
        capacity_bits: v1.min(v2).max(0.0),
        a_star,
        min_branch,
        certified_by_oracle: false,
        branch_capacities,
        crossings,
    })
}

/// Sign changes of `diff` on a uniform scan of the open interval, each
/// refined by bisection. Both curves vanish at `a = 0` and `a = 1`, so the
/// endpoints are skipped.
fn scan_crossings(diff: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let n = CROSSING_SCAN_CELLS;
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..n {
        let a = i as f64 / n as f64;
        let v = diff(a);
        if v.abs() <= TIE_TOL {
            continue;
        }
        if let Some((pa, pv)) = prev {
            if pv.signum() != v.signum() {
                if let Ok(root) = search::bisect(diff, pa, a, f64::EPSILON) {
                    out.push(root.x);
                }
            }
        }
        prev = Some((a, v));
    }
    out
}

/// Runs [`oracle::oracle_minimax`] and marks `result` certified when the
/// oracle value lies within `bound` below it and never above it by more than
/// [`oracle::LOWER_BOUND_SLACK`].
pub fn certify_minimax(
    result: &MinimaxResult,
    pair: &MixedChannelPair,
    config: &OracleConfig,
    bound: f64,
) -> Result<(MinimaxResult, OracleOutcome)> {
    let outcome = oracle::oracle_minimax(pair, config)?;
    let diff = outcome.value - result.capacity_bits;
    let mut certified = result.clone();
    certified.certified_by_oracle = diff <= oracle::LOWER_BOUND_SLACK && diff >= -bound;
    Ok((certified, outcome))
}

/// Capacity of a mixture of two amplitude-damping channels, which is that of
/// the noisier one.
pub fn capacity_two_amplitude_damping(gamma1: f64, gamma2: f64) -> Result<CapacityResult> {
    check_unit("gamma1", gamma1)?;
    check_unit("gamma2", gamma2)?;
    capacity_amplitude_damping(gamma1.max(gamma2), DEFAULT_TOL)
}

/// Capacity of a mixture of two depolarizing channels, `1 − H(max(λ₁, λ₂)/2)`.
pub fn capacity_two_depolarizing(lambda1: f64, lambda2: f64) -> Result<CapacityResult> {
    check_unit("lambda1", lambda1)?;
    check_unit("lambda2", lambda2)?;
    capacity_depolarizing(lambda1.max(lambda2))
}

/// `ln((1+x)/(1−x))` with `1 − x` supplied separately.
fn log_ratio(x: f64, one_minus_x: f64) -> f64 {
    ((1.0 + x) / one_minus_x).ln()
}

fn interior_a(a: f64) -> Result<f64> {
    if (0.0..1.0).contains(&a) {
        Ok(a)
    } else {
        Err(Error::Domain {
            name: "a",
            value: a,
            range: "[0, 1)",
        })
    }
}

/// `∂χ_AD/∂γ` in nats:
///
/// ```text
///     −(1−a) ln[(a + γ(1−a)) / ((1−γ)(1−a))] + ((2γ−1)(1−a)²/x) ln[(1+x)/(1−x)]
/// ```
pub fn dchi_dgamma(gamma: f64, a: f64) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    interior_a(a)?;
    let d = 1.0 - a;
    let (x, one_minus_x) = ad_radius(gamma, a);
    let damping = -d * ((a + gamma * d) / ((1.0 - gamma) * d)).ln();
    let coherence = (2.0 * gamma - 1.0) * d * d * log_ratio_over_x(x, one_minus_x);
    Ok(damping + coherence)
}

fn check_upper_half(gamma: f64) -> Result<f64> {
    if gamma > 0.5 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(Error::Domain {
            name: "gamma",
            value: gamma,
            range: "(½, 1)",
        })
    }
}

/// `f(a, γ) = ln[(a + γ(1−a)) / ((1−γ)(1−a))] − ((2γ−1)(1−a)/x) ln[(1+x)/(1−x)]`
/// for `γ > ½`, so that `∂χ/∂γ = −(1−a) f`. Vanishes at `a = 0`.
pub fn monotonicity_f(gamma: f64, a: f64) -> Result<f64> {
    check_upper_half(gamma)?;
    interior_a(a)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let d = 1.0 - a;
    let (x, one_minus_x) = ad_radius(gamma, a);
    Ok(((a + gamma * d) / ((1.0 - gamma) * d)).ln()
        - (2.0 * gamma - 1.0) * d * log_ratio_over_x(x, one_minus_x))
}

/// `∂f/∂a = (1−γ)/(a + γ(1−a)) + 1/(1−a) + ((2γ−1)/x³) ln[(1+x)/(1−x)] − 2(2γ−1)/x²`.
///
/// The last two terms are combined as `(2γ−1)(L − 2x)/x³` to avoid the
/// cancellation at small `x`.
pub fn monotonicity_df_da(gamma: f64, a: f64) -> Result<f64> {
    check_upper_half(gamma)?;
    interior_a(a)?;
    let d = 1.0 - a;
    let (x, one_minus_x) = ad_radius(gamma, a);
    let tail = if x < 1e-2 {
        let x2 = x * x;
        2.0 * (1.0 / 3.0 + x2 / 5.0 + x2 * x2 / 7.0 + x2 * x2 * x2 / 9.0)
    } else {
        (log_ratio(x, one_minus_x) - 2.0 * x) / (x * x * x)
    };
    Ok((1.0 - gamma) / (a + gamma * d) + 1.0 / d + (2.0 * gamma - 1.0) * tail)
}

/// Separation gap of the amplitude-damping/depolarizing mixture at `(γ, λ)`.
pub fn separation_gap(gamma: f64, lambda: f64, resolution: f64) -> Result<f64> {
    let pair = MixedChannelPair::new(
        Channel::amplitude_damping(gamma)?,
        Channel::depolarizing(lambda)?,
        0.5,
    )?;
    Ok(minimax_capacity(&pair, resolution)?.separation_gap())
}

/// The amplitude-damping maximizer, reused by reports on the separation case.
pub fn ad_maximizer(gamma: f64) -> Result<f64> {
    Ok(capacity::capacity_amplitude_damping(gamma, DEFAULT_TOL)?.a_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg2::binary_entropy;
    use approx::assert_abs_diff_eq;

    fn pair(ch1: Channel, ch2: Channel) -> MixedChannelPair {
        MixedChannelPair::new(ch1, ch2, 0.5).unwrap()
    }

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn identical_channels_give_single_capacity() {
        let ad = Channel::amplitude_damping(0.4).unwrap();
        let r = minimax_capacity(&pair(ad.clone(), ad), DEFAULT_RESOLUTION).unwrap();
        let single = capacity_amplitude_damping(0.4, DEFAULT_TOL)
            .unwrap()
            .capacity_bits;
        assert_abs_diff_eq!(r.capacity_bits, single, epsilon = 1e-10);
        assert_eq!(r.min_branch, MinBranch::Tie);
        assert_abs_diff_eq!(r.separation_gap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn two_depolarizing_closed_form() {
        let r = minimax_capacity(
            &pair(
                Channel::depolarizing(0.3).unwrap(),
                Channel::depolarizing(0.7).unwrap(),
            ),
            DEFAULT_RESOLUTION,
        )
        .unwrap();
        let expected = 1.0 - binary_entropy(0.35).unwrap();
        assert_abs_diff_eq!(r.capacity_bits, expected, epsilon = 1e-8);
        assert_eq!(r.min_branch, MinBranch::Channel2);
        assert_abs_diff_eq!(
            capacity_two_depolarizing(0.3, 0.7).unwrap().capacity_bits,
            expected,
            epsilon = 1e-15
        );
        assert_eq!(
            capacity_two_depolarizing(0.0, 0.0).unwrap().capacity_bits,
            1.0
        );
    }

    #[test]
    fn two_amplitude_damping_examples() {
        let c = |g| capacity_amplitude_damping(g, DEFAULT_TOL).unwrap();
        assert_eq!(capacity_two_amplitude_damping(0.3, 0.3).unwrap(), c(0.3));
        assert_eq!(capacity_two_amplitude_damping(0.0, 0.3).unwrap(), c(0.3));
        assert_eq!(capacity_two_amplitude_damping(0.2, 0.6).unwrap(), c(0.6));
        assert!(capacity_two_amplitude_damping(0.2, 1.6).is_err());
    }

    #[test]
    fn separation_fixture() {
        let p = pair(
            Channel::amplitude_damping(SEPARATION_GAMMA).unwrap(),
            Channel::depolarizing(SEPARATION_LAMBDA).unwrap(),
        );
        let r = minimax_capacity(&p, DEFAULT_RESOLUTION).unwrap();
        assert!(r.separation_gap() > 1e-3, "gap {}", r.separation_gap());
        let a_max = ad_maximizer(SEPARATION_GAMMA).unwrap();
        assert!(r.a_star > 0.5 && r.a_star < a_max);
        assert_eq!(r.min_branch, MinBranch::Tie);
        assert!(r.crossings.iter().any(|c| (c - r.a_star).abs() < 1e-9));
    }

    #[test]
    fn degenerate_weights_reduce_to_one_branch() {
        let ad = Channel::amplitude_damping(0.3).unwrap();
        let dep = Channel::depolarizing(0.9).unwrap();
        let only_ad = MixedChannelPair::new(ad.clone(), dep.clone(), 1.0).unwrap();
        let r = minimax_capacity(&only_ad, DEFAULT_RESOLUTION).unwrap();
        let c = capacity_amplitude_damping(0.3, DEFAULT_TOL)
            .unwrap()
            .capacity_bits;
        assert_abs_diff_eq!(r.capacity_bits, c, epsilon = 1e-10);
        assert_eq!(r.min_branch, MinBranch::Channel1);
        let only_dep = MixedChannelPair::new(ad, dep, 0.0).unwrap();
        let r = minimax_capacity(&only_dep, DEFAULT_RESOLUTION).unwrap();
        assert_abs_diff_eq!(
            r.capacity_bits,
            capacity_depolarizing(0.9).unwrap().capacity_bits,
            epsilon = 1e-12
        );
    }

    #[test]
    fn general_kraus_branch_is_unsupported() {
        let k =
            Channel::general_kraus(crate::channels::kraus_amplitude_damping(0.2).unwrap()).unwrap();
        let p = pair(k, Channel::depolarizing(0.1).unwrap());
        assert!(matches!(
            minimax_capacity(&p, DEFAULT_RESOLUTION),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn dchi_dgamma_examples() {
        let fd = central_diff(
            |g| std::f64::consts::LN_2 * chi_ad_unchecked(g, 0.4),
            0.3,
            1e-6,
        );
        assert_abs_diff_eq!(dchi_dgamma(0.3, 0.4).unwrap(), fd, epsilon = 1e-5);
        for (g, a) in [(0.1, 0.2), (0.5, 0.5), (0.9, 0.05)] {
            assert!(dchi_dgamma(g, a).unwrap() <= 0.0);
        }
        assert!(dchi_dgamma(0.3, 1.0 - 1e-9).unwrap().abs() < 1e-6);
        assert!(dchi_dgamma(0.0, 0.5).is_err());
    }

    #[test]
    fn monotonicity_examples() {
        assert_eq!(monotonicity_f(0.75, 0.0).unwrap(), 0.0);
        // the closed expression approaches the same limit
        assert!(monotonicity_f(0.75, 1e-12).unwrap().abs() < 1e-10);
        assert!(monotonicity_f(0.75, 0.5).unwrap() >= 0.0);
        let df = monotonicity_df_da(0.6, 0.3).unwrap();
        let fd = central_diff(|a| monotonicity_f(0.6, a).unwrap(), 0.3, 1e-6);
        assert!(df > 0.0);
        assert_abs_diff_eq!(df, fd, epsilon = 1e-5);
        assert!(monotonicity_f(0.4, 0.3).is_err());
        assert!(monotonicity_df_da(0.6, 1.0).is_err());
    }
}
