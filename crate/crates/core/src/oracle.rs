//! Brute-force certification by exhaustive search over discretized ensembles.
//!
//! Pure input states are placed on a grid in `a` (and in the phase of `b`),
//! probabilities on the simplex grid `k/N` with integer `k ≥ 1`, and every
//! ensemble of up to `n_states` distinct grid states is scored. Nothing here
//! uses the closed-form curves or the capacity solvers: each χ is computed
//! from Bloch vectors of the channel outputs.
//!
//! # Pruning
//!
//! For any state `σ`,
//!
//! ```text
//!     Σ pⱼ D(Φ(ρⱼ) ‖ σ) = χ(E) + D(Φ(ρ̄) ‖ σ) ≥ χ(E)
//! ```
//!
//! so an ensemble whose weighted divergence to `σ` is below the incumbent
//! cannot be the maximizer. With `prune` set, ensembles of one and two states
//! are scored exhaustively first, `σ` is taken from the best of them, and the
//! larger ensembles are enumerated in decreasing order of `D(Φ(ρⱼ) ‖ σ)` so
//! whole subtrees can be skipped. The bound is exact, so the returned value
//! and argmax are the same as without pruning.
//!
//! Ties are broken towards the lexicographically first ensemble (grid indices,
//! then numerators), and each χ is summed in grid order, so the result does
//! not depend on the enumeration order or on the number of worker threads.

use std::cmp::Ordering as CmpOrdering;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Channel, MixedChannelPair};
use crate::error::{Error, Result};
use crate::linalg2::{h2, Complex, Ensemble, QubitState, MAX_ENSEMBLE_STATES};

/// Default cap on the number of χ evaluations.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Oracle values may exceed an analytic capacity by at most this much.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

/// Pruning only discards ensembles whose bound is this far below the incumbent.
const PRUNE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Maximum number of distinct states per ensemble, 1 to 4.
    pub n_states: usize,
    /// Points on `a ∈ [0, 1]`, endpoints included.
    pub a_grid: usize,
    /// Phases `2πk/phase_grid` of `b`; ignored when `restrict_real_b` is set.
    pub phase_grid: usize,
    /// Probability denominator `N`.
    pub prob_grid: usize,
    /// Use `b = ±√(a(1−a))` only.
    pub restrict_real_b: bool,
    /// Cap on χ evaluations.
    pub budget: u64,
    pub prune: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_states: 4,
            a_grid: 201,
            phase_grid: 2,
            prob_grid: 20,
            restrict_real_b: true,
            budget: DEFAULT_BUDGET,
            prune: true,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ENSEMBLE_STATES).contains(&self.n_states) {
            return Err(Error::InvalidConfig(format!(
                "n_states = {} outside [1, {MAX_ENSEMBLE_STATES}]",
                self.n_states
            )));
        }
        for (name, v) in [
            ("a_grid", self.a_grid),
            ("phase_grid", self.phase_grid),
            ("prob_grid", self.prob_grid),
        ] {
            if v < 2 {
                return Err(Error::InvalidConfig(format!("{name} = {v} is below 2")));
            }
        }
        if self.prob_grid > u32::MAX as usize {
            return Err(Error::InvalidConfig("prob_grid too large".into()));
        }
        Ok(())
    }

    /// The pure grid states, in grid order. States with `b = 0` appear once.
    pub fn grid_states(&self) -> Vec<QubitState> {
        let mut out = Vec::new();
        let last = (self.a_grid - 1) as f64;
        for i in 0..self.a_grid {
            let a = i as f64 / last;
            let r = (a * (1.0 - a)).sqrt();
            if r == 0.0 {
                out.push(QubitState::from_parts(a, Default::default()));
            } else if self.restrict_real_b {
                out.push(QubitState::from_parts(a, r.into()));
                out.push(QubitState::from_parts(a, (-r).into()));
            } else {
                for k in 0..self.phase_grid {
                    let phase = std::f64::consts::TAU * k as f64 / self.phase_grid as f64;
                    out.push(QubitState::from_parts(a, Complex::from_polar(r, phase)));
                }
            }
        }
        out
    }

    /// Number of ensembles in the unpruned search, saturating at `u64::MAX`.
    pub fn search_size(&self) -> u64 {
        let states = self.grid_states().len() as u128;
        let n_total = self.prob_grid as u128;
        let size: u128 = (1..=self.n_states as u128)
            .map(|n| binomial(states, n).saturating_mul(binomial(n_total.saturating_sub(1), n - 1)))
            .fold(0u128, |acc, x| acc.saturating_add(x));
        size.min(u64::MAX as u128) as u64
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub value: f64,
    pub ensemble: Ensemble,
    /// χ evaluations actually performed.
    pub evaluations: u64,
    /// Ensembles in the unpruned search.
    pub search_size: u64,
}

/// Maximal Holevo χ over all grid ensembles.
pub fn oracle_capacity(channel: &Channel, config: &OracleConfig) -> Result<OracleOutcome> {
    channel.validate()?;
    run(std::slice::from_ref(channel), config)
}

/// Maximal `min(χ₁, χ₂)` over all grid ensembles.
// TODO: accept more than two branches; `pruning_bound` then needs a search
// over the simplex of branch mixing weights instead of the scalar `t`.
pub fn oracle_minimax(pair: &MixedChannelPair, config: &OracleConfig) -> Result<OracleOutcome> {
    pair.ch1.validate()?;
    pair.ch2.validate()?;
    // a branch of weight zero is never used
    if pair.weight1 == 1.0 {
        return run(std::slice::from_ref(&pair.ch1), config);
    }
    if pair.weight1 == 0.0 {
        return run(std::slice::from_ref(&pair.ch2), config);
    }
    run(&[pair.ch1.clone(), pair.ch2.clone()], config)
}

/// Channel outputs of every grid state.
struct Table {
    bloch: Vec<[f64; 3]>,
    entropy: Vec<f64>,
}

impl Table {
    fn new(channel: &Channel, states: &[QubitState]) -> Self {
        let mut bloch = Vec::with_capacity(states.len());
        let mut entropy = Vec::with_capacity(states.len());
        for s in states {
            let out = channel.apply(s);
            let v = out.bloch();
            entropy.push(entropy_of_radius(norm(&v)));
            bloch.push(v);
        }
        Self { bloch, entropy }
    }

    /// χ of the ensemble `{(kⱼ/N, stateⱼ)}`; members must be in grid order.
    fn chi(&self, members: &[usize], numerators: &[u32], n_total: f64) -> f64 {
        let mut m = [0.0; 3];
        let mut conditional = 0.0;
        for (&j, &k) in members.iter().zip(numerators) {
            let k = k as f64;
            let v = &self.bloch[j];
            m[0] += k * v[0];
            m[1] += k * v[1];
            m[2] += k * v[2];
            conditional += k * self.entropy[j];
        }
        entropy_of_radius(norm(&m) / n_total) - conditional / n_total
    }

    /// Output Bloch vector of `Σ wⱼ ρⱼ` for real weights.
    fn mixture(&self, weights: &[f64]) -> [f64; 3] {
        let mut s = [0.0; 3];
        for (w, v) in weights.iter().zip(&self.bloch) {
            s[0] += w * v[0];
            s[1] += w * v[1];
            s[2] += w * v[2];
        }
        s
    }

    fn divergences(&self, sigma: &[f64; 3], out: &mut [f64]) {
        for (j, d) in out.iter_mut().enumerate() {
            *d = relative_entropy(&self.bloch[j], self.entropy[j], sigma);
        }
    }
}

/// Per-state bound `uⱼ` with `min_c χ_c(E) ≤ Σ pⱼ uⱼ` for every ensemble.
///
/// `uⱼ = Σ_c t_c D(Φ_c(ρⱼ) ‖ σ_c)` for weights `t_c` on the simplex and any
/// states `σ_c`. The σ's come from Blahut–Arimoto iterations on the grid
/// states, which drive `max_j uⱼ` down towards the continuous optimum; the
/// weight between two channels is chosen by golden-section search.
fn pruning_bound(tables: &[Table]) -> Vec<f64> {
    let uniform = vec![1.0 / tables[0].bloch.len() as f64; tables[0].bloch.len()];
    let evaluate = |t: f64| {
        let mix = if tables.len() == 1 {
            vec![1.0]
        } else {
            vec![t, 1.0 - t]
        };
        blahut_arimoto(tables, &mix, &uniform)
    };
    if tables.len() == 1 {
        return evaluate(1.0).1;
    }
    let max_of = |t: f64| evaluate(t).0;
    let m = crate::search::golden_max(|t| -max_of(t), 0.0, 1.0, 1e-4);
    evaluate(m.x).1
}

const BA_MAX_ITERATIONS: usize = 20_000;
const BA_GAP: f64 = 1e-10;

/// Returns the smallest `max_j uⱼ` seen and the matching bound vector.
fn blahut_arimoto(tables: &[Table], mix: &[f64], start: &[f64]) -> (f64, Vec<f64>) {
    let n = start.len();
    let mut p = start.to_vec();
    let mut u = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut best = (f64::INFINITY, vec![f64::INFINITY; n]);
    for _ in 0..BA_MAX_ITERATIONS {
        u.iter_mut().for_each(|x| *x = 0.0);
        for (table, &t) in tables.iter().zip(mix) {
            if t == 0.0 {
                continue;
            }
            let sigma = table.mixture(&p);
            table.divergences(&sigma, &mut scratch);
            u.iter_mut().zip(&scratch).for_each(|(x, d)| *x += t * d);
        }
        let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let avg: f64 = p.iter().zip(&u).map(|(p, u)| p * u).sum();
        if max < best.0 {
            best = (max, u.clone());
        }
        if !max.is_finite() || max - avg < BA_GAP {
            break;
        }
        let mut total = 0.0;
        for (pj, uj) in p.iter_mut().zip(&u) {
            *pj *= (uj - max).exp2();
            total += *pj;
        }
        p.iter_mut().for_each(|x| *x /= total);
    }
    best
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn entropy_of_radius(r: f64) -> f64 {
    h2(0.5 * (1.0 - r.min(1.0)))
}

/// `D(ρ ‖ σ)` in bits from Bloch vectors; `+∞` when `σ` is (nearly) pure.
fn relative_entropy(rho: &[f64; 3], rho_entropy: f64, sigma: &[f64; 3]) -> f64 {
    let s = norm(sigma);
    if 1.0 - s < 1e-12 {
        return f64::INFINITY;
    }
    // tr ρ log₂ σ = Σ± ½(1 ± r·ŝ) log₂(½(1 ± |s|))
    let proj = if s > 0.0 {
        (rho[0] * sigma[0] + rho[1] * sigma[1] + rho[2] * sigma[2]) / s
    } else {
        0.0
    };
    let cross = 0.5 * (1.0 + proj) * (0.5 * (1.0 + s)).log2()
        + 0.5 * (1.0 - proj) * (0.5 * (1.0 - s)).log2();
    -rho_entropy - cross
}

/// Best ensemble found so far, as grid indices with their numerators.
#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    value: f64,
    key: Vec<(usize, u32)>,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        match self.value.partial_cmp(&other.value) {
            Some(CmpOrdering::Greater) => true,
            Some(CmpOrdering::Equal) => self.key < other.key,
            _ => false,
        }
    }
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

struct Search<'a> {
    tables: &'a [Table],
    /// Per-state pruning bound, see [`pruning_bound`].
    bound: &'a [f64],
    /// Positions into the grid, in enumeration order.
    order: &'a [usize],
    n: usize,
    n_total: u32,
    prune: bool,
    incumbent: &'a AtomicU64,
    evaluations: &'a AtomicU64,
    budget: u64,
    aborted: &'a AtomicBool,
}

impl Search<'_> {
    fn threshold(&self) -> f64 {
        if self.prune {
            f64::from_bits(self.incumbent.load(Ordering::Relaxed)) - PRUNE_MARGIN
        } else {
            f64::NEG_INFINITY
        }
    }

    fn objective(&self, members: &[usize], numerators: &[u32]) -> f64 {
        let n_total = self.n_total as f64;
        self.tables
            .iter()
            .map(|t| t.chi(members, numerators, n_total))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest weighted divergence reachable by completing `chosen` (positions
    /// into `order`) with states that come later in the order.
    fn subtree_bound(&self, chosen: &[usize]) -> f64 {
        let d = self.bound;
        let first = d[self.order[chosen[0]]];
        let last = d[self.order[*chosen.last().unwrap()]];
        let rest: f64 = chosen[1..].iter().map(|&p| d[self.order[p]]).sum();
        let remaining = (self.n - chosen.len()) as f64;
        ((self.n_total as f64 - (self.n - 1) as f64) * first + rest + remaining * last)
            / self.n_total as f64
    }

    fn visit(&self, chosen: &mut Vec<usize>, best: &mut Option<Candidate>) {
        if self.aborted.load(Ordering::Relaxed) {
            return;
        }
        if chosen.len() == self.n {
            self.leaf(chosen, best);
            return;
        }
        let start = chosen.last().map_or(0, |p| p + 1);
        let slots_left = self.n - chosen.len() - 1;
        for pos in start..self.order.len().saturating_sub(slots_left) {
            chosen.push(pos);
            // divergences only decrease along the order, so the bound does too
            if self.prune && self.subtree_bound(chosen) < self.threshold() {
                chosen.pop();
                break;
            }
            self.visit(chosen, best);
            chosen.pop();
        }
    }

    fn leaf(&self, chosen: &[usize], best: &mut Option<Candidate>) {
        let mut members: Vec<usize> = chosen.iter().map(|&p| self.order[p]).collect();
        members.sort_unstable();
        let mut numerators = vec![1u32; self.n];
        let mut local_evals = 0u64;
        for_each_composition(self.n_total, &mut numerators, &mut |ks| {
            if self.prune {
                let thr = self.threshold();
                let n_total = self.n_total as f64;
                let bound: f64 = members
                    .iter()
                    .zip(ks.iter())
                    .map(|(&j, &k)| k as f64 * self.bound[j])
                    .sum::<f64>()
                    / n_total;
                if bound < thr {
                    return;
                }
            }
            local_evals += 1;
            let value = self.objective(&members, ks);
            let cand = Candidate {
                value,
                key: members.iter().copied().zip(ks.iter().copied()).collect(),
            };
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                self.incumbent
                    .fetch_max(value.max(0.0).to_bits(), Ordering::Relaxed);
                *best = Some(cand);
            }
        });
        let total = self.evaluations.fetch_add(local_evals, Ordering::Relaxed) + local_evals;
        if total > self.budget {
            self.aborted.store(true, Ordering::Relaxed);
        }
    }
}

/// Calls `f` on every composition of `total` into `parts.len()` positive parts,
/// in lexicographic order.
fn for_each_composition(total: u32, parts: &mut [u32], f: &mut dyn FnMut(&[u32])) {
    fn rec(i: usize, remaining: u32, parts: &mut [u32], f: &mut dyn FnMut(&[u32])) {
        let n = parts.len();
        if i == n - 1 {
            parts[i] = remaining;
            f(parts);
            return;
        }
        let later = (n - 1 - i) as u32;
        if remaining < later + 1 {
            return;
        }
        for k in 1..=remaining - later {
            parts[i] = k;
            rec(i + 1, remaining - k, parts, f);
        }
    }
    if (parts.len() as u32) <= total {
        rec(0, total, parts, f);
    }
}

fn run(channels: &[Channel], config: &OracleConfig) -> Result<OracleOutcome> {
    config.validate()?;
    let search_size = config.search_size();
    if !config.prune && search_size > config.budget {
        return Err(Error::BudgetExceeded {
            required: search_size,
            budget: config.budget,
        });
    }
    let states = config.grid_states();
    let tables: Vec<Table> = channels.iter().map(|c| Table::new(c, &states)).collect();
    let n_total = config.prob_grid as u32;

    let incumbent = AtomicU64::new(0f64.to_bits());
    let evaluations = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    let identity: Vec<usize> = (0..states.len()).collect();
    let no_bound = vec![f64::INFINITY; states.len()];
    let mut bound: Option<Vec<f64>> = None;

    let mut best: Option<Candidate> = None;
    let small = config.n_states.min(2);
    for n in 1..=config.n_states {
        let prune_here = config.prune && n > small;
        let mut order = identity.clone();
        if prune_here {
            let u = bound.get_or_insert_with(|| pruning_bound(&tables));
            order.sort_by(|&i, &j| {
                u[j].partial_cmp(&u[i])
                    .unwrap_or(CmpOrdering::Equal)
                    .then(i.cmp(&j))
            });
        }
        let search = Search {
            tables: &tables,
            bound: if prune_here {
                bound.as_deref().unwrap()
            } else {
                &no_bound
            },
            order: &order,
            n,
            n_total,
            prune: prune_here,
            incumbent: &incumbent,
            evaluations: &evaluations,
            budget: config.budget,
            aborted: &aborted,
        };
        let found = (0..order.len())
            .into_par_iter()
            .map(|first| {
                let mut chosen = Vec::with_capacity(n);
                chosen.push(first);
                if search.prune && search.subtree_bound(&chosen) < search.threshold() {
                    return None;
                }
                let mut local = None;
                search.visit(&mut chosen, &mut local);
                local
            })
            .reduce(|| None, pick);
        if aborted.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded {
                required: evaluations.load(Ordering::Relaxed),
                budget: config.budget,
            });
        }
        best = pick(best, found);
    }

    let best = best.expect("a non-empty grid always yields an ensemble");
    let entries = best
        .key
        .iter()
        .map(|&(j, k)| (k as f64 / n_total as f64, states[j]))
        .collect();
    Ok(OracleOutcome {
        value: best.value,
        ensemble: Ensemble::new(entries)?,
        evaluations: evaluations.load(Ordering::Relaxed),
        search_size,
    })
}
