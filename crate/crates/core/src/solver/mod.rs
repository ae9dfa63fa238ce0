//! Best responses and Nash equilibria of the commitment game, plus the
//! trivial equilibrium of the game without commitment.
//!
//! A candidate's best response to an opponent platform `x` lies between their
//! ideal `t` and `x` (excluding `x` itself), so the search is confined to that
//! segment. There the payoff reduces to
//! `P(own, x) * (u(own, t) - u(x, t))`, which is continuous and vanishes at
//! `own = x`. The objective is not guaranteed to be unimodal, so the segment is
//! scanned on a dense grid, every near-maximal run of grid points is refined
//! with golden-section search, and the refined point is then polished by
//! bisecting the sign change of the analytic derivative when one is bracketed.
//!
//! The extremal equilibria are limits of monotone iteration of the joint
//! best-response map from the bottom `(t_l, t_l)` and top `(t_r, t_r)` of the
//! lattice `[t_l, t_r]^2`.

mod golden;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contest::{ElectionModel, IdealPair, PlatformProfile, Side};
use crate::error::{domain, Result};
use crate::scalar::{in_unit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", default, deny_unknown_fields)]
pub struct BestResponseOptions<S> {
    /// Points in the initial scan of the search segment (at least 101).
    pub grid_size: usize,
    /// Width at which golden-section refinement stops.
    pub refine_tol: S,
    /// Objective values within this of the maximum count as tied maximisers.
    pub tie_tol: S,
}

impl<S: Scalar> Default for BestResponseOptions<S> {
    fn default() -> Self {
        Self { grid_size: 2001, refine_tol: S::tol(1e-10, 64.0), tie_tol: S::tol(1e-9, 64.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", default, deny_unknown_fields)]
pub struct EquilibriumOptions<S> {
    pub best_response: BestResponseOptions<S>,
    /// Iteration stops once the sup-norm step falls below this.
    pub fixpoint_tol: S,
    pub max_iters: usize,
}

impl<S: Scalar> Default for EquilibriumOptions<S> {
    fn default() -> Self {
        Self { best_response: BestResponseOptions::default(), fixpoint_tol: S::tol(1e-9, 256.0), max_iters: 10_000 }
    }
}

/// Extreme elements of a best-response set and the optimal reduced objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct BestResponseSet<S> {
    pub smallest: S,
    pub largest: S,
    pub value: S,
}

impl<S: Scalar> BestResponseSet<S> {
    pub fn select(&self, selection: Selection) -> S {
        match selection {
            Selection::Smallest => self.smallest,
            Selection::Largest => self.largest,
        }
    }

    /// Distance from `x` to the interval `[smallest, largest]`.
    pub fn distance(&self, x: S) -> S {
        if x < self.smallest {
            self.smallest - x
        } else if x > self.largest {
            x - self.largest
        } else {
            S::zero()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct EquilibriumReport<S> {
    pub smallest: PlatformProfile<S>,
    pub largest: PlatformProfile<S>,
    pub iterations_smallest: usize,
    pub iterations_largest: usize,
    pub converged: bool,
    /// Set when an iterate moved against the monotone direction by more than
    /// the best-response tolerance and had to be clamped.
    pub clamped: bool,
}

impl<S: Scalar> EquilibriumReport<S> {
    pub fn get(&self, selection: Selection) -> PlatformProfile<S> {
        match selection {
            Selection::Smallest => self.smallest,
            Selection::Largest => self.largest,
        }
    }
}

/// Extreme points of the best-response correspondence of `side` against an
/// opponent platform.
pub fn best_response<S: Scalar>(
    model: &ElectionModel<S>,
    side: Side,
    opponent: S,
    opts: &BestResponseOptions<S>,
) -> Result<BestResponseSet<S>> {
    if !in_unit(opponent) {
        return Err(domain(format!("opponent platform {opponent} outside [0, 1]")));
    }
    if opts.grid_size < 101 {
        return Err(domain(format!("grid_size must be at least 101, got {}", opts.grid_size)));
    }
    let t = model.ideals.get(side);
    if opponent == t {
        return Ok(BestResponseSet { smallest: t, largest: t, value: S::zero() });
    }

    let (lo, hi) = if t < opponent { (t, opponent) } else { (opponent, t) };
    let n = opts.grid_size;
    let denom = S::from_usize(n - 1).unwrap();
    let xs: Vec<S> = (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * S::from_usize(i).unwrap() / denom })
        .collect();
    let g = |x: S| model.reduced_objective(side, x, opponent);
    let vals: Vec<S> = xs.iter().map(|&x| g(x)).collect();
    let gmax = vals.iter().copied().fold(S::neg_infinity(), S::max);
    let tie = opts.tie_tol;

    let mut candidates: Vec<(S, S)> = Vec::new();
    let mut i = 0;
    while i < n {
        if vals[i] < gmax - tie {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && vals[i + 1] >= gmax - tie {
            i += 1;
        }
        let a = xs[start.saturating_sub(1)];
        let b = xs[(i + 1).min(n - 1)];
        candidates.push(refine(model, side, opponent, a, b, opts));
        i += 1;
    }

    let best = candidates.iter().map(|c| c.1).fold(S::neg_infinity(), S::max);
    let kept = candidates.iter().filter(|c| c.1 >= best - tie).map(|c| c.0);
    let smallest = kept.clone().fold(S::infinity(), S::min);
    let largest = kept.fold(S::neg_infinity(), S::max);
    Ok(BestResponseSet { smallest, largest, value: best })
}

fn refine<S: Scalar>(
    model: &ElectionModel<S>,
    side: Side,
    opponent: S,
    a: S,
    b: S,
    opts: &BestResponseOptions<S>,
) -> (S, S) {
    let g = |x: S| model.reduced_objective(side, x, opponent);
    let golden = golden::maximize(g, a, b, opts.refine_tol);
    if a == opponent || b == opponent {
        return golden;
    }
    let slope = |x: S| model.reduced_objective_slope(side, x, opponent);
    if slope(a) > S::zero() && slope(b) < S::zero() {
        let x = golden::bisect_sign_change(slope, a, b);
        let v = g(x);
        if v >= golden.1 - opts.tie_tol {
            return (x, v);
        }
    }
    golden
}

/// Smallest and largest Nash equilibria of the commitment game.
///
/// Non-convergence within `max_iters` is reported through `converged = false`
/// together with the last iterates.
pub fn extremal_equilibria<S: Scalar>(model: &ElectionModel<S>, opts: &EquilibriumOptions<S>) -> Result<EquilibriumReport<S>> {
    let low = monotone_iteration(model, opts, Selection::Smallest)?;
    let high = monotone_iteration(model, opts, Selection::Largest)?;
    Ok(EquilibriumReport {
        smallest: low.profile,
        largest: high.profile,
        iterations_smallest: low.iterations,
        iterations_largest: high.iterations,
        converged: low.converged && high.converged,
        clamped: low.clamped || high.clamped,
    })
}

/// Outcome of iterating one selection of the joint best-response map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iteration<S> {
    pub profile: PlatformProfile<S>,
    pub iterations: usize,
    pub converged: bool,
    pub clamped: bool,
    pub last_step: S,
}

/// Iterates `(x_l, x_r) -> (phi_l(x_r), phi_r(x_l))` with the chosen selection,
/// from `(t_l, t_l)` upwards for [`Selection::Smallest`] and from `(t_r, t_r)`
/// downwards for [`Selection::Largest`].
pub fn monotone_iteration<S: Scalar>(
    model: &ElectionModel<S>,
    opts: &EquilibriumOptions<S>,
    selection: Selection,
) -> Result<Iteration<S>> {
    let ideals = model.ideals;
    let start = match selection {
        Selection::Smallest => ideals.t_l(),
        Selection::Largest => ideals.t_r(),
    };
    let br_tol = opts.best_response.tie_tol.max(opts.best_response.refine_tol);
    let mut x = PlatformProfile { x_l: start, x_r: start };
    let mut clamped = false;
    let mut last_step = S::infinity();

    for k in 1..=opts.max_iters {
        let left = best_response(model, Side::Left, x.x_r, &opts.best_response)?.select(selection);
        let right = best_response(model, Side::Right, x.x_l, &opts.best_response)?.select(selection);
        let mut next = PlatformProfile { x_l: left, x_r: right };
        for side in [Side::Left, Side::Right] {
            let (prev, new) = (x.get(side), next.get(side));
            let against = match selection {
                Selection::Smallest => prev - new,
                Selection::Largest => new - prev,
            };
            if against > S::zero() {
                clamped |= against > br_tol;
                match side {
                    Side::Left => next.x_l = prev,
                    Side::Right => next.x_r = prev,
                }
            }
        }
        last_step = next.distance(&x);
        x = next;
        if last_step < opts.fixpoint_tol {
            return Ok(Iteration { profile: x, iterations: k, converged: true, clamped, last_step });
        }
    }
    Ok(Iteration { profile: x, iterations: opts.max_iters, converged: false, clamped, last_step })
}

/// Approximate equilibria found by scanning a `resolution x resolution` grid on
/// `[t_l, t_r]^2`.
///
/// A grid point is a hit when each coordinate is within `tol` of the
/// corresponding best-response set against the other. Adjacent hits are
/// clustered, each cluster's centroid is moved by one best-response round, and
/// the results are returned sorted by `(x_l, x_r)`. This does not use the
/// monotone iteration and can surface intermediate equilibria.
pub fn enumerate_equilibria<S: Scalar>(
    model: &ElectionModel<S>,
    resolution: usize,
    tol: S,
    opts: &BestResponseOptions<S>,
) -> Result<Vec<PlatformProfile<S>>> {
    if resolution < 51 {
        return Err(domain(format!("resolution must be at least 51, got {resolution}")));
    }
    if !(tol > S::zero()) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let (t_l, t_r) = (model.ideals.t_l(), model.ideals.t_r());
    let denom = S::from_usize(resolution - 1).unwrap();
    let grid: Vec<S> = (0..resolution)
        .map(|i| if i + 1 == resolution { t_r } else { t_l + (t_r - t_l) * S::from_usize(i).unwrap() / denom })
        .collect();

    let responses = |side: Side| -> Result<Vec<BestResponseSet<S>>> {
        grid.par_iter().map(|&x| best_response(model, side, x, opts)).collect()
    };
    // left_br[j] answers x_r = grid[j]; right_br[i] answers x_l = grid[i]
    let left_br = responses(Side::Left)?;
    let right_br = responses(Side::Right)?;

    let idx = |i: usize, j: usize| i * resolution + j;
    let mut hit = vec![false; resolution * resolution];
    for i in 0..resolution {
        for j in 0..resolution {
            hit[idx(i, j)] = left_br[j].distance(grid[i]) <= tol && right_br[i].distance(grid[j]) <= tol;
        }
    }

    let mut seen = vec![false; hit.len()];
    let mut found = Vec::new();
    for start in 0..hit.len() {
        if !hit[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let (mut sum_l, mut sum_r, mut count) = (S::zero(), S::zero(), 0usize);
        while let Some(k) = stack.pop() {
            let (i, j) = (k / resolution, k % resolution);
            sum_l = sum_l + grid[i];
            sum_r = sum_r + grid[j];
            count += 1;
            for di in -1isize..=1 {
                for dj in -1isize..=1 {
                    let (ni, nj) = (i as isize + di, j as isize + dj);
                    if ni < 0 || nj < 0 || ni >= resolution as isize || nj >= resolution as isize {
                        continue;
                    }
                    let nk = idx(ni as usize, nj as usize);
                    if hit[nk] && !seen[nk] {
                        seen[nk] = true;
                        stack.push(nk);
                    }
                }
            }
        }
        let n = S::from_usize(count).unwrap();
        let (c_l, c_r) = (sum_l / n, sum_r / n);
        let bl = best_response(model, Side::Left, c_r, opts)?;
        let br = best_response(model, Side::Right, c_l, opts)?;
        found.push(PlatformProfile {
            x_l: c_l.max(bl.smallest).min(bl.largest),
            x_r: c_r.max(br.smallest).min(br.largest),
        });
    }
    found.sort_by(|a, b| {
        a.x_l.partial_cmp(&b.x_l).unwrap().then(a.x_r.partial_cmp(&b.x_r).unwrap())
    });
    Ok(found)
}

/// Grid step of [`enumerate_equilibria`] for a model and resolution.
pub fn grid_step<S: Scalar>(ideals: &IdealPair<S>, resolution: usize) -> S {
    (ideals.t_r() - ideals.t_l()) / S::from_usize(resolution.max(2) - 1).unwrap()
}

/// Without commitment each candidate runs on their ideal policy.
pub fn no_commitment_equilibrium<S: Scalar>(ideals: &IdealPair<S>) -> PlatformProfile<S> {
    PlatformProfile { x_l: ideals.t_l(), x_r: ideals.t_r() }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::beliefs::MedianBelief;
    use crate::preferences::UtilitySpec;

    fn model(u: UtilitySpec<f64>, b: MedianBelief<f64>, t_l: f64, t_r: f64) -> ElectionModel<f64> {
        ElectionModel::new(u, b, IdealPair::new(t_l, t_r).unwrap()).unwrap()
    }

    fn quad_uniform(t_l: f64, t_r: f64) -> ElectionModel<f64> {
        model(UtilitySpec::Quadratic, MedianBelief::uniform(), t_l, t_r)
    }

    // exhaustive maximisation of the full expected payoff on a fine grid,
    // excluding the opponent's own platform where U jumps
    fn brute_force(m: &ElectionModel<f64>, side: Side, opp: f64, n: usize) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..n {
            let x = i as f64 / (n - 1) as f64;
            if x == opp {
                continue;
            }
            let p = match side {
                Side::Left => PlatformProfile { x_l: x, x_r: opp },
                Side::Right => PlatformProfile { x_l: opp, x_r: x },
            };
            let v = m.expected_payoff(side, &p).unwrap();
            if v > best.0 {
                best = (v, x);
            }
        }
        best.1
    }

    #[test]
    fn best_response_at_own_ideal() {
        let m = quad_uniform(0.2, 0.7);
        let o = BestResponseOptions::default();
        let br = best_response(&m, Side::Left, 0.2, &o).unwrap();
        assert_eq!((br.smallest, br.largest), (0.2, 0.2));
        let br = best_response(&m, Side::Right, 0.7, &o).unwrap();
        assert_eq!((br.smallest, br.largest), (0.7, 0.7));
    }

    #[test]
    fn best_response_quadratic_uniform() {
        let m = quad_uniform(0.0, 1.0);
        let o = BestResponseOptions::default();
        let br = best_response(&m, Side::Left, 0.6, &o).unwrap();
        assert_eq!(br.smallest, br.largest);
        assert_abs_diff_eq!(br.smallest, 0.2, epsilon = 1e-12);
        let oracle = brute_force(&m, Side::Left, 0.6, 100_001);
        assert_abs_diff_eq!(br.smallest, oracle, epsilon = 2e-5);

        let br = best_response(&m, Side::Right, 0.2, &o).unwrap();
        assert_abs_diff_eq!(br.largest, 2.2 / 3.0, epsilon = 1e-12);
        let oracle = brute_force(&m, Side::Right, 0.2, 100_001);
        assert_abs_diff_eq!(br.largest, oracle, epsilon = 2e-5);
    }

    #[test]
    fn best_response_against_opponent_outside_ideals() {
        // opponent to the left of the left candidate's ideal: response in (x, t_l]
        let m = model(UtilitySpec::Exponential, MedianBelief::triangular(0.5).unwrap(), 0.5, 0.9);
        let br = best_response(&m, Side::Left, 0.1, &BestResponseOptions::default()).unwrap();
        assert!(br.smallest > 0.1 && br.largest <= 0.5);
        let oracle = brute_force(&m, Side::Left, 0.1, 100_001);
        assert_abs_diff_eq!(br.smallest, oracle, epsilon = 2e-5);
    }

    #[test]
    fn best_response_validation() {
        let m = quad_uniform(0.0, 1.0);
        assert!(best_response(&m, Side::Left, 1.5, &BestResponseOptions::default()).is_err());
        let o = BestResponseOptions { grid_size: 50, ..Default::default() };
        assert!(best_response(&m, Side::Left, 0.5, &o).is_err());
    }

    #[test]
    fn equilibrium_quadratic_uniform() {
        let r = extremal_equilibria(&quad_uniform(0.0, 1.0), &EquilibriumOptions::default()).unwrap();
        assert!(r.converged && !r.clamped);
        for p in [r.smallest, r.largest] {
            assert_abs_diff_eq!(p.x_l, 0.25, epsilon = 1e-9);
            assert_abs_diff_eq!(p.x_r, 0.75, epsilon = 1e-9);
        }
    }

    #[test]
    fn equilibrium_symmetric_model() {
        let r = extremal_equilibria(&quad_uniform(0.2, 0.8), &EquilibriumOptions::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.smallest.x_l, 1.0 - r.smallest.x_r, epsilon = 1e-6);
        assert_abs_diff_eq!(r.largest.x_l, 1.0 - r.largest.x_r, epsilon = 1e-6);
    }

    #[test]
    fn equilibrium_close_ideals_triangular() {
        let m = model(UtilitySpec::Quadratic, MedianBelief::triangular(0.5).unwrap(), 0.4, 0.6);
        let r = extremal_equilibria(&m, &EquilibriumOptions::default()).unwrap();
        assert!(r.converged);
        for p in [r.smallest, r.largest] {
            assert!(0.4 <= p.x_l && p.x_l < p.x_r && p.x_r <= 0.6, "{p:?}");
        }
        assert!(r.smallest.x_l <= r.largest.x_l && r.smallest.x_r <= r.largest.x_r);
    }

    #[test]
    fn non_convergence_is_reported() {
        let o = EquilibriumOptions { max_iters: 1, ..Default::default() };
        let r = extremal_equilibria(&quad_uniform(0.0, 1.0), &o).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_smallest, 1);
    }

    #[test]
    fn enumeration_single_cluster() {
        let m = quad_uniform(0.0, 1.0);
        let res = 401;
        let step = grid_step(&m.ideals, res);
        let eq = enumerate_equilibria(&m, res, 2.0 * step, &BestResponseOptions::default()).unwrap();
        assert_eq!(eq.len(), 1, "{eq:?}");
        assert_abs_diff_eq!(eq[0].x_l, 0.25, epsilon = step);
        assert_abs_diff_eq!(eq[0].x_r, 0.75, epsilon = step);
    }

    #[test]
    fn enumeration_near_downsian() {
        let m = quad_uniform(0.49, 0.51);
        let res = 401;
        let step = grid_step(&m.ideals, res);
        let eq = enumerate_equilibria(&m, res, 2.0 * step, &BestResponseOptions::default()).unwrap();
        assert_eq!(eq.len(), 1, "{eq:?}");
        assert!(eq[0].x_l > 0.49 && eq[0].x_r < 0.51 && eq[0].x_l < eq[0].x_r);
        assert!(enumerate_equilibria(&m, 50, 2.0 * step, &BestResponseOptions::default()).is_err());
    }

    #[test]
    fn no_commitment_returns_ideals() {
        for (a, b) in [(0.0, 0.6), (0.2, 0.8), (0.49, 0.51)] {
            let p = no_commitment_equilibrium(&IdealPair::new(a, b).unwrap());
            assert_eq!((p.x_l, p.x_r), (a, b));
        }
    }

    #[test]
    fn f32_equilibrium() {
        let m = ElectionModel::<f32>::new(
            UtilitySpec::Quadratic,
            MedianBelief::uniform(),
            IdealPair::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let r = extremal_equilibria(&m, &EquilibriumOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.smallest.x_l - 0.25).abs() < 1e-4 && (r.largest.x_r - 0.75).abs() < 1e-4);
    }
}
