//! Upper bound `min_τ J(τ)` on the statistical dimension of the descent
//! cone, `J(τ) = E dist²(X, τ ∂f(x̄))` with `X ~ N(0, I)`.
//!
//! Distances use `dist(X, τ∂f) = ||x*||` where `x*` is the prox of
//! `τ ||D_Λ x||_1 + ι{Psi_r^T x <= 0}` at `X - τ y0`. When `D` is a graph
//! difference every connected piece of the `Λ`-graph is a constant region
//! of `x̄`, so each piece carries one sign constraint and its prox is the
//! clipped unconstrained TV prox.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::objectives::{subdiff_description, ObjectiveCase, ObjectiveSpec, SubdiffDescription, ACT_TOL};
use crate::par::map_indexed;
use crate::rng::rng_from_seed;
use crate::solver::{solve_projection, QuadraticProjection, FEAS_TOL};
use crate::tv_prox::{graph_tv_denoise, tv1d_denoise, Edge, FistaOptions};

pub const DEFAULT_SAMPLES: usize = 10_000;

/// Doubling steps allowed while bracketing the minimiser.
const MAX_DOUBLINGS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Free,
    NonNeg,
    NonPos,
}

#[derive(Clone, Debug)]
struct Piece {
    nodes: Vec<usize>,
    /// Local indices.
    edges: Vec<Edge>,
    sign: Sign,
    /// Nodes are consecutive and chained in order with no unary rows.
    chain: bool,
    /// Unary rows folded into a shift of `±τ` per occurrence (signed pieces).
    unary_shift: Vec<f64>,
}

#[derive(Clone, Debug)]
enum Kernel {
    /// `∂f` is a product of intervals.
    Separable {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Graph {
        y0: Vec<f64>,
        pieces: Vec<Piece>,
    },
    /// Box-constrained least squares over the generators of `∂f`.
    Generic(Box<SubdiffDescription>),
}

/// `X -> dist²(X, τ ∂f(x̄))` for a fixed `x̄`.
#[derive(Clone, Debug)]
pub struct DistanceOracle {
    kernel: Kernel,
    n: usize,
    fista: FistaOptions,
}

impl DistanceOracle {
    pub fn new(sd: &SubdiffDescription) -> Self {
        let n = sd.n();
        let kernel = if let Some(iv) = sd.coordinate_intervals() {
            Kernel::Separable { lo: iv.iter().map(|p| p.0).collect(), hi: iv.iter().map(|p| p.1).collect() }
        } else {
            graph_kernel(sd).unwrap_or_else(|| Kernel::Generic(Box::new(sd.clone())))
        };
        Self { kernel, n, fista: FistaOptions::default() }
    }

    /// Forces the box-constrained least-squares path.
    pub fn generic(sd: &SubdiffDescription) -> Self {
        Self { kernel: Kernel::Generic(Box::new(sd.clone())), n: sd.n(), fista: FistaOptions::default() }
    }

    pub fn with_fista(mut self, opts: FistaOptions) -> Self {
        self.fista = opts;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist_sq(&self, x: &[f64], tau: f64) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::InvalidDimension(format!("sample has {} entries, expected {}", x.len(), self.n)));
        }
        if !(tau >= 0.0) {
            return Err(Error::InvalidInput(format!("tau must be >= 0, got {tau}")));
        }
        if tau == 0.0 {
            return Ok(x.iter().map(|v| v * v).sum());
        }
        match &self.kernel {
            Kernel::Separable { lo, hi } => Ok(x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&l, &h))| {
                    let c = v.clamp(scale(tau, l), scale(tau, h));
                    (v - c) * (v - c)
                })
                .sum()),
            Kernel::Graph { y0, pieces } => {
                let mut total = 0.0;
                for piece in pieces {
                    let mut z: Vec<f64> =
                        piece.nodes.iter().zip(&piece.unary_shift).map(|(&i, &u)| x[i] - tau * (y0[i] + u)).collect();
                    if piece.chain {
                        z = tv1d_denoise(&z, tau);
                    } else if !piece.edges.is_empty() {
                        z = graph_tv_denoise(&z, &piece.edges, tau, self.fista);
                    }
                    total += z
                        .iter()
                        .map(|&v| match piece.sign {
                            Sign::Free => v * v,
                            Sign::NonNeg => v.max(0.0).powi(2),
                            Sign::NonPos => v.min(0.0).powi(2),
                        })
                        .sum::<f64>();
                }
                Ok(total)
            }
            Kernel::Generic(sd) => {
                let (mut basis, lower, upper) = sd.generators();
                basis.scale(tau);
                let offset: Vec<f64> = sd.y0.iter().map(|v| tau * v).collect();
                let qp = QuadraticProjection::BoxImage { target: x.to_vec(), basis, offset, lower, upper };
                Ok(solve_projection(&qp, FEAS_TOL)?.sq_distance)
            }
        }
    }
}

/// `τ · bound`, keeping infinities (τ > 0 here).
fn scale(tau: f64, v: f64) -> f64 {
    if v.is_infinite() {
        v
    } else {
        tau * v
    }
}

fn graph_kernel(sd: &SubdiffDescription) -> Option<Kernel> {
    let n = sd.n();
    let dl = &sd.d_lambda_t;
    let mut pairs = Vec::new();
    let mut unary = Vec::new();
    for c in 0..dl.cols() {
        let mut nz = (0..n).filter(|&i| dl.get(i, c) != 0.0);
        let first = nz.next()?;
        match nz.next() {
            None if dl.get(first, c).abs() == 1.0 => unary.push(first),
            Some(second)
                if nz.next().is_none()
                    && dl.get(first, c) + dl.get(second, c) == 0.0
                    && dl.get(first, c).abs() == 1.0 =>
            {
                pairs.push((first, second))
            }
            _ => return None,
        }
    }
    let mut sign = vec![Sign::Free; n];
    for &(i, s) in &sd.ray_coords {
        sign[i] = if s < 0.0 { Sign::NonNeg } else { Sign::NonPos };
    }
    // Union-find over the pairwise rows.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for &(a, b) in &pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut piece_of = vec![usize::MAX; n];
    let mut pieces: Vec<Piece> = Vec::new();
    let mut local = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if piece_of[r] == usize::MAX {
            piece_of[r] = pieces.len();
            pieces.push(Piece {
                nodes: Vec::new(),
                edges: Vec::new(),
                sign: sign[i],
                chain: true,
                unary_shift: Vec::new(),
            });
        }
        let p = &mut pieces[piece_of[r]];
        if p.sign != sign[i] {
            return None;
        }
        local[i] = p.nodes.len();
        p.nodes.push(i);
        p.unary_shift.push(0.0);
        piece_of[i] = piece_of[r];
    }
    for &(a, b) in &pairs {
        let p = &mut pieces[piece_of[a]];
        p.edges.push((local[a], Some(local[b])));
    }
    for &a in &unary {
        let p = &mut pieces[piece_of[a]];
        match p.sign {
            // |x_a| is linear on the sign-constrained piece.
            Sign::NonNeg => p.unary_shift[local[a]] += 1.0,
            Sign::NonPos => p.unary_shift[local[a]] -= 1.0,
            Sign::Free => p.edges.push((local[a], None)),
        }
    }
    for p in &mut pieces {
        let mut e: Vec<(usize, usize)> = Vec::new();
        let mut ok = p.edges.len() + 1 == p.nodes.len();
        for &(a, b) in &p.edges {
            match b {
                Some(b) => e.push((a.min(b), a.max(b))),
                None => ok = false,
            }
        }
        e.sort_unstable();
        ok = ok && e.iter().enumerate().all(|(k, &(a, b))| a == k && b == k + 1 && p.nodes[b] == p.nodes[a] + 1);
        p.chain = ok;
    }
    Some(Kernel::Graph { y0: sd.y0.clone(), pieces })
}

/// `dist²(X, τ ∂f(x̄))` for one sample.
pub fn dist_sq_to_scaled_subdiff(x: &[f64], tau: f64, sd: &SubdiffDescription) -> Result<f64> {
    DistanceOracle::new(sd).dist_sq(x, tau)
}

/// `k` standard normal vectors drawn once and reused for every `τ`.
#[derive(Clone, Debug)]
pub struct SampleSet {
    n: usize,
    data: Vec<f64>,
}

impl SampleSet {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        use rand::Rng as _;
        let mut rng = rng_from_seed(seed);
        let data = (0..n * k).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.n.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// `h_k(τ)` with common random numbers.
#[derive(Clone, Debug)]
pub struct MonteCarloJ {
    pub oracle: DistanceOracle,
    pub samples: SampleSet,
}

impl MonteCarloJ {
    pub fn new(spec: &ObjectiveSpec, x: &[f64], k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("need at least one sample".into()));
        }
        let sd = subdiff_description(spec, x, ACT_TOL)?;
        Ok(Self { oracle: DistanceOracle::new(&sd), samples: SampleSet::new(spec.n(), k, seed) })
    }

    /// `(mean, std / sqrt(k))`.
    pub fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        let k = self.samples.len();
        let vals = map_indexed(k, |i| self.oracle.dist_sq(self.samples.sample(i), tau));
        let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
        let mean = vals.iter().sum::<f64>() / k as f64;
        let stderr = if k > 1 {
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        Ok((mean, stderr))
    }
}

pub fn j_approx(spec: &ObjectiveSpec, x: &[f64], tau: f64, k: usize, seed: u64) -> Result<(f64, f64)> {
    MonteCarloJ::new(spec, x, k, seed)?.eval(tau)
}

/// `φ(t)`.
fn pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `Q(t) = P(X > t)`.
fn upper_tail(t: f64) -> f64 {
    0.5 * erfc(t / std::f64::consts::SQRT_2)
}

/// `E (X - a)_+^2`.
pub fn kernel_upper_excess(a: f64) -> f64 {
    (1.0 + a * a) * upper_tail(a) - a * pdf(a)
}

/// `E (a - X)_+^2`.
pub fn kernel_lower_excess(a: f64) -> f64 {
    kernel_upper_excess(-a)
}

/// Coordinate counts by the shape of `∂f` along each axis, for `D = I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormProfile {
    /// `{±1}`: `E (X ∓ τ)^2 = 1 + τ²`.
    pub point: usize,
    /// `[-1, 1]`: `2 E (X - τ)_+^2`.
    pub interval: usize,
    /// `(-inf, 1]`: `E (X - τ)_+^2`.
    pub below: usize,
    /// `[1, inf)`: `E (τ - X)_+^2`.
    pub above: usize,
}

impl ClosedFormProfile {
    pub fn n(&self) -> usize {
        self.point + self.interval + self.below + self.above
    }

    /// Standard profiles: F1 and F2 with `s` nonzeros, F3 with `s` ones and
    /// the rest zero.
    pub fn from_counts(case: ObjectiveCase, n: usize, s: usize) -> Result<Self> {
        if s > n {
            return Err(Error::InvalidInput(format!("s = {s} exceeds n = {n}")));
        }
        Ok(match case {
            ObjectiveCase::F1 => Self { point: s, interval: n - s, below: 0, above: 0 },
            ObjectiveCase::F2 => Self { point: s, interval: 0, below: n - s, above: 0 },
            ObjectiveCase::F3 => Self { point: 0, interval: 0, below: n - s, above: s },
            _ => return Err(Error::InvalidInput("closed forms exist only for f1, f2, f3".into())),
        })
    }

    /// Reads the profile off the subdifferential of a `D = I` objective.
    pub fn from_signal(spec: &ObjectiveSpec, x: &[f64]) -> Result<Self> {
        if !spec.case.is_sparse() || !spec.is_identity() {
            return Err(Error::InvalidInput("closed forms exist only for f1, f2, f3".into()));
        }
        let sd = subdiff_description(spec, x, ACT_TOL)?;
        let iv =
            sd.coordinate_intervals().ok_or_else(|| Error::InvalidInput("subdifferential not separable".into()))?;
        let mut p = Self { point: 0, interval: 0, below: 0, above: 0 };
        for (lo, hi) in iv {
            match (lo, hi) {
                (l, h) if l == h && l.abs() == 1.0 => p.point += 1,
                (l, h) if l == -1.0 && h == 1.0 => p.interval += 1,
                (l, h) if l == f64::NEG_INFINITY && h == 1.0 => p.below += 1,
                (l, h) if l == 1.0 && h == f64::INFINITY => p.above += 1,
                (l, h) => return Err(Error::InvalidInput(format!("no closed form for the interval [{l}, {h}]"))),
            }
        }
        Ok(p)
    }

    /// `J(τ)`; `J(0) = n` by convention (`0 · ∂f = {0}`).
    pub fn j(&self, tau: f64) -> f64 {
        if tau == 0.0 {
            return self.n() as f64;
        }
        let e = kernel_upper_excess(tau);
        self.point as f64 * (1.0 + tau * tau)
            + self.interval as f64 * 2.0 * e
            + self.below as f64 * e
            + self.above as f64 * kernel_lower_excess(tau)
    }

    /// `J'(τ)` for `τ > 0`.
    pub fn dj(&self, tau: f64) -> f64 {
        let (q, phi) = (upper_tail(tau), pdf(tau));
        let de = 2.0 * tau * q - 2.0 * phi;
        let dl = 2.0 * (tau * (1.0 - q) + phi);
        self.point as f64 * 2.0 * tau
            + self.interval as f64 * 2.0 * de
            + self.below as f64 * de
            + self.above as f64 * dl
    }
}

pub fn j_closed_form(case: ObjectiveCase, n: usize, s: usize, tau: f64) -> Result<f64> {
    Ok(ClosedFormProfile::from_counts(case, n, s)?.j(tau))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatDimMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatDimEstimate {
    pub tau_star: f64,
    pub j_star: f64,
    pub samples: usize,
    pub stderr: f64,
    pub method: StatDimMethod,
    /// `[0, T]` searched by bisection.
    pub interval: (f64, f64),
    /// False when `x̄ = 0` or `0 ∈ ∂f(x̄)`; the minimum is then best effort.
    pub guaranteed: bool,
}

/// Minimiser of `J` from the closed form, by bisection on `J'`.
pub fn minimize_closed_form(profile: &ClosedFormProfile, tol_tau: f64) -> Result<StatDimEstimate> {
    if profile.n() == 0 {
        return Err(Error::InvalidDimension("empty profile".into()));
    }
    let guaranteed = profile.point + profile.above > 0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while profile.dj(hi) < 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            if guaranteed {
                return Err(Error::NumericalFailure("J' stays negative".into()));
            }
            break;
        }
    }
    let mut lo = 0.0;
    let top = hi;
    while hi - lo > tol_tau {
        let mid = 0.5 * (lo + hi);
        if profile.dj(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    Ok(StatDimEstimate {
        tau_star: tau,
        j_star: profile.j(tau),
        samples: 0,
        stderr: 0.0,
        method: StatDimMethod::ClosedForm,
        interval: (0.0, top),
        guaranteed,
    })
}

/// Bisection on the sign of a central difference of a convex function on
/// `[0, hi]`.
fn bisect_convex(f: &mut dyn FnMut(f64) -> Result<f64>, mut hi: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let h = (0.25 * tol).min(0.5 * mid);
        if f(mid + h)? > f(mid - h)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Minimiser of `h_k`. Bounded subdifferentials (F1, F4) start from
/// `T = 2 ||x̄|| / b`, `b = min ||∂f||`; the others from `T = 1`. `T` is
/// doubled until `h_k(T) >= h_k(T / 2)`.
pub fn minimize_j(spec: &ObjectiveSpec, x: &[f64], k: usize, seed: u64, tol_tau: f64) -> Result<StatDimEstimate> {
    let mc = MonteCarloJ::new(spec, x, k, seed)?;
    minimize_monte_carlo(&mc, spec, x, tol_tau)
}

pub fn minimize_monte_carlo(
    mc: &MonteCarloJ,
    spec: &ObjectiveSpec,
    x: &[f64],
    tol_tau: f64,
) -> Result<StatDimEstimate> {
    let n = spec.n();
    let bounded = spec.lower.iter().all(|l| !l.is_finite()) && spec.upper.iter().all(|u| !u.is_finite());
    let b = mc.oracle.dist_sq(&vec![0.0; n], 1.0)?.sqrt();
    let xnorm = norm2(x);
    let guaranteed = xnorm > 0.0 && b > 1e-9;
    let mut hi = if bounded && guaranteed { 2.0 * xnorm / b } else { 1.0 };
    let mut f = |t: f64| mc.eval(t).map(|v| v.0);
    let mut doublings = 0;
    while f(hi)? < f(0.5 * hi)? {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NumericalFailure(format!("minimum not bracketed below tau = {hi}")));
        }
    }
    let tau = bisect_convex(&mut f, hi, tol_tau)?;
    let (j, se) = mc.eval(tau)?;
    Ok(StatDimEstimate {
        tau_star: tau,
        j_star: j.clamp(0.0, n as f64),
        samples: mc.samples.len(),
        stderr: se,
        method: StatDimMethod::MonteCarlo,
        interval: (0.0, hi),
        guaranteed,
    })
}

/// Default `τ` tolerance, `1e-3 ||x̄||`, floored for tiny signals.
pub fn default_tol_tau(x: &[f64]) -> f64 {
    (1e-3 * norm2(x)).max(1e-6)
}

/// Closed form for F1-F3, Monte Carlo otherwise.
pub fn estimate(spec: &ObjectiveSpec, x: &[f64], k: usize, seed: u64, tol_tau: f64) -> Result<StatDimEstimate> {
    if spec.case.is_sparse() && spec.is_identity() {
        if let Ok(profile) = ClosedFormProfile::from_signal(spec, x) {
            return minimize_closed_form(&profile, tol_tau.min(1e-10));
        }
    }
    minimize_j(spec, x, k, seed, tol_tau)
}

/// Distance through the box-constrained least-squares path only.
pub fn generic_dist_sq(sd: &SubdiffDescription, x: &[f64], tau: f64) -> Result<f64> {
    DistanceOracle::generic(sd).dist_sq(x, tau)
}
