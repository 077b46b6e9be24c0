//! Orlicz ψ_a norms and subgaussian constants of finite distributions and
//! function systems, moment-growth and iid-sup equivalents, greedy packing
//! nets with their volumetric lower bound, arithmetic lower bounds for
//! subgaussian constants of integer spectra, and stationary entropy
//! integrals on the cyclic group.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::gaussian::gauss_hermite;
use crate::spectrum::{FreqSet, GroupSpec, SampledFunction};
use crate::{Error, Result};

/// Finite distribution given by weighted atoms; probabilities must sum to 1.
/// Values may be complex; the subgaussian operations additionally require
/// real values and zero mean.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteDistribution {
    pub atoms: Vec<(Complex64, f64)>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("distribution needs at least one atom"));
        }
        let mut total = 0.0;
        for &(v, w) in &atoms {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::domain("atom values must be finite"));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::domain("atom probabilities must be finite and ≥ 0"));
            }
            total += w;
        }
        // Summing n probabilities in floating point drifts by up to ~n·ε even
        // when the exact sum is 1, so the gate scales with the atom count.
        let slack = 1e-12_f64.max(4.0 * f64::EPSILON * atoms.len() as f64);
        if (total - 1.0).abs() > slack {
            return Err(Error::domain(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { atoms })
    }

    pub fn from_real(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(
            atoms
                .into_iter()
                .map(|(v, w)| (Complex64::new(v, 0.0), w))
                .collect(),
        )
    }

    /// ±1 with probability ½ each.
    pub fn rademacher() -> Self {
        Self::from_real(vec![(1.0, 0.5), (-1.0, 0.5)]).unwrap()
    }

    /// Standard normal discretized by Gauss–Hermite quadrature. All
    /// polynomial moments up to degree 2·nodes−1 are exact; the quadrature
    /// MGF never exceeds the Gaussian one, so the model stays subgaussian
    /// with constant 1.
    pub fn normal_quadrature(nodes: usize) -> Result<Self> {
        let (x, w) = gauss_hermite(nodes)?;
        Self::from_real(x.into_iter().zip(w).collect())
    }

    /// Uniform distribution on m-th roots of unity.
    pub fn uniform_circle(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("need at least one point on the circle"));
        }
        let w = 1.0 / m as f64;
        Self::new(
            (0..m)
                .map(|j| {
                    let th = std::f64::consts::TAU * j as f64 / m as f64;
                    (Complex64::new(th.cos(), th.sin()), w)
                })
                .collect(),
        )
    }

    pub fn mean(&self) -> Complex64 {
        self.atoms.iter().map(|&(v, w)| v * w).sum()
    }
}

/// Weighted atoms shared by distributions and grid-sampled functions.
pub trait AtomWeighted {
    fn atom_slice(&self) -> &[(Complex64, f64)];
}

impl AtomWeighted for DiscreteDistribution {
    fn atom_slice(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }
}

impl AtomWeighted for SampledFunction {
    fn atom_slice(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }
}

impl AtomWeighted for [(Complex64, f64)] {
    fn atom_slice(&self) -> &[(Complex64, f64)] {
        self
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Orlicz norm inf{t > 0 : E exp(|f/t|^a) ≤ e}, located by bisection of the
/// log-moment (monotone in t). The bracket [max|f|/(2−ln w_max)^{1/a}, max|f|]
/// provably straddles the root and is re-verified numerically before
/// bisecting. Returns 0 for f ≡ 0.
pub fn psi_norm<F: AtomWeighted + ?Sized>(f: &F, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("psi exponent must be > 0, got {a}")));
    }
    let pts: Vec<(f64, f64)> = f
        .atom_slice()
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(v, w)| (v.norm(), w))
        .collect();
    let (max_abs, w_at_max) = pts
        .iter()
        .fold((0.0f64, 0.0f64), |(m, wm), &(r, w)| {
            if r > m {
                (r, w)
            } else {
                (m, wm)
            }
        });
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    // Log of E exp(|f/t|^a), in log-sum-exp form to dodge overflow.
    let g = |t: f64| -> f64 {
        let terms: Vec<f64> = pts.iter().map(|&(r, w)| w.ln() + (r / t).powf(a)).collect();
        log_sum_exp(&terms)
    };
    let mut hi = max_abs;
    while g(hi) > 1.0 {
        hi *= 1.0 + 1e-12; // float safety; mathematically g(max|f|) ≤ 1
    }
    let mut lo = max_abs / (2.0 - w_at_max.ln()).powf(1.0 / a);
    while g(lo) < 1.0 {
        lo /= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-sided logarithmic λ-grid used by the subgaussian estimators.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points_per_side: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            min: 1e-3,
            max: 50.0,
            points_per_side: 200,
        }
    }
}

impl LambdaGrid {
    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && 0.0 < self.min && self.min <= self.max)
        {
            return Err(Error::domain("lambda grid needs 0 < min ≤ max"));
        }
        if self.points_per_side == 0 {
            return Err(Error::domain("lambda grid needs at least one point"));
        }
        Ok(())
    }

    fn positive_values(&self) -> Vec<f64> {
        let n = self.points_per_side;
        if n == 1 {
            return vec![self.min];
        }
        let ratio = (self.max / self.min).ln() / (n - 1) as f64;
        (0..n).map(|k| self.min * (ratio * k as f64).exp()).collect()
    }
}

fn real_mean_zero_values(f: &DiscreteDistribution) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(f.atoms.len());
    for &(v, w) in &f.atoms {
        if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
            return Err(Error::domain(
                "subgaussian constants need real-valued distributions",
            ));
        }
        out.push((v.re, w));
    }
    let mean: f64 = out.iter().map(|&(x, w)| x * w).sum();
    if mean.abs() > 1e-10 {
        return Err(Error::MeanNotZero { mean });
    }
    Ok(out)
}

/// Certified lower bound for the subgaussian constant: the maximum of
/// √Var(f) (the λ→0 limit of the objective) and √(2·ln E e^{λf})/|λ| over
/// the two-sided grid. For bounded f the value converges to the true
/// constant as the grid refines.
pub fn sg_constant(f: &DiscreteDistribution, grid: &LambdaGrid) -> Result<f64> {
    grid.validate()?;
    let pts = real_mean_zero_values(f)?;
    let mean: f64 = pts.iter().map(|&(x, w)| x * w).sum();
    let var: f64 = pts.iter().map(|&(x, w)| w * x * x).sum::<f64>() - mean * mean;
    let mut best = var.max(0.0).sqrt();
    let active: Vec<(f64, f64)> = pts.into_iter().filter(|&(_, w)| w > 0.0).collect();
    for lam in grid.positive_values() {
        for sign in [1.0, -1.0] {
            let l = sign * lam;
            let terms: Vec<f64> = active.iter().map(|&(x, w)| w.ln() + l * x).collect();
            let log_mgf = log_sum_exp(&terms).max(0.0);
            best = best.max((2.0 * log_mgf).sqrt() / lam);
        }
    }
    Ok(best)
}

/// Functions sampled on one shared weighted atom set.
#[derive(Debug, Clone)]
pub struct FunctionSystem {
    values: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
}

impl FunctionSystem {
    pub fn new(functions: &[SampledFunction]) -> Result<Self> {
        let first = functions
            .first()
            .ok_or_else(|| Error::domain("function system must be nonempty"))?;
        let weights: Vec<f64> = first.atoms.iter().map(|&(_, w)| w).collect();
        let mut values = Vec::with_capacity(functions.len());
        for f in functions {
            if f.atoms.len() != weights.len() {
                return Err(Error::domain("functions must share one atom set"));
            }
            for (&(_, w), &w0) in f.atoms.iter().zip(&weights) {
                if (w - w0).abs() > 1e-12 {
                    return Err(Error::domain("functions must share the atom weights"));
                }
            }
            values.push(f.atoms.iter().map(|&(v, _)| v).collect());
        }
        Ok(Self { values, weights })
    }

    /// As `new`, additionally requiring every function to have unit L₂ norm.
    pub fn normalized(functions: &[SampledFunction]) -> Result<Self> {
        let s = Self::new(functions)?;
        for k in 0..s.n_functions() {
            let l2 = s.l2_norm(k);
            if (l2 - 1.0).abs() > 1e-8 {
                return Err(Error::domain(format!(
                    "function {k} has L2 norm {l2}, expected 1"
                )));
            }
        }
        Ok(s)
    }

    pub fn n_functions(&self) -> usize {
        self.values.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self, k: usize) -> &[Complex64] {
        &self.values[k]
    }

    pub fn l2_norm(&self, k: usize) -> f64 {
        self.values[k]
            .iter()
            .zip(&self.weights)
            .map(|(v, &w)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sup_norm(&self, k: usize) -> f64 {
        self.values[k]
            .iter()
            .zip(&self.weights)
            .filter(|&(_, &w)| w > 0.0)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Which real component of which system function a mixing coordinate
/// addresses; complex functions contribute their real and imaginary parts
/// as separate components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentLabel {
    Re(usize),
    Im(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct SgSystemReport {
    /// Certified lower bound for the system's subgaussian constant.
    pub value: f64,
    /// Maximizing unit direction over the components below.
    pub direction: Vec<f64>,
    pub components: Vec<ComponentLabel>,
}

fn system_real_components(s: &FunctionSystem) -> (Vec<Vec<f64>>, Vec<ComponentLabel>) {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for k in 0..s.n_functions() {
        let vals = s.values(k);
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
        let keep = |row: &[f64]| row.iter().any(|x| x.abs() > 1e-14 * (1.0 + scale));
        if keep(&re) {
            rows.push(re);
            labels.push(ComponentLabel::Re(k));
        }
        if keep(&im) {
            rows.push(im);
            labels.push(ComponentLabel::Im(k));
        }
    }
    (rows, labels)
}

fn mix_sg(
    rows: &[Vec<f64>],
    weights: &[f64],
    x: &[f64],
    grid: &LambdaGrid,
) -> Result<f64> {
    let atoms: Vec<(Complex64, f64)> = (0..weights.len())
        .map(|i| {
            let v: f64 = rows.iter().zip(x).map(|(r, &c)| c * r[i]).sum();
            (Complex64::new(v, 0.0), weights[i])
        })
        .collect();
    sg_constant(&DiscreteDistribution::new(atoms)?, grid)
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// Maximizes the subgaussian lower estimate of Σ x_k·(component_k) over the
/// unit sphere by coordinate directions plus random restarts, each refined
/// with a shrinking coordinatewise line search. The result is a certified
/// lower bound for the system constant (never an upper bound), and is
/// deterministic for a fixed seed regardless of thread schedule.
pub fn sg_system_lower(s: &FunctionSystem, restarts: usize, seed: u64) -> Result<SgSystemReport> {
    if restarts == 0 {
        return Err(Error::precondition("need at least one restart"));
    }
    let (rows, labels) = system_real_components(s);
    if rows.is_empty() {
        return Ok(SgSystemReport {
            value: 0.0,
            direction: Vec::new(),
            components: labels,
        });
    }
    let dim = rows.len();
    let grid = LambdaGrid {
        min: 1e-3,
        max: 30.0,
        points_per_side: 40,
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[k] = sign;
            starts.push(e);
        }
    }
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut x: Vec<f64> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
        if x.iter().all(|v| v.abs() < 1e-12) {
            x[0] = 1.0;
        }
        normalize(&mut x);
        starts.push(x);
    }

    let climbed: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .map(|mut x| -> Result<(f64, Vec<f64>)> {
            let mut best = mix_sg(&rows, &s.weights, &x, &grid)?;
            for &eta in &[0.5, 0.2, 0.08, 0.03] {
                for _ in 0..6 {
                    let mut improved = false;
                    for k in 0..dim {
                        for sign in [1.0, -1.0] {
                            let mut cand = x.clone();
                            cand[k] += sign * eta;
                            normalize(&mut cand);
                            let v = mix_sg(&rows, &s.weights, &cand, &grid)?;
                            if v > best + 1e-10 {
                                best = v;
                                x = cand;
                                improved = true;
                            }
                        }
                    }
                    if !improved {
                        break;
                    }
                }
            }
            Ok((best, x))
        })
        .collect::<Result<_>>()?;

    let mut value = f64::NEG_INFINITY;
    let mut direction = Vec::new();
    for (v, x) in climbed {
        if v > value {
            value = v;
            direction = x;
        }
    }
    Ok(SgSystemReport {
        value,
        direction,
        components: labels,
    })
}

/// sup over even p ≤ p_max of p^{−1/a}·‖f‖_p.
pub fn moment_growth<F: AtomWeighted + ?Sized>(f: &F, a: f64, p_max: usize) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("exponent must be > 0, got {a}")));
    }
    if p_max < 2 || p_max % 2 != 0 {
        return Err(Error::precondition("p_max must be an even integer ≥ 2"));
    }
    let pts: Vec<(f64, f64)> = f
        .atom_slice()
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(v, w)| (v.norm(), w))
        .collect();
    let mut best = 0.0f64;
    for p in (2..=p_max).step_by(2) {
        let moment: f64 = pts.iter().map(|&(r, w)| w * r.powi(p as i32)).sum();
        let norm_p = moment.powf(1.0 / p as f64);
        best = best.max((p as f64).powf(-1.0 / a) * norm_p);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of E sup_{1≤n≤n_max} (ln(n+1))^{−1/a}·|f_n| over
/// iid copies of f. Per-trial counter seeds keep the result reproducible
/// and schedule-independent.
pub fn iid_sup_statistic(
    f: &DiscreteDistribution,
    a: f64,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<MeanStderr> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("exponent must be > 0, got {a}")));
    }
    if trials == 0 || n_max == 0 {
        return Err(Error::precondition("need trials ≥ 1 and n_max ≥ 1"));
    }
    let mut cdf = Vec::with_capacity(f.atoms.len());
    let mut acc = 0.0;
    for &(v, w) in &f.atoms {
        acc += w;
        cdf.push((acc, v.norm()));
    }
    let max_abs = cdf.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let sups: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut sup = 0.0f64;
            for n in 1..=n_max {
                let u: f64 = rng.gen();
                let idx = cdf.partition_point(|&(c, _)| c < u).min(cdf.len() - 1);
                let scale = ((n as f64 + 1.0).ln()).powf(-1.0 / a);
                sup = sup.max(scale * cdf[idx].1);
                // Later terms are damped harder; stop once they cannot win.
                if sup >= ((n as f64 + 2.0).ln()).powf(-1.0 / a) * max_abs {
                    break;
                }
            }
            sup
        })
        .collect();
    let mean = sups.iter().sum::<f64>() / trials as f64;
    let stderr = if trials > 1 {
        (sups.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
            / (trials as f64 - 1.0)
            / trials as f64)
            .sqrt()
    } else {
        0.0
    };
    Ok(MeanStderr { mean, stderr })
}

/// Maximal separated subset of the atom grid in the system embedding
/// x ↦ (f_k(x))_k, with the volumetric lower bound on log|net|.
#[derive(Debug, Clone, Serialize)]
pub struct NetReport {
    pub points: Vec<usize>,
    pub separation: f64,
    pub bound: f64,
}

/// Greedy maximal packing: atoms x, y are separated when
/// (Σ_k |f_k(x) − f_k(y)|²)^{1/2} > delta·√n. The report carries the bound
/// n(1−δC)²/(2s²C²); when `sg_bound` really dominates the system's
/// subgaussian constant, log|points| is at least that bound.
pub fn packing_net(
    s: &FunctionSystem,
    delta: f64,
    sg_bound: f64,
    sup_bound: f64,
) -> Result<NetReport> {
    if !(sup_bound.is_finite() && sup_bound > 0.0) {
        return Err(Error::domain("sup-norm bound must be positive"));
    }
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0 / sup_bound) {
        return Err(Error::domain(format!(
            "delta must lie in (0, 1/C) = (0, {}), got {delta}",
            1.0 / sup_bound
        )));
    }
    if !(sg_bound.is_finite() && sg_bound > 0.0) {
        return Err(Error::domain("subgaussian bound must be positive"));
    }
    let n = s.n_functions();
    for k in 0..n {
        let l2 = s.l2_norm(k);
        if (l2 - 1.0).abs() > 1e-8 {
            return Err(Error::precondition(format!(
                "function {k} has L2 norm {l2}, expected 1"
            )));
        }
        if s.sup_norm(k) > sup_bound + 1e-9 {
            return Err(Error::precondition(format!(
                "function {k} exceeds the sup-norm bound {sup_bound}"
            )));
        }
    }
    let separation = delta * (n as f64).sqrt();
    let m = s.n_atoms();
    let dist = |i: usize, j: usize| -> f64 {
        (0..n)
            .map(|k| (s.values(k)[i] - s.values(k)[j]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mut points: Vec<usize> = Vec::new();
    for i in 0..m {
        if points.iter().all(|&j| dist(i, j) > separation) {
            points.push(i);
        }
    }
    // The greedy set is pairwise separated and maximal by construction;
    // both are re-verified.
    for (a, &i) in points.iter().enumerate() {
        for &j in points.iter().skip(a + 1) {
            assert!(dist(i, j) > separation, "net points {i},{j} too close");
        }
    }
    for i in 0..m {
        assert!(
            points.contains(&i) || points.iter().any(|&j| dist(i, j) <= separation),
            "atom {i} is separated from the net but was not added"
        );
    }
    let c = sup_bound;
    let bound = n as f64 * (1.0 - delta * c).powi(2) / (2.0 * sg_bound * sg_bound * c * c);
    Ok(NetReport {
        points,
        separation,
        bound,
    })
}

/// Grid of thinning parameters for `arith_sg_lower_bound`.
pub fn default_delta_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

/// Any subgaussian constant s valid for frequencies Λ ⊆ [1, N] satisfies
/// log(2πN/δ + 1) ≥ |Λ|(1−δ)²/(2s²) for each δ ∈ (0,1); the returned value
/// is the best lower bound for s over the δ grid.
pub fn arith_sg_lower_bound(l: &FreqSet, n_upper: u64, delta_grid: &[f64]) -> Result<f64> {
    let xs = l.scalars()?;
    if xs.iter().any(|&x| x < 1 || x as u128 > n_upper as u128) {
        return Err(Error::precondition(format!(
            "frequencies must lie in [1, {n_upper}]"
        )));
    }
    if xs.is_empty() {
        return Ok(0.0);
    }
    let card = xs.len() as f64;
    let mut best = 0.0f64;
    for &d in delta_grid {
        if !(d.is_finite() && d > 0.0 && d < 1.0) {
            return Err(Error::domain(format!("delta grid entry {d} outside (0,1)")));
        }
        let denom = 2.0 * (std::f64::consts::TAU / 2.0 * 2.0 * n_upper as f64 / d + 1.0).ln();
        let val = (card * (1.0 - d) * (1.0 - d) / denom).sqrt();
        best = best.max(val);
    }
    Ok(best)
}

/// Stationary L2 entropy integral of Λ on Z/M: with
/// d(s) = (Σ_{k∈Λ} |e^{2πiks/M} − 1|²)^{1/2} and
/// μ(ε) = #{s : d(s) < ε}/M, computes ∫₀^{max d} √(ln 1/μ(ε)) dε exactly
/// as a finite sum over the sorted distinct distances.
pub fn entropy_integral(l: &FreqSet) -> Result<f64> {
    let m = match l.group {
        GroupSpec::Cyclic { m } => m,
        _ => {
            return Err(Error::precondition(
                "entropy integral is defined on cyclic groups",
            ))
        }
    };
    let ks = l.scalars()?;
    let mf = m as f64;
    let mut dist: Vec<f64> = (0..m)
        .map(|s| {
            ks.iter()
                .map(|&k| {
                    let t = std::f64::consts::PI * (k as f64) * (s as f64) / mf;
                    4.0 * t.sin().powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Collapse to distinct values with cumulative counts.
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for &d in &dist {
        match levels.last_mut() {
            Some((v, c)) if *v == d => *c += 1,
            _ => {
                let prev = levels.last().map_or(0, |&(_, c)| c);
                levels.push((d, prev + 1));
            }
        }
    }
    let mut total = 0.0;
    for w in levels.windows(2) {
        let (v0, c0) = w[0];
        let (v1, _) = w[1];
        total += (v1 - v0) * (mf / c0 as f64).ln().sqrt();
    }
    Ok(total)
}
