//! Probabilists' Hermite polynomials and Gauss–Hermite quadrature, the
//! Mehler kernel and the diagonal operators it generates on Hermite
//! expansions, kernel tensor decompositions carrying numerical norm
//! certificates, and Monte Carlo checks of Lipschitz concentration for
//! Gaussian vectors.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::subgauss::{sg_constant, standard_normal, DiscreteDistribution, LambdaGrid};
use crate::{Error, Result};

/// h_n(x) by the three-term recurrence h_{n+1} = x·h_n − n·h_{n−1};
/// h_0 = 1, h_1 = x. Orthogonal under the standard Gaussian with
/// ⟨h_n, h_n⟩ = n!.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..n {
        (prev, cur) = (cur, x * cur - k as f64 * prev);
    }
    cur
}

/// Orthonormal Hermite values (p̃_0(x), …, p̃_{n−1}(x)) with p̃_k = h_k/√k!,
/// by the recurrence p̃_{k+1} = (x·p̃_k − √k·p̃_{k−1})/√(k+1).
fn orthonormal_hermite_values(n: usize, x: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(n);
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        vals.push(cur);
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    vals
}

/// Nodes and weights of q-point Gauss–Hermite quadrature against the
/// standard normal. Nodes start as eigenvalues of the Jacobi matrix
/// (off-diagonal √k) and are polished by Newton steps on the orthonormal
/// polynomial p̃_q; weights come from the Christoffel identity
/// w_i = 1/Σ_{k<q} p̃_k(x_i)², which keeps the extreme tail weights
/// relatively accurate down to their true (astronomically small) size —
/// squared first eigenvector components bottom out at the eps² noise
/// floor instead. Nodes are symmetrized so odd moments vanish exactly;
/// weights are normalized to sum to one. Sizes above 300 would overflow
/// the Christoffel sums and are rejected.
pub fn gauss_hermite(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if q == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    if q > 300 {
        return Err(Error::domain("quadrature size is capped at 300 nodes"));
    }
    if q == 1 {
        return Ok((vec![0.0], vec![1.0]));
    }
    let mut j = DMatrix::<f64>::zeros(q, q);
    for k in 0..q - 1 {
        let b = ((k + 1) as f64).sqrt();
        j[(k, k + 1)] = b;
        j[(k + 1, k)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = vec![0.0; q];
    for i in 0..q {
        // Newton: p̃_q'(x) = √q·p̃_{q−1}(x).
        for _ in 0..3 {
            let vals = orthonormal_hermite_values(q + 1, nodes[i]);
            let deriv = (q as f64).sqrt() * vals[q - 1];
            if deriv != 0.0 {
                nodes[i] -= vals[q] / deriv;
            }
        }
        let vals = orthonormal_hermite_values(q, nodes[i]);
        weights[i] = 1.0 / vals.iter().map(|v| v * v).sum::<f64>();
    }
    for i in 0..q / 2 {
        let jx = q - 1 - i;
        let x = (nodes[jx] - nodes[i]) / 2.0;
        nodes[i] = -x;
        nodes[jx] = x;
        let w = (weights[i] + weights[jx]) / 2.0;
        weights[i] = w;
        weights[jx] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok((nodes, weights))
}

fn mehler_1d(x: f64, t: f64, d: f64) -> f64 {
    let c = 1.0 - d * d;
    (-(d * d * t * t - 2.0 * d * t * x + d * d * x * x) / (2.0 * c)).exp() / c.sqrt()
}

/// K(x,t) = (1−δ²)^{−N/2} exp((−δ²|t|² + 2δ⟨t,x⟩ − δ²|x|²)/(2(1−δ²))),
/// the positive kernel whose Hermite series is Σ_α δ^{|α|} h_α(x)h_α(t)/α!.
pub fn mehler_kernel(x: &[f64], t: &[f64], delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta.abs() < 1.0) {
        return Err(Error::domain(format!("|delta| must be < 1, got {delta}")));
    }
    if x.len() != t.len() {
        return Err(Error::domain("point dimensions differ"));
    }
    Ok(x.iter()
        .zip(t)
        .map(|(&a, &b)| mehler_1d(a, b, delta))
        .product())
}

/// Multi-indices α with |α| ≤ max_degree in graded lexicographic order.
pub(crate) fn multi_indices(n_vars: usize, max_degree: usize) -> Vec<Vec<usize>> {
    fn fill(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=left).rev() {
            prefix.push(first);
            fill(n - 1, left - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=max_degree {
        fill(n_vars, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Finite expansion Σ_α c_α h_α in the probabilists' Hermite basis,
/// dense over all |α| ≤ max_degree in graded lexicographic order.
#[derive(Debug, Clone, Serialize)]
pub struct HermiteExpansion {
    n_vars: usize,
    max_degree: usize,
    indices: Vec<Vec<usize>>,
    coeffs: Vec<f64>,
}

impl HermiteExpansion {
    pub fn zero(n_vars: usize, max_degree: usize) -> Self {
        let indices = multi_indices(n_vars, max_degree);
        let coeffs = vec![0.0; indices.len()];
        Self {
            n_vars,
            max_degree,
            indices,
            coeffs,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn position(&self, alpha: &[usize]) -> Option<usize> {
        if alpha.len() != self.n_vars {
            return None;
        }
        self.indices.iter().position(|a| a == alpha)
    }

    pub fn coeff(&self, alpha: &[usize]) -> f64 {
        self.position(alpha).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, alpha: &[usize], c: f64) -> Result<()> {
        let pos = self.position(alpha).ok_or_else(|| {
            Error::domain(format!(
                "multi-index {alpha:?} outside {} variables of degree ≤ {}",
                self.n_vars, self.max_degree
            ))
        })?;
        self.coeffs[pos] = c;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.indices
            .iter()
            .zip(&self.coeffs)
            .map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n_vars, "evaluation point dimension");
        self.terms()
            .map(|(alpha, c)| {
                c * alpha
                    .iter()
                    .zip(x)
                    .map(|(&a, &xi)| hermite_eval(a, xi))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Diagonal operators on Hermite expansions: T_δ scales degree d by δ^d;
/// Θ_z is the coordinatewise tensor of single-variable T_{z_i}, scaling h_α
/// by ∏ z_i^{α_i}. Both are exact at the endpoints ±1.
#[derive(Debug, Clone)]
pub enum GaussOperator {
    T { delta: f64 },
    Theta { z: Vec<f64> },
}

pub fn apply_operator(f: &HermiteExpansion, op: &GaussOperator) -> Result<HermiteExpansion> {
    match op {
        GaussOperator::T { delta } => {
            if !(delta.is_finite() && delta.abs() <= 1.0) {
                return Err(Error::domain(format!("|delta| must be ≤ 1, got {delta}")));
            }
            let mut out = f.clone();
            for (pos, alpha) in f.indices.iter().enumerate() {
                let d: usize = alpha.iter().sum();
                out.coeffs[pos] = f.coeffs[pos] * delta.powi(d as i32);
            }
            Ok(out)
        }
        GaussOperator::Theta { z } => {
            if z.len() != f.n_vars {
                return Err(Error::domain("z length must match the variable count"));
            }
            if z.iter().any(|&zi| !(zi.is_finite() && zi.abs() <= 1.0)) {
                return Err(Error::domain("z entries must lie in [−1, 1]"));
            }
            let mut out = f.clone();
            for (pos, alpha) in f.indices.iter().enumerate() {
                let scale: f64 = alpha
                    .iter()
                    .zip(z)
                    .map(|(&a, &zi)| zi.powi(a as i32))
                    .product();
                out.coeffs[pos] = f.coeffs[pos] * scale;
            }
            Ok(out)
        }
    }
}

/// Two-variable kernel in one of two concrete forms, with the norm
/// certificates that form supports. Certificates are recomputable from the
/// stored data (see `recompute_certificates`).
#[derive(Debug, Clone, Serialize)]
pub enum KernelRep {
    /// (∏_i F_i(x_i, y_i) − 1)/delta where F_i is a 1-D Mehler kernel
    /// sampled on a shared Gauss–Hermite grid; `factors[i]` is the q×q
    /// matrix of F_i values, row-major.
    MehlerGrid {
        n_vars: usize,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        factors: Vec<Vec<f64>>,
        delta: f64,
    },
    /// Operator diagonal in the Hermite basis: h_α ↦ eig_by_degree[|α|]·h_α.
    DegreeDiagonal {
        n_vars: usize,
        eig_by_degree: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorKernel {
    pub rep: KernelRep,
    /// Certified upper bound on ∫∫|kernel| dP dP, when the representation
    /// supports computing one.
    pub l1_norm: Option<f64>,
    /// Exact L₂(P)→L₂(P) operator norm, when the representation is diagonal.
    pub op_norm_2to2: Option<f64>,
}

/// L1 certificate of a MehlerGrid kernel. For one variable — and for two
/// when the fourfold sum stays small — the tensor quadrature of the
/// absolute integrand is summed directly; otherwise the pointwise bound
/// |∏F − 1| ≤ ∏F + 1 turns the separable mass into a certified bound
/// without enumerating the product grid.
fn mehler_grid_l1(
    n_vars: usize,
    weights: &[f64],
    factors: &[Vec<f64>],
    delta: f64,
) -> f64 {
    let q = weights.len();
    let axis_mass = |f: &Vec<f64>| -> f64 {
        let mut s = 0.0;
        for a in 0..q {
            for b in 0..q {
                s += weights[a] * weights[b] * f[a * q + b];
            }
        }
        s
    };
    match n_vars {
        1 => {
            let f = &factors[0];
            let mut s = 0.0;
            for a in 0..q {
                for b in 0..q {
                    s += weights[a] * weights[b] * (f[a * q + b] - 1.0).abs();
                }
            }
            s / delta
        }
        2 if q <= 60 => {
            let (f0, f1) = (&factors[0], &factors[1]);
            let mut s = 0.0;
            for a0 in 0..q {
                for b0 in 0..q {
                    let w0 = weights[a0] * weights[b0];
                    let v0 = f0[a0 * q + b0];
                    for a1 in 0..q {
                        for b1 in 0..q {
                            let w = w0 * weights[a1] * weights[b1];
                            s += w * (v0 * f1[a1 * q + b1] - 1.0).abs();
                        }
                    }
                }
            }
            s / delta
        }
        _ => {
            let mass: f64 = factors.iter().map(axis_mass).product();
            (mass + 1.0) / delta
        }
    }
}

impl TensorKernel {
    /// Recomputes whichever certificates the representation supports, by the
    /// same rule used at construction.
    pub fn recompute_certificates(&self) -> (Option<f64>, Option<f64>) {
        match &self.rep {
            KernelRep::MehlerGrid {
                n_vars,
                weights,
                factors,
                delta,
                ..
            } => (
                Some(mehler_grid_l1(*n_vars, weights, factors, *delta)),
                None,
            ),
            KernelRep::DegreeDiagonal { eig_by_degree, .. } => (
                None,
                Some(eig_by_degree.iter().fold(0.0, |m, e| m.max(e.abs()))),
            ),
        }
    }
}

/// Splits a z-weighted diagonal degree-1 tensor into a thin L1 part and a
/// small-operator remainder: with Φ the kernel of T_δ∘Θ_z,
///   t = (Φ − 1⊗1)/δ,   r = −(1/δ) Σ_{2≤d≤D} δ^d P_d,
/// so t + r matches Σ_n z_n g_n⊗g_n on the degree-1 × degree-1 block.
/// Certificates: ∫∫|t| ≤ 2/δ (quadrature-checked) and ‖r‖_{2→2} = δ exactly.
pub fn tensor_decompose(
    n_vars: usize,
    delta: f64,
    z: &[f64],
    max_degree: usize,
) -> Result<(TensorKernel, TensorKernel)> {
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must be in (0,1), got {delta}")));
    }
    if max_degree < 2 {
        return Err(Error::precondition("max_degree must be at least 2"));
    }
    if n_vars == 0 {
        return Err(Error::domain("need at least one variable"));
    }
    if z.len() != n_vars {
        return Err(Error::domain("z length must match the variable count"));
    }
    if z.iter().any(|&zi| !(zi.is_finite() && zi.abs() <= 1.0)) {
        return Err(Error::domain("z entries must lie in [−1, 1]"));
    }

    // ≥ 2D+1 nodes keeps every tested polynomial integrand exact. The
    // kernel's own quadrature defect decays like δ^{2q}, so q grows with δ
    // to hold it near 1e−12; past the 300-node cap (δ ≳ 0.95) the
    // reconstruction check below reports the unresolved quadrature.
    let q_for_delta = (14.0 / -delta.ln()).ceil() as usize;
    let q = (2 * max_degree + 1).max(20).max(q_for_delta).min(300);
    let (nodes, weights) = gauss_hermite(q)?;
    let factors: Vec<Vec<f64>> = z
        .iter()
        .map(|&zi| {
            let d = delta * zi;
            let mut m = vec![0.0; q * q];
            for a in 0..q {
                for b in 0..q {
                    m[a * q + b] = mehler_1d(nodes[a], nodes[b], d);
                }
            }
            m
        })
        .collect();

    // Per-axis quadrature moments of each factor.
    let mut axis_mass = vec![0.0; n_vars];
    let mut axis_xy = vec![0.0; n_vars]; // ∫∫ F(x,y)·x·y
    let mut axis_x = vec![0.0; n_vars]; // ∫∫ F(x,y)·x
    for i in 0..n_vars {
        let f = &factors[i];
        for a in 0..q {
            for b in 0..q {
                let w = weights[a] * weights[b] * f[a * q + b];
                axis_mass[i] += w;
                axis_xy[i] += w * nodes[a] * nodes[b];
                axis_x[i] += w * nodes[a];
            }
        }
    }

    // Degree-1 reconstruction: the g_m⊗g_m coefficient of t must be z_m and
    // the off-diagonal coefficients must vanish.
    for m in 0..n_vars {
        let others: f64 = (0..n_vars).filter(|&i| i != m).map(|i| axis_mass[i]).product();
        let diag = axis_xy[m] * others / delta;
        if (diag - z[m]).abs() > 1e-8 {
            return Err(Error::CertificateFailure(format!(
                "degree-1 reconstruction off by {:.3e} on coordinate {m}",
                (diag - z[m]).abs()
            )));
        }
        if axis_x[m].abs() / delta > 1e-8 {
            return Err(Error::CertificateFailure(format!(
                "degree-1 cross terms do not vanish on coordinate {m}"
            )));
        }
    }

    let l1 = mehler_grid_l1(n_vars, &weights, &factors, delta);
    if l1 > 2.0 / delta + 1e-6 {
        return Err(Error::CertificateFailure(format!(
            "L1 certificate {l1:.6} exceeds 2/delta = {:.6}; quadrature under-resolved",
            2.0 / delta
        )));
    }
    let t = TensorKernel {
        rep: KernelRep::MehlerGrid {
            n_vars,
            nodes,
            weights,
            factors,
            delta,
        },
        l1_norm: Some(l1),
        op_norm_2to2: None,
    };

    let mut eig_by_degree = vec![0.0; max_degree + 1];
    for d in 2..=max_degree {
        eig_by_degree[d] = -delta.powi(d as i32 - 1);
    }
    let op_norm = delta; // spectrum {−δ^{d−1}}, largest magnitude at d = 2
    let r = TensorKernel {
        rep: KernelRep::DegreeDiagonal {
            n_vars,
            eig_by_degree,
        },
        l1_norm: None,
        op_norm_2to2: Some(op_norm),
    };
    Ok((t, r))
}

/// Built-in 1-Lipschitz functionals of a standard Gaussian vector (the
/// constant functional has Lipschitz constant 0).
#[derive(Debug, Clone)]
pub enum LipschitzFunctional {
    Coordinate,
    EuclideanNorm,
    MaxCoordinate,
    DistanceToPoint(Vec<f64>),
    Constant(f64),
}

impl LipschitzFunctional {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Coordinate => x[0],
            Self::EuclideanNorm => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Self::MaxCoordinate => x.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)),
            Self::DistanceToPoint(p) => x
                .iter()
                .zip(p)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            Self::Constant(c) => *c,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

fn centered(values: &[f64]) -> Vec<f64> {
    // Two-pass centering keeps the residual mean at machine scale.
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let shifted: Vec<f64> = values.iter().map(|v| v - m).collect();
    let resid = shifted.iter().sum::<f64>() / n;
    shifted.iter().map(|v| v - resid).collect()
}

fn grid_sg_of_samples(values: &[f64], grid: &LambdaGrid) -> Result<f64> {
    let w = 1.0 / values.len() as f64;
    let dist = DiscreteDistribution::from_real(values.iter().map(|&v| (v, w)).collect())?;
    sg_constant(&dist, grid)
}

/// Monte Carlo subgaussian estimate for F(g) − E F(g) with g standard
/// normal in n dimensions, with a bootstrap standard error. Sampling is
/// parallel over per-trial counter seeds, so the result is independent of
/// the schedule. The estimate is asserted ≤ 1 + 3·stderr, the concentration
/// bound for 1-Lipschitz functionals.
pub fn lipschitz_concentration(
    f: &LipschitzFunctional,
    n: usize,
    trials: usize,
    seed: u64,
    grid: &LambdaGrid,
) -> Result<ConcentrationReport> {
    if trials < 10_000 {
        return Err(Error::precondition("need at least 10,000 trials"));
    }
    if n == 0 {
        return Err(Error::domain("need at least one coordinate"));
    }
    if let LipschitzFunctional::DistanceToPoint(p) = f {
        if p.len() != n {
            return Err(Error::domain("reference point dimension mismatch"));
        }
    }
    let raw: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let x: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
            f.eval(&x)
        })
        .collect();
    let estimate = grid_sg_of_samples(&centered(&raw), grid)?;

    const BOOT: usize = 16;
    let replicates: Vec<f64> = (0..BOOT)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((1 << 40) + b as u64);
            let sample: Vec<f64> = (0..trials)
                .map(|_| raw[rng.gen_range(0..trials)])
                .collect();
            grid_sg_of_samples(&centered(&sample), grid)
        })
        .collect::<Result<_>>()?;
    let mean_b = replicates.iter().sum::<f64>() / BOOT as f64;
    let stderr = (replicates.iter().map(|r| (r - mean_b).powi(2)).sum::<f64>()
        / (BOOT as f64 - 1.0))
        .sqrt();
    assert!(
        estimate <= 1.0 + 3.0 * stderr + 1e-9,
        "estimate {estimate} violates the Lipschitz concentration bound"
    );
    Ok(ConcentrationReport {
        estimate,
        stderr,
        trials,
    })
}
