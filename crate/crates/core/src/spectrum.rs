//! Ambient groups, frequency sets, trigonometric polynomials, and the sampled
//! probability spaces every analytic module works on.
//!
//! Groups are one of four concrete shapes: the integers Z, a cyclic group Z_M,
//! a product Z(p)^N of a prime cyclic group, or the circle sampled at M
//! equispaced atoms. Frequencies on Z and on the sampled circle are signed
//! integers; everywhere else they are canonical residues.

use std::collections::BTreeMap;

pub use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupSpec {
    Integers,
    Cyclic { m: u64 },
    PrimePower { p: u64, n: usize },
    TorusGrid { m: u64 },
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupSpec::Integers => Ok(()),
            GroupSpec::Cyclic { m } | GroupSpec::TorusGrid { m } => {
                if m < 2 {
                    Err(Error::domain(format!("modulus must be >= 2, got {m}")))
                } else {
                    Ok(())
                }
            }
            GroupSpec::PrimePower { p, n } => {
                if !is_prime(p) {
                    Err(Error::domain(format!("{p} is not prime")))
                } else if n == 0 {
                    Err(Error::domain("exponent N must be >= 1"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Modulus for sum arithmetic: Some(M) on cyclic-like groups, None on Z.
    pub fn modulus(&self) -> Option<u64> {
        match *self {
            GroupSpec::Cyclic { m } | GroupSpec::TorusGrid { m } => Some(m),
            _ => None,
        }
    }

    /// Brings an element to canonical coordinates for this group.
    pub fn canonical(&self, e: &Element) -> Result<Element> {
        let scalar = |e: &Element| -> Result<i64> {
            match e {
                Element::Scalar(x) => Ok(*x),
                Element::Vector(v) if v.len() == 1 => Ok(v[0]),
                Element::Vector(v) => Err(Error::domain(format!(
                    "expected a scalar frequency, got a vector of length {}",
                    v.len()
                ))),
            }
        };
        match *self {
            GroupSpec::Integers => Ok(Element::Scalar(scalar(e)?)),
            // Frequencies on the sampled circle are signed integers; identity of
            // characters is still mod M, which sum arithmetic handles.
            GroupSpec::TorusGrid { .. } => Ok(Element::Scalar(scalar(e)?)),
            GroupSpec::Cyclic { m } => Ok(Element::Scalar(scalar(e)?.rem_euclid(m as i64))),
            GroupSpec::PrimePower { p, n } => match e {
                Element::Vector(v) if v.len() == n => Ok(Element::Vector(
                    v.iter().map(|x| x.rem_euclid(p as i64)).collect(),
                )),
                _ => Err(Error::domain(format!(
                    "element of Z({p})^{n} must be a vector of length {n}"
                ))),
            },
        }
    }

    /// Identity test, valid for any representative of the element.
    pub fn is_zero(&self, e: &Element) -> bool {
        match (self, e) {
            (
                GroupSpec::TorusGrid { m } | GroupSpec::Cyclic { m },
                Element::Scalar(x),
            ) => x.rem_euclid(*m as i64) == 0,
            (GroupSpec::PrimePower { p, .. }, Element::Vector(v)) => {
                v.iter().all(|x| x.rem_euclid(*p as i64) == 0)
            }
            (_, Element::Scalar(x)) => *x == 0,
            (_, Element::Vector(v)) => v.iter().all(|x| *x == 0),
        }
    }

    pub fn zero_value(&self) -> GroupValue {
        match *self {
            GroupSpec::Integers => GroupValue::Int(0),
            GroupSpec::Cyclic { .. } | GroupSpec::TorusGrid { .. } => GroupValue::Mod(0),
            GroupSpec::PrimePower { n, .. } => GroupValue::Res(vec![0; n]),
        }
    }

    /// The inverse −v in the group.
    pub fn negate_value(&self, v: &GroupValue) -> GroupValue {
        match (self, v) {
            (GroupSpec::Integers, GroupValue::Int(x)) => GroupValue::Int(-x),
            (
                GroupSpec::Cyclic { m } | GroupSpec::TorusGrid { m },
                GroupValue::Mod(x),
            ) => GroupValue::Mod(if *x == 0 { 0 } else { m - x }),
            (GroupSpec::PrimePower { p, .. }, GroupValue::Res(v)) => GroupValue::Res(
                v.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect(),
            ),
            _ => unreachable!("group/value shape mismatch"),
        }
    }

    /// acc <- acc + sign * e, in the group.
    pub fn accumulate(&self, acc: &mut GroupValue, e: &Element, sign: i64) {
        match (self, acc, e) {
            (GroupSpec::Integers, GroupValue::Int(a), Element::Scalar(x)) => {
                *a += sign as i128 * *x as i128;
            }
            (
                GroupSpec::Cyclic { m } | GroupSpec::TorusGrid { m },
                GroupValue::Mod(a),
                Element::Scalar(x),
            ) => {
                let m = *m as i128;
                let v = (*a as i128 + sign as i128 * *x as i128).rem_euclid(m);
                *a = v as u64;
            }
            (GroupSpec::PrimePower { p, .. }, GroupValue::Res(a), Element::Vector(v)) => {
                let p = *p as i128;
                for (ai, xi) in a.iter_mut().zip(v) {
                    *ai = ((*ai as i128 + sign as i128 * *xi as i128).rem_euclid(p)) as u64;
                }
            }
            _ => unreachable!("group/value/element shape mismatch"),
        }
    }
}

/// Canonical value of a (signed) sum of elements; hashable for dedup.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupValue {
    Int(i128),
    Mod(u64),
    Res(Vec<u64>),
}

impl GroupValue {
    pub fn is_zero(&self) -> bool {
        match self {
            GroupValue::Int(x) => *x == 0,
            GroupValue::Mod(x) => *x == 0,
            GroupValue::Res(v) => v.iter().all(|x| *x == 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Scalar(i64),
    Vector(Vec<i64>),
}

impl Element {
    pub fn as_scalar(&self) -> Option<i64> {
        match self {
            Element::Scalar(x) => Some(*x),
            Element::Vector(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }
}

impl From<i64> for Element {
    fn from(x: i64) -> Self {
        Element::Scalar(x)
    }
}

/// A finite set Λ of nonzero group elements, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreqSet {
    pub group: GroupSpec,
    pub elements: Vec<Element>,
}

impl FreqSet {
    pub fn new(group: GroupSpec, elements: Vec<Element>) -> Result<Self> {
        group.validate()?;
        let mut canon = Vec::with_capacity(elements.len());
        for e in &elements {
            let c = group.canonical(e)?;
            if group.is_zero(&c) {
                return Err(Error::domain("frequency sets must not contain the identity"));
            }
            canon.push(c);
        }
        // Duplicate characters are compared mod M on the sampled circle.
        let mut seen = std::collections::HashSet::new();
        for c in &canon {
            let key = match (&group, c) {
                (GroupSpec::TorusGrid { m }, Element::Scalar(x)) => {
                    Element::Scalar(x.rem_euclid(*m as i64))
                }
                _ => c.clone(),
            };
            if !seen.insert(key) {
                return Err(Error::domain("frequency sets must not contain duplicates"));
            }
        }
        Ok(FreqSet {
            group,
            elements: canon,
        })
    }

    pub fn from_ints(group: GroupSpec, xs: &[i64]) -> Result<Self> {
        Self::new(group, xs.iter().map(|&x| Element::Scalar(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Sub-multiset selection by index, preserving order.
    pub fn subset(&self, idx: &[usize]) -> FreqSet {
        FreqSet {
            group: self.group.clone(),
            elements: idx.iter().map(|&i| self.elements[i].clone()).collect(),
        }
    }

    /// Scalar frequencies, for the Z / Z_M / grid cases.
    pub fn scalars(&self) -> Result<Vec<i64>> {
        self.elements
            .iter()
            .map(|e| {
                e.as_scalar()
                    .ok_or_else(|| Error::domain("expected scalar frequencies"))
            })
            .collect()
    }
}

/// Finitely supported Fourier coefficients on Z / sampled circle / Z_M.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub group: GroupSpec,
    #[serde(
        serialize_with = "serialize_coeffs",
        deserialize_with = "deserialize_coeffs"
    )]
    pub coeffs: BTreeMap<i64, Complex64>,
}

fn serialize_coeffs<S: Serializer>(
    coeffs: &BTreeMap<i64, Complex64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<(i64, f64, f64)> = coeffs.iter().map(|(&k, c)| (k, c.re, c.im)).collect();
    rows.serialize(s)
}

fn deserialize_coeffs<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<BTreeMap<i64, Complex64>, D::Error> {
    let rows: Vec<(i64, f64, f64)> = Vec::deserialize(d)?;
    let mut map = BTreeMap::new();
    for (k, re, im) in rows {
        if map.insert(k, Complex64::new(re, im)).is_some() {
            return Err(serde::de::Error::custom(format!("duplicate frequency {k}")));
        }
    }
    Ok(map)
}

impl TrigPoly {
    pub fn new(group: GroupSpec, coeffs: Vec<(i64, Complex64)>) -> Result<Self> {
        group.validate()?;
        match group {
            GroupSpec::PrimePower { .. } => {
                return Err(Error::domain(
                    "trigonometric polynomials live on Z, Z_M, or the sampled circle",
                ))
            }
            _ => {}
        }
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            let k = match group {
                GroupSpec::Cyclic { m } => k.rem_euclid(m as i64),
                _ => k,
            };
            if map.insert(k, c).is_some() {
                return Err(Error::domain(format!("duplicate frequency {k}")));
            }
        }
        Ok(TrigPoly { group, coeffs: map })
    }

    pub fn max_abs_freq(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }
}

/// A finite probability space carrying complex values; all norms act here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub atoms: Vec<(Complex64, f64)>,
}

impl SampledFunction {
    pub fn new(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("sampled function needs at least one atom"));
        }
        let mut total = 0.0;
        for &(v, w) in &atoms {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::domain(format!("atom weight {w} is not a nonnegative real")));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::domain("atom values must be finite"));
            }
            total += w;
        }
        // Summing n weights in floating point drifts by up to ~n·ε even when
        // the exact sum is 1, so the gate scales with the atom count.
        let slack = 1e-12_f64.max(4.0 * f64::EPSILON * atoms.len() as f64);
        if (total - 1.0).abs() > slack {
            return Err(Error::domain(format!(
                "atom weights must sum to 1 (got {total:.15})"
            )));
        }
        Ok(SampledFunction { atoms })
    }

    /// Equal-weight atoms from a list of values.
    pub fn uniform(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::domain("sampled function needs at least one atom"));
        }
        let w = 1.0 / n as f64;
        Self::new(values.into_iter().map(|v| (v, w)).collect())
    }

    pub fn uniform_real(values: Vec<f64>) -> Result<Self> {
        Self::uniform(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn mean(&self) -> Complex64 {
        self.atoms.iter().map(|&(v, w)| v * w).sum()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.atoms.iter().map(|&(v, _)| v).collect()
    }

    /// Real parts, erroring if any atom has a meaningful imaginary part.
    pub fn real_values(&self) -> Result<Vec<f64>> {
        let scale = self
            .atoms
            .iter()
            .map(|(v, _)| v.norm())
            .fold(1.0f64, f64::max);
        for &(v, _) in &self.atoms {
            if v.im.abs() > 1e-9 * scale {
                return Err(Error::domain(
                    "expected a real-valued function, found imaginary parts",
                ));
            }
        }
        Ok(self.atoms.iter().map(|&(v, _)| v.re).collect())
    }
}

/// Evaluates Σ c_k e^{ikt} on the uniform M-point grid by FFT.
///
/// Alias freedom: signed frequencies need M >= 2 max|k| + 1; residue
/// frequencies of Z_{M0} need M to be a multiple of M0.
pub fn synth_eval(poly: &TrigPoly, m: usize) -> Result<SampledFunction> {
    if m < 2 {
        return Err(Error::domain(format!("grid size must be >= 2, got {m}")));
    }
    match poly.group {
        GroupSpec::Integers | GroupSpec::TorusGrid { .. } => {
            let kmax = poly.max_abs_freq();
            if 2 * kmax + 1 > m as i64 {
                return Err(Error::Alias {
                    needed: kmax,
                    got: m,
                });
            }
        }
        GroupSpec::Cyclic { m: m0 } => {
            if m as u64 % m0 != 0 {
                return Err(Error::Alias {
                    needed: m0 as i64,
                    got: m,
                });
            }
        }
        GroupSpec::PrimePower { .. } => unreachable!("checked at construction"),
    }
    let mut bins = vec![Complex64::new(0.0, 0.0); m];
    for (&k, &c) in &poly.coeffs {
        let b = k.rem_euclid(m as i64) as usize;
        bins[b] += c;
    }
    // Unnormalized inverse FFT: X_j = Σ_b x_b e^{+2πi b j / M}.
    FftPlanner::new().plan_fft_inverse(m).process(&mut bins);
    SampledFunction::uniform(bins)
}

/// (Σ w_j |f_j|^p)^{1/p}; max |f_j| for p = ∞.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::domain(format!("lp_norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f
            .atoms
            .iter()
            .filter(|&&(_, w)| w > 0.0)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max));
    }
    // Terms are summed in sorted order so the norm depends on the atom
    // multiset, not its order; translation is then invariance, not tolerance.
    let mut terms: Vec<f64> = f.atoms.iter().map(|&(v, w)| w * v.norm().powf(p)).collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sum: f64 = terms.iter().sum();
    Ok(sum.powf(1.0 / p))
}
