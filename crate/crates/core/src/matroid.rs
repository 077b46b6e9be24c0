//! Rank computations over GF(p), partitioning of vector families into
//! linearly independent parts by augmenting-path search, and the comparison
//! between linear independence and quasi-independence in Z(p)^N.

use std::collections::VecDeque;

use serde::Serialize;

use crate::relations::is_quasi_independent;
use crate::spectrum::{is_prime, Element, FreqSet, GroupSpec};
use crate::{Error, Result};

/// Ordered family of nonzero vectors over GF(p). Duplicates are allowed —
/// they are merely dependent — but the zero vector is rejected since no
/// independent part can hold it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GFVectorSet {
    pub p: u64,
    pub dim: usize,
    pub vectors: Vec<Vec<u64>>,
}

impl GFVectorSet {
    pub fn new(p: u64, dim: usize, vectors: Vec<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("p = {p} is not prime")));
        }
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let mut canon = Vec::with_capacity(vectors.len());
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::domain(format!(
                    "vector length {} does not match dimension {dim}",
                    v.len()
                )));
            }
            let w: Vec<u64> = v.iter().map(|&x| x % p).collect();
            if w.iter().all(|&x| x == 0) {
                return Err(Error::domain("zero vector is not allowed"));
            }
            canon.push(w);
        }
        Ok(Self {
            p,
            dim,
            vectors: canon,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Disjoint index parts covering the whole family, each linearly independent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates disjointness, coverage, and full rank of every part.
    pub fn verified(v: &GFVectorSet, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; v.len()];
        for part in &parts {
            for &i in part {
                if i >= v.len() {
                    return Err(Error::precondition(format!("index {i} out of range")));
                }
                if seen[i] {
                    return Err(Error::domain(format!("index {i} appears in two parts")));
                }
                seen[i] = true;
            }
            if gf_rank(v, part)? != part.len() {
                return Err(Error::domain("a part is not linearly independent"));
            }
        }
        if let Some(missing) = seen.iter().position(|&b| !b) {
            return Err(Error::domain(format!("index {missing} is not covered")));
        }
        Ok(Self { parts })
    }
}

/// Subset A certifying that no partition into k independent parts exists:
/// k·rank(A) < |A|, so some part would have to hold more than rank(A)
/// vectors of A.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureWitness {
    pub indices: Vec<usize>,
    pub rank: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PartitionOutcome {
    Partitioned(Partition),
    Infeasible(FailureWitness),
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid; a must be nonzero mod p.
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inverse of a nonunit requested");
    t0.rem_euclid(p as i128) as u64
}

/// Incremental row-echelon basis over GF(p).
struct Echelon {
    p: u64,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Self {
            p,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut w = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let f = w[piv];
            if f != 0 {
                // Rows are normalized to a leading 1.
                for (wc, &rc) in w.iter_mut().zip(row) {
                    *wc = (*wc + p - mul_mod(f, rc, p)) % p;
                }
            }
        }
        w
    }

    /// Inserts v when it enlarges the span; returns whether it did.
    fn insert(&mut self, v: &[u64]) -> bool {
        let mut w = self.reduce(v);
        let Some(piv) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(w[piv], self.p);
        for x in &mut w {
            *x = mul_mod(*x, inv, self.p);
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }
}

/// Rank of the indexed subfamily via Gaussian elimination over GF(p).
pub fn gf_rank(v: &GFVectorSet, subset: &[usize]) -> Result<usize> {
    let mut ech = Echelon::new(v.p);
    let mut rank = 0;
    for &i in subset {
        let vec = v
            .vectors
            .get(i)
            .ok_or_else(|| Error::precondition(format!("index {i} out of range")))?;
        if ech.insert(vec) {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Coefficients writing `y` over the independent family `basis`, or `None`
/// when y lies outside the span. Gauss–Jordan on the augmented system.
fn represent(p: u64, basis: &[&Vec<u64>], y: &[u64]) -> Option<Vec<u64>> {
    let dim = y.len();
    let k = basis.len();
    if k == 0 {
        // Nonzero y is never in the empty span.
        return if y.iter().all(|&x| x == 0) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let mut m: Vec<Vec<u64>> = (0..dim)
        .map(|r| {
            let mut row: Vec<u64> = basis.iter().map(|b| b[r]).collect();
            row.push(y[r]);
            row
        })
        .collect();
    let mut pivot_row_of_col = vec![usize::MAX; k];
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..dim).find(|&r| m[r][col] != 0) else {
            // Independent basis columns always pivot.
            unreachable!("dependent family passed as a basis");
        };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col], p);
        for c in col..=k {
            m[row][c] = mul_mod(m[row][c], inv, p);
        }
        for r in 0..dim {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..=k {
                    let sub = mul_mod(f, m[row][c], p);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        pivot_row_of_col[col] = row;
        row += 1;
    }
    if (row..dim).any(|r| m[r][k] != 0) {
        return None;
    }
    Some(pivot_row_of_col.iter().map(|&r| m[r][k]).collect())
}

enum Augment {
    Placed,
    Stuck(Vec<usize>),
}

/// Breadth-first search over the exchange graph: from a vector y there is an
/// edge to each member of its circuit in any part; a part not spanning y is
/// a free slot. The shortest path found is unwound as a chain of swaps.
fn augment(
    v: &GFVectorSet,
    parts: &mut [Vec<usize>],
    place: &mut [Option<usize>],
    x: usize,
) -> Augment {
    let n = v.len();
    let mut parent = vec![usize::MAX; n];
    let mut discovered = vec![false; n];
    discovered[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        let yv = &v.vectors[y];
        for j in 0..parts.len() {
            if place[y] == Some(j) {
                continue;
            }
            let basis: Vec<&Vec<u64>> = parts[j].iter().map(|&i| &v.vectors[i]).collect();
            match represent(v.p, &basis, yv) {
                None => {
                    apply_path(parts, place, &parent, x, y, j);
                    return Augment::Placed;
                }
                Some(c) => {
                    for (pos, &ci) in c.iter().enumerate() {
                        let z = parts[j][pos];
                        if ci != 0 && !discovered[z] {
                            discovered[z] = true;
                            parent[z] = y;
                            queue.push_back(z);
                        }
                    }
                }
            }
        }
    }
    Augment::Stuck((0..n).filter(|&i| discovered[i]).collect())
}

fn apply_path(
    parts: &mut [Vec<usize>],
    place: &mut [Option<usize>],
    parent: &[usize],
    x: usize,
    y: usize,
    free_part: usize,
) {
    // The path's last vector enters the free part; each predecessor slides
    // into the slot its successor vacated. Only x starts unplaced.
    let mut cur = y;
    let mut dest = free_part;
    loop {
        let vacated = place[cur];
        if let Some(pj) = vacated {
            let pos = parts[pj].iter().position(|&i| i == cur).unwrap();
            parts[pj].swap_remove(pos);
        }
        parts[dest].push(cur);
        place[cur] = Some(dest);
        if cur == x {
            break;
        }
        dest = vacated.expect("interior path vectors are placed");
        cur = parent[cur];
    }
}

/// Partitions the family into at most k linearly independent parts, or
/// returns a witness subset A with k·rank(A) < |A| proving none exists.
pub fn horn_rado_partition(v: &GFVectorSet, k: usize) -> Result<PartitionOutcome> {
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut place: Vec<Option<usize>> = vec![None; v.len()];
    for x in 0..v.len() {
        match augment(v, &mut parts, &mut place, x) {
            Augment::Placed => {
                debug_assert!(parts
                    .iter()
                    .all(|part| gf_rank(v, part).unwrap() == part.len()));
            }
            Augment::Stuck(mut indices) => {
                indices.sort_unstable();
                let rank = gf_rank(v, &indices)?;
                // Exhausted search closes under circuits: A = {x} ∪ ⋃ (P_j ∩ A)
                // with each P_j ∩ A spanning A, so |A| = k·rank(A) + 1.
                assert!(
                    (k as u128) * (rank as u128) < indices.len() as u128,
                    "witness must violate the rank bound"
                );
                return Ok(PartitionOutcome::Infeasible(FailureWitness {
                    indices,
                    rank,
                    k,
                }));
            }
        }
    }
    let mut parts: Vec<Vec<usize>> = parts.into_iter().filter(|p| !p.is_empty()).collect();
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(PartitionOutcome::Partitioned(Partition::verified(
        v, parts,
    )?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndependenceComparison {
    pub independent: bool,
    pub quasi_independent: bool,
}

/// Compares linear independence over GF(p) with quasi-independence of the
/// same vectors inside Z(p)^N. Independence always implies
/// quasi-independence: a nontrivial ±1/0 relation is a nontrivial linear
/// relation because ±1 ≠ 0 mod p.
pub fn independence_vs_quasi(v: &GFVectorSet) -> Result<IndependenceComparison> {
    if v.len() > 24 {
        return Err(Error::precondition(
            "quasi-independence enumeration is limited to 24 vectors",
        ));
    }
    if v.p > i64::MAX as u64 {
        return Err(Error::domain("p too large for group elements"));
    }
    let all: Vec<usize> = (0..v.len()).collect();
    let independent = gf_rank(v, &all)? == v.len();

    // A duplicated vector carries the relation x − x = 0 outright.
    let mut sorted = v.vectors.clone();
    sorted.sort_unstable();
    let has_dup = sorted.windows(2).any(|w| w[0] == w[1]);
    let quasi_independent = if has_dup {
        false
    } else {
        let group = GroupSpec::PrimePower {
            p: v.p,
            n: v.dim,
        };
        let elements = v
            .vectors
            .iter()
            .map(|vec| Element::Vector(vec.iter().map(|&x| x as i64).collect()))
            .collect();
        let set = FreqSet::new(group, elements)?;
        is_quasi_independent(&set)?.0
    };
    assert!(
        !independent || quasi_independent,
        "independent families must be quasi-independent"
    );
    Ok(IndependenceComparison {
        independent,
        quasi_independent,
    })
}
