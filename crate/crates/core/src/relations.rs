//! Relation combinatorics of frequency sets: counting ±1/0 relations,
//! quasi-independence tests with witnesses, greedy and random-thinning
//! extraction of quasi-independent subsets, and mesh/lacunarity diagnostics.
//!
//! A relation of Λ is a vector ξ ∈ {−1,0,1}^Λ with Σ ξ_n·n = 0 in the ambient
//! group. Λ is quasi-independent when only the zero relation exists, which is
//! the same as all 2^{|Λ|} subset sums being distinct.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectrum::{FreqSet, GroupSpec, GroupValue};
use crate::{Error, Result};

/// Budget (in visited sign vectors) used when an operation does not take an
/// explicit cap. Covers meet-in-the-middle up to |Λ| = 26.
pub const DEFAULT_RELATION_CAP: u128 = 4_000_000;

/// Nontrivial certificates materialized per report before truncation.
pub const WITNESS_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCertificate {
    pub set: FreqSet,
    pub signs: Vec<i8>,
}

impl RelationCertificate {
    /// Builds a certificate, verifying Σ signs_n · n = 0 in the group.
    pub fn new(set: FreqSet, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != set.len() {
            return Err(Error::domain("sign vector length must match the set"));
        }
        if signs.iter().any(|s| !matches!(s, -1 | 0 | 1)) {
            return Err(Error::domain("relation signs must lie in {-1,0,1}"));
        }
        let mut sum = set.group.zero_value();
        for (e, &s) in set.elements.iter().zip(&signs) {
            set.group.accumulate(&mut sum, e, s as i64);
        }
        if !sum.is_zero() {
            return Err(Error::domain("signs do not witness a relation"));
        }
        Ok(RelationCertificate { set, signs })
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|&s| s == 0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    /// |R(Λ)|, counting the zero relation; always ≥ 1, ≤ 3^{|Λ|}.
    pub count: u128,
    /// Nontrivial witnesses, when requested and affordable under the cap.
    pub certificates: Option<Vec<RelationCertificate>>,
    /// True when more nontrivial witnesses exist than were materialized.
    pub witnesses_truncated: bool,
    /// The enumeration budget this report ran under.
    pub cap: u128,
}

/// Depth-first enumeration of sign vectors over `idx`, visiting signs in the
/// order 0, +1, −1 at each position. The callback sees each leaf's group sum
/// and sign vector; returning false stops the walk. The budget is decremented
/// per leaf; returns Ok(false) when it runs out.
fn walk_signs(
    set: &FreqSet,
    idx: &[usize],
    budget: &mut u128,
    f: &mut impl FnMut(&GroupValue, &[i8]) -> bool,
) -> bool {
    fn rec(
        set: &FreqSet,
        idx: &[usize],
        pos: usize,
        sum: &mut GroupValue,
        signs: &mut Vec<i8>,
        budget: &mut u128,
        f: &mut impl FnMut(&GroupValue, &[i8]) -> bool,
    ) -> Option<bool> {
        if pos == idx.len() {
            if *budget == 0 {
                return Some(false);
            }
            *budget -= 1;
            return if f(sum, signs) { None } else { Some(true) };
        }
        let e = &set.elements[idx[pos]];
        for sign in [0i8, 1, -1] {
            if sign != 0 {
                set.group.accumulate(sum, e, sign as i64);
            }
            signs.push(sign);
            let stop = rec(set, idx, pos + 1, sum, signs, budget, f);
            signs.pop();
            if sign != 0 {
                set.group.accumulate(sum, e, -(sign as i64));
            }
            if let Some(done) = stop {
                return Some(done);
            }
        }
        None
    }
    let mut sum = set.group.zero_value();
    let mut signs = Vec::with_capacity(idx.len());
    match rec(set, idx, 0, &mut sum, &mut signs, budget, f) {
        Some(done) => done,
        None => true,
    }
}

fn pow3(n: usize) -> u128 {
    3u128.pow(n as u32)
}

/// Exact |R(A)| by meet-in-the-middle over sign assignments: enumerate all
/// 3^{⌈n/2⌉} left partial sums into a hash map, then match each of the
/// 3^{⌊n/2⌋} right sums against the negated key. Falls back to a partial
/// naive scan (a valid lower bound) when the cap cannot pay for both sides.
pub fn relation_count(a: &FreqSet, cap: u128, keep_witnesses: bool) -> Result<RelationReport> {
    if cap == 0 {
        return Err(Error::precondition("cap must be >= 1"));
    }
    if a.len() > 30 {
        return Err(Error::precondition(format!(
            "relation enumeration is limited to 30 elements, got {}",
            a.len()
        )));
    }
    let n = a.len();
    let left: Vec<usize> = (0..n.div_ceil(2)).collect();
    let right: Vec<usize> = (n.div_ceil(2)..n).collect();
    let mitm_work = pow3(left.len()) + pow3(right.len());

    if mitm_work > cap {
        // Partial naive scan: count the relations found within the budget.
        let mut found: u128 = 0;
        let idx: Vec<usize> = (0..n).collect();
        let mut budget = cap;
        let completed = walk_signs(a, &idx, &mut budget, &mut |sum, _| {
            if sum.is_zero() {
                found += 1;
            }
            true
        });
        if !completed {
            return Err(Error::cap(
                format!("relation enumeration over {n} elements needs {mitm_work} sign vectors, cap is {cap}"),
                Some(found),
            ));
        }
        // The naive scan happened to fit after all (tiny n, tiny cap).
        return finish_report(a, found, cap, keep_witnesses);
    }

    let mut left_sums: HashMap<GroupValue, u128> = HashMap::new();
    let mut budget = cap;
    walk_signs(a, &left, &mut budget, &mut |sum, _| {
        *left_sums.entry(sum.clone()).or_insert(0) += 1;
        true
    });
    let mut count: u128 = 0;
    walk_signs(a, &right, &mut budget, &mut |sum, _| {
        let need = a.group.negate_value(sum);
        if let Some(c) = left_sums.get(&need) {
            count += c;
        }
        true
    });
    finish_report(a, count, cap, keep_witnesses)
}

/// Attaches witnesses when requested; materialization re-enumerates naively,
/// so it is only attempted when 3^n fits the cap.
fn finish_report(a: &FreqSet, count: u128, cap: u128, keep_witnesses: bool) -> Result<RelationReport> {
    let n = a.len();
    let mut certificates = None;
    let mut truncated = false;
    if keep_witnesses && count > 1 {
        if pow3(n) <= cap {
            let mut certs = Vec::new();
            let idx: Vec<usize> = (0..n).collect();
            let mut budget = pow3(n);
            walk_signs(a, &idx, &mut budget, &mut |sum, signs| {
                if sum.is_zero() && signs.iter().any(|&s| s != 0) {
                    if certs.len() < WITNESS_LIMIT {
                        certs.push(RelationCertificate::new(a.clone(), signs.to_vec()).unwrap());
                        true
                    } else {
                        truncated = true;
                        false
                    }
                } else {
                    true
                }
            });
            certificates = Some(certs);
        } else {
            truncated = true;
        }
    } else if keep_witnesses {
        certificates = Some(Vec::new());
    }
    Ok(RelationReport {
        count,
        certificates,
        witnesses_truncated: truncated,
        cap,
    })
}

/// Quasi-independence test with early exit: meet-in-the-middle storing, per
/// left sum, whether the all-zero assignment lands there and one nonzero
/// representative; the first nontrivial match yields a witness.
pub fn is_quasi_independent(a: &FreqSet) -> Result<(bool, Option<RelationCertificate>)> {
    is_quasi_independent_capped(a, DEFAULT_RELATION_CAP)
}

pub fn is_quasi_independent_capped(
    a: &FreqSet,
    cap: u128,
) -> Result<(bool, Option<RelationCertificate>)> {
    if a.len() > 30 {
        return Err(Error::precondition(format!(
            "relation enumeration is limited to 30 elements, got {}",
            a.len()
        )));
    }
    let n = a.len();
    let left: Vec<usize> = (0..n.div_ceil(2)).collect();
    let right: Vec<usize> = (n.div_ceil(2)..n).collect();
    if pow3(left.len()) + pow3(right.len()) > cap {
        return Err(Error::cap(
            format!("quasi-independence test over {n} elements exceeds cap {cap}"),
            None,
        ));
    }

    struct SumInfo {
        has_zero_vector: bool,
        nonzero_rep: Option<Vec<i8>>,
    }
    let mut left_sums: HashMap<GroupValue, SumInfo> = HashMap::new();
    let mut budget = cap;
    walk_signs(a, &left, &mut budget, &mut |sum, signs| {
        let trivial = signs.iter().all(|&s| s == 0);
        let entry = left_sums.entry(sum.clone()).or_insert(SumInfo {
            has_zero_vector: false,
            nonzero_rep: None,
        });
        if trivial {
            entry.has_zero_vector = true;
        } else if entry.nonzero_rep.is_none() {
            entry.nonzero_rep = Some(signs.to_vec());
        }
        true
    });

    let mut witness: Option<Vec<i8>> = None;
    walk_signs(a, &right, &mut budget, &mut |sum, signs| {
        let right_trivial = signs.iter().all(|&s| s == 0);
        let need = a.group.negate_value(sum);
        if let Some(info) = left_sums.get(&need) {
            let left_part: Option<&[i8]> = if right_trivial {
                // Need a nonzero left assignment summing to zero.
                info.nonzero_rep.as_deref()
            } else if info.has_zero_vector {
                Some(&[][..]) // all-zero left of the right length, built below
            } else {
                info.nonzero_rep.as_deref()
            };
            if let Some(lp) = left_part {
                let mut full = if lp.is_empty() {
                    vec![0i8; left_signs_len(a)]
                } else {
                    lp.to_vec()
                };
                full.extend_from_slice(signs);
                if full.iter().any(|&s| s != 0) {
                    witness = Some(full);
                    return false;
                }
            }
        }
        true
    });

    match witness {
        Some(signs) => {
            let cert = RelationCertificate::new(a.clone(), signs)?;
            Ok((false, Some(cert)))
        }
        None => Ok((true, None)),
    }
}

fn left_signs_len(a: &FreqSet) -> usize {
    a.len().div_ceil(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Strategy {
    Greedy,
    RandomThinning { delta: f64, seed: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum CountOrCap {
    Exact(u128),
    /// Enumeration hit its cap; the true count is at least this.
    AtLeast(u128),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Extraction {
    pub subset: FreqSet,
    /// |A(ω)|: elements surviving the thinning stage (all of A for Greedy).
    pub retained_size: usize,
    /// |R(A(ω))| under the default cap, or a capped lower bound.
    pub retained_relations: CountOrCap,
}

/// Guard on the greedy subset-sum set; 2^26 sums is the desk-scale ceiling.
const GREEDY_SUM_LIMIT: usize = 1 << 26;

/// Greedy scan: admit x iff x ∉ S − S for the current subset-sum set S,
/// i.e. iff all subset sums stay distinct. S is maintained incrementally
/// (S ← S ∪ (S + x) on admission), so the output is quasi-independent by
/// construction — the sum set is a standing verification.
fn greedy_indices(a: &FreqSet, candidates: &[usize]) -> Result<Vec<usize>> {
    let mut sums: HashSet<GroupValue> = HashSet::new();
    sums.insert(a.group.zero_value());
    let mut kept = Vec::new();
    for &i in candidates {
        let x = &a.elements[i];
        let mut clash = false;
        for s in &sums {
            let mut t = s.clone();
            a.group.accumulate(&mut t, x, 1);
            if sums.contains(&t) {
                clash = true;
                break;
            }
        }
        if !clash {
            if sums.len() * 2 > GREEDY_SUM_LIMIT {
                return Err(Error::cap(
                    format!("greedy subset-sum set would exceed {GREEDY_SUM_LIMIT} sums"),
                    None,
                ));
            }
            let shifted: Vec<GroupValue> = sums
                .iter()
                .map(|s| {
                    let mut t = s.clone();
                    a.group.accumulate(&mut t, x, 1);
                    t
                })
                .collect();
            sums.extend(shifted);
            kept.push(i);
        }
    }
    Ok(kept)
}

/// Extracts a quasi-independent subset. RandomThinning keeps each element
/// with probability delta/2, with per-element counter-based randomness from
/// the caller's seed, then runs the greedy scan inside the retained set.
pub fn extract_quasi_independent(a: &FreqSet, strategy: &Strategy) -> Result<Extraction> {
    if a.is_empty() {
        return Err(Error::precondition("extraction needs a nonempty set"));
    }
    let retained: Vec<usize> = match strategy {
        Strategy::Greedy => (0..a.len()).collect(),
        Strategy::RandomThinning { delta, seed } => {
            if !(*delta > 0.0 && *delta < 1.0) {
                return Err(Error::domain(format!("delta must lie in (0,1), got {delta}")));
            }
            (0..a.len())
                .filter(|&i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(i as u64);
                    rng.gen::<f64>() < delta / 2.0
                })
                .collect()
        }
    };
    let kept = greedy_indices(a, &retained)?;
    let subset = a.subset(&kept);
    let retained_set = a.subset(&retained);
    let retained_relations = if retained_set.len() > 30 {
        CountOrCap::AtLeast(1)
    } else {
        match relation_count(&retained_set, DEFAULT_RELATION_CAP, false) {
            Ok(rep) => CountOrCap::Exact(rep.count),
            Err(Error::CapExceeded { partial_count, .. }) => {
                CountOrCap::AtLeast(partial_count.unwrap_or(1).max(1))
            }
            Err(e) => return Err(e),
        }
    };
    Ok(Extraction {
        subset,
        retained_size: retained.len(),
        retained_relations,
    })
}

/// Default lattice budget for mesh counting: n ≤ 4, s ≤ 12, ten million
/// distinct sums.
pub const DEFAULT_MESH_STATES: usize = 10_000_000;

/// |Λ ∩ {Σ k_i m_i : Σ|m_i| ≤ 2^s}| by breadth-first generation of reachable
/// sums: a sum is reachable within budget b iff a walk of ≤ b steps of ±k_i
/// lands on it.
pub fn mesh_count(l: &FreqSet, ks: &[i64], s: u32) -> Result<usize> {
    if ks.len() > 4 || s > 12 {
        return Err(Error::cap(
            format!("mesh budget allows n <= 4, s <= 12; got n = {}, s = {}", ks.len(), s),
            None,
        ));
    }
    mesh_count_with_budget(l, ks, s, DEFAULT_MESH_STATES)
}

pub fn mesh_count_with_budget(
    l: &FreqSet,
    ks: &[i64],
    s: u32,
    max_states: usize,
) -> Result<usize> {
    if s == 0 {
        return Err(Error::domain("mesh exponent s must be >= 1"));
    }
    if l.group != GroupSpec::Integers {
        return Err(Error::domain("mesh counting is defined over Z"));
    }
    let depth = 1u64 << s;
    let mut seen: HashSet<i128> = HashSet::new();
    seen.insert(0);
    let mut frontier: Vec<i128> = vec![0];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &v in &frontier {
            for &k in ks {
                for step in [k as i128, -(k as i128)] {
                    let w = v + step;
                    if seen.insert(w) {
                        if seen.len() > max_states {
                            return Err(Error::cap(
                                format!("mesh enumeration exceeded {max_states} states"),
                                None,
                            ));
                        }
                        next.push(w);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut hits = 0;
    for e in &l.elements {
        let x = e.as_scalar().ok_or_else(|| Error::domain("expected scalar frequencies"))? as i128;
        if seen.contains(&x) {
            hits += 1;
        }
    }
    Ok(hits)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LacunaryDecomposition {
    pub parts: Vec<Vec<i64>>,
    /// sup_n |Λ ∩ (2^n, 2^{n+1}]| over the range of Λ.
    pub block_bound: usize,
}

/// First-fit partition of sorted Λ into q-lacunary sequences: elements in
/// increasing order, parts tried in creation order, x joins the first part
/// whose last element l satisfies x/l ≥ q.
pub fn lacunary_decompose(l: &FreqSet, q: f64) -> Result<LacunaryDecomposition> {
    if !(q > 1.0) {
        return Err(Error::domain(format!("lacunarity ratio must exceed 1, got {q}")));
    }
    if l.group != GroupSpec::Integers {
        return Err(Error::domain("lacunary decomposition is defined over Z"));
    }
    let mut freqs = l.scalars()?;
    if freqs.iter().any(|&x| x <= 0) {
        return Err(Error::domain("lacunary decomposition needs positive frequencies"));
    }
    freqs.sort_unstable();
    let mut parts: Vec<Vec<i64>> = Vec::new();
    for x in freqs.iter().copied() {
        match parts
            .iter_mut()
            .find(|part| x as f64 >= q * (*part.last().unwrap() as f64))
        {
            Some(part) => part.push(x),
            None => parts.push(vec![x]),
        }
    }
    // Construction guarantees each part is q-lacunary; verify anyway.
    for part in &parts {
        for w in part.windows(2) {
            debug_assert!(w[1] as f64 >= q * w[0] as f64);
            if (w[1] as f64) < q * (w[0] as f64) {
                return Err(Error::CertificateFailure(
                    "first-fit produced a non-lacunary part".into(),
                ));
            }
        }
    }
    // Dyadic block census: x = 1 sits in (1/2, 1]; x ≥ 2 sits in
    // (2^n, 2^{n+1}] with n = ilog2(x − 1).
    let mut blocks: HashMap<i32, usize> = HashMap::new();
    for &x in &freqs {
        let n = if x == 1 { -1 } else { (x - 1).ilog2() as i32 };
        *blocks.entry(n).or_insert(0) += 1;
    }
    let block_bound = blocks.values().copied().max().unwrap_or(0);
    Ok(LacunaryDecomposition {
        parts,
        block_bound,
    })
}
