//! Constant-weight binary code packings: greedy Gilbert–Varshamov families,
//! exact maximum sizes by clique search, and the code-driven route to
//! quasi-independent subsets.

use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::relations::{is_quasi_independent, relation_count, DEFAULT_RELATION_CAP};
use crate::spectrum::FreqSet;
use crate::{Error, Result};

/// A family of m-subsets of {0,..,n-1}, pairwise intersecting in at most k
/// points; words are stored as sorted index vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFamily {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub words: Vec<Vec<usize>>,
    /// True when the construction certifies no further word can be added.
    pub maximal: bool,
}

impl CodeFamily {
    /// Builds a family after checking every invariant: word sizes, index
    /// ranges, sortedness, and the pairwise intersection cap (equivalently
    /// pairwise Hamming distance ≥ 2(m−k)).
    pub fn verified(
        n: usize,
        m: usize,
        k: usize,
        words: Vec<Vec<usize>>,
        maximal: bool,
    ) -> Result<Self> {
        if !(k < m && m < n) {
            return Err(Error::domain(format!(
                "need 0 <= k < m < n, got k={k} m={m} n={n}"
            )));
        }
        if n > 63 {
            return Err(Error::domain("ground sets beyond 63 points are unsupported"));
        }
        let mut masks = Vec::with_capacity(words.len());
        for w in &words {
            if w.len() != m {
                return Err(Error::domain(format!(
                    "word {w:?} has size {} in a weight-{m} family",
                    w.len()
                )));
            }
            let mut mask = 0u64;
            for (i, &x) in w.iter().enumerate() {
                if x >= n {
                    return Err(Error::domain(format!("index {x} outside ground set [{n}]")));
                }
                if i > 0 && w[i - 1] >= x {
                    return Err(Error::domain("word indices must be strictly increasing"));
                }
                mask |= 1 << x;
            }
            masks.push(mask);
        }
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                let overlap = (masks[i] & masks[j]).count_ones() as usize;
                if overlap > k {
                    return Err(Error::domain(format!(
                        "words {i} and {j} intersect in {overlap} > {k} points"
                    )));
                }
            }
        }
        Ok(CodeFamily {
            n,
            m,
            k,
            words,
            maximal,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Candidate order for the greedy construction.
#[derive(Debug, Clone, Serialize)]
pub enum WordOrder {
    /// Every m-subset in increasing mask order — certifies maximality.
    Lex,
    /// Seeded random m-subsets, a bounded number of draws — no maximality.
    Random { seed: u64 },
}

/// Lex mode examines at most this many candidate words before giving up
/// with the partial family; C(24,12) fits, so every n ≤ 24 completes.
const LEX_CANDIDATE_BUDGET: u64 = 3_000_000;
const RANDOM_DRAWS: usize = 2_000;

fn mask_to_word(mut mask: u64) -> Vec<usize> {
    let mut w = Vec::new();
    while mask != 0 {
        let b = mask.trailing_zeros() as usize;
        w.push(b);
        mask &= mask - 1;
    }
    w
}

/// Greedily grows a family of m-subsets of [n] with pairwise intersections
/// ≤ k. In Lex order the result is maximal (every candidate was tried), so
/// its size is a certified lower bound on N(k,m,n) attained by an explicit
/// family; Random order trades the maximality certificate for reach beyond
/// enumerable C(n,m).
pub fn gv_greedy(n: usize, m: usize, k: usize, order: &WordOrder) -> Result<CodeFamily> {
    if !(k < m && m < n) {
        return Err(Error::domain(format!(
            "need 0 <= k < m < n, got k={k} m={m} n={n}"
        )));
    }
    if n > 63 {
        return Err(Error::domain("ground sets beyond 63 points are unsupported"));
    }
    let mut masks: Vec<u64> = Vec::new();
    let admissible =
        |masks: &[u64], cand: u64| masks.iter().all(|w| (w & cand).count_ones() as usize <= k);
    let maximal = match order {
        WordOrder::Lex => {
            // Gosper's hack walks all m-subsets in increasing mask order.
            let mut cand: u64 = (1 << m) - 1;
            let limit: u64 = ((1 << n) - 1) ^ ((1 << (n - m)) - 1);
            let mut examined: u64 = 0;
            loop {
                examined += 1;
                if examined > LEX_CANDIDATE_BUDGET {
                    let words = masks.iter().map(|&w| mask_to_word(w)).collect();
                    let partial = CodeFamily::verified(n, m, k, words, false)?;
                    return Err(Error::CapExceeded {
                        context: format!(
                            "lex enumeration of {n}-choose-{m} words exceeds the {LEX_CANDIDATE_BUDGET} candidate budget"
                        ),
                        partial_count: Some(partial.len() as u128),
                        partial_family: Some(partial),
                    });
                }
                if admissible(&masks, cand) {
                    masks.push(cand);
                }
                if cand == limit {
                    break;
                }
                let c = cand & cand.wrapping_neg();
                let r = cand + c;
                cand = (((r ^ cand) >> 2) / c) | r;
            }
            true
        }
        WordOrder::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut indices: Vec<usize> = (0..n).collect();
            for _ in 0..RANDOM_DRAWS {
                indices.shuffle(&mut rng);
                let cand = indices[..m].iter().fold(0u64, |acc, &i| acc | 1 << i);
                if admissible(&masks, cand) {
                    masks.push(cand);
                }
            }
            false
        }
    };
    let words = masks.iter().map(|&w| mask_to_word(w)).collect();
    CodeFamily::verified(n, m, k, words, maximal)
}

const EXACT_WORD_LIMIT: usize = 5_000;

/// Exact N(k,m,n): the maximum family size, computed as a maximum clique on
/// the compatibility graph of all m-subsets (edges where |s∩t| ≤ k), by
/// branch and bound with greedy-coloring upper bounds.
pub fn exact_n(n: usize, m: usize, k: usize) -> Result<u64> {
    if !(k < m && m < n) {
        return Err(Error::domain(format!(
            "need 0 <= k < m < n, got k={k} m={m} n={n}"
        )));
    }
    if n > 63 {
        return Err(Error::domain("ground sets beyond 63 points are unsupported"));
    }
    let mut count: u128 = 1;
    for j in 0..m as u128 {
        count = count * (n as u128 - j) / (j + 1);
    }
    if count > EXACT_WORD_LIMIT as u128 {
        return Err(Error::cap(
            format!("{n}-choose-{m} = {count} exceeds the exact-search limit {EXACT_WORD_LIMIT}"),
            None,
        ));
    }
    let mut verts: Vec<u64> = Vec::with_capacity(count as usize);
    let mut cand: u64 = (1 << m) - 1;
    let limit: u64 = ((1 << n) - 1) ^ ((1 << (n - m)) - 1);
    loop {
        verts.push(cand);
        if cand == limit {
            break;
        }
        let c = cand & cand.wrapping_neg();
        let r = cand + c;
        cand = (((r ^ cand) >> 2) / c) | r;
    }
    let v = verts.len();
    let stride = (v + 63) / 64;
    let mut adj = vec![0u64; v * stride];
    for i in 0..v {
        for j in i + 1..v {
            if (verts[i] & verts[j]).count_ones() as usize <= k {
                adj[i * stride + j / 64] |= 1 << (j % 64);
                adj[j * stride + i / 64] |= 1 << (i % 64);
            }
        }
    }

    struct Search<'a> {
        adj: &'a [u64],
        stride: usize,
        best: usize,
    }
    impl Search<'_> {
        fn row(&self, v: usize) -> &[u64] {
            &self.adj[v * self.stride..(v + 1) * self.stride]
        }
        fn expand(&mut self, depth: usize, p: &[u64]) {
            let members: Vec<usize> = p
                .iter()
                .enumerate()
                .flat_map(|(w, &bits)| {
                    (0..64)
                        .filter(move |b| bits >> b & 1 == 1)
                        .map(move |b| w * 64 + b)
                })
                .collect();
            if members.is_empty() {
                self.best = self.best.max(depth);
                return;
            }
            // Greedy coloring: a vertex in color class c caps any clique
            // through it at depth + c.
            let mut classes: Vec<Vec<u64>> = Vec::new();
            let mut colored: Vec<(usize, usize)> = Vec::with_capacity(members.len());
            for &u in &members {
                let mut c = 0;
                while c < classes.len() {
                    let cls = &classes[c];
                    let clash = self.row(u)
                        .iter()
                        .zip(cls)
                        .any(|(a, b)| a & b != 0);
                    if !clash {
                        break;
                    }
                    c += 1;
                }
                if c == classes.len() {
                    classes.push(vec![0u64; self.stride]);
                }
                classes[c][u / 64] |= 1 << (u % 64);
                colored.push((u, c + 1));
            }
            let mut live = p.to_vec();
            for &(u, bound) in colored.iter().rev() {
                if depth + bound <= self.best {
                    return;
                }
                let mut next: Vec<u64> = live
                    .iter()
                    .zip(self.row(u))
                    .map(|(a, b)| a & b)
                    .collect();
                next[u / 64] &= !(1 << (u % 64));
                self.expand(depth + 1, &next);
                live[u / 64] &= !(1 << (u % 64));
            }
        }
    }

    let mut all = vec![u64::MAX; stride];
    if v % 64 != 0 {
        all[stride - 1] = (1u64 << (v % 64)) - 1;
    }
    let mut search = Search {
        adj: &adj,
        stride,
        best: 0,
    };
    search.expand(0, &all);
    Ok(search.best as u64)
}

/// Outcome of the code-driven extraction.
#[derive(Debug, Clone, Serialize)]
pub enum CodeExtraction {
    /// Some word t had relation support r_t with |r_t| ≤ k: B = t∖r_t is
    /// quasi-independent with |B| ≥ m−k (re-verified before returning).
    QuasiIndependent {
        subset: FreqSet,
        word_index: usize,
        support: Vec<usize>,
    },
    /// Every word's support exceeded k, so mapping each word to a relation
    /// supported inside it is injective: the family size is a certified
    /// lower bound on the relation count of A (checked numerically here).
    EvidenceExceeded {
        family_size: u128,
        relation_count: u128,
    },
}

/// Runs the packing argument: for each word t of the family (read as index
/// sets into A), grows a relation support r_t ⊆ t by repeatedly finding a
/// nontrivial ±1 relation among the uncovered elements and absorbing its
/// support — the disjoint pieces sum to one relation fully supported on
/// r_t, and at termination t∖r_t carries no relation at all. The first word
/// with |r_t| ≤ k yields the quasi-independent subset B = t∖r_t.
pub fn extract_via_codes(a: &FreqSet, family: &CodeFamily) -> Result<CodeExtraction> {
    if a.len() != family.n {
        return Err(Error::precondition(format!(
            "family ground set [{}] does not match |A| = {}",
            family.n,
            a.len()
        )));
    }
    if family.m > 20 {
        return Err(Error::precondition(
            "relation enumeration within words is limited to weight 20",
        ));
    }
    for (word_index, word) in family.words.iter().enumerate() {
        let mut support: Vec<usize> = Vec::new();
        loop {
            let remaining: Vec<usize> = word
                .iter()
                .copied()
                .filter(|i| !support.contains(i))
                .collect();
            if remaining.is_empty() {
                break;
            }
            let sub = a.subset(&remaining);
            let (qi, witness) = is_quasi_independent(&sub)?;
            if qi {
                break;
            }
            let cert = witness.expect("non-quasi-independent sets carry a witness");
            for (pos, &sign) in cert.signs.iter().enumerate() {
                if sign != 0 {
                    support.push(remaining[pos]);
                }
            }
        }
        if support.len() <= family.k {
            let kept: Vec<usize> = word
                .iter()
                .copied()
                .filter(|i| !support.contains(i))
                .collect();
            let subset = a.subset(&kept);
            let (qi, _) = is_quasi_independent(&subset)?;
            assert!(qi, "extracted subset failed re-verification");
            assert!(
                subset.len() >= family.m - family.k,
                "subset size {} below the m-k = {} guarantee",
                subset.len(),
                family.m - family.k
            );
            support.sort_unstable();
            return Ok(CodeExtraction::QuasiIndependent {
                subset,
                word_index,
                support,
            });
        }
    }
    let report = relation_count(a, DEFAULT_RELATION_CAP, false)?;
    let family_size = family.len() as u128;
    assert!(
        family_size <= report.count,
        "injection argument violated: {} words but only {} relations",
        family_size,
        report.count
    );
    Ok(CodeExtraction::EvidenceExceeded {
        family_size,
        relation_count: report.count,
    })
}

/// Exact binomial coefficient, sized for the counting-bound checks.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for j in 0..k.min(n - k) as u128 {
        out = out * (n as u128 - j) / (j + 1);
    }
    out
}
