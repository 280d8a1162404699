//! Permutation and Brauer (perfect matching) diagrams, their cycle-count
//! generating functions, the averaged tensors `X_d`, and a brute-force
//! contraction of those tensors over a graph.
//!
//! A diagram on `d` strands has `d` upper endpoints (indices `α_1..α_d`) and
//! `d` lower endpoints (`β_1..β_d`). Permutations wire every upper endpoint to
//! a lower one; matchings may also pair two upper endpoints (a cup) or two
//! lower ones (a cap). Closing each upper endpoint `j` onto lower endpoint
//! `j` gives the trace, `k^{loops}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{GraphKind, GraphRef};
use crate::scalar::Scalar;

pub fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// `n!! = n (n-2) (n-4) ...`, with `0!! = 1`.
pub fn double_factorial(n: u64) -> BigUint {
    (1..=n).rev().step_by(2).map(BigUint::from).product()
}

/// `k (k+1) ... (k+d-1) = (k+d-1)! / (k-1)!`.
pub fn rising_factorial(k: u64, d: u64) -> BigUint {
    (0..d).map(|i| BigUint::from(k + i)).product()
}

/// `k (k+2) ... (k+2d-2) = (k+2d-2)!! / (k-2)!!`.
pub fn rising_double_factorial(k: u64, d: u64) -> BigUint {
    (0..d).map(|i| BigUint::from(k + 2 * i)).product()
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    num_integer::binomial(BigUint::from(n), BigUint::from(r))
}

/// All permutations of `0..d` as image arrays, in lexicographic order.
pub(crate) fn lex_permutations(d: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..d).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..d).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// All perfect matchings of `0..size` as partner arrays. The lowest unmatched
/// point is paired with each remaining point in increasing order, so the
/// list is sorted by that sequence of choices.
pub(crate) fn canonical_matchings(size: usize) -> Vec<Vec<usize>> {
    fn extend(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(first) = partner.iter().position(|&p| p == usize::MAX) else {
            out.push(partner.clone());
            return;
        };
        for other in first + 1..partner.len() {
            if partner[other] != usize::MAX {
                continue;
            }
            partner[first] = other;
            partner[other] = first;
            extend(partner, out);
            partner[first] = usize::MAX;
            partner[other] = usize::MAX;
        }
    }
    let mut out = Vec::new();
    if size % 2 == 0 {
        extend(&mut vec![usize::MAX; size], &mut out);
    }
    out
}

fn count_cycles(next: impl Fn(usize) -> usize, len: usize) -> usize {
    let mut seen = vec![false; len];
    let mut cycles = 0;
    for start in 0..len {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = next(i);
        }
    }
    cycles
}

/// Operator permuting the `d` tensor factors: upper endpoint `π(ℓ)` is wired
/// to lower endpoint `ℓ`, so its entries are `∏_ℓ δ(α_{π(ℓ)}, β_ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationDiagram {
    image: Vec<usize>,
}

impl PermutationDiagram {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "{image:?} is not a permutation"
                )));
            }
        }
        Ok(PermutationDiagram { image })
    }

    pub fn identity(d: usize) -> Self {
        PermutationDiagram {
            image: (0..d).collect(),
        }
    }

    /// `τ_{ij}` on `d` strands.
    pub fn transposition(d: usize, i: usize, j: usize) -> Self {
        let mut image: Vec<usize> = (0..d).collect();
        image.swap(i, j);
        PermutationDiagram { image }
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Cycles of `π`, fixed points included; the trace is `k^{cycle_count}`.
    pub fn cycle_count(&self) -> usize {
        count_cycles(|i| self.image[i], self.image.len())
    }

    /// Kronecker-delta entry at upper indices `upper` and lower indices `lower`.
    pub fn entry(&self, upper: &[usize], lower: &[usize]) -> bool {
        self.image
            .iter()
            .enumerate()
            .all(|(l, &p)| upper[p] == lower[l])
    }

    pub fn to_matching(&self) -> MatchingDiagram {
        let d = self.size();
        let mut partner = vec![0; 2 * d];
        for (l, &p) in self.image.iter().enumerate() {
            partner[p] = d + l;
            partner[d + l] = p;
        }
        MatchingDiagram { d, partner }
    }
}

impl fmt::Display for PermutationDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Brauer diagram: a perfect matching of `2d` endpoints, where `0..d` are the
/// upper endpoints and `d..2d` the lower ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchingDiagram {
    d: usize,
    partner: Vec<usize>,
}

impl MatchingDiagram {
    pub fn new(d: usize, partner: Vec<usize>) -> Result<Self> {
        let ok = partner.len() == 2 * d
            && partner
                .iter()
                .enumerate()
                .all(|(i, &p)| p < 2 * d && p != i && partner[p] == i);
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "{partner:?} is not a perfect matching of {} points",
                2 * d
            )));
        }
        Ok(MatchingDiagram { d, partner })
    }

    pub fn identity(d: usize) -> Self {
        PermutationDiagram::identity(d).to_matching()
    }

    /// The cupcap `γ_{ij} = δ^{α_i α_j} δ_{β_i β_j}`, identity on the other strands.
    pub fn cupcap(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::identity(d);
        m.partner[i] = j;
        m.partner[j] = i;
        m.partner[d + i] = d + j;
        m.partner[d + j] = d + i;
        m
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn partner(&self) -> &[usize] {
        &self.partner
    }

    /// Loops after closing upper endpoint `j` onto lower endpoint `j`.
    pub fn loop_count(&self) -> usize {
        let d = self.d;
        let close = |p: usize| if p < d { p + d } else { p - d };
        let mut seen = vec![false; 2 * d];
        let mut loops = 0;
        for start in 0..2 * d {
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut p = start;
            loop {
                seen[p] = true;
                let q = self.partner[p];
                seen[q] = true;
                p = close(q);
                if p == start {
                    break;
                }
            }
        }
        loops
    }

    pub fn is_permutation(&self) -> bool {
        (0..self.d).all(|i| self.partner[i] >= self.d)
    }

    pub fn entry(&self, upper: &[usize], lower: &[usize]) -> bool {
        let value = |p: usize| {
            if p < self.d {
                upper[p]
            } else {
                lower[p - self.d]
            }
        };
        (0..2 * self.d).all(|p| value(p) == value(self.partner[p]))
    }
}

impl fmt::Display for MatchingDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |p: usize| {
            if p < self.d {
                format!("u{p}")
            } else {
                format!("l{}", p - self.d)
            }
        };
        let pairs: Vec<String> = (0..2 * self.d)
            .filter(|&p| p < self.partner[p])
            .map(|p| format!("{}-{}", name(p), name(self.partner[p])))
            .collect();
        write!(f, "{{{}}}", pairs.join(" "))
    }
}

fn check_degree(d: usize, limit: usize, what: &'static str) -> Result<()> {
    if d > limit {
        return Err(Error::guard(what, d as u64, limit as u64));
    }
    Ok(())
}

/// All of `S_d`, in lexicographic order of image arrays.
pub fn enumerate_permutations(
    d: usize,
    budget: &Budget,
) -> Result<impl ExactSizeIterator<Item = PermutationDiagram>> {
    check_degree(d, budget.permutation_degree, "permutation degree")?;
    Ok(lex_permutations(d)
        .into_iter()
        .map(|image| PermutationDiagram { image }))
}

/// All perfect matchings of `2d` endpoints, `(2d-1)!!` of them.
pub fn enumerate_matchings(
    d: usize,
    budget: &Budget,
) -> Result<impl ExactSizeIterator<Item = MatchingDiagram>> {
    check_degree(d, budget.matching_degree, "matching degree")?;
    Ok(canonical_matchings(2 * d)
        .into_iter()
        .map(move |partner| MatchingDiagram { d, partner }))
}

/// One term of a telescoping product expansion, with the number of identity
/// factors chosen along the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopedTerm<D> {
    pub diagram: D,
    pub identity_factors: usize,
}

/// Expands `1 (1 + τ_{1,2}) (1 + τ_{1,3} + τ_{2,3}) ... (1 + τ_{1,d} + ... + τ_{d-1,d})`
/// term by term.
///
/// Step `t` extends a permutation of the first `t - 1` strands by a fixed
/// point, or composes it with the transposition of strand `t` and an
/// earlier strand `i`.
pub fn telescoping_permutations(
    d: usize,
    budget: &Budget,
) -> Result<Vec<TelescopedTerm<PermutationDiagram>>> {
    check_degree(d, budget.permutation_degree, "permutation degree")?;
    let mut terms = vec![TelescopedTerm {
        diagram: PermutationDiagram { image: Vec::new() },
        identity_factors: 0,
    }];
    for s in 0..d {
        let mut next = Vec::with_capacity(terms.len() * (s + 1));
        for term in &terms {
            let mut image = term.diagram.image.clone();
            image.push(s);
            next.push(TelescopedTerm {
                diagram: PermutationDiagram {
                    image: image.clone(),
                },
                identity_factors: term.identity_factors + 1,
            });
            for i in 0..s {
                let swapped = image
                    .iter()
                    .map(|&p| {
                        if p == i {
                            s
                        } else if p == s {
                            i
                        } else {
                            p
                        }
                    })
                    .collect();
                next.push(TelescopedTerm {
                    diagram: PermutationDiagram { image: swapped },
                    identity_factors: term.identity_factors,
                });
            }
        }
        terms = next;
    }
    Ok(terms)
}

/// Matching analogue of [`telescoping_permutations`]: each factor is
/// `1 + τ_{1,t} + γ_{1,t} + ... + τ_{t-1,t} + γ_{t-1,t}`.
///
/// Upper endpoint `t` either joins lower endpoint `t` (identity), or takes
/// over an earlier lower endpoint `i` (transposition) or an earlier upper
/// endpoint `i` (cupcap); the endpoint's former partner is then attached to
/// lower endpoint `t`.
pub fn telescoping_matchings(
    d: usize,
    budget: &Budget,
) -> Result<Vec<TelescopedTerm<MatchingDiagram>>> {
    check_degree(d, budget.matching_degree, "matching degree")?;
    let mut terms = vec![TelescopedTerm {
        diagram: MatchingDiagram {
            d: 0,
            partner: Vec::new(),
        },
        identity_factors: 0,
    }];
    for s in 0..d {
        let size = s + 1;
        let upper = |i: usize| i;
        let lower = |i: usize| size + i;
        let mut next = Vec::with_capacity(terms.len() * (2 * s + 1));
        for term in &terms {
            // Re-index the old lower endpoints s + i to size + i.
            let old = &term.diagram.partner;
            let lift = |p: usize| if p < s { p } else { p + 1 };
            let mut base = vec![usize::MAX; 2 * size];
            for (p, &q) in old.iter().enumerate() {
                base[lift(p)] = lift(q);
            }
            let mut identity = base.clone();
            identity[upper(s)] = lower(s);
            identity[lower(s)] = upper(s);
            next.push(TelescopedTerm {
                diagram: MatchingDiagram {
                    d: size,
                    partner: identity,
                },
                identity_factors: term.identity_factors + 1,
            });
            for i in 0..s {
                for taken in [lower(i), upper(i)] {
                    let mut partner = base.clone();
                    let former = partner[taken];
                    partner[upper(s)] = taken;
                    partner[taken] = upper(s);
                    partner[lower(s)] = former;
                    partner[former] = lower(s);
                    next.push(TelescopedTerm {
                        diagram: MatchingDiagram { d: size, partner },
                        identity_factors: term.identity_factors,
                    });
                }
            }
        }
        terms = next;
    }
    Ok(terms)
}

/// `Σ_{π ∈ S_d} k^{c(π)}` by enumerating `S_d`.
pub fn cycle_genfunc_permutations(d: usize, k: u64, budget: &Budget) -> Result<BigUint> {
    let k = BigUint::from(k);
    Ok(enumerate_permutations(d, budget)?
        .map(|p| k.pow(p.cycle_count() as u32))
        .sum())
}

/// `Σ_{μ ∈ M_d} k^{c(μ)}` by enumerating the matchings and counting loops.
pub fn cycle_genfunc_matchings(d: usize, k: u64, budget: &Budget) -> Result<BigUint> {
    let k = BigUint::from(k);
    Ok(enumerate_matchings(d, budget)?
        .map(|m| k.pow(m.loop_count() as u32))
        .sum())
}

/// Distribution of the random vectors `x_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// Uniform on the unit sphere of `C^k`.
    ComplexSphere,
    /// Uniform on the unit sphere of `R^k`.
    RealSphere,
    /// Circularly-symmetric complex Gaussian with `E|x_i|^2 = 1/k`.
    ComplexGaussian,
    /// Real Gaussian with variance `1/k` per component.
    RealGaussian,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] = [
        Ensemble::ComplexSphere,
        Ensemble::RealSphere,
        Ensemble::ComplexGaussian,
        Ensemble::RealGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::ComplexSphere => "complex-sphere",
            Ensemble::RealSphere => "real-sphere",
            Ensemble::ComplexGaussian => "complex-gaussian",
            Ensemble::RealGaussian => "real-gaussian",
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Ensemble::ComplexSphere | Ensemble::ComplexGaussian)
    }

    pub fn is_gaussian(self) -> bool {
        matches!(self, Ensemble::ComplexGaussian | Ensemble::RealGaussian)
    }

    /// Complex vectors go with directed graphs, real vectors with undirected.
    pub fn graph_kind(self) -> GraphKind {
        if self.is_complex() {
            GraphKind::Directed
        } else {
            GraphKind::Undirected
        }
    }

    pub(crate) fn check_kind(self, kind: GraphKind) -> Result<()> {
        if self.graph_kind() == kind {
            Ok(())
        } else {
            Err(Error::EnsembleMismatch {
                ensemble: self.name(),
                kind: kind.as_str(),
            })
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown ensemble {s:?}")))
    }
}

/// The scalar `a` with `X_d = E[|x^{⊗d}⟩⟨x^{⊗d}|] = a · Σ diagrams`, summing
/// permutations for complex ensembles and matchings for real ones.
///
/// Panics if `k == 0`.
pub fn xd_scaling<S: Scalar>(d: usize, k: u64, ensemble: Ensemble) -> S {
    assert!(k >= 1, "dimension k must be at least 1");
    let d = d as u64;
    let one = BigUint::one();
    let denom = match ensemble {
        Ensemble::ComplexSphere => rising_factorial(k, d),
        Ensemble::RealSphere => rising_double_factorial(k, d),
        Ensemble::ComplexGaussian | Ensemble::RealGaussian => BigUint::from(k).pow(d as u32),
    };
    S::ratio(&one, &denom)
}

/// Diagrams whose sum, scaled by [`xd_scaling`], is `X_d` for `ensemble`.
fn xd_diagrams(d: usize, ensemble: Ensemble, budget: &Budget) -> Result<Vec<MatchingDiagram>> {
    if ensemble.is_complex() {
        Ok(enumerate_permutations(d, budget)?
            .map(|p| p.to_matching())
            .collect())
    } else {
        Ok(enumerate_matchings(d, budget)?.collect())
    }
}

/// Entry of `X_d` at the given upper and lower indices.
pub fn xd_entry<S: Scalar>(
    k: u64,
    ensemble: Ensemble,
    upper: &[usize],
    lower: &[usize],
    budget: &Budget,
) -> Result<S> {
    if upper.len() != lower.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} upper and {} lower indices",
            upper.len(),
            lower.len()
        )));
    }
    let d = upper.len();
    let hits = xd_diagrams(d, ensemble, budget)?
        .iter()
        .filter(|m| m.entry(upper, lower))
        .count();
    Ok(xd_scaling::<S>(d, k, ensemble) * S::from_u64(hits as u64))
}

/// Edges feeding the upper and lower index slots of one vertex tensor.
struct VertexSlots {
    diagrams: usize,
    edges: Vec<usize>,
}

/// `q(G;k)` by summing over all `k^m` assignments of an index to each edge
/// the product of the `X_{d_v}` entries at every vertex.
///
/// Directed: a vertex's upper indices are its incoming edges and its lower
/// indices its outgoing edges, both in edge order. Undirected: the first
/// half of the incident half-edges (by id) are upper, the rest lower.
pub fn contract_q_exact<'a, S: Scalar>(
    g: impl Into<GraphRef<'a>>,
    k: u64,
    ensemble: Ensemble,
    budget: &Budget,
) -> Result<S> {
    let g = g.into();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    ensemble.check_kind(g.kind())?;
    g.require_eulerian()?;
    let m = g.edge_count();
    let assignments = BigUint::from(k).pow(m as u32);
    if assignments > BigUint::from(budget.contraction) {
        return Err(Error::guard(
            "tensor contraction",
            assignments,
            budget.contraction,
        ));
    }
    let total = assignments.to_u64().expect("guarded");

    let mut diagram_sets: HashMap<usize, Vec<MatchingDiagram>> = HashMap::new();
    let mut vertices = Vec::new();
    let mut scaling = S::one();
    for v in 0..g.vertex_count() {
        let edges: Vec<usize> = match g {
            GraphRef::Directed(dg) => dg
                .in_edges(v)
                .iter()
                .chain(dg.out_edges(v))
                .copied()
                .collect(),
            GraphRef::Undirected(ug) => ug.half_edges_at(v).iter().map(|h| h / 2).collect(),
        };
        let d = edges.len() / 2;
        if !diagram_sets.contains_key(&d) {
            diagram_sets.insert(d, xd_diagrams(d, ensemble, budget)?);
        }
        scaling = scaling * xd_scaling::<S>(d, k, ensemble);
        vertices.push(VertexSlots { diagrams: d, edges });
    }

    let k_us = k as usize;
    let chunk = 1u64 << 12;
    let ranges: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, chunk.min(total - c * chunk)))
        .collect();

    let sum_range = |&(start, len): &(u64, u64)| -> BigUint {
        let mut caches: Vec<HashMap<Vec<usize>, u64>> = vec![HashMap::new(); vertices.len()];
        let mut index = vec![0usize; m];
        let mut rest = start;
        for slot in index.iter_mut() {
            *slot = (rest % k) as usize;
            rest /= k;
        }
        let mut local = Vec::new();
        let mut acc: u128 = 0;
        let mut big = BigUint::default();
        for _ in 0..len {
            let mut product: u128 = 1;
            for (vs, cache) in vertices.iter().zip(caches.iter_mut()) {
                local.clear();
                local.extend(vs.edges.iter().map(|&e| index[e]));
                let hits = match cache.get(&local) {
                    Some(&h) => h,
                    None => {
                        let d = vs.diagrams;
                        let (upper, lower) = local.split_at(d);
                        let h = diagram_sets[&d]
                            .iter()
                            .filter(|m| m.entry(upper, lower))
                            .count() as u64;
                        cache.insert(local.clone(), h);
                        h
                    }
                };
                product = product.saturating_mul(hits as u128);
                if product == 0 {
                    break;
                }
            }
            assert!(product < u128::MAX, "entry product overflowed u128");
            match acc.checked_add(product) {
                Some(next) => acc = next,
                None => {
                    big += acc;
                    acc = product;
                }
            }
            for slot in index.iter_mut() {
                *slot += 1;
                if *slot < k_us {
                    break;
                }
                *slot = 0;
            }
        }
        big + acc
    };

    let partials: Vec<BigUint> = budget.install(|| ranges.par_iter().map(sum_range).collect());
    let sum: BigUint = partials.into_iter().sum();
    Ok(scaling * S::from_biguint(&sum))
}
