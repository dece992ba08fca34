//! Mapping-class-group orbits of ordered tuples of disjoint simple closed
//! curves on a closed genus-g surface, encoded as stable splittings.
//!
//! A splitting is a connected multigraph: vertices are complement components
//! carrying signatures `(g_i, n_i)` (n_i = incident half-edges), edges are
//! the K curve slots in tuple order. Two ordered multicurves lie in the same
//! orbit exactly when their labeled splittings are isomorphic, so
//! enumeration is generation of all admissible labeled graphs up to vertex
//! relabeling. Admissibility:
//!
//!   * Euler constraint  sum 2 g_i = 2g - 2 + 2q - 2K,
//!   * stability         2 g_i - 2 + n_i > 0 for every vertex,
//!   * connectivity,
//!   * no sphere vertex with <= 2 half-edges (those encode inessential or
//!     mutually isotopic curves).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    KOutOfRange { k: u32, max: u32 },
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::KOutOfRange { k, max } => {
                write!(f, "K={k} outside supported range 1..={max}")
            }
        }
    }
}

impl core::error::Error for TopologyError {}

/// Largest tuple size the enumerator accepts.
pub const MAX_K: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StableSplitting {
    /// complement component signatures `(g_i, n_i)`
    pub vertices: Vec<(u32, u32)>,
    /// edge `t` (curve slot `t`) attaches vertices `(a, b)`, `a <= b`
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitInvariants {
    /// number of curve slots that cut off a one-holed torus
    pub m_gamma: u32,
    /// single-vertex splitting (the dominant orbit, complement `(g-K, 2K)`)
    pub is_nonseparating_type: bool,
    /// sorted multiset of complement signatures
    pub complement_signatures: Vec<(u32, u32)>,
    /// number of distinct ordered orbits sharing this unlabeled structure
    pub gluing_multiplicity: u32,
}

impl StableSplitting {
    pub fn num_curves(&self) -> usize {
        self.edges.len()
    }

    /// Canonical form: lexicographic minimum of (vertices, edges) over all
    /// vertex relabelings. Edge labels are fixed (ordered tuples).
    pub fn canonical(&self) -> StableSplitting {
        let q = self.vertices.len();
        let mut best: Option<StableSplitting> = None;
        permute_all(q, &mut |perm| {
            let vertices: Vec<(u32, u32)> = {
                let mut v = alloc::vec![(0u32, 0u32); q];
                for (i, &p) in perm.iter().enumerate() {
                    v[p] = self.vertices[i];
                }
                v
            };
            let edges: Vec<(usize, usize)> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (perm[a], perm[b]);
                    if x <= y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                })
                .collect();
            let cand = StableSplitting { vertices, edges };
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        });
        best.unwrap()
    }

    fn is_connected(&self) -> bool {
        let q = self.vertices.len();
        if q == 0 {
            return false;
        }
        let mut reach = alloc::vec![false; q];
        reach[0] = true;
        loop {
            let mut changed = false;
            for &(a, b) in &self.edges {
                if reach[a] != reach[b] {
                    reach[a] = true;
                    reach[b] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        reach.iter().all(|&r| r)
    }
}

fn permute_all(n: usize, f: &mut impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    heap_permute(&mut perm, n, f);
}

fn heap_permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(perm);
        return;
    }
    for i in 0..k {
        heap_permute(perm, k - 1, f);
        if k.is_multiple_of(2) {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

/// `sum 2 g_i = 2g - 2 + 2q - 2K`
pub fn euler_check(s: &StableSplitting, g: u32) -> bool {
    let q = s.vertices.len() as i64;
    let k = s.edges.len() as i64;
    let total: i64 = s.vertices.iter().map(|&(gi, _)| 2 * gi as i64).sum();
    total == 2 * g as i64 - 2 + 2 * q - 2 * k
}

/// Curve slots cutting off a one-holed torus: edges with an endpoint whose
/// signature is `(1,1)` (its single half-edge is then that edge). Counted
/// once per slot even when both sides are one-handles.
pub fn m_gamma(s: &StableSplitting) -> u32 {
    s.edges
        .iter()
        .filter(|&&(a, b)| s.vertices[a] == (1, 1) || s.vertices[b] == (1, 1))
        .count() as u32
}

/// All orbits of ordered K-tuples of disjoint, pairwise non-isotopic,
/// essential simple closed curves on a closed genus-g surface, with
/// invariants; deterministic order.
pub fn enumerate_orbits(
    g: u32,
    k: u32,
) -> Result<Vec<(StableSplitting, OrbitInvariants)>, TopologyError> {
    if !(1..=MAX_K).contains(&k) || (3 * g as i64 - 3) < k as i64 {
        return Err(TopologyError::KOutOfRange { k, max: MAX_K.min((3 * g).saturating_sub(3)) });
    }
    let mut canon: BTreeSet<StableSplitting> = BTreeSet::new();
    for q in 1..=(k as usize + 1) {
        // genus budget from the Euler constraint
        let budget = g as i64 + q as i64 - k as i64 - 1;
        if budget < 0 {
            continue;
        }
        // all attachments: each edge picks an unordered vertex pair
        let pairs: Vec<(usize, usize)> = (0..q)
            .flat_map(|a| (a..q).map(move |b| (a, b)))
            .collect();
        let mut choice = alloc::vec![0usize; k as usize];
        loop {
            let edges: Vec<(usize, usize)> = choice.iter().map(|&c| pairs[c]).collect();
            let mut degree = alloc::vec![0u32; q];
            for &(a, b) in &edges {
                degree[a] += 1;
                degree[b] += 1;
            }
            if degree.iter().all(|&d| d >= 1) {
                let skeleton = StableSplitting {
                    vertices: degree.iter().map(|&d| (0, d)).collect(),
                    edges: edges.clone(),
                };
                if skeleton.is_connected() {
                    distribute_genus(&degree, budget as u32, &mut |genera| {
                        let vertices: Vec<(u32, u32)> = genera
                            .iter()
                            .zip(&degree)
                            .map(|(&gi, &d)| (gi, d))
                            .collect();
                        // stability: 2g_i - 2 + n_i > 0
                        if vertices
                            .iter()
                            .all(|&(gi, ni)| 2 * gi as i64 - 2 + ni as i64 > 0)
                        {
                            let s = StableSplitting { vertices, edges: edges.clone() };
                            canon.insert(s.canonical());
                        }
                    });
                }
            }
            // odometer over edge attachments
            let mut i = 0;
            loop {
                if i == choice.len() {
                    break;
                }
                choice[i] += 1;
                if choice[i] < pairs.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    }
    let mut out = Vec::new();
    // gluing multiplicity: group canonical splittings by unlabeled structure
    let list: Vec<StableSplitting> = canon.into_iter().collect();
    for s in &list {
        let mult = list
            .iter()
            .filter(|o| unlabeled_key(o) == unlabeled_key(s))
            .count() as u32;
        debug_assert!(euler_check(s, g));
        let mut complement: Vec<(u32, u32)> = s.vertices.clone();
        complement.sort_unstable();
        let inv = OrbitInvariants {
            m_gamma: m_gamma(s),
            is_nonseparating_type: s.vertices.len() == 1,
            complement_signatures: complement,
            gluing_multiplicity: mult,
        };
        if inv.is_nonseparating_type {
            debug_assert_eq!(s.vertices[0], (g - k, 2 * k));
        }
        out.push((s.clone(), inv));
    }
    Ok(out)
}

type UnlabeledKey = (Vec<(u32, u32)>, Vec<(usize, usize)>);

/// Forget edge order: sorted edge list keyed with the vertex multiset.
fn unlabeled_key(s: &StableSplitting) -> UnlabeledKey {
    // canonicalize over vertex permutations with edges as a sorted multiset
    let q = s.vertices.len();
    let mut best: Option<UnlabeledKey> = None;
    permute_all(q, &mut |perm| {
        let mut vertices = alloc::vec![(0u32, 0u32); q];
        for (i, &p) in perm.iter().enumerate() {
            vertices[p] = s.vertices[i];
        }
        let mut edges: Vec<(usize, usize)> = s
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        edges.sort_unstable();
        let cand = (vertices, edges);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    });
    best.unwrap()
}

fn distribute_genus(degree: &[u32], budget: u32, f: &mut impl FnMut(&[u32])) {
    let q = degree.len();
    let mut genera = alloc::vec![0u32; q];
    fn rec(genera: &mut Vec<u32>, idx: usize, remaining: u32, f: &mut impl FnMut(&[u32])) {
        if idx == genera.len() {
            if remaining == 0 {
                f(genera);
            }
            return;
        }
        for gi in 0..=remaining {
            genera[idx] = gi;
            rec(genera, idx + 1, remaining - gi, f);
        }
    }
    rec(&mut genera, 0, budget, f);
}

/// Total length below which a curve system cannot fill: `2 pi sqrt(g(g-1))`.
pub fn filling_length_bound(g: u32) -> f64 {
    2.0 * core::f64::consts::PI * libm::sqrt((g as f64) * (g as f64 - 1.0))
}

/// Every closed hyperbolic surface of genus g has systole at most this:
/// `2 log(4g - 2)`.
pub fn buser_systole_bound(g: u32) -> f64 {
    2.0 * libm::log(4.0 * g as f64 - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn genus_two_single_curve_orbits() {
        let orbits = enumerate_orbits(2, 1).unwrap();
        assert_eq!(orbits.len(), 2);
        let nonsep: Vec<_> = orbits.iter().filter(|(_, i)| i.is_nonseparating_type).collect();
        assert_eq!(nonsep.len(), 1);
        assert_eq!(nonsep[0].0.vertices, vec![(1, 2)]);
        assert_eq!(nonsep[0].1.m_gamma, 0);
        let sep: Vec<_> = orbits.iter().filter(|(_, i)| !i.is_nonseparating_type).collect();
        assert_eq!(sep[0].0.vertices, vec![(1, 1), (1, 1)]);
        assert_eq!(sep[0].1.m_gamma, 1); // counted once per curve slot
    }

    #[test]
    fn single_curve_orbit_counts_match_closed_form() {
        // 1 + floor(g/2): non-separating plus separating {a, g-a}
        for (g, want) in [(2u32, 2usize), (3, 2), (4, 3), (5, 3), (6, 4)] {
            assert_eq!(enumerate_orbits(g, 1).unwrap().len(), want, "g={g}");
        }
    }

    #[test]
    fn nonseparating_complement_signature() {
        for g in 2..=5u32 {
            for k in 1..=2u32 {
                let orbits = enumerate_orbits(g, k).unwrap();
                let gamma0: Vec<_> =
                    orbits.iter().filter(|(_, i)| i.is_nonseparating_type).collect();
                assert_eq!(gamma0.len(), 1, "g={g} K={k}");
                assert_eq!(gamma0[0].0.vertices, vec![(g - k, 2 * k)]);
                assert_eq!(gamma0[0].1.m_gamma, 0);
            }
        }
    }

    #[test]
    fn genus_three_pair_cutting_off_one_handle() {
        // vertices (1,1) and (1,3); the slot bounding the one-handle counts,
        // the slot internal to the (1,3) side does not; the two labelings
        // are distinct ordered orbits
        let orbits = enumerate_orbits(3, 2).unwrap();
        let with_handle: Vec<_> = orbits
            .iter()
            .filter(|(s, _)| {
                let mut v = s.vertices.clone();
                v.sort_unstable();
                v == vec![(1, 1), (1, 3)]
            })
            .collect();
        assert_eq!(with_handle.len(), 2);
        for (_, inv) in &with_handle {
            assert_eq!(inv.m_gamma, 1);
            assert_eq!(inv.gluing_multiplicity, 2);
        }
    }

    #[test]
    fn euler_identity_spot_checks() {
        let sep = StableSplitting { vertices: vec![(1, 1), (1, 1)], edges: vec![(0, 1)] };
        assert!(euler_check(&sep, 2));
        let nonsep = StableSplitting { vertices: vec![(1, 2)], edges: vec![(0, 0)] };
        assert!(euler_check(&nonsep, 2));
        let wrong = StableSplitting { vertices: vec![(2, 1), (1, 1)], edges: vec![(0, 1)] };
        assert!(!euler_check(&wrong, 2));
    }

    #[test]
    fn every_emitted_orbit_is_admissible() {
        for g in 2..=4u32 {
            for k in 1..=2u32 {
                for (s, _) in enumerate_orbits(g, k).unwrap() {
                    assert!(euler_check(&s, g));
                    assert!(s.is_connected());
                    assert!(s
                        .vertices
                        .iter()
                        .all(|&(gi, ni)| 2 * gi as i64 - 2 + ni as i64 > 0));
                    let total_half_edges: u32 = s.vertices.iter().map(|&(_, n)| n).sum();
                    assert_eq!(total_half_edges, 2 * k);
                }
            }
        }
    }

    #[test]
    fn k_out_of_range() {
        assert!(enumerate_orbits(2, 0).is_err());
        assert!(enumerate_orbits(2, 5).is_err());
        assert!(enumerate_orbits(1, 1).is_err()); // 3g-3 = 0 < 1
    }

    #[test]
    fn bounds_formulas() {
        assert!((filling_length_bound(2) - 8.885765876316732).abs() < 1e-12);
        assert_eq!(filling_length_bound(1), 0.0);
        assert!((buser_systole_bound(2) - 2.0 * libm::log(6.0)).abs() < 1e-15);
        assert!((buser_systole_bound(10) - 2.0 * libm::log(38.0)).abs() < 1e-15);
        for g in 2..10 {
            assert!(filling_length_bound(g + 1) > filling_length_bound(g));
            assert!(buser_systole_bound(g + 1) > buser_systole_bound(g));
        }
    }
}
