//! Partial duality and surface-level invariants.
//!
//! The partial dual along an edge set `A` re-reads the presentation with the
//! edges of `A` "turned inside out": its circles are the closed walks of the
//! state that smooths `A` white and everything else black, and every passage
//! through an edge becomes an arrow on the new circle. Directions are
//! inherited from the edge-disc boundary orientation fixed by the stored
//! arrow pair, so the construction is deterministic: the dual along the empty
//! set reproduces the input, the dual along the full edge set is the
//! geometric dual, and duals compose by symmetric difference.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arrow::{ArrowOccurrence, ArrowPresentation, Circle, EdgeLabel, EdgeSubset};
use crate::trace::{StateCircles, TransitionSystem};

/// The partial dual of `ap` along the edges in `sites`.
pub fn partial_dual(ap: &ArrowPresentation, sites: &EdgeSubset) -> ArrowPresentation {
    let ts = TransitionSystem::new(ap);
    partial_dual_with(&ts, sites)
}

/// Partial dual given a prebuilt transition system (cheaper inside subset
/// sweeps).
pub fn partial_dual_with(ts: &TransitionSystem, sites: &EdgeSubset) -> ArrowPresentation {
    dual_from_state(ts, &ts.state_circles(sites))
}

pub(crate) fn partial_dual_mask(ts: &TransitionSystem, mask: u64) -> ArrowPresentation {
    dual_from_state(ts, &ts.state_circles_mask(mask))
}

/// Convert traced state circles into the dual presentation: each walk becomes
/// a circle, each edge passage an arrow pointing with or against the edge's
/// boundary orientation. Isolated walks stay isolated vertices.
fn dual_from_state(ts: &TransitionSystem, state: &StateCircles) -> ArrowPresentation {
    let circles = state
        .circles
        .iter()
        .enumerate()
        .map(|(i, walk)| {
            let arrows = walk
                .steps()
                .iter()
                .map(|step| {
                    let forward = step
                        .site
                        .forward()
                        .expect("states smooth black/white only, so passages are adjacent");
                    ArrowOccurrence { label: ts.label(step.site.edge).clone(), forward }
                })
                .collect();
            Circle::new(format!("C{}", i + 1), arrows)
        })
        .collect();
    ArrowPresentation::from_circles(circles)
}

/// The geometric dual: partial dual along every edge.
pub fn geometric_dual(ap: &ArrowPresentation) -> ArrowPresentation {
    partial_dual(ap, &ap.edge_labels().into_iter().collect())
}

/// Union-find with parity: tracks whether two circles are traversed with the
/// same or opposite orientation in a consistent global orientation.
struct ParityDsu {
    parent: Vec<usize>,
    /// Parity of the edge to the parent.
    parity: Vec<u8>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu { parent: (0..n).collect(), parity: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, u8) {
        if self.parent[x] == x {
            return (x, 0);
        }
        let (root, parent_parity) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.parity[x] ^= parent_parity;
        (root, self.parity[x])
    }

    /// Impose `parity(a) ^ parity(b) == rel`; false when this contradicts
    /// earlier constraints.
    fn union(&mut self, a: usize, b: usize, rel: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rel;
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ rel;
        true
    }
}

/// Orientability of the ribbon surface. Each circle gets an orientation bit;
/// an edge whose two arrows have equal flags forces its endpoints to the same
/// bit, unequal flags to opposite bits (loops with unequal flags are
/// immediately non-orientable). The surface is orientable exactly when the
/// constraints are satisfiable.
pub fn is_orientable(ap: &ArrowPresentation) -> bool {
    let ts = TransitionSystem::new(ap);
    let mut dsu = ParityDsu::new(ap.vertex_count());
    for edge in 0..ts.edge_count() {
        let [(c1, p1), (c2, p2)] = ts.edge_occurrences(edge);
        let f1 = ap.circles()[c1].arrows[p1].forward;
        let f2 = ap.circles()[c2].arrows[p2].forward;
        if !dsu.union(c1, c2, u8::from(f1 != f2)) {
            return false;
        }
    }
    true
}

/// Surface invariants of the ribbon graph, per connected component summed.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct SurfaceInvariants {
    pub vertices: usize,
    pub edges: usize,
    pub boundary_components: usize,
    /// V − E + F over the whole surface.
    pub euler_characteristic: i64,
    pub orientable: bool,
    /// Sum over components of the orientable genus `(2 − χ)/2` for
    /// orientable components and the Euler (crosscap) genus `2 − χ` for
    /// non-orientable ones; `orientable` says which reading applies when the
    /// surface is connected.
    pub genus: u64,
    pub components: usize,
}

pub fn surface_invariants(ap: &ArrowPresentation) -> SurfaceInvariants {
    let ts = TransitionSystem::new(ap);
    let graph = ap.underlying_graph();
    let component_of = graph.components();
    let components = component_of.iter().copied().max().map_or(0, |m| m + 1);

    let mut vertices = vec![0i64; components];
    let mut edges = vec![0i64; components];
    let mut faces = vec![0i64; components];
    for component in &component_of {
        vertices[*component] += 1;
    }
    for (_, a, _) in &graph.edges {
        edges[component_of[*a]] += 1;
    }
    for walk in &ts.boundary_components().circles {
        faces[component_of[walk.any_gap().circle]] += 1;
    }

    let mut orientable = vec![true; components];
    let mut dsu = ParityDsu::new(ap.vertex_count());
    for edge in 0..ts.edge_count() {
        let [(c1, p1), (c2, p2)] = ts.edge_occurrences(edge);
        let f1 = ap.circles()[c1].arrows[p1].forward;
        let f2 = ap.circles()[c2].arrows[p2].forward;
        if !dsu.union(c1, c2, u8::from(f1 != f2)) {
            orientable[component_of[c1]] = false;
        }
    }

    let mut genus = 0u64;
    for component in 0..components {
        let chi = vertices[component] - edges[component] + faces[component];
        debug_assert!(chi <= 2, "χ of a connected ribbon surface is at most 2");
        genus += if orientable[component] {
            debug_assert_eq!((2 - chi) % 2, 0, "orientable components have even 2−χ");
            ((2 - chi) / 2) as u64
        } else {
            (2 - chi) as u64
        };
    }

    SurfaceInvariants {
        vertices: ap.vertex_count(),
        edges: graph.edges.len(),
        boundary_components: faces.iter().sum::<i64>() as usize,
        euler_characteristic: vertices.iter().sum::<i64>() - edges.iter().sum::<i64>()
            + faces.iter().sum::<i64>(),
        orientable: orientable.iter().all(|&o| o),
        genus,
        components,
    }
}

/// Canonical text of a presentation under everything that does not change
/// the labelled ribbon graph: per-circle rotation, per-circle reversal with
/// flag flips, flipping both arrows of a label, circle reordering, and circle
/// renaming. Labels are never permuted, so two presentations have equal
/// normal forms exactly when they present the same graph with the same edge
/// names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct NormalForm(String);

impl NormalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Token = (EdgeLabel, bool);

/// Lexicographically least rotation of `tokens` or of its reversal-with-flips,
/// by explicit comparison (sequences here are tiny).
fn canonical_cycle(tokens: &[Token]) -> Vec<Token> {
    let n = tokens.len();
    if n == 0 {
        return Vec::new();
    }
    let reversed: Vec<Token> = tokens.iter().rev().map(|(l, f)| (l.clone(), !f)).collect();
    let mut best: Option<Vec<Token>> = None;
    for sequence in [tokens, reversed.as_slice()] {
        for start in 0..n {
            let candidate: Vec<Token> =
                (0..n).map(|i| sequence[(start + i) % n].clone()).collect();
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
    }
    best.unwrap()
}

pub fn normal_form(ap: &ArrowPresentation) -> NormalForm {
    let labels = ap.edge_labels();
    assert!(
        labels.len() <= 24,
        "normal form enumerates 2^edge_count label flips; {} edges is past desk scale",
        labels.len()
    );
    let mut best: Option<Vec<Vec<Token>>> = None;
    for flip_mask in 0u64..1 << labels.len() {
        let flipped: BTreeSet<&EdgeLabel> = labels
            .iter()
            .enumerate()
            .filter(|(i, _)| flip_mask >> i & 1 == 1)
            .map(|(_, l)| l)
            .collect();
        let mut bodies: Vec<Vec<Token>> = ap
            .circles()
            .iter()
            .map(|circle| {
                let tokens: Vec<Token> = circle
                    .arrows
                    .iter()
                    .map(|a| (a.label.clone(), a.forward ^ flipped.contains(&a.label)))
                    .collect();
                canonical_cycle(&tokens)
            })
            .collect();
        bodies.sort();
        if best.as_ref().is_none_or(|b| bodies < *b) {
            best = Some(bodies);
        }
    }
    let mut text = String::new();
    for (i, body) in best.unwrap_or_default().iter().enumerate() {
        text.push_str(&format!("C{}:", i + 1));
        for (label, forward) in body {
            text.push_str(&format!(" {label}{}", if *forward { '+' } else { '-' }));
        }
        text.push('\n');
    }
    NormalForm(text)
}

/// How to choose the `(A, B)` pairs for [`check_dual_identities`].
#[derive(Clone, Copy, Debug)]
pub enum PairSelection {
    /// Every pair of edge subsets — `4^edge_count` of them, so keep the edge
    /// count small.
    Exhaustive,
    /// `pairs` pseudo-random pairs drawn deterministically from `seed`.
    Sample { pairs: usize, seed: u64 },
}

/// Outcome of the duality identity sweep on one presentation.
#[derive(Clone, Debug, Serialize)]
pub struct DualIdentityReport {
    pub pairs_checked: usize,
    pub exact_matches: usize,
    /// Pairs where `(G^A)^B` and `G^{A Δ B}` differ as normal forms but agree
    /// on every surface invariant. Normal-form equality is strictly finer
    /// than surface homeomorphism, so these are reported separately instead
    /// of as failures; the expectation is that the list stays empty.
    pub invariants_only: Vec<(EdgeSubset, EdgeSubset)>,
    /// Pairs where even the surface invariants disagree — hard failures.
    pub mismatches: Vec<(EdgeSubset, EdgeSubset)>,
    /// `G^∅` reproduces the input presentation.
    pub empty_set_identity: bool,
    /// `is_orientable(G^A) == is_orientable(G)` for every `A` checked.
    pub orientability_invariant: bool,
    /// `F(G)` equals the number of state circles of `(G^A, A^c)` for every
    /// `A` checked.
    pub boundary_count_identity: bool,
    /// `genus(G^E) == genus(G)`.
    pub dual_genus_equal: bool,
}

impl DualIdentityReport {
    /// Strict pass: exact normal-form agreement everywhere plus all side
    /// identities.
    pub fn all_pass(&self) -> bool {
        self.mismatches.is_empty()
            && self.invariants_only.is_empty()
            && self.empty_set_identity
            && self.orientability_invariant
            && self.boundary_count_identity
            && self.dual_genus_equal
    }
}

/// Check the composition law `(G^A)^B = G^{A Δ B}` (under normal form) plus
/// the orientability, boundary-count, and genus identities.
pub fn check_dual_identities(ap: &ArrowPresentation, selection: PairSelection) -> DualIdentityReport {
    let ts = TransitionSystem::new(ap);
    let edge_count = ts.edge_count();
    assert!(edge_count < 64, "subset masks are u64");
    let subsets: u64 = 1 << edge_count;

    let pairs: Vec<(u64, u64)> = match selection {
        PairSelection::Exhaustive => {
            (0..subsets).flat_map(|a| (0..subsets).map(move |b| (a, b))).collect()
        }
        PairSelection::Sample { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..pairs).map(|_| (rng.random_range(0..subsets), rng.random_range(0..subsets))).collect()
        }
    };

    // Normal forms of G^C, memoized: the right-hand side A Δ B revisits the
    // same subsets many times.
    let mut direct_normal_form: HashMap<u64, NormalForm> = HashMap::new();
    let mut direct = |mask: u64, ts: &TransitionSystem| -> NormalForm {
        direct_normal_form
            .entry(mask)
            .or_insert_with(|| normal_form(&partial_dual_mask(ts, mask)))
            .clone()
    };

    let base_invariants = surface_invariants(ap);
    let mut report = DualIdentityReport {
        pairs_checked: pairs.len(),
        exact_matches: 0,
        invariants_only: Vec::new(),
        mismatches: Vec::new(),
        empty_set_identity: partial_dual_mask(&ts, 0).representation_eq(ap),
        orientability_invariant: true,
        boundary_count_identity: true,
        dual_genus_equal: surface_invariants(&geometric_dual(ap)).genus == base_invariants.genus,
    };

    let mut seen_first: BTreeMap<u64, ArrowPresentation> = BTreeMap::new();
    for &(a, b) in &pairs {
        let first = seen_first.entry(a).or_insert_with(|| partial_dual_mask(&ts, a)).clone();
        let first_ts = TransitionSystem::new(&first);
        let double = partial_dual_mask(&first_ts, b);
        let lhs = normal_form(&double);
        let rhs = direct(a ^ b, &ts);
        if lhs == rhs {
            report.exact_matches += 1;
        } else if surface_invariants(&double)
            == surface_invariants(&partial_dual_mask(&ts, a ^ b))
        {
            report.invariants_only.push((ts.subset_from_mask(a), ts.subset_from_mask(b)));
        } else {
            report.mismatches.push((ts.subset_from_mask(a), ts.subset_from_mask(b)));
        }
    }

    // Orientability and boundary-count identities over every A that appeared
    // (plus the full set for completeness).
    let orientable = is_orientable(ap);
    let base_boundary = ts.boundary_components().count();
    let mut site_masks: BTreeSet<u64> = pairs.iter().map(|&(a, _)| a).collect();
    site_masks.insert(subsets - 1);
    site_masks.insert(0);
    for mask in site_masks {
        let dual = seen_first.remove(&mask).unwrap_or_else(|| partial_dual_mask(&ts, mask));
        if is_orientable(&dual) != orientable {
            report.orientability_invariant = false;
        }
        let dual_ts = TransitionSystem::new(&dual);
        let complement = ts.subset_from_mask(!mask & (subsets - 1));
        if dual_ts.state_circles(&complement).count() != base_boundary {
            report.boundary_count_identity = false;
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ArrowPresentation {
        ArrowPresentation::parse(text).unwrap()
    }

    fn subset(labels: &[&str]) -> EdgeSubset {
        labels.iter().map(|l| EdgeLabel::new(*l)).collect()
    }

    #[test]
    fn empty_set_dual_reproduces_input() {
        for text in [
            "C1: 1+ 1+\n",
            "C1: 1+ 1-\n",
            "C1: 1+\nC2: 1-\n",
            "C1: 1+ 2+ 1+ 2+\n",
            "C1: 1+ 2+ 3+\nC2: 3+ 2+ 1+\n",
            "C1: 1+ 1-\nC2:\n",
        ] {
            let ap = parse(text);
            assert!(
                partial_dual(&ap, &EdgeSubset::new()).representation_eq(&ap),
                "empty-set dual changed {text:?}"
            );
        }
    }

    #[test]
    fn annulus_dual_is_path() {
        let annulus = parse("C1: 1+ 1+\n");
        let path = parse("C1: 1+\nC2: 1-\n");
        let dual = partial_dual(&annulus, &subset(&["1"]));
        assert_eq!(dual.vertex_count(), 2);
        assert_eq!(dual.vertex_degrees(), vec![1, 1]);
        assert_eq!(normal_form(&dual), normal_form(&path));
        // And back again.
        assert_eq!(normal_form(&geometric_dual(&path)), normal_form(&annulus));
    }

    #[test]
    fn moebius_loop_is_self_dual() {
        let moebius = parse("C1: 1+ 1-\n");
        let dual = geometric_dual(&moebius);
        assert_eq!(normal_form(&dual), normal_form(&moebius));
    }

    #[test]
    fn torus_bouquet_is_self_dual() {
        let bouquet = parse("C1: 1+ 2+ 1+ 2+\n");
        let dual = geometric_dual(&bouquet);
        assert_eq!(dual.vertex_count(), 1);
        assert_eq!(dual.edge_count(), 2);
        assert_eq!(normal_form(&dual), normal_form(&bouquet));
    }

    #[test]
    fn isolated_vertices_survive_duality() {
        let ap = parse("C1: 1+ 1+\nC2:\n");
        let dual = geometric_dual(&ap);
        assert_eq!(dual.vertex_degrees(), vec![1, 1, 0]);
    }

    #[test]
    fn orientability_of_fixtures() {
        assert!(is_orientable(&parse("C1: 1+ 1+\n")));
        assert!(!is_orientable(&parse("C1: 1+ 1-\n")));
        assert!(is_orientable(&parse("C1: 1+\nC2: 1-\n")));
        assert!(is_orientable(&parse("C1: 1+ 2+ 1+ 2+\n")));
        assert!(is_orientable(&parse("C1: 1+ 2+ 3+\nC2: 3+ 2+ 1+\n")));
        // A cycle of two circles where one edge pair disagrees in flags is
        // still orientable (reverse one circle)...
        assert!(is_orientable(&parse("C1: 1+ 2+\nC2: 1+ 2+\n")));
        // ...but a loop with mixed flags never is.
        assert!(!is_orientable(&parse("C1: 1+ 2+ 1- 2+\n")));
    }

    #[test]
    fn surface_invariants_of_fixtures() {
        let annulus = surface_invariants(&parse("C1: 1+ 1+\n"));
        assert_eq!(
            (annulus.vertices, annulus.edges, annulus.boundary_components),
            (1, 1, 2)
        );
        assert_eq!(annulus.euler_characteristic, 2);
        assert!(annulus.orientable);
        assert_eq!(annulus.genus, 0);

        let moebius = surface_invariants(&parse("C1: 1+ 1-\n"));
        assert_eq!(moebius.boundary_components, 1);
        assert_eq!(moebius.euler_characteristic, 1);
        assert!(!moebius.orientable);
        assert_eq!(moebius.genus, 1, "Euler genus of the Möbius band");

        let torus = surface_invariants(&parse("C1: 1+ 2+ 1+ 2+\n"));
        assert_eq!(torus.euler_characteristic, 0);
        assert!(torus.orientable);
        assert_eq!(torus.genus, 1);

        let theta = surface_invariants(&parse("C1: 1+ 2+ 3+\nC2: 3+ 2+ 1+\n"));
        assert_eq!(
            (theta.vertices, theta.edges, theta.boundary_components),
            (2, 3, 3)
        );
        assert_eq!(theta.euler_characteristic, 2);
        assert_eq!(theta.genus, 0);
    }

    #[test]
    fn invariants_sum_over_components() {
        let ap = parse("C1: 1+ 1-\nC2: 2+ 2+\nC3:\n");
        let inv = surface_invariants(&ap);
        assert_eq!(inv.components, 3);
        assert!(!inv.orientable);
        // Möbius component contributes Euler genus 1; the annulus and the
        // isolated vertex contribute 0.
        assert_eq!(inv.genus, 1);
        assert_eq!(inv.euler_characteristic, 1 + 2 + 2);
        assert_eq!(inv.boundary_components, 1 + 2 + 1);
    }

    #[test]
    fn normal_form_identifies_equivalent_presentations() {
        // Pair flip.
        assert_eq!(normal_form(&parse("C1: 1+ 1+\n")), normal_form(&parse("C1: 1- 1-\n")));
        // Circle reversal.
        assert_eq!(
            normal_form(&parse("C1: 1+\nC2: 1-\n")),
            normal_form(&parse("C1: 1+\nC2: 1+\n"))
        );
        // Rotation and circle order.
        assert_eq!(
            normal_form(&parse("C1: 1+ 2+ 1+ 2+\n")),
            normal_form(&parse("Z: 2+ 1+ 2+ 1+\n"))
        );
        // The annulus and Möbius loops stay distinct.
        assert_ne!(normal_form(&parse("C1: 1+ 1+\n")), normal_form(&parse("C1: 1+ 1-\n")));
        // Labels are never permuted: these two differ only by swapping the
        // names 1 and 2, and that is enough to keep them apart.
        assert_ne!(
            normal_form(&parse("C1: 1+ 1+\nC2: 2+ 2-\n")),
            normal_form(&parse("C1: 1+ 1-\nC2: 2+ 2+\n"))
        );
    }

    #[test]
    fn dual_identities_exhaustive_on_small_fixtures() {
        for text in ["C1: 1+ 1+\n", "C1: 1+ 1-\n", "C1: 1+ 2+ 1+ 2+\n", "C1: 1+ 2+ 3+\nC2: 3+ 2+ 1+\n"] {
            let ap = parse(text);
            let report = check_dual_identities(&ap, PairSelection::Exhaustive);
            assert!(report.all_pass(), "{text:?}: {report:?}");
            assert_eq!(report.exact_matches, report.pairs_checked);
        }
    }

    #[test]
    fn dual_identities_sampled() {
        let ap = parse("C1: 1+ 2+ 3+ 1+ 4-\nC2: 4+ 2- 3+\n");
        let report = check_dual_identities(&ap, PairSelection::Sample { pairs: 12, seed: 7 });
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn double_dual_specific_composition() {
        // (G^{1})^{2} = G^{1,2} on the torus bouquet.
        let bouquet = parse("C1: 1+ 2+ 1+ 2+\n");
        let step1 = partial_dual(&bouquet, &subset(&["1"]));
        let step2 = partial_dual(&step1, &subset(&["2"]));
        assert_eq!(normal_form(&step2), normal_form(&geometric_dual(&bouquet)));
    }
}
