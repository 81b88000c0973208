//! The medial 4-regular graph and its directions.
//!
//! The medial graph puts one 4-valent vertex on every edge disc and one
//! medial edge along every slotted gap, so medial edges inherit the gap
//! indexing of the transition system. A *direction* orients every medial
//! edge; `forward` means "with the circle", from the gap's source slot to
//! its destination slot. Degree-0 circles contribute free loops, which are
//! pinned to `forward = true` throughout so that direction vectors compare
//! deterministically.
//!
//! At a medial vertex the four slots sit in cyclic order, and a direction is
//! *crossing-total* when every vertex sees one of three in/out patterns:
//! all-in, all-out, or two incoming medial edges at cyclically adjacent
//! slots. The adjacent-in vertices split into two kinds by which smoothing
//! pairs the incoming slots, and that split is the whole point: collecting
//! the second kind (plus any subset of the all-one-way vertices) over all
//! crossing-total directions yields exactly the edge sets whose partial dual
//! has even vertex degrees, and the first kind yields their complements.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::arrow::{ArrowPresentation, EdgeSubset};
use crate::trace::{StateCircle, TransitionSystem};

/// An orientation of every medial edge, indexed by flat gap index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct Direction {
    pub forward: Vec<bool>,
}

impl Direction {
    /// The direction with every medial edge reversed (free loops stay
    /// pinned forward).
    pub fn reversed(&self, ts: &TransitionSystem) -> Direction {
        let forward = self
            .forward
            .iter()
            .enumerate()
            .map(|(g, f)| if ts.gap_has_slots(g) { !f } else { *f })
            .collect();
        Direction { forward }
    }
}

/// The medial graph as plain data: vertices are edge indices of the
/// underlying presentation, edges connect the edge discs at the two ends of
/// each slotted gap, and free loops count the gaps of degree-0 circles.
#[derive(Clone, Debug, Serialize)]
pub struct MedialGraph {
    pub vertex_count: usize,
    /// One entry per slotted gap, in gap order: (edge at the source slot,
    /// edge at the destination slot).
    pub edges: Vec<(usize, usize)>,
    pub free_loops: usize,
}

impl MedialGraph {
    /// Every medial vertex has exactly four incident half-edges.
    pub fn is_four_regular(&self) -> bool {
        let mut degree = vec![0usize; self.vertex_count];
        for &(a, b) in &self.edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        degree.iter().all(|&d| d == 4)
    }
}

pub fn medial_graph(ap: &ArrowPresentation) -> MedialGraph {
    let ts = TransitionSystem::new(ap);
    let mut edges = Vec::new();
    let mut free_loops = 0;
    for gap in 0..ts.gap_count() {
        match ts.gap_slots(gap) {
            Some((src_slot, dst_slot)) => edges.push((src_slot / 4, dst_slot / 4)),
            None => free_loops += 1,
        }
    }
    MedialGraph { vertex_count: ts.edge_count(), edges, free_loops }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum MedialError {
    #[error("direction has {got} entries but the presentation has {want} gaps")]
    WrongLength { got: usize, want: usize },
    #[error("edge {label} is not crossing-total: in/out pattern {pattern:?}")]
    NotCrossingTotal { label: String, pattern: [bool; 4] },
}

/// In/out pattern at an edge disc: `pattern[k]` is true when the medial edge
/// at slot `k` points into the vertex.
fn in_pattern(ts: &TransitionSystem, direction: &Direction, edge: usize) -> [bool; 4] {
    let mut pattern = [false; 4];
    for (k, entry) in pattern.iter_mut().enumerate() {
        let (gap, is_dst) = ts.slot_gap(4 * edge + k);
        *entry = is_dst == direction.forward[gap];
    }
    pattern
}

fn pattern_mask(pattern: [bool; 4]) -> u8 {
    pattern.iter().enumerate().map(|(k, &b)| u8::from(b) << k).sum()
}

/// How one edge disc behaves under a crossing-total direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VertexKind {
    /// Incoming slots paired like the black smoothing.
    CrossingBlack,
    /// Incoming slots paired like the white smoothing.
    CrossingWhite,
    /// All four medial edges point the same way.
    Total,
}

fn vertex_kind(pattern: [bool; 4]) -> Option<VertexKind> {
    match pattern_mask(pattern) {
        0b0000 | 0b1111 => Some(VertexKind::Total),
        0b0011 | 0b1100 => Some(VertexKind::CrossingBlack),
        0b0110 | 0b1001 => Some(VertexKind::CrossingWhite),
        _ => None,
    }
}

pub fn is_crossing_total(ts: &TransitionSystem, direction: &Direction) -> bool {
    direction.forward.len() == ts.gap_count()
        && (0..ts.edge_count()).all(|e| vertex_kind(in_pattern(ts, direction, e)).is_some())
}

/// The three-way split of edges induced by a crossing-total direction.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EdgeClassification {
    /// Edges whose incoming slots are black-paired.
    pub c: EdgeSubset,
    /// Edges whose incoming slots are white-paired.
    pub d: EdgeSubset,
    /// Edges with all four medial edges pointing one way.
    pub t: EdgeSubset,
}

pub fn classify(
    ts: &TransitionSystem,
    direction: &Direction,
) -> Result<EdgeClassification, MedialError> {
    if direction.forward.len() != ts.gap_count() {
        return Err(MedialError::WrongLength {
            got: direction.forward.len(),
            want: ts.gap_count(),
        });
    }
    let mut classification = EdgeClassification {
        c: EdgeSubset::new(),
        d: EdgeSubset::new(),
        t: EdgeSubset::new(),
    };
    for edge in 0..ts.edge_count() {
        let pattern = in_pattern(ts, direction, edge);
        let target = match vertex_kind(pattern) {
            Some(VertexKind::CrossingBlack) => &mut classification.c,
            Some(VertexKind::CrossingWhite) => &mut classification.d,
            Some(VertexKind::Total) => &mut classification.t,
            None => {
                return Err(MedialError::NotCrossingTotal {
                    label: ts.label(edge).to_string(),
                    pattern,
                })
            }
        };
        target.insert(ts.label(edge).clone());
    }
    Ok(classification)
}

/// All directions in which every edge disc is a genuine crossing: both
/// straight-ahead walks through it run one way. These are exactly the
/// consistent orientations of the straight-ahead walks, so there are
/// `2^t` of them where `t` is the number of such walks.
pub fn enumerate_all_crossing(ts: &TransitionSystem) -> Vec<Direction> {
    let all = ts.straight_ahead_walks();
    let walks: Vec<&StateCircle> = all.circles.iter().filter(|w| !w.is_empty()).collect();
    assert!(walks.len() < 64, "orientation masks are u64");
    let mut out = Vec::with_capacity(1 << walks.len());
    for mask in 0u64..1 << walks.len() {
        let mut forward = vec![true; ts.gap_count()];
        for (w, walk) in walks.iter().enumerate() {
            let flip = mask >> w & 1 == 1;
            for step in walk.steps() {
                forward[ts.gap_flat_index(step.gap)] = step.forward ^ flip;
            }
        }
        out.push(Direction { forward });
    }
    out.sort();
    out
}

/// All crossing-total directions, each edge allowed to be a crossing either
/// way or totally directed. Built by orienting the circles of every all-even
/// state alternately (two phases per circle) and deduplicating; verified
/// against the crossing-total predicate before being kept.
pub fn enumerate_crossing_total(ts: &TransitionSystem) -> Vec<Direction> {
    assert!(ts.edge_count() < 64, "subset masks are u64");
    let mut found: BTreeSet<Vec<bool>> = BTreeSet::new();
    for mask in 0u64..1 << ts.edge_count() {
        let state = ts.state_circles_mask(mask);
        if !state.all_even() {
            continue;
        }
        let closed: Vec<&StateCircle> = state.circles.iter().filter(|w| !w.is_empty()).collect();
        assert!(closed.len() < 64, "phase masks are u64");
        for phases in 0u64..1 << closed.len() {
            let mut forward = vec![true; ts.gap_count()];
            for (w, walk) in closed.iter().enumerate() {
                let flip = phases >> w & 1 == 1;
                for (i, step) in walk.steps().iter().enumerate() {
                    let with_walk = (i % 2 == 0) ^ flip;
                    forward[ts.gap_flat_index(step.gap)] =
                        if with_walk { step.forward } else { !step.forward };
                }
            }
            let direction = Direction { forward };
            if is_crossing_total(ts, &direction) {
                found.insert(direction.forward);
            }
        }
    }
    found.into_iter().map(|forward| Direction { forward }).collect()
}

/// Union over all crossing-total directions of the white-paired edges plus
/// any subset of the totally-directed edges. Equals the family of edge sets
/// whose partial dual has all vertex degrees even.
pub fn eulerian_sets(ap: &ArrowPresentation) -> BTreeSet<EdgeSubset> {
    let ts = TransitionSystem::new(ap);
    collect_with_total(&ts, |cls| cls.d.clone())
}

/// Union over all crossing-total directions of the black-paired edges plus
/// any subset of the totally-directed edges. Equals the family of edge sets
/// whose partial dual has every boundary component of even length — the
/// complements of the Eulerian family.
pub fn even_face_sets(ap: &ArrowPresentation) -> BTreeSet<EdgeSubset> {
    let ts = TransitionSystem::new(ap);
    collect_with_total(&ts, |cls| cls.c.clone())
}

fn collect_with_total(
    ts: &TransitionSystem,
    base: impl Fn(&EdgeClassification) -> EdgeSubset,
) -> BTreeSet<EdgeSubset> {
    let mut out = BTreeSet::new();
    for direction in enumerate_crossing_total(ts) {
        let cls = classify(ts, &direction).expect("enumerated directions are crossing-total");
        let total: Vec<_> = cls.t.iter().cloned().collect();
        assert!(total.len() < 64, "subset masks are u64");
        let core = base(&cls);
        for pick in 0u64..1 << total.len() {
            let mut set = core.clone();
            for (i, label) in total.iter().enumerate() {
                if pick >> i & 1 == 1 {
                    set.insert(label.clone());
                }
            }
            out.insert(set);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrow::EdgeLabel;

    fn system(text: &str) -> TransitionSystem {
        TransitionSystem::new(&ArrowPresentation::parse(text).unwrap())
    }

    fn subsets(families: &[&[&str]]) -> BTreeSet<EdgeSubset> {
        families
            .iter()
            .map(|labels| labels.iter().map(|l| EdgeLabel::new(*l)).collect())
            .collect()
    }

    #[test]
    fn medial_graph_shape() {
        let theta = medial_graph(&ArrowPresentation::parse("C1: 1+ 2+ 3+\nC2: 3+ 2+ 1+\n").unwrap());
        assert_eq!(theta.vertex_count, 3);
        assert_eq!(theta.edges.len(), 6);
        assert_eq!(theta.free_loops, 0);
        assert!(theta.is_four_regular());

        let with_isolated = medial_graph(&ArrowPresentation::parse("C1: 1+ 1+\nC2:\n").unwrap());
        assert_eq!(with_isolated.vertex_count, 1);
        assert_eq!(with_isolated.edges.len(), 2);
        assert_eq!(with_isolated.free_loops, 1);
        assert!(with_isolated.is_four_regular());
    }

    #[test]
    fn all_crossing_counts_match_walk_counts() {
        for (text, walks) in [
            ("C1: 1+ 1+\n", 1),
            ("C1: 1+ 1-\n", 2),
            ("C1: 1+\nC2: 1-\n", 1),
            ("C1: 1+ 2+ 1+ 2+\n", 2),
        ] {
            let ts = system(text);
            assert_eq!(ts.straight_ahead_count(), walks, "{text:?}");
            assert_eq!(enumerate_all_crossing(&ts).len(), 1 << walks, "{text:?}");
        }
    }

    #[test]
    fn all_crossing_directions_have_no_total_edges() {
        for text in ["C1: 1+ 1+\n", "C1: 1+ 1-\n", "C1: 1+\nC2: 1-\n", "C1: 1+ 2+ 1+ 2+\n"] {
            let ts = system(text);
            for direction in enumerate_all_crossing(&ts) {
                let cls = classify(&ts, &direction).expect("all-crossing must be crossing-total");
                assert!(cls.t.is_empty(), "{text:?} {direction:?}");
            }
        }
    }

    #[test]
    fn annulus_crossings_are_black_paired() {
        let ts = system("C1: 1+ 1+\n");
        let directions = enumerate_all_crossing(&ts);
        assert_eq!(directions.len(), 2);
        for d in &directions {
            let cls = classify(&ts, d).unwrap();
            assert_eq!(cls.c, subsets(&[&["1"]]).into_iter().next().unwrap());
            assert!(cls.d.is_empty());
        }
        // The uniform directions point both strands at the same slot pair of
        // the lone edge disc, which is not a crossing-total pattern.
        for uniform in [true, false] {
            let d = Direction { forward: vec![uniform; ts.gap_count()] };
            assert!(!is_crossing_total(&ts, &d));
        }
    }

    #[test]
    fn moebius_crossings_split_between_kinds() {
        let ts = system("C1: 1+ 1-\n");
        let directions = enumerate_all_crossing(&ts);
        assert_eq!(directions.len(), 4);
        let c_count = directions
            .iter()
            .filter(|d| !classify(&ts, d).unwrap().c.is_empty())
            .count();
        assert_eq!(c_count, 2, "two of four directions make the edge a c-vertex");
    }

    #[test]
    fn path_edge_is_always_white_paired() {
        let ts = system("C1: 1+\nC2: 1-\n");
        for d in enumerate_all_crossing(&ts) {
            let cls = classify(&ts, &d).unwrap();
            assert!(cls.c.is_empty());
            assert_eq!(cls.d.len(), 1);
        }
    }

    #[test]
    fn crossing_total_counts() {
        for (text, expected) in [
            ("C1: 1+ 1+\n", 2),
            ("C1: 1+ 1-\n", 4),
            ("C1: 1+\nC2: 1-\n", 2),
            ("C1: 1+ 2+ 1+ 2+\n", 6),
        ] {
            let ts = system(text);
            assert_eq!(enumerate_crossing_total(&ts).len(), expected, "{text:?}");
        }
    }

    #[test]
    fn crossing_total_extends_all_crossing() {
        for text in ["C1: 1+ 1+\n", "C1: 1+ 1-\n", "C1: 1+\nC2: 1-\n", "C1: 1+ 2+ 1+ 2+\n"] {
            let ts = system(text);
            let ct: BTreeSet<Vec<bool>> =
                enumerate_crossing_total(&ts).into_iter().map(|d| d.forward).collect();
            for d in enumerate_all_crossing(&ts) {
                assert!(ct.contains(&d.forward), "{text:?} missing {d:?}");
            }
        }
    }

    #[test]
    fn torus_bouquet_has_two_directions_with_total_edges() {
        let ts = system("C1: 1+ 2+ 1+ 2+\n");
        let with_total = enumerate_crossing_total(&ts)
            .into_iter()
            .filter(|d| !classify(&ts, d).unwrap().t.is_empty())
            .count();
        assert_eq!(with_total, 2);
    }

    #[test]
    fn eulerian_and_even_face_families() {
        assert_eq!(
            eulerian_sets(&ArrowPresentation::parse("C1: 1+ 1+\n").unwrap()),
            subsets(&[&[]])
        );
        assert_eq!(
            eulerian_sets(&ArrowPresentation::parse("C1: 1+ 1-\n").unwrap()),
            subsets(&[&[], &["1"]])
        );
        assert_eq!(
            eulerian_sets(&ArrowPresentation::parse("C1: 1+\nC2: 1-\n").unwrap()),
            subsets(&[&["1"]])
        );
        assert_eq!(
            eulerian_sets(&ArrowPresentation::parse("C1: 1+ 2+ 1+ 2+\n").unwrap()),
            subsets(&[&[], &["1"], &["2"], &["1", "2"]])
        );

        assert_eq!(
            even_face_sets(&ArrowPresentation::parse("C1: 1+ 1+\n").unwrap()),
            subsets(&[&["1"]])
        );
        assert_eq!(
            even_face_sets(&ArrowPresentation::parse("C1: 1+\nC2: 1-\n").unwrap()),
            subsets(&[&[]])
        );
    }

    #[test]
    fn reversal_preserves_crossing_total_and_classification() {
        for text in ["C1: 1+ 1+\n", "C1: 1+ 1-\n", "C1: 1+ 2+ 1+ 2+\n", "C1: 1+ 1-\nC2:\n"] {
            let ts = system(text);
            for d in enumerate_crossing_total(&ts) {
                let r = d.reversed(&ts);
                assert!(is_crossing_total(&ts, &r), "{text:?}");
                assert_eq!(classify(&ts, &d).unwrap(), classify(&ts, &r).unwrap());
            }
        }
    }

    #[test]
    fn classify_rejects_bad_input() {
        let ts = system("C1: 1+ 1+\n");
        assert_eq!(
            classify(&ts, &Direction { forward: vec![true] }),
            Err(MedialError::WrongLength { got: 1, want: 2 })
        );
        let uniform = Direction { forward: vec![true, true] };
        assert!(matches!(
            classify(&ts, &uniform),
            Err(MedialError::NotCrossingTotal { .. })
        ));
    }

    #[test]
    fn edgeless_presentation_has_one_direction() {
        let ts = system("C1:\nC2:\n");
        assert_eq!(enumerate_all_crossing(&ts).len(), 1);
        let ct = enumerate_crossing_total(&ts);
        assert_eq!(ct.len(), 1);
        assert_eq!(ct[0].forward, vec![true, true], "free loops pinned forward");
    }
}
