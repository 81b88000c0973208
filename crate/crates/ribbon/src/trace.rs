//! The transition system of a presentation and closed-walk tracing.
//!
//! Between consecutive arrows, every circle is divided into *gaps* (a
//! degree-d circle has d of them; a degree-0 circle is one closed gap). Each
//! edge meets four gap endpoints. Tracing fixes a pairing of those four
//! endpoints at every edge and follows gaps from pairing to pairing; the
//! resulting closed walks are simultaneously the faces of the ribbon surface
//! (all-white), the vertex boundaries (all-black), the straight-ahead walks
//! of the medial graph (all-crossing), and the state circles of any
//! black/white mixture.
//!
//! # Conventions
//!
//! The four endpoint slots at an edge are stored in the cyclic order
//! `(tail(o1), head(o1), tail(o2), head(o2))`, where `o1` is the occurrence
//! encountered first in circle order and tail/head are the ends of the drawn
//! arrow. For a `+` arrow the tail end touches the gap *before* the arrow in
//! stored traversal order and the head end touches the gap *after* it; a `-`
//! arrow swaps the two. This order is exactly the boundary orientation of the
//! edge disc, which makes the three pairings
//!
//! - black    `(0,1) (2,3)` — walk past the arrow along its own circle,
//! - white    `(1,2) (3,0)` — cross the edge to the other arrow,
//! - crossing `(0,2) (1,3)` — go straight through the medial vertex,
//!
//! and pins the whole system: with these choices the all-black trace returns
//! each circle unchanged. Swapping the roles of black and white would break
//! that identity (and every theorem suite downstream).

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::arrow::{ArrowPresentation, EdgeLabel, EdgeSubset};

/// Identifies one gap: `position` counts gaps along the stored traversal of
/// `circle`, gap `p` lying between the arrows at positions `p` and `p+1`.
/// A degree-0 circle has the single gap `position = 0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GapId {
    pub circle: usize,
    pub position: usize,
}

impl fmt::Display for GapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.circle, self.position)
    }
}

impl fmt::Debug for GapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}.{}", self.circle, self.position)
    }
}

/// Endpoint pairing choice at one edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    Black,
    White,
    Crossing,
}

impl Pairing {
    /// Partner of slot position `k` (0..4) under this pairing.
    fn partner(self, k: u8) -> u8 {
        match self {
            Pairing::Black => k ^ 1,    // (0,1) (2,3)
            Pairing::White => 3 - k,    // (1,2) (3,0)
            Pairing::Crossing => k ^ 2, // (0,2) (1,3)
        }
    }
}

/// Passage through one edge inside a walk: the walk arrives at slot
/// `from_slot` of `edge` and leaves through `to_slot` (slot positions 0..4 in
/// the cyclic order above).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct ArrowSite {
    /// Edge index in label order; resolve via [`TransitionSystem::label`].
    pub edge: usize,
    pub from_slot: u8,
    pub to_slot: u8,
}

impl ArrowSite {
    /// Direction of the passage relative to the edge-disc boundary
    /// orientation: `true` when moving forward in the cyclic slot order.
    /// Meaningful for black/white passages (the adjacent pairings); a
    /// crossing passage is neither.
    pub fn forward(&self) -> Option<bool> {
        match (4 + self.to_slot - self.from_slot) & 3 {
            1 => Some(true),
            3 => Some(false),
            _ => None,
        }
    }
}

/// One step of a walk: traverse `gap` (`forward` = along its circle's stored
/// direction), then pass through `site`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct WalkStep {
    pub gap: GapId,
    pub forward: bool,
    pub site: ArrowSite,
}

/// A closed walk produced by tracing.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateCircle {
    /// Alternates gaps and edge passages; `steps` is the cyclic sequence
    /// starting at the lowest gap on the walk, traversed forward.
    Closed { steps: Vec<WalkStep> },
    /// The boundary of a degree-0 circle: one closed gap, no edge passages.
    Isolated { gap: GapId },
}

impl StateCircle {
    /// Number of edge passages on the walk — the degree of the vertex this
    /// walk becomes under partial duality.
    pub fn len(&self) -> usize {
        match self {
            StateCircle::Closed { steps } => steps.len(),
            StateCircle::Isolated { .. } => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Some gap lying on the walk (the starting gap for closed walks).
    pub fn any_gap(&self) -> GapId {
        match self {
            StateCircle::Closed { steps } => steps[0].gap,
            StateCircle::Isolated { gap } => *gap,
        }
    }

    pub fn steps(&self) -> &[WalkStep] {
        match self {
            StateCircle::Closed { steps } => steps,
            StateCircle::Isolated { .. } => &[],
        }
    }
}

/// The full result of one trace: a partition of all gaps into closed walks,
/// ordered by their starting gap.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StateCircles {
    pub circles: Vec<StateCircle>,
}

impl StateCircles {
    pub fn count(&self) -> usize {
        self.circles.len()
    }

    /// Walk lengths in walk order (not sorted).
    pub fn lengths(&self) -> Vec<usize> {
        self.circles.iter().map(StateCircle::len).collect()
    }

    /// Every walk of even length? Length 0 is even, so isolated vertices
    /// never spoil evenness.
    pub fn all_even(&self) -> bool {
        self.circles.iter().all(|c| c.len() % 2 == 0)
    }
}

/// One gap's place in the slot system. `src` is the endpoint at the arrow the
/// gap leaves (its successor side), `dst` the endpoint at the arrow it runs
/// into; forward traversal goes src → dst. Degree-0 gaps have neither.
#[derive(Clone, Copy, Debug)]
struct Gap {
    id: GapId,
    src_slot: Option<usize>,
    dst_slot: Option<usize>,
}

#[derive(Clone, Debug)]
struct EdgeSlots {
    /// Occurrences as (circle, position), in order of first encounter.
    occurrences: [(usize, usize); 2],
}

/// Precomputed slot structure of a valid presentation. Slot `4e + k` is the
/// k-th endpoint at edge `e` (edges in label order); every slot is one
/// endpoint of exactly one gap.
pub struct TransitionSystem {
    labels: Vec<EdgeLabel>,
    edges: Vec<EdgeSlots>,
    gaps: Vec<Gap>,
    /// slot → (flat gap index, is this the gap's dst endpoint?)
    slot_gap: Vec<(usize, bool)>,
    /// (circle, position) → flat gap index, via per-circle offsets.
    gap_offset: Vec<usize>,
    circle_degrees: Vec<usize>,
}

impl TransitionSystem {
    /// Build the system. Panics if the presentation is invalid (callers
    /// parse or validate first; an invalid multiset of labels has no
    /// well-defined edge set to build slots for).
    pub fn new(ap: &ArrowPresentation) -> Self {
        let violations = ap.validate();
        assert!(
            violations.is_empty(),
            "transition system requires a valid presentation: {}",
            violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        );

        let labels = ap.edge_labels();
        let label_index: BTreeMap<&EdgeLabel, usize> =
            labels.iter().enumerate().map(|(i, l)| (l, i)).collect();

        // Gaps first: one per arrow for degree >= 1 circles, one closed gap
        // for degree-0 circles.
        let circle_degrees: Vec<usize> = ap.vertex_degrees();
        let mut gap_offset = Vec::with_capacity(ap.vertex_count());
        let mut gaps = Vec::new();
        for (circle, degree) in circle_degrees.iter().enumerate() {
            gap_offset.push(gaps.len());
            for position in 0..(*degree).max(1) {
                gaps.push(Gap { id: GapId { circle, position }, src_slot: None, dst_slot: None });
            }
        }

        // Occurrence pairs per edge, in order of first encounter.
        let mut occurrence_pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); labels.len()];
        for (circle, c) in ap.circles().iter().enumerate() {
            for (position, arrow) in c.arrows.iter().enumerate() {
                occurrence_pairs[label_index[&arrow.label]].push((circle, position));
            }
        }

        let mut edges = Vec::with_capacity(labels.len());
        let mut slot_gap = vec![(usize::MAX, false); 4 * labels.len()];
        for (edge, pair) in occurrence_pairs.iter().enumerate() {
            let occurrences = [pair[0], pair[1]];
            for (which, &(circle, position)) in occurrences.iter().enumerate() {
                let degree = circle_degrees[circle];
                let succ_gap = gap_offset[circle] + position;
                let pred_gap = gap_offset[circle] + (position + degree - 1) % degree;
                // The predecessor gap runs *into* this arrow (its dst end is
                // here); the successor gap runs *out of* it (its src end).
                let forward = ap.circles()[circle].arrows[position].forward;
                let (tail, head) = if forward {
                    ((pred_gap, true), (succ_gap, false))
                } else {
                    ((succ_gap, false), (pred_gap, true))
                };
                let tail_slot = 4 * edge + 2 * which;
                let head_slot = tail_slot + 1;
                for (slot, (gap, is_dst)) in [(tail_slot, tail), (head_slot, head)] {
                    slot_gap[slot] = (gap, is_dst);
                    if is_dst {
                        gaps[gap].dst_slot = Some(slot);
                    } else {
                        gaps[gap].src_slot = Some(slot);
                    }
                }
            }
            edges.push(EdgeSlots { occurrences });
        }

        for gap in &gaps {
            debug_assert_eq!(gap.src_slot.is_some(), gap.dst_slot.is_some());
        }

        TransitionSystem { labels, edges, gaps, slot_gap, gap_offset, circle_degrees }
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[EdgeLabel] {
        &self.labels
    }

    pub fn label(&self, edge: usize) -> &EdgeLabel {
        &self.labels[edge]
    }

    pub fn edge_index(&self, label: &EdgeLabel) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    /// Total number of gaps, including the closed gaps of degree-0 circles.
    pub fn gap_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn gap_id(&self, flat: usize) -> GapId {
        self.gaps[flat].id
    }

    pub fn gap_flat_index(&self, id: GapId) -> usize {
        self.gap_offset[id.circle] + id.position
    }

    /// Does this gap carry medial structure? False exactly for the closed
    /// gap of a degree-0 circle.
    pub fn gap_has_slots(&self, flat: usize) -> bool {
        self.gaps[flat].src_slot.is_some()
    }

    /// The two endpoint slots of a slotted gap, `(src, dst)`.
    pub fn gap_slots(&self, flat: usize) -> Option<(usize, usize)> {
        Some((self.gaps[flat].src_slot?, self.gaps[flat].dst_slot?))
    }

    /// The gap whose endpoint sits in `slot`, as (flat index, is-dst-end).
    pub fn slot_gap(&self, slot: usize) -> (usize, bool) {
        self.slot_gap[slot]
    }

    /// Occurrences of edge `e` as (circle, position) pairs, first-encountered
    /// first.
    pub fn edge_occurrences(&self, edge: usize) -> [(usize, usize); 2] {
        self.edges[edge].occurrences
    }

    pub fn circle_count(&self) -> usize {
        self.circle_degrees.len()
    }

    pub fn circle_degree(&self, circle: usize) -> usize {
        self.circle_degrees[circle]
    }

    /// Trace the closed walks of a pairing choice given per edge index.
    /// Walks start at their lowest gap, traversed forward, and are emitted in
    /// order of those starting gaps; together they visit every gap exactly
    /// once.
    pub fn trace_indexed(&self, choice: &[Pairing]) -> StateCircles {
        assert_eq!(choice.len(), self.edge_count(), "one pairing per edge");
        let mut visited = vec![false; self.gaps.len()];
        let mut circles = Vec::new();
        for start in 0..self.gaps.len() {
            if visited[start] {
                continue;
            }
            let (Some(_), Some(_)) = (self.gaps[start].src_slot, self.gaps[start].dst_slot) else {
                visited[start] = true;
                circles.push(StateCircle::Isolated { gap: self.gaps[start].id });
                continue;
            };
            let mut steps = Vec::new();
            let mut gap = start;
            let mut forward = true;
            loop {
                visited[gap] = true;
                let arrive = if forward {
                    self.gaps[gap].dst_slot.unwrap()
                } else {
                    self.gaps[gap].src_slot.unwrap()
                };
                let edge = arrive / 4;
                let from_slot = (arrive % 4) as u8;
                let to_slot = choice[edge].partner(from_slot);
                let leave = 4 * edge + to_slot as usize;
                steps.push(WalkStep {
                    gap: self.gaps[gap].id,
                    forward,
                    site: ArrowSite { edge, from_slot, to_slot },
                });
                let (next_gap, leaving_dst) = self.slot_gap[leave];
                // Leaving through a gap's dst end means running it backward.
                gap = next_gap;
                forward = !leaving_dst;
                if gap == start && forward {
                    break;
                }
            }
            circles.push(StateCircle::Closed { steps });
        }
        StateCircles { circles }
    }

    /// Trace with a pairing choice keyed by label. Every edge must be given
    /// a pairing.
    pub fn trace(&self, choice: &BTreeMap<EdgeLabel, Pairing>) -> StateCircles {
        let indexed: Vec<Pairing> = self
            .labels
            .iter()
            .map(|l| {
                *choice
                    .get(l)
                    .unwrap_or_else(|| panic!("no pairing chosen for edge {l}"))
            })
            .collect();
        self.trace_indexed(&indexed)
    }

    /// All-black trace: one walk per circle, reproducing the vertex
    /// boundaries (lengths = degrees).
    pub fn vertex_boundaries(&self) -> StateCircles {
        self.trace_indexed(&vec![Pairing::Black; self.edge_count()])
    }

    /// All-white trace: the boundary components of the ribbon surface.
    pub fn boundary_components(&self) -> StateCircles {
        self.trace_indexed(&vec![Pairing::White; self.edge_count()])
    }

    /// All-crossing trace: the straight-ahead walks of the medial graph.
    /// Walks of degree-0 circles carry no medial edges and are excluded from
    /// the straight-ahead count `t`.
    pub fn straight_ahead_walks(&self) -> StateCircles {
        self.trace_indexed(&vec![Pairing::Crossing; self.edge_count()])
    }

    /// `t`: number of straight-ahead walks in the medial graph.
    pub fn straight_ahead_count(&self) -> usize {
        self.straight_ahead_walks().circles.iter().filter(|c| !c.is_empty()).count()
    }

    /// State circles of the state that smooths the edges in `white_set`
    /// white and every other edge black. Unknown labels in `white_set` are a
    /// caller bug.
    pub fn state_circles(&self, white_set: &EdgeSubset) -> StateCircles {
        for label in white_set {
            assert!(
                self.edge_index(label).is_some(),
                "white set contains unknown edge label {label}"
            );
        }
        let choice: Vec<Pairing> = self
            .labels
            .iter()
            .map(|l| if white_set.contains(l) { Pairing::White } else { Pairing::Black })
            .collect();
        self.trace_indexed(&choice)
    }

    /// State circles from a bitmask over edge indices (bit e set = white).
    pub(crate) fn state_circles_mask(&self, white_mask: u64) -> StateCircles {
        let choice: Vec<Pairing> = (0..self.edge_count())
            .map(|e| if white_mask >> e & 1 == 1 { Pairing::White } else { Pairing::Black })
            .collect();
        self.trace_indexed(&choice)
    }

    pub(crate) fn subset_from_mask(&self, mask: u64) -> EdgeSubset {
        (0..self.edge_count())
            .filter(|e| mask >> e & 1 == 1)
            .map(|e| self.labels[e].clone())
            .collect()
    }

}

/// Boundary components of the ribbon surface of `ap`.
pub fn boundary_components(ap: &ArrowPresentation) -> StateCircles {
    TransitionSystem::new(ap).boundary_components()
}

/// Is every boundary component of even degree? (Geometrically: does every
/// face of the embedded graph have an even number of sides?)
pub fn is_even_face(ap: &ArrowPresentation) -> bool {
    boundary_components(ap).all_even()
}

/// The state circles of the state smoothing `white_set` white, the rest
/// black.
pub fn state_circles(ap: &ArrowPresentation, white_set: &EdgeSubset) -> StateCircles {
    TransitionSystem::new(ap).state_circles(white_set)
}

/// Are all circles of the state even? States of this kind are exactly the
/// ones whose white-edge sets have Eulerian partial duals.
pub fn is_even_state(state: &StateCircles) -> bool {
    state.all_even()
}
