//! Ribbon graphs presented by labelled arrows on circles.
//!
//! A presentation is a set of circles (vertex-disc boundaries) carrying
//! directed labelled arrows, each label appearing exactly twice overall.
//! From that single combinatorial object the crate derives:
//!
//! - traced **states** — close each edge with one of three smoothings and
//!   follow the resulting closed walks ([`trace`]);
//! - **partial duals** along any edge subset, surface invariants
//!   (orientability, genus, Euler characteristic), and a canonical normal
//!   form ([`dual`]);
//! - the 4-regular **medial graph**, its crossing-total directions, and the
//!   edge-set families they classify ([`medial`]);
//! - brute-force **verification** of the characterizations tying those
//!   pieces together, over fixture, exhaustive, and randomized corpora
//!   ([`verify`]).
//!
//! Everything is exact and enumerative, sized for graphs with at most a
//! dozen edges.

pub mod arrow;
pub mod dual;
pub mod medial;
pub mod trace;
pub mod verify;

pub use arrow::{
    format_edge_subset, ArrowOccurrence, ArrowPresentation, Circle, EdgeLabel, EdgeSubset,
    ParseError, Violation,
};
pub use dual::{
    check_dual_identities, geometric_dual, is_orientable, normal_form, partial_dual,
    surface_invariants, DualIdentityReport, NormalForm, PairSelection, SurfaceInvariants,
};
pub use medial::{
    classify, enumerate_all_crossing, enumerate_crossing_total, eulerian_sets, even_face_sets,
    is_crossing_total, medial_graph, Direction, EdgeClassification, MedialError, MedialGraph,
};
pub use trace::{
    boundary_components, is_even_face, state_circles, GapId, Pairing, StateCircle, StateCircles,
    TransitionSystem,
};
pub use verify::{
    check_fixture, counterexample_search, exhaustive_corpus, find_loop_signature, fixture,
    generate_all, random_presentations, verify_bipartite_characterization,
    verify_bipartite_implies_even_face, verify_bounds, verify_corpus, verify_degree_bijection,
    verify_duality, verify_eulerian_characterization, verify_fixtures, verify_main_theorem,
    verify_presentation, ClaimStats, Counterexample, Failure, Fixture, FixtureExpectations,
    NonOrientable, VerificationReport, FIXTURES,
};
