//! Arrow presentations of ribbon graphs.
//!
//! A ribbon graph is stored as a set of circles (vertex-disc boundaries), each
//! carrying a cyclic sequence of labelled, directed arrows. Every label occurs
//! exactly twice across the whole presentation; the two equally labelled
//! arrows are the attachment sites of one edge. Circles are unoriented: the
//! stored traversal direction is representational, so rotating a circle or
//! reversing it while flipping every flag describes the same ribbon graph, as
//! does reversing both arrows of one label.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Edge label. Compares numerically when both sides are decimal numbers
/// (`"2" < "10"`), so enumerations and reports are ordered the way a reader
/// expects; ties on value fall back to the raw text to stay consistent with
/// equality (`"01"` and `"1"` are distinct labels).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeLabel(String);

impl EdgeLabel {
    pub fn new(text: impl Into<String>) -> Self {
        EdgeLabel(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric(&self) -> Option<u64> {
        // Only plain decimal tokens count: "+"/"-" would have been eaten by
        // the flag anyway, and exotic forms like "1e3" stay textual.
        if self.0.is_empty() || !self.0.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        self.0.parse().ok()
    }
}

impl Ord for EdgeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for EdgeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for EdgeLabel {
    fn from(s: &str) -> Self {
        EdgeLabel::new(s)
    }
}

/// A set of edge labels, used for smoothing choices and partial-dual sites.
pub type EdgeSubset = BTreeSet<EdgeLabel>;

/// Render an edge subset as `∅` or `{1,3}` for reports and listings.
pub fn format_edge_subset(subset: &EdgeSubset) -> String {
    if subset.is_empty() {
        "∅".to_string()
    } else {
        let labels: Vec<&str> = subset.iter().map(EdgeLabel::as_str).collect();
        format!("{{{}}}", labels.join(","))
    }
}

/// One arrow on a circle. `forward` is the flag: `true` (`+`) means the arrow
/// points along the circle's stored traversal direction, `false` (`-`)
/// against it.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrowOccurrence {
    pub label: EdgeLabel,
    pub forward: bool,
}

impl ArrowOccurrence {
    pub fn new(label: impl Into<String>, forward: bool) -> Self {
        ArrowOccurrence { label: EdgeLabel::new(label), forward }
    }

    /// The same arrow seen under reversed circle traversal.
    pub fn flipped(&self) -> Self {
        ArrowOccurrence { label: self.label.clone(), forward: !self.forward }
    }
}

impl fmt::Display for ArrowOccurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label, if self.forward { '+' } else { '-' })
    }
}

impl fmt::Debug for ArrowOccurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A vertex-disc boundary: named cyclic sequence of arrows. The name is pure
/// presentation (it survives parse/serialize round-trips) and carries no
/// structure.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circle {
    pub name: String,
    pub arrows: Vec<ArrowOccurrence>,
}

impl Circle {
    pub fn new(name: impl Into<String>, arrows: Vec<ArrowOccurrence>) -> Self {
        Circle { name: name.into(), arrows }
    }

    /// Number of arrow occurrences, i.e. the degree of the vertex.
    pub fn degree(&self) -> usize {
        self.arrows.len()
    }

    /// The arrows rotated so that position `by` comes first. Same circle,
    /// different starting point.
    pub fn rotated(&self, by: usize) -> Circle {
        let mut arrows = self.arrows.clone();
        arrows.rotate_left(by % self.arrows.len().max(1));
        Circle { name: self.name.clone(), arrows }
    }

    /// The circle traversed the other way: sequence reversed and every flag
    /// flipped. Describes the same vertex disc.
    pub fn reversed(&self) -> Circle {
        let arrows = self.arrows.iter().rev().map(ArrowOccurrence::flipped).collect();
        Circle { name: self.name.clone(), arrows }
    }

    /// Equality up to rotation and reversal-with-flag-flips, the two moves
    /// that change the stored sequence without changing the vertex disc.
    /// Names are ignored.
    pub fn same_vertex_disc(&self, other: &Circle) -> bool {
        if self.arrows.len() != other.arrows.len() {
            return false;
        }
        if self.arrows.is_empty() {
            return true;
        }
        let n = self.arrows.len();
        let reversed = other.reversed();
        (0..n).any(|r| {
            let rot = other.rotated(r);
            let rev = reversed.rotated(r);
            rot.arrows == self.arrows || rev.arrows == self.arrows
        })
    }
}

impl fmt::Display for Circle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for arrow in &self.arrows {
            write!(f, " {arrow}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Circle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A whole arrow presentation. Construction does not validate; call
/// [`ArrowPresentation::validate`] (or go through [`ArrowPresentation::parse`],
/// which rejects invalid input) before handing the value to the tracing or
/// duality machinery.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowPresentation {
    circles: Vec<Circle>,
}

impl ArrowPresentation {
    pub fn from_circles(circles: Vec<Circle>) -> Self {
        ArrowPresentation { circles }
    }

    /// Convenience constructor: circles given as flat token lists, names
    /// assigned `C1..Cn`.
    pub fn from_tokens(circles: &[&[(&str, bool)]]) -> Self {
        let circles = circles
            .iter()
            .enumerate()
            .map(|(i, arrows)| {
                Circle::new(
                    format!("C{}", i + 1),
                    arrows.iter().map(|(l, f)| ArrowOccurrence::new(*l, *f)).collect(),
                )
            })
            .collect();
        ArrowPresentation { circles }
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    /// Vertex count of the ribbon graph (isolated vertices included).
    pub fn vertex_count(&self) -> usize {
        self.circles.len()
    }

    /// Sorted list of distinct edge labels.
    pub fn edge_labels(&self) -> Vec<EdgeLabel> {
        let mut labels: BTreeSet<&EdgeLabel> = BTreeSet::new();
        for circle in &self.circles {
            for arrow in &circle.arrows {
                labels.insert(&arrow.label);
            }
        }
        labels.into_iter().cloned().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_labels().len()
    }

    /// Degree of each vertex, indexed like [`ArrowPresentation::circles`].
    pub fn vertex_degrees(&self) -> Vec<usize> {
        self.circles.iter().map(Circle::degree).collect()
    }

    /// All invariant violations, empty when the presentation is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut seen_names: BTreeSet<&str> = BTreeSet::new();
        for circle in &self.circles {
            if !seen_names.insert(&circle.name) {
                violations.push(Violation::DuplicateCircleName { name: circle.name.clone() });
            }
        }
        let mut multiplicity: BTreeMap<&EdgeLabel, usize> = BTreeMap::new();
        for circle in &self.circles {
            for arrow in &circle.arrows {
                *multiplicity.entry(&arrow.label).or_insert(0) += 1;
            }
        }
        for (label, count) in multiplicity {
            if count != 2 {
                violations.push(Violation::LabelMultiplicity { label: label.clone(), count });
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Parse the `.arp` text format: one circle per line, `name: tok tok ...`,
    /// each token `<label><+|->`; `#` starts a comment, blank lines are
    /// skipped. Rejects syntax errors (with line/column), duplicate circle
    /// names, and labels not occurring exactly twice.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut circles = Vec::new();
        for (line_index, raw_line) in text.lines().enumerate() {
            let line_no = line_index + 1;
            let line = match raw_line.find('#') {
                Some(hash) => &raw_line[..hash],
                None => raw_line,
            };
            if line.trim().is_empty() {
                continue;
            }
            let colon = line.find(':').ok_or(ParseError::Syntax {
                line: line_no,
                column: line.len() + 1,
                message: "expected `name: tokens...`, found no `:`".into(),
            })?;
            let name = line[..colon].trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(ParseError::Syntax {
                    line: line_no,
                    column: 1,
                    message: format!("bad circle name {:?}", line[..colon].trim()),
                });
            }
            let mut arrows = Vec::new();
            let body = &line[colon + 1..];
            let mut cursor = colon + 1;
            for token in body.split_whitespace() {
                // Column of the token start, for error messages.
                let at = line[cursor..].find(token).expect("token came from this slice") + cursor;
                cursor = at + token.len();
                let column = at + 1;
                let flag = match token.as_bytes().last() {
                    Some(b'+') => true,
                    Some(b'-') => false,
                    _ => {
                        return Err(ParseError::Syntax {
                            line: line_no,
                            column,
                            message: format!("token {token:?} must end in `+` or `-`"),
                        })
                    }
                };
                let label = &token[..token.len() - 1];
                let label_ok = !label.is_empty()
                    && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !label_ok {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column,
                        message: format!("bad edge label in token {token:?}"),
                    });
                }
                arrows.push(ArrowOccurrence::new(label, flag));
            }
            circles.push(Circle::new(name, arrows));
        }
        let presentation = ArrowPresentation { circles };
        let violations = presentation.validate();
        if violations.is_empty() {
            Ok(presentation)
        } else {
            Err(ParseError::Invalid { violations })
        }
    }

    /// Render back to `.arp` text: circles in stored order, tokens
    /// space-separated, one trailing newline. `parse ∘ serialize` is the
    /// identity on the stored structure.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for circle in &self.circles {
            out.push_str(&circle.to_string());
            out.push('\n');
        }
        out
    }

    /// One-line form used in reports and witnesses.
    pub fn display_inline(&self) -> String {
        self.circles
            .iter()
            .map(Circle::to_string)
            .collect::<Vec<_>>()
            .join(" / ")
    }

    /// The underlying abstract graph: one node per circle, one (multi-)edge
    /// per label, loops allowed.
    pub fn underlying_graph(&self) -> AbstractGraph {
        let mut sites: BTreeMap<EdgeLabel, Vec<usize>> = BTreeMap::new();
        for (circle_index, circle) in self.circles.iter().enumerate() {
            for arrow in &circle.arrows {
                sites.entry(arrow.label.clone()).or_default().push(circle_index);
            }
        }
        let edges = sites
            .into_iter()
            .map(|(label, ends)| {
                assert_eq!(ends.len(), 2, "label {label} must occur exactly twice");
                (label, ends[0], ends[1])
            })
            .collect();
        AbstractGraph { node_count: self.circles.len(), edges }
    }

    /// Every vertex degree even? (An edgeless presentation is Eulerian:
    /// all degrees are 0.)
    pub fn is_eulerian(&self) -> bool {
        self.circles.iter().all(|c| c.degree() % 2 == 0)
    }

    /// Is the underlying abstract graph bipartite? Loops force `false`;
    /// parallel edges are fine.
    pub fn is_bipartite(&self) -> bool {
        self.underlying_graph().is_bipartite()
    }

    /// Structural equality up to the per-circle symmetries (rotation,
    /// reversal with flag flips) with circle order fixed and labels/flags
    /// otherwise untouched. Names are ignored. This is the notion in which a
    /// partial dual along the empty set reproduces its input.
    pub fn representation_eq(&self, other: &ArrowPresentation) -> bool {
        self.circles.len() == other.circles.len()
            && self
                .circles
                .iter()
                .zip(&other.circles)
                .all(|(a, b)| a.same_vertex_disc(b))
    }
}

impl fmt::Display for ArrowPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl fmt::Debug for ArrowPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArrowPresentation({})", self.display_inline())
    }
}

/// Structural invariant violations reported by [`ArrowPresentation::validate`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    LabelMultiplicity { label: EdgeLabel, count: usize },
    DuplicateCircleName { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LabelMultiplicity { label, count } => match count {
                1 => write!(f, "label {label} occurs once"),
                n => write!(f, "label {label} occurs {n} times"),
            },
            Violation::DuplicateCircleName { name } => {
                write!(f, "duplicate circle name {name:?}")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid presentation: {}", format_violations(.violations))]
    Invalid { violations: Vec<Violation> },
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")
}

/// Abstract multigraph underlying a presentation. Node indices are circle
/// indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbstractGraph {
    pub node_count: usize,
    /// One entry per edge label: `(label, endpoint, endpoint)`.
    pub edges: Vec<(EdgeLabel, usize, usize)>,
}

impl AbstractGraph {
    /// BFS 2-colouring. Parallel edges never hurt bipartiteness; any loop
    /// kills it immediately.
    pub fn is_bipartite(&self) -> bool {
        if self.edges.iter().any(|(_, a, b)| a == b) {
            return false;
        }
        let mut adjacency = vec![Vec::new(); self.node_count];
        for (_, a, b) in &self.edges {
            adjacency[*a].push(*b);
            adjacency[*b].push(*a);
        }
        let mut colour = vec![u8::MAX; self.node_count];
        for start in 0..self.node_count {
            if colour[start] != u8::MAX {
                continue;
            }
            colour[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(node) = queue.pop_front() {
                for &next in &adjacency[node] {
                    if colour[next] == u8::MAX {
                        colour[next] = 1 - colour[node];
                        queue.push_back(next);
                    } else if colour[next] == colour[node] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Connected components of the node set (isolated nodes are their own
    /// components). Returns the component index of every node.
    pub fn components(&self) -> Vec<usize> {
        let mut dsu = DisjointSets::new(self.node_count);
        for (_, a, b) in &self.edges {
            dsu.union(*a, *b);
        }
        dsu.component_index()
    }
}

/// Small union-find used for components and the orientability parity check.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    /// Dense component numbering in order of first appearance.
    pub(crate) fn component_index(&mut self) -> Vec<usize> {
        let mut index_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        (0..self.parent.len())
            .map(|v| {
                let root = self.find(v);
                let next = index_of_root.len();
                *index_of_root.entry(root).or_insert(next)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus() -> ArrowPresentation {
        ArrowPresentation::parse("C1: 1+ 1+\n").unwrap()
    }

    #[test]
    fn parses_single_loop() {
        let ap = annulus();
        assert_eq!(ap.vertex_count(), 1);
        assert_eq!(ap.edge_count(), 1);
        assert_eq!(ap.vertex_degrees(), vec![2]);
    }

    #[test]
    fn parses_two_circles_with_comments_and_blanks() {
        let ap = ArrowPresentation::parse("# a path\nC1: 1+\n\nC2: 1-  # other end\n").unwrap();
        assert_eq!(ap.vertex_count(), 2);
        assert_eq!(ap.circles()[1].arrows, vec![ArrowOccurrence::new("1", false)]);
    }

    #[test]
    fn parse_reports_multiplicity_one() {
        let err = ArrowPresentation::parse("C1: 1+ 2+ 1-\n").unwrap_err();
        assert_eq!(err.to_string(), "invalid presentation: label 2 occurs once");
    }

    #[test]
    fn parse_reports_multiplicity_three() {
        let err = ArrowPresentation::parse("C1: 3+ 3+ 3-\n").unwrap_err();
        match err {
            ParseError::Invalid { violations } => assert_eq!(
                violations,
                vec![Violation::LabelMultiplicity { label: EdgeLabel::new("3"), count: 3 }]
            ),
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_duplicate_circle_names() {
        let err = ArrowPresentation::parse("C1: 1+\nC1: 1-\n").unwrap_err();
        assert!(err.to_string().contains("duplicate circle name"), "{err}");
    }

    #[test]
    fn parse_rejects_bad_token_with_position() {
        let err = ArrowPresentation::parse("C1: 1+ 1\n").unwrap_err();
        match err {
            ParseError::Syntax { line, column, .. } => {
                assert_eq!((line, column), (1, 8));
            }
            other => panic!("expected Syntax, got {other:?}"),
        }
    }

    #[test]
    fn serialize_round_trips_exactly() {
        let text = "C1: 1+ 2- 1-\nC2: 2+\nC3:\n";
        let ap = ArrowPresentation::parse(text).unwrap();
        assert_eq!(ap.serialize(), text);
        let again = ArrowPresentation::parse(&ap.serialize()).unwrap();
        assert_eq!(again, ap);
    }

    #[test]
    fn empty_circle_serializes_without_trailing_space() {
        let ap = ArrowPresentation::parse("C1:\n").unwrap();
        assert_eq!(ap.serialize(), "C1:\n");
        assert_eq!(ap.vertex_degrees(), vec![0]);
    }

    #[test]
    fn label_order_is_numeric_aware() {
        let ap = ArrowPresentation::parse("C1: 10+ 2+ 10- 2- x+ x-\n").unwrap();
        let labels: Vec<String> = ap.edge_labels().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, vec!["2", "10", "x"]);
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let ap = ArrowPresentation::parse("C1: 1+ 2+ 1+ 2+\nC2: 3- 3+\n").unwrap();
        let total: usize = ap.vertex_degrees().iter().sum();
        assert_eq!(total, 2 * ap.edge_count());
    }

    #[test]
    fn eulerian_and_bipartite_basics() {
        assert!(annulus().is_eulerian());
        assert!(!annulus().is_bipartite(), "loops are never bipartite");
        let path = ArrowPresentation::parse("C1: 1+\nC2: 1-\n").unwrap();
        assert!(!path.is_eulerian());
        assert!(path.is_bipartite());
        let digon = ArrowPresentation::parse("C1: 1+ 2+\nC2: 2- 1-\n").unwrap();
        assert!(digon.is_eulerian());
        assert!(digon.is_bipartite(), "parallel edges do not break bipartiteness");
    }

    #[test]
    fn underlying_graph_records_loops_and_ends() {
        let ap = ArrowPresentation::parse("C1: 1+ 1- 2+\nC2: 2-\n").unwrap();
        let graph = ap.underlying_graph();
        assert_eq!(graph.node_count, 2);
        assert_eq!(
            graph.edges,
            vec![(EdgeLabel::new("1"), 0, 0), (EdgeLabel::new("2"), 0, 1)]
        );
    }

    #[test]
    fn circle_symmetries_preserve_vertex_disc() {
        let circle = Circle::new("C1", vec![
            ArrowOccurrence::new("1", true),
            ArrowOccurrence::new("2", false),
            ArrowOccurrence::new("1", false),
        ]);
        assert!(circle.same_vertex_disc(&circle.rotated(2)));
        assert!(circle.same_vertex_disc(&circle.reversed()));
        assert!(circle.same_vertex_disc(&circle.reversed().rotated(1)));
        // Reversal flips every flag, so [1+ 2- 1-] reversed is [1+ 2+ 1-].
        let reversal_image = Circle::new("C1", vec![
            ArrowOccurrence::new("1", true),
            ArrowOccurrence::new("2", true),
            ArrowOccurrence::new("1", false),
        ]);
        assert!(circle.same_vertex_disc(&reversal_image));
        // All-plus flags match neither the circle nor its reversal.
        let other = Circle::new("C1", vec![
            ArrowOccurrence::new("1", true),
            ArrowOccurrence::new("2", true),
            ArrowOccurrence::new("1", true),
        ]);
        assert!(!circle.same_vertex_disc(&other));
    }

    #[test]
    fn representation_eq_ignores_rotation_and_names() {
        let a = ArrowPresentation::parse("C1: 1+ 2+ 1+ 2+\n").unwrap();
        let b = ArrowPresentation::parse("X: 2+ 1+ 2+ 1+\n").unwrap();
        assert!(a.representation_eq(&b));
        let c = ArrowPresentation::parse("X: 2+ 1+ 2- 1+\n").unwrap();
        assert!(!a.representation_eq(&c));
    }

    #[test]
    fn validate_lists_all_violations() {
        let ap = ArrowPresentation::from_tokens(&[&[("1", true)], &[("2", true), ("2", false)]]);
        let violations = ap.validate();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].to_string(), "label 1 occurs once");
    }
}
