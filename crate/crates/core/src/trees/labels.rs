use super::{
    enumerate_double_symmetric, Branch, EmbeddedTree, HalfPlane, Slot, VertexKind,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Symbolic asymptotic value attached to a face.
///
/// `a` is a non-real, non-imaginary value; `abar` its conjugate. `Sym` holds
/// any other symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FaceLabel {
    Zero,
    A,
    NegA,
    ConjA,
    NegConjA,
    Sym(String),
}

impl FaceLabel {
    pub fn is_zero(&self) -> bool {
        *self == FaceLabel::Zero
    }

    /// Image under complex conjugation.
    pub fn conj(&self) -> FaceLabel {
        match self {
            FaceLabel::A => FaceLabel::ConjA,
            FaceLabel::ConjA => FaceLabel::A,
            FaceLabel::NegA => FaceLabel::NegConjA,
            FaceLabel::NegConjA => FaceLabel::NegA,
            other => other.clone(),
        }
    }

    /// Image under `w ↦ −w̄`.
    pub fn neg_conj(&self) -> FaceLabel {
        match self {
            FaceLabel::A => FaceLabel::NegConjA,
            FaceLabel::NegConjA => FaceLabel::A,
            FaceLabel::NegA => FaceLabel::ConjA,
            FaceLabel::ConjA => FaceLabel::NegA,
            other => other.clone(),
        }
    }
}

impl fmt::Display for FaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceLabel::Zero => write!(f, "0"),
            FaceLabel::A => write!(f, "a"),
            FaceLabel::NegA => write!(f, "-a"),
            FaceLabel::ConjA => write!(f, "abar"),
            FaceLabel::NegConjA => write!(f, "-abar"),
            FaceLabel::Sym(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for FaceLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "" => return Err(Error::Parse("empty face label".into())),
            "0" => FaceLabel::Zero,
            "a" => FaceLabel::A,
            "-a" => FaceLabel::NegA,
            "abar" => FaceLabel::ConjA,
            "-abar" => FaceLabel::NegConjA,
            other => FaceLabel::Sym(other.to_string()),
        })
    }
}

impl From<FaceLabel> for String {
    fn from(l: FaceLabel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for FaceLabel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Face labels of a double-symmetric eigenfunction for `d ∈ {4, 6}`:
/// faces `0` and `d/2 + 1` carry `0`, face `1` carries `a`, and the rest
/// follow from the two symmetries. For `d = 6` the two faces fixed by
/// `z ↦ −z̄` carry `0` when `alternating` and `±b` otherwise.
pub fn standard_labels(d: usize, alternating: bool) -> Result<Vec<FaceLabel>> {
    use FaceLabel::*;
    match d {
        4 => Ok(vec![Zero, A, NegConjA, Zero, NegA, ConjA]),
        6 => {
            let (b, nb) = if alternating {
                (Zero, Zero)
            } else {
                (Sym("b".into()), Sym("-b".into()))
            };
            Ok(vec![Zero, A, b, NegConjA, Zero, NegA, nb, ConjA])
        }
        _ => Err(Error::Unsupported(d)),
    }
}

/// Outcome of the structural checks on a labelled tree of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub d: usize,
    /// Adjacent faces (across any edge or end) carry different labels.
    pub distinct_across_edges: bool,
    /// No `o` vertex lies on a face labelled `0`.
    pub o_avoids_zero: bool,
    /// Every `x` vertex touches a `0` face, is adjacent to an `o` vertex, or
    /// has an incident edge or end between two non-zero faces.
    pub x_condition: bool,
    /// The tree has `d + 2` ends.
    pub end_count: bool,
    /// Faces `0` and `d/2 + 1` are labelled `0` and swapped by `z ↦ −z̄`.
    pub zero_faces: bool,
    /// For `alternating` checks: even faces are `0`, odd faces are not.
    pub alternating: Option<bool>,
    pub violations: Vec<String>,
}

impl Prop1Report {
    pub fn passed(&self) -> bool {
        self.distinct_across_edges
            && self.o_avoids_zero
            && self.x_condition
            && self.end_count
            && self.zero_faces
            && self.alternating.unwrap_or(true)
    }
}

/// Check a labelled, kind-decorated tree against the structure required of
/// the tree of an eigenfunction of a degree-`d` potential.
pub fn check_proposition1(t: &EmbeddedTree, d: usize, alternating: bool) -> Result<Prop1Report> {
    let labels = t
        .face_labels()
        .ok_or_else(|| Error::InvalidTree("tree has no face labels".into()))?;
    let e = t.ends();
    let corners = t.corner_faces();
    let mut violations = Vec::new();

    let end_count = e == d + 2;
    if !end_count {
        violations.push(format!("{e} ends, expected {}", d + 2));
    }

    let half = d / 2 + 1;
    let zero_faces = end_count
        && labels[0].is_zero()
        && labels[half].is_zero()
        && t.imaginary_symmetry()
            .and_then(|i| i.reflection_constant())
            .is_some_and(|c| (c + e - 1) % e == half);
    if !zero_faces {
        violations.push(format!("faces 0 and {half} are not a symmetric pair of zero faces"));
    }

    let mut distinct = true;
    let mut o_ok = true;
    let mut x_ok = true;
    for v in 0..t.vertex_count() {
        let deg = t.degree(v);
        let mut nonzero_slot = false;
        for p in 0..deg {
            let (a, b) = t.slot_faces(&corners, v, p);
            if labels[a] == labels[b] {
                distinct = false;
                violations.push(format!("vertex {v} slot {p} separates two faces labelled {}", labels[a]));
            }
            if !labels[a].is_zero() && !labels[b].is_zero() {
                nonzero_slot = true;
            }
        }
        let touches_zero = corners[v].iter().any(|&f| labels[f].is_zero());
        match t.kinds()[v] {
            VertexKind::O if touches_zero => {
                o_ok = false;
                violations.push(format!("o vertex {v} lies on a zero face"));
            }
            VertexKind::X => {
                let next_to_o = t.rotation()[v].iter().any(|s| match s {
                    Slot::Edge(u) => t.kinds()[*u] == VertexKind::O,
                    Slot::End(_) => false,
                });
                if !(touches_zero || next_to_o || nonzero_slot) {
                    x_ok = false;
                    violations.push(format!("x vertex {v} is isolated from zero faces and o vertices"));
                }
            }
            _ => {}
        }
    }

    let alternating = alternating.then(|| {
        let ok = (0..e).all(|j| labels[j].is_zero() == (j % 2 == 0));
        if !ok {
            violations.push("face labels do not alternate between 0 and non-zero".into());
        }
        ok
    });

    Ok(Prop1Report {
        d,
        distinct_across_edges: distinct,
        o_avoids_zero: o_ok,
        x_condition: x_ok,
        end_count,
        zero_faces,
        alternating,
        violations,
    })
}

/// Orbits of the vertices under the group generated by `R` and `I`.
fn vertex_orbits(t: &EmbeddedTree) -> Vec<Vec<usize>> {
    let n = t.vertex_count();
    let maps: Vec<&[usize]> = [t.real_symmetry(), t.imaginary_symmetry()]
        .into_iter()
        .flatten()
        .map(|inv| inv.vertex_map.as_slice())
        .collect();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits = Vec::new();
    for v in 0..n {
        if orbit_of[v] != usize::MAX {
            continue;
        }
        let mut orbit = vec![v];
        orbit_of[v] = orbits.len();
        let mut k = 0;
        while k < orbit.len() {
            let w = orbit[k];
            for m in &maps {
                if orbit_of[m[w]] == usize::MAX {
                    orbit_of[m[w]] = orbits.len();
                    orbit.push(m[w]);
                }
            }
            k += 1;
        }
        orbits.push(orbit);
    }
    orbits
}

/// Number of double-symmetric trees of degree `d ∈ {4, 6}` compatible with
/// the standard face labels (labels differ across every edge and end).
///
/// With `decorated`, counts pairs of such a tree and a symmetric assignment
/// of `o`/`x` to its vertices satisfying the vertex conditions of
/// [`check_proposition1`].
pub fn count_filtered(d: usize, decorated: bool) -> Result<usize> {
    let labels = standard_labels(d, d == 6)?;
    let e = d + 2;
    let mut count = 0;
    for tree in enumerate_double_symmetric(e, e % 4 == 2)? {
        let tree = tree.with_face_labels(labels.clone())?;
        let base = check_proposition1(&tree, d, d == 6)?;
        if !(base.distinct_across_edges && base.zero_faces && base.alternating.unwrap_or(true)) {
            continue;
        }
        if !decorated {
            count += 1;
            continue;
        }
        let orbits = vertex_orbits(&tree);
        for mask in 0u64..(1u64 << orbits.len()) {
            let mut kinds = vec![VertexKind::X; tree.vertex_count()];
            for (k, orbit) in orbits.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    for &v in orbit {
                        kinds[v] = VertexKind::O;
                    }
                }
            }
            let decorated = tree.clone().with_kinds(kinds)?;
            if check_proposition1(&decorated, d, d == 6)?.passed() {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The labelled tree of a double-symmetric eigenfunction of degree
/// `d ∈ {4, 6}` with `n_real` real and `n_imag` imaginary zeros, all zeros on
/// the axes. Zeros are `o` vertices; the origin is a zero iff `n_real` is odd.
pub fn from_census(d: usize, n_real: usize, n_imag: usize) -> Result<EmbeddedTree> {
    if d != 4 && d != 6 {
        return Err(Error::Unsupported(d));
    }
    if n_imag % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "imaginary zeros come in pairs, got {n_imag}"
        )));
    }
    let centre = if n_real % 2 == 1 { VertexKind::O } else { VertexKind::X };
    let side = n_real / 2;
    let up = vec![VertexKind::O; n_imag / 2];
    let top = if d == 4 {
        Branch::End
    } else {
        Branch::Node(VertexKind::X, vec![Branch::End, Branch::End])
    };
    let mut spine = vec![(VertexKind::X, vec![Branch::End])];
    spine.extend((0..side).map(|_| (VertexKind::O, Vec::new())));
    spine.push((centre, vec![Branch::chain(&up, top)]));
    spine.extend((0..side).map(|_| (VertexKind::O, Vec::new())));
    spine.push((VertexKind::X, vec![Branch::End]));
    let half = HalfPlane {
        left_end: false,
        spine,
        right_end: false,
    };
    let (builder, anchor) = half.build();
    builder
        .finish(anchor, 1, super::Geometry::Stokes)?
        .with_face_labels(standard_labels(d, d == 6)?)?
        .with_geometric_symmetries()
}
