//! Planar trees with unbounded ends, their symmetries and line complexes.
//!
//! A tree is stored as a rotation system: each vertex lists its incident
//! slots (edges to other vertices or unbounded ends) in counterclockwise
//! order. Ends are numbered `0..E` in counterclockwise order, and face `j`
//! is the region between end `j` and end `j + 1`.

mod enumerate;
mod labels;
mod line_complex;

pub use enumerate::{
    enumerate_double_symmetric, enumerate_double_symmetric_forms, enumerate_rooted_symmetric,
    Planted,
};
pub use labels::{
    check_proposition1, count_filtered, from_census, standard_labels, FaceLabel, Prop1Report,
};
pub use line_complex::{
    exponential_complex, propagate_labels, symmetric_quintic_complexes, validate_line_complex,
    LineComplex, LineComplexReport,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    O,
    X,
    Plain,
}

impl VertexKind {
    pub fn symbol(self) -> char {
        match self {
            VertexKind::O => 'o',
            VertexKind::X => 'x',
            VertexKind::Plain => '*',
        }
    }

    /// Swap `o` and `x`.
    pub fn swapped(self) -> Self {
        match self {
            VertexKind::O => VertexKind::X,
            VertexKind::X => VertexKind::O,
            VertexKind::Plain => VertexKind::Plain,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Edge(usize),
    End(usize),
}

/// Placement of the `E` ends on rays from the origin.
///
/// `Stokes`: end `j` at angle `(2j − 1)π/E`, as for the anti-Stokes rays of a
/// degree `E − 2` potential. `Axial`: end `j` at angle `2πj/E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    #[default]
    Stokes,
    Axial,
}

impl Geometry {
    /// `c` such that complex conjugation maps end `j` to `c − j`.
    pub fn real_reflection(self) -> usize {
        match self {
            Geometry::Stokes => 1,
            Geometry::Axial => 0,
        }
    }

    /// `c` such that `z ↦ −z̄` maps end `j` to `c − j`.
    pub fn imaginary_reflection(self, ends: usize) -> usize {
        match self {
            Geometry::Stokes => ends / 2 + 1,
            Geometry::Axial => ends / 2,
        }
    }
}

/// Orientation-reversing automorphism of an embedded tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Involution {
    pub vertex_map: Vec<usize>,
    pub end_map: Vec<usize>,
}

impl Involution {
    /// The reflection constant `c` with `end_map[j] = c − j (mod E)`, if any.
    pub fn reflection_constant(&self) -> Option<usize> {
        let e = self.end_map.len();
        if e == 0 {
            return None;
        }
        let c = self.end_map[0] % e;
        (0..e)
            .all(|j| self.end_map[j] == (c + e - j) % e)
            .then_some(c)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawTree {
    kinds: Vec<VertexKind>,
    rotation: Vec<Vec<Slot>>,
    #[serde(default)]
    geometry: Geometry,
    #[serde(default)]
    face_labels: Option<Vec<FaceLabel>>,
    #[serde(default)]
    r: Option<Involution>,
    #[serde(default)]
    i: Option<Involution>,
}

/// A finite plane tree with `E ≥ 2` unbounded ends.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct EmbeddedTree {
    kinds: Vec<VertexKind>,
    rotation: Vec<Vec<Slot>>,
    ends: usize,
    geometry: Geometry,
    face_labels: Option<Vec<FaceLabel>>,
    r: Option<Involution>,
    i: Option<Involution>,
}

impl TryFrom<RawTree> for EmbeddedTree {
    type Error = Error;
    fn try_from(raw: RawTree) -> Result<Self> {
        let mut t = EmbeddedTree::new(raw.kinds, raw.rotation, raw.geometry)?;
        if let Some(labels) = raw.face_labels {
            t = t.with_face_labels(labels)?;
        }
        if let Some(r) = raw.r {
            t.set_symmetry('r', r)?;
        }
        if let Some(i) = raw.i {
            t.set_symmetry('i', i)?;
        }
        Ok(t)
    }
}

impl From<EmbeddedTree> for RawTree {
    fn from(t: EmbeddedTree) -> Self {
        RawTree {
            kinds: t.kinds,
            rotation: t.rotation,
            geometry: t.geometry,
            face_labels: t.face_labels,
            r: t.r,
            i: t.i,
        }
    }
}

/// One step of the boundary walk around a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    End(usize),
    Down(usize),
    Up(usize),
}

struct Walk {
    steps: Vec<Step>,
    ends: Vec<usize>,
    /// Face index of corner `k` at each vertex (between slots `k` and `k+1`).
    corner_face: Vec<Vec<usize>>,
}

fn slot_index(rotation: &[Vec<Slot>], v: usize, target: Slot) -> Option<usize> {
    rotation[v].iter().position(|&s| s == target)
}

/// Walk the boundary counterclockwise starting just before slot `p` at `v`.
/// Corner faces are numbered by position along the walk: the face following
/// the `k`-th end seen has index `k`.
fn walk_from(rotation: &[Vec<Slot>], v0: usize, p0: usize) -> Result<Walk> {
    let total_slots: usize = rotation.iter().map(Vec::len).sum();
    let mut corner_face: Vec<Vec<usize>> =
        rotation.iter().map(|r| vec![usize::MAX; r.len()]).collect();
    let mut steps = Vec::new();
    let mut ends = Vec::new();
    let mut seen_edge = BTreeSet::new();
    let (mut v, mut p) = (v0, p0);
    let mut face = usize::MAX;
    for _ in 0..=total_slots {
        match rotation[v][p] {
            Slot::End(e) => {
                ends.push(e);
                face = ends.len() - 1;
                corner_face[v][p] = face;
                steps.push(Step::End(e));
                p = (p + 1) % rotation[v].len();
            }
            Slot::Edge(u) => {
                let q = slot_index(rotation, u, Slot::Edge(v)).ok_or_else(|| {
                    Error::InvalidTree(format!("edge {v}-{u} is not reciprocal"))
                })?;
                if seen_edge.insert((v.min(u), v.max(u))) {
                    steps.push(Step::Down(u));
                } else {
                    steps.push(Step::Up(u));
                }
                if face != usize::MAX {
                    corner_face[u][q] = face;
                }
                v = u;
                p = (q + 1) % rotation[u].len();
            }
        }
        if v == v0 && p == p0 {
            return Ok(Walk {
                steps,
                ends,
                corner_face,
            });
        }
    }
    Err(Error::InvalidTree("boundary walk does not close".into()))
}

impl EmbeddedTree {
    /// Validate a rotation system. Ends must appear in counterclockwise order.
    pub fn new(kinds: Vec<VertexKind>, rotation: Vec<Vec<Slot>>, geometry: Geometry) -> Result<Self> {
        let n = rotation.len();
        if n == 0 || kinds.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} kinds for {} vertices",
                kinds.len(),
                n
            )));
        }
        let mut end_seen = Vec::new();
        let mut edges = 0usize;
        for (v, slots) in rotation.iter().enumerate() {
            if slots.len() < 2 && n > 1 {
                return Err(Error::InvalidTree(format!("vertex {v} has degree {}", slots.len())));
            }
            for &s in slots {
                match s {
                    Slot::End(e) => {
                        if e >= end_seen.len() {
                            end_seen.resize(e + 1, 0usize);
                        }
                        end_seen[e] += 1;
                    }
                    Slot::Edge(u) => {
                        if u >= n || u == v {
                            return Err(Error::InvalidTree(format!("bad edge {v}-{u}")));
                        }
                        let back = rotation[u].iter().filter(|&&t| t == Slot::Edge(v)).count();
                        let fwd = slots.iter().filter(|&&t| t == Slot::Edge(u)).count();
                        if back != 1 || fwd != 1 {
                            return Err(Error::InvalidTree(format!(
                                "edge {v}-{u} must appear once at each endpoint"
                            )));
                        }
                        edges += 1;
                    }
                }
            }
        }
        let ends = end_seen.len();
        if ends < 2 || end_seen.iter().any(|&c| c != 1) {
            return Err(Error::InvalidTree(
                "end ids must be 0..E with each used once and E >= 2".into(),
            ));
        }
        if edges / 2 + 1 != n {
            return Err(Error::InvalidTree("graph has a cycle or is disconnected".into()));
        }
        let (v0, p0) = Self::locate_end(&rotation, 0);
        let walk = walk_from(&rotation, v0, p0)?;
        if walk.ends.len() != ends || walk.ends.iter().enumerate().any(|(k, &e)| k != e) {
            return Err(Error::InvalidTree(format!(
                "ends are not in counterclockwise order: {:?}",
                walk.ends
            )));
        }
        Ok(EmbeddedTree {
            kinds,
            rotation,
            ends,
            geometry,
            face_labels: None,
            r: None,
            i: None,
        })
    }

    fn locate_end(rotation: &[Vec<Slot>], e: usize) -> (usize, usize) {
        for (v, slots) in rotation.iter().enumerate() {
            if let Some(p) = slots.iter().position(|&s| s == Slot::End(e)) {
                return (v, p);
            }
        }
        unreachable!("end {e} missing")
    }

    pub fn with_face_labels(mut self, labels: Vec<FaceLabel>) -> Result<Self> {
        if labels.len() != self.ends {
            return Err(Error::InvalidTree(format!(
                "{} face labels for {} faces",
                labels.len(),
                self.ends
            )));
        }
        self.face_labels = Some(labels);
        Ok(self)
    }

    pub fn with_kinds(mut self, kinds: Vec<VertexKind>) -> Result<Self> {
        if kinds.len() != self.kinds.len() {
            return Err(Error::InvalidTree("kind vector has wrong length".into()));
        }
        self.kinds = kinds;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }
    pub fn ends(&self) -> usize {
        self.ends
    }
    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }
    pub fn rotation(&self) -> &[Vec<Slot>] {
        &self.rotation
    }
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
    pub fn face_labels(&self) -> Option<&[FaceLabel]> {
        self.face_labels.as_deref()
    }
    pub fn real_symmetry(&self) -> Option<&Involution> {
        self.r.as_ref()
    }
    pub fn imaginary_symmetry(&self) -> Option<&Involution> {
        self.i.as_ref()
    }
    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Faces around each vertex, corner `k` lying between slots `k` and `k+1`.
    pub fn corner_faces(&self) -> Vec<Vec<usize>> {
        let (v0, p0) = Self::locate_end(&self.rotation, 0);
        walk_from(&self.rotation, v0, p0)
            .expect("validated tree")
            .corner_face
    }

    /// The two faces on either side of slot `p` at `v`: `(before, after)` in
    /// counterclockwise order.
    pub fn slot_faces(&self, corners: &[Vec<usize>], v: usize, p: usize) -> (usize, usize) {
        let d = self.rotation[v].len();
        (corners[v][(p + d - 1) % d], corners[v][p])
    }

    /// Derive the orientation-reversing automorphism inducing `end_map`.
    pub fn derive_involution(&self, end_map: &[usize]) -> Result<Involution> {
        let e = self.ends;
        if end_map.len() != e || end_map.iter().any(|&x| x >= e) {
            return Err(Error::InvalidTree("end map has wrong shape".into()));
        }
        let n = self.rotation.len();
        let mut vmap = vec![usize::MAX; n];
        let (v0, p0) = Self::locate_end(&self.rotation, 0);
        let (w0, q0) = Self::locate_end(&self.rotation, end_map[0]);
        let fail = || Error::InvalidTree("end map is not induced by a reflection".into());
        let mut queue = VecDeque::from([(v0, p0, w0, q0)]);
        while let Some((v, p, w, q)) = queue.pop_front() {
            let d = self.rotation[v].len();
            if self.rotation[w].len() != d {
                return Err(fail());
            }
            if vmap[v] != usize::MAX {
                if vmap[v] != w {
                    return Err(fail());
                }
                continue;
            }
            vmap[v] = w;
            for k in 0..d {
                let ps = (p + k) % d;
                let qs = (q + d - k) % d;
                match (self.rotation[v][ps], self.rotation[w][qs]) {
                    (Slot::End(a), Slot::End(b)) if end_map[a] == b => {}
                    (Slot::Edge(u), Slot::Edge(x)) => {
                        let a = slot_index(&self.rotation, u, Slot::Edge(v)).unwrap();
                        let b = slot_index(&self.rotation, x, Slot::Edge(w)).unwrap();
                        queue.push_back((u, a, x, b));
                    }
                    _ => return Err(fail()),
                }
            }
        }
        if vmap.contains(&usize::MAX) {
            return Err(fail());
        }
        Ok(Involution {
            vertex_map: vmap,
            end_map: end_map.to_vec(),
        })
    }

    fn standard_end_map(&self, c: usize) -> Vec<usize> {
        let e = self.ends;
        (0..e).map(|j| (c % e + e - j) % e).collect()
    }

    /// Attach the symmetry `R` (`'r'`) or `I` (`'i'`) after checking it.
    pub fn set_symmetry(&mut self, which: char, inv: Involution) -> Result<()> {
        inv.reflection_constant()
            .ok_or_else(|| Error::InvalidTree("symmetry end map is not a reflection".into()))?;
        let derived = self.derive_involution(&inv.end_map)?;
        if derived.vertex_map != inv.vertex_map {
            return Err(Error::InvalidTree("symmetry vertex map is inconsistent".into()));
        }
        if inv.vertex_map.iter().enumerate().any(|(v, &w)| inv.vertex_map[w] != v) {
            return Err(Error::InvalidTree("symmetry is not an involution".into()));
        }
        match which {
            'r' => self.r = Some(inv),
            'i' => self.i = Some(inv),
            _ => return Err(Error::InvalidArgument(format!("unknown symmetry {which}"))),
        }
        if let (Some(r), Some(i)) = (&self.r, &self.i) {
            let commute = (0..self.rotation.len())
                .all(|v| r.vertex_map[i.vertex_map[v]] == i.vertex_map[r.vertex_map[v]]);
            if !commute {
                return Err(Error::InvalidTree("R and I do not commute".into()));
            }
        }
        Ok(())
    }

    /// Attach the geometric symmetries `R` and `I` of the tree's [`Geometry`],
    /// failing if the tree does not have them.
    pub fn with_geometric_symmetries(mut self) -> Result<Self> {
        let r = self.derive_involution(&self.standard_end_map(self.geometry.real_reflection()))?;
        let i = self.derive_involution(
            &self.standard_end_map(self.geometry.imaginary_reflection(self.ends)),
        )?;
        self.set_symmetry('r', r)?;
        self.set_symmetry('i', i)?;
        Ok(self)
    }

    /// Whether an orientation-reversing automorphism realises `j ↦ c − j`.
    pub fn has_reflection(&self, c: usize) -> bool {
        self.derive_involution(&self.standard_end_map(c)).is_ok()
    }

    /// Branch vertices (degree ≠ 2) with degree-2 chains replaced by edges.
    fn skeleton(&self) -> Skeleton {
        let n = self.rotation.len();
        let branch: Vec<usize> = if self.rotation.iter().all(|s| s.len() == 2) {
            vec![0]
        } else {
            (0..n).filter(|&v| self.rotation[v].len() != 2).collect()
        };
        let mut index = vec![usize::MAX; n];
        for (k, &v) in branch.iter().enumerate() {
            index[v] = k;
        }
        let mut rotation = Vec::with_capacity(branch.len());
        for &v in &branch {
            let mut slots = Vec::new();
            for &s in &self.rotation[v] {
                let (mut prev, mut cur) = (v, s);
                let target = loop {
                    match cur {
                        Slot::End(e) => break Slot::End(e),
                        Slot::Edge(u) if index[u] != usize::MAX => break Slot::Edge(index[u]),
                        Slot::Edge(u) => {
                            let next = *self.rotation[u]
                                .iter()
                                .find(|&&t| t != Slot::Edge(prev))
                                .unwrap();
                            prev = u;
                            cur = next;
                        }
                    }
                };
                slots.push(target);
            }
            rotation.push(slots);
        }
        Skeleton {
            kinds: branch.iter().map(|&v| self.kinds[v]).collect(),
            rotation,
        }
    }

    /// The tree with every degree-2 vertex removed. Symmetries are re-derived.
    pub fn contract(&self) -> EmbeddedTree {
        let sk = self.skeleton();
        let mut t = EmbeddedTree::new(sk.kinds, sk.rotation, self.geometry)
            .expect("contraction preserves validity");
        t.face_labels = self.face_labels.clone();
        for (which, inv) in [('r', &self.r), ('i', &self.i)] {
            if let Some(inv) = inv {
                let derived = t.derive_involution(&inv.end_map).expect("contraction keeps symmetry");
                t.set_symmetry(which, derived).expect("contraction keeps symmetry");
            }
        }
        t
    }

    /// Number of vertices of each kind.
    pub fn kind_counts(&self) -> (usize, usize, usize) {
        let c = |k| self.kinds.iter().filter(|&&x| x == k).count();
        (c(VertexKind::O), c(VertexKind::X), c(VertexKind::Plain))
    }

    /// Diagonals of the dissection of the `E`-gon whose vertices are faces.
    pub fn diagonals(&self) -> Vec<(usize, usize)> {
        let c = self.contract();
        let corners = c.corner_faces();
        let mut out = BTreeSet::new();
        for v in 0..c.rotation.len() {
            for (p, s) in c.rotation[v].iter().enumerate() {
                if let Slot::Edge(_) = s {
                    let (a, b) = c.slot_faces(&corners, v, p);
                    out.insert((a.min(b), a.max(b)));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Shifts `s` (relabelling end `j` as `j − s`) that keep the stored
    /// symmetries in the standard position of the geometry.
    fn admissible_shifts(&self) -> Vec<usize> {
        let e = self.ends;
        let targets = [
            (self.r.as_ref(), self.geometry.real_reflection()),
            (self.i.as_ref(), self.geometry.imaginary_reflection(e)),
        ];
        (0..e)
            .filter(|&s| {
                targets.iter().all(|(inv, std)| match inv {
                    None => true,
                    Some(inv) => {
                        let c = inv.reflection_constant().unwrap();
                        (c + 2 * e - 2 * s % e) % e == std % e
                    }
                })
            })
            .collect()
    }

    /// A string equal for two trees iff they are isomorphic as plane trees
    /// with the same kinds, labels and symmetries, up to relabelling the ends
    /// by a rotation compatible with the stored symmetries. Degree-2 vertices
    /// are ignored.
    pub fn canonical_form(&self) -> String {
        let sk = self.skeleton();
        let contracted = EmbeddedTree::new(sk.kinds.clone(), sk.rotation.clone(), self.geometry)
            .expect("contraction preserves validity");
        let corners = contracted.corner_faces();
        let e = self.ends;
        let mut best: Option<String> = None;
        let mut shifts = self.admissible_shifts();
        if shifts.is_empty() {
            shifts = (0..e).collect();
        }
        for s in shifts {
            let shift = |f: usize| (f + e - s) % e;
            let mut cells: Vec<String> = Vec::new();
            for v in 0..sk.rotation.len() {
                let mut faces: Vec<usize> = corners[v].iter().map(|&f| shift(f)).collect();
                faces.sort_unstable();
                let mut arms: Vec<String> = (0..sk.rotation[v].len())
                    .map(|p| {
                        let (a, b) = contracted.slot_faces(&corners, v, p);
                        format!("{}-{}", shift(a), shift(b))
                    })
                    .collect();
                arms.sort();
                cells.push(format!(
                    "{}{:?}{{{}}}",
                    sk.kinds[v].symbol(),
                    faces,
                    arms.join(",")
                ));
            }
            cells.sort();
            let mut key = format!("E{e}");
            if self.r.is_some() {
                key.push('R');
            }
            if self.i.is_some() {
                key.push('I');
            }
            key.push(';');
            key.push_str(&cells.join(";"));
            if let Some(labels) = &self.face_labels {
                key.push_str(";L");
                for j in 0..e {
                    let _ = write!(key, "|{}", labels[(j + s) % e]);
                }
            }
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        }
        best.expect("at least one shift")
    }

    /// Human-readable boundary word from end 0: end indices, `(` entering a
    /// subtree (followed by the kind of the vertex entered when not plain) and
    /// `)` leaving it.
    pub fn contour_word(&self) -> String {
        let (v0, p0) = Self::locate_end(&self.rotation, 0);
        let walk = walk_from(&self.rotation, v0, p0).expect("validated tree");
        let mut out = Vec::new();
        for step in walk.steps {
            match step {
                Step::End(e) => out.push(e.to_string()),
                Step::Down(u) => match self.kinds[u] {
                    VertexKind::Plain => out.push("(".into()),
                    k => out.push(format!("({}", k.symbol())),
                },
                Step::Up(_) => out.push(")".into()),
            }
        }
        out.join(" ")
    }
}

struct Skeleton {
    kinds: Vec<VertexKind>,
    rotation: Vec<Vec<Slot>>,
}

/// A subtree hanging from a slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Branch {
    End,
    Node(VertexKind, Vec<Branch>),
}

impl Branch {
    pub(crate) fn mirror(&self) -> Branch {
        match self {
            Branch::End => Branch::End,
            Branch::Node(k, ch) => Branch::Node(*k, mirror_list(ch)),
        }
    }

    /// A path of vertices of the given kinds ending in `tail`.
    pub(crate) fn chain(kinds: &[VertexKind], tail: Branch) -> Branch {
        kinds
            .iter()
            .rev()
            .fold(tail, |acc, &k| Branch::Node(k, vec![acc]))
    }
}

pub(crate) fn mirror_list(list: &[Branch]) -> Vec<Branch> {
    list.iter().rev().map(Branch::mirror).collect()
}

/// Incremental construction with temporary end ids.
#[derive(Default)]
pub(crate) struct Builder {
    kinds: Vec<VertexKind>,
    rotation: Vec<Vec<Slot>>,
    ends: usize,
}

impl Builder {
    pub(crate) fn vertex(&mut self, kind: VertexKind) -> usize {
        self.kinds.push(kind);
        self.rotation.push(Vec::new());
        self.kinds.len() - 1
    }

    pub(crate) fn end(&mut self, v: usize) -> usize {
        let id = self.ends;
        self.ends += 1;
        self.rotation[v].push(Slot::End(id));
        id
    }

    pub(crate) fn edge_slot(&mut self, v: usize, u: usize) {
        self.rotation[v].push(Slot::Edge(u));
    }

    /// Attach `b` at the next slot of `v`; returns the first end of `b` in
    /// counterclockwise order.
    pub(crate) fn attach(&mut self, v: usize, b: &Branch) -> usize {
        match b {
            Branch::End => self.end(v),
            Branch::Node(k, children) => {
                let u = self.vertex(*k);
                self.edge_slot(v, u);
                self.edge_slot(u, v);
                let firsts: Vec<usize> = children.iter().map(|c| self.attach(u, c)).collect();
                firsts[0]
            }
        }
    }

    /// Renumber ends by the boundary walk so that temporary end `anchor`
    /// receives index `index`.
    pub(crate) fn finish(self, anchor: usize, index: usize, geometry: Geometry) -> Result<EmbeddedTree> {
        let (v0, p0) = EmbeddedTree::locate_end(&self.rotation, anchor);
        let walk = walk_from(&self.rotation, v0, p0)?;
        let e = self.ends;
        if walk.ends.len() != e {
            return Err(Error::InvalidTree("builder produced a disconnected tree".into()));
        }
        let mut relabel = vec![0usize; e];
        for (k, &tmp) in walk.ends.iter().enumerate() {
            relabel[tmp] = (index + k) % e;
        }
        let rotation = self
            .rotation
            .into_iter()
            .map(|slots| {
                slots
                    .into_iter()
                    .map(|s| match s {
                        Slot::End(t) => Slot::End(relabel[t]),
                        edge => edge,
                    })
                    .collect()
            })
            .collect();
        EmbeddedTree::new(self.kinds, rotation, geometry)
    }
}

/// A tree symmetric about a line, given by the vertices on the line (left to
/// right) and the branches above each of them in counterclockwise order.
pub(crate) struct HalfPlane {
    pub left_end: bool,
    pub spine: Vec<(VertexKind, Vec<Branch>)>,
    pub right_end: bool,
}

impl HalfPlane {
    /// Build the doubled tree. Returns the builder and the temporary id of the
    /// first end counterclockwise from the positive direction of the line
    /// (the right terminal end when present).
    pub(crate) fn build(&self) -> (Builder, usize) {
        let mut b = Builder::default();
        let ids: Vec<usize> = self.spine.iter().map(|(k, _)| b.vertex(*k)).collect();
        let last = ids.len() - 1;
        let mut right_terminal = None;
        let mut upper_first = None;
        for (i, (_, upper)) in self.spine.iter().enumerate() {
            let v = ids[i];
            if i > 0 {
                b.edge_slot(v, ids[i - 1]);
            } else if self.left_end {
                b.end(v);
            }
            for br in mirror_list(upper) {
                b.attach(v, &br);
            }
            if i < last {
                b.edge_slot(v, ids[i + 1]);
            } else if self.right_end {
                right_terminal = Some(b.end(v));
            }
            for (k, br) in upper.iter().enumerate() {
                let f = b.attach(v, br);
                if i == last && k == 0 {
                    upper_first = Some(f);
                }
            }
        }
        let anchor = right_terminal.or(upper_first).expect("spine end has a branch");
        (b, anchor)
    }
}
