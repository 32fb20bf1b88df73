use super::{enumerate_double_symmetric, EmbeddedTree, Slot, VertexKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// A bipartite plane graph whose faces carry labels `0..q`.
///
/// `rotation[v][s]` is the twin `(w, t)` of half-edge `s` at `v`, or `None`
/// for a half-edge running off to infinity. Corner `k` at `v` lies between
/// half-edges `k` and `k + 1` in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineComplex {
    pub q: usize,
    pub kinds: Vec<VertexKind>,
    pub rotation: Vec<Vec<Option<(usize, usize)>>>,
    pub labels: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineComplexReport {
    pub no_loops: bool,
    pub twins_consistent: bool,
    pub bipartite: bool,
    pub degree_q: bool,
    pub vertex_labels: bool,
    pub face_labels: bool,
    pub bounded_faces_are_digons: bool,
    pub bounded_faces: usize,
    pub open_faces: usize,
    /// Label of every bounded face, in discovery order.
    pub bounded_face_labels: Vec<usize>,
    pub violations: Vec<String>,
}

impl LineComplexReport {
    pub fn passed(&self) -> bool {
        self.no_loops
            && self.twins_consistent
            && self.bipartite
            && self.degree_q
            && self.vertex_labels
            && self.face_labels
            && self.bounded_faces_are_digons
    }
}

impl LineComplex {
    fn next_corner(&self, v: usize, k: usize) -> Option<(usize, usize)> {
        let s = (k + 1) % self.rotation[v].len();
        self.rotation[v][s]
    }

    fn prev_corner(&self, v: usize, k: usize) -> Option<(usize, usize)> {
        self.rotation[v][k].map(|(w, t)| {
            let d = self.rotation[w].len();
            (w, (t + d - 1) % d)
        })
    }

    /// Faces as corner sequences; the flag is true for closed faces.
    fn faces(&self) -> Vec<(bool, Vec<(usize, usize)>)> {
        let mut seen: Vec<Vec<bool>> = self.rotation.iter().map(|r| vec![false; r.len()]).collect();
        let mut out = Vec::new();
        let trace = |start: (usize, usize), seen: &mut Vec<Vec<bool>>| {
            let mut face = Vec::new();
            let mut c = start;
            loop {
                if seen[c.0][c.1] {
                    return (c == start, face);
                }
                seen[c.0][c.1] = true;
                face.push(c);
                match self.next_corner(c.0, c.1) {
                    Some(n) => c = n,
                    None => return (false, face),
                }
            }
        };
        for v in 0..self.rotation.len() {
            for k in 0..self.rotation[v].len() {
                if !seen[v][k] && self.prev_corner(v, k).is_none() {
                    out.push(trace((v, k), &mut seen));
                }
            }
        }
        for v in 0..self.rotation.len() {
            for k in 0..self.rotation[v].len() {
                if !seen[v][k] {
                    out.push(trace((v, k), &mut seen));
                }
            }
        }
        out
    }
}

/// Check the defining properties of a labelled line complex.
pub fn validate_line_complex(lc: &LineComplex) -> LineComplexReport {
    let n = lc.rotation.len();
    let mut v_out = Vec::new();
    let mut no_loops = true;
    let mut twins = true;
    let mut bipartite = true;
    let mut degree_q = lc.kinds.len() == n;
    if !degree_q {
        v_out.push("kind vector has wrong length".to_string());
    }
    for v in 0..n {
        if lc.rotation[v].len() != lc.q {
            degree_q = false;
            v_out.push(format!("vertex {v} has degree {}", lc.rotation[v].len()));
        }
        if !matches!(lc.kinds.get(v), Some(VertexKind::O | VertexKind::X)) {
            bipartite = false;
            v_out.push(format!("vertex {v} is neither o nor x"));
        }
        for (s, twin) in lc.rotation[v].iter().enumerate() {
            let Some((w, t)) = *twin else { continue };
            if w == v {
                no_loops = false;
                v_out.push(format!("loop at vertex {v}"));
                continue;
            }
            if lc.rotation.get(w).and_then(|r| r.get(t)).copied().flatten() != Some((v, s)) {
                twins = false;
                v_out.push(format!("half-edge ({v},{s}) has no matching twin"));
                continue;
            }
            if lc.kinds.get(w) == lc.kinds.get(v) {
                bipartite = false;
                v_out.push(format!("edge {v}-{w} joins two vertices of the same kind"));
            }
        }
    }

    let structural = twins && degree_q;
    let faces = if structural { lc.faces() } else { Vec::new() };
    let bounded: Vec<&Vec<(usize, usize)>> =
        faces.iter().filter(|(closed, _)| *closed).map(|(_, f)| f).collect();
    let open_faces = faces.len() - bounded.len();
    let digons = bounded.iter().all(|f| f.len() == 2);
    if !digons {
        v_out.push("a bounded face is not a 2-gon".into());
    }

    let (mut vertex_labels, mut face_labels) = (false, false);
    let mut bounded_face_labels = Vec::new();
    if let (Some(labels), true) = (&lc.labels, structural) {
        vertex_labels = labels.len() == n;
        for v in 0..n.min(labels.len()) {
            let d = lc.rotation[v].len();
            let step = if lc.kinds[v] == VertexKind::O { 1 } else { lc.q - 1 };
            let ok = labels[v].len() == d
                && labels[v].iter().all(|&l| l < lc.q)
                && (0..d).all(|k| labels[v][(k + 1) % d] == (labels[v][k] + step) % lc.q);
            if !ok {
                vertex_labels = false;
                v_out.push(format!("labels around vertex {v} are not cyclic"));
            }
        }
        face_labels = vertex_labels;
        if vertex_labels {
            for (closed, f) in &faces {
                let l = labels[f[0].0][f[0].1];
                if f.iter().any(|&(v, k)| labels[v][k] != l) {
                    face_labels = false;
                    v_out.push(format!("face through corner {:?} has mixed labels", f[0]));
                } else if *closed {
                    bounded_face_labels.push(l);
                }
            }
        }
    } else if lc.labels.is_none() {
        v_out.push("complex is unlabelled".into());
    }

    LineComplexReport {
        no_loops,
        twins_consistent: twins,
        bipartite,
        degree_q,
        vertex_labels,
        face_labels,
        bounded_faces_are_digons: digons,
        bounded_faces: bounded.len(),
        open_faces,
        bounded_face_labels,
        violations: v_out,
    }
}

/// Fill in all corner labels from one seed corner, or fail on a conflict.
pub fn propagate_labels(lc: &LineComplex, seed: (usize, usize), label: usize) -> Result<Vec<Vec<usize>>> {
    let q = lc.q;
    if label >= q || seed.0 >= lc.rotation.len() || seed.1 >= lc.rotation[seed.0].len() {
        return Err(Error::InvalidArgument("seed corner or label out of range".into()));
    }
    let mut labels: Vec<Vec<usize>> = lc.rotation.iter().map(|r| vec![usize::MAX; r.len()]).collect();
    let mut queue = VecDeque::from([(seed, label)]);
    while let Some(((v, k), l)) = queue.pop_front() {
        if labels[v][k] != usize::MAX {
            if labels[v][k] != l {
                return Err(Error::ConstraintViolation(format!(
                    "corner ({v},{k}) receives labels {} and {l}",
                    labels[v][k]
                )));
            }
            continue;
        }
        labels[v][k] = l;
        let d = lc.rotation[v].len();
        let up = if lc.kinds[v] == VertexKind::O { 1 } else { q - 1 };
        queue.push_back(((v, (k + 1) % d), (l + up) % q));
        queue.push_back(((v, (k + d - 1) % d), (l + q - up) % q));
        if let Some(c) = lc.next_corner(v, k) {
            queue.push_back((c, l));
        }
        if let Some(c) = lc.prev_corner(v, k) {
            queue.push_back((c, l));
        }
    }
    if labels.iter().flatten().any(|&l| l == usize::MAX) {
        return Err(Error::ConstraintViolation("complex is disconnected".into()));
    }
    Ok(labels)
}

/// A finite piece of the line complex of `exp`: a chain of `n` alternating
/// vertices with `q = 2`, two unbounded faces and no bounded ones.
pub fn exponential_complex(n: usize) -> LineComplex {
    let kinds = (0..n)
        .map(|i| if i % 2 == 0 { VertexKind::O } else { VertexKind::X })
        .collect();
    let rotation = (0..n)
        .map(|i| {
            vec![
                (i > 0).then(|| (i - 1, 1)),
                (i + 1 < n).then(|| (i + 1, 0)),
            ]
        })
        .collect();
    let mut lc = LineComplex {
        q: 2,
        kinds,
        rotation,
        labels: None,
    };
    if n > 0 {
        lc.labels = propagate_labels(&lc, (0, 0), 0).ok();
    }
    lc
}

/// Cyclic label of each of the 12 faces for the symmetric quintic family:
/// the values `r̄a, r̄b, 0, b, a` in order along the imaginary axis.
const QUINTIC_FACE_LABELS: [usize; 12] = [2, 4, 2, 3, 2, 4, 2, 0, 2, 1, 2, 0];
const QUINTIC_Q: usize = 5;

/// Gap of the bundle at slot `p` of `v`: number of parallel edges needed to
/// pass from the face before the slot to the face after it.
fn gap(kind: VertexKind, before: usize, after: usize, q: usize) -> usize {
    match kind {
        VertexKind::O => (after + q - before) % q,
        _ => (before + q - after) % q,
    }
}

/// Line complexes with `q = 5` and twelve unbounded faces that are symmetric
/// under conjugation (kinds preserved) and `z ↦ −z̄` (kinds swapped), built
/// from the double-symmetric trees with twelve ends. Each unbounded end is
/// continued by `end_chain` further vertices before running off to infinity.
pub fn symmetric_quintic_complexes(end_chain: usize) -> Result<Vec<(EmbeddedTree, LineComplex)>> {
    let q = QUINTIC_Q;
    let mut out = Vec::new();
    for tree in enumerate_double_symmetric(12, false)? {
        let n = tree.vertex_count();
        if n > 20 {
            continue;
        }
        let r = tree.real_symmetry().expect("double symmetric").vertex_map.clone();
        let i = tree.imaginary_symmetry().expect("double symmetric").vertex_map.clone();
        let corners = tree.corner_faces();
        for mask in 0u32..(1u32 << n) {
            let kinds: Vec<VertexKind> = (0..n)
                .map(|v| if mask >> v & 1 == 1 { VertexKind::O } else { VertexKind::X })
                .collect();
            let symmetric = (0..n).all(|v| kinds[r[v]] == kinds[v] && kinds[i[v]] == kinds[v].swapped());
            let alternating = (0..n).all(|v| {
                tree.rotation()[v].iter().all(|s| match s {
                    Slot::Edge(u) => kinds[*u] != kinds[v],
                    Slot::End(_) => true,
                })
            });
            if !symmetric || !alternating {
                continue;
            }
            let gaps: Vec<Vec<usize>> = (0..n)
                .map(|v| {
                    (0..tree.degree(v))
                        .map(|p| {
                            let (a, b) = tree.slot_faces(&corners, v, p);
                            gap(kinds[v], QUINTIC_FACE_LABELS[a], QUINTIC_FACE_LABELS[b], q)
                        })
                        .collect()
                })
                .collect();
            let admissible = gaps
                .iter()
                .all(|g| g.iter().all(|&x| x > 0) && g.iter().sum::<usize>() == q);
            if !admissible {
                continue;
            }
            let Some(lc) = expand(&tree, &kinds, &gaps, &corners, end_chain) else {
                continue;
            };
            out.push((tree.clone().with_kinds(kinds)?, lc));
        }
    }
    Ok(out)
}

/// Replace every tree edge by a bundle of parallel edges and every end by a
/// chain of bundles.
fn expand(
    tree: &EmbeddedTree,
    kinds: &[VertexKind],
    gaps: &[Vec<usize>],
    corners: &[Vec<usize>],
    end_chain: usize,
) -> Option<LineComplex> {
    let q = QUINTIC_Q;
    let n = tree.vertex_count();
    let offsets: Vec<Vec<usize>> = gaps
        .iter()
        .map(|g| {
            g.iter()
                .scan(0, |acc, &x| {
                    let o = *acc;
                    *acc += x;
                    Some(o)
                })
                .collect()
        })
        .collect();
    let mut lkinds = kinds.to_vec();
    let mut rotation: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; q]; n];
    for v in 0..n {
        for (p, s) in tree.rotation()[v].iter().enumerate() {
            let g = gaps[v][p];
            match *s {
                Slot::Edge(u) => {
                    let pu = tree.rotation()[u].iter().position(|&t| t == Slot::Edge(v))?;
                    if gaps[u][pu] != g {
                        return None;
                    }
                    for m in 0..g {
                        rotation[v][offsets[v][p] + m] = Some((u, offsets[u][pu] + g - 1 - m));
                    }
                }
                Slot::End(_) => {
                    let (mut prev, mut base, mut width) = (v, offsets[v][p], g);
                    for _ in 0..end_chain {
                        let w = rotation.len();
                        lkinds.push(lkinds[prev].swapped());
                        rotation.push(vec![None; q]);
                        for m in 0..width {
                            rotation[prev][base + m] = Some((w, width - 1 - m));
                            rotation[w][width - 1 - m] = Some((prev, base + m));
                        }
                        (prev, base, width) = (w, width, q - width);
                    }
                }
            }
        }
    }
    let mut lc = LineComplex {
        q,
        kinds: lkinds,
        rotation,
        labels: None,
    };
    let seed = (0, offsets[0][0] + gaps[0][0] - 1);
    let labels = propagate_labels(&lc, seed, QUINTIC_FACE_LABELS[corners[0][0]]).ok()?;
    let faces_match = (0..n).all(|v| {
        (0..tree.degree(v)).all(|p| {
            labels[v][offsets[v][p] + gaps[v][p] - 1] == QUINTIC_FACE_LABELS[corners[v][p]]
        })
    });
    if !faces_match {
        return None;
    }
    lc.labels = Some(labels);
    Some(lc)
}
