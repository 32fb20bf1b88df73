use super::{mirror_list, Branch, EmbeddedTree, Geometry, HalfPlane, VertexKind};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A planted plane tree: an unbounded end, or a vertex with at least two
/// subtrees listed counterclockwise after the incoming edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Planted {
    End,
    Node(Vec<Planted>),
}

impl Planted {
    pub fn ends(&self) -> usize {
        match self {
            Planted::End => 1,
            Planted::Node(ch) => ch.iter().map(Planted::ends).sum(),
        }
    }

    pub fn mirror(&self) -> Planted {
        match self {
            Planted::End => Planted::End,
            Planted::Node(ch) => Planted::Node(ch.iter().rev().map(Planted::mirror).collect()),
        }
    }

    pub fn encode(&self) -> String {
        match self {
            Planted::End => "e".into(),
            Planted::Node(ch) => format!("({})", ch.iter().map(Planted::encode).collect::<String>()),
        }
    }

    pub(crate) fn to_branch(&self) -> Branch {
        match self {
            Planted::End => Branch::End,
            Planted::Node(ch) => {
                Branch::Node(VertexKind::Plain, ch.iter().map(Planted::to_branch).collect())
            }
        }
    }
}

fn is_symmetric(list: &[Planted]) -> bool {
    list.iter()
        .zip(list.iter().rev())
        .all(|(a, b)| *a == b.mirror())
}

#[derive(Default)]
struct Catalog {
    planted: HashMap<usize, Vec<Planted>>,
    forests: HashMap<(usize, usize), Vec<Vec<Planted>>>,
    spines: HashMap<usize, Vec<Vec<Vec<Planted>>>>,
}

impl Catalog {
    fn planted(&mut self, n: usize) -> Vec<Planted> {
        if let Some(v) = self.planted.get(&n) {
            return v.clone();
        }
        let out = if n == 1 {
            vec![Planted::End]
        } else {
            self.forests(n, 2).into_iter().map(Planted::Node).collect()
        };
        self.planted.insert(n, out.clone());
        out
    }

    /// Ordered lists of planted trees with `n` ends in total and length at
    /// least `min_len`.
    fn forests(&mut self, n: usize, min_len: usize) -> Vec<Vec<Planted>> {
        if let Some(v) = self.forests.get(&(n, min_len)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 0 {
            if min_len == 0 {
                out.push(Vec::new());
            }
        } else if n >= min_len {
            for k in 1..=n + 1 - min_len.max(1) {
                let heads = self.planted(k);
                let tails = self.forests(n - k, min_len.saturating_sub(1));
                for h in &heads {
                    for t in &tails {
                        let mut f = Vec::with_capacity(t.len() + 1);
                        f.push(h.clone());
                        f.extend(t.iter().cloned());
                        out.push(f);
                    }
                }
            }
        }
        self.forests.insert((n, min_len), out.clone());
        out
    }

    /// Sequences of nonempty forests with `n` ends in total.
    fn spines(&mut self, n: usize) -> Vec<Vec<Vec<Planted>>> {
        if let Some(v) = self.spines.get(&n) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 0 {
            out.push(Vec::new());
        }
        for k in 1..=n {
            let heads = self.forests(k, 1);
            let tails = self.spines(n - k);
            for h in &heads {
                for t in &tails {
                    let mut s = vec![h.clone()];
                    s.extend(t.iter().cloned());
                    out.push(s);
                }
            }
        }
        self.spines.insert(n, out.clone());
        out
    }
}

/// Rooted plane trees with `ends` leaves, root of degree at least one and
/// no other vertex of degree two, that equal their mirror image. Returned as
/// sorted bracket encodings.
pub fn enumerate_rooted_symmetric(ends: usize) -> Result<Vec<String>> {
    if ends == 0 {
        return Err(Error::InvalidArgument("need at least one end".into()));
    }
    let mut cat = Catalog::default();
    let forms: BTreeSet<String> = cat
        .forests(ends, 1)
        .into_iter()
        .filter(|f| is_symmetric(f))
        .map(|f| format!("r({})", f.iter().map(Planted::encode).collect::<String>()))
        .collect();
    Ok(forms.into_iter().collect())
}

fn to_branches(list: &[Planted]) -> Vec<Branch> {
    list.iter().map(Planted::to_branch).collect()
}

/// Branch running up the positive imaginary axis through vertices with the
/// given right-hand forests, optionally ending in an end on the axis.
fn axis_branch(rights: &[Vec<Planted>], terminal: bool) -> Option<Branch> {
    let mut tail = terminal.then_some(Branch::End);
    for right in rights.iter().rev() {
        let right = to_branches(right);
        let mut children = right.clone();
        children.extend(tail);
        children.extend(mirror_list(&right));
        tail = Some(Branch::Node(VertexKind::Plain, children));
    }
    tail
}

/// All plane trees with `ends` ends and no degree-2 vertices that are
/// symmetric under both complex conjugation and `z ↦ −z̄`, up to isotopy
/// commuting with both.
///
/// Without `ends_on_axes` the ends are placed on the Stokes rays and none lies
/// on an axis, which requires `ends ≡ 0 (mod 4)`. With `ends_on_axes` and
/// `ends ≡ 2 (mod 4)` the Stokes rays are used (two ends on the imaginary
/// axis); with `ends ≡ 0 (mod 4)` the [`Geometry::Axial`] rays are used (one
/// end on each half-axis).
pub fn enumerate_double_symmetric(ends: usize, ends_on_axes: bool) -> Result<Vec<EmbeddedTree>> {
    if ends < 4 || ends % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "number of ends must be even and at least 4, got {ends}"
        )));
    }
    let (geometry, real_end, imag_end) = match (ends_on_axes, ends % 4) {
        (false, 0) => (Geometry::Stokes, false, false),
        (false, _) => return Ok(Vec::new()),
        (true, 2) => (Geometry::Stokes, false, true),
        (true, _) => (Geometry::Axial, true, true),
    };
    let e = ends;
    let quadrant = (e - 2 * real_end as usize - 2 * imag_end as usize) / 4;
    let mut cat = Catalog::default();
    let mut halves: Vec<(HalfPlane, usize)> = Vec::new();
    let upper_index = if real_end { 0 } else { 1 };

    // Both axes carry edges or ends besides the origin.
    for nr in 0..=quadrant {
        for nz in 0..=quadrant - nr {
            let ni = quadrant - nr - nz;
            let reals = cat.spines(nr);
            let zs = cat.forests(nz, 0);
            let imags = cat.spines(ni);
            for real in reals.iter().filter(|r| real_end || !r.is_empty()) {
                for z in &zs {
                    for imag in imags.iter().filter(|i| imag_end || !i.is_empty()) {
                        let axis = axis_branch(imag, imag_end).expect("imaginary axis is nontrivial");
                        let z = to_branches(z);
                        let mut origin = z.clone();
                        origin.push(axis);
                        origin.extend(mirror_list(&z));
                        let mut spine: Vec<(VertexKind, Vec<Branch>)> = real
                            .iter()
                            .rev()
                            .map(|b| (VertexKind::Plain, mirror_list(&to_branches(b))))
                            .collect();
                        spine.push((VertexKind::Plain, origin));
                        spine.extend(real.iter().map(|b| (VertexKind::Plain, to_branches(b))));
                        halves.push((
                            HalfPlane {
                                left_end: real_end,
                                spine,
                                right_end: real_end,
                            },
                            upper_index,
                        ));
                    }
                }
            }
        }
    }

    // One axis meets the tree only at the origin: a mirror-symmetric rooted
    // tree in a half-plane, doubled across that axis.
    let rooted: Vec<Vec<Planted>> = cat
        .forests(e / 2, 1)
        .into_iter()
        .filter(|f| is_symmetric(f))
        .collect();
    let mut single_axis = Vec::new();
    if !real_end {
        single_axis.push(upper_index);
    }
    if !imag_end && geometry == Geometry::Stokes {
        single_axis.push((1 + e - e / 4) % e);
    }
    for &index in &single_axis {
        for f in &rooted {
            halves.push((
                HalfPlane {
                    left_end: false,
                    spine: vec![(VertexKind::Plain, to_branches(f))],
                    right_end: false,
                },
                index,
            ));
        }
    }

    let mut found: BTreeMap<String, EmbeddedTree> = BTreeMap::new();
    for (half, index) in halves {
        let (builder, anchor) = half.build();
        let tree = builder.finish(anchor, index, geometry)?.contract();
        let tree = tree.with_geometric_symmetries()?;
        found.entry(tree.canonical_form()).or_insert(tree);
    }
    Ok(found.into_values().collect())
}

/// Canonical forms of [`enumerate_double_symmetric`], sorted.
pub fn enumerate_double_symmetric_forms(ends: usize, ends_on_axes: bool) -> Result<Vec<String>> {
    let mut forms: Vec<String> = enumerate_double_symmetric(ends, ends_on_axes)?
        .iter()
        .map(EmbeddedTree::canonical_form)
        .collect();
    forms.sort();
    Ok(forms)
}
