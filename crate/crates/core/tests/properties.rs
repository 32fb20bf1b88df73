//! Property tests for the invariants of each module.

use std::collections::BTreeSet;

use anharmonic::ode::DEFAULT_TOL;
use anharmonic::qes::{classify, qes_solve, QesSpec};
use anharmonic::spectrum::{eigenvalue, eigenvalues, SolverConfig};
use anharmonic::trees::{
    enumerate_double_symmetric, from_census, EmbeddedTree, Involution, Slot, VertexKind,
};
use anharmonic::zeros::{census, CensusBox, CensusConfig};
use anharmonic::{qes_potential, stokes, Complex64, EvenPolynomial, Parity, Propagator};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn even_poly(max_half_degree: usize) -> impl Strategy<Value = EvenPolynomial> {
    (1..=max_half_degree).prop_flat_map(|n| {
        (prop::collection::vec(-2.0f64..2.0, n), 0.5f64..2.0).prop_map(|(mut c, lead)| {
            c.push(lead);
            EvenPolynomial::new(c).unwrap()
        })
    })
}

fn point(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(x, y)| Complex64::new(x, y))
}

fn rel(a: &anharmonic::OdeState, b: &anharmonic::OdeState) -> f64 {
    ((a.y - b.y).norm() + (a.dy - b.dy).norm()) / a.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potentials_are_even_and_real(p in even_poly(4), z in point(3.0)) {
        prop_assert_eq!(p.eval(-z), p.eval(z));
        prop_assert_eq!(p.eval(z.conj()), p.eval(z).conj());
        prop_assert!(p.leading() > 0.0 && p.degree() % 2 == 0);
    }

    #[test]
    fn qes_potentials_are_monic_sextics(m in 0u32..10, p in 0u32..=1, b in -5.0f64..5.0) {
        let pot = qes_potential(m, p, b).unwrap();
        prop_assert_eq!(pot.degree(), 6);
        prop_assert_eq!(pot.leading(), 1.0);
    }

    #[test]
    fn stokes_rays_are_distinct(half in 1usize..12) {
        let geo = stokes(2 * half).unwrap();
        let angles: BTreeSet<u64> = geo.ray_angles().iter().map(|a| a.rem_euclid(std::f64::consts::TAU).to_bits()).collect();
        prop_assert_eq!(angles.len(), 2 * half + 2);
    }

    #[test]
    fn wronskian_is_conserved(
        p in even_poly(3),
        lambda in -5.0f64..5.0,
        path in prop::collection::vec(point(1.0), 1..5),
    ) {
        let prop = Propagator::new(&p, lambda);
        let (mut a, mut b) = (Parity::Even.initial_state(), Parity::Odd.initial_state());
        let w0 = a.wronskian(&b);
        for &t in &path {
            a = prop.propagate(a, t).unwrap();
            b = prop.propagate(b, t).unwrap();
            let drift = (a.wronskian(&b) - w0).norm();
            prop_assert!(drift <= 10.0 * DEFAULT_TOL * w0.norm(), "drift {drift:e} at {t}");
        }
    }

    #[test]
    fn transport_commutes_with_conjugation(
        p in even_poly(3),
        lambda in -5.0f64..5.0,
        target in point(1.5),
        odd in any::<bool>(),
    ) {
        let prop = Propagator::new(&p, lambda);
        let s = if odd { Parity::Odd } else { Parity::Even }.initial_state();
        let direct = prop.propagate(s, target).unwrap();
        let mirrored = prop.propagate(s.conj(), target.conj()).unwrap();
        prop_assert!(rel(&direct.conj(), &mirrored) <= 2.0 * DEFAULT_TOL);
    }

    #[test]
    fn transport_is_path_independent(p in even_poly(3), lambda in -5.0f64..5.0, odd in any::<bool>()) {
        let prop = Propagator::new(&p, lambda);
        let s = if odd { Parity::Odd } else { Parity::Even }.initial_state();
        let target = Complex64::new(1.0, 1.0);
        let direct = prop.propagate(s, target).unwrap();
        let bent = prop.propagate_path(s, &[Complex64::new(1.0, 0.0), target]).unwrap();
        prop_assert!(rel(&direct, &bent) <= 10.0 * DEFAULT_TOL);
    }

    /// Scaling both solutions by a power of two changes no floating-point
    /// operation other than the exponent, so the ratio is reproduced exactly.
    #[test]
    fn ratio_is_scale_invariant(p in even_poly(3), lambda in -3.0f64..3.0, k in -20i32..20, odd in any::<bool>()) {
        let prop = Propagator::new(&p, lambda);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let c = 2f64.powi(k);
        let target = Complex64::from_polar(3.0, std::f64::consts::FRAC_PI_4);
        let ratio = |scale: f64| {
            let mut pair = [parity.initial_state(), parity.flip().initial_state()];
            for s in &mut pair {
                s.y *= scale;
                s.dy *= scale;
            }
            prop.propagate_many(&mut pair, target, |_| {}).unwrap();
            pair[0].y / pair[1].y
        };
        let (a, b) = (ratio(1.0), ratio(c));
        prop_assert_eq!(a.arg(), b.arg());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectra_are_ordered_and_indexed(p in even_poly(3)) {
        let tol = 1e-9;
        let pairs = eigenvalues(&p, 4, tol).unwrap();
        for (k, ep) in pairs.iter().enumerate() {
            prop_assert_eq!(ep.k, k);
            prop_assert_eq!(ep.real_zero_count, k);
            prop_assert_eq!(ep.parity, Parity::of_index(k));
        }
        prop_assert!(pairs.windows(2).all(|w| w[1].lambda > w[0].lambda));
        for ep in &pairs {
            let cfg = SolverConfig { radius: Some(1.5 * ep.radius_used), ..SolverConfig::with_tol(tol) };
            let far = eigenvalue(&p, ep.k, &cfg).unwrap();
            prop_assert!((far.lambda - ep.lambda).abs() < 10.0 * tol, "k={}: {} vs {}", ep.k, ep.lambda, far.lambda);
        }
    }

    #[test]
    fn censuses_are_symmetric(c2 in -2.0f64..2.0, c4 in 0.5f64..2.0, k in 0usize..4) {
        let p = EvenPolynomial::new(vec![0.0, c2, c4]).unwrap();
        let ep = eigenvalue(&p, k, &SolverConfig::default()).unwrap();
        let tol = 1e-6;
        let cz = census(&p, ep.lambda, ep.parity, CensusBox::square(2.5).unwrap(), &CensusConfig::with_tol(tol)).unwrap();
        let closed = |v: &[f64]| v.iter().zip(v.iter().rev()).all(|(a, b)| (a + b).abs() <= tol);
        prop_assert!(closed(&cz.real_zeros));
        prop_assert!(closed(&cz.imaginary_zeros));
        prop_assert_eq!(cz.real_zeros.iter().any(|x| x.abs() <= tol), ep.parity == Parity::Odd);
        prop_assert_eq!(cz.offaxis_count % 4, 0);
        prop_assert!(cz.quadrants_agree());
        prop_assert!(cz.is_consistent());
        prop_assert_eq!(cz.real_zeros.len(), k);
    }

    #[test]
    fn qes_root_signs(m in 0u32..=6, p in 0u32..=1, b in -3.0f64..3.0) {
        let spec = QesSpec::new(m, p, b).unwrap();
        let sols = qes_solve(&spec).unwrap();
        prop_assert_eq!(sols.len(), m as usize + 1);
        let total: usize = sols.iter().map(|s| s.positive_roots()).sum();
        prop_assert_eq!(total, (m * (m + 1) / 2) as usize);
        prop_assert!(sols.windows(2).all(|w| w[1].lambda > w[0].lambda));
        for s in &sols {
            let (m_tree, n_tree) = classify(s, p).unwrap();
            prop_assert!(n_tree <= m_tree && (m_tree - n_tree) % 2 == 0);
            prop_assert_eq!(m_tree, 2 * m as usize + p as usize);
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical forms under replanting

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    V(usize),
    E(usize),
}

fn rebuild(
    original: &EmbeddedTree,
    kinds: Vec<VertexKind>,
    rotation: Vec<Vec<Slot>>,
    end_maps: &[(char, Vec<usize>)],
) -> EmbeddedTree {
    let mut t = EmbeddedTree::new(kinds, rotation, original.geometry()).unwrap();
    if let Some(l) = original.face_labels() {
        t = t.with_face_labels(l.to_vec()).unwrap();
    }
    for (which, map) in end_maps {
        let inv = t.derive_involution(map).unwrap();
        t.set_symmetry(*which, inv).unwrap();
    }
    t
}

fn end_maps(t: &EmbeddedTree) -> Vec<(char, Vec<usize>)> {
    let mut out = Vec::new();
    if let Some(r) = t.real_symmetry() {
        out.push(('r', r.end_map.clone()));
    }
    if let Some(i) = t.imaginary_symmetry() {
        out.push(('i', i.end_map.clone()));
    }
    out
}

fn permute_vertices(t: &EmbeddedTree, perm: &[usize]) -> EmbeddedTree {
    let n = t.vertex_count();
    let mut kinds = vec![VertexKind::Plain; n];
    let mut rotation = vec![Vec::new(); n];
    for v in 0..n {
        kinds[perm[v]] = t.kinds()[v];
        rotation[perm[v]] = t.rotation()[v]
            .iter()
            .map(|s| match *s {
                Slot::Edge(u) => Slot::Edge(perm[u]),
                end => end,
            })
            .collect();
    }
    rebuild(t, kinds, rotation, &end_maps(t))
}

/// Relabel end `j` as `j − s`.
fn shift_ends(t: &EmbeddedTree, s: usize) -> EmbeddedTree {
    let e = t.ends();
    let rotation = t
        .rotation()
        .iter()
        .map(|slots| {
            slots
                .iter()
                .map(|sl| match *sl {
                    Slot::End(j) => Slot::End((j + e - s) % e),
                    edge => edge,
                })
                .collect()
        })
        .collect();
    let maps: Vec<(char, Vec<usize>)> = end_maps(t)
        .into_iter()
        .map(|(w, m)| (w, (0..e).map(|j| (m[(j + s) % e] + e - s) % e).collect()))
        .collect();
    rebuild(t, t.kinds().to_vec(), rotation, &maps)
}

fn image(inv: &Involution, n: Node) -> Node {
    match n {
        Node::V(v) => Node::V(inv.vertex_map[v]),
        Node::E(e) => Node::E(inv.end_map[e]),
    }
}

/// Subdivide the edge at slot `(v, p)` together with its images under the
/// stored symmetries, so the result keeps them.
fn subdivide_orbit(t: &EmbeddedTree, v: usize, p: usize, kind: VertexKind) -> EmbeddedTree {
    let other = match t.rotation()[v][p] {
        Slot::Edge(u) => Node::V(u),
        Slot::End(e) => Node::E(e),
    };
    let key = |a: Node, b: Node| (a.min(b), a.max(b));
    let mut orbit = BTreeSet::from([key(Node::V(v), other)]);
    let syms: Vec<&Involution> = [t.real_symmetry(), t.imaginary_symmetry()].into_iter().flatten().collect();
    loop {
        let before = orbit.len();
        for &(a, b) in orbit.clone().iter() {
            for inv in &syms {
                orbit.insert(key(image(inv, a), image(inv, b)));
            }
        }
        if orbit.len() == before {
            break;
        }
    }
    let mut kinds = t.kinds().to_vec();
    let mut rotation = t.rotation().to_vec();
    for (a, b) in orbit {
        let w = rotation.len();
        let (Node::V(x), far) = (a, b) else { unreachable!("an edge has a vertex end") };
        let far_slot = match far {
            Node::V(y) => Slot::Edge(y),
            Node::E(e) => Slot::End(e),
        };
        let px = rotation[x].iter().position(|&s| s == far_slot).unwrap();
        rotation[x][px] = Slot::Edge(w);
        if let Node::V(y) = far {
            let py = rotation[y].iter().position(|&s| s == Slot::Edge(x)).unwrap();
            rotation[y][py] = Slot::Edge(w);
        }
        rotation.push(vec![Slot::Edge(x), far_slot]);
        kinds.push(kind);
    }
    rebuild(t, kinds, rotation, &end_maps(t))
}

fn catalogue() -> Vec<EmbeddedTree> {
    let mut out = Vec::new();
    for e in [4, 8, 12] {
        out.extend(enumerate_double_symmetric(e, false).unwrap());
    }
    out.extend(enumerate_double_symmetric(6, true).unwrap());
    out.extend(enumerate_double_symmetric(8, true).unwrap());
    for (d, nr, ni) in [(4, 0, 0), (4, 2, 0), (4, 3, 2), (6, 1, 0), (6, 2, 2)] {
        out.push(from_census(d, nr, ni).unwrap());
    }
    out
}

#[derive(Debug, Clone)]
enum Move {
    Permute(u64),
    Shift,
    Subdivide(usize, usize, u8),
    Contract,
}

fn moves() -> impl Strategy<Value = Vec<Move>> {
    prop::collection::vec(
        prop_oneof![
            any::<u64>().prop_map(Move::Permute),
            Just(Move::Shift),
            (any::<usize>(), any::<usize>(), 0u8..3).prop_map(|(a, b, k)| Move::Subdivide(a, b, k)),
            Just(Move::Contract),
        ],
        1..5,
    )
}

fn apply(t: &EmbeddedTree, mv: &Move) -> EmbeddedTree {
    match *mv {
        Move::Permute(seed) => {
            let n = t.vertex_count();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut x = seed | 1;
            for i in (1..n).rev() {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                perm.swap(i, (x % (i as u64 + 1)) as usize);
            }
            permute_vertices(t, &perm)
        }
        // A half turn commutes with both reflections; labelled trees carry
        // labels tied to the faces, so only unlabelled ones are turned.
        Move::Shift if t.face_labels().is_none() => shift_ends(t, t.ends() / 2),
        Move::Shift => t.clone(),
        Move::Subdivide(a, b, k) => {
            let v = a % t.vertex_count();
            let p = b % t.degree(v);
            let kind = [VertexKind::O, VertexKind::X, VertexKind::Plain][k as usize];
            subdivide_orbit(t, v, p, kind)
        }
        Move::Contract => t.contract(),
    }
}

fn check_replanting(index: usize, seq: &[Move]) -> Result<(), TestCaseError> {
    let cat = catalogue();
    let original = &cat[index % cat.len()];
    let form = original.canonical_form();
    let mut t = original.clone();
    for mv in seq {
        t = apply(&t, mv);
        prop_assert_eq!(&t.canonical_form(), &form, "after {:?}", mv);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_survives_replanting(index in any::<usize>(), seq in moves()) {
        check_replanting(index, &seq)?;
    }
}

#[test]
fn catalogue_trees_have_their_symmetries() {
    for t in catalogue() {
        let r = t.real_symmetry().expect("R");
        let i = t.imaginary_symmetry().expect("I");
        for inv in [r, i] {
            assert_eq!(&t.derive_involution(&inv.end_map).unwrap(), inv);
            assert!((0..t.vertex_count()).all(|v| inv.vertex_map[inv.vertex_map[v]] == v));
        }
    }
}

#[test]
fn distinct_catalogue_entries_have_distinct_forms() {
    for e in [8, 12] {
        let trees = enumerate_double_symmetric(e, false).unwrap();
        let forms: BTreeSet<String> = trees.iter().map(EmbeddedTree::canonical_form).collect();
        assert_eq!(forms.len(), trees.len());
    }
}
