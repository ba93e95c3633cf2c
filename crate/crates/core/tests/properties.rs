use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use tropmoduli::complex::{enumerate_stable, ConeComplex};
use tropmoduli::dualgraph::{automorphisms, canonical_form, encoding, is_isomorphic, pseudostabilize};
use tropmoduli::plmap::ModuliPair;
use tropmoduli::pwpoly::{phi_cone, phi_ray, power_sum_ray, PiecewisePoly};
use tropmoduli::rational::{frac, int};
use tropmoduli::{DualGraph, Rational};

fn pair(i: usize) -> &'static ModuliPair {
    static PAIRS: OnceLock<Vec<ModuliPair>> = OnceLock::new();
    &PAIRS.get_or_init(|| [(1, 2), (1, 3), (2, 1)].iter().map(|&(g, n)| ModuliPair::new(g, n).unwrap()).collect())[i]
}

fn complex_14() -> &'static ConeComplex {
    static C: OnceLock<ConeComplex> = OnceLock::new();
    C.get_or_init(|| enumerate_stable(1, 4).unwrap())
}

/// A small random expression tree over the generators, described by a seed list.
fn build(c: &Arc<ConeComplex>, script: &[(u8, u8, i8)]) -> PiecewisePoly {
    let rays = c.rays();
    let mut stack: Vec<PiecewisePoly> = Vec::new();
    for &(op, pick, k) in script {
        let gen = match pick % 3 {
            0 => phi_ray(c.clone(), rays[pick as usize % rays.len()]).unwrap(),
            1 => power_sum_ray(c.clone(), rays[pick as usize % rays.len()]).unwrap(),
            _ => phi_cone(c.clone(), 1 + pick as usize % (c.len() - 1)).unwrap(),
        };
        let top = match (op % 3, stack.pop()) {
            (0, Some(p)) => p.try_add(&gen.scale(&int(k as i64))).unwrap(),
            (1, Some(p)) if p.degree().unwrap_or(0) < 4 => p.try_mul(&gen).unwrap(),
            (_, Some(p)) => {
                stack.push(p);
                gen
            }
            (_, None) => gen,
        };
        stack.push(top);
    }
    stack.into_iter().fold(PiecewisePoly::zero(c.clone()), |acc, p| acc.try_add(&p).unwrap())
}

fn script() -> impl Strategy<Value = Vec<(u8, u8, i8)>> {
    prop::collection::vec((any::<u8>(), any::<u8>(), -3i8..4), 1..5)
}

fn shuffled(g: &DualGraph, vperm: &[usize], flips: &[bool], rot: usize) -> DualGraph {
    let n = g.num_vertices();
    let mut genera = vec![0; n];
    for v in 0..n {
        genera[vperm[v]] = g.vertex_genus(v);
    }
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .zip(flips)
        .map(|(&(a, b), &f)| if f { (vperm[b], vperm[a]) } else { (vperm[a], vperm[b]) })
        .collect();
    if !edges.is_empty() {
        let r = rot % edges.len();
        edges.rotate_left(r);
    }
    DualGraph::new(genera, edges, g.legs().iter().map(|&v| vperm[v]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_labelling(idx in any::<prop::sample::Index>(), perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(), flips in prop::collection::vec(any::<bool>(), 8), rot in 0usize..8) {
        let c = complex_14();
        let g = c.cone(idx.index(c.len())).graph();
        let vperm: Vec<usize> = perm.iter().copied().filter(|&x| x < g.num_vertices()).collect();
        let h = shuffled(g, &vperm, &flips, rot);
        prop_assert_eq!(encoding(&h), encoding(g));
        prop_assert_eq!(canonical_form(&h), canonical_form(g));
        prop_assert!(is_isomorphic(&h, g));
        prop_assert_eq!(automorphisms(&h).order(), automorphisms(g).order());
    }

    #[test]
    fn pseudostabilization_lands_in_the_subcomplex(idx in any::<prop::sample::Index>(), which in 0usize..3) {
        let p = pair(which);
        let g = p.stable.cone(idx.index(p.stable.len())).graph();
        let once = pseudostabilize(g).unwrap();
        prop_assert!(once.graph.is_pseudostable());
        prop_assert!(p.ps.locate(&once.graph).is_some());
        prop_assert!(pseudostabilize(&once.graph).unwrap().is_identity());
    }

    #[test]
    fn ring_laws(which in 0usize..3, a in script(), b in script(), c in script()) {
        let cx = pair(which).stable.clone();
        let (f, g, h) = (build(&cx, &a), build(&cx, &b), build(&cx, &c));
        prop_assert!(f.validate().is_ok());
        prop_assert_eq!(f.try_mul(&g).unwrap(), g.try_mul(&f).unwrap());
        prop_assert_eq!(
            f.try_mul(&g.try_add(&h).unwrap()).unwrap(),
            f.try_mul(&g).unwrap().try_add(&f.try_mul(&h).unwrap()).unwrap()
        );
        prop_assert!(f.try_sub(&f).unwrap().is_zero());
    }

    #[test]
    fn strict_parts_reconstruct(which in 0usize..3, a in script()) {
        let cx = pair(which).stable.clone();
        let f = build(&cx, &a);
        let parts = f.strict_support_decomposition().unwrap();
        prop_assert_eq!(PiecewisePoly::reconstruct(cx, &parts).unwrap(), f);
    }

    #[test]
    fn pullback_is_a_ring_map(which in 0usize..3, a in script(), b in script()) {
        let p = pair(which);
        let (f, g) = (build(&p.ps, &a), build(&p.ps, &b));
        let t = &p.trop_t;
        prop_assert_eq!(t.pullback(&f.try_mul(&g).unwrap()).unwrap(), t.pullback(&f).unwrap().try_mul(&t.pullback(&g).unwrap()).unwrap());
        prop_assert_eq!(t.pullback(&f.try_sub(&g).unwrap()).unwrap(), t.pullback(&f).unwrap().try_sub(&t.pullback(&g).unwrap()).unwrap());
    }

    #[test]
    fn pullback_agrees_pointwise(which in 0usize..3, a in script(), idx in any::<prop::sample::Index>(), coords in prop::collection::vec(1i64..30, 8)) {
        let p = pair(which);
        let f = build(&p.ps, &a);
        let cone = idx.index(p.stable.len());
        let point: Vec<Rational> = coords[..p.stable.cone(cone).dim()].iter().map(|&x| frac(x, 3)).collect();
        let (target, image) = p.trop_t.apply(cone, &point).unwrap();
        prop_assert_eq!(p.trop_t.pullback(&f).unwrap().evaluate(cone, &point).unwrap(), f.evaluate(target, &image).unwrap());
    }

    #[test]
    fn json_round_trip(which in 0usize..3, a in script()) {
        let cx = pair(which).stable.clone();
        let f = build(&cx, &a);
        let back = PiecewisePoly::from_json_value(cx.clone(), &f.to_json_value()).unwrap();
        prop_assert_eq!(back, f);
        for cone in cx.cones() {
            prop_assert_eq!(&DualGraph::from_json(&cone.graph().to_json()).unwrap(), cone.graph());
        }
    }
}
