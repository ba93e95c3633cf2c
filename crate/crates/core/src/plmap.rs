//! Piecewise-linear maps between cone complexes.
//!
//! Every source cone stores the target cone containing the image of its
//! interior and an integer matrix `matrix[j][i]`: the coefficient of source
//! coordinate `i` in target coordinate `j`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::complex::{enumerate_stable, enumerate_weighted, ComplexKind, ConeComplex, RayLabel};
use crate::dualgraph::{pseudostabilize, DualGraph, TAIL_SLOPE};
use crate::error::{Error, Result};
use crate::pwpoly::PiecewisePoly;
use crate::rational::{frac, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeImage {
    pub target: usize,
    pub matrix: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct PLMap {
    source: Arc<ConeComplex>,
    target: Arc<ConeComplex>,
    images: Vec<ConeImage>,
}

/// Image of a source ray: the target ray it lands on (`None` for the origin)
/// and the multiplier on the primitive generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayImage {
    pub source: usize,
    pub target: Option<usize>,
    pub multiplier: u32,
}

/// Moves a point to the cone of its minimal face and picks the lexicographically
/// smallest coordinate vector under the automorphism action.
pub fn normalize_point<T: Clone + Ord + Zero>(complex: &ConeComplex, cone: usize, coords: &[T]) -> (usize, Vec<T>) {
    let mask = coords.iter().enumerate().filter(|(_, x)| !x.is_zero()).fold(0usize, |m, (i, _)| m | 1 << i);
    let f = complex.face(cone, mask);
    let mut face_coords = vec![T::zero(); f.kept.len()];
    for (k, &e) in f.kept.iter().enumerate() {
        face_coords[f.injection[k]] = coords[e].clone();
    }
    let best = complex
        .cone(f.target)
        .aut()
        .edge_action()
        .iter()
        .map(|perm| {
            let mut v = vec![T::zero(); face_coords.len()];
            for (i, x) in face_coords.iter().enumerate() {
                v[perm[i]] = x.clone();
            }
            v
        })
        .min()
        .unwrap_or(face_coords);
    (f.target, best)
}

/// Coordinates the maps can act on: exact rationals, and machine integers for
/// the generic-point checks.
pub trait Coordinate: Clone + Ord + Zero + std::ops::Mul<Output = Self> {
    fn from_u32(x: u32) -> Self;
}

impl Coordinate for u64 {
    fn from_u32(x: u32) -> Self {
        x.into()
    }
}

impl Coordinate for Rational {
    fn from_u32(x: u32) -> Self {
        Rational::from_integer(x.into())
    }
}

fn mat_vec<T: Coordinate>(matrix: &[Vec<u32>], x: &[T]) -> Vec<T> {
    matrix
        .iter()
        .map(|row| {
            row.iter().zip(x).fold(T::zero(), |acc, (&m, xi)| if m == 0 { acc } else { acc + T::from_u32(m) * xi.clone() })
        })
        .collect()
}

fn identity(d: usize) -> Vec<Vec<u32>> {
    (0..d).map(|i| (0..d).map(|j| (i == j) as u32).collect()).collect()
}

impl PLMap {
    pub fn source(&self) -> &Arc<ConeComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ConeComplex> {
        &self.target
    }

    pub fn image(&self, cone: usize) -> &ConeImage {
        &self.images[cone]
    }

    pub fn images(&self) -> &[ConeImage] {
        &self.images
    }

    fn raw_apply<T: Coordinate>(&self, cone: usize, coords: &[T]) -> (usize, Vec<T>) {
        let img = &self.images[cone];
        normalize_point(&self.target, img.target, &mat_vec(&img.matrix, coords))
    }

    /// Image of a point with non-negative coordinates on `cone`. The result is
    /// normalized to its minimal face.
    pub fn apply(&self, cone: usize, coords: &[Rational]) -> Result<(usize, Vec<Rational>)> {
        if cone >= self.source.len() {
            return Err(Error::UnknownCone(cone.to_string()));
        }
        let d = self.source.cone(cone).dim();
        if coords.len() != d {
            return Err(Error::IllDefinedMap(format!("cone {cone} needs {d} coordinates, got {}", coords.len())));
        }
        if coords.iter().any(|x| x < &Rational::zero()) {
            return Err(Error::IllDefinedMap("coordinates must be non-negative".into()));
        }
        let (face, pt) = normalize_point(&self.source, cone, coords);
        Ok(self.raw_apply(face, &pt))
    }

    /// Images of the primitive generators of every source ray.
    pub fn ray_images(&self) -> Vec<RayImage> {
        self.source
            .rays()
            .into_iter()
            .map(|r| {
                let (t, v) = self.raw_apply::<u64>(r, &[1]);
                if v.is_empty() {
                    RayImage { source: r, target: None, multiplier: 0 }
                } else {
                    RayImage { source: r, target: Some(t), multiplier: v[0] as u32 }
                }
            })
            .collect()
    }

    /// Checks that every column of every cone matrix is a multiple of a unit
    /// vector along the image of the corresponding ray, and that the map agrees
    /// with its restriction to every face on a generic point.
    pub fn verify(&self) -> Result<()> {
        let rays: BTreeMap<usize, RayImage> = self.ray_images().into_iter().map(|r| (r.source, r)).collect();
        const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
        for s in 0..self.source.len() {
            let img = &self.images[s];
            let d = self.source.cone(s).dim();
            let td = self.target.cone(img.target).dim();
            if img.matrix.len() != td || img.matrix.iter().any(|row| row.len() != d) {
                return Err(Error::IllDefinedMap(format!("cone {s}: matrix has the wrong shape")));
            }
            for i in 0..d {
                let ray = &rays[&self.source.edge_ray(s, i)];
                let nonzero: Vec<usize> = (0..td).filter(|&j| img.matrix[j][i] != 0).collect();
                let ok = match (nonzero.as_slice(), ray.target) {
                    ([], None) => true,
                    ([j], Some(t)) => {
                        self.target.edge_ray(img.target, *j) == t && img.matrix[*j][i] == ray.multiplier
                    }
                    _ => false,
                };
                if !ok {
                    return Err(Error::IllDefinedMap(format!("cone {s}: edge {i} is not sent along its ray image")));
                }
            }
            for mask in 0..1usize << d {
                let x: Vec<u64> = (0..d).map(|i| if mask >> i & 1 == 1 { PRIMES[i % PRIMES.len()] } else { 0 }).collect();
                let direct = self.raw_apply(s, &x);
                let (face, pt) = normalize_point(&self.source, s, &x);
                if self.raw_apply(face, &pt) != direct {
                    return Err(Error::IllDefinedMap(format!("cone {s}: disagrees with its face {face}")));
                }
            }
        }
        Ok(())
    }

    pub fn pullback(&self, f: &PiecewisePoly) -> Result<PiecewisePoly> {
        if !self.target.same_as(f.complex()) {
            return Err(Error::ComplexMismatch);
        }
        let polys = (0..self.source.len())
            .map(|s| {
                let img = &self.images[s];
                f.on(img.target).linear_substitute(&img.matrix, self.source.cone(s).dim())
            })
            .collect();
        PiecewisePoly::from_polys(self.source.clone(), polys)
    }

    /// `{source cone id: {target, matrix}}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let map: BTreeMap<String, ConeImageJson> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, img)| (i.to_string(), ConeImageJson { target: img.target, matrix: img.matrix.clone() }))
            .collect();
        serde_json::to_value(map).expect("map serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConeImageJson {
    pub target: usize,
    pub matrix: Vec<Vec<u32>>,
}

/// Tropical pseudostabilization: each stable cone goes to the cone of its
/// pseudostabilized graph, with coordinates given by the local-move transfer data.
pub fn build_trop_t(stable: Arc<ConeComplex>, ps: Arc<ConeComplex>) -> Result<PLMap> {
    if *stable.kind() != ComplexKind::Stable || *ps.kind() != ComplexKind::Pseudostable {
        return Err(Error::SubcomplexMismatch("expected a stable and a pseudostable complex".into()));
    }
    if !ps.same_as(&stable.pseudostable_subcomplex()?) {
        return Err(Error::SubcomplexMismatch("pseudostable complex is not the star complement".into()));
    }
    let star: Vec<usize> = stable.ray(&RayLabel::elliptic_tail()).map(|r| stable.open_star(r)).unwrap_or_default();
    let mut images = Vec::with_capacity(stable.len());
    for s in 0..stable.len() {
        let result = pseudostabilize(stable.cone(s).graph())?;
        let (target, lab) = ps
            .locate(&result.graph)
            .ok_or_else(|| Error::SubcomplexMismatch(format!("cone {s}: pseudostable image not found")))?;
        let mut matrix = vec![Vec::new(); result.graph.num_edges()];
        for (e, row) in result.transfer.into_iter().enumerate() {
            matrix[lab.edge_map[e]] = row;
        }
        if !star.contains(&s) && (ps.cone(target).code() != stable.cone(s).code() || matrix != identity(matrix.len())) {
            return Err(Error::IllDefinedMap(format!("cone {s} lies off the star but is moved")));
        }
        images.push(ConeImage { target, matrix });
    }
    let map = PLMap { source: stable, target: ps, images };
    map.verify()?;
    check_trop_t_rays(&map)?;
    Ok(map)
}

/// The elliptic-tail ray goes to the irreducible ray with slope 12, every other
/// ray to its namesake with slope 1.
fn check_trop_t_rays(map: &PLMap) -> Result<()> {
    for r in map.ray_images() {
        let label = map.source.ray_label(r.source).expect("ray");
        let (want_label, want_mult) = if *label == RayLabel::elliptic_tail() {
            (RayLabel::Irreducible, TAIL_SLOPE)
        } else {
            (label.clone(), 1)
        };
        if r.target.and_then(|t| map.target.ray_label(t)) != Some(&want_label) || r.multiplier != want_mult {
            return Err(Error::IllDefinedMap(format!("ray {label} has an unexpected image")));
        }
    }
    Ok(())
}

/// Contracts edges at weighted-unstable genus-zero vertices until the graph
/// is weighted-stable. Returns the new graph and the fate of each edge.
fn weighted_reduce(g: &DualGraph, weights: &[Rational]) -> Result<(DualGraph, Vec<Option<usize>>)> {
    let mut graph = g.clone();
    let mut fate: Vec<Option<usize>> = (0..g.num_edges()).map(Some).collect();
    while !graph.is_weighted_stable(weights) {
        let v = (0..graph.num_vertices())
            .find(|&v| {
                graph.vertex_genus(v) == 0 && !vertex_weighted_stable(&graph, v, weights)
            })
            .ok_or_else(|| Error::IllDefinedMap("reduction needs to contract a positive-genus vertex".into()))?;
        if graph.edge_valence(v) != 1 {
            return Err(Error::IllDefinedMap(format!("unstable vertex {v} is not a tail")));
        }
        let e = (0..graph.num_edges()).find(|&e| graph.edge(e).0 == v || graph.edge(e).1 == v).expect("tail edge");
        let mut mask = vec![false; graph.num_edges()];
        mask[e] = true;
        let (next, map) = graph.contract_edges(&mask);
        for f in fate.iter_mut() {
            *f = f.and_then(|x| map[x]);
        }
        graph = next;
    }
    Ok((graph, fate))
}

fn vertex_weighted_stable(g: &DualGraph, v: usize, weights: &[Rational]) -> bool {
    let w = g.legs_at(v).iter().fold(Rational::zero(), |acc, &l| acc + &weights[l - 1]);
    Rational::from_integer((g.edge_valence(v) as i64).into()) + w > Rational::from_integer(2.into())
}

/// Tropical reduction map to a weighted complex: edges cutting off weighted-unstable
/// rational tails are contracted, all other coordinates are kept.
pub fn build_hassett_pi(stable: Arc<ConeComplex>, weighted: Arc<ConeComplex>) -> Result<PLMap> {
    let ComplexKind::Weighted(weights) = weighted.kind().clone() else {
        return Err(Error::SubcomplexMismatch("target must be a weighted complex".into()));
    };
    if *stable.kind() != ComplexKind::Stable || stable.genus() != weighted.genus() || stable.num_legs() != weighted.num_legs() {
        return Err(Error::SubcomplexMismatch("source must be the stable complex of the same (g, n)".into()));
    }
    let mut images = Vec::with_capacity(stable.len());
    for s in 0..stable.len() {
        let g = stable.cone(s).graph();
        let (reduced, fate) = weighted_reduce(g, &weights)?;
        let (target, lab) = weighted
            .locate(&reduced)
            .ok_or_else(|| Error::SubcomplexMismatch(format!("cone {s}: reduced graph not in the weighted complex")))?;
        let mut matrix = vec![vec![0u32; g.num_edges()]; reduced.num_edges()];
        for (i, f) in fate.iter().enumerate() {
            if let Some(e) = f {
                matrix[lab.edge_map[*e]][i] = 1;
            }
        }
        images.push(ConeImage { target, matrix });
    }
    let map = PLMap { source: stable, target: weighted, images };
    map.verify()?;
    Ok(map)
}

/// Weights in the light chamber used for the genus-one comparison.
pub fn light_weights(n: usize) -> Vec<Rational> {
    vec![frac(1, 100); n]
}

/// Stable and pseudostable complexes of one (g, n) together with trop(T).
#[derive(Clone, Debug)]
pub struct ModuliPair {
    pub stable: Arc<ConeComplex>,
    pub ps: Arc<ConeComplex>,
    pub trop_t: PLMap,
}

impl ModuliPair {
    pub fn new(genus: u32, n: usize) -> Result<Self> {
        let stable = Arc::new(enumerate_stable(genus, n)?);
        let ps = Arc::new(stable.pseudostable_subcomplex()?);
        let trop_t = build_trop_t(stable.clone(), ps.clone())?;
        Ok(ModuliPair { stable, ps, trop_t })
    }

    /// Light-weight complex and the reduction map onto it.
    pub fn hassett(&self) -> Result<PLMap> {
        let weights = light_weights(self.stable.num_legs());
        let weighted = Arc::new(enumerate_weighted(self.stable.genus(), self.stable.num_legs(), &weights)?);
        build_hassett_pi(self.stable.clone(), weighted)
    }
}
