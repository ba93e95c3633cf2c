//! Generalized cone complexes of tropical curves.
//!
//! One cone per isomorphism class of dual graph, with coordinates the edge
//! lengths in canonical edge order. Folded cones keep their automorphism action
//! explicit. Face maps are stored for every subset of kept edges, indexed by the
//! bitmask of kept edges.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dualgraph::{
    automorphisms, canonical_labeling, code_of_canonical, ensure_admitted, AutGroup, CanonicalCode, DualGraph,
    GraphJson, Labeling,
};
use crate::error::{Error, Result};
use crate::rational::{to_fraction_string, Rational};

/// Default cap on 3g − 3 + n; (2, 4) sits exactly at it.
pub const DEFAULT_EDGE_BOUND: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    Stable,
    Pseudostable,
    Weighted(Vec<Rational>),
}

impl ComplexKind {
    pub fn suffix(&self) -> &'static str {
        match self {
            ComplexKind::Stable => "",
            ComplexKind::Pseudostable => "_ps",
            ComplexKind::Weighted(_) => "_w",
        }
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexKind::Stable => write!(f, "stable"),
            ComplexKind::Pseudostable => write!(f, "pseudostable"),
            ComplexKind::Weighted(w) => {
                write!(f, "weighted({})", w.iter().map(to_fraction_string).join(","))
            }
        }
    }
}

/// Boundary divisor named by a ray: the irreducible one, or the separating one
/// whose side not containing marking 1 has genus `genus` and markings `legs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RayLabel {
    Irreducible,
    Separating { genus: u32, legs: Vec<usize> },
}

impl RayLabel {
    pub fn elliptic_tail() -> Self {
        RayLabel::Separating { genus: 1, legs: Vec::new() }
    }

    /// Label of a one-edge graph.
    pub fn of_graph(g: &DualGraph) -> RayLabel {
        assert_eq!(g.num_edges(), 1, "ray graphs have exactly one edge");
        if g.is_loop(0) {
            return RayLabel::Irreducible;
        }
        let sides: Vec<(u32, Vec<usize>)> = (0..2).map(|v| (g.vertex_genus(v), g.legs_at(v))).collect();
        let pick = if g.num_legs() == 0 {
            if sides[0].0 <= sides[1].0 {
                0
            } else {
                1
            }
        } else if sides[0].1.contains(&1) {
            1
        } else {
            0
        };
        let (genus, legs) = sides[pick].clone();
        RayLabel::Separating { genus, legs }
    }

    pub fn parse(s: &str) -> Option<RayLabel> {
        let s = s.trim();
        match s {
            "rho0" | "rho_irr" => return Some(RayLabel::Irreducible),
            "rho1" => return Some(RayLabel::elliptic_tail()),
            _ => {}
        }
        let inner = s.strip_prefix("rho(").or_else(|| s.strip_prefix('('))?.strip_suffix(')')?;
        let (genus, legs) = inner.split_once(',')?;
        let genus: u32 = genus.trim().parse().ok()?;
        let legs = legs.trim().strip_prefix('{')?.strip_suffix('}')?;
        let mut labels = Vec::new();
        for part in legs.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            labels.push(part.parse().ok()?);
        }
        labels.sort();
        Some(RayLabel::Separating { genus, legs: labels })
    }
}

impl fmt::Display for RayLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayLabel::Irreducible => write!(f, "rho0"),
            RayLabel::Separating { genus: 1, legs } if legs.is_empty() => write!(f, "rho1"),
            RayLabel::Separating { genus, legs } => {
                write!(f, "rho({},{{{}}})", genus, legs.iter().join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cone {
    graph: DualGraph,
    code: CanonicalCode,
    aut: AutGroup,
}

impl Cone {
    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }

    pub fn aut(&self) -> &AutGroup {
        &self.aut
    }

    pub fn dim(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn folded(&self) -> bool {
        self.aut.edge_action_order() > 1
    }
}

/// Face of a cone obtained by contracting every edge outside `kept`. Source edge
/// `kept[k]` becomes coordinate `injection[k]` of the target cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceMap {
    pub target: usize,
    pub kept: Vec<usize>,
    pub injection: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ConeComplex {
    genus: u32,
    n: usize,
    kind: ComplexKind,
    cones: Vec<Cone>,
    faces: Vec<Vec<FaceMap>>,
    index: HashMap<CanonicalCode, usize>,
    ray_labels: Vec<Option<RayLabel>>,
}

pub fn enumerate_stable(genus: u32, n: usize) -> Result<ConeComplex> {
    enumerate_stable_with_bound(genus, n, DEFAULT_EDGE_BOUND)
}

pub fn enumerate_stable_with_bound(genus: u32, n: usize, bound: usize) -> Result<ConeComplex> {
    check_range(genus, n, bound)?;
    let graphs = enumerate_graphs(genus, n, |g| g.is_stable());
    Ok(ConeComplex::from_graphs(genus, n, ComplexKind::Stable, graphs))
}

/// Complex of Hassett-stable graphs for marking weights `weights`.
pub fn enumerate_weighted(genus: u32, n: usize, weights: &[Rational]) -> Result<ConeComplex> {
    check_range(genus, n, DEFAULT_EDGE_BOUND)?;
    if weights.len() != n {
        return Err(Error::InvalidWeights(format!("expected {n} weights, got {}", weights.len())));
    }
    if weights.iter().any(|w| !(w > &Rational::zero() && w <= &Rational::one())) {
        return Err(Error::InvalidWeights("weights must lie in (0, 1]".into()));
    }
    let total: Rational = weights.iter().fold(Rational::zero(), |a, w| a + w);
    if Rational::from_integer((2 * genus as i64 - 2).into()) + total <= Rational::zero() {
        return Err(Error::InvalidWeights("2g - 2 + sum of weights must be positive".into()));
    }
    let graphs = enumerate_graphs(genus, n, |g| g.is_weighted_stable(weights));
    Ok(ConeComplex::from_graphs(genus, n, ComplexKind::Weighted(weights.to_vec()), graphs))
}

fn check_range(genus: u32, n: usize, bound: usize) -> Result<()> {
    ensure_admitted(genus, n)?;
    let dim = 3 * genus as usize + n - 3;
    if dim > bound {
        return Err(Error::EdgeBoundExceeded { dim, bound });
    }
    Ok(())
}

/// Every graph with an edge contracts to one with one edge fewer, and the
/// stability predicates used here are closed under contraction, so splitting
/// vertices level by level from the smooth graph reaches every class.
fn enumerate_graphs(genus: u32, n: usize, admissible: impl Fn(&DualGraph) -> bool) -> Vec<DualGraph> {
    let smooth = DualGraph::smooth(genus, n);
    let mut seen: HashSet<CanonicalCode> = HashSet::new();
    let mut all = Vec::new();
    if !admissible(&smooth) {
        return all;
    }
    seen.insert(code_of_canonical(&smooth));
    all.push(smooth.clone());
    let mut level = vec![smooth];
    while !level.is_empty() {
        let mut next = Vec::new();
        for g in &level {
            for cand in splittings(g) {
                if !admissible(&cand) {
                    continue;
                }
                let (canon, _) = canonical_labeling(&cand);
                if seen.insert(code_of_canonical(&canon)) {
                    next.push(canon);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// All graphs contracting onto `g` along a single new edge.
fn splittings(g: &DualGraph) -> Vec<DualGraph> {
    let mut out = Vec::new();
    let nv = g.num_vertices();
    for v in 0..nv {
        let h = g.vertex_genus(v);
        if h >= 1 {
            let mut genera = g.genera().to_vec();
            genera[v] -= 1;
            let mut edges = g.edges().to_vec();
            edges.push((v, v));
            out.push(DualGraph::new(genera, edges, g.legs().to_vec()).expect("loop insertion is valid"));
        }
        let halves = g.half_edges_at(v);
        let legs: Vec<usize> = (0..g.num_legs()).filter(|&i| g.legs()[i] == v).collect();
        let items = halves.len() + legs.len();
        for mask in 0u64..(1u64 << items) {
            for h1 in 0..=h {
                let moved_half = |hh: usize| {
                    halves.iter().position(|&x| x == hh).is_some_and(|k| mask >> k & 1 == 1)
                };
                let mut genera = g.genera().to_vec();
                genera[v] = h1;
                genera.push(h - h1);
                let mut edges: Vec<(usize, usize)> = (0..g.num_edges())
                    .map(|e| {
                        let (a, b) = g.edge(e);
                        let a = if moved_half(2 * e) { nv } else { a };
                        let b = if moved_half(2 * e + 1) { nv } else { b };
                        (a, b)
                    })
                    .collect();
                edges.push((v, nv));
                let new_legs: Vec<usize> = (0..g.num_legs())
                    .map(|i| match legs.iter().position(|&l| l == i) {
                        Some(k) if mask >> (halves.len() + k) & 1 == 1 => nv,
                        _ => g.legs()[i],
                    })
                    .collect();
                out.push(DualGraph::new(genera, edges, new_legs).expect("vertex splitting is valid"));
            }
        }
    }
    out
}

impl ConeComplex {
    fn from_graphs(genus: u32, n: usize, kind: ComplexKind, graphs: Vec<DualGraph>) -> Self {
        let mut cones: Vec<Cone> = graphs
            .into_iter()
            .map(|graph| {
                let code = code_of_canonical(&graph);
                let aut = automorphisms(&graph);
                Cone { graph, code, aut }
            })
            .collect();
        cones.sort_by(|a, b| (a.dim(), &a.code).cmp(&(b.dim(), &b.code)));
        let index: HashMap<CanonicalCode, usize> =
            cones.iter().enumerate().map(|(i, c)| (c.code.clone(), i)).collect();
        let faces = cones
            .iter()
            .map(|cone| {
                let d = cone.dim();
                (0..1usize << d)
                    .map(|mask| {
                        let contracted: Vec<bool> = (0..d).map(|e| mask >> e & 1 == 0).collect();
                        let (face, emap) = cone.graph.contract_edges(&contracted);
                        let (canon, lab) = canonical_labeling(&face);
                        let target = index[&code_of_canonical(&canon)];
                        let kept: Vec<usize> = (0..d).filter(|&e| mask >> e & 1 == 1).collect();
                        let injection = kept.iter().map(|&e| lab.edge_map[emap[e].expect("kept")]).collect();
                        FaceMap { target, kept, injection }
                    })
                    .collect()
            })
            .collect();
        let ray_labels = cones
            .iter()
            .map(|c| (c.dim() == 1).then(|| RayLabel::of_graph(&c.graph)))
            .collect();
        ConeComplex { genus, n, kind, cones, faces, index, ray_labels }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_legs(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ComplexKind {
        &self.kind
    }

    /// Dimension 3g − 3 + n of the moduli space.
    pub fn moduli_dim(&self) -> usize {
        3 * self.genus as usize + self.n - 3
    }

    /// Same cones in the same order, for the same kind of stability.
    pub fn same_as(&self, other: &ConeComplex) -> bool {
        std::ptr::eq(self, other)
            || (self.kind == other.kind
                && self.genus == other.genus
                && self.n == other.n
                && self.cones.len() == other.cones.len()
                && self.cones.iter().zip(&other.cones).all(|(a, b)| a.code == b.code))
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: usize) -> &Cone {
        &self.cones[id]
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    /// Number of cones of each dimension, starting at 0.
    pub fn dims(&self) -> Vec<usize> {
        let max = self.cones.iter().map(Cone::dim).max().unwrap_or(0);
        (0..=max).map(|d| self.cones.iter().filter(|c| c.dim() == d).count()).collect()
    }

    /// Face of `cone` keeping the edges in the bitmask `kept`.
    pub fn face(&self, cone: usize, kept: usize) -> &FaceMap {
        &self.faces[cone][kept]
    }

    pub fn faces(&self, cone: usize) -> &[FaceMap] {
        &self.faces[cone]
    }

    pub fn rays(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.ray_labels[i].is_some()).collect()
    }

    pub fn ray_label(&self, cone: usize) -> Option<&RayLabel> {
        self.ray_labels[cone].as_ref()
    }

    pub fn ray(&self, label: &RayLabel) -> Option<usize> {
        self.ray_labels.iter().position(|l| l.as_ref() == Some(label))
    }

    /// Ray spanned by coordinate `edge` of `cone`.
    pub fn edge_ray(&self, cone: usize, edge: usize) -> usize {
        self.faces[cone][1 << edge].target
    }

    pub fn locate(&self, g: &DualGraph) -> Option<(usize, Labeling)> {
        let (canon, lab) = canonical_labeling(g);
        self.index.get(&code_of_canonical(&canon)).map(|&id| (id, lab))
    }

    pub fn is_face(&self, tau: usize, sigma: usize) -> bool {
        self.faces[sigma].iter().any(|f| f.target == tau)
    }

    /// Cones having `tau` as a face, `tau` included; their relative interiors
    /// make up the open star.
    pub fn open_star(&self, tau: usize) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.is_face(tau, s)).collect()
    }

    /// Restriction to the cones flagged in `keep`, which must be closed under faces.
    pub fn subcomplex(&self, keep: &[bool], kind: ComplexKind) -> Result<ConeComplex> {
        let mut new_id = vec![usize::MAX; self.len()];
        let mut count = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_id[i] = count;
                count += 1;
            }
        }
        let mut cones = Vec::new();
        let mut faces = Vec::new();
        let mut ray_labels = Vec::new();
        for i in (0..self.len()).filter(|&i| keep[i]) {
            cones.push(self.cones[i].clone());
            ray_labels.push(self.ray_labels[i].clone());
            let mut fs = Vec::new();
            for f in &self.faces[i] {
                if !keep[f.target] {
                    return Err(Error::SubcomplexMismatch(format!("cone {i} has face {} outside the subset", f.target)));
                }
                fs.push(FaceMap { target: new_id[f.target], kept: f.kept.clone(), injection: f.injection.clone() });
            }
            faces.push(fs);
        }
        let index = cones.iter().enumerate().map(|(i, c)| (c.code.clone(), i)).collect();
        Ok(ConeComplex { genus: self.genus, n: self.n, kind, cones, faces, index, ray_labels })
    }

    /// Complement of the open star of the elliptic-tail ray, cross-checked
    /// against the pseudostability predicate cone by cone.
    pub fn pseudostable_subcomplex(&self) -> Result<ConeComplex> {
        if self.kind != ComplexKind::Stable {
            return Err(Error::SubcomplexMismatch("pseudostable subcomplex needs the stable complex".into()));
        }
        let star: BTreeSet<usize> = self.ray(&RayLabel::elliptic_tail()).map(|r| self.open_star(r)).unwrap_or_default().into_iter().collect();
        let keep: Vec<bool> = (0..self.len()).map(|i| !star.contains(&i)).collect();
        for (i, cone) in self.cones.iter().enumerate() {
            if keep[i] != cone.graph.is_pseudostable() {
                return Err(Error::SubcomplexMismatch(format!(
                    "cone {i}: open-star membership disagrees with the pseudostability predicate"
                )));
            }
        }
        self.subcomplex(&keep, ComplexKind::Pseudostable)
    }

    /// Two-dimensional cones all of whose rays are the irreducible ray.
    pub fn banana_cones(&self) -> Vec<usize> {
        let Some(rho0) = self.ray(&RayLabel::Irreducible) else { return Vec::new() };
        (0..self.len())
            .filter(|&i| self.cones[i].dim() == 2 && (0..2).all(|e| self.edge_ray(i, e) == rho0))
            .collect()
    }

    fn loop_tail_cones(&self) -> Vec<usize> {
        let (Some(rho0), Some(rho1)) = (self.ray(&RayLabel::Irreducible), self.ray(&RayLabel::elliptic_tail())) else {
            return Vec::new();
        };
        (0..self.len())
            .filter(|&i| {
                let c = &self.cones[i];
                c.dim() == 2 && {
                    let mut rays = [self.edge_ray(i, 0), self.edge_ray(i, 1)];
                    rays.sort();
                    let mut want = [rho0, rho1];
                    want.sort();
                    rays == want && (0..2).any(|e| c.graph.is_loop(e))
                }
            })
            .collect()
    }

    /// Human name: `point`, ray labels, `banana` / `loop+tail` when unambiguous,
    /// otherwise `c<id>`.
    pub fn cone_name(&self, id: usize) -> String {
        let cone = &self.cones[id];
        if cone.dim() == 0 {
            return "point".into();
        }
        if let Some(label) = &self.ray_labels[id] {
            return label.to_string();
        }
        if self.banana_cones() == [id] {
            return "banana".into();
        }
        if self.loop_tail_cones() == [id] {
            return "loop+tail".into();
        }
        format!("c{id}")
    }

    pub fn cone_by_name(&self, name: &str) -> Result<usize> {
        let name = name.trim();
        let unique = |v: Vec<usize>| if v.len() == 1 { Some(v[0]) } else { None };
        let found = match name {
            "point" | "origin" => (0..self.len()).find(|&i| self.cones[i].dim() == 0),
            "banana" => unique(self.banana_cones()),
            "loop+tail" => unique(self.loop_tail_cones()),
            _ => {
                if let Some(label) = RayLabel::parse(name) {
                    self.ray(&label)
                } else {
                    name.strip_prefix('c').unwrap_or(name).parse::<usize>().ok().filter(|&i| i < self.len())
                }
            }
        };
        found.ok_or_else(|| Error::UnknownCone(name.to_string()))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let cones = self
            .cones
            .iter()
            .enumerate()
            .map(|(id, c)| ConeJson {
                id,
                dim: c.dim(),
                graph: GraphJson::from(&c.graph),
                aut_order: c.aut.order(),
                folded: c.folded(),
            })
            .collect();
        let face_maps = self
            .faces
            .iter()
            .enumerate()
            .flat_map(|(source, fs)| {
                fs.iter().map(move |f| FaceMapJson { source, target: f.target, kept_edges: f.kept.clone() })
            })
            .collect();
        let rays = self
            .rays()
            .into_iter()
            .map(|cone| RayJson { cone, label: self.ray_labels[cone].as_ref().expect("ray").to_string() })
            .collect();
        let json = ComplexJson { kind: self.kind.to_string(), genus: self.genus, n: self.n, cones, face_maps, rays };
        serde_json::to_value(json).expect("complex serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConeJson {
    pub id: usize,
    pub dim: usize,
    pub graph: GraphJson,
    pub aut_order: usize,
    pub folded: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FaceMapJson {
    pub source: usize,
    pub target: usize,
    pub kept_edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RayJson {
    pub cone: usize,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexJson {
    pub kind: String,
    pub genus: u32,
    pub n: usize,
    pub cones: Vec<ConeJson>,
    pub face_maps: Vec<FaceMapJson>,
    pub rays: Vec<RayJson>,
}

/// Face-incidence counts `m[s][t]` = number of kept-edge subsets of `s` with target `t`.
fn incidence(c: &ConeComplex) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; c.len()]; c.len()];
    for s in 0..c.len() {
        for f in c.faces(s) {
            m[s][f.target] += 1;
        }
    }
    m
}

/// Isomorphism of abstract cone complexes: a dimension- and fold-preserving
/// bijection of cones that preserves face incidences. Brute force within
/// signature classes, meant for small complexes.
pub fn abstractly_isomorphic(a: &ConeComplex, b: &ConeComplex) -> bool {
    if a.len() != b.len() || a.dims() != b.dims() {
        return false;
    }
    let (ia, ib) = (incidence(a), incidence(b));
    let signature = |c: &ConeComplex, inc: &Vec<Vec<usize>>, i: usize| {
        let mut faces: Vec<(usize, usize)> =
            (0..c.len()).filter(|&t| inc[i][t] > 0).map(|t| (c.cone(t).dim(), inc[i][t])).collect();
        faces.sort();
        (c.cone(i).dim(), c.cone(i).aut().edge_action_order(), faces)
    };
    let sa: Vec<_> = (0..a.len()).map(|i| signature(a, &ia, i)).collect();
    let sb: Vec<_> = (0..b.len()).map(|i| signature(b, &ib, i)).collect();
    let classes: Vec<_> = sa.iter().cloned().sorted().dedup().collect();
    let mut groups_a = Vec::new();
    let mut groups_b = Vec::new();
    for class in &classes {
        let ga: Vec<usize> = (0..a.len()).filter(|&i| &sa[i] == class).collect();
        let gb: Vec<usize> = (0..b.len()).filter(|&i| &sb[i] == class).collect();
        if ga.len() != gb.len() {
            return false;
        }
        groups_a.push(ga);
        groups_b.push(gb);
    }
    let per_group: Vec<Vec<Vec<usize>>> =
        groups_b.iter().map(|g| g.iter().copied().permutations(g.len()).collect()).collect();
    per_group.into_iter().multi_cartesian_product().any(|choice| {
        let mut f = vec![0; a.len()];
        for (ga, gb) in groups_a.iter().zip(&choice) {
            for (&x, &y) in ga.iter().zip(gb) {
                f[x] = y;
            }
        }
        (0..a.len()).all(|s| (0..a.len()).all(|t| ia[s][t] == ib[f[s]][f[t]]))
    })
}
