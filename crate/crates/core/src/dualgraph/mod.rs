//! Dual graphs of nodal curves: vertex genera, edges (nodes) and labelled legs
//! (markings).
//!
//! Edges are stored as vertex pairs `(u, v)` with `u <= v`; a loop is `(v, v)`.
//! Edge `e` owns the half-edges `2e` (at `u`) and `2e + 1` (at `v`).

mod canon;
mod pseudo;

pub(crate) use canon::code_of_canonical;
pub use canon::{automorphisms, canonical_form, canonical_labeling, encoding, is_isomorphic, AutGroup, CanonicalCode, Labeling};
pub use pseudo::{apply_move, local_moves, pseudostabilize, LocalMove, Pseudostabilization, TAIL_SLOPE};

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualGraph {
    genera: Vec<u32>,
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

/// Rejects (g, n) outside g > 0 minus (1,0), (1,1), (2,0).
pub fn ensure_admitted(genus: u32, legs: usize) -> Result<()> {
    let excluded = genus == 0 || matches!((genus, legs), (1, 0) | (1, 1) | (2, 0));
    if excluded {
        Err(Error::OutsideAdmittedRange { genus, legs })
    } else {
        Ok(())
    }
}

impl DualGraph {
    /// `legs[i]` is the vertex carrying marking `i + 1`.
    pub fn new(genera: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<usize>) -> Result<Self> {
        if genera.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let nv = genera.len();
        for &(a, b) in &edges {
            if a >= nv || b >= nv {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) references a missing vertex")));
            }
        }
        if let Some(&v) = legs.iter().find(|&&v| v >= nv) {
            return Err(Error::InvalidGraph(format!("leg attached to missing vertex {v}")));
        }
        let edges = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let g = DualGraph { genera, edges, legs };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Single vertex of genus `genus` carrying all `n` legs.
    pub fn smooth(genus: u32, n: usize) -> Self {
        DualGraph { genera: vec![genus], edges: Vec::new(), legs: vec![0; n] }
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut comps = nv;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
            }
        }
        comps == 1
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Vertex of each marking, indexed by `label - 1`.
    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_half_edges(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn half_edge_vertex(&self, h: usize) -> usize {
        let (a, b) = self.edges[h / 2];
        if h.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.edges[e];
        a == b
    }

    /// Total genus: Σ h(v) + |E| − |V| + 1.
    pub fn genus(&self) -> u32 {
        let weights: u32 = self.genera.iter().sum();
        (weights as usize + self.edges.len() + 1 - self.genera.len()) as u32
    }

    /// Half-edges at `v`, loops counting twice.
    pub fn edge_valence(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    /// Marking labels (1-based) at `v`.
    pub fn legs_at(&self, v: usize) -> Vec<usize> {
        self.legs.iter().enumerate().filter(|(_, &w)| w == v).map(|(i, _)| i + 1).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edge_valence(v) + self.legs.iter().filter(|&&w| w == v).count()
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_half_edges()).filter(|&h| self.half_edge_vertex(h) == v).collect()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| match self.genera[v] {
            0 => self.valence(v) >= 3,
            1 => self.valence(v) >= 1,
            _ => true,
        })
    }

    pub fn is_pseudostable(&self) -> bool {
        self.is_stable()
            && (0..self.num_vertices()).all(|v| match self.genera[v] {
                0 => !(self.valence(v) == 3 && self.loops_at(v) > 0),
                1 => self.valence(v) >= 2,
                _ => true,
            })
    }

    /// Hassett stability for marking weights `weights[i]` of label `i + 1`.
    pub fn is_weighted_stable(&self, weights: &[Rational]) -> bool {
        assert_eq!(weights.len(), self.num_legs(), "one weight per leg");
        (0..self.num_vertices()).all(|v| match self.genera[v] {
            0 => {
                let w: Rational = self
                    .legs
                    .iter()
                    .zip(weights)
                    .filter(|(&x, _)| x == v)
                    .fold(Rational::zero(), |acc, (_, w)| acc + w);
                Rational::from_integer(self.edge_valence(v).into()) + w > Rational::from_integer(2.into())
            }
            1 => self.valence(v) >= 1,
            _ => true,
        })
    }

    pub fn contract_edge(&self, e: usize) -> DualGraph {
        let mut mask = vec![false; self.num_edges()];
        mask[e] = true;
        self.contract_edges(&mask).0
    }

    /// Contracts every edge with `contracted[e] == true`. Returns the contracted graph and,
    /// for each original edge, its index in the result (`None` if contracted). Surviving
    /// edges keep their relative order.
    pub fn contract_edges(&self, contracted: &[bool]) -> (DualGraph, Vec<Option<usize>>) {
        assert_eq!(contracted.len(), self.num_edges());
        let nv = self.num_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if contracted[e] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut new_index = vec![usize::MAX; nv];
        let mut count = 0;
        for v in 0..nv {
            let r = find(&mut parent, v);
            if new_index[r] == usize::MAX {
                new_index[r] = count;
                count += 1;
            }
        }
        let vmap: Vec<usize> = (0..nv).map(|v| new_index[find(&mut parent, v)]).collect();
        // component genus = Σ h + (#contracted edges) − (#vertices) + 1
        let mut genera = vec![0i64; count];
        let mut vcount = vec![0i64; count];
        for v in 0..nv {
            genera[vmap[v]] += self.genera[v] as i64;
            vcount[vmap[v]] += 1;
        }
        for (e, &(a, _)) in self.edges.iter().enumerate() {
            if contracted[e] {
                genera[vmap[a]] += 1;
            }
        }
        let genera: Vec<u32> = genera.iter().zip(&vcount).map(|(g, c)| (g - c + 1) as u32).collect();
        let mut edges = Vec::new();
        let mut emap = Vec::with_capacity(self.num_edges());
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if contracted[e] {
                emap.push(None);
            } else {
                emap.push(Some(edges.len()));
                let (x, y) = (vmap[a], vmap[b]);
                edges.push((x.min(y), x.max(y)));
            }
        }
        let legs = self.legs.iter().map(|&v| vmap[v]).collect();
        (DualGraph { genera, edges, legs }, emap)
    }

    /// Applies a vertex relabelling `vertex_map[old] = new` and reorders edges by
    /// `edge_order[new] = old`.
    pub(crate) fn relabel(&self, vertex_map: &[usize], edge_order: &[usize]) -> DualGraph {
        let mut genera = vec![0; self.num_vertices()];
        for (old, &new) in vertex_map.iter().enumerate() {
            genera[new] = self.genera[old];
        }
        let edges = edge_order
            .iter()
            .map(|&old| {
                let (a, b) = self.edges[old];
                let (x, y) = (vertex_map[a], vertex_map[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        let legs = self.legs.iter().map(|&v| vertex_map[v]).collect();
        DualGraph { genera, edges, legs }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("graph serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let gj: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        DualGraph::try_from(gj)
    }

    /// Graphviz rendering; vertices are labelled by genus, legs drawn as plain nodes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (v, h) in self.genera.iter().enumerate() {
            out.push_str(&format!("  v{v} [label=\"{h}\", shape=circle];\n"));
        }
        for (i, v) in self.legs.iter().enumerate() {
            out.push_str(&format!("  l{} [label=\"{}\", shape=plaintext];\n", i + 1, i + 1));
            out.push_str(&format!("  v{v} -- l{};\n", i + 1));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  v{a} -- v{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexJson {
    pub genus: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LegJson {
    pub label: usize,
    pub vertex: usize,
}

/// Wire form of a dual graph. Field order is the serialized key order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub legs: Vec<LegJson>,
}

impl From<&DualGraph> for GraphJson {
    fn from(g: &DualGraph) -> Self {
        GraphJson {
            vertices: g.genera.iter().map(|&genus| VertexJson { genus }).collect(),
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            legs: g.legs.iter().enumerate().map(|(i, &vertex)| LegJson { label: i + 1, vertex }).collect(),
        }
    }
}

impl TryFrom<GraphJson> for DualGraph {
    type Error = Error;

    fn try_from(gj: GraphJson) -> Result<Self> {
        let n = gj.legs.len();
        let mut legs = vec![usize::MAX; n];
        for leg in &gj.legs {
            if leg.label == 0 || leg.label > n || legs[leg.label - 1] != usize::MAX {
                return Err(Error::InvalidGraph(format!("leg labels must be exactly 1..{n}")));
            }
            legs[leg.label - 1] = leg.vertex;
        }
        DualGraph::new(
            gj.vertices.iter().map(|v| v.genus).collect(),
            gj.edges.iter().map(|e| (e[0], e[1])).collect(),
            legs,
        )
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::DualGraph;

    /// Genus-one vertex joined to a genus-zero vertex carrying both legs.
    pub fn elliptic_tail_12() -> DualGraph {
        DualGraph::new(vec![1, 0], vec![(0, 1)], vec![1, 1]).unwrap()
    }

    /// Genus-zero vertex with a loop and both legs.
    pub fn loop_12() -> DualGraph {
        DualGraph::new(vec![0], vec![(0, 0)], vec![0, 0]).unwrap()
    }

    /// Two genus-zero vertices joined by two edges, one leg each.
    pub fn banana_12() -> DualGraph {
        DualGraph::new(vec![0, 0], vec![(0, 1), (0, 1)], vec![0, 1]).unwrap()
    }

    /// Loop vertex joined by a tail edge to the vertex carrying both legs.
    pub fn loop_tail_12() -> DualGraph {
        DualGraph::new(vec![0, 0], vec![(0, 0), (0, 1)], vec![1, 1]).unwrap()
    }
}
