//! Canonical labelling and automorphism groups.
//!
//! Vertices are coloured by an isomorphism-invariant key (genus, leg labels,
//! half-edge count, loop count) and the colouring is refined by neighbour colour
//! multisets until stable. The canonical form is the lexicographically smallest
//! encoding over all vertex orders that respect the ordered colour cells, so the
//! result is exact: no hashing is involved.

use std::collections::BTreeMap;

use itertools::Itertools;

use super::DualGraph;

/// Bit-stable encoding of an isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub Vec<u32>);

/// Isomorphism from a graph onto its canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
}

impl Labeling {
    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge_map.iter().enumerate().all(|(i, &e)| i == e)
            && self.half_edge_map.iter().enumerate().all(|(i, &h)| i == h)
    }
}

/// Automorphisms acting on half-edges. A loop flip counts as a non-trivial
/// automorphism even though it fixes every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutGroup {
    order: usize,
    edge_action: Vec<Vec<usize>>,
    half_edge_perms: Vec<Vec<usize>>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Distinct induced permutations of the edges (`perm[e]` is the image of `e`),
    /// sorted, identity first.
    pub fn edge_action(&self) -> &[Vec<usize>] {
        &self.edge_action
    }

    pub fn half_edge_perms(&self) -> &[Vec<usize>] {
        &self.half_edge_perms
    }

    pub fn edge_action_order(&self) -> usize {
        self.edge_action.len()
    }
}

fn multiplicities(g: &DualGraph) -> Vec<Vec<usize>> {
    let nv = g.num_vertices();
    let mut m = vec![vec![0; nv]; nv];
    for &(a, b) in g.edges() {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

/// Stable refined colouring; colour ids are ranks of invariant signatures.
fn refined_colors(g: &DualGraph, mult: &[Vec<usize>]) -> Vec<usize> {
    let nv = g.num_vertices();
    let keys: Vec<(u32, Vec<usize>, usize, usize)> = (0..nv)
        .map(|v| (g.vertex_genus(v), g.legs_at(v), g.edge_valence(v), g.loops_at(v)))
        .collect();
    let mut colors = rank(&keys);
    loop {
        let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..nv)
            .map(|v| {
                let mut nb: Vec<(usize, usize)> =
                    (0..nv).filter(|&w| w != v && mult[v][w] > 0).map(|w| (colors[w], mult[v][w])).collect();
                nb.sort();
                (colors[v], nb)
            })
            .collect();
        let next = rank(&sigs);
        let before = colors.iter().max().map_or(0, |m| m + 1);
        let after = next.iter().max().map_or(0, |m| m + 1);
        colors = next;
        if after == before {
            return colors;
        }
    }
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let distinct: Vec<T> = items.iter().cloned().sorted().dedup().collect();
    items.iter().map(|x| distinct.binary_search(x).expect("present")).collect()
}

/// Every vertex order (`order[new] = old`) respecting the ordered colour cells.
fn cell_orders(colors: &[usize]) -> Vec<Vec<usize>> {
    let ncolors = colors.iter().max().map_or(0, |m| m + 1);
    let cells: Vec<Vec<usize>> =
        (0..ncolors).map(|c| (0..colors.len()).filter(|&v| colors[v] == c).collect()).collect();
    let per_cell: Vec<Vec<Vec<usize>>> =
        cells.iter().map(|cell| cell.iter().copied().permutations(cell.len()).collect()).collect();
    per_cell
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().collect())
        .collect()
}

fn encode_with(g: &DualGraph, vertex_map: &[usize]) -> Vec<u32> {
    let nv = g.num_vertices();
    let mut code = Vec::with_capacity(3 + nv + g.num_legs() + 2 * g.num_edges());
    code.push(nv as u32);
    code.push(g.num_edges() as u32);
    code.push(g.num_legs() as u32);
    let mut genera = vec![0; nv];
    for (old, &new) in vertex_map.iter().enumerate() {
        genera[new] = g.vertex_genus(old);
    }
    code.extend(genera);
    code.extend(g.legs().iter().map(|&v| vertex_map[v] as u32));
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (vertex_map[a], vertex_map[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort();
    for (a, b) in edges {
        code.push(a as u32);
        code.push(b as u32);
    }
    code
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

/// Canonical form together with the isomorphism onto it. A graph that already is
/// in canonical form gets the identity labelling.
pub fn canonical_labeling(g: &DualGraph) -> (DualGraph, Labeling) {
    let mult = multiplicities(g);
    let colors = refined_colors(g, &mult);
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    for order in cell_orders(&colors) {
        let vm = inverse(&order);
        let code = encode_with(g, &vm);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, vm));
        }
    }
    let (best_code, mut vertex_map) = best.expect("at least one vertex order");
    let identity: Vec<usize> = (0..g.num_vertices()).collect();
    if colors.windows(2).all(|w| w[0] <= w[1]) && encode_with(g, &identity) == best_code {
        vertex_map = identity;
    }

    // Edges of the canonical graph are sorted vertex pairs; parallel edges are
    // matched in order of appearance, which keeps already-canonical graphs fixed.
    let mapped: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (vertex_map[a], vertex_map[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    let edge_order: Vec<usize> = (0..g.num_edges()).sorted_by_key(|&e| (mapped[e], e)).collect();
    let edge_map = inverse(&edge_order);
    let canon = g.relabel(&vertex_map, &edge_order);

    let mut half_edge_map = vec![0; g.num_half_edges()];
    for e in 0..g.num_edges() {
        let ne = edge_map[e];
        let (a, _) = g.edge(e);
        let (u, v) = canon.edge(ne);
        if u == v || vertex_map[a] == u {
            half_edge_map[2 * e] = 2 * ne;
            half_edge_map[2 * e + 1] = 2 * ne + 1;
        } else {
            half_edge_map[2 * e] = 2 * ne + 1;
            half_edge_map[2 * e + 1] = 2 * ne;
        }
    }
    (canon, Labeling { vertex_map, edge_map, half_edge_map })
}

pub fn canonical_form(g: &DualGraph) -> DualGraph {
    canonical_labeling(g).0
}

pub fn encoding(g: &DualGraph) -> CanonicalCode {
    code_of_canonical(&canonical_form(g))
}

/// Code of a graph already in canonical form.
pub(crate) fn code_of_canonical(canon: &DualGraph) -> CanonicalCode {
    let identity: Vec<usize> = (0..canon.num_vertices()).collect();
    CanonicalCode(encode_with(canon, &identity))
}

pub fn is_isomorphic(a: &DualGraph, b: &DualGraph) -> bool {
    a.num_vertices() == b.num_vertices()
        && a.num_edges() == b.num_edges()
        && a.num_legs() == b.num_legs()
        && encoding(a) == encoding(b)
}

/// Full automorphism group of `g`, acting on half-edges.
pub fn automorphisms(g: &DualGraph) -> AutGroup {
    let mult = multiplicities(g);
    let colors = refined_colors(g, &mult);
    let nv = g.num_vertices();

    let mut bundles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, &pair) in g.edges().iter().enumerate() {
        bundles.entry(pair).or_default().push(e);
    }

    let mut half_edge_perms = Vec::new();
    for order in cell_orders(&colors) {
        // vertex permutation p with p[v] = order-position mapping back onto cells
        let sorted: Vec<usize> = (0..nv).sorted_by_key(|&v| (colors[v], v)).collect();
        let mut p = vec![0; nv];
        for (pos, &old) in order.iter().enumerate() {
            p[old] = sorted[pos];
        }
        let preserves = g.legs().iter().all(|&v| p[v] == v)
            && (0..nv).all(|u| (0..nv).all(|v| mult[p[u]][p[v]] == mult[u][v]));
        if !preserves {
            continue;
        }
        lift_vertex_perm(g, &p, &bundles, &mut half_edge_perms);
    }
    half_edge_perms.sort();
    let mut edge_action: Vec<Vec<usize>> = half_edge_perms
        .iter()
        .map(|hp| (0..g.num_edges()).map(|e| hp[2 * e] / 2).collect())
        .collect();
    edge_action.sort();
    edge_action.dedup();
    AutGroup { order: half_edge_perms.len(), edge_action, half_edge_perms }
}

fn lift_vertex_perm(
    g: &DualGraph,
    p: &[usize],
    bundles: &BTreeMap<(usize, usize), Vec<usize>>,
    out: &mut Vec<Vec<usize>>,
) {
    // Each bundle independently chooses a bijection onto its image bundle, and
    // loops additionally choose an orientation.
    let mut choices: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    for (&(u, v), edges) in bundles {
        let target = (p[u].min(p[v]), p[u].max(p[v]));
        let target_edges = &bundles[&target];
        let mut options = Vec::new();
        for perm in target_edges.iter().copied().permutations(target_edges.len()) {
            let flips = if u == v { 1usize << edges.len() } else { 1 };
            for mask in 0..flips {
                let mut assignment = Vec::with_capacity(2 * edges.len());
                for (k, (&e, &t)) in edges.iter().zip(&perm).enumerate() {
                    let swap = if u == v { mask >> k & 1 == 1 } else { g.edge(t).0 != p[g.edge(e).0] };
                    if swap {
                        assignment.push((2 * e, 2 * t + 1));
                        assignment.push((2 * e + 1, 2 * t));
                    } else {
                        assignment.push((2 * e, 2 * t));
                        assignment.push((2 * e + 1, 2 * t + 1));
                    }
                }
                options.push(assignment);
            }
        }
        choices.push(options);
    }
    if choices.is_empty() {
        out.push(Vec::new());
        return;
    }
    for combo in choices.into_iter().multi_cartesian_product() {
        let mut hp = vec![0; g.num_half_edges()];
        for (from, to) in combo.into_iter().flatten() {
            hp[from] = to;
        }
        out.push(hp);
    }
}
