//! Pseudostabilization by local moves.
//!
//! Two configurations obstruct pseudostability of a stable graph:
//! an elliptic tail (legless 1-valent genus-one vertex) and a loop bridge
//! (legless 3-valent genus-zero vertex carrying a loop). Each is replaced by a
//! loop at the neighbouring vertex, and the new loop's length is an integral
//! combination of the removed edge lengths.

use super::{ensure_admitted, DualGraph};
use crate::error::{Error, Result};

/// Slope of the contraction on the elliptic-tail edge.
pub const TAIL_SLOPE: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalMove {
    EllipticTail { vertex: usize, edge: usize },
    LoopBridge { vertex: usize, loop_edge: usize, edge: usize },
}

impl LocalMove {
    pub fn vertex(&self) -> usize {
        match *self {
            LocalMove::EllipticTail { vertex, .. } | LocalMove::LoopBridge { vertex, .. } => vertex,
        }
    }
}

/// Result graph plus, for each of its edges, the coefficients of that edge's
/// length as a combination of the source edge lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pseudostabilization {
    pub graph: DualGraph,
    pub transfer: Vec<Vec<u32>>,
}

impl Pseudostabilization {
    pub fn is_identity(&self) -> bool {
        self.transfer
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &c)| c == (i == j) as u32))
            && self.transfer.len() == self.transfer.first().map_or(0, |r| r.len())
    }
}

pub fn local_moves(g: &DualGraph) -> Vec<LocalMove> {
    let mut moves = Vec::new();
    for v in 0..g.num_vertices() {
        if !g.legs_at(v).is_empty() {
            continue;
        }
        let incident: Vec<usize> = (0..g.num_edges()).filter(|&e| {
            let (a, b) = g.edge(e);
            a == v || b == v
        }).collect();
        match (g.vertex_genus(v), g.valence(v)) {
            (1, 1) => moves.push(LocalMove::EllipticTail { vertex: v, edge: incident[0] }),
            (0, 3) if g.loops_at(v) == 1 => {
                let loop_edge = *incident.iter().find(|&&e| g.is_loop(e)).expect("loop present");
                let edge = *incident.iter().find(|&&e| !g.is_loop(e)).expect("bridge present");
                moves.push(LocalMove::LoopBridge { vertex: v, loop_edge, edge });
            }
            _ => {}
        }
    }
    moves
}

/// Applies one move. `transfer` expresses the current edges in terms of the
/// original source edges and is updated alongside the graph.
pub fn apply_move(g: &DualGraph, transfer: &[Vec<u32>], mv: LocalMove) -> (DualGraph, Vec<Vec<u32>>) {
    let (u, removed, new_row): (usize, Vec<usize>, Vec<u32>) = match mv {
        LocalMove::EllipticTail { vertex, edge } => {
            let row = transfer[edge].iter().map(|&c| TAIL_SLOPE * c).collect();
            (vertex, vec![edge], row)
        }
        LocalMove::LoopBridge { vertex, loop_edge, edge } => {
            let row = transfer[loop_edge].iter().zip(&transfer[edge]).map(|(&l, &t)| l + TAIL_SLOPE * t).collect();
            (vertex, vec![loop_edge, edge], row)
        }
    };
    let bridge = *removed.last().expect("move removes an edge");
    let (a, b) = g.edge(bridge);
    let w = if a == u { b } else { a };
    let reindex = |x: usize| if x > u { x - 1 } else { x };

    let genera: Vec<u32> = (0..g.num_vertices()).filter(|&v| v != u).map(|v| g.vertex_genus(v)).collect();
    let mut edges = Vec::new();
    let mut rows = Vec::new();
    for e in 0..g.num_edges() {
        if removed.contains(&e) {
            continue;
        }
        let (x, y) = g.edge(e);
        edges.push((reindex(x), reindex(y)));
        rows.push(transfer[e].clone());
    }
    edges.push((reindex(w), reindex(w)));
    rows.push(new_row);
    let legs = g.legs().iter().map(|&v| reindex(v)).collect();
    let graph = DualGraph::new(genera, edges, legs).expect("local moves preserve connectivity");
    (graph, rows)
}

/// Applies local moves until the graph is pseudostable.
pub fn pseudostabilize(g: &DualGraph) -> Result<Pseudostabilization> {
    ensure_admitted(g.genus(), g.num_legs())?;
    if !g.is_stable() {
        return Err(Error::NotStable);
    }
    let m = g.num_edges();
    let mut graph = g.clone();
    let mut transfer: Vec<Vec<u32>> = (0..m).map(|i| (0..m).map(|j| (i == j) as u32).collect()).collect();
    while let Some(&mv) = local_moves(&graph).first() {
        let (ng, nt) = apply_move(&graph, &transfer, mv);
        graph = ng;
        transfer = nt;
    }
    debug_assert!(graph.is_pseudostable());
    Ok(Pseudostabilization { graph, transfer })
}
