//! Independent oracles for the integration tests: brute-force graph
//! enumeration with permutation-based dedup, and the DVV recursion for
//! ψ-integrals in genus zero and one.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;
use num::{BigInt, One, Zero};
use tropmoduli::{DualGraph, Rational};

/// Minimal encoding over all vertex orders that keep (genus, legs, edge valence)
/// classes in place. Different from the library, which refines colours first.
pub fn brute_code(g: &DualGraph) -> Vec<u32> {
    let nv = g.num_vertices();
    let key = |v: usize| (g.vertex_genus(v), g.legs_at(v), g.edge_valence(v));
    let mut classes: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for v in 0..nv {
        classes.entry(key(v)).or_default().push(v);
    }
    let groups: Vec<Vec<usize>> = classes.into_values().collect();
    let mut best: Option<Vec<u32>> = None;
    for choice in groups.iter().map(|c| c.iter().copied().permutations(c.len())).multi_cartesian_product() {
        let order: Vec<usize> = choice.into_iter().flatten().collect();
        let mut pos = vec![0; nv];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut code: Vec<u32> = order.iter().map(|&v| g.vertex_genus(v)).collect();
        code.extend(g.legs().iter().map(|&v| pos[v] as u32));
        let mut edges: Vec<(usize, usize)> =
            g.edges().iter().map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b]))).collect();
        edges.sort();
        code.push(u32::MAX);
        code.extend(edges.into_iter().flat_map(|(a, b)| [a as u32, b as u32]));
        if best.as_ref().is_none_or(|b| &code < b) {
            best = Some(code);
        }
    }
    best.expect("nonempty")
}

/// All stable graphs of genus `genus` with `n` legs, one per class, built by
/// trying every genus distribution, every multiset of edges and every leg
/// placement.
pub fn brute_force_stable(genus: u32, n: usize) -> HashMap<Vec<u32>, DualGraph> {
    let mut out = HashMap::new();
    let max_v = (2 * genus as usize + n).saturating_sub(2).max(1);
    let max_e = 3 * genus as usize + n - 3;
    for nv in 1..=max_v {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        for genera in (0..nv).map(|_| 0..=genus).multi_cartesian_product() {
            let weight: u32 = genera.iter().sum();
            if weight > genus || !genera.windows(2).all(|w| w[0] >= w[1]) {
                continue;
            }
            let e = genus as i64 - weight as i64 + nv as i64 - 1;
            if e < 0 || e as usize > max_e {
                continue;
            }
            for edges in pairs.iter().copied().combinations_with_replacement(e as usize) {
                let mut deg = vec![0usize; nv];
                for &(a, b) in &edges {
                    deg[a] += 1;
                    deg[b] += 1;
                }
                // stability needs at most n extra legs in total
                let deficit: usize = (0..nv)
                    .map(|v| match genera[v] {
                        0 => 3usize.saturating_sub(deg[v]),
                        1 => 1usize.saturating_sub(deg[v]),
                        _ => 0,
                    })
                    .sum();
                if deficit > n {
                    continue;
                }
                for legs in (0..n).map(|_| 0..nv).multi_cartesian_product() {
                    let Ok(g) = DualGraph::new(genera.clone(), edges.clone(), legs) else { continue };
                    if g.is_stable() {
                        out.entry(brute_code(&g)).or_insert(g);
                    }
                }
            }
        }
    }
    out
}

/// Stable graphs with one more leg, from the fibres of the forgetful map: the
/// new leg sits on a vertex, on a new vertex subdividing an edge, or on a new
/// vertex together with an old leg.
pub fn forgetful_lift(classes: &HashMap<Vec<u32>, DualGraph>) -> HashMap<Vec<u32>, DualGraph> {
    let mut out = HashMap::new();
    let mut add = |g: DualGraph| {
        assert!(g.is_stable());
        out.entry(brute_code(&g)).or_insert(g);
    };
    for g in classes.values() {
        let nv = g.num_vertices();
        for v in 0..nv {
            let mut legs = g.legs().to_vec();
            legs.push(v);
            add(DualGraph::new(g.genera().to_vec(), g.edges().to_vec(), legs).unwrap());
        }
        for e in 0..g.num_edges() {
            let (a, b) = g.edge(e);
            let mut genera = g.genera().to_vec();
            genera.push(0);
            let mut edges = g.edges().to_vec();
            edges[e] = (a, nv);
            edges.push((nv, b));
            let mut legs = g.legs().to_vec();
            legs.push(nv);
            add(DualGraph::new(genera, edges, legs).unwrap());
        }
        for i in 0..g.num_legs() {
            let mut genera = g.genera().to_vec();
            genera.push(0);
            let mut edges = g.edges().to_vec();
            edges.push((g.legs()[i], nv));
            let mut legs = g.legs().to_vec();
            legs[i] = nv;
            legs.push(nv);
            add(DualGraph::new(genera, edges, legs).unwrap());
        }
    }
    out
}

/// Counts per number of edges.
pub fn dims_of(classes: &HashMap<Vec<u32>, DualGraph>) -> Vec<usize> {
    let max = classes.values().map(DualGraph::num_edges).max().unwrap_or(0);
    (0..=max).map(|d| classes.values().filter(|g| g.num_edges() == d).count()).collect()
}

pub fn codes(classes: &HashMap<Vec<u32>, DualGraph>) -> HashSet<Vec<u32>> {
    classes.keys().cloned().collect()
}

fn double_factorial(k: i64) -> BigInt {
    // (2m - 1)!! with (-1)!! = 1
    let mut acc = BigInt::one();
    let mut x = k;
    while x > 1 {
        acc *= x;
        x -= 2;
    }
    acc
}

fn dvv_memo(genus: i64, a: &[u32], memo: &mut HashMap<(i64, Vec<u32>), Rational>) -> Rational {
    let n = a.len() as i64;
    if genus < 0 || 2 * genus - 2 + n <= 0 {
        return Rational::zero();
    }
    let sum: i64 = a.iter().map(|&x| x as i64).sum();
    if sum != 3 * genus - 3 + n {
        return Rational::zero();
    }
    let mut key_vec = a.to_vec();
    key_vec.sort_unstable();
    let key = (genus, key_vec.clone());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let value = if genus == 0 && n == 3 {
        Rational::one()
    } else if genus == 1 && key_vec == [1] {
        Rational::new(1.into(), 24.into())
    } else {
        // take the largest exponent as τ_{k+1}
        let top = *key_vec.last().unwrap();
        let rest: Vec<u32> = key_vec[..key_vec.len() - 1].to_vec();
        if top == 0 {
            Rational::zero()
        } else {
            let k = top as i64 - 1;
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                let aj = rest[j] as i64;
                let mut b = rest.clone();
                b[j] = (aj + k) as u32;
                let coeff = Rational::new(double_factorial(2 * k + 2 * aj + 1), double_factorial(2 * aj - 1));
                acc += coeff * dvv_memo(genus, &b, memo);
            }
            let half = Rational::new(1.into(), 2.into());
            for r in 0..k {
                let s = k - 1 - r;
                let w = Rational::from_integer(double_factorial(2 * r + 1) * double_factorial(2 * s + 1)) * &half;
                let mut b = rest.clone();
                b.push(r as u32);
                b.push(s as u32);
                acc += &w * dvv_memo(genus - 1, &b, memo);
                for mask in 0..1usize << rest.len() {
                    let left: Vec<u32> = (0..rest.len()).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]).collect();
                    let right: Vec<u32> = (0..rest.len()).filter(|i| mask >> i & 1 == 0).map(|i| rest[i]).collect();
                    for g1 in 0..=genus {
                        let mut l = left.clone();
                        l.push(r as u32);
                        let mut rr = right.clone();
                        rr.push(s as u32);
                        acc += &w * dvv_memo(g1, &l, memo) * dvv_memo(genus - g1, &rr, memo);
                    }
                }
            }
            acc / Rational::from_integer(double_factorial(2 * k + 3))
        }
    };
    memo.insert(key, value.clone());
    value
}

/// `<τ_{a_1} ... τ_{a_n}>_g` from the DVV recursion, with the string equation
/// being its k = -1 case handled by taking the largest exponent first.
pub fn dvv(genus: u32, a: &[u32]) -> Rational {
    let mut memo = HashMap::new();
    if a.contains(&0) && !(genus == 0 && a.len() == 3) {
        // string equation
        let i = a.iter().position(|&x| x == 0).unwrap();
        let rest: Vec<u32> = a.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut b = rest.clone();
                b[j] -= 1;
                acc += dvv(genus, &b);
            }
        }
        let n = a.len() as i64;
        if 2 * genus as i64 - 2 + n <= 0 || a.iter().map(|&x| x as i64).sum::<i64>() != 3 * genus as i64 - 3 + n {
            return Rational::zero();
        }
        return acc;
    }
    dvv_memo(genus as i64, a, &mut memo)
}

/// Every exponent vector of length `n` with entries summing to `total`.
pub fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// No connected genus-one piece without markings hanging off a single node.
pub fn has_no_elliptic_tail(g: &DualGraph) -> bool {
    let nv = g.num_vertices();
    for cut in 0..g.num_edges() {
        let (a, b) = g.edge(cut);
        if a == b {
            continue;
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            for (i, &(x, y)) in g.edges().iter().enumerate() {
                if i == cut {
                    continue;
                }
                for (p, q) in [(x, y), (y, x)] {
                    if p == v && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        if seen[b] {
            continue;
        }
        for side in [true, false] {
            let verts: Vec<usize> = (0..nv).filter(|&v| seen[v] == side).collect();
            let inner = g.edges().iter().filter(|&&(x, y)| seen[x] == side && seen[y] == side).count();
            let genus = verts.iter().map(|&v| g.vertex_genus(v) as i64).sum::<i64>() + inner as i64 - verts.len() as i64 + 1;
            let marked = g.legs().iter().any(|&v| seen[v] == side);
            if genus == 1 && !marked {
                return false;
            }
        }
    }
    true
}
