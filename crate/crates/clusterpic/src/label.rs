//! Topological core of a dual graph (genus-0 vertices of degree 2 smoothed away) and a
//! canonical string for it under vertex relabelling, with Frobenius data.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::DualGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreEdge {
    pub from: usize,
    pub to: usize,
    pub length: u64,
    /// chains walked from `from` to `to`, with direction (true = chain's own from→to)
    pub path: Vec<(usize, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreGraph {
    /// indices into the dual graph's vertex list
    pub vertices: Vec<usize>,
    pub genus: Vec<usize>,
    pub edges: Vec<CoreEdge>,
    /// Frobenius on core vertices and on edges (image, orientation)
    pub frob_vertex: Vec<usize>,
    pub frob_edge: Vec<(usize, i8)>,
}

impl CoreGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| usize::from(e.from == v) + usize::from(e.to == v)).sum()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].from == self.edges[e].to
    }

    /// Orientation of Frob^k on an edge fixed by Frob^k, where k is its orbit length.
    pub fn orbit_sign(&self, e: usize) -> (usize, i8) {
        let (mut x, mut s) = self.frob_edge[e];
        let mut k = 1;
        while x != e {
            let (y, t) = self.frob_edge[x];
            x = y;
            s *= t;
            k += 1;
        }
        (k, s)
    }
}

pub fn core_graph(dg: &DualGraph) -> CoreGraph {
    let nv = dg.vertices.len();
    let mut inc: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nv];
    for (ci, c) in dg.chains.iter().enumerate() {
        inc[c.from].push((ci, true));
        inc[c.to].push((ci, false));
    }
    let mut core: Vec<usize> = (0..nv).filter(|&v| dg.vertices[v].genus > 0 || inc[v].len() != 2).collect();
    if core.is_empty() && nv > 0 {
        core.push(0);
    }
    let index: BTreeMap<usize, usize> = core.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut used = vec![false; dg.chains.len()];
    let mut edges = Vec::new();
    for &v in &core {
        for &(c0, fwd0) in &inc[v] {
            if used[c0] {
                continue;
            }
            let mut path = vec![(c0, fwd0)];
            used[c0] = true;
            let mut cur = if fwd0 { dg.chains[c0].to } else { dg.chains[c0].from };
            let mut last = c0;
            while !index.contains_key(&cur) {
                let &(c, fwd) = inc[cur].iter().find(|&&(c, _)| c != last).expect("degree two");
                used[c] = true;
                path.push((c, fwd));
                last = c;
                cur = if fwd { dg.chains[c].to } else { dg.chains[c].from };
            }
            let length = path.iter().map(|&(c, _)| dg.chains[c].length).sum();
            edges.push(CoreEdge { from: index[&v], to: index[&cur], length, path });
        }
    }
    let (frob_vertex, frob_edge) = match &dg.frobenius {
        Some(f) => {
            let fv = core.iter().map(|&v| index[&f.vertex[v]]).collect();
            let mut owner: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
            for (ei, e) in edges.iter().enumerate() {
                for &(c, fwd) in &e.path {
                    owner.insert(c, (ei, fwd));
                }
            }
            let fe = edges
                .iter()
                .map(|e| {
                    let (c, fwd) = e.path[0];
                    let (img, s) = f.chain[c];
                    let dir = fwd == (s > 0);
                    let (ei, fwd2) = owner[&img];
                    (ei, if dir == fwd2 { 1 } else { -1 })
                })
                .collect();
            (fv, fe)
        }
        None => ((0..core.len()).collect(), (0..edges.len()).map(|e| (e, 1)).collect()),
    };
    let genus = core.iter().map(|&v| dg.vertices[v].genus).collect();
    CoreGraph { vertices: core, genus, edges, frob_vertex, frob_edge }
}

const MAX_LABELLINGS: usize = 500_000;

fn encode(cg: &CoreGraph, pi: &[usize]) -> String {
    let n = pi.len();
    let mut inv = vec![0; n];
    for (old, &new) in pi.iter().enumerate() {
        inv[new] = old;
    }
    let genus: Vec<String> = (0..n).map(|i| cg.genus[inv[i]].to_string()).collect();
    let key = |e: &CoreEdge| {
        let (a, b) = (pi[e.from], pi[e.to]);
        (a.min(b), a.max(b), e.length)
    };
    let mut edges: Vec<(usize, usize, u64)> = cg.edges.iter().map(key).collect();
    edges.sort_unstable();
    let frob: Vec<String> = (0..n).map(|i| pi[cg.frob_vertex[inv[i]]].to_string()).collect();
    let mut moves: Vec<String> = cg
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (a, b, l) = key(e);
            let (j, s) = cg.frob_edge[i];
            let (c, d, m) = key(&cg.edges[j]);
            let sign = if s > 0 { '+' } else { '-' };
            format!("{a}-{b}:{l}>{c}-{d}:{m}{sign}")
        })
        .collect();
    moves.sort_unstable();
    let edges: Vec<String> = edges.iter().map(|(a, b, l)| format!("{a}-{b}:{l}")).collect();
    format!("g[{}] e[{}] F[{}] s[{}]", genus.join(","), edges.join(","), frob.join(","), moves.join(","))
}

/// Lexicographically least encoding over all vertex relabellings that respect the
/// (genus, degree, incident lengths) refinement.
pub fn canonical_label(dg: &DualGraph) -> Result<String> {
    let cg = core_graph(dg);
    let n = cg.vertices.len();
    let invariant = |v: usize| {
        let mut ls: Vec<u64> = cg.edges.iter().filter(|e| e.from == v || e.to == v).map(|e| e.length).collect();
        ls.sort_unstable();
        (cg.genus[v], cg.degree(v), ls)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| invariant(v));
    // cells of equal invariants, in order
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match cells.last_mut() {
            Some(c) if invariant(c[0]) == invariant(v) => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let count: usize = cells.iter().map(|c| (1..=c.len()).product::<usize>()).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
    if count > MAX_LABELLINGS {
        return Err(Error::Unsupported(format!("canonical labelling needs {count} relabellings")));
    }
    let mut best: Option<String> = None;
    let mut pi = vec![0; n];
    fn rec(
        cells: &[Vec<usize>],
        base: usize,
        pi: &mut Vec<usize>,
        cg: &CoreGraph,
        best: &mut Option<String>,
    ) {
        let Some((cell, rest)) = cells.split_first() else {
            let s = encode(cg, pi);
            if best.as_ref().map_or(true, |b| s < *b) {
                *best = Some(s);
            }
            return;
        };
        let mut perm: Vec<usize> = cell.clone();
        permute(&mut perm, 0, &mut |p| {
            for (i, &v) in p.iter().enumerate() {
                pi[v] = base + i;
            }
            rec(rest, base + cell.len(), pi, cg, best);
        });
    }
    fn permute(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == a.len() {
            f(a);
            return;
        }
        for i in k..a.len() {
            a.swap(k, i);
            permute(a, k + 1, f);
            a.swap(k, i);
        }
    }
    rec(&cells, 0, &mut pi, &cg, &mut best);
    Ok(format!("genus {}: {}", dg.genus, best.unwrap_or_default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dual_graph;
    use crate::testutil::curve;

    #[test]
    fn core_of_example_1_2() {
        let (pic, g) = curve("[[r r r]_2 [r [r r r]_2]_1^-]_0", 0, &[]);
        let dg = dual_graph(&pic, &g).unwrap();
        let cg = core_graph(&dg);
        assert_eq!(cg.edges.len(), cg.vertices.len());
        let loops: Vec<usize> = (0..cg.edges.len()).filter(|&e| cg.is_loop(e)).collect();
        assert_eq!(loops.len(), 0);
        let cycle_sum: usize = cg.edges.len() + 1 - cg.vertices.len();
        assert_eq!(cycle_sum, 1);
    }

    #[test]
    fn label_ignores_root_order() {
        let a = curve("[[r r]_1 [r r]_2 [r r r]_2 r]_0", 0, &[]);
        let b = curve("[[r r r]_2 r [r r]_2 [r r]_1]_0", 0, &[]);
        let mut ga = a.1.clone();
        let mut gb = b.1.clone();
        for (pic, g) in [(&a.0, &mut ga), (&b.0, &mut gb)] {
            for t in pic.proper_ids() {
                if pic.is_twin(t) {
                    g.set_sign(pic, t, crate::galois::Sign::Plus).unwrap();
                }
            }
        }
        let la = canonical_label(&dual_graph(&a.0, &ga).unwrap()).unwrap();
        let lb = canonical_label(&dual_graph(&b.0, &gb).unwrap()).unwrap();
        assert_eq!(la, lb);
        let mut gc = b.1.clone();
        for t in b.0.proper_ids() {
            if b.0.is_twin(t) {
                let s = if b.0.depth(t) == &crate::rat::q(2) { crate::galois::Sign::Minus } else { crate::galois::Sign::Plus };
                gc.set_sign(&b.0, t, s).unwrap();
            }
        }
        assert_ne!(la, canonical_label(&dual_graph(&b.0, &gc).unwrap()).unwrap());
    }
}
