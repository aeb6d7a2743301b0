//! H₁ of the dual graph with its length pairing and Frobenius action, read from clusters,
//! plus an independent cycle-space computation on the built graph.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
use crate::galois::{GaloisData, Sign};
use crate::graph::DualGraph;
use crate::linalg::{self, Mat};
use crate::rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyLattice {
    /// A: even non-übereven clusters other than R
    pub basis_clusters: Vec<String>,
    /// B ⊆ A: those with s* = R
    pub constrained: Vec<String>,
    /// the dropped element of B (its last element in picture order), when B is non-empty
    pub dropped: Option<String>,
    /// basis vectors as ℓ-combinations, e.g. "l_{R.0}-l_{R.2}"
    pub basis: Vec<String>,
    pub rank: usize,
    pub gram: Mat,
    /// column j holds the coordinates of Frob(b_j)
    pub frob: Mat,
    #[serde(skip)]
    a_ids: Vec<ClusterId>,
    #[serde(skip)]
    coeffs: Vec<BTreeMap<ClusterId, i64>>,
}

pub fn a_set(pic: &ClusterPicture) -> Vec<ClusterId> {
    let top = pic.top();
    pic.proper_ids().into_iter().filter(|&s| s != top && pic.is_even(s) && !pic.is_ubereven(s)).collect()
}

/// ⟨ℓ_{s1}, ℓ_{s2}⟩.
pub fn pairing(pic: &ClusterPicture, s1: ClusterId, s2: ClusterId) -> i64 {
    let (a, b) = (pic.star(s1), pic.star(s2));
    if a != b {
        return 0;
    }
    let top = pic.top();
    let base = if a == top { pic.depth(top).clone() } else { pic.depth(pic.parent(a).unwrap()).clone() };
    let v = (pic.depth(pic.meet(s1, s2)) - base) * rat::q(2);
    rat::to_i64(&v).expect("pairing is integral on semistable pictures")
}

fn label(pic: &ClusterPicture, c: &BTreeMap<ClusterId, i64>) -> String {
    let mut s = String::new();
    for (&x, &k) in c {
        let sign = if k < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        s.push_str(sign);
        if k.abs() != 1 {
            s.push_str(&k.abs().to_string());
        }
        s.push_str(&format!("l_{{{}}}", pic.path(x)));
    }
    s
}

/// The lattice from the cluster description; needs ε on every element of A.
pub fn homology_lattice(pic: &ClusterPicture, g: &GaloisData) -> Result<HomologyLattice> {
    let a = a_set(pic);
    let top = pic.top();
    let b: Vec<ClusterId> = a.iter().copied().filter(|&s| pic.star(s) == top).collect();
    let s0 = b.iter().copied().max_by(|&x, &y| pic.members(x).cmp(pic.members(y)));
    let missing: Vec<String> = a
        .iter()
        .filter(|&&s| g.eps(pic, s) == Sign::Unknown)
        .map(|&s| pic.path(pic.star(s)))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnknownSign(missing));
    }
    let kept: Vec<ClusterId> = a.iter().copied().filter(|&s| Some(s) != s0).collect();
    let mut coeffs = Vec::new();
    for &s in &kept {
        let mut c = BTreeMap::new();
        c.insert(s, 1);
        if b.contains(&s) {
            c.insert(s0.unwrap(), -1);
        }
        coeffs.push(c);
    }
    let pair = |x: &BTreeMap<ClusterId, i64>, y: &BTreeMap<ClusterId, i64>| -> i64 {
        let mut acc = 0;
        for (&s, &p) in x {
            for (&t, &q) in y {
                acc += p * q * pairing(pic, s, t);
            }
        }
        acc
    };
    let n = kept.len();
    let gram: Mat = (0..n).map(|i| (0..n).map(|j| pair(&coeffs[i], &coeffs[j])).collect()).collect();
    let fc = g.frob_clusters(pic);
    let mut frob = linalg::zeros(n, n);
    for (j, c) in coeffs.iter().enumerate() {
        // Frob(Σ a_s ℓ_s) = Σ a_s ε_s ℓ_{σs}; coordinates are the coefficients off s0
        for (&s, &k) in c {
            let e = g.eps(pic, s).value().unwrap();
            let img = fc[s];
            if let Some(i) = kept.iter().position(|&t| t == img) {
                frob[i][j] += k * e;
            }
        }
    }
    Ok(HomologyLattice {
        basis_clusters: a.iter().map(|&s| pic.path(s)).collect(),
        constrained: b.iter().map(|&s| pic.path(s)).collect(),
        dropped: s0.map(|s| pic.path(s)),
        basis: coeffs.iter().map(|c| label(pic, c)).collect(),
        rank: n,
        gram,
        frob,
        a_ids: a,
        coeffs,
    })
}

/// ℓ_s as a vector on graph segments: the + path from s to s* minus the − path.
fn ell_on_segments(pic: &ClusterPicture, dg: &DualGraph, s: ClusterId) -> BTreeMap<usize, i64> {
    let top = pic.top();
    let star = pic.star(s);
    let mut out = BTreeMap::new();
    let mut x = s;
    loop {
        if x == top {
            break;
        }
        for (i, seg) in dg.segments.iter().enumerate() {
            if seg.cluster == x {
                out.insert(i, seg.half as i64);
            }
        }
        if x == star {
            break;
        }
        x = pic.parent(x).unwrap();
    }
    out
}

/// The same lattice from the graph alone: spanning tree, fundamental cycles, chain lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleLattice {
    pub rank: usize,
    pub gram: Mat,
    pub frob: Mat,
    /// chains outside the spanning tree, one per basis cycle
    pub cotree: Vec<usize>,
    #[serde(skip)]
    cycles: Vec<Vec<i64>>,
}

pub fn cycle_lattice(dg: &DualGraph) -> Result<CycleLattice> {
    let nv = dg.vertices.len();
    let ne = dg.chains.len();
    // BFS spanning tree
    let mut parent_edge: Vec<Option<(usize, i64)>> = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut in_tree = vec![false; ne];
    let mut queue = std::collections::VecDeque::from([0usize]);
    if nv > 0 {
        seen[0] = true;
    }
    while let Some(v) = queue.pop_front() {
        for (e, c) in dg.chains.iter().enumerate() {
            let (w, dir) = if c.from == v && !seen[c.to] {
                (c.to, 1)
            } else if c.to == v && !seen[c.from] {
                (c.from, -1)
            } else {
                continue;
            };
            seen[w] = true;
            in_tree[e] = true;
            parent_edge[w] = Some((e, dir));
            queue.push_back(w);
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::InvalidPicture("dual graph is disconnected".into()));
    }
    // path from root to v as an edge vector
    let root_path = |v: usize| -> Vec<i64> {
        let mut vec = vec![0i64; ne];
        let mut x = v;
        while let Some((e, dir)) = parent_edge[x] {
            vec[e] += dir;
            let c = &dg.chains[e];
            x = if dir == 1 { c.from } else { c.to };
        }
        vec
    };
    let cotree: Vec<usize> = (0..ne).filter(|&e| !in_tree[e]).collect();
    let cycles: Vec<Vec<i64>> = cotree
        .iter()
        .map(|&e| {
            let c = &dg.chains[e];
            let mut z = root_path(c.from);
            let back = root_path(c.to);
            for k in 0..ne {
                z[k] -= back[k];
            }
            z[e] += 1;
            z
        })
        .collect();
    let r = cycles.len();
    let len: Vec<i64> = dg.chains.iter().map(|c| c.length as i64).collect();
    let gram: Mat = (0..r)
        .map(|i| (0..r).map(|j| (0..ne).map(|k| cycles[i][k] * cycles[j][k] * len[k]).sum()).collect())
        .collect();
    let mut frob = linalg::zeros(r, r);
    if let Some(f) = &dg.frobenius {
        for (j, z) in cycles.iter().enumerate() {
            let mut img = vec![0i64; ne];
            for k in 0..ne {
                let (t, o) = f.chain[k];
                img[t] += z[k] * o as i64;
            }
            // a cycle is determined by its cotree coordinates
            for (i, &e) in cotree.iter().enumerate() {
                frob[i][j] = img[e];
            }
        }
    }
    Ok(CycleLattice { rank: r, gram, frob, cotree, cycles })
}

/// Check that the cluster basis spans the cycle space of the graph with the same pairing
/// and Frobenius. Returns the change-of-basis matrix (columns: cluster basis vectors in
/// fundamental-cycle coordinates).
pub fn check_isometry(pic: &ClusterPicture, dg: &DualGraph, hl: &HomologyLattice, cl: &CycleLattice) -> Result<Mat> {
    let bad = |m: &str| Err(Error::InvalidPicture(format!("homology check failed: {m}")));
    if hl.rank != cl.rank {
        return bad("ranks differ");
    }
    let ne = dg.chains.len();
    let mut owner = vec![(0usize, 0i64); dg.segments.len()];
    for (ci, c) in dg.chains.iter().enumerate() {
        for &(s, up) in &c.segments {
            owner[s] = (ci, if up { 1 } else { -1 });
        }
    }
    let mut u = linalg::zeros(hl.rank, hl.rank);
    for (j, comb) in hl.coeffs.iter().enumerate() {
        let mut segv: BTreeMap<usize, i64> = BTreeMap::new();
        for (&s, &k) in comb {
            for (i, v) in ell_on_segments(pic, dg, s) {
                *segv.entry(i).or_default() += k * v;
            }
        }
        let mut chainv: Vec<Option<i64>> = vec![None; ne];
        for (i, v) in segv {
            let (c, o) = owner[i];
            let val = v * o;
            match chainv[c] {
                Some(old) if old != val => return bad("cycle is not constant along a chain"),
                _ => chainv[c] = Some(val),
            }
        }
        let z: Vec<i64> = chainv.into_iter().map(|x| x.unwrap_or(0)).collect();
        // closed: zero boundary at every vertex
        let mut bd = vec![0i64; dg.vertices.len()];
        for (e, c) in dg.chains.iter().enumerate() {
            bd[c.to] += z[e];
            bd[c.from] -= z[e];
        }
        if bd.iter().any(|&x| x != 0) {
            return bad("basis vector is not a cycle");
        }
        for (i, &e) in cl.cotree.iter().enumerate() {
            u[i][j] = z[e];
        }
        // the cotree coordinates determine the cycle
        let mut rebuilt = vec![0i64; ne];
        for (i, cyc) in cl.cycles.iter().enumerate() {
            for k in 0..ne {
                rebuilt[k] += u[i][j] * cyc[k];
            }
        }
        if rebuilt != z {
            return bad("cycle does not match its cotree coordinates");
        }
    }
    if hl.rank > 0 && linalg::det(&u).abs() != 1 {
        return bad("cluster basis does not span H1");
    }
    if linalg::mul(&linalg::mul(&linalg::transpose(&u), &cl.gram), &u) != hl.gram {
        return bad("Gram matrices are not congruent through the basis change");
    }
    if dg.frobenius.is_some() && linalg::mul(&cl.frob, &u) != linalg::mul(&u, &hl.frob) {
        return bad("Frobenius matrices are not conjugate");
    }
    Ok(u)
}

impl HomologyLattice {
    pub fn a_ids(&self) -> &[ClusterId] {
        &self.a_ids
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dual_graph;
    use crate::notation::{apply_signs, parse_bracket};

    fn both(s: &str) -> (HomologyLattice, CycleLattice) {
        let parsed = parse_bracket(s).unwrap();
        let pic = parsed.picture;
        let mut g = GaloisData::trivial(pic.root_count(), 7);
        apply_signs(&pic, &mut g, &parsed.signs).unwrap();
        let hl = homology_lattice(&pic, &g).unwrap();
        let dg = dual_graph(&pic, &g).unwrap();
        let cl = cycle_lattice(&dg).unwrap();
        check_isometry(&pic, &dg, &hl, &cl).unwrap();
        (hl, cl)
    }

    #[test]
    fn example_1_2() {
        let (hl, _) = both("[[r r r]_2 [r [r r r]_2]_1^-]_0");
        assert_eq!(hl.gram, vec![vec![2]]);
        assert_eq!(hl.frob, vec![vec![-1]]);
    }

    #[test]
    fn i_n_m_and_u() {
        let (hl, _) = both("[[r r]_1^+ [r r]_3/2^+ r r]_0");
        assert_eq!(hl.gram, vec![vec![2, 0], vec![0, 3]]);
        let (hl, _) = both("[[r r]_1/2 [r r]_1 [r r]_3/2]_0^-");
        // n, m, k = 1, 2, 3
        assert_eq!(hl.gram, vec![vec![1 + 3, 3], vec![3, 2 + 3]]);
        assert_eq!(hl.frob, vec![vec![-1, 0], vec![0, -1]]);
        assert_eq!(hl.basis, vec!["l_{R.0}-l_{R.2}", "l_{R.1}-l_{R.2}"]);
    }

    #[test]
    fn tree_has_rank_zero() {
        let (hl, cl) = both("[[r r r]_2 [r r r]_2]_0");
        assert_eq!((hl.rank, cl.rank), (0, 0));
    }

    #[test]
    fn nested_ubereven() {
        let (hl, _) = both("[[[r r]_1 [r r]_2]_1^+ [r r r]_2 r]_0");
        assert_eq!(hl.rank, 2);
        assert_eq!(hl.gram, vec![vec![4, 2], vec![2, 6]]);
    }
}
