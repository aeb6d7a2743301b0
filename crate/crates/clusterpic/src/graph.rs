//! Dual graph of the special fibre of the minimal regular model over K^nr.
//!
//! Every proper cluster x ≠ R contributes segments that run from x up to its parent:
//! two of length δ_x when x is even (one per sign), one of length δ_x/2 when x is odd.
//! Segment ends sit at points (cluster, half), where half is ± for übereven clusters.
//! Principal clusters give the vertices; twins, cotwins and a non-principal R are
//! interior points of chains, and chains are the maximal walks between vertices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
use crate::galois::{GaloisData, Sign};
use crate::rat::{self, Q};
use crate::semistability::check_semistability;

/// A segment end: cluster plus sign half (0 unless the cluster is übereven).
pub type Point = (ClusterId, i8);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub cluster: ClusterId,
    /// +1/−1 for the two segments of an even cluster, 0 for an odd one
    pub half: i8,
    pub lower: Point,
    pub upper: Point,
    #[serde(serialize_with = "rat::ser")]
    pub length: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    OddChild,
    EvenChildPlus,
    EvenChildMinus,
    TwinLoop,
    CotwinLoop,
    SplitTop,
}

impl ChainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainKind::OddChild => "odd-child",
            ChainKind::EvenChildPlus => "even-child-plus",
            ChainKind::EvenChildMinus => "even-child-minus",
            ChainKind::TwinLoop => "twin-loop",
            ChainKind::CotwinLoop => "cotwin-loop",
            ChainKind::SplitTop => "split-top",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub cluster: ClusterId,
    pub path: String,
    /// ± for the two vertices of an übereven cluster
    pub sign: Option<Sign>,
    pub genus: usize,
    pub size: usize,
    #[serde(serialize_with = "rat::ser")]
    pub depth: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub length: u64,
    pub kind: ChainKind,
    /// (segment index, traversed upwards)
    pub segments: Vec<(usize, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphFrobenius {
    pub vertex: Vec<usize>,
    /// image chain and orientation (+1 kept, −1 reversed)
    pub chain: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub genus: usize,
    pub vertices: Vec<Vertex>,
    pub chains: Vec<Chain>,
    #[serde(skip)]
    pub segments: Vec<Segment>,
    pub frobenius: Option<GraphFrobenius>,
}

fn point_of(pic: &ClusterPicture, x: ClusterId, h: i8) -> Point {
    if pic.is_ubereven(x) {
        (x, h)
    } else {
        (x, 0)
    }
}

fn segments(pic: &ClusterPicture) -> Vec<Segment> {
    let top = pic.top();
    let mut out = Vec::new();
    for x in pic.proper_ids() {
        if x == top {
            continue;
        }
        let p = pic.parent(x).unwrap();
        let delta = pic.rel_depth(x).unwrap();
        if pic.is_even(x) {
            for h in [1i8, -1] {
                out.push(Segment {
                    cluster: x,
                    half: h,
                    lower: point_of(pic, x, h),
                    upper: point_of(pic, p, h),
                    length: delta.clone(),
                });
            }
        } else {
            out.push(Segment {
                cluster: x,
                half: 0,
                lower: (x, 0),
                upper: point_of(pic, p, 0),
                length: delta * rat::half(),
            });
        }
    }
    // R = s ⊔ {r}: R is a dead end and its segment is not part of the graph
    if !pic.is_principal(top) {
        let deg = |pt: &Point, segs: &[Segment]| segs.iter().filter(|s| &s.upper == pt || &s.lower == pt).count();
        let dangling: Vec<Point> =
            [(top, 0), (top, 1), (top, -1)].into_iter().filter(|pt| deg(pt, &out) == 1).collect();
        out.retain(|s| !dangling.contains(&s.upper));
    }
    out
}

fn is_real(pic: &ClusterPicture, pt: &Point) -> bool {
    pic.is_principal(pt.0)
}

fn vertex_name(pic: &ClusterPicture, pt: &Point) -> String {
    let base = pic.path(pt.0);
    match pt.1 {
        1 => format!("{base}+"),
        -1 => format!("{base}-"),
        _ => base,
    }
}

fn chain_name(pic: &ClusterPicture, segs: &[Segment], walk: &[(usize, bool)], kind: ChainKind) -> String {
    let first = &segs[walk[0].0];
    let sfx = |h: i8| match h {
        1 => "^+",
        -1 => "^-",
        _ => "",
    };
    match kind {
        ChainKind::TwinLoop | ChainKind::CotwinLoop => {
            let inner = walk
                .iter()
                .map(|&(s, _)| segs[s].lower.0)
                .find(|&c| pic.is_twin(c) || pic.is_cotwin(c))
                .or_else(|| walk.iter().map(|&(s, _)| segs[s].upper.0).find(|&c| pic.is_cotwin(c)))
                .unwrap();
            format!("L_{{{}}}", pic.path(inner))
        }
        ChainKind::SplitTop => {
            let mut ends: Vec<String> = walk
                .iter()
                .map(|&(s, _)| segs[s].cluster)
                .filter(|&c| pic.parent(c) == Some(pic.top()))
                .map(|c| pic.path(c))
                .collect();
            ends.dedup();
            format!("L_{{{}}}{}", ends.join(","), sfx(first.half))
        }
        _ => format!("L_{{{}}}{}", pic.path(first.cluster), sfx(first.half)),
    }
}

/// The graph without the Frobenius action; needs only the picture.
pub fn dual_graph_geometric(pic: &ClusterPicture) -> Result<DualGraph> {
    let top = pic.top();
    let segs = segments(pic);
    let mut incident: BTreeMap<Point, Vec<usize>> = BTreeMap::new();
    for (i, s) in segs.iter().enumerate() {
        incident.entry(s.lower).or_default().push(i);
        incident.entry(s.upper).or_default().push(i);
    }
    // vertices: principal clusters, two for übereven ones
    let mut vertices = Vec::new();
    let mut vindex: BTreeMap<Point, usize> = BTreeMap::new();
    for x in pic.proper_ids() {
        if !pic.is_principal(x) {
            continue;
        }
        let halves: &[i8] = if pic.is_ubereven(x) { &[1, -1] } else { &[0] };
        for &h in halves {
            vindex.insert((x, h), vertices.len());
            vertices.push(Vertex {
                cluster: x,
                path: pic.path(x),
                sign: match h {
                    1 => Some(Sign::Plus),
                    -1 => Some(Sign::Minus),
                    _ => None,
                },
                genus: if pic.is_ubereven(x) { 0 } else { pic.cluster_genus(x) },
                size: pic.size(x),
                depth: pic.depth(x).clone(),
            });
        }
    }
    for (pt, inc) in &incident {
        if !is_real(pic, pt) && inc.len() != 2 {
            return Err(Error::InvalidPicture(format!(
                "interior point {} has degree {}",
                vertex_name(pic, pt),
                inc.len()
            )));
        }
    }
    // walk chains
    let mut used = vec![false; segs.len()];
    let mut chains = Vec::new();
    let starts: Vec<Point> = vindex.keys().copied().collect();
    for start in starts {
        for &s0 in incident.get(&start).map(|v| v.as_slice()).unwrap_or(&[]) {
            if used[s0] {
                continue;
            }
            let mut walk = Vec::new();
            let mut at = start;
            let mut s = s0;
            loop {
                used[s] = true;
                let up = segs[s].lower == at;
                walk.push((s, up));
                at = if up { segs[s].upper } else { segs[s].lower };
                if is_real(pic, &at) {
                    break;
                }
                let inc = &incident[&at];
                s = if inc[0] == s { inc[1] } else { inc[0] };
                if used[s] {
                    return Err(Error::InvalidPicture("chain closes up without a vertex".into()));
                }
            }
            let end = at;
            // orientation: the lowest-numbered segment goes upwards
            let (min_pos, _) = walk.iter().enumerate().min_by_key(|(_, (s, _))| *s).unwrap();
            let (from, to, walk) = if walk[min_pos].1 {
                (start, end, walk)
            } else {
                let rev: Vec<(usize, bool)> = walk.iter().rev().map(|&(s, u)| (s, !u)).collect();
                (end, start, rev)
            };
            let len: Q = walk.iter().map(|&(s, _)| segs[s].length.clone()).sum();
            let length = rat::to_i64(&len).filter(|&l| l > 0).ok_or_else(|| {
                Error::NotSemistable(format!("chain through {} has length {}", pic.path(segs[walk[0].0].cluster), rat::fmt(&len)))
            })? as u64;
            let interior: Vec<ClusterId> =
                walk.iter().map(|&(s, u)| if u { segs[s].upper.0 } else { segs[s].lower.0 }).take(walk.len() - 1).collect();
            let kind = if interior.iter().any(|&c| pic.is_twin(c)) {
                ChainKind::TwinLoop
            } else if interior.iter().any(|&c| pic.is_cotwin(c)) {
                ChainKind::CotwinLoop
            } else if interior.contains(&top) {
                ChainKind::SplitTop
            } else {
                let sg = &segs[walk[0].0];
                match sg.half {
                    0 => ChainKind::OddChild,
                    1 => ChainKind::EvenChildPlus,
                    _ => ChainKind::EvenChildMinus,
                }
            };
            let name = chain_name(pic, &segs, &walk, kind);
            chains.push(Chain { name, from: vindex[&from], to: vindex[&to], length, kind, segments: walk });
        }
    }
    // deterministic order: by lowest segment
    chains.sort_by_key(|c| c.segments.iter().map(|&(s, _)| s).min().unwrap());
    let g = DualGraph { genus: pic.genus(), vertices, chains, segments: segs, frobenius: None };
    if g.vertex_genus_sum() + g.betti() != pic.genus() {
        return Err(Error::InvalidPicture("vertex genera and loops do not add up to g".into()));
    }
    Ok(g)
}

/// Clusters whose ε the Frobenius action reads.
pub fn needed_signs(pic: &ClusterPicture) -> Vec<ClusterId> {
    let top = pic.top();
    pic.proper_ids()
        .into_iter()
        .filter(|&x| (x != top && pic.is_even(x)) || (pic.is_ubereven(x) && pic.is_principal(x)))
        .collect()
}

/// Dual graph with Frobenius action. Requires the semistability criterion and every ε the
/// action touches.
pub fn dual_graph(pic: &ClusterPicture, g: &GaloisData) -> Result<DualGraph> {
    let v = check_semistability(pic, g);
    if !v.semistable {
        let w = &v.witnesses[0];
        return Err(Error::NotSemistable(format!(
            "clause ({}) {}{}",
            w.clause,
            w.cluster.as_ref().map(|c| format!("at {c}: ")).unwrap_or_default(),
            w.reason
        )));
    }
    let mut dg = dual_graph_geometric(pic)?;
    let missing: Vec<String> = needed_signs(pic)
        .into_iter()
        .filter(|&x| g.eps(pic, x) == Sign::Unknown)
        .map(|x| pic.path(pic.star(x)))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnknownSign(missing));
    }
    let fc = g.frob_clusters(pic);
    let eps = |x: ClusterId| g.eps(pic, x).value().unwrap_or(1) as i8;
    let map_point = |pt: &Point| -> Point {
        let (x, h) = *pt;
        if h == 0 {
            (fc[x], 0)
        } else {
            (fc[x], h * eps(x))
        }
    };
    let seg_index: BTreeMap<(ClusterId, i8), usize> =
        dg.segments.iter().enumerate().map(|(i, s)| ((s.cluster, s.half), i)).collect();
    let map_seg = |i: usize| -> usize {
        let s = &dg.segments[i];
        let h = if s.half == 0 { 0 } else { s.half * eps(s.cluster) };
        seg_index[&(fc[s.cluster], h)]
    };
    let vpoint: BTreeMap<Point, usize> = dg
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let h = match v.sign {
                Some(Sign::Plus) => 1,
                Some(Sign::Minus) => -1,
                _ => 0,
            };
            ((v.cluster, h), i)
        })
        .collect();
    let vertex: Vec<usize> = dg
        .vertices
        .iter()
        .map(|v| {
            let h = match v.sign {
                Some(Sign::Plus) => 1,
                Some(Sign::Minus) => -1,
                _ => 0,
            };
            vpoint[&map_point(&(v.cluster, h))]
        })
        .collect();
    let mut owner: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
    for (ci, c) in dg.chains.iter().enumerate() {
        for &(s, up) in &c.segments {
            owner.insert(s, (ci, up));
        }
    }
    let chain = dg
        .chains
        .iter()
        .map(|c| {
            let (s, up) = c.segments[0];
            let (ci, up2) = owner[&map_seg(s)];
            (ci, if up == up2 { 1 } else { -1 })
        })
        .collect();
    dg.frobenius = Some(GraphFrobenius { vertex, chain });
    Ok(dg)
}

impl DualGraph {
    pub fn betti(&self) -> usize {
        self.chains.len() + 1 - self.vertices.len()
    }

    pub fn vertex_genus_sum(&self) -> usize {
        self.vertices.iter().map(|v| v.genus).sum()
    }

    /// Components of the special fibre: vertices plus interior P¹s of every chain.
    pub fn component_count(&self) -> u64 {
        self.vertices.len() as u64 + self.chains.iter().map(|c| c.length - 1).sum::<u64>()
    }

    /// Every chain shortened to length 1.
    pub fn stable(&self) -> DualGraph {
        let mut g = self.clone();
        for c in g.chains.iter_mut() {
            c.length = 1;
        }
        g
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph special_fibre {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let sign = v.sign.map(|x| x.symbol()).unwrap_or("none");
            let _ = writeln!(
                s,
                "  v{i} [label=\"s:{}@{} g={} sign={}\", cluster=\"{}\"];",
                v.size,
                rat::fmt(&v.depth),
                v.genus,
                sign,
                v.path
            );
        }
        for c in &self.chains {
            let _ = writeln!(
                s,
                "  v{} -- v{} [label=\"{} {}\", name=\"{}\"];",
                c.from,
                c.to,
                c.length,
                c.kind.as_str(),
                c.name
            );
        }
        if let Some(f) = &self.frobenius {
            let vs: Vec<String> = f.vertex.iter().enumerate().map(|(i, j)| format!("v{i}->v{j}")).collect();
            let cs: Vec<String> = f
                .chain
                .iter()
                .enumerate()
                .map(|(i, (j, o))| format!("e{i}->{}e{j}", if *o < 0 { "-" } else { "" }))
                .collect();
            let _ = writeln!(s, "  // frobenius vertices: {}", vs.join(" "));
            let _ = writeln!(s, "  // frobenius chains: {}", cs.join(" "));
        }
        s.push_str("}\n");
        s
    }
}

/// m_C read off the cluster picture: Σ_{odd proper s≠R} δ_s/2 + Σ_{even s≠R} 2δ_s + 1 − b1,
/// less the dead-end segment when R = s ⊔ {r}.
pub fn components_from_formula(pic: &ClusterPicture, betti: usize) -> Q {
    let top = pic.top();
    let mut acc = Q::from_integer(1.into()) - rat::q(betti as i64);
    for x in pic.proper_ids() {
        if x == top {
            continue;
        }
        let d = pic.rel_depth(x).unwrap();
        if pic.is_even(x) {
            acc += d * rat::q(2);
        } else {
            acc += d * rat::half();
        }
    }
    let kids = pic.children(top);
    if pic.is_even(top) && kids.len() == 2 {
        if let Some(&s) = kids.iter().find(|&&c| pic.is_proper(c) && pic.is_odd(c)) {
            if kids.iter().any(|&c| !pic.is_proper(c)) {
                acc -= pic.rel_depth(s).unwrap() * rat::half();
            }
        }
    }
    acc
}

/// Number of components, counted on the graph and checked against the formula.
pub fn count_components(pic: &ClusterPicture, g: &GaloisData) -> Result<u64> {
    let v = check_semistability(pic, g);
    if !v.semistable {
        return Err(Error::NotSemistable("component count needs a semistable picture".into()));
    }
    let dg = dual_graph_geometric(pic)?;
    let n = dg.component_count();
    let f = components_from_formula(pic, dg.betti());
    if f != rat::q(n as i64) {
        return Err(Error::InvalidPicture(format!("component count {n} disagrees with formula {}", rat::fmt(&f))));
    }
    Ok(n)
}

pub fn stable_graph(pic: &ClusterPicture, g: &GaloisData) -> Result<DualGraph> {
    Ok(dual_graph(pic, g)?.stable())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::from_cycles;
    use crate::notation::{apply_signs, parse_bracket};

    fn curve(s: &str, v: i64) -> (ClusterPicture, GaloisData) {
        let parsed = parse_bracket(s).unwrap();
        let pic = parsed.picture.with_leading_valuation(v);
        let mut g = GaloisData::trivial(pic.root_count(), 7);
        apply_signs(&pic, &mut g, &parsed.signs).unwrap();
        (pic, g)
    }

    #[test]
    fn example_1_2_graph() {
        let (pic, g) = curve("[[r r r]_2 [r [r r r]_2]_1^-]_0", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.vertices.len(), 4);
        assert_eq!(dg.betti(), 1);
        assert_eq!(dg.component_count(), 4);
        assert_eq!(count_components(&pic, &g).unwrap(), 4);
        let kinds: Vec<(u64, ChainKind)> = dg.chains.iter().map(|c| (c.length, c.kind)).collect();
        assert_eq!(
            kinds,
            vec![(1, ChainKind::OddChild), (1, ChainKind::EvenChildPlus), (1, ChainKind::EvenChildMinus), (1, ChainKind::OddChild)]
        );
        // ε = −1 swaps the two chains to s2
        let f = dg.frobenius.unwrap();
        assert_eq!(f.chain[1].0, 2);
        assert_eq!(f.chain[2].0, 1);
        assert_eq!(f.vertex, vec![0, 1, 2, 3]);
    }

    #[test]
    fn one_twin_quintic() {
        for n in 1..5 {
            let (pic, g) = curve(&format!("[[r r]_{n}/2^- r r r]_0"), 0);
            let dg = dual_graph(&pic, &g).unwrap();
            assert_eq!(dg.vertices.len(), 1);
            assert_eq!(dg.chains.len(), 1);
            assert_eq!(dg.chains[0].length, n);
            assert_eq!(dg.chains[0].kind, ChainKind::TwinLoop);
            assert_eq!(dg.component_count(), n);
            assert_eq!(dg.frobenius.unwrap().chain[0], (0, -1));
        }
    }

    #[test]
    fn two_twins_and_u() {
        let (pic, g) = curve("[[r r]_1^+ [r r]_3/2^+ r r]_0", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.component_count(), 2 + 3 - 1);
        let (pic, g) = curve("[[r r]_1/2 [r r]_1 [r r]_3/2]_0^+", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.vertices.len(), 2);
        assert_eq!(dg.chains.len(), 3);
        assert_eq!(dg.betti(), 2);
        assert_eq!(count_components(&pic, &g).unwrap(), 1 + 2 + 3 - 1);
    }

    #[test]
    fn non_principal_tops() {
        // R = s ⊔ {r}
        let (pic, g) = curve("[[r r r r r]_2 r]_0", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.vertices.len(), 1);
        assert!(dg.chains.is_empty());
        assert_eq!(count_components(&pic, &g).unwrap(), 1);
        // R = s1 ⊔ s2 odd
        let (pic, g) = curve("[[r r r]_2 [r r r]_4]_0", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.chains.len(), 1);
        assert_eq!(dg.chains[0].length, 3);
        assert_eq!(dg.chains[0].kind, ChainKind::SplitTop);
        assert_eq!(count_components(&pic, &g).unwrap(), 4);
        // R = s ⊔ t, s principal even
        let (pic, g) = curve("[[r r r r]_1^+ [r r]_1]_0", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.chains.len(), 1);
        assert_eq!(dg.chains[0].length, 4);
        assert_eq!(dg.chains[0].kind, ChainKind::TwinLoop);
        // cotwin top of size 2g+1
        let (pic, g) = curve("[[r r r r]_1^- r]_0", 0);
        let dg = dual_graph(&pic, &g).unwrap();
        assert_eq!(dg.chains[0].kind, ChainKind::CotwinLoop);
        assert_eq!(dg.chains[0].length, 2);
        assert_eq!(dg.frobenius.unwrap().chain[0].1, -1);
    }

    #[test]
    fn swapped_twins() {
        let (pic, mut g) = curve("[[r r]_1^+ [r r]_1^- r r]_0", 0);
        g.frobenius = from_cycles(6, &[vec![0, 2], vec![1, 3]]).unwrap();
        let dg = dual_graph(&pic, &g).unwrap();
        let f = dg.frobenius.unwrap();
        assert_eq!(f.chain, vec![(1, 1), (0, -1)]);
    }

    #[test]
    fn unknown_sign_is_reported() {
        let (pic, g) = curve("[[r r]_1 r r r]_0", 0);
        match dual_graph(&pic, &g) {
            Err(Error::UnknownSign(v)) => assert_eq!(v, vec!["R.0".to_string()]),
            other => panic!("{other:?}"),
        }
        assert!(dual_graph_geometric(&pic).is_ok());
    }

    #[test]
    fn dot_is_stable() {
        let (pic, g) = curve("[r r r r r]_0", 0);
        let dot = dual_graph(&pic, &g).unwrap().to_dot();
        assert!(dot.contains("label=\"s:5@0 g=2 sign=none\""));
    }
}
