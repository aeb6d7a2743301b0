//! Equivalence moves on cluster pictures, the balanced representative and
//! equivalence testing.

use std::fmt;

use num_traits::Zero;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
use crate::galois::GaloisData;
use crate::rat::{self, q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// add m to every depth
    Shift(Q),
    /// new root with the next free index, child of R (|R| odd)
    AddRoot,
    /// drop a singleton child of R (|R| even, R∖{r} not a cluster)
    RemoveRoot(usize),
    /// d'_s = d_s + m for the child s of R, d'_{s^c} = d_{s^c} − m
    Redistribute { s: Vec<usize>, m: Q },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Shift(m) => write!(f, "shift({})", rat::fmt(m)),
            Move::AddRoot => write!(f, "add-root"),
            Move::RemoveRoot(r) => write!(f, "remove-root({r})"),
            Move::Redistribute { s, m } => {
                let members: Vec<String> = s.iter().map(|r| r.to_string()).collect();
                write!(f, "redistribute({{{}}}, {})", members.join(","), rat::fmt(m))
            }
        }
    }
}

impl serde::Serialize for Move {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn pre(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// δ_t with the conventions used by redistribution: singletons are infinitely deep.
fn rel_depth_inf(pic: &ClusterPicture, t: ClusterId) -> Option<Q> {
    if pic.size(t) == 1 {
        None
    } else {
        pic.rel_depth(t)
    }
}

pub fn apply_move(pic: &ClusterPicture, mv: &Move) -> Result<ClusterPicture> {
    let n = pic.root_count();
    let top = pic.top();
    let v = pic.leading_valuation();
    match mv {
        Move::Shift(m) => Ok(pic.shifted(m)),
        Move::AddRoot => {
            if n % 2 == 0 {
                return Err(pre("add-root needs |R| odd"));
            }
            let mut proper = pic.proper_clusters();
            proper[0].0.push(n);
            Ok(ClusterPicture::new(n + 1, proper, v)?)
        }
        Move::RemoveRoot(r) => {
            let r = *r;
            if n % 2 == 1 {
                return Err(pre("remove-root needs |R| even"));
            }
            if r >= n || pic.parent(pic.leaf(r)) != Some(top) {
                return Err(pre(format!("root {r} is not a child of R")));
            }
            let rest: Vec<usize> = (0..n).filter(|&x| x != r).collect();
            if pic.find(&rest).is_some() {
                return Err(pre("R minus the root is a cluster"));
            }
            let proper = pic
                .proper_clusters()
                .into_iter()
                .map(|(ms, d)| (ms.into_iter().filter(|&x| x != r).map(|x| if x > r { x - 1 } else { x }).collect(), d))
                .collect();
            Ok(ClusterPicture::new(n - 1, proper, v)?)
        }
        Move::Redistribute { s, m } => {
            if n % 2 == 1 {
                return Err(pre("redistribute needs |R| even"));
            }
            let sid = pic.find(s).filter(|&x| pic.parent(x) == Some(top)).ok_or_else(|| pre("s is not a child of R"))?;
            let sc: Vec<usize> = (0..n).filter(|x| !s.contains(x)).collect();
            let scid = pic.find(&sc);
            let delta_s = rel_depth_inf(pic, sid);
            let delta_sc = match scid {
                Some(c) => rel_depth_inf(pic, c),
                None => Some(Q::zero()),
            };
            if delta_s.as_ref().is_some_and(|d| *m < -d) || delta_sc.as_ref().is_some_and(|d| m > d) {
                return Err(pre(format!("m = {} is outside [-δ_s, δ_(s^c)]", rat::fmt(m))));
            }
            let dr = pic.depth(top).clone();
            let mut proper = Vec::new();
            for (ms, d) in pic.proper_clusters() {
                if ms.len() == n {
                    proper.push((ms, d));
                } else if s.contains(&ms[0]) {
                    proper.push((ms, d + m));
                } else {
                    proper.push((ms, d - m));
                }
            }
            if scid.is_none() && sc.len() > 1 {
                proper.push((sc.clone(), &dr - m));
            }
            proper.retain(|(ms, d)| ms.len() == n || !((ms == s || *ms == sc) && *d == dr));
            Ok(ClusterPicture::new(n, proper, v)?)
        }
    }
}

/// Apply a move to an annotated picture. Only shifts keep the Galois data meaningful;
/// other moves change the root set and return trivial data flagged stale.
pub fn apply_move_galois(pic: &ClusterPicture, g: &GaloisData, mv: &Move) -> Result<(ClusterPicture, GaloisData)> {
    let out = apply_move(pic, mv)?;
    let g2 = match mv {
        Move::Shift(_) => g.clone(),
        _ => GaloisData { stale: true, ..GaloisData::trivial(out.root_count(), g.residue_size) },
    };
    Ok((out, g2))
}

fn half_genus(pic: &ClusterPicture) -> usize {
    pic.genus() + 1
}

/// Balanced predicate: even size, d_R = 0, no cluster of size > g+1 besides
/// R, and zero or two clusters of size g+1 of equal depth.
pub fn is_balanced(pic: &ClusterPicture) -> bool {
    let top = pic.top();
    let h = half_genus(pic);
    if pic.root_count() % 2 == 1 || !pic.depth(top).is_zero() {
        return false;
    }
    let proper = pic.proper_ids();
    if proper.iter().any(|&s| s != top && pic.size(s) > h) {
        return false;
    }
    let halves: Vec<ClusterId> = proper.into_iter().filter(|&s| pic.size(s) == h).collect();
    match halves.as_slice() {
        [] => true,
        [a, b] => pic.depth(*a) == pic.depth(*b),
        _ => false,
    }
}

/// The balanced representative together with moves that replay from `pic` to it.
pub fn balance(pic: &ClusterPicture) -> (ClusterPicture, Vec<Move>) {
    let mut cur = pic.clone();
    let mut moves = Vec::new();
    let mut step = |cur: &mut ClusterPicture, mv: Move| {
        *cur = apply_move(cur, &mv).expect("balancing move preconditions hold");
        moves.push(mv);
    };
    if cur.root_count() % 2 == 1 {
        step(&mut cur, Move::AddRoot);
    }
    let dr = cur.depth(cur.top()).clone();
    if !dr.is_zero() {
        step(&mut cur, Move::Shift(-dr));
    }
    let h = half_genus(&cur);
    loop {
        let top = cur.top();
        let big = cur.children(top).iter().copied().find(|&c| cur.size(c) > h);
        let Some(s) = big else { break };
        let m = -cur.rel_depth(s).unwrap();
        let members = cur.members(s).to_vec();
        step(&mut cur, Move::Redistribute { s: members, m });
    }
    let top = cur.top();
    if let Some(s) = cur.children(top).iter().copied().find(|&c| cur.size(c) == h && cur.size(c) > 1) {
        let n = cur.root_count();
        let sc: Vec<usize> = (0..n).filter(|x| !cur.contains(s, *x)).collect();
        let dsc = cur.find(&sc).and_then(|c| cur.rel_depth(c)).unwrap_or_else(Q::zero);
        let ds = cur.rel_depth(s).unwrap();
        if ds != dsc {
            let m = (dsc - ds) * rat::half();
            let members = cur.members(s).to_vec();
            step(&mut cur, Move::Redistribute { s: members, m });
        }
    }
    (cur, moves)
}

/// Isomorphism-invariant string of a depth-labelled tree: children sorted, top depth
/// absolute, others relative.
pub fn canonical_string(pic: &ClusterPicture) -> String {
    fn go(pic: &ClusterPicture, id: ClusterId, out_depth: &Q) -> String {
        if pic.size(id) == 1 {
            return "r".into();
        }
        let mut kids: Vec<String> = pic.children(id).iter().map(|&c| go(pic, c, pic.depth(id))).collect();
        kids.sort();
        format!("[{}]_{}", kids.join(" "), rat::fmt(&(pic.depth(id) - out_depth)))
    }
    go(pic, pic.top(), &Q::zero())
}

pub fn equivalent(a: &ClusterPicture, b: &ClusterPicture) -> bool {
    canonical_string(&balance(a).0) == canonical_string(&balance(b).0)
}

/// Change of v(Δ_{Σ,n}) under a move, per the discriminant-change formulas.
pub fn disc_delta(pic: &ClusterPicture, mv: &Move) -> Q {
    let r = pic.root_count() as i64;
    match mv {
        Move::Shift(t) => t * q(r * (r - 1)),
        Move::AddRoot => pic.depth(pic.top()) * q(2 * r),
        Move::RemoveRoot(_) => -(pic.depth(pic.top()) * q(2 * (r - 1))),
        Move::Redistribute { s, m } => -(m * q((r - 2 * s.len() as i64) * (r - 1))),
    }
}

/// Change of v(Δ_{Σ,n}) when n grows by k.
pub fn n_shift_delta(pic: &ClusterPicture, k: i64) -> i64 {
    let r = pic.root_count() as i64;
    if r % 2 == 0 {
        2 * k * (r - 1)
    } else {
        2 * k * r
    }
}

/// All legal redistribution bounds for a child s of R: (lower, upper), None = unbounded.
pub fn redistribute_range(pic: &ClusterPicture, s: ClusterId) -> (Option<Q>, Option<Q>) {
    let n = pic.root_count();
    let sc: Vec<usize> = (0..n).filter(|&x| !pic.contains(s, x)).collect();
    let lo = rel_depth_inf(pic, s).map(|d| -d);
    let hi = match pic.find(&sc) {
        Some(c) => rel_depth_inf(pic, c),
        None => Some(Q::zero()),
    };
    (lo, hi)
}
