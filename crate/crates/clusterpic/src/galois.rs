//! Frobenius/inertia permutations of the roots and the ε signs attached to θ-classes.

use std::collections::BTreeMap;
use std::fmt;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
    Unknown,
}

impl Sign {
    pub fn from_i8(s: i8) -> Sign {
        match s {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => Sign::Unknown,
        }
    }
    pub fn value(self) -> Option<i64> {
        match self {
            Sign::Plus => Some(1),
            Sign::Minus => Some(-1),
            Sign::Unknown => None,
        }
    }
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Unknown => "?",
        }
    }
    pub fn times(self, o: Sign) -> Sign {
        match (self.value(), o.value()) {
            (Some(a), Some(b)) => Sign::from_i8((a * b) as i8),
            _ => Sign::Unknown,
        }
    }
}

impl serde::Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Galois annotations of a picture. ε signs are stored on θ-classes: even clusters t
/// with t* = t, keyed by member set. For any even or cotwin s, ε_s(Frob) is the sign
/// stored on s*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisData {
    pub frobenius: Vec<usize>,
    pub inertia: Vec<usize>,
    pub epsilon: BTreeMap<Vec<usize>, Sign>,
    pub residue_size: u64,
    /// K(R)/K tame
    pub tame: bool,
    /// tameness was asserted by the caller rather than derived from roots
    pub tame_asserted: bool,
    /// set after a move that does not transport Galois data
    pub stale: bool,
}

pub fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

pub fn perm_order(p: &[usize]) -> usize {
    let mut ord = 1usize;
    let mut seen = vec![false; p.len()];
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        ord = num_integer::lcm(ord, len);
    }
    ord
}

/// Cycles of a permutation, each starting at its least element, sorted.
pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut c = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            c.push(j);
            j = p[j];
        }
        out.push(c);
    }
    out
}

pub fn from_cycles(n: usize, cyc: &[Vec<usize>]) -> Result<Vec<usize>> {
    let mut p = identity(n);
    let mut seen = vec![false; n];
    for c in cyc {
        for (k, &x) in c.iter().enumerate() {
            if x >= n || seen[x] {
                return Err(Error::Input(format!("bad permutation cycle {c:?}")));
            }
            seen[x] = true;
            p[x] = c[(k + 1) % c.len()];
        }
    }
    Ok(p)
}

/// θ-class representatives: even proper clusters t with t* = t.
pub fn theta_classes(pic: &ClusterPicture) -> Vec<ClusterId> {
    pic.proper_ids().into_iter().filter(|&t| pic.is_even(t) && pic.star(t) == t).collect()
}

impl GaloisData {
    pub fn trivial(n: usize, residue_size: u64) -> Self {
        GaloisData {
            frobenius: identity(n),
            inertia: identity(n),
            epsilon: BTreeMap::new(),
            residue_size,
            tame: true,
            tame_asserted: true,
            stale: false,
        }
    }

    /// The permutation a root permutation induces on clusters.
    pub fn cluster_perm(pic: &ClusterPicture, perm: &[usize]) -> Result<Vec<ClusterId>> {
        let mut out = Vec::with_capacity(pic.len());
        for id in pic.ids() {
            let img: Vec<usize> = pic.members(id).iter().map(|&r| perm[r]).collect();
            let j = pic.find(&img).ok_or_else(|| {
                Error::Input(format!("permutation does not preserve cluster {}", pic.path(id)))
            })?;
            if pic.depth_opt(id) != pic.depth_opt(j) {
                return Err(Error::Input(format!(
                    "permutation does not preserve the depth of {}",
                    pic.path(id)
                )));
            }
            out.push(j);
        }
        Ok(out)
    }

    pub fn frob_clusters(&self, pic: &ClusterPicture) -> Vec<ClusterId> {
        Self::cluster_perm(pic, &self.frobenius).expect("validated Galois data")
    }

    pub fn inertia_clusters(&self, pic: &ClusterPicture) -> Vec<ClusterId> {
        Self::cluster_perm(pic, &self.inertia).expect("validated Galois data")
    }

    pub fn validate(&self, pic: &ClusterPicture) -> Result<()> {
        let n = pic.root_count();
        for (name, p) in [("frobenius", &self.frobenius), ("inertia", &self.inertia)] {
            if p.len() != n || !is_permutation(p) {
                return Err(Error::Input(format!("{name} is not a permutation of {n} roots")));
            }
            Self::cluster_perm(pic, p)?;
        }
        for key in self.epsilon.keys() {
            match pic.find(key) {
                Some(t) if pic.is_even(t) && pic.star(t) == t => {}
                _ => return Err(Error::Input(format!("epsilon stored on a non-class cluster {key:?}"))),
            }
        }
        Ok(())
    }

    pub fn inertia_order(&self) -> usize {
        perm_order(&self.inertia)
    }

    /// ε_s(Frob) for an even or cotwin cluster s.
    pub fn eps(&self, pic: &ClusterPicture, s: ClusterId) -> Sign {
        let t = pic.star(s);
        self.epsilon.get(pic.members(t)).copied().unwrap_or(Sign::Unknown)
    }

    /// Record a user-supplied sign on s, which must be even or a cotwin.
    pub fn set_sign(&mut self, pic: &ClusterPicture, s: ClusterId, sign: Sign) -> Result<()> {
        if !pic.is_proper(s) || !(pic.is_even(s) || pic.is_cotwin(s)) {
            return Err(Error::Input(format!(
                "sign on an odd non-cotwin cluster {}",
                pic.path(s)
            )));
        }
        let key = pic.members(pic.star(s)).to_vec();
        match self.epsilon.get(&key) {
            Some(old) if *old != Sign::Unknown && *old != sign => Err(Error::Input(format!(
                "conflicting signs for the class of {}",
                pic.path(s)
            ))),
            _ => {
                self.epsilon.insert(key, sign);
                Ok(())
            }
        }
    }

    /// Rename roots: old root i becomes map[i].
    pub fn relabel(&self, map: &[usize]) -> Self {
        let n = map.len();
        let mut inv = vec![0; n];
        for (i, &j) in map.iter().enumerate() {
            inv[j] = i;
        }
        let conj = |p: &[usize]| (0..n).map(|j| map[p[inv[j]]]).collect::<Vec<_>>();
        GaloisData {
            frobenius: conj(&self.frobenius),
            inertia: conj(&self.inertia),
            epsilon: self
                .epsilon
                .iter()
                .map(|(k, v)| {
                    let mut m: Vec<usize> = k.iter().map(|&r| map[r]).collect();
                    m.sort_unstable();
                    (m, *v)
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Orbit of a cluster under a cluster permutation, starting at `id`.
    pub fn orbit(perm: &[ClusterId], id: ClusterId) -> Vec<ClusterId> {
        let mut out = vec![id];
        let mut x = perm[id];
        while x != id {
            out.push(x);
            x = perm[x];
        }
        out
    }

    pub fn is_stable(&self, pic: &ClusterPicture, s: ClusterId) -> bool {
        self.frob_clusters(pic)[s] == s && self.inertia_clusters(pic)[s] == s
    }
}
