//! The cluster-picture data model and the purely combinatorial cluster functions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rat::{self, Q};

/// Index of a node inside a [`ClusterPicture`]. The top cluster is always 0.
pub type ClusterId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    members: Vec<usize>,
    depth: Option<Q>,
    parent: Option<ClusterId>,
    children: Vec<ClusterId>,
}

impl Cluster {
    pub fn members(&self) -> &[usize] {
        &self.members
    }
    pub fn depth(&self) -> Option<&Q> {
        self.depth.as_ref()
    }
    pub fn parent(&self) -> Option<ClusterId> {
        self.parent
    }
    pub fn children(&self) -> &[ClusterId] {
        &self.children
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewRoots { root_count: usize },
    BadMembers { members: Vec<usize> },
    DuplicateCluster { members: Vec<usize> },
    MissingTop,
    NotLaminar { a: Vec<usize>, b: Vec<usize> },
    NonIncreasingDepth { child: Vec<usize>, parent: Vec<usize>, child_depth: Q, parent_depth: Q },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewRoots { root_count } => {
                write!(f, "too few roots: {root_count} (need at least 5)")
            }
            Violation::BadMembers { members } => write!(f, "bad member set {members:?}"),
            Violation::DuplicateCluster { members } => write!(f, "duplicate cluster {members:?}"),
            Violation::MissingTop => write!(f, "missing top cluster"),
            Violation::NotLaminar { a, b } => write!(f, "not laminar: {a:?} and {b:?}"),
            Violation::NonIncreasingDepth { child, parent, child_depth, parent_depth } => write!(
                f,
                "non-increasing depth: {child:?} at {} inside {parent:?} at {}",
                rat::fmt(child_depth),
                rat::fmt(parent_depth)
            ),
        }
    }
}

impl From<Vec<Violation>> for crate::error::Error {
    fn from(vs: Vec<Violation>) -> Self {
        crate::error::Error::InvalidPicture(vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ClusterAttributes {
    pub proper: bool,
    pub odd: bool,
    pub even: bool,
    pub ubereven: bool,
    pub twin: bool,
    pub cotwin: bool,
    pub principal: bool,
    pub genus: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPicture {
    root_count: usize,
    leading_valuation: i64,
    nodes: Vec<Cluster>,
    leaf: Vec<ClusterId>,
    index: BTreeMap<Vec<usize>, ClusterId>,
}

/// Check a raw description: proper clusters with absolute depths over roots `0..root_count`.
pub fn validate_picture(root_count: usize, proper: &[(Vec<usize>, Q)]) -> Vec<Violation> {
    let mut out = Vec::new();
    if root_count < 5 {
        out.push(Violation::TooFewRoots { root_count });
    }
    let mut sets: Vec<(Vec<usize>, &Q)> = Vec::new();
    for (m, d) in proper {
        let mut s = m.clone();
        s.sort_unstable();
        let dup_inside = s.windows(2).any(|w| w[0] == w[1]);
        if s.len() < 2 || dup_inside || s.iter().any(|&r| r >= root_count) {
            out.push(Violation::BadMembers { members: m.clone() });
            continue;
        }
        if sets.iter().any(|(t, _)| *t == s) {
            out.push(Violation::DuplicateCluster { members: s });
            continue;
        }
        sets.push((s, d));
    }
    if !sets.iter().any(|(s, _)| s.len() == root_count) {
        out.push(Violation::MissingTop);
    }
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let (a, b) = (&sets[i].0, &sets[j].0);
            let common = a.iter().filter(|x| b.binary_search(x).is_ok()).count();
            if common != 0 && common != a.len() && common != b.len() {
                out.push(Violation::NotLaminar { a: a.clone(), b: b.clone() });
            }
        }
    }
    if out.iter().any(|v| matches!(v, Violation::NotLaminar { .. })) {
        return out;
    }
    // depth must strictly increase from the smallest strict superset
    for (s, d) in &sets {
        let parent = sets
            .iter()
            .filter(|(t, _)| t.len() > s.len() && s.iter().all(|x| t.binary_search(x).is_ok()))
            .min_by_key(|(t, _)| t.len());
        if let Some((t, pd)) = parent {
            if *d <= *pd {
                out.push(Violation::NonIncreasingDepth {
                    child: s.clone(),
                    parent: t.clone(),
                    child_depth: (*d).clone(),
                    parent_depth: (*pd).clone(),
                });
            }
        }
    }
    out
}

impl ClusterPicture {
    /// Build from proper clusters given with absolute depths. Singletons are implicit.
    pub fn new(
        root_count: usize,
        proper: Vec<(Vec<usize>, Q)>,
        leading_valuation: i64,
    ) -> Result<Self, Vec<Violation>> {
        let violations = validate_picture(root_count, &proper);
        if !violations.is_empty() {
            return Err(violations);
        }
        let mut sets: Vec<(Vec<usize>, Option<Q>)> = proper
            .into_iter()
            .map(|(mut m, d)| {
                m.sort_unstable();
                (m, Some(d))
            })
            .collect();
        sets.extend((0..root_count).map(|r| (vec![r], None)));
        sets.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        let contains = |t: &[usize], s: &[usize]| s.iter().all(|x| t.binary_search(x).is_ok());
        // parent in `sets` order: the smallest strict superset, which appears last among supersets
        let mut parent: Vec<Option<usize>> = vec![None; sets.len()];
        for i in 1..sets.len() {
            for j in (0..i).rev() {
                if sets[j].0.len() > sets[i].0.len() && contains(&sets[j].0, &sets[i].0) {
                    parent[i] = Some(j);
                    break;
                }
            }
        }
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); sets.len()];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                kids[*p].push(i);
            }
        }
        for k in kids.iter_mut() {
            k.sort_by_key(|&c| sets[c].0[0]);
        }
        // pre-order relabelling
        let mut order = Vec::with_capacity(sets.len());
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            order.push(i);
            for &c in kids[i].iter().rev() {
                stack.push(c);
            }
        }
        let mut new_id = vec![0; sets.len()];
        for (n, &old) in order.iter().enumerate() {
            new_id[old] = n;
        }
        let mut nodes = Vec::with_capacity(sets.len());
        for &old in &order {
            nodes.push(Cluster {
                members: sets[old].0.clone(),
                depth: sets[old].1.clone(),
                parent: parent[old].map(|p| new_id[p]),
                children: kids[old].iter().map(|&c| new_id[c]).collect(),
            });
        }
        let mut leaf = vec![0; root_count];
        let mut index = BTreeMap::new();
        for (id, n) in nodes.iter().enumerate() {
            if n.members.len() == 1 {
                leaf[n.members[0]] = id;
            }
            index.insert(n.members.clone(), id);
        }
        Ok(ClusterPicture { root_count, leading_valuation, nodes, leaf, index })
    }

    /// Re-check all invariants of a constructed picture.
    pub fn validate(&self) -> Vec<Violation> {
        validate_picture(self.root_count, &self.proper_clusters())
    }

    pub fn root_count(&self) -> usize {
        self.root_count
    }

    pub fn genus(&self) -> usize {
        (self.root_count - 1) / 2
    }

    pub fn leading_valuation(&self) -> i64 {
        self.leading_valuation
    }

    pub fn with_leading_valuation(&self, v: i64) -> Self {
        let mut p = self.clone();
        p.leading_valuation = v;
        p
    }

    pub fn top(&self) -> ClusterId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: ClusterId) -> &Cluster {
        &self.nodes[id]
    }

    pub fn ids(&self) -> std::ops::Range<ClusterId> {
        0..self.nodes.len()
    }

    /// Proper clusters in canonical (pre-order) order.
    pub fn proper_ids(&self) -> Vec<ClusterId> {
        self.ids().filter(|&i| self.size(i) > 1).collect()
    }

    /// Proper clusters as (members, absolute depth), in canonical order.
    pub fn proper_clusters(&self) -> Vec<(Vec<usize>, Q)> {
        self.proper_ids()
            .into_iter()
            .map(|i| (self.nodes[i].members.clone(), self.depth(i).clone()))
            .collect()
    }

    pub fn members(&self, id: ClusterId) -> &[usize] {
        &self.nodes[id].members
    }

    pub fn size(&self, id: ClusterId) -> usize {
        self.nodes[id].members.len()
    }

    pub fn parent(&self, id: ClusterId) -> Option<ClusterId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: ClusterId) -> &[ClusterId] {
        &self.nodes[id].children
    }

    /// Absolute depth of a proper cluster. Panics on singletons.
    pub fn depth(&self, id: ClusterId) -> &Q {
        self.nodes[id].depth.as_ref().expect("singletons have no depth")
    }

    pub fn depth_opt(&self, id: ClusterId) -> Option<&Q> {
        self.nodes[id].depth.as_ref()
    }

    /// δ_s for proper s ≠ R.
    pub fn rel_depth(&self, id: ClusterId) -> Option<Q> {
        let p = self.parent(id)?;
        let d = self.nodes[id].depth.as_ref()?;
        Some(d - self.depth(p))
    }

    pub fn leaf(&self, root: usize) -> ClusterId {
        self.leaf[root]
    }

    pub fn find(&self, members: &[usize]) -> Option<ClusterId> {
        let mut m = members.to_vec();
        m.sort_unstable();
        self.index.get(&m).copied()
    }

    pub fn contains(&self, id: ClusterId, root: usize) -> bool {
        self.nodes[id].members.binary_search(&root).is_ok()
    }

    /// Ancestors of `id` including itself, innermost first.
    pub fn ancestors(&self, id: ClusterId) -> Vec<ClusterId> {
        let mut out = vec![id];
        let mut x = id;
        while let Some(p) = self.parent(x) {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn is_ancestor(&self, a: ClusterId, b: ClusterId) -> bool {
        // a ⊇ b
        self.ancestors(b).contains(&a)
    }

    /// s1 ∧ s2, the smallest cluster containing both.
    pub fn meet(&self, a: ClusterId, b: ClusterId) -> ClusterId {
        let up = self.ancestors(a);
        let mut x = b;
        loop {
            if up.contains(&x) {
                return x;
            }
            x = self.parent(x).expect("top contains everything");
        }
    }

    /// d_{r∧s}.
    pub fn root_meet_depth(&self, root: usize, s: ClusterId) -> &Q {
        self.depth(self.meet(self.leaf(root), s))
    }

    pub fn is_proper(&self, id: ClusterId) -> bool {
        self.size(id) > 1
    }

    pub fn is_even(&self, id: ClusterId) -> bool {
        self.size(id) % 2 == 0
    }

    pub fn is_odd(&self, id: ClusterId) -> bool {
        !self.is_even(id)
    }

    pub fn is_twin(&self, id: ClusterId) -> bool {
        self.size(id) == 2
    }

    pub fn is_ubereven(&self, id: ClusterId) -> bool {
        self.is_proper(id) && self.children(id).iter().all(|&c| self.is_even(c))
    }

    fn has_child_of_size(&self, id: ClusterId, n: usize) -> Option<ClusterId> {
        self.children(id).iter().copied().find(|&c| self.size(c) == n)
    }

    pub fn is_cotwin(&self, id: ClusterId) -> bool {
        !self.is_ubereven(id) && self.has_child_of_size(id, 2 * self.genus()).is_some()
    }

    pub fn is_principal(&self, id: ClusterId) -> bool {
        let n = self.size(id);
        if n < 3 {
            return false;
        }
        if id == self.top() && n % 2 == 0 && self.children(id).len() == 2 {
            return false;
        }
        self.has_child_of_size(id, 2 * self.genus()).is_none()
    }

    pub fn odd_children(&self, id: ClusterId) -> usize {
        self.children(id).iter().filter(|&&c| self.is_odd(c)).count()
    }

    /// g(s): 0 for übereven clusters, otherwise #odd children is 2g(s)+1 or 2g(s)+2.
    pub fn cluster_genus(&self, id: ClusterId) -> usize {
        if !self.is_proper(id) || self.is_ubereven(id) {
            return 0;
        }
        (self.odd_children(id).max(1) - 1) / 2
    }

    pub fn classify(&self, id: ClusterId) -> ClusterAttributes {
        ClusterAttributes {
            proper: self.is_proper(id),
            odd: self.is_odd(id),
            even: self.is_even(id),
            ubereven: self.is_ubereven(id),
            twin: self.is_twin(id),
            cotwin: self.is_cotwin(id),
            principal: self.is_principal(id),
            genus: self.cluster_genus(id),
        }
    }

    /// s*: for a cotwin its child of size 2g, otherwise the smallest x ⊇ s whose parent
    /// is not übereven (R if there is none).
    pub fn star(&self, id: ClusterId) -> ClusterId {
        if self.is_cotwin(id) {
            return self.has_child_of_size(id, 2 * self.genus()).unwrap();
        }
        let mut x = id;
        while let Some(p) = self.parent(x) {
            if self.is_ubereven(p) {
                x = p;
            } else {
                break;
            }
        }
        x
    }

    /// ν_s = v(c_f) + Σ_r d_{r∧s}.
    pub fn nu(&self, id: ClusterId) -> Q {
        let mut acc = rat::q(self.leading_valuation);
        for r in 0..self.root_count {
            acc += self.root_meet_depth(r, id);
        }
        acc
    }

    /// λ̃_s = ½(v(c_f) + |s̃_odd|·d_s + Σ_{r∉s} d_{s∧r}).
    pub fn lambda_tilde(&self, id: ClusterId) -> Q {
        let mut acc = rat::q(self.leading_valuation);
        acc += self.depth(id) * rat::q(self.odd_children(id) as i64);
        for r in 0..self.root_count {
            if !self.contains(id, r) {
                acc += self.root_meet_depth(r, id);
            }
        }
        acc * rat::half()
    }

    /// The same quantity as ν_s/2 − d_s·Σ_{s'<s} ⌊|s'|/2⌋.
    pub fn lambda_tilde_table(&self, id: ClusterId) -> Q {
        let halves: usize = self.children(id).iter().map(|&c| self.size(c) / 2).sum();
        self.nu(id) * rat::half() - self.depth(id) * rat::q(halves as i64)
    }

    /// Dotted child-index path, "R" for the top cluster.
    pub fn path(&self, id: ClusterId) -> String {
        let mut steps = Vec::new();
        let mut x = id;
        while let Some(p) = self.parent(x) {
            steps.push(self.children(p).iter().position(|&c| c == x).unwrap());
            x = p;
        }
        let mut s = String::from("R");
        for i in steps.iter().rev() {
            s.push('.');
            s.push_str(&i.to_string());
        }
        s
    }

    pub fn from_path(&self, path: &str) -> Option<ClusterId> {
        let mut parts = path.trim().split('.');
        if parts.next()? != "R" {
            return None;
        }
        let mut x = self.top();
        for p in parts {
            let i: usize = p.parse().ok()?;
            x = *self.children(x).get(i)?;
        }
        Some(x)
    }

    /// Rename roots: old root `i` becomes `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        let proper = self
            .proper_clusters()
            .into_iter()
            .map(|(m, d)| (m.iter().map(|&r| map[r]).collect(), d))
            .collect();
        ClusterPicture::new(self.root_count, proper, self.leading_valuation)
            .expect("relabelling preserves validity")
    }

    /// Map from current root labels to left-to-right leaf order.
    pub fn canonical_numbering(&self) -> Vec<usize> {
        let mut map = vec![0; self.root_count];
        let mut next = 0;
        for id in self.ids() {
            if self.size(id) == 1 {
                map[self.members(id)[0]] = next;
                next += 1;
            }
        }
        map
    }

    pub fn is_canonically_numbered(&self) -> bool {
        self.canonical_numbering().iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Absolute depths shifted by `m` (keeps the tree).
    pub fn shifted(&self, m: &Q) -> Self {
        let mut p = self.clone();
        for n in p.nodes.iter_mut() {
            if let Some(d) = n.depth.as_mut() {
                *d += m;
            }
        }
        p
    }

    /// Largest absolute depth of a proper cluster.
    pub fn max_depth(&self) -> Q {
        self.proper_ids().into_iter().map(|i| self.depth(i).clone()).max().unwrap_or_else(Q::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    pub(crate) fn example_1_2() -> ClusterPicture {
        // roots 0:1 1:1+p^2 2:1-p^2 3:p 4:0 5:p^3 6:-p^3
        ClusterPicture::new(
            7,
            vec![
                ((0..7).collect(), q(0)),
                (vec![0, 1, 2], q(2)),
                (vec![3, 4, 5, 6], q(1)),
                (vec![4, 5, 6], q(3)),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn example_validates() {
        let p = example_1_2();
        assert!(p.validate().is_empty());
        assert_eq!(p.genus(), 3);
        assert_eq!(p.len(), 11);
    }

    #[test]
    fn violations_reported() {
        let v = validate_picture(6, &[((0..6).collect(), q(0)), (vec![0, 1, 2], q(0))]);
        assert!(v.iter().any(|x| x.to_string().starts_with("non-increasing depth")));
        let v = validate_picture(
            6,
            &[((0..6).collect(), q(0)), (vec![0, 1, 2], q(1)), (vec![2, 3, 4], q(1))],
        );
        assert!(v.iter().any(|x| x.to_string().starts_with("not laminar")));
        let v = validate_picture(4, &[((0..4).collect(), q(0))]);
        assert!(matches!(v[0], Violation::TooFewRoots { .. }));
        let v = validate_picture(6, &[(vec![0, 1], q(0))]);
        assert!(v.contains(&Violation::MissingTop));
    }

    #[test]
    fn example_classification() {
        let p = example_1_2();
        let s2 = p.find(&[3, 4, 5, 6]).unwrap();
        let a = p.classify(s2);
        assert!(a.even && a.proper && a.principal && !a.ubereven);
        // two odd children, so genus 0; the genus-1 components are s1 and s3
        assert_eq!(a.genus, 0);
        assert_eq!(p.cluster_genus(p.find(&[4, 5, 6]).unwrap()), 1);
        assert_eq!(p.cluster_genus(p.find(&[0, 1, 2]).unwrap()), 1);
        let s3 = p.find(&[4, 5, 6]).unwrap();
        assert_eq!(p.meet(s3, p.leaf(3)), s2);
        assert_eq!(p.meet(s3, s3), s3);
        assert_eq!(p.star(s2), s2);
        assert_eq!(p.nu(s3), q(10));
        assert_eq!(p.nu(p.top()), q(0));
        assert_eq!(p.lambda_tilde(s3), q(5));
        assert_eq!(p.lambda_tilde_table(s3), q(5));
    }

    #[test]
    fn twin_and_cotwin() {
        // R of size 8 (g = 3) with one child of size 6
        let p = ClusterPicture::new(
            8,
            vec![((0..8).collect(), q(0)), ((0..6).collect(), q(1)), (vec![0, 1], q(2))],
            0,
        )
        .unwrap();
        let r = p.top();
        let a = p.classify(r);
        assert!(a.cotwin && !a.principal && !a.ubereven);
        assert_eq!(p.star(r), p.find(&[0, 1, 2, 3, 4, 5]).unwrap());
        let t = p.find(&[0, 1]).unwrap();
        let a = p.classify(t);
        assert!(a.twin && a.even && !a.principal);
    }

    #[test]
    fn star_walks_through_ubereven() {
        // three twins under an übereven R
        let p = ClusterPicture::new(
            6,
            vec![((0..6).collect(), q(0)), (vec![0, 1], q(1)), (vec![2, 3], q(1)), (vec![4, 5], q(1))],
            0,
        )
        .unwrap();
        assert!(p.is_ubereven(p.top()));
        for t in p.proper_ids().into_iter().skip(1) {
            assert_eq!(p.star(t), p.top());
        }
    }

    #[test]
    fn paths_round_trip() {
        let p = example_1_2();
        for id in p.ids() {
            assert_eq!(p.from_path(&p.path(id)), Some(id));
        }
        assert_eq!(p.path(p.find(&[4, 5, 6]).unwrap()), "R.1.1");
    }
}
