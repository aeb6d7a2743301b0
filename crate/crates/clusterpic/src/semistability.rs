//! The semistability criterion, its relative-depth reformulation, and the reduction
//! profile read off the cluster picture.

use serde::Serialize;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::galois::GaloisData;
use crate::rat::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// clause of the criterion that fails (1, 2 or 3)
    pub clause: u8,
    /// cluster path, when the failure is attached to a cluster
    pub cluster: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub semistable: bool,
    pub witnesses: Vec<Witness>,
}

/// Semistability criterion: tame with inertia of order at most 2, proper clusters
/// inertia-invariant, principal clusters with d_s ∈ ℤ and ν_s ∈ 2ℤ.
pub fn check_semistability(pic: &ClusterPicture, g: &GaloisData) -> Verdict {
    let mut w = Vec::new();
    let e = g.inertia_order();
    if !g.tame {
        w.push(Witness { clause: 1, cluster: None, reason: "K(R)/K is wildly ramified".into() });
    }
    if e > 2 {
        w.push(Witness { clause: 1, cluster: None, reason: format!("inertia acts with order {e} > 2") });
    }
    let inert = g.inertia_clusters(pic);
    for s in pic.proper_ids() {
        if inert[s] != s {
            w.push(Witness { clause: 2, cluster: Some(pic.path(s)), reason: "not inertia-invariant".into() });
        }
    }
    for s in pic.proper_ids() {
        if !pic.is_principal(s) {
            continue;
        }
        if !rat::is_int(pic.depth(s)) {
            w.push(Witness {
                clause: 3,
                cluster: Some(pic.path(s)),
                reason: format!("principal with depth {} not integral", rat::fmt(pic.depth(s))),
            });
        }
        let nu = pic.nu(s);
        if !rat::is_even_int(&nu) {
            w.push(Witness {
                clause: 3,
                cluster: Some(pic.path(s)),
                reason: format!("principal with nu = {} not even", rat::fmt(&nu)),
            });
        }
    }
    Verdict { semistable: w.is_empty(), witnesses: w }
}

fn in_half_z(x: &Q) -> bool {
    rat::is_int(&(x * rat::q(2)))
}

fn in_two_z(x: &Q) -> bool {
    rat::is_int(x) && rat::is_even_int(x)
}

/// The relative-depth form of the criterion. Reads only depths, ν and tameness, so it
/// applies to pictures that come from an actual curve.
pub fn check_semistability_equivalent(pic: &ClusterPicture, g: &GaloisData) -> bool {
    let top = pic.top();
    let anchor = pic
        .proper_ids()
        .into_iter()
        .any(|s| pic.is_principal(s) && rat::is_int(pic.depth(s)) && rat::is_even_int(&pic.nu(s)));
    if !anchor || !g.tame {
        return false;
    }
    let two_g = 2 * pic.genus();
    for s in pic.proper_ids() {
        if s == top {
            continue;
        }
        let p = pic.parent(s).unwrap();
        let delta = pic.rel_depth(s).unwrap();
        let n = pic.size(s);
        let ok = if n == 2 {
            in_half_z(&delta)
        } else if n % 2 == 0 {
            if pic.is_cotwin(p) {
                // n = 2g here
                debug_assert_eq!(n, two_g);
                in_half_z(&delta)
            } else {
                rat::is_int(&delta)
            }
        } else if pic.is_principal(p) {
            in_two_z(&delta)
        } else {
            true
        };
        if !ok {
            return false;
        }
    }
    let kids: Vec<ClusterId> = pic.children(top).to_vec();
    if kids.len() == 2 && kids.iter().all(|&c| pic.is_proper(c)) {
        let (a, b) = (kids[0], kids[1]);
        let (da, db) = (pic.rel_depth(a).unwrap(), pic.rel_depth(b).unwrap());
        if pic.is_odd(a) && pic.is_odd(b) {
            if !(rat::is_int(&da) && rat::is_int(&db) && in_two_z(&(&da + &db))) {
                return false;
            }
        }
        if pic.is_even(a) && pic.is_even(b) && pic.is_principal(a) && pic.is_principal(b) {
            if !(rat::is_int(&da) && rat::is_int(&db)) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionProfile {
    pub semistable: bool,
    pub good: bool,
    pub potentially_good: bool,
    pub tame: bool,
    pub jacobian_good: bool,
    pub jacobian_potentially_good: bool,
    pub potential_toric_rank: usize,
    pub potentially_totally_toric: bool,
}

/// Potential toric rank: even non-übereven clusters other than R, less one when R is
/// übereven.
pub fn potential_toric_rank(pic: &ClusterPicture) -> usize {
    let top = pic.top();
    let a = pic
        .proper_ids()
        .into_iter()
        .filter(|&s| s != top && pic.is_even(s) && !pic.is_ubereven(s))
        .count();
    if pic.is_ubereven(top) {
        a.saturating_sub(1)
    } else {
        a
    }
}

pub fn reduction_profile(pic: &ClusterPicture, g: &GaloisData) -> ReductionProfile {
    let top = pic.top();
    let two_g = 2 * pic.genus();
    let unramified = g.tame && g.inertia_order() == 1;
    let potentially_good = pic.proper_ids().iter().all(|&s| pic.size(s) >= two_g + 1);
    let principal_nu_even = pic
        .proper_ids()
        .into_iter()
        .filter(|&s| pic.is_principal(s))
        .all(|s| rat::is_even_int(&pic.nu(s)));
    let all_odd = pic.proper_ids().into_iter().all(|s| s == top || pic.is_odd(s));
    ReductionProfile {
        semistable: check_semistability(pic, g).semistable,
        good: unramified && potentially_good && principal_nu_even,
        potentially_good,
        tame: g.tame,
        jacobian_good: unramified && all_odd && principal_nu_even,
        jacobian_potentially_good: all_odd,
        potential_toric_rank: potential_toric_rank(pic),
        potentially_totally_toric: pic.proper_ids().into_iter().all(|s| pic.odd_children(s) <= 2),
    }
}
