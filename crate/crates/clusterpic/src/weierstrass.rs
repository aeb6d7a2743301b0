//! Discriminant valuations, integrality of (Σ, n), minimal Weierstrass equations and
//! the local-constancy bound.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
use crate::galois::GaloisData;
use crate::rat::{self, q, Q};
use crate::semistability::check_semistability;

fn two_g_plus_one(pic: &ClusterPicture) -> i64 {
    2 * pic.genus() as i64 + 1
}

/// Σ_{proper s} d_s(|s|² − Σ_{s'<s} |s'|²).
pub fn cluster_sum(pic: &ClusterPicture) -> Q {
    let mut acc = Q::zero();
    for s in pic.proper_ids() {
        let sz = pic.size(s) as i64;
        let inner: i64 = pic.children(s).iter().map(|&c| (pic.size(c) as i64).pow(2)).sum();
        acc += pic.depth(s) * q(sz * sz - inner);
    }
    acc
}

/// 2 Σ over unordered pairs r ≠ r' of d_{r∧r'}.
pub fn pair_sum(pic: &ClusterPicture) -> Q {
    let n = pic.root_count();
    let mut acc = Q::zero();
    for a in 0..n {
        for b in a + 1..n {
            acc += pic.depth(pic.meet(pic.leaf(a), pic.leaf(b)));
        }
    }
    acc * q(2)
}

/// v(Δ_{Σ,n}) = n(4g+2) + 2 Σ_{r≠r'} d_{r∧r'}.
pub fn disc_sigma_n(pic: &ClusterPicture, n: i64) -> Q {
    q(n * 2 * two_g_plus_one(pic)) + pair_sum(pic)
}

/// v(Δ) of the model the picture came from, with n = v(c_f).
pub fn disc_valuation(pic: &ClusterPicture) -> Q {
    let base = q(pic.leading_valuation() * 2 * two_g_plus_one(pic));
    let by_clusters = &base + cluster_sum(pic);
    debug_assert_eq!(by_clusters, &base + pair_sum(pic));
    by_clusters
}

/// Σ_{r∉t} d_{r∧t}.
pub fn outside_sum(pic: &ClusterPicture, t: ClusterId) -> Q {
    (0..pic.root_count()).filter(|&r| !pic.contains(t, r)).map(|r| pic.root_meet_depth(r, t).clone()).sum()
}

/// Whether (Σ, n) is integral.
pub fn is_integral(pic: &ClusterPicture, g: &GaloisData, n: i64) -> bool {
    if n >= 0 && !pic.depth(pic.top()).is_negative() {
        return true;
    }
    for s in pic.proper_ids() {
        let ds = pic.depth(s);
        if ds.is_positive() || !g.is_stable(pic, s) {
            continue;
        }
        let base = q(n) + outside_sum(pic, s);
        // t = ∅ or a stable child that is a singleton or has d_t ≥ 0
        let mut sizes = vec![0usize];
        for &t in pic.children(s) {
            if g.is_stable(pic, t) && (pic.size(t) == 1 || !pic.depth(t).is_negative()) {
                sizes.push(pic.size(t));
            }
        }
        if sizes.iter().any(|&t| !(&base + ds * q((pic.size(s) - t) as i64)).is_negative()) {
            return true;
        }
    }
    false
}

/// The least n making (Σ, n) integral, for trivial Galois action, integer depths, d_R ≤ 0.
pub fn minimal_shift_valuation(pic: &ClusterPicture) -> Result<i64> {
    for s in pic.proper_ids() {
        if !rat::is_int(pic.depth(s)) {
            return Err(Error::Precondition(format!("depth of {} is not an integer", pic.path(s))));
        }
    }
    let top = pic.top();
    if pic.depth(top).is_positive() {
        return Err(Error::Precondition("top depth is positive".into()));
    }
    if pic.depth(top).is_zero() {
        return Ok(0);
    }
    let mut best: Option<Q> = None;
    for t in pic.ids() {
        let Some(p) = pic.parent(t) else { continue };
        if pic.depth(p).is_positive() || !(pic.size(t) == 1 || pic.depth(t).is_positive()) {
            continue;
        }
        let v = -outside_sum(pic, t);
        if best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    }
    Ok(rat::to_i64(&best.expect("a singleton always qualifies")).expect("integer depths"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttestationStatus {
    Verified,
    Failed,
    /// residue field size unknown
    Assumed,
}

/// A hypothesis on the residue field that a result depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attestation {
    pub hypothesis: String,
    pub status: AttestationStatus,
}

impl Attestation {
    fn check(hypothesis: String, residue_size: u64, holds: impl Fn(u64) -> bool) -> Self {
        let status = match residue_size {
            0 => AttestationStatus::Assumed,
            k if holds(k) => AttestationStatus::Verified,
            _ => AttestationStatus::Failed,
        };
        Attestation { hypothesis, status }
    }
}

/// Which clause certifies minimality, or why none does.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum Certificate {
    Exceptional { clusters: [String; 2] },
    Witness { cluster: String },
    NotMinimal { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minimality {
    pub minimal: bool,
    pub certificate: Certificate,
    pub attestation: Attestation,
}

/// Two clusters of size g+1 swapped by Frobenius.
pub fn exceptional_pair(pic: &ClusterPicture, g: &GaloisData) -> Option<(ClusterId, ClusterId)> {
    let half = pic.genus() + 1;
    let frob = g.frob_clusters(pic);
    pic.proper_ids()
        .into_iter()
        .filter(|&s| pic.size(s) == half && frob[s] != s && frob[frob[s]] == s)
        .find_map(|s| (s < frob[s]).then_some((s, frob[s])))
}

fn require_semistable(pic: &ClusterPicture, g: &GaloisData) -> Result<()> {
    let v = check_semistability(pic, g);
    if v.semistable {
        Ok(())
    } else {
        Err(Error::NotSemistable(v.witnesses.iter().map(|w| w.reason.clone()).collect::<Vec<_>>().join("; ")))
    }
}

/// Whether y² = f(x − z) is a minimal Weierstrass model for some z, n = v(c_f).
pub fn is_minimal_model(pic: &ClusterPicture, g: &GaloisData) -> Result<Minimality> {
    require_semistable(pic, g)?;
    let gen = pic.genus();
    let n = pic.leading_valuation();
    let top = pic.top();
    let worst = pic
        .ids()
        .filter(|&s| pic.size(s) > gen + 1)
        .map(|s| pic.children(s).iter().filter(|&&c| g.is_stable(pic, c)).count() as u64)
        .max()
        .unwrap_or(0);
    let attestation = Attestation::check(
        format!("clusters of size > g+1 have at most |k|-1 stable children ({worst} found)"),
        g.residue_size,
        |k| worst < k,
    );
    let done = |minimal, certificate| Ok(Minimality { minimal, certificate, attestation: attestation.clone() });
    if let Some((a, b)) = exceptional_pair(pic, g) {
        if pic.depth(top).is_zero() && (n == 0 || n == 1) {
            return done(true, Certificate::Exceptional { clusters: [pic.path(a), pic.path(b)] });
        }
    }
    if let Some(s) = pic.ids().find(|&s| pic.size(s) > gen + 1 && pic.depth(s).is_positive()) {
        return done(
            false,
            Certificate::NotMinimal { reason: format!("{} has size > g+1 and positive depth", pic.path(s)) },
        );
    }
    let witness = pic.proper_ids().into_iter().find(|&t| {
        pic.size(t) > gen
            && !pic.depth(t).is_negative()
            && g.is_stable(pic, t)
            && q(n) == -outside_sum(pic, t)
    });
    match witness {
        Some(t) => done(true, Certificate::Witness { cluster: pic.path(t) }),
        None => done(
            false,
            Certificate::NotMinimal { reason: "no stable cluster of size >= g+1 fixes v(c_f)".into() },
        ),
    }
}

/// v(Δ_min) for a semistable curve, with the residue-field hypothesis it needs.
pub fn min_disc_valuation(pic: &ClusterPicture, g: &GaloisData) -> Result<(Q, Attestation)> {
    require_semistable(pic, g)?;
    let gen = pic.genus();
    let n = pic.leading_valuation();
    let top = pic.top();
    let e = i64::from(exceptional_pair(pic, g).is_some() && n.rem_euclid(2) == 1);
    let mut diff = q(n - e) + pic.depth(top) * q(pic.size(top) as i64 - gen as i64 - 1);
    for s in pic.proper_ids() {
        if s != top && pic.size(s) > gen + 1 {
            diff += pic.rel_depth(s).unwrap() * q(pic.size(s) as i64 - gen as i64 - 1);
        }
    }
    let att = Attestation::check(format!("|k| > {}", 2 * gen + 1), g.residue_size, |k| k > 2 * gen as u64 + 1);
    Ok((disc_valuation(pic) - diff * q(two_g_plus_one(pic) * 2), att))
}

/// d + 1 with d the largest proper depth: congruence of the monic parts modulo
/// p^{d+1} leaves every invariant unchanged.
pub fn perturbation_bound(pic: &ClusterPicture) -> i64 {
    rat::floor_i64(&pic.max_depth()) + 1
}
