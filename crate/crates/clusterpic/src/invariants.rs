//! Conductor exponents, Tamagawa number, root number and deficiency.

use std::collections::BTreeSet;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
use crate::galois::{GaloisData, Sign};
use crate::graph::DualGraph;
use crate::homology::{a_set, HomologyLattice};
use crate::linalg::{self, Mat};
use crate::rat::{self, Q};
use crate::semistability::check_semistability;

fn require_semistable(pic: &ClusterPicture, g: &GaloisData) -> Result<()> {
    if check_semistability(pic, g).semistable {
        Ok(())
    } else {
        Err(Error::NotSemistable("the semistability criterion fails".into()))
    }
}

/// n_C = #A − [R übereven].
pub fn conductor_semistable(pic: &ClusterPicture, g: &GaloisData) -> Result<u64> {
    require_semistable(pic, g)?;
    let a = a_set(pic).len();
    Ok((a - usize::from(pic.is_ubereven(pic.top()))) as u64)
}

/// ξ_s(a) = ord₂ of the denominator of |I/I_s|·a.
fn xi(orbit: usize, a: &Q) -> u32 {
    rat::ord2_denom(&(a * rat::q(orbit as i64)))
}

fn count_orbits(ids: &[ClusterId], perm: &[ClusterId]) -> usize {
    let set: BTreeSet<ClusterId> = ids.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut n = 0;
    for &s in ids {
        if seen.contains(&s) {
            continue;
        }
        n += 1;
        for x in GaloisData::orbit(perm, s) {
            debug_assert!(set.contains(&x));
            seen.insert(x);
        }
    }
    n
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TameConductor {
    pub tame: u64,
    pub invariant_dimension: u64,
    pub u_orbits: usize,
    pub v_orbits: usize,
}

/// The tame part 2g − dim H¹(C)^{I_K} for a tame K(R)/K.
pub fn conductor_tame_general(pic: &ClusterPicture, g: &GaloisData) -> Result<TameConductor> {
    if !g.tame {
        return Err(Error::Precondition("the tame conductor formula needs K(R)/K tame".into()));
    }
    let top = pic.top();
    let ic = g.inertia_clusters(pic);
    let orb = |s: ClusterId| GaloisData::orbit(&ic, s).len();
    let u: Vec<ClusterId> = pic
        .ids()
        .filter(|&s| s != top && pic.is_odd(s))
        .filter(|&s| {
            let p = pic.parent(s).unwrap();
            xi(orb(p), &pic.lambda_tilde(p)) <= xi(orb(p), pic.depth(p))
        })
        .collect();
    // the printed condition on V reads ξ_{P(s)}(λ̃_{P(s)}); it has to be ξ_s(λ̃_s), as R ∈ V
    let v: Vec<ClusterId> = pic
        .proper_ids()
        .into_iter()
        .filter(|&s| !pic.is_ubereven(s) && xi(orb(s), &pic.lambda_tilde(s)) == 0)
        .collect();
    let (uo, vo) = (count_orbits(&u, &ic), count_orbits(&v, &ic));
    let corr = usize::from(pic.is_even(top) && pic.leading_valuation() % 2 == 0);
    let dim = uo as i64 - vo as i64 - corr as i64;
    let two_g = 2 * pic.genus() as i64;
    if dim < 0 || dim > two_g {
        return Err(Error::InvalidPicture(format!("inertia invariants of dimension {dim}")));
    }
    Ok(TameConductor { tame: (two_g - dim) as u64, invariant_dimension: dim as u64, u_orbits: uo, v_orbits: vo })
}

/// Σ over root orbits of v(Δ_{K(r)/K}) − [K(r):K] + f_{K(r)/K}.
pub fn conductor_wild(orbits: &[(i64, i64, i64)]) -> Result<u64> {
    let mut acc = 0;
    for &(v, n, f) in orbits {
        let t = v - n + f;
        if t < 0 || n <= 0 || f <= 0 || n % f != 0 {
            return Err(Error::Input(format!("inconsistent root field data ({v}, {n}, {f})")));
        }
        acc += t;
    }
    Ok(acc as u64)
}

/// Frobenius-fixed points of Φ = coker(gram), counted by enumeration in Smith coordinates.
pub fn tamagawa(hl: &HomologyLattice) -> Result<u64> {
    tamagawa_of(&hl.gram, &hl.frob)
}

pub fn tamagawa_of(gram: &Mat, frob: &Mat) -> Result<u64> {
    let r = gram.len();
    if r == 0 {
        return Ok(1);
    }
    if linalg::det(gram) == 0 {
        return Err(Error::InvalidPicture("singular length pairing".into()));
    }
    let s = linalg::smith(gram);
    // Frob acts on Hom(H₁, ℤ) by F^{-T}; move it to the Smith coordinates y = U z
    let finv = linalg::inverse_unimodular(frob).ok_or_else(|| Error::InvalidPicture("Frobenius is not invertible".into()))?;
    let uinv = linalg::inverse_unimodular(&s.u).expect("Smith transform is unimodular");
    let act = linalg::mul(&linalg::mul(&s.u, &linalg::transpose(&finv)), &uinv);
    let mods: Vec<i64> = s.d.clone();
    let total: i64 = mods.iter().product();
    let mut fixed = 0u64;
    let mut y = vec![0i64; r];
    for _ in 0..total {
        let img = linalg::mul_vec(&act, &y);
        if img.iter().zip(&y).zip(&mods).all(|((a, b), m)| (a - b).rem_euclid(*m) == 0) {
            fixed += 1;
        }
        // odometer
        for i in 0..r {
            y[i] += 1;
            if y[i] < mods[i] {
                break;
            }
            y[i] = 0;
        }
    }
    Ok(fixed)
}

/// w = (−1)^a with a the dimension of the Frobenius-fixed part of H₁ ⊗ ℚ.
pub fn root_number(hl: &HomologyLattice) -> i8 {
    if linalg::fixed_rank(&hl.frob) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn frob_orbit_even(fc: &[ClusterId], s: ClusterId) -> bool {
    GaloisData::orbit(fc, s).len() % 2 == 0
}

/// Deficiency from the cluster clauses.
pub fn deficiency(pic: &ClusterPicture, g: &GaloisData) -> Result<bool> {
    require_semistable(pic, g)?;
    if pic.genus() % 2 == 1 {
        return Ok(false);
    }
    let top = pic.top();
    let fc = g.frob_clusters(pic);
    let kids = pic.children(top);
    // (1) two odd conjugate halves with odd relative depth
    if kids.len() == 2 && kids.iter().all(|&c| pic.is_proper(c) && pic.is_odd(c)) && fc[kids[0]] == kids[1] {
        let d = pic.rel_depth(kids[0]).unwrap();
        if rat::is_int(&d) && !rat::is_even_int(&d) {
            return Ok(true);
        }
    }
    let sign = |s: ClusterId| -> Result<Sign> {
        match g.eps(pic, s) {
            Sign::Unknown => Err(Error::UnknownSign(vec![pic.path(pic.star(s))])),
            x => Ok(x),
        }
    };
    let all_bad = |anchor: ClusterId| {
        pic.proper_ids()
            .into_iter()
            .filter(|&s| pic.star(s) == anchor && !pic.is_ubereven(s))
            .all(|s| !rat::is_int(pic.depth(s)) || frob_orbit_even(&fc, s))
    };
    // (2)
    if pic.is_ubereven(top) && sign(top)? == Sign::Minus && all_bad(top) {
        return Ok(true);
    }
    // (3), read over non-übereven s with s* = r, like (2); this takes in R itself
    if pic.is_cotwin(top) {
        let r = pic.star(top);
        if pic.is_ubereven(r) && pic.is_principal(r) && sign(r)? == Sign::Minus && all_bad(r) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Deficiency read from the graph: even genus and every component (vertex or interior
/// P¹ of a chain) in a Frobenius orbit of even length.
pub fn deficiency_from_graph(dg: &DualGraph) -> Result<bool> {
    let f = dg.frobenius.as_ref().ok_or_else(|| Error::Precondition("graph has no Frobenius action".into()))?;
    if dg.genus % 2 == 1 {
        return Ok(false);
    }
    let orbit_len = |step: &dyn Fn((usize, u64)) -> (usize, u64), start: (usize, u64)| {
        let mut x = step(start);
        let mut n = 1;
        while x != start {
            x = step(x);
            n += 1;
        }
        n
    };
    let vstep = |(v, _): (usize, u64)| (f.vertex[v], 0);
    for v in 0..dg.vertices.len() {
        if orbit_len(&vstep, (v, 0)) % 2 == 1 {
            return Ok(false);
        }
    }
    let cstep = |(c, i): (usize, u64)| {
        let (t, o) = f.chain[c];
        let len = dg.chains[c].length;
        (t, if o > 0 { i } else { len - i })
    };
    for (c, ch) in dg.chains.iter().enumerate() {
        for i in 1..ch.length {
            if orbit_len(&cstep, (c, i)) % 2 == 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::from_cycles;
    use crate::graph::dual_graph;
    use crate::homology::homology_lattice;
    use crate::notation::{apply_signs, parse_bracket};

    fn curve(s: &str, v: i64, frob: &[Vec<usize>]) -> (ClusterPicture, GaloisData) {
        let parsed = parse_bracket(s).unwrap();
        let pic = parsed.picture.with_leading_valuation(v);
        let mut g = GaloisData::trivial(pic.root_count(), 7);
        g.frobenius = from_cycles(pic.root_count(), frob).unwrap();
        apply_signs(&pic, &mut g, &parsed.signs).unwrap();
        (pic, g)
    }

    #[test]
    fn example_1_2() {
        for (sign, w) in [("-", 1), ("+", -1)] {
            let (pic, g) = curve(&format!("[[r r r]_2 [r [r r r]_2]_1^{sign}]_0"), 0, &[]);
            assert_eq!(conductor_semistable(&pic, &g).unwrap(), 1);
            let t = conductor_tame_general(&pic, &g).unwrap();
            assert_eq!((t.u_orbits, t.v_orbits, t.invariant_dimension, t.tame), (9, 4, 5, 1));
            let hl = homology_lattice(&pic, &g).unwrap();
            assert_eq!(tamagawa(&hl).unwrap(), 2);
            assert_eq!(root_number(&hl), w);
            assert!(!deficiency(&pic, &g).unwrap());
        }
    }

    #[test]
    fn one_twin_tamagawa() {
        for n in 1..6i64 {
            for (sign, c, w) in [("+", n, -1), ("-", num_integer::gcd(2, n), 1)] {
                let (pic, g) = curve(&format!("[[r r]_{n}/2^{sign} r r r]_0"), 0, &[]);
                let hl = homology_lattice(&pic, &g).unwrap();
                assert_eq!(tamagawa(&hl).unwrap(), c as u64, "n={n} sign={sign}");
                assert_eq!(root_number(&hl), w);
            }
        }
    }

    #[test]
    fn wild_sums() {
        assert_eq!(conductor_wild(&[(0, 2, 2), (0, 1, 1)]).unwrap(), 0);
        assert_eq!(conductor_wild(&[(2, 3, 1)]).unwrap(), 0);
        assert_eq!(conductor_wild(&[(3, 3, 1)]).unwrap(), 1);
        assert!(conductor_wild(&[(0, 3, 1)]).is_err());
    }

    #[test]
    fn ramified_twin_tame_conductor() {
        // twin {±√p}-like: inertia swaps the twin, δ = 1/2
        let (pic, mut g) = curve("[[r r]_1/2 r r r]_0", 0, &[]);
        g.inertia = from_cycles(5, &[vec![0, 1]]).unwrap();
        let t = conductor_tame_general(&pic, &g).unwrap();
        assert_eq!(t.tame, 1);
        // quadratic twist of good reduction: no inertia invariants
        let (pic, g) = curve("[r r r r r]_0", 1, &[]);
        let t = conductor_tame_general(&pic, &g).unwrap();
        assert_eq!((t.invariant_dimension, t.tame), (0, 4));
    }

    #[test]
    fn deficiency_clauses_match_graph() {
        let cases: Vec<(&str, Vec<Vec<usize>>, bool)> = vec![
            ("[[r r r]_1 [r r r]_1]_0", vec![vec![0, 3], vec![1, 4], vec![2, 5]], true),
            ("[[r r r]_2 [r r r]_2]_0", vec![vec![0, 3], vec![1, 4], vec![2, 5]], false),
            ("[[r r r]_1 [r r r]_1]_0", vec![], false),
            ("[[r r]_1/2 [r r]_1/2 [r r]_1/2]_0^-", vec![], true),
            ("[[r r]_1 [r r]_1/2 [r r]_1/2]_0^-", vec![], false),
            ("[[r r]_1 [r r]_1 [r r]_1/2]_0^-", vec![vec![0, 2], vec![1, 3]], true),
            ("[[r r]_1/2 [r r]_1/2 [r r]_1/2]_0^+", vec![], false),
        ];
        for (s, frob, want) in cases {
            let v = if s.starts_with("[[r r r]_1") { 1 } else { 0 };
            let (pic, g) = curve(s, v, &frob);
            assert!(check_semistability(&pic, &g).semistable, "{s}");
            let dg = dual_graph(&pic, &g).unwrap();
            assert_eq!(deficiency(&pic, &g).unwrap(), want, "{s}");
            assert_eq!(deficiency_from_graph(&dg).unwrap(), want, "{s} graph");
        }
    }

    #[test]
    fn cotwin_top_deficiency() {
        for (sign, want) in [("-", true), ("+", false)] {
            let (pic, mut g) = curve(&format!("[[[r r]_1/2 [r r]_1/2]_1/2^{sign} r r]_1/2"), 1, &[]);
            g.inertia = from_cycles(6, &[vec![4, 5]]).unwrap();
            assert!(pic.is_cotwin(pic.top()));
            let dg = dual_graph(&pic, &g).unwrap();
            assert_eq!(deficiency(&pic, &g).unwrap(), want);
            assert_eq!(deficiency_from_graph(&dg).unwrap(), want);
        }
    }
}
