//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use clusterpic::cluster::ClusterId;
use clusterpic::equivalence::{redistribute_range, Move};
use clusterpic::linalg::Mat;
use clusterpic::rat::{q, Q};
use clusterpic::{ClusterPicture, GaloisData, RootSet, RootSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn rel_depth(rng: &mut ChaCha8Rng) -> Q {
    let &(a, b) = [(1, 2), (1, 1), (3, 2), (2, 1), (1, 3), (5, 2)].choose(rng).unwrap();
    Q::new(BigInt::from(a), BigInt::from(b))
}

fn split(roots: &[usize], depth: Q, rng: &mut ChaCha8Rng, out: &mut Vec<(Vec<usize>, Q)>) {
    if roots.len() < 2 {
        return;
    }
    out.push((roots.to_vec(), depth.clone()));
    let k = rng.gen_range(2..=roots.len());
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &r) in roots.iter().enumerate() {
        let j = if i < k { i } else { rng.gen_range(0..k) };
        parts[j].push(r);
    }
    for mut p in parts {
        p.sort_unstable();
        let d = &depth + rel_depth(rng);
        split(&p, d, rng, out);
    }
}

/// Random picture on `lo..=hi` roots with shuffled root labels.
pub fn random_picture(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> ClusterPicture {
    let n = rng.gen_range(lo..=hi);
    let mut roots: Vec<usize> = (0..n).collect();
    roots.shuffle(rng);
    let top = Q::new(rng.gen_range(-2..=2).into(), BigInt::from(*[1, 2].choose(rng).unwrap()));
    let mut proper = Vec::new();
    split(&roots, top, rng, &mut proper);
    ClusterPicture::new(n, proper.clone(), rng.gen_range(-1..=3)).unwrap_or_else(|v| panic!("{proper:?}: {v:?}"))
}

/// Residue arithmetic for the Puiseux fuzzer: 𝔽_P with P ≡ 1 mod 12, so μ_2, μ_3, μ_4 exist.
const P: u64 = 10009;

fn zeta(e: u64) -> u64 {
    let pow = |mut b: u64, mut x: u64| {
        let mut acc = 1u64;
        while x > 0 {
            if x & 1 == 1 {
                acc = acc * b % P;
            }
            b = b * b % P;
            x >>= 1;
        }
        acc
    };
    (2..P)
        .map(|a| pow(a, (P - 1) / e))
        .find(|&z| (1..e).all(|k| pow(z, k) != 1))
        .unwrap()
}

/// Finite Puiseux series Σ a_k π^{(k−OFFSET)/e}.
const OFFSET: usize = 4;
const TERMS: usize = 20;

/// A tame Galois-stable set of lo..=hi roots: random series in π^{1/e} closed under the
/// inertia generator π^{1/e} ↦ ζ_e π^{1/e}. Returns the picture with a random leading
/// valuation and data carrying that inertia permutation; Frobenius is left trivial.
pub fn puiseux_curve(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Option<(ClusterPicture, GaloisData)> {
    let e = *[1u64, 2, 2, 3, 4].choose(rng).unwrap();
    let z = zeta(e);
    let act = |r: &Vec<u64>| -> Vec<u64> {
        let mut out = r.clone();
        // term k carries π^{(k−OFFSET)/e}, so it picks up ζ^{k−OFFSET}
        let mut zk = (0..(e as usize - OFFSET % e as usize) % e as usize).fold(1, |acc, _| acc * z % P);
        for a in out.iter_mut() {
            *a = *a * zk % P;
            zk = zk * z % P;
        }
        out
    };
    let target = rng.gen_range(lo..=hi);
    let mut roots: Vec<Vec<u64>> = Vec::new();
    for _ in 0..40 {
        if roots.len() >= target {
            break;
        }
        let mut seed = match roots.choose(rng) {
            Some(base) if rng.gen_bool(0.7) => {
                let cut = rng.gen_range(0..TERMS);
                let mut s = base.clone();
                s[cut..].iter_mut().for_each(|a| *a = 0);
                s
            }
            _ => vec![0; TERMS],
        };
        for k in 0..TERMS {
            if seed[k] == 0 && rng.gen_ratio(1, 4) {
                seed[k] = rng.gen_range(1..P);
            }
        }
        let mut orbit = vec![seed.clone()];
        let mut x = act(&seed);
        while x != seed {
            orbit.push(x.clone());
            x = act(&x);
        }
        if orbit.iter().any(|o| roots.contains(o)) || roots.len() + orbit.len() > hi {
            continue;
        }
        roots.extend(orbit);
    }
    if roots.len() < lo {
        return None;
    }
    let n = roots.len();
    let dist = |a: &Vec<u64>, b: &Vec<u64>| {
        let k = (0..TERMS).find(|&k| a[k] != b[k]).expect("distinct roots");
        Q::new(BigInt::from(k as i64 - OFFSET as i64), BigInt::from(e))
    };
    let m: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { Q::zero() } else { dist(&roots[i], &roots[j]) }).collect()).collect();
    let proper = clusterpic::ingest::clusters_from_matrix(&m);
    let pic = ClusterPicture::new(n, proper, rng.gen_range(-1..=2)).ok()?;
    let mut g = GaloisData::trivial(n, 7);
    g.inertia = roots.iter().map(|r| roots.iter().position(|x| *x == act(r)).unwrap()).collect();
    g.validate(&pic).ok()?;
    Some((pic, g))
}

/// Pairwise form of v(Δ_{Σ,n}) computed straight from leaf meets.
pub fn disc_by_pairs(pic: &ClusterPicture, n: i64) -> Q {
    let r = pic.root_count();
    let g = (r - 1) / 2;
    let mut acc = q(n * (4 * g as i64 + 2));
    for i in 0..r {
        for j in i + 1..r {
            acc += pic.depth(pic.meet(pic.leaf(i), pic.leaf(j))) * q(2);
        }
    }
    acc
}

/// A random move that applies to the picture, if one is found in a few tries.
pub fn random_move(pic: &ClusterPicture, rng: &mut ChaCha8Rng) -> Option<Move> {
    let n = pic.root_count();
    let top = pic.top();
    for _ in 0..8 {
        match rng.gen_range(0..4) {
            0 => return Some(Move::Shift(Q::new(rng.gen_range(-4..=4).into(), 2.into()))),
            1 if n % 2 == 1 => return Some(Move::AddRoot),
            2 if n % 2 == 0 && n > 5 => {
                let singles: Vec<usize> = pic
                    .children(top)
                    .iter()
                    .filter(|&&c| pic.size(c) == 1)
                    .map(|&c| pic.members(c)[0])
                    .filter(|&x| {
                        let rest: Vec<usize> = (0..n).filter(|&y| y != x).collect();
                        pic.find(&rest).is_none()
                    })
                    .collect();
                if let Some(&r) = singles.choose(rng) {
                    return Some(Move::RemoveRoot(r));
                }
            }
            3 if n % 2 == 0 => {
                let kids: Vec<ClusterId> = pic.children(top).to_vec();
                let s = *kids.choose(rng).unwrap();
                let (lo, hi) = redistribute_range(pic, s);
                let lo = lo.unwrap_or(q(-3));
                let hi = hi.unwrap_or(q(3));
                if lo > hi {
                    continue;
                }
                // pick a point of lo + (hi − lo)·k/4
                let m = &lo + (&hi - &lo) * Q::new(rng.gen_range(0..=4).into(), 4.into());
                return Some(Move::Redistribute { s: pic.members(s).to_vec(), m });
            }
            _ => {}
        }
    }
    None
}

// ---------- polynomials and discriminants ----------

pub type Poly = Vec<BigRational>;

/// c·∏(x − r), coefficients low to high.
pub fn poly_from_roots(c: &Q, roots: &[Q]) -> Poly {
    let mut p: Poly = vec![c.clone()];
    for r in roots {
        let mut next = vec![BigRational::zero(); p.len() + 1];
        for (i, a) in p.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        p = next;
    }
    p
}

pub fn derivative(p: &Poly) -> Poly {
    p.iter().enumerate().skip(1).map(|(i, a)| a * BigRational::from_integer(BigInt::from(i))).collect()
}

fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut acc = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            acc = -acc;
        }
        let p = m[col][col].clone();
        acc *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    acc
}

/// Res(f, g) as the Sylvester determinant.
pub fn resultant(f: &Poly, g: &Poly) -> BigRational {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut s = vec![vec![BigRational::zero(); size]; size];
    for i in 0..n {
        for (j, a) in f.iter().rev().enumerate() {
            s[i][i + j] = a.clone();
        }
    }
    for i in 0..m {
        for (j, a) in g.iter().rev().enumerate() {
            s[n + i][i + j] = a.clone();
        }
    }
    det(s)
}

pub fn val(x: &BigRational, p: u64) -> i64 {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut k = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    count(x.numer().abs()) - count(x.denom().abs())
}

/// Valuation of the curve discriminant c^{4g+2}∏(r−r')² from the resultant of f and f'.
pub fn resultant_disc_valuation(c: &Q, roots: &[Q], p: u64) -> i64 {
    let f = poly_from_roots(c, roots);
    let n = roots.len() as i64;
    let g = (n - 1) / 2;
    let res = resultant(&f, &derivative(&f));
    // disc(f) = ±Res(f, f')/c carries c^{2n−2}
    let vdisc = val(&res, p) - val(c, p);
    vdisc + (4 * g + 2 - (2 * n - 2)) * val(c, p)
}

/// Random rational roots whose p-adic digits at positions −2..=4 come from a small
/// alphabet, so roots share expansions and form clusters.
pub fn random_roots(rng: &mut ChaCha8Rng, p: u64, count: usize) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    while out.len() < count {
        let mut x = Q::zero();
        for k in -2i32..=4 {
            let digit = match rng.gen_range(0..10) {
                0..=5 => 0,
                6..=7 => 1,
                8 => 2,
                _ => (p - 1) as i64,
            };
            if digit != 0 {
                x += Q::from_integer(digit.into()) * Q::new(BigInt::from(p), 1.into()).pow(k);
            }
        }
        if !x.is_zero() && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn random_leading(rng: &mut ChaCha8Rng, p: u64) -> Q {
    let u = rng.gen_range(1..p as i64);
    Q::from_integer(u.into()) * Q::new(BigInt::from(p), 1.into()).pow(rng.gen_range(-1..=2))
}

pub fn root_set(p: u64, c: &Q, roots: &[Q]) -> RootSet {
    RootSet { prime: p, leading_coefficient: c.clone(), roots: roots.iter().cloned().map(RootSpec::Rat).collect() }
}

// ---------- component group ----------

/// Row echelon basis (upper triangular, positive pivots) of the ℤ-span of the rows.
fn hermite(rows: &Mat) -> Vec<Vec<i128>> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut basis = Vec::new();
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (0..m.len()).filter(|&i| m[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
            for &i in &nz {
                if i != piv {
                    let f = m[i][col] / m[piv][col];
                    let prow = m[piv].clone();
                    for (a, b) in m[i].iter_mut().zip(&prow) {
                        *a -= f * b;
                    }
                }
            }
        }
        if let Some(i) = (0..m.len()).find(|&i| m[i][col] != 0) {
            let mut row = m.remove(i);
            if row[col] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(row);
        }
    }
    basis
}

fn reduce(basis: &[Vec<i128>], mut x: Vec<i128>) -> Vec<i128> {
    for (i, b) in basis.iter().enumerate() {
        let k = x[i].div_euclid(b[i]);
        for (a, c) in x.iter_mut().zip(b) {
            *a -= k * c;
        }
    }
    x
}

/// |Φ^Frob| with Φ = ℤ^r / Gram·ℤ^r and Frobenius acting by F^{-T}: count classes x with
/// F^T x ≡ x, enumerating the Hermite box.
pub fn tamagawa_brute(gram: &Mat, frob: &Mat) -> u64 {
    let r = gram.len();
    if r == 0 {
        return 1;
    }
    let basis = hermite(gram);
    assert_eq!(basis.len(), r, "singular pairing");
    let mods: Vec<i128> = (0..r).map(|i| basis[i][i]).collect();
    let mut x = vec![0i128; r];
    let mut fixed = 0;
    loop {
        let ft: Vec<i128> = (0..r).map(|i| (0..r).map(|j| frob[j][i] as i128 * x[j]).sum::<i128>() - x[i]).collect();
        if reduce(&basis, ft).iter().all(|&v| v == 0) {
            fixed += 1;
        }
        let mut i = 0;
        loop {
            if i == r {
                return fixed;
            }
            x[i] += 1;
            if x[i] < mods[i] {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Random signs on every θ-class, allowed when Frobenius is trivial.
pub fn random_signs(pic: &ClusterPicture, g: &mut GaloisData, rng: &mut ChaCha8Rng) {
    for t in clusterpic::galois::theta_classes(pic) {
        let s = if rng.gen_bool(0.5) { clusterpic::Sign::Plus } else { clusterpic::Sign::Minus };
        g.set_sign(pic, t, s).unwrap();
    }
}
