//! From an explicit root list to a cluster picture with Galois annotations.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
pub use crate::galois::{GaloisData, Sign};
use crate::galois::{self, theta_classes};
use crate::padic::{self, ExtKind, Quad, QuadField};
use crate::rat::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSpec {
    Rat(Q),
    /// a + b√d
    Surd { a: Q, b: Q, d: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    pub prime: u64,
    pub leading_coefficient: Q,
    pub roots: Vec<RootSpec>,
}

/// A root set turned into exact field elements plus its cluster picture and centres.
#[derive(Clone, Debug)]
pub struct Ingested {
    pub field: QuadField,
    pub leading: Q,
    pub roots: Vec<Quad>,
    pub picture: ClusterPicture,
    /// centre z_s for every proper cluster, indexed by cluster id
    pub centres: Vec<Option<Quad>>,
    /// index of the conjugate root, for surds
    pub conjugate: Vec<Option<usize>>,
}

impl RootSet {
    pub fn field(&self) -> Result<QuadField> {
        if !padic::is_odd_prime(self.prime) {
            return Err(Error::Input(format!("{} is not an odd prime", self.prime)));
        }
        let mut d = None;
        for r in &self.roots {
            if let RootSpec::Surd { d: e, b, .. } = r {
                if b.is_zero() {
                    return Err(Error::Input("surd with b = 0; give it as a rational".into()));
                }
                match d {
                    None => d = Some(*e),
                    Some(x) if x != *e => {
                        return Err(Error::Unsupported(format!(
                            "surds over different d ({x} and {e}); one quadratic field per root set"
                        )))
                    }
                    _ => {}
                }
            }
        }
        match d {
            None => Ok(QuadField::rational(self.prime)),
            Some(d) => QuadField::new(self.prime, d),
        }
    }

    pub fn elements(&self) -> Vec<Quad> {
        self.roots
            .iter()
            .map(|r| match r {
                RootSpec::Rat(a) => Quad::rat(a.clone()),
                RootSpec::Surd { a, b, .. } => Quad { a: a.clone(), b: b.clone() },
            })
            .collect()
    }
}

/// Pairwise valuation matrix v(r_i − r_j); the diagonal is unused.
pub fn distance_matrix(field: &QuadField, roots: &[Quad]) -> Result<Vec<Vec<Q>>> {
    let n = roots.len();
    let mut m = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let diff = roots[i].sub(&roots[j]);
            if diff.is_zero() {
                return Err(Error::Input(format!("duplicate roots {i} and {j}")));
            }
            let v = field.val(&diff)?;
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Single-linkage sweep over the distinct valuation levels, highest first.
pub fn clusters_from_matrix(m: &[Vec<Q>]) -> Vec<(Vec<usize>, Q)> {
    let n = m.len();
    let mut levels: Vec<Q> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            levels.push(m[i][j].clone());
        }
    }
    levels.sort();
    levels.dedup();
    let mut found: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    for t in levels.iter().rev() {
        let mut comp: Vec<usize> = (0..n).collect();
        fn root(c: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if m[i][j] >= *t {
                    let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                    if a != b {
                        comp[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = root(&mut comp, i);
            groups.entry(r).or_default().push(i);
        }
        for g in groups.into_values() {
            if g.len() > 1 {
                found.entry(g).or_insert_with(|| t.clone());
            }
        }
    }
    found.into_iter().collect()
}

pub fn build_from_roots(rs: &RootSet) -> Result<Ingested> {
    let field = rs.field()?;
    if rs.leading_coefficient.is_zero() {
        return Err(Error::Input("leading coefficient is zero".into()));
    }
    let roots = rs.elements();
    let n = roots.len();
    let mut conjugate = vec![None; n];
    for i in 0..n {
        if !roots[i].is_rational() {
            let c = roots[i].conj();
            conjugate[i] = roots.iter().position(|r| *r == c);
            if conjugate[i].is_none() {
                return Err(Error::Input(format!("root {i} has no conjugate in the list")));
            }
        }
    }
    let m = distance_matrix(&field, &roots)?;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    assert!(m[i][k] >= m[i][j].clone().min(m[j][k].clone()), "ultrametric");
                }
            }
        }
    }
    let v = padic::val_rational(&rs.leading_coefficient, rs.prime)?;
    let proper = clusters_from_matrix(&m);
    let picture = ClusterPicture::new(n, proper, v).map_err(|vs| {
        Error::InvalidPicture(vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))
    })?;
    let mut centres = vec![None; picture.len()];
    for s in picture.proper_ids() {
        let mem = picture.members(s);
        let z = if let Some(&r) = mem.iter().find(|&&r| roots[r].is_rational()) {
            roots[r].clone()
        } else if let Some(&r) = mem.iter().find(|&&r| conjugate[r].map(|c| picture.contains(s, c)) == Some(true)) {
            Quad::rat(roots[r].a.clone())
        } else {
            roots[mem[0]].clone()
        };
        centres[s] = Some(z);
    }
    Ok(Ingested { field, leading: rs.leading_coefficient.clone(), roots, picture, centres, conjugate })
}

/// Frobenius and inertia permutations for roots in ℚ or ℚ(√d).
pub fn galois_from_roots(ing: &Ingested) -> GaloisData {
    let n = ing.roots.len();
    let mut g = GaloisData::trivial(n, ing.field.p);
    g.tame_asserted = false;
    let swap = |perm: &mut Vec<usize>| {
        for i in 0..n {
            if let Some(c) = ing.conjugate[i] {
                perm[i] = c;
            }
        }
    };
    match ing.field.kind {
        ExtKind::Ramified => swap(&mut g.inertia),
        ExtKind::Inert => swap(&mut g.frobenius),
        ExtKind::Rational | ExtKind::Split { .. } => {}
    }
    g
}

impl Ingested {
    pub fn centre(&self, s: ClusterId) -> &Quad {
        self.centres[s].as_ref().expect("centre assigned to every proper cluster")
    }

    /// T_t = c_f · Π_{r∉t} (z − r), with z a centre of t.
    pub fn theta_square(&self, t: ClusterId, z: &Quad) -> Quad {
        let mut acc = Quad::rat(self.leading.clone());
        for r in 0..self.roots.len() {
            if !self.picture.contains(t, r) {
                acc = self.field.mul(&acc, &z.sub(&self.roots[r]));
            }
        }
        acc
    }

    /// Square class of T_t: `Some(true)` if a square in the unramified extension of
    /// degree `deg` (1 or 2), `None` if v(T) is not an even integer.
    pub fn theta_is_square(&self, t: ClusterId, z: &Quad, deg: usize) -> Result<Option<bool>> {
        let tt = self.theta_square(t, z);
        let v = self.field.val(&tt)?;
        if !rat::is_even_int(&v) {
            return Ok(None);
        }
        let u = self.field.unit_residue(&tt)?.expect("integral valuation");
        if deg == 1 && !u.in_prime_field() {
            return Ok(None);
        }
        Ok(Some(u.is_square(deg == 2)))
    }
}

/// Fill in ε signs on the θ-classes of the picture.
///
/// A Frobenius-stable class gets +1 iff θ_t = √T_t lies in ℚ_p. On a swapped pair
/// (t0, t1) with t0 the lexicographically smaller, θ_{t1} is defined as Frob(θ_{t0}), so
/// ε on t0 is +1 and ε on t1 records whether Frob² fixes θ_{t0}. Classes with v(T) odd are
/// left unknown.
pub fn epsilon_signs(ing: &Ingested, g: &GaloisData) -> Result<GaloisData> {
    let pic = &ing.picture;
    let mut out = g.clone();
    let fc = GaloisData::cluster_perm(pic, &g.frobenius)?;
    let mut done = vec![false; pic.len()];
    for t in theta_classes(pic) {
        if done[t] {
            continue;
        }
        let orbit = GaloisData::orbit(&fc, t);
        for &x in &orbit {
            done[x] = true;
        }
        let z = ing.centre(t);
        match orbit.len() {
            1 => {
                let s = match ing.theta_is_square(t, z, 1)? {
                    Some(true) => Sign::Plus,
                    Some(false) => Sign::Minus,
                    None => Sign::Unknown,
                };
                out.epsilon.insert(pic.members(t).to_vec(), s);
            }
            2 => {
                let (t0, t1) = if pic.members(orbit[0]) < pic.members(orbit[1]) {
                    (orbit[0], orbit[1])
                } else {
                    (orbit[1], orbit[0])
                };
                out.epsilon.insert(pic.members(t0).to_vec(), Sign::Plus);
                let s = match ing.theta_is_square(t0, ing.centre(t0), 2)? {
                    Some(true) => Sign::Plus,
                    Some(false) => Sign::Minus,
                    None => Sign::Unknown,
                };
                out.epsilon.insert(pic.members(t1).to_vec(), s);
            }
            _ => {
                for &x in &orbit {
                    out.epsilon.insert(pic.members(x).to_vec(), Sign::Unknown);
                }
            }
        }
    }
    Ok(out)
}

/// Everything at once: picture, permutations and signs.
pub fn ingest(rs: &RootSet) -> Result<(Ingested, GaloisData)> {
    let ing = build_from_roots(rs)?;
    let g = galois_from_roots(&ing);
    g.validate(&ing.picture)?;
    let g = epsilon_signs(&ing, &g)?;
    Ok((ing, g))
}

pub fn cycles_of(g: &GaloisData) -> Vec<Vec<usize>> {
    galois::cycles(&g.frobenius).into_iter().filter(|c| c.len() > 1).collect()
}
