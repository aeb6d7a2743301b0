//! Semistable genus 2 reduction types: classification from the dual graph, the
//! closed-form invariant table, and representative pictures per family.

use num_traits::Signed;
use serde::Serialize;

use crate::cluster::ClusterPicture;
use crate::error::{Error, Result};
use crate::galois::{from_cycles, GaloisData, Sign};
use crate::graph::{count_components, dual_graph};
use crate::homology::homology_lattice;
use crate::invariants::{conductor_semistable, deficiency, root_number, tamagawa};
use crate::weierstrass::min_disc_valuation;
use crate::label::core_graph;
use crate::notation::parse_bracket;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Two,
    OneXOne,
    OneXTildeOne,
    OneN(Sign),
    OneXIn(Sign),
    Inm(Sign, Sign),
    Inn(Sign),
    U(Sign),
    Unnk(Sign),
    Unnn(Sign),
    InXIm(Sign, Sign),
    InXTildeIn(Sign),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub r: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Genus2Type {
    pub label: String,
    pub family: String,
    pub params: Params,
}

/// One row of the genus 2 invariant table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub components: u64,
    pub conductor: u64,
    pub root_number: i8,
    pub tamagawa: u64,
    pub deficient: bool,
    pub min_disc: u64,
}

const P: Sign = Sign::Plus;
const M: Sign = Sign::Minus;

fn sub(x: u64) -> String {
    if x < 10 {
        x.to_string()
    } else {
        format!("{{{x}}}")
    }
}

impl Family {
    pub fn all() -> Vec<Family> {
        use Family::*;
        vec![
            Two,
            OneXOne,
            OneXTildeOne,
            OneN(P),
            OneN(M),
            OneXIn(P),
            OneXIn(M),
            Inm(P, P),
            Inm(P, M),
            Inm(M, M),
            Inn(P),
            Inn(M),
            U(P),
            U(M),
            Unnk(P),
            Unnk(M),
            Unnn(P),
            Unnn(M),
            InXIm(P, P),
            InXIm(P, M),
            InXIm(M, M),
            InXTildeIn(P),
            InXTildeIn(M),
        ]
    }

    /// Parameters the family depends on, out of n, m, k, r.
    pub fn uses(self) -> [bool; 4] {
        use Family::*;
        match self {
            Two => [false, false, false, false],
            OneXOne | OneXTildeOne => [false, false, false, true],
            OneN(_) | Inn(_) | Unnn(_) => [true, false, false, false],
            OneXIn(_) | InXTildeIn(_) => [true, false, false, true],
            Inm(..) => [true, true, false, false],
            U(_) => [true, true, true, false],
            Unnk(_) => [true, false, true, false],
            InXIm(..) => [true, true, false, true],
        }
    }

    /// Name with symbolic parameters, as in the table.
    pub fn name(self) -> String {
        self.render(None)
    }

    pub fn label(self, p: &Params) -> String {
        self.render(Some(p))
    }

    fn render(self, p: Option<&Params>) -> String {
        use Family::*;
        let v = |c: char, x: fn(&Params) -> u64| p.map_or(c.to_string(), |p| sub(x(p)));
        let (n, m, r) = (v('n', |p| p.n), v('m', |p| p.m), v('r', |p| p.r));
        let plain = |c: char, x: fn(&Params) -> u64| p.map_or(c.to_string(), |p| x(p).to_string());
        let (pn, pm, pk) = (plain('n', |p| p.n), plain('m', |p| p.m), plain('k', |p| p.k));
        let s = |x: Sign| x.symbol();
        match self {
            Two => "2".into(),
            OneXOne => format!("1x_{r} 1"),
            OneXTildeOne => format!("1x~_{r} 1"),
            OneN(e) => format!("1_{n}^{}", s(e)),
            OneXIn(e) => format!("1x_{r} I_{n}^{}", s(e)),
            Inm(e, d) => format!("I_{{{pn},{pm}}}^{{{},{}}}", s(e), s(d)),
            Inn(e) => format!("I_{{{pn}~{pn}}}^{}", s(e)),
            U(e) => format!("U_{{{pn},{pm},{pk}}}^{}", s(e)),
            Unnk(e) => format!("U_{{{pn}~{pn},{pk}}}^{}", s(e)),
            Unnn(e) => format!("U_{{{pn}~{pn}~{pn}}}^{}", s(e)),
            InXIm(e, d) => format!("I_{n}^{} x_{r} I_{m}^{}", s(e), s(d)),
            InXTildeIn(e) => format!("I_{n}^{} x~_{r} I_{n}", s(e)),
        }
    }

    /// Parameter order used in labels: U lengths ascending, equal-sign pairs with n ≤ m.
    pub fn normalize(self, p: Params) -> Params {
        use Family::*;
        match self {
            U(_) => {
                let mut v = [p.n, p.m, p.k];
                v.sort_unstable();
                Params { n: v[0], m: v[1], k: v[2], r: p.r }
            }
            Inm(e, d) | InXIm(e, d) if e == d && p.m < p.n => Params { n: p.m, m: p.n, ..p },
            _ => p,
        }
    }

    pub fn from_name(name: &str) -> Result<Family> {
        Family::all()
            .into_iter()
            .find(|f| f.name() == name.trim())
            .ok_or_else(|| Error::Input(format!("unknown genus 2 type {name:?}")))
    }
}

fn tilde(x: u64) -> u64 {
    if x % 2 == 0 {
        2
    } else {
        1
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

/// Closed-form invariants of a family at the given parameters.
pub fn table_invariants(f: Family, p: &Params) -> TableRow {
    use Family::*;
    let Params { n, m, k, r } = *p;
    let rb = r % 2;
    let row = |components, conductor, root_number, tamagawa, deficient, min_disc| TableRow {
        components,
        conductor,
        root_number,
        tamagawa,
        deficient,
        min_disc,
    };
    let t = n * m + n * k + m * k;
    let d = gcd(gcd(n, m), k);
    match f {
        Two => row(1, 0, 1, 1, false, 0),
        OneXOne => row(r + 1, 0, 1, 1, false, 12 * r),
        OneXTildeOne => row(r + 1, 0, 1, 1, rb == 1, 12 * r + 10 * rb),
        OneN(P) => row(n, 1, -1, n, false, n),
        OneN(_) => row(n, 1, 1, tilde(n), false, n),
        OneXIn(P) => row(n + r, 1, -1, n, false, 12 * r + n),
        OneXIn(_) => row(n + r, 1, 1, tilde(n), false, 12 * r + n),
        Inm(P, P) => row(n + m - 1, 2, 1, n * m, false, n + m),
        Inm(P, _) => row(n + m - 1, 2, -1, n * tilde(m), false, n + m),
        Inm(..) => row(n + m - 1, 2, 1, tilde(n) * tilde(m), false, n + m),
        Inn(P) => row(2 * n - 1, 2, -1, n, false, 2 * n),
        Inn(_) => row(2 * n - 1, 2, 1, tilde(n), false, 2 * n),
        U(P) => row(n + m + k - 1, 2, 1, t, false, n + m + k),
        U(_) => row(n + m + k - 1, 2, 1, tilde(t / d) * tilde(d), n * m * k % 2 == 1, n + m + k),
        Unnk(P) => row(2 * n + k - 1, 2, -1, n + 2 * k, false, 2 * n + k),
        Unnk(_) => row(2 * n + k - 1, 2, -1, n, k % 2 == 1, 2 * n + k),
        Unnn(P) => row(3 * n - 1, 2, 1, 3, false, 3 * n),
        Unnn(_) => row(3 * n - 1, 2, 1, 1, n % 2 == 1, 3 * n),
        InXIm(P, P) => row(n + m + r - 1, 2, 1, n * m, false, 12 * r + n + m),
        InXIm(P, _) => row(n + m + r - 1, 2, -1, n * tilde(m), false, 12 * r + n + m),
        InXIm(..) => row(n + m + r - 1, 2, 1, tilde(n) * tilde(m), false, 12 * r + n + m),
        InXTildeIn(P) => row(2 * n + r - 1, 2, -1, n, rb == 1, 12 * r + 2 * n + 10 * rb),
        InXTildeIn(_) => row(2 * n + r - 1, 2, 1, tilde(n), rb == 1, 12 * r + 2 * n + 10 * rb),
    }
}

fn half(x: u64) -> String {
    if x % 2 == 0 {
        (x / 2).to_string()
    } else {
        format!("{x}/2")
    }
}

/// A curve of the family: picture, v(c_f), Frobenius and signs. With r = 0 the r-families
/// collapse onto their r-less relatives.
pub fn representative(f: Family, p: &Params) -> Result<(ClusterPicture, GaloisData)> {
    use Family::*;
    let Params { n, m, k, r } = *p;
    let (hn, hm, hk) = (half(n), half(m), half(k));
    let swap3 = vec![vec![0, 3], vec![1, 4], vec![2, 5]];
    let twins12 = vec![vec![0, 2], vec![1, 3]];
    // (picture, v(c_f), Frobenius cycles, signs by root set)
    let (pic, v, frob, signs): (String, i64, Vec<Vec<usize>>, Vec<(Vec<usize>, Sign)>) = match (f, r) {
        (Two, _) | (OneXOne | OneXTildeOne, 0) => ("[r r r r r]_0".into(), 0, vec![], vec![]),
        (OneXOne, _) => (format!("[[r r r]_{r} [r r r]_{r}]_0"), (r % 2) as i64, vec![], vec![]),
        (OneXTildeOne, _) => (format!("[[r r r]_{r} [r r r]_{r}]_0"), (r % 2) as i64, swap3, vec![]),
        (OneN(e), _) | (OneXIn(e), 0) => (format!("[[r r]_{hn} r r r]_0"), 0, vec![], vec![(vec![0, 1], e)]),
        (OneXIn(e), _) => {
            (format!("[[r r r]_{r} [[r r]_{hn} r]_{r}]_0"), (r % 2) as i64, vec![], vec![(vec![3, 4], e)])
        }
        (Inm(e, d), _) | (InXIm(e, d), 0) => {
            (format!("[[r r]_{hn} [r r]_{hm} r r]_0"), 0, vec![], vec![(vec![0, 1], e), (vec![2, 3], d)])
        }
        (Inn(e), _) | (InXTildeIn(e), 0) => (
            format!("[[r r]_{hn} [r r]_{hn} r r]_0"),
            0,
            twins12,
            vec![(vec![0, 1], Sign::Plus), (vec![2, 3], e)],
        ),
        (U(e), _) => (format!("[[r r]_{hn} [r r]_{hm} [r r]_{hk}]_0"), 0, vec![], vec![((0..6).collect(), e)]),
        (Unnk(e), _) => (format!("[[r r]_{hn} [r r]_{hn} [r r]_{hk}]_0"), 0, twins12, vec![((0..6).collect(), e)]),
        (Unnn(e), _) => (
            format!("[[r r]_{hn} [r r]_{hn} [r r]_{hn}]_0"),
            0,
            vec![vec![0, 2, 4], vec![1, 3, 5]],
            vec![((0..6).collect(), e)],
        ),
        (InXIm(e, d), _) => (
            format!("[[[r r]_{hn} r]_{r} [[r r]_{hm} r]_{r}]_0"),
            (r % 2) as i64,
            vec![],
            vec![(vec![0, 1], e), (vec![3, 4], d)],
        ),
        (InXTildeIn(e), _) => (
            format!("[[[r r]_{hn} r]_{r} [[r r]_{hn} r]_{r}]_0"),
            (r % 2) as i64,
            swap3,
            vec![(vec![0, 1], Sign::Plus), (vec![3, 4], e)],
        ),
    };
    let pic = parse_bracket(&pic)?.picture.with_leading_valuation(v);
    let mut g = GaloisData::trivial(pic.root_count(), 0);
    g.frobenius = from_cycles(pic.root_count(), &frob)?;
    // a twin at half-integral depth is a ramified conjugate pair
    let swaps: Vec<Vec<usize>> = pic
        .proper_ids()
        .into_iter()
        .filter(|&t| pic.is_twin(t) && !pic.depth(t).is_integer())
        .map(|t| pic.members(t).to_vec())
        .collect();
    g.inertia = from_cycles(pic.root_count(), &swaps)?;
    g.validate(&pic)?;
    for (members, s) in signs {
        let id = pic.find(&members).expect("generator cluster");
        g.set_sign(&pic, id, s)?;
    }
    Ok((pic, g))
}

/// The same curve after x ↦ p^t x: depths grow by t and v(c_f) drops by |R|·t.
pub fn shifted_representative(pic: &ClusterPicture, g: &GaloisData, t: i64) -> (ClusterPicture, GaloisData) {
    let p = pic.shifted(&crate::rat::q(t)).with_leading_valuation(pic.leading_valuation() - pic.root_count() as i64 * t);
    (p, g.clone())
}

/// The table columns as computed by the general pipeline.
pub fn pipeline_row(pic: &ClusterPicture, g: &GaloisData) -> Result<TableRow> {
    let hl = homology_lattice(pic, g)?;
    let (min_disc, _) = min_disc_valuation(pic, g)?;
    if !min_disc.is_integer() || min_disc.is_negative() {
        return Err(Error::Precondition(format!("v(Δ_min) = {min_disc} is not a valuation")));
    }
    Ok(TableRow {
        components: count_components(pic, g)?,
        conductor: conductor_semistable(pic, g)?,
        root_number: root_number(&hl),
        tamagawa: tamagawa(&hl)?,
        deficient: deficiency(pic, g)?,
        min_disc: min_disc.to_integer().try_into().map_err(|_| Error::Unsupported("v(Δ_min) overflow".into()))?,
    })
}

fn order_pair(a: (Sign, u64), b: (Sign, u64)) -> ((Sign, u64), (Sign, u64)) {
    let key = |x: &(Sign, u64)| (x.0 != Sign::Plus, x.1);
    if key(&b) < key(&a) {
        (b, a)
    } else {
        (a, b)
    }
}

/// Reduction type of a semistable genus 2 curve, read off the dual graph with Frobenius.
pub fn classify_genus2(pic: &ClusterPicture, g: &GaloisData) -> Result<Genus2Type> {
    if pic.genus() != 2 {
        return Err(Error::Precondition(format!("genus {} is not 2", pic.genus())));
    }
    let dg = dual_graph(pic, g)?;
    let cg = core_graph(&dg);
    let nv = cg.vertices.len();
    let mut genera = cg.genus.clone();
    genera.sort_unstable();
    let loops: Vec<usize> = (0..cg.edges.len()).filter(|&e| cg.is_loop(e)).collect();
    let bridges: Vec<usize> = (0..cg.edges.len()).filter(|&e| !cg.is_loop(e)).collect();
    let len = |e: usize| cg.edges[e].length;
    let sign_of = |s: i8| if s > 0 { Sign::Plus } else { Sign::Minus };
    let swapped = nv == 2 && cg.frob_vertex[0] == 1;
    let none = Params::default();
    let (family, params) = match (nv, genera.as_slice(), loops.len(), bridges.len()) {
        (1, [2], 0, 0) => (Family::Two, none),
        (2, [1, 1], 0, 1) => {
            let p = Params { r: len(bridges[0]), ..none };
            (if swapped { Family::OneXTildeOne } else { Family::OneXOne }, p)
        }
        (1, [1], 1, 0) => (Family::OneN(sign_of(cg.orbit_sign(loops[0]).1)), Params { n: len(loops[0]), ..none }),
        (2, [0, 1], 1, 1) => (
            Family::OneXIn(sign_of(cg.orbit_sign(loops[0]).1)),
            Params { n: len(loops[0]), r: len(bridges[0]), ..none },
        ),
        (1, [0], 2, 0) => {
            let (a, b) = (loops[0], loops[1]);
            let (ka, sa) = cg.orbit_sign(a);
            if ka == 2 {
                (Family::Inn(sign_of(sa)), Params { n: len(a), ..none })
            } else {
                let sb = cg.orbit_sign(b).1;
                let ((e, n), (d, m)) = order_pair((sign_of(sa), len(a)), (sign_of(sb), len(b)));
                (Family::Inm(e, d), Params { n, m, ..none })
            }
        }
        (2, [0, 0], 0, 3) => {
            let e = if swapped { Sign::Minus } else { Sign::Plus };
            let orbits: Vec<usize> = bridges.iter().map(|&b| cg.orbit_sign(b).0).collect();
            match orbits.iter().max() {
                Some(3) => (Family::Unnn(e), Params { n: len(bridges[0]), ..none }),
                Some(2) => {
                    let fixed = bridges.iter().copied().find(|&b| cg.orbit_sign(b).0 == 1).unwrap();
                    let pair = bridges.iter().copied().find(|&b| cg.orbit_sign(b).0 == 2).unwrap();
                    (Family::Unnk(e), Params { n: len(pair), k: len(fixed), ..none })
                }
                _ => {
                    let (n, m, k) = (len(bridges[0]), len(bridges[1]), len(bridges[2]));
                    (Family::U(e), Params { n, m, k, ..none })
                }
            }
        }
        (2, [0, 0], 2, 1) => {
            let (a, b) = (loops[0], loops[1]);
            let r = len(bridges[0]);
            let (ka, sa) = cg.orbit_sign(a);
            if swapped || ka == 2 {
                (Family::InXTildeIn(sign_of(sa)), Params { n: len(a), r, ..none })
            } else {
                let sb = cg.orbit_sign(b).1;
                let ((e, n), (d, m)) = order_pair((sign_of(sa), len(a)), (sign_of(sb), len(b)));
                (Family::InXIm(e, d), Params { n, m, r, ..none })
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "dual graph with {nv} core vertices and {} edges is not a genus 2 type",
                cg.edges.len()
            )))
        }
    };
    let params = family.normalize(params);
    Ok(Genus2Type { label: family.label(&params), family: family.name(), params })
}
