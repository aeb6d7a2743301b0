//! The full invariant report for one curve, in canonical root numbering, with JSON and
//! text renderings that are deterministic byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::cluster::ClusterPicture;
use crate::error::{Error, Result};
use crate::galois::{cycles, GaloisData, Sign};
use crate::genus2::{classify_genus2, Genus2Type};
use crate::graph::{count_components, dual_graph, DualGraph};
use crate::homology::homology_lattice;
use crate::input::Curve;
use crate::invariants::{
    conductor_semistable, conductor_tame_general, conductor_wild, deficiency, root_number, tamagawa, TameConductor,
};
use crate::label::canonical_label;
use crate::linalg::Mat;
use crate::notation::to_bracket;
use crate::rat::{self, Q};
use crate::semistability::{check_semistability, reduction_profile, ReductionProfile, Witness};
use crate::weierstrass::{
    disc_valuation, is_minimal_model, min_disc_valuation, perturbation_bound, Attestation, AttestationStatus,
    Minimality,
};

/// Input echo in the picture input schema; feeding it back reproduces the same curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Echo {
    pub picture: String,
    pub leading_valuation: i64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub frobenius: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inertia: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_size: Option<u64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub tame: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wild: Option<Vec<(i64, i64, i64)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub chains: usize,
    pub total_length: u64,
    pub betti: usize,
    pub genera: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homology {
    pub rank: usize,
    pub gram: Mat,
    pub frobenius: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemistableInvariants {
    pub components: u64,
    pub dual_graph: GraphSummary,
    pub conductor: u64,
    pub homology: Homology,
    pub tamagawa: u64,
    pub root_number: i8,
    pub deficient: bool,
    #[serde(serialize_with = "rat::ser")]
    pub min_disc_valuation: Q,
    pub minimality: Minimality,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus2: Option<Genus2Type>,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub input: Echo,
    pub genus: usize,
    pub roots: usize,
    pub epsilon: BTreeMap<String, String>,
    pub semistable: bool,
    pub witnesses: Vec<Witness>,
    pub profile: ReductionProfile,
    #[serde(serialize_with = "rat::ser")]
    pub disc_valuation: Q,
    pub perturbation_bound: i64,
    pub tame_conductor: Option<TameConductor>,
    pub wild_conductor: Option<u64>,
    pub invariants: Option<SemistableInvariants>,
    pub attestations: Vec<Attestation>,
    /// tameness of K(R)/K was taken from the input, not derived from roots
    pub tame_asserted: bool,
}

impl InvariantReport {
    /// Hypotheses that were not verified, for `--strict`.
    pub fn unverified(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .attestations
            .iter()
            .filter(|a| a.status != AttestationStatus::Verified)
            .map(|a| format!("{} ({:?})", a.hypothesis, a.status).to_lowercase())
            .collect();
        if self.tame_asserted {
            out.push("K(R)/K tame (asserted by input)".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "picture: {}", self.input.picture);
        let _ = writeln!(s, "leading valuation: {}", self.input.leading_valuation);
        if let Some(p) = self.input.prime {
            let _ = writeln!(s, "prime: {p}");
        }
        let _ = writeln!(s, "genus: {}", self.genus);
        for (path, e) in &self.epsilon {
            let _ = writeln!(s, "epsilon {path}: {e}");
        }
        let _ = writeln!(s, "semistable: {}", self.semistable);
        for w in &self.witnesses {
            let at = w.cluster.as_deref().unwrap_or("-");
            let _ = writeln!(s, "  witness clause {} at {at}: {}", w.clause, w.reason);
        }
        let _ = writeln!(s, "v(disc): {}", rat::fmt(&self.disc_valuation));
        let _ = writeln!(s, "perturbation bound: {}", self.perturbation_bound);
        if let Some(t) = &self.tame_conductor {
            let _ = writeln!(s, "tame conductor: {}", t.tame);
        }
        if let Some(w) = self.wild_conductor {
            let _ = writeln!(s, "wild conductor: {w}");
        }
        if let Some(inv) = &self.invariants {
            let d = &inv.dual_graph;
            let _ = writeln!(s, "components: {}", inv.components);
            let _ = writeln!(
                s,
                "dual graph: {} vertices, {} chains, total length {}, betti {}",
                d.vertices, d.chains, d.total_length, d.betti
            );
            let _ = writeln!(s, "conductor: {}", inv.conductor);
            let _ = writeln!(s, "homology rank: {}", inv.homology.rank);
            let _ = writeln!(s, "gram: {:?}", inv.homology.gram);
            let _ = writeln!(s, "frobenius: {:?}", inv.homology.frobenius);
            let _ = writeln!(s, "tamagawa: {}", inv.tamagawa);
            let _ = writeln!(s, "root number: {}", if inv.root_number > 0 { "+1" } else { "-1" });
            let _ = writeln!(s, "deficient: {}", inv.deficient);
            let _ = writeln!(s, "v(disc_min): {}", rat::fmt(&inv.min_disc_valuation));
            let _ = writeln!(s, "minimal: {}", inv.minimality.minimal);
            if let Some(l) = &inv.label {
                let _ = writeln!(s, "type: {l}");
            }
        }
        for a in &self.attestations {
            let _ = writeln!(s, "attestation: {} [{:?}]", a.hypothesis, a.status);
        }
        if self.tame_asserted {
            let _ = writeln!(s, "attestation: K(R)/K tame [Asserted]");
        }
        s
    }
}

fn nontrivial_cycles(p: &[usize]) -> Vec<Vec<usize>> {
    cycles(p).into_iter().filter(|c| c.len() > 1).collect()
}

/// Curve with roots renumbered in left-to-right leaf order.
pub fn canonical_curve(pic: &ClusterPicture, g: &GaloisData) -> (ClusterPicture, GaloisData) {
    let map = pic.canonical_numbering();
    (pic.relabel(&map), g.relabel(&map))
}

pub fn graph_summary(dg: &DualGraph) -> GraphSummary {
    let vertices = dg.vertices.len();
    let chains = dg.chains.len();
    GraphSummary {
        vertices,
        chains,
        total_length: dg.chains.iter().map(|c| c.length).sum(),
        betti: chains + 1 - vertices.min(chains + 1),
        genera: dg.vertices.iter().map(|v| v.genus).collect(),
    }
}

fn semistable_part(pic: &ClusterPicture, g: &GaloisData) -> Result<(SemistableInvariants, Vec<Attestation>)> {
    let dg = dual_graph(pic, g)?;
    let hl = homology_lattice(pic, g)?;
    let (min_disc, att) = min_disc_valuation(pic, g)?;
    let minimality = is_minimal_model(pic, g)?;
    let genus2 = if pic.genus() == 2 { Some(classify_genus2(pic, g)?) } else { None };
    let label = match &genus2 {
        Some(t) => Some(t.label.clone()),
        None => match canonical_label(&dg) {
            Ok(l) => Some(l),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        },
    };
    let attestations = vec![minimality.attestation.clone(), att];
    let inv = SemistableInvariants {
        components: count_components(pic, g)?,
        dual_graph: graph_summary(&dg),
        conductor: conductor_semistable(pic, g)?,
        homology: Homology { rank: hl.rank, gram: hl.gram.clone(), frobenius: hl.frob.clone() },
        tamagawa: tamagawa(&hl)?,
        root_number: root_number(&hl),
        deficient: deficiency(pic, g)?,
        min_disc_valuation: min_disc,
        minimality,
        genus2,
        label,
    };
    Ok((inv, attestations))
}

/// Analyze a curve: everything the picture determines, semistable invariants when they exist.
pub fn analyze(curve: &Curve) -> Result<InvariantReport> {
    let (pic, g) = canonical_curve(&curve.picture, &curve.galois);
    let verdict = check_semistability(&pic, &g);
    let mut epsilon = BTreeMap::new();
    for (members, s) in &g.epsilon {
        if *s == Sign::Unknown {
            continue;
        }
        let id = pic.find(members).expect("validated epsilon key");
        epsilon.insert(pic.path(id), s.symbol().to_string());
    }
    let tame_conductor = if g.tame { Some(conductor_tame_general(&pic, &g)?) } else { None };
    let wild_conductor = match &curve.wild {
        Some(w) => Some(conductor_wild(w)?),
        None => None,
    };
    let (invariants, attestations) = if verdict.semistable {
        let (inv, att) = semistable_part(&pic, &g)?;
        (Some(inv), att)
    } else {
        (None, Vec::new())
    };
    let from_roots = curve.ingested.is_some();
    let echo = Echo {
        picture: to_bracket(&pic, Some(&g)),
        leading_valuation: pic.leading_valuation(),
        frobenius: nontrivial_cycles(&g.frobenius),
        inertia: nontrivial_cycles(&g.inertia),
        prime: curve.prime,
        residue_size: match curve.prime {
            Some(p) if p == g.residue_size => None,
            _ if g.residue_size == 0 => None,
            _ => Some(g.residue_size),
        },
        tame: !g.tame,
        wild: curve.wild.clone(),
    };
    Ok(InvariantReport {
        input: echo,
        genus: pic.genus(),
        roots: pic.root_count(),
        epsilon,
        semistable: verdict.semistable,
        witnesses: verdict.witnesses,
        profile: reduction_profile(&pic, &g),
        disc_valuation: disc_valuation(&pic),
        perturbation_bound: perturbation_bound(&pic),
        tame_conductor,
        wild_conductor,
        invariants,
        attestations,
        tame_asserted: g.tame_asserted && !from_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_input;

    const EXAMPLE: &str = r#"{"prime": 7, "roots": [{"rat": "1"}, {"rat": "50"}, {"rat": "-48"}, {"rat": "7"}, {"rat": "0"}, {"rat": "343"}, {"rat": "-343"}]}"#;

    #[test]
    fn example_report() {
        let c = parse_input(EXAMPLE).unwrap();
        let r = analyze(&c).unwrap();
        assert!(r.semistable);
        assert_eq!(r.disc_valuation, rat::q(36));
        assert_eq!(r.perturbation_bound, 4);
        let inv = r.invariants.as_ref().unwrap();
        assert_eq!((inv.components, inv.conductor, inv.tamagawa), (4, 1, 2));
        assert_eq!(inv.homology.gram, vec![vec![2]]);
        assert_eq!(inv.homology.frobenius, vec![vec![-1]]);
        // genus 3 over F_7 misses |k| > 7, so only the v(Δ_min) hypothesis fails
        assert_eq!(r.unverified(), vec!["|k| > 7 (failed)".to_string()]);
        assert!(inv.minimality.minimal);
        assert_eq!(r.to_json(), analyze(&c).unwrap().to_json());
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_input(EXAMPLE).unwrap();
        let r = analyze(&c).unwrap();
        let echo = serde_json::to_string(&r.input).unwrap();
        let again = analyze(&parse_input(&echo).unwrap()).unwrap();
        assert_eq!(again.input, r.input);
        assert_eq!(again.invariants, r.invariants);
        assert!(again.tame_asserted);
    }

    #[test]
    fn non_semistable_report() {
        let c = parse_input(r#"{"picture": "[r r r r r]_0", "leading_valuation": 1}"#).unwrap();
        let r = analyze(&c).unwrap();
        assert!(!r.semistable);
        assert!(r.invariants.is_none());
        assert!(!r.witnesses.is_empty());
        assert!(r.to_text().contains("semistable: false"));
    }
}
