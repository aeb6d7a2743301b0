//! Input formats: JSON root sets, JSON pictures with Galois annotations, and bare
//! bracket notation.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::cluster::ClusterPicture;
use crate::error::{Error, Result};
use crate::galois::{from_cycles, GaloisData, Sign};
use crate::ingest::{self, Ingested, RootSet, RootSpec};
use crate::notation;
use crate::padic;
use crate::rat;

/// A curve as far as this crate sees it.
#[derive(Clone, Debug)]
pub struct Curve {
    pub picture: ClusterPicture,
    pub galois: GaloisData,
    pub prime: Option<u64>,
    /// present when the input listed roots
    pub ingested: Option<Ingested>,
    /// caller-supplied (v(Δ_{K(r)/K}), [K(r):K], f) per root orbit
    pub wild: Option<Vec<(i64, i64, i64)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurdJson {
    a: String,
    b: String,
    d: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
enum RootJson {
    Rat(String),
    Surd(SurdJson),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RootsInput {
    prime: u64,
    #[serde(default)]
    leading_coefficient: Option<String>,
    roots: Vec<RootJson>,
    #[serde(default)]
    wild: Option<Vec<(i64, i64, i64)>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SignJson {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PictureInput {
    picture: String,
    #[serde(default)]
    leading_valuation: i64,
    #[serde(default)]
    frobenius: Vec<Vec<usize>>,
    #[serde(default)]
    inertia: Vec<Vec<usize>>,
    #[serde(default)]
    epsilon: BTreeMap<String, SignJson>,
    #[serde(default)]
    prime: Option<u64>,
    #[serde(default)]
    residue_size: Option<u64>,
    #[serde(default)]
    tame: Option<bool>,
    #[serde(default)]
    wild: Option<Vec<(i64, i64, i64)>>,
}

fn sign_of(key: &str, s: &SignJson) -> Result<Sign> {
    match s {
        SignJson::Int(1) => Ok(Sign::Plus),
        SignJson::Int(-1) => Ok(Sign::Minus),
        SignJson::Text(t) if t == "+" || t == "+1" => Ok(Sign::Plus),
        SignJson::Text(t) if t == "-" || t == "-1" => Ok(Sign::Minus),
        _ => Err(Error::Input(format!("epsilon for {key} must be +1 or -1"))),
    }
}

pub fn root_set_from_json(text: &str) -> Result<RootSet> {
    let r: RootsInput = serde_json::from_str(text).map_err(json_err)?;
    to_root_set(&r)
}

fn to_root_set(r: &RootsInput) -> Result<RootSet> {
    let lc = rat::parse(r.leading_coefficient.as_deref().unwrap_or("1"))?;
    let mut roots = Vec::with_capacity(r.roots.len());
    for x in &r.roots {
        roots.push(match x {
            RootJson::Rat(a) => RootSpec::Rat(rat::parse(a)?),
            RootJson::Surd(s) => RootSpec::Surd { a: rat::parse(&s.a)?, b: rat::parse(&s.b)?, d: s.d },
        });
    }
    Ok(RootSet { prime: r.prime, leading_coefficient: lc, roots })
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Input(format!("json: {e}"))
}

pub fn curve_from_roots(rs: &RootSet) -> Result<Curve> {
    let (ing, g) = ingest::ingest(rs)?;
    Ok(Curve { picture: ing.picture.clone(), galois: g, prime: Some(rs.prime), ingested: Some(ing), wild: None })
}

fn curve_from_picture(p: PictureInput) -> Result<Curve> {
    let parsed = notation::parse_bracket(&p.picture)?;
    let pic = parsed.picture.with_leading_valuation(p.leading_valuation);
    let n = pic.root_count();
    if let Some(q) = p.prime {
        if !padic::is_odd_prime(q) {
            return Err(Error::Input(format!("{q} is not an odd prime")));
        }
    }
    let mut g = GaloisData::trivial(n, p.residue_size.or(p.prime).unwrap_or(0));
    g.frobenius = from_cycles(n, &p.frobenius)?;
    g.inertia = from_cycles(n, &p.inertia)?;
    g.tame = p.tame.unwrap_or(true);
    g.tame_asserted = true;
    g.validate(&pic)?;
    notation::apply_signs(&pic, &mut g, &parsed.signs)?;
    for (path, s) in &p.epsilon {
        let id = pic.from_path(path).ok_or_else(|| Error::Input(format!("no cluster at path {path}")))?;
        g.set_sign(&pic, id, sign_of(path, s)?)?;
    }
    Ok(Curve { picture: pic, galois: g, prime: p.prime, ingested: None, wild: p.wild })
}

/// Parse any supported input; JSON is recognised by a leading '{'.
pub fn parse_input(text: &str) -> Result<Curve> {
    let t = text.trim();
    if t.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(t).map_err(json_err)?;
        if v.get("roots").is_some() {
            let r: RootsInput = serde_json::from_value(v).map_err(json_err)?;
            let mut c = curve_from_roots(&to_root_set(&r)?)?;
            c.wild = r.wild;
            Ok(c)
        } else if v.get("picture").is_some() {
            curve_from_picture(serde_json::from_value(v).map_err(json_err)?)
        } else {
            Err(Error::Input("expected a \"roots\" or a \"picture\" field".into()))
        }
    } else {
        let parsed = notation::parse_bracket(t)?;
        let n = parsed.picture.root_count();
        let mut g = GaloisData::trivial(n, 0);
        notation::apply_signs(&parsed.picture, &mut g, &parsed.signs)?;
        Ok(Curve { picture: parsed.picture, galois: g, prime: None, ingested: None, wild: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_json() {
        let c = parse_input(
            r#"{"prime": 7, "leading_coefficient": "1",
                "roots": [{"rat": "1"}, {"rat": "50"}, {"rat": "-48"}, {"rat": "7"}, {"rat": "0"},
                          {"rat": "343"}, {"rat": "-343"}]}"#,
        )
        .unwrap();
        assert_eq!(c.picture.genus(), 3);
        assert_eq!(c.prime, Some(7));
        assert!(c.ingested.is_some());
    }

    #[test]
    fn picture_json_with_paths() {
        let c = parse_input(
            r#"{"picture": "[[r r]_1 [r r]_1 r r]_0", "leading_valuation": 0,
                "frobenius": [[0, 2], [1, 3]], "epsilon": {"R.0": 1, "R.1": "-"}, "prime": 5}"#,
        )
        .unwrap();
        let t1 = c.picture.find(&[2, 3]).unwrap();
        assert_eq!(c.galois.eps(&c.picture, t1), Sign::Minus);
        assert_eq!(c.galois.frobenius, vec![2, 3, 0, 1, 4, 5]);
    }

    #[test]
    fn bad_inputs() {
        for bad in [
            "{",
            r#"{"prime": 7}"#,
            r#"{"prime": 9, "roots": [{"rat": "0"}, {"rat": "1"}, {"rat": "2"}, {"rat": "3"}, {"rat": "4"}]}"#,
            r#"{"picture": "[[r r]_1 r r r]_0", "frobenius": [[0, 2]]}"#,
            r#"{"picture": "[r r r r r]_0", "bogus": 1}"#,
            r#"{"picture": "[[r r]_1 r r r]_0", "epsilon": {"R.0": 2}}"#,
        ] {
            assert!(parse_input(bad).unwrap_err().is_parse(), "{bad}");
        }
    }
}
