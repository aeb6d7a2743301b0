use crate::cluster::ClusterPicture;
use crate::galois::{from_cycles, GaloisData};
use crate::notation::{apply_signs, parse_bracket};

/// Bracket picture with leading valuation `v`, Frobenius cycles and residue field 𝔽_7.
pub fn curve(s: &str, v: i64, frob: &[Vec<usize>]) -> (ClusterPicture, GaloisData) {
    let parsed = parse_bracket(s).unwrap();
    let pic = parsed.picture.with_leading_valuation(v);
    let mut g = GaloisData::trivial(pic.root_count(), 7);
    g.frobenius = from_cycles(pic.root_count(), frob).unwrap();
    apply_signs(&pic, &mut g, &parsed.signs).unwrap();
    (pic, g)
}
