//! Compact bracket notation: `[[r r r]_2 [r [r r r]_2]_1]_0`.
//!
//! The top cluster carries its absolute depth, every other cluster its depth relative
//! to the parent. Roots are numbered left to right. A cluster may carry `^+` or `^-`,
//! which sets its ε sign.

use crate::cluster::{ClusterId, ClusterPicture};
use crate::error::{Error, Result};
use crate::galois::{theta_classes, GaloisData, Sign};
use crate::rat::{self, Q};

/// A parsed bracket expression before Galois data is attached.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub picture: ClusterPicture,
    /// explicit signs, by member set
    pub signs: Vec<(Vec<usize>, Sign)>,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    next_root: usize,
    clusters: Vec<(Vec<usize>, Q)>,
    signs: Vec<(Vec<usize>, Sign)>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn rational(&mut self) -> Result<Q> {
        let braced = self.peek() == Some(b'{');
        if braced {
            self.pos += 1;
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'-' || c == b'/' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        if text.is_empty() {
            return self.err("expected a depth");
        }
        let q = rat::parse(text).map_err(|_| Error::Parse { pos: start, msg: format!("bad depth {text:?}") })?;
        if braced {
            self.expect(b'}')?;
        }
        Ok(q)
    }

    fn sign(&mut self) -> Result<Option<Sign>> {
        if self.peek() != Some(b'^') {
            return Ok(None);
        }
        self.pos += 1;
        let braced = self.peek() == Some(b'{');
        if braced {
            self.pos += 1;
        }
        let s = match self.peek() {
            Some(b'+') => Sign::Plus,
            Some(b'-') => Sign::Minus,
            _ => return self.err("expected '+' or '-' after '^'"),
        };
        self.pos += 1;
        if braced {
            self.expect(b'}')?;
        }
        Ok(Some(s))
    }

    /// Parses one cluster; returns (members, depth relative to the parent).
    fn cluster(&mut self, top: bool) -> Result<Vec<usize>> {
        let open = self.pos;
        self.expect(b'[')?;
        let mut members = Vec::new();
        let mut kids: Vec<(usize, Q)> = Vec::new();
        let mut elems = 0;
        loop {
            self.ws();
            match self.peek() {
                Some(b'r') => {
                    self.pos += 1;
                    members.push(self.next_root);
                    self.next_root += 1;
                }
                Some(b'[') => {
                    let m = self.cluster(false)?;
                    let idx = self.clusters.len() - 1;
                    kids.push((idx, self.clusters[idx].1.clone()));
                    members.extend(m);
                }
                Some(b']') => break,
                None => return Err(Error::Parse { pos: open, msg: "unclosed '['".into() }),
                Some(c) => return self.err(format!("unexpected '{}'", c as char)),
            }
            elems += 1;
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() || c == b']' => {}
                _ => return self.err("elements must be separated by spaces"),
            }
        }
        self.expect(b']')?;
        if elems < 2 {
            return Err(Error::Parse { pos: open, msg: "a cluster needs at least two elements".into() });
        }
        let at = self.pos;
        self.expect(b'_')?;
        let d = self.rational()?;
        let sign = self.sign()?;
        if !top && d <= Q::from_integer(0.into()) {
            return Err(Error::Parse { pos: at, msg: "relative depth must be positive".into() });
        }
        // children were recorded with relative depths; make them absolute later
        let _ = kids;
        self.clusters.push((members.clone(), d));
        if let Some(s) = sign {
            self.signs.push((members.clone(), s));
        }
        Ok(members)
    }
}

/// Parse a bracket picture. The leading valuation is set to 0.
pub fn parse_bracket(text: &str) -> Result<Parsed> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, next_root: 0, clusters: Vec::new(), signs: Vec::new() };
    p.ws();
    let top = p.cluster(true)?;
    p.ws();
    if p.pos != p.s.len() {
        return p.err("trailing input");
    }
    let n = top.len();
    // clusters are pushed in post-order with relative depths; resolve absolute depths
    // from the top down
    let mut rel = p.clusters;
    rel.sort_by(|a, b| b.0.len().cmp(&a.0.len()));
    let mut abs: Vec<(Vec<usize>, Q)> = Vec::with_capacity(rel.len());
    for (m, d) in rel {
        let parent = abs
            .iter()
            .filter(|(t, _)| t.len() > m.len() && m.iter().all(|x| t.contains(x)))
            .min_by_key(|(t, _)| t.len());
        let depth = match parent {
            Some((_, pd)) => pd + &d,
            None => d,
        };
        abs.push((m, depth));
    }
    let picture = ClusterPicture::new(n, abs, 0).map_err(|vs| Error::Parse {
        pos: 0,
        msg: vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
    })?;
    for (m, _) in &p.signs {
        let id = picture.find(m).unwrap();
        if !(picture.is_even(id) || picture.is_cotwin(id)) {
            return Err(Error::Parse { pos: 0, msg: format!("sign on an odd non-cotwin cluster {}", picture.path(id)) });
        }
    }
    Ok(Parsed { picture, signs: p.signs })
}

/// Attach parsed signs to Galois data.
pub fn apply_signs(pic: &ClusterPicture, g: &mut GaloisData, signs: &[(Vec<usize>, Sign)]) -> Result<()> {
    for (m, s) in signs {
        let id = pic.find(m).ok_or_else(|| Error::Input(format!("no cluster {m:?}")))?;
        g.set_sign(pic, id, *s)?;
    }
    Ok(())
}

fn write_cluster(pic: &ClusterPicture, g: Option<&GaloisData>, id: ClusterId, classes: &[ClusterId], out: &mut String) {
    out.push('[');
    for (i, &c) in pic.children(id).iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if pic.is_proper(c) {
            write_cluster(pic, g, c, classes, out);
        } else {
            out.push('r');
        }
    }
    out.push_str("]_");
    let d = if id == pic.top() { pic.depth(id).clone() } else { pic.rel_depth(id).unwrap() };
    out.push_str(&rat::fmt(&d));
    if let Some(g) = g {
        if classes.contains(&id) {
            match g.epsilon.get(pic.members(id)) {
                Some(Sign::Plus) => out.push_str("^+"),
                Some(Sign::Minus) => out.push_str("^-"),
                _ => {}
            }
        }
    }
}

/// Canonical bracket text. Signs are written on θ-class representatives only.
pub fn to_bracket(pic: &ClusterPicture, g: Option<&GaloisData>) -> String {
    let classes = theta_classes(pic);
    let mut s = String::new();
    write_cluster(pic, g, pic.top(), &classes, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn example_tree() {
        let p = parse_bracket("[[r r r]_2 [r [r r r]_2]_1]_0").unwrap().picture;
        assert_eq!(p.root_count(), 7);
        assert_eq!(p.depth(p.find(&[0, 1, 2]).unwrap()), &q(2));
        assert_eq!(p.depth(p.find(&[3, 4, 5, 6]).unwrap()), &q(1));
        assert_eq!(p.depth(p.find(&[4, 5, 6]).unwrap()), &q(3));
        assert_eq!(to_bracket(&p, None), "[[r r r]_2 [r [r r r]_2]_1]_0");
    }

    #[test]
    fn minimal_and_signed() {
        let p = parse_bracket("[r r r r r]_0").unwrap().picture;
        assert_eq!(p.genus(), 2);
        assert_eq!(p.proper_ids().len(), 1);
        let parsed = parse_bracket("[[r r]_1^+ [r r]_1^+ r r]_0").unwrap();
        let mut g = GaloisData::trivial(6, 7);
        apply_signs(&parsed.picture, &mut g, &parsed.signs).unwrap();
        for t in [vec![0, 1], vec![2, 3]] {
            assert_eq!(g.eps(&parsed.picture, parsed.picture.find(&t).unwrap()), Sign::Plus);
        }
        assert_eq!(to_bracket(&parsed.picture, Some(&g)), "[[r r]_1^+ [r r]_1^+ r r]_0");
    }

    #[test]
    fn braces_and_fractions() {
        let p = parse_bracket("[[r r]_{3/2} r r r]_{-1}").unwrap().picture;
        assert_eq!(p.depth(p.top()), &q(-1));
        assert_eq!(p.rel_depth(p.find(&[0, 1]).unwrap()), Some(rat::qf(3, 2)));
        assert_eq!(to_bracket(&p, None), "[[r r]_3/2 r r r]_-1");
    }

    #[test]
    fn errors_have_locations() {
        for bad in ["[r r r r r", "[r r r r r]", "[[r r]_0 r r r]_0", "[[r r]_-1 r r r]_0", "[r r r r r]_0 x", "[rr r r r]_0", "[[r r r]_1^+ r r]_0"] {
            match parse_bracket(bad) {
                Err(Error::Parse { .. }) => {}
                other => panic!("{bad}: {other:?}"),
            }
        }
    }
}
