//! Exact p-adic valuations on ℚ and ℚ(√d), residues, Hensel lifting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, Q};

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut i = 3u64;
    while i.saturating_mul(i) <= p {
        if p % i == 0 {
            return false;
        }
        i += 2;
    }
    true
}

/// v_p(n) for a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

pub fn val_rational(x: &Q, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    Ok(val_int(x.numer(), p).unwrap() - val_int(x.denom(), p).unwrap())
}

fn pow_q(p: u64, e: i64) -> Q {
    let b = Q::from_integer(BigInt::from(p));
    if e >= 0 {
        Q::from_integer(BigInt::from(p).pow(e as u32))
    } else {
        Q::one() / Q::from_integer(b.numer().pow((-e) as u32))
    }
}

pub fn p_power(p: u64, e: i64) -> Q {
    pow_q(p, e)
}

/// Reduction of a p-integral rational modulo p.
pub fn reduce(x: &Q, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb);
    assert!(!den.is_zero(), "reduce: not p-integral");
    let num = x.numer().mod_floor(&pb).to_u64().unwrap();
    let den = den.to_u64().unwrap();
    mul_mod(num, inv_mod(den, p), p)
}

/// Residue of x / p^{v(x)} in F_p^×.
pub fn unit_residue(x: &Q, p: u64) -> Result<u64> {
    let v = val_rational(x, p)?;
    Ok(reduce(&(x / pow_q(p, v)), p))
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero");
    pow_mod(a, p - 2, p)
}

/// Legendre symbol (a | p) via Euler's criterion; 0 when p | a.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Least non-negative square root of a mod p (Tonelli–Shanks), if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

fn inv_mod_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// Lift the root `x0` of x² ≡ u (mod p) to a root modulo p^n by Newton iteration.
pub fn hensel_sqrt(u: &BigInt, x0: u64, p: u64, n: u32) -> BigInt {
    let pb = BigInt::from(p);
    let mut x = BigInt::from(x0);
    let mut prec = 1u32;
    while prec < n {
        prec = (2 * prec).min(n);
        let m = pb.pow(prec);
        let fx = (&x * &x - u).mod_floor(&m);
        let dfx = (BigInt::from(2) * &x).mod_floor(&m);
        x = (&x - fx * inv_mod_big(&dfx, &m)).mod_floor(&m);
    }
    x
}

/// An element of 𝔽_p or of 𝔽_{p²} = 𝔽_p(√u), written x + y√u.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    pub p: u64,
    /// the non-residue adjoined, when the element lives in 𝔽_{p²}
    pub u: Option<u64>,
    pub x: u64,
    pub y: u64,
}

impl Residue {
    pub fn fp(x: u64, p: u64) -> Self {
        Residue { p, u: None, x: x % p, y: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn in_prime_field(&self) -> bool {
        self.y == 0
    }

    fn compatible(&self, o: &Self) -> Option<u64> {
        assert_eq!(self.p, o.p);
        match (self.u, o.u) {
            (Some(a), Some(b)) => {
                assert_eq!(a, b);
                Some(a)
            }
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p;
        Residue { p, u: self.compatible(o), x: (self.x + o.x) % p, y: (self.y + o.y) % p }
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        Residue { p, u: self.u, x: (p - self.x) % p, y: (p - self.y) % p }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p;
        let u = self.compatible(o);
        let uu = u.unwrap_or(0);
        let x = (mul_mod(self.x, o.x, p) + mul_mod(mul_mod(self.y, o.y, p), uu, p)) % p;
        let y = (mul_mod(self.x, o.y, p) + mul_mod(self.y, o.x, p)) % p;
        Residue { p, u, x, y }
    }

    /// Norm to 𝔽_p.
    pub fn norm(&self) -> u64 {
        let p = self.p;
        let uu = self.u.unwrap_or(0);
        (mul_mod(self.x, self.x, p) + p - mul_mod(uu, mul_mod(self.y, self.y, p), p)) % p
    }

    /// Square class in the field the element is considered over: 𝔽_p when `over_fp2` is
    /// false, 𝔽_{p²} otherwise.
    pub fn is_square(&self, over_fp2: bool) -> bool {
        if self.is_zero() {
            return true;
        }
        if over_fp2 || !self.in_prime_field() {
            // x is a square in 𝔽_{p²} iff its norm is a square in 𝔽_p
            legendre(self.norm(), self.p) == 1
        } else {
            legendre(self.x, self.p) == 1
        }
    }

    pub fn to_text(&self) -> String {
        match (self.y, self.u) {
            (0, _) | (_, None) => self.x.to_string(),
            (y, Some(u)) => format!("{}+{}*sqrt({})", self.x, y, u),
        }
    }
}

/// a + b√d with a, b rational; `d` lives in the surrounding [`QuadField`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    pub a: Q,
    pub b: Q,
}

impl Quad {
    pub fn rat(a: Q) -> Self {
        Quad { a, b: Q::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
    pub fn conj(&self) -> Self {
        Quad { a: self.a.clone(), b: -self.b.clone() }
    }
    pub fn add(&self, o: &Self) -> Self {
        Quad { a: &self.a + &o.a, b: &self.b + &o.b }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Quad { a: &self.a - &o.a, b: &self.b - &o.b }
    }
    pub fn scale(&self, c: &Q) -> Self {
        Quad { a: &self.a * c, b: &self.b * c }
    }
    pub fn mul(&self, o: &Self, d: &Q) -> Self {
        Quad { a: &self.a * &o.a + &self.b * &o.b * d, b: &self.a * &o.b + &self.b * &o.a }
    }
    pub fn norm(&self, d: &Q) -> Q {
        &self.a * &self.a - &self.b * &self.b * d
    }
}

/// How the shared quadratic extension ℚ_p(√d)/ℚ_p behaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtKind {
    /// no surds present
    Rational,
    /// v(d) odd
    Ramified,
    /// d a unit non-residue
    Inert,
    /// d a unit residue; `root` is the chosen square root of d mod p
    Split { root: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadField {
    pub p: u64,
    pub d: Option<i64>,
    pub kind: ExtKind,
}

fn is_squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut i = 2u64;
    while i * i <= n {
        if n % (i * i) == 0 {
            return false;
        }
        i += 1;
    }
    true
}

impl QuadField {
    pub fn rational(p: u64) -> Self {
        QuadField { p, d: None, kind: ExtKind::Rational }
    }

    pub fn new(p: u64, d: i64) -> Result<Self> {
        if d == 0 || !is_squarefree(d) {
            return Err(Error::Input(format!("d = {d} must be squarefree and nonzero")));
        }
        if d == 1 {
            return Err(Error::NotSurd);
        }
        let dq = BigInt::from(d);
        let kind = if val_int(&dq, p).unwrap() % 2 == 1 {
            ExtKind::Ramified
        } else {
            let u = reduce(&rat::q(d), p);
            match sqrt_mod(u, p) {
                Some(root) => ExtKind::Split { root },
                None => ExtKind::Inert,
            }
        };
        Ok(QuadField { p, d: Some(d), kind })
    }

    fn dq(&self) -> Q {
        rat::q(self.d.unwrap_or(0))
    }

    pub fn mul(&self, x: &Quad, y: &Quad) -> Quad {
        x.mul(y, &self.dq())
    }

    /// √d mod p^n as an integer, for the split case.
    fn split_root(&self, n: u32) -> BigInt {
        match self.kind {
            ExtKind::Split { root } => hensel_sqrt(&BigInt::from(self.d.unwrap()), root, self.p, n),
            _ => unreachable!(),
        }
    }

    /// v(a + b√d) ∈ ½ℤ.
    pub fn val(&self, x: &Quad) -> Result<Q> {
        if x.is_zero() {
            return Err(Error::ValuationOfZero);
        }
        if x.b.is_zero() {
            return Ok(rat::q(val_rational(&x.a, self.p)?));
        }
        match self.kind {
            ExtKind::Rational => unreachable!("surd without a field"),
            ExtKind::Ramified | ExtKind::Inert => {
                Ok(rat::q(val_rational(&x.norm(&self.dq()), self.p)?) * rat::half())
            }
            ExtKind::Split { .. } => Ok(rat::q(self.split_approx(x, None).0)),
        }
    }

    /// In the split case: (v(x), x / p^v mod p) using enough lifting precision that the
    /// tail b(√d − s_N) cannot interfere.
    fn split_approx(&self, x: &Quad, want: Option<i64>) -> (i64, u64) {
        let vb = val_rational(&x.b, self.p).unwrap();
        let va = if x.a.is_zero() { vb } else { val_rational(&x.a, self.p).unwrap() };
        let mut n: i64 = 2 * (va.abs().max(vb.abs()) + 1);
        loop {
            let s = Q::from_integer(self.split_root(n as u32));
            let y = &x.a + &x.b * s;
            // the tail has valuation ≥ vb + n
            if !y.is_zero() {
                let vy = val_rational(&y, self.p).unwrap();
                let target = want.unwrap_or(vy);
                if vy < vb + n && target + 1 <= vb + n {
                    let r = reduce(&(&y / pow_q(self.p, target)), self.p);
                    return (vy, r);
                }
            }
            n *= 2;
        }
    }

    /// Residue of x / p^k in the residue field of ℚ_p(√d), assuming v(x) ≥ k.
    pub fn residue_scaled(&self, x: &Quad, k: i64) -> Result<Residue> {
        let p = self.p;
        if x.is_zero() {
            return Ok(Residue::fp(0, p));
        }
        let v = self.val(x)?;
        if v < rat::q(k) {
            return Err(Error::Precondition("residue of a non-integral element".into()));
        }
        if v > rat::q(k) {
            return Ok(self.zero());
        }
        let scaled = x.scale(&pow_q(p, -k));
        match self.kind {
            ExtKind::Rational | ExtKind::Ramified => {
                // the √d part has half-integral valuation, strictly above the unit part
                Ok(Residue::fp(reduce(&scaled.a, p), p))
            }
            ExtKind::Inert => {
                let u = reduce(&self.dq(), p);
                Ok(Residue {
                    p,
                    u: Some(u),
                    x: reduce(&scaled.a, p),
                    y: if scaled.b.is_zero() { 0 } else { reduce(&scaled.b, p) },
                })
            }
            ExtKind::Split { .. } => {
                if x.b.is_zero() {
                    return Ok(Residue::fp(reduce(&scaled.a, p), p));
                }
                Ok(Residue::fp(self.split_approx(x, Some(k)).1, p))
            }
        }
    }

    /// Residue of the unit part x / p^{v(x)}; `None` when v(x) ∉ ℤ.
    pub fn unit_residue(&self, x: &Quad) -> Result<Option<Residue>> {
        let v = self.val(x)?;
        match rat::to_i64(&v) {
            Some(k) => Ok(Some(self.residue_scaled(x, k)?)),
            None => Ok(None),
        }
    }

    pub fn zero(&self) -> Residue {
        match self.kind {
            ExtKind::Inert => Residue { p: self.p, u: Some(reduce(&self.dq(), self.p)), x: 0, y: 0 },
            _ => Residue::fp(0, self.p),
        }
    }
}

impl Residue {
    /// Embed into the same field as `like`.
    pub fn like(&self, like: &Residue) -> Residue {
        Residue { u: self.u.or(like.u), ..*self }
    }
}

pub fn sign_of(x: &Q) -> i8 {
    if x.is_negative() {
        -1
    } else if x.is_zero() {
        0
    } else {
        1
    }
}
