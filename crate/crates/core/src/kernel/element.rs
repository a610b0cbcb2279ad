use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::kernel::{FreeWord, KernelError};
use crate::scalar::Coord;

/// Version tag prefixed to every encoded element.
pub const ENCODING_VERSION: &str = "gl1";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVec<C> {
    pub coords: Vec<C>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicResidue {
    value: u64,
    modulus: u64,
}

impl CyclicResidue {
    /// Normalizes `value` into `[0, modulus)`.
    pub fn new(value: i64, modulus: u64) -> Self {
        assert!(modulus >= 1);
        let m = modulus as i128;
        let v = (value as i128).rem_euclid(m) as u64;
        CyclicResidue { value: v, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

/// `(v, k)` in `Z^d ⋊_A Z/mZ`; `k` is kept in `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemidirectElem<C> {
    pub v: Vec<C>,
    pub k: u64,
}

/// `(u, a, v)` in the Heisenberg group with product
/// `(u₁+u₂, a₁+a₂+u₁ᵀv₂, v₁+v₂)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeisenbergElem<C> {
    pub u: Vec<C>,
    pub a: C,
    pub v: Vec<C>,
}

/// `((u, a, v), k)` in the Heisenberg group extended by `Z/mZ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwistedHeisenbergElem<C> {
    pub h: HeisenbergElem<C>,
    pub k: u64,
}

/// `(L, g)` in a wreath product. Lamps equal to the identity are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WreathElem<C> {
    pub lamps: BTreeMap<GroupElement<C>, GroupElement<C>>,
    pub pos: Box<GroupElement<C>>,
}

impl<C> WreathElem<C> {
    /// Base positions carrying a non-identity lamp.
    pub fn support(&self) -> impl Iterator<Item = &GroupElement<C>> {
        self.lamps.keys()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleElem<C> {
    pub components: Vec<GroupElement<C>>,
}

/// A permutation of `0..n`, stored as the image list. Products compose
/// right to left: `(p·q)(i) = p(q(i))`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    pub images: Vec<u8>,
}

/// One of `±1, ±i, ±j, ±k`, stored as `4·sign + unit` with units ordered
/// `1, i, j, k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuaternionUnit(pub u8);

/// An element of any of the supported groups.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement<C> {
    Free(FreeWord),
    Lattice(LatticeVec<C>),
    Cyclic(CyclicResidue),
    Semidirect(SemidirectElem<C>),
    Heisenberg(HeisenbergElem<C>),
    HeisenbergSemidirect(TwistedHeisenbergElem<C>),
    Wreath(WreathElem<C>),
    Tuple(TupleElem<C>),
    Perm(Permutation),
    Quaternion(QuaternionUnit),
}

impl<C: Coord> GroupElement<C> {
    pub fn lattice(coords: Vec<C>) -> Self {
        GroupElement::Lattice(LatticeVec { coords })
    }

    pub fn lattice_i64(coords: &[i64]) -> Self {
        Self::lattice(coords.iter().map(|&c| C::of_i64(c)).collect())
    }

    pub fn semidirect(v: Vec<C>, k: u64) -> Self {
        GroupElement::Semidirect(SemidirectElem { v, k })
    }

    pub fn heisenberg(u: Vec<C>, a: C, v: Vec<C>) -> Self {
        GroupElement::Heisenberg(HeisenbergElem { u, a, v })
    }

    pub fn tuple(components: Vec<GroupElement<C>>) -> Self {
        GroupElement::Tuple(TupleElem { components })
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            GroupElement::Free(_) => "free word",
            GroupElement::Lattice(_) => "lattice vector",
            GroupElement::Cyclic(_) => "cyclic residue",
            GroupElement::Semidirect(_) => "semidirect pair",
            GroupElement::Heisenberg(_) => "Heisenberg triple",
            GroupElement::HeisenbergSemidirect(_) => "twisted Heisenberg element",
            GroupElement::Wreath(_) => "wreath element",
            GroupElement::Tuple(_) => "tuple",
            GroupElement::Perm(_) => "permutation",
            GroupElement::Quaternion(_) => "quaternion unit",
        }
    }

    /// Canonical, versioned text encoding. Equal canonical elements have
    /// equal encodings and vice versa.
    pub fn encode(&self) -> String {
        let mut s = String::from(ENCODING_VERSION);
        s.push(':');
        self.encode_body(&mut s);
        s
    }

    pub fn encode_bytes(&self) -> Vec<u8> {
        self.encode().into_bytes()
    }

    fn encode_body(&self, out: &mut String) {
        fn list<T: fmt::Display>(out: &mut String, xs: &[T]) {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{x}");
            }
        }
        match self {
            GroupElement::Free(w) => {
                out.push_str("F(");
                let letters: Vec<i32> = w.letters().iter().map(|l| l.signed()).collect();
                list(out, &letters);
                out.push(')');
            }
            GroupElement::Lattice(v) => {
                out.push_str("Z(");
                list(out, &v.coords);
                out.push(')');
            }
            GroupElement::Cyclic(c) => {
                let _ = write!(out, "C({}/{})", c.value, c.modulus);
            }
            GroupElement::Semidirect(e) => {
                out.push_str("S(");
                list(out, &e.v);
                let _ = write!(out, ";{})", e.k);
            }
            GroupElement::Heisenberg(h) => {
                out.push_str("H(");
                encode_heis(out, h);
                out.push(')');
            }
            GroupElement::HeisenbergSemidirect(t) => {
                out.push_str("HS(");
                encode_heis(out, &t.h);
                let _ = write!(out, ";{})", t.k);
            }
            GroupElement::Wreath(w) => {
                out.push_str("W{");
                for (i, (k, v)) in w.lamps.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    k.encode_body(out);
                    out.push(':');
                    v.encode_body(out);
                }
                out.push_str("}@");
                w.pos.encode_body(out);
            }
            GroupElement::Tuple(t) => {
                out.push('T');
                out.push('<');
                for (i, c) in t.components.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    c.encode_body(out);
                }
                out.push('>');
            }
            GroupElement::Perm(p) => {
                out.push_str("P(");
                list(out, &p.images);
                out.push(')');
            }
            GroupElement::Quaternion(q) => {
                let _ = write!(out, "Q({})", q.0);
            }
        }
    }

    /// Inverse of [`GroupElement::encode`].
    pub fn decode(text: &str) -> Result<Self, KernelError> {
        let body = text
            .strip_prefix(ENCODING_VERSION)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| KernelError::Decode(format!("missing `{ENCODING_VERSION}:` prefix")))?;
        let mut d = Decoder { s: body.as_bytes(), pos: 0 };
        let e = d.element()?;
        if d.pos != d.s.len() {
            return Err(d.err("trailing characters"));
        }
        Ok(e)
    }
}

fn encode_heis<C: Coord>(out: &mut String, h: &HeisenbergElem<C>) {
    for (i, x) in h.u.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x}");
    }
    let _ = write!(out, ";{};", h.a);
    for (i, x) in h.v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x}");
    }
}

impl<C: Coord> fmt::Display for GroupElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.encode_body(&mut s);
        f.write_str(&s)
    }
}

struct Decoder<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Decoder<'_> {
    fn err(&self, msg: &str) -> KernelError {
        KernelError::Decode(format!("{msg} at byte {}", self.pos))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), KernelError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn int_text(&mut self) -> Result<&str, KernelError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start || (self.pos == start + 1 && self.s[start] == b'-') {
            return Err(self.err("expected integer"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii"))
    }

    fn int<T: std::str::FromStr>(&mut self) -> Result<T, KernelError> {
        let t = self.int_text()?;
        t.parse().map_err(|_| KernelError::Decode(format!("integer out of range: {t}")))
    }

    fn coord<C: Coord>(&mut self) -> Result<C, KernelError> {
        let t = self.int_text()?.to_owned();
        C::from_str_radix(&t, 10).map_err(|_| KernelError::Decode(format!("bad coordinate {t}")))
    }

    /// Comma separated list up to (not including) one of `stops`.
    fn list_until<T>(
        &mut self,
        stops: &[u8],
        mut item: impl FnMut(&mut Self) -> Result<T, KernelError>,
    ) -> Result<Vec<T>, KernelError> {
        let mut out = Vec::new();
        if self.peek().is_some_and(|c| stops.contains(&c)) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn heis<C: Coord>(&mut self) -> Result<HeisenbergElem<C>, KernelError> {
        let u = self.list_until(b";", Self::coord)?;
        self.eat(b';')?;
        let a = self.coord()?;
        self.eat(b';')?;
        let v = self.list_until(b";)", Self::coord)?;
        Ok(HeisenbergElem { u, a, v })
    }

    fn element<C: Coord>(&mut self) -> Result<GroupElement<C>, KernelError> {
        let tag_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_uppercase()) {
            self.pos += 1;
        }
        let tag = std::str::from_utf8(&self.s[tag_start..self.pos]).expect("ascii").to_owned();
        let e = match tag.as_str() {
            "F" => {
                self.eat(b'(')?;
                let letters: Vec<i32> = self.list_until(b")", Self::int)?;
                self.eat(b')')?;
                if letters.contains(&0) {
                    return Err(self.err("letter 0"));
                }
                GroupElement::Free(FreeWord::from_signed(&letters))
            }
            "Z" => {
                self.eat(b'(')?;
                let coords = self.list_until(b")", Self::coord)?;
                self.eat(b')')?;
                GroupElement::Lattice(LatticeVec { coords })
            }
            "C" => {
                self.eat(b'(')?;
                let v: u64 = self.int()?;
                self.eat(b'/')?;
                let m: u64 = self.int()?;
                self.eat(b')')?;
                if m == 0 || v >= m {
                    return Err(self.err("residue out of range"));
                }
                GroupElement::Cyclic(CyclicResidue { value: v, modulus: m })
            }
            "S" => {
                self.eat(b'(')?;
                let v = self.list_until(b";", Self::coord)?;
                self.eat(b';')?;
                let k = self.int()?;
                self.eat(b')')?;
                GroupElement::Semidirect(SemidirectElem { v, k })
            }
            "H" => {
                self.eat(b'(')?;
                let h = self.heis()?;
                self.eat(b')')?;
                GroupElement::Heisenberg(h)
            }
            "HS" => {
                self.eat(b'(')?;
                let h = self.heis()?;
                self.eat(b';')?;
                let k = self.int()?;
                self.eat(b')')?;
                GroupElement::HeisenbergSemidirect(TwistedHeisenbergElem { h, k })
            }
            "W" => {
                self.eat(b'{')?;
                let pairs = self.list_until(b"}", |d| {
                    let k = d.element()?;
                    d.eat(b':')?;
                    let v = d.element()?;
                    Ok((k, v))
                })?;
                self.eat(b'}')?;
                self.eat(b'@')?;
                let pos = self.element()?;
                GroupElement::Wreath(WreathElem {
                    lamps: pairs.into_iter().collect(),
                    pos: Box::new(pos),
                })
            }
            "T" => {
                self.eat(b'<')?;
                let mut components = Vec::new();
                if self.peek() != Some(b'>') {
                    loop {
                        components.push(self.element()?);
                        if self.peek() == Some(b'|') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.eat(b'>')?;
                GroupElement::Tuple(TupleElem { components })
            }
            "P" => {
                self.eat(b'(')?;
                let images = self.list_until(b")", Self::int)?;
                self.eat(b')')?;
                GroupElement::Perm(Permutation { images })
            }
            "Q" => {
                self.eat(b'(')?;
                let q: u8 = self.int()?;
                self.eat(b')')?;
                if q >= 8 {
                    return Err(self.err("quaternion index out of range"));
                }
                GroupElement::Quaternion(QuaternionUnit(q))
            }
            _ => return Err(self.err(&format!("unknown element tag `{tag}`"))),
        };
        Ok(e)
    }
}
