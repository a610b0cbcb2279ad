use std::fmt;
use std::str::FromStr;

use crate::kernel::matrix::totient;
use crate::kernel::KernelError;

/// How the action matrix of a semidirect product is specified.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    /// Companion matrix of `1 + x + ... + x^{m-1}`.
    Companion(u64),
    /// Companion matrix of the `m`-th cyclotomic polynomial.
    Cyclotomic(u64),
    Explicit(Vec<Vec<i64>>),
}

impl MatrixKind {
    pub fn size(&self) -> usize {
        match self {
            MatrixKind::Companion(m) => m.saturating_sub(1) as usize,
            MatrixKind::Cyclotomic(m) => totient(*m) as usize,
            MatrixKind::Explicit(rows) => rows.len(),
        }
    }
}

/// A recipe for one of the supported groups.
///
/// The text form (see [`FromStr`]) is the one accepted on the command line,
/// e.g. `wreath(free(2),lattice(5))` or `quotient(semidirect(companion(2),2),10)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Free(u32),
    Lattice(usize),
    Cyclic(u64),
    /// `Z^d ⋊_A Z/mZ` with `A^m = I`.
    Semidirect { matrix: MatrixKind, order: u64 },
    /// `H_{2m-1}`: triples `(u, a, v)` with `u, v ∈ Z^{m-1}`.
    Heisenberg(u64),
    /// `H_{2m-1} ⋊ Z/mZ` twisted by the companion matrix of `1 + ... + x^{m-1}`.
    HeisenbergSemidirect(u64),
    Wreath { lamp: Box<GroupDescriptor>, base: Box<GroupDescriptor> },
    Product(Vec<GroupDescriptor>),
    /// Dihedral group of order `2m`.
    Dihedral(u64),
    Symmetric(u32),
    /// The order-27 group `(Z/3)² ⋊ Z/3` of exponent 3.
    Extraspecial3,
    Quaternion,
    /// Coordinates of a lattice-type construction reduced modulo `modulus`.
    Quotient { base: Box<GroupDescriptor>, modulus: u64 },
}

impl GroupDescriptor {
    /// `Z ⋊ Z/2Z`, the infinite dihedral group.
    pub fn infinite_dihedral() -> Self {
        GroupDescriptor::Semidirect { matrix: MatrixKind::Companion(2), order: 2 }
    }

    pub fn wreath(lamp: GroupDescriptor, base: GroupDescriptor) -> Self {
        GroupDescriptor::Wreath { lamp: Box::new(lamp), base: Box::new(base) }
    }

    pub fn quotient(base: GroupDescriptor, modulus: u64) -> Self {
        GroupDescriptor::Quotient { base: Box::new(base), modulus }
    }

    /// True when the coordinates can be reduced modulo an integer.
    pub fn is_lattice_type(&self) -> bool {
        matches!(
            self,
            GroupDescriptor::Lattice(_)
                | GroupDescriptor::Semidirect { .. }
                | GroupDescriptor::Heisenberg(_)
                | GroupDescriptor::HeisenbergSemidirect(_)
        )
    }

    /// Group order for finite constructions, `None` for infinite ones (or
    /// when the order does not fit in a `u64`).
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupDescriptor::Free(0) | GroupDescriptor::Lattice(0) => Some(1),
            GroupDescriptor::Free(_)
            | GroupDescriptor::Lattice(_)
            | GroupDescriptor::Semidirect { .. }
            | GroupDescriptor::Heisenberg(_)
            | GroupDescriptor::HeisenbergSemidirect(_) => None,
            GroupDescriptor::Cyclic(m) => Some(*m),
            GroupDescriptor::Dihedral(m) => m.checked_mul(2),
            GroupDescriptor::Symmetric(n) => (1..=*n as u64).try_fold(1u64, |a, b| a.checked_mul(b)),
            GroupDescriptor::Extraspecial3 => Some(27),
            GroupDescriptor::Quaternion => Some(8),
            GroupDescriptor::Product(parts) => {
                parts.iter().try_fold(1u64, |acc, p| acc.checked_mul(p.order()?))
            }
            GroupDescriptor::Wreath { lamp, base } => {
                let h = lamp.order()?;
                let g = base.order()?;
                h.checked_pow(u32::try_from(g).ok()?)?.checked_mul(g)
            }
            GroupDescriptor::Quotient { base, modulus } => {
                let n = *modulus;
                match base.as_ref() {
                    GroupDescriptor::Lattice(d) => n.checked_pow(*d as u32),
                    GroupDescriptor::Semidirect { matrix, order } => {
                        n.checked_pow(matrix.size() as u32)?.checked_mul(*order)
                    }
                    GroupDescriptor::Heisenberg(m) => n.checked_pow(2 * (*m as u32) - 1),
                    GroupDescriptor::HeisenbergSemidirect(m) => {
                        n.checked_pow(2 * (*m as u32) - 1)?.checked_mul(*m)
                    }
                    _ => None,
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixKind::Companion(m) => write!(f, "companion({m})"),
            MatrixKind::Cyclotomic(m) => write!(f, "cyclotomic({m})"),
            MatrixKind::Explicit(rows) => {
                f.write_str("[")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str("[")?;
                    for (j, v) in r.iter().enumerate() {
                        if j > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{v}")?;
                    }
                    f.write_str("]")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Free(d) => write!(f, "free({d})"),
            GroupDescriptor::Lattice(d) => write!(f, "lattice({d})"),
            GroupDescriptor::Cyclic(m) => write!(f, "cyclic({m})"),
            GroupDescriptor::Semidirect { matrix, order } => write!(f, "semidirect({matrix},{order})"),
            GroupDescriptor::Heisenberg(m) => write!(f, "heisenberg({m})"),
            GroupDescriptor::HeisenbergSemidirect(m) => write!(f, "heisenberg-semidirect({m})"),
            GroupDescriptor::Wreath { lamp, base } => write!(f, "wreath({lamp},{base})"),
            GroupDescriptor::Product(parts) => {
                f.write_str("product(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            GroupDescriptor::Dihedral(m) => write!(f, "dihedral({m})"),
            GroupDescriptor::Symmetric(n) => write!(f, "sym({n})"),
            GroupDescriptor::Extraspecial3 => f.write_str("extraspecial3"),
            GroupDescriptor::Quaternion => f.write_str("quaternion"),
            GroupDescriptor::Quotient { base, modulus } => write!(f, "quotient({base},{modulus})"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let d = p.descriptor()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(d)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> KernelError {
        KernelError::Descriptor { position: self.pos, message: msg.to_owned() }
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
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

    fn ident(&mut self) -> Result<String, KernelError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .s
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'-' || *c == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || !self.s[start].is_ascii_alphabetic() {
            self.pos = start;
            return Err(self.err("expected a group name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).to_ascii_lowercase())
    }

    fn int(&mut self) -> Result<i64, KernelError> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| {
                self.pos = start;
                self.err("expected an integer")
            })
    }

    fn uint(&mut self) -> Result<u64, KernelError> {
        let at = self.pos;
        let v = self.int()?;
        u64::try_from(v).map_err(|_| {
            self.pos = at;
            self.err("expected a non-negative integer")
        })
    }

    fn args1(&mut self) -> Result<u64, KernelError> {
        self.eat(b'(')?;
        let v = self.uint()?;
        self.eat(b')')?;
        Ok(v)
    }

    fn matrix(&mut self) -> Result<MatrixKind, KernelError> {
        if self.peek() == Some(b'[') {
            self.eat(b'[')?;
            let mut rows = Vec::new();
            loop {
                self.eat(b'[')?;
                let mut row = vec![self.int()?];
                while self.peek() == Some(b',') {
                    self.eat(b',')?;
                    row.push(self.int()?);
                }
                self.eat(b']')?;
                rows.push(row);
                if self.peek() == Some(b',') {
                    self.eat(b',')?;
                } else {
                    break;
                }
            }
            self.eat(b']')?;
            return Ok(MatrixKind::Explicit(rows));
        }
        let at = self.pos;
        match self.ident()?.as_str() {
            "companion" => Ok(MatrixKind::Companion(self.args1()?)),
            "cyclotomic" => Ok(MatrixKind::Cyclotomic(self.args1()?)),
            other => {
                self.pos = at;
                Err(self.err(&format!("unknown matrix `{other}`")))
            }
        }
    }

    fn descriptor(&mut self) -> Result<GroupDescriptor, KernelError> {
        let at = self.pos;
        let name = self.ident()?;
        let d = match name.as_str() {
            "free" => GroupDescriptor::Free(self.args1()? as u32),
            "lattice" | "z" => GroupDescriptor::Lattice(self.args1()? as usize),
            "cyclic" => GroupDescriptor::Cyclic(self.args1()?),
            "semidirect" => {
                self.eat(b'(')?;
                let matrix = self.matrix()?;
                self.eat(b',')?;
                let order = self.uint()?;
                self.eat(b')')?;
                GroupDescriptor::Semidirect { matrix, order }
            }
            "dihedral-infinite" | "infinite-dihedral" => GroupDescriptor::infinite_dihedral(),
            "companion-semidirect" => {
                let m = self.args1()?;
                GroupDescriptor::Semidirect { matrix: MatrixKind::Companion(m), order: m }
            }
            "cyclotomic-semidirect" => {
                let m = self.args1()?;
                GroupDescriptor::Semidirect { matrix: MatrixKind::Cyclotomic(m), order: m }
            }
            "heisenberg" => GroupDescriptor::Heisenberg(self.args1()?),
            "heisenberg-semidirect" => GroupDescriptor::HeisenbergSemidirect(self.args1()?),
            "wreath" => {
                self.eat(b'(')?;
                let lamp = self.descriptor()?;
                self.eat(b',')?;
                let base = self.descriptor()?;
                self.eat(b')')?;
                GroupDescriptor::wreath(lamp, base)
            }
            "product" => {
                self.eat(b'(')?;
                let mut parts = vec![self.descriptor()?];
                while self.peek() == Some(b',') {
                    self.eat(b',')?;
                    parts.push(self.descriptor()?);
                }
                self.eat(b')')?;
                GroupDescriptor::Product(parts)
            }
            "dihedral" => GroupDescriptor::Dihedral(self.args1()?),
            "sym" | "symmetric" => GroupDescriptor::Symmetric(self.args1()? as u32),
            "extraspecial3" => GroupDescriptor::Extraspecial3,
            "quaternion" | "q8" => GroupDescriptor::Quaternion,
            "quotient" => {
                self.eat(b'(')?;
                let base = self.descriptor()?;
                self.eat(b',')?;
                let modulus = self.uint()?;
                self.eat(b')')?;
                GroupDescriptor::quotient(base, modulus)
            }
            other => {
                self.pos = at;
                return Err(self.err(&format!("unknown group `{other}`")));
            }
        };
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for text in [
            "free(2)",
            "lattice(5)",
            "semidirect(companion(6),6)",
            "semidirect([[0,-1],[1,-1]],3)",
            "wreath(free(2),lattice(5))",
            "product(wreath(cyclic(2),lattice(1)),sym(4))",
            "quotient(semidirect(companion(2),2),10)",
            "heisenberg-semidirect(2)",
            "extraspecial3",
        ] {
            let d: GroupDescriptor = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
        let d: GroupDescriptor = " dihedral-infinite ".parse().unwrap();
        assert_eq!(d, GroupDescriptor::infinite_dihedral());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match "wreath(free(2) lattice(5))".parse::<GroupDescriptor>() {
            Err(KernelError::Descriptor { position, .. }) => assert_eq!(position, 15),
            other => panic!("{other:?}"),
        }
        assert!("frobnicate(3)".parse::<GroupDescriptor>().is_err());
    }

    #[test]
    fn orders() {
        let d = |s: &str| s.parse::<GroupDescriptor>().unwrap();
        assert_eq!(d("dihedral(4)").order(), Some(8));
        assert_eq!(d("sym(4)").order(), Some(24));
        assert_eq!(d("quotient(semidirect(companion(6),6),3)").order(), Some(6 * 243));
        assert_eq!(d("product(quaternion,cyclic(3))").order(), Some(24));
        assert_eq!(d("lattice(2)").order(), None);
        assert_eq!(d("quotient(heisenberg(2),5)").order(), Some(125));
    }
}
