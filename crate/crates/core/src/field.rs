//! Arithmetic in the prime field Z/p.
//!
//! Matrices carry a single [`Field`] for all of their entries; individual
//! coefficients are bare [`Coeff`] residues. [`FieldElement`] pairs a residue
//! with its modulus for callers that want checked, self-describing values.

use crate::error::{Error, Result};

/// A residue in `[0, p)`. Moduli are restricted to primes below 2^16.
pub type Coeff = u16;

/// The prime field Z/p shared by every entry of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u16,
}

impl Default for Field {
    fn default() -> Self {
        Field::Z2
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub const Z2: Field = Field { p: 2 };

    pub fn new(p: u32) -> Result<Self> {
        if p > u16::MAX as u32 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(Field { p: p as u16 })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p as u32
    }

    /// Reduces an arbitrary signed integer into the field.
    #[inline]
    pub fn from_i64(self, x: i64) -> Coeff {
        x.rem_euclid(self.p as i64) as Coeff
    }

    #[inline]
    pub fn add(self, a: Coeff, b: Coeff) -> Coeff {
        let s = a as u32 + b as u32;
        let p = self.p as u32;
        (if s >= p { s - p } else { s }) as Coeff
    }

    #[inline]
    pub fn neg(self, a: Coeff) -> Coeff {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn sub(self, a: Coeff, b: Coeff) -> Coeff {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(self, a: Coeff, b: Coeff) -> Coeff {
        if self.p == 2 {
            return a & b;
        }
        ((a as u32 * b as u32) % self.p as u32) as Coeff
    }

    /// Multiplicative inverse by Fermat exponentiation.
    pub fn inv(self, a: Coeff) -> Result<Coeff> {
        if a == 0 {
            return Err(Error::DivisionByZero(self.p as u32));
        }
        if self.p == 2 {
            return Ok(1);
        }
        let p = self.p as u64;
        let mut base = a as u64 % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Ok(acc as Coeff)
    }

    /// `a / b`; `b` must be nonzero.
    #[inline]
    pub fn div(self, a: Coeff, b: Coeff) -> Result<Coeff> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn element(self, value: i64) -> FieldElement {
        FieldElement {
            value: self.from_i64(value),
            field: self,
        }
    }
}

/// A residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: Coeff,
    field: Field,
}

impl FieldElement {
    pub fn new(value: i64, p: u32) -> Result<Self> {
        Ok(Field::new(p)?.element(value))
    }

    pub fn value(self) -> Coeff {
        self.value
    }

    pub fn field(self) -> Field {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElement) -> Result<Field> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(self.field)
    }

    // fallible, so not `std::ops::Add`
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: FieldElement) -> Result<FieldElement> {
        let f = self.check(other)?;
        Ok(FieldElement {
            value: f.add(self.value, other.value),
            field: f,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: FieldElement) -> Result<FieldElement> {
        let f = self.check(other)?;
        Ok(FieldElement {
            value: f.mul(self.value, other.value),
            field: f,
        })
    }

    pub fn inv(self) -> Result<FieldElement> {
        Ok(FieldElement {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: i64, p: u32) -> FieldElement {
        FieldElement::new(v, p).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(el(1, 2).add(el(1, 2)).unwrap().value(), 0);
        assert_eq!(el(2, 3).add(el(2, 3)).unwrap().value(), 1);
        assert_eq!(el(4, 5).add(el(3, 5)).unwrap().value(), 2);
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(el(1, 2).mul(el(1, 2)).unwrap().value(), 1);
        assert_eq!(el(2, 3).mul(el(2, 3)).unwrap().value(), 1);
        assert_eq!(el(3, 7).mul(el(5, 7)).unwrap().value(), 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(el(1, 2).inv().unwrap().value(), 1);
        assert_eq!(el(2, 3).inv().unwrap().value(), 2);
        assert_eq!(el(3, 11).inv().unwrap().value(), 4);
    }

    #[test]
    fn errors() {
        assert_eq!(el(0, 5).inv(), Err(Error::DivisionByZero(5)));
        assert_eq!(el(1, 2).add(el(1, 3)), Err(Error::ModulusMismatch(2, 3)));
        assert_eq!(el(1, 2).mul(el(1, 3)), Err(Error::ModulusMismatch(2, 3)));
        assert!(Field::new(4).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(65537).is_err());
        assert!(Field::new(65521).is_ok());
    }

    #[test]
    fn inverse_property_small_primes() {
        for p in [2u32, 3, 5, 7, 11, 13, 65521] {
            let f = Field::new(p).unwrap();
            for a in 1..p.min(500) {
                let a = a as Coeff;
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [2u32, 3, 5] {
            let f = Field::new(p).unwrap();
            let els: Vec<Coeff> = (0..p as Coeff).collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), 0);
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }
}
