//! Exact coefficients: integer Laurent polynomials in hbar and c, with c
//! invertible and hbar not. No floating point in the algebra.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Element of Z[hbar, c^{+-1}] as a sparse exponent map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HbarC {
    terms: BTreeMap<(u32, i32), i64>,
}

impl HbarC {
    pub fn zero() -> Self {
        HbarC::default()
    }

    pub fn one() -> Self {
        HbarC::monomial(0, 0, 1)
    }

    pub fn monomial(hbar_pow: u32, c_pow: i32, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert((hbar_pow, c_pow), coeff);
        }
        HbarC { terms }
    }

    pub fn hbar() -> Self {
        HbarC::monomial(1, 0, 1)
    }

    pub fn c(pow: i32) -> Self {
        HbarC::monomial(0, pow, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)) == Some(&1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, i32), &i64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, hbar_pow: u32, c_pow: i32) -> i64 {
        *self.terms.get(&(hbar_pow, c_pow)).unwrap_or(&0)
    }

    /// Largest hbar exponent present, if any.
    pub fn hbar_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(h, _)| *h).max()
    }

    pub fn scaled(&self, k: i64) -> Self {
        if k == 0 {
            return HbarC::zero();
        }
        HbarC { terms: self.terms.iter().map(|(e, v)| (*e, v * k)).collect() }
    }

    fn insert(&mut self, key: (u32, i32), v: i64) {
        if v == 0 {
            return;
        }
        let entry = self.terms.entry(key).or_insert(0);
        *entry += v;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }
}

impl Add for HbarC {
    type Output = HbarC;
    fn add(mut self, rhs: HbarC) -> HbarC {
        for (k, v) in rhs.terms {
            self.insert(k, v);
        }
        self
    }
}

impl AddAssign for HbarC {
    fn add_assign(&mut self, rhs: HbarC) {
        for (k, v) in rhs.terms {
            self.insert(k, v);
        }
    }
}

impl Sub for HbarC {
    type Output = HbarC;
    fn sub(self, rhs: HbarC) -> HbarC {
        self + (-rhs)
    }
}

impl Neg for HbarC {
    type Output = HbarC;
    fn neg(self) -> HbarC {
        HbarC { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl Mul for &HbarC {
    type Output = HbarC;
    fn mul(self, rhs: &HbarC) -> HbarC {
        let mut out = HbarC::zero();
        for ((h1, c1), v1) in &self.terms {
            for ((h2, c2), v2) in &rhs.terms {
                out.insert((h1 + h2, c1 + c2), v1 * v2);
            }
        }
        out
    }
}

impl Mul for HbarC {
    type Output = HbarC;
    fn mul(self, rhs: HbarC) -> HbarC {
        &self * &rhs
    }
}

impl fmt::Display for HbarC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((h, c), v) in &self.terms {
            let sign = if *v < 0 { "-" } else { "+" };
            if first {
                if *v < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            let mag = v.abs();
            let mut printed = false;
            if mag != 1 || (*h == 0 && *c == 0) {
                write!(f, "{}", mag)?;
                printed = true;
            }
            if *h > 0 {
                if printed {
                    write!(f, "*")?;
                }
                write!(f, "h")?;
                if *h > 1 {
                    write!(f, "^{}", h)?;
                }
                printed = true;
            }
            if *c != 0 {
                if printed {
                    write!(f, "*")?;
                }
                write!(f, "c^{}", c)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_ops() {
        let a = HbarC::one() + HbarC::hbar();
        let b = HbarC::c(-1);
        let p = &a * &b;
        assert_eq!(p.coeff(0, -1), 1);
        assert_eq!(p.coeff(1, -1), 1);
        assert!((p.clone() - p).is_zero());
        assert_eq!(format!("{}", a), "1 + h");
    }
}
