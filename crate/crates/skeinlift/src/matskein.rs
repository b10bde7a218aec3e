//! N^kappa x N^kappa matrices over braid-skein entries, indexed by sheet
//! assignments alpha: {1..kappa} -> {1..N}.

use std::collections::BTreeMap;

use crate::braid::{compose, SkeinContext, SkeinElement};
use crate::error::{Error, Result};

/// Total map {0..kappa-1} -> {0..N-1}, enumerated lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SheetAssignment(pub Vec<u8>);

impl SheetAssignment {
    pub fn enumerate(n: usize, kappa: usize) -> Vec<SheetAssignment> {
        let total = n.pow(kappa as u32);
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut a = vec![0u8; kappa];
            for slot in (0..kappa).rev() {
                a[slot] = (idx % n) as u8;
                idx /= n;
            }
            out.push(SheetAssignment(a));
        }
        out
    }

    pub fn index(&self, n: usize) -> usize {
        self.0.iter().fold(0usize, |acc, &d| acc * n + d as usize)
    }
}

/// Sparse matrix over skein elements; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatSkein {
    pub n: usize,
    pub kappa: usize,
    pub entries: BTreeMap<(SheetAssignment, SheetAssignment), SkeinElement>,
}

impl MatSkein {
    pub fn zero(n: usize, kappa: usize) -> Self {
        MatSkein { n, kappa, entries: BTreeMap::new() }
    }

    /// |I| = N^kappa.
    pub fn dim(&self) -> usize {
        self.n.pow(self.kappa as u32)
    }

    pub fn identity(n: usize, kappa: usize) -> Self {
        let mut m = MatSkein::zero(n, kappa);
        for alpha in SheetAssignment::enumerate(n, kappa) {
            let e = SkeinElement::identity(&alpha.0);
            m.entries.insert((alpha.clone(), alpha), e);
        }
        m
    }

    pub fn get(&self, alpha: &SheetAssignment, beta: &SheetAssignment) -> Option<&SkeinElement> {
        self.entries.get(&(alpha.clone(), beta.clone()))
    }

    pub fn add_entry(&mut self, alpha: SheetAssignment, beta: SheetAssignment, value: SkeinElement) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&(alpha.clone(), beta.clone())) {
            Some(e) => {
                e.add(&value);
                if e.is_zero() {
                    self.entries.remove(&(alpha, beta));
                }
            }
            None => {
                self.entries.insert((alpha, beta), value);
            }
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }
}

/// Matrix product: entry (alpha, gamma) = sum_beta A[alpha,beta] * B[beta,gamma].
pub fn mat_mul(ctx: &SkeinContext, a: &MatSkein, b: &MatSkein) -> Result<MatSkein> {
    if a.n != b.n || a.kappa != b.kappa {
        return Err(Error::DimensionMismatch(a.n, a.kappa, b.n, b.kappa));
    }
    let mut out = MatSkein::zero(a.n, a.kappa);
    for ((alpha, beta), av) in &a.entries {
        for ((beta2, gamma), bv) in &b.entries {
            if beta != beta2 {
                continue;
            }
            let prod = compose(ctx, av, bv)?;
            out.add_entry(alpha.clone(), gamma.clone(), prod);
        }
    }
    Ok(out)
}

/// Entrywise equality of normal forms.
pub fn mat_equal(a: &MatSkein, b: &MatSkein) -> bool {
    if a.n != b.n || a.kappa != b.kappa {
        return false;
    }
    a.entries == b.entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{letterbraid_from_word, normalize_letterbraid, GenLetter};
    use crate::network::CoverGeom;
    use crate::ring::HbarC;

    fn ctx() -> SkeinContext<'static> {
        SkeinContext { geom: CoverGeom::Trivial, markers: Vec::new(), eq3_sign: -1 }
    }

    #[test]
    fn dims_and_identity() {
        let id = MatSkein::identity(2, 2);
        assert_eq!(id.dim(), 4);
        assert_eq!(id.nonzero_count(), 4);
        let id3 = MatSkein::identity(3, 2);
        assert_eq!(id3.dim(), 9);
    }

    #[test]
    fn identity_is_unit() {
        let c = ctx();
        // a matrix with one nontrivial braid entry (base braids: all decs 0)
        let lb = letterbraid_from_word(2, &[GenLetter::Sigma { k: 0, inverse: false }]).unwrap();
        let el = normalize_letterbraid(&lb, HbarC::one(), -1).unwrap();
        let assigns = SheetAssignment::enumerate(1, 2);
        let mut a = MatSkein::zero(1, 2);
        a.add_entry(assigns[0].clone(), assigns[0].clone(), el);
        let id = MatSkein::identity(1, 2);
        let left = mat_mul(&c, &id, &a).unwrap();
        let right = mat_mul(&c, &a, &id).unwrap();
        assert!(mat_equal(&left, &a));
        assert!(mat_equal(&right, &a));
    }
}
