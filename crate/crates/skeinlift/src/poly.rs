//! Dense complex polynomials, rational functions and root solving.


use crate::error::{Error, Result};
use crate::geom::C;

const ABERTH_MAX_ITERS: usize = 400;
const NEWTON_POLISH_ITERS: usize = 4;
const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Polynomial with complex coefficients, stored low degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub c: Vec<C>,
}

impl Poly {
    pub fn new(c: Vec<C>) -> Self {
        let mut p = Poly { c };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly { c: vec![C::new(1.0, 0.0)] }
    }

    pub fn constant(v: C) -> Self {
        Poly::new(vec![v])
    }

    pub fn from_real(c: &[f64]) -> Self {
        Poly::new(c.iter().map(|x| C::new(*x, 0.0)).collect())
    }

    /// z as a polynomial.
    pub fn var() -> Self {
        Poly { c: vec![C::new(0.0, 0.0), C::new(1.0, 0.0)] }
    }

    pub fn trim(&mut self) {
        while let Some(last) = self.c.last() {
            if last.norm() == 0.0 {
                self.c.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for coeff in self.c.iter().rev() {
            acc = acc * z + coeff;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, a)| a * C::new((i + 1) as f64, 0.0))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![C::new(0.0, 0.0); n];
        for (i, a) in self.c.iter().enumerate() {
            c[i] += a;
        }
        for (i, b) in other.c.iter().enumerate() {
            c[i] += b;
        }
        Poly::new(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![C::new(0.0, 0.0); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly::new(self.c.iter().map(|a| a * s).collect())
    }

    /// Coefficient magnitude scale, for relative tolerances.
    pub fn coeff_scale(&self) -> f64 {
        self.c.iter().map(|a| a.norm()).fold(0.0, f64::max).max(1.0)
    }

    /// All roots via Aberth-Ehrlich simultaneous iteration with Newton polish.
    /// Deterministic; certified by the residual bound.
    pub fn roots(&self) -> Result<Vec<C>> {
        let n = self.degree();
        if self.c.is_empty() || n == 0 {
            return Ok(vec![]);
        }
        let an = *self.c.last().unwrap();
        if an.norm() == 0.0 {
            return Err(Error::PolynomialSolveFailure { residual: f64::INFINITY });
        }
        if n == 1 {
            return Ok(vec![-self.c[0] / an]);
        }
        if n == 2 {
            // stable quadratic formula
            let a = an;
            let b = self.c[1];
            let c0 = self.c[0];
            let disc = (b * b - a * c0 * 4.0).sqrt();
            let q = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
            let mut r = if q.norm() > 0.0 {
                vec![-q / (a * 2.0), -c0 * 2.0 / q]
            } else {
                vec![C::new(0.0, 0.0), C::new(0.0, 0.0)]
            };
            r.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
            return Ok(r);
        }
        // monic copy
        let monic: Vec<C> = self.c.iter().map(|a| a / an).collect();
        let p = Poly { c: monic.clone() };
        let dp = p.derivative();

        // Bini-style init: circle of radius from coefficient bounds, irrational phase
        let mut radius: f64 = 0.0;
        for (i, a) in monic.iter().enumerate().take(n) {
            let r = a.norm().powf(1.0 / ((n - i) as f64));
            radius = radius.max(r);
        }
        radius = (radius * 2.0).max(0.5);
        let mut z: Vec<C> = (0..n)
            .map(|k| C::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4))
            .collect();

        for _ in 0..ABERTH_MAX_ITERS {
            let mut moved: f64 = 0.0;
            for k in 0..n {
                let pk = p.eval(z[k]);
                let dpk = dp.eval(z[k]);
                let newton = if dpk.norm() > 0.0 { pk / dpk } else { pk };
                let mut sum = C::new(0.0, 0.0);
                for j in 0..n {
                    if j != k {
                        let d = z[k] - z[j];
                        if d.norm() > 1e-300 {
                            sum += C::new(1.0, 0.0) / d;
                        }
                    }
                }
                let den = C::new(1.0, 0.0) - newton * sum;
                let w = if den.norm() > 1e-300 { newton / den } else { newton };
                z[k] -= w;
                moved = moved.max(w.norm());
            }
            if moved < 1e-14 * radius.max(1.0) {
                break;
            }
        }

        // Newton polish against the original coefficients
        let dself = self.derivative();
        for zk in z.iter_mut() {
            for _ in 0..NEWTON_POLISH_ITERS {
                let f = self.eval(*zk);
                let df = dself.eval(*zk);
                if df.norm() < 1e-300 {
                    break;
                }
                *zk -= f / df;
            }
        }

        // certify
        let scale = self.coeff_scale() * z.iter().map(|r| r.norm().max(1.0).powi(n as i32)).fold(1.0, f64::max);
        let worst = z.iter().map(|r| self.eval(*r).norm()).fold(0.0, f64::max);
        if worst > ROOT_RESIDUAL_TOL * scale {
            return Err(Error::PolynomialSolveFailure { residual: worst / scale });
        }
        // deterministic order
        z.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Ok(z)
    }
}

/// Ratio of two complex polynomials in z.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("rational function with zero denominator".into()));
        }
        let mut r = RationalFn { num, den };
        r.reduce()?;
        Ok(r)
    }

    pub fn zero() -> Self {
        RationalFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn poly(p: Poly) -> Self {
        RationalFn { num: p, den: Poly::one() }
    }

    /// Remove common roots within tolerance (keeps the representation reduced).
    fn reduce(&mut self) -> Result<()> {
        if self.num.is_zero() || self.den.degree() == 0 {
            return Ok(());
        }
        let den_roots = self.den.roots()?;
        let scale = self.num.coeff_scale();
        let mut den = self.den.clone();
        let mut num = self.num.clone();
        for r in den_roots {
            if num.eval(r).norm() < 1e-9 * scale && num.degree() > 0 {
                num = deflate(&num, r);
                den = deflate(&den, r);
            }
        }
        self.num = num;
        self.den = den;
        Ok(())
    }

    pub fn eval(&self, z: C) -> C {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn poles(&self) -> Result<Vec<C>> {
        if self.den.degree() == 0 {
            return Ok(vec![]);
        }
        self.den.roots()
    }

    /// Degree growth at infinity: deg(num) - deg(den). Positive means a pole at infinity.
    pub fn degree_growth(&self) -> i64 {
        if self.num.is_zero() {
            return i64::MIN;
        }
        self.num.degree() as i64 - self.den.degree() as i64
    }
}

/// Synthetic division by (z - r); remainder discarded.
pub fn deflate(p: &Poly, r: C) -> Poly {
    let n = p.c.len();
    if n <= 1 {
        return Poly::zero();
    }
    let mut out = vec![C::new(0.0, 0.0); n - 1];
    let mut carry = p.c[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = carry;
        carry = p.c[i] + carry * r;
    }
    Poly::new(out)
}

/// Determinant of a dense complex matrix by partial-pivot elimination.
pub fn det_complex(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    let mut det = C::new(1.0, 0.0);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if m[row][col].norm() > m[piv][col].norm() {
                piv = row;
            }
        }
        if m[piv][col].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        let inv = C::new(1.0, 0.0) / m[col][col];
        for row in col + 1..n {
            let f = m[row][col] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let sub = m[col][k] * f;
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// Resultant of f and g (univariate, complex coefficients) via Sylvester determinant.
pub fn resultant(f: &Poly, g: &Poly) -> C {
    let m = f.degree();
    let n = g.degree();
    if f.is_zero() || g.is_zero() {
        return C::new(0.0, 0.0);
    }
    if m == 0 {
        return f.c[0].powu(n as u32);
    }
    if n == 0 {
        return g.c[0].powu(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![C::new(0.0, 0.0); size]; size];
    for i in 0..n {
        for (j, a) in f.c.iter().rev().enumerate() {
            mat[i][i + j] = *a;
        }
    }
    for i in 0..m {
        for (j, b) in g.c.iter().rev().enumerate() {
            mat[n + i][i + j] = *b;
        }
    }
    det_complex(mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn roots_quadratic() {
        // p^2 - 4 -> roots +-2
        let p = Poly::from_real(&[-4.0, 0.0, 1.0]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-10);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn roots_cubic_residuals() {
        // p^3 - 3p + 1: three real roots
        let p = Poly::from_real(&[1.0, -3.0, 0.0, 1.0]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!(p.eval(*z).norm() < 1e-10, "residual {:e}", p.eval(*z).norm());
        }
    }

    #[test]
    fn roots_double() {
        // (p-1)^2: converges to the double root within loose residual
        let p = Poly::from_real(&[1.0, -2.0, 1.0]);
        let r = p.roots().unwrap();
        for z in &r {
            assert!((z - c(1.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn resultant_matches_discriminant() {
        // disc(p^2 - z) in p at z=3 is -4*(-3)... Res(p^2-3, 2p) = 4*(-3)=-12? direct: det
        let f = Poly::from_real(&[-3.0, 0.0, 1.0]);
        let g = f.derivative();
        let r = resultant(&f, &g);
        // Res(p^2 - 3, 2p) = product over roots of f of g = 2*sqrt3 * (-2 sqrt3) = -12
        assert!((r - c(-12.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn deflate_removes_root() {
        let p = Poly::from_real(&[-2.0, 1.0]).mul(&Poly::from_real(&[3.0, 1.0]));
        let q = deflate(&p, c(2.0, 0.0));
        assert_eq!(q.degree(), 1);
        assert!(q.eval(c(-3.0, 0.0)).norm() < 1e-12);
    }
}
