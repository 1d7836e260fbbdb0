//! Ideals of A given by generators, with their degree filtration.

use std::sync::{Arc, RwLock};

use crate::curve::{AElem, CurveDatum};
use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::linalg::{rref, top_echelon};

/// Extra degrees required past the Riemann-Roch threshold before the
/// quotient dimension is trusted.
pub const STABILIZATION_MARGIN: i64 = 3;
/// Largest degree explored while waiting for the quotient to stabilize.
pub const STABILIZATION_CAP: i64 = 64;

struct Inner {
    curve: CurveDatum,
    gens: Vec<AElem>,
    deg: i64,
    stable_at: i64,
    /// Echelon basis of I(<= d) for d up to the stored bound, sorted by degree.
    echelon: RwLock<(i64, Vec<AElem>)>,
}

/// An ideal I of A with its stabilized codimension deg(I) and filtration I(<= d).
#[derive(Clone)]
pub struct IdealHandle(Arc<Inner>);

impl std::fmt::Debug for IdealHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let g: Vec<String> = self.0.gens.iter().map(|a| self.0.curve.format_a(a)).collect();
        write!(f, "({})", g.join("; "))
    }
}

/// Span of all monomial multiples `m g` with `deg(m g) <= d`, in A(<= d) coordinates.
fn multiples(curve: &CurveDatum, gens: &[AElem], d: i64) -> Vec<Vec<FqElem>> {
    let n = curve.dim_leq(d);
    let mut rows = Vec::new();
    for g in gens {
        let dg = curve.degree(g);
        for k in 0..curve.dim_leq(d - dg) {
            let mut v = curve.mul(&AElem::basis(k), g).coords().to_vec();
            v.resize(n, FqElem::ZERO);
            rows.push(v);
        }
    }
    rows
}

impl IdealHandle {
    /// Stabilizes `dim A(<= D) / S_D` and records deg(I).
    pub fn new(curve: &CurveDatum, gens: Vec<AElem>) -> Result<IdealHandle> {
        let gens: Vec<AElem> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            return Err(Error::Invalid("ideal needs a nonzero generator".into()));
        }
        let f = curve.field();
        let maxdeg = gens.iter().map(|g| curve.degree(g)).max().unwrap();
        let threshold = 2 * curve.genus() - 1 + maxdeg + STABILIZATION_MARGIN;
        let codim = |d: i64| {
            let rows = multiples(curve, &gens, d);
            let n = curve.dim_leq(d);
            n - rref(f, rows, n).rank()
        };
        let mut prev = codim(maxdeg);
        let mut d = maxdeg + 1;
        loop {
            let c = codim(d);
            if c == prev && d >= threshold {
                break;
            }
            if d >= STABILIZATION_CAP {
                return Err(Error::NotStabilized(d as usize));
            }
            prev = c;
            d += 1;
        }
        let h = IdealHandle(Arc::new(Inner {
            curve: curve.clone(),
            gens,
            deg: prev as i64,
            stable_at: d,
            echelon: RwLock::new((i64::MIN, Vec::new())),
        }));
        h.ensure(d);
        Ok(h)
    }

    /// The unit ideal A.
    pub fn unit(curve: &CurveDatum) -> IdealHandle {
        IdealHandle::new(curve, vec![AElem::one()]).expect("unit ideal stabilizes")
    }

    pub fn curve(&self) -> &CurveDatum {
        &self.0.curve
    }
    pub fn generators(&self) -> &[AElem] {
        &self.0.gens
    }
    /// deg(I) = dim A/I.
    pub fn degree(&self) -> i64 {
        self.0.deg
    }

    fn ensure(&self, d: i64) {
        if self.0.echelon.read().unwrap().0 >= d {
            return;
        }
        let c = &self.0.curve;
        let big = d.max(self.0.stable_at);
        let n = c.dim_leq(big);
        let rows = multiples(c, &self.0.gens, big);
        let ech: Vec<AElem> = top_echelon(c.field(), rows, n).into_iter().map(AElem::from_coords).collect();
        let mut w = self.0.echelon.write().unwrap();
        if w.0 < big {
            *w = (big, ech);
        }
    }

    /// Echelon basis of I(<= d): sign 1, pairwise distinct degrees, increasing.
    pub fn basis_leq(&self, d: i64) -> Vec<AElem> {
        self.ensure(d);
        let c = &self.0.curve;
        self.0.echelon.read().unwrap().1.iter().filter(|a| c.degree(a) <= d).cloned().collect()
    }

    /// dim I(<= d).
    pub fn dim_leq(&self, d: i64) -> usize {
        self.basis_leq(d).len()
    }

    /// Least `j` with dim I(<= j) = m + 1.
    pub fn j(&self, m: usize) -> i64 {
        let mut d = self.0.stable_at + m as i64 + 2;
        loop {
            let b = self.basis_leq(d);
            if b.len() > m {
                return self.0.curve.degree(&b[m]);
            }
            d *= 2;
        }
    }

    /// The element of least degree with sign 1.
    pub fn a_i(&self) -> AElem {
        self.basis_leq(self.j(0))[0].clone()
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, a: &AElem) -> bool {
        let c = &self.0.curve;
        if a.is_zero() {
            return true;
        }
        let basis = self.basis_leq(c.degree(a));
        let mut r = a.clone();
        for b in basis.iter().rev() {
            let top = b.top_index().unwrap();
            let coef = r.coord(top);
            if !coef.is_zero() {
                r = c.sub(&r, &c.scale(b, coef));
            }
        }
        r.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fq;

    #[test]
    fn unit_ideal_genus0() {
        let f = Fq::new(3, 1).unwrap();
        let c = CurveDatum::genus0(&f);
        let i = IdealHandle::unit(&c);
        assert_eq!(i.degree(), 0);
        for d in 0..6 {
            assert_eq!(i.dim_leq(d), d as usize + 1);
        }
        assert_eq!(i.j(4), 4);
        assert_eq!(i.a_i(), AElem::one());
    }

    #[test]
    fn point_ideal_genus1() {
        let f = Fq::new(2, 1).unwrap();
        let c = CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap();
        let i = IdealHandle::new(&c, vec![c.parse_a("x").unwrap(), c.parse_a("y").unwrap()]).unwrap();
        assert_eq!(i.degree(), 1);
        for m in 0..6 {
            assert_eq!(i.j(m), m as i64 + 2);
        }
        assert_eq!(c.format_a(&i.a_i()), "x");
        assert!(!i.contains(&AElem::one()));
        assert!(i.contains(&c.parse_a("x*y + x^2").unwrap()));
    }

    #[test]
    fn principal_ideal() {
        let f = Fq::new(3, 1).unwrap();
        let c = CurveDatum::genus0(&f);
        let a = c.parse_a("2*t^2 + 1").unwrap();
        let i = IdealHandle::new(&c, vec![a.clone()]).unwrap();
        assert_eq!(i.degree(), 2);
        assert_eq!(c.format_a(&i.a_i()), "t^2 + 2");
    }
}
