//! Elements of the completed tensor product `K_inf (x) A`, stored as one
//! coefficient series per basis monomial of A.

use std::collections::HashMap;
use std::fmt;

use crate::curve::{AElem, CurveDatum};
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::series::{Exp, Prec, RamSeries};

/// `sum_b s_b(u) (x) b`; every coordinate, and every coordinate beyond the
/// stored ones, is known modulo `u^prec`.
#[derive(Clone)]
pub struct TateSeries {
    curve: CurveDatum,
    field: Fq,
    coords: Vec<RamSeries>,
    prec: Prec,
}

impl fmt::Debug for TateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl TateSeries {
    pub fn new(curve: &CurveDatum, coords: Vec<RamSeries>, prec: Prec) -> TateSeries {
        let field = coords.first().map_or_else(|| curve.field().clone(), |s| s.field().clone());
        let mut coords: Vec<RamSeries> = coords.into_iter().map(|s| s.truncate(prec)).collect();
        while coords.last().is_some_and(|s| s.is_zero()) {
            coords.pop();
        }
        TateSeries { curve: curve.clone(), field, coords, prec }
    }

    pub fn zero(curve: &CurveDatum, prec: Prec) -> TateSeries {
        TateSeries { curve: curve.clone(), field: curve.field().clone(), coords: Vec::new(), prec }
    }

    /// `1 (x) a`, exact.
    pub fn from_a(curve: &CurveDatum, a: &AElem) -> TateSeries {
        let f = curve.field();
        let coords = a.coords().iter().map(|c| RamSeries::constant(f, *c)).collect();
        TateSeries::new(curve, coords, Prec::Infinite)
    }

    /// `s (x) 1`.
    pub fn scalar(curve: &CurveDatum, s: &RamSeries) -> TateSeries {
        TateSeries::new(curve, vec![s.clone()], s.prec())
    }

    /// `sum_b s_b (x) b` from explicit pairs (finite, with coordinate precisions).
    pub fn from_pairs(curve: &CurveDatum, pairs: &[(AElem, RamSeries)]) -> TateSeries {
        let mut acc = TateSeries::zero(curve, Prec::Infinite);
        for (a, s) in pairs {
            acc = acc.add(&TateSeries::from_a(curve, a).mul_scalar(s));
        }
        acc
    }

    pub fn curve(&self) -> &CurveDatum {
        &self.curve
    }
    pub fn field(&self) -> &Fq {
        &self.field
    }
    pub fn prec(&self) -> Prec {
        self.prec
    }
    pub fn coords(&self) -> &[RamSeries] {
        &self.coords
    }
    pub fn coord(&self, k: usize) -> RamSeries {
        self.coords.get(k).cloned().unwrap_or_else(|| RamSeries::zero_to(&self.field, self.prec))
    }
    pub fn len(&self) -> usize {
        self.coords.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
    /// Degree in A of the top stored nonzero coordinate.
    pub fn a_degree(&self) -> Option<i64> {
        self.coords.len().checked_sub(1).map(|k| self.curve.basis_degree(k))
    }
    /// No nonzero coefficient below the precision.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|s| s.is_zero())
    }

    /// Gauss valuation: least exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exp> {
        self.coords.iter().filter_map(|s| s.valuation()).min()
    }
    /// The valuation, or the precision if zero to precision.
    pub fn certified_valuation(&self) -> Prec {
        match self.valuation() {
            Some(v) => Prec::Finite(v),
            None => self.prec,
        }
    }

    /// `sum_k u^(start + k) (x) a[k]`.
    pub fn from_a_coeffs(curve: &CurveDatum, start: i64, a: &[AElem], prec: Prec) -> TateSeries {
        let width = a.iter().map(|x| x.coords().len()).max().unwrap_or(0);
        let f = curve.field();
        let coords = (0..width).map(|b| RamSeries::from_dense(f, start, a.iter().map(|x| x.coord(b)).collect(), prec)).collect();
        TateSeries::new(curve, coords, prec)
    }

    /// Coefficient of `u^i` as an element of A (coordinates must be over the curve field).
    pub fn coeff_a(&self, i: Exp) -> AElem {
        AElem::from_coords(self.coords.iter().map(|s| s.coeff(i)).collect())
    }

    /// Leading term `(v, a)` with `a` in A.
    pub fn red_u(&self) -> Result<(Exp, AElem)> {
        let v = self.valuation().ok_or(Error::Series(crate::error::SeriesError::ZeroSeries))?;
        Ok((v, self.coeff_a(v)))
    }

    fn unify(&self, other: &TateSeries) -> (TateSeries, TateSeries) {
        if self.field == other.field {
            return (self.clone(), other.clone());
        }
        if self.field.size() < other.field.size() {
            (self.lift(&other.field), other.clone())
        } else {
            (self.clone(), other.lift(&self.field))
        }
    }

    /// Coefficientwise image in a larger constant field.
    pub fn lift(&self, big: &Fq) -> TateSeries {
        if &self.field == big {
            return self.clone();
        }
        let emb = self.field.embedding_into(big).expect("constant field embeds");
        TateSeries { curve: self.curve.clone(), field: big.clone(), coords: self.coords.iter().map(|s| s.lift(big, &emb)).collect(), prec: self.prec }
    }

    pub fn add(&self, other: &TateSeries) -> TateSeries {
        let (a, b) = self.unify(other);
        let prec = a.prec.min(b.prec);
        let n = a.coords.len().max(b.coords.len());
        let coords = (0..n)
            .map(|k| match (a.coords.get(k), b.coords.get(k)) {
                (Some(x), Some(y)) => x.add(y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        TateSeries::new(&a.curve, coords, prec).with_field(&a.field)
    }

    fn with_field(mut self, f: &Fq) -> TateSeries {
        self.field = f.clone();
        self
    }

    pub fn neg(&self) -> TateSeries {
        TateSeries { coords: self.coords.iter().map(|s| s.neg()).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &TateSeries) -> TateSeries {
        self.add(&other.neg())
    }

    pub fn truncate(&self, prec: Prec) -> TateSeries {
        let p = self.prec.min(prec);
        TateSeries::new(&self.curve, self.coords.clone(), p).with_field(&self.field)
    }

    /// Multiplication by `s (x) 1`.
    pub fn mul_scalar(&self, s: &RamSeries) -> TateSeries {
        let (a, sb) = self.unify(&TateSeries::scalar(&self.curve, s));
        let s = sb.coord(0);
        let va = a.certified_valuation();
        let vs = s.certified_valuation();
        let prec = prec_of_product(a.prec, va, s.prec(), vs);
        let coords = a.coords.iter().map(|c| c.mul_trunc(&s, prec)).collect();
        TateSeries::new(&a.curve, coords, prec).with_field(&a.field)
    }

    /// Multiplication by a constant of the field.
    pub fn scale(&self, c: FqElem) -> TateSeries {
        TateSeries { coords: self.coords.iter().map(|s| s.scale(c)).collect(), ..self.clone() }
    }

    pub fn mul(&self, other: &TateSeries) -> TateSeries {
        let (a, b) = self.unify(other);
        let f = a.field.clone();
        let curve = &a.curve;
        let prec = prec_of_product(a.prec, a.certified_valuation(), b.prec, b.certified_valuation());
        let emb = curve.field().embedding_into(&f).expect("curve field embeds");
        let mut table: HashMap<(usize, usize), AElem> = HashMap::new();
        let mut out: Vec<RamSeries> = Vec::new();
        for (i, si) in a.coords.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            for (j, sj) in b.coords.iter().enumerate() {
                if sj.is_zero() {
                    continue;
                }
                let prod = si.mul_trunc(sj, prec);
                if prod.is_zero() && prod.prec() >= prec {
                    continue;
                }
                let key = (i.min(j), i.max(j));
                let bij = table.entry(key).or_insert_with(|| curve.mul(&AElem::basis(i), &AElem::basis(j)));
                for (k, c) in bij.coords().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if out.len() <= k {
                        out.resize(k + 1, RamSeries::zero(&f));
                    }
                    out[k] = out[k].add(&prod.scale(emb[c.0 as usize]));
                }
            }
        }
        TateSeries::new(curve, out, prec).with_field(&f)
    }

    pub fn pow(&self, k: u64) -> TateSeries {
        let mut r = TateSeries::from_a(&self.curve, &AElem::one()).lift(&self.field);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Frobenius twist on the `K_inf` side.
    pub fn twist(&self, n: i64) -> TateSeries {
        let q = Exp::from_integer(self.curve.q());
        let factor = if n >= 0 { q.pow(n as i32) } else { Exp::from_integer(1) / q.pow((-n) as i32) };
        TateSeries { coords: self.coords.iter().map(|s| s.twist(n)).collect(), prec: self.prec.scale(factor), ..self.clone() }
    }

    /// All coordinates declared exact (drops the precision bound).
    pub fn exact_part(&self) -> TateSeries {
        TateSeries { coords: self.coords.iter().map(|s| s.exact_part()).collect(), prec: Prec::Infinite, ..self.clone() }
    }

    /// `sum_b s_b * expand(b)^(q^k)` for a series with finitely many coordinates,
    /// accurate to `target` where the coordinates allow it.
    pub fn eval_finite(&self, k: u32, target: i64) -> RamSeries {
        let qk = Exp::from_integer(self.curve.q().pow(k));
        let f = &self.field;
        let emb = self.curve.field().embedding_into(f).expect("curve field embeds");
        let mut acc = RamSeries::zero(f);
        for (b, sb) in self.coords.iter().enumerate() {
            let Some(v) = sb.valuation() else { continue };
            let d = self.curve.basis_degree(b);
            let need = ((Exp::from_integer(target) - v) / qk).ceil().to_integer() + 2 * d + 4;
            let e = self.curve.expand_basis(b, need.max(4)).twist(k as i64);
            let e = if f == self.curve.field() { e } else { e.lift(f, &emb) };
            acc = acc.add(&sb.mul(&e));
        }
        acc.truncate(Prec::at(target))
    }

    /// `monomial | series` per line for nonzero coordinates, then `prec=<N>`.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_zero())
            .map(|(k, s)| format!("{} | {}", self.curve.monomial_name(k), s.to_text()))
            .collect();
        lines.push(format!("prec={}", self.prec));
        lines.join("\n")
    }
}

/// `min(pa + vb, pb + va)` with infinities handled.
pub fn prec_of_product(pa: Prec, va: Prec, pb: Prec, vb: Prec) -> Prec {
    let x = match (pa, vb) {
        (Prec::Finite(p), Prec::Finite(v)) => Prec::Finite(p + v),
        (Prec::Infinite, _) => Prec::Infinite,
        (Prec::Finite(_), Prec::Infinite) => Prec::Infinite,
    };
    let y = match (pb, va) {
        (Prec::Finite(p), Prec::Finite(v)) => Prec::Finite(p + v),
        (Prec::Infinite, _) => Prec::Infinite,
        (Prec::Finite(_), Prec::Infinite) => Prec::Infinite,
    };
    x.min(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::exp_int;

    #[test]
    fn multiplication_matches_expansion() {
        let f = Fq::new(2, 1).unwrap();
        let c = CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap();
        let s1 = RamSeries::from_terms(&f, &[(exp_int(0), FqElem::ONE), (exp_int(1), FqElem::ONE)], Prec::at(20)).unwrap();
        let s2 = RamSeries::from_terms(&f, &[(exp_int(2), FqElem::ONE)], Prec::at(20)).unwrap();
        let a = TateSeries::from_pairs(&c, &[(c.parse_a("y").unwrap(), s1.clone()), (c.parse_a("x").unwrap(), s2.clone())]);
        let b = TateSeries::from_pairs(&c, &[(c.parse_a("y + 1").unwrap(), s2.clone())]);
        let p = a.mul(&b);
        // Evaluate both sides at the generic point: b -> expand(b).
        let ev = |t: &TateSeries| {
            let mut acc = RamSeries::zero(&f);
            for (k, s) in t.coords().iter().enumerate() {
                acc = acc.add(&s.mul(&c.expand_basis(k, 60)));
            }
            acc
        };
        let lhs = ev(&p);
        let rhs = ev(&a).mul(&ev(&b));
        assert!(lhs.sub(&rhs).is_zero());
        assert_eq!(p.prec(), Prec::at(20));
    }

    #[test]
    fn twist_scales_precision() {
        let f = Fq::new(3, 1).unwrap();
        let c = CurveDatum::genus0(&f);
        let s = RamSeries::from_terms(&f, &[(exp_int(1), FqElem::ONE)], Prec::at(5)).unwrap();
        let t = TateSeries::from_pairs(&c, &[(c.parse_a("t").unwrap(), s)]);
        assert_eq!(t.twist(1).prec(), Prec::at(15));
        assert_eq!(t.twist(1).twist(-1).coords(), t.coords());
    }
}
