//! Series in `u` whose coefficients lie in `A[1/l]` for a fixed `l` in A.
//!
//! Used where a product converges for the Gauss norm but its coefficients
//! acquire denominators, so it leaves `A((u))`.

use rayon::prelude::*;

use crate::curve::{AElem, CurveDatum};
use crate::error::{Error, Result};
use crate::series::{exp_int, Prec, RamSeries};
use crate::tate::TateSeries;

/// `num / l^e`, normalized so that `l` does not divide `num` when `e > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: AElem,
    pub e: u32,
}

impl Frac {
    fn zero() -> Frac {
        Frac { num: AElem::zero(), e: 0 }
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// Dense coefficients for exponents `start .. prec`.
#[derive(Clone, Debug)]
pub struct LocSeries {
    curve: CurveDatum,
    ell: AElem,
    start: i64,
    coeffs: Vec<Frac>,
    prec: i64,
}

fn ell_pows(curve: &CurveDatum, ell: &AElem, n: u32) -> Vec<AElem> {
    let mut v = vec![AElem::one()];
    for k in 0..n as usize {
        let next = curve.mul(&v[k], ell);
        v.push(next);
    }
    v
}

impl LocSeries {
    pub fn curve(&self) -> &CurveDatum {
        &self.curve
    }
    pub fn ell(&self) -> &AElem {
        &self.ell
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }

    fn norm(&self, mut num: AElem, mut e: u32) -> Frac {
        if num.is_zero() {
            return Frac::zero();
        }
        while e > 0 {
            match self.curve.div_exact(&num, &self.ell) {
                Some(q) => {
                    num = q;
                    e -= 1;
                }
                None => break,
            }
        }
        Frac { num, e }
    }

    /// Sum of fractions brought to a common denominator.
    fn combine(&self, terms: Vec<(AElem, u32)>, pows: &[AElem]) -> Frac {
        let top = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut acc = AElem::zero();
        for (a, e) in terms {
            let s = if e == top { a } else { self.curve.mul(&a, &pows[(top - e) as usize]) };
            acc = self.curve.add(&acc, &s);
        }
        self.norm(acc, top)
    }

    /// Coefficients of a `TateSeries` over the curve field, below its precision.
    pub fn from_tate(t: &TateSeries, ell: &AElem, cap: i64) -> Result<LocSeries> {
        let curve = t.curve().clone();
        let prec = t.prec().min(Prec::at(cap)).floor_i64();
        for s in t.coords() {
            let s = s.truncate(Prec::at(prec));
            if !s.is_unramified() || s.field() != curve.field() {
                return Err(Error::Invalid("coefficients must lie in F_q((u))".into()));
            }
        }
        let start = t.valuation().map_or(prec, |v| v.floor().to_integer()).min(prec);
        let coeffs = (start..prec).map(|k| Frac { num: t.coeff_a(exp_int(k)), e: 0 }).collect();
        Ok(LocSeries { curve, ell: ell.clone(), start, coeffs, prec })
    }

    /// `s (x) 1` for `s` in `F_q((u))`.
    pub fn scalar(curve: &CurveDatum, ell: &AElem, s: &RamSeries, cap: i64) -> Result<LocSeries> {
        LocSeries::from_tate(&TateSeries::scalar(curve, s), ell, cap)
    }

    pub fn coeff(&self, k: i64) -> Frac {
        if k < self.start || k >= self.prec {
            return Frac::zero();
        }
        self.coeffs[(k - self.start) as usize].clone()
    }

    /// Least exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.start + i as i64)
    }

    pub fn certified_valuation(&self) -> Prec {
        Prec::at(self.valuation().unwrap_or(self.prec))
    }

    /// Largest power of `l` in a denominator.
    pub fn max_denominator(&self) -> u32 {
        self.coeffs.iter().map(|c| c.e).max().unwrap_or(0)
    }

    pub fn truncate(&self, prec: i64) -> LocSeries {
        let p = self.prec.min(prec);
        let keep = (p - self.start).max(0) as usize;
        LocSeries { coeffs: self.coeffs.iter().take(keep).cloned().collect(), prec: p.max(self.start), ..self.clone() }
    }

    pub fn add(&self, other: &LocSeries) -> LocSeries {
        let prec = self.prec.min(other.prec);
        let start = self.start.min(other.start).min(prec);
        let pows = ell_pows(&self.curve, &self.ell, self.max_denominator().max(other.max_denominator()));
        let coeffs = (start..prec)
            .map(|k| {
                let (a, b) = (self.coeff(k), other.coeff(k));
                match (a.is_zero(), b.is_zero()) {
                    (true, _) => b,
                    (_, true) => a,
                    _ => self.combine(vec![(a.num, a.e), (b.num, b.e)], &pows),
                }
            })
            .collect();
        LocSeries { curve: self.curve.clone(), ell: self.ell.clone(), start, coeffs, prec }
    }

    pub fn neg(&self) -> LocSeries {
        let coeffs = self.coeffs.iter().map(|c| Frac { num: self.curve.neg(&c.num), e: c.e }).collect();
        LocSeries { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &LocSeries) -> LocSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LocSeries) -> LocSeries {
        let va = self.valuation().unwrap_or(self.prec);
        let vb = other.valuation().unwrap_or(other.prec);
        let prec = (self.prec + vb).min(other.prec + va);
        let start = (va + vb).min(prec);
        let nz = |s: &LocSeries| -> Vec<(i64, Frac)> {
            (s.start..s.prec).map(|k| (k, s.coeff(k))).filter(|(_, c)| !c.is_zero()).collect()
        };
        let na = nz(self);
        let pows = ell_pows(&self.curve, &self.ell, self.max_denominator() + other.max_denominator());
        let coeffs = (start..prec)
            .into_par_iter()
            .map(|k| {
                let mut terms = Vec::new();
                for (ea, fa) in &na {
                    let fb = other.coeff(k - ea);
                    if !fb.is_zero() {
                        terms.push((self.curve.mul(&fa.num, &fb.num), fa.e + fb.e));
                    }
                }
                if terms.is_empty() {
                    Frac::zero()
                } else {
                    self.combine(terms, &pows)
                }
            })
            .collect();
        LocSeries { curve: self.curve.clone(), ell: self.ell.clone(), start, coeffs, prec }
    }

    /// `u -> u^(q^n)` for `n >= 0`.
    pub fn twist(&self, n: u32) -> LocSeries {
        let s = self.curve.q().pow(n);
        let start = self.start * s;
        let prec = self.prec * s;
        let mut coeffs = vec![Frac::zero(); (prec - start) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * s as usize] = c.clone();
        }
        LocSeries { start, prec, coeffs, ..self.clone() }
    }

    /// `num / den` with `count` coefficients, where the leading coefficient of
    /// `den` must be `l` itself.
    pub fn div(num: &LocSeries, den: &LocSeries, count: usize) -> Result<LocSeries> {
        let vd = den.valuation().ok_or(Error::ZeroElement)?;
        let lead = den.coeff(vd);
        if lead.e != 0 || lead.num != den.ell {
            return Err(Error::NonUnitLeading("leading coefficient is not the localizing element".into()));
        }
        let vn = num.valuation().unwrap_or(num.prec);
        let avail = (num.prec - vn).min(den.prec - vd).max(0) as usize;
        let count = count.min(avail);
        let curve = &num.curve;
        let mut out = LocSeries { curve: curve.clone(), ell: num.ell.clone(), start: vn - vd, coeffs: Vec::new(), prec: vn - vd };
        let z: Vec<Frac> = (0..count as i64).map(|i| den.coeff(vd + i)).collect();
        for k in 0..count {
            let mut terms = vec![(num.coeff(vn + k as i64).num, num.coeff(vn + k as i64).e)];
            for (zi, r) in z[1..=k].iter().zip(out.coeffs.iter().rev()) {
                if !zi.is_zero() && !r.is_zero() {
                    terms.push((curve.neg(&curve.mul(&zi.num, &r.num)), zi.e + r.e));
                }
            }
            let top = terms.iter().map(|t| t.1).max().unwrap_or(0);
            let pows = ell_pows(curve, &num.ell, top);
            let c = out.combine(terms, &pows);
            let c = if c.is_zero() { c } else { out.norm(c.num, c.e + 1) };
            out.coeffs.push(c);
            out.prec += 1;
        }
        Ok(out)
    }

    /// The same series as a `TateSeries` when no coefficient has a denominator.
    pub fn to_tate(&self) -> Option<TateSeries> {
        if self.max_denominator() > 0 {
            return None;
        }
        let a: Vec<AElem> = self.coeffs.iter().map(|c| c.num.clone()).collect();
        Some(TateSeries::from_a_coeffs(&self.curve, self.start, &a, Prec::at(self.prec)))
    }

    /// `k | num` or `k | num / l^e` per nonzero coefficient, then `prec=<N>`.
    pub fn to_text(&self) -> String {
        let c = &self.curve;
        let mut lines = vec![format!("l = {}", c.format_a(&self.ell))];
        for (i, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let k = self.start + i as i64;
            match f.e {
                0 => lines.push(format!("{k} | {}", c.format_a(&f.num))),
                e => lines.push(format!("{k} | ({}) / l^{e}", c.format_a(&f.num))),
            }
        }
        lines.push(format!("prec={}", self.prec));
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fq, FqElem};

    #[test]
    fn inverse_of_x_minus_u() {
        let f = Fq::new(2, 1).unwrap();
        let c = CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap();
        let x = c.parse_a("x").unwrap();
        let den = TateSeries::from_pairs(&c, &[(x.clone(), RamSeries::one(&f)), (AElem::one(), RamSeries::monomial(&f, FqElem::ONE, exp_int(1)))]);
        let den = LocSeries::from_tate(&den, &x, 20).unwrap();
        let one = LocSeries::from_tate(&TateSeries::from_a(&c, &AElem::one()), &x, 20).unwrap();
        let inv = LocSeries::div(&one, &den, 12).unwrap();
        assert_eq!(inv.coeff(3), Frac { num: AElem::one(), e: 4 });
        let back = inv.mul(&den).sub(&one.truncate(inv.prec()));
        assert!(back.certified_valuation() >= Prec::at(12));
    }
}
