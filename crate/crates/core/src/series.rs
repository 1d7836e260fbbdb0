//! Ramified Laurent series in `u` with explicit absolute precision.
//!
//! A [`RamSeries`] stores the exponents in `(1/ram)·Z` as integer numerators
//! and keeps its coefficients in a dense window `[start, start + len)`.
//! Everything below `prec` is exact; `prec = Infinite` marks an exact series
//! (in particular the exact zero).

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::SeriesError;
use crate::field::{Fq, FqElem};

/// Exponents of `u` are exact rationals.
pub type Exp = Ratio<i64>;

/// Absolute precision: exponents strictly below a finite bound are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prec {
    Finite(Exp),
    Infinite,
}

impl Prec {
    pub fn at(n: i64) -> Prec {
        Prec::Finite(Exp::from_integer(n))
    }
    pub fn finite(self) -> Option<Exp> {
        match self {
            Prec::Finite(x) => Some(x),
            Prec::Infinite => None,
        }
    }
    pub fn is_infinite(self) -> bool {
        matches!(self, Prec::Infinite)
    }
    pub fn min(self, other: Prec) -> Prec {
        if self <= other {
            self
        } else {
            other
        }
    }
    pub fn plus(self, x: Exp) -> Prec {
        match self {
            Prec::Finite(p) => Prec::Finite(p + x),
            Prec::Infinite => Prec::Infinite,
        }
    }
    pub fn scale(self, x: Exp) -> Prec {
        match self {
            Prec::Finite(p) => Prec::Finite(p * x),
            Prec::Infinite => Prec::Infinite,
        }
    }
    /// Floor of a finite bound, saturating for the infinite one.
    pub fn floor_i64(self) -> i64 {
        match self {
            Prec::Finite(p) => p.floor().to_integer(),
            Prec::Infinite => i64::MAX,
        }
    }
    /// Whether `self >= n`.
    pub fn reaches(self, n: Exp) -> bool {
        self >= Prec::Finite(n)
    }
}

impl PartialOrd for Prec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Prec {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Prec::Finite(a), Prec::Finite(b)) => a.cmp(b),
            (Prec::Finite(_), Prec::Infinite) => Ordering::Less,
            (Prec::Infinite, Prec::Finite(_)) => Ordering::Greater,
            (Prec::Infinite, Prec::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Prec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prec::Finite(p) => write!(f, "{}", fmt_exp(*p)),
            Prec::Infinite => write!(f, "inf"),
        }
    }
}

pub fn fmt_exp(x: Exp) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_exp(s: &str) -> Result<Exp, SeriesError> {
    let bad = || SeriesError::Parse(s.to_string());
    match s.split_once('/') {
        Some((a, b)) => {
            let d: i64 = b.trim().parse().map_err(|_| bad())?;
            if d <= 0 {
                return Err(bad());
            }
            Ok(Exp::new(a.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(Exp::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// A ramified Laurent series over a finite field, with absolute precision.
#[derive(Clone)]
pub struct RamSeries {
    field: Fq,
    ram: i64,
    start: i64,
    coeffs: Vec<FqElem>,
    prec: Option<i64>,
}

impl fmt::Debug for RamSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl RamSeries {
    // ---- construction -------------------------------------------------

    /// Builds from a dense window of numerators over `ram` and normalizes.
    pub(crate) fn from_window(field: &Fq, ram: i64, start: i64, coeffs: Vec<FqElem>, prec: Option<i64>) -> RamSeries {
        let mut s = RamSeries { field: field.clone(), ram, start, coeffs, prec };
        s.normalize();
        s
    }

    /// Dense window over integer exponents starting at `start`.
    pub fn from_dense(field: &Fq, start: i64, coeffs: Vec<FqElem>, prec: Prec) -> RamSeries {
        let p = match prec {
            Prec::Infinite => None,
            Prec::Finite(x) => Some(x.ceil().to_integer()),
        };
        RamSeries::from_window(field, 1, start, coeffs, p)
    }

    pub fn zero(field: &Fq) -> RamSeries {
        RamSeries { field: field.clone(), ram: 1, start: 0, coeffs: Vec::new(), prec: None }
    }

    /// `O(u^prec)`.
    pub fn zero_to(field: &Fq, prec: Prec) -> RamSeries {
        RamSeries::from_terms(field, &[], prec).expect("zero with admissible precision")
    }

    pub fn constant(field: &Fq, c: FqElem) -> RamSeries {
        RamSeries::from_window(field, 1, 0, vec![c], None)
    }

    pub fn one(field: &Fq) -> RamSeries {
        RamSeries::constant(field, FqElem::ONE)
    }

    /// Exact monomial `c u^j`.
    pub fn monomial(field: &Fq, c: FqElem, j: Exp) -> RamSeries {
        RamSeries::from_terms(field, &[(j, c)], Prec::Infinite).expect("admissible exponent")
    }

    /// Builds a series from explicit terms; terms at or above `prec` are dropped.
    pub fn from_terms(field: &Fq, terms: &[(Exp, FqElem)], prec: Prec) -> Result<RamSeries, SeriesError> {
        let mut ram: i64 = 1;
        for (j, _) in terms {
            ram = ram.lcm(j.denom());
        }
        if let Prec::Finite(p) = prec {
            ram = ram.lcm(p.denom());
        }
        check_ram(field, ram)?;
        let pnum = prec.finite().map(|p| (p * ram).to_integer());
        let nums: Vec<(i64, FqElem)> = terms
            .iter()
            .map(|(j, c)| ((*j * ram).to_integer(), *c))
            .filter(|(j, c)| !c.is_zero() && pnum.is_none_or(|p| *j < p))
            .collect();
        if nums.is_empty() {
            return Ok(RamSeries::from_window(field, ram, 0, Vec::new(), pnum));
        }
        let lo = nums.iter().map(|x| x.0).min().unwrap();
        let hi = nums.iter().map(|x| x.0).max().unwrap();
        let mut w = vec![FqElem::ZERO; (hi - lo + 1) as usize];
        for (j, c) in nums {
            let slot = &mut w[(j - lo) as usize];
            *slot = field.add(*slot, c);
        }
        Ok(RamSeries::from_window(field, ram, lo, w, pnum))
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        if let Some(p) = self.prec {
            let keep = (p - self.start).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
            while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                self.coeffs.pop();
            }
        }
        if self.coeffs.is_empty() {
            self.start = 0;
        }
        // Reduce the ramification to the smallest admissible denominator.
        let mut g = self.ram;
        if let Some(p) = self.prec {
            g = g.gcd(&p);
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(self.start + i as i64));
            }
        }
        if g > 1 {
            let gu = g as usize;
            self.ram /= g;
            self.prec = self.prec.map(|p| p / g);
            if !self.coeffs.is_empty() {
                self.start /= g;
                self.coeffs = self.coeffs.iter().step_by(gu).copied().collect();
            }
        }
    }

    // ---- accessors ----------------------------------------------------

    pub fn field(&self) -> &Fq {
        &self.field
    }
    pub fn ram(&self) -> i64 {
        self.ram
    }
    pub fn prec(&self) -> Prec {
        match self.prec {
            Some(p) => Prec::Finite(Exp::new(p, self.ram)),
            None => Prec::Infinite,
        }
    }
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    /// No nonzero coefficient below the precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }
    /// Least exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exp> {
        (!self.coeffs.is_empty()).then(|| Exp::new(self.start, self.ram))
    }
    /// Largest certified lower bound for the valuation: the valuation itself
    /// for a nonzero series, the precision for one that is zero to precision.
    pub fn certified_valuation(&self) -> Prec {
        match self.valuation() {
            Some(v) => Prec::Finite(v),
            None => self.prec(),
        }
    }
    /// `(v(a), leading coefficient)`.
    pub fn red_u(&self) -> Result<(Exp, FqElem), SeriesError> {
        match self.valuation() {
            Some(v) => Ok((v, self.coeffs[0])),
            None => Err(SeriesError::ZeroSeries),
        }
    }
    /// Coefficient of `u^j` (zero outside the stored window).
    pub fn coeff(&self, j: Exp) -> FqElem {
        let x = j * self.ram;
        if !x.is_integer() {
            return FqElem::ZERO;
        }
        let i = x.to_integer() - self.start;
        if i < 0 || i >= self.coeffs.len() as i64 {
            FqElem::ZERO
        } else {
            self.coeffs[i as usize]
        }
    }
    /// Coefficient of the integer power `u^j`.
    pub fn coeff_int(&self, j: i64) -> FqElem {
        if self.ram == 1 {
            let i = j - self.start;
            if i < 0 || i >= self.coeffs.len() as i64 {
                FqElem::ZERO
            } else {
                self.coeffs[i as usize]
            }
        } else {
            self.coeff(Exp::from_integer(j))
        }
    }
    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> Vec<(Exp, FqElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (Exp::new(self.start + i as i64, self.ram), *c))
            .collect()
    }
    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
    /// Whether all exponents are integers (and the precision too).
    pub fn is_unramified(&self) -> bool {
        self.ram == 1
    }
    /// Dense window `(start, coefficients)` for an unramified series.
    pub fn window(&self) -> Option<(i64, &[FqElem])> {
        (self.ram == 1).then_some((self.start, &self.coeffs[..]))
    }

    fn same_field(&self, other: &RamSeries) {
        assert!(self.field == other.field, "series over different fields");
    }

    /// Window and precision re-expressed over the denominator `l` (a multiple of `ram`).
    fn spread(&self, l: i64) -> (i64, Vec<FqElem>, Option<i64>) {
        let k = l / self.ram;
        if k == 1 {
            return (self.start, self.coeffs.clone(), self.prec);
        }
        let mut w = vec![FqElem::ZERO; if self.coeffs.is_empty() { 0 } else { (self.coeffs.len() - 1) * k as usize + 1 }];
        for (i, c) in self.coeffs.iter().enumerate() {
            w[i * k as usize] = *c;
        }
        (self.start * k, w, self.prec.map(|p| p * k))
    }

    // ---- ring operations ---------------------------------------------

    pub fn add(&self, other: &RamSeries) -> RamSeries {
        self.same_field(other);
        let l = self.ram.lcm(&other.ram);
        let (sa, wa, pa) = self.spread(l);
        let (sb, wb, pb) = other.spread(l);
        let prec = match (pa, pb) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for (s, w) in [(sa, &wa), (sb, &wb)] {
            if !w.is_empty() {
                lo = lo.min(s);
                hi = hi.max(s + w.len() as i64);
            }
        }
        if lo == i64::MAX {
            return RamSeries::from_window(&self.field, l, 0, Vec::new(), prec);
        }
        if let Some(p) = prec {
            hi = hi.min(p.max(lo));
        }
        let mut out = vec![FqElem::ZERO; (hi - lo).max(0) as usize];
        for (s, w) in [(sa, &wa), (sb, &wb)] {
            for (i, c) in w.iter().enumerate() {
                let j = s + i as i64 - lo;
                if j >= 0 && (j as usize) < out.len() {
                    out[j as usize] = self.field.add(out[j as usize], *c);
                }
            }
        }
        RamSeries::from_window(&self.field, l, lo, out, prec)
    }

    pub fn neg(&self) -> RamSeries {
        let f = &self.field;
        RamSeries { coeffs: self.coeffs.iter().map(|c| f.neg(*c)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &RamSeries) -> RamSeries {
        self.add(&other.neg())
    }

    /// Multiplication by a constant.
    pub fn scale(&self, c: FqElem) -> RamSeries {
        if c.is_zero() {
            return RamSeries::from_window(&self.field, self.ram, 0, Vec::new(), self.prec);
        }
        let f = &self.field;
        RamSeries { coeffs: self.coeffs.iter().map(|x| f.mul(*x, c)).collect(), ..self.clone() }
    }

    /// The known terms, declared exact.
    pub fn exact_part(&self) -> RamSeries {
        RamSeries { prec: None, ..self.clone() }
    }

    /// Same terms with the precision replaced by `prec` (used once a bound
    /// has been certified by other means).
    pub fn with_prec(&self, prec: Prec) -> RamSeries {
        self.exact_part().truncate(prec)
    }

    /// Multiplication by `u^j`.
    pub fn shift(&self, j: Exp) -> RamSeries {
        let l = self.ram.lcm(j.denom());
        let (s, w, p) = self.spread(l);
        let d = (j * l).to_integer();
        RamSeries::from_window(&self.field, l, s + d, w, p.map(|x| x + d))
    }

    /// Drops everything at or above `prec` (never raises the precision).
    pub fn truncate(&self, prec: Prec) -> RamSeries {
        if prec >= self.prec() {
            return self.clone();
        }
        let p = prec.finite().unwrap();
        let l = self.ram.lcm(p.denom());
        let (s, w, _) = self.spread(l);
        RamSeries::from_window(&self.field, l, s, w, Some((p * l).to_integer()))
    }

    pub fn mul(&self, other: &RamSeries) -> RamSeries {
        self.mul_trunc(other, Prec::Infinite)
    }

    /// Product, additionally truncated at `cap`.
    pub fn mul_trunc(&self, other: &RamSeries, cap: Prec) -> RamSeries {
        self.same_field(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return RamSeries::zero(&self.field);
        }
        let l = self.ram.lcm(&other.ram);
        let (sa, wa, pa) = self.spread(l);
        let (sb, wb, pb) = other.spread(l);
        let va = if wa.is_empty() { pa.unwrap() } else { sa };
        let vb = if wb.is_empty() { pb.unwrap() } else { sb };
        let mut prec = match (pa, pb) {
            (Some(x), Some(y)) => Some((x + vb).min(y + va)),
            (Some(x), None) => Some(x + vb),
            (None, Some(y)) => Some(y + va),
            (None, None) => None,
        };
        if let Prec::Finite(c) = cap {
            let c = (c * l).ceil().to_integer();
            prec = Some(prec.map_or(c, |p| p.min(c)));
        }
        if wa.is_empty() || wb.is_empty() {
            return RamSeries::from_window(&self.field, l, 0, Vec::new(), prec);
        }
        let start = sa + sb;
        let mut end = sa + wa.len() as i64 + sb + wb.len() as i64 - 1;
        if let Some(p) = prec {
            end = end.min(p);
        }
        if end <= start {
            return RamSeries::from_window(&self.field, l, 0, Vec::new(), prec);
        }
        let n = (end - start) as usize;
        let mut out = vec![FqElem::ZERO; n];
        let (sparse, dense) = if wa.iter().filter(|c| !c.is_zero()).count() <= wb.iter().filter(|c| !c.is_zero()).count() {
            (&wa, &wb)
        } else {
            (&wb, &wa)
        };
        for (i, c) in sparse.iter().enumerate() {
            if c.is_zero() || i >= n {
                continue;
            }
            let len = dense.len().min(n - i);
            self.field.axpy(&mut out[i..i + len], *c, &dense[..len]);
        }
        RamSeries::from_window(&self.field, l, start, out, prec)
    }

    /// Inverse with relative precision preserved; exact input must be a monomial.
    pub fn inv(&self) -> Result<RamSeries, SeriesError> {
        let (v, c) = self.red_u()?;
        let f = &self.field;
        let cinv = f.inv(c).ok_or(SeriesError::ZeroSeries)?;
        let rel = match self.prec {
            None => {
                if self.nnz() == 1 {
                    return Ok(RamSeries::monomial(f, cinv, -v));
                }
                return Err(SeriesError::PrecisionRequired);
            }
            Some(p) => (p - self.start) as usize,
        };
        // Normalized power series a' = a / (c u^v) in steps of 1/ram.
        let a: Vec<FqElem> = self.coeffs.iter().take(rel).map(|x| f.mul(*x, cinv)).collect();
        let mut b = vec![FqElem::ZERO; rel];
        let mut acc = vec![FqElem::ZERO; rel];
        acc[0] = FqElem::ONE;
        for k in 0..rel {
            let bk = acc[k];
            b[k] = bk;
            if bk.is_zero() {
                continue;
            }
            let len = (a.len()).min(rel - k);
            if len > 1 {
                let nb = f.neg(bk);
                f.axpy(&mut acc[k + 1..k + len], nb, &a[1..len]);
            }
        }
        let b: Vec<FqElem> = b.into_iter().map(|x| f.mul(x, cinv)).collect();
        Ok(RamSeries::from_window(f, self.ram, -self.start, b, Some(rel as i64 - self.start)))
    }

    /// Inverse of a possibly exact series, computed to absolute precision `cap`.
    pub fn inv_to(&self, cap: Prec) -> Result<RamSeries, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::ZeroSeries)?;
        if self.is_exact() && self.nnz() == 1 {
            return self.inv();
        }
        let Prec::Finite(c) = cap else {
            return self.inv();
        };
        if c <= -v {
            return Ok(RamSeries::zero_to(&self.field, cap));
        }
        // b has valuation -v, so a relative precision of c + v suffices.
        let need = Prec::Finite(c + v + v);
        let a = if need < self.prec() { self.truncate(need) } else { self.clone() };
        if a.is_exact() {
            return Err(SeriesError::PrecisionRequired);
        }
        Ok(a.inv()?.truncate(cap))
    }

    pub fn div(&self, other: &RamSeries) -> Result<RamSeries, SeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: u64) -> RamSeries {
        let mut result = RamSeries::one(&self.field);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Frobenius twist: exponents times `q^n`, coefficients raised to `q^n`.
    pub fn twist(&self, n: i64) -> RamSeries {
        let f = &self.field;
        let q = f.q() as i64;
        let coeffs: Vec<FqElem> = if f.frobenius_trivial() {
            self.coeffs.clone()
        } else {
            self.coeffs.iter().map(|c| f.frobenius(*c, n)).collect()
        };
        if n >= 0 {
            let k = q.pow(n as u32);
            let mut w = vec![FqElem::ZERO; if coeffs.is_empty() { 0 } else { (coeffs.len() - 1) * k as usize + 1 }];
            for (i, c) in coeffs.iter().enumerate() {
                w[i * k as usize] = *c;
            }
            RamSeries::from_window(f, self.ram, self.start * k, w, self.prec.map(|p| p * k))
        } else {
            let k = q.pow((-n) as u32);
            RamSeries::from_window(f, self.ram * k, self.start, coeffs, self.prec)
        }
    }

    /// `b` with `b^(q-1) = a`, using the least root of the leading coefficient
    /// (in the smallest extension F_{q^(e k)} containing one) and the unit
    /// root `prod_i w^(-q^i)` of the normalized unit part `w`.
    pub fn root_q_minus_1(&self) -> Result<RamSeries, SeriesError> {
        let f = &self.field;
        let q = f.q() as u64;
        let d = q - 1;
        if d == 1 {
            return Ok(self.clone());
        }
        let (v, c) = self.red_u()?;
        let (big, a) = match f.roots_of(c, d).is_empty() {
            false => (f.clone(), self.clone()),
            true => {
                let mut k = 2;
                loop {
                    let g = Fq::new(f.q(), f.e() * k).map_err(|_| SeriesError::RootObstruction("constant field too large".into()))?;
                    let emb = f.embedding_into(&g).expect("subfield embeds");
                    let cc = emb[c.0 as usize];
                    if !g.roots_of(cc, d).is_empty() {
                        break (g.clone(), self.lift(&g, &emb));
                    }
                    k += 1;
                }
            }
        };
        let (_, cl) = a.red_u()?;
        let r = big.roots_of(cl, d)[0];
        let vr = v / Exp::from_integer(d as i64);
        check_ram(&big, vr.denom().lcm(&a.ram))?;
        let cinv = big.inv(cl).unwrap();
        let w = a.shift(-v).scale(cinv);
        let winv = w.inv()?;
        let rel = w.prec();
        let mut prod = winv.clone();
        let gap = winv.sub(&RamSeries::one(&big)).certified_valuation();
        let mut i = 1;
        loop {
            let reach = gap.scale(Exp::from_integer((q as i64).pow(i as u32)));
            if reach >= rel {
                break;
            }
            prod = prod.mul(&winv.twist(i));
            i += 1;
        }
        Ok(prod.scale(r).shift(vr))
    }

    /// Coefficient-wise image under a field embedding.
    pub fn lift(&self, big: &Fq, emb: &[FqElem]) -> RamSeries {
        RamSeries {
            field: big.clone(),
            ram: self.ram,
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| emb[c.0 as usize]).collect(),
            prec: self.prec,
        }
    }

    /// Exact `q^k`-th root on F_q-coefficient series (coefficient Frobenius inverted).
    pub fn qpow_root(&self, k: u32) -> RamSeries {
        self.twist(-(k as i64))
    }

    /// Whether all exponents (and the precision) lie in `step·Z` for the integer `step`.
    pub fn exponents_divisible_by(&self, step: i64) -> bool {
        let s = Exp::from_integer(step);
        self.terms().iter().all(|(j, _)| (*j / s).is_integer())
    }

    /// Certified valuation of `self - other`.
    pub fn diff_valuation(&self, other: &RamSeries) -> Prec {
        self.sub(other).certified_valuation()
    }

    /// Certified valuation of `self - other` measured from the valuation of `self`
    /// (or of `other` when `self` vanishes).
    pub fn rel_diff(&self, other: &RamSeries) -> Prec {
        let d = self.sub(other).certified_valuation();
        match (d, self.valuation().or(other.valuation())) {
            (Prec::Finite(x), Some(v)) => Prec::Finite(x - v),
            (d, _) => d,
        }
    }

    // ---- text format ---------------------------------------------------

    /// `ram=<m> prec=<N> terms=<j1>:<c1>,...`
    pub fn to_text(&self) -> String {
        let terms: Vec<String> = self.terms().iter().map(|(j, c)| format!("{}:{}", fmt_exp(*j), self.field.format(*c))).collect();
        format!("ram={} prec={} terms={}", self.ram, self.prec(), terms.join(","))
    }

    pub fn parse_text(field: &Fq, text: &str) -> Result<RamSeries, SeriesError> {
        let bad = || SeriesError::Parse(text.to_string());
        let mut ram = None;
        let mut prec = None;
        let mut terms = None;
        for part in text.split_whitespace() {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k {
                "ram" => ram = Some(v.parse::<i64>().map_err(|_| bad())?),
                "prec" => prec = Some(if v == "inf" { Prec::Infinite } else { Prec::Finite(parse_exp(v)?) }),
                "terms" => {
                    let mut t = Vec::new();
                    for item in v.split(',').filter(|s| !s.is_empty()) {
                        let (j, c) = item.split_once(':').ok_or_else(bad)?;
                        t.push((parse_exp(j)?, field.parse(c).map_err(|_| bad())?));
                    }
                    terms = Some(t);
                }
                _ => return Err(bad()),
            }
        }
        let (ram, prec, terms) = (ram.ok_or_else(bad)?, prec.ok_or_else(bad)?, terms.unwrap_or_default());
        let s = RamSeries::from_terms(field, &terms, prec)?;
        if s.ram != ram {
            return Err(bad());
        }
        Ok(s)
    }

    /// Equality of the exact parts up to the smaller precision.
    pub fn agrees_with(&self, other: &RamSeries) -> bool {
        self.sub(other).is_zero()
    }
}

impl PartialEq for RamSeries {
    /// Structural equality: same field, terms and precision.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.ram == other.ram && self.start == other.start && self.coeffs == other.coeffs && self.prec == other.prec
    }
}

/// Ramification indices allowed: a power of p times a divisor of q-1.
fn check_ram(field: &Fq, ram: i64) -> Result<(), SeriesError> {
    let p = field.p() as i64;
    let mut m = ram;
    while m % p == 0 {
        m /= p;
    }
    if (field.q() as i64 - 1) % m == 0 && ram > 0 {
        Ok(())
    } else {
        Err(SeriesError::UnsupportedRamification(ram))
    }
}

pub fn exp_int(n: i64) -> Exp {
    Exp::from_integer(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::new(2, 1).unwrap()
    }
    fn s(f: &Fq, terms: &[(i64, i64)], prec: i64) -> RamSeries {
        let t: Vec<(Exp, FqElem)> = terms.iter().map(|&(j, c)| (exp_int(j), f.from_int(c))).collect();
        RamSeries::from_terms(f, &t, Prec::at(prec)).unwrap()
    }

    #[test]
    fn add_takes_min_precision() {
        let f = f2();
        let r = s(&f, &[(1, 1)], 5).add(&s(&f, &[(1, -1)], 3));
        assert!(r.is_zero());
        assert_eq!(r.prec(), Prec::at(3));
    }

    #[test]
    fn add_ramified() {
        let f = f2();
        let a = RamSeries::from_terms(&f, &[(Exp::new(1, 2), FqElem::ONE)], Prec::at(2)).unwrap();
        let r = a.add(&s(&f, &[(1, 1)], 2));
        assert_eq!(r.ram(), 2);
        assert_eq!(r.to_text(), "ram=2 prec=2 terms=1/2:1,1:1");
    }

    #[test]
    fn mul_precision_rule() {
        let f = f2();
        let r = s(&f, &[(-1, 1)], 4).mul(&s(&f, &[(1, 1)], 4));
        assert_eq!(r.prec(), Prec::at(3));
        assert_eq!(r.to_text(), "ram=1 prec=3 terms=0:1");
        let sq = s(&f, &[(0, 1), (1, 1)], 4).mul(&s(&f, &[(0, 1), (1, 1)], 4));
        assert_eq!(sq.to_text(), "ram=1 prec=4 terms=0:1,2:1");
    }

    #[test]
    fn inv_examples() {
        let f = f2();
        let a = s(&f, &[(0, 1), (1, -1)], 3);
        assert_eq!(a.inv().unwrap().to_text(), "ram=1 prec=3 terms=0:1,1:1,2:1");
        let b = s(&f, &[(-1, 1)], 3);
        assert_eq!(b.inv().unwrap().to_text(), "ram=1 prec=5 terms=1:1");
        assert_eq!(s(&f, &[], 3).inv().unwrap_err(), SeriesError::ZeroSeries);
    }

    #[test]
    fn twist_roundtrip() {
        let f = Fq::new(3, 1).unwrap();
        let a = s(&f, &[(0, 1), (1, 1)], 4);
        let t = a.twist(1);
        assert_eq!(t.to_text(), "ram=1 prec=12 terms=0:1,3:1");
        assert_eq!(t.twist(-1), a);
    }

    #[test]
    fn red_u_examples() {
        let f = Fq::new(3, 1).unwrap();
        let a = s(&f, &[(2, -1), (3, 1)], 5);
        assert_eq!(a.red_u().unwrap(), (exp_int(2), f.from_int(-1)));
        let b = RamSeries::from_terms(&f, &[(Exp::new(1, 2), FqElem::ONE)], Prec::at(1)).unwrap();
        assert_eq!(b.red_u().unwrap(), (Exp::new(1, 2), FqElem::ONE));
    }

    #[test]
    fn roots() {
        let f = Fq::new(3, 1).unwrap();
        let a = s(&f, &[(2, 1), (3, 1)], 10);
        let r = a.root_q_minus_1().unwrap();
        assert_eq!(r.valuation(), Some(exp_int(1)));
        assert!(r.mul(&r).sub(&a).is_zero());
        let m = s(&f, &[(0, -1)], 6);
        let r = m.root_q_minus_1().unwrap();
        assert_eq!(r.field().e(), 2);
        let f9 = r.field().clone();
        let emb = f.embedding_into(&f9).unwrap();
        assert!(r.mul(&r).sub(&m.lift(&f9, &emb)).is_zero());
        let h = s(&f, &[(-1, -1), (0, 1)], 6);
        let r = h.root_q_minus_1().unwrap();
        assert_eq!(r.ram(), 2);
        assert!(r.mul(&r).sub(&h.lift(r.field(), &f.embedding_into(r.field()).unwrap())).is_zero());
    }

    #[test]
    fn text_roundtrip() {
        let f = Fq::new(3, 2).unwrap();
        let a = RamSeries::from_terms(&f, &[(Exp::new(-1, 2), FqElem(4)), (exp_int(3), FqElem(7))], Prec::at(9)).unwrap();
        assert_eq!(RamSeries::parse_text(&f, &a.to_text()).unwrap(), a);
        let z = RamSeries::zero(&f);
        assert_eq!(z.to_text(), "ram=1 prec=inf terms=");
    }

    #[test]
    fn rejects_bad_ramification() {
        let f = Fq::new(2, 1).unwrap();
        assert!(RamSeries::from_terms(&f, &[(Exp::new(1, 3), FqElem::ONE)], Prec::Infinite).is_err());
    }
}
