//! The datum (X, inf, sgn) for genus 0 and genus 1 curves.
//!
//! The coordinate ring A carries a monomial basis indexed by degree:
//! genus 0 uses `t^i` (degree `i`); genus 1 uses index 0 for `1` and index
//! `k >= 1` for the monomial of degree `k + 1`, namely `x^i` (degree `2i`) or
//! `x^i y` (degree `2i + 3`). With `u = 1/t`, respectively `u = x/y`, every
//! basis monomial has sign 1.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::series::{exp_int, Prec, RamSeries};

/// An element of A in monomial-basis coordinates (no trailing zeros).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct AElem {
    coords: Vec<FqElem>,
}

impl AElem {
    pub fn from_coords(mut coords: Vec<FqElem>) -> AElem {
        while coords.last().is_some_and(|c| c.is_zero()) {
            coords.pop();
        }
        AElem { coords }
    }
    pub fn zero() -> AElem {
        AElem { coords: Vec::new() }
    }
    pub fn constant(c: FqElem) -> AElem {
        AElem::from_coords(vec![c])
    }
    pub fn one() -> AElem {
        AElem::constant(FqElem::ONE)
    }
    /// The basis monomial with index `k`.
    pub fn basis(k: usize) -> AElem {
        let mut v = vec![FqElem::ZERO; k + 1];
        v[k] = FqElem::ONE;
        AElem { coords: v }
    }
    pub fn coords(&self) -> &[FqElem] {
        &self.coords
    }
    pub fn coord(&self, k: usize) -> FqElem {
        self.coords.get(k).copied().unwrap_or(FqElem::ZERO)
    }
    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }
    /// Index of the top nonzero coordinate.
    pub fn top_index(&self) -> Option<usize> {
        self.coords.len().checked_sub(1)
    }
}

/// A fraction `num/den` in K = Frac(A).
#[derive(Clone, Debug)]
pub struct KElem {
    pub num: AElem,
    pub den: AElem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Genus {
    Zero,
    One,
}

struct Expansions {
    prec: i64,
    monos: Vec<RamSeries>,
}

struct Inner {
    field: Fq,
    genus: Genus,
    a: [FqElem; 5],
    cache: Mutex<Option<Expansions>>,
}

/// The curve datum; cheap to clone, shareable between threads.
#[derive(Clone)]
pub struct CurveDatum(Arc<Inner>);

impl fmt::Debug for CurveDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.genus {
            Genus::Zero => write!(f, "P1 over F_{}", self.q()),
            Genus::One => {
                let a: Vec<String> = self.0.a.iter().map(|c| self.0.field.format(*c)).collect();
                write!(f, "E[{}] over F_{}", a.join(","), self.q())
            }
        }
    }
}

impl CurveDatum {
    pub fn genus0(field: &Fq) -> CurveDatum {
        CurveDatum(Arc::new(Inner { field: field.clone(), genus: Genus::Zero, a: [FqElem::ZERO; 5], cache: Mutex::new(None) }))
    }

    /// `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6` with coefficients in F_q.
    pub fn genus1(field: &Fq, a: [FqElem; 5]) -> Result<CurveDatum> {
        if a.iter().any(|c| !field.in_base_field(*c)) {
            return Err(Error::Invalid("Weierstrass coefficients must lie in F_q".into()));
        }
        let c = CurveDatum(Arc::new(Inner { field: field.clone(), genus: Genus::One, a, cache: Mutex::new(None) }));
        if c.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    pub fn field(&self) -> &Fq {
        &self.0.field
    }
    pub fn q(&self) -> i64 {
        self.0.field.q() as i64
    }
    pub fn genus(&self) -> i64 {
        match self.0.genus {
            Genus::Zero => 0,
            Genus::One => 1,
        }
    }
    pub fn kind(&self) -> Genus {
        self.0.genus
    }
    pub fn weierstrass(&self) -> [FqElem; 5] {
        self.0.a
    }

    /// Weierstrass discriminant (1 for genus 0).
    pub fn discriminant(&self) -> FqElem {
        let f = &self.0.field;
        if self.0.genus == Genus::Zero {
            return FqElem::ONE;
        }
        let [a1, a2, a3, a4, a6] = self.0.a;
        let n = |k: i64| f.from_int(k);
        let m = |x: FqElem, y: FqElem| f.mul(x, y);
        let b2 = f.add(m(a1, a1), m(n(4), a2));
        let b4 = f.add(m(n(2), a4), m(a1, a3));
        let b6 = f.add(m(a3, a3), m(n(4), a6));
        let b8 = {
            let t1 = m(m(a1, a1), a6);
            let t2 = m(n(4), m(a2, a6));
            let t3 = m(m(a1, a3), a4);
            let t4 = m(a2, m(a3, a3));
            let t5 = m(a4, a4);
            f.sub(f.add(f.sub(f.add(t1, t2), t3), t4), t5)
        };
        let d1 = f.neg(m(m(b2, b2), b8));
        let d2 = m(n(8), m(b4, m(b4, b4)));
        let d3 = m(n(27), m(b6, b6));
        let d4 = m(n(9), m(b2, m(b4, b6)));
        f.add(f.sub(f.sub(d1, d2), d3), d4)
    }

    // ---- monomial basis -------------------------------------------------

    pub fn basis_degree(&self, k: usize) -> i64 {
        match self.0.genus {
            Genus::Zero => k as i64,
            Genus::One => {
                if k == 0 {
                    0
                } else {
                    k as i64 + 1
                }
            }
        }
    }
    pub fn index_of_degree(&self, d: i64) -> Option<usize> {
        match self.0.genus {
            Genus::Zero => (d >= 0).then_some(d as usize),
            Genus::One => match d {
                0 => Some(0),
                d if d >= 2 => Some(d as usize - 1),
                _ => None,
            },
        }
    }
    /// Number of basis monomials of degree at most `d`.
    pub fn dim_leq(&self, d: i64) -> usize {
        if d < 0 {
            return 0;
        }
        match self.0.genus {
            Genus::Zero => d as usize + 1,
            Genus::One => {
                if d <= 1 {
                    1
                } else {
                    d as usize
                }
            }
        }
    }
    /// Sign-normalized monomials of degree at most `d`.
    pub fn basis_of_a_leq(&self, d: i64) -> Vec<AElem> {
        (0..self.dim_leq(d)).map(AElem::basis).collect()
    }
    pub fn monomial_name(&self, k: usize) -> String {
        match self.0.genus {
            Genus::Zero => match k {
                0 => "1".into(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            },
            Genus::One => {
                let d = self.basis_degree(k);
                let (i, y) = if d % 2 == 0 { (d / 2, false) } else { ((d - 3) / 2, true) };
                let xs = match i {
                    0 => String::new(),
                    1 => "x".into(),
                    _ => format!("x^{i}"),
                };
                match (xs.is_empty(), y) {
                    (true, false) => "1".into(),
                    (true, true) => "y".into(),
                    (false, false) => xs,
                    (false, true) => format!("{xs}*y"),
                }
            }
        }
    }

    /// Generators of A as an F_q-algebra: `[t]` or `[x, y]`.
    pub fn generators(&self) -> Vec<AElem> {
        match self.0.genus {
            Genus::Zero => vec![AElem::basis(1)],
            Genus::One => vec![AElem::basis(1), AElem::basis(2)],
        }
    }

    // ---- arithmetic in A -------------------------------------------------

    pub fn add(&self, a: &AElem, b: &AElem) -> AElem {
        let f = &self.0.field;
        let n = a.coords.len().max(b.coords.len());
        AElem::from_coords((0..n).map(|k| f.add(a.coord(k), b.coord(k))).collect())
    }
    pub fn neg(&self, a: &AElem) -> AElem {
        self.scale(a, self.0.field.neg(FqElem::ONE))
    }
    pub fn sub(&self, a: &AElem, b: &AElem) -> AElem {
        self.add(a, &self.neg(b))
    }
    pub fn scale(&self, a: &AElem, c: FqElem) -> AElem {
        let f = &self.0.field;
        AElem::from_coords(a.coords.iter().map(|x| f.mul(*x, c)).collect())
    }

    /// `(p, r)` with `a = p(x) + r(x) y` (genus 1) or `(a(t), 0)` (genus 0).
    fn split(&self, a: &AElem) -> (Vec<FqElem>, Vec<FqElem>) {
        match self.0.genus {
            Genus::Zero => (a.coords.clone(), Vec::new()),
            Genus::One => {
                let mut p = Vec::new();
                let mut r = Vec::new();
                for (k, c) in a.coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let d = self.basis_degree(k) as usize;
                    let (v, i) = if d.is_multiple_of(2) { (&mut p, d / 2) } else { (&mut r, (d - 3) / 2) };
                    if v.len() <= i {
                        v.resize(i + 1, FqElem::ZERO);
                    }
                    v[i] = *c;
                }
                (p, r)
            }
        }
    }

    fn join(&self, p: &[FqElem], r: &[FqElem]) -> AElem {
        match self.0.genus {
            Genus::Zero => AElem::from_coords(p.to_vec()),
            Genus::One => {
                let mut v = Vec::new();
                let mut put = |d: usize, c: FqElem| {
                    if c.is_zero() {
                        return;
                    }
                    let k = self.index_of_degree(d as i64).unwrap();
                    if v.len() <= k {
                        v.resize(k + 1, FqElem::ZERO);
                    }
                    v[k] = c;
                };
                for (i, c) in p.iter().enumerate() {
                    put(2 * i, *c);
                }
                for (i, c) in r.iter().enumerate() {
                    put(2 * i + 3, *c);
                }
                AElem::from_coords(v)
            }
        }
    }

    /// `F(x) = x^3 + a2 x^2 + a4 x + a6` and `h(x) = a1 x + a3`.
    fn weierstrass_polys(&self) -> (Vec<FqElem>, Vec<FqElem>) {
        let [a1, a2, a3, a4, a6] = self.0.a;
        (vec![a6, a4, a2, FqElem::ONE], vec![a3, a1])
    }

    pub fn mul(&self, a: &AElem, b: &AElem) -> AElem {
        let f = &self.0.field;
        match self.0.genus {
            Genus::Zero => AElem::from_coords(poly_mul(f, &a.coords, &b.coords)),
            Genus::One => {
                let (pa, ra) = self.split(a);
                let (pb, rb) = self.split(b);
                let (fx, hx) = self.weierstrass_polys();
                let rr = poly_mul(f, &ra, &rb);
                let p = poly_add(f, &poly_mul(f, &pa, &pb), &poly_mul(f, &rr, &fx));
                let cross = poly_add(f, &poly_mul(f, &pa, &rb), &poly_mul(f, &pb, &ra));
                let r = poly_sub(f, &cross, &poly_mul(f, &rr, &hx));
                self.join(&p, &r)
            }
        }
    }

    pub fn pow(&self, a: &AElem, k: u64) -> AElem {
        let mut r = AElem::one();
        for _ in 0..k {
            r = self.mul(&r, a);
        }
        r
    }

    /// Conjugate under the hyperelliptic involution (identity in genus 0).
    pub fn conj(&self, a: &AElem) -> AElem {
        match self.0.genus {
            Genus::Zero => a.clone(),
            Genus::One => {
                let f = &self.0.field;
                let (p, r) = self.split(a);
                let (_, hx) = self.weierstrass_polys();
                let p2 = poly_sub(f, &p, &poly_mul(f, &r, &hx));
                let r2: Vec<FqElem> = r.iter().map(|c| f.neg(*c)).collect();
                self.join(&p2, &r2)
            }
        }
    }

    /// `a / b` when `b` divides `a` in A.
    pub fn div_exact(&self, a: &AElem, b: &AElem) -> Option<AElem> {
        let f = &self.0.field;
        if b.is_zero() {
            return None;
        }
        match self.0.genus {
            Genus::Zero => {
                let (qt, rem) = poly_divrem(f, &a.coords, &b.coords);
                rem.iter().all(|c| c.is_zero()).then(|| AElem::from_coords(qt))
            }
            Genus::One => {
                let nb = self.mul(b, &self.conj(b));
                let (n, nr) = self.split(&nb);
                debug_assert!(nr.iter().all(|c| c.is_zero()));
                let (p, r) = self.split(&self.mul(a, &self.conj(b)));
                let (qp, rp) = poly_divrem(f, &p, &n);
                let (qr, rr) = poly_divrem(f, &r, &n);
                (rp.iter().chain(&rr).all(|c| c.is_zero())).then(|| self.join(&qp, &qr))
            }
        }
    }

    /// `(deg a, sgn a)`, read from the top coordinate.
    pub fn deg_sgn(&self, a: &AElem) -> Result<(i64, FqElem)> {
        let k = a.top_index().ok_or(Error::ZeroElement)?;
        Ok((self.basis_degree(k), a.coords[k]))
    }
    pub fn degree(&self, a: &AElem) -> i64 {
        self.deg_sgn(a).map(|x| x.0).unwrap_or(i64::MIN)
    }

    // ---- expansion at infinity ---------------------------------------------

    /// Expansion of the basis monomial `k`, with absolute precision at least `prec`.
    pub fn expand_basis(&self, k: usize, prec: i64) -> RamSeries {
        let f = &self.0.field;
        if self.0.genus == Genus::Zero {
            return RamSeries::monomial(f, FqElem::ONE, exp_int(-(k as i64)));
        }
        let mut guard = self.0.cache.lock().unwrap_or_else(|e| e.into_inner());
        let ok = guard.as_ref().is_some_and(|c| c.prec >= prec && c.monos.len() > k);
        if !ok {
            let (old_p, old_k) = guard.as_ref().map_or((0, 0), |c| (c.prec, c.monos.len()));
            let p = prec.max(2 * old_p).max(16);
            let n = (k + 1).max(2 * old_k).max(8);
            *guard = Some(self.compute_expansions(p, n));
        }
        guard.as_ref().unwrap().monos[k].clone()
    }

    /// Expansion of `a` with absolute precision at least `prec`.
    pub fn expand(&self, a: &AElem, prec: i64) -> RamSeries {
        let f = &self.0.field;
        let mut acc = RamSeries::zero(f);
        for (k, c) in a.coords.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.expand_basis(k, prec).scale(*c));
            }
        }
        acc
    }

    /// Expansion of a fraction, to absolute precision `prec`.
    pub fn expand_k(&self, a: &KElem, prec: i64) -> Result<RamSeries> {
        let dd = self.degree(&a.den).max(0);
        let dn = self.degree(&a.num).max(0);
        let extra = 2 * (dd + dn) + 4;
        let num = self.expand(&a.num, prec + extra);
        let den = self.expand(&a.den, prec + extra).inv_to(Prec::at(prec + extra))?;
        Ok(num.mul(&den).truncate(Prec::at(prec)))
    }

    /// Genus 1: Newton iteration for `w = 1/x` as a power series in `u = x/y`,
    /// then `x = 1/w`, `y = x/u` and all basis monomials up to index `n - 1`.
    fn compute_expansions(&self, prec: i64, n: usize) -> Expansions {
        let f = &self.0.field;
        let [a1, a2, a3, a4, a6] = self.0.a;
        let dmax = self.basis_degree(n - 1);
        let wp = prec + 2 * dmax + 8;
        let u = RamSeries::monomial(f, FqElem::ONE, exp_int(1));
        let u2 = RamSeries::monomial(f, FqElem::ONE, exp_int(2));
        let cst = |c: FqElem| RamSeries::constant(f, c);
        let one = RamSeries::one(f);
        // G(w) = w(1 + a1 u) + a3 u w^2 - u^2 - a2 u^2 w - a4 u^2 w^2 - a6 u^2 w^3
        let g = |w: &RamSeries, cap: Prec| -> RamSeries {
            let w2 = w.mul_trunc(w, cap);
            let w3 = w2.mul_trunc(w, cap);
            let lin = one.add(&u.scale(a1)).sub(&u2.scale(a2));
            lin.mul_trunc(w, cap)
                .add(&u.scale(a3).sub(&u2.scale(a4)).mul_trunc(&w2, cap))
                .sub(&u2.mul_trunc(&cst(a6), cap).mul_trunc(&w3, cap))
                .sub(&u2)
                .truncate(cap)
        };
        let dg = |w: &RamSeries, cap: Prec| -> RamSeries {
            let w2 = w.mul_trunc(w, cap);
            let two = f.from_int(2);
            let three = f.from_int(3);
            one.add(&u.scale(a1))
                .sub(&u2.scale(a2))
                .add(&u.scale(f.mul(two, a3)).sub(&u2.scale(f.mul(two, a4))).mul_trunc(w, cap))
                .sub(&u2.scale(f.mul(three, a6)).mul_trunc(&w2, cap))
                .truncate(cap)
        };
        let mut w = u2.clone();
        let mut p = 3;
        while p < wp {
            let np = (2 * p).min(wp);
            let cap = Prec::at(np);
            // w carries its old precision; evaluate on the exact terms so the
            // residual is seen up to the new cap.
            let we = w.exact_part();
            let gw = g(&we, cap).exact_part();
            let d = dg(&we, cap).inv_to(cap).expect("unit derivative");
            w = we.sub(&gw.mul_trunc(&d, cap)).exact_part().truncate(cap);
            p = np;
        }
        debug_assert!(g(&w.exact_part(), Prec::at(wp)).is_zero());
        let x = w.inv().expect("w is nonzero");
        let y = x.shift(exp_int(-1));
        let mut xpows = vec![RamSeries::one(f)];
        let mut monos = Vec::with_capacity(n);
        for k in 0..n {
            let d = self.basis_degree(k) as usize;
            let (i, has_y) = if d.is_multiple_of(2) { (d / 2, false) } else { ((d - 3) / 2, true) };
            while xpows.len() <= i {
                let next = xpows.last().unwrap().mul(&x);
                xpows.push(next);
            }
            let m = if has_y { xpows[i].mul(&y) } else { xpows[i].clone() };
            monos.push(m.truncate(Prec::at(prec)));
        }
        Expansions { prec, monos }
    }

    // ---- text ---------------------------------------------------------------

    pub fn format_a(&self, a: &AElem) -> String {
        let f = &self.0.field;
        if a.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for k in (0..a.coords.len()).rev() {
            let c = a.coords[k];
            if c.is_zero() {
                continue;
            }
            let name = self.monomial_name(k);
            parts.push(match (c == FqElem::ONE, k == 0) {
                (_, true) => f.format(c),
                (true, false) => name,
                (false, false) => format!("{}*{}", f.format(c), name),
            });
        }
        parts.join(" + ")
    }

    /// Parses `c*m + c*m - ...` over the monomials `1, t, t^k` or `1, x, y, x^k, x^k*y`.
    pub fn parse_a(&self, text: &str) -> Result<AElem> {
        let f = &self.0.field;
        let bad = |m: &str| Error::Invalid(format!("cannot parse polynomial {text:?}: {m}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() && !cur.ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if ch == '-' && i == 0 {
                neg = true;
            } else if ch != '+' {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad("dangling sign"));
        }
        terms.push((neg, cur));
        let mut acc = AElem::zero();
        for (neg, term) in terms {
            let mut t = AElem::one();
            for factor in term.split('*') {
                let factor_elem = self.parse_factor(factor).ok_or_else(|| bad(factor))?;
                t = self.mul(&t, &factor_elem);
            }
            if neg {
                t = self.neg(&t);
            }
            acc = self.add(&acc, &t);
        }
        if acc.coords.iter().any(|c| !f.in_base_field(*c)) {
            return Err(bad("coefficients must lie in F_q"));
        }
        Ok(acc)
    }

    fn parse_factor(&self, s: &str) -> Option<AElem> {
        let (base, exp) = match s.split_once('^') {
            Some((b, e)) => (b, e.parse::<u64>().ok()?),
            None => (s, 1),
        };
        let gen = match (self.0.genus, base) {
            (Genus::Zero, "t") => AElem::basis(1),
            (Genus::One, "x") => AElem::basis(1),
            (Genus::One, "y") => AElem::basis(2),
            _ => {
                if s.contains('^') {
                    return None;
                }
                return Some(AElem::constant(self.0.field.parse(s).ok()?));
            }
        };
        Some(self.pow(&gen, exp))
    }
}

// ---- dense polynomials over the field (low degree first) ----------------------

pub(crate) fn poly_trim(mut v: Vec<FqElem>) -> Vec<FqElem> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

pub(crate) fn poly_add(f: &Fq, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
    let n = a.len().max(b.len());
    let g = |v: &[FqElem], i: usize| v.get(i).copied().unwrap_or(FqElem::ZERO);
    poly_trim((0..n).map(|i| f.add(g(a, i), g(b, i))).collect())
}

pub(crate) fn poly_sub(f: &Fq, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
    let nb: Vec<FqElem> = b.iter().map(|c| f.neg(*c)).collect();
    poly_add(f, a, &nb)
}

pub(crate) fn poly_mul(f: &Fq, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FqElem::ZERO; a.len() + b.len() - 1];
    for (i, c) in a.iter().enumerate() {
        f.axpy(&mut out[i..i + b.len()], *c, b);
    }
    poly_trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
pub(crate) fn poly_divrem(f: &Fq, a: &[FqElem], b: &[FqElem]) -> (Vec<FqElem>, Vec<FqElem>) {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(b[db]).expect("nonzero divisor");
    let mut q = vec![FqElem::ZERO; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = f.mul(r[r.len() - 1], lead_inv);
        q[k] = c;
        let nc = f.neg(c);
        f.axpy(&mut r[k..], nc, &b);
        r = poly_trim(r);
    }
    (poly_trim(q), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ell() -> CurveDatum {
        let f = Fq::new(2, 1).unwrap();
        CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap()
    }

    #[test]
    fn genus0_expansion_and_sign() {
        let f = Fq::new(3, 1).unwrap();
        let c = CurveDatum::genus0(&f);
        let t = AElem::basis(1);
        assert_eq!(c.expand(&t, 10).to_text(), "ram=1 prec=inf terms=-1:1");
        assert_eq!(c.deg_sgn(&AElem::one()).unwrap(), (0, FqElem::ONE));
        let a = c.parse_a("2*t^2 + t + 1").unwrap();
        assert_eq!(c.deg_sgn(&a).unwrap(), (2, f.from_int(2)));
        assert_eq!(c.format_a(&a), "2*t^2 + t + 1");
    }

    #[test]
    fn basis_gaps() {
        let c = ell();
        assert_eq!(c.dim_leq(1), 1);
        assert_eq!(c.dim_leq(3), 3);
        let names: Vec<String> = (0..6).map(|k| c.monomial_name(k)).collect();
        assert_eq!(names, ["1", "x", "y", "x^2", "x*y", "x^3"]);
    }

    #[test]
    fn weierstrass_relation_on_expansions() {
        let c = ell();
        let x = c.expand_basis(1, 60);
        let y = c.expand_basis(2, 60);
        assert_eq!(x.valuation(), Some(exp_int(-2)));
        assert_eq!(y.valuation(), Some(exp_int(-3)));
        let lhs = y.mul(&y).add(&y);
        let rhs = x.mul(&x).mul(&x);
        let d = lhs.sub(&rhs);
        assert!(d.is_zero());
        assert!(d.prec() >= Prec::at(50));
    }

    #[test]
    fn weierstrass_relation_all_coefficients() {
        // y^2 = x^3 + 2x + 1 over F_3 exercises the a4 and a6 terms.
        let f = Fq::new(3, 1).unwrap();
        let c = CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(0), FqElem(2), FqElem(1)]).unwrap();
        let x = c.expand_basis(1, 80);
        let y = c.expand_basis(2, 80);
        let rhs = x.mul(&x).mul(&x).add(&x.scale(FqElem(2))).add(&RamSeries::one(&f));
        let d = y.mul(&y).sub(&rhs);
        assert!(d.is_zero());
        assert!(d.prec() >= Prec::at(70));
    }

    #[test]
    fn y_squared_reduces() {
        let c = ell();
        let y = AElem::basis(2);
        let y2 = c.mul(&y, &y);
        assert_eq!(c.format_a(&y2), "x^3 + y");
        let prec = 40;
        let lhs = c.expand(&y2, prec);
        let rhs = c.expand(&y, prec).mul(&c.expand(&y, prec));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn exact_division() {
        let c = ell();
        let x = AElem::basis(1);
        let y = AElem::basis(2);
        let xy = c.mul(&x, &y);
        assert_eq!(c.div_exact(&xy, &x).unwrap(), y);
        assert_eq!(c.div_exact(&xy, &y).unwrap(), x);
        assert!(c.div_exact(&AElem::one(), &x).is_none());
        // x^3 = y^2 + y = y (y + 1)
        let x3 = c.pow(&x, 3);
        assert_eq!(c.format_a(&c.div_exact(&x3, &y).unwrap()), "y + 1");
    }

    #[test]
    fn singular_curve_rejected() {
        let f = Fq::new(2, 1).unwrap();
        assert_eq!(CurveDatum::genus1(&f, [FqElem(0); 5]).unwrap_err(), Error::SingularCurve);
    }
}
