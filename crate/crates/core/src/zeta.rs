//! Partial zeta series `sum_{a in I} a^{-1} (x) a`, their evaluations at the
//! twisted points `Xi^(k)` and the coefficient degree bounds.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::ideal::IdealHandle;
use crate::series::{exp_int, Exp, Prec, RamSeries};
use crate::tate::TateSeries;

/// Degree bound `i -> min(floor(log_q(i+1)) + offset, cap)` for the A-valued
/// coefficient of `u^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBound {
    pub q: i64,
    pub log_offset: Option<i64>,
    pub cap: Option<i64>,
}

/// Largest `r` with `q^r <= x`, for rational `x >= 1`.
fn ilog(q: i64, x: Exp) -> i64 {
    let mut r = 0;
    let mut p = Exp::from_integer(q);
    while p <= x {
        r += 1;
        p *= Exp::from_integer(q);
    }
    r
}

impl DegreeBound {
    /// Bound for the coefficients of `zeta_I^(-k)`: `log_q(i+1) + k + g + deg(I) + 1`.
    pub fn for_zeta(ideal: &IdealHandle, k: i64) -> DegreeBound {
        let c = ideal.curve();
        DegreeBound { q: c.q(), log_offset: Some(k + c.genus() + ideal.degree() + 1), cap: None }
    }
    pub fn constant(q: i64, d: i64) -> DegreeBound {
        DegreeBound { q, log_offset: None, cap: Some(d) }
    }
    pub fn with_cap(self, d: i64) -> DegreeBound {
        DegreeBound { cap: Some(self.cap.map_or(d, |c| c.min(d))), ..self }
    }

    pub fn at(&self, i: Exp) -> i64 {
        let l = self.log_offset.map(|c| ilog(self.q, i + Exp::from_integer(1)) + c);
        match (l, self.cap) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => i64::MAX,
        }
    }

    /// `min_{i >= n} (i - qk * bound(i))` over integer `i`; the minimum is attained
    /// at `n` or just before a jump of the logarithm.
    pub fn tail_cert(&self, n: Exp, qk: i64) -> Prec {
        let n_int = n.ceil();
        let mut best = n_int - Exp::from_integer(qk * self.at(n_int));
        if self.log_offset.is_some() {
            let mut p: i64 = 1;
            while p < i64::MAX / (self.q * 2) {
                let cand = Exp::from_integer(p - 1);
                if cand >= n_int {
                    let v = cand - Exp::from_integer(qk * self.at(cand));
                    best = best.min(v);
                    if p > 4 * qk * (n_int.to_integer().abs() + 64) {
                        break;
                    }
                }
                p *= self.q;
            }
        }
        Prec::Finite(best)
    }
}

/// A truncated (or full) partial zeta series with its attached degree bound.
#[derive(Clone, Debug)]
pub struct Zeta {
    pub series: TateSeries,
    pub m: usize,
    pub j_m: i64,
    pub bound: DegreeBound,
}

/// Sign-1 elements of I(<= j_m): `e_k + sum_{i<k} c_i e_i`.
fn sign_one_count(q: usize, m: usize) -> usize {
    (0..=m).map(|k| q.pow(k as u32)).sum()
}

fn element_at(consts: &[FqElem], mut idx: usize) -> (usize, Vec<FqElem>) {
    let q = consts.len();
    let mut k = 0;
    while idx >= q.pow(k as u32) {
        idx -= q.pow(k as u32);
        k += 1;
    }
    let mut coeffs = vec![FqElem::ZERO; k + 1];
    coeffs[k] = FqElem::ONE;
    for c in coeffs.iter_mut().take(k) {
        *c = consts[idx % q];
        idx /= q;
    }
    (k, coeffs)
}

/// `zeta_{I,m} = sum_{a in I(<= j_m), a != 0} a^{-1} (x) a` modulo `u^prec`.
pub fn zeta_trunc(ideal: &IdealHandle, m: usize, prec: i64) -> Zeta {
    let curve = ideal.curve();
    let f = curve.field().clone();
    let j_m = ideal.j(m);
    let basis = ideal.basis_leq(j_m);
    debug_assert_eq!(basis.len(), m + 1);
    let consts = f.base_elements();
    let ncoord = curve.dim_leq(j_m);
    let n = prec.max(1) as usize;
    let lo = -j_m;
    let width = (n as i64 - lo) as usize;
    // Dense expansions of the echelon basis on exponents [lo, n).
    let dense: Vec<Vec<FqElem>> = basis
        .iter()
        .map(|e| {
            let s = curve.expand(e, prec);
            (0..width).map(|i| s.coeff_int(lo + i as i64)).collect()
        })
        .collect();
    let total = sign_one_count(consts.len(), m);
    let zero_acc = || vec![vec![FqElem::ZERO; n]; ncoord];
    let acc = (0..total)
        .into_par_iter()
        .fold(zero_acc, |mut acc, idx| {
            let (k, c) = element_at(&consts, idx);
            let mut buf = dense[k].clone();
            let mut a = basis[k].clone();
            for i in 0..k {
                if !c[i].is_zero() {
                    f.axpy(&mut buf, c[i], &dense[i]);
                    a = curve.add(&a, &curve.scale(&basis[i], c[i]));
                }
            }
            let ea = RamSeries::from_dense(&f, lo, buf, Prec::at(prec));
            let inv = ea.inv_to(Prec::at(prec)).expect("nonzero element");
            if let Some((start, w)) = inv.window() {
                let start = start as usize;
                for (b, ab) in a.coords().iter().enumerate() {
                    if !ab.is_zero() && start < n {
                        let len = w.len().min(n - start);
                        f.axpy(&mut acc[b][start..start + len], *ab, &w[..len]);
                    }
                }
            }
            acc
        })
        .reduce(zero_acc, |mut x, y| {
            for (xb, yb) in x.iter_mut().zip(&y) {
                f.axpy(xb, FqElem::ONE, yb);
            }
            x
        });
    let minus_one = f.neg(FqElem::ONE);
    let coords: Vec<RamSeries> = acc.into_iter().map(|buf| RamSeries::from_dense(&f, 0, buf, Prec::at(prec)).scale(minus_one)).collect();
    let bound = DegreeBound::for_zeta(ideal, 0).with_cap(j_m);
    Zeta { series: TateSeries::new(curve, coords, Prec::at(prec)), m, j_m, bound }
}

/// Least `m` with `q^(m-1) >= prec`.
pub fn full_truncation_index(q: i64, prec: i64) -> usize {
    let mut m = 1;
    let mut p = 1i64;
    while p < prec {
        p *= q;
        m += 1;
    }
    m
}

/// `zeta_I` modulo `u^prec`.
pub fn zeta_full(ideal: &IdealHandle, prec: i64) -> Zeta {
    let m = full_truncation_index(ideal.curve().q(), prec);
    let mut z = zeta_trunc(ideal, m, prec);
    z.bound = DegreeBound::for_zeta(ideal, 0);
    z
}

/// Value at `Xi^(k)` with its certified absolute precision.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: RamSeries,
    pub certified: Prec,
}

/// `sum_i expand(s_(i))^(q^k) u^i`, certified through the degree bound of the
/// coefficients beyond the precision of `s`.
pub fn eval_at_xi(s: &TateSeries, k: u32, bound: &DegreeBound) -> Evaluation {
    let curve = s.curve();
    let f = s.field().clone();
    let qk = curve.q().pow(k);
    let tail = match s.prec() {
        Prec::Finite(n) => bound.tail_cert(n, qk),
        Prec::Infinite => Prec::Infinite,
    };
    let mut acc = RamSeries::zero(&f);
    for (b, sb) in s.coords().iter().enumerate() {
        if sb.is_zero() {
            continue;
        }
        let vb = sb.valuation().unwrap();
        let need = match tail {
            Prec::Finite(t) => ((t - vb) / Exp::from_integer(qk)).ceil().to_integer() + 4,
            Prec::Infinite => 64,
        };
        let need = need.max(4) + 2 * curve.basis_degree(b);
        let eb = curve.expand_basis(b, need).twist(k as i64);
        let eb = if &f == curve.field() { eb } else { eb.lift(&f, &curve.field().embedding_into(&f).unwrap()) };
        acc = acc.add(&sb.exact_part().mul(&eb));
    }
    let value = acc.truncate(tail);
    let certified = value.prec();
    Evaluation { value, certified }
}

/// As [`eval_at_xi`], failing when `requested` cannot be certified.
pub fn eval_at_xi_to(s: &TateSeries, k: u32, bound: &DegreeBound, requested: i64) -> Result<Evaluation> {
    let e = eval_at_xi(s, k, bound);
    if e.certified < Prec::at(requested) {
        return Err(Error::UncertifiedPrecision { requested: requested.to_string(), certified: e.certified.to_string() });
    }
    Ok(Evaluation { value: e.value.truncate(Prec::at(requested)), certified: Prec::at(requested) })
}

/// Outcome of a coefficient degree sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub checked: usize,
    pub min_slack: i64,
    pub max_slack: i64,
}

/// Checks `deg(s_(i)) <= bound(i)` for every exponent `i` below `n` (in steps of `1/ram`).
pub fn coeff_degree_check(s: &TateSeries, bound: &DegreeBound, n: i64) -> Result<DegreeReport> {
    let curve = s.curve();
    let ram = s.coords().iter().map(|c| c.ram()).fold(1i64, num_integer::lcm);
    let mut tops: std::collections::BTreeMap<Exp, i64> = std::collections::BTreeMap::new();
    for (b, sb) in s.coords().iter().enumerate() {
        let d = curve.basis_degree(b);
        for (j, _) in sb.terms() {
            if j < exp_int(n) {
                let e = tops.entry(j).or_insert(d);
                *e = (*e).max(d);
            }
        }
    }
    let mut report = DegreeReport { checked: (n.max(0) * ram) as usize, min_slack: i64::MAX, max_slack: i64::MIN };
    for (j, d) in tops {
        let slack = bound.at(j) - d;
        if slack < 0 {
            return Err(Error::BoundViolated { index: j.floor().to_integer() });
        }
        report.min_slack = report.min_slack.min(slack);
        report.max_slack = report.max_slack.max(slack);
    }
    Ok(report)
}
