//! The special function `omega` as an infinite product, the integrality test
//! characterizing the module of special functions, and the twist-fixed ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curve::{AElem, CurveDatum, Genus};
use crate::drinfeld::lattice_sums;
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::ideal::IdealHandle;
use crate::loc::{Frac, LocSeries};
use crate::series::{exp_int, Exp, Prec, RamSeries};
use crate::shtuka::{carlitz_pi_pow, reconstruct_dual_shtuka, solve_delta_f, DeltaF, DualShtuka, RationalFn};
use crate::tate::TateSeries;
use crate::zeta::zeta_full;

/// Outcome of dividing two series coefficientwise in `A((u))`.
#[derive(Clone, Debug)]
pub enum Division {
    Quotient(TateSeries),
    /// Exponent of the first `u`-coefficient that is not in A.
    Fractional(Exp),
}

/// `num / den` in `A((u))` with up to `count` coefficients, by exact division
/// by the leading coefficient of `den`. The count is capped by the precision
/// of both inputs; the returned series carries the resulting precision.
pub fn laurent_div(num: &TateSeries, den: &TateSeries, count: usize) -> Result<Division> {
    let curve = num.curve().clone();
    let (num, den) = (&integral_prec(num), &integral_prec(den));
    for s in num.coords().iter().chain(den.coords()) {
        if !s.is_unramified() || s.field() != curve.field() {
            return Err(Error::Invalid("coefficients must lie in F_q((u))".into()));
        }
    }
    let vd = den.valuation().ok_or(Error::ZeroElement)?;
    let Some(vn) = num.valuation() else {
        return Ok(Division::Quotient(TateSeries::zero(&curve, num.prec().plus(-vd))));
    };
    let avail = num.prec().plus(-vn).min(den.prec().plus(-vd));
    let count = match avail {
        Prec::Finite(a) => (a.floor().to_integer().max(0) as usize).min(count),
        Prec::Infinite => count,
    };
    let one = exp_int(1);
    let z: Vec<AElem> = (0..count).map(|i| den.coeff_a(vd + one * exp_int(i as i64))).collect();
    let mut r: Vec<AElem> = Vec::with_capacity(count);
    for k in 0..count {
        let mut acc = num.coeff_a(vn + exp_int(k as i64));
        for i in 1..=k {
            if !z[i].is_zero() && !r[k - i].is_zero() {
                acc = curve.sub(&acc, &curve.mul(&z[i], &r[k - i]));
            }
        }
        match curve.div_exact(&acc, &z[0]) {
            Some(c) => r.push(c),
            None => return Ok(Division::Fractional(vn - vd + exp_int(k as i64))),
        }
    }
    let prec = Prec::Finite(vn - vd + exp_int(count as i64));
    Ok(Division::Quotient(TateSeries::from_a_coeffs(&curve, (vn - vd).to_integer(), &r, prec)))
}

/// Rounds the precision down to an integer so that integer-exponent
/// coordinates drop their ramification.
fn integral_prec(s: &TateSeries) -> TateSeries {
    match s.prec() {
        Prec::Infinite => s.clone(),
        p => {
            let p = Prec::at(p.floor_i64());
            let coords: Vec<RamSeries> = s.coords().iter().map(|c| c.truncate(p)).collect();
            TateSeries::new(s.curve(), coords, p)
        }
    }
}

/// Shared inputs for the special-function checks on one ideal.
#[derive(Clone, Debug)]
pub struct SpecialContext {
    pub ideal: IdealHandle,
    pub ds: DualShtuka,
    pub df: DeltaF,
    pub zeta: TateSeries,
    pub prec: i64,
}

impl SpecialContext {
    /// Reconstructs at `q^2 prec` so that `delta` (a second inverse twist of
    /// the solved coordinates) is known to `prec`.
    pub fn new(ideal: &IdealHandle, prec: i64) -> Result<SpecialContext> {
        let q = ideal.curve().q();
        let ds = reconstruct_dual_shtuka(ideal, q * q * (prec + 8) + 16)?;
        let df = solve_delta_f(&ds.f_star1)?;
        let zeta = zeta_full(ideal, 2 * prec + 32).series;
        Ok(SpecialContext { ideal: ideal.clone(), ds, df, zeta, prec })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Integral,
    NonIntegral { index: Exp },
}

impl Verdict {
    pub fn is_integral(&self) -> bool {
        matches!(self, Verdict::Integral)
    }
}

/// Whether `(1 (x) lambda) delta^(1) / zeta_I` has all `u`-coefficients in A
/// below relative index `n`.
pub fn theorem_a_membership(ctx: &SpecialContext, lambda: &AElem, n: usize) -> Result<Verdict> {
    let curve = ctx.ideal.curve();
    if lambda.is_zero() {
        return Ok(Verdict::Integral);
    }
    let x = TateSeries::from_a(curve, lambda).mul(&ctx.df.delta.twist(1));
    match laurent_div(&x, &ctx.zeta, n)? {
        Division::Fractional(index) => Ok(Verdict::NonIntegral { index }),
        Division::Quotient(t) => {
            let got = t.prec().plus(-t.valuation().unwrap_or(exp_int(0)));
            let vx = x.valuation().unwrap_or(exp_int(0)) - ctx.zeta.valuation().unwrap_or(exp_int(0));
            if t.prec().plus(-vx) < Prec::at(n as i64) {
                return Err(Error::UncertifiedPrecision { requested: n.to_string(), certified: got.to_string() });
            }
            Ok(Verdict::Integral)
        }
    }
}

/// One row of the dichotomy sweep.
#[derive(Clone, Debug)]
pub struct DichotomyRow {
    pub lambda: AElem,
    pub in_ideal: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct DichotomyReport {
    pub rows: Vec<DichotomyRow>,
    /// Every verdict matches membership in I.
    pub agree: bool,
}

fn random_a(curve: &CurveDatum, d: i64, rng: &mut ChaCha8Rng) -> AElem {
    let f = curve.field();
    let size = f.size();
    let coords = (0..curve.dim_leq(d)).map(|_| FqElem(rng.gen_range(0..size) as u16)).collect();
    AElem::from_coords(coords)
}

/// Basis of A(<= deg a_I + 2) plus five seeded random elements of I and five outside I.
pub fn dichotomy_sample(ideal: &IdealHandle, seed: u64) -> Vec<AElem> {
    let curve = ideal.curve();
    let d = curve.degree(&ideal.a_i()) + 2;
    let mut out = curve.basis_of_a_leq(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ib = ideal.basis_leq(d);
    let f = curve.field();
    let (mut inside, mut outside) = (0, 0);
    let mut tries = 0;
    while (inside < 5 || outside < 5) && tries < 10_000 {
        tries += 1;
        if inside < 5 {
            let mut a = AElem::zero();
            for b in &ib {
                let c = FqElem(rng.gen_range(0..f.size()) as u16);
                a = curve.add(&a, &curve.scale(b, c));
            }
            if !a.is_zero() {
                out.push(a);
                inside += 1;
            }
        }
        if outside < 5 {
            let a = random_a(curve, d, &mut rng);
            if !ideal.contains(&a) {
                out.push(a);
                outside += 1;
            }
        }
    }
    out
}

/// Runs the membership test over [`dichotomy_sample`] and compares with `I`.
pub fn theorem_a_dichotomy(ctx: &SpecialContext, seed: u64, n: usize) -> Result<DichotomyReport> {
    let sample = dichotomy_sample(&ctx.ideal, seed);
    let rows: Vec<DichotomyRow> = sample
        .into_par_iter()
        .map(|lambda| {
            let verdict = theorem_a_membership(ctx, &lambda, n)?;
            Ok(DichotomyRow { in_ideal: ctx.ideal.contains(&lambda), lambda, verdict })
        })
        .collect::<Result<_>>()?;
    let agree = rows.iter().all(|r| r.in_ideal == r.verdict.is_integral());
    Ok(DichotomyReport { rows, agree })
}

/// `omega = alpha^(1/(q-1)) prod_{i>=0} (alpha / f)^(i)`, kept as `root * core`.
///
/// The product converges for the Gauss norm; its coefficients lie in `A[1/l]`
/// with `l` the leading coefficient of `num(f)`. When no denominator survives,
/// `omega` is also given as a `TateSeries` (over the field of the root).
#[derive(Clone, Debug)]
pub struct SpecialCandidate {
    pub core: LocSeries,
    pub root: RamSeries,
    pub omega: Option<TateSeries>,
    pub alpha_used: RamSeries,
    /// `alpha` truncated to the working precision, `root^(q-1) = alpha_w`.
    pub alpha_w: RamSeries,
    pub f_ref: RationalFn,
    pub factors: usize,
    pub prec: i64,
}

/// The monomial `c u^v` with `f = c u^v (1 + O(u))` for the Gauss norm.
pub fn default_alpha(f: &RationalFn) -> Result<RamSeries> {
    let curve = f.num.curve();
    let (vn, an) = f.num.red_u()?;
    let (vd, ad) = f.den.red_u()?;
    let fld = curve.field();
    let (_, cn) = curve.deg_sgn(&an)?;
    let (_, cd) = curve.deg_sgn(&ad)?;
    let c = fld.mul(cn, fld.inv(cd).unwrap());
    if curve.scale(&ad, c) != an {
        return Err(Error::NonUnitLeading(format!("leading coefficient ratio of f is {} / {}", curve.format_a(&an), curve.format_a(&ad))));
    }
    Ok(RamSeries::monomial(fld, c, vn - vd))
}

pub fn build_omega(f: &RationalFn, prec: i64) -> Result<SpecialCandidate> {
    build_omega_with(f, &default_alpha(f)?, prec)
}

/// Product with a given `alpha`; requires `alpha / f = 1 + O(u)`.
pub fn build_omega_with(f: &RationalFn, alpha: &RamSeries, prec: i64) -> Result<SpecialCandidate> {
    let curve = f.num.curve();
    let q = curve.q();
    let va = alpha.valuation().ok_or(Error::ZeroElement)?;
    let work = prec + 8;
    let alpha_w = alpha.truncate(Prec::at(work).plus(va));
    let (vn, ell) = f.num.red_u()?;
    let cap = work + vn.ceil().to_integer() + 8;
    let num = LocSeries::from_tate(&f.den.mul_scalar(&alpha_w), &ell, cap)?;
    let den = LocSeries::from_tate(&f.num, &ell, cap)?;
    let factor = LocSeries::div(&num, &den, work as usize)?;
    if factor.valuation() != Some(0) || factor.coeff(0) != (Frac { num: AElem::one(), e: 0 }) || factor.prec() < work {
        return Err(Error::NonUnitLeading("alpha / f is not 1 + O(u)".into()));
    }
    let mut core = factor.clone();
    let mut factors = 1;
    let mut qi = q;
    while qi < work {
        core = core.mul(&factor.twist(factors)).truncate(work);
        factors += 1;
        qi *= q;
    }
    let root = alpha_w.root_q_minus_1()?;
    let omega = core.to_tate().map(|t| t.mul_scalar(&root));
    Ok(SpecialCandidate { core, root, omega, alpha_used: alpha.clone(), alpha_w, f_ref: f.clone(), factors: factors as usize, prec })
}

fn rel(diff: &LocSeries, against: &LocSeries) -> Result<Prec> {
    let v = against.valuation().ok_or(Error::ZeroElement)?;
    Ok(diff.certified_valuation().plus(exp_int(-v)))
}

/// Relative certified valuation of `omega^(1) - f omega`, cleared of `den(f)`:
/// the minimum of `alpha den(f) core^(1) - num(f) core`, of `root^(q-1) - alpha`
/// and, when `omega` is a `TateSeries`, of the identity on `omega` itself.
pub fn theorem_b_residual(c: &SpecialCandidate) -> Result<Prec> {
    let ell = c.core.ell().clone();
    let cap = c.core.prec() + 16;
    let ad = LocSeries::from_tate(&c.f_ref.den.mul_scalar(&c.alpha_w), &ell, cap)?;
    let n = LocSeries::from_tate(&c.f_ref.num, &ell, cap)?;
    let rhs = c.core.mul(&n);
    let mut r = rel(&c.core.twist(1).mul(&ad).sub(&rhs), &rhs)?;
    let q = c.core.curve().q();
    let emb = c.alpha_w.field().embedding_into(c.root.field()).expect("root field extends");
    r = r.min(c.root.pow((q - 1) as u64).rel_diff(&c.alpha_w.lift(c.root.field(), &emb)));
    if let Some(w) = &c.omega {
        let lhs = w.twist(1).mul(&c.f_ref.den);
        let rhs = w.mul(&c.f_ref.num);
        let v = rhs.valuation().ok_or(Error::ZeroElement)?;
        r = r.min(lhs.sub(&rhs).certified_valuation().plus(-v));
    }
    Ok(r)
}

/// Text of `omega` truncated to `prec`, when it has one: either the
/// `TateSeries`, or `root * core` when the root lies in `F_q((u))`.
pub fn omega_text(c: &SpecialCandidate, prec: i64) -> Result<String> {
    if let Some(w) = &c.omega {
        return Ok(w.truncate(Prec::at(prec)).to_text());
    }
    let curve = c.core.curve();
    let s = LocSeries::scalar(curve, c.core.ell(), &c.root, prec + 16)?;
    Ok(c.core.mul(&s).truncate(prec).to_text())
}

/// Builds `omega` with `alpha` and with `alpha (1 + u)` and compares the text
/// forms truncated to `prec`.
pub fn alpha_independence(f: &RationalFn, prec: i64) -> Result<bool> {
    let a = default_alpha(f)?;
    let fld = f.num.curve().field();
    let b = a.mul(&RamSeries::one(fld).add(&RamSeries::monomial(fld, FqElem::ONE, exp_int(1))));
    let w1 = build_omega_with(f, &a, prec)?;
    let w2 = build_omega_with(f, &b, prec)?;
    Ok(omega_text(&w1, prec)? == omega_text(&w2, prec)?)
}

/// Genus 0 oracle for the product part: `prod_{i>=0} (1 - t u^(q^i))^-1`
/// expanded as `prod_i sum_k t^k u^(k q^i)`.
pub fn genus0_product_oracle(curve: &CurveDatum, prec: i64) -> TateSeries {
    let f = curve.field();
    let q = curve.q();
    let p = Prec::at(prec);
    let mut acc = TateSeries::from_a(curve, &AElem::one()).truncate(p);
    let mut qi = 1;
    while qi < prec {
        let pairs: Vec<(AElem, RamSeries)> = (0..)
            .take_while(|k| k * qi < prec)
            .map(|k| (curve.pow(&AElem::basis(1), k as u64), RamSeries::monomial(f, FqElem::ONE, exp_int(k * qi))))
            .collect();
        acc = acc.mul(&TateSeries::from_pairs(curve, &pairs).truncate(p));
        qi *= q;
    }
    acc
}

/// Twist-fixed ratio: with `T = core^(1) zeta_I / delta^(1)`, checks
/// `alpha^q gamma_pow T^(1) = T` cleared of `delta`. For `I = A` in genus 0 also
/// checks that `T` is a scalar and that `alpha^q T^(q-1)` equals `pi~^(q-1)` from the
/// classical product.
#[derive(Clone, Debug)]
pub struct TwistFixedReport {
    pub residual: Prec,
    /// Genus 0, `I = A`: valuation of the non-constant coordinates of `T` relative to `T`.
    pub constant: Option<Prec>,
    /// Genus 0, `I = A`: agreement of `alpha^q T^(q-1)` with the product for `pi~^(q-1)`.
    pub closure: Option<Prec>,
}

pub fn twist_fixed_ratio_check(c: &SpecialCandidate, ctx: &SpecialContext) -> Result<TwistFixedReport> {
    let curve = ctx.ideal.curve();
    let q = curve.q();
    let gp = &ctx.ds.periods.gamma_pow;
    let z = &ctx.zeta;
    let d = &ctx.df.delta;
    let ell = c.core.ell().clone();
    let cap = c.core.prec() + 16;
    let scal = c.alpha_w.pow(q as u64).mul(gp);
    let l_side = LocSeries::from_tate(&z.twist(1).mul(&d.twist(1)).mul_scalar(&scal), &ell, cap)?;
    let r_side = LocSeries::from_tate(&z.mul(&d.twist(2)), &ell, cap)?;
    let lhs = c.core.twist(2).mul(&l_side);
    let rhs = c.core.twist(1).mul(&r_side);
    let residual = rel(&lhs.sub(&rhs), &rhs)?;
    let (constant, closure) = match curve.kind() {
        Genus::Zero if ctx.ideal.degree() == 0 => {
            let t = c.core.twist(1).mul(&LocSeries::from_tate(z, &ell, cap)?);
            let t = t.to_tate().ok_or_else(|| Error::IdentityViolated("denominators in genus 0".into()))?;
            let vt = t.valuation().ok_or(Error::ZeroElement)?;
            let rest: Vec<RamSeries> = t.coords().iter().skip(1).cloned().collect();
            let rest_v = if rest.is_empty() {
                t.prec().plus(-vt)
            } else {
                TateSeries::new(curve, rest, t.prec()).certified_valuation().plus(-vt)
            };
            let t0 = t.coord(0).truncate(t.prec());
            let lhs = c.alpha_w.pow(q as u64).mul(&t0.pow((q - 1) as u64));
            let pi = carlitz_pi_pow(curve.field(), ctx.prec + 16);
            (Some(rest_v), Some(lhs.rel_diff(&pi)))
        }
        _ => (None, None),
    };
    Ok(TwistFixedReport { residual, constant, closure })
}

/// `pi~^(q-1)` for `F_q[theta]` by three routes: the classical product, the
/// lattice sum `S_(q-1)(A) (theta^q - theta)`, and the period from `zeta_A`.
#[derive(Clone, Debug)]
pub struct CarlitzReport {
    pub product: RamSeries,
    /// Relative agreement of the lattice route with the product.
    pub lattice: Prec,
    /// Relative agreement of the zeta route with the product.
    pub zeta: Prec,
}

pub fn carlitz_crosscheck(field: &Fq, prec: i64) -> Result<CarlitzReport> {
    let curve = CurveDatum::genus0(field);
    let ideal = IdealHandle::unit(&curve);
    let q = curve.q();
    let product = carlitz_pi_pow(field, prec + 8);
    let ls = lattice_sums(&ideal, 1, prec + 8)?;
    let theta = RamSeries::monomial(field, FqElem::ONE, exp_int(-1));
    let lattice = ls.s[1].mul(&theta.pow(q as u64).sub(&theta));
    let ds = reconstruct_dual_shtuka(&ideal, prec + 8)?;
    Ok(CarlitzReport {
        lattice: lattice.rel_diff(&product),
        zeta: ds.periods.pi_pow.rel_diff(&product),
        product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g0(q: u32) -> IdealHandle {
        IdealHandle::unit(&CurveDatum::genus0(&Fq::new(q, 1).unwrap()))
    }
    fn point_ideal() -> IdealHandle {
        let f = Fq::new(2, 1).unwrap();
        let c = CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap();
        IdealHandle::new(&c, vec![c.parse_a("x").unwrap(), c.parse_a("y").unwrap()]).unwrap()
    }

    #[test]
    fn laurent_div_detects_fractions() {
        let i = g0(2);
        let c = i.curve();
        let t = TateSeries::from_a(c, &c.parse_a("t").unwrap());
        let one = TateSeries::from_a(c, &AElem::one());
        assert!(matches!(laurent_div(&t, &one, 8).unwrap(), Division::Quotient(_)));
        assert!(matches!(laurent_div(&one, &t, 8).unwrap(), Division::Fractional(_)));
    }

    #[test]
    fn omega_genus0_matches_product_oracle() {
        let i = g0(2);
        let ctx = SpecialContext::new(&i, 32).unwrap();
        let w = build_omega(&ctx.df.f, 32).unwrap();
        assert!(theorem_b_residual(&w).unwrap() >= Prec::at(32));
        let oracle = genus0_product_oracle(i.curve(), 32);
        assert!(w.core.to_tate().unwrap().sub(&oracle).certified_valuation() >= Prec::at(32));
    }

    #[test]
    fn omega_q3_needs_root() {
        let i = g0(3);
        let ctx = SpecialContext::new(&i, 24).unwrap();
        let w = build_omega(&ctx.df.f, 24).unwrap();
        assert_eq!(w.root.ram(), 2);
        assert!(theorem_b_residual(&w).unwrap() >= Prec::at(24));
        assert!(alpha_independence(&ctx.df.f, 24).unwrap());
    }

    #[test]
    fn membership_genus1() {
        let i = point_ideal();
        let ctx = SpecialContext::new(&i, 32).unwrap();
        let c = i.curve();
        assert!(theorem_a_membership(&ctx, &i.a_i(), 32).unwrap().is_integral());
        assert!(!theorem_a_membership(&ctx, &AElem::one(), 32).unwrap().is_integral());
        assert!(theorem_a_membership(&ctx, &c.parse_a("y").unwrap(), 32).unwrap().is_integral());
    }

    #[test]
    fn twist_fixed_genus0() {
        let i = g0(2);
        let ctx = SpecialContext::new(&i, 32).unwrap();
        let w = build_omega(&ctx.df.f, 32).unwrap();
        let r = twist_fixed_ratio_check(&w, &ctx).unwrap();
        assert!(r.residual >= Prec::at(32), "{r:?}");
        assert!(r.constant.unwrap() >= Prec::at(32), "{r:?}");
        assert!(r.closure.unwrap() >= Prec::at(32), "{r:?}");
    }
}
