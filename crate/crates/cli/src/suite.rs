//! Runs the configured checks per ideal in dependency order and emits one
//! JSON-lines record per (check, ideal) pair.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use pzeta_core::drinfeld::{
    build_hayes_module, check_module, exp_coeffs, exp_functional_residual, exp_log_residual, exp_star_zeta_check, lambda_equals_ideal_check,
    lattice_sums, log_coeffs, log_oracle_check, newton_residual, HayesModule,
};
use pzeta_core::shtuka::{reconstruct_dual_shtuka, theorem_c_check, DualShtuka};
use pzeta_core::special::{
    alpha_independence, build_omega, carlitz_crosscheck, theorem_a_dichotomy, theorem_b_residual, twist_fixed_ratio_check, SpecialContext,
};
use pzeta_core::zeta::{coeff_degree_check, eval_at_xi, zeta_full, zeta_trunc, DegreeBound};
use pzeta_core::{Error, Exp, FqElem, IdealHandle, Prec, RamSeries, TateSeries};

use crate::config::{Check, ExperimentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub op: String,
    pub ideal: String,
    pub digest: String,
    pub status: Status,
    /// Certified valuation reached by the check (relative where applicable).
    pub valuation: Option<String>,
    /// First failing index or parameter, when the check failed.
    pub witness: Option<String>,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_ms: f64,
}

impl ReportRecord {
    /// JSON line without the wall time, for determinism comparisons.
    pub fn stable_line(&self) -> String {
        let mut v = serde_json::to_value(self).expect("record serializes");
        v.as_object_mut().unwrap().remove("wall_ms");
        v.to_string()
    }
}

/// Largest Goss truncation index exercised by the `goss` check.
pub const GOSS_M_MAX: usize = 6;

/// The expstar working precision stops doubling at this multiple of `prec + 16`.
pub const EXPSTAR_PREC_CAP: i64 = 8;

struct Outcome {
    status: Status,
    valuation: Option<Prec>,
    witness: Option<String>,
    detail: Value,
}

fn outcome(pass: bool, valuation: Prec, witness: Option<String>, detail: Value) -> Outcome {
    Outcome { status: if pass { Status::Pass } else { Status::Fail }, valuation: Some(valuation), witness, detail }
}

/// Least `k` with `q^k >= n`.
pub fn ceil_log(q: i64, n: i64) -> usize {
    let mut k = 0;
    while q.pow(k as u32) < n {
        k += 1;
    }
    k
}

#[derive(Default)]
struct Cache {
    ds: Option<DualShtuka>,
    module: Option<HayesModule>,
    exp: Option<Vec<RamSeries>>,
    zeta: Option<TateSeries>,
    special: Option<SpecialContext>,
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    ideal: &'a IdealHandle,
    cache: Cache,
}

impl<'a> Runner<'a> {
    fn n(&self) -> i64 {
        self.cfg.prec
    }
    fn q(&self) -> i64 {
        self.ideal.curve().q()
    }

    fn ds(&mut self) -> pzeta_core::Result<DualShtuka> {
        if self.cache.ds.is_none() {
            self.cache.ds = Some(reconstruct_dual_shtuka(self.ideal, self.n() + 16)?);
        }
        Ok(self.cache.ds.clone().unwrap())
    }

    fn zeta(&mut self) -> TateSeries {
        if self.cache.zeta.is_none() {
            self.cache.zeta = Some(zeta_full(self.ideal, 2 * self.n() + 32).series);
        }
        self.cache.zeta.clone().unwrap()
    }

    fn module(&mut self) -> pzeta_core::Result<HayesModule> {
        if self.cache.module.is_none() {
            let ds = self.ds()?;
            self.cache.module = Some(build_hayes_module(&ds, &self.ideal.curve().generators(), self.n() + 16)?);
        }
        Ok(self.cache.module.clone().unwrap())
    }

    fn k_max(&self) -> usize {
        ceil_log(self.q(), self.n()) + 1
    }

    fn exp(&mut self) -> pzeta_core::Result<Vec<RamSeries>> {
        if self.cache.exp.is_none() {
            let m = self.module()?;
            self.cache.exp = Some(exp_coeffs(&m, self.k_max(), self.n() + 8)?.c);
        }
        Ok(self.cache.exp.clone().unwrap())
    }

    fn special(&mut self) -> pzeta_core::Result<SpecialContext> {
        if self.cache.special.is_none() {
            self.cache.special = Some(SpecialContext::new(self.ideal, self.n())?);
        }
        Ok(self.cache.special.clone().unwrap())
    }

    fn run(&mut self, check: Check) -> pzeta_core::Result<Outcome> {
        let n = self.n();
        let np = Prec::at(n);
        let curve = self.ideal.curve().clone();
        let q = self.q();
        match check {
            Check::Goss => {
                let mut worst = Prec::Infinite;
                let mut witness = None;
                for m in 1..=GOSS_M_MAX {
                    let j = self.ideal.j(m);
                    let z = zeta_trunc(self.ideal, m, n + q.pow(m as u32) * j);
                    for k in 1..=m as u32 {
                        let e = eval_at_xi(&z.series, k, &z.bound);
                        worst = worst.min(e.certified);
                        if witness.is_none() && (!e.value.is_zero() || e.certified < np) {
                            witness = Some(format!("m={m} k={k}"));
                        }
                    }
                }
                Ok(outcome(witness.is_none(), worst, witness, json!({ "m_max": GOSS_M_MAX })))
            }
            Check::DegreeBounds => {
                let z = zeta_full(self.ideal, n);
                match coeff_degree_check(&z.series, &DegreeBound::for_zeta(self.ideal, 0), n) {
                    Ok(r) => Ok(outcome(true, np, None, json!({ "checked": r.checked, "min_slack": r.min_slack, "max_slack": r.max_slack }))),
                    Err(Error::BoundViolated { index }) => Ok(outcome(false, Prec::at(index), Some(index.to_string()), json!({}))),
                    Err(e) => Err(e),
                }
            }
            Check::Jm => {
                let expect = |m: usize| m as i64 + curve.genus() + self.ideal.degree();
                let bad = (2..=12).find(|&m| self.ideal.j(m) != expect(m));
                let js: Vec<i64> = (0..=12).map(|m| self.ideal.j(m)).collect();
                Ok(outcome(bad.is_none(), Prec::Infinite, bad.map(|m| m.to_string()), json!({ "j": js })))
            }
            Check::Reconstruct => {
                let ds = reconstruct_dual_shtuka(self.ideal, n)?;
                let mut pass = ds.kernel_dim == 1 && ds.residual >= np;
                let mut closed = Value::Null;
                if curve.genus() == 0 && self.ideal.degree() == 0 {
                    let f = curve.field();
                    let r = &ds.f_star1;
                    let theta_q = RamSeries::monomial(f, f.neg(FqElem::ONE), Exp::from_integer(-q));
                    let ok = r.den.len() == 1
                        && r.den.coord(0).sub(&RamSeries::one(f)).certified_valuation() >= np
                        && r.num.coord(1).sub(&RamSeries::one(f)).certified_valuation() >= np
                        && r.num.coord(0).sub(&theta_q).certified_valuation() >= np;
                    pass &= ok;
                    closed = json!(ok);
                }
                let detail = json!({
                    "kernel_dim": ds.kernel_dim,
                    "zeta_prec": ds.zeta_prec,
                    "closed_form": closed,
                    "f_star1": ds.f_star1.to_text(),
                    "gamma_pow": ds.periods.gamma_pow.to_text(),
                });
                Ok(outcome(pass, ds.residual, None, detail))
            }
            Check::ThmC => {
                let r = theorem_c_check(self.ideal, n)?;
                Ok(outcome(r.relative_valuation >= np, r.relative_valuation, None, json!({ "factors": r.factors, "zeta_prec": r.zeta_prec })))
            }
            Check::Module => {
                let m = self.module()?;
                let z = self.zeta();
                let r = check_module(&m, &z)?;
                let gens: Vec<String> = m.gens.iter().map(|(a, phi)| format!("{} -> {}", curve.format_a(a), phi.to_text())).collect();
                let detail = json!({
                    "commutator": r.commutator.to_string(),
                    "weierstrass": r.weierstrass.to_string(),
                    "product": r.product.to_string(),
                    "antihomomorphism": r.antihomomorphism.to_string(),
                    "dual_action": r.dual_action.to_string(),
                    "normalization": r.normalization,
                    "phi": gens,
                });
                Ok(outcome(r.normalization && r.min() >= np, r.min(), None, detail))
            }
            Check::Explog => {
                let m = self.module()?;
                let c = self.exp()?;
                let (a, phi) = &m.gens[0];
                let fe = exp_functional_residual(&c, phi, &curve.expand(a, m.work));
                let l = log_coeffs(&c);
                let el = exp_log_residual(&c, &l);
                let worst = fe.min(el);
                let detail = json!({
                    "k_max": self.k_max(),
                    "functional": fe.to_string(),
                    "log_exp": el.to_string(),
                    "exp": c.iter().map(|s| s.to_text()).collect::<Vec<_>>(),
                    "log": l.iter().map(|s| s.to_text()).collect::<Vec<_>>(),
                });
                Ok(outcome(worst >= np, worst, None, detail))
            }
            Check::Lambda => {
                let m = self.module()?;
                let c = self.exp()?;
                let k = if q == 2 { 2 } else { 1 };
                let ls = lattice_sums(self.ideal, k, n)?;
                let newton = newton_residual(&ls);
                let lam = lambda_equals_ideal_check(&c, &ls, &m.gamma_pow, q);
                let log = log_oracle_check(&log_coeffs(&c), &ls, &m.gamma_pow, q);
                let worst = lam.iter().chain(&log).fold(newton.min(ls.certificate.min(np)), |a, b| a.min(*b));
                let witness = lam.iter().position(|r| *r < np).map(|k| format!("k={k}"));
                let detail = json!({
                    "k": k,
                    "degree": ls.degree,
                    "elements": ls.elements,
                    "certificate": ls.certificate.to_string(),
                    "newton": newton.to_string(),
                    "exp_vs_sums": lam.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "log_vs_sums": log.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                });
                Ok(outcome(worst >= np, worst, witness, detail))
            }
            Check::Expstar => {
                // Partial sum n needs c_n to roughly q^n times the target, so the
                // working precision is doubled until the tail bound is certified.
                let k_max = self.k_max();
                let mut p = n + 16;
                let (r, used) = loop {
                    let (m, c) = if p == n + 16 {
                        (self.module()?, self.exp()?)
                    } else {
                        let ds = reconstruct_dual_shtuka(self.ideal, p)?;
                        let m = build_hayes_module(&ds, &curve.generators(), p)?;
                        let c = exp_coeffs(&m, k_max, 2 * p)?.c;
                        (m, c)
                    };
                    let z = zeta_full(self.ideal, (2 * n + 32).max(2 * p)).series;
                    let r = exp_star_zeta_check(&c, &z, &m.gamma_pow, &m.pi_pow)?;
                    if (r.monotone && r.within_bound) || p >= EXPSTAR_PREC_CAP * (n + 16) {
                        break (r, p);
                    }
                    p *= 2;
                };
                let last = *r.valuations.last().unwrap();
                let detail = json!({
                    "k_max": k_max,
                    "working_prec": used,
                    "valuations": r.valuations.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "bounds": r.bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                    "monotone": r.monotone,
                    "within_bound": r.within_bound,
                    "reaches_prec": last >= np,
                });
                Ok(outcome(r.monotone && r.within_bound, last, None, detail))
            }
            Check::ThmA => {
                let ctx = self.special()?;
                let r = theorem_a_dichotomy(&ctx, self.cfg.seed, n as usize)?;
                let rows: Vec<Value> = r
                    .rows
                    .iter()
                    .map(|row| {
                        json!({
                            "lambda": curve.format_a(&row.lambda),
                            "in_ideal": row.in_ideal,
                            "verdict": if row.verdict.is_integral() { "INTEGRAL" } else { "NON_INTEGRAL" },
                        })
                    })
                    .collect();
                let witness = r.rows.iter().find(|row| row.in_ideal != row.verdict.is_integral()).map(|row| curve.format_a(&row.lambda));
                Ok(outcome(r.agree, np, witness, json!({ "rows": rows })))
            }
            Check::ThmB => {
                let ctx = self.special()?;
                let w = build_omega(&ctx.df.f, n)?;
                let b = theorem_b_residual(&w)?;
                let indep = alpha_independence(&ctx.df.f, n)?;
                let t = twist_fixed_ratio_check(&w, &ctx)?;
                let mut worst = b.min(t.residual);
                if let Some(c) = t.constant {
                    worst = worst.min(c);
                }
                let detail = json!({
                    "omega_residual": b.to_string(),
                    "alpha_independent": indep,
                    "twist_fixed": t.residual.to_string(),
                    "constant": t.constant.map(|p| p.to_string()),
                    "factors": w.factors,
                    "denominator_power": w.core.max_denominator(),
                });
                Ok(outcome(indep && worst >= np, worst, None, detail))
            }
            Check::Carlitz => {
                let r = carlitz_crosscheck(curve.field(), n)?;
                let mut worst = r.lattice.min(r.zeta);
                let mut closure = Value::Null;
                if curve.genus() == 0 && self.ideal.degree() == 0 {
                    let ctx = self.special()?;
                    let w = build_omega(&ctx.df.f, n)?;
                    if let Some(c) = twist_fixed_ratio_check(&w, &ctx)?.closure {
                        worst = worst.min(c);
                        closure = json!(c.to_string());
                    }
                }
                let detail = json!({
                    "lattice": r.lattice.to_string(),
                    "zeta": r.zeta.to_string(),
                    "closure": closure,
                    "pi_pow": r.product.to_text(),
                });
                Ok(outcome(worst >= np, worst, None, detail))
            }
        }
    }
}

fn digest(cfg: &ExperimentConfig, check: Check, ideal: &str) -> String {
    let spec = cfg.ideal(ideal).expect("validated");
    let text = format!(
        "q={} e={} genus={} curve={:?} ideal={} gens={} prec={} seed={} check={}",
        cfg.q,
        cfg.e,
        cfg.genus,
        cfg.weierstrass,
        ideal,
        spec.gens.join(";"),
        cfg.prec,
        cfg.seed,
        check.name()
    );
    let h = Sha256::digest(text.as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// The requested checks closed under dependencies, with a note for each insertion.
pub fn plan(checks: &[Check]) -> Vec<(Check, Option<String>)> {
    let mut notes: HashMap<Check, String> = HashMap::new();
    let mut all: Vec<Check> = checks.to_vec();
    let mut i = 0;
    while i < all.len() {
        if let Some(d) = all[i].dependency() {
            if !all.contains(&d) {
                all.push(d);
                notes.insert(d, format!("inserted as dependency of {}", all[i].name()));
            }
        }
        i += 1;
    }
    all.sort();
    all.into_iter().map(|c| (c, notes.remove(&c))).collect()
}

/// Runs every (check, ideal) pair and returns the records in deterministic order.
pub fn run_suite(cfg: &ExperimentConfig) -> Vec<ReportRecord> {
    let steps = plan(&cfg.checks);
    let mut out = Vec::new();
    for name in &cfg.run_ideals {
        let spec = cfg.ideal(name).expect("validated");
        let mut runner = Runner { cfg, ideal: &spec.handle, cache: Cache::default() };
        let mut failed: HashMap<Check, bool> = HashMap::new();
        for (check, note) in &steps {
            let t = Instant::now();
            let dep_error = check.dependency().filter(|d| failed.get(d).copied().unwrap_or(false));
            let res = match dep_error {
                Some(d) => Err(Error::Invalid(format!("dependency {} did not complete", d.name()))),
                None => std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| runner.run(*check)))
                    .unwrap_or_else(|p| Err(Error::Invalid(panic_message(p)))),
            };
            let record = match res {
                Ok(o) => ReportRecord {
                    op: check.name().into(),
                    ideal: name.clone(),
                    digest: digest(cfg, *check, name),
                    status: o.status,
                    valuation: o.valuation.map(|p| p.to_string()),
                    witness: o.witness,
                    detail: o.detail,
                    note: note.clone(),
                    wall_ms: 0.0,
                },
                Err(e) => {
                    failed.insert(*check, true);
                    ReportRecord {
                        op: check.name().into(),
                        ideal: name.clone(),
                        digest: digest(cfg, *check, name),
                        status: Status::Error,
                        valuation: None,
                        witness: None,
                        detail: json!({ "error": e.to_string() }),
                        note: note.clone(),
                        wall_ms: 0.0,
                    }
                }
            };
            out.push(ReportRecord { wall_ms: t.elapsed().as_secs_f64() * 1e3, ..record });
        }
    }
    out
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        format!("internal panic: {s}")
    } else if let Some(s) = p.downcast_ref::<String>() {
        format!("internal panic: {s}")
    } else {
        "internal panic".into()
    }
}

/// 0 when every record passed, 2 if any errored, else 1.
pub fn exit_code(records: &[ReportRecord]) -> i32 {
    if records.iter().any(|r| r.status == Status::Error) {
        2
    } else if records.iter().any(|r| r.status == Status::Fail) {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dependencies_are_inserted() {
        let p = plan(&[Check::ThmC]);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].0, Check::Reconstruct);
        assert_eq!(p[0].1.as_deref(), Some("inserted as dependency of thmC"));
        let p = plan(&[Check::Expstar]);
        let names: Vec<&str> = p.iter().map(|(c, _)| c.name()).collect();
        assert_eq!(names, ["reconstruct", "module", "explog", "expstar"]);
    }

    #[test]
    fn ceil_log_values() {
        assert_eq!(ceil_log(2, 64), 6);
        assert_eq!(ceil_log(3, 64), 4);
        assert_eq!(ceil_log(2, 65), 7);
    }
}
