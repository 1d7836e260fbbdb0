//! Experiment configuration: a small line-oriented `key=value` format.
//!
//! ```text
//! [curve] q=2 e=1 genus=1 curve=0,0,1,0,0
//! [ideal P] gens = x ; y
//! [run] prec=64 seed=7 checks=goss,thmC ideals=P
//! ```
//!
//! Keys may also follow a header on their own lines. `#` starts a comment.

use std::fmt;

use pzeta_core::{AElem, CurveDatum, Error as CoreError, Fq, FqElem, IdealHandle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Goss,
    DegreeBounds,
    Jm,
    Reconstruct,
    ThmC,
    Module,
    Explog,
    Expstar,
    Lambda,
    ThmA,
    ThmB,
    Carlitz,
}

impl Check {
    /// All checks in dependency order.
    pub const ALL: [Check; 12] = [
        Check::Goss,
        Check::DegreeBounds,
        Check::Jm,
        Check::Reconstruct,
        Check::ThmC,
        Check::Module,
        Check::Explog,
        Check::Expstar,
        Check::Lambda,
        Check::ThmA,
        Check::ThmB,
        Check::Carlitz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Goss => "goss",
            Check::DegreeBounds => "degree_bounds",
            Check::Jm => "jm",
            Check::Reconstruct => "reconstruct",
            Check::ThmC => "thmC",
            Check::Module => "module",
            Check::Explog => "explog",
            Check::Expstar => "expstar",
            Check::Lambda => "lambda",
            Check::ThmA => "thmA",
            Check::ThmB => "thmB",
            Check::Carlitz => "carlitz",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Direct prerequisite, if any.
    pub fn dependency(self) -> Option<Check> {
        match self {
            Check::ThmC | Check::Module | Check::ThmA | Check::ThmB => Some(Check::Reconstruct),
            Check::Explog => Some(Check::Module),
            Check::Expstar | Check::Lambda => Some(Check::Explog),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Parse,
    Validation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            DiagnosticKind::Parse => "parse error",
            DiagnosticKind::Validation => "validation error",
        };
        write!(f, "line {}: {k}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct ConfigError(pub Vec<Diagnostic>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug)]
pub struct IdealSpec {
    pub name: String,
    pub gens: Vec<String>,
    pub handle: IdealHandle,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub q: u32,
    pub e: u32,
    pub genus: u8,
    pub weierstrass: Option<[u16; 5]>,
    pub curve: CurveDatum,
    pub ideals: Vec<IdealSpec>,
    pub prec: i64,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Ideals the checks run on, in config order.
    pub run_ideals: Vec<String>,
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn ideal(&self, name: &str) -> Option<&IdealSpec> {
        self.ideals.iter().find(|i| i.name == name)
    }
}

#[derive(Default)]
struct Raw {
    curve: Vec<(usize, String, String)>,
    ideals: Vec<(usize, String, Vec<String>)>,
    run: Vec<(usize, String, String)>,
}

enum Section {
    None,
    Curve,
    Ideal(usize),
    Run,
}

fn kv_tokens(line: usize, text: &str, diags: &mut Vec<Diagnostic>) -> Vec<(usize, String, String)> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        match tok.split_once('=') {
            Some((k, v)) if !k.is_empty() => out.push((line, k.to_string(), v.to_string())),
            _ => diags.push(Diagnostic { line, kind: DiagnosticKind::Parse, message: format!("expected key=value, found '{tok}'") }),
        }
    }
    out
}

fn parse_raw(text: &str) -> (Raw, Vec<Diagnostic>) {
    let mut raw = Raw::default();
    let mut diags = Vec::new();
    let mut section = Section::None;
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let body = full.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let rest = if let Some(h) = body.strip_prefix('[') {
            let Some((head, rest)) = h.split_once(']') else {
                diags.push(Diagnostic { line, kind: DiagnosticKind::Parse, message: "unterminated section header".into() });
                continue;
            };
            let mut words = head.split_whitespace();
            section = match (words.next(), words.next(), words.next()) {
                (Some("curve"), None, _) => Section::Curve,
                (Some("run"), None, _) => Section::Run,
                (Some("ideal"), Some(name), None) => {
                    raw.ideals.push((line, name.to_string(), Vec::new()));
                    Section::Ideal(raw.ideals.len() - 1)
                }
                _ => {
                    diags.push(Diagnostic { line, kind: DiagnosticKind::Parse, message: format!("unknown section [{head}]") });
                    Section::None
                }
            };
            rest.trim()
        } else {
            body
        };
        if rest.is_empty() {
            continue;
        }
        match section {
            Section::None => diags.push(Diagnostic { line, kind: DiagnosticKind::Parse, message: "key outside of a section".into() }),
            Section::Curve => raw.curve.extend(kv_tokens(line, rest, &mut diags)),
            Section::Run => raw.run.extend(kv_tokens(line, rest, &mut diags)),
            Section::Ideal(k) => match rest.split_once('=') {
                Some((key, val)) if key.trim() == "gens" => {
                    raw.ideals[k].2.extend(val.split(';').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()));
                }
                _ => diags.push(Diagnostic { line, kind: DiagnosticKind::Parse, message: "expected 'gens = <poly> ; <poly>'".into() }),
            },
        }
    }
    (raw, diags)
}

fn lookup<'a>(kv: &'a [(usize, String, String)], key: &str) -> Option<&'a (usize, String, String)> {
    kv.iter().rev().find(|(_, k, _)| k == key)
}

/// Parses and validates a configuration, collecting every diagnostic.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let (raw, mut diags) = parse_raw(text);
    let bad = |diags: &mut Vec<Diagnostic>, line: usize, kind: DiagnosticKind, message: String| diags.push(Diagnostic { line, kind, message });

    for (line, k, _) in &raw.curve {
        if !["q", "e", "genus", "curve"].contains(&k.as_str()) {
            bad(&mut diags, *line, DiagnosticKind::Parse, format!("unknown curve key '{k}'"));
        }
    }
    for (line, k, _) in &raw.run {
        if !["prec", "seed", "checks", "ideals", "output"].contains(&k.as_str()) {
            bad(&mut diags, *line, DiagnosticKind::Parse, format!("unknown run key '{k}'"));
        }
    }
    let int = |diags: &mut Vec<Diagnostic>, kv: &[(usize, String, String)], key: &str| -> Option<(usize, i64)> {
        let (line, _, v) = lookup(kv, key)?;
        match v.parse::<i64>() {
            Ok(x) => Some((*line, x)),
            Err(_) => {
                diags.push(Diagnostic { line: *line, kind: DiagnosticKind::Parse, message: format!("'{key}' expects an integer, found '{v}'") });
                None
            }
        }
    };
    let q = int(&mut diags, &raw.curve, "q");
    let e = int(&mut diags, &raw.curve, "e").map(|x| x.1).unwrap_or(1);
    let genus = int(&mut diags, &raw.curve, "genus").map(|x| x.1).unwrap_or(0);
    let prec = int(&mut diags, &raw.run, "prec");
    let seed = int(&mut diags, &raw.run, "seed").map(|x| x.1).unwrap_or(0);

    let Some((qline, q)) = q else {
        if lookup(&raw.curve, "q").is_none() {
            bad(&mut diags, 0, DiagnosticKind::Validation, "missing [curve] q".into());
        }
        return Err(ConfigError(diags));
    };
    let field = match Fq::new(q as u32, e as u32) {
        Ok(f) => f,
        Err(err) => {
            bad(&mut diags, qline, DiagnosticKind::Validation, format!("constant field: {err}"));
            return Err(ConfigError(diags));
        }
    };
    let mut weierstrass = None;
    let curve = match genus {
        0 => {
            if let Some((line, _, _)) = lookup(&raw.curve, "curve") {
                bad(&mut diags, *line, DiagnosticKind::Validation, "genus 0 takes no curve coefficients".into());
            }
            CurveDatum::genus0(&field)
        }
        1 => {
            let Some((line, _, v)) = lookup(&raw.curve, "curve") else {
                bad(&mut diags, qline, DiagnosticKind::Validation, "genus 1 needs curve=a1,a2,a3,a4,a6".into());
                return Err(ConfigError(diags));
            };
            let parts: Vec<&str> = v.split(',').collect();
            let coeffs: Vec<Option<FqElem>> = parts.iter().map(|p| field.parse(p.trim()).ok()).collect();
            if parts.len() != 5 || coeffs.iter().any(|c| c.is_none()) {
                bad(&mut diags, *line, DiagnosticKind::Parse, format!("curve expects five field elements, found '{v}'"));
                return Err(ConfigError(diags));
            }
            let a: Vec<FqElem> = coeffs.into_iter().map(|c| c.unwrap()).collect();
            weierstrass = Some([a[0].0, a[1].0, a[2].0, a[3].0, a[4].0]);
            match CurveDatum::genus1(&field, [a[0], a[1], a[2], a[3], a[4]]) {
                Ok(c) => c,
                Err(CoreError::SingularCurve) => {
                    bad(&mut diags, *line, DiagnosticKind::Validation, "singular curve".into());
                    return Err(ConfigError(diags));
                }
                Err(err) => {
                    bad(&mut diags, *line, DiagnosticKind::Validation, err.to_string());
                    return Err(ConfigError(diags));
                }
            }
        }
        g => {
            bad(&mut diags, qline, DiagnosticKind::Validation, format!("unsupported genus {g}"));
            return Err(ConfigError(diags));
        }
    };

    let mut ideals = Vec::new();
    for (line, name, gens) in &raw.ideals {
        if ideals.iter().any(|i: &IdealSpec| &i.name == name) {
            bad(&mut diags, *line, DiagnosticKind::Validation, format!("ideal '{name}' declared twice"));
            continue;
        }
        if gens.is_empty() {
            bad(&mut diags, *line, DiagnosticKind::Validation, format!("ideal '{name}' has no generators"));
            continue;
        }
        let parsed: Result<Vec<AElem>, _> = gens.iter().map(|g| curve.parse_a(g)).collect();
        match parsed.and_then(|p| IdealHandle::new(&curve, p)) {
            Ok(handle) => ideals.push(IdealSpec { name: name.clone(), gens: gens.clone(), handle }),
            Err(err) => bad(&mut diags, *line, DiagnosticKind::Validation, format!("ideal '{name}': {err}")),
        }
    }

    let prec = match prec {
        Some((line, n)) if n < 8 => {
            bad(&mut diags, line, DiagnosticKind::Validation, format!("prec must be at least 8, found {n}"));
            n
        }
        Some((_, n)) => n,
        None => {
            bad(&mut diags, 0, DiagnosticKind::Validation, "missing [run] prec".into());
            0
        }
    };
    let mut checks = Vec::new();
    if let Some((line, _, v)) = lookup(&raw.run, "checks") {
        for tok in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match Check::parse(tok) {
                Some(c) if !checks.contains(&c) => checks.push(c),
                Some(_) => {}
                None => bad(&mut diags, *line, DiagnosticKind::Validation, format!("unknown check '{tok}'")),
            }
        }
    } else {
        checks = Check::ALL.to_vec();
    }
    checks.sort();
    let run_ideals: Vec<String> = match lookup(&raw.run, "ideals") {
        Some((line, _, v)) => {
            let names: Vec<String> = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            for n in &names {
                if !raw.ideals.iter().any(|(_, m, _)| m == n) {
                    bad(&mut diags, *line, DiagnosticKind::Validation, format!("undeclared ideal '{n}'"));
                }
            }
            names
        }
        None => ideals.iter().map(|i| i.name.clone()).collect(),
    };
    if run_ideals.is_empty() {
        bad(&mut diags, 0, DiagnosticKind::Validation, "no ideals to run on".into());
    }
    let output = lookup(&raw.run, "output").map(|(_, _, v)| v.clone());

    if !diags.is_empty() {
        diags.sort_by_key(|d| d.line);
        return Err(ConfigError(diags));
    }
    Ok(ExperimentConfig { q: q as u32, e: e as u32, genus: genus as u8, weierstrass, curve, ideals, prec, seed: seed as u64, checks, run_ideals, output })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_genus0() {
        let c = parse_config("[curve] q=2\n[ideal A] gens = 1\n[run] prec=64\n").unwrap();
        assert_eq!(c.prec, 64);
        assert_eq!(c.checks.len(), 12);
        assert_eq!(c.run_ideals, vec!["A".to_string()]);
    }

    #[test]
    fn unknown_check_is_named() {
        let e = parse_config("[curve] q=2\n[ideal A] gens = 1\n[run] prec=64 checks=goss,frobnicate\n").unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].kind, DiagnosticKind::Validation);
        assert!(e.0[0].message.contains("frobnicate"));
        assert_eq!(e.0[0].line, 3);
    }

    #[test]
    fn singular_curve() {
        let e = parse_config("[curve] q=2 genus=1 curve=0,0,0,0,0\n[ideal A] gens = 1\n[run] prec=64\n").unwrap_err();
        assert!(e.0[0].message.contains("singular curve"));
    }

    #[test]
    fn keys_on_following_lines() {
        let text = "# genus one\n[curve]\nq=2 genus=1\ncurve=0,0,1,0,0\n[ideal P]\ngens = x ; y\n[run]\nprec=32\nchecks=jm\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.ideal("P").unwrap().handle.degree(), 1);
        assert_eq!(c.checks, vec![Check::Jm]);
    }

    #[test]
    fn precision_floor() {
        let e = parse_config("[curve] q=2\n[ideal A] gens = 1\n[run] prec=4\n").unwrap_err();
        assert!(e.0[0].message.contains("at least 8"));
    }
}
