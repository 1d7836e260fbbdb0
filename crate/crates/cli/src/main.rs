use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pzeta_cli::config::{parse_config, ExperimentConfig};
use pzeta_cli::suite::{exit_code, run_suite};
use pzeta_core::drinfeld::{build_hayes_module, exp_coeffs, log_coeffs};
use pzeta_core::shtuka::{reconstruct_dual_shtuka, solve_delta_f};
use pzeta_core::special::{build_omega, omega_text, theorem_a_dichotomy, theorem_a_membership, theorem_b_residual, SpecialContext, Verdict};
use pzeta_core::zeta::zeta_full;

#[derive(Parser)]
#[command(name = "pzeta", version, about = "Zeta values, dual shtukas and Drinfeld modules over F_q-curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks of a config file and print one JSON record per line.
    Run {
        config: String,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Print zeta_I to the given precision.
    Zeta(CurveArgs),
    /// Reconstruct the dual shtuka function and periods.
    Shtuka(CurveArgs),
    /// Print the sign-normalized module on the generators of A, with exp and log.
    Drinfeld(CurveArgs),
    /// Print omega, or test membership through the integrality criterion.
    Special {
        #[command(flatten)]
        curve: CurveArgs,
        /// Test this element of A, e.g. "x+y".
        #[arg(long)]
        lambda: Option<String>,
        /// Run the seeded dichotomy sample.
        #[arg(long)]
        dichotomy: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    e: u32,
    #[arg(long, default_value_t = 0)]
    genus: u8,
    /// Weierstrass coefficients a1,a2,a3,a4,a6 (genus 1).
    #[arg(long)]
    curve: Option<String>,
    /// Generators separated by ';'.
    #[arg(long, default_value = "1")]
    ideal: String,
    #[arg(long, default_value_t = 32)]
    prec: i64,
}

impl CurveArgs {
    /// Goes through the config parser so flags get the same validation.
    fn config(&self) -> Result<ExperimentConfig, String> {
        let mut text = format!("[curve] q={} e={} genus={}", self.q, self.e, self.genus);
        if let Some(c) = &self.curve {
            text.push_str(&format!(" curve={c}"));
        }
        text.push_str(&format!("\n[ideal I] gens={}\n[run] prec={} checks=jm ideals=I\n", self.ideal, self.prec));
        parse_config(&text).map_err(|e| e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { config, out } => run(&config, out),
        Cmd::Zeta(a) => simple(&a, |cfg| {
            let ideal = &cfg.ideals[0].handle;
            Ok(format!("{}\n", zeta_full(ideal, cfg.prec).series.to_text()))
        }),
        Cmd::Shtuka(a) => simple(&a, |cfg| {
            let ideal = &cfg.ideals[0].handle;
            let ds = reconstruct_dual_shtuka(ideal, cfg.prec).map_err(|e| e.to_string())?;
            let mut s = format!(
                "f_star1:\n{}\ngamma_pow:\n{}\npi_pow:\n{}\nresidual: {}\n",
                ds.f_star1.to_text(),
                ds.periods.gamma_pow.to_text(),
                ds.periods.pi_pow.to_text(),
                ds.residual
            );
            if let Ok(df) = solve_delta_f(&ds.f_star1) {
                s.push_str(&format!("delta:\n{}\nf:\n{}\n", df.delta.to_text(), df.f.to_text()));
            }
            Ok(s)
        }),
        Cmd::Drinfeld(a) => simple(&a, |cfg| {
            let ideal = &cfg.ideals[0].handle;
            let curve = ideal.curve();
            let ds = reconstruct_dual_shtuka(ideal, cfg.prec + 16).map_err(|e| e.to_string())?;
            let m = build_hayes_module(&ds, &curve.generators(), cfg.prec).map_err(|e| e.to_string())?;
            let mut s = String::new();
            for (g, phi) in &m.gens {
                s.push_str(&format!("phi_{}:\n{}\n", curve.format_a(g), phi.to_text()));
            }
            let k = pzeta_cli::suite::ceil_log(curve.q(), cfg.prec) + 1;
            let c = exp_coeffs(&m, k, cfg.prec).map_err(|e| e.to_string())?.c;
            for (i, x) in c.iter().enumerate() {
                s.push_str(&format!("exp_{i}: {}\n", x.to_text()));
            }
            for (i, x) in log_coeffs(&c).iter().enumerate() {
                s.push_str(&format!("log_{i}: {}\n", x.to_text()));
            }
            Ok(s)
        }),
        Cmd::Special { curve, lambda, dichotomy, seed } => simple(&curve, |cfg| {
            let ideal = &cfg.ideals[0].handle;
            let c = ideal.curve();
            let ctx = SpecialContext::new(ideal, cfg.prec).map_err(|e| e.to_string())?;
            let n = cfg.prec as usize;
            let show = |v: &Verdict| match v {
                Verdict::Integral => "INTEGRAL".to_string(),
                Verdict::NonIntegral { index } => format!("NON_INTEGRAL at {index}"),
            };
            if let Some(l) = lambda {
                let a = c.parse_a(&l).map_err(|e| e.to_string())?;
                let v = theorem_a_membership(&ctx, &a, n).map_err(|e| e.to_string())?;
                return Ok(format!("{} in I: {}\nverdict: {}\n", c.format_a(&a), ideal.contains(&a), show(&v)));
            }
            if dichotomy {
                let r = theorem_a_dichotomy(&ctx, seed, n).map_err(|e| e.to_string())?;
                let mut s = String::new();
                for row in &r.rows {
                    s.push_str(&format!("{} | in I: {} | {}\n", c.format_a(&row.lambda), row.in_ideal, show(&row.verdict)));
                }
                s.push_str(&format!("agree: {}\n", r.agree));
                return Ok(s);
            }
            let w = build_omega(&ctx.df.f, cfg.prec).map_err(|e| e.to_string())?;
            let res = theorem_b_residual(&w).map_err(|e| e.to_string())?;
            let text = omega_text(&w, cfg.prec).map_err(|e| e.to_string())?;
            Ok(format!("omega:\n{text}\nroot: {}\nresidual: {res}\n", w.root.to_text()))
        }),
    }
}

fn simple(a: &CurveArgs, f: impl FnOnce(&ExperimentConfig) -> Result<String, String>) -> ExitCode {
    let cfg = match a.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    };
    match f(&cfg) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(path: &str, out: Option<String>) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(3);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    };
    // Panics inside a check become ERROR records carrying the message.
    std::panic::set_hook(Box::new(|_| {}));
    let records = run_suite(&cfg);
    let mut body = String::new();
    for r in &records {
        body.push_str(&serde_json::to_string(r).expect("record serializes"));
        body.push('\n');
    }
    match out.or_else(|| cfg.output.clone()) {
        Some(p) => {
            if let Err(e) = fs::write(&p, body) {
                eprintln!("{p}: {e}");
                return ExitCode::from(2);
            }
        }
        None => {
            let _ = std::io::stdout().write_all(body.as_bytes());
        }
    }
    ExitCode::from(exit_code(&records) as u8)
}
