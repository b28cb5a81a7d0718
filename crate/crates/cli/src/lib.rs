//! Command-line front end: argument types, parsing helpers and a
//! `dispatch` that runs one pipeline and renders its report.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hgnf::algebraicity::{self, Windows};
use hgnf::ellfam;
use hgnf::hgdef::{self, HGDatum};
use hgnf::identities::{self, Verdict};
use hgnf::numerics::{fmt_q, parse_poly, parse_q, QPoly, Q};
use hgnf::opalg::{self, DiffOp};
use hgnf::par::Exec;
use hgnf::series;
use hgnf::Error;

pub const DIGITS_ENV: &str = "HGNF_DIGITS";

/// Exit status of a finished command.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const USAGE: i32 = 2;
}

#[derive(Parser, Debug)]
#[command(name = "hgnf", version, about = "Hypergeometric operators, series, identities and certificates")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct DatumArg {
    /// Datum as "a=1/2,1/2;b=1,1".
    #[arg(long)]
    pub datum: String,
}

impl DatumArg {
    fn parse(&self) -> Result<HGDatum, Error> {
        self.datum.parse()
    }
}

#[derive(Args, Debug, Clone)]
pub struct DigitsArg {
    /// Working precision in decimal digits.
    #[arg(long, env = DIGITS_ENV, default_value_t = 30)]
    pub digits: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hodge numbers, interlacing, balance and gamma vector of a datum.
    Classify(DatumArg),
    /// Coefficients of the hypergeometric series.
    Series {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Frobenius basis, or the deformation at a given exponent.
    Frobenius {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, default_value_t = 20)]
        order: usize,
        /// Expand `Phi(s, z)` around this exponent instead of the log basis.
        #[arg(long, allow_hyphen_values = true)]
        s0: Option<String>,
        #[arg(long, default_value_t = 3)]
        jet_order: usize,
    },
    /// Picard-Fuchs operator in `D = z d/dz`.
    Pf {
        #[command(flatten)]
        datum: DatumArg,
        /// The operator with `a` replaced by ones and `b` by `a + 1`.
        #[arg(long)]
        hat: bool,
        /// Pull back along `z -> c z^k`, given as "c:k".
        #[arg(long, allow_hyphen_values = true)]
        pullback: Option<String>,
        /// Rewrite in `w = 1/z`.
        #[arg(long)]
        inverse: bool,
    },
    /// Check that the operator kills the series and the Frobenius basis.
    PfCheck {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, default_value_t = 40)]
        order: usize,
    },
    /// Quasi-period series and the check that the hat operator sends it to 1.
    Quasiperiod {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Certified moment sums `sum n^j t_n(z0)` for `j <= q`.
    Moments {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        digits: DigitsArg,
    },
    /// Zeta identities at special points.
    #[command(subcommand)]
    Identity(IdentityCommand),
    /// Algebraic functions and exponential integrals.
    #[command(subcommand)]
    Algebraic(AlgebraicCommand),
    /// The worked elliptic family.
    #[command(subcommand)]
    Ellfam(EllfamCommand),
}

#[derive(Subcommand, Debug)]
pub enum IdentityCommand {
    /// Check `sum P(n) t_n(z0) = k zeta(q+1)` to the working precision.
    Verify {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        /// Polynomial in n, e.g. "10*n^2-6*n+1".
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// Expected zeta argument; must equal deg P + 1.
        #[arg(long)]
        zeta: Option<u32>,
        #[command(flatten)]
        digits: DigitsArg,
    },
    /// Search for an identity with bounded integer coefficients.
    Discover {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value = "1000000")]
        height: String,
        #[command(flatten)]
        digits: DigitsArg,
    },
    /// The known special points.
    Registry,
}

#[derive(Subcommand, Debug)]
pub enum AlgebraicCommand {
    /// Polynomial relation between z and the series.
    Minpoly {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long)]
        deg_y: usize,
        #[arg(long)]
        deg_z: usize,
        /// Number of series coefficients matched (default: unknowns + 10).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Laurent polynomial G(z, f) with D G = f_sum G.
    Expint {
        #[command(flatten)]
        datum: DatumArg,
        /// Use the sum over all Galois conjugates as f_sum.
        #[arg(long)]
        conjugate_sum: bool,
        /// Fixed window "i0:i1,j0:j1"; otherwise windows grow up to --cap.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 3)]
        cap: usize,
        /// Order of the exact check of D G = f_sum G.
        #[arg(long, default_value_t = 50)]
        check_order: usize,
    },
    /// Value of the half-integral exponential integral at z = 4/N.
    Unit {
        #[arg(long = "N")]
        n: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum EllfamCommand {
    /// Run the whole pipeline and print the report.
    Demo {
        #[arg(long, default_value_t = 40)]
        order: usize,
    },
}

/// Polynomial in `n` with rational coefficients.
pub fn parse_poly_in_n(text: &str) -> Result<QPoly, Error> {
    parse_poly(text, 'n')
}

/// What a command prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn note(mut self, line: impl AsRef<str>) -> Self {
        let _ = writeln!(self.stderr, "{}", line.as_ref());
        self
    }
}

/// Exit code for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidDatum(_) | Error::Parse { .. } | Error::Precondition(_) | Error::PoleCollision { .. } => exit::USAGE,
        _ => exit::NEGATIVE,
    }
}

fn render<T: Serialize>(output: Output, value: &T, text: impl FnOnce() -> String) -> String {
    match output {
        Output::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
        Output::Text => {
            let mut s = text();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    }
}

fn json_text<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn parse_window(text: &str) -> Result<Windows, Error> {
    let bad = || usage(format!("window {text:?} should look like \"-1:1,-2:2\""));
    let range = |s: &str| -> Result<(i64, i64), Error> {
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let lo = a.trim().parse().map_err(|_| bad())?;
        let hi = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok((lo, hi))
    };
    let (i, j) = text.split_once(',').ok_or_else(bad)?;
    Ok(Windows::new(range(i)?, range(j)?))
}

/// Run one command. Errors become exit codes 1 or 2 with a message on
/// stderr; nothing here writes to the process streams.
pub fn dispatch(cli: &Cli) -> Outcome {
    match run(cli) {
        Ok(o) => o,
        Err(e) => Outcome::new(error_code(&e), String::new()).note(format!("error: {e}")),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let out = cli.output;
    match &cli.command {
        Command::Classify(d) => {
            let r = hgdef::classify(&d.parse()?);
            Ok(Outcome::new(exit::OK, render(out, &r, || json_text(&r))))
        }
        Command::Series { datum, order } => {
            let s = series::hg_coefficients(&datum.parse()?, *order);
            Ok(Outcome::new(exit::OK, render(out, &s, || {
                s.coeffs().iter().enumerate().map(|(n, c)| format!("{n}\t{}", fmt_q(c))).collect::<Vec<_>>().join("\n")
            })))
        }
        Command::Frobenius { datum, order, s0, jet_order } => {
            let d = datum.parse()?;
            match s0 {
                Some(s0) => {
                    let s = series::frobenius_series(&d, &parse_q(s0)?, *jet_order, *order)?;
                    Ok(Outcome::new(exit::OK, render(out, &s, || json_text(&s))))
                }
                None => {
                    let b = series::frobenius_basis(&d, *order)?;
                    Ok(Outcome::new(exit::OK, render(out, &b, || json_text(&b))))
                }
            }
        }
        Command::Pf { datum, hat, pullback, inverse } => {
            let d = datum.parse()?;
            let mut op = if *hat { opalg::hat_operator(&d)? } else { opalg::pf_operator(&d) };
            if let Some(pb) = pullback {
                let (c, k) = pb.split_once(':').ok_or_else(|| usage("pullback should look like \"-27:2\""))?;
                let k: i64 = k.trim().parse().map_err(|_| usage("pullback exponent must be an integer"))?;
                op = opalg::pullback_powermap(&op, &parse_q(c.trim())?, k)?;
            }
            if *inverse {
                op = opalg::to_inverse_coordinate(&op);
            }
            let v = json!({ "operator": op.to_string(), "order": op.order() });
            Ok(Outcome::new(exit::OK, render(out, &v, || op.to_string())))
        }
        Command::PfCheck { datum, order } => {
            let d = datum.parse()?;
            let op = opalg::pf_operator(&d);
            let f = series::hg_coefficients(&d, *order);
            let series_ok = op.apply_with(&f, Exec::default())?.is_zero();
            let basis_ok = if d.is_mum() {
                let basis = series::frobenius_basis(&d, *order)?;
                let mut ok = true;
                for b in &basis {
                    ok &= op.apply_with(b, Exec::default())?.is_zero();
                }
                Some(ok)
            } else {
                None
            };
            let all = series_ok && basis_ok.unwrap_or(true);
            let v = json!({
                "operator": op.to_string(),
                "order": order,
                "series_annihilated": series_ok,
                "basis_annihilated": basis_ok,
            });
            let code = if all { exit::OK } else { exit::NEGATIVE };
            Ok(Outcome::new(code, render(out, &v, || format!("series: {series_ok}, basis: {basis_ok:?}"))))
        }
        Command::Quasiperiod { datum, order } => {
            let d = datum.parse()?;
            let v = series::quasiperiod_series(&d, *order)?;
            let one = series::RatSeries::monomial(Q::from_integer(0.into()), *order);
            let hat = opalg::hat_operator(&d)?;
            // the hat operator acts on z V = V / w
            let zv = opalg::Operand::shift(&v, -1)?;
            let hat_ok = hat.apply_with(&zv, Exec::default())?.sub(&one)?.is_zero();
            let l = opalg::to_inverse_coordinate(&opalg::pf_operator(&d));
            let l_ok = l.apply_with(&v, Exec::default())?.sub(&one)?.is_zero();
            let v = json!({
                "series": v,
                "hat_operator": hat.to_string(),
                "hat_image_is_one": hat_ok,
                "operator_w": l.to_string(),
                "operator_image_is_one": l_ok,
            });
            let code = if hat_ok { exit::OK } else { exit::NEGATIVE };
            Ok(Outcome::new(code, render(out, &v, || json_text(&v))))
        }
        Command::Moments { datum, z0, q, digits } => {
            let d = datum.parse()?;
            let z0 = parse_q(z0)?;
            let m = series::moment_sums(&d, &z0, *q, digits.digits)?;
            Ok(Outcome::new(exit::OK, render(out, &m, || {
                m.iter().enumerate().map(|(j, x)| format!("S_{j} = {x}")).collect::<Vec<_>>().join("\n")
            })))
        }
        Command::Identity(cmd) => run_identity(out, cmd),
        Command::Algebraic(cmd) => run_algebraic(out, cmd),
        Command::Ellfam(EllfamCommand::Demo { order }) => {
            let r = ellfam::ellfam_demo(*order)?;
            Ok(Outcome::new(exit::OK, render(out, &r, || json_text(&r)))
                .note(format!("inhomogeneity {} z, Q0 = {}", fmt_q(&r.inhomogeneity.k), fmt_q(&r.q0_constant))))
        }
    }
}

fn run_identity(out: Output, cmd: &IdentityCommand) -> Result<Outcome, Error> {
    match cmd {
        IdentityCommand::Verify { datum, z0, p, k, zeta, digits } => {
            let d = datum.parse()?;
            let z0 = parse_q(z0)?;
            let p = parse_poly_in_n(p)?;
            let k = parse_q(k)?;
            if let (Some(z), Some(deg)) = (zeta, p.degree()) {
                if *z as usize != deg + 1 {
                    return Err(usage(format!("--zeta {z} does not match deg P + 1 = {}", deg + 1)));
                }
            }
            let v = identities::verify_zeta_identity(&d, &z0, &p, &k, digits.digits)?;
            let (code, line) = match &v {
                Verdict::Verified { certificate } => (exit::OK, format!("verified: {}", certificate.identity_string())),
                Verdict::Refuted { residual, threshold_digits } => {
                    (exit::NEGATIVE, format!("refuted: residual {} is not below 1e-{threshold_digits}", residual.err_sci()))
                }
            };
            Ok(Outcome::new(code, render(out, &v, || line.clone())).note(line))
        }
        IdentityCommand::Discover { datum, z0, height, digits } => {
            let d = datum.parse()?;
            let z0 = parse_q(z0)?;
            let height = height.parse().map_err(|_| usage("height must be a positive integer"))?;
            match identities::discover_identity(&d, &z0, digits.digits, &height)? {
                Some(c) => {
                    let line = c.identity_string();
                    Ok(Outcome::new(exit::OK, render(out, &c, || line.clone())).note(line))
                }
                None => {
                    let v = json!({ "status": "none_found", "digits": digits.digits, "height": height.to_string() });
                    Ok(Outcome::new(exit::NEGATIVE, render(out, &v, || "no relation found".into())))
                }
            }
        }
        IdentityCommand::Registry => {
            let r = identities::hodge_point_registry();
            Ok(Outcome::new(exit::OK, render(out, &r, || {
                r.iter().map(|e| format!("{}  z0 = {}", e.datum, fmt_q(&e.z0))).collect::<Vec<_>>().join("\n")
            })))
        }
    }
}

fn run_algebraic(out: Output, cmd: &AlgebraicCommand) -> Result<Outcome, Error> {
    match cmd {
        AlgebraicCommand::Minpoly { datum, deg_y, deg_z, order } => {
            let d = datum.parse()?;
            let n = order.unwrap_or((deg_y + 1) * (deg_z + 1) + algebraicity::DEFAULT_MARGIN);
            match algebraicity::min_poly(&d, *deg_y, *deg_z, n) {
                Ok(p) => Ok(Outcome::new(exit::OK, render(out, &p, || json_text(&p)))),
                Err(Error::NotFound(msg)) => {
                    let v = json!({ "status": "none_found", "reason": msg });
                    Ok(Outcome::new(exit::NEGATIVE, render(out, &v, || "no relation found".into())))
                }
                Err(e) => Err(e),
            }
        }
        AlgebraicCommand::Expint { datum, conjugate_sum, window, cap, check_order } => {
            let d = datum.parse()?;
            let fixed = window.as_deref().map(parse_window).transpose()?;
            let max_monos = match fixed {
                Some(w) => w.monomials().len(),
                None => (2 * cap + 1) * (4 * cap + 1),
            };
            let n = (max_monos + algebraicity::DEFAULT_MARGIN).max(*check_order);
            let f = series::hg_coefficients(&d, n);
            let f_sum = if *conjugate_sum {
                let mut acc: Option<series::RatSeries> = None;
                for c in hgdef::conjugates(&d) {
                    let s = series::hg_coefficients(&c, n);
                    acc = Some(match acc {
                        None => s,
                        Some(a) => opalg::Operand::add(&a, &s)?,
                    });
                }
                acc.expect("a datum has itself as a conjugate")
            } else {
                f.clone()
            };
            let hit = match fixed {
                Some(w) => algebraicity::rational_exp_integral(&f, &f_sum, w, w.monomials().len() + algebraicity::DEFAULT_MARGIN)?
                    .map(|g| (w, g)),
                None => algebraicity::search_exp_integral(&f, &f_sum, *cap, algebraicity::DEFAULT_MARGIN)?,
            };
            match hit {
                Some((w, g)) => {
                    let verified = algebraicity::verify_dlog(&g, &f.truncate(*check_order), &f_sum.truncate(*check_order))?;
                    let v = json!({ "window": w, "G": g, "dlog_verified_order": if verified { Some(*check_order) } else { None } });
                    let code = if verified { exit::OK } else { exit::NEGATIVE };
                    Ok(Outcome::new(code, render(out, &v, || json_text(&v))))
                }
                None => {
                    let v = json!({ "status": "none_found" });
                    Ok(Outcome::new(exit::NEGATIVE, render(out, &v, || "no certificate in the searched windows".into())))
                }
            }
        }
        AlgebraicCommand::Unit { n } => {
            let r = algebraicity::unit_evaluation(*n)?;
            Ok(Outcome::new(exit::OK, render(out, &r, || {
                let mp: Vec<String> = r.minpoly.iter().map(fmt_q).collect();
                format!("F(4/{}) = {}  minpoly [{}]  unit: {}", r.n, r.value, mp.join(", "), r.is_unit)
            })))
        }
    }
}

/// Canonical text of an operator, re-parsed to confirm the round trip.
pub fn operator_round_trip(op: &DiffOp) -> Result<bool, Error> {
    let back: DiffOp = op.to_string().parse()?;
    Ok(&back == op)
}
