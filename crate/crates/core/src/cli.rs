//! Batch front-end: tables, solver runs, and oracle verifications, with text
//! or JSON output and the exit-code contract
//! 0 ok / 2 gate failure / 3 numerical failure / 4 bad input / 5 cap exceeded.

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::model::{BoundaryField, ModelParams};
use crate::oracle::{
    build_volume, check_compatibility, count_admissible, count_admissible_unbounded,
    mu_norm_exponent_range, norm_exponent_string, normalization_residual, omega_count_closed_form,
    padic_norm_of_count, partition_function, OracleReport, Topology, DEFAULT_ENUMERATION_CAP,
};
use crate::padic::{PadicNumber, DEFAULT_PRECISION};
use crate::report::SolveReport;
use crate::solve::{periodic_solve, ti_solve};

#[derive(Parser, Debug)]
#[command(
    name = "padic-hc",
    version,
    about = "Exact p-adic boundary laws for the hard-core model on Cayley trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Primes p with p | 2^k - 1 (any boundary law at all)
    Existence,
    /// Primes p with p | 2^k - 1 and p | k - 2 (period-2 candidates)
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveClass {
    Ti,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    /// Admissible-configuration counting: enumeration vs DP vs closed form
    Count,
    /// Compatibility of the finite-volume measures across one level
    Compat,
    /// Weight/measure norms, partition-function norm, normalization
    Norms,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reproduce a solvability table over k = 1..=kmax
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        #[arg(long)]
        kmax: u32,
        #[arg(long, default_value_t = 200)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Solve a boundary law and re-verify the solution
    Solve {
        #[arg(value_enum)]
        class: SolveClass,
        #[arg(long = "p")]
        p: u64,
        #[arg(long = "k")]
        k: u32,
        /// Coupling J as a rational num/den (exclusive with --lambda)
        #[arg(long = "J")]
        coupling: Option<String>,
        /// Fugacity as a rational num/den or a digit list d0,d1,d2,...
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, env = "PADIC_HC_PRECISION", default_value_t = DEFAULT_PRECISION)]
        precision: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Brute-force finite-volume verification
    Oracle {
        #[arg(value_enum)]
        check: OracleCheck,
        #[arg(long = "k")]
        k: u32,
        #[arg(long = "n")]
        n: u32,
        #[arg(long = "p")]
        p: Option<u64>,
        #[arg(long = "J")]
        coupling: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        /// Boundary law: "ti", "periodic", or a constant rational value
        #[arg(long, default_value = "ti")]
        boundary: String,
        /// Enumeration cap override (vertices)
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, env = "PADIC_HC_PRECISION", default_value_t = DEFAULT_PRECISION)]
        precision: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Parse "num", "num/den", or a digit list "d0,d1,..." into a p-adic value.
pub fn parse_padic_argument(text: &str, prime: u64, precision: u32) -> Result<PadicNumber> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::BadInput("empty numeric argument".into()));
    }
    if text.contains(',') {
        let mut value = BigInt::from(0);
        let mut scale = BigInt::from(1);
        for part in text.split(',') {
            let digit: u64 = part
                .trim()
                .parse()
                .map_err(|_| Error::BadInput(format!("bad digit '{part}'")))?;
            if digit >= prime {
                return Err(Error::BadInput(format!(
                    "digit {digit} is not below the prime {prime}"
                )));
            }
            value += &scale * BigInt::from(digit);
            scale *= BigInt::from(prime);
        }
        return PadicNumber::from_integer(value, prime, precision);
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::BadInput(format!("bad numerator '{num}'")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::BadInput(format!("bad denominator '{den}'")))?;
    PadicNumber::from_rational(num, den, prime, precision)
}

fn build_params(
    p: u64,
    k: u32,
    coupling: &Option<String>,
    lambda: &Option<String>,
    precision: u32,
) -> Result<ModelParams> {
    match (coupling, lambda) {
        (Some(_), Some(_)) | (None, None) => Err(Error::BadInput(
            "supply exactly one of --J and --lambda".into(),
        )),
        (Some(j), None) => {
            let j = parse_padic_argument(j, p, precision)?;
            ModelParams::from_coupling(p, k, j)
        }
        (None, Some(l)) => {
            let l = parse_padic_argument(l, p, precision)?;
            ModelParams::from_fugacity(p, k, l)
        }
    }
}

fn render_table(table: &std::collections::BTreeMap<u32, Vec<u64>>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(table).expect("table serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::from("k\tp\n");
            for (k, primes) in table {
                let cell = if primes.is_empty() {
                    "-".to_string()
                } else {
                    primes
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                out.push_str(&format!("{k}\t{cell}\n"));
            }
            out
        }
    }
}

fn print_solve_report(report: &SolveReport, format: Format) {
    match format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("report serializes")
            )
        }
    }
}

fn boundary_from_flag(
    flag: &str,
    params: &ModelParams,
    precision: u32,
) -> Result<(BoundaryField, Option<SolveReport>)> {
    match flag {
        "ti" => {
            let rep = ti_solve(params, precision)?;
            if rep.solutions.is_empty() {
                return Err(Error::BadInput(format!(
                    "--boundary ti: no TI solution (status {})",
                    rep.status
                )));
            }
            let z = rep.solutions[0].residues[0].clone();
            Ok((BoundaryField::constant(z)?, Some(rep)))
        }
        "periodic" => {
            let rep = periodic_solve(params, precision)?;
            let sol = rep
                .solutions
                .iter()
                .find(|s| s.residues.len() == 2)
                .ok_or_else(|| {
                    Error::BadInput(format!(
                        "--boundary periodic: no period-2 pair (status {})",
                        rep.status
                    ))
                })?;
            let b = BoundaryField::alternating(sol.residues[0].clone(), sol.residues[1].clone())?;
            Ok((b, Some(rep)))
        }
        other => {
            let z = parse_padic_argument(other, params.prime(), precision)?;
            Ok((BoundaryField::constant(z)?, None))
        }
    }
}

fn oracle_text(report: &OracleReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "volume: k = {}, n = {}, topology = {}\n",
        report.k, report.n, report.topology
    ));
    if let Some(p) = report.p {
        out.push_str(&format!("p = {p}\n"));
    }
    if let Some(c) = &report.omega_count {
        out.push_str(&format!("admissible configurations: {c}\n"));
    }
    if let Some(c) = &report.omega_count_closed_form {
        out.push_str(&format!("closed-form count: {c}\n"));
    }
    if let Some(m) = report.closed_form_match {
        out.push_str(&format!("closed-form match: {m}\n"));
    }
    if let Some(nrm) = &report.omega_norm {
        out.push_str(&format!("|omega|_p: {nrm}\n"));
    }
    if let Some(ok) = report.normalization_ok {
        out.push_str(&format!("normalization sums to 1: {ok}\n"));
    }
    if let Some(dev) = &report.min_deviation_valuation {
        out.push_str(&format!("min deviation valuation: {dev}\n"));
    }
    if let Some([lo, hi]) = &report.mu_norm_range {
        out.push_str(&format!("|mu| range: [{lo}, {hi}]\n"));
    }
    out
}

fn cmd_oracle_count(k: u32, n: u32, p: Option<u64>, cap: usize, format: Format) -> Result<i32> {
    let dp = count_admissible_unbounded(k, n, Topology::FullCayley)?;
    // within the cap, cross-check the level recursion against the explicit
    // enumeration and the explicit-tree DP
    match build_volume(k, n, Topology::FullCayley, cap) {
        Ok(vol) => {
            let enumerated = crate::oracle::enumerate_admissible(&vol)?.len();
            if count_admissible(&vol) != dp || BigUint::from(enumerated) != dp {
                return Err(Error::Internal(
                    "enumeration and DP disagree on the same volume".into(),
                ));
            }
        }
        Err(Error::CapExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    let closed = match omega_count_closed_form(k, n) {
        Ok(c) => Some(c),
        Err(Error::ClosedFormUnsupportedOrder) => None,
        Err(e) => return Err(e),
    };
    let closed_match = closed.as_ref().map(|c| *c == dp);
    let report = OracleReport {
        k,
        n,
        topology: Topology::FullCayley,
        p,
        boundary: None,
        omega_count: Some(dp.to_string()),
        omega_count_closed_form: closed.as_ref().map(|c| c.to_string()),
        closed_form_match: closed_match,
        omega_norm: match p {
            Some(p) => Some(padic_norm_of_count(&dp, p)?.to_string()),
            None => None,
        },
        normalization_ok: None,
        min_deviation_valuation: None,
        mu_norm_range: None,
    };
    match format {
        Format::Text => print!("{}", oracle_text(&report)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(if closed_match.unwrap_or(true) { 0 } else { 1 })
}

fn cmd_oracle_compat(
    params: &ModelParams,
    boundary_flag: &str,
    n: u32,
    cap: usize,
    precision: u32,
    format: Format,
) -> Result<i32> {
    let (boundary, _) = boundary_from_flag(boundary_flag, params, precision)?;
    let rep = check_compatibility(params, &boundary, n, cap)?;
    let report = OracleReport {
        k: params.order(),
        n,
        topology: Topology::KBranch,
        p: Some(params.prime()),
        boundary: Some(boundary),
        omega_count: None,
        omega_count_closed_form: None,
        closed_form_match: None,
        omega_norm: None,
        normalization_ok: None,
        min_deviation_valuation: Some(rep.min_deviation),
        mu_norm_range: None,
    };
    match format {
        Format::Text => print!("{}", oracle_text(&report)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(if rep.compatible { 0 } else { 1 })
}

fn cmd_oracle_norms(
    params: &ModelParams,
    boundary_flag: &str,
    n: u32,
    cap: usize,
    precision: u32,
    format: Format,
) -> Result<i32> {
    let (boundary, _) = boundary_from_flag(boundary_flag, params, precision)?;
    let vol = build_volume(params.order(), n, Topology::FullCayley, cap)?;
    let _z = partition_function(&vol, params, &boundary)?;
    let normalization = normalization_residual(&vol, params, &boundary)?;
    let normalization_ok = normalization.at_least(precision as i64 / 2);
    let (lo, hi) = mu_norm_exponent_range(&vol, params, &boundary)?;
    let count = count_admissible(&vol);
    let report = OracleReport {
        k: params.order(),
        n,
        topology: Topology::FullCayley,
        p: Some(params.prime()),
        boundary: Some(boundary),
        omega_count: Some(count.to_string()),
        omega_count_closed_form: None,
        closed_form_match: None,
        omega_norm: Some(padic_norm_of_count(&count, params.prime())?.to_string()),
        normalization_ok: Some(normalization_ok),
        min_deviation_valuation: None,
        mu_norm_range: Some([
            norm_exponent_string(params.prime(), lo),
            norm_exponent_string(params.prime(), hi),
        ]),
    };
    match format {
        Format::Text => print!("{}", oracle_text(&report)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(if normalization_ok { 0 } else { 1 })
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Table {
            kind,
            kmax,
            pmax,
            format,
        } => {
            let table = match kind {
                TableKind::Existence => crate::model::existence_table(kmax, pmax)?,
                TableKind::Periodic => crate::model::periodic_table(kmax, pmax)?,
            };
            print!("{}", render_table(&table, format));
            Ok(0)
        }
        Command::Solve {
            class,
            p,
            k,
            coupling,
            lambda,
            precision,
            format,
        } => {
            check_precision(precision)?;
            let params = build_params(p, k, &coupling, &lambda, precision)?;
            let report = match class {
                SolveClass::Ti => ti_solve(&params, precision)?,
                SolveClass::Periodic => periodic_solve(&params, precision)?,
            };
            print_solve_report(&report, format);
            Ok(report.exit_code())
        }
        Command::Oracle {
            check,
            k,
            n,
            p,
            coupling,
            lambda,
            boundary,
            cap,
            precision,
            format,
        } => {
            check_precision(precision)?;
            let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
            match check {
                OracleCheck::Count => cmd_oracle_count(k, n, p, cap, format),
                OracleCheck::Compat | OracleCheck::Norms => {
                    let p = p.ok_or_else(|| {
                        Error::BadInput("--p is required for this oracle check".into())
                    })?;
                    let params = build_params(p, k, &coupling, &lambda, precision)?;
                    match check {
                        OracleCheck::Compat => {
                            cmd_oracle_compat(&params, &boundary, n, cap, precision, format)
                        }
                        _ => cmd_oracle_norms(&params, &boundary, n, cap, precision, format),
                    }
                }
            }
        }
    }
}

fn check_precision(precision: u32) -> Result<()> {
    if precision < 8 {
        return Err(Error::BadInput(format!(
            "precision must be at least 8 digits, got {precision}"
        )));
    }
    Ok(())
}

/// Exit code for failures that never reached a report.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 5,
        Error::BadInput(_)
        | Error::InvalidPrime(_)
        | Error::NotPrime(_)
        | Error::ZeroDenominator
        | Error::InvalidOrder
        | Error::NotInEp
        | Error::CouplingOutsideDomain
        | Error::OrderTooLargeForTable(_)
        | Error::BoundaryNotInEp { .. }
        | Error::BoundaryLevelMissing { .. } => 4,
        _ => 3,
    }
}

/// Run a parsed command line, printing output and returning the exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_and_digit_arguments() {
        let x = parse_padic_argument("13", 3, 8).unwrap();
        assert!(x.congruent_integer(13, 3).unwrap());
        let y = parse_padic_argument("13/2", 3, 8).unwrap();
        let two = PadicNumber::from_integer(2, 3, 8).unwrap();
        assert!(y.mul(&two).unwrap().congruent_integer(13, 8).unwrap());
        // digit list 1,1,1 = 1 + 3 + 9 = 13
        let d = parse_padic_argument("1,1,1", 3, 8).unwrap();
        assert!(d.congruent_integer(13, 8).unwrap());
        assert!(parse_padic_argument("1,5", 3, 8).is_err());
        assert!(parse_padic_argument("x", 3, 8).is_err());
        assert!(parse_padic_argument("1/0", 3, 8).is_err());
    }

    #[test]
    fn params_need_exactly_one_source() {
        assert!(build_params(3, 2, &None, &None, 12).is_err());
        assert!(build_params(3, 2, &Some("3".into()), &Some("13".into()), 12).is_err());
        assert!(build_params(3, 2, &None, &Some("13".into()), 12).is_ok());
    }

    #[test]
    fn table_text_rendering() {
        let table = crate::model::existence_table(4, 200).unwrap();
        let text = render_table(&table, Format::Text);
        assert_eq!(text, "k\tp\n1\t-\n2\t3\n3\t7\n4\t3, 5\n");
    }

    #[test]
    fn exit_codes_for_errors() {
        assert_eq!(
            error_exit_code(&Error::CapExceeded {
                vertices: 100,
                cap: 24
            }),
            5
        );
        assert_eq!(error_exit_code(&Error::BadInput("x".into())), 4);
        assert_eq!(error_exit_code(&Error::ZeroPartitionFunction), 3);
    }
}
