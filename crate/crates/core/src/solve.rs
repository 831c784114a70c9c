//! Boundary-law solvers: the translation-invariant Hensel lift, the
//! exhaustive residue scans, and the two period-2 routes.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::analytic::{eval_residue, hensel_lift, residues, sqrt_p, valuation_of};
use crate::error::{Error, Result};
use crate::factor::pow_mod;
use crate::model::{g_map, in_ep, ti_polynomial, u_polynomial, ModelParams, Residual};
use crate::padic::{PadicNumber, Valuation};
use crate::poly::PadicPolynomial;
use crate::report::{GateCheck, ReportStatus, Solution, SolutionClass, SolveReport};

fn existence_gate_check(p: u64, k: u32) -> GateCheck {
    let r = pow_mod(2, k as u64, p);
    GateCheck::new(
        "p divides 2^k - 1",
        r == 1 % p,
        format!("2^{k} mod {p} = {r}"),
    )
}

fn k_plus_2_check(p: u64, k: u32) -> GateCheck {
    let r = (k as u64 + 2) % p;
    GateCheck::new(
        "p does not divide k + 2",
        r != 0,
        format!("(k + 2) mod {p} = {r}"),
    )
}

fn k_minus_2_check(p: u64, k: u32) -> GateCheck {
    let r = (k as i64 - 2).rem_euclid(p as i64);
    let witness = if k == 2 {
        "k - 2 = 0 and every prime divides 0".to_string()
    } else {
        format!("(k - 2) mod {p} = {r}")
    };
    GateCheck::new("p divides k - 2", r == 0, witness)
}

fn report(
    params: &ModelParams,
    gates: Vec<GateCheck>,
    solutions: Vec<Solution>,
    status: ReportStatus,
    notes: Vec<String>,
) -> SolveReport {
    SolveReport {
        params: params.into(),
        gates,
        solutions,
        status,
        notes,
    }
}

/// Solve the constant boundary law z = ((lambda + z)/z)^k by Hensel lifting
/// from the seed 1. Gate failures come back as a report, not an error.
pub fn ti_solve(params: &ModelParams, precision: u32) -> Result<SolveReport> {
    let p = params.prime();
    let k = params.order();
    let gates = vec![existence_gate_check(p, k), k_plus_2_check(p, k)];
    if !gates.iter().all(|g| g.holds) {
        return Ok(report(
            params,
            gates,
            vec![],
            ReportStatus::GateFailed,
            vec![],
        ));
    }

    let f = ti_polynomial(params)?;
    let z = hensel_lift(&f, 1, precision).map_err(|e| match e {
        Error::HenselNotRoot { .. } | Error::HenselSingularDerivative { .. } => {
            Error::Internal(format!("gates passed but the Hensel seed failed: {e}"))
        }
        other => other,
    })?;
    if !in_ep(&z) {
        return Err(Error::Internal(
            "lifted root escaped E_p despite seed 1".into(),
        ));
    }
    let f_residual = Residual::from_value(&f.eval(&z)?);
    let fixed_point_residual = Residual::from_value(&z.sub(&g_map(params, &z)?)?);
    let solution = Solution {
        class: SolutionClass::Ti,
        residues: vec![z],
        precision,
        residual_valuations: vec![f_residual, fixed_point_residual],
    };
    Ok(report(
        params,
        gates,
        vec![solution],
        ReportStatus::Solved,
        vec![],
    ))
}

/// All residues r mod p^m in the E_p window (r = 1 mod p) with F(r) = 0
/// (mod p^m). Runs the honest scan regardless of gates; the gates are
/// precisely the conditions under which this comes back empty or a singleton.
pub fn ti_uniqueness_scan(params: &ModelParams, modulus_exponent: u32) -> Result<Vec<u64>> {
    let p = params.prime();
    let k = params.order();
    let size = (p as u128)
        .checked_pow(modulus_exponent)
        .unwrap_or(u128::MAX);
    if size > 1 << 26 {
        return Err(Error::ScanTooLarge {
            m: modulus_exponent,
            size,
        });
    }
    let pm = size as u64;
    let lam_digits = params.fugacity().residue(modulus_exponent)?;
    let lam = lam_digits.to_u64_digits().first().copied().unwrap_or(0);
    let mut roots = Vec::new();
    let mut r = 1u64;
    while r < pm {
        let lhs = pow_mod(r, k as u64 + 1, pm);
        let rhs = pow_mod((lam + r) % pm, k as u64, pm);
        if lhs == rhs {
            roots.push(r);
        }
        r += p;
    }
    Ok(roots)
}

/// The closed-form period-2 solver for k = 2, p = 3: the quadratic
/// z^2 - (lambda^2 - 2 lambda) z + lambda^2 = 0 solved by the p-adic square
/// root, valid on the ball |lambda - 13|_3 <= 1/27.
pub fn periodic_solve_k2(params: &ModelParams, precision: u32) -> Result<SolveReport> {
    let p = params.prime();
    let k = params.order();
    if k != 2 || p != 3 {
        return Err(Error::BadInput(
            "the closed-form period-2 solver applies to k = 2, p = 3 only".into(),
        ));
    }
    let lam = params.fugacity();
    let n = lam.precision().max(4);
    let thirteen = PadicNumber::from_integer(13, p, n)?;
    let dist = lam.sub(&thirteen)?;
    let in_ball = dist.valuation().at_least(3);
    let digits = lam.digits(3.min(lam.abs_precision() as u32))?;
    let ball_gate = GateCheck::new(
        "lambda lies in the ball |lambda - 13| <= 1/27",
        in_ball,
        format!(
            "needs digits (1, 1, 1); lambda = ({}) + O(3^{}), |lambda - 13|_3 = 3^-({})",
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            lam.abs_precision().min(3),
            dist.valuation()
        ),
    );
    let gates = vec![existence_gate_check(p, k), ball_gate];
    if !in_ball {
        return Ok(report(
            params,
            gates,
            vec![],
            ReportStatus::GateFailed,
            vec![],
        ));
    }

    let two = PadicNumber::from_integer(2, p, n)?;
    let four = PadicNumber::from_integer(4, p, n)?;
    let disc = lam.mul(&lam.sub(&four)?)?;
    let (s, _) = sqrt_p(&disc)?;
    let half_lam = lam.div(&two)?;
    let lam_minus_2 = lam.sub(&two)?;
    let z1 = half_lam.mul(&lam_minus_2.add(&s)?)?;
    let z2 = half_lam.mul(&lam_minus_2.sub(&s)?)?;

    for z in [&z1, &z2] {
        if !in_ep(z) {
            return Err(Error::Internal("quadratic root escaped E_3".into()));
        }
    }
    let check_to = z1
        .abs_precision()
        .min(z2.abs_precision())
        .min(lam.abs_precision())
        .max(3) as u32;
    if z1.congruent(&z2, check_to.min(3))? {
        return Err(Error::Internal("quadratic roots coincide".into()));
    }
    // Vieta cross-checks against the coefficients
    let sum = z1.add(&z2)?;
    let sum_expected = lam.mul(&lam_minus_2)?;
    let prod = z1.mul(&z2)?;
    let prod_expected = lam.mul(lam)?;
    let vieta_to = sum
        .abs_precision()
        .min(sum_expected.abs_precision())
        .min(prod.abs_precision())
        .min(prod_expected.abs_precision())
        .max(3) as u32;
    if !sum.congruent(&sum_expected, vieta_to)? || !prod.congruent(&prod_expected, vieta_to)? {
        return Err(Error::Internal("Vieta identities failed".into()));
    }

    let u = u_polynomial(params)?;
    let residuals = vec![
        Residual::from_value(&u.eval(&z1)?),
        Residual::from_value(&u.eval(&z2)?),
        Residual::from_value(&g_map(params, &z1)?.sub(&z2)?),
        Residual::from_value(&g_map(params, &z2)?.sub(&z1)?),
    ];
    if !residuals[2].at_least(3) || !residuals[3].at_least(3) {
        return Err(Error::Internal("roots do not form a g-orbit".into()));
    }
    let solution = Solution {
        class: SolutionClass::Period2,
        residues: vec![z1, z2],
        precision,
        residual_valuations: residuals,
    };
    let notes = vec![format!(
        "Vieta verified mod 3^{vieta_to}: z1 + z2 = lambda^2 - 2 lambda, z1 z2 = lambda^2"
    )];
    Ok(report(
        params,
        gates,
        vec![solution],
        ReportStatus::Solved,
        notes,
    ))
}

enum UnitRootSearch {
    Roots(Vec<(BigUint, u32)>),
    NoneCertified { depth: u32 },
    Undecided { depth: u32 },
}

/// Breadth-first refinement of the residue classes r = 1 (mod p) against
/// U = 0, switching to Newton as soon as v(U(r)) > 2 v(U'(r)) holds on a
/// class. Terminates when every class is refined to a root or dies, or at
/// the depth cap.
fn search_unit_roots(u: &PadicPolynomial, work: u32) -> Result<UnitRootSearch> {
    let p = u.prime();
    let coeffs = residues(u, work)?;
    let deriv: Vec<BigUint> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigUint::from(i))
        .collect();
    let modulus = BigUint::from(p).pow(work);
    let max_depth = work.saturating_sub(1).min(40);
    let class_limit = 16 * coeffs.len().max(4);

    let mut classes: Vec<BigUint> = vec![BigUint::one()];
    let mut depth = 1u32;
    let mut roots: Vec<(BigUint, u32)> = Vec::new();

    while depth <= max_depth && !classes.is_empty() {
        if classes.len() > class_limit {
            return Ok(UnitRootSearch::Undecided { depth });
        }
        let mut next = Vec::new();
        let step = BigUint::from(p).pow(depth);
        let child_modulus = BigUint::from(p).pow(depth + 1);
        for class in classes {
            if let Some(hit) = newton_refine(&coeffs, &deriv, p, work, &modulus, &class) {
                roots.push(hit);
                continue;
            }
            for t in 0..p {
                let cand = (&class + BigUint::from(t) * &step) % &modulus;
                let val = eval_residue(&coeffs, &(&cand % &child_modulus), &child_modulus);
                if val.is_zero() {
                    next.push(cand);
                }
            }
        }
        classes = next;
        depth += 1;
    }

    if !roots.is_empty() {
        // truncate each root to its honestly settled digits, then dedupe
        let mut seen: Vec<(BigUint, u32)> = Vec::new();
        roots.sort();
        for (a, t) in roots {
            let settled = work - t;
            let reduced = &a % BigUint::from(p).pow(settled);
            if !seen.iter().any(|(b, tb)| {
                let m = BigUint::from(p).pow(settled.min(work - tb));
                (&reduced % &m) == (b % &m)
            }) {
                seen.push((reduced, t));
            }
        }
        Ok(UnitRootSearch::Roots(seen))
    } else if classes.is_empty() {
        Ok(UnitRootSearch::NoneCertified { depth })
    } else {
        Ok(UnitRootSearch::Undecided { depth })
    }
}

/// Newton iteration tolerating |U'(a)|_p < 1: applicable on a class once
/// v(U(a)) > 2 v(U'(a)); the residual valuation strictly grows every step.
/// Returns the refined residue and t = v(U'(root)).
fn newton_refine(
    coeffs: &[BigUint],
    deriv: &[BigUint],
    p: u64,
    work: u32,
    modulus: &BigUint,
    seed: &BigUint,
) -> Option<(BigUint, u32)> {
    let mut a = seed.clone();
    let mut prev_val = 0u32;
    for iteration in 0..128 {
        let fa = eval_residue(coeffs, &a, modulus);
        let vf = valuation_of(&fa, p, work);
        let fpa = eval_residue(deriv, &a, modulus);
        let vfp = valuation_of(&fpa, p, work);
        if vf >= work {
            return Some((a, vfp));
        }
        if vf <= 2 * vfp || vfp >= work {
            return None;
        }
        if iteration > 0 && vf <= prev_val {
            return None;
        }
        prev_val = vf;
        let p_t = BigUint::from(p).pow(vfp);
        let unit = &fpa / &p_t;
        let inv = match crate::padic::PadicNumber::from_residue(unit, p, work) {
            Ok(x) => match crate::padic::PadicNumber::one(p, work).div(&x) {
                Ok(i) => i.residue(work).ok()?,
                Err(_) => return None,
            },
            Err(_) => return None,
        };
        let step = (&fa / &p_t) * inv % modulus;
        a = (&a + modulus - step) % modulus;
    }
    None
}

/// Period-2 solver for general k: gates, the dual-route U polynomial, then
/// either a plain Hensel lift (simple seed) or the refine-search when U'(1)
/// vanishes mod p. Outcomes that find no genuinely periodic pair are
/// reported as statuses, never silently upgraded.
pub fn periodic_solve_general(params: &ModelParams, precision: u32) -> Result<SolveReport> {
    let p = params.prime();
    let k = params.order();
    let mut gates = vec![existence_gate_check(p, k), k_minus_2_check(p, k)];
    if !gates.iter().all(|g| g.holds) {
        return Ok(report(
            params,
            gates,
            vec![],
            ReportStatus::GateFailed,
            vec![],
        ));
    }
    gates.push(GateCheck::new("p >= 7", p >= 7, format!("p = {p}")));
    if p < 7 {
        return Ok(report(
            params,
            gates,
            vec![],
            ReportStatus::Undecided,
            vec![
                "necessary divisibility conditions hold; the simple-root argument needs p >= 7, \
                 so existence is undecided for p in {3, 5}"
                    .into(),
            ],
        ));
    }

    let u = u_polynomial(params)?;
    let one = PadicNumber::one(p, precision.max(2));
    let u1 = u.eval(&one)?;
    if !u1.valuation().at_least(1) {
        return Err(Error::Internal("gates passed but U(1) != 0 (mod p)".into()));
    }
    let du = u.derivative()?;
    let du1 = du.eval(&one)?;
    let simple_seed = matches!(du1.valuation(), Valuation::Finite(0));

    if simple_seed {
        let z1 = hensel_lift(&u, 1, precision)?;
        let z2 = g_map(params, &z1)?;
        let check_to = z1.abs_precision().min(z2.abs_precision()).max(2) as u32;
        if !z1.congruent(&z2, check_to)? {
            return solved_pair_report(params, gates, &u, z1, z2, precision);
        }
        // The unique E_p root of U is a fixed point of g. Per the search
        // convention, scan mod p^2 for any other residue class before
        // giving up.
        let other = scan_u_roots_mod_p2(&u, p)?;
        let note = format!(
            "the lifted root is g-fixed (TI-coincident); mod-p^2 scan found {} other candidate class(es)",
            other.len().saturating_sub(1)
        );
        let residuals = vec![
            Residual::from_value(&u.eval(&z1)?),
            Residual::from_value(&z1.sub(&g_map(params, &z1)?)?),
        ];
        let solution = Solution {
            class: SolutionClass::Ti,
            residues: vec![z1],
            precision,
            residual_valuations: residuals,
        };
        return Ok(report(
            params,
            gates,
            vec![solution],
            ReportStatus::TiCoincident,
            vec![note],
        ));
    }

    // U'(1) = 0 (mod p): the seed is not simple, so the roots = 1 (mod p)
    // must be separated by scanning before Newton applies.
    match search_unit_roots(&u, precision)? {
        UnitRootSearch::NoneCertified { depth } => Ok(report(
            params,
            gates,
            vec![],
            ReportStatus::NoRootInEp,
            vec![format!(
                "U'(1) = 0 (mod {p}) and no residue class r = 1 (mod {p}) satisfies \
                 U(r) = 0 (mod {p}^{depth}); no root of U lies in E_{p}"
            )],
        )),
        UnitRootSearch::Undecided { depth } => Ok(report(
            params,
            gates,
            vec![],
            ReportStatus::NumericalFailure,
            vec![format!(
                "root search undecided at scan depth {depth} and working precision {precision}"
            )],
        )),
        UnitRootSearch::Roots(roots) => {
            let mut padic_roots = Vec::new();
            for (a, t) in &roots {
                padic_roots.push(PadicNumber::from_residue(a.clone(), p, precision - t)?);
            }
            let notes = vec![format!(
                "U'(1) = 0 (mod {p}); refine-search found {} root class(es) in E_{p}",
                padic_roots.len()
            )];
            for z1 in &padic_roots {
                let z2 = g_map(params, z1)?;
                let check_to = z1.abs_precision().min(z2.abs_precision()).max(2) as u32;
                if !z1.congruent(&z2, check_to)? {
                    let mut rep = solved_pair_report(params, gates, &u, z1.clone(), z2, precision)?;
                    rep.notes.extend(notes);
                    return Ok(rep);
                }
            }
            let z1 = padic_roots[0].clone();
            let residuals = vec![
                Residual::from_value(&u.eval(&z1)?),
                Residual::from_value(&z1.sub(&g_map(params, &z1)?)?),
            ];
            let solution = Solution {
                class: SolutionClass::Ti,
                residues: vec![z1],
                precision,
                residual_valuations: residuals,
            };
            let mut all_notes = notes;
            all_notes.push("every root of U in E_p is g-fixed".into());
            Ok(report(
                params,
                gates,
                vec![solution],
                ReportStatus::TiCoincident,
                all_notes,
            ))
        }
    }
}

fn scan_u_roots_mod_p2(u: &PadicPolynomial, p: u64) -> Result<Vec<u64>> {
    let coeffs = residues(u, 2)?;
    let p2 = BigUint::from(p * p);
    let mut hits = Vec::new();
    let mut r = 1u64;
    while r < p * p {
        if eval_residue(&coeffs, &BigUint::from(r), &p2).is_zero() {
            hits.push(r);
        }
        r += p;
    }
    Ok(hits)
}

fn solved_pair_report(
    params: &ModelParams,
    gates: Vec<GateCheck>,
    u: &PadicPolynomial,
    z1: PadicNumber,
    z2: PadicNumber,
    precision: u32,
) -> Result<SolveReport> {
    let p = params.prime();
    for (i, z) in [&z1, &z2].into_iter().enumerate() {
        if !in_ep(z) {
            return Err(Error::Internal(format!(
                "period-2 root z{} escaped E_{p}",
                i + 1
            )));
        }
    }
    // g(g(z1)) = z1 must hold to (nearly) the full shared precision, not
    // just mod p^2: a wrong pairing shows up as a small finite valuation
    let orbit_back = g_map(params, &z2)?.sub(&z1)?;
    let orbit = Residual::from_value(&orbit_back);
    let strict = (z1.abs_precision().min(z2.abs_precision()) - 2).max(2);
    if !orbit.at_least(strict) {
        return Err(Error::Internal("pair is not a 2-cycle of g".into()));
    }
    let residuals = vec![
        Residual::from_value(&u.eval(&z1)?),
        Residual::from_value(&u.eval(&z2)?),
        Residual::from_value(&g_map(params, &z1)?.sub(&z2)?),
        orbit,
    ];
    let solution = Solution {
        class: SolutionClass::Period2,
        residues: vec![z1, z2],
        precision,
        residual_valuations: residuals,
    };
    Ok(report(
        params,
        gates,
        vec![solution],
        ReportStatus::Solved,
        vec![],
    ))
}

/// Dispatch used by the CLI: the closed-form route at (k, p) = (2, 3),
/// otherwise the general route (which itself reports gate failures and the
/// undecided p in {3, 5} band).
pub fn periodic_solve(params: &ModelParams, precision: u32) -> Result<SolveReport> {
    if params.order() == 2 && params.prime() == 3 {
        periodic_solve_k2(params, precision)
    } else {
        periodic_solve_general(params, precision)
    }
}
