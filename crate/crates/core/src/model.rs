//! The hard-core model layer: parameters, existence gates, the solvability
//! tables, and the boundary-law polynomials.
//!
//! Everything is built over E_p = {x : |x|_p = 1, |x - 1|_p <= 1/p}, the
//! multiplicative domain where the p-adic exponential's image lives; weights
//! and boundary values outside it have no meaning for the model.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{exp_min_valuation, exp_p, log_p};
use crate::error::{Error, Result};
use crate::factor::{is_prime_u64, pow_mod, prime_factors};
use crate::padic::{PadicNumber, Valuation};
use crate::poly::PadicPolynomial;

/// True iff |x|_p = 1 and |x - 1|_p <= 1/p (<= 1/4 for p = 2).
pub fn in_ep(x: &PadicNumber) -> bool {
    if x.norm_exponent() != Some(0) {
        return false;
    }
    let one = PadicNumber::one(x.prime(), x.precision().max(1));
    match x.sub(&one) {
        Ok(d) => d.valuation().at_least(exp_min_valuation(x.prime())),
        Err(_) => false,
    }
}

/// Model parameters: prime p, tree order k, coupling J and fugacity
/// lambda = exp_p(J). Constructible from either J or lambda; the other is
/// recovered through the p-adic exp/log pair.
#[derive(Clone, Debug)]
pub struct ModelParams {
    prime: u64,
    order: u32,
    coupling: PadicNumber,
    fugacity: PadicNumber,
}

fn validate_pk(prime: u64, order: u32) -> Result<()> {
    if !is_prime_u64(prime) {
        return Err(Error::NotPrime(prime));
    }
    if order < 1 {
        return Err(Error::InvalidOrder);
    }
    Ok(())
}

impl ModelParams {
    pub fn from_coupling(prime: u64, order: u32, coupling: PadicNumber) -> Result<Self> {
        validate_pk(prime, order)?;
        if coupling.prime() != prime {
            return Err(Error::PrimeMismatch {
                left: prime,
                right: coupling.prime(),
            });
        }
        let min_v = exp_min_valuation(prime);
        let ok = match coupling.valuation() {
            Valuation::Infinite => coupling.abs_precision() >= min_v,
            Valuation::Finite(v) => v >= min_v,
        };
        if !ok {
            return Err(Error::CouplingOutsideDomain);
        }
        let fugacity = exp_p(&coupling)?;
        Ok(ModelParams {
            prime,
            order,
            coupling,
            fugacity,
        })
    }

    pub fn from_fugacity(prime: u64, order: u32, fugacity: PadicNumber) -> Result<Self> {
        validate_pk(prime, order)?;
        if fugacity.prime() != prime {
            return Err(Error::PrimeMismatch {
                left: prime,
                right: fugacity.prime(),
            });
        }
        if !in_ep(&fugacity) {
            return Err(Error::NotInEp);
        }
        let coupling = log_p(&fugacity)?;
        Ok(ModelParams {
            prime,
            order,
            coupling,
            fugacity,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Tree order k: every vertex of the k-branch has k direct successors.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coupling(&self) -> &PadicNumber {
        &self.coupling
    }

    pub fn fugacity(&self) -> &PadicNumber {
        &self.fugacity
    }

    /// Unit digits carried by the fugacity.
    pub fn precision(&self) -> u32 {
        self.fugacity.precision()
    }
}

/// Generalized boundary condition z: constant, level-parity alternating, or
/// explicit per-level values. Construction checks E_p membership.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryField {
    Constant {
        z: PadicNumber,
    },
    Alternating {
        z_even: PadicNumber,
        z_odd: PadicNumber,
    },
    Explicit {
        levels: Vec<PadicNumber>,
    },
}

impl BoundaryField {
    pub fn constant(z: PadicNumber) -> Result<Self> {
        if !in_ep(&z) {
            return Err(Error::BoundaryNotInEp { index: 0 });
        }
        Ok(BoundaryField::Constant { z })
    }

    /// `z_even` at even distance from the root, `z_odd` at odd distance.
    pub fn alternating(z_even: PadicNumber, z_odd: PadicNumber) -> Result<Self> {
        for (index, z) in [&z_even, &z_odd].into_iter().enumerate() {
            if !in_ep(z) {
                return Err(Error::BoundaryNotInEp { index });
            }
        }
        Ok(BoundaryField::Alternating { z_even, z_odd })
    }

    pub fn explicit(levels: Vec<PadicNumber>) -> Result<Self> {
        for (index, z) in levels.iter().enumerate() {
            if !in_ep(z) {
                return Err(Error::BoundaryNotInEp { index });
            }
        }
        Ok(BoundaryField::Explicit { levels })
    }

    pub fn value_at_level(&self, level: u32) -> Result<&PadicNumber> {
        match self {
            BoundaryField::Constant { z } => Ok(z),
            BoundaryField::Alternating { z_even, z_odd } => Ok(if level.is_multiple_of(2) {
                z_even
            } else {
                z_odd
            }),
            BoundaryField::Explicit { levels } => levels
                .get(level as usize)
                .ok_or(Error::BoundaryLevelMissing { level }),
        }
    }
}

/// True iff p divides 2^k - 1 (p = 2 never qualifies: 2^k - 1 is odd).
pub fn existence_gate(p: u64, k: u32) -> Result<bool> {
    validate_pk(p, k)?;
    Ok(pow_mod(2, k as u64, p) == 1 % p)
}

/// True iff p divides both 2^k - 1 and k - 2, with the convention that every
/// p divides 0 (covering k = 2).
pub fn periodic_gate(p: u64, k: u32) -> Result<bool> {
    Ok(existence_gate(p, k)? && (k as i64 - 2).rem_euclid(p as i64) == 0)
}

fn mersenne_prime_divisors(k: u32) -> Result<Vec<u64>> {
    if k > 64 {
        return Err(Error::OrderTooLargeForTable(k));
    }
    let n = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    Ok(prime_factors(n))
}

/// For each k <= k_max, the sorted primes p <= p_max with p | 2^k - 1.
///
/// Exact by construction: 2^k - 1 is fully factored (trial division, then
/// Pollard rho with deterministic Miller-Rabin certification).
pub fn existence_table(k_max: u32, p_max: u64) -> Result<BTreeMap<u32, Vec<u64>>> {
    if k_max < 1 {
        return Err(Error::InvalidOrder);
    }
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let primes = mersenne_prime_divisors(k)?
                .into_iter()
                .filter(|&p| p <= p_max)
                .collect();
            Ok((k, primes))
        })
        .collect()
}

/// As [`existence_table`] but with the period-2 gate.
pub fn periodic_table(k_max: u32, p_max: u64) -> Result<BTreeMap<u32, Vec<u64>>> {
    if k_max < 1 {
        return Err(Error::InvalidOrder);
    }
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let primes = mersenne_prime_divisors(k)?
                .into_iter()
                .filter(|&p| p <= p_max && (k as i64 - 2).rem_euclid(p as i64) == 0)
                .collect();
            Ok((k, primes))
        })
        .collect()
}

fn monomial(prime: u64, degree: usize, precision: u32) -> Result<PadicPolynomial> {
    let mut coeffs = vec![PadicNumber::zero(prime, precision); degree];
    coeffs.push(PadicNumber::one(prime, precision));
    PadicPolynomial::new(prime, coeffs)
}

fn lambda_plus_z(params: &ModelParams) -> Result<PadicPolynomial> {
    PadicPolynomial::new(
        params.prime,
        vec![
            params.fugacity.clone(),
            PadicNumber::one(params.prime, params.precision()),
        ],
    )
}

/// F(z) = z^(k+1) - (lambda + z)^k, the constant boundary-law polynomial.
pub fn ti_polynomial(params: &ModelParams) -> Result<PadicPolynomial> {
    let k = params.order;
    let n = params.precision();
    let expanded = lambda_plus_z(params)?.pow(k)?;
    monomial(params.prime, k as usize + 1, n)?.sub(&expanded)
}

/// M(z) = (lambda + z)^k - z^(k+1); its roots are the fixed points of g.
pub fn m_polynomial(params: &ModelParams) -> Result<PadicPolynomial> {
    Ok(ti_polynomial(params)?.neg())
}

/// L(z) = (lambda z^k + (lambda + z)^k)^k - z (lambda + z)^(k^2), the
/// numerator of g(g(z)) - z.
pub fn l_polynomial(params: &ModelParams) -> Result<PadicPolynomial> {
    let k = params.order;
    let n = params.precision();
    let lz = lambda_plus_z(params)?;
    let inner = lz
        .pow(k)?
        .add(&monomial(params.prime, k as usize, n)?.scale(&params.fugacity)?)?;
    let first = inner.pow(k)?;
    let second = lz.pow(k * k)?.shift(1, n);
    first.sub(&second)
}

/// U(z) = L(z) / M(z) via the closed-form expansion.
pub fn u_polynomial_closed_form(params: &ModelParams) -> Result<PadicPolynomial> {
    let p = params.prime;
    let k = params.order;
    let n = params.precision();
    let lz = lambda_plus_z(params)?;
    let m = m_polynomial(params)?;

    // (1 - k) z^(k^2)
    let one_minus_k = PadicNumber::from_integer(1i64 - k as i64, p, n)?;
    let mut u = monomial(p, (k * k) as usize, n)?.scale(&one_minus_k)?;

    // k ((lambda + z) z^k)^(k-1)
    let k_num = PadicNumber::from_integer(k as i64, p, n)?;
    u = u.add(&lz.shift(k as usize, n).pow(k - 1)?.scale(&k_num)?)?;

    // sum over i = 2..=k of C(k, i) M^(i-1) z^(k(k-i)) ((lambda+z)^(k-i) - z^(k-i+1))
    let mut m_power = m.clone();
    for i in 2..=k {
        let binom = PadicNumber::from_integer(binomial(k, i), p, n)?;
        let tail = lz.pow(k - i)?.sub(&monomial(p, (k - i + 1) as usize, n)?)?;
        let term = m_power
            .mul(&tail)?
            .shift((k * (k - i)) as usize, n)
            .scale(&binom)?;
        u = u.add(&term)?;
        if i < k {
            m_power = m_power.mul(&m)?;
        }
    }
    Ok(u)
}

fn binomial(n: u32, k: u32) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k.min(n - k) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// U built both ways, closed form and exact division L / M, asserted
/// coefficientwise congruent before being returned.
pub fn u_polynomial(params: &ModelParams) -> Result<PadicPolynomial> {
    let closed = u_polynomial_closed_form(params)?;
    let divided = l_polynomial(params)?.divide_exact(&m_polynomial(params)?)?;
    let m = params.precision();
    let n = closed.coeffs().len().max(divided.coeffs().len());
    let zero = PadicNumber::zero(params.prime, m);
    for index in 0..n {
        let a = closed.coeff(index).unwrap_or(&zero);
        let b = divided.coeff(index).unwrap_or(&zero);
        if !a.congruent(b, m)? {
            return Err(Error::CofactorMismatch { index });
        }
    }
    Ok(closed)
}

/// The one-level boundary map g(z) = ((z + lambda) / z)^k.
pub fn g_map(params: &ModelParams, z: &PadicNumber) -> Result<PadicNumber> {
    let ratio = z.add(&params.fugacity)?.div(z)?;
    Ok(ratio.pow(params.order as u64))
}

/// Valuation of a verified quantity, together with the absolute precision to
/// which it was checked. `valuation = inf` means indistinguishable from zero
/// at that precision.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Residual {
    pub valuation: Valuation,
    pub checked_to: i64,
}

impl Residual {
    pub fn from_value(x: &PadicNumber) -> Self {
        Residual {
            valuation: x.valuation(),
            checked_to: x.abs_precision(),
        }
    }

    /// True when the residual's valuation is certified to be >= m.
    pub fn at_least(&self, m: i64) -> bool {
        match self.valuation {
            Valuation::Infinite => self.checked_to >= m,
            Valuation::Finite(v) => v >= m,
        }
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.valuation.is_infinite()
    }

    pub fn min(self, other: Residual) -> Residual {
        let checked_to = self.checked_to.min(other.checked_to);
        let valuation = self.valuation.min(other.valuation);
        Residual {
            valuation,
            checked_to,
        }
    }
}

impl std::fmt::Display for Residual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.valuation {
            Valuation::Infinite => write!(f, ">= {} (zero at checked precision)", self.checked_to),
            Valuation::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Valuation of z - g(z') across one level of the tree recursion: for a
/// constant boundary z' = z; for an alternating boundary the crossed pair is
/// checked and the worse (minimum) valuation reported.
pub fn functional_equation_residual(
    boundary: &BoundaryField,
    params: &ModelParams,
) -> Result<Residual> {
    match boundary {
        BoundaryField::Constant { z } => {
            let r = z.sub(&g_map(params, z)?)?;
            Ok(Residual::from_value(&r))
        }
        BoundaryField::Alternating { z_even, z_odd } => {
            let r_even = z_even.sub(&g_map(params, z_odd)?)?;
            let r_odd = z_odd.sub(&g_map(params, z_even)?)?;
            Ok(Residual::from_value(&r_even).min(Residual::from_value(&r_odd)))
        }
        BoundaryField::Explicit { .. } => Err(Error::UnsupportedBoundary(
            "explicit boundaries have no single functional-equation residual",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_3_2_13() -> ModelParams {
        let lam = PadicNumber::from_integer(13, 3, 24).unwrap();
        ModelParams::from_fugacity(3, 2, lam).unwrap()
    }

    #[test]
    fn ep_membership() {
        let x = PadicNumber::from_integer(13, 3, 8).unwrap();
        assert!(in_ep(&x)); // |13|_3 = 1, |12|_3 = 1/3
        assert!(in_ep(&PadicNumber::one(3, 8)));
        assert!(!in_ep(&PadicNumber::from_integer(3, 3, 8).unwrap()));
        assert!(!in_ep(&PadicNumber::from_integer(2, 3, 8).unwrap()));
    }

    #[test]
    fn ep_closed_under_products() {
        // closure under products, deterministic sample
        for (a, b) in [(13i64, 4), (7, 10), (13, 13)] {
            let x = PadicNumber::from_integer(a, 3, 10).unwrap();
            let y = PadicNumber::from_integer(b, 3, 10).unwrap();
            if in_ep(&x) && in_ep(&y) {
                assert!(in_ep(&x.mul(&y).unwrap()));
            }
        }
    }

    #[test]
    fn existence_gate_rows() {
        assert!(existence_gate(3, 2).unwrap());
        assert!(existence_gate(7, 3).unwrap());
        for k in 1..=12 {
            assert!(!existence_gate(2, k).unwrap());
        }
        assert!(!existence_gate(5, 2).unwrap());
    }

    #[test]
    fn gate_rejects_non_prime() {
        assert!(matches!(existence_gate(9, 2), Err(Error::NotPrime(9))));
    }

    #[test]
    fn existence_table_matches_published_rows() {
        let t = existence_table(10, 200).unwrap();
        assert_eq!(t[&1], Vec::<u64>::new());
        assert_eq!(t[&4], vec![3, 5]);
        assert_eq!(t[&10], vec![3, 11, 31]);
        assert_eq!(t[&7], vec![127]);
    }

    #[test]
    fn periodic_gate_rows() {
        assert!(periodic_gate(3, 8).unwrap()); // 3 | 255 and 3 | 6
        assert!(periodic_gate(7, 9).unwrap()); // 7 | 511 and 7 | 7
        assert!(!periodic_gate(31, 5).unwrap()); // 31 | 31 but 31 does not divide 3
        assert!(periodic_gate(3, 2).unwrap()); // k - 2 = 0, every p divides 0
    }

    #[test]
    fn periodic_table_matches_published_rows() {
        let t = periodic_table(10, 200).unwrap();
        for k in 1..=10u32 {
            let expect: Vec<u64> = match k {
                2 | 8 => vec![3],
                9 => vec![7],
                _ => vec![],
            };
            assert_eq!(t[&k], expect, "k = {k}");
        }
    }

    #[test]
    fn periodic_gate_implies_existence_gate() {
        for k in 1..=20 {
            for p in [3u64, 5, 7, 11, 13, 17, 31, 73, 127] {
                if periodic_gate(p, k).unwrap() {
                    assert!(existence_gate(p, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn ti_polynomial_k2_expansion() {
        // F(z) = z^3 - z^2 - 2 lambda z - lambda^2
        let params = params_3_2_13();
        let f = ti_polynomial(&params).unwrap();
        assert_eq!(f.degree(), Some(3));
        let expected = PadicPolynomial::from_integers(3, &[-169, -26, -1, 1], 24).unwrap();
        assert!(f.congruent(&expected, 20).unwrap());
    }

    #[test]
    fn ti_polynomial_root_seed_when_gate_holds() {
        // F(1) = 0 (mod p) whenever p | 2^k - 1
        for (p, k) in [(3u64, 2u32), (7, 3), (5, 4), (31, 5)] {
            let lam = PadicNumber::from_integer(1 + p as i64, p, 16).unwrap();
            let params = ModelParams::from_fugacity(p, k, lam).unwrap();
            let f = ti_polynomial(&params).unwrap();
            let one = PadicNumber::one(p, 16);
            let v = f.eval(&one).unwrap();
            assert!(v.valuation().at_least(1), "p={p} k={k}");
        }
    }

    #[test]
    fn u_polynomial_dual_construction_k2() {
        // U(z) = z^2 - (lambda^2 - 2 lambda) z + lambda^2 for k = 2
        let params = params_3_2_13();
        let u = u_polynomial(&params).unwrap();
        assert_eq!(u.degree(), Some(2));
        let expected = PadicPolynomial::from_integers(3, &[169, -(169 - 26), 1], 24).unwrap();
        assert!(u.congruent(&expected, 20).unwrap());
    }

    #[test]
    fn u_polynomial_degree_bookkeeping() {
        for (p, k) in [(3u64, 2u32), (7, 3), (5, 4)] {
            let lam = PadicNumber::from_integer(1 + p as i64, p, 12).unwrap();
            let params = ModelParams::from_fugacity(p, k, lam).unwrap();
            let u = u_polynomial(&params).unwrap();
            assert_eq!(u.degree(), Some((k * k - k) as usize), "p={p} k={k}");
            let l = l_polynomial(&params).unwrap();
            let m = m_polynomial(&params).unwrap();
            assert_eq!(l.degree().unwrap(), (k * k + 1) as usize, "deg L, k={k}");
            assert_eq!(m.degree().unwrap(), (k + 1) as usize, "deg M, k={k}");
        }
    }

    #[test]
    fn u_root_seed_when_periodic_gate_holds() {
        // U(1) = 0 (mod p) under the periodic gate
        let lam = PadicNumber::from_integer(8, 7, 16).unwrap();
        let params = ModelParams::from_fugacity(7, 9, lam).unwrap();
        let u = u_polynomial_closed_form(&params).unwrap();
        let one = PadicNumber::one(7, 16);
        assert!(u.eval(&one).unwrap().valuation().at_least(1));
    }

    #[test]
    fn params_from_coupling_and_back() {
        let j = PadicNumber::from_integer(3, 3, 16).unwrap();
        let params = ModelParams::from_coupling(3, 2, j.clone()).unwrap();
        assert!(in_ep(params.fugacity()));
        let back = log_p(params.fugacity()).unwrap();
        assert!(back.congruent(&j, 12).unwrap());
    }

    #[test]
    fn params_reject_bad_inputs() {
        let j_bad = PadicNumber::from_integer(1, 3, 8).unwrap();
        assert!(matches!(
            ModelParams::from_coupling(3, 2, j_bad),
            Err(Error::CouplingOutsideDomain)
        ));
        let lam_bad = PadicNumber::from_integer(2, 3, 8).unwrap();
        assert!(matches!(
            ModelParams::from_fugacity(3, 2, lam_bad),
            Err(Error::NotInEp)
        ));
        let lam = PadicNumber::from_integer(13, 3, 8).unwrap();
        assert!(matches!(
            ModelParams::from_fugacity(4, 2, lam),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn boundary_validation_and_levels() {
        let z = PadicNumber::from_integer(13, 3, 8).unwrap();
        let b = BoundaryField::constant(z.clone()).unwrap();
        assert!(b.value_at_level(5).unwrap().congruent(&z, 8).unwrap());

        let alt = BoundaryField::alternating(
            PadicNumber::from_integer(19, 3, 8).unwrap(),
            PadicNumber::from_integer(16, 3, 8).unwrap(),
        )
        .unwrap();
        assert!(alt
            .value_at_level(2)
            .unwrap()
            .congruent_integer(19, 3)
            .unwrap());
        assert!(alt
            .value_at_level(3)
            .unwrap()
            .congruent_integer(16, 3)
            .unwrap());

        let bad = PadicNumber::from_integer(3, 3, 8).unwrap();
        assert!(matches!(
            BoundaryField::constant(bad),
            Err(Error::BoundaryNotInEp { .. })
        ));
    }

    #[test]
    fn residual_of_exact_fixed_point() {
        // z = 8 solves z = ((8 + z)/z)^3 at p = 7 exactly
        let lam = PadicNumber::from_integer(8, 7, 16).unwrap();
        let params = ModelParams::from_fugacity(7, 3, lam).unwrap();
        let z = PadicNumber::from_integer(8, 7, 16).unwrap();
        let b = BoundaryField::constant(z).unwrap();
        let r = functional_equation_residual(&b, &params).unwrap();
        assert!(r.is_zero_at_precision());
        assert!(r.checked_to >= 14);
    }

    #[test]
    fn residual_of_alternating_pair_mod_27() {
        // (19, 16) solve the crossed system mod 27 at lambda = 13; with the
        // exact integers the residual valuation is exactly 3
        let params = params_3_2_13();
        let b = BoundaryField::alternating(
            PadicNumber::from_integer(19, 3, 24).unwrap(),
            PadicNumber::from_integer(16, 3, 24).unwrap(),
        )
        .unwrap();
        let r = functional_equation_residual(&b, &params).unwrap();
        assert_eq!(r.valuation, Valuation::Finite(3));
    }

    #[test]
    fn residual_of_non_root_is_finite() {
        let params = params_3_2_13();
        let b = BoundaryField::constant(PadicNumber::one(3, 24)).unwrap();
        let r = functional_equation_residual(&b, &params).unwrap();
        // 1 - g(1) = 1 - 196 = -195 = -3 * 65
        assert_eq!(r.valuation, Valuation::Finite(1));
    }
}
