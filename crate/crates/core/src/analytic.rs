//! p-adic elementary functions on their convergence balls, square roots, and
//! Hensel lifting.
//!
//! Series are truncated once every remaining term's valuation provably clears
//! the target absolute precision; for exp the factorial valuation is bounded
//! through Legendre's formula, which makes the truncation point computable
//! up front.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factor::{legendre, sqrt_mod_prime};
use crate::padic::{PadicNumber, Valuation};
use crate::poly::PadicPolynomial;

/// Smallest valuation admitted by the exp ball: |x|_p <= 1/p, or <= 1/4 when
/// p = 2 (the discrete-norm form of the radius p^(-1/(p-1))).
pub fn exp_min_valuation(prime: u64) -> i64 {
    if prime == 2 {
        2
    } else {
        1
    }
}

/// exp_p(x) = sum x^n / n! for |x|_p inside the convergence ball.
pub fn exp_p(x: &PadicNumber) -> Result<PadicNumber> {
    let p = x.prime();
    let min_v = exp_min_valuation(p);
    let gamma = match x.valuation() {
        Valuation::Infinite => {
            let known = x.abs_precision();
            if known < min_v {
                return Err(Error::ExpDomain { valuation: known });
            }
            // exp(0 + O(p^A)) = 1 + O(p^A)
            return Ok(PadicNumber::one(p, known.min(u32::MAX as i64) as u32).truncate_abs(known));
        }
        Valuation::Finite(v) => {
            if v < min_v {
                return Err(Error::ExpDomain { valuation: v });
            }
            v
        }
    };
    let target = gamma + x.precision() as i64;
    let work = (target + 8).min(u32::MAX as i64) as u32;

    // all terms with n >= last_term have valuation >= target, via
    // v_p(n!) <= (n - 1)/(p - 1)
    let last_term = if p == 2 {
        (target - 1).div_euclid(gamma - 1).max(1) + 1
    } else {
        (target * (p as i64 - 1)).div_euclid(gamma * (p as i64 - 1) - 1) + 1
    };

    let mut sum = PadicNumber::one(p, work);
    let mut term = PadicNumber::one(p, work);
    for n in 1..=last_term {
        let denom = PadicNumber::from_integer(n, p, work)?;
        term = term.mul(x)?.div(&denom)?;
        sum = sum.add(&term)?;
    }
    Ok(sum.truncate_abs(target))
}

/// log_p(x) = sum (-1)^(n+1) (x-1)^n / n for |x - 1|_p < 1.
pub fn log_p(x: &PadicNumber) -> Result<PadicNumber> {
    let p = x.prime();
    match x.valuation() {
        Valuation::Finite(0) => {}
        Valuation::Finite(v) => {
            return Err(Error::LogDomain {
                valuation: v.min(0),
            })
        }
        Valuation::Infinite => {
            return Err(Error::LogDomain {
                valuation: x.abs_precision().min(0),
            })
        }
    }
    let one = PadicNumber::one(p, x.precision().max(1));
    let t = x.sub(&one)?;
    let gamma = match t.valuation() {
        Valuation::Infinite => {
            // log(1 + O(p^A)) = 0 + O(p^A)
            let known = t.abs_precision();
            return Ok(PadicNumber::zero(p, known.min(u32::MAX as i64) as u32));
        }
        Valuation::Finite(v) => {
            if v < 1 {
                return Err(Error::LogDomain { valuation: v });
            }
            v
        }
    };
    let target = gamma + t.precision() as i64;
    let work = (target + 8).min(u32::MAX as i64) as u32;
    // v_p(n) <= log2(n) < 64 for any n we could reach
    let last_term = (target + 64).div_euclid(gamma).max(1) + 1;

    let mut sum = PadicNumber::zero(p, work);
    let mut power = PadicNumber::one(p, work);
    for n in 1..=last_term {
        power = power.mul(&t)?;
        let denom = PadicNumber::from_integer(n, p, work)?;
        let term = power.div(&denom)?;
        sum = if n % 2 == 1 {
            sum.add(&term)?
        } else {
            sum.sub(&term)?
        };
    }
    Ok(sum.truncate_abs(target))
}

/// Both square roots of `a`, the first being the one with the numerically
/// smaller leading residue (a stable convention for the quadratic formula).
///
/// Existence requires an even valuation together with the digit condition:
/// leading digit a quadratic residue mod p for odd p, or unit = 1 (mod 8)
/// for p = 2. Each failure is reported distinctly.
pub fn sqrt_p(a: &PadicNumber) -> Result<(PadicNumber, PadicNumber)> {
    let p = a.prime();
    let gamma = match a.valuation() {
        Valuation::Infinite => return Err(Error::SqrtOfZero),
        Valuation::Finite(v) => v,
    };
    if gamma % 2 != 0 {
        return Err(Error::SqrtOddValuation(gamma));
    }
    let unit = a.unit().expect("non-zero at precision");
    let precision = a.precision();
    let half_val = gamma.div_euclid(2);

    if p == 2 {
        if precision < 3 {
            return Err(Error::PrecisionTooLow {
                modulus: 3,
                available: precision as i64,
            });
        }
        let u_mod_8 = (unit % BigUint::from(8u32)).to_u64_digits();
        let u_mod_8 = u_mod_8.first().copied().unwrap_or(0);
        if u_mod_8 != 1 {
            return Err(Error::SqrtTwoAdicDigits {
                unit_mod_8: u_mod_8,
            });
        }
        // digit-by-digit lift: a root mod 2^m extends to 2^(m+1) by optionally
        // adding 2^(m-1); the unit root is determined mod 2^(precision-1)
        let result_precision = precision - 1;
        let modulus = BigUint::from(2u32).pow(precision);
        let mut r = BigUint::one();
        for m in 3..precision {
            let step = BigUint::from(2u32).pow(m + 1);
            if (&r * &r) % &step != unit % &step {
                r += BigUint::from(2u32).pow(m - 1);
            }
        }
        r %= BigUint::from(2u32).pow(result_precision);
        debug_assert!((&r * &r) % (&modulus / 2u32) == unit % (&modulus / 2u32));
        let root = PadicNumber::from_residue(r, p, result_precision)?;
        let root = scale_by_prime_power(&root, half_val);
        let neg = root.neg();
        let r1_lead = root.unit().expect("unit") % BigUint::from(4u32);
        if r1_lead == BigUint::one() {
            Ok((root, neg))
        } else {
            Ok((neg, root))
        }
    } else {
        let lead = (unit % BigUint::from(p)).to_u64_digits();
        let lead = lead.first().copied().unwrap_or(0);
        if legendre(lead, p) != 1 {
            return Err(Error::SqrtNonResidue {
                digit: lead,
                prime: p,
            });
        }
        let r0 = sqrt_mod_prime(lead, p).expect("residue certified");
        // Newton on w^2 - u from the mod-p root; 2w is a unit so each step
        // doubles the number of correct digits
        let modulus = BigUint::from(p).pow(precision);
        let mut w = BigUint::from(r0);
        let inv2 = invert_unit(&BigUint::from(2u32), p, precision)?;
        let mut correct = 1u32;
        while correct < precision {
            let u_red = unit % &modulus;
            let inv_w = invert_unit(&w, p, precision)?;
            w = (&w + u_red * inv_w) % &modulus * &inv2 % &modulus;
            correct = correct.saturating_mul(2);
        }
        debug_assert!((&w * &w) % &modulus == unit % &modulus);
        let root = PadicNumber::from_residue(w.clone(), p, precision)?;
        let root = scale_by_prime_power(&root, half_val);
        let neg = root.neg();
        let lead_pos = (&w % BigUint::from(p)).to_u64_digits()[0];
        if lead_pos <= p - lead_pos {
            Ok((root, neg))
        } else {
            Ok((neg, root))
        }
    }
}

fn scale_by_prime_power(x: &PadicNumber, exponent: i64) -> PadicNumber {
    if exponent == 0 {
        return x.clone();
    }
    let p = x.prime();
    let shift = if exponent > 0 {
        PadicNumber::from_integer(
            BigUint::from(p).pow(exponent as u32),
            p,
            x.precision().max(1),
        )
    } else {
        PadicNumber::from_rational(
            1,
            num_bigint::BigInt::from(BigUint::from(p).pow((-exponent) as u32)),
            p,
            x.precision().max(1),
        )
    }
    .expect("prime power is a valid rational");
    x.mul(&shift).expect("same prime")
}

fn invert_unit(u: &BigUint, p: u64, precision: u32) -> Result<BigUint> {
    let one = PadicNumber::one(p, precision);
    let x = PadicNumber::from_residue(u.clone(), p, precision)?;
    let inv = one.div(&x)?;
    inv.residue(precision)
}

/// Evaluate integer residues of the coefficients mod p^precision.
pub(crate) fn residues(f: &PadicPolynomial, precision: u32) -> Result<Vec<BigUint>> {
    f.coeffs()
        .iter()
        .map(|c| {
            if (precision as i64) > c.abs_precision() {
                Err(Error::PrecisionTooLow {
                    modulus: precision as i64,
                    available: c.abs_precision(),
                })
            } else {
                c.residue(precision)
            }
        })
        .collect()
}

pub(crate) fn eval_residue(coeffs: &[BigUint], x: &BigUint, modulus: &BigUint) -> BigUint {
    let mut acc = BigUint::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c) % modulus;
    }
    acc
}

pub(crate) fn valuation_of(residue: &BigUint, p: u64, cap: u32) -> u32 {
    if residue.is_zero() {
        return cap;
    }
    let p_big = BigUint::from(p);
    let mut v = 0;
    let mut cur = residue.clone();
    while v < cap {
        let (q, r) = num_integer::Integer::div_rem(&cur, &p_big);
        if !r.is_zero() {
            break;
        }
        v += 1;
        cur = q;
    }
    v
}

/// Lift the simple root `a0` of F mod p to a root of F mod p^precision by
/// Newton iteration (each step doubles the number of settled digits).
///
/// Requires F(a0) = 0 (mod p) and F'(a0) != 0 (mod p); under that hypothesis
/// |F'(a)|_p stays 1 along the whole iteration, which is asserted.
pub fn hensel_lift(f: &PadicPolynomial, a0: u64, precision: u32) -> Result<PadicNumber> {
    let p = f.prime();
    let precision = precision.max(1);
    let coeffs = residues(f, precision)?;
    let deriv: Vec<BigUint> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigUint::from(i))
        .collect();
    let modulus = BigUint::from(p).pow(precision);
    let p_big = BigUint::from(p);

    let f_a0 = eval_residue(&coeffs, &BigUint::from(a0 % p), &p_big);
    if !f_a0.is_zero() {
        return Err(Error::HenselNotRoot {
            a0,
            prime: p,
            value: f_a0.to_u64_digits().first().copied().unwrap_or(0),
        });
    }
    let fp_a0 = eval_residue(&deriv, &BigUint::from(a0 % p), &p_big);
    if fp_a0.is_zero() {
        return Err(Error::HenselSingularDerivative { a0, prime: p });
    }

    let mut a = BigUint::from(a0 % p);
    let mut last_val = 0u32;
    for _ in 0..(64 + 2 * precision.ilog2().max(1)) {
        let fa = eval_residue(&coeffs, &a, &modulus);
        let val = valuation_of(&fa, p, precision);
        if val >= precision {
            return PadicNumber::from_residue(a, p, precision);
        }
        if val <= last_val && last_val > 0 {
            return Err(Error::Internal(
                "Newton iteration stalled; simple-root hypothesis violated".into(),
            ));
        }
        last_val = val;
        let fpa = eval_residue(&deriv, &a, &modulus);
        if (&fpa % &p_big).is_zero() {
            return Err(Error::Internal(
                "derivative lost unit norm during Hensel lift".into(),
            ));
        }
        let inv = invert_unit(&fpa, p, precision)?;
        let step = fa * inv % &modulus;
        a = (&a + &modulus - step) % &modulus;
    }
    Err(Error::Internal("Hensel lift failed to converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn padic(v: i64, p: u64, n: u32) -> PadicNumber {
        PadicNumber::from_integer(v, p, n).unwrap()
    }

    #[test]
    fn exp_at_zero_is_one() {
        let z = PadicNumber::zero(3, 6);
        let e = exp_p(&z).unwrap();
        assert!(e.congruent_integer(1, 6).unwrap());
    }

    #[test]
    fn exp_norm_identities_at_small_argument() {
        // |exp_3(3) - 1|_3 = |3|_3 = 1/3
        let x = padic(3, 3, 8);
        let e = exp_p(&x).unwrap();
        assert_eq!(e.norm_exponent(), Some(0));
        let one = PadicNumber::one(3, 9);
        let diff = e.sub(&one).unwrap();
        assert_eq!(diff.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn exp_matches_independent_series_evaluation() {
        // frozen from an exact independent evaluation of sum 3^n/n! mod 3^12
        let x = padic(3, 3, 12);
        let e = exp_p(&x).unwrap();
        assert!(e.congruent_integer(204_349, 12).unwrap());
        assert_eq!(
            e.digits(12).unwrap(),
            vec![1, 1, 1, 2, 2, 0, 1, 0, 1, 1, 0, 1]
        );
    }

    #[test]
    fn exp_outside_ball_rejected() {
        let x = padic(1, 3, 6);
        assert!(matches!(exp_p(&x), Err(Error::ExpDomain { .. })));
        let y = padic(2, 2, 6);
        assert!(matches!(exp_p(&y), Err(Error::ExpDomain { .. })));
    }

    #[test]
    fn two_adic_exp_log_on_the_quarter_ball() {
        // |4|_2 = 1/4 is admissible; |exp_2(4) - 1|_2 = 1/4 and the round
        // trips close at matched truncation
        let x = padic(4, 2, 16);
        let e = exp_p(&x).unwrap();
        assert_eq!(e.norm_exponent(), Some(0));
        let one = PadicNumber::one(2, 18);
        assert_eq!(e.sub(&one).unwrap().valuation(), Valuation::Finite(2));
        let back = log_p(&e).unwrap();
        assert!(back.congruent(&x, 14).unwrap());
        let l = log_p(&padic(5, 2, 16)).unwrap(); // |5 - 1|_2 = 1/4
        assert_eq!(l.valuation(), Valuation::Finite(2));
        let back = exp_p(&l).unwrap();
        assert!(back.congruent_integer(5, 14).unwrap());
    }

    #[test]
    fn log_at_one_is_zero() {
        let one = PadicNumber::one(3, 7);
        let l = log_p(&one).unwrap();
        assert!(l.is_zero_at_precision());
        assert!(l.abs_precision() >= 7);
    }

    #[test]
    fn log_of_thirteen_has_norm_one_third() {
        // |13 - 1|_3 = 1/3 so |log_3(13)|_3 = 1/3
        let x = padic(13, 3, 10);
        let l = log_p(&x).unwrap();
        assert_eq!(l.valuation(), Valuation::Finite(1));
        // frozen from an independent exact evaluation mod 3^12
        let l12 = log_p(&padic(13, 3, 12)).unwrap();
        assert!(l12.congruent_integer(106_869, 11).unwrap());
    }

    #[test]
    fn log_outside_ball_rejected() {
        let x = padic(2, 5, 6); // |2 - 1|_5 = 1
        assert!(matches!(log_p(&x), Err(Error::LogDomain { .. })));
        let y = padic(5, 5, 6); // |y|_5 != 1
        assert!(matches!(log_p(&y), Err(Error::LogDomain { .. })));
    }

    #[test]
    fn exp_log_round_trip_at_matched_truncation() {
        // log(exp(3)) = 3 to 6 digits
        let x = padic(3, 3, 6);
        let e = exp_p(&x).unwrap();
        let back = log_p(&e).unwrap();
        assert!(back.congruent(&x, 6).unwrap());
    }

    #[test]
    fn sqrt_117_exhaustive_cross_check() {
        // independent oracle: r in [0, 27) with r^2 = 117 (mod 81)
        let expected: Vec<u64> = (0..27u64).filter(|r| (r * r) % 81 == 117 % 81).collect();
        assert_eq!(expected, vec![6, 21]);
        let a = padic(117, 3, 8);
        let (r1, r2) = sqrt_p(&a).unwrap();
        // first root: smaller leading residue of the unit part
        assert!(r1.congruent_integer(21, 3).unwrap());
        assert!(r2.congruent_integer(6, 3).unwrap());
        for r in [&r1, &r2] {
            let sq = r.mul(r).unwrap();
            assert!(sq.congruent(&a, 8).unwrap());
        }
    }

    #[test]
    fn sqrt_odd_valuation_rejected() {
        let a = padic(3, 3, 6);
        assert!(matches!(sqrt_p(&a), Err(Error::SqrtOddValuation(1))));
    }

    #[test]
    fn sqrt_non_residue_rejected() {
        let a = padic(2, 3, 6); // 2 is not a QR mod 3
        assert!(matches!(sqrt_p(&a), Err(Error::SqrtNonResidue { .. })));
    }

    #[test]
    fn sqrt_of_one_is_plus_minus_one() {
        let one = PadicNumber::one(7, 6);
        let (r1, r2) = sqrt_p(&one).unwrap();
        assert!(r1.congruent_integer(1, 6).unwrap());
        assert!(r2.congruent_integer(-1, 6).unwrap());
    }

    #[test]
    fn sqrt_two_adic_cases() {
        // 17 = 1 (mod 8): root exists
        let a = padic(17, 2, 10);
        let (r1, _) = sqrt_p(&a).unwrap();
        let sq = r1.mul(&r1).unwrap();
        assert!(sq.congruent(&a, 9).unwrap());
        // 3 has a_1 = 1 and 5 has a_2 = 1: both rejected
        assert!(matches!(
            sqrt_p(&padic(3, 2, 10)),
            Err(Error::SqrtTwoAdicDigits { unit_mod_8: 3 })
        ));
        assert!(matches!(
            sqrt_p(&padic(5, 2, 10)),
            Err(Error::SqrtTwoAdicDigits { unit_mod_8: 5 })
        ));
    }

    #[test]
    fn hensel_z2_minus_13_from_exhaustive_seed() {
        // independent oracle: roots of z^2 - 13 mod 9 among residues = 1 mod 3
        let expected: Vec<u64> = [1u64, 4, 7]
            .into_iter()
            .filter(|r| (r * r + 9 * 13 - 13) % 9 == 0)
            .collect();
        assert_eq!(expected, vec![7]);
        let f = PadicPolynomial::from_integers(3, &[-13, 0, 1], 12).unwrap();
        let root = hensel_lift(&f, 1, 12).unwrap();
        assert!(root.congruent_integer(7, 2).unwrap());
        let res = f.eval(&root).unwrap();
        assert!(res.valuation().at_least(12));
    }

    #[test]
    fn hensel_linear_polynomial_returns_constant() {
        // F(z) = z - c
        let c = 29;
        let f = PadicPolynomial::from_integers(7, &[-c, 1], 10).unwrap();
        let root = hensel_lift(&f, (c % 7) as u64, 10).unwrap();
        assert!(root.congruent_integer(c, 10).unwrap());
    }

    #[test]
    fn hensel_mixed_cubic_from_exhaustive_seed() {
        // F(z) = z^3 - (13 + z)^2; independent scan of {1,4,7} mod 9
        let fval = |z: i64| z * z * z - (13 + z) * (13 + z);
        let expected: Vec<i64> = [1i64, 4, 7]
            .into_iter()
            .filter(|&r| fval(r).rem_euclid(9) == 0)
            .collect();
        assert_eq!(expected, vec![4]);
        // expand: z^3 - z^2 - 26 z - 169
        let f = PadicPolynomial::from_integers(3, &[-169, -26, -1, 1], 12).unwrap();
        let root = hensel_lift(&f, 1, 12).unwrap();
        assert!(root.congruent_integer(4, 2).unwrap());
        assert!(root.congruent_integer(58_207, 12).unwrap()); // frozen Newton value
        assert!(f.eval(&root).unwrap().valuation().at_least(12));
    }

    #[test]
    fn hensel_rejects_bad_seeds() {
        let f = PadicPolynomial::from_integers(3, &[-13, 0, 1], 8).unwrap();
        assert!(matches!(
            hensel_lift(&f, 0, 8),
            Err(Error::HenselNotRoot { .. })
        ));
        // double root mod 3: z^2 over Z_3 at 0
        let g = PadicPolynomial::from_integers(3, &[0, 0, 1], 8).unwrap();
        assert!(matches!(
            hensel_lift(&g, 0, 8),
            Err(Error::HenselSingularDerivative { .. })
        ));
    }

    #[test]
    fn hensel_uniqueness_small_modulus() {
        // no residue mod 27 other than the lifted class is a root
        let f = PadicPolynomial::from_integers(3, &[-13, 0, 1], 8).unwrap();
        let root = hensel_lift(&f, 1, 8).unwrap();
        let r27 = root.residue(3).unwrap();
        let hits: Vec<u64> = (0..27u64)
            .filter(|r| r % 3 == 1 && (r * r).rem_euclid(27) == 13)
            .collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(BigUint::from(hits[0]), r27);
    }

    #[test]
    fn hensel_root_with_positive_valuation() {
        // F(z) = z - 3: seed 0, root has valuation 1
        let f = PadicPolynomial::from_integers(3, &[-3, 1], 8).unwrap();
        let root = hensel_lift(&f, 0, 8).unwrap();
        assert_eq!(root.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn scale_by_prime_power_round_trip() {
        let x = padic(13, 3, 8);
        let up = scale_by_prime_power(&x, 2);
        assert_eq!(up.valuation(), Valuation::Finite(2));
        let down = scale_by_prime_power(&up, -2);
        assert!(down.congruent(&x, 8).unwrap());
        let _ = BigInt::from(1); // keep import used in both cfgs
    }
}
