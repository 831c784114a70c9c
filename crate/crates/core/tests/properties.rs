//! Property tests for the arithmetic core: ultrametric structure, agreement
//! with exact rational arithmetic, digit round-trips, and E_p closure.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use padic_hc::model::in_ep;
use padic_hc::padic::PadicNumber;

const PRECISION: u32 = 40;

fn primes() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(13)]
}

#[derive(Clone, Debug)]
struct Rat {
    num: i64,
    den: i64,
}

fn rationals() -> impl Strategy<Value = Rat> {
    // denominators positive, numerators possibly zero; p-valuations stay
    // small because the magnitudes are below 10^6
    (-1_000_000i64..1_000_000, 1i64..1_000_000).prop_map(|(num, den)| Rat { num, den })
}

fn nonzero_rationals() -> impl Strategy<Value = Rat> {
    rationals().prop_filter("non-zero", |r| r.num != 0)
}

fn to_padic(r: &Rat, p: u64) -> PadicNumber {
    PadicNumber::from_rational(r.num, r.den, p, PRECISION).unwrap()
}

fn to_rational(r: &Rat) -> BigRational {
    BigRational::new(BigInt::from(r.num), BigInt::from(r.den))
}

proptest! {
    #[test]
    fn ultrametric_inequality(p in primes(), a in nonzero_rationals(), b in nonzero_rationals()) {
        let x = to_padic(&a, p);
        let y = to_padic(&b, p);
        let sum = x.add(&y).unwrap();
        let bound = x.norm().max(y.norm());
        prop_assert!(sum.norm() <= bound);
        if x.norm() != y.norm() {
            prop_assert_eq!(sum.norm(), bound);
        }
    }

    #[test]
    fn norm_multiplicativity(p in primes(), a in nonzero_rationals(), b in nonzero_rationals()) {
        let x = to_padic(&a, p);
        let y = to_padic(&b, p);
        prop_assert_eq!(x.mul(&y).unwrap().norm(), x.norm() * y.norm());
    }

    #[test]
    fn ring_ops_agree_with_exact_rationals(
        p in primes(),
        a in nonzero_rationals(),
        b in nonzero_rationals(),
    ) {
        let x = to_padic(&a, p);
        let y = to_padic(&b, p);
        let ra = to_rational(&a);
        let rb = to_rational(&b);

        // |num|, |den| < 10^6 keeps every valuation within +-13 even at p = 2,
        // so all results are known well past 2 digits of absolute precision
        let check = |got: PadicNumber, exact: BigRational| {
            let want = PadicNumber::from_rational(
                exact.numer().clone(),
                exact.denom().clone(),
                p,
                PRECISION,
            )
            .unwrap();
            let available = got.abs_precision().min(want.abs_precision());
            assert!(available >= 2, "unexpected precision loss");
            got.congruent(&want, available.clamp(2, 20) as u32).unwrap()
        };
        prop_assert!(check(x.add(&y).unwrap(), &ra + &rb));
        prop_assert!(check(x.sub(&y).unwrap(), &ra - &rb));
        prop_assert!(check(x.mul(&y).unwrap(), &ra * &rb));
        prop_assert!(check(x.div(&y).unwrap(), &ra / &rb));
    }

    #[test]
    fn digits_round_trip(p in primes(), a in nonzero_rationals()) {
        let x = to_padic(&a, p);
        let digits = x.unit_digits(PRECISION).unwrap();
        prop_assert!(digits[0] != 0);
        prop_assert!(digits.iter().all(|&d| d < p));
        // reassemble the unit and compare at full precision
        let mut unit = BigInt::from(0);
        for &d in digits.iter().rev() {
            unit = unit * BigInt::from(p) + BigInt::from(d);
        }
        let v = match x.valuation() {
            padic_hc::padic::Valuation::Finite(v) => v,
            _ => unreachable!(),
        };
        let rebuilt = if v >= 0 {
            PadicNumber::from_integer(unit * BigInt::from(p).pow(v as u32), p, PRECISION).unwrap()
        } else {
            PadicNumber::from_rational(unit, BigInt::from(p).pow((-v) as u32), p, PRECISION)
                .unwrap()
        };
        prop_assert!(x.congruent(&rebuilt, PRECISION.min((x.abs_precision().min(rebuilt.abs_precision())) as u32)).unwrap());
    }

    #[test]
    fn ep_closed_under_products(p in primes(), t1 in 0u64..100_000, t2 in 0u64..100_000) {
        // elements 1 + q t with q = p (p odd) or 4 (p = 2) lie in E_p
        let q = if p == 2 { 4 } else { p };
        let x = PadicNumber::from_integer(BigInt::from(1 + q as u128 * t1 as u128), p, PRECISION).unwrap();
        let y = PadicNumber::from_integer(BigInt::from(1 + q as u128 * t2 as u128), p, PRECISION).unwrap();
        prop_assert!(in_ep(&x));
        prop_assert!(in_ep(&y));
        prop_assert!(in_ep(&x.mul(&y).unwrap()));
    }

    #[test]
    fn congruence_is_an_equivalence_at_shared_precision(
        p in primes(),
        a in nonzero_rationals(),
    ) {
        let x = to_padic(&a, p);
        let m = x.abs_precision().clamp(0, 8) as u32;
        prop_assert!(x.congruent(&x, m).unwrap());
        let shifted = x.add(&PadicNumber::from_integer(
            BigInt::from(p).pow(m.max(1)),
            p,
            PRECISION,
        ).unwrap()).unwrap();
        // adding p^m never changes the class mod p^m
        prop_assert!(x.congruent(&shifted, m).unwrap());
    }
}
