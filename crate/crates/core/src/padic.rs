//! Exact arithmetic in Q_p at finite, explicitly tracked precision.
//!
//! A non-zero value is stored in canonical form `x = p^v * u` with the unit
//! part `u` known modulo `p^N` (`u` is never divisible by `p`). A value whose
//! known digits all vanish is kept as a distinguished "zero at precision"
//! marker: the engine never claims digits it has not computed, and dividing by
//! such a value is an error rather than a guess.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default number of unit digits carried by constructors.
pub const DEFAULT_PRECISION: u32 = 48;

/// p-adic valuation; `Infinite` marks a value indistinguishable from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }

    /// True when the valuation is certainly at least `m`.
    pub fn at_least(&self, m: i64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= m,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Valuation::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Valuation::Infinite),
            Raw::Str(s) => Err(D::Error::custom(format!("bad valuation: {s}"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    /// All digits below position `known_to` vanish: |x|_p <= p^(-known_to).
    Zero { known_to: i64 },
    /// x = p^valuation * unit, unit != 0 (mod p), 0 < unit < p^precision.
    Unit {
        valuation: i64,
        unit: BigUint,
        precision: u32,
    },
}

/// An element of Q_p at finite precision.
///
/// No absolute equality is exposed; use [`PadicNumber::congruent`] to compare
/// modulo an explicit power of p.
#[derive(Clone, Debug)]
pub struct PadicNumber {
    prime: u64,
    repr: Repr,
}

fn check_prime(prime: u64) -> Result<()> {
    if prime < 2 {
        return Err(Error::InvalidPrime(prime));
    }
    Ok(())
}

fn pow_biguint(prime: u64, exp: u32) -> BigUint {
    BigUint::from(prime).pow(exp)
}

/// Exponent of `prime` in `n`; `n` must be non-zero.
fn vp_biguint(n: &BigUint, prime: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigUint::from(prime);
    let mut v = 0u32;
    let mut cur = n.clone();
    loop {
        let (q, r) = cur.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        cur = q;
    }
}

/// Inverse of `u` modulo `m` (u coprime to m).
fn invert_mod(u: &BigUint, m: &BigUint) -> Result<BigUint> {
    let e = BigInt::from(u.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return Err(Error::Internal(format!(
            "non-invertible residue (gcd {})",
            e.gcd
        )));
    }
    let m_int = BigInt::from(m.clone());
    let x = ((e.x % &m_int) + &m_int) % &m_int;
    Ok(x.to_biguint().expect("reduced residue is non-negative"))
}

impl PadicNumber {
    /// A value all of whose first `precision` digits vanish.
    pub fn zero(prime: u64, precision: u32) -> Self {
        PadicNumber {
            prime,
            repr: Repr::Zero {
                known_to: precision as i64,
            },
        }
    }

    fn zero_known_to(prime: u64, known_to: i64) -> Self {
        PadicNumber {
            prime,
            repr: Repr::Zero { known_to },
        }
    }

    pub fn one(prime: u64, precision: u32) -> Self {
        PadicNumber {
            prime,
            repr: Repr::Unit {
                valuation: 0,
                unit: BigUint::one(),
                precision: precision.max(1),
            },
        }
    }

    fn from_unit(prime: u64, valuation: i64, unit: BigUint, precision: u32) -> Self {
        debug_assert!(precision >= 1);
        debug_assert!(!(&unit % prime).is_zero());
        debug_assert!(unit < pow_biguint(prime, precision));
        PadicNumber {
            prime,
            repr: Repr::Unit {
                valuation,
                unit,
                precision,
            },
        }
    }

    pub fn from_integer(value: impl Into<BigInt>, prime: u64, precision: u32) -> Result<Self> {
        Self::from_rational(value, 1, prime, precision)
    }

    /// Image of `num/den` in Q_p, carrying `precision` unit digits.
    pub fn from_rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        prime: u64,
        precision: u32,
    ) -> Result<Self> {
        check_prime(prime)?;
        let precision = precision.max(1);
        let num: BigInt = num.into();
        let den: BigInt = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero(prime, precision));
        }
        let num_mag = num.magnitude().clone();
        let den_mag = den.magnitude().clone();
        let vn = vp_biguint(&num_mag, prime) as i64;
        let vd = vp_biguint(&den_mag, prime) as i64;
        let p_big = BigUint::from(prime);
        let num_unit = &num_mag / p_big.pow(vn as u32);
        let den_unit = &den_mag / p_big.pow(vd as u32);
        let modulus = pow_biguint(prime, precision);
        let mut unit = (&num_unit % &modulus) * invert_mod(&(&den_unit % &modulus), &modulus)?;
        unit %= &modulus;
        if num.sign() * den.sign() == Sign::Minus {
            unit = &modulus - unit;
        }
        Ok(Self::from_unit(prime, vn - vd, unit, precision))
    }

    /// Build from a residue known modulo `p^modulus_exponent`.
    pub fn from_residue(
        value: impl Into<BigInt>,
        prime: u64,
        modulus_exponent: u32,
    ) -> Result<Self> {
        check_prime(prime)?;
        if modulus_exponent == 0 {
            return Ok(Self::zero_known_to(prime, 0));
        }
        let modulus = pow_biguint(prime, modulus_exponent);
        let value: BigInt = value.into();
        let m_int = BigInt::from(modulus.clone());
        let reduced = ((value % &m_int) + &m_int) % &m_int;
        let reduced = reduced.to_biguint().expect("non-negative after reduction");
        if reduced.is_zero() {
            return Ok(Self::zero(prime, modulus_exponent));
        }
        let v = vp_biguint(&reduced, prime);
        let unit = &reduced / pow_biguint(prime, v);
        Ok(Self::from_unit(prime, v as i64, unit, modulus_exponent - v))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero_at_precision(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero { .. } => Valuation::Infinite,
            Repr::Unit { valuation, .. } => Valuation::Finite(*valuation),
        }
    }

    /// Number of known unit digits (0 for a zero-at-precision value).
    pub fn precision(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { precision, .. } => *precision,
        }
    }

    /// Position below which every digit is known: the value is determined
    /// modulo p^abs_precision.
    pub fn abs_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { known_to } => *known_to,
            Repr::Unit {
                valuation,
                precision,
                ..
            } => valuation + *precision as i64,
        }
    }

    /// The unit part u of x = p^v * u, if the value is non-zero at precision.
    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { unit, .. } => Some(unit),
        }
    }

    /// |x|_p as an exact rational; zero-at-precision reports 0.
    pub fn norm(&self) -> BigRational {
        match self.norm_exponent() {
            None => BigRational::zero(),
            Some(e) => {
                let p = BigInt::from(self.prime);
                if e >= 0 {
                    BigRational::from_integer(p.pow(e as u32))
                } else {
                    BigRational::new(BigInt::one(), p.pow((-e) as u32))
                }
            }
        }
    }

    /// e with |x|_p = p^e, or None for zero-at-precision.
    pub fn norm_exponent(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { valuation, .. } => Some(-valuation),
        }
    }

    /// Canonical digits of the unit part (coefficients of p^0..p^(count-1)
    /// in x / p^valuation).
    pub fn unit_digits(&self, count: u32) -> Result<Vec<u64>> {
        match &self.repr {
            Repr::Zero { known_to } => Err(Error::DigitsBeyondPrecision {
                requested: count as i64,
                available: (*known_to).min(0),
            }),
            Repr::Unit {
                unit, precision, ..
            } => {
                if count > *precision {
                    return Err(Error::DigitsBeyondPrecision {
                        requested: count as i64,
                        available: *precision as i64,
                    });
                }
                let mut digits = Vec::with_capacity(count as usize);
                let p = BigUint::from(self.prime);
                let mut cur = unit.clone();
                for _ in 0..count {
                    let (q, r) = cur.div_rem(&p);
                    digits.push(r.to_u64().expect("digit < p fits in u64"));
                    cur = q;
                }
                Ok(digits)
            }
        }
    }

    /// Digits at absolute positions p^0..p^(count-1); requires valuation >= 0.
    pub fn digits(&self, count: u32) -> Result<Vec<u64>> {
        match &self.repr {
            Repr::Zero { known_to } => {
                if count as i64 > *known_to {
                    return Err(Error::DigitsBeyondPrecision {
                        requested: count as i64,
                        available: *known_to,
                    });
                }
                Ok(vec![0; count as usize])
            }
            Repr::Unit { valuation, .. } => {
                if *valuation < 0 {
                    return Err(Error::NegativeValuationDigits {
                        valuation: *valuation,
                    });
                }
                if count as i64 > self.abs_precision() {
                    return Err(Error::DigitsBeyondPrecision {
                        requested: count as i64,
                        available: self.abs_precision(),
                    });
                }
                let lead = (*valuation as u32).min(count);
                let mut digits = vec![0u64; lead as usize];
                if count > lead {
                    digits.extend(self.unit_digits(count - lead)?);
                }
                Ok(digits)
            }
        }
    }

    /// The residue of x modulo p^modulus_exponent, for values with
    /// valuation >= 0 known at least that far.
    pub fn residue(&self, modulus_exponent: u32) -> Result<BigUint> {
        if (modulus_exponent as i64) > self.abs_precision() {
            return Err(Error::PrecisionTooLow {
                modulus: modulus_exponent as i64,
                available: self.abs_precision(),
            });
        }
        match &self.repr {
            Repr::Zero { .. } => Ok(BigUint::zero()),
            Repr::Unit {
                valuation, unit, ..
            } => {
                if *valuation < 0 {
                    return Err(Error::NegativeValuationDigits {
                        valuation: *valuation,
                    });
                }
                let modulus = pow_biguint(self.prime, modulus_exponent);
                if *valuation >= modulus_exponent as i64 {
                    return Ok(BigUint::zero());
                }
                Ok(unit * pow_biguint(self.prime, *valuation as u32) % modulus)
            }
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: other.prime,
            });
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                let modulus = pow_biguint(self.prime, *precision);
                PadicNumber::from_unit(self.prime, *valuation, &modulus - unit, *precision)
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (Repr::Zero { known_to: a }, Repr::Zero { known_to: b }) => {
                Ok(Self::zero_known_to(p, (*a).min(*b)))
            }
            (Repr::Zero { known_to }, Repr::Unit { .. }) => Ok(other
                .clone()
                .truncate_abs((*known_to).min(other.abs_precision()))),
            (Repr::Unit { .. }, Repr::Zero { known_to }) => Ok(self
                .clone()
                .truncate_abs((*known_to).min(self.abs_precision()))),
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    ..
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    ..
                },
            ) => {
                let m = (*va).min(*vb);
                let abs = self.abs_precision().min(other.abs_precision());
                debug_assert!(abs > m);
                let window = (abs - m) as u32;
                let modulus = pow_biguint(p, window);
                let sa = ua * pow_biguint(p, (*va - m) as u32) % &modulus;
                let sb = ub * pow_biguint(p, (*vb - m) as u32) % &modulus;
                let sum = (sa + sb) % &modulus;
                if sum.is_zero() {
                    return Ok(Self::zero_known_to(p, abs));
                }
                let w = vp_biguint(&sum, p);
                if w >= window {
                    return Ok(Self::zero_known_to(p, abs));
                }
                let unit = &sum / pow_biguint(p, w);
                Ok(Self::from_unit(p, m + w as i64, unit, window - w))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (Repr::Zero { known_to: a }, Repr::Zero { known_to: b }) => {
                Ok(Self::zero_known_to(p, a + b))
            }
            (Repr::Zero { known_to }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Zero { known_to }) => {
                Ok(Self::zero_known_to(p, known_to + valuation))
            }
            (
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    precision: na,
                },
                Repr::Unit {
                    valuation: vb,
                    unit: ub,
                    precision: nb,
                },
            ) => {
                let precision = (*na).min(*nb);
                let modulus = pow_biguint(p, precision);
                let unit = ua * ub % &modulus;
                Ok(Self::from_unit(p, va + vb, unit, precision))
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let p = self.prime;
        match &other.repr {
            Repr::Zero { known_to } => Err(Error::DivisionByZeroAtPrecision {
                known_to: *known_to,
            }),
            Repr::Unit {
                valuation: vb,
                unit: ub,
                precision: nb,
            } => match &self.repr {
                Repr::Zero { known_to } => Ok(Self::zero_known_to(p, known_to - vb)),
                Repr::Unit {
                    valuation: va,
                    unit: ua,
                    precision: na,
                } => {
                    let precision = (*na).min(*nb);
                    let modulus = pow_biguint(p, precision);
                    let unit = ua % &modulus * invert_mod(&(ub % &modulus), &modulus)? % &modulus;
                    Ok(Self::from_unit(p, va - vb, unit, precision))
                }
            },
        }
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, exp: u64) -> Self {
        if exp == 0 {
            let precision = match &self.repr {
                Repr::Zero { known_to } => (*known_to).max(1) as u32,
                Repr::Unit { precision, .. } => *precision,
            };
            return Self::one(self.prime, precision);
        }
        match &self.repr {
            Repr::Zero { known_to } => Self::zero_known_to(self.prime, known_to * exp as i64),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                let modulus = pow_biguint(self.prime, *precision);
                let u = unit.modpow(&BigUint::from(exp), &modulus);
                Self::from_unit(self.prime, valuation * exp as i64, u, *precision)
            }
        }
    }

    /// Forget digits at and above position `abs`: result is known modulo p^abs.
    pub fn truncate_abs(self, abs: i64) -> Self {
        match self.repr {
            Repr::Zero { known_to } => Self::zero_known_to(self.prime, known_to.min(abs)),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                let cur = valuation + precision as i64;
                if abs >= cur {
                    return Self::from_unit(self.prime, valuation, unit, precision);
                }
                if abs <= valuation {
                    return Self::zero_known_to(self.prime, abs);
                }
                let new_precision = (abs - valuation) as u32;
                let unit = unit % pow_biguint(self.prime, new_precision);
                debug_assert!(!unit.is_zero());
                Self::from_unit(self.prime, valuation, unit, new_precision)
            }
        }
    }

    /// Keep at most `n` unit digits.
    pub fn with_precision(&self, n: u32) -> Self {
        match &self.repr {
            Repr::Zero { known_to } => Self::zero_known_to(self.prime, (*known_to).min(n as i64)),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                let n = n.clamp(1, *precision);
                let unit = unit % pow_biguint(self.prime, n);
                debug_assert!(!unit.is_zero());
                Self::from_unit(self.prime, *valuation, unit, n)
            }
        }
    }

    /// The equality notion used everywhere: a = b (mod p^m).
    ///
    /// Errors when either operand is not known to absolute precision m.
    pub fn congruent(&self, other: &Self, modulus_exponent: u32) -> Result<bool> {
        self.same_prime(other)?;
        let m = modulus_exponent as i64;
        let available = self.abs_precision().min(other.abs_precision());
        if m > available {
            return Err(Error::PrecisionTooLow {
                modulus: m,
                available,
            });
        }
        let diff = self.sub(other)?;
        Ok(diff.valuation().at_least(m))
    }

    /// Convenience: congruent to the integer `value` mod p^m.
    pub fn congruent_integer(
        &self,
        value: impl Into<BigInt>,
        modulus_exponent: u32,
    ) -> Result<bool> {
        let rhs = Self::from_integer(value, self.prime, modulus_exponent.max(1))?;
        self.congruent(&rhs, modulus_exponent)
    }
}

impl fmt::Display for PadicNumber {
    /// Renders `p^v * (d0 + d1*p + d2*p^2 + ...) + O(p^(v+N))`, skipping zero
    /// digits. A zero-at-precision value renders as `O(p^known_to)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        match &self.repr {
            Repr::Zero { known_to } => write!(f, "O({p}^{known_to})"),
            Repr::Unit {
                valuation,
                precision,
                ..
            } => {
                let digits = self.unit_digits(*precision).expect("own precision");
                write!(f, "{p}^{valuation} * (")?;
                let mut first = true;
                for (j, &d) in digits.iter().enumerate() {
                    if d == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match j {
                        0 => write!(f, "{d}")?,
                        1 => write!(f, "{d}*{p}")?,
                        _ => write!(f, "{d}*{p}^{j}")?,
                    }
                }
                write!(f, ") + O({p}^{})", valuation + *precision as i64)
            }
        }
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PadicJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PadicJson::deserialize(d)?;
        PadicNumber::try_from(&raw).map_err(D::Error::custom)
    }
}

/// Wire form: {prime, valuation, digits, precision}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PadicJson {
    pub prime: u64,
    pub valuation: Valuation,
    pub digits: Vec<u64>,
    pub precision: i64,
}

impl From<&PadicNumber> for PadicJson {
    fn from(x: &PadicNumber) -> Self {
        match &x.repr {
            Repr::Zero { known_to } => PadicJson {
                prime: x.prime,
                valuation: Valuation::Infinite,
                digits: vec![],
                precision: *known_to,
            },
            Repr::Unit {
                valuation,
                precision,
                ..
            } => PadicJson {
                prime: x.prime,
                valuation: Valuation::Finite(*valuation),
                digits: x.unit_digits(*precision).expect("own precision"),
                precision: *precision as i64,
            },
        }
    }
}

impl TryFrom<&PadicJson> for PadicNumber {
    type Error = Error;

    fn try_from(raw: &PadicJson) -> Result<Self> {
        check_prime(raw.prime)?;
        match raw.valuation {
            Valuation::Infinite => Ok(PadicNumber::zero_known_to(raw.prime, raw.precision)),
            Valuation::Finite(v) => {
                if raw.digits.is_empty() || raw.digits.len() as i64 != raw.precision {
                    return Err(Error::BadInput("digit count must equal precision".into()));
                }
                let mut unit = BigUint::zero();
                for &d in raw.digits.iter().rev() {
                    if d >= raw.prime {
                        return Err(Error::BadInput(format!("digit {d} >= prime")));
                    }
                    unit = unit * raw.prime + d;
                }
                if (&unit % raw.prime).is_zero() {
                    return Err(Error::BadInput("leading digit must be non-zero".into()));
                }
                Ok(PadicNumber::from_unit(
                    raw.prime,
                    v,
                    unit,
                    raw.digits.len() as u32,
                ))
            }
        }
    }
}
