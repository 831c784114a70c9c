//! Polynomials with p-adic integer coefficients.

use crate::error::{Error, Result};
use crate::padic::PadicNumber;

/// A polynomial whose coefficients are p-adic integers (norm <= 1), the
/// setting Hensel lifting needs. `coeffs[i]` is the coefficient of z^i.
#[derive(Clone, Debug)]
pub struct PadicPolynomial {
    prime: u64,
    coeffs: Vec<PadicNumber>,
}

impl PadicPolynomial {
    pub fn new(prime: u64, coeffs: Vec<PadicNumber>) -> Result<Self> {
        for (index, c) in coeffs.iter().enumerate() {
            if c.prime() != prime {
                return Err(Error::PrimeMismatch {
                    left: prime,
                    right: c.prime(),
                });
            }
            if let Some(v) = c.valuation().finite() {
                if v < 0 {
                    return Err(Error::CoefficientNotIntegral {
                        index,
                        valuation: v,
                    });
                }
            }
        }
        Ok(PadicPolynomial { prime, coeffs })
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_integers(prime: u64, coeffs: &[i64], precision: u32) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|&c| PadicNumber::from_integer(c, prime, precision))
            .collect::<Result<Vec<_>>>()?;
        Self::new(prime, coeffs)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&PadicNumber> {
        self.coeffs.get(i)
    }

    /// Index of the last coefficient that is non-zero at working precision.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero_at_precision())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        if x.prime() != self.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: x.prime(),
            });
        }
        let mut acc = PadicNumber::zero(self.prime, x.precision().max(1));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Result<Self> {
        let precision = self
            .coeffs
            .iter()
            .map(|c| c.precision())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut coeffs = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let factor = PadicNumber::from_integer(i as i64, self.prime, precision)?;
            coeffs.push(c.mul(&factor)?);
        }
        Self::new(self.prime, coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            coeffs.push(c);
        }
        Self::new(self.prime, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PadicPolynomial {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, factor: &PadicNumber) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mul(factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.prime, coeffs)
    }

    /// Multiply by z^k.
    pub fn shift(&self, k: usize, zero_precision: u32) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + k);
        for _ in 0..k {
            coeffs.push(PadicNumber::zero(self.prime, zero_precision));
        }
        coeffs.extend(self.coeffs.iter().cloned());
        PadicPolynomial {
            prime: self.prime,
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(self.prime, vec![]);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs: Vec<Option<PadicNumber>> = vec![None; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let term = a.mul(b)?;
                coeffs[i + j] = Some(match coeffs[i + j].take() {
                    Some(acc) => acc.add(&term)?,
                    None => term,
                });
            }
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.expect("every slot written"))
            .collect();
        Self::new(self.prime, coeffs)
    }

    pub fn pow(&self, exp: u32) -> Result<Self> {
        let precision = self
            .coeffs
            .iter()
            .map(|c| c.precision())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut acc = Self::new(self.prime, vec![PadicNumber::one(self.prime, precision)])?;
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Exact division: requires the divisor's leading coefficient to be a
    /// p-adic unit and the remainder to vanish at working precision.
    ///
    /// A non-vanishing remainder signals a construction bug upstream and is
    /// reported with the offending degree and valuation.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Self> {
        if divisor.prime != self.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: divisor.prime,
            });
        }
        let d_deg = divisor.degree().ok_or(Error::DivisionByZeroPolynomial)?;
        let lead = &divisor.coeffs[d_deg];
        if lead.valuation() != crate::padic::Valuation::Finite(0) {
            return Err(Error::DivisorLeadingNotUnit);
        }
        let n_deg = match self.degree() {
            Some(d) => d,
            None => return Self::new(self.prime, vec![]),
        };
        if n_deg < d_deg {
            self.ensure_no_remainder()?;
            return Self::new(self.prime, vec![]);
        }
        let mut rem: Vec<PadicNumber> = self.coeffs[..=n_deg].to_vec();
        let q_len = n_deg - d_deg + 1;
        let mut quot: Vec<Option<PadicNumber>> = vec![None; q_len];
        for i in (0..q_len).rev() {
            let q = rem[i + d_deg].div(lead)?;
            for (j, dc) in divisor.coeffs[..=d_deg].iter().enumerate() {
                let t = q.mul(dc)?;
                rem[i + j] = rem[i + j].sub(&t)?;
            }
            quot[i] = Some(q);
        }
        for (index, c) in rem.iter().enumerate() {
            if let Some(v) = c.valuation().finite() {
                return Err(Error::NonZeroRemainder {
                    index,
                    valuation: v,
                });
            }
        }
        Self::new(
            self.prime,
            quot.into_iter().map(|q| q.expect("filled")).collect(),
        )
    }

    fn ensure_no_remainder(&self) -> Result<()> {
        for (index, c) in self.coeffs.iter().enumerate() {
            if let Some(v) = c.valuation().finite() {
                return Err(Error::NonZeroRemainder {
                    index,
                    valuation: v,
                });
            }
        }
        Ok(())
    }

    /// Coefficientwise congruence mod p^m (missing coefficients count as 0).
    pub fn congruent(&self, other: &Self, modulus_exponent: u32) -> Result<bool> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = PadicNumber::zero(self.prime, modulus_exponent);
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            if !a.congruent(b, modulus_exponent)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
