//! Integer factorization and primality for table generation.
//!
//! Everything here is deterministic: Miller-Rabin over the base set that is
//! exact for all 64-bit inputs, and Brent's cycle variant of Pollard rho with
//! a fixed increment schedule. Trial division handles the small-factor bulk.

const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the base set certifies all n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 == 1);
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("pollard rho exhausted its increment schedule");
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Sorted prime factors of n (without multiplicity); n = 0 or 1 gives none.
pub fn prime_factors(n: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut n = n;
    if n < 2 {
        return factors;
    }
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_BOUND && d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if is_prime_u64(m) {
                factors.push(m);
                continue;
            }
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    factors.sort_unstable();
    factors.dedup();
    factors
}

/// Legendre symbol (a/p) for odd prime p: 1, p-1 (= -1), or 0.
pub fn legendre(a: u64, p: u64) -> u64 {
    pow_mod(a % p, (p - 1) / 2, p)
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // write p - 1 = q * 2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q & 1 == 0 {
        q >>= 1;
        s += 1;
    }
    // deterministic: first non-residue
    let z = (2..p).find(|&z| legendre(z, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
            if i == m {
                return None;
            }
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(127));
        assert!(is_prime_u64(2_147_483_647));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn mersenne_style_factorizations() {
        assert_eq!(prime_factors((1u64 << 10) - 1), vec![3, 11, 31]);
        assert_eq!(prime_factors((1u64 << 8) - 1), vec![3, 5, 17]);
        assert_eq!(prime_factors((1u64 << 9) - 1), vec![7, 73]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
    }

    #[test]
    fn large_factorization_exercises_rho() {
        // 2^59 - 1 = 179951 * 3203431780337
        let n = (1u64 << 59) - 1;
        let fs = prime_factors(n);
        assert_eq!(fs, vec![179_951, 3_203_431_780_337]);
        assert!(fs.iter().all(|&f| is_prime_u64(f)));
    }

    #[test]
    fn tonelli_shanks_roots() {
        for p in [3u64, 5, 7, 13, 17, 73, 127] {
            for a in 1..p {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert_eq!(legendre(a, p), p - 1),
                }
            }
        }
    }
}
