//! Word-sized modular helpers. Moduli are always below 2^63 so products fit in u128.

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= 1 << 32 {
        return (a % m) * (b % m) % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
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

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    debug_assert!(m < 1 << 63);
    let (mut r0, mut r1) = (m as i64, (a % m) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i64) as u64)
}

/// `p^k` if it stays below 2^63.
pub(crate) fn checked_pow(p: u64, k: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p)?;
    }
    if acc >= 1 << 63 {
        None
    } else {
        Some(acc)
    }
}

/// Largest `k` with `p^k < 2^63`.
pub(crate) fn max_digits(p: u64) -> u32 {
    let mut k = 0;
    while checked_pow(p, k + 1).is_some() {
        k += 1;
    }
    k
}

/// Strip factors of `p` from a nonzero integer, returning the count.
pub(crate) fn strip_p(mut n: u64, p: u64) -> (u32, u64) {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    (v, n)
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_brute_force() {
        for m in [5u64, 9, 25, 49, 1024] {
            for a in 1..m {
                let brute = (1..m).find(|&x| (a * x) % m == 1);
                assert_eq!(inv_mod(a, m), brute, "a={a} m={m}");
            }
        }
    }

    #[test]
    fn digit_limits() {
        assert_eq!(max_digits(2), 62);
        assert_eq!(max_digits(3), 39);
        assert!(checked_pow(7, max_digits(7)).is_some());
        assert!(checked_pow(7, max_digits(7) + 1).is_none());
    }

    #[test]
    fn gcds() {
        assert_eq!(gcd_u128(12, 18), 6);
        assert_eq!(gcd_u128(0, 7), 7);
        assert_eq!(gcd_u128(1 << 70, 3 << 68), 1 << 68);
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(4));
    }
}
