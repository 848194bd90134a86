//! Uniform constants depending only on the ambient ranks.
//!
//! `C(m)` is the largest `d` with `φ(d) <= max(m, 1)`; from it come
//! `L1(m) = C(m)^m` (orders of finite-order matrices in `GL_m(Z)`),
//! `L3(m) = C(m)!` (periodic exponent of `m x m` integer matrices),
//! `C1(m, n)` (orders of finite-order automorphisms of `Z^m x F_n`) and
//! `C3(m, n)` (periodic exponent of endomorphisms of `Z^m x F_n`).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

/// Euler's totient, by trial factorization.
pub fn euler_phi(d: u64) -> u64 {
    assert!(d >= 1, "euler_phi is defined for d >= 1");
    let mut n = d;
    let mut result = d;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// `C(m)`: largest `d` with `φ(d) <= max(m, 1)`. Since `φ(d) >= sqrt(d/2)`,
/// scanning `d <= 2m^2 + 1` is exhaustive.
pub fn phi_threshold(m: u64) -> u64 {
    let m = m.max(1);
    (1..=(2 * m * m + 1))
        .filter(|&d| euler_phi(d) <= m)
        .max()
        .unwrap_or(1)
}

pub fn l1(m: u64) -> BigUint {
    num_traits::pow(BigUint::from(phi_threshold(m)), m as usize)
}

pub fn l3(m: u64) -> BigUint {
    factorial(phi_threshold(m))
}

pub fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// `(6n - 6)!` for `n >= 2`, and 1 for `n <= 1`.
pub fn free_periodic(n: u64) -> BigUint {
    if n <= 1 {
        BigUint::one()
    } else {
        factorial(6 * n - 6)
    }
}

pub fn c1(m: u64, n: u64) -> BigUint {
    if n <= 1 {
        // Z^m x F_n is free abelian of rank m + n
        l1(m + n)
    } else if m == 0 {
        l1(n)
    } else {
        l1(n) * l1(m)
    }
}

pub fn c3(m: u64, n: u64) -> BigUint {
    l3(m).lcm(&l3(m + 1)).lcm(&free_periodic(n))
}

/// All constants for one ambient `Z^m x F_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantsReport {
    pub m: u64,
    pub n: u64,
    #[serde(rename = "C", serialize_with = "as_decimal")]
    pub c: u64,
    #[serde(rename = "L1", serialize_with = "as_decimal")]
    pub l1: BigUint,
    #[serde(rename = "L3", serialize_with = "as_decimal")]
    pub l3: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub free_per: BigUint,
    #[serde(rename = "C1", serialize_with = "as_decimal")]
    pub c1: BigUint,
    #[serde(rename = "C3", serialize_with = "as_decimal")]
    pub c3: BigUint,
}

fn as_decimal<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn constants(m: u64, n: u64) -> ConstantsReport {
    ConstantsReport {
        m,
        n,
        c: phi_threshold(m),
        l1: l1(m),
        l3: l3(m),
        free_per: free_periodic(n),
        c1: c1(m, n),
        c3: c3(m, n),
    }
}
