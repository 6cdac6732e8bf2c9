//! Exact integers in `Z[zeta_m]` for `m = 2`, `m = p` (odd prime), and
//! `m = 4p` -- the value spaces of the brute-force character sums and of
//! the embedded closed forms.
//!
//! Elements are reduced canonically modulo the cyclotomic polynomial, so
//! equality is coefficient-vector equality. Coefficients are arbitrary
//! precision; a sum can never overflow silently.

use num_bigint::BigInt;

use crate::{Error, Result};

/// An element of `Z[zeta_m]` in the basis `1, zeta, ..., zeta^(phi(m)-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloInt {
    m: u64,
    coeffs: Vec<BigInt>,
}

fn phi_degree(m: u64) -> Result<usize> {
    match m {
        2 => Ok(1),
        p if crate::gf::is_prime(p) && p % 2 == 1 => Ok((p - 1) as usize),
        fourp if fourp % 4 == 0 && crate::gf::is_prime(fourp / 4) && (fourp / 4) % 2 == 1 => {
            Ok((fourp / 2 - 2) as usize)
        }
        other => Err(Error::UnsupportedCyclotomicIndex(other)),
    }
}

/// The cyclotomic polynomial for the supported indices, ascending
/// coefficients, monic. `Phi_2 = x + 1`, `Phi_p = 1 + x + ... + x^(p-1)`,
/// `Phi_4p = (x^(2p) + 1)/(x^2 + 1) = 1 - x^2 + x^4 - ... + x^(2p-2)`.
fn cyclotomic_poly(m: u64) -> Result<Vec<BigInt>> {
    let deg = phi_degree(m)?;
    let mut out = vec![BigInt::from(0); deg + 1];
    match m {
        2 => {
            out[0] = BigInt::from(1);
            out[1] = BigInt::from(1);
        }
        p if p % 2 == 1 => {
            for c in out.iter_mut() {
                *c = BigInt::from(1);
            }
        }
        _ => {
            for (j, chunk) in out.chunks_mut(2).enumerate() {
                chunk[0] = BigInt::from(if j % 2 == 0 { 1 } else { -1 });
            }
        }
    }
    Ok(out)
}

impl CycloInt {
    pub fn zero(m: u64) -> Result<CycloInt> {
        Ok(CycloInt {
            m,
            coeffs: vec![BigInt::from(0); phi_degree(m)?],
        })
    }

    pub fn from_integer(m: u64, v: impl Into<BigInt>) -> Result<CycloInt> {
        let mut z = CycloInt::zero(m)?;
        z.coeffs[0] = v.into();
        Ok(z)
    }

    /// `zeta_m^k`, reduced.
    pub fn zeta_pow(m: u64, k: u64) -> Result<CycloInt> {
        let mut raw = vec![BigInt::from(0); (k % m) as usize + 1];
        *raw.last_mut().unwrap() = BigInt::from(1);
        CycloInt::reduce(m, raw)
    }

    /// Builds `sum coeffs[k] * zeta_m^k` from exponent-indexed counts.
    pub fn from_exponent_counts(m: u64, counts: &[i64]) -> Result<CycloInt> {
        let mut raw = vec![BigInt::from(0); counts.len()];
        for (k, &c) in counts.iter().enumerate() {
            raw[k % m as usize] += c;
        }
        CycloInt::reduce(m, raw)
    }

    fn reduce(m: u64, mut raw: Vec<BigInt>) -> Result<CycloInt> {
        let phi = cyclotomic_poly(m)?;
        let deg = phi.len() - 1;
        while raw.len() > deg {
            let lead = raw.pop().unwrap();
            if lead != BigInt::from(0) {
                let top = raw.len();
                for (k, c) in phi.iter().enumerate().take(deg) {
                    raw[top - deg + k] -= &lead * c;
                }
            }
        }
        raw.resize(deg, BigInt::from(0));
        Ok(CycloInt { m, coeffs: raw })
    }

    pub fn index(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == BigInt::from(0))
    }

    fn check_index(&self, other: &CycloInt) -> Result<()> {
        if self.m != other.m {
            return Err(Error::MixedCyclotomicIndex(self.m, other.m));
        }
        Ok(())
    }

    pub fn add(&self, other: &CycloInt) -> Result<CycloInt> {
        self.check_index(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycloInt { m: self.m, coeffs })
    }

    pub fn neg(&self) -> CycloInt {
        CycloInt {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &CycloInt) -> Result<CycloInt> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CycloInt) -> Result<CycloInt> {
        self.check_index(other)?;
        let mut raw = vec![BigInt::from(0); self.coeffs.len() + other.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == BigInt::from(0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                raw[i + j] += a * b;
            }
        }
        CycloInt::reduce(self.m, raw)
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> CycloInt {
        let k = k.into();
        CycloInt {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * &k).collect(),
        }
    }

    /// Complex conjugation `zeta -> zeta^(-1)`: permute exponents mod m,
    /// then reduce.
    pub fn conj(&self) -> CycloInt {
        let m = self.m as usize;
        let mut raw = vec![BigInt::from(0); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[(m - k) % m] += c;
        }
        CycloInt::reduce(self.m, raw).expect("index already validated")
    }

    /// `z * conj(z)`; a rational integer for any sum of roots of unity
    /// times its conjugate only when z is real-normed, so the result is
    /// returned as a CycloInt.
    pub fn norm_sq(&self) -> CycloInt {
        self.mul(&self.conj()).expect("same index")
    }

    /// `Some(v)` iff the reduced form is the constant `v`.
    pub fn as_rational_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(|c| *c == BigInt::from(0)) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses an element of `Z[zeta_m]` in `Z[zeta_target]` where
    /// `m` divides `target` (exponent dilation by `target/m`).
    pub fn lift_to(&self, target: u64) -> Result<CycloInt> {
        if target == self.m {
            return Ok(self.clone());
        }
        if target % self.m != 0 {
            return Err(Error::MixedCyclotomicIndex(self.m, target));
        }
        let scale = (target / self.m) as usize;
        let mut raw = vec![BigInt::from(0); self.coeffs.len() * scale];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[k * scale] = c.clone();
        }
        CycloInt::reduce(target, raw)
    }

    /// Floating-point value, for the sanity cross-check only; the exact
    /// path is authoritative.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        use std::f64::consts::TAU;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let angle = TAU * k as f64 / self.m as f64;
            let cf = bigint_to_f64(c);
            re += cf * angle.cos();
            im += cf * angle.sin();
        }
        (re, im)
    }
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_bigint::Sign;
    let (sign, digits) = b.to_u64_digits();
    let mut v = 0.0f64;
    for d in digits.iter().rev() {
        v = v * 1.8446744073709552e19 + *d as f64;
    }
    if sign == Sign::Minus {
        -v
    } else {
        v
    }
}

impl std::fmt::Display for CycloInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == BigInt::from(0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z{}", self.m)?,
                _ => write!(f, "{c}*z{}^{k}", self.m)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_orbit_sums_to_zero() {
        for p in [3u64, 5, 7] {
            let mut acc = CycloInt::zero(p).unwrap();
            for k in 0..p {
                acc = acc.add(&CycloInt::zeta_pow(p, k).unwrap()).unwrap();
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn conjugation_inverts_exponents() {
        assert_eq!(
            CycloInt::zeta_pow(5, 2).unwrap().conj(),
            CycloInt::zeta_pow(5, 3).unwrap()
        );
        assert_eq!(
            CycloInt::zeta_pow(12, 1).unwrap().conj(),
            CycloInt::zeta_pow(12, 11).unwrap()
        );
    }

    #[test]
    fn roots_of_unity_have_unit_norm() {
        for m in [2u64, 3, 5, 12, 20] {
            for k in 0..m {
                let z = CycloInt::zeta_pow(m, k).unwrap();
                assert_eq!(
                    z.norm_sq().as_rational_integer(),
                    Some(BigInt::from(1)),
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn mixed_index_is_an_error() {
        let a = CycloInt::zeta_pow(3, 1).unwrap();
        let b = CycloInt::zeta_pow(5, 1).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn lift_preserves_values() {
        // zeta_3 lifted to Z[zeta_12] still cubes to 1.
        let z = CycloInt::zeta_pow(3, 1).unwrap().lift_to(12).unwrap();
        let z3 = z.mul(&z).unwrap().mul(&z).unwrap();
        assert_eq!(z3.as_rational_integer(), Some(BigInt::from(1)));
        // and it matches zeta_12^4 directly.
        assert_eq!(z, CycloInt::zeta_pow(12, 4).unwrap());
    }

    #[test]
    fn i_in_z_zeta12_squares_to_minus_one() {
        // i = zeta_12^3
        let i = CycloInt::zeta_pow(12, 3).unwrap();
        assert_eq!(
            i.mul(&i).unwrap().as_rational_integer(),
            Some(BigInt::from(-1))
        );
    }

    #[test]
    fn norm_matches_float_magnitude() {
        // random-ish small sums of roots of unity per supported m
        for m in [2u64, 3, 5, 7, 12, 20] {
            let mut z = CycloInt::zero(m).unwrap();
            for k in 0..m {
                if k % 3 != 1 {
                    z = z.add(&CycloInt::zeta_pow(m, k).unwrap()).unwrap();
                }
            }
            let exact = z.norm_sq();
            let (ex_re, ex_im) = exact.to_complex_f64();
            let (re, im) = z.to_complex_f64();
            let float = re * re + im * im;
            assert!(ex_im.abs() < 1e-6, "m={m}: z*conj(z) must be real");
            assert!((ex_re - float).abs() < 1e-6, "m={m}: {ex_re} vs {float}");
        }
    }
}
