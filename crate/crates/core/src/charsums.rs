//! Characters, Gauss sums, and the Weil sum `R(A,B,C) = sum chi1(A x^(q^r+1)
//! + B x + C)` over the big field: exact brute-force evaluation in
//! `Z[zeta_p]` and the symbolic closed-form branch table, with an embedding
//! into `Z[zeta_4p]` that lets the two be compared exactly.

use serde::Serialize;

use crate::cyclo::CycloInt;
use crate::gf::{self, Elem, TowerSpec};
use crate::{Error, Result};

/// A symbolic sum value `sign * i^i_pow * zeta_p^zeta_exp * p^(sqrt_p_exp/2)`,
/// or zero. Nonzero values satisfy `|value|^2 = p^sqrt_p_exp`; with
/// `q = p^n` the magnitudes `q^(h/2)` of the branch table correspond to
/// `sqrt_p_exp = n*h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedValue {
    pub p: u64,
    pub zero: bool,
    pub sign: i8,
    /// Exponent of i, canonicalized into {0, 1} (i^2 folds into the sign).
    pub i_pow: u8,
    /// Exponent of zeta_p.
    pub zeta_exp: u64,
    /// The value carries the factor p^(sqrt_p_exp / 2).
    pub sqrt_p_exp: u32,
}

impl ClosedValue {
    pub fn zero(p: u64) -> ClosedValue {
        ClosedValue {
            p,
            zero: true,
            sign: 1,
            i_pow: 0,
            zeta_exp: 0,
            sqrt_p_exp: 0,
        }
    }

    pub fn new(p: u64, sign: i64, i_pow: u64, zeta_exp: u64, sqrt_p_exp: u32) -> ClosedValue {
        debug_assert!(sign == 1 || sign == -1);
        let mut s = sign;
        let mut j = i_pow % 4;
        if j >= 2 {
            s = -s;
            j -= 2;
        }
        ClosedValue {
            p,
            zero: false,
            sign: s as i8,
            i_pow: j as u8,
            zeta_exp: zeta_exp % p,
            sqrt_p_exp,
        }
    }

    pub fn times_sign(self, sign: i64) -> ClosedValue {
        if self.zero {
            return self;
        }
        ClosedValue {
            sign: self.sign * sign as i8,
            ..self
        }
    }
}

impl std::fmt::Display for ClosedValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.i_pow == 1 {
            write!(f, "i*")?;
        }
        if self.zeta_exp != 0 {
            write!(f, "z{}^{}*", self.p, self.zeta_exp)?;
        }
        if self.sqrt_p_exp % 2 == 0 {
            write!(f, "{}", self.p.pow(self.sqrt_p_exp / 2))
        } else {
            write!(f, "{}^({}/2)", self.p, self.sqrt_p_exp)
        }
    }
}

/// Cyclotomic index used for the canonical character of a field of
/// characteristic p.
pub fn chi_index(p: u64) -> u64 {
    if p == 2 {
        2
    } else {
        p
    }
}

/// Index of the embedding ring for closed values: `Z` for p = 2,
/// `Z[zeta_4p]` otherwise.
pub fn embed_index(p: u64) -> u64 {
    if p == 2 {
        2
    } else {
        4 * p
    }
}

/// Canonical additive character of the big field: `chi1(x) = zeta_p^t(x)`.
pub fn chi1(spec: &TowerSpec, x: Elem) -> CycloInt {
    CycloInt::zeta_pow(chi_index(spec.p()), spec.absolute_trace(x)).expect("supported index")
}

/// Gauss sum of the quadratic character of the subfield `F_{p^d}` twisted
/// by F: `sum_{h != 0} eta(h) chi(F h)` with chi the canonical character
/// of the subfield, evaluated by exhaustive summation. Test oracle.
pub fn gauss_eta_brute(spec: &TowerSpec, f_elem: Elem, d: u32) -> Result<CycloInt> {
    if spec.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let m = chi_index(spec.p());
    let mut acc = CycloInt::zero(m)?;
    for h in spec.subfield_elements(d)? {
        if h.is_zero() {
            continue;
        }
        let eta = spec.quadratic_character_in(h, d)?;
        let t = spec.absolute_trace_in(spec.mul(f_elem, h), d)?;
        acc = acc.add(&CycloInt::zeta_pow(m, t)?.scale(eta))?;
    }
    Ok(acc)
}

/// Closed form for the quadratic Gauss sum over `F_{p^d}` twisted by F:
/// `0` if F = 0, else `(-1)^(d-1) * i^d? * p^(d/2) * eta(F)` with the
/// `p = 3 (mod 4)` factor read as `i^d`.
pub fn gauss_eta(spec: &TowerSpec, f_elem: Elem, d: u32) -> Result<ClosedValue> {
    let p = spec.p();
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if f_elem.is_zero() {
        return Ok(ClosedValue::zero(p));
    }
    let eta = spec.quadratic_character_in(f_elem, d)?;
    let sign = if d % 2 == 0 { -1 } else { 1 } * eta; // (-1)^(d-1) * eta(F)
    let i_pow = if p % 4 == 1 { 0 } else { d as u64 };
    Ok(ClosedValue::new(p, sign, i_pow, 0, d))
}

/// The trivial-character sum `sum_{h != 0} chi(F h)` over `F_{p^d}`:
/// `p^d - 1` if F = 0, else `-1`.
pub fn gauss_trivial(spec: &TowerSpec, f_elem: Elem, d: u32) -> i64 {
    if f_elem.is_zero() {
        gf::pow_u64(spec.p(), d) as i64 - 1
    } else {
        -1
    }
}

/// Exhaustive evaluation oracle for `sum_{h != 0 in F_{p^d}} chi(F h)`.
pub fn gauss_trivial_brute(spec: &TowerSpec, f_elem: Elem, d: u32) -> Result<CycloInt> {
    let m = chi_index(spec.p());
    let mut acc = CycloInt::zero(m)?;
    for h in spec.subfield_elements(d)? {
        if h.is_zero() {
            continue;
        }
        let t = spec.absolute_trace_in(spec.mul(f_elem, h), d)?;
        acc = acc.add(&CycloInt::zeta_pow(m, t)?)?;
    }
    Ok(acc)
}

/// Exact brute-force Weil sum `R(A,B,C) = sum_x chi1(A x^(q^r+1) + B x + C)`
/// over the whole big field, as an element of `Z[zeta_p]`.
pub fn weil_brute(spec: &TowerSpec, r: u32, a: Elem, b: Elem, c: Elem) -> CycloInt {
    let p = spec.p();
    let mut counts = vec![0i64; p as usize];
    for x in spec.enumerate() {
        let s = spec.mul(x, spec.frob_q(x, r)); // x^(q^r + 1)
        let arg = spec.add(spec.add(spec.mul(a, s), spec.mul(b, x)), c);
        counts[spec.absolute_trace(arg) as usize] += 1;
    }
    CycloInt::from_exponent_counts(chi_index(p), &counts).expect("supported index")
}

/// Which branch of the closed-form table fired; carried into reports so a
/// formula-level failure is attributable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeilBranch {
    /// ell/u odd, b = 0, p = 2: the sum vanishes.
    OddBZeroCharTwo,
    /// ell/u odd, b = 0, p odd.
    OddBZero,
    /// ell/u odd, b != 0, p = 2, trace condition fails: zero.
    OddCharTwoTraceMiss,
    /// ell/u odd, b != 0, p = 2, trace condition holds.
    OddCharTwo,
    /// ell/u odd, b != 0, p odd.
    OddCharOdd,
    /// ell/u even, f(x) = -b^(q^r) unsolvable: zero.
    EvenUnsolvable,
    /// ell/u even, f a permutation.
    EvenPermutation,
    /// ell/u even, f not a permutation but solvable.
    EvenSingular,
}

/// Closed form for `R(a,b,c)` (a != 0), dispatching on the parity of
/// ell/u, the characteristic, solvability of `f(x) = -b^(q^r)` and the
/// permutation property of `f(x) = a^(q^r) x^(q^2r) + a x`.
pub fn weil_closed(
    spec: &TowerSpec,
    r: u32,
    a: Elem,
    b: Elem,
    c: Elem,
) -> Result<(ClosedValue, WeilBranch)> {
    if a.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let p = spec.p();
    let n = spec.n();
    let ell = spec.ell();
    let u = gf::gcd(ell as u64, r as u64) as u32; // gcd(ell, 0) = ell
    let ell_over_u = ell / u;
    let t_c = spec.absolute_trace(c);

    if ell_over_u % 2 == 1 {
        if b.is_zero() {
            if p == 2 {
                return Ok((ClosedValue::zero(p), WeilBranch::OddBZeroCharTwo));
            }
            // (-1)^(n*ell - 1) q^(ell/2) eta1(a) chi1(c), with the extra
            // (-1)^(n*ell/2) for p = 3 (mod 4) read as i^(n*ell).
            let sign = parity_sign(n * ell + 1) * spec.quadratic_character(a)?;
            let i_pow = if p % 4 == 1 { 0 } else { (n * ell) as u64 };
            return Ok((
                ClosedValue::new(p, sign, i_pow, t_c, n * ell),
                WeilBranch::OddBZero,
            ));
        }
        if p == 2 {
            // R(a,b,c) = R(1, b a1^(-1), c) with a1^(q^r+1) = a.
            let e = q_pow_plus_one(spec, r);
            let a1 = spec.invert_exponent_solve(a, e)?;
            let b1 = spec.mul(b, spec.inv(a1)?);
            let tu = spec.trace_to(b1, n * u)?;
            if tu != Elem::ONE {
                return Ok((ClosedValue::zero(p), WeilBranch::OddCharTwoTraceMiss));
            }
            // b1 = w^(q^2r) + w + 1 for some w.
            let w = solve_double_frob(spec, r, spec.sub(b1, Elem::ONE))
                .ok_or_else(|| Error::Construction("trace condition held but w equation unsolvable".into()))?;
            let wq = spec.add(spec.mul(w, spec.frob_q(w, r)), w); // w^(q^r+1) + w
            // (2/(ell/u))^(nu): only the exponent parity matters.
            let jac_pow = if (n * u) % 2 == 0 {
                1
            } else {
                jacobi_two(ell_over_u as u64) as i64
            };
            let total = chi_sign_p2(spec, wq) * jac_pow * chi_sign_p2(spec, c);
            return Ok((
                ClosedValue::new(p, total, 0, 0, n * (ell + u)),
                WeilBranch::OddCharTwo,
            ));
        }
        // p odd, b != 0: x0 solves f(x) = -b^(q^r); f is a permutation here.
        let x0 = solve_f(spec, r, a, b)
            .particular
            .ok_or_else(|| Error::Construction("f is a permutation but solve failed".into()))?;
        let ax0 = spec.mul(a, spec.mul(x0, spec.frob_q(x0, r)));
        let sign = parity_sign(n * ell + 1) * spec.quadratic_character(spec.neg(a))?;
        let i_pow = if p % 4 == 1 { 0 } else { (3 * n * ell) as u64 };
        // conj(chi1(a x0^(q^r+1))) chi1(c) = zeta^(t(c) - t(a x0^(q^r+1)))
        let zeta = (t_c + p - spec.absolute_trace(ax0)) % p;
        return Ok((
            ClosedValue::new(p, sign, i_pow, zeta, n * ell),
            WeilBranch::OddCharOdd,
        ));
    }

    // ell/u even.
    let sol = solve_f(spec, r, a, b);
    let Some(x0) = sol.particular else {
        return Ok((ClosedValue::zero(p), WeilBranch::EvenUnsolvable));
    };
    let ax0 = spec.mul(a, spec.mul(x0, spec.frob_q(x0, r)));
    let zeta = (t_c + p - spec.absolute_trace(ax0)) % p;
    let half = ell / (2 * u);
    if sol.kernel_basis.is_empty() {
        Ok((
            ClosedValue::new(p, parity_sign(half), 0, zeta, n * ell),
            WeilBranch::EvenPermutation,
        ))
    } else {
        Ok((
            ClosedValue::new(p, parity_sign(half + 1), 0, zeta, n * (ell + 2 * u)),
            WeilBranch::EvenSingular,
        ))
    }
}

/// Embeds a closed value into `Z[zeta_4p]` (p odd) or `Z` (p = 2):
/// `i = zeta_4p^p`, `zeta_p = zeta_4p^4`, and `sqrt(p)` via the quadratic
/// Gauss sum `g = sum_t zeta_p^(t^2)` (`sqrt(p) = g` for p = 1 mod 4,
/// `-i*g` for p = 3 mod 4).
pub fn closed_to_cyclo(v: &ClosedValue) -> Result<CycloInt> {
    let p = v.p;
    let m = embed_index(p);
    if v.zero {
        return CycloInt::zero(m);
    }
    if p == 2 {
        // All char-2 closed values are rational integers.
        if v.sqrt_p_exp % 2 != 0 || v.i_pow != 0 {
            return Err(Error::Construction(format!(
                "non-integral closed value in characteristic 2: {v}"
            )));
        }
        let mag = num_bigint::BigInt::from(2).pow(v.sqrt_p_exp / 2);
        let signed = if v.sign < 0 { -mag } else { mag };
        let val = if v.zeta_exp % 2 == 1 { -signed } else { signed };
        return CycloInt::from_integer(2, val);
    }
    let mut acc = CycloInt::from_integer(m, v.sign as i64)?;
    if v.i_pow == 1 {
        acc = acc.mul(&CycloInt::zeta_pow(m, p)?)?;
    }
    if v.zeta_exp != 0 {
        acc = acc.mul(&CycloInt::zeta_pow(m, 4 * v.zeta_exp)?)?;
    }
    let int_part = num_bigint::BigInt::from(p).pow(v.sqrt_p_exp / 2);
    acc = acc.scale(int_part);
    if v.sqrt_p_exp % 2 == 1 {
        acc = acc.mul(&sqrt_p_embedding(p)?)?;
    }
    Ok(acc)
}

/// `sqrt(p)` as an element of `Z[zeta_4p]`.
pub fn sqrt_p_embedding(p: u64) -> Result<CycloInt> {
    let m = embed_index(p);
    let mut g = CycloInt::zero(m)?;
    for t in 0..p {
        g = g.add(&CycloInt::zeta_pow(m, 4 * (t * t % p))?)?;
    }
    if p % 4 == 1 {
        Ok(g)
    } else {
        // sqrt(p) = -i * g since g = i sqrt(p) for p = 3 (mod 4).
        let minus_i = CycloInt::zeta_pow(m, p)?.neg();
        g.mul(&minus_i)
    }
}

/// The Jacobi symbol (2/v) for odd v: +1 iff v = +-1 (mod 8).
pub fn jacobi_two(v: u64) -> i32 {
    debug_assert!(v % 2 == 1);
    match v % 8 {
        1 | 7 => 1,
        _ => -1,
    }
}

/// `q^r + 1` as an integer exponent, with the Frobenius index reduced
/// mod ell (same function on the big field, and keeps gcd with Q-1).
pub fn q_pow_plus_one(spec: &TowerSpec, r: u32) -> u128 {
    (spec.q() as u128).pow(r % spec.ell()) + 1
}

/// Solves `f(x) = -b^(q^r)` for `f(x) = a^(q^r) x^(q^2r) + a x`.
pub fn solve_f(spec: &TowerSpec, r: u32, a: Elem, b: Elem) -> gf::LinearSolution {
    let aq = spec.frob_q(a, r);
    let rhs = spec.neg(spec.frob_q(b, r));
    gf::solve_linear_map(
        spec,
        |x| spec.add(spec.mul(aq, spec.frob_q(x, 2 * r)), spec.mul(a, x)),
        rhs,
    )
}

/// Solves `w^(q^2r) + w = rhs`, returning the least solution if any.
pub fn solve_double_frob(spec: &TowerSpec, r: u32, rhs: Elem) -> Option<Elem> {
    gf::solve_linear_map(spec, |x| spec.add(spec.frob_q(x, 2 * r), x), rhs).particular
}

fn parity_sign(e: u32) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `chi1` in characteristic 2 is just a sign.
fn chi_sign_p2(spec: &TowerSpec, x: Elem) -> i64 {
    if spec.absolute_trace(x) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn chi1_basics() {
        let f8 = TowerSpec::new(2, 1, 3).unwrap();
        assert_eq!(
            chi1(&f8, Elem::ZERO).as_rational_integer(),
            Some(BigInt::from(1))
        );
        assert_eq!(
            chi1(&f8, Elem::ONE).as_rational_integer(),
            Some(BigInt::from(-1))
        );
    }

    #[test]
    fn chi1_orthogonality() {
        for (p, n, ell) in [(2u64, 1u32, 3u32), (3, 1, 2), (2, 2, 3), (5, 1, 2)] {
            let f = TowerSpec::new(p, n, ell).unwrap();
            let mut acc = CycloInt::zero(chi_index(p)).unwrap();
            for x in f.enumerate() {
                acc = acc.add(&chi1(&f, x)).unwrap();
            }
            assert!(acc.is_zero(), "p={p} n={n} ell={ell}");
        }
    }

    #[test]
    fn gauss_trivial_matches_brute() {
        for (p, n, ell) in [(2u64, 2u32, 2u32), (3, 1, 2), (2, 1, 4), (2, 4, 2)] {
            let f = TowerSpec::new(p, n, ell).unwrap();
            for fe in f.subfield_elements(n).unwrap() {
                let brute = gauss_trivial_brute(&f, fe, n).unwrap();
                assert_eq!(
                    brute.as_rational_integer(),
                    Some(BigInt::from(gauss_trivial(&f, fe, n)))
                );
            }
        }
    }

    #[test]
    fn gauss_eta_matches_brute() {
        for (p, n, ell) in [(3u64, 1u32, 2u32), (5, 1, 2), (3, 2, 2), (7, 1, 2), (13, 1, 2)] {
            let f = TowerSpec::new(p, n, ell).unwrap();
            for fe in f.subfield_elements(n).unwrap() {
                let brute = gauss_eta_brute(&f, fe, n).unwrap().lift_to(embed_index(p)).unwrap();
                let closed = closed_to_cyclo(&gauss_eta(&f, fe, n).unwrap()).unwrap();
                assert_eq!(brute, closed, "p={p} n={n} F={fe:?}");
            }
        }
    }

    #[test]
    fn gauss_eta_zero_and_norm() {
        let f = TowerSpec::new(3, 1, 2).unwrap();
        let z = gauss_eta(&f, Elem::ZERO, 1).unwrap();
        assert!(z.zero);
        let g = gauss_eta(&f, Elem::ONE, 1).unwrap();
        let emb = closed_to_cyclo(&g).unwrap();
        assert_eq!(
            emb.norm_sq().as_rational_integer(),
            Some(BigInt::from(3))
        );
    }

    #[test]
    fn sqrt_p_squares_to_p() {
        for p in [3u64, 5, 7, 11, 13] {
            let s = sqrt_p_embedding(p).unwrap();
            assert_eq!(
                s.mul(&s).unwrap().as_rational_integer(),
                Some(BigInt::from(p)),
                "p={p}"
            );
        }
    }

    #[test]
    fn weil_degenerate_cases() {
        let f = TowerSpec::new(3, 1, 2).unwrap();
        // A = B = 0: constant summand Q*chi1(C)
        for c in f.enumerate() {
            let v = weil_brute(&f, 1, Elem::ZERO, Elem::ZERO, c);
            let expect = chi1(&f, c).scale(f.order() as i64);
            assert_eq!(v, expect);
        }
        // A = 0, B != 0: orthogonality
        let v = weil_brute(&f, 1, Elem::ZERO, Elem::ONE, Elem::ZERO);
        assert!(v.is_zero());
    }

    #[test]
    fn closed_matches_brute_exhaustive_f8() {
        let f = TowerSpec::new(2, 1, 3).unwrap();
        for r in 0..=3u32 {
            for a in f.enumerate().skip(1) {
                for b in f.enumerate() {
                    for c in f.enumerate() {
                        let brute = weil_brute(&f, r, a, b, c).lift_to(2).unwrap();
                        let (cv, _) = weil_closed(&f, r, a, b, c).unwrap();
                        let closed = closed_to_cyclo(&cv).unwrap();
                        assert_eq!(brute, closed, "r={r} a={a:?} b={b:?} c={c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_matches_brute_exhaustive_f9() {
        let f = TowerSpec::new(3, 1, 2).unwrap();
        let m = embed_index(3);
        for r in 0..=2u32 {
            for a in f.enumerate().skip(1) {
                for b in f.enumerate() {
                    for c in f.enumerate() {
                        let brute = weil_brute(&f, r, a, b, c).lift_to(m).unwrap();
                        let (cv, br) = weil_closed(&f, r, a, b, c).unwrap();
                        let closed = closed_to_cyclo(&cv).unwrap();
                        assert_eq!(brute, closed, "r={r} a={a:?} b={b:?} c={c:?} branch={br:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_matches_brute_exhaustive_f27() {
        // covers the odd-characteristic branches with n*ell odd
        let f = TowerSpec::new(3, 1, 3).unwrap();
        let m = embed_index(3);
        for r in 0..=3u32 {
            for a in f.enumerate().skip(1) {
                for b in f.enumerate() {
                    for c in f.enumerate() {
                        let brute = weil_brute(&f, r, a, b, c).lift_to(m).unwrap();
                        let (cv, br) = weil_closed(&f, r, a, b, c).unwrap();
                        let closed = closed_to_cyclo(&cv).unwrap();
                        assert_eq!(brute, closed, "r={r} a={a:?} b={b:?} c={c:?} branch={br:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_symbol_table() {
        assert_eq!(jacobi_two(1), 1);
        assert_eq!(jacobi_two(3), -1);
        assert_eq!(jacobi_two(5), -1);
        assert_eq!(jacobi_two(7), 1);
        assert_eq!(jacobi_two(9), 1);
    }
}
