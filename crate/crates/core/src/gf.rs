//! The field tower `F_p <= F_q <= F_{q^ell}` and its exact arithmetic.
//!
//! A single absolute extension `F_p[X]/(modulus)` of degree `m = n*ell`
//! carries the whole tower; `F_q` is the fixed field of the q-power
//! Frobenius. Elements are indices in `[0, Q)` packing the coefficient
//! vector `(c_0, ..., c_{m-1})` as base-p digits with `c_0` least
//! significant, so the constant `k` has index `k` and enumeration order
//! starts `0, 1, ...`. Multiplication goes through discrete-log tables
//! built once per [`TowerSpec`]; everything downstream is table lookups.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An element of the big field, as an index into the spec's tables.
///
/// The index packs the coefficient vector in the power basis of the
/// modulus, base p, low-degree coordinate least significant. Ordering on
/// `Elem` is the element ordering used everywhere a deterministic
/// ("lex-least") choice is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serializable description of the field, embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpecRecord {
    pub p: u64,
    pub n: u32,
    pub ell: u32,
    /// Ascending coefficients of the monic irreducible modulus over F_p.
    pub modulus: Vec<u64>,
}

/// Largest supported field order. The spec's tables are O(Q); fields past
/// this point are out of scope for the exhaustive verifier anyway.
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

/// The tower `F_p <= F_q <= F_{q^ell}`, immutable after construction.
pub struct TowerSpec {
    p: u64,
    n: u32,
    ell: u32,
    m: u32,
    q: u64,
    order: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    frob_p: Vec<u32>,
    abs_trace: Vec<u32>,
    trace_q: Vec<u32>,
    generator: Elem,
}

impl TowerSpec {
    /// Builds the tower with the deterministic (least-index) irreducible
    /// modulus of degree `n*ell` over F_p.
    pub fn new(p: u64, n: u32, ell: u32) -> Result<TowerSpec> {
        let modulus = find_irreducible(p, n * ell)?;
        TowerSpec::with_modulus(p, n, ell, modulus)
    }

    /// Builds the tower from an explicit modulus, validating it.
    pub fn with_modulus(p: u64, n: u32, ell: u32, modulus: Vec<u64>) -> Result<TowerSpec> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("p = {p} is not prime")));
        }
        if n == 0 || ell < 2 {
            return Err(Error::InvalidField(format!(
                "need n >= 1 and ell >= 2, got n = {n}, ell = {ell}"
            )));
        }
        let m = n * ell;
        let order = checked_pow(p, m)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or_else(|| {
                Error::InvalidField(format!(
                    "field order p^(n*ell) = {p}^{m} exceeds the supported bound {MAX_FIELD_ORDER}"
                ))
            })?;
        if modulus.len() != m as usize + 1
            || modulus[m as usize] != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(Error::InvalidField(format!(
                "modulus must be monic of degree {m} with coefficients in [0, {p})"
            )));
        }
        if !fppoly::is_irreducible(p, &modulus) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let q = p.pow(n);

        let mut spec = TowerSpec {
            p,
            n,
            ell,
            m,
            q,
            order,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            frob_p: Vec::new(),
            abs_trace: Vec::new(),
            trace_q: Vec::new(),
            generator: Elem::ZERO,
        };
        spec.build_log_tables();
        spec.build_frobenius_and_traces();
        Ok(spec)
    }

    pub fn from_record(rec: &FieldSpecRecord) -> Result<TowerSpec> {
        TowerSpec::with_modulus(rec.p, rec.n, rec.ell, rec.modulus.clone())
    }

    pub fn record(&self) -> FieldSpecRecord {
        FieldSpecRecord {
            p: self.p,
            n: self.n,
            ell: self.ell,
            modulus: self.modulus.clone(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn ell(&self) -> u32 {
        self.ell
    }
    /// Degree of the big field over F_p.
    pub fn degree(&self) -> u32 {
        self.m
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Order Q = q^ell of the big field.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn generator(&self) -> Elem {
        self.generator
    }

    fn build_log_tables(&mut self) {
        let q1 = self.order - 1;
        let prime_factors = prime_factors(q1);
        // Generator search needs multiplication before the tables exist;
        // bootstrap with direct polynomial arithmetic mod the modulus.
        let pow_idx = |base: u64, mut e: u64| -> u64 {
            let mut acc = fppoly::constant(1);
            let mut b = fppoly::from_index(self.p, self.m, base);
            while e > 0 {
                if e & 1 == 1 {
                    acc = fppoly::mul_mod(self.p, &acc, &b, &self.modulus);
                }
                b = fppoly::mul_mod(self.p, &b, &b, &self.modulus);
                e >>= 1;
            }
            fppoly::to_index(self.p, &acc)
        };
        let mut gen = 0u64;
        for cand in 2..self.order {
            if prime_factors.iter().all(|&f| pow_idx(cand, q1 / f) != 1) {
                gen = cand;
                break;
            }
        }
        assert!(gen != 0, "multiplicative group has a generator");
        self.generator = Elem(gen as u32);

        let g = fppoly::from_index(self.p, self.m, gen);
        let mut exp = vec![0u32; q1 as usize];
        let mut log = vec![0u32; self.order as usize];
        let mut cur = fppoly::constant(1);
        for (i, slot) in exp.iter_mut().enumerate() {
            let idx = fppoly::to_index(self.p, &cur);
            *slot = idx as u32;
            log[idx as usize] = i as u32;
            cur = fppoly::mul_mod(self.p, &cur, &g, &self.modulus);
        }
        self.exp = exp;
        self.log = log;
    }

    fn build_frobenius_and_traces(&mut self) {
        // x -> x^p is F_p-linear; image of the basis determines the table.
        let mut basis_p = Vec::with_capacity(self.m as usize);
        for i in 0..self.m {
            let b = Elem(pow_u64(self.p, i) as u32);
            basis_p.push(self.pow(b, self.p as u128));
        }
        let mut frob_p = vec![0u32; self.order as usize];
        for x in 0..self.order {
            let mut acc = Elem::ZERO;
            let mut rem = x;
            for img in &basis_p {
                let digit = rem % self.p;
                rem /= self.p;
                if digit != 0 {
                    acc = self.add(acc, self.mul(*img, Elem(digit as u32)));
                }
            }
            frob_p[x as usize] = acc.0;
        }
        self.frob_p = frob_p;

        let mut abs_trace = vec![0u32; self.order as usize];
        let mut trace_q = vec![0u32; self.order as usize];
        for x in 0..self.order as usize {
            let mut t = x as u32;
            let mut cur = x as u32;
            for _ in 1..self.m {
                cur = self.frob_p[cur as usize];
                t = self.add(Elem(t), Elem(cur)).0;
            }
            abs_trace[x] = t;

            let mut tq = x as u32;
            let mut curq = x as u32;
            for _ in 1..self.ell {
                for _ in 0..self.n {
                    curq = self.frob_p[curq as usize];
                }
                tq = self.add(Elem(tq), Elem(curq)).0;
            }
            trace_q[x] = tq;
        }
        self.abs_trace = abs_trace;
        self.trace_q = trace_q;
    }

    // ---- element <-> coefficient vector ----

    /// Coefficients `(c_0, ..., c_{m-1})` of `x` in the power basis.
    pub fn coeffs(&self, x: Elem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.m as usize);
        let mut rem = x.0 as u64;
        for _ in 0..self.m {
            out.push(rem % self.p);
            rem /= self.p;
        }
        out
    }

    pub fn elem_from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        if coeffs.len() > self.m as usize {
            return Err(Error::InvalidElement(format!(
                "{} coefficients given, field has degree {}",
                coeffs.len(),
                self.m
            )));
        }
        let mut idx = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(Error::InvalidElement(format!(
                    "coefficient {c} is out of range [0, {})",
                    self.p
                )));
            }
            idx += c * pow_u64(self.p, i as u32);
        }
        Ok(Elem(idx as u32))
    }

    /// The scalar `k mod p` as a field element.
    pub fn scalar(&self, k: u64) -> Elem {
        Elem((k % self.p) as u32)
    }

    /// All Q elements in increasing index order.
    pub fn enumerate(&self) -> impl Iterator<Item = Elem> {
        (0..self.order as u32).map(Elem)
    }

    // ---- arithmetic ----

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        if self.p == 2 {
            return Elem(x.0 ^ y.0);
        }
        let (mut xs, mut ys) = (x.0 as u64, y.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        while xs != 0 || ys != 0 {
            let d = (xs % self.p + ys % self.p) % self.p;
            out += d * place;
            place *= self.p;
            xs /= self.p;
            ys /= self.p;
        }
        Elem(out as u32)
    }

    pub fn neg(&self, x: Elem) -> Elem {
        if self.p == 2 {
            return x;
        }
        let mut xs = x.0 as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        while xs != 0 {
            let d = xs % self.p;
            if d != 0 {
                out += (self.p - d) * place;
            }
            place *= self.p;
            xs /= self.p;
        }
        Elem(out as u32)
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x.is_zero() || y.is_zero() {
            return Elem::ZERO;
        }
        let q1 = self.order - 1;
        let s = (self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64) % q1;
        Elem(self.exp[s as usize])
    }

    pub fn inv(&self, x: Elem) -> Result<Elem> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let q1 = self.order - 1;
        let s = (q1 - self.log[x.0 as usize] as u64) % q1;
        Ok(Elem(self.exp[s as usize]))
    }

    /// Square-and-multiply is bypassed: with log tables `x^e` is a single
    /// exponent reduction mod Q-1.
    pub fn pow(&self, x: Elem, e: u128) -> Elem {
        if x.is_zero() {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let q1 = (self.order - 1) as u128;
        let s = (self.log[x.0 as usize] as u128 * (e % q1)) % q1;
        Elem(self.exp[s as usize])
    }

    /// `x^(p^k)`.
    pub fn frob(&self, x: Elem, k: u32) -> Elem {
        let mut cur = x.0;
        for _ in 0..(k % self.m) {
            cur = self.frob_p[cur as usize];
        }
        Elem(cur)
    }

    /// `x^(q^j)`, the j-th power of the q-Frobenius.
    pub fn frob_q(&self, x: Elem, j: u32) -> Elem {
        self.frob(x, (j % self.ell) * self.n)
    }

    // ---- traces, subfields, characters ----

    /// Trace between subfields: `sum x^(p^(to_d * i))` over the Galois
    /// orbit of `F_{p^from_d} / F_{p^to_d}`. Requires `x` in the source
    /// subfield.
    pub fn trace_map(&self, x: Elem, from_d: u32, to_d: u32) -> Result<Elem> {
        if to_d == 0 || from_d % to_d != 0 || self.m % from_d != 0 {
            return Err(Error::NonDivisorDegree(to_d, from_d));
        }
        debug_assert!(self.in_subfield(x, from_d));
        let mut acc = x;
        let mut cur = x;
        for _ in 1..(from_d / to_d) {
            cur = self.frob(cur, to_d);
            acc = self.add(acc, cur);
        }
        Ok(acc)
    }

    /// Trace from the big field to the subfield of degree `target_d` over
    /// F_p.
    pub fn trace_to(&self, x: Elem, target_d: u32) -> Result<Elem> {
        self.trace_map(x, self.m, target_d)
    }

    /// The trace T to F_q, from the precomputed table.
    pub fn trace_q(&self, x: Elem) -> Elem {
        Elem(self.trace_q[x.0 as usize])
    }

    /// Absolute trace t to F_p, read as an integer in [0, p).
    pub fn absolute_trace(&self, x: Elem) -> u64 {
        self.abs_trace[x.0 as usize] as u64
    }

    /// Absolute trace of `x` computed within the subfield `F_{p^d}`
    /// (the sum runs over the Galois group of `F_{p^d} / F_p` only).
    pub fn absolute_trace_in(&self, x: Elem, d: u32) -> Result<u64> {
        Ok(self.trace_map(x, d, 1)?.0 as u64)
    }

    /// True iff `x` lies in the subfield of degree `d` over F_p.
    pub fn in_subfield(&self, x: Elem, d: u32) -> bool {
        if x.is_zero() {
            return true;
        }
        let sub_order = pow_u64(self.p, d) - 1;
        (self.log[x.0 as usize] as u64) % ((self.order - 1) / gcd(self.order - 1, sub_order)) == 0
    }

    /// All elements of the degree-`d` subfield, in increasing index order.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<Elem>> {
        if d == 0 || self.m % d != 0 {
            return Err(Error::NonDivisorDegree(d, self.m));
        }
        let sub_order = pow_u64(self.p, d);
        let step = (self.order - 1) / (sub_order - 1);
        let mut out: Vec<Elem> = std::iter::once(Elem::ZERO)
            .chain((0..sub_order - 1).map(|i| Elem(self.exp[(i * step) as usize])))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Quadratic character of the big field: 0 on 0, +1 on nonzero
    /// squares, -1 otherwise. Characteristic 2 is a reported error.
    pub fn quadratic_character(&self, x: Elem) -> Result<i64> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if x.is_zero() {
            return Ok(0);
        }
        Ok(if self.log[x.0 as usize] % 2 == 0 { 1 } else { -1 })
    }

    /// Quadratic character of the subfield `F_{p^d}`, for `x` in it.
    pub fn quadratic_character_in(&self, x: Elem, d: u32) -> Result<i64> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if x.is_zero() {
            return Ok(0);
        }
        debug_assert!(self.in_subfield(x, d));
        let step = (self.order - 1) / (pow_u64(self.p, d) - 1);
        Ok(if (self.log[x.0 as usize] as u64 / step) % 2 == 0 {
            1
        } else {
            -1
        })
    }

    /// The unique e-th root of `a` when `gcd(e, Q-1) = 1`: `a^(e^-1 mod Q-1)`.
    pub fn invert_exponent_solve(&self, a: Elem, e: u128) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::ZeroRoot(e));
        }
        let q1 = (self.order - 1) as u128;
        let inv = mod_inverse(e % q1, q1).ok_or(Error::NonInvertibleExponent(e, self.order - 1))?;
        Ok(self.pow(a, inv))
    }
}

impl std::fmt::Debug for TowerSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TowerSpec")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("ell", &self.ell)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// `L(x) = sum b_i x^(q^i)`, a q-linearized polynomial over the big field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    pub coeffs: Vec<Elem>,
}

impl LinearizedPoly {
    pub fn new(coeffs: Vec<Elem>) -> LinearizedPoly {
        LinearizedPoly { coeffs }
    }

    pub fn eval(&self, spec: &TowerSpec, x: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        let mut fx = x;
        for (i, &b) in self.coeffs.iter().enumerate() {
            if i > 0 {
                fx = self.frob_step(spec, fx);
            }
            acc = spec.add(acc, spec.mul(b, fx));
        }
        acc
    }

    fn frob_step(&self, spec: &TowerSpec, x: Elem) -> Elem {
        spec.frob(x, spec.n())
    }
}

///// Solution set of an F_p-linear equation `L(x) = rhs`: a deterministic
/// particular solution plus a kernel basis, or `None` when unsolvable.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub particular: Option<Elem>,
    pub kernel_basis: Vec<Elem>,
}

impl LinearSolution {
    pub fn solution_count(&self, p: u64) -> u64 {
        if self.particular.is_none() {
            0
        } else {
            pow_u64(p, self.kernel_basis.len() as u32)
        }
    }

    /// Enumerates the full solution set (particular + kernel span).
    pub fn solutions(&self, spec: &TowerSpec) -> Vec<Elem> {
        let Some(x0) = self.particular else {
            return Vec::new();
        };
        let mut out = vec![x0];
        for &k in &self.kernel_basis {
            let prev = out.clone();
            let mut shifted = k;
            for _ in 1..spec.p() {
                out.extend(prev.iter().map(|&s| spec.add(s, shifted)));
                shifted = spec.add(shifted, k);
            }
        }
        out
    }
}

/// Solves `map(x) = rhs` for an arbitrary F_p-linear map by Gaussian
/// elimination on its matrix in the power basis. The particular solution
/// is the least element (by index) of the solution set.
pub fn solve_linear_map<F>(spec: &TowerSpec, map: F, rhs: Elem) -> LinearSolution
where
    F: Fn(Elem) -> Elem,
{
    let m = spec.degree() as usize;
    let p = spec.p();
    // Columns are images of the basis; rows are power-basis coordinates.
    let mut a = vec![vec![0u64; m]; m];
    for j in 0..m {
        let img = map(Elem(pow_u64(p, j as u32) as u32));
        for (i, c) in spec.coeffs(img).into_iter().enumerate() {
            a[i][j] = c;
        }
    }
    let mut b = spec.coeffs(rhs);

    // Forward elimination with partial pivoting over F_p.
    let mut pivot_col_of_row = vec![usize::MAX; m];
    let mut row = 0usize;
    for col in 0..m {
        let Some(pr) = (row..m).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, pr);
        b.swap(row, pr);
        let inv = mod_inverse(a[row][col] as u128, p as u128).unwrap() as u64;
        for c in 0..m {
            a[row][c] = a[row][c] * inv % p;
        }
        b[row] = b[row] * inv % p;
        for r in 0..m {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..m {
                    a[r][c] = (a[r][c] + (p - f) * a[row][c]) % p;
                }
                b[r] = (b[r] + (p - f) * b[row]) % p;
            }
        }
        pivot_col_of_row[row] = col;
        row += 1;
        if row == m {
            break;
        }
    }
    let rank = row;
    if (rank..m).any(|r| b[r] != 0) {
        return LinearSolution {
            particular: None,
            kernel_basis: kernel_from_rref(spec, &a, &pivot_col_of_row, rank),
        };
    }
    let mut x = vec![0u64; m];
    for r in 0..rank {
        x[pivot_col_of_row[r]] = b[r];
    }
    let kernel_basis = kernel_from_rref(spec, &a, &pivot_col_of_row, rank);
    let particular = spec.elem_from_coeffs(&x).unwrap();
    LinearSolution {
        particular: Some(least_in_coset(spec, particular, &kernel_basis)),
        kernel_basis,
    }
}

fn kernel_from_rref(
    spec: &TowerSpec,
    a: &[Vec<u64>],
    pivot_col_of_row: &[usize],
    rank: usize,
) -> Vec<Elem> {
    let m = spec.degree() as usize;
    let p = spec.p();
    let pivot_cols: Vec<usize> = pivot_col_of_row[..rank].to_vec();
    let mut basis = Vec::new();
    for free in (0..m).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![0u64; m];
        v[free] = 1;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            if a[r][free] != 0 {
                v[pc] = (p - a[r][free]) % p;
            }
        }
        basis.push(spec.elem_from_coeffs(&v).unwrap());
    }
    basis
}

/// Least element (by index) in `x0 + span(kernel)`.
fn least_in_coset(spec: &TowerSpec, x0: Elem, kernel: &[Elem]) -> Elem {
    if kernel.is_empty() {
        return x0;
    }
    // Echelonize kernel vectors on the most significant coordinate, then
    // greedily zero the pivot digits of x0; base-p positional weight makes
    // the greedy choice optimal.
    let m = spec.degree() as usize;
    let p = spec.p();
    let mut rows: Vec<Vec<u64>> = kernel.iter().map(|&k| spec.coeffs(k)).collect();
    let mut x = spec.coeffs(x0);
    let mut used = vec![false; rows.len()];
    for coord in (0..m).rev() {
        let Some(ri) = (0..rows.len()).find(|&r| !used[r] && rows[r][coord] != 0) else {
            continue;
        };
        used[ri] = true;
        let inv = mod_inverse(rows[ri][coord] as u128, p as u128).unwrap() as u64;
        for c in 0..m {
            rows[ri][c] = rows[ri][c] * inv % p;
        }
        for r in 0..rows.len() {
            if r != ri && rows[r][coord] != 0 {
                let f = rows[r][coord];
                for c in 0..m {
                    rows[r][c] = (rows[r][c] + (p - f) * rows[ri][c]) % p;
                }
            }
        }
        if x[coord] != 0 {
            let f = x[coord];
            for c in 0..m {
                x[c] = (x[c] + (p - f) * rows[ri][c]) % p;
            }
        }
    }
    spec.elem_from_coeffs(&x).unwrap()
}

/// Solves `L(x) = rhs` for a linearized polynomial.
pub fn solve_linearized(spec: &TowerSpec, l: &LinearizedPoly, rhs: Elem) -> LinearSolution {
    solve_linear_map(spec, |x| l.eval(spec, x), rhs)
}

/// True iff the map has trivial kernel (equivalently, permutes the field).
pub fn is_permutation<F>(spec: &TowerSpec, map: F) -> bool
where
    F: Fn(Elem) -> Elem,
{
    solve_linear_map(spec, map, Elem::ZERO).kernel_basis.is_empty()
}

/// The least monic irreducible polynomial of degree `m` over F_p, where
/// polynomials are ordered by their base-p coefficient packing (constant
/// term least significant). Deterministic, so runs are reproducible.
pub fn find_irreducible(p: u64, m: u32) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("p = {p} is not prime")));
    }
    if m == 0 {
        return Err(Error::InvalidField("degree must be positive".into()));
    }
    let count = checked_pow(p, m).ok_or_else(|| {
        Error::InvalidField(format!("p^{m} overflows the candidate space"))
    })?;
    for idx in 0..count {
        let mut poly = Vec::with_capacity(m as usize + 1);
        let mut rem = idx;
        for _ in 0..m {
            poly.push(rem % p);
            rem /= p;
        }
        poly.push(1); // monic
        if fppoly::is_irreducible(p, &poly) {
            return Ok(poly);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Dense polynomial arithmetic over F_p, used only to bootstrap the field
/// tables and to test moduli for irreducibility.
mod fppoly {
    use super::{mod_inverse, prime_factors};

    pub fn constant(c: u64) -> Vec<u64> {
        vec![c]
    }

    /// Degree-`m` coefficient vector from a base-p packed index (no monic
    /// leading term).
    pub fn from_index(p: u64, m: u32, mut idx: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(m as usize);
        for _ in 0..m {
            out.push(idx % p);
            idx /= p;
        }
        trim(&mut out);
        out
    }

    pub fn to_index(p: u64, poly: &[u64]) -> u64 {
        poly.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn trim(poly: &mut Vec<u64>) {
        while poly.len() > 1 && *poly.last().unwrap() == 0 {
            poly.pop();
        }
    }

    pub fn is_zero(poly: &[u64]) -> bool {
        poly.iter().all(|&c| c == 0)
    }

    pub fn mul_mod(p: u64, a: &[u64], b: &[u64], modulus: &[u64]) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        rem(p, prod, modulus)
    }

    pub fn rem(p: u64, mut a: Vec<u64>, modulus: &[u64]) -> Vec<u64> {
        let md = modulus.len() - 1;
        debug_assert_eq!(modulus[md], 1, "modulus must be monic");
        while a.len() > md {
            let lead = *a.last().unwrap();
            let shift = a.len() - 1 - md;
            if lead != 0 {
                for (k, &mc) in modulus.iter().enumerate().take(md) {
                    let pos = shift + k;
                    a[pos] = (a[pos] + (p - lead % p) * mc) % p;
                }
            }
            a.pop();
        }
        trim(&mut a);
        a
    }

    pub fn pow_mod(p: u64, base: &[u64], mut e: u64, modulus: &[u64]) -> Vec<u64> {
        let mut acc = constant(1);
        let mut b = rem(p, base.to_vec(), modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(p, &acc, &b, modulus);
            }
            b = mul_mod(p, &b, &b, modulus);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(p: u64, mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
        while !is_zero(&b) {
            // Make b monic so it can serve as a reduction modulus.
            let lead = *b.last().unwrap();
            if lead != 1 {
                let inv = mod_inverse(lead as u128, p as u128).unwrap() as u64;
                for c in b.iter_mut() {
                    *c = *c * inv % p;
                }
            }
            let r = rem(p, a, &b);
            a = b;
            b = r;
        }
        trim(&mut a);
        a
    }

    /// Standard gcd-with-Frobenius irreducibility test: f of degree m is
    /// irreducible iff x^(p^m) = x mod f and gcd(x^(p^(m/t)) - x, f) = 1
    /// for every prime t | m.
    pub fn is_irreducible(p: u64, f: &[u64]) -> bool {
        let m = (f.len() - 1) as u32;
        if m == 0 {
            return false;
        }
        if m == 1 {
            return true;
        }
        let x = vec![0, 1];
        let frob_pow = |d: u32| {
            // x^(p^d) mod f by repeated p-th powering.
            let mut cur = x.clone();
            for _ in 0..d {
                cur = pow_mod(p, &cur, p, f);
            }
            cur
        };
        let sub = |a: &[u64], b: &[u64]| {
            let mut out = vec![0u64; a.len().max(b.len())];
            for (i, o) in out.iter_mut().enumerate() {
                let av = a.get(i).copied().unwrap_or(0);
                let bv = b.get(i).copied().unwrap_or(0);
                *o = (av + p - bv) % p;
            }
            trim_owned(out)
        };
        let top = frob_pow(m);
        if sub(&top, &x) != constant(0) {
            return false;
        }
        for t in prime_factors(m as u64) {
            let h = sub(&frob_pow(m / t as u32), &x);
            let g = gcd(p, f.to_vec(), h);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    fn trim_owned(mut v: Vec<u64>) -> Vec<u64> {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        v
    }
}

// ---- small integer helpers ----

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.pow(exp)
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u128)
}

/// Floor of the integer square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
