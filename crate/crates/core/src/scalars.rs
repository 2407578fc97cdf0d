//! Exact arithmetic in the perfect field `F_{p^m}` and in the ring `W₂(k)` of
//! length-two Witt vectors over it.
//!
//! Field elements are plain `Copy` values; every operation goes through the
//! [`Field`] context that owns the characteristic, the extension modulus and a
//! few precomputed tables.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::error::{Error, Result};

/// Largest supported extension degree `m`.
pub const MAX_EXT_DEGREE: usize = 8;

/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u32 = 1 << 15;

/// An element of `F_{p^m}`, stored as the coefficient vector of a polynomial
/// in the generator `t` of degree `< m`. Unused slots are always zero, so
/// equality is structural.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq([u16; MAX_EXT_DEGREE]);

impl Fq {
    pub const ZERO: Fq = Fq([0; MAX_EXT_DEGREE]);

    pub fn coeff(&self, i: usize) -> u32 {
        self.0[i] as u32
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    fn prime(r: u32) -> Fq {
        let mut c = [0u16; MAX_EXT_DEGREE];
        c[0] = r as u16;
        Fq(c)
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).unwrap_or(0);
        write!(f, "Fq{:?}", &self.0[..=last])
    }
}

/// Characteristic, extension modulus and cached tables of a finite field.
pub struct FieldParams {
    p: u32,
    m: usize,
    /// Monic modulus, low degree first, length `m + 1`. `[0, 1]` when `m = 1`.
    modulus: Vec<u32>,
    p2: u64,
    /// `(-1)^k / k mod p` for `k = 1..p`, the coefficients of the Witt carry
    /// `(a^p + b^p - (a+b)^p) / p = Σ_k carry[k] a^k b^{p-k}`.
    carry: Vec<u32>,
    /// `k! mod p²` for `k < 2p`; larger factorials vanish mod `p²`.
    fact_p2: Vec<u64>,
    /// Pascal triangle mod `p²`, grown on demand.
    binom: RwLock<Vec<Vec<u32>>>,
}

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldParams")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Shared handle on [`FieldParams`]; cheap to clone.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldParams>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

/// Built-in irreducible moduli (low degree first) used when an input file asks
/// for an extension field without supplying one.
pub fn builtin_modulus(p: u32, m: usize) -> Option<Vec<u32>> {
    match (p, m) {
        (2, 2) => Some(vec![1, 1, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        (5, 2) => Some(vec![2, 0, 1]),
        _ => None,
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// `F_{p^m}` defined by `modulus` (monic, low degree first). For `m > 1`
    /// and no modulus, the built-in table is consulted.
    pub fn new(p: u32, m: usize, modulus: Option<Vec<u32>>) -> Result<Field> {
        if !(2..=MAX_CHARACTERISTIC).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidParams(format!(
                "characteristic {p} is not a prime in [2, 2^15]"
            )));
        }
        if m == 0 || m > MAX_EXT_DEGREE {
            return Err(Error::InvalidParams(format!(
                "extension degree {m} outside [1, {MAX_EXT_DEGREE}]"
            )));
        }
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            let modulus = match modulus {
                Some(md) => md,
                None => builtin_modulus(p, m).ok_or_else(|| {
                    Error::InvalidParams(format!("no built-in modulus for p = {p}, m = {m}"))
                })?,
            };
            let modulus: Vec<u32> = modulus.into_iter().map(|c| c % p).collect();
            if modulus.len() != m + 1 || modulus[m] != 1 {
                return Err(Error::InvalidParams(format!(
                    "modulus must be monic of degree {m}"
                )));
            }
            if !upoly::is_irreducible(&modulus, p) {
                return Err(Error::InvalidParams(format!(
                    "modulus {modulus:?} is reducible over F_{p}"
                )));
            }
            modulus
        };
        let p64 = p as u64;
        let p2 = p64 * p64;
        let mut carry = vec![0u32; p as usize];
        for k in 1..p as u64 {
            let inv_k = pow_mod(k, p64 - 2, p64);
            carry[k as usize] = if k % 2 == 0 { inv_k } else { (p64 - inv_k) % p64 } as u32;
        }
        let mut fact_p2 = Vec::with_capacity(2 * p as usize);
        let mut f = 1u64;
        for k in 0..2 * p64 {
            if k > 0 {
                f = f * k % p2;
            }
            fact_p2.push(f);
        }
        Ok(Field(Arc::new(FieldParams {
            p,
            m,
            modulus,
            p2,
            carry,
            fact_p2,
            binom: RwLock::new(vec![vec![1]]),
        })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    /// `p²` as an integer.
    pub fn p2(&self) -> u64 {
        self.0.p2
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }

    pub fn one(&self) -> Fq {
        Fq::prime(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, t: i64) -> Fq {
        Fq::prime(t.rem_euclid(self.0.p as i64) as u32)
    }

    /// Element with the given coefficients in the basis `1, t, …, t^{m-1}`.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<Fq> {
        if coeffs.len() > self.0.m {
            return Err(Error::InvalidParams(format!(
                "{} coefficients given for a degree-{} extension",
                coeffs.len(),
                self.0.m
            )));
        }
        let mut c = [0u16; MAX_EXT_DEGREE];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = v.rem_euclid(self.0.p as i64) as u16;
        }
        Ok(Fq(c))
    }

    pub fn coeffs(&self, a: &Fq) -> Vec<u32> {
        (0..self.0.m).map(|i| a.coeff(i)).collect()
    }

    /// The field generator `t` (equal to 0 in the prime field, where `t` is
    /// the root of the placeholder modulus `X`).
    pub fn generator(&self) -> Fq {
        if self.0.m == 1 {
            return Fq::ZERO;
        }
        let mut c = [0u16; MAX_EXT_DEGREE];
        c[1] = 1;
        Fq(c)
    }

    /// True when `a` lies in `F_p`.
    pub fn is_prime_subfield(&self, a: &Fq) -> bool {
        a.0[1..].iter().all(|&c| c == 0)
    }

    /// Canonical residue in `[0, p)` for prime-subfield elements.
    pub fn residue(&self, a: &Fq) -> u32 {
        a.coeff(0)
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p;
        let mut c = [0u16; MAX_EXT_DEGREE];
        for i in 0..self.0.m {
            let s = a.0[i] as u32 + b.0[i] as u32;
            c[i] = if s >= p { s - p } else { s } as u16;
        }
        Fq(c)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        let p = self.0.p;
        let mut c = [0u16; MAX_EXT_DEGREE];
        for i in 0..self.0.m {
            c[i] = if a.0[i] == 0 { 0 } else { (p - a.0[i] as u32) as u16 };
        }
        Fq(c)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p as u64;
        let m = self.0.m;
        if m == 1 {
            return Fq::prime((a.0[0] as u64 * b.0[0] as u64 % p) as u32);
        }
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE];
        for i in 0..m {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + a.0[i] as u64 * b.0[j] as u64) % p;
            }
        }
        let md = &self.0.modulus;
        for d in (m..2 * m - 1).rev() {
            let top = prod[d];
            if top == 0 {
                continue;
            }
            // t^m = -(md[0] + … + md[m-1] t^{m-1})
            for (i, &mc) in md.iter().enumerate().take(m) {
                let idx = d - m + i;
                prod[idx] = (prod[idx] + (p - top) * mc as u64) % p;
            }
            prod[d] = 0;
        }
        let mut c = [0u16; MAX_EXT_DEGREE];
        for i in 0..m {
            c[i] = prod[i] as u16;
        }
        Fq(c)
    }

    pub fn pow(&self, a: Fq, mut exp: u64) -> Fq {
        let mut acc = self.one();
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.0.p as u64;
        if self.0.m == 1 {
            return Ok(Fq::prime(pow_mod(a.0[0] as u64, p - 2, p) as u32));
        }
        let av: Vec<u32> = (0..self.0.m).map(|i| a.coeff(i)).collect();
        let inv = upoly::inverse_mod(&av, &self.0.modulus, self.0.p)
            .ok_or(Error::DivisionByZero)?;
        let mut c = [0u16; MAX_EXT_DEGREE];
        for (slot, v) in c.iter_mut().zip(inv) {
            *slot = v as u16;
        }
        Ok(Fq(c))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a ↦ a^p`.
    pub fn frobenius(&self, a: Fq) -> Fq {
        if self.0.m == 1 {
            a
        } else {
            self.pow(a, self.0.p as u64)
        }
    }

    /// Inverse of [`Field::frobenius`], `a ↦ a^{p^{m-1}}`.
    pub fn pth_root(&self, a: Fq) -> Fq {
        let mut r = a;
        for _ in 1..self.0.m {
            r = self.frobenius(r);
        }
        r
    }

    /// `C(a, k) mod p²`.
    pub fn binom_p2(&self, a: u32, k: u32) -> u64 {
        if k > a {
            return 0;
        }
        self.ensure_binomials(a);
        self.0.binom.read()[a as usize][k as usize] as u64
    }

    /// `k! mod p²`.
    pub fn factorial_p2(&self, k: u32) -> u64 {
        self.0.fact_p2.get(k as usize).copied().unwrap_or(0)
    }

    pub(crate) fn ensure_binomials(&self, max_row: u32) {
        if self.0.binom.read().len() > max_row as usize {
            return;
        }
        let mut rows = self.0.binom.write();
        let p2 = self.0.p2;
        while rows.len() <= max_row as usize {
            let prev = rows.last().expect("row 0 present");
            let mut next = Vec::with_capacity(prev.len() + 1);
            next.push(1u32);
            for k in 1..prev.len() {
                next.push(((prev[k - 1] as u64 + prev[k] as u64) % p2) as u32);
            }
            next.push(1);
            rows.push(next);
        }
    }

    /// Contraction coefficient `C(a,k) C(b,k) k! mod p²`.
    pub(crate) fn contraction_p2(&self, a: u32, b: u32, k: u32) -> u64 {
        let f = self.factorial_p2(k);
        if f == 0 {
            return 0;
        }
        let p2 = self.0.p2;
        self.binom_p2(a, k) * self.binom_p2(b, k) % p2 * f % p2
    }

    /// Witt carry `(a^p + b^p - (a+b)^p)/p`, reduced into `k`.
    pub fn witt_carry(&self, a: Fq, b: Fq) -> Fq {
        if a.is_zero() || b.is_zero() {
            return Fq::ZERO;
        }
        if self.0.m == 1 {
            return self.witt_carry_prime(a, b);
        }
        self.witt_carry_poly(a, b)
    }

    /// Carry over `F_p` evaluated with integer arithmetic mod `p²`.
    fn witt_carry_prime(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p as u64;
        let p2 = self.0.p2;
        let (ai, bi) = (a.0[0] as u64, b.0[0] as u64);
        let num = (pow_mod(ai, p, p2) + pow_mod(bi, p, p2) + p2 - pow_mod(ai + bi, p, p2)) % p2;
        debug_assert_eq!(num % p, 0);
        Fq::prime((num / p) as u32)
    }

    /// Carry via the precomputed binomial coefficients.
    pub(crate) fn witt_carry_poly(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p as usize;
        let mut apow = Vec::with_capacity(p);
        let mut bpow = Vec::with_capacity(p);
        let (mut x, mut y) = (self.one(), self.one());
        for _ in 0..p {
            apow.push(x);
            bpow.push(y);
            x = self.mul(x, a);
            y = self.mul(y, b);
        }
        let mut acc = Fq::ZERO;
        for k in 1..p {
            let term = self.mul(apow[k], bpow[p - k]);
            acc = self.add(acc, self.mul(self.from_int(self.0.carry[k] as i64), term));
        }
        acc
    }

    pub fn format_elem(&self, a: &Fq) -> String {
        if self.0.m == 1 {
            return a.coeff(0).to_string();
        }
        let parts: Vec<String> = (0..self.0.m)
            .filter(|&i| a.coeff(i) != 0)
            .map(|i| match i {
                0 => a.coeff(0).to_string(),
                1 if a.coeff(1) == 1 => "t".to_string(),
                1 => format!("{}*t", a.coeff(1)),
                _ if a.coeff(i) == 1 => format!("t^{i}"),
                _ => format!("{}*t^{i}", a.coeff(i)),
            })
            .collect();
        match parts.len() {
            0 => "0".to_string(),
            1 => parts.into_iter().next().unwrap(),
            _ => format!("({})", parts.join(" + ")),
        }
    }

    /// All elements of the field, in coefficient order. Only sensible for
    /// small fields; used by exhaustive tests.
    pub fn elements(&self) -> Vec<Fq> {
        let p = self.0.p as u64;
        let total = p.pow(self.0.m as u32);
        (0..total)
            .map(|mut idx| {
                let mut c = [0u16; MAX_EXT_DEGREE];
                for slot in c.iter_mut().take(self.0.m) {
                    *slot = (idx % p) as u16;
                    idx /= p;
                }
                Fq(c)
            })
            .collect()
    }
}

/// A length-two Witt vector `(a₁, a₂)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Witt2 {
    pub a1: Fq,
    pub a2: Fq,
}

/// Ring context for `W₂(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witt2Ring {
    field: Field,
}

impl Witt2Ring {
    pub fn new(field: Field) -> Self {
        Witt2Ring { field }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn add(&self, x: Witt2, y: Witt2) -> Witt2 {
        let k = &self.field;
        Witt2 {
            a1: k.add(x.a1, y.a1),
            a2: k.add(k.add(x.a2, y.a2), k.witt_carry(x.a1, y.a1)),
        }
    }

    pub fn neg(&self, x: Witt2) -> Witt2 {
        // -x = (-1)·x with -1 the integer image, not the Teichmüller lift.
        self.mul(self.from_residue(self.field.p2() - 1), x)
    }

    pub fn mul(&self, x: Witt2, y: Witt2) -> Witt2 {
        let k = &self.field;
        Witt2 {
            a1: k.mul(x.a1, y.a1),
            a2: k.add(
                k.mul(k.frobenius(x.a1), y.a2),
                k.mul(k.frobenius(y.a1), x.a2),
            ),
        }
    }

    /// `p·(a₁, a₂) = (0, a₁^p)`.
    pub fn times_p(&self, x: Witt2) -> Witt2 {
        Witt2 {
            a1: Fq::ZERO,
            a2: self.field.frobenius(x.a1),
        }
    }

    pub fn teichmuller(&self, a: Fq) -> Witt2 {
        Witt2 { a1: a, a2: Fq::ZERO }
    }

    /// `(a, b)` with `x = [a] + p·[b]`.
    pub fn decompose(&self, x: Witt2) -> (Fq, Fq) {
        (x.a1, self.field.pth_root(x.a2))
    }

    /// Inverse of [`Witt2Ring::decompose`].
    pub fn compose(&self, a: Fq, b: Fq) -> Witt2 {
        self.add(self.teichmuller(a), self.times_p(self.teichmuller(b)))
    }

    /// Image of the integer residue class `r mod p²`.
    pub fn from_residue(&self, r: u64) -> Witt2 {
        let p = self.field.p() as u64;
        let p2 = self.field.p2();
        let r = r % p2;
        let lead = r % p;
        let ghost = pow_mod(lead, p, p2);
        let a2 = (r + p2 - ghost) % p2 / p;
        Witt2 {
            a1: Fq::prime(lead as u32),
            a2: Fq::prime(a2 as u32),
        }
    }
}

/// A commutative scalar ring usable as coefficients of the Weyl algebra.
pub trait ScalarRing: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Copy + Eq + Hash + fmt::Debug + Send + Sync + 'static;

    /// The ring of this kind over `field`.
    fn over(field: &Field) -> Self;
    fn base_field(&self) -> &Field;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    /// Image of the integer residue class `r mod p²`.
    fn from_residue(&self, r: u64) -> Self::Elem;

    fn from_int(&self, t: i64) -> Self::Elem {
        let p2 = self.base_field().p2() as i64;
        self.from_residue(t.rem_euclid(p2) as u64)
    }

    /// Smallest `k` with `k! = 0` in the ring.
    fn factorial_vanishes_at(&self) -> u32;

    fn format_elem(&self, a: &Self::Elem) -> String;
}

impl ScalarRing for Field {
    type Elem = Fq;

    fn over(field: &Field) -> Self {
        field.clone()
    }
    fn base_field(&self) -> &Field {
        self
    }
    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Field::one(self)
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.is_zero()
    }
    fn add(&self, a: Fq, b: Fq) -> Fq {
        Field::add(self, a, b)
    }
    fn neg(&self, a: Fq) -> Fq {
        Field::neg(self, a)
    }
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        Field::mul(self, a, b)
    }
    fn sub(&self, a: Fq, b: Fq) -> Fq {
        Field::sub(self, a, b)
    }
    fn from_residue(&self, r: u64) -> Fq {
        Fq::prime((r % self.0.p as u64) as u32)
    }
    fn factorial_vanishes_at(&self) -> u32 {
        self.0.p
    }
    fn format_elem(&self, a: &Fq) -> String {
        Field::format_elem(self, a)
    }
}

impl ScalarRing for Witt2Ring {
    type Elem = Witt2;

    fn over(field: &Field) -> Self {
        Witt2Ring::new(field.clone())
    }
    fn base_field(&self) -> &Field {
        &self.field
    }
    fn zero(&self) -> Witt2 {
        Witt2::default()
    }
    fn one(&self) -> Witt2 {
        self.teichmuller(self.field.one())
    }
    fn is_zero(&self, a: &Witt2) -> bool {
        a.a1.is_zero() && a.a2.is_zero()
    }
    fn add(&self, a: Witt2, b: Witt2) -> Witt2 {
        Witt2Ring::add(self, a, b)
    }
    fn neg(&self, a: Witt2) -> Witt2 {
        Witt2Ring::neg(self, a)
    }
    fn mul(&self, a: Witt2, b: Witt2) -> Witt2 {
        Witt2Ring::mul(self, a, b)
    }
    fn from_residue(&self, r: u64) -> Witt2 {
        Witt2Ring::from_residue(self, r)
    }
    fn factorial_vanishes_at(&self) -> u32 {
        2 * self.field.p()
    }
    fn format_elem(&self, a: &Witt2) -> String {
        format!(
            "W({}, {})",
            self.field.format_elem(&a.a1),
            self.field.format_elem(&a.a2)
        )
    }
}

/// Dense univariate polynomials over `F_p` (low degree first), used for the
/// extension-field modulus.
mod upoly {
    use super::pow_mod;

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let b = trim(b.to_vec());
        let db = b.len() - 1;
        let inv_lead = pow_mod(b[db], p - 2, p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let factor = r[r.len() - 1] * inv_lead % p;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - factor * bc % p) % p;
            }
            r = trim(r);
        }
        r
    }

    fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, f, p)
    }

    fn pow_mod_poly(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, f, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(&acc, &b, f, p);
            }
            b = mul_mod(&b, &b, f, p);
            exp >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let p = p as u64;
        let f: Vec<u64> = f.iter().map(|&c| c as u64).collect();
        let m = f.len() - 1;
        let x = vec![0u64, 1];
        // x^{p^k} mod f
        let frob_pow = |k: usize| {
            let mut r = x.clone();
            for _ in 0..k {
                r = pow_mod_poly(&r, p, &f, p);
            }
            r
        };
        let sub_x = |mut r: Vec<u64>| {
            r.resize(r.len().max(2), 0);
            r[1] = (r[1] + p - 1) % p;
            trim(r)
        };
        if !sub_x(frob_pow(m)).is_empty() {
            return false;
        }
        let mut q = 2;
        let mut rest = m;
        while rest > 1 {
            if rest % q == 0 {
                let g = gcd(&f, &sub_x(frob_pow(m / q)), p);
                if g.len() != 1 {
                    return false;
                }
                while rest % q == 0 {
                    rest /= q;
                }
            }
            q += 1;
        }
        true
    }

    /// Inverse of `a` modulo `f`, via the extended Euclidean algorithm.
    pub fn inverse_mod(a: &[u32], f: &[u32], p: u32) -> Option<Vec<u64>> {
        let p = p as u64;
        let f: Vec<u64> = f.iter().map(|&c| c as u64).collect();
        let mut r0 = f.clone();
        let mut r1 = trim(a.iter().map(|&c| c as u64).collect());
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // r0 = q r1 + r
            let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
            let mut r = r0.clone();
            let d1 = r1.len() - 1;
            let inv_lead = pow_mod(r1[d1], p - 2, p);
            while r.len() > d1 {
                let shift = r.len() - 1 - d1;
                let factor = r[r.len() - 1] * inv_lead % p;
                q[shift] = factor;
                for (i, &c) in r1.iter().enumerate() {
                    r[shift + i] = (r[shift + i] + p - factor * c % p) % p;
                }
                r = trim(r);
            }
            // s = s0 - q s1
            let mut qs = vec![0u64; q.len() + s1.len()];
            for (i, &x) in q.iter().enumerate() {
                for (j, &y) in s1.iter().enumerate() {
                    qs[i + j] = (qs[i + j] + x * y) % p;
                }
            }
            let len = qs.len().max(s0.len());
            let mut s = vec![0u64; len];
            for i in 0..len {
                let a = s0.get(i).copied().unwrap_or(0);
                let b = qs.get(i).copied().unwrap_or(0);
                s[i] = (a + p - b) % p;
            }
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, trim(s));
        }
        if r0.len() != 1 {
            return None;
        }
        let inv_c = pow_mod(r0[0], p - 2, p);
        let mut out: Vec<u64> = s0.iter().map(|&c| c * inv_c % p).collect();
        out.resize(f.len() - 1, 0);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(k: &Field, a1: i64, a2: i64) -> Witt2 {
        Witt2 {
            a1: k.from_int(a1),
            a2: k.from_int(a2),
        }
    }

    #[test]
    fn prime_field_examples() {
        let k = Field::prime(3).unwrap();
        assert_eq!(k.add(k.from_int(1), k.from_int(2)), k.zero());
        assert_eq!(k.inv(k.from_int(2)).unwrap(), k.from_int(2));
        assert!(matches!(k.inv(k.zero()), Err(Error::DivisionByZero)));
        assert_eq!(k.frobenius(k.from_int(2)), k.from_int(2));
        assert_eq!(k.pth_root(k.from_int(2)), k.from_int(2));
    }

    #[test]
    fn extension_field_examples() {
        let k = Field::new(5, 2, Some(vec![2, 0, 1])).unwrap();
        let t = k.generator();
        assert_eq!(k.mul(t, t), k.from_int(3));
        let k4 = Field::new(2, 2, None).unwrap();
        let t = k4.generator();
        assert_ne!(k4.frobenius(t), t);
        assert_eq!(k4.pth_root(k4.frobenius(t)), t);
        for a in k4.elements() {
            assert_eq!(k4.frobenius(k4.pth_root(a)), a);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(1).is_err());
        // t² + 1 splits over F₅
        assert!(Field::new(5, 2, Some(vec![1, 0, 1])).is_err());
        assert!(Field::new(7, 2, None).is_err());
        // t³ + t + 1 is irreducible over F₂
        assert!(Field::new(2, 3, Some(vec![1, 1, 0, 1])).is_ok());
    }

    #[test]
    fn extension_inverse() {
        let k = Field::new(3, 2, None).unwrap();
        for a in k.elements().into_iter().filter(|a| !a.is_zero()) {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
        }
    }

    #[test]
    fn witt_add_examples() {
        let k = Field::prime(3).unwrap();
        let w2 = Witt2Ring::new(k.clone());
        assert_eq!(w2.add(w(&k, 1, 0), w(&k, 2, 0)), w(&k, 0, 0));
        let x = w(&k, 2, 1);
        assert_eq!(w2.add(x, w2.zero()), x);
        let k2 = Field::prime(2).unwrap();
        let w2_2 = Witt2Ring::new(k2.clone());
        assert_eq!(w2_2.add(w(&k2, 1, 0), w(&k2, 1, 0)), w(&k2, 0, 1));
    }

    #[test]
    fn witt_mul_examples() {
        let k = Field::prime(3).unwrap();
        let w2 = Witt2Ring::new(k.clone());
        assert_eq!(w2.mul(w(&k, 2, 0), w(&k, 2, 0)), w(&k, 1, 0));
        let x = w(&k, 2, 1);
        assert_eq!(w2.mul(x, w2.one()), x);
        assert_eq!(w2.mul(w(&k, 0, 1), w(&k, 0, 1)), w(&k, 0, 0));
    }

    #[test]
    fn times_p_examples() {
        let k = Field::prime(3).unwrap();
        let w2 = Witt2Ring::new(k.clone());
        assert_eq!(w2.times_p(w(&k, 2, 0)), w(&k, 0, 2));
        assert_eq!(w2.times_p(w(&k, 0, 2)), w2.zero());
        let k5 = Field::prime(5).unwrap();
        assert_eq!(
            Witt2Ring::new(k5.clone()).times_p(w(&k5, 1, 0)),
            w(&k5, 0, 1)
        );
    }

    #[test]
    fn times_p_is_iterated_addition() {
        for p in [2u32, 3, 5] {
            let k = Field::prime(p).unwrap();
            let w2 = Witt2Ring::new(k.clone());
            for a1 in 0..p as i64 {
                for a2 in 0..p as i64 {
                    let x = w(&k, a1, a2);
                    let mut acc = w2.zero();
                    for _ in 0..p {
                        acc = w2.add(acc, x);
                    }
                    assert_eq!(acc, w2.times_p(x));
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let k = Field::prime(3).unwrap();
        let w2 = Witt2Ring::new(k.clone());
        assert_eq!(w2.decompose(w(&k, 2, 1)), (k.from_int(2), k.from_int(1)));
        assert_eq!(w2.decompose(w(&k, 2, 0)), (k.from_int(2), k.zero()));
        assert_eq!(w2.decompose(w(&k, 0, 2)), (k.zero(), k.from_int(2)));
        let x = w(&k, 2, 1);
        let (a, b) = w2.decompose(x);
        assert_eq!(w2.compose(a, b), x);
    }

    #[test]
    fn decompose_round_trip_extension() {
        let k = Field::new(2, 2, None).unwrap();
        let w2 = Witt2Ring::new(k.clone());
        for a1 in k.elements() {
            for a2 in k.elements() {
                let x = Witt2 { a1, a2 };
                let (a, b) = w2.decompose(x);
                assert_eq!(w2.compose(a, b), x);
            }
        }
    }

    #[test]
    fn carry_paths_agree() {
        for p in [2u32, 3, 5, 7, 11] {
            let k = Field::prime(p).unwrap();
            for a in k.elements() {
                for b in k.elements() {
                    assert_eq!(k.witt_carry(a, b), k.witt_carry_poly(a, b), "p={p}");
                }
            }
        }
    }

    #[test]
    fn integer_image_matches_iterated_addition() {
        for p in [2u32, 3, 5, 7] {
            let k = Field::prime(p).unwrap();
            let w2 = Witt2Ring::new(k);
            let mut acc = w2.zero();
            for t in 0..(p * p + 3) as u64 {
                assert_eq!(w2.from_residue(t), acc, "p={p} t={t}");
                acc = w2.add(acc, w2.one());
            }
        }
    }

    #[test]
    fn binomials_mod_p2() {
        let k = Field::prime(3).unwrap();
        assert_eq!(k.binom_p2(6, 3), 20 % 9);
        assert_eq!(k.binom_p2(9, 3), 84 % 9);
        assert_eq!(k.contraction_p2(2, 2, 1), 4);
        assert_eq!(k.contraction_p2(2, 2, 2), 2);
        assert_eq!(k.factorial_p2(6), 0);
        assert_eq!(k.factorial_p2(5), 120 % 9);
    }
}
