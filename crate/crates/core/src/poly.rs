//! Sparse commutative polynomials over `k` in `2n` variables.
//!
//! One type serves both the center `Z = k[x₁..x₂ₙ]` and `S = k[y₁..y₂ₙ]`;
//! the [`VarTag`] records which, and moving between them (`y_i^p = x_i`) is
//! always an explicit call.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use crate::monomial::MultiIndex;
use crate::scalars::{Field, Fq};
use crate::weyl::Algebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum VarTag {
    /// Center variables `x_i = z_i^p`.
    X,
    /// Variables of `S`, with `y_i^p = x_i`.
    Y,
}

impl VarTag {
    pub fn letter(self) -> char {
        match self {
            VarTag::X => 'x',
            VarTag::Y => 'y',
        }
    }
}

#[derive(Clone)]
pub struct Poly {
    alg: Algebra,
    tag: VarTag,
    terms: Vec<(MultiIndex, Fq)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && self.alg == other.alg && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Poly {
    pub fn zero(alg: &Algebra, tag: VarTag) -> Poly {
        Poly {
            alg: alg.clone(),
            tag,
            terms: Vec::new(),
        }
    }

    pub fn constant(alg: &Algebra, tag: VarTag, c: Fq) -> Poly {
        Self::monomial(alg, tag, MultiIndex::zero(alg.nvars()), c)
    }

    pub fn one(alg: &Algebra, tag: VarTag) -> Poly {
        Self::constant(alg, tag, alg.field().one())
    }

    pub fn from_int(alg: &Algebra, tag: VarTag, t: i64) -> Poly {
        Self::constant(alg, tag, alg.field().from_int(t))
    }

    /// The variable with 0-based index `i`.
    pub fn var(alg: &Algebra, tag: VarTag, i: usize) -> Poly {
        Self::monomial(alg, tag, MultiIndex::unit(alg.nvars(), i), alg.field().one())
    }

    pub fn monomial(alg: &Algebra, tag: VarTag, m: MultiIndex, c: Fq) -> Poly {
        assert_eq!(m.len(), alg.nvars(), "exponent vector length");
        Poly {
            alg: alg.clone(),
            tag,
            terms: if c.is_zero() { vec![] } else { vec![(m, c)] },
        }
    }

    pub fn from_terms(alg: &Algebra, tag: VarTag, terms: impl IntoIterator<Item = (MultiIndex, Fq)>) -> Poly {
        let field = alg.field();
        let mut map: FxHashMap<MultiIndex, Fq> = FxHashMap::default();
        for (m, c) in terms {
            assert_eq!(m.len(), alg.nvars(), "exponent vector length");
            if c.is_zero() {
                continue;
            }
            map.entry(m)
                .and_modify(|v| *v = field.add(*v, c))
                .or_insert(c);
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly {
            alg: alg.clone(),
            tag,
            terms,
        }
    }

    /// Wraps terms that are already sorted, distinct and nonzero.
    pub(crate) fn from_sorted_terms(alg: &Algebra, tag: VarTag, terms: Vec<(MultiIndex, Fq)>) -> Poly {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Poly {
            alg: alg.clone(),
            tag,
            terms,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn field(&self) -> &Field {
        self.alg.field()
    }

    pub fn tag(&self) -> VarTag {
        self.tag
    }

    pub fn terms(&self) -> &[(MultiIndex, Fq)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_zero())
    }

    pub fn constant_term(&self) -> Fq {
        self.coeff(&MultiIndex::zero(self.alg.nvars()))
    }

    pub fn coeff(&self, m: &MultiIndex) -> Fq {
        match self.terms.binary_search_by(|t| t.0.cmp(m)) {
            Ok(i) => self.terms[i].1,
            Err(_) => Fq::ZERO,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Largest exponent of variable `i`; `None` for zero.
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m[i]).max()
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<&(MultiIndex, Fq)> {
        self.terms.last()
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        self.filter(|m| m.degree() == d)
    }

    fn filter(&self, keep: impl Fn(&MultiIndex) -> bool) -> Poly {
        Poly {
            alg: self.alg.clone(),
            tag: self.tag,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).cloned().collect(),
        }
    }

    fn check(&self, other: &Poly) {
        assert!(
            self.alg == other.alg && self.tag == other.tag,
            "polynomials from different rings"
        );
    }

    fn add_ref(&self, other: &Poly) -> Poly {
        self.check(other);
        let field = self.field();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = field.add(a.1, b.1);
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly {
            alg: self.alg.clone(),
            tag: self.tag,
            terms: out,
        }
    }

    fn neg_ref(&self) -> Poly {
        let field = self.field();
        self.map_coeffs(|c| field.neg(c))
    }

    fn sub_ref(&self, other: &Poly) -> Poly {
        self.add_ref(&other.neg_ref())
    }

    fn mul_ref(&self, other: &Poly) -> Poly {
        self.check(other);
        let field = self.field();
        let mut map: FxHashMap<MultiIndex, Fq> = FxHashMap::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = field.mul(*ca, *cb);
                map.entry(a.add(b))
                    .and_modify(|v| *v = field.add(*v, c))
                    .or_insert(c);
            }
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly {
            alg: self.alg.clone(),
            tag: self.tag,
            terms,
        }
    }

    fn map_coeffs(&self, f: impl Fn(Fq) -> Fq) -> Poly {
        Poly {
            alg: self.alg.clone(),
            tag: self.tag,
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let v = f(*c);
                    (!v.is_zero()).then(|| (m.clone(), v))
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: Fq) -> Poly {
        let field = self.field();
        self.map_coeffs(|x| field.mul(x, c))
    }

    pub fn scale_int(&self, t: i64) -> Poly {
        self.scale(self.field().from_int(t))
    }

    pub fn pow(&self, mut exp: u64) -> Poly {
        let mut acc = Poly::one(&self.alg, self.tag);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative in the variable with 0-based index `i`.
    pub fn pderiv(&self, i: usize) -> Poly {
        self.pderiv_iter(i, 1)
    }

    /// `k`-fold partial derivative in variable `i`.
    pub fn pderiv_iter(&self, i: usize, k: u32) -> Poly {
        let field = self.field();
        let p = field.p() as u64;
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            if m[i] < k {
                continue;
            }
            // falling factorial e(e-1)...(e-k+1) mod p
            let mut f = 1u64;
            for t in 0..k {
                f = f * ((m[i] - t) as u64 % p) % p;
            }
            if f == 0 {
                continue;
            }
            let mut d = m.clone();
            d[i] -= k;
            terms.push((d, field.mul(*c, field.from_int(f as i64))));
        }
        // lowering one exponent keeps the lexicographic order
        Poly::from_sorted_terms(&self.alg, self.tag, terms)
    }

    /// Same terms, other variable tag.
    pub fn retag(&self, tag: VarTag) -> Poly {
        Poly {
            alg: self.alg.clone(),
            tag,
            terms: self.terms.clone(),
        }
    }

    /// `f ↦ f^p`, computed termwise. A `Y` input is re-expressed in `x` via
    /// `y_i^p = x_i`.
    pub fn frobenius_twist(&self) -> Poly {
        let field = self.field();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let m = match self.tag {
                    VarTag::X => m.scale(field.p()),
                    VarTag::Y => m.clone(),
                };
                (m, field.frobenius(*c))
            })
            .collect();
        Poly::from_sorted_terms(&self.alg, VarTag::X, terms)
    }

    /// The `p`-th root in the same ring, when every exponent is divisible by `p`.
    pub fn pth_root(&self) -> Option<Poly> {
        let field = self.field();
        let p = field.p();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.div_exact(p)?, field.pth_root(*c)));
        }
        Some(Poly::from_sorted_terms(&self.alg, self.tag, terms))
    }

    /// Rewrites a polynomial in `x` as one in `y` through `x_i = y_i^p`.
    pub fn x_to_y(&self) -> Poly {
        assert_eq!(self.tag, VarTag::X);
        let p = self.field().p();
        Poly::from_sorted_terms(
            &self.alg,
            VarTag::Y,
            self.terms.iter().map(|(m, c)| (m.scale(p), *c)).collect(),
        )
    }

    /// Inverse of [`Poly::x_to_y`], for elements of `k[y^p]`.
    pub fn y_to_x(&self) -> Option<Poly> {
        assert_eq!(self.tag, VarTag::Y);
        let p = self.field().p();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.div_exact(p)?, *c));
        }
        Some(Poly::from_sorted_terms(&self.alg, VarTag::X, terms))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check(d);
        let (lm, lc) = d.leading_term()?.clone();
        let field = self.field();
        let lc_inv = field.inv(lc).ok()?;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.leading_term().cloned() {
            let qm = m.checked_sub(&lm)?;
            let qc = field.mul(c, lc_inv);
            let t = Poly::monomial(&self.alg, self.tag, qm.clone(), qc);
            rem = &rem - &(&t * d);
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(&self.alg, self.tag, quot))
    }

    /// Scales so that the leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(self.field().inv(*c).expect("nonzero")),
        }
    }

    /// Coefficients of `self` as a polynomial in variable `v`, lowest first.
    fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v).unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(MultiIndex, Fq)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut r = m.clone();
            r[v] = 0;
            buckets[m[v] as usize].push((r, *c));
        }
        buckets
            .into_iter()
            .map(|ts| Poly::from_terms(&self.alg, self.tag, ts))
            .collect()
    }

    fn shift_var(&self, v: usize, e: u32) -> Poly {
        Poly {
            alg: self.alg.clone(),
            tag: self.tag,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m[v] += e;
                    (m, *c)
                })
                .collect::<Vec<_>>(),
        }
        .resorted()
    }

    fn resorted(mut self) -> Poly {
        self.terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        self
    }

    fn main_var(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter_map(|(m, _)| m.as_slice().iter().rposition(|&e| e > 0))
            .max()
    }

    /// Monic greatest common divisor, by recursive primitive remainder
    /// sequences over `k[y₁][y₂]…`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check(other);
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let v = match (self.main_var(), other.main_var()) {
            (None, _) | (_, None) => return Poly::one(&self.alg, self.tag),
            (Some(a), Some(b)) => a.max(b),
        };
        if self.degree_in(v) == Some(0) {
            return self.gcd(&other.content_in(v));
        }
        if other.degree_in(v) == Some(0) {
            return self.content_in(v).gcd(other);
        }
        let (ca, cb) = (self.content_in(v), other.content_in(v));
        let content = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = other.div_exact(&cb).expect("content divides");
        if a.degree_in(v) < b.degree_in(v) {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b, v);
            if r.is_zero() {
                break;
            }
            if r.degree_in(v) == Some(0) {
                return content.monic();
            }
            a = b;
            b = r.primitive_in(v);
        }
        (&content * &b.primitive_in(v)).monic()
    }

    /// GCD of the coefficients with respect to variable `v`.
    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(&self.alg, self.tag);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_constant() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, v: usize) -> Poly {
        self.div_exact(&self.content_in(v)).expect("content divides")
    }

    /// Pseudo-remainder of `self` by `b` as polynomials in `v`.
    fn pseudo_rem(&self, b: &Poly, v: usize) -> Poly {
        let db = b.degree_in(v).unwrap();
        let lb = b.coeffs_in(v).pop().unwrap();
        let mut r = self.clone();
        while let Some(dr) = r.degree_in(v).filter(|&d| d >= db) {
            let lr = r.coeffs_in(v).pop().unwrap();
            r = &(&lb * &r) - &(&lr * &b.shift_var(v, dr - db));
            debug_assert!(r.degree_in(v).map_or(true, |d| d < dr));
        }
        r
    }

    /// Monic GCD of all items; `None` for an empty list.
    pub fn gcd_many<'a>(items: impl IntoIterator<Item = &'a Poly>) -> Option<Poly> {
        let mut g: Option<Poly> = None;
        for f in items {
            g = Some(match g {
                None => f.monic(),
                Some(g) => g.gcd(f),
            });
        }
        g
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = self.field();
        let letter = self.tag.letter();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if *c != field.one() || m.is_zero() {
                factors.push(field.format_elem(c));
            }
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("{letter}{}", i + 1)),
                    _ => factors.push(format!("{letter}{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$imp(rhs)
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$imp(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, add_ref);
poly_binop!(Sub, sub, sub_ref);
poly_binop!(Mul, mul, mul_ref);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}
