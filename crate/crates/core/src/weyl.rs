//! Normal-ordered arithmetic in the Weyl algebra `Aₙ(R)` for `R = k` or
//! `R = W₂(k)`.
//!
//! The generators are `z₁, …, z₂ₙ` with `[z_i, z_j] = ω_{ij}` and
//! `ω = [[0, -I], [I, 0]]`; elements are stored in the ascending-index normal
//! order `z₁^{i₁} ⋯ z₂ₙ^{i₂ₙ}`. Generators `z_l` and `z_{n+l}` form the only
//! non-commuting pairs, and `z_{n+l} z_l = z_l z_{n+l} + 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::monomial::MultiIndex;
use crate::poly::{Poly, VarTag};
use crate::scalars::{Field, Fq, ScalarRing, Witt2, Witt2Ring};

#[derive(Debug)]
pub struct AlgebraParams {
    n: usize,
    field: Field,
}

/// Shared handle on the parameters of `Aₙ(k)`: the number of conjugate pairs
/// `n` and the base field.
#[derive(Clone, Debug)]
pub struct Algebra(Arc<AlgebraParams>);

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.n == other.0.n && self.0.field == other.0.field)
    }
}

impl Eq for Algebra {}

impl Algebra {
    pub fn new(n: usize, field: Field) -> Result<Algebra> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        Ok(Algebra(Arc::new(AlgebraParams { n, field })))
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    /// Number of generators, `2n`.
    pub fn nvars(&self) -> usize {
        2 * self.0.n
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn p(&self) -> u32 {
        self.0.field.p()
    }

    pub fn witt_ring(&self) -> Witt2Ring {
        Witt2Ring::new(self.0.field.clone())
    }

    /// `ω_{ij}` for 0-based generator indices.
    pub fn omega(&self, i: usize, j: usize) -> i64 {
        let n = self.0.n;
        if i < n && j == i + n {
            -1
        } else if i >= n && j + n == i {
            1
        } else {
            0
        }
    }

    /// Index of the generator that does not commute with `i`.
    pub fn conjugate(&self, i: usize) -> usize {
        let n = self.0.n;
        if i < n {
            i + n
        } else {
            i - n
        }
    }

    /// Normal-ordered expansion of `z^α · z^β`.
    pub fn mono_mul<R: ScalarRing>(&self, ring: &R, a: &MultiIndex, b: &MultiIndex) -> WeylElem<R> {
        let mut acc = Accumulator::new(ring.clone());
        let one = ring.one();
        self.for_each_product(ring, a, b, false, |m, r| acc.add_scaled(m, one, r));
        WeylElem {
            alg: self.clone(),
            ring: ring.clone(),
            terms: acc.finish(),
        }
    }

    /// Calls `f(monomial, integer coefficient mod p²)` for every term of the
    /// normal-ordered expansion of `z^a z^b`. With `skip_leading`, the
    /// commutative term (no contractions) is omitted.
    fn for_each_product<R: ScalarRing>(
        &self,
        ring: &R,
        a: &MultiIndex,
        b: &MultiIndex,
        skip_leading: bool,
        mut f: impl FnMut(MultiIndex, u64),
    ) {
        let n = self.0.n;
        let field = &self.0.field;
        let p2 = field.p2();
        let kcap = ring.factorial_vanishes_at() - 1;
        let mut ranges: SmallVec<[u32; 4]> = SmallVec::new();
        let mut max_exp = 0;
        for l in 0..n {
            ranges.push(a[n + l].min(b[l]).min(kcap));
            max_exp = max_exp.max(a[n + l]).max(b[l]);
        }
        let base = a.add(b);
        if ranges.iter().all(|&r| r == 0) {
            if !skip_leading {
                f(base, 1);
            }
            return;
        }
        field.ensure_binomials(max_exp);
        let mut k: SmallVec<[u32; 4]> = SmallVec::from_elem(0, n);
        loop {
            let leading = k.iter().all(|&x| x == 0);
            if !(leading && skip_leading) {
                let mut coef = 1u64;
                for l in 0..n {
                    if k[l] > 0 {
                        coef = coef * field.contraction_p2(a[n + l], b[l], k[l]) % p2;
                        if coef == 0 {
                            break;
                        }
                    }
                }
                if coef != 0 {
                    let mut m = base.clone();
                    for l in 0..n {
                        m[l] -= k[l];
                        m[n + l] -= k[l];
                    }
                    f(m, coef);
                }
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == n {
                    return;
                }
                if k[pos] < ranges[pos] {
                    k[pos] += 1;
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
        }
    }
}

struct Accumulator<R: ScalarRing> {
    ring: R,
    map: FxHashMap<MultiIndex, R::Elem>,
}

impl<R: ScalarRing> Accumulator<R> {
    fn new(ring: R) -> Self {
        Accumulator {
            ring,
            map: FxHashMap::default(),
        }
    }

    fn add(&mut self, m: MultiIndex, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        let ring = &self.ring;
        self.map
            .entry(m)
            .and_modify(|v| *v = ring.add(*v, c))
            .or_insert(c);
    }

    fn add_scaled(&mut self, m: MultiIndex, c: R::Elem, residue: u64) {
        if residue == 1 {
            self.add(m, c);
        } else {
            let r = self.ring.from_residue(residue);
            self.add(m, self.ring.mul(c, r));
        }
    }

    fn finish(self) -> Vec<(MultiIndex, R::Elem)> {
        let ring = self.ring;
        let mut terms: Vec<_> = self
            .map
            .into_iter()
            .filter(|(_, c)| !ring.is_zero(c))
            .collect();
        terms.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        terms
    }
}

/// An element of `Aₙ(R)` as a sparse map from normal-ordered monomials to
/// nonzero coefficients, sorted by exponent vector.
#[derive(Clone)]
pub struct WeylElem<R: ScalarRing> {
    alg: Algebra,
    ring: R,
    terms: Vec<(MultiIndex, R::Elem)>,
}

/// Element of `Aₙ(k)`.
pub type WeylK = WeylElem<Field>;
/// Element of `Aₙ(W₂(k))`.
pub type WeylW2 = WeylElem<Witt2Ring>;

impl<R: ScalarRing> PartialEq for WeylElem<R> {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.terms == other.terms
    }
}

impl<R: ScalarRing> Eq for WeylElem<R> {}

impl<R: ScalarRing> fmt::Debug for WeylElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<R: ScalarRing> WeylElem<R> {
    pub fn zero(alg: &Algebra) -> Self {
        WeylElem {
            alg: alg.clone(),
            ring: R::over(alg.field()),
            terms: Vec::new(),
        }
    }

    pub fn constant(alg: &Algebra, c: R::Elem) -> Self {
        Self::monomial(alg, MultiIndex::zero(alg.nvars()), c)
    }

    pub fn one(alg: &Algebra) -> Self {
        let ring = R::over(alg.field());
        Self::constant(alg, ring.one())
    }

    pub fn from_int(alg: &Algebra, t: i64) -> Self {
        let ring = R::over(alg.field());
        Self::constant(alg, ring.from_int(t))
    }

    /// The generator `z_{i+1}` (0-based index).
    pub fn generator(alg: &Algebra, i: usize) -> Self {
        let ring = R::over(alg.field());
        Self::monomial(alg, MultiIndex::unit(alg.nvars(), i), ring.one())
    }

    pub fn monomial(alg: &Algebra, m: MultiIndex, c: R::Elem) -> Self {
        assert_eq!(m.len(), alg.nvars(), "exponent vector length");
        let ring = R::over(alg.field());
        let terms = if ring.is_zero(&c) { vec![] } else { vec![(m, c)] };
        WeylElem {
            alg: alg.clone(),
            ring,
            terms,
        }
    }

    /// Builds an element from arbitrary (possibly repeated) terms.
    pub fn from_terms(alg: &Algebra, terms: impl IntoIterator<Item = (MultiIndex, R::Elem)>) -> Self {
        let ring = R::over(alg.field());
        let mut acc = Accumulator::new(ring.clone());
        for (m, c) in terms {
            assert_eq!(m.len(), alg.nvars(), "exponent vector length");
            acc.add(m, c);
        }
        WeylElem {
            alg: alg.clone(),
            ring,
            terms: acc.finish(),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn terms(&self) -> &[(MultiIndex, R::Elem)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &MultiIndex) -> R::Elem {
        match self.terms.binary_search_by(|t| t.0.cmp(m)) {
            Ok(i) => self.terms[i].1,
            Err(_) => self.ring.zero(),
        }
    }

    /// Total degree; `None` for the zero element.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Constant (degree-0) coefficient.
    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&MultiIndex::zero(self.alg.nvars()))
    }

    /// True if the element is a scalar (possibly zero).
    pub fn is_scalar(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_zero())
    }

    fn check(&self, other: &Self) {
        assert!(self.alg == other.alg, "{}", Error::ParamsMismatch);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.alg != other.alg {
            return Err(Error::ParamsMismatch);
        }
        Ok(self.add_ref(other))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.check(other);
        let ring = &self.ring;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ring.add(a.1, b.1);
                    if !ring.is_zero(&c) {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        WeylElem {
            alg: self.alg.clone(),
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn neg_ref(&self) -> Self {
        self.map_coeffs(|c| self.ring.neg(c))
    }

    /// Multiplies every coefficient by the scalar `c`.
    pub fn scale(&self, c: R::Elem) -> Self {
        self.map_coeffs(|x| self.ring.mul(x, c))
    }

    fn map_coeffs(&self, f: impl Fn(R::Elem) -> R::Elem) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let v = f(*c);
                (!self.ring.is_zero(&v)).then(|| (m.clone(), v))
            })
            .collect();
        WeylElem {
            alg: self.alg.clone(),
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.alg);
        }
        let ring = &self.ring;
        let mut acc = Accumulator::new(ring.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ring.mul(*ca, *cb);
                if ring.is_zero(&c) {
                    continue;
                }
                self.alg
                    .for_each_product(ring, a, b, false, |m, r| acc.add_scaled(m, c, r));
            }
        }
        WeylElem {
            alg: self.alg.clone(),
            ring: self.ring.clone(),
            terms: acc.finish(),
        }
    }

    /// `[f, g] = fg - gf`, computed from the contraction terms only.
    pub fn commutator(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.alg);
        }
        let ring = &self.ring;
        let mut acc = Accumulator::new(ring.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ring.mul(*ca, *cb);
                if ring.is_zero(&c) {
                    continue;
                }
                let neg_c = ring.neg(c);
                self.alg
                    .for_each_product(ring, a, b, true, |m, r| acc.add_scaled(m, c, r));
                self.alg
                    .for_each_product(ring, b, a, true, |m, r| acc.add_scaled(m, neg_c, r));
            }
        }
        WeylElem {
            alg: self.alg.clone(),
            ring: self.ring.clone(),
            terms: acc.finish(),
        }
    }

    /// `ad(self)^k (w)`.
    pub fn ad_pow(&self, k: u32, w: &Self) -> Self {
        let mut acc = w.clone();
        for _ in 0..k {
            if acc.is_zero() {
                break;
            }
            acc = self.commutator(&acc);
        }
        acc
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = Self::one(&self.alg);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// `self^p`.
    pub fn p_power(&self) -> Self {
        self.pow(self.alg.p() as u64)
    }

    /// Terms of maximal total degree.
    pub fn leading_form(&self) -> Self {
        let Some(d) = self.degree() else {
            return self.clone();
        };
        WeylElem {
            alg: self.alg.clone(),
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .cloned()
                .collect(),
        }
    }
}

impl WeylElem<Field> {
    /// Coefficientwise Teichmüller lift into `Aₙ(W₂(k))`.
    pub fn teich_lift(&self) -> WeylW2 {
        let w2 = self.alg.witt_ring();
        WeylElem {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), w2.teichmuller(*c)))
                .collect(),
            ring: w2,
        }
    }

    /// True iff every exponent in the support is divisible by `p`, i.e. the
    /// element lies in the center `Z = k[z₁^p, …, z₂ₙ^p]`.
    pub fn is_central(&self) -> bool {
        let p = self.alg.p();
        self.terms.iter().all(|(m, _)| m.iter().all(|e| e % p == 0))
    }

    /// The central element as a polynomial in `x_i = z_i^p`.
    pub fn to_center_poly(&self) -> Result<Poly> {
        let p = self.alg.p();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.div_exact(p).ok_or(Error::NotCentral)?, *c));
        }
        Ok(Poly::from_sorted_terms(&self.alg, VarTag::X, terms))
    }

    /// Embeds a polynomial in `x` as a central element (`x_i ↦ z_i^p`).
    pub fn from_center_poly(f: &Poly) -> Self {
        let p = f.algebra().p();
        WeylElem::from_terms(
            f.algebra(),
            f.terms().iter().map(|(m, c)| (m.scale(p), *c)),
        )
    }

    /// Reads an element supported on commuting generators as a polynomial
    /// in `y` (same exponents).
    pub fn to_commutative(&self) -> Poly {
        Poly::from_sorted_terms(&self.alg, VarTag::Y, self.terms.clone())
    }

    /// Formal partial derivative in generator `i`, for an element whose
    /// support avoids the conjugate of `i`.
    pub fn formal_deriv(&self, i: usize) -> Result<Self> {
        let j = self.alg.conjugate(i);
        if self.terms.iter().any(|(m, _)| m[j] != 0) {
            return Err(Error::NotInCommutingHalf);
        }
        let field = self.alg.field().clone();
        Ok(WeylElem::from_terms(
            &self.alg,
            self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
                let mut d = m.clone();
                d[i] -= 1;
                (d, field.mul(*c, field.from_int(m[i] as i64)))
            }),
        ))
    }

    pub fn scale_int(&self, t: i64) -> Self {
        self.scale(self.ring.from_int(t))
    }
}

impl WeylElem<Witt2Ring> {
    /// Unique `(f₁, f₂)` with `self = [f₁] + p·[f₂]`.
    pub fn decompose(&self) -> (WeylK, WeylK) {
        let w2 = &self.ring;
        let mut first = Vec::new();
        let mut second = Vec::new();
        for (m, c) in &self.terms {
            let (a, b) = w2.decompose(*c);
            if !a.is_zero() {
                first.push((m.clone(), a));
            }
            if !b.is_zero() {
                second.push((m.clone(), b));
            }
        }
        let field = self.alg.field().clone();
        (
            WeylElem {
                alg: self.alg.clone(),
                ring: field.clone(),
                terms: first,
            },
            WeylElem {
                alg: self.alg.clone(),
                ring: field,
                terms: second,
            },
        )
    }

    /// Image in `Aₙ(k)`.
    pub fn reduce_mod_p(&self) -> WeylK {
        self.decompose().0
    }

    /// `[f₁] + p·[f₂]`.
    pub fn from_parts(f1: &WeylK, f2: &WeylK) -> Self {
        f1.teich_lift().add_ref(&f2.teich_lift().times_p())
    }

    pub fn times_p(&self) -> Self {
        self.map_coeffs(|c| self.ring.times_p(c))
    }

    /// `f₂` for an element of the form `p·[f₂]`.
    pub fn divide_by_p(&self) -> Result<WeylK> {
        let (f1, f2) = self.decompose();
        if !f1.is_zero() {
            return Err(Error::NotDivisibleByP);
        }
        Ok(f2)
    }

    pub fn witt_coeff(&self, m: &MultiIndex) -> Witt2 {
        self.coeff(m)
    }
}

impl<R: ScalarRing> fmt::Display for WeylElem<R> {
    /// Prints in the input-file expression grammar (`2*z1^2*z3 + z2 + 1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let one = self.ring.one();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if *c != one || m.is_zero() {
                factors.push(self.ring.format_elem(c));
            }
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("z{}", i + 1)),
                    _ => factors.push(format!("z{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<R: ScalarRing> $tr<&WeylElem<R>> for &WeylElem<R> {
            type Output = WeylElem<R>;
            fn $method(self, rhs: &WeylElem<R>) -> WeylElem<R> {
                self.$imp(rhs)
            }
        }
        impl<R: ScalarRing> $tr<WeylElem<R>> for WeylElem<R> {
            type Output = WeylElem<R>;
            fn $method(self, rhs: WeylElem<R>) -> WeylElem<R> {
                (&self).$imp(&rhs)
            }
        }
    };
}

impl<R: ScalarRing> WeylElem<R> {
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl<R: ScalarRing> Neg for &WeylElem<R> {
    type Output = WeylElem<R>;
    fn neg(self) -> WeylElem<R> {
        self.neg_ref()
    }
}

impl<R: ScalarRing> Neg for WeylElem<R> {
    type Output = WeylElem<R>;
    fn neg(self) -> WeylElem<R> {
        self.neg_ref()
    }
}

/// Convenience constructor for the scalar `c ∈ k` as an element of `Aₙ(k)`.
pub fn scalar_k(alg: &Algebra, c: Fq) -> WeylK {
    WeylK::constant(alg, c)
}
