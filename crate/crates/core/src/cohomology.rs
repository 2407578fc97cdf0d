//! The ψ bijection `Aₙ(k) → S`, differential forms on `S`, and explicit
//! lifts of endomorphisms whose obstruction vanishes.

use std::collections::{BTreeMap, HashMap};

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::monomial::MultiIndex;
use crate::poly::{Poly, VarTag};
use crate::scalars::Fq;
use crate::weyl::{Algebra, WeylK, WeylW2};

/// `û_i = −u_{n+i}` and `û_{n+i} = u_i`, so that `[u_i, û_j] = δ_{ij}`.
pub fn hat_u(e: &Endo, i: usize) -> WeylK {
    let n = e.algebra().n();
    if i < n {
        -e.image(n + i)
    } else {
        e.image(i - n).clone()
    }
}

/// Writes `f = Σ F_m(x) û^m` (`0 ≤ m_i < p`, ordered products) and returns
/// `Σ F_m(y^p) y^m`.
pub fn psi_forward(e: &Endo, f: &WeylK) -> Result<Poly> {
    let alg = e.algebra();
    let hats: Vec<WeylK> = (0..alg.nvars()).map(|i| hat_u(e, i)).collect();
    let mut out = Vec::new();
    let exps = MultiIndex::zero(alg.nvars());
    project(e, &hats, f, alg.nvars(), exps, &mut out)?;
    Ok(Poly::from_terms(alg, VarTag::Y, out))
}

fn project(
    e: &Endo,
    hats: &[WeylK],
    f: &WeylK,
    remaining: usize,
    exps: MultiIndex,
    out: &mut Vec<(MultiIndex, Fq)>,
) -> Result<()> {
    if f.is_zero() {
        return Ok(());
    }
    let alg = e.algebra();
    if remaining == 0 {
        let central = f
            .to_center_poly()
            .map_err(|_| Error::SolveFailure("projection left a non-central coefficient".into()))?;
        let p = alg.p();
        for (m, c) in central.terms() {
            out.push((m.scale(p).add(&exps), *c));
        }
        return Ok(());
    }
    let l = remaining - 1;
    let k = alg.field();
    let p = alg.p();
    // a_j = ad(u_l)^j f
    let mut a = vec![f.clone()];
    for _ in 1..p {
        let next = e.image(l).commutator(a.last().unwrap());
        if next.is_zero() {
            break;
        }
        a.push(next);
    }
    let inv_fact: Vec<Fq> = (0..p)
        .scan(k.one(), |acc, j| {
            if j > 0 {
                *acc = k.mul(*acc, k.from_int(j as i64));
            }
            Some(k.inv(*acc).expect("j < p"))
        })
        .collect();
    let mut hat_pows = vec![WeylK::one(alg)];
    for r in 0..a.len() {
        // g_r = (1/r!) Σ_j (−1)^j/j! a_{r+j} û_l^j
        let mut g = WeylK::zero(alg);
        for j in 0..a.len() - r {
            while hat_pows.len() <= j {
                let next = hat_pows.last().unwrap() * &hats[l];
                hat_pows.push(next);
            }
            let mut coef = k.mul(inv_fact[r], inv_fact[j]);
            if j % 2 == 1 {
                coef = k.neg(coef);
            }
            g = &g + &(&a[r + j] * &hat_pows[j]).scale(coef);
        }
        let mut next = exps.clone();
        next[l] = r as u32;
        project(e, hats, &g, l, next, out)?;
    }
    Ok(())
}

/// Inverse of [`psi_forward`]: `y^{pq + r} ↦ z^{pq} û^r`.
pub fn psi_inverse(e: &Endo, s: &Poly) -> WeylK {
    let alg = e.algebra();
    let p = alg.p();
    let hats: Vec<WeylK> = (0..alg.nvars()).map(|i| hat_u(e, i)).collect();
    let mut pow_cache: HashMap<(usize, u32), WeylK> = HashMap::new();
    let mut basis_cache: HashMap<MultiIndex, WeylK> = HashMap::new();
    let mut acc = WeylK::zero(alg);
    for (m, c) in s.terms() {
        let mut q = m.clone();
        let mut r = m.clone();
        for i in 0..m.len() {
            q[i] = m[i] / p * p;
            r[i] = m[i] % p;
        }
        let basis = basis_cache
            .entry(r.clone())
            .or_insert_with(|| {
                let mut b = WeylK::one(alg);
                for (i, &ri) in r.iter().enumerate() {
                    if ri > 0 {
                        let pw = pow_cache
                            .entry((i, ri))
                            .or_insert_with(|| hats[i].pow(ri as u64));
                        b = &b * pw;
                    }
                }
                b
            })
            .clone();
        acc = &acc + &(&WeylK::monomial(alg, q, *c) * &basis);
    }
    acc
}

/// A differential form on `S` of degree `≤ 3`, keyed by strictly increasing
/// index tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form {
    alg: Algebra,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Poly>,
}

impl Form {
    pub fn zero(alg: &Algebra, degree: usize) -> Form {
        Form {
            alg: alg.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// Adds `f · dy_{idx[0]} ∧ …`, reordering the indices with the sign of the
    /// permutation (repeated indices give zero).
    pub fn add_term(&mut self, idx: &[usize], f: &Poly) {
        assert_eq!(idx.len(), self.degree, "form degree");
        assert_eq!(f.tag(), VarTag::Y, "form coefficients live in S");
        if f.is_zero() {
            return;
        }
        let mut sorted = idx.to_vec();
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let f = if odd { -f } else { f.clone() };
        let entry = self
            .coeffs
            .entry(sorted.clone())
            .or_insert_with(|| Poly::zero(&self.alg, VarTag::Y));
        *entry = &*entry + &f;
        if entry.is_zero() {
            self.coeffs.remove(&sorted);
        }
    }

    pub fn from_terms(alg: &Algebra, degree: usize, terms: impl IntoIterator<Item = (Vec<usize>, Poly)>) -> Form {
        let mut f = Form::zero(alg, degree);
        for (idx, c) in terms {
            f.add_term(&idx, &c);
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.coeffs.iter()
    }

    /// Coefficient of `dy_{idx}` for increasing `idx`.
    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.alg, VarTag::Y))
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            out.add_term(idx, c);
        }
        out
    }

    pub fn neg(&self) -> Form {
        Form {
            alg: self.alg.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(i, c)| (i.clone(), -c)).collect(),
        }
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(&self.alg, self.degree + 1);
        for (idx, f) in &self.coeffs {
            for i in 0..self.alg.nvars() {
                if idx.contains(&i) {
                    continue;
                }
                let df = f.pderiv(i);
                if df.is_zero() {
                    continue;
                }
                let mut full = vec![i];
                full.extend_from_slice(idx);
                out.add_term(&full, &df);
            }
        }
        out
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(idx, c)| {
                let d: Vec<String> = idx.iter().map(|i| format!("dy{}", i + 1)).collect();
                format!("({c}) {}", d.join("^"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Harmonic coefficients `H_ij ∈ k[y^p]` for `i < j`, multiplying
/// `y_i^{p−1} y_j^{p−1} dy_i ∧ dy_j`.
pub type Harmonic = BTreeMap<(usize, usize), Poly>;

/// Writes a closed 2-form as `d(h) + Σ H_ij y_i^{p−1} y_j^{p−1} dy_i ∧ dy_j`.
///
/// On a closed form of multidegree `w` with some `w_t ≢ 0 (mod p)`, Cartan's
/// formula for the Euler field `y_t ∂_t` gives `w_t F = d(ι F)`; components
/// with all `w_t ≡ 0` are harmonic. `t` is the smallest such index.
pub fn split_closed_2form(form: &Form) -> Result<(Form, Harmonic)> {
    assert_eq!(form.degree, 2);
    let alg = form.alg.clone();
    let df = form.d();
    if !df.is_zero() {
        return Err(Error::NotClosed(df.to_string()));
    }
    let k = alg.field().clone();
    let p = alg.p();
    let nv = alg.nvars();
    let mut h: Vec<Vec<(MultiIndex, Fq)>> = vec![Vec::new(); nv];
    let mut harmonic: BTreeMap<(usize, usize), Vec<(MultiIndex, Fq)>> = BTreeMap::new();
    for (idx, f) in &form.coeffs {
        let (i, j) = (idx[0], idx[1]);
        for (a, c) in f.terms() {
            let mut w = a.clone();
            w[i] += 1;
            w[j] += 1;
            match (0..nv).find(|&t| w[t] % p != 0) {
                None => {
                    let mut q = w.clone();
                    q[i] -= p;
                    q[j] -= p;
                    harmonic.entry((i, j)).or_default().push((q, *c));
                }
                Some(t) => {
                    if t != i && t != j {
                        continue;
                    }
                    let coef = k.div(*c, k.from_int(w[t] as i64)).expect("w_t is a unit");
                    let mut m = a.clone();
                    m[t] += 1;
                    if t == i {
                        h[j].push((m, coef));
                    } else {
                        h[i].push((m, k.neg(coef)));
                    }
                }
            }
        }
    }
    let mut h_form = Form::zero(&alg, 1);
    for (i, ts) in h.into_iter().enumerate() {
        h_form.add_term(&[i], &Poly::from_terms(&alg, VarTag::Y, ts));
    }
    let harmonic: Harmonic = harmonic
        .into_iter()
        .map(|(ij, ts)| (ij, Poly::from_terms(&alg, VarTag::Y, ts)))
        .filter(|(_, f)| !f.is_zero())
        .collect();
    let rebuilt = h_form.d().add(&harmonic_form(&alg, &harmonic));
    if &rebuilt != form {
        return Err(Error::InternalInconsistency(
            "2-form splitting does not reconstruct its input".into(),
        ));
    }
    Ok((h_form, harmonic))
}

/// `Σ H_ij y_i^{p−1} y_j^{p−1} dy_i ∧ dy_j`.
pub fn harmonic_form(alg: &Algebra, harmonic: &Harmonic) -> Form {
    let p = alg.p();
    let mut out = Form::zero(alg, 2);
    for (&(i, j), hij) in harmonic {
        let mut m = MultiIndex::zero(alg.nvars());
        m[i] = p - 1;
        m[j] = p - 1;
        let basis = Poly::monomial(alg, VarTag::Y, m, alg.field().one());
        out.add_term(&[i, j], &(hij * &basis));
    }
    out
}

/// `Σ_{i<j} ψ(u_ij) dy_i ∧ dy_j`.
pub fn obstruction_2form(e: &Endo) -> Result<Form> {
    let uij = e.u_ij_matrix()?;
    let nv = e.algebra().nvars();
    let mut form = Form::zero(e.algebra(), 2);
    for i in 0..nv {
        for j in i + 1..nv {
            form.add_term(&[i, j], &psi_forward(e, &uij[i][j])?);
        }
    }
    Ok(form)
}

/// Harmonic coefficients as a matrix over `Z` (`y^p ↦ x`), antisymmetric.
pub fn harmonic_matrix(alg: &Algebra, harmonic: &Harmonic) -> PolyMatrix {
    let nv = alg.nvars();
    let mut m = PolyMatrix::zeros(alg, VarTag::X, nv, nv);
    for (&(i, j), hij) in harmonic {
        let x = hij.y_to_x().expect("harmonic coefficients lie in k[y^p]");
        m[(j, i)] = -&x;
        m[(i, j)] = x;
    }
    m
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    /// `Φ(z_i) = [u_i] + p·[v_i]` satisfies the relations over `W₂(k)`.
    Lift { v: Vec<WeylK>, phi: Vec<WeylW2> },
    /// The obstruction matrix is nonzero.
    Obstructed { c: PolyMatrix },
}

impl LiftOutcome {
    pub fn is_lift(&self) -> bool {
        matches!(self, LiftOutcome::Lift { .. })
    }
}

/// `[Φ_i, Φ_j] = ω_{ij}` in `Aₙ(W₂(k))` for all pairs.
pub fn verify_lift(alg: &Algebra, phi: &[WeylW2]) -> bool {
    phi.len() == alg.nvars()
        && (0..phi.len()).all(|i| {
            (i + 1..phi.len()).all(|j| phi[i].commutator(&phi[j]) == WeylW2::from_int(alg, alg.omega(i, j)))
        })
}

/// Splits the obstruction form, sets `v_i = ψ⁻¹(−h_i)`, and checks
/// `u_ij + [u_i, v_j] − [u_j, v_i] = c_ij û_i^{p−1} û_j^{p−1}` for every pair.
pub fn construct_lift(e: &Endo) -> Result<LiftOutcome> {
    e.check_budget()?;
    let alg = e.algebra().clone();
    let nv = alg.nvars();
    let p = alg.p() as u64;
    let (h, harmonic) = split_closed_2form(&obstruction_2form(e)?)?;
    let c = e.obstruction_c()?;
    if &harmonic_matrix(&alg, &harmonic) != c {
        return Err(Error::InternalInconsistency(
            "harmonic part of the obstruction form differs from C".into(),
        ));
    }
    let v: Vec<WeylK> = (0..nv).map(|i| psi_inverse(e, &-h.coeff(&[i]))).collect();
    let uij = e.u_ij_matrix()?;
    let hat_top: Vec<WeylK> = (0..nv).map(|i| hat_u(e, i).pow(p - 1)).collect();
    for i in 0..nv {
        for j in i + 1..nv {
            let lhs = &(&uij[i][j] + &e.image(i).commutator(&v[j])) - &e.image(j).commutator(&v[i]);
            let rhs = &(&WeylK::from_center_poly(&c[(i, j)]) * &hat_top[i]) * &hat_top[j];
            if lhs != rhs {
                return Err(Error::InternalInconsistency(format!(
                    "lift residual identity fails for ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    if !c.is_zero() {
        return Ok(LiftOutcome::Obstructed { c: c.clone() });
    }
    let phi: Vec<WeylW2> = (0..nv).map(|i| WeylW2::from_parts(e.image(i), &v[i])).collect();
    if !verify_lift(&alg, &phi) {
        return Err(Error::InternalInconsistency("constructed lift violates the relations".into()));
    }
    Ok(LiftOutcome::Lift { v, phi })
}
