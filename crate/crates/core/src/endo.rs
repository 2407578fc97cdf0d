//! Endomorphisms of `Aₙ(k)` and the obstruction to lifting them to
//! `Aₙ(W₂(k))`.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::center;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::monomial::MultiIndex;
use crate::poly::{Poly, VarTag};
use crate::scalars::Fq;
use crate::weyl::{Algebra, WeylK, WeylW2};

/// Default cap on the estimated number of terms in `u_i^p`.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Which commuting half of the generators a generating function lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    /// `z₁, …, zₙ`
    First,
    /// `z_{n+1}, …, z₂ₙ`
    Second,
}

#[derive(Default)]
struct Caches {
    lifts: OnceLock<Vec<WeylW2>>,
    u_ij: OnceLock<Vec<Vec<WeylK>>>,
    c: OnceLock<PolyMatrix>,
    center: OnceLock<Vec<Poly>>,
}

/// A validated endomorphism, stored as the images `u_i = φ(z_i)`.
pub struct Endo {
    alg: Algebra,
    u: Vec<WeylK>,
    budget: u128,
    caches: Caches,
}

impl Clone for Endo {
    fn clone(&self) -> Self {
        Endo {
            alg: self.alg.clone(),
            u: self.u.clone(),
            budget: self.budget,
            caches: Caches::default(),
        }
    }
}

impl std::fmt::Debug for Endo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.u.iter().map(|u| u.to_string())).finish()
    }
}

impl PartialEq for Endo {
    fn eq(&self, other: &Self) -> bool {
        self.u == other.u
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub c: PolyMatrix,
    pub liftable: bool,
    pub poisson: bool,
    pub etale: bool,
    pub injective_certified: bool,
    pub degree: u32,
    pub degree_bound_met: bool,
}

impl Endo {
    /// Checks `[u_i, u_j] = ω_{ij}` for all pairs.
    pub fn validate(alg: &Algebra, u: Vec<WeylK>) -> Result<Endo> {
        if u.len() != alg.nvars() {
            return Err(Error::InvalidParams(format!(
                "expected {} images, got {}",
                alg.nvars(),
                u.len()
            )));
        }
        if u.iter().any(|x| x.algebra() != alg) {
            return Err(Error::ParamsMismatch);
        }
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                let residual = &u[i].commutator(&u[j]) - &WeylK::from_int(alg, alg.omega(i, j));
                if !residual.is_zero() {
                    return Err(Error::RelationViolation {
                        i: i + 1,
                        j: j + 1,
                        residual: residual.to_string(),
                    });
                }
            }
        }
        Ok(Endo {
            alg: alg.clone(),
            u,
            budget: DEFAULT_BUDGET,
            caches: Caches::default(),
        })
    }

    pub fn identity(alg: &Algebra) -> Endo {
        Endo::validate(alg, (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect())
            .expect("identity is valid")
    }

    /// The generating-function map: for `g` in the second half,
    /// `z_l ↦ z_l + ∂g/∂z_{n+l}`; for `g` in the first half,
    /// `z_{n+l} ↦ z_{n+l} + ∂g/∂z_l`.
    pub fn elementary(g: &WeylK, half: Half) -> Result<Endo> {
        let alg = g.algebra();
        let n = alg.n();
        let forbidden = match half {
            Half::First => n..2 * n,
            Half::Second => 0..n,
        };
        if g.terms().iter().any(|(m, _)| forbidden.clone().any(|i| m[i] != 0)) {
            return Err(Error::NotInCommutingHalf);
        }
        let mut u: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
        for l in 0..n {
            let (target, var) = match half {
                Half::Second => (l, n + l),
                Half::First => (n + l, l),
            };
            u[target] = &u[target] + &g.formal_deriv(var)?;
        }
        Endo::validate(alg, u)
    }

    /// `z_l ↦ z_{n+l}`, `z_{n+l} ↦ −z_l`.
    pub fn swap(alg: &Algebra, l: usize) -> Endo {
        let n = alg.n();
        let mut u: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
        u[l] = WeylK::generator(alg, n + l);
        u[n + l] = -WeylK::generator(alg, l);
        Endo::validate(alg, u).expect("swap is valid")
    }

    /// `z_l ↦ c z_l`, `z_{n+l} ↦ c⁻¹ z_{n+l}`.
    pub fn scaling(alg: &Algebra, l: usize, c: Fq) -> Result<Endo> {
        let k = alg.field();
        let ci = k.inv(c)?;
        let n = alg.n();
        let mut u: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
        u[l] = u[l].scale(c);
        u[n + l] = u[n + l].scale(ci);
        Endo::validate(alg, u)
    }

    /// Exchanges the conjugate pairs `l` and `m` (`z_l ↔ z_m`, `z_{n+l} ↔ z_{n+m}`).
    pub fn permute_pairs(alg: &Algebra, l: usize, m: usize) -> Endo {
        let n = alg.n();
        let mut u: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
        u.swap(l, m);
        u.swap(n + l, n + m);
        Endo::validate(alg, u).expect("pair permutation is valid")
    }

    pub fn with_budget(mut self, budget: u128) -> Endo {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> u128 {
        self.budget
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn images(&self) -> &[WeylK] {
        &self.u
    }

    pub fn image(&self, i: usize) -> &WeylK {
        &self.u[i]
    }

    pub fn degree(&self) -> u32 {
        self.u.iter().filter_map(WeylK::degree).max().unwrap_or(0)
    }

    /// Number of monomials of degree `≤ p·deg φ` in `2n` variables, an upper
    /// bound for the support of `u_i^p`.
    pub fn cost_estimate(&self) -> u128 {
        let top = self.alg.p() as u128 * self.degree() as u128;
        binomial(top + self.alg.nvars() as u128, self.alg.nvars() as u128)
    }

    pub fn check_budget(&self) -> Result<()> {
        let estimate = self.cost_estimate();
        if estimate > self.budget {
            Err(Error::ResourceLimit {
                estimate,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// Teichmüller lifts `U_i = [u_i]`.
    pub fn lifts(&self) -> &[WeylW2] {
        self.caches
            .lifts
            .get_or_init(|| self.u.iter().map(WeylK::teich_lift).collect())
    }

    /// The matrix `(u_ij)` with `[U_i, U_j] = ω_{ij} + p·[u_ij]`.
    pub fn u_ij_matrix(&self) -> Result<&[Vec<WeylK>]> {
        if let Some(m) = self.caches.u_ij.get() {
            return Ok(m);
        }
        let size = self.alg.nvars();
        let lifts = self.lifts();
        let mut m = vec![vec![WeylK::zero(&self.alg); size]; size];
        for i in 0..size {
            for j in i + 1..size {
                let diff = &lifts[i].commutator(&lifts[j]) - &WeylW2::from_int(&self.alg, self.alg.omega(i, j));
                let (first, second) = diff.decompose();
                if !first.is_zero() {
                    return Err(Error::InternalInconsistency(format!(
                        "[U{}, U{}] does not reduce to omega",
                        i + 1,
                        j + 1
                    )));
                }
                m[j][i] = -&second;
                m[i][j] = second;
            }
        }
        Ok(self.caches.u_ij.get_or_init(|| m))
    }

    /// `c_ij = ad(u_i)^{p−1} ad(u_j)^{p−1} (u_ij)`, as polynomials in `x`.
    pub fn obstruction_c(&self) -> Result<&PolyMatrix> {
        if let Some(c) = self.caches.c.get() {
            return Ok(c);
        }
        let uij = self.u_ij_matrix()?;
        let size = self.alg.nvars();
        let p = self.alg.p();
        let mut c = PolyMatrix::zeros(&self.alg, VarTag::X, size, size);
        for i in 0..size {
            for j in i + 1..size {
                let e = self.u[i].ad_pow(p - 1, &self.u[j].ad_pow(p - 1, &uij[i][j]));
                let poly = e
                    .to_center_poly()
                    .map_err(|_| Error::CentralityViolation { i: i + 1, j: j + 1 })?;
                c[(j, i)] = -&poly;
                c[(i, j)] = poly;
            }
        }
        Ok(self.caches.c.get_or_init(|| c))
    }

    /// `c_ij` read off from `[U_i^p, U_j^p] + p·ω_{ij} = p·[c_ij]`.
    pub fn obstruction_c_oracle(&self) -> Result<PolyMatrix> {
        self.check_budget()?;
        let size = self.alg.nvars();
        let p = self.alg.p() as i64;
        let powers: Vec<WeylW2> = self.lifts().iter().map(WeylW2::p_power).collect();
        let mut c = PolyMatrix::zeros(&self.alg, VarTag::X, size, size);
        for i in 0..size {
            for j in 0..size {
                if i == j {
                    continue;
                }
                let sum = &powers[i].commutator(&powers[j]) + &WeylW2::from_int(&self.alg, p * self.alg.omega(i, j));
                let second = sum.divide_by_p()?;
                c[(i, j)] = second
                    .to_center_poly()
                    .map_err(|_| Error::CentralityViolation { i: i + 1, j: j + 1 })?;
            }
        }
        Ok(c)
    }

    /// `φ(x_i) = u_i^p`, as polynomials in `x`.
    pub fn center_images(&self) -> &[Poly] {
        self.caches.center.get_or_init(|| {
            self.u
                .iter()
                .map(|u| u.p_power().to_center_poly().expect("p-th powers are central"))
                .collect()
        })
    }

    /// `J_φ ω⁻¹ J_φᵀ = ω⁻¹ + C`.
    pub fn check_jacobian_identity(&self) -> Result<bool> {
        let j = center::jacobian(self.center_images());
        let winv = center::omega_inverse(&self.alg, VarTag::X);
        let lhs = &(&j * &winv) * &j.transpose();
        Ok(lhs == &winv + self.obstruction_c()?)
    }

    /// `deg u_l + deg u_{n+l} < 2p` for every pair.
    pub fn degree_bound(&self) -> bool {
        let n = self.alg.n();
        let p = self.alg.p();
        (0..n).all(|l| {
            let d = |x: &WeylK| x.degree().unwrap_or(0);
            d(&self.u[l]) + d(&self.u[n + l]) < 2 * p
        })
    }

    /// The substitution `z_i ↦ u_i`.
    pub fn apply(&self, f: &WeylK) -> WeylK {
        assert!(f.algebra() == &self.alg, "{}", Error::ParamsMismatch);
        let mut powers: HashMap<(usize, u32), WeylK> = HashMap::new();
        let mut acc = WeylK::zero(&self.alg);
        for (m, c) in f.terms() {
            let mut t = WeylK::constant(&self.alg, *c);
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((i, e))
                    .or_insert_with(|| self.u[i].pow(e as u64))
                    .clone();
                t = &t * &pw;
            }
            acc = &acc + &t;
        }
        acc
    }

    /// `self ∘ other`: `z_i ↦ self(other(z_i))`.
    pub fn compose(&self, other: &Endo) -> Result<Endo> {
        let u = other.u.iter().map(|g| self.apply(g)).collect();
        Ok(Endo::validate(&self.alg, u)?.with_budget(self.budget.min(other.budget)))
    }

    pub fn analyze(&self) -> Result<ObstructionReport> {
        self.check_budget()?;
        let c = self.obstruction_c()?.clone();
        let images = self.center_images();
        let etale = center::is_etale(images);
        Ok(ObstructionReport {
            liftable: c.is_zero(),
            poisson: center::is_poisson_morphism(images),
            etale,
            injective_certified: etale,
            degree: self.degree(),
            degree_bound_met: self.degree_bound(),
            c,
        })
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// The triangular example `(z₁ + z₂^p z₃^{p−1}, z₂, z₃, z₄)` in `A₂(F_p)`.
pub fn triangular_example(p: u32) -> Result<Endo> {
    let alg = Algebra::new(2, crate::scalars::Field::prime(p)?)?;
    let k = alg.field().clone();
    let mut u: Vec<WeylK> = (0..4).map(|i| WeylK::generator(&alg, i)).collect();
    u[0] = &u[0] + &WeylK::monomial(&alg, MultiIndex::from_slice(&[0, p, p - 1, 0]), k.one());
    Endo::validate(&alg, u)
}

/// The family `(z₁, z₂ + z₂^p z₁^i)` in `A₁(F_p)`.
pub fn etale_family(p: u32, i: u32) -> Result<Endo> {
    let alg = Algebra::new(1, crate::scalars::Field::prime(p)?)?;
    let k = alg.field().clone();
    let u = vec![
        WeylK::generator(&alg, 0),
        &WeylK::generator(&alg, 1) + &WeylK::monomial(&alg, MultiIndex::from_slice(&[i, p]), k.one()),
    ];
    Endo::validate(&alg, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::x;
    use crate::weyl::tests::alg;

    fn z(a: &Algebra, i: usize) -> WeylK {
        WeylK::generator(a, i - 1)
    }

    #[test]
    fn validate_examples() {
        let a = alg(1, 3);
        Endo::identity(&a);
        match Endo::validate(&a, vec![z(&a, 1), z(&a, 1)]) {
            Err(Error::RelationViolation { i, j, residual }) => {
                assert_eq!((i, j), (1, 2));
                assert_eq!(residual, "1");
            }
            other => panic!("{other:?}"),
        }
        let tri = triangular_example(3).unwrap();
        assert_eq!(tri.degree(), 5);
        assert_eq!(Endo::identity(&a).degree(), 1);
        assert_eq!(Endo::swap(&a, 0).degree(), 1);
    }

    #[test]
    fn u_ij_examples() {
        let a = alg(1, 3);
        let id = Endo::identity(&a);
        assert!(id.u_ij_matrix().unwrap().iter().flatten().all(WeylK::is_zero));
        let e = Endo::validate(&a, vec![z(&a, 1), &z(&a, 2) + &z(&a, 1).pow(2)]).unwrap();
        assert!(e.u_ij_matrix().unwrap()[0][1].is_zero());
        // [z1, z2 + z2^3] over W2(F3): the correction comes only from the
        // contraction coefficient 3 = p·1 in [z1, z2^3] = -3 z2^2
        let e = etale_family(3, 0).unwrap();
        let u12 = e.u_ij_matrix().unwrap()[0][1].clone();
        assert_eq!(u12, -z(&a, 2).pow(2));
    }

    #[test]
    fn obstruction_examples() {
        let a = alg(1, 3);
        let id = Endo::identity(&a);
        assert!(id.obstruction_c().unwrap().is_zero());
        assert!(id.obstruction_c_oracle().unwrap().is_zero());

        let tri = triangular_example(3).unwrap();
        let c = tri.obstruction_c().unwrap();
        let a2 = tri.algebra().clone();
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i, j) {
                    (0, 3) => -1,
                    (3, 0) => 1,
                    _ => 0,
                };
                assert_eq!(c[(i, j)], Poly::from_int(&a2, VarTag::X, expected), "c({},{})", i + 1, j + 1);
            }
        }
        assert_eq!(&tri.obstruction_c_oracle().unwrap(), c);

        let e = etale_family(3, 2).unwrap();
        assert!(!e.obstruction_c().unwrap().is_zero());
        assert_eq!(&e.obstruction_c_oracle().unwrap(), e.obstruction_c().unwrap());
    }

    #[test]
    fn c_is_antisymmetric_when_computed_both_ways() {
        let e = etale_family(3, 2).unwrap();
        let uij = e.u_ij_matrix().unwrap();
        let c21 = e.image(1).ad_pow(2, &e.image(0).ad_pow(2, &uij[1][0]));
        assert_eq!(c21.to_center_poly().unwrap(), e.obstruction_c().unwrap()[(1, 0)]);
    }

    #[test]
    fn center_image_examples() {
        let a = alg(2, 3);
        let id = Endo::identity(&a);
        assert_eq!(id.center_images(), &(1..=4).map(|i| x(&a, i)).collect::<Vec<_>>()[..]);
        let tri = triangular_example(3).unwrap();
        let a2 = tri.algebra().clone();
        let expected = &(&x(&a2, 1) + &(&x(&a2, 2).pow(3) * &x(&a2, 3).pow(2))) - &x(&a2, 2);
        assert_eq!(tri.center_images()[0], expected);
        assert_eq!(tri.center_images()[1..], [x(&a2, 2), x(&a2, 3), x(&a2, 4)]);
        let e = etale_family(3, 0).unwrap();
        let a1 = e.algebra().clone();
        assert_eq!(e.center_images(), &[x(&a1, 1), &x(&a1, 2) + &x(&a1, 2).pow(3)]);
    }

    #[test]
    fn analysis_examples() {
        let a = alg(2, 3);
        let r = Endo::identity(&a).analyze().unwrap();
        assert!(r.liftable && r.poisson && r.etale && r.degree_bound_met);
        let tri = triangular_example(3).unwrap();
        let r = tri.analyze().unwrap();
        assert!(!r.liftable && !r.poisson && r.etale);
        assert!(tri.check_jacobian_identity().unwrap());
        for i in 0..3 {
            let e = etale_family(3, i).unwrap();
            let r = e.analyze().unwrap();
            assert_eq!(r.liftable, i < 2, "i = {i}");
            assert_eq!(r.poisson, i < 2);
            assert_eq!(r.etale, i < 2);
            assert_eq!(r.degree_bound_met, i < 2);
            assert!(e.check_jacobian_identity().unwrap());
        }
    }

    #[test]
    fn compose_and_apply() {
        let tri = triangular_example(3).unwrap();
        let a = tri.algebra().clone();
        let k = a.field().clone();
        let mut inv: Vec<WeylK> = (0..4).map(|i| WeylK::generator(&a, i)).collect();
        inv[0] = &inv[0] - &WeylK::monomial(&a, MultiIndex::from_slice(&[0, 3, 2, 0]), k.one());
        let inv = Endo::validate(&a, inv).unwrap();
        assert_eq!(tri.compose(&inv).unwrap(), Endo::identity(&a));
        assert_eq!(inv.compose(&tri).unwrap(), Endo::identity(&a));
        for i in 0..4 {
            assert_eq!(tri.apply(&WeylK::generator(&a, i)), *tri.image(i));
        }
        let f = &(&z(&a, 2) * &z(&a, 1)) + &z(&a, 3).pow(2);
        assert_eq!(Endo::identity(&a).apply(&f), f);
        let g = &z(&a, 4) * &z(&a, 2);
        assert_eq!(tri.apply(&(&f * &g)), &tri.apply(&f) * &tri.apply(&g));
        let s = Endo::swap(&a, 1);
        assert_eq!(s.compose(&tri).unwrap().compose(&inv).unwrap().compose(&s).unwrap(), {
            let s2 = s.compose(&s).unwrap();
            s2.compose(&Endo::identity(&a)).unwrap()
        });
    }

    #[test]
    fn elementary_examples() {
        let a = alg(1, 3);
        assert_eq!(Endo::elementary(&WeylK::zero(&a), Half::Second).unwrap(), Endo::identity(&a));
        let e = Endo::elementary(&z(&a, 2).pow(2), Half::Second).unwrap();
        assert_eq!(e.image(0), &(&z(&a, 1) + &z(&a, 2).scale_int(2)));
        assert_eq!(e.image(1), &z(&a, 2));
        let e = Endo::elementary(&z(&a, 2).pow(4), Half::Second).unwrap();
        assert_eq!(e.degree(), 3);
        let e = Endo::elementary(&z(&a, 1).pow(3), Half::First).unwrap();
        assert_eq!(e.image(1), &z(&a, 2));
        assert!(matches!(
            Endo::elementary(&z(&a, 1), Half::Second),
            Err(Error::NotInCommutingHalf)
        ));
    }

    #[test]
    fn budget_guard() {
        let tri = triangular_example(5).unwrap();
        tri.check_budget().unwrap();
        let tight = triangular_example(3).unwrap().with_budget(10);
        assert!(matches!(tight.analyze(), Err(Error::ResourceLimit { .. })));
        assert_eq!(binomial(6, 2), 15);
    }
}
