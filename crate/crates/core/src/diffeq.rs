//! The equations `γ^p + ∂_i^{p−1} γ = R_i` on `S` (and their Frobenius
//! twists `f_i` on `Z`) whose solutions decide liftability.

use crate::center;
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{Poly, VarTag};

#[derive(Clone, Debug)]
pub struct GammaSolution {
    pub gamma: Vec<Poly>,
    pub f: Vec<Poly>,
    pub j_gamma: PolyMatrix,
    pub j_f: PolyMatrix,
}

/// `ȳ_i`, the `p`-th root of `φ(x_i)(y^p)` in `S`.
pub fn phi_s(e: &Endo, i: usize) -> Poly {
    let img = &e.center_images()[i];
    let k = img.field().clone();
    let terms = img.terms().iter().map(|(m, c)| (m.clone(), k.pth_root(*c))).collect();
    Poly::from_sorted_terms(e.algebra(), VarTag::Y, terms)
}

/// `∂_i^{p−1} (Σ_{l ≤ n} ∂_i ȳ_l · ȳ_{n+l})`.
pub fn rhs_gamma(e: &Endo, i: usize) -> Poly {
    let ybar: Vec<Poly> = (0..e.algebra().nvars()).map(|j| phi_s(e, j)).collect();
    rhs_from_images(&ybar, i)
}

fn rhs_from_images(images: &[Poly], i: usize) -> Poly {
    let alg = images[0].algebra();
    let n = alg.n();
    let p = alg.p();
    let mut acc = Poly::zero(alg, images[0].tag());
    for l in 0..n {
        acc = &acc + &(&images[l].pderiv(i) * &images[n + l]);
    }
    acc.pderiv_iter(i, p - 1)
}

/// The unique `γ` with `γ^p + ∂_i^{p−1} γ = rhs`, found by descending on
/// total degree: a solution of degree `g ≥ 1` has `deg(rhs) = pg` with top
/// slice `(top slice of γ)^p`.
pub fn solve_gamma(rhs: &Poly, i: usize) -> Result<Poly> {
    let alg = rhs.algebra();
    let p = alg.p();
    let k = alg.field();
    let no_solution = || Error::NoSolution { index: i + 1 };
    let mut residual = rhs.clone();
    let mut gamma = Poly::zero(alg, rhs.tag());
    while let Some(d) = residual.degree() {
        if d < p {
            let c = k.pth_root(residual.constant_term());
            let g0 = Poly::constant(alg, rhs.tag(), c);
            residual = &residual - &g0.pow(p as u64);
            if !residual.is_zero() {
                return Err(no_solution());
            }
            gamma = &gamma + &g0;
            break;
        }
        if d % p != 0 {
            return Err(no_solution());
        }
        let slice = residual.homogeneous_part(d).pth_root().ok_or_else(no_solution)?;
        residual = &residual - &(&slice.pow(p as u64) + &slice.pderiv_iter(i, p - 1));
        gamma = &gamma + &slice;
    }
    if &(&gamma.pow(p as u64) + &gamma.pderiv_iter(i, p - 1)) != rhs {
        return Err(Error::InternalInconsistency("gamma plug-back failed".into()));
    }
    Ok(gamma)
}

/// `f_i ∈ Z` solving the same equation over the center with the images
/// `φ(x_l)`; checked against `γ_i^p`.
pub fn solve_f(e: &Endo, i: usize) -> Result<Poly> {
    let f = solve_gamma(&rhs_from_images(e.center_images(), i), i)?;
    let gamma = solve_gamma(&rhs_gamma(e, i), i)?;
    if gamma.frobenius_twist() != f {
        return Err(Error::InternalInconsistency(format!(
            "f_{} differs from gamma_{}^p",
            i + 1,
            i + 1
        )));
    }
    Ok(f)
}

pub fn solve_all(e: &Endo) -> Result<GammaSolution> {
    let nv = e.algebra().nvars();
    let mut gamma = Vec::with_capacity(nv);
    let mut f = Vec::with_capacity(nv);
    for i in 0..nv {
        let g = solve_gamma(&rhs_gamma(e, i), i)?;
        let fi = solve_gamma(&rhs_from_images(e.center_images(), i), i)?;
        if g.frobenius_twist() != fi {
            return Err(Error::InternalInconsistency(format!(
                "f_{} differs from gamma_{}^p",
                i + 1,
                i + 1
            )));
        }
        gamma.push(g);
        f.push(fi);
    }
    let j_gamma = center::jacobian(&gamma);
    let j_f = center::jacobian(&f);
    if j_gamma.frobenius_twist() != j_f {
        return Err(Error::InternalInconsistency("J_f is not the twist of J_gamma".into()));
    }
    Ok(GammaSolution { gamma, f, j_gamma, j_f })
}

/// `∂f_i/∂x_j = ∂f_j/∂x_i` for all `i, j`.
pub fn symmetry_criterion(e: &Endo) -> Result<bool> {
    Ok(solve_all(e)?.j_f.is_symmetric())
}

/// `Ĵᵀ ω Ĵ = ω + J_γᵀ − J_γ` over `S` and `J_φᵀ ω J_φ = ω + J_fᵀ − J_f` over `Z`.
pub fn check_matrix_id(e: &Endo) -> Result<bool> {
    let alg = e.algebra();
    let sol = solve_all(e)?;
    let ybar: Vec<Poly> = (0..alg.nvars()).map(|i| phi_s(e, i)).collect();
    let jhat = center::jacobian(&ybar);
    let wy = PolyMatrix::omega(alg, VarTag::Y);
    let s_level = &(&jhat.transpose() * &wy) * &jhat == &(&wy + &sol.j_gamma.transpose()) - &sol.j_gamma;
    let jphi = center::jacobian(e.center_images());
    let wx = PolyMatrix::omega(alg, VarTag::X);
    let z_level = &(&jphi.transpose() * &wx) * &jphi == &(&wx + &sol.j_f.transpose()) - &sol.j_f;
    Ok(s_level && z_level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::{etale_family, triangular_example};
    use crate::poly::tests::{x, y};
    use crate::weyl::tests::alg;

    #[test]
    fn phi_s_examples() {
        let a = alg(2, 3);
        let id = Endo::identity(&a);
        for i in 0..4 {
            assert_eq!(phi_s(&id, i), Poly::var(&a, VarTag::Y, i));
        }
        let tri = triangular_example(3).unwrap();
        let b = tri.algebra().clone();
        let expected = &(&y(&b, 1) + &(&y(&b, 2).pow(3) * &y(&b, 3).pow(2))) - &y(&b, 2);
        assert_eq!(phi_s(&tri, 0), expected);
        assert_eq!(phi_s(&tri, 0).pow(3), tri.center_images()[0].x_to_y());
        let e = etale_family(3, 0).unwrap();
        let c = e.algebra().clone();
        assert_eq!(phi_s(&e, 1), &y(&c, 2) + &y(&c, 2).pow(3));
    }

    #[test]
    fn rhs_examples() {
        let id = Endo::identity(&alg(2, 3));
        for i in 0..4 {
            assert!(rhs_gamma(&id, i).is_zero());
        }
        let tri = triangular_example(3).unwrap();
        let b = tri.algebra().clone();
        assert_eq!(rhs_gamma(&tri, 2), y(&b, 2).pow(3));
        for i in [0, 1, 3] {
            assert!(rhs_gamma(&tri, i).is_zero(), "i = {i}");
        }
    }

    #[test]
    fn solve_examples() {
        let a = alg(2, 3);
        assert!(solve_gamma(&Poly::zero(&a, VarTag::Y), 0).unwrap().is_zero());
        assert_eq!(solve_gamma(&y(&a, 2).pow(3), 2).unwrap(), y(&a, 2));
        let k = a.field().clone();
        let c = Poly::constant(&a, VarTag::Y, k.from_int(2));
        assert_eq!(solve_gamma(&c, 0).unwrap(), Poly::constant(&a, VarTag::Y, k.pth_root(k.from_int(2))));
        assert!(matches!(solve_gamma(&y(&a, 1), 0), Err(Error::NoSolution { index: 1 })));
        // γ = y1^2: γ^3 + ∂1^2 γ = y1^6 + 2
        let rhs = &y(&a, 1).pow(6) + &Poly::from_int(&a, VarTag::Y, 2);
        assert_eq!(solve_gamma(&rhs, 0).unwrap(), y(&a, 1).pow(2));
    }

    #[test]
    fn solution_examples() {
        let id = Endo::identity(&alg(2, 3));
        let sol = solve_all(&id).unwrap();
        assert!(sol.gamma.iter().chain(&sol.f).all(Poly::is_zero));
        assert!(symmetry_criterion(&id).unwrap());
        assert!(check_matrix_id(&id).unwrap());

        let tri = triangular_example(3).unwrap();
        let b = tri.algebra().clone();
        let sol = solve_all(&tri).unwrap();
        assert_eq!(sol.gamma[2], y(&b, 2));
        assert!(sol.gamma[0].is_zero() && sol.gamma[1].is_zero() && sol.gamma[3].is_zero());
        assert_eq!(solve_f(&tri, 2).unwrap(), x(&b, 2));
        assert!(!symmetry_criterion(&tri).unwrap());
        assert!(check_matrix_id(&tri).unwrap());

        for i in 0..3 {
            let e = etale_family(3, i).unwrap();
            assert_eq!(symmetry_criterion(&e).unwrap(), i < 2);
            assert!(check_matrix_id(&e).unwrap());
            if i < 2 {
                assert!(solve_all(&e).unwrap().gamma.iter().all(Poly::is_constant));
            }
        }
    }
}
