//! The center `Z = k[x₁..x₂ₙ]`: Poisson bracket, Jacobians and the Poisson
//! and étale predicates for a map given by its `2n` images.

use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{Poly, VarTag};
use crate::weyl::{Algebra, WeylK};

/// `{f, g} = (∇f)ᵀ ω⁻¹ (∇g) = Σ_l (∂_l f ∂_{n+l} g − ∂_{n+l} f ∂_l g)`.
pub fn poisson(f: &Poly, g: &Poly) -> Poly {
    let alg = f.algebra();
    let n = alg.n();
    let mut acc = Poly::zero(alg, f.tag());
    for l in 0..n {
        acc = &acc + &(&f.pderiv(l) * &g.pderiv(n + l));
        acc = &acc - &(&f.pderiv(n + l) * &g.pderiv(l));
    }
    acc
}

/// The bracket computed as `[f̃, g̃]/p` in `Aₙ(W₂(k))`, where `f̃` is the
/// Teichmüller lift of `f(z₁^p, …, z₂ₙ^p)`.
pub fn poisson_witt_oracle(f: &Poly, g: &Poly) -> Result<Poly> {
    let lift = |h: &Poly| WeylK::from_center_poly(h).teich_lift();
    lift(f).commutator(&lift(g)).divide_by_p()?.to_center_poly()
}

/// `J_{ij} = ∂ images[i] / ∂ var_j`, in the variables the images live in.
pub fn jacobian(images: &[Poly]) -> PolyMatrix {
    let alg = images[0].algebra();
    let size = alg.nvars();
    assert_eq!(images.len(), size, "need 2n images");
    PolyMatrix::from_fn(alg, images[0].tag(), size, size, |i, j| images[i].pderiv(j))
}

/// `ω⁻¹ = −ω`.
pub fn omega_inverse(alg: &Algebra, tag: VarTag) -> PolyMatrix {
    -PolyMatrix::omega(alg, tag)
}

/// Checks `ω · (−ω) = Id`.
pub fn verify_omega_inverse(alg: &Algebra) -> Result<()> {
    let w = PolyMatrix::omega(alg, VarTag::X);
    if &w * &omega_inverse(alg, VarTag::X) == PolyMatrix::identity(alg, VarTag::X, alg.nvars()) {
        Ok(())
    } else {
        Err(Error::InternalInconsistency("omega inverse".into()))
    }
}

/// `J ω⁻¹ Jᵀ = ω⁻¹`.
pub fn is_poisson_morphism(images: &[Poly]) -> bool {
    let j = jacobian(images);
    let winv = omega_inverse(images[0].algebra(), images[0].tag());
    &(&j * &winv) * &j.transpose() == winv
}

/// `det J` is a nonzero constant.
pub fn is_etale(images: &[Poly]) -> bool {
    let d = jacobian(images).det();
    !d.is_zero() && d.is_constant()
}
