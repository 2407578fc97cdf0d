//! The splitting `Aₙ(k) ⊗_Z S ≅ Mat_{p^n}(S)` given by `z_i ↦ ν_i + y_i` on
//! `M = S[T₁..Tₙ]/(T₁^p, …, Tₙ^p)`, trace identities, and recovery of a
//! conjugating matrix from the images of the matrix units.

use std::collections::HashMap;

use crate::cohomology::psi_forward;
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::monomial::{boxed_indices, MultiIndex};
use crate::poly::{Poly, VarTag};
use crate::weyl::{Algebra, WeylK};

/// Operators on `M` in the basis `T^a` (`0 ≤ a_i < p`, lexicographic).
pub type OpMatrix = PolyMatrix;

fn basis(alg: &Algebra) -> Vec<MultiIndex> {
    boxed_indices(alg.n(), alg.p())
}

fn basis_index(alg: &Algebra, a: &MultiIndex) -> usize {
    let p = alg.p() as usize;
    a.iter().fold(0, |acc, &e| acc * p + e as usize)
}

/// `ν_i` is multiplication by `T_i` for `i < n` and `∂/∂T_{i−n}` otherwise.
pub fn nu(alg: &Algebra, i: usize) -> OpMatrix {
    let n = alg.n();
    let p = alg.p();
    let b = basis(alg);
    let size = b.len();
    let mut m = PolyMatrix::zeros(alg, VarTag::Y, size, size);
    for (col, a) in b.iter().enumerate() {
        if i < n {
            if a[i] + 1 < p {
                let mut t = a.clone();
                t[i] += 1;
                m[(basis_index(alg, &t), col)] = Poly::one(alg, VarTag::Y);
            }
        } else {
            let l = i - n;
            if a[l] > 0 {
                let mut t = a.clone();
                t[l] -= 1;
                m[(basis_index(alg, &t), col)] = Poly::from_int(alg, VarTag::Y, a[l] as i64);
            }
        }
    }
    m
}

/// The matrix model: `z_i ↦ ν_i + y_i`, extended multiplicatively along
/// normal-ordered monomials.
pub fn rep(f: &WeylK) -> OpMatrix {
    let alg = f.algebra();
    let size = (alg.p() as usize).pow(alg.n() as u32);
    let gens: Vec<OpMatrix> = (0..alg.nvars())
        .map(|i| &nu(alg, i) + &PolyMatrix::scalar(alg, VarTag::Y, size, &Poly::var(alg, VarTag::Y, i)))
        .collect();
    let mut powers: HashMap<(usize, u32), OpMatrix> = HashMap::new();
    let mut acc = PolyMatrix::zeros(alg, VarTag::Y, size, size);
    for (m, c) in f.terms() {
        let mut t = PolyMatrix::scalar(alg, VarTag::Y, size, &Poly::constant(alg, VarTag::Y, *c));
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = powers.entry((i, e)).or_insert_with(|| {
                let mut r = gens[i].clone();
                for _ in 1..e {
                    r = &r * &gens[i];
                }
                r
            });
            t = &t * pw;
        }
        acc = &acc + &t;
    }
    acc
}

/// `(−1)^n Tr(rep f)`, rewritten in the center variables.
pub fn trace_top_coefficient(e: &Endo, f: &WeylK) -> Result<Poly> {
    assert!(e.algebra() == f.algebra(), "{}", Error::ParamsMismatch);
    let tr = rep(f).trace();
    let signed = if e.algebra().n() % 2 == 1 { -tr } else { tr };
    signed
        .y_to_x()
        .ok_or_else(|| Error::InternalInconsistency("trace is not central".into()))
}

/// The `Z`-coefficient of `û₁^{p−1} ⋯ û₂ₙ^{p−1}` in the expansion of `f`,
/// read off from `ψ(f)`.
pub fn top_coefficient_via_psi(e: &Endo, f: &WeylK) -> Result<Poly> {
    let alg = e.algebra();
    let p = alg.p();
    let s = psi_forward(e, f)?;
    let terms = s
        .terms()
        .iter()
        .filter(|(m, _)| m.iter().all(|&x| x % p == p - 1))
        .map(|(m, c)| {
            let q = MultiIndex::from_slice(&m.iter().map(|&x| x / p).collect::<Vec<_>>());
            (q, *c)
        });
    Ok(Poly::from_terms(alg, VarTag::X, terms))
}

/// `ad(a₁)^{p−1} ⋯ ad(a₂ₙ)^{p−1} (f)`.
pub fn ad_chain(ops: &[WeylK], f: &WeylK) -> WeylK {
    let p = f.algebra().p();
    ops.iter().rev().fold(f.clone(), |acc, a| a.ad_pow(p - 1, &acc))
}

/// Given the images `F[i][j]` of the matrix units `E_ij` under a ring
/// endomorphism of `Mat_m(S)`, returns `G` with `F_ij G = G E_ij` and
/// `det G` a unit.
pub fn recover_conjugator(images: &[Vec<OpMatrix>]) -> Result<OpMatrix> {
    let m = images.len();
    if m == 0 || images.iter().any(|row| row.len() != m) {
        return Err(Error::NotAHomomorphism("need an m×m family of images".into()));
    }
    let f11 = &images[0][0];
    let alg = f11.algebra().clone();
    if f11.is_zero() {
        return Err(Error::NotAHomomorphism("image of E_11 vanishes".into()));
    }
    // a nonzero column of F11 spans its image after removing the content
    let col = (0..f11.cols())
        .find(|&c| f11.column(c).iter().any(|e| !e.is_zero()))
        .expect("nonzero matrix has a nonzero column");
    let column = f11.column(col);
    let content = Poly::gcd_many(column.iter().filter(|e| !e.is_zero())).expect("nonzero column");
    let r: Vec<Poly> = column
        .iter()
        .map(|e| e.div_exact(&content).expect("content divides"))
        .collect();
    let vs: Vec<Vec<Poly>> = (0..m).map(|i| images[i][0].apply(&r)).collect();
    let g = PolyMatrix::from_fn(&alg, VarTag::Y, m, m, |row, c| vs[c][row].clone());
    for i in 0..m {
        for j in 0..m {
            let unit = PolyMatrix::unit(&alg, VarTag::Y, m, i, j);
            if &images[i][j] * &g != &g * &unit {
                return Err(Error::NotAHomomorphism(format!(
                    "F_{}{} G != G E_{}{}",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let det = g.det();
    if det.is_zero() || !det.is_constant() {
        return Err(Error::NotAHomomorphism("recovered matrix is not invertible".into()));
    }
    Ok(g)
}

/// For the image of a scalar matrix `s·Id`, returns the scalar.
pub fn center_value(image: &OpMatrix) -> Result<Poly> {
    let s = image[(0, 0)].clone();
    if *image != PolyMatrix::scalar(image.algebra(), image.tag(), image.rows(), &s) {
        return Err(Error::NotAHomomorphism("center is not mapped to itself".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::triangular_example;
    use crate::poly::tests::y;
    use crate::weyl::tests::{alg, arb_elem, build_k};
    use proptest::prelude::*;

    #[test]
    fn nu_examples() {
        let a = alg(1, 2);
        let m = |rows: [[i64; 2]; 2]| PolyMatrix::from_ints(&a, VarTag::Y, 2, |r, c| rows[r][c]);
        assert_eq!(nu(&a, 0), m([[0, 0], [1, 0]]));
        assert_eq!(nu(&a, 1), m([[0, 1], [0, 0]]));
        for (n, p) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let a = alg(n, p);
            let size = (p as usize).pow(n as u32);
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let gi = rep(&WeylK::generator(&a, i));
                    let gj = rep(&WeylK::generator(&a, j));
                    let comm = &(&gi * &gj) - &(&gj * &gi);
                    let expected = PolyMatrix::scalar(&a, VarTag::Y, size, &Poly::from_int(&a, VarTag::Y, a.omega(i, j)));
                    assert_eq!(comm, expected);
                }
            }
        }
    }

    #[test]
    fn rep_examples() {
        let a = alg(1, 3);
        assert_eq!(rep(&WeylK::one(&a)), PolyMatrix::identity(&a, VarTag::Y, 3));
        assert_eq!(
            rep(&WeylK::generator(&a, 0).pow(3)),
            PolyMatrix::scalar(&a, VarTag::Y, 3, &y(&a, 1).pow(3))
        );
        let f = &WeylK::generator(&a, 0).pow(2) * &WeylK::generator(&a, 1).pow(2);
        assert_eq!(rep(&f).trace(), Poly::from_int(&a, VarTag::Y, -1));
    }

    #[test]
    fn trace_examples() {
        let a = alg(2, 3);
        let id = Endo::identity(&a);
        assert!(trace_top_coefficient(&id, &WeylK::one(&a)).unwrap().is_zero());
        let mut top = WeylK::one(&a);
        for i in 0..4 {
            top = &top * &WeylK::generator(&a, i).pow(2);
        }
        assert_eq!(trace_top_coefficient(&id, &top).unwrap(), Poly::one(&a, VarTag::X));
        let tri = triangular_example(3).unwrap();
        let b = tri.algebra().clone();
        let mut f = WeylK::one(&b);
        for i in 0..4 {
            f = &f * &tri.image(i).pow(2);
        }
        assert_eq!(trace_top_coefficient(&tri, &f).unwrap(), Poly::one(&b, VarTag::X));
        assert_eq!(top_coefficient_via_psi(&tri, &f).unwrap(), Poly::one(&b, VarTag::X));
    }

    #[test]
    fn recover_identity_family() {
        let a = alg(1, 3);
        let m = 3;
        let images: Vec<Vec<OpMatrix>> = (0..m)
            .map(|i| (0..m).map(|j| PolyMatrix::unit(&a, VarTag::Y, m, i, j)).collect())
            .collect();
        let g = recover_conjugator(&images).unwrap();
        let s = g[(0, 0)].clone();
        assert!(s.is_constant() && !s.is_zero());
        assert_eq!(g, PolyMatrix::scalar(&a, VarTag::Y, m, &s));
    }

    #[test]
    fn recover_planted_conjugation() {
        let a = alg(1, 3);
        let g0 = &PolyMatrix::identity(&a, VarTag::Y, 2) + &PolyMatrix::unit(&a, VarTag::Y, 2, 0, 1).scale(&y(&a, 1));
        let g0_inv = &PolyMatrix::identity(&a, VarTag::Y, 2) - &PolyMatrix::unit(&a, VarTag::Y, 2, 0, 1).scale(&y(&a, 1));
        assert_eq!(&g0 * &g0_inv, PolyMatrix::identity(&a, VarTag::Y, 2));
        let images: Vec<Vec<OpMatrix>> = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| &(&g0 * &PolyMatrix::unit(&a, VarTag::Y, 2, i, j)) * &g0_inv)
                    .collect()
            })
            .collect();
        let g = recover_conjugator(&images).unwrap();
        let ratio = &g * &g0_inv;
        let s = ratio[(0, 0)].clone();
        assert!(s.is_constant() && !s.is_zero());
        assert_eq!(ratio, PolyMatrix::scalar(&a, VarTag::Y, 2, &s));
        // a twist y ↦ y^2 on scalars is seen only through the center
        let sigma = |s: &PolyMatrix| s.map(|e| {
            let terms = e.terms().iter().map(|(m, c)| (m.scale(2), *c));
            Poly::from_terms(&a, VarTag::Y, terms)
        });
        let scalar_image = &(&g0 * &sigma(&PolyMatrix::scalar(&a, VarTag::Y, 2, &y(&a, 1)))) * &g0_inv;
        assert_eq!(center_value(&scalar_image).unwrap(), y(&a, 1).pow(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(25))]

        #[test]
        fn rep_is_multiplicative(
            pi in 0usize..2,
            f in arb_elem(2, 5, 3),
            g in arb_elem(2, 5, 3),
        ) {
            let a = alg(2, [2u32, 3][pi]);
            let (f, g) = (build_k(&a, &f), build_k(&a, &g));
            prop_assert_eq!(rep(&(&f * &g)), &rep(&f) * &rep(&g));
        }

        #[test]
        fn top_coefficient_routes_agree(
            pi in 0usize..2,
            which in 0usize..2,
            f in arb_elem(2, 5, 5),
        ) {
            let p = [2u32, 3][pi];
            let e = if which == 0 { triangular_example(p).unwrap() } else { Endo::swap(&alg(2, p), 0) };
            let f = build_k(e.algebra(), &f);
            prop_assert_eq!(trace_top_coefficient(&e, &f).unwrap(), top_coefficient_via_psi(&e, &f).unwrap());
            let z: Vec<WeylK> = (0..4).map(|i| WeylK::generator(e.algebra(), i)).collect();
            prop_assert_eq!(ad_chain(e.images(), &f), ad_chain(&z, &f));
        }
    }
}
