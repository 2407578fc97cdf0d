//! Seeded generator of valid endomorphisms.
//!
//! Random images almost never satisfy the commutation relations, so every
//! corpus element is a composition of maps that are valid by construction:
//! symplectic transvections, elementary maps from a generating function in
//! one commuting half, pair permutations, and the triangular and étale
//! example families (optionally embedded into a single conjugate pair).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::endo::{etale_family, Endo, Half};
use crate::error::Result;
use crate::monomial::MultiIndex;
use crate::scalars::Field;
use crate::weyl::{Algebra, WeylK};

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub primes: Vec<u32>,
    pub ns: Vec<usize>,
    pub count: usize,
    /// Elements whose cost estimate exceeds this are redrawn.
    pub max_cost: u128,
    /// Elements whose images have more terms in total are redrawn.
    pub max_terms: usize,
    /// At most this many nonlinear factors per composition.
    pub max_steps: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0,
            primes: vec![2, 3, 5],
            ns: vec![1, 2],
            count: 100,
            max_cost: 200_000,
            max_terms: 40,
            max_steps: 2,
        }
    }
}

/// Generates `cfg.count` endomorphisms, cycling through every `(p, n)`
/// combination so each is represented.
pub fn generate(cfg: &CorpusConfig) -> Result<Vec<Endo>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut combos = Vec::new();
    for &p in &cfg.primes {
        for &n in &cfg.ns {
            combos.push(Algebra::new(n, Field::prime(p)?)?);
        }
    }
    let mut out = Vec::with_capacity(cfg.count);
    for idx in 0..cfg.count {
        let alg = &combos[idx % combos.len()];
        out.push(random_endo(&mut rng, alg, cfg)?);
    }
    Ok(out)
}

/// A random valid endomorphism of `alg` within the size limits of `cfg`.
pub fn random_endo<R: Rng>(rng: &mut R, alg: &Algebra, cfg: &CorpusConfig) -> Result<Endo> {
    let too_big = |e: &Endo| {
        e.cost_estimate() > cfg.max_cost || e.images().iter().map(WeylK::len).sum::<usize>() > cfg.max_terms
    };
    'draw: loop {
        let steps = rng.gen_range(1..=cfg.max_steps.max(1));
        let mut e = random_linear(rng, alg)?;
        for _ in 0..steps {
            e = e.compose(&random_generator(rng, alg)?)?;
            if too_big(&e) {
                continue 'draw;
            }
            e = e.compose(&random_linear(rng, alg)?)?;
            if too_big(&e) {
                continue 'draw;
            }
        }
        return Ok(e);
    }
}

fn random_scalar<R: Rng>(rng: &mut R, k: &Field) -> crate::scalars::Fq {
    k.from_int(rng.gen_range(0..k.p() as i64))
}

fn random_unit<R: Rng>(rng: &mut R, k: &Field) -> crate::scalars::Fq {
    k.from_int(rng.gen_range(1..k.p() as i64))
}

/// `z_i ↦ z_i + c [ℓ, z_i] ℓ` for a linear form `ℓ`; valid in every
/// characteristic because `[ℓ, z_i]` is a scalar.
pub fn transvection(alg: &Algebra, w: &[crate::scalars::Fq], c: crate::scalars::Fq) -> Result<Endo> {
    let nv = alg.nvars();
    let ell = (0..nv).fold(WeylK::zero(alg), |acc, j| &acc + &WeylK::generator(alg, j).scale(w[j]));
    let u = (0..nv)
        .map(|i| {
            let z = WeylK::generator(alg, i);
            let a = ell.commutator(&z).constant_term();
            &z + &ell.scale(alg.field().mul(c, a))
        })
        .collect();
    Endo::validate(alg, u)
}

/// A product of a few transvections and possibly a pair permutation.
pub fn random_linear<R: Rng>(rng: &mut R, alg: &Algebra) -> Result<Endo> {
    let k = alg.field();
    let mut e = Endo::identity(alg);
    for _ in 0..rng.gen_range(0..=2) {
        let w: Vec<_> = (0..alg.nvars()).map(|_| random_scalar(rng, k)).collect();
        e = e.compose(&transvection(alg, &w, random_unit(rng, k))?)?;
    }
    if alg.n() > 1 && rng.gen_bool(0.3) {
        e = e.compose(&Endo::permute_pairs(alg, 0, 1))?;
    }
    Ok(e)
}

/// One nonlinear generator: an elementary map with a random generating
/// function of degree at most `p + 1`, or a member of an example family.
pub fn random_generator<R: Rng>(rng: &mut R, alg: &Algebra) -> Result<Endo> {
    let p = alg.p();
    let n = alg.n();
    match rng.gen_range(0..4) {
        0 | 1 => {
            let half = if rng.gen_bool(0.5) { Half::First } else { Half::Second };
            let vars: Vec<usize> = match half {
                Half::First => (0..n).collect(),
                Half::Second => (n..2 * n).collect(),
            };
            let k = alg.field();
            let mut g = WeylK::zero(alg);
            for _ in 0..rng.gen_range(1..=2) {
                let deg = rng.gen_range(2..=p + 1);
                let mut m = MultiIndex::zero(alg.nvars());
                for _ in 0..deg {
                    m[*vars.choose(rng).expect("nonempty half")] += 1;
                }
                g = &g + &WeylK::monomial(alg, m, random_unit(rng, k));
            }
            Endo::elementary(&g, half)
        }
        2 => {
            let l = rng.gen_range(0..n);
            let one = etale_family(p, rng.gen_range(0..p))?;
            embed_pair(&one, alg, l)
        }
        _ => {
            if n == 1 {
                return etale_family(p, rng.gen_range(0..p));
            }
            // z_l ↦ z_l + z_m^p z_{n+l}^b with m ≠ l; z_m^p is central
            let l = rng.gen_range(0..n);
            let m = (l + 1) % n;
            let b = rng.gen_range(0..p);
            let mut idx = MultiIndex::zero(alg.nvars());
            idx[m] = p;
            idx[n + l] = b;
            let mut u: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
            u[l] = &u[l] + &WeylK::monomial(alg, idx, alg.field().one());
            Endo::validate(alg, u)
        }
    }
}

/// Acts by `e` (an endomorphism of `A₁`) on the pair `(z_l, z_{n+l})` of
/// `alg` and fixes the other generators.
pub fn embed_pair(e: &Endo, alg: &Algebra, l: usize) -> Result<Endo> {
    let n = alg.n();
    let lift = |f: &WeylK| {
        let terms = f.terms().iter().map(|(m, c)| {
            let mut idx = MultiIndex::zero(alg.nvars());
            idx[l] = m[0];
            idx[n + l] = m[1];
            (idx, *c)
        });
        WeylK::from_terms(alg, terms)
    };
    let mut u: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
    u[l] = lift(e.image(0));
    u[n + l] = lift(e.image(1));
    Endo::validate(alg, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_mixed() {
        let cfg = CorpusConfig {
            count: 24,
            ..Default::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.len(), 24);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.images(), y.images());
            assert!(x.cost_estimate() <= cfg.max_cost);
            assert!(x.images().iter().map(WeylK::len).sum::<usize>() <= cfg.max_terms);
        }
        let lift: Vec<bool> = a.iter().map(|e| e.analyze().unwrap().liftable).collect();
        assert!(lift.iter().any(|&l| l) && lift.iter().any(|&l| !l));
    }

    #[test]
    fn transvections_are_symplectic() {
        let alg = Algebra::new(2, Field::prime(3).unwrap()).unwrap();
        let k = alg.field();
        let w: Vec<_> = [1, 2, 0, 1].iter().map(|&c| k.from_int(c)).collect();
        let e = transvection(&alg, &w, k.from_int(2)).unwrap();
        assert_eq!(e.degree(), 1);
        assert!(e.analyze().unwrap().liftable);
    }
}
