//! The polarized Heisenberg nilmanifold and its lattice automorphisms.
//!
//! Points carry coordinates `(x, y, z)` with the group law
//! `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`, which makes `Z^3` a lattice
//! and `[0,1)^3` a strict fundamental domain. Scalars are generic so the
//! same code runs exactly on rationals (for verification) and on doubles
//! (for Monte-Carlo sampling). Lattice-preserving automorphisms are a
//! `det = 1` block on `(x, y)` together with the quadratic correction
//! `kappa(x,y) = [(ax+by)(cx+dy) - xy]/2 + px + qy`, the unique shape for
//! which the homomorphism identity holds; the linear part absorbs the
//! half-integer parity so that `kappa(Z^2)` is integral.

pub mod boxmap;
pub mod mc;
pub mod testfn;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::UnimodularMatrix;

pub use boxmap::{
    boxmap_equidistribution_test, boxmap_obstruction_search, BoxMap, DichotomyParams,
    EquidistributionReport, ExactDirections,
};
pub use mc::{mc_correlation, McEstimate};
pub use testfn::{Bump, CharacterBump, HeisTestFn, PiExpr};

/// Scalar interface shared by `f64` and `BigRational`.
pub trait HeisScalar: Clone + std::fmt::Debug + PartialEq + Default {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn floor(&self) -> Self;
    fn from_rat(q: &BigRational) -> Self;
    fn is_integral(&self) -> bool;
}

impl HeisScalar for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn from_rat(q: &BigRational) -> Self {
        super::toral::rational_to_f64(q)
    }
    fn is_integral(&self) -> bool {
        *self == f64::floor(*self)
    }
}

impl HeisScalar for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn from_rat(q: &BigRational) -> Self {
        q.clone()
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// A point of the Heisenberg group in polarized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisPoint<S: HeisScalar> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: HeisScalar> HeisPoint<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    pub fn identity() -> Self {
        Self { x: S::default(), y: S::default(), z: S::default() }
    }

    /// Group law `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y')`.
    pub fn mul(&self, o: &Self) -> Self {
        Self {
            x: self.x.add(&o.x),
            y: self.y.add(&o.y),
            z: self.z.add(&o.z).add(&self.x.mul(&o.y)),
        }
    }

    /// Inverse `(-x, -y, -z + xy)`.
    pub fn inverse(&self) -> Self {
        Self {
            x: self.x.neg(),
            y: self.y.neg(),
            z: self.z.neg().add(&self.x.mul(&self.y)),
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.x.is_integral() && self.y.is_integral() && self.z.is_integral()
    }

    /// Reduction into the strict fundamental domain `[0,1)^3`: returns
    /// `(r, lambda)` with `p = r * lambda` and `lambda` in the lattice.
    /// The reduction order is `y`, then `x`, then `z`; the representative
    /// depends only on the coset `p Lambda`.
    pub fn reduce(&self) -> (Self, Self) {
        let b = self.y.floor().neg();
        let step1 = self.mul(&Self::new(S::default(), b.clone(), S::default()));
        let a = step1.x.floor().neg();
        let step2 = step1.mul(&Self::new(a.clone(), S::default(), S::default()));
        let c = step2.z.floor().neg();
        let r = step2.mul(&Self::new(S::default(), S::default(), c.clone()));
        let mu = Self::new(a, b, c);
        (r, mu.inverse())
    }
}

impl HeisPoint<BigRational> {
    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Self::new(
            BigRational::from(BigInt::from(x)),
            BigRational::from(BigInt::from(y)),
            BigRational::from(BigInt::from(z)),
        )
    }

    pub fn from_rationals(x: (i64, i64), y: (i64, i64), z: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(x.0.into(), x.1.into()),
            BigRational::new(y.0.into(), y.1.into()),
            BigRational::new(z.0.into(), z.1.into()),
        )
    }
}

/// A lattice-preserving automorphism: `(x,y) -> A (x,y)` with `det A = 1`,
/// `z -> z + kappa(x,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisAuto {
    block: UnimodularMatrix,
    /// Linear part `(p, q)` of the correction; validated so that
    /// `kappa(Z^2)` is integral.
    lin: (BigRational, BigRational),
}

impl HeisAuto {
    /// Quadratic coefficients `(alpha, beta, gamma)` of the canonical
    /// correction: `alpha = ac/2, beta = bc, gamma = bd/2`.
    fn quad_coeffs(block: &UnimodularMatrix) -> (BigRational, BigRational, BigRational) {
        let a = block.at(0, 0).clone();
        let b = block.at(0, 1).clone();
        let c = block.at(1, 0).clone();
        let d = block.at(1, 1).clone();
        let two = BigInt::from(2);
        (
            BigRational::new(&a * &c, two.clone()),
            BigRational::from(&b * &c),
            BigRational::new(&b * &d, two),
        )
    }

    pub fn new(block: UnimodularMatrix, lin: (BigRational, BigRational)) -> Result<Self> {
        if block.dim() != 2 {
            return Err(Error::validation("automorphism block must be 2x2"));
        }
        if block.det_sign() != 1 {
            return Err(Error::validation(
                "automorphism block must have determinant +1 (the center factor)",
            ));
        }
        let (alpha, _beta, gamma) = Self::quad_coeffs(&block);
        // kappa integral on Z^2 iff alpha + p and gamma + q are integers
        // (beta = bc is always integral, and 2 alpha, 2 gamma are integral
        // by construction)
        if !(&alpha + &lin.0).is_integer() || !(&gamma + &lin.1).is_integer() {
            return Err(Error::validation(
                "linear correction does not make the quadratic correction lattice-integral",
            ));
        }
        Ok(Self { block, lin })
    }

    /// Canonical linear correction: `p = -ac/2 mod 1`, `q = -bd/2 mod 1`.
    pub fn from_block(block: UnimodularMatrix) -> Result<Self> {
        let (alpha, _beta, gamma) = Self::quad_coeffs(&block);
        let p = if alpha.is_integer() {
            BigRational::zero()
        } else {
            BigRational::new((-1).into(), 2.into())
        };
        let q = if gamma.is_integer() {
            BigRational::zero()
        } else {
            BigRational::new((-1).into(), 2.into())
        };
        Self::new(block, (p, q))
    }

    pub fn identity() -> Self {
        Self::from_block(UnimodularMatrix::identity(2)).expect("identity block")
    }

    pub fn block(&self) -> &UnimodularMatrix {
        &self.block
    }

    pub fn lin(&self) -> &(BigRational, BigRational) {
        &self.lin
    }

    /// Exact rational coefficients `(alpha, beta, gamma, p, q)` of `kappa`.
    pub fn kappa_coeffs(&self) -> (BigRational, BigRational, BigRational, BigRational, BigRational) {
        let (a, b, g) = Self::quad_coeffs(&self.block);
        (a, b, g, self.lin.0.clone(), self.lin.1.clone())
    }

    pub fn apply<S: HeisScalar>(&self, p: &HeisPoint<S>) -> HeisPoint<S> {
        let (alpha, beta, gamma, lp, lq) = self.kappa_coeffs();
        let a = S::from_rat(&BigRational::from(self.block.at(0, 0).clone()));
        let b = S::from_rat(&BigRational::from(self.block.at(0, 1).clone()));
        let c = S::from_rat(&BigRational::from(self.block.at(1, 0).clone()));
        let d = S::from_rat(&BigRational::from(self.block.at(1, 1).clone()));
        let nx = a.mul(&p.x).add(&b.mul(&p.y));
        let ny = c.mul(&p.x).add(&d.mul(&p.y));
        let kappa = S::from_rat(&alpha)
            .mul(&p.x.mul(&p.x))
            .add(&S::from_rat(&beta).mul(&p.x.mul(&p.y)))
            .add(&S::from_rat(&gamma).mul(&p.y.mul(&p.y)))
            .add(&S::from_rat(&lp).mul(&p.x))
            .add(&S::from_rat(&lq).mul(&p.y));
        HeisPoint::new(nx, ny, p.z.add(&kappa))
    }

    /// Composition `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let block = self.block.mul(&other.block);
        // lin_new = lin_other + lin_self o A_other (the quadratic parts
        // recombine into the canonical form exactly)
        let oa = BigRational::from(other.block.at(0, 0).clone());
        let ob = BigRational::from(other.block.at(0, 1).clone());
        let oc = BigRational::from(other.block.at(1, 0).clone());
        let od = BigRational::from(other.block.at(1, 1).clone());
        let p = &other.lin.0 + (&self.lin.0 * &oa + &self.lin.1 * &oc);
        let q = &other.lin.1 + (&self.lin.0 * &ob + &self.lin.1 * &od);
        Self::new(block, (p, q)).expect("composition preserves integrality")
    }

    pub fn inverse(&self) -> Self {
        let inv = self.block.inverse();
        let ia = BigRational::from(inv.at(0, 0).clone());
        let ib = BigRational::from(inv.at(0, 1).clone());
        let ic = BigRational::from(inv.at(1, 0).clone());
        let id = BigRational::from(inv.at(1, 1).clone());
        // kappa_inv(v) = -kappa(A^{-1} v): linear part -lin o A^{-1}
        let p = -(&self.lin.0 * &ia + &self.lin.1 * &ic);
        let q = -(&self.lin.0 * &ib + &self.lin.1 * &id);
        Self::new(inv, (p, q)).expect("inverse preserves integrality")
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&b);
            }
            b = b.compose(&b.clone());
            k >>= 1;
        }
        acc
    }

    /// The word `prod generators[i]^(z_i)`.
    pub fn word(generators: &[HeisAuto], z: &[i64]) -> Result<Self> {
        if generators.len() != z.len() {
            return Err(Error::validation("word length differs from generator count"));
        }
        let mut acc = Self::identity();
        for (g, &e) in generators.iter().zip(z) {
            if e != 0 {
                acc = acc.compose(&g.pow(e));
            }
        }
        Ok(acc)
    }

    /// Exact verification of `beta(p q) = beta(p) beta(q)` at the given
    /// rational points.
    pub fn verify_homomorphism(
        &self,
        p: &HeisPoint<BigRational>,
        q: &HeisPoint<BigRational>,
    ) -> bool {
        self.apply(&p.mul(q)) == self.apply(p).mul(&self.apply(q))
    }

    /// Exact verification that the three lattice generators map into the
    /// lattice (with the inverse doing the same, this gives
    /// `beta(Lambda) = Lambda`).
    pub fn verify_lattice_preserved(&self) -> bool {
        let gens = [
            HeisPoint::from_ints(1, 0, 0),
            HeisPoint::from_ints(0, 1, 0),
            HeisPoint::from_ints(0, 0, 1),
        ];
        gens.iter().all(|g| self.apply(g).is_lattice())
            && gens.iter().all(|g| self.inverse().apply(g).is_lattice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn cat_auto() -> HeisAuto {
        HeisAuto::from_block(UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap()).unwrap()
    }

    #[test]
    fn group_law_basics() {
        let p = HeisPoint::from_ints(1, 0, 0);
        let q = HeisPoint::from_ints(0, 1, 0);
        // noncommutativity witness
        assert_eq!(p.mul(&q), HeisPoint::from_ints(1, 1, 1));
        assert_eq!(q.mul(&p), HeisPoint::from_ints(1, 1, 0));
        // identity and inverses
        let e: HeisPoint<BigRational> = HeisPoint::identity();
        assert_eq!(e.mul(&p), p);
        let r = HeisPoint::from_rationals((3, 4), (-7, 3), (5, 2));
        assert_eq!(r.mul(&r.inverse()), HeisPoint::identity());
        assert_eq!(r.inverse().mul(&r), HeisPoint::identity());
    }

    #[test]
    fn associativity_on_random_rationals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut rand_pt = || {
            HeisPoint::from_rationals(
                (rng.gen_range(-20i64..20), rng.gen_range(1i64..7)),
                (rng.gen_range(-20i64..20), rng.gen_range(1i64..7)),
                (rng.gen_range(-20i64..20), rng.gen_range(1i64..7)),
            )
        };
        for _ in 0..1000 {
            let (a, b, c) = (rand_pt(), rand_pt(), rand_pt());
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }

    #[test]
    fn reduction_examples() {
        let inside = HeisPoint::from_rationals((1, 4), (1, 2), (3, 4));
        let (r, lam) = inside.reduce();
        assert_eq!(r, inside);
        assert_eq!(lam, HeisPoint::identity());
        // lattice points collapse to the identity corner
        let (r2, lam2) = HeisPoint::from_ints(2, 3, -1).reduce();
        assert_eq!(r2, HeisPoint::identity());
        assert!(lam2.is_lattice());
        // general point: p = r * lambda reconstructs exactly
        let p = HeisPoint::from_rationals((5, 4), (-1, 2), (23, 10));
        let (r3, lam3) = p.reduce();
        assert!(lam3.is_lattice());
        assert_eq!(r3.mul(&lam3), p);
        for v in [&r3.x, &r3.y, &r3.z] {
            assert!(!v.is_negative() && v < &BigRational::from(BigInt::from(1)));
        }
    }

    #[test]
    fn reduction_is_coset_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = HeisPoint::from_rationals(
                (rng.gen_range(-30i64..30), rng.gen_range(1i64..9)),
                (rng.gen_range(-30i64..30), rng.gen_range(1i64..9)),
                (rng.gen_range(-30i64..30), rng.gen_range(1i64..9)),
            );
            let lam = HeisPoint::from_ints(
                rng.gen_range(-4i64..=4),
                rng.gen_range(-4i64..=4),
                rng.gen_range(-4i64..=4),
            );
            let (r1, _) = p.reduce();
            let (r2, _) = p.mul(&lam).reduce();
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn cat_auto_matches_worked_correction() {
        // block [[2,1],[1,1]]: kappa(x,y) = x^2 + xy + (y^2 - y)/2
        let auto = cat_auto();
        let (alpha, beta, gamma, p, q) = auto.kappa_coeffs();
        assert_eq!(alpha, BigRational::from(BigInt::from(1)));
        assert_eq!(beta, BigRational::from(BigInt::from(1)));
        assert_eq!(gamma, BigRational::new(1.into(), 2.into()));
        assert_eq!(p, BigRational::zero());
        assert_eq!(q, BigRational::new((-1).into(), 2.into()));
        // kappa(1,0) = 1: (1,0,0) -> (2,1,1)
        assert_eq!(
            auto.apply(&HeisPoint::from_ints(1, 0, 0)),
            HeisPoint::from_ints(2, 1, 1)
        );
        assert!(auto.verify_lattice_preserved());
    }

    #[test]
    fn identity_auto_fixes_everything() {
        let id = HeisAuto::identity();
        let p = HeisPoint::from_rationals((1, 3), (2, 5), (7, 2));
        assert_eq!(id.apply(&p), p);
    }

    #[test]
    fn homomorphism_exact() {
        let auto = cat_auto();
        assert!(auto.verify_homomorphism(
            &HeisPoint::from_ints(1, 0, 0),
            &HeisPoint::from_ints(0, 1, 0)
        ));
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = HeisPoint::from_rationals(
                (rng.gen_range(-9i64..9), rng.gen_range(1i64..5)),
                (rng.gen_range(-9i64..9), rng.gen_range(1i64..5)),
                (rng.gen_range(-9i64..9), rng.gen_range(1i64..5)),
            );
            let q = HeisPoint::from_rationals(
                (rng.gen_range(-9i64..9), rng.gen_range(1i64..5)),
                (rng.gen_range(-9i64..9), rng.gen_range(1i64..5)),
                (rng.gen_range(-9i64..9), rng.gen_range(1i64..5)),
            );
            assert!(auto.verify_homomorphism(&p, &q));
        }
    }

    #[test]
    fn composition_matches_pointwise() {
        let a = cat_auto();
        let b = HeisAuto::from_block(UnimodularMatrix::from_i64(&[&[1, 1], &[1, 2]]).unwrap())
            .unwrap();
        let ab = a.compose(&b);
        let p = HeisPoint::from_rationals((2, 3), (5, 7), (1, 2));
        assert_eq!(ab.apply(&p), a.apply(&b.apply(&p)));
        // inverse composes to the identity pointwise
        let round = a.compose(&a.inverse());
        assert_eq!(round.apply(&p), p);
        // powers agree with repeated composition
        let a3 = a.pow(3);
        assert_eq!(a3.apply(&p), a.apply(&a.apply(&a.apply(&p))));
        let am2 = a.pow(-2);
        assert_eq!(a.pow(2).compose(&am2).apply(&p), p);
    }

    #[test]
    fn invalid_blocks_rejected() {
        // det = -1 blocks do not act on the center correctly
        let flip = UnimodularMatrix::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(HeisAuto::from_block(flip).is_err());
        // a non-integral linear correction is rejected
        let cat = UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        assert!(HeisAuto::new(cat, (BigRational::new(1.into(), 3.into()), BigRational::zero()))
            .is_err());
    }
}
