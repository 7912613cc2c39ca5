//! Characters of a commuting `Z^l`-action by lattice automorphisms.
//!
//! A semisimple commuting family is simultaneously diagonalizable over the
//! splitting field of a generic integer combination `C = sum c_i A_i`. Each
//! irreducible factor `F` of the squarefree minimal polynomial of `C` yields
//! a number field `Q[x]/(F)`; exact kernels of `C - theta` over that field
//! give common eigenvectors, and the eigenvalue tuple of the generators on
//! such a vector is a character. Galois conjugates of a character are the
//! same field data read through different complex embeddings, so one exact
//! computation per factor covers the whole orbit.

pub mod certify;
pub mod lyapunov;

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::exact::factor::factor_squarefree_monic;
use crate::exact::matrix::{FieldMat, IntMatrix, UnimodularMatrix};
use crate::exact::numfield::{NfElement, NfField, NumberField};
use crate::exact::{ComplexInterval, Prec, RealInterval};

pub use certify::{anosov_check, ergodicity_certificate, AnosovOutcome, ErgodicityOutcome};
pub use lyapunov::{lemma21_constant, lyapunov_map, Lemma21Constant};

/// A commuting family of lattice automorphisms indexed by `Z^l`.
#[derive(Debug, Clone)]
pub struct ZlAction {
    rank: usize,
    generators: Vec<UnimodularMatrix>,
}

impl ZlAction {
    pub fn new(generators: Vec<UnimodularMatrix>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::validation("action needs at least one generator"));
        }
        let dim = generators[0].dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return Err(Error::validation("generators have mismatched dimensions"));
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].matrix().commutes_with(generators[j].matrix()) {
                    return Err(Error::validation(format!(
                        "generators {} and {} do not commute",
                        i, j
                    )));
                }
            }
        }
        Ok(Self { rank: generators.len(), generators })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[UnimodularMatrix] {
        &self.generators
    }

    /// The automorphism `alpha(z) = prod A_i^(z_i)`, exactly.
    pub fn element(&self, z: &[i64]) -> Result<IntMatrix> {
        if z.len() != self.rank {
            return Err(Error::validation("exponent vector length differs from rank"));
        }
        let mut acc = IntMatrix::identity(self.dim());
        for (g, &e) in self.generators.iter().zip(z) {
            if e != 0 {
                let p = g.matrix().pow(e)?;
                acc = acc.mul(&p);
            }
        }
        Ok(acc)
    }
}

/// One simultaneous eigenvalue system of the action.
///
/// `values[i]` is the exact eigenvalue of generator `i`; `embedding_index`
/// selects the complex embedding of the shared field that realizes this
/// character numerically. Characters produced by [`simultaneous_spectrum`]
/// with the same `(field, block)` and different embeddings are Galois
/// conjugates of one another.
#[derive(Debug, Clone)]
pub struct Character {
    field: Arc<NumberField>,
    values: Vec<NfElement>,
    eigenvector: Vec<NfElement>,
    embedding_index: usize,
    block: usize,
    factor_index: usize,
}

impl Character {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn values(&self) -> &[NfElement] {
        &self.values
    }

    pub fn eigenvector(&self) -> &[NfElement] {
        &self.eigenvector
    }

    pub fn embedding_index(&self) -> usize {
        self.embedding_index
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Exact value `chi(z) = prod values_i^(z_i)` in the field.
    pub fn value_at(&self, z: &[i64]) -> Result<NfElement> {
        if z.len() != self.values.len() {
            return Err(Error::validation("exponent vector length differs from rank"));
        }
        let mut acc = NfElement::one(&self.field);
        for (v, &e) in self.values.iter().zip(z) {
            if e != 0 {
                acc = acc.mul(&v.pow(e)?)?;
            }
        }
        Ok(acc)
    }

    /// Certified `|chi(z)|` under this character's embedding.
    pub fn modulus_at(&self, z: &[i64], prec: Prec) -> Result<RealInterval> {
        let w = self.value_at(z)?;
        Ok(w.embedding(self.embedding_index, prec)?.abs(prec + 32))
    }

    /// Certified embedding of `chi(z)`.
    pub fn embedded_value_at(&self, z: &[i64], prec: Prec) -> Result<ComplexInterval> {
        let w = self.value_at(z)?;
        w.embedding(self.embedding_index, prec)
    }

    /// Whether this character is trivial (all generator values 1).
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }
}

/// A Galois orbit: the conjugates of one character, i.e. one `(field, block)`
/// group of the spectrum.
#[derive(Debug, Clone)]
pub struct GaloisOrbit {
    members: Vec<Character>,
}

impl GaloisOrbit {
    pub fn members(&self) -> &[Character] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.members[0].field()
    }

    /// The shared exact value tuple (conjugates differ only by embedding).
    pub fn values(&self) -> &[NfElement] {
        self.members[0].values()
    }

    pub fn rank(&self) -> usize {
        self.members[0].rank()
    }
}

/// Number of retries for the splitting combination before the action is
/// rejected as non-semisimple.
const SPLIT_RETRIES: usize = 24;

/// All characters of the action, with multiplicity, together with exact
/// common eigenvectors verified per generator.
pub fn simultaneous_spectrum(action: &ZlAction, prec: Prec) -> Result<Vec<Character>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut saw_semisimple_failure = false;
    for attempt in 0..SPLIT_RETRIES {
        let coeffs: Vec<i64> = if attempt == 0 {
            let mut c = vec![0i64; action.rank()];
            c[0] = 1;
            c
        } else if attempt == 1 && action.rank() > 1 {
            (1..=action.rank() as i64).collect()
        } else {
            (0..action.rank()).map(|_| rng.gen_range(-10i64..=10)).collect()
        };
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        match try_split(action, &coeffs, prec) {
            Ok(Some(chars)) => return Ok(chars),
            Ok(None) => {} // collision; retry with a new combination
            Err(SplitFailure::NotSemisimple) => {
                saw_semisimple_failure = true;
            }
            Err(SplitFailure::Other(e)) => return Err(e),
        }
    }
    if saw_semisimple_failure {
        Err(Error::degenerate(
            "action appears non-semisimple: no splitting combination had a squarefree minimal polynomial",
        ))
    } else {
        Err(Error::undecided("splitting failed after retries"))
    }
}

enum SplitFailure {
    NotSemisimple,
    Other(Error),
}

impl From<Error> for SplitFailure {
    fn from(e: Error) -> Self {
        SplitFailure::Other(e)
    }
}

fn try_split(
    action: &ZlAction,
    coeffs: &[i64],
    _prec: Prec,
) -> std::result::Result<Option<Vec<Character>>, SplitFailure> {
    let d = action.dim();
    let mut comb = IntMatrix::identity(d).scale(&num_bigint::BigInt::zero());
    for (g, &c) in action.generators().iter().zip(coeffs) {
        if c != 0 {
            comb = comb.add(&g.matrix().scale(&num_bigint::BigInt::from(c)));
        }
    }
    let char_poly = comb.char_poly();
    let min_poly = char_poly.squarefree_part();
    // semisimplicity of the combination: its minimal polynomial is squarefree
    if !eval_poly_at_matrix(&min_poly, &comb).entries().iter().all(|e| e.is_zero()) {
        return Err(SplitFailure::NotSemisimple);
    }
    let factors = factor_squarefree_monic(&min_poly)?;
    let mut characters = Vec::with_capacity(d);
    for (factor_index, f) in factors.iter().enumerate() {
        let field = NumberField::new_unchecked(f.clone());
        let nf = NfField { field: field.clone() };
        let theta = NfElement::generator(&field);
        // kernel of (comb - theta I) over the factor field
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let mut e = NfElement::from_rational(
                    &field,
                    BigRational::from(comb.at(r, c).clone()),
                );
                if r == c {
                    e = e.sub(&theta)?;
                }
                data.push(e);
            }
        }
        let kernel = FieldMat::new(d, d, data).kernel_basis(&nf);
        if kernel.is_empty() {
            return Err(SplitFailure::Other(Error::validation(
                "factor of the minimal polynomial produced an empty eigenspace",
            )));
        }
        for (block, v) in kernel.iter().enumerate() {
            let mut values = Vec::with_capacity(action.rank());
            for g in action.generators() {
                match eigenvalue_on(g.matrix(), v, &field)? {
                    Some(val) => values.push(val),
                    None => return Ok(None), // eigensystem collision at this root
                }
            }
            // each character value of a unimodular action is an algebraic unit
            for val in &values {
                if !val.is_unit() {
                    return Err(SplitFailure::Other(Error::validation(
                        "character value is not an algebraic unit",
                    )));
                }
            }
            for embedding_index in 0..field.degree() {
                characters.push(Character {
                    field: field.clone(),
                    values: values.clone(),
                    eigenvector: v.clone(),
                    embedding_index,
                    block,
                    factor_index,
                });
            }
        }
    }
    if characters.len() != d {
        return Err(SplitFailure::Other(Error::validation(format!(
            "spectrum size {} differs from dimension {}",
            characters.len(),
            d
        ))));
    }
    Ok(Some(characters))
}

/// If `A v = c v` for a scalar `c` of the field, returns `c`; `None` when `v`
/// is not an eigenvector of `A` (a collision of eigensystems).
fn eigenvalue_on(
    a: &IntMatrix,
    v: &[NfElement],
    field: &Arc<NumberField>,
) -> Result<Option<NfElement>> {
    let d = a.dim();
    let mut image = Vec::with_capacity(d);
    for r in 0..d {
        let mut acc = NfElement::zero(field);
        for c in 0..d {
            let term = v[c].scale(&BigRational::from(a.at(r, c).clone()));
            acc = acc.add(&term)?;
        }
        image.push(acc);
    }
    let pivot = v.iter().position(|x| !x.is_zero()).expect("kernel vectors are nonzero");
    let lambda = image[pivot].mul(&v[pivot].inv()?)?;
    for (iv, vv) in image.iter().zip(v) {
        if iv != &lambda.mul(vv)? {
            return Ok(None);
        }
    }
    Ok(Some(lambda))
}

fn eval_poly_at_matrix(p: &crate::exact::IntPolynomial, m: &IntMatrix) -> IntMatrix {
    let d = m.dim();
    let mut acc = IntMatrix::identity(d).scale(&num_bigint::BigInt::zero());
    for i in (0..=p.degree()).rev() {
        acc = acc.mul(m);
        let c = p.coeff(i);
        if !c.is_zero() {
            acc = acc.add(&IntMatrix::identity(d).scale(&c));
        }
    }
    acc
}

/// Partition of a spectrum into Galois orbits: characters sharing one exact
/// value tuple (same factor field and eigenspace block).
pub fn galois_orbits(chars: &[Character]) -> Vec<GaloisOrbit> {
    let mut orbits: Vec<GaloisOrbit> = Vec::new();
    for c in chars {
        match orbits.iter_mut().find(|o| {
            let m = &o.members[0];
            m.factor_index == c.factor_index && m.block == c.block
        }) {
            Some(o) => o.members.push(c.clone()),
            None => orbits.push(GaloisOrbit { members: vec![c.clone()] }),
        }
    }
    for o in &mut orbits {
        o.members.sort_by_key(|c| c.embedding_index);
    }
    orbits
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::IntPolynomial;

    pub(crate) fn cat_action() -> ZlAction {
        ZlAction::new(vec![UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap()]).unwrap()
    }

    /// The rank-2 T^3 action generated by A = companion(x^3 - 3x - 1) and
    /// B = A^2 - 2I.
    pub(crate) fn t3_action() -> ZlAction {
        let p = IntPolynomial::from_i64(&[-1, -3, 0, 1]);
        let a = IntMatrix::companion(&p).unwrap();
        let b = a.mul(&a).sub(&IntMatrix::identity(3).scale(&num_bigint::BigInt::from(2)));
        ZlAction::new(vec![
            UnimodularMatrix::new(a).unwrap(),
            UnimodularMatrix::new(b).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn cat_map_spectrum() {
        let chars = simultaneous_spectrum(&cat_action(), 64).unwrap();
        assert_eq!(chars.len(), 2);
        // values (3 +- sqrt5)/2
        let mut mods: Vec<f64> = chars
            .iter()
            .map(|c| c.modulus_at(&[1], 64).unwrap().to_f64())
            .collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mods[0] - 0.3819660113).abs() < 1e-9);
        assert!((mods[1] - 2.6180339887).abs() < 1e-9);
        let orbits = galois_orbits(&chars);
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].size(), 2);
    }

    #[test]
    fn identity_action_spectrum() {
        let action = ZlAction::new(vec![UnimodularMatrix::identity(2)]).unwrap();
        let chars = simultaneous_spectrum(&action, 64).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars.iter().all(|c| c.is_trivial()));
        let orbits = galois_orbits(&chars);
        assert_eq!(orbits.len(), 2);
        assert!(orbits.iter().all(|o| o.size() == 1));
    }

    #[test]
    fn t3_rank2_spectrum() {
        let action = t3_action();
        // unimodularity of B was already checked by the constructor; its
        // determinant is p(sqrt2) p(-sqrt2) = -1 for p = x^3 - 3x - 1
        assert_eq!(action.generators()[1].det_sign(), -1);
        let chars = simultaneous_spectrum(&action, 64).unwrap();
        assert_eq!(chars.len(), 3);
        let orbits = galois_orbits(&chars);
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].size(), 3);
        // chi(e_2) = chi(e_1)^2 - 2 exactly
        for c in &chars {
            let lam = &c.values()[0];
            let expect = lam
                .mul(lam)
                .unwrap()
                .sub(&NfElement::from_int(c.field(), 2))
                .unwrap();
            assert_eq!(c.values()[1], expect);
        }
        // eigenvector equation holds exactly for a mixed word
        let z = [3i64, -2];
        let m = action.element(&z).unwrap();
        let chi_z = chars[0].value_at(&z).unwrap();
        let v = chars[0].eigenvector();
        let field = chars[0].field();
        for r in 0..3 {
            let mut acc = NfElement::zero(field);
            for col in 0..3 {
                acc = acc
                    .add(&v[col].scale(&BigRational::from(m.at(r, col).clone())))
                    .unwrap();
            }
            assert_eq!(acc, chi_z.mul(&v[r]).unwrap());
        }
    }

    #[test]
    fn block_multiplicity() {
        // two copies of the cat map give each character multiplicity 2
        let a2 = UnimodularMatrix::from_i64(&[
            &[2, 1, 0, 0],
            &[1, 1, 0, 0],
            &[0, 0, 2, 1],
            &[0, 0, 1, 1],
        ])
        .unwrap();
        let action = ZlAction::new(vec![a2]).unwrap();
        let chars = simultaneous_spectrum(&action, 64).unwrap();
        assert_eq!(chars.len(), 4);
        let orbits = galois_orbits(&chars);
        assert_eq!(orbits.len(), 2);
        assert!(orbits.iter().all(|o| o.size() == 2));
    }

    #[test]
    fn non_commuting_rejected() {
        let a = UnimodularMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        let b = UnimodularMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        assert!(ZlAction::new(vec![a, b]).is_err());
    }

    #[test]
    fn non_semisimple_rejected() {
        let shear = UnimodularMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        let action = ZlAction::new(vec![shear]).unwrap();
        match simultaneous_spectrum(&action, 64) {
            Err(Error::Degenerate(_)) => {}
            other => panic!("expected non-semisimple rejection, got {:?}", other.map(|v| v.len())),
        }
    }
}
