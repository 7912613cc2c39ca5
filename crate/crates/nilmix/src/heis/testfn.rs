//! Test functions on the Heisenberg nilmanifold with exact integral oracles.
//!
//! Bumps are smooth radial profiles `A (1 - (r/R)^2)^m` supported strictly
//! inside the open fundamental domain, so they descend to the quotient. Their
//! integrals have closed forms: rational multiples of pi for 3-dimensional
//! balls, plain rationals for 1-dimensional profiles. Character bumps factor
//! through a base-torus frequency and are constant along the box directions
//! orthogonal to it, the constructed failure witnesses for the
//! equidistribution dichotomy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::HeisPoint;
use crate::error::{Error, Result};
use crate::toral::rational_to_f64;

/// An exact value of the form `a + b pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiExpr {
    pub rational: BigRational,
    pub pi_coeff: BigRational,
}

impl PiExpr {
    pub fn zero() -> Self {
        Self { rational: BigRational::zero(), pi_coeff: BigRational::zero() }
    }

    pub fn rational(q: BigRational) -> Self {
        Self { rational: q, pi_coeff: BigRational::zero() }
    }

    pub fn pi_multiple(q: BigRational) -> Self {
        Self { rational: BigRational::zero(), pi_coeff: q }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { rational: &self.rational + &o.rational, pi_coeff: &self.pi_coeff + &o.pi_coeff }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { rational: &self.rational - &o.rational, pi_coeff: &self.pi_coeff - &o.pi_coeff }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { rational: &self.rational * q, pi_coeff: &self.pi_coeff * q }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.pi_coeff.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.rational) + rational_to_f64(&self.pi_coeff) * std::f64::consts::PI
    }
}

/// `J_m = int_0^1 (1-u^2)^m u^2 du`, exactly.
fn ball_profile_integral(m: u32) -> BigRational {
    // J_m = (1/2) m! 2^(m+1) / prod_{k=1}^{m+1} (2k+1)
    let mut num = BigInt::one();
    for k in 1..=m as u64 {
        num *= BigInt::from(k);
    }
    num <<= (m + 1) as usize;
    let mut den = BigInt::from(2);
    for k in 1..=(m as u64 + 1) {
        den *= BigInt::from(2 * k + 1);
    }
    BigRational::new(num, den)
}

/// `K_m = int_0^1 (1-u^2)^m du`, exactly.
fn line_profile_integral(m: u32) -> BigRational {
    // K_m = (2m)!! / (2m+1)!!
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 1..=m as u64 {
        num *= BigInt::from(2 * k);
    }
    for k in 0..=m as u64 {
        den *= BigInt::from(2 * k + 1);
    }
    BigRational::new(num, den)
}

/// Radial bump `A (1 - (r/R)^2)^m` on a Euclidean ball strictly inside the
/// open fundamental domain `(0,1)^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: [BigRational; 3],
    pub radius: BigRational,
    pub power: u32,
    pub amplitude: BigRational,
    center_f: [f64; 3],
    radius_f: f64,
    amplitude_f: f64,
}

impl Bump {
    pub fn new(
        center: [BigRational; 3],
        radius: BigRational,
        power: u32,
        amplitude: BigRational,
    ) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::validation("bump radius must be positive"));
        }
        if power < 3 {
            return Err(Error::validation("bump power must be at least 3"));
        }
        let one = BigRational::one();
        for c in &center {
            if !(c - &radius).is_positive() || (c + &radius) >= one {
                return Err(Error::validation(
                    "bump support touches the fundamental-domain boundary",
                ));
            }
        }
        let center_f = [
            rational_to_f64(&center[0]),
            rational_to_f64(&center[1]),
            rational_to_f64(&center[2]),
        ];
        let radius_f = rational_to_f64(&radius);
        let amplitude_f = rational_to_f64(&amplitude);
        Ok(Self { center, radius, power, amplitude, center_f, radius_f, amplitude_f })
    }

    pub fn eval(&self, p: &HeisPoint<f64>) -> f64 {
        let dx = p.x - self.center_f[0];
        let dy = p.y - self.center_f[1];
        let dz = p.z - self.center_f[2];
        let r2 = (dx * dx + dy * dy + dz * dz) / (self.radius_f * self.radius_f);
        if r2 >= 1.0 {
            return 0.0;
        }
        self.amplitude_f * (1.0 - r2).powi(self.power as i32)
    }

    /// Exact integral over the nilmanifold: `A * 4 pi R^3 * J_m`.
    pub fn integral(&self) -> PiExpr {
        let r3 = &self.radius * &self.radius * &self.radius;
        let q = &self.amplitude
            * BigRational::from(BigInt::from(4))
            * r3
            * ball_profile_integral(self.power);
        PiExpr::pi_multiple(q)
    }

    /// Exact integral of the square: amplitude squared, profile power `2m`.
    pub fn integral_sq(&self) -> PiExpr {
        let r3 = &self.radius * &self.radius * &self.radius;
        let q = &self.amplitude
            * &self.amplitude
            * BigRational::from(BigInt::from(4))
            * r3
            * ball_profile_integral(2 * self.power);
        PiExpr::pi_multiple(q)
    }

    /// Whether the two supports are certainly disjoint (exact rational test
    /// on squared distances).
    pub fn disjoint_from(&self, o: &Bump) -> bool {
        let mut d2 = BigRational::zero();
        for i in 0..3 {
            let d = &self.center[i] - &o.center[i];
            d2 += &d * &d;
        }
        let rs = &self.radius + &o.radius;
        d2 > &rs * &rs
    }

    /// Gradient bound `2 m A / R`, the Lipschitz scale of the profile.
    pub fn lipschitz_bound(&self) -> f64 {
        2.0 * self.power as f64 * self.amplitude_f.abs() / self.radius_f
    }

    pub fn sup_bound(&self) -> f64 {
        self.amplitude_f.abs()
    }
}

/// 1D profile bump of a base-torus character level: `g(<freq, (x,y)> mod 1)`
/// with `g` a smooth bump on the circle. Constant along the center and along
/// base directions orthogonal to `freq`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterBump {
    pub frequency: [i64; 2],
    pub center: BigRational,
    pub radius: BigRational,
    pub power: u32,
    pub amplitude: BigRational,
    center_f: f64,
    radius_f: f64,
    amplitude_f: f64,
}

impl CharacterBump {
    pub fn new(
        frequency: [i64; 2],
        center: BigRational,
        radius: BigRational,
        power: u32,
        amplitude: BigRational,
    ) -> Result<Self> {
        if frequency == [0, 0] {
            return Err(Error::validation("character bump needs a nonzero frequency"));
        }
        if !radius.is_positive() || radius >= BigRational::new(1.into(), 2.into()) {
            return Err(Error::validation("profile radius must lie in (0, 1/2)"));
        }
        if power < 3 {
            return Err(Error::validation("bump power must be at least 3"));
        }
        Ok(Self {
            center_f: rational_to_f64(&center),
            radius_f: rational_to_f64(&radius),
            amplitude_f: rational_to_f64(&amplitude),
            frequency,
            center,
            radius,
            power,
            amplitude,
        })
    }

    pub fn eval(&self, p: &HeisPoint<f64>) -> f64 {
        let t = self.frequency[0] as f64 * p.x + self.frequency[1] as f64 * p.y;
        let mut d = (t - self.center_f).rem_euclid(1.0);
        if d > 0.5 {
            d -= 1.0;
        }
        let u2 = (d / self.radius_f) * (d / self.radius_f);
        if u2 >= 1.0 {
            return 0.0;
        }
        self.amplitude_f * (1.0 - u2).powi(self.power as i32)
    }

    /// Exact integral: the level map pushes Haar to Lebesgue on the circle,
    /// so the integral is the 1D profile integral `A * 2 rho * K_m`.
    pub fn integral(&self) -> PiExpr {
        let q = &self.amplitude
            * BigRational::from(BigInt::from(2))
            * &self.radius
            * line_profile_integral(self.power);
        PiExpr::rational(q)
    }

    pub fn integral_sq(&self) -> PiExpr {
        let q = &self.amplitude
            * &self.amplitude
            * BigRational::from(BigInt::from(2))
            * &self.radius
            * line_profile_integral(2 * self.power);
        PiExpr::rational(q)
    }

    pub fn lipschitz_bound(&self) -> f64 {
        let freq_norm = ((self.frequency[0] as f64).powi(2) + (self.frequency[1] as f64).powi(2)).sqrt();
        2.0 * self.power as f64 * self.amplitude_f.abs() / self.radius_f * freq_norm
    }

    pub fn sup_bound(&self) -> f64 {
        self.amplitude_f.abs()
    }
}

/// A test function with an exact integral oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum HeisTestFn {
    Constant(BigRational),
    Bump(Bump),
    Character(CharacterBump),
    /// `pos - scale * neg`: with `scale = int(pos)/int(neg)` this is the
    /// zero-mean combination of two disjoint bumps.
    Difference { pos: Bump, neg: Bump, scale: BigRational },
    /// `f - mean(f)` for a character bump (stays well-defined on the
    /// quotient since the character part factors through the base torus).
    CenteredCharacter(CharacterBump),
}

impl HeisTestFn {
    /// Zero-mean combination of two disjoint bumps.
    pub fn zero_mean_pair(pos: Bump, neg: Bump) -> Result<Self> {
        if !pos.disjoint_from(&neg) {
            return Err(Error::validation(
                "zero-mean pair needs disjoint supports for the exact square oracle",
            ));
        }
        let ip = pos.integral();
        let ineg = neg.integral();
        if ineg.pi_coeff.is_zero() {
            return Err(Error::degenerate("negative part has zero mass"));
        }
        // scale = int(pos)/int(neg): the pi factors cancel exactly
        let scale = &ip.pi_coeff / &ineg.pi_coeff;
        Ok(Self::Difference { pos, neg, scale })
    }

    pub fn eval(&self, p: &HeisPoint<f64>) -> f64 {
        match self {
            Self::Constant(c) => rational_to_f64(c),
            Self::Bump(b) => b.eval(p),
            Self::Character(c) => c.eval(p),
            Self::Difference { pos, neg, scale } => {
                pos.eval(p) - rational_to_f64(scale) * neg.eval(p)
            }
            Self::CenteredCharacter(c) => c.eval(p) - c.integral().to_f64(),
        }
    }

    /// Exact integral over the nilmanifold.
    pub fn integral(&self) -> PiExpr {
        match self {
            Self::Constant(c) => PiExpr::rational(c.clone()),
            Self::Bump(b) => b.integral(),
            Self::Character(c) => c.integral(),
            Self::Difference { pos, neg, scale } => pos.integral().sub(&neg.integral().scale(scale)),
            Self::CenteredCharacter(_) => PiExpr::zero(),
        }
    }

    /// Exact integral of the square when available (`None` for combinations
    /// without a closed form).
    pub fn integral_sq(&self) -> Option<PiExpr> {
        match self {
            Self::Constant(c) => Some(PiExpr::rational(c * c)),
            Self::Bump(b) => Some(b.integral_sq()),
            Self::Character(c) => Some(c.integral_sq()),
            Self::Difference { pos, neg, scale } => {
                // disjoint supports: the cross term vanishes identically
                Some(pos.integral_sq().add(&neg.integral_sq().scale(&(scale * scale))))
            }
            Self::CenteredCharacter(c) => {
                // int (f - mean)^2 = int f^2 - mean^2; both parts rational
                let m = c.integral();
                let m2 = &m.rational * &m.rational;
                Some(c.integral_sq().sub(&PiExpr::rational(m2)))
            }
        }
    }

    fn sup_and_lip(&self) -> (f64, f64) {
        match self {
            Self::Constant(c) => (rational_to_f64(c).abs(), 0.0),
            Self::Bump(b) => (b.sup_bound(), b.lipschitz_bound()),
            Self::Character(c) => (c.sup_bound(), c.lipschitz_bound()),
            Self::Difference { pos, neg, scale } => (
                pos.sup_bound() + rational_to_f64(scale).abs() * neg.sup_bound(),
                pos.lipschitz_bound() + rational_to_f64(scale).abs() * neg.lipschitz_bound(),
            ),
            Self::CenteredCharacter(c) => {
                // sup |f - mean| = max(sup - mean, mean) for a nonnegative bump
                let mean = c.integral().to_f64().abs();
                ((c.sup_bound() - mean).max(mean), c.lipschitz_bound())
            }
        }
    }

    /// Upper bound on `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_and_lip().0
    }

    /// Upper bound on the Lipschitz constant.
    pub fn lipschitz_bound(&self) -> f64 {
        self.sup_and_lip().1
    }

    /// `theta`-Hoelder scale `sup + sup (Lip/sup)^theta`: the seminorm of a
    /// profile of height `sup` and slope `Lip` is at most
    /// `sup^(1-theta) Lip^theta`.
    pub fn holder_scale(&self, theta: f64) -> f64 {
        let (sup, lip) = self.sup_and_lip();
        if sup == 0.0 {
            return 0.0;
        }
        sup + sup * (lip / sup).powf(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn small_bump() -> Bump {
        Bump::new([q(1, 4), q(1, 4), q(1, 2)], q(1, 8), 3, q(1, 1)).unwrap()
    }

    #[test]
    fn boundary_touching_rejected() {
        assert!(Bump::new([q(1, 8), q(1, 2), q(1, 2)], q(1, 8), 3, q(1, 1)).is_err());
        assert!(Bump::new([q(1, 2), q(1, 2), q(1, 2)], q(1, 2), 3, q(1, 1)).is_err());
        assert!(Bump::new([q(1, 2), q(1, 2), q(1, 2)], q(1, 4), 2, q(1, 1)).is_err());
    }

    #[test]
    fn ball_integral_against_quadrature() {
        // midpoint quadrature oracle over the support cube
        let b = small_bump();
        let exact = b.integral().to_f64();
        let n = 120;
        let mut acc = 0.0f64;
        let h = 2.0 * 0.125 / n as f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = HeisPoint::new(
                        0.25 - 0.125 + (i as f64 + 0.5) * h,
                        0.25 - 0.125 + (j as f64 + 0.5) * h,
                        0.5 - 0.125 + (k as f64 + 0.5) * h,
                    );
                    acc += b.eval(&p);
                }
            }
        }
        acc *= h * h * h;
        assert!((acc - exact).abs() < 1e-5, "quadrature {} vs exact {}", acc, exact);
        // integral of the square too
        let exact2 = b.integral_sq().to_f64();
        let mut acc2 = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = HeisPoint::new(
                        0.25 - 0.125 + (i as f64 + 0.5) * h,
                        0.25 - 0.125 + (j as f64 + 0.5) * h,
                        0.5 - 0.125 + (k as f64 + 0.5) * h,
                    );
                    acc2 += b.eval(&p) * b.eval(&p);
                }
            }
        }
        acc2 *= h * h * h;
        assert!((acc2 - exact2).abs() < 1e-6);
    }

    #[test]
    fn zero_mean_pair_is_exactly_centered() {
        let b1 = small_bump();
        let b2 = Bump::new([q(3, 4), q(3, 4), q(1, 2)], q(1, 10), 4, q(2, 1)).unwrap();
        let f = HeisTestFn::zero_mean_pair(b1.clone(), b2).unwrap();
        assert!(f.integral().is_zero());
        assert!(f.integral_sq().unwrap().to_f64() > 0.0);
        // overlapping pair rejected
        let b3 = Bump::new([q(1, 4), q(1, 4), q(1, 2)], q(1, 10), 3, q(1, 1)).unwrap();
        assert!(HeisTestFn::zero_mean_pair(b1, b3).is_err());
    }

    #[test]
    fn character_bump_line_integral() {
        let c = CharacterBump::new([1, -2], q(1, 2), q(1, 5), 3, q(3, 2)).unwrap();
        // 1D quadrature over the circle parameter
        let exact = c.integral().to_f64();
        let n = 200000;
        let mut acc = 0.0f64;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            // sample along x with y = 0: t = x * 1 covers the level sets
            let p = HeisPoint::new(t, 0.0, 0.3);
            acc += c.eval(&p);
        }
        acc /= n as f64;
        assert!((acc - exact).abs() < 1e-6, "quad {} vs exact {}", acc, exact);
        let centered = HeisTestFn::CenteredCharacter(c);
        assert!(centered.integral().is_zero());
    }
}
