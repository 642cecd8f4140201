//! Catalog of model functions the analyzer understands end to end.
//!
//! Every member is radial or a finite sum of bumps on the first coordinate
//! axis, so moduli, norms, distribution functions, and rearrangements all
//! reduce to one-dimensional power-log integrals with closed forms. The
//! catalog is the boundary of what this crate certifies; arbitrary
//! black-box functions are out of scope.

use crate::error::{Error, Result};
use crate::powerlog::{Piece, Piecewise};
use crate::scale::ScaleFunction;
use crate::special;
use serde::{Deserialize, Serialize};

/// Euclidean constants for dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    n: u32,
}

impl Geometry {
    pub fn new(n: u32) -> Geometry {
        assert!(n >= 1, "dimension must be at least 1");
        Geometry { n }
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    /// Volume of the unit ball, `pi^(n/2) / Gamma(n/2 + 1)`; exact in the
    /// supported dimensions so that measure identities hold to the last ulp.
    pub fn ball_volume(&self) -> f64 {
        match self.n {
            1 => 2.0,
            2 => std::f64::consts::PI,
            3 => 4.0 * std::f64::consts::PI / 3.0,
            n => {
                let half = n as f64 / 2.0;
                std::f64::consts::PI.powf(half) / special::gamma(half + 1.0)
            }
        }
    }

    /// Surface area of the unit sphere, `n` times the ball volume.
    pub fn sphere_area(&self) -> f64 {
        self.n as f64 * self.ball_volume()
    }
}

fn infinity() -> f64 {
    f64::INFINITY
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_infinite(x: &f64) -> bool {
    x.is_infinite()
}

/// A catalog member.
///
/// `radial_powerlog` evaluates to `(|y|^-g |ln|y||^-h)^(1/p_root)` inside
/// `|y| < R` and 0 outside; `tailpower` to `|y|^-g` outside the closed unit
/// ball; `bumpsum` to the `1/p_root` power of a sum of disjoint plateaus
/// `8^(alpha k)` on balls `B((2^-k, 0, ...), 8^-k)`, `k = 3..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TestFunction {
    #[serde(rename = "zero")]
    Zero { n: u32 },
    #[serde(rename = "indicator")]
    Indicator { n: u32, radius: f64 },
    #[serde(rename = "radial_powerlog")]
    RadialPowerLog {
        n: u32,
        g: f64,
        h: f64,
        /// Support radius; omitted in JSON when infinite.
        #[serde(rename = "R", default = "infinity", skip_serializing_if = "is_infinite")]
        radius: f64,
        p_root: f64,
    },
    #[serde(rename = "tailpower")]
    TailPower { n: u32, g: f64 },
    #[serde(rename = "bumpsum")]
    BumpSum {
        n: u32,
        alpha: f64,
        #[serde(rename = "K")]
        k_max: u32,
        p_root: f64,
    },
}

/// Radial structure of a member, the dispatch point for every sup-over-centers
/// computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `f(y) = profile(|y|)`; when `nonincreasing` the sup over centers of
    /// any integral against a radially nonincreasing kernel sits at the
    /// origin.
    Radial { profile: Piecewise, nonincreasing: bool },
    /// Mass concentrates at finitely many centers; sup searches start there.
    NotRadial { centers: Vec<Vec<f64>> },
}

impl TestFunction {
    pub fn zero(n: u32) -> Self {
        TestFunction::Zero { n }
    }

    pub fn indicator(n: u32, radius: f64) -> Self {
        TestFunction::Indicator { n, radius }
    }

    pub fn radial_power_log(n: u32, g: f64, h: f64, radius: f64, p_root: f64) -> Self {
        TestFunction::RadialPowerLog { n, g, h, radius, p_root }
    }

    /// Pure radial power `|y|^-g` on all of `R^n`.
    pub fn radial_power(n: u32, g: f64) -> Self {
        TestFunction::RadialPowerLog { n, g, h: 0.0, radius: f64::INFINITY, p_root: 1.0 }
    }

    pub fn tail_power(n: u32, g: f64) -> Self {
        TestFunction::TailPower { n, g }
    }

    pub fn bump_sum(n: u32, alpha: f64, k_max: u32, p_root: f64) -> Self {
        TestFunction::BumpSum { n, alpha, k_max, p_root }
    }

    /// The member `f = (chi_B / (psi2(|y|) |ln|y||^2))^(1/p)` on
    /// `B = B(0, delta)`: its modulus integrand against `psi2` collapses to
    /// `|ln|y||^-2 |y|^-n`, so `eta_{p,psi2}f(r)^p = C omega_{n-1} / |ln r|`
    /// for `r <= delta` (`C` the scale's constant). The support radius is
    /// the largest `delta <= e^-1` keeping `psi2(t) |ln t|^2` nondecreasing
    /// on `(0, delta]`, which also makes the profile nonincreasing; for
    /// `psi2 = t^beta` this gives `delta = e^(-2/beta)` when `beta <= 2`.
    pub fn log_decay_member(n: u32, p: f64, psi2: &ScaleFunction) -> Result<TestFunction> {
        if !(p >= 1.0) {
            return Err(Error::InvalidDescriptor(format!("exponent p must be >= 1, got {p}")));
        }
        let Some((_, a, b)) = psi2.leading_at_zero() else {
            return Err(Error::InvalidDescriptor(
                "log-decay member needs a scale with known behaviour at zero".into(),
            ));
        };
        if !(a > 0.0 || (a == 0.0 && b <= -2.0)) {
            return Err(Error::InvalidDescriptor(
                "scale grows too slowly at zero for the log-decay member".into(),
            ));
        }
        let mut delta = (-1.0_f64).exp();
        if let ScaleFunction::PowerLog { t0, .. } = psi2 {
            delta = delta.min(*t0);
        }
        if a > 0.0 && b + 2.0 > 0.0 {
            delta = delta.min((-(b + 2.0) / a).exp());
        }
        Ok(TestFunction::RadialPowerLog { n, g: a, h: b + 2.0, radius: delta, p_root: p })
    }

    pub fn dimension(&self) -> u32 {
        match self {
            TestFunction::Zero { n }
            | TestFunction::Indicator { n, .. }
            | TestFunction::RadialPowerLog { n, .. }
            | TestFunction::TailPower { n, .. }
            | TestFunction::BumpSum { n, .. } => *n,
        }
    }

    /// Structural validation; see `eval` for the runtime singularity rule.
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension();
        if n == 0 {
            return Err(Error::InvalidDescriptor("dimension must be at least 1".into()));
        }
        if n > 3 {
            return Err(Error::DimensionTooLarge(n));
        }
        match self {
            TestFunction::Zero { .. } => {}
            TestFunction::Indicator { radius, .. } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidDescriptor(format!(
                        "indicator radius must be positive and finite, got {radius}"
                    )));
                }
            }
            TestFunction::RadialPowerLog { g, h, radius, p_root, .. } => {
                if !g.is_finite() || !h.is_finite() {
                    return Err(Error::InvalidDescriptor("exponents must be finite".into()));
                }
                if !(*p_root >= 1.0) {
                    return Err(Error::InvalidDescriptor(format!(
                        "p_root must be >= 1, got {p_root}"
                    )));
                }
                if !(*radius > 0.0) {
                    return Err(Error::InvalidDescriptor(format!(
                        "support radius must be positive, got {radius}"
                    )));
                }
                if *h != 0.0 && !(*radius < 1.0) {
                    return Err(Error::InvalidDescriptor(
                        "a live log factor needs support inside the unit ball".into(),
                    ));
                }
            }
            TestFunction::TailPower { g, .. } => {
                if !g.is_finite() {
                    return Err(Error::InvalidDescriptor("exponent must be finite".into()));
                }
            }
            TestFunction::BumpSum { alpha, k_max, p_root, .. } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidDescriptor(format!(
                        "bump exponent must be positive, got {alpha}"
                    )));
                }
                if !(3..=64).contains(k_max) {
                    return Err(Error::InvalidDescriptor(format!(
                        "bump count K must lie in 3..=64, got {k_max}"
                    )));
                }
                if !(*p_root >= 1.0) {
                    return Err(Error::InvalidDescriptor(format!(
                        "p_root must be >= 1, got {p_root}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when the value blows up at the origin (so `eval` errors there).
    pub fn singular_at_origin(&self) -> bool {
        match self {
            TestFunction::RadialPowerLog { g, h, .. } => *g > 0.0 || (*g == 0.0 && *h < 0.0),
            _ => false,
        }
    }

    /// Pointwise value at `y`.
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dimension() as usize {
            return Err(Error::InvalidDescriptor(format!(
                "point has dimension {}, function has dimension {}",
                y.len(),
                self.dimension()
            )));
        }
        let t = norm(y);
        match self {
            TestFunction::Zero { .. } => Ok(0.0),
            TestFunction::Indicator { radius, .. } => Ok(if t < *radius { 1.0 } else { 0.0 }),
            TestFunction::RadialPowerLog { g, h, radius, p_root, .. } => {
                if t >= *radius {
                    return Ok(0.0);
                }
                if t == 0.0 {
                    if self.singular_at_origin() {
                        return Err(Error::SingularPoint);
                    }
                    // g < 0 sends the value to 0 regardless of h; g = 0
                    // leaves h >= 0, giving 0 for h > 0 and 1 for h = 0.
                    return Ok(if *g == 0.0 && *h == 0.0 { 1.0 } else { 0.0 });
                }
                let mut v = t.powf(-g / p_root);
                if *h != 0.0 {
                    v *= t.ln().abs().powf(-h / p_root);
                }
                Ok(v)
            }
            TestFunction::TailPower { g, .. } => Ok(if t > 1.0 { t.powf(-g) } else { 0.0 }),
            TestFunction::BumpSum { alpha, k_max, p_root, .. } => {
                let mut sum = 0.0;
                for k in 3..=*k_max {
                    let bump_r = (8.0_f64).powi(-(k as i32));
                    let mut d2 = (y[0] - (2.0_f64).powi(-(k as i32))).powi(2);
                    for c in &y[1..] {
                        d2 += c * c;
                    }
                    if d2 < bump_r * bump_r {
                        sum += (8.0_f64).powf(alpha * k as f64);
                    }
                }
                Ok(sum.powf(1.0 / p_root))
            }
        }
    }

    /// Radial structure; the profile satisfies `f(y) = profile(|y|)` exactly
    /// for radial kinds.
    pub fn radial_profile(&self) -> Shape {
        match self {
            TestFunction::Zero { .. } => {
                Shape::Radial { profile: Piecewise::new(vec![]), nonincreasing: true }
            }
            TestFunction::Indicator { radius, .. } => Shape::Radial {
                profile: Piecewise::new(vec![Piece::new(0.0, *radius, 1.0, 0.0, 0.0)]),
                nonincreasing: true,
            },
            TestFunction::RadialPowerLog { g, h, radius, p_root, .. } => {
                let profile = Piecewise::new(vec![Piece::new(
                    0.0,
                    *radius,
                    1.0,
                    -g / p_root,
                    -h / p_root,
                )]);
                // The profile falls iff g ln t + h ln|ln t| grows toward the
                // support edge: automatic for h <= 0 with g >= 0, and for
                // h > 0 exactly when the support stays below e^(-h/g).
                let nonincreasing = if *h <= 0.0 {
                    *g >= 0.0
                } else {
                    *g > 0.0 && *radius <= (-h / g).exp()
                };
                Shape::Radial { profile, nonincreasing }
            }
            TestFunction::TailPower { g, .. } => Shape::Radial {
                profile: Piecewise::new(vec![Piece::new(1.0, f64::INFINITY, 1.0, -g, 0.0)]),
                // The jump up across |y| = 1 breaks monotonicity whatever g is.
                nonincreasing: false,
            },
            TestFunction::BumpSum { .. } => Shape::NotRadial { centers: self.bump_centers() },
        }
    }

    /// Bump centers `(2^-k, 0, ..., 0)` for `k = 3..=K`; empty for other
    /// kinds.
    pub fn bump_centers(&self) -> Vec<Vec<f64>> {
        match self {
            TestFunction::BumpSum { n, k_max, .. } => (3..=*k_max)
                .map(|k| {
                    let mut c = vec![0.0; *n as usize];
                    c[0] = (2.0_f64).powi(-(k as i32));
                    c
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Whether `∫_{B(0,1)} |f|^p` is finite, by the radial exponent test.
    pub fn locally_p_integrable(&self, p: f64) -> bool {
        match self {
            TestFunction::Zero { .. }
            | TestFunction::Indicator { .. }
            | TestFunction::TailPower { .. }
            | TestFunction::BumpSum { .. } => true,
            TestFunction::RadialPowerLog { n, g, h, .. } => {
                // Polar reduction: the integrand near zero is
                // s^(n - 1 - gp/p_root) |ln s|^(-hp/p_root).
                let TestFunction::RadialPowerLog { p_root, .. } = self else { unreachable!() };
                let a = *n as f64 - g * p / p_root;
                let b = -h * p / p_root;
                a > 0.0 || (a == 0.0 && b < -1.0)
            }
        }
    }
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn geometry_constants() {
        assert!((Geometry::new(1).ball_volume() - 2.0).abs() < 1e-14);
        assert!((Geometry::new(2).ball_volume() - std::f64::consts::PI).abs() < 1e-14);
        assert!((Geometry::new(3).ball_volume() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-13);
        assert!((Geometry::new(1).sphere_area() - 2.0).abs() < 1e-14);
        assert!((Geometry::new(2).sphere_area() - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((Geometry::new(3).sphere_area() - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn eval_pointwise_values() {
        let f = TestFunction::radial_power(1, 0.5);
        assert!((f.eval(&[4.0]).unwrap() - 0.5).abs() < 1e-15);

        let f = TestFunction::zero(2);
        assert_eq!(f.eval(&[0.3, -0.4]).unwrap(), 0.0);

        let f = TestFunction::indicator(2, 1.0);
        assert_eq!(f.eval(&[0.6, 0.7]).unwrap(), 1.0);
        assert_eq!(f.eval(&[0.6, 0.8]).unwrap(), 0.0);

        let f = TestFunction::bump_sum(1, 0.5, 6, 1.0);
        let expected = (8.0_f64).powf(1.5);
        assert!((f.eval(&[0.125]).unwrap() - expected).abs() < 1e-12 * expected);
        // Between bumps the sum is empty.
        assert_eq!(f.eval(&[0.2]).unwrap(), 0.0);

        let f = TestFunction::tail_power(1, 2.0);
        assert_eq!(f.eval(&[0.5]).unwrap(), 0.0);
        assert_eq!(f.eval(&[1.0]).unwrap(), 0.0);
        assert!((f.eval(&[2.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn origin_values_and_singularities() {
        assert!(matches!(
            TestFunction::radial_power(1, 0.5).eval(&[0.0]),
            Err(Error::SingularPoint)
        ));
        assert!(matches!(
            TestFunction::radial_power_log(1, 0.0, -1.0, 0.5, 1.0).eval(&[0.0]),
            Err(Error::SingularPoint)
        ));
        // Negative g vanishes at the origin, log factors notwithstanding.
        assert_eq!(TestFunction::radial_power_log(1, -0.5, -1.0, 0.5, 1.0).eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(TestFunction::radial_power_log(1, 0.0, 2.0, 0.5, 1.0).eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(TestFunction::radial_power_log(1, 0.0, 0.0, 0.5, 1.0).eval(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn profile_matches_eval_at_random_points() {
        let members = vec![
            TestFunction::indicator(2, 1.0),
            TestFunction::radial_power(1, 0.5),
            TestFunction::radial_power_log(1, 0.5, 2.0, (-4.0_f64).exp(), 1.0),
            TestFunction::radial_power_log(3, -0.7, -1.5, 0.9, 2.0),
            TestFunction::tail_power(2, 2.0),
        ];
        let mut rng = StdRng::seed_from_u64(0x1007);
        for f in members {
            let Shape::Radial { profile, .. } = f.radial_profile() else { panic!("radial") };
            let n = f.dimension() as usize;
            for _ in 0..2000 {
                // Log-uniform radius keeps small scales represented.
                let t: f64 = 10.0_f64.powf(rng.random_range(-6.0..1.0));
                let mut y = vec![0.0; n];
                let mut norm2 = 0.0_f64;
                for c in y.iter_mut() {
                    *c = rng.random_range(-1.0..1.0);
                    norm2 += *c * *c;
                }
                let scale = t / norm2.sqrt();
                for c in y.iter_mut() {
                    *c *= scale;
                }
                let direct = f.eval(&y).unwrap();
                let via_profile = profile.eval(t);
                let denom = direct.abs().max(1e-300);
                assert!(
                    (direct - via_profile).abs() / denom < 1e-12,
                    "mismatch for {f:?} at t={t}: {direct} vs {via_profile}"
                );
            }
        }
    }

    #[test]
    fn nonincreasing_flags() {
        let flag = |f: &TestFunction| match f.radial_profile() {
            Shape::Radial { nonincreasing, .. } => nonincreasing,
            Shape::NotRadial { .. } => panic!("radial expected"),
        };
        assert!(flag(&TestFunction::indicator(1, 1.0)));
        assert!(flag(&TestFunction::radial_power(1, 0.5)));
        assert!(!flag(&TestFunction::tail_power(1, 2.0)));
        // Pure log decay rises toward the support edge.
        assert!(!flag(&TestFunction::radial_power_log(1, 0.0, 2.0, 0.018, 1.0)));
        // With a positive power the log factor loses iff the support stays
        // below e^(-h/g); test both sides of the threshold.
        assert!(flag(&TestFunction::radial_power_log(1, 0.5, 2.0, (-4.0_f64).exp(), 1.0)));
        assert!(!flag(&TestFunction::radial_power_log(1, 0.5, 2.0, (-3.9_f64).exp(), 1.0)));
    }

    #[test]
    fn log_decay_member_reproduces_the_closed_form_radius() {
        // psi2 = t^beta gives delta = e^(-2/beta).
        let f = TestFunction::log_decay_member(1, 1.0, &ScaleFunction::pure_power(0.5)).unwrap();
        let TestFunction::RadialPowerLog { g, h, radius, p_root, .. } = f else { panic!() };
        assert_eq!(g, 0.5);
        assert_eq!(h, 2.0);
        assert_eq!(p_root, 1.0);
        assert!((radius - (-4.0_f64).exp()).abs() < 1e-18);

        // A log-only scale with b <= -2 imposes no critical point; the
        // member is a plain indicator of B(0, min(e^-1, t0)).
        let f = TestFunction::log_decay_member(1, 1.0, &ScaleFunction::power_log(0.0, -2.0)).unwrap();
        let TestFunction::RadialPowerLog { g, h, radius, .. } = f else { panic!() };
        assert_eq!((g, h), (0.0, 0.0));
        assert!((radius - crate::scale::DEFAULT_T0).abs() < 1e-18);

        // Slowly growing scales admit no such member.
        assert!(TestFunction::log_decay_member(1, 1.0, &ScaleFunction::power_log(0.0, -1.0)).is_err());
        assert!(TestFunction::log_decay_member(1, 1.0, &ScaleFunction::pure_power(-0.5)).is_err());
    }

    #[test]
    fn log_decay_member_profile_is_nonincreasing() {
        for psi2 in [
            ScaleFunction::pure_power(0.5),
            ScaleFunction::pure_power(1.5),
            ScaleFunction::power_log(0.75, 1.0),
            ScaleFunction::power_log(0.25, -3.0),
            ScaleFunction::power_log(0.0, -2.5),
        ] {
            let f = TestFunction::log_decay_member(1, 2.0, &psi2).unwrap();
            match f.radial_profile() {
                Shape::Radial { nonincreasing, .. } => {
                    assert!(nonincreasing, "profile must fall for {psi2:?}")
                }
                Shape::NotRadial { .. } => panic!("radial expected"),
            }
        }
    }

    #[test]
    fn bump_supports_are_pairwise_disjoint() {
        // Gap between consecutive centers minus the two radii, in exact
        // powers of two: 2^-(k+1) - 2^-3k - 2^-3(k+1) > 0.
        for k in 3..=40u32 {
            let gap = (2.0_f64).powi(-(k as i32 + 1));
            let radii = (2.0_f64).powi(-(3 * k as i32)) + (2.0_f64).powi(-(3 * (k as i32 + 1)));
            assert!(gap > radii, "bumps {k} and {} overlap", k + 1);
        }
    }

    #[test]
    fn local_integrability_gate() {
        assert!(TestFunction::radial_power(1, 0.5).locally_p_integrable(1.0));
        assert!(!TestFunction::radial_power(1, 1.0).locally_p_integrable(1.0));
        assert!(!TestFunction::radial_power(1, 0.6).locally_p_integrable(2.0));
        // The boundary exponent converges exactly when the log weight does.
        assert!(TestFunction::radial_power_log(1, 1.0, 2.0, 0.5, 1.0).locally_p_integrable(1.0));
        assert!(!TestFunction::radial_power_log(1, 1.0, 1.0, 0.5, 1.0).locally_p_integrable(1.0));
        assert!(TestFunction::bump_sum(1, 0.5, 12, 1.0).locally_p_integrable(1.0));
        assert!(TestFunction::tail_power(1, 0.5).locally_p_integrable(1.0));
    }

    #[test]
    fn descriptor_round_trip() {
        let spec = r#"{"kind":"radial_powerlog","n":1,"g":0.0,"h":2.0,"R":0.0183156,"p_root":1.0}"#;
        let f: TestFunction = serde_json::from_str(spec).unwrap();
        f.validate().unwrap();
        let TestFunction::RadialPowerLog { g, h, radius, .. } = &f else { panic!() };
        assert_eq!((*g, *h), (0.0, 2.0));
        assert!((radius - 0.0183156).abs() < 1e-18);

        let spec = r#"{"kind":"bumpsum","n":1,"alpha":0.5,"K":12,"p_root":1.0}"#;
        let f: TestFunction = serde_json::from_str(spec).unwrap();
        f.validate().unwrap();
        assert_eq!(f, TestFunction::bump_sum(1, 0.5, 12, 1.0));

        // An infinite support radius is omitted on the wire and restored on
        // parse.
        let f = TestFunction::radial_power(1, 0.25);
        let json = serde_json::to_string(&f).unwrap();
        assert!(!json.contains('R'));
        let back: TestFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn validation_rejects_malformed_members() {
        assert!(TestFunction::indicator(1, 0.0).validate().is_err());
        assert!(TestFunction::indicator(4, 1.0).validate().is_err());
        // Live log factor with support touching the unit sphere.
        assert!(TestFunction::radial_power_log(1, 0.5, 2.0, 1.0, 1.0).validate().is_err());
        assert!(TestFunction::radial_power_log(1, 0.5, 0.0, 2.0, 1.0).validate().is_ok());
        assert!(TestFunction::bump_sum(1, 0.5, 2, 1.0).validate().is_err());
        assert!(TestFunction::bump_sum(1, 0.0, 12, 1.0).validate().is_err());
    }
}
