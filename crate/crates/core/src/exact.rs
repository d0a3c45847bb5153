//! Exact Harnack distances and certified lower bounds.
//!
//! For a ball `B_{x0}(R)` the distance from the centre is
//! `(R + ρ) R^{d-2} / (R - ρ)^{d-1}` with `ρ = |x - x0|`. In the plane the
//! logarithm of the Harnack distance on a disk is the Poincaré metric, which
//! gives an exact two-point oracle. Lower bounds come from balls containing
//! the domain: shrinking a domain can only increase the distance, so any
//! enclosing ball's value is a lower bound, as is any ratio `h(x)/h(y)` of a
//! positive harmonic `h` on such a ball.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{HarnackError, Result};
use crate::geometry::{distance, midpoint, Domain, Point};

/// Default number of boundary samples for Poisson-kernel witnesses.
pub const DEFAULT_WITNESS_SAMPLES: usize = 720;

/// A point at distance `rho` from the centre of a ball of radius `radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactBallQuery {
    pub dim: usize,
    pub radius: f64,
    pub rho: f64,
}

impl ExactBallQuery {
    pub fn new(dim: usize, radius: f64, rho: f64) -> Result<Self> {
        if dim < 2 {
            return Err(HarnackError::InvalidArgument(format!("dimension {dim} < 2")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(HarnackError::InvalidArgument(format!("radius {radius} must be positive")));
        }
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(HarnackError::InvalidArgument(format!("rho {rho} must be non-negative")));
        }
        if rho >= radius {
            return Err(HarnackError::InvalidArgument(format!(
                "point not interior: rho {rho} >= radius {radius}"
            )));
        }
        Ok(Self { dim, radius, rho })
    }

    /// `(R+ρ)/(R−ρ) · (R/(R−ρ))^{d−2}`. `R − ρ` is exact once `ρ ≥ R/2`,
    /// so the value keeps full precision as `ρ → R`.
    pub fn value(&self) -> f64 {
        let (r, rho) = (self.radius, self.rho);
        let gap = r - rho;
        (r + rho) / gap * (r / gap).powi(self.dim as i32 - 2)
    }
}

/// Exact Harnack distance between the centre of a ball and a point at distance `rho`.
pub fn ball_harnack_from_center(dim: usize, radius: f64, rho: f64) -> Result<f64> {
    Ok(ExactBallQuery::new(dim, radius, rho)?.value())
}

/// `|a - b| / |1 - conj(a) b|` for points of the unit disk.
fn pseudo_hyperbolic(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (Complex64::new(1.0, 0.0) - a.conj() * b).norm()
}

fn disk_coordinates(p: &Point, center: &Point, radius: f64) -> Result<Complex64> {
    let c = p.coords();
    let o = center.coords();
    if distance(c, o) >= radius {
        return Err(HarnackError::NotInterior { point: c.to_vec() });
    }
    Ok(Complex64::new((c[0] - o[0]) / radius, (c[1] - o[1]) / radius))
}

/// Poincaré distance (curvature −1) between two points of the disk `B_center(radius)`.
pub fn disk_hyperbolic_distance(x: &Point, y: &Point, center: &Point, radius: f64) -> Result<f64> {
    check_disk_args(x, y, center, radius)?;
    let a = disk_coordinates(x, center, radius)?;
    let b = disk_coordinates(y, center, radius)?;
    Ok(2.0 * pseudo_hyperbolic(a, b).atanh())
}

fn check_disk_args(x: &Point, y: &Point, center: &Point, radius: f64) -> Result<()> {
    for p in [x, y, center] {
        if p.dim() != 2 {
            return Err(HarnackError::DimensionMismatch { expected: 2, found: p.dim() });
        }
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(HarnackError::InvalidArgument(format!("radius {radius} must be positive")));
    }
    Ok(())
}

/// Exact Harnack distance on a planar disk, `exp(ρ_hyp(x, y))`.
pub fn disk_harnack_two_points(x: &Point, y: &Point, center: &Point, radius: f64) -> Result<f64> {
    check_disk_args(x, y, center, radius)?;
    let a = disk_coordinates(x, center, radius)?;
    let b = disk_coordinates(y, center, radius)?;
    let t = pseudo_hyperbolic(a, b);
    Ok((1.0 + t) / (1.0 - t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundMethod {
    EnclosingBall,
    PoissonWitness,
    DiskExact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerBoundWitness {
    /// `value` is the ball formula about `center` evaluated at `rho`.
    EnclosingBall { center: Point, radius: f64, rho: f64 },
    /// `value = K(numerator, zeta) / K(denominator, zeta)` for the Poisson
    /// kernel of the ball `B_{ball_center}(ball_radius)`.
    PoissonKernel {
        ball_center: Point,
        ball_radius: f64,
        zeta: Point,
        numerator: Point,
        denominator: Point,
    },
    Hyperbolic { distance: f64 },
}

/// A certified lower bound on the Harnack distance between two points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    pub method: LowerBoundMethod,
    pub value: f64,
    pub witness: LowerBoundWitness,
}

fn require_pair(domain: &Domain, x: &Point, y: &Point) -> Result<()> {
    domain.require_interior(x)?;
    domain.require_interior(y)?;
    Ok(())
}

/// Ball formula on the smallest ball about `x` (and about `y`) containing
/// the domain; the larger value wins.
pub fn enclosing_ball_lower_bound(domain: &Domain, x: &Point, y: &Point) -> Result<LowerBoundCertificate> {
    require_pair(domain, x, y)?;
    let rho = x.distance(y);
    let mut best: Option<LowerBoundCertificate> = None;
    for center in [x, y] {
        let radius = domain.enclosing_radius(center.coords());
        let value = ExactBallQuery::new(domain.dim(), radius, rho)?.value();
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(LowerBoundCertificate {
                method: LowerBoundMethod::EnclosingBall,
                value,
                witness: LowerBoundWitness::EnclosingBall { center: center.clone(), radius, rho },
            });
        }
    }
    Ok(best.expect("two candidates"))
}

/// Deterministic unit directions: an angular grid in 2-D, a Fibonacci
/// sphere in 3-D, seeded Gaussian directions above.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - y * y).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), y, r * phi.sin()]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x4841_524e);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n > 1e-12 {
                    out.push(v.into_iter().map(|c| c / n).collect());
                }
            }
            out
        }
    }
}

/// `ln K(p, ζ)` up to the constant factor, `K(p, ζ) = (R² − |p − c|²) / |p − ζ|^d`.
fn log_poisson_kernel(p: &[f64], center: &[f64], radius: f64, zeta: &[f64], dim: usize) -> f64 {
    let depth = radius * radius - distance(p, center).powi(2);
    depth.ln() - dim as f64 * distance(p, zeta).ln()
}

/// Best ratio of Poisson kernels over sampled boundary points of balls
/// containing the domain, centred at the midpoint of `x, y` and at `x` and `y`.
///
/// Besides the `boundary_samples` directions, the boundary points on the
/// rays through `x` and `y` are always tried; for a ball centred at one of
/// the points those are the extremal kernels.
pub fn poisson_witness_lower_bound(
    domain: &Domain,
    x: &Point,
    y: &Point,
    boundary_samples: usize,
) -> Result<LowerBoundCertificate> {
    require_pair(domain, x, y)?;
    if boundary_samples == 0 {
        return Err(HarnackError::InvalidArgument("boundary_samples must be at least 1".into()));
    }
    let dim = domain.dim();
    let directions = sphere_directions(dim, boundary_samples);
    let centers = [midpoint(x.coords(), y.coords()), x.coords().to_vec(), y.coords().to_vec()];

    let mut best_log = 0.0f64;
    let mut best: Option<LowerBoundWitness> = None;
    for c in &centers {
        let radius = domain.enclosing_radius(c);
        let mut zetas: Vec<Vec<f64>> = Vec::with_capacity(directions.len() + 4);
        for p in [x, y] {
            let r = distance(p.coords(), c);
            if r > 0.0 {
                for sign in [1.0, -1.0] {
                    zetas.push(
                        c.iter().zip(p.coords()).map(|(ci, pi)| ci + sign * radius * (pi - ci) / r).collect(),
                    );
                }
            }
        }
        zetas.extend(directions.iter().map(|u| c.iter().zip(u).map(|(ci, ui)| ci + radius * ui).collect()));

        for zeta in &zetas {
            let lx = log_poisson_kernel(x.coords(), c, radius, zeta, dim);
            let ly = log_poisson_kernel(y.coords(), c, radius, zeta, dim);
            let gap = (lx - ly).abs();
            if gap.is_finite() && gap > best_log {
                best_log = gap;
                let (num, den) = if lx >= ly { (x, y) } else { (y, x) };
                best = Some(LowerBoundWitness::PoissonKernel {
                    ball_center: Point::new(c.clone())?,
                    ball_radius: radius,
                    zeta: Point::new(zeta.clone())?,
                    numerator: num.clone(),
                    denominator: den.clone(),
                });
            }
        }
    }
    let witness = match best {
        Some(w) => w,
        None => {
            // x = y: every kernel gives ratio 1
            let c = &centers[0];
            let radius = domain.enclosing_radius(c);
            let zeta: Vec<f64> = c.iter().zip(&directions[0]).map(|(ci, ui)| ci + radius * ui).collect();
            LowerBoundWitness::PoissonKernel {
                ball_center: Point::new(c.clone())?,
                ball_radius: radius,
                zeta: Point::new(zeta)?,
                numerator: x.clone(),
                denominator: y.clone(),
            }
        }
    };
    Ok(LowerBoundCertificate { method: LowerBoundMethod::PoissonWitness, value: best_log.exp(), witness })
}

/// Exact value when the domain is a planar disk, `None` otherwise.
pub fn disk_exact_certificate(domain: &Domain, x: &Point, y: &Point) -> Result<Option<LowerBoundCertificate>> {
    require_pair(domain, x, y)?;
    match domain.as_ball() {
        Some((center, radius)) if domain.dim() == 2 => {
            let value = disk_harnack_two_points(x, y, center, radius)?;
            let distance = disk_hyperbolic_distance(x, y, center, radius)?;
            Ok(Some(LowerBoundCertificate {
                method: LowerBoundMethod::DiskExact,
                value,
                witness: LowerBoundWitness::Hyperbolic { distance },
            }))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_disk() -> Domain {
        Domain::ball(Point::origin(2), 1.0).unwrap()
    }

    #[test]
    fn ball_formula_hand_values() {
        assert_eq!(ball_harnack_from_center(2, 1.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(ball_harnack_from_center(3, 1.0, 0.5).unwrap(), 6.0, max_relative = 1e-12);
        assert_relative_eq!(ball_harnack_from_center(2, 2.0, 1.0).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn ball_formula_rejects_bad_queries() {
        assert!(ball_harnack_from_center(2, 1.0, 1.0).is_err());
        assert!(ball_harnack_from_center(2, 0.0, 0.0).is_err());
        assert!(ball_harnack_from_center(2, -1.0, 0.0).is_err());
        assert!(ball_harnack_from_center(1, 1.0, 0.5).is_err());
    }

    #[test]
    fn disk_oracle_examples() {
        let o = Point::origin(2);
        let x = Point::xy(0.3, -0.2);
        assert_relative_eq!(disk_harnack_two_points(&x, &x, &o, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            disk_harnack_two_points(&o, &Point::xy(0.5, 0.0), &o, 1.0).unwrap(),
            3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            disk_harnack_two_points(&Point::xy(-0.4, 0.0), &Point::xy(0.4, 0.0), &o, 1.0).unwrap(),
            49.0 / 9.0,
            max_relative = 1e-13
        );
        let rho = disk_hyperbolic_distance(&Point::xy(-0.4, 0.0), &Point::xy(0.4, 0.0), &o, 1.0).unwrap();
        assert_relative_eq!(rho, 2.0 * (1.4f64 / 0.6).ln(), max_relative = 1e-13);
    }

    #[test]
    fn disk_oracle_errors() {
        let o = Point::origin(2);
        assert!(disk_harnack_two_points(&Point::xy(1.0, 0.0), &o, &o, 1.0).is_err());
        assert!(disk_harnack_two_points(&Point::xyz(0.0, 0.0, 0.0), &Point::xyz(0.1, 0.0, 0.0), &Point::origin(3), 1.0).is_err());
    }

    #[test]
    fn enclosing_ball_examples() {
        let o = Point::origin(2);
        let y = Point::xy(0.5, 0.0);
        let lb = enclosing_ball_lower_bound(&unit_disk(), &o, &y).unwrap();
        assert_relative_eq!(lb.value, 3.0, max_relative = 1e-14);
        let square = Domain::cuboid(Point::xy(-1.0, -1.0), Point::xy(1.0, 1.0)).unwrap();
        let lb = enclosing_ball_lower_bound(&square, &o, &y).unwrap();
        let s2 = 2f64.sqrt();
        // the ball about y is larger (radius √3.25), so it gives a weaker value
        assert_relative_eq!(lb.value, (s2 + 0.5) / (s2 - 0.5), max_relative = 1e-14);
        let same = enclosing_ball_lower_bound(&square, &y, &y).unwrap();
        assert_eq!(same.value, 1.0);
        assert!(enclosing_ball_lower_bound(&square, &o, &Point::xy(2.0, 0.0)).is_err());
    }

    #[test]
    fn poisson_witness_examples() {
        let o = Point::origin(2);
        let y = Point::xy(0.5, 0.0);
        let d = unit_disk();
        assert_eq!(poisson_witness_lower_bound(&d, &y, &y, 16).unwrap().value, 1.0);
        let w = poisson_witness_lower_bound(&d, &o, &y, 4096).unwrap();
        assert_relative_eq!(w.value, 3.0, max_relative = 1e-12);
        let square = Domain::cuboid(Point::xy(-1.0, -1.0), Point::xy(1.0, 1.0)).unwrap();
        let enc = enclosing_ball_lower_bound(&square, &o, &y).unwrap().value;
        let w = poisson_witness_lower_bound(&square, &o, &y, DEFAULT_WITNESS_SAMPLES).unwrap();
        assert!(w.value >= enc - 1e-6, "{} < {enc}", w.value);
        assert!(poisson_witness_lower_bound(&square, &o, &y, 0).is_err());
    }

    #[test]
    fn witness_converges_to_best_enclosing_disk_value() {
        // on each enclosing disk the sup of kernel ratios is that disk's exact value
        let d = unit_disk();
        let x = Point::xy(-0.3, 0.1);
        let y = Point::xy(0.2, 0.4);
        let exact = disk_harnack_two_points(&x, &y, &Point::origin(2), 1.0).unwrap();
        let target = [Point::xy(-0.05, 0.25), x.clone(), y.clone()]
            .iter()
            .map(|c| {
                let r = d.enclosing_radius(c.coords());
                disk_harnack_two_points(&x, &y, c, r).unwrap()
            })
            .fold(0.0, f64::max);
        let mut last = 0.0;
        for n in [8, 64, 512, 4096] {
            let w = poisson_witness_lower_bound(&d, &x, &y, n).unwrap().value;
            assert!(w <= target * (1.0 + 1e-9) && target <= exact);
            assert!(w >= last);
            last = w;
        }
        assert!((last - target).abs() <= 1e-4 * target, "{last} vs {target}");
    }

    #[test]
    fn sphere_directions_are_unit() {
        for dim in 2..=5 {
            let dirs = sphere_directions(dim, 50);
            assert_eq!(dirs.len(), 50);
            for d in dirs {
                let n: f64 = d.iter().map(|c| c * c).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    fn disk_point() -> impl Strategy<Value = Point> {
        (0.0f64..0.99, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Point::xy(r * t.cos(), r * t.sin()))
    }

    proptest! {
        #[test]
        fn ball_formula_increases_in_rho(dim in 2usize..7, radius in 0.1f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9 && hi < 0.999);
            let v_lo = ball_harnack_from_center(dim, radius, lo * radius).unwrap();
            let v_hi = ball_harnack_from_center(dim, radius, hi * radius).unwrap();
            prop_assert!(v_lo < v_hi);
        }

        #[test]
        fn disk_oracle_matches_ball_formula(y in disk_point()) {
            let o = Point::origin(2);
            let disk = disk_harnack_two_points(&o, &y, &o, 1.0).unwrap();
            let ball = ball_harnack_from_center(2, 1.0, y.distance(&o)).unwrap();
            prop_assert!((disk - ball).abs() <= 1e-9 * ball);
        }

        #[test]
        fn disk_oracle_is_symmetric(x in disk_point(), y in disk_point()) {
            let o = Point::origin(2);
            let a = disk_harnack_two_points(&x, &y, &o, 1.0).unwrap();
            let b = disk_harnack_two_points(&y, &x, &o, 1.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn disk_oracle_multiplicative_triangle(x in disk_point(), y in disk_point(), z in disk_point()) {
            let o = Point::origin(2);
            let xy = disk_harnack_two_points(&x, &y, &o, 1.0).unwrap();
            let xz = disk_harnack_two_points(&x, &z, &o, 1.0).unwrap();
            let zy = disk_harnack_two_points(&z, &y, &o, 1.0).unwrap();
            prop_assert!(xy <= xz * zy * (1.0 + 1e-9));
        }

        #[test]
        fn lower_bounds_below_disk_value(x in disk_point(), y in disk_point()) {
            let d = unit_disk();
            let o = Point::origin(2);
            let exact = disk_harnack_two_points(&x, &y, &o, 1.0).unwrap();
            let enc = enclosing_ball_lower_bound(&d, &x, &y).unwrap();
            let wit = poisson_witness_lower_bound(&d, &x, &y, 90).unwrap();
            prop_assert!(enc.value >= 1.0 && wit.value >= 1.0);
            prop_assert!(enc.value <= exact * (1.0 + 1e-9));
            prop_assert!(wit.value <= exact * (1.0 + 1e-9));
            let swapped = enclosing_ball_lower_bound(&d, &y, &x).unwrap();
            prop_assert_eq!(swapped.value, enc.value);
        }
    }
}
