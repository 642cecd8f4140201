//! Oracles shared by the integration suites. Everything here recomputes a
//! quantity through a route the library does not use (pointwise evaluation
//! plus Simpson panels, weighted sample clouds, exact plateau sums), so a
//! bug in the closed-form paths cannot hide in its own verification.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stummel_core::{distribution_function, NormValue, TestFunction};

/// Relative distance with an exact-match fast path, safe against b = 0.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Simpson's rule in the log variable: `∫_lo^hi g(s) ds` via `s = e^u`.
/// `steps` is rounded up to an even count. Accurate for integrands smooth
/// in `u` on `[ln lo, ln hi]`; do not point it across a jump.
pub fn simpson_log(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    assert!(lo > 0.0 && hi > lo, "simpson_log needs 0 < lo < hi, got [{lo}, {hi}]");
    let m = steps + steps % 2;
    let (u_lo, u_hi) = (lo.ln(), hi.ln());
    let h = (u_hi - u_lo) / m as f64;
    let node = |j: usize| {
        let s = (u_lo + h * j as f64).exp();
        g(s) * s
    };
    let mut sum = node(0) + node(m);
    for j in 1..m {
        sum += node(j) * if j % 2 == 0 { 2.0 } else { 4.0 };
    }
    sum * h / 3.0
}

/// A point at distance `s` from the origin along the first axis.
pub fn point_at_radius(n: u32, s: f64) -> Vec<f64> {
    let mut y = vec![0.0; n as usize];
    y[0] = s;
    y
}

/// Surface measure of the unit sphere, hand constants for n <= 3.
pub fn sphere_area(n: u32) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::TAU,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("oracle covers n <= 3, got {n}"),
    }
}

/// `∫_{B(0,r)} |f|^p dy` for radial `f` with a profile smooth on `(0, r)`:
/// pointwise evaluation integrated by log-Simpson panels. The core below
/// `3e-17 r` is dropped; for an integrable singularity that undershoots by
/// the core's own vanishing mass.
pub fn ball_integral_oracle(f: &TestFunction, p: f64, r: f64) -> f64 {
    let n = f.dimension();
    let nf = n as f64;
    let g = |s: f64| {
        f.eval(&point_at_radius(n, s)).expect("oracle point is off the singularity").powf(p)
            * s.powf(nf - 1.0)
    };
    sphere_area(n) * simpson_log(&g, 3e-17 * r, r, 4096)
}

/// Grid-sup oracle for the classical Morrey norm of a radial nonincreasing
/// function: max over log-spaced radii of `r^(-lambda/p) ||f||_{L^p(B(0,r))}`,
/// the ball integral taken at the origin where such profiles attain their
/// sup.
pub fn grid_sup_morrey_oracle(
    f: &TestFunction,
    p: f64,
    lambda: f64,
    r_lo: f64,
    r_hi: f64,
    points: usize,
) -> f64 {
    assert!(points >= 2);
    let mut best = 0.0_f64;
    for j in 0..points {
        let frac = j as f64 / (points - 1) as f64;
        let r = r_lo * (r_hi / r_lo).powf(frac);
        let v = ball_integral_oracle(f, p, r).powf(1.0 / p) * r.powf(-lambda / p);
        best = best.max(v);
    }
    best
}

/// Weighted `|f|` sample cloud sorted descending, the empirical side of
/// the distribution/rearrangement pair.
pub struct EmpiricalRearrangement {
    values: Vec<f64>,
    /// `cum[j]` estimates the measure of `{|f| >= values[j]}`.
    cum: Vec<f64>,
}

impl EmpiricalRearrangement {
    /// Draw `samples` points through `draw(rng) -> (point, 1/density)`;
    /// the weight of a draw is the reciprocal sampling density at the
    /// point, so weight sums estimate Lebesgue measure.
    pub fn sample(
        f: &TestFunction,
        samples: u64,
        seed: u64,
        draw: &mut dyn FnMut(&mut ChaCha8Rng) -> (Vec<f64>, f64),
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / samples as f64;
        let mut graded: Vec<(f64, f64)> = (0..samples)
            .map(|_| {
                let (y, w) = draw(&mut rng);
                (f.eval(&y).expect("sampler must avoid singular points"), w * scale)
            })
            .collect();
        graded.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut cum = Vec::with_capacity(graded.len());
        let mut acc = 0.0;
        let values = graded
            .iter()
            .map(|&(v, w)| {
                acc += w;
                cum.push(acc);
                v
            })
            .collect();
        EmpiricalRearrangement { values, cum }
    }

    /// Empirical `f*(t)`: the sample value at which the estimated measure
    /// of `{|f| >= v}` first exceeds `t`; 0 when the whole cloud weighs
    /// less than `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.cum.partition_point(|&c| c <= t);
        if idx == self.values.len() {
            0.0
        } else {
            self.values[idx]
        }
    }
}

/// Distribution-route layer cake for a function taking finitely many
/// positive values: `p ∫ σ^(p-1) D_f(σ) dσ` summed exactly over the
/// plateaus of `D_f` between consecutive `levels` (ascending, positive).
pub fn step_layer_cake(f: &TestFunction, p: f64, levels: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut prev = 0.0_f64;
    for &v in levels {
        assert!(v > prev, "levels must ascend, got {v} after {prev}");
        let mid = 0.5 * (prev + v);
        match distribution_function(f, mid).expect("distribution defined at positive sigma") {
            NormValue::Finite(d) => total += d * (v.powf(p) - prev.powf(p)),
            NormValue::Infinite => panic!("superlevel set at sigma = {mid} has infinite measure"),
        }
        prev = v;
    }
    total
}
