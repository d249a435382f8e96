//! Coulomb-approximation radial wavefunctions and radial matrix elements.
//!
//! The radial equation is solved on a uniform grid in `x = sqrt(r)` for the
//! scaled function `y(x) = x^{3/2} R(r)`, which obeys
//!
//! ```text
//! y'' = [ (2l + 1/2)(2l + 3/2) / x^2 + 8 x^2 (V(x^2) - E) ] y,   V = -1/r,
//! ```
//!
//! with `E = -1/(2 n*^2)` in atomic units. Integration runs inward with
//! Numerov's method from a decaying tail beyond the outer turning point. In the
//! inner classically forbidden region the regular solution shrinks
//! monotonically toward the origin; when `|y|` starts growing again the
//! irregular Coulomb solution has taken over, and the wavefunction is
//! truncated there and the truncation is recorded.
//!
//! All grids share the origin `x = 0` and differ only in their first and last
//! index, so two solutions with the same step can be multiplied pointwise.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::structure::RydbergLevel;

/// Default step in `x = sqrt(r)`.
pub const DEFAULT_STEP: f64 = 0.011;
/// Inner cutoff (a0) for levels with a quantum defect.
pub const CORE_RADIUS: f64 = 0.05;
/// Inner cutoff (a0) for pure Coulomb levels.
pub const HYDROGENIC_INNER_RADIUS: f64 = 1e-4;

/// Integration grid for one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    /// Step in `x = sqrt(r)`, units of sqrt(a0).
    pub step: f64,
    /// Inner cutoff radius (a0).
    pub r_in: f64,
    /// Outer starting radius (a0).
    pub r_out: f64,
}

impl RadialGrid {
    /// The default grid: `r_out = 2 n* (n* + 15)` and an inner cutoff at the
    /// core for defect-shifted levels.
    pub fn for_level(level: &RydbergLevel, step: f64) -> Self {
        let ns = level.n_star;
        let r_in = if level.defect().abs() > 1e-12 { CORE_RADIUS } else { HYDROGENIC_INNER_RADIUS };
        RadialGrid { step, r_in, r_out: 2.0 * ns * (ns + 15.0) }
    }

    pub fn validate(&self, level: &RydbergLevel) -> Result<()> {
        let ns = level.n_star;
        if !(self.r_in > 0.0) {
            return Err(Error::domain("inner cutoff must be positive"));
        }
        if self.r_out <= 2.0 * ns * ns {
            return Err(Error::domain(format!(
                "outer radius {} a0 does not clear the turning point {} a0",
                self.r_out,
                2.0 * ns * ns
            )));
        }
        // local wavelength in x is at least 2 pi / sqrt(8)
        let shortest = 2.0 * std::f64::consts::PI / 8f64.sqrt();
        if !(self.step > 0.0) || shortest / self.step < 10.0 {
            return Err(Error::domain(format!("step {} resolves fewer than 10 points per oscillation", self.step)));
        }
        if self.r_in.sqrt() + 4.0 * self.step >= self.r_out.sqrt() {
            return Err(Error::domain("grid has too few points"));
        }
        Ok(())
    }

    fn first_index(&self) -> usize {
        (self.r_in.sqrt() / self.step).ceil().max(1.0) as usize
    }

    fn last_index(&self) -> usize {
        (self.r_out.sqrt() / self.step).floor() as usize
    }
}

/// A normalized radial wavefunction.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub level: RydbergLevel,
    pub step: f64,
    /// Grid index of `values[0]`; sample `i` sits at `x = (start + i) * step`.
    pub start: usize,
    /// Scaled function `y = x^{3/2} R`.
    pub values: Vec<f64>,
    /// `|trapezoid norm - 1|` after Simpson normalization.
    pub norm_residual: f64,
    /// Radius (a0) below which the solution was zeroed after divergence.
    pub truncated_at: Option<f64>,
}

impl RadialSolution {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        (self.start + i) as f64 * self.step
    }

    /// `R(r)` at sample `i`.
    pub fn radial_value(&self, i: usize) -> f64 {
        self.values[i] / self.x(i).powf(1.5)
    }

    /// `<r^k>` for this state.
    pub fn expectation_r(&self, k: i32) -> f64 {
        overlap_integral(self, self, 2 * k + 2)
    }

    /// Number of sign changes of the wavefunction.
    pub fn node_count(&self) -> usize {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = peak * 1e-8;
        let mut last_sign = 0.0;
        let mut nodes = 0;
        for &v in &self.values {
            if v.abs() < floor {
                continue;
            }
            let s = v.signum();
            if last_sign != 0.0 && s != last_sign {
                nodes += 1;
            }
            last_sign = s;
        }
        nodes
    }
}

/// Solve the radial equation for `level` on `grid`.
pub fn solve_radial(level: &RydbergLevel, grid: &RadialGrid) -> Result<RadialSolution> {
    grid.validate(level)?;
    if level.n_star <= level.l as f64 {
        return Err(Error::domain(format!(
            "n*={} does not exceed l={}; the Coulomb approximation has no bound state",
            level.n_star, level.l
        )));
    }
    let h = grid.step;
    let first = grid.first_index();
    let last = grid.last_index();
    let count = last - first + 1;

    let ns2 = level.n_star * level.n_star;
    let l = level.l as f64;
    let centrifugal = (2.0 * l + 0.5) * (2.0 * l + 1.5);
    let g = |x: f64| -8.0 + 4.0 * x * x / ns2 + centrifugal / (x * x);

    let xs: Vec<f64> = (first..=last).map(|i| i as f64 * h).collect();
    let k: Vec<f64> = xs.iter().map(|&x| 1.0 - h * h * g(x) / 12.0).collect();

    let mut y = vec![0.0; count];
    y[count - 1] = 1e-12;
    // WKB decay across one step seeds the tail
    let kappa = g(xs[count - 1] - 0.5 * h).max(0.0).sqrt();
    y[count - 2] = y[count - 1] * (h * kappa).exp();

    // inner turning point: outermost x (below the orbit) where g turns positive
    let inner_tp = (0..count).take_while(|&i| g(xs[i]) > 0.0).last();
    let mut truncated_at = None;
    for i in (1..count - 1).rev() {
        y[i - 1] = ((12.0 - 10.0 * k[i]) * y[i] - k[i + 1] * y[i + 1]) / k[i - 1];
        if y[i - 1].abs() > 1e100 {
            for v in &mut y[i - 1..] {
                *v *= 1e-100;
            }
        }
        // growing inward under the barrier: the irregular solution has taken over
        if let Some(tp) = inner_tp {
            if i - 1 < tp && y[i - 1].abs() > y[i].abs() {
                truncated_at = Some(xs[i] * xs[i]);
                // the forbidden region has no nodes; drop any flipped samples
                let sign = y[tp].signum();
                let keep = (i..=tp).find(|&k| y[k].signum() == sign).unwrap_or(tp);
                for v in &mut y[..keep] {
                    *v = 0.0;
                }
                break;
            }
        }
    }

    let mut sol = RadialSolution {
        level: *level,
        step: h,
        start: first,
        values: y,
        norm_residual: 0.0,
        truncated_at,
    };
    let norm = simpson_overlap(&sol, &sol, 2);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::domain(format!("radial solution for {} is not normalizable", level.label())));
    }
    let scale = norm.sqrt().recip();
    // outermost lobe positive
    let tail_sign = sol.values.iter().rev().find(|v| v.abs() > 0.0).map_or(1.0, |v| v.signum());
    for v in &mut sol.values {
        *v *= scale * tail_sign;
    }
    sol.norm_residual = (overlap_integral(&sol, &sol, 2) - 1.0).abs();
    Ok(sol)
}

/// `2 * integral y_a y_b x^power dx` by the trapezoid rule on the common range.
fn overlap_integral(a: &RadialSolution, b: &RadialSolution, power: i32) -> f64 {
    debug_assert!((a.step - b.step).abs() < 1e-15);
    let lo = a.start.max(b.start);
    let hi = (a.start + a.len()).min(b.start + b.len());
    if hi <= lo {
        return 0.0;
    }
    let h = a.step;
    let mut sum = 0.0;
    for idx in lo..hi {
        let x = idx as f64 * h;
        let w = if idx == lo || idx == hi - 1 { 0.5 } else { 1.0 };
        sum += w * a.values[idx - a.start] * b.values[idx - b.start] * x.powi(power);
    }
    2.0 * h * sum
}

/// Composite Simpson version of [`overlap_integral`].
fn simpson_overlap(a: &RadialSolution, b: &RadialSolution, power: i32) -> f64 {
    let lo = a.start.max(b.start);
    let hi = (a.start + a.len()).min(b.start + b.len());
    if hi <= lo + 2 {
        return overlap_integral(a, b, power);
    }
    let h = a.step;
    let f = |idx: usize| {
        let x = idx as f64 * h;
        a.values[idx - a.start] * b.values[idx - b.start] * x.powi(power)
    };
    let mut n = hi - lo - 1;
    let mut sum = 0.0;
    if n % 2 == 1 {
        // trailing interval by trapezoid; the tail is negligible there
        sum += 0.5 * h * (f(hi - 2) + f(hi - 1));
        n -= 1;
    }
    let mut s = f(lo) + f(lo + n);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(lo + k);
    }
    sum += s * h / 3.0;
    2.0 * sum
}

/// `<a| r |b>` in units of a0 for two solutions on the same step.
pub fn radial_overlap_r(a: &RadialSolution, b: &RadialSolution) -> Result<f64> {
    if (a.step - b.step).abs() > 1e-15 {
        return Err(Error::domain("radial solutions live on different grids"));
    }
    Ok(overlap_integral(a, b, 4))
}

/// Radial dipole matrix element `<a| r |b>` in e a0, using default grids.
pub fn radial_dipole(a: &RydbergLevel, b: &RydbergLevel) -> Result<f64> {
    check_dipole_pair(a, b)?;
    let sa = solve_radial(a, &RadialGrid::for_level(a, DEFAULT_STEP))?;
    let sb = solve_radial(b, &RadialGrid::for_level(b, DEFAULT_STEP))?;
    radial_overlap_r(&sa, &sb)
}

fn check_dipole_pair(a: &RydbergLevel, b: &RydbergLevel) -> Result<()> {
    if (a.l as i64 - b.l as i64).abs() != 1 {
        return Err(Error::domain(format!(
            "radial dipole needs |l_a - l_b| = 1, got l={} and l={}",
            a.l, b.l
        )));
    }
    Ok(())
}

type SolutionKey = (i64, u32);

fn solution_key(level: &RydbergLevel) -> SolutionKey {
    ((level.n_star * 1e9).round() as i64, level.l)
}

/// Thread-safe memo of radial solutions and dipole matrix elements, keyed by
/// `(n*, l)` with n* quantized to 1e-9.
#[derive(Debug)]
pub struct RadialCache {
    step: f64,
    solutions: RwLock<HashMap<SolutionKey, Arc<RadialSolution>>>,
    elements: RwLock<HashMap<(SolutionKey, SolutionKey), f64>>,
}

impl Default for RadialCache {
    fn default() -> Self {
        Self::new(DEFAULT_STEP)
    }
}

impl RadialCache {
    pub fn new(step: f64) -> Self {
        RadialCache { step, solutions: Default::default(), elements: Default::default() }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn solution(&self, level: &RydbergLevel) -> Result<Arc<RadialSolution>> {
        let key = solution_key(level);
        if let Some(s) = self.solutions.read().expect("radial cache poisoned").get(&key) {
            return Ok(Arc::clone(s));
        }
        let sol = Arc::new(solve_radial(level, &RadialGrid::for_level(level, self.step))?);
        self.solutions
            .write()
            .expect("radial cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&sol));
        Ok(sol)
    }

    /// `<a| r |b>` in a0.
    pub fn dipole(&self, a: &RydbergLevel, b: &RydbergLevel) -> Result<f64> {
        check_dipole_pair(a, b)?;
        let (ka, kb) = (solution_key(a), solution_key(b));
        let key = if ka <= kb { (ka, kb) } else { (kb, ka) };
        if let Some(&v) = self.elements.read().expect("radial cache poisoned").get(&key) {
            return Ok(v);
        }
        let (sa, sb) = (self.solution(a)?, self.solution(b)?);
        let v = radial_overlap_r(&sa, &sb)?;
        self.elements.write().expect("radial cache poisoned").insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::HalfInt;
    use crate::structure::AtomData;

    fn hyd(n: u32, l: u32) -> RydbergLevel {
        RydbergLevel::hydrogenic(n, l, HalfInt::from_twice(2 * l as i32 + 1)).unwrap()
    }

    #[test]
    fn hydrogen_ground_state_mean_radius() {
        let s = solve_radial(&hyd(1, 0), &RadialGrid::for_level(&hyd(1, 0), DEFAULT_STEP)).unwrap();
        let mean = s.expectation_r(1);
        assert!((mean - 1.5).abs() < 1e-4, "{mean}");
        assert!(s.norm_residual < 1e-6);
    }

    #[test]
    fn hydrogen_mean_radius_general() {
        for (n, l) in [(2, 1), (5, 0), (10, 3), (20, 7)] {
            let lvl = hyd(n, l);
            let s = solve_radial(&lvl, &RadialGrid::for_level(&lvl, DEFAULT_STEP)).unwrap();
            let expect = (3.0 * (n * n) as f64 - (l * (l + 1)) as f64) / 2.0;
            assert!((s.expectation_r(1) / expect - 1.0).abs() < 1e-5, "n={n} l={l}");
        }
    }

    #[test]
    fn normalized_after_solve() {
        let atom = AtomData::rb87();
        let lvl = atom.level(40, 2, HalfInt::from_twice(5)).unwrap();
        let s = solve_radial(&lvl, &RadialGrid::for_level(&lvl, DEFAULT_STEP)).unwrap();
        assert!((s.expectation_r(0) - 1.0).abs() < 1e-6);
        assert!(s.norm_residual < 1e-6);
    }

    #[test]
    fn node_count_matches_quantum_numbers() {
        let atom = AtomData::rb87();
        let lvl = atom.level(40, 2, HalfInt::from_twice(5)).unwrap();
        let s = solve_radial(&lvl, &RadialGrid::for_level(&lvl, DEFAULT_STEP)).unwrap();
        // only the nodes outside the core survive: ceil(n* - l - 1)
        assert_eq!(s.node_count(), (lvl.n_star - 3.0).ceil() as usize);
        assert_eq!(s.node_count(), 36);
        let h = hyd(12, 4);
        let s = solve_radial(&h, &RadialGrid::for_level(&h, DEFAULT_STEP)).unwrap();
        assert_eq!(s.node_count(), 7);
    }

    #[test]
    fn defect_shifted_s_state_is_truncated_and_flagged() {
        let atom = AtomData::rb87();
        let lvl = atom.level(40, 0, HalfInt::HALF).unwrap();
        let grid = RadialGrid { r_in: 1e-4, ..RadialGrid::for_level(&lvl, DEFAULT_STEP) };
        let s = solve_radial(&lvl, &grid).unwrap();
        assert!(s.truncated_at.is_some());
        assert!(s.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn hydrogen_1s_2p() {
        let v = radial_dipole(&hyd(1, 0), &hyd(2, 1)).unwrap();
        let exact = 128.0 * 6f64.sqrt() / 243.0;
        assert!((v.abs() - exact).abs() < 1e-3, "{v} vs {exact}");
    }

    #[test]
    fn hydrogen_same_n_elements() {
        for (n, l) in [(10u32, 3u32), (10, 9), (20, 1), (20, 15)] {
            let v = radial_dipole(&hyd(n, l), &hyd(n, l - 1)).unwrap();
            let nf = n as f64;
            let exact = 1.5 * nf * (nf * nf - (l * l) as f64).sqrt();
            assert!((v.abs() / exact - 1.0).abs() < 1e-3, "n={n} l={l}: {v} vs {exact}");
        }
    }

    #[test]
    fn dipole_is_symmetric() {
        let atom = AtomData::rb87();
        let a = atom.level(41, 2, HalfInt::from_twice(5)).unwrap();
        let b = atom.level(42, 1, HalfInt::from_twice(3)).unwrap();
        let ab = radial_dipole(&a, &b).unwrap();
        let ba = radial_dipole(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-8);
    }

    #[test]
    fn dipole_rejects_l_mismatch() {
        assert!(radial_dipole(&hyd(3, 0), &hyd(3, 2)).is_err());
    }

    #[test]
    fn cache_matches_direct() {
        let atom = AtomData::rb87();
        let a = atom.level(39, 3, HalfInt::from_twice(7)).unwrap();
        let b = atom.level(40, 4, HalfInt::from_twice(9)).unwrap();
        let cache = RadialCache::default();
        let c1 = cache.dipole(&a, &b).unwrap();
        let c2 = cache.dipole(&b, &a).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(c1, radial_dipole(&a, &b).unwrap());
    }

    #[test]
    fn grid_validation() {
        let lvl = hyd(10, 2);
        let mut g = RadialGrid::for_level(&lvl, DEFAULT_STEP);
        g.r_out = 150.0;
        assert!(solve_radial(&lvl, &g).is_err());
        let g = RadialGrid { step: 0.5, ..RadialGrid::for_level(&lvl, DEFAULT_STEP) };
        assert!(solve_radial(&lvl, &g).is_err());
    }

    #[test]
    fn step_halving_converges() {
        let atom = AtomData::rb87();
        let a = atom.level(41, 2, HalfInt::from_twice(5)).unwrap();
        for b in [atom.level(42, 1, HalfInt::from_twice(3)).unwrap(), atom.level(40, 3, HalfInt::from_twice(7)).unwrap()] {
            let coarse = RadialCache::new(DEFAULT_STEP).dipole(&a, &b).unwrap();
            let fine = RadialCache::new(DEFAULT_STEP / 2.0).dipole(&a, &b).unwrap();
            assert!((coarse / fine - 1.0).abs() < 1e-5, "{coarse} vs {fine}");
        }
        let s = RadialCache::default().solution(&a).unwrap();
        eprintln!("points {}", s.len());
    }

    #[test]
    fn d_to_p_element_scales_as_n_star_squared() {
        let atom = AtomData::rb87();
        let cache = RadialCache::default();
        let (mut sx, mut sy, mut sxx, mut sxy, mut k) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for n in 30..=50 {
            let d = atom.level(n, 2, HalfInt::from_twice(5)).unwrap();
            let p = atom.level(n + 1, 1, HalfInt::from_twice(3)).unwrap();
            let x = d.n_star.ln();
            let y = cache.dipole(&d, &p).unwrap().abs().ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            k += 1.0;
        }
        let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        assert!((slope - 2.0).abs() < 0.1, "{slope}");
    }
}
