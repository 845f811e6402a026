//! Schmidt-number certification from second and fourth RRM moments.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ggm::{real_count, GgmBasis};
use crate::linalg::real_singular_values;
use crate::moments::w_constant;
use crate::rng::SeedPath;
use crate::scalar::Real;
use crate::tensor::CorrelationTensor;

/// Tolerance for the strict fourth-moment inequality.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Which piece of the closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// All L singular values equal.
    Uniform,
    /// `n_g` equal values and one smaller residual.
    Grouped(usize),
}

fn check_x(x: usize, d: usize) -> Result<()> {
    if d < 2 || x < 1 || x > d {
        return Err(Error::Parameter(format!("x={x} outside 1..={d}")));
    }
    Ok(())
}

/// Largest C₂ reachable when Σ τⱼ ≤ dx − 1.
pub fn second_moment_cap(x: usize, d: usize) -> f64 {
    let s = (d * x - 1) as f64;
    let l = real_count(d) as f64;
    s * s / (l * l)
}

/// Branch whose y-range contains `y`.
pub fn branch_for(x: usize, y: f64, d: usize) -> Result<Branch> {
    check_x(x, d)?;
    if y < 0.0 || !y.is_finite() {
        return Err(Error::Parameter(format!("C2 = {y} must be finite and >= 0")));
    }
    let cap = second_moment_cap(x, d);
    if y > cap * (1.0 + 1e-12) {
        return Err(Error::AboveCap { x, y, cap });
    }
    let l = real_count(d) as f64;
    if y <= cap / l {
        return Ok(Branch::Uniform);
    }
    // n_g with s²/(L²(n_g+1)) <= y < s²/(L² n_g)
    let ratio = cap / y;
    let n = (ratio.ceil() as usize).saturating_sub(1).max(1);
    Ok(Branch::Grouped(n.min(real_count(d) - 1)))
}

/// Evaluates one branch formula, ignoring its y-range.
pub fn branch_value(x: usize, y: f64, d: usize, branch: Branch) -> f64 {
    let l = real_count(d) as f64;
    let w = w_constant(d);
    match branch {
        Branch::Uniform => w * l.powi(3) * y * y * (2.0 + l),
        Branch::Grouped(n) => {
            let (f, _) = grouped_parts(x, y, d, n);
            2.0 * w * f / ((n + 1) as f64).powi(4) + w * l.powi(4) * y * y
        }
    }
}

fn grouped_parts(x: usize, y: f64, d: usize, n: usize) -> (f64, f64) {
    let l = real_count(d) as f64;
    let s = (d * x - 1) as f64;
    let nf = n as f64;
    let b = (nf * (nf + 1.0) * l * l * y - nf * s * s).max(0.0).sqrt();
    let f = (b - s).powi(4) + (b + nf * s).powi(4) / nf.powi(3);
    (f, b)
}

/// Closed-form minimum of Q⁽⁴⁾ over singular-value profiles with Q⁽²⁾ = y and Στ ≤ dx − 1.
pub fn f_min(x: usize, y: f64, d: usize) -> Result<f64> {
    let b = branch_for(x, y, d)?;
    Ok(branch_value(x, y, d, b))
}

/// Singular-value profile attaining the closed form, sorted descending.
pub fn analytic_minimizer(x: usize, y: f64, d: usize) -> Result<Vec<f64>> {
    let l = real_count(d);
    let mut tau = vec![0.0; l];
    match branch_for(x, y, d)? {
        Branch::Uniform => tau.iter_mut().for_each(|t| *t = (l as f64 * y).sqrt()),
        Branch::Grouped(n) => {
            let s = (d * x - 1) as f64;
            let nf = n as f64;
            let (_, b) = grouped_parts(x, y, d, n);
            let a = (nf * s + b) / (nf * (nf + 1.0));
            tau[..n].iter_mut().for_each(|t| *t = a);
            tau[n] = ((s - b) / (nf + 1.0)).max(0.0);
        }
    }
    Ok(tau)
}

/// Largest y for which the closed-form minimizer respects τⱼ ≤ d − 1.
pub fn box_feasible_limit(x: usize, d: usize) -> Result<f64> {
    check_x(x, d)?;
    let cap = second_moment_cap(x, d);
    let u = (d - 1) as f64;
    let top = |y: f64| analytic_minimizer(x, y, d).map(|t| t[0]);
    if top(cap)? <= u {
        return Ok(cap);
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if top(mid)? <= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest y for which some profile satisfies all three constraints.
pub fn oracle_feasible_limit(x: usize, d: usize) -> Result<f64> {
    check_x(x, d)?;
    let l = real_count(d);
    let s = (d * x - 1) as f64;
    let u = (d - 1) as f64;
    let full = ((s / u).floor() as usize).min(l);
    let rest = if full < l { (s - full as f64 * u).min(u) } else { 0.0 };
    let q = full as f64 * u * u + rest * rest;
    let lf = l as f64;
    Ok((q / (lf * lf)).min(second_moment_cap(x, d)))
}

struct Problem {
    l: usize,
    q: f64,
    s: f64,
    u: f64,
}

impl Problem {
    fn new(x: usize, y: f64, d: usize) -> Result<Self> {
        check_x(x, d)?;
        if y < 0.0 || !y.is_finite() {
            return Err(Error::Parameter(format!("C2 = {y} must be finite and >= 0")));
        }
        let l = real_count(d);
        let lim = oracle_feasible_limit(x, d)?;
        if y > lim * (1.0 + 1e-12) {
            return Err(Error::Parameter(format!(
                "infeasible: y = {y} exceeds {lim} for x = {x}"
            )));
        }
        Ok(Self {
            l,
            q: (l * l) as f64 * y,
            s: (d * x - 1) as f64,
            u: (d - 1) as f64,
        })
    }

    fn feasible(&self, t: &[f64]) -> bool {
        let tol = 1e-9 * (1.0 + self.s);
        t.iter().all(|&x| x >= -tol && x <= self.u + tol) && t.iter().sum::<f64>() <= self.s + tol
    }

    /// Exhaustive search over KKT structures: c entries at the bound, n₁ at a, n₂ at b.
    fn enumerate(&self) -> f64 {
        let mut best = f64::INFINITY;
        let (l, q, s, u) = (self.l, self.q, self.s, self.u);
        let mut consider = |t: &[(usize, f64)]| {
            let prof: Vec<f64> = t.iter().flat_map(|&(k, v)| std::iter::repeat_n(v, k)).collect();
            let ss: f64 = prof.iter().map(|x| x * x).sum();
            if (ss - q).abs() <= 1e-9 * (1.0 + q) && self.feasible(&prof) {
                best = best.min(prof.iter().map(|x| x.powi(4)).sum());
            }
        };
        if q == 0.0 {
            return 0.0;
        }
        for c in 0..=l {
            let qr = q - c as f64 * u * u;
            let sr = s - c as f64 * u;
            if qr < -1e-12 || sr < -1e-12 {
                break;
            }
            if qr.abs() <= 1e-12 {
                consider(&[(c, u)]);
                continue;
            }
            for n1 in 1..=l - c {
                // sum constraint inactive: equal interior values
                consider(&[(c, u), (n1, (qr / n1 as f64).sqrt())]);
                for n2 in 1..=l - c - n1 {
                    let (a1, a2) = (n1 as f64, n2 as f64);
                    let disc = a1 * a2 * ((a1 + a2) * qr - sr * sr);
                    if disc < 0.0 {
                        continue;
                    }
                    for sign in [1.0, -1.0] {
                        let a = (a1 * sr + sign * disc.sqrt()) / (a1 * (a1 + a2));
                        let b = (sr - a1 * a) / a2;
                        if a >= 0.0 && b >= -1e-12 {
                            consider(&[(c, u), (n1, a), (n2, b.max(0.0))]);
                        }
                    }
                }
            }
        }
        best
    }

    /// Feasible angles for rotating (τᵢ, τⱼ) at fixed τᵢ² + τⱼ².
    fn pair_interval(&self, r: f64, room: f64) -> Vec<(f64, f64)> {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
        let lo = if r > self.u { (self.u / r).acos() } else { 0.0 };
        let hi = if r > self.u { (self.u / r).asin() } else { FRAC_PI_2 };
        let mut pieces = Vec::new();
        let m = room / r;
        if m >= SQRT_2 {
            pieces.push((0.0, FRAC_PI_2));
        } else {
            let phi = ((m / SQRT_2).clamp(-1.0, 1.0)).asin() - FRAC_PI_4;
            if phi >= 0.0 {
                pieces.push((0.0, phi));
                pieces.push((FRAC_PI_2 - phi, FRAC_PI_2));
            }
        }
        pieces
            .into_iter()
            .map(|(a, b)| (a.max(lo), b.min(hi)))
            .filter(|(a, b)| a <= b)
            .collect()
    }

    /// Pairwise-rotation descent from `t`, feasible at every step.
    fn descend(&self, t: &mut [f64]) -> f64 {
        use std::f64::consts::FRAC_PI_4;
        let mut prev = f64::INFINITY;
        for _ in 0..2000 {
            for i in 0..self.l {
                for j in i + 1..self.l {
                    let r = (t[i] * t[i] + t[j] * t[j]).sqrt();
                    if r == 0.0 {
                        continue;
                    }
                    let others: f64 = t.iter().sum::<f64>() - t[i] - t[j];
                    let room = self.s - others + 1e-15;
                    let iv = self.pair_interval(r, room);
                    let mut best = None;
                    for (a, b) in iv {
                        let th = FRAC_PI_4.clamp(a, b);
                        let dist = (th - FRAC_PI_4).abs();
                        if best.is_none_or(|(_, d0)| dist < d0) {
                            best = Some((th, dist));
                        }
                    }
                    if let Some((th, _)) = best {
                        t[i] = r * th.cos();
                        t[j] = r * th.sin();
                    }
                }
            }
            let obj: f64 = t.iter().map(|x| x.powi(4)).sum();
            if prev - obj <= 1e-16 * (1.0 + obj) {
                return obj;
            }
            prev = obj;
        }
        prev
    }

    /// Random feasible start: concentrated profile followed by random pair rotations.
    fn random_start<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut t = vec![0.0; self.l];
        let mut rem = self.q;
        for x in t.iter_mut() {
            let v = rem.sqrt().min(self.u);
            *x = v;
            rem = (rem - v * v).max(0.0);
        }
        t.shuffle(rng);
        for _ in 0..10 * self.l {
            let i = rng.random_range(0..self.l);
            let j = rng.random_range(0..self.l);
            if i == j {
                continue;
            }
            let r = (t[i] * t[i] + t[j] * t[j]).sqrt();
            if r == 0.0 {
                continue;
            }
            let others: f64 = t.iter().sum::<f64>() - t[i] - t[j];
            let iv = self.pair_interval(r, self.s - others + 1e-15);
            let total: f64 = iv.iter().map(|(a, b)| b - a).sum();
            if iv.is_empty() {
                continue;
            }
            let mut pick = rng.random::<f64>() * total;
            for (a, b) in iv {
                if pick <= b - a {
                    let th = a + pick;
                    t[i] = r * th.cos();
                    t[j] = r * th.sin();
                    break;
                }
                pick -= b - a;
            }
        }
        t
    }
}

/// Direct numerical minimum of Q⁽⁴⁾ including the box τⱼ ∈ [0, d − 1].
///
/// Minimum of a structured exhaustive search and 100 randomized descents.
pub fn f_min_oracle(x: usize, y: f64, d: usize) -> Result<f64> {
    let p = Problem::new(x, y, d)?;
    let mut best = p.enumerate();
    let mut rng = SeedPath::new(0x0f_ace, (x * 1000 + d) as u64).rng();
    for _ in 0..100 {
        let mut t = p.random_start(&mut rng);
        if p.feasible(&t) {
            best = best.min(p.descend(&mut t));
        }
    }
    if !best.is_finite() {
        return Err(Error::Parameter(format!("no feasible profile for x={x}, y={y}")));
    }
    let l = p.l as f64;
    let w = w_constant(d);
    Ok(w * (2.0 * best + l.powi(4) * y * y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiredRule {
    SecondMomentOnly,
    FourthMoment,
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchmidtVerdict {
    pub c2: f64,
    pub c4: f64,
    pub d: usize,
    /// Certified lower bound r on the Schmidt number (1 = nothing certified).
    pub certified_sn_lower_bound: usize,
    pub fired_rule: FiredRule,
    /// C₄ lies within the tie tolerance of F_min at the next level.
    pub boundary_flag: bool,
    /// F_min(x, C₂) for x = 1..d; `None` where C₂ is above the cap.
    pub f_min_values: Vec<Option<f64>>,
}

/// Largest r with C₂ > ((r−1)d−1)²/L² or C₄ < F_min(r−1, C₂) − tol.
pub fn schmidt_verdict(c2: f64, c4: f64, d: usize) -> Result<SchmidtVerdict> {
    if c2 < 0.0 || c4 < 0.0 || !c2.is_finite() || !c4.is_finite() {
        return Err(Error::Parameter("moments must be finite and nonnegative".into()));
    }
    if d < 2 {
        return Err(Error::Dimension(format!("d={d}")));
    }
    let f_min_values: Vec<Option<f64>> = (1..=d).map(|x| f_min(x, c2, d).ok()).collect();
    let mut bound = 1;
    let mut rule = FiredRule::None;
    for r in (2..=d).rev() {
        let x = r - 1;
        if c2 > second_moment_cap(x, d) * (1.0 + 1e-12) {
            bound = r;
            rule = FiredRule::SecondMomentOnly;
            break;
        }
        if let Some(f) = f_min_values[x - 1] {
            if c4 < f - BOUNDARY_TOL {
                bound = r;
                rule = FiredRule::FourthMoment;
                break;
            }
        }
    }
    let boundary_flag = bound < d && f_min_values[bound - 1].is_some_and(|f| (c4 - f).abs() <= BOUNDARY_TOL);
    Ok(SchmidtVerdict {
        c2,
        c4,
        d,
        certified_sn_lower_bound: bound,
        fired_rule: rule,
        boundary_flag,
        f_min_values,
    })
}

/// Largest r with ∥T∥_tr > rd − 1 on the full block; 0 if none.
pub fn trace_norm_sn_bound<T: Real>(t: &CorrelationTensor<T>) -> Result<usize> {
    let d = t.dims().d;
    let norm: f64 = real_singular_values(&t.full_block()?).iter().map(|x| x.as_f64()).sum();
    Ok((1..=d).rev().find(|&r| norm > (r * d - 1) as f64 + 1e-9).unwrap_or(0))
}

/// ∥T_R∥_tr = Σ τⱼ of the real block.
pub fn real_block_trace_norm<T: Real>(t: &CorrelationTensor<T>, basis: &GgmBasis<T>) -> Result<f64> {
    Ok(real_singular_values(&t.real_block(basis)?)
        .iter()
        .map(|x| x.as_f64())
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparabilityCheck {
    pub bound: f64,
    pub violated: bool,
}

/// Q⁽²⁾ ≤ (2/(d+2))ⁿ for fully separable n-qudit states.
pub fn multipartite_separability_check(q2: f64, d: usize, n: usize) -> Result<SeparabilityCheck> {
    if n < 2 || d < 2 {
        return Err(Error::Dimension(format!("need n >= 2 and d >= 2, got n={n}, d={d}")));
    }
    let bound = (2.0 / (d as f64 + 2.0)).powi(n as i32);
    Ok(SeparabilityCheck {
        bound,
        violated: q2 > bound + 1e-12,
    })
}
