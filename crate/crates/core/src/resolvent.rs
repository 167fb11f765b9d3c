//! The nonlinear resolvent `J_r = (I + r f)^{-1}`: path-following solution
//! of `z + r f(z) = w`, argument-principle uniqueness certificates, the
//! derivative `1 / (1 + r f'(J_r(w)))` and closed-form oracles for the two
//! worked generators `z/(1-z)` and `z(1-z)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::holo::{check_disk, Cx, HoloMap};

/// Iterates are kept inside `|z| <= 1 - DISK_GUARD`.
pub const DISK_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Required absolute residual `|z + r f(z) - w|`.
    pub tol: f64,
    /// Maximum number of accepted continuation steps in `r`.
    pub max_continuation_steps: usize,
    /// Newton steps allowed at the target parameter before declaring stagnation.
    pub max_damped_steps: usize,
    /// Compute the winding-number certificate.
    pub certify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_continuation_steps: 64,
            max_damped_steps: 100,
            certify: false,
        }
    }
}

impl SolveOptions {
    pub fn certified() -> Self {
        Self {
            certify: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    Winding(i64),
    Skipped,
}

/// Solution record of `z + r f(z) = w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventSolve {
    pub z: Cx,
    pub residual: f64,
    pub iterations: usize,
    pub continuation_steps: usize,
    pub certificate: Certificate,
    /// Residual after every Newton step, in order.
    pub trace: Vec<f64>,
}

#[inline]
fn residual_fn(map: &HoloMap, r: f64, w: Cx, z: Cx) -> Cx {
    z + map.eval(z) * r - w
}

fn in_disk(z: Cx) -> bool {
    z.norm() <= 1.0 - DISK_GUARD
}

/// Damped Newton iteration for `z + r f(z) = w` started from `z0`.
///
/// Each step is halved until the iterate stays admissible and the residual
/// decreases. Once the residual is below `tol` a few extra steps polish the
/// root to machine precision.
pub(crate) fn newton(
    map: &HoloMap,
    r: f64,
    w: Cx,
    z0: Cx,
    admissible: &dyn Fn(Cx) -> bool,
    tol: f64,
    max_iter: usize,
    trace: &mut Vec<f64>,
) -> Result<(Cx, f64, usize)> {
    let mut z = z0;
    let mut res = residual_fn(map, r, w, z).norm();
    if !res.is_finite() {
        return Err(Error::Evaluation { point: z });
    }
    let mut iters = 0;
    let mut polish = 0;
    loop {
        if res <= tol {
            if polish >= 4 || res == 0.0 {
                return Ok((z, res, iters));
            }
            polish += 1;
        } else if iters >= max_iter {
            return Err(Error::NonConvergence {
                residual: res,
                iterations: iters,
                trace: trace.clone(),
            });
        }
        let g = residual_fn(map, r, w, z);
        let gp = Cx::new(1.0, 0.0) + map.derivative(z)? * r;
        if gp.norm() < 1e-300 {
            return Err(Error::DerivativeSingular { point: z });
        }
        let dz = -g / gp;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = z + dz * lambda;
            if admissible(cand) {
                let cres = residual_fn(map, r, w, cand).norm();
                if cres < res {
                    accepted = Some((cand, cres));
                    break;
                }
            }
            lambda *= 0.5;
        }
        iters += 1;
        match accepted {
            Some((cand, cres)) => {
                z = cand;
                res = cres;
                trace.push(res);
            }
            None if res <= tol => return Ok((z, res, iters)),
            None => {
                return Err(Error::NonConvergence {
                    residual: res,
                    iterations: iters,
                    trace: trace.clone(),
                })
            }
        }
    }
}

/// Continuation in `r` from `J_0 = id` with a tangent predictor
/// `dz/dr = -f(z) / (1 + r f'(z))` and a damped Newton corrector. Steps grow
/// geometrically on success and are halved on failure.
pub(crate) fn continuation(
    map: &HoloMap,
    r: f64,
    w: Cx,
    admissible: &dyn Fn(Cx) -> bool,
    opts: &SolveOptions,
) -> Result<ResolventSolve> {
    let mut trace = Vec::new();
    let mut z = w;
    let mut r_cur = 0.0;
    let mut step = r;
    let mut accepted = 0;
    let mut rejected = 0;
    let mut iterations = 0;
    while r_cur != r {
        if accepted >= opts.max_continuation_steps || rejected > 200 {
            return Err(Error::NonConvergence {
                residual: residual_fn(map, r, w, z).norm(),
                iterations,
                trace,
            });
        }
        let remaining = r - r_cur;
        let h = if remaining.abs() <= step.abs() { remaining } else { step };
        let r_next = if h == remaining { r } else { r_cur + h };
        let denom = Cx::new(1.0, 0.0) + map.derivative(z)? * r_cur;
        let tangent = -map.eval(z) / denom;
        let mut guess = z + tangent * h;
        if !(guess.re.is_finite() && guess.im.is_finite()) || !admissible(guess) {
            guess = z;
        }
        let final_step = r_next == r;
        let max_iter = if final_step { opts.max_damped_steps } else { 12 };
        match newton(map, r_next, w, guess, admissible, opts.tol, max_iter, &mut trace) {
            Ok((zn, _, it)) => {
                iterations += it;
                z = zn;
                r_cur = r_next;
                accepted += 1;
                step = h * 2.0;
            }
            Err(e) => {
                rejected += 1;
                step = h * 0.5;
                if step.abs() < 1e-14 * r.abs().max(1.0) {
                    return Err(e);
                }
            }
        }
    }
    let residual = residual_fn(map, r, w, z).norm();
    Ok(ResolventSolve {
        z,
        residual,
        iterations,
        continuation_steps: accepted,
        certificate: Certificate::Skipped,
        trace,
    })
}

/// Solves `z + r f(z) = w` for `z = J_r(w)`.
pub fn solve(gen: &GeneratorSpec, r: f64, w: Cx) -> Result<ResolventSolve> {
    solve_with(gen, r, w, &SolveOptions::default())
}

pub fn solve_with(gen: &GeneratorSpec, r: f64, w: Cx, opts: &SolveOptions) -> Result<ResolventSolve> {
    check_disk(w, "resolvent argument must satisfy |w| < 1")?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Contract(format!(
            "resolvent parameter must be finite and non-negative, got {r}"
        )));
    }
    if !(gen.flags.in_g || gen.flags.in_n) {
        return Err(Error::Contract(format!("{} is not a certified generator", gen.label())));
    }
    let mut sol = if r == 0.0 {
        ResolventSolve {
            z: w,
            residual: 0.0,
            iterations: 0,
            continuation_steps: 0,
            certificate: Certificate::Skipped,
            trace: Vec::new(),
        }
    } else {
        continuation(&gen.map, r, w, &in_disk, opts)?
    };
    if sol.residual >= opts.tol {
        return Err(Error::NonConvergence {
            residual: sol.residual,
            iterations: sol.iterations,
            trace: sol.trace,
        });
    }
    if opts.certify {
        sol.certificate = auto_certificate(gen, r, w)?;
    }
    Ok(sol)
}

fn auto_certificate(gen: &GeneratorSpec, r: f64, w: Cx) -> Result<Certificate> {
    let lo = (0.99f64).max(w.norm() + 0.001);
    if lo >= 1.0 {
        return Ok(Certificate::Skipped);
    }
    let mut last = None;
    for frac in [0.5, 0.25, 0.75, 0.1, 0.9] {
        let t = lo + (1.0 - lo) * frac;
        match certify_uniqueness(gen, r, w, t) {
            Ok(n) => return Ok(Certificate::Winding(n)),
            Err(e @ Error::ContourTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one contour tried"))
}

/// Number of contour nodes used by [`certify_uniqueness`].
pub const WINDING_NODES: usize = 4096;

/// Winding number of `g(z) = z + r f(z) - w` about 0 along `|z| = t`, i.e.
/// the number of solutions in `|z| < t`, from the trapezoidal rule applied
/// to `(1/2 pi i) \oint g'/g dz`.
pub fn certify_uniqueness(gen: &GeneratorSpec, r: f64, w: Cx, t: f64) -> Result<i64> {
    check_disk(w, "resolvent argument must satisfy |w| < 1")?;
    let lo = (0.99f64).max(w.norm() + 0.001);
    if !(t >= lo && t < 1.0) {
        return Err(Error::Contract(format!("contour radius {t} outside [{lo}, 1)")));
    }
    winding_number(&gen.map, r, w, t)
}

pub(crate) fn winding_number(map: &HoloMap, r: f64, w: Cx, t: f64) -> Result<i64> {
    let n = WINDING_NODES;
    let mut acc = Cx::new(0.0, 0.0);
    let mut min_mod = f64::INFINITY;
    for k in 0..n {
        let z = Cx::from_polar(t, 2.0 * PI * k as f64 / n as f64);
        let g = residual_fn(map, r, w, z);
        min_mod = min_mod.min(g.norm());
        let gp = Cx::new(1.0, 0.0) + map.derivative(z)? * r;
        acc += z * gp / g;
    }
    if min_mod < 1e-8 {
        return Err(Error::ContourTooClose {
            radius: t,
            min_modulus: min_mod,
        });
    }
    let wind = acc / n as f64;
    if !wind.re.is_finite() {
        return Err(Error::Evaluation { point: Cx::new(t, 0.0) });
    }
    Ok(wind.re.round() as i64)
}

/// `J_r'(w) = 1 / (1 + r f'(J_r(w)))`.
pub fn derivative(gen: &GeneratorSpec, r: f64, w: Cx) -> Result<Cx> {
    let z = solve(gen, r, w)?.z;
    derivative_at(&gen.map, r, z)
}

/// Resolvent derivative given the already solved point `z = J_r(w)`.
pub fn derivative_at(map: &HoloMap, r: f64, z: Cx) -> Result<Cx> {
    let denom = Cx::new(1.0, 0.0) + map.derivative(z)? * r;
    if denom.norm() < 1e-12 {
        return Err(Error::DerivativeSingular { point: z });
    }
    Ok(Cx::new(1.0, 0.0) / denom)
}

/// `J_r` packaged as a map (value via [`solve`], derivative in closed form).
/// Points where the solver fails evaluate to NaN.
pub fn resolvent_map(gen: &GeneratorSpec, r: f64) -> HoloMap {
    let (ge, gd) = (gen.clone(), gen.clone());
    let nan = Cx::new(f64::NAN, f64::NAN);
    HoloMap::with_derivative(
        format!("J_{r}[{}]", gen.label()),
        move |w| solve(&ge, r, w).map(|s| s.z).unwrap_or(nan),
        move |w| {
            solve(&gd, r, w)
                .and_then(|s| derivative_at(&gd.map, r, s.z))
                .unwrap_or(nan)
        },
    )
}

const BRANCH_STEPS: usize = 256;

/// Square root of `disc(r)` continued along `[0, r]` from `s0 = sqrt(disc(0))`.
fn tracked_sqrt(disc: impl Fn(f64) -> Cx, s0: Cx, r: f64) -> Result<Cx> {
    let mut s = s0;
    for k in 1..=BRANCH_STEPS {
        let rk = r * k as f64 / BRANCH_STEPS as f64;
        let c = disc(rk).sqrt();
        let (near, far) = ((c - s).norm(), (c + s).norm());
        // a root passing through zero mid-path leaves the branch undetermined
        if k < BRANCH_STEPS && c.norm() < 1e-12 && s.norm() > 1e-12 {
            return Err(Error::BranchTracking { r: rk });
        }
        s = if near <= far { c } else { -c };
    }
    Ok(s)
}

/// Root of `z^2 - b z + w = 0` selected by `s`, computed without cancellation.
fn small_root(b: Cx, s: Cx, w: Cx) -> Cx {
    let plus = b + s;
    let minus = b - s;
    if plus.norm() >= minus.norm() {
        2.0 * w / plus
    } else {
        minus / 2.0
    }
}

/// Closed-form resolvent of `f(z) = z/(1-z)`: the root of
/// `z^2 - (1 + r + w) z + w = 0` continuous in `r` from `z = w` at `r = 0`.
pub fn closed_form_ex1(r: f64, w: Cx) -> Result<Cx> {
    check_disk(w, "resolvent argument must satisfy |w| < 1")?;
    let one = Cx::new(1.0, 0.0);
    let disc = |r: f64| {
        let b = one * (1.0 + r) + w;
        b * b - 4.0 * w
    };
    let s = tracked_sqrt(disc, one - w, r)?;
    Ok(small_root(one * (1.0 + r) + w, s, w))
}

/// Closed-form resolvent of `f(z) = z(1-z)`:
/// `(r + 1 - sqrt((r+1)^2 - 4 r w)) / (2 r)`, with value `w` at `r = 0` and
/// the square root continued from `r = 0`. Defined for negative `r` as well.
pub fn closed_form_ex2(r: f64, w: Cx) -> Result<Cx> {
    if r == 0.0 {
        return Ok(w);
    }
    let disc = |r: f64| Cx::new((r + 1.0) * (r + 1.0), 0.0) - 4.0 * r * w;
    let s = tracked_sqrt(disc, Cx::new(1.0, 0.0), r)?;
    // r z^2 - (r + 1) z + w = 0, i.e. z^2 - b z + w/r = 0 with b = (r + 1)/r
    let b = Cx::new(r + 1.0, 0.0);
    let plus = b + s;
    let minus = b - s;
    Ok(if plus.norm() >= minus.norm() {
        2.0 * w / plus
    } else {
        minus / (2.0 * r)
    })
}
