//! The Herglotz field `p(w, r) = (1/r)(1 - J_r(w)/w)` of the resolvent
//! family, the checks that make `r -> J_r` an inverse Löwner chain, and
//! quasiconformal sector bounds.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::geometry::{describe_grid, PropertyReport};
use crate::holo::{check_disk, Cx, DiskGrid};
use crate::resolvent::{self, derivative_at};

/// Absolute tolerance of the adaptive Simpson rule.
pub const QUADRATURE_TOL: f64 = 1e-10;
const MAX_QUADRATURE_DEPTH: u32 = 50;

fn require_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("chain parameter must be non-negative, got {r}")))
    }
}

/// `p(w, r)`, evaluated as `f(J_r(w)) / w` (the same quantity, without the
/// cancellation in `1 - J_r(w)/w` for small `r`). At `r = 0` this is
/// `f(w)/w`; at `w = 0` it is `f'(0) / (1 + r f'(0))`.
pub fn herglotz_p(gen: &GeneratorSpec, r: f64, w: Cx) -> Result<Cx> {
    gen.require_n("Herglotz field")?;
    require_r(r)?;
    check_disk(w, "Herglotz field argument must satisfy |w| < 1")?;
    if w.norm() == 0.0 {
        return p_at_origin(gen, r);
    }
    if r == 0.0 {
        return Ok(gen.f(w) / w);
    }
    let z = resolvent::solve(gen, r, w)?.z;
    Ok(gen.f(z) / w)
}

/// `p(0, r) = f'(J_r(0)) J_r'(0)`, with `J_r(0)` and its derivative computed.
fn p_at_origin(gen: &GeneratorSpec, r: f64) -> Result<Cx> {
    let z = resolvent::solve(gen, r, Cx::new(0.0, 0.0))?.z;
    Ok(gen.df(z)? * derivative_at(&gen.map, r, z)?)
}

fn simpson_step(
    g: &dyn Fn(f64) -> Result<Cx>,
    a: f64,
    b: f64,
    fa: Cx,
    fm: Cx,
    fb: Cx,
    whole: Cx,
    tol: f64,
    depth: u32,
) -> Result<Cx> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm)?, g(rm)?);
    let left = (flm * 4.0 + fa + fm) * ((m - a) / 6.0);
    let right = (frm * 4.0 + fm + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { a, b });
    }
    Ok(simpson_step(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson_step(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson quadrature of a complex integrand.
pub fn adaptive_simpson(g: &dyn Fn(f64) -> Result<Cx>, a: f64, b: f64, tol: f64) -> Result<Cx> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (g(a)?, g(m)?, g(b)?);
    let whole = (fm * 4.0 + fa + fb) * ((b - a) / 6.0);
    simpson_step(g, a, b, fa, fm, fb, whole, tol, MAX_QUADRATURE_DEPTH)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceIntegral {
    pub t: f64,
    pub numeric: f64,
    /// `log |1 + T f'(0)|`.
    pub exact: f64,
    pub defect: f64,
}

/// `∫_0^T Re p(0, r) dr` against `log |1 + T f'(0)|`.
pub fn divergence_integral(gen: &GeneratorSpec, t: f64) -> Result<DivergenceIntegral> {
    gen.require_n("divergence integral")?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Contract(format!("horizon must be positive, got {t}")));
    }
    if gen.f0deriv.norm() == 0.0 {
        return Err(Error::Contract("divergence integral needs f'(0) != 0".into()));
    }
    let numeric = adaptive_simpson(&|r| p_at_origin(gen, r), 0.0, t, QUADRATURE_TOL)?.re;
    let exact = (Cx::new(1.0, 0.0) + gen.f0deriv * t).norm().ln();
    Ok(DivergenceIntegral {
        t,
        numeric,
        exact,
        defect: (numeric - exact).abs(),
    })
}

/// `|∂_r J(w, r) + w J'(w, r) p(w, r)|` with a central difference of step `h`.
pub fn pde_residual(gen: &GeneratorSpec, r: f64, w: Cx, h: f64) -> Result<f64> {
    if !(h > 0.0 && r > h && r.is_finite()) {
        return Err(Error::Contract(format!("need r > h > 0, got r = {r}, h = {h}")));
    }
    check_disk(w, "PDE residual argument must satisfy |w| < 1")?;
    let plus = resolvent::solve(gen, r + h, w)?.z;
    let minus = resolvent::solve(gen, r - h, w)?.z;
    let z = resolvent::solve(gen, r, w)?.z;
    let dj = derivative_at(&gen.map, r, z)?;
    let p = herglotz_p(gen, r, w)?;
    Ok(((plus - minus) / (2.0 * h) + w * dj * p).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainDerivative {
    pub t: f64,
    /// `J_T'(0)`.
    pub derivative: Cx,
    /// `exp(-∫_0^T p(0, r) dr)`.
    pub exponential: Cx,
    pub defect: f64,
}

/// Compares `J_T'(0)` with `exp(-∫_0^T p(0, r) dr)`.
pub fn chain_derivative_identity(gen: &GeneratorSpec, t: f64) -> Result<ChainDerivative> {
    gen.require_n("chain derivative identity")?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Contract(format!("horizon must be positive, got {t}")));
    }
    let integral = adaptive_simpson(&|r| p_at_origin(gen, r), 0.0, t, QUADRATURE_TOL)?;
    let derivative = resolvent::derivative(gen, t, Cx::new(0.0, 0.0))?;
    let exponential = (-integral).exp();
    Ok(ChainDerivative {
        t,
        derivative,
        exponential,
        defect: (derivative - exponential).norm(),
    })
}

/// `min Re p(w, r)` over the grid and `r_list`, with the largest defect of
/// `r w p(w, r) + J_r(w) = w` in `details`.
pub fn check_herglotz_positive(gen: &GeneratorSpec, r_list: &[f64], grid: &DiskGrid) -> Result<PropertyReport> {
    gen.require_n("Herglotz field")?;
    for &r in r_list {
        require_r(r)?;
    }
    let pts = grid.points();
    let cases: Vec<(f64, Cx)> = r_list.iter().flat_map(|&r| pts.iter().map(move |&w| (r, w))).collect();
    let results: Vec<Option<(f64, Cx, f64)>> = cases
        .par_iter()
        .map(|&(r, w)| {
            let p = herglotz_p(gen, r, w).ok()?;
            let defect = if r == 0.0 {
                0.0
            } else {
                let z = resolvent::solve(gen, r, w).ok()?.z;
                (w * p * r + z - w).norm()
            };
            Some((p.re, w, defect))
        })
        .collect();
    let excluded = results.iter().filter(|x| x.is_none()).count();
    let ok: Vec<_> = results.into_iter().flatten().collect();
    let (worst, at) = ok
        .iter()
        .map(|x| (x.0, x.1))
        .fold((f64::INFINITY, Cx::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a });
    let max_defect = ok.iter().map(|x| x.2).fold(0.0, f64::max);
    let mut rep = PropertyReport::new("min Re p(w, r)", format!("{} x {} values of r", describe_grid(grid), r_list.len()));
    rep.samples = ok.len();
    rep.excluded = excluded;
    rep.worst_value = worst;
    rep.worst_point = at;
    rep.pass = worst > 0.0 && excluded == 0;
    rep.details.insert("max_definition_defect".into(), max_defect);
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorReport {
    /// `(2/pi)` times the sampled supremum of `|arg f(z)/z|`.
    pub alpha_hat: f64,
    /// `sin(pi alpha_hat / 2)`, or `None` when `alpha_hat >= 1`.
    pub k: Option<f64>,
    /// Sampled supremum of `|arg p(w, r)|` over the grid and the `r` values.
    pub sup_arg_p: f64,
    pub p_sector_ok: bool,
    pub excluded: usize,
}

pub fn sector_report(gen: &GeneratorSpec, r_list: &[f64]) -> Result<SectorReport> {
    sector_report_on(gen, r_list, &DiskGrid::standard())
}

pub fn sector_report_on(gen: &GeneratorSpec, r_list: &[f64], grid: &DiskGrid) -> Result<SectorReport> {
    gen.require_n("sector report")?;
    for &r in r_list {
        require_r(r)?;
    }
    let alpha_hat = 2.0 / PI * gen.sector_hat;
    let k = (alpha_hat < 1.0).then(|| (PI * alpha_hat / 2.0).sin());
    let pts = grid.points();
    let args: Vec<Option<f64>> = r_list
        .iter()
        .flat_map(|&r| pts.iter().map(move |&w| (r, w)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(r, w)| herglotz_p(gen, r, w).ok().map(|p| p.arg().abs()))
        .collect();
    let excluded = args.iter().filter(|a| a.is_none()).count();
    let sup_arg_p = args.into_iter().flatten().fold(0.0, f64::max);
    Ok(SectorReport {
        alpha_hat,
        k,
        sup_arg_p,
        p_sector_ok: excluded == 0 && sup_arg_p <= PI * alpha_hat / 2.0 + 1e-6,
        excluded,
    })
}

/// Checks on a log-radius by angle grid of `samples` points in the sector
/// `S_alpha = {|arg z| < pi alpha / 2}` that `z / (1 + z)` stays in it.
pub fn lens_inclusion_check(alpha: f64, samples: usize) -> Result<PropertyReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Contract(format!("sector opening must lie in (0, 1), got {alpha}")));
    }
    if samples == 0 {
        return Err(Error::Contract("need at least one sample".into()));
    }
    let half = PI * alpha / 2.0;
    let n_rad = ((samples as f64).sqrt().ceil() as usize).max(1);
    let n_ang = samples.div_ceil(n_rad);
    let (lo, hi) = (1e-3f64.ln(), 1e3f64.ln());
    let mut worst = (f64::NEG_INFINITY, Cx::new(0.0, 0.0));
    for i in 0..n_rad {
        let rho = if n_rad == 1 { 1.0 } else { (lo + (hi - lo) * i as f64 / (n_rad - 1) as f64).exp() };
        for j in 0..n_ang {
            let theta = half * (-1.0 + (2 * j + 1) as f64 / n_ang as f64);
            let z = Cx::from_polar(rho, theta);
            let v = (z / (1.0 + z)).arg().abs() - half;
            if v > worst.0 {
                worst = (v, z);
            }
        }
    }
    let mut rep = PropertyReport::new(
        format!("max |arg(z/(1+z))| - pi*{alpha}/2 over the sector"),
        format!("{n_rad} radii in [1e-3, 1e3] x {n_ang} angles"),
    );
    rep.samples = n_rad * n_ang;
    rep.worst_value = worst.0;
    rep.worst_point = worst.1;
    rep.tolerance = 1e-9;
    rep.pass = worst.0 < 1e-9;
    rep.details.insert("alpha".into(), alpha);
    Ok(rep)
}
