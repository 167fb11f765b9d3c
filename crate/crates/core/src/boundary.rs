//! Angular limits and derivatives at boundary points, classification of
//! boundary regular fixed points of `J_r`, and resolvents with negative
//! parameter on the backward flow invariant domain `{|z - 1/2| < 1/2}` of
//! `f(z) = z(1 - z)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{Builtin, GeneratorSpec};
use crate::geometry::PropertyReport;
use crate::holo::{Cx, HoloMap};
use crate::resolvent::{self, derivative_at, resolvent_map, SolveOptions};

/// Radial refinement depth: points `(1 - 2^-k) zeta` for `k = 3..=depth`.
pub const DEFAULT_DEPTH: u32 = 32;
/// Agreement required between successive extrapolants.
pub const CAUCHY_TOL: f64 = 1e-6;
/// Difference quotients above this, and still growing, count as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;

const NEVILLE_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Angular {
    Finite(Cx),
    Divergent,
}

impl Angular {
    pub fn finite(self) -> Option<Cx> {
        match self {
            Angular::Finite(v) => Some(v),
            Angular::Divergent => None,
        }
    }
}

fn check_boundary(zeta: Cx, depth: u32) -> Result<()> {
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain {
            point: zeta,
            what: "boundary point must satisfy |zeta| = 1",
        });
    }
    if !(4..=50).contains(&depth) {
        return Err(Error::Contract(format!("depth must lie in 4..=50, got {depth}")));
    }
    Ok(())
}

/// `(h_k, z_k)` with `h_k = 2^-k` and `z_k = (1 - h_k) zeta`.
fn radial_nodes(zeta: Cx, depth: u32) -> Vec<(f64, Cx)> {
    (3..=depth)
        .map(|k| {
            let h = 0.5f64.powi(k as i32);
            (h, zeta * (1.0 - h))
        })
        .collect()
}

/// Evaluates `g` along the nodes, stopping at the first failure.
fn sample(nodes: &[(f64, Cx)], g: impl Fn(f64, Cx) -> Result<Cx>) -> Result<Vec<(f64, Cx)>> {
    let mut out = Vec::with_capacity(nodes.len());
    for &(h, z) in nodes {
        match g(h, z) {
            Ok(v) => out.push((h, v)),
            Err(e) if out.len() < NEVILLE_ORDER => return Err(e),
            Err(_) => break,
        }
    }
    Ok(out)
}

/// Value at 0 of the interpolating polynomial through `(x_i, y_i)`.
fn neville_at_zero(xs: &[f64], ys: &[Cx]) -> Cx {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (p[i + 1] * xs[i] - p[i] * xs[i + m]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// Richardson extrapolation to `x = 0` over sliding windows. Returns the
/// extrapolant where two consecutive differences are smallest, if they are
/// within `tol(E)`.
fn extrapolate(xs: &[f64], ys: &[Cx], tol: impl Fn(Cx) -> f64) -> Option<Cx> {
    if xs.len() < NEVILLE_ORDER + 2 {
        return None;
    }
    let ext: Vec<Cx> = (0..=xs.len() - NEVILLE_ORDER)
        .map(|i| neville_at_zero(&xs[i..i + NEVILLE_ORDER], &ys[i..i + NEVILLE_ORDER]))
        .collect();
    let mut best: Option<(f64, Cx)> = None;
    for j in 2..ext.len() {
        let d = (ext[j] - ext[j - 1]).norm().max((ext[j - 1] - ext[j - 2]).norm());
        if d.is_finite() && best.is_none_or(|b| d < b.0) {
            best = Some((d, ext[j]));
        }
    }
    best.filter(|&(d, e)| d <= tol(e)).map(|(_, e)| e)
}

/// Extrapolates in `h`, then in `sqrt(h)` to catch square-root branch points.
fn extrapolate_radial(data: &[(f64, Cx)], tol: impl Fn(Cx) -> f64 + Copy) -> Option<Cx> {
    let ys: Vec<Cx> = data.iter().map(|d| d.1).collect();
    let hs: Vec<f64> = data.iter().map(|d| d.0).collect();
    extrapolate(&hs, &ys, tol).or_else(|| {
        let ss: Vec<f64> = hs.iter().map(|h| h.sqrt()).collect();
        extrapolate(&ss, &ys, tol)
    })
}

/// Radial limit of `map` at `zeta` by Richardson extrapolation.
pub fn angular_limit(map: &HoloMap, zeta: Cx, depth: u32) -> Result<Angular> {
    check_boundary(zeta, depth)?;
    let data = sample(&radial_nodes(zeta, depth), |_, z| map.try_eval(z))?;
    Ok(match extrapolate_radial(&data, |_| CAUCHY_TOL) {
        Some(v) => Angular::Finite(v),
        None => Angular::Divergent,
    })
}

/// Radial limit of `(map(z) - target) / (z - zeta)`.
pub fn angular_derivative(map: &HoloMap, zeta: Cx, target: Cx, depth: u32) -> Result<Angular> {
    check_boundary(zeta, depth)?;
    let data = sample(&radial_nodes(zeta, depth), |_, z| {
        Ok((map.try_eval(z)? - target) / (z - zeta))
    })?;
    let mags: Vec<f64> = data.iter().map(|d| d.1.norm()).collect();
    let tail = &mags[mags.len().saturating_sub(4)..];
    if tail.len() == 4 && tail.windows(2).all(|p| p[1] > p[0]) && tail[3] > DIVERGENCE_THRESHOLD {
        return Ok(Angular::Divergent);
    }
    Ok(
        match extrapolate_radial(&data, |e| CAUCHY_TOL * e.norm().max(1.0)) {
            Some(v) => Angular::Finite(v),
            None => Angular::Divergent,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPointAnalysis {
    pub zeta: Cx,
    pub f_angular_value: Angular,
    pub f_angular_deriv: Angular,
    pub is_brnp: bool,
    /// `1/|f'(zeta)|` at a boundary regular null point with `Re f'(zeta) < 0`.
    pub r_threshold: Option<f64>,
}

/// Angular value and derivative of a generator at `zeta`.
pub fn analyze_generator_point(map: &HoloMap, zeta: Cx, depth: u32) -> Result<BoundaryPointAnalysis> {
    let value = angular_limit(map, zeta, depth)?;
    let null = matches!(value, Angular::Finite(v) if v.norm() < 1e-6);
    let deriv = match value {
        Angular::Finite(v) => angular_derivative(map, zeta, if null { Cx::new(0.0, 0.0) } else { v }, depth)?,
        Angular::Divergent => Angular::Divergent,
    };
    let is_brnp = null && deriv.finite().is_some();
    let r_threshold = match deriv {
        Angular::Finite(d) if is_brnp && d.re < 0.0 => Some(1.0 / d.norm()),
        _ => None,
    };
    Ok(BoundaryPointAnalysis {
        zeta,
        f_angular_value: value,
        f_angular_deriv: deriv,
        is_brnp,
        r_threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrfpClassification {
    pub zeta: Cx,
    pub r: f64,
    pub generator: BoundaryPointAnalysis,
    pub predicted: bool,
    /// `1 / (1 + r f'(zeta))` when `f'(zeta)` is finite.
    pub predicted_deriv: Option<Cx>,
    pub observed: bool,
    pub observed_limit: Angular,
    pub observed_deriv: Angular,
    /// `r |f'(zeta)|` within `1e-3` of 1, where the fixed point stops being regular.
    pub inconclusive: bool,
    pub agree: bool,
}

/// Predicts from `f` whether `zeta` is a boundary regular fixed point of
/// `J_r` and compares with the angular behaviour of the computed `J_r`.
pub fn classify_brfp(gen: &GeneratorSpec, r: f64, zeta: Cx) -> Result<BrfpClassification> {
    gen.require_n("boundary fixed point classification")?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Contract(format!("classification needs r > 0, got {r}")));
    }
    let generator = analyze_generator_point(&gen.map, zeta, DEFAULT_DEPTH)?;
    let fd = generator.f_angular_deriv.finite();
    let predicted = generator.is_brnp && fd.is_some_and(|d| r * d.norm() < 1.0);
    let predicted_deriv = fd.map(|d| Cx::new(1.0, 0.0) / (Cx::new(1.0, 0.0) + d * r));
    let inconclusive = generator.is_brnp && fd.is_some_and(|d| (r * d.norm() - 1.0).abs() < 1e-3);

    let jr = resolvent_map(gen, r);
    let observed_limit = angular_limit(&jr, zeta, DEFAULT_DEPTH)?;
    let fixed = matches!(observed_limit, Angular::Finite(v) if (v - zeta).norm() < 1e-6);
    let observed_deriv = if fixed {
        angular_derivative(&jr, zeta, zeta, DEFAULT_DEPTH)?
    } else {
        Angular::Divergent
    };
    let observed = fixed && observed_deriv.finite().is_some();
    let agree = observed == predicted
        && match (predicted, predicted_deriv, observed_deriv) {
            (true, Some(p), Angular::Finite(o)) => (o - p).norm() <= 1e-3 * p.norm(),
            (true, _, _) => false,
            (false, _, _) => true,
        };
    Ok(BrfpClassification {
        zeta,
        r,
        generator,
        predicted,
        predicted_deriv,
        observed,
        observed_limit,
        observed_deriv,
        inconclusive,
        agree,
    })
}

/// The disk `{|z - 1/2| < 1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bfid {
    pub center: Cx,
    pub radius: f64,
}

impl Bfid {
    pub const EX2: Bfid = Bfid {
        center: Cx::new(0.5, 0.0),
        radius: 0.5,
    };

    /// `|z - c| - radius`, negative inside.
    pub fn excess(&self, z: Cx) -> f64 {
        (z - self.center).norm() - self.radius
    }

    pub fn contains(&self, z: Cx) -> bool {
        self.excess(z) < 0.0
    }

    /// Closure, up to rounding.
    pub fn contains_closed(&self, z: Cx) -> bool {
        self.excess(z) <= 1e-12
    }

    pub fn point(&self, rho: f64, theta: f64) -> Cx {
        self.center + Cx::from_polar(rho * self.radius, theta)
    }
}

/// The built-in invariant domain of `gen`, available only for `z(1 - z)`.
pub fn bfid_for(gen: &GeneratorSpec) -> Result<Bfid> {
    let is_ex2 = gen.builtin == Some(Builtin::Ex2)
        || [Cx::new(0.3, 0.1), Cx::new(-0.5, 0.4), Cx::new(0.7, -0.6)]
            .iter()
            .all(|&z| (gen.f(z) - z * (1.0 - z)).norm() < 1e-14);
    if is_ex2 {
        Ok(Bfid::EX2)
    } else {
        Err(Error::Contract(format!(
            "no backward flow invariant domain is known for {}",
            gen.label()
        )))
    }
}

fn require_nonpositive(r: f64) -> Result<()> {
    if r <= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("extension needs r <= 0, got {r}")))
    }
}

/// Solution `z` in the closed domain of `z + r f(z) = w` for `r <= 0`,
/// continued from `z = w` at `r = 0` without leaving the domain.
pub fn bfid_resolvent(gen: &GeneratorSpec, r: f64, w: Cx) -> Result<Cx> {
    let omega = bfid_for(gen)?;
    require_nonpositive(r)?;
    if !omega.contains_closed(w) {
        return Err(Error::Domain {
            point: w,
            what: "argument must lie in the invariant domain |w - 1/2| <= 1/2",
        });
    }
    if r == 0.0 {
        return Ok(w);
    }
    let admissible = |z: Cx| omega.contains_closed(z);
    resolvent::continuation(&gen.map, r, w, &admissible, &SolveOptions::default())
        .map(|s| s.z)
        .map_err(|_| Error::ExtensionUndefined { r })
}

/// `1 / (1 + r f'(z))` at the extended resolvent.
pub fn bfid_derivative(gen: &GeneratorSpec, r: f64, w: Cx) -> Result<Cx> {
    let z = bfid_resolvent(gen, r, w)?;
    derivative_at(&gen.map, r, z)
}

#[derive(Debug, Clone, Serialize)]
pub struct BfidRegionCheck {
    pub report: PropertyReport,
    /// The circle bounding the domain.
    pub omega_boundary: Vec<Cx>,
    /// Image of a circle just inside that boundary.
    pub image_boundary: Vec<Cx>,
}

/// Points on the image boundary curve.
pub const BFID_CURVE_POINTS: usize = 512;
const BFID_RINGS: usize = 25;

/// Maps about `samples` points of the domain through the extended
/// resolvent and checks that the images stay in the closed domain.
pub fn bfid_region_check(gen: &GeneratorSpec, r: f64, samples: usize) -> Result<BfidRegionCheck> {
    let omega = bfid_for(gen)?;
    if !(-1.0..0.0).contains(&r) {
        return Err(Error::Contract(format!("region check needs r in [-1, 0), got {r}")));
    }
    let angles = samples.div_ceil(BFID_RINGS).max(1);
    let mut pts = Vec::with_capacity(BFID_RINGS * angles);
    for j in 0..BFID_RINGS {
        let u = 1.0 - (j + 1) as f64 / BFID_RINGS as f64;
        let rho = (1.0 - u * u).min(1.0 - 1e-9);
        for k in 0..angles {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5 * (j % 2) as f64) / angles as f64;
            pts.push(omega.point(rho, theta));
        }
    }
    let images: Vec<(Cx, Result<Cx>)> = pts.par_iter().map(|&w| (w, bfid_resolvent(gen, r, w))).collect();
    let excluded = images.iter().filter(|i| i.1.is_err()).count();
    let (worst, at) = images
        .iter()
        .filter_map(|(w, z)| z.as_ref().ok().map(|z| (omega.excess(*z), *w)))
        .fold((f64::NEG_INFINITY, Cx::new(0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });

    let circle: Vec<f64> = (0..BFID_CURVE_POINTS)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / BFID_CURVE_POINTS as f64)
        .collect();
    let omega_boundary: Vec<Cx> = circle.iter().map(|&t| omega.point(1.0, t)).collect();
    let image_boundary = circle
        .par_iter()
        .map(|&t| bfid_resolvent(gen, r, omega.point(1.0 - 1e-9, t)))
        .collect::<Result<Vec<_>>>()?;

    let mut report = PropertyReport::new(
        "max |J_r(w) - 1/2| - 1/2 over the invariant domain",
        format!("{BFID_RINGS} rings x {angles} angles in |w - 1/2| < 1/2"),
    );
    report.samples = pts.len() - excluded;
    report.excluded = excluded;
    report.worst_value = worst;
    report.worst_point = at;
    report.tolerance = 1e-12;
    report.pass = excluded == 0 && worst <= 1e-12;
    report.details.insert("r".into(), r);
    Ok(BfidRegionCheck {
        report,
        omega_boundary,
        image_boundary,
    })
}
