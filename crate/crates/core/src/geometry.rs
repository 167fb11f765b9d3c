//! Grid verification of the geometry of `J_r`: positivity of `Re J_r'`,
//! starlikeness of order 1/2, the Marx–Strohhäcker bound, nesting of the
//! images `J_r(D)`, their boundary curves and randomized hyperbolic
//! convexity.
//!
//! Membership in `J_r(D)` is always decided by the implicit test
//! `|z + r f(z)| < 1`, never by inverting `J_r`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::holo::{hyperbolic_geodesic, Cx, DiskGrid};
use crate::resolvent::{self, derivative_at, SolveOptions};

/// Outcome of one sampled property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub grid: String,
    pub samples: usize,
    /// Points where the solver failed and which were left out.
    pub excluded: usize,
    pub worst_value: f64,
    pub worst_point: Cx,
    pub tolerance: f64,
    pub pass: bool,
    pub details: BTreeMap<String, f64>,
}

impl PropertyReport {
    pub(crate) fn new(property: impl Into<String>, grid: impl Into<String>) -> Self {
        Self {
            property: property.into(),
            grid: grid.into(),
            samples: 0,
            excluded: 0,
            worst_value: f64::NAN,
            worst_point: Cx::new(0.0, 0.0),
            tolerance: 0.0,
            pass: false,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }
}

pub(crate) fn describe_grid(grid: &DiskGrid) -> String {
    format!(
        "{} rings x {} angles, margin {:e}{}",
        grid.radii.len(),
        grid.angles_per_ring,
        grid.margin,
        if grid.include_origin { ", origin" } else { "" }
    )
}

/// One solved grid point: `w`, `z = J_r(w)` and `J_r'(w)`.
#[derive(Debug, Clone, Copy)]
pub struct Solved {
    pub w: Cx,
    pub z: Cx,
    pub dj: Cx,
}

/// Solves the resolvent equation at every grid point.
pub fn scan_resolvent(gen: &GeneratorSpec, r: f64, grid: &DiskGrid) -> (Vec<Solved>, usize) {
    let results: Vec<Option<Solved>> = grid
        .points()
        .into_par_iter()
        .map(|w| {
            let z = resolvent::solve(gen, r, w).ok()?.z;
            let dj = derivative_at(&gen.map, r, z).ok()?;
            Some(Solved { w, z, dj })
        })
        .collect();
    let excluded = results.iter().filter(|s| s.is_none()).count();
    (results.into_iter().flatten().collect(), excluded)
}

fn minimum(values: impl Iterator<Item = (f64, Cx)>) -> (f64, Cx) {
    values.fold((f64::INFINITY, Cx::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a })
}

fn require_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("resolvent parameter must be non-negative, got {r}")))
    }
}

/// `min Re J_r'(w)` over the grid; passes iff positive.
pub fn check_nw(gen: &GeneratorSpec, r: f64) -> Result<PropertyReport> {
    check_nw_on(gen, r, &DiskGrid::standard())
}

pub fn check_nw_on(gen: &GeneratorSpec, r: f64, grid: &DiskGrid) -> Result<PropertyReport> {
    gen.require_n("Noshiro-Warschawski check")?;
    require_r(r)?;
    let (pts, excluded) = scan_resolvent(gen, r, grid);
    let (worst, at) = minimum(pts.iter().map(|s| (s.dj.re, s.w)));
    let mut rep = PropertyReport::new("min Re J_r'(w)", describe_grid(grid));
    rep.samples = pts.len();
    rep.excluded = excluded;
    rep.worst_value = worst;
    rep.worst_point = at;
    rep.pass = worst > 0.0 && excluded == 0;
    rep.details.insert("r".into(), r);
    Ok(rep)
}

/// `min Re[w J_r'(w) / J_r(w)]` over the grid (1 at the origin); passes iff
/// above `1/2 - 1e-6`. Also records the largest discrepancy with the
/// equivalent form `Re[1 / (1 - w phi'(J_r(w)))]`, `phi(z) = z / (z + r f(z))`.
pub fn check_starlike_half(gen: &GeneratorSpec, r: f64) -> Result<PropertyReport> {
    check_starlike_half_on(gen, r, &DiskGrid::standard())
}

pub fn check_starlike_half_on(gen: &GeneratorSpec, r: f64, grid: &DiskGrid) -> Result<PropertyReport> {
    gen.require_n("starlikeness check")?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Contract(format!("starlikeness check needs r > 0, got {r}")));
    }
    let (pts, excluded) = scan_resolvent(gen, r, grid);
    let one = Cx::new(1.0, 0.0);
    let mut discrepancy: f64 = 0.0;
    let mut values = Vec::with_capacity(pts.len());
    for s in &pts {
        if s.w.norm() == 0.0 {
            values.push((1.0, s.w));
            continue;
        }
        let direct = (s.w * s.dj / s.z).re;
        let fz = gen.f(s.z);
        let dfz = gen.df(s.z)?;
        let h = s.z + fz * r;
        let dphi = (fz - s.z * dfz) * r / (h * h);
        let via_phi = (one / (one - s.w * dphi)).re;
        discrepancy = discrepancy.max((direct - via_phi).abs());
        values.push((direct, s.w));
    }
    let (worst, at) = minimum(values.into_iter());
    let mut rep = PropertyReport::new("min Re[w J_r'(w)/J_r(w)]", describe_grid(grid));
    rep.samples = pts.len();
    rep.excluded = excluded;
    rep.worst_value = worst;
    rep.worst_point = at;
    rep.tolerance = 1e-6;
    rep.pass = worst > 0.5 - 1e-6 && excluded == 0;
    rep.details.insert("r".into(), r);
    rep.details.insert("phi_identity_max_discrepancy".into(), discrepancy);
    Ok(rep)
}

/// `min Re[J_r(w)/w] - 1/(2(1 + beta r))` with `beta = f'(0) > 0`; passes iff
/// above `-1e-6`.
pub fn check_marx_strohhacker(gen: &GeneratorSpec, r: f64) -> Result<PropertyReport> {
    check_marx_strohhacker_on(gen, r, &DiskGrid::standard())
}

pub fn check_marx_strohhacker_on(gen: &GeneratorSpec, r: f64, grid: &DiskGrid) -> Result<PropertyReport> {
    gen.require_n("Marx-Strohhacker check")?;
    require_r(r)?;
    let beta = gen.f0deriv;
    if beta.im.abs() > 1e-12 || beta.re <= 0.0 {
        return Err(Error::Contract(format!("f'(0) = {beta} must be real and positive")));
    }
    let bound = 1.0 / (2.0 * (1.0 + beta.re * r));
    let (pts, excluded) = scan_resolvent(gen, r, grid);
    let (worst, at) = minimum(pts.iter().map(|s| {
        let ratio = if s.w.norm() == 0.0 { s.dj.re } else { (s.z / s.w).re };
        (ratio - bound, s.w)
    }));
    let mut rep = PropertyReport::new("min Re[J_r(w)/w] - 1/(2(1+beta r))", describe_grid(grid));
    rep.samples = pts.len();
    rep.excluded = excluded;
    rep.worst_value = worst;
    rep.worst_point = at;
    rep.tolerance = 1e-6;
    rep.pass = worst > -1e-6 && excluded == 0;
    rep.details.insert("r".into(), r);
    rep.details.insert("bound".into(), bound);
    Ok(rep)
}

/// `max |z + s f(z)| - |z + r f(z)|` over the grid for `s <= r`; passes iff
/// at most `1e-12`, which is the nesting `J_r(D) ⊂ J_s(D)`.
pub fn check_inclusion_chain(gen: &GeneratorSpec, s: f64, r: f64) -> Result<PropertyReport> {
    check_inclusion_chain_on(gen, s, r, &DiskGrid::standard())
}

pub fn check_inclusion_chain_on(gen: &GeneratorSpec, s: f64, r: f64, grid: &DiskGrid) -> Result<PropertyReport> {
    if !(0.0 <= s && s <= r) {
        return Err(Error::Contract(format!("inclusion chain needs 0 <= s <= r, got s = {s}, r = {r}")));
    }
    let pts = grid.points();
    let (worst, at) = pts
        .par_iter()
        .map(|&z| {
            let fz = gen.f(z);
            ((z + fz * s).norm() - (z + fz * r).norm(), z)
        })
        .reduce(|| (f64::NEG_INFINITY, Cx::new(0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });
    let mut rep = PropertyReport::new("max |z+s f(z)| - |z+r f(z)|", describe_grid(grid));
    rep.samples = pts.len();
    rep.worst_value = worst;
    rep.worst_point = at;
    rep.tolerance = 1e-12;
    rep.pass = worst <= 1e-12;
    rep.details.insert("s".into(), s);
    rep.details.insert("r".into(), r);
    Ok(rep)
}

/// Discretised boundary of `J_r(D)`: the preimage of `|w| = 1 - margin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub r: f64,
    pub margin: f64,
    pub angles: Vec<f64>,
    pub points: Vec<Cx>,
}

impl RegionBoundary {
    /// Winding number of the closed polyline around `z`.
    pub fn winding_around(&self, z: Cx) -> i64 {
        let n = self.points.len();
        let mut total = 0.0;
        for k in 0..n {
            let a = self.points[k] - z;
            let b = self.points[(k + 1) % n] - z;
            total += (b / a).arg();
        }
        (total / (2.0 * PI)).round() as i64
    }

    pub fn encloses(&self, z: Cx) -> bool {
        self.winding_around(z) != 0
    }
}

/// Boundary of `J_r(D)` traced by continuation in the angle of
/// `w = (1 - margin) e^{i theta}`, refining each point by Newton's method.
pub fn region_boundary(gen: &GeneratorSpec, r: f64, n_points: usize, margin: f64) -> Result<RegionBoundary> {
    require_r(r)?;
    if n_points < 64 {
        return Err(Error::Contract(format!("need at least 64 boundary points, got {n_points}")));
    }
    if !(1e-6..=1e-2).contains(&margin) {
        return Err(Error::Contract(format!("boundary margin {margin} outside [1e-6, 1e-2]")));
    }
    let radius = 1.0 - margin;
    let admissible = |z: Cx| z.norm() <= 1.0 - resolvent::DISK_GUARD;
    let opts = SolveOptions::default();
    let mut angles = Vec::with_capacity(n_points);
    let mut points = Vec::with_capacity(n_points);
    let mut prev: Option<Cx> = None;
    for k in 0..n_points {
        let theta = 2.0 * PI * k as f64 / n_points as f64;
        let w = Cx::from_polar(radius, theta);
        let mut trace = Vec::new();
        let refined = prev.and_then(|z0| {
            resolvent::newton(&gen.map, r, w, z0, &admissible, opts.tol, 50, &mut trace)
                .ok()
                .map(|(z, _, _)| z)
        });
        let z = match refined {
            Some(z) => z,
            None => resolvent::solve(gen, r, w)
                .map_err(|_| Error::ContinuationBreak { angle: theta })?
                .z,
        };
        let level = (z + gen.f(z) * r).norm();
        if (level - radius).abs() >= 1e-8 {
            return Err(Error::ContinuationBreak { angle: theta });
        }
        angles.push(theta);
        points.push(z);
        prev = Some(z);
    }
    Ok(RegionBoundary {
        r,
        margin,
        angles,
        points,
    })
}

/// A subset of the disk given by a signed membership margin (positive inside).
#[derive(Clone)]
pub struct Region {
    pub label: String,
    margin: Arc<dyn Fn(Cx) -> f64 + Send + Sync>,
}

impl Region {
    pub fn new(label: impl Into<String>, margin: impl Fn(Cx) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            margin: Arc::new(margin),
        }
    }

    /// `{z in D : |z + r f(z)| < 1 - eps}`, i.e. `J_r` of the disk of radius `1 - eps`.
    pub fn resolvent_image(gen: &GeneratorSpec, r: f64, eps: f64) -> Self {
        let g = gen.clone();
        Self::new(format!("J_{r}(D) for {}", gen.label()), move |z| {
            if z.norm() >= 1.0 {
                return -1.0;
            }
            let v = (1.0 - eps) - (z + g.f(z) * r).norm();
            if v.is_nan() {
                -1.0
            } else {
                v
            }
        })
    }

    #[inline]
    pub fn margin(&self, z: Cx) -> f64 {
        (self.margin)(z)
    }

    pub fn contains(&self, z: Cx) -> bool {
        self.margin(z) > 0.0
    }
}

/// Samples along each geodesic in the convexity test.
pub const GEODESIC_SAMPLES: usize = 32;
/// Allowed negative membership margin on geodesic samples.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Randomized hyperbolic convexity test: draws `pairs` point pairs inside
/// the region and checks that the hyperbolic geodesic between them stays
/// inside up to [`CONVEXITY_TOL`].
pub fn check_hyperbolic_convexity(region: &Region, pairs: usize, seed: u64) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Result<Cx> {
        for _ in 0..100_000 {
            let rho = rng.gen::<f64>().sqrt();
            let z = Cx::from_polar(rho, rng.gen::<f64>() * 2.0 * PI);
            if z.norm() < 1.0 && region.contains(z) {
                return Ok(z);
            }
        }
        Err(Error::DegenerateRegion)
    };
    let mut endpoints = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        endpoints.push((draw()?, draw()?));
    }
    let outcomes: Vec<(f64, Cx)> = endpoints
        .par_iter()
        .map(|&(a, b)| -> Result<(f64, Cx)> {
            let path = hyperbolic_geodesic(a, b, GEODESIC_SAMPLES)?;
            Ok(minimum(path.into_iter().map(|z| (region.margin(z), z))))
        })
        .collect::<Result<_>>()?;
    let violations = outcomes.iter().filter(|o| o.0 < -CONVEXITY_TOL).count();
    let (worst, at) = minimum(outcomes.into_iter());
    let mut rep = PropertyReport::new(
        format!("hyperbolic convexity of {}", region.label),
        format!("{pairs} random pairs x {GEODESIC_SAMPLES} geodesic samples, seed {seed}"),
    );
    rep.samples = pairs * GEODESIC_SAMPLES;
    rep.worst_value = worst;
    rep.worst_point = at;
    rep.tolerance = CONVEXITY_TOL;
    rep.pass = violations == 0;
    rep.details.insert("violations".into(), violations as f64);
    Ok(rep)
}
