//! Curve data for the two reference figures and the geometric assertions
//! used to check emitted curves: the nested images `J_r(D)` of
//! `f(z) = z(1 - z)` for `r = 0.6, 1, 1.1`, and the invariant domain
//! `{|z - 1/2| < 1/2}` with its image under `J_{-1}`.

use serde::Serialize;

use crate::boundary::{bfid_region_check, Bfid};
use crate::error::Result;
use crate::generators::Builtin;
use crate::geometry::{region_boundary, RegionBoundary};
use crate::holo::Cx;

pub const FIGURE1_RADII: [f64; 3] = [0.6, 1.0, 1.1];
pub const FIGURE1_MARGIN: f64 = 1e-6;
pub const FIGURE_POINTS: usize = 512;
pub const FIGURE2_R: f64 = -1.0;

/// A named curve to be drawn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub param: f64,
    pub points: Vec<Cx>,
}

pub fn figure1() -> Result<Vec<RegionBoundary>> {
    let g = Builtin::Ex2.spec();
    FIGURE1_RADII
        .iter()
        .map(|&r| region_boundary(&g, r, FIGURE_POINTS, FIGURE1_MARGIN))
        .collect()
}

/// Returns `(omega_boundary, image_boundary)`.
pub fn figure2() -> Result<(Curve, Curve)> {
    let c = bfid_region_check(&Builtin::Ex2.spec(), FIGURE2_R, 1000)?;
    Ok((
        Curve {
            name: "omega".into(),
            param: FIGURE2_R,
            points: c.omega_boundary,
        },
        Curve {
            name: "image".into(),
            param: FIGURE2_R,
            points: c.image_boundary,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureCheck {
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl FigureCheck {
    fn from(assertions: Vec<Assertion>) -> Self {
        let pass = !assertions.is_empty() && assertions.iter().all(|a| a.pass);
        Self { assertions, pass }
    }
}

fn assertion(name: String, value: f64, pass: bool) -> Assertion {
    Assertion { name, value, pass }
}

/// Winding number of a closed polyline around `z`.
pub fn winding(poly: &[Cx], z: Cx) -> i64 {
    let n = poly.len();
    let total: f64 = (0..n).map(|k| ((poly[(k + 1) % n] - z) / (poly[k] - z)).arg()).sum();
    (total / std::f64::consts::TAU).round() as i64
}

fn distance_to(poly: &[Cx], p: Cx) -> f64 {
    poly.iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min)
}

/// Geometric checks of the first figure on curves `(r, points)` drawn at
/// boundary margin `eps`:
/// - every curve lies in the unit disk and winds once around 0;
/// - curves with `r <= 1` come within `2 sqrt(eps)` of the point 1;
/// - curves with `r > 1` stay at distance `1 - 1/r` (within `1e-3`) from 1;
/// - each curve lies inside every curve with smaller `r`.
pub fn assess_figure1(curves: &[(f64, Vec<Cx>)], eps: f64) -> FigureCheck {
    let one = Cx::new(1.0, 0.0);
    let mut out = Vec::new();
    for (r, pts) in curves {
        let max_mod = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
        out.push(assertion(format!("r={r}: inside unit disk"), max_mod, max_mod < 1.0));
        let w = if pts.len() >= 3 { winding(pts, Cx::new(0.0, 0.0)) } else { 0 };
        out.push(assertion(format!("r={r}: winds once around 0"), w as f64, w == 1));
        let d = distance_to(pts, one);
        if *r <= 1.0 {
            out.push(assertion(format!("r={r}: reaches 1"), d, d <= 2.0 * eps.sqrt()));
        } else {
            let expect = 1.0 - 1.0 / r;
            out.push(assertion(format!("r={r}: distance to 1 is 1-1/r"), d, (d - expect).abs() <= 1e-3));
        }
    }
    for (ri, inner) in curves {
        for (so, outer) in curves {
            if so < ri {
                let escaped = inner.iter().filter(|&&z| winding(outer, z) != 1).count();
                out.push(assertion(
                    format!("r={ri} inside r={so}"),
                    escaped as f64,
                    escaped == 0,
                ));
            }
        }
    }
    FigureCheck::from(out)
}

/// Geometric checks of the second figure: the domain boundary is the circle
/// `|z - 1/2| = 1/2`, the image curve lies in its closure and passes
/// through the fixed point 0.
pub fn assess_figure2(omega: &[Cx], image: &[Cx]) -> FigureCheck {
    let dom = Bfid::EX2;
    let circle_err = omega.iter().map(|z| dom.excess(*z).abs()).fold(0.0, f64::max);
    let image_excess = image.iter().map(|z| dom.excess(*z)).fold(f64::NEG_INFINITY, f64::max);
    let origin = distance_to(image, Cx::new(0.0, 0.0));
    let enclosed = winding(image, Cx::new(0.5, 0.0));
    FigureCheck::from(vec![
        assertion("domain boundary on |z-1/2|=1/2".into(), circle_err, !omega.is_empty() && circle_err < 1e-12),
        assertion("image inside closed domain".into(), image_excess, !image.is_empty() && image_excess <= 1e-12),
        assertion("image passes near 0".into(), origin, origin < 1e-3),
        assertion("image winds around 1/2".into(), enclosed as f64, enclosed == 1),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_structure() {
        let curves: Vec<(f64, Vec<Cx>)> = figure1().unwrap().into_iter().map(|b| (b.r, b.points)).collect();
        assert_eq!(curves.len(), 3);
        assert!(curves.iter().all(|c| c.1.len() == FIGURE_POINTS));
        let check = assess_figure1(&curves, FIGURE1_MARGIN);
        assert!(check.pass, "{check:#?}");
    }

    #[test]
    fn figure1_detects_swapped_order() {
        let mut curves: Vec<(f64, Vec<Cx>)> = figure1().unwrap().into_iter().map(|b| (b.r, b.points)).collect();
        curves[0].0 = 1.2;
        assert!(!assess_figure1(&curves, FIGURE1_MARGIN).pass);
    }

    #[test]
    fn figure2_structure() {
        let (omega, image) = figure2().unwrap();
        let check = assess_figure2(&omega.points, &image.points);
        assert!(check.pass, "{check:#?}");
        // the domain itself is not strictly inside
        let grown: Vec<Cx> = omega.points.iter().map(|z| (z - 0.5) * 1.01 + 0.5).collect();
        assert!(!assess_figure2(&omega.points, &grown).pass);
    }
}
