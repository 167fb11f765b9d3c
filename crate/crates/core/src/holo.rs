//! Complex-analytic foundation: evaluable holomorphic maps with a
//! derivative channel, sampling grids on the unit disk and the hyperbolic
//! geometry primitives used by the verification checks.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Cx = Complex64;

type CxFn = Arc<dyn Fn(Cx) -> Cx + Send + Sync>;

/// Number of ring nodes used by [`spectral_derivative`].
pub const SPECTRAL_NODES: usize = 32;

/// A holomorphic function on the unit disk.
///
/// The derivative is either supplied in closed form or recovered by the
/// Cauchy-ring rule of [`spectral_derivative`].
#[derive(Clone)]
pub struct HoloMap {
    label: String,
    eval: CxFn,
    deriv: Option<CxFn>,
}

impl HoloMap {
    /// A map with no closed-form derivative.
    pub fn new(label: impl Into<String>, eval: impl Fn(Cx) -> Cx + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            deriv: None,
        }
    }

    pub fn with_derivative(
        label: impl Into<String>,
        eval: impl Fn(Cx) -> Cx + Send + Sync + 'static,
        deriv: impl Fn(Cx) -> Cx + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            deriv: Some(Arc::new(deriv)),
        }
    }

    pub fn identity() -> Self {
        Self::with_derivative("z", |z| z, |_| Cx::new(1.0, 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, z: Cx) -> Cx {
        (self.eval)(z)
    }

    /// Evaluates and rejects non-finite values.
    pub fn try_eval(&self, z: Cx) -> Result<Cx> {
        let v = self.eval(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { point: z })
        }
    }

    pub fn has_closed_form_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// Closed-form derivative when available, spectral otherwise.
    pub fn derivative(&self, z: Cx) -> Result<Cx> {
        match &self.deriv {
            Some(d) => {
                let v = d(z);
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Evaluation { point: z })
                }
            }
            None => spectral_derivative(self, z),
        }
    }
}

impl fmt::Debug for HoloMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloMap")
            .field("label", &self.label)
            .field("closed_form_derivative", &self.deriv.is_some())
            .finish()
    }
}

pub(crate) fn check_disk(z: Cx, what: &'static str) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { point: z, what })
    }
}

/// Derivative of `map` at `z` from the Cauchy integral over a small ring.
///
/// Uses `M = 32` equispaced nodes on the circle of radius
/// `min(1e-3, (1 - |z|)/2)` about `z`. Only `map`'s values are used, so this
/// also serves as an independent check on closed-form derivatives.
pub fn spectral_derivative(map: &HoloMap, z: Cx) -> Result<Cx> {
    check_disk(z, "spectral derivative needs |z| < 1")?;
    let rho = (1e-3f64).min((1.0 - z.norm()) / 2.0);
    let m = SPECTRAL_NODES as f64;
    let mut acc = Cx::new(0.0, 0.0);
    for j in 0..SPECTRAL_NODES {
        let theta = 2.0 * PI * j as f64 / m;
        let e = Cx::from_polar(1.0, theta);
        let v = map.try_eval(z + e * rho)?;
        acc += v * e.conj();
    }
    Ok(acc / (m * rho))
}

/// Sampling grid on the disk: concentric rings plus (optionally) the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    pub angles_per_ring: usize,
    pub margin: f64,
    pub include_origin: bool,
}

impl DiskGrid {
    pub const STANDARD_RINGS: usize = 24;
    pub const STANDARD_ANGLES: usize = 256;
    pub const STANDARD_MARGIN: f64 = 1e-3;

    /// 24 rings from `|z| = 0.1` out to `|z| = 1 - 1e-3`, 256 angles each.
    pub fn standard() -> Self {
        Self::boundary_graded(Self::STANDARD_RINGS, Self::STANDARD_ANGLES, Self::STANDARD_MARGIN)
    }

    /// Rings whose distances to the unit circle form a geometric sequence
    /// from 0.9 down to `margin`, so that sampling concentrates at the boundary.
    pub fn boundary_graded(rings: usize, angles: usize, margin: f64) -> Self {
        assert!(rings >= 1 && angles >= 1, "grid must be non-empty");
        assert!(margin > 0.0 && margin < 0.9, "margin must lie in (0, 0.9)");
        let radii = if rings == 1 {
            vec![1.0 - margin]
        } else {
            let ratio = (margin / 0.9).powf(1.0 / (rings - 1) as f64);
            (0..rings).map(|k| 1.0 - 0.9 * ratio.powi(k as i32)).collect()
        };
        let mut grid = Self {
            radii,
            angles_per_ring: angles,
            margin,
            include_origin: true,
        };
        // pin the outermost ring exactly
        if let Some(last) = grid.radii.last_mut() {
            *last = 1.0 - margin;
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles_per_ring + usize::from(self.include_origin)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points; the origin (if included) comes first. Angles start at 0.
    pub fn points(&self) -> Vec<Cx> {
        let mut pts = Vec::with_capacity(self.len());
        if self.include_origin {
            pts.push(Cx::new(0.0, 0.0));
        }
        let n = self.angles_per_ring as f64;
        for &rho in &self.radii {
            for j in 0..self.angles_per_ring {
                pts.push(Cx::from_polar(rho, 2.0 * PI * j as f64 / n));
            }
        }
        pts
    }
}

/// Disk automorphism sending `a` to 0: `(z - a) / (1 - conj(a) z)`.
#[inline]
pub fn mobius_to_origin(a: Cx, z: Cx) -> Cx {
    (z - a) / (Cx::new(1.0, 0.0) - a.conj() * z)
}

#[inline]
pub fn mobius_from_origin(a: Cx, u: Cx) -> Cx {
    (u + a) / (Cx::new(1.0, 0.0) + a.conj() * u)
}

/// Hyperbolic distance normalised as `artanh |m(z2)|` with `m` the
/// automorphism moving `z1` to the origin.
pub fn hyperbolic_distance(z1: Cx, z2: Cx) -> Result<f64> {
    check_disk(z1, "hyperbolic distance needs |z1| < 1")?;
    check_disk(z2, "hyperbolic distance needs |z2| < 1")?;
    Ok(mobius_to_origin(z1, z2).norm().atanh())
}

/// `n` points along the hyperbolic geodesic from `z1` to `z2`, equally spaced
/// in hyperbolic arc length. Endpoints are returned exactly.
pub fn hyperbolic_geodesic(z1: Cx, z2: Cx, n: usize) -> Result<Vec<Cx>> {
    check_disk(z1, "geodesic endpoint must satisfy |z1| < 1")?;
    check_disk(z2, "geodesic endpoint must satisfy |z2| < 1")?;
    if n < 2 {
        return Err(Error::Contract(format!("geodesic needs at least 2 samples, got {n}")));
    }
    let target = mobius_to_origin(z1, z2);
    let len = target.norm();
    let mut pts = Vec::with_capacity(n);
    pts.push(z1);
    if len > 0.0 {
        let dir = target / len;
        let total = len.atanh();
        for k in 1..n - 1 {
            let s = k as f64 / (n - 1) as f64;
            let u = dir * (s * total).tanh();
            pts.push(mobius_from_origin(z1, u));
        }
    } else {
        pts.extend(std::iter::repeat_n(z1, n - 2));
    }
    pts.push(z2);
    Ok(pts)
}
