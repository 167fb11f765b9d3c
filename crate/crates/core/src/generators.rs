//! Semigroup generators: construction, sampled class certificates
//! (`N`, Noshiro–Warschawski, `G(D)`), squeezing coefficients, starlike
//! order and the sector bounds it implies.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::holo::{Cx, DiskGrid, HoloMap};

/// Tolerance under which a sampled infimum still counts as non-negative.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Exponential squeezing coefficient `2 log 2 - 1` shared by every
/// Noshiro–Warschawski generator with `f'(0) = 1`. The bound is sharp.
pub const NW_SQUEEZING_COEFFICIENT: f64 = 2.0 * std::f64::consts::LN_2 - 1.0;

/// Generators shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    /// `f(z) = z`
    Identity,
    /// `f(z) = z / (1 - z)`
    Ex1,
    /// `f(z) = z (1 - z)`
    Ex2,
    /// `f(z) = z (1 + z/2)`
    Half,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Identity, Builtin::Ex1, Builtin::Ex2, Builtin::Half];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Identity => "identity",
            Builtin::Ex1 => "ex1",
            Builtin::Ex2 => "ex2",
            Builtin::Half => "half",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn map(self) -> HoloMap {
        let one = Cx::new(1.0, 0.0);
        match self {
            Builtin::Identity => HoloMap::identity(),
            Builtin::Ex1 => HoloMap::with_derivative(
                "z/(1-z)",
                move |z| z / (one - z),
                move |z| {
                    let d = one - z;
                    one / (d * d)
                },
            ),
            Builtin::Ex2 => HoloMap::with_derivative("z*(1-z)", move |z| z * (one - z), move |z| one - 2.0 * z),
            Builtin::Half => HoloMap::with_derivative("z*(1+z/2)", move |z| z * (one + z * 0.5), move |z| one + z),
        }
    }

    pub fn spec(self) -> GeneratorSpec {
        let mut g = make_generator(self.map()).expect("built-in generators are finite on the grid");
        g.builtin = Some(self);
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassFlags {
    pub in_n: bool,
    pub in_nw: bool,
    pub in_g: bool,
}

/// Candidate Denjoy–Wolff point of the generated semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "point", rename_all = "lowercase")]
pub enum DwPoint {
    Interior(Cx),
    Boundary(Cx),
    Unknown,
}

/// A generator together with its sampled certificates.
///
/// All flags are sampling certificates on a [`DiskGrid`] with margin
/// `margin`, not proofs.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub map: HoloMap,
    pub builtin: Option<Builtin>,
    pub f_at_origin: Cx,
    pub f0deriv: Cx,
    pub flags: ClassFlags,
    /// Sampled infimum of `Re f(z)/z` (negative when the generator is not in `N`).
    pub kappa_hat: f64,
    pub kappa_point: Cx,
    /// Sampled supremum of `|arg f(z)/z|`.
    pub sector_hat: f64,
    pub sector_point: Cx,
    pub min_re_derivative: f64,
    pub dw_point: DwPoint,
    pub margin: f64,
}

impl GeneratorSpec {
    pub fn label(&self) -> &str {
        self.map.label()
    }

    /// `f(z)` for the generator.
    #[inline]
    pub fn f(&self, z: Cx) -> Cx {
        self.map.eval(z)
    }

    pub fn df(&self, z: Cx) -> Result<Cx> {
        self.map.derivative(z)
    }

    /// True when the sampled infimum of `Re f/z` is comparable to the grid
    /// margin, i.e. the true infimum may well be zero.
    pub fn near_zero_infimum(&self) -> bool {
        self.flags.in_n && self.kappa_hat < 10.0 * self.margin
    }

    pub(crate) fn require_n(&self, what: &str) -> Result<()> {
        if self.flags.in_n {
            Ok(())
        } else {
            Err(Error::Contract(format!("{what} requires a generator of class N, got {}", self.label())))
        }
    }
}

/// Certifies `map` on the standard grid.
pub fn make_generator(map: HoloMap) -> Result<GeneratorSpec> {
    make_generator_on(map, &DiskGrid::standard())
}

struct Scan {
    min_re_q: (f64, Cx),
    max_arg_q: (f64, Cx),
    min_re_df: f64,
    min_aers: f64,
}

pub fn make_generator_on(map: HoloMap, grid: &DiskGrid) -> Result<GeneratorSpec> {
    let origin = Cx::new(0.0, 0.0);
    let f0 = map.try_eval(origin)?;
    let df0 = map.derivative(origin)?;
    let contains_origin = f0.norm() < 1e-12;

    let per_point = |z: Cx| -> Result<Scan> {
        let fz = map.try_eval(z)?;
        let dfz = map.derivative(z)?;
        let q = if z == origin { df0 } else { fz / z };
        // generator criterion: Re(f(z) conj z) >= (1 - |z|^2) Re(f(0) conj z)
        let aers = (fz * z.conj()).re - (1.0 - z.norm_sqr()) * (f0 * z.conj()).re;
        Ok(Scan {
            min_re_q: (q.re, z),
            max_arg_q: (q.arg().abs(), z),
            min_re_df: dfz.re,
            min_aers: aers,
        })
    };
    let scan = grid
        .points()
        .into_par_iter()
        .map(per_point)
        .try_reduce_with(|a, b| {
            Ok(Scan {
                min_re_q: if b.min_re_q.0 < a.min_re_q.0 { b.min_re_q } else { a.min_re_q },
                max_arg_q: if b.max_arg_q.0 > a.max_arg_q.0 { b.max_arg_q } else { a.max_arg_q },
                min_re_df: a.min_re_df.min(b.min_re_df),
                min_aers: a.min_aers.min(b.min_aers),
            })
        })
        .expect("grid is non-empty")?;

    let in_n = contains_origin && scan.min_re_q.0 >= -MEMBERSHIP_TOL;
    let in_nw = in_n && scan.min_re_df >= -MEMBERSHIP_TOL;
    let in_g = in_n || scan.min_aers >= -MEMBERSHIP_TOL || boundary_annulus_test(&map, grid.angles_per_ring)?;

    let dw_point = if contains_origin {
        DwPoint::Interior(origin)
    } else {
        find_interior_zero(&map)
    };

    Ok(GeneratorSpec {
        map,
        builtin: None,
        f_at_origin: f0,
        f0deriv: df0,
        flags: ClassFlags { in_n, in_nw, in_g },
        kappa_hat: scan.min_re_q.0,
        kappa_point: scan.min_re_q.1,
        sector_hat: scan.max_arg_q.0,
        sector_point: scan.max_arg_q.1,
        min_re_derivative: scan.min_re_df,
        dw_point,
        margin: grid.margin,
    })
}

/// `Re[f(z) conj z] > 0` on the annulus `0.99 <= |z| <= 1 - 1e-4`.
fn boundary_annulus_test(map: &HoloMap, angles: usize) -> Result<bool> {
    let rings = 8;
    let radii: Vec<f64> = (0..rings)
        .map(|k| 1.0 - 0.01 * (1e-2f64).powf(k as f64 / (rings - 1) as f64))
        .collect();
    for rho in radii {
        for j in 0..angles {
            let z = Cx::from_polar(rho, 2.0 * PI * j as f64 / angles as f64);
            if (map.try_eval(z)? * z.conj()).re <= 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Newton's method for a zero of `f` started at the origin.
fn find_interior_zero(map: &HoloMap) -> DwPoint {
    let mut z = Cx::new(0.0, 0.0);
    for _ in 0..60 {
        let fz = map.eval(z);
        if fz.norm() < 1e-13 {
            return if z.norm() < 1.0 {
                DwPoint::Interior(z)
            } else {
                DwPoint::Unknown
            };
        }
        let Ok(d) = map.derivative(z) else {
            return DwPoint::Unknown;
        };
        if d.norm() == 0.0 {
            return DwPoint::Unknown;
        }
        let next = z - fz / d;
        if !(next.norm() < 1.0) {
            return DwPoint::Unknown;
        }
        z = next;
    }
    DwPoint::Unknown
}

/// The generator `(z - tau)(1 - z conj(tau)) p(z)` for a closed-disk point
/// `tau` and a function `p` with positive real part.
pub fn berkson_porta(tau: Cx, p: HoloMap) -> Result<GeneratorSpec> {
    if tau.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain {
            point: tau,
            what: "Denjoy-Wolff point must lie in the closed disk",
        });
    }
    let grid = DiskGrid::standard();
    for z in grid.points() {
        let v = p.try_eval(z)?;
        if v.re <= 0.0 {
            return Err(Error::NotPositive { point: z, value: v });
        }
    }
    let one = Cx::new(1.0, 0.0);
    let tau_c = tau.conj();
    let label = format!("({tau})-Berkson-Porta[{}]", p.label());
    let (pe, pd) = (p.clone(), p);
    let map = HoloMap::with_derivative(
        label,
        move |z| (z - tau) * (one - z * tau_c) * pe.eval(z),
        move |z| {
            let pz = pd.eval(z);
            let dp = pd.derivative(z).unwrap_or(Cx::new(f64::NAN, f64::NAN));
            (one - z * tau_c) * pz - tau_c * (z - tau) * pz + (z - tau) * (one - z * tau_c) * dp
        },
    );
    let mut g = make_generator_on(map, &grid)?;
    g.dw_point = if tau.norm() < 1.0 {
        DwPoint::Interior(tau)
    } else {
        DwPoint::Boundary(tau)
    };
    Ok(g)
}

/// Best uniform exponential rate in `|F_t(z)| <= |z| e^{-kappa t}`,
/// sampled as the infimum of `Re f(z)/z`.
pub fn squeezing_coefficient(gen: &GeneratorSpec) -> Result<f64> {
    gen.require_n("squeezing coefficient")?;
    Ok(gen.kappa_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarlikeOrder {
    pub alpha: f64,
    pub point: Cx,
}

/// Sampled order of starlikeness: `inf Re[z map'(z) / map(z)]`, clamped at 0.
pub fn starlike_order(map: &HoloMap) -> Result<StarlikeOrder> {
    starlike_order_on(map, &DiskGrid::standard())
}

pub fn starlike_order_on(map: &HoloMap, grid: &DiskGrid) -> Result<StarlikeOrder> {
    let origin = Cx::new(0.0, 0.0);
    let v0 = map.try_eval(origin)?;
    if v0.norm() > 1e-12 {
        return Err(Error::Contract(format!("starlike order needs map(0) = 0, got {v0}")));
    }
    if map.derivative(origin)?.norm() == 0.0 {
        return Err(Error::Contract("starlike order needs map'(0) != 0".into()));
    }
    let (value, point) = grid
        .points()
        .into_par_iter()
        .map(|z| -> Result<(f64, Cx)> {
            if z == origin {
                return Ok((1.0, z));
            }
            let v = map.try_eval(z)?;
            if v.norm() <= 1e-14 * z.norm() {
                return Err(Error::StarlikenessViolated { point: z });
            }
            let d = map.derivative(z)?;
            Ok(((z * d / v).re, z))
        })
        .try_reduce_with(|a, b| Ok(if b.0 < a.0 { b } else { a }))
        .expect("grid is non-empty")?;
    Ok(StarlikeOrder {
        alpha: value.max(0.0),
        point,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderBounds {
    pub squeeze: f64,
    pub sector: f64,
}

/// Squeezing coefficient `2^{-2(1-alpha)} beta` and sector bound
/// `(1 - alpha) pi` for a starlike generator of order `alpha >= 1/2`.
pub fn order_to_bounds(alpha: f64, beta: f64) -> Result<OrderBounds> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::Contract(format!(
            "starlike order {alpha} outside [1/2, 1): the class is not contained in N"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::Contract(format!("f'(0) = {beta} must be positive")));
    }
    Ok(OrderBounds {
        squeeze: 2f64.powf(-2.0 * (1.0 - alpha)) * beta,
        sector: (1.0 - alpha) * PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_is_in_every_class() {
        let g = Builtin::Identity.spec();
        assert!(g.flags.in_n && g.flags.in_nw && g.flags.in_g);
        assert_abs_diff_eq!(g.kappa_hat, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.sector_hat, 0.0, epsilon = 1e-15);
        assert_eq!(g.dw_point, DwPoint::Interior(Cx::new(0.0, 0.0)));
    }

    #[test]
    fn minus_identity_is_not_in_n() {
        let g = make_generator(HoloMap::with_derivative("-z", |z| -z, |_| Cx::new(-1.0, 0.0))).unwrap();
        assert!(!g.flags.in_n);
        assert!(!g.flags.in_nw);
        assert!(!g.flags.in_g);
        assert!(squeezing_coefficient(&g).is_err());
    }

    #[test]
    fn ex2_has_vanishing_infimum() {
        let g = Builtin::Ex2.spec();
        assert!(g.flags.in_n);
        // Re(1 - z) >= margin on the grid, approaching 0 only at the boundary
        assert!(g.kappa_hat > 0.0 && g.kappa_hat <= 1.001e-3);
        assert!(g.near_zero_infimum());
        // sup |arg(1 - z)| tends to pi/2 as the margin shrinks
        assert!(g.sector_hat < PI / 2.0 && g.sector_hat > PI / 2.0 - 0.05);
        let fine = make_generator_on(Builtin::Ex2.map(), &DiskGrid::boundary_graded(24, 1024, 1e-6)).unwrap();
        assert!(fine.kappa_hat < 1.1e-6);
        assert!(fine.sector_hat > PI / 2.0 - 0.01);
    }

    #[test]
    fn half_generator_squeezing_is_one_half() {
        let g = Builtin::Half.spec();
        let k = squeezing_coefficient(&g).unwrap();
        // inf Re(1 + z/2) over |z| <= 1 - 1e-3 is 1 - (1 - 1e-3)/2
        assert_abs_diff_eq!(k, 0.5 + 0.5e-3, epsilon = 1e-12);
        assert!(g.flags.in_nw);
    }

    #[test]
    fn ex1_is_in_n_but_not_nw() {
        let g = Builtin::Ex1.spec();
        // f' = (1 - z)^{-2} has negative real part once |arg(1 - z)| > pi/4
        assert!(g.flags.in_n && !g.flags.in_nw);
        assert!(!g.near_zero_infimum());
        // f/z = 1/(1 - z) has Re > 1/2
        assert!(g.kappa_hat > 0.5 && g.kappa_hat < 0.5 + 1e-3);
    }

    #[test]
    fn membership_invariants_for_builtins() {
        for b in Builtin::ALL {
            let g = b.spec();
            if g.flags.in_n {
                assert!(g.f(Cx::new(0.0, 0.0)).norm() < 1e-12);
                assert!(g.kappa_hat >= -1e-9);
            }
            if g.flags.in_nw {
                assert!(g.flags.in_n);
            }
            let again = make_generator(g.map.clone()).unwrap();
            assert_eq!(again.flags, g.flags);
            assert_eq!(again.kappa_hat, g.kappa_hat);
        }
    }

    #[test]
    fn berkson_porta_examples() {
        let one = HoloMap::with_derivative("1", |_| Cx::new(1.0, 0.0), |_| Cx::new(0.0, 0.0));
        let g = berkson_porta(Cx::new(0.0, 0.0), one.clone()).unwrap();
        for z in [Cx::new(0.3, 0.1), Cx::new(-0.7, 0.2)] {
            assert!((g.f(z) - z).norm() < 1e-15);
        }

        let g = berkson_porta(Cx::new(1.0, 0.0), one).unwrap();
        assert_abs_diff_eq!(g.f_at_origin.re, -1.0, epsilon = 1e-15);
        let z = Cx::new(0.2, -0.4);
        assert!((g.f(z) + (1.0 - z) * (1.0 - z)).norm() < 1e-15);
        assert!(g.flags.in_g && !g.flags.in_n);
        assert_eq!(g.dw_point, DwPoint::Boundary(Cx::new(1.0, 0.0)));

        let p = HoloMap::with_derivative("1/(1-z)", |z| 1.0 / (1.0 - z), |z| 1.0 / ((1.0 - z) * (1.0 - z)));
        let g = berkson_porta(Cx::new(0.0, 0.0), p).unwrap();
        let ex1 = Builtin::Ex1.map();
        for z in [Cx::new(0.3, 0.1), Cx::new(-0.7, 0.2)] {
            assert!((g.f(z) - ex1.eval(z)).norm() < 1e-15);
            assert!((g.df(z).unwrap() - ex1.derivative(z).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn berkson_porta_rejects_non_positive_p() {
        let p = HoloMap::new("z", |z| z);
        match berkson_porta(Cx::new(0.0, 0.0), p) {
            Err(Error::NotPositive { point, .. }) => assert!(point.re <= 0.0),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn interior_dw_point_is_located() {
        let one = HoloMap::with_derivative("1", |_| Cx::new(1.0, 0.0), |_| Cx::new(0.0, 0.0));
        let tau = Cx::new(0.3, -0.2);
        let g = berkson_porta(tau, one).unwrap();
        let auto = make_generator(g.map.clone()).unwrap();
        match auto.dw_point {
            DwPoint::Interior(z) => assert!((z - tau).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(auto.flags.in_g);
    }

    #[test]
    fn starlike_orders() {
        let id = starlike_order(&HoloMap::identity()).unwrap();
        assert_abs_diff_eq!(id.alpha, 1.0, epsilon = 1e-15);
        // z f'/f = 1/(1 - z) for f = z/(1-z): infimum 1/2 approached at z -> -1
        let ex1 = starlike_order(&Builtin::Ex1.map()).unwrap();
        assert!((ex1.alpha - 0.5).abs() < 1e-3);
        assert!(ex1.point.re < -0.99);
    }

    #[test]
    fn starlike_order_detects_interior_zero() {
        let m = HoloMap::with_derivative("z(z-0.5)", |z| z * (z - 0.5), |z| 2.0 * z - 0.5);
        let grid = DiskGrid {
            radii: vec![0.5],
            angles_per_ring: 4,
            margin: 0.5,
            include_origin: true,
        };
        assert!(matches!(starlike_order_on(&m, &grid), Err(Error::StarlikenessViolated { .. })));
    }

    #[test]
    fn order_bounds() {
        let b = order_to_bounds(0.5, 1.0).unwrap();
        assert_abs_diff_eq!(b.squeeze, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.sector, PI / 2.0, epsilon = 1e-15);
        let b = order_to_bounds(0.75, 2.0).unwrap();
        assert_abs_diff_eq!(b.squeeze, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.sector, PI / 4.0, epsilon = 1e-15);
        let b = order_to_bounds(1.0 - 1e-12, 3.0).unwrap();
        assert_abs_diff_eq!(b.squeeze, 3.0, epsilon = 1e-10);
        assert!(b.sector < 1e-11);
        assert!(order_to_bounds(0.49, 1.0).is_err());
        assert!(order_to_bounds(1.0, 1.0).is_err());
        assert!(order_to_bounds(0.6, 0.0).is_err());
    }

    #[test]
    fn nw_reference_constant() {
        assert_abs_diff_eq!(NW_SQUEEZING_COEFFICIENT, 0.386_294_361_119_890_6, epsilon = 1e-15);
    }
}
