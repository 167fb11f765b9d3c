//! The semigroup `F_t` generated by `f`, obtained by integrating
//! `du/dt + f(u) = 0`, `u(0) = z`, with an adaptive Dormand–Prince 5(4)
//! scheme; the semigroup law; and the exponential formula
//! `J_{t/n}^n -> F_t` built from resolvent steps.

use serde::Serialize;

use crate::boundary;
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::holo::{check_disk, Cx, HoloMap};
use crate::resolvent;

/// Trajectories are clamped to `|u| <= 1 - FLOW_CLAMP`.
pub const FLOW_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-14 }
    }
}

/// Time-sampled orbit `t -> F_t(z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTrajectory {
    pub start: Cx,
    pub times: Vec<f64>,
    pub values: Vec<Cx>,
    pub rtol: f64,
    /// Accepted integrator steps over the whole trajectory.
    pub steps: usize,
    /// Set when the orbit had to be pulled back inside `|u| <= 1 - 1e-15`.
    pub clamped: bool,
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Integrator<'a> {
    map: &'a HoloMap,
    opts: FlowOptions,
    steps: usize,
    clamped: bool,
}

impl Integrator<'_> {
    fn rhs(&self, u: Cx) -> Result<Cx> {
        self.map.try_eval(u).map(|v| -v)
    }

    fn clamp(&mut self, u: Cx) -> Cx {
        let m = u.norm();
        if m > 1.0 - FLOW_CLAMP {
            self.clamped = true;
            u * ((1.0 - FLOW_CLAMP) / m)
        } else {
            u
        }
    }

    /// Advances `u` from time `t0` by `duration`.
    fn advance(&mut self, mut u: Cx, t0: f64, duration: f64) -> Result<Cx> {
        if duration <= 0.0 {
            return Ok(u);
        }
        let mut t = 0.0;
        let mut h = duration.min(0.05);
        let h_min = 1e-14 * duration.max(1.0);
        let mut k = [Cx::new(0.0, 0.0); 7];
        k[0] = self.rhs(u)?;
        while t < duration {
            if t + h > duration {
                h = duration - t;
            }
            for s in 1..7 {
                let mut acc = u;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += kj * (A[s][j] * h);
                }
                k[s] = self.rhs(acc)?;
            }
            let mut u5 = u;
            let mut err = Cx::new(0.0, 0.0);
            for i in 0..7 {
                u5 += k[i] * (B5[i] * h);
                err += k[i] * ((B5[i] - B4[i]) * h);
            }
            let scale = self.opts.atol + self.opts.rtol * u.norm().max(u5.norm());
            let ratio = err.norm() / scale;
            if ratio <= 1.0 {
                t += h;
                u = self.clamp(u5);
                self.steps += 1;
                // first-same-as-last
                k[0] = if u == u5 { k[6] } else { self.rhs(u)? };
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h < h_min && t < duration {
                return Err(Error::Stiffness { t: t0 + t, state: u });
            }
        }
        Ok(u)
    }
}

fn require_generator(gen: &GeneratorSpec) -> Result<()> {
    if gen.flags.in_g {
        Ok(())
    } else {
        Err(Error::Contract(format!("{} is not a certified generator", gen.label())))
    }
}

/// `F_t(z)`.
pub fn flow(gen: &GeneratorSpec, z: Cx, t: f64) -> Result<Cx> {
    flow_with(gen, z, t, &FlowOptions::default())
}

pub fn flow_with(gen: &GeneratorSpec, z: Cx, t: f64, opts: &FlowOptions) -> Result<Cx> {
    check_disk(z, "flow start must satisfy |z| < 1")?;
    require_generator(gen)?;
    if !(t >= 0.0) {
        return Err(Error::Contract(format!("flow time must be non-negative, got {t}")));
    }
    let mut integ = Integrator {
        map: &gen.map,
        opts: *opts,
        steps: 0,
        clamped: false,
    };
    integ.advance(z, 0.0, t)
}

/// Samples `F_t(z)` at the given increasing times.
pub fn trajectory(gen: &GeneratorSpec, z: Cx, times: &[f64]) -> Result<FlowTrajectory> {
    check_disk(z, "flow start must satisfy |z| < 1")?;
    require_generator(gen)?;
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Contract("trajectory times must be non-negative and increasing".into()));
    }
    let opts = FlowOptions::default();
    let mut integ = Integrator {
        map: &gen.map,
        opts,
        steps: 0,
        clamped: false,
    };
    let mut values = Vec::with_capacity(times.len());
    let (mut u, mut t_prev) = (z, 0.0);
    for &t in times {
        u = integ.advance(u, t_prev, t - t_prev)?;
        values.push(u);
        t_prev = t;
    }
    Ok(FlowTrajectory {
        start: z,
        times: times.to_vec(),
        values,
        rtol: opts.rtol,
        steps: integ.steps,
        clamped: integ.clamped,
    })
}

/// `|F_t(F_s(z)) - F_{t+s}(z)|`.
pub fn semigroup_law_check(gen: &GeneratorSpec, z: Cx, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::Contract("semigroup times must be non-negative".into()));
    }
    let composed = flow(gen, flow(gen, z, s)?, t)?;
    let direct = flow(gen, z, s + t)?;
    Ok((composed - direct).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpFormula {
    pub n: usize,
    pub approx: Cx,
    pub flow: Cx,
    pub error: f64,
}

/// The `n`-fold iterate of `J_{t/n}` at `z` and its distance to `F_t(z)`.
/// Each resolvent step is one implicit Euler step of the flow equation.
pub fn exponential_formula(gen: &GeneratorSpec, z: Cx, t: f64, n: usize) -> Result<ExpFormula> {
    if !(t >= 0.0) || n == 0 {
        return Err(Error::Contract(format!("need t >= 0 and n >= 1, got t = {t}, n = {n}")));
    }
    let approx = resolvent_iterate(gen, t / n as f64, n, z)?;
    let exact = flow(gen, z, t)?;
    Ok(ExpFormula {
        n,
        approx,
        flow: exact,
        error: (approx - exact).norm(),
    })
}

/// `J_r^n(w)`.
pub fn resolvent_iterate(gen: &GeneratorSpec, r: f64, n: usize, w: Cx) -> Result<Cx> {
    let mut u = w;
    for _ in 0..n {
        u = resolvent::solve(gen, r, u)?.z;
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryMultiplier {
    /// `exp(-t f'(eta))` from the angular derivative of `f`.
    pub predicted: Cx,
    /// Radial difference quotient of the computed flow at distance `1e-3` from `eta`.
    pub cross_check: Cx,
    pub relative_gap: f64,
    pub agrees: bool,
}

/// Angular derivative `(F_t)'(eta) = exp(-t f'(eta))` at a boundary regular
/// null point `eta` of the generator.
pub fn boundary_flow_multiplier(gen: &GeneratorSpec, eta: Cx, t: f64) -> Result<BoundaryMultiplier> {
    let analysis = boundary::analyze_generator_point(&gen.map, eta, boundary::DEFAULT_DEPTH)?;
    let deriv = match (analysis.is_brnp, analysis.f_angular_deriv) {
        (true, boundary::Angular::Finite(d)) => d,
        _ => {
            return Err(Error::Contract(format!(
                "{eta} is not a boundary regular null point of {}",
                gen.label()
            )))
        }
    };
    let predicted = (-deriv * t).exp();
    let z = eta * (1.0 - 1e-3);
    let cross_check = (flow(gen, z, t)? - eta) / (z - eta);
    let relative_gap = (cross_check - predicted).norm() / predicted.norm();
    Ok(BoundaryMultiplier {
        predicted,
        cross_check,
        relative_gap,
        agrees: relative_gap <= 0.05,
    })
}
