//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use resolvent_lab::boundary::{
    angular_derivative, angular_limit, bfid_derivative, bfid_region_check, bfid_resolvent, Angular, DEFAULT_DEPTH,
};
use resolvent_lab::generators::{Builtin, NW_SQUEEZING_COEFFICIENT};
use resolvent_lab::geometry::{
    check_hyperbolic_convexity, check_inclusion_chain, check_marx_strohhacker, check_nw, check_starlike_half, Region,
};
use resolvent_lab::loewner::{
    chain_derivative_identity, check_herglotz_positive, divergence_integral, lens_inclusion_check, pde_residual,
    sector_report,
};
use resolvent_lab::resolvent::{closed_form_ex1, closed_form_ex2, resolvent_map, solve};
use resolvent_lab::semigroup::{exponential_formula, flow};
use resolvent_lab::{Cx, DiskGrid};
use resolvent_lab_cli::{assess_emitted_figures, dispatch, figure1_stem, FIGURE2_STEM};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Sunflower lattice in `|w| < 0.999` paired with `r` spread log-uniformly over `[0.01, 10]`.
fn oracle_cases(n: usize) -> Vec<(f64, Cx)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let rho = 0.999 * ((k as f64 + 0.5) / n as f64).sqrt();
            let frac = (k as f64 * 2f64.sqrt()).fract();
            (10f64.powf(-2.0 + 3.0 * frac), Cx::from_polar(rho, k as f64 * golden))
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let cases = oracle_cases(1000);
    let mut worst: f64 = 0.0;
    for (b, oracle) in [
        (Builtin::Ex1, closed_form_ex1 as fn(f64, Cx) -> resolvent_lab::Result<Cx>),
        (Builtin::Ex2, closed_form_ex2 as fn(f64, Cx) -> resolvent_lab::Result<Cx>),
    ] {
        let g = b.spec();
        let err = cases
            .par_iter()
            .map(|&(r, w)| match (solve(&g, r, w), oracle(r, w)) {
                (Ok(s), Ok(z)) => (s.z - z).norm(),
                _ => f64::INFINITY,
            })
            .reduce(|| 0.0, f64::max);
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-10 && secs < 5.0, format!("max error {worst:.2e} over 2x1000 points in {secs:.2} s"))
}

fn criterion_2() -> Verdict {
    let g = Builtin::Ex1.spec();
    let exact = 0.5 + 0.5 * 0.2f64.sqrt();
    let at_one = check_starlike_half(&g, 1.0).map_err(|e| e.to_string())?.worst_value;
    let small = check_starlike_half(&g, 1e-3).map_err(|e| e.to_string())?.worst_value;
    check(
        (at_one - exact).abs() < 1e-2 && (small - 0.5).abs() < 2e-2,
        format!("inf at r=1: {at_one:.5} (target {exact:.5}); inf at r=1e-3: {small:.5} (target 0.5)"),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let sweep = [0.1, 0.6, 1.0, 2.0];
    let mut failures = Vec::new();
    let mut cases = 0;
    for b in [Builtin::Ex1, Builtin::Ex2, Builtin::Half] {
        let g = b.spec();
        for (i, &r) in sweep.iter().enumerate() {
            let mut run = |name: &str, res: resolvent_lab::Result<bool>| {
                cases += 1;
                match res {
                    Ok(true) => {}
                    Ok(false) => failures.push(format!("{} r={r} {name}", b.name())),
                    Err(e) => failures.push(format!("{} r={r} {name}: {e}", b.name())),
                }
            };
            run("NW", check_nw(&g, r).map(|p| p.pass && p.worst_value > 0.0));
            run("starlike", check_starlike_half(&g, r).map(|p| p.worst_value > 0.5 - 1e-6));
            run("Marx-Strohhacker", check_marx_strohhacker(&g, r).map(|p| p.pass));
            let s_values = std::iter::once(0.0).chain(sweep[..i].iter().copied());
            for s in s_values {
                run("inclusion", check_inclusion_chain(&g, s, r).map(|p| p.worst_value <= 1e-12));
            }
            let region = Region::resolvent_image(&g, r, 0.0);
            run("convexity", check_hyperbolic_convexity(&region, 10_000, 1 + i as u64).map(|p| p.pass));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures.is_empty() && secs < 60.0,
        format!("{cases} checks, {} failed {failures:?}, {secs:.1} s", failures.len()),
    )
}

fn criterion_4() -> Verdict {
    let g = Builtin::Ex2.spec();
    let one = Cx::new(1.0, 0.0);
    let mut notes = Vec::new();
    let mut ok = true;
    for r in [0.2, 0.6, 0.9] {
        let expect = 1.0 / (1.0 - r);
        match angular_derivative(&resolvent_map(&g, r), one, one, DEFAULT_DEPTH) {
            Ok(Angular::Finite(d)) => {
                let rel = (d - expect).norm() / expect;
                ok &= rel <= 1e-3;
                notes.push(format!("r={r}: rel err {rel:.1e}"));
            }
            other => {
                ok = false;
                notes.push(format!("r={r}: {other:?}"));
            }
        }
    }
    let at_one = angular_derivative(&resolvent_map(&g, 1.0), one, one, DEFAULT_DEPTH);
    ok &= matches!(at_one, Ok(Angular::Divergent));
    notes.push(format!("r=1: {at_one:?}"));
    for r in [1.1, 2.0] {
        match angular_limit(&resolvent_map(&g, r), one, DEFAULT_DEPTH) {
            Ok(Angular::Finite(v)) => {
                let err = (v - 1.0 / r).norm();
                ok &= err < 1e-6;
                notes.push(format!("r={r}: limit err {err:.1e}"));
            }
            other => {
                ok = false;
                notes.push(format!("r={r}: {other:?}"));
            }
        }
    }
    check(ok, notes.join("; "))
}

fn criterion_5() -> Verdict {
    let id = Builtin::Identity.spec();
    let z = Cx::new(0.5, 0.0);
    let errs = [64usize, 128, 256, 512, 1024]
        .iter()
        .map(|&n| exponential_formula(&id, z, 1.0, n).map(|e| e.error))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = errs.windows(2).map(|p| p[1] / p[0]).collect();
    let halves = ratios.iter().all(|q| (0.45..=0.55).contains(q));
    let ex2 = exponential_formula(&Builtin::Ex2.spec(), z, 1.0, 1024)
        .map_err(|e| e.to_string())?
        .error;
    check(
        halves && ex2 < 1e-3,
        format!("identity ratios {ratios:.4?}; ex2 error at n=1024 {ex2:.2e}"),
    )
}

fn criterion_6() -> Verdict {
    let sweep = [0.1, 0.6, 1.0, 2.0, 10.0];
    let grid = DiskGrid::standard();
    let mut ok = true;
    let mut min_p = f64::INFINITY;
    let mut div: f64 = 0.0;
    let mut chain: f64 = 0.0;
    let mut pde: f64 = 0.0;
    let mut orders = Vec::new();
    for b in Builtin::ALL {
        let g = b.spec();
        let rep = check_herglotz_positive(&g, &sweep, &grid).map_err(|e| e.to_string())?;
        ok &= rep.pass;
        min_p = min_p.min(rep.worst_value);
        for t in [1.0, 10.0, 100.0] {
            div = div.max(divergence_integral(&g, t).map_err(|e| e.to_string())?.defect);
            chain = chain.max(chain_derivative_identity(&g, t).map_err(|e| e.to_string())?.defect);
        }
        for w in [Cx::new(0.3, 0.0), Cx::new(-0.4, 0.5)] {
            pde = pde.max(pde_residual(&g, 0.6, w, 1e-4).map_err(|e| e.to_string())?);
            if b == Builtin::Identity {
                continue; // exact up to rounding, no truncation error to decay
            }
            let res = [1e-3, 5e-4, 2.5e-4]
                .iter()
                .map(|&h| pde_residual(&g, 0.6, w, h))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            for p in res.windows(2) {
                orders.push(p[0] / p[1]);
            }
        }
    }
    let second_order = orders.iter().all(|q| (3.5..=4.5).contains(q));
    ok &= div < 1e-8 && chain < 1e-8 && pde < 1e-6 && second_order;
    let (lo, hi) = orders.iter().fold((f64::INFINITY, 0.0f64), |a, &q| (a.0.min(q), a.1.max(q)));
    check(
        ok,
        format!(
            "min Re p {min_p:.3e}; divergence defect {div:.1e}; PDE residual {pde:.1e} (halving ratios {lo:.2}..{hi:.2}); chain defect {chain:.1e}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let g = Builtin::Half.spec();
    let pts = DiskGrid::standard().points();
    let mut worst = f64::NEG_INFINITY;
    for t in [0.5, 1.0, 2.0] {
        let w = pts
            .par_iter()
            .map(|&z| match flow(&g, z, t) {
                Ok(u) => u.norm() - z.norm() * (-t / 2.0).exp(),
                Err(_) => f64::INFINITY,
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        worst = worst.max(w);
    }
    let constant_ok = (NW_SQUEEZING_COEFFICIENT - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15
        && (NW_SQUEEZING_COEFFICIENT - 0.386).abs() < 1e-3;
    check(
        worst <= 1e-8 && constant_ok,
        format!("max |F_t(z)| - |z|e^(-t/2) = {worst:.2e}; reference constant {NW_SQUEEZING_COEFFICIENT:.6}"),
    )
}

fn criterion_8() -> Verdict {
    let s = sector_report(&Builtin::Half.spec(), &[0.1, 0.6, 1.0, 2.0, 10.0]).map_err(|e| e.to_string())?;
    let k = s.k.unwrap_or(f64::NAN);
    let mut ok = (s.alpha_hat - 1.0 / 3.0).abs() <= 1e-3 && (k - 0.5).abs() <= 1e-3 && s.sup_arg_p <= PI / 6.0 + 1e-6;
    let mut lens = Vec::new();
    for alpha in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
        let rep = lens_inclusion_check(alpha, 10_000).map_err(|e| e.to_string())?;
        ok &= rep.pass && rep.samples >= 10_000;
        lens.push(format!("{:.1e}", rep.worst_value));
    }
    check(
        ok,
        format!(
            "alpha_hat {:.5}, k {k:.5}, sup|arg p| {:.6} (pi/6 = {:.6}); lens margins {lens:?}",
            s.alpha_hat,
            s.sup_arg_p,
            PI / 6.0
        ),
    )
}

fn criterion_9() -> Verdict {
    let g = Builtin::Ex2.spec();
    let e = |e: resolvent_lab::Error| e.to_string();
    let v = bfid_resolvent(&g, -0.5, Cx::new(0.3, 0.0)).map_err(e)?;
    let v_err = (v - (0.85f64.sqrt() - 0.5)).norm();
    let d = bfid_derivative(&g, -0.5, Cx::new(0.0, 0.0)).map_err(e)?;
    let d_err = (d - 2.0).norm();
    let far = (bfid_resolvent(&g, -1000.0, Cx::new(0.3, 0.0)).map_err(e)? - 1.0).norm();
    let region = bfid_region_check(&g, -1.0, 1000).map_err(e)?.report;
    check(
        v_err < 1e-10 && d_err < 1e-8 && far < 1e-2 && region.pass && region.samples >= 1000,
        format!(
            "value err {v_err:.1e}; J'(0) err {d_err:.1e}; |J_-1000(0.3) - 1| = {far:.2e}; {} samples, max excess {:.1e}",
            region.samples, region.worst_value
        ),
    )
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().ok_or("non-UTF-8 temp path")?.to_string();
    let code = dispatch(["resolvent-lab", "figures", "--quiet", "--out", out.as_str()]);
    let mut missing = Vec::new();
    for stem in [0.6, 1.0, 1.1].map(figure1_stem).into_iter().chain([FIGURE2_STEM.to_string()]) {
        if !dir.path().join(format!("{stem}.svg")).is_file() {
            missing.push(stem);
        }
    }
    let (f1, f2) = assess_emitted_figures(dir.path())?;
    let failed: Vec<String> = f1
        .assertions
        .iter()
        .chain(&f2.assertions)
        .filter(|a| !a.pass)
        .map(|a| format!("{} ({:.3e})", a.name, a.value))
        .collect();
    check(
        code == 0 && missing.is_empty() && f1.pass && f2.pass,
        format!(
            "exit {code}; {} + {} assertions on emitted curves, failed {failed:?}; missing SVG {missing:?}",
            f1.assertions.len(),
            f2.assertions.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("oracle agreement", criterion_1),
        ("starlike order of ex1", criterion_2),
        ("geometry suite", criterion_3),
        ("boundary fixed points", criterion_4),
        ("exponential formula", criterion_5),
        ("Loewner chain", criterion_6),
        ("squeezing", criterion_7),
        ("quasiconformal bound", criterion_8),
        ("backward invariant domain", criterion_9),
        ("figures", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} [{name}]: {tag} - {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
