//! Acceptance suite: one line per criterion, non-zero exit if any asserted
//! criterion fails. Reported items are printed but never fail the run.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

use polargap::backlund::*;
use polargap::catalog::{self, branches, FAMILIES};
use polargap::density::Family;
use polargap::elliptic::HalfPeriod;
use polargap::hierarchy::{gap_functions, liouville_jet, reconstruct_r};
use polargap::onegap::*;
use polargap::spectral::{band_edges, max_deviation, scan_max, verify_spectrum, PeriodicOperator};
use polargap::twogap::*;
use polargap::yfunc::YFunction;
use polargap::{run_verify, Error, Lattice, Tolerances, VerifyConfig};

type Res<T> = Result<T, String>;

fn fixture() -> Lattice {
    Lattice::from_roots(1.0, 0.0, -1.0).unwrap()
}

/// Trapezoid rule over a full period: spectrally accurate for smooth periodic `f`.
fn trap_periodic(f: impl Fn(f64) -> f64, period: f64, n: usize) -> f64 {
    (0..n).map(|k| f(period * k as f64 / n as f64)).sum::<f64>() * period / n as f64
}

/// `omega = int_0^{pi/2} dth / sqrt((A cos^2 + sin^2)(B cos^2 + sin^2))`,
/// A = e1 - e2, B = e1 - e3. The integrand is pi-periodic and even.
fn omega_oracle(e: [f64; 3]) -> f64 {
    let (a, b) = (e[0] - e[1], e[0] - e[2]);
    let f = |t: f64| {
        let (s, c) = t.sin_cos();
        1.0 / ((a * c * c + s * s) * (b * c * c + s * s)).sqrt()
    };
    trap_periodic(f, PI, 400) / 2.0
}

fn sup(n: usize, lo: f64, hi: f64, f: impl Fn(f64) -> Res<f64>) -> Res<f64> {
    let mut worst = 0.0f64;
    for k in 0..n {
        let y = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
        worst = worst.max(f(y)?.abs());
    }
    Ok(worst)
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_lattice(rng: &mut StdRng) -> [f64; 3] {
    let a: f64 = rng.gen_range(0.2..3.0);
    let b: f64 = rng.gen_range(0.2..3.0);
    let e2 = (b - a) / 3.0;
    [e2 + a, e2, e2 - b]
}

fn c1() -> Res<String> {
    let l = fixture();
    let leg = l.legendre_residual();
    let mut ode = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let z = num_complex::Complex::new(l.omega * (0.05 + 0.18 * i as f64), l.omega_p * (0.07 + 0.17 * j as f64));
            let w = l.eval(z).map_err(s)?;
            let res = w.wp_prime * w.wp_prime - (w.wp * w.wp * w.wp * 4.0 - w.wp * l.g2 - l.g3);
            ode = ode.max(res.norm() / (1.0 + w.wp.norm().powi(3)));
        }
    }
    let om = (l.omega - omega_oracle([1.0, 0.0, -1.0])).abs();
    let ok = leg < 1e-12 && ode < 1e-10 && om < 1e-10 && (l.omega - 1.3110288).abs() < 1e-7;
    let msg = format!("legendre {leg:.1e}, wp ODE {ode:.1e} on 100 pts, omega {:.10} vs quadrature {om:.1e}", l.omega);
    if ok { Ok(msg) } else { Err(msg) }
}

fn c2() -> Res<String> {
    let mut rng = StdRng::seed_from_u64(20240607);
    let mut sets = vec![[1.0, 0.0, -1.0]];
    sets.extend((0..5).map(|_| random_lattice(&mut rng)));
    let mut worst = 0.0f64;
    let mut set_err = 0.0f64;
    for e in &sets {
        let l = Lattice::from_roots(e[0], e[1], e[2]).map_err(s)?;
        let mut r1 = onegap_consistency_roots(&l);
        r1.sort_by(f64::total_cmp);
        let mut want1: Vec<f64> = e.iter().map(|x| -x).collect();
        want1.sort_by(f64::total_cmp);
        set_err = set_err.max(max_deviation(&r1, &want1));
        worst = worst.max(r1.iter().map(|&c| onegap_consistency_residual(&l, c).abs()).fold(0.0, f64::max));

        let mut r2 = twogap_admissible_roots(&l).map_err(s)?;
        r2.sort_by(f64::total_cmp);
        let q = (l.g2 / 3.0).sqrt();
        let mut want2 = vec![q, -q, e[0], e[1], e[2]];
        want2.sort_by(f64::total_cmp);
        set_err = set_err.max(max_deviation(&r2, &want2));
        // polynomial (a^2 - g2/3)(4a^3 - g2 a - g3) evaluated here, independently
        for &a in &r2 {
            let p = (a * a - l.g2 / 3.0) * (4.0 * a * a * a - l.g2 * a - l.g3);
            worst = worst.max(p.abs()).max(twogap_admissible_residual(&l, a).abs());
        }
    }
    let msg = format!("{} lattices, root-set deviation {set_err:.1e}, residual {worst:.1e}", sets.len());
    if worst < 1e-10 && set_err < 1e-10 { Ok(msg) } else { Err(msg) }
}

const T3_STATED: f64 = 2.8651611;

fn c3() -> Res<String> {
    let l = fixture();
    let tol = Tolerances::default();
    let d = build_onegap(3, &l).map_err(s)?;
    let r0 = d.r(0.0).map_err(s)?;
    let rh = d.r(l.omega_p).map_err(s)?;
    let py = 2.0 * l.omega_p;
    let even = sup(97, 0.0, py, |y| Ok(d.r(y).map_err(s)? - d.r(-y).map_err(s)?))?;
    let (lo, _) = d.r_range(400).map_err(s)?;
    let t_closed = onegap_period_closed(&l, 3).map_err(s)?;
    let t_quad = trap_periodic(|y| d.r(y).unwrap(), py, 256);
    let cmp = verify_spectrum(&d, &tol).map_err(s)?;
    let ok = (r0 - 0.75).abs() < 1e-10
        && (rh - 1.5).abs() < 1e-10
        && even < 1e-10
        && lo > 0.0
        && (t_closed - t_quad).abs() < 1e-10
        && (d.period_x - t_closed).abs() < 1e-10
        && (t_closed - 2.865_148_341_770_784).abs() < 1e-10
        && cmp.max_dev_schrodinger < 1e-6
        && cmp.max_dev_string < 1e-6;
    let msg = format!(
        "R(0) {r0:.12}, R(|w'|) {rh:.12}, min R {lo:.3}, T3 {t_closed:.13} (quadrature diff {:.1e}; stated {T3_STATED} is off by {:.2e}), edges schr {:.1e} string {:.1e}",
        (t_closed - t_quad).abs(),
        (t_closed - T3_STATED).abs(),
        cmp.max_dev_schrodinger,
        cmp.max_dev_string
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn c4() -> Res<String> {
    let l = fixture();
    let d = build_onegap(3, &l).map_err(s)?;
    let u3 = onegap_potential(&l, 3, HalfPeriod::Zero);
    let rec = reconstruct_r(gap_functions(u3, [0.0; 3]), vec![1.0 / 6.0]);
    let dev = sup(200, 0.0, 2.0 * l.omega_p, |y| Ok(rec.value(y).map_err(s)? - d.r(y).map_err(s)?))?;
    let msg = format!("alpha = 1/6, beta1 = 0: sup |R_rec - R3| = {dev:.1e}");
    if dev < 1e-10 { Ok(msg) } else { Err(msg) }
}

fn c5() -> Res<String> {
    let l = fixture();
    let tol = Tolerances::default();
    let d = build_twogap_pm(Sign::Plus, &l).map_err(s)?;
    let q = (l.g2 / 3.0).sqrt();
    let r0_oracle = (l.g2 / 3.0) / (l.e1 + q / 2.0).powi(2);
    let r0 = d.r(0.0).map_err(s)?;
    let (lo, _) = d.r_range(400).map_err(s)?;
    let u = lame_potential(2.0 / 3f64.sqrt(), &l).map_err(s)?;
    let r3 = 3f64.sqrt();
    let predicted = [0.0, 2.0 * r3 - 3.0, 2.0 * r3, 2.0 * r3 + 3.0, 4.0 * r3];
    let schr = band_edges(&PeriodicOperator::schrodinger(u.clone(), tol), scan_max(&predicted), 5).map_err(s)?;
    let string = band_edges(&PeriodicOperator::string(&d, tol).map_err(s)?, scan_max(&predicted), 5).map_err(s)?;
    let lv = sup(200, 0.0, 2.0 * l.omega_p, |y| {
        Ok(liouville_jet(&d, y).map_err(s)?.value() - u.value(y).map_err(s)?)
    })?;
    let ds = max_deviation(&schr.edges, &predicted);
    let dx = max_deviation(&string.edges, &predicted);
    let ok = (r0 - 0.5358984).abs() < 1e-7 && (r0 - r0_oracle).abs() < 1e-9 && lo > 0.0 && ds < 1e-6 && dx < 1e-6 && lv < 1e-8;
    let msg = format!("R(0) {r0:.12}, min R {lo:.4}, Lame edges {ds:.1e}, string edges {dx:.1e}, Liouville {lv:.1e}");
    if ok { Ok(msg) } else { Err(msg) }
}

fn c6() -> Res<String> {
    let mut worst = 0.0f64;
    let mut built = 0;
    let mut skipped = Vec::new();
    // the second lattice has e2 != 0, so the alpha = 2 branches exist
    for e in [[1.0, 0.0, -1.0], [2.0, -0.5, -1.5]] {
        let l = Lattice::from_roots(e[0], e[1], e[2]).map_err(s)?;
        for f in FAMILIES {
            for &b in branches(f) {
                let d = match catalog::build(f, b, &l) {
                    Ok(d) => d,
                    Err(Error::ZeroEalpha { .. }) => {
                        skipped.push(format!("{}/{b}@e2={}", f.name(), e[1]));
                        continue;
                    }
                    Err(err) => return Err(format!("{} {b}: {err}", f.name())),
                };
                let window = if f == Family::Soliton { 0.0 } else { 0.02 };
                let res = d.x_derivative_residual(200, window).map_err(|err| format!("{} {b}: {err}", f.name()))?;
                if res >= 1e-8 {
                    return Err(format!("{} {b} on {e:?}: residual {res:.1e}", f.name()));
                }
                worst = worst.max(res);
                built += 1;
            }
        }
    }
    Ok(format!("{built} densities, max residual {worst:.1e}; degenerate on fixture: {}", skipped.join(" ")))
}

fn c7() -> Res<String> {
    let l = fixture();
    let tol = Tolerances::default();
    let d = build_onegap(3, &l).map_err(s)?;
    let pair = backlund_density(&d, &tol).map_err(s)?;
    let u3 = onegap_potential(&l, 3, HalfPeriod::Zero);
    let py = 2.0 * l.omega_p;
    let ushift = sup(200, 0.0, py, |y| Ok(pair.u_target.value(y).map_err(s)? - u3.value(y + l.omega_p).map_err(s)?))?;
    let hat = build_backlund_onegap(3, &l).map_err(s)?;
    let (shift, res) = align_shift(
        |x| d.r(d.invert_x(x, &tol)?),
        |x| hat.r(hat.invert_x(x, &tol)?),
        d.period_x,
        200,
    )
    .map_err(s)?;
    let ok = pair.product_variation < 1e-8
        && (pair.b - 1.125).abs() < 1e-9
        && ushift < 1e-9
        && res < 1e-8
        && (shift - d.period_x / 2.0).abs() < 1e-6;
    let msg = format!(
        "product variation {:.1e}, b {:.12}, u^3 vs shifted u3 {ushift:.1e}, r^3 vs r3 after shift {shift:.10} (T3/2 = {:.10}) {res:.1e}",
        pair.product_variation,
        pair.b,
        d.period_x / 2.0
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn string_bands(d: &polargap::Density, tol: &Tolerances) -> Res<polargap::spectral::BandStructure<f64>> {
    let op = PeriodicOperator::string(d, *tol).map_err(s)?;
    band_edges(&op, scan_max(&d.band_edges), d.band_edges.len()).map_err(s)
}

fn c8() -> Res<String> {
    let l = fixture();
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, src, hat) in [
        ("r^3", build_onegap(3, &l), build_backlund_onegap(3, &l)),
        ("r^+", build_twogap_pm(Sign::Plus, &l), build_backlund_twogap(TwoGapBranch::Pm(Sign::Plus), &l)),
    ] {
        let a = string_bands(&src.map_err(s)?, &tol)?;
        let b = string_bands(&hat.map_err(s)?, &tol)?;
        let dev = max_deviation(&a.edges, &b.edges);
        // both scans share one lambda grid, so the edges agree to the bisection
        // width; the discriminants themselves give a finer comparison
        let disc = a
            .discriminant_samples
            .iter()
            .zip(&b.discriminant_samples)
            .map(|(p, q)| if p.0 == q.0 { (p.1 - q.1).abs() } else { f64::INFINITY })
            .fold(0.0, f64::max);
        ok &= dev < 1e-6;
        parts.push(format!("{name} vs partner: edges {dev:.1e}, discriminant {disc:.1e}"));
    }
    let msg = parts.join(", ");
    if ok { Ok(msg) } else { Err(msg) }
}

fn exponent(d: &polargap::Density) -> Res<f64> {
    let tol = Tolerances::default();
    let x0 = *cusp_points(d).map_err(s)?.first().ok_or("no zero")?;
    Ok(cusp_exponent(d, x0, &tol).map_err(s)?.exponent)
}

fn c9() -> Res<String> {
    let l = fixture();
    let mut parts = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, d: polargap::Density| -> Res<()> {
        let p = exponent(&d)?;
        ok &= (p - 2.0 / 3.0).abs() < 0.02;
        parts.push(format!("{name} {p:.4}"));
        Ok(())
    };
    check("r^1", build_backlund_onegap(1, &l).map_err(s)?)?;
    for a in 1..=3 {
        check(&format!("r^a{a}"), build_backlund_twogap(TwoGapBranch::Alpha(a), &l).map_err(s)?)?;
    }
    let minus = exponent(&build_backlund_twogap(TwoGapBranch::Pm(Sign::Minus), &l).map_err(s)?)?;
    let msg = format!("{}; r^- measures {minus:.4} against the stated 4/5 (reported)", parts.join(", "));
    if ok { Ok(msg) } else { Err(msg) }
}

fn c10() -> Res<String> {
    let gamma = 1.0 / 3.0;
    let ds: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&d| soliton_distance(gamma, d, 0.5, 3.0, 501).map_err(s))
        .collect::<Res<_>>()?;
    let msg = format!("distances {:.2e} > {:.2e} > {:.2e}", ds[0], ds[1], ds[2]);
    if ds[0] > ds[1] && ds[1] > ds[2] { Ok(msg) } else { Err(msg) }
}

fn c11() -> Res<String> {
    let l = fixture();
    let a3 = amplitude(&l, 3).map_err(s)?;
    let good = build_onegap(3, &l).map_err(s)?.x_derivative_residual(200, 0.0).map_err(s)?;
    let bad = build_with_amplitude(3, &l, 1.01 * a3).map_err(s)?.x_derivative_residual(200, 0.0).map_err(s)?;
    let report = run_verify(&VerifyConfig { perturb_a3: Some(1.01), spectral: false, ..Default::default() }).map_err(s)?;
    let flagged = report.get("onegap.r3.x_derivative").map(|c| !c.pass).unwrap_or(false);
    let msg = format!("X'=R residual {good:.1e} -> {bad:.1e} under 1% amplitude change; suite verdict {}", if report.pass { "pass" } else { "fail" });
    if good < 1e-8 && bad > 1e-3 && flagged && !report.pass { Ok(msg) } else { Err(msg) }
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Res<String>, bool); 11] = [
        ("elliptic kernel", c1, true),
        ("consistency conditions", c2, true),
        ("one-gap density r3", c3, true),
        ("representation equality", c4, true),
        ("two-gap density r+", c5, true),
        ("x' = R on every branch", c6, true),
        ("Backlund one-gap", c7, true),
        ("spectrum preservation", c8, false),
        ("cusp exponents", c9, true),
        ("soliton limit", c10, true),
        ("mutation sensitivity", c11, true),
    ];
    let mut failed = 0;
    for (k, (name, f, asserted)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let tag = match (&out, asserted) {
            (Ok(_), _) => "PASS",
            (Err(_), true) => {
                failed += 1;
                "FAIL"
            }
            (Err(_), false) => "DIFF",
        };
        let (Ok(msg) | Err(msg)) = out;
        let note = if *asserted { "" } else { " [reported]" };
        println!("criterion {:>2} {tag} {name}{note}: {msg} ({:.1}s)", k + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 11 passed in {:.1}s", 11 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
