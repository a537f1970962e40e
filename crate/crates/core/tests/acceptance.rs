//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use corrlab::discord::{
    discord_exact, discord_weak, profile, sector_scan, SectorLabel, SectorPoint, SectorScan,
};
use corrlab::entropy::{EntropicForm, Quadratic, Tsallis, VonNeumann};
use corrlab::geometry::{chord_deviation, correlation_ellipsoid};
use corrlab::measurement::{conditional_entropy, povm_conditional_entropy, ProjectiveDirection};
use corrlab::optimizer::{
    hessian_general, hessian_two_qubit, minimize_oracle, minimize_quadratic, minimize_weak_correlation,
};
use corrlab::sampling;
use corrlab::smallalg::{line_angle, norm, CMatrix, RMatrix};
use corrlab::states::{schmidt_pure, x_state, BlochDecomposition, OperatorBasis, XStateParams};
use corrlab::{MinimizerConfig, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const PURE_NULLITY: f64 = 1e-10;
const QUAD_EXACTNESS: f64 = 1e-8;
const POVM_SLACK: f64 = 1e-10;
const WEAK_SLOPE: f64 = 2.7;
const HESSIAN_IDENTITY: f64 = 1e-12;
const HESSIAN_CROSS: f64 = 1e-10;
const ETA_SERIES_REL: f64 = 0.02;
const UNIVERSAL_ANGLE: f64 = 1e-8;
const ORACLE_ANGLE: f64 = 1e-3;
/// Largest weak-vs-exact deviation for the `r_A = r_B = 0.25`, `J_z = -0.25`
/// profiles. Fixed after running the oracle on the three `J_x` values, whose
/// largest deviation was 9.2e-3.
const PROFILE_TOL: f64 = 2e-2;
const BELL_DISCORD: f64 = 1e-8;
const PRODUCT_DISCORD: f64 = 1e-9;
const CLASSICAL_DISCORD: f64 = 1e-8;
const DISCORD_FLOOR: f64 = -1e-9;
const SPHERE_TOL: f64 = 1e-9;
const CHORD_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn forms() -> Vec<Box<dyn EntropicForm>> {
    vec![Box::new(VonNeumann), Box::new(Quadratic), Box::new(Tsallis::new(1.5).unwrap())]
}

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let el = start.elapsed();
    check(el < budget, format!("{detail}; {:.1}s of {}s", el.as_secs_f64(), budget.as_secs()))
}

fn pure_state_nullity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let b = sampling::random_pure_two_qubit(&mut rng);
        for _ in 0..50 {
            let k = ProjectiveDirection::new(sampling::random_unit_vector(&mut rng)).unwrap();
            for f in forms() {
                worst = worst.max(conditional_entropy(&b, &k, f.as_ref()).map_err(|e| e.to_string())?);
            }
        }
    }
    if worst >= PURE_NULLITY {
        return Err(format!("max S_f(A|B_k) = {worst:e}"));
    }
    within_budget(start, Duration::from_secs(10), format!("max S_f(A|B_k) = {worst:.2e}"))
}

fn quadratic_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = MinimizerConfig::default();
    let mut worst = 0.0f64;
    for i in 0..500 {
        let b = sampling::random_state(&mut rng, 2 + i % 2);
        let exact = minimize_quadratic(&b).map_err(|e| e.to_string())?;
        let oracle = minimize_oracle(&b, &Quadratic, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((exact.s_min - oracle.s_min).abs());
    }
    if worst >= QUAD_EXACTNESS {
        return Err(format!("max |exact - oracle| = {worst:e}"));
    }
    within_budget(start, Duration::from_secs(60), format!("max |exact - oracle| = {worst:.2e}"))
}

fn povm_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let b = sampling::random_state(&mut rng, 2 + i % 2);
        let proj = minimize_quadratic(&b).map_err(|e| e.to_string())?.s_min;
        for j in 0..100 {
            let povm = sampling::random_povm(&mut rng, 2 + j % 5);
            let s = povm_conditional_entropy(&b, &povm, &Quadratic).map_err(|e| e.to_string())?;
            worst = worst.min(s - proj);
        }
    }
    check(worst >= -POVM_SLACK, format!("min S_povm - S_proj = {worst:.3e}"))
}

fn loglog_slope(eps: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of the ensemble-mean error over 20 base states, per form.
///
/// Individual states can have a sign change in the error between the
/// cubic and quartic terms inside the fitted range, so the per-state slopes
/// are reported alongside but do not decide the outcome.
fn weak_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps = [0.2, 0.1, 0.05, 0.025];
    let cfg = MinimizerConfig::default();
    let vn = VonNeumann;
    let ts = Tsallis::new(1.5).unwrap();
    let fs: [(&str, &dyn EntropicForm); 2] = [("vn", &vn), ("tsallis:1.5", &ts)];
    let mut mean = [[0.0; 4]; 2];
    let mut below = 0;
    for i in 0..20 {
        let base = sampling::random_state(&mut rng, 2 + i % 2);
        for (fi, (_, f)) in fs.iter().enumerate() {
            let errs = eps
                .iter()
                .map(|&e| {
                    let b = base.with_scaled_correlations(e);
                    let w = minimize_weak_correlation(&b, *f)?.s_min;
                    let o = minimize_oracle(&b, *f, &cfg)?.s_min;
                    Ok((w - o).abs())
                })
                .collect::<corrlab::Result<Vec<f64>>>()
                .map_err(|e| e.to_string())?;
            for (m, e) in mean[fi].iter_mut().zip(&errs) {
                *m += e / 20.0;
            }
            if loglog_slope(&eps, &errs) < WEAK_SLOPE {
                below += 1;
            }
        }
    }
    let slopes: Vec<f64> = mean.iter().map(|m| loglog_slope(&eps, m)).collect();
    check(
        slopes.iter().all(|&s| s >= WEAK_SLOPE),
        format!(
            "mean-error slope {} {:.3}, {} {:.3}; {below}/40 single-state fits below {WEAK_SLOPE}",
            fs[0].0, slopes[0], fs[1].0, slopes[1]
        ),
    )
}

fn hessian_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut quad_dev = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 3;
        let rho = sampling::random_density_matrix(&mut rng, d);
        let basis = OperatorBasis::new(d).unwrap();
        let l = hessian_general(&rho, &basis, &Quadratic).map_err(|e| e.to_string())?;
        quad_dev = quad_dev.max(l.max_abs_diff(&RMatrix::identity(d * d - 1)));
    }
    let mut mixed_dev = 0.0f64;
    for d in 2..=5 {
        let basis = OperatorBasis::new(d).unwrap();
        let rho = CMatrix::identity(d).scale(1.0 / d as f64);
        for f in forms() {
            let l = hessian_general(&rho, &basis, f.as_ref()).map_err(|e| e.to_string())?;
            let a = 0.25 * f.d2f(1.0 / d as f64).abs();
            mixed_dev = mixed_dev.max(l.max_abs_diff(&RMatrix::identity(d * d - 1).scale(a)));
        }
    }
    let basis = OperatorBasis::new(2).unwrap();
    let mut cross = 0.0f64;
    for _ in 0..100 {
        let r = sampling::random_unit_vector(&mut rng);
        let len = rng.random_range(0.0..0.95);
        let r: Vec3 = [r[0] * len, r[1] * len, r[2] * len];
        let rho = basis.state_from_bloch(&r);
        for f in forms() {
            let g = hessian_general(&rho, &basis, f.as_ref()).map_err(|e| e.to_string())?;
            cross = cross.max(g.max_abs_diff(&hessian_two_qubit(&r, f.as_ref()).to_matrix()));
        }
    }
    check(
        quad_dev < HESSIAN_IDENTITY && mixed_dev < HESSIAN_CROSS && cross < HESSIAN_CROSS,
        format!("quad {quad_dev:.1e}, mixed {mixed_dev:.1e}, two-qubit {cross:.1e}"),
    )
}

fn eta_checks() -> Outcome {
    let rs: Vec<f64> = (1..=99).map(|i| i as f64 / 100.0).collect();
    if rs.iter().any(|&r| Quadratic.eta(r) != 1.0) {
        return Err("quadratic eta differs from 1".into());
    }
    if let Some(r) = rs.iter().find(|&&r| VonNeumann.eta(r) <= 1.0) {
        return Err(format!("von Neumann eta({r}) <= 1"));
    }
    let mut series = 0.0f64;
    for i in 1..=100 {
        let r = 0.001 * i as f64;
        series = series.max((VonNeumann.eta(r) / (1.0 + 2.0 * r * r / 3.0) - 1.0).abs());
    }
    if series >= ETA_SERIES_REL {
        return Err(format!("series deviation {series:e}"));
    }
    for q in [0.5, 1.5, 2.0, 2.5, 3.0, 4.0] {
        let t = Tsallis::new(q).unwrap();
        let ok = rs.iter().all(|&r| {
            let e = t.eta(r);
            if q == 2.0 || q == 3.0 {
                (e - 1.0).abs() < 1e-10
            } else if q > 2.0 && q < 3.0 {
                e < 1.0
            } else {
                e > 1.0
            }
        });
        if !ok {
            return Err(format!("Tsallis q = {q} sign pattern"));
        }
    }
    Ok(format!("vn series deviation {series:.1e}; Tsallis pattern holds"))
}

/// Random state with `r_A = 0`, shrinking `C` until it is positive.
fn mixed_marginal_state(rng: &mut ChaCha8Rng, d_a: usize, zero_rb: bool) -> BlochDecomposition {
    loop {
        let s = sampling::random_state(rng, d_a);
        let rb = if zero_rb { [0.0; 3] } else { *s.r_b() };
        let mut c = s.correlations().clone();
        for _ in 0..20 {
            let b = BlochDecomposition::new(d_a, vec![0.0; d_a * d_a - 1], rb, c.clone()).unwrap();
            if b.check_positive().positive {
                return b;
            }
            c = c.scale(0.7);
        }
    }
}

fn universality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut weak = 0.0f64;
    for i in 0..50 {
        let b = mixed_marginal_state(&mut rng, 2 + i % 2, false);
        let ks = forms()
            .iter()
            .map(|f| minimize_weak_correlation(&b, f.as_ref()).map(|r| r.k_opt))
            .collect::<corrlab::Result<Vec<Vec3>>>()
            .map_err(|e| e.to_string())?;
        weak = weak.max(line_angle(&ks[0], &ks[1])).max(line_angle(&ks[0], &ks[2]));
    }
    let mut oracle = 0.0f64;
    let cfg = MinimizerConfig::default();
    // h_f(|C k|) form of the conditional entropy holds for two qubits only
    for _ in 0..50 {
        let b = mixed_marginal_state(&mut rng, 2, true);
        let top = b.principal_frame().right_vector(0);
        let k = minimize_oracle(&b, &VonNeumann, &cfg).map_err(|e| e.to_string())?.k_opt;
        oracle = oracle.max(line_angle(&k, &top));
    }
    check(
        weak < UNIVERSAL_ANGLE && oracle < ORACLE_ANGLE,
        format!("weak angle {weak:.1e} rad, oracle angle {oracle:.1e} rad"),
    )
}

fn column(points: &[SectorPoint], r_a: f64) -> Vec<&SectorPoint> {
    points.iter().filter(|p| (p.r_a - r_a).abs() < 1e-12).collect()
}

fn count(points: &[&SectorPoint], label: SectorLabel) -> usize {
    points.iter().filter(|p| p.label == label).count()
}

fn sector_map() -> Outcome {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|e| e.to_string())?;
    let mut panels = Vec::new();
    for j_z in [0.3, 0.15, -0.25, -0.5] {
        let scan = SectorScan::new(0.25, j_z);
        let pts = pool.install(|| sector_scan(&scan)).map_err(|e| e.to_string())?;
        panels.push((j_z, scan, pts));
    }
    let mut notes = Vec::new();
    let mut ok = true;
    for (j_z, scan, pts) in &panels {
        let axis = column(pts, scan.r_a.values()[0]);
        let c = count(&axis, SectorLabel::C);
        notes.push(format!("J_z={j_z}: C at r_A=0 {c}"));
        ok &= c <= 1;
    }
    let (_, scan, pts) = &panels[2];
    let r_as = scan.r_a.values();
    let dj = (scan.j_x.max - scan.j_x.min) / (scan.j_x.n - 1) as f64;
    let mut widths = Vec::new();
    for &ra in r_as.iter().filter(|&&r| r >= 0.3 - 1e-12) {
        let col = column(pts, ra);
        if col.iter().all(|p| p.label == SectorLabel::Invalid) {
            continue;
        }
        let c = count(&col, SectorLabel::C);
        if c == 0 {
            ok = false;
            notes.push(format!("no C at r_A={ra:.2}"));
        }
    }
    for &ra in r_as.iter().step_by(10) {
        let col = column(pts, ra);
        if col.iter().all(|p| p.label == SectorLabel::Invalid) {
            continue;
        }
        widths.push((ra, count(&col, SectorLabel::C) as f64 * dj));
    }
    let monotone = widths.windows(2).all(|w| w[1].1 >= w[0].1);
    ok &= monotone;
    notes.push(format!(
        "C widths {}",
        widths.iter().map(|(r, w)| format!("{r:.1}:{w:.2}")).collect::<Vec<_>>().join(" ")
    ));
    let detail = notes.join("; ");
    if !ok {
        return Err(detail);
    }
    within_budget(start, Duration::from_secs(15 * 60), detail)
}

fn entropy_profiles() -> Outcome {
    let cfg = MinimizerConfig::default();
    let steps = 720;
    let mut notes = Vec::new();
    let mut ok = true;
    let mut worst = 0.0f64;
    for (j_x, axis) in [(0.1, Some(0.0)), (0.325, None), (0.5, Some(PI / 2.0))] {
        let b = x_state(&XStateParams::new(0.25, 0.25, j_x, j_x, -0.25)).map_err(|e| e.to_string())?;
        let rows = profile(&b, steps, &[]).map_err(|e| e.to_string())?;
        let argmax = |g: &dyn Fn(&corrlab::discord::ProfileRow) -> f64| {
            rows.iter().max_by(|a, b| g(a).total_cmp(&g(b))).unwrap().theta % PI
        };
        let t_vn = argmax(&|r| r.ds_vn);
        let t_q = argmax(&|r| r.ds_quad);
        if let Some(a) = axis {
            let near = |t: f64| (t - a).abs().min((t - a - PI).abs()) < 1e-9;
            ok &= near(t_vn) && near(t_q);
            notes.push(format!("J_x={j_x}: argmax vn {t_vn:.3} quad {t_q:.3}"));
        }
        let dev = rows.iter().map(|r| (r.ds_vn_weak - r.ds_vn).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        notes.push(format!("J_x={j_x}: weak dev {dev:.2e}"));
    }
    let b = x_state(&XStateParams::new(0.25, 0.25, 0.1, 0.1, -0.25)).map_err(|e| e.to_string())?;
    let w = discord_weak(&b).map_err(|e| e.to_string())?.discord;
    let e = discord_exact(&b, &cfg, 0.05).map_err(|e| e.to_string())?.discord;
    notes.push(format!("discord weak {w:.5} exact {e:.5}"));
    ok &= worst < PROFILE_TOL && (w - e).abs() < PROFILE_TOL;
    check(ok, notes.join("; "))
}

fn discord_sanity() -> Outcome {
    let cfg = MinimizerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let err = |e: corrlab::Error| e.to_string();
    let mut bell = 0.0f64;
    for _ in 0..5 {
        let b = sampling::random_local_frames(&mut rng, &schmidt_pure(0.5).unwrap());
        bell = bell.max((discord_exact(&b, &cfg, 0.05).map_err(err)?.discord - 1.0).abs());
    }
    let mut product = 0.0f64;
    for _ in 0..20 {
        let s = sampling::random_state(&mut rng, 2);
        let b = BlochDecomposition::product(2, s.r_a().to_vec(), *s.r_b()).unwrap();
        product = product.max(discord_exact(&b, &cfg, 0.05).map_err(err)?.discord.abs());
    }
    let mut classical = 0.0f64;
    for _ in 0..20 {
        let mut p: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let t: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= t);
        let rho = CMatrix::from_real(&RMatrix::diag(&p));
        let b = corrlab::states::decompose(&rho, 2).map_err(err)?;
        classical = classical.max(discord_exact(&b, &cfg, 0.05).map_err(err)?.discord.abs());
    }
    let mut floor = f64::INFINITY;
    for _ in 0..500 {
        let b = sampling::random_state(&mut rng, 2);
        floor = floor.min(discord_exact(&b, &cfg, 0.05).map_err(err)?.discord);
    }
    check(
        bell < BELL_DISCORD && product < PRODUCT_DISCORD && classical < CLASSICAL_DISCORD && floor >= DISCORD_FLOOR,
        format!("|D_bell - 1| {bell:.1e}, product {product:.1e}, classical {classical:.1e}, min random {floor:.3e}"),
    )
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sphere = 0.0f64;
    for _ in 0..50 {
        let p = rng.random_range(0.01..0.99);
        let b = sampling::random_local_frames(&mut rng, &schmidt_pure(p).unwrap());
        let e = correlation_ellipsoid(&b).map_err(|e| e.to_string())?;
        if e.rank() != 3 {
            return Err(format!("rank {} for Schmidt weight {p}", e.rank()));
        }
        sphere = sphere.max(norm(&e.center));
        for ax in &e.axes {
            sphere = sphere.max((ax.semi_axis - 1.0).abs());
        }
    }
    let mut chord = 0.0f64;
    for i in 0..100 {
        let b = sampling::random_state(&mut rng, 2 + i % 2);
        for _ in 0..50 {
            let k = ProjectiveDirection::new(sampling::random_unit_vector(&mut rng)).unwrap();
            chord = chord.max(chord_deviation(&b, &k).map_err(|e| e.to_string())?);
        }
    }
    check(
        sphere < SPHERE_TOL && chord < CHORD_TOL,
        format!("sphere deviation {sphere:.1e}, chord deviation {chord:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("pure-state nullity", pure_state_nullity),
        ("quadratic exactness", quadratic_exactness),
        ("POVM bound", povm_bound),
        ("weak-correlation scaling", weak_scaling),
        ("Hessian identities", hessian_identities),
        ("eta checks", eta_checks),
        ("universality", universality),
        ("sector map", sector_map),
        ("entropy profiles", entropy_profiles),
        ("discord sanity", discord_sanity),
        ("geometry", geometry),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{n:2}] {name}: {detail} ({:.1}s)", t.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
