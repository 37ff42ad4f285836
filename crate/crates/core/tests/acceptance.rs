//! End-to-end acceptance checks at the target tolerances.
//!
//! Runs without the test harness so that every criterion prints one
//! PASS/FAIL line; the process fails if any criterion does.

use std::f64::consts::PI;
use std::time::Instant;

use jcl_core::basis::dimension_oracle;
use jcl_core::operators::DissipationConvention;
use jcl_core::propagator::{fidelity, Dissipation, EvolveOptions, Propagator, StateVector};
use jcl_core::ramp::{optimal_index, Parameter, RampPlan, RampSchedule};
use jcl_core::spectrum::{gap_scan, ground_state, EigenOptions, GapReport, GapScan, GapScanOptions};
use jcl_core::state_prep::{
    classical_segment_duration, mi_ground_state, quantum_segment_duration, sf_ground_state, simulate_sf_pulse,
    PolaritonDoublet, SegmentKind,
};
use jcl_core::sweep::{combine_max_fidelity, phase_diagram, rho1_map, rj_sweep, FidelityGrid, RunConfig};
use jcl_core::*;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures += 1;
        }
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

struct Lattice6 {
    table: BasisTable,
    template: HamiltonianTemplate,
    translation: Translation,
}

impl Lattice6 {
    fn new() -> Self {
        let table = enumerate_basis(LatticeShape::unit_filling(6)).unwrap();
        let template = HamiltonianTemplate::new(&table);
        let translation = Translation::new(&table);
        Lattice6 { table, template, translation }
    }

    fn ground(&self, params: LatticeParams) -> StateVector {
        let gs = ground_state(&self.template.bind(params), &self.translation, &EigenOptions::default()).unwrap();
        StateVector::from_real(&gs.vector)
    }
}

fn mi_to_sf(rj: f64, duration: f64) -> RampPlan {
    RampPlan::new(
        RampSchedule::constant(Parameter::Coupling, 1.0),
        RampSchedule::new(Parameter::Hopping, 0.0, 0.5, rj).unwrap(),
        RampSchedule::constant(Parameter::Detuning, 0.0),
        duration,
    )
    .unwrap()
}

fn sf_to_mi(rj: f64, duration: f64) -> RampPlan {
    RampPlan::new(
        RampSchedule::new(Parameter::Coupling, 0.0, 1.0, rj).unwrap(),
        RampSchedule::new(Parameter::Hopping, 0.5, 0.0, rj).unwrap(),
        RampSchedule::constant(Parameter::Detuning, 0.0),
        duration,
    )
    .unwrap()
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let dim = enumerate_basis(LatticeShape::unit_filling(6)).unwrap().dim();
    let elapsed = start.elapsed().as_secs_f64();
    let mut oracle_ok = true;
    for l in 1..=4 {
        for n in 0..=l + 1 {
            let shape = LatticeShape::new(l, n);
            oracle_ok &= enumerate_basis(shape).unwrap().dim() == dimension_oracle(shape).unwrap();
        }
    }
    r.check(
        "1 basis dimension",
        dim == 5336 && elapsed < 1.0 && oracle_ok,
        format!("dim(L=N=6) = {dim} in {elapsed:.3} s; exhaustive oracle agrees for L <= 4: {oracle_ok}"),
    );
}

fn criteria_2_3(r: &mut Report, lat: &Lattice6) -> (GapScan, GapScan) {
    let opts = GapScanOptions::default();
    let start = Instant::now();
    let mi = gap_scan(&mi_to_sf(1.0, 15.0 * PI), &lat.template, &lat.translation, &opts).unwrap();
    let m = mi.minimum;
    r.check(
        "2 gap MI->SF",
        within(m.params.hopping, 0.122, 0.002) && within(m.gap, 0.31, 0.01),
        format!(
            "J_gp = {:.4} (0.122 +- 0.002), E_gp = {:.4} (0.31 +- 0.01), {:.1} s",
            m.params.hopping,
            m.gap,
            start.elapsed().as_secs_f64()
        ),
    );
    let sf = gap_scan(&sf_to_mi(1.0, 15.0 * PI), &lat.template, &lat.translation, &opts).unwrap();
    let m = sf.minimum;
    r.check(
        "3 gap SF->MI",
        within(m.params.hopping, 0.104, 0.002) && within(m.gap, 0.25, 0.01),
        format!("J_gp = {:.4} (0.104 +- 0.002), E_gp = {:.4} (0.25 +- 0.01)", m.params.hopping, m.gap),
    );
    (mi, sf)
}

fn criterion_4(r: &mut Report) {
    let a = optimal_index(0.0, 0.5, 0.122).unwrap();
    let b = optimal_index(0.5, 0.0, 0.104).unwrap();
    r.check(
        "4 optimal index",
        within(a, 1.41, 0.01) && within(b, 0.234, 0.002),
        format!("r(0 -> 0.5 | 0.122) = {a:.4} (1.41 +- 0.01), r(0.5 -> 0 | 0.104) = {b:.4} (0.234 +- 0.002)"),
    );
}

fn criterion_5(r: &mut Report) {
    let v = RampSchedule::new(Parameter::Hopping, 0.0, 0.5, 1.41)
        .unwrap()
        .velocity_at(0.122, 15.0 * PI)
        .unwrap();
    r.check("5 velocity at gap", within(v, 0.010, 0.0005), format!("J'_gp = {v:.5} (0.010 +- 0.0005)"));
}

/// Returns the Hermitian run's norm drift and symmetric leakage.
fn criterion_6(r: &mut Report, lat: &Lattice6) -> (f64, f64) {
    let plan = mi_to_sf(1.0, 15.0 * PI);
    let psi0 = mi_ground_state(&lat.table, 0.0, 1.0).unwrap();
    let target = lat.ground(plan.end_params());
    let prop = Propagator::new(&lat.template, EvolveOptions::default()).with_translation(&lat.translation);

    let start = Instant::now();
    let run = prop.evolve(&plan, &psi0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let f = fidelity(&run.final_state, &target).unwrap();
    r.check(
        "6a fidelity without dissipation",
        within(f, 0.9738, 0.0005) && secs < 60.0,
        format!("F = {f:.6} (0.9738 +- 0.0005), {} steps, {secs:.1} s", run.step_count),
    );

    let mut lines = Vec::new();
    let mut reproduced = Vec::new();
    for convention in [DissipationConvention::LiteralSigmaZ, DissipationConvention::NumberConserving] {
        let loss = Dissipation { cavity_decay: 1e-3, qubit_decay: 1e-5, convention };
        let start = Instant::now();
        let d = prop.evolve_dissipative(&plan, &psi0, &loss).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let raw = fidelity(&d.final_state, &target).unwrap();
        let normalized = raw / d.final_state.norm_sqr();
        lines.push(format!("{convention:?}: raw {raw:.4}, normalized {normalized:.6} ({secs:.1} s)"));
        if within(normalized, 0.9737, 0.0005) && secs < 60.0 {
            reproduced.push(format!("{convention:?}"));
        }
    }
    r.check(
        "6b fidelity with dissipation",
        !reproduced.is_empty(),
        format!(
            "target 0.9737 +- 0.0005 on the final-state-normalized fidelity; reproduced by [{}]; {}",
            reproduced.join(", "),
            lines.join("; ")
        ),
    );
    (run.norm_drift, run.symmetric_leakage)
}

fn criterion_7(r: &mut Report) {
    let grid = "rJ_values = 1/3, 1/2, 1, 2\n";
    let mi_cfg = |t: &str| RunConfig::from_text(&format!("{grid}J0 = 0\nJT = 0.5\nT = {t}\n")).unwrap();
    let sf_cfg = |t: &str| {
        RunConfig::from_text(&format!("{grid}initial = sf\ng0 = 0\ngT = 1\nJ0 = 0.5\nJT = 0\nT = {t}\n")).unwrap()
    };
    let fs = |s: &jcl_core::sweep::RjSweep| s.points.iter().map(|p| format!("{:.4}", p.1)).collect::<Vec<_>>().join(" ");
    let mut mi = Vec::new();
    let mut sf = Vec::new();
    for t in ["5pi", "10pi", "15pi"] {
        mi.push(rj_sweep(&mi_cfg(t)).unwrap());
        sf.push(rj_sweep(&sf_cfg(t)).unwrap());
    }
    let f = |s: &jcl_core::sweep::RjSweep, k: usize| s.points[k].1;
    let mi15 = &mi[2];
    let mi_order = f(mi15, 2).min(f(mi15, 3)) > f(mi15, 0).max(f(mi15, 1));
    let sf_argmax = [0.5, 1.0].contains(&sf[2].argmax);
    let increasing = |runs: &[jcl_core::sweep::RjSweep]| {
        (0..4).all(|k| f(&runs[0], k) < f(&runs[1], k) && f(&runs[1], k) < f(&runs[2], k))
    };
    let (mi_t, sf_t) = (increasing(&mi), increasing(&sf));
    r.check(
        "7 ordering",
        mi_order && sf_argmax && mi_t && sf_t,
        format!(
            "MI->SF T=15pi F(rJ=1/3,1/2,1,2) = {} (1,2 above 1/3,1/2: {mi_order}); \
             SF->MI argmax rJ = {} (in {{1/2, 1}}: {sf_argmax}); F rises with T for every rJ: MI {mi_t}, SF {sf_t}",
            fs(mi15),
            sf[2].argmax
        ),
    );
}

fn criterion_8(r: &mut Report, lat: &Lattice6) {
    let mi = mi_ground_state(&lat.table, 0.0, 1.0).unwrap();
    let f_mi = fidelity(&mi, &lat.ground(LatticeParams::new(1.0, 0.0, 0.0))).unwrap();
    let sf = sf_ground_state(&lat.table);
    let f_sf = fidelity(&sf, &lat.ground(LatticeParams::new(0.0, 0.5, -0.5))).unwrap();
    r.check(
        "8 limiting ground states",
        f_mi > 1.0 - 1e-8 && f_sf > 1.0 - 1e-8,
        format!("1 - F(MI, J=0) = {:.1e}, 1 - F(SF, g=0) = {:.1e}", 1.0 - f_mi, 1.0 - f_sf),
    );
}

fn criterion_9(r: &mut Report) {
    let cfg = RunConfig::from_text("J_min = 0\nJ_max = 0.5\nJ_points = 11\nDelta_min = -2\nDelta_max = 2\nDelta_points = 9\n")
        .unwrap();
    let pts = rho1_map(&cfg).unwrap();
    let nj = cfg.rho_hopping.points;
    let zero_row = pts.iter().filter(|p| p.hopping == 0.0).map(|p| p.rho1.abs()).fold(0.0, f64::max);
    let corner = pts.iter().find(|p| p.hopping == 0.5 && p.detuning == -2.0).unwrap().rho1;
    let monotone = pts.chunks(nj).all(|row| row.windows(2).all(|w| w[1].rho1 >= w[0].rho1));
    r.check(
        "9 rho1 map",
        zero_row <= 1e-10 && corner > 0.9 && monotone,
        format!(
            "max |rho1(1,4)| at J=0: {zero_row:.1e}; rho1 at J=0.5, Delta=-2: {corner:.4}; monotone in J per row: {monotone}"
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let (eps, gd) = (0.1, 0.05);
    let six = simulate_sf_pulse(6, eps, gd).unwrap();
    let exact = six.segments.iter().all(|s| {
        let expected = match s.kind {
            SegmentKind::Classical => PI / (2.0 * eps),
            SegmentKind::Quantum => PI / (2.0 * ((6 * s.l) as f64).sqrt() * gd),
        };
        (s.duration - expected).abs() <= 1e-15 * expected
    });
    let totals: Vec<f64> = (1..=10).map(|n| simulate_sf_pulse(n, eps, gd).unwrap().total_duration).collect();
    // least-squares slope of tau_d2 against N
    let n = totals.len() as f64;
    let xm = (n + 1.0) / 2.0;
    let ym = totals.iter().sum::<f64>() / n;
    let slope = totals.iter().enumerate().map(|(k, y)| (k as f64 + 1.0 - xm) * (y - ym)).sum::<f64>()
        / (1..=10).map(|k| (k as f64 - xm).powi(2)).sum::<f64>();
    let classical: Vec<f64> = (1..=10).map(|n| n as f64 * classical_segment_duration(eps)).collect();
    let curvature = classical.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]).abs()).fold(0.0, f64::max);
    let quantum_bounded = (1..=10).all(|n| {
        let q: f64 = (1..=n).map(|l| quantum_segment_duration(n, l, gd)).sum();
        q <= PI / gd
    });
    r.check(
        "10 pulse sequences",
        six.fidelity > 1.0 - 1e-8 && exact && slope > 0.0 && curvature < 1e-9 && quantum_bounded,
        format!(
            "1 - F(N=6) = {:.1e}; segment durations exact: {exact}; tau_d2 slope {slope:.3} per excitation, \
             classical-term curvature {curvature:.1e}, swap term bounded by pi/g_d: {quantum_bounded}",
            1.0 - six.fidelity
        ),
    );
}

fn criterion_11(r: &mut Report, lat: &Lattice6, drift: f64, leakage: f64, gaps: &(GapScan, GapScan)) {
    // [H, T] at a few generic points of the L = 6 sector
    let commutator = [(1.0, 0.122, 0.0), (0.3, 0.41, -0.7), (1.7, -0.2, 1.3)]
        .iter()
        .map(|&(g, j, d)| lat.translation.commutator_max_norm(&lat.template.assemble(&LatticeParams::new(g, j, d))))
        .fold(0.0, f64::max);

    // trajectory invariance under a common index rescaling
    let plan = sf_to_mi(1.0, 15.0 * PI);
    let scaled = plan.with_indices_scaled(2.7).unwrap();
    let mut invariance: f64 = 0.0;
    for k in 0..=50 {
        let s = k as f64 / 50.0;
        let (a, b) = (plan.trajectory_point(s).unwrap(), scaled.trajectory_point(s).unwrap());
        for p in Parameter::ALL {
            invariance = invariance.max((p.of(&a) - p.of(&b)).abs());
        }
    }

    // analytic velocity against a fourth-order stencil at 100 points
    let sch = RampSchedule::new(Parameter::Hopping, 0.0, 0.5, 1.41).unwrap();
    let total = 15.0 * PI;
    let p = |t: f64| sch.value_at(t, total).unwrap();
    let mut fd_err: f64 = 0.0;
    for k in 0..100 {
        let t = total * (0.05 + 0.94 * k as f64 / 99.0);
        let h = 1e-3 * t;
        let fd = (8.0 * (p(t + h) - p(t - h)) - (p(t + 2.0 * h) - p(t - 2.0 * h))) / (12.0 * h);
        let v = sch.velocity_at(p(t), total).unwrap();
        fd_err = fd_err.max((v - fd).abs() / v.abs());
    }

    // g'/J' at the SF->MI gap against the index-ratio prediction, for several ratios
    let mut ratio_err: f64 = 0.0;
    for rg in [0.5, 1.0, 2.0] {
        let plan = RampPlan::new(
            RampSchedule::new(Parameter::Coupling, 0.0, 1.0, rg).unwrap(),
            RampSchedule::new(Parameter::Hopping, 0.5, 0.0, 1.0).unwrap(),
            RampSchedule::constant(Parameter::Detuning, 0.0),
            15.0 * PI,
        )
        .unwrap();
        let s = gaps.1.minimum.s;
        let report = GapReport { s, params: plan.trajectory_point(s).unwrap(), gap: gaps.1.minimum.gap };
        let partials = lat.template.partials(&ground_state(
            &lat.template.bind(report.params),
            &lat.translation,
            &EigenOptions::default(),
        )
        .unwrap()
        .vector);
        let rate = plan.sweep_rate_at_gap(&report, &partials).unwrap();
        let (m, pr) = (rate.coupling_over_hopping.unwrap(), rate.predicted_ratio.unwrap());
        ratio_err = ratio_err.max((m - pr).abs() / pr.abs());
    }

    // Landau-Zener on the single-site doublet
    let one = enumerate_basis(LatticeShape::unit_filling(1)).unwrap();
    let tpl = HamiltonianTemplate::new(&one);
    let g = 0.1;
    let (d0, d1, total) = (-5.0, 5.0, 110.0);
    let lz_plan = RampPlan::new(
        RampSchedule::constant(Parameter::Coupling, g),
        RampSchedule::constant(Parameter::Hopping, 0.0),
        RampSchedule::new(Parameter::Detuning, d0, d1, 1.0).unwrap(),
        total,
    )
    .unwrap();
    let photon = one.find(&[SiteState::down(1)]).unwrap();
    let qubit = one.find(&[SiteState::up(0)]).unwrap();
    let adiabatic = |delta: f64, upper: bool| {
        let d = PolaritonDoublet::new(1, delta, g).unwrap();
        let (a, b) = if upper { d.upper_amplitudes() } else { d.lower_amplitudes() };
        let mut v = vec![0.0; 2];
        v[photon] = a;
        v[qubit] = b;
        StateVector::from_real(&v)
    };
    let run = Propagator::new(&tpl, EvolveOptions::default()).evolve(&lz_plan, &adiabatic(d0, false)).unwrap();
    let jumped = fidelity(&run.final_state, &adiabatic(d1, true)).unwrap();
    let lz = (-2.0 * PI * g * g / ((d1 - d0) / total)).exp();
    let lz_err = (jumped - lz).abs() / lz;

    r.check(
        "11 property suites",
        drift.abs() <= 1e-8
            && leakage.abs() <= 1e-8
            && commutator <= 1e-12
            && invariance <= 1e-12
            && fd_err <= 1e-6
            && ratio_err <= 1e-10
            && lz_err <= 0.01,
        format!(
            "norm drift {:.1e}; symmetric leakage {:.1e}; |[H,T]| {commutator:.1e}; trajectory invariance {invariance:.1e}; \
             velocity vs stencil {fd_err:.1e}; ratio identity {ratio_err:.1e}; Landau-Zener {:.2}%",
            drift.abs(),
            leakage.abs(),
            100.0 * lz_err
        ),
    );
}

/// Mean of the `(x, y)` third-by-third block `(bx, by)`.
fn block_mean(g: &FidelityGrid, bx: usize, by: usize) -> f64 {
    let (nx, ny) = (g.x.len(), g.y.len());
    let mut sum = 0.0;
    let mut count = 0;
    for ix in bx * nx / 3..(bx + 1) * nx / 3 {
        for iy in by * ny / 3..(by + 1) * ny / 3 {
            sum += g.get(ix, iy);
            count += 1;
        }
    }
    sum / count as f64
}

fn qualitative_maps(r: &mut Report) {
    let axes = "JT_min = 0\nJT_max = 0.5\nJT_points = 9\ndT_min = -1\ndT_max = 1\ndT_points = 9\nT = 15pi\n\
                steps_per_time = 10\nrefine = false\n";
    let start = Instant::now();
    let mut grids = Vec::new();
    let mut pattern = Vec::new();
    for initial in ["mi", "sf"] {
        for rj in ["1/3", "1/2", "1", "2"] {
            let plan = if initial == "mi" {
                format!("J0 = 0\nd0 = 0\nrJ = {rj}\nrd = {rj}\n")
            } else {
                format!("initial = sf\ng0 = 0\ngT = 1\nrg = {rj}\nJ0 = 0.5\nd0 = 0\nrJ = {rj}\nrd = {rj}\n")
            };
            let grid = phase_diagram(&RunConfig::from_text(&format!("{axes}{plan}")).unwrap()).unwrap();
            // MI corner: small J(T), positive delta(T); SF corner: large J(T), negative delta(T)
            let (mi_corner, sf_corner) = (block_mean(&grid, 0, 2), block_mean(&grid, 2, 0));
            let ok = if initial == "mi" { mi_corner > sf_corner } else { sf_corner > mi_corner };
            pattern.push((format!("{initial} rJ={rj}: MI corner {mi_corner:.3}, SF corner {sf_corner:.3}"), ok));
            grids.push(grid);
        }
    }
    let combined = combine_max_fidelity(&grids, &[]).unwrap();
    let good = combined.grid.values.iter().filter(|&&f| f > 0.9).count();
    let share = good as f64 / combined.grid.len() as f64;
    let linear = combine_max_fidelity(&[grids[2].clone(), grids[6].clone()], &[]).unwrap();
    let dominated = linear.grid.values.iter().zip(&combined.grid.values).all(|(a, b)| a <= b);
    let in_range = grids.iter().flat_map(|g| &g.values).all(|&f| (0.0..=1.0 + 1e-9).contains(&f));
    let pattern_ok = pattern.iter().all(|p| p.1);
    r.check(
        "maps (qualitative)",
        pattern_ok && share > 0.9 && dominated && in_range,
        format!(
            "{}; combined max > 0.9 on {good}/{} points ({:.0}%); linear-only max <= all-eight max: {dominated}; \
             {:.0} s",
            pattern.iter().map(|p| p.0.as_str()).collect::<Vec<_>>().join("; "),
            combined.grid.len(),
            100.0 * share,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn main() {
    // `cargo test` passes harness flags such as `--list` or name filters.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    if args.iter().any(|a| !a.starts_with('-') && !"acceptance".contains(a.as_str())) {
        return;
    }

    let mut r = Report { failures: 0 };
    let lat = Lattice6::new();
    criterion_1(&mut r);
    let gaps = criteria_2_3(&mut r, &lat);
    criterion_4(&mut r);
    criterion_5(&mut r);
    let (drift, leakage) = criterion_6(&mut r, &lat);
    criterion_7(&mut r);
    criterion_8(&mut r, &lat);
    criterion_9(&mut r);
    criterion_10(&mut r);
    criterion_11(&mut r, &lat, drift, leakage, &gaps);
    qualitative_maps(&mut r);
    if r.failures > 0 {
        println!("{} acceptance criteria failed", r.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
