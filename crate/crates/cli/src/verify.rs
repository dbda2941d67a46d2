//! The `verify` subcommand: the invariant suite as a per-check table.
//!
//! Randomized checks draw from a seeded generator so every run is
//! reproducible; the seed is recorded in the output. Two rows are
//! informational: the published Casimir closed form beyond i = 2 and the
//! un-squared action integrand are documented discrepancies whose measured
//! defect is reported, not asserted.

use jetgeo::analysis::{
    action_h_derivative, action_literal_variant, classify, decompose_band, default_window,
    period_shift, periodicity_defect, MotionClass,
};
use jetgeo::dynamics::{integrate, GeodesicState, IntegrationOptions, OutputGrid};
use jetgeo::gallery::{convict_arc, theta_ode_defect, ConvictParams};
use jetgeo::jet::{hamiltonian, JetDim, JetPoint, ReducedMomenta};
use jetgeo::poisson::{
    annihilation_defect, bracket_index, casimir_paper_poly, casimirs, poisson_tensor,
    structure_bracket, tensor_rank,
};
use jetgeo::poly::Polynomial;
use jetgeo::synthesis::{build_profile, roundtrip_residual, synthesize, CurvatureSpec, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

struct Row {
    name: &'static str,
    passed: Option<bool>, // None = informational
    metric: String,
}

fn random_z(rng: &mut ChaCha8Rng, k: usize) -> ReducedMomenta {
    ReducedMomenta::new((0..k + 2).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
}

fn bracket_checks(rng: &mut ChaCha8Rng) -> Row {
    let mut worst = 0.0f64;
    for k in 1..=6 {
        let n = k + 2;
        for _ in 0..200 {
            let z = random_z(rng, k);
            let b = poisson_tensor(&z);
            for i in 1..=n {
                for j in 1..=n {
                    worst = worst.max((b.entry(i, j) + b.entry(j, i)).abs());
                }
            }
            for i in 1..=n {
                for j in i + 1..=n {
                    for l in j + 1..=n {
                        let term = |a: usize, bb: usize, c: usize| match bracket_index(bb, c, n) {
                            Some((sign, m)) => sign * structure_bracket(a, m, &z).unwrap(),
                            None => 0.0,
                        };
                        worst =
                            worst.max((term(i, j, l) + term(j, l, i) + term(l, i, j)).abs());
                    }
                }
            }
            let expected = if z.z_norm() > 1e-12 { 2 } else { 0 };
            if tensor_rank(&z, 1e-12) != expected {
                worst = f64::INFINITY;
            }
        }
    }
    Row {
        name: "poisson: antisymmetry + Jacobi + rank dichotomy",
        passed: Some(worst == 0.0),
        metric: format!("max defect {worst:.1e}"),
    }
}

fn casimir_checks(rng: &mut ChaCha8Rng) -> (Row, Row, Row) {
    let mut worst = 0.0f64;
    let mut worst_c2 = 0.0f64;
    let mut min_paper_defect = f64::INFINITY;
    let mut max_paper_defect = 0.0f64;
    for k in 1..=6 {
        let dim = JetDim::new(k).unwrap();
        let set = casimirs(dim);
        for _ in 0..200 {
            let z = random_z(rng, k);
            for i in 1..=k {
                worst = worst.max(annihilation_defect(set.get(i), &z));
            }
            if k >= 2 {
                let paper2 = casimir_paper_poly(2, dim).unwrap();
                worst_c2 = worst_c2
                    .max((paper2.eval(z.as_slice()) - set.get(2).eval(z.as_slice())).abs());
            }
            for i in 3..=k {
                let paper = casimir_paper_poly(i, dim).unwrap();
                let d = annihilation_defect(&paper, &z);
                min_paper_defect = min_paper_defect.min(d);
                max_paper_defect = max_paper_defect.max(d);
            }
        }
    }
    (
        Row {
            name: "casimirs: annihilation B grad C = 0 (k = 1..6)",
            passed: Some(worst < 1e-12),
            metric: format!("max defect {worst:.1e}"),
        },
        Row {
            name: "casimirs: printed formula agrees at i = 2",
            passed: Some(worst_c2 < 1e-12),
            metric: format!("max |diff| {worst_c2:.1e}"),
        },
        Row {
            name: "casimirs: printed formula defect at i >= 3 (expected nonzero)",
            passed: None,
            metric: format!("defect in [{min_paper_defect:.2e}, {max_paper_defect:.2e}]"),
        },
    )
}

fn conservation_check(rng: &mut ChaCha8Rng) -> Row {
    let mut worst = 0.0f64;
    for k in 1..=4 {
        for _ in 0..3 {
            let theta0: f64 = rng.gen_range(0.0..2.0 * PI);
            let mut p = vec![theta0.cos(), theta0.sin()];
            for _ in 0..k {
                p.push(rng.gen_range(-1.0..1.0));
            }
            let init = GeodesicState::new(
                JetPoint::origin(JetDim::new(k).unwrap()),
                ReducedMomenta::new(p).unwrap(),
                0.0,
            )
            .unwrap();
            match integrate(
                &init,
                100.0,
                &IntegrationOptions {
                    grid: OutputGrid::Count(2000),
                    ..Default::default()
                },
            ) {
                Ok(arc) => worst = worst.max(arc.max_invariant_drift),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    Row {
        name: "dynamics: H and Casimir drift over s = 100 (k = 1..4)",
        passed: Some(worst < 1e-8),
        metric: format!("max drift {worst:.1e}"),
    }
}

fn circle_check() -> Row {
    let init = GeodesicState::new(
        JetPoint::origin(JetDim::new(1).unwrap()),
        ReducedMomenta::new(vec![1.0, 0.0, 1.0]).unwrap(),
        0.0,
    )
    .unwrap();
    let arc = integrate(&init, 2.0 * PI, &IntegrationOptions::default()).unwrap();
    let mut worst = 0.0f64;
    for smp in &arc.samples {
        worst = worst.max((smp.q.x - smp.s.sin()).abs());
        worst = worst.max((smp.q.u[0] - (smp.s.cos() - 1.0)).abs());
    }
    Row {
        name: "dynamics: Heisenberg circle closed form",
        passed: Some(worst < 1e-8),
        metric: format!("max pointwise {worst:.1e}"),
    }
}

fn roundtrip_check(rng: &mut ChaCha8Rng) -> Row {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let k = 3;
        let dim = JetDim::new(k).unwrap();
        let p = Polynomial::from_coeffs((0..k).map(|_| rng.gen_range(-0.8..0.8)).collect());
        let spec = CurvatureSpec::new(p, 0.0, rng.gen_range(-0.6..0.6), Sign::Plus).unwrap();
        let prof = build_profile(&spec, dim).unwrap();
        let arc = synthesize(
            &spec,
            dim,
            &JetPoint::origin(dim),
            (-25.0, 25.0),
            &IntegrationOptions {
                grid: OutputGrid::Count(4000),
                ..Default::default()
            },
        )
        .unwrap();
        worst = worst.max(roundtrip_residual(&arc, &prof));
    }
    Row {
        name: "synthesis: curvature-law roundtrip over s = 50 (k = 3)",
        passed: Some(worst < 1e-6),
        metric: format!("max residual {worst:.1e}"),
    }
}

fn period_checks() -> (Row, Row, Row) {
    // F = x: L = 2 pi, tau = 0
    let dim = JetDim::new(1).unwrap();
    let spec = CurvatureSpec::new(Polynomial::constant(1.0), 0.0, 0.0, Sign::Plus).unwrap();
    let prof = build_profile(&spec, dim).unwrap();
    let band = decompose_band(&prof, default_window(&prof)).unwrap();
    let pd = period_shift(&prof, &band.intervals[0], 1e-11).unwrap();
    let l_err = (pd.length.unwrap() - 2.0 * PI).abs();
    let tau_err = pd.tau.unwrap().abs();
    let row_l = Row {
        name: "analysis: circle period L = 2 pi, tau = 0",
        passed: Some(l_err < 1e-10 && tau_err < 1e-10),
        metric: format!("|L - 2pi| {l_err:.1e}, |tau| {tau_err:.1e}"),
    };

    // pseudo-sinusoid: u(s + L) = u(s) + tau on the integrated arc
    let dim2 = JetDim::new(2).unwrap();
    let spec2 = CurvatureSpec::new(
        Polynomial::from_coeffs(vec![0.0, 2.0]),
        0.0,
        0.0,
        Sign::Plus,
    )
    .unwrap();
    let prof2 = build_profile(&spec2, dim2).unwrap();
    let band2 = decompose_band(&prof2, default_window(&prof2)).unwrap();
    let pd2 = period_shift(&prof2, &band2.intervals[0], 1e-11).unwrap();
    let l2 = pd2.length.unwrap();
    let arc = synthesize(
        &spec2,
        dim2,
        &JetPoint::origin(dim2),
        (0.0, 3.0 * l2),
        &IntegrationOptions {
            grid: OutputGrid::Count(8000),
            ..Default::default()
        },
    )
    .unwrap();
    let (dx, du) = periodicity_defect(&arc, l2, pd2.tau.unwrap()).unwrap();
    let row_p = Row {
        name: "analysis: periodicity law on the pseudo-sinusoid",
        passed: Some(dx < 1e-6 && du < 1e-6),
        metric: format!("dx {dx:.1e}, du {du:.1e}"),
    };

    // dI/dH = L for both; the literal un-squared integrand is reported
    let d1 = action_h_derivative(&prof, &band.intervals[0], 1e-11).unwrap();
    let d2 = action_h_derivative(&prof2, &band2.intervals[0], 1e-11).unwrap();
    let e1 = (d1 - 2.0 * PI).abs();
    let e2 = (d2 - l2).abs();
    let lit = action_literal_variant(&prof, &band.intervals[0], 1e-10);
    let row_a = Row {
        name: "analysis: dI/dH = L at H = 1/2",
        passed: Some(e1 < 1e-4 && e2 < 1e-4),
        metric: format!(
            "defects {e1:.1e}, {e2:.1e} (un-squared integrand variant: I = {lit:.4} vs {:.4})",
            pd.action
        ),
    };
    (row_l, row_p, row_a)
}

fn classification_check() -> Row {
    let ok_convict = {
        let params = ConvictParams::new(2, 1.0, 1.0).unwrap();
        let prof = jetgeo::gallery::convict_profile(&params);
        let band = decompose_band(&prof, (-3.0, 3.0)).unwrap();
        band.intervals.len() == 2
            && band
                .intervals
                .iter()
                .all(|iv| classify(iv) == MotionClass::AsymptoticOneLine)
            && band
                .intervals
                .iter()
                .all(|iv| period_shift(&prof, iv, 1e-9).unwrap().length.is_none())
    };
    let ok_graph = (3..=5).all(|m| {
        let prof = jetgeo::gallery::graph_profile(m).unwrap();
        let band = decompose_band(&prof, (-1.0, 1.0)).unwrap();
        band.intervals.len() == 1
            && classify(&band.intervals[0]) == MotionClass::AsymptoticTwoLines
    });
    Row {
        name: "analysis: convict / graph classification",
        passed: Some(ok_convict && ok_graph),
        metric: format!("convict {ok_convict}, graphs {ok_graph}"),
    }
}

fn theta_ode_check() -> Row {
    let mut worst = 0.0f64;
    for (k, a, alpha) in [(2, 1.0, 0.0), (2, 1.0, 1.0), (3, 1.0, 1.0), (4, 2.0, 0.0)] {
        let params = ConvictParams::new(k, a, alpha).unwrap();
        let arc = convict_arc(&params, 8.0).unwrap();
        worst = worst.max(theta_ode_defect(&arc, &params).unwrap());
    }
    Row {
        name: "gallery: heading identity on convict arcs (x >= 0)",
        passed: Some(worst < 1e-8),
        metric: format!("max defect {worst:.1e}"),
    }
}

fn hamiltonian_sanity() -> Row {
    let p = ReducedMomenta::new(vec![0.6, 0.8, 0.0]).unwrap();
    let ok = hamiltonian(&p) == 0.5;
    Row {
        name: "core: Hamiltonian normalization",
        passed: Some(ok),
        metric: String::from("H(0.6, 0.8, .) = 0.5"),
    }
}

/// Runs every check; returns true when all asserted rows pass.
pub fn run_suite(seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("verification suite (seed {seed})");
    let mut rows = Vec::new();
    rows.push(hamiltonian_sanity());
    rows.push(bracket_checks(&mut rng));
    let (c1, c2, c3) = casimir_checks(&mut rng);
    rows.push(c1);
    rows.push(c2);
    rows.push(c3);
    rows.push(conservation_check(&mut rng));
    rows.push(circle_check());
    rows.push(roundtrip_check(&mut rng));
    let (p1, p2, p3) = period_checks();
    rows.push(p1);
    rows.push(p2);
    rows.push(p3);
    rows.push(classification_check());
    rows.push(theta_ode_check());

    let mut all_ok = true;
    for row in &rows {
        let status = match row.passed {
            Some(true) => "PASS",
            Some(false) => {
                all_ok = false;
                "FAIL"
            }
            None => "INFO",
        };
        println!("  [{status}] {:<58} {}", row.name, row.metric);
    }
    println!(
        "verification {}",
        if all_ok { "passed" } else { "FAILED" }
    );
    all_ok
}
