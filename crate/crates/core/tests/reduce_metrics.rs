mod common;

use common::{gaussian, isp, well_conditioned_sss};
use crossgram::benchmark::SeededRng;
use crossgram::gramian::cross_gramian_sylvester;
use crossgram::metrics::{
    h2_approx_balanced, hinf_sampled, hinf_sss, lebesgue_errors, lebesgue_norms, log_frequencies,
};
use crossgram::reduce::{build_projection, reduce_with, truncate, ProjectionKind};
use crossgram::system::{simulate, transfer_function, Input, Substeps, TimeGrid};
use crossgram::Matrix;
use num_complex::Complex64;

#[test]
fn full_order_rom_matches_transfer_function() {
    let sys = isp(12, 2, 0.5, 5.0, 3);
    let w = cross_gramian_sylvester(&sys).unwrap().w;
    for kind in ProjectionKind::ALL {
        let p = build_projection(&w, kind).unwrap();
        let rom = reduce_with(&sys, &p, 12).unwrap();
        for s in [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 10.0)] {
            let g = transfer_function(&sys, s).unwrap();
            let g_r = transfer_function(&rom.sys, s).unwrap();
            assert!(g.sub(&g_r).max_abs() <= 1e-8 * g.max_abs(), "{} at {s}", kind.name());
        }
    }
}

#[test]
fn truncated_projections_are_biorthogonal() {
    let sys = well_conditioned_sss(20, 1, 4);
    let w = cross_gramian_sylvester(&sys).unwrap().w;
    for kind in ProjectionKind::ALL {
        let p = build_projection(&w, kind).unwrap();
        for n in [1, 5, 20] {
            // Singular vectors of numerically zero singular values pair up with arbitrary signs.
            if kind == ProjectionKind::SvdApprox && p.scores[n - 1] < 1e-10 * p.scores[0] {
                continue;
            }
            let (r, s) = truncate(&p, n).unwrap();
            let defect = (&r.matmul(&s) - &Matrix::identity(n)).frobenius_norm();
            assert!(defect <= 1e-8, "{} n={n}: {defect}", kind.name());
        }
    }
}

#[test]
fn svd_and_evd_projections_agree_for_symmetric_systems() {
    let sys = isp(16, 2, 0.5, 5.0, 7);
    let w = cross_gramian_sylvester(&sys).unwrap().w;
    let grid = TimeGrid::new(0.01, 100).unwrap();
    let mut rng = SeededRng::new(1);
    let u = Matrix::from_fn(100, 2, |_, _| rng.gaussian());
    let (_, y) = simulate(&sys, &[0.0; 16], Input::Held(&u), &grid).unwrap();
    let evd = build_projection(&w, ProjectionKind::EvdBalancing).unwrap();
    let svd = build_projection(&w, ProjectionKind::SvdApprox).unwrap();
    let scale = lebesgue_norms(&y).l2;
    for n in 1..16 {
        let y_e = simulate(&reduce_with(&sys, &evd, n).unwrap().sys, &vec![0.0; n], Input::Held(&u), &grid).unwrap().1;
        let y_s = simulate(&reduce_with(&sys, &svd, n).unwrap().sys, &vec![0.0; n], Input::Held(&u), &grid).unwrap().1;
        let e = lebesgue_errors(&y, &y_e).unwrap().l2;
        let s = lebesgue_errors(&y, &y_s).unwrap().l2;
        assert!((e - s).abs() <= 1e-8 * scale, "n={n}: {e} vs {s}");
    }
}

#[test]
fn norm_sanity_bounds() {
    let grid = TimeGrid::new(0.02, 50).unwrap();
    for seed in 0..10 {
        let y = crossgram::system::Trajectory::new(grid, gaussian(51, 3, seed)).unwrap();
        let n = lebesgue_norms(&y);
        let t = grid.horizon();
        let q = 3.0f64;
        assert!(n.l1 >= 0.0 && n.l2 >= 0.0 && n.linf >= 0.0);
        assert!(n.l2 <= t.sqrt() * q.sqrt() * n.linf + 1e-12);
        assert!(n.l1 <= (q * t).sqrt() * n.l2 + 1e-12);
        assert_eq!(lebesgue_errors(&y, &y).unwrap().l2, 0.0);
    }
}

#[test]
fn error_estimates_decrease_with_order() {
    let sys = well_conditioned_sss(25, 1, 11);
    let w = cross_gramian_sylvester(&sys).unwrap().w;
    let p = build_projection(&w, ProjectionKind::EvdBalancing).unwrap();
    let b = p.reducing.matmul(sys.b());
    let c = sys.c().matmul(&p.reconstructing);
    let w_diag = p.reducing.matmul(&w).matmul(&p.reconstructing).diagonal();
    let h2_ref = h2_approx_balanced(&w_diag, &b, &c, 0).unwrap();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for n in 0..=25 {
        let h2 = h2_approx_balanced(&w_diag, &b, &c, n).unwrap();
        let hinf = hinf_sss(&p.scores, n).unwrap();
        // The square root turns rounding in the trace into noise of order 1e-8 relative.
        assert!(h2 <= last.0 + 1e-7 * h2_ref && hinf <= last.1, "n={n}");
        last = (h2, hinf);
    }
    assert_eq!(last, (0.0, 0.0));
}

#[test]
fn sampled_hinf_is_bounded_by_tail_sum() {
    let sys = well_conditioned_sss(20, 1, 2);
    let w = cross_gramian_sylvester(&sys).unwrap().w;
    let p = build_projection(&w, ProjectionKind::EvdBalancing).unwrap();
    let omegas = log_frequencies(1e-3, 1e3, 200);
    for n in [1, 4, 10] {
        let rom = reduce_with(&sys, &p, n).unwrap();
        let sampled = hinf_sampled(&sys, &rom.sys, &omegas).unwrap().value;
        let bound = hinf_sss(&p.scores, n).unwrap();
        assert!(sampled <= bound * (1.0 + 1e-8), "n={n}: {sampled} > {bound}");
        assert!((sampled - bound).abs() <= 0.02 * bound, "n={n}: {sampled} vs {bound}");
    }
}

#[test]
fn substeps_do_not_change_exactly_resolved_outputs() {
    let sys = isp(8, 1, 0.5, 5.0, 1);
    let u = gaussian(40, 1, 9);
    let coarse = TimeGrid::new(0.01, 40).unwrap().with_substeps(Substeps::Fixed(1));
    let fine = coarse.with_substeps(Substeps::Fixed(8));
    let y1 = simulate(&sys, &[0.0; 8], Input::Held(&u), &coarse).unwrap().1;
    let y8 = simulate(&sys, &[0.0; 8], Input::Held(&u), &fine).unwrap().1;
    let e = lebesgue_errors(&y1, &y8).unwrap().l2 / lebesgue_norms(&y8).l2;
    assert!(e <= 1e-6, "{e}");
}
