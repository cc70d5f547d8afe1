use qtherm_core::deformation::transform;
use qtherm_core::maxent::{
    solve_gibbs, solve_maxent, solve_maxent_renyi, solve_maxent_shannon_limit, Constraint, MaxEntProblem,
    MaxEntSolution,
};
use qtherm_core::{DeformParam, EnergySpectrum, Error, ScaleFactor};

fn problem(levels: &[f64], q: f64, alpha: f64, omega: f64) -> MaxEntProblem {
    MaxEntProblem::new(
        EnergySpectrum::new(levels.to_vec()).unwrap(),
        DeformParam::new(q).unwrap(),
        ScaleFactor::new(alpha).unwrap(),
        Constraint::Omega(omega),
    )
    .unwrap()
}

fn escort_mean(p: &[f64], e: &[f64], q: f64) -> f64 {
    let w: Vec<f64> = p.iter().map(|x| x.powf(q)).collect();
    let z: f64 = w.iter().sum();
    w.iter().zip(e).map(|(w, e)| w * e).sum::<f64>() / z
}

fn tsallis(p: &[f64], q: f64) -> f64 {
    (p.iter().map(|x| x.powf(q)).sum::<f64>() - 1.0) / (1.0 - q)
}

/// Maximizes `S_{q_alpha}` over the 2-simplex with the escort mean pinned,
/// by a dense scan over `p_0` (with `p_1` found by bisection on the
/// constraint) followed by golden-section refinement.
fn simplex_oracle(e: &[f64; 3], q: f64, q_alpha: f64, target: f64) -> [f64; 3] {
    let point = |p0: f64| -> Option<[f64; 3]> {
        let rest = 1.0 - p0;
        let g = |p1: f64| escort_mean(&[p0, p1, rest - p1], e, q) - target;
        let (mut lo, mut hi) = (1e-15, rest - 1e-15);
        let glo = g(lo);
        if glo.signum() == g(hi).signum() {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == glo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p1 = 0.5 * (lo + hi);
        Some([p0, p1, rest - p1])
    };
    let score = |p0: f64| point(p0).map_or(f64::NEG_INFINITY, |p| tsallis(&p, q_alpha));
    let n = 4000;
    let h = 1.0 / n as f64;
    let best = (1..n).map(|i| i as f64 * h).max_by(|x, y| score(*x).total_cmp(&score(*y))).unwrap();
    let (mut lo, mut hi) = ((best - h).max(1e-12), (best + h).min(1.0 - 1e-12));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let m1 = hi - ratio * (hi - lo);
        let m2 = lo + ratio * (hi - lo);
        if score(m1) < score(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    point(0.5 * (lo + hi)).unwrap()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn simplex_oracle_agreement() {
    let e = [0.0, 1.0, 2.0];
    for (q, alpha) in [(1.2, 2.0), (0.8, 2.0), (1.2, 0.5)] {
        let s = solve_maxent(&problem(&e, q, alpha, 0.3)).unwrap();
        assert!(s.stationarity_residual < 1e-8);
        let qa = transform(DeformParam::new(q).unwrap(), ScaleFactor::new(alpha).unwrap()).unwrap().value();
        let oracle = simplex_oracle(&e, q, qa, s.escort_mean);
        let gap = max_gap(s.probs.probs(), &oracle);
        assert!(gap <= 1e-4, "q={q} alpha={alpha}: {:?} vs {oracle:?}", s.probs.probs());
    }
}

/// Residual of the least-squares line through `(E_i, p_i^(1-q))`.
fn affine_fit_residual(e: &[f64], s: &MaxEntSolution, q: f64) -> f64 {
    let y: Vec<f64> = s.probs.probs().iter().map(|p| p.powf(1.0 - q)).collect();
    let n = e.len() as f64;
    let (mx, my) = (e.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = e.iter().zip(&y).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = e.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    e.iter().zip(&y).map(|(x, y)| (y - my - slope * (x - mx)).abs()).fold(0.0, f64::max)
}

#[test]
fn alpha_one_is_q_exponential_family() {
    let e = [0.0, 0.4, 1.1, 1.5, 2.0];
    for q in [0.8, 1.2] {
        let t = solve_maxent(&problem(&e, q, 1.0, 0.5)).unwrap();
        assert!(affine_fit_residual(&e, &t, q) <= 1e-8);
        let r = solve_maxent_renyi(&problem(&e, q, 1.0, 0.5)).unwrap();
        assert!(affine_fit_residual(&e, &r, q) <= 1e-8);
    }
}

#[test]
fn renyi_agrees_with_tsallis_to_first_order() {
    let e = [0.0, 1.0, 2.0];
    let gaps: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&w| {
            let t = solve_maxent(&problem(&e, 1.2, 2.0, w)).unwrap();
            let r = solve_maxent_renyi(&problem(&e, 1.2, 2.0, w)).unwrap();
            max_gap(t.probs.probs(), r.probs.probs())
        })
        .collect();
    for pair in gaps.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(ratio > 1.7, "{gaps:?}");
    }
}

#[test]
fn shannon_limit_matches_gibbs_near_one() {
    let sp = EnergySpectrum::new(vec![0.0, 0.5, 1.3, 2.0, 2.2]).unwrap();
    for omega in [-0.5, 0.3, 1.2] {
        let g = solve_gibbs(&sp, DeformParam::ONE, omega).unwrap();
        for d in [1e-7, -1e-7] {
            let s = solve_maxent_shannon_limit(&sp, DeformParam::from_offset(d).unwrap(), &Constraint::Omega(omega))
                .unwrap();
            assert!(max_gap(s.probs.probs(), g.probs.probs()) <= 1e-6);
        }
    }
}

#[test]
fn residuals_on_three_and_five_levels() {
    for e in [&[0.0, 1.0, 2.0][..], &[0.0, 0.3, 1.0, 1.7, 2.0][..]] {
        for q in [0.8, 1.2] {
            for alpha in [0.5, 1.0, 2.0] {
                for omega in [-0.4, 0.2, 0.6] {
                    match solve_maxent(&problem(e, q, alpha, omega)) {
                        Ok(s) => assert!(s.stationarity_residual <= 1e-8),
                        Err(err) => assert!(err.is_solver_failure(), "{err}"),
                    }
                }
            }
        }
    }
}

#[test]
fn target_mean_round_trip() {
    let pr = MaxEntProblem::new(
        EnergySpectrum::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
        DeformParam::new(0.8).unwrap(),
        ScaleFactor::new(2.0).unwrap(),
        Constraint::target_mean(1.1),
    )
    .unwrap();
    let s = solve_maxent(&pr).unwrap();
    assert!((s.escort_mean - 1.1).abs() < 1e-10);
    assert!(s.omega > 0.0);
}

#[test]
fn no_real_root_is_reported() {
    let err = solve_maxent(&problem(&[0.0, 1.0, 2.0], 1.2, 2.0, 100.0)).unwrap_err();
    assert!(matches!(err, Error::NoRealRoot { level: Some(_), .. }));
    assert!(err.is_solver_failure());
}
