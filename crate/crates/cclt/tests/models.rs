use cclt::core::{MomentProfile, PairCase};
use cclt::models::{
    Darts, EvenOdd11, MultiDarts, Pattern01, ScoreTable, Toy, TriangleWedge, Urn, WedgeEdge,
};
use cclt::moments::exact_moments;
use cclt::PairModel;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn profiles_agree(a: &MomentProfile, b: &MomentProfile, dim: usize, stay: bool) -> bool {
    let tol = 1e-12;
    let mut ok = close(a.m0_plus, b.m0_plus, tol) && close(a.m0_minus, b.m0_minus, tol);
    for i in 0..dim {
        ok &= close(a.m1_plus[i], b.m1_plus[i], tol)
            && close(a.m1_minus[i], b.m1_minus[i], tol)
            && (!stay || close(a.m1_stay[i], b.m1_stay[i], tol));
        for j in 0..dim {
            ok &= close(a.m2_plus[i][j], b.m2_plus[i][j], tol)
                && close(a.m2_minus[i][j], b.m2_minus[i][j], tol)
                && (!stay || close(a.m2_stay[i][j], b.m2_stay[i][j], tol));
        }
    }
    ok
}

/// Enumeration checks shared by every model: total mass, the count law,
/// standardisation of `W`, analytic moments and the conditional law of `W`.
fn check_model<M: PairModel>(m: &M) {
    let dim = m.dim();
    let law = m.count_law().clone();
    let mut mass = 0.0;
    let mut by_count = vec![0.0; law.pmf.len()];
    let mut first = vec![[0.0; 2]; law.pmf.len()];
    let mut second = vec![[[0.0; 2]; 2]; law.pmf.len()];
    let mut w_mean = [0.0; 2];
    let mut w_sq = [0.0; 2];
    let mut y_mean = 0.0;
    let mut analytic_checked = 0usize;
    let mut r0_gap: f64 = 0.0;
    let stay = matches!(m.contract().case, PairCase::Stay { .. });
    m.for_each_config(&mut |p, cfg| {
        mass += p;
        let c = m.count(cfg);
        let o = m.observe(cfg);
        by_count[c] += p;
        y_mean += p * o.y;
        for i in 0..dim {
            w_mean[i] += p * o.w[i];
            w_sq[i] += p * o.w[i] * o.w[i];
            first[c][i] += p * o.w[i];
            for j in 0..dim {
                second[c][i][j] += p * o.w[i] * o.w[j];
            }
        }
        let exact = exact_moments(m, cfg);
        if let Some(a) = m.analytic_moments(cfg) {
            assert!(profiles_agree(&a, &exact, dim, stay), "{}: {a:?} vs {exact:?}", m.name());
            analytic_checked += 1;
        }
        if m.contract().case == PairCase::Split {
            let q = m.constants().q;
            let d = m.declared_r0(cfg);
            r0_gap = r0_gap
                .max((exact.m0_plus - q - d[0]).abs())
                .max((exact.m0_minus - q - d[1]).abs());
        }
    })
    .unwrap();
    let name = m.name();
    assert!(close(mass, 1.0, 1e-12), "{name}: mass {mass}");
    for (c, &p) in law.pmf.iter().enumerate() {
        assert!((by_count[c] - p).abs() < 1e-12, "{name}: count {c}");
    }
    assert!(y_mean.abs() < 1e-10, "{name}: E Y = {y_mean}");
    for i in 0..dim {
        assert!(w_mean[i].abs() < 1e-10, "{name}: E W = {}", w_mean[i]);
        assert!(close(w_sq[i], 1.0, 1e-10), "{name}: E W^2 = {}", w_sq[i]);
    }
    if m.contract().analytic_moments {
        assert!(analytic_checked > 0, "{name} declares analytic moments");
    }
    assert!(r0_gap < 1e-12, "{name}: declared R0 off by {r0_gap}");
    for c in 0..law.pmf.len() {
        let Some(cm) = m.conditional_w(c) else { continue };
        let p = by_count[c];
        if p < 1e-300 {
            continue;
        }
        for i in 0..dim {
            let mean = first[c][i] / p;
            assert!(close(cm.mean[i], mean, 1e-9), "{name}: mean at count {c}");
            for j in 0..dim {
                let cov = second[c][i][j] / p - mean * first[c][j] / p;
                assert!(close(cm.cov[i][j], cov, 1e-9), "{name}: cov at count {c}: {} vs {cov}", cm.cov[i][j]);
            }
        }
    }
}

#[test]
fn pattern01_matches_enumeration() {
    for (n, p) in [(6, 0.5), (9, 0.3), (12, 0.65)] {
        check_model(&Pattern01::new(n, p).unwrap());
    }
}

#[test]
fn evenodd11_matches_enumeration() {
    for (n, p) in [(6, 0.5), (8, 0.3), (10, 0.7)] {
        check_model(&EvenOdd11::new(n, p).unwrap());
    }
}

#[test]
fn toy_matches_enumeration() {
    check_model(&Toy::alternating(6, 0.4, 0.5).unwrap());
    check_model(&Toy::new(0.5, vec![0.3, -0.1, -0.2, 0.0, 0.0]).unwrap());
}

#[test]
fn urn_matches_enumeration() {
    check_model(&Urn::new(7, 0.25, 0.4).unwrap());
}

#[test]
fn darts_match_enumeration() {
    check_model(&Darts::new(6, 0.5, ScoreTable::half_split(0.5)).unwrap());
    check_model(&MultiDarts::new(5).unwrap());
}

#[test]
fn graph_models_match_enumeration() {
    check_model(&WedgeEdge::new(5, 0.5).unwrap());
    check_model(&WedgeEdge::new(6, 0.3).unwrap());
    check_model(&TriangleWedge::new(5, 0.4).unwrap());
}

#[test]
fn enumeration_budgets_are_named() {
    let err = Pattern01::new(40, 0.5)
        .unwrap()
        .for_each_config(&mut |_, _| {})
        .unwrap_err();
    assert!(err.to_string().contains("sequence length"), "{err}");
    let err = WedgeEdge::new(12, 0.5).unwrap().for_each_config(&mut |_, _| {}).unwrap_err();
    assert!(err.to_string().contains("graph vertices"), "{err}");
}
