use std::f64::consts::PI;

use num_complex::Complex64;
use opalg::exact::{to_f64, Q};
use opalg::graphinv::*;
use opalg::series::{one_minus_pow, Series};

fn catalog(max_n: usize) -> Vec<(AdeFamily, usize, RootedBipartiteGraph)> {
    let mut out = Vec::new();
    for f in AdeFamily::ALL {
        let ns: Vec<usize> = if f.is_series() { (f.min_n()..=max_n).collect() } else { vec![0] };
        for n in ns {
            out.push((f, n, ade(f, n).unwrap()));
        }
    }
    out
}

#[test]
fn a2_t_series() {
    let t = t_series(&poincare(&ade(AdeFamily::A, 2).unwrap(), 20)).unwrap();
    let want = one_minus_pow(20, 2).div(&one_minus_pow(20, 3)).unwrap();
    assert_eq!(t, want);
}

#[test]
fn t_series_closed_forms() {
    for (f, n, g) in catalog(8) {
        let t = t_series(&poincare(&g, 24)).unwrap();
        let xi = ade_t_formula(f, n).unwrap();
        assert_eq!(t, xi.series(24), "{f}_{n}: {xi}");
    }
}

#[test]
fn spectral_moments_are_loop_counts() {
    for (f, n, g) in catalog(11) {
        let mu = spectral_measure(&g);
        assert!((mu.mass() - 1.0).abs() < 1e-9);
        for (k, c) in loop_counts(&g, 12).iter().enumerate() {
            let c = c.to_string().parse::<f64>().unwrap();
            assert!((mu.moment(k) - c).abs() < 1e-9 * c.max(1.0), "{f}_{n} k {k}");
        }
    }
    let a3 = spectral_measure(&ade(AdeFamily::A, 3).unwrap());
    assert_eq!(a3.atoms.len(), 2);
    for ((x, w), want) in a3.atoms.iter().zip([0.0, 2.0]) {
        assert_eq!(*x, want);
        assert!((w - 0.5).abs() < 1e-12);
    }
    assert_eq!(spectral_measure(&ade(AdeFamily::Atilde, 1).unwrap()).atoms, vec![(4.0, 1.0)]);
}

#[test]
fn circular_examples() {
    for n in 1..=3 {
        let eps = circular_measure(&ade(AdeFamily::Atilde, n).unwrap());
        assert_eq!(eps.atoms.len(), 2 * n);
        for (p, w) in &eps.atoms {
            assert!(matches!(p, CircPoint::Root { den, .. } if (2 * n as u64).is_multiple_of(*den)), "{p}");
            assert!((w - 1.0 / (2 * n) as f64).abs() < 1e-12);
        }
    }
    let a2 = circular_measure(&ade(AdeFamily::A, 2).unwrap());
    let want: Vec<(CircPoint, f64)> =
        [(1, 6), (1, 3), (2, 3), (5, 6)].iter().map(|&(a, b)| (CircPoint::root(a, b), 0.25)).collect();
    let mut got = a2.atoms.clone();
    got.sort_by(|x, y| format!("{}", x.0).cmp(&format!("{}", y.0)));
    let mut want_sorted = want.clone();
    want_sorted.sort_by(|x, y| format!("{}", x.0).cmp(&format!("{}", y.0)));
    assert_eq!(got.len(), 4);
    for ((p, w), (q, v)) in got.iter().zip(&want_sorted) {
        assert_eq!(p, q);
        assert!((w - v).abs() < 1e-12);
    }
    // the same measure as the density Re(1 − q²) against d_3
    let alpha3 = CircularMeasure::uniform(3).with_density(density(2));
    for k in 0..12 {
        assert!((alpha3.moment(k) - a2.moment(k)).norm() < 1e-12);
    }
    let a3 = circular_measure(&ade(AdeFamily::A, 3).unwrap());
    let at_i: f64 = a3.atoms.iter().filter(|(p, _)| matches!(p, CircPoint::Root { den: 4, .. })).map(|a| a.1).sum();
    assert!((at_i - 0.5).abs() < 1e-12);
}

#[test]
fn circular_series_identity() {
    for (f, n, g) in catalog(8) {
        let eps = circular_measure(&g);
        assert!(!eps.experimental);
        let t = t_series(&poincare(&g, 20)).unwrap();
        let rhs = &Series::one(20) + &(&t * &one_minus_pow(20, 1));
        for (k, x) in eps.stieltjes(20).iter().enumerate() {
            assert!((x - to_f64(&rhs.coeff(k))).abs() < 1e-9, "{f}_{n} k {k}");
        }
        for k in (1..12).step_by(2) {
            assert!(eps.moment(k).norm() < 1e-12);
        }
    }
}

#[test]
fn circular_closed_forms() {
    for (f, n, g) in catalog(8) {
        let eps = circular_measure(&g);
        let formula = ade_circular_formula(f, n).unwrap();
        assert!((formula.mass() - 1.0).abs() < 1e-12, "{f}_{n}");
        assert!(formula.atoms.iter().all(|a| a.1 > 0.0), "{f}_{n} has negative weights");
        for k in 0..=12 {
            let d: Complex64 = eps.moment(k) - formula.moment(k);
            assert!(d.norm() < 1e-9, "{f}_{n} moment {k}: {} vs {}", eps.moment(k), formula.moment(k));
        }
    }
}

#[test]
fn theta_positive_above_index_four() {
    for n in 3..=6 {
        let th = theta(&poincare(&bratteli_matrix_algebra(n), 20)).unwrap();
        assert!(th.coeffs().iter().all(|c| *c >= Q::from_integer(0.into())), "n {n}: {th}");
        let eps = circular_measure(&bratteli_matrix_algebra(n));
        assert!(eps.experimental);
    }
}

#[test]
fn norms() {
    for n in 2..=10 {
        let x = graph_norm(&ade(AdeFamily::A, n).unwrap()).powi(2);
        assert!((x - 4.0 * (PI / (n + 1) as f64).cos().powi(2)).abs() < 1e-9);
        assert!(admissible_index(x, 1e-9));
    }
    assert!(graph_norm(&ade(AdeFamily::E8, 0).unwrap()).powi(2) < 4.0 - 1e-6);
    assert!((graph_norm(&ade(AdeFamily::E8tilde, 0).unwrap()).powi(2) - 4.0).abs() < 1e-9);
    for n in 1..=3 {
        assert!((graph_norm(&ade(AdeFamily::Atilde, n).unwrap()) - 2.0).abs() < 1e-9);
    }
}

#[test]
fn jones_tower_norms() {
    for (a, m) in [(vec![1], vec![vec![2]]), (vec![1], vec![vec![1, 1]]), (vec![1, 1], vec![vec![1], vec![1]])] {
        for step in jones_tower(&a, &m, 5).unwrap() {
            assert!(step.report.markov && step.report.r_integer);
            assert!((step.product_norm - step.expected).abs() < 1e-9 * step.expected);
        }
    }
}

#[test]
fn json_round_trip() {
    let g = ade(AdeFamily::E6, 0).unwrap();
    let back = RootedBipartiteGraph::from_json(&g.to_json()).unwrap();
    assert_eq!(g, back);
    let v = serde_json::json!({"layerA": 1, "layerB": 2, "edges": [[0, 0, 1], [0, 1, 1]], "root": 0});
    assert_eq!(RootedBipartiteGraph::from_json(&v).unwrap().m, vec![vec![1, 1]]);
}
