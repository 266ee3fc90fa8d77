use num_complex::Complex64;
use opalg::exact::to_f64;
use opalg::partitions::{enumerate, Color, ColoredWord, PartitionClass};
use opalg::randmat::*;
use opalg::weingarten::{integrate, EasyCategory};

fn letters(word: &[(usize, usize, bool)]) -> Vec<Letter> {
    word.iter().map(|&(i, j, conj)| Letter { i, j, conj }).collect()
}

fn exact_integral(group: HaarGroup, n: u64, word: &[Letter]) -> Complex64 {
    let rows: Vec<usize> = word.iter().map(|l| l.i).collect();
    let cols: Vec<usize> = word.iter().map(|l| l.j).collect();
    let value = match group {
        HaarGroup::Orthogonal => integrate(&EasyCategory::new(PartitionClass::P2), n, &rows, &cols, None),
        HaarGroup::Unitary => {
            let colors = ColoredWord(word.iter().map(|l| if l.conj { Color::Black } else { Color::White }).collect());
            integrate(&EasyCategory::new(PartitionClass::MatchedP2), n, &rows, &cols, Some(&colors))
        }
    };
    Complex64::new(to_f64(&value.unwrap()), 0.0)
}

fn nc_moment(k: usize, t: f64) -> f64 {
    enumerate(PartitionClass::NC, k, None).unwrap().iter().map(|p| t.powi(p.block_count() as i32)).sum()
}

#[test]
fn wigner_and_wishart_moments() {
    let w = empirical_moments(&EnsembleSpec::new(Ensemble::Wigner, 200).samples(100), 4).unwrap();
    assert!((w[1] - 1.0).abs() < 0.05, "{w:?}");
    assert!((w[3] - 2.0).abs() < 0.07 * 2.0, "{w:?}");
    let s = empirical_moments(&EnsembleSpec::new(Ensemble::Wishart, 200).samples(100), 2).unwrap();
    assert!((s[0] - 1.0).abs() < 0.05, "{s:?}");
    assert!((s[1] - 2.0).abs() < 0.07 * 2.0, "{s:?}");
}

#[test]
fn wishart_rectangular_matches_free_poisson() {
    let n = 200;
    let m = empirical_moments(&EnsembleSpec::new(Ensemble::Wishart, n).m(2 * n).samples(20), 4).unwrap();
    for (k, x) in m.iter().enumerate() {
        let want = nc_moment(k + 1, 2.0);
        assert!((x - want).abs() < 0.07 * want, "k {} {x} vs {want}", k + 1);
    }
}

#[test]
fn non_uniform_colored_word_vanishes() {
    let spec = EnsembleSpec::new(Ensemble::ComplexGaussian, 100).samples(20);
    let z = empirical_colored_moment(&spec, &"oo".parse().unwrap()).unwrap();
    assert!(z.norm() < 0.05, "{z}");
    let z = empirical_colored_moment(&spec, &"ox".parse().unwrap()).unwrap();
    assert!((z.re - 1.0).abs() < 0.05, "{z}");
}

#[test]
fn wigner_spectrum_stays_near_support() {
    let spec = EnsembleSpec::new(Ensemble::Wigner, 200).samples(1);
    let mu = pooled_spectrum(&spec).unwrap();
    assert_eq!(mu.points.len(), 200);
    assert!(mu.mass_outside(-2.2, 2.2) < 0.02);
    let total: usize = mu.histogram(20, -2.5, 2.5).iter().map(|b| b.2).sum();
    assert_eq!(total, 200);
}

#[test]
fn wigner_gap_shrinks_with_n() {
    // recorded tolerance for sampling noise at these sizes
    let tol = 0.01;
    let gaps: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&n| {
            let m = empirical_moments(&EnsembleSpec::new(Ensemble::Wigner, n).samples(40), 6).unwrap();
            [(1, 1.0), (3, 2.0), (5, 5.0)].iter().map(|&(i, c)| (m[i] - c).abs() / c).fold(0.0, f64::max)
        })
        .collect();
    assert!(gaps[1] <= gaps[0] + tol && gaps[2] <= gaps[1] + tol, "{gaps:?}");
}

#[test]
fn sampling_is_independent_of_thread_count() {
    let spec = EnsembleSpec::new(Ensemble::Wishart, 30).m(20).samples(16).seed(7);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| empirical_moments(&spec, 3).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}

#[test]
fn haar_examples() {
    let e = haar_word_integral_mc(HaarGroup::Orthogonal, 5, &letters(&[(1, 1, false), (1, 1, false)]), 100_000, 42).unwrap();
    assert!(e.agrees(Complex64::new(0.2, 0.0), 3.0), "{e:?}");
    let e = haar_word_integral_mc(HaarGroup::Orthogonal, 5, &letters(&[(1, 1, false)]), 100_000, 42).unwrap();
    assert!(e.agrees(Complex64::new(0.0, 0.0), 3.0), "{e:?}");
    let e = haar_word_integral_mc(HaarGroup::Unitary, 3, &letters(&[(1, 1, false), (1, 1, true)]), 100_000, 42).unwrap();
    assert!(e.agrees(Complex64::new(1.0 / 3.0, 0.0), 3.0), "{e:?}");
}

#[test]
fn haar_words_match_weingarten() {
    let words: Vec<Vec<(usize, usize, bool)>> = vec![
        vec![(1, 2, false), (1, 2, false)],
        vec![(1, 1, false), (2, 2, false)],
        vec![(1, 2, false), (2, 1, false)],
        vec![(1, 1, false), (1, 2, false), (2, 1, false)],
        vec![(1, 1, false); 4],
        vec![(1, 1, false), (1, 1, false), (2, 2, false), (2, 2, false)],
        vec![(1, 1, false), (1, 2, false), (2, 1, false), (2, 2, false)],
        vec![(1, 1, false), (1, 1, false), (1, 2, false), (1, 2, false)],
        vec![(1, 1, false), (2, 2, false), (3, 3, false), (4, 4, false)],
        vec![(1, 2, false), (2, 3, false), (3, 1, false), (4, 4, false)],
    ];
    for w in &words {
        let l = letters(w);
        let exact = exact_integral(HaarGroup::Orthogonal, 5, &l);
        let e = haar_word_integral_mc(HaarGroup::Orthogonal, 5, &l, 100_000, 42).unwrap();
        assert!(e.agrees(exact, 3.0), "{w:?}: {e:?} vs {exact}");
    }
    let unitary: Vec<Vec<(usize, usize, bool)>> = vec![
        vec![(1, 1, false), (1, 1, true), (1, 1, false), (1, 1, true)],
        vec![(1, 1, false), (2, 2, false), (1, 1, true), (2, 2, true)],
        vec![(1, 1, false), (2, 2, false), (1, 2, true), (2, 1, true)],
        vec![(1, 1, false), (1, 1, false)],
    ];
    for w in &unitary {
        let l = letters(w);
        let exact = exact_integral(HaarGroup::Unitary, 4, &l);
        let e = haar_word_integral_mc(HaarGroup::Unitary, 4, &l, 50_000, 42).unwrap();
        assert!(e.agrees(exact, 3.0), "{w:?}: {e:?} vs {exact}");
    }
}
