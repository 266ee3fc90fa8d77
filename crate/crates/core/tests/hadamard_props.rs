use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use opalg::exact::{q, qf, Q};
use opalg::hadamard::*;
use opalg::partitions::{enumerate, PartitionClass};
use opalg::randmat::{CMatrix, GaussianStream};
use proptest::prelude::*;

fn samples() -> Vec<HadamardMatrix> {
    vec![fourier(&[2]).unwrap(), fourier(&[3]).unwrap(), fourier(&[2, 2]).unwrap()]
}

fn random_phases(g: usize, h: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut s = GaussianStream::new(seed, 0);
    (0..g).map(|_| (0..h).map(|_| Complex64::from_polar(1.0, 2.0 * PI * s.uniform())).collect()).collect()
}

#[test]
fn fourier_layout() {
    let f = fourier(&[2, 2]).unwrap();
    let m = f.to_cmatrix();
    for i in 0..4 {
        for j in 0..4 {
            let z = m[(i, j)];
            assert!((z.re.abs() - 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }
    let f2 = fourier(&[2]).unwrap();
    assert_eq!(f2.tensor(&f2).unwrap().to_cmatrix(), m);
    let f3 = fourier(&[3]).unwrap();
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    assert!((f3.entry(1, 2) - w * w).norm() < 1e-12);
}

#[test]
fn dita_deformations() {
    let f2 = fourier(&[2]).unwrap();
    let plain = dita_deform(&f2, &f2, &vec![vec![Complex64::new(1.0, 0.0); 2]; 2]).unwrap();
    assert!((plain.to_cmatrix() - fourier(&[2, 2]).unwrap().to_cmatrix()).norm() < 1e-12);
    for seed in 0..5 {
        assert!(dita_deform(&f2, &fourier(&[3]).unwrap(), &random_phases(2, 3, seed)).is_ok());
    }
    let mut q = random_phases(2, 2, 9);
    q[1][0] *= 2.0;
    assert!(dita_deform(&f2, &f2, &q).is_err());
}

#[test]
fn magic_unitaries() {
    for h in samples() {
        let mu = magic_unitary(&h).unwrap();
        assert!(mu.defect() < 1e-12);
        let ones = CMatrix::from_element(h.n, h.n, Complex64::new(1.0 / h.n as f64, 0.0));
        for i in 0..h.n {
            assert!((mu.get(i, i) - &ones).norm() < 1e-12);
        }
    }
    // circulant for F_N
    let mu = magic_unitary(&fourier(&[3]).unwrap()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((mu.get(i, j) - mu.get((i + 1) % 3, (j + 1) % 3)).norm() < 1e-12);
        }
    }
}

#[test]
fn commuting_squares() {
    for h in samples() {
        assert!(commuting_square_check(&h).unwrap().passes, "{}", h.provenance);
    }
    let dita = dita_deform(&fourier(&[2]).unwrap(), &fourier(&[2]).unwrap(), &random_phases(2, 2, 3)).unwrap();
    assert!(commuting_square_check(&dita).unwrap().passes);
    let (c, s) = ((PI / 5.0).cos(), (PI / 5.0).sin());
    let rot = CMatrix::from_row_slice(2, 2, &[c, -s, s, c].map(|x| Complex64::new(x, 0.0)));
    assert!(!commuting_square_check_unitary(&rot).passes);
}

#[test]
fn profile_diagonal_is_real() {
    let dita = dita_deform(&fourier(&[2]).unwrap(), &fourier(&[3]).unwrap(), &random_phases(2, 3, 5)).unwrap();
    let g = ProfileTensor::new(&dita);
    for i in 0..6 {
        for a in 0..6 {
            assert!(g.get(i, a, i, a).im.abs() < 1e-12);
        }
    }
}

#[test]
fn planar_dims_of_fourier_matrices() {
    for n in [2u64, 3] {
        let f = fourier(&[n]).unwrap();
        assert_eq!(planar_dim(&f, 0).unwrap(), 1);
        for k in 1..=3 {
            // free translation orbits on Z_N^k
            let want = (n as usize).pow(k as u32 - 1);
            assert_eq!(planar_dim(&f, k).unwrap(), want, "F_{n} k {k}");
            assert_eq!(intertwiner_dim_with(&f, 0, k, Arithmetic::Float).unwrap(), want);
            assert_eq!(fixed_space_dim(&f, k).unwrap(), want);
        }
    }
}

#[test]
fn planar_dim_one_for_deformations() {
    let dita = dita_deform(&fourier(&[2]).unwrap(), &fourier(&[2]).unwrap(), &random_phases(2, 2, 1)).unwrap();
    assert_eq!(planar_dim(&dita, 1).unwrap(), 1);
    assert_eq!(fixed_space_dim(&dita, 1).unwrap(), 1);
    assert_eq!(planar_dim(&dita, 2).unwrap(), fixed_space_dim(&dita, 2).unwrap());
}

#[test]
fn intertwiners_between_tensor_powers() {
    let f = fourier(&[2]).unwrap();
    // Hom(u, u) for the group Z_2 ⊂ S_2: the commutant of the regular representation
    assert_eq!(intertwiner_dim(&f, 1, 1).unwrap(), 2);
    assert_eq!(intertwiner_dim(&f, 1, 1).unwrap(), intertwiner_dim_with(&f, 1, 1, Arithmetic::Float).unwrap());
    assert_eq!(intertwiner_dim(&f, 1, 2).unwrap(), planar_dim(&f, 3).unwrap());
}

#[test]
fn product_property() {
    for (m, n) in [(2u64, 2u64), (2, 3)] {
        let prod = fourier(&[m, n]).unwrap();
        for k in 0..=2 {
            let lhs = planar_dim(&prod, k).unwrap();
            let rhs = planar_dim(&fourier(&[m]).unwrap(), k).unwrap() * planar_dim(&fourier(&[n]).unwrap(), k).unwrap();
            assert_eq!(lhs, rhs, "F_{m}⊗F_{n} k {k}");
        }
    }
}

#[test]
fn size_guard() {
    assert!(matches!(planar_dim(&fourier(&[11]).unwrap(), 2), Err(opalg::Error::SizeGuard { .. })));
}

#[test]
fn cesaro_limits() {
    for h in samples() {
        for p in 1..=2 {
            let c = cesaro_haar(&h, p, 200).unwrap();
            assert_eq!(c.rank, planar_dim(&h, p).unwrap(), "{} p {p}", h.provenance);
            assert!(c.idempotence_defect < 1e-6);
        }
    }
    let f2 = fourier(&[2]).unwrap();
    let one = cesaro_haar(&f2, 2, 1).unwrap();
    let mu = magic_unitary(&f2).unwrap();
    let direct = (mu.get(0, 1) * mu.get(0, 0)).trace() / 2.0;
    assert!((one.matrix[(0, 2)] - direct).norm() < 1e-12);
    assert_eq!(cesaro_haar(&fourier(&[3]).unwrap(), 2, 100).unwrap().rank, 3);
}

#[test]
fn kesten_small_values() {
    for m in 1..=4 {
        for n in 1..=4 {
            assert_eq!(kesten_moment(m, n, 1).unwrap(), q(1));
            assert_eq!(kesten_moment(m, n, 2).unwrap(), q((m + n - 1) as i64));
        }
    }
    for n in 1..=4 {
        for p in 1..=4 {
            assert_eq!(kesten_moment(2, n, p).unwrap(), blowup_m2(n, p).unwrap(), "N {n} p {p}");
        }
    }
    assert!(kesten_moment(100, 100, 5).is_err());
}

#[test]
fn kesten_is_deterministic_across_threads() {
    let run = |t: usize| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| kesten_moment(3, 2, 4).unwrap());
    assert_eq!(run(1), run(3));
}

#[test]
fn kesten_hankel_forms() {
    for m in 1..=3 {
        for n in 1..=3 {
            let mut moments = vec![q(1)];
            moments.extend((1..=4).map(|p| kesten_moment(m, n, p).unwrap()));
            assert!(hankel_psd(&moments), "({m}, {n})");
        }
    }
    assert!(!hankel_psd(&[q(1), q(0), q(-1)]));
}

#[test]
fn gram_law_agrees_with_enumeration() {
    for (m, n, p) in [(3, 4, 2), (2, 3, 3), (2, 2, 4)] {
        let e = gram_law_mc(m, n, p, 4000, 42).unwrap();
        let exact = opalg::exact::to_f64(&kesten_moment(m, n, p).unwrap());
        assert!(e.agrees(Complex64::new(exact, 0.0), 3.0), "({m},{n},{p}): {e:?} vs {exact}");
    }
    let e = gram_law_mc(3, 4, 1, 100, 42).unwrap();
    assert!((e.mean.re - 1.0).abs() < 1e-12);
    assert!(gram_law_mc(3, 4, 2, 0, 42).is_err());
}

#[test]
fn narayana_counts() {
    for p in 1..=8 {
        let parts = enumerate(PartitionClass::NC, p, None).unwrap();
        for r in 1..=p {
            let c = parts.iter().filter(|x| x.block_count() == r).count();
            assert_eq!(narayana(p, r), BigInt::from(c));
        }
    }
    assert_eq!(narayana(4, 2), BigInt::from(6));
}

#[test]
fn asymptotics() {
    for (p, c) in [(1, 1), (2, 2), (3, 5), (4, 14)] {
        assert_eq!(asymptotic_moments(&q(1), &q(1), p).unwrap(), q(c));
    }
    assert_eq!(asymptotic_moments(&qf(1, 2), &q(3), 2).unwrap(), qf(7, 2));
    for p in 2..=3 {
        let rep = convergence_check(&q(1), &q(1), p, &[1, 2, 3]).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.gaps_decrease(), "p {p}: {rep:?}");
    }
    let rep = convergence_check(&qf(1, 2), &q(1), 2, &[1, 2, 4]).unwrap();
    assert_eq!(rep.rows.len(), 2);
    assert_eq!(rep.skipped.len(), 1);
}

#[test]
fn file_formats() {
    let f = fourier(&[3]).unwrap();
    assert_eq!(HadamardMatrix::from_json(&f.to_json()).unwrap().entries, f.entries);
    let back = HadamardMatrix::from_csv(&f.to_csv()).unwrap();
    assert!((back.to_cmatrix() - f.to_cmatrix()).norm() < 1e-12);
    assert!(HadamardMatrix::from_json(&serde_json::json!({"order": 2, "exponents": [[0, 0], [0, 0]]})).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deformed_matrices_give_magic_unitaries(seed in 0u64..1000, g in 2u64..4, h in 2u64..4) {
        let d = dita_deform(&fourier(&[g]).unwrap(), &fourier(&[h]).unwrap(), &random_phases(g as usize, h as usize, seed)).unwrap();
        prop_assert!(magic_unitary(&d).unwrap().defect() < 1e-9);
        prop_assert!(commuting_square_check(&d).unwrap().passes);
    }

    #[test]
    fn kesten_second_moment(m in 1usize..6, n in 1usize..6) {
        prop_assert_eq!(kesten_moment(m, n, 2).unwrap(), Q::from_integer(BigInt::from(m + n - 1)));
    }
}
