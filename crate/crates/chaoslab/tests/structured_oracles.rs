//! Oracle tests for the structured operators: every fast path (FFT apply,
//! adjoint, indexed columns) is compared against a direct definition-level
//! computation.

use chaoslab::samplers::{AlphaShape, SamplerSpec, SourceKind};
use chaoslab::stream::RngStream;
use chaoslab::structured::{
    build_vx_circulant, build_vx_gabor, circular_convolve, read_dense_csv, time_frequency_shift,
    write_dense_csv, EnsembleSpec, GaborOp, GaborSpec, MeasurementOp, PartialCirculantOp,
    PartialCirculantSpec,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

fn gaussian_spec() -> SamplerSpec {
    SamplerSpec::new(
        SourceKind::SymmetricWeibull,
        AlphaShape::new(2.0).unwrap(),
        true,
    )
}

fn standardized(n: usize, stream: &RngStream) -> DVector<f64> {
    DVector::from_vec(gaussian_spec().sample(n, stream))
}

/// Definition-level cyclic convolution in O(n²).
fn naive_convolve(z: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(n, |j, _| {
        (0..n).map(|k| z[(j + n - k) % n] * x[k]).sum()
    })
}

#[test]
fn fft_convolution_matches_naive_all_small_sizes() {
    let root = RngStream::new(101).child("conv-small");
    for n in 1..=64usize {
        let s = root.child(n);
        let z = standardized(n, &s.child("z"));
        let x = standardized(n, &s.child("x"));
        let fast = circular_convolve(&z, &x).unwrap();
        let slow = naive_convolve(&z, &x);
        let err = (&fast - &slow).amax();
        assert!(err <= 1e-9, "n={n}: max abs error {err:.3e}");
    }
}

#[test]
fn fft_convolution_matches_naive_large_sizes() {
    let root = RngStream::new(102).child("conv-large");
    for &n in &[128usize, 1024, 4096] {
        // A couple of fresh random pairs per size keeps this test quick; the
        // acceptance suite runs the full hundred-pair sweep.
        for case in 0..3u64 {
            let s = root.child(n).child(case);
            let z = standardized(n, &s.child("z"));
            let x = standardized(n, &s.child("x"));
            let fast = circular_convolve(&z, &x).unwrap();
            let slow = naive_convolve(&z, &x);
            let err = (&fast - &slow).amax();
            assert!(err <= 1e-9, "n={n} case={case}: max abs error {err:.3e}");
        }
    }
}

#[test]
fn circulant_apply_adjoint_and_columns_match_dense() {
    let root = RngStream::new(103).child("circ");
    let n = 37;
    let m = 11;
    let spec = PartialCirculantSpec::random(n, m, &root.child("omega")).unwrap();
    let z = standardized(n, &root.child("z"));
    let op = PartialCirculantOp::new(z.clone(), spec.clone()).unwrap();

    // Dense reference built straight from the definition.
    let scale = 1.0 / (m as f64).sqrt();
    let dense = DMatrix::from_fn(m, n, |i, k| {
        scale * z[(spec.omega[i] + n - k) % n]
    });

    let x = standardized(n, &root.child("x"));
    let y = standardized(m, &root.child("y"));
    let fast = op.apply(&x).unwrap();
    let slow = &dense * &x;
    assert!((&fast - &slow).amax() <= 1e-10 * slow.amax().max(1.0));

    let fast_adj = op.adjoint(&y).unwrap();
    let slow_adj = dense.transpose() * &y;
    assert!((&fast_adj - &slow_adj).amax() <= 1e-10 * slow_adj.amax().max(1.0));

    // ⟨Φx, y⟩ = ⟨x, Φᵀy⟩ through the fast paths only.
    let lhs = fast.dot(&y);
    let rhs = x.dot(&fast_adj);
    assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));

    for j in [0usize, 1, n / 2, n - 1] {
        let col = op.column(j);
        let want = dense.column(j).into_owned();
        assert!((&col - &want).amax() <= 1e-12);
    }

    assert_eq!(op.to_dense().shape(), (m, n));
    assert!((op.to_dense() - &dense).amax() <= 1e-10);
}

#[test]
fn gabor_apply_matches_column_synthesis() {
    let root = RngStream::new(104).child("gabor");
    for &m in &[4usize, 8, 9, 16] {
        let s = root.child(m);
        let eta = standardized(m, &s.child("eta"));
        let op = GaborOp::from_real_generator(&eta).unwrap();
        let n = m * m;
        let xr = standardized(n, &s.child("xr"));
        let xi = standardized(n, &s.child("xi"));
        let x = DVector::from_fn(n, |j, _| Complex::new(xr[j], xi[j]));

        // Naive synthesis: y = Σ_λ x_λ π(λ)h via the O(m) column formula.
        let mut slow = DVector::<Complex<f64>>::zeros(m);
        for lambda in 0..n {
            slow += op.column(lambda) * x[lambda];
        }
        let fast = op.apply(&x).unwrap();
        let err = (&fast - &slow).map(|c| c.norm()).max();
        let scale = slow.map(|c| c.norm()).max().max(1.0);
        assert!(err <= 1e-10 * scale, "m={m}: apply error {err:.3e}");

        // Adjoint identity ⟨Ψx, y⟩ = ⟨x, Ψ*y⟩ (conjugate-linear in the 1st slot).
        let yr = standardized(m, &s.child("yr"));
        let y = DVector::from_fn(m, |j, _| Complex::new(yr[j], -0.3 * xr[j * j % n]));
        let adj = op.adjoint(&y).unwrap();
        let lhs = fast.dotc(&y);
        let rhs = x.dotc(&adj);
        assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }
}

#[test]
fn time_frequency_system_is_frobenius_orthogonal() {
    // tr(π(λ)* π(λ')) = m δ_{λλ'} for every pair, checked densely for m ≤ 8.
    for m in 1..=8usize {
        let spec = GaborSpec::new(m).unwrap();
        // Build π(λ) as a dense matrix: its columns are π(λ) e_c.
        let pi_dense = |lambda: usize| -> DMatrix<Complex<f64>> {
            let (k, l) = spec.shift_pair(lambda);
            let cols: Vec<DVector<Complex<f64>>> = (0..m)
                .map(|c| {
                    let mut e = DVector::zeros(m);
                    e[c] = Complex::new(1.0, 0.0);
                    time_frequency_shift(&e, k, l)
                })
                .collect();
            DMatrix::from_columns(&cols)
        };
        for lambda in 0..spec.n() {
            for mu in 0..spec.n() {
                let a = pi_dense(lambda);
                let b = pi_dense(mu);
                let inner: Complex<f64> = a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let want = if lambda == mu { m as f64 } else { 0.0 };
                assert!(
                    (inner - Complex::new(want, 0.0)).norm() <= 1e-10 * (m as f64),
                    "m={m} λ={lambda} λ'={mu}: tr = {inner}"
                );
            }
        }
    }
}

#[test]
fn vx_circulant_exchange_identity() {
    let root = RngStream::new(105).child("vx-circ");
    let n = 64;
    let m = 16;
    let spec = PartialCirculantSpec::random(n, m, &root.child("omega")).unwrap();
    for case in 0..5u64 {
        let s = root.child(case);
        let z = standardized(n, &s.child("z"));
        // s-sparse signal with a few dense cases mixed in.
        let x = if case % 2 == 0 {
            let mut x = DVector::zeros(n);
            for (i, v) in standardized(6, &s.child("vals")).iter().enumerate() {
                x[(i * 11 + case as usize * 7) % n] = *v;
            }
            x
        } else {
            standardized(n, &s.child("dense-x"))
        };
        let vx = build_vx_circulant(&x, &spec).unwrap();
        let lhs = &vx * &z;
        let rhs = PartialCirculantOp::new(z.clone(), spec.clone())
            .unwrap()
            .apply(&x)
            .unwrap();
        assert!((&lhs - &rhs).amax() <= 1e-10, "case {case}");
        assert!(
            (vx.norm() - x.norm()).abs() <= 1e-12 * x.norm().max(1.0),
            "case {case}: ‖V_x‖_F = {} vs ‖x‖ = {}",
            vx.norm(),
            x.norm()
        );
    }
}

#[test]
fn vx_gabor_exchange_identity() {
    let root = RngStream::new(106).child("vx-gabor");
    for &m in &[4usize, 8] {
        let spec = GaborSpec::new(m).unwrap();
        let s = root.child(m);
        let eta = standardized(m, &s.child("eta"));
        let xr = standardized(m * m, &s.child("xr"));
        let xi = standardized(m * m, &s.child("xi"));
        let x = DVector::from_fn(m * m, |j, _| Complex::new(xr[j], xi[j]));

        let vx = build_vx_gabor(&x, &spec).unwrap();
        let eta_c = eta.map(|v| Complex::new(v, 0.0));
        let lhs = &vx * &eta_c;
        let rhs = GaborOp::from_real_generator(&eta).unwrap().apply(&x).unwrap();
        let err = (&lhs - &rhs).map(|c| c.norm()).max();
        assert!(err <= 1e-10, "m={m}: exchange error {err:.3e}");

        let frob = vx.map(|c| c.norm_sqr()).sum().sqrt();
        let xnorm = x.map(|c| c.norm_sqr()).sum().sqrt();
        assert!((frob - xnorm).abs() <= 1e-12 * xnorm);
    }
}

#[test]
fn ensembles_are_isotropic_in_expectation() {
    let root = RngStream::new(107).child("iso");
    let draws = 300;
    let specs = [
        EnsembleSpec::dense(24, 48, gaussian_spec()).unwrap(),
        EnsembleSpec::circulant(24, 48, gaussian_spec()).unwrap(),
        EnsembleSpec::gabor(16, gaussian_spec()).unwrap(),
    ];
    for spec in &specs {
        let n = spec.n;
        let x = {
            let raw = standardized(n, &root.child("signal").child(n));
            &raw / raw.norm()
        };
        let xc = x.map(|v| Complex::new(v, 0.0));
        let mut total = 0.0;
        for d in 0..draws as u64 {
            let op = spec.draw(&root.child(format!("{:?}", spec.kind)).child(d)).unwrap();
            let e = match &op {
                chaoslab::structured::AnyOp::Real(op) => op.apply(&x).unwrap().norm_squared(),
                chaoslab::structured::AnyOp::Complex(op) => {
                    op.apply(&xc).unwrap().map(|c| c.norm_sqr()).sum()
                }
            };
            total += e;
        }
        let mean = total / draws as f64;
        assert!(
            (mean - 1.0).abs() < 0.15,
            "{:?}: E‖Φx‖² = {mean} should be ≈ 1",
            spec.kind
        );
    }
}

#[test]
fn ensemble_draws_are_deterministic() {
    let spec = EnsembleSpec::circulant(8, 32, gaussian_spec()).unwrap();
    let s = RngStream::new(55).child("det");
    let a = spec.draw(&s).unwrap().to_dense_complex();
    let b = spec.draw(&s).unwrap().to_dense_complex();
    assert_eq!(a, b);
}

#[test]
fn csv_export_round_trips_through_tempfile() {
    let root = RngStream::new(108).child("csv");
    let spec = EnsembleSpec::gabor(5, gaussian_spec()).unwrap();
    let dense = spec.draw(&root).unwrap().to_dense_complex();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    write_dense_csv(&dense, &mut f).unwrap();
    drop(f);
    let back = read_dense_csv(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(dense, back);
}

#[test]
fn dimension_and_subset_validation() {
    assert!(PartialCirculantSpec::new(8, vec![]).is_err());
    assert!(PartialCirculantSpec::new(8, vec![8]).is_err());
    assert!(PartialCirculantSpec::new(8, vec![3, 3]).is_err());
    let spec = PartialCirculantSpec::new(8, vec![5, 1]).unwrap();
    assert_eq!(spec.omega, vec![1, 5]);

    let op = PartialCirculantOp::new(DVector::zeros(8), spec).unwrap();
    assert!(op.apply(&DVector::zeros(7)).is_err());
    assert!(op.adjoint(&DVector::zeros(3)).is_err());

    let g = GaborOp::new(DVector::from_element(4, Complex::new(0.5, 0.0))).unwrap();
    assert!(g.apply(&DVector::zeros(15)).is_err());
    assert!(g.adjoint(&DVector::zeros(5)).is_err());
}
