use gaussdec::bounds::{dominance_profile, ostrowski_lower_bound};
use gaussdec::covgen::{generate, CovFamily};
use gaussdec::decouple::{
    admissible_region, correlation_eigs_oracle, det_identity_residual, det_shifted_closed_form, q_new,
    simultaneous_diagonalization, GaussianVector,
};
use gaussdec::matcore::{
    cholesky, householder_qr, jacobi_eigen, lu_det, sym_eigen, Matrix, SymMatrix, DEFAULT_EIGEN_TOL,
};
use gaussdec::verify::{bl_bound, bl_ratio};
use proptest::prelude::*;

fn square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| Matrix::from_fn(n, |i, j| v[i * n + j]))
    })
}

fn symmetric(max_n: usize) -> impl Strategy<Value = SymMatrix> {
    square(max_n).prop_map(|g| SymMatrix::symmetrize(&g.add(&g.transpose())))
}

/// `GᵗG + shift·I` with variances rescaled by `10^u`, `u ∈ [−1, 1]`.
fn covariance(max_n: usize) -> impl Strategy<Value = GaussianVector> {
    square(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), 0.05f64..1.0, prop::collection::vec(-1.0f64..1.0, n)).prop_map(|(g, shift, u)| {
            let c = g.transpose().matmul(&g).add(&Matrix::identity(g.n()).scale(shift));
            let d: Vec<f64> = u.iter().map(|v| 10f64.powf(*v)).collect();
            GaussianVector::from_covariance(SymMatrix::symmetrize(&c.scale_sym(&d))).unwrap()
        })
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigensolvers_agree(a in symmetric(16)) {
        let s = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        let j = jacobi_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        let scale = s.eigenvalues.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        for (x, y) in s.eigenvalues.iter().zip(&j.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-10 * scale, "{x} vs {y}");
        }
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.eigenvectors.orthogonality_defect() <= 1e-10);
        prop_assert!(s.residual(&a) <= 1e-10 * scale.max(1.0));
        let tr: f64 = s.eigenvalues.iter().sum();
        prop_assert!((tr - a.trace()).abs() <= 1e-10 * scale.max(a.trace().abs()) * a.n() as f64);
    }

    #[test]
    fn spd_determinant_is_eigenvalue_product(x in covariance(10)) {
        let c = x.covariance();
        let s = sym_eigen(c, DEFAULT_EIGEN_TOL).unwrap();
        let prod: f64 = s.eigenvalues.iter().product();
        let det = lu_det(c);
        prop_assert!((prod - det).abs() <= 1e-8 * det.abs());
        prop_assert!((x.log_det() - det.ln()).abs() <= 1e-8 * det.ln().abs().max(1.0));
    }

    #[test]
    fn cholesky_tracks_definiteness(a in symmetric(8)) {
        let min = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap().eigenvalues[0];
        let scale = a.max_abs();
        match cholesky(&a) {
            Ok(l) => {
                prop_assert!(min > -1e-12 * scale);
                let lm = l.as_matrix();
                let back = lm.matmul(&lm.transpose());
                prop_assert!(back.sub(&a).max_abs() <= 1e-12 * scale.max(1.0));
            }
            Err(_) => prop_assert!(min < 1e-10 * scale),
        }
    }

    #[test]
    fn qr_reconstructs(a in square(10)) {
        let (q, r) = householder_qr(&a);
        prop_assert!(q.orthogonality_defect() <= 1e-12);
        prop_assert!(q.matmul(&r).sub(&a).max_abs() <= 1e-12);
        for i in 0..a.n() {
            for j in 0..i {
                prop_assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn simultaneous_diagonalization_invariants(x in covariance(8)) {
        let sd = simultaneous_diagonalization(&x).unwrap();
        let (dc, dg) = sd.defects(&x);
        let gmax = x.variances().iter().fold(0.0f64, |m, v| m.max(*v));
        prop_assert!(dc <= 1e-9, "tRCR defect {dc}");
        prop_assert!(dg <= 1e-9 * gmax.max(1.0) * sd.xi.iter().fold(1.0f64, |m, v| m.max(*v)), "tRΓR defect {dg}");
        prop_assert!(sd.xi.iter().all(|v| *v > 0.0));
        let inv = sd.inv_xi();
        let n = x.n() as f64;
        prop_assert!((inv.iter().sum::<f64>() - n).abs() <= 1e-9 * n);
        let oracle = sorted(correlation_eigs_oracle(&x).unwrap());
        for (a, b) in sorted(inv).iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn spectrum_invariant_under_scaling_and_permutation(x in covariance(6), seed in 0u64..1000) {
        let n = x.n();
        let d: Vec<f64> = (0..n).map(|i| 0.5 + ((seed + 7 * i as u64) % 13) as f64 / 4.0).collect();
        let scaled = GaussianVector::from_covariance(SymMatrix::symmetrize(&x.covariance().scale_sym(&d))).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed as usize) % n);
        let permuted = x.permuted(&perm).unwrap();

        let base = sorted(simultaneous_diagonalization(&x).unwrap().inv_xi());
        for other in [&scaled, &permuted] {
            let v = sorted(simultaneous_diagonalization(other).unwrap().inv_xi());
            for (a, b) in base.iter().zip(&v) {
                prop_assert!((a - b).abs() <= 1e-9 * b.max(1e-3));
            }
        }
        // q_new only sees the correlation structure
        let p = 1.01 * base[n - 1] + 0.5;
        let q = q_new(&x, p).unwrap();
        prop_assert!((q_new(&scaled, p).unwrap() - q).abs() <= 1e-9 * q);
        prop_assert!((q_new(&permuted, p).unwrap() - q).abs() <= 1e-9 * q);
    }

    #[test]
    fn region_matches_determinant_sign(x in covariance(7), t in 0.02f64..0.98) {
        let sd = simultaneous_diagonalization(&x).unwrap();
        let region = admissible_region(&sd.xi);
        for iv in &region.intervals {
            let p = if iv.upper.is_finite() { iv.lower + t * (iv.upper - iv.lower) } else { iv.lower * (1.0 + 4.0 * t) };
            let residual = det_identity_residual(&x, p).unwrap();
            prop_assert!(residual <= 1e-6, "residual {residual} at p = {p}");
            prop_assert_eq!(det_shifted_closed_form(&x, &sd, p) > 0.0, iv.admissible);
            prop_assert_eq!(region.contains(p), iv.admissible);
        }
        let top = sd.max_inv_xi();
        prop_assert!(region.contains(top * (1.0 + 1e-6) + 1e-8));
    }

    #[test]
    fn ostrowski_bounds_dominant_determinants(g in square(10), boost in 1.0f64..3.0) {
        let n = g.n();
        let rows: Vec<f64> = (0..n).map(|i| (0..n).filter(|&j| j != i).map(|j| g[(i, j)].abs()).sum()).collect();
        let a = Matrix::from_fn(n, |i, j| if i == j { (rows[i] * boost + 0.01) * g[(i, i)].signum() } else { g[(i, j)] });
        prop_assert!(dominance_profile(&a).strictly_dominant());
        let bound = ostrowski_lower_bound(&a).unwrap();
        prop_assert!(lu_det(&a).abs() >= bound * (1.0 - 1e-12));
    }

    #[test]
    fn brascamp_lieb_ratio_below_bound(
        x in covariance(4),
        logb in prop::collection::vec(-3.0f64..3.0, 4),
        p in 1.0f64..8.0,
    ) {
        let a = x.covariance();
        let b: Vec<f64> = logb[..a.n()].iter().map(|v| 10f64.powf(*v)).collect();
        prop_assert!(bl_ratio(a, &b, p).unwrap() <= bl_bound(a, p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn random_spd_hits_condition_number(n in 1usize..=32, seed in any::<u64>(), lc in 0.0f64..4.0) {
        let cond = 10f64.powf(lc);
        let fam = CovFamily::RandomSpd { n, seed, cond };
        let c = generate(&fam).unwrap();
        prop_assert_eq!(&c, &generate(&fam).unwrap());
        let e = sym_eigen(&c, DEFAULT_EIGEN_TOL).unwrap().eigenvalues;
        let got = e[n - 1] / e[0];
        if n > 1 {
            prop_assert!((got / cond - 1.0).abs() <= 0.1, "cond {got} vs {cond}");
        }
        prop_assert!(GaussianVector::from_covariance(c).is_ok());
    }
}
