mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use common::{oscillator, rotational, space, Tampered};
use kamtorus::fourier::{FourierModel, FourierSpace};
use kamtorus::geometry::*;
use kamtorus::linalg::omega0;
use kamtorus::KamError;

fn sup(m: &FourierModel) -> f64 {
    m.padded_samples().iter().map(|v| v.amax()).fold(0.0, f64::max)
}

#[test]
fn oscillator_tangent_frame_singular_values() {
    let fam = oscillator(0.0);
    let sys = fam.system();
    let (k, _) = fam.exact_torus(&space(4, 16), &[0.5, 0.4]).unwrap();
    let frame = build_tangent_frame(&k, &sys).unwrap();
    assert_eq!(frame.l.shape(), (4, 2));
    assert!((frame.min_singular - 2.0 * PI * 0.4).abs() < 1e-12, "{}", frame.min_singular);
}

#[test]
fn rotational_third_column_is_the_moment_field() {
    let fam = rotational(0.0, 0.0);
    let sys = fam.system();
    let (k, _) = fam.exact_torus(&space(4, 16), &[0.5, 0.4, 0.3]).unwrap();
    let l = build_tangent_frame(&k, &sys).unwrap().l;
    let col = l.column(2).unwrap();
    let at = col.synthesize(&[vec![0.13, 0.71]]).unwrap();
    let expect = [0.0, 0.0, 0.0, 0.0, 0.0, -0.3];
    for (i, e) in expect.iter().enumerate() {
        assert!((at[0][(i, 0)] - e).abs() < 1e-14);
    }
}

#[test]
fn constant_map_is_degenerate() {
    let sys = oscillator(0.0).system();
    let k = FourierModel::constant(&space(3, 8), &DMatrix::from_element(4, 1, 0.2));
    assert!(matches!(build_tangent_frame(&k, &sys), Err(KamError::DegenerateFrame { .. })));
}

#[test]
fn frame_identities_on_exact_tori() {
    for rot in [false, true] {
        let (sys, k, omega): (Box<dyn HamiltonianSystem>, _, _) = if rot {
            let fam = rotational(0.0, 0.0);
            let (k, w) = fam.exact_torus(&space(4, 16), &[0.5, 0.4, 0.3]).unwrap();
            (Box::new(fam.system()), k, w)
        } else {
            let fam = oscillator(0.0);
            let (k, w) = fam.exact_torus(&space(4, 16), &[0.5, 0.4]).unwrap();
            (Box::new(fam.system()), k, w)
        };
        let n = sys.dof();
        let fb = build_frames(&k, sys.as_ref()).unwrap();
        let bg = fb.b.matmul(&fb.g_l).unwrap();
        assert!(sup(&bg.sub(&FourierModel::identity(k.space(), n)).unwrap()) < 1e-10);
        let ntol = FourierModel::pointwise(&[&fb.n, &fb.l], |v| Ok(v[0].transpose() * omega0(n) * v[1] - DMatrix::identity(n, n))).unwrap();
        assert!(sup(&ntol) < 1e-10);
        assert!(sup(&fb.torsion.sub(&fb.torsion.transpose()).unwrap()) < 1e-9);
        assert!(fb.omega_l.strip_norm(0.0).unwrap() < 1e-10);
        assert!(fb.e_sym.strip_norm(0.0).unwrap() < 1e-9);
        let red = reducibility_residual(&k, &fb, sys.as_ref(), &omega).unwrap();
        for (name, m) in red.named() {
            assert!(m.strip_norm(0.0).unwrap() < 1e-9, "{name} {}", m.strip_norm(0.0).unwrap());
        }
    }
}

#[test]
fn gram_inverse_is_diagonal_for_orthogonal_columns() {
    let fam = oscillator(0.0);
    let (k, _) = fam.exact_torus(&space(4, 16), &[0.5, 0.4]).unwrap();
    let fb = build_frames(&k, &fam.system()).unwrap();
    let b = fb.b.average();
    let expect = [1.0 / (2.0 * PI * 0.5f64).powi(2), 1.0 / (2.0 * PI * 0.4f64).powi(2)];
    assert!((b[(0, 0)] - expect[0]).abs() < 1e-13 && (b[(1, 1)] - expect[1]).abs() < 1e-13);
    assert!(b[(0, 1)].abs() < 1e-14 && fb.b.zero_average().max_coefficient() < 1e-14);
}

#[test]
fn exact_form_has_zero_averaged_omega_dk() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
    let sp = space(4, 16);
    let fam = rotational(0.1, 0.05);
    let (k0, _) = fam.exact_torus(&sp, &[0.5, 0.4, 0.3]).unwrap();
    let noise = FourierModel::from_fn(&sp, 6, 1, |kk, _, _| {
        let decay = (-(kk[0].abs() + kk[1].abs()) as f64).exp();
        num_complex::Complex64::new(rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02)) * decay
    });
    let k = k0.add(&noise).unwrap();
    let sys = fam.system();
    let l = build_tangent_frame(&k, &sys).unwrap().l;
    let om = lagrangianity_residual(&k, &l, &sys).unwrap();
    let avg = om.average();
    assert!(avg.view((0, 0), (2, 2)).amax() < 1e-12, "{avg}");
    assert!(om.strip_norm(0.0).unwrap() > 1e-4);
}

#[test]
fn lift_of_exact_rotational_torus() {
    let fam = rotational(0.0, 0.0);
    let sys = fam.system();
    let und = fam.undiscounted();
    let (k, omega) = fam.exact_torus(&space(4, 32), &[0.5, 0.4, 0.3]).unwrap();
    assert!(momentum_spread(&k, &sys).unwrap() < 1e-10);
    let nu = fam.discount;
    let spec = LiftSpec::from_discount(|_| DVector::from_element(1, nu), &k, &sys).unwrap();
    assert!((spec.p0[0] - 0.045).abs() < 1e-14);
    let s_grid: Vec<DVector<f64>> = (0..8).map(|i| DVector::from_element(1, i as f64 * 0.7)).collect();
    let cyl = lift_cylinder(&k, &und, &spec, &omega, &s_grid).unwrap();
    assert!(cyl.residual < 1e-10, "{}", cyl.residual);
    let base = k.samples();
    for (z, b) in cyl.samples[0].iter().zip(&base) {
        assert_eq!(z.as_slice(), b.as_slice());
    }
    let torus = lift_torus(&k, &und, &spec, &omega, 32).unwrap();
    assert_eq!(torus.khat.space().grid(), &[32, 32, 32]);
    assert!((torus.frequency[2] - nu / (2.0 * PI)).abs() < 1e-15);
    assert!(torus.residual < 1e-10, "{}", torus.residual);
}

#[test]
fn lift_rejects_times_beyond_the_radius() {
    let fam = rotational(0.0, 0.0);
    let (k, omega) = fam.exact_torus(&space(3, 16), &[0.5, 0.4, 0.3]).unwrap();
    let sys = Tampered { inner: fam.undiscounted(), dxh_shift: 0.0, time_radius: Some(1.0) };
    let spec = LiftSpec::new(DVector::from_element(1, fam.discount), &k, &sys).unwrap();
    let err = lift_cylinder(&k, &sys, &spec, &omega, &[DVector::from_element(1, 1.5)]).unwrap_err();
    assert!(matches!(err, KamError::TimeOutOfRange { .. }));
    assert!(lift_torus(&k, &sys, &spec, &omega, 16).is_err());
}

#[test]
fn frames_need_matching_dimensions() {
    let sys = oscillator(0.0).system();
    let k = FourierModel::zeros(&FourierSpace::uniform(3, 2, 8).unwrap(), 4, 1);
    assert!(matches!(build_frames(&k, &sys), Err(KamError::Shape(_))));
}
