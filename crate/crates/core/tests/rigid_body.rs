use std::time::Instant;

use proptest::prelude::*;
use starga::error::Error;
use starga::lie::rotor_exp;
use starga::rigid_body::*;

const GENERIC_L: [f64; 3] = [0.7, -0.4, 0.5];

fn moments() -> InertiaOperator {
    InertiaOperator::principal([1.0, 2.0, 3.0]).unwrap()
}

#[test]
fn principal_axis_is_an_equilibrium() {
    let i = moments();
    assert_eq!(euler_rhs([1.5, 0.0, 0.0], &i), [0.0, 0.0, 0.0]);
    let traj = integrate(&RigidBodyState::new([0.0, 0.0, 1.2]), &i, 1e-2, 200).unwrap();
    let last = traj.states.last().unwrap();
    assert_eq!(last.l, [0.0, 0.0, 1.2]);
    // W_B = 0.4 B3 so R = exp(-t W_B / 2), a rotor in the e1e2 plane
    let expect = rotor_exp(&bivector([0.0, 0.0, 0.4]), -last.t).unwrap();
    assert!(last.rotor.distance(&expect) < 1e-10);
    assert!(traj.max_poincare_residual().unwrap() < 1e-10);
}

#[test]
fn cyclic_euler_values_for_unit_angular_velocity() {
    // I = (1,2,3), w = (1,1,1): I_k dw_k/dt = (I2 - I3, I3 - I1, I1 - I2) = (-1, 2, -1)
    let dw = euler_rhs_principal([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]);
    assert_eq!(dw, [-1.0, 1.0, -1.0 / 3.0]);
    let dl = euler_rhs([1.0, 2.0, 3.0], &moments());
    assert_eq!(dl, [-1.0, 2.0, -1.0]);
    let i = [1.0, 2.0, 3.0];
    for k in 0..3 {
        assert!((dl[k] - i[k] * dw[k]).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn three_right_hand_sides_agree(l in prop::array::uniform3(-3.0f64..3.0), m in prop::array::uniform3(0.2f64..4.0)) {
        let i = InertiaOperator::principal(m).unwrap();
        let a = euler_rhs(l, &i);
        let b = lie_poisson_rhs(l, &i);
        let c = components(&euler_rhs_bivector(&bivector(l), &i).unwrap());
        let w = i.apply_inverse(l);
        let d = euler_rhs_principal(w, m);
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() < 1e-12);
            prop_assert!((a[k] - c[k]).abs() < 1e-12);
            prop_assert!((a[k] - m[k] * d[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_operator_is_symmetric_and_positive(
        pts in prop::collection::vec((0.1f64..2.0, prop::array::uniform3(-1.0f64..1.0)), 4..10),
        a in prop::array::uniform3(-1.0f64..1.0),
        b in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let Ok(i) = InertiaOperator::from_masses(&pts) else { return Ok(()); };
        let (ba, bb) = (bivector(a), bivector(b));
        prop_assert!((i.pairing(&ba, &bb) - i.pairing(&bb, &ba)).abs() < 1e-12);
        if a.iter().any(|c| c.abs() > 1e-3) {
            prop_assert!(i.pairing(&ba, &ba) > 0.0);
        }
    }
}

#[test]
fn mass_cloud_matches_principal_moments() {
    // point masses on the axes: I_1 = sum m (y^2 + z^2) and cyclic
    let pts = [
        (1.0, [1.0, 0.0, 0.0]),
        (1.0, [-1.0, 0.0, 0.0]),
        (2.0, [0.0, 1.0, 0.0]),
        (2.0, [0.0, -1.0, 0.0]),
        (0.5, [0.0, 0.0, 2.0]),
        (0.5, [0.0, 0.0, -2.0]),
    ];
    let i = InertiaOperator::from_masses(&pts).unwrap();
    let expect = [2.0 * 2.0 + 0.5 * 2.0 * 4.0, 1.0 * 2.0 + 0.5 * 2.0 * 4.0, 1.0 * 2.0 + 2.0 * 2.0];
    let m = i.matrix();
    for r in 0..3 {
        for c in 0..3 {
            let e = if r == c { expect[r] } else { 0.0 };
            assert!((m[(r, c)] - e).abs() < 1e-12, "{m}");
        }
    }
}

#[test]
fn generic_run_conserves_within_tolerance() {
    let start = Instant::now();
    let i = moments();
    let s0 = RigidBodyState::new(GENERIC_L);
    let traj = integrate(&s0, &i, 1e-3, 10_000).unwrap();
    let c = traj.conservation().unwrap();
    assert!(c.casimir_drift < 1e-10, "{c:?}");
    assert!(c.energy_drift < 1e-8, "{c:?}");
    assert!(c.spatial_momentum_drift < 1e-6, "{c:?}");
    assert!(c.rotor_defect < 1e-9 && c.orthogonality_defect < 1e-9, "{c:?}");
    let p = traj.max_poincare_residual().unwrap();
    assert!(p < 1e-6, "poincare residual {p:e}");
    let rev = reversal_error(&s0, &i, 1e-3, 10_000).unwrap();
    assert!(rev < 1e-8, "reversal {rev:e}");
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn poincare_residual_shrinks_like_fourth_power() {
    let i = moments();
    let s0 = RigidBodyState::new([2.0, -1.5, 1.0]);
    let coarse = integrate(&s0, &i, 0.1, 40).unwrap().max_poincare_residual().unwrap();
    let fine = integrate(&s0, &i, 0.05, 80).unwrap().max_poincare_residual().unwrap();
    let ratio = coarse / fine;
    assert!(ratio > 8.0 && ratio < 32.0, "ratio {ratio}");
}

#[test]
fn spatial_momentum_uses_the_rotor() {
    let mut s = RigidBodyState::new([1.0, 0.0, 0.0]);
    // quarter turn about e3 maps B1 = e2e3 to -e1e3 = B2
    s.rotor = rotor_exp(&bivector([0.0, 0.0, 1.0]), -std::f64::consts::FRAC_PI_2).unwrap();
    let l = s.spatial_momentum().unwrap();
    assert!((l[0]).abs() < 1e-15 && (l[1] - 1.0).abs() < 1e-15 && l[2].abs() < 1e-15, "{l:?}");
}

#[test]
fn invalid_inputs() {
    assert!(InertiaOperator::principal([1.0, 0.0, 2.0]).is_err());
    assert!(integrate(&RigidBodyState::new(GENERIC_L), &moments(), -1e-3, 5).is_err());
    let blow = integrate(&RigidBodyState::new([1e200, 1e200, 1e200]), &moments(), 1.0, 10);
    assert!(matches!(blow, Err(Error::Diverged { .. })));
}

#[test]
fn csv_rows_follow_the_fixed_header() {
    let traj = integrate(&RigidBodyState::new(GENERIC_L), &moments(), 1e-2, 3).unwrap();
    let rows = traj.rows().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(Trajectory::COLUMNS.len(), rows[0].len());
    assert_eq!(rows[0][6], 1.0);
    assert!((rows[2][0] - 0.02).abs() < 1e-15);
}
