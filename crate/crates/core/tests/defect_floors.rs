//! Regression floors of the defect functional. The values are properties of
//! this discretization, recorded from full sweeps, not external claims.

use pompeiu_core::geometry::{HarmonicPerturbation, Resolution, Shape};
use pompeiu_core::helmholtz::{defect_sweep, mps_defect, DEFAULT_BASIS_DEGREE};

const K1: f64 = 4.493409457909064;
const K2: f64 = 7.725251836937707;

#[test]
fn ball_defect_converges_with_degree() {
    let ball = Shape::ball(1.0).unwrap();
    let res = Resolution::default();
    let mut previous = f64::INFINITY;
    for l in 2..=6 {
        let d = mps_defect(&ball, K1, l, &res).unwrap().defect;
        assert!(d < 1e-6, "L={l}: {d}");
        assert!(d <= previous + 1e-12, "L={l}");
        previous = d;
    }
}

#[test]
fn ball_sweep_minima_sit_on_j1_roots() {
    let sweep = defect_sweep(&Shape::ball(1.0).unwrap(), 4.0, 8.0, 0.05, 6, &Resolution::default()).unwrap();
    let deep: Vec<f64> = sweep.minima.iter().filter(|r| r.defect < 1e-6).map(|r| r.k).collect();
    assert_eq!(deep.len(), 2, "{deep:?}");
    assert!((deep[0] - K1).abs() < 1e-4 && (deep[1] - K2).abs() < 1e-4);
}

#[test]
fn ellipsoid_floor() {
    let ell = Shape::ellipsoid([1.0, 1.0, 1.3]).unwrap();
    let sweep = defect_sweep(&ell, 3.0, 8.0, 0.05, DEFAULT_BASIS_DEGREE, &Resolution::default()).unwrap();
    let floor = sweep.min_defect();
    eprintln!("ellipsoid floor {floor:.6e}");
    for m in &sweep.minima {
        eprintln!("  min k={:.6} defect={:.6e}", m.k, m.defect);
    }
    assert!(floor > 1e-2, "{floor}");
    // Recorded: 9.0169e-2 near k = 4.1369.
    assert!((floor - 9.0169e-2).abs() < 1e-3, "{floor}");
}

#[test]
fn star_floor_is_far_above_ball() {
    let star = Shape::star(1.0, vec![HarmonicPerturbation { l: 2, m: 0, eps: 0.05 }]).unwrap();
    let res = Resolution::default();
    let ball = defect_sweep(&Shape::ball(1.0).unwrap(), 4.0, 5.0, 0.05, 6, &res).unwrap().min_defect();
    let pert = defect_sweep(&star, 4.0, 5.0, 0.05, 6, &res).unwrap().min_defect();
    eprintln!("star floor {pert:.6e}, ball {ball:.3e}");
    assert!(pert > 10.0 * ball);
    // Recorded: 1.6592e-2.
    assert!((pert - 1.6592e-2).abs() < 5e-4, "{pert}");
}
