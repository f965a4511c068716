use std::path::PathBuf;

use pompeiu_core::fourier::{chi_ft_ball, IndicatorTransform};
use pompeiu_core::geometry::{load_mesh, MeshError, Resolution, Shape};
use pompeiu_core::{Error, Vec3};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn octahedron_loads() {
    let m = load_mesh(fixture("octahedron.off")).unwrap();
    assert_eq!(m.euler_characteristic(), 2);
    assert!((m.signed_volume() - 4.0 / 3.0).abs() < 1e-14);
    assert!((m.area() - 4.0 * 3f64.sqrt()).abs() < 1e-13);
}

#[test]
fn flipped_face_is_rejected() {
    let err = load_mesh(fixture("tetra_flipped.off")).unwrap_err();
    assert!(matches!(err, MeshError::InconsistentOrientation { .. }), "{err}");
}

#[test]
fn open_mesh_is_rejected() {
    let err = load_mesh(fixture("open_pyramid.off")).unwrap_err();
    assert!(matches!(err, MeshError::OpenEdge { .. }), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_mesh(fixture("nope.off")), Err(MeshError::Io(_))));
}

#[test]
fn icosphere_fixture_is_a_sphere_at_mesh_tier() {
    let m = load_mesh(fixture("icosphere4.off")).unwrap();
    assert_eq!((m.vertices().len(), m.triangles().len()), (2562, 5120));
    let shape = Shape::Mesh(m);
    assert!(!shape.is_parametric());
    let t = IndicatorTransform::new(shape, &Resolution { grid_degree: 8, radial_order: 8, mesh_order: 3 }).unwrap();
    let ball_volume = 4.0 * std::f64::consts::PI / 3.0;
    assert!((t.measure() / ball_volume - 1.0).abs() < 3e-3);
    for xi in [Vec3::new(0.5, 0.0, 0.0), Vec3::new(1.0, 2.0, -1.0), Vec3::new(-3.0, 4.0, 5.0)] {
        let mesh = t.by_surface(&xi).unwrap();
        assert!((mesh - chi_ft_ball(1.0, &xi)).norm() < 1e-2 * ball_volume);
    }
}

#[test]
fn mesh_is_not_parametric() {
    let shape = Shape::Mesh(load_mesh(fixture("octahedron.off")).unwrap());
    assert!(matches!(shape.param_point(0.3, 0.2), Err(Error::UnsupportedShape { .. })));
}
