use hartogs_bench::{coboundary_fixture, torus_fixture, tube_region};
use hartogs_core::geometry::grid_components;

#[test]
fn torus_fixture_has_all_sets() {
    let f = torus_fixture(2, 3).unwrap();
    assert_eq!(f.cover.len(), 4);
    assert_eq!(f.nerve.level(0).len(), 4);
    assert_eq!(f.bundle.rank, 1);
}

#[test]
fn coboundary_fixture_shape() {
    let f = torus_fixture(2, 3).unwrap();
    let m = coboundary_fixture(2, 0).unwrap();
    assert_eq!(m.rows, f.nerve.cell_count(1));
    assert_eq!(m.cols, f.nerve.cell_count(0));
}

#[test]
fn tube_lattice_is_connected() {
    let lab = grid_components(&tube_region(), 0.2, 10_000_000).unwrap();
    assert_eq!(lab.component_count(), 1);
}
