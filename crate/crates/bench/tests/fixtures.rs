use joints_bench::*;

#[test]
fn fixtures_have_expected_shapes() {
    assert_eq!(grid(4).len(), 48);
    assert_eq!(random_rational(20).len(), 20);
    let (_, pts) = cloud_fp101(50);
    assert_eq!(pts.len(), 50);
    assert!(plane_points(30).iter().all(|p| p.dim() == 2));
    let (f, g) = resultant_pair(3);
    assert_eq!((f.degree(), g.degree()), (3, 3));
}

#[test]
fn fixtures_are_seeded() {
    assert_eq!(random_rational(10), random_rational(10));
    assert_eq!(plane_points(10), plane_points(10));
}
