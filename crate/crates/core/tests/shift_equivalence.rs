mod common;

#[test]
fn shifted_and_unshifted_densities_agree() {
    let r = common::shift_equivalence(1000, 1e-7);
    assert!(r.peak_density > 0.0);
    assert!(r.relative_error < 1e-8, "relative error {:e}", r.relative_error);
}
