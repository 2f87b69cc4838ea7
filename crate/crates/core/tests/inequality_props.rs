use proptest::prelude::*;
use rarefaction_nsf::inequality::{
    certify, eigenvalues, f, fmax, g, g_pp, grad_f, hessian_f, peak_hessian, ybar, IneqGrid,
};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// `(y, Z, Z̃)` with `Z` at least 1e-3 away from the junction in log.
fn point() -> impl Strategy<Value = (f64, f64, f64)> {
    (log_uniform(1e-2, 1e2), log_uniform(1e-2, 1e2), log_uniform(0.1, 10.0))
        .prop_filter("away from the junction", |(_, s, _)| s.ln().abs() > 1e-3)
        .prop_map(|(y, s, zt)| (y, s * zt, zt))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-3)
}

/// Golden-section maximisation of `y ↦ F(y, Z)` in `log y`.
fn golden_max(z: f64, zt: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let obj = |s: f64| f(s.exp(), z, zt).unwrap();
    let (mut a, mut b) = (1e-3f64.ln(), 1e3f64.ln());
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    while b - a > 1e-10 {
        if obj(c) > obj(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    obj(0.5 * (a + b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gradient_matches_central_differences((y, z, zt) in point()) {
        let [gy, gz] = grad_f(y, z, zt).unwrap();
        let (hy, hz) = (1e-5 * y, 1e-5 * z);
        let fy = (f(y + hy, z, zt).unwrap() - f(y - hy, z, zt).unwrap()) / (2.0 * hy);
        let fz = (f(y, z + hz, zt).unwrap() - f(y, z - hz, zt).unwrap()) / (2.0 * hz);
        // near-cancelling derivatives are compared on the scale of their parts
        let scale_y = 1.0 / (y * y);
        let scale_z = 1.0 / z;
        prop_assert!((gy - fy).abs() <= 1e-6 * gy.abs().max(scale_y), "dF/dy {gy} vs {fy}");
        prop_assert!((gz - fz).abs() <= 1e-6 * gz.abs().max(scale_z), "dF/dZ {gz} vs {fz}");
    }

    #[test]
    fn hessian_matches_differenced_gradient((y, z, zt) in point()) {
        let h = hessian_f(y, z, zt).unwrap();
        let (hy, hz) = (1e-5 * y, 1e-5 * z);
        let gyp = grad_f(y + hy, z, zt).unwrap();
        let gym = grad_f(y - hy, z, zt).unwrap();
        let gzp = grad_f(y, z + hz, zt).unwrap();
        let gzm = grad_f(y, z - hz, zt).unwrap();
        let fd = [
            [(gyp[0] - gym[0]) / (2.0 * hy), (gzp[0] - gzm[0]) / (2.0 * hz)],
            [(gyp[1] - gym[1]) / (2.0 * hy), (gzp[1] - gzm[1]) / (2.0 * hz)],
        ];
        let scale = [[1.0 / (y * y * y), 1.0 / (y * z)], [1.0 / (y * z), 1.0 / (z * z)]];
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!(
                    (h[r][c] - fd[r][c]).abs() <= 1e-5 * h[r][c].abs().max(scale[r][c]),
                    "H[{r}][{c}] {} vs {}", h[r][c], fd[r][c]
                );
            }
        }
    }

    #[test]
    fn f_is_non_positive((y, z, zt) in point()) {
        prop_assert!(f(y, z, zt).unwrap() < 0.0);
    }

    #[test]
    fn depends_on_z_only_through_z_over_ztilde(y in log_uniform(1e-2, 1e2), s in log_uniform(1e-2, 1e2),
                                                zt in log_uniform(0.1, 10.0)) {
        let a = f(y, s * zt, zt).unwrap();
        let b = f(y, s, 1.0).unwrap();
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ybar_is_the_stationary_maximiser(s in log_uniform(1.0, 1e3), zt in log_uniform(0.1, 10.0)) {
        let z = s * zt;
        let yb = ybar(z, zt).unwrap();
        let [gy, _] = grad_f(yb, z, zt).unwrap();
        prop_assert!(gy.abs() <= 1e-12, "dF/dy(ybar) = {gy}");
        prop_assert!(hessian_f(yb, z, zt).unwrap()[0][0] < 0.0);
        let fm = fmax(z, zt).unwrap();
        prop_assert!((fm - f(yb, z, zt).unwrap()).abs() <= 1e-12);
        prop_assert!((fm - g(zt / z).unwrap()).abs() <= 1e-12);
        let golden = golden_max(z, zt);
        prop_assert!((fm - golden).abs() <= 1e-10, "{fm} vs golden {golden}");
    }

    #[test]
    fn f_is_very_negative_at_the_ends_of_the_y_range(s in log_uniform(1.0, 1e3), zt in log_uniform(0.1, 10.0)) {
        for y in [1e-4, 1e-3, 1e3, 1e4] {
            prop_assert!(f(y, s * zt, zt).unwrap() < -10.0);
        }
    }

    #[test]
    fn g_is_concave_and_negative(big_y in log_uniform(1e-4, 0.999)) {
        prop_assert!(g(big_y).unwrap() < 0.0);
        prop_assert!(g_pp(big_y).unwrap() <= -1.0 / 6.0);
        // second difference agrees with the closed form
        let h = 1e-2 * big_y;
        let fd = (g(big_y + h).unwrap() - 2.0 * g(big_y).unwrap() + g(big_y - h).unwrap()) / (h * h);
        let exact = g_pp(big_y).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-3 * exact.abs(), "{fd} vs {exact}");
    }
}

#[test]
fn junction_uses_one_sided_differences() {
    // at Z = Z̃ the Hessian is one-sided; both sides agree at y = 1
    for zt in [0.1, 1.0, 10.0] {
        let h = 1e-6 * zt;
        let above = grad_f(1.0, zt + h, zt).unwrap()[1];
        let below = grad_f(1.0, zt - h, zt).unwrap()[1];
        let at = grad_f(1.0, zt, zt).unwrap()[1];
        let right = (above - at) / h;
        let left = (at - below) / h;
        let exact = peak_hessian(zt)[1][1];
        assert!((right - exact).abs() <= 1e-5 * exact.abs(), "{right} vs {exact}");
        assert!((left - exact).abs() <= 1e-5 * exact.abs(), "{left} vs {exact}");
    }
}

#[test]
fn exact_values_at_the_peak() {
    for zt in [0.1, 1.0, 10.0] {
        assert_eq!(f(1.0, zt, zt).unwrap(), 0.0);
        let [gy, gz] = grad_f(1.0, zt, zt).unwrap();
        assert!(gy.abs() <= 1e-12 && gz.abs() <= 1e-12);
        let lam = eigenvalues(&hessian_f(1.0, zt, zt).unwrap());
        assert!(lam[1] < 0.0);
    }
    assert_eq!(g(1.0).unwrap(), 0.0);
    assert!((g_pp(1.0).unwrap() + 0.2).abs() <= 1e-14);
    let g0 = 2.5 * (0.6 - 0.6f64.powf(0.6)) + 0.1;
    assert!((g(1e-300).unwrap() - g0).abs() <= 1e-14);
    assert!((g0 + 0.240054).abs() <= 1e-5);
}

#[test]
fn certification_passes_for_several_ztilde() {
    for zt in [0.1, 1.0, 10.0] {
        let report = certify(&IneqGrid::default(), zt).unwrap();
        assert!(report.passed(), "{report}");
        // dropping the quadratic entropy term still leaves F <= 0
        assert!(report.informational[0].passed, "{report}");
    }
}
