mod common;

use molrss::geometry::{
    distance_cdf, distance_pdf, distance_power_pdf, sample_pair_distance, sample_uniform_point,
};
use molrss::DiskRegion;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 100_000;

fn ks_bound(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

#[test]
fn uniform_points_stay_inside_and_have_radial_law() {
    let region = DiskRegion::new(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut radii: Vec<f64> = (0..N)
        .map(|_| {
            let p = sample_uniform_point(&region, &mut rng);
            assert!(p.norm() <= 1.0);
            p.norm()
        })
        .collect();
    radii.sort_by(f64::total_cmp);
    let ks = common::ks_two_sided(&radii, |rho| rho * rho);
    assert!(ks < 0.01, "radial KS {ks}");
}

#[test]
fn pair_distance_mean_and_ecdf() {
    let r = 1.0;
    let region = DiskRegion::new(r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut xs: Vec<f64> = (0..N)
        .map(|_| sample_pair_distance(&region, &mut rng).value())
        .collect();
    assert!(xs.iter().all(|&x| (0.0..=2.0).contains(&x)));

    let mean = xs.iter().sum::<f64>() / N as f64;
    let first_moment = common::simpson_sin2(|x| x * common::disk_pdf(x, r), 0.0, 2.0, 20_000);
    assert!((first_moment - 128.0 / (45.0 * std::f64::consts::PI)).abs() < 1e-9);
    assert!(common::rel_err(mean, first_moment) < 0.01, "mean {mean}");

    xs.sort_by(f64::total_cmp);
    let ks = common::ks_two_sided(&xs, |x| common::disk_cdf(x, r));
    assert!(ks < 0.01 && ks < ks_bound(N), "KS {ks}");
    // the library's quadrature CDF gives the same verdict
    let ks_lib = common::ks_two_sided(&xs[..2000], |x| distance_cdf(x, &region).unwrap());
    let ks_ref = common::ks_two_sided(&xs[..2000], |x| common::disk_cdf(x, r));
    assert!((ks_lib - ks_ref).abs() < 1e-9);
}

#[test]
fn quadrature_cdf_matches_closed_form() {
    for &r in &[1e-3, 1.0, 10.0] {
        let region = DiskRegion::new(r).unwrap();
        for i in 0..=40 {
            let x = 2.0 * r * i as f64 / 40.0;
            let got = distance_cdf(x, &region).unwrap();
            assert!((got - common::disk_cdf(x, r)).abs() < 1e-10, "r={r} x={x}");
        }
    }
}

#[test]
fn distance_pdf_is_normalized() {
    for &r in &[1e-3, 1.0, 10.0] {
        let region = DiskRegion::new(r).unwrap();
        let total = common::simpson_sin2(|x| distance_pdf(x, &region), 0.0, 2.0 * r, 20_000);
        assert!((total - 1.0).abs() < 1e-6, "r={r}: {total}");
    }
}

#[test]
fn power_pdf_is_normalized() {
    let region = DiskRegion::new(1.0).unwrap();
    for &beta in &[0.5, 1.0, 2.0, 3.0] {
        // integrate f_Z(x^beta) beta x^(beta-1) over x in [0, 2]
        let total = common::simpson_sin2(
            |x| {
                if x == 0.0 {
                    return 0.0;
                }
                distance_power_pdf(x.powf(beta), beta, &region).unwrap() * beta * x.powf(beta - 1.0)
            },
            0.0,
            2.0,
            20_000,
        );
        assert!((total - 1.0).abs() < 1e-6, "beta={beta}: {total}");
    }
    // beta = 2 directly in z
    let total = common::simpson_sin2(
        |z| distance_power_pdf(z, 2.0, &region).unwrap(),
        0.0,
        4.0,
        20_000,
    );
    assert!((total - 1.0).abs() < 1e-6);
}

#[test]
fn power_pdf_identity_and_squared_form() {
    for &r in &[0.5, 1.0, 3.0] {
        let region = DiskRegion::new(r).unwrap();
        for i in 0..=50 {
            let x = 2.0 * r * i as f64 / 50.0;
            let a = distance_power_pdf(x, 1.0, &region).unwrap();
            let b = distance_pdf(x, &region);
            assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0 / r));
            let z = x * x;
            let got = distance_power_pdf(z, 2.0, &region).unwrap();
            let want = common::squared_distance_pdf(z, r);
            assert!((got - want).abs() < 1e-12 * (1.0 / (r * r)), "r={r} z={z}");
        }
    }
    let unit = DiskRegion::new(1.0).unwrap();
    let at_one = distance_power_pdf(1.0, 2.0, &unit).unwrap();
    let printed = (2.0 * 0.5f64.acos() - 0.75f64.sqrt()) / std::f64::consts::PI;
    assert!((at_one - printed).abs() < 1e-15);
}

#[test]
fn pdf_positive_inside() {
    let region = DiskRegion::new(2.0).unwrap();
    for i in 1..1000 {
        let x = 4.0 * i as f64 / 1000.0;
        assert!(distance_pdf(x, &region) > 0.0, "x={x}");
    }
}

#[test]
fn works_in_single_precision() {
    let region = molrss::geometry::DiskRegion::<f32>::new(1.0).unwrap();
    let got = distance_pdf(1.0f32, &region);
    assert!((got - 0.782_005).abs() < 1e-5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = sample_pair_distance(&region, &mut rng).value();
    assert!((0.0..=2.0).contains(&x));
    let c = distance_cdf(1.0f32, &region).unwrap();
    assert!((c as f64 - common::disk_cdf(1.0, 1.0)).abs() < 1e-4);
}
