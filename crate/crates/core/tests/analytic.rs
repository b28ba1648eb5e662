mod common;

use molrss::{
    ChannelParams, DiskRegion, DriftBranches, SeriesStatus, SeriesTruncation, SignalDistribution,
};

const D: f64 = 1e-9;

fn free(r: f64, m: f64, t: f64) -> SignalDistribution {
    SignalDistribution::new(
        ChannelParams::free_diffusion(m, D, t).unwrap(),
        DiskRegion::new(r).unwrap(),
    )
    .unwrap()
}

fn drift(r: f64, m: f64, t: f64, v: f64) -> SignalDistribution {
    SignalDistribution::new(
        ChannelParams::drift_diffusion(m, D, t, v).unwrap(),
        DiskRegion::new(r).unwrap(),
    )
    .unwrap()
}

#[test]
fn free_density_normalized_on_grid() {
    for &r in &[1.2e-3, 3e-3, 8e-3, 1.8] {
        for &t in &[1.0, 100.0, 300.0] {
            let dist = free(r, 1.0, t);
            let lib = dist.normalization(DriftBranches::TwoBranch).unwrap();
            assert!((lib - 1.0).abs() < 1e-6, "r={r} t={t}: {lib}");
            let (lo, hi) = dist.log_support();
            let oracle = common::simpson_sin2(|s| dist.log_pdf_density(s), lo, hi, 20_000);
            assert!((oracle - 1.0).abs() < 1e-6, "r={r} t={t}: oracle {oracle}");
        }
    }
}

#[test]
fn free_density_in_linear_space() {
    // small r^2/(Dt) keeps the whole support representable
    for &(r, t) in &[(3e-3, 1.0), (3e-3, 3600.0), (8e-3, 3600.0), (1.2e-3, 100.0)] {
        let dist = free(r, 1.0, t);
        let (lo, hi) = dist.support();
        if lo > 0.0 {
            let total = common::simpson_sin2(|y| dist.free_pdf(y).unwrap(), lo, hi, 200_000);
            // the density is O(1/y) near y_min when r^2/(Dt) is large; only
            // check where the substitution resolves it
            if (hi / lo).ln() < 5.0 {
                assert!((total - 1.0).abs() < 1e-6, "r={r} t={t}: {total}");
            }
        }
        for i in 1..200 {
            let y = lo + (hi - lo) * i as f64 / 200.0;
            let got = dist.free_pdf(y).unwrap();
            let want = common::free_pdf(y, 1.0, D, t, r);
            assert!(
                common::rel_err(got, want) < 1e-9,
                "r={r} t={t} y={y}: {got} vs {want}"
            );
            let via_log = dist.log_pdf_density(y.ln()) / y;
            assert!(common::rel_err(via_log, want) < 1e-9);
        }
    }
}

#[test]
fn support_bounds() {
    let dist = free(3e-3, 2.0, 100.0);
    let (lo, hi) = dist.support();
    assert_eq!(hi, 2.0 / (4.0 * std::f64::consts::PI * D * 100.0));
    assert!(common::rel_err(lo / hi, (-9e-6f64 / (D * 100.0)).exp()) < 1e-12);
    assert_eq!(dist.free_pdf(hi * (1.0 + 1e-12)).unwrap(), 0.0);
    assert_eq!(dist.free_pdf(lo * (1.0 - 1e-12)).unwrap(), 0.0);

    let d = drift(2.0, 1.0, 1e9, 1e-9);
    let (_, hi) = d.support();
    assert_eq!(hi, d.params().peak_response());
    // vt beyond the diameter: peak is out of reach
    let far = drift(0.2, 1.0, 1e9, 1e-9);
    assert!(far.support().1 < far.params().peak_response());
}

#[test]
fn quadrature_cdf_matches_closed_form() {
    for &(r, t) in &[
        (3e-3, 1.0),
        (3e-3, 3600.0),
        (8e-3, 3600.0),
        (1.2e-3, 100.0),
        (1.8, 300.0),
    ] {
        let dist = free(r, 1.0, t);
        let (lo, hi) = dist.log_support();
        for i in 0..=100 {
            let s = lo + (hi - lo) * i as f64 / 100.0;
            let got = dist.cdf_log(s).unwrap();
            let want = common::free_cdf_log(s, 1.0, D, t, r);
            assert!(
                (got - want).abs() < 1e-9,
                "r={r} t={t} i={i}: {got} vs {want}"
            );
        }
        let (ylo, yhi) = dist.support();
        assert_eq!(dist.free_cdf_quadrature(ylo * 0.5).unwrap(), 0.0);
        assert_eq!(dist.free_cdf_quadrature(yhi).unwrap(), 1.0);
        assert!(dist.free_cdf_quadrature(ylo).unwrap().abs() < 1e-6);
    }
}

#[test]
fn quadrature_cdf_monotone_and_differentiates_to_pdf() {
    for &(r, t) in &[(3e-3, 3600.0), (8e-3, 3600.0), (1.2e-3, 100.0), (3e-3, 1.0)] {
        let dist = free(r, 1.0, t);
        let (lo, hi) = dist.support();
        let h = 1e-4 * (hi - lo);
        let mut last = 0.0;
        for i in 1..100 {
            let y = lo + (hi - lo) * (0.02 + 0.96 * i as f64 / 100.0);
            let c = dist.free_cdf_quadrature(y).unwrap();
            assert!(c >= last);
            last = c;
            let slope = (dist.free_cdf_quadrature(y + h).unwrap()
                - dist.free_cdf_quadrature(y - h).unwrap())
                / (2.0 * h);
            let pdf = dist.free_pdf(y).unwrap();
            assert!(
                common::rel_err(slope, pdf) < 1e-3,
                "r={r} t={t} y={y}: {slope} vs {pdf}"
            );
        }
    }
}

#[test]
fn series_matches_quadrature_where_converged() {
    let trunc = SeriesTruncation::default();
    let mut converged = 0;
    for &(r, t) in &[(3e-3, 3600.0), (8e-3, 3600.0), (1.2e-3, 100.0), (3e-3, 1.0)] {
        let dist = free(r, 1.0, t);
        let (lo, hi) = dist.log_support();
        for i in 0..=200 {
            let s = lo + (hi - lo) * i as f64 / 200.0;
            let series = dist.free_cdf_series_log(s, &trunc).unwrap();
            let quad = dist.cdf_log(s).unwrap();
            assert!((0.0..=1.0).contains(&series.value));
            if series.status == SeriesStatus::Converged {
                converged += 1;
                assert!((series.value - quad).abs() < 1e-3, "r={r} t={t} s={s}");
                assert!((series.value - common::free_cdf_log(s, 1.0, D, t, r)).abs() < 1e-3);
            }
        }
        let top = dist.free_cdf_series(dist.support().1, &trunc).unwrap();
        assert_eq!(top.status, SeriesStatus::Converged);
        assert!((top.value - 1.0).abs() < 1e-4);
        let bottom = dist.free_cdf_series_log(lo, &trunc).unwrap();
        if bottom.status == SeriesStatus::Converged {
            assert!(bottom.value.abs() < 1e-4);
        }
    }
    assert!(converged > 400);
}

#[test]
fn series_on_wide_disk() {
    let trunc = SeriesTruncation::default();
    for &r in &[1.8, 2.25] {
        let dist = free(r, 1.0, 300.0);
        for i in 0..=90 {
            let y = 1.0 + i as f64 * 0.1;
            let series = dist.free_cdf_series(y, &trunc).unwrap();
            let quad = dist.free_cdf_quadrature(y).unwrap();
            assert_eq!(series.status, SeriesStatus::Converged, "r={r} y={y}");
            assert!((series.value - quad).abs() < 1e-3);
            assert!((quad - common::free_cdf(y, 1.0, D, 300.0, r)).abs() < 1e-9);
        }
    }
}

#[test]
fn still_drift_matches_change_of_variables() {
    let (r, t) = (2.0, 1e9);
    let dist = drift(r, 1.0, t, 0.0);
    let (lo, hi) = dist.support();
    let spread = 4.0 * D * t;
    for i in 1..400 {
        let y = lo + (hi - lo) * i as f64 / 400.0;
        let x = (-spread * (y / hi).ln()).sqrt();
        let want = common::disk_pdf(x, r) * 2.0 * D * t / (x * y);
        let got = dist.drift_pdf(y, DriftBranches::TwoBranch).unwrap();
        assert!(common::rel_err(got, want) < 1e-8, "y={y}: {got} vs {want}");
        let single = dist.drift_pdf(y, DriftBranches::PaperSingleBranch).unwrap();
        assert_eq!(single, got);
    }
}

#[test]
fn drift_normalization_and_single_branch_mass() {
    for &(r, v) in &[
        (2.0, 1e-9),
        (4.0, 1e-9),
        (2.0, 3e-9),
        (4.0, 0.5e-9),
        (2.0, 0.0),
    ] {
        let t = 1e9;
        let dist = drift(r, 1.0, t, v);
        let vt = v * t;
        assert!(vt < 2.0 * r);
        let two = dist.normalization(DriftBranches::TwoBranch).unwrap();
        assert!((two - 1.0).abs() < 1e-4, "r={r} v={v}: {two}");
        let single = dist
            .normalization(DriftBranches::PaperSingleBranch)
            .unwrap();
        let beyond = 1.0 - common::disk_cdf(vt, r);
        assert!(
            (single - beyond).abs() < 1e-4,
            "r={r} v={v}: {single} vs {beyond}"
        );
        assert!(
            (dist
                .drift_cdf(dist.support().1, DriftBranches::PaperSingleBranch)
                .unwrap()
                - beyond)
                .abs()
                < 1e-4
        );
    }
}

#[test]
fn drift_cdf_matches_closed_form() {
    for &(r, v) in &[(2.0, 1e-9), (4.0, 1e-9), (1.0, 3e-9)] {
        let t = 1e9;
        let dist = drift(r, 1.0, t, v);
        let (lo, hi) = dist.log_support();
        for i in 0..=100 {
            let s = lo + (hi - lo) * i as f64 / 100.0;
            let got = dist.cdf_log(s).unwrap();
            let want = common::drift_cdf_log(s, 1.0, D, t, v, r);
            assert!(
                (got - want).abs() < 1e-8,
                "r={r} v={v} i={i}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn drift_above_peak_is_an_error() {
    let dist = drift(2.0, 1.0, 1e9, 1e-9);
    let peak = dist.params().peak_response();
    assert!(dist
        .drift_pdf(peak * 1.001, DriftBranches::TwoBranch)
        .is_err());
    assert!(
        dist.drift_pdf(peak * 0.5, DriftBranches::TwoBranch)
            .unwrap()
            > 0.0
    );
}

#[test]
fn single_precision_distribution() {
    let dist = molrss::analytic::SignalDistribution::<f32>::new(
        molrss::channel::ChannelParams::<f32>::free_diffusion(1.0, 1e-9, 3600.0).unwrap(),
        molrss::geometry::DiskRegion::<f32>::new(3e-3).unwrap(),
    )
    .unwrap();
    let total = dist.normalization(DriftBranches::TwoBranch).unwrap();
    assert!((total - 1.0).abs() < 1e-4);
    let (lo, hi) = dist.support();
    let mid = 0.5 * (lo + hi);
    let want = common::free_cdf(mid as f64, 1.0, D, 3600.0, 3e-3);
    assert!((dist.cdf(mid).unwrap() as f64 - want).abs() < 1e-4);
}
