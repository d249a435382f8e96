use rydspec::angular::HalfInt;
use rydspec::radial::RadialCache;
use rydspec::spectra::{
    find_peaks, fit_operating_field, fwhm, gradient_addressing_scan, hyperfine_selective_spectrum, hyperfine_strength,
    integrate, line_profile, stark_spectrum, voigt, CloudGeometry, FrequencyGrid, HfSelectRequest, LineCurve, RedLaser,
    SpectralLine, Spectrum,
};
use rydspec::stark::{stark_map, BasisSpec, MapRequest, StarkMap};
use rydspec::structure::AtomData;
use rydspec::Error;

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    FrequencyGrid::new(start, stop, step).points()
}

fn addressing_map(start: f64, step: f64, count: usize) -> StarkMap {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let fields: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    let req = MapRequest::new(
        BasisSpec {
            delta_n: 2,
            ..BasisSpec::new(41)
        },
        fields,
    );
    stark_map(&atom, &cache, &req).unwrap()
}

#[test]
fn gaussian_fwhm_matches_zeeman_width() {
    let x = grid(-20.0, 20.0, 0.01);
    let p = line_profile(&x, 0.0, 1.0, 0.0, 2.24).unwrap();
    let w = fwhm(&x, &p).unwrap();
    assert!((w - 2.24).abs() <= 0.01, "{w}");
}

#[test]
fn pure_lorentzian_width() {
    let x = grid(-50.0, 50.0, 0.01);
    let p = line_profile(&x, 3.0, 1.0, 1.5, 0.0).unwrap();
    assert!((fwhm(&x, &p).unwrap() - 1.5).abs() <= 0.01);
}

#[test]
fn profile_integral_equals_strength() {
    let x = grid(-30.0, 30.0, 0.05);
    for (l, g) in [(1.0, 0.0), (0.0, 2.0), (1.0, 3.0), (0.0, 0.0)] {
        let p = line_profile(&x, 1.3, 4.2, l, g).unwrap();
        assert!((integrate(&x, &p) - 4.2).abs() < 1e-6 * 4.2);
        assert!(p.iter().all(|v| *v >= 0.0));
    }
}

#[test]
fn profile_rejects_bad_input() {
    assert!(matches!(
        line_profile(&[1.0, 1.0], 0.0, 1.0, 1.0, 0.0),
        Err(Error::Domain(_))
    ));
    assert!(line_profile(&grid(-1.0, 1.0, 0.1), 0.0, 1.0, -1.0, 0.0).is_err());
}

#[test]
fn voigt_limits() {
    // narrow Gaussian reproduces the Lorentzian
    for x in [0.0, 0.4, 2.0] {
        let lor = voigt(x, 0.0, 1.0);
        let v = voigt(x, 1e-3, 1.0);
        assert!((v - lor).abs() < 1e-3 * lor);
    }
}

#[test]
fn area_is_invariant_under_broadening() {
    let x = grid(-100.0, 100.0, 0.05);
    let areas: Vec<f64> = [(0.5, 0.0), (2.0, 1.0), (5.0, 8.0)]
        .iter()
        .map(|&(l, g)| {
            let lines = vec![
                SpectralLine::new("a", -10.0, 2.0)
                    .with_lorentzian(&[l])
                    .with_gaussian(&[g]),
                SpectralLine::new("b", 12.0, 0.5)
                    .with_lorentzian(&[l])
                    .with_gaussian(&[g])
                    .with_tophat(6.0),
            ];
            Spectrum::synthesize(&x, lines).unwrap().integral()
        })
        .collect();
    for a in &areas {
        assert!((a - 2.5).abs() < 1e-6 * 2.5, "{a}");
    }
}

#[test]
fn gaussian_widths_add_in_quadrature() {
    let x = grid(-40.0, 40.0, 0.01);
    let widths = [2.24, 3.0, 1.1];
    let line = SpectralLine::new("q", 0.0, 1.0).with_gaussian(&widths);
    let s = Spectrum::synthesize(&x, vec![line]).unwrap();
    let want = widths.iter().map(|w| w * w).sum::<f64>().sqrt();
    let got = fwhm(&s.detuning, &s.intensity).unwrap();
    assert!((got - want).abs() < 0.02 * want, "{got} vs {want}");
}

#[test]
fn out_of_grid_lines_are_reported() {
    let x = grid(-5.0, 5.0, 0.1);
    let s = Spectrum::synthesize(
        &x,
        vec![SpectralLine::new("far", 50.0, 1.0), SpectralLine::new("in", 0.0, 1.0)],
    )
    .unwrap();
    assert_eq!(s.excluded, vec!["far".to_string()]);
    assert_eq!(s.lines.len(), 1);
}

#[test]
fn peak_finder_counts_doublet() {
    let x = grid(-30.0, 30.0, 0.1);
    let lines = |sep: f64| {
        vec![
            SpectralLine::new("a", -sep / 2.0, 1.0).with_lorentzian(&[3.0]),
            SpectralLine::new("b", sep / 2.0, 1.0).with_lorentzian(&[3.0]),
        ]
    };
    assert_eq!(Spectrum::synthesize(&x, lines(20.0)).unwrap().peaks(0.01).len(), 2);
    assert_eq!(Spectrum::synthesize(&x, lines(1.0)).unwrap().peaks(0.01).len(), 1);
    assert_eq!(find_peaks(&[0.0; 10], 0.01).len(), 0);
}

#[test]
fn addressing_scan_properties() {
    let map = addressing_map(5.0, 0.02, 101);
    let d = 500.0;

    // without a gradient every offset sees the same field
    let flat = CloudGeometry {
        e_gradient: 0.0,
        ..CloudGeometry::default()
    };
    let offsets = [-d, -100.0, 0.0, 250.0, d];
    for trace in gradient_addressing_scan(&map, &flat, 6.0, &offsets, &[1.0]).unwrap() {
        let c0 = trace.points[0].center_mhz;
        assert!(trace.points.iter().all(|p| p.center_mhz == c0));
    }

    // shift ratio follows the ratio of finite-difference slopes on the map
    let geom = CloudGeometry::default();
    let i = 50;
    let e0 = map.fields[i];
    let a = map.target_index("41D5/2").unwrap();
    let b = map.target_index("41D3/2").unwrap();
    let fd = |t: usize| {
        let ea = map.target_energies(t);
        (ea[i + 1] - ea[i - 1]) / (map.fields[i + 1] - map.fields[i - 1])
    };
    let half = 5.0;
    let traces = gradient_addressing_scan(&map, &geom, e0, &[-half, half], &[]).unwrap();
    let shift = |t: &rydspec::spectra::AddressingTrace| t.points[1].center_mhz - t.points[0].center_mhz;
    let ratio = shift(&traces[a]) / shift(&traces[b]);
    let oracle = fd(a) / fd(b);
    assert!((ratio / oracle - 1.0).abs() < 1e-3, "{ratio} vs {oracle}");

    // sweeping the field out of the map is an explicit error
    let err = gradient_addressing_scan(&map, &geom, 6.9, &[1000.0], &[]).unwrap_err();
    assert!(matches!(err, Error::OutOfRange { .. }));
}

/// Worst residual of a straight-line fit relative to the spread of `ys`.
fn linear_residual(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let k = sxy / sxx;
    let span = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (y - my - k * (x - mx)).abs())
        .fold(0.0, f64::max)
        / span
}

#[test]
fn addressing_shift_is_linear_where_slope_is() {
    let map = addressing_map(2.0, 0.05, 161);
    let mut checked = 0;
    for d in [500.0, 250.0, 100.0] {
        let geom = CloudGeometry {
            diameter_um: d,
            ..CloudGeometry::default()
        };
        let reach = geom.e_gradient * d / 1e4;
        let offsets: Vec<f64> = (-10..=10).map(|k| k as f64 * d / 10.0).collect();
        for target in &map.targets {
            let curve = LineCurve::from_map(&map, target).unwrap();
            for k in 0..=40 {
                let e0 = 2.0 + reach + k as f64 * (8.0 - 2.0 * reach) / 40.0;
                // local linearity of the slope itself, judged on the map
                let (lo, mid, hi) = (
                    curve.slope(e0 - reach).unwrap(),
                    curve.slope(e0).unwrap(),
                    curve.slope(e0 + reach).unwrap(),
                );
                // a quadratic's straight-line residual is a twelfth of this
                if (hi - lo).abs() > 0.1 * mid.abs() {
                    continue;
                }
                let traces = gradient_addressing_scan(&map, &geom, e0, &offsets, &[]).unwrap();
                let trace = traces.iter().find(|t| &t.target == target).unwrap();
                let ys: Vec<f64> = trace.points.iter().map(|p| p.shift_mhz).collect();
                let r = linear_residual(&offsets, &ys);
                assert!(r < 0.01, "{target} at {e0}: residual {r}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn operating_field_reproduces_shift_ratio() {
    let map = addressing_map(0.0, 0.05, 121);
    let geom = CloudGeometry::default();
    let fit = fit_operating_field(&map, &geom, ("41D5/2", "41D3/2"), 98.0 / 75.0, geom.diameter_um).unwrap();
    assert!((fit.ratio.abs() / (98.0 / 75.0) - 1.0).abs() < 0.1, "{fit:?}");
    let curve = LineCurve::from_map(&map, "41D5/2").unwrap();
    assert!(curve.frequency(fit.e0).is_ok());
}

#[test]
fn stark_spectrum_area() {
    let map = addressing_map(0.0, 0.5, 13);
    let geom = CloudGeometry::default();
    let x = grid(-3000.0, 1000.0, 0.5);
    let s = stark_spectrum(&map, 8, &geom, &[2.24], &[1.0], &x, 1e-6).unwrap();
    let inside: f64 = s.lines.iter().map(|l| l.strength).sum();
    assert!((s.integral() - inside).abs() < 1e-6 * inside);
}

#[test]
fn hyperfine_factors_sum_to_one() {
    let h = HalfInt::from_twice;
    for f in [1, 2] {
        let total: f64 = [0, 1, 2, 3]
            .iter()
            .filter_map(|&fp| hyperfine_strength(h(1), HalfInt::integer(f), h(3), HalfInt::integer(fp), h(3)).ok())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "F={f}: {total}");
    }
}

fn hf_grid() -> FrequencyGrid {
    FrequencyGrid::new(-800.0, 400.0, 0.5)
}

#[test]
fn hyperfine_paths_are_split_by_intermediate_interval() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let s = hyperfine_selective_spectrum(&atom, &cache, &HfSelectRequest::new(0.5, hf_grid())).unwrap();
    let center = |label: &str| s.lines.iter().find(|l| l.label == label).unwrap().center;
    let sep = center("F1_F'1_41D5/2") - center("F2_F'3_41D5/2");
    assert!((sep - 423.0).abs() < 2.0, "{sep}");
    assert_eq!(s.peaks(0.01).len(), 4);
}

#[test]
fn hyperfine_strengths_follow_populations() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let strength = |s: &Spectrum, label: &str| s.lines.iter().find(|l| l.label == label).map_or(0.0, |l| l.strength);

    let none = hyperfine_selective_spectrum(&atom, &cache, &HfSelectRequest::new(0.0, hf_grid())).unwrap();
    assert_eq!(strength(&none, "F1_F'1_41D5/2"), 0.0);
    assert!(strength(&none, "F2_F'3_41D5/2") > 0.0);

    // equal dipole factors: the same red transition strength on both paths
    let mut req = HfSelectRequest::new(0.3, hf_grid());
    req.lasers = vec![
        RedLaser {
            ground_f: HalfInt::integer(1),
            intermediate_f: HalfInt::integer(2),
            detuning_mhz: 0.0,
        },
        RedLaser {
            ground_f: HalfInt::integer(2),
            intermediate_f: HalfInt::integer(2),
            detuning_mhz: 0.0,
        },
    ];
    let red1 = hyperfine_strength(
        HalfInt::from_twice(1),
        HalfInt::integer(1),
        HalfInt::from_twice(3),
        HalfInt::integer(2),
        HalfInt::from_twice(3),
    )
    .unwrap();
    let red2 = hyperfine_strength(
        HalfInt::from_twice(1),
        HalfInt::integer(2),
        HalfInt::from_twice(3),
        HalfInt::integer(2),
        HalfInt::from_twice(3),
    )
    .unwrap();
    let s = hyperfine_selective_spectrum(&atom, &cache, &req).unwrap();
    let r = (strength(&s, "F1_F'2_41D3/2") / red1) / (strength(&s, "F2_F'2_41D3/2") / red2);
    assert!((r - 0.3 / 0.7).abs() < 1e-12, "{r}");
}

#[test]
fn missing_lock_point_is_config_error() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let mut req = HfSelectRequest::new(0.2, hf_grid());
    req.lasers.retain(|l| l.ground_f == HalfInt::integer(2));
    assert!(matches!(
        hyperfine_selective_spectrum(&atom, &cache, &req),
        Err(Error::Config(_))
    ));
    req.f1_fraction = 0.0;
    assert!(hyperfine_selective_spectrum(&atom, &cache, &req).is_ok());
}
