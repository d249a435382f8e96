use rydspec::angular::{wigner_3j, wigner_6j, HalfInt};
use rydspec::radial::{radial_dipole, RadialCache};
use rydspec::stark::{
    angular_dipole, build_hamiltonian, eigh, hyperfine_stark_lines, manifold_fan, residual_field_bound, stark_map,
    BasisSpec, HyperfineRequest, MapRequest, StarkOperator,
};
use rydspec::structure::AtomData;
use rydspec::units::{v_per_cm_to_au, HARTREE_GHZ};
use rydspec::Error;

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn small_spec() -> BasisSpec {
    BasisSpec { delta_n: 1, l_max: Some(6), ..BasisSpec::new(41) }
}

#[test]
fn zero_field_hamiltonian_is_diagonal() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let spec = small_spec();
    let op = StarkOperator::new(&atom, &cache, &spec).unwrap();
    let h0 = build_hamiltonian(&atom, &cache, &spec, 0.0).unwrap();
    for i in 0..op.len() {
        for k in 0..op.len() {
            let want = if i == k { op.basis.energies[i] } else { 0.0 };
            assert_eq!(h0[(i, k)], want);
        }
    }
}

#[test]
fn hamiltonian_is_symmetric() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    for m in [1, 3, -5] {
        let spec = small_spec().with_m(h(m));
        let hm = build_hamiltonian(&atom, &cache, &spec, 7.3).unwrap();
        for i in 0..hm.nrows() {
            for k in 0..i {
                assert!((hm[(i, k)] - hm[(k, i)]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn off_diagonal_element_hand_composed() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let spec = small_spec();
    let op = StarkOperator::new(&atom, &cache, &spec).unwrap();
    let a = op.basis.find_label("41D3/2").unwrap();
    let b = op.basis.find_label("41P1/2").unwrap();
    let (la, lb) = (op.basis.states[a].level, op.basis.states[b].level);

    // <l j m| z |l' j' m> = (-1)^(j-m) (j 1 j'; -m 0 m)
    //   * (-1)^(l+s+j'+1) sqrt((2j+1)(2j'+1)) {l j s; j' l' 1}
    //   * (-1)^l sqrt((2l+1)(2l'+1)) (l 1 l'; 0 0 0) * <r>
    let (j, jp, m) = (h(3), h(1), h(1));
    let (l, lp) = (HalfInt::integer(2), HalfInt::integer(1));
    let three = wigner_3j(j, HalfInt::ONE, jp, -m, HalfInt::ZERO, m).unwrap();
    let six = wigner_6j(l, j, HalfInt::HALF, jp, lp, HalfInt::ONE).unwrap();
    let lred = wigner_3j(l, HalfInt::ONE, lp, HalfInt::ZERO, HalfInt::ZERO, HalfInt::ZERO).unwrap();
    // (-1)^(3/2-1/2) = -1, (-1)^(2+1/2+1/2+1) = 1, (-1)^2 = 1
    let ang = -three * (4.0f64 * 2.0).sqrt() * six * (5.0f64 * 3.0).sqrt() * lred;
    let want = ang * radial_dipole(&la, &lb).unwrap();
    assert!((op.z[(a, b)] - want).abs() < 1e-9 * want.abs().max(1.0), "{} vs {want}", op.z[(a, b)]);
    assert!((angular_dipole(2, j, m, 1, jp, m, 0).unwrap() - ang).abs() < 1e-12);
}

#[test]
fn angular_factor_reproduces_hydrogen_ladder_sum_rule() {
    // sum over final j' and m' of |<l j m| C1_q |l' j' m'>|^2 = sum over q of the spinless value
    // (l+1)/(2l+1) for l' = l+1 and l/(2l+1) for l' = l-1
    for l in 1u32..6 {
        for tj in [2 * l as i32 - 1, 2 * l as i32 + 1] {
            for tm in (-tj..=tj).step_by(2) {
                for (lp, want) in [(l + 1, (l + 1) as f64 / (2 * l + 1) as f64), (l - 1, l as f64 / (2 * l + 1) as f64)] {
                    let mut total = 0.0;
                    for tjp in [2 * lp as i32 - 1, 2 * lp as i32 + 1] {
                        if tjp < 1 {
                            continue;
                        }
                        for q in -1..=1 {
                            let tmp = tm - 2 * q;
                            if tmp.abs() > tjp {
                                continue;
                            }
                            let v = angular_dipole(l, h(tj), h(tm), lp, h(tjp), h(tmp), q).unwrap();
                            total += v * v;
                        }
                    }
                    assert!((total - want).abs() < 1e-12, "l={l} j={tj}/2 m={tm}/2 l'={lp}: {total} vs {want}");
                }
            }
        }
    }
}

#[test]
fn capacity_limit_is_explicit() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let spec = BasisSpec { capacity: 50, ..BasisSpec::new(40) };
    match StarkOperator::new(&atom, &cache, &spec) {
        Err(Error::Capacity { size, limit }) => {
            assert_eq!(limit, 50);
            assert!(size > 50);
        }
        other => panic!("expected capacity error, got {other:?}"),
    }
}

#[test]
fn hydrogenic_linear_stark_ladder() {
    let atom = AtomData::rb87().zero_defects();
    let cache = RadialCache::default();
    let n = 10u32;
    let spec = BasisSpec::new(n);
    let op = StarkOperator::new(&atom, &cache, &spec).unwrap();
    let e_n = -atom.rydberg_ghz / (n * n) as f64;
    let f = 1.0;
    let fan = |field: f64| -> Vec<f64> {
        let (vals, _) = eigh(&op.hamiltonian(field, e_n)).unwrap();
        vals.into_iter().filter(|v| v.abs() < 500.0).collect()
    };
    let (l1, l2) = (fan(f), fan(2.0 * f));
    // m_j = 1/2 holds one state per k = -(n-1)..(n-1)
    assert_eq!(l1.len(), l2.len());
    let fa = v_per_cm_to_au(f);
    let mut slopes: Vec<f64> = l1
        .iter()
        .zip(&l2)
        .map(|(a, b)| (4.0 * a - b) / (2.0 * fa) / HARTREE_GHZ)
        .collect();
    slopes.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let ks: Vec<i32> = (-(n as i32 - 1)..=(n as i32 - 1)).collect();
    assert_eq!(slopes.len(), ks.len(), "{slopes:?}");
    let nf = n as f64;
    for (s, k) in slopes.iter().zip(&ks) {
        let want = 1.5 * nf * *k as f64;
        if *k == 0 {
            assert!(s.abs() < 1e-4 * 1.5 * nf, "k=0: {s}");
        } else {
            assert!((s / want - 1.0).abs() < 1e-4, "k={k}: {s} vs {want}");
        }
    }
}

#[test]
fn low_l_quadratic_shift_matches_perturbation_theory() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let spec = BasisSpec::new(41);
    let op = StarkOperator::new(&atom, &cache, &spec).unwrap();
    for label in ["41D5/2", "41D3/2", "43S1/2"] {
        let t = op.basis.find_label(label).unwrap();
        let e_t = op.basis.energies[t];
        let shift = |field: f64| -> f64 {
            let (vals, _) = eigh(&op.hamiltonian(field, e_t)).unwrap();
            vals.into_iter().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap()
        };
        let f = 0.02;
        let (s1, s2) = (shift(f), shift(2.0 * f));
        // a F^2 + c F^4: Richardson removes the quartic term
        let fitted = (16.0 * s1 - s2) / (12.0 * f * f);
        let mut pt = 0.0;
        for k in 0..op.len() {
            if k != t {
                let z = op.z[(t, k)] * HARTREE_GHZ;
                pt += z * z / (e_t - op.basis.energies[k]);
            }
        }
        let pt = pt * v_per_cm_to_au(1.0).powi(2);
        assert!((fitted / pt - 1.0).abs() < 0.01, "{label}: fitted {fitted} GHz/(V/cm)^2 vs {pt}");
    }
}

#[test]
fn quadratic_and_linear_regimes() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let spec = BasisSpec::new(40);
    let op = StarkOperator::new(&atom, &cache, &spec).unwrap();
    let d = op.basis.find_label("41D5/2").unwrap();
    let track = |field: f64, idx: usize| -> f64 {
        let (vals, vecs) = eigh(&op.hamiltonian(field, op.basis.energies[idx])).unwrap();
        let best = (0..op.len()).max_by(|&a, &b| vecs[(idx, a)].abs().total_cmp(&vecs[(idx, b)].abs())).unwrap();
        vals[best]
    };
    // D state: doubling a small field quadruples the shift
    let (a, b) = (track(0.05, d), track(0.1, d));
    assert!((b / a - 4.0).abs() < 0.05, "{a} {b}");
    // extreme manifold state: doubling the field doubles the shift
    let e40 = -atom.rydberg_ghz / 1600.0;
    let (vals1, _) = eigh(&op.hamiltonian(0.05, e40)).unwrap();
    let (vals2, _) = eigh(&op.hamiltonian(0.1, e40)).unwrap();
    let top = |v: &[f64]| v.iter().copied().filter(|x| x.abs() < 20.0).fold(f64::MIN, f64::max);
    let (t1, t2) = (top(&vals1), top(&vals2));
    assert!((t2 / t1 - 2.0).abs() < 0.01, "{t1} {t2}");
}

#[test]
fn plus_minus_m_blocks_are_degenerate() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    for m in [1, 3, 5] {
        let hp = build_hamiltonian(&atom, &cache, &small_spec().with_m(h(m)), 12.0).unwrap();
        let hm = build_hamiltonian(&atom, &cache, &small_spec().with_m(h(-m)), 12.0).unwrap();
        let (vp, _) = eigh(&hp).unwrap();
        let (vm, _) = eigh(&hm).unwrap();
        for (a, b) in vp.iter().zip(&vm) {
            assert!((a - b).abs() < 1e-9, "m={m}/2: {a} {b}");
        }
    }
}

#[test]
fn map_invariants() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let fields: Vec<f64> = (0..=20).map(|i| i as f64).collect();
    let req = MapRequest::new(BasisSpec { delta_n: 2, ..BasisSpec::new(40) }, fields);
    let map = stark_map(&atom, &cache, &req).unwrap();
    let n = map.track_count();
    let tr0 = map.trace(0);
    let s0 = map.total_strength(0);
    for i in 0..map.fields.len() {
        assert_eq!(map.energies[i].len(), n);
        assert!((map.trace(i) - tr0).abs() < 1e-6, "trace drift {}", map.trace(i) - tr0);
        assert!((map.total_strength(i) - s0).abs() < 1e-8 * s0.max(1.0));
        for t in 0..map.targets.len() {
            let total: f64 = (0..n).map(|k| map.characters[i][k][t]).sum();
            assert!(total <= 1.0 + 1e-9);
            for k in 0..n {
                let c = map.characters[i][k][t];
                assert!((-1e-15..=1.0 + 1e-12).contains(&c));
            }
        }
    }
    // at zero field the target tracks are pure
    for t in 0..map.targets.len() {
        let k = map.dominant_track(t, 0);
        assert!((map.characters[0][k][t] - 1.0).abs() < 1e-12);
    }
    // the D tracks keep their character through the first volts per cm
    let d52 = map.target_index("41D5/2").unwrap();
    let k0 = map.dominant_track(d52, 0);
    assert!(map.characters[1][k0][d52] > 0.9);
}

#[test]
fn map_rejects_bad_grids() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let spec = small_spec();
    for fields in [vec![], vec![0.0, 1.0, 1.0], vec![0.0, 2.0, 1.0], vec![0.0, f64::NAN]] {
        let req = MapRequest::new(spec.clone(), fields);
        assert!(matches!(stark_map(&atom, &cache, &req), Err(Error::Config(_))));
    }
}

#[test]
fn hyperfine_line_counts() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let req = HyperfineRequest::new(BasisSpec { delta_n: 2, l_max: Some(8), ..BasisSpec::new(41) });
    let sets = hyperfine_stark_lines(&atom, &cache, &req, &[1e-3]).unwrap();
    let set = &sets[0];
    let f = |v: i32| HalfInt::integer(v);
    assert_eq!(set.components("41D5/2", 1e-3), [f(2), f(3), f(4)].into_iter().collect());
    assert_eq!(set.components("41D3/2", 1e-3), [f(2), f(3)].into_iter().collect());
}

fn distinct(mut v: Vec<f64>, tol: f64) -> usize {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < tol);
    v.len()
}

#[test]
fn zero_hyperfine_constant_collapses_f_lines() {
    let spec = BasisSpec { delta_n: 1, l_max: Some(6), ..BasisSpec::new(41) };
    let cache = RadialCache::default();
    let energies = |atom: &AtomData, field: f64| -> Vec<f64> {
        let sets = hyperfine_stark_lines(atom, &cache, &HyperfineRequest::new(spec.clone()), &[field]).unwrap();
        sets[0].lines.iter().filter(|l| l.level == "41D5/2").map(|l| l.energy_mhz).collect()
    };
    let bare = AtomData::rb87().scale_rydberg_hyperfine(0.0);
    // without hyperfine coupling only the |m_j| Stark pattern remains
    assert_eq!(distinct(energies(&bare, 0.0), 1e-6), 1);
    assert_eq!(distinct(energies(&bare, 2.0), 1e-6), 3);
    // with it, F = 1..4 separate at zero field
    assert_eq!(distinct(energies(&AtomData::rb87(), 0.0), 1e-6), 4);
}

#[test]
fn residual_field_bound_scaling() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let fan = manifold_fan(&atom, &cache, &BasisSpec { delta_n: 2, ..BasisSpec::new(40) }, 40, 0.01).unwrap();
    let b = residual_field_bound(&fan, 2.2).unwrap();
    assert!(b > 0.0 && b < 1.0, "{b}");
    let b2 = residual_field_bound(&fan, 4.4).unwrap();
    assert!((b2 / b - 2.0).abs() < 1e-12);
    assert!(residual_field_bound(&fan, 1e-12).unwrap() < 1e-12);
    assert!(residual_field_bound(&fan, 0.0).is_err());
    assert!(residual_field_bound(&fan, -1.0).is_err());
}

#[test]
fn d_levels_converged_in_delta_n() {
    let atom = AtomData::rb87();
    let cache = RadialCache::default();
    let levels = |dn: u32| -> Vec<f64> {
        let op = StarkOperator::new(&atom, &cache, &BasisSpec { delta_n: dn, ..BasisSpec::new(41) }).unwrap();
        let (vals, vecs) = eigh(&op.hamiltonian(10.0, 0.0)).unwrap();
        ["41D3/2", "41D5/2"]
            .iter()
            .map(|lbl| {
                let t = op.basis.find_label(lbl).unwrap();
                let k = (0..op.len()).max_by(|&a, &b| vecs[(t, a)].abs().total_cmp(&vecs[(t, b)].abs())).unwrap();
                vals[k]
            })
            .collect()
    };
    let (a, b) = (levels(4), levels(5));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() * 1e3 < 1.0, "{x} vs {y} GHz");
    }
}
