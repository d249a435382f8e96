use proptest::prelude::*;
use rydspec::angular::{clebsch_gordan, triangle, wigner_3j, wigner_6j, HalfInt};

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Direct Racah/van der Waerden formula for <j1 m1 j2 m2 | J M> on doubled
/// arguments, plain factorials. Only valid for small j.
fn cg_oracle(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return 0.0;
    }
    let (a, b, c) = ((j1 + j2 - j) / 2, (j1 - j2 + j) / 2, (-j1 + j2 + j) / 2);
    let pre = ((j + 1) as f64 * fact(a) * fact(b) * fact(c) / fact((j1 + j2 + j) / 2 + 1)).sqrt()
        * (fact((j + m) / 2)
            * fact((j - m) / 2)
            * fact((j1 - m1) / 2)
            * fact((j1 + m1) / 2)
            * fact((j2 - m2) / 2)
            * fact((j2 + m2) / 2))
            .sqrt();
    let mut sum = 0.0;
    for k in 0..=(j1 + j2 + j) {
        let d = [
            k,
            a - k,
            (j1 - m1) / 2 - k,
            (j2 + m2) / 2 - k,
            (j - j2 + m1) / 2 + k,
            (j - j1 - m2) / 2 + k,
        ];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / d.iter().map(|&x| fact(x)).product::<f64>();
    }
    pre * sum
}

fn valid_m(j: i32, seed: u32) -> i32 {
    -j + 2 * (seed % (j as u32 + 1)) as i32
}

#[test]
fn three_j_orthogonality_brute_force() {
    // j1 = 2, j2 = 3/2, j3 = 5/2
    let (j1, j2, j3) = (4, 3, 5);
    for m3 in h(j3).projections() {
        let mut total = 0.0;
        for m1 in h(j1).projections() {
            for m2 in h(j2).projections() {
                let v = wigner_3j(h(j1), h(j2), h(j3), m1, m2, -m3).unwrap();
                total += (j3 + 1) as f64 * v * v;
            }
        }
        assert!((total - 1.0).abs() < 1e-12, "m3={m3}: {total}");
    }
}

#[test]
fn three_j_orthogonality_up_to_j10() {
    for j1 in 0i32..=20 {
        for j2 in 0..=20 {
            for j3 in ((j1 - j2).abs()..=(j1 + j2).min(20)).step_by(2) {
                let m3 = j3 % 2;
                let mut total = 0.0;
                for m1 in h(j1).projections() {
                    let m2 = h(-m3) - m1;
                    if m2.twice().abs() > j2 {
                        continue;
                    }
                    let v = wigner_3j(h(j1), h(j2), h(j3), m1, m2, h(m3)).unwrap();
                    total += (j3 + 1) as f64 * v * v;
                }
                assert!((total - 1.0).abs() < 1e-10, "({j1} {j2} {j3}): {total}");
            }
        }
    }
}

#[test]
fn six_j_orthogonality() {
    // sum_x (2x+1)(2j+1) {a b x; c d j}{a b x; c d j'} = delta_jj'
    let (a, b, c, d) = (4, 3, 5, 6);
    let js: Vec<i32> = (0..=20).filter(|&j| triangle(a, d, j) && triangle(c, b, j)).collect();
    assert!(js.len() > 2);
    for &j in &js {
        for &jp in &js {
            let mut total = 0.0;
            for x in 0..=20 {
                let s1 = wigner_6j(h(a), h(b), h(x), h(c), h(d), h(j)).unwrap();
                let s2 = wigner_6j(h(a), h(b), h(x), h(c), h(d), h(jp)).unwrap();
                total += (x + 1) as f64 * (j + 1) as f64 * s1 * s2;
            }
            let expect = if j == jp { 1.0 } else { 0.0 };
            assert!((total - expect).abs() < 1e-10, "j={j} j'={jp}: {total}");
        }
    }
}

#[test]
fn six_j_orthogonality_all_small() {
    for a in 0..=8 {
        for b in 0..=8 {
            for c in 0..=8 {
                for d in 0..=8 {
                    for j in 0..=16 {
                        if !(triangle(a, d, j) && triangle(c, b, j)) {
                            continue;
                        }
                        let total: f64 = (0..=16)
                            .map(|x| {
                                let s = wigner_6j(h(a), h(b), h(x), h(c), h(d), h(j)).unwrap();
                                (x + 1) as f64 * (j + 1) as f64 * s * s
                            })
                            .sum();
                        assert!((total - 1.0).abs() < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn clebsch_gordan_against_direct_formula() {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 33) as u32
    };
    let mut checked = 0;
    while checked < 1000 {
        let j1 = (next() % 13) as i32;
        let j2 = (next() % 13) as i32;
        let lo = (j1 - j2).abs();
        let j = lo + 2 * (next() % ((j1 + j2 - lo) / 2 + 1) as u32) as i32;
        let m1 = valid_m(j1, next());
        let m2 = valid_m(j2, next());
        if (m1 + m2).abs() > j {
            continue;
        }
        let got = clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(j), h(m1 + m2)).unwrap_or_else(|e| panic!("{j1} {m1} {j2} {m2} {j}: {e}"));
        let want = cg_oracle(j1, m1, j2, m2, j, m1 + m2);
        assert!((got - want).abs() < 1e-12, "({j1} {m1} {j2} {m2} | {j}): {got} vs {want}");
        checked += 1;
    }
}

proptest! {
    #[test]
    fn three_j_column_permutations(
        j1 in 0i32..16, j2 in 0i32..16, j3r in 0u32..40, m1r in 0u32..40, m2r in 0u32..40
    ) {
        let lo = (j1 - j2).abs();
        let j3 = lo + 2 * (j3r as i32 % ((j1 + j2 - lo) / 2 + 1));
        let m1 = valid_m(j1, m1r);
        let m2 = valid_m(j2, m2r);
        let m3 = -m1 - m2;
        prop_assume!(m3.abs() <= j3);
        let (a, b, c) = (h(j1), h(j2), h(j3));
        let (x, y, z) = (h(m1), h(m2), h(m3));
        let base = wigner_3j(a, b, c, x, y, z).unwrap();
        let odd_phase = if ((j1 + j2 + j3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        // even permutations
        prop_assert!((wigner_3j(b, c, a, y, z, x).unwrap() - base).abs() < 1e-12);
        prop_assert!((wigner_3j(c, a, b, z, x, y).unwrap() - base).abs() < 1e-12);
        // odd permutations and m -> -m
        prop_assert!((wigner_3j(b, a, c, y, x, z).unwrap() - odd_phase * base).abs() < 1e-12);
        prop_assert!((wigner_3j(a, c, b, x, z, y).unwrap() - odd_phase * base).abs() < 1e-12);
        prop_assert!((wigner_3j(a, b, c, -x, -y, -z).unwrap() - odd_phase * base).abs() < 1e-12);
    }

    #[test]
    fn six_j_tetrahedral_symmetry(a in 0i32..10, b in 0i32..10, c in 0i32..10, d in 0i32..10, e in 0i32..10, f in 0i32..10) {
        let base = wigner_6j(h(a), h(b), h(c), h(d), h(e), h(f)).unwrap();
        prop_assert!((wigner_6j(h(b), h(a), h(c), h(e), h(d), h(f)).unwrap() - base).abs() < 1e-12);
        prop_assert!((wigner_6j(h(d), h(e), h(c), h(a), h(b), h(f)).unwrap() - base).abs() < 1e-12);
        prop_assert!(base.is_finite());
    }
}
