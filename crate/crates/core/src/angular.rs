//! Angular-momentum algebra: Wigner 3j and 6j symbols and Clebsch-Gordan
//! coefficients for integer and half-integer arguments.
//!
//! Everything is evaluated with the Racah single-sum formulas in log-factorial
//! space, so arguments up to `2j = 200` (and beyond, up to [`MAX_TWICE_J`])
//! stay finite. Results are memoized in a process-wide cache keyed by the
//! packed doubled arguments.

use std::collections::HashMap;
use std::fmt;
use std::sync::{LazyLock, RwLock};

use crate::error::{Error, Result};

/// Largest doubled angular momentum accepted by default.
pub const DEFAULT_MAX_TWICE_J: i32 = 200;
/// Hard ceiling imposed by the packed cache key (10 bits per argument).
pub const MAX_TWICE_J: i32 = 511;

/// A half-integer quantum number stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(value: i32) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `2j + 1`
    pub fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    /// All projections `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let j = self.0;
        (0..=j.max(-1)).map(move |k| HalfInt(-j + 2 * k))
    }

    /// Check that `m` is a valid projection of `self`.
    pub fn check_projection(self, m: HalfInt) -> Result<()> {
        if self.0 < 0 {
            return Err(Error::InvalidHalfInt(format!("negative angular momentum {self}")));
        }
        if (self.0 - m.0) % 2 != 0 {
            return Err(Error::InvalidHalfInt(format!("parity mismatch between j={self} and m={m}")));
        }
        if m.0.abs() > self.0 {
            return Err(Error::InvalidHalfInt(format!("|m|={m} exceeds j={self}")));
        }
        Ok(())
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a plain number (`0.5`, `-1.5`, `2`).
impl serde::Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> serde::Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let twice = 2.0 * v;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > MAX_TWICE_J as f64 {
            return Err(serde::de::Error::custom(format!("{v} is not a half-integer")));
        }
        Ok(HalfInt(twice as i32))
    }
}

/// ln(k!) for k up to the largest argument any Racah sum can reach.
struct LogFactorials(Vec<f64>);

impl LogFactorials {
    fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..=max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        LogFactorials(table)
    }

    #[inline]
    fn get(&self, k: i32) -> f64 {
        debug_assert!(k >= 0);
        self.0[k as usize]
    }
}

// 6j sums reach (b + 1)! with b up to 4 * MAX_TWICE_J / 2
static LOG_FACT: LazyLock<LogFactorials> =
    LazyLock::new(|| LogFactorials::new(2 * MAX_TWICE_J as usize + 8));

static CACHE_3J: LazyLock<RwLock<HashMap<u64, f64>>> = LazyLock::new(Default::default);
static CACHE_6J: LazyLock<RwLock<HashMap<u64, f64>>> = LazyLock::new(Default::default);

fn pack(values: [i32; 6], offset: i32) -> u64 {
    values
        .iter()
        .fold(0u64, |key, &v| (key << 10) | ((v + offset) as u64 & 0x3ff))
}

fn cached(cache: &RwLock<HashMap<u64, f64>>, key: u64, compute: impl FnOnce() -> f64) -> f64 {
    if let Some(&v) = cache.read().expect("angular cache poisoned").get(&key) {
        return v;
    }
    let v = compute();
    cache.write().expect("angular cache poisoned").insert(key, v);
    v
}

/// Drop all memoized symbols.
pub fn clear_caches() {
    CACHE_3J.write().expect("angular cache poisoned").clear();
    CACHE_6J.write().expect("angular cache poisoned").clear();
}

/// Triangle rule on doubled values, including the integer-perimeter condition.
pub fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// ln Δ(abc) on doubled arguments; caller guarantees the triangle rule.
fn ln_delta(a: i32, b: i32, c: i32) -> f64 {
    let f = &*LOG_FACT;
    f.get((a + b - c) / 2) + f.get((a - b + c) / 2) + f.get((-a + b + c) / 2)
        - f.get((a + b + c) / 2 + 1)
}

/// Sum `sign_k * exp(ln_k)` without overflow by factoring out the largest term.
fn signed_log_sum(terms: &[(f64, f64)], prefactor_ln: f64) -> f64 {
    let max_ln = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if !max_ln.is_finite() {
        return 0.0;
    }
    let s: f64 = terms.iter().map(|&(sign, ln)| sign * (ln - max_ln).exp()).sum();
    s * (prefactor_ln + max_ln).exp()
}

fn check_limit(values: &[HalfInt], max_twice: i32) -> Result<()> {
    let limit = max_twice.min(MAX_TWICE_J);
    for v in values {
        if v.0.abs() > limit {
            return Err(Error::InvalidHalfInt(format!(
                "argument {v} exceeds the configured maximum 2j <= {limit}"
            )));
        }
    }
    Ok(())
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    wigner_3j_with_limit(j1, j2, j3, m1, m2, m3, DEFAULT_MAX_TWICE_J)
}

/// [`wigner_3j`] with an explicit bound on `2j`.
pub fn wigner_3j_with_limit(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
    max_twice: i32,
) -> Result<f64> {
    check_limit(&[j1, j2, j3], max_twice)?;
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j3.check_projection(m3)?;
    if m1.0 + m2.0 + m3.0 != 0 || !triangle(j1.0, j2.0, j3.0) {
        return Ok(0.0);
    }
    let key = pack([j1.0, j2.0, j3.0, m1.0, m2.0, m3.0], 512);
    Ok(cached(&CACHE_3J, key, || {
        racah_3j(j1.0, j2.0, j3.0, m1.0, m2.0, m3.0)
    }))
}

/// Racah formula on doubled arguments; selection rules already checked.
fn racah_3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    let f = &*LOG_FACT;
    let prefactor = 0.5
        * (ln_delta(j1, j2, j3)
            + f.get((j1 + m1) / 2)
            + f.get((j1 - m1) / 2)
            + f.get((j2 + m2) / 2)
            + f.get((j2 - m2) / 2)
            + f.get((j3 + m3) / 2)
            + f.get((j3 - m3) / 2));

    // all in units of 1 (undoubled) below
    let a = (j3 - j2 + m1) / 2;
    let b = (j3 - j1 - m2) / 2;
    let c = (j1 + j2 - j3) / 2;
    let d = (j1 - m1) / 2;
    let e = (j2 + m2) / 2;
    let k_min = 0.max(-a).max(-b);
    let k_max = c.min(d).min(e);
    let terms: Vec<(f64, f64)> = (k_min..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let ln = -(f.get(k)
                + f.get(a + k)
                + f.get(b + k)
                + f.get(c - k)
                + f.get(d - k)
                + f.get(e - k));
            (sign, ln)
        })
        .collect();
    let phase_exp = (j1 - j2 - m3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * signed_log_sum(&terms, prefactor)
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<f64> {
    wigner_6j_with_limit(j1, j2, j3, j4, j5, j6, DEFAULT_MAX_TWICE_J)
}

/// [`wigner_6j`] with an explicit bound on `2j`.
pub fn wigner_6j_with_limit(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
    max_twice: i32,
) -> Result<f64> {
    let all = [j1, j2, j3, j4, j5, j6];
    check_limit(&all, max_twice)?;
    if let Some(neg) = all.iter().find(|j| j.0 < 0) {
        return Err(Error::InvalidHalfInt(format!("negative angular momentum {neg}")));
    }
    let (a, b, c, d, e, g) = (j1.0, j2.0, j3.0, j4.0, j5.0, j6.0);
    if !(triangle(a, b, c) && triangle(a, e, g) && triangle(d, b, g) && triangle(d, e, c)) {
        return Ok(0.0);
    }
    let key = pack([a, b, c, d, e, g], 0);
    Ok(cached(&CACHE_6J, key, || racah_6j(a, b, c, d, e, g)))
}

fn racah_6j(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> f64 {
    let f = &*LOG_FACT;
    let prefactor = 0.5
        * (ln_delta(j1, j2, j3) + ln_delta(j1, j5, j6) + ln_delta(j4, j2, j6) + ln_delta(j4, j5, j3));
    let a1 = (j1 + j2 + j3) / 2;
    let a2 = (j1 + j5 + j6) / 2;
    let a3 = (j4 + j2 + j6) / 2;
    let a4 = (j4 + j5 + j3) / 2;
    let b1 = (j1 + j2 + j4 + j5) / 2;
    let b2 = (j2 + j3 + j5 + j6) / 2;
    let b3 = (j3 + j1 + j6 + j4) / 2;
    let t_min = a1.max(a2).max(a3).max(a4);
    let t_max = b1.min(b2).min(b3);
    let terms: Vec<(f64, f64)> = (t_min..=t_max)
        .map(|t| {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            let ln = f.get(t + 1)
                - (f.get(t - a1)
                    + f.get(t - a2)
                    + f.get(t - a3)
                    + f.get(t - a4)
                    + f.get(b1 - t)
                    + f.get(b2 - t)
                    + f.get(b3 - t));
            (sign, ln)
        })
        .collect();
    signed_log_sum(&terms, prefactor)
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` (Condon-Shortley phase).
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    j.check_projection(m)?;
    if m1.0 + m2.0 != m.0 {
        j1.check_projection(m1)?;
        j2.check_projection(m2)?;
        return Ok(0.0);
    }
    let w = wigner_3j(j1, j2, j, m1, m2, -m)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    // (-1)^(j1 - j2 + M) sqrt(2J+1)
    let phase_exp = (j1.0 - j2.0 + m.0) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(phase * (j.multiplicity() as f64).sqrt() * w)
}
