//! Clebsch–Gordan coefficients from the Racah closed form.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::half::HalfInt;

const LOG_FACT_LEN: usize = 256;

/// Largest `j` accepted; keeps every factorial argument inside the table.
pub const MAX_J: i32 = 60;

fn log_factorial(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; LOG_FACT_LEN];
        for k in 1..LOG_FACT_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    table[n as usize]
}

fn check_pair(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 || j.twice() > 2 * MAX_J {
        return Err(Error::Argument(format!("angular momentum {j} outside 0..={MAX_J}")));
    }
    if m.abs() > j {
        return Err(Error::Argument(format!("projection {m} exceeds j = {j}")));
    }
    if !(j + m).is_integer() {
        return Err(Error::Argument(format!("j = {j} and m = {m} differ by a half-integer")));
    }
    Ok(())
}

/// `⟨j1 m1; j2 m2 | J M⟩` in the Condon–Shortley convention.
pub fn cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<f64> {
    check_pair(j1, m1)?;
    check_pair(j2, m2)?;
    if j.twice() < 0 || j.twice() > 2 * MAX_J {
        return Err(Error::Argument(format!("angular momentum {j} outside 0..={MAX_J}")));
    }
    if m != m1 + m2 || m.abs() > j || !(j + m).is_integer() {
        return Ok(0.0);
    }
    if j < (j1 - j2).abs() || j > j1 + j2 || !(j1 + j2 + j).is_integer() {
        return Ok(0.0);
    }

    // all arguments below are integers once doubled values are halved
    let h = |x: HalfInt| x.twice() / 2;
    let (a, b, c) = (h(j1 + j2 - j), h(j1 - m1), h(j2 + m2));
    let (d, e) = (h(j - j2 + m1), h(j - j1 - m2));

    let log_pre = 0.5
        * ((f64::from(j.twice() + 1)).ln()
            + log_factorial(h(j + j1 - j2))
            + log_factorial(h(j - j1 + j2))
            + log_factorial(a)
            - log_factorial(h(j1 + j2 + j) + 1)
            + log_factorial(h(j + m))
            + log_factorial(h(j - m))
            + log_factorial(h(j1 - m1))
            + log_factorial(h(j1 + m1))
            + log_factorial(h(j2 - m2))
            + log_factorial(h(j2 + m2)));

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let log_den = log_factorial(k)
            + log_factorial(a - k)
            + log_factorial(b - k)
            + log_factorial(c - k)
            + log_factorial(d + k)
            + log_factorial(e + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (log_pre - log_den).exp();
    }
    Ok(sum)
}

/// Float front end to [`cg`]; every argument must be a multiple of ½.
pub fn cg_coefficient(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let hi = HalfInt::try_from_f64;
    cg(hi(j1)?, hi(m1)?, hi(j2)?, hi(m2)?, hi(j)?, hi(m)?)
}
