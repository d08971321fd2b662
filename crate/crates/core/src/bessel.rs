//! Modified Bessel function of the first kind for integer order.


/// Relative tolerance used by [`bessel_i`].
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Result of a truncated ascending-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Upper bound on the absolute size of the discarded tail.
    pub truncation_error: f64,
    pub terms: usize,
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `I_order(x)` for `x >= 0` via `sum_k (x/2)^(2k+order) / (k! (k+order)!)`.
///
/// The leading term is formed in the log domain so large orders do not
/// overflow; later terms follow from the ratio of consecutive terms. Returns
/// `f64::INFINITY` once the value leaves the representable range.
pub fn bessel_i_series(order: u32, x: f64, tol: f64) -> SeriesSum {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and non-negative");
    if x == 0.0 {
        let value = if order == 0 { 1.0 } else { 0.0 };
        return SeriesSum { value, truncation_error: 0.0, terms: 1 };
    }
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let ln_lead = order as f64 * half.ln() - ln_factorial(order);
    if ln_lead > 709.0 {
        return SeriesSum { value: f64::INFINITY, truncation_error: 0.0, terms: 1 };
    }
    // Terms relative to the leading one.
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 0u32;
    let tail = loop {
        let ratio = quarter_sq / (((k + 1) as f64) * ((k + 1 + order) as f64));
        let next = term * ratio;
        k += 1;
        let next_ratio = quarter_sq / (((k + 1) as f64) * ((k + 1 + order) as f64));
        if next_ratio < 1.0 {
            let tail = next / (1.0 - next_ratio);
            if tail <= tol * sum {
                break tail;
            }
        }
        term = next;
        sum += term;
        if !sum.is_finite() || sum > 1e300 {
            return SeriesSum { value: f64::INFINITY, truncation_error: 0.0, terms: k as usize };
        }
    };
    let scale = ln_lead.exp();
    let value = scale * sum;
    SeriesSum {
        value: if value.is_finite() && ln_lead + sum.ln() < 709.0 { value } else { f64::INFINITY },
        truncation_error: scale * tail,
        terms: k as usize,
    }
}

/// `I_order(x)` to relative accuracy [`DEFAULT_TOLERANCE`].
pub fn bessel_i(order: u32, x: f64) -> f64 {
    bessel_i_series(order, x, DEFAULT_TOLERANCE).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from arbitrary-precision evaluation (mpmath besseli, 30 digits).
    const REFERENCE: &[(u32, f64, f64)] = &[
        (0, 1.0, 1.266_065_877_752_008_3),
        (1, 1.0, 0.565_159_103_992_485_03),
        (6, 1.0, 2.248_866_147_714_757_3e-5),
        (0, 10.0, 2_815.716_628_466_254_5),
        (3, 10.0, 1_758.380_716_610_853_2),
        (10, 40.0, 4.228_469_210_516_759_2e15),
        (30, 20.0, 0.082_132_462_497_325_631),
        (60, 1.0, 1.046_659_084_740_816_6e-100),
        (60, 100.0, 2.469_100_385_820_067_9e34),
        (1, 100.0, 1.068_369_390_338_162_5e42),
        (25, 7.5, 2.470_226_054_756_213e-11),
        (45, 60.0, 4.891_057_564_907_322_6e17),
    ];

    #[test]
    fn matches_reference_values() {
        for &(order, x, expected) in REFERENCE {
            assert_relative_eq!(bessel_i(order, x), expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_i(0, 0.0), 1.0);
        assert_eq!(bessel_i(1, 0.0), 0.0);
        assert_eq!(bessel_i(40, 0.0), 0.0);
    }

    #[test]
    fn recurrence_relation() {
        // I_{n-1}(x) - I_{n+1}(x) = (2n/x) I_n(x)
        for n in 1..20u32 {
            for &x in &[0.3, 2.0, 7.5, 25.0] {
                let lhs = bessel_i(n - 1, x) - bessel_i(n + 1, x);
                let rhs = 2.0 * n as f64 / x * bessel_i(n, x);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn truncation_error_is_small() {
        let s = bessel_i_series(5, 12.0, 1e-12);
        assert!(s.truncation_error <= 1e-12 * s.value);
        assert!(s.terms > 5);
    }

    #[test]
    fn overflow_reports_infinity() {
        assert_eq!(bessel_i(2, 2000.0), f64::INFINITY);
    }
}
