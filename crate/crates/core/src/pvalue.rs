//! Exact p-value kernels.
//!
//! Combinatorics are carried in natural-log space. `ln n!` comes from a
//! grow-only cache shared by every thread. The hypergeometric density uses the
//! saddle-point (Stirling error plus deviance) form, which keeps relative
//! accuracy near machine precision up to populations of 10^7 and beyond.
//! Tails are summed with the term-ratio recurrence from a single log-space
//! anchor, on whichever side of the split point holds the smaller mass.

use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this size `ln n!` is an exact running sum of `ln k`.
const EXACT_PREFIX: usize = 256;
/// Cache entries beyond this bound are computed on the fly and not stored.
const CACHE_LIMIT: usize = 1 << 21;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Grow-only table of `ln n!`. Every entry is a pure function of `n`, so
/// concurrent extensions always agree on the stored values.
pub struct LogFactorialTable {
    values: RwLock<Vec<f64>>,
}

impl LogFactorialTable {
    fn new() -> Self {
        let mut values = Vec::with_capacity(EXACT_PREFIX);
        let mut acc = 0.0f64;
        values.push(0.0);
        for k in 1..EXACT_PREFIX {
            acc += (k as f64).ln();
            values.push(acc);
        }
        LogFactorialTable {
            values: RwLock::new(values),
        }
    }

    /// Shared process-wide instance.
    pub fn global() -> &'static LogFactorialTable {
        static TABLE: OnceLock<LogFactorialTable> = OnceLock::new();
        TABLE.get_or_init(LogFactorialTable::new)
    }

    pub fn ln_factorial(&self, n: u64) -> f64 {
        let idx = n as usize;
        if n as u128 >= CACHE_LIMIT as u128 {
            return stirling(n as f64);
        }
        {
            let values = self.values.read().unwrap_or_else(|e| e.into_inner());
            if idx < values.len() {
                return values[idx];
            }
        }
        let mut values = self.values.write().unwrap_or_else(|e| e.into_inner());
        let target = (idx + 1).max(values.len() * 2).min(CACHE_LIMIT);
        for m in values.len()..target {
            values.push(stirling(m as f64));
        }
        values[idx]
    }

    /// Number of cached entries.
    pub fn cached_len(&self) -> usize {
        self.values.read().unwrap_or_else(|e| e.into_inner()).len()
    }
}

/// Stirling series for `ln n!`, accurate to double precision for n >= 256.
fn stirling(n: f64) -> f64 {
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (n + 0.5) * n.ln() - n + HALF_LN_TWO_PI + series
}

/// `ln n! - [(n + 1/2) ln n - n + ln sqrt(2 pi)]`.
fn stirling_error(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n == 0 {
        return 1.0 - HALF_LN_TWO_PI;
    }
    let nf = n as f64;
    if n <= 15 {
        return ln_factorial(n) - (nf + 0.5) * nf.ln() + nf - HALF_LN_TWO_PI;
    }
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x / m) + m - x`, stable when `x` is close to `m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln [C(n, x) p^x q^(n - x)]` in saddle-point form.
fn ln_binom_density(x: u64, n: u64, p: f64, q: f64) -> f64 {
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.1 {
            -deviance(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -deviance(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let xf = x as f64;
    let yf = (n - x) as f64;
    stirling_error(n) - stirling_error(x) - stirling_error(n - x)
        - deviance(xf, nf * p)
        - deviance(yf, nf * q)
        + 0.5 * (nf / (2.0 * std::f64::consts::PI * xf * yf)).ln()
}

pub fn ln_factorial(n: u64) -> f64 {
    LogFactorialTable::global().ln_factorial(n)
}

/// `ln C(n, k)`; negative infinity when `k < 0` or `k > n`.
pub fn log_choose(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    let k = k as u64;
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Parameters of the hypergeometric overlap distribution: the number of
/// common neighbors of two nodes of degrees `successes` and `draws` when both
/// connect at random into a population of `population` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HypergeomParams {
    population: u64,
    successes: u64,
    draws: u64,
}

impl HypergeomParams {
    pub fn new(population: u64, successes: u64, draws: u64) -> Result<Self> {
        if successes > population || draws > population {
            return Err(Error::invalid(
                "hypergeometric parameters",
                format!("degrees ({successes}, {draws}) exceed population {population}"),
            ));
        }
        Ok(HypergeomParams {
            population,
            successes,
            draws,
        })
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Inclusive support `[max(0, K + n - N), min(K, n)]`.
    pub fn support(&self) -> (u64, u64) {
        let low = (self.successes + self.draws).saturating_sub(self.population);
        (low, self.successes.min(self.draws))
    }

    pub fn mean(&self) -> f64 {
        if self.population == 0 {
            return 0.0;
        }
        self.successes as f64 * self.draws as f64 / self.population as f64
    }

    /// `ln H(x)`; negative infinity outside the support.
    ///
    /// Written as a ratio of three binomial densities at `p = draws /
    /// population`, each evaluated in saddle-point form so that no large
    /// log-factorials cancel.
    pub fn ln_pmf(&self, x: u64) -> f64 {
        let (low, high) = self.support();
        if x < low || x > high {
            return f64::NEG_INFINITY;
        }
        let (n, k, d) = (self.population, self.successes, self.draws);
        if d == 0 || d == n {
            return 0.0;
        }
        let p = d as f64 / n as f64;
        let q = (n - d) as f64 / n as f64;
        ln_binom_density(x, k, p, q) + ln_binom_density(d - x, n - k, p, q)
            - ln_binom_density(d, n, p, q)
    }

    /// Ratio `H(x + 1) / H(x)` for `x` and `x + 1` inside the support.
    fn ratio_up(&self, x: u64) -> f64 {
        let (n, k, d) = (
            self.population as f64,
            self.successes as f64,
            self.draws as f64,
        );
        let x = x as f64;
        (k - x) * (d - x) / ((x + 1.0) * (n - k - d + x + 1.0))
    }

    /// `(P(X < t), P(X >= t))`, one side summed and the other its complement.
    fn split(&self, t: u64) -> (f64, f64) {
        let (low, high) = self.support();
        if t <= low {
            return (0.0, 1.0);
        }
        if t > high {
            return (1.0, 0.0);
        }
        let anchor_upper = t as f64 > self.mean();
        let (anchor, count) = if anchor_upper {
            (t, high - t + 1)
        } else {
            (t - 1, t - low)
        };
        // Sum of H(x)/H(anchor) walking away from the anchor.
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        let mut x = anchor;
        for _ in 1..count {
            let ratio = if anchor_upper {
                let r = self.ratio_up(x);
                x += 1;
                r
            } else {
                x -= 1;
                1.0 / self.ratio_up(x)
            };
            term *= ratio;
            sum += term;
            // Unimodal: once the ratio drops below one it stays there.
            if ratio < 1.0 && term < sum * 1e-18 {
                break;
            }
        }
        let side = (self.ln_pmf(anchor) + sum.ln()).exp().clamp(0.0, 1.0);
        if anchor_upper {
            (1.0 - side, side)
        } else {
            (side, 1.0 - side)
        }
    }
}

/// Hypergeometric pmf; zero outside the support.
pub fn hypergeom_pmf(params: HypergeomParams, x: i64) -> f64 {
    if x < 0 {
        return 0.0;
    }
    params.ln_pmf(x as u64).exp()
}

fn check_count(params: &HypergeomParams, n_ij: u64) -> Result<()> {
    let (low, high) = params.support();
    if n_ij > high {
        return Err(Error::OutsideSupport {
            value: n_ij,
            low,
            high,
        });
    }
    Ok(())
}

/// Probability of observing `n_ij` or more co-occurrences.
pub fn pvalue_over(params: HypergeomParams, n_ij: u64) -> Result<f64> {
    check_count(&params, n_ij)?;
    Ok(params.split(n_ij).1)
}

/// Probability of observing `n_ij` or fewer co-occurrences.
pub fn pvalue_under(params: HypergeomParams, n_ij: u64) -> Result<f64> {
    check_count(&params, n_ij)?;
    Ok(params.split(n_ij + 1).0)
}

/// Disparity-filter p-value `(1 - x)^(k - 1)`: the probability that a node of
/// degree `k` splitting its strength uniformly at random assigns normalized
/// weight `x` or more to a given link.
pub fn pvalue_disparity(k: u64, x: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("degree", format!("disparity test needs k >= 2, got {k}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("normalized weight", format!("{x} outside [0, 1]")));
    }
    Ok(((k - 1) as f64 * (-x).ln_1p()).exp().clamp(0.0, 1.0))
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(name, format!("{p} outside [0, 1]")));
    }
    Ok(())
}

/// `P(S >= k)` for `S ~ Binomial(n, p)`.
pub fn binom_tail_at_least(n: u64, k: u64, p: f64) -> Result<f64> {
    check_probability("success probability", p)?;
    if k > n {
        return Err(Error::invalid("threshold", format!("{k} exceeds {n} trials")));
    }
    if k == 0 || p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let total: f64 = (k..=n)
        .map(|i| (log_choose(n, i as i64) + i as f64 * lp + (n - i) as f64 * lq).exp())
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Probability that at least one of `n_tests` independent tests, each with
/// false-positive probability `p_single`, fires.
pub fn fwer_at_least_one(p_single: f64, n_tests: u64) -> Result<f64> {
    check_probability("single-test probability", p_single)?;
    if n_tests == 0 {
        return Err(Error::invalid("number of tests", "must be at least 1"));
    }
    if p_single == 1.0 {
        return Ok(1.0);
    }
    Ok((-(n_tests as f64 * (-p_single).ln_1p()).exp_m1()).clamp(0.0, 1.0))
}

/// Which test produced a p-value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Over,
    Under,
    Disparity,
}

impl Tail {
    pub fn as_str(self) -> &'static str {
        match self {
            Tail::Over => "over",
            Tail::Under => "under",
            Tail::Disparity => "disparity",
        }
    }
}

impl std::fmt::Display for Tail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single hypothesis test outcome. `subject` is an ordered node pair for
/// disparity tests and an `i < j` pair for co-occurrence tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PValueRecord {
    pub subject: (usize, usize),
    pub tail: Tail,
    pub p: f64,
    pub statistic: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, k: u64, d: u64) -> HypergeomParams {
        HypergeomParams::new(n, k, d).unwrap()
    }

    fn pascal(n: usize) -> Vec<Vec<u128>> {
        let mut rows = vec![vec![1u128]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![1u128; i + 1];
            for k in 1..i {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn log_choose_matches_pascal() {
        let tri = pascal(60);
        assert_eq!(log_choose(10, 0), 0.0);
        assert_eq!(tri[10][3], 120);
        assert_eq!(tri[52][5], 2_598_960);
        for n in 0..=60u64 {
            for k in 0..=n {
                let exact = (tri[n as usize][k as usize] as f64).ln();
                assert!((log_choose(n, k as i64) - exact).abs() < 1e-12 * exact.max(1.0));
            }
        }
        assert_eq!(log_choose(5, -1), f64::NEG_INFINITY);
        assert_eq!(log_choose(5, 6), f64::NEG_INFINITY);
    }

    #[test]
    fn stirling_joins_exact_prefix() {
        let mut acc = 0.0f64;
        for k in 1..2000u64 {
            acc += (k as f64).ln();
            let got = ln_factorial(k);
            assert!((got - acc).abs() <= 1e-13 * acc, "k={k} got {got} want {acc}");
        }
        assert!(LogFactorialTable::global().cached_len() >= 2000);
    }

    #[test]
    fn cache_is_consistent_across_threads() {
        let values: Vec<Vec<f64>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..8)
                .map(|t| {
                    s.spawn(move || {
                        (0..20_000u64)
                            .map(|n| ln_factorial((n * 7 + t * 13) % 50_000))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for (t, row) in values.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let m = (n as u64 * 7 + t as u64 * 13) % 50_000;
                assert_eq!(*v, ln_factorial(m));
            }
        }
    }

    #[test]
    fn pmf_examples() {
        assert!((hypergeom_pmf(params(5, 2, 3), 2) - 0.3).abs() < 1e-14);
        assert!((hypergeom_pmf(params(5, 5, 3), 3) - 1.0).abs() < 1e-14);
        assert_eq!(hypergeom_pmf(params(5, 2, 3), 3), 0.0);
        assert_eq!(hypergeom_pmf(params(5, 2, 3), -1), 0.0);
        let p = params(1000, 100, 100);
        let total: f64 = (0..=100).map(|x| hypergeom_pmf(p, x)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_examples() {
        assert_eq!(pvalue_over(params(20, 5, 6), 0).unwrap(), 1.0);
        assert!((pvalue_over(params(5, 2, 3), 2).unwrap() - 0.3).abs() < 1e-14);
        assert!((pvalue_under(params(5, 2, 3), 0).unwrap() - 0.1).abs() < 1e-14);
        assert_eq!(pvalue_under(params(20, 5, 6), 5).unwrap(), 1.0);
        let p = params(20, 5, 6);
        let direct: f64 = (4..=5).map(|x| hypergeom_pmf(p, x)).sum();
        assert!((pvalue_over(p, 4).unwrap() - direct).abs() < 1e-12);
        assert!(matches!(
            pvalue_over(p, 6),
            Err(Error::OutsideSupport { value: 6, .. })
        ));
        assert!(pvalue_under(p, 7).is_err());
    }

    #[test]
    fn forced_overlap_below_support_floor() {
        // Two nodes linked to 8 of 10 population members share at least 6.
        let p = params(10, 8, 8);
        assert_eq!(p.support(), (6, 8));
        assert_eq!(pvalue_over(p, 6).unwrap(), 1.0);
        assert_eq!(pvalue_over(p, 0).unwrap(), 1.0);
        assert_eq!(pvalue_under(p, 3).unwrap(), 0.0);
    }

    #[test]
    fn extreme_tails_stay_finite() {
        let p = params(10_000_000, 100_000, 100_000);
        let over = pvalue_over(p, 5_000).unwrap();
        let under = pvalue_under(p, 100).unwrap();
        assert!(over.is_finite() && under.is_finite());
        assert!(over < 1e-300 || over == 0.0);
        let mid = pvalue_over(p, 1_000).unwrap();
        assert!(mid > 0.4 && mid < 0.6, "{mid}");
        let tiny = params(100, 10, 10);
        let top = pvalue_over(tiny, 10).unwrap();
        let exact = 1.0 / 17_310_309_456_440.0;
        assert!((top - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn disparity_examples() {
        assert!((pvalue_disparity(2, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(pvalue_disparity(17, 0.0).unwrap(), 1.0);
        assert!((pvalue_disparity(3, 0.9).unwrap() - 0.01).abs() < 1e-14);
        assert_eq!(pvalue_disparity(4, 1.0).unwrap(), 0.0);
        assert!(pvalue_disparity(1, 0.5).is_err());
        assert!(pvalue_disparity(3, 1.5).is_err());
    }

    #[test]
    fn binomial_and_fwer() {
        let p8 = binom_tail_at_least(10, 8, 0.5).unwrap();
        assert!((p8 - 56.0 / 1024.0).abs() < 1e-15);
        assert_eq!(format!("{p8:.4}"), "0.0547");
        assert_eq!(binom_tail_at_least(10, 0, 0.5).unwrap(), 1.0);
        let fwer = fwer_at_least_one(p8, 100).unwrap();
        assert_eq!(format!("{fwer:.4}"), "0.9964");
        assert_eq!(fwer_at_least_one(0.0, 40).unwrap(), 0.0);
        assert!((fwer_at_least_one(0.123, 1).unwrap() - 0.123).abs() < 1e-15);
        assert!(binom_tail_at_least(3, 4, 0.5).is_err());
        assert!(fwer_at_least_one(0.1, 0).is_err());
    }
}
