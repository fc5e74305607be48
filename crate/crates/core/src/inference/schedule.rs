use std::ops::RangeInclusive;

use crate::schedule::PowerLaw;

/// Largest accepted bounded-difference constant.
pub const DEFAULT_DIFFERENCE_LIMIT: f64 = 8.0;

/// Sample count `N(n)` and per-sample error `eps(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleFns {
    pub count: PowerLaw,
    pub eps: PowerLaw,
}

impl ScheduleFns {
    pub fn new(count: PowerLaw, eps: PowerLaw) -> Self {
        Self { count, eps }
    }

    pub fn count_at(&self, n: usize) -> usize {
        self.count.eval_count(n)
    }

    pub fn eps_at(&self, n: usize) -> f64 {
        self.eps.eval(n)
    }

    pub fn check(&self, range: RangeInclusive<usize>) -> ScheduleReport {
        schedule_check(
            |n| self.count.eval_count(n) as f64,
            |n| self.eps.eval(n),
            range,
            DEFAULT_DIFFERENCE_LIMIT,
        )
    }
}

/// Constants witnessed over a range of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleReport {
    /// `max |N(n+1) - N(n)| * n / N(n)`.
    pub c1: f64,
    /// `max |eps(n+1) - eps(n)| * n / eps(n)`.
    pub c2: f64,
    /// Smallest `k` with `N(n) <= n^k` over the range (n >= 2).
    pub count_degree: f64,
    /// Smallest `k` with `eps(n) >= n^-k` over the range (n >= 2).
    pub eps_degree: f64,
    /// `N(n) >= 1` and `eps(n)` in `(0, 1)` everywhere.
    pub in_range: bool,
    pub passed: bool,
}

/// Evaluates the bounded-difference ratios of `count` and `eps` for every
/// `n` in `range` (values below 1 are skipped). Passes when both witnessed
/// constants are at most `limit` and the values stay in range.
pub fn schedule_check(
    count: impl Fn(usize) -> f64,
    eps: impl Fn(usize) -> f64,
    range: RangeInclusive<usize>,
    limit: f64,
) -> ScheduleReport {
    let mut r = ScheduleReport {
        c1: 0.0,
        c2: 0.0,
        count_degree: 0.0,
        eps_degree: 0.0,
        in_range: true,
        passed: false,
    };
    let (lo, hi) = ((*range.start()).max(1), *range.end());
    for n in lo..=hi {
        let (a, b) = (count(n), count(n + 1));
        let (e, f) = (eps(n), eps(n + 1));
        let nf = n as f64;
        if !(a >= 1.0 && e > 0.0 && e < 1.0) {
            r.in_range = false;
            continue;
        }
        r.c1 = r.c1.max((b - a).abs() * nf / a);
        r.c2 = r.c2.max((f - e).abs() * nf / e);
        if n >= 2 {
            r.count_degree = r.count_degree.max(a.ln() / nf.ln());
            r.eps_degree = r.eps_degree.max(-e.ln() / nf.ln());
        }
    }
    r.passed = r.in_range && r.c1.is_finite() && r.c2.is_finite() && r.c1 <= limit && r.c2 <= limit;
    r
}
