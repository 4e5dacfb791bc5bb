use serde::Serialize;

/// Breakpoints closer than this (relative) are treated as one repeated value.
pub const MERGE_TOL: f64 = 1e-12;

/// Distance to the nearest breakpoint below which `p` is not counted as in
/// the region. The constant blows up at the breakpoints themselves.
pub fn region_margin(p: f64) -> f64 {
    1e-9 * p.max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Breakpoint {
    pub value: f64,
    pub multiplicity: usize,
}

/// Open interval of `(1, ∞)` between consecutive breakpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    /// `f64::INFINITY` for the top interval.
    #[serde(serialize_with = "crate::serde_ext::serialize")]
    pub upper: f64,
    /// Breakpoints strictly above the interval, with multiplicity.
    pub count_above: usize,
    pub admissible: bool,
}

impl Interval {
    /// A representative interior point.
    pub fn midpoint(&self) -> f64 {
        if self.upper.is_finite() {
            0.5 * (self.lower + self.upper)
        } else {
            2.0 * self.lower
        }
    }
}

/// `S ∩ (1, ∞)`: everything except the breakpoints `1/ξ_j`, keeping the
/// stretches where `#{j : p ξ_j < 1}` is even.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibleRegion {
    /// All `1/ξ_j`, descending.
    pub breakpoints: Vec<f64>,
    /// Breakpoints above 1 after merging repeats, descending.
    pub distinct: Vec<Breakpoint>,
    /// Partition of `(1, ∞)` minus `distinct`, ascending.
    pub intervals: Vec<Interval>,
}

/// Region for coefficients `xi` (all positive).
pub fn admissible_region(xi: &[f64]) -> AdmissibleRegion {
    let mut breakpoints: Vec<f64> = xi.iter().map(|x| 1.0 / x).collect();
    breakpoints.sort_by(|a, b| b.total_cmp(a));

    let mut distinct: Vec<Breakpoint> = Vec::new();
    for &b in breakpoints.iter().filter(|b| **b > 1.0) {
        match distinct.last_mut() {
            Some(last) if (last.value - b).abs() <= MERGE_TOL * last.value => last.multiplicity += 1,
            _ => distinct.push(Breakpoint { value: b, multiplicity: 1 }),
        }
    }

    let mut intervals = Vec::with_capacity(distinct.len() + 1);
    let mut upper = f64::INFINITY;
    let mut count_above = 0;
    for bp in &distinct {
        intervals.push(Interval { lower: bp.value, upper, count_above, admissible: count_above.is_multiple_of(2) });
        upper = bp.value;
        count_above += bp.multiplicity;
    }
    intervals.push(Interval { lower: 1.0, upper, count_above, admissible: count_above.is_multiple_of(2) });
    intervals.reverse();

    AdmissibleRegion { breakpoints, distinct, intervals }
}

impl AdmissibleRegion {
    pub fn max_breakpoint(&self) -> f64 {
        self.breakpoints.first().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `#{j : 1/ξ_j > p}`, i.e. the number of `p ξ_j < 1`.
    pub fn parity_count(&self, p: f64) -> usize {
        self.breakpoints.iter().filter(|b| **b > p).count()
    }

    pub fn distance_to_breakpoint(&self, p: f64) -> f64 {
        self.breakpoints.iter().map(|b| (p - b).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Membership with the breakpoint margin applied.
    pub fn contains(&self, p: f64) -> bool {
        p > 1.0
            && p.is_finite()
            && self.distance_to_breakpoint(p) > region_margin(p)
            && self.parity_count(p).is_multiple_of(2)
    }

    pub fn interval_of(&self, p: f64) -> Option<&Interval> {
        self.intervals.iter().find(|iv| p > iv.lower && p < iv.upper)
    }
}
