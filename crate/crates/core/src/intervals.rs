use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finitely many sorted, disjoint closed intervals `[l_i, r_i]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Normalizes arbitrary closed intervals: sorts them and merges overlaps
    /// (touching intervals merge too).
    pub fn new(mut raw: Vec<(f64, f64)>) -> Result<Self> {
        for &(l, r) in &raw {
            if !(l.is_finite() && r.is_finite() && l <= r) {
                return Err(Error::InvalidInput(format!("bad interval [{l}, {r}]")));
            }
        }
        raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (l, r) in raw {
            match out.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => out.push((l, r)),
            }
        }
        Ok(Self { intervals: out })
    }

    pub fn interval(l: f64, r: f64) -> Result<Self> {
        Self::new(vec![(l, r)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure `Σ (r_i − l_i)`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.1)
    }

    /// `max − min`, zero for the empty union.
    pub fn diameter(&self) -> f64 {
        match (self.min(), self.max()) {
            (Some(l), Some(r)) => r - l,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.component_of(x).is_some()
    }

    /// Index of the interval containing `x`.
    pub fn component_of(&self, x: f64) -> Option<usize> {
        let i = self.intervals.partition_point(|iv| iv.1 < x);
        (i < self.intervals.len() && self.intervals[i].0 <= x).then_some(i)
    }

    /// Joins neighbours separated by gaps shorter than `gap_tol`.
    pub fn merge_gaps(&self, gap_tol: f64) -> Self {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.len());
        for &(l, r) in &self.intervals {
            match out.last_mut() {
                Some(last) if l - last.1 < gap_tol => last.1 = r,
                _ => out.push((l, r)),
            }
        }
        Self { intervals: out }
    }

    /// Union with another set.
    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::new(all).expect("inputs are valid unions")
    }

    /// Whether every interval of `self` lies inside `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals
            .iter()
            .all(|&(l, r)| other.component_of(l).is_some_and(|i| other.intervals[i].1 >= r))
    }

    pub fn translate(&self, c: f64) -> Self {
        Self {
            intervals: self.intervals.iter().map(|&(l, r)| (l + c, r + c)).collect(),
        }
    }

    /// Image under `x ↦ s·x` for `s > 0`.
    pub fn scale(&self, s: f64) -> Self {
        assert!(s > 0.0, "scale factor must be positive");
        Self {
            intervals: self.intervals.iter().map(|&(l, r)| (s * l, s * r)).collect(),
        }
    }

    /// Drops degenerate (zero-length) intervals.
    pub fn without_points(&self) -> Self {
        Self {
            intervals: self.intervals.iter().copied().filter(|(l, r)| r > l).collect(),
        }
    }

    /// Sample points covering every interval: `n_points` spread in
    /// proportion to length, at least one (the midpoint) per interval, all
    /// strictly inside unless the interval is a point.
    pub fn sample_grid(&self, n_points: usize) -> Vec<f64> {
        let total = self.measure();
        let mut pts = Vec::with_capacity(n_points + self.len());
        for &(l, r) in &self.intervals {
            let share = if total > 0.0 { (r - l) / total } else { 0.0 };
            let k = ((share * n_points as f64).round() as usize).max(1);
            let h = (r - l) / k as f64;
            pts.extend((0..k).map(|j| l + (j as f64 + 0.5) * h));
        }
        pts.dedup();
        pts
    }
}
