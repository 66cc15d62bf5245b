//! Frequency bands and their unions.
//!
//! Endpoints are compared exactly; there is no epsilon anywhere in this
//! module. Units are MHz by convention only.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A closed frequency band `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleInterval {
    lo: f64,
    hi: f64,
}

impl SingleInterval {
    /// Endpoints must be finite and non-negative with `lo < hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn center(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    /// `true` iff `inner` lies within `self`.
    #[inline]
    pub fn contains(&self, inner: &SingleInterval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }

    #[inline]
    pub fn contains_point(&self, f: f64) -> bool {
        self.lo <= f && f <= self.hi
    }

    /// Overlap with `other`, if it has positive width.
    pub fn intersection(&self, other: &SingleInterval) -> Option<SingleInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(SingleInterval { lo, hi })
    }
}

impl fmt::Display for SingleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Subset test between two single-intervals.
#[inline]
pub fn contains(outer: &SingleInterval, inner: &SingleInterval) -> bool {
    outer.contains(inner)
}

/// A union of single-intervals kept in canonical form: sorted by `lo` with a
/// strictly positive gap between neighbours.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultipleInterval {
    singles: Vec<SingleInterval>,
}

impl MultipleInterval {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a multiple-interval from singles that are already canonical.
    pub fn from_singles(singles: Vec<SingleInterval>) -> Result<Self> {
        if singles.windows(2).any(|w| w[0].hi >= w[1].lo) {
            return Err(Error::NotCanonical);
        }
        Ok(Self { singles })
    }

    pub fn single(s: SingleInterval) -> Self {
        Self { singles: alloc::vec![s] }
    }

    #[inline]
    pub fn singles(&self) -> &[SingleInterval] {
        &self.singles
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.singles.is_empty()
    }

    /// Total observed width, `Σ |s|`.
    pub fn measure(&self) -> f64 {
        self.singles.iter().map(SingleInterval::width).sum()
    }

    /// Leftmost observed frequency.
    pub fn lo(&self) -> Option<f64> {
        self.singles.first().map(SingleInterval::lo)
    }

    /// Rightmost observed frequency.
    pub fn hi(&self) -> Option<f64> {
        self.singles.last().map(SingleInterval::hi)
    }

    pub fn contains_point(&self, f: f64) -> bool {
        // Singles are sorted, so the candidate is the last one starting at or
        // before `f`.
        let idx = self.singles.partition_point(|s| s.lo <= f);
        idx > 0 && self.singles[idx - 1].hi >= f
    }

    /// Alternating widths and gaps, left to right.
    pub fn shape(&self) -> Result<Shape> {
        if self.singles.is_empty() {
            return Err(Error::EmptyInterval);
        }
        let mut entries = Vec::with_capacity(2 * self.singles.len() - 1);
        for (i, s) in self.singles.iter().enumerate() {
            if i > 0 {
                entries.push(s.lo - self.singles[i - 1].hi);
            }
            entries.push(s.width());
        }
        Shape::new(entries)
    }
}

impl fmt::Display for MultipleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.singles.is_empty() {
            return f.write_str("∅");
        }
        for (i, s) in self.singles.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Canonical union of multiple-intervals. Overlapping and touching bands
/// merge into one.
pub fn union_all<'a, I>(parts: I) -> MultipleInterval
where
    I: IntoIterator<Item = &'a MultipleInterval>,
{
    let mut singles: Vec<SingleInterval> = parts
        .into_iter()
        .flat_map(|m| m.singles.iter().copied())
        .collect();
    merge_singles(&mut singles);
    MultipleInterval { singles }
}

/// Sorts and merges a bag of singles in place into canonical form.
pub(crate) fn merge_singles(singles: &mut Vec<SingleInterval>) {
    if singles.len() < 2 {
        return;
    }
    singles.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out = 0;
    for i in 1..singles.len() {
        let next = singles[i];
        if next.lo <= singles[out].hi {
            if next.hi > singles[out].hi {
                singles[out].hi = next.hi;
            }
        } else {
            out += 1;
            singles[out] = next;
        }
    }
    singles.truncate(out + 1);
}

/// Odd-length vector of positive reals: single-interval widths at even
/// (0-based) positions, gaps at odd positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    entries: Vec<f64>,
}

impl Shape {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() % 2 == 0 {
            return Err(Error::InvalidShape("length must be odd"));
        }
        if entries.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidShape("entries must be positive and finite"));
        }
        Ok(Self { entries })
    }

    /// One-band shape `(width)`.
    pub fn band(width: f64) -> Result<Self> {
        Self::new(alloc::vec![width])
    }

    #[inline]
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn single_count(&self) -> usize {
        self.entries.len().div_ceil(2)
    }

    /// Widths of the single-intervals, left to right.
    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().step_by(2).copied()
    }

    /// Total observed width (sum of the odd-position entries).
    pub fn total_width(&self) -> f64 {
        self.widths().sum()
    }

    /// Distance from the leftmost point to the right end of the last band.
    pub fn span(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Offset of each single-interval's lower end from the leftmost point.
    pub fn offsets(&self) -> Vec<f64> {
        let mut offsets = Vec::with_capacity(self.single_count());
        let mut pos = 0.0;
        for (i, e) in self.entries.iter().enumerate() {
            if i % 2 == 0 {
                offsets.push(pos);
            }
            pos += e;
        }
        offsets
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Places `shape` so that its leftmost point is `origin`.
pub fn realize_shape(shape: &Shape, origin: f64) -> Result<MultipleInterval> {
    if !(origin.is_finite() && origin > 0.0) {
        return Err(Error::NonPositiveOrigin(origin));
    }
    let mut singles = Vec::with_capacity(shape.single_count());
    let mut pos = origin;
    for (i, e) in shape.entries.iter().enumerate() {
        let next = pos + e;
        if i % 2 == 0 {
            singles.push(SingleInterval::new(pos, next)?);
        }
        pos = next;
    }
    MultipleInterval::from_singles(singles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn si(lo: f64, hi: f64) -> SingleInterval {
        SingleInterval::new(lo, hi).unwrap()
    }

    fn mi(bands: &[(f64, f64)]) -> MultipleInterval {
        MultipleInterval::from_singles(bands.iter().map(|&(l, h)| si(l, h)).collect()).unwrap()
    }

    #[test]
    fn rejects_degenerate_single() {
        assert!(SingleInterval::new(5.0, 5.0).is_err());
        assert!(SingleInterval::new(6.0, 5.0).is_err());
        assert!(SingleInterval::new(f64::NAN, 5.0).is_err());
    }

    #[test]
    fn measure_examples() {
        assert_eq!(mi(&[(10970.0, 10990.0)]).measure(), 20.0);
        assert_eq!(mi(&[(0.0, 5.0), (7.0, 8.0), (11.0, 15.0)]).measure(), 10.0);
        assert_eq!(MultipleInterval::empty().measure(), 0.0);
    }

    #[test]
    fn shape_examples() {
        let m = mi(&[(0.0, 5.0), (7.0, 8.0), (11.0, 15.0)]);
        assert_eq!(m.shape().unwrap().entries(), &[5.0, 2.0, 1.0, 3.0, 4.0]);
        assert_eq!(mi(&[(100.0, 200.0)]).shape().unwrap().entries(), &[100.0]);
        let m = mi(&[(275.0, 325.0), (425.0, 525.0)]);
        assert_eq!(m.shape().unwrap().entries(), &[50.0, 100.0, 100.0]);
        assert_eq!(MultipleInterval::empty().shape(), Err(Error::EmptyInterval));
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&si(425.0, 525.0), &si(500.0, 525.0)));
        assert!(contains(&si(500.0, 525.0), &si(500.0, 525.0)));
        assert!(!contains(&si(455.0, 525.0), &si(500.0, 570.0)));
    }

    #[test]
    fn union_examples() {
        let a = mi(&[(0.0, 5.0)]);
        assert_eq!(union_all([&a, &mi(&[(3.0, 8.0)])]), mi(&[(0.0, 8.0)]));
        assert_eq!(union_all([&a, &mi(&[(5.0, 8.0)])]), mi(&[(0.0, 8.0)]));
        assert_eq!(union_all(core::iter::empty()), MultipleInterval::empty());
    }

    #[test]
    fn realize_examples() {
        let s = Shape::band(70.0).unwrap();
        assert_eq!(realize_shape(&s, 455.0).unwrap(), mi(&[(455.0, 525.0)]));
        let s = Shape::new(vec![50.0, 100.0, 100.0]).unwrap();
        assert_eq!(
            realize_shape(&s, 275.0).unwrap(),
            mi(&[(275.0, 325.0), (425.0, 525.0)])
        );
        let s = Shape::band(100.0).unwrap();
        assert_eq!(realize_shape(&s, 0.0), Err(Error::NonPositiveOrigin(0.0)));
    }

    #[test]
    fn non_canonical_input_is_rejected() {
        let err = MultipleInterval::from_singles(vec![si(0.0, 5.0), si(5.0, 8.0)]);
        assert_eq!(err, Err(Error::NotCanonical));
        let err = MultipleInterval::from_singles(vec![si(6.0, 8.0), si(0.0, 5.0)]);
        assert_eq!(err, Err(Error::NotCanonical));
    }

    #[test]
    fn shape_validation() {
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![1.0, 2.0]).is_err());
        assert!(Shape::new(vec![1.0, 0.0, 2.0]).is_err());
        let s = Shape::new(vec![100.0, 100.0, 100.0]).unwrap();
        assert_eq!(s.single_count(), 2);
        assert_eq!(s.total_width(), 200.0);
        assert_eq!(s.offsets(), vec![0.0, 200.0]);
    }

    #[test]
    fn point_membership() {
        let m = mi(&[(0.0, 5.0), (7.0, 8.0)]);
        assert!(m.contains_point(0.0));
        assert!(m.contains_point(5.0));
        assert!(!m.contains_point(6.0));
        assert!(m.contains_point(8.0));
        assert!(!m.contains_point(8.5));
    }

    fn arb_shape() -> impl Strategy<Value = Shape> {
        (0usize..4)
            .prop_flat_map(|pairs| prop::collection::vec(1u32..200, 2 * pairs + 1))
            .prop_map(|v| Shape::new(v.into_iter().map(f64::from).collect()).unwrap())
    }

    fn arb_multi() -> impl Strategy<Value = MultipleInterval> {
        prop::collection::vec((0u32..500, 1u32..50), 0..6).prop_map(|bands| {
            let parts: Vec<MultipleInterval> = bands
                .into_iter()
                .map(|(lo, w)| MultipleInterval::single(si(lo.into(), (lo + w).into())))
                .collect();
            union_all(&parts)
        })
    }

    proptest! {
        #[test]
        fn realize_then_shape_round_trips(shape in arb_shape(), origin in 1u32..100_000) {
            let origin = f64::from(origin);
            let m = realize_shape(&shape, origin).unwrap();
            prop_assert_eq!(m.lo(), Some(origin));
            prop_assert_eq!(m.shape().unwrap(), shape);
        }

        #[test]
        fn union_measure_is_subadditive(parts in prop::collection::vec(arb_multi(), 0..5)) {
            let u = union_all(&parts);
            let sum: f64 = parts.iter().map(MultipleInterval::measure).sum();
            prop_assert!(u.measure() <= sum + 1e-9);
            let disjoint = parts.iter().enumerate().all(|(i, a)| {
                parts[i + 1..].iter().all(|b| {
                    a.singles().iter().all(|x| b.singles().iter().all(|y| x.intersection(y).is_none()))
                })
            });
            if disjoint {
                prop_assert!((u.measure() - sum).abs() < 1e-9);
            } else {
                prop_assert!(u.measure() < sum);
            }
        }

        #[test]
        fn union_is_order_insensitive_and_idempotent(mut parts in prop::collection::vec(arb_multi(), 0..5)) {
            let u = union_all(&parts);
            parts.reverse();
            prop_assert_eq!(&union_all(&parts), &u);
            prop_assert_eq!(union_all([&u, &u]), u.clone());
            // canonical: strictly positive gaps
            prop_assert!(MultipleInterval::from_singles(u.singles().to_vec()).is_ok());
        }
    }
}
