use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_in_contour, Contour, Location, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcavePoint {
    pub contour_index: usize,
    pub coord: Point,
}

/// Raw concavity test per contour point: point `i` qualifies when the
/// midpoints of all `k` symmetric neighbour pairs `(i - j, i + j)` lie
/// outside the contour. Indices wrap around the closed curve.
pub fn concave_flags(c: &Contour, k: usize) -> Result<Vec<bool>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = c.len();
    if n < 2 * k + 1 {
        return Err(Error::ContourTooShort { len: n, k });
    }
    Ok((0..n as isize)
        .map(|i| {
            (1..=k as isize).all(|j| {
                let (a, b) = (c.at(i - j), c.at(i + j));
                let mid = ((a.0 + b.0) as f64 / 2.0, (a.1 + b.1) as f64 / 2.0);
                point_in_contour(c, mid) == Location::Outside
            })
        })
        .collect())
}

/// Collapses each cyclic run of consecutive flagged indices to its middle
/// index (the lower middle for even runs). Output is sorted.
pub fn collapse_runs(flags: &[bool]) -> Vec<usize> {
    collapse_runs_with_gap(flags, 0)
}

/// Cyclic `(start, len)` runs of flagged indices, beginning at a run start.
fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let n = flags.len();
    let Some(origin) = (0..n).find(|&i| flags[i] && !flags[(i + n - 1) % n]) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if !flags[(origin + i) % n] {
            i += 1;
            continue;
        }
        let mut len = 0;
        while i + len < n && flags[(origin + i + len) % n] {
            len += 1;
        }
        out.push(((origin + i) % n, len));
        i += len;
    }
    out
}

/// As [`collapse_runs`], but runs separated by at most `max_gap` unflagged
/// indices are treated as one span, whose middle is reported.
///
/// A notch whose bottom is a short straight segment puts the first midpoint
/// exactly on the boundary, which splits one concavity into two runs.
pub fn collapse_runs_with_gap(flags: &[bool], max_gap: usize) -> Vec<usize> {
    let n = flags.len();
    if n == 0 || !flags.iter().any(|&f| f) {
        return Vec::new();
    }
    if flags.iter().all(|&f| f) {
        return vec![(n - 1) / 2];
    }
    let runs = runs(flags);
    let gap_after = |r: usize| {
        let (s, l) = runs[r];
        let next = runs[(r + 1) % runs.len()].0;
        (next + n - (s + l) % n) % n
    };
    // start merging after a gap that is too wide so no span straddles it
    let Some(first) =
        (0..runs.len()).find(|&r| gap_after((r + runs.len() - 1) % runs.len()) > max_gap)
    else {
        // every gap is narrow: the whole contour is one concave span
        let total: usize =
            runs.iter().map(|r| r.1).sum::<usize>() + (0..runs.len()).map(gap_after).sum::<usize>();
        return vec![(runs[0].0 + (total - 1) / 2) % n];
    };
    let mut out = Vec::new();
    let mut r = 0;
    while r < runs.len() {
        let idx = (first + r) % runs.len();
        let start = runs[idx].0;
        let mut span = runs[idx].1;
        let mut last = idx;
        while r + 1 < runs.len() && gap_after(last) <= max_gap {
            span += gap_after(last) + runs[(last + 1) % runs.len()].1;
            last = (last + 1) % runs.len();
            r += 1;
        }
        out.push((start + (span - 1) / 2) % n);
        r += 1;
    }
    out.sort_unstable();
    out
}

/// Concave points of a contour, one per contiguous run.
pub fn find_concave_points(c: &Contour, k: usize) -> Result<Vec<ConcavePoint>> {
    find_concave_points_with_gap(c, k, 0)
}

/// Concave points with runs up to `max_gap` apart merged.
pub fn find_concave_points_with_gap(
    c: &Contour,
    k: usize,
    max_gap: usize,
) -> Result<Vec<ConcavePoint>> {
    let flags = concave_flags(c, k)?;
    Ok(collapse_runs_with_gap(&flags, max_gap)
        .into_iter()
        .map(|i| ConcavePoint {
            contour_index: i,
            coord: c.points()[i],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn middle_of_a_run() {
        let mut flags = vec![false; 30];
        flags[10] = true;
        flags[11] = true;
        flags[12] = true;
        assert_eq!(collapse_runs(&flags), vec![11]);
    }

    #[test]
    fn runs_wrap_around() {
        let mut flags = vec![false; 20];
        for i in [18, 19, 0, 1, 2] {
            flags[i] = true;
        }
        flags[9] = true;
        // run 18..=2 has length 5, middle is index 0
        assert_eq!(collapse_runs(&flags), vec![0, 9]);
    }

    #[test]
    fn even_run_takes_lower_middle() {
        let mut flags = vec![false; 10];
        flags[4] = true;
        flags[5] = true;
        assert_eq!(collapse_runs(&flags), vec![4]);
    }

    #[test]
    fn narrow_gaps_merge() {
        let mut flags = vec![false; 40];
        for i in [15, 17] {
            flags[i] = true;
        }
        flags[30] = true;
        assert_eq!(collapse_runs(&flags), vec![15, 17, 30]);
        assert_eq!(collapse_runs_with_gap(&flags, 1), vec![16, 30]);
        assert_eq!(collapse_runs_with_gap(&flags, 11), vec![16, 30]);
        // span 15..=30 has 16 indices, lower middle is 22
        assert_eq!(collapse_runs_with_gap(&flags, 12), vec![22]);
        assert_eq!(collapse_runs_with_gap(&flags, 24).len(), 1);
    }

    #[test]
    fn merged_span_wraps() {
        let mut flags = vec![false; 20];
        for i in [18, 19, 1, 2] {
            flags[i] = true;
        }
        // span 18..=2 with index 0 unflagged has length 5, middle is 0
        assert_eq!(collapse_runs_with_gap(&flags, 1), vec![0]);
        assert_eq!(collapse_runs_with_gap(&flags, 0), vec![1, 18]);
    }

    #[test]
    fn short_contour_is_rejected() {
        let c = Contour::new(0, vec![(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        assert!(matches!(
            find_concave_points(&c, 2),
            Err(Error::ContourTooShort { len: 4, k: 2 })
        ));
    }
}
