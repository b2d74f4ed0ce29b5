use crate::root::golden_section_min;
use crate::AtomicMeasure;

const CENTER_TOL: f64 = 1e-12;

/// Cost of serving a contiguous run of atoms `[i, j)` from one optimal
/// center under `|x − a|^r`. Closed forms for `r = 1` (lower weighted
/// median) and `r = 2` (mean) use prefix sums; other orders minimize the
/// convex block cost by golden section.
pub struct SegmentCost<'a> {
    x: &'a [f64],
    w: &'a [f64],
    r: f64,
    pw: Vec<f64>,
    ps1: Vec<f64>,
    ps2: Vec<f64>,
}

impl<'a> SegmentCost<'a> {
    pub fn new(mu: &'a AtomicMeasure, r: f64) -> Self {
        let (x, w) = (mu.atoms(), mu.weights());
        let m = x.len();
        let mut pw = Vec::with_capacity(m + 1);
        let mut ps1 = Vec::with_capacity(m + 1);
        let mut ps2 = Vec::with_capacity(m + 1);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        pw.push(0.0);
        ps1.push(0.0);
        ps2.push(0.0);
        for k in 0..m {
            a += w[k];
            b += w[k] * x[k];
            c += w[k] * x[k] * x[k];
            pw.push(a);
            ps1.push(b);
            ps2.push(c);
        }
        SegmentCost { x, w, r, pw, ps1, ps2 }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Lower weighted median index of `[i, j)`.
    fn median_index(&self, i: usize, j: usize) -> usize {
        let half = 0.5 * (self.pw[j] - self.pw[i]);
        let target = self.pw[i] + half * (1.0 - 1e-12);
        // first t with pw[t + 1] >= target
        let t = self.pw[i + 1..=j].partition_point(|&c| c < target);
        (i + t).min(j - 1)
    }

    /// Optimal center of `[i, j)`.
    pub fn center(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j);
        if j - i == 1 {
            return self.x[i];
        }
        if self.r == 2.0 {
            (self.ps1[j] - self.ps1[i]) / (self.pw[j] - self.pw[i])
        } else if self.r == 1.0 {
            self.x[self.median_index(i, j)]
        } else if self.r >= 1.0 {
            golden_section_min(|a| self.cost_at(i, j, a), self.x[i], self.x[j - 1], CENTER_TOL).0
        } else {
            // concave between atoms: the minimum sits on an atom
            (i..j)
                .map(|k| (self.x[k], self.cost_at(i, j, self.x[k])))
                .fold((self.x[i], f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
                .0
        }
    }

    /// Direct `Σ_{k∈[i,j)} w_k |x_k − a|^r`.
    pub fn cost_at(&self, i: usize, j: usize, a: f64) -> f64 {
        let r = self.r;
        (i..j)
            .map(|k| {
                let d = (self.x[k] - a).abs();
                let p = if r == 2.0 { d * d } else if r == 1.0 { d } else { d.powf(r) };
                self.w[k] * p
            })
            .sum()
    }

    /// Minimal cost of `[i, j)`; empty runs cost nothing.
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        if j <= i + 1 {
            return 0.0;
        }
        if self.r == 2.0 {
            let w = self.pw[j] - self.pw[i];
            let s1 = self.ps1[j] - self.ps1[i];
            let s2 = self.ps2[j] - self.ps2[i];
            (s2 - s1 * s1 / w).max(0.0)
        } else if self.r == 1.0 {
            let t = self.median_index(i, j);
            let m = self.x[t];
            let left = m * (self.pw[t] - self.pw[i]) - (self.ps1[t] - self.ps1[i]);
            let right = (self.ps1[j] - self.ps1[t]) - m * (self.pw[j] - self.pw[t]);
            (left + right).max(0.0)
        } else {
            self.cost_at(i, j, self.center(i, j))
        }
    }
}
