//! Index combinations and counting helpers.

/// Binomial coefficient as a float, exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k)
        .fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        .round()
}

/// Lexicographic `k`-subsets of `0..n`, yielded as a borrowed slice so hot
/// loops do not allocate.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            started: false,
            done: k > n,
        }
    }

    pub fn next_combination(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
        self.done = true;
        None
    }
}

/// Visits every labeling of `len` points with at most `n` modes in which
/// modes appear in order of first occurrence (restricted growth strings).
/// The visitor may stop the walk early by returning `false`.
pub fn for_each_canonical_labeling(len: usize, n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if len == 0 || n == 0 {
        return;
    }
    let mut labels = vec![0usize; len];
    // prefix_max[i] = largest label among labels[..=i]
    let mut prefix_max = vec![0usize; len];
    loop {
        if !visit(&labels) {
            return;
        }
        // Increment the rightmost position that can still grow.
        let mut i = len - 1;
        loop {
            let cap = if i == 0 {
                0
            } else {
                (prefix_max[i - 1] + 1).min(n - 1)
            };
            if labels[i] < cap {
                labels[i] += 1;
                prefix_max[i] = if i == 0 {
                    labels[i]
                } else {
                    prefix_max[i - 1].max(labels[i])
                };
                for j in i + 1..len {
                    labels[j] = 0;
                    prefix_max[j] = prefix_max[i];
                }
                break;
            }
            if i == 0 {
                return;
            }
            i -= 1;
        }
    }
}
