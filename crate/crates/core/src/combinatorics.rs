//! Binomial coefficients from a log-factorial table.

/// Largest population the table covers exactly.
pub const MAX_POPULATION: usize = 170;

/// Cached `ln(m!)` for `m = 0..=MAX_POPULATION`.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl Default for LogFactorials {
    fn default() -> Self {
        Self::new()
    }
}

impl LogFactorials {
    pub fn new() -> Self {
        let mut table = Vec::with_capacity(MAX_POPULATION + 1);
        let mut acc = 0.0_f64;
        table.push(0.0);
        for m in 1..=MAX_POPULATION {
            acc += (m as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn ln_factorial(&self, m: usize) -> f64 {
        self.table[m]
    }

    /// `ln C(n, k)`, or `-inf` when `k > n`.
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }

    pub fn binomial(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return 0.0;
        }
        if k == 0 || k == n {
            return 1.0;
        }
        self.ln_binomial(n, k).exp()
    }
}

/// Calls `visit` with every vector `v` such that `v[i] <= caps[i]` and
/// `sum(v) == total`, in lexicographic order.
pub fn for_each_bounded_composition<F>(caps: &[usize], total: usize, mut visit: F)
where
    F: FnMut(&[usize]),
{
    let cap_sum: usize = caps.iter().sum();
    if total > cap_sum || caps.is_empty() {
        return;
    }
    // suffix[i] = sum of caps[i..]
    let mut suffix = vec![0usize; caps.len() + 1];
    for i in (0..caps.len()).rev() {
        suffix[i] = suffix[i + 1] + caps[i];
    }
    let mut current = vec![0usize; caps.len()];
    recurse(caps, &suffix, 0, total, &mut current, &mut visit);
}

fn recurse<F>(
    caps: &[usize],
    suffix: &[usize],
    depth: usize,
    remaining: usize,
    current: &mut [usize],
    visit: &mut F,
) where
    F: FnMut(&[usize]),
{
    if depth + 1 == caps.len() {
        if remaining <= caps[depth] {
            current[depth] = remaining;
            visit(current);
        }
        return;
    }
    let rest_cap = suffix[depth + 1];
    let lo = remaining.saturating_sub(rest_cap);
    let hi = remaining.min(caps[depth]);
    for v in lo..=hi {
        current[depth] = v;
        recurse(caps, suffix, depth + 1, remaining - v, current, visit);
    }
}
