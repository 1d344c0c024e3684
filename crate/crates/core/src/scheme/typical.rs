//! Joint typicality against a target joint distribution `q(u, x)`.

/// Per-cell count bounds for an L∞ ball of radius `delta` around `q` at block length `n`.
#[derive(Debug, Clone)]
pub(crate) struct TypicalityBounds {
    nu: usize,
    nx: usize,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl TypicalityBounds {
    /// `q` is row-major `u x x`.
    pub fn new(q: &[f64], nu: usize, nx: usize, n: usize, delta: f64) -> Self {
        let nf = n as f64;
        let lo = q.iter().map(|&v| (nf * (v - delta) - 1e-9).ceil().max(0.0) as usize).collect();
        let hi = q.iter().map(|&v| (nf * (v + delta) + 1e-9).floor().min(nf) as usize).collect();
        Self { nu, nx, lo, hi }
    }

    #[inline]
    fn admits(&self, cell: usize, count: usize) -> bool {
        count >= self.lo[cell] && count <= self.hi[cell]
    }

    pub fn is_typical(&self, u: &[u8], x: &[usize]) -> bool {
        let mut counts = [0usize; 64];
        let mut heap;
        let counts: &mut [usize] = if self.nu * self.nx <= 64 {
            &mut counts[..self.nu * self.nx]
        } else {
            heap = vec![0usize; self.nu * self.nx];
            &mut heap
        };
        for (&a, &b) in u.iter().zip(x) {
            counts[a as usize * self.nx + b] += 1;
        }
        counts.iter().enumerate().all(|(cell, &c)| self.admits(cell, c))
    }

    /// Calls `visit` on every `x^n` jointly typical with `u`, in lexicographic order.
    pub fn for_each_typical(&self, u: &[u8], mut visit: impl FnMut(&[usize])) {
        let n = u.len();
        // remaining[j * nu + a]: positions >= j carrying label a.
        let mut remaining = vec![0usize; (n + 1) * self.nu];
        for j in (0..n).rev() {
            for a in 0..self.nu {
                remaining[j * self.nu + a] = remaining[(j + 1) * self.nu + a];
            }
            remaining[j * self.nu + u[j] as usize] += 1;
        }
        let mut counts = vec![0usize; self.nu * self.nx];
        if !(0..self.nu).all(|a| self.feasible_row(a, &counts, remaining[a])) {
            return;
        }
        let mut x = vec![0usize; n];
        self.dfs(u, 0, &remaining, &mut counts, &mut x, &mut visit);
    }

    fn feasible_row(&self, a: usize, counts: &[usize], rem: usize) -> bool {
        let mut need = 0;
        for b in 0..self.nx {
            let c = counts[a * self.nx + b];
            if c > self.hi[a * self.nx + b] {
                return false;
            }
            need += self.lo[a * self.nx + b].saturating_sub(c);
        }
        need <= rem
    }

    fn dfs(
        &self,
        u: &[u8],
        j: usize,
        remaining: &[usize],
        counts: &mut [usize],
        x: &mut [usize],
        visit: &mut impl FnMut(&[usize]),
    ) {
        if j == u.len() {
            visit(x);
            return;
        }
        let a = u[j] as usize;
        for b in 0..self.nx {
            counts[a * self.nx + b] += 1;
            if self.feasible_row(a, counts, remaining[(j + 1) * self.nu + a]) {
                x[j] = b;
                self.dfs(u, j + 1, remaining, counts, x, visit);
            }
            counts[a * self.nx + b] -= 1;
        }
    }
}
