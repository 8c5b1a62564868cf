//! Piecewise Chebyshev interpolants with adaptive splitting.

use std::f64::consts::PI;

/// A Chebyshev series `sum c_k T_k(t)` on `[a, b]`, `t` the affine image of `[a, b]` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebPiece {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl ChebPiece {
    /// Interpolates `f` at `n + 1` Chebyshev points of the first kind.
    pub fn fit<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> Self {
        let m = n + 1;
        let vals: Vec<f64> = (0..m)
            .map(|j| {
                let t = (PI * (j as f64 + 0.5) / m as f64).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * t)
            })
            .collect();
        let coeffs = (0..m)
            .map(|k| {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos())
                    .sum();
                if k == 0 { s / m as f64 } else { 2.0 * s / m as f64 }
            })
            .collect();
        Self { a, b, coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// Derivative of the series.
    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        if n < 2 {
            return 0.0;
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let p = ChebPiece { a: self.a, b: self.b, coeffs: d };
        p.eval(x) * 2.0 / (self.b - self.a)
    }

    /// Antiderivative vanishing at `a`.
    pub fn antiderivative(&self) -> Self {
        let c = &self.coeffs;
        let n = c.len();
        let mut out = vec![0.0; n + 1];
        let at = |k: usize| if k < n { c[k] } else { 0.0 };
        out[1] = at(0) - 0.5 * at(2);
        for (k, o) in out.iter_mut().enumerate().skip(2) {
            *o = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
        }
        let scale = 0.5 * (self.b - self.a);
        for o in out.iter_mut() {
            *o *= scale;
        }
        let mut p = ChebPiece { a: self.a, b: self.b, coeffs: out };
        let base = p.eval(self.a);
        p.coeffs[0] -= base;
        p
    }

    fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(3)..].iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

/// Settings for [`PiecewiseCheb::build`].
#[derive(Debug, Clone, Copy)]
pub struct ChebOptions {
    pub degree: usize,
    pub tol: f64,
    pub max_depth: usize,
    pub max_pieces: usize,
}

impl Default for ChebOptions {
    fn default() -> Self {
        Self { degree: 32, tol: 1e-14, max_depth: 48, max_pieces: 400 }
    }
}

/// Piecewise Chebyshev approximation over sorted, abutting pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCheb {
    pub pieces: Vec<ChebPiece>,
}

impl PiecewiseCheb {
    /// Fits `f` on `[a, b]`, forcing splits at `breaks` and bisecting pieces whose
    /// trailing coefficients exceed `tol * max(1, scale)`.
    pub fn build<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], opts: &ChebOptions) -> Self {
        let mut edges = vec![a];
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        edges.extend(inner);
        edges.push(b);
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let mut stack = vec![(w[0], w[1], 0usize)];
            let mut local = Vec::new();
            while let Some((lo, hi, depth)) = stack.pop() {
                let p = ChebPiece::fit(&f, lo, hi, opts.degree);
                let scale = p.coeffs.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
                let done = p.tail() <= opts.tol * scale
                    || depth >= opts.max_depth
                    || pieces.len() + local.len() + stack.len() >= opts.max_pieces;
                if done {
                    local.push(p);
                } else {
                    let mid = 0.5 * (lo + hi);
                    stack.push((mid, hi, depth + 1));
                    stack.push((lo, mid, depth + 1));
                }
            }
            local.sort_by(|p, q| p.a.total_cmp(&q.a));
            pieces.extend(local);
        }
        Self { pieces }
    }

    pub fn lo(&self) -> f64 {
        self.pieces[0].a
    }

    pub fn hi(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].b
    }

    /// Index of the piece containing `x`, clamped to the ends.
    pub fn locate(&self, x: f64) -> usize {
        let k = self.pieces.partition_point(|p| p.b < x);
        k.min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.locate(x)].eval(x)
    }
}
