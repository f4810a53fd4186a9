//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15 point)
//! on finite and half-infinite intervals, plus Gauss–Legendre rules.

use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive integral of `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    integrate_points(f, &[a, b], abs_tol, rel_tol)
}

/// Like [`integrate`] with the interval pre-split at the given ordered points.
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, pts: &[f64], abs_tol: f64, rel_tol: f64) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in pts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Seg { a: w[0], b: w[1], val: v, err: e });
    }
    let max_segs = 20_000;
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_segs {
        let s = heap.pop().expect("non-empty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            heap.push(s);
            break;
        }
        let (v1, e1) = gk15(&f, s.a, m);
        let (v2, e2) = gk15(&f, m, s.b);
        total += v1 + v2 - s.val;
        err += e1 + e2 - s.err;
        heap.push(Seg { a: s.a, b: m, val: v1, err: e1 });
        heap.push(Seg { a: m, b: s.b, val: v2, err: e2 });
    }
    // re-sum to shed accumulated rounding in the running total
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.val, e + s.err));
    QuadResult { value, error, intervals: heap.len() }
}

/// Integral over `[a, ∞)` via `x = a + s/(1-s)`.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    let g = |s: f64| {
        let d = 1.0 - s;
        let x = a + s / d;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (d * d)
        }
    };
    integrate_points(g, &[0.0, 0.5, 0.9, 0.99, 1.0], abs_tol, rel_tol)
}

/// Integral over ℝ, split at the supplied finite points.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, pts: &[f64], abs_tol: f64, rel_tol: f64) -> QuadResult {
    let lo = pts.first().copied().unwrap_or(0.0);
    let hi = pts.last().copied().unwrap_or(0.0);
    let left = integrate_to_inf(|x| f(-x), -lo, abs_tol / 3.0, rel_tol);
    let right = integrate_to_inf(&f, hi, abs_tol / 3.0, rel_tol);
    let mid = if pts.len() >= 2 {
        integrate_points(&f, pts, abs_tol / 3.0, rel_tol)
    } else {
        QuadResult { value: 0.0, error: 0.0, intervals: 0 }
    };
    QuadResult {
        value: left.value + mid.value + right.value,
        error: left.error + mid.error + right.error,
        intervals: left.intervals + mid.intervals + right.intervals,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed Gauss–Legendre rule over `[a, b]`.
pub fn gl_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.0.iter().zip(&rule.1).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Running integral of grid samples `g_i = g(i·h)` by local cubic interpolation.
/// Cells whose cubic estimate is not positive for positive data fall back to the trapezoid.
pub fn cumulative_cubic(g: &[f64], h: f64) -> Vec<f64> {
    let m = g.len() - 1;
    let mut out = Vec::with_capacity(m + 1);
    out.push(0.0);
    for i in 0..m {
        let trap = 0.5 * h * (g[i] + g[i + 1]);
        let cell = if m < 3 {
            trap
        } else if i == 0 {
            h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3])
        } else if i == m - 1 {
            h / 24.0 * (g[m - 3] - 5.0 * g[m - 2] + 19.0 * g[m - 1] + 9.0 * g[m])
        } else {
            h / 24.0 * (13.0 * (g[i] + g[i + 1]) - g[i - 1] - g[i + 2])
        };
        let cell = if trap > 0.0 && cell <= 0.0 { trap } else { cell };
        out.push(out[i] + cell);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_and_logs() {
        let r = integrate(|x| x * x, 0.0, 3.0, 1e-14, 1e-14);
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-12, 1e-12);
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn infinite_ranges() {
        let r = integrate_to_inf(|x| 1.0 / (1.0 + x * x), 0.0, 1e-13, 1e-13);
        assert!((r.value - PI / 2.0).abs() < 1e-11);
        let r = integrate_real_line(|x: f64| (-x * x).exp(), &[-1.0, 1.0], 1e-13, 1e-13);
        assert!((r.value - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn legendre_rules() {
        let rule = gauss_legendre(10);
        let s: f64 = rule.1.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let v = gl_integrate(|x: f64| x.powi(19), 0.0, 1.0, &rule);
        assert!((v - 0.05).abs() < 1e-14);
        let rule = gauss_legendre(1);
        let g: Vec<f64> = (0..=64).map(|i| (i as f64 / 64.0).powi(3)).collect();
        let c = cumulative_cubic(&g, 1.0 / 64.0);
        assert!((c[32] - 0.015625).abs() < 1e-15 && (c[64] - 0.25).abs() < 1e-15);
        assert!((rule.1[0] - 2.0).abs() < 1e-15 && rule.0[0].abs() < 1e-15);
    }
}
