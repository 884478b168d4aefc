//! Proximal maps of anisotropic total variation on chains and graphs.

/// Exact `argmin_x 1/2 ||x - y||^2 + lambda sum |x_{k+1} - x_k|`
/// by Condat's direct algorithm.
pub fn tv1d_denoise(y: &[f64], lambda: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    if lambda <= 0.0 {
        out.copy_from_slice(y);
        return out;
    }
    let (mut k, mut k0, mut kplus, mut kminus) = (0usize, 0usize, 0usize, 0usize);
    let (mut umin, mut umax) = (lambda, -lambda);
    let (mut vmin, mut vmax) = (y[0] - lambda, y[0] + lambda);
    let two = 2.0 * lambda;
    loop {
        while k == n - 1 {
            if umin < 0.0 {
                while k0 <= kminus {
                    out[k0] = vmin;
                    k0 += 1;
                }
                k = k0;
                kminus = k0;
                vmin = y[k0];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                while k0 <= kplus {
                    out[k0] = vmax;
                    k0 += 1;
                }
                k = k0;
                kplus = k0;
                vmax = y[k0];
                umax = -lambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                while k0 <= k {
                    out[k0] = vmin;
                    k0 += 1;
                }
                return out;
            }
        }
        umin += y[k + 1] - vmin;
        if umin < -lambda {
            while k0 <= kminus {
                out[k0] = vmin;
                k0 += 1;
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmin = y[k0];
            vmax = vmin + two;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        umax += y[k + 1] - vmax;
        if umax > lambda {
            while k0 <= kplus {
                out[k0] = vmax;
                k0 += 1;
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmax = y[k0];
            vmin = vmax - two;
            umin = lambda;
            umax = -lambda;
        } else {
            k += 1;
            if umin >= lambda {
                kminus = k;
                vmin += (umin - lambda) / (kminus - k0 + 1) as f64;
                umin = lambda;
            }
            if umax <= -lambda {
                kplus = k;
                vmax += (umax + lambda) / (kplus - k0 + 1) as f64;
                umax = -lambda;
            }
        }
    }
}

/// Penalised differences: `x[b] - x[a]` for `(a, Some(b))`, `x[a]` for
/// `(a, None)`.
pub type Edge = (usize, Option<usize>);

#[derive(Clone, Copy, Debug)]
pub struct FistaOptions {
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for FistaOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-9, max_iter: 20_000 }
    }
}

/// `argmin_x 1/2 ||x - z||^2 + lambda sum_e |(B x)_e|` by FISTA on the
/// box-constrained dual, stopped on the duality gap
/// `gap <= gap_tol (1 + ||z||^2)`.
pub fn graph_tv_denoise(z: &[f64], edges: &[Edge], lambda: f64, opts: FistaOptions) -> Vec<f64> {
    let n = z.len();
    if edges.is_empty() || lambda <= 0.0 {
        return z.to_vec();
    }
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        degree[a] += 1;
        if let Some(b) = b {
            degree[b] += 1;
        }
    }
    let lip = 2.0 * *degree.iter().max().unwrap_or(&1) as f64;
    let step = 1.0 / lip;
    let m = edges.len();
    let primal = |beta: &[f64], x: &mut Vec<f64>| {
        x.copy_from_slice(z);
        for (e, &(a, b)) in edges.iter().enumerate() {
            match b {
                Some(b) => {
                    x[a] += beta[e];
                    x[b] -= beta[e];
                }
                None => x[a] -= beta[e],
            }
        }
    };
    let apply_b = |x: &[f64], e: usize| match edges[e] {
        (a, Some(b)) => x[b] - x[a],
        (a, None) => x[a],
    };
    let zz: f64 = z.iter().map(|v| v * v).sum();
    let mut beta = vec![0.0; m];
    let mut prev = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mut x = vec![0.0; n];
    let mut t = 1.0_f64;
    for it in 0..opts.max_iter {
        primal(&w, &mut x);
        prev.copy_from_slice(&beta);
        for e in 0..m {
            beta[e] = (w[e] + step * apply_b(&x, e)).clamp(-lambda, lambda);
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let mom = (t - 1.0) / t_next;
        for e in 0..m {
            w[e] = beta[e] + mom * (beta[e] - prev[e]);
        }
        t = t_next;
        if it % 10 == 9 {
            primal(&beta, &mut x);
            let xx: f64 = x.iter().map(|v| v * v).sum();
            let fit: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            let pen: f64 = (0..m).map(|e| apply_b(&x, e).abs()).sum();
            let gap = 0.5 * fit + lambda * pen - 0.5 * (zz - xx);
            if gap <= opts.gap_tol * (1.0 + zz) {
                return x;
            }
        }
    }
    primal(&beta, &mut x);
    x
}
