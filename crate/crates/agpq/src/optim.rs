//! Quasi-Newton (BFGS) minimizer with central finite-difference gradients.
//!
//! Used both for the classical geminal optimization and the pair-hopper
//! VQE loop. Deterministic: no randomness, fixed evaluation order.

#[derive(Debug, Clone)]
pub struct BfgsOptions {
    /// Stop when the gradient infinity norm drops below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Cap on objective evaluations (gradients included).
    pub max_evals: usize,
    /// Central-difference step; per-coordinate h = fd_step * max(1, |x_i|)
    /// when `fd_step_relative`, otherwise h = fd_step.
    pub fd_step: f64,
    pub fd_step_relative: bool,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_iters: 500,
            max_evals: usize::MAX,
            fd_step: 1e-5,
            fd_step_relative: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm_inf: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Per-iteration (objective, gradient infinity norm).
    pub history: Vec<(f64, f64)>,
}

pub fn central_diff_gradient<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &[f64],
    opts: &BfgsOptions,
) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = if opts.fd_step_relative {
            opts.fd_step * x[i].abs().max(1.0)
        } else {
            opts.fd_step
        };
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dense-inverse-Hessian BFGS with a backtracking Armijo line search.
/// Updates with non-positive curvature are skipped.
pub fn bfgs<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult {
    let n = x0.len();
    let mut evals = 0usize;
    let call = |f: &mut F, x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut x = x0.to_vec();
    let mut fx = call(f, &x, &mut evals);
    let mut history = Vec::new();

    if n == 0 {
        return BfgsResult {
            x,
            f: fx,
            grad_norm_inf: 0.0,
            iterations: 0,
            evaluations: evals,
            converged: true,
            history,
        };
    }

    // Inverse Hessian approximation, row-major.
    let mut hinv = vec![0.0; n * n];
    for i in 0..n {
        hinv[i * n + i] = 1.0;
    }

    let grad = |f: &mut F, x: &[f64], evals: &mut usize| {
        *evals += 2 * x.len();
        central_diff_gradient(f, x, opts)
    };
    let mut g = grad(f, &x, &mut evals);
    let mut converged = inf_norm(&g) < opts.grad_tol;
    let mut iter = 0;

    while !converged && iter < opts.max_iters && evals < opts.max_evals {
        iter += 1;
        // d = -Hinv g
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += hinv[i * n + j] * g[j];
            }
            d[i] = -acc;
        }
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            // Not a descent direction: reset to steepest descent.
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            for i in 0..n {
                d[i] = -g[i];
            }
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }

        // Backtracking Armijo search.
        let mut alpha = 1.0;
        let mut xn = vec![0.0; n];
        let mut fn_: f64;
        let mut ok = false;
        for _ in 0..60 {
            for i in 0..n {
                xn[i] = x[i] + alpha * d[i];
            }
            fn_ = call(f, &xn, &mut evals);
            if fn_ <= fx + 1e-4 * alpha * slope {
                ok = true;
                let gn = grad(f, &xn, &mut evals);
                // BFGS update on (s, y).
                let s: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
                let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
                let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
                if sy > 1e-12 * inf_norm(&s) * inf_norm(&y).max(1e-300) {
                    let rho = 1.0 / sy;
                    // Hinv <- (I - rho s y^T) Hinv (I - rho y s^T) + rho s s^T
                    let mut hy = vec![0.0; n];
                    for i in 0..n {
                        let mut acc = 0.0;
                        for j in 0..n {
                            acc += hinv[i * n + j] * y[j];
                        }
                        hy[i] = acc;
                    }
                    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
                    for i in 0..n {
                        for j in 0..n {
                            hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                                + rho * rho * yhy * s[i] * s[j]
                                + rho * s[i] * s[j];
                        }
                    }
                }
                x = xn.clone();
                fx = fn_;
                g = gn;
                break;
            }
            alpha *= 0.5;
        }
        let gnorm = inf_norm(&g);
        history.push((fx, gnorm));
        if !ok {
            // Line search stalled; gradient is as converged as it gets.
            break;
        }
        converged = gnorm < opts.grad_tol;
    }

    BfgsResult {
        grad_norm_inf: inf_norm(&g),
        x,
        f: fx,
        iterations: iter,
        evaluations: evals,
        converged,
        history,
    }
}
