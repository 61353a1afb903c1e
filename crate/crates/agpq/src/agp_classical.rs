//! Classical AGP engine: elementary symmetric polynomials, AGP norms and
//! reduced density matrices, geminal-coefficient optimization, BCS
//! mean-field and the critical coupling.

use crate::error::{AgpqError, Result};
use crate::optim::{self, BfgsOptions};
use crate::pair_model::{sector_basis, PairingModel};
use crate::statevector::StateVector;
use num_complex::Complex64;

/// Real geminal coefficients eta_p with a pair count N. The AGP state is
/// sum over N-subsets S of prod_{p in S} eta_p |S>.
#[derive(Debug, Clone, PartialEq)]
pub struct GeminalState {
    pub eta: Vec<f64>,
    pub n: usize,
}

impl GeminalState {
    pub fn new(eta: Vec<f64>, n: usize) -> Result<Self> {
        if n > eta.len() {
            return Err(AgpqError::InvalidArgument(format!(
                "pair count {n} exceeds level count {}",
                eta.len()
            )));
        }
        Ok(Self { eta, n })
    }

    pub fn m(&self) -> usize {
        self.eta.len()
    }

    fn eta_sq(&self) -> Vec<f64> {
        self.eta.iter().map(|e| e * e).collect()
    }
}

/// BCS mean-field solution of the gap and number equations.
#[derive(Debug, Clone)]
pub struct BcsSolution {
    pub gap: f64,
    pub mu: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Elementary symmetric polynomial e_k(x) via the stable recurrence
/// e_k^(m) = e_k^(m-1) + x_m e_{k-1}^(m-1), e_0 = 1.
pub fn esp(x: &[f64], k: usize) -> Result<f64> {
    if k > x.len() {
        return Err(AgpqError::InvalidArgument(format!(
            "esp order {k} exceeds variable count {}",
            x.len()
        )));
    }
    Ok(esp_skipping(x, k, &[]))
}

/// e_k over x with the listed (0-based) positions excluded.
fn esp_skipping(x: &[f64], k: usize, skip: &[usize]) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (m, &xm) in x.iter().enumerate() {
        if skip.contains(&m) {
            continue;
        }
        for j in (1..=k).rev() {
            e[j] += xm * e[j - 1];
        }
    }
    e[k]
}

/// <AGP|AGP> = e_N({eta_p^2}).
pub fn agp_norm(g: &GeminalState) -> Result<f64> {
    let norm = esp(&g.eta_sq(), g.n)?;
    if norm <= 0.0 {
        return Err(AgpqError::DegenerateState(format!(
            "AGP norm e_{}(eta^2) = {norm} (fewer than N nonzero eta?)",
            g.n
        )));
    }
    Ok(norm)
}

/// Scale eta_p -> eta_p / <AGP|AGP>^{1/2N} so the AGP norm becomes 1.
/// Ratios eta_p/eta_q are preserved exactly.
pub fn scale_geminals(g: &GeminalState) -> Result<GeminalState> {
    if g.n == 0 {
        return Ok(g.clone());
    }
    let norm = agp_norm(g)?;
    let factor = norm.powf(-1.0 / (2.0 * g.n as f64));
    Ok(GeminalState {
        eta: g.eta.iter().map(|e| e * factor).collect(),
        n: g.n,
    })
}

/// Pair occupation <AGP| n_pair,p |AGP> / <AGP|AGP> for 1-based level p.
pub fn agp_rdm1(g: &GeminalState, p: usize) -> Result<f64> {
    if p == 0 || p > g.m() {
        return Err(AgpqError::IndexOutOfRange {
            index: p,
            num_qubits: g.m(),
        });
    }
    if g.n == 0 {
        return Ok(0.0);
    }
    let sq = g.eta_sq();
    let norm = agp_norm(g)?;
    Ok(sq[p - 1] * esp_skipping(&sq, g.n - 1, &[p - 1]) / norm)
}

/// Pair-transfer matrix element <AGP| P+_p P_q |AGP> / <AGP|AGP>, p != q.
pub fn agp_pair_transfer(g: &GeminalState, p: usize, q: usize) -> Result<f64> {
    let m = g.m();
    for idx in [p, q] {
        if idx == 0 || idx > m {
            return Err(AgpqError::IndexOutOfRange {
                index: idx,
                num_qubits: m,
            });
        }
    }
    if p == q {
        return Err(AgpqError::InvalidArgument(
            "pair transfer requires p != q".into(),
        ));
    }
    if g.n == 0 {
        return Ok(0.0);
    }
    let sq = g.eta_sq();
    let norm = agp_norm(g)?;
    Ok(g.eta[p - 1] * g.eta[q - 1] * esp_skipping(&sq, g.n - 1, &[p - 1, q - 1]) / norm)
}

/// <AGP|H|AGP>/<AGP|AGP> for the pairing Hamiltonian, assembled from the
/// one-pair occupations and pair-transfer elements.
pub fn agp_energy(g: &GeminalState, model: &PairingModel) -> Result<f64> {
    if g.n != model.n {
        return Err(AgpqError::InvalidArgument(format!(
            "geminal pair count {} differs from model pair count {}",
            g.n, model.n
        )));
    }
    if g.m() != model.m {
        return Err(AgpqError::InvalidArgument(format!(
            "geminal level count {} differs from model level count {}",
            g.m(),
            model.m
        )));
    }
    if g.n == 0 {
        return Ok(0.0);
    }
    let sq = g.eta_sq();
    let norm = agp_norm(g)?;
    let mut energy = 0.0;
    for p in 1..=model.m {
        let occ = sq[p - 1] * esp_skipping(&sq, g.n - 1, &[p - 1]) / norm;
        energy += (2.0 * model.eps(p) - model.g) * occ;
    }
    for p in 1..=model.m {
        for q in 1..=model.m {
            if p == q {
                continue;
            }
            energy -= model.g * g.eta[p - 1] * g.eta[q - 1]
                * esp_skipping(&sq, g.n - 1, &[p - 1, q - 1])
                / norm;
        }
    }
    Ok(energy)
}

/// The AGP state as an explicit 2^M amplitude vector (unnormalized):
/// amplitude on configuration S is prod_{p in S} eta_p.
pub fn agp_statevector(g: &GeminalState) -> StateVector {
    let m = g.m();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    for mask in sector_basis(m, g.n) {
        let mut prod = 1.0;
        for p in 0..m {
            if mask & (1 << p) != 0 {
                prod *= g.eta[p];
            }
        }
        amps[mask as usize] = Complex64::new(prod, 0.0);
    }
    StateVector {
        amplitudes: amps,
        num_qubits: m,
    }
}

/// Aufbau pair filling: minimum diagonal of the seniority-zero
/// Hamiltonian, sum_{p<=N} (2 eps_p - G).
pub fn hf_energy(model: &PairingModel) -> f64 {
    (1..=model.n)
        .map(|p| 2.0 * model.eps(p) - model.g)
        .sum()
}

fn number_function(model: &PairingModel, delta: f64, mu: f64) -> f64 {
    (1..=model.m)
        .map(|p| {
            let xi = model.eps(p) - mu;
            0.5 * (1.0 - xi / (xi * xi + delta * delta).sqrt())
        })
        .sum()
}

/// Chemical potential solving the number equation at fixed gap, by bisection.
fn solve_mu(model: &PairingModel, delta: f64) -> f64 {
    let span = model.m as f64 * model.delta_eps + delta.abs() + 10.0;
    let (mut lo, mut hi) = (model.eps(1) - span, model.eps(model.m) + span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if number_function(model, delta, mid) < model.n as f64 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn normal_state(model: &PairingModel) -> BcsSolution {
    let n = model.n;
    let mu = if n == 0 {
        model.eps(1) - model.delta_eps
    } else if n == model.m {
        model.eps(model.m) + model.delta_eps
    } else {
        0.5 * (model.eps(n) + model.eps(n + 1))
    };
    let v: Vec<f64> = (1..=model.m)
        .map(|p| if p <= n { 1.0 } else { 0.0 })
        .collect();
    let u: Vec<f64> = v.iter().map(|vp| (1.0 - vp * vp).sqrt()).collect();
    BcsSolution {
        gap: 0.0,
        mu,
        u,
        v,
    }
}

/// Solve the coupled BCS gap and number equations,
/// Delta = G sum_p u_p v_p and sum_p v_p^2 = N, by damped fixed-point
/// iteration on Delta with the chemical potential re-solved by bisection
/// at every step. Returns the Delta = 0 branch when no positive solution
/// exists.
pub fn solve_bcs_meanfield(model: &PairingModel) -> Result<BcsSolution> {
    if !model.g.is_finite() || model.g <= 0.0 {
        return Err(AgpqError::InvalidArgument(
            "BCS mean field requires G > 0".into(),
        ));
    }
    if model.n == 0 || model.n == model.m {
        return Ok(normal_state(model));
    }

    // Branch selection: the paired solution only exists above the onset
    // coupling where G times the linearized kernel exceeds one, with the
    // chemical potential pinned mid-gap as Delta -> 0+.
    if model.g * onset_kernel(model) <= 1.0 {
        return Ok(normal_state(model));
    }

    let gap_sum = |delta: f64, mu: f64| -> f64 {
        // G sum_p u_p v_p = (G/2) sum_p Delta / E_p
        (1..=model.m)
            .map(|p| {
                let xi = model.eps(p) - mu;
                0.5 * model.g * delta / (xi * xi + delta * delta).sqrt()
            })
            .sum()
    };

    let mut delta = model.g.max(model.delta_eps);
    let mut converged = false;
    for _ in 0..500_000 {
        let mu = solve_mu(model, delta);
        let target = gap_sum(delta, mu);
        if (target - delta).abs() < 1e-12 * delta.max(1.0) {
            converged = true;
            break;
        }
        delta = 0.5 * delta + 0.5 * target;
        if delta < 1e-8 * model.delta_eps {
            return Ok(normal_state(model));
        }
    }
    if !converged {
        return Err(AgpqError::ConvergenceFailure(
            "BCS gap fixed point did not settle".into(),
        ));
    }
    if delta < 1e-8 * model.delta_eps {
        return Ok(normal_state(model));
    }
    let mu = solve_mu(model, delta);
    let mut u = Vec::with_capacity(model.m);
    let mut v = Vec::with_capacity(model.m);
    for p in 1..=model.m {
        let xi = model.eps(p) - mu;
        let e = (xi * xi + delta * delta).sqrt();
        let v2 = 0.5 * (1.0 - xi / e);
        v.push(v2.sqrt());
        u.push((1.0 - v2).sqrt());
    }
    let sol = BcsSolution { gap: delta, mu, u, v };
    let resid_gap = (sol.gap - model.g * sol.u.iter().zip(&sol.v).map(|(a, b)| a * b).sum::<f64>())
        .abs();
    let resid_num = (sol.v.iter().map(|x| x * x).sum::<f64>() - model.n as f64).abs();
    if resid_gap > 1e-10 * sol.gap.max(1.0) || resid_num > 1e-10 {
        return Err(AgpqError::ConvergenceFailure(format!(
            "BCS residuals too large: gap {resid_gap:.3e}, number {resid_num:.3e}"
        )));
    }
    Ok(sol)
}

/// Linearized gap-equation kernel sum_p 1/(2 |eps_p - mu|) in the
/// Delta -> 0+ limit, where the chemical potential pins to the middle of
/// the gap between the last occupied and first empty level.
fn onset_kernel(model: &PairingModel) -> f64 {
    let mu = 0.5 * (model.eps(model.n) + model.eps(model.n + 1));
    (1..=model.m)
        .map(|p| 0.5 / (model.eps(p) - mu).abs())
        .sum()
}

/// Smallest G > 0 admitting a Delta > 0 mean-field solution, obtained from
/// the onset condition (G/2) sum_p 1/E_p = 1 evaluated in the
/// Delta -> 0+ limit.
pub fn find_critical_g(model: &PairingModel) -> Result<f64> {
    if model.n == 0 || model.n == model.m {
        return Err(AgpqError::InvalidArgument(
            "critical coupling undefined for an empty or full system".into(),
        ));
    }
    Ok(1.0 / onset_kernel(model))
}

/// Starting geminal coefficients: eta_p = v_p/u_p from the mean field when
/// it breaks number symmetry, otherwise an Aufbau-like profile with a
/// strictly positive geometric tail.
pub fn init_geminals(model: &PairingModel) -> GeminalState {
    if model.g > 0.0 && model.n > 0 && model.n < model.m {
        if let Ok(sol) = solve_bcs_meanfield(model) {
            if sol.gap > 0.0 {
                let eta = sol
                    .v
                    .iter()
                    .zip(&sol.u)
                    .map(|(v, u)| v / u)
                    .collect();
                return GeminalState {
                    eta,
                    n: model.n,
                };
            }
        }
    }
    let zeta: f64 = 0.1;
    let eta = (1..=model.m)
        .map(|p| {
            if p <= model.n {
                1.0
            } else {
                zeta.powi((p - model.n) as i32)
            }
        })
        .collect();
    GeminalState { eta, n: model.n }
}

/// Minimize the AGP energy over the geminal coefficients with BFGS and
/// central finite-difference gradients, then rescale to unit AGP norm.
///
/// eta is optimized unconstrained (signs allowed): on the repulsive side
/// the optimal geminal changes sign across the Fermi level, which a
/// positivity-preserving parameterization cannot reach. Several
/// deterministic starts cover both sign sectors.
pub fn optimize_geminals(model: &PairingModel, init: &GeminalState) -> Result<GeminalState> {
    if init.n != model.n || init.m() != model.m {
        return Err(AgpqError::InvalidArgument(
            "init geminal does not match the model".into(),
        ));
    }
    if model.n == 0 || model.n == model.m {
        // Unique configuration; nothing to optimize.
        return scale_geminals(init);
    }
    let nonzero = init.eta.iter().filter(|e| e.abs() > 0.0).count();
    if nonzero < model.n {
        return Err(AgpqError::InvalidArgument(
            "init has fewer than N nonzero geminal coefficients".into(),
        ));
    }

    let objective = |x: &[f64]| -> f64 {
        let g = GeminalState {
            eta: x.to_vec(),
            n: model.n,
        };
        scale_geminals(&g).and_then(|s| agp_energy(&s, model)).unwrap_or(1e30)
    };

    let opts = BfgsOptions {
        grad_tol: 1e-8,
        max_iters: 5_000,
        max_evals: 10_000,
        fd_step: 1e-6,
        fd_step_relative: true,
    };

    let base = scale_geminals(init)?;
    let mut starts = vec![base.eta.clone()];
    // Sign-flipped tail above the Fermi level (repulsive-side minimum).
    let flipped: Vec<f64> = base
        .eta
        .iter()
        .enumerate()
        .map(|(i, &e)| if i + 1 > model.n { -e } else { e })
        .collect();
    starts.push(flipped);

    let mut best: Option<optim::BfgsResult> = None;
    for x0 in &starts {
        let mut f = objective;
        let res = optim::bfgs(&mut f, x0, &opts);
        let better = match &best {
            None => true,
            Some(b) => res.converged && (!b.converged || res.f < b.f - 1e-14),
        };
        if better {
            best = Some(res);
        }
    }
    let best = best.unwrap();
    if !best.converged && best.grad_norm_inf > 1e-6 {
        return Err(AgpqError::ConvergenceFailure(format!(
            "geminal optimization stalled: |grad|_inf = {:.3e}",
            best.grad_norm_inf
        )));
    }
    scale_geminals(&GeminalState {
        eta: best.x,
        n: model.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair_model::{hamiltonian_pauli, sector_basis};
    use crate::rng;
    use crate::statevector::expectation;
    use approx::assert_relative_eq;

    /// Brute-force e_k by explicit subset enumeration.
    fn esp_brute(x: &[f64], k: usize) -> f64 {
        let m = x.len();
        if k == 0 {
            return 1.0;
        }
        sector_basis(m, k)
            .iter()
            .map(|&mask| {
                (0..m)
                    .filter(|p| mask & (1 << p) != 0)
                    .map(|p| x[p])
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn esp_examples_and_brute_force() {
        assert_relative_eq!(esp(&[1.0, 1.0, 1.0], 2).unwrap(), 3.0);
        assert_relative_eq!(esp(&[0.3, 9.1], 0).unwrap(), 1.0);
        assert_relative_eq!(esp(&[0.25, 1.0, 4.0], 2).unwrap(), 5.25);
        assert!(esp(&[1.0], 2).is_err());

        let mut ctr = 0;
        for m in 1..=8usize {
            let x: Vec<f64> = (0..m)
                .map(|_| {
                    ctr += 1;
                    0.05 + 3.0 * rng::u01(77, ctr)
                })
                .collect();
            for k in 0..=m {
                let a = esp(&x, k).unwrap();
                let b = esp_brute(&x, k);
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn agp_norm_examples() {
        let g = GeminalState::new(vec![1.0, 1.0], 1).unwrap();
        assert_relative_eq!(agp_norm(&g).unwrap(), 2.0);
        let g = GeminalState::new(vec![1.0; 4], 2).unwrap();
        assert_relative_eq!(agp_norm(&g).unwrap(), 6.0);
        // Brute-force expansion over C(3,2) configurations: 5.25.
        let g = GeminalState::new(vec![0.5, 1.0, 2.0], 2).unwrap();
        let brute = esp_brute(&[0.25, 1.0, 4.0], 2);
        assert_relative_eq!(agp_norm(&g).unwrap(), brute, max_relative = 1e-14);
    }

    #[test]
    fn agp_norm_degenerate() {
        let g = GeminalState::new(vec![1.0, 0.0, 0.0], 2).unwrap();
        assert!(agp_norm(&g).is_err());
    }

    #[test]
    fn scale_geminals_examples() {
        let g = GeminalState::new(vec![1.0, 1.0], 1).unwrap();
        let s = scale_geminals(&g).unwrap();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(s.eta[0], inv_sqrt2, epsilon = 1e-14);
        assert_relative_eq!(agp_norm(&s).unwrap(), 1.0, epsilon = 1e-12);

        // Idempotence.
        let s2 = scale_geminals(&s).unwrap();
        for (a, b) in s.eta.iter().zip(&s2.eta) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }

        // Ratios preserved.
        let g = GeminalState::new(vec![0.5, 1.0, 2.0], 2).unwrap();
        let s = scale_geminals(&g).unwrap();
        assert_relative_eq!(s.eta[1] / s.eta[0], 2.0, epsilon = 1e-13);
        assert_relative_eq!(agp_norm(&s).unwrap(), 1.0, epsilon = 1e-12);
    }

    /// Brute-force expectation over the explicit AGP expansion.
    fn brute_rdm1(g: &GeminalState, p: usize) -> f64 {
        let sv = agp_statevector(g);
        let norm: f64 = sv.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let occ: f64 = sv
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & (1 << (p - 1)) != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        occ / norm
    }

    #[test]
    fn rdm1_examples_and_brute_force() {
        let g = GeminalState::new(vec![0.7; 4], 2).unwrap();
        for p in 1..=4 {
            assert_relative_eq!(agp_rdm1(&g, p).unwrap(), 0.5, epsilon = 1e-12);
        }
        let g = GeminalState::new(vec![0.3, 1.2, 0.9], 3).unwrap();
        for p in 1..=3 {
            assert_relative_eq!(agp_rdm1(&g, p).unwrap(), 1.0, epsilon = 1e-12);
        }
        let g = GeminalState::new(vec![0.5, 1.0, 2.0], 2).unwrap();
        for p in 1..=3 {
            assert_relative_eq!(
                agp_rdm1(&g, p).unwrap(),
                brute_rdm1(&g, p),
                epsilon = 1e-12
            );
        }
        assert!(agp_rdm1(&g, 4).is_err());
    }

    #[test]
    fn rdm1_sum_rule_random() {
        let mut ctr = 1000;
        for m in 2..=8usize {
            for n in 1..=m {
                let eta: Vec<f64> = (0..m)
                    .map(|_| {
                        ctr += 1;
                        0.1 + 2.0 * rng::u01(5, ctr)
                    })
                    .collect();
                let g = GeminalState::new(eta, n).unwrap();
                let total: f64 = (1..=m).map(|p| agp_rdm1(&g, p).unwrap()).sum();
                assert_relative_eq!(total, n as f64, epsilon = 1e-12);
                for p in 1..=m {
                    let r = agp_rdm1(&g, p).unwrap();
                    assert!((0.0..=1.0 + 1e-12).contains(&r));
                }
            }
        }
    }

    fn brute_transfer(g: &GeminalState, p: usize, q: usize) -> f64 {
        // <AGP| P+_p P_q |AGP>: move a pair from q to p.
        let sv = agp_statevector(g);
        let norm: f64 = sv.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let mut acc = 0.0;
        let (pb, qb) = (1usize << (p - 1), 1usize << (q - 1));
        for (i, a) in sv.amplitudes.iter().enumerate() {
            if i & qb != 0 && i & pb == 0 {
                let j = (i & !qb) | pb;
                acc += (sv.amplitudes[j].conj() * a).re;
            }
        }
        acc / norm
    }

    #[test]
    fn pair_transfer_examples_and_brute_force() {
        let g = GeminalState::new(vec![0.8, 0.8], 1).unwrap();
        assert_relative_eq!(agp_pair_transfer(&g, 1, 2).unwrap(), 0.5, epsilon = 1e-12);

        let g = GeminalState::new(vec![0.9, 0.0, 1.3], 1).unwrap();
        assert_relative_eq!(agp_pair_transfer(&g, 1, 2).unwrap(), 0.0, epsilon = 1e-14);

        let g = GeminalState::new(vec![0.5, 1.0, 2.0], 2).unwrap();
        for (p, q) in [(1, 3), (3, 1), (2, 3), (1, 2)] {
            assert_relative_eq!(
                agp_pair_transfer(&g, p, q).unwrap(),
                brute_transfer(&g, p, q),
                epsilon = 1e-12
            );
        }
        // Symmetric in (p,q) for real eta.
        assert_relative_eq!(
            agp_pair_transfer(&g, 1, 3).unwrap(),
            agp_pair_transfer(&g, 3, 1).unwrap(),
            epsilon = 1e-14
        );
        assert!(agp_pair_transfer(&g, 1, 1).is_err());
    }

    fn statevector_energy(g: &GeminalState, model: &PairingModel) -> f64 {
        let mut sv = agp_statevector(g);
        sv.normalize();
        let h = hamiltonian_pauli(model);
        expectation(&sv, &h).unwrap().re
    }

    #[test]
    fn agp_energy_matches_statevector() {
        let model = PairingModel::new(4, 2, 1.0, 1.0).unwrap();
        let g = GeminalState::new(vec![2.0, 1.5, 1.0, 0.5], 2).unwrap();
        assert_relative_eq!(
            agp_energy(&g, &model).unwrap(),
            statevector_energy(&g, &model),
            epsilon = 1e-10
        );

        // All M <= 8 with random eta (signs included).
        let mut ctr = 9000;
        for m in 2..=8usize {
            let n = m / 2 + 1;
            let eta: Vec<f64> = (0..m)
                .map(|_| {
                    ctr += 1;
                    rng::u01(13, ctr) * 2.0 - 1.0 + 0.1
                })
                .collect();
            let g = GeminalState::new(eta, n).unwrap();
            let model = PairingModel::new(m, n, 1.0, -0.4).unwrap();
            assert_relative_eq!(
                agp_energy(&g, &model).unwrap(),
                statevector_energy(&g, &model),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn agp_energy_limits() {
        // HF limit: eta concentrated on the lowest N levels, G = 0.
        let model = PairingModel::new(5, 2, 1.0, 0.0).unwrap();
        let g = GeminalState::new(vec![1.0, 1.0, 1e-9, 1e-9, 1e-9], 2).unwrap();
        assert_relative_eq!(agp_energy(&g, &model).unwrap(), 6.0, epsilon = 1e-6);

        // M = N: unique configuration, energy independent of eta.
        let model = PairingModel::new(2, 2, 1.0, 0.8).unwrap();
        for eta in [vec![0.5, 3.0], vec![1.0, 1.0]] {
            let g = GeminalState::new(eta, 2).unwrap();
            assert_relative_eq!(
                agp_energy(&g, &model).unwrap(),
                2.0 * (1.0 + 2.0) - 2.0 * 0.8,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn scale_leaves_energy_invariant() {
        let model = PairingModel::new(6, 3, 1.0, 0.7).unwrap();
        let g = GeminalState::new(vec![3.0, 2.0, 1.5, 1.0, 0.6, 0.3], 3).unwrap();
        let s = scale_geminals(&g).unwrap();
        assert_relative_eq!(
            agp_energy(&g, &model).unwrap(),
            agp_energy(&s, &model).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn hf_energy_examples() {
        let model = PairingModel::new(4, 2, 1.0, 0.0).unwrap();
        assert_relative_eq!(hf_energy(&model), 6.0);
        let model = PairingModel::new(4, 2, 1.0, 1.0).unwrap();
        assert_relative_eq!(hf_energy(&model), 4.0);
        // Brute-force diagonal scan at M = 12, N = 6, G = 0.5.
        let model = PairingModel::new(12, 6, 1.0, 0.5).unwrap();
        let min_diag = sector_basis(12, 6)
            .iter()
            .map(|&mask| crate::pair_model::sector_diagonal(&model, mask))
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(hf_energy(&model), 39.0);
        assert_relative_eq!(hf_energy(&model), min_diag, epsilon = 1e-12);
    }

    #[test]
    fn meanfield_number_and_gap() {
        let model = PairingModel::new(6, 3, 1.0, 0.0).unwrap();
        let gc = find_critical_g(&model).unwrap();

        // Subcritical: normal solution.
        let sub = solve_bcs_meanfield(&model.with_g(0.9 * gc)).unwrap();
        assert_eq!(sub.gap, 0.0);

        // Supercritical: Delta > 0 and the number equation holds tightly.
        let sol = solve_bcs_meanfield(&model.with_g(2.0 * gc)).unwrap();
        assert!(sol.gap > 0.0);
        let num: f64 = sol.v.iter().map(|v| v * v).sum();
        assert_relative_eq!(num, 3.0, epsilon = 1e-10);

        // Dominant G: occupations approach N/M.
        let big = solve_bcs_meanfield(&model.with_g(500.0)).unwrap();
        for v in &big.v {
            assert_relative_eq!(v * v, 0.5, epsilon = 1e-2);
        }
    }

    #[test]
    fn critical_g_scaling_and_onset() {
        let model = PairingModel::new(6, 3, 1.0, 0.0).unwrap();
        let gc = find_critical_g(&model).unwrap();
        assert!(gc > 0.0);

        let doubled = PairingModel::new(6, 3, 2.0, 0.0).unwrap();
        let gc2 = find_critical_g(&doubled).unwrap();
        assert_relative_eq!(gc2, 2.0 * gc, max_relative = 1e-8);

        // Onset consistency with the mean-field solver.
        let below = solve_bcs_meanfield(&model.with_g(0.98 * gc)).unwrap();
        assert_eq!(below.gap, 0.0);
        let above = solve_bcs_meanfield(&model.with_g(1.02 * gc)).unwrap();
        assert!(above.gap > 0.0);
    }

    fn ed_2x2(model: &PairingModel) -> f64 {
        // Closed-form ground energy of the M=2, N=1 sector.
        let a = 2.0 * model.eps(1) - model.g;
        let d = 2.0 * model.eps(2) - model.g;
        let b = -model.g;
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt()
    }

    #[test]
    fn optimize_noninteracting_reaches_hf() {
        let model = PairingModel::new(5, 2, 1.0, 0.0).unwrap();
        let init = init_geminals(&model);
        let opt = optimize_geminals(&model, &init).unwrap();
        let e = agp_energy(&opt, &model).unwrap();
        assert!((e - hf_energy(&model)).abs() < 1e-8, "E = {e}");
        // Normalized output.
        assert_relative_eq!(agp_norm(&opt).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn optimize_two_level_exact_any_g() {
        for g in [-2.0, -0.5, 0.3, 1.0, 4.0] {
            let model = PairingModel::new(2, 1, 1.0, g).unwrap();
            let init = init_geminals(&model);
            let opt = optimize_geminals(&model, &init).unwrap();
            let e = agp_energy(&opt, &model).unwrap();
            assert!(
                (e - ed_2x2(&model)).abs() < 1e-8,
                "G = {g}: E = {e}, ED = {}",
                ed_2x2(&model)
            );
        }
    }

    #[test]
    fn optimize_full_and_empty_shells_return_immediately() {
        let model = PairingModel::new(3, 3, 1.0, 0.4).unwrap();
        let init = init_geminals(&model);
        let opt = optimize_geminals(&model, &init).unwrap();
        assert_eq!(opt.n, 3);

        let model = PairingModel::new(3, 0, 1.0, 0.4).unwrap();
        let init = init_geminals(&model);
        assert!(optimize_geminals(&model, &init).is_ok());
    }
}
