//! Evolution strategy with stochastic ranking (Runarsson–Yao style) on a box.

use rand::Rng;
use rand_distr::StandardNormal;

/// Tuning knobs. Defaults follow common ISRES settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EsSettings {
    pub lambda: usize,
    pub mu: usize,
    /// Probability of comparing by fitness when penalties differ.
    pub pf: f64,
    /// Differential step for the leading parents.
    pub gamma: f64,
    /// Step-size smoothing `s <- s_parent + alpha (s_new - s_parent)`; 1 disables it.
    pub alpha: f64,
    /// Generations without improvement before a restart.
    pub stall_generations: usize,
}

impl EsSettings {
    pub fn for_population(lambda: usize) -> Self {
        Self {
            lambda,
            mu: lambda.div_ceil(7),
            pf: 0.45,
            gamma: 0.85,
            alpha: 1.0,
            stall_generations: 150,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct EsResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evals: usize,
}

/// Bubble-sort stochastic ranking of indices by `(f, phi)`.
pub(crate) fn stochastic_rank<R: Rng + ?Sized>(f: &[f64], phi: &[f64], pf: f64, rng: &mut R) -> Vec<usize> {
    let n = f.len();
    let mut idx: Vec<usize> = (0..n).collect();
    for _ in 0..n {
        let mut swapped = false;
        for j in 0..n.saturating_sub(1) {
            let (a, b) = (idx[j], idx[j + 1]);
            let by_fitness = (phi[a] == 0.0 && phi[b] == 0.0) || rng.random::<f64>() < pf;
            let swap = if by_fitness { f[a] > f[b] } else { phi[a] > phi[b] };
            if swap {
                idx.swap(j, j + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    idx
}

/// Minimises `f` over `[lb, ub]^n` until `f <= target` or `max_evals` is spent.
///
/// The budget is shared by all restarts; a restart begins after
/// `stall_generations` generations without improvement. `anchor`, if given,
/// is placed in the very first population.
#[allow(clippy::too_many_arguments)]
pub(crate) fn minimize<R, F>(
    mut f: F,
    n: usize,
    lb: f64,
    ub: f64,
    settings: EsSettings,
    target: f64,
    max_evals: usize,
    restarts: usize,
    anchor: Option<&[f64]>,
    rng: &mut R,
) -> EsResult
where
    R: Rng + ?Sized,
    F: FnMut(&[f64]) -> f64,
{
    let EsSettings { lambda, mu, pf, gamma, alpha, stall_generations } = settings;
    let tau = 1.0 / (2.0 * (n as f64).sqrt()).sqrt();
    let tau_prime = 1.0 / (2.0 * n as f64).sqrt();
    let sigma0 = (ub - lb) / (n as f64).sqrt();

    let mut best = EsResult { best_x: vec![lb; n], best_f: f64::INFINITY, evals: 0 };
    let phi = vec![0.0; lambda];

    'runs: for run in 0..=restarts {
        if best.evals >= max_evals {
            break;
        }
        let mut pop: Vec<Vec<f64>> = (0..lambda)
            .map(|_| (0..n).map(|_| rng.random_range(lb..ub)).collect())
            .collect();
        if run == 0 {
            if let Some(a) = anchor {
                pop[0].copy_from_slice(a);
            }
        }
        let mut sig: Vec<Vec<f64>> = vec![vec![sigma0; n]; lambda];
        let mut fit = vec![0.0; lambda];
        let mut run_best = f64::INFINITY;
        let mut stall = 0;

        loop {
            for k in 0..lambda {
                if best.evals >= max_evals {
                    break 'runs;
                }
                fit[k] = f(&pop[k]);
                best.evals += 1;
                if fit[k] < best.best_f {
                    best.best_f = fit[k];
                    best.best_x.clone_from(&pop[k]);
                }
                if fit[k] <= target {
                    break 'runs;
                }
            }
            let gen_best = fit.iter().copied().fold(f64::INFINITY, f64::min);
            if run_best.is_infinite() || gen_best < run_best - 1e-12 * run_best.abs() {
                run_best = gen_best;
                stall = 0;
            } else {
                stall += 1;
                if stall >= stall_generations {
                    continue 'runs;
                }
            }

            let order = stochastic_rank(&fit, &phi, pf, rng);
            let parents: Vec<(Vec<f64>, Vec<f64>)> =
                order[..mu].iter().map(|&i| (pop[i].clone(), sig[i].clone())).collect();

            for k in 0..lambda {
                let (px, ps) = &parents[k % mu];
                if k + 1 < mu {
                    // Differential variation towards the best parent.
                    let (best_x, next) = (&parents[0].0, &parents[k + 1].0);
                    for j in 0..n {
                        let v = px[j] + gamma * (best_x[j] - next[j]);
                        pop[k][j] = if (lb..=ub).contains(&v) { v } else { px[j] };
                        sig[k][j] = ps[j];
                    }
                    continue;
                }
                let global: f64 = rng.sample::<f64, _>(StandardNormal) * tau_prime;
                for j in 0..n {
                    let local: f64 = rng.sample::<f64, _>(StandardNormal) * tau;
                    let s_new = (ps[j] * (global + local).exp()).min(sigma0);
                    // Out-of-box draws are retried; if all fail the parent
                    // coordinate and step are kept.
                    let (mut v, mut s) = (px[j], ps[j]);
                    for _ in 0..10 {
                        let trial = px[j] + s_new * rng.sample::<f64, _>(StandardNormal);
                        if (lb..=ub).contains(&trial) {
                            (v, s) = (trial, s_new);
                            break;
                        }
                    }
                    pop[k][j] = v;
                    sig[k][j] = ps[j] + alpha * (s - ps[j]);
                }
            }
        }
    }
    best
}
