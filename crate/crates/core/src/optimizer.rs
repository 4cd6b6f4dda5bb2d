//! Derivative-free minimization.

/// Outcome of one minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best value seen after each iteration.
    pub best_history: Vec<f64>,
}

pub trait Minimizer {
    fn minimize(&self, objective: &mut dyn FnMut(&[f64]) -> f64, start: &[f64]) -> Minimum;
}

/// Downhill simplex (Nelder–Mead).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop once `f(worst) − f(best)` drops below this.
    pub spread_tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.25,
            spread_tolerance: 1e-8,
            max_evaluations: 2000,
        }
    }
}

impl Minimizer for NelderMead {
    fn minimize(&self, objective: &mut dyn FnMut(&[f64]) -> f64, start: &[f64]) -> Minimum {
        let dim = start.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64], evaluations: &mut usize| {
            *evaluations += 1;
            objective(x)
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let f0 = eval(start, &mut evaluations);
        simplex.push((start.to_vec(), f0));
        for k in 0..dim {
            let mut x = start.to_vec();
            x[k] += self.initial_step;
            let f = eval(&x, &mut evaluations);
            simplex.push((x, f));
        }

        let mut iterations = 0;
        let mut best_history = Vec::new();
        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[dim].1 - simplex[0].1 < self.spread_tolerance {
                converged = true;
                break;
            }
            if evaluations >= self.max_evaluations || dim == 0 {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / dim as f64;
                }
            }
            let along = |from: &[f64], coef: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, x)| c + coef * (x - c))
                    .collect()
            };

            let worst = simplex[dim].clone();
            let reflected = along(&worst.0, -self.reflection);
            let fr = eval(&reflected, &mut evaluations);

            if fr < simplex[0].1 {
                let expanded = along(&reflected, self.expansion);
                let fe = eval(&expanded, &mut evaluations);
                simplex[dim] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (reflected, fr);
            } else {
                let (contracted, fc, accept) = if fr < worst.1 {
                    let xc = along(&reflected, self.contraction);
                    let fc = eval(&xc, &mut evaluations);
                    (xc, fc, fc <= fr)
                } else {
                    let xc = along(&worst.0, self.contraction);
                    let fc = eval(&xc, &mut evaluations);
                    (xc, fc, fc < worst.1)
                };
                if accept {
                    simplex[dim] = (contracted, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = best
                            .iter()
                            .zip(&vertex.0)
                            .map(|(b, v)| b + self.shrink * (v - b))
                            .collect();
                        let f = eval(&x, &mut evaluations);
                        *vertex = (x, f);
                    }
                }
            }
            let best = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
            best_history.push(best);
        }

        let (point, value) = simplex.swap_remove(0);
        Minimum {
            point,
            value,
            evaluations,
            iterations,
            converged,
            best_history,
        }
    }
}
