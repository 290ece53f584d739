//! Energy minimization under a delivered-data floor and a per-segment power
//! budget, solved with a multiplier-penalty (augmented Lagrangian) method.
//!
//! The outer loop keeps a multiplier vector `lambda` (one entry for the data
//! constraint, one per segment budget) and a penalty factor `sigma`. Each
//! cycle minimizes
//!
//! ```text
//! phi(P) = E(P) - lambda' h(P) + sigma h(P)' h(P)
//! ```
//!
//! by projected gradient descent, then either corrects the multipliers
//! (`lambda <- lambda - 2 sigma h`) or grows the penalty, depending on how
//! much the residual norm shrank.
//!
//! Everything inside the solver is normalized: powers by `P_T`, energy by
//! `P_T * t_total`, and data by the data floor, so the residual components
//! are dimensionless and comparable in the max norm.
//!
//! Budget rows can be posed as equalities (every segment spends exactly
//! `P_T`) or as inequalities. In the inequality form the slack variable is
//! eliminated in closed form, giving the residual `max(g_j, lambda_j / 2 sigma)`
//! and multipliers that stay nonpositive; the update rules are unchanged.

use crate::allocators::average_alloc;
use crate::error::{Error, Result};
use crate::metrics::{total_energy, AllocationMatrix, ChannelGrid, Quadrature};
use crate::scenario::{DataFloor, ScenarioConfig, SegmentSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    /// `sum_i P_ij <= P_T`.
    Inequality,
    /// `sum_i P_ij = P_T` for every segment.
    Equality,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Start each step at `initial` and halve until `phi` decreases
    /// sufficiently.
    Backtracking { initial: f64 },
    /// Fixed step, no safeguard.
    Fixed(f64),
    /// Backtracking that starts from the Barzilai-Borwein step
    /// `s's / s'y` of the previous iteration instead of a constant.
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub step: StepRule,
    /// Tolerance on the inner gradient and on the normalized residuals.
    pub tolerance: f64,
    pub max_cycles: usize,
    pub max_inner_iterations: usize,
    pub budget_mode: BudgetMode,
    pub quadrature: Quadrature,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            initial_penalty: 1.0,
            penalty_growth: 4.0,
            step: StepRule::Backtracking { initial: 1.0 },
            tolerance: 1e-4,
            max_cycles: 100,
            max_inner_iterations: 5000,
            budget_mode: BudgetMode::Inequality,
            quadrature: Quadrature::default(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_penalty > 0.0) {
            return Err(Error::Domain(format!("initial penalty {}", self.initial_penalty)));
        }
        if !(self.penalty_growth > 1.0) {
            return Err(Error::Domain(format!("penalty growth {}", self.penalty_growth)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain(format!("tolerance {}", self.tolerance)));
        }
        let step = match self.step {
            StepRule::Backtracking { initial } => initial,
            StepRule::Fixed(a) => a,
            StepRule::Spectral => 1.0,
        };
        if !(step > 0.0) {
            return Err(Error::Domain(format!("step size {step}")));
        }
        Ok(())
    }
}

/// Multipliers and penalty of the current outer cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierState {
    /// `lambda[0]` pairs with the data constraint, `lambda[1 + j]` with the
    /// budget of segment `j`.
    pub lambda: Vec<f64>,
    pub sigma: f64,
    /// Penalty of the previous cycle; `None` before the first update.
    pub previous_sigma: Option<f64>,
}

impl MultiplierState {
    pub fn new(segments: usize, sigma: f64) -> Self {
        MultiplierState {
            lambda: vec![0.0; segments + 1],
            sigma,
            previous_sigma: None,
        }
    }

    fn sigma_grew(&self) -> bool {
        self.previous_sigma.is_some_and(|s| self.sigma > s)
    }
}

/// Normalized constraint residuals: `h[0] = (D - D_min) / D_scale`,
/// `h[1 + j] = (sum_i P_ij - P_T) / P_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintResiduals {
    pub h: Vec<f64>,
}

impl ConstraintResiduals {
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.h)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Resolves the data floor policy of `cfg`.
pub fn data_floor(cfg: &ScenarioConfig, sched: &SegmentSchedule, quad: &Quadrature) -> Result<f64> {
    match cfg.data_floor {
        DataFloor::Explicit(bits) => {
            if !(bits >= 0.0 && bits.is_finite()) {
                return Err(Error::Domain(format!("data floor {bits}")));
            }
            Ok(bits)
        }
        DataFloor::FractionOfAverage(rho) => {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(Error::Domain(format!("data floor fraction {rho}")));
            }
            let grid = ChannelGrid::new(cfg, sched, quad)?;
            Ok(rho * grid.total_data(&average_alloc(cfg))?)
        }
    }
}

/// Which branch of the outer update was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateCase {
    /// Residuals within tolerance.
    Terminate,
    /// Residual did not shrink: grow the penalty.
    PenaltyOnNoProgress,
    /// Penalty grew last cycle, or residual shrank by 4x: correct multipliers.
    MultiplierCorrection,
    /// Residual shrank but too slowly: grow the penalty.
    PenaltyOnSlowProgress,
    /// Residuals within tolerance but the inner loop stopped at its cap:
    /// keep the state and resume the descent.
    ResumeInner,
}

/// Applies one outer update. `previous_norm` is `None` on the first cycle,
/// which then counts as making unlimited progress.
pub fn update_state(
    state: &mut MultiplierState,
    h_now: &ConstraintResiduals,
    previous_norm: Option<f64>,
    growth: f64,
    tolerance: f64,
) -> UpdateCase {
    let now = h_now.max_norm();
    if now <= tolerance {
        return UpdateCase::Terminate;
    }
    let sigma = state.sigma;
    let case = match previous_norm {
        Some(prev) if now >= prev => UpdateCase::PenaltyOnNoProgress,
        Some(prev) if state.sigma_grew() || now <= 0.25 * prev => UpdateCase::MultiplierCorrection,
        None => UpdateCase::MultiplierCorrection,
        Some(_) => UpdateCase::PenaltyOnSlowProgress,
    };
    match case {
        UpdateCase::MultiplierCorrection => {
            for (l, h) in state.lambda.iter_mut().zip(&h_now.h) {
                *l -= 2.0 * sigma * h;
            }
            state.previous_sigma = Some(sigma);
        }
        _ => {
            state.previous_sigma = Some(sigma);
            state.sigma = growth * sigma;
        }
    }
    case
}

/// One inner minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub allocation: AllocationMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub phi_start: f64,
    pub phi_end: f64,
    /// Steps that increased `phi` (only possible with a fixed step).
    pub monotonicity_violations: usize,
}

/// Per-cycle solver trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    pub residual_norm: f64,
    pub sigma: f64,
    /// Multipliers the inner loop ran with.
    pub lambda: Vec<f64>,
    pub phi: f64,
    pub energy: f64,
    pub inner_iterations: usize,
    pub inner_converged: bool,
    pub case: UpdateCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub allocation: AllocationMatrix,
    /// First-order multiplier estimate `lambda - 2 sigma h` at the returned
    /// point, in normalized units.
    pub multipliers: Vec<f64>,
    pub converged: bool,
    pub cycles: usize,
    pub final_residual: f64,
    pub data_floor: f64,
    pub energy: f64,
    pub data: f64,
    pub kkt: KktReport,
    pub monotonicity_violations: usize,
    pub trace: Vec<CycleRecord>,
}

/// Breakdown of the first-order optimality residual.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktReport {
    pub stationarity: f64,
    pub complementarity: f64,
    pub primal: f64,
    pub dual_sign: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.complementarity)
            .max(self.primal)
            .max(self.dual_sign)
    }
}

/// Normalized problem data shared by every solver routine.
#[derive(Debug, Clone)]
pub struct Problem {
    cfg: ScenarioConfig,
    sched: SegmentSchedule,
    grid: ChannelGrid,
    mode: BudgetMode,
    data_floor: f64,
    data_scale: f64,
    /// `(relay, segment)` of every optimization variable.
    vars: Vec<(usize, usize)>,
    /// `T_j / t_total` per variable.
    energy_weight: Vec<f64>,
}

struct Evaluation {
    energy: f64,
    data_residual: f64,
    column_residuals: Vec<f64>,
}

impl Problem {
    pub fn new(
        cfg: &ScenarioConfig,
        sched: &SegmentSchedule,
        data_floor: f64,
        mode: BudgetMode,
        quad: &Quadrature,
    ) -> Result<Self> {
        cfg.validate()?;
        let grid = ChannelGrid::new(cfg, sched, quad)?;
        Self::with_grid(cfg, sched, grid, data_floor, mode)
    }

    /// Problem over a prebuilt channel grid, e.g. one carrying a fading
    /// realization.
    pub fn with_grid(
        cfg: &ScenarioConfig,
        sched: &SegmentSchedule,
        grid: ChannelGrid,
        data_floor: f64,
        mode: BudgetMode,
    ) -> Result<Self> {
        cfg.validate()?;
        if !(data_floor >= 0.0 && data_floor.is_finite()) {
            return Err(Error::Domain(format!("data floor {data_floor}")));
        }
        let full_budget = grid.total_data(&average_alloc(cfg))?;
        if data_floor > full_budget * (1.0 + 1e-12) {
            return Err(Error::Infeasible {
                d_min: data_floor,
                d_max: full_budget,
            });
        }
        let data_scale = if data_floor > 0.0 {
            data_floor
        } else {
            full_budget
        };
        let vars: Vec<_> = AllocationMatrix::zeros(cfg).active_entries().collect();
        let total = sched.total_time();
        let energy_weight = vars
            .iter()
            .map(|&(_, j)| sched.durations()[j] / total)
            .collect();
        Ok(Problem {
            cfg: cfg.clone(),
            sched: sched.clone(),
            grid,
            mode,
            data_floor,
            data_scale,
            vars,
            energy_weight,
        })
    }

    /// Builds the problem with the data floor from the scenario's policy.
    pub fn from_config(cfg: &ScenarioConfig, opts: &SolverOptions) -> Result<Self> {
        let sched = crate::scenario::segment_boundaries(cfg)?;
        let floor = data_floor(cfg, &sched, &opts.quadrature)?;
        Self::new(cfg, &sched, floor, opts.budget_mode, &opts.quadrature)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn schedule(&self) -> &SegmentSchedule {
        &self.sched
    }

    pub fn grid(&self) -> &ChannelGrid {
        &self.grid
    }

    pub fn data_floor(&self) -> f64 {
        self.data_floor
    }

    pub fn mode(&self) -> BudgetMode {
        self.mode
    }

    /// Energy normalizer `P_T * t_total` (J).
    pub fn energy_scale(&self) -> f64 {
        self.cfg.power_budget * self.sched.total_time()
    }

    pub fn dimension(&self) -> usize {
        self.vars.len()
    }

    fn segments(&self) -> usize {
        self.sched.segments()
    }

    fn to_vars(&self, p: &AllocationMatrix) -> Result<Vec<f64>> {
        p.check_shape(&self.cfg)?;
        Ok(self
            .vars
            .iter()
            .map(|&(i, j)| p.get(i, j) / self.cfg.power_budget)
            .collect())
    }

    fn to_matrix(&self, x: &[f64]) -> AllocationMatrix {
        let mut p = AllocationMatrix::zeros(&self.cfg);
        for (&(i, j), v) in self.vars.iter().zip(x) {
            p.set(i, j, v * self.cfg.power_budget);
        }
        p
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let pt = self.cfg.power_budget;
        let mut energy = 0.0;
        let mut data = 0.0;
        let mut columns = vec![0.0; self.segments()];
        for ((&(i, j), v), w) in self.vars.iter().zip(x).zip(&self.energy_weight) {
            energy += w * v;
            data += self.grid.entry_data(i, j, v * pt);
            columns[j] += v;
        }
        Evaluation {
            energy,
            data_residual: (data - self.data_floor) / self.data_scale,
            column_residuals: columns.into_iter().map(|c| c - 1.0).collect(),
        }
    }

    /// Residual vector with inequality rows replaced by their slack-eliminated
    /// form for the given multipliers.
    fn effective_residuals(&self, ev: &Evaluation, state: &MultiplierState) -> Vec<f64> {
        let mut h = Vec::with_capacity(1 + ev.column_residuals.len());
        h.push(ev.data_residual);
        for (j, &g) in ev.column_residuals.iter().enumerate() {
            h.push(match self.mode {
                BudgetMode::Equality => g,
                BudgetMode::Inequality if state.sigma > 0.0 => {
                    g.max(state.lambda[1 + j] / (2.0 * state.sigma))
                }
                BudgetMode::Inequality => g,
            });
        }
        h
    }

    fn phi(&self, x: &[f64], state: &MultiplierState) -> f64 {
        let ev = self.evaluate(x);
        let h = self.effective_residuals(&ev, state);
        let linear: f64 = state.lambda.iter().zip(&h).map(|(l, h)| l * h).sum();
        let quadratic: f64 = h.iter().map(|h| h * h).sum();
        ev.energy - linear + state.sigma * quadratic
    }

    /// `lambda - 2 sigma h_eff`: the coefficient of each constraint gradient
    /// in `grad phi`.
    fn shifted_multipliers(&self, x: &[f64], state: &MultiplierState) -> Vec<f64> {
        let ev = self.evaluate(x);
        let h = self.effective_residuals(&ev, state);
        state
            .lambda
            .iter()
            .zip(&h)
            .map(|(l, h)| l - 2.0 * state.sigma * h)
            .collect()
    }

    /// Gradient of the normalized Lagrangian `e - mu' h` with respect to the
    /// normalized variables.
    fn lagrangian_gradient(&self, x: &[f64], mu: &[f64]) -> Vec<f64> {
        let pt = self.cfg.power_budget;
        self.vars
            .iter()
            .zip(x)
            .zip(&self.energy_weight)
            .map(|((&(i, j), v), w)| {
                let dh0 = self.grid.entry_derivative(i, j, v * pt) * pt / self.data_scale;
                w - mu[0] * dh0 - mu[1 + j]
            })
            .collect()
    }

    fn phi_gradient(&self, x: &[f64], state: &MultiplierState) -> Vec<f64> {
        let mu = self.shifted_multipliers(x, state);
        self.lagrangian_gradient(x, &mu)
    }

    pub fn constraint_residuals(&self, p: &AllocationMatrix) -> Result<ConstraintResiduals> {
        let ev = self.evaluate(&self.to_vars(p)?);
        let mut h = vec![ev.data_residual];
        h.extend(ev.column_residuals);
        Ok(ConstraintResiduals { h })
    }

    /// Residuals the outer loop tests for termination.
    pub fn effective_constraint_residuals(
        &self,
        p: &AllocationMatrix,
        state: &MultiplierState,
    ) -> Result<ConstraintResiduals> {
        let ev = self.evaluate(&self.to_vars(p)?);
        Ok(ConstraintResiduals {
            h: self.effective_residuals(&ev, state),
        })
    }

    /// Normalized augmented Lagrangian `phi(P, lambda, sigma)`.
    pub fn augmented_lagrangian(&self, p: &AllocationMatrix, state: &MultiplierState) -> Result<f64> {
        Ok(self.phi(&self.to_vars(p)?, state))
    }

    /// `d phi / d P_ij` in physical units (per watt); inactive entries are 0.
    pub fn grad_augmented_lagrangian(
        &self,
        p: &AllocationMatrix,
        state: &MultiplierState,
    ) -> Result<AllocationMatrix> {
        let x = self.to_vars(p)?;
        let g = self.phi_gradient(&x, state);
        let mut out = AllocationMatrix::zeros(&self.cfg);
        for (&(i, j), v) in self.vars.iter().zip(g) {
            out.set(i, j, v / self.cfg.power_budget);
        }
        Ok(out)
    }

    /// Physical energy of an allocation (J).
    pub fn energy(&self, p: &AllocationMatrix) -> Result<f64> {
        total_energy(p, &self.sched)
    }

    pub fn data(&self, p: &AllocationMatrix) -> Result<f64> {
        self.grid.total_data(p)
    }

    /// Projected gradient descent on `phi` for fixed multipliers.
    pub fn inner_descent(
        &self,
        start: &AllocationMatrix,
        state: &MultiplierState,
        opts: &SolverOptions,
    ) -> Result<InnerResult> {
        let mut x = self.to_vars(start)?;
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut phi = self.phi(&x, state);
        let phi_start = phi;
        let mut iterations = 0;
        let mut converged = false;
        let mut violations = 0;
        let mut trial = vec![0.0; x.len()];
        let mut last: Option<(Vec<f64>, Vec<f64>)> = None;

        while iterations < opts.max_inner_iterations {
            let grad = self.phi_gradient(&x, state);
            let dir: Vec<f64> = grad
                .iter()
                .zip(&x)
                .map(|(g, v)| if *v <= 0.0 && *g > 0.0 { 0.0 } else { -g })
                .collect();
            if max_abs(&dir) <= opts.tolerance {
                converged = true;
                break;
            }
            match opts.step {
                StepRule::Fixed(alpha) => {
                    for ((t, v), d) in trial.iter_mut().zip(&x).zip(&dir) {
                        *t = (v + alpha * d).max(0.0);
                    }
                    let next = self.phi(&trial, state);
                    if next > phi {
                        violations += 1;
                    }
                    std::mem::swap(&mut x, &mut trial);
                    phi = next;
                }
                StepRule::Backtracking { .. } | StepRule::Spectral => {
                    let mut alpha = match (opts.step, &last) {
                        (StepRule::Backtracking { initial }, _) => initial,
                        (_, Some((px, pg))) => {
                            let (mut ss, mut sy) = (0.0, 0.0);
                            for k in 0..x.len() {
                                let sk = x[k] - px[k];
                                ss += sk * sk;
                                sy += sk * (grad[k] - pg[k]);
                            }
                            if sy > 0.0 {
                                (ss / sy).clamp(1e-12, 1e12)
                            } else {
                                1.0
                            }
                        }
                        _ => 1.0,
                    };
                    let (prev_x, prev_grad) = (x.clone(), grad.clone());
                    let mut accepted = false;
                    for _ in 0..60 {
                        for ((t, v), d) in trial.iter_mut().zip(&x).zip(&dir) {
                            *t = (v + alpha * d).max(0.0);
                        }
                        let next = self.phi(&trial, state);
                        // Armijo condition along the projected arc
                        let decrease: f64 = grad
                            .iter()
                            .zip(&x)
                            .zip(&trial)
                            .map(|((g, v), t)| g * (v - t))
                            .sum();
                        if next <= phi - 1e-4 * decrease && next < phi {
                            std::mem::swap(&mut x, &mut trial);
                            phi = next;
                            accepted = true;
                            last = Some((prev_x, prev_grad));
                            break;
                        }
                        alpha *= 0.5;
                    }
                    if !accepted {
                        // no representable decrease left along -grad
                        iterations += 1;
                        break;
                    }
                }
            }
            iterations += 1;
        }

        Ok(InnerResult {
            allocation: self.to_matrix(&x),
            iterations,
            converged,
            phi_start,
            phi_end: phi,
            monotonicity_violations: violations,
        })
    }

    /// First-order optimality residual of the inequality-constrained problem
    /// (data `D >= D_min`, budgets `sum_i P_ij <= P_T`, `P >= 0`), or of the
    /// all-equality problem when the mode is [`BudgetMode::Equality`].
    ///
    /// `multipliers` follow the solver's sign convention (`e - mu' h`), so
    /// a binding data floor has `mu[0] >= 0` and a binding budget has
    /// `mu[1 + j] <= 0`.
    pub fn kkt_residual(&self, p: &AllocationMatrix, multipliers: &[f64]) -> Result<KktReport> {
        let x = self.to_vars(p)?;
        let ev = self.evaluate(&x);
        let grad = self.lagrangian_gradient(&x, multipliers);
        let stationarity = grad
            .iter()
            .zip(&x)
            .map(|(g, v)| if *v <= 0.0 { (-g).max(0.0) } else { g.abs() })
            .fold(0.0, f64::max);

        let mut report = KktReport {
            stationarity,
            ..Default::default()
        };
        match self.mode {
            BudgetMode::Equality => {
                report.primal = ev
                    .column_residuals
                    .iter()
                    .fold(ev.data_residual.abs(), |m, g| m.max(g.abs()));
            }
            BudgetMode::Inequality => {
                report.primal = ev
                    .column_residuals
                    .iter()
                    .fold((-ev.data_residual).max(0.0), |m, g| m.max(*g));
                report.complementarity = ev
                    .column_residuals
                    .iter()
                    .zip(&multipliers[1..])
                    .fold((multipliers[0] * ev.data_residual).abs(), |m, (g, l)| {
                        m.max((g * l).abs())
                    });
                report.dual_sign = multipliers[1..]
                    .iter()
                    .fold((-multipliers[0]).max(0.0), |m, l| m.max(*l));
            }
        }
        Ok(report)
    }

    /// Runs the full multiplier-penalty iteration from `init`.
    pub fn solve(&self, init: &AllocationMatrix, opts: &SolverOptions) -> Result<Solution> {
        opts.validate()?;
        let mut state = MultiplierState::new(self.segments(), opts.initial_penalty);
        let mut current = init.clone();
        current.check_shape(&self.cfg)?;
        let mut previous_norm = None;
        let mut trace = Vec::new();
        let mut violations = 0;
        let mut converged = false;
        let mut best: Option<(f64, AllocationMatrix, Vec<f64>)> = None;

        for cycle in 0..=opts.max_cycles {
            let inner = self.inner_descent(&current, &state, opts)?;
            violations += inner.monotonicity_violations;
            current = inner.allocation;
            let x = self.to_vars(&current)?;
            let residuals = ConstraintResiduals {
                h: self.effective_residuals(&self.evaluate(&x), &state),
            };
            let norm = residuals.max_norm();
            let estimate = self.shifted_multipliers(&x, &state);
            if best.as_ref().is_none_or(|(b, _, _)| norm < *b) {
                best = Some((norm, current.clone(), estimate));
            }
            let sigma = state.sigma;
            let lambda = state.lambda.clone();
            let case = if norm <= opts.tolerance && !inner.converged {
                UpdateCase::ResumeInner
            } else {
                update_state(
                    &mut state,
                    &residuals,
                    previous_norm,
                    opts.penalty_growth,
                    opts.tolerance,
                )
            };
            trace.push(CycleRecord {
                cycle,
                residual_norm: norm,
                sigma,
                lambda,
                phi: inner.phi_end,
                energy: self.energy(&current)?,
                inner_iterations: inner.iterations,
                inner_converged: inner.converged,
                case,
            });
            if case == UpdateCase::Terminate {
                converged = true;
                break;
            }
            previous_norm = Some(norm);
        }

        let (final_residual, allocation, multipliers) = if converged {
            let x = self.to_vars(&current)?;
            let last = trace.last().map_or(f64::NAN, |r| r.residual_norm);
            // the terminating cycle applied no update, so the estimate is
            // formed from the state the inner loop ran with
            let mu = {
                let mut s = state.clone();
                if let Some(prev) = trace.last() {
                    s.sigma = prev.sigma;
                }
                self.shifted_multipliers(&x, &s)
            };
            (last, current, mu)
        } else {
            best.expect("at least one cycle ran")
        };
        let allocation = self.clamp_to_budget(allocation);
        let kkt = self.kkt_residual(&allocation, &multipliers)?;
        Ok(Solution {
            energy: self.energy(&allocation)?,
            data: self.data(&allocation)?,
            allocation,
            multipliers,
            converged,
            cycles: trace.len(),
            final_residual,
            data_floor: self.data_floor,
            kkt,
            monotonicity_violations: violations,
            trace,
        })
    }

    /// Scales down any column that overshoots `P_T` within tolerance so the
    /// returned plan never exceeds the budget.
    fn clamp_to_budget(&self, mut p: AllocationMatrix) -> AllocationMatrix {
        let pt = self.cfg.power_budget;
        for j in 0..p.segments() {
            let s = p.column_sum(j);
            if s > pt {
                for i in 0..p.relays() {
                    p.set(i, j, p.get(i, j) * pt / s);
                }
            }
        }
        p
    }
}

/// Solves the scenario from the average allocation with the scenario's data
/// floor policy.
pub fn solve(cfg: &ScenarioConfig, opts: &SolverOptions) -> Result<Solution> {
    let problem = Problem::from_config(cfg, opts)?;
    problem.solve(&average_alloc(cfg), opts)
}
