#pragma once

#include <limits>
#include <optional>
#include <ostream>

#include "blockspace.hpp"
#include "schedule.hpp"

namespace flexbc {

/// Step-size rule. nonconvex: tau = safety / beta_f^n (< 1/beta_f^n);
/// convex_g: tau = 2 safety / beta_f^n (< 2/beta_f^n). fixed_tau overrides
/// both and is still checked against the bound unless acknowledged.
struct StepPolicy {
    enum class Mode { nonconvex, convex_g };
    Mode mode = Mode::nonconvex;
    double safety = 0.99;
    std::optional<double> fixed_tau;
    bool acknowledge_bound_violation = false;
};

struct IterRecord {
    Index n = 0;
    Index k = 0;
    ActivationMask mask;
    double tau = 0.0;
    double psi = 0.0;      // Psi(x^n) before the step
    double step_sq = 0.0;  // sum_l |x_l^n - x_l^{n+1}|^2
    double cost = 0.0;     // cumulative block-gradient units
};

struct CycleRecord {
    Index k = 0;
    double psi = 0.0;          // Psi(xbar^{k+1})
    double bound_sum = 0.0;    // sum of weighted squared displacements
    double slack = 0.0;        // Psi(xbar^k) - Psi(xbar^{k+1}) - bound_sum
    double residual = std::numeric_limits<double>::quiet_NaN();
    double displacement = 0.0; // |||xbar^k - xbar^{k+1}|||
    double cost = 0.0;         // cumulative block-gradient units at cycle end
};

struct SolverTrace {
    Index cycle_length = 1;
    bool certified = true;
    double psi0 = 0.0; // Psi(x^0) = Psi(xbar^0)
    std::vector<IterRecord> iters;
    std::vector<CycleRecord> cycles;

    void write_csv(std::ostream& os) const;
};

struct SolverConfig {
    Index max_cycles = 100;
    double tol_displacement = 1e-9;
    bool record_residual = false;
    bool record_iter_psi = true;
    /// Flag decrease violations beyond the relative slack as warnings on
    /// stderr (tests turn them into hard failures).
    double decrease_slack_rel = 1e-12;
    /// Observer invoked with the state after each iteration.
    std::function<void(Index n, const BlockVector&)> iterate_callback;
};

/// Snapshot of a block's last within-cycle update, for the subgradient
/// residual.
struct LastUpdate {
    bool set = false;
    Index n = 0;
    double tau = 0.0;
    Vec grad;  // grad_l f(x^{k_l})
    Vec delta; // x_l^{k_l} - x_l^{k_l + 1}
};

/// One iteration: all active gradients evaluated at the incoming x, inactive
/// blocks returned bit-identical.
BlockVector bc_fb_iterate(const Problem& problem, const BlockVector& x,
                          const ActivationMask& mask, const std::vector<double>& taus);

struct RunResult {
    BlockVector x;
    SolverTrace trace;
};

RunResult run(const Problem& problem, const Schedule& schedule, const StepPolicy& policy,
              const SolverConfig& config, const BlockVector& x0);

/// Decrease slack of cycle k; >= -slack_rel (1 + |Psi(xbar^k)|) under a
/// certified schedule and in-bound steps.
double cycle_decrease_slack(const SolverTrace& trace, Index k);

/// |||Bbar^{k+1}|||, a certified element norm of the subdifferential at the
/// cycle iterate; requires the per-block caches and one extra full gradient.
double subgradient_residual(const Problem& problem, const BlockVector& x_cycle_end,
                            const std::vector<LastUpdate>& last_updates);

/// Step size for one iteration under the policy; throws BoundViolation if a
/// fixed override exceeds the bound without acknowledgment.
double step_size(const StepPolicy& policy, double beta_n);

} // namespace flexbc
