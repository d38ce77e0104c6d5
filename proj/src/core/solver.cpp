#include "solver.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace flexbc {

namespace {

std::string mask_string(const ActivationMask& mask) {
    std::string s;
    s.reserve(mask.size());
    for (auto b : mask) s.push_back(b ? '1' : '0');
    return s;
}

std::vector<Vec> active_gradients(const Problem& problem, const BlockVector& x,
                                  const ActivationMask& mask) {
    if (problem.f.block_grad_multi) return problem.f.block_grad_multi(x, mask);
    std::vector<Vec> grads(mask.size());
    for (Index l = 0; l < x.blocks(); ++l)
        if (mask[static_cast<std::size_t>(l)]) grads[static_cast<std::size_t>(l)] = problem.f.block_grad(x, l);
    return grads;
}

} // namespace

double step_size(const StepPolicy& policy, double beta_n) {
    if (!(policy.safety > 0.0 && policy.safety < 1.0))
        throw ConfigError("StepPolicy: safety must lie in (0, 1)");
    const double factor = policy.mode == StepPolicy::Mode::convex_g ? 2.0 : 1.0;
    if (policy.fixed_tau) {
        const double tau = *policy.fixed_tau;
        if (!(tau > 0.0)) throw ConfigError("StepPolicy: fixed_tau must be positive");
        if (beta_n > 0.0 && tau >= factor / beta_n && !policy.acknowledge_bound_violation) {
            std::ostringstream msg;
            msg << "step size " << tau << " violates the bound " << factor / beta_n
                << " for the current mask";
            throw BoundViolation(msg.str());
        }
        return tau;
    }
    if (beta_n <= 0.0) throw ConfigError("step_size: beta must be positive without fixed_tau");
    return factor * policy.safety / beta_n;
}

BlockVector bc_fb_iterate(const Problem& problem, const BlockVector& x,
                          const ActivationMask& mask, const std::vector<double>& taus) {
    if (!(x.layout() == problem.layout)) throw DimensionError("bc_fb_iterate: layout mismatch");
    if (mask.size() != taus.size() || static_cast<Index>(mask.size()) != x.blocks())
        throw DimensionError("bc_fb_iterate: mask/taus length mismatch");

    const std::vector<Vec> grads = active_gradients(problem, x, mask);
    BlockVector next = x;
    for (Index l = 0; l < x.blocks(); ++l) {
        const auto sl = static_cast<std::size_t>(l);
        if (!mask[sl]) continue;
        const double tau = taus[sl];
        if (!(tau > 0.0)) throw ConfigError("bc_fb_iterate: tau must be positive");
        const Vec forward = x.block(l) - tau * grads[sl];
        next.block(l) = problem.regs[sl].prox(forward, tau * problem.weights[l]);
    }
    return next;
}

RunResult run(const Problem& problem, const Schedule& schedule, const StepPolicy& policy,
              const SolverConfig& config, const BlockVector& x0) {
    problem.check();
    if (!(x0.layout() == problem.layout)) throw DimensionError("run: x0 layout mismatch");
    if (schedule.blocks() != problem.layout.blocks())
        throw DimensionError("run: schedule block count mismatch");
    if (config.max_cycles < 1) throw ConfigError("run: max_cycles must be >= 1");

    const Index blocks = problem.layout.blocks();
    const Index K = schedule.cycle_length();

    BlockVector x = x0;
    double psi_cycle = objective(problem, x);
    if (!std::isfinite(psi_cycle))
        throw ConfigError("run: objective is not finite at the starting point (x0 not in dom g)");

    SolverTrace trace;
    trace.cycle_length = K;
    trace.certified = schedule.certified();
    trace.psi0 = psi_cycle;

    double cost = 0.0;
    for (Index k = 0; k < config.max_cycles; ++k) {
        const BlockVector x_cycle_start = x;
        double bound_sum = 0.0;
        std::vector<LastUpdate> last(static_cast<std::size_t>(blocks));

        for (Index i = 0; i < K; ++i) {
            const Index n = k * K + i;
            const ActivationMask mask = schedule.mask_at(n);
            const Index active = active_count(mask);

            IterRecord rec;
            rec.n = n;
            rec.k = k;
            rec.mask = mask;
            rec.psi = config.record_iter_psi ? objective(problem, x)
                                             : std::numeric_limits<double>::quiet_NaN();
            if (active == 0) {
                rec.cost = cost;
                trace.iters.push_back(std::move(rec));
                continue;
            }

            const double beta_n = aggregate_lipschitz(problem.f.beta, mask);
            const double tau = step_size(policy, beta_n);
            const std::vector<Vec> grads = active_gradients(problem, x, mask);

            double step_sq = 0.0;
            for (Index l = 0; l < blocks; ++l) {
                const auto sl = static_cast<std::size_t>(l);
                if (!mask[sl]) continue;
                const Vec forward = x.block(l) - tau * grads[sl];
                const Vec updated =
                    problem.regs[sl].prox(forward, tau * problem.weights[l]);
                const Vec delta = x.block(l) - updated;
                step_sq += delta.squaredNorm();
                const double coeff = policy.mode == StepPolicy::Mode::convex_g
                                         ? (1.0 / tau - beta_n / 2.0)
                                         : 0.5 * (1.0 / tau - beta_n);
                // an out-of-bound step certifies nothing; never credit it
                bound_sum += std::max(coeff, 0.0) * delta.squaredNorm();
                if (config.record_residual) {
                    auto& lu = last[sl];
                    lu.set = true;
                    lu.n = n;
                    lu.tau = tau;
                    lu.grad = grads[sl];
                    lu.delta = delta;
                }
                x.block(l) = updated;
            }

            cost += static_cast<double>(active);
            rec.tau = tau;
            rec.step_sq = step_sq;
            rec.cost = cost;
            trace.iters.push_back(std::move(rec));
            if (config.iterate_callback) config.iterate_callback(n, x);
        }

        CycleRecord crec;
        crec.k = k;
        crec.psi = objective(problem, x);
        if (!std::isfinite(crec.psi)) {
            std::ostringstream msg;
            msg << "run: non-finite objective at cycle " << k;
            throw NumericalError(msg.str());
        }
        crec.bound_sum = bound_sum;
        crec.slack = psi_cycle - crec.psi - bound_sum;
        crec.displacement = (x.data() - x_cycle_start.data()).norm();
        crec.cost = cost;
        if (config.record_residual) crec.residual = subgradient_residual(problem, x, last);

        const bool in_bounds = !policy.acknowledge_bound_violation;
        if (trace.certified && in_bounds &&
            crec.slack < -config.decrease_slack_rel * (1.0 + std::abs(psi_cycle))) {
            std::cerr << "flexbc: decrease violation at cycle " << k << " (slack " << crec.slack
                      << ")\n";
        }

        psi_cycle = crec.psi;
        const double displacement = crec.displacement;
        trace.cycles.push_back(std::move(crec));
        if (displacement < config.tol_displacement) break;
    }

    return RunResult{std::move(x), std::move(trace)};
}

double cycle_decrease_slack(const SolverTrace& trace, Index k) {
    return trace.cycles.at(static_cast<std::size_t>(k)).slack;
}

double subgradient_residual(const Problem& problem, const BlockVector& x_cycle_end,
                            const std::vector<LastUpdate>& last_updates) {
    const Index blocks = x_cycle_end.blocks();
    for (const auto& lu : last_updates)
        if (!lu.set)
            throw ConfigError(
                "subgradient_residual: some block was never updated in the cycle");

    const ActivationMask all(static_cast<std::size_t>(blocks), 1);
    const std::vector<Vec> grad_end = active_gradients(problem, x_cycle_end, all);

    double sq = 0.0;
    for (Index l = 0; l < blocks; ++l) {
        const auto& lu = last_updates[static_cast<std::size_t>(l)];
        const Vec b = lu.delta / lu.tau - lu.grad + grad_end[static_cast<std::size_t>(l)];
        sq += b.squaredNorm();
    }
    return std::sqrt(sq);
}

void SolverTrace::write_csv(std::ostream& os) const {
    os << std::setprecision(17);
    os << "n,k,mask,tau,psi,step_sq,cost,cycle_psi,slack,residual,displacement\n";
    std::size_t ci = 0;
    for (const auto& it : iters) {
        os << it.n << ',' << it.k << ',' << mask_string(it.mask) << ',' << it.tau << ','
           << it.psi << ',' << it.step_sq << ',' << it.cost;
        const bool boundary = (it.n + 1) % cycle_length == 0;
        if (boundary && ci < cycles.size()) {
            const auto& c = cycles[ci++];
            os << ',' << c.psi << ',' << c.slack << ',' << c.residual << ',' << c.displacement;
        } else {
            os << ",,,,";
        }
        os << '\n';
    }
}

} // namespace flexbc
