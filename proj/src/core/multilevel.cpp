#include "multilevel.hpp"

#include <cmath>

#include "prox.hpp"

namespace flexbc {

namespace {

Mat coarse_of(const BlockVector& x, Index side) {
    const Index h = side / 4;
    return Mat(Eigen::Map<const Mat>(x.block(0).data(), h, h));
}

void set_coarse(BlockVector& x, const Mat& a) {
    x.block(0) = Eigen::Map<const Vec>(a.data(), a.size());
}

void check_model(const TwoLevelModel& model) {
    if (model.blur == nullptr) throw ConfigError("TwoLevelModel: blur operator missing");
    if (model.side < 4 || model.side % 4 != 0)
        throw DimensionError("TwoLevelModel: side must be divisible by 4");
    if (model.z.rows() != model.side || model.z.cols() != model.side)
        throw DimensionError("TwoLevelModel: data shape mismatch");
}

} // namespace

Mat restrict_to_coarse(const Mat& u) { return two_level_analyze(u).approx; }

Mat prolong_from_coarse(const Mat& a, Index side) {
    const Index h2 = side / 4;
    const Index h1 = side / 2;
    if (a.rows() != h2 || a.cols() != h2)
        throw DimensionError("prolong_from_coarse: coarse shape mismatch");
    TwoLevelCoeffs c;
    c.approx = a;
    c.c2_d1 = c.c2_d2 = c.c2_d3 = Mat::Zero(h2, h2);
    c.c1_d1 = c.c1_d2 = c.c1_d3 = Mat::Zero(h1, h1);
    return two_level_synthesize(c);
}

Mat first_order_coherence(const TwoLevelModel& model, const BlockVector& x) {
    check_model(model);
    BlockVector details = x;
    details.block(0).setZero();
    const Mat w = synthesize_from_blocks(details, model.side, model.grouping);
    const Mat z_v = prolong_from_coarse(restrict_to_coarse(model.z), model.side);
    const Mat z_w = model.z - z_v;
    return restrict_to_coarse(adjoint_blur(*model.blur, apply_blur(*model.blur, w) - z_w));
}

Mat first_order_coherence_smoothed(const TwoLevelModel& model, const BlockVector& x,
                                   double mu) {
    check_model(model);
    const Mat a = coarse_of(x, model.side);
    const Vec a_vec = Eigen::Map<const Vec>(a.data(), a.size());
    const SmoothedReg smoothed = smoothed_log_sum(mu, model.lambda_a, model.eps_logsum);
    const Vec reg_grad = smoothed.grad(a_vec);
    const Index h = model.side / 4;
    const Mat reg_grad_mat = Eigen::Map<const Mat>(reg_grad.data(), h, h);

    const Mat u = synthesize_from_blocks(x, model.side, model.grouping);
    const Mat fine_grad =
        restrict_to_coarse(adjoint_blur(*model.blur, apply_blur(*model.blur, u) - model.z)) +
        reg_grad_mat;

    const Mat z_v = prolong_from_coarse(restrict_to_coarse(model.z), model.side);
    const Mat coarse_grad =
        restrict_to_coarse(adjoint_blur(
            *model.blur, apply_blur(*model.blur, prolong_from_coarse(a, model.side)) - z_v)) +
        reg_grad_mat;

    return fine_grad - coarse_grad;
}

Mat coarse_step(const TwoLevelModel& model, const Mat& a, const Mat& v_h, double tau) {
    check_model(model);
    if (!(tau > 0.0)) throw ConfigError("coarse_step: tau must be positive");
    Mat grad;
    if (model.cache) {
        grad = coarse_gradient_fast(*model.cache, a);
    } else {
        const Mat z_v = prolong_from_coarse(restrict_to_coarse(model.z), model.side);
        grad = restrict_to_coarse(adjoint_blur(
            *model.blur, apply_blur(*model.blur, prolong_from_coarse(a, model.side)) - z_v));
    }
    const Mat forward = a - tau * (grad + v_h);
    const Vec fwd_vec = Eigen::Map<const Vec>(forward.data(), forward.size());
    const Vec prox =
        model.fine_problem.regs[0].prox(fwd_vec, tau * model.fine_problem.weights[0]);
    return Mat(Eigen::Map<const Mat>(prox.data(), a.rows(), a.cols()));
}

TwoLevelRunResult two_level_run(const TwoLevelModel& model, Index outer_iterations,
                                Index coarse_per_outer, double tau, const BlockVector& x0) {
    check_model(model);
    if (outer_iterations < 0 || coarse_per_outer < 1)
        throw ConfigError("two_level_run: bad iteration counts");

    const Index blocks = model.fine_problem.layout.blocks();
    const ActivationMask all(static_cast<std::size_t>(blocks), 1);
    const std::vector<double> taus(static_cast<std::size_t>(blocks), tau);

    TwoLevelRunResult result{x0, {}};
    for (Index outer = 0; outer < outer_iterations; ++outer) {
        for (Index j = 0; j < coarse_per_outer; ++j) {
            const Mat v_h = first_order_coherence(model, result.x);
            const Mat a = coarse_step(model, coarse_of(result.x, model.side), v_h, tau);
            set_coarse(result.x, a);
            result.iterates.push_back(result.x);
        }
        result.x = bc_fb_iterate(model.fine_problem, result.x, all, taus);
        result.iterates.push_back(result.x);
    }
    return result;
}

EquivalenceReport equivalence_check(const TwoLevelModel& model, Index steps,
                                    const BlockVector& x0, double tol, double tau,
                                    std::optional<double> tau_bcd, Index coarse_per_outer) {
    check_model(model);
    EquivalenceReport report;
    if (steps == 0) {
        report.pass = true;
        return report;
    }

    const Index per_outer = coarse_per_outer + 1;
    const Index outer = (steps + per_outer - 1) / per_outer;
    const TwoLevelRunResult ml = two_level_run(model, outer, coarse_per_outer, tau, x0);

    std::vector<BlockVector> bcd;
    bcd.reserve(static_cast<std::size_t>(outer * per_outer));
    SolverConfig config;
    config.max_cycles = outer;
    config.tol_displacement = 0.0;
    config.record_iter_psi = false;
    config.iterate_callback = [&bcd](Index, const BlockVector& x) { bcd.push_back(x); };
    StepPolicy policy;
    policy.fixed_tau = tau_bcd.value_or(tau);
    const Schedule schedule =
        Schedule::two_level(model.fine_problem.layout.blocks(), coarse_per_outer);
    run(model.fine_problem, schedule, policy, config, x0);

    const auto n = std::min({static_cast<std::size_t>(steps), ml.iterates.size(), bcd.size()});
    for (std::size_t i = 0; i < n; ++i) {
        const double dev =
            (ml.iterates[i].data() - bcd[i].data()).cwiseAbs().maxCoeff();
        report.per_step_deviation.push_back(dev);
        report.max_deviation = std::max(report.max_deviation, dev);
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

} // namespace flexbc
