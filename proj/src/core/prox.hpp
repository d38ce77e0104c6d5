#pragma once

#include "blockspace.hpp"

namespace flexbc {

/// Parameters of the log-sum penalty lambda * sum_i log(|v_i| + eps) and of
/// its prox with step tau.
struct LogSumParams {
    double lambda = 1.0;
    double eps = 1e-2;
    double tau = 1.0;
};

/// Global minimizer of u -> (u - a)^2 / (2 tau) + lambda log(|u| + eps).
/// Candidates are 0 and the real stationary points of the per-sign quadratic;
/// ties resolve toward the candidate with smaller |u|.
double prox_log_sum_scalar(double a, const LogSumParams& p);

/// Componentwise prox_log_sum_scalar.
Vec prox_log_sum(const Vec& v, const LogSumParams& p);

double log_sum_value(const Vec& v, double eps);

/// Soft threshold: sign(v_i) max(|v_i| - tau_lambda, 0).
Vec prox_l1(const Vec& v, double tau_lambda);

/// Moreau-envelope smoothing of a proximable base regularizer. grad is
/// (1/mu)-Lipschitz.
class SmoothedReg {
  public:
    SmoothedReg(double mu, std::function<Vec(const Vec&, double)> base_prox,
                std::function<double(const Vec&)> base_eval);

    double mu() const { return mu_; }
    /// Gradient of the envelope: (v - prox_{mu g}(v)) / mu.
    Vec grad(const Vec& v) const;
    /// Envelope value: g(p) + |v - p|^2 / (2 mu) with p = prox_{mu g}(v).
    double value(const Vec& v) const;

  private:
    double mu_;
    std::function<Vec(const Vec&, double)> base_prox_;
    std::function<double(const Vec&)> base_eval_;
};

SmoothedReg smoothed_l1(double mu);
SmoothedReg smoothed_log_sum(double mu, double lambda, double eps);

/// Regularizer adapters for the solver.
Regularizer l1_regularizer();
Regularizer log_sum_regularizer(double eps);

} // namespace flexbc
