#include "prox.hpp"

#include <algorithm>
#include <cmath>

namespace flexbc {

namespace {

void check_params(const LogSumParams& p) {
    if (!(p.lambda > 0.0) || !(p.eps > 0.0) || !(p.tau > 0.0))
        throw ConfigError("log-sum prox: lambda, eps, tau must be positive");
}

double prox_objective(double u, double a, const LogSumParams& p) {
    const double d = u - a;
    return d * d / (2.0 * p.tau) + p.lambda * std::log(std::abs(u) + p.eps);
}

} // namespace

double prox_log_sum_scalar(double a, const LogSumParams& p) {
    check_params(p);
    if (!std::isfinite(a)) throw NumericalError("log-sum prox: non-finite input");

    const double s = a >= 0.0 ? 1.0 : -1.0;
    const double m = std::abs(a);
    const double tl = p.tau * p.lambda;

    // Stationary points with sign(u) = sign(a) solve
    //   u^2 + (eps - m) u + (tl - m eps) = 0,  u > 0,
    // whose discriminant simplifies to (m + eps)^2 - 4 tl.
    double candidates[3] = {0.0, 0.0, 0.0};
    int n_cand = 1;
    const double disc = (m + p.eps) * (m + p.eps) - 4.0 * tl;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        for (double root : {(m - p.eps + sq) / 2.0, (m - p.eps - sq) / 2.0})
            if (root > 0.0) candidates[n_cand++] = s * root;
    }

    // Smallest-|u| candidates first so exact ties resolve toward 0.
    std::sort(candidates, candidates + n_cand,
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    double best = candidates[0];
    double best_val = prox_objective(best, a, p);
    for (int i = 1; i < n_cand; ++i) {
        const double val = prox_objective(candidates[i], a, p);
        if (val < best_val) {
            best = candidates[i];
            best_val = val;
        }
    }
    return best;
}

Vec prox_log_sum(const Vec& v, const LogSumParams& p) {
    Vec out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = prox_log_sum_scalar(v[i], p);
    return out;
}

double log_sum_value(const Vec& v, double eps) {
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) s += std::log(std::abs(v[i]) + eps);
    return s;
}

Vec prox_l1(const Vec& v, double tau_lambda) {
    if (!(tau_lambda > 0.0)) throw ConfigError("prox_l1: tau_lambda must be positive");
    return v.unaryExpr([tau_lambda](double x) {
        const double m = std::abs(x) - tau_lambda;
        return m > 0.0 ? (x >= 0.0 ? m : -m) : 0.0;
    });
}

SmoothedReg::SmoothedReg(double mu, std::function<Vec(const Vec&, double)> base_prox,
                         std::function<double(const Vec&)> base_eval)
    : mu_(mu), base_prox_(std::move(base_prox)), base_eval_(std::move(base_eval)) {
    if (!(mu_ > 0.0)) throw ConfigError("SmoothedReg: mu must be positive");
}

Vec SmoothedReg::grad(const Vec& v) const { return (v - base_prox_(v, mu_)) / mu_; }

double SmoothedReg::value(const Vec& v) const {
    const Vec p = base_prox_(v, mu_);
    return base_eval_(p) + (v - p).squaredNorm() / (2.0 * mu_);
}

SmoothedReg smoothed_l1(double mu) {
    return SmoothedReg(
        mu, [](const Vec& v, double t) { return prox_l1(v, t); },
        [](const Vec& v) { return v.lpNorm<1>(); });
}

SmoothedReg smoothed_log_sum(double mu, double lambda, double eps) {
    return SmoothedReg(
        mu,
        [lambda, eps](const Vec& v, double t) {
            return prox_log_sum(v, LogSumParams{lambda, eps, t});
        },
        [lambda, eps](const Vec& v) { return lambda * log_sum_value(v, eps); });
}

Regularizer l1_regularizer() {
    Regularizer r;
    r.eval = [](const Vec& v) { return v.lpNorm<1>(); };
    r.prox = [](const Vec& v, double t) { return prox_l1(v, t); };
    r.is_convex = true;
    return r;
}

Regularizer log_sum_regularizer(double eps) {
    Regularizer r;
    r.eval = [eps](const Vec& v) { return log_sum_value(v, eps); };
    // t carries tau * lambda; the prox depends on lambda and tau only
    // through their product.
    r.prox = [eps](const Vec& v, double t) {
        return prox_log_sum(v, LogSumParams{1.0, eps, t});
    };
    r.is_convex = false;
    return r;
}

} // namespace flexbc
