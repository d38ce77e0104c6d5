#include <doctest.h>

#include <random>

#include "core/prox.hpp"
#include "oracles.hpp"

using namespace flexbc;

TEST_CASE("log-sum prox at the origin") {
    for (double tau : {0.1, 1.0, 5.0})
        for (double lambda : {0.01, 1.0})
            CHECK(prox_log_sum_scalar(0.0, {lambda, 0.05, tau}) == 0.0);
}

TEST_CASE("log-sum prox against the frozen grid+golden fixture") {
    // a = 3, tau = 0.5, lambda = 0.2, eps = 0.05; oracle recomputed below.
    const LogSumParams p{0.2, 0.05, 0.5};
    const double fixture_u = 2.9668528747835694;
    const double fixture_value = 0.2219415706273774;
    const double u = prox_log_sum_scalar(3.0, p);
    CHECK(u == doctest::Approx(fixture_u).epsilon(1e-10));
    CHECK(oracles::log_sum_objective(u, 3.0, p) ==
          doctest::Approx(fixture_value).epsilon(1e-12));
    const double oracle_u = oracles::prox_log_sum_grid(3.0, p);
    CHECK(oracles::log_sum_objective(u, 3.0, p) <=
          oracles::log_sum_objective(oracle_u, 3.0, p) + 1e-10);
}

TEST_CASE("log-sum prox third branch for large inputs") {
    const LogSumParams p{1.0, 0.1, 1.0};
    const double a = 100.0;
    const double expected =
        (std::abs(a) - p.eps + std::sqrt((std::abs(a) + p.eps) * (std::abs(a) + p.eps) -
                                         4.0 * p.tau * p.lambda)) /
        2.0;
    CHECK(prox_log_sum_scalar(a, p) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(prox_log_sum_scalar(-a, p) == doctest::Approx(-expected).epsilon(1e-10));
}

TEST_CASE("vector log-sum prox: zeros, separability, permutation") {
    const LogSumParams p{0.3, 0.05, 0.7};
    CHECK(prox_log_sum(Vec::Zero(4), p) == Vec::Zero(4));

    Vec v(2);
    v << 50.0, 0.0;
    const Vec out = prox_log_sum(v, p);
    CHECK(out(0) == doctest::Approx(prox_log_sum_scalar(50.0, p)).epsilon(1e-15));
    CHECK(out(1) == 0.0);

    Vec w(3);
    w << -1.2, 0.4, 7.0;
    Vec w_perm(3);
    w_perm << 7.0, -1.2, 0.4;
    const Vec ow = prox_log_sum(w, p);
    const Vec op = prox_log_sum(w_perm, p);
    CHECK(op(0) == ow(2));
    CHECK(op(1) == ow(0));
    CHECK(op(2) == ow(1));
}

TEST_CASE("log-sum prox is odd") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const LogSumParams p{0.5, 0.02, 0.8};
    for (int i = 0; i < 200; ++i) {
        Vec v(3);
        v << gauss(rng), gauss(rng), gauss(rng);
        CHECK((prox_log_sum(-v, p) + prox_log_sum(v, p)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("prox optimality against random perturbations") {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> gauss(0.0, 1.5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const LogSumParams p{0.05 + unif(rng), 0.01 + 0.2 * unif(rng), 0.05 + unif(rng)};
        const double a = gauss(rng);
        const double u = prox_log_sum_scalar(a, p);
        const double value = oracles::log_sum_objective(u, a, p);
        for (double magnitude : {1e-3, 1e-1, 1.0}) {
            for (int k = 0; k < 64 / 3; ++k) {
                const double perturbed = u + magnitude * gauss(rng);
                CHECK(value <= oracles::log_sum_objective(perturbed, a, p) + 1e-12);
            }
        }
    }
}

TEST_CASE("soft threshold basics") {
    Vec v(2);
    v << 2.0, -0.5;
    Vec expected(2);
    expected << 1.0, 0.0;
    CHECK(prox_l1(v, 1.0) == expected);
    CHECK(prox_l1(Vec::Zero(3), 0.4) == Vec::Zero(3));
    CHECK((prox_l1(v, 1e-14) - v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("soft threshold is firmly nonexpansive") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        Vec v(4), w(4);
        for (Index k = 0; k < 4; ++k) {
            v(k) = gauss(rng);
            w(k) = gauss(rng);
        }
        CHECK((prox_l1(v, 0.7) - prox_l1(w, 0.7)).norm() <= (v - w).norm() + 1e-14);
    }
}

TEST_CASE("smoothed l1 gradient: Huber regions") {
    const double mu = 0.25;
    const SmoothedReg reg = smoothed_l1(mu);
    Vec v(3);
    v << 0.6, -1.2, 0.0;
    const Vec g = reg.grad(v);
    CHECK(g(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g(1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(g(2) == 0.0);
    CHECK(reg.grad(Vec::Zero(2)) == Vec::Zero(2));
}

TEST_CASE("smoothed gradient matches finite differences of the envelope") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double h = 1e-6;
    for (const SmoothedReg& reg :
         {smoothed_l1(0.3), smoothed_log_sum(0.2, 0.7, 0.05)}) {
        for (int i = 0; i < 50; ++i) {
            Vec v(3);
            for (Index k = 0; k < 3; ++k) v(k) = gauss(rng);
            const Vec g = reg.grad(v);
            for (Index k = 0; k < 3; ++k) {
                Vec vp = v, vm = v;
                vp(k) += h;
                vm(k) -= h;
                const double fd = (reg.value(vp) - reg.value(vm)) / (2.0 * h);
                CHECK(g(k) == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("smoothed gradient is (1/mu)-Lipschitz") {
    std::mt19937_64 rng(57);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const double mu = 0.15;
    const SmoothedReg reg = smoothed_l1(mu);
    for (int i = 0; i < 300; ++i) {
        Vec v(4), w(4);
        for (Index k = 0; k < 4; ++k) {
            v(k) = gauss(rng);
            w(k) = gauss(rng);
        }
        CHECK((reg.grad(v) - reg.grad(w)).norm() <= (v - w).norm() / mu + 1e-8);
    }
}

TEST_CASE("log-sum value") {
    Vec v(2);
    v << 1.0, -2.0;
    CHECK(log_sum_value(v, 0.5) ==
          doctest::Approx(std::log(1.5) + std::log(2.5)).epsilon(1e-15));
}

TEST_CASE("regularizer adapters route tau*lambda") {
    const Regularizer l1 = l1_regularizer();
    Vec v(1);
    v << 2.0;
    CHECK(l1.prox(v, 0.5)(0) == doctest::Approx(1.5));
    CHECK(l1.is_convex);
    const Regularizer ls = log_sum_regularizer(0.05);
    CHECK_FALSE(ls.is_convex);
    CHECK(ls.prox(v, 0.5)(0) ==
          doctest::Approx(prox_log_sum_scalar(2.0, {1.0, 0.05, 0.5})).epsilon(1e-15));
}
