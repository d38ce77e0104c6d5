#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "core/imaging.hpp"
#include "core/prox.hpp"
#include "oracles.hpp"

using namespace flexbc;

TEST_CASE("gradient vanishes at an exact fit with the identity operator") {
    std::mt19937_64 rng(91);
    const Index side = 8;
    const SeparableBlur blur = make_delta_blur(side);
    const BlockVector c = analyze_to_blocks(oracles::random_image(side, side, rng),
                                            DetailGrouping::per_orientation);
    const Mat z = synthesize_from_blocks(c, side, DetailGrouping::per_orientation);
    const Problem p = build_problem(blur, z, 1e-6, 1e-4, 1e-2);
    for (Index l = 0; l < 4; ++l)
        CHECK(p.f.block_grad(c, l).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(p.f.eval(c) <= 1e-24);
}

TEST_CASE("objective equivalence of the synthesis formulation") {
    std::mt19937_64 rng(92);
    const Index side = 16;
    const SeparableBlur blur = make_gaussian_blur(side, 5, 2.0);
    const Mat z = degrade(phantom(side), blur, 0.01, 11);
    const double lambda_a = 1e-6, lambda_d = 1e-4, eps = 1e-2;
    const Problem p = build_problem(blur, z, lambda_a, lambda_d, eps);
    for (int trial = 0; trial < 10; ++trial) {
        BlockVector x(p.layout);
        std::normal_distribution<double> gauss;
        for (Index i = 0; i < x.data().size(); ++i) x.data()(i) = 0.5 * gauss(rng);
        // F(u) with u = synthesize(x): data term plus log-sum of the analysis
        // coefficients, weighted per block
        const Mat u = synthesize_from_blocks(x, side, DetailGrouping::per_orientation);
        double f_value = 0.5 * (apply_blur(blur, u) - z).squaredNorm();
        f_value += lambda_a * log_sum_value(Vec(x.block(0)), eps);
        for (Index l = 1; l < 4; ++l) f_value += lambda_d * log_sum_value(Vec(x.block(l)), eps);
        const double psi = objective(p, x);
        CHECK(std::abs(f_value - psi) <= 1e-12 * (1.0 + std::abs(psi)));
    }
}

TEST_CASE("objective at the analysis start matches a dense-operator oracle") {
    std::mt19937_64 rng(93);
    const Index side = 16;
    const SeparableBlur blur = make_gaussian_blur(side, 5, 2.0);
    const Mat z = degrade(phantom(side), blur, 0.01, 12);
    const double lambda_a = 1e-6, lambda_d = 1e-4, eps = 1e-2;
    const Problem p = build_problem(blur, z, lambda_a, lambda_d, eps);
    const BlockVector x0 = analyze_to_blocks(z, DetailGrouping::per_orientation);

    const Mat dense = oracles::dense_blur_matrix(blur);
    const Mat u = synthesize_from_blocks(x0, side, DetailGrouping::per_orientation);
    const Vec residual =
        dense * Eigen::Map<const Vec>(u.data(), u.size()) - Eigen::Map<const Vec>(z.data(), z.size());
    double oracle = 0.5 * residual.squaredNorm() + lambda_a * log_sum_value(Vec(x0.block(0)), eps);
    for (Index l = 1; l < 4; ++l) oracle += lambda_d * log_sum_value(Vec(x0.block(l)), eps);
    CHECK(objective(p, x0) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("per-block gradients match central finite differences") {
    std::mt19937_64 rng(94);
    const Index side = 16;
    const SeparableBlur blur = make_gaussian_blur(side, 5, 2.0);
    const Mat z = degrade(phantom(side), blur, 0.01, 13);
    const Problem p = build_problem(blur, z, 1e-6, 1e-4, 1e-2);
    BlockVector x(p.layout);
    std::normal_distribution<double> gauss;
    for (Index i = 0; i < x.data().size(); ++i) x.data()(i) = 0.3 * gauss(rng);

    const double h = 1e-6;
    for (Index l = 0; l < 4; ++l) {
        const Vec grad = p.f.block_grad(x, l);
        for (int probe = 0; probe < 5; ++probe) {
            const Index i =
                std::uniform_int_distribution<Index>(0, p.layout.dim(l) - 1)(rng);
            BlockVector xp = x, xm = x;
            xp.block(l)(i) += h;
            xm.block(l)(i) -= h;
            const double fd = (p.f.eval(xp) - p.f.eval(xm)) / (2.0 * h);
            CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("empirical multiple-block smoothness") {
    std::mt19937_64 rng(95);
    const Index side = 16;
    const SeparableBlur blur = make_gaussian_blur(side, 5, 2.0);
    const Mat z = degrade(phantom(side), blur, 0.01, 14);
    const Problem p = build_problem(blur, z, 1e-6, 1e-4, 1e-2);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<unsigned> pick_mask(1, 15);
    const ActivationMask all(4, 1);
    for (int trial = 0; trial < 100; ++trial) {
        BlockVector x(p.layout), v(p.layout);
        for (Index i = 0; i < x.data().size(); ++i) {
            x.data()(i) = gauss(rng);
            v.data()(i) = gauss(rng);
        }
        const unsigned bits = pick_mask(rng);
        ActivationMask mask(4, 0);
        for (unsigned l = 0; l < 4; ++l) mask[l] = (bits >> l) & 1u;
        BlockVector y = x;
        double step_norm_sq = 0.0;
        for (Index l = 0; l < 4; ++l) {
            if (!mask[static_cast<std::size_t>(l)]) continue;
            y.block(l) += v.block(l);
            step_norm_sq += Vec(v.block(l)).squaredNorm();
        }
        double diff_sq = 0.0;
        const auto gx = p.f.block_grad_multi(x, all);
        const auto gy = p.f.block_grad_multi(y, all);
        for (Index l = 0; l < 4; ++l)
            diff_sq += (gy[static_cast<std::size_t>(l)] - gx[static_cast<std::size_t>(l)])
                           .squaredNorm();
        CHECK(std::sqrt(diff_sq) <=
              aggregate_lipschitz(p.f.beta, mask) * std::sqrt(step_norm_sq) + 1e-10);
    }
}

TEST_CASE("psnr") {
    const Mat a = Mat::Zero(4, 4);
    const Mat b = Mat::Ones(4, 4);
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(a, b) == doctest::Approx(0.0).epsilon(1e-14));
    Mat c = Mat::Zero(4, 4);
    c(0, 0) = std::sqrt(1e-4 * 16.0); // MSE = 1e-4
    CHECK(psnr(c, a) == doctest::Approx(40.0).epsilon(1e-12));
    CHECK_THROWS_AS(psnr(a, Mat::Zero(3, 3)), DimensionError);
}

TEST_CASE("phantom is in range and piecewise varied") {
    const Mat u = phantom(64);
    CHECK(u.minCoeff() >= 0.0);
    CHECK(u.maxCoeff() <= 1.0);
    CHECK(u.maxCoeff() - u.minCoeff() > 0.3);
}

TEST_CASE("pgm round trips") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "flexbc_pgm_test";
    fs::create_directories(dir);
    const Mat u = phantom(16);
    struct Case {
        int bits;
        bool raw;
        double tol;
    };
    for (const Case c : {Case{8, true, 1.0 / 255.0}, Case{8, false, 1.0 / 255.0},
                         Case{16, true, 1.0 / 65535.0}, Case{16, false, 1.0 / 65535.0}}) {
        const std::string path =
            (dir / ("img_" + std::to_string(c.bits) + (c.raw ? "_raw" : "_plain") + ".pgm"))
                .string();
        write_pgm(path, u, c.bits, c.raw);
        const Mat back = read_pgm(path);
        REQUIRE(back.rows() == 16);
        CHECK((back - u).cwiseAbs().maxCoeff() <= c.tol);
    }
    CHECK_THROWS_AS(read_pgm((dir / "missing.pgm").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("matched-cost comparison") {
    const Index side = 16;
    const SeparableBlur blur = make_gaussian_blur(side, 5, 2.0);
    const Mat z = degrade(phantom(side), blur, 0.01, 15);
    const Problem p = build_problem(blur, z, 1e-6, 1e-4, 1e-2);
    const BlockVector x0 = analyze_to_blocks(z, DetailGrouping::per_orientation);
    SolverConfig sc;
    sc.max_cycles = 20;
    sc.tol_displacement = 0.0;

    SUBCASE("identical variants produce identical curves") {
        const std::vector<CompareVariant> variants{
            {"a", Schedule::cyclic(4, {0, 1, 2, 3}), StepPolicy{}},
            {"b", Schedule::cyclic(4, {0, 1, 2, 3}), StepPolicy{}},
        };
        const CompareResult r = matched_cost_compare(p, variants, sc, x0);
        REQUIRE(r.traces.size() == 2);
        REQUIRE(r.traces[0].cycles.size() == r.traces[1].cycles.size());
        for (std::size_t k = 0; k < r.traces[0].cycles.size(); ++k) {
            CHECK(r.traces[0].cycles[k].psi == r.traces[1].cycles[k].psi);
            CHECK(r.traces[0].cycles[k].cost == r.traces[1].cycles[k].cost);
        }
        CHECK(r.finals[0].data() == r.finals[1].data());
    }
    SUBCASE("FB and cyclic are both monotone in the cycle objective") {
        const std::vector<CompareVariant> variants{
            {"fb", Schedule::full(4), StepPolicy{}},
            {"cyclic", Schedule::cyclic(4, {0, 1, 2, 3}), StepPolicy{}},
        };
        const CompareResult r = matched_cost_compare(p, variants, sc, x0);
        for (const auto& trace : r.traces) {
            double prev = trace.psi0;
            for (const auto& c : trace.cycles) {
                CHECK(c.psi <= prev + 1e-12 * (1.0 + std::abs(prev)));
                prev = c.psi;
            }
        }
    }
    SUBCASE("cost accounting") {
        const std::vector<CompareVariant> variants{
            {"fb", Schedule::full(4), StepPolicy{}},
            {"flex", Schedule::flex_hierarchical(8, Schedule::HierarchicalPattern::coarse_then_full),
             StepPolicy{}},
        };
        const CompareResult r = matched_cost_compare(p, variants, sc, x0);
        // one full FB iteration costs exactly L units
        CHECK(r.traces[0].iters[0].cost == 4.0);
        CHECK(r.traces[0].iters[1].cost == 8.0);
        // flex cycle: 8 coarse-only units + 2 full iterations
        CHECK(r.traces[1].cycles[0].cost == 8.0 + 2.0 * 4.0);
    }
    SUBCASE("empty variant list is rejected") {
        CHECK_THROWS_AS(matched_cost_compare(p, {}, sc, x0), ConfigError);
    }
}

TEST_CASE("objective_at_cost is a right-continuous step lookup") {
    SolverTrace trace;
    trace.psi0 = 10.0;
    CycleRecord c0;
    c0.psi = 5.0;
    c0.cost = 4.0;
    CycleRecord c1;
    c1.psi = 2.0;
    c1.cost = 8.0;
    trace.cycles = {c0, c1};
    CHECK(objective_at_cost(trace, 0.0) == 10.0);
    CHECK(objective_at_cost(trace, 3.9) == 10.0);
    CHECK(objective_at_cost(trace, 4.0) == 5.0);
    CHECK(objective_at_cost(trace, 7.0) == 5.0);
    CHECK(objective_at_cost(trace, 100.0) == 2.0);
}
