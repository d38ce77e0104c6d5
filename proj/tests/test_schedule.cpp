#include <doctest.h>

#include <cmath>

#include "core/schedule.hpp"

using namespace flexbc;

namespace {

std::vector<ActivationMask> stream(const Schedule& s, Index n) {
    std::vector<ActivationMask> out;
    for (Index i = 0; i < n; ++i) out.push_back(s.mask_at(i));
    return out;
}

} // namespace

TEST_CASE("full schedule: all-ones, K = 1") {
    const Schedule s = Schedule::full(3);
    CHECK(s.cycle_length() == 1);
    CHECK(s.certified());
    CHECK(s.mask_at(0) == ActivationMask{1, 1, 1});
    CHECK(s.mask_at(17) == ActivationMask{1, 1, 1});
    CHECK_FALSE(validate_essentially_cyclic(s, 10));
}

TEST_CASE("cyclic identity, L = 2") {
    const Schedule s = Schedule::cyclic(2, {0, 1});
    CHECK(s.mask_at(0) == ActivationMask{1, 0});
    CHECK(s.mask_at(1) == ActivationMask{0, 1});
    CHECK(s.mask_at(2) == ActivationMask{1, 0});
    CHECK_FALSE(validate_essentially_cyclic(s, 40));
}

TEST_CASE("cyclic with explicit permutation order 3,1,4,2 (one-based)") {
    const Schedule s = Schedule::cyclic(4, {2, 0, 3, 1});
    const Index order[] = {2, 0, 3, 1};
    for (Index n = 0; n < 8; ++n) {
        const ActivationMask mask = s.mask_at(n);
        CHECK(active_count(mask) == 1);
        CHECK(mask[static_cast<std::size_t>(order[n % 4])] == 1);
    }
    CHECK_FALSE(validate_essentially_cyclic(s, 100));
}

TEST_CASE("cyclic rejects non-permutations") {
    CHECK_THROWS_AS(Schedule::cyclic(3, {0, 1, 1}), ConfigError);
    CHECK_THROWS_AS(Schedule::cyclic(3, {0, 1}), ConfigError);
}

TEST_CASE("reshuffled cyclic") {
    const Schedule a = Schedule::reshuffled_cyclic(5, 99);
    const Schedule b = Schedule::reshuffled_cyclic(5, 99);
    CHECK(stream(a, 10000) == stream(b, 10000));

    SUBCASE("L = 1 is all-ones") {
        const Schedule s = Schedule::reshuffled_cyclic(1, 4);
        CHECK(s.mask_at(0) == ActivationMask{1});
        CHECK(s.mask_at(9) == ActivationMask{1});
    }
    SUBCASE("every cycle's union covers all blocks") {
        for (Index cycle = 0; cycle < 50; ++cycle) {
            ActivationMask covered(5, 0);
            for (Index n = 5 * cycle; n < 5 * (cycle + 1); ++n) {
                const ActivationMask mask = a.mask_at(n);
                CHECK(active_count(mask) == 1);
                for (std::size_t l = 0; l < 5; ++l) covered[l] |= mask[l];
            }
            CHECK(active_count(covered) == 5);
        }
    }
    SUBCASE("certificate holds over the widened window") {
        CHECK(a.certificate_window() == 9);
        CHECK_FALSE(validate_essentially_cyclic(a, 200));
    }
}

TEST_CASE("flex hierarchical m=8, coarse then full") {
    const Schedule s = Schedule::flex_hierarchical(8, Schedule::HierarchicalPattern::coarse_then_full);
    CHECK(s.cycle_length() == 10);
    CHECK(s.blocks() == 4);
    for (Index n = 0; n < 8; ++n) CHECK(s.mask_at(n) == ActivationMask{1, 0, 0, 0});
    for (Index n = 8; n < 10; ++n) CHECK(s.mask_at(n) == ActivationMask{1, 1, 1, 1});
    CHECK_FALSE(validate_essentially_cyclic(s, 100));
}

TEST_CASE("flex hierarchical m=1, coarse then rest") {
    const Schedule s = Schedule::flex_hierarchical(1, Schedule::HierarchicalPattern::coarse_then_rest);
    CHECK(s.mask_at(0) == ActivationMask{1, 0, 0, 0});
    for (Index n = 1; n < 10; ++n) CHECK(s.mask_at(n) == ActivationMask{0, 1, 1, 1});
    CHECK_FALSE(validate_essentially_cyclic(s, 100));
}

TEST_CASE("flex hierarchical m=0 degenerates to FB") {
    const Schedule s = Schedule::flex_hierarchical(0, Schedule::HierarchicalPattern::coarse_then_full);
    CHECK(s.cycle_length() == 1);
    CHECK(s.mask_at(0) == ActivationMask{1, 1, 1, 1});
    CHECK_THROWS_AS(
        Schedule::flex_hierarchical(0, Schedule::HierarchicalPattern::coarse_then_rest),
        ConfigError);
    CHECK_THROWS_AS(
        Schedule::flex_hierarchical(10, Schedule::HierarchicalPattern::coarse_then_full),
        ConfigError);
}

TEST_CASE("two-level schedule masks") {
    const Schedule s = Schedule::two_level(4, 3);
    CHECK(s.cycle_length() == 4);
    for (Index n = 0; n < 3; ++n) CHECK(s.mask_at(n) == ActivationMask{1, 0, 0, 0});
    CHECK(s.mask_at(3) == ActivationMask{1, 1, 1, 1});
    CHECK_FALSE(validate_essentially_cyclic(s, 40));
}

TEST_CASE("every deterministic constructor passes the certificate over 10K") {
    const Schedule schedules[] = {
        Schedule::full(4),
        Schedule::cyclic(4, {1, 3, 0, 2}),
        Schedule::reshuffled_cyclic(4, 12345),
        Schedule::flex_hierarchical(5, Schedule::HierarchicalPattern::coarse_then_full),
        Schedule::flex_hierarchical(5, Schedule::HierarchicalPattern::coarse_then_rest),
        Schedule::two_level(4, 2),
    };
    for (const Schedule& s : schedules) {
        CHECK(s.certified());
        CHECK_FALSE(validate_essentially_cyclic(s, 10 * s.certificate_window()));
    }
}

TEST_CASE("random single block") {
    SUBCASE("L = 1 is deterministic all-ones and certified") {
        const Schedule s = Schedule::random_single_block(1, 3);
        CHECK(s.certified());
        CHECK(s.mask_at(5) == ActivationMask{1});
    }
    SUBCASE("exactly one active block; uniform frequencies") {
        const Schedule s = Schedule::random_single_block(4, 77);
        CHECK_FALSE(s.certified());
        Index counts[4] = {0, 0, 0, 0};
        const Index n_draws = 100000;
        for (Index n = 0; n < n_draws; ++n) {
            const ActivationMask mask = s.mask_at(n);
            REQUIRE(active_count(mask) == 1);
            for (std::size_t l = 0; l < 4; ++l)
                if (mask[l]) ++counts[l];
        }
        const double p = 0.25;
        const double sigma = std::sqrt(p * (1 - p) * n_draws);
        for (Index l = 0; l < 4; ++l)
            CHECK(std::abs(counts[l] - p * n_draws) <= 3.0 * sigma);
    }
    SUBCASE("a violation report rather than an error") {
        const Schedule s = Schedule::random_single_block(4, 2024);
        const auto violation = validate_essentially_cyclic(s, 100);
        REQUIRE(violation.has_value());
        CHECK_FALSE(violation->missing_blocks.empty());
        // window_start is the first violating window
        for (Index j = 0; j < violation->window_start; ++j) {
            ActivationMask covered(4, 0);
            for (Index n = j; n < j + 4; ++n)
                for (std::size_t l = 0; l < 4; ++l) covered[l] |= s.mask_at(n)[l];
            CHECK(active_count(covered) == 4);
        }
    }
}

TEST_CASE("vscheme sampler") {
    SUBCASE("m = 1 always yields the all-ones mask") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 100; ++i)
            CHECK(vscheme_sample({1, 4, 0}, rng) == ActivationMask{1, 1, 1, 1});
    }
    SUBCASE("L = 1 always yields (1)") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 100; ++i) CHECK(vscheme_sample({3, 1, 0}, rng) == ActivationMask{1});
    }
    SUBCASE("masks are monotone, never all-zero; marginals match (1/m)^(l-1)") {
        std::mt19937_64 rng(98765);
        const Index n_draws = 100000;
        const Index L = 3;
        const Index m = 2;
        std::vector<Index> counts(static_cast<std::size_t>(L), 0);
        for (Index i = 0; i < n_draws; ++i) {
            const ActivationMask mask = vscheme_sample({m, L, 0}, rng);
            REQUIRE(mask[0] == 1);
            for (Index l = 1; l < L; ++l)
                REQUIRE(mask[static_cast<std::size_t>(l)] <=
                        mask[static_cast<std::size_t>(l - 1)]);
            for (Index l = 0; l < L; ++l)
                counts[static_cast<std::size_t>(l)] += mask[static_cast<std::size_t>(l)];
        }
        for (Index l = 0; l < L; ++l) {
            const double p = std::pow(1.0 / static_cast<double>(m), static_cast<double>(l));
            const double sigma = std::sqrt(p * (1 - p) * n_draws);
            CHECK(std::abs(counts[static_cast<std::size_t>(l)] - p * n_draws) <=
                  3.0 * sigma + 1e-9);
        }
    }
}

TEST_CASE("vscheme schedule stream is reproducible and uncertified for m > 1") {
    const Schedule a = Schedule::vscheme(4, 2, 11);
    const Schedule b = Schedule::vscheme(4, 2, 11);
    CHECK(stream(a, 10000) == stream(b, 10000));
    CHECK_FALSE(a.certified());
    CHECK(Schedule::vscheme(4, 1, 11).certified());
}
