#include "schedule.hpp"

#include <algorithm>
#include <numeric>

namespace flexbc {

namespace {

// splitmix64, used to derive independent per-index generator seeds.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 rng_at(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(mix(seed ^ mix(index)));
}

} // namespace

ActivationMask vscheme_sample(const VSchemeParams& p, std::mt19937_64& rng) {
    if (p.m < 1 || p.blocks < 1) throw ConfigError("vscheme: m >= 1 and blocks >= 1 required");
    ActivationMask mask(static_cast<std::size_t>(p.blocks), 0);
    mask[0] = 1;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index l = 1; l < p.blocks; ++l) {
        if (p.m == 1 || unif(rng) < 1.0 / static_cast<double>(p.m))
            mask[static_cast<std::size_t>(l)] = 1;
        else
            break;
    }
    return mask;
}

std::string Schedule::kind_name() const {
    switch (kind_) {
        case Kind::full: return "full";
        case Kind::cyclic: return "cyclic";
        case Kind::reshuffled_cyclic: return "reshuffled_cyclic";
        case Kind::flex_hierarchical: return "flex";
        case Kind::alternating_hierarchical: return "alternating";
        case Kind::two_level: return "two_level";
        case Kind::random_single_block: return "random_single";
        case Kind::vscheme: return "vscheme";
    }
    return "unknown";
}

ActivationMask Schedule::mask_at(Index n) const {
    if (n < 0) throw ConfigError("Schedule: negative iteration index");
    switch (kind_) {
        case Kind::full:
        case Kind::cyclic:
        case Kind::flex_hierarchical:
        case Kind::alternating_hierarchical:
        case Kind::two_level:
            return period_[static_cast<std::size_t>(n % K_)];
        case Kind::reshuffled_cyclic: {
            const Index cycle = n / K_;
            std::vector<Index> perm(static_cast<std::size_t>(blocks_));
            std::iota(perm.begin(), perm.end(), Index{0});
            auto rng = rng_at(seed_, static_cast<std::uint64_t>(cycle));
            std::shuffle(perm.begin(), perm.end(), rng);
            ActivationMask mask(static_cast<std::size_t>(blocks_), 0);
            mask[static_cast<std::size_t>(perm[static_cast<std::size_t>(n % K_)])] = 1;
            return mask;
        }
        case Kind::random_single_block: {
            auto rng = rng_at(seed_, static_cast<std::uint64_t>(n));
            std::uniform_int_distribution<Index> pick(0, blocks_ - 1);
            ActivationMask mask(static_cast<std::size_t>(blocks_), 0);
            mask[static_cast<std::size_t>(pick(rng))] = 1;
            return mask;
        }
        case Kind::vscheme: {
            auto rng = rng_at(seed_, static_cast<std::uint64_t>(n));
            return vscheme_sample(VSchemeParams{m_, blocks_, seed_}, rng);
        }
    }
    throw ConfigError("Schedule: unknown kind");
}

Schedule Schedule::full(Index blocks) {
    if (blocks < 1) throw ConfigError("full: blocks >= 1 required");
    Schedule s;
    s.kind_ = Kind::full;
    s.blocks_ = blocks;
    s.K_ = 1;
    s.certificate_K_ = 1;
    s.period_ = {ActivationMask(static_cast<std::size_t>(blocks), 1)};
    return s;
}

Schedule Schedule::cyclic(Index blocks, std::vector<Index> perm) {
    if (blocks < 1) throw ConfigError("cyclic: blocks >= 1 required");
    std::vector<Index> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Index> identity(static_cast<std::size_t>(blocks));
    std::iota(identity.begin(), identity.end(), Index{0});
    if (sorted != identity) throw ConfigError("cyclic: perm must be a permutation of 0..L-1");

    Schedule s;
    s.kind_ = Kind::cyclic;
    s.blocks_ = blocks;
    s.K_ = blocks;
    s.certificate_K_ = blocks;
    for (Index n = 0; n < blocks; ++n) {
        ActivationMask mask(static_cast<std::size_t>(blocks), 0);
        mask[static_cast<std::size_t>(perm[static_cast<std::size_t>(n)])] = 1;
        s.period_.push_back(mask);
    }
    return s;
}

Schedule Schedule::reshuffled_cyclic(Index blocks, std::uint64_t seed) {
    if (blocks < 1) throw ConfigError("reshuffled_cyclic: blocks >= 1 required");
    Schedule s;
    s.kind_ = Kind::reshuffled_cyclic;
    s.blocks_ = blocks;
    s.K_ = blocks;
    s.certificate_K_ = 2 * blocks - 1;
    s.seed_ = seed;
    return s;
}

Schedule Schedule::flex_hierarchical(Index m, HierarchicalPattern pattern) {
    if (m < 0 || m > 9) throw ConfigError("flex_hierarchical: m must be in [0, 9]");
    if (m == 0 && pattern == HierarchicalPattern::coarse_then_full)
        return full(4); // no coarse-only phase: every mask is all-ones, K = 1
    if (m == 0) throw ConfigError("flex_hierarchical: coarse_then_rest requires m >= 1");
    Schedule s;
    s.kind_ = pattern == HierarchicalPattern::coarse_then_full ? Kind::flex_hierarchical
                                                               : Kind::alternating_hierarchical;
    s.blocks_ = 4;
    s.K_ = 10;
    s.certificate_K_ = 10;
    const ActivationMask coarse{1, 0, 0, 0};
    const ActivationMask rest = pattern == HierarchicalPattern::coarse_then_full
                                    ? ActivationMask{1, 1, 1, 1}
                                    : ActivationMask{0, 1, 1, 1};
    for (Index n = 0; n < 10; ++n) s.period_.push_back(n < m ? coarse : rest);
    return s;
}

Schedule Schedule::two_level(Index blocks, Index m) {
    if (blocks < 2) throw ConfigError("two_level: blocks >= 2 required");
    if (m < 1) throw ConfigError("two_level: m >= 1 required");
    Schedule s;
    s.kind_ = Kind::two_level;
    s.blocks_ = blocks;
    s.K_ = m + 1;
    s.certificate_K_ = m + 1;
    ActivationMask coarse(static_cast<std::size_t>(blocks), 0);
    coarse[0] = 1;
    for (Index n = 0; n < m; ++n) s.period_.push_back(coarse);
    s.period_.push_back(ActivationMask(static_cast<std::size_t>(blocks), 1));
    return s;
}

Schedule Schedule::random_single_block(Index blocks, std::uint64_t seed) {
    if (blocks < 1) throw ConfigError("random_single_block: blocks >= 1 required");
    Schedule s;
    s.kind_ = Kind::random_single_block;
    s.blocks_ = blocks;
    s.K_ = blocks; // reporting granularity only; no cyclic certificate
    s.certificate_K_ = blocks;
    s.seed_ = seed;
    s.certified_ = blocks == 1;
    return s;
}

Schedule Schedule::vscheme(Index blocks, Index m, std::uint64_t seed) {
    if (blocks < 1 || m < 1) throw ConfigError("vscheme: blocks >= 1 and m >= 1 required");
    Schedule s;
    s.kind_ = Kind::vscheme;
    s.blocks_ = blocks;
    s.K_ = std::max<Index>(Index{1}, m * blocks); // reporting granularity only
    s.certificate_K_ = s.K_;
    s.m_ = m;
    s.seed_ = seed;
    s.certified_ = blocks == 1 || m == 1;
    return s;
}

std::optional<ScheduleViolation> validate_essentially_cyclic(const Schedule& s, Index horizon) {
    const Index K = s.certificate_window();
    if (horizon < K) throw ConfigError("validate_essentially_cyclic: horizon < K");
    std::vector<ActivationMask> window;
    window.reserve(static_cast<std::size_t>(horizon));
    for (Index n = 0; n < horizon; ++n) window.push_back(s.mask_at(n));
    for (Index j = 0; j + K <= horizon; ++j) {
        ActivationMask covered(static_cast<std::size_t>(s.blocks()), 0);
        for (Index n = j; n < j + K; ++n)
            for (std::size_t l = 0; l < covered.size(); ++l)
                covered[l] |= window[static_cast<std::size_t>(n)][l];
        std::vector<Index> missing;
        for (std::size_t l = 0; l < covered.size(); ++l)
            if (!covered[l]) missing.push_back(static_cast<Index>(l));
        if (!missing.empty()) return ScheduleViolation{j, std::move(missing)};
    }
    return std::nullopt;
}

} // namespace flexbc
