#pragma once

#include <optional>
#include <random>
#include <string>

#include "blockspace.hpp"

namespace flexbc {

/// Parameters of the stochastic V-scheme sampler: eps_1 = 1 always, each
/// subsequent bit is 1 with probability 1/m given the previous one is 1.
struct VSchemeParams {
    Index m = 1;
    Index blocks = 1;
    std::uint64_t seed = 0;
};

/// Draws one monotone mask (bit l+1 set implies bit l set, bit 0 always set).
ActivationMask vscheme_sample(const VSchemeParams& p, std::mt19937_64& rng);

/// First window over which the union of active sets misses some block.
struct ScheduleViolation {
    Index window_start = 0;
    std::vector<Index> missing_blocks;
};

/// An activation-mask sequence with cycle length K. mask_at(n) is a pure
/// function of (constructor arguments, seed, n), so streams replay exactly.
class Schedule {
  public:
    enum class Kind {
        full,
        cyclic,
        reshuffled_cyclic,
        flex_hierarchical,
        alternating_hierarchical,
        two_level,
        random_single_block,
        vscheme,
    };

    Index cycle_length() const { return K_; }
    /// Window length for the essentially-cyclic certificate. Equals K for
    /// schedules whose every K-window covers all blocks; 2L - 1 for
    /// reshuffled cycles (any such window contains one complete cycle).
    Index certificate_window() const { return certificate_K_; }
    Index blocks() const { return blocks_; }
    Kind kind() const { return kind_; }
    std::string kind_name() const;
    /// Essentially cyclic by construction (deterministic constructors only).
    bool certified() const { return certified_; }

    ActivationMask mask_at(Index n) const;

    /// All-ones every iteration, K = 1 (classical forward-backward).
    static Schedule full(Index blocks);
    /// Activates exactly block perm[n mod L], K = L.
    static Schedule cyclic(Index blocks, std::vector<Index> perm);
    /// Fresh uniformly random permutation every cycle, K = L.
    static Schedule reshuffled_cyclic(Index blocks, std::uint64_t seed);
    /// L = 4 convention (block 0 = approximation): m coarse masks (1,0,0,0)
    /// then 10 - m masks, full (1,1,1,1) or detail-only (0,1,1,1); K = 10.
    enum class HierarchicalPattern { coarse_then_full, coarse_then_rest };
    static Schedule flex_hierarchical(Index m, HierarchicalPattern pattern);
    /// m coarse-only masks then one full mask, K = m + 1. Block 0 is the
    /// coarse block; used by the multilevel equivalence.
    static Schedule two_level(Index blocks, Index m);
    /// One uniformly random block per iteration; not essentially cyclic.
    static Schedule random_single_block(Index blocks, std::uint64_t seed);
    /// Independent V-scheme draws per iteration; not essentially cyclic.
    static Schedule vscheme(Index blocks, Index m, std::uint64_t seed);

  private:
    Schedule() = default;

    Kind kind_ = Kind::full;
    Index blocks_ = 1;
    Index K_ = 1;
    Index certificate_K_ = 1;
    Index m_ = 1;
    bool certified_ = true;
    std::uint64_t seed_ = 0;
    std::vector<ActivationMask> period_; // deterministic kinds
};

/// Checks union over every K-length window in [0, horizon - K] covers all
/// blocks; returns the first violating window, if any.
std::optional<ScheduleViolation> validate_essentially_cyclic(const Schedule& s, Index horizon);

} // namespace flexbc
