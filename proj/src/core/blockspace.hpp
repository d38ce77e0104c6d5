#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace flexbc {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Partition of a direct sum H = H_1 + ... + H_L into contiguous blocks.
class BlockLayout {
  public:
    explicit BlockLayout(std::vector<Index> dims);

    Index blocks() const { return static_cast<Index>(dims_.size()); }
    Index dim(Index l) const { return dims_[static_cast<std::size_t>(l)]; }
    Index offset(Index l) const { return offsets_[static_cast<std::size_t>(l)]; }
    Index total() const { return total_; }

    bool operator==(const BlockLayout& other) const { return dims_ == other.dims_; }

  private:
    std::vector<Index> dims_;
    std::vector<Index> offsets_;
    Index total_ = 0;
};

/// One contiguous coordinate buffer addressed per block; block views are
/// disjoint slices, so parallel per-block writes within one iteration are
/// race-free.
class BlockVector {
  public:
    explicit BlockVector(BlockLayout layout)
        : layout_(std::move(layout)), data_(Vec::Zero(layout_.total())) {}
    BlockVector(BlockLayout layout, Vec data);

    const BlockLayout& layout() const { return layout_; }
    Index blocks() const { return layout_.blocks(); }

    Eigen::VectorBlock<Vec> block(Index l) {
        return data_.segment(layout_.offset(l), layout_.dim(l));
    }
    Eigen::VectorBlock<const Vec> block(Index l) const {
        return data_.segment(layout_.offset(l), layout_.dim(l));
    }

    Vec& data() { return data_; }
    const Vec& data() const { return data_; }

  private:
    BlockLayout layout_;
    Vec data_;
};

/// epsilon^n in {0,1}^L: which blocks are active at one iteration.
using ActivationMask = std::vector<std::uint8_t>;

inline Index active_count(const ActivationMask& mask) {
    Index c = 0;
    for (auto b : mask) c += (b != 0);
    return c;
}

/// Smooth term f: value, per-block gradients and the block Lipschitz
/// matrix (beta_{l,j}). block_grad_multi, when set, computes all active
/// gradients at the same point sharing the residual; otherwise the solver
/// falls back to per-block calls.
struct SmoothTerm {
    std::function<double(const BlockVector&)> eval;
    std::function<Vec(const BlockVector&, Index)> block_grad;
    std::function<std::vector<Vec>(const BlockVector&, const ActivationMask&)> block_grad_multi;
    Mat beta;

    static Mat broadcast_beta(Index blocks, double beta_f) {
        return Mat::Constant(blocks, blocks, beta_f);
    }
};

/// Proximable per-block regularizer g_l. prox(v, t) returns a minimizer of
/// u -> |u - v|^2 / (2 t) + g(u); the solver passes t = tau * lambda_l.
struct Regularizer {
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&, double)> prox;
    bool is_convex = false;
};

/// Objective Psi(x) = f(x) + sum_l lambda_l g_l(x_l).
struct Problem {
    BlockLayout layout;
    SmoothTerm f;
    std::vector<Regularizer> regs;
    Vec weights;

    void check() const;
};

double objective(const Problem& problem, const BlockVector& x);

/// sqrt(sum_{l,j} eps_j beta_{l,j}^2); 0 for the all-false mask.
double aggregate_lipschitz(const Mat& beta, const ActivationMask& mask);

/// Block l of the result is update_l where mask_l = 1, x_l otherwise.
BlockVector masked_axpy(const BlockVector& x, const ActivationMask& mask,
                        const BlockVector& update);

Regularizer zero_regularizer();

} // namespace flexbc
