#include "blockspace.hpp"

#include <cmath>
#include <utility>

namespace flexbc {

BlockLayout::BlockLayout(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("BlockLayout: need at least one block");
    offsets_.reserve(dims_.size());
    for (Index d : dims_) {
        if (d < 1) throw DimensionError("BlockLayout: block dimension must be >= 1");
        offsets_.push_back(total_);
        total_ += d;
    }
}

BlockVector::BlockVector(BlockLayout layout, Vec data)
    : layout_(std::move(layout)), data_(std::move(data)) {
    if (data_.size() != layout_.total())
        throw DimensionError("BlockVector: data length does not match layout");
}

void Problem::check() const {
    const Index blocks = layout.blocks();
    if (static_cast<Index>(regs.size()) != blocks)
        throw DimensionError("Problem: one regularizer per block required");
    if (weights.size() != blocks)
        throw DimensionError("Problem: one weight per block required");
    if ((weights.array() <= 0.0).any())
        throw ConfigError("Problem: weights must be positive");
    if (f.beta.rows() != blocks || f.beta.cols() != blocks)
        throw DimensionError("Problem: beta must be L x L");
    if (!f.beta.allFinite() || (f.beta.array() < 0.0).any())
        throw ConfigError("Problem: beta entries must be finite and nonnegative");
}

double objective(const Problem& problem, const BlockVector& x) {
    if (!(x.layout() == problem.layout))
        throw DimensionError("objective: layout mismatch");
    double value = problem.f.eval(x);
    for (Index l = 0; l < problem.layout.blocks(); ++l)
        value += problem.weights[l] * problem.regs[static_cast<std::size_t>(l)].eval(x.block(l));
    return value;
}

double aggregate_lipschitz(const Mat& beta, const ActivationMask& mask) {
    if (static_cast<Index>(mask.size()) != beta.cols())
        throw DimensionError("aggregate_lipschitz: mask length must match beta columns");
    double sum = 0.0;
    for (Index j = 0; j < beta.cols(); ++j) {
        if (!mask[static_cast<std::size_t>(j)]) continue;
        sum += beta.col(j).squaredNorm();
    }
    return std::sqrt(sum);
}

BlockVector masked_axpy(const BlockVector& x, const ActivationMask& mask,
                        const BlockVector& update) {
    if (!(x.layout() == update.layout()))
        throw DimensionError("masked_axpy: layout mismatch");
    if (static_cast<Index>(mask.size()) != x.blocks())
        throw DimensionError("masked_axpy: mask length mismatch");
    BlockVector out = x;
    for (Index l = 0; l < x.blocks(); ++l)
        if (mask[static_cast<std::size_t>(l)]) out.block(l) = update.block(l);
    return out;
}

Regularizer zero_regularizer() {
    Regularizer r;
    r.eval = [](const Vec&) { return 0.0; };
    r.prox = [](const Vec& v, double) { return v; };
    r.is_convex = true;
    return r;
}

} // namespace flexbc
