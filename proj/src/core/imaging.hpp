#pragma once

#include <string>

#include "blur.hpp"
#include "solver.hpp"
#include "wavelet.hpp"

namespace flexbc {

/// Synthesis-formulation deblurring problem over wavelet coefficient blocks:
/// f(x) = 0.5 |A synth(x) - z|^2, log-sum regularizers with weight lambda_a
/// on the approximation block and lambda_d on the detail blocks, scalar
/// broadcast beta = ||A* A||. The blur operator is captured by reference and
/// must outlive the returned problem.
Problem build_problem(const SeparableBlur& blur, const Mat& z, double lambda_a,
                      double lambda_d, double eps_logsum,
                      DetailGrouping grouping = DetailGrouping::per_orientation);

/// 10 log10(1 / MSE) in dB for images in [0, 1]; +inf sentinel for identical
/// inputs.
double psnr(const Mat& u, const Mat& ref);

/// Synthetic piecewise-smooth phantom in [0, 1]: gradient background with a
/// rectangle, a disk and a smooth bump.
Mat phantom(Index side);

/// PGM (P2 plain / P5 raw, 8- or 16-bit) mapped linearly to [0, 1].
Mat read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Mat& image, int bits = 8, bool raw = true);

struct CompareVariant {
    std::string name;
    Schedule schedule;
    StepPolicy policy;
};

struct CompareResult {
    std::vector<std::string> names;
    std::vector<SolverTrace> traces;
    std::vector<BlockVector> finals;
};

/// Runs each variant from the same start and records objective-vs-cost
/// curves; cost unit = one block gradient + one block prox.
CompareResult matched_cost_compare(const Problem& problem,
                                   const std::vector<CompareVariant>& variants,
                                   const SolverConfig& config, const BlockVector& x0);

/// Objective of variant `name` at cost budget c (last cycle value whose
/// cumulative cost is <= c); psi0 before any full cycle.
double objective_at_cost(const SolverTrace& trace, double cost);

} // namespace flexbc
