#pragma once

#include "blockspace.hpp"

namespace flexbc {

/// One-level orthonormal 2-D Haar coefficients. d1/d2/d3 are the
/// horizontal/vertical/diagonal detail groups.
struct WaveletCoeffs {
    Mat approx;
    Mat d1, d2, d3;
};

WaveletCoeffs haar_analyze(const Mat& u);
Mat haar_synthesize(const WaveletCoeffs& c);

/// Strided Toeplitz form of the approximation projection: (side/2) x side
/// matrix with rows (..., 1/sqrt2, 1/sqrt2, ...) at stride 2. R * R^T = I and
/// R U R^T equals the approx channel of one Haar level.
Mat build_toeplitz_qmf(Index side);

/// Two-level decomposition: haar_analyze recursed on the approx channel.
struct TwoLevelCoeffs {
    Mat approx;        // deepest approximation, (side/4)^2
    Mat c2_d1, c2_d2, c2_d3; // level-2 details, (side/4)^2 each
    Mat c1_d1, c1_d2, c1_d3; // level-1 details, (side/2)^2 each
};

TwoLevelCoeffs two_level_analyze(const Mat& u);
Mat two_level_synthesize(const TwoLevelCoeffs& c);

/// Block conventions for the coefficient vector.
///   per_orientation: 4 blocks — approx, then one block per orientation
///                    holding that orientation's details at both levels.
///   single_detail:   2 blocks — approx, then all details together.
enum class DetailGrouping { per_orientation, single_detail };

BlockLayout coeff_layout(Index side, DetailGrouping grouping);
BlockVector coeffs_to_blocks(const TwoLevelCoeffs& c, DetailGrouping grouping);
TwoLevelCoeffs blocks_to_coeffs(const BlockVector& x, Index side, DetailGrouping grouping);

/// Full analysis / synthesis between pixel space and the block vector.
BlockVector analyze_to_blocks(const Mat& u, DetailGrouping grouping);
Mat synthesize_from_blocks(const BlockVector& x, Index side, DetailGrouping grouping);

} // namespace flexbc
