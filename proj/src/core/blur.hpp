#pragma once

#include <cstdint>

#include "blockspace.hpp"

namespace flexbc {

/// Separable convolution operator A = A_r (x) A_c with dense per-axis
/// matrices. A u is evaluated as A_c U A_r^T on the image matrix.
struct SeparableBlur {
    enum class Boundary { periodic, symmetric };

    Vec kernel;
    Mat A_r, A_c;
    Boundary boundary = Boundary::periodic;

    Index side() const { return A_c.rows(); }
};

/// 1-D Gaussian kernel, odd length, renormalized to sum 1.
Vec gaussian_kernel(Index taps, double stddev);

SeparableBlur make_separable_blur(Index side, const Vec& kernel,
                                  SeparableBlur::Boundary boundary);
SeparableBlur make_gaussian_blur(Index side, Index taps, double stddev,
                                 SeparableBlur::Boundary boundary = SeparableBlur::Boundary::periodic);
/// Length-1 kernel [1]: the identity operator.
SeparableBlur make_delta_blur(Index side);

Mat apply_blur(const SeparableBlur& b, const Mat& u);
Mat adjoint_blur(const SeparableBlur& b, const Mat& u);

/// z = A u + n with n iid Gaussian(0, sigma^2); seeded, reproducible.
Mat degrade(const Mat& u, const SeparableBlur& b, double sigma, std::uint64_t seed);

/// ||A* A|| by power iteration on u -> A*(A u).
double operator_norm_AtA(const SeparableBlur& b, double rel_tol = 1e-10,
                         Index max_iters = 10000);

/// Precomputed small matrices for the coarse-space data-fidelity gradient
/// Pi_V A* (A Pi_V^* a - Pi_V^* Pi_V z) evaluated entirely in coarse
/// coordinates. R is the (possibly multi-level) strided QMF matrix.
struct CoarseOperatorCache {
    Mat M_c;      // R A_c^T A_c R^T
    Mat M_r;      // R A_r^T A_r R^T
    Mat data;     // (R A_c^T R^T)(R Z R^T)(R A_r R^T), constant in a
    Index side = 0;
    Index coarse = 0;
    std::uint64_t fast_madds = 0; // multiply-adds per fast gradient
    std::uint64_t full_madds = 0; // multiply-adds of the full-space route
};

CoarseOperatorCache build_coarse_cache(const SeparableBlur& b, const Mat& z, Index levels);
Mat coarse_gradient_fast(const CoarseOperatorCache& cache, const Mat& a);

} // namespace flexbc
