#include "blur.hpp"

#include <cmath>
#include <random>

#include "wavelet.hpp"

namespace flexbc {

namespace {

Index reflect_index(Index i, Index n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

Mat convolution_matrix(Index side, const Vec& kernel, SeparableBlur::Boundary boundary) {
    const Index taps = kernel.size();
    const Index half = taps / 2;
    Mat a = Mat::Zero(side, side);
    for (Index i = 0; i < side; ++i) {
        for (Index t = -half; t <= half; ++t) {
            Index j = i + t;
            if (boundary == SeparableBlur::Boundary::periodic)
                j = ((j % side) + side) % side;
            else
                j = reflect_index(j, side);
            a(i, j) += kernel[t + half];
        }
    }
    return a;
}

void check_image(const SeparableBlur& b, const Mat& u, const char* who) {
    if (u.rows() != b.side() || u.cols() != b.side())
        throw DimensionError(std::string(who) + ": image shape does not match operator");
}

} // namespace

Vec gaussian_kernel(Index taps, double stddev) {
    if (taps < 1 || taps % 2 == 0)
        throw ConfigError("gaussian_kernel: taps must be odd and >= 1");
    if (!(stddev > 0.0) && taps > 1)
        throw ConfigError("gaussian_kernel: stddev must be positive");
    Vec k(taps);
    const Index half = taps / 2;
    for (Index t = -half; t <= half; ++t)
        k[t + half] = taps == 1 ? 1.0
                                : std::exp(-0.5 * static_cast<double>(t * t) / (stddev * stddev));
    return k / k.sum();
}

SeparableBlur make_separable_blur(Index side, const Vec& kernel,
                                  SeparableBlur::Boundary boundary) {
    if (side < 1) throw ConfigError("make_separable_blur: side must be >= 1");
    if (kernel.size() % 2 == 0) throw ConfigError("make_separable_blur: kernel length must be odd");
    if ((kernel.array() < 0.0).any()) throw ConfigError("make_separable_blur: kernel must be nonnegative");
    SeparableBlur b;
    b.kernel = kernel;
    b.boundary = boundary;
    b.A_c = convolution_matrix(side, kernel, boundary);
    b.A_r = b.A_c;
    return b;
}

SeparableBlur make_gaussian_blur(Index side, Index taps, double stddev,
                                 SeparableBlur::Boundary boundary) {
    return make_separable_blur(side, gaussian_kernel(taps, stddev), boundary);
}

SeparableBlur make_delta_blur(Index side) {
    return make_separable_blur(side, Vec::Ones(1), SeparableBlur::Boundary::periodic);
}

Mat apply_blur(const SeparableBlur& b, const Mat& u) {
    check_image(b, u, "apply_blur");
    return b.A_c * u * b.A_r.transpose();
}

Mat adjoint_blur(const SeparableBlur& b, const Mat& u) {
    check_image(b, u, "adjoint_blur");
    return b.A_c.transpose() * u * b.A_r;
}

Mat degrade(const Mat& u, const SeparableBlur& b, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ConfigError("degrade: sigma must be >= 0");
    Mat z = apply_blur(b, u);
    if (sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma);
        for (Index j = 0; j < z.cols(); ++j)
            for (Index i = 0; i < z.rows(); ++i) z(i, j) += noise(rng);
    }
    return z;
}

double operator_norm_AtA(const SeparableBlur& b, double rel_tol, Index max_iters) {
    std::mt19937_64 rng(20240517u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat v(b.side(), b.side());
    for (Index j = 0; j < v.cols(); ++j)
        for (Index i = 0; i < v.rows(); ++i) v(i, j) = gauss(rng);
    v /= v.norm();
    double lambda = 0.0;
    for (Index it = 0; it < max_iters; ++it) {
        Mat w = adjoint_blur(b, apply_blur(b, v));
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        if (it > 0 && std::abs(next - lambda) <= rel_tol * next) return next;
        lambda = next;
    }
    return lambda;
}

CoarseOperatorCache build_coarse_cache(const SeparableBlur& b, const Mat& z, Index levels) {
    if (levels < 1) throw ConfigError("build_coarse_cache: levels must be >= 1");
    const Index side = b.side();
    if (z.rows() != side || z.cols() != side)
        throw DimensionError("build_coarse_cache: data shape mismatch");

    Mat r = build_toeplitz_qmf(side);
    for (Index l = 1; l < levels; ++l) r = build_toeplitz_qmf(r.rows()) * r;

    CoarseOperatorCache cache;
    cache.side = side;
    cache.coarse = r.rows();
    cache.M_c = r * b.A_c.transpose() * b.A_c * r.transpose();
    cache.M_r = r * b.A_r.transpose() * b.A_r * r.transpose();
    cache.data = (r * b.A_c.transpose() * r.transpose()) * (r * z * r.transpose()) *
                 (r * b.A_r * r.transpose());

    const auto nh = static_cast<std::uint64_t>(cache.coarse);
    const auto n = static_cast<std::uint64_t>(side);
    cache.fast_madds = 2 * nh * nh * nh;
    // Full route: prolong a, blur, adjoint blur, restrict (the data term is
    // a-independent on both routes and excluded from both counts).
    cache.full_madds = (n * nh * nh + n * n * nh) + 2 * n * n * n + 2 * n * n * n +
                       (n * n * nh + n * nh * nh);
    return cache;
}

Mat coarse_gradient_fast(const CoarseOperatorCache& cache, const Mat& a) {
    if (a.rows() != cache.coarse || a.cols() != cache.coarse)
        throw DimensionError("coarse_gradient_fast: stale cache (dimension mismatch)");
    return cache.M_c * a * cache.M_r.transpose() - cache.data;
}

} // namespace flexbc
