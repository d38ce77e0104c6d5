#include "wavelet.hpp"

#include <cmath>

namespace flexbc {

namespace {

void check_side(const Mat& u, Index divisor, const char* who) {
    if (u.rows() != u.cols()) throw DimensionError(std::string(who) + ": image must be square");
    if (u.rows() < divisor || u.rows() % divisor != 0)
        throw DimensionError(std::string(who) + ": side must be divisible by " +
                             std::to_string(divisor));
}

Vec vectorize(const Mat& m) { return Vec(Eigen::Map<const Vec>(m.data(), m.size())); }

Mat devectorize(const Eigen::Ref<const Vec>& v, Index rows, Index cols) {
    return Mat(Eigen::Map<const Mat>(v.data(), rows, cols));
}

} // namespace

WaveletCoeffs haar_analyze(const Mat& u) {
    check_side(u, 2, "haar_analyze");
    const Index h = u.rows() / 2;
    WaveletCoeffs c{Mat(h, h), Mat(h, h), Mat(h, h), Mat(h, h)};
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < h; ++j) {
            const double p00 = u(2 * i, 2 * j);
            const double p01 = u(2 * i, 2 * j + 1);
            const double p10 = u(2 * i + 1, 2 * j);
            const double p11 = u(2 * i + 1, 2 * j + 1);
            c.approx(i, j) = 0.5 * (p00 + p01 + p10 + p11);
            c.d1(i, j) = 0.5 * (p00 - p01 + p10 - p11);
            c.d2(i, j) = 0.5 * (p00 + p01 - p10 - p11);
            c.d3(i, j) = 0.5 * (p00 - p01 - p10 + p11);
        }
    }
    return c;
}

Mat haar_synthesize(const WaveletCoeffs& c) {
    const Index h = c.approx.rows();
    if (c.approx.cols() != h || c.d1.rows() != h || c.d1.cols() != h || c.d2.rows() != h ||
        c.d2.cols() != h || c.d3.rows() != h || c.d3.cols() != h)
        throw DimensionError("haar_synthesize: coefficient shapes disagree");
    Mat u(2 * h, 2 * h);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < h; ++j) {
            const double a = c.approx(i, j);
            const double d1 = c.d1(i, j);
            const double d2 = c.d2(i, j);
            const double d3 = c.d3(i, j);
            u(2 * i, 2 * j) = 0.5 * (a + d1 + d2 + d3);
            u(2 * i, 2 * j + 1) = 0.5 * (a - d1 + d2 - d3);
            u(2 * i + 1, 2 * j) = 0.5 * (a + d1 - d2 - d3);
            u(2 * i + 1, 2 * j + 1) = 0.5 * (a - d1 - d2 + d3);
        }
    }
    return u;
}

Mat build_toeplitz_qmf(Index side) {
    if (side < 2 || side % 2 != 0)
        throw DimensionError("build_toeplitz_qmf: side must be even and >= 2");
    const double q = 1.0 / std::sqrt(2.0);
    Mat r = Mat::Zero(side / 2, side);
    for (Index i = 0; i < side / 2; ++i) {
        r(i, 2 * i) = q;
        r(i, 2 * i + 1) = q;
    }
    return r;
}

TwoLevelCoeffs two_level_analyze(const Mat& u) {
    check_side(u, 4, "two_level_analyze");
    const WaveletCoeffs l1 = haar_analyze(u);
    const WaveletCoeffs l2 = haar_analyze(l1.approx);
    return TwoLevelCoeffs{l2.approx, l2.d1, l2.d2, l2.d3, l1.d1, l1.d2, l1.d3};
}

Mat two_level_synthesize(const TwoLevelCoeffs& c) {
    const Mat a1 = haar_synthesize(WaveletCoeffs{c.approx, c.c2_d1, c.c2_d2, c.c2_d3});
    return haar_synthesize(WaveletCoeffs{a1, c.c1_d1, c.c1_d2, c.c1_d3});
}

BlockLayout coeff_layout(Index side, DetailGrouping grouping) {
    if (side < 4 || side % 4 != 0)
        throw DimensionError("coeff_layout: side must be divisible by 4");
    const Index n2 = (side / 4) * (side / 4);
    const Index n1 = (side / 2) * (side / 2);
    if (grouping == DetailGrouping::per_orientation)
        return BlockLayout({n2, n2 + n1, n2 + n1, n2 + n1});
    return BlockLayout({n2, 3 * (n2 + n1)});
}

BlockVector coeffs_to_blocks(const TwoLevelCoeffs& c, DetailGrouping grouping) {
    const Index side = 2 * c.c1_d1.rows();
    BlockVector x(coeff_layout(side, grouping));
    x.block(0) = vectorize(c.approx);
    const Index n2 = c.approx.size();
    const Index n1 = c.c1_d1.size();
    const Mat* l2[3] = {&c.c2_d1, &c.c2_d2, &c.c2_d3};
    const Mat* l1[3] = {&c.c1_d1, &c.c1_d2, &c.c1_d3};
    if (grouping == DetailGrouping::per_orientation) {
        for (Index o = 0; o < 3; ++o) {
            auto b = x.block(o + 1);
            b.segment(0, n2) = vectorize(*l2[o]);
            b.segment(n2, n1) = vectorize(*l1[o]);
        }
    } else {
        auto b = x.block(1);
        for (Index o = 0; o < 3; ++o) {
            b.segment(o * (n2 + n1), n2) = vectorize(*l2[o]);
            b.segment(o * (n2 + n1) + n2, n1) = vectorize(*l1[o]);
        }
    }
    return x;
}

TwoLevelCoeffs blocks_to_coeffs(const BlockVector& x, Index side, DetailGrouping grouping) {
    if (!(x.layout() == coeff_layout(side, grouping)))
        throw DimensionError("blocks_to_coeffs: layout mismatch");
    const Index h2 = side / 4;
    const Index h1 = side / 2;
    const Index n2 = h2 * h2;
    const Index n1 = h1 * h1;
    TwoLevelCoeffs c;
    c.approx = devectorize(x.block(0), h2, h2);
    Mat* l2[3] = {&c.c2_d1, &c.c2_d2, &c.c2_d3};
    Mat* l1[3] = {&c.c1_d1, &c.c1_d2, &c.c1_d3};
    if (grouping == DetailGrouping::per_orientation) {
        for (Index o = 0; o < 3; ++o) {
            auto b = x.block(o + 1);
            *l2[o] = devectorize(b.segment(0, n2), h2, h2);
            *l1[o] = devectorize(b.segment(n2, n1), h1, h1);
        }
    } else {
        auto b = x.block(1);
        for (Index o = 0; o < 3; ++o) {
            *l2[o] = devectorize(b.segment(o * (n2 + n1), n2), h2, h2);
            *l1[o] = devectorize(b.segment(o * (n2 + n1) + n2, n1), h1, h1);
        }
    }
    return c;
}

BlockVector analyze_to_blocks(const Mat& u, DetailGrouping grouping) {
    return coeffs_to_blocks(two_level_analyze(u), grouping);
}

Mat synthesize_from_blocks(const BlockVector& x, Index side, DetailGrouping grouping) {
    return two_level_synthesize(blocks_to_coeffs(x, side, grouping));
}

} // namespace flexbc
