#include "imaging.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "prox.hpp"

namespace flexbc {

Problem build_problem(const SeparableBlur& blur, const Mat& z, double lambda_a,
                      double lambda_d, double eps_logsum, DetailGrouping grouping) {
    const Index side = blur.side();
    if (z.rows() != side || z.cols() != side)
        throw DimensionError("build_problem: data shape does not match blur operator");
    if (!(lambda_a > 0.0) || !(lambda_d > 0.0) || !(eps_logsum > 0.0))
        throw ConfigError("build_problem: lambda_a, lambda_d, eps must be positive");

    BlockLayout layout = coeff_layout(side, grouping);
    const Index blocks = layout.blocks();

    SmoothTerm f;
    f.eval = [&blur, z, side, grouping](const BlockVector& x) {
        const Mat u = synthesize_from_blocks(x, side, grouping);
        return 0.5 * (apply_blur(blur, u) - z).squaredNorm();
    };
    f.block_grad_multi = [&blur, z, side, grouping](const BlockVector& x,
                                                    const ActivationMask& mask) {
        const Mat u = synthesize_from_blocks(x, side, grouping);
        const Mat residual = apply_blur(blur, u) - z;
        const BlockVector g = analyze_to_blocks(adjoint_blur(blur, residual), grouping);
        std::vector<Vec> out(mask.size());
        for (std::size_t l = 0; l < mask.size(); ++l)
            if (mask[l]) out[l] = g.block(static_cast<Index>(l));
        return out;
    };
    f.block_grad = [multi = f.block_grad_multi, blocks](const BlockVector& x, Index l) {
        ActivationMask mask(static_cast<std::size_t>(blocks), 0);
        mask[static_cast<std::size_t>(l)] = 1;
        return multi(x, mask)[static_cast<std::size_t>(l)];
    };
    f.beta = SmoothTerm::broadcast_beta(blocks, operator_norm_AtA(blur));

    Problem problem{std::move(layout), std::move(f),
                    std::vector<Regularizer>(static_cast<std::size_t>(blocks),
                                             log_sum_regularizer(eps_logsum)),
                    Vec::Constant(blocks, lambda_d)};
    problem.weights[0] = lambda_a;
    problem.check();
    return problem;
}

double psnr(const Mat& u, const Mat& ref) {
    if (u.rows() != ref.rows() || u.cols() != ref.cols())
        throw DimensionError("psnr: shape mismatch");
    const double mse = (u - ref).squaredNorm() / static_cast<double>(u.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

Mat phantom(Index side) {
    if (side < 4) throw ConfigError("phantom: side must be >= 4");
    Mat u(side, side);
    const double s = static_cast<double>(side);
    for (Index i = 0; i < side; ++i) {
        for (Index j = 0; j < side; ++j) {
            const double y = static_cast<double>(i) / s;
            const double x = static_cast<double>(j) / s;
            double v = 0.15 + 0.25 * (x + y) / 2.0;
            if (x > 0.15 && x < 0.45 && y > 0.2 && y < 0.7) v = 0.85;
            const double dx = x - 0.7;
            const double dy = y - 0.35;
            if (dx * dx + dy * dy < 0.03) v = 0.55;
            v += 0.1 * std::exp(-((x - 0.65) * (x - 0.65) + (y - 0.75) * (y - 0.75)) / 0.01);
            u(i, j) = std::min(1.0, std::max(0.0, v));
        }
    }
    return u;
}

Mat read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_pgm: cannot open " + path);

    auto next_token = [&in, &path]() {
        std::string tok;
        while (true) {
            int c = in.get();
            if (c == EOF) throw ConfigError("read_pgm: truncated header in " + path);
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
    };

    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5") throw ConfigError("read_pgm: not a PGM file: " + path);
    const Index width = std::stol(next_token());
    const Index height = std::stol(next_token());
    const long maxval = std::stol(next_token());
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
        throw ConfigError("read_pgm: bad dimensions or maxval in " + path);

    Mat img(height, width);
    if (magic == "P2") {
        for (Index i = 0; i < height; ++i)
            for (Index j = 0; j < width; ++j)
                img(i, j) = std::stod(next_token()) / static_cast<double>(maxval);
    } else {
        // The single whitespace after maxval was already consumed.
        const int bytes = maxval > 255 ? 2 : 1;
        for (Index i = 0; i < height; ++i) {
            for (Index j = 0; j < width; ++j) {
                int hi = in.get();
                long value = hi;
                if (bytes == 2) {
                    int lo = in.get();
                    if (lo == EOF) throw ConfigError("read_pgm: truncated data in " + path);
                    value = (hi << 8) | lo;
                }
                if (hi == EOF) throw ConfigError("read_pgm: truncated data in " + path);
                img(i, j) = static_cast<double>(value) / static_cast<double>(maxval);
            }
        }
    }
    return img;
}

void write_pgm(const std::string& path, const Mat& image, int bits, bool raw) {
    if (bits != 8 && bits != 16) throw ConfigError("write_pgm: bits must be 8 or 16");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_pgm: cannot open " + path);
    const long maxval = bits == 8 ? 255 : 65535;
    out << (raw ? "P5" : "P2") << '\n' << image.cols() << ' ' << image.rows() << '\n'
        << maxval << '\n';
    for (Index i = 0; i < image.rows(); ++i) {
        for (Index j = 0; j < image.cols(); ++j) {
            const double clamped = std::min(1.0, std::max(0.0, image(i, j)));
            const long v = std::lround(clamped * static_cast<double>(maxval));
            if (raw) {
                if (bits == 16) out.put(static_cast<char>((v >> 8) & 0xff));
                out.put(static_cast<char>(v & 0xff));
            } else {
                out << v << (j + 1 == image.cols() ? '\n' : ' ');
            }
        }
    }
}

CompareResult matched_cost_compare(const Problem& problem,
                                   const std::vector<CompareVariant>& variants,
                                   const SolverConfig& config, const BlockVector& x0) {
    if (variants.empty()) throw ConfigError("matched_cost_compare: empty variant list");
    CompareResult result;
    for (const auto& variant : variants) {
        RunResult r = run(problem, variant.schedule, variant.policy, config, x0);
        result.names.push_back(variant.name);
        result.traces.push_back(std::move(r.trace));
        result.finals.push_back(std::move(r.x));
    }
    return result;
}

double objective_at_cost(const SolverTrace& trace, double cost) {
    double value = trace.psi0;
    for (const auto& c : trace.cycles) {
        if (c.cost > cost) break;
        value = c.psi;
    }
    return value;
}

} // namespace flexbc
