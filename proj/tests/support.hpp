#pragma once

#include "heatcast/nn/model.hpp"
#include "heatcast/tensor_assembly.hpp"
#include "heatcast/wavelet.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace heatcast::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("heatcast_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Downsized network used by the gradient and overfit checks.
inline nn::ModelConfig tiny_config() {
    nn::ModelConfig cfg;
    cfg.rows = 4;
    cfg.cols = 4;
    cfg.output_size = 4;
    cfg.conv_widths = {2, 3, 4};
    cfg.dense_widths = {8, 4};
    cfg.batch_size = 4;
    return cfg;
}

inline Tensor3<double> random_tensor(std::mt19937_64& rng, Index c, Index r, Index k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Tensor3<double> t(c, r, k);
    for (Index i = 0; i < t.data.size(); ++i) t.data.data()[i] = u(rng);
    return t;
}

inline VectorXd random_vector(std::mt19937_64& rng, Index n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

/// Random inputs and targets for the toy capacity checks.
inline std::vector<Example> toy_examples(const nn::ModelConfig& cfg, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Example> out;
    for (int i = 0; i < count; ++i) {
        Example ex;
        ex.input.channels = random_tensor(rng, cfg.input_channels, cfg.rows, cfg.cols);
        ex.input.window_start = Timestamp{std::chrono::hours{24 * i}};
        ex.target = random_vector(rng, cfg.output_size, 0.0, 1.0);
        out.push_back(std::move(ex));
    }
    return out;
}

/// Reference Mexican hat written out term by term.
inline double reference_ricker(double t) {
    const double pi = 3.14159265358979323846;
    return 2.0 / (std::sqrt(3.0) * std::pow(pi, 0.25)) * (1.0 - t * t) * std::exp(-0.5 * t * t);
}

/// Mirror an index into [0, h) by repeated folding at the edges (no repeated edge sample).
inline Index reference_reflect(Index m, Index h) {
    if (h == 1) return 0;
    while (m < 0 || m >= h) {
        if (m < 0) m = -m;
        if (m >= h) m = 2 * (h - 1) - m;
    }
    return m;
}

/// Naive triple-loop continuous wavelet transform at integer-or-real scales.
inline MatrixXd reference_cwt(const VectorXd& x, const VectorXd& scales, Boundary boundary, double factor = 4.0) {
    const Index h = x.size();
    MatrixXd out = MatrixXd::Zero(scales.size(), h);
    for (Index i = 0; i < scales.size(); ++i) {
        const double a = scales[i];
        const Index radius = Index(std::ceil(factor * a));
        std::vector<double> taps;
        double mean = 0;
        for (Index k = -radius; k <= radius; ++k) {
            taps.push_back(reference_ricker(double(k) / a) / std::sqrt(a));
            mean += taps.back();
        }
        mean /= double(taps.size());
        for (Index b = 0; b < h; ++b) {
            double acc = 0;
            for (Index k = -radius; k <= radius; ++k) {
                const Index m = b + k;
                double v = 0;
                if (m >= 0 && m < h) v = x[m];
                else if (boundary == Boundary::Reflect) v = x[reference_reflect(m, h)];
                acc += (taps[std::size_t(k + radius)] - mean) * v;
            }
            out(i, b) = acc;
        }
    }
    return out;
}

struct GradientCheck {
    double max_relative_error = 0;
    Index parameters = 0;
};

/// Compares backward() against central differences of the batch loss for every parameter, with the
/// dropout mask held fixed. Relative error is |analytic - numeric| / (|numeric| + 1e-8).
inline GradientCheck check_gradients(const nn::ModelConfig& cfg, std::uint64_t seed, Index batch = 3,
                                     double step = 1e-4) {
    std::mt19937_64 rng(seed);
    auto params = nn::Parameters<double>::glorot(cfg, rng);
    // Non-zero biases so no unit sits exactly on a kink.
    params.for_each([&](auto& t) {
        if (t.cols() == 1) t = random_vector(rng, t.rows(), -0.1, 0.1);
    });
    std::vector<Tensor3<double>> inputs;
    for (Index b = 0; b < batch; ++b) inputs.push_back(random_tensor(rng, cfg.input_channels, cfg.rows, cfg.cols));
    std::vector<const Tensor3<double>*> ptrs;
    for (const auto& t : inputs) ptrs.push_back(&t);
    const RowMatrix<double> packed = nn::pack_batch<double>(ptrs, cfg);
    MatrixXd targets(cfg.output_size, batch);
    for (Index b = 0; b < batch; ++b) targets.col(b) = random_vector(rng, cfg.output_size);
    const MatrixXd mask = nn::dropout_mask<double>(cfg.dense_widths.back(), batch, cfg.dropout_rate, rng);

    auto loss = [&](const nn::Parameters<double>& p) {
        const MatrixXd out = nn::forward_batch<double, std::mt19937_64>(p, cfg, packed, true, nullptr, nullptr, &mask);
        return nn::mse_loss(out, targets);
    };
    nn::ForwardCache<double> cache;
    nn::forward_batch<double, std::mt19937_64>(params, cfg, packed, true, nullptr, &cache, &mask);
    auto grads = nn::backward(params, cfg, cache, targets);

    GradientCheck result;
    auto probe = params;
    zip(probe, grads, [&](auto& tensor, const auto& analytic) {
        for (Index i = 0; i < tensor.size(); ++i) {
            const double saved = tensor.data()[i];
            tensor.data()[i] = saved + step;
            const double up = loss(probe);
            tensor.data()[i] = saved - step;
            const double down = loss(probe);
            tensor.data()[i] = saved;
            const double numeric = (up - down) / (2 * step);
            const double err = std::abs(analytic.data()[i] - numeric) / (std::abs(numeric) + 1e-8);
            result.max_relative_error = std::max(result.max_relative_error, err);
            ++result.parameters;
        }
    });
    return result;
}

}  // namespace heatcast::test
