#pragma once

#include "heatcast/core.hpp"
#include "heatcast/nn/layers.hpp"
#include "heatcast/series.hpp"
#include "heatcast/tensor3.hpp"
#include "heatcast/wavelet.hpp"

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace heatcast::nn {

/// Architecture and optimisation hyperparameters.
struct ModelConfig {
    Index input_channels = 5;
    Index rows = 24;  // scales
    Index cols = 24;  // history hours
    std::vector<Index> conv_widths{32, 64, 128};
    Index kernel_size = 3;
    std::vector<Index> dense_widths{512, 128};
    Index output_size = 24;
    double leaky_slope = 0.01;
    double dropout_rate = 0.2;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    Index batch_size = 7;
    int max_epochs = 200;
    int patience = 20;

    void validate() const;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Output shapes along the forward graph.
struct ShapeChain {
    std::vector<std::array<Index, 3>> conv;  // channels, rows, cols after each conv
    Index flatten = 0;
    std::vector<Index> dense;  // widths after each fully-connected layer, output last
};

ShapeChain shape_chain(const ModelConfig& cfg);

/// Human-readable forward graph, one entry per layer, in execution order.
std::vector<std::string> describe_layers(const ModelConfig& cfg);

/// Trainable tensors. Conv kernels are out x (in*k*k); dense weights are out x in.
template <typename Scalar>
struct Parameters {
    std::vector<Matrix<Scalar>> conv_kernels;
    std::vector<Vector<Scalar>> conv_biases;
    std::vector<Matrix<Scalar>> dense_weights;
    std::vector<Vector<Scalar>> dense_biases;

    static Parameters zeros(const ModelConfig& cfg);

    /// Uniform in +-sqrt(6 / (fan_in + fan_out)); zero biases.
    template <typename Rng>
    static Parameters glorot(const ModelConfig& cfg, Rng& rng);

    /// Visits every tensor in a fixed order: conv kernels/biases layer by layer, then dense.
    template <typename F>
    void for_each(F&& f) {
        for (std::size_t l = 0; l < conv_kernels.size(); ++l) {
            f(conv_kernels[l]);
            f(conv_biases[l]);
        }
        for (std::size_t l = 0; l < dense_weights.size(); ++l) {
            f(dense_weights[l]);
            f(dense_biases[l]);
        }
    }

    template <typename F>
    void for_each(F&& f) const {
        const_cast<Parameters*>(this)->for_each([&](const auto& t) { f(t); });
    }

    /// Visits matching tensors of two parameter sets in lockstep.
    template <typename F>
    friend void zip(Parameters& a, const Parameters& b, F&& f) {
        for (std::size_t l = 0; l < a.conv_kernels.size(); ++l) {
            f(a.conv_kernels[l], b.conv_kernels[l]);
            f(a.conv_biases[l], b.conv_biases[l]);
        }
        for (std::size_t l = 0; l < a.dense_weights.size(); ++l) {
            f(a.dense_weights[l], b.dense_weights[l]);
            f(a.dense_biases[l], b.dense_biases[l]);
        }
    }

    Index count() const {
        Index n = 0;
        for_each([&](const auto& t) { n += t.size(); });
        return n;
    }

    /// Throws DataError unless every tensor matches the configured architecture.
    void check_shapes(const ModelConfig& cfg) const;

    template <typename To>
    Parameters<To> cast() const {
        Parameters<To> out;
        auto each = [](const auto& from, auto& to) {
            to.reserve(from.size());
            for (const auto& t : from) to.push_back(t.template cast<To>());
        };
        each(conv_kernels, out.conv_kernels);
        each(conv_biases, out.conv_biases);
        each(dense_weights, out.dense_weights);
        each(dense_biases, out.dense_biases);
        return out;
    }
};

/// Trained network plus the preprocessing state needed to serve forecasts.
template <typename Scalar>
struct Model {
    ModelConfig config;
    Parameters<Scalar> params;
    Scaler<double> consumption_scaler;
    Scaler<double> weather_scaler;
    WaveletConfig<double> wavelet = WaveletConfig<double>::with_scales(24);
};

/// Intermediates kept by a training-mode forward pass. Reusing one cache across batches of the
/// same size keeps its buffers allocated.
template <typename Scalar>
struct ForwardCache {
    Index batch = 0;
    std::vector<RowMatrix<Scalar>> conv_patches;  // im2col of each conv input
    std::vector<RowMatrix<Scalar>> conv_outputs;  // post-ReLU activations
    Matrix<Scalar> flat;                          // (channels*rows*cols) x batch
    std::vector<Matrix<Scalar>> dense_pre;        // hidden pre-activations
    std::vector<Matrix<Scalar>> dense_post;       // hidden post-activations
    Matrix<Scalar> dropout_mask;                  // applied to the last hidden layer
    Matrix<Scalar> output;                        // output_size x batch
};

/// Stacks samples into channels x (rows*cols*batch).
template <typename Scalar>
RowMatrix<Scalar> pack_batch(std::span<const Tensor3<Scalar>* const> inputs, const ModelConfig& cfg);

/// Runs the network over a batch. With `cache`, intermediates are stored for backward. A non-empty
/// `mask` replaces the dropout draw; otherwise a training pass draws one from `rng`.
template <typename Scalar, typename Rng>
Matrix<Scalar> forward_batch(const Parameters<Scalar>& params, const ModelConfig& cfg,
                             const RowMatrix<Scalar>& packed, bool training, Rng* rng,
                             ForwardCache<Scalar>* cache, const Matrix<Scalar>* mask = nullptr);

/// Inference-mode forward of one sample.
template <typename Scalar>
Vector<Scalar> forward(const Parameters<Scalar>& params, const ModelConfig& cfg, const Tensor3<Scalar>& input);

/// Mean over all entries of (pred - target)^2.
template <typename A, typename B>
typename A::Scalar mse_loss(const Eigen::MatrixBase<A>& pred, const Eigen::MatrixBase<B>& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols())
        throw DataError("mse: prediction and target shapes differ");
    if (pred.size() == 0) throw DataError("mse of empty vectors");
    return (pred - target).squaredNorm() / typename A::Scalar(pred.size());
}

/// Gradient of the batch MSE with respect to every parameter, given a training-mode cache.
template <typename Scalar>
Parameters<Scalar> backward(const Parameters<Scalar>& params, const ModelConfig& cfg,
                            const ForwardCache<Scalar>& cache, const Matrix<Scalar>& targets);

// ---------------------------------------------------------------------------

inline void ModelConfig::validate() const {
    if (input_channels < 1 || rows < 1 || cols < 1) throw ConfigError("input dimensions must be positive");
    if (conv_widths.size() != 3) throw ConfigError("expected exactly 3 convolution layers");
    if (dense_widths.size() != 2) throw ConfigError("expected exactly 2 hidden fully-connected layers");
    for (auto w : conv_widths)
        if (w < 1) throw ConfigError("convolution widths must be positive");
    for (auto w : dense_widths)
        if (w < 1) throw ConfigError("dense widths must be positive");
    if (kernel_size < 1 || kernel_size % 2 == 0) throw ConfigError("kernel size must be a positive odd number");
    if (output_size < 1) throw ConfigError("output size must be positive");
    if (!(dropout_rate >= 0 && dropout_rate < 1)) throw ConfigError("dropout rate must lie in [0, 1)");
    if (!(leaky_slope >= 0)) throw ConfigError("leaky slope must be non-negative");
    if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
    if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1))
        throw ConfigError("adam betas must lie in [0, 1)");
    if (!(adam_eps > 0)) throw ConfigError("adam epsilon must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (max_epochs < 1) throw ConfigError("max epochs must be positive");
    if (patience < 1) throw ConfigError("patience must be positive");
}

inline ShapeChain shape_chain(const ModelConfig& cfg) {
    ShapeChain chain;
    for (auto w : cfg.conv_widths) chain.conv.push_back({w, cfg.rows, cfg.cols});
    chain.flatten = cfg.conv_widths.back() * cfg.rows * cfg.cols;
    chain.dense = cfg.dense_widths;
    chain.dense.push_back(cfg.output_size);
    return chain;
}

inline std::vector<std::string> describe_layers(const ModelConfig& cfg) {
    std::vector<std::string> layers;
    const auto k = std::to_string(cfg.kernel_size);
    Index in = cfg.input_channels;
    for (auto w : cfg.conv_widths) {
        layers.push_back("conv" + k + "x" + k + "(" + std::to_string(in) + "->" + std::to_string(w) + ")");
        layers.push_back("relu");
        in = w;
    }
    layers.push_back("flatten");
    Index width = shape_chain(cfg).flatten;
    for (std::size_t l = 0; l < cfg.dense_widths.size(); ++l) {
        layers.push_back("dense(" + std::to_string(width) + "->" + std::to_string(cfg.dense_widths[l]) + ")");
        layers.push_back("leaky_relu");
        width = cfg.dense_widths[l];
    }
    layers.push_back("dropout");
    layers.push_back("dense(" + std::to_string(width) + "->" + std::to_string(cfg.output_size) + ")");
    return layers;
}

namespace detail {

/// (fan_in, out) dimensions of the dense layers, output last.
inline std::vector<std::array<Index, 2>> dense_dims(const ModelConfig& cfg) {
    std::vector<std::array<Index, 2>> dims;
    Index in = shape_chain(cfg).flatten;
    for (auto w : cfg.dense_widths) {
        dims.push_back({in, w});
        in = w;
    }
    dims.push_back({in, cfg.output_size});
    return dims;
}

}  // namespace detail

template <typename Scalar>
Parameters<Scalar> Parameters<Scalar>::zeros(const ModelConfig& cfg) {
    cfg.validate();
    Parameters p;
    const Index kk = cfg.kernel_size * cfg.kernel_size;
    Index in = cfg.input_channels;
    for (auto w : cfg.conv_widths) {
        p.conv_kernels.push_back(Matrix<Scalar>::Zero(w, in * kk));
        p.conv_biases.push_back(Vector<Scalar>::Zero(w));
        in = w;
    }
    for (const auto& [fan_in, out] : detail::dense_dims(cfg)) {
        p.dense_weights.push_back(Matrix<Scalar>::Zero(out, fan_in));
        p.dense_biases.push_back(Vector<Scalar>::Zero(out));
    }
    return p;
}

template <typename Scalar>
template <typename Rng>
Parameters<Scalar> Parameters<Scalar>::glorot(const ModelConfig& cfg, Rng& rng) {
    Parameters p = zeros(cfg);
    auto fill = [&](Matrix<Scalar>& m, Index fan_in, Index fan_out) {
        const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (Index j = 0; j < m.cols(); ++j)
            for (Index i = 0; i < m.rows(); ++i) m(i, j) = Scalar(dist(rng));
    };
    const Index kk = cfg.kernel_size * cfg.kernel_size;
    Index in = cfg.input_channels;
    for (std::size_t l = 0; l < cfg.conv_widths.size(); ++l) {
        fill(p.conv_kernels[l], in * kk, cfg.conv_widths[l] * kk);
        in = cfg.conv_widths[l];
    }
    const auto dims = detail::dense_dims(cfg);
    for (std::size_t l = 0; l < dims.size(); ++l) fill(p.dense_weights[l], dims[l][0], dims[l][1]);
    return p;
}

template <typename Scalar>
void Parameters<Scalar>::check_shapes(const ModelConfig& cfg) const {
    const auto expected = zeros(cfg);
    auto same = [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) return false;
        return true;
    };
    if (!same(conv_kernels, expected.conv_kernels) || !same(conv_biases, expected.conv_biases) ||
        !same(dense_weights, expected.dense_weights) || !same(dense_biases, expected.dense_biases))
        throw DataError("parameter shapes do not match the model configuration");
}

template <typename Scalar>
RowMatrix<Scalar> pack_batch(std::span<const Tensor3<Scalar>* const> inputs, const ModelConfig& cfg) {
    const Index plane = cfg.rows * cfg.cols;
    RowMatrix<Scalar> packed(cfg.input_channels, plane * Index(inputs.size()));
    for (std::size_t b = 0; b < inputs.size(); ++b) {
        const auto& t = *inputs[b];
        if (t.channels != cfg.input_channels || t.rows != cfg.rows || t.cols != cfg.cols)
            throw DataError("input shape " + std::to_string(t.channels) + "x" + std::to_string(t.rows) + "x" +
                            std::to_string(t.cols) + " does not match model input " +
                            std::to_string(cfg.input_channels) + "x" + std::to_string(cfg.rows) + "x" +
                            std::to_string(cfg.cols));
        packed.middleCols(Index(b) * plane, plane) = t.data;
    }
    return packed;
}

template <typename Scalar, typename Rng>
Matrix<Scalar> forward_batch(const Parameters<Scalar>& params, const ModelConfig& cfg,
                             const RowMatrix<Scalar>& packed, bool training, Rng* rng,
                             ForwardCache<Scalar>* cache, const Matrix<Scalar>* mask) {
    const Index plane = cfg.rows * cfg.cols;
    if (packed.rows() != cfg.input_channels || packed.cols() % plane != 0)
        throw DataError("packed batch does not match model input shape");
    const Index batch = packed.cols() / plane;
    const Scalar slope = Scalar(cfg.leaky_slope);

    const std::size_t conv_layers = params.conv_kernels.size();
    const std::size_t hidden = params.dense_weights.size() - 1;
    ForwardCache<Scalar> local;
    ForwardCache<Scalar>& c = cache ? *cache : local;
    c.batch = batch;
    c.conv_patches.resize(conv_layers);
    c.conv_outputs.resize(conv_layers);
    c.dense_pre.resize(hidden);
    c.dense_post.resize(hidden);

    for (std::size_t l = 0; l < conv_layers; ++l) {
        const RowMatrix<Scalar>& in = l == 0 ? packed : c.conv_outputs[l - 1];
        RowMatrix<Scalar>& patches = c.conv_patches[l];
        im2col(in, cfg.rows, cfg.cols, cfg.kernel_size, patches);
        RowMatrix<Scalar>& z = c.conv_outputs[l];
        z.resize(params.conv_kernels[l].rows(), patches.cols());
        z.noalias() = params.conv_kernels[l] * patches;
        z.colwise() += params.conv_biases[l];
        z = z.cwiseMax(Scalar(0));
    }
    const RowMatrix<Scalar>& act = conv_layers ? c.conv_outputs.back() : packed;

    const Index channels = act.rows();
    Matrix<Scalar>& flat = c.flat;
    flat.resize(channels * plane, batch);
    for (Index b = 0; b < batch; ++b)
        for (Index ch = 0; ch < channels; ++ch)
            flat.col(b).segment(ch * plane, plane) = act.row(ch).segment(b * plane, plane).transpose();

    Matrix<Scalar> x;
    for (std::size_t l = 0; l < hidden; ++l) {
        c.dense_pre[l] = dense_forward(params.dense_weights[l], l == 0 ? flat : c.dense_post[l - 1],
                                       params.dense_biases[l]);
        c.dense_post[l] = activation(c.dense_pre[l], Activation::LeakyReLU, slope);
    }
    x = hidden ? c.dense_post.back() : flat;

    if (training && cfg.dropout_rate > 0) {
        Matrix<Scalar> m;
        if (mask) {
            if (mask->rows() != x.rows() || mask->cols() != batch) throw DataError("dropout mask shape mismatch");
            m = *mask;
        } else {
            if (!rng) throw DataError("training pass with dropout needs a random generator");
            m = dropout_mask<Scalar>(x.rows(), batch, Scalar(cfg.dropout_rate), *rng);
        }
        x = x.cwiseProduct(m);
        c.dropout_mask = std::move(m);
    } else {
        c.dropout_mask.setOnes(x.rows(), batch);
    }

    c.output = dense_forward(params.dense_weights[hidden], x, params.dense_biases[hidden]);
    return c.output;
}

template <typename Scalar>
Vector<Scalar> forward(const Parameters<Scalar>& params, const ModelConfig& cfg, const Tensor3<Scalar>& input) {
    const Tensor3<Scalar>* one[] = {&input};
    return forward_batch<Scalar, std::mt19937_64>(params, cfg, pack_batch<Scalar>(one, cfg), false, nullptr,
                                                  nullptr)
        .col(0);
}

/// Gradient of the batch MSE with respect to every parameter, written into `grad`.
template <typename Scalar>
void backward(const Parameters<Scalar>& params, const ModelConfig& cfg, const ForwardCache<Scalar>& cache,
              const Matrix<Scalar>& targets, Parameters<Scalar>& grad) {
    if (cache.batch == 0 || cache.conv_patches.size() != params.conv_kernels.size())
        throw DataError("backward needs the cache of a training-mode forward pass");
    if (targets.rows() != cache.output.rows() || targets.cols() != cache.output.cols())
        throw DataError("target shape does not match network output");

    const Index plane = cfg.rows * cfg.cols;
    const Index batch = cache.batch;
    const Scalar slope = Scalar(cfg.leaky_slope);
    grad.conv_kernels.resize(params.conv_kernels.size());
    grad.conv_biases.resize(params.conv_biases.size());
    grad.dense_weights.resize(params.dense_weights.size());
    grad.dense_biases.resize(params.dense_biases.size());

    // d(mean squared error)/d(output)
    Matrix<Scalar> delta = (cache.output - targets) * (Scalar(2) / Scalar(cache.output.size()));

    const std::size_t hidden = params.dense_weights.size() - 1;
    for (std::size_t l = hidden + 1; l-- > 0;) {
        const Matrix<Scalar>* input = nullptr;
        Matrix<Scalar> dropped;
        if (l == hidden) {
            dropped = (hidden > 0 ? cache.dense_post[hidden - 1] : cache.flat).cwiseProduct(cache.dropout_mask);
            input = &dropped;
        } else {
            input = l > 0 ? &cache.dense_post[l - 1] : &cache.flat;
        }
        grad.dense_weights[l].noalias() = delta * input->transpose();
        grad.dense_biases[l] = delta.rowwise().sum();
        Matrix<Scalar> up = params.dense_weights[l].transpose() * delta;
        if (l == hidden) up = up.cwiseProduct(cache.dropout_mask);
        if (l > 0) delta = up.cwiseProduct(activation_grad(cache.dense_pre[l - 1], Activation::LeakyReLU, slope));
        else delta = std::move(up);
    }

    // delta is now d(loss)/d(flat); unflatten into channels x (plane*batch).
    const Index channels = params.conv_kernels.back().rows();
    RowMatrix<Scalar> dact(channels, plane * batch);
    for (Index b = 0; b < batch; ++b)
        for (Index c = 0; c < channels; ++c)
            dact.row(c).segment(b * plane, plane) = delta.col(b).segment(c * plane, plane).transpose();

    for (std::size_t l = params.conv_kernels.size(); l-- > 0;) {
        RowMatrix<Scalar> dz = (cache.conv_outputs[l].array() > Scalar(0)).select(dact.array(), Scalar(0));
        grad.conv_kernels[l].noalias() = dz * cache.conv_patches[l].transpose();
        grad.conv_biases[l] = dz.rowwise().sum();
        if (l > 0) {
            RowMatrix<Scalar> dpatches(params.conv_kernels[l].cols(), dz.cols());
            dpatches.noalias() = params.conv_kernels[l].transpose() * dz;
            dact = col2im(dpatches, cache.conv_outputs[l - 1].rows(), cfg.rows, cfg.cols, cfg.kernel_size);
        }
    }
}

template <typename Scalar>
Parameters<Scalar> backward(const Parameters<Scalar>& params, const ModelConfig& cfg,
                            const ForwardCache<Scalar>& cache, const Matrix<Scalar>& targets) {
    Parameters<Scalar> grad;
    backward(params, cfg, cache, targets, grad);
    return grad;
}

/// Forecast in original units: inference forward, inverse consumption scaling, negatives clamped to 0.
template <typename Scalar>
VectorXd predict_window(const Model<Scalar>& model, const Tensor3<Scalar>& input) {
    const Vector<Scalar> scaled = forward(model.params, model.config, input);
    return model.consumption_scaler.inverse(scaled.template cast<double>()).cwiseMax(0.0);
}

}  // namespace heatcast::nn
