#pragma once

#include "heatcast/nn/model.hpp"

#include <cmath>

namespace heatcast::nn {

struct AdamSettings {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamSettings from(const ModelConfig& cfg) {
        return {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
    }
};

/// One bias-corrected Adam update of a single tensor; `step` is the 1-based step count.
template <typename P, typename G, typename M, typename V>
void adam_update(Eigen::MatrixBase<P>& param, const Eigen::MatrixBase<G>& grad, Eigen::MatrixBase<M>& m,
                 Eigen::MatrixBase<V>& v, long step, const AdamSettings& s) {
    using Scalar = typename P::Scalar;
    if (param.rows() != grad.rows() || param.cols() != grad.cols() || m.rows() != grad.rows() ||
        m.cols() != grad.cols() || v.rows() != grad.rows() || v.cols() != grad.cols())
        throw DataError("adam: parameter, gradient and moment shapes differ");
    const Scalar b1 = Scalar(s.beta1), b2 = Scalar(s.beta2);
    m = b1 * m + (Scalar(1) - b1) * grad;
    v = b2 * v + (Scalar(1) - b2) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - Scalar(std::pow(s.beta1, double(step)));
    const Scalar c2 = Scalar(1) - Scalar(std::pow(s.beta2, double(step)));
    param.array() -= Scalar(s.learning_rate) * (m.array() / c1) / ((v.array() / c2).sqrt() + Scalar(s.eps));
}

template <typename Scalar>
struct AdamState {
    Parameters<Scalar> m;
    Parameters<Scalar> v;
    long t = 0;

    static AdamState fresh(const ModelConfig& cfg) { return {Parameters<Scalar>::zeros(cfg), Parameters<Scalar>::zeros(cfg), 0}; }
};

/// Applies one Adam step to every parameter tensor and advances the step counter.
template <typename Scalar>
void adam_step(Parameters<Scalar>& params, const Parameters<Scalar>& grads, AdamState<Scalar>& state,
               const AdamSettings& settings) {
    if (grads.conv_kernels.size() != params.conv_kernels.size() ||
        grads.dense_weights.size() != params.dense_weights.size() ||
        state.m.conv_kernels.size() != params.conv_kernels.size() ||
        state.m.dense_weights.size() != params.dense_weights.size())
        throw DataError("adam: parameter, gradient and moment sets differ in layer count");
    ++state.t;
    for (std::size_t l = 0; l < params.conv_kernels.size(); ++l) {
        adam_update(params.conv_kernels[l], grads.conv_kernels[l], state.m.conv_kernels[l], state.v.conv_kernels[l],
                    state.t, settings);
        adam_update(params.conv_biases[l], grads.conv_biases[l], state.m.conv_biases[l], state.v.conv_biases[l],
                    state.t, settings);
    }
    for (std::size_t l = 0; l < params.dense_weights.size(); ++l) {
        adam_update(params.dense_weights[l], grads.dense_weights[l], state.m.dense_weights[l],
                    state.v.dense_weights[l], state.t, settings);
        adam_update(params.dense_biases[l], grads.dense_biases[l], state.m.dense_biases[l], state.v.dense_biases[l],
                    state.t, settings);
    }
}

}  // namespace heatcast::nn
