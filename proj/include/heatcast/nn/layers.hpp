#pragma once

#include "heatcast/core.hpp"
#include "heatcast/tensor3.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace heatcast::nn {

enum class Activation { ReLU, LeakyReLU };

/// Elementwise activation; `slope` only affects LeakyReLU.
template <typename Derived>
typename Derived::PlainObject activation(const Eigen::MatrixBase<Derived>& x, Activation mode,
                                         typename Derived::Scalar slope = 0.01) {
    using S = typename Derived::Scalar;
    if (mode == Activation::ReLU) return x.cwiseMax(S(0));
    return (x.array() >= S(0)).select(x.array(), slope * x.array()).matrix();
}

/// Derivative of `activation` with respect to its input, evaluated at x. ReLU'(0) = 0, LeakyReLU'(0) = 1.
template <typename Derived>
typename Derived::PlainObject activation_grad(const Eigen::MatrixBase<Derived>& x, Activation mode,
                                              typename Derived::Scalar slope = 0.01) {
    using S = typename Derived::Scalar;
    using Plain = typename Derived::PlainObject;
    if (mode == Activation::ReLU)
        return (x.array() > S(0)).select(Plain::Ones(x.rows(), x.cols()).array(), S(0)).matrix();
    return (x.array() >= S(0)).select(Plain::Ones(x.rows(), x.cols()).array(), slope).matrix();
}

/// y = W x + b, applied column by column when x holds several samples.
template <typename W, typename X, typename B>
Matrix<typename W::Scalar> dense_forward(const Eigen::MatrixBase<W>& weights, const Eigen::MatrixBase<X>& x,
                                         const Eigen::MatrixBase<B>& bias) {
    if (weights.cols() != x.rows() || weights.rows() != bias.size())
        throw DataError("dense layer shape mismatch: weights " + std::to_string(weights.rows()) + "x" +
                        std::to_string(weights.cols()) + ", input " + std::to_string(x.rows()) +
                        ", bias " + std::to_string(bias.size()));
    Matrix<typename W::Scalar> y = weights * x;
    y.colwise() += bias;
    return y;
}

/// Inverted-dropout mask: 0 with probability `rate`, 1/(1 - rate) otherwise.
template <typename Scalar, typename Rng>
Matrix<Scalar> dropout_mask(Index rows, Index cols, Scalar rate, Rng& rng) {
    if (!(rate >= 0) || !(rate < 1)) throw ConfigError("dropout rate must lie in [0, 1)");
    if (rate == Scalar(0)) return Matrix<Scalar>::Ones(rows, cols);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const Scalar keep = Scalar(1) / (Scalar(1) - rate);
    Matrix<Scalar> mask(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) mask(i, j) = uniform(rng) < double(rate) ? Scalar(0) : keep;
    return mask;
}

template <typename Derived, typename Rng>
typename Derived::PlainObject dropout_forward(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar rate,
                                              bool training, Rng& rng) {
    using S = typename Derived::Scalar;
    if (!(rate >= 0) || !(rate < 1)) throw ConfigError("dropout rate must lie in [0, 1)");
    if (!training || rate == S(0)) return x;
    return x.cwiseProduct(dropout_mask<S>(x.rows(), x.cols(), rate, rng));
}

/// Patch matrix for a stride-1 'same' convolution with zero fill.
/// `act` is channels x (rows*cols*batch), sample-major then row-major in each plane.
/// Row c*k*k + dr*k + dc of the result holds input channel c shifted by (dr - k/2, dc - k/2).
template <typename Scalar>
void im2col(const RowMatrix<Scalar>& act, Index rows, Index cols, Index k, RowMatrix<Scalar>& out) {
    const Index plane = rows * cols;
    const Index batch = act.cols() / plane;
    const Index pad = k / 2;
    out.setZero(act.rows() * k * k, act.cols());
    for (Index c = 0; c < act.rows(); ++c) {
        const Scalar* src = act.row(c).data();
        for (Index dr = 0; dr < k; ++dr) {
            for (Index dc = 0; dc < k; ++dc) {
                Scalar* dst = out.row((c * k + dr) * k + dc).data();
                const Index c_lo = std::max<Index>(0, pad - dc);
                const Index c_hi = std::min<Index>(cols, cols + pad - dc);
                for (Index b = 0; b < batch; ++b) {
                    for (Index r = 0; r < rows; ++r) {
                        const Index sr = r + dr - pad;
                        if (sr < 0 || sr >= rows) continue;
                        const Index from = b * plane + sr * cols + dc - pad;
                        Scalar* d = dst + b * plane + r * cols;
                        for (Index x = c_lo; x < c_hi; ++x) d[x] = src[from + x];
                    }
                }
            }
        }
    }
}

template <typename Scalar>
RowMatrix<Scalar> im2col(const RowMatrix<Scalar>& act, Index rows, Index cols, Index k) {
    RowMatrix<Scalar> out;
    im2col(act, rows, cols, k, out);
    return out;
}

/// Adjoint of im2col: scatters patch gradients back onto the input planes.
template <typename Scalar>
RowMatrix<Scalar> col2im(const RowMatrix<Scalar>& patches, Index channels, Index rows, Index cols, Index k) {
    const Index plane = rows * cols;
    const Index batch = patches.cols() / plane;
    const Index pad = k / 2;
    RowMatrix<Scalar> out = RowMatrix<Scalar>::Zero(channels, patches.cols());
    for (Index c = 0; c < channels; ++c) {
        Scalar* dst = out.row(c).data();
        for (Index dr = 0; dr < k; ++dr) {
            for (Index dc = 0; dc < k; ++dc) {
                const Scalar* src = patches.row((c * k + dr) * k + dc).data();
                const Index c_lo = std::max<Index>(0, pad - dc);
                const Index c_hi = std::min<Index>(cols, cols + pad - dc);
                for (Index b = 0; b < batch; ++b) {
                    for (Index r = 0; r < rows; ++r) {
                        const Index sr = r + dr - pad;
                        if (sr < 0 || sr >= rows) continue;
                        const Index to = b * plane + sr * cols + dc - pad;
                        const Scalar* s = src + b * plane + r * cols;
                        for (Index x = c_lo; x < c_hi; ++x) dst[to + x] += s[x];
                    }
                }
            }
        }
    }
    return out;
}

/// Stride-1 'same' convolution (cross-correlation) of one sample, no activation.
/// `kernels` is out x (in*k*k) with columns ordered (in, dr, dc).
template <typename Scalar>
Tensor3<Scalar> conv2d_forward(const Tensor3<Scalar>& input, const Matrix<Scalar>& kernels,
                               const Vector<Scalar>& bias, Index kernel_size) {
    if (kernel_size < 1 || kernel_size % 2 == 0) throw ConfigError("kernel size must be odd");
    if (kernels.cols() != input.channels * kernel_size * kernel_size || kernels.rows() != bias.size())
        throw DataError("conv layer shape mismatch: kernels " + std::to_string(kernels.rows()) + "x" +
                        std::to_string(kernels.cols()) + " for " + std::to_string(input.channels) +
                        " input channels");
    Tensor3<Scalar> out(kernels.rows(), input.rows, input.cols);
    out.data.noalias() = kernels * im2col(input.data, input.rows, input.cols, kernel_size);
    out.data.colwise() += bias;
    return out;
}

}  // namespace heatcast::nn
