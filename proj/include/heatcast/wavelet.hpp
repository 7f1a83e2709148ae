#pragma once

#include "heatcast/core.hpp"
#include "heatcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string_view>
#include <vector>

namespace heatcast {

enum class Boundary { Reflect, ZeroPad };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

template <typename Scalar>
struct WaveletConfig {
    Vector<Scalar> scale_grid;
    Boundary boundary = Boundary::Reflect;
    Scalar support_radius_factor = Scalar(4);

    /// Integer scales 1..count.
    static WaveletConfig with_scales(int count, Boundary boundary = Boundary::Reflect) {
        if (count < 1) throw ConfigError("scale count must be at least 1");
        WaveletConfig cfg;
        cfg.scale_grid = Vector<Scalar>::LinSpaced(count, Scalar(1), Scalar(count));
        cfg.boundary = boundary;
        return cfg;
    }

    Index scales() const noexcept { return scale_grid.size(); }

    void validate() const {
        if (scale_grid.size() < 1) throw ConfigError("wavelet scale grid is empty");
        for (Index i = 0; i < scale_grid.size(); ++i) {
            if (!(scale_grid[i] > 0)) throw ConfigError("wavelet scales must be positive");
            if (i > 0 && !(scale_grid[i] > scale_grid[i - 1]))
                throw ConfigError("wavelet scale grid must be strictly increasing");
        }
        if (!(support_radius_factor > 0)) throw ConfigError("support radius factor must be positive");
    }
};

/// Mexican-hat (Ricker) mother wavelet, unit L2 norm.
template <typename Scalar>
Scalar ricker(Scalar t) {
    using std::exp;
    using std::pow;
    using std::sqrt;
    const Scalar norm = Scalar(2) / (sqrt(Scalar(3)) * pow(std::numbers::pi_v<Scalar>, Scalar(0.25)));
    const Scalar t2 = t * t;
    return norm * (Scalar(1) - t2) * exp(-t2 / Scalar(2));
}

template <typename Scalar>
Index support_radius(Scalar scale, Scalar factor) {
    using std::ceil;
    return static_cast<Index>(ceil(factor * scale));
}

/// Samples (1/sqrt(a)) psi(k/a) for k in [-R, R], R = ceil(factor * a), then removes the
/// sample mean so the kernel sums to zero. Element R is the centre tap.
template <typename Scalar>
Vector<Scalar> discretize_wavelet(Scalar scale, const WaveletConfig<Scalar>& cfg) {
    using std::sqrt;
    if (!(scale > 0)) throw ConfigError("wavelet scale must be positive");
    const Index radius = support_radius(scale, cfg.support_radius_factor);
    Vector<Scalar> kernel(2 * radius + 1);
    const Scalar amplitude = Scalar(1) / sqrt(scale);
    for (Index k = -radius; k <= radius; ++k)
        kernel[k + radius] = amplitude * ricker(Scalar(k) / scale);
    kernel.array() -= kernel.mean();
    return kernel;
}

/// Maps an out-of-range sample index onto the window, or -1 when it reads as zero.
inline Index boundary_index(Index m, Index length, Boundary boundary) {
    if (m >= 0 && m < length) return m;
    if (boundary == Boundary::ZeroPad) return -1;
    if (length == 1) return 0;
    const Index period = 2 * (length - 1);
    Index r = m % period;
    if (r < 0) r += period;
    return r < length ? r : period - r;
}

template <typename Scalar>
struct Scalogram {
    Matrix<Scalar> coefficients;  // scales x time
    Vector<Scalar> scale_grid;
    SeriesKind source_kind = SeriesKind::Rate;

    Index scales() const noexcept { return coefficients.rows(); }
    Index length() const noexcept { return coefficients.cols(); }
};

/// Precomputed kernels for one configuration; immutable after construction.
template <typename Scalar>
class CwtPlan {
public:
    explicit CwtPlan(WaveletConfig<Scalar> cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        kernels_.reserve(std::size_t(cfg_.scales()));
        for (Index i = 0; i < cfg_.scales(); ++i) {
            kernels_.push_back(discretize_wavelet(cfg_.scale_grid[i], cfg_));
            max_radius_ = std::max(max_radius_, (kernels_.back().size() - 1) / 2);
        }
    }

    const WaveletConfig<Scalar>& config() const noexcept { return cfg_; }
    const Vector<Scalar>& kernel(Index scale_index) const { return kernels_[std::size_t(scale_index)]; }

    /// Coefficients (scales x h) written into `out`.
    template <typename Derived>
    void apply(const Eigen::MatrixBase<Derived>& window, Matrix<Scalar>& out) const {
        const Index h = window.size();
        if (!window.allFinite()) throw DataError("cwt input holds non-finite values");
        Vector<Scalar> padded(h + 2 * max_radius_);
        for (Index j = 0; j < padded.size(); ++j) {
            const Index m = boundary_index(j - max_radius_, h, cfg_.boundary);
            padded[j] = m < 0 ? Scalar(0) : window(m);
        }
        out.resize(cfg_.scales(), h);
        for (Index i = 0; i < cfg_.scales(); ++i) {
            const auto& k = kernels_[std::size_t(i)];
            const Index radius = (k.size() - 1) / 2;
            for (Index b = 0; b < h; ++b)
                out(i, b) = k.dot(padded.segment(max_radius_ - radius + b, k.size()));
        }
    }

    template <typename Derived>
    Scalogram<Scalar> operator()(const Eigen::MatrixBase<Derived>& window,
                                 SeriesKind kind = SeriesKind::Rate) const {
        Scalogram<Scalar> s{Matrix<Scalar>(), cfg_.scale_grid, kind};
        apply(window, s.coefficients);
        return s;
    }

private:
    WaveletConfig<Scalar> cfg_;
    std::vector<Vector<Scalar>> kernels_;
    Index max_radius_ = 0;
};

template <typename Derived>
Scalogram<typename Derived::Scalar> cwt(const Eigen::MatrixBase<Derived>& window,
                                        const WaveletConfig<typename Derived::Scalar>& cfg,
                                        SeriesKind kind = SeriesKind::Rate) {
    return CwtPlan<typename Derived::Scalar>(cfg)(window, kind);
}

/// Plain CSV: one row per scale, one column per time step.
void write_scalogram_csv(std::ostream& out, const Scalogram<double>& s);

/// Binary 8-bit PGM (P5), min-max normalised over the image; rows are scales.
void write_scalogram_pgm(std::ostream& out, const Scalogram<double>& s);

}  // namespace heatcast
