#pragma once

#include "heatcast/core.hpp"

#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace heatcast {

enum class SeriesKind { Accumulated, Rate, Temperature };

std::string_view to_string(SeriesKind kind);
SeriesKind parse_series_kind(std::string_view text);

/// Contiguous hourly samples starting at an hour-aligned UTC instant. Values must be finite;
/// the sign of rate readings is checked where they are parsed.
class HourlySeries {
public:
    HourlySeries(Timestamp start, SeriesKind kind, VectorXd values);

    Timestamp start() const noexcept { return start_; }
    Timestamp end() const noexcept { return start_ + std::chrono::hours{size()}; }  // exclusive
    Timestamp time_at(Index i) const noexcept { return start_ + std::chrono::hours{i}; }
    SeriesKind kind() const noexcept { return kind_; }
    Index size() const noexcept { return values_.size(); }
    const VectorXd& values() const noexcept { return values_; }

    /// Sub-series [offset, offset + length).
    HourlySeries slice(Index offset, Index length) const;

private:
    Timestamp start_;
    SeriesKind kind_;
    VectorXd values_;
};

/// Reads `timestamp,value` CSV. Rows must be hour-aligned, ascending and gap-free.
HourlySeries parse_series_csv(std::istream& in, SeriesKind kind);
void write_series_csv(std::ostream& out, const HourlySeries& series);

/// First-order difference of an accumulated meter reading, negative rates clamped to zero.
/// Sample i of the result is the consumption during hour i of the input.
HourlySeries clean_and_differentiate(const HourlySeries& accumulated);

/// Pointwise sum of aligned meter rate series.
HourlySeries aggregate_zone(std::span<const HourlySeries> meters);

/// Restricts every series to their common time range.
std::vector<HourlySeries> align_series(std::span<const HourlySeries> series);

/// Drops leading hours up to the first midnight and trailing hours of an incomplete day.
HourlySeries trim_to_whole_days(const HourlySeries& series);

/// Min-max scaler onto [0, 1]. A degenerate range maps everything to 0.
template <typename Scalar>
struct Scaler {
    Scalar min = 0;
    Scalar max = 1;

    template <typename Derived>
    static Scaler fit(const Eigen::MatrixBase<Derived>& values) {
        if (values.size() == 0) throw DataError("scaler fit on empty input");
        return {values.minCoeff(), values.maxCoeff()};
    }

    Scalar range() const noexcept { return max - min; }

    template <typename Derived>
    typename Derived::PlainObject transform(const Eigen::MatrixBase<Derived>& values) const {
        if (range() == Scalar(0)) return Derived::PlainObject::Zero(values.rows(), values.cols());
        return ((values.array() - min) / range()).matrix();
    }

    template <typename Derived>
    typename Derived::PlainObject inverse(const Eigen::MatrixBase<Derived>& values) const {
        if (range() == Scalar(0))
            return Derived::PlainObject::Constant(values.rows(), values.cols(), min);
        return (values.array() * range() + min).matrix();
    }

    Scalar transform(Scalar v) const { return range() == Scalar(0) ? Scalar(0) : (v - min) / range(); }
    Scalar inverse(Scalar v) const { return range() == Scalar(0) ? min : v * range() + min; }

    friend bool operator==(const Scaler&, const Scaler&) = default;
};

inline Scaler<double> scaler_fit(const HourlySeries& series) {
    return Scaler<double>::fit(series.values());
}

/// Scaled copy of a series; the kind is preserved. Values outside the fitted range map outside [0, 1].
HourlySeries scale_series(const HourlySeries& series, const Scaler<double>& scaler);

struct SplitSpec {
    int train_days = 730;
    int val_days = 180;
    int test_days = 180;

    int total_days() const noexcept { return train_days + val_days + test_days; }
};

/// Chronological train/val/test segments, each holding one slice per input series.
struct SplitSegments {
    std::vector<HourlySeries> train;
    std::vector<HourlySeries> val;
    std::vector<HourlySeries> test;
};

/// Splits aligned series into consecutive day blocks starting at the first sample.
SplitSegments split_dataset(std::span<const HourlySeries> series, const SplitSpec& spec);

}  // namespace heatcast
