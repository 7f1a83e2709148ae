#include "heatcast/series.hpp"

#include "heatcast/io.hpp"
#include "heatcast/time.hpp"

#include <algorithm>
#include <string>

namespace heatcast {

std::string_view to_string(SeriesKind kind) {
    switch (kind) {
    case SeriesKind::Accumulated: return "accumulated";
    case SeriesKind::Rate: return "rate";
    case SeriesKind::Temperature: return "temperature";
    }
    return "?";
}

SeriesKind parse_series_kind(std::string_view text) {
    if (text == "accumulated") return SeriesKind::Accumulated;
    if (text == "rate") return SeriesKind::Rate;
    if (text == "temperature") return SeriesKind::Temperature;
    throw ConfigError("unknown series kind '" + std::string(text) + "'");
}

HourlySeries::HourlySeries(Timestamp start, SeriesKind kind, VectorXd values)
    : start_(start), kind_(kind), values_(std::move(values)) {
    if (values_.size() < 1) throw DataError("hourly series must hold at least one sample");
    if (!values_.allFinite()) throw DataError("hourly series holds non-finite values");
}

HourlySeries HourlySeries::slice(Index offset, Index length) const {
    if (offset < 0 || length < 1 || offset + length > size())
        throw DataError("slice [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                        ") outside series of length " + std::to_string(size()));
    return HourlySeries(time_at(offset), kind_, values_.segment(offset, length));
}

HourlySeries parse_series_csv(std::istream& in, SeriesKind kind) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (!trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw ParseError("empty input: missing header");
    {
        auto header = trim(line);
        if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
        if (header != "timestamp,value")
            throw ParseError("expected header 'timestamp,value', got '" + std::string(header) + "'", row);
    }

    std::vector<double> values;
    Timestamp start{}, previous{};
    while (std::getline(in, line)) {
        ++row;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
            throw ParseError("malformed row '" + std::string(text) + "'", row);
        const auto ts = parse_timestamp(trim(text.substr(0, comma)));
        if (!ts) throw ParseError("malformed or non hour-aligned timestamp '" +
                                      std::string(trim(text.substr(0, comma))) + "'", row);
        double value = 0;
        if (!parse_double(text.substr(comma + 1), value))
            throw ParseError("malformed value '" + std::string(trim(text.substr(comma + 1))) + "'", row);
        if (kind == SeriesKind::Rate && value < 0)
            throw ParseError("negative value in rate series", row);

        if (values.empty()) {
            start = *ts;
        } else {
            const auto expected = previous + std::chrono::hours{1};
            if (*ts == previous) throw ParseError("duplicate timestamp " + format_timestamp(*ts), row);
            if (*ts < previous)
                throw ParseError("timestamps not ascending at " + format_timestamp(*ts), row);
            if (*ts != expected)
                throw ParseError("gap in hours: missing " + format_timestamp(expected), row);
        }
        previous = *ts;
        values.push_back(value);
    }
    if (values.empty()) throw ParseError("empty input: no data rows");
    return HourlySeries(start, kind, Eigen::Map<const VectorXd>(values.data(), Index(values.size())));
}

void write_series_csv(std::ostream& out, const HourlySeries& series) {
    out << "timestamp,value\n";
    for (Index i = 0; i < series.size(); ++i)
        out << format_timestamp(series.time_at(i)) << ',' << format_double(series.values()[i]) << '\n';
}

HourlySeries clean_and_differentiate(const HourlySeries& accumulated) {
    const auto& acc = accumulated.values();
    if (acc.size() < 2) throw DataError("differencing needs at least 2 accumulated samples");
    const Index n = acc.size() - 1;
    VectorXd rate = (acc.tail(n) - acc.head(n)).cwiseMax(0.0);
    return HourlySeries(accumulated.start(), SeriesKind::Rate, std::move(rate));
}

HourlySeries aggregate_zone(std::span<const HourlySeries> meters) {
    if (meters.empty()) throw DataError("zone aggregation needs at least one meter");
    VectorXd total = meters.front().values();
    for (const auto& m : meters.subspan(1)) {
        if (m.start() != meters.front().start() || m.size() != total.size())
            throw DataError("meter series are misaligned: start " + format_timestamp(m.start()) +
                            " length " + std::to_string(m.size()) + " vs start " +
                            format_timestamp(meters.front().start()) + " length " +
                            std::to_string(total.size()));
        total += m.values();
    }
    return HourlySeries(meters.front().start(), SeriesKind::Rate, std::move(total));
}

std::vector<HourlySeries> align_series(std::span<const HourlySeries> series) {
    if (series.empty()) return {};
    Timestamp lo = series.front().start(), hi = series.front().end();
    for (const auto& s : series) {
        lo = std::max(lo, s.start());
        hi = std::min(hi, s.end());
    }
    if (hi <= lo) throw DataError("series share no common time range");
    std::vector<HourlySeries> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(s.slice((lo - s.start()).count(), (hi - lo).count()));
    return out;
}

HourlySeries trim_to_whole_days(const HourlySeries& series) {
    const Timestamp first_midnight =
        is_midnight(series.start()) ? series.start() : Timestamp{date_of(series.start()) + std::chrono::days{1}};
    const Index offset = (first_midnight - series.start()).count();
    const Index days = (series.size() - offset) / 24;
    if (offset >= series.size() || days < 1) throw DataError("series holds no complete day");
    return series.slice(offset, days * 24);
}

HourlySeries scale_series(const HourlySeries& series, const Scaler<double>& scaler) {
    return HourlySeries(series.start(), series.kind(), scaler.transform(series.values()));
}

SplitSegments split_dataset(std::span<const HourlySeries> series, const SplitSpec& spec) {
    if (spec.train_days < 1 || spec.val_days < 1 || spec.test_days < 1)
        throw ConfigError("split days must all be positive");
    if (series.empty()) throw DataError("nothing to split");
    for (const auto& s : series)
        if (s.start() != series.front().start() || s.size() != series.front().size())
            throw DataError("series to split are not aligned");
    const Index available_days = series.front().size() / 24;
    if (spec.total_days() > available_days)
        throw DataError("insufficient data: split needs " + std::to_string(spec.total_days()) +
                        " days, " + std::to_string(available_days) + " available");

    SplitSegments out;
    const Index train_h = Index(spec.train_days) * 24;
    const Index val_h = Index(spec.val_days) * 24;
    const Index test_h = Index(spec.test_days) * 24;
    for (const auto& s : series) {
        out.train.push_back(s.slice(0, train_h));
        out.val.push_back(s.slice(train_h, val_h));
        out.test.push_back(s.slice(train_h + val_h, test_h));
    }
    return out;
}

}  // namespace heatcast
