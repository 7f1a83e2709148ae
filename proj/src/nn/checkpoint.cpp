#include "heatcast/nn/checkpoint.hpp"

#include "heatcast/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

namespace heatcast::nn {
namespace {

constexpr std::string_view kMagic = "HEATCKPT";

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::string_view take(std::size_t n) {
        if (n > bytes_.size() - pos_) throw CheckpointError(CheckpointError::Kind::Corrupt, "checkpoint is truncated");
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint64_t u64() {
        const auto s = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[std::size_t(i)]);
        return v;
    }
    std::uint32_t u32() {
        const auto s = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[std::size_t(i)]);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::string join(const std::vector<Index>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

[[noreturn]] void corrupt(const std::string& what) {
    throw CheckpointError(CheckpointError::Kind::Corrupt, "corrupt checkpoint: " + what);
}

Index to_index(const std::string& text) {
    Index v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) corrupt("bad integer '" + text + "'");
    return v;
}

double to_double(const std::string& text) {
    double v = 0;
    if (!parse_double(text, v)) corrupt("bad number '" + text + "'");
    return v;
}

std::vector<Index> to_index_list(const std::string& text) {
    std::vector<Index> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        out.push_back(to_index(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::map<std::string, std::string> header_for(const Checkpoint& ckpt) {
    const auto& m = ckpt.model;
    const auto& c = m.config;
    std::map<std::string, std::string> h;
    h["config.input_channels"] = std::to_string(c.input_channels);
    h["config.rows"] = std::to_string(c.rows);
    h["config.cols"] = std::to_string(c.cols);
    h["config.conv_widths"] = join(c.conv_widths);
    h["config.kernel_size"] = std::to_string(c.kernel_size);
    h["config.dense_widths"] = join(c.dense_widths);
    h["config.output_size"] = std::to_string(c.output_size);
    h["config.leaky_slope"] = format_double(c.leaky_slope);
    h["config.dropout_rate"] = format_double(c.dropout_rate);
    h["config.learning_rate"] = format_double(c.learning_rate);
    h["config.adam_beta1"] = format_double(c.adam_beta1);
    h["config.adam_beta2"] = format_double(c.adam_beta2);
    h["config.adam_eps"] = format_double(c.adam_eps);
    h["config.batch_size"] = std::to_string(c.batch_size);
    h["config.max_epochs"] = std::to_string(c.max_epochs);
    h["config.patience"] = std::to_string(c.patience);
    h["wavelet.boundary"] = std::string(to_string(m.wavelet.boundary));
    h["wavelet.support_radius_factor"] = format_double(m.wavelet.support_radius_factor);
    std::string grid;
    for (Index i = 0; i < m.wavelet.scale_grid.size(); ++i)
        grid += (i ? "," : "") + format_double(m.wavelet.scale_grid[i]);
    h["wavelet.scale_grid"] = grid;
    h["scaler.consumption.min"] = format_double(m.consumption_scaler.min);
    h["scaler.consumption.max"] = format_double(m.consumption_scaler.max);
    h["scaler.weather.min"] = format_double(m.weather_scaler.min);
    h["scaler.weather.max"] = format_double(m.weather_scaler.max);
    std::size_t i = 0;
    m.params.for_each([&](const auto& t) {
        h["shape." + std::to_string(i++)] = std::to_string(t.rows()) + "x" + std::to_string(t.cols());
    });
    for (const auto& [k, v] : ckpt.metadata) {
        if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
            throw DataError("checkpoint metadata may not contain '=' in keys or newlines");
        h["meta." + k] = v;
    }
    return h;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    ckpt.model.params.check_shapes(ckpt.model.config);
    std::string header;
    for (const auto& [k, v] : header_for(ckpt)) header += k + "=" + v + "\n";

    std::string out(kMagic);
    put_u32(out, kCheckpointVersion);
    put_u64(out, header.size());
    out += header;
    std::uint64_t count = 0;
    ckpt.model.params.for_each([&](const auto&) { ++count; });
    put_u64(out, count);
    ckpt.model.params.for_each([&](const auto& t) {
        put_u64(out, std::uint64_t(t.rows()));
        put_u64(out, std::uint64_t(t.cols()));
        for (Index r = 0; r < t.rows(); ++r)
            for (Index c = 0; c < t.cols(); ++c) put_u64(out, std::bit_cast<std::uint64_t>(double(t(r, c))));
    });
    put_u64(out, fnv1a(out));
    return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
    Reader in(bytes);
    if (bytes.size() < kMagic.size() || in.take(kMagic.size()) != kMagic) corrupt("bad magic");
    const auto version = in.u32();
    if (version != kCheckpointVersion)
        throw CheckpointError(CheckpointError::Kind::Version, "unsupported checkpoint version " +
                                                                  std::to_string(version) + " (expected " +
                                                                  std::to_string(kCheckpointVersion) + ")");
    if (bytes.size() < kMagic.size() + 4 + 8) corrupt("too short");
    {
        const auto body = bytes.substr(0, bytes.size() - 8);
        Reader tail(bytes.substr(bytes.size() - 8));
        if (fnv1a(body) != tail.u64()) corrupt("checksum mismatch");
    }

    const auto header_len = in.u64();
    const std::string header(in.take(header_len));
    std::map<std::string, std::string> h;
    std::istringstream hs(header);
    std::string line;
    while (std::getline(hs, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) corrupt("header line without '='");
        h[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](const std::string& key) -> const std::string& {
        auto it = h.find(key);
        if (it == h.end()) corrupt("missing header field " + key);
        return it->second;
    };

    Checkpoint ckpt;
    auto& m = ckpt.model;
    auto& c = m.config;
    c.input_channels = to_index(get("config.input_channels"));
    c.rows = to_index(get("config.rows"));
    c.cols = to_index(get("config.cols"));
    c.conv_widths = to_index_list(get("config.conv_widths"));
    c.kernel_size = to_index(get("config.kernel_size"));
    c.dense_widths = to_index_list(get("config.dense_widths"));
    c.output_size = to_index(get("config.output_size"));
    c.leaky_slope = to_double(get("config.leaky_slope"));
    c.dropout_rate = to_double(get("config.dropout_rate"));
    c.learning_rate = to_double(get("config.learning_rate"));
    c.adam_beta1 = to_double(get("config.adam_beta1"));
    c.adam_beta2 = to_double(get("config.adam_beta2"));
    c.adam_eps = to_double(get("config.adam_eps"));
    c.batch_size = to_index(get("config.batch_size"));
    c.max_epochs = int(to_index(get("config.max_epochs")));
    c.patience = int(to_index(get("config.patience")));
    try {
        c.validate();
        m.wavelet.boundary = parse_boundary(get("wavelet.boundary"));
    } catch (const ConfigError& e) {
        corrupt(e.what());
    }
    m.wavelet.support_radius_factor = to_double(get("wavelet.support_radius_factor"));
    {
        std::vector<double> grid;
        const auto& text = get("wavelet.scale_grid");
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            grid.push_back(to_double(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        m.wavelet.scale_grid = Eigen::Map<const VectorXd>(grid.data(), Index(grid.size()));
    }
    m.consumption_scaler = {to_double(get("scaler.consumption.min")), to_double(get("scaler.consumption.max"))};
    m.weather_scaler = {to_double(get("scaler.weather.min")), to_double(get("scaler.weather.max"))};
    for (const auto& [k, v] : h)
        if (k.rfind("meta.", 0) == 0) ckpt.metadata[k.substr(5)] = v;

    m.params = Parameters<double>::zeros(c);
    const auto count = in.u64();
    std::uint64_t expected = 0;
    m.params.for_each([&](const auto&) { ++expected; });
    if (count != expected)
        throw CheckpointError(CheckpointError::Kind::Shape, "checkpoint holds " + std::to_string(count) +
                                                                " tensors, architecture needs " +
                                                                std::to_string(expected));
    std::size_t i = 0;
    m.params.for_each([&](auto& t) {
        const auto rows = in.u64();
        const auto cols = in.u64();
        const auto declared = get("shape." + std::to_string(i));
        if (Index(rows) != t.rows() || Index(cols) != t.cols() ||
            declared != std::to_string(rows) + "x" + std::to_string(cols))
            throw CheckpointError(CheckpointError::Kind::Shape,
                                  "tensor " + std::to_string(i) + " is " + std::to_string(rows) + "x" +
                                      std::to_string(cols) + ", architecture needs " + std::to_string(t.rows()) +
                                      "x" + std::to_string(t.cols()));
        for (Index r = 0; r < t.rows(); ++r)
            for (Index k = 0; k < t.cols(); ++k) t(r, k) = in.f64();
        ++i;
    });
    if (in.remaining() != 8) corrupt("trailing bytes after tensors");
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace heatcast::nn
