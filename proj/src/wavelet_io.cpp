#include "heatcast/io.hpp"
#include "heatcast/wavelet.hpp"

#include <cmath>
#include <string>

namespace heatcast {

std::string_view to_string(Boundary b) { return b == Boundary::Reflect ? "reflect" : "zeropad"; }

Boundary parse_boundary(std::string_view text) {
    if (text == "reflect") return Boundary::Reflect;
    if (text == "zeropad") return Boundary::ZeroPad;
    throw ConfigError("unknown boundary mode '" + std::string(text) + "' (expected reflect|zeropad)");
}

void write_scalogram_csv(std::ostream& out, const Scalogram<double>& s) {
    for (Index i = 0; i < s.scales(); ++i) {
        for (Index b = 0; b < s.length(); ++b) {
            if (b) out << ',';
            out << format_double(s.coefficients(i, b));
        }
        out << '\n';
    }
}

void write_scalogram_pgm(std::ostream& out, const Scalogram<double>& s) {
    const double lo = s.coefficients.minCoeff();
    const double hi = s.coefficients.maxCoeff();
    out << "P5\n" << s.length() << ' ' << s.scales() << "\n255\n";
    for (Index i = 0; i < s.scales(); ++i) {
        for (Index b = 0; b < s.length(); ++b) {
            const double v = hi > lo ? (s.coefficients(i, b) - lo) / (hi - lo) : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
}

}  // namespace heatcast
