#include "spikeforge/units.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>

namespace spikeforge {

double parse_si(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty numeric value");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || errno == ERANGE)
        throw std::invalid_argument("bad numeric value: '" + text + "'");
    std::string suffix(end);
    if (suffix.empty()) return v;
    if (suffix.size() > 1) {
        // tolerate unit tails like "100nA" or "1fF"
        suffix = suffix.substr(0, 1);
    }
    switch (suffix[0]) {
        case 'a': return v * 1e-18;
        case 'f': return v * 1e-15;
        case 'p': return v * 1e-12;
        case 'n': return v * 1e-9;
        case 'u': return v * 1e-6;
        case 'm': return v * 1e-3;
        case 'k': return v * 1e3;
        case 'M': return v * 1e6;
        case 'G': return v * 1e9;
        case 'T': return v * 1e12;
        default:
            throw std::invalid_argument("unknown SI suffix in '" + text + "'");
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    // try increasing precision until the value round-trips
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace spikeforge
