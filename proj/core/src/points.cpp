#include "randdyn/points.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace randdyn {

ProjPoint::ProjPoint(std::vector<Int> raw) : coords_(std::move(raw)) {
    if (coords_.empty()) throw MathError("ZeroPoint", "empty coordinate tuple");
    Int g = 0;
    for (const auto& c : coords_) g = gcd(g, c);
    if (g == 0) throw MathError("ZeroPoint", "all coordinates are zero");
    g = abs(g);
    int sign = 0;
    for (auto& c : coords_) {
        if (g != 1) c /= g;
        if (sign == 0 && c != 0) sign = (c > 0) ? 1 : -1;
    }
    if (sign < 0)
        for (auto& c : coords_) c = -c;
}

ProjPoint::ProjPoint(const std::vector<Rat>& raw)
    : ProjPoint([&raw] {
          Int l = 1;
          for (const auto& r : raw) l = lcm(l, denominator(r));
          std::vector<Int> ints;
          ints.reserve(raw.size());
          for (const auto& r : raw) ints.push_back(numerator(r) * (l / denominator(r)));
          return ints;
      }()) {}

std::size_t ProjPoint::max_bits() const {
    std::size_t m = 0;
    for (const auto& c : coords_) m = std::max(m, bit_length(c));
    return m;
}

std::string ProjPoint::to_string() const {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i > 0) out << " : ";
        out << coords_[i].str();
    }
    out << "]";
    return out.str();
}

ProjPoint normalize(const std::vector<Rat>& raw) { return ProjPoint(raw); }

ProjPoint parse_point(const std::string& text, int dimension) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ConfigError("empty point");
    std::vector<Rat> entries;
    if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError("unterminated point: " + text);
        s = s.substr(1, s.size() - 2);
        std::size_t start = 0;
        while (true) {
            auto colon = s.find(':', start);
            entries.push_back(parse_rational(s.substr(start, colon - start)));
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
    } else {
        if (dimension != 1)
            throw ConfigError("affine point shorthand requires dimension 1");
        entries.push_back(parse_rational(s));
        entries.push_back(Rat(1));
    }
    if (static_cast<int>(entries.size()) != dimension + 1)
        throw ConfigError("point has wrong number of coordinates: " + text);
    return ProjPoint(entries);
}

} // namespace randdyn
