#pragma once

// Rational projective points in canonical form: coprime integer coordinates,
// first nonzero coordinate positive.

#include <string>
#include <vector>

#include "randdyn/bigint.hpp"

namespace randdyn {

class ProjPoint {
public:
    // Clears denominators, divides by the gcd and fixes the sign.
    // Throws MathError("ZeroPoint") for the all-zero tuple.
    explicit ProjPoint(std::vector<Int> raw);
    explicit ProjPoint(const std::vector<Rat>& raw);
    ProjPoint(std::initializer_list<Int> raw) : ProjPoint(std::vector<Int>(raw)) {}

    int n_coords() const { return static_cast<int>(coords_.size()); }
    int dimension() const { return n_coords() - 1; }
    const std::vector<Int>& coords() const { return coords_; }

    // Largest coordinate bit length; the memory guard for orbit iteration.
    std::size_t max_bits() const;

    bool operator==(const ProjPoint& o) const { return coords_ == o.coords_; }
    std::string to_string() const;

private:
    std::vector<Int> coords_;
};

struct ProjPointHash {
    std::size_t operator()(const ProjPoint& p) const {
        std::size_t h = p.coords().size();
        for (const auto& c : p.coords()) h = hash_combine(h, hash_int(c));
        return h;
    }
};

// Same normalization, spelled as the operation on raw rational tuples.
ProjPoint normalize(const std::vector<Rat>& raw);

// "[a : b : ...]" with integer or rational entries; for dimension 1 a bare
// rational t is accepted as the affine point [t : 1].
ProjPoint parse_point(const std::string& text, int dimension);

} // namespace randdyn
