#pragma once

// The weighted family (S, nu) and the i.i.d. sequence space: seeded
// reproducible sampling, the shift, and exact or series expectations of
// log-degree statistics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randdyn/maps.hpp"

namespace randdyn {

// Position-addressable stream of draws for one trial. The k-th draw of trial t
// is a pure function of (master_seed, t, k); shifting by m is just starting at
// position m.
class SequenceStream {
public:
    SequenceStream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t position = 0)
        : seed_(master_seed), trial_(trial), position_(position) {}

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t trial() const { return trial_; }
    std::uint64_t position() const { return position_; }

    SequenceStream shifted(std::uint64_t m) const {
        return SequenceStream(seed_, trial_, position_ + m);
    }
    void advance() { ++position_; }

    // Raw 64-bit block for the current position; `refinement` indexes extra
    // blocks when one draw needs more than 64 bits of randomness.
    std::uint64_t raw(std::uint64_t refinement) const;

private:
    std::uint64_t seed_;
    std::uint64_t trial_;
    std::uint64_t position_;
};

// One draw from the measure: either an index into the finite map list or the
// degree d of the built-in parametric family.
struct MapDraw {
    std::string label;
    int finite_index = -1; // >= 0 for finite specs
    int family_degree = 0; // >= 2 for family specs
};

class MeasureSpec {
public:
    // Finite measure over labelled maps; weights must be positive rationals
    // summing exactly to 1.
    static MeasureSpec finite(std::vector<std::pair<std::string, Rat>> weights);
    // Built-in countable family {x^d + c : d >= 2} with nu(x^d+c) = 1/(e (d-2)!).
    static MeasureSpec power_plus_c(Rat c);

    bool is_finite() const { return family_ == Family::None; }
    const std::vector<std::pair<std::string, Rat>>& weights() const { return weights_; }
    const Rat& family_c() const { return c_; }
    std::string describe() const;

private:
    enum class Family { None, PowerPlusC };
    Family family_ = Family::None;
    std::vector<std::pair<std::string, Rat>> weights_;
    Rat c_;
};

// The x^d + c map on the line with exact rational c.
RationalMap make_power_map(int d, const Rat& c);

// Draw one map, advancing the stream by one position. Finite measures are
// sampled exactly (the dyadic draw interval is refined until it no longer
// straddles a cumulative weight); the family is sampled by exact inverse CDF
// against certified rational bounds on e.
MapDraw sample_map(const MeasureSpec& spec, SequenceStream& stream);

// Resolve a draw against the named maps (finite) or build x^d + c (family).
RationalMap materialize(const MeasureSpec& spec, const MapSet& set, const MapDraw& draw);

int draw_degree(const MeasureSpec& spec, const MapSet& set, const MapDraw& draw);

// E_1[log deg phi]. Finite: exact weighted sum. Family: series with a
// factorial tail bound below 1e-10.
double expectation_log_deg(const MeasureSpec& spec, const MapSet& set);

// Var_1[log deg phi], same evaluation strategy.
double variance_log_deg(const MeasureSpec& spec, const MapSet& set);

struct ExactExpectationOptions {
    std::size_t word_budget = 4096; // |S|^n must stay within this
    std::size_t term_cap = kDefaultTermCap;
};

// E_n[log deg gamma_n] by full enumeration of all |S|^n words with exact
// symbolic composition. n = 0 gives 0 (the identity word).
double exact_expectation_n(const MeasureSpec& spec, const MapSet& set, int n,
                           const ExactExpectationOptions& opts = {});

// Validation used by the config layer: weights positive, summing to exactly 1,
// labels resolvable, degrees >= 1.
void validate_measure(const MeasureSpec& spec, const MapSet& set);

} // namespace randdyn
