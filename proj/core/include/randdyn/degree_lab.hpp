#pragma once

// Degree growth of random compositions: closed-form and Monte Carlo dynamical
// degrees, the subadditive (infimum) estimator for rational maps, CLT
// statistics, and the doubling-block non-convergence construction.

#include <cstdint>
#include <string>
#include <vector>

#include "randdyn/random_model.hpp"

namespace randdyn {

struct DeltaEstimate {
    enum class Method { ClosedForm, BirkhoffMc, KingmanMc, ExactInf };
    double point_estimate = 0.0;
    double std_error = 0.0; // closed forms carry 0
    Method method = Method::ClosedForm;
    long n_used = 0;
    long trials_used = 0;
};

const char* to_string(DeltaEstimate::Method m);

// exp(E_1[log deg]) for morphism families: the nu-weighted geometric mean of
// the degrees. Throws MathError("NotAMorphismFamily") when the spec contains a
// certified non-morphism or a map of unknown status that was not user-asserted.
DeltaEstimate dyndeg_morphism(const MeasureSpec& spec, const MapSet& set);

// Per trial, the n-step average of log deg of the drawn maps; delta-method
// error bars on the exponentiated mean.
DeltaEstimate dyndeg_birkhoff_mc(const MeasureSpec& spec, const MapSet& set, long n,
                                 long trials, std::uint64_t seed);

struct KingmanLevel {
    int n = 0;
    double value = 0.0;     // estimate of E_n[log deg gamma_n] / n
    double std_error = 0.0; // 0 for exact enumeration
    bool exact = false;
    long trials = 0;
};

struct KingmanResult {
    DeltaEstimate delta; // exp of the minimum level value
    std::vector<KingmanLevel> table;
    std::vector<std::string> term_cap_failures; // words whose composition blew the cap
};

struct KingmanOptions {
    std::size_t exact_word_budget = 4096; // enumerate exactly when |S|^n fits
    std::size_t term_cap = kDefaultTermCap;
};

// Exact composed degrees (symbolic composition with cancellation) drive the
// per-level estimates of E_n/n; the dynamical degree is exp of the minimum.
KingmanResult dyndeg_kingman_mc(const MeasureSpec& spec, const MapSet& set,
                                const std::vector<int>& n_list, long trials,
                                std::uint64_t seed, const KingmanOptions& opts = {});

struct CltSample {
    long n = 0;
    std::vector<double> z_values;
    double sigma = 0.0;
    double ks_distance = 0.0;
};

// Z_n = sqrt(n)/sigma (log deg(gamma_n)^{1/n} - log delta) per trial, plus the
// KS distance of the sample to the standard normal. Throws
// MathError("ZeroVariance") when all degrees coincide.
CltSample clt_sample(const MeasureSpec& spec, const MapSet& set, long n, long trials,
                     std::uint64_t seed);

// Blocks of lengths 1, 2, 4, ..., 2^{k-1}, alternating a and b starting with a.
Word doubling_block_word(int k, const std::string& label_a, const std::string& label_b);

struct DoublingBlockDegree {
    Int e1; // occurrences of the first map
    Int e2; // occurrences of the second
    Int total_length; // 2^k - 1
    // deg(gamma)^{1/(2^k-1)} for morphisms of degrees d1, d2.
    double root_value(int d1, int d2) const;
};

// Exact occurrence counting by geometric series; no composition involved.
DoublingBlockDegree doubling_block_degree(int k);

// The closed-form exponent pair ((2/3)2^k - 1/3, (1/3)2^k - 2/3) (swapped for
// even k) reported alongside the exact counts; the two disagree at even k,
// where the closed form is not even integral. Both are surfaced, neither is
// silently corrected.
std::pair<double, double> doubling_block_closed_form(int k);

} // namespace randdyn
