#pragma once

// Orbits and their arithmetic: exact orbit iteration, arithmetic degrees,
// canonical heights with certified truncation radii, the finite-total-orbit
// decision, escape functions, the almost-surely-wandering classification, the
// exact finite-orbit probability, and height-counting censuses.
//
// Soundness of every bound-based exclusion below rests on one argument: the
// thresholds use *certified upper bounds* for the height-comparison constants,
// never the exact suprema. Over-estimating the constant only enlarges the
// retained region {h <= 2 C_S} and weakens each pruning step, so every verdict
// reached through pruning remains valid verbatim; nothing is ever excluded
// that a sharper constant would have kept.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "randdyn/heights.hpp"
#include "randdyn/random_model.hpp"

namespace randdyn {

// The measure, its supporting maps, and the certified height-control data.
struct OrbitModel {
    MeasureSpec spec;
    MapSet support;        // the maps of S, in measure order (finite specs)
    HeightControl control; // C_S, telescoping constant, min degree

    bool is_finite() const { return spec.is_finite(); }
    const RationalMap& map_of(const MapDraw& draw) const;
    RationalMap materialize_draw(const MapDraw& draw) const;
};

OrbitModel make_orbit_model(const MeasureSpec& spec, const MapSet& named_maps,
                            long fallback_samples = 1000, std::uint64_t seed = 0);

struct OrbitOptions {
    std::size_t coord_bits_cap = 1'000'000'000; // per-coordinate memory guard
    std::size_t term_cap = kDefaultTermCap;     // symbolic degree tracking
    bool track_exact_degrees = true; // symbolic composition for non-morphism sets
};

struct OrbitRecord {
    enum class Status { Running, CycleDetected, IndeterminateHit, ResourceCapped };
    ProjPoint start;
    Word word_so_far;
    std::vector<ProjPoint> points;   // points[0] = start
    std::vector<double> heights;     // heights[i] = weil_height(points[i])
    std::vector<Int> cum_degrees;    // deg(gamma_i), exact
    Status status = Status::Running;
    long cycle_start = -1;      // index of the first repeated point
    long fail_step = -1;        // step where indeterminacy or the cap hit
};

const char* to_string(OrbitRecord::Status s);

// Applies sampled maps pointwise, never symbolically, detecting revisits via
// canonical representatives.
OrbitRecord iterate_orbit(const OrbitModel& model, SequenceStream stream,
                          const ProjPoint& start, long n_max,
                          const OrbitOptions& opts = {});
// Same along a fixed word.
OrbitRecord iterate_orbit_word(const OrbitModel& model, const Word& word,
                               const ProjPoint& start, long n_max,
                               const OrbitOptions& opts = {});

struct ArithDegreeEstimate {
    std::vector<double> values; // h(gamma_n P)^{1/n} for n >= 1 (0 where h = 0)
    double final_value = 0.0;
    bool skipped_zero_heights = false;
};

// Throws MathError("DegenerateOrbit") when fewer than 3 entries have positive
// height.
ArithDegreeEstimate arithmetic_degree_estimate(const OrbitRecord& record);

struct CanonicalHeightResult {
    double value = 0.0;
    double certified_radius = 0.0;
    CertifiedConstant::Status status = CertifiedConstant::Status::Certified;
    long n_used = 0;
    Int degree_used;
};

// h(gamma_n P)/deg(gamma_n) at the first n whose telescoping tail bound
// C/((d-1) deg(gamma_n)) drops below eps.
CanonicalHeightResult canonical_height(const OrbitModel& model, SequenceStream stream,
                                       const ProjPoint& start, double eps,
                                       const OrbitOptions& opts = {});

struct ExpectedCanonicalHeight {
    double estimate = 0.0;
    double std_error = 0.0;
    long states = 0;          // interior states of the exact system (exact mode)
    long boundary_points = 0; // escaped points valued by sampled tails
};

struct ExpectedHeightOptions {
    long trials = 200;           // mc mode: sampled sequences
    long boundary_samples = 64;  // exact mode: tail samples per escaped point
    double eps = 1e-6;           // mc mode truncation radius
    double boundary_eps = 1e-4;  // exact mode boundary radius (enters the error bar)
    std::uint64_t seed = 1;
    long state_cap = 10'000;
    OrbitOptions orbit;
};

enum class ExpectedHeightMode { MonteCarlo, Exact };

// mc: average canonical_height over sampled sequences. exact: solve the
// averaged functional identity E(Q) = sum_phi nu(phi) E(phi Q)/d_phi over the
// finite reachable set with h <= 2 C_S, with escaped boundary values estimated
// by canonical_height; exact in the measure, floating in heights.
ExpectedCanonicalHeight expected_canonical_height(const OrbitModel& model,
                                                  const ProjPoint& start,
                                                  ExpectedHeightMode mode,
                                                  const ExpectedHeightOptions& opts = {});

struct FiniteOrbitDecision {
    bool finite = false;
    std::vector<ProjPoint> orbit;          // the full total orbit when finite
    std::optional<ProjPoint> witness;      // a reachable point above the bound
    Word witness_word;
    CertifiedConstant::Status constants_status = CertifiedConstant::Status::Certified;
};

struct DecisionOptions {
    long node_cap = 10'000;
    OrbitOptions orbit;
};

// Breadth-first closure of Q under S. Closure inside {h <= 2 C_S} proves the
// total orbit finite (Northcott); any reachable point above the bound escapes
// for good and proves it infinite.
FiniteOrbitDecision finite_sorbit_decide(const OrbitModel& model, const ProjPoint& q,
                                         const DecisionOptions& opts = {});

// The escape-construction: a single composed word g with g(Q_i) outside F for
// every Q_i in F. Throws MathError("EscapeImpossible") when some Q_i's entire
// closure stays inside F.
Word escape_function(const OrbitModel& model, const std::vector<ProjPoint>& f_set,
                     const DecisionOptions& opts = {});

struct WanderingVerdict {
    enum class Verdict { AlmostSurelyWandering, NotAsWandering, HeuristicOnly };
    Verdict verdict = Verdict::AlmostSurelyWandering;
    // For the not-wandering direction: a reachable point with finite total
    // orbit and the word reaching it. Under heuristic constants the witness is
    // still reported when found.
    std::optional<ProjPoint> witness_point;
    Word witness_word;
    CertifiedConstant::Status constants_status = CertifiedConstant::Status::Certified;
};

const char* to_string(WanderingVerdict::Verdict v);

// Explores Orb_S(P) with certified pruning at h > 2 C_S and tests every
// retained point for a finite total orbit.
WanderingVerdict wandering_classify(const OrbitModel& model, const ProjPoint& start,
                                    const DecisionOptions& opts = {});

// Exact probability that a random orbit of P is finite: the absorption
// probability of the FINITE class in the transition graph on retained points,
// solved in exact rational arithmetic.
struct FiniteOrbitProbability {
    Rat probability;
    long states = 0;
};
FiniteOrbitProbability finite_orbit_probability(const OrbitModel& model,
                                                const ProjPoint& start,
                                                const DecisionOptions& opts = {});

// Monte Carlo companion estimate: fraction of sampled length-n_max orbits that
// revisit a point (certified-infinite orbits stop early at the escape bound).
struct FiniteOrbitFrequency {
    double frequency = 0.0;
    long finite_trials = 0;
    long undecided_trials = 0;
    long trials = 0;
};
FiniteOrbitFrequency finite_orbit_frequency_mc(const OrbitModel& model,
                                               const ProjPoint& start, long trials,
                                               long n_max, std::uint64_t seed);

struct CensusResult {
    std::vector<std::pair<double, long>> counts; // (B, #{n <= n_max : h_n <= B})
    double slope = 0.0;                          // least squares vs log B
    double reference_log = 0.0;                  // 1 / log delta
    double reference_direct = 0.0;               // 1 / delta, reported alongside
    bool wandering_warning = false;              // orbit cycled or heights vanished
};

// Counts per height bound B of the grid; empty grid = geometric auto grid.
CensusResult census(const OrbitModel& model, SequenceStream stream, const ProjPoint& start,
                    long n_max, std::vector<double> b_grid = {},
                    const OrbitOptions& opts = {});

} // namespace randdyn
