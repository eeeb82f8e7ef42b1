#pragma once

// Batch front door: parse an experiment config describing (S, nu, P, seeds,
// budgets), dispatch to the laboratories, and emit deterministic CSV files
// plus a manifest. Identical config + seed gives byte-identical outputs.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "randdyn/orbit_lab.hpp"

namespace randdyn {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kManifestVersion = 1;

// Flat key-value sections; see the config reference in the README.
struct ExperimentConfig {
    int dimension = 1;
    MapSet maps;
    std::optional<MeasureSpec> measure;
    std::optional<ProjPoint> point;

    std::uint64_t seed = 1;
    long trials = 64;
    long n_max = 20;
    double eps = 1e-6;
    int threads = 0; // 0 = hardware concurrency
    std::vector<int> n_list{1, 2, 3, 4, 6, 8};
    std::vector<double> b_grid; // empty = auto geometric grid
    int k = 14;
    int d1 = 2;
    int d2 = 3;
    long node_cap = 10'000;
    std::size_t term_cap = kDefaultTermCap;
    std::size_t coord_bits_cap = 1'000'000'000;
    std::size_t exact_budget = 4096;
    long boundary_samples = 64;
    long fallback_samples = 1000;
    long clt_trials = 2000;
    bool assert_morphisms = false;

    std::string raw_text; // echoed into the manifest

    OrbitOptions orbit_options() const {
        OrbitOptions o;
        o.coord_bits_cap = coord_bits_cap;
        o.term_cap = term_cap;
        return o;
    }
    DecisionOptions decision_options() const {
        DecisionOptions d;
        d.node_cap = node_cap;
        d.orbit = orbit_options();
        return d;
    }
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<long> n_max;
    std::optional<double> eps;
    std::optional<int> threads;
};

// Exit codes: 0 success, 1 config error, 2 resource cap, 3 math precondition.
int run_command(const std::string& command, ExperimentConfig config,
                const RunOverrides& overrides, const std::string& out_dir,
                std::ostream& out);

std::vector<std::string> known_commands();

} // namespace randdyn
