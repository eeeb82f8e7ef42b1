#include "randdyn/experiment.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "randdyn/degree_lab.hpp"
#include "randdyn/stats.hpp"

namespace randdyn {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

long parse_long(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        long r = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for '" + key + "': " + v);
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("bad number for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for '" + key + "': " + v);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !parts.empty()) parts.push_back(trim(cur));
    while (!parts.empty() && parts.back().empty()) parts.pop_back();
    return parts;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.raw_text = text;

    std::istringstream in(text);
    std::string line, section;
    std::vector<std::pair<std::string, std::string>> map_entries;
    std::vector<std::pair<std::string, std::string>> measure_entries;
    std::string measure_type, family_name, family_c = "0", point_text;

    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("bad section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key in line: " + line);

        if (section == "space") {
            if (key == "dimension") cfg.dimension = static_cast<int>(parse_long(value, key));
            else throw ConfigError("unknown [space] key: " + key);
        } else if (section == "maps") {
            map_entries.emplace_back(key, value);
        } else if (section == "measure") {
            if (key == "type") measure_type = value;
            else if (key == "name") family_name = value;
            else if (key == "c") family_c = value;
            else measure_entries.emplace_back(key, value);
        } else if (section == "point") {
            if (key == "P") point_text = value;
            else throw ConfigError("unknown [point] key: " + key);
        } else if (section == "run") {
            if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, key));
            else if (key == "trials") cfg.trials = parse_long(value, key);
            else if (key == "clt_trials") cfg.clt_trials = parse_long(value, key);
            else if (key == "n_max") cfg.n_max = parse_long(value, key);
            else if (key == "eps") cfg.eps = parse_double(value, key);
            else if (key == "threads") cfg.threads = static_cast<int>(parse_long(value, key));
            else if (key == "k") cfg.k = static_cast<int>(parse_long(value, key));
            else if (key == "d1") cfg.d1 = static_cast<int>(parse_long(value, key));
            else if (key == "d2") cfg.d2 = static_cast<int>(parse_long(value, key));
            else if (key == "node_cap") cfg.node_cap = parse_long(value, key);
            else if (key == "term_cap") cfg.term_cap = static_cast<std::size_t>(parse_long(value, key));
            else if (key == "coord_bits_cap")
                cfg.coord_bits_cap = static_cast<std::size_t>(parse_long(value, key));
            else if (key == "exact_budget")
                cfg.exact_budget = static_cast<std::size_t>(parse_long(value, key));
            else if (key == "boundary_samples") cfg.boundary_samples = parse_long(value, key);
            else if (key == "fallback_samples") cfg.fallback_samples = parse_long(value, key);
            else if (key == "assert_morphisms") cfg.assert_morphisms = parse_bool(value, key);
            else if (key == "n_list") {
                cfg.n_list.clear();
                for (const auto& part : split_list(value))
                    cfg.n_list.push_back(static_cast<int>(parse_long(part, key)));
                if (cfg.n_list.empty()) throw ConfigError("empty n_list");
            } else if (key == "b_grid") {
                cfg.b_grid.clear();
                if (value != "auto")
                    for (const auto& part : split_list(value))
                        cfg.b_grid.push_back(parse_double(part, key));
            } else {
                throw ConfigError("unknown [run] key: " + key);
            }
        } else {
            throw ConfigError(section.empty() ? "key outside any section: " + line
                                              : "unknown section: [" + section + "]");
        }
    }

    for (const auto& [label, text_src] : map_entries) {
        RationalMap m = parse_map(text_src, cfg.dimension, label);
        if (cfg.assert_morphisms && m.morphism_status() == MorphismStatus::Unknown)
            m = m.with_status(MorphismStatus::UserAssertedMorphism);
        cfg.maps.add(std::move(m));
    }

    if (!measure_type.empty()) {
        if (measure_type == "finite") {
            std::vector<std::pair<std::string, Rat>> weights;
            for (const auto& [label, w] : measure_entries)
                weights.emplace_back(label, parse_rational(w));
            cfg.measure = MeasureSpec::finite(std::move(weights));
            validate_measure(*cfg.measure, cfg.maps);
        } else if (measure_type == "family") {
            if (family_name != "power_plus_c")
                throw ConfigError("unknown family: " + family_name);
            cfg.measure = MeasureSpec::power_plus_c(parse_rational(family_c));
        } else {
            throw ConfigError("measure type must be 'finite' or 'family'");
        }
    }
    if (!point_text.empty()) cfg.point = parse_point(point_text, cfg.dimension);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

struct OutputDir {
    std::filesystem::path dir;

    explicit OutputDir(const std::string& path) : dir(path) {
        std::filesystem::create_directories(dir);
    }
    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write output file: " + (dir / name).string());
        return f;
    }
};

void write_manifest(const OutputDir& out, const std::string& command,
                    const ExperimentConfig& cfg) {
    auto f = out.open("manifest.txt");
    f << "manifest_version = " << kManifestVersion << "\n";
    f << "tool = randdyn " << kToolVersion << "\n";
    f << "command = " << command << "\n";
    f << "seed = " << cfg.seed << "\n";
    f << "trials = " << cfg.trials << "\n";
    f << "n_max = " << cfg.n_max << "\n";
    f << "eps = " << format_double(cfg.eps) << "\n";
    f << "threads = " << cfg.threads << "\n";
    f << "--- config ---\n";
    f << cfg.raw_text;
    if (!cfg.raw_text.empty() && cfg.raw_text.back() != '\n') f << "\n";
}

const MeasureSpec& require_measure(const ExperimentConfig& cfg) {
    if (!cfg.measure) throw ConfigError("this command needs a [measure] section");
    return *cfg.measure;
}

const ProjPoint& require_point(const ExperimentConfig& cfg) {
    if (!cfg.point) throw ConfigError("this command needs a [point] section");
    return *cfg.point;
}

OrbitModel build_model(const ExperimentConfig& cfg) {
    return make_orbit_model(require_measure(cfg), cfg.maps, cfg.fallback_samples, cfg.seed);
}

// --- commands ---------------------------------------------------------------

void cmd_delta(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    const MeasureSpec& spec = require_measure(cfg);
    auto csv = out.open("delta.csv");
    csv << "n,estimate,stderr,method\n";

    bool morphisms = true;
    if (spec.is_finite())
        for (const auto& [label, w] : spec.weights()) {
            MorphismStatus st = cfg.maps.at(label).morphism_status();
            if (st == MorphismStatus::Unknown && cfg.maps.at(label).dimension() == 1)
                st = morphism_check(cfg.maps.at(label)).status;
            morphisms &= (st == MorphismStatus::CertifiedMorphism ||
                          st == MorphismStatus::UserAssertedMorphism);
        }

    if (morphisms) {
        // Closed form + Birkhoff Monte Carlo.
        MapSet support;
        if (spec.is_finite())
            for (const auto& [label, w] : spec.weights()) {
                RationalMap m = cfg.maps.at(label);
                if (m.morphism_status() == MorphismStatus::Unknown && m.dimension() == 1)
                    m = m.with_status(morphism_check(m).status);
                support.add(std::move(m));
            }
        auto closed = dyndeg_morphism(spec, support);
        csv << "0," << format_double(closed.point_estimate) << ",0,closed_form\n";
        os << "delta (closed form) = " << format_double(closed.point_estimate) << "\n";
        auto mc = dyndeg_birkhoff_mc(spec, support, cfg.n_max, cfg.trials, cfg.seed);
        csv << cfg.n_max << "," << format_double(mc.point_estimate) << ","
            << format_double(mc.std_error) << ",birkhoff_mc\n";
        os << "delta (birkhoff mc, n = " << cfg.n_max << ", trials = " << cfg.trials
           << ") = " << format_double(mc.point_estimate) << " +- "
           << format_double(mc.std_error) << "\n";
    }
    if (spec.is_finite()) {
        KingmanOptions ko;
        ko.exact_word_budget = cfg.exact_budget;
        ko.term_cap = cfg.term_cap;
        auto king = dyndeg_kingman_mc(spec, cfg.maps, cfg.n_list, cfg.trials, cfg.seed, ko);
        for (const auto& level : king.table)
            csv << level.n << "," << format_double(std::exp(level.value)) << ","
                << format_double(std::exp(level.value) * level.std_error) << ","
                << (level.exact ? "exact_inf" : "kingman_mc") << "\n";
        os << "delta (subadditive table minimum, n = " << king.delta.n_used
           << ") = " << format_double(king.delta.point_estimate) << " +- "
           << format_double(king.delta.std_error) << "\n";
        for (const auto& w : king.term_cap_failures)
            os << "term cap exceeded for word: " << w << "\n";
    }
}

void cmd_clt(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    const MeasureSpec& spec = require_measure(cfg);
    MapSet support;
    if (spec.is_finite())
        for (const auto& [label, w] : spec.weights()) {
            RationalMap m = cfg.maps.at(label);
            if (m.morphism_status() == MorphismStatus::Unknown && m.dimension() == 1)
                m = m.with_status(morphism_check(m).status);
            support.add(std::move(m));
        }
    auto main_sample = clt_sample(spec, support, cfg.n_max, cfg.clt_trials, cfg.seed);
    auto zcsv = out.open("clt_z.csv");
    zcsv << "z\n";
    for (double z : main_sample.z_values) zcsv << format_double(z) << "\n";
    auto kcsv = out.open("clt_ks.csv");
    kcsv << "n,ks\n";
    for (int n : cfg.n_list) {
        auto s = clt_sample(spec, support, n, cfg.clt_trials, cfg.seed);
        kcsv << n << "," << format_double(s.ks_distance) << "\n";
    }
    kcsv << cfg.n_max << "," << format_double(main_sample.ks_distance) << "\n";
    os << "sigma = " << format_double(main_sample.sigma) << "\n";
    os << "ks_distance (n = " << cfg.n_max << ", trials = " << cfg.clt_trials
       << ") = " << format_double(main_sample.ks_distance) << "\n";
}

void cmd_counterexample(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    auto csv = out.open("counterexample.csv");
    csv << "k,e1,e2,root\n";
    for (int k = 1; k <= cfg.k; ++k) {
        auto d = doubling_block_degree(k);
        csv << k << "," << d.e1.str() << "," << d.e2.str() << ","
            << format_double(d.root_value(cfg.d1, cfg.d2)) << "\n";
    }
    const double odd = std::pow(cfg.d1, 2.0 / 3.0) * std::pow(cfg.d2, 1.0 / 3.0);
    const double even = std::pow(cfg.d1, 1.0 / 3.0) * std::pow(cfg.d2, 2.0 / 3.0);
    os << "odd-k subsequence limit  = " << format_double(odd) << "\n";
    os << "even-k subsequence limit = " << format_double(even) << "\n";
    auto cf = doubling_block_closed_form(2);
    auto counted = doubling_block_degree(2);
    os << "note: the closed-form exponent pair at k = 2 is (" << format_double(cf.first)
       << ", " << format_double(cf.second) << ") while exact counting gives ("
       << counted.e1.str() << ", " << counted.e2.str()
       << "); the subsequence limits are unaffected. Both are reported, neither is"
          " silently corrected.\n";
}

void cmd_orbit(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    OrbitModel model = build_model(cfg);
    auto rec = iterate_orbit(model, SequenceStream(cfg.seed, 0), require_point(cfg),
                             cfg.n_max, cfg.orbit_options());
    auto csv = out.open("orbit.csv");
    csv << "n,point,height,cum_degree\n";
    for (std::size_t n = 0; n < rec.points.size(); ++n) {
        csv << n << ",\"" << rec.points[n].to_string() << "\","
            << format_double(rec.heights[n]) << "," << rec.cum_degrees[n].str() << "\n";
    }
    os << "status = " << to_string(rec.status) << "\n";
    os << "steps = " << rec.points.size() - 1 << "\n";
    os << "word = " << rec.word_so_far.composition_order_string() << "\n";
}

void cmd_canht(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    OrbitModel model = build_model(cfg);
    auto r = canonical_height(model, SequenceStream(cfg.seed, 0), require_point(cfg),
                              cfg.eps, cfg.orbit_options());
    auto csv = out.open("canht.csv");
    csv << "value,radius,status,n_used,degree\n";
    csv << format_double(r.value) << "," << format_double(r.certified_radius) << ","
        << to_string(r.status) << "," << r.n_used << "," << r.degree_used.str() << "\n";
    os << "canonical height = " << format_double(r.value) << " (radius "
       << format_double(r.certified_radius) << ", " << to_string(r.status) << ", n = "
       << r.n_used << ")\n";
}

void cmd_expected_canht(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    OrbitModel model = build_model(cfg);
    ExpectedHeightOptions opts;
    opts.trials = cfg.trials;
    opts.boundary_samples = cfg.boundary_samples;
    opts.eps = cfg.eps;
    opts.seed = cfg.seed;
    opts.state_cap = cfg.node_cap;
    opts.orbit = cfg.orbit_options();
    auto csv = out.open("expected_canht.csv");
    csv << "mode,estimate,stderr,states,boundary_points\n";
    auto exact = expected_canonical_height(model, require_point(cfg),
                                           ExpectedHeightMode::Exact, opts);
    csv << "exact," << format_double(exact.estimate) << "," << format_double(exact.std_error)
        << "," << exact.states << "," << exact.boundary_points << "\n";
    auto mc = expected_canonical_height(model, require_point(cfg),
                                        ExpectedHeightMode::MonteCarlo, opts);
    csv << "mc," << format_double(mc.estimate) << "," << format_double(mc.std_error)
        << ",0,0\n";
    os << "expected canonical height (exact in measure) = " << format_double(exact.estimate)
       << " +- " << format_double(exact.std_error) << "\n";
    os << "expected canonical height (monte carlo)      = " << format_double(mc.estimate)
       << " +- " << format_double(mc.std_error) << "\n";
}

void cmd_classify(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    OrbitModel model = build_model(cfg);
    auto v = wandering_classify(model, require_point(cfg), cfg.decision_options());
    std::ostringstream report;
    report << "verdict = " << to_string(v.verdict) << "\n";
    report << "constants = " << to_string(v.constants_status) << "\n";
    if (v.witness_point) {
        report << "witness point = " << v.witness_point->to_string() << "\n";
        report << "witness word = " << v.witness_word.composition_order_string() << "\n";
    }
    auto f = out.open("classify.txt");
    f << report.str();
    os << report.str();
}

void cmd_prob_finite(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    OrbitModel model = build_model(cfg);
    auto p = finite_orbit_probability(model, require_point(cfg), cfg.decision_options());
    auto csv = out.open("prob_finite.csv");
    csv << "probability,states,mc_frequency,mc_trials\n";
    os << p.probability.str() << "\n";
    if (cfg.trials > 0) {
        auto mc = finite_orbit_frequency_mc(model, require_point(cfg), cfg.trials,
                                            cfg.n_max, cfg.seed);
        csv << p.probability.str() << "," << p.states << "," << format_double(mc.frequency)
            << "," << mc.trials << "\n";
        os << "mc frequency (trials = " << mc.trials << ", n = " << cfg.n_max
           << ") = " << format_double(mc.frequency) << "\n";
        if (mc.undecided_trials > 0)
            os << "undecided trials: " << mc.undecided_trials << "\n";
    } else {
        csv << p.probability.str() << "," << p.states << ",,0\n";
    }
}

void cmd_census(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    OrbitModel model = build_model(cfg);
    auto r = census(model, SequenceStream(cfg.seed, 0), require_point(cfg), cfg.n_max,
                    cfg.b_grid, cfg.orbit_options());
    auto csv = out.open("census.csv");
    csv << "B,count\n";
    for (const auto& [b, count] : r.counts)
        csv << format_double(b) << "," << count << "\n";
    os << "slope = " << format_double(r.slope) << "\n";
    if (r.reference_log != 0.0) {
        os << "reference 1/log(delta) = " << format_double(r.reference_log) << "\n";
        os << "reference 1/delta      = " << format_double(r.reference_direct)
           << "  (the statement's constant; the proof and the closed-form checks"
              " support 1/log(delta))\n";
    }
    if (r.wandering_warning)
        os << "warning: the orbit cycled or produced zero heights; the asymptotic"
              " count assumes a wandering start\n";
}

void cmd_check(const ExperimentConfig& cfg, const OutputDir& out, std::ostream& os) {
    const MeasureSpec& spec = require_measure(cfg);
    std::ostringstream report;

    report << "morphism certification:\n";
    for (const auto& m : cfg.maps.maps()) {
        auto mc = morphism_check(m);
        MorphismStatus st = mc.status;
        if (st == MorphismStatus::Unknown &&
            m.morphism_status() == MorphismStatus::UserAssertedMorphism)
            st = MorphismStatus::UserAssertedMorphism;
        report << "  " << m.label() << ": " << to_string(st);
        if (m.dimension() == 1) report << " (resultant " << mc.resultant.str() << ")";
        if (mc.witness) report << " (witness " << mc.witness->to_string() << ")";
        report << "\n";
    }

    int depth = std::min<long>(cfg.k, 6);
    if (spec.is_finite()) {
        MapSet support;
        for (const auto& [label, w] : spec.weights()) support.add(cfg.maps.at(label));
        auto di = degree_independence_check(support, depth, cfg.term_cap);
        report << "degree independence to depth " << di.depth
               << " (heuristic certificate, valid only up to this depth): "
               << (di.pass ? "pass" : "FAIL") << "\n";
        for (const auto& v : di.violations)
            report << "  word " << v.word.composition_order_string() << " has degree "
                   << v.degree << "\n";

        report << "subadditivity of exact expectations:\n";
        ExactExpectationOptions eo;
        eo.word_budget = cfg.exact_budget;
        eo.term_cap = cfg.term_cap;
        int max_n = 1;
        while (std::pow(static_cast<double>(spec.weights().size()), max_n + 1) <=
                   static_cast<double>(cfg.exact_budget) &&
               max_n < 6)
            ++max_n;
        std::vector<double> e(max_n + 1, 0.0);
        for (int n = 1; n <= max_n; ++n) e[n] = exact_expectation_n(spec, cfg.maps, n, eo);
        bool ok = true;
        for (int m = 1; m <= max_n; ++m)
            for (int n = 1; m + n <= max_n; ++n)
                if (e[m + n] > e[m] + e[n] + 1e-12) {
                    ok = false;
                    report << "  VIOLATION at (" << m << ", " << n << ")\n";
                }
        for (int n = 1; n <= max_n; ++n)
            report << "  E_" << n << "/" << n << " = " << format_double(e[n] / n) << "\n";
        report << "  E_{m+n} <= E_m + E_n for all m+n <= " << max_n << ": "
               << (ok ? "pass" : "FAIL") << "\n";
    }

    auto f = out.open("check.txt");
    f << report.str();
    os << report.str();
}

} // namespace

std::vector<std::string> known_commands() {
    return {"delta",   "clt",     "counterexample", "orbit",      "canht",
            "expected-canht", "classify", "prob-finite",    "census", "check"};
}

int run_command(const std::string& command, ExperimentConfig config,
                const RunOverrides& overrides, const std::string& out_dir,
                std::ostream& os) {
    try {
        if (overrides.seed) config.seed = *overrides.seed;
        if (overrides.trials) config.trials = *overrides.trials;
        if (overrides.n_max) config.n_max = *overrides.n_max;
        if (overrides.eps) config.eps = *overrides.eps;
        if (overrides.threads) config.threads = *overrides.threads;

        OutputDir out(out_dir);
        write_manifest(out, command, config);
        if (command == "delta") cmd_delta(config, out, os);
        else if (command == "clt") cmd_clt(config, out, os);
        else if (command == "counterexample") cmd_counterexample(config, out, os);
        else if (command == "orbit") cmd_orbit(config, out, os);
        else if (command == "canht") cmd_canht(config, out, os);
        else if (command == "expected-canht") cmd_expected_canht(config, out, os);
        else if (command == "classify") cmd_classify(config, out, os);
        else if (command == "prob-finite") cmd_prob_finite(config, out, os);
        else if (command == "census") cmd_census(config, out, os);
        else if (command == "check") cmd_check(config, out, os);
        else throw ConfigError("unknown command: " + command);
        return 0;
    } catch (const ConfigError& e) {
        os << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ResourceError& e) {
        os << "resource cap: " << e.what() << "\n";
        return 2;
    } catch (const MathError& e) {
        os << "math precondition failed: " << e.what() << "\n";
        return 3;
    }
}

} // namespace randdyn
