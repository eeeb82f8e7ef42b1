#include "randdyn/degree_lab.hpp"

#include <cmath>

#include "randdyn/stats.hpp"

namespace randdyn {

const char* to_string(DeltaEstimate::Method m) {
    switch (m) {
        case DeltaEstimate::Method::ClosedForm: return "closed_form";
        case DeltaEstimate::Method::BirkhoffMc: return "birkhoff_mc";
        case DeltaEstimate::Method::KingmanMc: return "kingman_mc";
        case DeltaEstimate::Method::ExactInf: return "exact_inf";
    }
    return "closed_form";
}

namespace {

void require_morphism_family(const MeasureSpec& spec, const MapSet& set) {
    if (!spec.is_finite()) return; // x^d + c maps are certified by construction
    for (const auto& [label, w] : spec.weights()) {
        const RationalMap& m = set.at(label);
        if (m.morphism_status() == MorphismStatus::CertifiedNonMorphism)
            throw MathError("NotAMorphismFamily",
                            "'" + label + "' is a certified non-morphism");
        if (!m.is_morphism_like())
            throw MathError("NotAMorphismFamily",
                            "'" + label + "' has unknown morphism status (not user-asserted)");
    }
}

} // namespace

DeltaEstimate dyndeg_morphism(const MeasureSpec& spec, const MapSet& set) {
    require_morphism_family(spec, set);
    DeltaEstimate e;
    e.point_estimate = std::exp(expectation_log_deg(spec, set));
    e.method = DeltaEstimate::Method::ClosedForm;
    return e;
}

DeltaEstimate dyndeg_birkhoff_mc(const MeasureSpec& spec, const MapSet& set, long n,
                                 long trials, std::uint64_t seed) {
    require_morphism_family(spec, set);
    if (n < 1 || trials < 1) throw ConfigError("birkhoff estimator needs n, trials >= 1");
    std::vector<double> per_trial(trials);
    for (long t = 0; t < trials; ++t) {
        SequenceStream stream(seed, static_cast<std::uint64_t>(t));
        long double acc = 0.0L;
        for (long i = 0; i < n; ++i) {
            MapDraw d = sample_map(spec, stream);
            acc += std::log(static_cast<long double>(draw_degree(spec, set, d)));
        }
        per_trial[t] = static_cast<double>(acc / n);
    }
    auto ms = mean_and_stderr(per_trial);
    DeltaEstimate e;
    e.point_estimate = std::exp(ms.mean);
    e.std_error = e.point_estimate * ms.std_error; // delta method on the log mean
    e.method = DeltaEstimate::Method::BirkhoffMc;
    e.n_used = n;
    e.trials_used = trials;
    return e;
}

KingmanResult dyndeg_kingman_mc(const MeasureSpec& spec, const MapSet& set,
                                const std::vector<int>& n_list, long trials,
                                std::uint64_t seed, const KingmanOptions& opts) {
    if (!spec.is_finite())
        throw ConfigError("the subadditive estimator needs a finite measure");
    if (n_list.empty()) throw ConfigError("empty n list");
    KingmanResult result;
    const double set_size = static_cast<double>(spec.weights().size());
    for (int n : n_list) {
        if (n < 1) throw ConfigError("levels must satisfy n >= 1");
        KingmanLevel level;
        level.n = n;
        if (std::pow(set_size, n) <= static_cast<double>(opts.exact_word_budget)) {
            ExactExpectationOptions eo;
            eo.word_budget = opts.exact_word_budget;
            eo.term_cap = opts.term_cap;
            level.value = exact_expectation_n(spec, set, n, eo) / n;
            level.exact = true;
        } else {
            std::vector<double> samples;
            samples.reserve(trials);
            for (long t = 0; t < trials; ++t) {
                SequenceStream stream(seed + 0x6b696e67ULL * (n + 1),
                                      static_cast<std::uint64_t>(t));
                Word w;
                for (int i = 0; i < n; ++i) w.labels.push_back(sample_map(spec, stream).label);
                try {
                    RationalMap gamma = word_compose(set, w, opts.term_cap);
                    samples.push_back(std::log(static_cast<double>(gamma.degree())) / n);
                } catch (const ResourceError&) {
                    result.term_cap_failures.push_back(w.composition_order_string());
                }
            }
            if (samples.empty())
                throw ResourceError("every sampled word at n = " + std::to_string(n) +
                                    " exceeded the term cap");
            auto ms = mean_and_stderr(samples);
            level.value = ms.mean;
            level.std_error = ms.std_error;
            level.trials = static_cast<long>(samples.size());
        }
        result.table.push_back(level);
    }

    const KingmanLevel* best = &result.table.front();
    for (const auto& level : result.table)
        if (level.value < best->value) best = &level;
    result.delta.point_estimate = std::exp(best->value);
    result.delta.std_error = result.delta.point_estimate * best->std_error;
    result.delta.method = best->exact ? DeltaEstimate::Method::ExactInf
                                      : DeltaEstimate::Method::KingmanMc;
    result.delta.n_used = best->n;
    result.delta.trials_used = best->trials;
    return result;
}

CltSample clt_sample(const MeasureSpec& spec, const MapSet& set, long n, long trials,
                     std::uint64_t seed) {
    require_morphism_family(spec, set);
    if (n < 1 || trials < 1) throw ConfigError("clt needs n, trials >= 1");
    if (spec.is_finite()) {
        int first_degree = set.at(spec.weights().front().first).degree();
        bool all_equal = true;
        for (const auto& [label, w] : spec.weights())
            all_equal &= (set.at(label).degree() == first_degree);
        if (all_equal)
            throw MathError("ZeroVariance", "all degrees equal; sigma = 0");
    }
    const double sigma = std::sqrt(variance_log_deg(spec, set));
    if (!(sigma > 0)) throw MathError("ZeroVariance", "sigma = 0");
    const double log_delta = expectation_log_deg(spec, set);

    CltSample out;
    out.n = n;
    out.sigma = sigma;
    out.z_values.resize(trials);
    for (long t = 0; t < trials; ++t) {
        SequenceStream stream(seed, static_cast<std::uint64_t>(t));
        long double acc = 0.0L;
        for (long i = 0; i < n; ++i) {
            MapDraw d = sample_map(spec, stream);
            acc += std::log(static_cast<long double>(draw_degree(spec, set, d)));
        }
        out.z_values[t] =
            std::sqrt(static_cast<double>(n)) / sigma *
            (static_cast<double>(acc) / n - log_delta);
    }
    out.ks_distance = ks_distance_to_normal(out.z_values);
    return out;
}

Word doubling_block_word(int k, const std::string& label_a, const std::string& label_b) {
    if (k < 1) throw ConfigError("doubling blocks need k >= 1");
    Word w;
    std::uint64_t block = 1;
    for (int j = 0; j < k; ++j, block <<= 1)
        for (std::uint64_t i = 0; i < block; ++i)
            w.labels.push_back(j % 2 == 0 ? label_a : label_b);
    return w;
}

DoublingBlockDegree doubling_block_degree(int k) {
    if (k < 1) throw ConfigError("doubling blocks need k >= 1");
    DoublingBlockDegree d{Int(0), Int(0), Int(0)};
    Int block = 1;
    for (int j = 0; j < k; ++j, block <<= 1)
        (j % 2 == 0 ? d.e1 : d.e2) += block;
    d.total_length = (Int(1) << k) - 1;
    return d;
}

double DoublingBlockDegree::root_value(int d1, int d2) const {
    const double len = total_length.convert_to<double>();
    return std::exp((e1.convert_to<double>() * std::log(d1) +
                     e2.convert_to<double>() * std::log(d2)) /
                    len);
}

std::pair<double, double> doubling_block_closed_form(int k) {
    const double p = std::pow(2.0, k);
    if (k % 2 == 1) return {2.0 / 3.0 * p - 1.0 / 3.0, 1.0 / 3.0 * p - 2.0 / 3.0};
    return {1.0 / 3.0 * p - 2.0 / 3.0, 2.0 / 3.0 * p - 1.0 / 3.0};
}

} // namespace randdyn
