#include "randdyn/random_model.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "randdyn/rng.hpp"

namespace randdyn {

std::uint64_t SequenceStream::raw(std::uint64_t refinement) const {
    return threefry2x64({position_, refinement}, {seed_, trial_})[0];
}

MeasureSpec MeasureSpec::finite(std::vector<std::pair<std::string, Rat>> weights) {
    MeasureSpec spec;
    spec.weights_ = std::move(weights);
    if (spec.weights_.empty()) throw ConfigError("empty measure");
    Rat total(0);
    for (const auto& [label, w] : spec.weights_) {
        if (w <= 0) throw ConfigError("weight of '" + label + "' must be strictly positive");
        total += w;
    }
    if (total != 1) throw ConfigError("weights must sum to exactly 1");
    return spec;
}

MeasureSpec MeasureSpec::power_plus_c(Rat c) {
    MeasureSpec spec;
    spec.family_ = Family::PowerPlusC;
    spec.c_ = std::move(c);
    return spec;
}

std::string MeasureSpec::describe() const {
    std::ostringstream out;
    if (is_finite()) {
        out << "finite{";
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            if (i) out << ", ";
            out << weights_[i].first << ": " << weights_[i].second.str();
        }
        out << "}";
    } else {
        out << "power_plus_c{c = " << c_.str() << "}";
    }
    return out.str();
}

RationalMap make_power_map(int d, const Rat& c) {
    if (d < 1) throw ConfigError("power map degree must be >= 1");
    const Int p = numerator(c), q = denominator(c);
    HomogeneousForm::TermMap t0;
    t0.emplace(Monomial{{static_cast<std::uint32_t>(d), 0}}, q);
    if (p != 0) t0.emplace(Monomial{{0, static_cast<std::uint32_t>(d)}}, p);
    HomogeneousForm::TermMap t1;
    t1.emplace(Monomial{{0, static_cast<std::uint32_t>(d)}}, q);
    std::ostringstream label;
    label << "x^" << d;
    if (p != 0) label << "+" << c.str();
    // x^d + c has resultant q^{2d} != 0: always a morphism.
    return reduce({HomogeneousForm::from_terms(2, std::move(t0)),
                   HomogeneousForm::from_terms(2, std::move(t1))},
                  label.str())
        .with_status(MorphismStatus::CertifiedMorphism);
}

namespace {

// Lazily refined dyadic interval [lo, hi) around the uniform draw u in [0,1).
struct DyadicDraw {
    const SequenceStream* stream;
    Int numer = 0;
    int blocks = 0;

    void refine() {
        numer <<= 64;
        numer += Int(stream->raw(static_cast<std::uint64_t>(blocks)));
        ++blocks;
    }
    Rat lo() const { return Rat(numer, Int(1) << (64 * blocks)); }
    Rat hi() const { return Rat(numer + 1, Int(1) << (64 * blocks)); }
};

// Certified rational bounds for e = sum 1/n!: lo = partial sum of m terms,
// tail below 2/m! for m >= 2.
struct EulerBounds {
    int m = 0;
    Int factorial = 1;
    Rat lo = Rat(0);

    void extend_to(int terms) {
        while (m < terms) {
            lo += Rat(Int(1), factorial);
            ++m;
            factorial *= m;
        }
    }
    Rat hi() const { return Rat(lo + Rat(Int(2), factorial)); }
};

} // namespace

MapDraw sample_map(const MeasureSpec& spec, SequenceStream& stream) {
    DyadicDraw u{&stream};
    u.refine();
    MapDraw out;
    if (spec.is_finite()) {
        // Exact inverse CDF: refine the dyadic interval until it lies inside
        // one atom. A tie at an exact cumulative boundary has probability 0;
        // after 16 blocks (~2^-1024) the atom containing lo is taken.
        while (out.finite_index < 0) {
            const bool last_chance = (u.blocks >= 16);
            Rat cum(0);
            for (std::size_t i = 0; i < spec.weights().size(); ++i) {
                cum += spec.weights()[i].second;
                const bool below_hi = (i + 1 == spec.weights().size()) || (u.hi() <= cum);
                const bool below_lo = (i + 1 == spec.weights().size()) || (u.lo() < cum);
                if (below_hi || (last_chance && below_lo)) {
                    out.finite_index = static_cast<int>(i);
                    out.label = spec.weights()[i].first;
                    break;
                }
                if (below_lo) break; // straddles the boundary: refine
            }
            if (out.finite_index < 0) u.refine();
        }
        stream.advance();
        return out;
    }

    // power_plus_c: d = 2 + X with X Poisson(1). u < R_k/e iff u*e < R_k,
    // decided through certified rational bounds on e and refinable dyadic
    // bounds on u.
    EulerBounds e;
    e.extend_to(24);
    int k = 0;
    Int kfact = 1;
    Rat partial(1); // sum_{j<=k} 1/j!, starting at j = 0
    while (true) {
        bool accept = false;
        while (true) {
            if (Rat(u.hi() * e.hi()) <= partial) { accept = true; break; }
            if (Rat(u.lo() * e.lo) >= partial) { accept = false; break; }
            if (u.blocks < 16) u.refine();
            e.extend_to(e.m + 8);
            if (u.blocks >= 16 && e.m > 400) { accept = true; break; } // measure-zero tie
        }
        if (accept) break;
        ++k;
        kfact *= k;
        partial += Rat(Int(1), kfact);
    }
    out.family_degree = 2 + k;
    std::ostringstream label;
    label << "x^" << out.family_degree;
    if (spec.family_c() != 0) label << "+" << spec.family_c().str();
    out.label = label.str();
    stream.advance();
    return out;
}

RationalMap materialize(const MeasureSpec& spec, const MapSet& set, const MapDraw& draw) {
    if (spec.is_finite()) return set.at(draw.label);
    return make_power_map(draw.family_degree, spec.family_c());
}

int draw_degree(const MeasureSpec& spec, const MapSet& set, const MapDraw& draw) {
    if (spec.is_finite()) return set.at(draw.label).degree();
    return draw.family_degree;
}

namespace {

// Series sum_{j>=0} f(j+2)/(e j!) with f = log or log^2. The tail beyond J=40
// is below sum_{j>40} j^2/j!, far under 1e-10.
double family_series(bool squared) {
    long double e = std::exp(1.0L);
    long double sum = 0.0L;
    long double fact = 1.0L;
    for (int j = 0; j <= 40; ++j) {
        if (j > 0) fact *= j;
        long double l = std::log(static_cast<long double>(j + 2));
        sum += (squared ? l * l : l) / fact;
    }
    return static_cast<double>(sum / e);
}

} // namespace

double expectation_log_deg(const MeasureSpec& spec, const MapSet& set) {
    if (!spec.is_finite()) return family_series(false);
    long double acc = 0.0L;
    for (const auto& [label, w] : spec.weights())
        acc += static_cast<long double>(w.convert_to<double>()) *
               std::log(static_cast<long double>(set.at(label).degree()));
    return static_cast<double>(acc);
}

double variance_log_deg(const MeasureSpec& spec, const MapSet& set) {
    if (!spec.is_finite()) {
        double m = family_series(false);
        return family_series(true) - m * m;
    }
    long double m = 0.0L, m2 = 0.0L;
    for (const auto& [label, w] : spec.weights()) {
        long double l = std::log(static_cast<long double>(set.at(label).degree()));
        long double wf = static_cast<long double>(w.convert_to<double>());
        m += wf * l;
        m2 += wf * l * l;
    }
    return static_cast<double>(m2 - m * m);
}

double exact_expectation_n(const MeasureSpec& spec, const MapSet& set, int n,
                           const ExactExpectationOptions& opts) {
    if (!spec.is_finite())
        throw ConfigError("exact expectations need a finite measure");
    if (n < 0) throw ConfigError("n must be >= 0");
    if (n == 0) return 0.0;
    double words = std::pow(static_cast<double>(spec.weights().size()), n);
    if (words > static_cast<double>(opts.word_budget))
        throw ResourceError("exact expectation budget exceeded: |S|^n > word budget");

    // DFS sharing composed prefixes; exact weights, exact composed degrees.
    long double acc = 0.0L;
    std::vector<std::pair<RationalMap, Rat>> entries;
    for (const auto& [label, w] : spec.weights())
        entries.emplace_back(set.at(label), w);

    std::function<void(const RationalMap&, const Rat&, int)> walk =
        [&](const RationalMap& gamma, const Rat& weight, int remaining) {
            if (remaining == 0) {
                acc += static_cast<long double>(weight.convert_to<double>()) *
                       std::log(static_cast<long double>(gamma.degree()));
                return;
            }
            for (const auto& [map, w] : entries)
                walk(compose(map, gamma, opts.term_cap), Rat(weight * w), remaining - 1);
        };
    walk(RationalMap::identity(set.dimension()), Rat(1), n);
    return static_cast<double>(acc);
}

void validate_measure(const MeasureSpec& spec, const MapSet& set) {
    if (spec.is_finite()) {
        for (const auto& [label, w] : spec.weights()) {
            if (!set.contains(label))
                throw ConfigError("measure references unknown map '" + label + "'");
            (void)w;
        }
    }
}

} // namespace randdyn
