#include "randdyn/orbit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "randdyn/stats.hpp"

namespace randdyn {

const RationalMap& OrbitModel::map_of(const MapDraw& draw) const {
    return support.at(draw.label);
}

RationalMap OrbitModel::materialize_draw(const MapDraw& draw) const {
    if (is_finite()) return support.at(draw.label);
    return make_power_map(draw.family_degree, spec.family_c());
}

OrbitModel make_orbit_model(const MeasureSpec& spec, const MapSet& named_maps,
                            long fallback_samples, std::uint64_t seed) {
    OrbitModel model{spec, {}, {}};
    if (spec.is_finite()) {
        validate_measure(spec, named_maps);
        for (const auto& [label, w] : spec.weights()) {
            RationalMap m = named_maps.at(label);
            if (m.morphism_status() == MorphismStatus::Unknown && m.dimension() == 1)
                m = m.with_status(morphism_check(m).status);
            model.support.add(std::move(m));
        }
        model.control = make_height_control(model.support, fallback_samples, seed);
        return model;
    }
    // power_plus_c: the one-sided constant log(2 max(|p|, |q|)) holds for every
    // degree, so the clamped set constant is certified; the two-sided
    // telescoping constant is estimated by sampling small degrees.
    const Rat& c = spec.family_c();
    Int m = std::max(Int(abs(numerator(c))), Int(denominator(c)));
    double upper = log_abs(Int(2 * m));
    double tel = upper;
    long samples = 0;
    for (int d = 2; d <= 6; ++d) {
        RationalMap f = make_power_map(d, c);
        CertifiedConstant e = c_empirical(f, fallback_samples, seed + d);
        tel = std::max(tel, e.value);
        samples += e.sample_count;
    }
    model.control.set_constant =
        CertifiedConstant{std::max(1.0, upper), CertifiedConstant::Status::Empirical, samples};
    model.control.telescope =
        CertifiedConstant{tel, CertifiedConstant::Status::Empirical, samples};
    model.control.min_degree = 2;
    model.control.all_morphism_like = true;
    return model;
}

const char* to_string(OrbitRecord::Status s) {
    switch (s) {
        case OrbitRecord::Status::Running: return "running";
        case OrbitRecord::Status::CycleDetected: return "cycle_detected";
        case OrbitRecord::Status::IndeterminateHit: return "indeterminate_hit";
        case OrbitRecord::Status::ResourceCapped: return "resource_capped";
    }
    return "running";
}

namespace {

struct OrbitDriver {
    const OrbitModel& model;
    const OrbitOptions& opts;
    OrbitRecord record;
    std::unordered_map<ProjPoint, long, ProjPointHash> seen;
    Int cum_degree = 1;
    std::optional<RationalMap> symbolic; // composed map when exact degrees need it
    bool all_morphisms = true;

    OrbitDriver(const OrbitModel& m, const ProjPoint& start, const OrbitOptions& o)
        : model(m), opts(o), record{start, {}, {start}, {weil_height(start)}, {Int(1)}} {
        seen.emplace(start, 0);
        for (const auto& map : m.support.maps()) all_morphisms &= map.is_morphism_like();
        if (!m.is_finite()) all_morphisms = true; // x^d + c are morphisms
    }

    // Returns false when iteration must stop.
    bool step(const RationalMap& map, const std::string& label) {
        ProjPoint current = record.points.back();
        if (is_indeterminate_at(map, current)) {
            record.status = OrbitRecord::Status::IndeterminateHit;
            record.fail_step = static_cast<long>(record.points.size());
            return false;
        }
        ProjPoint next = apply(map, current);
        if (next.max_bits() > opts.coord_bits_cap) {
            record.status = OrbitRecord::Status::ResourceCapped;
            record.fail_step = static_cast<long>(record.points.size());
            return false;
        }
        record.word_so_far.labels.push_back(label);
        if (all_morphisms || !opts.track_exact_degrees) {
            cum_degree *= map.degree();
        } else {
            // Exact composed degree via symbolic composition with cancellation.
            try {
                symbolic = symbolic ? compose(map, *symbolic, opts.term_cap)
                                    : map;
                cum_degree = symbolic->degree();
            } catch (const ResourceError&) {
                record.status = OrbitRecord::Status::ResourceCapped;
                record.fail_step = static_cast<long>(record.points.size());
                return false;
            }
        }
        record.points.push_back(next);
        record.heights.push_back(weil_height(next));
        record.cum_degrees.push_back(cum_degree);
        auto [it, inserted] = seen.emplace(next, static_cast<long>(record.points.size()) - 1);
        if (!inserted) {
            record.status = OrbitRecord::Status::CycleDetected;
            record.cycle_start = it->second;
            return false;
        }
        return true;
    }
};

} // namespace

OrbitRecord iterate_orbit(const OrbitModel& model, SequenceStream stream,
                          const ProjPoint& start, long n_max, const OrbitOptions& opts) {
    OrbitDriver driver(model, start, opts);
    for (long i = 0; i < n_max; ++i) {
        MapDraw draw = sample_map(model.spec, stream);
        RationalMap map = model.materialize_draw(draw);
        if (!driver.step(map, draw.label)) break;
    }
    return driver.record;
}

OrbitRecord iterate_orbit_word(const OrbitModel& model, const Word& word,
                               const ProjPoint& start, long n_max,
                               const OrbitOptions& opts) {
    OrbitDriver driver(model, start, opts);
    long n = std::min<long>(n_max, static_cast<long>(word.labels.size()));
    for (long i = 0; i < n; ++i) {
        const RationalMap& map = model.support.at(word.labels[i]);
        if (!driver.step(map, word.labels[i])) break;
    }
    return driver.record;
}

ArithDegreeEstimate arithmetic_degree_estimate(const OrbitRecord& record) {
    ArithDegreeEstimate out;
    long positive = 0;
    for (std::size_t n = 1; n < record.heights.size(); ++n) {
        double h = record.heights[n];
        if (h > 0) {
            out.values.push_back(std::exp(std::log(h) / static_cast<double>(n)));
            out.final_value = out.values.back();
            ++positive;
        } else {
            out.values.push_back(0.0);
            out.skipped_zero_heights = true;
        }
    }
    if (positive < 3)
        throw MathError("DegenerateOrbit",
                        "fewer than 3 positive-height entries in the orbit");
    return out;
}

CanonicalHeightResult canonical_height(const OrbitModel& model, SequenceStream stream,
                                       const ProjPoint& start, double eps,
                                       const OrbitOptions& opts) {
    if (model.control.min_degree < 2)
        throw MathError("NotHeightControlled", "every degree must be >= 2");
    if (eps <= 0) throw ConfigError("eps must be positive");
    const double c_tel = model.control.telescope.value;
    const double d = static_cast<double>(model.control.min_degree);

    CanonicalHeightResult out;
    out.status = model.control.telescope.status;
    ProjPoint current = start;
    Int degree = 1;
    long n = 0;
    while (true) {
        double tail = c_tel / ((d - 1.0) * degree.convert_to<double>());
        if (tail < eps) {
            out.value = weil_height(current) / degree.convert_to<double>();
            out.certified_radius = tail;
            out.n_used = n;
            out.degree_used = degree;
            return out;
        }
        MapDraw draw = sample_map(model.spec, stream);
        RationalMap map = model.materialize_draw(draw);
        if (map.degree() < 2)
            throw MathError("NotHeightControlled", "drew a map of degree < 2");
        ProjPoint next = apply(map, current); // IndeterminatePointError propagates
        if (next.max_bits() > opts.coord_bits_cap)
            throw ResourceError("eps unreachable within the coordinate-size cap");
        current = std::move(next);
        degree *= map.degree();
        ++n;
    }
}

namespace {

// Shared BFS over the retained region {h <= 2 C_S + slack}. Children above the
// bound are certified escapees: with two-sided constants, h(phi Q) >= 2h(Q) -
// C_S > h(Q) + C_S whenever h(Q) > 2 C_S, so such points never return and
// cannot lie over a finite total orbit.
struct RetainedGraph {
    std::vector<ProjPoint> nodes;
    std::unordered_map<ProjPoint, long, ProjPointHash> index;
    // children[v][k]: index of phi_k(v) in nodes, -1 when escaped.
    std::vector<std::vector<long>> children;
    std::vector<long> parent;            // BFS tree edge: parent node
    std::vector<int> parent_map;         // index of the map used on that edge
    std::optional<ProjPoint> escaped_witness;
    Word escaped_word;
};

Word path_word(const RetainedGraph& g, long node, const OrbitModel& model,
               int extra_map = -1) {
    std::vector<std::string> labels;
    for (long v = node; g.parent[v] >= 0; v = g.parent[v])
        labels.push_back(model.support.at(static_cast<std::size_t>(g.parent_map[v])).label());
    std::reverse(labels.begin(), labels.end());
    if (extra_map >= 0)
        labels.push_back(model.support.at(static_cast<std::size_t>(extra_map)).label());
    return Word{std::move(labels)};
}

// BFS closure from `start`. stop_on_escape: return as soon as any reachable
// point exceeds the bound (used by the finite-orbit decision).
RetainedGraph explore_retained(const OrbitModel& model, const ProjPoint& start,
                               const DecisionOptions& opts, bool stop_on_escape) {
    if (!model.is_finite())
        throw ConfigError("total-orbit exploration needs a finite set of maps");
    for (const auto& m : model.support.maps())
        if (m.degree() < 2)
            throw MathError("NotHeightControlled", "every degree must be >= 2");
    const double bound = model.control.prune_bound();
    RetainedGraph g;
    if (weil_height(start) > bound) {
        g.escaped_witness = start;
        return g;
    }
    g.nodes.push_back(start);
    g.index.emplace(start, 0);
    g.parent.push_back(-1);
    g.parent_map.push_back(-1);
    std::deque<long> queue{0};
    while (!queue.empty()) {
        long v = queue.front();
        queue.pop_front();
        if (static_cast<long>(g.children.size()) <= v) g.children.resize(v + 1);
        g.children[v].assign(model.support.size(), -1);
        for (std::size_t k = 0; k < model.support.size(); ++k) {
            const RationalMap& map = model.support.at(k);
            ProjPoint w = apply(map, g.nodes[static_cast<std::size_t>(v)]);
            if (weil_height(w) > bound) {
                if (!g.escaped_witness) {
                    g.escaped_witness = w;
                    g.escaped_word = path_word(g, v, model, static_cast<int>(k));
                }
                if (stop_on_escape) return g;
                continue;
            }
            auto [it, inserted] = g.index.emplace(w, static_cast<long>(g.nodes.size()));
            if (inserted) {
                g.nodes.push_back(w);
                g.parent.push_back(v);
                g.parent_map.push_back(static_cast<int>(k));
                if (static_cast<long>(g.nodes.size()) > opts.node_cap)
                    throw ResourceError("retained-orbit node cap exceeded");
                queue.push_back(it->second);
            }
            g.children[v][k] = it->second;
        }
    }
    return g;
}

} // namespace

FiniteOrbitDecision finite_sorbit_decide(const OrbitModel& model, const ProjPoint& q,
                                         const DecisionOptions& opts) {
    RetainedGraph g = explore_retained(model, q, opts, /*stop_on_escape=*/true);
    FiniteOrbitDecision out;
    out.constants_status = model.control.set_constant.status;
    if (g.escaped_witness) {
        out.finite = false;
        out.witness = g.escaped_witness;
        out.witness_word = g.escaped_word;
        return out;
    }
    out.finite = true;
    out.orbit = g.nodes;
    return out;
}

Word escape_function(const OrbitModel& model, const std::vector<ProjPoint>& f_set,
                     const DecisionOptions& opts) {
    if (f_set.empty()) return Word{};
    if (!model.is_finite())
        throw ConfigError("escape construction needs a finite set of maps");

    auto in_f = [&f_set](const ProjPoint& p) {
        return std::find(f_set.begin(), f_set.end(), p) != f_set.end();
    };

    // Stability spot check on F's one-step images: a point just outside F must
    // not map back into F.
    for (const auto& q : f_set) {
        for (const auto& map : model.support.maps()) {
            ProjPoint y = apply(map, q);
            if (in_f(y)) continue;
            for (const auto& map2 : model.support.maps())
                if (in_f(apply(map2, y)))
                    throw MathError("ComplementNotStable",
                                    "the complement of F is not stable under S");
        }
    }

    // For each Q_i, BFS inside F for a word leaving F.
    std::vector<Word> escapes;
    for (const auto& q : f_set) {
        std::unordered_map<ProjPoint, long, ProjPointHash> index;
        std::vector<ProjPoint> nodes{q};
        std::vector<long> parent{-1};
        std::vector<int> parent_map{-1};
        index.emplace(q, 0);
        std::deque<long> queue{0};
        std::optional<Word> found;
        while (!queue.empty() && !found) {
            long v = queue.front();
            queue.pop_front();
            for (std::size_t k = 0; k < model.support.size(); ++k) {
                ProjPoint w = apply(model.support.at(k), nodes[static_cast<std::size_t>(v)]);
                if (!in_f(w)) {
                    std::vector<std::string> labels;
                    for (long u = v; parent[u] >= 0; u = parent[u])
                        labels.push_back(model.support.at(static_cast<std::size_t>(parent_map[u])).label());
                    std::reverse(labels.begin(), labels.end());
                    labels.push_back(model.support.at(k).label());
                    found = Word{std::move(labels)};
                    break;
                }
                auto [it, inserted] = index.emplace(w, static_cast<long>(nodes.size()));
                if (inserted) {
                    nodes.push_back(w);
                    parent.push_back(v);
                    parent_map.push_back(static_cast<int>(k));
                    queue.push_back(it->second);
                    if (static_cast<long>(nodes.size()) > opts.node_cap)
                        throw ResourceError("escape search node cap exceeded");
                }
            }
        }
        if (!found)
            throw MathError("EscapeImpossible",
                            "the closure of " + q.to_string() + " stays inside F");
        escapes.push_back(*found);
    }

    auto eval_word = [&](const Word& w, const ProjPoint& p) {
        ProjPoint cur = p;
        for (const auto& label : w.labels) cur = apply(model.support.at(label), cur);
        return cur;
    };

    // The inductive construction: extend g whenever it still lands in F.
    Word g = escapes[0];
    for (std::size_t m = 1; m < f_set.size(); ++m) {
        ProjPoint image = eval_word(g, f_set[m]);
        if (!in_f(image)) continue;
        auto it = std::find(f_set.begin(), f_set.end(), image);
        std::size_t j = static_cast<std::size_t>(it - f_set.begin());
        Word extended = g;
        for (const auto& label : escapes[j].labels) extended.labels.push_back(label);
        g = std::move(extended);
    }
    // Exact postcondition check; failure means hypothesis (1) was violated.
    for (const auto& q : f_set)
        if (in_f(eval_word(g, q)))
            throw MathError("ComplementNotStable",
                            "escape construction failed: image returned to F");
    return g;
}

WanderingVerdict wandering_classify(const OrbitModel& model, const ProjPoint& start,
                                    const DecisionOptions& opts) {
    RetainedGraph g = explore_retained(model, start, opts, /*stop_on_escape=*/false);
    WanderingVerdict out;
    out.constants_status = model.control.set_constant.status;
    const bool heuristic =
        out.constants_status != CertifiedConstant::Status::Certified;

    std::unordered_map<ProjPoint, bool, ProjPointHash> decided;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        const ProjPoint& q = g.nodes[v];
        auto it = decided.find(q);
        bool finite;
        if (it != decided.end()) {
            finite = it->second;
        } else {
            finite = finite_sorbit_decide(model, q, opts).finite;
            decided.emplace(q, finite);
        }
        if (finite) {
            out.verdict = heuristic ? WanderingVerdict::Verdict::HeuristicOnly
                                    : WanderingVerdict::Verdict::NotAsWandering;
            out.witness_point = q;
            out.witness_word = path_word(g, static_cast<long>(v), model);
            return out;
        }
    }
    out.verdict = heuristic ? WanderingVerdict::Verdict::HeuristicOnly
                            : WanderingVerdict::Verdict::AlmostSurelyWandering;
    return out;
}

const char* to_string(WanderingVerdict::Verdict v) {
    switch (v) {
        case WanderingVerdict::Verdict::AlmostSurelyWandering: return "almost_surely_wandering";
        case WanderingVerdict::Verdict::NotAsWandering: return "not_as_wandering";
        case WanderingVerdict::Verdict::HeuristicOnly: return "heuristic_only";
    }
    return "heuristic_only";
}

namespace {

// Exact solve of A x = b over the rationals by fraction-free (Bareiss)
// elimination after clearing row denominators.
std::vector<Rat> solve_rational(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    const std::size_t n = a.size();
    std::vector<std::vector<Int>> m(n, std::vector<Int>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        Int l = 1;
        for (const auto& v : a[i]) l = lcm(l, denominator(v));
        l = lcm(l, denominator(b[i]));
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = numerator(a[i][j]) * (l / denominator(a[i][j]));
        m[i][n] = numerator(b[i]) * (l / denominator(b[i]));
    }
    Int denom = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t pivot = k + 1;
            while (pivot < n && m[pivot][k] == 0) ++pivot;
            if (pivot == n) throw MathError("SingularSystem", "absorption system singular");
            std::swap(m[k], m[pivot]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j <= n; ++j)
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / denom;
            m[i][k] = 0;
        }
        denom = m[k][k];
    }
    if (m[n - 1][n - 1] == 0)
        throw MathError("SingularSystem", "absorption system singular");
    std::vector<Rat> x(n, Rat(0));
    for (std::size_t k = n; k-- > 0;) {
        Rat acc = Rat(m[k][n]);
        for (std::size_t j = k + 1; j < n; ++j) acc -= Rat(m[k][j]) * x[j];
        x[k] = acc / Rat(m[k][k]);
    }
    return x;
}

} // namespace

FiniteOrbitProbability finite_orbit_probability(const OrbitModel& model,
                                                const ProjPoint& start,
                                                const DecisionOptions& opts) {
    RetainedGraph g = explore_retained(model, start, opts, /*stop_on_escape=*/false);
    FiniteOrbitProbability out;
    out.states = static_cast<long>(g.nodes.size());
    if (g.nodes.empty()) { // start itself already above the bound
        out.probability = Rat(0);
        return out;
    }

    // Classify retained nodes: FINITE-class nodes absorb with p = 1; escaped
    // children absorb with p = 0; the rest are transient variables.
    std::vector<int> cls(g.nodes.size(), 0); // 1 = finite class
    std::unordered_map<ProjPoint, bool, ProjPointHash> decided;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        auto it = decided.find(g.nodes[v]);
        bool finite = (it != decided.end())
                          ? it->second
                          : finite_sorbit_decide(model, g.nodes[v], opts).finite;
        decided.emplace(g.nodes[v], finite);
        cls[v] = finite ? 1 : 0;
    }

    std::vector<long> var_index(g.nodes.size(), -1);
    std::vector<std::size_t> vars;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        if (cls[v] == 0) {
            var_index[v] = static_cast<long>(vars.size());
            vars.push_back(v);
        }
    }
    if (var_index[0] < 0) { // the start is itself finite-class
        out.probability = Rat(1);
        return out;
    }

    // p(v) = sum_k nu_k p(child_k(v)); p = 1 on FINITE, p = 0 on ESCAPED.
    const auto& weights = model.spec.weights();
    std::vector<std::vector<Rat>> a(vars.size(), std::vector<Rat>(vars.size(), Rat(0)));
    std::vector<Rat> b(vars.size(), Rat(0));
    for (std::size_t row = 0; row < vars.size(); ++row) {
        std::size_t v = vars[row];
        a[row][row] = Rat(1);
        for (std::size_t k = 0; k < model.support.size(); ++k) {
            long child = g.children[v][k];
            if (child < 0) continue; // escaped: contributes 0
            if (cls[static_cast<std::size_t>(child)] == 1) {
                b[row] += weights[k].second;
            } else {
                a[row][static_cast<std::size_t>(var_index[child])] -= weights[k].second;
            }
        }
    }
    auto x = solve_rational(std::move(a), std::move(b));
    out.probability = x[static_cast<std::size_t>(var_index[0])];
    return out;
}

FiniteOrbitFrequency finite_orbit_frequency_mc(const OrbitModel& model,
                                               const ProjPoint& start, long trials,
                                               long n_max, std::uint64_t seed) {
    if (!model.is_finite())
        throw ConfigError("the finite-orbit estimator needs a finite set of maps");
    const double bound = model.control.prune_bound();
    FiniteOrbitFrequency out;
    out.trials = trials;
    for (long t = 0; t < trials; ++t) {
        SequenceStream stream(seed, static_cast<std::uint64_t>(t));
        ProjPoint current = start;
        std::unordered_map<ProjPoint, long, ProjPointHash> seen;
        seen.emplace(current, 0);
        bool finite = false, decided = false;
        for (long i = 0; i < n_max; ++i) {
            if (weil_height(current) > bound) { // certified escape: infinite
                decided = true;
                break;
            }
            MapDraw draw = sample_map(model.spec, stream);
            current = apply(model.materialize_draw(draw), current);
            if (!seen.emplace(current, i + 1).second) {
                finite = decided = true;
                break;
            }
        }
        if (finite) ++out.finite_trials;
        if (!decided && weil_height(current) <= bound) ++out.undecided_trials;
    }
    out.frequency = static_cast<double>(out.finite_trials) / static_cast<double>(trials);
    return out;
}

ExpectedCanonicalHeight expected_canonical_height(const OrbitModel& model,
                                                  const ProjPoint& start,
                                                  ExpectedHeightMode mode,
                                                  const ExpectedHeightOptions& opts) {
    ExpectedCanonicalHeight out;
    if (mode == ExpectedHeightMode::MonteCarlo) {
        std::vector<double> values(opts.trials);
        for (long t = 0; t < opts.trials; ++t)
            values[t] = canonical_height(model, SequenceStream(opts.seed, t), start,
                                         opts.eps, opts.orbit)
                            .value;
        auto ms = mean_and_stderr(values);
        out.estimate = ms.mean;
        out.std_error = ms.std_error;
        return out;
    }

    DecisionOptions dopts;
    dopts.node_cap = opts.state_cap;
    dopts.orbit = opts.orbit;
    RetainedGraph g = explore_retained(model, start, dopts, /*stop_on_escape=*/false);

    // Boundary values: expected canonical height of each escaped child,
    // estimated by averaging canonical heights over sampled tails.
    struct Boundary {
        double value;
        double se;
        double radius; // certified truncation bias of the sampled tails
    };
    std::unordered_map<ProjPoint, Boundary, ProjPointHash> boundary;
    std::vector<std::vector<std::pair<long, ProjPoint>>> escaped(g.nodes.size());
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        for (std::size_t k = 0; k < model.support.size(); ++k) {
            if (g.children[v][k] >= 0) continue;
            ProjPoint w = apply(model.support.at(k), g.nodes[v]);
            escaped[v].push_back({static_cast<long>(k), w});
            if (boundary.count(w)) continue;
            std::vector<double> values(opts.boundary_samples);
            double radius = 0.0;
            for (long t = 0; t < opts.boundary_samples; ++t) {
                auto ch = canonical_height(
                    model,
                    SequenceStream(opts.seed ^ 0xb0a7ULL, hash_combine(ProjPointHash{}(w), t)),
                    w, opts.boundary_eps, opts.orbit);
                values[t] = ch.value;
                radius = std::max(radius, ch.certified_radius);
            }
            auto ms = mean_and_stderr(values);
            boundary.emplace(w, Boundary{ms.mean, ms.std_error, radius});
            if (static_cast<long>(boundary.size()) > opts.state_cap)
                throw ResourceError("escaped-boundary set exceeded the cap");
        }
    }
    out.boundary_points = static_cast<long>(boundary.size());
    out.states = static_cast<long>(g.nodes.size());

    // Interior system E(v) = sum_k nu_k E(child)/d_k, exact in the measure,
    // floating in heights. Solved densely; the retained region is small.
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0), rhs_var(n, 0.0), rhs_bias(n, 0.0);
    const auto& weights = model.spec.weights();
    for (std::size_t v = 0; v < n; ++v) {
        a[v][v] = 1.0;
        for (std::size_t k = 0; k < model.support.size(); ++k) {
            long child = g.children[v][k];
            if (child < 0) continue;
            double nu = weights[k].second.convert_to<double>();
            double d = static_cast<double>(model.support.at(k).degree());
            a[v][static_cast<std::size_t>(child)] -= nu / d;
        }
        for (const auto& [k, w] : escaped[v]) {
            double nu = weights[static_cast<std::size_t>(k)].second.convert_to<double>();
            double d = static_cast<double>(model.support.at(static_cast<std::size_t>(k)).degree());
            const Boundary& bd = boundary.at(w);
            rhs[v] += nu / d * bd.value;
            rhs_var[v] += (nu / d * bd.se) * (nu / d * bd.se);
            rhs_bias[v] += nu / d * bd.radius;
        }
    }
    // Invert explicitly (the retained region is small); the estimate is
    // inv[0] . rhs and independent boundary errors propagate through the same
    // row of the inverse.
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    {
        std::vector<std::vector<double>> work = a;
        for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t pivot = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::fabs(work[i][k]) > std::fabs(work[pivot][k])) pivot = i;
            std::swap(work[k], work[pivot]);
            std::swap(inv[k], inv[pivot]);
            double pv = work[k][k];
            if (pv == 0.0) throw MathError("SingularSystem", "expected-height system singular");
            for (std::size_t j = 0; j < n; ++j) {
                work[k][j] /= pv;
                inv[k][j] /= pv;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == k) continue;
                double f = work[i][k];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    work[i][j] -= f * work[k][j];
                    inv[i][j] -= f * inv[k][j];
                }
            }
        }
    }
    double value = 0.0, var = 0.0, bias = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        value += inv[0][j] * rhs[j];
        var += inv[0][j] * inv[0][j] * rhs_var[j];
        bias += std::fabs(inv[0][j]) * rhs_bias[j];
    }
    out.estimate = value;
    out.std_error = std::sqrt(var) + bias;
    return out;
}

CensusResult census(const OrbitModel& model, SequenceStream stream, const ProjPoint& start,
                    long n_max, std::vector<double> b_grid, const OrbitOptions& opts) {
    OrbitRecord record = iterate_orbit(model, stream, start, n_max, opts);
    CensusResult out;
    out.wandering_warning = (record.status == OrbitRecord::Status::CycleDetected);
    for (double h : record.heights) out.wandering_warning |= (h == 0.0);

    if (b_grid.empty()) {
        double lo = 1e300, hi = 0.0;
        for (double h : record.heights) {
            if (h > 0) lo = std::min(lo, h);
            hi = std::max(hi, h);
        }
        if (hi <= 0) throw MathError("DegenerateOrbit", "all heights are zero");
        lo = std::max(lo * 1.05, 1e-9);
        hi *= 1.05;
        const int points = static_cast<int>(2 * (n_max + 1));
        for (int j = 0; j < points; ++j)
            b_grid.push_back(lo * std::pow(hi / lo, static_cast<double>(j) / (points - 1)));
    }
    std::sort(b_grid.begin(), b_grid.end());
    std::vector<double> xs, ys;
    for (double b : b_grid) {
        long count = 0;
        for (double h : record.heights) count += (h <= b);
        out.counts.push_back({b, count});
        if (count >= 1) {
            xs.push_back(std::log(b));
            ys.push_back(static_cast<double>(count));
        }
    }
    out.slope = linear_fit(xs, ys).slope;
    bool morphisms = true;
    if (model.is_finite())
        for (const auto& m : model.support.maps()) morphisms &= m.is_morphism_like();
    if (morphisms) {
        double delta = std::exp(expectation_log_deg(model.spec, model.support));
        out.reference_log = 1.0 / std::log(delta);
        out.reference_direct = 1.0 / delta;
    }
    return out;
}

} // namespace randdyn
