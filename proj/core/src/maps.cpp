#include "randdyn/maps.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace randdyn {

std::string to_string(MorphismStatus s) {
    switch (s) {
        case MorphismStatus::Unknown: return "unknown";
        case MorphismStatus::CertifiedMorphism: return "certified_morphism";
        case MorphismStatus::CertifiedNonMorphism: return "certified_non_morphism";
        case MorphismStatus::UserAssertedMorphism: return "user_asserted_morphism";
    }
    return "unknown";
}

std::string Word::composition_order_string() const {
    if (labels.empty()) return "id";
    std::ostringstream out;
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
        if (it != labels.rbegin()) out << " o ";
        out << *it;
    }
    return out.str();
}

RationalMap RationalMap::from_forms(std::vector<HomogeneousForm> forms, std::string label) {
    return reduce(std::move(forms), std::move(label));
}

RationalMap RationalMap::identity(int dimension) {
    std::vector<HomogeneousForm> forms;
    for (int i = 0; i <= dimension; ++i)
        forms.push_back(HomogeneousForm::variable(dimension + 1, i));
    return reduce(std::move(forms), "id").with_status(MorphismStatus::CertifiedMorphism);
}

RationalMap RationalMap::with_label(std::string label) const {
    RationalMap m = *this;
    m.label_ = std::move(label);
    return m;
}

RationalMap RationalMap::with_status(MorphismStatus s) const {
    RationalMap m = *this;
    m.status_ = s;
    return m;
}

std::size_t RationalMap::total_terms() const {
    std::size_t t = 0;
    for (const auto& f : forms_) t += f.term_count();
    return t;
}

std::string RationalMap::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < forms_.size(); ++i) {
        if (i > 0) out << " : ";
        out << forms_[i].to_string();
    }
    return out.str();
}

void MapSet::add(RationalMap map) {
    if (map.label().empty()) throw ConfigError("map needs a label");
    if (index_.count(map.label())) throw ConfigError("duplicate map label: " + map.label());
    if (!maps_.empty() && map.dimension() != dimension())
        throw ConfigError("maps of mixed ambient dimension");
    index_.emplace(map.label(), maps_.size());
    maps_.push_back(std::move(map));
}

const RationalMap& MapSet::at(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw ConfigError("unknown map label: " + label);
    return maps_[it->second];
}

bool MapSet::contains(const std::string& label) const { return index_.count(label) > 0; }

int MapSet::dimension() const {
    if (maps_.empty()) throw ConfigError("empty map set");
    return maps_[0].dimension();
}

RationalMap reduce(std::vector<HomogeneousForm> forms, std::string label) {
    if (forms.size() < 2) throw ConfigError("a map needs at least two coordinates");
    bool all_zero = true;
    int degree = -1;
    for (const auto& f : forms) {
        if (f.is_zero()) continue;
        all_zero = false;
        if (degree < 0) degree = f.degree();
        else if (f.degree() != degree)
            throw ConfigError("coordinates of unequal degree");
    }
    if (all_zero) throw ConfigError("all coordinates are zero");

    HomogeneousForm g = form_gcd(forms); // primitive, positive leading coeff
    if (g.degree() > 0) {
        for (auto& f : forms)
            if (!f.is_zero()) f = *divide_exact(f, g);
        degree -= g.degree();
    }
    Int content = 0;
    for (const auto& f : forms)
        if (!f.is_zero()) content = gcd(content, content_and_primitive(f).first);
    content = abs(content);
    if (content > 1) {
        HomogeneousForm cf = HomogeneousForm::constant(static_cast<int>(forms.size()), content);
        for (auto& f : forms)
            if (!f.is_zero()) f = *divide_exact(f, cf);
    }
    // Canonical tuple sign: first nonzero coordinate gets a positive leading
    // coefficient.
    for (const auto& f : forms) {
        if (f.is_zero()) continue;
        if (f.leading_coefficient() < 0)
            for (auto& h : forms) h = -h;
        break;
    }
    if (degree < 1)
        throw ConfigError("map reduces to a constant tuple");
    return RationalMap(std::move(forms), degree, std::move(label));
}

RationalMap compose(const RationalMap& f, const RationalMap& g, std::size_t term_cap) {
    if (f.dimension() != g.dimension())
        throw ConfigError("composition of maps on different spaces");
    std::vector<HomogeneousForm> out;
    out.reserve(f.forms().size());
    for (const auto& fi : f.forms())
        out.push_back(form_substitute(fi, g.forms(), term_cap));
    RationalMap r = reduce(std::move(out));
    if (f.is_morphism_like() && g.is_morphism_like())
        r = r.with_status(f.morphism_status() == MorphismStatus::CertifiedMorphism &&
                                  g.morphism_status() == MorphismStatus::CertifiedMorphism
                              ? MorphismStatus::CertifiedMorphism
                              : MorphismStatus::UserAssertedMorphism);
    return r;
}

std::optional<RationalMap> ComposeCache::find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ComposeCache::store(const std::string& key, const RationalMap& map) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.emplace(key, map);
}

RationalMap word_compose(const MapSet& set, const Word& word, std::size_t term_cap,
                         ComposeCache* cache) {
    RationalMap acc = RationalMap::identity(set.dimension());
    std::string key;
    for (const auto& label : word.labels) {
        const RationalMap& step = set.at(label);
        key += label;
        key += '\x1f';
        if (cache) {
            if (auto hit = cache->find(key)) {
                acc = *hit;
                continue;
            }
        }
        acc = compose(step, acc, term_cap);
        if (cache) cache->store(key, acc);
    }
    return acc;
}

bool is_indeterminate_at(const RationalMap& f, const ProjPoint& p) {
    if (p.dimension() != f.dimension())
        throw ConfigError("point/map dimension mismatch");
    for (const auto& form : f.forms())
        if (form_eval(form, p.coords()) != 0) return false;
    return true;
}

namespace {

// Fraction-free Bareiss determinant of a square integer matrix.
Int bareiss_determinant(std::vector<std::vector<Int>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    Int denom = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t pivot = k + 1;
            while (pivot < n && m[pivot][k] == 0) ++pivot;
            if (pivot == n) return 0;
            std::swap(m[k], m[pivot]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / denom;
            }
            m[i][k] = 0;
        }
        denom = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

// Coefficient vector (a_0..a_d) of a binary form sum a_i X0^{d-i} X1^i.
std::vector<Int> binary_coefficients(const HomogeneousForm& f, int d) {
    std::vector<Int> a(d + 1, Int(0));
    for (const auto& [m, c] : f.terms()) a[m.exp[1]] = c;
    return a;
}

} // namespace

Int resultant_p1(const RationalMap& f) {
    if (f.dimension() != 1)
        throw ConfigError("resultant requires a map on the line");
    const int d = f.degree();
    auto a = binary_coefficients(f.forms()[0], d);
    auto b = binary_coefficients(f.forms()[1], d);
    std::vector<std::vector<Int>> m(2 * d, std::vector<Int>(2 * d, Int(0)));
    for (int row = 0; row < d; ++row)
        for (int i = 0; i <= d; ++i) m[row][row + i] = a[i];
    for (int row = 0; row < d; ++row)
        for (int i = 0; i <= d; ++i) m[d + row][row + i] = b[i];
    return bareiss_determinant(std::move(m));
}

MorphismCheckResult morphism_check(const RationalMap& f, int grid_radius) {
    MorphismCheckResult result;
    if (f.dimension() == 1) {
        result.resultant = resultant_p1(f);
        result.status = (result.resultant != 0) ? MorphismStatus::CertifiedMorphism
                                                : MorphismStatus::CertifiedNonMorphism;
        return result;
    }
    // Search a small rational grid for a common zero; primitive representatives
    // with a positive first nonzero coordinate cover each point once.
    const int n = f.dimension() + 1;
    std::vector<Int> coords(n, Int(0));
    std::function<bool(int)> walk = [&](int i) -> bool {
        if (i == n) {
            bool nonzero = false;
            for (const auto& c : coords) nonzero |= (c != 0);
            if (!nonzero) return false;
            for (const auto& form : f.forms())
                if (form_eval(form, coords) != 0) return false;
            return true;
        }
        for (int v = -grid_radius; v <= grid_radius; ++v) {
            coords[i] = v;
            if (walk(i + 1)) return true;
        }
        return false;
    };
    if (walk(0)) {
        result.status = MorphismStatus::CertifiedNonMorphism;
        result.witness = ProjPoint(coords);
    } else {
        result.status = MorphismStatus::Unknown;
    }
    return result;
}

namespace {

// --- map grammar -------------------------------------------------------------
//
// poly   := product (('+'|'-') product)*
// product:= unary (('*'|'/') unary)*        (division by nonzero constants)
// unary  := ('-'|'+') unary | power
// power  := atom ('^' INT)?
// atom   := INT | VAR | '(' poly ')'
// VAR    := 'X'digits (projective) or 'x' (affine shorthand on the line)

struct RawPoly {
    int n_vars = 0;
    std::map<Monomial, Rat, TermOrder> terms;

    static RawPoly constant(int n_vars, Rat c) {
        RawPoly p{n_vars, {}};
        if (c != 0) p.terms.emplace(Monomial{std::vector<std::uint32_t>(n_vars, 0)}, c);
        return p;
    }
    static RawPoly variable(int n_vars, int i) {
        RawPoly p{n_vars, {}};
        Monomial m{std::vector<std::uint32_t>(n_vars, 0)};
        m.exp[i] = 1;
        p.terms.emplace(std::move(m), Rat(1));
        return p;
    }
    bool is_constant() const {
        return terms.empty() ||
               (terms.size() == 1 && terms.begin()->first.total_degree() == 0);
    }
    Rat constant_value() const {
        return terms.empty() ? Rat(0) : terms.begin()->second;
    }
};

RawPoly raw_add(const RawPoly& a, const RawPoly& b, int sign) {
    RawPoly r = a;
    for (const auto& [m, c] : b.terms) {
        Rat v = (sign < 0) ? Rat(-c) : c;
        auto [it, inserted] = r.terms.emplace(m, v);
        if (!inserted) {
            it->second += v;
            if (it->second == 0) r.terms.erase(it);
        }
    }
    return r;
}

RawPoly raw_mul(const RawPoly& a, const RawPoly& b) {
    RawPoly r{a.n_vars, {}};
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            Monomial m{std::vector<std::uint32_t>(a.n_vars)};
            for (int i = 0; i < a.n_vars; ++i) m.exp[i] = ma.exp[i] + mb.exp[i];
            Rat v = ca * cb;
            auto [it, inserted] = r.terms.emplace(std::move(m), v);
            if (!inserted) {
                it->second += v;
                if (it->second == 0) r.terms.erase(it);
            }
        }
    }
    return r;
}

class PolyParser {
public:
    PolyParser(std::string text, int n_vars, bool affine)
        : text_(std::move(text)), n_vars_(n_vars), affine_(affine) {}

    RawPoly parse() {
        RawPoly p = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            throw ConfigError("syntax error at '" + text_.substr(pos_) + "'");
        return p;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    RawPoly parse_sum() {
        RawPoly acc = parse_product();
        while (true) {
            if (eat('+')) acc = raw_add(acc, parse_product(), +1);
            else if (eat('-')) acc = raw_add(acc, parse_product(), -1);
            else return acc;
        }
    }

    RawPoly parse_product() {
        RawPoly acc = parse_unary();
        while (true) {
            if (eat('*')) {
                acc = raw_mul(acc, parse_unary());
            } else if (eat('/')) {
                RawPoly div = parse_unary();
                if (!div.is_constant() || div.constant_value() == 0)
                    throw ConfigError("division is only allowed by nonzero constants");
                Rat inv = Rat(1) / div.constant_value();
                for (auto& [m, c] : acc.terms) c *= inv;
            } else {
                return acc;
            }
        }
    }

    RawPoly parse_unary() {
        if (eat('-')) {
            RawPoly p = parse_unary();
            for (auto& [m, c] : p.terms) c = -c;
            return p;
        }
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    RawPoly parse_power() {
        RawPoly base = parse_atom();
        if (eat('^')) {
            long e = parse_uint("exponent");
            RawPoly acc = RawPoly::constant(n_vars_, Rat(1));
            for (long i = 0; i < e; ++i) acc = raw_mul(acc, base);
            return acc;
        }
        return base;
    }

    RawPoly parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ConfigError("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            RawPoly p = parse_sum();
            if (!eat(')')) throw ConfigError("missing ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return RawPoly::constant(n_vars_, Rat(parse_integer()));
        }
        if (c == 'X' || c == 'x') {
            ++pos_;
            if (affine_) {
                if (c == 'X')
                    throw ConfigError("affine expressions use the variable 'x'");
                return RawPoly::variable(1, 0);
            }
            if (c == 'x') throw ConfigError("projective coordinates use X0..XN");
            long idx = parse_uint("variable index");
            if (idx >= n_vars_)
                throw ConfigError("variable X" + std::to_string(idx) + " out of range");
            return RawPoly::variable(n_vars_, static_cast<int>(idx));
        }
        throw ConfigError(std::string("unexpected character '") + c + "'");
    }

    Int parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw ConfigError("expected an integer");
        return Int(text_.substr(start, pos_ - start));
    }

    long parse_uint(const char* what) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw ConfigError(std::string("expected ") + what);
        return std::stol(text_.substr(start, pos_ - start));
    }

    std::string text_;
    std::size_t pos_ = 0;
    int n_vars_;
    bool affine_;
};

std::vector<std::string> split_coordinates(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    return parts;
}

HomogeneousForm raw_to_form(const RawPoly& p, const Int& scale) {
    HomogeneousForm::TermMap t;
    for (const auto& [m, c] : p.terms) {
        Rat v = c * Rat(scale);
        if (denominator(v) != 1)
            throw ConfigError("internal: denominator clearing failed");
        t.emplace(m, numerator(v));
    }
    return HomogeneousForm::from_terms(p.n_vars, std::move(t));
}

} // namespace

RationalMap parse_map(const std::string& text, int dimension, std::string label) {
    if (dimension < 1) throw ConfigError("dimension must be >= 1");
    const auto parts = split_coordinates(text);
    const bool affine = (dimension == 1 && parts.size() == 1);
    if (!affine && static_cast<int>(parts.size()) != dimension + 1)
        throw ConfigError("expected " + std::to_string(dimension + 1) +
                          " coordinates separated by ':'");

    std::vector<RawPoly> polys;
    for (const auto& part : parts)
        polys.push_back(PolyParser(part, affine ? 1 : dimension + 1, affine).parse());

    if (affine) {
        // p(x) of degree m becomes [ sum a_j X0^j X1^{m-j} : X1^m ] with x = X0/X1.
        const RawPoly& p = polys[0];
        std::uint32_t m = 0;
        for (const auto& [mon, c] : p.terms) m = std::max(m, mon.exp[0]);
        RawPoly f0{2, {}};
        for (const auto& [mon, c] : p.terms) {
            Monomial q{std::vector<std::uint32_t>{mon.exp[0], m - mon.exp[0]}};
            f0.terms.emplace(std::move(q), c);
        }
        RawPoly f1{2, {}};
        f1.terms.emplace(Monomial{std::vector<std::uint32_t>{0, m}}, Rat(1));
        polys = {f0, f1};
    } else {
        for (const auto& p : polys) {
            std::uint32_t deg = 0;
            bool first = true;
            for (const auto& [mon, c] : p.terms) {
                if (first) {
                    deg = mon.total_degree();
                    first = false;
                } else if (mon.total_degree() != deg) {
                    throw ConfigError("inhomogeneous coordinate: " + text);
                }
            }
        }
    }

    // Clear denominators tuple-wide so the projective map is unchanged.
    Int scale = 1;
    for (const auto& p : polys)
        for (const auto& [m, c] : p.terms) scale = lcm(scale, denominator(c));
    std::vector<HomogeneousForm> forms;
    forms.reserve(polys.size());
    for (const auto& p : polys) forms.push_back(raw_to_form(p, scale));
    return reduce(std::move(forms), std::move(label));
}

HomogeneousForm parse_form(const std::string& text, int n_vars) {
    RawPoly p = PolyParser(text, n_vars, /*affine=*/false).parse();
    std::uint32_t deg = 0;
    bool first = true;
    for (const auto& [mon, c] : p.terms) {
        if (first) {
            deg = mon.total_degree();
            first = false;
        } else if (mon.total_degree() != deg) {
            throw ConfigError("inhomogeneous form: " + text);
        }
    }
    Int scale = 1;
    for (const auto& [m, c] : p.terms) scale = lcm(scale, denominator(c));
    return raw_to_form(p, scale);
}

DegreeIndependenceReport degree_independence_check(const MapSet& set, int depth,
                                                   std::size_t term_cap) {
    if (depth < 1) throw ConfigError("degree independence depth must be >= 1");
    DegreeIndependenceReport report;
    report.depth = depth;
    // DFS over words sharing composed prefixes.
    std::function<void(const RationalMap&, Word&, int)> walk =
        [&](const RationalMap& acc, Word& word, int remaining) {
            if (!word.empty() && acc.degree() <= 1)
                report.violations.push_back({word, acc.degree()});
            if (remaining == 0) return;
            for (const auto& m : set.maps()) {
                word.labels.push_back(m.label());
                walk(compose(m, acc, term_cap), word, remaining - 1);
                word.labels.pop_back();
            }
        };
    Word w;
    walk(RationalMap::identity(set.dimension()), w, depth);
    report.pass = report.violations.empty();
    return report;
}

} // namespace randdyn
