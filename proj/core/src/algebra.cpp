#include "randdyn/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace randdyn {

Rat parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ConfigError("empty rational literal");
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) throw ConfigError("bad rational literal: " + text);
        Int d(den);
        if (d == 0) throw ConfigError("zero denominator: " + text);
        return Rat(Int(num), d);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
        if (head.empty() || head == "-" || head == "+") head += "0";
        if (!is_int(head)) throw ConfigError("bad decimal literal: " + text);
        Int scale = 1;
        Int frac = 0;
        for (char c : tail) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw ConfigError("bad decimal literal: " + text);
            frac = frac * 10 + (c - '0');
            scale *= 10;
        }
        Rat r(Int(head), 1);
        Rat f(frac, scale);
        return (s[0] == '-') ? Rat(r - f) : Rat(r + f);
    }
    if (!is_int(s)) throw ConfigError("bad integer literal: " + text);
    return Rat(Int(s), 1);
}

HomogeneousForm HomogeneousForm::zero(int n_vars) {
    return HomogeneousForm(n_vars, 0, {});
}

HomogeneousForm HomogeneousForm::constant(int n_vars, Int c) {
    if (c == 0) return zero(n_vars);
    TermMap t;
    t.emplace(Monomial{std::vector<std::uint32_t>(n_vars, 0)}, std::move(c));
    return HomogeneousForm(n_vars, 0, std::move(t));
}

HomogeneousForm HomogeneousForm::variable(int n_vars, int index) {
    if (index < 0 || index >= n_vars) throw ConfigError("variable index out of range");
    Monomial m{std::vector<std::uint32_t>(n_vars, 0)};
    m.exp[index] = 1;
    TermMap t;
    t.emplace(std::move(m), Int(1));
    return HomogeneousForm(n_vars, 1, std::move(t));
}

HomogeneousForm HomogeneousForm::monomial(int n_vars, Monomial m, Int c) {
    if (static_cast<int>(m.exp.size()) != n_vars)
        throw ConfigError("monomial arity mismatch");
    if (c == 0) return zero(n_vars);
    int deg = static_cast<int>(m.total_degree());
    TermMap t;
    t.emplace(std::move(m), std::move(c));
    return HomogeneousForm(n_vars, deg, std::move(t));
}

HomogeneousForm HomogeneousForm::from_terms(int n_vars, TermMap terms) {
    for (auto it = terms.begin(); it != terms.end();)
        it = (it->second == 0) ? terms.erase(it) : std::next(it);
    if (terms.empty()) return zero(n_vars);
    const int deg = static_cast<int>(terms.begin()->first.total_degree());
    for (const auto& [m, c] : terms) {
        if (static_cast<int>(m.exp.size()) != n_vars)
            throw ConfigError("term arity mismatch");
        if (static_cast<int>(m.total_degree()) != deg)
            throw ConfigError("inhomogeneous terms");
    }
    return HomogeneousForm(n_vars, deg, std::move(terms));
}

Int HomogeneousForm::leading_coefficient() const {
    if (terms_.empty()) return 0;
    return terms_.begin()->second;
}

Int HomogeneousForm::max_abs_coefficient() const {
    Int m = 0;
    for (const auto& [mon, c] : terms_) {
        Int a = abs(c);
        if (a > m) m = a;
    }
    return m;
}

Int HomogeneousForm::l1_norm() const {
    Int s = 0;
    for (const auto& [mon, c] : terms_) s += abs(c);
    return s;
}

HomogeneousForm HomogeneousForm::operator-() const {
    TermMap t = terms_;
    for (auto& [m, c] : t) c = -c;
    return HomogeneousForm(n_vars_, degree_, std::move(t));
}

HomogeneousForm HomogeneousForm::operator+(const HomogeneousForm& o) const {
    if (n_vars_ != o.n_vars_) throw ConfigError("form arity mismatch in +");
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (degree_ != o.degree_) throw ConfigError("degree mismatch in form addition");
    TermMap t = terms_;
    for (const auto& [m, c] : o.terms_) {
        auto [it, inserted] = t.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) t.erase(it);
        }
    }
    if (t.empty()) return zero(n_vars_);
    return HomogeneousForm(n_vars_, degree_, std::move(t));
}

HomogeneousForm HomogeneousForm::operator-(const HomogeneousForm& o) const {
    return *this + (-o);
}

HomogeneousForm HomogeneousForm::mul(const HomogeneousForm& o, std::size_t term_cap) const {
    if (n_vars_ != o.n_vars_) throw ConfigError("form arity mismatch in *");
    if (is_zero() || o.is_zero()) return zero(n_vars_);
    TermMap t;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            Monomial m{std::vector<std::uint32_t>(n_vars_)};
            for (int i = 0; i < n_vars_; ++i) m.exp[i] = ma.exp[i] + mb.exp[i];
            Int prod = ca * cb;
            auto [it, inserted] = t.emplace(std::move(m), std::move(prod));
            if (!inserted) {
                it->second += ca * cb;
                if (it->second == 0) t.erase(it);
            }
            if (t.size() > term_cap)
                throw ResourceError("term cap exceeded in form multiplication");
        }
    }
    if (t.empty()) return zero(n_vars_);
    return HomogeneousForm(n_vars_, degree_ + o.degree_, std::move(t));
}

HomogeneousForm HomogeneousForm::mul_scalar(const Int& c) const {
    if (c == 0) return zero(n_vars_);
    TermMap t = terms_;
    for (auto& [m, v] : t) v *= c;
    return HomogeneousForm(n_vars_, degree_, std::move(t));
}

HomogeneousForm HomogeneousForm::pow(std::uint32_t e, std::size_t term_cap) const {
    HomogeneousForm acc = constant(n_vars_, 1);
    HomogeneousForm base = *this;
    while (e > 0) {
        if (e & 1u) acc = acc.mul(base, term_cap);
        e >>= 1u;
        if (e > 0) base = base.mul(base, term_cap);
    }
    return acc;
}

std::string HomogeneousForm::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Int a = abs(c);
        if (first) {
            if (c < 0) out << "-";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        bool printed_coeff = false;
        if (a != 1 || m.total_degree() == 0) {
            out << a.str();
            printed_coeff = true;
        }
        for (std::size_t i = 0; i < m.exp.size(); ++i) {
            if (m.exp[i] == 0) continue;
            if (printed_coeff) out << "*";
            out << "X" << i;
            if (m.exp[i] > 1) out << "^" << m.exp[i];
            printed_coeff = true;
        }
    }
    return out.str();
}

Int form_eval(const HomogeneousForm& f, const std::vector<Int>& coords) {
    if (static_cast<int>(coords.size()) != f.n_vars())
        throw ConfigError("evaluation arity mismatch");
    Int total = 0;
    for (const auto& [m, c] : f.terms()) {
        Int t = c;
        for (int i = 0; i < f.n_vars(); ++i) {
            if (m.exp[i] == 0) continue;
            if (coords[i] == 0) { t = 0; break; }
            Int p;
            mpz_pow_ui(p.backend().data(), coords[i].backend().data(), m.exp[i]);
            t *= p;
        }
        total += t;
    }
    return total;
}

HomogeneousForm form_substitute(const HomogeneousForm& f,
                                const std::vector<HomogeneousForm>& g,
                                std::size_t term_cap) {
    if (static_cast<int>(g.size()) != f.n_vars())
        throw ConfigError("substitution arity mismatch");
    if (g.empty()) throw ConfigError("empty substitution tuple");
    const int inner_vars = g[0].n_vars();
    int e = -1;
    for (const auto& gi : g) {
        if (gi.n_vars() != inner_vars) throw ConfigError("substitution arity mismatch");
        if (gi.is_zero()) continue;
        if (e < 0) e = gi.degree();
        else if (gi.degree() != e) throw ConfigError("degree mismatch among substituted forms");
    }
    if (e < 0) e = 0; // all zero forms
    if (f.is_zero()) return HomogeneousForm::zero(inner_vars);

    // Cache powers of each g_i up to the largest exponent used.
    std::vector<std::uint32_t> max_exp(g.size(), 0);
    for (const auto& [m, c] : f.terms())
        for (std::size_t i = 0; i < g.size(); ++i)
            max_exp[i] = std::max(max_exp[i], m.exp[i]);
    std::vector<std::vector<HomogeneousForm>> powers(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        powers[i].push_back(HomogeneousForm::constant(inner_vars, 1));
        for (std::uint32_t k = 1; k <= max_exp[i]; ++k)
            powers[i].push_back(powers[i][k - 1].mul(g[i], term_cap));
    }

    HomogeneousForm acc = HomogeneousForm::zero(inner_vars);
    for (const auto& [m, c] : f.terms()) {
        HomogeneousForm t = HomogeneousForm::constant(inner_vars, c);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (m.exp[i] > 0) t = t.mul(powers[i][m.exp[i]], term_cap);
        // Zero g_i annihilate their terms; keep accumulation degree-consistent.
        if (!t.is_zero() && !acc.is_zero() && t.degree() != acc.degree())
            throw ConfigError("degree mismatch among substituted forms");
        acc = acc + t;
        if (acc.term_count() > term_cap)
            throw ResourceError("term cap exceeded in substitution");
    }
    return acc;
}

std::pair<Int, HomogeneousForm> content_and_primitive(const HomogeneousForm& f) {
    if (f.is_zero()) throw MathError("ZeroForm", "content of the zero form");
    Int g = 0;
    for (const auto& [m, c] : f.terms()) {
        g = gcd(g, c);
        if (g == 1 || g == -1) { g = 1; break; }
    }
    g = abs(g);
    HomogeneousForm::TermMap t;
    for (const auto& [m, c] : f.terms()) t.emplace(m, c / g);
    return {g, HomogeneousForm::from_terms(f.n_vars(), std::move(t))};
}

namespace {

// --- gcd machinery (primitive PRS over a main variable) ---------------------
//
// All intermediates stay homogeneous: extracting the coefficient of X_k^j from
// a homogeneous form yields a homogeneous form of degree deg - j, and the
// pseudo-remainder steps combine equal-degree products only.

int degree_in(const HomogeneousForm& f, int var) {
    int d = 0;
    for (const auto& [m, c] : f.terms()) d = std::max(d, static_cast<int>(m.exp[var]));
    return d;
}

// Coefficient of X_var^j, as a form in the remaining variables (same arity).
HomogeneousForm coefficient_of(const HomogeneousForm& f, int var, int j) {
    HomogeneousForm::TermMap t;
    for (const auto& [m, c] : f.terms()) {
        if (static_cast<int>(m.exp[var]) != j) continue;
        Monomial q = m;
        q.exp[var] = 0;
        t.emplace(std::move(q), c);
    }
    return HomogeneousForm::from_terms(f.n_vars(), std::move(t));
}

HomogeneousForm times_power(const HomogeneousForm& f, int var, int j) {
    HomogeneousForm::TermMap t;
    for (const auto& [m, c] : f.terms()) {
        Monomial q = m;
        q.exp[var] += j;
        t.emplace(std::move(q), c);
    }
    return HomogeneousForm::from_terms(f.n_vars(), std::move(t));
}

HomogeneousForm gcd_z(const HomogeneousForm& a, const HomogeneousForm& b);

// Gcd over Z of the coefficient forms of f with respect to `var`.
HomogeneousForm content_wrt(const HomogeneousForm& f, int var) {
    HomogeneousForm acc = HomogeneousForm::zero(f.n_vars());
    for (int j = 0; j <= degree_in(f, var); ++j) {
        HomogeneousForm cj = coefficient_of(f, var, j);
        if (cj.is_zero()) continue;
        acc = acc.is_zero() ? cj : gcd_z(acc, cj);
        if (acc.is_constant() && abs(acc.leading_coefficient()) == 1) break;
    }
    return acc;
}

// Pseudo-remainder of a by b in the main variable; b != 0 in that variable.
HomogeneousForm pseudo_rem(HomogeneousForm r, const HomogeneousForm& b, int var) {
    const int db = degree_in(b, var);
    const HomogeneousForm lcb = coefficient_of(b, var, db);
    while (!r.is_zero() && degree_in(r, var) >= db) {
        const int dr = degree_in(r, var);
        const HomogeneousForm lcr = coefficient_of(r, var, dr);
        r = r.mul(lcb) - times_power(lcr.mul(b), var, dr - db);
    }
    return r;
}

// Gcd over Z (content included, sign unnormalized).
HomogeneousForm gcd_z(const HomogeneousForm& a, const HomogeneousForm& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() || b.is_constant()) {
        // gcd of a constant with a form is the gcd of the integer contents.
        Int ga = content_and_primitive(a).first;
        Int gb = content_and_primitive(b).first;
        return HomogeneousForm::constant(a.n_vars(), gcd(ga, gb));
    }
    // Main variable: lowest index occurring in either operand.
    int var = -1;
    for (int i = 0; i < a.n_vars() && var < 0; ++i)
        if (degree_in(a, i) > 0 || degree_in(b, i) > 0) var = i;

    if (degree_in(a, var) == 0 || degree_in(b, var) == 0) {
        // The main variable misses one operand entirely: recurse on contents.
        HomogeneousForm ca = content_wrt(a, var);
        HomogeneousForm cb = content_wrt(b, var);
        return gcd_z(ca, cb);
    }

    HomogeneousForm ca = content_wrt(a, var);
    HomogeneousForm cb = content_wrt(b, var);
    HomogeneousForm cg = gcd_z(ca, cb);
    HomogeneousForm pa = *divide_exact(a, ca);
    HomogeneousForm pb = *divide_exact(b, cb);
    if (degree_in(pa, var) < degree_in(pb, var)) std::swap(pa, pb);
    while (!pb.is_zero()) {
        HomogeneousForm r = pseudo_rem(pa, pb, var);
        pa = std::move(pb);
        if (r.is_zero()) {
            pb = HomogeneousForm::zero(a.n_vars());
        } else {
            HomogeneousForm rc = content_wrt(r, var);
            pb = *divide_exact(r, rc);
        }
    }
    HomogeneousForm pc = content_wrt(pa, var);
    return cg.mul(*divide_exact(pa, pc));
}

} // namespace

std::optional<HomogeneousForm> divide_exact(const HomogeneousForm& f,
                                            const HomogeneousForm& g) {
    if (g.is_zero()) return std::nullopt;
    if (f.is_zero()) return HomogeneousForm::zero(f.n_vars());
    if (f.n_vars() != g.n_vars()) return std::nullopt;
    HomogeneousForm r = f;
    HomogeneousForm::TermMap q;
    const auto& ltg = *g.terms().begin();
    while (!r.is_zero()) {
        const auto& ltr = *r.terms().begin();
        Monomial m{std::vector<std::uint32_t>(f.n_vars())};
        for (int i = 0; i < f.n_vars(); ++i) {
            if (ltr.first.exp[i] < ltg.first.exp[i]) return std::nullopt;
            m.exp[i] = ltr.first.exp[i] - ltg.first.exp[i];
        }
        Int c = ltr.second / ltg.second;
        if (c * ltg.second != ltr.second) return std::nullopt;
        r = r - HomogeneousForm::monomial(f.n_vars(), m, c).mul(g);
        q.emplace(std::move(m), std::move(c));
    }
    return HomogeneousForm::from_terms(f.n_vars(), std::move(q));
}

HomogeneousForm form_gcd(const std::vector<HomogeneousForm>& forms) {
    if (forms.empty()) throw ConfigError("gcd of empty list");
    HomogeneousForm g = HomogeneousForm::zero(forms[0].n_vars());
    for (const auto& f : forms) {
        if (f.n_vars() != forms[0].n_vars()) throw ConfigError("gcd arity mismatch");
        g = gcd_z(g, f);
    }
    if (g.is_zero()) throw MathError("ZeroForm", "gcd of all-zero forms");
    // Rational gcd normalization: primitive, positive leading coefficient.
    HomogeneousForm p = content_and_primitive(g).second;
    if (p.leading_coefficient() < 0) p = -p;
    return p;
}

} // namespace randdyn
