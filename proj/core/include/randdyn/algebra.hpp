#pragma once

// Exact multivariate homogeneous forms over the integers: evaluation,
// substitution, gcd and content/primitive splitting. All values are immutable
// after construction and safe to share across threads.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "randdyn/bigint.hpp"

namespace randdyn {

inline constexpr std::size_t kDefaultTermCap = 1'000'000;

// Exponent tuple of a single term. The owning form keeps the invariant that
// every monomial has the form's total degree.
struct Monomial {
    std::vector<std::uint32_t> exp;

    std::uint32_t total_degree() const {
        std::uint32_t t = 0;
        for (auto e : exp) t += e;
        return t;
    }
    bool operator==(const Monomial& o) const { return exp == o.exp; }
};

// Graded lexicographic, leading term first: higher total degree sorts first,
// ties broken by lexicographically larger exponent vector (X0 heaviest).
struct TermOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const auto ta = a.total_degree(), tb = b.total_degree();
        if (ta != tb) return ta > tb;
        return a.exp > b.exp;
    }
};

class HomogeneousForm {
public:
    using TermMap = std::map<Monomial, Int, TermOrder>;

    // The zero form: empty terms, degree 0 by convention.
    static HomogeneousForm zero(int n_vars);
    static HomogeneousForm constant(int n_vars, Int c);
    static HomogeneousForm variable(int n_vars, int index);
    // Single term c * prod X_i^{m.exp[i]}; c may be zero (gives the zero form).
    static HomogeneousForm monomial(int n_vars, Monomial m, Int c);
    // Validates homogeneity of the given terms; drops zero coefficients.
    static HomogeneousForm from_terms(int n_vars, TermMap terms);

    int n_vars() const { return n_vars_; }
    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || degree_ == 0; }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    // Leading (graded-lex first) coefficient; 0 for the zero form.
    Int leading_coefficient() const;
    Int max_abs_coefficient() const;
    Int l1_norm() const; // sum of |coefficients|

    bool operator==(const HomogeneousForm& o) const {
        return n_vars_ == o.n_vars_ && degree_ == o.degree_ && terms_ == o.terms_;
    }

    HomogeneousForm operator-() const;
    // Addition requires equal degree unless one side is zero.
    HomogeneousForm operator+(const HomogeneousForm& o) const;
    HomogeneousForm operator-(const HomogeneousForm& o) const;
    HomogeneousForm mul(const HomogeneousForm& o, std::size_t term_cap = kDefaultTermCap) const;
    HomogeneousForm operator*(const HomogeneousForm& o) const { return mul(o); }
    HomogeneousForm mul_scalar(const Int& c) const;
    HomogeneousForm pow(std::uint32_t e, std::size_t term_cap = kDefaultTermCap) const;

    std::string to_string() const;

private:
    HomogeneousForm(int n_vars, int degree, TermMap terms)
        : n_vars_(n_vars), degree_(degree), terms_(std::move(terms)) {}

    int n_vars_ = 0;
    int degree_ = 0;
    TermMap terms_;
};

// Exact value of F at integer coordinates. Throws ConfigError on arity mismatch.
Int form_eval(const HomogeneousForm& f, const std::vector<Int>& coords);

// F(G_0, ..., G_N) for forms G_i of a common degree e; the result is
// homogeneous of degree deg(F) * e. Throws ConfigError on degree mismatch.
HomogeneousForm form_substitute(const HomogeneousForm& f,
                                const std::vector<HomogeneousForm>& g,
                                std::size_t term_cap = kDefaultTermCap);

// Gcd over the rationals of a nonempty list, normalized to primitive integer
// coefficients with positive leading coefficient. Divides every input exactly.
HomogeneousForm form_gcd(const std::vector<HomogeneousForm>& forms);

// F = content * primitive with content > 0; the primitive part keeps F's sign.
std::pair<Int, HomogeneousForm> content_and_primitive(const HomogeneousForm& f);

// Exact division; nullopt when g does not divide f.
std::optional<HomogeneousForm> divide_exact(const HomogeneousForm& f,
                                            const HomogeneousForm& g);

} // namespace randdyn
