#include <doctest.h>

#include "randdyn/algebra.hpp"
#include "randdyn/maps.hpp"
#include "randdyn/rng.hpp"

using namespace randdyn;

namespace {

HomogeneousForm F(const std::string& text, int n_vars) { return parse_form(text, n_vars); }

// Independent small-form generator for property tests.
HomogeneousForm random_form(std::uint64_t seed, long index, int n_vars, int degree) {
    HomogeneousForm acc = HomogeneousForm::zero(n_vars);
    long sub = 0;
    // A handful of random monomials of the given degree.
    for (int t = 0; t < 4; ++t) {
        Monomial m{std::vector<std::uint32_t>(n_vars, 0)};
        int left = degree;
        for (int i = 0; i + 1 < n_vars; ++i) {
            auto r = threefry2x64({static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(sub++)},
                                  {seed, 77});
            int e = static_cast<int>(r[0] % (left + 1));
            m.exp[i] = e;
            left -= e;
        }
        m.exp[n_vars - 1] = left;
        auto r = threefry2x64({static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(sub++)},
                              {seed, 78});
        long c = static_cast<long>(r[0] % 11) - 5;
        if (c == 0) continue;
        HomogeneousForm term = HomogeneousForm::monomial(n_vars, m, Int(c));
        acc = acc.is_zero() ? term : acc + term;
    }
    return acc;
}

std::vector<Int> random_coords(std::uint64_t seed, long index, int n_vars) {
    std::vector<Int> v;
    for (int i = 0; i < n_vars; ++i) {
        auto r = threefry2x64({static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(i)},
                              {seed, 79});
        v.emplace_back(static_cast<long>(r[0] % 21) - 10);
    }
    return v;
}

} // namespace

TEST_CASE("form_eval matches hand expansion") {
    CHECK(form_eval(F("2*X1^2", 2), {Int(1), Int(3)}) == 18);
    CHECK(form_eval(F("X0*X1", 2), {Int(0), Int(5)}) == 0);
    CHECK(form_eval(F("X0^2+X0*X1", 2), {Int(2), Int(3)}) == 10);
}

TEST_CASE("form_eval rejects arity mismatch") {
    CHECK_THROWS_AS(form_eval(F("X0*X1", 2), {Int(1)}), ConfigError);
}

TEST_CASE("form_substitute on monomial tuples") {
    auto r1 = form_substitute(F("X0*X1", 2), {F("X1^2", 2), F("X0^2", 2)});
    CHECK(r1 == F("X0^2*X1^2", 2));
    auto r2 = form_substitute(F("X0^2", 2), {F("X0^2", 2), F("X1^2", 2)});
    CHECK(r2 == F("X0^4", 2));
}

TEST_CASE("form_substitute hand-expanded quadratic") {
    auto r = form_substitute(F("X0^2+X0*X1", 2), {F("X0^2+X0*X1", 2), F("X1^2", 2)});
    // Hand expansion: (X0^2+X0X1)^2 + (X0^2+X0X1)X1^2; cross-check F(G)(1,1) = F(2,1) = 6.
    CHECK(r == F("X0^4+2*X0^3*X1+2*X0^2*X1^2+X0*X1^3", 2));
    CHECK(form_eval(r, {Int(1), Int(1)}) == 6);
}

TEST_CASE("form_substitute degree is multiplicative before reduction") {
    const std::uint64_t seed = 11;
    for (long i = 0; i < 40; ++i) {
        HomogeneousForm f = random_form(seed, i, 2, 2 + (i % 3));
        HomogeneousForm g0 = random_form(seed, 100 + i, 2, 2);
        HomogeneousForm g1 = random_form(seed, 200 + i, 2, 2);
        if (f.is_zero() || g0.is_zero() || g1.is_zero()) continue;
        auto r = form_substitute(f, {g0, g1});
        if (!r.is_zero()) CHECK(r.degree() == f.degree() * 2);
    }
}

TEST_CASE("form_substitute rejects degree mismatch") {
    CHECK_THROWS_AS(form_substitute(F("X0*X1", 2), {F("X0^2", 2), F("X1", 2)}),
                    ConfigError);
}

TEST_CASE("form_gcd on the stated examples") {
    CHECK(form_gcd({F("X0^2*X1", 2), F("X0*X1^2", 2)}) == F("X0*X1", 2));
    auto unit = form_gcd({F("X0^2+X0*X1", 2), F("X1^2", 2)});
    CHECK(unit.degree() == 0);
    CHECK(unit == F("1", 2));
    CHECK(form_gcd({F("X0^2*X1*X2", 3), F("X0*X1^2*X2", 3), F("X0*X1*X2^2", 3)}) ==
          F("X0*X1*X2", 3));
}

TEST_CASE("form_gcd divides every input exactly") {
    const std::uint64_t seed = 12;
    for (long i = 0; i < 25; ++i) {
        HomogeneousForm common = random_form(seed, 300 + i, 3, 1 + (i % 2));
        HomogeneousForm a = random_form(seed, 400 + i, 3, 2);
        HomogeneousForm b = random_form(seed, 500 + i, 3, 2);
        if (common.is_zero() || a.is_zero() || b.is_zero()) continue;
        HomogeneousForm fa = a.mul(common), fb = b.mul(common);
        HomogeneousForm g = form_gcd({fa, fb});
        auto qa = divide_exact(fa, g);
        auto qb = divide_exact(fb, g);
        REQUIRE(qa.has_value());
        REQUIRE(qb.has_value());
        CHECK(qa->mul(g) == fa);
        CHECK(qb->mul(g) == fb);
        // The planted factor must divide the gcd.
        CHECK(divide_exact(g, form_gcd({common})).has_value());
    }
}

TEST_CASE("content_and_primitive") {
    auto [c1, p1] = content_and_primitive(F("4*X0^2+6*X1^2", 2));
    CHECK(c1 == 2);
    CHECK(p1 == F("2*X0^2+3*X1^2", 2));

    auto [c2, p2] = content_and_primitive(F("X0", 2));
    CHECK(c2 == 1);
    CHECK(p2 == F("X0", 2));

    auto [c3, p3] = content_and_primitive(F("-6*X0*X1", 2));
    CHECK(c3 == 6);
    CHECK(p3 == F("-X0*X1", 2));
}

TEST_CASE("content of the zero form is an error") {
    CHECK_THROWS_AS(content_and_primitive(HomogeneousForm::zero(2)), MathError);
}

TEST_CASE("evaluation is a ring homomorphism on random inputs") {
    const std::uint64_t seed = 13;
    for (long i = 0; i < 50; ++i) {
        HomogeneousForm f = random_form(seed, 600 + i, 3, 2);
        HomogeneousForm g = random_form(seed, 700 + i, 3, 2);
        auto x = random_coords(seed, 800 + i, 3);
        if (!f.is_zero() && !g.is_zero()) {
            CHECK(form_eval(f + g, x) == form_eval(f, x) + form_eval(g, x));
            CHECK(form_eval(f.mul(g), x) == form_eval(f, x) * form_eval(g, x));
        }
    }
}

TEST_CASE("printing emits canonical graded-lex order and parses back") {
    auto f = F("X1^2 + 2*X0^2 - 3*X0*X1", 2);
    CHECK(f.to_string() == "2*X0^2 - 3*X0*X1 + X1^2");
    CHECK(parse_form(f.to_string(), 2) == f);
}

TEST_CASE("term cap fails loudly") {
    // (X0 + X1 + X2)^k has lots of terms; a tiny cap must throw.
    auto f = F("X0+X1+X2", 3);
    CHECK_THROWS_AS(f.pow(20, /*term_cap=*/10), ResourceError);
}
