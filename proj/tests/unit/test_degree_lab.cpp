#include <doctest.h>

#include <cmath>

#include "randdyn/degree_lab.hpp"

using namespace randdyn;

namespace {

MapSet power_pair() {
    MapSet set;
    set.add(parse_map("x^2", 1, "a").with_status(MorphismStatus::CertifiedMorphism));
    set.add(parse_map("x^3", 1, "b").with_status(MorphismStatus::CertifiedMorphism));
    return set;
}

MeasureSpec uniform_ab() {
    return MeasureSpec::finite({{"a", Rat(1, 2)}, {"b", Rat(1, 2)}});
}

MapSet cremona_pair() {
    MapSet set;
    set.add(parse_map("X1*X2 : X0*X2 : X0*X1", 2, "sigma"));
    set.add(parse_map("X0^2 : X1^2 : X2^2", 2, "sq"));
    return set;
}

} // namespace

TEST_CASE("dyndeg_morphism closed forms") {
    auto set = power_pair();
    auto d = dyndeg_morphism(uniform_ab(), set);
    CHECK(d.point_estimate == doctest::Approx(std::sqrt(6.0)).epsilon(1e-10));
    CHECK(d.std_error == 0.0);
    CHECK(d.method == DeltaEstimate::Method::ClosedForm);

    auto solo = MeasureSpec::finite({{"b", Rat(1)}});
    CHECK(dyndeg_morphism(solo, set).point_estimate == doctest::Approx(3.0).epsilon(1e-12));

    auto family = MeasureSpec::power_plus_c(Rat(0));
    MapSet empty;
    CHECK(std::fabs(dyndeg_morphism(family, empty).point_estimate - 2.85052) < 5e-4);
}

TEST_CASE("dyndeg_morphism rejects non-morphism families") {
    auto set = cremona_pair(); // sigma: status unknown until checked
    MapSet checked;
    for (const auto& m : set.maps())
        checked.add(m.with_status(morphism_check(m).status));
    auto spec = MeasureSpec::finite({{"sigma", Rat(1, 2)}, {"sq", Rat(1, 2)}});
    CHECK_THROWS_AS(dyndeg_morphism(spec, checked), MathError);
}

TEST_CASE("birkhoff MC agrees with the closed form") {
    auto set = power_pair();
    auto mc = dyndeg_birkhoff_mc(uniform_ab(), set, 1000, 32, 11);
    CHECK(std::fabs(mc.point_estimate - std::sqrt(6.0)) / std::sqrt(6.0) < 0.01);
    CHECK(mc.std_error > 0.0);
    CHECK(mc.method == DeltaEstimate::Method::BirkhoffMc);

    // Point mass: zero variance, exactly log 2 per trial.
    auto solo = MeasureSpec::finite({{"a", Rat(1)}});
    auto pm = dyndeg_birkhoff_mc(solo, set, 100, 8, 11);
    CHECK(pm.point_estimate == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pm.std_error == 0.0);
}

TEST_CASE("birkhoff MC on the power family") {
    auto spec = MeasureSpec::power_plus_c(Rat(0));
    MapSet empty;
    auto mc = dyndeg_birkhoff_mc(spec, empty, 2000, 50, 17);
    CHECK(std::fabs(mc.point_estimate - 2.85052) / 2.85052 < 0.01);
}

TEST_CASE("kingman estimator is flat for morphism families") {
    auto set = power_pair();
    auto r = dyndeg_kingman_mc(uniform_ab(), set, {1, 2, 3, 4}, 50, 5);
    const double e1 = 0.5 * std::log(6.0);
    for (const auto& level : r.table) {
        CHECK(level.exact); // 2^4 = 16 words fits the default budget
        CHECK(level.value == doctest::Approx(e1).epsilon(1e-10));
    }
    CHECK(r.delta.point_estimate == doctest::Approx(std::sqrt(6.0)).epsilon(1e-9));
}

TEST_CASE("kingman estimator detects the Cremona degree drop") {
    auto set = cremona_pair();
    auto spec = MeasureSpec::finite({{"sigma", Rat(1, 2)}, {"sq", Rat(1, 2)}});
    auto r = dyndeg_kingman_mc(spec, set, {1, 2}, 10, 5);
    REQUIRE(r.table.size() == 2);
    CHECK(r.table[0].value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(r.table[1].value == doctest::Approx(0.375 * std::log(4.0)).epsilon(1e-12));
    CHECK(r.table[1].value < r.table[0].value);
    CHECK(r.delta.method == DeltaEstimate::Method::ExactInf);
    CHECK(r.delta.point_estimate == doctest::Approx(std::exp(0.75 * std::log(2.0))));
}

TEST_CASE("kingman consistency across estimators for morphisms") {
    auto set = power_pair();
    auto spec = uniform_ab();
    auto closed = dyndeg_morphism(spec, set);
    auto birkhoff = dyndeg_birkhoff_mc(spec, set, 500, 64, 23);
    auto kingman = dyndeg_kingman_mc(spec, set, {1, 2, 4}, 64, 23);
    CHECK(std::fabs(birkhoff.point_estimate - closed.point_estimate) <=
          3.0 * birkhoff.std_error + 1e-9);
    CHECK(std::fabs(kingman.delta.point_estimate - closed.point_estimate) <=
          3.0 * (kingman.delta.std_error + birkhoff.std_error) + 1e-6);
}

TEST_CASE("kingman table is sandwiched between its infimum and E_1") {
    auto set = cremona_pair();
    auto spec = MeasureSpec::finite({{"sigma", Rat(1, 2)}, {"sq", Rat(1, 2)}});
    auto r = dyndeg_kingman_mc(spec, set, {1, 2, 3, 4, 6}, 40, 29);
    double final_value = std::log(r.delta.point_estimate);
    double e1 = r.table.front().value;
    for (const auto& level : r.table) {
        CHECK(level.value >= final_value - 3.0 * level.std_error - 1e-9);
        CHECK(level.value <= e1 + 3.0 * level.std_error + 1e-9);
    }
}

TEST_CASE("clt sample: KS distance and the excluded equal-degree case") {
    auto set = power_pair();
    auto z = clt_sample(uniform_ab(), set, 1000, 2000, 31);
    CHECK(z.sigma == doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-12));
    CHECK(z.ks_distance < 0.05);

    MapSet equal;
    equal.add(parse_map("x^2", 1, "a").with_status(MorphismStatus::CertifiedMorphism));
    equal.add(parse_map("2*x^2+1", 1, "b").with_status(MorphismStatus::CertifiedMorphism));
    CHECK_THROWS_AS(clt_sample(uniform_ab(), equal, 100, 100, 31), MathError);
}

TEST_CASE("clt at n = 1 is the two-point distribution") {
    auto set = power_pair();
    auto z = clt_sample(uniform_ab(), set, 1, 2000, 37);
    for (double v : z.z_values) CHECK(std::fabs(std::fabs(v) - 1.0) < 1e-9);
    CHECK(z.ks_distance > 0.25);
    CHECK(z.ks_distance < 0.42);
}

TEST_CASE("clt KS distance is non-increasing in n (one inversion allowed)") {
    auto set = power_pair();
    auto spec = uniform_ab();
    std::vector<double> ks;
    for (long n : {4, 64, 1024}) ks.push_back(clt_sample(spec, set, n, 1500, 41).ks_distance);
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) inversions += (ks[i + 1] > ks[i]);
    CHECK(inversions <= 1);
}

TEST_CASE("doubling-block word structure") {
    auto w2 = doubling_block_word(2, "a", "b");
    CHECK(w2.labels == std::vector<std::string>{"a", "b", "b"});
    auto w3 = doubling_block_word(3, "a", "b");
    CHECK(w3.labels == std::vector<std::string>{"a", "b", "b", "a", "a", "a", "a"});

    auto d2 = doubling_block_degree(2);
    CHECK(d2.e1 == 1);
    CHECK(d2.e2 == 2);
    auto d3 = doubling_block_degree(3);
    CHECK(d3.e1 == 5);
    CHECK(d3.e2 == 2);
    CHECK(d3.total_length == 7);
}

TEST_CASE("doubling-block counted exponents match symbolic composition for k <= 3") {
    auto set = power_pair(); // degrees 2 and 3: deg(word) = 2^e1 3^e2
    for (int k = 1; k <= 3; ++k) {
        auto w = doubling_block_word(k, "a", "b");
        auto d = doubling_block_degree(k);
        auto gamma = word_compose(set, w);
        double expected =
            std::pow(2.0, d.e1.convert_to<double>()) * std::pow(3.0, d.e2.convert_to<double>());
        CHECK(gamma.degree() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("doubling-block subsequence limits (d1, d2) = (2, 3)") {
    const double odd_limit = std::pow(2.0, 2.0 / 3.0) * std::pow(3.0, 1.0 / 3.0);
    const double even_limit = std::pow(2.0, 1.0 / 3.0) * std::pow(3.0, 2.0 / 3.0);
    CHECK(odd_limit == doctest::Approx(2.2894).epsilon(1e-4));
    CHECK(even_limit == doctest::Approx(2.6207).epsilon(1e-4));
    CHECK(doubling_block_degree(13).root_value(2, 3) == doctest::Approx(odd_limit).epsilon(1e-3));
    CHECK(doubling_block_degree(14).root_value(2, 3) == doctest::Approx(even_limit).epsilon(1e-3));
}

TEST_CASE("closed-form exponents agree at odd k and break at even k") {
    // k = 3: (2/3)*8 - 1/3 = 5 and (1/3)*8 - 2/3 = 2: matches the counts.
    auto cf3 = doubling_block_closed_form(3);
    CHECK(cf3.first == doctest::Approx(5.0));
    CHECK(cf3.second == doctest::Approx(2.0));
    // k = 2: the closed form gives non-integers (2/3, 7/3); counting gives (1, 2).
    auto cf2 = doubling_block_closed_form(2);
    CHECK(std::fabs(cf2.first - std::round(cf2.first)) > 0.1);
    auto d2 = doubling_block_degree(2);
    CHECK(d2.e1 == 1);
    CHECK(d2.e2 == 2);
}
