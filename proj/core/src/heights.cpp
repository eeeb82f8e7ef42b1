#include "randdyn/heights.hpp"

#include <algorithm>
#include <cmath>

#include "randdyn/rng.hpp"

namespace randdyn {

double weil_height(const ProjPoint& p) {
    Int m = 0;
    for (const auto& c : p.coords()) {
        Int a = abs(c);
        if (a > m) m = a;
    }
    if (m == 1) return 0.0;
    return log_abs(m);
}

ProjPoint apply(const RationalMap& f, const ProjPoint& p) {
    if (p.dimension() != f.dimension())
        throw ConfigError("point/map dimension mismatch");
    std::vector<Int> values;
    values.reserve(f.forms().size());
    bool all_zero = true;
    for (const auto& form : f.forms()) {
        values.push_back(form_eval(form, p.coords()));
        all_zero &= (values.back() == 0);
    }
    if (all_zero)
        throw IndeterminatePointError("map '" + f.label() + "' undefined at " + p.to_string());
    return ProjPoint(std::move(values));
}

const char* to_string(CertifiedConstant::Status s) {
    switch (s) {
        case CertifiedConstant::Status::Certified: return "certified";
        case CertifiedConstant::Status::Empirical: return "empirical";
        case CertifiedConstant::Status::UserSupplied: return "user_supplied";
    }
    return "empirical";
}

CertifiedConstant c_upper(const RationalMap& f) {
    // |F_i(x)| <=#terms * max|coeff| * H^d, so h(fP) <= d h(P) + log(...).
    // Coordinate gcd cancellation only lowers the left side.
    Int worst = 1;
    for (const auto& form : f.forms()) {
        if (form.is_zero()) continue;
        Int bound = Int(static_cast<long>(form.term_count())) * form.max_abs_coefficient();
        if (bound > worst) worst = bound;
    }
    return CertifiedConstant::certified(worst == 1 ? 0.0 : log_abs(worst));
}

namespace {

// Solve the square rational system M x = rhs by Gaussian elimination; M must
// be nonsingular.
std::vector<Rat> solve_exact(std::vector<std::vector<Rat>> m, std::vector<Rat> rhs) {
    const std::size_t n = m.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        while (pivot < n && m[pivot][k] == 0) ++pivot;
        if (pivot == n) throw MathError("SingularSystem", "cofactor system is singular");
        std::swap(m[k], m[pivot]);
        std::swap(rhs[k], rhs[pivot]);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (m[i][k] == 0) continue;
            Rat factor = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] -= factor * m[k][j];
            rhs[i] -= factor * rhs[k];
        }
    }
    std::vector<Rat> x(n, Rat(0));
    for (std::size_t k = n; k-- > 0;) {
        Rat acc = rhs[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= m[k][j] * x[j];
        x[k] = acc / m[k][k];
    }
    return x;
}

std::vector<Int> binary_coefficients(const HomogeneousForm& f, int d) {
    std::vector<Int> a(d + 1, Int(0));
    for (const auto& [m, c] : f.terms()) a[m.exp[1]] = c;
    return a;
}

HomogeneousForm binary_form_from(const std::vector<Int>& coeffs, int degree) {
    HomogeneousForm::TermMap t;
    for (int i = 0; i <= degree; ++i) {
        if (coeffs[i] == 0) continue;
        Monomial m{std::vector<std::uint32_t>{static_cast<std::uint32_t>(degree - i),
                                              static_cast<std::uint32_t>(i)}};
        t.emplace(std::move(m), coeffs[i]);
    }
    return HomogeneousForm::from_terms(2, std::move(t));
}

} // namespace

CofactorIdentity cofactor_identity(const RationalMap& f) {
    if (f.dimension() != 1)
        throw MathError("NotOnLine", "cofactor construction requires dimension 1");
    const int d = f.degree();
    const Int res = resultant_p1(f);
    if (res == 0)
        throw MathError("NotAMorphism", "cofactor construction needs a nonzero resultant");

    const auto a = binary_coefficients(f.forms()[0], d);
    const auto b = binary_coefficients(f.forms()[1], d);
    // Columns: coefficients of G_0 (d slots) then G_1 (d slots), both written
    // as sum_i g_i X0^{d-1-i} X1^i. Row j is the coefficient of X0^{2d-1-j} X1^j.
    const int n = 2 * d;
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k <= d; ++k) {
            m[i + k][i] = Rat(a[k]);
            m[i + k][d + i] = Rat(b[k]);
        }
    }

    CofactorIdentity out{res,
                         {{HomogeneousForm::zero(2), HomogeneousForm::zero(2)},
                          {HomogeneousForm::zero(2), HomogeneousForm::zero(2)}}};
    for (int target = 0; target < 2; ++target) {
        std::vector<Rat> rhs(n, Rat(0));
        rhs[target == 0 ? 0 : n - 1] = Rat(res);
        auto sol = solve_exact(m, std::move(rhs));
        std::vector<Int> g0(d, Int(0)), g1(d, Int(0));
        for (int i = 0; i < d; ++i) {
            if (denominator(sol[i]) != 1 || denominator(sol[d + i]) != 1)
                throw MathError("CofactorNotIntegral",
                                "cofactor solution is not integral");
            g0[i] = numerator(sol[i]);
            g1[i] = numerator(sol[d + i]);
        }
        out.g[target][0] = binary_form_from(g0, d - 1);
        out.g[target][1] = binary_form_from(g1, d - 1);

        // Verify the identity exactly before trusting any constant built on it.
        HomogeneousForm lhs = out.g[target][0].mul(f.forms()[0]) +
                              out.g[target][1].mul(f.forms()[1]);
        Monomial mono{std::vector<std::uint32_t>{0, 0}};
        mono.exp[target] = static_cast<std::uint32_t>(2 * d - 1);
        HomogeneousForm expect = HomogeneousForm::monomial(2, mono, res);
        if (!(lhs == expect))
            throw MathError("CofactorIdentity", "exact cofactor identity failed");
    }
    return out;
}

CertifiedConstant c_lower_p1(const RationalMap& f) {
    // With coprime coordinates, gcd(F0(x), F1(x)) divides R, and the identity
    // bounds max|F_i(x)| below by |R| H^d / (2d maxG); both losses together
    // give h(fP) >= d h(P) - log(2d maxG).
    CofactorIdentity id = cofactor_identity(f);
    Int max_g = 0;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            max_g = std::max(max_g, id.g[k][j].max_abs_coefficient());
    if (max_g == 0) max_g = 1;
    Int bound = Int(2 * f.degree()) * max_g;
    return CertifiedConstant::certified(bound == 1 ? 0.0 : log_abs(bound));
}

double c_lower_p1_sharp(const RationalMap& f) {
    // Same inequality chain with L1 norms: |G_{k0}(x)| + |G_{k1}(x)| <=
    // (|G_{k0}|_1 + |G_{k1}|_1) H^{d-1}, so the loss is log of the worst pair.
    CofactorIdentity id = cofactor_identity(f);
    Int worst = 1;
    for (int k = 0; k < 2; ++k) {
        Int pair = id.g[k][0].l1_norm() + id.g[k][1].l1_norm();
        if (pair > worst) worst = pair;
    }
    return worst == 1 ? 0.0 : log_abs(worst);
}

namespace {

// Deterministic sample of rational points of height <= 10 (coordinates up to
// e^10 in absolute value).
ProjPoint sample_point(int dimension, std::uint64_t seed, long index) {
    constexpr long kBound = 22026; // floor(e^10)
    while (true) {
        std::vector<Int> coords;
        coords.reserve(dimension + 1);
        bool nonzero = false;
        for (int i = 0; i <= dimension; ++i) {
            auto r = threefry2x64({static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(i)},
                                  {seed, 0x706f696e74ULL});
            long v = static_cast<long>(r[0] % (2 * kBound + 1)) - kBound;
            nonzero |= (v != 0);
            coords.emplace_back(v);
        }
        if (nonzero) return ProjPoint(std::move(coords));
        ++index;
    }
}

} // namespace

CertifiedConstant c_empirical(const RationalMap& f, long n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw ConfigError("c_empirical needs n_samples >= 1");
    double worst = 0.0;
    long used = 0;
    for (long i = 0; i < n_samples; ++i) {
        ProjPoint p = sample_point(f.dimension(), seed, i);
        if (is_indeterminate_at(f, p)) continue;
        ProjPoint q = apply(f, p);
        double gap = std::fabs(weil_height(q) - f.degree() * weil_height(p));
        worst = std::max(worst, gap);
        ++used;
    }
    if (used == 0)
        throw MathError("IndeterminateSampling",
                        "all sampled points were indeterminate");
    return CertifiedConstant::empirical(worst, used);
}

CertifiedConstant c_two_sided(const RationalMap& f, long fallback_samples,
                              std::uint64_t seed) {
    if (f.dimension() == 1) {
        MorphismCheckResult mc = morphism_check(f);
        if (mc.status == MorphismStatus::CertifiedMorphism) {
            CertifiedConstant up = c_upper(f);
            CertifiedConstant lo = c_lower_p1(f);
            return CertifiedConstant::certified(std::max(up.value, lo.value));
        }
    }
    return c_empirical(f, fallback_samples, seed);
}

CertifiedConstant c_set(const MapSet& set, long fallback_samples, std::uint64_t seed) {
    if (set.size() == 0) throw ConfigError("c_set of an empty set");
    CertifiedConstant out = CertifiedConstant::certified(1.0);
    for (const auto& m : set.maps()) {
        CertifiedConstant c = c_two_sided(m, fallback_samples, seed);
        out.value = std::max(out.value, c.value);
        if (c.status != CertifiedConstant::Status::Certified) {
            out.status = c.status;
            out.sample_count = c.sample_count;
        }
    }
    return out;
}

HeightControl make_height_control(const MapSet& set, long fallback_samples,
                                  std::uint64_t seed) {
    HeightControl hc;
    hc.set_constant = c_set(set, fallback_samples, seed);
    double tel = 0.0;
    auto tel_status = CertifiedConstant::Status::Certified;
    long samples = 0;
    int min_deg = 0;
    bool all_morph = true;
    for (const auto& m : set.maps()) {
        min_deg = (min_deg == 0) ? m.degree() : std::min(min_deg, m.degree());
        all_morph &= m.is_morphism_like() ||
                     (m.dimension() == 1 &&
                      morphism_check(m).status == MorphismStatus::CertifiedMorphism);
        double up = c_upper(m).value;
        if (m.dimension() == 1 && resultant_p1(m) != 0) {
            tel = std::max(tel, std::max(up, c_lower_p1_sharp(m)));
        } else {
            CertifiedConstant e = c_empirical(m, fallback_samples, seed);
            tel = std::max(tel, std::max(up, e.value));
            tel_status = CertifiedConstant::Status::Empirical;
            samples = e.sample_count;
        }
    }
    hc.telescope = {tel, tel_status, samples};
    hc.min_degree = min_deg;
    hc.all_morphism_like = all_morph;
    return hc;
}

} // namespace randdyn
