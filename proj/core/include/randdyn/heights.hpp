#pragma once

// Weil heights of rational projective points, pointwise map application, and
// certified height-comparison constants: upper bounds c with
//   h(f(P)) <= d h(P) + c   and (on the line, for morphisms)
//   h(f(P)) >= d h(P) - c   for every rational point P.

#include <cstdint>
#include <vector>

#include "randdyn/maps.hpp"
#include "randdyn/points.hpp"

namespace randdyn {

// Certified float inequalities are asserted everywhere with this slack to
// absorb log rounding; heights themselves carry ~1e-15 relative error.
inline constexpr double kHeightSlack = 1e-9;

// log of the max absolute coordinate, natural-log units.
double weil_height(const ProjPoint& p);

// Evaluate all forms at P and normalize. Throws IndeterminatePointError when
// every form vanishes.
ProjPoint apply(const RationalMap& f, const ProjPoint& p);

struct CertifiedConstant {
    enum class Status { Certified, Empirical, UserSupplied };
    double value = 0.0;
    Status status = Status::Certified;
    long sample_count = 0; // empirical values record the sample that made them

    static CertifiedConstant certified(double v) { return {v, Status::Certified, 0}; }
    static CertifiedConstant empirical(double v, long samples) {
        return {v, Status::Empirical, samples};
    }
};

const char* to_string(CertifiedConstant::Status s);

// Triangle-inequality bound: log max over coordinates of
// (term count * max |coefficient|). Valid for every rational point.
CertifiedConstant c_upper(const RationalMap& f);

// Cofactor forms G of degree d-1 with G_{k0} F0 + G_{k1} F1 = R X_k^{2d-1}
// (R the resultant), verified exactly before use.
struct CofactorIdentity {
    Int resultant;
    HomogeneousForm g[2][2]; // g[k][j]: cofactor of F_j for target X_k^{2d-1}
};
CofactorIdentity cofactor_identity(const RationalMap& f);

// Certified lower-bound constant on the line: log(2d * max |G-coefficients|).
// Requires dimension 1 and a nonzero resultant.
CertifiedConstant c_lower_p1(const RationalMap& f);

// Sharper certified lower constant from the same identity, using L1 norms of
// the cofactor pairs: log(max_k (|G_{k0}|_1 + |G_{k1}|_1)). Always <= c_lower_p1
// and exactly 0 for coordinate power maps.
double c_lower_p1_sharp(const RationalMap& f);

// max over sampled rational points of height <= 10 of |h(fP) - d h(P)|.
CertifiedConstant c_empirical(const RationalMap& f, long n_samples, std::uint64_t seed);

// max(c_upper, c_lower_p1) when both certified; otherwise the empirical
// fallback with the sample count recorded.
CertifiedConstant c_two_sided(const RationalMap& f, long fallback_samples = 1000,
                              std::uint64_t seed = 0);

// C_S = max(1, max over S of c_two_sided); status is the weakest member's.
CertifiedConstant c_set(const MapSet& set, long fallback_samples = 1000,
                        std::uint64_t seed = 0);

// Everything the orbit machinery needs about (S, heights): the threshold
// constant C_S, the sharpest certified two-sided constant for canonical-height
// tails, and the minimum degree.
struct HeightControl {
    CertifiedConstant set_constant;  // C_S, clamped to >= 1
    CertifiedConstant telescope;     // unclamped two-sided bound, as sharp as we can certify
    int min_degree = 0;
    bool all_morphism_like = false;

    double prune_bound() const { return 2.0 * set_constant.value + kHeightSlack; }
};

HeightControl make_height_control(const MapSet& set, long fallback_samples = 1000,
                                  std::uint64_t seed = 0);

} // namespace randdyn
