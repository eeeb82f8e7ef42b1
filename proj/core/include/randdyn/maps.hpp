#pragma once

// Dominant rational self-maps of projective N-space in reduced form, plus the
// finite words of the composition monoid. Composition substitutes and then
// cancels the common factor, so degrees can drop below the naive product.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "randdyn/algebra.hpp"
#include "randdyn/points.hpp"

namespace randdyn {

enum class MorphismStatus {
    Unknown,
    CertifiedMorphism,
    CertifiedNonMorphism,
    UserAssertedMorphism,
};

std::string to_string(MorphismStatus s);

// Finite element of the composition monoid. labels[0] is applied first, so the
// word (a, b, c) denotes the composition c o b o a.
struct Word {
    std::vector<std::string> labels;

    bool empty() const { return labels.empty(); }
    std::size_t size() const { return labels.size(); }
    // Right-to-left display: "c o b o a"; "id" for the empty word.
    std::string composition_order_string() const;
};

class RationalMap {
public:
    // Reduces the tuple: divides by the form gcd and the integer content, and
    // makes the first nonzero form's leading coefficient positive.
    static RationalMap from_forms(std::vector<HomogeneousForm> forms,
                                  std::string label = "");
    static RationalMap identity(int dimension);

    int dimension() const { return static_cast<int>(forms_.size()) - 1; }
    int degree() const { return degree_; }
    const std::vector<HomogeneousForm>& forms() const { return forms_; }
    const std::string& label() const { return label_; }
    MorphismStatus morphism_status() const { return status_; }

    RationalMap with_label(std::string label) const;
    RationalMap with_status(MorphismStatus s) const;
    bool is_morphism_like() const {
        return status_ == MorphismStatus::CertifiedMorphism ||
               status_ == MorphismStatus::UserAssertedMorphism;
    }

    std::size_t total_terms() const;
    std::string to_string() const; // "F0 : F1 : ... : FN"
    bool operator==(const RationalMap& o) const { return forms_ == o.forms_; }

private:
    RationalMap(std::vector<HomogeneousForm> forms, int degree, std::string label)
        : forms_(std::move(forms)), degree_(degree), label_(std::move(label)) {}

    friend RationalMap reduce(std::vector<HomogeneousForm> forms, std::string label);

    std::vector<HomogeneousForm> forms_;
    int degree_ = 0;
    std::string label_;
    MorphismStatus status_ = MorphismStatus::Unknown;
};

// A labelled family of maps sharing one ambient dimension.
class MapSet {
public:
    void add(RationalMap map);
    const RationalMap& at(const std::string& label) const;
    const RationalMap& at(std::size_t i) const { return maps_.at(i); }
    bool contains(const std::string& label) const;
    std::size_t size() const { return maps_.size(); }
    int dimension() const;
    const std::vector<RationalMap>& maps() const { return maps_; }

private:
    std::vector<RationalMap> maps_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Grammar: coordinates separated by ':'; each an integer- or rational-
// coefficient polynomial in X0..XN built from + - * / ^ and parentheses
// (division by nonzero constants only). Rational coefficients are cleared to
// integers tuple-wide. For n = 1 an affine polynomial in x is accepted and
// homogenized via x = X0/X1.
RationalMap parse_map(const std::string& text, int dimension, std::string label = "");

// One homogeneous form in X0..X{n_vars-1} under the same expression grammar
// (rational coefficients cleared; errors on inhomogeneous input).
HomogeneousForm parse_form(const std::string& text, int n_vars);

// Reduce a common-degree homogeneous tuple (errors on all-zero input).
RationalMap reduce(std::vector<HomogeneousForm> forms, std::string label = "");

// f o g: substitute g into f, then reduce.
RationalMap compose(const RationalMap& f, const RationalMap& g,
                    std::size_t term_cap = kDefaultTermCap);

// Thread-safe memo for composed words; never changes results.
class ComposeCache {
public:
    std::optional<RationalMap> find(const std::string& key) const;
    void store(const std::string& key, const RationalMap& map);

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, RationalMap> entries_;
};

// Left fold of compose in application order; the empty word is the identity.
RationalMap word_compose(const MapSet& set, const Word& word,
                         std::size_t term_cap = kDefaultTermCap,
                         ComposeCache* cache = nullptr);

// True iff all N+1 forms vanish at P.
bool is_indeterminate_at(const RationalMap& f, const ProjPoint& p);

// Resultant of the two coordinate forms of a map on the line (Sylvester
// determinant, exact). Nonzero iff the map is a morphism.
Int resultant_p1(const RationalMap& f);

struct MorphismCheckResult {
    MorphismStatus status = MorphismStatus::Unknown;
    Int resultant;                      // dimension 1 only
    std::optional<ProjPoint> witness;   // common zero, when found
};

// Dimension 1: certified via the resultant. Dimension >= 2: searches a small
// rational grid for a common zero; finding none leaves the status unknown.
MorphismCheckResult morphism_check(const RationalMap& f, int grid_radius = 3);

struct DegreeIndependenceReport {
    bool pass = true;
    int depth = 0; // the certificate is heuristic: valid only up to this depth
    struct Violation {
        Word word;
        int degree;
    };
    std::vector<Violation> violations;
};

// Exhaustively composes all |S|^k words for k <= depth and reports any word of
// degree <= 1.
DegreeIndependenceReport degree_independence_check(const MapSet& set, int depth,
                                                   std::size_t term_cap = kDefaultTermCap);

} // namespace randdyn
