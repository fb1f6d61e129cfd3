#pragma once

#include "cobarforge/gf2.hpp"

#include <map>
#include <string>
#include <vector>

namespace cobarforge::fho {

using gf2::F2Matrix;
using gf2::GradedComplexF2;

// Degree-shifting map between graded complexes; mats[n] sends degree n of
// the source to degree n+shift of the target.
struct GradedMap {
    int shift = 0;
    std::map<int, F2Matrix> mats;

    bool is_zero() const;
};

F2Matrix map_matrix(const GradedMap& f, const GradedComplexF2& src, const GradedComplexF2& dst,
                    int n);
GradedMap compose(const GradedMap& g, const GradedMap& f, const GradedComplexF2& a,
                  const GradedComplexF2& b, const GradedComplexF2& c);
GradedMap add(const GradedMap& f, const GradedMap& g, const GradedComplexF2& src,
              const GradedComplexF2& dst);
GradedMap identity_map(const GradedComplexF2& x);
GradedMap zero_map(int shift = 0);
// Checks f d = d f (degreewise).
bool is_chain_map(const GradedMap& f, const GradedComplexF2& src, const GradedComplexF2& dst);

// Chain complex together with a strong deformation retraction onto its
// homology: eta∘xi = Id, d h + h d = xi∘eta + Id (mod 2), h∘xi = 0,
// eta∘h = 0, h∘h = 0.
struct SDRData {
    GradedComplexF2 X;
    GradedComplexF2 H;   // zero differential; labels name representatives
    GradedMap xi;        // H -> X
    GradedMap eta;       // X -> H
    GradedMap h;         // X -> X, degree +1
};

SDRData make_sdr(const GradedComplexF2& X);

struct SdrCheck {
    bool eta_xi = false, d_h = false, h_xi = false, eta_h = false, h_h = false;
    bool all() const { return eta_xi && d_h && h_xi && eta_h && h_h; }
};

SdrCheck check_sdr(const SDRData& s);

// eta ∘ f^n ∘ h ∘ ... ∘ h ∘ f^1 ∘ xi on homology; maps listed f1..fn.
GradedMap fho_compose(const std::vector<const SDRData*>& sdrs,
                      const std::vector<GradedMap>& fs);

// Difference of the two sides of the composition relation; zero whenever
// every f^i is a chain map.
GradedMap coherence_residual(const std::vector<const SDRData*>& sdrs,
                             const std::vector<GradedMap>& fs);

// p ∘ (f^n)⊗2 ∘ r ∘ ... ∘ r ∘ (f^1)⊗2 ∘ q on graded modules with ordered
// bases (complexes with zero differential).
GradedMap bracket_chain(const std::vector<const GradedComplexF2*>& modules,
                        const std::vector<GradedMap>& fs);

// Elements of the homology model e_i × y (i >= 1), y1·y2 (y1 <= y2);
// e_0 × y means y·y. Basis labels refer to a module's global element list.
struct EStarElem {
    uint32_t i = 0;      // e-index; 0 marks the product part
    size_t a = 0, b = 0; // global basis indices, a <= b, equal when i > 0
    bool operator==(const EStarElem& r) const { return i == r.i && a == r.a && b == r.b; }
    bool operator<(const EStarElem& r) const
    {
        if (i != r.i)
            return i < r.i;
        if (a != r.a)
            return a < r.a;
        return b < r.b;
    }
};

struct EStarSum {
    std::vector<EStarElem> terms;  // sorted, unique
    void add_term(EStarElem e);
    bool is_zero() const { return terms.empty(); }
    bool operator==(const EStarSum& r) const { return terms == r.terms; }
    std::string str(const std::vector<std::string>& names) const;
};

// Global element list of a complex: degree-ascending, basis order within.
struct ElementIndex {
    std::vector<std::pair<int, size_t>> elems;  // (degree, position)
    std::vector<std::string> names;
    std::map<std::pair<int, size_t>, size_t> lookup;

    explicit ElementIndex(const GradedComplexF2& x);
    size_t size() const { return elems.size(); }
};

enum class Direction { Underline, Overline };

// Closed formula: e_i × x goes to e_{i+n-1} × (f^n,...,f^1)(x); the dual
// direction shifts the index down and vanishes for i < n-1.
EStarSum e2_fho_closed(uint32_t i, size_t x, const std::vector<const GradedComplexF2*>& modules,
                       const std::vector<GradedMap>& fs, Direction dir);

// Same operation evaluated on the explicit complex E(2)⊗_{Σ2} X⊗X via the
// composite retraction; i_cap bounds the e-index window.
EStarSum e2_fho_direct(uint32_t i, size_t x, const std::vector<const GradedComplexF2*>& complexes,
                       const std::vector<GradedMap>& fs, uint32_t i_cap = 24);

}  // namespace cobarforge::fho
