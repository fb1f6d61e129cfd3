#pragma once

#include "cobarforge/conventions.hpp"
#include "cobarforge/milnor.hpp"

#include <stdexcept>
#include <vector>

namespace cobarforge::homops {

using milnor::KPoly;
using milnor::MilnorMonomial;

// Raised when a needed K-level cup has no value under the active table.
struct ConventionGap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// e_i on the unstable Milnor coalgebra: the generator case table, the
// Cartan rule on products, e_0(x) = x^2, extended additively.
KPoly e_op(uint32_t i, const KPoly& x);
KPoly e_op_monomial(uint32_t i, const MilnorMonomial& m);

// Dyer-Lashof action; Q^s(x) = e_{s-dim x}(x) on monomials with
// s >= dim x, zero below the excess threshold.
KPoly q_op(uint32_t s, const KPoly& x);

struct DLWord {
    std::vector<uint32_t> js;
    std::string str() const;
};

DLWord parse_dl_word(const std::string& text);  // `Q<j1>.Q<j2>...`

// Admissible iff j_l <= 2 j_{l+1} throughout and j_k >= target_dim.
bool dl_admissible(const DLWord& w, long long target_dim);

// cup_i on K. Bilinear over monomial pairs; per pair: cup_0 is the
// product, equal monomials give e_i, a product argument is expanded by
// the Leibniz relation, and distinct generators fall back to the
// convention table.
KPoly cup_k(uint32_t i, const KPoly& x, const KPoly& y, const Conventions& conv);

}  // namespace cobarforge::homops
