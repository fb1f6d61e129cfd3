#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>

namespace cobarforge {

// Every interpretive choice the engine makes lives here, so a result can
// be attributed to a convention table rather than to code. Hash and
// description are printed by the verification commands.
struct Conventions {
    // K-level cup products: value of xi_a cup_i xi_b for distinct
    // generators and i >= 1. When mixed_cup_zero is false a missing pair
    // is a hard error instead of 0.
    bool mixed_cup_zero = true;
    // Explicit overrides, keyed by (i, lhs, rhs) in canonical text form
    // with lhs <= rhs; value is a polynomial in the monomial grammar.
    std::map<std::tuple<uint32_t, std::string, std::string>, std::string> cup_overrides;

    // Cobar cup engine dials.
    bool swap_on_odd_k = true;       // T^k exchanges the pair for odd k
    bool split_first_letter = true;  // product factorization peels the first letter

    // Unstable PS projection used inside the h_n pipelines.
    enum class EtaVariant : int { StrictCollapse = 0, StripBlind = 1, StripSorted = 2 };
    EtaVariant pipeline_eta = EtaVariant::StripSorted;
    // Strip xi_0 factors out of letters as soon as a K-level cup value is
    // spliced into a word.
    bool strip_letters_in_cup = true;
    // Adopt d(h_1) = hm1*h1 as the induction base.
    bool seed_dh1 = true;

    uint64_t hash() const;
    std::string describe() const;

    static const Conventions& shipped();
};

}  // namespace cobarforge
