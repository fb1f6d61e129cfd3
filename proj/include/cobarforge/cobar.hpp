#pragma once

#include "cobarforge/conventions.hpp"
#include "cobarforge/milnor.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cobarforge::cobar {

using milnor::KPoly;
using milnor::KTensor;
using milnor::MilnorMonomial;
using milnor::Mode;

// Word [x_1|...|x_s] of monomial letters. Bidegree (s, t) with
// t the total dimension; stem = t - s.
struct CobarWord {
    std::vector<MilnorMonomial> letters;

    CobarWord() = default;
    explicit CobarWord(std::vector<MilnorMonomial> ls) : letters(std::move(ls)) {}

    size_t s() const { return letters.size(); }
    long long t() const;
    long long stem() const { return t() - (long long)s(); }
    long long xdeg() const;  // total xi-factor count across letters

    CobarWord concat(const CobarWord& rhs) const;
    bool operator==(const CobarWord& rhs) const { return letters == rhs.letters; }
    bool operator<(const CobarWord& rhs) const;
    std::string str() const;
};

struct CobarSum {
    std::vector<CobarWord> terms;  // sorted, unique

    CobarSum() = default;
    explicit CobarSum(CobarWord w) { terms.push_back(std::move(w)); }

    bool is_zero() const { return terms.empty(); }
    void add_term(CobarWord w);
    CobarSum operator+(const CobarSum& rhs) const;
    CobarSum concat(const CobarSum& rhs) const;
    bool operator==(const CobarSum& rhs) const { return terms == rhs.terms; }
    std::string str() const;
};

CobarWord parse_word(const std::string& text);  // `[xi1^2|xi2]`, `[]`

// Higher co-operations supplied as explicit splice tables: for a letter
// equal to the key, the differential gains the listed replacement words.
struct AInfinityData {
    std::map<MilnorMonomial, std::vector<std::vector<MilnorMonomial>>> tables;
    bool empty() const { return tables.empty(); }
};

// Differential: splice of the reduced coproduct in each letter (full
// coproduct in unstable mode, where no unit terms arise), plus any
// supplied higher co-operation splices.
CobarSum cobar_diff(const CobarWord& w, Mode mode, const AInfinityData& ainf = {});
CobarSum cobar_diff(const CobarSum& x, Mode mode, const AInfinityData& ainf = {});

struct D2Report {
    bool pass = true;
    size_t letters_checked = 0;
    size_t words_checked = 0;
    std::vector<std::string> failures;  // offending single-letter words
};

// Validates d∘d = 0 on every basis word in the window. Cross-letter
// splice pairs cancel by position bookkeeping (checked directly on the
// words_checked sample); the remaining obstruction is per-letter, so the
// full window reduces to d²[m] = 0 over every letter monomial.
D2Report d_squared_window(long long max_t, long long max_s, Mode mode,
                          const AInfinityData& ainf = {}, long long max_xdeg = 0);

// Sum of word pairs, e.g. the value of the shuffle coproduct.
struct WordPairSum {
    std::vector<std::pair<CobarWord, CobarWord>> terms;
    void add_term(CobarWord a, CobarWord b);
    bool operator==(const WordPairSum& rhs) const { return terms == rhs.terms; }
    std::string str() const;
};

WordPairSum shuffle_coproduct(const CobarWord& w);

// Term-dropping caps for the cup recursion; every drop is recorded.
struct CupLimits {
    long long max_t = 64;
    long long max_s = 24;
    long long max_xdeg = 64;      // unstable xi-count cap
    uint32_t max_cup_index = 40;  // recursion ceiling on the cup level
};

// Inductive cup products on the cobar construction: concatenation at
// level 0, K-level cups inside letters against single-letter words, and
// the differential equation resolving a single letter against a longer
// word; word-against-word reduces through the product relation.
class CupEngine {
public:
    CupEngine(Mode mode, const Conventions& conv, const CupLimits& lim)
        : mode_(mode), conv_(conv), lim_(lim) {}

    CobarSum cup(uint32_t i, const CobarSum& u, const CobarSum& v);

    const std::vector<std::string>& truncation_events() const { return events_; }
    bool truncated() const { return !events_.empty(); }
    Mode mode() const { return mode_; }

private:
    Mode mode_;
    Conventions conv_;
    CupLimits lim_;
    std::map<std::string, CobarSum> memo_;
    std::vector<std::string> events_;

    CobarSum cup_words(uint32_t i, const CobarWord& u, const CobarWord& v);
    CobarSum case_word_letter(uint32_t i, const CobarWord& u, const CobarWord& v);
    CobarSum case_letter_word(uint32_t i, const CobarWord& u, const CobarWord& v);
    CobarSum case_word_word(uint32_t i, const CobarWord& u, const CobarWord& v);
    MilnorMonomial normalize_letter(const MilnorMonomial& m) const;
    CobarSum prune(CobarSum x, const char* where);
    CobarSum diff(const CobarSum& x) const { return cobar_diff(x, mode_); }
};

struct ExtCell {
    long long s = 0;
    long long t = 0;
    size_t dim = 0;
    std::vector<std::string> gens;
};

// Homology of the stable cobar construction over the window s <= max_s,
// t <= max_t, cell by cell; deterministic representative names.
std::vector<ExtCell> cobar_homology(long long max_s, long long max_t,
                                    const AInfinityData& ainf = {});

// All stable non-unit monomials of the given dimension, sorted.
const std::vector<MilnorMonomial>& stable_monomials_of_dim(long long d);
// Basis words at fixed (s, t), sorted.
std::vector<CobarWord> stable_words(long long s, long long t);

}  // namespace cobarforge::cobar
