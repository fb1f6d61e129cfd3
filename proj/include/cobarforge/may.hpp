#pragma once

#include "cobarforge/cobar.hpp"
#include "cobarforge/conventions.hpp"

#include <map>
#include <string>
#include <vector>

namespace cobarforge::may {

using cobar::CobarSum;
using cobar::CobarWord;
using milnor::MilnorMonomial;
using milnor::Mode;

// Generator [xi_i^{2^k}]; (0,0) is the unstable class hm1 = [xi_0].
struct PSGen {
    uint32_t i = 0, k = 0;
    bool operator==(const PSGen& r) const { return i == r.i && k == r.k; }
    bool operator<(const PSGen& r) const { return i != r.i ? i < r.i : k < r.k; }
    long long dim() const { return ((1LL << i) - 1) << k; }
    long long weight() const { return 1LL << k; }  // xi-factor count
    std::string str() const;
};

// Monomial in the generators; multiset, kept sorted.
struct PSWord {
    std::vector<PSGen> gens;

    PSWord() = default;
    explicit PSWord(std::vector<PSGen> g) : gens(std::move(g)) { normalize(); }
    void normalize();

    size_t s() const { return gens.size(); }
    long long t() const;
    long long stem() const { return t() - (long long)s(); }
    long long weight() const;
    bool contains_hm1() const;

    PSWord times(const PSWord& rhs) const;
    PSWord pow(uint32_t e) const;
    bool operator==(const PSWord& r) const { return gens == r.gens; }
    bool operator<(const PSWord& r) const;
    std::string str() const;
};

struct PSSum {
    std::vector<PSWord> terms;  // sorted, unique

    PSSum() = default;
    explicit PSSum(PSWord w) { terms.push_back(std::move(w)); }

    bool is_zero() const { return terms.empty(); }
    void add_term(PSWord w);
    PSSum operator+(const PSSum& rhs) const;
    PSSum operator*(const PSSum& rhs) const;
    bool operator==(const PSSum& r) const { return terms == r.terms; }
    std::string str() const;
};

PSGen hgen(uint32_t n);  // h_n = (1, n)
PSWord parse_ps_word(const std::string& text);
PSSum parse_ps_sum(const std::string& text);

// Letterwise projection F K -> PS^{-1}X; a letter must be a generator
// power, anything else kills the word. Unstable xi_0 powers collapse to
// hm1. Order-blind.
PSSum eta_project(const CobarWord& w, Mode mode);
// Pipeline variant honoring the convention table (xi_0 stripping inside
// letters, optional sorted-words-only projection).
PSSum eta_pipeline(const CobarWord& w, Mode mode, const Conventions& conv);
PSSum eta_pipeline(const CobarSum& x, Mode mode, const Conventions& conv);

// Sorted-word lift; eta_project ∘ xi_lift = Id.
CobarWord xi_lift(const PSWord& w);
CobarSum xi_lift(const PSSum& x);

// Drops every word containing hm1.
PSSum quotient_hminus1(const PSSum& x);

struct TransferError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The level-one differential on PS^{-1}X: transfer of the cobar
// differential through the weight-graded contraction (stable mode).
// Exact per (t, weight) block; every homotopy application is checked
// against the retraction identity.
class Transfer {
public:
    explicit Transfer(size_t block_cap = 400000) : block_cap_(block_cap) {}

    PSSum d1(const PSWord& w);
    PSSum d1(const PSSum& x);

    // diagnostics
    size_t homotopy_calls() const { return homotopy_calls_; }

private:
    size_t block_cap_;
    size_t homotopy_calls_ = 0;
    std::map<PSWord, PSSum> memo_;
    std::map<CobarWord, CobarSum> h0_memo_;
    std::vector<CobarWord> h0_stack_;

    CobarSum delta(const CobarSum& x) const;    // weight-raising splices
    CobarSum d0(const CobarWord& w) const;      // weight-preserving splices
    CobarSum d0(const CobarSum& x) const;
    PSSum eta0(const CobarSum& x) const;
    CobarSum h0(const CobarWord& w);            // sorting contraction
    CobarSum h0(const CobarSum& x);
    void check_identity(const CobarWord& w);
};

// Total differential components grouped by filtration jump (the word
// length s); component r raises s by r.
struct FiltrationSplit {
    std::map<uint32_t, PSSum> components;
    PSSum total() const;
    std::string str() const;
};

FiltrationSplit split_by_jump(const PSSum& value, long long source_s);

// Cup products of PS elements evaluated through the cobar engine.
PSSum ps_cup(uint32_t i, const PSSum& u, const PSSum& v, Mode mode, const Conventions& conv,
             const cobar::CupLimits& lim, std::vector<std::string>* events = nullptr);

// d(h_n) by the cup-square induction from the seeded base, with the
// alternative route and their difference reported.
struct DhnResult {
    uint32_t n = 0;
    PSSum value;              // induction value
    PSSum alt_value;          // d(h_{n-1}) cup_1 h + h cup_1 d(h_{n-1}) route
    PSSum boundary_diff;      // value + alt_value
    PSSum closed;             // sum [xi_i] h_{n-i}^{2^i}
    bool matches_closed = false;
    std::vector<std::string> notes;
};

DhnResult d_hn(uint32_t n, const Conventions& conv);
PSSum dhn_closed_formula(uint32_t n);

// Full differential of a generator [xi_i^{2^k}] by the same square
// induction from the spliced base.
PSSum full_diff_gen(const PSGen& g, const Conventions& conv, std::vector<std::string>* notes = nullptr);

// d1( h_{n-1} [xi_2^{2^{n-2}}]^2 + h_{n-2}^2 [xi_2^{2^{n-1}}] ) vs h_{n-1}^4.
struct StarResult {
    uint32_t n = 0;
    PSSum lhs;
    PSSum rhs;
    bool match = false;
};

StarResult star_formula(uint32_t n);

struct Window {
    long long max_stem = 0;
    long long max_filt = 0;
};

struct PageCell {
    long long stem = 0;
    long long filt = 0;
    size_t dim = 0;
    std::vector<std::string> gens;
};

struct PageArrow {
    uint32_t page = 1;
    std::string source, target;
};

struct Chart {
    Window window;
    uint32_t page = 1;
    std::vector<PageCell> cells;
    std::vector<PageArrow> differentials;
    std::string conventions;
};

// E_r chart over the window: r = 1 lists the polynomial basis, r >= 2
// takes homology of the level-one differential (higher components enter
// only when supplied).
Chart page_compute(uint32_t r, const Window& win, const Conventions& conv,
                   const FiltrationSplit* extra = nullptr);

std::vector<PSWord> ps_words_in_window(const Window& win);

// Membership of a cycle class in the image of d1 within a window.
bool is_d1_boundary(const PSSum& z, const Window& win);

struct KervaireReport {
    uint32_t n = 0;
    bool complete = true;
    PSSum d_hn_value;
    PSSum d_sq_raw;          // d(h_n) cup_1 d(h_n)
    PSSum d_sq;              // after the hm1 quotient
    PSSum correction;        // h_1 (h_{n-1} g(2,n-2)^2 + h_{n-2}^2 g(2,n-1))
    PSSum d_corrected;       // differential of the corrected class
    std::map<uint32_t, PSSum> by_jump;
    bool low_jumps_vanish = false;  // jumps <= 4
    PSSum d5;
    PSSum g_expr;            // parenthesized cycle of filtration 4
    bool g_is_d1_cycle = false;
    PSSum d5_target;         // h_1^2 g h_{n-1}
    bool d5_matches_mod_d1 = false;
    PSSum d5_boundary_gap;
    bool g0h3_vanishes_e2 = false;  // corollary check (n = 4 target cell)
    std::vector<std::string> notes;
};

KervaireReport kervaire_pipeline(uint32_t n, const Window& win, const Conventions& conv,
                                 const cobar::CupLimits& lim);

}  // namespace cobarforge::may
