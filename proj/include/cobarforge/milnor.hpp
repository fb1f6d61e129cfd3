#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cobarforge::milnor {

enum class Mode { Stable, Unstable };

// Monomial in the polynomial generators xi_i, i >= 0.  Exponent vector
// indexed by generator, trailing zeros trimmed.  In stable mode xi_0 = 1
// and callers normalize the exponent of xi_0 away (see normalized()).
struct MilnorMonomial {
    std::vector<uint32_t> e;

    MilnorMonomial() = default;
    explicit MilnorMonomial(std::vector<uint32_t> exps) : e(std::move(exps)) { trim(); }

    static MilnorMonomial one() { return MilnorMonomial{}; }
    static MilnorMonomial xi(uint32_t i, uint32_t exp = 1);

    void trim();
    bool is_one() const { return e.empty(); }
    uint32_t exp(uint32_t i) const { return i < e.size() ? e[i] : 0; }

    long long dim() const;                 // sum e_i (2^i - 1)
    long long deg() const;                 // sum e_i (xi-factor count)
    long long xi0_exp() const { return exp(0); }

    MilnorMonomial times(const MilnorMonomial& rhs) const;
    MilnorMonomial pow2(uint32_t k) const;  // raise to 2^k
    MilnorMonomial normalized(Mode mode) const;
    // Divides by xi_0^k; returns false if not divisible.
    bool divide_xi0(uint32_t k, MilnorMonomial& out) const;
    MilnorMonomial strip_xi0() const;

    // True if the monomial is xi_i^{2^k}; fills i and k.
    bool is_generator_power(uint32_t& i, uint32_t& k) const;

    bool operator==(const MilnorMonomial& rhs) const { return e == rhs.e; }
    bool operator!=(const MilnorMonomial& rhs) const { return e != rhs.e; }
    // Graded lexicographic: dimension first, then exponents from the
    // highest generator index down.
    bool operator<(const MilnorMonomial& rhs) const;

    std::string str() const;
};

struct Grading {
    long long dim = 0;
    long long deg = 0;
};

// F2-linear combination of monomials; addition is symmetric difference.
struct KPoly {
    std::vector<MilnorMonomial> terms;  // sorted, unique

    KPoly() = default;
    explicit KPoly(MilnorMonomial m) { terms.push_back(std::move(m)); }

    static KPoly zero() { return KPoly{}; }
    static KPoly unit() { return KPoly(MilnorMonomial::one()); }

    bool is_zero() const { return terms.empty(); }
    void add_term(MilnorMonomial m);  // XOR insert
    KPoly operator+(const KPoly& rhs) const;
    KPoly operator*(const KPoly& rhs) const;
    bool operator==(const KPoly& rhs) const { return terms == rhs.terms; }

    std::string str() const;
};

// F2-sum of n-fold tensors of monomials, fixed arity.
struct KTensor {
    size_t arity = 0;
    std::vector<std::vector<MilnorMonomial>> terms;  // sorted, unique

    explicit KTensor(size_t n = 0) : arity(n) {}
    bool is_zero() const { return terms.empty(); }
    void add_term(std::vector<MilnorMonomial> t);
    KTensor operator+(const KTensor& rhs) const;
    bool operator==(const KTensor& rhs) const
    {
        return arity == rhs.arity && terms == rhs.terms;
    }
    std::string str() const;
};

Grading grading_of(const MilnorMonomial& m, Mode mode);

// Coproduct on the generators: nabla(xi_i) = sum_k xi_{i-k}^{2^k} (x) xi_k,
// extended multiplicatively.
KTensor coproduct(const MilnorMonomial& m, Mode mode);
KTensor coproduct(const KPoly& x, Mode mode);

// coproduct minus the two primitive terms x(x)1 and 1(x)x. Stable mode,
// no unit term allowed.
KTensor reduced_coproduct(const KPoly& x);

// Composite nabla(n) ∘ ... ∘ nabla(2) ∘ nabla, where nabla(j) is the sum
// of nabla applied in each slot (signs vanish over F2).
KTensor iterated_nabla(const KPoly& x, size_t n, Mode mode = Mode::Unstable);

// Psi^n from the comultiplication of K⊗K restricted to x⊗x, computed by
// iterating the last-slot expansion over unordered term pairs; the pair
// condition alternates strictness direction per stage.
KTensor psi_n(const MilnorMonomial& x, size_t n, Mode mode = Mode::Unstable);

// Text grammar: `xi<i>` / `xi<i>^<e>` joined by `*`, unit `1`.
MilnorMonomial parse_monomial(const std::string& text);
KPoly parse_poly(const std::string& text);            // terms joined by ` + `
KTensor parse_tensor(const std::string& text, size_t arity);

}  // namespace cobarforge::milnor
