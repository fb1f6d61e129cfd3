#include "cobarforge/homology_ops.hpp"

#include <sstream>

namespace cobarforge::homops {

using milnor::Mode;

namespace {

// e_i(xi_k) for i >= 1: writing N = i + 2^{k+1}, the value is
// xi_a * xi_b when N = 2^a + 2^b with a >= k+1 > b is forced by
//   i = 2^{m+k} - 2^k - 2^{k-1} - ... - 2^j  (a = m+k, b = j <= k),
// and zero otherwise.
KPoly e_gen(uint32_t i, uint32_t k)
{
    if (i == 0) {
        KPoly p;
        p.add_term(MilnorMonomial::xi(k, 2));
        return p;
    }
    unsigned long long n = (unsigned long long)i + (1ULL << (k + 1));
    if (__builtin_popcountll(n) != 2)
        return KPoly::zero();
    uint32_t a = 63 - __builtin_clzll(n);
    uint32_t b = __builtin_ctzll(n);
    if (b > k || a < k + 1)
        return KPoly::zero();
    KPoly p;
    p.add_term(MilnorMonomial::xi(a, 1).times(MilnorMonomial::xi(b, 1)));
    return p;
}

// Coefficients of the generating series E(m)(T) = sum_i e_i(m) T^i up to
// T^cap, built as the product over generator factors (Cartan rule).
std::vector<KPoly> e_series(const MilnorMonomial& m, uint32_t cap)
{
    std::vector<KPoly> acc(cap + 1);
    acc[0] = KPoly::unit();
    for (size_t g = 0; g < m.e.size(); ++g) {
        for (uint32_t rep = 0; rep < m.e[g]; ++rep) {
            std::vector<KPoly> factor(cap + 1);
            for (uint32_t i = 0; i <= cap; ++i)
                factor[i] = e_gen(i, (uint32_t)g);
            std::vector<KPoly> next(cap + 1);
            for (uint32_t i = 0; i <= cap; ++i) {
                if (acc[i].is_zero())
                    continue;
                for (uint32_t j = 0; i + j <= cap; ++j) {
                    if (factor[j].is_zero())
                        continue;
                    next[i + j] = next[i + j] + acc[i] * factor[j];
                }
            }
            acc = std::move(next);
        }
    }
    return acc;
}

}  // namespace

KPoly e_op_monomial(uint32_t i, const MilnorMonomial& m)
{
    if (m.is_one())
        return i == 0 ? KPoly::unit() : KPoly::zero();
    uint32_t idx = 0, pw = 0;
    if (m.is_generator_power(idx, pw) && pw == 0)
        return e_gen(i, idx);
    return e_series(m, i)[i];
}

KPoly e_op(uint32_t i, const KPoly& x)
{
    KPoly out;
    for (const auto& m : x.terms)
        out = out + e_op_monomial(i, m);
    return out;
}

KPoly q_op(uint32_t s, const KPoly& x)
{
    KPoly out;
    for (const auto& m : x.terms) {
        long long d = m.dim();
        if ((long long)s < d)
            continue;
        out = out + e_op_monomial((uint32_t)(s - d), m);
    }
    return out;
}

std::string DLWord::str() const
{
    std::ostringstream os;
    for (size_t i = 0; i < js.size(); ++i) {
        if (i)
            os << '.';
        os << 'Q' << js[i];
    }
    return os.str();
}

DLWord parse_dl_word(const std::string& text)
{
    DLWord w;
    size_t p = 0;
    while (p < text.size()) {
        if (text[p] != 'Q')
            throw std::runtime_error("DL grammar: expected 'Q' at '" + text.substr(p) + "'");
        ++p;
        if (p >= text.size() || !isdigit((unsigned char)text[p]))
            throw std::runtime_error("DL grammar: expected superscript");
        uint32_t v = 0;
        while (p < text.size() && isdigit((unsigned char)text[p]))
            v = v * 10 + (text[p++] - '0');
        w.js.push_back(v);
        if (p < text.size()) {
            if (text[p] != '.')
                throw std::runtime_error("DL grammar: expected '.'");
            ++p;
        }
    }
    if (w.js.empty())
        throw std::runtime_error("DL grammar: empty word");
    return w;
}

bool dl_admissible(const DLWord& w, long long target_dim)
{
    for (size_t l = 0; l + 1 < w.js.size(); ++l)
        if (w.js[l] > 2 * w.js[l + 1])
            return false;
    return (long long)w.js.back() >= target_dim;
}

namespace {

KPoly cup_pair(uint32_t i, const MilnorMonomial& x, const MilnorMonomial& y,
               const Conventions& conv)
{
    if (i == 0) {
        KPoly p;
        p.add_term(x.times(y));
        return p;
    }
    if (x == y)
        return e_op_monomial(i, x);
    if (x.is_one() || y.is_one())
        return KPoly::zero();
    // Peel one generator off a product argument and apply the Leibniz rule.
    auto peel = [&](const MilnorMonomial& m) {
        uint32_t g = 0;
        while (m.exp(g) == 0)
            ++g;
        MilnorMonomial head = MilnorMonomial::xi(g, 1);
        MilnorMonomial tail = m;
        tail.e[g] -= 1;
        tail.trim();
        return std::make_pair(head, tail);
    };
    if (x.deg() >= 2) {
        auto [head, tail] = peel(x);
        KPoly hp(head), tp(tail);
        return hp * cup_pair(i, tail, y, conv) + cup_pair(i, head, y, conv) * tp;
    }
    if (y.deg() >= 2) {
        auto [head, tail] = peel(y);
        KPoly hp(head), tp(tail);
        return hp * cup_pair(i, x, tail, conv) + cup_pair(i, x, head, conv) * tp;
    }
    // Distinct single generators.
    std::string a = x.str(), b = y.str();
    if (b < a)
        std::swap(a, b);
    auto it = conv.cup_overrides.find({i, a, b});
    if (it != conv.cup_overrides.end())
        return milnor::parse_poly(it->second);
    if (conv.mixed_cup_zero)
        return KPoly::zero();
    throw ConventionGap("cup_" + std::to_string(i) + " undefined on pair (" + a + ", " + b + ")");
}

}  // namespace

KPoly cup_k(uint32_t i, const KPoly& x, const KPoly& y, const Conventions& conv)
{
    KPoly out;
    for (const auto& a : x.terms)
        for (const auto& b : y.terms)
            out = out + cup_pair(i, a, b, conv);
    return out;
}

}  // namespace cobarforge::homops
