#include "cobarforge/milnor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cobarforge::milnor {

MilnorMonomial MilnorMonomial::xi(uint32_t i, uint32_t exp)
{
    MilnorMonomial m;
    if (exp) {
        m.e.assign(i + 1, 0);
        m.e[i] = exp;
    }
    return m;
}

void MilnorMonomial::trim()
{
    while (!e.empty() && e.back() == 0)
        e.pop_back();
}

long long MilnorMonomial::dim() const
{
    long long d = 0;
    for (size_t i = 0; i < e.size(); ++i)
        d += (long long)e[i] * ((1LL << i) - 1);
    return d;
}

long long MilnorMonomial::deg() const
{
    long long d = 0;
    for (uint32_t v : e)
        d += v;
    return d;
}

MilnorMonomial MilnorMonomial::times(const MilnorMonomial& rhs) const
{
    MilnorMonomial out;
    out.e.resize(std::max(e.size(), rhs.e.size()), 0);
    for (size_t i = 0; i < out.e.size(); ++i)
        out.e[i] = exp(i) + rhs.exp(i);
    out.trim();
    return out;
}

MilnorMonomial MilnorMonomial::pow2(uint32_t k) const
{
    MilnorMonomial out = *this;
    for (auto& v : out.e)
        v <<= k;
    return out;
}

MilnorMonomial MilnorMonomial::normalized(Mode mode) const
{
    if (mode == Mode::Unstable || e.empty() || e[0] == 0)
        return *this;
    MilnorMonomial out = *this;
    out.e[0] = 0;
    out.trim();
    return out;
}

bool MilnorMonomial::divide_xi0(uint32_t k, MilnorMonomial& out) const
{
    if (exp(0) < k)
        return false;
    out = *this;
    out.e[0] -= k;
    out.trim();
    return true;
}

MilnorMonomial MilnorMonomial::strip_xi0() const
{
    if (e.empty() || e[0] == 0)
        return *this;
    MilnorMonomial out = *this;
    out.e[0] = 0;
    out.trim();
    return out;
}

bool MilnorMonomial::is_generator_power(uint32_t& i, uint32_t& k) const
{
    int idx = -1;
    for (size_t j = 0; j < e.size(); ++j) {
        if (e[j] == 0)
            continue;
        if (idx >= 0)
            return false;
        idx = (int)j;
    }
    if (idx < 0)
        return false;
    uint32_t v = e[idx];
    if (v & (v - 1))
        return false;
    i = (uint32_t)idx;
    k = 0;
    while ((v >> k) != 1)
        ++k;
    return true;
}

bool MilnorMonomial::operator<(const MilnorMonomial& rhs) const
{
    long long da = dim(), db = rhs.dim();
    if (da != db)
        return da < db;
    size_t n = std::max(e.size(), rhs.e.size());
    for (size_t j = n; j-- > 0;) {
        uint32_t a = exp((uint32_t)j), b = rhs.exp((uint32_t)j);
        if (a != b)
            return a < b;
    }
    return false;
}

std::string MilnorMonomial::str() const
{
    if (is_one())
        return "1";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < e.size(); ++i) {
        if (!e[i])
            continue;
        if (!first)
            os << '*';
        os << "xi" << i;
        if (e[i] > 1)
            os << '^' << e[i];
        first = false;
    }
    return os.str();
}

void KPoly::add_term(MilnorMonomial m)
{
    auto it = std::lower_bound(terms.begin(), terms.end(), m);
    if (it != terms.end() && *it == m)
        terms.erase(it);
    else
        terms.insert(it, std::move(m));
}

KPoly KPoly::operator+(const KPoly& rhs) const
{
    KPoly out = *this;
    for (const auto& m : rhs.terms)
        out.add_term(m);
    return out;
}

KPoly KPoly::operator*(const KPoly& rhs) const
{
    KPoly out;
    for (const auto& a : terms)
        for (const auto& b : rhs.terms)
            out.add_term(a.times(b));
    return out;
}

std::string KPoly::str() const
{
    if (terms.empty())
        return "0";
    std::ostringstream os;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i)
            os << " + ";
        os << terms[i].str();
    }
    return os.str();
}

void KTensor::add_term(std::vector<MilnorMonomial> t)
{
    auto it = std::lower_bound(terms.begin(), terms.end(), t);
    if (it != terms.end() && *it == t)
        terms.erase(it);
    else
        terms.insert(it, std::move(t));
}

KTensor KTensor::operator+(const KTensor& rhs) const
{
    KTensor out = *this;
    for (const auto& t : rhs.terms)
        out.add_term(t);
    return out;
}

std::string KTensor::str() const
{
    if (terms.empty())
        return "0";
    std::ostringstream os;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i)
            os << " + ";
        for (size_t j = 0; j < terms[i].size(); ++j) {
            if (j)
                os << " \xE2\x8A\x97 ";
            os << terms[i][j].str();
        }
    }
    return os.str();
}

Grading grading_of(const MilnorMonomial& m, Mode mode)
{
    MilnorMonomial n = m.normalized(mode);
    return Grading{n.dim(), n.deg()};
}

namespace {

// Tensor-square of a single generator power: nabla(xi_i)^{2^k} expands
// exactly to sum_j xi_{i-j}^{2^{j+k}} (x) xi_j^{2^k} over F2.
KTensor coproduct_gen_pow2(uint32_t i, uint32_t k, Mode mode)
{
    KTensor out(2);
    for (uint32_t j = 0; j <= i; ++j) {
        MilnorMonomial a = MilnorMonomial::xi(i - j, 1).pow2(j + k).normalized(mode);
        MilnorMonomial b = MilnorMonomial::xi(j, 1).pow2(k).normalized(mode);
        out.add_term({a, b});
    }
    return out;
}

KTensor tensor_mul(const KTensor& a, const KTensor& b)
{
    KTensor out(a.arity);
    for (const auto& s : a.terms)
        for (const auto& t : b.terms) {
            std::vector<MilnorMonomial> prod(s.size());
            for (size_t j = 0; j < s.size(); ++j)
                prod[j] = s[j].times(t[j]);
            out.add_term(std::move(prod));
        }
    return out;
}

KTensor tensor_unit(size_t arity)
{
    KTensor t(arity);
    t.add_term(std::vector<MilnorMonomial>(arity, MilnorMonomial::one()));
    return t;
}

}  // namespace

KTensor coproduct(const MilnorMonomial& m0, Mode mode)
{
    MilnorMonomial m = m0.normalized(mode);
    KTensor acc = tensor_unit(2);
    for (size_t i = 0; i < m.e.size(); ++i) {
        uint32_t ev = m.e[i];
        for (uint32_t bit = 0; ev >> bit; ++bit)
            if ((ev >> bit) & 1)
                acc = tensor_mul(acc, coproduct_gen_pow2((uint32_t)i, bit, mode));
    }
    return acc;
}

KTensor coproduct(const KPoly& x, Mode mode)
{
    KTensor out(2);
    for (const auto& m : x.terms)
        out = out + coproduct(m, mode);
    return out;
}

KTensor reduced_coproduct(const KPoly& x)
{
    KTensor out(2);
    for (const auto& m0 : x.terms) {
        MilnorMonomial m = m0.normalized(Mode::Stable);
        if (m.is_one())
            throw std::runtime_error("reduced_coproduct: unit term present");
        KTensor full = coproduct(m, Mode::Stable);
        full.add_term({m, MilnorMonomial::one()});
        full.add_term({MilnorMonomial::one(), m});
        out = out + full;
    }
    return out;
}

namespace {

// nabla applied in the given slot of an arity-n tensor.
KTensor nabla_slot(const KTensor& t, size_t slot, Mode mode)
{
    KTensor out(t.arity + 1);
    for (const auto& term : t.terms) {
        KTensor cp = coproduct(term[slot], mode);
        for (const auto& pair : cp.terms) {
            std::vector<MilnorMonomial> v;
            v.reserve(t.arity + 1);
            for (size_t j = 0; j < slot; ++j)
                v.push_back(term[j]);
            v.push_back(pair[0]);
            v.push_back(pair[1]);
            for (size_t j = slot + 1; j < t.arity; ++j)
                v.push_back(term[j]);
            out.add_term(std::move(v));
        }
    }
    return out;
}

}  // namespace

KTensor iterated_nabla(const KPoly& x, size_t n, Mode mode)
{
    if (n < 1)
        throw std::runtime_error("iterated_nabla: n >= 1 required");
    KTensor cur(1);
    for (const auto& m : x.terms)
        cur.add_term({m});
    // nabla, then nabla(2), ..., nabla(n); nabla(j) sums over all slots.
    for (size_t j = 1; j <= n; ++j) {
        KTensor next(cur.arity + 1);
        for (size_t slot = 0; slot < cur.arity; ++slot)
            next = next + nabla_slot(cur, slot, mode);
        cur = next;
    }
    return cur;
}

KTensor psi_n(const MilnorMonomial& x, size_t n, Mode mode)
{
    if (n < 1)
        throw std::runtime_error("psi_n: n >= 1 required");
    // State: tuples of monomial pairs. Start with the single pair (x, x).
    struct Pair {
        MilnorMonomial a, b;
    };
    using Tuple = std::vector<Pair>;
    std::vector<Tuple> state{Tuple{Pair{x, x}}};

    for (size_t stage = 1; stage <= n; ++stage) {
        bool less = (stage % 2) == 1;  // alternate the strict direction
        std::vector<Tuple> next;
        for (const auto& tup : state) {
            const Pair& last = tup.back();
            KTensor cu = coproduct(last.a, mode);
            KTensor cv = coproduct(last.b, mode);
            for (const auto& s : cu.terms)
                for (const auto& t : cv.terms) {
                    // Compare right components, ties broken on the left.
                    bool lt = s[1] < t[1] || (s[1] == t[1] && s[0] < t[0]);
                    bool gt = t[1] < s[1] || (t[1] == s[1] && t[0] < s[0]);
                    if ((less && !lt) || (!less && !gt))
                        continue;
                    Tuple out(tup.begin(), tup.end() - 1);
                    out.push_back(Pair{s[0], t[0]});
                    out.push_back(Pair{s[1], t[1]});
                    next.push_back(std::move(out));
                }
        }
        state = std::move(next);
    }

    KTensor out(n + 1);
    for (const auto& tup : state) {
        std::vector<MilnorMonomial> prod;
        prod.reserve(tup.size());
        for (const auto& p : tup)
            prod.push_back(p.a.times(p.b));
        out.add_term(std::move(prod));
    }
    return out;
}

namespace {

void skip_ws(const std::string& s, size_t& p)
{
    while (p < s.size() && (s[p] == ' ' || s[p] == '\t'))
        ++p;
}

uint64_t parse_uint(const std::string& s, size_t& p)
{
    if (p >= s.size() || !isdigit((unsigned char)s[p]))
        throw std::runtime_error("monomial grammar: expected number at '" + s.substr(p) + "'");
    uint64_t v = 0;
    while (p < s.size() && isdigit((unsigned char)s[p]))
        v = v * 10 + (s[p++] - '0');
    return v;
}

}  // namespace

MilnorMonomial parse_monomial(const std::string& text)
{
    size_t p = 0;
    skip_ws(text, p);
    if (p < text.size() && text[p] == '1') {
        ++p;
        skip_ws(text, p);
        if (p != text.size())
            throw std::runtime_error("monomial grammar: trailing input after '1'");
        return MilnorMonomial::one();
    }
    MilnorMonomial out;
    while (true) {
        skip_ws(text, p);
        if (text.compare(p, 2, "xi") != 0)
            throw std::runtime_error("monomial grammar: expected 'xi' at '" + text.substr(p) + "'");
        p += 2;
        uint32_t i = (uint32_t)parse_uint(text, p);
        uint32_t e = 1;
        if (p < text.size() && text[p] == '^') {
            ++p;
            e = (uint32_t)parse_uint(text, p);
        }
        out = out.times(MilnorMonomial::xi(i, e));
        skip_ws(text, p);
        if (p < text.size() && text[p] == '*') {
            ++p;
            continue;
        }
        break;
    }
    if (p != text.size())
        throw std::runtime_error("monomial grammar: trailing input '" + text.substr(p) + "'");
    return out;
}

namespace {

std::vector<std::string> split_on(const std::string& s, const std::string& sep)
{
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        size_t q = s.find(sep, pos);
        if (q == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, q - pos));
        pos = q + sep.size();
    }
    return parts;
}

}  // namespace

KPoly parse_poly(const std::string& text)
{
    KPoly out;
    std::string t = text;
    size_t a = t.find_first_not_of(" \t");
    if (a == std::string::npos || t == "0")
        return out;
    for (const auto& part : split_on(text, " + "))
        out.add_term(parse_monomial(part));
    return out;
}

KTensor parse_tensor(const std::string& text, size_t arity)
{
    KTensor out(arity);
    if (text == "0")
        return out;
    for (const auto& term : split_on(text, " + ")) {
        // Accept both the UTF-8 tensor sign and `|o|`.
        std::string norm = term;
        size_t q;
        while ((q = norm.find("\xE2\x8A\x97")) != std::string::npos)
            norm.replace(q, 3, "|o|");
        auto factors = split_on(norm, "|o|");
        if (factors.size() != arity)
            throw std::runtime_error("tensor grammar: arity mismatch");
        std::vector<MilnorMonomial> tt;
        for (auto& f : factors) {
            size_t b = f.find_first_not_of(" \t");
            size_t e = f.find_last_not_of(" \t");
            tt.push_back(parse_monomial(f.substr(b, e - b + 1)));
        }
        out.add_term(std::move(tt));
    }
    return out;
}

}  // namespace cobarforge::milnor
