#include "cobarforge/cobar.hpp"

#include "cobarforge/gf2.hpp"
#include "cobarforge/homology_ops.hpp"

#include <algorithm>
#include <sstream>

namespace cobarforge::cobar {

long long CobarWord::t() const
{
    long long v = 0;
    for (const auto& m : letters)
        v += m.dim();
    return v;
}

long long CobarWord::xdeg() const
{
    long long v = 0;
    for (const auto& m : letters)
        v += m.deg();
    return v;
}

CobarWord CobarWord::concat(const CobarWord& rhs) const
{
    CobarWord out = *this;
    out.letters.insert(out.letters.end(), rhs.letters.begin(), rhs.letters.end());
    return out;
}

bool CobarWord::operator<(const CobarWord& rhs) const
{
    if (letters.size() != rhs.letters.size())
        return letters.size() < rhs.letters.size();
    long long ta = t(), tb = rhs.t();
    if (ta != tb)
        return ta < tb;
    return letters < rhs.letters;
}

std::string CobarWord::str() const
{
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i)
            os << '|';
        os << letters[i].str();
    }
    os << ']';
    return os.str();
}

void CobarSum::add_term(CobarWord w)
{
    auto it = std::lower_bound(terms.begin(), terms.end(), w);
    if (it != terms.end() && *it == w)
        terms.erase(it);
    else
        terms.insert(it, std::move(w));
}

CobarSum CobarSum::operator+(const CobarSum& rhs) const
{
    CobarSum out = *this;
    for (const auto& w : rhs.terms)
        out.add_term(w);
    return out;
}

CobarSum CobarSum::concat(const CobarSum& rhs) const
{
    CobarSum out;
    for (const auto& a : terms)
        for (const auto& b : rhs.terms)
            out.add_term(a.concat(b));
    return out;
}

std::string CobarSum::str() const
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

CobarWord parse_word(const std::string& text)
{
    size_t b = text.find('[');
    size_t e = text.rfind(']');
    if (b == std::string::npos || e == std::string::npos || e < b)
        throw std::runtime_error("word grammar: missing brackets in '" + text + "'");
    std::string inner = text.substr(b + 1, e - b - 1);
    CobarWord w;
    if (inner.find_first_not_of(" \t") == std::string::npos)
        return w;
    size_t pos = 0;
    while (true) {
        size_t q = inner.find('|', pos);
        std::string part = inner.substr(pos, q == std::string::npos ? q : q - pos);
        size_t a = part.find_first_not_of(" \t");
        size_t z = part.find_last_not_of(" \t");
        w.letters.push_back(milnor::parse_monomial(part.substr(a, z - a + 1)));
        if (q == std::string::npos)
            break;
        pos = q + 1;
    }
    return w;
}

namespace {

// Splice pairs for one letter: the coproduct terms feeding the
// differential (reduced in stable mode).
KTensor letter_splices(const MilnorMonomial& m, Mode mode)
{
    if (mode == Mode::Stable) {
        KPoly p(m.normalized(Mode::Stable));
        return milnor::reduced_coproduct(p);
    }
    return milnor::coproduct(m, Mode::Unstable);
}

}  // namespace

CobarSum cobar_diff(const CobarWord& w, Mode mode, const AInfinityData& ainf)
{
    CobarSum out;
    for (size_t j = 0; j < w.letters.size(); ++j) {
        KTensor sp = letter_splices(w.letters[j], mode);
        for (const auto& pair : sp.terms) {
            CobarWord nw;
            nw.letters.reserve(w.letters.size() + 1);
            nw.letters.insert(nw.letters.end(), w.letters.begin(), w.letters.begin() + j);
            nw.letters.push_back(pair[0]);
            nw.letters.push_back(pair[1]);
            nw.letters.insert(nw.letters.end(), w.letters.begin() + j + 1, w.letters.end());
            out.add_term(std::move(nw));
        }
        auto it = ainf.tables.find(w.letters[j]);
        if (it != ainf.tables.end()) {
            for (const auto& repl : it->second) {
                CobarWord nw;
                nw.letters.insert(nw.letters.end(), w.letters.begin(), w.letters.begin() + j);
                nw.letters.insert(nw.letters.end(), repl.begin(), repl.end());
                nw.letters.insert(nw.letters.end(), w.letters.begin() + j + 1, w.letters.end());
                out.add_term(std::move(nw));
            }
        }
    }
    return out;
}

CobarSum cobar_diff(const CobarSum& x, Mode mode, const AInfinityData& ainf)
{
    CobarSum out;
    for (const auto& w : x.terms)
        out = out + cobar_diff(w, mode, ainf);
    return out;
}

const std::vector<MilnorMonomial>& stable_monomials_of_dim(long long d)
{
    static std::map<long long, std::vector<MilnorMonomial>> cache;
    auto it = cache.find(d);
    if (it != cache.end())
        return it->second;
    std::vector<MilnorMonomial> out;
    // Exponent vectors over xi_1..xi_K with sum e_i (2^i - 1) = d.
    std::vector<uint32_t> exps{0};  // index 0 = xi_0, unused stably
    std::function<void(uint32_t, long long)> rec = [&](uint32_t gen, long long rem) {
        long long gdim = (1LL << gen) - 1;
        if (rem == 0) {
            out.push_back(MilnorMonomial(std::vector<uint32_t>(exps)));
            return;
        }
        if (gdim > rem)
            return;
        rec(gen + 1, rem);  // exponent 0 for this generator
        exps.resize(std::max<size_t>(exps.size(), gen + 1), 0);
        for (long long e = 1; e * gdim <= rem; ++e) {
            exps[gen] = (uint32_t)e;
            rec(gen + 1, rem - e * gdim);
        }
        exps[gen] = 0;
    };
    if (d > 0)
        rec(1, d);
    std::sort(out.begin(), out.end());
    return cache.emplace(d, std::move(out)).first->second;
}

std::vector<CobarWord> stable_words(long long s, long long t)
{
    std::vector<CobarWord> out;
    if (s == 0) {
        if (t == 0)
            out.push_back(CobarWord{});
        return out;
    }
    if (t < s)
        return out;
    std::vector<MilnorMonomial> cur;
    std::function<void(long long, long long)> rec = [&](long long left, long long rem) {
        if (left == 0) {
            if (rem == 0)
                out.push_back(CobarWord(std::vector<MilnorMonomial>(cur)));
            return;
        }
        for (long long d = 1; d + (left - 1) <= rem; ++d) {
            for (const auto& m : stable_monomials_of_dim(d)) {
                cur.push_back(m);
                rec(left - 1, rem - d);
                cur.pop_back();
            }
        }
    };
    rec(s, t);
    std::sort(out.begin(), out.end());
    return out;
}

D2Report d_squared_window(long long max_t, long long max_s, Mode mode,
                          const AInfinityData& ainf, long long max_xdeg)
{
    D2Report rep;
    // Per-letter obstruction: d²[m] = 0 for every in-window letter.
    std::vector<MilnorMonomial> letters;
    for (long long d = 1; d <= max_t; ++d)
        for (const auto& m : stable_monomials_of_dim(d))
            letters.push_back(m);
    if (mode == Mode::Unstable) {
        std::vector<MilnorMonomial> more;
        for (long long c = 1; c <= max_xdeg; ++c) {
            more.push_back(MilnorMonomial::xi(0, (uint32_t)c));
            for (const auto& m : letters)
                if (m.deg() + c <= max_xdeg)
                    more.push_back(m.times(MilnorMonomial::xi(0, (uint32_t)c)));
        }
        letters.insert(letters.end(), more.begin(), more.end());
    }
    for (const auto& m : letters) {
        CobarWord w(std::vector<MilnorMonomial>{m});
        CobarSum d2 = cobar_diff(cobar_diff(w, mode, ainf), mode, ainf);
        ++rep.letters_checked;
        if (!d2.is_zero()) {
            rep.pass = false;
            rep.failures.push_back(w.str());
        }
    }
    // Direct cross-check on full words in a smaller sub-window.
    long long cap_t = std::min<long long>(max_t, 12);
    if (mode == Mode::Stable) {
        for (long long t = 0; t <= cap_t; ++t)
            for (long long s = 0; s <= std::min(max_s, t); ++s)
                for (const auto& w : stable_words(s, t)) {
                    CobarSum d2 = cobar_diff(cobar_diff(w, mode, ainf), mode, ainf);
                    ++rep.words_checked;
                    if (!d2.is_zero()) {
                        rep.pass = false;
                        rep.failures.push_back(w.str());
                    }
                }
    }
    return rep;
}

void WordPairSum::add_term(CobarWord a, CobarWord b)
{
    auto key = std::make_pair(std::move(a), std::move(b));
    auto it = std::lower_bound(terms.begin(), terms.end(), key);
    if (it != terms.end() && *it == key)
        terms.erase(it);
    else
        terms.insert(it, std::move(key));
}

std::string WordPairSum::str() const
{
    if (terms.empty())
        return "0";
    std::ostringstream os;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i)
            os << " + ";
        os << terms[i].first.str() << " \xE2\x8A\x97 " << terms[i].second.str();
    }
    return os.str();
}

WordPairSum shuffle_coproduct(const CobarWord& w)
{
    WordPairSum out;
    size_t n = w.letters.size();
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        CobarWord a, b;
        for (size_t j = 0; j < n; ++j)
            ((mask >> j) & 1 ? a : b).letters.push_back(w.letters[j]);
        out.add_term(std::move(a), std::move(b));
    }
    return out;
}

MilnorMonomial CupEngine::normalize_letter(const MilnorMonomial& m) const
{
    if (mode_ == Mode::Unstable && conv_.strip_letters_in_cup) {
        MilnorMonomial s = m.strip_xi0();
        if (s.is_one() && !m.is_one())
            return MilnorMonomial::xi(0, 1);
        return s;
    }
    return m;
}

CobarSum CupEngine::prune(CobarSum x, const char* where)
{
    CobarSum out;
    for (auto& w : x.terms) {
        if (w.t() > lim_.max_t || (long long)w.s() > lim_.max_s || w.xdeg() > lim_.max_xdeg) {
            if (events_.size() < 64)
                events_.push_back(std::string(where) + " dropped " + w.str());
            continue;
        }
        out.add_term(std::move(w));
    }
    return out;
}

CobarSum CupEngine::cup(uint32_t i, const CobarSum& u, const CobarSum& v)
{
    CobarSum out;
    for (const auto& a : u.terms)
        for (const auto& b : v.terms)
            out = out + cup_words(i, a, b);
    return out;
}

CobarSum CupEngine::cup_words(uint32_t i, const CobarWord& u, const CobarWord& v)
{
    if (i == 0)
        return prune(CobarSum(u.concat(v)), "cup0");
    if (u.s() == 0 || v.s() == 0)
        return CobarSum{};  // unit word only multiplies
    if (i > lim_.max_cup_index) {
        if (events_.size() < 64)
            events_.push_back("cup index ceiling at " + u.str() + " cup_" + std::to_string(i) +
                              " " + v.str());
        return CobarSum{};
    }
    std::string key = std::to_string(i) + "#" + u.str() + "#" + v.str();
    auto it = memo_.find(key);
    if (it != memo_.end())
        return it->second;
    memo_[key] = CobarSum{};  // guards unexpected cycles

    CobarSum result;
    if (v.s() == 1)
        result = case_word_letter(i, u, v);
    else if (u.s() == 1)
        result = case_letter_word(i, u, v);
    else
        result = case_word_word(i, u, v);

    memo_[key] = result;
    return result;
}

// [x_1..x_n] cup_i [y]  =  sum_k [x_1..(x_k cup_{i-1} y)..x_n]
CobarSum CupEngine::case_word_letter(uint32_t i, const CobarWord& u, const CobarWord& v)
{
    const MilnorMonomial& y = v.letters[0];
    CobarSum out;
    for (size_t k = 0; k < u.letters.size(); ++k) {
        KPoly val = homops::cup_k(i - 1, KPoly(u.letters[k]), KPoly(y), conv_);
        for (const auto& m : val.terms) {
            MilnorMonomial letter = normalize_letter(m);
            CobarWord nw = u;
            nw.letters[k] = letter;
            out.add_term(std::move(nw));
        }
    }
    return prune(std::move(out), "word-letter");
}

// [x] cup_i v resolved through the differential relation:
//   [x] cup_i v = d(v cup_{i+1} [x]) + d(v) cup_{i+1} [x]
//               + v cup_{i+1} d[x] + v cup_i [x]
CobarSum CupEngine::case_letter_word(uint32_t i, const CobarWord& u, const CobarWord& v)
{
    CobarSum out;
    CobarSum vu = cup_words(i + 1, v, u);
    out = out + prune(diff(vu), "letter-word d");
    for (const auto& w : diff(CobarSum(v)).terms)
        out = out + cup_words(i + 1, w, u);
    for (const auto& w : diff(CobarSum(u)).terms)
        out = out + cup_words(i + 1, v, w);
    out = out + cup_words(i, v, u);
    return prune(std::move(out), "letter-word");
}

// Product relation with the chosen factorizations u = x1 x2, v = y1 y2.
CobarSum CupEngine::case_word_word(uint32_t i, const CobarWord& u, const CobarWord& v)
{
    auto split = [&](const CobarWord& w) {
        CobarWord head, tail;
        if (conv_.split_first_letter) {
            head.letters.assign(w.letters.begin(), w.letters.begin() + 1);
            tail.letters.assign(w.letters.begin() + 1, w.letters.end());
        }
        else {
            head.letters.assign(w.letters.begin(), w.letters.end() - 1);
            tail.letters.assign(w.letters.end() - 1, w.letters.end());
        }
        return std::make_pair(head, tail);
    };
    auto [x1, x2] = split(u);
    auto [y1, y2] = split(v);

    CobarSum out;
    for (uint32_t k = 0; k <= i; ++k) {
        bool swap = conv_.swap_on_odd_k && (k % 2 == 1);
        const CobarWord& w1 = swap ? y2 : y1;
        const CobarWord& w2 = swap ? y1 : y2;
        out = out + cup_words(i - k, x1, w1).concat(cup_words(k, x2, w2));
    }
    out = out + cup_words(i, x1, v).concat(CobarSum(x2));
    out = out + CobarSum(x1).concat(cup_words(i, x2, v));
    out = out + cup_words(i, u, y1).concat(CobarSum(y2));
    out = out + CobarSum(y1).concat(cup_words(i, u, y2));
    out = out + CobarSum(x1).concat(cup_words(i, x2, y1)).concat(CobarSum(y2));
    out = out + CobarSum(y1).concat(cup_words(i, x1, y2)).concat(CobarSum(x2));
    return prune(std::move(out), "word-word");
}

std::vector<ExtCell> cobar_homology(long long max_s, long long max_t, const AInfinityData& ainf)
{
    std::vector<ExtCell> cells;
    for (long long t = 0; t <= max_t; ++t) {
        // Index the basis at every s for this t.
        std::map<long long, std::vector<CobarWord>> basis;
        for (long long s = 0; s <= std::min(max_s + 1, t == 0 ? 0LL : t); ++s)
            basis[s] = stable_words(s, t);
        if (t == 0)
            basis[0] = stable_words(0, 0);
        auto index_of = [&](long long s, const CobarWord& w) -> size_t {
            const auto& b = basis[s];
            return std::lower_bound(b.begin(), b.end(), w) - b.begin();
        };
        auto d_matrix = [&](long long s) {
            const auto& src = basis[s];
            const auto& dst = basis[s + 1];
            gf2::F2Matrix m(dst.size(), src.size());
            for (size_t c = 0; c < src.size(); ++c) {
                CobarSum dw = cobar_diff(src[c], Mode::Stable, ainf);
                for (const auto& w : dw.terms) {
                    size_t r = index_of(s + 1, w);
                    if (r < dst.size() && dst[r] == w)
                        m.flip(r, c);
                }
            }
            return m;
        };
        for (long long s = 0; s <= std::min(max_s, t == 0 ? 0LL : t); ++s) {
            const auto& b = basis[s];
            if (b.empty())
                continue;
            gf2::F2Matrix d_out = d_matrix(s);
            gf2::F2Matrix d_in =
                s > 0 ? d_matrix(s - 1) : gf2::F2Matrix(b.size(), 0);
            gf2::HomologyBasis h = gf2::homology_basis(d_out, d_in);
            ExtCell cell;
            cell.s = s;
            cell.t = t;
            cell.dim = h.dimension;
            for (const auto& vec : h.representatives) {
                std::ostringstream os;
                bool first = true;
                for (size_t c = 0; c < b.size(); ++c)
                    if (gf2::get_bit(vec, c)) {
                        if (!first)
                            os << " + ";
                        os << b[c].str();
                        first = false;
                    }
                cell.gens.push_back(os.str());
            }
            if (cell.dim > 0)
                cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace cobarforge::cobar
