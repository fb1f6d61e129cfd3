#include "cobarforge/may.hpp"

#include "cobarforge/gf2.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cobarforge::may {

std::string PSGen::str() const
{
    if (i == 0 && k == 0)
        return "hm1";
    if (i == 1)
        return "h" + std::to_string(k);
    return "g(" + std::to_string(i) + "," + std::to_string(k) + ")";
}

void PSWord::normalize()
{
    std::sort(gens.begin(), gens.end());
}

long long PSWord::t() const
{
    long long v = 0;
    for (const auto& g : gens)
        v += g.dim();
    return v;
}

long long PSWord::weight() const
{
    long long v = 0;
    for (const auto& g : gens)
        v += g.weight();
    return v;
}

bool PSWord::contains_hm1() const
{
    for (const auto& g : gens)
        if (g.i == 0)
            return true;
    return false;
}

PSWord PSWord::times(const PSWord& rhs) const
{
    PSWord out = *this;
    out.gens.insert(out.gens.end(), rhs.gens.begin(), rhs.gens.end());
    out.normalize();
    return out;
}

PSWord PSWord::pow(uint32_t e) const
{
    PSWord out;
    for (uint32_t j = 0; j < e; ++j)
        out = out.times(*this);
    return out;
}

bool PSWord::operator<(const PSWord& r) const
{
    if (gens.size() != r.gens.size())
        return gens.size() < r.gens.size();
    long long ta = t(), tb = r.t();
    if (ta != tb)
        return ta < tb;
    return gens < r.gens;
}

std::string PSWord::str() const
{
    if (gens.empty())
        return "1";
    std::ostringstream os;
    size_t j = 0;
    bool first = true;
    while (j < gens.size()) {
        size_t k = j;
        while (k < gens.size() && gens[k] == gens[j])
            ++k;
        if (!first)
            os << '*';
        os << gens[j].str();
        if (k - j > 1)
            os << '^' << (k - j);
        first = false;
        j = k;
    }
    return os.str();
}

void PSSum::add_term(PSWord w)
{
    auto it = std::lower_bound(terms.begin(), terms.end(), w);
    if (it != terms.end() && *it == w)
        terms.erase(it);
    else
        terms.insert(it, std::move(w));
}

PSSum PSSum::operator+(const PSSum& rhs) const
{
    PSSum out = *this;
    for (const auto& w : rhs.terms)
        out.add_term(w);
    return out;
}

PSSum PSSum::operator*(const PSSum& rhs) const
{
    PSSum out;
    for (const auto& a : terms)
        for (const auto& b : rhs.terms)
            out.add_term(a.times(b));
    return out;
}

std::string PSSum::str() const
{
    if (terms.empty())
        return "0";
    std::ostringstream os;
    for (size_t j = 0; j < terms.size(); ++j) {
        if (j)
            os << " + ";
        os << terms[j].str();
    }
    return os.str();
}

PSGen hgen(uint32_t n)
{
    return PSGen{1, n};
}

namespace {

uint64_t read_uint(const std::string& s, size_t& p)
{
    if (p >= s.size() || !isdigit((unsigned char)s[p]))
        throw std::runtime_error("ps grammar: expected number in '" + s + "'");
    uint64_t v = 0;
    while (p < s.size() && isdigit((unsigned char)s[p]))
        v = v * 10 + (s[p++] - '0');
    return v;
}

}  // namespace

PSWord parse_ps_word(const std::string& text)
{
    PSWord out;
    size_t p = 0;
    auto skip = [&] {
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t'))
            ++p;
    };
    skip();
    if (p < text.size() && text[p] == '1' && p + 1 == text.size())
        return out;
    while (p < text.size()) {
        skip();
        PSGen g;
        if (text.compare(p, 3, "hm1") == 0) {
            g = PSGen{0, 0};
            p += 3;
        }
        else if (text[p] == 'h') {
            ++p;
            g = PSGen{1, (uint32_t)read_uint(text, p)};
        }
        else if (text[p] == 'g') {
            ++p;
            if (p >= text.size() || text[p] != '(')
                throw std::runtime_error("ps grammar: expected '(' after g");
            ++p;
            uint32_t i = (uint32_t)read_uint(text, p);
            if (p >= text.size() || text[p] != ',')
                throw std::runtime_error("ps grammar: expected ','");
            ++p;
            uint32_t k = (uint32_t)read_uint(text, p);
            if (p >= text.size() || text[p] != ')')
                throw std::runtime_error("ps grammar: expected ')'");
            ++p;
            g = PSGen{i, k};
        }
        else
            throw std::runtime_error("ps grammar: unexpected '" + text.substr(p) + "'");
        uint32_t e = 1;
        if (p < text.size() && text[p] == '^') {
            ++p;
            e = (uint32_t)read_uint(text, p);
        }
        for (uint32_t j = 0; j < e; ++j)
            out.gens.push_back(g);
        skip();
        if (p < text.size()) {
            if (text[p] != '*')
                throw std::runtime_error("ps grammar: expected '*' at '" + text.substr(p) + "'");
            ++p;
        }
    }
    out.normalize();
    return out;
}

PSSum parse_ps_sum(const std::string& text)
{
    PSSum out;
    if (text == "0")
        return out;
    size_t pos = 0;
    while (true) {
        size_t q = text.find(" + ", pos);
        out.add_term(parse_ps_word(text.substr(pos, q == std::string::npos ? q : q - pos)));
        if (q == std::string::npos)
            break;
        pos = q + 3;
    }
    return out;
}

namespace {

// Letter -> generator, or nothing; collapse sends pure xi_0 powers to hm1.
bool letter_gen(const MilnorMonomial& m, Mode mode, bool strip, PSGen& out)
{
    MilnorMonomial v = m;
    if (strip) {
        v = m.strip_xi0();
        if (v.is_one() && !m.is_one())
            v = MilnorMonomial::xi(0, 1);
    }
    uint32_t i = 0, k = 0;
    if (!v.is_generator_power(i, k))
        return false;
    if (i == 0) {
        if (mode == Mode::Stable)
            return false;
        out = PSGen{0, 0};  // hm1, any power collapses
        return true;
    }
    out = PSGen{i, k};
    return true;
}

bool word_sorted(const CobarWord& w)
{
    for (size_t j = 0; j + 1 < w.letters.size(); ++j)
        if (w.letters[j + 1] < w.letters[j])
            return false;
    return true;
}

}  // namespace

PSSum eta_project(const CobarWord& w, Mode mode)
{
    PSWord out;
    for (const auto& m : w.letters) {
        PSGen g;
        if (!letter_gen(m, mode, false, g))
            return PSSum{};
        out.gens.push_back(g);
    }
    out.normalize();
    return PSSum(out);
}

PSSum eta_pipeline(const CobarWord& w, Mode mode, const Conventions& conv)
{
    using EV = Conventions::EtaVariant;
    if (conv.pipeline_eta == EV::StripSorted && !word_sorted(w))
        return PSSum{};
    bool strip = conv.pipeline_eta != EV::StrictCollapse;
    PSWord out;
    for (const auto& m : w.letters) {
        PSGen g;
        if (!letter_gen(m, mode, strip, g))
            return PSSum{};
        out.gens.push_back(g);
    }
    out.normalize();
    return PSSum(out);
}

PSSum eta_pipeline(const CobarSum& x, Mode mode, const Conventions& conv)
{
    PSSum out;
    for (const auto& w : x.terms)
        out = out + eta_pipeline(w, mode, conv);
    return out;
}

CobarWord xi_lift(const PSWord& w)
{
    std::vector<MilnorMonomial> letters;
    for (const auto& g : w.gens)
        letters.push_back(g.i == 0 ? MilnorMonomial::xi(0, 1)
                                   : MilnorMonomial::xi(g.i, 1).pow2(g.k));
    std::sort(letters.begin(), letters.end());
    return CobarWord(std::move(letters));
}

CobarSum xi_lift(const PSSum& x)
{
    CobarSum out;
    for (const auto& w : x.terms)
        out.add_term(xi_lift(w));
    return out;
}

PSSum quotient_hminus1(const PSSum& x)
{
    PSSum out;
    for (const auto& w : x.terms)
        if (!w.contains_hm1())
            out.add_term(w);
    return out;
}

// ---- transfer ----

namespace {

// Splice terms of one letter partitioned by whether the xi count is
// preserved (d0) or raised (delta).
void letter_splits(const MilnorMonomial& m, bool preserving, milnor::KTensor& out)
{
    milnor::KPoly p(m.normalized(Mode::Stable));
    milnor::KTensor full = milnor::reduced_coproduct(p);
    for (const auto& pr : full.terms) {
        bool keeps = pr[0].deg() + pr[1].deg() == m.deg();
        if (keeps == preserving)
            out.add_term(pr);
    }
}

CobarSum splice_parts(const CobarWord& w, bool preserving)
{
    CobarSum out;
    for (size_t j = 0; j < w.letters.size(); ++j) {
        milnor::KTensor sp(2);
        letter_splits(w.letters[j], preserving, sp);
        for (const auto& pr : sp.terms) {
            CobarWord nw;
            nw.letters.reserve(w.letters.size() + 1);
            nw.letters.insert(nw.letters.end(), w.letters.begin(), w.letters.begin() + j);
            nw.letters.push_back(pr[0]);
            nw.letters.push_back(pr[1]);
            nw.letters.insert(nw.letters.end(), w.letters.begin() + j + 1, w.letters.end());
            out.add_term(std::move(nw));
        }
    }
    return out;
}

// Odd multinomial check: the ordered split (a, b) of a*b carries an odd
// binomial coefficient exactly when the exponent bits of a sit inside
// those of the product (Lucas).
bool split_odd(const MilnorMonomial& a, const MilnorMonomial& prod)
{
    for (size_t g = 0; g < prod.e.size(); ++g) {
        uint32_t ea = a.exp((uint32_t)g);
        uint32_t ep = prod.e[g];
        if ((ea & (ep - ea)) != 0)
            return false;
    }
    return true;
}

}  // namespace

CobarSum Transfer::d0(const CobarWord& w) const
{
    return splice_parts(w, true);
}

CobarSum Transfer::d0(const CobarSum& x) const
{
    CobarSum out;
    for (const auto& w : x.terms)
        out = out + d0(w);
    return out;
}

CobarSum Transfer::delta(const CobarSum& x) const
{
    CobarSum out;
    for (const auto& w : x.terms)
        out = out + splice_parts(w, false);
    return out;
}

PSSum Transfer::eta0(const CobarSum& x) const
{
    PSSum out;
    for (const auto& w : x.terms)
        out = out + eta_project(w, Mode::Stable);
    return out;
}

CobarSum Transfer::h0(const CobarWord& w)
{
    auto it = h0_memo_.find(w);
    if (it != h0_memo_.end())
        return it->second;
    for (const auto& s : h0_stack_)
        if (s == w)
            throw TransferError("contraction recursion cycle at " + w.str());
    h0_stack_.push_back(w);

    CobarSum result;
    size_t inv = w.letters.size();
    for (size_t j = 0; j + 1 < w.letters.size(); ++j)
        if (w.letters[j + 1] < w.letters[j]) {
            inv = j;
            break;
        }
    if (inv < w.letters.size()) {
        MilnorMonomial prod = w.letters[inv].times(w.letters[inv + 1]);
        if (split_odd(w.letters[inv], prod)) {
            CobarWord merged;
            merged.letters.reserve(w.letters.size() - 1);
            merged.letters.insert(merged.letters.end(), w.letters.begin(),
                                  w.letters.begin() + inv);
            merged.letters.push_back(prod);
            merged.letters.insert(merged.letters.end(), w.letters.begin() + inv + 2,
                                  w.letters.end());
            CobarSum rem = d0(merged);
            rem.add_term(w);  // cancels the defining split
            result.add_term(merged);
            for (const auto& u : rem.terms)
                result = result + h0(u);
        }
    }
    h0_stack_.pop_back();
    h0_memo_[w] = result;
    return result;
}

CobarSum Transfer::h0(const CobarSum& x)
{
    CobarSum out;
    for (const auto& w : x.terms)
        out = out + h0(w);
    return out;
}

void Transfer::check_identity(const CobarWord& w)
{
    ++homotopy_calls_;
    CobarSum lhs = d0(h0(w)) + h0(d0(CobarSum(w)));
    CobarSum rhs(w);
    PSSum cls = eta_project(w, Mode::Stable);
    if (!cls.is_zero())
        rhs.add_term(xi_lift(cls.terms[0]));
    if (!(lhs == rhs))
        throw TransferError("contraction identity failed at " + w.str());
}

PSSum Transfer::d1(const PSWord& w)
{
    for (const auto& g : w.gens)
        if (g.i == 0)
            throw TransferError("transfer differential is stable; word " + w.str() +
                                " carries hm1");
    auto it = memo_.find(w);
    if (it != memo_.end())
        return it->second;

    CobarSum cur = delta(CobarSum(xi_lift(w)));
    PSSum out = eta0(cur);
    while (!cur.is_zero()) {
        for (const auto& u : cur.terms)
            check_identity(u);
        cur = h0(cur);
        if (cur.is_zero())
            break;
        cur = delta(cur);
        out = out + eta0(cur);
    }
    memo_[w] = out;
    return out;
}

PSSum Transfer::d1(const PSSum& x)
{
    PSSum out;
    for (const auto& w : x.terms)
        out = out + d1(w);
    return out;
}

PSSum FiltrationSplit::total() const
{
    PSSum out;
    for (const auto& [r, v] : components)
        out = out + v;
    return out;
}

std::string FiltrationSplit::str() const
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [r, v] : components) {
        if (!first)
            os << "; ";
        os << "d" << r << ": " << v.str();
        first = false;
    }
    return first ? "0" : os.str();
}

FiltrationSplit split_by_jump(const PSSum& value, long long source_s)
{
    FiltrationSplit out;
    for (const auto& w : value.terms) {
        long long jump = (long long)w.s() - source_s;
        out.components[(uint32_t)std::max<long long>(jump, 0)].add_term(w);
    }
    return out;
}

PSSum ps_cup(uint32_t i, const PSSum& u, const PSSum& v, Mode mode, const Conventions& conv,
             const cobar::CupLimits& lim, std::vector<std::string>* events)
{
    cobar::CupEngine engine(mode, conv, lim);
    CobarSum value = engine.cup(i, xi_lift(u), xi_lift(v));
    if (events)
        for (const auto& e : engine.truncation_events())
            events->push_back(e);
    return eta_pipeline(value, mode, conv);
}

PSSum dhn_closed_formula(uint32_t n)
{
    PSSum out;
    for (uint32_t i = 0; i < n; ++i) {
        PSWord w;
        w.gens.push_back(PSGen{i, 0});
        for (uint32_t j = 0; j < (1u << i); ++j)
            w.gens.push_back(hgen(n - i));
        w.normalize();
        out.add_term(w);
    }
    return out;
}

namespace {

cobar::CupLimits dhn_limits(uint32_t n)
{
    cobar::CupLimits lim;
    lim.max_t = (1LL << (n + 2)) + 8;
    lim.max_s = (1LL << (n + 1)) + 4;
    lim.max_xdeg = lim.max_t + 16;
    lim.max_cup_index = 24;
    return lim;
}

}  // namespace

DhnResult d_hn(uint32_t n, const Conventions& conv)
{
    if (n < 1)
        throw std::runtime_error("d_hn: n >= 1 required");
    DhnResult res;
    res.n = n;

    PSSum d;
    if (conv.seed_dh1) {
        PSWord w;
        w.gens = {PSGen{0, 0}, hgen(1)};
        w.normalize();
        d = PSSum(w);
        res.notes.push_back("base d(h1) = hm1*h1 adopted from the inductive seed");
    }
    else {
        CobarWord h1 = xi_lift(PSWord({hgen(1)}));
        d = eta_pipeline(cobar_diff(h1, Mode::Unstable), Mode::Unstable, conv);
        res.notes.push_back("base d(h1) spliced directly: " + d.str());
    }

    for (uint32_t m = 1; m < n; ++m) {
        cobar::CupLimits lim = dhn_limits(m + 1);
        std::vector<std::string> ev;
        PSSum next = ps_cup(2, d, d, Mode::Unstable, conv, lim, &ev);
        PSSum hm(PSWord({hgen(m)}));
        PSSum alt = ps_cup(1, d, hm, Mode::Unstable, conv, lim, &ev) +
                    ps_cup(1, hm, d, Mode::Unstable, conv, lim, &ev);
        for (const auto& e : ev)
            if (res.notes.size() < 32)
                res.notes.push_back(e);
        if (m + 1 == n) {
            res.alt_value = alt;
            res.boundary_diff = next + alt;
        }
        d = next;
    }
    if (n == 1) {
        res.alt_value = d;
        res.boundary_diff = PSSum{};
    }
    res.value = d;
    res.closed = dhn_closed_formula(n);
    res.matches_closed = (res.value == res.closed);
    return res;
}

PSSum full_diff_gen(const PSGen& g, const Conventions& conv, std::vector<std::string>* notes)
{
    if (g.i == 1) {
        if (g.k == 0)
            return PSSum{};  // d(h_0) vanishes after the hm1 bookkeeping
        return d_hn(g.k, conv).value;
    }
    CobarWord base;
    base.letters = {MilnorMonomial::xi(g.i, 1)};
    PSSum d = eta_pipeline(cobar_diff(base, Mode::Unstable), Mode::Unstable, conv);
    if (notes)
        notes->push_back("base d([xi" + std::to_string(g.i) + "]) = " + d.str());
    for (uint32_t m = 0; m < g.k; ++m) {
        cobar::CupLimits lim = dhn_limits(g.i + m + 2);
        std::vector<std::string> ev;
        d = ps_cup(2, d, d, Mode::Unstable, conv, lim, &ev);
        if (notes)
            for (const auto& e : ev)
                if (notes->size() < 32)
                    notes->push_back(e);
    }
    return d;
}

StarResult star_formula(uint32_t n)
{
    if (n < 2)
        throw std::runtime_error("star_formula: n >= 2 required");
    StarResult res;
    res.n = n;
    PSWord a({hgen(n - 1), PSGen{2, n - 2}, PSGen{2, n - 2}});
    PSWord b({hgen(n - 2), hgen(n - 2), PSGen{2, n - 1}});
    Transfer tr;
    res.lhs = tr.d1(a) + tr.d1(b);
    PSWord target;
    for (int j = 0; j < 4; ++j)
        target.gens.push_back(hgen(n - 1));
    target.normalize();
    res.rhs = PSSum(target);
    res.match = (res.lhs == res.rhs);
    return res;
}

std::vector<PSWord> ps_words_in_window(const Window& win)
{
    // Generators with stem within range; h_0 has stem 0 so the filtration
    // bound keeps things finite.
    std::vector<PSGen> gens;
    for (uint32_t i = 1; i < 12; ++i)
        for (uint32_t k = 0; k < 12; ++k) {
            PSGen g{i, k};
            long long st = g.dim() - 1;
            if (st <= win.max_stem)
                gens.push_back(g);
        }
    std::sort(gens.begin(), gens.end());
    std::vector<PSWord> out;
    PSWord cur;
    std::function<void(size_t, long long, long long)> rec = [&](size_t idx, long long stem_left,
                                                                long long filt_left) {
        out.push_back(cur);
        for (size_t j = idx; j < gens.size(); ++j) {
            long long st = gens[j].dim() - 1;
            if (st > stem_left || filt_left == 0)
                continue;
            cur.gens.push_back(gens[j]);
            rec(j, stem_left - st, filt_left - 1);
            cur.gens.pop_back();
        }
    };
    rec(0, win.max_stem, win.max_filt);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct CellKey {
    long long stem, filt;
    bool operator<(const CellKey& r) const
    {
        return stem != r.stem ? stem < r.stem : filt < r.filt;
    }
};

}  // namespace

Chart page_compute(uint32_t r, const Window& win, const Conventions& conv,
                   const FiltrationSplit* extra)
{
    Chart chart;
    chart.window = win;
    chart.page = r;
    chart.conventions = conv.describe();

    Window wide{win.max_stem + 1, win.max_filt + 1};
    std::vector<PSWord> words = ps_words_in_window(wide);
    std::map<CellKey, std::vector<PSWord>> cells;
    for (const auto& w : words) {
        if (w.s() == 0)
            continue;
        cells[CellKey{w.stem(), (long long)w.s()}].push_back(w);
    }
    cells[CellKey{0, 0}].push_back(PSWord{});

    if (r == 1) {
        for (const auto& [key, basis] : cells) {
            if (key.stem > win.max_stem || key.filt > win.max_filt)
                continue;
            PageCell c;
            c.stem = key.stem;
            c.filt = key.filt;
            c.dim = basis.size();
            for (const auto& w : basis)
                c.gens.push_back(w.str());
            chart.cells.push_back(c);
        }
        return chart;
    }

    Transfer tr;
    auto matrix_between = [&](const std::vector<PSWord>& src, const std::vector<PSWord>& dst) {
        gf2::F2Matrix m(dst.size(), src.size());
        for (size_t c = 0; c < src.size(); ++c) {
            PSSum dv = tr.d1(src[c]);
            for (const auto& w : dv.terms) {
                auto it = std::lower_bound(dst.begin(), dst.end(), w);
                if (it != dst.end() && *it == w)
                    m.flip(it - dst.begin(), c);
            }
        }
        return m;
    };

    static const std::vector<PSWord> kNone;
    for (const auto& [key, basis] : cells) {
        if (key.stem > win.max_stem || key.filt > win.max_filt)
            continue;
        auto out_it = cells.find(CellKey{key.stem - 1, key.filt + 1});
        auto in_it = cells.find(CellKey{key.stem + 1, key.filt - 1});
        const auto& out_basis = out_it == cells.end() ? kNone : out_it->second;
        const auto& in_basis = in_it == cells.end() ? kNone : in_it->second;
        gf2::F2Matrix d_out = matrix_between(basis, out_basis);
        gf2::F2Matrix d_in = matrix_between(in_basis, basis);
        gf2::HomologyBasis h = gf2::homology_basis(d_out, d_in);
        if (h.dimension == 0)
            continue;
        PageCell c;
        c.stem = key.stem;
        c.filt = key.filt;
        c.dim = h.dimension;
        for (const auto& v : h.representatives) {
            std::ostringstream os;
            bool first = true;
            for (size_t j = 0; j < basis.size(); ++j)
                if (gf2::get_bit(v, j)) {
                    if (!first)
                        os << " + ";
                    os << basis[j].str();
                    first = false;
                }
            c.gens.push_back(os.str());
        }
        chart.cells.push_back(c);
    }

    if (extra) {
        for (const auto& [jump, value] : extra->components) {
            for (const auto& w : value.terms) {
                PageArrow a;
                a.page = jump;
                a.source = "supplied";
                a.target = w.str();
                chart.differentials.push_back(a);
            }
        }
    }
    return chart;
}

bool is_d1_boundary(const PSSum& z, const Window& win)
{
    if (z.is_zero())
        return true;
    long long stem = z.terms[0].stem();
    long long s = (long long)z.terms[0].s();
    for (const auto& w : z.terms)
        if (w.stem() != stem || (long long)w.s() != s)
            return false;  // inhomogeneous: not a single cell class
    (void)win;
    Window src_win{stem + 1, s};
    std::vector<PSWord> sources;
    for (const auto& w : ps_words_in_window(src_win))
        if (w.stem() == stem + 1 && (long long)w.s() == s - 1)
            sources.push_back(w);

    Transfer tr;
    std::map<PSWord, size_t> index;
    auto idx = [&](const PSWord& w) {
        auto it = index.find(w);
        if (it == index.end())
            it = index.emplace(w, index.size()).first;
        return it->second;
    };
    std::vector<std::vector<size_t>> images;
    for (const auto& srcw : sources) {
        PSSum dv = tr.d1(srcw);
        std::vector<size_t> vec;
        for (const auto& w : dv.terms)
            vec.push_back(idx(w));
        if (!vec.empty())
            images.push_back(std::move(vec));
    }
    std::vector<size_t> target;
    for (const auto& w : z.terms)
        target.push_back(idx(w));

    size_t cols = index.size();
    gf2::Eliminator e(cols);
    auto to_vec = [&](const std::vector<size_t>& support) {
        gf2::Vec v(gf2::words_for(cols ? cols : 1), 0);
        for (size_t b : support)
            gf2::set_bit(v, b);
        return v;
    };
    for (const auto& im : images)
        e.insert(to_vec(im));
    return e.contains(to_vec(target));
}

KervaireReport kervaire_pipeline(uint32_t n, const Window& win, const Conventions& conv,
                                 const cobar::CupLimits& lim)
{
    if (n < 4)
        throw std::runtime_error("kervaire_pipeline: n >= 4 required");
    KervaireReport rep;
    rep.n = n;
    try {
        DhnResult dh = d_hn(n, conv);
        rep.d_hn_value = dh.value;
        for (const auto& note : dh.notes)
            rep.notes.push_back(note);

        std::vector<std::string> ev;
        rep.d_sq_raw = ps_cup(1, dh.value, dh.value, Mode::Unstable, conv, lim, &ev);
        rep.d_sq = quotient_hminus1(rep.d_sq_raw);

        // Leading display: h_1 h_{n-1}^4 + [xi_2^2] h_{n-2}^8.
        {
            PSWord lead1({hgen(1)});
            for (int j = 0; j < 4; ++j)
                lead1.gens.push_back(hgen(n - 1));
            lead1.normalize();
            PSWord lead2({PSGen{2, 1}});
            for (int j = 0; j < 8; ++j)
                lead2.gens.push_back(hgen(n - 2));
            lead2.normalize();
            bool has1 = std::binary_search(rep.d_sq.terms.begin(), rep.d_sq.terms.end(), lead1);
            bool has2 = std::binary_search(rep.d_sq.terms.begin(), rep.d_sq.terms.end(), lead2);
            rep.notes.push_back(std::string("leading term h1*h_{n-1}^4 ") +
                                (has1 ? "present" : "missing"));
            rep.notes.push_back(std::string("leading term g(2,1)*h_{n-2}^8 ") +
                                (has2 ? "present" : "missing"));
        }

        // Corrected class: h_n^2 + h_1 (h_{n-1} g(2,n-2)^2 + h_{n-2}^2 g(2,n-1)).
        PSWord g_lo{{PSGen{2, n - 2}}}, g_hi{{PSGen{2, n - 1}}};
        PSSum c1(PSWord({hgen(n - 1), PSGen{2, n - 2}, PSGen{2, n - 2}}));
        PSSum c2(PSWord({hgen(n - 2), hgen(n - 2), PSGen{2, n - 1}}));
        PSSum c_sum = c1 + c2;
        rep.correction = PSSum(PSWord({hgen(1)})) * c_sum;

        // d of the correction, assembled with the derivation rule on
        // distinct factors and the cup-square rule on squares.
        PSSum d_hn1 = quotient_hminus1(d_hn(n - 1, conv).value);
        PSSum d_hn2 = quotient_hminus1(d_hn(n - 2, conv).value);
        PSSum d_glo = quotient_hminus1(full_diff_gen(PSGen{2, n - 2}, conv, &rep.notes));
        PSSum d_ghi = quotient_hminus1(full_diff_gen(PSGen{2, n - 1}, conv, &rep.notes));
        PSSum d_glo_sq = quotient_hminus1(ps_cup(1, d_glo, d_glo, Mode::Unstable, conv, lim, &ev));
        PSSum d_hn2_sq = quotient_hminus1(ps_cup(1, d_hn2, d_hn2, Mode::Unstable, conv, lim, &ev));

        PSSum glo_sq(PSWord({PSGen{2, n - 2}, PSGen{2, n - 2}}));
        PSSum hn1(PSWord({hgen(n - 1)}));
        PSSum hn2sq(PSWord({hgen(n - 2), hgen(n - 2)}));
        PSSum ghi(PSWord({PSGen{2, n - 1}}));
        PSSum d_c = d_hn1 * glo_sq + hn1 * d_glo_sq + d_hn2_sq * ghi + hn2sq * d_ghi;
        PSSum h1(PSWord({hgen(1)}));
        PSSum d_h1 = quotient_hminus1(d_hn(1, conv).value);  // vanishes after the quotient
        PSSum d_corr_part = h1 * d_c + d_h1 * c_sum;

        rep.d_corrected = rep.d_sq + quotient_hminus1(d_corr_part);
        rep.by_jump = split_by_jump(rep.d_corrected, 2).components;
        rep.low_jumps_vanish = true;
        for (uint32_t j = 1; j <= 4; ++j) {
            auto it = rep.by_jump.find(j);
            if (it != rep.by_jump.end() && !it->second.is_zero())
                rep.low_jumps_vanish = false;
        }
        {
            auto it = rep.by_jump.find(5);
            if (it != rep.by_jump.end())
                rep.d5 = it->second;
        }

        // Parenthesized cycle of filtration 4.
        PSSum gx(PSWord({PSGen{2, n - 3}, PSGen{2, n - 3}, PSGen{2, n - 3}, PSGen{2, n - 3}}));
        gx = gx + PSSum(PSWord({hgen(n - 3), PSGen{2, n - 4}, PSGen{2, n - 4}, hgen(n)}));
        gx = gx + PSSum(PSWord({hgen(n - 4), hgen(n - 4), PSGen{2, n - 3}, hgen(n)}));
        gx = gx + PSSum(PSWord({hgen(n - 2), hgen(n - 2), hgen(n - 2), PSGen{2, n - 2}}));
        rep.g_expr = gx;
        Transfer tr;
        rep.g_is_d1_cycle = tr.d1(gx).is_zero();

        rep.d5_target = PSSum(PSWord({hgen(1), hgen(1)})) * gx * PSSum(PSWord({hgen(n - 1)}));
        rep.d5_boundary_gap = rep.d5 + rep.d5_target;
        rep.d5_matches_mod_d1 =
            rep.d5_boundary_gap.is_zero() || is_d1_boundary(rep.d5_boundary_gap, win);

        if (n == 4) {
            PSSum g0h3 = gx * PSSum(PSWord({hgen(3)}));
            rep.g0h3_vanishes_e2 = tr.d1(g0h3).is_zero() && is_d1_boundary(g0h3, win);
        }
        for (const auto& e : ev)
            if (rep.notes.size() < 48)
                rep.notes.push_back(e);
    }
    catch (const std::exception& ex) {
        rep.complete = false;
        rep.notes.push_back(std::string("incomplete: ") + ex.what());
    }
    return rep;
}

}  // namespace cobarforge::may
