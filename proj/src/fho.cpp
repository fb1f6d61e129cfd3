#include "cobarforge/fho.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cobarforge::fho {

using gf2::Eliminator;
using gf2::F2Solver;
using gf2::Vec;

bool GradedMap::is_zero() const
{
    for (const auto& [n, m] : mats)
        if (!m.is_zero_matrix())
            return false;
    return true;
}

F2Matrix map_matrix(const GradedMap& f, const GradedComplexF2& src, const GradedComplexF2& dst,
                    int n)
{
    auto it = f.mats.find(n);
    if (it != f.mats.end())
        return it->second;
    return F2Matrix(dst.dim(n + f.shift), src.dim(n));
}

GradedMap compose(const GradedMap& g, const GradedMap& f, const GradedComplexF2& a,
                  const GradedComplexF2& b, const GradedComplexF2& c)
{
    GradedMap out;
    out.shift = f.shift + g.shift;
    for (int n = a.lo(); n <= a.hi(); ++n) {
        if (a.dim(n) == 0)
            continue;
        F2Matrix fm = map_matrix(f, a, b, n);
        F2Matrix gm = map_matrix(g, b, c, n + f.shift);
        if (gm.rows() == 0 || fm.cols() == 0)
            continue;
        out.mats[n] = gm.multiply(fm);
    }
    return out;
}

GradedMap add(const GradedMap& f, const GradedMap& g, const GradedComplexF2& src,
              const GradedComplexF2& dst)
{
    if (f.shift != g.shift)
        throw std::runtime_error("GradedMap add: shift mismatch");
    GradedMap out;
    out.shift = f.shift;
    for (int n = src.lo(); n <= src.hi(); ++n) {
        if (src.dim(n) == 0)
            continue;
        out.mats[n] = map_matrix(f, src, dst, n).add(map_matrix(g, src, dst, n));
    }
    return out;
}

GradedMap identity_map(const GradedComplexF2& x)
{
    GradedMap out;
    for (int n = x.lo(); n <= x.hi(); ++n)
        if (x.dim(n))
            out.mats[n] = F2Matrix::identity(x.dim(n));
    return out;
}

GradedMap zero_map(int shift)
{
    GradedMap out;
    out.shift = shift;
    return out;
}

bool is_chain_map(const GradedMap& f, const GradedComplexF2& src, const GradedComplexF2& dst)
{
    for (int n = src.lo(); n <= src.hi(); ++n) {
        F2Matrix lhs = map_matrix(f, src, dst, n - 1).multiply(src.differential(n));
        F2Matrix rhs = dst.differential(n + f.shift).multiply(map_matrix(f, src, dst, n));
        if (!(lhs == rhs))
            return false;
    }
    return true;
}

SDRData make_sdr(const GradedComplexF2& X)
{
    X.validate();
    SDRData out;
    out.X = X;
    out.H = GradedComplexF2(X.lo(), X.hi());
    out.h.shift = 1;

    struct Split {
        std::vector<Vec> b, r, c;  // boundary / representative / anti-cycle bases
    };
    std::map<int, Split> splits;

    for (int n = X.lo(); n <= X.hi(); ++n) {
        size_t dim = X.dim(n);
        Split sp;
        Eliminator span(dim ? dim : 1);
        if (n < X.hi()) {
            const F2Matrix& din = X.differential(n + 1);
            for (size_t c = 0; c < din.cols(); ++c) {
                Vec v(gf2::words_for(dim ? dim : 1), 0);
                for (size_t r = 0; r < dim; ++r)
                    if (din.get(r, c))
                        gf2::set_bit(v, r);
                if (span.insert(v))
                    sp.b.push_back(v);
            }
        }
        F2Matrix dout = n > X.lo() ? X.differential(n) : F2Matrix(0, dim);
        for (const Vec& z : dout.kernel_basis())
            if (span.insert(z))
                sp.r.push_back(z);
        for (size_t j = 0; j < dim; ++j) {
            Vec v(gf2::words_for(dim ? dim : 1), 0);
            gf2::set_bit(v, j);
            if (span.insert(v))
                sp.c.push_back(v);
        }
        std::vector<std::string> hl;
        for (size_t j = 0; j < sp.r.size(); ++j)
            hl.push_back("H" + std::to_string(n) + "_" + std::to_string(j));
        out.H.set_basis(n, std::move(hl));
        splits[n] = std::move(sp);
    }

    for (int n = X.lo(); n <= X.hi(); ++n) {
        size_t dim = X.dim(n);
        const Split& sp = splits[n];
        size_t hdim = sp.r.size();

        F2Matrix xi(dim, hdim);
        for (size_t j = 0; j < hdim; ++j)
            for (size_t r = 0; r < dim; ++r)
                if (gf2::get_bit(sp.r[j], r))
                    xi.set(r, j);
        if (hdim && dim)
            out.xi.mats[n] = xi;

        // Coordinates in the (b | r | c) basis give eta and the b-part.
        size_t total = sp.b.size() + sp.r.size() + sp.c.size();
        F2Matrix basis(dim, total);
        size_t col = 0;
        for (const auto& v : sp.b) {
            for (size_t r = 0; r < dim; ++r)
                if (gf2::get_bit(v, r))
                    basis.set(r, col);
            ++col;
        }
        for (const auto& v : sp.r) {
            for (size_t r = 0; r < dim; ++r)
                if (gf2::get_bit(v, r))
                    basis.set(r, col);
            ++col;
        }
        for (const auto& v : sp.c) {
            for (size_t r = 0; r < dim; ++r)
                if (gf2::get_bit(v, r))
                    basis.set(r, col);
            ++col;
        }
        F2Solver coords(basis);

        F2Matrix eta(hdim, dim);
        // h lifts the boundary part through the anti-cycles one degree up.
        const Split& up = n < X.hi() ? splits[n + 1] : splits[n];
        size_t updim = n < X.hi() ? X.dim(n + 1) : 0;
        size_t ucols = n < X.hi() ? up.c.size() : 0;
        F2Matrix dc(dim, ucols);
        if (n < X.hi()) {
            const F2Matrix& din = X.differential(n + 1);
            for (size_t j = 0; j < ucols; ++j) {
                // d applied to the j-th anti-cycle upstairs.
                Vec v(gf2::words_for(updim ? updim : 1), 0);
                v = up.c[j];
                Vec img(gf2::words_for(dim ? dim : 1), 0);
                for (size_t r = 0; r < updim; ++r)
                    if (gf2::get_bit(v, r)) {
                        for (size_t rr = 0; rr < dim; ++rr)
                            if (din.get(rr, r))
                                gf2::set_bit(img, rr, !gf2::get_bit(img, rr));
                    }
                for (size_t rr = 0; rr < dim; ++rr)
                    if (gf2::get_bit(img, rr))
                        dc.set(rr, j);
            }
        }
        F2Solver lift(dc);

        F2Matrix hmat(updim, dim);
        for (size_t j = 0; j < dim; ++j) {
            Vec x(gf2::words_for(dim), 0);
            gf2::set_bit(x, j);
            Vec cvec;
            if (!coords.solve(x, cvec))
                throw std::runtime_error("make_sdr: basis decomposition failed");
            // eta: coordinates along the representative block.
            for (size_t k = 0; k < hdim; ++k)
                if (gf2::get_bit(cvec, sp.b.size() + k))
                    eta.set(k, j);
            // boundary component of x.
            Vec bpart(gf2::words_for(dim), 0);
            for (size_t k = 0; k < sp.b.size(); ++k)
                if (gf2::get_bit(cvec, k))
                    gf2::xor_into(bpart, sp.b[k]);
            if (n < X.hi() && !gf2::is_zero(bpart)) {
                Vec sol;
                if (!lift.solve(bpart, sol))
                    throw std::runtime_error("make_sdr: boundary lift failed");
                for (size_t k = 0; k < ucols; ++k)
                    if (gf2::get_bit(sol, k))
                        for (size_t r = 0; r < updim; ++r)
                            if (gf2::get_bit(up.c[k], r))
                                hmat.flip(r, j);
            }
        }
        if (hdim && dim)
            out.eta.mats[n] = eta;
        if (updim && dim && !hmat.is_zero_matrix())
            out.h.mats[n] = hmat;
    }
    return out;
}

SdrCheck check_sdr(const SDRData& s)
{
    SdrCheck c;
    const auto& X = s.X;
    const auto& H = s.H;
    GradedMap ex = compose(s.eta, s.xi, H, X, H);
    c.eta_xi = true;
    for (int n = H.lo(); n <= H.hi(); ++n)
        if (!(map_matrix(ex, H, H, n) == F2Matrix::identity(H.dim(n))))
            c.eta_xi = false;

    GradedMap dmap;
    dmap.shift = -1;
    for (int n = X.lo(); n <= X.hi(); ++n)
        if (X.dim(n))
            dmap.mats[n] = X.differential(n);
    GradedMap dh = compose(dmap, s.h, X, X, X);
    GradedMap hd = compose(s.h, dmap, X, X, X);
    GradedMap xieta = compose(s.xi, s.eta, X, H, X);
    GradedMap idm = identity_map(X);
    GradedMap lhs = add(dh, hd, X, X);
    GradedMap rhs = add(xieta, idm, X, X);
    c.d_h = true;
    for (int n = X.lo(); n <= X.hi(); ++n)
        if (!(map_matrix(lhs, X, X, n) == map_matrix(rhs, X, X, n)))
            c.d_h = false;

    c.h_xi = compose(s.h, s.xi, H, X, X).is_zero();
    c.eta_h = compose(s.eta, s.h, X, X, H).is_zero();
    c.h_h = compose(s.h, s.h, X, X, X).is_zero();
    return c;
}

GradedMap fho_compose(const std::vector<const SDRData*>& sdrs, const std::vector<GradedMap>& fs)
{
    size_t n = fs.size();
    if (sdrs.size() != n + 1)
        throw std::runtime_error("fho_compose: need n+1 retractions for n maps");
    GradedMap acc = sdrs[0]->xi;
    const GradedComplexF2* src = &sdrs[0]->H;
    for (size_t j = 0; j < n; ++j) {
        acc = compose(fs[j], acc, *src, sdrs[j]->X, sdrs[j + 1]->X);
        if (j + 1 < n)
            acc = compose(sdrs[j + 1]->h, acc, *src, sdrs[j + 1]->X, sdrs[j + 1]->X);
    }
    return compose(sdrs[n]->eta, acc, *src, sdrs[n]->X, sdrs[n]->H);
}

GradedMap coherence_residual(const std::vector<const SDRData*>& sdrs,
                             const std::vector<GradedMap>& fs)
{
    size_t n = fs.size();
    if (n < 2)
        throw std::runtime_error("coherence_residual: need n >= 2");
    GradedMap lhs = zero_map();
    bool first = true;
    for (size_t i = 0; i + 1 < n; ++i) {
        // Merge f^{i+1} ∘ f^i into one slot.
        std::vector<const SDRData*> s2;
        std::vector<GradedMap> f2;
        for (size_t j = 0; j <= n; ++j)
            if (j != i + 1)
                s2.push_back(sdrs[j]);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) {
                f2.push_back(compose(fs[i + 1], fs[i], sdrs[i]->X, sdrs[i + 1]->X, sdrs[i + 2]->X));
            }
            else if (j != i + 1)
                f2.push_back(fs[j]);
        }
        GradedMap term = fho_compose(s2, f2);
        lhs = first ? term : add(lhs, term, sdrs[0]->H, sdrs[n]->H);
        first = false;
    }
    for (size_t i = 0; i + 1 < n; ++i) {
        std::vector<const SDRData*> lo(sdrs.begin(), sdrs.begin() + i + 2);
        std::vector<GradedMap> flo(fs.begin(), fs.begin() + i + 1);
        std::vector<const SDRData*> hi(sdrs.begin() + i + 1, sdrs.end());
        std::vector<GradedMap> fhi(fs.begin() + i + 1, fs.end());
        GradedMap low = fho_compose(lo, flo);
        GradedMap high = fho_compose(hi, fhi);
        GradedMap term = compose(high, low, sdrs[0]->H, sdrs[i + 1]->H, sdrs[n]->H);
        lhs = add(lhs, term, sdrs[0]->H, sdrs[n]->H);
    }
    return lhs;
}

ElementIndex::ElementIndex(const GradedComplexF2& x)
{
    for (int n = x.lo(); n <= x.hi(); ++n)
        for (size_t j = 0; j < x.dim(n); ++j) {
            lookup[{n, j}] = elems.size();
            elems.push_back({n, j});
            names.push_back(x.labels(n)[j]);
        }
}

void EStarSum::add_term(EStarElem e)
{
    auto it = std::lower_bound(terms.begin(), terms.end(), e);
    if (it != terms.end() && *it == e)
        terms.erase(it);
    else
        terms.insert(it, e);
}

std::string EStarSum::str(const std::vector<std::string>& names) const
{
    if (terms.empty())
        return "0";
    std::ostringstream os;
    for (size_t k = 0; k < terms.size(); ++k) {
        if (k)
            os << " + ";
        const auto& e = terms[k];
        if (e.i > 0)
            os << "e" << e.i << "x" << names[e.a];
        else
            os << names[e.a] << "." << names[e.b];
    }
    return os.str();
}

namespace {

// Element-level tensor pair sums for the bracket calculus.
struct PairSum {
    std::vector<std::pair<size_t, size_t>> terms;
    void add(size_t a, size_t b)
    {
        auto key = std::make_pair(a, b);
        auto it = std::lower_bound(terms.begin(), terms.end(), key);
        if (it != terms.end() && *it == key)
            terms.erase(it);
        else
            terms.insert(it, key);
    }
};

// f applied to a single global element, as a sum of global elements.
std::vector<size_t> apply_elem(const GradedMap& f, const ElementIndex& src,
                               const ElementIndex& dst, const GradedComplexF2& csrc,
                               const GradedComplexF2& cdst, size_t x)
{
    std::vector<size_t> out;
    auto [deg, pos] = src.elems[x];
    auto it = f.mats.find(deg);
    if (it == f.mats.end())
        return out;
    const F2Matrix& m = it->second;
    for (size_t r = 0; r < m.rows(); ++r)
        if (m.get(r, pos)) {
            auto lk = dst.lookup.find({deg + f.shift, r});
            if (lk != dst.lookup.end())
                out.push_back(lk->second);
        }
    (void)csrc;
    (void)cdst;
    return out;
}

}  // namespace

GradedMap bracket_chain(const std::vector<const GradedComplexF2*>& modules,
                        const std::vector<GradedMap>& fs)
{
    size_t n = fs.size();
    if (modules.size() != n + 1)
        throw std::runtime_error("bracket_chain: need n+1 modules");
    std::vector<ElementIndex> idx;
    for (auto* m : modules)
        idx.emplace_back(*m);

    GradedMap out;
    int shift = 0;
    for (const auto& f : fs)
        shift += 2 * f.shift;
    out.shift = shift;

    const GradedComplexF2& src = *modules[0];
    const GradedComplexF2& dst = *modules[n];
    for (int degn = src.lo(); degn <= src.hi(); ++degn) {
        size_t sd = src.dim(degn);
        if (!sd)
            continue;
        F2Matrix mat(dst.dim(degn + shift), sd);
        for (size_t j = 0; j < sd; ++j) {
            size_t g = idx[0].lookup.at({degn, j});
            PairSum cur;
            cur.add(g, g);  // q
            for (size_t step = 0; step < n; ++step) {
                PairSum next;
                for (auto [a, b] : cur.terms)
                    for (size_t fa : apply_elem(fs[step], idx[step], idx[step + 1],
                                                *modules[step], *modules[step + 1], a))
                        for (size_t fb : apply_elem(fs[step], idx[step], idx[step + 1],
                                                    *modules[step], *modules[step + 1], b))
                            next.add(fa, fb);
                if (step + 1 < n) {
                    PairSum swapped;
                    for (auto [a, b] : next.terms)
                        if (a > b)
                            swapped.add(b, a);  // r
                    next = std::move(swapped);
                }
                cur = std::move(next);
            }
            for (auto [a, b] : cur.terms) {
                if (a != b)
                    continue;  // p
                auto [dg, pos] = idx[n].elems[a];
                if (dg == degn + shift)
                    mat.flip(pos, j);
            }
        }
        if (!mat.is_zero_matrix())
            out.mats[degn] = mat;
    }
    return out;
}

namespace {

std::vector<size_t> bracket_apply(const std::vector<const GradedComplexF2*>& modules,
                                  const std::vector<GradedMap>& fs, size_t x)
{
    std::vector<ElementIndex> idx;
    for (auto* m : modules)
        idx.emplace_back(*m);
    PairSum cur;
    cur.add(x, x);
    size_t n = fs.size();
    for (size_t step = 0; step < n; ++step) {
        PairSum next;
        for (auto [a, b] : cur.terms)
            for (size_t fa :
                 apply_elem(fs[step], idx[step], idx[step + 1], *modules[step], *modules[step + 1], a))
                for (size_t fb : apply_elem(fs[step], idx[step], idx[step + 1], *modules[step],
                                            *modules[step + 1], b))
                    next.add(fa, fb);
        if (step + 1 < n) {
            PairSum swapped;
            for (auto [a, b] : next.terms)
                if (a > b)
                    swapped.add(b, a);
            next = std::move(swapped);
        }
        cur = std::move(next);
    }
    std::vector<size_t> out;
    for (auto [a, b] : cur.terms)
        if (a == b)
            out.push_back(a);
    return out;
}

}  // namespace

EStarSum e2_fho_closed(uint32_t i, size_t x, const std::vector<const GradedComplexF2*>& modules,
                       const std::vector<GradedMap>& fs, Direction dir)
{
    size_t n = fs.size();
    EStarSum out;
    long long j;
    if (dir == Direction::Underline)
        j = (long long)i + (long long)n - 1;
    else {
        j = (long long)i - (long long)n + 1;
        if (j < 0)
            return out;
    }
    for (size_t y : bracket_apply(modules, fs, x)) {
        EStarElem e;
        e.i = (uint32_t)j;
        e.a = e.b = y;
        out.add_term(e);
    }
    return out;
}

namespace {

// e_i ⊗ x_a ⊗ x_b with unrestricted pair order.
struct ETriple {
    uint32_t i;
    size_t a, b;
    bool operator==(const ETriple& r) const { return i == r.i && a == r.a && b == r.b; }
    bool operator<(const ETriple& r) const
    {
        if (i != r.i)
            return i < r.i;
        if (a != r.a)
            return a < r.a;
        return b < r.b;
    }
};

struct ESum {
    std::vector<ETriple> terms;
    void add(ETriple t)
    {
        auto it = std::lower_bound(terms.begin(), terms.end(), t);
        if (it != terms.end() && *it == t)
            terms.erase(it);
        else
            terms.insert(it, t);
    }
};

struct EModel {
    const GradedComplexF2* X;
    ElementIndex idx;
    uint32_t i_cap;

    explicit EModel(const GradedComplexF2* x, uint32_t cap) : X(x), idx(*x), i_cap(cap) {}

    std::vector<size_t> d_elem(size_t g) const
    {
        std::vector<size_t> out;
        auto [deg, pos] = idx.elems[g];
        const F2Matrix& d = X->differential(deg);
        for (size_t r = 0; r < d.rows(); ++r)
            if (d.get(r, pos))
                out.push_back(idx.lookup.at({deg - 1, r}));
        return out;
    }
};

}  // namespace

EStarSum e2_fho_direct(uint32_t i0, size_t x, const std::vector<const GradedComplexF2*>& complexes,
                       const std::vector<GradedMap>& fs, uint32_t i_cap)
{
    size_t n = fs.size();
    if (complexes.size() != n + 1)
        throw std::runtime_error("e2_fho_direct: need n+1 complexes");
    std::vector<SDRData> sdrs;
    std::vector<EModel> models;
    for (auto* c : complexes) {
        sdrs.push_back(make_sdr(*c));
        models.emplace_back(c, i_cap);
    }
    std::vector<ElementIndex> hidx;
    for (const auto& s : sdrs)
        hidx.emplace_back(s.H);

    auto apply_graded = [&](const GradedMap& f, const ElementIndex& si, const ElementIndex& di,
                            size_t g) {
        std::vector<size_t> out;
        auto [deg, pos] = si.elems[g];
        auto it = f.mats.find(deg);
        if (it == f.mats.end())
            return out;
        const F2Matrix& m = it->second;
        for (size_t r = 0; r < m.rows(); ++r)
            if (m.get(r, pos)) {
                auto lk = di.lookup.find({deg + f.shift, r});
                if (lk != di.lookup.end())
                    out.push_back(lk->second);
            }
        return out;
    };

    auto check_cap = [&](uint32_t i) {
        if (i > i_cap)
            throw std::runtime_error("e2_fho_direct: e-index window exhausted at i=" +
                                     std::to_string(i));
    };

    // E(f), E(h) on the big model over complex j.
    auto e_map_pairs = [&](const ESum& v, auto&& slot_fn) {
        ESum out;
        for (const auto& t : v.terms)
            slot_fn(t, out);
        return out;
    };

    // start: xi(E) on (i0, x, x) over H^1, then E(xi).
    ESum cur;
    {
        EStarElem seed;
        seed.i = i0;
        seed.a = seed.b = x;
        // xi(E): e_i × y -> e_i ⊗ y ⊗ y; y1·y2 -> e_0 ⊗ y1 ⊗ y2.
        ETriple t{seed.i, seed.a, seed.b};
        // E(xi): push both slots through xi.
        for (size_t a : apply_graded(sdrs[0].xi, hidx[0], models[0].idx, t.a))
            for (size_t b : apply_graded(sdrs[0].xi, hidx[0], models[0].idx, t.b))
                cur.add(ETriple{t.i, a, b});
    }

    for (size_t step = 0; step < n; ++step) {
        // F(f^{step}) into model step+1.
        ESum pushed = e_map_pairs(cur, [&](const ETriple& t, ESum& out) {
            for (size_t a : apply_elem(fs[step], models[step].idx, models[step + 1].idx,
                                       *complexes[step], *complexes[step + 1], t.a))
                for (size_t b : apply_elem(fs[step], models[step].idx, models[step + 1].idx,
                                           *complexes[step], *complexes[step + 1], t.b))
                    out.add(ETriple{t.i, a, b});
        });
        cur = std::move(pushed);
        if (step + 1 == n)
            break;

        // Composite homotopy on model step+1: E(xi) h(E) E(eta) + E(h).
        const SDRData& s = sdrs[step + 1];
        const EModel& M = models[step + 1];
        const ElementIndex& hx = hidx[step + 1];
        ESum next;
        for (const auto& t : cur.terms) {
            // E(h) part.
            for (size_t hb : apply_graded(s.h, M.idx, M.idx, t.b))
                next.add(ETriple{t.i, t.a, hb});
            for (size_t ha : apply_graded(s.h, M.idx, M.idx, t.a)) {
                for (size_t eb : apply_graded(s.eta, M.idx, hx, t.b))
                    for (size_t xb : apply_graded(s.xi, hx, M.idx, eb))
                        next.add(ETriple{t.i, ha, xb});
                if (t.i >= 1)
                    for (size_t hb : apply_graded(s.h, M.idx, M.idx, t.b))
                        next.add(ETriple{t.i - 1, ha, hb});
            }
            // E(xi) h(E) E(eta) part: project both slots, reorder through h(E).
            for (size_t ea : apply_graded(s.eta, M.idx, hx, t.a))
                for (size_t eb : apply_graded(s.eta, M.idx, hx, t.b)) {
                    if (ea > eb) {  // h(E) raises the index and sorts
                        check_cap(t.i + 1);
                        for (size_t xa : apply_graded(s.xi, hx, M.idx, eb))
                            for (size_t xb : apply_graded(s.xi, hx, M.idx, ea))
                                next.add(ETriple{t.i + 1, xa, xb});
                    }
                }
        }
        cur = std::move(next);
    }

    // eta(E) ∘ E(eta) into the homology model of the last complex.
    EStarSum out;
    const SDRData& last = sdrs[n];
    const ElementIndex& hx = hidx[n];
    for (const auto& t : cur.terms) {
        for (size_t ea : apply_graded(last.eta, models[n].idx, hx, t.a))
            for (size_t eb : apply_graded(last.eta, models[n].idx, hx, t.b)) {
                if (ea == eb) {
                    out.add_term(EStarElem{t.i, ea, eb});
                }
                else if (t.i == 0) {
                    EStarElem e;
                    e.i = 0;
                    e.a = std::min(ea, eb);
                    e.b = std::max(ea, eb);
                    out.add_term(e);
                }
            }
    }
    return out;
}

}  // namespace cobarforge::fho
