#include "mrlbm/transport.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mrlbm
{
    StreamSets stream_sets(const IVec& k, const IVec& c, int dl, int d)
    {
        if (std::abs(c[0]) > 2 || std::abs(c[1]) > 2)
        {
            throw std::invalid_argument("stream_sets: |c| > 2");
        }
        const int nb = 1 << dl;
        const int ny = d == 2 ? nb : 1;
        const IVec origin{k[0] << dl, d == 2 ? k[1] << dl : 0};
        auto in_block = [&](int x, int y)
        { return x >= origin[0] && x < origin[0] + nb && y >= origin[1] && y < origin[1] + ny; };
        StreamSets s;
        for (int j = 0; j < ny; ++j)
        {
            for (int i = 0; i < nb; ++i)
            {
                const int x = origin[0] + i, y = origin[1] + j;
                // B - c
                const int ex = x - c[0], ey = d == 2 ? y - c[1] : 0;
                if (!in_block(ex, ey))
                {
                    s.E.push_back({ex, ey});
                }
                // cells of B that leave: x not in B - c, i.e. x + c not in B
                if (!in_block(x + c[0], d == 2 ? y + c[1] : 0))
                {
                    s.A.push_back({x, y});
                }
            }
        }
        std::sort(s.E.begin(), s.E.end());
        std::sort(s.A.begin(), s.A.end());
        return s;
    }

    std::string to_string(StencilKind k)
    {
        switch (k)
        {
            case StencilKind::haar:
                return "haar";
            case StencilKind::gamma1:
                return "gamma1";
            case StencilKind::generic:
                return "generic";
            case StencilKind::lax_wendroff:
                return "lw";
        }
        return "?";
    }

    StencilKind stencil_kind_from_string(const std::string& s)
    {
        if (s == "haar" || s == "gamma0")
        {
            return StencilKind::haar;
        }
        if (s == "gamma1")
        {
            return StencilKind::gamma1;
        }
        if (s == "generic")
        {
            return StencilKind::generic;
        }
        if (s == "lw")
        {
            return StencilKind::lax_wendroff;
        }
        throw std::invalid_argument("unknown stencil kind: " + s);
    }

    Rational Stencil::sum() const
    {
        Rational s = 0;
        for (const auto& x : w)
        {
            s += x;
        }
        return s;
    }

    std::string Stencil::str() const
    {
        std::ostringstream os;
        const int ny = d == 2 ? 2 : 0;
        for (int n = -ny; n <= ny; ++n)
        {
            for (int m = -2; m <= 2; ++m)
            {
                os << (m == -2 ? "" : " ") << to_dyadic_string(at(m, n));
            }
            if (n < ny)
            {
                os << '\n';
            }
        }
        return os.str();
    }

    const Matrix5& recurrence_matrix()
    {
        static const Matrix5 P = []
        {
            const Rational z(0), a(-1, 8), b(9, 8), two(2);
            Matrix5 m = {{{z, a, z, z, z}, {two, b, z, a, z}, {z, b, two, b, z}, {z, a, z, b, two}, {z, z, z, a, z}}};
            return m;
        }();
        return P;
    }

    Stencil shift_stencil(const IVec& c, int d)
    {
        Stencil s(d, StencilKind::gamma1, c, 0);
        if (c[0] == 0 && c[1] == 0)
        {
            return s;
        }
        s.at(-c[0], d == 2 ? -c[1] : 0) += 1;
        s.at(0, 0) -= 1;
        return s;
    }

    Stencil flatten_weights_haar(int c, int dl)
    {
        Stencil s(1, StencilKind::haar, {c, 0}, dl);
        if (c == 0)
        {
            return s;
        }
        if (std::abs(c) > 2)
        {
            throw std::invalid_argument("flatten_weights_haar: |c| > 2");
        }
        if (dl == 0)
        {
            s.at(-c) += 1;
            s.at(0) -= 1;
            return s;
        }
        const int a   = std::abs(c);
        const int sgn = c > 0 ? 1 : -1;
        s.at(0)       = -a;
        s.at(-sgn)    = a;
        return s;
    }

    Stencil flatten_weights_gamma1(int c, int dl)
    {
        if (std::abs(c) > 2)
        {
            throw std::invalid_argument("flatten_weights_gamma1: |c| > 2");
        }
        Stencil s  = shift_stencil({c, 0}, 1);
        s.dl       = dl;
        const auto& P = recurrence_matrix();
        for (int it = 0; it < dl; ++it)
        {
            std::vector<Rational> nx(5, Rational(0));
            for (int i = 0; i < 5; ++i)
            {
                for (int j = 0; j < 5; ++j)
                {
                    nx[i] += P[i][j] * s.w[j];
                }
            }
            s.w = std::move(nx);
        }
        return s;
    }

    namespace
    {
        using Key    = std::array<int, 3>; // depth, x, y
        using Linear = std::map<IVec, Rational>;

        struct Cascade
        {
            int d;
            int g;
            std::vector<std::vector<Rational>> cw; // child rows over -g..g
            std::map<Key, Linear> memo;

            // Value of a cell `depth` levels below the source level, as a combination of source cells.
            const Linear& value(int depth, IVec k)
            {
                Key key{depth, k[0], k[1]};
                auto it = memo.find(key);
                if (it != memo.end())
                {
                    return it->second;
                }
                Linear r;
                if (depth == 0)
                {
                    r[k] = 1;
                }
                else
                {
                    const IVec p{k[0] >> 1, k[1] >> 1};
                    const int dx = k[0] & 1, dy = k[1] & 1;
                    const int gy = d == 2 ? g : 0;
                    for (int j = -gy; j <= gy; ++j)
                    {
                        const Rational cy = d == 2 ? cw[dy][j + g] : Rational(1);
                        for (int i = -g; i <= g; ++i)
                        {
                            const Rational c = cy * cw[dx][i + g];
                            if (c == 0)
                            {
                                continue;
                            }
                            for (const auto& [off, v] : value(depth - 1, {p[0] + i, p[1] + j}))
                            {
                                r[off] += c * v;
                            }
                        }
                    }
                }
                return memo.emplace(key, std::move(r)).first->second;
            }
        };
    }

    std::optional<Stencil> flatten_weights_bruteforce(const PredictionOperator& op, const IVec& c, int dl, int d)
    {
        Cascade cas;
        cas.d = d;
        cas.g = op.gamma;
        cas.cw.assign(2, std::vector<Rational>(2 * op.gamma + 1, Rational(0)));
        for (int delta = 0; delta < 2; ++delta)
        {
            const Rational s         = delta == 0 ? 1 : -1;
            cas.cw[delta][op.gamma] = 1;
            for (int p = 1; p <= op.gamma; ++p)
            {
                cas.cw[delta][op.gamma + p] += s * op.w[p - 1];
                cas.cw[delta][op.gamma - p] -= s * op.w[p - 1];
            }
        }
        const auto sets = stream_sets({0, 0}, c, dl, d);
        Linear acc;
        for (const auto& K : sets.E)
        {
            for (const auto& [off, v] : cas.value(dl, K))
            {
                acc[off] += v;
            }
        }
        for (const auto& K : sets.A)
        {
            for (const auto& [off, v] : cas.value(dl, K))
            {
                acc[off] -= v;
            }
        }
        Stencil s(d, op.gamma == 0 ? StencilKind::haar : (op.gamma == 1 ? StencilKind::gamma1 : StencilKind::generic), c, dl);
        for (const auto& [off, v] : acc)
        {
            if (v == 0)
            {
                continue;
            }
            if (std::abs(off[0]) > 2 || std::abs(off[1]) > 2)
            {
                return std::nullopt;
            }
            s.at(off[0], off[1]) = v;
        }
        return s;
    }

    Stencil flatten_weights_2d(const IVec& c, int dl)
    {
        Stencil s = shift_stencil(c, 2);
        s.dl      = dl;
        const auto& P = recurrence_matrix();
        for (int it = 0; it < dl; ++it)
        {
            std::vector<Rational> nx(25, Rational(0));
            // (P kron P) acting on index 5 (n + 2) + (m + 2)
            for (int in = 0; in < 5; ++in)
            {
                for (int im = 0; im < 5; ++im)
                {
                    Rational v = 0;
                    for (int jn = 0; jn < 5; ++jn)
                    {
                        if (P[in][jn] == 0)
                        {
                            continue;
                        }
                        for (int jm = 0; jm < 5; ++jm)
                        {
                            if (P[im][jm] != 0)
                            {
                                v += P[in][jn] * P[im][jm] * s.w[5 * jn + jm];
                            }
                        }
                    }
                    nx[5 * in + im] = v;
                }
            }
            s.w = std::move(nx);
        }
        return s;
    }

    Stencil lw_weights(const IVec& c, int dl, int d)
    {
        Stencil s(d, StencilKind::lax_wendroff, c, dl);
        if (c[0] == 0 && c[1] == 0)
        {
            return s;
        }
        if (dl == 0)
        {
            s = shift_stencil(c, d);
            s.kind = StencilKind::lax_wendroff;
            return s;
        }
        const int a = std::max(std::abs(c[0]), std::abs(c[1]));
        const IVec e{(c[0] > 0) - (c[0] < 0), (c[1] > 0) - (c[1] < 0)};
        const Rational sigma = Rational(a) * pow2(-dl);
        const Rational scale = pow2(d * dl);
        s.at(0, 0) += scale * (-sigma * sigma);
        s.at(-e[0], d == 2 ? -e[1] : 0) += scale * sigma / 2 * (1 + sigma);
        s.at(e[0], d == 2 ? e[1] : 0) += scale * (-sigma / 2 * (1 - sigma));
        return s;
    }

    Stencil make_stencil(StencilKind kind, const PredictionOperator& op, const IVec& c, int dl, int d)
    {
        switch (kind)
        {
            case StencilKind::lax_wendroff:
                return lw_weights(c, dl, d);
            case StencilKind::haar:
                if (d == 1)
                {
                    return flatten_weights_haar(c[0], dl);
                }
                return *flatten_weights_bruteforce(derive_prediction_weights(0), c, dl, d);
            case StencilKind::gamma1:
                return d == 1 ? flatten_weights_gamma1(c[0], dl) : flatten_weights_2d(c, dl);
            case StencilKind::generic:
            {
                auto s = flatten_weights_bruteforce(op, c, dl, d);
                if (!s)
                {
                    throw std::invalid_argument("stencil support exceeds [-2,2] for gamma = " + std::to_string(op.gamma));
                }
                return *s;
            }
        }
        throw std::logic_error("make_stencil: unknown kind");
    }

    StencilTable::StencilTable(StencilKind kind, const PredictionOperator& op, const VelocitySet& v, int dl_max)
    {
        taps_.resize(dl_max + 1);
        exact_.resize(dl_max + 1);
        for (int dl = 0; dl <= dl_max; ++dl)
        {
            const double scale = 1.0 / static_cast<double>(1ll << (v.d * dl));
            for (int a = 0; a < v.q; ++a)
            {
                Stencil s = make_stencil(kind, op, v.c[a], dl, v.d);
                std::vector<StencilTap> t;
                const int ny = v.d == 2 ? 2 : 0;
                for (int n = -ny; n <= ny; ++n)
                {
                    for (int m = -2; m <= 2; ++m)
                    {
                        if (s.at(m, n) != 0)
                        {
                            t.push_back({m, n, to_double(s.at(m, n)) * scale});
                        }
                    }
                }
                taps_[dl].push_back(std::move(t));
                exact_[dl].push_back(std::move(s));
            }
        }
    }

    void flattened_stream(const HybridMesh& mesh, const Field& in, Field& out, const StencilTable& table, int q, BoundaryPolicy policy)
    {
        const int L = mesh.l_max();
        for (const auto& c : mesh.leaves())
        {
            const int dl    = L - c.level;
            const double* f = in.at(c);
            double* g       = out.at(c);
            const IVec n    = mesh.n(c.level);
            // interior fast path: all taps inside the domain
            const bool inner = c.k[0] >= 2 && c.k[0] < n[0] - 2 && (mesh.d() == 1 || (c.k[1] >= 2 && c.k[1] < n[1] - 2));
            for (int a = 0; a < q; ++a)
            {
                double v = f[a];
                for (const auto& t : table.taps(dl, a))
                {
                    const double* src = inner ? in.at(c.level, c.k[0] + t.m, c.k[1] + t.n)
                                              : in.get(c.level, c.k[0] + t.m, c.k[1] + t.n, policy);
                    v += t.w * src[a];
                }
                g[a] = v;
            }
        }
    }

    void adaptive_stream(const HybridMesh& mesh, const Field& in, Field& out, ReconstructionCache& cache, const VelocitySet& v,
                         BoundaryPolicy policy)
    {
        const int L = mesh.l_max();
        const int d = mesh.d();
        std::map<std::pair<int, int>, StreamSets> sets;
        for (const auto& c : mesh.leaves())
        {
            const int dl       = L - c.level;
            const double scale = 1.0 / static_cast<double>(1ll << (d * dl));
            const IVec origin{c.k[0] << dl, d == 2 ? c.k[1] << dl : 0};
            for (int a = 0; a < v.q; ++a)
            {
                auto key = std::make_pair(dl, a);
                auto it  = sets.find(key);
                if (it == sets.end())
                {
                    it = sets.emplace(key, stream_sets({0, 0}, v.c[a], dl, d)).first;
                }
                double flux = 0;
                for (const auto& K : it->second.E)
                {
                    flux += reconstruct_from_level(mesh, in, c.level, {L, {origin[0] + K[0], origin[1] + K[1]}}, a, cache, policy);
                }
                for (const auto& K : it->second.A)
                {
                    flux -= reconstruct_from_level(mesh, in, c.level, {L, {origin[0] + K[0], origin[1] + K[1]}}, a, cache, policy);
                }
                out.at(c)[a] = in.at(c)[a] + scale * flux;
            }
        }
    }

    UniformState flattened_stream(const UniformState& state, const std::vector<Stencil>& stencils, int dl, int d, BoundaryPolicy policy)
    {
        UniformState out = state;
        const double scale = 1.0 / static_cast<double>(1ll << (d * dl));
        const int ny       = d == 2 ? 2 : 0;
        for (int k1 = 0; k1 < state.n[1]; ++k1)
        {
            for (int k0 = 0; k0 < state.n[0]; ++k0)
            {
                for (int a = 0; a < state.q; ++a)
                {
                    double v = 0;
                    for (int n = -ny; n <= ny; ++n)
                    {
                        for (int m = -2; m <= 2; ++m)
                        {
                            const Rational& w = stencils[a].at(m, n);
                            if (w == 0)
                            {
                                continue;
                            }
                            const int s0 = map_index(k0 + m, state.n[0], policy);
                            const int s1 = d == 2 ? map_index(k1 + n, state.n[1], policy) : 0;
                            v += to_double(w) * state.at(s0, s1)[a];
                        }
                    }
                    out.at(k0, k1)[a] += scale * v;
                }
            }
        }
        return out;
    }

    double lw_single_polynomial_check(const std::array<double, 3>& window, int c, int dl)
    {
        if (std::abs(c) != 1)
        {
            throw std::invalid_argument("lw_single_polynomial_check: |c| must be 1");
        }
        const auto poly = local_polynomial({window[0], window[1], window[2]}, 1);
        const auto sets = stream_sets({0, 0}, {c, 0}, dl, 1);
        const double h  = std::ldexp(1.0, -dl);
        auto avg        = [&](int K) { return poly.average(K * h - 0.5, (K + 1) * h - 0.5); };
        double flux     = 0;
        for (const auto& K : sets.E)
        {
            flux += avg(K[0]);
        }
        for (const auto& K : sets.A)
        {
            flux -= avg(K[0]);
        }
        return flux;
    }
}
