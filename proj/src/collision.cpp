#include "mrlbm/collision.hpp"

#include <cmath>
#include <stdexcept>

namespace mrlbm
{
    double QuadratureRule::total_weight() const
    {
        double s = 0;
        for (double v : w)
        {
            s += v;
        }
        return s;
    }

    QuadratureRule to_unit_cell(const QuadratureRule& rule)
    {
        QuadratureRule r;
        for (int i = 0; i < rule.n(); ++i)
        {
            r.x.push_back(rule.x[i] / 2);
            r.w.push_back(rule.w[i] / 2);
        }
        return r;
    }

    std::string to_string(CollisionKind k)
    {
        switch (k)
        {
            case CollisionKind::lc:
                return "lc";
            case CollisionKind::rc:
                return "rc";
            case CollisionKind::pqc:
                return "pqc";
        }
        return "?";
    }

    CollisionKind collision_kind_from_string(const std::string& s)
    {
        if (s == "lc")
        {
            return CollisionKind::lc;
        }
        if (s == "rc")
        {
            return CollisionKind::rc;
        }
        if (s == "pqc")
        {
            return CollisionKind::pqc;
        }
        throw std::invalid_argument("unknown collision: " + s);
    }

    void collide_lc(const HybridMesh& mesh, Field& field, const SchemeSpec& spec)
    {
        for (const auto& c : mesh.leaves())
        {
            spec.collide(field.at(c));
        }
    }

    namespace
    {
        void relax_leaf(const SchemeSpec& spec, const double* f, double* out, const double* meq_avg)
        {
            double m[16];
            spec.to_moments(f, m);
            spec.relax_moments(m, meq_avg);
            spec.from_moments(m, out);
        }

        // Conserved moments of level-l cells in a square window of radius r around k.
        void conserved_window(const Field& in, const SchemeSpec& spec, int level, const IVec& k, int r, int d, BoundaryPolicy policy,
                              std::vector<double>& win)
        {
            const int w  = 2 * r + 1;
            const int qc = spec.q_c;
            const int ry = d == 2 ? r : 0;
            win.assign(static_cast<std::size_t>(w) * (2 * ry + 1) * qc, 0.0);
            for (int j = -ry; j <= ry; ++j)
            {
                for (int i = -r; i <= r; ++i)
                {
                    spec.conserved(in.get(level, k[0] + i, k[1] + j, policy), win.data() + ((j + ry) * w + (i + r)) * qc);
                }
            }
        }
    }

    void collide_rc(const HybridMesh& mesh, const Field& in, Field& out, const SchemeSpec& spec, ReconstructionCache& cache,
                    BoundaryPolicy policy)
    {
        const int L  = mesh.l_max();
        const int d  = mesh.d();
        const int q  = spec.q();
        const int qc = spec.q_c;
        const int R  = cache.radius();
        const int W  = cache.width();
        std::vector<double> win;
        std::vector<double> cons(qc), meq(q), acc(q);
        for (const auto& c : mesh.leaves())
        {
            const int dl = L - c.level;
            if (dl == 0)
            {
                const double* f = in.at(c);
                double* g       = out.at(c);
                for (int a = 0; a < q; ++a)
                {
                    g[a] = f[a];
                }
                spec.collide(g);
                continue;
            }
            conserved_window(in, spec, c.level, c.k, R, d, policy, win);
            const int nb = 1 << dl;
            const int ny = d == 2 ? nb : 1;
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int ry = 0; ry < ny; ++ry)
            {
                const double* wy = d == 2 ? cache.row(dl, ry) : nullptr;
                for (int rx = 0; rx < nb; ++rx)
                {
                    const double* wx = cache.row(dl, rx);
                    std::fill(cons.begin(), cons.end(), 0.0);
                    for (int j = 0; j < (d == 2 ? W : 1); ++j)
                    {
                        const double cy = d == 2 ? wy[j] : 1.0;
                        if (cy == 0.0)
                        {
                            continue;
                        }
                        for (int i = 0; i < W; ++i)
                        {
                            const double cw = cy * wx[i];
                            if (cw == 0.0)
                            {
                                continue;
                            }
                            for (int b = 0; b < qc; ++b)
                            {
                                cons[b] += cw * win[(j * W + i) * qc + b];
                            }
                        }
                    }
                    spec.eq(cons.data(), meq.data());
                    for (int a = 0; a < q; ++a)
                    {
                        acc[a] += meq[a];
                    }
                }
            }
            const double inv = 1.0 / (static_cast<double>(nb) * ny);
            for (int a = 0; a < q; ++a)
            {
                acc[a] *= inv;
            }
            relax_leaf(spec, in.at(c), out.at(c), acc.data());
        }
    }

    void collide_pqc(const HybridMesh& mesh, const Field& in, Field& out, const SchemeSpec& spec, const QuadratureRule& unit_rule, int gamma,
                     BoundaryPolicy policy)
    {
        const int d  = mesh.d();
        const int q  = spec.q();
        const int qc = spec.q_c;
        const int n  = 2 * gamma + 1;
        const auto Ti = constraint_inverse(gamma);
        // value of the local polynomial at point x_i: sum_j lag[i][j] f_{k + j - gamma}
        std::vector<std::vector<double>> lag(unit_rule.n(), std::vector<double>(n, 0.0));
        for (int i = 0; i < unit_rule.n(); ++i)
        {
            for (int j = 0; j < n; ++j)
            {
                double v = 0;
                for (int m = 0; m < n; ++m)
                {
                    v += to_double(Ti[m][j]) * std::pow(unit_rule.x[i], m);
                }
                lag[i][j] = v;
            }
        }
        std::vector<double> win;
        std::vector<double> cons(qc), meq(q), acc(q);
        const int npy = d == 2 ? unit_rule.n() : 1;
        for (const auto& c : mesh.leaves())
        {
            conserved_window(in, spec, c.level, c.k, gamma, d, policy, win);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int iy = 0; iy < npy; ++iy)
            {
                for (int ix = 0; ix < unit_rule.n(); ++ix)
                {
                    const double wq = unit_rule.w[ix] * (d == 2 ? unit_rule.w[iy] : 1.0);
                    std::fill(cons.begin(), cons.end(), 0.0);
                    for (int j = 0; j < (d == 2 ? n : 1); ++j)
                    {
                        const double cy = d == 2 ? lag[iy][j] : 1.0;
                        for (int i = 0; i < n; ++i)
                        {
                            for (int b = 0; b < qc; ++b)
                            {
                                cons[b] += cy * lag[ix][i] * win[(j * n + i) * qc + b];
                            }
                        }
                    }
                    spec.eq(cons.data(), meq.data());
                    for (int a = 0; a < q; ++a)
                    {
                        acc[a] += wq * meq[a];
                    }
                }
            }
            relax_leaf(spec, in.at(c), out.at(c), acc.data());
        }
    }
}
