#include "mrlbm/multires.hpp"

#include <cmath>
#include <stdexcept>

namespace mrlbm
{
    namespace
    {
        Rational avg_monomial(const Rational& a, const Rational& b, int m)
        {
            return (ipow(b, m + 1) - ipow(a, m + 1)) / Rational(m + 1) / (b - a);
        }

        std::vector<std::vector<Rational>> invert(std::vector<std::vector<Rational>> a)
        {
            const int n = static_cast<int>(a.size());
            std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
            for (int i = 0; i < n; ++i)
            {
                inv[i][i] = 1;
            }
            for (int col = 0; col < n; ++col)
            {
                int piv = col;
                while (piv < n && a[piv][col] == 0)
                {
                    ++piv;
                }
                if (piv == n)
                {
                    throw std::logic_error("constraint matrix is singular");
                }
                std::swap(a[piv], a[col]);
                std::swap(inv[piv], inv[col]);
                const Rational p = a[col][col];
                for (int j = 0; j < n; ++j)
                {
                    a[col][j] /= p;
                    inv[col][j] /= p;
                }
                for (int i = 0; i < n; ++i)
                {
                    if (i == col || a[i][col] == 0)
                    {
                        continue;
                    }
                    const Rational f = a[i][col];
                    for (int j = 0; j < n; ++j)
                    {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
            return inv;
        }
    }

    std::vector<std::vector<Rational>> constraint_inverse(int gamma)
    {
        if (gamma < 0)
        {
            throw std::invalid_argument("gamma must be non-negative");
        }
        const int n = 2 * gamma + 1;
        std::vector<std::vector<Rational>> T(n, std::vector<Rational>(n));
        const Rational half(1, 2);
        for (int j = -gamma; j <= gamma; ++j)
        {
            for (int m = 0; m < n; ++m)
            {
                T[j + gamma][m] = avg_monomial(Rational(j) - half, Rational(j) + half, m);
            }
        }
        return invert(T);
    }

    PredictionOperator derive_prediction_weights(int gamma)
    {
        const auto Ti = constraint_inverse(gamma);
        const int n   = 2 * gamma + 1;
        std::vector<Rational> coef(n, Rational(0));
        for (int m = 0; m < n; ++m)
        {
            const Rational a = avg_monomial(Rational(-1, 2), Rational(0), m);
            for (int j = 0; j < n; ++j)
            {
                coef[j] += a * Ti[m][j];
            }
        }
        if (coef[gamma] != 1)
        {
            throw std::logic_error("prediction is not centred");
        }
        PredictionOperator op;
        op.gamma = gamma;
        for (int p = 1; p <= gamma; ++p)
        {
            if (coef[gamma + p] != -coef[gamma - p])
            {
                throw std::logic_error("prediction is not antisymmetric");
            }
            op.w.push_back(coef[gamma + p]);
            op.wd.push_back(to_double(coef[gamma + p]));
        }
        return op;
    }

    double ReconstructionPolynomial::value(double xi, double eta) const
    {
        const int n = 2 * gamma + 1;
        double v    = 0;
        if (d == 1)
        {
            for (int m = n - 1; m >= 0; --m)
            {
                v = v * xi + A[m];
            }
            return v;
        }
        for (int m = 0; m < n; ++m)
        {
            for (int k = 0; k < n; ++k)
            {
                v += A[m * n + k] * std::pow(xi, m) * std::pow(eta, k);
            }
        }
        return v;
    }

    double ReconstructionPolynomial::average(double a0, double b0, double a1, double b1) const
    {
        const int n = 2 * gamma + 1;
        auto mono   = [](double a, double b, int m) { return (std::pow(b, m + 1) - std::pow(a, m + 1)) / (m + 1) / (b - a); };
        double v    = 0;
        if (d == 1)
        {
            for (int m = 0; m < n; ++m)
            {
                v += A[m] * mono(a0, b0, m);
            }
            return v;
        }
        for (int m = 0; m < n; ++m)
        {
            for (int k = 0; k < n; ++k)
            {
                v += A[m * n + k] * mono(a0, b0, m) * mono(a1, b1, k);
            }
        }
        return v;
    }

    ReconstructionPolynomial local_polynomial(const std::vector<double>& window, int gamma)
    {
        const int n = 2 * gamma + 1;
        if (static_cast<int>(window.size()) != n)
        {
            throw std::invalid_argument("local_polynomial: window size");
        }
        const auto Ti = constraint_inverse(gamma);
        ReconstructionPolynomial p;
        p.gamma = gamma;
        p.A.assign(n, 0.0);
        for (int m = 0; m < n; ++m)
        {
            for (int j = 0; j < n; ++j)
            {
                p.A[m] += to_double(Ti[m][j]) * window[j];
            }
        }
        return p;
    }

    ReconstructionPolynomial local_polynomial_2d(const std::vector<double>& window, int gamma)
    {
        const int n = 2 * gamma + 1;
        if (static_cast<int>(window.size()) != n * n)
        {
            throw std::invalid_argument("local_polynomial_2d: window size");
        }
        const auto Ti = constraint_inverse(gamma);
        ReconstructionPolynomial p;
        p.gamma = gamma;
        p.d     = 2;
        p.A.assign(n * n, 0.0);
        for (int m = 0; m < n; ++m)
        {
            for (int k = 0; k < n; ++k)
            {
                double acc = 0;
                for (int j = 0; j < n; ++j)
                {
                    for (int i = 0; i < n; ++i)
                    {
                        acc += to_double(Ti[m][i]) * to_double(Ti[k][j]) * window[j * n + i];
                    }
                }
                p.A[m * n + k] = acc;
            }
        }
        return p;
    }

    double predict(const std::vector<double>& window, int delta, const PredictionOperator& op)
    {
        const int g = op.gamma;
        if (static_cast<int>(window.size()) != 2 * g + 1)
        {
            throw std::invalid_argument("predict: window size");
        }
        double Q = 0;
        for (int p = 1; p <= g; ++p)
        {
            Q += op.wd[p - 1] * (window[g + p] - window[g - p]);
        }
        return window[g] + (delta == 0 ? Q : -Q);
    }

    double predict_2d(const std::vector<double>& window, IVec delta, const PredictionOperator& op, bool y_first)
    {
        const int g = op.gamma;
        const int n = 2 * g + 1;
        if (static_cast<int>(window.size()) != n * n)
        {
            throw std::invalid_argument("predict_2d: window size");
        }
        std::vector<double> line(n), inner(n);
        for (int outer = 0; outer < n; ++outer)
        {
            for (int t = 0; t < n; ++t)
            {
                line[t] = y_first ? window[t * n + outer] : window[outer * n + t];
            }
            inner[outer] = predict(line, y_first ? delta[1] : delta[0], op);
        }
        return predict(inner, y_first ? delta[0] : delta[1], op);
    }

    double project(const std::vector<double>& children_values)
    {
        if (children_values.empty())
        {
            throw std::invalid_argument("project: no children");
        }
        double s = 0;
        for (double v : children_values)
        {
            s += v;
        }
        return s / static_cast<double>(children_values.size());
    }

    ReconstructionCache::ReconstructionCache(const PredictionOperator& op)
        : gamma_(op.gamma)
        , w_(op.wd)
    {
        rows_.push_back(std::vector<double>(width(), 0.0));
        rows_[0][radius()] = 1.0;
    }

    const std::vector<double>& ReconstructionCache::rows(int dl)
    {
        const int R  = radius();
        const int W  = width();
        const int g  = gamma_;
        const auto cw = child_weights(w_);
        while (static_cast<int>(rows_.size()) <= dl)
        {
            const int D            = static_cast<int>(rows_.size()) - 1;
            const int nb           = 1 << D;
            const auto& prev       = rows_[D];
            std::vector<double> nx(static_cast<std::size_t>(2 * nb) * W, 0.0);
            for (int r = 0; r < nb; ++r)
            {
                for (int delta = 0; delta < 2; ++delta)
                {
                    double* dst = nx.data() + static_cast<std::size_t>(2 * r + delta) * W;
                    for (int i = -g; i <= g; ++i)
                    {
                        const double c = cw[delta][i + g];
                        if (c == 0.0)
                        {
                            continue;
                        }
                        const int s       = r + i;
                        const int shift   = s >= 0 ? s / nb : -((-s + nb - 1) / nb);
                        const int rr      = s - shift * nb;
                        const double* src = prev.data() + static_cast<std::size_t>(rr) * W;
                        for (int o = -R; o <= R; ++o)
                        {
                            if (src[o + R] == 0.0)
                            {
                                continue;
                            }
                            const int t = o + shift;
                            if (t < -R || t > R)
                            {
                                throw std::logic_error("reconstruction support exceeds its window");
                            }
                            dst[t + R] += c * src[o + R];
                        }
                    }
                }
            }
            rows_.push_back(std::move(nx));
        }
        return rows_[dl];
    }

    double reconstruct_from_level(const HybridMesh& mesh, const Field& field, int level, const CellIndex& target, int alpha,
                                  ReconstructionCache& cache, BoundaryPolicy policy)
    {
        const int dl = target.level - level;
        if (dl < 0)
        {
            throw std::invalid_argument("reconstruct: target coarser than source level");
        }
        const int R  = cache.radius();
        const int k0 = target.k[0] >> dl, r0 = target.k[0] - (k0 << dl);
        const double* wx = cache.row(dl, r0);
        if (mesh.d() == 1)
        {
            double v = 0;
            for (int o = -R; o <= R; ++o)
            {
                if (wx[o + R] != 0.0)
                {
                    v += wx[o + R] * field.get(level, k0 + o, 0, policy)[alpha];
                }
            }
            return v;
        }
        const int k1 = target.k[1] >> dl, r1 = target.k[1] - (k1 << dl);
        const double* wy = cache.row(dl, r1);
        double v         = 0;
        for (int j = -R; j <= R; ++j)
        {
            if (wy[j + R] == 0.0)
            {
                continue;
            }
            for (int o = -R; o <= R; ++o)
            {
                if (wx[o + R] != 0.0)
                {
                    v += wy[j + R] * wx[o + R] * field.get(level, k0 + o, k1 + j, policy)[alpha];
                }
            }
        }
        return v;
    }

    double reconstruct(const HybridMesh& mesh, const Field& field, const CellIndex& target, int alpha, ReconstructionCache& cache,
                       BoundaryPolicy policy)
    {
        if (!mesh.in_domain(target.level, target.k))
        {
            throw std::invalid_argument("reconstruct: target outside the mesh");
        }
        const CellIndex leaf = mesh.covering_leaf(target);
        return reconstruct_from_level(mesh, field, leaf.level, target, alpha, cache, policy);
    }

    UniformState reconstruct_finest(const HybridMesh& mesh, const Field& field, ReconstructionCache& cache, BoundaryPolicy policy)
    {
        const int L = mesh.l_max();
        const int q = field.q();
        UniformState out(L, mesh.n(L), q);
        for (const auto& leaf : mesh.leaves())
        {
            const int dl = L - leaf.level;
            const int nb = 1 << dl;
            const int ny = mesh.d() == 2 ? nb : 1;
            for (int j = 0; j < ny; ++j)
            {
                for (int i = 0; i < nb; ++i)
                {
                    const CellIndex t{L, {(leaf.k[0] << dl) + i, mesh.d() == 2 ? (leaf.k[1] << dl) + j : 0}};
                    double* dst = out.at(t.k[0], t.k[1]);
                    for (int a = 0; a < q; ++a)
                    {
                        dst[a] = dl == 0 ? field.at(leaf)[a] : reconstruct_from_level(mesh, field, leaf.level, t, a, cache, policy);
                    }
                }
            }
        }
        return out;
    }

    double detail(const HybridMesh& mesh, const Field& field, const CellIndex& leaf, const PredictionOperator& op,
                  BoundaryPolicy policy)
    {
        if (leaf.level <= mesh.root())
        {
            return 0.0;
        }
        const int g    = op.gamma;
        const auto cw  = child_weights(op.wd);
        const int d    = mesh.d();
        const int gy   = d == 2 ? g : 0;
        const int p0   = leaf.k[0] >> 1, p1 = leaf.k[1] >> 1;
        const auto& wx = cw[leaf.k[0] & 1];
        const auto& wy = cw[leaf.k[1] & 1];
        const double* f = field.at(leaf);
        double best     = 0;
        for (int a = 0; a < field.q(); ++a)
        {
            double pred = 0;
            for (int j = -gy; j <= gy; ++j)
            {
                const double cy = d == 2 ? wy[j + g] : 1.0;
                for (int i = -g; i <= g; ++i)
                {
                    pred += cy * wx[i + g] * field.get(leaf.level - 1, p0 + i, p1 + j, policy)[a];
                }
            }
            best = std::max(best, std::abs(pred - f[a]));
        }
        return best;
    }

    std::vector<double> details(const HybridMesh& mesh, const Field& field, const PredictionOperator& op, BoundaryPolicy policy)
    {
        std::vector<double> out;
        out.reserve(mesh.num_leaves());
        for (const auto& c : mesh.leaves())
        {
            out.push_back(detail(mesh, field, c, op, policy));
        }
        return out;
    }
}
