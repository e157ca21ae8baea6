#include "mrlbm/schemes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrlbm
{
    VelocitySet VelocitySet::make(int d, std::vector<IVec> c)
    {
        if (d < 1 || d > 2)
        {
            throw std::invalid_argument("VelocitySet: d must be 1 or 2");
        }
        for (std::size_t a = 0; a < c.size(); ++a)
        {
            for (int i = 0; i < 2; ++i)
            {
                if (std::abs(c[a][i]) > 2 || (i >= d && c[a][i] != 0))
                {
                    throw std::invalid_argument("VelocitySet: velocity out of range");
                }
            }
            for (std::size_t b = 0; b < a; ++b)
            {
                if (c[a] == c[b])
                {
                    throw std::invalid_argument("VelocitySet: duplicate velocity");
                }
            }
        }
        VelocitySet v;
        v.d = d;
        v.q = static_cast<int>(c.size());
        v.c = std::move(c);
        return v;
    }

    SchemeSpec SchemeSpec::make(std::string name, VelocitySet v, double lambda, std::vector<double> M, std::vector<double> S, int q_c,
                                EquilibriumFn eq, bool linear_eq)
    {
        const int q = v.q;
        if (static_cast<int>(M.size()) != q * q || static_cast<int>(S.size()) != q)
        {
            throw std::invalid_argument("SchemeSpec: dimension mismatch");
        }
        if (!(lambda > 0))
        {
            throw std::invalid_argument("SchemeSpec: lambda must be positive");
        }
        if (q_c < 1 || q_c > q)
        {
            throw std::invalid_argument("SchemeSpec: bad q_c");
        }
        for (int i = 0; i < q; ++i)
        {
            if (i < q_c && S[i] != 0.0)
            {
                throw std::invalid_argument("SchemeSpec: conserved moment with nonzero rate");
            }
            if (!(S[i] >= 0.0 && S[i] <= 2.0))
            {
                throw std::invalid_argument("SchemeSpec: relaxation rate outside [0,2]");
            }
        }
        Eigen::MatrixXd Me(q, q);
        for (int i = 0; i < q; ++i)
        {
            for (int j = 0; j < q; ++j)
            {
                Me(i, j) = M[i * q + j];
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Me);
        const auto& sv = svd.singularValues();
        if (sv(q - 1) <= 1e-12 * sv(0))
        {
            throw std::invalid_argument("SchemeSpec: moment matrix is singular");
        }
        Eigen::MatrixXd Mi = Me.inverse();
        SchemeSpec s;
        s.name       = std::move(name);
        s.velocities = std::move(v);
        s.lambda     = lambda;
        s.M          = std::move(M);
        s.Minv.resize(q * q);
        for (int i = 0; i < q; ++i)
        {
            for (int j = 0; j < q; ++j)
            {
                s.Minv[i * q + j] = Mi(i, j);
            }
        }
        s.S         = std::move(S);
        s.q_c       = q_c;
        s.eq        = std::move(eq);
        s.linear_eq = linear_eq;

        std::vector<double> cons(q_c), meq(q);
        for (int i = 0; i < q_c; ++i)
        {
            cons[i] = 0.37 + 0.11 * i;
        }
        s.eq(cons.data(), meq.data());
        for (int i = 0; i < q_c; ++i)
        {
            if (std::abs(meq[i] - cons[i]) > 1e-14)
            {
                throw std::invalid_argument("SchemeSpec: equilibrium alters conserved moments");
            }
        }
        if (linear_eq)
        {
            // columns are the collisions of the unit distributions
            std::vector<double> K(static_cast<std::size_t>(q) * q);
            for (int j = 0; j < q; ++j)
            {
                double f[16] = {};
                f[j]         = 1.0;
                s.collide(f);
                for (int i = 0; i < q; ++i)
                {
                    K[static_cast<std::size_t>(i) * q + j] = f[i];
                }
            }
            s.K = std::move(K);
        }
        return s;
    }

    void SchemeSpec::to_moments(const double* f, double* m) const
    {
        const int q = velocities.q;
        for (int i = 0; i < q; ++i)
        {
            double acc = 0;
            for (int j = 0; j < q; ++j)
            {
                acc += M[i * q + j] * f[j];
            }
            m[i] = acc;
        }
    }

    void SchemeSpec::from_moments(const double* m, double* f) const
    {
        const int q = velocities.q;
        for (int i = 0; i < q; ++i)
        {
            double acc = 0;
            for (int j = 0; j < q; ++j)
            {
                acc += Minv[i * q + j] * m[j];
            }
            f[i] = acc;
        }
    }

    void SchemeSpec::relax_moments(double* m, const double* meq) const
    {
        for (int i = q_c; i < velocities.q; ++i)
        {
            m[i] = (1.0 - S[i]) * m[i] + S[i] * meq[i];
        }
    }

    void SchemeSpec::collide_moments(double* m) const
    {
        double meq[16];
        eq(m, meq);
        relax_moments(m, meq);
    }

    namespace
    {
        template <int Q>
        void matvec_inplace(const double* K, double* f)
        {
            double g[Q];
            for (int i = 0; i < Q; ++i)
            {
                double acc = 0;
                for (int j = 0; j < Q; ++j)
                {
                    acc += K[i * Q + j] * f[j];
                }
                g[i] = acc;
            }
            for (int i = 0; i < Q; ++i)
            {
                f[i] = g[i];
            }
        }
    }

    void SchemeSpec::collide(double* f) const
    {
        if (!K.empty())
        {
            switch (velocities.q)
            {
                case 2:
                    return matvec_inplace<2>(K.data(), f);
                case 3:
                    return matvec_inplace<3>(K.data(), f);
                case 9:
                    return matvec_inplace<9>(K.data(), f);
                default:
                    break;
            }
            const int q = velocities.q;
            double g[16];
            for (int i = 0; i < q; ++i)
            {
                double acc = 0;
                for (int j = 0; j < q; ++j)
                {
                    acc += K[i * q + j] * f[j];
                }
                g[i] = acc;
            }
            std::copy(g, g + q, f);
            return;
        }
        double m[16];
        to_moments(f, m);
        collide_moments(m);
        from_moments(m, f);
    }

    void SchemeSpec::conserved(const double* f, double* cons) const
    {
        const int q = velocities.q;
        for (int i = 0; i < q_c; ++i)
        {
            double acc = 0;
            for (int j = 0; j < q; ++j)
            {
                acc += M[i * q + j] * f[j];
            }
            cons[i] = acc;
        }
    }

    static void check_len(const std::vector<double>& v, const SchemeSpec& spec)
    {
        if (static_cast<int>(v.size()) != spec.q())
        {
            throw std::invalid_argument("dimension mismatch");
        }
    }

    std::vector<double> to_moments(const std::vector<double>& f, const SchemeSpec& spec)
    {
        check_len(f, spec);
        std::vector<double> m(f.size());
        spec.to_moments(f.data(), m.data());
        return m;
    }

    std::vector<double> from_moments(const std::vector<double>& m, const SchemeSpec& spec)
    {
        check_len(m, spec);
        std::vector<double> f(m.size());
        spec.from_moments(m.data(), f.data());
        return f;
    }

    std::vector<double> collide_moments(const std::vector<double>& m, const SchemeSpec& spec)
    {
        check_len(m, spec);
        std::vector<double> r = m;
        spec.collide_moments(r.data());
        return r;
    }

    void reference_step_inplace(UniformState& state, UniformState& scratch, const SchemeSpec& spec, BoundaryPolicy policy)
    {
        const int q  = spec.q();
        const int n0 = state.n[0];
        const int n1 = state.n[1];
        for (std::size_t i = 0; i < state.cells(); ++i)
        {
            spec.collide(state.values.data() + i * q);
        }
        if (scratch.values.size() != state.values.size())
        {
            scratch = UniformState(state.level, state.n, q);
        }
        scratch.level = state.level;
        for (int a = 0; a < q; ++a)
        {
            const int c0 = spec.velocities.c[a][0];
            const int c1 = spec.velocities.c[a][1];
            for (int k1 = 0; k1 < n1; ++k1)
            {
                const int s1      = n1 == 1 ? 0 : map_index(k1 - c1, n1, policy);
                double* dst       = scratch.at(0, k1) + a;
                const double* src = state.at(0, s1) + a;
                // interior cells need no index mapping
                const int lo = std::max(0, c0), hi = std::min(n0, n0 + c0);
                for (int k0 = 0; k0 < lo; ++k0)
                {
                    dst[k0 * q] = src[map_index(k0 - c0, n0, policy) * q];
                }
                for (int k0 = lo; k0 < hi; ++k0)
                {
                    dst[k0 * q] = src[(k0 - c0) * q];
                }
                for (int k0 = std::max(hi, lo); k0 < n0; ++k0)
                {
                    dst[k0 * q] = src[map_index(k0 - c0, n0, policy) * q];
                }
            }
        }
        std::swap(state.values, scratch.values);
    }

    UniformState reference_step(const UniformState& state, const SchemeSpec& spec, BoundaryPolicy policy)
    {
        UniformState s = state;
        UniformState scratch(state.level, state.n, state.q);
        reference_step_inplace(s, scratch, spec, policy);
        return s;
    }

    SchemeSpec make_d1q2(double lambda, double s, EquilibriumFn eq, bool linear)
    {
        auto v = VelocitySet::make(1, {IVec{1, 0}, IVec{-1, 0}});
        return SchemeSpec::make("D1Q2", v, lambda, {1, 1, lambda, -lambda}, {0, s}, 1, std::move(eq), linear);
    }

    SchemeSpec make_d1q3(double lambda, double s_v, double s_w, EquilibriumFn eq, bool linear)
    {
        auto v         = VelocitySet::make(1, {IVec{0, 0}, IVec{1, 0}, IVec{-1, 0}});
        const double l2 = lambda * lambda / 2;
        return SchemeSpec::make("D1Q3", v, lambda, {1, 1, 1, 0, lambda, -lambda, 0, l2, l2}, {0, s_v, s_w}, 1, std::move(eq), linear);
    }

    SchemeSpec make_d2q9(double lambda, double s, EquilibriumFn eq, bool linear)
    {
        std::vector<IVec> c = {{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
        auto v              = VelocitySet::make(2, c);
        std::vector<double> M(81);
        const double l = lambda, l2 = l * l, l3 = l2 * l, l4 = l2 * l2;
        for (int a = 0; a < 9; ++a)
        {
            const double x = c[a][0], y = c[a][1], r2 = x * x + y * y;
            M[0 * 9 + a] = 1;
            M[1 * 9 + a] = l * x;
            M[2 * 9 + a] = l * y;
            M[3 * 9 + a] = l2 * (-4 + 3 * r2);
            M[4 * 9 + a] = l3 * x * (-5 + 3 * r2);
            M[5 * 9 + a] = l3 * y * (-5 + 3 * r2);
            M[6 * 9 + a] = l4 * (4.5 * r2 * r2 - 10.5 * r2 + 4);
            M[7 * 9 + a] = l2 * (x * x - y * y);
            M[8 * 9 + a] = l2 * x * y;
        }
        return SchemeSpec::make("D2Q9", v, lambda, M, {0, s, s, 1, 1, 1, 1, 1, 1}, 1, std::move(eq), linear);
    }
}
