#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace mrlbm
{
    using IVec = std::array<int, 2>;

    struct VelocitySet
    {
        int d = 1;
        int q = 0;
        std::vector<IVec> c; // unused components are 0

        // Validates |c|_inf <= 2 and distinctness.
        static VelocitySet make(int d, std::vector<IVec> c);
    };

    // Fills meq[0..q) from the conserved moments cons[0..q_c).
    using EquilibriumFn = std::function<void(const double* cons, double* meq)>;

    struct SchemeSpec
    {
        std::string name;
        VelocitySet velocities;
        double lambda = 1.0;
        std::vector<double> M;    // q*q row-major
        std::vector<double> Minv; // q*q row-major
        std::vector<double> S;    // q
        int q_c = 1;
        EquilibriumFn eq;
        bool linear_eq = false; // equilibria linear in the conserved moments
        std::vector<double> K;  // q*q collision matrix on distributions, linear case only

        int q() const
        {
            return velocities.q;
        }
        int d() const
        {
            return velocities.d;
        }

        // Checks S, q_c, conditioning of M and the conserved slots of eq.
        static SchemeSpec make(std::string name, VelocitySet v, double lambda, std::vector<double> M, std::vector<double> S, int q_c,
                               EquilibriumFn eq, bool linear_eq);

        void to_moments(const double* f, double* m) const;
        void from_moments(const double* m, double* f) const;
        void collide_moments(double* m) const;
        // Relaxes m towards a given equilibrium vector (conserved slots untouched).
        void relax_moments(double* m, const double* meq) const;
        // In-place collision on distributions.
        void collide(double* f) const;
        // Conserved moments only.
        void conserved(const double* f, double* cons) const;
    };

    std::vector<double> to_moments(const std::vector<double>& f, const SchemeSpec& spec);
    std::vector<double> from_moments(const std::vector<double>& m, const SchemeSpec& spec);
    std::vector<double> collide_moments(const std::vector<double>& m, const SchemeSpec& spec);

    enum class BoundaryPolicy
    {
        copy,
        periodic
    };

    // Maps a possibly out-of-range index to [0, n).
    inline int map_index(int k, int n, BoundaryPolicy p)
    {
        if (p == BoundaryPolicy::periodic)
        {
            int r = k % n;
            return r < 0 ? r + n : r;
        }
        return k < 0 ? 0 : (k >= n ? n - 1 : k);
    }

    struct UniformState
    {
        int level = 0;
        IVec n{1, 1}; // cells per axis, n[1] = 1 in 1D
        int q = 0;
        std::vector<double> values; // ((k1 * n0) + k0) * q + alpha

        UniformState() = default;
        UniformState(int level, IVec n, int q)
            : level(level)
            , n(n)
            , q(q)
            , values(static_cast<std::size_t>(n[0]) * n[1] * q, 0.0)
        {
        }

        std::size_t cells() const
        {
            return static_cast<std::size_t>(n[0]) * n[1];
        }
        double* at(int k0, int k1 = 0)
        {
            return values.data() + (static_cast<std::size_t>(k1) * n[0] + k0) * q;
        }
        const double* at(int k0, int k1 = 0) const
        {
            return values.data() + (static_cast<std::size_t>(k1) * n[0] + k0) * q;
        }
    };

    // One collide + shift on the finest uniform grid.
    UniformState reference_step(const UniformState& state, const SchemeSpec& spec, BoundaryPolicy policy);
    void reference_step_inplace(UniformState& state, UniformState& scratch, const SchemeSpec& spec, BoundaryPolicy policy);

    // Lattice builders. Equilibria and relaxation rates are supplied by the caller.
    SchemeSpec make_d1q2(double lambda, double s, EquilibriumFn eq, bool linear);
    SchemeSpec make_d1q3(double lambda, double s_v, double s_w, EquilibriumFn eq, bool linear);
    SchemeSpec make_d2q9(double lambda, double s, EquilibriumFn eq, bool linear);
}
