#include "mrlbm/problems.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mrlbm
{
    namespace
    {
        // Orthonormal Hermite values p_0..p_{n} at x; returns p_n and p_{n-1}.
        void hermite_orthonormal(int n, double x, double& pn, double& pn1, double& sumsq)
        {
            double p0 = std::pow(std::numbers::pi, -0.25);
            double p1 = std::sqrt(2.0) * x * p0;
            sumsq     = p0 * p0;
            if (n == 1)
            {
                pn  = p1;
                pn1 = p0;
                return;
            }
            sumsq += p1 * p1;
            for (int k = 1; k < n; ++k)
            {
                const double p2 = std::sqrt(2.0 / (k + 1)) * x * p1 - std::sqrt(static_cast<double>(k) / (k + 1)) * p0;
                p0              = p1;
                p1              = p2;
                if (k + 1 < n)
                {
                    sumsq += p1 * p1;
                }
            }
            pn  = p1;
            pn1 = p0;
        }

        std::vector<double> jacobi_eigenvalues(const std::vector<double>& offdiag, int n)
        {
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i + 1 < n; ++i)
            {
                J(i, i + 1) = J(i + 1, i) = offdiag[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i)
            {
                x[i] = es.eigenvalues()(i);
            }
            return x;
        }
    }

    HermiteRule gauss_hermite(int n)
    {
        if (n < 1)
        {
            throw std::invalid_argument("gauss_hermite: n >= 1");
        }
        std::vector<double> off(std::max(n - 1, 0));
        for (int k = 1; k < n; ++k)
        {
            off[k - 1] = std::sqrt(k / 2.0);
        }
        HermiteRule r;
        r.x = jacobi_eigenvalues(off, n);
        for (double& x : r.x)
        {
            for (int it = 0; it < 100; ++it)
            {
                double pn, pn1, s;
                hermite_orthonormal(n, x, pn, pn1, s);
                const double dx = pn / (std::sqrt(2.0 * n) * pn1);
                x -= dx;
                if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x)))
                {
                    break;
                }
            }
        }
        // exact symmetry
        for (int i = 0; i < n / 2; ++i)
        {
            const double a = 0.5 * (r.x[n - 1 - i] - r.x[i]);
            r.x[i]         = -a;
            r.x[n - 1 - i] = a;
        }
        if (n % 2 == 1)
        {
            r.x[n / 2] = 0.0;
        }
        for (double x : r.x)
        {
            double pn, pn1, s;
            hermite_orthonormal(n, x, pn, pn1, s);
            r.w.push_back(1.0 / s);
        }
        return r;
    }

    QuadratureRule gauss_legendre(int n)
    {
        if (n < 1)
        {
            throw std::invalid_argument("gauss_legendre: n >= 1");
        }
        std::vector<double> off(std::max(n - 1, 0));
        for (int k = 1; k < n; ++k)
        {
            off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
        }
        QuadratureRule r;
        r.x = jacobi_eigenvalues(off, n);
        for (double& x : r.x)
        {
            double dp = 1;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1, p1 = x;
                for (int k = 1; k < n; ++k)
                {
                    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                    p0              = p1;
                    p1              = p2;
                }
                const double pn = n == 0 ? 1 : p1;
                dp              = n * (x * pn - p0) / (x * x - 1);
                const double dx = pn / dp;
                x -= dx;
                if (std::abs(dx) <= 1e-16)
                {
                    break;
                }
            }
        }
        for (int i = 0; i < n / 2; ++i)
        {
            const double a = 0.5 * (r.x[n - 1 - i] - r.x[i]);
            r.x[i]         = -a;
            r.x[n - 1 - i] = a;
        }
        if (n % 2 == 1)
        {
            r.x[n / 2] = 0.0;
        }
        for (double x : r.x)
        {
            double p0 = 1, p1 = x;
            for (int k = 1; k < n; ++k)
            {
                const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0              = p1;
                p1              = p2;
            }
            const double dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1);
            r.w.push_back(2.0 / ((1 - x * x) * dp * dp));
        }
        return r;
    }

    double advection_exact(double t, double x, double V, double nu, double t0)
    {
        const double z = x - V * t;
        return std::exp(-z * z / (4 * nu * t0)) / std::sqrt(4 * std::numbers::pi * nu * t0);
    }

    double advdiff_exact(double t, double x, double V, double nu, double t0)
    {
        const double z = x - V * t;
        const double s = 4 * nu * (t0 + t);
        return std::exp(-z * z / s) / std::sqrt(std::numbers::pi * s);
    }

    double advdiff_exact_2d(double t, double x, double y, double Vx, double Vy, double nu, double t0)
    {
        const double zx = x - Vx * t, zy = y - Vy * t;
        const double s  = 4 * nu * (t0 + t);
        return std::exp(-(zx * zx + zy * zy) / s) / (std::numbers::pi * s);
    }

    double burgers_initial(double x, double nu, double t0)
    {
        return advection_exact(0, x, 0, nu, t0);
    }

    double burgers_exact(double t, double x, double nu, double t0, const HermiteRule& rule)
    {
        if (!(t > 0))
        {
            return burgers_initial(x, nu, t0);
        }
        const std::size_t n = rule.x.size();
        const double a0     = x / std::sqrt(4 * nu * t0);
        const double r      = std::sqrt(t / t0);
        double emax         = -INFINITY;
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            e[i] = -std::erf(a0 - r * rule.x[i]) / (4 * nu) + std::log(rule.w[i]);
            emax = std::max(emax, e[i]);
        }
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double v = std::exp(e[i] - emax);
            num += rule.x[i] * v;
            den += v;
        }
        return std::sqrt(4 * nu / t) * num / den;
    }

    namespace
    {
        double checked_rate(double s, const char* what)
        {
            if (!(s > 0 && s <= 2))
            {
                throw std::invalid_argument(std::string("relaxation rate ") + what + " outside (0,2]");
            }
            return s;
        }
    }

    ProblemSpec make_problem(const std::string& id, double s)
    {
        ProblemSpec p;
        p.id     = id;
        p.domain = Domain::with_cell_size(1, {-3, 0}, {3, 1}, 1.0);
        if (id == "1")
        {
            p.lambda = 1;
            p.V      = 0.5;
            p.nu     = 0.005;
            p.T      = 2;
            p.s      = s;
            p.initial = [p](double x, double) { return advection_exact(0, x, p.V, p.nu, p.t0); };
            p.exact   = [p](double t, double x, double) { return advection_exact(t, x, p.V, p.nu, p.t0); };
            p.builder = [p](double)
            {
                const double V = p.V;
                return make_d1q2(p.lambda, checked_rate(p.s, "s"), [V](const double* c, double* m) { m[0] = c[0], m[1] = V * c[0]; }, true);
            };
        }
        else if (id == "2")
        {
            p.lambda  = 1;
            p.V       = 0.5;
            p.nu      = 0.005;
            p.kappa   = 0.5;
            p.T       = 2;
            p.initial = [p](double x, double) { return advdiff_exact(0, x, p.V, p.nu, p.t0); };
            p.exact   = [p](double t, double x, double) { return advdiff_exact(t, x, p.V, p.nu, p.t0); };
            p.builder = [p](double dx)
            {
                const double V = p.V, k = p.kappa;
                const double sv = checked_rate(1.0 / (0.5 + p.lambda * p.nu / (dx * (2 * k - V * V))), "s_v");
                return make_d1q3(p.lambda, sv, 1.0, [V, k](const double* c, double* m) { m[0] = c[0], m[1] = V * c[0], m[2] = k * c[0]; },
                                 true);
            };
        }
        else if (id == "3a" || id == "3b")
        {
            p.lambda = 4;
            p.nu     = id == "3a" ? 0.05 : 0.005;
            p.kappa  = id == "3a" ? 4.0 : 1.0;
            p.T      = 1;
            auto rule = std::make_shared<HermiteRule>(gauss_hermite(100));
            p.initial = [p](double x, double) { return burgers_initial(x, p.nu, p.t0); };
            p.exact   = [p, rule](double t, double x, double) { return burgers_exact(t, x, p.nu, p.t0, *rule); };
            p.builder = [p](double dx)
            {
                const double k  = p.kappa;
                const double sv = checked_rate(1.0 / (0.5 + p.lambda * p.nu / (dx * k)), "s_v");
                return make_d1q3(
                    p.lambda, sv, 1.0,
                    [k](const double* c, double* m)
                    {
                        const double u = c[0];
                        m[0]           = u;
                        m[1]           = u * u / 2;
                        m[2]           = u * u * u / 6 + k * u / 2;
                    },
                    false);
            };
        }
        else if (id == "4")
        {
            p.d       = 2;
            p.domain  = Domain::with_cell_size(2, {-0.5, -0.5}, {1, 1}, 1.0);
            p.lambda  = 1;
            p.V       = 0.5;
            p.Vy      = 0.5;
            p.nu      = 0.005;
            p.T       = 0.5;
            p.initial = [p](double x, double y) { return advdiff_exact_2d(0, x, y, p.V, p.Vy, p.nu, p.t0); };
            p.exact   = [p](double t, double x, double y) { return advdiff_exact_2d(t, x, y, p.V, p.Vy, p.nu, p.t0); };
            p.builder = [p](double dx)
            {
                const double l = p.lambda, vx = p.V, vy = p.Vy, v2 = vx * vx + vy * vy;
                const double sr = checked_rate(1.0 / (0.5 + 3 * p.nu / (l * dx)), "s");
                return make_d2q9(
                    l, sr,
                    [=](const double* c, double* m)
                    {
                        const double u = c[0];
                        m[0]           = u;
                        m[1]           = vx * u;
                        m[2]           = vy * u;
                        m[3]           = (-2 * l * l + 3 * v2) * u;
                        m[4]           = -l * l * vx * u;
                        m[5]           = -l * l * vy * u;
                        m[6]           = (l * l * l * l - 3 * l * l * v2) * u;
                        m[7]           = (vx * vx - vy * vy) * u;
                        m[8]           = vx * vy * u;
                    },
                    true);
            };
        }
        else
        {
            throw std::invalid_argument("unknown test: " + id);
        }
        return p;
    }

    SchemeSpec build_scheme(const ProblemSpec& problem, double dx)
    {
        return problem.builder(dx);
    }
}
