#pragma once

#include "mrlbm/collision.hpp"
#include "mrlbm/mesh.hpp"
#include "mrlbm/schemes.hpp"

#include <functional>
#include <memory>
#include <string>

namespace mrlbm
{
    // Nodes/weights for the weight exp(-eta^2).
    struct HermiteRule
    {
        std::vector<double> x;
        std::vector<double> w;
    };

    HermiteRule gauss_hermite(int n);
    // On [-1,1].
    QuadratureRule gauss_legendre(int n);

    double advection_exact(double t, double x, double V, double nu, double t0);
    double advdiff_exact(double t, double x, double V, double nu, double t0);
    double advdiff_exact_2d(double t, double x, double y, double Vx, double Vy, double nu, double t0);
    double burgers_exact(double t, double x, double nu, double t0, const HermiteRule& rule);
    double burgers_initial(double x, double nu, double t0);

    struct ProblemSpec
    {
        std::string id;
        int d = 1;
        Domain domain;
        double T      = 1;
        double lambda = 1;
        double V = 0, Vy = 0, nu = 0, kappa = 0, t0 = 1;
        double s = 2; // test 1 relaxation rate
        BoundaryPolicy policy = BoundaryPolicy::copy;
        std::function<double(double x, double y)> initial;
        std::function<double(double t, double x, double y)> exact;
        std::function<SchemeSpec(double dx)> builder;
    };

    // id in {1, 2, 3a, 3b, 4}; s is the test-1 relaxation rate.
    ProblemSpec make_problem(const std::string& id, double s = 2.0);
    SchemeSpec build_scheme(const ProblemSpec& problem, double dx);
}
