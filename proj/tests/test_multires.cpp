#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrlbm/multires.hpp"

#include <cmath>
#include <random>

using namespace mrlbm;

namespace
{
    // Average of sum_i coef[i] x^i over [a,b].
    double poly_avg(const std::vector<double>& coef, double a, double b)
    {
        double s = 0;
        for (std::size_t i = 0; i < coef.size(); ++i)
        {
            s += coef[i] * (std::pow(b, i + 1.0) - std::pow(a, i + 1.0)) / (i + 1.0);
        }
        return s / (b - a);
    }

    std::vector<double> window_of(const std::vector<double>& coef, int gamma)
    {
        std::vector<double> w;
        for (int j = -gamma; j <= gamma; ++j)
        {
            w.push_back(poly_avg(coef, j - 0.5, j + 0.5));
        }
        return w;
    }

    const Domain unit1 = Domain::unit_cells(1, {0, 0}, {1, 1});
    const Domain unit2 = Domain::unit_cells(2, {0, 0}, {1, 1});
}

TEST_CASE("prediction weights")
{
    CHECK(derive_prediction_weights(0).w.empty());
    const auto g1 = derive_prediction_weights(1);
    REQUIRE(g1.w.size() == 1);
    CHECK(g1.w[0] == Rational(-1, 8));
    const auto g2 = derive_prediction_weights(2);
    REQUIRE(g2.w.size() == 2);
    CHECK(g2.w[0] == Rational(-22, 128));
    CHECK(g2.w[1] == Rational(3, 128));
}

TEST_CASE("predict examples")
{
    const auto op = derive_prediction_weights(1);
    CHECK(predict({2, 2, 2}, 0, op) == doctest::Approx(2));
    CHECK(predict({2, 2, 2}, 1, op) == doctest::Approx(2));
    CHECK(predict({0, 0, 8}, 0, op) == doctest::Approx(-1));
    CHECK(predict({0, 0, 8}, 1, op) == doctest::Approx(1));
    const std::vector<double> w{0.3, -1.2, 4.0};
    CHECK((predict(w, 0, op) + predict(w, 1, op)) / 2 == doctest::Approx(-1.2).epsilon(1e-15));
}

TEST_CASE("polynomial exactness in both directions")
{
    for (int g = 0; g <= 2; ++g)
    {
        const auto op = derive_prediction_weights(g);
        for (int deg = 0; deg <= 2 * g + 1; ++deg)
        {
            std::vector<double> coef(deg + 1, 0.0);
            for (int i = 0; i <= deg; ++i)
            {
                coef[i] = 0.5 + 0.3 * i;
            }
            const auto win = window_of(coef, g);
            const double left  = poly_avg(coef, -0.5, 0.0);
            const double right = poly_avg(coef, 0.0, 0.5);
            const double e0    = std::abs(predict(win, 0, op) - left);
            const double e1    = std::abs(predict(win, 1, op) - right);
            if (deg <= 2 * g)
            {
                CHECK(e0 <= 1e-12 * std::max(1.0, std::abs(left)));
                CHECK(e1 <= 1e-12 * std::max(1.0, std::abs(right)));
            }
            else
            {
                CHECK(e0 > 1e-6);
            }
        }
    }
}

TEST_CASE("volume preservation is exact in rational arithmetic")
{
    for (int g = 0; g <= 2; ++g)
    {
        const auto op = derive_prediction_weights(g);
        // child weights of delta 0 and 1 sum to the parent selector
        std::vector<Rational> q(2 * g + 1, Rational(0));
        for (int p = 1; p <= g; ++p)
        {
            q[g + p] += op.w[p - 1];
            q[g - p] -= op.w[p - 1];
        }
        for (int j = 0; j < 2 * g + 1; ++j)
        {
            const Rational c0 = (j == g ? Rational(1) : Rational(0)) + q[j];
            const Rational c1 = (j == g ? Rational(1) : Rational(0)) - q[j];
            CHECK((c0 + c1) / 2 == (j == g ? Rational(1) : Rational(0)));
        }
    }
    // 2D, float
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    const auto op = derive_prediction_weights(1);
    std::vector<double> w(9);
    for (auto& x : w)
    {
        x = U(rng);
    }
    double s = 0;
    for (int dy = 0; dy < 2; ++dy)
    {
        for (int dx = 0; dx < 2; ++dx)
        {
            s += predict_2d(w, {dx, dy}, op);
        }
    }
    CHECK(s / 4 == doctest::Approx(w[4]).epsilon(1e-14));
}

TEST_CASE("predict_2d")
{
    const auto op = derive_prediction_weights(1);
    const std::vector<double> c(9, 3.25);
    for (int dy = 0; dy < 2; ++dy)
    {
        for (int dx = 0; dx < 2; ++dx)
        {
            CHECK(predict_2d(c, {dx, dy}, op) == doctest::Approx(3.25));
        }
    }
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-2, 2);
    std::vector<double> g(3), h(3), w(9);
    for (int i = 0; i < 3; ++i)
    {
        g[i] = U(rng);
        h[i] = U(rng);
    }
    for (int j = 0; j < 3; ++j)
    {
        for (int i = 0; i < 3; ++i)
        {
            w[j * 3 + i] = g[i] * h[j];
        }
    }
    for (int dy = 0; dy < 2; ++dy)
    {
        for (int dx = 0; dx < 2; ++dx)
        {
            const double v = predict_2d(w, {dx, dy}, op);
            CHECK(v == doctest::Approx(predict(g, dx, op) * predict(h, dy, op)).epsilon(1e-14));
            CHECK(std::abs(v - predict_2d(w, {dx, dy}, op, true)) <= 1e-14);
        }
    }
    // generic window: both sweep orders agree
    for (auto& x : w)
    {
        x = U(rng);
    }
    CHECK(std::abs(predict_2d(w, {1, 0}, op) - predict_2d(w, {1, 0}, op, true)) <= 1e-14);
}

TEST_CASE("project")
{
    CHECK(project({1, 1}) == 1);
    CHECK(project({1, 2, 3, 4}) == doctest::Approx(2.5));
    const auto op = derive_prediction_weights(2);
    const std::vector<double> w{0.1, -0.4, 2.0, 0.7, 0.3};
    CHECK(project({predict(w, 0, op), predict(w, 1, op)}) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("local polynomial reproduces its averages")
{
    for (int g = 0; g <= 2; ++g)
    {
        std::vector<double> w;
        for (int j = -g; j <= g; ++j)
        {
            w.push_back(std::sin(1.0 + j));
        }
        const auto P = local_polynomial(w, g);
        for (int j = -g; j <= g; ++j)
        {
            CHECK(P.average(j - 0.5, j + 0.5) == doctest::Approx(w[j + g]).epsilon(1e-12));
        }
    }
    std::vector<double> w2(9);
    for (int i = 0; i < 9; ++i)
    {
        w2[i] = std::cos(0.3 * i * i);
    }
    const auto P2 = local_polynomial_2d(w2, 1);
    for (int j = -1; j <= 1; ++j)
    {
        for (int i = -1; i <= 1; ++i)
        {
            CHECK(P2.average(i - 0.5, i + 0.5, j - 0.5, j + 0.5) == doctest::Approx(w2[(j + 1) * 3 + (i + 1)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("cubic counterexample")
{
    // averages of x^3 on the three parent cells predict -5/16 on the left child instead of -1/32
    const auto op = derive_prediction_weights(1);
    CHECK(predict({-1.25, 0.0, 1.25}, 0, op) == doctest::Approx(-5.0 / 16));
    CHECK(poly_avg({0, 0, 0, 1}, -0.5, 0.0) == doctest::Approx(-1.0 / 32));
}

TEST_CASE("reconstruction")
{
    const std::vector<double> quad{0.2, -0.7, 1.1};
    const int L = 7, l = 3;
    const auto op = derive_prediction_weights(1);
    auto mesh = uniform_mesh(l, L, unit1);
    Field f(mesh, 1);
    const double h = std::ldexp(1.0, -l);
    for (const auto& c : mesh.leaves())
    {
        f.at(c)[0] = poly_avg(quad, c.k[0] * h, (c.k[0] + 1) * h);
    }
    fill_halos(mesh, f, BoundaryPolicy::copy, op.wd);
    ReconstructionCache cache(op);
    const double H = std::ldexp(1.0, -L);
    const int nb   = 1 << (L - l);
    for (int k = 2 * nb; k < (mesh.n(l)[0] - 2) * nb; ++k)
    {
        const double v = reconstruct(mesh, f, {L, {k, 0}}, 0, cache, BoundaryPolicy::copy);
        CHECK(v == doctest::Approx(poly_avg(quad, k * H, (k + 1) * H)).epsilon(1e-12));
    }

    // uniform finest mesh: identity
    auto fine = uniform_mesh(L, L, unit1);
    Field g(fine, 1);
    for (int k = 0; k < fine.n(L)[0]; ++k)
    {
        g.at(L, k)[0] = std::sin(0.1 * k);
    }
    fill_halos(fine, g, BoundaryPolicy::copy, op.wd);
    for (int k = 0; k < fine.n(L)[0]; ++k)
    {
        CHECK(reconstruct(fine, g, {L, {k, 0}}, 0, cache, BoundaryPolicy::copy) == g.at(L, k)[0]);
    }
}

TEST_CASE("gamma = 0 reconstruction is injection")
{
    const auto op = derive_prediction_weights(0);
    ReconstructionCache cache(op);
    for (int dl = 0; dl <= 5; ++dl)
    {
        const int L = 6;
        auto mesh   = uniform_mesh(L - dl, L, unit1);
        if (dl >= 2)
        {
            mesh.refine({L - dl, {1, 0}});
        }
        mesh.ensure_graded_inplace();
        Field f(mesh, 1);
        int i = 0;
        for (const auto& c : mesh.leaves())
        {
            f.at(c)[0] = 1.0 + 0.5 * i++;
        }
        fill_halos(mesh, f, BoundaryPolicy::copy, op.wd);
        for (int k = 0; k < mesh.n(L)[0]; ++k)
        {
            const CellIndex leaf = mesh.covering_leaf({L, {k, 0}});
            CHECK(reconstruct(mesh, f, {L, {k, 0}}, 0, cache, BoundaryPolicy::copy) == f.at(leaf)[0]);
        }
    }
}

TEST_CASE("reconstruction is linear")
{
    const auto op = derive_prediction_weights(1);
    ReconstructionCache cache(op);
    const int L = 6;
    auto mesh   = uniform_mesh(3, L, unit2);
    mesh.refine({3, {3, 3}});
    mesh.refine({4, {7, 7}});
    mesh.ensure_graded_inplace();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    Field u(mesh, 1), v(mesh, 1), w(mesh, 1);
    for (const auto& c : mesh.leaves())
    {
        u.at(c)[0] = U(rng);
        v.at(c)[0] = U(rng);
        w.at(c)[0] = 2.0 * u.at(c)[0] - 3.0 * v.at(c)[0];
    }
    for (Field* f : {&u, &v, &w})
    {
        fill_halos(mesh, *f, BoundaryPolicy::copy, op.wd);
    }
    const auto ru = reconstruct_finest(mesh, u, cache, BoundaryPolicy::copy);
    const auto rv = reconstruct_finest(mesh, v, cache, BoundaryPolicy::copy);
    const auto rw = reconstruct_finest(mesh, w, cache, BoundaryPolicy::copy);
    for (std::size_t i = 0; i < ru.values.size(); ++i)
    {
        CHECK(std::abs(rw.values[i] - (2.0 * ru.values[i] - 3.0 * rv.values[i])) <= 1e-12);
    }
    // average over each leaf equals the leaf value (volume preservation through the cascade)
    for (const auto& c : mesh.leaves())
    {
        const int nb = 1 << (L - c.level);
        double s     = 0;
        for (int j = 0; j < nb; ++j)
        {
            for (int i = 0; i < nb; ++i)
            {
                s += ru.at(c.k[0] * nb + i, c.k[1] * nb + j)[0];
            }
        }
        CHECK(s / (nb * nb) == doctest::Approx(u.at(c)[0]).epsilon(1e-12));
    }
}

TEST_CASE("details")
{
    const auto op = derive_prediction_weights(1);
    const int L   = 6;
    auto mesh     = uniform_mesh(L, L, unit1);
    Field f(mesh, 1);
    for (const auto& c : mesh.leaves())
    {
        f.at(c)[0] = 4.0;
    }
    fill_halos(mesh, f, BoundaryPolicy::copy, op.wd);
    for (double d : details(mesh, f, op, BoundaryPolicy::copy))
    {
        CHECK(d == doctest::Approx(0.0));
    }

    const std::vector<double> quad{1.0, 0.5, -2.0};
    const double h = std::ldexp(1.0, -L);
    for (const auto& c : mesh.leaves())
    {
        f.at(c)[0] = poly_avg(quad, c.k[0] * h, (c.k[0] + 1) * h);
    }
    fill_halos(mesh, f, BoundaryPolicy::copy, op.wd);
    for (const auto& c : mesh.leaves())
    {
        if (c.k[0] >= 4 && c.k[0] < mesh.n(L)[0] - 4)
        {
            CHECK(detail(mesh, f, c, op, BoundaryPolicy::copy) <= 1e-12);
        }
    }

    for (const auto& c : mesh.leaves())
    {
        f.at(c)[0] = 0.0;
    }
    f.at(L, 20)[0] = 1.0;
    fill_halos(mesh, f, BoundaryPolicy::copy, op.wd);
    const auto d = details(mesh, f, op, BoundaryPolicy::copy);
    CHECK(d[20] > 0.4);
    double far = 0;
    for (int k = 0; k < static_cast<int>(d.size()); ++k)
    {
        if (std::abs(k - 20) > 4)
        {
            far = std::max(far, d[k]);
        }
    }
    CHECK(far == 0.0);
    CHECK(d[20] == *std::max_element(d.begin(), d.end()));
}
