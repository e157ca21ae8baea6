#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrlbm/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace mrlbm;

namespace
{
    ExperimentConfig cfg(const std::string& test, StencilKind k, CollisionKind col, int L, int dl)
    {
        ExperimentConfig c;
        c.test      = test;
        c.scheme    = k;
        c.collision = col;
        c.L_max     = L;
        c.L_min     = L - dl;
        return c;
    }

    std::string row(const ExperimentConfig& c, const ErrorReport& r)
    {
        std::ostringstream os;
        write_report_row(os, c, r, NAN, NAN);
        return os.str();
    }
}

TEST_CASE("norm_l1")
{
    const std::vector<double> v{1, -2, 3};
    CHECK(norm_l1(v, v) == 0.0);
    CHECK(norm_l1({2, -4, 6}, v) == doctest::Approx(1.0));
    CHECK(norm_l1({1, -2, 4}, v) == doctest::Approx(1.0 / 6));
    CHECK(std::isnan(norm_l1({1, 2}, v)));
    CHECK(std::isnan(norm_l1({1, 2}, {0, 0})));
}

TEST_CASE("order_estimate")
{
    const auto r = order_estimate({4e-2, 1e-2});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(2.0));
    const auto z = order_estimate({1e-2, 0.0, 1e-3, -1.0});
    REQUIRE(z.size() == 3);
    CHECK(std::isnan(z[0]));
    CHECK(std::isnan(z[1]));
    CHECK(std::isnan(z[2]));
    const auto t = order_estimate({8.0, 1.0, 0.125});
    CHECK(t[0] == doctest::Approx(3.0));
    CHECK(t[1] == doctest::Approx(3.0));
    CHECK(order_estimate({1.0}).empty());
}

TEST_CASE("config parsing")
{
    std::istringstream is(R"(# sample
test = 3b
scheme = lw       # trailing comment
collision = rc
L_max = 9
dl_min = 3
adapt = true
epsilon = 1e-3
mu_bar = 1
stream = flattened
out = res.csv
)");
    const auto c = parse_config(is);
    CHECK(c.test == "3b");
    CHECK(c.scheme == StencilKind::lax_wendroff);
    CHECK(c.collision == CollisionKind::rc);
    CHECK(c.L_max == 9);
    CHECK(c.L_min == 6);
    CHECK(c.adapt);
    CHECK(c.adapt_params.epsilon == 1e-3);
    CHECK(c.adapt_params.mu_bar == 1);
    CHECK(c.stream == StreamMode::flattened);
    CHECK(c.out == "res.csv");
    CHECK(c.effective_gamma() == 1);

    std::istringstream def("test = 1\nL_max = 8\n");
    const auto d = parse_config(def);
    CHECK(d.L_min == 8);
    CHECK(d.scheme == StencilKind::gamma1);

    auto bad = [](const char* text)
    {
        std::istringstream s(text);
        return parse_config(s);
    };
    CHECK_THROWS(bad("colour = red\n"));
    CHECK_THROWS(bad("L_max = 8\nL_min = 9\n"));
    CHECK_THROWS(bad("L_max = 8\nL_min = 6\ndl_min = 2\n"));
    CHECK_THROWS(bad("test = 7\n"));
    CHECK_THROWS(bad("L_max = eight\n"));
    CHECK_THROWS(bad("scheme = haar\ncollision = pqc\n"));
    CHECK_THROWS(bad("just words\n"));
    CHECK_THROWS(bad("scheme = lw\nstream = adaptive\n"));
    CHECK_THROWS(load_config("/nonexistent/mrlbm.cfg"));
}

TEST_CASE("effective gamma")
{
    ExperimentConfig c;
    c.scheme = StencilKind::haar;
    CHECK(c.effective_gamma() == 0);
    c.scheme = StencilKind::lax_wendroff;
    CHECK(c.effective_gamma() == 1);
    c.scheme = StencilKind::generic;
    c.gamma  = 2;
    CHECK(c.effective_gamma() == 2);
}

TEST_CASE("dl = 0 reproduces the reference")
{
    for (const char* t : {"1", "2", "3a"})
    {
        for (auto k : {StencilKind::haar, StencilKind::gamma1, StencilKind::lax_wendroff})
        {
            const auto c = cfg(t, k, CollisionKind::lc, 8, 0);
            const auto r = run_experiment(c);
            CHECK(r.stable);
            CHECK(r.D_adap <= 1e-14);
            CHECK(r.E_adap_max == doctest::Approx(r.E_ref).epsilon(1e-10));
        }
        for (auto col : {CollisionKind::rc, CollisionKind::pqc})
        {
            const auto r = run_experiment(cfg(t, StencilKind::gamma1, col, 8, 0));
            // PQC on a nonlinear equilibrium differs by the O(h^2) quadrature of the collision
            CHECK(r.D_adap <= (col == CollisionKind::rc || std::string(t) != "3a" ? 1e-14 : 1e-5));
        }
    }
    const auto r2 = run_experiment(cfg("4", StencilKind::gamma1, CollisionKind::lc, 5, 0));
    CHECK(r2.D_adap <= 1e-14);
}

TEST_CASE("triangle bound and bookkeeping")
{
    for (const char* t : {"1", "2", "3b"})
    {
        for (auto k : {StencilKind::haar, StencilKind::gamma1, StencilKind::lax_wendroff})
        {
            const auto c = cfg(t, k, CollisionKind::lc, 9, 3);
            const auto r = run_experiment(c);
            CHECK(r.stable);
            CHECK(r.E_ref > 0);
            CHECK(r.D_adap > 0);
            CHECK(r.E_adap_max <= r.E_ref + r.D_adap + 1e-12);
            CHECK(r.E_ref <= r.E_adap_max + r.D_adap + 1e-12);
            const auto p = make_problem(t);
            CHECK(r.steps == std::lround(p.T * p.lambda / p.domain.dx(9)));
            CHECK(r.t_final == doctest::Approx(r.steps * p.domain.dx(9) / p.lambda));
            CHECK(r.final_leaves == static_cast<std::size_t>(p.domain.count(6)[0]));
        }
    }
}

TEST_CASE("determinism")
{
    auto c         = cfg("3b", StencilKind::gamma1, CollisionKind::pqc, 8, 2);
    const auto a   = run_experiment(c);
    clear_reference_cache();
    const auto b   = run_experiment(c);
    CHECK(row(c, a) == row(c, b));
    CHECK(a.D_adap == b.D_adap);
    c.adapt = true;
    c.L_min = 4;
    const auto x = run_experiment(c);
    const auto y = run_experiment(c);
    CHECK(row(c, x) == row(c, y));
    CHECK(x.final_leaves == y.final_leaves);
}

TEST_CASE("flattened and adaptive stream modes agree")
{
    auto c     = cfg("2", StencilKind::gamma1, CollisionKind::lc, 8, 3);
    const auto a = run_experiment(c);
    c.stream   = StreamMode::adaptive;
    const auto b = run_experiment(c);
    CHECK(std::abs(a.D_adap - b.D_adap) <= 1e-10 * a.D_adap);
}

TEST_CASE("csv output")
{
    std::ostringstream os;
    write_report_header(os, false);
    CHECK(os.str() == "test,scheme,collision,gamma,L_max,L_min,E_ref,E_adap_min,E_adap_max,D_adap,rate_ref,rate_D\n");
    ErrorReport r;
    r.E_ref = 1.23743e-5, r.D_adap = 0;
    const auto c = cfg("1", StencilKind::gamma1, CollisionKind::lc, 12, 2);
    CHECK(row(c, r).rfind("1,gamma1,lc,1,12,10,1.23743e-05,", 0) == 0);
}

TEST_CASE("table grids")
{
    const auto ids = table_ids();
    CHECK(ids.size() == 10);
    const auto t2 = table_spec("T2", false);
    CHECK(t2.rows.size() == 8);
    CHECK(t2.columns.size() == 3);
    CHECK(t2.rows.front() == std::pair{11, 11});
    const auto t1b = table_spec("T1b", false);
    CHECK(t1b.rows.front().first == 3);
    CHECK(t1b.rows.back().first == 12);
    CHECK(t1b.rows_vary_L_max);
    for (const auto& [L, l] : t1b.rows)
    {
        CHECK(L - l == 2);
    }
    CHECK(table_spec("T4", true).rows.front().first == 7);
    CHECK(table_spec("T4", false).rows.front().first == 9);
    CHECK_THROWS(table_spec("T9", false));
}

TEST_CASE("dumps")
{
    auto c        = cfg("2", StencilKind::gamma1, CollisionKind::lc, 6, 2);
    c.dump_every  = 64;
    c.dump_prefix = "harness_dump";
    const auto r  = run_experiment(c);
    std::ifstream f0("harness_dump.0.txt"), f1("harness_dump.64.txt");
    CHECK(f0.good());
    CHECK(f1.good());
    std::remove("harness_dump.0.txt");
    for (int s = 64; s <= r.steps; s += 64)
    {
        std::remove(("harness_dump." + std::to_string(s) + ".txt").c_str());
    }
}

TEST_CASE("small-run calibration: test 1, s = 2, dl = 2, L = 10")
{
    const auto r = run_experiment(cfg("1", StencilKind::gamma1, CollisionKind::lc, 10, 2));
    CHECK(r.D_adap == doctest::Approx(1.41e-4).epsilon(0.05));
}
