#include "mrlbm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mrlbm
{
    namespace
    {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();

        PredictionOperator operator_for(const ExperimentConfig& cfg)
        {
            return derive_prediction_weights(cfg.effective_gamma());
        }

        int halo_for(int gamma)
        {
            return std::max(2, 1 + 2 * gamma);
        }

        // Equilibrium distributions carrying u at every cell.
        void init_equilibrium(const SchemeSpec& spec, double u, double* f)
        {
            double meq[16] = {};
            double cons[16] = {};
            cons[0]         = u;
            spec.eq(cons, meq);
            spec.from_moments(meq, f);
        }

        double m0_of(const SchemeSpec& spec, const double* f)
        {
            double cons[16];
            spec.conserved(f, cons);
            return cons[0];
        }

        std::vector<double> exact_at_level(const ProblemSpec& p, int level, double t)
        {
            const IVec n = p.domain.count(level);
            std::vector<double> v;
            v.reserve(static_cast<std::size_t>(n[0]) * n[1]);
            for (int k1 = 0; k1 < n[1]; ++k1)
            {
                for (int k0 = 0; k0 < n[0]; ++k0)
                {
                    const auto x = cell_center({level, {k0, k1}}, p.domain);
                    v.push_back(p.exact(t, x[0], p.d == 2 ? x[1] : 0.0));
                }
            }
            return v;
        }

        // Averages a finest-level scalar field onto level l.
        std::vector<double> restrict_to(const std::vector<double>& fine, IVec nf, int dl, int d)
        {
            const int b  = 1 << dl;
            const int by = d == 2 ? b : 1;
            IVec nc{nf[0] / b, d == 2 ? nf[1] / b : 1};
            std::vector<double> out(static_cast<std::size_t>(nc[0]) * nc[1], 0.0);
            const double inv = 1.0 / (static_cast<double>(b) * by);
            for (int k1 = 0; k1 < nf[1]; ++k1)
            {
                for (int k0 = 0; k0 < nf[0]; ++k0)
                {
                    out[static_cast<std::size_t>(k1 / by) * nc[0] + k0 / b] += fine[static_cast<std::size_t>(k1) * nf[0] + k0] * inv;
                }
            }
            return out;
        }

        bool all_finite(const std::vector<double>& v)
        {
            return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        }

        bool leaves_finite(const HybridMesh& mesh, const Field& f)
        {
            for (const auto& c : mesh.leaves())
            {
                const double* v = f.at(c);
                for (int a = 0; a < f.q(); ++a)
                {
                    if (!std::isfinite(v[a]))
                    {
                        return false;
                    }
                }
            }
            return true;
        }

        struct Reference
        {
            std::vector<double> m0;
            int steps = 0;
            double t  = 0;
            bool stable   = true;
            int fail_step = -1;
        };

        std::mutex ref_mutex;
        std::map<std::string, std::shared_ptr<const Reference>> ref_cache;

        std::string ref_key(const ExperimentConfig& cfg)
        {
            std::ostringstream k;
            k << cfg.test << '|' << cfg.L_max;
            if (cfg.test == "1")
            {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", cfg.s);
                k << '|' << buf;
            }
            return k.str();
        }

        std::shared_ptr<const Reference> compute_reference(const ProblemSpec& p, const SchemeSpec& spec, int L, int steps)
        {
            auto ref    = std::make_shared<Reference>();
            const IVec n = p.domain.count(L);
            UniformState st(L, n, spec.q()), scratch(L, n, spec.q());
            for (int k1 = 0; k1 < n[1]; ++k1)
            {
                for (int k0 = 0; k0 < n[0]; ++k0)
                {
                    const auto x = cell_center({L, {k0, k1}}, p.domain);
                    init_equilibrium(spec, p.initial(x[0], p.d == 2 ? x[1] : 0.0), st.at(k0, k1));
                }
            }
            for (int it = 0; it < steps; ++it)
            {
                reference_step_inplace(st, scratch, spec, p.policy);
                if ((it & 63) == 63 && !all_finite(st.values))
                {
                    ref->stable    = false;
                    ref->fail_step = it + 1;
                    break;
                }
            }
            if (ref->stable && !all_finite(st.values))
            {
                ref->stable    = false;
                ref->fail_step = steps;
            }
            ref->m0.resize(st.cells());
            for (std::size_t i = 0; i < st.cells(); ++i)
            {
                ref->m0[i] = m0_of(spec, st.values.data() + i * spec.q());
            }
            ref->steps = steps;
            ref->t     = steps * p.domain.dx(L) / p.lambda;
            return ref;
        }

        std::shared_ptr<const Reference> get_reference(const ExperimentConfig& cfg, const ProblemSpec& p, const SchemeSpec& spec,
                                                       int steps)
        {
            const std::string key = ref_key(cfg);
            {
                std::lock_guard<std::mutex> lock(ref_mutex);
                auto it = ref_cache.find(key);
                if (it != ref_cache.end())
                {
                    return it->second;
                }
            }
            auto ref = compute_reference(p, spec, cfg.L_max, steps);
            std::lock_guard<std::mutex> lock(ref_mutex);
            return ref_cache.emplace(key, ref).first->second;
        }

        void write_dump(const ExperimentConfig& cfg, const HybridMesh& mesh, const Field& f, int step)
        {
            std::ostringstream name;
            name << cfg.dump_prefix << '.' << step << ".txt";
            std::ofstream os(name.str());
            if (!os)
            {
                throw std::runtime_error("cannot write dump " + name.str());
            }
            dump(mesh, f, os);
        }

        double round_sig(double v)
        {
            if (!std::isfinite(v))
            {
                return v;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.5e", v);
            return std::strtod(buf, nullptr);
        }

        std::string fmt(double v)
        {
            if (std::isnan(v))
            {
                return "nan";
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.5e", v);
            return buf;
        }
    }

    int ExperimentConfig::effective_gamma() const
    {
        switch (scheme)
        {
            case StencilKind::haar:
                return 0;
            case StencilKind::gamma1:
            case StencilKind::lax_wendroff:
                return 1;
            case StencilKind::generic:
                return gamma;
        }
        return gamma;
    }

    void ExperimentConfig::validate() const
    {
        if (test != "1" && test != "2" && test != "3a" && test != "3b" && test != "4")
        {
            throw std::invalid_argument("unknown test: " + test);
        }
        if (L_min > L_max)
        {
            throw std::invalid_argument("L_min > L_max");
        }
        if (scheme == StencilKind::generic && (gamma < 0 || gamma > 2))
        {
            throw std::invalid_argument("gamma must be 0, 1 or 2");
        }
        if (stream == StreamMode::adaptive && scheme == StencilKind::lax_wendroff)
        {
            throw std::invalid_argument("the Lax-Wendroff scheme has no reconstruction stream");
        }
        if (collision != CollisionKind::lc && effective_gamma() == 0 && collision == CollisionKind::pqc)
        {
            throw std::invalid_argument("PQC needs gamma >= 1");
        }
        if (dump_every < 0)
        {
            throw std::invalid_argument("dump_every must be >= 0");
        }
        if (adapt)
        {
            AdaptParams ap = adapt_params;
            ap.l_min       = L_min;
            ap.l_max       = L_max;
            ap.validate();
        }
    }

    double norm_l1(const std::vector<double>& u, const std::vector<double>& v)
    {
        if (u.size() != v.size())
        {
            return nan;
        }
        double num = 0, den = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            num += std::abs(u[i] - v[i]);
            den += std::abs(v[i]);
        }
        return den > 0 ? num / den : nan;
    }

    std::vector<double> order_estimate(const std::vector<double>& values)
    {
        std::vector<double> out;
        for (std::size_t i = 1; i < values.size(); ++i)
        {
            const double a = values[i - 1], b = values[i];
            out.push_back(a > 0 && b > 0 && std::isfinite(a) && std::isfinite(b) ? std::log2(a / b) : nan);
        }
        return out;
    }

    void clear_reference_cache()
    {
        std::lock_guard<std::mutex> lock(ref_mutex);
        ref_cache.clear();
    }

    ErrorReport run_experiment(const ExperimentConfig& cfg, RunState* state)
    {
        cfg.validate();
        const auto t_start = std::chrono::steady_clock::now();
        const ProblemSpec p  = make_problem(cfg.test, cfg.s);
        const int L          = cfg.L_max;
        const double dx      = p.domain.dx(L);
        const SchemeSpec spec = build_scheme(p, dx);
        const int q          = spec.q();
        const int steps      = static_cast<int>(std::lround(p.T * p.lambda / dx));
        const BoundaryPolicy policy = p.policy;

        const auto ref = get_reference(cfg, p, spec, steps);

        const PredictionOperator op = operator_for(cfg);
        const int gamma             = op.gamma;
        const int lo                = cfg.L_min;
        HybridMesh mesh = cfg.adapt ? uniform_mesh(L, L, p.domain, halo_for(gamma), lo) : uniform_mesh(lo, L, p.domain, halo_for(gamma), lo);
        Field cur(mesh, q), nxt(mesh, q);
        for (const auto& c : mesh.leaves())
        {
            const auto x = cell_center(c, p.domain);
            init_equilibrium(spec, p.initial(x[0], p.d == 2 ? x[1] : 0.0), cur.at(c));
        }

        AdaptParams ap = cfg.adapt_params;
        ap.l_min       = lo;
        ap.l_max       = L;
        if (cfg.adapt)
        {
            // adapt the initial datum to a fixpoint
            for (int r = 0; r < 4 * (L - lo + 1); ++r)
            {
                const auto res = adapt_mesh(mesh, cur, ap, op, policy);
                if (res.refined == 0 && res.coarsened == 0)
                {
                    break;
                }
            }
        }

        std::unique_ptr<StencilTable> table;
        if (cfg.stream == StreamMode::flattened)
        {
            table = std::make_unique<StencilTable>(cfg.scheme, op, spec.velocities, L - lo);
        }
        ReconstructionCache cache(op);
        const QuadratureRule unit_rule = to_unit_cell(gauss_legendre(3));

        ErrorReport rep;
        rep.steps = steps;
        rep.t_final = steps * dx / p.lambda;
        if (cfg.dump_every > 0)
        {
            write_dump(cfg, mesh, cur, 0);
        }
        for (int it = 0; it < steps; ++it)
        {
            if (cfg.adapt)
            {
                adapt_mesh(mesh, cur, ap, op, policy);
            }
            switch (cfg.collision)
            {
                case CollisionKind::lc:
                    collide_lc(mesh, cur, spec);
                    break;
                case CollisionKind::rc:
                    fill_halos(mesh, cur, policy, op.wd);
                    collide_rc(mesh, cur, nxt, spec, cache, policy);
                    std::swap(cur, nxt);
                    break;
                case CollisionKind::pqc:
                    fill_halos(mesh, cur, policy, op.wd);
                    collide_pqc(mesh, cur, nxt, spec, unit_rule, gamma, policy);
                    std::swap(cur, nxt);
                    break;
            }
            fill_halos(mesh, cur, policy, op.wd);
            if (table)
            {
                flattened_stream(mesh, cur, nxt, *table, q, policy);
            }
            else
            {
                adaptive_stream(mesh, cur, nxt, cache, spec.velocities, policy);
            }
            std::swap(cur, nxt);
            if ((it & 63) == 63 && !leaves_finite(mesh, cur))
            {
                rep.stable    = false;
                rep.fail_step = it + 1;
                break;
            }
            if (cfg.dump_every > 0 && (it + 1) % cfg.dump_every == 0)
            {
                write_dump(cfg, mesh, cur, it + 1);
            }
        }
        if (rep.stable && !leaves_finite(mesh, cur))
        {
            rep.stable    = false;
            rep.fail_step = steps;
        }
        if (!ref->stable)
        {
            rep.stable    = false;
            rep.fail_step = ref->fail_step;
        }

        fill_halos(mesh, cur, policy, op.wd);
        const UniformState fine = reconstruct_finest(mesh, cur, cache, policy);
        std::vector<double> m0(fine.cells());
        for (std::size_t i = 0; i < fine.cells(); ++i)
        {
            m0[i] = m0_of(spec, fine.values.data() + i * q);
        }
        const auto exact_fine = exact_at_level(p, L, rep.t_final);
        const auto exact_lo   = exact_at_level(p, lo, rep.t_final);
        rep.E_ref      = norm_l1(ref->m0, exact_fine);
        rep.E_adap_max = norm_l1(m0, exact_fine);
        rep.E_adap_min = norm_l1(restrict_to(m0, fine.n, L - lo, p.d), exact_lo);
        rep.D_adap     = norm_l1(m0, ref->m0);
        rep.final_leaves = mesh.num_leaves();
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        if (state)
        {
            state->mesh      = mesh;
            state->field     = cur;
            state->finest_m0 = std::move(m0);
            state->ref_m0    = ref->m0;
            state->exact     = exact_fine;
        }
        return rep;
    }

    int thread_budget()
    {
        int n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0)
        {
            n = 1;
        }
        if (const char* env = std::getenv("MRLBM_THREADS"))
        {
            const int cap = std::atoi(env);
            if (cap >= 1)
            {
                n = std::min(n, cap);
            }
        }
        return n;
    }

    std::vector<std::string> table_ids()
    {
        return {"T1a", "T1b", "T1c", "T1d", "T2", "T3a", "T3b", "T4", "T-coll-a", "T-coll-b"};
    }

    TableSpec table_spec(const std::string& id, bool scale_down)
    {
        TableSpec t;
        t.id = id;
        auto three = [&](std::vector<double> g0, std::vector<double> g1, std::vector<double> lw)
        {
            t.columns = {{StencilKind::haar, CollisionKind::lc, std::move(g0)},
                         {StencilKind::gamma1, CollisionKind::lc, std::move(g1)},
                         {StencilKind::lax_wendroff, CollisionKind::lc, std::move(lw)}};
        };
        auto by_level = [&](int first, int last, int dl)
        {
            t.rows_vary_L_max = true;
            for (int L = first; L <= last; ++L)
            {
                t.rows.push_back({L, L - dl});
            }
        };
        auto by_gap = [&](int L, int dl_max)
        {
            for (int dl = 0; dl <= dl_max; ++dl)
            {
                t.rows.push_back({L, L - dl});
            }
        };
        // pads a benchmark list that starts at row `offset`
        auto pad = [](std::size_t offset, std::vector<double> v, std::size_t n)
        {
            std::vector<double> out(offset, nan);
            out.insert(out.end(), v.begin(), v.end());
            out.resize(n, nan);
            return out;
        };

        if (id == "T1a" || id == "T1b")
        {
            t.test = "1";
            t.s    = id == "T1a" ? 1.0 : 2.0;
            by_level(3, scale_down ? 10 : 12, 2);
            const std::size_t n = t.rows.size();
            if (id == "T1a")
            {
                three(pad(0, {}, n), pad(6, {7.26e-4, 1.04e-4, 1.24e-5, 2.27e-6}, n), pad(0, {}, n));
            }
            else
            {
                three(pad(0, {}, n), pad(4, {6.98e-2, 1.03e-2, 1.25e-3, 1.41e-4, 1.46e-5, 2.34e-6}, n),
                      pad(4, {2.11e-1, 5.67e-2, 1.44e-2, 3.60e-3, 9.00e-4, 2.25e-4}, n));
            }
        }
        else if (id == "T1c" || id == "T1d")
        {
            t.test = "1";
            t.s    = id == "T1c" ? 1.0 : 2.0;
            by_level(7, scale_down ? 10 : 12, 6);
            const std::size_t n = t.rows.size();
            const std::vector<double> g1 = id == "T1c" ? std::vector<double>{1.00, 1.09, 6.23e-1, 1.53e-1, 1.89e-2, 1.94e-3}
                                                       : std::vector<double>{1.07, 1.31, 7.65e-1, 1.94e-1, 2.22e-2, 2.12e-3};
            three(pad(0, {}, n), pad(0, g1, n), pad(0, {}, n));
        }
        else if (id == "T2")
        {
            t.test = "2";
            by_gap(11, 7);
            three({0, 1.55e-2, 4.52e-2, 9.94e-2, 1.92e-1, 3.34e-1, 5.26e-1, 7.48e-1},
                  {0, 7.88e-7, 3.41e-6, 1.31e-5, 5.40e-5, 2.78e-4, 1.74e-3, 1.89e-2},
                  {0, 3.63e-5, 1.82e-4, 7.63e-4, 3.09e-3, 1.24e-2, 5.03e-2, 2.15e-1});
        }
        else if (id == "T3a")
        {
            t.test = "3a";
            by_gap(11, 7);
            three({0, 9.99e-4, 2.99e-3, 6.95e-3, 1.48e-2, 3.00e-2, 5.90e-2, 1.12e-1},
                  {0, 1.88e-7, 9.34e-7, 3.89e-6, 1.57e-5, 6.30e-5, 2.60e-4, 1.18e-3},
                  {0, 1.60e-6, 8.02e-6, 3.37e-5, 1.36e-4, 5.48e-4, 2.20e-3, 9.08e-3});
        }
        else if (id == "T3b")
        {
            t.test = "3b";
            by_gap(11, 7);
            three({0, 1.16e-3, 3.41e-3, 7.76e-3, 1.64e-2, 3.34e-2, 6.57e-2, 1.25e-1},
                  {0, 3.47e-6, 2.34e-5, 1.41e-4, 8.63e-4, 6.08e-3, 3.37e-2, 2.42e-1},
                  {0, 2.72e-5, 1.38e-4, 6.17e-4, 3.54e-3, 1.70e-2, 1.04e-1, 8.19e-1});
        }
        else if (id == "T4")
        {
            t.test = "4";
            if (scale_down)
            {
                by_gap(7, 4);
                three(pad(0, {}, 5), pad(0, {}, 5), pad(0, {}, 5));
            }
            else
            {
                by_gap(9, 6);
                three({0, 2.79e-2, 8.06e-2, 1.75e-1, 3.29e-1, 5.51e-1, 8.26e-1}, {0, 9.42e-5, 3.89e-4, 1.62e-3, 7.49e-3, 4.94e-2, 5.14e-1},
                      {0, 8.20e-4, 4.09e-3, 1.71e-2, 6.90e-2, 2.82e-1, 1.04});
            }
        }
        else if (id == "T-coll-a" || id == "T-coll-b")
        {
            const bool a = id == "T-coll-a";
            t.test       = a ? "3a" : "3b";
            by_gap(11, 7);
            std::vector<double> lc = a ? std::vector<double>{0, 1.88e-7, 9.34e-7, 3.89e-6, 1.57e-5, 6.30e-5, 2.60e-4, 1.18e-3}
                                       : std::vector<double>{0, 3.47e-6, 2.34e-5, 1.41e-4, 8.63e-4, 6.08e-3, 3.37e-2, 2.42e-1};
            std::vector<double> rc = a ? std::vector<double>{0, 1.14e-7, 5.70e-7, 2.40e-6, 9.78e-6, 4.06e-5, 1.86e-4, 9.97e-4}
                                       : std::vector<double>{0, 2.79e-6, 2.28e-5, 1.43e-4, 8.93e-4, 5.73e-3, 3.14e-2, 2.23e-1};
            std::vector<double> pq = a ? std::vector<double>{5.18e-8, 1.27e-7, 5.76e-7, 2.41e-6, 9.79e-6, 4.06e-5, 1.86e-4, 9.98e-4}
                                       : std::vector<double>{1.19e-6, 3.02e-6, 2.29e-5, 1.43e-4, 8.93e-4, 5.76e-3, 3.15e-2, 2.19e-1};
            t.columns = {{StencilKind::gamma1, CollisionKind::lc, lc},
                         {StencilKind::gamma1, CollisionKind::rc, rc},
                         {StencilKind::gamma1, CollisionKind::pqc, pq}};
        }
        else
        {
            throw std::invalid_argument("unknown table id: " + id);
        }
        return t;
    }

    std::vector<TableRow> reproduce_table(const TableSpec& spec)
    {
        std::vector<TableRow> rows;
        for (const auto& col : spec.columns)
        {
            for (std::size_t r = 0; r < spec.rows.size(); ++r)
            {
                TableRow row;
                row.cfg.test      = spec.test;
                row.cfg.s         = spec.s;
                row.cfg.scheme    = col.scheme;
                row.cfg.collision = col.collision;
                row.cfg.L_max     = spec.rows[r].first;
                row.cfg.L_min     = spec.rows[r].second;
                row.bench_D       = r < col.bench_D.size() ? col.bench_D[r] : nan;
                rows.push_back(row);
            }
        }

        // references first so that workers share them
        std::vector<int> levels;
        for (const auto& r : spec.rows)
        {
            levels.push_back(r.first);
        }
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        {
            std::vector<std::future<void>> jobs;
            for (int L : levels)
            {
                ExperimentConfig c = rows.front().cfg;
                c.L_max            = L;
                jobs.push_back(std::async(std::launch::deferred,
                                          [c]
                                          {
                                              const ProblemSpec p = make_problem(c.test, c.s);
                                              const double dx     = p.domain.dx(c.L_max);
                                              get_reference(c, p, build_scheme(p, dx), static_cast<int>(std::lround(p.T * p.lambda / dx)));
                                          }));
            }
            for (auto& j : jobs)
            {
                j.get();
            }
        }

        const int nthreads = std::max(1, std::min<int>(thread_budget(), static_cast<int>(rows.size())));
        if (nthreads == 1)
        {
            for (auto& r : rows)
            {
                r.report = run_experiment(r.cfg);
            }
        }
        else
        {
            std::mutex m;
            std::size_t next = 0;
            std::vector<std::thread> pool;
            std::exception_ptr err;
            for (int t = 0; t < nthreads; ++t)
            {
                pool.emplace_back(
                    [&]
                    {
                        for (;;)
                        {
                            std::size_t i;
                            {
                                std::lock_guard<std::mutex> lock(m);
                                if (next >= rows.size() || err)
                                {
                                    return;
                                }
                                i = next++;
                            }
                            try
                            {
                                rows[i].report = run_experiment(rows[i].cfg);
                            }
                            catch (...)
                            {
                                std::lock_guard<std::mutex> lock(m);
                                err = std::current_exception();
                            }
                        }
                    });
            }
            for (auto& th : pool)
            {
                th.join();
            }
            if (err)
            {
                std::rethrow_exception(err);
            }
        }

        const std::size_t nr = spec.rows.size();
        for (std::size_t c = 0; c < spec.columns.size(); ++c)
        {
            std::vector<double> eref, dad;
            for (std::size_t r = 0; r < nr; ++r)
            {
                eref.push_back(round_sig(rows[c * nr + r].report.E_ref));
                dad.push_back(round_sig(rows[c * nr + r].report.D_adap));
            }
            const auto re = order_estimate(eref);
            const auto rd = order_estimate(dad);
            for (std::size_t r = 0; r < nr; ++r)
            {
                TableRow& row = rows[c * nr + r];
                row.rate_ref  = spec.rows_vary_L_max && r > 0 ? re[r - 1] : nan;
                row.rate_D    = spec.rows_vary_L_max && r > 0 ? rd[r - 1] : nan;
                row.rel_dev   = std::isfinite(row.bench_D) && row.bench_D > 0 ? row.report.D_adap / row.bench_D - 1.0 : nan;
            }
        }
        return rows;
    }

    void write_report_header(std::ostream& os, bool with_bench)
    {
        os << "test,scheme,collision,gamma,L_max,L_min,E_ref,E_adap_min,E_adap_max,D_adap,rate_ref,rate_D";
        if (with_bench)
        {
            os << ",bench_D_adap,rel_dev";
        }
        os << '\n';
    }

    void write_report_row(std::ostream& os, const ExperimentConfig& cfg, const ErrorReport& r, double rate_ref, double rate_D)
    {
        os << cfg.test << ',' << to_string(cfg.scheme) << ',' << to_string(cfg.collision) << ',' << cfg.effective_gamma() << ','
           << cfg.L_max << ',' << cfg.L_min << ',' << fmt(r.E_ref) << ',' << fmt(r.E_adap_min) << ',' << fmt(r.E_adap_max) << ','
           << fmt(r.D_adap) << ',' << fmt(rate_ref) << ',' << fmt(rate_D);
    }

    void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows)
    {
        write_report_header(os, true);
        for (const auto& r : rows)
        {
            write_report_row(os, r.cfg, r.report, r.rate_ref, r.rate_D);
            os << ',' << fmt(r.bench_D) << ',' << fmt(r.rel_dev) << '\n';
        }
    }

    namespace
    {
        std::string trim(const std::string& s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
            {
                return "";
            }
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        bool parse_bool(const std::string& v)
        {
            if (v == "1" || v == "true" || v == "on" || v == "yes")
            {
                return true;
            }
            if (v == "0" || v == "false" || v == "off" || v == "no")
            {
                return false;
            }
            throw std::invalid_argument("not a boolean: " + v);
        }

        int parse_int(const std::string& key, const std::string& v)
        {
            std::size_t pos = 0;
            const int r     = std::stoi(v, &pos);
            if (pos != v.size())
            {
                throw std::invalid_argument("bad integer for " + key + ": " + v);
            }
            return r;
        }

        double parse_double(const std::string& key, const std::string& v)
        {
            std::size_t pos = 0;
            const double r  = std::stod(v, &pos);
            if (pos != v.size())
            {
                throw std::invalid_argument("bad number for " + key + ": " + v);
            }
            return r;
        }
    }

    ExperimentConfig parse_config(std::istream& is)
    {
        ExperimentConfig c;
        bool have_lmin = false;
        int dl_min     = -1;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
            {
                line.resize(hash);
            }
            line = trim(line);
            if (line.empty())
            {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key == "test")
            {
                c.test = val;
            }
            else if (key == "scheme")
            {
                c.scheme = stencil_kind_from_string(val);
            }
            else if (key == "collision")
            {
                c.collision = collision_kind_from_string(val);
            }
            else if (key == "gamma")
            {
                c.gamma = parse_int(key, val);
            }
            else if (key == "L_max")
            {
                c.L_max = parse_int(key, val);
            }
            else if (key == "L_min")
            {
                c.L_min   = parse_int(key, val);
                have_lmin = true;
            }
            else if (key == "dl_min")
            {
                dl_min = parse_int(key, val);
            }
            else if (key == "adapt")
            {
                c.adapt = parse_bool(val);
            }
            else if (key == "epsilon")
            {
                c.adapt_params.epsilon = parse_double(key, val);
            }
            else if (key == "mu_bar")
            {
                c.adapt_params.mu_bar = parse_int(key, val);
            }
            else if (key == "s")
            {
                c.s = parse_double(key, val);
            }
            else if (key == "stream")
            {
                if (val == "flattened")
                {
                    c.stream = StreamMode::flattened;
                }
                else if (val == "adaptive")
                {
                    c.stream = StreamMode::adaptive;
                }
                else
                {
                    throw std::invalid_argument("stream must be flattened or adaptive");
                }
            }
            else if (key == "out")
            {
                c.out = val;
            }
            else if (key == "dump_every")
            {
                c.dump_every = parse_int(key, val);
            }
            else if (key == "dump_prefix")
            {
                c.dump_prefix = val;
            }
            else
            {
                throw std::invalid_argument("unknown config key: " + key);
            }
        }
        if (dl_min >= 0)
        {
            if (have_lmin)
            {
                throw std::invalid_argument("give either L_min or dl_min");
            }
            c.L_min = c.L_max - dl_min;
        }
        else if (!have_lmin)
        {
            c.L_min = c.L_max;
        }
        c.validate();
        return c;
    }

    ExperimentConfig load_config(const std::string& path)
    {
        std::ifstream is(path);
        if (!is)
        {
            throw std::runtime_error("cannot open config " + path);
        }
        return parse_config(is);
    }
}
