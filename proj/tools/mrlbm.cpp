#include "mrlbm/analysis.hpp"
#include "mrlbm/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mrlbm;

namespace
{
    std::vector<int> parse_ints(const std::string& s)
    {
        std::vector<int> v;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
        {
            v.push_back(std::stoi(tok));
        }
        return v;
    }

    // Writes to the file when a path is given, otherwise to stdout.
    template <class F>
    void emit(const std::string& path, F&& f)
    {
        if (path.empty())
        {
            f(std::cout);
            return;
        }
        std::ofstream os(path);
        if (!os)
        {
            throw std::runtime_error("cannot write " + path);
        }
        f(os);
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"Multiresolution lattice Boltzmann experiments"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one experiment");
    std::string config_path, out_path;
    std::string test, scheme, collision, stream;
    int L_max = -1, L_min = -1, dl_min = -1, gamma = -1, dump_every = -1, mu_bar = -1;
    double s = -1, epsilon = -1;
    bool adapt = false;
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--test", test, "1, 2, 3a, 3b or 4");
    run->add_option("--scheme", scheme, "haar|gamma0, gamma1, generic, lw");
    run->add_option("--collision", collision, "lc, rc or pqc");
    run->add_option("--stream", stream, "flattened or adaptive");
    run->add_option("--gamma", gamma, "prediction half-width for the generic scheme");
    run->add_option("--L-max,--l-max", L_max, "finest level");
    run->add_option("--L-min,--l-min", L_min, "coarsest level");
    run->add_option("--dl-min", dl_min, "L_max - L_min");
    run->add_option("--s", s, "test 1 relaxation rate");
    run->add_flag("--adapt", adapt, "detail-driven adaptation");
    run->add_option("--epsilon", epsilon, "adaptation threshold");
    run->add_option("--mu-bar", mu_bar, "regularity exponent of the refine threshold");
    run->add_option("--dump-every", dump_every, "dump the mesh every n steps");
    run->add_option("--out", out_path, "CSV output path");

    // table
    auto* table = app.add_subcommand("table", "Reproduce a table");
    std::string table_id, table_out;
    bool scale_down = false;
    table->add_option("--id", table_id, "table id")->required();
    table->add_flag("--scale-down", scale_down, "smaller grids");
    table->add_option("--out", table_out, "CSV output path");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Match-order report of a flattened stencil");
    std::string an_scheme = "gamma1", an_c = "1", an_out;
    int an_dl = 4;
    bool an_csv = false;
    analyze->add_option("--scheme", an_scheme, "haar, gamma1 or lw");
    analyze->add_option("--c", an_c, "velocity, e.g. 1 or 1,1");
    analyze->add_option("--dl", an_dl, "largest level gap");
    analyze->add_flag("--csv", an_csv, "CSV instead of text");
    analyze->add_option("--out", an_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            ExperimentConfig cfg;
            if (!config_path.empty())
            {
                cfg = load_config(config_path);
            }
            if (!test.empty())
            {
                cfg.test = test;
            }
            if (!scheme.empty())
            {
                cfg.scheme = stencil_kind_from_string(scheme);
            }
            if (!collision.empty())
            {
                cfg.collision = collision_kind_from_string(collision);
            }
            if (!stream.empty())
            {
                cfg.stream = stream == "adaptive" ? StreamMode::adaptive : StreamMode::flattened;
            }
            if (gamma >= 0)
            {
                cfg.gamma = gamma;
            }
            if (L_max >= 0)
            {
                const int gap = cfg.L_max - cfg.L_min;
                cfg.L_max     = L_max;
                cfg.L_min     = L_max - gap;
            }
            if (L_min >= 0)
            {
                cfg.L_min = L_min;
            }
            if (dl_min >= 0)
            {
                cfg.L_min = cfg.L_max - dl_min;
            }
            if (s > 0)
            {
                cfg.s = s;
            }
            if (adapt)
            {
                cfg.adapt = true;
            }
            if (epsilon > 0)
            {
                cfg.adapt_params.epsilon = epsilon;
            }
            if (mu_bar >= 0)
            {
                cfg.adapt_params.mu_bar = mu_bar;
            }
            if (dump_every >= 0)
            {
                cfg.dump_every = dump_every;
            }
            if (!out_path.empty())
            {
                cfg.out = out_path;
            }
            const ErrorReport r = run_experiment(cfg);
            if (!r.stable)
            {
                std::fprintf(stderr, "unstable: non-finite values at step %d\n", r.fail_step);
            }
            emit(cfg.out,
                 [&](std::ostream& os)
                 {
                     write_report_header(os, false);
                     write_report_row(os, cfg, r, std::nan(""), std::nan(""));
                     os << '\n';
                 });
            std::fprintf(stderr, "steps %d, t %.6g, leaves %zu, %.2f s\n", r.steps, r.t_final, r.final_leaves, r.seconds);
            return r.stable ? 0 : 2;
        }
        if (*table)
        {
            const auto rows = reproduce_table(table_spec(table_id, scale_down));
            emit(table_out, [&](std::ostream& os) { write_table_csv(os, rows); });
            return 0;
        }
        if (*analyze)
        {
            const StencilKind kind = stencil_kind_from_string(an_scheme);
            const auto cv          = parse_ints(an_c);
            const int d            = cv.size() >= 2 ? 2 : 1;
            const IVec c{cv.at(0), d == 2 ? cv[1] : 0};
            const int gamma_op = kind == StencilKind::haar ? 0 : 1;
            const auto op      = derive_prediction_weights(gamma_op);
            emit(an_out,
                 [&](std::ostream& os)
                 {
                     if (an_csv)
                     {
                         write_csv_header(os);
                     }
                     for (int dl = 0; dl <= an_dl; ++dl)
                     {
                         const Stencil st = make_stencil(kind, op, c, dl, d);
                         const MatchReport r = d == 2 ? match_order_2d(st, c, dl) : match_order(st, c[0], dl);
                         if (an_csv)
                         {
                             write_csv(r, os);
                         }
                         else
                         {
                             os << st.str() << '\n';
                             write_text(r, os);
                         }
                     }
                 });
            return 0;
        }
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
