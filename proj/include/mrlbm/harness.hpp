#pragma once

#include "mrlbm/adaptation.hpp"
#include "mrlbm/collision.hpp"
#include "mrlbm/problems.hpp"
#include "mrlbm/transport.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mrlbm
{
    enum class StreamMode
    {
        flattened,
        adaptive
    };

    struct ExperimentConfig
    {
        std::string test          = "2";
        StencilKind scheme        = StencilKind::gamma1;
        CollisionKind collision   = CollisionKind::lc;
        int gamma                 = 1; // only read for the generic scheme
        int L_max                 = 11;
        int L_min                 = 11;
        bool adapt                = false;
        AdaptParams adapt_params;  // l_min / l_max overwritten from L_min / L_max
        double s                  = 2.0; // test 1 relaxation rate
        StreamMode stream         = StreamMode::flattened;
        std::string out;
        int dump_every            = 0;
        std::string dump_prefix   = "dump";

        // Prediction order used by halos, reconstruction and details.
        int effective_gamma() const;
        void validate() const;
    };

    struct ErrorReport
    {
        double E_ref      = 0;
        double E_adap_min = 0;
        double E_adap_max = 0;
        double D_adap     = 0;
        int steps         = 0;
        double t_final    = 0;
        bool stable       = true;
        int fail_step     = -1;
        std::size_t final_leaves = 0;
        double seconds    = 0;
    };

    // Final state of a run, kept for inspection by tests and demos.
    struct RunState
    {
        HybridMesh mesh;
        Field field;
        std::vector<double> finest_m0; // reconstructed conserved moment at L_max
        std::vector<double> ref_m0;    // reference run at L_max
        std::vector<double> exact;     // exact solution at L_max centers, t_final
    };

    // Sum|u - v| / Sum|v|; NaN when Sum|v| = 0 or the sizes differ.
    double norm_l1(const std::vector<double>& u, const std::vector<double>& v);
    // log2(prev / curr); NaN where undefined.
    std::vector<double> order_estimate(const std::vector<double>& values);

    ErrorReport run_experiment(const ExperimentConfig& cfg, RunState* state = nullptr);
    void clear_reference_cache();

    // Threads used by table runs: hardware threads, capped by MRLBM_THREADS.
    int thread_budget();

    struct TableColumn
    {
        StencilKind scheme;
        CollisionKind collision;
        std::vector<double> bench_D; // per row, NaN when not tabulated
    };

    struct TableSpec
    {
        std::string id;
        std::string test;
        double s = 2.0;
        std::vector<std::pair<int, int>> rows; // (L_max, L_min)
        std::vector<TableColumn> columns;
        bool rows_vary_L_max = false;
    };

    std::vector<std::string> table_ids();
    TableSpec table_spec(const std::string& id, bool scale_down);

    struct TableRow
    {
        ExperimentConfig cfg;
        ErrorReport report;
        double rate_ref = 0, rate_D = 0, bench_D = 0, rel_dev = 0;
    };
    std::vector<TableRow> reproduce_table(const TableSpec& spec);

    void write_report_header(std::ostream& os, bool with_bench);
    void write_report_row(std::ostream& os, const ExperimentConfig& cfg, const ErrorReport& r, double rate_ref, double rate_D);
    void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows);

    // `key = value` lines with `#` comments.
    ExperimentConfig parse_config(std::istream& is);
    ExperimentConfig load_config(const std::string& path);
}
