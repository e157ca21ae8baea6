#pragma once

#include "mrlbm/transport.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mrlbm
{
    struct OrderCheck
    {
        int px = 0, py = 0;
        Rational computed;
        Rational target;
        bool pass = false;
    };

    struct MatchReport
    {
        std::string scheme;
        int d = 1;
        IVec c{0, 0};
        int dl = 0;
        bool zero_sum = false;
        std::vector<OrderCheck> checks;
        // Largest s with zero sum and every checked order <= s passing (1D: 0..5; 2D: total order).
        int max_order = 0;

        const OrderCheck* find(int px, int py = 0) const;
        // First failing check in increasing order, nullptr if none.
        const OrderCheck* witness() const;
    };

    Rational moment_sum(const Stencil& s, int p);
    Rational moment_sum_2d(const Stencil& s, int px, int py);
    // (-c)^p / 2^{dl (p-1)}
    Rational match_target(int c, int dl, int p);
    // (-cx)^px (-cy)^py / 2^{dl (px+py-2)}
    Rational match_target_2d(const IVec& c, int dl, int px, int py);

    // p = 1..5 and the zero-sum condition.
    MatchReport match_order(const Stencil& s, int c, int dl);
    // px, py <= 3 plus the zero-sum condition; the pure (4,0) term is appended as an extra check.
    MatchReport match_order_2d(const Stencil& s, const IVec& c, int dl);

    struct ColumnCheck
    {
        int s = 0, j = 0;
        Rational computed;
        Rational expected;
        bool pass = false;
    };
    // sum_m m^s P_{m+2,j} = 2^{1-s} (j-2)^s for s = 0..3, j = 0..4.
    std::vector<ColumnCheck> p_column_lemma_check();

    void write_csv_header(std::ostream& os);
    void write_csv(const MatchReport& r, std::ostream& os);
    void write_text(const MatchReport& r, std::ostream& os);
}
