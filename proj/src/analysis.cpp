#include "mrlbm/analysis.hpp"

#include <algorithm>
#include <ostream>

namespace mrlbm
{
    const OrderCheck* MatchReport::find(int px, int py) const
    {
        for (const auto& c : checks)
        {
            if (c.px == px && c.py == py)
            {
                return &c;
            }
        }
        return nullptr;
    }

    const OrderCheck* MatchReport::witness() const
    {
        const OrderCheck* best = nullptr;
        for (const auto& c : checks)
        {
            if (!c.pass && (!best || c.px + c.py < best->px + best->py))
            {
                best = &c;
            }
        }
        return best;
    }

    Rational moment_sum(const Stencil& s, int p)
    {
        Rational r = 0;
        for (int m = -2; m <= 2; ++m)
        {
            r += ipow(Rational(m), p) * s.at(m);
        }
        return r;
    }

    Rational moment_sum_2d(const Stencil& s, int px, int py)
    {
        Rational r = 0;
        for (int n = -2; n <= 2; ++n)
        {
            for (int m = -2; m <= 2; ++m)
            {
                const Rational& w = s.at(m, n);
                if (w != 0)
                {
                    r += ipow(Rational(m), px) * ipow(Rational(n), py) * w;
                }
            }
        }
        return r;
    }

    Rational match_target(int c, int dl, int p)
    {
        return ipow(Rational(-c), p) * pow2(-dl * (p - 1));
    }

    Rational match_target_2d(const IVec& c, int dl, int px, int py)
    {
        return ipow(Rational(-c[0]), px) * ipow(Rational(-c[1]), py) * pow2(-dl * (px + py - 2));
    }

    MatchReport match_order(const Stencil& s, int c, int dl)
    {
        MatchReport r;
        r.scheme   = to_string(s.kind);
        r.c        = {c, 0};
        r.dl       = dl;
        r.zero_sum = s.sum() == 0;
        bool ok    = r.zero_sum;
        for (int p = 1; p <= 5; ++p)
        {
            OrderCheck oc;
            oc.px       = p;
            oc.computed = moment_sum(s, p);
            oc.target   = match_target(c, dl, p);
            oc.pass     = oc.computed == oc.target;
            ok          = ok && oc.pass;
            if (ok)
            {
                r.max_order = p;
            }
            r.checks.push_back(oc);
        }
        return r;
    }

    MatchReport match_order_2d(const Stencil& s, const IVec& c, int dl)
    {
        MatchReport r;
        r.scheme   = to_string(s.kind);
        r.d        = 2;
        r.c        = c;
        r.dl       = dl;
        r.zero_sum = s.sum() == 0;
        for (int py = 0; py <= 3; ++py)
        {
            for (int px = 0; px <= 3; ++px)
            {
                if (px + py == 0)
                {
                    continue;
                }
                OrderCheck oc;
                oc.px       = px;
                oc.py       = py;
                oc.computed = moment_sum_2d(s, px, py);
                oc.target   = match_target_2d(c, dl, px, py);
                oc.pass     = oc.computed == oc.target;
                r.checks.push_back(oc);
            }
        }
        // total order s counts when every checked (px, py) with px + py <= s passes
        r.max_order = 0;
        if (r.zero_sum)
        {
            for (int tot = 1; tot <= 6; ++tot)
            {
                bool ok = std::all_of(r.checks.begin(), r.checks.end(), [&](const OrderCheck& oc) { return oc.px + oc.py != tot || oc.pass; });
                if (!ok)
                {
                    break;
                }
                r.max_order = tot;
            }
        }
        OrderCheck pure;
        pure.px       = 4;
        pure.py       = 0;
        pure.computed = moment_sum_2d(s, 4, 0);
        pure.target   = match_target_2d(c, dl, 4, 0);
        pure.pass     = pure.computed == pure.target;
        r.checks.push_back(pure);
        if (!pure.pass)
        {
            r.max_order = std::min(r.max_order, 3);
        }
        return r;
    }

    std::vector<ColumnCheck> p_column_lemma_check()
    {
        const auto& P = recurrence_matrix();
        std::vector<ColumnCheck> out;
        for (int s = 0; s <= 3; ++s)
        {
            for (int j = 0; j <= 4; ++j)
            {
                ColumnCheck c;
                c.s = s;
                c.j = j;
                c.computed = 0;
                for (int m = -2; m <= 2; ++m)
                {
                    c.computed += ipow(Rational(m), s) * P[m + 2][j];
                }
                c.expected = pow2(1 - s) * ipow(Rational(j - 2), s);
                c.pass     = c.computed == c.expected;
                out.push_back(c);
            }
        }
        return out;
    }

    void write_csv_header(std::ostream& os)
    {
        os << "scheme,d,cx,cy,dl,px,py,computed,target,pass,max_order\n";
    }

    void write_csv(const MatchReport& r, std::ostream& os)
    {
        for (const auto& c : r.checks)
        {
            os << r.scheme << ',' << r.d << ',' << r.c[0] << ',' << r.c[1] << ',' << r.dl << ',' << c.px << ',' << c.py << ','
               << to_dyadic_string(c.computed) << ',' << to_dyadic_string(c.target) << ',' << (c.pass ? 1 : 0) << ',' << r.max_order
               << '\n';
        }
    }

    void write_text(const MatchReport& r, std::ostream& os)
    {
        os << r.scheme << " c=(" << r.c[0];
        if (r.d == 2)
        {
            os << ',' << r.c[1];
        }
        os << ") dl=" << r.dl << " zero-sum " << (r.zero_sum ? "ok" : "FAIL") << " matched order " << r.max_order;
        if (const auto* w = r.witness())
        {
            os << "; first failure p=" << w->px;
            if (r.d == 2)
            {
                os << ',' << w->py;
            }
            os << ": " << to_dyadic_string(w->computed) << " vs " << to_dyadic_string(w->target);
        }
        os << '\n';
    }
}
