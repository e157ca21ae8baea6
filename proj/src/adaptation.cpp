#include "mrlbm/adaptation.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace mrlbm
{
    void AdaptParams::validate() const
    {
        if (!(epsilon > 0 && epsilon < 1))
        {
            throw std::invalid_argument("epsilon must lie in (0,1)");
        }
        if (mu_bar < 0)
        {
            throw std::invalid_argument("mu_bar must be non-negative");
        }
        if (l_min > l_max)
        {
            throw std::invalid_argument("l_min > l_max");
        }
    }

    double AdaptParams::coarsen_threshold(int level, int d) const
    {
        return epsilon * std::ldexp(1.0, -d * (l_max - level));
    }

    double AdaptParams::refine_threshold(int level, int d) const
    {
        return epsilon * std::ldexp(1.0, -d * (l_max - level - 1) + mu_bar);
    }

    namespace
    {
        void predict_children(const HybridMesh& mesh, Field& field, const CellIndex& c, const std::vector<std::vector<double>>& cw, int g,
                              BoundaryPolicy policy)
        {
            const int d  = mesh.d();
            const int q  = field.q();
            const int gy = d == 2 ? g : 0;
            for (const auto& ch : children(c, d))
            {
                const auto& wx = cw[ch.k[0] & 1];
                const auto& wy = cw[ch.k[1] & 1];
                double v[16]   = {};
                for (int j = -gy; j <= gy; ++j)
                {
                    const double cy = d == 2 ? wy[j + g] : 1.0;
                    for (int i = -g; i <= g; ++i)
                    {
                        const double w = cy * wx[i + g];
                        if (w == 0.0)
                        {
                            continue;
                        }
                        const double* src = field.get(c.level, c.k[0] + i, c.k[1] + j, policy);
                        for (int a = 0; a < q; ++a)
                        {
                            v[a] += w * src[a];
                        }
                    }
                }
                double* dst = field.at(ch);
                for (int a = 0; a < q; ++a)
                {
                    dst[a] = v[a];
                }
            }
        }

        void project_children(const HybridMesh& mesh, Field& field, const CellIndex& p)
        {
            const auto ch = children(p, mesh.d());
            double* dst   = field.at(p);
            for (int a = 0; a < field.q(); ++a)
            {
                double s = 0;
                for (const auto& c : ch)
                {
                    s += field.at(c)[a];
                }
                dst[a] = s / static_cast<double>(ch.size());
            }
        }

        // No level-(l+1) leaf may touch the parent footprint once it becomes a leaf at l-1.
        bool coarsening_keeps_grading(const HybridMesh& mesh, const CellIndex& p)
        {
            const int l  = p.level + 1;
            const int d  = mesh.d();
            const int x0 = 2 * p.k[0] - 1, x1 = 2 * p.k[0] + 2;
            const int y0 = d == 2 ? 2 * p.k[1] - 1 : 0, y1 = d == 2 ? 2 * p.k[1] + 2 : 0;
            for (int y = y0; y <= y1; ++y)
            {
                for (int x = x0; x <= x1; ++x)
                {
                    if (mesh.in_domain(l, {x, y}) && mesh.kind(l, x, y) == CellKind::internal)
                    {
                        return false;
                    }
                }
            }
            return true;
        }
    }

    AdaptResult adapt_mesh(HybridMesh& mesh, Field& field, const AdaptParams& params, const PredictionOperator& op, BoundaryPolicy policy)
    {
        params.validate();
        const int d   = mesh.d();
        const int g   = op.gamma;
        const auto cw = child_weights(op.wd);
        const int lo  = std::max(params.l_min, mesh.root());
        const int hi  = std::min(params.l_max, mesh.l_max());
        AdaptResult res;
        const int max_rounds = 2 * (params.l_max - params.l_min) + 2;
        for (res.rounds = 1; res.rounds <= max_rounds; ++res.rounds)
        {
            fill_halos(mesh, field, policy, op.wd);
            const auto leaves = mesh.leaves();
            const auto det    = details(mesh, field, op, policy);
            std::map<CellIndex, double> leaf_detail;
            for (std::size_t i = 0; i < leaves.size(); ++i)
            {
                leaf_detail.emplace(leaves[i], det[i]);
            }

            std::vector<CellIndex> to_refine;
            std::set<CellIndex> parents;
            for (std::size_t i = 0; i < leaves.size(); ++i)
            {
                const auto& c = leaves[i];
                if (c.level < hi && det[i] >= params.refine_threshold(c.level, d))
                {
                    to_refine.push_back(c);
                }
                if (c.level > lo && c.level > mesh.root())
                {
                    parents.insert(parent(c));
                }
            }

            // coarsening candidates judged on the pre-refinement mesh
            std::vector<CellIndex> to_coarsen;
            std::set<CellIndex> refine_set(to_refine.begin(), to_refine.end());
            for (const auto& p : parents)
            {
                bool ok = true;
                for (const auto& ch : children(p, d))
                {
                    auto it = leaf_detail.find(ch);
                    if (it == leaf_detail.end() || refine_set.count(ch) || it->second > params.coarsen_threshold(ch.level, d))
                    {
                        ok = false;
                        break;
                    }
                }
                if (ok && detail(mesh, field, p, op, policy) >= params.refine_threshold(p.level, d))
                {
                    ok = false;
                }
                if (ok)
                {
                    to_coarsen.push_back(p);
                }
            }

            bool changed = false;
            for (const auto& c : to_refine)
            {
                predict_children(mesh, field, c, cw, g, policy);
            }
            for (const auto& c : to_refine)
            {
                mesh.refine(c);
                ++res.refined;
                changed = true;
            }
            for (;;)
            {
                const auto todo = mesh.grading_violations();
                if (todo.empty())
                {
                    break;
                }
                fill_halos(mesh, field, policy, op.wd);
                for (const auto& c : todo)
                {
                    predict_children(mesh, field, c, cw, g, policy);
                }
                for (const auto& c : todo)
                {
                    mesh.refine(c);
                    ++res.refined;
                }
                changed = true;
            }
            for (const auto& p : to_coarsen)
            {
                bool ok = mesh.kind(p) == CellKind::internal;
                for (const auto& ch : children(p, d))
                {
                    ok = ok && mesh.kind(ch) == CellKind::leaf;
                }
                if (!ok || !coarsening_keeps_grading(mesh, p))
                {
                    continue;
                }
                project_children(mesh, field, p);
                mesh.coarsen(p);
                ++res.coarsened;
                changed = true;
            }
            if (!changed)
            {
                res.converged = true;
                break;
            }
        }
        if (res.converged)
        {
            fill_halos(mesh, field, policy, op.wd);
        }
        return res;
    }
}
