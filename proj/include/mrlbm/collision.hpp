#pragma once

#include "mrlbm/multires.hpp"
#include "mrlbm/schemes.hpp"

#include <string>
#include <vector>

namespace mrlbm
{
    // Points and weights on a reference interval.
    struct QuadratureRule
    {
        std::vector<double> x;
        std::vector<double> w;

        int n() const
        {
            return static_cast<int>(x.size());
        }
        double total_weight() const;
    };

    // Affine map of a rule on [-1,1] onto the unit cell [-1/2,1/2].
    QuadratureRule to_unit_cell(const QuadratureRule& rule);

    enum class CollisionKind
    {
        lc,
        rc,
        pqc
    };
    std::string to_string(CollisionKind k);
    CollisionKind collision_kind_from_string(const std::string& s);

    // In place, leaf by leaf.
    void collide_lc(const HybridMesh& mesh, Field& field, const SchemeSpec& spec);
    // in needs halos filled; writes the leaves of out.
    void collide_rc(const HybridMesh& mesh, const Field& in, Field& out, const SchemeSpec& spec, ReconstructionCache& cache,
                    BoundaryPolicy policy);
    // unit_rule lives on [-1/2,1/2]; 2D uses its tensor square.
    void collide_pqc(const HybridMesh& mesh, const Field& in, Field& out, const SchemeSpec& spec, const QuadratureRule& unit_rule, int gamma,
                     BoundaryPolicy policy);
}
