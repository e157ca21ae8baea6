#pragma once

#include "mrlbm/mesh.hpp"
#include "mrlbm/multires.hpp"

namespace mrlbm
{
    struct AdaptParams
    {
        double epsilon = 1e-4;
        int mu_bar     = 2;
        int l_min      = 0;
        int l_max      = 0;

        void validate() const;
        double coarsen_threshold(int level, int d) const;
        double refine_threshold(int level, int d) const;
    };

    struct AdaptResult
    {
        int rounds           = 0;
        bool converged       = false;
        std::size_t refined  = 0;
        std::size_t coarsened = 0;
    };

    // Detail-driven refine/coarsen to a fixpoint; field values are transferred by
    // prediction (refine) and projection (coarsen).
    AdaptResult adapt_mesh(HybridMesh& mesh, Field& field, const AdaptParams& params, const PredictionOperator& op, BoundaryPolicy policy);
}
