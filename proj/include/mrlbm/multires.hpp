#pragma once

#include "mrlbm/mesh.hpp"
#include "mrlbm/rational.hpp"

#include <vector>

namespace mrlbm
{
    struct PredictionOperator
    {
        int gamma = 1;
        std::vector<Rational> w; // w_1..w_gamma
        std::vector<double> wd;  // float images
    };

    // Inverse of the averaging matrix T: row m gives A^m = sum_j Tinv[m][j] f_{k+j-gamma}.
    std::vector<std::vector<Rational>> constraint_inverse(int gamma);

    PredictionOperator derive_prediction_weights(int gamma);

    // Local polynomial of the cell, variable xi = (x - x_k)/dx in [-1/2, 1/2].
    struct ReconstructionPolynomial
    {
        int gamma = 1;
        int d     = 1;
        std::vector<double> A; // 1D: A[m]; 2D: A[m * (2 gamma + 1) + n] multiplies xi^m eta^n

        double value(double xi, double eta = 0) const;
        // Average over [a0,b0] x [a1,b1] (second interval ignored in 1D).
        double average(double a0, double b0, double a1 = -0.5, double b1 = 0.5) const;
    };

    ReconstructionPolynomial local_polynomial(const std::vector<double>& window, int gamma);
    // window[(j + gamma) * (2 gamma + 1) + (i + gamma)] holds f_{k + (i, j)}.
    ReconstructionPolynomial local_polynomial_2d(const std::vector<double>& window, int gamma);

    double predict(const std::vector<double>& window, int delta, const PredictionOperator& op);
    // Same window layout as local_polynomial_2d; y_first swaps the order of the 1D sweeps.
    double predict_2d(const std::vector<double>& window, IVec delta, const PredictionOperator& op, bool y_first = false);
    double project(const std::vector<double>& children_values);

    // Cascade weights from level-l data to finest cells of a level-l cell, cached per level gap.
    // Row r (0 <= r < 2^dl) has weights on level-l offsets -2 gamma..2 gamma.
    class ReconstructionCache
    {
      public:
        explicit ReconstructionCache(const PredictionOperator& op);

        int gamma() const
        {
            return gamma_;
        }
        int radius() const
        {
            return 2 * gamma_;
        }
        int width() const
        {
            return 4 * gamma_ + 1;
        }
        const std::vector<double>& rows(int dl);
        const double* row(int dl, int r)
        {
            return rows(dl).data() + static_cast<std::size_t>(r) * width();
        }
        const std::vector<double>& weights() const
        {
            return w_;
        }

      private:
        int gamma_;
        std::vector<double> w_;
        std::vector<std::vector<double>> rows_;
    };

    // Finest-level value of `target` using only data on `level` (leaf plus same-level halo).
    double reconstruct_from_level(const HybridMesh& mesh, const Field& field, int level, const CellIndex& target, int alpha,
                                  ReconstructionCache& cache, BoundaryPolicy policy);
    // Uses the covering leaf of the target.
    double reconstruct(const HybridMesh& mesh, const Field& field, const CellIndex& target, int alpha, ReconstructionCache& cache,
                       BoundaryPolicy policy);
    // Whole finest-level field (halos must be filled).
    UniformState reconstruct_finest(const HybridMesh& mesh, const Field& field, ReconstructionCache& cache, BoundaryPolicy policy);

    // max_alpha |prediction from the parent level - stored value|; 0 on the coarsest usable level.
    double detail(const HybridMesh& mesh, const Field& field, const CellIndex& leaf, const PredictionOperator& op,
                  BoundaryPolicy policy);
    std::vector<double> details(const HybridMesh& mesh, const Field& field, const PredictionOperator& op, BoundaryPolicy policy);
}
