#pragma once

#include "mrlbm/multires.hpp"
#include "mrlbm/rational.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mrlbm
{
    struct StreamSets
    {
        std::vector<IVec> E; // incoming finest cells
        std::vector<IVec> A; // outgoing finest cells
    };

    // Sets for the leaf with index k (any level) at level gap dl.
    StreamSets stream_sets(const IVec& k, const IVec& c, int dl, int d);

    enum class StencilKind
    {
        haar,
        gamma1,
        generic,
        lax_wendroff
    };
    std::string to_string(StencilKind k);
    StencilKind stencil_kind_from_string(const std::string& s);

    // Weights on offsets [-2,2]^d; 2D index 5 (n + 2) + (m + 2) with m along x, n along y.
    struct Stencil
    {
        int d = 1;
        StencilKind kind = StencilKind::gamma1;
        IVec c{0, 0};
        int dl = 0;
        std::vector<Rational> w;

        Stencil() = default;
        Stencil(int d, StencilKind kind, IVec c, int dl)
            : d(d)
            , kind(kind)
            , c(c)
            , dl(dl)
            , w(d == 2 ? 25 : 5, Rational(0))
        {
        }
        static int index(int m, int n = 0, int d = 1)
        {
            return d == 2 ? 5 * (n + 2) + (m + 2) : m + 2;
        }
        Rational& at(int m, int n = 0)
        {
            return w[index(m, n, d)];
        }
        const Rational& at(int m, int n = 0) const
        {
            return w[index(m, n, d)];
        }
        Rational sum() const;
        bool operator==(const Stencil& o) const
        {
            return d == o.d && w == o.w;
        }
        std::string str() const; // exact fractions p/2^e
    };

    using Matrix5 = std::array<std::array<Rational, 5>, 5>;
    const Matrix5& recurrence_matrix();

    Stencil shift_stencil(const IVec& c, int d);
    Stencil flatten_weights_haar(int c, int dl);
    Stencil flatten_weights_gamma1(int c, int dl);
    // nullopt when the support leaves [-2,2]^d.
    std::optional<Stencil> flatten_weights_bruteforce(const PredictionOperator& op, const IVec& c, int dl, int d);
    // gamma = 1 in 2D by iterating the Kronecker square of the recurrence matrix.
    Stencil flatten_weights_2d(const IVec& c, int dl);
    Stencil lw_weights(const IVec& c, int dl, int d);

    // Dispatch by kind; gamma used only for `generic` and for 2D haar.
    Stencil make_stencil(StencilKind kind, const PredictionOperator& op, const IVec& c, int dl, int d);

    // Float images pre-multiplied by 2^{-d dl}, nonzeros only.
    struct StencilTap
    {
        int m, n;
        double w;
    };
    class StencilTable
    {
      public:
        StencilTable(StencilKind kind, const PredictionOperator& op, const VelocitySet& v, int dl_max);
        const std::vector<StencilTap>& taps(int dl, int alpha) const
        {
            return taps_[dl][alpha];
        }
        const Stencil& exact(int dl, int alpha) const
        {
            return exact_[dl][alpha];
        }
        int dl_max() const
        {
            return static_cast<int>(taps_.size()) - 1;
        }

      private:
        std::vector<std::vector<std::vector<StencilTap>>> taps_;
        std::vector<std::vector<Stencil>> exact_;
    };

    // out gets the streamed leaves; in must have halos filled. Non-leaf cells of out are left as in.
    void flattened_stream(const HybridMesh& mesh, const Field& in, Field& out, const StencilTable& table, int q, BoundaryPolicy policy);
    // Stream by explicit reconstruction on the E and A cells.
    void adaptive_stream(const HybridMesh& mesh, const Field& in, Field& out, ReconstructionCache& cache, const VelocitySet& v,
                         BoundaryPolicy policy);
    // Uniform-level variant: one stencil per velocity.
    UniformState flattened_stream(const UniformState& state, const std::vector<Stencil>& stencils, int dl, int d, BoundaryPolicy policy);

    // Pseudo-flux from the single gamma = 1 polynomial of the cell integrated over E and A.
    double lw_single_polynomial_check(const std::array<double, 3>& window, int c, int dl);
}
