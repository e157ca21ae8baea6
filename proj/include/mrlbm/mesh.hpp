#pragma once

#include "mrlbm/schemes.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mrlbm
{
    struct CellIndex
    {
        int level = 0;
        IVec k{0, 0};

        bool operator==(const CellIndex&) const = default;
        auto operator<=>(const CellIndex&) const = default;
    };

    // Axis-aligned box. Level-l cells have width h0 * 2^-l per axis; a level is
    // usable when every axis holds an integral number of cells.
    struct Domain
    {
        int d = 1;
        std::array<double, 2> lo{0, 0};
        std::array<double, 2> hi{1, 1};
        std::array<double, 2> h0{1, 1};

        // n unit cells per axis at level 0.
        static Domain unit_cells(int d, std::array<double, 2> lo, std::array<double, 2> hi, IVec n = {1, 1});
        // Fixed level-0 cell width.
        static Domain with_cell_size(int d, std::array<double, 2> lo, std::array<double, 2> hi, double h0);

        double dx(int level, int axis = 0) const;
        bool representable(int level) const;
        int root_level() const;
        IVec count(int level) const; // throws when not representable
        double cell_measure(int level) const;
        double measure() const;
    };

    std::array<double, 2> cell_center(const CellIndex& c, const Domain& dom);
    CellIndex parent(const CellIndex& c);
    std::vector<CellIndex> children(const CellIndex& c, int d);

    enum class CellKind : std::uint8_t
    {
        none     = 0, // strictly inside a coarser leaf
        leaf     = 1,
        internal = 2 // covered by finer leaves
    };

    class HybridMesh
    {
      public:
        HybridMesh() = default;
        HybridMesh(Domain dom, int l_min, int l_max, int halo_width);

        const Domain& domain() const
        {
            return dom_;
        }
        int d() const
        {
            return dom_.d;
        }
        int l_min() const
        {
            return l_min_;
        }
        int l_max() const
        {
            return l_max_;
        }
        int root() const
        {
            return root_;
        }
        int halo_width() const
        {
            return halo_width_;
        }

        IVec n(int level) const
        {
            return n_[level];
        }
        std::size_t ncells(int level) const
        {
            return static_cast<std::size_t>(n_[level][0]) * n_[level][1];
        }
        std::size_t lin(int level, int k0, int k1) const
        {
            return static_cast<std::size_t>(k1) * n_[level][0] + k0;
        }
        bool in_domain(int level, const IVec& k) const;

        CellKind kind(int level, int k0, int k1 = 0) const
        {
            return static_cast<CellKind>(kind_[level][lin(level, k0, k1)]);
        }
        CellKind kind(const CellIndex& c) const
        {
            return kind(c.level, c.k[0], c.k[1]);
        }
        // Changes whenever the leaf set changes; copies share it.
        std::uint64_t version() const
        {
            return version_;
        }
        bool is_leaf(const CellIndex& c) const
        {
            return kind(c) == CellKind::leaf;
        }

        // Level-major, then k1, then k0.
        const std::vector<CellIndex>& leaves() const;
        std::size_t num_leaves() const
        {
            return leaves().size();
        }

        // Level of the leaf covering the in-domain cell (level, k); -1 if the cell is internal.
        int covering_level(int level, const IVec& k) const;
        CellIndex covering_leaf(const CellIndex& c) const;

        void refine(const CellIndex& leaf);
        void coarsen(const CellIndex& parent_cell); // all children must be leaves
        // Marks an arbitrary in-domain cell set as new leaf set; used by tests to build meshes.
        static HybridMesh from_leaves(Domain dom, int l_min, int l_max, int halo_width, const std::vector<CellIndex>& leaves);

        bool is_partition() const;
        bool is_graded() const;
        // Coarse leaves that must be split for the current leaves to be graded (one pass).
        std::vector<CellIndex> grading_violations() const;
        // Refines until graded; returns the refined leaves in order.
        std::vector<CellIndex> ensure_graded_inplace();

      private:
        void set_kind(const CellIndex& c, CellKind k)
        {
            kind_[c.level][lin(c.level, c.k[0], c.k[1])] = static_cast<std::uint8_t>(k);
            touch();
        }
        void touch();

        Domain dom_;
        int l_min_ = 0, l_max_ = 0, root_ = 0, halo_width_ = 3;
        std::vector<IVec> n_;
        std::vector<std::vector<std::uint8_t>> kind_;
        mutable std::vector<CellIndex> leaves_;
        mutable bool dirty_ = true;
        std::uint64_t version_ = 0;
    };

    HybridMesh uniform_mesh(int level, int l_max, const Domain& dom, int halo_width = 3, int l_min = -1);
    HybridMesh ensure_graded(const HybridMesh& mesh);

    // Dense per-level storage of q values for every cell of every usable level.
    // Leaves carry the unknowns; other cells are halo values written by fill_halos.
    class Field
    {
      public:
        Field() = default;
        Field(const HybridMesh& mesh, int q);

        int q() const
        {
            return q_;
        }
        double* at(int level, int k0, int k1 = 0)
        {
            return data_[level].data() + (static_cast<std::size_t>(k1) * n_[level][0] + k0) * q_;
        }
        const double* at(int level, int k0, int k1 = 0) const
        {
            return data_[level].data() + (static_cast<std::size_t>(k1) * n_[level][0] + k0) * q_;
        }
        double* at(const CellIndex& c)
        {
            return at(c.level, c.k[0], c.k[1]);
        }
        const double* at(const CellIndex& c) const
        {
            return at(c.level, c.k[0], c.k[1]);
        }
        // Out-of-range indices resolved by the boundary policy.
        const double* get(int level, int k0, int k1, BoundaryPolicy p) const
        {
            const IVec& n = n_[level];
            return at(level, map_index(k0, n[0], p), n[1] == 1 ? 0 : map_index(k1, n[1], p));
        }
        std::vector<double>& level_data(int level)
        {
            return data_[level];
        }
        const std::vector<double>& level_data(int level) const
        {
            return data_[level];
        }

        // Cells written by fill_halos, rebuilt when the mesh version changes.
        struct HaloPlan
        {
            std::uint64_t version = 0;
            BoundaryPolicy policy = BoundaryPolicy::copy;
            int gamma             = -1;
            std::vector<std::vector<std::uint32_t>> internal;
            std::vector<std::vector<std::uint32_t>> predict;
        };
        HaloPlan& plan()
        {
            return plan_;
        }

      private:
        int q_ = 0;
        std::vector<IVec> n_;
        std::vector<std::vector<double>> data_;
        HaloPlan plan_;
    };

    // Child weights of the 1D prediction: row delta (0 or 1) over offsets -gamma..gamma.
    std::vector<std::vector<double>> child_weights(const std::vector<double>& w);

    // Projection on all internal cells, then prediction on the halo rings of each leaf
    // level (width halo_width) and on the parent-level windows used by details.
    // w holds the prediction weights w_1..w_gamma.
    void fill_halos(const HybridMesh& mesh, Field& field, BoundaryPolicy policy, const std::vector<double>& w);

    // Text dump: one line "level k0 [k1] v_0 ... v_{q-1}" per leaf.
    void dump(const HybridMesh& mesh, const Field& field, std::ostream& os);
}
