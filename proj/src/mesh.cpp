#include "mrlbm/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mrlbm
{
    Domain Domain::unit_cells(int d, std::array<double, 2> lo, std::array<double, 2> hi, IVec n)
    {
        Domain dom;
        dom.d  = d;
        dom.lo = lo;
        dom.hi = hi;
        for (int a = 0; a < 2; ++a)
        {
            if (a >= d)
            {
                dom.lo[a] = 0;
                dom.hi[a] = 1;
                n[a]      = 1;
            }
            if (!(dom.hi[a] > dom.lo[a]) || n[a] < 1)
            {
                throw std::invalid_argument("Domain: empty box");
            }
            dom.h0[a] = (dom.hi[a] - dom.lo[a]) / n[a];
        }
        return dom;
    }

    Domain Domain::with_cell_size(int d, std::array<double, 2> lo, std::array<double, 2> hi, double h0)
    {
        Domain dom;
        dom.d  = d;
        dom.lo = lo;
        dom.hi = hi;
        for (int a = 0; a < 2; ++a)
        {
            if (a >= d)
            {
                dom.lo[a] = 0;
                dom.hi[a] = 1;
                dom.h0[a] = 1;
                continue;
            }
            if (!(hi[a] > lo[a]) || !(h0 > 0))
            {
                throw std::invalid_argument("Domain: empty box");
            }
            dom.h0[a] = h0;
        }
        return dom;
    }

    double Domain::dx(int level, int axis) const
    {
        return std::ldexp(h0[axis], -level);
    }

    bool Domain::representable(int level) const
    {
        for (int a = 0; a < d; ++a)
        {
            const double v = (hi[a] - lo[a]) / dx(level, a);
            const double r = std::round(v);
            if (r < 1 || std::abs(v - r) > 1e-9 * std::max(1.0, v))
            {
                return false;
            }
        }
        return true;
    }

    int Domain::root_level() const
    {
        for (int l = 0; l < 40; ++l)
        {
            if (representable(l))
            {
                return l;
            }
        }
        throw std::invalid_argument("Domain: no representable level");
    }

    IVec Domain::count(int level) const
    {
        if (!representable(level))
        {
            throw std::invalid_argument("Domain: level " + std::to_string(level) + " not representable");
        }
        IVec n{1, 1};
        for (int a = 0; a < d; ++a)
        {
            n[a] = static_cast<int>(std::lround((hi[a] - lo[a]) / dx(level, a)));
        }
        return n;
    }

    double Domain::cell_measure(int level) const
    {
        double m = 1;
        for (int a = 0; a < d; ++a)
        {
            m *= dx(level, a);
        }
        return m;
    }

    double Domain::measure() const
    {
        double m = 1;
        for (int a = 0; a < d; ++a)
        {
            m *= hi[a] - lo[a];
        }
        return m;
    }

    std::array<double, 2> cell_center(const CellIndex& c, const Domain& dom)
    {
        std::array<double, 2> x{0, 0};
        for (int a = 0; a < dom.d; ++a)
        {
            x[a] = dom.lo[a] + dom.dx(c.level, a) * (c.k[a] + 0.5);
        }
        return x;
    }

    CellIndex parent(const CellIndex& c)
    {
        if (c.level < 1)
        {
            throw std::out_of_range("parent: level 0 has no parent");
        }
        return {c.level - 1, {c.k[0] >> 1, c.k[1] >> 1}};
    }

    std::vector<CellIndex> children(const CellIndex& c, int d)
    {
        std::vector<CellIndex> ch;
        const int ny = d == 2 ? 2 : 1;
        for (int j = 0; j < ny; ++j)
        {
            for (int i = 0; i < 2; ++i)
            {
                ch.push_back({c.level + 1, {2 * c.k[0] + i, d == 2 ? 2 * c.k[1] + j : 0}});
            }
        }
        return ch;
    }

    HybridMesh::HybridMesh(Domain dom, int l_min, int l_max, int halo_width)
        : dom_(dom)
        , l_min_(l_min)
        , l_max_(l_max)
        , root_(dom.root_level())
        , halo_width_(halo_width)
    {
        if (l_min < root_ || l_min > l_max)
        {
            throw std::invalid_argument("HybridMesh: need root <= l_min <= l_max");
        }
        n_.assign(l_max + 1, IVec{0, 0});
        kind_.resize(l_max + 1);
        for (int l = root_; l <= l_max; ++l)
        {
            n_[l] = dom.count(l);
            const auto v = l < l_min ? CellKind::internal : (l == l_min ? CellKind::leaf : CellKind::none);
            kind_[l].assign(ncells(l), static_cast<std::uint8_t>(v));
        }
        touch();
    }

    void HybridMesh::touch()
    {
        static std::atomic<std::uint64_t> counter{0};
        version_ = ++counter;
        dirty_   = true;
    }

    bool HybridMesh::in_domain(int level, const IVec& k) const
    {
        if (level < root_ || level > l_max_)
        {
            return false;
        }
        for (int a = 0; a < 2; ++a)
        {
            if (k[a] < 0 || k[a] >= n_[level][a])
            {
                return false;
            }
        }
        return true;
    }

    const std::vector<CellIndex>& HybridMesh::leaves() const
    {
        if (dirty_)
        {
            leaves_.clear();
            for (int l = root_; l <= l_max_; ++l)
            {
                for (int k1 = 0; k1 < n_[l][1]; ++k1)
                {
                    for (int k0 = 0; k0 < n_[l][0]; ++k0)
                    {
                        if (kind(l, k0, k1) == CellKind::leaf)
                        {
                            leaves_.push_back({l, {k0, k1}});
                        }
                    }
                }
            }
            dirty_ = false;
        }
        return leaves_;
    }

    int HybridMesh::covering_level(int level, const IVec& k) const
    {
        CellIndex c{level, k};
        switch (kind(c))
        {
            case CellKind::leaf:
                return level;
            case CellKind::internal:
                return -1;
            default:
                break;
        }
        while (c.level > root_)
        {
            c = parent(c);
            if (kind(c) == CellKind::leaf)
            {
                return c.level;
            }
        }
        throw std::logic_error("covering_level: broken tree");
    }

    CellIndex HybridMesh::covering_leaf(const CellIndex& c) const
    {
        const int l = covering_level(c.level, c.k);
        if (l < 0)
        {
            throw std::invalid_argument("covering_leaf: cell is internal");
        }
        const int s = c.level - l;
        return {l, {c.k[0] >> s, c.k[1] >> s}};
    }

    void HybridMesh::refine(const CellIndex& leaf)
    {
        if (kind(leaf) != CellKind::leaf || leaf.level >= l_max_)
        {
            throw std::invalid_argument("refine: not a refinable leaf");
        }
        set_kind(leaf, CellKind::internal);
        for (const auto& ch : children(leaf, d()))
        {
            set_kind(ch, CellKind::leaf);
        }
    }

    void HybridMesh::coarsen(const CellIndex& p)
    {
        if (kind(p) != CellKind::internal)
        {
            throw std::invalid_argument("coarsen: not an internal cell");
        }
        auto ch = children(p, d());
        for (const auto& c : ch)
        {
            if (kind(c) != CellKind::leaf)
            {
                throw std::invalid_argument("coarsen: children are not all leaves");
            }
        }
        for (const auto& c : ch)
        {
            set_kind(c, CellKind::none);
        }
        set_kind(p, CellKind::leaf);
    }

    HybridMesh HybridMesh::from_leaves(Domain dom, int l_min, int l_max, int halo_width, const std::vector<CellIndex>& leaves)
    {
        const int r = dom.root_level();
        if (l_min < r || l_min > l_max)
        {
            throw std::invalid_argument("from_leaves: need root <= l_min <= l_max");
        }
        HybridMesh m(dom, r, l_max, halo_width);
        m.l_min_ = l_min;
        for (int l = m.root_; l <= l_max; ++l)
        {
            std::fill(m.kind_[l].begin(), m.kind_[l].end(), static_cast<std::uint8_t>(CellKind::none));
        }
        for (const auto& c : leaves)
        {
            if (!m.in_domain(c.level, c.k))
            {
                throw std::invalid_argument("from_leaves: cell outside the domain");
            }
            m.set_kind(c, CellKind::leaf);
            CellIndex a = c;
            while (a.level > m.root_)
            {
                a = parent(a);
                m.set_kind(a, CellKind::internal);
            }
        }
        m.dirty_ = true;
        if (!m.is_partition())
        {
            throw std::invalid_argument("from_leaves: leaves do not tile the domain");
        }
        return m;
    }

    bool HybridMesh::is_partition() const
    {
        for (int l = root_; l <= l_max_; ++l)
        {
            for (int k1 = 0; k1 < n_[l][1]; ++k1)
            {
                for (int k0 = 0; k0 < n_[l][0]; ++k0)
                {
                    const CellKind k = kind(l, k0, k1);
                    CellKind expect_parent;
                    if (l == root_)
                    {
                        if (k == CellKind::none)
                        {
                            return false;
                        }
                        continue;
                    }
                    expect_parent = kind(l - 1, k0 >> 1, k1 >> 1);
                    if (expect_parent == CellKind::internal && k == CellKind::none)
                    {
                        return false;
                    }
                    if (expect_parent != CellKind::internal && k != CellKind::none)
                    {
                        return false;
                    }
                    if (l == l_max_ && k == CellKind::internal)
                    {
                        return false;
                    }
                }
            }
        }
        double total = 0;
        for (const auto& c : leaves())
        {
            total += dom_.cell_measure(c.level);
        }
        return std::abs(total - dom_.measure()) <= 1e-12 * dom_.measure();
    }

    bool HybridMesh::is_graded() const
    {
        const int ny = d() == 2 ? 1 : 0;
        for (const auto& c : leaves())
        {
            for (int oy = -ny; oy <= ny; ++oy)
            {
                for (int ox = -1; ox <= 1; ++ox)
                {
                    IVec k{c.k[0] + ox, c.k[1] + oy};
                    if ((ox == 0 && oy == 0) || !in_domain(c.level, k))
                    {
                        continue;
                    }
                    const int cl = covering_level(c.level, k);
                    if (cl >= 0 && cl < c.level - 1)
                    {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    std::vector<CellIndex> HybridMesh::grading_violations() const
    {
        std::vector<CellIndex> todo;
        const int ny = d() == 2 ? 1 : 0;
        for (const auto& c : leaves())
        {
            for (int oy = -ny; oy <= ny; ++oy)
            {
                for (int ox = -1; ox <= 1; ++ox)
                {
                    IVec k{c.k[0] + ox, c.k[1] + oy};
                    if ((ox == 0 && oy == 0) || !in_domain(c.level, k))
                    {
                        continue;
                    }
                    const int cl = covering_level(c.level, k);
                    if (cl >= 0 && cl < c.level - 1)
                    {
                        const int s = c.level - cl;
                        todo.push_back({cl, {k[0] >> s, k[1] >> s}});
                    }
                }
            }
        }
        std::sort(todo.begin(), todo.end());
        todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
        return todo;
    }

    std::vector<CellIndex> HybridMesh::ensure_graded_inplace()
    {
        std::vector<CellIndex> refined;
        for (;;)
        {
            const auto todo = grading_violations();
            if (todo.empty())
            {
                return refined;
            }
            for (const auto& c : todo)
            {
                refine(c);
                refined.push_back(c);
            }
        }
    }

    HybridMesh uniform_mesh(int level, int l_max, const Domain& dom, int halo_width, int l_min)
    {
        if (l_min < 0)
        {
            l_min = level;
        }
        if (level < l_min || level > l_max)
        {
            throw std::invalid_argument("uniform_mesh: level outside [l_min, l_max]");
        }
        HybridMesh m(dom, level, l_max, halo_width);
        if (l_min != level)
        {
            m = HybridMesh::from_leaves(dom, l_min, l_max, halo_width, m.leaves());
        }
        return m;
    }

    HybridMesh ensure_graded(const HybridMesh& mesh)
    {
        HybridMesh m = mesh;
        m.ensure_graded_inplace();
        return m;
    }

    Field::Field(const HybridMesh& mesh, int q)
        : q_(q)
    {
        const int L = mesh.l_max();
        n_.assign(L + 1, IVec{0, 0});
        data_.resize(L + 1);
        for (int l = mesh.root(); l <= L; ++l)
        {
            n_[l] = mesh.n(l);
            data_[l].assign(mesh.ncells(l) * q, 0.0);
        }
    }

    std::vector<std::vector<double>> child_weights(const std::vector<double>& w)
    {
        const int g = static_cast<int>(w.size());
        std::vector<std::vector<double>> cw(2, std::vector<double>(2 * g + 1, 0.0));
        for (int delta = 0; delta < 2; ++delta)
        {
            const double s = delta == 0 ? 1.0 : -1.0;
            cw[delta][g]  = 1.0;
            for (int p = 1; p <= g; ++p)
            {
                cw[delta][g + p] += s * w[p - 1];
                cw[delta][g - p] -= s * w[p - 1];
            }
        }
        return cw;
    }

    namespace
    {
        // Box dilation along one axis; copy truncates the window, periodic wraps it.
        void dilate_axis(std::vector<std::uint8_t>& m, IVec n, int axis, int r, BoundaryPolicy p)
        {
            if (r <= 0)
            {
                return;
            }
            const int len    = n[axis];
            const int lines  = n[1 - axis];
            const int stride = axis == 0 ? 1 : n[0];
            std::vector<int> pre(len + 1);
            std::vector<std::uint8_t> out(len);
            for (int line = 0; line < lines; ++line)
            {
                const std::size_t base = axis == 0 ? static_cast<std::size_t>(line) * n[0] : static_cast<std::size_t>(line);
                pre[0]                 = 0;
                for (int i = 0; i < len; ++i)
                {
                    pre[i + 1] = pre[i] + (m[base + static_cast<std::size_t>(i) * stride] ? 1 : 0);
                }
                if (pre[len] == 0)
                {
                    continue;
                }
                for (int i = 0; i < len; ++i)
                {
                    int cnt;
                    if (p == BoundaryPolicy::periodic && 2 * r + 1 >= len)
                    {
                        cnt = pre[len];
                    }
                    else if (p == BoundaryPolicy::periodic)
                    {
                        int a = i - r, b = i + r;
                        cnt   = pre[std::min(b, len - 1) + 1] - pre[std::max(a, 0)];
                        if (a < 0)
                        {
                            cnt += pre[len] - pre[len + a];
                        }
                        if (b >= len)
                        {
                            cnt += pre[b - len + 1];
                        }
                    }
                    else
                    {
                        cnt = pre[std::min(i + r, len - 1) + 1] - pre[std::max(i - r, 0)];
                    }
                    out[i] = cnt > 0;
                }
                for (int i = 0; i < len; ++i)
                {
                    m[base + static_cast<std::size_t>(i) * stride] = out[i];
                }
            }
        }

        void dilate(std::vector<std::uint8_t>& m, IVec n, int d, int r, BoundaryPolicy p)
        {
            dilate_axis(m, n, 0, r, p);
            if (d == 2)
            {
                dilate_axis(m, n, 1, r, p);
            }
        }
    }

    namespace
    {
        void build_plan(const HybridMesh& mesh, Field::HaloPlan& plan, BoundaryPolicy policy, int g)
        {
            const int d    = mesh.d();
            const int hw   = mesh.halo_width();
            const int root = mesh.root();
            const int L    = mesh.l_max();
            plan.internal.assign(L + 1, {});
            plan.predict.assign(L + 1, {});
            std::vector<std::uint8_t> mk, seed;
            for (int l = L; l >= root; --l)
            {
                const IVec n         = mesh.n(l);
                const std::size_t nc = mesh.ncells(l);
                mk.assign(nc, 0);
                for (std::size_t i = 0; i < nc; ++i)
                {
                    const CellKind k = mesh.kind(l, static_cast<int>(i % n[0]), static_cast<int>(i / n[0]));
                    mk[i]            = k == CellKind::leaf;
                    if (k == CellKind::internal)
                    {
                        plan.internal[l].push_back(static_cast<std::uint32_t>(i));
                    }
                }
                dilate(mk, n, d, hw, policy);
                if (l < L)
                {
                    dilate(seed, n, d, g, policy);
                    for (std::size_t i = 0; i < nc; ++i)
                    {
                        mk[i] |= seed[i];
                    }
                }
                if (l > root)
                {
                    const IVec np = mesh.n(l - 1);
                    seed.assign(mesh.ncells(l - 1), 0);
                    for (int k1 = 0; k1 < n[1]; ++k1)
                    {
                        for (int k0 = 0; k0 < n[0]; ++k0)
                        {
                            const std::size_t i = mesh.lin(l, k0, k1);
                            const CellKind k    = mesh.kind(l, k0, k1);
                            const bool leaf_parent =
                                k == CellKind::internal && l < L && mesh.kind(l + 1, 2 * k0, d == 2 ? 2 * k1 : 0) == CellKind::leaf;
                            if (k == CellKind::leaf || leaf_parent || (k == CellKind::none && mk[i]))
                            {
                                seed[static_cast<std::size_t>(k1 >> 1) * np[0] + (k0 >> 1)] = 1;
                            }
                            if (k == CellKind::none && mk[i])
                            {
                                plan.predict[l].push_back(static_cast<std::uint32_t>(i));
                            }
                        }
                    }
                }
            }
            plan.version = mesh.version();
            plan.policy  = policy;
            plan.gamma   = g;
        }
    }

    void fill_halos(const HybridMesh& mesh, Field& field, BoundaryPolicy policy, const std::vector<double>& w)
    {
        const int d    = mesh.d();
        const int q    = field.q();
        const int g    = static_cast<int>(w.size());
        const int root = mesh.root();
        const int L    = mesh.l_max();
        const double inv = d == 2 ? 0.25 : 0.5;

        auto& plan = field.plan();
        if (plan.version != mesh.version() || plan.policy != policy || plan.gamma != g)
        {
            build_plan(mesh, plan, policy, g);
        }

        // projection onto internal cells
        for (int l = L - 1; l >= root; --l)
        {
            const int n0 = mesh.n(l)[0];
            for (const std::uint32_t i : plan.internal[l])
            {
                const int k0 = static_cast<int>(i % n0), k1 = static_cast<int>(i / n0);
                double* dst  = field.at(l, k0, k1);
                for (int a = 0; a < q; ++a)
                {
                    dst[a] = 0;
                }
                for (int j = 0; j < (d == 2 ? 2 : 1); ++j)
                {
                    for (int ii = 0; ii < 2; ++ii)
                    {
                        const double* src = field.at(l + 1, 2 * k0 + ii, d == 2 ? 2 * k1 + j : 0);
                        for (int a = 0; a < q; ++a)
                        {
                            dst[a] += src[a];
                        }
                    }
                }
                for (int a = 0; a < q; ++a)
                {
                    dst[a] *= inv;
                }
            }
        }

        // prediction into needed cells lying inside coarser leaves, coarse to fine
        const auto cw = child_weights(w);
        const int gy  = d == 2 ? g : 0;
        for (int l = root + 1; l <= L; ++l)
        {
            const int n0 = mesh.n(l)[0];
            for (const std::uint32_t idx : plan.predict[l])
            {
                const int k0 = static_cast<int>(idx % n0), k1 = static_cast<int>(idx / n0);
                const int p0 = k0 >> 1, p1 = k1 >> 1;
                const auto& wx = cw[k0 & 1];
                const auto& wy = cw[k1 & 1];
                double* dst    = field.at(l, k0, k1);
                for (int a = 0; a < q; ++a)
                {
                    dst[a] = 0;
                }
                for (int j = -gy; j <= gy; ++j)
                {
                    const double cy = d == 2 ? wy[j + g] : 1.0;
                    for (int i = -g; i <= g; ++i)
                    {
                        const double c = cy * wx[i + g];
                        if (c == 0.0)
                        {
                            continue;
                        }
                        const double* src = field.get(l - 1, p0 + i, p1 + j, policy);
                        for (int a = 0; a < q; ++a)
                        {
                            dst[a] += c * src[a];
                        }
                    }
                }
            }
        }
    }

    void dump(const HybridMesh& mesh, const Field& field, std::ostream& os)
    {
        const auto prec = os.precision(17);
        for (const auto& c : mesh.leaves())
        {
            os << c.level << ' ' << c.k[0];
            if (mesh.d() == 2)
            {
                os << ' ' << c.k[1];
            }
            const double* v = field.at(c);
            for (int a = 0; a < field.q(); ++a)
            {
                os << ' ' << v[a];
            }
            os << '\n';
        }
        os.precision(prec);
    }
}
