#include "hextile/hex_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>

namespace hextile
{
namespace
{

constexpr double kSqrt3 = 1.7320508075688772935;

// Directions (dx2, drow) along which lattice edges are oriented: 0, 120 and 240 degrees.
bool points_forward(LatticeSite from, LatticeSite to)
{
    const int dx = to.x2 - from.x2;
    const int dr = to.row - from.row;
    return (dx == 2 && dr == 0) || (dx == -1 && dr == 1) || (dx == -1 && dr == -1);
}

int half_width(int rings, int row) { return 2 * rings - std::abs(row); }

} // namespace

std::span<const Incidence> HexAperture::incident(int vertex_id) const
{
    return incidence_.at(static_cast<std::size_t>(vertex_id));
}

std::span<const int> HexAperture::incident_triangles(int vertex_id) const
{
    return vertex_triangles_.at(static_cast<std::size_t>(vertex_id));
}

int HexAperture::edge_between(int u, int v) const
{
    for (const auto& inc : incident(u))
        if (inc.vertex == v)
            return inc.edge;
    return -1;
}

int HexAperture::vertex_at(LatticeSite site) const
{
    if (site.row < -rings_ || site.row > rings_)
        return -1;
    const int hw = half_width(rings_, site.row);
    if (site.x2 < -hw || site.x2 > hw || ((site.x2 + hw) % 2) != 0)
        return -1;
    const auto stride = static_cast<std::size_t>(4 * rings_ + 1);
    return site_index_[static_cast<std::size_t>(site.row + rings_) * stride +
                       static_cast<std::size_t>(site.x2 + 2 * rings_)];
}

int HexAperture::row_width(int s) const
{
    if (s == 0 || s < -rings_ || s > rings_)
        throw std::out_of_range("row index outside the aperture");
    return 4 * rings_ - 2 * std::abs(s) + 1;
}

HexAperture build_aperture(int rings, double cell_side)
{
    if (rings < 1)
        throw std::invalid_argument("rings must be >= 1, got " + std::to_string(rings));
    if (!(cell_side > 0.0) || !std::isfinite(cell_side))
        throw std::invalid_argument("cell_side must be positive and finite");

    HexAperture ap;
    ap.rings_ = rings;
    ap.cell_side_ = cell_side;
    const double dy = cell_side * kSqrt3 / 2.0;

    // Sites: internal in raster order, then the boundary walk.
    std::vector<LatticeSite> internal;
    for (int row = -rings; row <= rings; ++row)
    {
        const int hw = half_width(rings, row);
        for (int x2 = -hw; x2 <= hw; x2 += 2)
        {
            const bool ext = std::abs(row) == rings || std::abs(x2) == hw;
            if (!ext)
                internal.push_back({x2, row});
        }
    }

    std::vector<LatticeSite> external;
    {
        // Clockwise (y up): up the lower-left side first.
        const std::array<LatticeSite, 6> steps{{{-1, 1}, {1, 1}, {2, 0}, {1, -1}, {-1, -1}, {-2, 0}}};
        LatticeSite p{-rings, -rings};
        for (const auto& d : steps)
            for (int k = 0; k < rings; ++k)
            {
                external.push_back(p);
                p = {p.x2 + d.x2, p.row + d.row};
            }
    }

    ap.internal_count_ = internal.size();
    const auto stride = static_cast<std::size_t>(4 * rings + 1);
    ap.site_index_.assign(static_cast<std::size_t>(2 * rings + 1) * stride, -1);
    auto add_vertex = [&](LatticeSite s, bool ext) {
        const int id = static_cast<int>(ap.vertices_.size());
        Vertex v;
        v.site = s;
        v.external = ext;
        v.position = {cell_side * s.x2 / 2.0, dy * s.row};
        ap.vertices_.push_back(v);
        ap.site_index_[static_cast<std::size_t>(s.row + rings) * stride + static_cast<std::size_t>(s.x2 + 2 * rings)] = id;
    };
    for (const auto& s : internal)
        add_vertex(s, false);
    for (const auto& s : external)
        add_vertex(s, true);

    // Triangles, one strip between vertex rows j and j+1 at a time.
    for (int j = -rings; j < rings; ++j)
    {
        const int s = j < 0 ? j : j + 1;
        std::vector<Triangle> strip;
        const int hw = half_width(rings, j);
        const int hw_up = half_width(rings, j + 1);
        for (int x2 = -hw; x2 <= hw; x2 += 2)
        {
            const int a = ap.vertex_at({x2, j});
            const int b = ap.vertex_at({x2 + 2, j});
            const int c = ap.vertex_at({x2 + 1, j + 1});
            if (a < 0 || b < 0 || c < 0)
                continue;
            Triangle t;
            t.row = s;
            t.r = x2 + 1;
            t.parity = Parity::Up;
            t.vertices = {a, b, c};
            t.centroid = {cell_side * (x2 + 1) / 2.0, dy * (j + 1.0 / 3.0)};
            strip.push_back(t);
        }
        for (int x2 = -hw_up; x2 <= hw_up; x2 += 2)
        {
            const int d = ap.vertex_at({x2, j + 1});
            const int e = ap.vertex_at({x2 + 2, j + 1});
            const int f = ap.vertex_at({x2 + 1, j});
            if (d < 0 || e < 0 || f < 0)
                continue;
            Triangle t;
            t.row = s;
            t.r = x2 + 1;
            t.parity = Parity::Down;
            t.vertices = {f, e, d}; // counterclockwise
            t.centroid = {cell_side * (x2 + 1) / 2.0, dy * (j + 2.0 / 3.0)};
            strip.push_back(t);
        }
        std::sort(strip.begin(), strip.end(), [](const Triangle& a, const Triangle& b) { return a.r < b.r; });
        for (auto& t : strip)
        {
            t.index = static_cast<int>(ap.triangles_.size());
            ap.triangles_.push_back(t);
        }
    }

    // Edges with their global orientation.
    ap.incidence_.assign(ap.vertices_.size(), {});
    ap.vertex_triangles_.assign(ap.vertices_.size(), {});
    std::map<std::pair<int, int>, int> edge_ids;
    for (auto& t : ap.triangles_)
    {
        for (int i = 0; i < 3; ++i)
        {
            const int u = t.vertices[static_cast<std::size_t>(i)];
            const int v = t.vertices[static_cast<std::size_t>((i + 1) % 3)];
            const auto key = std::minmax(u, v);
            auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(ap.edges_.size()));
            if (inserted)
            {
                OrientedEdge e;
                const bool fwd = points_forward(ap.vertices_[static_cast<std::size_t>(u)].site,
                                                ap.vertices_[static_cast<std::size_t>(v)].site);
                e.tail = fwd ? u : v;
                e.head = fwd ? v : u;
                e.triangles[0] = t.index;
                ap.edges_.push_back(e);
                ap.incidence_[static_cast<std::size_t>(u)].push_back({v, it->second});
                ap.incidence_[static_cast<std::size_t>(v)].push_back({u, it->second});
            }
            else
            {
                ap.edges_[static_cast<std::size_t>(it->second)].triangles[1] = t.index;
            }
            t.edges[static_cast<std::size_t>(i)] = it->second;
            ap.vertex_triangles_[static_cast<std::size_t>(u)].push_back(t.index);
        }
    }
    for (auto& e : ap.edges_)
        e.on_boundary = e.triangles[1] < 0;
    for (auto& t : ap.triangles_)
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto& e = ap.edges_[static_cast<std::size_t>(t.edges[i])];
            t.neighbors[i] = e.triangles[0] == t.index ? e.triangles[1] : e.triangles[0];
        }

    ap.boundary_ = boundary_heights(ap);

    // Depth: breadth-first distance from the boundary.
    std::vector<int> dist(ap.vertices_.size(), -1);
    std::queue<int> frontier;
    for (std::size_t m = 0; m < ap.external_count(); ++m)
    {
        const int id = ap.external_id(static_cast<int>(m));
        dist[static_cast<std::size_t>(id)] = 0;
        frontier.push(id);
    }
    while (!frontier.empty())
    {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& inc : ap.incidence_[static_cast<std::size_t>(u)])
            if (dist[static_cast<std::size_t>(inc.vertex)] < 0)
            {
                dist[static_cast<std::size_t>(inc.vertex)] = dist[static_cast<std::size_t>(u)] + 1;
                frontier.push(inc.vertex);
            }
    }
    ap.depth_.assign(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(ap.internal_count_));
    return ap;
}

Eigen::Matrix2Xd element_positions(const HexAperture& aperture)
{
    Eigen::Matrix2Xd pos(2, static_cast<Eigen::Index>(aperture.triangle_count()));
    for (const auto& t : aperture.triangles())
        pos.col(t.index) = t.centroid;
    return pos;
}

BoundaryHeights boundary_heights(const HexAperture& aperture)
{
    const auto m_count = static_cast<int>(aperture.external_count());
    BoundaryHeights b;
    b.values.resize(static_cast<std::size_t>(m_count));
    int h = 0;
    for (int m = 0; m < m_count; ++m)
    {
        b.values[static_cast<std::size_t>(m)] = h;
        const int u = aperture.external_id(m);
        const int v = aperture.external_id((m + 1) % m_count);
        const int e = aperture.edge_between(u, v);
        if (e < 0 || !aperture.edge(e).on_boundary)
            throw std::logic_error("boundary walk left the aperture boundary");
        h += aperture.edge(e).tail == u ? 1 : -1;
    }
    if (h != 0)
        throw std::logic_error("boundary height walk does not close");
    return b;
}

int vertex_depth(const HexAperture& aperture, int vertex)
{
    if (!aperture.is_internal(vertex))
        throw std::invalid_argument("vertex_depth expects an internal vertex id");
    return aperture.depths()[static_cast<std::size_t>(vertex)];
}

} // namespace hextile
