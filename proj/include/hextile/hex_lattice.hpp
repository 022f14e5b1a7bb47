#ifndef HEXTILE_HEX_LATTICE_HPP
#define HEXTILE_HEX_LATTICE_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace hextile
{

// Lattice sites are addressed with a doubled x coordinate so that every
// vertex of the triangular lattice has integer coordinates:
//   x = cell_side * x2 / 2,   y = cell_side * sqrt(3)/2 * row.
struct LatticeSite
{
    int x2 = 0;
    int row = 0;
    friend bool operator==(const LatticeSite&, const LatticeSite&) = default;
};

enum class Parity : std::uint8_t
{
    Up,  // point-up (white)
    Down // point-down (black)
};

struct Triangle
{
    int index = 0;
    int row = 0;          // s in [-rings, rings], s != 0
    int r = 0;            // in-row index, symmetric around 0
    Parity parity = Parity::Up;
    std::array<int, 3> vertices{}; // counterclockwise
    std::array<int, 3> edges{};    // edges[i] joins vertices[i] and vertices[(i+1)%3]
    std::array<int, 3> neighbors{-1, -1, -1}; // triangle across edges[i], -1 on the boundary
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero(); // wavelengths
};

// Every lattice edge carries one global orientation: the direction in which it
// is traversed counterclockwise around its point-up triangle (equivalently
// clockwise around its point-down triangle).
struct OrientedEdge
{
    int tail = 0;
    int head = 0;
    bool on_boundary = false;
    std::array<int, 2> triangles{-1, -1};
};

struct Vertex
{
    LatticeSite site;
    bool external = false;
    Eigen::Vector2d position = Eigen::Vector2d::Zero(); // wavelengths
};

struct Incidence
{
    int vertex = 0; // the neighbouring vertex
    int edge = 0;
};

struct BoundaryHeights
{
    std::vector<int> values; // h_1 ... h_M, clockwise from the bottom-left vertex
};

/// Regular hexagonal aperture of unit equilateral triangles with flat top and
/// bottom sides, centred at the origin.
///
/// Vertex ids are global: internal vertices occupy [0, L) in raster order
/// (rows bottom to top, left to right); external vertices occupy [L, L + M)
/// ordered clockwise starting from the bottom-left corner. Triangle ids follow
/// the raster order of rows s = -rings..rings (s != 0), then r ascending.
class HexAperture
{
public:
    int rings() const noexcept { return rings_; }
    double cell_side() const noexcept { return cell_side_; }

    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    std::size_t tile_count() const noexcept { return triangles_.size() / 2; }
    std::size_t internal_count() const noexcept { return internal_count_; }
    std::size_t external_count() const noexcept { return vertices_.size() - internal_count_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }

    std::span<const Triangle> triangles() const noexcept { return triangles_; }
    std::span<const Vertex> vertices() const noexcept { return vertices_; }
    std::span<const OrientedEdge> edges() const noexcept { return edges_; }

    const Triangle& triangle(int id) const { return triangles_.at(static_cast<std::size_t>(id)); }
    const Vertex& vertex(int id) const { return vertices_.at(static_cast<std::size_t>(id)); }
    const OrientedEdge& edge(int id) const { return edges_.at(static_cast<std::size_t>(id)); }

    bool is_internal(int vertex_id) const noexcept
    {
        return vertex_id >= 0 && static_cast<std::size_t>(vertex_id) < internal_count_;
    }
    int external_id(int m) const noexcept { return static_cast<int>(internal_count_) + m; }

    std::span<const Incidence> incident(int vertex_id) const;
    std::span<const int> incident_triangles(int vertex_id) const;

    // -1 when the two vertices are not adjacent.
    int edge_between(int u, int v) const;

    // -1 when the site lies outside the aperture.
    int vertex_at(LatticeSite site) const;

    // Number of triangles in row s.
    int row_width(int s) const;

    const BoundaryHeights& boundary() const noexcept { return boundary_; }
    std::span<const int> depths() const noexcept { return depth_; }

private:
    friend HexAperture build_aperture(int rings, double cell_side);
    HexAperture() = default;

    int rings_ = 0;
    double cell_side_ = 0.0;
    std::size_t internal_count_ = 0;
    std::vector<Triangle> triangles_;
    std::vector<Vertex> vertices_;
    std::vector<OrientedEdge> edges_;
    std::vector<std::vector<Incidence>> incidence_;
    std::vector<std::vector<int>> vertex_triangles_;
    std::vector<int> site_index_; // (2*rings+1) x (4*rings+1), -1 outside
    BoundaryHeights boundary_;
    std::vector<int> depth_; // per internal vertex
};

// Throws std::invalid_argument for rings < 1 or cell_side <= 0.
HexAperture build_aperture(int rings, double cell_side);

// One element per triangle, at the centroid; column i belongs to triangle i.
Eigen::Matrix2Xd element_positions(const HexAperture& aperture);

// Boundary heights walking clockwise from the bottom-left vertex with h_1 = 0.
// Throws std::logic_error if the walk does not close.
BoundaryHeights boundary_heights(const HexAperture& aperture);

// Graph distance from the nearest external vertex; `vertex` is an internal id.
int vertex_depth(const HexAperture& aperture, int vertex);

// Analytic counts for a regular aperture.
constexpr std::int64_t triangle_count(std::int64_t rings) { return 6 * rings * rings; }
constexpr std::int64_t internal_vertex_count(std::int64_t rings) { return 3 * rings * rings - 3 * rings + 1; }
constexpr std::int64_t external_vertex_count(std::int64_t rings) { return 6 * rings; }

} // namespace hextile

#endif // HEXTILE_HEX_LATTICE_HPP
