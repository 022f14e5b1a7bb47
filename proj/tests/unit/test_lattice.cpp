#include "hextile/hex_lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace hextile;

TEST_CASE("element and vertex counts")
{
    const auto a2 = build_aperture(2, std::sqrt(3.0) / 4.0);
    CHECK(a2.triangle_count() == 24);
    CHECK(a2.internal_count() == 7);
    CHECK(a2.external_count() == 12);
    CHECK(a2.tile_count() == 12);

    const auto a1 = build_aperture(1, 0.5);
    CHECK(a1.triangle_count() == 6);
    CHECK(a1.internal_count() == 1);
    CHECK(a1.external_count() == 6);

    for (int n = 1; n <= 8; ++n)
    {
        const auto ap = build_aperture(n, 1.0);
        CHECK(static_cast<std::int64_t>(ap.triangle_count()) == triangle_count(n));
        CHECK(static_cast<std::int64_t>(ap.internal_count()) == internal_vertex_count(n));
        CHECK(static_cast<std::int64_t>(ap.external_count()) == external_vertex_count(n));
    }
}

TEST_CASE("row widths for ten rings")
{
    const auto ap = build_aperture(10, 0.6);
    CHECK(ap.triangle_count() == 600);
    int sum = 0;
    for (int s = 1; s <= 10; ++s)
    {
        CHECK(ap.row_width(s) == 4 * 10 - 2 * s + 1);
        CHECK(ap.row_width(-s) == 4 * 10 - 2 * s + 1);
        sum += ap.row_width(s) + ap.row_width(-s);
    }
    CHECK(ap.row_width(1) == 39);
    CHECK(ap.row_width(10) == 21);
    CHECK(sum == 600);
}

TEST_CASE("invalid apertures are rejected")
{
    CHECK_THROWS_AS(build_aperture(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_aperture(-2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_aperture(2, 0.0), std::invalid_argument);
}

TEST_CASE("nearest-neighbour centroid distance")
{
    const double rho = std::sqrt(3.0) / 4.0;
    const auto ap = build_aperture(2, rho);
    for (const auto& t : ap.triangles())
        for (int nb : t.neighbors)
            if (nb >= 0)
                CHECK((t.centroid - ap.triangle(nb).centroid).norm() == doctest::Approx(rho / std::sqrt(3.0)));
    const auto pos = element_positions(ap);
    CHECK(pos.cols() == 24);
    CHECK(pos.rowwise().sum().norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("triangle ids follow raster order and neighbours are symmetric")
{
    const auto ap = build_aperture(3, 1.0);
    int prev_row = -100, prev_r = -100;
    for (const auto& t : ap.triangles())
    {
        CHECK(t.index == static_cast<int>(&t - ap.triangles().data()));
        CHECK(t.row != 0);
        if (t.row == prev_row)
            CHECK(t.r > prev_r);
        else
            CHECK(t.row > prev_row);
        prev_row = t.row;
        prev_r = t.r;
        int boundary_edges = 0;
        for (std::size_t i = 0; i < 3; ++i)
        {
            const int nb = t.neighbors[i];
            if (nb < 0)
            {
                ++boundary_edges;
                CHECK(ap.edge(t.edges[i]).on_boundary);
                continue;
            }
            const auto& other = ap.triangle(nb);
            CHECK(other.parity != t.parity);
            CHECK(std::count(other.neighbors.begin(), other.neighbors.end(), t.index) == 1);
        }
        CHECK(boundary_edges <= 2);
    }
}

TEST_CASE("edge orientation runs counterclockwise around up triangles")
{
    for (int n = 1; n <= 4; ++n)
    {
        const auto ap = build_aperture(n, 1.0);
        for (const auto& t : ap.triangles())
        {
            int net = 0;
            for (std::size_t i = 0; i < 3; ++i)
            {
                const auto& e = ap.edge(t.edges[i]);
                const int a = t.vertices[i], b = t.vertices[(i + 1) % 3];
                net += (e.tail == a && e.head == b) ? 1 : -1;
                const auto d2 = ap.vertex(e.head).site.x2 - ap.vertex(e.tail).site.x2;
                const auto dr = ap.vertex(e.head).site.row - ap.vertex(e.tail).site.row;
                const bool allowed = (d2 == 2 && dr == 0) || (d2 == -1 && dr == 1) || (d2 == -1 && dr == -1);
                CHECK(allowed);
            }
            CHECK(net == (t.parity == Parity::Up ? 3 : -3));
        }
    }
}

TEST_CASE("vertex layout")
{
    const auto ap = build_aperture(3, 1.0);
    for (std::size_t v = 0; v < ap.vertex_count(); ++v)
    {
        const bool internal = ap.is_internal(static_cast<int>(v));
        CHECK(internal == !ap.vertex(static_cast<int>(v)).external);
        const auto k = ap.incident_triangles(static_cast<int>(v)).size();
        if (internal)
        {
            CHECK(k == 6);
            CHECK(ap.incident(static_cast<int>(v)).size() == 6);
        }
        else
        {
            CHECK(k >= 1);
            CHECK(k <= 3);
        }
        CHECK(ap.vertex_at(ap.vertex(static_cast<int>(v)).site) == static_cast<int>(v));
    }
    CHECK(ap.vertex(ap.external_id(0)).site == LatticeSite{-3, -3});
    CHECK(ap.vertex_at({100, 0}) == -1);
    CHECK(ap.edge_between(0, 0) == -1);

    auto ids = ap.incident_triangles(0);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("boundary heights and depths match the independent oracle")
{
    const auto a1 = build_aperture(1, 1.0);
    CHECK(a1.boundary().values == std::vector<int>{0, 1, 0, 1, 0, 1});
    CHECK(std::vector<int>(a1.depths().begin(), a1.depths().end()) == std::vector<int>{1});

    const auto a2 = build_aperture(2, 1.0);
    CHECK(a2.boundary().values == std::vector<int>{0, 1, 2, 1, 0, 1, 2, 1, 0, 1, 2, 1});
    CHECK(std::vector<int>(a2.depths().begin(), a2.depths().end()) == std::vector<int>{1, 1, 1, 2, 1, 1, 1});

    const auto a3 = build_aperture(3, 1.0);
    CHECK(a3.boundary().values == std::vector<int>{0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 2, 1});
    CHECK(std::vector<int>(a3.depths().begin(), a3.depths().end()) ==
          std::vector<int>{1, 1, 1, 1, 2, 2, 1, 1, 2, 3, 2, 1, 1, 2, 2, 1, 1, 1, 1});
    CHECK(boundary_heights(a3).values == a3.boundary().values);
    CHECK(vertex_depth(a3, 9) == 3);
}

TEST_CASE("element positions are invariant under 60 degree rotation")
{
    for (int n = 1; n <= 5; ++n)
    {
        const auto ap = build_aperture(n, 0.5);
        const auto pos = element_positions(ap);
        const double c = 0.5, s = std::sqrt(3.0) / 2.0;
        Eigen::Matrix2d rot;
        rot << c, -s, s, c;
        const Eigen::Matrix2Xd turned = rot * pos;
        for (Eigen::Index i = 0; i < turned.cols(); ++i)
        {
            double best = 1e9;
            for (Eigen::Index j = 0; j < pos.cols(); ++j)
                best = std::min(best, (turned.col(i) - pos.col(j)).norm());
            CHECK(best < 1e-12);
        }
    }
}

TEST_CASE("up and down triangles are equal in number")
{
    for (int n = 1; n <= 6; ++n)
    {
        const auto ap = build_aperture(n, 1.0);
        const auto up = std::count_if(ap.triangles().begin(), ap.triangles().end(),
                                      [](const Triangle& t) { return t.parity == Parity::Up; });
        CHECK(up * 2 == static_cast<long>(ap.triangle_count()));
    }
}
