#include "hextile/tiling.hpp"

namespace hextile
{

Completion thurston_complete(const HexAperture& aperture, const PartialHeights& partial)
{
    const auto nv = aperture.vertex_count();
    if (partial.values.size() != nv)
        throw std::invalid_argument("partial height vector has wrong length");

    std::vector<int> h(nv, 0);
    std::vector<char> known(nv, 0);
    for (std::size_t v = 0; v < nv; ++v)
        if (partial.values[v])
        {
            h[v] = *partial.values[v];
            known[v] = 1;
        }
        else if (!aperture.is_internal(static_cast<int>(v)))
        {
            throw std::invalid_argument("boundary height missing at vertex " + std::to_string(v));
        }

    for (const auto& e : aperture.edges())
    {
        const auto t = static_cast<std::size_t>(e.tail), d = static_cast<std::size_t>(e.head);
        if (known[t] && known[d] && !admissible_step(e, h[t], h[d]))
            throw TilingError("given heights violate the edge rule between vertices " + std::to_string(e.tail) +
                              " and " + std::to_string(e.head));
    }

    std::vector<int> partner(aperture.triangle_count(), -1);
    std::vector<int> open_count(nv, 0);
    for (std::size_t v = 0; v < nv; ++v)
        open_count[v] = static_cast<int>(aperture.incident_triangles(static_cast<int>(v)).size());

    auto assign = [&](int v, int value) {
        auto i = static_cast<std::size_t>(v);
        if (known[i] && h[i] != value)
            throw TilingError("no tile placement is consistent with the height at vertex " + std::to_string(v));
        h[i] = value;
        known[i] = 1;
    };

    std::size_t remaining = aperture.triangle_count();
    int placements = 0;
    while (remaining > 0)
    {
        int top = -1;
        for (std::size_t v = 0; v < nv; ++v)
            if (known[v] && open_count[v] > 0 && (top < 0 || h[v] > h[static_cast<std::size_t>(top)]))
                top = static_cast<int>(v);
        if (top < 0)
            throw TilingError("uncovered region has no vertex of known height");

        int first = -1;
        for (int t : aperture.incident_triangles(top))
            if (partner[static_cast<std::size_t>(t)] < 0)
            {
                first = t;
                break;
            }
        const auto& tri = aperture.triangle(first);

        // The edge leaving the highest vertex must be covered.
        int mate = -1, low = -1;
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto& e = aperture.edge(tri.edges[i]);
            if (e.tail == top)
            {
                mate = tri.neighbors[i];
                low = e.head;
                break;
            }
        }
        if (mate < 0 || partner[static_cast<std::size_t>(mate)] >= 0)
            throw TilingError("no admissible tile at vertex " + std::to_string(top));

        const int height = h[static_cast<std::size_t>(top)];
        assign(low, height - 2);
        for (int t : {first, mate})
            for (int v : aperture.triangle(t).vertices)
            {
                if (v != top && v != low)
                    assign(v, height - 1);
                --open_count[static_cast<std::size_t>(v)];
            }
        partner[static_cast<std::size_t>(first)] = mate;
        partner[static_cast<std::size_t>(mate)] = first;
        remaining -= 2;
        ++placements;
    }

    for (const auto& e : aperture.edges())
        if (!admissible_step(e, h[static_cast<std::size_t>(e.tail)], h[static_cast<std::size_t>(e.head)]))
            throw TilingError("completed heights violate the edge rule");

    return Completion{Tiling::from_partners(aperture, std::move(partner)), HeightField{std::move(h)}, placements};
}

} // namespace hextile
