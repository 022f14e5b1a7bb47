#include "hextile/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace hextile
{
namespace
{

Orientation orientation_of_edge(const HexAperture& ap, const OrientedEdge& e)
{
    const auto a = ap.vertex(e.tail).site;
    const auto b = ap.vertex(e.head).site;
    if (a.row == b.row)
        return Orientation::Vertical;
    const bool rising = (b.x2 - a.x2) * (b.row - a.row) > 0;
    return rising ? Orientation::Left : Orientation::Right;
}

int shared_edge(const Triangle& a, int other)
{
    for (std::size_t i = 0; i < 3; ++i)
        if (a.neighbors[i] == other)
            return a.edges[i];
    return -1;
}

} // namespace

char to_char(Orientation o) { return static_cast<char>(o); }

Orientation orientation_from_char(char c)
{
    switch (c)
    {
    case 'V': return Orientation::Vertical;
    case 'L': return Orientation::Left;
    case 'R': return Orientation::Right;
    default: throw std::invalid_argument(std::string("unknown tile orientation '") + c + "'");
    }
}

std::string to_string(const TilingWord& w)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < w.size(); ++i)
        os << (i ? " " : "") << w[i];
    return os.str();
}

Tiling Tiling::from_pairs(const HexAperture& aperture, std::span<const std::pair<int, int>> pairs)
{
    const auto n = static_cast<int>(aperture.triangle_count());
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    auto check_index = [&](int t) {
        if (t < 0 || t >= n)
            throw TilingError("triangle index " + std::to_string(t) + " outside the aperture");
    };
    for (const auto& [a, b] : pairs)
    {
        check_index(a);
        check_index(b);
        for (int t : {a, b})
            if (partner[static_cast<std::size_t>(t)] >= 0)
                throw TilingError("triangle " + std::to_string(t) + " is used by more than one tile");
        if (a == b)
            throw TilingError("triangle " + std::to_string(a) + " is used by more than one tile");
        partner[static_cast<std::size_t>(a)] = b;
        partner[static_cast<std::size_t>(b)] = a;
    }
    return from_partners(aperture, std::move(partner));
}

Tiling Tiling::from_partners(const HexAperture& aperture, std::vector<int> partner)
{
    const auto n = aperture.triangle_count();
    if (partner.size() != n)
        throw TilingError("partner vector has wrong length");
    std::vector<int> uncovered;
    for (std::size_t i = 0; i < n; ++i)
        if (partner[i] < 0)
            uncovered.push_back(static_cast<int>(i));
    if (!uncovered.empty())
    {
        std::string msg = "incomplete tiling, uncovered triangles:";
        for (int t : uncovered)
            msg += " " + std::to_string(t);
        throw TilingError(msg);
    }

    Tiling tiling;
    tiling.assignment_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i)
    {
        const int j = partner[i];
        if (j < 0 || static_cast<std::size_t>(j) >= n || partner[static_cast<std::size_t>(j)] != static_cast<int>(i))
            throw TilingError("triangle " + std::to_string(i) + " has an inconsistent partner");
        if (static_cast<std::size_t>(j) < i)
            continue;
        const int e = shared_edge(aperture.triangle(static_cast<int>(i)), j);
        if (e < 0)
            throw TilingError("triangles " + std::to_string(i) + " and " + std::to_string(j) + " are not edge-adjacent");
        Tile tile;
        tile.id = static_cast<int>(tiling.tiles_.size());
        tile.triangles = {static_cast<int>(i), j};
        tile.orientation = orientation_of_edge(aperture, aperture.edge(e));
        tiling.assignment_[i] = tile.id;
        tiling.assignment_[static_cast<std::size_t>(j)] = tile.id;
        tiling.tiles_.push_back(tile);
    }
    tiling.partner_ = std::move(partner);
    return tiling;
}

bool admissible_step(const OrientedEdge& e, int h_tail, int h_head)
{
    const int d = h_head - h_tail;
    return e.on_boundary ? d == 1 : (d == 1 || d == -2);
}

Tiling minimal_tiling(const HexAperture& aperture)
{
    // Three rhombi meet at the centre, split along the rays towards the
    // corners at 0, 120 and 240 degrees; each is filled with one orientation.
    std::vector<int> partner(aperture.triangle_count(), -1);
    for (const auto& t : aperture.triangles())
    {
        double angle = std::atan2(t.centroid.y(), t.centroid.x()) * 180.0 / std::numbers::pi;
        if (angle < 0.0)
            angle += 360.0;
        const Orientation wanted = angle < 120.0 ? Orientation::Left
                                   : angle < 240.0 ? Orientation::Vertical
                                                   : Orientation::Right;
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto& e = aperture.edge(t.edges[i]);
            if (!e.on_boundary && orientation_of_edge(aperture, e) == wanted)
            {
                partner[static_cast<std::size_t>(t.index)] = t.neighbors[i];
                break;
            }
        }
    }
    return Tiling::from_partners(aperture, std::move(partner));
}

HeightField height_field(const HexAperture& aperture, const Tiling& tiling)
{
    if (tiling.assignment().size() != aperture.triangle_count())
        throw TilingError("tiling does not belong to this aperture");
    std::vector<int> h(aperture.vertex_count(), 0);
    std::vector<char> known(aperture.vertex_count(), 0);
    std::queue<int> frontier;
    const auto& boundary = aperture.boundary().values;
    for (std::size_t m = 0; m < boundary.size(); ++m)
    {
        const int id = aperture.external_id(static_cast<int>(m));
        h[static_cast<std::size_t>(id)] = boundary[m];
        known[static_cast<std::size_t>(id)] = 1;
        frontier.push(id);
    }
    while (!frontier.empty())
    {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& inc : aperture.incident(u))
        {
            const auto& e = aperture.edge(inc.edge);
            const int step = tiling.covers(e) ? -2 : 1;
            const int value = h[static_cast<std::size_t>(u)] + (e.tail == u ? step : -step);
            auto v = static_cast<std::size_t>(inc.vertex);
            if (known[v])
            {
                if (h[v] != value)
                    throw TilingError("height propagation is inconsistent at vertex " + std::to_string(inc.vertex));
                continue;
            }
            h[v] = value;
            known[v] = 1;
            frontier.push(inc.vertex);
        }
    }
    return HeightField{std::move(h)};
}

WordCodec::WordCodec(const HexAperture& aperture) : aperture_(&aperture)
{
    const auto h = height_field(aperture, minimal_tiling(aperture));
    const auto internal = h.internal(aperture);
    minimal_.assign(internal.begin(), internal.end());
}

TilingWord WordCodec::encode(const HeightField& heights) const
{
    TilingWord w;
    w.letters.resize(minimal_.size());
    for (std::size_t l = 0; l < minimal_.size(); ++l)
    {
        const int diff = heights.values[l] - minimal_[l];
        if (diff % 3 != 0)
            throw TilingError("height difference at internal vertex " + std::to_string(l) + " is not a multiple of 3");
        w.letters[l] = diff / 3;
    }
    return w;
}

TilingWord WordCodec::encode(const Tiling& tiling) const { return encode(height_field(*aperture_, tiling)); }

HeightField WordCodec::heights(const TilingWord& word) const
{
    if (word.size() != minimal_.size())
        throw std::invalid_argument("word length " + std::to_string(word.size()) + " does not match L = " +
                                    std::to_string(minimal_.size()));
    HeightField h;
    h.values.resize(aperture_->vertex_count());
    for (std::size_t l = 0; l < minimal_.size(); ++l)
        h.values[l] = 3 * word[l] + minimal_[l];
    const auto& boundary = aperture_->boundary().values;
    std::copy(boundary.begin(), boundary.end(), h.values.begin() + static_cast<std::ptrdiff_t>(minimal_.size()));
    return h;
}

bool WordCodec::is_valid(const TilingWord& word) const
{
    if (word.size() != minimal_.size())
        throw std::invalid_argument("word length " + std::to_string(word.size()) + " does not match L = " +
                                    std::to_string(minimal_.size()));
    const auto depths = depth();
    for (std::size_t l = 0; l < word.size(); ++l)
        if (word[l] < 0 || word[l] > depths[l])
            return false;
    const auto h = heights(word);
    for (const auto& e : aperture_->edges())
        if (!admissible_step(e, h[e.tail], h[e.head]))
            return false;
    return true;
}

Tiling WordCodec::decode(const TilingWord& word) const
{
    if (!is_valid(word))
        throw std::invalid_argument("invalid tiling word: " + to_string(word));
    const auto h = heights(word);
    std::vector<int> partner(aperture_->triangle_count(), -1);
    for (const auto& t : aperture_->triangles())
        for (std::size_t i = 0; i < 3; ++i)
        {
            const auto& e = aperture_->edge(t.edges[i]);
            if (h[e.head] - h[e.tail] == -2)
            {
                partner[static_cast<std::size_t>(t.index)] = t.neighbors[i];
                break;
            }
        }
    return Tiling::from_partners(*aperture_, std::move(partner));
}

PartialHeights WordCodec::boundary_only() const
{
    PartialHeights p;
    p.values.resize(aperture_->vertex_count());
    const auto& boundary = aperture_->boundary().values;
    for (std::size_t m = 0; m < boundary.size(); ++m)
        p.values[minimal_.size() + m] = boundary[m];
    return p;
}

TilingWord maximal_word(const HexAperture& aperture)
{
    const auto d = aperture.depths();
    return TilingWord{std::vector<int>(d.begin(), d.end())};
}

TilingWord encode(const HexAperture& aperture, const Tiling& tiling) { return WordCodec(aperture).encode(tiling); }

Tiling decode(const HexAperture& aperture, const TilingWord& word) { return WordCodec(aperture).decode(word); }

bool is_valid_word(const HexAperture& aperture, const TilingWord& word) { return WordCodec(aperture).is_valid(word); }

bool is_tileable(const std::array<int, 6>& sides)
{
    if (std::any_of(sides.begin(), sides.end(), [](int l) { return l <= 0; }))
        return false;
    return sides[0] == sides[3] && sides[1] == sides[4] && sides[2] == sides[5];
}

} // namespace hextile
