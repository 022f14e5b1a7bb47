#ifndef HEXTILE_TILING_HPP
#define HEXTILE_TILING_HPP

#include "hextile/hex_lattice.hpp"

#include <array>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hextile
{

// Diamond orientation, named after the direction of the lozenge's long axis.
//   Vertical: the two triangles share a horizontal edge.
//   Left:     they share an edge rising to the right ("/"); the tile leans left.
//   Right:    they share an edge falling to the right ("\"); the tile leans right.
enum class Orientation : char
{
    Vertical = 'V',
    Left = 'L',
    Right = 'R'
};

char to_char(Orientation o);
Orientation orientation_from_char(char c);

struct Tile
{
    int id = 0;
    Orientation orientation = Orientation::Vertical;
    std::array<int, 2> triangles{}; // ascending triangle ids
};

// Raised for tilings or height data that cannot describe a valid diamond tiling.
class TilingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A complete partition of the aperture's triangles into diamond tiles.
///
/// Tiles are stored in canonical order (ascending smallest triangle id), so two
/// Tiling objects describing the same partition compare equal.
class Tiling
{
public:
    // Validates that the pairs cover every triangle exactly once with
    // edge-adjacent triangles; throws TilingError naming offending triangles.
    static Tiling from_pairs(const HexAperture& aperture, std::span<const std::pair<int, int>> pairs);

    // partner[i] is the triangle sharing a tile with triangle i.
    static Tiling from_partners(const HexAperture& aperture, std::vector<int> partner);

    std::span<const Tile> tiles() const noexcept { return tiles_; }
    std::span<const int> assignment() const noexcept { return assignment_; }
    int tile_of(int triangle) const { return assignment_.at(static_cast<std::size_t>(triangle)); }
    int partner(int triangle) const { return partner_.at(static_cast<std::size_t>(triangle)); }
    std::size_t size() const noexcept { return tiles_.size(); }

    // True when the edge is interior to a tile.
    bool covers(const OrientedEdge& e) const
    {
        return e.triangles[1] >= 0 && partner_[static_cast<std::size_t>(e.triangles[0])] == e.triangles[1];
    }

    friend bool operator==(const Tiling& a, const Tiling& b) { return a.partner_ == b.partner_; }
    friend auto operator<=>(const Tiling& a, const Tiling& b) { return a.partner_ <=> b.partner_; }

private:
    std::vector<int> partner_;
    std::vector<int> assignment_;
    std::vector<Tile> tiles_;
};

/// Heights on every lattice vertex, indexed by global vertex id
/// (internal vertices first, then the boundary walk).
struct HeightField
{
    std::vector<int> values;

    std::span<const int> internal(const HexAperture& ap) const
    {
        return std::span<const int>(values).first(ap.internal_count());
    }
    int operator[](int vertex) const { return values[static_cast<std::size_t>(vertex)]; }
};

/// L-letter integer encoding of a tiling: h_l = 3 w_l + h_l(minimal tiling).
struct TilingWord
{
    std::vector<int> letters;

    std::size_t size() const noexcept { return letters.size(); }
    int operator[](std::size_t i) const { return letters[i]; }
    int& operator[](std::size_t i) { return letters[i]; }
    friend bool operator==(const TilingWord&, const TilingWord&) = default;
    friend auto operator<=>(const TilingWord&, const TilingWord&) = default;
};

std::string to_string(const TilingWord& w);

// Heights known on a subset of vertices; boundary vertices must all be set.
struct PartialHeights
{
    std::vector<std::optional<int>> values; // global vertex ids
};

struct Completion
{
    Tiling tiling;
    HeightField heights;
    int placements = 0; // tiles placed by the greedy loop
};

/// Tiling-independent data for one aperture: boundary heights, minimal-tiling
/// heights and vertex depths. Everything word-related goes through here.
class WordCodec
{
public:
    explicit WordCodec(const HexAperture& aperture);

    const HexAperture& aperture() const noexcept { return *aperture_; }
    std::span<const int> minimal_heights() const noexcept { return minimal_; } // internal only
    std::span<const int> depth() const noexcept { return aperture_->depths(); }
    std::size_t length() const noexcept { return minimal_.size(); }

    TilingWord encode(const Tiling& tiling) const;
    TilingWord encode(const HeightField& heights) const;
    Tiling decode(const TilingWord& word) const;
    HeightField heights(const TilingWord& word) const; // no validity check

    bool is_valid(const TilingWord& word) const;

    // Fills the boundary values of a PartialHeights.
    PartialHeights boundary_only() const;

private:
    const HexAperture* aperture_;
    std::vector<int> minimal_;
};

Tiling minimal_tiling(const HexAperture& aperture);
TilingWord maximal_word(const HexAperture& aperture);

// Propagates heights breadth-first from the boundary; throws TilingError if two
// paths disagree.
HeightField height_field(const HexAperture& aperture, const Tiling& tiling);

TilingWord encode(const HexAperture& aperture, const Tiling& tiling);
Tiling decode(const HexAperture& aperture, const TilingWord& word);
bool is_valid_word(const HexAperture& aperture, const TilingWord& word);

// True when the step from `from` to `to` along an edge is consistent with
// some diamond tiling (+1 along the orientation on a tile contour, -2 across a
// covered edge).
bool admissible_step(const OrientedEdge& e, int h_tail, int h_head);

/// Greedy completion of a partially known height field: repeatedly takes the
/// highest known vertex touching the uncovered region (lowest id on ties),
/// covers the outgoing edge of its lowest-index uncovered triangle, and
/// propagates the tile's heights. The result is the pointwise-lowest tiling
/// compatible with the given heights. Throws TilingError when none exists.
Completion thurston_complete(const HexAperture& aperture, const PartialHeights& partial);

// Side lengths l_1..l_6 (units of cell_side).
bool is_tileable(const std::array<int, 6>& sides);

} // namespace hextile

#endif // HEXTILE_TILING_HPP
