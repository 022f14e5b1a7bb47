#ifndef HEXTILE_IO_HPP
#define HEXTILE_IO_HPP

#include "hextile/pattern.hpp"
#include "hextile/tiling.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hextile
{

// Malformed or inconsistent input data (bad rows, wrong sizes, broken tilings).
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(const std::string& text);

// ---------------------------------------------------------------------------
// Tiling files
//
//   rings 4
//   word 0 0 1 ...
//   0,V,3,4
//   ...
//
// Blank lines and text after '#' are ignored. The word line is optional on
// input; when present it must agree with the tiles.

struct TileRecord
{
    int q = 0;
    Orientation orientation = Orientation::Vertical;
    int a = 0;
    int b = 0;
};

struct TilingRecord
{
    int rings = 0;
    std::optional<TilingWord> word;
    std::vector<TileRecord> tiles;
};

void write_tiling(std::ostream& out, const HexAperture& aperture, const Tiling& tiling);
TilingRecord read_tiling_record(std::istream& in);
// Validates the record against the aperture; errors name the offending triangles.
Tiling to_tiling(const HexAperture& aperture, const TilingRecord& record);
Tiling read_tiling(std::istream& in, const HexAperture& aperture);

// ---------------------------------------------------------------------------
// Excitation CSV: header `triangle_index,amplitude,phase_deg`, one row per
// element in any order. Degree text is converted at 50-digit precision and
// rounded once, so every stored phase survives a write/read cycle unchanged.

void write_excitation_csv(std::ostream& out, const ExcitationSet& excitation);
ExcitationSet read_excitation_csv(std::istream& in, Eigen::Index expected_size);
ExcitationSet read_excitation_file(const std::string& path, Eigen::Index expected_size);

// Throws InputError for text that is not a finite number.
double phase_from_degrees(const std::string& text);
// Shortest text that phase_from_degrees maps back to exactly `rad`.
std::string phase_to_degrees(double rad);

// ---------------------------------------------------------------------------
// Enumeration checkpoint
//
//   0 1 0 2 ...     word of the last evaluated tiling
//   1234            its index t
//   config <hash>   optional tag line

struct EnumerationCheckpoint
{
    TilingWord word;
    std::uint64_t index = 0;
    std::string tag;
};

void write_checkpoint(std::ostream& out, const EnumerationCheckpoint& checkpoint);
EnumerationCheckpoint read_checkpoint(std::istream& in);

// ---------------------------------------------------------------------------
// Pattern exports

// `u,v,power_db` for visible samples, clamped below at -100 dB.
void write_pattern_csv(std::ostream& out, const PatternGrid& pattern);

struct PatternCut
{
    std::string axis; // "u" or "v"
    std::vector<double> coordinate;
    std::vector<double> power_db;
};

// Cuts through the grid peak along u (phi = 0) and v (phi = 90 deg).
PatternCut cut_phi0(const PatternGrid& pattern);
PatternCut cut_phi90(const PatternGrid& pattern);
void write_cut_csv(std::ostream& out, const PatternCut& cut);

double clamp_db(double linear_power);

} // namespace hextile

#endif // HEXTILE_IO_HPP
