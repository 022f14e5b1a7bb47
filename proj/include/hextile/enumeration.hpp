#ifndef HEXTILE_ENUMERATION_HPP
#define HEXTILE_ENUMERATION_HPP

#include "hextile/tiling.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hextile
{

using BigInt = boost::multiprecision::cpp_int;

struct CardinalityResult
{
    BigInt count;
    std::array<int, 3> sides{};
};

// Exact number of diamond tilings of the hexagon with sides a, b, c, a, b, c
// (MacMahon's box formula). Throws std::invalid_argument for sides < 1.
BigInt cardinality(int a, int b, int c);
CardinalityResult count_tilings(int a, int b, int c);

// Next word in lexicographic order, or nullopt after the maximal word.
// Throws std::invalid_argument for an invalid input word.
std::optional<TilingWord> successor(const HexAperture& aperture, const TilingWord& word);

/// Resumable cursor over all tilings, starting at the minimal tiling.
class TilingEnumerator
{
public:
    explicit TilingEnumerator(const HexAperture& aperture);
    // Resume at a stored word; `index` is its 1-based position t.
    TilingEnumerator(const HexAperture& aperture, TilingWord word, std::uint64_t index);

    const TilingWord& word() const noexcept { return word_; }
    const HeightField& heights() const noexcept { return heights_; }
    std::uint64_t index() const noexcept { return index_; }
    Tiling tiling() const { return codec_.decode(word_); }
    const WordCodec& codec() const noexcept { return codec_; }

    // Moves to the successor; false (and no change) after the last tiling.
    bool advance();

private:
    WordCodec codec_;
    TilingWord word_;
    HeightField heights_;
    std::uint64_t index_ = 1;
};

// Successor on a prepared codec; also returns the completed height field.
std::optional<std::pair<TilingWord, HeightField>> successor(const WordCodec& codec, const TilingWord& word,
                                                            const HeightField& heights);

// Calls visit(t, word, tiling) for t = 1..T in enumeration order.
void enumerate_all(const HexAperture& aperture,
                   const std::function<void(std::uint64_t, const TilingWord&, const Tiling&)>& visit);

// All perfect matchings of the triangle adjacency graph by backtracking.
// Independent of the height-function machinery; intended for rings <= 3.
std::vector<Tiling> brute_force_enumerate(const HexAperture& aperture);

} // namespace hextile

#endif // HEXTILE_ENUMERATION_HPP
