#include "hextile/enumeration.hpp"

#include <map>
#include <stdexcept>

namespace hextile
{
namespace
{

void add_factors(std::map<int, int>& exponents, int value, int sign)
{
    for (int p = 2; p * p <= value; ++p)
        while (value % p == 0)
        {
            exponents[p] += sign;
            value /= p;
        }
    if (value > 1)
        exponents[value] += sign;
}

// Local-minimum test on the previous heights. Each side of the comparison is
// applied only when the consecutive internal index is the lattice neighbour in
// the same row; across a row break the two vertices are unrelated.
bool is_raise_candidate(const HexAperture& ap, std::span<const int> h, std::size_t xi)
{
    auto same_row = [&](std::size_t a, std::size_t b) {
        return ap.vertex(static_cast<int>(a)).site.row == ap.vertex(static_cast<int>(b)).site.row;
    };
    if (xi > 0 && same_row(xi - 1, xi) && h[xi - 1] < h[xi])
        return false;
    if (xi + 1 < h.size() && same_row(xi, xi + 1) && h[xi] > h[xi + 1])
        return false;
    return true;
}

} // namespace

BigInt cardinality(int a, int b, int c)
{
    if (a < 1 || b < 1 || c < 1)
        throw std::invalid_argument("hexagon sides must be >= 1");
    std::map<int, int> exponents;
    for (int i = 1; i <= a; ++i)
        for (int j = 1; j <= b; ++j)
            for (int g = 1; g <= c; ++g)
            {
                add_factors(exponents, i + j + g - 1, +1);
                add_factors(exponents, i + j + g - 2, -1);
            }
    BigInt t = 1;
    for (const auto& [p, e] : exponents)
    {
        if (e < 0)
            throw std::logic_error("tiling count is not integral");
        for (int k = 0; k < e; ++k)
            t *= p;
    }
    return t;
}

CardinalityResult count_tilings(int a, int b, int c) { return {cardinality(a, b, c), {a, b, c}}; }

std::optional<std::pair<TilingWord, HeightField>> successor(const WordCodec& codec, const TilingWord& word,
                                                            const HeightField& heights)
{
    const auto& ap = codec.aperture();
    const std::size_t length = codec.length();
    const auto depth = codec.depth();
    const auto h = heights.internal(ap);

    for (std::size_t k = length; k-- > 0;)
    {
        if (!is_raise_candidate(ap, h, k) || word[k] + 1 > depth[k])
            continue;
        PartialHeights partial = codec.boundary_only();
        for (std::size_t j = 0; j < k; ++j)
            partial.values[j] = h[j];
        partial.values[k] = h[k] + 3;
        try
        {
            auto done = thurston_complete(ap, partial);
            TilingWord next = codec.encode(done.heights);
            return std::make_pair(std::move(next), std::move(done.heights));
        }
        catch (const TilingError&)
        {
            // prefix not extendable, try the next smaller index
        }
    }
    return std::nullopt;
}

std::optional<TilingWord> successor(const HexAperture& aperture, const TilingWord& word)
{
    const WordCodec codec(aperture);
    if (!codec.is_valid(word))
        throw std::invalid_argument("successor of an invalid word: " + to_string(word));
    auto next = successor(codec, word, codec.heights(word));
    if (!next)
        return std::nullopt;
    return std::move(next->first);
}

TilingEnumerator::TilingEnumerator(const HexAperture& aperture)
    : codec_(aperture), word_{std::vector<int>(codec_.length(), 0)}, heights_(codec_.heights(word_))
{
}

TilingEnumerator::TilingEnumerator(const HexAperture& aperture, TilingWord word, std::uint64_t index)
    : codec_(aperture), word_(std::move(word)), index_(index)
{
    if (!codec_.is_valid(word_))
        throw std::invalid_argument("cannot resume from an invalid word: " + to_string(word_));
    if (index_ < 1)
        throw std::invalid_argument("enumeration index starts at 1");
    heights_ = codec_.heights(word_);
}

bool TilingEnumerator::advance()
{
    auto next = successor(codec_, word_, heights_);
    if (!next)
        return false;
    word_ = std::move(next->first);
    heights_ = std::move(next->second);
    ++index_;
    return true;
}

void enumerate_all(const HexAperture& aperture,
                   const std::function<void(std::uint64_t, const TilingWord&, const Tiling&)>& visit)
{
    TilingEnumerator cursor(aperture);
    do
    {
        visit(cursor.index(), cursor.word(), cursor.tiling());
    } while (cursor.advance());
}

} // namespace hextile
