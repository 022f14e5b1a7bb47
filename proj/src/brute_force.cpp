#include "hextile/enumeration.hpp"

namespace hextile
{
namespace
{

void match_from(const HexAperture& ap, std::vector<int>& partner, std::size_t first_free, std::vector<Tiling>& out)
{
    while (first_free < partner.size() && partner[first_free] >= 0)
        ++first_free;
    if (first_free == partner.size())
    {
        out.push_back(Tiling::from_partners(ap, partner));
        return;
    }
    const auto& t = ap.triangle(static_cast<int>(first_free));
    for (int nb : t.neighbors)
    {
        if (nb < 0 || partner[static_cast<std::size_t>(nb)] >= 0)
            continue;
        partner[first_free] = nb;
        partner[static_cast<std::size_t>(nb)] = static_cast<int>(first_free);
        match_from(ap, partner, first_free + 1, out);
        partner[first_free] = -1;
        partner[static_cast<std::size_t>(nb)] = -1;
    }
}

} // namespace

std::vector<Tiling> brute_force_enumerate(const HexAperture& aperture)
{
    if (aperture.rings() > 3)
        throw std::invalid_argument("brute-force enumeration is limited to rings <= 3");
    std::vector<int> partner(aperture.triangle_count(), -1);
    std::vector<Tiling> out;
    match_from(aperture, partner, 0, out);
    return out;
}

} // namespace hextile
