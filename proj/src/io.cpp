#include "hextile/io.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hextile
{
namespace
{

using Wide = boost::multiprecision::cpp_bin_float_50;

std::string strip(std::string line)
{
    if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = line.find_last_not_of(" \t\r\n");
    return line.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep))
        out.push_back(strip(field));
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

int parse_int(const std::string& text, const std::string& where)
{
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw InputError(where + ": expected an integer, got '" + text + "'");
    return value;
}

std::string row_label(std::size_t line_no) { return "line " + std::to_string(line_no); }

} // namespace

std::string format_double(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc())
        throw std::logic_error("double formatting failed");
    return {buf, ptr};
}

double parse_double(const std::string& text)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw InputError("expected a number, got '" + text + "'");
    return value;
}

// ---------------------------------------------------------------------------

void write_tiling(std::ostream& out, const HexAperture& aperture, const Tiling& tiling)
{
    out << "rings " << aperture.rings() << '\n';
    out << "word " << to_string(encode(aperture, tiling)) << '\n';
    for (const auto& t : tiling.tiles())
        out << t.id << ',' << to_char(t.orientation) << ',' << t.triangles[0] << ',' << t.triangles[1] << '\n';
}

TilingRecord read_tiling_record(std::istream& in)
{
    TilingRecord rec;
    std::string raw;
    std::size_t line_no = 0;
    bool have_rings = false;
    while (std::getline(in, raw))
    {
        ++line_no;
        const std::string line = strip(raw);
        if (line.empty())
            continue;
        const auto where = row_label(line_no);
        if (line.rfind("rings", 0) == 0)
        {
            rec.rings = parse_int(strip(line.substr(5)), where);
            have_rings = true;
            continue;
        }
        if (line.rfind("word", 0) == 0)
        {
            std::istringstream ss(line.substr(4));
            std::vector<int> letters;
            std::string tok;
            while (ss >> tok)
                letters.push_back(parse_int(tok, where));
            rec.word = TilingWord{std::move(letters)};
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw InputError(where + ": expected 'q,orientation,a,b'");
        TileRecord t;
        t.q = parse_int(fields[0], where);
        if (fields[1].size() != 1)
            throw InputError(where + ": orientation must be V, L or R");
        try
        {
            t.orientation = orientation_from_char(fields[1][0]);
        }
        catch (const std::invalid_argument&)
        {
            throw InputError(where + ": orientation must be V, L or R");
        }
        t.a = parse_int(fields[2], where);
        t.b = parse_int(fields[3], where);
        rec.tiles.push_back(t);
    }
    if (!have_rings)
        throw InputError("tiling file has no 'rings' line");
    return rec;
}

Tiling to_tiling(const HexAperture& aperture, const TilingRecord& record)
{
    if (record.rings != aperture.rings())
        throw InputError("tiling file is for rings " + std::to_string(record.rings) + ", aperture has " +
                         std::to_string(aperture.rings()));
    const int n = static_cast<int>(aperture.triangle_count());
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(record.tiles.size());
    for (const auto& t : record.tiles)
    {
        for (int x : {t.a, t.b})
            if (x < 0 || x >= n)
                throw InputError("tile " + std::to_string(t.q) + " names triangle " + std::to_string(x) +
                                 ", outside 0.." + std::to_string(n - 1));
        pairs.emplace_back(t.a, t.b);
    }
    Tiling tiling;
    try
    {
        tiling = Tiling::from_pairs(aperture, pairs);
    }
    catch (const TilingError& e)
    {
        throw InputError(e.what());
    }
    for (const auto& t : record.tiles)
    {
        const auto& tile = tiling.tiles()[tiling.tile_of(t.a)];
        if (tile.orientation != t.orientation)
            throw InputError("tile on triangles " + std::to_string(t.a) + "," + std::to_string(t.b) +
                             " has orientation " + to_char(tile.orientation) + ", file says " +
                             to_char(t.orientation));
    }
    if (record.word)
    {
        const auto word = encode(aperture, tiling);
        if (word != *record.word)
            throw InputError("word line " + to_string(*record.word) + " does not match the tiles (" +
                             to_string(word) + ")");
    }
    return tiling;
}

Tiling read_tiling(std::istream& in, const HexAperture& aperture) { return to_tiling(aperture, read_tiling_record(in)); }

// ---------------------------------------------------------------------------

double phase_from_degrees(const std::string& text)
{
    if (!std::isfinite(parse_double(text)))
        throw InputError("phase must be finite");
    const Wide deg(text);
    return static_cast<double>(deg * boost::math::constants::pi<Wide>() / 180);
}

std::string phase_to_degrees(double rad)
{
    const Wide deg = Wide(rad) * 180 / boost::math::constants::pi<Wide>();
    if (auto shortest = format_double(static_cast<double>(deg)); phase_from_degrees(shortest) == rad)
        return shortest;
    for (int digits = 17; digits <= 40; ++digits)
        if (auto text = deg.str(digits, std::ios_base::scientific); phase_from_degrees(text) == rad)
            return text;
    throw std::logic_error("no degree text reproduces phase " + format_double(rad));
}

void write_excitation_csv(std::ostream& out, const ExcitationSet& excitation)
{
    out << "triangle_index,amplitude,phase_deg\n";
    for (Eigen::Index i = 0; i < excitation.size(); ++i)
        out << i << ',' << format_double(excitation.amplitude(i)) << ','
            << phase_to_degrees(excitation.phase(i)) << '\n';
}

ExcitationSet read_excitation_csv(std::istream& in, Eigen::Index expected_size)
{
    ExcitationSet set{Eigen::VectorXd::Zero(expected_size), Eigen::VectorXd::Zero(expected_size)};
    std::vector<char> seen(static_cast<std::size_t>(expected_size), 0);
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, raw))
    {
        ++line_no;
        const std::string line = strip(raw);
        if (line.empty())
            continue;
        const auto where = "row " + std::to_string(line_no);
        if (!header)
        {
            if (line != "triangle_index,amplitude,phase_deg")
                throw InputError(where + ": expected header 'triangle_index,amplitude,phase_deg'");
            header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3)
            throw InputError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
        const int idx = parse_int(fields[0], where);
        if (idx < 0 || idx >= expected_size)
            throw InputError(where + ": triangle index " + std::to_string(idx) + " out of range");
        if (seen[static_cast<std::size_t>(idx)])
            throw InputError(where + ": triangle index " + std::to_string(idx) + " repeated");
        double amp = 0.0, phase = 0.0;
        try
        {
            amp = parse_double(fields[1]);
            phase = phase_from_degrees(fields[2]);
        }
        catch (const InputError& e)
        {
            throw InputError(where + ": " + e.what());
        }
        if (!std::isfinite(amp) || amp < 0.0)
            throw InputError(where + ": amplitude must be finite and non-negative");
        set.amplitude(idx) = amp;
        set.phase(idx) = phase;
        seen[static_cast<std::size_t>(idx)] = 1;
    }
    if (!header)
        throw InputError("excitation file is empty");
    const auto missing = std::find(seen.begin(), seen.end(), 0);
    if (missing != seen.end())
        throw InputError("excitation file has no row for triangle " + std::to_string(missing - seen.begin()));
    return set;
}

ExcitationSet read_excitation_file(const std::string& path, Eigen::Index expected_size)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open excitation file '" + path + "'");
    return read_excitation_csv(in, expected_size);
}

// ---------------------------------------------------------------------------

void write_checkpoint(std::ostream& out, const EnumerationCheckpoint& checkpoint)
{
    out << to_string(checkpoint.word) << '\n' << checkpoint.index << '\n';
    if (!checkpoint.tag.empty())
        out << "config " << checkpoint.tag << '\n';
}

EnumerationCheckpoint read_checkpoint(std::istream& in)
{
    EnumerationCheckpoint cp;
    std::string line;
    if (!std::getline(in, line))
        throw InputError("checkpoint: missing word line");
    {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok)
            cp.word.letters.push_back(parse_int(tok, "checkpoint word"));
    }
    if (cp.word.letters.empty())
        throw InputError("checkpoint: empty word line");
    if (!std::getline(in, line))
        throw InputError("checkpoint: missing index line");
    const auto text = strip(line);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cp.index);
    if (ec != std::errc() || ptr != text.data() + text.size() || cp.index < 1)
        throw InputError("checkpoint: bad index '" + text + "'");
    while (std::getline(in, line))
    {
        const auto t = strip(line);
        if (t.rfind("config ", 0) == 0)
            cp.tag = strip(t.substr(7));
    }
    return cp;
}

// ---------------------------------------------------------------------------

double clamp_db(double linear_power)
{
    if (!(linear_power > 0.0))
        return -100.0;
    return std::max(-100.0, 10.0 * std::log10(linear_power));
}

void write_pattern_csv(std::ostream& out, const PatternGrid& pattern)
{
    out << "u,v,power_db\n";
    for (const auto [iu, iv] : pattern.samples)
        out << format_double(pattern.axis(iu)) << ',' << format_double(pattern.axis(iv)) << ','
            << format_double(clamp_db(pattern.power(iu, iv))) << '\n';
}

namespace
{

PatternCut make_cut(const PatternGrid& g, bool along_u)
{
    PatternCut cut;
    cut.axis = along_u ? "u" : "v";
    for (int i = 0; i < g.resolution; ++i)
    {
        const int iu = along_u ? i : g.peak[0], iv = along_u ? g.peak[1] : i;
        if (!g.visible(iu, iv))
            continue;
        cut.coordinate.push_back(g.axis(i));
        cut.power_db.push_back(clamp_db(g.power(iu, iv)));
    }
    return cut;
}

} // namespace

PatternCut cut_phi0(const PatternGrid& pattern) { return make_cut(pattern, true); }
PatternCut cut_phi90(const PatternGrid& pattern) { return make_cut(pattern, false); }

void write_cut_csv(std::ostream& out, const PatternCut& cut)
{
    out << cut.axis << ",power_db\n";
    for (std::size_t i = 0; i < cut.coordinate.size(); ++i)
        out << format_double(cut.coordinate[i]) << ',' << format_double(cut.power_db[i]) << '\n';
}

} // namespace hextile
