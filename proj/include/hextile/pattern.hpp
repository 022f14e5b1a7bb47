#ifndef HEXTILE_PATTERN_HPP
#define HEXTILE_PATTERN_HPP

#include "hextile/hex_lattice.hpp"
#include "hextile/tiling.hpp"

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace hextile
{

// Lengths are in wavelengths throughout.
inline constexpr double kWavenumber = 2.0 * std::numbers::pi;

struct ExcitationSet
{
    Eigen::VectorXd amplitude; // linear, >= 0
    Eigen::VectorXd phase;     // radians

    Eigen::Index size() const noexcept { return amplitude.size(); }
    Eigen::VectorXcd weights() const;
    friend bool operator==(const ExcitationSet& a, const ExcitationSet& b)
    {
        return a.amplitude.size() == b.amplitude.size() && a.phase.size() == b.phase.size() &&
               a.amplitude == b.amplitude && a.phase == b.phase;
    }
};

struct SubarrayCoefficients
{
    Eigen::VectorXd amplitude; // per tile
    Eigen::VectorXd phase;     // per tile, radians
};

// Per-tile arithmetic mean of the member amplitudes and phases; the second
// member's phase is first unwrapped to within pi of the first.
SubarrayCoefficients subarray_coefficients(const Tiling& tiling, const ExcitationSet& reference);

// Each element driven with its tile's coefficient alpha_q exp(j beta_q).
Eigen::VectorXcd element_weights(const Tiling& tiling, const SubarrayCoefficients& coefficients);

// beta = -k (x u0 + y v0), u0 = sin(theta) cos(phi), v0 = sin(theta) sin(phi).
Eigen::VectorXd steering_phases(const Eigen::Matrix2Xd& positions, double u0, double v0);
Eigen::VectorXd steering_phases(const HexAperture& aperture, double theta_deg, double phi_deg);

enum class RegionShape
{
    Rectangle,
    Ellipse
};

struct MainlobeRegion
{
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    Eigen::Vector2d extent{0.9, 0.9}; // full widths along u and v
    RegionShape shape = RegionShape::Rectangle;

    bool contains(double u, double v) const;
    // Fraction of the square cell of side `step` centred at (u, v) inside the
    // region: exact for rectangles, 16 x 16 sub-samples on ellipse edges.
    double coverage(double u, double v, double step) const;
    MainlobeRegion recentered(double u, double v) const
    {
        MainlobeRegion r = *this;
        r.center = {u, v};
        return r;
    }
};

/// Upper bound on the normalised power: 1 inside the mainlobe region and
/// 10^(floor_db/10) elsewhere.
struct PowerMask
{
    MainlobeRegion mainlobe;
    double floor_db = -20.0;

    double value(double u, double v) const;
    // Excess of power p over the mask averaged over the cell at (u, v): the
    // cell is split by area between the mainlobe bound and the floor.
    double cell_excess(double p, double u, double v, double step) const;
    static PowerMask unbounded()
    {
        PowerMask m;
        m.floor_db = std::numeric_limits<double>::infinity();
        return m;
    }
};

// Element factor p(u, v) multiplying each element's contribution.
using ElementPattern = std::function<double(double u, double v)>;
ElementPattern isotropic_element();
ElementPattern cosine_element(double exponent); // cos(theta)^q

/// Normalised power on a uniform midpoint grid over [-1, 1]^2.
///
/// Only samples with u^2 + v^2 <= 1 are visible; invisible entries hold 0.
/// `samples` lists the visible (iu, iv) pairs in the fixed summation order used
/// by every reduction over the grid.
struct PatternGrid
{
    int resolution = 0;
    Eigen::VectorXd axis;        // sample coordinates, shared by u and v
    Eigen::ArrayXXd power;       // power(iu, iv), max over visible = 1
    std::vector<std::array<int, 2>> samples;
    double cell_area = 0.0;
    double peak_raw = 0.0;       // max |E|^2 before normalisation
    std::array<int, 2> peak{0, 0};

    bool visible(int iu, int iv) const
    {
        const double u = axis(iu), v = axis(iv);
        return u * u + v * v <= 1.0;
    }
};

struct PatternMetrics
{
    double sll_db = 0.0;
    double directivity_dbi = 0.0;
    double hpbw_az_deg = 0.0; // phi = 0 cut
    double hpbw_el_deg = 0.0; // phi = 90 deg cut
    bool peak_in_mainlobe = true;
};

/// Array-factor evaluator for a fixed element layout and grid. The steering
/// matrix over the visible samples is precomputed once, so each evaluation is
/// a dense matrix product.
template <typename Scalar = double>
class ArrayFactor
{
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    ArrayFactor(const Eigen::Matrix2Xd& positions, int resolution, const ElementPattern& element = isotropic_element());

    int resolution() const noexcept { return resolution_; }
    Eigen::Index element_count() const noexcept { return re_.cols(); }
    Eigen::Index visible_count() const noexcept { return re_.rows(); }
    const std::vector<std::array<int, 2>>& samples() const noexcept { return samples_; }
    const Eigen::VectorXd& axis() const noexcept { return axis_; }
    double cell_area() const noexcept { return cell_area_; }

    // Throws std::invalid_argument for an all-zero excitation.
    PatternGrid pattern(const Eigen::VectorXcd& weights) const;

    // |E|^2 over visible samples, one column per excitation column.
    Matrix raw_power(const Eigen::MatrixXcd& weights) const;

    // Mask-violation cost of each excitation column.
    Eigen::VectorXd costs(const Eigen::MatrixXcd& weights, const PowerMask& mask) const;
    double cost(const Eigen::VectorXcd& weights, const PowerMask& mask) const;

private:
    int resolution_;
    double cell_area_;
    Eigen::VectorXd axis_;
    std::vector<std::array<int, 2>> samples_;
    Matrix re_;
    Matrix im_;
};

extern template class ArrayFactor<double>;
extern template class ArrayFactor<float>;

// Uniform midpoint sample coordinates on [-1, 1].
Eigen::VectorXd grid_axis(int resolution);

// One-shot evaluation; throws for resolution < 2 or all-zero weights.
PatternGrid array_factor(const Eigen::Matrix2Xd& positions, const Eigen::VectorXcd& weights, int resolution,
                         const ElementPattern& element = isotropic_element());
PatternGrid array_factor(const HexAperture& aperture, const Eigen::VectorXcd& weights, int resolution,
                         const ElementPattern& element = isotropic_element());

// Raw |E|^2 at arbitrary (u, v) columns.
Eigen::VectorXd raw_power_at(const Eigen::Matrix2Xd& positions, const Eigen::VectorXcd& weights,
                             const Eigen::Matrix2Xd& uv, const ElementPattern& element = isotropic_element());

// Sum over visible cells of cell_excess times the cell area.
double cost(const PatternGrid& pattern, const PowerMask& mask);

PatternMetrics metrics(const PatternGrid& pattern, const MainlobeRegion& mainlobe);

// ---------------------------------------------------------------------------
// Scan-cone analysis

struct ScanCone
{
    double theta0_deg = 30.0;
    double phi0_deg = 0.0;
    std::vector<double> theta_gamma_deg;
    std::vector<double> phi_gamma_deg;

    // Half-open ranges [min, max) sampled with the given step.
    static ScanCone sampled(double theta0, double phi0, double theta_min, double theta_max, double theta_step,
                            double phi_min, double phi_max, double phi_step);
};

struct ScanPoint
{
    double theta_gamma_deg = 0.0;
    double phi_gamma_deg = 0.0;
    double sll_db = 0.0;
    double directivity_dbi = 0.0;
};

// Tiled array: reference phases follow the steering direction, tile
// coefficients are re-averaged at every scan point.
std::vector<ScanPoint> scan_map(const HexAperture& aperture, const Tiling& tiling,
                                const Eigen::VectorXd& reference_amplitude, const ScanCone& cone,
                                const MainlobeRegion& mainlobe, int resolution,
                                const ElementPattern& element = isotropic_element());

// Fully populated control: every element keeps its own steering phase.
std::vector<ScanPoint> scan_map(const HexAperture& aperture, const Eigen::VectorXd& reference_amplitude,
                                const ScanCone& cone, const MainlobeRegion& mainlobe, int resolution,
                                const ElementPattern& element = isotropic_element());

// ---------------------------------------------------------------------------
// Reference excitations

enum class ReferenceKind
{
    Uniform,
    CosineTaper,
    File
};

struct ReferenceSpec
{
    ReferenceKind kind = ReferenceKind::Uniform;
    double taper_exponent = 1.0;
    std::optional<double> taper_radius; // defaults to the aperture circumradius
    std::string path;
};

ExcitationSet build_reference(const HexAperture& aperture, const ReferenceSpec& spec);

} // namespace hextile

#endif // HEXTILE_PATTERN_HPP
