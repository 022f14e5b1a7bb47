#include "hextile/pattern.hpp"

#include "hextile/io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hextile
{
namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kJacobianCutoff = 1.0 - 1e-9;
constexpr double kDbFloor = -300.0;

double to_db(double p) { return p > 0.0 ? std::max(10.0 * std::log10(p), kDbFloor) : kDbFloor; }

void check_resolution(int resolution)
{
    if (resolution < 2)
        throw std::invalid_argument("grid resolution must be >= 2");
}

double wrap_to(double phase, double anchor)
{
    while (phase - anchor > kPi)
        phase -= 2.0 * kPi;
    while (phase - anchor < -kPi)
        phase += 2.0 * kPi;
    return phase;
}

// u-coordinate of the half-power crossing walking from the peak in direction `dir`.
double half_power_edge(const PatternGrid& g, bool along_u, int dir)
{
    const int pu = g.peak[0], pv = g.peak[1];
    auto at = [&](int i) { return along_u ? g.power(i, pv) : g.power(pu, i); };
    auto inside = [&](int i) { return i >= 0 && i < g.resolution && (along_u ? g.visible(i, pv) : g.visible(pu, i)); };
    int prev = along_u ? pu : pv;
    for (int i = prev + dir; inside(i); prev = i, i += dir)
    {
        if (at(i) < 0.5)
        {
            const double p0 = at(prev), p1 = at(i);
            const double t = (p0 - 0.5) / (p0 - p1);
            return g.axis(prev) + t * (g.axis(i) - g.axis(prev));
        }
    }
    return dir > 0 ? 1.0 : -1.0;
}

} // namespace

Eigen::VectorXcd ExcitationSet::weights() const
{
    Eigen::VectorXcd w(amplitude.size());
    for (Eigen::Index i = 0; i < amplitude.size(); ++i)
        w(i) = std::polar(amplitude(i), phase(i));
    return w;
}

SubarrayCoefficients subarray_coefficients(const Tiling& tiling, const ExcitationSet& reference)
{
    const auto n = static_cast<Eigen::Index>(tiling.assignment().size());
    if (reference.amplitude.size() != n || reference.phase.size() != n)
        throw std::invalid_argument("reference has " + std::to_string(reference.amplitude.size()) +
                                    " elements, tiling covers " + std::to_string(n));
    const auto& tiles = tiling.tiles();
    SubarrayCoefficients c;
    c.amplitude.resize(static_cast<Eigen::Index>(tiles.size()));
    c.phase.resize(static_cast<Eigen::Index>(tiles.size()));
    for (std::size_t q = 0; q < tiles.size(); ++q)
    {
        const auto [a, b] = tiles[q].triangles;
        const auto qi = static_cast<Eigen::Index>(q);
        c.amplitude(qi) = 0.5 * (reference.amplitude(a) + reference.amplitude(b));
        const double pa = reference.phase(a);
        c.phase(qi) = 0.5 * (pa + wrap_to(reference.phase(b), pa));
    }
    return c;
}

Eigen::VectorXcd element_weights(const Tiling& tiling, const SubarrayCoefficients& coefficients)
{
    const auto& assignment = tiling.assignment();
    if (coefficients.amplitude.size() != static_cast<Eigen::Index>(tiling.size()))
        throw std::invalid_argument("coefficient count does not match the tile count");
    Eigen::VectorXcd w(static_cast<Eigen::Index>(assignment.size()));
    for (std::size_t i = 0; i < assignment.size(); ++i)
    {
        const auto q = static_cast<Eigen::Index>(assignment[i]);
        w(static_cast<Eigen::Index>(i)) = std::polar(coefficients.amplitude(q), coefficients.phase(q));
    }
    return w;
}

Eigen::VectorXd steering_phases(const Eigen::Matrix2Xd& positions, double u0, double v0)
{
    return -kWavenumber * (positions.row(0) * u0 + positions.row(1) * v0).transpose();
}

Eigen::VectorXd steering_phases(const HexAperture& aperture, double theta_deg, double phi_deg)
{
    const double t = theta_deg * kPi / 180.0, p = phi_deg * kPi / 180.0;
    return steering_phases(element_positions(aperture), std::sin(t) * std::cos(p), std::sin(t) * std::sin(p));
}

bool MainlobeRegion::contains(double u, double v) const
{
    const double du = (u - center.x()) / (0.5 * extent.x());
    const double dv = (v - center.y()) / (0.5 * extent.y());
    if (shape == RegionShape::Rectangle)
        return std::abs(du) <= 1.0 && std::abs(dv) <= 1.0;
    return du * du + dv * dv <= 1.0;
}

double MainlobeRegion::coverage(double u, double v, double step) const
{
    const double h = 0.5 * step;
    if (shape == RegionShape::Rectangle)
    {
        auto overlap = [h](double x, double c, double half) {
            return std::max(0.0, std::min(x + h, c + half) - std::max(x - h, c - half));
        };
        return overlap(u, center.x(), 0.5 * extent.x()) * overlap(v, center.y(), 0.5 * extent.y()) / (step * step);
    }
    const bool all_in = contains(u - h, v - h) && contains(u + h, v - h) && contains(u - h, v + h) &&
                        contains(u + h, v + h);
    if (all_in)
        return 1.0;
    const double nu = std::clamp(center.x(), u - h, u + h), nv = std::clamp(center.y(), v - h, v + h);
    if (!contains(nu, nv))
        return 0.0;
    constexpr int kSub = 16;
    int inside = 0;
    for (int i = 0; i < kSub; ++i)
        for (int j = 0; j < kSub; ++j)
            inside += contains(u - h + (i + 0.5) * step / kSub, v - h + (j + 0.5) * step / kSub) ? 1 : 0;
    return static_cast<double>(inside) / (kSub * kSub);
}

double PowerMask::value(double u, double v) const
{
    if (mainlobe.contains(u, v))
        return 1.0;
    return std::pow(10.0, floor_db / 10.0);
}

double PowerMask::cell_excess(double p, double u, double v, double step) const
{
    const double in = mainlobe.coverage(u, v, step);
    const double floor = std::pow(10.0, floor_db / 10.0);
    return in * std::max(p - 1.0, 0.0) + (in < 1.0 ? (1.0 - in) * std::max(p - floor, 0.0) : 0.0);
}

ElementPattern isotropic_element()
{
    return [](double, double) { return 1.0; };
}

ElementPattern cosine_element(double exponent)
{
    if (exponent < 0.0)
        throw std::invalid_argument("element exponent must be >= 0");
    return [exponent](double u, double v) { return std::pow(std::max(0.0, 1.0 - u * u - v * v), 0.5 * exponent); };
}

Eigen::VectorXd grid_axis(int resolution)
{
    check_resolution(resolution);
    const double step = 2.0 / resolution;
    Eigen::VectorXd axis(resolution);
    for (int i = 0; i < resolution; ++i)
        axis(i) = -1.0 + (i + 0.5) * step;
    return axis;
}

template <typename Scalar>
ArrayFactor<Scalar>::ArrayFactor(const Eigen::Matrix2Xd& positions, int resolution, const ElementPattern& element)
    : resolution_(resolution), cell_area_(0.0), axis_(grid_axis(resolution))
{
    const double step = 2.0 / resolution;
    cell_area_ = step * step;
    for (int iu = 0; iu < resolution; ++iu)
        for (int iv = 0; iv < resolution; ++iv)
            if (axis_(iu) * axis_(iu) + axis_(iv) * axis_(iv) <= 1.0)
                samples_.push_back({iu, iv});

    const auto rows = static_cast<Eigen::Index>(samples_.size());
    re_.resize(rows, positions.cols());
    im_.resize(rows, positions.cols());
    for (Eigen::Index s = 0; s < rows; ++s)
    {
        const double u = axis_(samples_[static_cast<std::size_t>(s)][0]);
        const double v = axis_(samples_[static_cast<std::size_t>(s)][1]);
        const double p = element(u, v);
        for (Eigen::Index e = 0; e < positions.cols(); ++e)
        {
            const double arg = kWavenumber * (positions(0, e) * u + positions(1, e) * v);
            re_(s, e) = static_cast<Scalar>(p * std::cos(arg));
            im_(s, e) = static_cast<Scalar>(p * std::sin(arg));
        }
    }
}

template <typename Scalar>
typename ArrayFactor<Scalar>::Matrix ArrayFactor<Scalar>::raw_power(const Eigen::MatrixXcd& weights) const
{
    if (weights.rows() != element_count())
        throw std::invalid_argument("excitation length does not match the element count");
    const Matrix wr = weights.real().template cast<Scalar>();
    const bool real_only = (weights.imag().array() == 0.0).all();
    if (real_only)
    {
        const Matrix er = re_ * wr;
        const Matrix ei = im_ * wr;
        return er.cwiseAbs2() + ei.cwiseAbs2();
    }
    const Matrix wi = weights.imag().template cast<Scalar>();
    const Matrix er = re_ * wr - im_ * wi;
    const Matrix ei = re_ * wi + im_ * wr;
    return er.cwiseAbs2() + ei.cwiseAbs2();
}

template <typename Scalar>
PatternGrid ArrayFactor<Scalar>::pattern(const Eigen::VectorXcd& weights) const
{
    const Matrix raw = raw_power(weights);
    PatternGrid g;
    g.resolution = resolution_;
    g.axis = axis_;
    g.samples = samples_;
    g.cell_area = cell_area_;
    g.power = Eigen::ArrayXXd::Zero(resolution_, resolution_);

    Eigen::Index best = 0;
    for (Eigen::Index s = 1; s < raw.rows(); ++s)
        if (raw(s, 0) > raw(best, 0))
            best = s;
    g.peak_raw = raw.rows() > 0 ? static_cast<double>(raw(best, 0)) : 0.0;
    if (!(g.peak_raw > 0.0))
        throw std::invalid_argument("all-zero excitation has no pattern peak");
    g.peak = samples_[static_cast<std::size_t>(best)];
    for (Eigen::Index s = 0; s < raw.rows(); ++s)
    {
        const auto [iu, iv] = samples_[static_cast<std::size_t>(s)];
        g.power(iu, iv) = static_cast<double>(raw(s, 0)) / g.peak_raw;
    }
    return g;
}

template <typename Scalar>
Eigen::VectorXd ArrayFactor<Scalar>::costs(const Eigen::MatrixXcd& weights, const PowerMask& mask) const
{
    const Matrix raw = raw_power(weights);
    const double step = 2.0 / resolution_, floor = std::pow(10.0, mask.floor_db / 10.0);
    Eigen::VectorXd in(raw.rows());
    for (Eigen::Index s = 0; s < raw.rows(); ++s)
    {
        const auto [iu, iv] = samples_[static_cast<std::size_t>(s)];
        in(s) = mask.mainlobe.coverage(axis_(iu), axis_(iv), step);
    }
    Eigen::VectorXd out(raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c)
    {
        const double peak = static_cast<double>(raw.col(c).maxCoeff());
        if (!(peak > 0.0))
            throw std::invalid_argument("all-zero excitation has no pattern peak");
        double sum = 0.0;
        for (Eigen::Index s = 0; s < raw.rows(); ++s)
        {
            // Same split as PowerMask::cell_excess.
            const double p = static_cast<double>(raw(s, c)) / peak;
            sum += in(s) * std::max(p - 1.0, 0.0) + (in(s) < 1.0 ? (1.0 - in(s)) * std::max(p - floor, 0.0) : 0.0);
        }
        out(c) = sum * cell_area_;
    }
    return out;
}

template <typename Scalar>
double ArrayFactor<Scalar>::cost(const Eigen::VectorXcd& weights, const PowerMask& mask) const
{
    return costs(weights, mask)(0);
}

template class ArrayFactor<double>;
template class ArrayFactor<float>;

PatternGrid array_factor(const Eigen::Matrix2Xd& positions, const Eigen::VectorXcd& weights, int resolution,
                         const ElementPattern& element)
{
    return ArrayFactor<double>(positions, resolution, element).pattern(weights);
}

PatternGrid array_factor(const HexAperture& aperture, const Eigen::VectorXcd& weights, int resolution,
                         const ElementPattern& element)
{
    return array_factor(element_positions(aperture), weights, resolution, element);
}

Eigen::VectorXd raw_power_at(const Eigen::Matrix2Xd& positions, const Eigen::VectorXcd& weights,
                             const Eigen::Matrix2Xd& uv, const ElementPattern& element)
{
    if (weights.size() != positions.cols())
        throw std::invalid_argument("excitation length does not match the element count");
    Eigen::VectorXd out(uv.cols());
    for (Eigen::Index s = 0; s < uv.cols(); ++s)
    {
        std::complex<double> e = 0.0;
        for (Eigen::Index i = 0; i < positions.cols(); ++i)
            e += weights(i) * std::polar(1.0, kWavenumber * (positions(0, i) * uv(0, s) + positions(1, i) * uv(1, s)));
        e *= element(uv(0, s), uv(1, s));
        out(s) = std::norm(e);
    }
    return out;
}

double cost(const PatternGrid& pattern, const PowerMask& mask)
{
    const double step = 2.0 / pattern.resolution;
    double sum = 0.0;
    for (const auto [iu, iv] : pattern.samples)
        sum += mask.cell_excess(pattern.power(iu, iv), pattern.axis(iu), pattern.axis(iv), step) * pattern.cell_area;
    return sum;
}

PatternMetrics metrics(const PatternGrid& g, const MainlobeRegion& mainlobe)
{
    PatternMetrics m;
    m.peak_in_mainlobe = mainlobe.contains(g.axis(g.peak[0]), g.axis(g.peak[1]));

    double side = 0.0, integral = 0.0;
    for (const auto [iu, iv] : g.samples)
    {
        const double u = g.axis(iu), v = g.axis(iv), p = g.power(iu, iv);
        if (!mainlobe.contains(u, v))
            side = std::max(side, p);
        const double r2 = u * u + v * v;
        if (r2 < kJacobianCutoff)
            integral += p / std::sqrt(1.0 - r2) * g.cell_area;
    }
    m.sll_db = to_db(side);
    m.directivity_dbi = 10.0 * std::log10(4.0 * kPi / integral);

    auto width = [&](bool along_u) {
        const double lo = half_power_edge(g, along_u, -1), hi = half_power_edge(g, along_u, +1);
        return (std::asin(std::clamp(hi, -1.0, 1.0)) - std::asin(std::clamp(lo, -1.0, 1.0))) * 180.0 / kPi;
    };
    m.hpbw_az_deg = width(true);
    m.hpbw_el_deg = width(false);
    return m;
}

ScanCone ScanCone::sampled(double theta0, double phi0, double theta_min, double theta_max, double theta_step,
                           double phi_min, double phi_max, double phi_step)
{
    if (!(theta_step > 0.0) || !(phi_step > 0.0))
        throw std::invalid_argument("scan steps must be positive");
    ScanCone c;
    c.theta0_deg = theta0;
    c.phi0_deg = phi0;
    // Integer counts avoid drift from repeated addition.
    for (long i = 0;; ++i)
    {
        const double t = theta_min + static_cast<double>(i) * theta_step;
        if (t >= theta_max - 1e-9 * theta_step)
            break;
        c.theta_gamma_deg.push_back(t);
    }
    for (long i = 0;; ++i)
    {
        const double p = phi_min + static_cast<double>(i) * phi_step;
        if (p >= phi_max - 1e-9 * phi_step)
            break;
        c.phi_gamma_deg.push_back(p);
    }
    if (c.theta_gamma_deg.empty())
        c.theta_gamma_deg.push_back(theta_min);
    if (c.phi_gamma_deg.empty())
        c.phi_gamma_deg.push_back(phi_min);
    return c;
}

namespace
{

template <typename WeightsFn>
std::vector<ScanPoint> scan_impl(const HexAperture& aperture, const ScanCone& cone, const MainlobeRegion& mainlobe,
                                 int resolution, const ElementPattern& element, WeightsFn weights_for)
{
    const Eigen::Matrix2Xd positions = element_positions(aperture);
    const ArrayFactor<double> af(positions, resolution, element);
    std::vector<ScanPoint> out;
    out.reserve(cone.theta_gamma_deg.size() * cone.phi_gamma_deg.size());
    for (double tg : cone.theta_gamma_deg)
        for (double pg : cone.phi_gamma_deg)
        {
            const double t = (cone.theta0_deg + tg) * kPi / 180.0, p = (cone.phi0_deg + pg) * kPi / 180.0;
            const double u0 = std::sin(t) * std::cos(p), v0 = std::sin(t) * std::sin(p);
            const auto g = af.pattern(weights_for(steering_phases(positions, u0, v0)));
            const auto m = metrics(g, mainlobe.recentered(u0, v0));
            out.push_back({tg, pg, m.sll_db, m.directivity_dbi});
        }
    return out;
}

void check_reference(const HexAperture& aperture, const Eigen::VectorXd& amplitude)
{
    if (amplitude.size() != static_cast<Eigen::Index>(aperture.triangle_count()))
        throw std::invalid_argument("reference amplitude length does not match the aperture");
}

} // namespace

std::vector<ScanPoint> scan_map(const HexAperture& aperture, const Tiling& tiling,
                                const Eigen::VectorXd& reference_amplitude, const ScanCone& cone,
                                const MainlobeRegion& mainlobe, int resolution, const ElementPattern& element)
{
    check_reference(aperture, reference_amplitude);
    return scan_impl(aperture, cone, mainlobe, resolution, element, [&](const Eigen::VectorXd& phase) {
        return element_weights(tiling, subarray_coefficients(tiling, {reference_amplitude, phase}));
    });
}

std::vector<ScanPoint> scan_map(const HexAperture& aperture, const Eigen::VectorXd& reference_amplitude,
                                const ScanCone& cone, const MainlobeRegion& mainlobe, int resolution,
                                const ElementPattern& element)
{
    check_reference(aperture, reference_amplitude);
    return scan_impl(aperture, cone, mainlobe, resolution, element, [&](const Eigen::VectorXd& phase) {
        return ExcitationSet{reference_amplitude, phase}.weights();
    });
}

ExcitationSet build_reference(const HexAperture& aperture, const ReferenceSpec& spec)
{
    const auto n = static_cast<Eigen::Index>(aperture.triangle_count());
    switch (spec.kind)
    {
    case ReferenceKind::Uniform:
        return {Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)};
    case ReferenceKind::CosineTaper: {
        const double radius = spec.taper_radius.value_or(aperture.rings() * aperture.cell_side());
        if (!(radius > 0.0))
            throw std::invalid_argument("taper radius must be positive");
        const Eigen::VectorXd r = element_positions(aperture).colwise().norm().transpose();
        Eigen::VectorXd amp(n);
        for (Eigen::Index i = 0; i < n; ++i)
            amp(i) = std::pow(std::max(0.0, std::cos(kPi * std::min(r(i), radius) / (2.0 * radius))),
                              spec.taper_exponent);
        return {amp, Eigen::VectorXd::Zero(n)};
    }
    case ReferenceKind::File:
        return read_excitation_file(spec.path, n);
    }
    throw std::invalid_argument("unknown reference kind");
}

} // namespace hextile
