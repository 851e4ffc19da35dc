#include "cavbell/geometry.hpp"

#include "cavbell/protocol.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cavbell {

namespace {

constexpr double kPi = std::numbers::pi;

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

double CavityMode::wavenumber() const { return 2.0 * kPi / lambda; }

void CavityMode::validate() const {
    if (!(w0 > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("CavityMode: w0 and lambda must be positive");
    if (mirror_separation.has_value() != mirror_curvature.has_value())
        throw std::invalid_argument("CavityMode: L and R must be given together");
    if (mirror_separation) {
        const double implied = waist(*mirror_separation, *mirror_curvature, lambda);
        if (std::abs(implied - w0) > 1e-9 * w0)
            throw std::invalid_argument("CavityMode: waist does not match mirror geometry");
    }
}

void PathParams::validate() const {
    if (!(v > 0.0)) throw std::invalid_argument("PathParams: v must be positive");
    if (d0 < 0.0 || d1 < 0.0) throw std::invalid_argument("PathParams: d0 and d1 must be non-negative");
    if (std::abs(phi) >= kPi / 2 || std::abs(theta) >= kPi / 2)
        throw std::invalid_argument("PathParams: |phi| and |theta| must be below pi/2");
}

double mode_function(double x, double y, double z, const CavityMode& mode) {
    return std::exp(-(x * x + y * y) / (mode.w0 * mode.w0)) *
           std::cos(mode.wavenumber() * z);
}

double waist(double mirror_separation, double mirror_curvature, double lambda) {
    if (!(mirror_separation > 0.0) || mirror_curvature <= mirror_separation)
        throw std::domain_error("waist: requires R > L > 0");
    return std::sqrt(lambda * std::sqrt(mirror_separation) *
                     std::sqrt(mirror_curvature - mirror_separation) / (2.0 * kPi));
}

std::pair<double, double> path_offsets(const PathParams& path, double d,
                                       OffsetConvention convention) {
    if (convention == OffsetConvention::StraightLine) {
        return {path.y0 + d * std::tan(path.phi), path.z0 + d * std::tan(path.theta)};
    }
    return {path.y0 + d * std::cos(path.phi), path.z0 + d * std::cos(path.theta)};
}

double effective_time_quadrature(const PathParams& path, const CavityMode& mode,
                                 double center_distance) {
    path.validate();
    mode.validate();
    const double tp = std::tan(path.phi);
    const double tt = std::tan(path.theta);
    const double nrm = std::sqrt(1.0 + tp * tp + tt * tt);
    const double cx = 1.0 / nrm, cy = tp / nrm, cz = tt / nrm;

    // Arc position of the closest approach to the mode axis in the x-y plane.
    const double s_star =
        (center_distance * cx - path.y0 * cy) / (cx * cx + cy * cy);
    const double half_window = 8.0 * mode.w0 / cx;

    auto integrand = [&](double s) {
        return mode_function(s * cx - center_distance, path.y0 + s * cy,
                             path.z0 + s * cz, mode);
    };

    // Two independent rules; their agreement bounds the true error even when
    // one internal estimate turns out pessimistic after deep subdivision.
    double err31 = 0.0, err61 = 0.0;
    const double i31 = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, s_star - half_window, s_star + half_window, 15, 1e-13, &err31);
    const double i61 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, s_star - half_window, s_star + half_window, 15, 1e-13, &err61);

    const double abs_tol = 1e-12 * mode.w0;  // 1e-12 * (w0 / v) on tau
    if (!(std::abs(i61 - i31) <= abs_tol || std::min(err31, err61) <= abs_tol)) {
        throw QuadratureError("effective_time_quadrature: did not reach tolerance");
    }
    return i61 / path.v;
}

double effective_time_closed_from_offsets(double delta_y, double delta_z,
                                          double phi, double theta,
                                          const CavityMode& mode, double v) {
    const double k = mode.wavenumber();
    const double w0 = mode.w0;
    const double ct = std::cos(theta), st = std::sin(theta), tt = std::tan(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double prefactor = std::sqrt(kPi) * w0 / (v * ct);
    const double transverse =
        std::exp(-(delta_y * delta_y / (w0 * w0)) * (1.0 - (st * st) / (cp * cp)));
    const double tilt = std::exp(-k * k * w0 * w0 * tt * tt / 4.0);
    const double standing_wave =
        std::cos(k * delta_z - k * delta_y * (st * sp / (ct * ct)));
    return prefactor * transverse * tilt * standing_wave;
}

double effective_time_closed(const PathParams& path, const CavityMode& mode,
                             double center_distance, OffsetConvention convention) {
    path.validate();
    mode.validate();
    const auto [dy, dz] = path_offsets(path, center_distance, convention);
    return effective_time_closed_from_offsets(dy, dz, path.phi, path.theta, mode, path.v);
}

EffectiveTimes epsilon_exact(const PathParams& path, const CavityMode& mode) {
    const double tau_a = effective_time_quadrature(path, mode, path.d0);
    const double tau_b = effective_time_quadrature(path, mode, path.d0 + path.d1);
    // tau of order 1e-9 waist transits marks a node path; the ratio is meaningless.
    if (std::abs(tau_a) < 1e-9 * mode.w0 / path.v) {
        throw std::domain_error("epsilon_exact: tau_a vanishes, asymmetry undefined");
    }
    return {tau_a, tau_b, 1.0 - tau_b / tau_a};
}

double epsilon_second_order(const PathParams& path, const CavityMode& mode) {
    const double w0 = mode.w0;
    const double l = mode.lambda;
    const double d1p = path.d1 * path.phi;
    const double d1t = path.d1 * path.theta;
    return (d1p * d1p + d1p * (2.0 * path.d0 * path.phi) + (2.0 * path.y0) * d1p) / (w0 * w0) +
           (2.0 * kPi * kPi / (l * l)) *
               (d1t * d1t + d1t * (2.0 * path.d0 * path.theta) + (2.0 * path.z0) * d1t);
}

std::vector<PathParams> sample_beam_paths(double beam_radius, double angular_radius,
                                          double d0, double d1, double v,
                                          Rng& rng, int n) {
    if (beam_radius < 0.0 || angular_radius < 0.0)
        throw std::invalid_argument("sample_beam_paths: radii must be non-negative");
    if (n < 1) throw std::invalid_argument("sample_beam_paths: n must be at least 1");
    std::vector<PathParams> paths;
    paths.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto [y0, z0] = rng.disk(beam_radius);
        const auto [phi, theta] = rng.disk(angular_radius);
        paths.push_back(PathParams{y0, z0, phi, theta, v, d0, d1});
    }
    return paths;
}

FidelityStats collimation_fidelity_stats(double x, const BeamSamplerConfig& config,
                                         const CavityMode& mode, int n, Rng& rng) {
    const std::vector<PathParams> paths =
        sample_beam_paths(config.beam_radius, config.angular_radius, config.d0,
                          config.d1, config.v, rng, n);
    std::vector<double> fidelities;
    fidelities.reserve(paths.size());
    double sum = 0.0;
    for (const PathParams& path : paths) {
        const double eps = epsilon_exact(path, mode).epsilon;
        const double f = asymmetric_fidelity(x, eps);
        fidelities.push_back(f);
        sum += f;
    }
    std::vector<double> sorted = fidelities;
    std::sort(sorted.begin(), sorted.end());
    return FidelityStats{static_cast<int>(sorted.size()),
                         sum / static_cast<double>(sorted.size()),
                         sorted.front(),
                         sorted.back(),
                         percentile(sorted, 0.05),
                         percentile(sorted, 0.50),
                         percentile(sorted, 0.95)};
}

}  // namespace cavbell
