#include "cavbell/geometry.hpp"

#include "cavbell/protocol.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cavbell;

namespace {

constexpr double kPi = std::numbers::pi;

// Reference microwave geometry (waist, wavelength in meters).
const CavityMode kMode{5.97e-3, 5.87e-3, {}, {}};
constexpr double kSpeed = 500.0;

PathParams central_path(double d0 = 0.05, double d1 = 0.05) {
    return PathParams{0, 0, 0, 0, kSpeed, d0, d1};
}

// Worst-case collimation: offsets at the beam radius, angles chosen so the
// deflection over d1 equals the beam radius again.
PathParams worst_case_path() {
    const double r = 0.25e-3, d = 0.05;
    return PathParams{r, r, r / d, r / d, kSpeed, d, d};
}

}  // namespace

TEST_CASE("waist formula") {
    CHECK(waist(0.027, 0.040, 5.87e-3) == doctest::Approx(4.1837e-3).epsilon(1e-4));

    // the waist collapses to zero as R approaches L from above
    CHECK(waist(0.027, 0.027 + 1e-6, 5.87e-3) < waist(0.027, 0.027 + 1e-3, 5.87e-3));
    CHECK(waist(0.027, 0.027 + 1e-12, 5.87e-3) < 1e-4);

    // degree-1 homogeneity under joint rescaling
    for (double a : {0.5, 2.0, 3.7}) {
        CHECK(waist(a * 0.027, a * 0.040, a * 5.87e-3) ==
              doctest::Approx(a * waist(0.027, 0.040, 5.87e-3)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(waist(0.040, 0.027, 5.87e-3), std::domain_error);
    CHECK_THROWS_AS(waist(0.040, 0.040, 5.87e-3), std::domain_error);
}

TEST_CASE("mode function") {
    CHECK(mode_function(0, 0, 0, kMode) == doctest::Approx(1.0));
    CHECK(std::abs(mode_function(0, 0, kMode.lambda / 4, kMode)) < 1e-12);
    CHECK(mode_function(kMode.w0, 0, 0, kMode) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double u = mode_function(rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
                                       rng.uniform(-0.01, 0.01), kMode);
        CHECK(u <= 1.0);
        CHECK(u >= -1.0);
    }
}

TEST_CASE("mode validation ties the waist to the mirrors") {
    CavityMode mode{4.1837e-3, 5.87e-3, 0.027, 0.040};
    mode.w0 = waist(0.027, 0.040, 5.87e-3);
    CHECK_NOTHROW(mode.validate());
    mode.w0 *= 1.001;
    CHECK_THROWS_AS(mode.validate(), std::invalid_argument);
}

TEST_CASE("quadrature: the central path takes sqrt(pi) w0 / v") {
    const double tau = effective_time_quadrature(central_path(), kMode, 0.05);
    const double expected = std::sqrt(kPi) * kMode.w0 / kSpeed;
    CHECK(tau == doctest::Approx(expected).epsilon(1e-10));
    CHECK(tau == doctest::Approx(21.16e-6).epsilon(1e-3));  // about 21 microseconds
}

TEST_CASE("quadrature: standing-wave node kills the interaction") {
    PathParams path = central_path();
    path.z0 = kMode.lambda / 4;
    CHECK(std::abs(effective_time_quadrature(path, kMode, 0.05)) < 1e-15);
}

TEST_CASE("quadrature: a one-waist offset costs a factor e") {
    PathParams path = central_path();
    path.y0 = kMode.w0;
    const double tau = effective_time_quadrature(path, kMode, 0.05);
    const double expected = std::exp(-1.0) * std::sqrt(kPi) * kMode.w0 / kSpeed;
    CHECK(tau == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("closed form tracks the quadrature in the collimated regime") {
    // |angles| <= 10 mrad, |offsets| <= w0/4: relative agreement within 0.1%
    Rng rng(41);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
        PathParams path{rng.uniform(-kMode.w0 / 4, kMode.w0 / 4),
                        rng.uniform(-kMode.w0 / 4, kMode.w0 / 4),
                        rng.uniform(-0.01, 0.01),
                        rng.uniform(-0.01, 0.01),
                        kSpeed,
                        rng.uniform(0.0, 0.1),
                        0.05};
        const double d = path.d0;
        const double quad = effective_time_quadrature(path, kMode, d);
        if (std::abs(quad) < 1e-9 * kMode.w0 / kSpeed) continue;  // node paths have no scale
        const double closed = effective_time_closed(path, kMode, d);
        worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("closed form matches the quadrature on the worst-case collimation path") {
    const PathParams path = worst_case_path();
    for (double d : {path.d0, path.d0 + path.d1}) {
        const double quad = effective_time_quadrature(path, kMode, d);
        const double closed = effective_time_closed(path, kMode, d);
        CHECK(std::abs(closed - quad) / std::abs(quad) < 1e-3);
    }
}

TEST_CASE("closed form: central path and tilt suppression factor") {
    CHECK(effective_time_closed(central_path(), kMode, 0.05) ==
          doctest::Approx(std::sqrt(kPi) * kMode.w0 / kSpeed).epsilon(1e-12));

    // at tan(theta) = 2/(k w0) the tilt exponent equals e^-1 exactly
    const double theta_star = std::atan(2.0 / (kMode.wavenumber() * kMode.w0));
    const double tau = effective_time_closed_from_offsets(0, 0, 0, theta_star, kMode, kSpeed);
    const double isolated = tau * kSpeed * std::cos(theta_star) / (std::sqrt(kPi) * kMode.w0);
    CHECK(isolated == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("offset conventions") {
    PathParams path = worst_case_path();
    auto [dy, dz] = path_offsets(path, path.d0);
    CHECK(dy == doctest::Approx(path.y0 + path.d0 * std::tan(path.phi)).epsilon(1e-15));
    CHECK(dz == doctest::Approx(path.z0 + path.d0 * std::tan(path.theta)).epsilon(1e-15));

    // the cosine-projected variant adds nearly the full d0 instead
    auto [dy_c, dz_c] = path_offsets(path, path.d0, OffsetConvention::CosineProjected);
    CHECK(dy_c == doctest::Approx(path.y0 + path.d0 * std::cos(path.phi)).epsilon(1e-15));
    CHECK(dy_c > 100.0 * dy);
}

TEST_CASE("exact asymmetry") {
    SUBCASE("central path is symmetric") {
        EffectiveTimes t = epsilon_exact(central_path(), kMode);
        CHECK(t.epsilon == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(t.tau_a == doctest::Approx(t.tau_b).epsilon(1e-12));
    }

    SUBCASE("pure offsets without angles shift both cavities alike") {
        PathParams path = central_path();
        path.y0 = 1e-3;
        path.z0 = 0.5e-3;
        EffectiveTimes t = epsilon_exact(path, kMode);
        CHECK(std::abs(t.epsilon) < 1e-12);
    }

    SUBCASE("worst-case collimation lands just under 0.2") {
        EffectiveTimes t = epsilon_exact(worst_case_path(), kMode);
        CHECK(t.epsilon == doctest::Approx(0.1994097).epsilon(1e-5));
        CHECK(t.epsilon < 0.2);
        CHECK(t.epsilon > 0.15);
    }

    SUBCASE("node paths have no defined asymmetry") {
        PathParams path = central_path();
        path.z0 = kMode.lambda / 4;
        CHECK_THROWS_AS(epsilon_exact(path, kMode), std::domain_error);
    }
}

TEST_CASE("second-order asymmetry") {
    CHECK(epsilon_second_order(central_path(), kMode) == doctest::Approx(0.0));
    CHECK(epsilon_second_order(worst_case_path(), kMode) ==
          doctest::Approx(0.1877888).epsilon(1e-6));

    SUBCASE("residual against the exact value shrinks at third order") {
        const PathParams base = worst_case_path();
        double prev_residual = 0.0, prev_scale = 0.0;
        double slope_sum = 0.0;
        int slopes = 0;
        for (int i = 0; i < 5; ++i) {
            const double s = std::pow(0.5, i);
            PathParams path{base.y0 * s, base.z0 * s, base.phi * s, base.theta * s,
                            base.v,      base.d0,     base.d1};
            const double residual =
                std::abs(epsilon_second_order(path, kMode) - epsilon_exact(path, kMode).epsilon);
            if (i > 0) {
                slope_sum += std::log(prev_residual / residual) / std::log(prev_scale / s);
                ++slopes;
            }
            prev_residual = residual;
            prev_scale = s;
        }
        CHECK(slope_sum / slopes >= 3.0);
    }
}

TEST_CASE("beam sampling") {
    SUBCASE("zero radii give the central path") {
        Rng rng(8);
        for (const PathParams& p : sample_beam_paths(0.0, 0.0, 0.05, 0.05, kSpeed, rng, 20)) {
            CHECK(p.y0 == 0.0);
            CHECK(p.z0 == 0.0);
            CHECK(p.phi == 0.0);
            CHECK(p.theta == 0.0);
        }
    }

    SUBCASE("samples stay on their disks and average to zero") {
        Rng rng(12);
        const double r = 0.25e-3, a = 5e-3;
        const int n = 100000;
        auto paths = sample_beam_paths(r, a, 0.05, 0.05, kSpeed, rng, n);
        double sy = 0, sz = 0, sp = 0, st = 0;
        for (const PathParams& p : paths) {
            CHECK(p.y0 * p.y0 + p.z0 * p.z0 <= r * r * (1 + 1e-12));
            CHECK(p.phi * p.phi + p.theta * p.theta <= a * a * (1 + 1e-12));
            sy += p.y0;
            sz += p.z0;
            sp += p.phi;
            st += p.theta;
        }
        // uniform-disk coordinates have sd radius/2
        const double bound_r = 3.0 * (r / 2) / std::sqrt(n);
        const double bound_a = 3.0 * (a / 2) / std::sqrt(n);
        CHECK(std::abs(sy / n) < bound_r);
        CHECK(std::abs(sz / n) < bound_r);
        CHECK(std::abs(sp / n) < bound_a);
        CHECK(std::abs(st / n) < bound_a);
    }

    SUBCASE("a fixed seed reproduces the draw") {
        Rng a(77), b(77);
        auto pa = sample_beam_paths(1e-3, 1e-3, 0.05, 0.05, kSpeed, a, 50);
        auto pb = sample_beam_paths(1e-3, 1e-3, 0.05, 0.05, kSpeed, b, 50);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            CHECK(pa[i].y0 == pb[i].y0);
            CHECK(pa[i].theta == pb[i].theta);
        }
    }
}

TEST_CASE("collimation fidelity statistics") {
    SUBCASE("a perfectly collimated beam reproduces the ideal fidelity") {
        Rng rng(1);
        FidelityStats stats = collimation_fidelity_stats(
            0.8, BeamSamplerConfig{0, 0, 0.05, 0.05, kSpeed}, kMode, 25, rng);
        CHECK(stats.mean == doctest::Approx(ideal_fidelity(0.8)).epsilon(1e-12));
        CHECK(stats.minimum == doctest::Approx(stats.maximum).epsilon(1e-12));
    }

    SUBCASE("realistic collimation keeps the minimum fidelity high") {
        Rng rng(2);
        BeamSamplerConfig config{0.25e-3, 5e-3, 0.05, 0.05, kSpeed};
        FidelityStats stats = collimation_fidelity_stats(0.8, config, kMode, 300, rng);
        CHECK(stats.minimum >= 0.92);
        CHECK(stats.mean > stats.minimum);
        CHECK(stats.p05 <= stats.p50);
        CHECK(stats.p50 <= stats.p95);

        // bounded above by the best the asymmetric closed form can do
        double best = 0.0;
        for (double eps = -0.5; eps <= 0.5; eps += 1e-4)
            best = std::max(best, asymmetric_fidelity(0.8, eps));
        CHECK(stats.maximum <= best + 1e-12);
    }
}

TEST_CASE("optical-scale modes make the same collimation hopeless") {
    const CavityMode optical{20e-6, 852e-9, {}, {}};
    const double eps = epsilon_second_order(worst_case_path(), optical);
    CHECK(eps > 1.0);      // the beam would need orders of magnitude tighter control
    CHECK(eps > 1e6);
}

TEST_CASE("path validation") {
    PathParams bad = central_path();
    bad.v = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = central_path();
    bad.phi = kPi / 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = central_path();
    bad.d0 = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
