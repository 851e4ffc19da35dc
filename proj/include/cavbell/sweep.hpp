// sweep.hpp
// Parameter-sweep engine and the experiment preset: regenerates the
// protocol's fidelity, success and asymmetry curves as tabular series and
// runs seeded Monte Carlo batches.
#pragma once

#include "cavbell/geometry.hpp"
#include "cavbell/protocol.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cavbell {

enum class SweepVariable { PulseAreaX, Epsilon, LogOneMinusEpsilon, DetectorEff, PhotonNumber };

struct SweepSpec {
    SweepVariable variable = SweepVariable::PulseAreaX;
    double start = 0.0;
    double stop = 1.0;
    int steps = 101;

    void validate() const;       // steps >= 2, start < stop, finite bounds
    double point(int i) const;   // i-th grid value, endpoints included
};

// Rows of named real columns. CSV output uses a header row, '.' decimal
// separator, comma field separator, LF line endings and full double
// precision; JSON output is an array of row objects.
struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
};

// (x, ideal_fidelity(x)). Monotone non-increasing on [0, pi/2].
Series sweep_fidelity(const SweepSpec& spec);

// (x, success_probability(x)). Monotone increasing on [0, pi/2].
Series sweep_success(const SweepSpec& spec);

// Fidelity against epsilon at fixed x. The grid runs over epsilon; with
// variable LogOneMinusEpsilon the abscissa column is ln(1 - epsilon) and
// rows with epsilon >= 1 are dropped with a warning.
Series sweep_epsilon(const SweepSpec& spec, double x,
                     std::vector<std::string>* warnings = nullptr);

struct OperatingWindow {
    bool empty = true;
    double x_min = 0.0;
    double x_max = 0.0;
};

// Maximal pulse-area interval with ideal_fidelity >= fidelity_floor and
// success_probability >= prob_floor, by bisection on the closed forms.
OperatingWindow sweep_operating_window(double fidelity_floor, double prob_floor);

struct MonteCarloSummary {
    int trials = 0;
    double success_rate = 0.0;
    double success_se = 0.0;
    double mean_runs = 0.0;
    double runs_se = 0.0;
    double failure_free_fraction = 0.0;  // success with zero detection failures
    double failure_free_se = 0.0;
    double mean_model_time = 0.0;
    double mean_success_fidelity = 0.0;  // to the Bell state, success trials only
    double exhausted_fraction = 0.0;
};

// Seeded batch of independent trials. Trial i uses the substream
// (params.seed, i); aggregation runs over fixed-size blocks reduced in
// index order, so the result is byte-stable for any thread count.
MonteCarloSummary run_trials(const ProtocolParams& params, int trials, int threads = 1);

// One Monte Carlo summary row per sweep point. The varied field is given
// by spec.variable (PulseAreaX, Epsilon or DetectorEff); point i draws its
// seed from (seed, i).
Series sweep_montecarlo(const SweepSpec& spec, const ProtocolParams& base,
                        int trials, std::uint64_t seed, int threads = 1);

// (n, fidelity of the n-success state to the beam-splitter target).
Series sweep_multiphoton(int n_max, double x, int cutoff);

// Constants of the reference microwave cavity QED experiment. The
// collimator and cavity spacings d0 = d1 = 0.05 m are an assumption (no
// measured value is available) and are flagged as such in CLI output.
// cavity_scale multiplies the mirror separation; the coupling follows
// g0 ~ L^(-3/2) and the waist w0 ~ L^(1/2) at fixed wavelength, so the
// central pulse area falls as 1/cavity_scale.
struct ParisPreset {
    double g0 = 1.48e5;             // rad/s
    double v = 500.0;               // m/s
    double w0 = 5.97e-3;            // m
    double lambda = 5.87e-3;        // m
    double detector_eff = 0.40;
    double cavity_lifetime = 1e-3;  // s
    double beam_radius = 0.25e-3;   // m
    double d0 = 0.05;               // m (assumed)
    double d1 = 0.05;               // m (assumed)
    double cavity_scale = 1.0;

    double scaled_g0() const;
    double scaled_w0() const;
    double central_tau() const;        // sqrt(pi) w0 / v, s
    double central_pulse_area() const; // g0 * central_tau
    double angular_radius() const;     // beam_radius / d1, rad

    CavityMode mode() const;
    BeamSamplerConfig sampler_config() const;
};

ParisPreset preset_paris(double cavity_scale = 1.0);

}  // namespace cavbell
