// protocol.hpp
// The conditional entanglement-generation run: branch probabilities,
// closed-form fidelity and success probability, n-photon repetition,
// detector-inefficiency Monte Carlo and the dissipation-based reset.
#pragma once

#include "cavbell/jcdynamics.hpp"
#include "cavbell/qstate.hpp"
#include "cavbell/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>

namespace cavbell {

// What to do when the atom-state detector fails to register an atom.
// HaltAndDamp stops the flow of atoms, waits out the cavity dissipation
// (one amplitude-damping application), resets to vacuum and continues.
// ContinueMixed keeps sending atoms through the now-mixed cavity state,
// which turns the resulting fidelity loss into a measurable number.
enum class FailurePolicy { HaltAndDamp, ContinueMixed };

struct ProtocolParams {
    double x = 0.5;              // pulse area g0*tau for cavity A
    double epsilon = 0.0;        // cavity-B pulse area is x*(1 - epsilon)
    double detector_eff = 1.0;   // D, probability a detector registers the atom
    int cutoff = 2;              // Fock cutoff per cavity
    int max_runs = 1000;         // safety bound; Exhausted is a data point
    std::uint64_t seed = 0;
    FailurePolicy failure_policy = FailurePolicy::HaltAndDamp;

    double run_time_s = 20e-6;          // one atom transit
    double damp_wait_s = 1e-3;          // halt duration after a failed detection
    double cavity_lifetime_s = 1e-3;    // photon lifetime T_cav
    std::optional<double> decay_fraction;  // overrides 1 - exp(-wait/T_cav)

    double x_b() const { return x * (1.0 - epsilon); }
    double decay() const;
    void validate() const;  // throws std::invalid_argument / std::out_of_range
};

// The two measurement branches of one atom transit.
struct RunBranches {
    double prob_excited;
    CavityState post_excited;
    double prob_ground;
    CavityState post_ground;
};

enum class TrialOutcome { Success, DetectionFailure, Exhausted };

struct TrialRecord {
    int runs_used = 0;
    TrialOutcome outcome = TrialOutcome::Exhausted;
    double elapsed_model_time = 0.0;  // seconds
    int detection_failures = 0;
    // Success under HaltAndDamp leaves a pure state; ContinueMixed a mixed one.
    std::optional<CavityState> final_pure;
    std::optional<DensityMatrix> final_mixed;
};

// One run: adjoin a freshly excited atom, propagate through cavity A at x_a
// then cavity B at x_b, and project the atom both ways. A branch of exactly
// zero probability reports the pre-run cavity state as its post state.
RunBranches single_run(const CavityState& cavities, PulseArea x_a, PulseArea x_b);

// F(x) = 1/2 + cos(x)/(cos^2(x) + 1), the fidelity of the normalized
// ground-branch state from vacuum to the single-photon Bell state.
double ideal_fidelity(double x);

// P(x) = 1 - cos^4(x), the ground-detection probability from vacuum.
double success_probability(double x);

// Fidelity with pulse areas x and x*(1 - epsilon) for cavities A and B.
double asymmetric_fidelity(double x, double epsilon);

// Leading small-area behavior: fidelity 1 - x^4/16, success 2 x^2.
struct SmallAreaApprox {
    double fidelity;
    double success;
};
SmallAreaApprox small_area_expansions(double x);

// Cavity state conditioned on n consecutive ground detections from vacuum.
CavityState repeated_success_state(int n, PulseArea x, int cutoff);

// Normalized (a+_A + a+_B)^n |00>: amplitude sqrt(C(n,k)/2^n) at |k, n-k>.
// The state a 50:50 beam splitter would prepare from |n> and vacuum.
CavityState beamsplitter_target(int n, const CavityDims& dims);

// Fidelity between the state after n successes and the excited branch of
// one further run on it. Equals 1 only for n = 0: with photons present a
// null run no longer restores the pre-run state.
double null_run_nonreset_check(int n, PulseArea x, int cutoff);

// D^(1/P_success), the all-runs-detected estimate obtained by putting the
// mean run count in the exponent. An estimate, not an exact probability:
// the exact failure-free fraction is P*D / (1 - D + P*D).
double detection_all_works_probability(double detector_eff, double x);

// 1 / P_success(x).
double expected_runs(double x);

// Amplitude-damping channel applied independently to each cavity mode,
// with the given decay fraction (1 - exp(-t/T_cav) for a wait of t).
DensityMatrix amplitude_damp(const DensityMatrix& rho, double decay_fraction);

// Repeat runs from vacuum until a ground detection or max_runs. Each run
// draws two uniforms in fixed order (branch, then detection), so a given
// (seed, trial) stream is reproducible bit for bit.
TrialRecord run_until_success(const ProtocolParams& params, Rng& rng);

// TrialRecord as a JSON row; reals at full double precision.
nlohmann::ordered_json trial_to_json(const TrialRecord& record);

}  // namespace cavbell
