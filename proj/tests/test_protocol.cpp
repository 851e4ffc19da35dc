#include "cavbell/protocol.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace cavbell;

namespace {

constexpr double kPi = std::numbers::pi;

// The ground branch computed through the exponential oracle instead of the
// closed-form rotations.
RunBranches single_run_via_expm(const CavityState& cavities, double x_a, double x_b) {
    StateVector full = adjoin_excited_atom(cavities);
    full = expm_propagate(full, CavitySelector::A, PulseArea{x_a});
    full = expm_propagate(full, CavitySelector::B, PulseArea{x_b});
    auto [pe, post_e] = project_atom(full, AtomOutcome::Excited);
    auto [pg, post_g] = project_atom(full, AtomOutcome::Ground);
    return RunBranches{pe, post_e, pg, post_g};
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("single run from vacuum matches the exact solution") {
    const CavityDims cdims{2, 2};
    const CavityState vacuum = CavityState::vacuum(cdims);

    SUBCASE("x = 0.5: branch data against the exponential-oracle path") {
        RunBranches br = single_run(vacuum, PulseArea{0.5}, PulseArea{0.5});
        RunBranches oracle = single_run_via_expm(vacuum, 0.5, 0.5);
        CHECK(br.prob_ground == doctest::Approx(oracle.prob_ground).epsilon(1e-12));
        CHECK(br.prob_ground == doctest::Approx(0.4068672).epsilon(1e-6));
        CHECK((br.post_ground.amps() - oracle.post_ground.amps()).cwiseAbs().maxCoeff() < 1e-10);

        // ground branch is proportional to cos(x)|01> + |10>
        const double scale = 1.0 / std::sqrt(1.0 + std::cos(0.5) * std::cos(0.5));
        CHECK(std::abs(br.post_ground.amp(0, 1) -
                       Amplitude{0.0, -std::cos(0.5) * scale}) < kAlgebraTol);
        CHECK(std::abs(br.post_ground.amp(1, 0) - Amplitude{0.0, -scale}) < kAlgebraTol);
    }

    SUBCASE("the excited branch restores the vacuum exactly, for any areas") {
        Rng rng(90);
        for (int i = 0; i < 40; ++i) {
            const double xa = rng.uniform(0.0, kPi), xb = rng.uniform(0.0, kPi);
            RunBranches br = single_run(vacuum, PulseArea{xa}, PulseArea{xb});
            CHECK(std::abs(std::abs(br.post_excited.amp(0, 0)) - 1.0) < kAlgebraTol);
            CHECK(std::abs(br.prob_excited + br.prob_ground - 1.0) < kAlgebraTol);
        }
    }

    SUBCASE("x = pi/2 detects the ground state with certainty") {
        RunBranches br = single_run(vacuum, PulseArea{kPi / 2}, PulseArea{kPi / 2});
        CHECK(br.prob_ground == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(std::abs(br.post_ground.amp(1, 0)) - 1.0) < kAlgebraTol);
        CHECK(fidelity_pure(bell_state(cdims), br.post_ground) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("closed-form fidelity") {
    CHECK(ideal_fidelity(0.0) == doctest::Approx(1.0));
    CHECK(ideal_fidelity(0.5) == doctest::Approx(0.9957670199156483).epsilon(1e-12));
    CHECK(ideal_fidelity(0.5) == doctest::Approx(0.995767).epsilon(1e-6));
    CHECK(ideal_fidelity(kPi / 2) == doctest::Approx(0.5).epsilon(1e-12));

    // matches the state-vector pipeline across the protocol range
    const CavityState vacuum = CavityState::vacuum({2, 2});
    const CavityState bell = bell_state({2, 2});
    for (int i = 1; i < 40; ++i) {
        const double x = kPi * i / 40.0;
        RunBranches br = single_run(vacuum, PulseArea{x}, PulseArea{x});
        CHECK(std::abs(ideal_fidelity(x) - fidelity_pure(bell, br.post_ground)) < 1e-12);
    }
}

TEST_CASE("closed-form success probability") {
    CHECK(success_probability(0.0) == doctest::Approx(0.0));
    CHECK(success_probability(0.5) == doctest::Approx(0.4068672016343228).epsilon(1e-12));
    CHECK(success_probability(0.35) == doctest::Approx(0.2213330134952258).epsilon(1e-12));

    const CavityState vacuum = CavityState::vacuum({2, 2});
    for (int i = 1; i < 40; ++i) {
        const double x = kPi * i / 40.0;
        RunBranches br = single_run(vacuum, PulseArea{x}, PulseArea{x});
        CHECK(std::abs(success_probability(x) - br.prob_ground) < 1e-12);
    }
}

TEST_CASE("asymmetric fidelity") {
    CHECK(asymmetric_fidelity(0.7, 0.0) == doctest::Approx(ideal_fidelity(0.7)).epsilon(1e-14));
    CHECK(asymmetric_fidelity(0.8, 0.2) == doctest::Approx(0.9340036).epsilon(1e-5));
    CHECK(asymmetric_fidelity(0.8, 0.0) == doctest::Approx(0.9690364).epsilon(1e-5));

    SUBCASE("agrees with the state-vector pipeline") {
        const CavityState vacuum = CavityState::vacuum({2, 2});
        const CavityState bell = bell_state({2, 2});
        for (double x : {0.3, 0.5, 0.8, 1.2}) {
            for (double eps : {-0.5, -0.2, 0.0, 0.3, 0.5}) {
                RunBranches br = single_run(vacuum, PulseArea{x}, PulseArea{x * (1.0 - eps)});
                CHECK(std::abs(asymmetric_fidelity(x, eps) - fidelity_pure(bell, br.post_ground)) <
                      1e-12);
            }
        }
    }

    SUBCASE("the maximum over epsilon sits at a small negative value") {
        double best_eps = 0.0, best_f = 0.0;
        for (double eps = -0.5; eps <= 0.5; eps += 1e-4) {
            const double f = asymmetric_fidelity(0.5, eps);
            if (f > best_f) {
                best_f = f;
                best_eps = eps;
            }
        }
        CHECK(best_eps < 0.0);
        CHECK(best_eps > -0.3);
        CHECK(best_f > ideal_fidelity(0.5));
    }
}

TEST_CASE("small-area expansions carry the right error order") {
    auto [f0, p0] = small_area_expansions(0.0);
    CHECK(f0 == doctest::Approx(1.0));
    CHECK(p0 == doctest::Approx(0.0));

    // residuals scale as x^6/48 and 5x^4/3 at leading order
    for (double x = 0.01; x <= 0.2 + 1e-9; x += 0.01) {
        auto [fid, succ] = small_area_expansions(x);
        const double f_ratio = std::abs(ideal_fidelity(x) - fid) / std::pow(x, 6);
        const double p_ratio = std::abs(success_probability(x) - succ) / std::pow(x, 4);
        CHECK(f_ratio == doctest::Approx(1.0 / 48.0).epsilon(0.05));
        CHECK(p_ratio == doctest::Approx(5.0 / 3.0).epsilon(0.05));
    }
}

TEST_CASE("repeated successes against the beam-splitter target") {
    SUBCASE("one success is the generated state") {
        CavityState s = repeated_success_state(1, PulseArea{0.7}, 3);
        VectorXcd v = VectorXcd::Zero(16);
        v(CavityDims{3, 3}.index(0, 1)) = std::cos(0.7);
        v(CavityDims{3, 3}.index(1, 0)) = 1.0;
        CavityState expected = CavityState(CavityDims{3, 3}, v).normalized();
        CHECK(fidelity_pure(expected, s) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("the small-area limit of two successes is the two-photon target") {
        CavityState s = repeated_success_state(2, PulseArea{1e-3}, 4);
        CHECK(fidelity_pure(beamsplitter_target(2, {4, 4}), s) >
              1.0 - 1e-9);
    }

    SUBCASE("fidelity to the target decreases strictly with n") {
        for (double x : {0.3, 0.5}) {
            double prev = 2.0;
            for (int n = 1; n <= 4; ++n) {
                const double f = fidelity_pure(beamsplitter_target(n, {6, 6}),
                                               repeated_success_state(n, PulseArea{x}, 6));
                CHECK(f < prev);
                prev = f;
            }
        }
        // endpoint values, frozen from the state-vector evaluation
        CHECK(fidelity_pure(beamsplitter_target(1, {6, 6}),
                            repeated_success_state(1, PulseArea{0.5}, 6)) ==
              doctest::Approx(0.9957670).epsilon(1e-6));
        CHECK(fidelity_pure(beamsplitter_target(4, {6, 6}),
                            repeated_success_state(4, PulseArea{0.5}, 6)) ==
              doctest::Approx(0.9573889).epsilon(1e-5));
    }

    SUBCASE("cutoff discipline") {
        CHECK_THROWS_AS(repeated_success_state(3, PulseArea{0.5}, 3), std::out_of_range);
    }
}

TEST_CASE("beam-splitter target amplitudes follow the binomial law") {
    CHECK(fidelity_pure(beamsplitter_target(1, {1, 1}), bell_state({1, 1})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_pure(beamsplitter_target(0, {2, 2}), make_cavity_basis({2, 2}, 0, 0)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    CavityState two = beamsplitter_target(2, {2, 2});
    CHECK(two.amp(0, 2).real() == doctest::Approx(0.5));
    CHECK(two.amp(1, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(two.amp(2, 0).real() == doctest::Approx(0.5));

    for (int n = 1; n <= 5; ++n) {
        CavityState t = beamsplitter_target(n, {5, 5});
        for (int k = 0; k <= n; ++k) {
            CHECK(t.amp(k, n - k).real() ==
                  doctest::Approx(std::sqrt(binom(n, k) / std::pow(2.0, n))).epsilon(1e-12));
        }
        CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(beamsplitter_target(3, CavityDims{2, 2}), std::out_of_range);
}

TEST_CASE("null runs reset the cavities only at n = 0") {
    CHECK(null_run_nonreset_check(0, PulseArea{0.5}, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(null_run_nonreset_check(0, PulseArea{1.3}, 3) == doctest::Approx(1.0).epsilon(1e-12));

    const double f1 = null_run_nonreset_check(1, PulseArea{0.5}, 3);
    CHECK(f1 < 1.0);
    CHECK(f1 == doctest::Approx(0.9683592).epsilon(1e-6));

    CHECK(null_run_nonreset_check(1, PulseArea{1e-3}, 3) > 1.0 - 1e-5);
}

TEST_CASE("all-detections estimate") {
    CHECK(detection_all_works_probability(1.0, 0.5) == doctest::Approx(1.0));
    CHECK(detection_all_works_probability(0.4, 0.5) == doctest::Approx(0.1051820).epsilon(1e-4));
    for (double x = 0.1; x < kPi / 2; x += 0.1) {
        CHECK(detection_all_works_probability(0.4, x) <= 0.4 + 1e-15);
    }
    CHECK_THROWS_AS(detection_all_works_probability(0.4, 0.0), std::domain_error);
    CHECK_THROWS_AS(detection_all_works_probability(1.5, 0.5), std::out_of_range);
}

TEST_CASE("expected runs") {
    CHECK(expected_runs(kPi / 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expected_runs(0.5) == doctest::Approx(2.4578044).epsilon(1e-6));
    CHECK(expected_runs(0.35) == doctest::Approx(4.5180788).epsilon(1e-6));
    CHECK_THROWS_AS(expected_runs(0.0), std::domain_error);
}

TEST_CASE("amplitude damping channel") {
    const CavityDims cdims{2, 2};

    SUBCASE("zero decay is the identity") {
        DensityMatrix rho = DensityMatrix::pure(bell_state(cdims));
        DensityMatrix out = amplitude_damp(rho, 0.0);
        CHECK((out.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < kAlgebraTol);
    }

    SUBCASE("full decay drains everything into the vacuum") {
        MatrixXcd m = MatrixXcd::Zero(cdims.dim(), cdims.dim());
        m(cdims.index(2, 1), cdims.index(2, 1)) = 0.7;
        m(cdims.index(1, 2), cdims.index(1, 2)) = 0.3;
        DensityMatrix out = amplitude_damp(DensityMatrix(cdims, m), 1.0);
        CHECK(fidelity_mixed(out, make_cavity_basis(cdims, 0, 0)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("the Bell state keeps 1 - gamma of its fidelity") {
        for (double gamma : {0.1, 0.37, 0.9}) {
            DensityMatrix out = amplitude_damp(DensityMatrix::pure(bell_state(cdims)), gamma);
            CHECK(fidelity_mixed(out, bell_state(cdims)) ==
                  doctest::Approx(1.0 - gamma).epsilon(1e-12));
            CHECK(std::abs(out.trace() - 1.0) < kAlgebraTol);
            CHECK(out.is_physical());
        }
    }

    SUBCASE("trace is preserved on random mixed states") {
        Rng rng(4);
        for (int i = 0; i < 10; ++i) {
            VectorXcd v(cdims.dim());
            for (int k = 0; k < v.size(); ++k)
                v(k) = Amplitude{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            DensityMatrix rho = DensityMatrix::pure(CavityState(cdims, v).normalized());
            DensityMatrix out = amplitude_damp(rho, rng.uniform01());
            CHECK(std::abs(out.trace() - 1.0) < kAlgebraTol);
            CHECK(out.is_physical());
        }
    }

    CHECK_THROWS_AS(amplitude_damp(DensityMatrix::vacuum(cdims), 1.5), std::out_of_range);
}

TEST_CASE("trial loop: ideal detector") {
    ProtocolParams params;
    params.x = 0.5;
    params.detector_eff = 1.0;
    params.seed = 21;

    SUBCASE("mean runs tracks 1/P within 3 sigma at 1e5 trials") {
        double sum = 0.0, sum_sq = 0.0;
        int first_run_success = 0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            Rng rng = Rng::stream(params.seed, t);
            TrialRecord rec = run_until_success(params, rng);
            REQUIRE(rec.outcome == TrialOutcome::Success);
            CHECK(rec.detection_failures == 0);
            if (rec.runs_used == 1) ++first_run_success;
            sum += rec.runs_used;
            sum_sq += static_cast<double>(rec.runs_used) * rec.runs_used;
        }
        const double mean = sum / trials;
        const double sd = std::sqrt(sum_sq / trials - mean * mean);
        CHECK(std::abs(mean - expected_runs(0.5)) < 3.0 * sd / std::sqrt(trials));
        CHECK(mean == doctest::Approx(2.4578).epsilon(0.01));

        // empirical first-run branch frequency against the analytic probability
        const double p = success_probability(0.5);
        const double freq = static_cast<double>(first_run_success) / trials;
        CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1.0 - p) / trials));
    }

    SUBCASE("x = pi/2 always succeeds on the first run") {
        params.x = kPi / 2;
        for (int t = 0; t < 50; ++t) {
            Rng rng = Rng::stream(7, t);
            TrialRecord rec = run_until_success(params, rng);
            CHECK(rec.runs_used == 1);
            CHECK(rec.outcome == TrialOutcome::Success);
        }
    }

    SUBCASE("success states carry the closed-form fidelity") {
        Rng rng = Rng::stream(3, 0);
        TrialRecord rec = run_until_success(params, rng);
        REQUIRE(rec.final_pure.has_value());
        CHECK(fidelity_pure(bell_state(rec.final_pure->dims()), *rec.final_pure) ==
              doctest::Approx(ideal_fidelity(0.5)).epsilon(1e-12));
    }
}

TEST_CASE("trial loop: lossy detector under halt-and-damp") {
    ProtocolParams params;
    params.x = 0.5;
    params.detector_eff = 0.4;
    params.seed = 99;

    // The exact probability of reaching success without any detection
    // failure is P D / (1 - D + P D) = 0.21337 here; the D^(1/P) = 0.105
    // figure is the mean-exponent estimate of the same quantity.
    const double p = success_probability(0.5), d = 0.4;
    const double exact_failure_free = p * d / (1.0 - d + p * d);

    const int trials = 100000;
    int failure_free = 0;
    double time_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(params.seed, t);
        TrialRecord rec = run_until_success(params, rng);
        REQUIRE(rec.outcome == TrialOutcome::Success);
        if (rec.detection_failures == 0) ++failure_free;
        time_sum += rec.elapsed_model_time;
    }
    const double fraction = static_cast<double>(failure_free) / trials;
    const double se = std::sqrt(exact_failure_free * (1.0 - exact_failure_free) / trials);
    CHECK(std::abs(fraction - exact_failure_free) < 3.0 * se);
    CHECK(time_sum / trials < 1.0);     // well under a second of model time
    CHECK(time_sum / trials > 1e-4);    // and clearly charged for the waits
}

TEST_CASE("trial loop: carrying the mixed state forward degrades fidelity") {
    ProtocolParams params;
    params.x = 0.5;
    params.detector_eff = 0.4;
    params.failure_policy = FailurePolicy::ContinueMixed;
    params.cutoff = 12;
    params.max_runs = 12;  // max_runs <= cutoff keeps the guard quiet
    params.seed = 5;

    const CavityState bell = bell_state({12, 12});
    int successes = 0, degraded = 0, contaminated = 0;
    double fid_sum = 0.0;
    for (int t = 0; t < 150; ++t) {
        Rng rng = Rng::stream(params.seed, t);
        TrialRecord rec = run_until_success(params, rng);
        if (rec.outcome != TrialOutcome::Success) continue;
        ++successes;
        REQUIRE(rec.final_mixed.has_value());
        CHECK(std::abs(rec.final_mixed->trace() - 1.0) < 1e-10);
        const double f = fidelity_mixed(*rec.final_mixed, bell);
        fid_sum += f;
        if (rec.detection_failures > 0) {
            ++degraded;
            if (f < ideal_fidelity(0.5) - 1e-6) ++contaminated;
        } else {
            CHECK(f == doctest::Approx(ideal_fidelity(0.5)).epsilon(1e-10));
        }
    }
    REQUIRE(successes > 50);
    REQUIRE(degraded > 10);
    CHECK(contaminated == degraded);                      // every failure leaves a mark
    CHECK(fid_sum / successes < ideal_fidelity(0.5));     // the average suffers
}

TEST_CASE("exhaustion is an outcome, not an error") {
    ProtocolParams params;
    params.x = 0.05;       // success is rare
    params.max_runs = 3;
    params.seed = 1;
    int exhausted = 0;
    for (int t = 0; t < 200; ++t) {
        Rng rng = Rng::stream(params.seed, t);
        TrialRecord rec = run_until_success(params, rng);
        if (rec.outcome == TrialOutcome::Exhausted) {
            ++exhausted;
            CHECK(rec.runs_used == 3);
        }
    }
    CHECK(exhausted > 150);  // P(success per run) is about 0.005
}

TEST_CASE("parameter validation") {
    ProtocolParams params;
    params.detector_eff = 1.2;
    CHECK_THROWS_AS(params.validate(), std::out_of_range);
    params.detector_eff = 0.5;
    params.cutoff = 1;
    CHECK_THROWS_AS(params.validate(), std::out_of_range);
    params.cutoff = 2;
    params.decay_fraction = -0.1;
    CHECK_THROWS_AS(params.validate(), std::out_of_range);
    params.decay_fraction.reset();
    params.damp_wait_s = 1e-3;
    params.cavity_lifetime_s = 1e-3;
    CHECK(params.decay() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK_NOTHROW(params.validate());
}

TEST_CASE("trial records serialize to JSON rows") {
    ProtocolParams params;
    params.x = 0.5;
    params.seed = 17;
    Rng rng = Rng::stream(params.seed, 0);
    TrialRecord rec = run_until_success(params, rng);
    nlohmann::ordered_json j = trial_to_json(rec);
    CHECK(j["outcome"] == "success");
    CHECK(j["runs_used"].get<int>() >= 1);
    CHECK(j["detection_failures"].get<int>() == 0);
    CHECK(j["final_state"]["type"] == "pure");
    CHECK(j["final_state"]["amps"].size() == 9);

    // a mixed record keeps the matrix
    params.failure_policy = FailurePolicy::ContinueMixed;
    params.detector_eff = 0.2;
    params.cutoff = 6;
    params.max_runs = 6;
    Rng rng2 = Rng::stream(1, 2);
    TrialRecord rec2 = run_until_success(params, rng2);
    nlohmann::ordered_json j2 = trial_to_json(rec2);
    CHECK(j2["final_state"]["type"] == "mixed");

    // an exhausted record is labeled as such
    params.failure_policy = FailurePolicy::HaltAndDamp;
    params.cutoff = 2;
    params.x = 0.01;
    params.max_runs = 2;
    params.detector_eff = 1.0;
    Rng rng3 = Rng::stream(2, 0);
    nlohmann::ordered_json j3 = trial_to_json(run_until_success(params, rng3));
    CHECK(j3["outcome"] == "exhausted");
}

TEST_CASE("pulse areas must be finite") {
    CHECK_THROWS_AS(PulseArea{std::nan("")}, std::invalid_argument);
    CHECK_THROWS_AS(PulseArea{std::numeric_limits<double>::infinity()}, std::invalid_argument);
}
