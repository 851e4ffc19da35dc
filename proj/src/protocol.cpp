#include "cavbell/protocol.hpp"

#include <cmath>
#include <utility>

namespace cavbell {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

// One-mode amplitude-damping Kraus operator E_k on levels 0..cutoff:
// <n-k| E_k |n> = sqrt(C(n,k) gamma^k (1-gamma)^(n-k)).
MatrixXcd kraus_op(int cutoff, int k, double gamma) {
    const int levels = cutoff + 1;
    MatrixXcd e = MatrixXcd::Zero(levels, levels);
    for (int n = k; n <= cutoff; ++n) {
        e(n - k, n) = std::sqrt(binom(n, k) * std::pow(gamma, k) *
                                std::pow(1.0 - gamma, n - k));
    }
    return e;
}

// Embed a one-mode operator into the two-mode space on the chosen mode.
MatrixXcd embed_mode_op(const MatrixXcd& op, const CavityDims& dims, bool mode_a) {
    MatrixXcd full = MatrixXcd::Zero(dims.dim(), dims.dim());
    for (int ma = 0; ma <= dims.cutoff_a; ++ma)
        for (int mb = 0; mb <= dims.cutoff_b; ++mb)
            for (int na = 0; na <= dims.cutoff_a; ++na)
                for (int nb = 0; nb <= dims.cutoff_b; ++nb) {
                    const Amplitude v = mode_a ? (mb == nb ? op(ma, na) : Amplitude{})
                                               : (ma == na ? op(mb, nb) : Amplitude{});
                    if (v != Amplitude{}) full(dims.index(ma, mb), dims.index(na, nb)) = v;
                }
    return full;
}

DensityMatrix damp_one_mode(const DensityMatrix& rho, double gamma, bool mode_a) {
    const int cutoff = mode_a ? rho.dims().cutoff_a : rho.dims().cutoff_b;
    MatrixXcd out = MatrixXcd::Zero(rho.dims().dim(), rho.dims().dim());
    for (int k = 0; k <= cutoff; ++k) {
        const MatrixXcd kr = embed_mode_op(kraus_op(cutoff, k, gamma), rho.dims(), mode_a);
        out += kr * rho.matrix() * kr.adjoint();
    }
    return DensityMatrix(rho.dims(), std::move(out));
}

CavityState branch_state(const VectorXcd& block, double prob,
                         const CavityDims& dims, const CavityState& fallback) {
    if (prob == 0.0) return fallback;  // degenerate branch keeps the pre-run state
    return CavityState(dims, block / std::sqrt(prob));
}

}  // namespace

double ProtocolParams::decay() const {
    if (decay_fraction) return *decay_fraction;
    return 1.0 - std::exp(-damp_wait_s / cavity_lifetime_s);
}

void ProtocolParams::validate() const {
    if (!std::isfinite(x) || !std::isfinite(epsilon))
        throw std::invalid_argument("protocol: x and epsilon must be finite");
    if (detector_eff < 0.0 || detector_eff > 1.0)
        throw std::out_of_range("protocol: detector_eff must lie in [0, 1]");
    if (cutoff < 2) throw std::out_of_range("protocol: cutoff must be at least 2");
    if (max_runs < 1) throw std::out_of_range("protocol: max_runs must be at least 1");
    if (run_time_s < 0.0 || damp_wait_s < 0.0 || cavity_lifetime_s <= 0.0)
        throw std::out_of_range("protocol: model times must be non-negative, lifetime positive");
    if (decay_fraction && (*decay_fraction < 0.0 || *decay_fraction > 1.0))
        throw std::out_of_range("protocol: decay_fraction must lie in [0, 1]");
}

RunBranches single_run(const CavityState& cavities, PulseArea x_a, PulseArea x_b) {
    StateVector full = adjoin_excited_atom(cavities);
    full = jc_propagate(full, CavitySelector::A, x_a);
    full = jc_propagate(full, CavitySelector::B, x_b);

    const int n = cavities.dims().dim();
    const VectorXcd g = full.amps().segment(full.dims().atom_block(AtomOutcome::Ground), n);
    const VectorXcd e = full.amps().segment(full.dims().atom_block(AtomOutcome::Excited), n);
    const double pg = g.squaredNorm();
    const double pe = e.squaredNorm();
    return RunBranches{pe, branch_state(e, pe, cavities.dims(), cavities),
                       pg, branch_state(g, pg, cavities.dims(), cavities)};
}

double ideal_fidelity(double x) {
    const double c = std::cos(x);
    return 0.5 + c / (c * c + 1.0);
}

double success_probability(double x) {
    const double c2 = std::cos(x) * std::cos(x);
    return 1.0 - c2 * c2;
}

double asymmetric_fidelity(double x, double epsilon) {
    const double c = std::cos(x);
    const double s = std::sin(x);
    const double sb = std::sin(x * (1.0 - epsilon));
    return 0.5 + c * s * sb / (c * c * sb * sb + s * s);
}

SmallAreaApprox small_area_expansions(double x) {
    const double x2 = x * x;
    return {1.0 - x2 * x2 / 16.0, 2.0 * x2};
}

CavityState repeated_success_state(int n, PulseArea x, int cutoff) {
    if (n < 0) throw std::out_of_range("repeated_success_state: n must be non-negative");
    if (cutoff < n + 1)
        throw std::out_of_range("repeated_success_state: cutoff must be at least n + 1");
    CavityState state = CavityState::vacuum({cutoff, cutoff});
    for (int i = 0; i < n; ++i) {
        RunBranches branches = single_run(state, x, x);
        if (branches.prob_ground == 0.0)
            throw ZeroProbabilityError("repeated_success_state: ground branch impossible");
        state = branches.post_ground;
    }
    return state;
}

CavityState beamsplitter_target(int n, const CavityDims& dims) {
    if (n < 0) throw std::out_of_range("beamsplitter_target: n must be non-negative");
    if (dims.cutoff_a < n || dims.cutoff_b < n)
        throw std::out_of_range("beamsplitter_target: cutoff must be at least n");
    VectorXcd v = VectorXcd::Zero(dims.dim());
    for (int k = 0; k <= n; ++k) {
        v(dims.index(k, n - k)) = std::sqrt(binom(n, k) / std::pow(2.0, n));
    }
    return CavityState(dims, std::move(v));
}

double null_run_nonreset_check(int n, PulseArea x, int cutoff) {
    const CavityState pre = repeated_success_state(n, x, cutoff);
    RunBranches branches = single_run(pre, x, x);
    return fidelity_pure(pre, branches.post_excited);
}

double detection_all_works_probability(double detector_eff, double x) {
    if (detector_eff < 0.0 || detector_eff > 1.0)
        throw std::out_of_range("detection_all_works_probability: D must lie in [0, 1]");
    const double p = success_probability(x);
    if (p <= 0.0)
        throw std::domain_error("detection_all_works_probability: zero success probability");
    return std::pow(detector_eff, 1.0 / p);
}

double expected_runs(double x) {
    const double p = success_probability(x);
    if (p <= 0.0) throw std::domain_error("expected_runs: zero success probability");
    return 1.0 / p;
}

DensityMatrix amplitude_damp(const DensityMatrix& rho, double decay_fraction) {
    if (decay_fraction < 0.0 || decay_fraction > 1.0)
        throw std::out_of_range("amplitude_damp: decay_fraction must lie in [0, 1]");
    return damp_one_mode(damp_one_mode(rho, decay_fraction, true), decay_fraction, false);
}

namespace {

TrialRecord run_trial_halt(const ProtocolParams& params, Rng& rng) {
    const CavityDims cdims{params.cutoff, params.cutoff};
    const CavityState vacuum = CavityState::vacuum(cdims);
    const PulseArea xa{params.x}, xb{params.x_b()};

    TrialRecord rec;
    CavityState state = vacuum;
    for (int run = 1; run <= params.max_runs; ++run) {
        const RunBranches branches = single_run(state, xa, xb);
        rec.elapsed_model_time += params.run_time_s;
        const bool ground = rng.uniform01() < branches.prob_ground;
        const bool detected = rng.uniform01() < params.detector_eff;
        if (detected) {
            if (ground) {
                rec.runs_used = run;
                rec.outcome = TrialOutcome::Success;
                rec.final_pure = branches.post_ground;
                return rec;
            }
            state = branches.post_excited;
        } else {
            // Undetected atom: the cavities hold the unconditioned mixture.
            // The halt waits out the dissipation; the next run starts clean.
            ++rec.detection_failures;
            DensityMatrix mixture(cdims,
                                  branches.prob_excited * branches.post_excited.amps() *
                                          branches.post_excited.amps().adjoint() +
                                      branches.prob_ground * branches.post_ground.amps() *
                                          branches.post_ground.amps().adjoint());
            mixture = amplitude_damp(mixture, params.decay());
            rec.elapsed_model_time += params.damp_wait_s;
            state = vacuum;
        }
    }
    rec.runs_used = params.max_runs;
    rec.outcome = TrialOutcome::Exhausted;
    rec.final_pure = state;
    return rec;
}

TrialRecord run_trial_continue(const ProtocolParams& params, Rng& rng) {
    const CavityDims cdims{params.cutoff, params.cutoff};
    const SpaceDims fdims{cdims};
    const int n = cdims.dim();
    const PulseArea xa{params.x}, xb{params.x_b()};

    TrialRecord rec;
    DensityMatrix rho = DensityMatrix::vacuum(cdims);
    for (int run = 1; run <= params.max_runs; ++run) {
        MatrixXcd full = adjoin_excited_atom(rho);
        full = jc_propagate(full, fdims, CavitySelector::A, xa);
        full = jc_propagate(full, fdims, CavitySelector::B, xb);
        rec.elapsed_model_time += params.run_time_s;

        const double pg = full.block(0, 0, n, n).trace().real();
        const double pe = full.block(n, n, n, n).trace().real();
        const bool ground = rng.uniform01() < pg;
        const bool detected = rng.uniform01() < params.detector_eff;
        if (detected) {
            if (ground) {
                rec.runs_used = run;
                rec.outcome = TrialOutcome::Success;
                rec.final_mixed = DensityMatrix(cdims, full.block(0, 0, n, n) / pg);
                return rec;
            }
            rho = DensityMatrix(cdims, full.block(n, n, n, n) / pe);
        } else {
            ++rec.detection_failures;
            rho = partial_trace_atom(full, fdims);
        }
    }
    rec.runs_used = params.max_runs;
    rec.outcome = TrialOutcome::Exhausted;
    rec.final_mixed = rho;
    return rec;
}

}  // namespace

TrialRecord run_until_success(const ProtocolParams& params, Rng& rng) {
    params.validate();
    return params.failure_policy == FailurePolicy::HaltAndDamp
               ? run_trial_halt(params, rng)
               : run_trial_continue(params, rng);
}

nlohmann::ordered_json trial_to_json(const TrialRecord& record) {
    nlohmann::ordered_json j;
    j["runs_used"] = record.runs_used;
    switch (record.outcome) {
        case TrialOutcome::Success: j["outcome"] = "success"; break;
        case TrialOutcome::DetectionFailure: j["outcome"] = "detection_failure"; break;
        case TrialOutcome::Exhausted: j["outcome"] = "exhausted"; break;
    }
    j["elapsed_model_time"] = record.elapsed_model_time;
    j["detection_failures"] = record.detection_failures;
    if (record.final_pure) {
        const CavityState& s = *record.final_pure;
        nlohmann::ordered_json state;
        state["type"] = "pure";
        state["cutoff_a"] = s.dims().cutoff_a;
        state["cutoff_b"] = s.dims().cutoff_b;
        auto& amps = state["amps"] = nlohmann::ordered_json::array();
        for (int i = 0; i < s.amps().size(); ++i)
            amps.push_back({s.amps()(i).real(), s.amps()(i).imag()});
        j["final_state"] = std::move(state);
    } else if (record.final_mixed) {
        const DensityMatrix& r = *record.final_mixed;
        nlohmann::ordered_json state;
        state["type"] = "mixed";
        state["cutoff_a"] = r.dims().cutoff_a;
        state["cutoff_b"] = r.dims().cutoff_b;
        auto& rows = state["matrix"] = nlohmann::ordered_json::array();
        for (int i = 0; i < r.matrix().rows(); ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int k = 0; k < r.matrix().cols(); ++k)
                row.push_back({r.matrix()(i, k).real(), r.matrix()(i, k).imag()});
            rows.push_back(std::move(row));
        }
        j["final_state"] = std::move(state);
    } else {
        j["final_state"] = nullptr;
    }
    return j;
}

}  // namespace cavbell
