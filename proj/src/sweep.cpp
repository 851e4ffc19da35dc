#include "cavbell/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

namespace cavbell {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Bisection for a monotone f on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect(double lo, double hi, const auto& f) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-9; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = f(mid);
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void SweepSpec::validate() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || start >= stop)
        throw std::invalid_argument("sweep: requires finite start < stop");
    if (steps < 2) throw std::invalid_argument("sweep: requires at least 2 steps");
}

double SweepSpec::point(int i) const {
    return start + (stop - start) * static_cast<double>(i) / (steps - 1);
}

std::string Series::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json Series::to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
        arr.push_back(std::move(obj));
    }
    return arr;
}

Series sweep_fidelity(const SweepSpec& spec) {
    spec.validate();
    Series s{{"x", "fidelity"}, {}};
    s.rows.reserve(spec.steps);
    for (int i = 0; i < spec.steps; ++i) {
        const double x = spec.point(i);
        s.rows.push_back({x, ideal_fidelity(x)});
    }
    return s;
}

Series sweep_success(const SweepSpec& spec) {
    spec.validate();
    Series s{{"x", "success_prob"}, {}};
    s.rows.reserve(spec.steps);
    for (int i = 0; i < spec.steps; ++i) {
        const double x = spec.point(i);
        s.rows.push_back({x, success_probability(x)});
    }
    return s;
}

Series sweep_epsilon(const SweepSpec& spec, double x, std::vector<std::string>* warnings) {
    spec.validate();
    const bool log_abscissa = spec.variable == SweepVariable::LogOneMinusEpsilon;
    Series s;
    s.columns = log_abscissa ? std::vector<std::string>{"ln_one_minus_epsilon", "epsilon", "fidelity"}
                             : std::vector<std::string>{"epsilon", "fidelity"};
    s.rows.reserve(spec.steps);
    for (int i = 0; i < spec.steps; ++i) {
        const double eps = spec.point(i);
        if (log_abscissa && eps >= 1.0) {
            if (warnings)
                warnings->push_back("epsilon-sweep: dropped epsilon=" + format_double(eps) +
                                    " (ln(1-epsilon) undefined)");
            continue;
        }
        const double f = asymmetric_fidelity(x, eps);
        if (log_abscissa) {
            s.rows.push_back({std::log1p(-eps), eps, f});
        } else {
            s.rows.push_back({eps, f});
        }
    }
    return s;
}

OperatingWindow sweep_operating_window(double fidelity_floor, double prob_floor) {
    if (!(fidelity_floor > 0.0) || !(fidelity_floor < 1.0))
        throw std::invalid_argument("operating window: fidelity floor must lie in (0, 1)");
    if (prob_floor < 0.0 || prob_floor >= 1.0)
        throw std::invalid_argument("operating window: probability floor must lie in [0, 1)");

    // ideal_fidelity decreases monotonically across [0, pi]; the fidelity
    // constraint caps the window from above.
    double x_fid = kPi;
    if (ideal_fidelity(kPi) < fidelity_floor) {
        x_fid = bisect(0.0, kPi, [&](double x) { return ideal_fidelity(x) - fidelity_floor; });
    }

    // success_probability rises to 1 at pi/2 and is symmetric about it.
    double x_prob_lo = 0.0, x_prob_hi = kPi;
    if (prob_floor > 0.0) {
        if (success_probability(kPi / 2) < prob_floor) return OperatingWindow{};
        x_prob_lo = bisect(0.0, kPi / 2,
                           [&](double x) { return success_probability(x) - prob_floor; });
        x_prob_hi = kPi - x_prob_lo;
    }

    const double lo = x_prob_lo;
    const double hi = std::min(x_fid, x_prob_hi);
    if (lo > hi) return OperatingWindow{};
    return OperatingWindow{false, lo, hi};
}

namespace {

struct BlockAggregate {
    long long successes = 0;
    long long failure_free = 0;
    long long exhausted = 0;
    double sum_runs = 0.0;
    double sum_runs_sq = 0.0;
    double sum_time = 0.0;
    double sum_success_fidelity = 0.0;
};

constexpr int kBlockSize = 512;

BlockAggregate run_block(const ProtocolParams& params, int first, int count) {
    BlockAggregate agg;
    const CavityDims cdims{params.cutoff, params.cutoff};
    const CavityState bell = bell_state(cdims);
    for (int t = first; t < first + count; ++t) {
        Rng rng = Rng::stream(params.seed, static_cast<std::uint64_t>(t));
        const TrialRecord rec = run_until_success(params, rng);
        agg.sum_runs += rec.runs_used;
        agg.sum_runs_sq += static_cast<double>(rec.runs_used) * rec.runs_used;
        agg.sum_time += rec.elapsed_model_time;
        if (rec.outcome == TrialOutcome::Success) {
            ++agg.successes;
            if (rec.detection_failures == 0) ++agg.failure_free;
            if (rec.final_pure) {
                agg.sum_success_fidelity += fidelity_pure(bell, *rec.final_pure);
            } else if (rec.final_mixed) {
                agg.sum_success_fidelity += fidelity_mixed(*rec.final_mixed, bell);
            }
        } else if (rec.outcome == TrialOutcome::Exhausted) {
            ++agg.exhausted;
        }
    }
    return agg;
}

}  // namespace

MonteCarloSummary run_trials(const ProtocolParams& params, int trials, int threads) {
    params.validate();
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be at least 1");
    if (threads < 1) threads = 1;

    const int blocks = (trials + kBlockSize - 1) / kBlockSize;
    std::vector<BlockAggregate> block_aggs(blocks);

    if (threads == 1 || blocks == 1) {
        for (int b = 0; b < blocks; ++b) {
            const int first = b * kBlockSize;
            block_aggs[b] = run_block(params, first, std::min(kBlockSize, trials - first));
        }
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
                const int first = b * kBlockSize;
                block_aggs[b] = run_block(params, first, std::min(kBlockSize, trials - first));
            }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < std::min(threads, blocks); ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduce in block order: the totals do not depend on the thread count.
    BlockAggregate total;
    for (const BlockAggregate& a : block_aggs) {
        total.successes += a.successes;
        total.failure_free += a.failure_free;
        total.exhausted += a.exhausted;
        total.sum_runs += a.sum_runs;
        total.sum_runs_sq += a.sum_runs_sq;
        total.sum_time += a.sum_time;
        total.sum_success_fidelity += a.sum_success_fidelity;
    }

    const double n = trials;
    MonteCarloSummary s;
    s.trials = trials;
    s.success_rate = total.successes / n;
    s.success_se = std::sqrt(s.success_rate * (1.0 - s.success_rate) / n);
    s.mean_runs = total.sum_runs / n;
    const double var_runs = std::max(0.0, total.sum_runs_sq / n - s.mean_runs * s.mean_runs);
    s.runs_se = std::sqrt(var_runs / n);
    s.failure_free_fraction = total.failure_free / n;
    s.failure_free_se =
        std::sqrt(s.failure_free_fraction * (1.0 - s.failure_free_fraction) / n);
    s.mean_model_time = total.sum_time / n;
    s.mean_success_fidelity =
        total.successes > 0 ? total.sum_success_fidelity / total.successes : 0.0;
    s.exhausted_fraction = total.exhausted / n;
    return s;
}

Series sweep_montecarlo(const SweepSpec& spec, const ProtocolParams& base,
                        int trials, std::uint64_t seed, int threads) {
    spec.validate();
    if (trials < 1) throw std::invalid_argument("sweep_montecarlo: trials must be at least 1");
    std::string abscissa;
    switch (spec.variable) {
        case SweepVariable::PulseAreaX: abscissa = "x"; break;
        case SweepVariable::Epsilon: abscissa = "epsilon"; break;
        case SweepVariable::DetectorEff: abscissa = "detector_eff"; break;
        default:
            throw std::invalid_argument("sweep_montecarlo: variable must be x, epsilon or D");
    }

    Series s{{abscissa, "trials", "success_rate", "success_se", "mean_runs", "runs_se",
              "failure_free_fraction", "failure_free_se", "mean_model_time",
              "mean_success_fidelity", "exhausted_fraction"},
             {}};
    s.rows.reserve(spec.steps);
    for (int i = 0; i < spec.steps; ++i) {
        const double value = spec.point(i);
        ProtocolParams params = base;
        switch (spec.variable) {
            case SweepVariable::PulseAreaX: params.x = value; break;
            case SweepVariable::Epsilon: params.epsilon = value; break;
            case SweepVariable::DetectorEff: params.detector_eff = value; break;
            default: break;
        }
        params.seed = mix64(seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(i) + 1));
        const MonteCarloSummary m = run_trials(params, trials, threads);
        s.rows.push_back({value, static_cast<double>(m.trials), m.success_rate, m.success_se,
                          m.mean_runs, m.runs_se, m.failure_free_fraction, m.failure_free_se,
                          m.mean_model_time, m.mean_success_fidelity, m.exhausted_fraction});
    }
    return s;
}

Series sweep_multiphoton(int n_max, double x, int cutoff) {
    if (n_max < 1) throw std::invalid_argument("sweep_multiphoton: n_max must be at least 1");
    Series s{{"n", "fidelity"}, {}};
    const CavityDims dims{cutoff, cutoff};
    for (int n = 1; n <= n_max; ++n) {
        const CavityState state = repeated_success_state(n, PulseArea{x}, cutoff);
        s.rows.push_back({static_cast<double>(n),
                          fidelity_pure(beamsplitter_target(n, dims), state)});
    }
    return s;
}

double ParisPreset::scaled_g0() const { return g0 / std::pow(cavity_scale, 1.5); }
double ParisPreset::scaled_w0() const { return w0 * std::sqrt(cavity_scale); }
double ParisPreset::central_tau() const { return std::sqrt(kPi) * scaled_w0() / v; }
double ParisPreset::central_pulse_area() const { return scaled_g0() * central_tau(); }
double ParisPreset::angular_radius() const { return beam_radius / d1; }

CavityMode ParisPreset::mode() const { return CavityMode{scaled_w0(), lambda, {}, {}}; }

BeamSamplerConfig ParisPreset::sampler_config() const {
    return BeamSamplerConfig{beam_radius, angular_radius(), d0, d1, v};
}

ParisPreset preset_paris(double cavity_scale) {
    if (!(cavity_scale > 0.0))
        throw std::invalid_argument("preset: cavity_scale must be positive");
    ParisPreset p;
    p.cavity_scale = cavity_scale;
    return p;
}

}  // namespace cavbell
