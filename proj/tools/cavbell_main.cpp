// cavbell command line: sweeps, geometry evaluation, Monte Carlo batches,
// single protocol trials and preset inspection. All randomness is seeded;
// a fixed command line with a fixed seed reproduces its output byte for
// byte, independent of --threads.
#include "cavbell/config.hpp"
#include "cavbell/geometry.hpp"
#include "cavbell/protocol.hpp"
#include "cavbell/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using nlohmann::ordered_json;

const std::set<std::string> kGeometryKeys = {"w0",    "lambda", "L",  "R",  "y0",
                                             "z0",    "phi",    "theta", "v", "D0",
                                             "D1",    "beam_radius", "angular_radius"};
const std::set<std::string> kProtocolKeys = {"x",       "epsilon",  "detector_eff", "cutoff",
                                             "max_runs", "seed",    "run_time",     "damp_wait",
                                             "lifetime", "decay_fraction"};

void emit(const std::string& out_path, const std::string& data) {
    if (out_path.empty()) {
        std::fwrite(data.data(), 1, data.size(), stdout);
        if (std::fflush(stdout) != 0) throw cavbell::IoError("cannot write to standard output");
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw cavbell::IoError("cannot open output file '" + out_path + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw cavbell::IoError("cannot write output file '" + out_path + "'");
}

void log_config(const std::string& subcommand, const ordered_json& resolved) {
    std::cerr << "cavbell " << subcommand << " config: " << resolved.dump() << "\n";
}

std::string render_series(const cavbell::Series& series, const std::string& format) {
    if (format == "json") return series.to_json().dump() + "\n";
    return series.to_csv();
}

// Flag wins over config file; config wins over the built-in default.
double resolve(const CLI::Option* opt, double flag_value,
               const std::map<std::string, double>& config, const std::string& key,
               std::optional<double> fallback = std::nullopt) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (auto it = config.find(key); it != config.end()) return it->second;
    if (fallback) return *fallback;
    throw cavbell::ConfigError("missing required value '" + key +
                               "' (set the flag or a config entry)");
}

struct SweepArgs {
    double from = 0.0;
    double to = 1.0;
    int steps = 101;
    std::string format = "csv";
    std::string out;
};

void add_sweep_args(CLI::App* cmd, SweepArgs& args, double from, double to) {
    args.from = from;
    args.to = to;
    cmd->add_option("--from", args.from, "first abscissa value (dimensionless)");
    cmd->add_option("--to", args.to, "last abscissa value (dimensionless)");
    cmd->add_option("--steps", args.steps, "number of grid points, endpoints included");
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", args.out, "output file (default: standard output)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavbell: conditional two-cavity entanglement simulator"};
    app.require_subcommand(1);

    // fidelity-sweep ---------------------------------------------------------
    auto* fid = app.add_subcommand("fidelity-sweep",
                                   "entangled-state fidelity against pulse area x = g0*tau");
    SweepArgs fid_args;
    add_sweep_args(fid, fid_args, 0.0, 1.0);
    fid->callback([&] {
        cavbell::SweepSpec spec{cavbell::SweepVariable::PulseAreaX, fid_args.from, fid_args.to,
                                fid_args.steps};
        log_config("fidelity-sweep", ordered_json{{"from", fid_args.from},
                                                  {"to", fid_args.to},
                                                  {"steps", fid_args.steps},
                                                  {"format", fid_args.format}});
        emit(fid_args.out, render_series(cavbell::sweep_fidelity(spec), fid_args.format));
    });

    // success-sweep ----------------------------------------------------------
    auto* suc = app.add_subcommand("success-sweep",
                                   "ground-detection probability against pulse area");
    SweepArgs suc_args;
    add_sweep_args(suc, suc_args, 0.0, 1.0);
    suc->callback([&] {
        cavbell::SweepSpec spec{cavbell::SweepVariable::PulseAreaX, suc_args.from, suc_args.to,
                                suc_args.steps};
        log_config("success-sweep", ordered_json{{"from", suc_args.from},
                                                 {"to", suc_args.to},
                                                 {"steps", suc_args.steps},
                                                 {"format", suc_args.format}});
        emit(suc_args.out, render_series(cavbell::sweep_success(spec), suc_args.format));
    });

    // epsilon-sweep ----------------------------------------------------------
    auto* eps = app.add_subcommand("epsilon-sweep",
                                   "fidelity against the interaction-time asymmetry epsilon");
    SweepArgs eps_args;
    double eps_x = 0.5;
    bool eps_log = false;
    add_sweep_args(eps, eps_args, -0.5, 0.5);
    eps->add_option("--x,--g0tau", eps_x, "pulse area g0*tau (dimensionless)")->required();
    eps->add_flag("--log-abscissa", eps_log,
                  "use ln(1-epsilon) as the abscissa; rows with epsilon >= 1 are dropped");
    eps->callback([&] {
        cavbell::SweepSpec spec{eps_log ? cavbell::SweepVariable::LogOneMinusEpsilon
                                        : cavbell::SweepVariable::Epsilon,
                                eps_args.from, eps_args.to, eps_args.steps};
        log_config("epsilon-sweep", ordered_json{{"x", eps_x},
                                                 {"from", eps_args.from},
                                                 {"to", eps_args.to},
                                                 {"steps", eps_args.steps},
                                                 {"log_abscissa", eps_log},
                                                 {"format", eps_args.format}});
        std::vector<std::string> warnings;
        const cavbell::Series series = cavbell::sweep_epsilon(spec, eps_x, &warnings);
        for (const std::string& w : warnings) std::cerr << "cavbell: warning: " << w << "\n";
        emit(eps_args.out, render_series(series, eps_args.format));
    });

    // window -----------------------------------------------------------------
    auto* win = app.add_subcommand("window",
                                   "pulse-area interval meeting fidelity and success floors");
    double win_f = 0.95, win_p = 0.5;
    std::string win_out, win_format = "json";
    win->add_option("--fidelity-floor", win_f, "minimum acceptable fidelity (dimensionless)")
        ->required();
    win->add_option("--prob-floor", win_p, "minimum acceptable success probability")->required();
    win->add_option("--format", win_format, "output format")->check(CLI::IsMember({"csv", "json"}));
    win->add_option("--out", win_out, "output file (default: standard output)");
    win->callback([&] {
        log_config("window", ordered_json{{"fidelity_floor", win_f}, {"prob_floor", win_p}});
        const cavbell::OperatingWindow w = cavbell::sweep_operating_window(win_f, win_p);
        if (win_format == "csv") {
            cavbell::Series s{{"fidelity_floor", "prob_floor", "empty", "x_min", "x_max"},
                              {{win_f, win_p, w.empty ? 1.0 : 0.0, w.x_min, w.x_max}}};
            emit(win_out, s.to_csv());
        } else {
            ordered_json j{{"fidelity_floor", win_f},
                           {"prob_floor", win_p},
                           {"empty", w.empty}};
            if (!w.empty) {
                j["x_min"] = w.x_min;
                j["x_max"] = w.x_max;
            }
            emit(win_out, j.dump(2) + "\n");
        }
    });

    // geometry ----------------------------------------------------------------
    auto* geo = app.add_subcommand("geometry",
                                   "effective interaction times and asymmetry for one path");
    struct GeoArgs {
        double w0 = 0, lambda = 0, L = 0, R = 0, y0 = 0, z0 = 0, phi = 0, theta = 0;
        double v = 0, d0 = 0, d1 = 0;
        std::string config, preset, out, format = "json";
        bool cos_offsets = false;
    };
    GeoArgs geo_args;
    geo->add_option("--config", geo_args.config, "flat key-value file; flags take precedence");
    geo->add_option("--preset", geo_args.preset, "fill unset values from a named preset")
        ->check(CLI::IsMember({"paris"}));
    auto* o_w0 = geo->add_option("--w0", geo_args.w0, "mode waist (m)");
    auto* o_la = geo->add_option("--lambda", geo_args.lambda, "wavelength (m)");
    auto* o_L = geo->add_option("--L", geo_args.L, "mirror separation (m)");
    auto* o_R = geo->add_option("--R", geo_args.R, "mirror radius of curvature (m)");
    auto* o_y0 = geo->add_option("--y0", geo_args.y0, "transverse offset at the collimator (m)");
    auto* o_z0 = geo->add_option("--z0", geo_args.z0, "axial-plane offset at the collimator (m)");
    auto* o_ph = geo->add_option("--phi", geo_args.phi, "angle in the x-y plane (rad)");
    auto* o_th = geo->add_option("--theta", geo_args.theta, "angle in the x-z plane (rad)");
    auto* o_v = geo->add_option("--v", geo_args.v, "atom speed (m/s)");
    auto* o_d0 = geo->add_option("--D0", geo_args.d0, "collimator exit to cavity-A center (m)");
    auto* o_d1 = geo->add_option("--D1", geo_args.d1, "cavity-A center to cavity-B center (m)");
    geo->add_flag("--cos-offsets", geo_args.cos_offsets,
                  "project offsets with cos(angle) instead of tan(angle) (comparison only)");
    geo->add_option("--format", geo_args.format, "output format")->check(CLI::IsMember({"json"}));
    geo->add_option("--out", geo_args.out, "output file (default: standard output)");
    geo->callback([&] {
        std::map<std::string, double> cfg;
        if (!geo_args.config.empty()) cfg = cavbell::load_config_file(geo_args.config, kGeometryKeys);

        std::optional<cavbell::ParisPreset> preset;
        if (geo_args.preset == "paris") preset = cavbell::preset_paris();

        cavbell::CavityMode mode;
        mode.lambda = resolve(o_la, geo_args.lambda, cfg, "lambda",
                              preset ? std::optional<double>(preset->lambda) : std::nullopt);
        if (o_L->count() > 0 || cfg.contains("L"))
            mode.mirror_separation = resolve(o_L, geo_args.L, cfg, "L");
        if (o_R->count() > 0 || cfg.contains("R"))
            mode.mirror_curvature = resolve(o_R, geo_args.R, cfg, "R");
        const bool w0_given = o_w0->count() > 0 || cfg.contains("w0") || preset.has_value();
        if (!w0_given && mode.mirror_separation && mode.mirror_curvature) {
            mode.w0 = cavbell::waist(*mode.mirror_separation, *mode.mirror_curvature, mode.lambda);
        } else {
            mode.w0 = resolve(o_w0, geo_args.w0, cfg, "w0",
                              preset ? std::optional<double>(preset->w0) : std::nullopt);
        }

        cavbell::PathParams path;
        path.y0 = resolve(o_y0, geo_args.y0, cfg, "y0", 0.0);
        path.z0 = resolve(o_z0, geo_args.z0, cfg, "z0", 0.0);
        path.phi = resolve(o_ph, geo_args.phi, cfg, "phi", 0.0);
        path.theta = resolve(o_th, geo_args.theta, cfg, "theta", 0.0);
        path.v = resolve(o_v, geo_args.v, cfg, "v",
                         preset ? std::optional<double>(preset->v) : std::nullopt);
        const bool d0_from_preset = preset && o_d0->count() == 0 && !cfg.contains("D0");
        const bool d1_from_preset = preset && o_d1->count() == 0 && !cfg.contains("D1");
        path.d0 = resolve(o_d0, geo_args.d0, cfg, "D0",
                          preset ? std::optional<double>(preset->d0) : std::nullopt);
        path.d1 = resolve(o_d1, geo_args.d1, cfg, "D1",
                          preset ? std::optional<double>(preset->d1) : std::nullopt);
        path.validate();
        mode.validate();

        const auto convention = geo_args.cos_offsets ? cavbell::OffsetConvention::CosineProjected
                                                     : cavbell::OffsetConvention::StraightLine;
        ordered_json resolved{{"w0", mode.w0},     {"lambda", mode.lambda}, {"y0", path.y0},
                              {"z0", path.z0},     {"phi", path.phi},       {"theta", path.theta},
                              {"v", path.v},       {"D0", path.d0},         {"D1", path.d1},
                              {"cos_offsets", geo_args.cos_offsets}};
        log_config("geometry", resolved);

        ordered_json j = resolved;
        j["d0_d1_assumed"] = d0_from_preset || d1_from_preset;
        j["central_tau"] = cavbell::effective_time_quadrature(
            cavbell::PathParams{0, 0, 0, 0, path.v, path.d0, path.d1}, mode, path.d0);
        j["tau_a_quadrature"] = cavbell::effective_time_quadrature(path, mode, path.d0);
        j["tau_b_quadrature"] =
            cavbell::effective_time_quadrature(path, mode, path.d0 + path.d1);
        j["tau_a_closed"] = cavbell::effective_time_closed(path, mode, path.d0, convention);
        j["tau_b_closed"] =
            cavbell::effective_time_closed(path, mode, path.d0 + path.d1, convention);
        const cavbell::EffectiveTimes times = cavbell::epsilon_exact(path, mode);
        j["epsilon_exact"] = times.epsilon;
        j["epsilon_second_order"] = cavbell::epsilon_second_order(path, mode);
        if (mode.mirror_separation) {
            j["waist_from_mirrors"] =
                cavbell::waist(*mode.mirror_separation, *mode.mirror_curvature, mode.lambda);
        }
        emit(geo_args.out, j.dump(2) + "\n");
    });

    // montecarlo ---------------------------------------------------------------
    auto* mc = app.add_subcommand("montecarlo", "seeded trial batches, optionally swept");
    struct McArgs {
        double x = 0.5, epsilon = 0.0, detector = 1.0;
        int trials = 10000, cutoff = 2, max_runs = 1000, steps = 11, threads = 1;
        std::uint64_t seed = 0;
        double run_time = 20e-6, damp_wait = 1e-3, lifetime = 1e-3, decay = 0.0;
        double from = 0.0, to = 1.0;
        std::string policy = "halt", var, config, out, format = "csv";
    };
    McArgs mc_args;
    auto* m_x = mc->add_option("--x,--g0tau", mc_args.x, "pulse area g0*tau (dimensionless)");
    auto* m_e = mc->add_option("--epsilon", mc_args.epsilon,
                               "interaction-time asymmetry (dimensionless)");
    auto* m_d = mc->add_option("--detector", mc_args.detector, "detector efficiency D in [0,1]");
    mc->add_option("--trials", mc_args.trials, "number of independent trials")->required();
    auto* m_seed = mc->add_option("--seed", mc_args.seed, "RNG seed (unsigned integer)");
    mc->add_option("--policy", mc_args.policy,
                   "detection-failure policy: halt (damp and reset) or continue (mixed state)")
        ->check(CLI::IsMember({"halt", "continue"}));
    auto* m_cut = mc->add_option("--cutoff", mc_args.cutoff, "Fock cutoff per cavity");
    auto* m_max = mc->add_option("--max-runs", mc_args.max_runs, "run budget per trial");
    auto* m_rt = mc->add_option("--run-time", mc_args.run_time, "model time per run (s)");
    auto* m_dw = mc->add_option("--damp-wait", mc_args.damp_wait, "halt duration per failure (s)");
    auto* m_lt = mc->add_option("--lifetime", mc_args.lifetime, "cavity photon lifetime (s)");
    auto* m_dc = mc->add_option("--decay-fraction", mc_args.decay,
                                "override the damping fraction 1-exp(-wait/lifetime)");
    mc->add_option("--threads", mc_args.threads, "worker threads (output is thread-count independent)");
    mc->add_option("--var", mc_args.var, "sweep variable")->check(CLI::IsMember({"x", "epsilon", "D"}));
    mc->add_option("--from", mc_args.from, "sweep start (requires --var)");
    mc->add_option("--to", mc_args.to, "sweep stop (requires --var)");
    mc->add_option("--steps", mc_args.steps, "sweep points (requires --var)");
    mc->add_option("--config", mc_args.config, "flat key-value file; flags take precedence");
    mc->add_option("--format", mc_args.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    mc->add_option("--out", mc_args.out, "output file (default: standard output)");
    mc->callback([&] {
        std::map<std::string, double> cfg;
        if (!mc_args.config.empty()) cfg = cavbell::load_config_file(mc_args.config, kProtocolKeys);
        cavbell::ProtocolParams params;
        params.x = resolve(m_x, mc_args.x, cfg, "x", 0.5);
        params.epsilon = resolve(m_e, mc_args.epsilon, cfg, "epsilon", 0.0);
        params.detector_eff = resolve(m_d, mc_args.detector, cfg, "detector_eff", 1.0);
        params.cutoff = static_cast<int>(resolve(m_cut, mc_args.cutoff, cfg, "cutoff", 2.0));
        params.max_runs = static_cast<int>(resolve(m_max, mc_args.max_runs, cfg, "max_runs", 1000.0));
        params.seed = static_cast<std::uint64_t>(
            resolve(m_seed, static_cast<double>(mc_args.seed), cfg, "seed", 0.0));
        params.failure_policy = mc_args.policy == "continue"
                                    ? cavbell::FailurePolicy::ContinueMixed
                                    : cavbell::FailurePolicy::HaltAndDamp;
        params.run_time_s = resolve(m_rt, mc_args.run_time, cfg, "run_time", 20e-6);
        params.damp_wait_s = resolve(m_dw, mc_args.damp_wait, cfg, "damp_wait", 1e-3);
        params.cavity_lifetime_s = resolve(m_lt, mc_args.lifetime, cfg, "lifetime", 1e-3);
        if (m_dc->count() > 0 || cfg.contains("decay_fraction"))
            params.decay_fraction = resolve(m_dc, mc_args.decay, cfg, "decay_fraction");
        params.validate();

        ordered_json resolved{{"x", params.x},
                              {"epsilon", params.epsilon},
                              {"detector_eff", params.detector_eff},
                              {"cutoff", params.cutoff},
                              {"max_runs", params.max_runs},
                              {"seed", params.seed},
                              {"policy", mc_args.policy},
                              {"run_time", params.run_time_s},
                              {"damp_wait", params.damp_wait_s},
                              {"lifetime", params.cavity_lifetime_s},
                              {"decay_fraction", params.decay()},
                              {"trials", mc_args.trials},
                              {"threads", mc_args.threads},
                              {"var", mc_args.var}};
        log_config("montecarlo", resolved);

        if (!mc_args.var.empty()) {
            cavbell::SweepVariable variable = cavbell::SweepVariable::PulseAreaX;
            if (mc_args.var == "epsilon") variable = cavbell::SweepVariable::Epsilon;
            if (mc_args.var == "D") variable = cavbell::SweepVariable::DetectorEff;
            cavbell::SweepSpec spec{variable, mc_args.from, mc_args.to, mc_args.steps};
            const cavbell::Series series = cavbell::sweep_montecarlo(
                spec, params, mc_args.trials, params.seed, mc_args.threads);
            emit(mc_args.out, render_series(series, mc_args.format));
            return;
        }

        const cavbell::MonteCarloSummary m =
            cavbell::run_trials(params, mc_args.trials, mc_args.threads);
        cavbell::Series s{{"x", "epsilon", "detector_eff", "trials", "success_rate",
                           "success_se", "mean_runs", "runs_se", "failure_free_fraction",
                           "failure_free_se", "mean_model_time", "mean_success_fidelity",
                           "exhausted_fraction"},
                          {{params.x, params.epsilon, params.detector_eff,
                            static_cast<double>(m.trials), m.success_rate, m.success_se,
                            m.mean_runs, m.runs_se, m.failure_free_fraction, m.failure_free_se,
                            m.mean_model_time, m.mean_success_fidelity, m.exhausted_fraction}}};
        emit(mc_args.out, render_series(s, mc_args.format));
    });

    // run -----------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "one seeded trial, reported as a JSON record");
    struct RunArgs {
        double x = 0.5, epsilon = 0.0, detector = 1.0;
        int cutoff = 2, max_runs = 1000;
        std::uint64_t seed = 0;
        double run_time = 20e-6, damp_wait = 1e-3, lifetime = 1e-3, decay = 0.0;
        std::string policy = "halt", config, out;
    };
    RunArgs run_args;
    auto* r_x = run->add_option("--x,--g0tau", run_args.x, "pulse area g0*tau (dimensionless)");
    auto* r_e = run->add_option("--epsilon", run_args.epsilon,
                                "interaction-time asymmetry (dimensionless)");
    auto* r_d = run->add_option("--detector", run_args.detector, "detector efficiency D in [0,1]");
    auto* r_seed = run->add_option("--seed", run_args.seed, "RNG seed (unsigned integer)");
    run->add_option("--policy", run_args.policy, "detection-failure policy: halt or continue")
        ->check(CLI::IsMember({"halt", "continue"}));
    auto* r_cut = run->add_option("--cutoff", run_args.cutoff, "Fock cutoff per cavity");
    auto* r_max = run->add_option("--max-runs", run_args.max_runs, "run budget");
    auto* r_rt = run->add_option("--run-time", run_args.run_time, "model time per run (s)");
    auto* r_dw = run->add_option("--damp-wait", run_args.damp_wait, "halt duration per failure (s)");
    auto* r_lt = run->add_option("--lifetime", run_args.lifetime, "cavity photon lifetime (s)");
    auto* r_dc = run->add_option("--decay-fraction", run_args.decay,
                                 "override the damping fraction 1-exp(-wait/lifetime)");
    run->add_option("--config", run_args.config, "flat key-value file; flags take precedence");
    run->add_option("--out", run_args.out, "output file (default: standard output)");
    run->callback([&] {
        std::map<std::string, double> cfg;
        if (!run_args.config.empty()) cfg = cavbell::load_config_file(run_args.config, kProtocolKeys);
        cavbell::ProtocolParams params;
        params.x = resolve(r_x, run_args.x, cfg, "x", 0.5);
        params.epsilon = resolve(r_e, run_args.epsilon, cfg, "epsilon", 0.0);
        params.detector_eff = resolve(r_d, run_args.detector, cfg, "detector_eff", 1.0);
        params.cutoff = static_cast<int>(resolve(r_cut, run_args.cutoff, cfg, "cutoff", 2.0));
        params.max_runs = static_cast<int>(resolve(r_max, run_args.max_runs, cfg, "max_runs", 1000.0));
        params.seed = static_cast<std::uint64_t>(
            resolve(r_seed, static_cast<double>(run_args.seed), cfg, "seed", 0.0));
        params.failure_policy = run_args.policy == "continue"
                                    ? cavbell::FailurePolicy::ContinueMixed
                                    : cavbell::FailurePolicy::HaltAndDamp;
        params.run_time_s = resolve(r_rt, run_args.run_time, cfg, "run_time", 20e-6);
        params.damp_wait_s = resolve(r_dw, run_args.damp_wait, cfg, "damp_wait", 1e-3);
        params.cavity_lifetime_s = resolve(r_lt, run_args.lifetime, cfg, "lifetime", 1e-3);
        if (r_dc->count() > 0 || cfg.contains("decay_fraction"))
            params.decay_fraction = resolve(r_dc, run_args.decay, cfg, "decay_fraction");
        params.validate();

        log_config("run", ordered_json{{"x", params.x},
                                       {"epsilon", params.epsilon},
                                       {"detector_eff", params.detector_eff},
                                       {"cutoff", params.cutoff},
                                       {"max_runs", params.max_runs},
                                       {"seed", params.seed},
                                       {"policy", run_args.policy},
                                       {"run_time", params.run_time_s},
                                       {"damp_wait", params.damp_wait_s},
                                       {"lifetime", params.cavity_lifetime_s},
                                       {"decay_fraction", params.decay()}});
        cavbell::Rng rng = cavbell::Rng::stream(params.seed, 0);
        const cavbell::TrialRecord rec = cavbell::run_until_success(params, rng);
        emit(run_args.out, cavbell::trial_to_json(rec).dump(2) + "\n");
    });

    // preset ----------------------------------------------------------------------
    auto* pre = app.add_subcommand("preset", "named experiment constants and derived figures");
    std::string pre_name;
    double pre_scale = 1.0;
    std::string pre_out;
    pre->add_option("name", pre_name, "preset name")->required()->check(CLI::IsMember({"paris"}));
    pre->add_option("--cavity-scale", pre_scale,
                    "mirror-separation multiplier; rescales g0 by scale^(-3/2) and w0 by scale^(1/2)");
    pre->add_option("--out", pre_out, "output file (default: standard output)");
    pre->callback([&] {
        log_config("preset", ordered_json{{"name", pre_name}, {"cavity_scale", pre_scale}});
        const cavbell::ParisPreset p = cavbell::preset_paris(pre_scale);
        ordered_json j{{"name", "paris"},
                       {"g0", p.g0},
                       {"v", p.v},
                       {"w0", p.w0},
                       {"lambda", p.lambda},
                       {"detector_eff", p.detector_eff},
                       {"cavity_lifetime", p.cavity_lifetime},
                       {"beam_radius", p.beam_radius},
                       {"D0", p.d0},
                       {"D1", p.d1},
                       {"d0_d1_assumed", true},
                       {"cavity_scale", p.cavity_scale}};
        j["derived"] = ordered_json{{"g0_scaled", p.scaled_g0()},
                                    {"w0_scaled", p.scaled_w0()},
                                    {"central_tau", p.central_tau()},
                                    {"central_pulse_area", p.central_pulse_area()},
                                    {"angular_radius", p.angular_radius()},
                                    {"lifetime_over_transit", p.cavity_lifetime / p.central_tau()}};
        emit(pre_out, j.dump(2) + "\n");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const cavbell::IoError& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 1;
    } catch (const cavbell::ConfigError& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const cavbell::CutoffError& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const cavbell::QuadratureError& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const cavbell::ZeroProbabilityError& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "cavbell: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
