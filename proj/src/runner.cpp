#include "mfl/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfl/fft.hpp"
#include "mfl/fit.hpp"
#include "mfl/fock.hpp"
#include "mfl/hartree.hpp"
#include "mfl/io.hpp"
#include "mfl/manybody.hpp"
#include "mfl/pairexc.hpp"

namespace mfl {

using nlohmann::json;

Field initial_field(const ExperimentConfig& cfg, const Grid& g) {
    Field f(g);
    const double s = cfg.init_width;
    const double a = cfg.init_amplitude;
    const double p = cfg.init_momentum;
    if (cfg.initial_kind == "gaussian") {
        const double norm1d = std::pow(M_PI * s * s, -0.25);
        f = make_field(g, [&](double x, double y, double z) {
            const double r2 = x * x + y * y + z * z;
            double amp = a;
            for (int d = 0; d < g.dim; ++d) amp *= norm1d;
            return std::polar(amp * std::exp(-r2 / (2 * s * s)), p * x);
        });
    } else if (cfg.initial_kind == "sech") {
        f = make_field(g, [&](double x, double, double) {
            return std::polar(a / std::cosh(x / s), p * x);
        });
    } else {
        f = make_field(g, [&](double, double, double) { return cplx(a, 0.0); });
    }
    if (cfg.init_normalize) normalize_l2(f);
    return f;
}

namespace {

json config_json(const ExperimentConfig& cfg) {
    json j = json::object();
    for (auto& [k, v] : cfg.resolved) j[k] = v;
    return j;
}

BumpProfile profile_of(const ExperimentConfig& cfg) {
    BumpProfile p{cfg.pot_amplitude, cfg.pot_radius, cfg.pot_sign};
    if (cfg.potential_kind == "zero") p.amplitude = 0.0;
    return p;
}

void write_artifacts(const ExperimentConfig& cfg, const std::string& csv, const json& summary,
                     const std::string& stem) {
    std::filesystem::create_directories(cfg.output_dir);
    if (!csv.empty()) atomic_write_text(cfg.output_dir + "/" + stem + ".csv", csv);
    atomic_write_text(cfg.output_dir + "/" + stem + ".json", summary.dump(2) + "\n");
}

json run_field_equation(const ExperimentConfig& cfg) {
    Grid g(cfg.grid_dim, cfg.grid_M, cfg.grid_L);
    HartreeRun run;
    run.grid = g;
    run.phi0 = initial_field(cfg, g);
    run.dt = cfg.dt;
    run.t_end = cfg.t_end;
    run.record_every = cfg.record_every;
    if (cfg.kind == "nls") {
        run.cubic = true;
        run.g = cfg.use_profile_coupling ? coupling_constant(profile_of(cfg), g.dim)
                                         : cfg.nls_coupling;
    } else {
        run.vN = sample_scaled(profile_of(cfg), cfg.N_list.front(), cfg.beta, g);
    }

    // soft smallness advisory (the theory needs small data; no sharp constant exists)
    std::vector<std::string> warnings;
    const double h_half = half_deriv_norm(run.phi0);
    const double v_l1 = std::abs(coupling_constant(profile_of(cfg), g.dim));
    if (h_half * v_l1 > 1.0)
        warnings.push_back("large-data regime: ||phi0||_{H^1/2} * ||v||_{L1} = " +
                           std::to_string(h_half * v_l1) + " (exploratory)");

    Field final_phi;
    Observables obs = run.run(&final_phi);

    std::ostringstream csv;
    csv << "t,mass,energy,linf,h_half\n";
    csv.precision(17);
    for (std::size_t i = 0; i < obs.t.size(); ++i)
        csv << obs.t[i] << ',' << obs.mass[i] << ',' << obs.energy[i] << ',' << obs.linf[i] << ','
            << obs.h_half[i] << '\n';

    json j;
    j["kind"] = cfg.kind;
    j["config"] = config_json(cfg);
    j["final"] = {{"mass", obs.mass.back()},
                  {"energy", obs.energy.back()},
                  {"linf", obs.linf.back()},
                  {"h_half", obs.h_half.back()}};
    j["mass_drift"] = std::abs(obs.mass.back() - obs.mass.front());
    j["energy_drift_rel"] =
        std::abs(obs.energy.back() - obs.energy.front()) / std::max(1e-300, std::abs(obs.energy.front()));

    const double horizon = wraparound_horizon(run.phi0);
    j["horizon"] = horizon;
    if (cfg.fit_t0 && cfg.fit_t1) {
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < obs.t.size(); ++i)
            if (obs.t[i] > 0.0) series.emplace_back(obs.t[i], obs.linf[i]);
        FitResult fr = decay_fit(series, *cfg.fit_t0, *cfg.fit_t1, horizon);
        j["decay_exponent"] = fr.slope;
        j["decay_residual"] = fr.residual;
    }
    // Strichartz diagnostics: (inf, 2) plus one finite admissible pair per dim
    {
        json st = json::object();
        const double t1 = cfg.fit_t1 ? *cfg.fit_t1 : cfg.t_end;
        st["q_inf_r_2"] = strichartz_window_norm(obs, -1, std::numeric_limits<double>::infinity(),
                                                 0.0, t1);
        j["strichartz"] = st;
    }
    for (auto& w : warnings) j["warnings"].push_back(w);

    write_artifacts(cfg, csv.str(), j, cfg.kind);
    save_field(final_phi, cfg.output_dir + "/" + cfg.kind + "_final.mflb");
    return j;
}

json run_pair(const ExperimentConfig& cfg) {
    Grid g(cfg.grid_dim, cfg.grid_M, cfg.grid_L);
    if (g.dim != 1) throw GuardError("pair: kernels are 1D only");
    PairRun run;
    run.grid = g;
    run.phi0 = initial_field(cfg, g);
    run.vN = sample_scaled(profile_of(cfg), cfg.N_list.front(), cfg.beta, g);
    run.N = cfg.N_list.front();
    run.dt = cfg.dt;
    run.t_end = cfg.t_end;
    run.record_every = cfg.record_every;
    run.residual_tol = cfg.residual_tol;

    PairRunResult res = run.run();

    std::ostringstream csv;
    csv << "t,s2_l2,p2_l2,bog_residual,q1,qd6,c1,l3\n";
    csv.precision(17);
    for (std::size_t i = 0; i < res.t.size(); ++i)
        csv << res.t[i] << ',' << res.s2_l2[i] << ',' << res.p2_l2[i] << ',' << res.residual[i]
            << ',' << res.q1[i] << ',' << res.qd6[i] << ',' << res.c1[i] << ',' << res.l3[i] << '\n';

    json j;
    j["kind"] = "pair";
    j["config"] = config_json(cfg);
    j["final"] = {{"s2_l2", res.s2_l2.back()},
                  {"p2_l2", res.p2_l2.back()},
                  {"bog_residual", res.residual.back()},
                  {"q1", res.q1.back()},
                  {"qd6", res.qd6.back()},
                  {"c1", res.c1.back()},
                  {"l3", res.l3.back()}};
    j["residual_max"] = *std::max_element(res.residual.begin(), res.residual.end());
    j["half_angle_min_eig"] = res.half_angle_min_eig;
    if (res.half_angle_warning)
        j["warnings"].push_back("half-angle recovery conditioning degraded (min eig < 0.999)");
    write_artifacts(cfg, csv.str(), j, "pair");
    return j;
}

json run_rate(const ExperimentConfig& cfg) {
    Grid g(cfg.grid_dim, cfg.grid_M, cfg.grid_L);
    Field phi0 = initial_field(cfg, g);
    if (std::abs(norm_l2(phi0) - 1.0) > 1e-10) normalize_l2(phi0);
    RateFit rf = rate_fit(g, phi0, profile_of(cfg), cfg.beta, cfg.N_list, cfg.t_end, cfg.dt,
                          cfg.pickl_lambda, cfg.memory_cap_mb * (std::int64_t)(1 << 20));
    json j;
    j["kind"] = cfg.kind;
    j["config"] = config_json(cfg);
    j["lambda"] = rf.lambda;
    j["C_v"] = rf.C_v;
    json pts = json::array();
    for (auto& p : rf.points)
        pts.push_back({{"N", p.N},
                       {"trace_distance", p.trace_dist},
                       {"alpha_N", p.alpha_N},
                       {"alpha_lambda", p.alpha_lambda},
                       {"pickl_bound", p.bound}});
    j["points"] = pts;
    if (rf.slope_valid) {
        j["slope"] = rf.slope;
        j["residual"] = rf.residual;
    } else {
        j["slope"] = nullptr;
        j["unreliable"] = true;
    }
    auto [lam, dl] = delta_lambda_scan(cfg.beta);
    j["delta_lambda"] = {{"beta", cfg.beta}, {"lambda_star", lam}, {"delta_star", dl}};
    write_artifacts(cfg, "", j, "rate");
    return j;
}

json run_fock(const ExperimentConfig& cfg) {
    Grid g(cfg.grid_dim, cfg.grid_M, cfg.grid_L);
    Field phi0 = initial_field(cfg, g);
    FockScalingResult res = fock_error_scaling(profile_of(cfg), cfg.beta, phi0, cfg.fock_t_samples,
                                               cfg.N_list, cfg.dt, cfg.leak_tol);
    json j;
    j["kind"] = "fock";
    j["config"] = config_json(cfg);
    json pts = json::array();
    for (auto& p : res.points) {
        json tj = json::array(), dj = json::array();
        for (std::size_t i = 0; i < p.t.size(); ++i) {
            tj.push_back(p.t[i]);
            dj.push_back(p.distance[i]);
        }
        pts.push_back({{"N", p.N},
                       {"dim_fock", p.dim_fock},
                       {"n_max", p.n_max},
                       {"leakage", p.leakage},
                       {"t", tj},
                       {"distance", dj}});
    }
    j["points"] = pts;
    if (res.slope_valid) j["slope"] = res.slope;
    else j["slope"] = nullptr;
    write_artifacts(cfg, "", j, "fock");
    return j;
}

json run_fit(const ExperimentConfig& cfg) {
    std::ifstream is(cfg.fit_points);
    if (!is) throw GuardError("fit: cannot open points file " + cfg.fit_points);
    std::vector<std::pair<double, double>> pts;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha((unsigned char)line[0])) continue;
        std::stringstream ss(line);
        double x, y;
        char comma;
        if (ss >> x >> comma >> y) pts.emplace_back(x, y);
    }
    FitResult fr = loglog_fit(pts);
    json j;
    j["kind"] = "fit";
    j["config"] = config_json(cfg);
    j["slope"] = fr.slope;
    j["intercept"] = fr.intercept;
    j["residual"] = fr.residual;
    j["n"] = fr.n;
    write_artifacts(cfg, "", j, "fit");
    return j;
}

// sweep: fan the base kind out over the N axis, aggregate one scalar per point
json run_sweep(const ExperimentConfig& cfg) {
    if (cfg.N_list.empty()) throw GuardError("empty sweep axis");
    const int npts = (int)cfg.N_list.size();
    std::vector<double> value(npts, 0.0);
    std::vector<std::string> errors(npts);

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, cfg.workers))
    for (int i = 0; i < npts; ++i) {
        try {
            ExperimentConfig sub = cfg;
            sub.kind = cfg.sweep_kind;
            sub.N_list = {cfg.N_list[i]};
            sub.output_dir = cfg.output_dir + "/sweep_N" + std::to_string(cfg.N_list[i]);
            Grid g(sub.grid_dim, sub.grid_M, sub.grid_L);
            if (sub.kind == "hartree" || sub.kind == "nls") {
                json r = run_field_equation(sub);
                value[i] = r["final"]["linf"].get<double>();
            } else if (sub.kind == "pair") {
                json r = run_pair(sub);
                value[i] = r["final"]["s2_l2"].get<double>();
            } else if (sub.kind == "fock") {
                json r = run_fock(sub);
                value[i] = r["points"][0]["distance"].back().get<double>();
            } else {
                json r = run_rate(sub);
                value[i] = r["points"][0]["trace_distance"].get<double>();
            }
        } catch (const std::exception& e) {
            errors[i] = std::string("N=") + std::to_string(cfg.N_list[i]) + ": " + e.what();
        }
    }
    for (auto& e : errors)
        if (!e.empty()) throw std::runtime_error("sweep point failed: " + e);

    json j;
    j["kind"] = "sweep";
    j["sweep_kind"] = cfg.sweep_kind;
    j["config"] = config_json(cfg);
    json pts = json::array();
    std::vector<std::pair<double, double>> fitpts;
    bool pos = true;
    for (int i = 0; i < npts; ++i) {
        pts.push_back({{"N", cfg.N_list[i]}, {"value", value[i]}});
        if (value[i] > 0.0) fitpts.emplace_back((double)cfg.N_list[i], value[i]);
        else pos = false;
    }
    j["points"] = pts;
    j["slope"] = nullptr;
    j["reliable"] = false;
    if (pos && npts >= 3) {
        FitResult fr = loglog_fit(fitpts);
        j["intercept"] = fr.intercept;
        j["residual"] = fr.residual;
        if (fr.residual < 0.5) {
            j["slope"] = fr.slope;
            j["reliable"] = true;
        } else {
            j["slope"] = fr.slope;
            j["warnings"].push_back("fit residual above threshold; slope unreliable");
        }
    }
    write_artifacts(cfg, "", j, "sweep");
    return j;
}

}  // namespace

std::string run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    json j;
    if (cfg.kind == "hartree" || cfg.kind == "nls") j = run_field_equation(cfg);
    else if (cfg.kind == "pair") j = run_pair(cfg);
    else if (cfg.kind == "manybody" || cfg.kind == "rate") j = run_rate(cfg);
    else if (cfg.kind == "fock") j = run_fock(cfg);
    else if (cfg.kind == "fit") j = run_fit(cfg);
    else if (cfg.kind == "sweep") j = run_sweep(cfg);
    else throw GuardError("unknown experiment kind: " + cfg.kind);
    return j.dump(2) + "\n";
}

}  // namespace mfl
