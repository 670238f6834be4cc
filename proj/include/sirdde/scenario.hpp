// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sirdde/core.hpp"
#include "sirdde/csv.hpp"
#include "sirdde/diagnostics.hpp"
#include "sirdde/integrator.hpp"
#include "sirdde/models.hpp"
#include "sirdde/pde1d.hpp"
#include "sirdde/stability.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sirdde {

enum class ModelKind { delay_sird_ode, seird_ode, delay_sird_pde1d, linearized_dde };

inline std::string to_string(ModelKind m)
{
    switch (m) {
    case ModelKind::delay_sird_ode: return "delay_sird_ode";
    case ModelKind::seird_ode: return "seird_ode";
    case ModelKind::delay_sird_pde1d: return "delay_sird_pde1d";
    case ModelKind::linearized_dde: return "linearized_dde";
    }
    return "?";
}

inline ModelKind model_kind_from_string(const std::string& s)
{
    if (s == "delay_sird_ode") return ModelKind::delay_sird_ode;
    if (s == "seird_ode") return ModelKind::seird_ode;
    if (s == "delay_sird_pde1d") return ModelKind::delay_sird_pde1d;
    if (s == "linearized_dde") return ModelKind::linearized_dde;
    throw config_error("unknown model '" + s + "'");
}

/// One schedule event: at `time`, multiply fields by `scale` and/or replace
/// them by `set`, relative to the parameter set previously in force.
struct ScheduleEntry {
    double time = 0.0;
    std::map<std::string, double> scale;
    std::map<std::string, double> set;

    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct InitialSpec {
    // ODE-family models
    double n0 = 1000.0;
    double i0 = 1.0;
    double e0 = 0.0; // SEIRD baseline
    // PDE: "bumps" uses the built-in density profiles; "homogeneous"
    // uses the constant values below.
    std::string pde_kind = "bumps";
    double hom_s0 = 0.0;
    double hom_i0 = 0.0;
    double hom_r0 = 0.0;
    double hom_d0 = 0.0;

    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct Scenario {
    std::string label;
    ModelKind model = ModelKind::delay_sird_ode;
    ModelParams params; // as printed in the config file (unnormalized)
    bool normalize_beta_by_n0 = false;
    InitialSpec initial;
    TimeGrid grid;
    std::vector<ScheduleEntry> schedule_entries;
    int n_cells = 2000; // PDE only
    std::vector<double> snapshot_times;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

/// Numbers may be given as JSON numbers or as fraction strings ("9/40"),
/// matching the way parameter tables are usually printed.
inline double parse_number(const nlohmann::json& v, const std::string& where)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        try {
            std::size_t pos = 0;
            const double num = std::stod(s, &pos);
            if (pos == s.size())
                return num;
            if (s[pos] == '/') {
                std::size_t pos2 = 0;
                const double den = std::stod(s.substr(pos + 1), &pos2);
                if (pos + 1 + pos2 == s.size() && den != 0.0)
                    return num / den;
            }
        }
        catch (const std::exception&) {
        }
    }
    throw config_error(where + ": expected a number or fraction string, got " + v.dump());
}

inline double get_number(const nlohmann::json& obj, const std::string& key, const std::string& where,
                         std::optional<double> fallback = std::nullopt)
{
    if (!obj.contains(key)) {
        if (fallback)
            return *fallback;
        throw config_error(where + ": missing field '" + key + "'");
    }
    return parse_number(obj.at(key), where + "." + key);
}

inline double* param_field(ModelParams& p, const std::string& name)
{
    if (name == "alpha") return &p.alpha;
    if (name == "mu") return &p.mu;
    if (name == "beta_e") return &p.beta_e;
    if (name == "beta_i") return &p.beta_i;
    if (name == "phi_r") return &p.phi_r;
    if (name == "phi_d") return &p.phi_d;
    if (name == "phi_e") return &p.phi_e;
    if (name == "sigma_rate") return &p.sigma_rate;
    if (name == "allee_A") return &p.allee_A;
    if (name == "nu_s") return &p.nu_s;
    if (name == "nu_e") return &p.nu_e;
    if (name == "nu_i") return &p.nu_i;
    if (name == "nu_r") return &p.nu_r;
    return nullptr; // sigma_delay deliberately not schedulable
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j)
{
    using detail::get_number;
    Scenario s;
    if (!j.contains("label") || !j.at("label").is_string())
        throw config_error("config: missing string field 'label'");
    s.label = j.at("label").get<std::string>();
    if (!j.contains("model"))
        throw config_error("config: missing field 'model'");
    s.model = model_kind_from_string(j.at("model").get<std::string>());

    if (!j.contains("params") || !j.at("params").is_object())
        throw config_error("config: missing object 'params'");
    const auto& jp = j.at("params");
    for (auto it = jp.begin(); it != jp.end(); ++it) {
        if (it.key() == "sigma_delay") {
            s.params.sigma_delay = detail::parse_number(it.value(), "params.sigma_delay");
            continue;
        }
        double* f = detail::param_field(s.params, it.key());
        if (!f)
            throw config_error("params: unknown field '" + it.key() + "'");
        *f = detail::parse_number(it.value(), "params." + it.key());
    }

    const bool needs_delay = s.model != ModelKind::seird_ode;
    validate_params(s.params, needs_delay);

    s.normalize_beta_by_n0 = j.value("normalize_beta_by_n0", false);

    if (j.contains("initial")) {
        const auto& ji = j.at("initial");
        s.initial.n0 = get_number(ji, "n0", "initial", 1000.0);
        s.initial.i0 = get_number(ji, "i0", "initial", 1.0);
        s.initial.e0 = get_number(ji, "e0", "initial", 0.0);
        s.initial.pde_kind = ji.value("pde_kind", std::string("bumps"));
        if (s.initial.pde_kind != "bumps" && s.initial.pde_kind != "homogeneous")
            throw config_error("initial.pde_kind: must be 'bumps' or 'homogeneous'");
        s.initial.hom_s0 = get_number(ji, "s0", "initial", 0.0);
        s.initial.hom_i0 = get_number(ji, "i0_field", "initial", 0.0);
        s.initial.hom_r0 = get_number(ji, "r0_field", "initial", 0.0);
        s.initial.hom_d0 = get_number(ji, "d0_field", "initial", 0.0);
    }

    if (!j.contains("grid") || !j.at("grid").is_object())
        throw config_error("config: missing object 'grid'");
    const auto& jg = j.at("grid");
    s.grid = TimeGrid::from_step(get_number(jg, "t0", "grid", 0.0), get_number(jg, "t_end", "grid"),
                                 get_number(jg, "dt", "grid"));
    if (needs_delay)
        delay_steps(s.params.sigma_delay, s.grid.dt); // validates divisibility

    if (j.contains("schedule")) {
        double prev = s.grid.t0;
        for (const auto& je : j.at("schedule")) {
            ScheduleEntry e;
            e.time = get_number(je, "time", "schedule");
            if (!(e.time > prev))
                throw config_error("schedule: breakpoint times must be strictly increasing and > t0");
            prev = e.time;
            for (const char* kind : {"scale", "set"}) {
                if (!je.contains(kind))
                    continue;
                auto& dst = std::string(kind) == "scale" ? e.scale : e.set;
                for (auto it = je.at(kind).begin(); it != je.at(kind).end(); ++it) {
                    ModelParams probe;
                    if (!detail::param_field(probe, it.key()))
                        throw config_error(std::string("schedule.") + kind + ": unknown field '" +
                                           it.key() + "'");
                    dst[it.key()] =
                        detail::parse_number(it.value(), std::string("schedule.") + kind);
                }
            }
            s.schedule_entries.push_back(std::move(e));
        }
    }

    if (j.contains("space")) {
        s.n_cells = static_cast<int>(get_number(j.at("space"), "n_cells", "space", 2000.0));
        if (s.n_cells < 2)
            throw config_error("space.n_cells must be >= 2");
    }
    if (j.contains("output") && j.at("output").contains("snapshot_times")) {
        for (const auto& v : j.at("output").at("snapshot_times"))
            s.snapshot_times.push_back(detail::parse_number(v, "output.snapshot_times"));
    }
    return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s)
{
    nlohmann::json j;
    j["label"] = s.label;
    j["model"] = to_string(s.model);
    nlohmann::json jp;
    const ModelParams& p = s.params;
    jp["alpha"] = p.alpha;
    jp["mu"] = p.mu;
    jp["beta_e"] = p.beta_e;
    jp["beta_i"] = p.beta_i;
    jp["phi_r"] = p.phi_r;
    jp["phi_d"] = p.phi_d;
    jp["phi_e"] = p.phi_e;
    jp["sigma_rate"] = p.sigma_rate;
    jp["sigma_delay"] = p.sigma_delay;
    jp["allee_A"] = p.allee_A;
    jp["nu_s"] = p.nu_s;
    jp["nu_e"] = p.nu_e;
    jp["nu_i"] = p.nu_i;
    jp["nu_r"] = p.nu_r;
    j["params"] = jp;
    j["normalize_beta_by_n0"] = s.normalize_beta_by_n0;
    j["initial"] = {{"n0", s.initial.n0},
                    {"i0", s.initial.i0},
                    {"e0", s.initial.e0},
                    {"pde_kind", s.initial.pde_kind},
                    {"s0", s.initial.hom_s0},
                    {"i0_field", s.initial.hom_i0},
                    {"r0_field", s.initial.hom_r0},
                    {"d0_field", s.initial.hom_d0}};
    j["grid"] = {{"t0", s.grid.t0}, {"t_end", s.grid.t_end}, {"dt", s.grid.dt}};
    j["schedule"] = nlohmann::json::array();
    for (const auto& e : s.schedule_entries) {
        nlohmann::json je;
        je["time"] = e.time;
        if (!e.scale.empty())
            je["scale"] = e.scale;
        if (!e.set.empty())
            je["set"] = e.set;
        j["schedule"].push_back(je);
    }
    j["space"] = {{"n_cells", s.n_cells}};
    j["output"] = {{"snapshot_times", s.snapshot_times}};
    return j;
}

inline Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    }
    catch (const nlohmann::json::exception& e) {
        throw config_error("parse error in '" + path.string() + "': " + e.what());
    }
    try {
        return scenario_from_json(j);
    }
    catch (const config_error& e) {
        throw config_error(path.string() + ": " + e.what());
    }
}

inline void save_scenario(const Scenario& s, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << scenario_to_json(s).dump(2) << '\n';
}

/// Expands the scenario's base parameters plus schedule entries into absolute
/// breakpoints. Contact-rate normalization by n0, when requested, is applied
/// here so that config files can carry the printed table values.
inline ParamSchedule build_schedule(const Scenario& s)
{
    ModelParams base = s.params;
    if (s.normalize_beta_by_n0)
        base = normalize_ode_params(base, s.initial.n0);
    ParamSchedule sched = ParamSchedule::constant(s.grid.t0, base);
    ModelParams current = base;
    for (const auto& e : s.schedule_entries) {
        for (const auto& [name, value] : e.set)
            *detail::param_field(current, name) = value;
        for (const auto& [name, factor] : e.scale)
            *detail::param_field(current, name) *= factor;
        sched.add_breakpoint(e.time, current);
    }
    return sched;
}

struct CompartmentPeak {
    double value = 0.0;
    double time = 0.0;

    friend bool operator==(const CompartmentPeak&, const CompartmentPeak&) = default;
};

struct RunArtifacts {
    std::filesystem::path dir; // empty when no files were requested
    std::vector<double> times;
    std::vector<std::string> compartments; // column order of `series`
    std::map<std::string, std::vector<double>> series;
    StabilityVerdict verdict;
    std::map<std::string, CompartmentPeak> peaks;
    std::map<std::string, double> finals;
    std::optional<double> first_negative_time;
    std::string first_negative_compartment;
};

namespace detail {

inline void finish_artifacts(RunArtifacts& art)
{
    for (const auto& name : art.compartments) {
        const auto& v = art.series.at(name);
        const auto pk = global_peak(v);
        art.peaks[name] = {pk.value, art.times[pk.index]};
        art.finals[name] = v.back();
        if (const auto neg = first_negative_index(v)) {
            const double t = art.times[*neg];
            if (!art.first_negative_time || t < *art.first_negative_time) {
                art.first_negative_time = t;
                art.first_negative_compartment = name;
            }
        }
    }
}

inline void write_totals_csv(const RunArtifacts& art, const std::filesystem::path& path)
{
    CsvWriter csv(path);
    {
        std::string hdr = "t";
        for (const auto& name : art.compartments)
            hdr += "," + name;
        csv.header({hdr.c_str()});
    }
    std::vector<double> row(art.compartments.size() + 1);
    for (std::size_t k = 0; k < art.times.size(); ++k) {
        row[0] = art.times[k];
        for (std::size_t c = 0; c < art.compartments.size(); ++c)
            row[c + 1] = art.series.at(art.compartments[c])[k];
        csv.row(row);
    }
    csv.close();
}

inline void write_summary(const Scenario& s, const RunArtifacts& art,
                          const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "label: " << s.label << '\n';
    out << "model: " << to_string(s.model) << '\n';
    const char* verdict = art.verdict.marginal() ? "MARGINAL"
                          : art.verdict.stable  ? "STABLE"
                          : art.verdict.conclusive ? "UNSTABLE" : "INCONCLUSIVE";
    out << "stability: " << verdict << " (margin " << format_full(art.verdict.margin)
        << (art.verdict.oscillatory ? ", oscillatory" : "") << ")\n";
    for (const auto& name : art.compartments) {
        const auto& pk = art.peaks.at(name);
        out << "peak_" << name << ": " << format_full(pk.value) << " at t=" << format_full(pk.time)
            << '\n';
    }
    for (const auto& name : art.compartments)
        out << "final_" << name << ": " << format_full(art.finals.at(name)) << '\n';
    if (art.first_negative_time)
        out << "first_negative: " << art.first_negative_compartment
            << " at t=" << format_full(*art.first_negative_time) << '\n';
    else
        out << "first_negative: none\n";
    if (out.fail() || (out.close(), out.fail()))
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace detail

/// Runs a scenario and, when out_root is nonempty, writes
/// <out_root>/<label>/totals.csv, summary.txt and snapshots/*.csv.
/// Outputs are deterministic: identical configs give bit-identical files.
inline RunArtifacts run_scenario(const Scenario& s, const std::filesystem::path& out_root = {})
{
    RunArtifacts art;
    const ParamSchedule sched = build_schedule(s);
    const ModelParams& p0 = sched.breakpoints.front().second;

    switch (s.model) {
    case ModelKind::delay_sird_ode:
    case ModelKind::linearized_dde: {
        art.verdict = theorem31_check(s.params);
        const bool lin = s.model == ModelKind::linearized_dde;
        State u0;
        if (lin)
            u0 = linearized_layout::pack({s.initial.n0, s.initial.i0, 0.0, 0.0});
        else
            u0 = sird_layout::pack({s.initial.n0 - s.initial.i0, s.initial.i0, 0.0, 0.0});
        art.compartments = lin ? std::vector<std::string>{"N", "I", "R", "D"}
                               : std::vector<std::string>{"S", "I", "R", "D", "N"};
        for (const auto& name : art.compartments)
            art.series[name] = {};
        auto record = [&](double t, const State& u) {
            art.times.push_back(t);
            if (lin) {
                art.series["N"].push_back(u[0]);
                art.series["I"].push_back(u[1]);
                art.series["R"].push_back(u[2]);
                art.series["D"].push_back(u[3]);
            }
            else {
                art.series["S"].push_back(u[0]);
                art.series["I"].push_back(u[1]);
                art.series["R"].push_back(u[2]);
                art.series["D"].push_back(u[3]);
                art.series["N"].push_back(u[0] + u[1] + u[2]);
            }
        };
        if (lin) {
            LinearizedDelayRhs rhs{sched};
            integrate_observe(rhs, constant_history(u0), s.grid, s.params.sigma_delay, record);
        }
        else {
            DelaySirdRhs rhs{sched};
            integrate_observe(rhs, constant_history(u0), s.grid, s.params.sigma_delay, record);
        }
        break;
    }
    case ModelKind::seird_ode: {
        art.verdict = contractivity_check(p0);
        const State u0 = seird_layout::pack(
            {s.initial.n0 - s.initial.i0 - s.initial.e0, s.initial.e0, s.initial.i0, 0.0, 0.0});
        art.compartments = {"S", "E", "I", "R", "D", "N"};
        for (const auto& name : art.compartments)
            art.series[name] = {};
        SeirdRhs rhs{sched};
        integrate_observe(rhs, constant_history(u0), s.grid, 0.0, [&](double t, const State& u) {
            art.times.push_back(t);
            art.series["S"].push_back(u[0]);
            art.series["E"].push_back(u[1]);
            art.series["I"].push_back(u[2]);
            art.series["R"].push_back(u[3]);
            art.series["D"].push_back(u[4]);
            art.series["N"].push_back(u[0] + u[1] + u[2] + u[3]);
        });
        break;
    }
    case ModelKind::delay_sird_pde1d: {
        art.verdict = theorem31_check(s.params);
        DelaySirdPde pde(sched, static_cast<std::size_t>(s.n_cells));
        State u0;
        if (s.initial.pde_kind == "homogeneous") {
            PdeState st{Field1D::zeros(s.n_cells), Field1D::zeros(s.n_cells),
                        Field1D::zeros(s.n_cells), Field1D::zeros(s.n_cells)};
            for (std::size_t j = 0; j < st.s.n_nodes(); ++j) {
                st.s.values[j] = s.initial.hom_s0;
                st.i.values[j] = s.initial.hom_i0;
                st.r.values[j] = s.initial.hom_r0;
                st.d.values[j] = s.initial.hom_d0;
            }
            u0 = pde.pack(st);
        }
        else {
            u0 = pde.pack(initial_conditions(static_cast<std::size_t>(s.n_cells)));
        }
        const PdeRunResult res =
            run_pde(pde, u0, s.grid, s.params.sigma_delay, s.snapshot_times);
        art.times = res.totals.times;
        art.compartments = {"S", "I", "R", "D", "N"};
        art.series["S"] = res.totals.s;
        art.series["I"] = res.totals.i;
        art.series["R"] = res.totals.r;
        art.series["D"] = res.totals.d;
        art.series["N"] = res.totals.n;

        if (!out_root.empty()) {
            const auto snapdir = out_root / s.label / "snapshots";
            std::filesystem::create_directories(snapdir);
            for (const auto& snap : res.snapshots) {
                CsvWriter csv(snapdir / ("snap_t" + format_full(snap.time) + ".csv"));
                csv.header({"x,s,i,r,d"});
                const auto sv = pde.s(snap.state), iv = pde.i(snap.state), rv = pde.r(snap.state),
                           dv = pde.d(snap.state);
                for (std::size_t j = 0; j < pde.n_nodes(); ++j)
                    csv.row({static_cast<double>(j) * pde.dx(), sv[j], iv[j], rv[j], dv[j]});
                csv.close();
            }
        }
        break;
    }
    }

    detail::finish_artifacts(art);

    if (!out_root.empty()) {
        art.dir = out_root / s.label;
        std::filesystem::create_directories(art.dir);
        detail::write_totals_csv(art, art.dir / "totals.csv");
        detail::write_summary(s, art, art.dir / "summary.txt");
    }
    return art;
}

} // namespace sirdde
