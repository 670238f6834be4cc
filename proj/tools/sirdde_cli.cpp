// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run scenarios, analyze stability, compare ODE
// against spatially integrated PDE runs, and sweep scenario sets.

#include "sirdde/sirdde.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

namespace fs = std::filesystem;

fs::path default_out_dir()
{
    if (const char* env = std::getenv("SIRDDE_OUT"))
        return fs::path(env);
    return fs::path("out");
}

std::string verdict_line(const sirdde::StabilityVerdict& v)
{
    std::string s = v.marginal()   ? "MARGINAL"
                    : v.stable     ? "STABLE"
                    : v.conclusive ? "UNSTABLE"
                                   : "INCONCLUSIVE";
    s += " (margin " + sirdde::format_full(v.margin);
    if (v.oscillatory)
        s += ", oscillatory";
    s += ")";
    return s;
}

void write_roots_csv(const sirdde::RootSet& rs, const fs::path& path)
{
    sirdde::CsvWriter csv(path);
    csv.header({"branch", "re", "im"});
    for (const auto& root : rs.roots)
        csv.row({static_cast<double>(root.branch), root.value.real(), root.value.imag()});
    csv.close();
}

void write_boundary_csv(const fs::path& path, int samples = 400)
{
    sirdde::CsvWriter csv(path);
    csv.header({"phi", "a", "b"});
    const double lo = 1e-3, hi = std::numbers::pi - 1e-3;
    for (int k = 0; k < samples; ++k) {
        const double phi = lo + (hi - lo) * static_cast<double>(k) / (samples - 1);
        const auto pt = sirdde::boundary_curve(phi);
        csv.row({phi, pt.a, pt.b});
    }
    csv.close();
}

int cmd_run(const std::string& config, const fs::path& out)
{
    const sirdde::Scenario s = sirdde::load_scenario(config);
    const sirdde::RunArtifacts art = sirdde::run_scenario(s, out);
    std::cout << s.label << ": wrote " << art.dir.string() << '\n';
    std::cout << "stability: " << verdict_line(art.verdict) << '\n';
    return 0;
}

int cmd_stability(std::optional<std::string> point, double phi_r, double phi_d, double sigma,
                  double mu, double alpha, int k_max, const fs::path& out)
{
    fs::create_directories(out);
    sirdde::CharPoint pt;
    sirdde::StabilityVerdict verdict;
    if (point) {
        const auto comma = point->find(',');
        if (comma == std::string::npos)
            throw sirdde::config_error("--point expects 'a,b'");
        try {
            std::size_t pos = 0;
            pt.a = std::stod(point->substr(0, comma), &pos);
            if (pos != comma)
                throw sirdde::config_error("--point: bad number");
            pt.b = std::stod(point->substr(comma + 1), &pos);
            if (comma + 1 + pos != point->size())
                throw sirdde::config_error("--point: bad number");
        }
        catch (const std::exception&) {
            throw sirdde::config_error("--point expects two numbers 'a,b', got '" + *point + "'");
        }
        verdict = sirdde::is_stable(pt, k_max);
    }
    else {
        if (!(sigma > 0.0))
            throw sirdde::config_error("--sigma must be > 0 (or use --point a,b)");
        sirdde::ModelParams p;
        p.phi_r = phi_r;
        p.phi_d = phi_d;
        p.sigma_delay = sigma;
        p.mu = mu;
        p.alpha = alpha;
        sirdde::validate_params(p, true);
        verdict = sirdde::theorem31_check(p);
        pt = {-mu * sigma, -(phi_d + phi_r) * sigma};
    }
    write_roots_csv(sirdde::characteristic_roots(pt, k_max), out / "roots.csv");
    write_boundary_csv(out / "boundary.csv");
    const auto rightmost = sirdde::characteristic_roots(pt, k_max).rightmost_root().value;
    std::cout << verdict_line(verdict) << '\n';
    std::cout << "point: a=" << sirdde::format_full(pt.a) << " b=" << sirdde::format_full(pt.b)
              << " rightmost_root=" << sirdde::format_full(rightmost.real()) << "+"
              << sirdde::format_full(rightmost.imag()) << "i\n";
    return 0;
}

bool params_equal_except_beta(const sirdde::ModelParams& a, const sirdde::ModelParams& b)
{
    return a.alpha == b.alpha && a.mu == b.mu && a.phi_r == b.phi_r && a.phi_d == b.phi_d &&
           a.sigma_delay == b.sigma_delay;
}

int cmd_compare(const std::string& ode_config, const std::string& pde_config, const fs::path& out)
{
    const sirdde::Scenario so = sirdde::load_scenario(ode_config);
    const sirdde::Scenario sp = sirdde::load_scenario(pde_config);
    if (so.model != sirdde::ModelKind::delay_sird_ode)
        throw sirdde::config_error("--ode-config must use model delay_sird_ode");
    if (sp.model != sirdde::ModelKind::delay_sird_pde1d)
        throw sirdde::config_error("--pde-config must use model delay_sird_pde1d");
    if (so.params.sigma_delay != sp.params.sigma_delay)
        throw sirdde::config_error("configs disagree on sigma_delay (" +
                                   sirdde::format_full(so.params.sigma_delay) + " vs " +
                                   sirdde::format_full(sp.params.sigma_delay) + ")");
    if (!(so.grid == sp.grid))
        throw sirdde::config_error("configs must share the same time grid");
    const sirdde::ModelParams eff_o = sirdde::build_schedule(so).breakpoints.front().second;
    const sirdde::ModelParams eff_p = sirdde::build_schedule(sp).breakpoints.front().second;
    const bool beta_match = (eff_o.beta_e == eff_p.beta_e && eff_o.beta_i == eff_p.beta_i) ||
                            (eff_o.beta_e == eff_p.beta_e / so.initial.n0 &&
                             eff_o.beta_i == eff_p.beta_i / so.initial.n0);
    if (!params_equal_except_beta(eff_o, eff_p) || !beta_match)
        throw sirdde::config_error(
            "ODE and PDE parameters do not match (modulo contact-rate normalization)");

    const auto ao = sirdde::run_scenario(so);
    const auto ap = sirdde::run_scenario(sp);

    fs::create_directories(out);
    sirdde::CsvWriter csv(out / "compare.csv");
    csv.header({"t", "ode_S", "ode_I", "ode_R", "ode_D", "pde_S", "pde_I", "pde_R", "pde_D"});
    double max_d_diff = 0.0, max_abs_d = 0.0;
    for (std::size_t k = 0; k < ao.times.size(); ++k) {
        const double od = ao.series.at("D")[k], pd = ap.series.at("D")[k];
        max_d_diff = std::max(max_d_diff, std::abs(od - pd));
        max_abs_d = std::max({max_abs_d, std::abs(od), std::abs(pd)});
        csv.row({ao.times[k], ao.series.at("S")[k], ao.series.at("I")[k], ao.series.at("R")[k], od,
                 ap.series.at("S")[k], ap.series.at("I")[k], ap.series.at("R")[k], pd});
    }
    csv.close();

    const double rel_d = max_abs_d > 0.0 ? max_d_diff / max_abs_d : 0.0;
    const double peak_o = ao.peaks.at("I").value;
    const double peak_p = ap.peaks.at("I").value;
    const double rel_peak_i = peak_o != 0.0 ? std::abs(peak_o - peak_p) / std::abs(peak_o) : 0.0;
    std::cout << "agreement: max_rel_diff_d=" << sirdde::format_full(rel_d)
              << " rel_peak_i_diff=" << sirdde::format_full(rel_peak_i) << '\n';
    return 0;
}

int cmd_sweep(std::vector<std::string> configs, const std::string& dir, unsigned jobs,
              const fs::path& out)
{
    if (!dir.empty()) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".json")
                configs.push_back(entry.path().string());
        }
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty())
        throw sirdde::config_error("sweep: no configs given");
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::mutex io_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= configs.size())
                return;
            std::string line;
            try {
                const auto s = sirdde::load_scenario(configs[k]);
                sirdde::run_scenario(s, out);
                line = "ok    " + s.label;
            }
            catch (const std::exception& e) {
                ++failures;
                line = std::string("fail  ") + configs[k] + ": " + e.what();
            }
            std::lock_guard lock(io_mutex);
            std::cout << line << '\n';
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<std::size_t>(jobs, configs.size()); ++j)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    return failures.load() == 0 ? 0 : 1;
}

int cmd_list(const std::string& dir)
{
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        try {
            const auto s = sirdde::load_scenario(path);
            std::cout << s.label << "  " << to_string(s.model)
                      << "  sigma=" << sirdde::format_full(s.params.sigma_delay)
                      << "  t_end=" << sirdde::format_full(s.grid.t_end) << "  ("
                      << path.filename().string() << ")\n";
        }
        catch (const std::exception& e) {
            std::cout << path.filename().string() << "  [invalid: " << e.what() << "]\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"delay SIRD epidemic models: simulation and stability analysis"};
    app.require_subcommand(1);

    std::string config, ode_config, pde_config, dir, point_arg;
    std::vector<std::string> configs;
    std::string out = default_out_dir().string();
    double phi_r = 0.0, phi_d = 0.0, sigma = 0.0, mu = 0.0, alpha = 0.0;
    int k_max = 25;
    unsigned jobs = 0;
    bool have_point = false;

    auto* run = app.add_subcommand("run", "run one scenario config");
    run->add_option("--config", config, "scenario config file")->required();
    run->add_option("--out", out, "output directory");

    auto* stab = app.add_subcommand("stability", "characteristic-root stability analysis");
    stab->add_option("--phi-r", phi_r, "recovery rate");
    stab->add_option("--phi-d", phi_d, "disease mortality rate");
    stab->add_option("--sigma", sigma, "delay in days");
    stab->add_option("--mu", mu, "background mortality rate");
    stab->add_option("--alpha", alpha, "birth rate");
    stab->add_option("--point", point_arg, "query a point 'a,b' of the scalar delay equation")
        ->each([&](const std::string&) { have_point = true; });
    stab->add_option("--k-max", k_max, "number of root branches on each side of the real axis");
    stab->add_option("--out", out, "directory for roots.csv and boundary.csv");

    auto* cmp = app.add_subcommand("compare", "ODE vs spatially integrated PDE comparison");
    cmp->add_option("--ode-config", ode_config, "ODE scenario config")->required();
    cmp->add_option("--pde-config", pde_config, "PDE scenario config")->required();
    cmp->add_option("--out", out, "output directory");

    auto* sweep = app.add_subcommand("sweep", "run many scenarios concurrently");
    sweep->add_option("--config", configs, "scenario config files");
    sweep->add_option("--dir", dir, "directory of *.json scenario configs");
    sweep->add_option("--jobs", jobs, "max concurrent runs (default: hardware threads)");
    sweep->add_option("--out", out, "output directory");

    auto* list = app.add_subcommand("list-scenarios", "list scenario configs in a directory");
    list->add_option("--dir", dir, "scenario directory")->default_val("scenarios");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(config, out);
        if (stab->parsed())
            return cmd_stability(have_point ? std::optional(point_arg) : std::nullopt, phi_r, phi_d,
                                 sigma, mu, alpha, k_max, out);
        if (cmp->parsed())
            return cmd_compare(ode_config, pde_config, out);
        if (sweep->parsed())
            return cmd_sweep(configs, dir, jobs, out);
        if (list->parsed())
            return cmd_list(dir);
    }
    catch (const sirdde::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const sirdde::convergence_error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitDivergence;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
