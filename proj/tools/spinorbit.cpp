// spinorbit: command-line front end for the dissipative spin-orbit library.
//
//   spinorbit <simulate|freq-map|sigma-vs-t|nf-map|constraint-map|drift-table> [flags]
//
// Exit codes: 0 success, 2 bad flags or configuration, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinorbit/io.hpp"
#include "spinorbit/spinorbit.hpp"

namespace {

using namespace spinorbit;

constexpr int kExitBadFlags = 2;
constexpr int kExitNumerical = 3;

std::string join(const std::vector<long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v[i]);
    return s;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

/// Options of one subcommand, remembered so the manifest can record resolved values.
class Params {
public:
    explicit Params(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& help) {
        auto* opt = app_->add_option("--" + name, var, help)->capture_default_str();
        getters_[name] = [&var]() -> std::optional<std::string> { return stringify(var); };
        return opt;
    }

    std::map<std::string, std::string> resolved() const {
        std::map<std::string, std::string> out;
        for (const auto& [k, get] : getters_) {
            if (auto v = get()) out[k] = *v;
        }
        return out;
    }

    CLI::App* app() const { return app_; }

private:
    static std::optional<std::string> stringify(double v) { return io::format_double(v); }
    static std::optional<std::string> stringify(int v) { return std::to_string(v); }
    static std::optional<std::string> stringify(long v) { return std::to_string(v); }
    static std::optional<std::string> stringify(unsigned v) { return std::to_string(v); }
    static std::optional<std::string> stringify(const std::string& v) { return v; }
    static std::optional<std::string> stringify(const std::vector<long>& v) { return join(v); }
    static std::optional<std::string> stringify(const std::vector<double>& v) { return join(v); }
    static std::optional<std::string> stringify(const std::vector<std::string>& v) { return join(v); }
    static std::optional<std::string> stringify(const std::optional<double>& v) {
        if (!v) return std::nullopt;
        return io::format_double(*v);
    }

    CLI::App* app_;
    std::map<std::string, std::function<std::optional<std::string>()>> getters_;
};

struct Common {
    std::string out = "-";
    unsigned jobs = 0;
    int steps_per_period = kDefaultStepsPerPeriod;
    std::string config;
};

void add_common(Params& p, Common& c) {
    p.add("out", c.out, "output CSV path ('-' for standard output, no manifest)");
    p.add("jobs", c.jobs, "worker threads for grid subcommands (0 = all cores)");
    p.add("steps-per-period", c.steps_per_period, "RK4 steps per orbital period")
        ->check(CLI::Range(16, 1 << 24));
    // The config path itself is not a run parameter, so it stays out of the manifest.
    p.app()->add_option("--config", c.config, "key=value file or run manifest; flags override it");
}

struct Grid {
    double e_min = 0.0;
    double e_max = 0.3;
    int n_e = 30;
    double eps_min = 0.0;
    double eps_max = 1e-3;
    int n_eps = 30;
};

void add_grid(Params& p, Grid& g) {
    p.add("e-min", g.e_min, "smallest eccentricity");
    p.add("e-max", g.e_max, "largest eccentricity");
    p.add("n-e", g.n_e, "eccentricity grid points")->check(CLI::PositiveNumber);
    p.add("eps-min", g.eps_min, "smallest equatorial ellipticity");
    p.add("eps-max", g.eps_max, "largest equatorial ellipticity");
    p.add("n-eps", g.n_eps, "ellipticity grid points")->check(CLI::PositiveNumber);
}

nlohmann::json grid_json(const Grid& g) {
    return {{"e", {{"min", g.e_min}, {"max", g.e_max}, {"n", g.n_e}}},
            {"eps", {{"min", g.eps_min}, {"max", g.eps_max}, {"n", g.n_eps}}}};
}

void emit(const Common& c, const Params& p, const std::string& subcommand, const io::CsvTable& table,
          nlohmann::json grids = nlohmann::json::object()) {
    if (c.out == "-") {
        std::cout << table.str();
        return;
    }
    io::write_file(c.out, table.str());
    io::Manifest m;
    m.subcommand = subcommand;
    m.parameters = p.resolved();
    m.grids = std::move(grids);
    m.outputs = {c.out};
    io::write_file(io::manifest_path(c.out), m.to_json().dump(2) + "\n");
}

frequency::SweepConfig sweep_config(const Grid& g, const Common& c, double mu, long T,
                                    const std::string& model, double x0, std::optional<double> y0) {
    frequency::SweepConfig s;
    s.mu = mu;
    s.T = T;
    s.e_range = {g.e_min, g.e_max};
    s.eps_range = {g.eps_min, g.eps_max};
    s.n_e = g.n_e;
    s.n_eps = g.n_eps;
    s.steps_per_period = c.steps_per_period;
    s.model = parse_model(model);
    s.x0 = x0;
    if (y0) s.y0 = *y0;
    s.jobs = c.jobs;
    return s;
}

std::vector<std::pair<int, int>> parse_resonances(const std::vector<std::string>& specs) {
    std::vector<std::pair<int, int>> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw DomainError("resonance '" + s + "' is not of the form p:q");
        try {
            out.emplace_back(std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
        } catch (const std::exception&) {
            throw DomainError("resonance '" + s + "' is not of the form p:q");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative spin-orbit laboratory: simulations, frequency maps, normal-form and "
                 "invariant-attractor drift computations."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::kToolVersion));

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate one orbit and write (k, x, y) at t = 2 pi k");
    Params sim_p(sim);
    Common sim_c;
    double sim_x0 = 0.0, sim_eps = 1e-3, sim_e = 0.06, sim_mu = 1e-3;
    std::optional<double> sim_y0, sim_eta;
    long sim_T = 100;
    std::string sim_model = "trig";
    add_common(sim_p, sim_c);
    sim_p.add("x0", sim_x0, "initial rotation angle");
    sim_p.add("y0", sim_y0, "initial angular velocity (default: the drift)");
    sim_p.add("eps", sim_eps, "equatorial ellipticity")->check(CLI::NonNegativeNumber);
    sim_p.add("e", sim_e, "orbital eccentricity")->check(CLI::Range(0.0, 0.999999999));
    sim_p.add("mu", sim_mu, "dissipative parameter")->check(CLI::NonNegativeNumber);
    sim_p.add("eta", sim_eta, "drift (default: N(e)/L(e))");
    sim_p.add("model", sim_model, "potential: exact | trig")->check(CLI::IsMember({"exact", "trig"}));
    sim_p.add("T", sim_T, "number of orbital periods")->check(CLI::PositiveNumber);

    // freq-map
    auto* fmap = app.add_subcommand("freq-map", "omega_num and sigma over an (e, eps) grid");
    Params fmap_p(fmap);
    Common fmap_c;
    Grid fmap_g;
    double fmap_mu = 1e-3, fmap_x0 = 0.0;
    std::optional<double> fmap_y0;
    long fmap_T = 12800;
    std::string fmap_model = "trig";
    add_common(fmap_p, fmap_c);
    add_grid(fmap_p, fmap_g);
    fmap_p.add("mu", fmap_mu, "dissipative parameter")->check(CLI::NonNegativeNumber);
    fmap_p.add("T", fmap_T, "number of orbital periods")->check(CLI::Range(10L, 100000000L));
    fmap_p.add("model", fmap_model, "potential: exact | trig")->check(CLI::IsMember({"exact", "trig"}));
    fmap_p.add("x0", fmap_x0, "initial rotation angle");
    fmap_p.add("y0", fmap_y0, "initial angular velocity (default: each cell's drift)");

    // sigma-vs-t
    auto* svt = app.add_subcommand("sigma-vs-t", "max |sigma| over an (e, eps) grid for a list of T");
    Params svt_p(svt);
    Common svt_c;
    Grid svt_g;
    double svt_mu = 1e-3, svt_x0 = 0.0;
    std::optional<double> svt_y0;
    std::vector<long> svt_T{100, 200, 400, 800, 1600, 3200, 6400, 12800};
    std::string svt_model = "trig";
    add_common(svt_p, svt_c);
    add_grid(svt_p, svt_g);
    svt_p.add("mu", svt_mu, "dissipative parameter")->check(CLI::NonNegativeNumber);
    svt_p.add("T-list", svt_T, "increasing integration lengths")->delimiter(',');
    svt_p.add("model", svt_model, "potential: exact | trig")->check(CLI::IsMember({"exact", "trig"}));
    svt_p.add("x0", svt_x0, "initial rotation angle");
    svt_p.add("y0", svt_y0, "initial angular velocity (default: each cell's drift)");

    // nf-map
    auto* nf = app.add_subcommand("nf-map", "normalized frequency Omega_app over an (e, eps) grid");
    Params nf_p(nf);
    Common nf_c;
    Grid nf_g;
    double nf_guard = normal_form::kGuardRadius;
    add_common(nf_p, nf_c);
    add_grid(nf_p, nf_g);
    nf_p.add("guard", nf_guard, "guard radius around the poles Y = 1, 3/2, 2")->check(CLI::PositiveNumber);

    // constraint-map
    auto* cm = app.add_subcommand("constraint-map", "zero level of the drift constraint C for resonance approximants");
    Params cm_p(cm);
    Common cm_c;
    Grid cm_g{0.0, 0.45, 64, 0.0, 1e-3, 16};
    std::vector<std::string> cm_res{"2:1", "3:2", "4:3", "1:1"};
    std::vector<long> cm_k{50, 60, 70, 80, 90, 100};
    std::string cm_sign = "both";
    double cm_mu = 1e-3, cm_floor = kDefaultDivisorFloor;
    int cm_order = parametrization::kDefaultOrder;
    add_common(cm_p, cm_c);
    add_grid(cm_p, cm_g);
    cm_p.add("resonances", cm_res, "resonances p:q")->delimiter(',');
    cm_p.add("k-list", cm_k, "approximant indices k")->delimiter(',');
    cm_p.add("sign", cm_sign, "approach side: above | below | both (1:1 is always above)")
        ->check(CLI::IsMember({"above", "below", "both"}));
    cm_p.add("mu", cm_mu, "dissipative parameter")->check(CLI::PositiveNumber);
    cm_p.add("order", cm_order, "series order K")->check(CLI::Range(1, parametrization::kMaxOrder));
    cm_p.add("divisor-floor", cm_floor, "smallest admissible |omega m + n|")->check(CLI::PositiveNumber);

    // drift-table
    auto* dt = app.add_subcommand("drift-table", "L(e), N(e), eta(e) and its eccentricity series");
    Params dt_p(dt);
    Common dt_c;
    std::vector<double> dt_values;
    double dt_e_min = 0.0, dt_e_max = 0.3;
    int dt_n = 31;
    add_common(dt_p, dt_c);
    dt_p.add("e-values", dt_values, "explicit eccentricities (overrides the grid)")->delimiter(',');
    dt_p.add("e-min", dt_e_min, "smallest eccentricity");
    dt_p.add("e-max", dt_e_max, "largest eccentricity");
    dt_p.add("n-e", dt_n, "eccentricity grid points")->check(CLI::PositiveNumber);

    // Splice in the --config file before CLI11 sees the arguments.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty() && !args.empty()) {
        try {
            const auto cfg = io::parse_config(io::read_file(config_path));
            if (!cfg.subcommand.empty() && cfg.subcommand != args[0]) {
                std::cerr << "error: manifest is for '" << cfg.subcommand << "', not '" << args[0] << "'\n";
                return kExitBadFlags;
            }
            std::vector<std::string> rest(args.begin() + 1, args.end());
            rest = io::merge_config(rest, cfg);
            rest.insert(rest.begin(), args[0]);
            args = std::move(rest);
        } catch (const std::exception& ex) {
            std::cerr << "error: config: " << ex.what() << "\n";
            return kExitBadFlags;
        }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex);
        return code == 0 ? 0 : kExitBadFlags;
    }

    try {
        if (sim->parsed()) {
            SpinOrbitParams params{sim_eps, sim_e, sim_mu, sim_eta.value_or(kepler::eta_exact(sim_e)),
                                   parse_model(sim_model)};
            params.validate();
            const auto orbit = integrate(sim_x0, sim_y0.value_or(params.eta), params, sim_T,
                                         sim_c.steps_per_period);
            io::CsvTable t({"k", "x", "y"});
            for (const auto& s : orbit.samples) {
                t.add_row({std::to_string(s.k), io::format_double(s.x), io::format_double(s.y)});
            }
            emit(sim_c, sim_p, "simulate", t);
        } else if (fmap->parsed()) {
            const auto cells =
                frequency::sweep(sweep_config(fmap_g, fmap_c, fmap_mu, fmap_T, fmap_model, fmap_x0, fmap_y0));
            io::CsvTable t({"e", "eps", "omega_num", "sigma"});
            int failed = 0;
            for (const auto& c : cells) {
                failed += c.failed;
                t.add_row({io::format_double(c.e), io::format_double(c.eps), io::format_double(c.omega_num),
                           io::format_double(c.sigma)});
            }
            if (failed) std::cerr << "warning: " << failed << " cell(s) blew up and are reported as NaN\n";
            emit(fmap_c, fmap_p, "freq-map", t, grid_json(fmap_g));
        } else if (svt->parsed()) {
            const auto rows = frequency::sigma_vs_T(
                sweep_config(svt_g, svt_c, svt_mu, svt_T.back(), svt_model, svt_x0, svt_y0), svt_T);
            io::CsvTable t({"T", "max_abs_sigma", "failed_cells"});
            for (const auto& r : rows) {
                t.add_row({std::to_string(r.T), io::format_double(r.max_abs_sigma), std::to_string(r.failed_cells)});
            }
            emit(svt_c, svt_p, "sigma-vs-t", t, grid_json(svt_g));
        } else if (nf->parsed()) {
            if (nf_g.n_e < 1 || nf_g.n_eps < 1) throw DomainError("grid sizes must be positive");
            const auto es = frequency::linspace({nf_g.e_min, nf_g.e_max}, nf_g.n_e);
            const auto epss = frequency::linspace({nf_g.eps_min, nf_g.eps_max}, nf_g.n_eps);
            for (double e : es) kepler::check_eccentricity(e);
            io::CsvTable t({"e", "eps", "omega_app"});
            for (double e : es) {
                for (double eps : epss) {
                    double v = std::numeric_limits<double>::quiet_NaN();
                    try {
                        v = normal_form::omega_app(eps, e, nf_guard);
                    } catch (const NearResonance&) {
                    }
                    t.add_row({io::format_double(e), io::format_double(eps), io::format_double(v)});
                }
            }
            emit(nf_c, nf_p, "nf-map", t, grid_json(nf_g));
        } else if (cm->parsed()) {
            parametrization::ContourConfig cc;
            cc.order = cm_order;
            cc.e_range = {cm_g.e_min, cm_g.e_max};
            cc.eps_range = {cm_g.eps_min, cm_g.eps_max};
            cc.n_e = cm_g.n_e;
            cc.n_eps = cm_g.n_eps;
            cc.divisor_floor = cm_floor;
            cc.jobs = cm_c.jobs;
            io::CsvTable t({"p", "q", "k", "sign", "omega", "eps", "e"});
            for (const auto& [p, q] : parse_resonances(cm_res)) {
                std::vector<parametrization::ApproachSide> sides;
                if (p == q || cm_sign == "above") {
                    sides = {parametrization::ApproachSide::above};
                } else if (cm_sign == "below") {
                    sides = {parametrization::ApproachSide::below};
                } else {
                    sides = {parametrization::ApproachSide::above, parametrization::ApproachSide::below};
                }
                for (auto side : sides) {
                    for (long k : cm_k) {
                        const auto approx = parametrization::resonance_approximant(p, q, static_cast<int>(k), side);
                        const auto res = parametrization::contour_zero_level(approx.omega, cm_mu, cc);
                        auto row = [&](double eps, double e) {
                            t.add_row({std::to_string(p), std::to_string(q), std::to_string(k),
                                       std::string(parametrization::to_string(side)),
                                       io::format_double(approx.omega), io::format_double(eps),
                                       io::format_double(e)});
                        };
                        for (const auto& pt : res.points) row(pt.eps, pt.e);
                        for (double eps : res.failed_rows) row(eps, std::numeric_limits<double>::quiet_NaN());
                    }
                }
            }
            emit(cm_c, cm_p, "constraint-map", t, grid_json(cm_g));
        } else if (dt->parsed()) {
            const auto es = dt_values.empty() ? frequency::linspace({dt_e_min, dt_e_max}, dt_n) : dt_values;
            io::CsvTable t({"e", "lbar", "nbar", "eta_exact", "eta_series"});
            for (double e : es) {
                const auto avg = kepler::tidal_averages(e);
                t.add_row({io::format_double(e), io::format_double(avg.lbar), io::format_double(avg.nbar),
                           io::format_double(avg.eta), io::format_double(kepler::drift_series(e))});
            }
            emit(dt_c, dt_p, "drift-table", t);
        }
    } catch (const DomainError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitBadFlags;
    } catch (const IntegrationBlowup& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
