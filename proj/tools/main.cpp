// bichrom: equilibria, pinning/travelling criteria and front simulations for
// the bichromatic Nagumo lattice equation.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bichrom/equilibria.hpp"
#include "bichrom/format.hpp"
#include "bichrom/lattice_sim.hpp"
#include "bichrom/scan.hpp"
#include "bichrom/standing_front.hpp"
#include "bichrom/wave_criteria.hpp"

namespace {

using namespace bichrom;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

const char* branch_name(BranchLabel b) {
    switch (b) {
        case BranchLabel::Zero: return "zero";
        case BranchLabel::Mono_a: return "mono_a";
        case BranchLabel::One: return "one";
        case BranchLabel::A: return "A";
        case BranchLabel::B: return "B";
        case BranchLabel::C: return "C";
        case BranchLabel::D: return "D";
        case BranchLabel::SwappedA: return "A'";
        case BranchLabel::SwappedB: return "B'";
        case BranchLabel::SwappedC: return "C'";
        case BranchLabel::SwappedD: return "D'";
    }
    return "?";
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::StableNode: return "stable";
        case Stability::Saddle: return "saddle";
        case Stability::UnstableNode: return "unstable";
        case Stability::Degenerate: return "degenerate";
    }
    return "?";
}

int cmd_equilibria(double a, double d, bool json) {
    const auto roots = solve_equilibria(Params(a, d));
    if (json) {
        nlohmann::json out;
        out["a"] = a;
        out["d"] = d;
        out["count"] = roots.size();
        for (const auto& r : roots)
            out["roots"].push_back({{"u", r.u},
                                    {"v", r.v},
                                    {"branch", branch_name(r.branch)},
                                    {"stability", stability_name(r.stability)}});
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "a=" << format_double(a) << " d=" << format_double(d) << " roots=" << roots.size()
                  << "\n";
        for (const auto& r : roots)
            std::cout << "  (" << format_double(r.u) << ", " << format_double(r.v) << ")  "
                      << branch_name(r.branch) << "  " << stability_name(r.stability) << "\n";
    }
    return kExitOk;
}

int cmd_curves(double a_min, double a_max, int steps, std::ostream& out) {
    out << "a,d_minus,d_plus\n";
    for (int i = 0; i < steps; ++i) {
        const double a = steps == 1 ? a_min : a_min + (a_max - a_min) * double(i) / double(steps - 1);
        const auto c = bifurcation_curves(a);
        out << format_double(c.a) << ',' << format_double(c.d_minus) << ','
            << format_double(c.d_plus) << "\n";
    }
    return kExitOk;
}

int cmd_gamma(double a_min, double a_max, int steps, std::ostream& out) {
    out << "a,gamma\n";
    for (int i = 0; i < steps; ++i) {
        const double a = steps == 1 ? a_min : a_min + (a_max - a_min) * double(i) / double(steps - 1);
        out << format_double(a) << ',' << format_double(gamma_fn(a)) << "\n";
    }
    return kExitOk;
}

int cmd_classify(double a, double d) {
    const auto rep = classify(Params(a, d), /*with_gamma=*/true);
    std::cout << "a=" << format_double(a) << " d=" << format_double(d) << "\n";
    std::cout << "verdict: " << to_string(rep.verdict) << "\n";
    std::cout << "in_omega_minus: " << (rep.in_omega_minus ? "yes" : "no") << "\n";
    const auto line = [](const char* name, const std::optional<double>& v) {
        std::cout << name << ": " << (v ? format_double(*v) : std::string("-")) << "\n";
    };
    line("v_bot", rep.v_bot);
    line("v_top", rep.v_top);
    line("u_top", rep.u_top);
    line("u_bot", rep.u_bot);
    line("gamma_at_dminus", rep.gamma_at_dminus);
    std::cout << "pinned_bound (1-a)^2/8: " << format_double(pinned_bound(a)) << "\n";
    std::cout << "quick_reflection_test: " << (rep.quick_reflection_test ? "travelling" : "undecided")
              << "\n";
    return kExitOk;
}

int cmd_regions(double a_min, double a_max, double d_min, double d_max, int res,
                const std::string& simulate, const std::string& out_path, bool with_gamma,
                int sim_budget, std::uint64_t seed) {
    ScanOptions opt;
    if (simulate == "never")
        opt.simulate = SimulatePolicy::Never;
    else if (simulate == "undetermined")
        opt.simulate = SimulatePolicy::OnUndetermined;
    else if (simulate == "always")
        opt.simulate = SimulatePolicy::Always;
    else
        throw CLI::ValidationError("--simulate must be never|undetermined|always");
    opt.with_gamma = with_gamma;
    opt.sim_budget = sim_budget;
    opt.seed = seed;
    const auto grid = scan(a_min, a_max, d_min, d_max, res, opt);
    write_csv(grid, out_path);
    std::cout << "wrote " << grid.cells.size() << " cells to " << out_path << "\n";
    return kExitOk;
}

int cmd_simulate(double a, double d, const std::string& kind_str, double t_end, int n,
                 const std::string& out_path, const std::string& speed_out) {
    const Params p(a, d);
    IcKind kind;
    if (kind_str == "bichromatic")
        kind = IcKind::BichromaticFront;
    else if (kind_str == "mono")
        kind = IcKind::MonochromaticFront;
    else if (kind_str == "plateau")
        kind = IcKind::Plateau;
    else
        throw CLI::ValidationError("--kind must be bichromatic|mono|plateau");
    const SimConfig cfg = make_config(p, n, t_end);
    auto ic = build_ic(kind, p, cfg, cfg.N / 2.0, 8.0);
    const auto traj = integrate(std::move(ic), p, cfg, ghosts_for(kind, p, cfg));

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
    out << "t,j,u\n";
    for (const auto& s : traj)
        for (std::size_t j = 0; j < s.u.size(); ++j)
            out << format_double(s.t) << ',' << j << ',' << format_double(s.u[j]) << "\n";
    std::cout << "wrote " << traj.size() << " states to " << out_path << "\n";

    const std::optional<double> thr =
        kind == IcKind::MonochromaticFront ? std::optional<double>(0.5) : std::nullopt;
    try {
        const auto est = estimate_speed(traj, p, thr);
        std::cout << "speed c=" << format_double(est.c) << " r2=" << format_double(est.r_squared)
                  << " displacement=" << format_double(est.displacement) << " class="
                  << to_string(est.classification) << "\n";
        if (!speed_out.empty()) {
            std::ofstream sp(speed_out, std::ios::binary);
            if (!sp) throw std::runtime_error("cannot open '" + speed_out + "'");
            sp << "t,interface_pos\n";
            const double threshold = thr ? *thr : 0.5 * bichromatic_pattern(p).first;
            for (const auto& s : traj)
                sp << format_double(s.t) << ',' << format_double(interface_position(s, threshold))
                   << "\n";
        }
    } catch (const NoInterface&) {
        std::cout << "speed: no trackable interface\n";
    } catch (const std::invalid_argument& e) {
        std::cout << "speed: not estimated (" << e.what() << ")\n";
    }
    return kExitOk;
}

int cmd_standing(double a, double d, int n, const std::string& out_path) {
    const auto prof = find_standing_front(Params(a, d), n);
    if (!prof) {
        std::cout << "no standing front found from the step seed "
                     "(evidence of a travelling front, not a proof)\n";
        return kExitCheckFailure;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
    out << "j,u_j\n";
    for (std::size_t j = 0; j < prof->u.size(); ++j)
        out << j << ',' << format_double(prof->u[j]) << "\n";
    std::cout << "standing front found, residual=" << format_double(prof->residual_norm)
              << ", wrote " << prof->u.size() << " sites to " << out_path << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite) {
    int failures = 0;
    const auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };
    if (suite == "corner" || suite == "all") {
        const auto rep = verify_asymptotics(AsymptoticsKind::CornerA0, {0.04, 0.06, 0.08, 0.10});
        std::string detail = "err/a^5 ratios:";
        for (const auto& s : rep.samples) detail += " " + format_double(s.ratio);
        report("corner asymptotics d_-(a) ~ a^2/8 + a^4/32", rep.pass, detail);
    }
    if (suite == "cusp" || suite == "all") {
        const double d0 = 1.0 / 24.0;
        const auto rep =
            verify_asymptotics(AsymptoticsKind::Cusp, {d0 - 4e-4, d0 - 1e-3, d0 - 2e-3});
        std::string detail = "err/delta^2 ratios:";
        for (const auto& s : rep.samples) detail += " " + format_double(s.ratio);
        report("cusp asymptotics a_-(d) ~ 1/2 - sqrt(1152 delta^3)", rep.pass, detail);
    }
    if (suite == "gamma" || suite == "all") {
        bool all_positive = true;
        double min_gamma = 1e300;
        double argmin = 0.0;
        for (int i = 0; i <= 49; ++i) {
            const double a = 0.50 + 0.01 * i;
            const double g = gamma_fn(a);
            if (g < min_gamma) {
                min_gamma = g;
                argmin = a;
            }
            if (!(g > 0.0)) all_positive = false;
        }
        report("Gamma(a) > 0 on {0.50, 0.51, ..., 0.99}", all_positive,
               "min Gamma = " + format_double(min_gamma) + " at a = " + format_double(argmin));
    }
    return failures == 0 ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bichromatic front toolkit for the Nagumo lattice equation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "plain-text key=value configuration file (flags override)");

    double a = 0.5, d = 0.02, a_min = 0.05, a_max = 0.95, d_min = 1e-3, d_max = 0.05;
    int steps = 50, res = 64, n = 512, sim_budget = -1;
    std::uint64_t seed = 1234567;
    double t_end = 2000.0;
    bool json = false, with_gamma = false;
    std::string simulate = "never", out_path, speed_out, kind = "bichromatic", suite = "all";

    auto* eq = app.add_subcommand("equilibria", "print all roots of G = 0 with stability");
    eq->add_option("--a", a, "detuning a in (0,1)")->required();
    eq->add_option("--d", d, "coupling d > 0")->required();
    eq->add_flag("--json", json, "JSON output");

    auto* cv = app.add_subcommand("curves", "CSV of a, d_minus(a), d_plus(a)");
    cv->add_option("--a-min", a_min)->required();
    cv->add_option("--a-max", a_max)->required();
    cv->add_option("--steps", steps)->required();

    auto* gm = app.add_subcommand("gamma", "CSV of a, Gamma(a)");
    gm->add_option("--a-min", a_min)->required();
    gm->add_option("--a-max", a_max)->required();
    gm->add_option("--steps", steps)->required();

    auto* cl = app.add_subcommand("classify", "pinning/travelling criterion report at one (a, d)");
    cl->add_option("--a", a)->required();
    cl->add_option("--d", d)->required();

    auto* rg = app.add_subcommand("regions", "scan a parameter rectangle and write the region CSV");
    rg->add_option("--a-min", a_min)->required();
    rg->add_option("--a-max", a_max)->required();
    rg->add_option("--d-min", d_min)->required();
    rg->add_option("--d-max", d_max)->required();
    rg->add_option("--res", res, "grid resolution per axis (<= 512)")->required();
    rg->add_option("--simulate", simulate, "never|undetermined|always");
    rg->add_flag("--gamma", with_gamma, "also compute Gamma(a) per column");
    rg->add_option("--sim-budget", sim_budget, "cap on simulated cells (seeded random subset)");
    rg->add_option("--seed", seed, "seed for the simulation sub-budget selection");
    rg->add_option("--out", out_path, "output CSV path")->required();

    auto* sm = app.add_subcommand("simulate", "integrate the lattice equation and export t,j,u");
    sm->add_option("--a", a)->required();
    sm->add_option("--d", d)->required();
    sm->add_option("--kind", kind, "bichromatic|mono|plateau");
    sm->add_option("--t-end", t_end);
    sm->add_option("--n", n, "lattice size (even, >= 128)");
    sm->add_option("--out", out_path, "trajectory CSV path")->required();
    sm->add_option("--speed-out", speed_out, "optional CSV of t, interface position");

    auto* st = app.add_subcommand("standing", "Newton solve for a standing front profile");
    st->add_option("--a", a)->required();
    st->add_option("--d", d)->required();
    st->add_option("--n", n, "lattice size (even, >= 64)")->required();
    st->add_option("--out", out_path, "profile CSV path (columns j,u_j)")->required();

    auto* vf = app.add_subcommand("verify", "run the analytic acceptance checks");
    vf->add_option("--suite", suite, "corner|cusp|gamma|all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (eq->parsed()) return cmd_equilibria(a, d, json);
        if (cv->parsed()) return cmd_curves(a_min, a_max, steps, std::cout);
        if (gm->parsed()) return cmd_gamma(a_min, a_max, steps, std::cout);
        if (cl->parsed()) return cmd_classify(a, d);
        if (rg->parsed())
            return cmd_regions(a_min, a_max, d_min, d_max, res, simulate, out_path, with_gamma,
                               sim_budget, seed);
        if (sm->parsed()) return cmd_simulate(a, d, kind, t_end, n, out_path, speed_out);
        if (st->parsed()) return cmd_standing(a, d, n, out_path);
        if (vf->parsed()) return cmd_verify(suite);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BoundaryDegenerate& e) {
        std::cerr << "numeric/domain error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const OutOfDomain& e) {
        std::cerr << "numeric/domain error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "numeric/domain error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitUsage;
}
