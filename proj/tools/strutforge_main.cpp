#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "strutforge/enlarge.hpp"
#include "strutforge/jsonio.hpp"
#include "strutforge/loopreduce.hpp"
#include "strutforge/log.hpp"
#include "strutforge/svg.hpp"
#include "strutforge/synthesis.hpp"

namespace sf = strutforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;
constexpr int kExitSolverFailure = 3;

struct Options {
    std::string input;
    std::string output;
    std::string svg;
    std::string frames;
    std::string objective;
    double tol = -1.0;
    double bal_tol = -1.0;
    double force_scale = 1.0;
};

void emit_report(const Options& opt, const sf::Report& report) {
    std::string text = sf::report_to_json(report);
    if (opt.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.output);
        if (!out) throw sf::InputError("cannot open output file: " + opt.output);
        out << text;
    }
}

sf::ProblemFile load(const Options& opt) {
    sf::ProblemFile pf = sf::load_problem(opt.input);
    if (opt.bal_tol > 0.0) {
        if (pf.system) pf.system->bal_tol = opt.bal_tol;
        if (pf.net) pf.net->bal_tol = opt.bal_tol;
    }
    double tol = opt.tol > 0.0 ? opt.tol : pf.lp_tol.value_or(-1.0);
    sf::set_lp_tolerance_override(tol);
    return pf;
}

const sf::ForceSystem& require_system(const sf::ProblemFile& pf) {
    if (!pf.system) throw sf::InputError("/points: missing (this command needs a force system)");
    return *pf.system;
}

sf::Objective parse_objective(const Options& opt, const sf::ProblemFile& pf) {
    if (opt.objective.empty())
        return pf.objective_given ? pf.objective
                                  : sf::Objective{sf::ObjectiveKind::TotalWeight, -1};
    if (opt.objective == "weight") return {sf::ObjectiveKind::TotalWeight, -1};
    if (opt.objective.rfind("cleave:", 0) == 0) {
        int q = std::stoi(opt.objective.substr(7));
        return {sf::ObjectiveKind::CleaveHeight, q};
    }
    throw sf::InputError("--objective: expected 'weight' or 'cleave:<q>'");
}

sf::StrutNet to_strut_net(const sf::GeneralNet& net) {
    return sf::StrutNet{net.nodes, net.struts, net.applied};
}

sf::SvgScene scene_for_system(const sf::ForceSystem& fs,
                              const std::vector<sf::Obstacle>& obstacles,
                              const sf::SynthesisResult* result, double force_scale) {
    sf::SvgScene scene;
    scene.force_scale = force_scale;
    scene.hull = sf::convex_hull(fs.points);
    scene.obstacles = obstacles;
    for (int i = 0; i < fs.size(); ++i) {
        if (fs.is_reactive(i))
            scene.reactive_points.push_back(fs.point(i));
        else if (fs.force(i).norm() > 0.0)
            scene.arrows.push_back({fs.point(i), fs.force(i)});
    }
    if (result && result->net) {
        scene.net = result->net;
        scene.gamma = result->gamma;
    }
    return scene;
}

std::string status_name(sf::LpStatus st) {
    switch (st) {
        case sf::LpStatus::Feasible: return "feasible";
        case sf::LpStatus::Infeasible: return "infeasible";
        case sf::LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

int run_check(const Options& opt) {
    sf::ProblemFile pf = load(opt);
    const sf::ForceSystem& fs = require_system(pf);
    if (!fs.reactive.empty())
        throw sf::InputError("/reactive: check needs a fully prescribed system");
    sf::Report rep;
    rep.command = "check";
    bool balanced = sf::check_balance(fs);
    rep.balanced = balanced;
    rep.compressible = balanced && sf::check_compressibility(fs);
    rep.status = "ok";
    emit_report(opt, rep);
    return kExitOk;
}

int run_opennet(const Options& opt) {
    sf::ProblemFile pf = load(opt);
    const sf::ForceSystem& fs = require_system(pf);
    sf::Report rep;
    rep.command = "opennet";
    if (!sf::check_balance(fs) || !sf::check_compressibility(fs)) {
        rep.status = "infeasible";
        rep.reason = "not-compressible";
        emit_report(opt, rep);
        return kExitInfeasible;
    }
    sf::SynthesisResult res = sf::solve_reactive(fs, {}, {sf::ObjectiveKind::None, -1});
    rep.status = "feasible";
    rep.tangent = res.tangent;
    rep.net = res.net;
    rep.max_residual = res.net->max_residual();
    emit_report(opt, rep);
    if (!opt.svg.empty())
        sf::write_svg(opt.svg, scene_for_system(fs, {}, &res, opt.force_scale));
    return kExitOk;
}

int run_avoid(const Options& opt) {
    sf::ProblemFile pf = load(opt);
    const sf::ForceSystem& fs = require_system(pf);
    if (pf.obstacles.empty())
        throw sf::InputError("/obstacles: avoid needs at least one obstacle");
    sf::Report rep;
    rep.command = "avoid";
    if (!sf::check_balance(fs) || !sf::check_compressibility(fs)) {
        rep.status = "infeasible";
        rep.reason = "not-compressible";
        emit_report(opt, rep);
        return kExitInfeasible;
    }
    bool quick = false;
    for (const auto& obs : pf.obstacles)
        if (sf::quick_infeasibility(fs, obs)) {
            quick = true;
            break;
        }
    sf::SynthesisResult res = sf::avoid_multi(fs, pf.obstacles);
    if (quick && res.status == sf::LpStatus::Feasible)
        throw sf::InternalError("avoid: quick nonexistence test contradicts the LP");
    rep.status = status_name(res.status);
    rep.tangent = res.tangent;
    rep.lp_iterations = res.lp_iterations;
    if (quick) rep.reason = "fig2-test";
    if (res.status == sf::LpStatus::Feasible) {
        rep.cleaving = res.cleaving;
        rep.net = res.net;
        rep.gamma = res.gamma;
        rep.max_residual = res.net->max_residual();
        rep.boundary_contact = res.boundary_contact;
    }
    emit_report(opt, rep);
    if (!opt.svg.empty())
        sf::write_svg(opt.svg, scene_for_system(fs, pf.obstacles,
                                                res.status == sf::LpStatus::Feasible
                                                    ? &res
                                                    : nullptr,
                                                opt.force_scale));
    return res.status == sf::LpStatus::Feasible ? kExitOk : kExitInfeasible;
}

int run_reactive(const Options& opt) {
    sf::ProblemFile pf = load(opt);
    sf::ForceSystem fs = require_system(pf);
    if (!pf.supports.empty()) fs = sf::discretize_supports(fs, pf.supports);
    sf::Objective objective = parse_objective(opt, pf);
    sf::SynthesisResult res = sf::solve_reactive(fs, pf.obstacles, objective);
    sf::Report rep;
    rep.command = "reactive";
    rep.status = status_name(res.status);
    rep.lp_iterations = res.lp_iterations;
    if (res.status == sf::LpStatus::Feasible) {
        rep.tangent = res.tangent;
        rep.cleaving = res.cleaving;
        rep.net = res.net;
        rep.reactive_forces = res.reactive_forces;
        rep.objective_value = res.objective_value;
        rep.gamma = res.gamma;
        rep.max_residual = res.net->max_residual();
        rep.boundary_contact = res.boundary_contact;
    }
    emit_report(opt, rep);
    if (!opt.svg.empty())
        sf::write_svg(opt.svg, scene_for_system(fs, pf.obstacles,
                                                res.status == sf::LpStatus::Feasible
                                                    ? &res
                                                    : nullptr,
                                                opt.force_scale));
    return res.status == sf::LpStatus::Feasible ? kExitOk : kExitInfeasible;
}

int run_enlarge(const Options& opt) {
    sf::ProblemFile pf = load(opt);
    const sf::ForceSystem& fs = require_system(pf);
    sf::Report rep;
    rep.command = "enlarge";
    if (!sf::check_balance(fs) || !sf::check_compressibility(fs)) {
        rep.status = "infeasible";
        rep.reason = "not-compressible";
        emit_report(opt, rep);
        return kExitInfeasible;
    }
    auto states = sf::roll_maximal_regions(fs);
    rep.status = "ok";
    for (const auto& st : states) {
        rep.touching_sets.push_back(st.touching);
        if (st.gamma) rep.gamma.push_back(*st.gamma);
        rep.cleaving.push_back(st.plane);
    }
    emit_report(opt, rep);
    if (!opt.svg.empty()) {
        sf::SynthesisResult open = sf::solve_reactive(fs, {}, {sf::ObjectiveKind::None, -1});
        sf::SvgScene scene = scene_for_system(fs, {}, &open, opt.force_scale);
        scene.gamma = rep.gamma;
        sf::write_svg(opt.svg, scene);
    }
    return kExitOk;
}

int run_reduce(const Options& opt) {
    sf::ProblemFile pf = load(opt);
    if (!pf.net) throw sf::InputError("/net: reduce needs a net block");
    sf::GeneralNet net = sf::planarize(*pf.net);
    std::vector<sf::GeneralNet> frames;
    sf::GeneralNet reduced =
        sf::reduce(net, opt.frames.empty() ? nullptr : &frames);
    sf::Report rep;
    rep.command = "reduce";
    rep.status = "ok";
    rep.loop_count_initial = sf::count_elementary_loops(net);
    rep.loop_count_final = sf::count_elementary_loops(reduced);
    rep.loop_bound_value = sf::loop_bound(net);
    sf::StrutNet snet = to_strut_net(reduced);
    rep.max_residual = snet.max_residual();
    rep.net = std::move(snet);
    emit_report(opt, rep);

    auto scene_of = [&](const sf::GeneralNet& g) {
        sf::SvgScene scene;
        scene.force_scale = opt.force_scale;
        scene.obstacles = g.obstacles;
        scene.net = to_strut_net(g);
        for (size_t v = 0; v < g.nodes.size(); ++v)
            if (g.applied[v].norm() > 0.0)
                scene.arrows.push_back({g.nodes[v], g.applied[v]});
        return scene;
    };
    if (!opt.frames.empty()) {
        std::filesystem::create_directories(opt.frames);
        for (size_t i = 0; i < frames.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%03zu.svg", i);
            sf::write_svg((std::filesystem::path(opt.frames) / name).string(),
                          scene_of(frames[i]));
        }
    }
    if (!opt.svg.empty()) sf::write_svg(opt.svg, scene_of(reduced));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strutforge: compression-only strut nets that avoid obstacles"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", opt.input, "problem file (JSON)")->required();
        cmd->add_option("--output", opt.output, "report file (JSON, default stdout)");
        cmd->add_option("--svg", opt.svg, "figure output (SVG)");
        cmd->add_option("--tol", opt.tol, "LP feasibility tolerance override");
        cmd->add_option("--bal-tol", opt.bal_tol, "relative balance tolerance");
        cmd->add_option("--force-scale", opt.force_scale,
                        "arrow length multiplier in figures");
        return cmd;
    };
    auto* c_check = add_common(app.add_subcommand("check", "balance and compressibility"));
    auto* c_open = add_common(app.add_subcommand("opennet", "open strut net"));
    auto* c_avoid = add_common(app.add_subcommand("avoid", "net avoiding obstacles"));
    auto* c_react = add_common(
        app.add_subcommand("reactive", "net with reactive supports and obstacles"));
    c_react->add_option("--objective", opt.objective, "weight | cleave:<q>");
    auto* c_enl =
        add_common(app.add_subcommand("enlarge", "maximal obstacle regions"));
    auto* c_red = add_common(app.add_subcommand("reduce", "loop reduction"));
    c_red->add_option("--frames", opt.frames, "directory for per-step SVG frames");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (app.got_subcommand(c_check)) return run_check(opt);
        if (app.got_subcommand(c_open)) return run_opennet(opt);
        if (app.got_subcommand(c_avoid)) return run_avoid(opt);
        if (app.got_subcommand(c_react)) return run_reactive(opt);
        if (app.got_subcommand(c_enl)) return run_enlarge(opt);
        if (app.got_subcommand(c_red)) return run_reduce(opt);
    } catch (const sf::InputError& e) {
        std::cerr << "strutforge: input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const sf::SolverFailure& e) {
        std::cerr << "strutforge: solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const sf::InternalError& e) {
        std::cerr << "strutforge: internal error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitInputError;
}
