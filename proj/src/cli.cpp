#include "cmot/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "cmot/frames.hpp"
#include "cmot/heatmap.hpp"
#include "cmot/history.hpp"
#include "cmot/problem_io.hpp"

namespace cmot {

namespace {

struct SolveOptions {
    std::string problem;
    std::optional<std::string> algorithm;
    std::optional<int> max_iters;
    std::optional<double> tol;
    std::optional<std::string> out_dir;
    std::optional<int> snapshots;
    bool quiet = false;
};

void print_report(std::ostream& out, const std::string& title, const StepSizeReport& rep, bool upper_bounds) {
    out << title << '\n';
    for (const auto& e : rep.entries) {
        out << "  " << std::left << std::setw(12) << e.label << std::right;
        if (upper_bounds) {
            out << " supplied=" << std::setprecision(6) << e.supplied << " bound=" << e.bound_value;
        } else {
            out << " lhs=" << std::setprecision(6) << e.margin;
        }
        out << "  " << to_string(e.status) << '\n';
    }
}

int run_validate(const std::string& path, std::ostream& out) {
    ProblemFile pf = load_problem(path);
    const GridSpec& g = pf.problem.grid;
    out << "problem: " << path << '\n';
    out << "grid: nt=" << g.nt << " nx=" << g.nx << " ny=" << g.ny << " boundary=" << to_string(g.space_bc) << '\n';
    out << "mass: " << space_integral(pf.problem.rho0, g) << '\n';
    out << "constraints:";
    if (pf.problem.constraint.terms.empty()) out << " none";
    for (const auto& t : pf.problem.constraint.terms) out << ' ' << term_name(t);
    out << '\n';
    out << "algorithm: " << to_string(pf.algorithm) << '\n';
    print_report(out, "alg1 step sizes:", validate_alg1(pf.params), true);
    print_report(out, "alg2/alg3 step sizes:", validate_alg23(pf.params), false);
    return 0;
}

int run_info(const std::string& path, std::ostream& out) {
    FrameArchive a = read_frames(path);
    const GridSpec& g = a.grid;
    out << "frames: " << path << '\n';
    out << "format version: " << kFrameFormatVersion << '\n';
    out << "grid: nt=" << g.nt << " nx=" << g.nx << " ny=" << g.ny << " boundary=" << to_string(g.space_bc) << '\n';
    out << "spacing: dt=" << format_double(g.dt()) << " dx=" << format_double(g.dx()) << " dy=" << format_double(g.dy())
        << '\n';
    out << "iterations: " << a.iterations << '\n';
    out << "energy: " << format_double(a.energy) << '\n';
    for (const auto& f : a.fields) out << "field: " << f.name << " time_samples=" << f.time_count << '\n';
    return 0;
}

int run_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
    ProblemFile pf = load_problem(o.problem);
    if (o.algorithm) pf.algorithm = parse_algorithm(*o.algorithm);
    if (o.max_iters) pf.params.max_outer = *o.max_iters;
    if (o.tol) pf.params.tol_density = *o.tol;
    if (o.out_dir) pf.outputs.dir = *o.out_dir;
    if (o.snapshots) pf.outputs.snapshots = *o.snapshots;
    pf.params.validate();
    if (pf.outputs.snapshots < 2) throw std::invalid_argument("--snapshots must be >= 2");

    for (const auto& w : step_size_warnings(pf.algorithm, pf.params)) err << "warning: " << w << '\n';
    Solver solver(pf.problem, pf.params);
    Observer obs;
    if (!o.quiet) {
        obs = [&out](const IterationRecord& r) {
            if (r.iteration % 50 == 0)
                out << "iter " << r.iteration << "  density_change=" << r.density_change << "  energy=" << r.energy
                    << '\n';
        };
    }
    Solution sol = solver.run(pf.algorithm, obs);

    const std::filesystem::path dir = pf.outputs.dir;
    std::filesystem::create_directories(dir);
    if (pf.outputs.frames) write_frames(sol, pf.problem, dir / "frames.cmot");
    if (pf.outputs.history) write_history_csv(sol.history, dir / "history.csv");
    if (pf.outputs.images)
        write_heatmaps(make_frame_archive(sol, pf.problem), dir, pf.outputs.snapshots, pf.auxiliary);
    {
        std::ofstream info(dir / "run_info.txt", std::ios::trunc);
        info << "algorithm = " << to_string(pf.algorithm) << '\n';
        info << "status = " << (sol.status == RunStatus::Converged ? "converged" : "max_iterations") << '\n';
        info << "iterations = " << sol.iterations << '\n';
        info << "energy = " << format_double(sol.energy) << '\n';
        info << "wall_seconds = " << sol.wall_seconds << '\n';
    }
    const bool ok = sol.status == RunStatus::Converged;
    if (!o.quiet || !ok) {
        out << (ok ? "converged" : "iteration limit reached") << " after " << sol.iterations
            << " iterations, energy " << format_double(sol.energy) << '\n';
    }
    return ok ? 0 : 2;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constrained dynamic optimal transport solver", "cmot"};
    app.require_subcommand(1);

    SolveOptions so;
    auto* solve = app.add_subcommand("solve", "Solve a transport problem");
    solve->add_option("problem", so.problem, "Problem file")->required();
    solve->add_option("--algorithm", so.algorithm, "alg1, alg2 or alg3")
        ->check(CLI::IsMember({"alg1", "alg2", "alg3"}));
    solve->add_option("--max-iters", so.max_iters, "Outer iteration limit")->check(CLI::PositiveNumber);
    solve->add_option("--tol", so.tol, "Density change tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--out-dir", so.out_dir, "Output directory");
    solve->add_option("--snapshots", so.snapshots, "Number of heatmap snapshots")->check(CLI::Range(2, 100000));
    solve->add_flag("--quiet", so.quiet, "Suppress progress output");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Load a problem and report step-size conditions");
    validate->add_option("problem", validate_path, "Problem file")->required();

    std::string info_path;
    auto* info = app.add_subcommand("info", "Print the header of a frame archive");
    info->add_option("frames", info_path, "Frame archive")->required();

    std::vector<const char*> argv;
    argv.push_back("cmot");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*solve) return run_solve(so, out, err);
        if (*validate) return run_validate(validate_path, out);
        if (*info) return run_info(info_path, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace cmot
