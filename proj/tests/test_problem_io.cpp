#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cmot/frames.hpp"
#include "cmot/heatmap.hpp"
#include "cmot/history.hpp"
#include "cmot/problem_io.hpp"
#include "test_util.hpp"

using namespace cmot;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[grid]
nt = 9
nx = 8
ny = 6

[densities]
rho0 = gaussian(center=[0.3, 0.5], sigma=0.1)
rho1 = gaussian(center=[0.7, 0.5], sigma=0.1)
)";

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("cmot_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string with_constraint(const std::string& body) { return std::string(kMinimal) + "\n[constraint]\n" + body; }

Solution random_solution(const GridSpec& g, std::mt19937_64& rng) {
    Solution sol;
    sol.grid = g;
    sol.state = SolverState(g);
    sol.state.phi = testutil::random_scalar(g, rng);
    sol.state.mu = testutil::random_pair(g, rng);
    sol.iterations = 123;
    sol.energy = 0.0312498765;
    return sol;
}

}  // namespace

TEST_CASE("a minimal file gets the default parameters") {
    ProblemFile pf = parse_problem(kMinimal);
    const GridSpec& g = pf.problem.grid;
    CHECK(g.nt == 9);
    CHECK(g.nx == 8);
    CHECK(g.ny == 6);
    CHECK(g.space_bc == SpaceBc::Periodic);
    CHECK(g.lx == 1.0);
    CHECK(pf.params.r == 1.0);
    CHECK(pf.params.s == 1.0);
    CHECK(pf.params.rho == 0.5);
    CHECK(pf.params.rho_nu == 0.5);
    CHECK(pf.params.rho_eta == 0.5);
    CHECK(pf.params.rho_r == 0.4);
    CHECK(pf.params.rho_s == 1.0);
    CHECK(pf.params.tol_density == 1e-3);
    CHECK(pf.algorithm == Algorithm::Alg2);
    CHECK(pf.problem.constraint.empty());
    CHECK(space_integral(pf.problem.rho0, g) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(space_integral(pf.problem.rho1, g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mass mismatch names both masses") {
    std::string text = kMinimal;
    text.replace(text.find("sigma=0.1)\n"), 11, "sigma=0.1, mass=2)\n");
    try {
        parse_problem(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("mass") != std::string::npos);
        CHECK(msg.find(" 2 ") != std::string::npos);
        CHECK(msg.find(" 1 ") != std::string::npos);
    }
    text.replace(text.find("[densities]"), 11, "[densities]\nrescale = true");
    ProblemFile pf = parse_problem(text);
    CHECK(space_integral(pf.problem.rho1, pf.problem.grid) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constraint sections") {
    ProblemFile ub = parse_problem(with_constraint("type = density_upper_bound\nrho_bar = constant(value=50)\n"));
    REQUIRE(ub.problem.constraint.terms.size() == 1);
    CHECK(std::holds_alternative<DensityUpperBound>(ub.problem.constraint.terms[0]));
    REQUIRE(ub.auxiliary.size() == 1);
    CHECK(ub.auxiliary[0].first == "rho_bar");

    ProblemFile pen = parse_problem(with_constraint("type = momentum_penalty\npsi = cone(center=[0.5,0.5], radius=0.2, amplitude=4)\n"));
    REQUIRE(pen.problem.constraint.terms.size() == 1);
    const auto& psi = std::get<MomentumQuadraticPenalty>(pen.problem.constraint.terms[0]).psi;
    CHECK(*std::max_element(psi.values.begin(), psi.values.end()) <= 4.0);

    ProblemFile none = parse_problem(with_constraint("type = none\n"));
    CHECK(none.problem.constraint.terms.size() == 1);

    // endpoint densities must respect hard constraints
    CHECK_THROWS_AS(parse_problem(with_constraint("type = density_upper_bound\nrho_bar = constant(value=0.1)\n")),
                    ValidationError);
    CHECK_THROWS_AS(parse_problem(with_constraint("type = bogus\n")), ParseError);
}

TEST_CASE("parse errors carry line and column") {
    auto expect_error = [](const std::string& text, int line, int column) {
        try {
            parse_problem(text, "case.cmot");
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            if (column > 0) CHECK(e.column() == column);
            CHECK(std::string(e.what()).rfind("case.cmot:" + std::to_string(line) + ":", 0) == 0);
        }
    };
    const std::string dens = "[densities]\nrho0 = 1\nrho1 = 1\n";
    const std::string grid = "[grid]\nnt = 9\nnx = 8\nny = 6\n";
    expect_error("[grid]\nnt = 9\nnx = 8\nny = x\n" + dens, 4, 6);
    expect_error("[grid]\nnt = 9\nnt = 8\nnx = 8\nny = 6\n" + dens, 3, 0);
    expect_error(grid + "foo = 1\n" + dens, 5, 0);
    expect_error(grid + "boundary = spherical\n" + dens, 5, 0);
    expect_error(grid + "[densities]\nrho0 = gaussian(center=[0.3,0.5] sigma=0.1)\nrho1 = 1\n", 6, 0);
    expect_error(grid + "[densities]\nrho0 = blob(radius=1)\nrho1 = 1\n", 6, 8);
    expect_error(grid + "[densities]\nrho0 = disk(center=[0.3,0.5], radius=0.2, colour=1)\nrho1 = 1\n", 6, 0);
    expect_error(grid + dens + "[solver]\nr = fast\n", 9, 5);
    expect_error("[grid\nnt = 9\n", 1, 0);
    expect_error("[mystery]\n", 1, 1);
}

TEST_CASE("field builders") {
    GridSpec g = GridSpec::make(3, 4, 2, SpaceBc::Neumann);
    SpaceField c = evaluate_field("constant(value=0.25) + 0.5 - 0.125", g);
    for (double v : c.values) CHECK(v == 0.625);

    SpaceField arr = evaluate_field("array(values=[1,2,3,4,5,6,7,8])", g);
    CHECK(arr(0, 1) == 2.0);
    CHECK(arr(1, 0) == 3.0);
    CHECK(arr(3, 1) == 8.0);
    CHECK_THROWS_AS(evaluate_field("array(values=[1,2,3])", g), ParseError);

    GridSpec h = GridSpec::make(3, 20, 20, SpaceBc::Periodic);
    SpaceField d = evaluate_field("disk(center=[0.5,0.5], radius=0.2, value=3, outside=1)", h);
    CHECK(d(10, 10) == 3.0);
    CHECK(d(0, 0) == 1.0);
    SpaceField ann = evaluate_field("annulus(center=[0.5,0.5], inner=0.1, outer=0.3, value=2)", h);
    CHECK(ann(10, 10) == 0.0);
    CHECK(ann(14, 10) == 2.0);
    CHECK(ann(0, 0) == 0.0);
    SpaceField bump = evaluate_field("bump(center=[0.5,0.5], radius=0.2, mass=0.3)", h);
    CHECK(space_integral(bump, h) == doctest::Approx(0.3).epsilon(1e-12));
    // a gaussian near the edge wraps around on a periodic grid
    SpaceField wrap = evaluate_field("gaussian(center=[0.025,0.5], sigma=0.05)", h);
    CHECK(wrap(0, 10) > wrap(1, 10));
    CHECK(wrap(19, 10) == doctest::Approx(wrap(1, 10)).epsilon(1e-12));
    SpaceField cone = evaluate_field("cone(center=[0.525,0.525], radius=0.1, amplitude=2)", h);
    CHECK(cone(10, 10) == doctest::Approx(2.0));
    CHECK(cone(0, 0) == 0.0);
}

TEST_CASE("multi-line values and comments") {
    const char* text = R"(
; a comment
[grid]
nt = 3     # trailing comment
nx = 2
ny = 2
boundary = neumann
[densities]
rho0 = array(values=[1, 2,
                     3, 4])
rho1 = array(
  values=[4, 3, 2, 1]
)
[solver]
algorithm = alg1
r = 2
max_outer = 17
[output]
snapshots = 3
history = no
)";
    ProblemFile pf = parse_problem(text);
    CHECK(pf.problem.rho0.values == std::vector<double>{1, 2, 3, 4});
    CHECK(pf.problem.rho1.values == std::vector<double>{4, 3, 2, 1});
    CHECK(pf.algorithm == Algorithm::Alg1);
    CHECK(pf.params.r == 2.0);
    CHECK(pf.params.max_outer == 17);
    CHECK(pf.outputs.snapshots == 3);
    CHECK_FALSE(pf.outputs.history);
}

TEST_CASE("shipped problem files load") {
    for (const char* name : {"identity", "translation", "bound", "bound_free", "penalty", "fixed_region"}) {
        INFO(name);
        ProblemFile pf = load_problem(fs::path(CMOT_PROBLEMS_DIR) / (std::string(name) + ".cmot"));
        CHECK(pf.problem.grid.nt >= 9);
    }
    CHECK_THROWS(load_problem("/nonexistent/problem.cmot"));
}

TEST_CASE("frame archive round trip") {
    std::mt19937_64 rng(71);
    fs::path dir = scratch_dir("frames");
    for (const GridSpec& g : {GridSpec::make(5, 4, 3, SpaceBc::Periodic), GridSpec::make(4, 6, 5, SpaceBc::Neumann, 2.0, 1.5)}) {
        Solution sol = random_solution(g, rng);
        SpaceField rho0(g, 0.5), rho1(g, 0.5);
        TransportProblem pb{g, rho0, rho1, {}};
        fs::path path = dir / "f.cmot";
        write_frames(sol, pb, path);
        FrameArchive a = read_frames(path);
        CHECK(a.grid == g);
        CHECK(a.iterations == 123u);
        CHECK(a.energy == sol.energy);
        REQUIRE(a.find("density"));
        CHECK(a.find("density")->time_count == static_cast<std::uint32_t>(g.nt));
        CHECK(a.find("density")->values == density_frames(sol.state.mu, rho0, rho1));
        REQUIRE(a.find("momentum_x"));
        CHECK(a.find("momentum_x")->time_count == static_cast<std::uint32_t>(g.nt - 1));
        CHECK(a.find("phi")->values == sol.state.phi.values);
        std::vector<double> mx(sol.state.mu.vector(0).begin(), sol.state.mu.vector(0).end());
        CHECK(a.find("momentum_x")->values == mx);

        // writing what was read reproduces the file byte for byte
        write_frames(a, dir / "g.cmot");
        CHECK(slurp(path) == slurp(dir / "g.cmot"));

        // header layout
        const std::string bytes = slurp(path);
        CHECK(bytes.substr(0, 8) == "CMOTFRM1");
        std::uint32_t hdr[5];
        std::memcpy(hdr, bytes.data() + 8, sizeof hdr);
        CHECK(hdr[0] == kFrameFormatVersion);
        CHECK(hdr[1] == static_cast<std::uint32_t>(g.nt));
        CHECK(hdr[2] == static_cast<std::uint32_t>(g.nx));
        CHECK(hdr[3] == static_cast<std::uint32_t>(g.ny));
        CHECK(hdr[4] == (g.space_bc == SpaceBc::Neumann ? 1u : 0u));
    }
}

TEST_CASE("corrupt frame files are rejected") {
    std::mt19937_64 rng(72);
    fs::path dir = scratch_dir("corrupt");
    GridSpec g = GridSpec::make(4, 3, 3, SpaceBc::Periodic);
    Solution sol = random_solution(g, rng);
    write_frames(sol, {g, SpaceField(g, 1.0), SpaceField(g, 1.0), {}}, dir / "ok.cmot");
    const std::string bytes = slurp(dir / "ok.cmot");
    for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
        std::ofstream(dir / "cut.cmot", std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(cut));
        CHECK_THROWS_AS(read_frames(dir / "cut.cmot"), FrameIoError);
    }
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(dir / "bad.cmot", std::ios::binary).write(bad.data(), static_cast<std::streamsize>(bad.size()));
    CHECK_THROWS_AS(read_frames(dir / "bad.cmot"), FrameIoError);
    std::string extra = bytes + "junk";
    std::ofstream(dir / "extra.cmot", std::ios::binary).write(extra.data(), static_cast<std::streamsize>(extra.size()));
    CHECK_THROWS_AS(read_frames(dir / "extra.cmot"), FrameIoError);
    CHECK_THROWS_AS(read_frames(dir / "missing.cmot"), FrameIoError);
}

TEST_CASE("grey levels of a hand-built 2x2 field") {
    // values at (x, y): (0,0)=0, (0,1)=1, (1,0)=2, (1,1)=4
    const double slice[4] = {0.0, 1.0, 2.0, 4.0};
    auto px = grey_levels(slice, 2, 2, 4.0);
    // top row is y = 1
    CHECK(px == std::vector<std::uint8_t>{64, 255, 0, 128});
    auto black = grey_levels(slice, 2, 2, 0.0);
    CHECK(black == std::vector<std::uint8_t>{0, 0, 0, 0});
    const double neg[4] = {-1.0, 0.5, 0.25, 1.0};
    CHECK(grey_levels(neg, 2, 2, 1.0) == std::vector<std::uint8_t>{128, 255, 0, 64});
}

TEST_CASE("snapshot indices") {
    CHECK(snapshot_indices(17, 2) == std::vector<int>{0, 16});
    CHECK(snapshot_indices(17, 5) == std::vector<int>{0, 4, 8, 12, 16});
    CHECK(snapshot_indices(4, 3) == std::vector<int>{0, 2, 3});
    CHECK_THROWS(snapshot_indices(17, 1));
}

TEST_CASE("heatmap files") {
    fs::path dir = scratch_dir("heatmaps");
    GridSpec g = GridSpec::make(5, 3, 2, SpaceBc::Periodic);
    FrameArchive a;
    a.grid = g;
    FrameField d{"density", static_cast<std::uint32_t>(g.nt), std::vector<double>(g.node_count(), 0.7)};
    a.fields.push_back(d);
    auto written = write_heatmaps(a, dir, 4, {{"rho_bar", SpaceField(g, 2.0)}});
    REQUIRE(written.size() == 5);
    for (int k = 0; k < 4; ++k) {
        const std::string bytes = slurp(written[k]);
        const std::string header = "P5\n3 2\n255\n";
        REQUIRE(bytes.size() == header.size() + 6);
        CHECK(bytes.substr(0, header.size()) == header);
        // a constant density is one uniform grey level
        for (std::size_t n = header.size(); n < bytes.size(); ++n) CHECK(static_cast<unsigned char>(bytes[n]) == 255);
    }
    CHECK(written[4].filename() == "rho_bar.pgm");

    // two snapshots are exactly the end frames
    FrameArchive ramp = a;
    for (int i = 0; i < g.nt; ++i)
        for (std::size_t n = 0; n < g.plane(); ++n) ramp.fields[0].values[i * g.plane() + n] = i;
    fs::path d2 = scratch_dir("heatmaps2");
    auto two = write_heatmaps(ramp, d2, 2);
    REQUIRE(two.size() == 2);
    const std::string first = slurp(two[0]), last = slurp(two[1]);
    CHECK(static_cast<unsigned char>(first.back()) == 0);
    CHECK(static_cast<unsigned char>(last.back()) == 255);
    CHECK(std::distance(fs::directory_iterator(d2), fs::directory_iterator{}) == 2);
}

TEST_CASE("history csv") {
    std::vector<IterationRecord> hist(3);
    for (int i = 0; i < 3; ++i) {
        hist[i].iteration = i + 1;
        hist[i].energy = 0.1 / (i + 1);
        hist[i].res_Bphi_q = std::numbers::pi * i;
        hist[i].rel_continuity = 1.0 / 3.0;
    }
    std::ostringstream os;
    write_history_csv(hist, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == static_cast<long>(history_columns().size()));
    CHECK(line.rfind("iteration,energy,", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == history_columns().size());
        CHECK(std::stoi(cells[0]) == hist[rows].iteration);
        CHECK(std::stod(cells[1]) == hist[rows].energy);
        CHECK(std::stod(cells[6]) == hist[rows].res_Bphi_q);
        CHECK(std::stod(cells[16]) == hist[rows].rel_continuity);
        ++rows;
    }
    CHECK(rows == 3);
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
