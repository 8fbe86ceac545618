#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmot/solver.hpp"

namespace cmot {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& origin, int line, int column, const std::string& message);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    std::string dir = "cmot_out";
    bool frames = true;
    bool images = true;
    bool history = true;
    int snapshots = 5;
};

struct ProblemFile {
    TransportProblem problem;
    SolverParams params;
    Algorithm algorithm = Algorithm::Alg2;
    OutputSpec outputs;
    // Constraint fields worth imaging next to the density (rho_bar, psi, ...).
    std::vector<std::pair<std::string, SpaceField>> auxiliary;
};

// Parses and validates a problem description. origin names the source in
// error messages.
ProblemFile parse_problem(std::string_view text, const std::string& origin = "<input>");
ProblemFile load_problem(const std::filesystem::path& path);

// Evaluates a field expression such as
//   gaussian(center=[0.3,0.5], sigma=0.1, mass=1) + constant(value=0.01)
// on the grid's cell centres.
SpaceField evaluate_field(std::string_view expr, const GridSpec& grid);

// Checks the mass balance, signs and endpoint feasibility. With rescale set,
// rho1 is scaled to the mass of rho0 instead of failing the balance check.
void validate_problem(TransportProblem& problem, bool rescale);

}  // namespace cmot
