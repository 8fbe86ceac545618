#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cmot/diagnostics.hpp"

namespace cmot {

// Column names in output order; one per IterationRecord field.
const std::vector<std::string>& history_columns();

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

void write_history_csv(const std::vector<IterationRecord>& history, std::ostream& out);
void write_history_csv(const std::vector<IterationRecord>& history, const std::filesystem::path& path);

}  // namespace cmot
