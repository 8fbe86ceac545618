#include "cmot/history.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace cmot {

const std::vector<std::string>& history_columns() {
    static const std::vector<std::string> cols = {
        "iteration",   "energy",          "res_Bphi_p",   "res_b_q",     "res_mu_nu",
        "res_mu_eta",  "res_Bphi_q",      "continuity_residual",         "density_change",
        "density_change_rel",             "mass_per_slice_max_dev",      "rel_Bphi_p",
        "rel_b_q",     "rel_mu_nu",       "rel_mu_eta",   "rel_Bphi_q",  "rel_continuity",
    };
    return cols;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void write_history_csv(const std::vector<IterationRecord>& history, std::ostream& out) {
    const auto& cols = history_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    for (const auto& r : history) {
        out << r.iteration;
        for (double v : {r.energy, r.res_Bphi_p, r.res_b_q, r.res_mu_nu, r.res_mu_eta, r.res_Bphi_q,
                         r.continuity_residual, r.density_change, r.density_change_rel, r.mass_per_slice_max_dev,
                         r.rel_Bphi_p, r.rel_b_q, r.rel_mu_nu, r.rel_mu_eta, r.rel_Bphi_q, r.rel_continuity})
            out << ',' << format_double(v);
        out << '\n';
    }
}

void write_history_csv(const std::vector<IterationRecord>& history, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_history_csv(history, out);
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace cmot
