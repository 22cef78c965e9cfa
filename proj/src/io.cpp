#include "optpart/io.hpp"

#include <cstdio>
#include <fstream>

#include "optpart/check.hpp"

namespace optpart {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    ensure(out.good(), "write_csv: cannot open " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        ensure(row.size() == header.size(), "write_csv: row width mismatch in " + path);
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
    ensure(out.good(), "write_csv: write failed for " + path);
}

void write_curve_csv(const std::string& path, const FucikCurve& curve) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : curve.samples)
        rows.push_back({format_g17(p.r), format_g17(p.lambda), format_g17(p.mu), format_g17(p.c),
                        format_g17(p.balance_gap), format_g17(p.pde_residual),
                        std::to_string(p.outer_iterations), p.converged ? "1" : "0"});
    write_csv(path, {"r", "lambda", "mu", "c", "balance_gap", "pde_residual", "outer_iterations",
                     "converged"},
              rows);
}

void write_partition_csv(const std::string& path, const Grid& g, const PartitionResult& part) {
    std::vector<std::vector<std::string>> rows;
    for (int id = 0; id < g.num_points(); ++id) {
        const auto ij = g.coords(id);
        int comp = -1;
        double val = 0.0;
        for (std::size_t i = 0; i < part.masks.size(); ++i)
            if (part.masks[i].on[id]) {
                comp = static_cast<int>(i);
                val = part.fields[i].values[id];
            }
        rows.push_back({std::to_string(ij[0]), std::to_string(ij[1]), format_g17(g.x(ij[0])),
                        format_g17(g.dim == 2 ? g.y(ij[1]) : 0.0), std::to_string(comp),
                        format_g17(val)});
    }
    write_csv(path, {"i", "j", "x", "y", "component", "value"}, rows);
}

void write_phi_csv(const std::string& path, const PhiSeries& series, const MonotoneReport& rep) {
    const std::string label = rep.constant      ? "constant"
                              : rep.monotone    ? "nondecreasing"
                                                : "decreasing";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < series.radii.size(); ++j) {
        double slope = 0.0;
        if (j + 1 < series.radii.size())
            slope = (series.values[j + 1] - series.values[j]) /
                    (series.radii[j + 1] - series.radii[j]);
        rows.push_back({format_g17(series.radii[j]), format_g17(series.values[j]),
                        format_g17(slope), label});
    }
    write_csv(path, {"radius", "phi", "slope", "classification"}, rows);
}

void write_beta_csv(const std::string& path, const BetaReport& rep) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < rep.values.size(); ++i)
        rows.push_back({std::to_string(i + 2), format_g17(rep.values[i])});
    write_csv(path, {"k", "beta"}, rows);
}

}  // namespace optpart
