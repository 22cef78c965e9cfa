#pragma once
#include <string>
#include <vector>

#include "optpart/fucik.hpp"
#include "optpart/monotonicity.hpp"

namespace optpart {

// 17 significant digits, '.' decimal point, no locale surprises: values
// round-trip through the CSV exactly.
std::string format_g17(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_curve_csv(const std::string& path, const FucikCurve& curve);
void write_partition_csv(const std::string& path, const Grid& g, const PartitionResult& part);
void write_phi_csv(const std::string& path, const PhiSeries& series, const MonotoneReport& rep);
void write_beta_csv(const std::string& path, const BetaReport& rep);

}  // namespace optpart
