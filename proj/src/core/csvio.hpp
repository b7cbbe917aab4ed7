#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/data.hpp"

namespace rmdur {

std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& content);
std::vector<std::string> split_csv_line(const std::string& line);

// days since 1970-01-01 for a proleptic Gregorian date
int64_t days_from_civil(int y, unsigned m, unsigned d);
// inverse of days_from_civil, formatted YYYY-MM-DD
std::string civil_from_days(int64_t z);

// time field: a plain real, or an ISO date converted to days since the epoch
// (only when an epoch is configured)
double parse_time(const std::string& field, bool has_epoch, int64_t epoch_days);

// long-format CSV (one row per subject/process/segment) plus a JSON sidecar
// naming the protected column, the restriction window, and optionally an
// epoch date and per-process covariate subsets; both arguments are paths
dataset load_dataset(const std::string& data_csv_path, const std::string& sidecar_json_path);

}  // namespace rmdur
