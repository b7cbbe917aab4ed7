#include "core/csvio.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/numeric.hpp"

namespace rmdur {

using nlohmann::json;

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << content;
  if (!out) throw io_error("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = unsigned(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return int64_t(era) * 146097 + int64_t(doe) - 719468;
}

std::string civil_from_days(int64_t z) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = unsigned(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = int64_t(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", (long long)(y + (m <= 2)), m, d);
  return buf;
}

namespace {

bool looks_like_date(const std::string& s, int& y, unsigned& m, unsigned& d) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit((unsigned char)s[i])) return false;
  y = std::stoi(s.substr(0, 4));
  m = unsigned(std::stoi(s.substr(5, 2)));
  d = unsigned(std::stoi(s.substr(8, 2)));
  return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

}  // namespace

double parse_time(const std::string& field, bool has_epoch, int64_t epoch_days) {
  int y;
  unsigned m, d;
  if (looks_like_date(field, y, m, d)) {
    if (!has_epoch)
      throw parse_error("date '" + field + "' in a time field but no epoch configured");
    return double(days_from_civil(y, m, d) - epoch_days);
  }
  return parse_double(field);
}

namespace {

double json_time(const json& v, bool has_epoch, int64_t epoch_days, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_time(v.get<std::string>(), has_epoch, epoch_days);
  throw parse_error(std::string("sidecar: ") + what + " must be a number or a date");
}

struct group_obs {
  process_observation obs;
  covariate_trajectory traj;
  bool seen = false;
};

}  // namespace

dataset load_dataset(const std::string& data_csv, const std::string& sidecar_json) {
  dataset ds;
  bool has_epoch = false;
  int64_t epoch_days = 0;
  std::vector<std::string> promo_cols, retire_cols;

  json sc;
  try {
    sc = json::parse(slurp_file(sidecar_json));
  } catch (const json::exception& e) {
    throw parse_error("sidecar JSON: " + std::string(e.what()));
  }
  if (sc.contains("epoch")) {
    int y;
    unsigned m, d;
    std::string ep = sc["epoch"].get<std::string>();
    if (!looks_like_date(ep, y, m, d)) throw parse_error("sidecar: bad epoch date '" + ep + "'");
    has_epoch = true;
    epoch_days = days_from_civil(y, m, d);
  }
  if (sc.contains("protected_column")) ds.protected_column = sc["protected_column"].get<std::string>();
  if (sc.contains("window")) {
    ds.window.tau0 = json_time(sc["window"].at("tau0"), has_epoch, epoch_days, "window.tau0");
    ds.window.tau1 = json_time(sc["window"].at("tau1"), has_epoch, epoch_days, "window.tau1");
    ds.has_window = true;
  }
  if (sc.contains("promotion_covariates"))
    promo_cols = sc["promotion_covariates"].get<std::vector<std::string>>();
  if (sc.contains("retirement_covariates"))
    retire_cols = sc["retirement_covariates"].get<std::vector<std::string>>();

  std::istringstream in(slurp_file(data_csv));
  std::string line;
  if (!std::getline(in, line)) throw parse_error(data_csv + ": empty file");
  auto header = split_csv_line(line);
  const std::vector<std::string> fixed = {"subject_id", "process", "entry",
                                          "exit",       "event",   "segment_start"};
  if (header.size() < fixed.size())
    throw parse_error(data_csv + ": header is missing required columns");
  for (size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      throw parse_error(data_csv + ": header column " + std::to_string(i + 1) + " must be '" +
                        fixed[i] + "', got '" + header[i] + "'");
  std::vector<std::string> cov_names(header.begin() + fixed.size(), header.end());
  if (cov_names.empty()) throw parse_error(data_csv + ": no covariate columns");

  if (promo_cols.empty()) promo_cols = cov_names;
  if (retire_cols.empty()) retire_cols = cov_names;
  auto col_of = [&](const std::string& c) {
    int j = dataset::column_index(cov_names, c);
    if (j < 0) throw parse_error("sidecar names covariate '" + c + "' not present in " + data_csv);
    return j;
  };
  std::vector<int> promo_idx, retire_idx;
  for (const auto& c : promo_cols) promo_idx.push_back(col_of(c));
  for (const auto& c : retire_cols) retire_idx.push_back(col_of(c));
  ds.x_names = promo_cols;
  ds.z_names = retire_cols;

  // rows grouped by (subject, process); first-appearance order kept
  std::vector<std::string> order;
  std::map<std::string, std::array<group_obs, 2>> groups;

  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw parse_error(data_csv + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    const std::string& id = f[0];
    int pi;
    if (f[1] == "P")
      pi = 0;
    else if (f[1] == "R")
      pi = 1;
    else
      throw parse_error(data_csv + ":" + std::to_string(lineno) + ": process must be P or R");

    process_observation obs;
    obs.entry = parse_time(f[2], has_epoch, epoch_days);
    obs.exit = parse_time(f[3], has_epoch, epoch_days);
    if (f[4] == "0")
      obs.event = false;
    else if (f[4] == "1")
      obs.event = true;
    else
      throw parse_error(data_csv + ":" + std::to_string(lineno) + ": event must be 0 or 1");
    double seg_start = parse_time(f[5], has_epoch, epoch_days);

    auto it = groups.find(id);
    if (it == groups.end()) {
      order.push_back(id);
      it = groups.emplace(id, std::array<group_obs, 2>{}).first;
    }
    group_obs& g = it->second[pi];
    if (!g.seen) {
      g.seen = true;
      g.obs = obs;
      g.traj.dim = int(pi == 0 ? promo_idx.size() : retire_idx.size());
    } else if (g.obs.entry != obs.entry || g.obs.exit != obs.exit || g.obs.event != obs.event) {
      throw parse_error(data_csv + ":" + std::to_string(lineno) + ": " + id +
                        ": entry/exit/event differ across segment rows");
    }
    if (!g.traj.start.empty() && !(seg_start > g.traj.start.back()))
      throw parse_error(data_csv + ":" + std::to_string(lineno) + ": " + id +
                        ": segment_start not strictly increasing");
    g.traj.start.push_back(seg_start);
    const auto& idx = pi == 0 ? promo_idx : retire_idx;
    for (int j : idx) g.traj.values.push_back(parse_double(f[size_t(6 + j)]));
  }

  for (const auto& id : order) {
    auto& pair = groups[id];
    subject_record rec;
    rec.id = id;
    if (pair[0].seen) {
      rec.promotion = pair[0].obs;
      rec.x = std::move(pair[0].traj);
    }
    if (pair[1].seen) {
      rec.retirement = pair[1].obs;
      rec.z = std::move(pair[1].traj);
    }
    ds.subjects.push_back(std::move(rec));
  }
  if (ds.subjects.empty()) throw parse_error(data_csv + ": no data rows");
  return ds;
}

}  // namespace rmdur
