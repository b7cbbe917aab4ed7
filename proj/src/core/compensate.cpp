#include "core/compensate.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "core/csvio.hpp"
#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "json.hpp"

namespace rmdur {

using nlohmann::ordered_json;

static double jnum(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_double(v.get<std::string>());
  throw parse_error(std::string("schedule field must be a number: ") + key);
}

pay_schedule parse_schedule(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw parse_error(std::string("schedule json: ") + e.what());
  }
  pay_schedule s;
  if (j.contains("days_per_month")) s.days_per_month = jnum(j, "days_per_month");
  if (!(s.days_per_month > 0)) throw validation_error("days_per_month must be positive");
  if (j.contains("segments")) {
    s.piecewise = true;
    for (const auto& e : j["segments"]) {
      pay_segment g;
      g.start = jnum(e, "start");
      g.end = e.contains("end") ? jnum(e, "end") : std::numeric_limits<double>::infinity();
      g.lieutenant = jnum(e, "lieutenant");
      g.captain = jnum(e, "captain");
      g.pension = jnum(e, "pension");
      if (!(g.end > g.start)) throw validation_error("schedule segment end must exceed start");
      if (!s.segments.empty() && g.start < s.segments.back().end)
        throw validation_error("schedule segments must be ordered and non-overlapping");
      s.segments.push_back(g);
    }
    if (s.segments.empty()) throw validation_error("schedule segments array is empty");
  } else {
    s.lieutenant = jnum(j, "lieutenant");
    s.captain = jnum(j, "captain");
    s.pension = jnum(j, "pension");
  }
  return s;
}

// shared csv walk: header check then field conversion per row
static void for_each_row(const std::string& text, const std::string& header, const char* what,
                         const std::function<void(const std::vector<std::string>&)>& take) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw parse_error(std::string(what) + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw parse_error(std::string(what) + ": expected header '" + header + "', got '" + line + "'");
  const size_t nf = split_csv_line(header).size();
  size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != nf)
      throw parse_error(std::string(what) + " line " + std::to_string(ln) + ": wrong field count");
    take(f);
  }
}

std::vector<means_row> parse_means_csv(const std::string& text) {
  std::vector<means_row> out;
  for_each_row(text, "subject_id,E_lt,se_lt,E_cap,se_cap,E_rt,se_rt", "means csv",
               [&](const std::vector<std::string>& f) {
                 out.push_back({f[0], parse_double(f[1]), parse_double(f[3]), parse_double(f[5])});
               });
  return out;
}

std::vector<subject_curve> parse_curves_csv(const std::string& text) {
  std::vector<subject_curve> out;
  for_each_row(text, "subject_id,time,p_lt,p_cap,p_rt", "curves csv",
               [&](const std::vector<std::string>& f) {
                 if (out.empty() || out.back().id != f[0]) out.push_back({f[0], {}});
                 out.back().pts.push_back({parse_double(f[1]), parse_double(f[2]),
                                           parse_double(f[3]), parse_double(f[4])});
               });
  for (const auto& s : out)
    for (size_t i = 1; i < s.pts.size(); ++i)
      if (!(s.pts[i].t > s.pts[i - 1].t))
        throw validation_error("curve times for subject " + s.id + " are not increasing");
  return out;
}

std::vector<earnings_row> parse_earnings_csv(const std::string& text) {
  std::vector<earnings_row> out;
  for_each_row(text, "subject_id,actual", "earnings csv", [&](const std::vector<std::string>& f) {
    out.push_back({f[0], parse_double(f[1])});
  });
  return out;
}

// occupancy curves are step functions holding each row's value until the next
// time, so pay integrates exactly: sum over curve-cell/segment overlaps
static void piecewise_pay(const subject_curve& c, const pay_schedule& s, double& lt, double& cap,
                          double& pen) {
  kahan alt, acap, apen;
  for (size_t i = 0; i + 1 < c.pts.size(); ++i) {
    const double t0 = c.pts[i].t, t1 = c.pts[i + 1].t;
    for (const auto& g : s.segments) {
      const double lo = std::max(t0, g.start), hi = std::min(t1, g.end);
      if (hi <= lo) continue;
      const double len = hi - lo;
      alt.add(len * g.lieutenant * c.pts[i].lt);
      acap.add(len * g.captain * c.pts[i].cap);
      apen.add(len * g.pension * c.pts[i].rt);
    }
  }
  lt = alt.sum() / s.days_per_month;
  cap = acap.sum() / s.days_per_month;
  pen = apen.sum() / s.days_per_month;
}

std::string compute_damages(const pay_schedule& sch, const std::vector<means_row>& means,
                            const std::vector<subject_curve>& curves,
                            const std::vector<earnings_row>& earnings) {
  std::unordered_map<std::string, double> actual;
  for (const auto& e : earnings) {
    if (!actual.emplace(e.id, e.actual).second)
      throw validation_error("duplicate earnings row for subject " + e.id);
  }
  auto lookup = [&](const std::string& id) {
    auto it = actual.find(id);
    if (it == actual.end()) throw validation_error("no earnings row for subject " + id);
    return it->second;
  };

  std::string out =
      "subject_id,expected_lt_pay,expected_cap_pay,expected_pension,expected_total,actual,"
      "damages\n";
  auto emit = [&](const std::string& id, double plt, double pcap, double ppen) {
    const double total = plt + pcap + ppen;
    const double act = lookup(id);
    out += id + ',' + format_double(plt) + ',' + format_double(pcap) + ',' + format_double(ppen) +
           ',' + format_double(total) + ',' + format_double(act) + ',' +
           format_double(total - act) + '\n';
  };

  if (sch.piecewise) {
    if (curves.empty())
      throw validation_error("piecewise schedule needs the occupancy curves, not just the means");
    for (const auto& c : curves) {
      double plt, pcap, ppen;
      piecewise_pay(c, sch, plt, pcap, ppen);
      emit(c.id, plt, pcap, ppen);
    }
  } else {
    if (means.empty()) throw validation_error("no prediction rows to price");
    for (const auto& m : means)
      emit(m.id, m.lt / sch.days_per_month * sch.lieutenant,
           m.cap / sch.days_per_month * sch.captain, m.rt / sch.days_per_month * sch.pension);
  }
  return out;
}

}  // namespace rmdur
