#include "core/data.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace rmdur {

namespace {

void check_trajectory(const covariate_trajectory& tr, int want_dim, const process_observation& obs,
                      const std::string& id, const char* label, std::vector<std::string>& out) {
  std::ostringstream os;
  if (tr.dim != want_dim) {
    os << id << ": " << label << " trajectory has " << tr.dim << " columns, expected " << want_dim;
    out.push_back(os.str());
    return;
  }
  if (tr.start.empty()) {
    out.push_back(id + ": " + label + " trajectory is empty");
    return;
  }
  for (size_t s = 0; s + 1 < tr.start.size(); ++s)
    if (!(tr.start[s] < tr.start[s + 1])) {
      out.push_back(id + ": " + label + " segment starts are not strictly increasing");
      return;
    }
  if (tr.values.size() != tr.start.size() * size_t(tr.dim)) {
    out.push_back(id + ": " + label + " trajectory value count does not match segments");
    return;
  }
  for (double v : tr.values)
    if (!std::isfinite(v)) {
      out.push_back(id + ": " + label + " trajectory has a non-finite value");
      return;
    }
  if (tr.start.front() > obs.entry) {
    os << id << ": " << label << " trajectory starts at " << tr.start.front()
       << ", after the observation entry " << obs.entry;
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> validate_dataset(const dataset& ds) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  int p_events = 0, r_events = 0;

  for (const auto& s : ds.subjects) {
    if (s.id.empty()) out.push_back("(unnamed): empty subject id");
    if (!seen.insert(s.id).second) out.push_back(s.id + ": duplicate subject id");

    for (const char* label : {"promotion", "retirement"}) {
      bool promo = label[0] == 'p';
      const auto& obs = promo ? s.promotion : s.retirement;
      if (!obs) continue;
      if (!std::isfinite(obs->entry) || !std::isfinite(obs->exit))
        out.push_back(s.id + ": non-finite " + label + " time");
      else if (obs->entry > obs->exit)
        out.push_back(s.id + ": " + label + " entry after exit");
      else if (obs->event && obs->entry == obs->exit)
        out.push_back(s.id + ": " + label + " event with an empty risk interval");
      if (promo)
        p_events += obs->event;
      else
        r_events += obs->event;
    }
    // a retirement event ends the promotion observation too
    if (s.promotion && s.retirement && s.retirement->event &&
        s.promotion->exit > s.retirement->exit)
      out.push_back(s.id + ": promotion observed past the retirement event");
    if (s.promotion)
      check_trajectory(s.x, int(ds.x_names.size()), *s.promotion, s.id, "promotion", out);
    if (s.retirement)
      check_trajectory(s.z, int(ds.z_names.size()), *s.retirement, s.id, "retirement", out);
  }

  if (!ds.protected_column.empty()) {
    if (ds.x_protected() < 0)
      out.push_back("protected column '" + ds.protected_column + "' not among promotion covariates");
    if (ds.z_protected() < 0)
      out.push_back("protected column '" + ds.protected_column + "' not among retirement covariates");
  }
  if (ds.has_window && !(ds.window.tau0 < ds.window.tau1))
    out.push_back("restriction window is empty (tau0 >= tau1)");
  if (p_events == 0) out.push_back("no promotion events in the dataset");
  if (r_events == 0) out.push_back("no retirement events in the dataset");
  return out;
}

void require_valid(const dataset& ds) {
  auto diags = validate_dataset(ds);
  if (diags.empty()) return;
  std::string msg = "invalid dataset:";
  size_t show = std::min<size_t>(diags.size(), 5);
  for (size_t i = 0; i < show; ++i) msg += "\n  " + diags[i];
  if (diags.size() > show)
    msg += "\n  ... and " + std::to_string(diags.size() - show) + " more";
  throw validation_error(msg);
}

}  // namespace rmdur
