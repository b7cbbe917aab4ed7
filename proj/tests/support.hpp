#pragma once

// shared builders for the test binaries: small random counting-process
// datasets with controllable ties and time variation, independent of the
// production simulation module

#include <cmath>
#include <string>
#include <vector>

#include "core/data.hpp"
#include "core/philox.hpp"

namespace rmdur_test {

struct random_design {
  int n = 30;
  int p = 2;
  bool time_varying = false;
  bool with_ties = false;
  bool with_retirement = false;  // fill the z side too
};

// promotion-side (and optionally retirement-side) observations with random
// staggered entry, mixed events and censorings, and optional segment breaks
inline rmdur::dataset make_random_dataset(uint64_t seed, const random_design& d) {
  using namespace rmdur;
  dataset ds;
  for (int j = 0; j < d.p; ++j) ds.x_names.push_back("x" + std::to_string(j + 1));
  ds.z_names = ds.x_names;
  ds.protected_column = "x1";
  ds.window = {0.0, 3.0};
  ds.has_window = true;

  philox_stream g(seed, 0x7e57u, 0);
  auto draw_time = [&](double lo, double hi) {
    double t = lo + (hi - lo) * g.u01();
    if (d.with_ties) t = std::ceil(t * 8.0) / 8.0;  // coarse grid forces exact ties
    return t;
  };

  for (int i = 0; i < d.n; ++i) {
    subject_record s;
    s.id = "t" + std::to_string(i + 1);
    process_observation obs;
    obs.entry = d.with_ties ? draw_time(0.0, 0.5) : 0.5 * g.u01();
    double len = 0.1 + draw_time(0.0, 2.0);
    obs.exit = obs.entry + len;
    obs.event = g.u01() < 0.7;
    s.promotion = obs;

    covariate_trajectory tr;
    tr.dim = d.p;
    int nseg = d.time_varying ? 1 + int(g.u01() * 3.0) : 1;
    double start = obs.entry;
    for (int k = 0; k < nseg; ++k) {
      tr.start.push_back(start);
      for (int j = 0; j < d.p; ++j)
        tr.values.push_back(j == 0 ? (g.u01() < 0.5 ? 0.0 : 1.0) : g.normal());
      start += 0.05 + 0.5 * g.u01();
    }
    s.x = tr;

    if (d.with_retirement) {
      process_observation r;
      r.entry = obs.entry + 0.25 * g.u01();
      r.exit = r.entry + 0.1 + draw_time(0.0, 1.5);
      r.event = g.u01() < 0.6;
      s.retirement = r;
      // keep the promotion observation consistent with a terminal retirement
      if (r.event && s.promotion->exit > r.exit) {
        s.promotion->exit = r.exit;
        s.promotion->event = false;
      }
      // z reuses the x path; its first segment already starts at the earlier
      // promotion entry, so retirement entry is covered
      s.z = tr;
    }
    ds.subjects.push_back(std::move(s));
  }
  return ds;
}

}  // namespace rmdur_test
