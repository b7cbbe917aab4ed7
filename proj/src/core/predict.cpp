#include "core/predict.hpp"

#include <cmath>
#include <sstream>

#include "core/numeric.hpp"
#include "core/parallel.hpp"
#include "core/variance.hpp"

namespace rmdur {

double lp_rate(const std::vector<double>& beta, const covariate_trajectory& tr, int col,
               double val, double t) {
  const double* x = tr.at(t);
  double eta = 0.0;
  for (size_t j = 0; j < beta.size(); ++j) eta += beta[j] * (int(j) == col ? val : x[j]);
  return std::exp(eta);
}

step_curve survival_curve(const cox_fit& f, const covariate_trajectory& tr, int col, double val,
                          double entry, double horizon) {
  step_curve s;
  s.v0 = 1.0;
  kahan cum;
  for (size_t k = 0; k < f.time.size(); ++k) {
    const double u = f.time[k];
    if (!(u > entry && u <= horizon)) continue;
    cum.add(f.jump[k] * lp_rate(f.beta, tr, col, val, u));
    s.t.push_back(u);
    s.v.push_back(std::exp(-cum.sum()));
  }
  return s;
}

target_curves build_target_curves(const cox_fit& fp, const cox_fit& fr, const target_spec& t,
                                  const restriction_window& w) {
  if (!(w.tau0 < w.tau1)) throw domain_error("restriction window is empty");
  if (t.p1 >= w.tau1)
    throw domain_error("subject enters the promotion process at or after the window end");
  if (!t.x || !t.x->covers(t.p1))
    throw domain_error("promotion trajectory does not cover the subject's entry");

  target_curves tc;
  tc.p1 = t.p1;
  tc.tau1 = w.tau1;
  tc.a = std::max(w.tau0, t.p1);
  tc.has_r = t.r1.has_value() && *t.r1 < w.tau1;
  tc.r1 = tc.has_r ? *t.r1 : w.tau1;
  tc.SP = survival_curve(fp, *t.x, t.xcol, t.xval, t.p1, w.tau1);
  if (tc.has_r) {
    if (!t.z || !t.z->covers(*t.r1))
      throw domain_error("retirement trajectory does not cover the subject's eligibility time");
    tc.SR = survival_curve(fr, *t.z, t.zcol, t.zval, *t.r1, w.tau1);
  } else {
    tc.SR = step_curve{};  // identically 1
  }
  tc.grid = merge_grid(tc.a, tc.tau1, {&tc.SP.t, &tc.SR.t});
  tc.sp.resize(tc.grid.size());
  tc.sr.resize(tc.grid.size());
  for (size_t j = 0; j < tc.grid.size(); ++j) {
    tc.sp[j] = tc.SP(tc.grid[j]);
    tc.sr[j] = tc.SR(tc.grid[j]);
  }
  return tc;
}

mean_result restricted_means(const target_curves& tc) {
  mean_result m;
  kahan lt, cap, rt;
  for (size_t j = 0; j + 1 < tc.grid.size(); ++j) {
    const double dt = tc.grid[j + 1] - tc.grid[j];
    lt.add(tc.sp[j] * tc.sr[j] * dt);
    cap.add((1.0 - tc.sp[j]) * tc.sr[j] * dt);
    rt.add((1.0 - tc.sr[j]) * dt);
  }
  m.lt = lt.sum();
  m.cap = cap.sum();
  m.rt = rt.sum();
  return m;
}

namespace {

target_spec spec_for(const subject_record& s, int xcol, double xval, int zcol, double zval) {
  target_spec t;
  t.x = &s.x;
  t.xcol = xcol;
  t.xval = xval;
  t.z = &s.z;
  t.zcol = zcol;
  t.zval = zval;
  t.p1 = s.promotion->entry;
  if (s.retirement) t.r1 = s.retirement->entry;
  return t;
}

}  // namespace

prediction_output run_prediction(const dataset& ds, const counting_view& vp,
                                 const counting_view& vr, const cox_fit& fp, const cox_fit& fr,
                                 const restriction_window& w, const policy& pol, int threads) {
  const std::string col = pol.column.empty() ? ds.protected_column : pol.column;
  const int xcol = dataset::column_index(ds.x_names, col);
  const int zcol = dataset::column_index(ds.z_names, col);
  if (!col.empty() && xcol < 0 && zcol < 0)
    throw domain_error("policy column '" + col + "' is not a model covariate");

  std::vector<int> targets;
  for (int i = 0; i < ds.n(); ++i)
    if (ds.subjects[i].promotion) targets.push_back(i);

  std::vector<prediction_row> rows(targets.size());
  std::vector<std::string> curve_parts(targets.size());

  parallel_for(int(targets.size()), threads, [&](int ti) {
    const auto& s = ds.subjects[targets[ti]];
    target_spec t = spec_for(s, xcol, pol.value, zcol, pol.value);
    target_curves tc = build_target_curves(fp, fr, t, w);
    prediction_row r;
    r.id = s.id;
    r.mean = restricted_means(tc);
    influence_result inf = influence(t, tc, ds.n(), vp, fp, vr, fr);
    r.se = inf.se;
    rows[ti] = std::move(r);

    std::ostringstream os;
    for (size_t j = 0; j < tc.grid.size(); ++j) {
      os << s.id << ',' << format_double(tc.grid[j]) << ',' << format_double(tc.sp[j] * tc.sr[j])
         << ',' << format_double((1.0 - tc.sp[j]) * tc.sr[j]) << ','
         << format_double(1.0 - tc.sr[j]) << '\n';
    }
    curve_parts[ti] = os.str();
  });

  prediction_output out;
  out.rows = std::move(rows);
  std::string curves = "subject_id,time,p_lt,p_cap,p_rt\n";
  for (auto& part : curve_parts) curves += part;
  out.curves_csv = std::move(curves);
  return out;
}

std::string means_csv(const std::vector<prediction_row>& rows) {
  std::string out = "subject_id,E_lt,se_lt,E_cap,se_cap,E_rt,se_rt\n";
  for (const auto& r : rows) {
    out += r.id;
    for (double v : {r.mean.lt, r.se.lt, r.mean.cap, r.se.cap, r.mean.rt, r.se.rt})
      out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

}  // namespace rmdur
