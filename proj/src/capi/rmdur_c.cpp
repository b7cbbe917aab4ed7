#include "rmdur.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/compensate.hpp"
#include "core/cox.hpp"
#include "core/csvio.hpp"
#include "core/errors.hpp"
#include "core/model_io.hpp"
#include "core/predict.hpp"
#include "core/sim.hpp"

using namespace rmdur;

struct rmdur_dataset {
  dataset ds;
};
struct rmdur_model {
  model_artifact m;
};
struct rmdur_prediction {
  prediction_output out;
};
struct rmdur_simreport {
  sim_report r;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
  if (!p) return nullptr;
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// map the C++ error taxonomy onto status codes; anything unanticipated is
// internal rather than a crash across the C boundary
template <class F>
rmdur_status guarded(F&& f) {
  try {
    f();
    return RMDUR_OK;
  } catch (const io_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_IO;
  } catch (const parse_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_PARSE;
  } catch (const validation_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_VALIDATION;
  } catch (const nonconvergence_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_NONCONVERGENCE;
  } catch (const singular_hessian_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_SINGULAR;
  } catch (const monotone_likelihood_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_MONOTONE;
  } catch (const domain_error& e) {
    g_last_error = e.what();
    return RMDUR_ERR_DOMAIN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RMDUR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RMDUR_ERR_INTERNAL;
  }
}

rmdur_status arg_error(const char* msg) {
  g_last_error = msg;
  return RMDUR_ERR_DOMAIN;
}

const cox_fit* fit_of(const rmdur_model* m, int process) {
  if (process == 0) return &m->m.promo;
  if (process == 1) return &m->m.retire;
  return nullptr;
}

}  // namespace

extern "C" {

const char* rmdur_last_error(void) { return g_last_error.c_str(); }

const char* rmdur_version(void) { return "0.1.0"; }

rmdur_status rmdur_dataset_load(const char* data_csv_path, const char* sidecar_json_path,
                                rmdur_dataset** out) {
  if (!data_csv_path || !sidecar_json_path || !out) return arg_error("null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<rmdur_dataset>();
    h->ds = load_dataset(data_csv_path, sidecar_json_path);
    *out = h.release();
  });
}

rmdur_status rmdur_dataset_validate(const rmdur_dataset* ds, char** out_report) {
  if (!ds || !out_report) return arg_error("null argument");
  *out_report = nullptr;
  return guarded([&] {
    std::string rep;
    for (const auto& d : validate_dataset(ds->ds)) {
      rep += d;
      rep += '\n';
    }
    *out_report = dup_string(rep);
    if (!*out_report) throw std::bad_alloc();
  });
}

int rmdur_dataset_n(const rmdur_dataset* ds) { return ds ? ds->ds.n() : 0; }

void rmdur_dataset_free(rmdur_dataset* ds) { delete ds; }

rmdur_status rmdur_model_fit(const rmdur_dataset* ds, rmdur_model** out) {
  if (!ds || !out) return arg_error("null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<rmdur_model>();
    h->m = fit_model(ds->ds);
    *out = h.release();
  });
}

rmdur_status rmdur_model_save(const rmdur_model* m, const char* path) {
  if (!m || !path) return arg_error("null argument");
  return guarded([&] { spit_file(path, model_to_json(m->m)); });
}

rmdur_status rmdur_model_load(const char* path, const rmdur_dataset* ds, rmdur_model** out) {
  if (!path || !ds || !out) return arg_error("null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<rmdur_model>();
    h->m = model_from_json(slurp_file(path));
    attach_residuals(h->m, ds->ds);
    *out = h.release();
  });
}

rmdur_status rmdur_model_summary(const rmdur_model* m, const char* format, char** out_text) {
  if (!m || !format || !out_text) return arg_error("null argument");
  *out_text = nullptr;
  return guarded([&] {
    std::string s;
    if (std::strcmp(format, "csv") == 0)
      s = coef_table_csv(m->m);
    else if (std::strcmp(format, "json") == 0)
      s = coef_table_json(m->m);
    else
      throw domain_error("summary format must be csv or json");
    *out_text = dup_string(s);
    if (!*out_text) throw std::bad_alloc();
  });
}

int rmdur_model_ncoef(const rmdur_model* m, int process) {
  const cox_fit* f = m ? fit_of(m, process) : nullptr;
  return f ? int(f->beta.size()) : 0;
}

rmdur_status rmdur_model_coef(const rmdur_model* m, int process, double* beta, size_t len) {
  if (!m || !beta) return arg_error("null argument");
  const cox_fit* f = fit_of(m, process);
  if (!f) return arg_error("process must be 0 (promotion) or 1 (retirement)");
  if (len < f->beta.size()) return arg_error("output buffer too small");
  for (size_t j = 0; j < f->beta.size(); ++j) beta[j] = f->beta[j];
  return RMDUR_OK;
}

rmdur_status rmdur_model_se(const rmdur_model* m, int process, double* se, size_t len) {
  if (!m || !se) return arg_error("null argument");
  const cox_fit* f = fit_of(m, process);
  if (!f) return arg_error("process must be 0 (promotion) or 1 (retirement)");
  const size_t p = f->beta.size();
  if (len < p) return arg_error("output buffer too small");
  for (size_t j = 0; j < p; ++j) se[j] = std::sqrt(f->hessian_inv[j * p + j]);
  return RMDUR_OK;
}

void rmdur_model_free(rmdur_model* m) { delete m; }

rmdur_status rmdur_predict(const rmdur_model* m, const rmdur_dataset* ds,
                           const char* policy_column, double policy_value, int threads,
                           rmdur_prediction** out) {
  if (!m || !ds || !out) return arg_error("null argument");
  *out = nullptr;
  return guarded([&] {
    if (m->m.promo.resid.empty())
      throw validation_error("model has no residuals attached; fit or load it against a dataset");
    policy pol;
    pol.column = policy_column ? policy_column : "";
    pol.value = policy_value;
    counting_view vp = build_view(ds->ds, process_kind::promotion);
    counting_view vr = build_view(ds->ds, process_kind::retirement);
    if (vp.etimes != m->m.promo.time || vr.etimes != m->m.retire.time)
      throw validation_error("dataset does not match the fitted model");
    auto h = std::make_unique<rmdur_prediction>();
    h->out = run_prediction(ds->ds, vp, vr, m->m.promo, m->m.retire, m->m.window, pol, threads);
    *out = h.release();
  });
}

int rmdur_prediction_rows(const rmdur_prediction* p) {
  return p ? int(p->out.rows.size()) : 0;
}

rmdur_status rmdur_prediction_row(const rmdur_prediction* p, int i, const char** id,
                                  double mean[3], double se[3]) {
  if (!p) return arg_error("null argument");
  if (i < 0 || i >= int(p->out.rows.size())) return arg_error("row index out of range");
  const prediction_row& r = p->out.rows[size_t(i)];
  if (id) *id = r.id.c_str();
  if (mean) {
    mean[0] = r.mean.lt;
    mean[1] = r.mean.cap;
    mean[2] = r.mean.rt;
  }
  if (se) {
    se[0] = r.se.lt;
    se[1] = r.se.cap;
    se[2] = r.se.rt;
  }
  return RMDUR_OK;
}

rmdur_status rmdur_prediction_means_csv(const rmdur_prediction* p, char** out_text) {
  if (!p || !out_text) return arg_error("null argument");
  *out_text = nullptr;
  return guarded([&] {
    *out_text = dup_string(means_csv(p->out.rows));
    if (!*out_text) throw std::bad_alloc();
  });
}

rmdur_status rmdur_prediction_curves_csv(const rmdur_prediction* p, char** out_text) {
  if (!p || !out_text) return arg_error("null argument");
  *out_text = nullptr;
  return guarded([&] {
    *out_text = dup_string(p->out.curves_csv);
    if (!*out_text) throw std::bad_alloc();
  });
}

void rmdur_prediction_free(rmdur_prediction* p) { delete p; }

rmdur_status rmdur_compensate(const char* schedule_json_path, const char* means_csv_path,
                              const char* curves_csv_path, const char* earnings_csv_path,
                              char** out_damages_csv) {
  if (!schedule_json_path || !means_csv_path || !earnings_csv_path || !out_damages_csv)
    return arg_error("null argument");
  *out_damages_csv = nullptr;
  return guarded([&] {
    pay_schedule sch = parse_schedule(slurp_file(schedule_json_path));
    auto means = parse_means_csv(slurp_file(means_csv_path));
    std::vector<subject_curve> curves;
    if (curves_csv_path) curves = parse_curves_csv(slurp_file(curves_csv_path));
    auto earnings = parse_earnings_csv(slurp_file(earnings_csv_path));
    *out_damages_csv = dup_string(compute_damages(sch, means, curves, earnings));
    if (!*out_damages_csv) throw std::bad_alloc();
  });
}

rmdur_status rmdur_simulate(const char* config_json_path, int use_seed, unsigned long long seed,
                            int threads, rmdur_simreport** out) {
  if (!out) return arg_error("null argument");
  *out = nullptr;
  return guarded([&] {
    sim_config c;
    if (config_json_path) c = sim_config_from_json(slurp_file(config_json_path));
    if (use_seed) c.seed = seed;
    if (threads > 0) c.threads = threads;
    auto h = std::make_unique<rmdur_simreport>();
    h->r = run_study(c);
    *out = h.release();
  });
}

rmdur_status rmdur_simreport_json(const rmdur_simreport* r, char** out_text) {
  if (!r || !out_text) return arg_error("null argument");
  *out_text = nullptr;
  return guarded([&] {
    *out_text = dup_string(report_to_json(r->r));
    if (!*out_text) throw std::bad_alloc();
  });
}

rmdur_status rmdur_simreport_csv(const rmdur_simreport* r, char** out_text) {
  if (!r || !out_text) return arg_error("null argument");
  *out_text = nullptr;
  return guarded([&] {
    *out_text = dup_string(report_to_csv(r->r));
    if (!*out_text) throw std::bad_alloc();
  });
}

rmdur_status rmdur_simreport_quantity(const rmdur_simreport* r, const char* name, double* truth,
                                      double* mean, double* bias, double* esd, double* ase,
                                      double* cp) {
  if (!r || !name) return arg_error("null argument");
  for (const auto& q : r->r.rows) {
    if (q.name != name) continue;
    if (truth) *truth = q.truth;
    if (mean) *mean = q.mean_est;
    if (bias) *bias = q.bias;
    if (esd) *esd = q.esd;
    if (ase) *ase = q.ase;
    if (cp) *cp = q.cp;
    return RMDUR_OK;
  }
  return arg_error("unknown quantity name");
}

void rmdur_simreport_free(rmdur_simreport* r) { delete r; }

void rmdur_string_free(char* s) { ::operator delete(s); }

}  // extern "C"
