#include "core/model_io.hpp"

#include <cmath>
#include <functional>

#include "core/numeric.hpp"
#include "json.hpp"

namespace rmdur {

using nlohmann::ordered_json;

// every floating value travels as a shortest round-trip decimal string so the
// artifact is byte-stable across writes and exact across a load
static ordered_json num_array(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(format_double(x));
  return a;
}

static std::vector<double> parse_num_array(const ordered_json& a, const char* what) {
  if (!a.is_array()) throw parse_error(std::string("model field is not an array: ") + what);
  std::vector<double> v;
  v.reserve(a.size());
  for (const auto& e : a) {
    if (!e.is_string()) throw parse_error(std::string("model numbers must be strings: ") + what);
    v.push_back(parse_double(e.get<std::string>()));
  }
  return v;
}

static ordered_json fit_to_json(const cox_fit& f, const std::vector<std::string>& terms) {
  ordered_json j;
  j["terms"] = terms;
  j["coef"] = num_array(f.beta);
  j["hessian"] = num_array(f.hessian);
  j["hessian_inv"] = num_array(f.hessian_inv);
  j["iterations"] = f.iterations;
  j["score_norm"] = format_double(f.score_norm);
  ordered_json b;
  b["time"] = num_array(f.time);
  b["events"] = f.dcount;
  b["jump"] = num_array(f.jump);
  b["log_rate_sum"] = num_array(f.logD);
  b["xbar"] = num_array(f.xbar);
  j["baseline"] = b;
  return j;
}

static cox_fit fit_from_json(const ordered_json& j, std::vector<std::string>& terms,
                             const char* which) {
  cox_fit f;
  try {
    terms = j.at("terms").get<std::vector<std::string>>();
    f.beta = parse_num_array(j.at("coef"), "coef");
    f.hessian = parse_num_array(j.at("hessian"), "hessian");
    f.hessian_inv = parse_num_array(j.at("hessian_inv"), "hessian_inv");
    f.iterations = j.at("iterations").get<int>();
    f.score_norm = parse_double(j.at("score_norm").get<std::string>());
    const auto& b = j.at("baseline");
    f.time = parse_num_array(b.at("time"), "baseline.time");
    f.dcount = b.at("events").get<std::vector<int>>();
    f.jump = parse_num_array(b.at("jump"), "baseline.jump");
    f.logD = parse_num_array(b.at("log_rate_sum"), "baseline.log_rate_sum");
    f.xbar = parse_num_array(b.at("xbar"), "baseline.xbar");
  } catch (const ordered_json::exception& e) {
    throw parse_error(std::string("bad model json (") + which + "): " + e.what());
  }
  const size_t p = f.beta.size(), m = f.time.size();
  if (f.hessian.size() != p * p || f.hessian_inv.size() != p * p || terms.size() != p ||
      f.dcount.size() != m || f.jump.size() != m || f.logD.size() != m ||
      f.xbar.size() != m * p)
    throw parse_error(std::string("inconsistent model dimensions (") + which + ")");
  f.converged = true;
  return f;
}

model_artifact fit_model(const dataset& ds) {
  require_valid(ds);
  model_artifact m;
  m.protected_column = ds.protected_column;
  m.window = ds.window;
  m.has_window = ds.has_window;
  m.x_names = ds.x_names;
  m.z_names = ds.z_names;
  m.promo = fit_cox(build_view(ds, process_kind::promotion));
  m.retire = fit_cox(build_view(ds, process_kind::retirement));
  return m;
}

std::string model_to_json(const model_artifact& m) {
  ordered_json j;
  j["format"] = "rmdur-model";
  j["version"] = 1;
  j["protected_column"] = m.protected_column;
  if (m.has_window) {
    j["window"]["tau0"] = format_double(m.window.tau0);
    j["window"]["tau1"] = format_double(m.window.tau1);
  }
  j["promotion"] = fit_to_json(m.promo, m.x_names);
  j["retirement"] = fit_to_json(m.retire, m.z_names);
  if (!m.data_digest.empty()) j["data_digest"] = m.data_digest;
  return j.dump(2) + "\n";
}

model_artifact model_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw parse_error(std::string("model json: ") + e.what());
  }
  if (j.value("format", std::string()) != "rmdur-model")
    throw parse_error("not a model file (missing format tag)");
  model_artifact m;
  m.protected_column = j.value("protected_column", std::string());
  if (j.contains("window")) {
    m.window.tau0 = parse_double(j["window"].at("tau0").get<std::string>());
    m.window.tau1 = parse_double(j["window"].at("tau1").get<std::string>());
    m.has_window = true;
  }
  m.promo = fit_from_json(j.at("promotion"), m.x_names, "promotion");
  m.retire = fit_from_json(j.at("retirement"), m.z_names, "retirement");
  m.data_digest = j.value("data_digest", std::string());
  return m;
}

// residual rows are not serialized (they are n*p and belong to the data, not
// the model); rebuild them by refitting and insist the refit reproduces the
// stored event times and coefficients, which catches a dataset that is not the
// one the artifact came from
void attach_residuals(model_artifact& m, const dataset& ds) {
  require_valid(ds);
  auto one = [&](process_kind k, cox_fit& f, const char* which) {
    counting_view v = build_view(ds, k);
    if (v.etimes != f.time)
      throw validation_error(std::string("dataset event times do not match the ") + which +
                             " baseline stored in the model");
    cox_fit r = fit_cox(v);
    for (size_t j = 0; j < f.beta.size(); ++j)
      if (std::abs(r.beta[j] - f.beta[j]) > 1e-8)
        throw validation_error(std::string("refit ") + which +
                               " coefficients disagree with the model file");
    f.resid = std::move(r.resid);
  };
  one(process_kind::promotion, m.promo, "promotion");
  one(process_kind::retirement, m.retire, "retirement");
}

static void coef_rows(const char* process, const std::vector<std::string>& terms,
                      const cox_fit& f, const std::function<void(
                          const char*, const std::string&, double, double, double, double, double)>& emit) {
  const int p = int(f.beta.size());
  for (int j = 0; j < p; ++j) {
    const double se = std::sqrt(f.hessian_inv[size_t(j) * p + j]);
    const double z = f.beta[j] / se;
    const double pv = 2.0 * normal_cdf(-std::abs(z));
    emit(process, terms[j], f.beta[j], std::exp(f.beta[j]), se, z, pv);
  }
}

std::string coef_table_csv(const model_artifact& m) {
  std::string out = "process,term,coef,hr,se,z,p\n";
  auto emit = [&](const char* pr, const std::string& term, double b, double hr, double se,
                  double z, double pv) {
    out += pr;
    out += ',' + term + ',' + format_double(b) + ',' + format_double(hr) + ',' +
           format_double(se) + ',' + format_double(z) + ',' + format_double(pv) + '\n';
  };
  coef_rows("promotion", m.x_names, m.promo, emit);
  coef_rows("retirement", m.z_names, m.retire, emit);
  return out;
}

std::string coef_table_json(const model_artifact& m) {
  ordered_json rows = ordered_json::array();
  auto emit = [&](const char* pr, const std::string& term, double b, double hr, double se,
                  double z, double pv) {
    ordered_json r;
    r["process"] = pr;
    r["term"] = term;
    r["coef"] = format_double(b);
    r["hr"] = format_double(hr);
    r["se"] = format_double(se);
    r["z"] = format_double(z);
    r["p"] = format_double(pv);
    rows.push_back(std::move(r));
  };
  coef_rows("promotion", m.x_names, m.promo, emit);
  coef_rows("retirement", m.z_names, m.retire, emit);
  ordered_json j;
  j["coefficients"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace rmdur
