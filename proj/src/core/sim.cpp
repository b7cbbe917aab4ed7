#include "core/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "core/csvio.hpp"
#include "core/numeric.hpp"
#include "core/parallel.hpp"
#include "core/philox.hpp"
#include "core/variance.hpp"

namespace rmdur {

using nlohmann::ordered_json;

sim_config sim_config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw parse_error("simulation config: " + std::string(e.what()));
  }
  sim_config c;
  try {
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("replicates")) c.replicates = j["replicates"].get<int>();
    if (j.contains("lambda0_P")) c.lambda_p = j["lambda0_P"].get<double>();
    if (j.contains("lambda0_R")) c.lambda_r = j["lambda0_R"].get<double>();
    if (j.contains("beta")) {
      c.beta1 = j["beta"].at(0).get<double>();
      c.beta2 = j["beta"].at(1).get<double>();
    }
    if (j.contains("theta")) {
      c.theta1 = j["theta"].at(0).get<double>();
      c.theta2 = j["theta"].at(1).get<double>();
    }
    if (j.contains("censor_max")) c.censor_max = j["censor_max"].get<double>();
    if (j.contains("frailty_variance")) c.frailty_var = j["frailty_variance"].get<double>();
    if (j.contains("tau")) c.tau = j["tau"].get<double>();
    if (j.contains("policy_covariates")) {
      c.policy_x2 = j["policy_covariates"].at(0).get<double>();
      c.policy_z2 = j["policy_covariates"].at(1).get<double>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
  } catch (const ordered_json::exception& e) {
    throw parse_error("simulation config: " + std::string(e.what()));
  }
  if (c.n < 2 || c.replicates < 1) throw domain_error("simulation config: n or replicates too small");
  if (!(c.tau > 0) || !(c.censor_max > 0) || c.frailty_var < 0)
    throw domain_error("simulation config: tau, censor_max must be positive, frailty_variance >= 0");
  return c;
}

std::string sim_config_to_json(const sim_config& c) {
  ordered_json j;
  j["n"] = c.n;
  j["replicates"] = c.replicates;
  j["lambda0_P"] = c.lambda_p;
  j["lambda0_R"] = c.lambda_r;
  j["beta"] = {c.beta1, c.beta2};
  j["theta"] = {c.theta1, c.theta2};
  j["censor_max"] = c.censor_max;
  j["frailty_variance"] = c.frailty_var;
  j["tau"] = c.tau;
  j["policy_covariates"] = {c.policy_x2, c.policy_z2};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

dataset generate_replicate(const sim_config& c, uint32_t rep) {
  dataset ds;
  ds.x_names = {"x1", "x2"};
  ds.z_names = {"x1", "z2"};
  ds.protected_column = "x1";
  ds.window = {0.0, c.tau};
  ds.has_window = true;
  ds.subjects.resize(c.n);
  char buf[32];
  for (int i = 0; i < c.n; ++i) {
    // fixed draw order: x1, x2, z2, frailty, promotion, retirement, censoring
    philox_stream g(c.seed, rep, uint32_t(i));
    const double x1 = g.u01() < 0.5 ? 1.0 : 0.0;
    const double x2 = 10.0 * g.u01();
    const double z2 = 2.0 * g.normal();
    double w = 1.0;
    if (c.frailty_var > 0.0) w = c.frailty_var * g.gamma(1.0 / c.frailty_var);
    const double pstar =
        g.exponential(c.lambda_p * w * std::exp(c.beta1 * x1 + c.beta2 * x2));
    const double rstar =
        g.exponential(c.lambda_r * w * std::exp(c.theta1 * x1 + c.theta2 * z2));
    const double cens = c.censor_max * g.u01();

    subject_record& s = ds.subjects[i];
    std::snprintf(buf, sizeof(buf), "s%06d", i + 1);
    s.id = buf;
    process_observation promo;
    promo.entry = 0.0;
    promo.exit = std::min({pstar, rstar, cens});
    promo.event = pstar <= rstar && pstar <= cens;
    s.promotion = promo;
    process_observation ret;
    ret.entry = 0.0;
    ret.exit = std::min(rstar, cens);
    ret.event = rstar <= cens;
    s.retirement = ret;
    s.x.start = {0.0};
    s.x.values = {x1, x2};
    s.x.dim = 2;
    s.z.start = {0.0};
    s.z.values = {x1, z2};
    s.z.dim = 2;
  }
  return ds;
}

namespace {

// integral over (0, tau] of the gamma-frailty survival factor (1 + v s t)^(-1/v);
// v = 0 degenerates to exp(-s t)
double laplace_integral(double s, double v, double tau) {
  if (s <= 0.0) return tau;
  if (v == 0.0) return (1.0 - std::exp(-s * tau)) / s;
  if (v == 1.0) return std::log1p(s * tau) / s;
  return (std::pow(1.0 + v * s * tau, (v - 1.0) / v) - 1.0) / (s * (v - 1.0));
}

double frailty_survival(double s, double v, double t) {
  if (v == 0.0) return std::exp(-s * t);
  return std::pow(1.0 + v * s * t, -1.0 / v);
}

template <class F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double s1 = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double s2 = (b - a) / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(s2 - s1) < 15.0 * tol) return s2 + (s2 - s1) / 15.0;
  return simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

void policy_rates(const sim_config& c, double& ap, double& ar) {
  ap = c.lambda_p * std::exp(c.beta2 * c.policy_x2);
  ar = c.lambda_r * std::exp(c.theta2 * c.policy_z2);
}

}  // namespace

mean_result true_restricted_means(const sim_config& c) {
  double ap, ar;
  policy_rates(c, ap, ar);
  mean_result m;
  m.lt = laplace_integral(ap + ar, c.frailty_var, c.tau);
  const double lr = laplace_integral(ar, c.frailty_var, c.tau);
  m.cap = lr - m.lt;
  m.rt = c.tau - lr;
  return m;
}

mean_result quadrature_restricted_means(const sim_config& c) {
  double ap, ar;
  policy_rates(c, ap, ar);
  const double v = c.frailty_var;
  mean_result m;
  m.lt = integrate([&](double t) { return frailty_survival(ap + ar, v, t); }, 0.0, c.tau, 1e-12);
  m.cap = integrate(
      [&](double t) {
        return frailty_survival(ar, v, t) - frailty_survival(ap + ar, v, t);
      },
      0.0, c.tau, 1e-12);
  m.rt = integrate([&](double t) { return 1.0 - frailty_survival(ar, v, t); }, 0.0, c.tau, 1e-12);
  return m;
}

mean_result mc_restricted_means(const sim_config& c, uint64_t seed, int64_t draws) {
  double ap, ar;
  policy_rates(c, ap, ar);
  kahan lt, cap, rt;
  for (int64_t i = 0; i < draws; ++i) {
    philox_stream g(seed, 0xffffffffu, uint32_t(i));
    double w = 1.0;
    if (c.frailty_var > 0.0) w = c.frailty_var * g.gamma(1.0 / c.frailty_var);
    const double p = g.exponential(ap * w);
    const double r = g.exponential(ar * w);
    const double rcap = std::min(r, c.tau);
    lt.add(std::min(p, rcap));
    cap.add(p < rcap ? rcap - p : 0.0);
    rt.add(c.tau - rcap);
  }
  mean_result m;
  m.lt = lt.sum() / double(draws);
  m.cap = cap.sum() / double(draws);
  m.rt = rt.sum() / double(draws);
  return m;
}

sim_report run_study(const sim_config& c) {
  sim_report rep;
  rep.config = c;
  const mean_result tru = true_restricted_means(c);
  const int R = c.replicates;
  constexpr int NQ = 7;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> est(size_t(NQ) * R, nan), sev(size_t(NQ) * R, nan);
  std::vector<char> ok(R, 0);
  std::vector<std::string> why(R);

  parallel_for(R, c.threads, [&](int r) {
    try {
      dataset ds = generate_replicate(c, uint32_t(r));
      counting_view vp = build_view(ds, process_kind::promotion);
      counting_view vr = build_view(ds, process_kind::retirement);
      cox_fit fp = fit_cox(vp);
      cox_fit fr = fit_cox(vr);

      covariate_trajectory tx, tz;
      tx.start = {0.0};
      tx.values = {0.0, c.policy_x2};
      tx.dim = 2;
      tz.start = {0.0};
      tz.values = {0.0, c.policy_z2};
      tz.dim = 2;
      target_spec t;
      t.x = &tx;
      t.z = &tz;
      t.p1 = 0.0;
      t.r1 = 0.0;
      restriction_window w{0.0, c.tau};
      target_curves tc = build_target_curves(fp, fr, t, w);
      mean_result m = restricted_means(tc);
      influence_result inf = influence(t, tc, ds.n(), vp, fp, vr, fr);

      est[size_t(0) * R + r] = m.lt;
      sev[size_t(0) * R + r] = inf.se.lt;
      est[size_t(1) * R + r] = m.cap;
      sev[size_t(1) * R + r] = inf.se.cap;
      est[size_t(2) * R + r] = m.rt;
      sev[size_t(2) * R + r] = inf.se.rt;
      est[size_t(3) * R + r] = fp.beta[0];
      sev[size_t(3) * R + r] = std::sqrt(fp.hessian_inv[0]);
      est[size_t(4) * R + r] = fp.beta[1];
      sev[size_t(4) * R + r] = std::sqrt(fp.hessian_inv[3]);
      est[size_t(5) * R + r] = fr.beta[0];
      sev[size_t(5) * R + r] = std::sqrt(fr.hessian_inv[0]);
      est[size_t(6) * R + r] = fr.beta[1];
      sev[size_t(6) * R + r] = std::sqrt(fr.hessian_inv[3]);
      ok[r] = 1;
    } catch (const nonconvergence_error& e) {
      why[r] = e.what();
    } catch (const monotone_likelihood_error& e) {
      why[r] = e.what();
    } catch (const singular_hessian_error& e) {
      why[r] = e.what();
    }
  });

  const char* names[NQ] = {"E_lt", "E_cap", "E_rt", "beta1", "beta2", "theta1", "theta2"};
  const double truth[NQ] = {tru.lt, tru.cap, tru.rt, c.beta1, c.beta2, c.theta1, c.theta2};
  for (int r = 0; r < R; ++r)
    if (!ok[r]) {
      rep.excluded.push_back(r);
      rep.exclusion_reasons.push_back(why[r]);
    }
  rep.used = R - int(rep.excluded.size());
  rep.valid = rep.excluded.size() <= size_t(R) / 100;
  if (rep.used == 0) throw nonconvergence_error("every replicate failed to fit", 0, 0.0);

  for (int q = 0; q < NQ; ++q) {
    study_quantity sq;
    sq.name = names[q];
    sq.truth = truth[q];
    kahan me, ase;
    for (int r = 0; r < R; ++r)
      if (ok[r]) {
        me.add(est[size_t(q) * R + r]);
        ase.add(sev[size_t(q) * R + r]);
      }
    sq.mean_est = me.sum() / rep.used;
    sq.ase = ase.sum() / rep.used;
    sq.bias = sq.mean_est - sq.truth;
    kahan ss;
    int cover = 0;
    for (int r = 0; r < R; ++r)
      if (ok[r]) {
        const double e = est[size_t(q) * R + r] - sq.mean_est;
        ss.add(e * e);
        if (std::abs(est[size_t(q) * R + r] - sq.truth) <= 1.96 * sev[size_t(q) * R + r]) ++cover;
      }
    sq.esd = rep.used > 1 ? std::sqrt(ss.sum() / (rep.used - 1)) : 0.0;
    sq.cp = double(cover) / rep.used;
    rep.rows.push_back(sq);
  }
  return rep;
}

std::string report_to_json(const sim_report& r) {
  ordered_json j;
  j["config"] = ordered_json::parse(sim_config_to_json(r.config));
  j["used"] = r.used;
  j["excluded"] = r.excluded;
  j["exclusion_reasons"] = r.exclusion_reasons;
  j["valid"] = r.valid;
  ordered_json rows = ordered_json::array();
  for (const auto& q : r.rows) {
    ordered_json e;
    e["quantity"] = q.name;
    e["truth"] = q.truth;
    e["mean"] = q.mean_est;
    e["bias"] = q.bias;
    e["esd"] = q.esd;
    e["ase"] = q.ase;
    e["cp"] = q.cp;
    rows.push_back(e);
  }
  j["results"] = rows;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const sim_report& r) {
  std::string out = "quantity,truth,mean,bias,esd,ase,cp\n";
  for (const auto& q : r.rows) {
    out += q.name;
    for (double v : {q.truth, q.mean_est, q.bias, q.esd, q.ase, q.cp})
      out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// synthetic roster example

namespace {

constexpr double kDaysPerYear = 365.25;
constexpr double kDaysPerQuarter = kDaysPerYear / 4.0;

// first integer day strictly past the continuous event time
inline double event_day(double t) { return std::floor(t) + 1.0; }

// piecewise-constant hazard with steps at the same floored quarterly
// boundaries the emitted segments use; returns the continuous event time for
// exp(1) waiting time e starting at from_day, or infinity past horizon
template <class Rate>
double sample_step_hazard(double from_day, double horizon, double anchor_day, Rate&& rate_at_q,
                          double e) {
  auto boundary = [&](int q) { return anchor_day + std::floor(q * kDaysPerQuarter); };
  int q = 0;
  while (boundary(q + 1) <= from_day) ++q;
  double pos = from_day;
  while (pos < horizon + 1.0) {
    const double seg_end = boundary(q + 1);
    const double len = seg_end - pos;
    const double rate = rate_at_q(q);
    if (rate * len >= e) return pos + e / rate;
    e -= rate * len;
    pos = seg_end;
    ++q;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

void write_case_files(uint64_t seed, int n, const std::string& csv_path,
                      const std::string& sidecar_path) {
  const int64_t epoch = days_from_civil(1996, 11, 18);
  const double W = double(days_from_civil(2003, 5, 31) - epoch);  // window end, day units

  std::ostringstream csv;
  csv << "subject_id,process,entry,exit,event,segment_start,"
         "minority,detective,yos_at_lt,tenure,tenure_sq,years_eligible\n";
  auto date = [&](double day) { return civil_from_days(int64_t(llround(day)) + epoch); };

  char idbuf[32];
  for (int i = 0; i < n; ++i) {
    philox_stream g(seed, 0, uint32_t(i));
    const double yos0 = 14.0 + 13.0 * g.u01();           // service years at window start
    const double p1 = (-6.0 + 10.0 * g.u01()) * kDaysPerYear;  // lieutenant date
    const double service_start = -yos0 * kDaysPerYear;
    const double r1 = service_start + 25.0 * kDaysPerYear;     // pension eligibility
    // the emitted indicator is 1 for protected-class officers; hazards are
    // keyed on its complement so the protected group is promoted more slowly
    const double wm = g.u01() < 0.72 ? 1.0 : 0.0;
    const double mi = 1.0 - wm;
    const double det = g.u01() < 0.35 ? 1.0 : 0.0;
    const double yos_at_lt = (p1 - service_start) / kDaysPerYear;

    const double p1d = std::floor(p1);
    const double r1d = std::floor(r1);

    // promotion hazard: quadratic in tenure, quarterly steps
    const double ep = g.exponential(1.0);
    const double pstar = sample_step_hazard(
        std::max(p1d, 0.0), W, p1d,
        [&](int q) {
          const double ten = 0.25 * q;
          return 0.16 / kDaysPerYear *
                 std::exp(0.45 * wm + 0.25 * det - 0.03 * yos_at_lt + 0.35 * ten -
                          0.045 * ten * ten);
        },
        ep);

    // retirement (from lieutenant rank on) starts at the later of pension
    // eligibility and the lieutenant date; hazard grows with years eligible.
    // sampling from max(start, 0) is the left-truncation conditioning: nobody
    // on the roster left before the window opened.
    const double rstart = std::max(r1d, p1d);
    double rstar = std::numeric_limits<double>::infinity();
    const bool ever_eligible = rstart < W;
    if (ever_eligible) {
      const double er = g.exponential(1.0);
      rstar = sample_step_hazard(
          std::max(rstart, 0.0), W, r1d,
          [&](int q) {
            const double el = 0.25 * q;
            return 0.14 / kDaysPerYear * std::exp(0.10 * wm - 0.10 * det + 0.22 * el);
          },
          er);
    }

    const bool pevent = pstar <= rstar && pstar <= W;
    const bool revent = rstar <= W;
    const double pexit = pevent          ? event_day(pstar)
                         : revent        ? event_day(rstar)
                                         : W;
    const double rexit = revent ? event_day(rstar) : W;

    std::snprintf(idbuf, sizeof(idbuf), "officer_%03d", i + 1);

    // promotion rows: quarterly tenure segments covering [p1d, pexit]
    for (int q = 0;; ++q) {
      const double sq = p1d + std::floor(q * kDaysPerQuarter);
      if (q > 0 && sq > pexit) break;
      const double ten = 0.25 * q;
      csv << idbuf << ",P," << date(p1d) << ',' << date(pexit) << ',' << (pevent ? 1 : 0) << ','
          << date(sq) << ',' << mi << ',' << det << ',' << format_double(yos_at_lt) << ','
          << format_double(ten) << ',' << format_double(ten * ten) << ",0\n";
    }
    // retirement rows only for subjects reaching eligibility inside the
    // window; years_eligible keeps counting from the true pension date even
    // when observation starts later
    if (ever_eligible) {
      for (int q = 0;; ++q) {
        const double sq = r1d + std::floor(q * kDaysPerQuarter);
        if (q > 0 && sq > rexit) break;
        const double el = 0.25 * q;
        csv << idbuf << ",R," << date(rstart) << ',' << date(rexit) << ',' << (revent ? 1 : 0)
            << ',' << date(sq) << ',' << mi << ',' << det << ",0,0,0," << format_double(el)
            << "\n";
      }
    }
  }
  spit_file(csv_path, csv.str());

  ordered_json sc;
  sc["epoch"] = "1996-11-18";
  sc["protected_column"] = "minority";
  sc["window"] = {{"tau0", "1996-11-18"}, {"tau1", "2003-05-31"}};
  sc["promotion_covariates"] = {"minority", "detective", "yos_at_lt", "tenure", "tenure_sq"};
  sc["retirement_covariates"] = {"minority", "detective", "years_eligible"};
  spit_file(sidecar_path, sc.dump(2) + "\n");
}

}  // namespace rmdur
