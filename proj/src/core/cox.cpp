#include "core/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/numeric.hpp"

namespace rmdur {

counting_view build_view(const dataset& ds, process_kind k) {
  counting_view v;
  v.p = int(k == process_kind::promotion ? ds.x_names.size() : ds.z_names.size());
  v.constant = true;
  for (int i = 0; i < ds.n(); ++i) {
    const auto& s = ds.subjects[i];
    const auto& obs = k == process_kind::promotion ? s.promotion : s.retirement;
    if (!obs) continue;
    v.entry.push_back(obs->entry);
    v.exit.push_back(obs->exit);
    v.event.push_back(obs->event);
    const auto& tr = k == process_kind::promotion ? s.x : s.z;
    v.traj.push_back(&tr);
    v.subject.push_back(i);
    if (tr.nseg() != 1) v.constant = false;
  }
  v.n = int(v.entry.size());
  std::vector<double> ev;
  for (int i = 0; i < v.n; ++i)
    if (v.event[i]) ev.push_back(v.exit[i]);
  std::sort(ev.begin(), ev.end());
  for (size_t a = 0; a < ev.size();) {
    size_t b = a;
    while (b < ev.size() && ev[b] == ev[a]) ++b;
    v.etimes.push_back(ev[a]);
    v.ecount.push_back(int(b - a));
    a = b;
  }
  return v;
}

namespace {

inline double dot(const double* a, const double* b, int p) {
  double s = 0.0;
  for (int j = 0; j < p; ++j) s += a[j] * b[j];
  return s;
}

// general path: per event time, scan the risk set and evaluate covariates at
// that time; linear predictors are centered by the risk-set max before exp
pl_eval eval_general(const counting_view& v, const std::vector<double>& beta) {
  const int p = v.p;
  pl_eval e;
  e.score.assign(p, 0.0);
  e.info.assign(size_t(p) * p, 0.0);
  kahan ll;
  std::vector<int> ridx(v.n);
  std::vector<double> reta(v.n);
  std::vector<const double*> rx(v.n);
  std::vector<double> s1(p), s2(size_t(p) * p);

  for (size_t k = 0; k < v.etimes.size(); ++k) {
    const double t = v.etimes[k];
    const int d = v.ecount[k];
    int nr = 0;
    double emax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.n; ++i) {
      if (!(v.entry[i] < t && t <= v.exit[i])) continue;
      const double* x = v.traj[i]->at(t);
      double eta = dot(beta.data(), x, p);
      ridx[nr] = i;
      reta[nr] = eta;
      rx[nr] = x;
      ++nr;
      if (eta > emax) emax = eta;
    }
    if (nr == 0) throw domain_error("empty risk set at an event time");

    double s0 = 0.0;
    std::fill(s1.begin(), s1.end(), 0.0);
    std::fill(s2.begin(), s2.end(), 0.0);
    double esum = 0.0;
    for (int r = 0; r < nr; ++r) {
      const double w = std::exp(reta[r] - emax);
      const double* x = rx[r];
      s0 += w;
      for (int a = 0; a < p; ++a) {
        s1[a] += w * x[a];
        for (int b = a; b < p; ++b) s2[size_t(a) * p + b] += w * x[a] * x[b];
      }
      const int i = ridx[r];
      if (v.exit[i] == t && v.event[i]) {
        esum += reta[r];
        for (int a = 0; a < p; ++a) e.score[a] += x[a];
      }
    }
    ll.add(esum - d * (emax + std::log(s0)));
    for (int a = 0; a < p; ++a) {
      const double xb_a = s1[a] / s0;
      e.score[a] -= d * xb_a;
      for (int b = a; b < p; ++b)
        e.info[size_t(a) * p + b] += d * (s2[size_t(a) * p + b] / s0 - xb_a * (s1[b] / s0));
    }
  }
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < a; ++b) e.info[size_t(a) * p + b] = e.info[size_t(b) * p + a];
  e.loglik = ll.sum();
  return e;
}

// constant-covariate path: risk-set sums at a time are a suffix sum over exits
// minus a suffix sum over entries; one O((n+m) log n) sweep per evaluation
pl_eval eval_constant(const counting_view& v, const std::vector<double>& beta) {
  const int p = v.p;
  const size_t m = v.etimes.size();
  pl_eval e;
  e.score.assign(p, 0.0);
  e.info.assign(size_t(p) * p, 0.0);

  std::vector<double> eta(v.n);
  double emax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < v.n; ++i) {
    eta[i] = dot(beta.data(), v.traj[i]->values.data(), p);
    if (eta[i] > emax) emax = eta[i];
  }
  std::vector<int> by_exit(v.n), by_entry(v.n);
  std::iota(by_exit.begin(), by_exit.end(), 0);
  by_entry = by_exit;
  std::sort(by_exit.begin(), by_exit.end(),
            [&](int a, int b) { return v.exit[a] > v.exit[b]; });
  std::sort(by_entry.begin(), by_entry.end(),
            [&](int a, int b) { return v.entry[a] > v.entry[b]; });

  struct acc {
    double s0 = 0.0;
    std::vector<double> s1, s2;
  };
  acc ae, an;
  ae.s1.assign(p, 0.0);
  ae.s2.assign(size_t(p) * p, 0.0);
  an = ae;
  auto add = [&](acc& a, int i) {
    const double w = std::exp(eta[i] - emax);
    const double* x = v.traj[i]->values.data();
    a.s0 += w;
    for (int r = 0; r < p; ++r) {
      a.s1[r] += w * x[r];
      for (int c = r; c < p; ++c) a.s2[size_t(r) * p + c] += w * x[r] * x[c];
    }
  };

  // per-time numerators for the event subjects
  std::vector<double> esum(m, 0.0);
  std::vector<double> xev(m * size_t(p), 0.0);
  for (int i = 0; i < v.n; ++i) {
    if (!v.event[i]) continue;
    size_t k = std::lower_bound(v.etimes.begin(), v.etimes.end(), v.exit[i]) - v.etimes.begin();
    esum[k] += eta[i];
    const double* x = v.traj[i]->values.data();
    for (int a = 0; a < p; ++a) xev[k * p + a] += x[a];
  }

  kahan ll;
  std::vector<double> sc(p, 0.0), in(size_t(p) * p, 0.0);
  size_t pe = 0, pn = 0;
  for (size_t kk = m; kk-- > 0;) {
    const double t = v.etimes[kk];
    const int d = v.ecount[kk];
    while (pe < by_exit.size() && v.exit[by_exit[pe]] >= t) add(ae, by_exit[pe++]);
    while (pn < by_entry.size() && v.entry[by_entry[pn]] >= t) add(an, by_entry[pn++]);
    const double s0 = ae.s0 - an.s0;
    if (!(s0 > 0.0)) throw domain_error("empty risk set at an event time");
    ll.add(esum[kk] - d * (emax + std::log(s0)));
    for (int a = 0; a < p; ++a) {
      const double s1a = ae.s1[a] - an.s1[a];
      const double xb_a = s1a / s0;
      sc[a] += xev[kk * size_t(p) + a] - d * xb_a;
      for (int b = a; b < p; ++b) {
        const double s2ab = ae.s2[size_t(a) * p + b] - an.s2[size_t(a) * p + b];
        const double s1b = ae.s1[b] - an.s1[b];
        in[size_t(a) * p + b] += d * (s2ab / s0 - xb_a * (s1b / s0));
      }
    }
  }
  e.loglik = ll.sum();
  e.score = std::move(sc);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b)
      e.info[size_t(a) * p + b] = e.info[size_t(b) * p + a] = in[size_t(a) * p + b];
  return e;
}

}  // namespace

pl_eval eval_partial_likelihood(const counting_view& v, const std::vector<double>& beta) {
  if (int(beta.size()) != v.p) throw domain_error("coefficient length does not match view");
  return v.constant ? eval_constant(v, beta) : eval_general(v, beta);
}

cox_fit fit_cox(const counting_view& v) {
  if (v.etimes.empty()) throw validation_error("cannot fit: no events in view");
  const int p = v.p;
  std::vector<double> beta(p, 0.0);
  pl_eval e = eval_partial_likelihood(v, beta);
  int it = 0;
  double snorm;
  for (;;) {
    snorm = 0.0;
    for (double s : e.score) snorm = std::max(snorm, std::abs(s));
    if (snorm <= 1e-8) break;
    if (it >= 50)
      throw nonconvergence_error("Newton did not converge in 50 iterations (score sup-norm " +
                                     format_double(snorm) + ")",
                                 it, snorm);
    std::vector<double> L = e.info;
    if (!cholesky(L, p))
      throw singular_hessian_error("observed information is singular");
    std::vector<double> delta(p), nb(p);
    chol_solve(L, p, e.score.data(), delta.data());
    const double ll0 = e.loglik;
    double scale = 1.0;
    pl_eval ne;
    for (int h = 0;; ++h) {
      for (int j = 0; j < p; ++j) nb[j] = beta[j] + scale * delta[j];
      ne = eval_partial_likelihood(v, nb);
      if (ne.loglik >= ll0 || h >= 10) break;
      scale *= 0.5;
    }
    beta = nb;
    e = std::move(ne);
    ++it;
    for (double b : beta)
      if (std::abs(b) > 50.0)
        throw monotone_likelihood_error(
            "a coefficient passed 50 in absolute value; partial likelihood looks monotone");
  }

  cox_fit f;
  f.beta = beta;
  f.hessian = e.info;
  {
    std::vector<double> L = e.info;
    if (!cholesky(L, p)) throw singular_hessian_error("observed information is singular");
    f.hessian_inv = chol_inverse(L, p);
  }
  f.time = v.etimes;
  f.dcount = v.ecount;
  f.converged = true;
  f.iterations = it;
  f.score_norm = snorm;

  // baseline increments, risk-set means and score residuals in one pass
  const size_t m = f.time.size();
  f.jump.assign(m, 0.0);
  f.logD.assign(m, 0.0);
  f.xbar.assign(m * size_t(p), 0.0);
  f.resid.assign(size_t(v.n) * p, 0.0);
  std::vector<int> ridx(v.n);
  std::vector<double> reta(v.n);
  std::vector<const double*> rx(v.n);
  for (size_t k = 0; k < m; ++k) {
    const double t = f.time[k];
    const int d = f.dcount[k];
    int nr = 0;
    double emax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.n; ++i) {
      if (!(v.entry[i] < t && t <= v.exit[i])) continue;
      const double* x = v.traj[i]->at(t);
      double et = dot(beta.data(), x, p);
      ridx[nr] = i;
      reta[nr] = et;
      rx[nr] = x;
      ++nr;
      if (et > emax) emax = et;
    }
    double s0 = 0.0;
    for (int r = 0; r < nr; ++r) s0 += std::exp(reta[r] - emax);
    double* xb = f.xbar.data() + k * size_t(p);
    for (int r = 0; r < nr; ++r) {
      const double w = std::exp(reta[r] - emax) / s0;
      for (int a = 0; a < p; ++a) xb[a] += w * rx[r][a];
    }
    f.logD[k] = emax + std::log(s0);
    f.jump[k] = d * std::exp(-f.logD[k]);
    for (int r = 0; r < nr; ++r) {
      const int i = ridx[r];
      const double dn = (v.exit[i] == t && v.event[i]) ? 1.0 : 0.0;
      const double dm = dn - std::exp(reta[r] - emax) * d / s0;
      for (int a = 0; a < p; ++a) f.resid[size_t(i) * p + a] += (rx[r][a] - xb[a]) * dm;
    }
  }
  return f;
}

std::vector<double> martingale_row(const counting_view& v, const cox_fit& f, int i) {
  std::vector<double> dm(f.time.size(), 0.0);
  for (size_t k = 0; k < f.time.size(); ++k) {
    const double t = f.time[k];
    if (!(v.entry[i] < t && t <= v.exit[i])) continue;
    const double eta = dot(f.beta.data(), v.traj[i]->at(t), v.p);
    dm[k] = -std::exp(eta - f.logD[k]) * f.dcount[k];
    if (v.exit[i] == t && v.event[i]) dm[k] += 1.0;
  }
  return dm;
}

}  // namespace rmdur
