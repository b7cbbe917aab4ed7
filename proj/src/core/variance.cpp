#include "core/variance.hpp"

#include <cmath>

#include "core/numeric.hpp"

namespace rmdur {

namespace {

inline double dot(const double* a, const double* b, int p) {
  double s = 0.0;
  for (int j = 0; j < p; ++j) s += a[j] * b[j];
  return s;
}

// x(u) with the override applied, into buf
inline const double* cf_values(const covariate_trajectory& tr, int col, double val, double u,
                               std::vector<double>& buf) {
  const double* x = tr.at(u);
  if (col < 0) return x;
  buf.assign(x, x + tr.dim);
  buf[col] = val;
  return buf.data();
}

// One process side.  For each weight vector W (values at grid points) and
// each view row i this produces
//   B_i = q(W)' H^{-1} L_i + sum_k w_k(W) dM_ik
// where q(W) = integral of W(t) S(t) v(t) dt over the window, v is the
// coefficient-direction hazard accumulation for the target, and
// w_k = rate(u_k) tail(u_k; W) / D_k.  - S(t) times the bracket in the
// influence components integrates to exactly -B_i, so callers only need
// signs and weight choices.
std::vector<std::vector<double>> side_contributions(
    const counting_view& v, const cox_fit& f, const covariate_trajectory& tr, int col, double val,
    double entry, const std::vector<double>& Sg, const std::vector<std::vector<double>>& W,
    const target_curves& tc) {
  const int p = v.p;
  const size_t m = f.time.size();
  const size_t G = tc.grid.size();
  const size_t ncell = G - 1;
  const size_t nw = W.size();

  std::vector<std::vector<double>> c(nw, std::vector<double>(ncell));
  std::vector<std::vector<double>> T(nw, std::vector<double>(ncell + 1, 0.0));
  for (size_t w = 0; w < nw; ++w) {
    for (size_t j = 0; j < ncell; ++j)
      c[w][j] = W[w][j] * Sg[j] * (tc.grid[j + 1] - tc.grid[j]);
    for (size_t j = ncell; j-- > 0;) T[w][j] = T[w][j + 1] + c[w][j];
  }

  std::vector<double> wk(nw * m, 0.0);
  std::vector<double> q(nw * size_t(p), 0.0);
  std::vector<double> vacc(p, 0.0), buf;
  size_t k = 0;
  for (size_t j = 0; j < ncell; ++j) {
    while (k < m && f.time[k] <= tc.grid[j]) {
      if (f.time[k] > entry) {
        const double u = f.time[k];
        const double rate = std::exp(dot(f.beta.data(), cf_values(tr, col, val, u, buf), p));
        const double* xb = f.xbar.data() + k * size_t(p);
        const double* xt = cf_values(tr, col, val, u, buf);
        for (int a = 0; a < p; ++a) vacc[a] += f.jump[k] * rate * (xt[a] - xb[a]);
        const double invD = std::exp(-f.logD[k]);
        for (size_t w = 0; w < nw; ++w) wk[w * m + k] = rate * T[w][j] * invD;
      }
      ++k;
    }
    for (size_t w = 0; w < nw; ++w)
      for (int a = 0; a < p; ++a) q[w * p + a] += c[w][j] * vacc[a];
  }

  // dfbeta rows: H^{-1} L_i
  std::vector<double> dfb(size_t(v.n) * p);
  for (int i = 0; i < v.n; ++i)
    for (int a = 0; a < p; ++a)
      dfb[size_t(i) * p + a] =
          dot(f.hessian_inv.data() + size_t(a) * p, f.resid.data() + size_t(i) * p, p);

  std::vector<std::vector<double>> B(nw, std::vector<double>(v.n, 0.0));
  const size_t kw_hi = std::upper_bound(f.time.begin(), f.time.end(), tc.tau1) - f.time.begin();
  for (int i = 0; i < v.n; ++i) {
    for (size_t w = 0; w < nw; ++w) B[w][i] = dot(q.data() + w * p, dfb.data() + size_t(i) * p, p);
    size_t klo = std::upper_bound(f.time.begin(), f.time.end(), v.entry[i]) - f.time.begin();
    size_t khi = std::upper_bound(f.time.begin(), f.time.end(), v.exit[i]) - f.time.begin();
    if (khi > kw_hi) khi = kw_hi;
    for (size_t k2 = klo; k2 < khi; ++k2) {
      const double u = f.time[k2];
      if (u <= entry) continue;  // weights vanish before the target's entry
      const double eta = dot(f.beta.data(), v.traj[i]->at(u), p);
      double dm = -std::exp(eta - f.logD[k2]) * f.dcount[k2];
      if (v.exit[i] == u && v.event[i]) dm += 1.0;
      for (size_t w = 0; w < nw; ++w) B[w][i] += wk[w * m + k2] * dm;
    }
  }
  return B;
}

}  // namespace

influence_result influence(const target_spec& t, const target_curves& tc, int n,
                           const counting_view& vp, const cox_fit& fp, const counting_view& vr,
                           const cox_fit& fr) {
  influence_result out;
  out.psi_lt.assign(n, 0.0);
  out.psi_cap.assign(n, 0.0);
  out.psi_rt.assign(n, 0.0);

  {
    // promotion side always enters weighted by S^R
    auto BP = side_contributions(vp, fp, *t.x, t.xcol, t.xval, t.p1, tc.sp, {tc.sr}, tc);
    for (int i = 0; i < vp.n; ++i) {
      const int s = vp.subject[i];
      out.psi_lt[s] -= BP[0][i];
      out.psi_cap[s] += BP[0][i];
    }
  }
  if (tc.has_r) {
    std::vector<double> ones(tc.grid.size(), 1.0);
    auto BR = side_contributions(vr, fr, *t.z, t.zcol, t.zval, tc.r1, tc.sr, {ones, tc.sp}, tc);
    for (int i = 0; i < vr.n; ++i) {
      const int s = vr.subject[i];
      const double b1 = BR[0][i], bsp = BR[1][i];
      out.psi_lt[s] -= bsp;
      out.psi_cap[s] -= b1 - bsp;
      out.psi_rt[s] += b1;
    }
  }

  kahan slt, scap, srt;
  for (int i = 0; i < n; ++i) {
    slt.add(out.psi_lt[i] * out.psi_lt[i]);
    scap.add(out.psi_cap[i] * out.psi_cap[i]);
    srt.add(out.psi_rt[i] * out.psi_rt[i]);
  }
  out.se.lt = std::sqrt(slt.sum());
  out.se.cap = std::sqrt(scap.sum());
  out.se.rt = std::sqrt(srt.sum());
  return out;
}

namespace {

// literal single-subject component build for one side; fills xi1/xi2 at grid
// points: xi1(t) = -S(t) v(t)' A^{-1} U_i, xi2(t) = -S(t) K_i(t) with
// A = H/n, K_i(t) = integral of rate dM_i / S0 over (entry, t], S0 = D/n
void side_row(const counting_view& v, const cox_fit& f, const covariate_trajectory& tr, int col,
              double val, double entry, const std::vector<double>& Sg, const target_curves& tc,
              int n, int row, std::vector<double>& xi1, std::vector<double>& xi2) {
  const int p = v.p;
  const size_t m = f.time.size();
  const size_t G = tc.grid.size();
  xi1.assign(G, 0.0);
  xi2.assign(G, 0.0);
  if (row < 0) return;

  std::vector<double> ainvu(p);
  for (int a = 0; a < p; ++a)
    ainvu[a] =
        n * dot(f.hessian_inv.data() + size_t(a) * p, f.resid.data() + size_t(row) * p, p);

  std::vector<double> vacc(p, 0.0), buf;
  double kacc = 0.0;
  size_t k = 0;
  for (size_t j = 0; j < G; ++j) {
    while (k < m && f.time[k] <= tc.grid[j]) {
      const double u = f.time[k];
      if (u > entry) {
        const double* xt = cf_values(tr, col, val, u, buf);
        const double rate = std::exp(dot(f.beta.data(), xt, p));
        const double* xb = f.xbar.data() + k * size_t(p);
        for (int a = 0; a < p; ++a) vacc[a] += f.jump[k] * rate * (xt[a] - xb[a]);
        if (v.entry[row] < u && u <= v.exit[row]) {
          const double eta = dot(f.beta.data(), v.traj[row]->at(u), p);
          double dm = -std::exp(eta - f.logD[k]) * f.dcount[k];
          if (v.exit[row] == u && v.event[row]) dm += 1.0;
          kacc += rate * dm * double(n) * std::exp(-f.logD[k]);
        }
      }
      ++k;
    }
    xi1[j] = -Sg[j] * dot(vacc.data(), ainvu.data(), p);
    xi2[j] = -Sg[j] * kacc;
  }
}

}  // namespace

influence_row influence_row_for(const target_spec& t, const target_curves& tc, int n,
                                const counting_view& vp, const cox_fit& fp,
                                const counting_view& vr, const cox_fit& fr, int subject) {
  influence_row out;
  int rowp = -1, rowr = -1;
  for (int i = 0; i < vp.n; ++i)
    if (vp.subject[i] == subject) rowp = i;
  for (int i = 0; i < vr.n; ++i)
    if (vr.subject[i] == subject) rowr = i;

  side_row(vp, fp, *t.x, t.xcol, t.xval, t.p1, tc.sp, tc, n, rowp, out.xi1p, out.xi2p);
  if (tc.has_r)
    side_row(vr, fr, *t.z, t.zcol, t.zval, tc.r1, tc.sr, tc, n, rowr, out.xi1r, out.xi2r);
  else {
    out.xi1r.assign(tc.grid.size(), 0.0);
    out.xi2r.assign(tc.grid.size(), 0.0);
  }

  kahan lt, cap, rt;
  for (size_t j = 0; j + 1 < tc.grid.size(); ++j) {
    const double dt = tc.grid[j + 1] - tc.grid[j];
    const double xp = out.xi1p[j] + out.xi2p[j];
    const double xr = out.xi1r[j] + out.xi2r[j];
    lt.add((tc.sr[j] * xp + tc.sp[j] * xr) * dt);
    cap.add((-tc.sr[j] * xp + (1.0 - tc.sp[j]) * xr) * dt);
    rt.add(-xr * dt);
  }
  out.int_lt = lt.sum() / n;
  out.int_cap = cap.sum() / n;
  out.int_rt = rt.sum() / n;
  return out;
}

}  // namespace rmdur
