// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "t_oracle.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace transel::testing {
namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr long double kXgk[8] = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
constexpr long double kWgk[8] = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
constexpr long double kWg[4] = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

using Fn = std::function<long double(long double)>;

long double adaptive(const Fn& f, long double a, long double b, long double tol, int depth) {
  const long double c = 0.5L * (a + b);
  const long double h = 0.5L * (b - a);
  const long double fc = f(c);
  long double k = kWgk[7] * fc;
  long double g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const long double dx = h * kXgk[i];
    const long double s = f(c - dx) + f(c + dx);
    k += kWgk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  k *= h;
  g *= h;
  if (depth <= 0 || std::fabs(k - g) <= tol) return k;
  return adaptive(f, a, c, 0.5L * tol, depth - 1) + adaptive(f, c, b, 0.5L * tol, depth - 1);
}

long double integrate(const Fn& f, long double a, long double b) { return adaptive(f, a, b, 1e-18L, 48); }

long double mean(std::span<const double> v) {
  long double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

long double var(std::span<const double> v) {
  const long double m = mean(v);
  long double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

long double t_density(long double x, long double df) {
  const long double log_c =
      std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5L * std::log(df * std::numbers::pi_v<long double>);
  return std::exp(log_c - (df + 1) / 2 * std::log1p(x * x / df));
}

long double two_sided_p(long double t, long double df) {
  const long double at = std::fabs(t);
  if (std::isinf(at)) return 0;
  if (at <= 1) {
    return 1 - 2 * integrate([df](long double x) { return t_density(x, df); }, 0, at);
  }
  // Tail via x = |t| / u, u in (0, 1].
  return 2 * integrate(
                 [df, at](long double u) {
                   if (u <= 0) return 0.0L;
                   return t_density(at / u, df) * at / (u * u);
                 },
                 0, 1);
}

long double t_cdf(long double t, long double df) {
  const long double tail = two_sided_p(t, df) / 2;
  return t >= 0 ? 1 - tail : tail;
}

long double t_quantile(long double p, long double df) {
  long double lo = -1e3L, hi = 1e3L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

WelchReference welch(std::span<const double> a, std::span<const double> b) {
  const long double va = var(a) / a.size();
  const long double vb = var(b) / b.size();
  WelchReference r;
  r.t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (a.size() - 1) + vb * vb / (b.size() - 1));
  r.p = two_sided_p(r.t, r.df);
  return r;
}

WelchReference student(std::span<const double> a, std::span<const double> b) {
  const long double na = a.size(), nb = b.size();
  const long double pooled = ((na - 1) * var(a) + (nb - 1) * var(b)) / (na + nb - 2);
  WelchReference r;
  r.t = (mean(a) - mean(b)) / std::sqrt(pooled * (1 / na + 1 / nb));
  r.df = na + nb - 2;
  r.p = two_sided_p(r.t, r.df);
  return r;
}

}  // namespace transel::testing
