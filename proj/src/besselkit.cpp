#include "lambdares/besselkit.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lres {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr cplx kI{0.0, 1.0};

// Regime boundaries for the principal-window evaluation.
constexpr double kSeriesRadius = 2.0;
constexpr double kHankelAsymptoticRadius = 35.0;
// exp(Im z) must stay representable: J grows like e^{Im z} in the upper half plane.
constexpr double kMaxImag = 700.0;

void check_order(int order) {
  if (order < 0 || order > kMaxBesselOrder) {
    throw std::invalid_argument("Bessel order " + std::to_string(order) + " outside [0, " +
                                std::to_string(kMaxBesselOrder) + "]");
  }
}

// J_n(z) by the ascending series; only used for |z| <= kSeriesRadius.
cplx j_series(int n, cplx z) {
  const cplx half = 0.5 * z;
  cplx lead = 1.0;
  for (int k = 1; k <= n; ++k) lead *= half / static_cast<double>(k);
  const cplx q = -half * half;
  cplx term = lead;
  cplx sum = lead;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Y_n(z), n in {0, 1}, from the logarithmic series.
cplx y_series(int n, cplx z, cplx jn) {
  const cplx half = 0.5 * z;
  const cplx q = -half * half;
  // psi(k+1) + psi(n+k+1), with psi(j+1) = -gamma + H_j
  double hk = 0.0;
  double hnk = 0.0;
  for (int j = 1; j <= n; ++j) hnk += 1.0 / j;
  cplx lead = 1.0;
  for (int k = 1; k <= n; ++k) lead *= half / static_cast<double>(k);
  cplx term = lead;  // (z/2)^n q^k / (k! (n+k)!)
  cplx sum = term * (hk + hnk - 2.0 * kEulerGamma);
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
    hk += 1.0 / k;
    hnk += 1.0 / (n + k);
    const cplx add = term * (hk + hnk - 2.0 * kEulerGamma);
    sum += add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
  }
  cplx y = (2.0 / kPi) * std::log(half) * jn - sum / kPi;
  if (n == 1) y -= 2.0 / (kPi * z);
  return y;
}

// J_0..J_nmax by backward recurrence, normalized with
// e^{-iz} = J_0 + 2 sum_k (-i)^k J_k, which stays well conditioned in the
// upper half plane where every term carries the same e^{Im z} growth.
std::vector<cplx> j_miller(int nmax, cplx z) {
  const double az = std::abs(z);
  const double top = std::max<double>(nmax + 1, az);
  const int start = static_cast<int>(std::ceil(top + 30.0 + 12.0 * std::cbrt(az)));
  std::vector<cplx> out(nmax + 1);
  const cplx two_over_z = 2.0 / z;
  cplx next = 0.0;
  cplx cur = 1e-150;
  cplx norm = 0.0;
  // (-i)^k cycles with period 4
  const cplx phase[4] = {1.0, -kI, -1.0, kI};
  for (int k = start; k >= 0; --k) {
    if (k <= nmax) out[k] = cur;
    norm += (k == 0 ? 1.0 : 2.0) * phase[k % 4] * cur;
    if (k == 0) break;
    const cplx prev = static_cast<double>(k) * two_over_z * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      constexpr double s = 1e-250;
      cur *= s;
      next *= s;
      norm *= s;
      for (int i = k; i <= nmax; ++i) out[i] *= s;
    }
  }
  const cplx ez = std::exp(-kI * z);
  for (auto& v : out) v = (v / norm) * ez;
  return out;
}

// K_nu(w) / (sqrt(pi/(2w)) e^{-w}) for nu in {0,1}, |arg w| <= pi/2, by the
// trapezoid rule on the Laplace-type representation after s = u^2.
cplx k_reduced_integral(int nu, cplx w) {
  const cplx branch = std::sqrt(-2.0 * w);
  const double d = 0.8 * std::abs(branch.imag());
  double h = 2.0 * kPi * d / (41.0 + d * d);
  h = std::min(h, 0.45);
  const double umax = 7.0;
  const int kmax = static_cast<int>(std::ceil(umax / h));
  const cplx inv2w = 1.0 / (2.0 * w);
  auto f = [&](double u) -> cplx {
    const double u2 = u * u;
    const cplx base = 1.0 + u2 * inv2w;
    if (nu == 0) return std::exp(-u2) / std::sqrt(base);
    return std::exp(-u2) * u2 * std::sqrt(base);
  };
  cplx sum = f(0.0);
  for (int k = 1; k <= kmax; ++k) sum += 2.0 * f(k * h);
  sum *= h;
  // 1 / Gamma(nu + 1/2)
  const double inv_gamma = nu == 0 ? 1.0 / std::sqrt(kPi) : 2.0 / std::sqrt(kPi);
  return sum * inv_gamma;
}

// H1_nu(z), nu in {0,1}, from K_nu(-iz) = (i pi / 2) i^nu H1_nu(z).
cplx h1_integral(int nu, cplx z) {
  const cplx w = -kI * z;
  const cplx pref = std::sqrt(kPi / (2.0 * w)) * std::exp(-w);
  const cplx k = pref * k_reduced_integral(nu, w);
  const cplx rot = nu == 0 ? cplx(1.0) : -kI;
  return 2.0 / (kI * kPi) * rot * k;
}

// Hankel's asymptotic expansion, summed until the terms stop decreasing.
cplx h1_asymptotic(int nu, cplx z) {
  const double mu = 4.0 * nu * nu;
  cplx term = 1.0;
  cplx sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= kI * (mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag <= 1e-18 * std::abs(sum)) break;
  }
  const cplx phase = std::exp(kI * (z - 0.5 * nu * kPi - 0.25 * kPi));
  return std::sqrt(2.0 / (kPi * z)) * phase * sum;
}

struct PrincipalArrays {
  std::vector<cplx> j;   // orders 0..n+1
  std::vector<cplx> h1;  // orders 0..n+1
};

PrincipalArrays principal_arrays(int max_order, cplx z) {
  const double az = std::abs(z);
  if (!(az > 0.0) || !std::isfinite(az)) {
    throw std::invalid_argument("Bessel evaluation needs a finite nonzero argument");
  }
  if (z.imag() < -1e-14 * az) {
    throw std::invalid_argument("point outside the principal window 0 <= arg z < pi");
  }
  if (z.imag() > kMaxImag) {
    throw BesselOverflow("Im z too large: J overflows the double exponent range");
  }
  const int n = max_order + 1;
  PrincipalArrays out;
  cplx h0, h1;
  if (az <= kSeriesRadius) {
    out.j.resize(n + 1);
    for (int k = 0; k <= n; ++k) out.j[k] = j_series(k, z);
    h0 = out.j[0] + kI * y_series(0, z, out.j[0]);
    h1 = out.j[1] + kI * y_series(1, z, out.j[1]);
  } else {
    out.j = j_miller(n, z);
    if (az >= kHankelAsymptoticRadius) {
      h0 = h1_asymptotic(0, z);
      h1 = h1_asymptotic(1, z);
    } else {
      h0 = h1_integral(0, z);
      h1 = h1_integral(1, z);
    }
  }
  out.h1.resize(n + 1);
  out.h1[0] = h0;
  out.h1[1] = h1;
  const cplx two_over_z = 2.0 / z;
  for (int k = 1; k < n; ++k) {
    out.h1[k + 1] = static_cast<double>(k) * two_over_z * out.h1[k] - out.h1[k - 1];
    if (!std::isfinite(out.h1[k + 1].real()) || !std::isfinite(out.h1[k + 1].imag())) {
      throw BesselOverflow("H1 of order " + std::to_string(k + 1) + " overflows at |z| = " +
                           std::to_string(az));
    }
  }
  return out;
}

CylinderEval assemble(int order, cplx z, const PrincipalArrays& a) {
  CylinderEval e;
  e.j = a.j[order];
  e.h1 = a.h1[order];
  if (order == 0) {
    e.jprime = -a.j[1];
    e.h1prime = -a.h1[1];
  } else {
    const double n = order;
    e.jprime = a.j[order - 1] - n / z * a.j[order];
    e.h1prime = a.h1[order - 1] - n / z * a.h1[order];
  }
  e.h2 = 2.0 * e.j - e.h1;
  e.h2prime = 2.0 * e.jprime - e.h1prime;
  return e;
}

void check_window(const LambdaPoint& z) {
  if (z.argument() < 0.0 || z.argument() >= kPi) {
    throw std::invalid_argument("point outside the principal window 0 <= arg z < pi");
  }
}

}  // namespace

CylinderEval eval_principal(int order, cplx z) {
  check_order(order);
  return assemble(order, z, principal_arrays(order, z));
}

CylinderEval eval_principal(int order, const LambdaPoint& z) {
  check_window(z);
  return eval_principal(order, z.project());
}

std::vector<CylinderEval> eval_principal_all(int max_order, const LambdaPoint& z) {
  check_order(max_order);
  check_window(z);
  const cplx zc = z.project();
  const auto arrays = principal_arrays(max_order, zc);
  std::vector<CylinderEval> out;
  out.reserve(max_order + 1);
  for (int l = 0; l <= max_order; ++l) out.push_back(assemble(l, zc, arrays));
  return out;
}

CylinderEval continue_to_sheet(const CylinderEval& b, int order, int m) {
  if (m == 0) return b;
  const double s = ((static_cast<long long>(m) * order) % 2 == 0) ? 1.0 : -1.0;
  // d/dz of f(e^{-i m pi} z) picks up e^{-i m pi} = (-1)^m
  const double sd = (m % 2 == 0) ? s : -s;
  const double twom = 2.0 * m;
  CylinderEval e;
  e.j = s * b.j;
  e.jprime = sd * b.jprime;
  e.h1 = s * (b.h1 - twom * b.j);
  e.h1prime = sd * (b.h1prime - twom * b.jprime);
  e.h2 = s * (b.h2 + twom * b.j);
  e.h2prime = sd * (b.h2prime + twom * b.jprime);
  return e;
}

CylinderEval eval_on_lambda(int order, const LambdaPoint& p) {
  const auto [q, m] = to_principal(p);
  return continue_to_sheet(eval_principal(order, q), order, m);
}

std::vector<CylinderEval> eval_on_lambda_all(int max_order, const LambdaPoint& p) {
  const auto [q, m] = to_principal(p);
  auto vals = eval_principal_all(max_order, q);
  for (int l = 0; l <= max_order; ++l) vals[l] = continue_to_sheet(vals[l], l, m);
  return vals;
}

double wronskian_residual(int order, const LambdaPoint& p) {
  const CylinderEval e = eval_on_lambda(order, p);
  const cplx z = p.project();
  const cplx w = z * (e.j * e.h1prime - e.h1 * e.jprime);
  const double scale = std::abs(z) * (std::abs(e.j * e.h1prime) + std::abs(e.h1 * e.jprime));
  return std::abs(w - cplx(0.0, 2.0 / kPi)) / std::max(1.0, scale);
}

JacobiAngerSum jacobi_anger(double lambda, const Vec2& x, const Vec2& omega, int truncation) {
  if (truncation < 0) throw std::invalid_argument("jacobi_anger: truncation must be >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("jacobi_anger: lambda must be positive");
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) return {cplx(1.0), 0.0};
  const double dtheta = std::atan2(x[1], x[0]) - std::atan2(omega[1], omega[0]);
  const int top = std::min(truncation + 1, kMaxBesselOrder);
  const auto vals = eval_principal_all(top, LambdaPoint(lambda * r, 0.0));
  cplx sum = vals[0].j;
  cplx ipow = 1.0;
  for (int l = 1; l <= truncation && l <= top; ++l) {
    ipow *= kI;
    sum += 2.0 * ipow * std::cos(l * dtheta) * vals[l].j;
  }
  const double tail = truncation + 1 <= top ? 2.0 * std::abs(vals[truncation + 1].j) : 0.0;
  return {sum, tail};
}

}  // namespace lres
