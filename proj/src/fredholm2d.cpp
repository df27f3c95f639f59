#include "lambdares/fredholm2d.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "lambdares/lattice_spectrum.hpp"
#include "lambdares/parallel.hpp"

namespace lres {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kEulerGamma = 0.57721566490153286061;

cplx kernel_reduction(const LambdaPoint& p, double r) {
  const auto pr = to_principal(p);
  const auto e = eval_principal(0, pr.principal.scaled(r));
  return 0.25 * kI * e.h1 + static_cast<double>(sheet_sign() * pr.m) * kI * 0.5 * e.j;
}

cplx kernel(const LambdaPoint& p, double r, SheetRoute route) {
  return route == SheetRoute::Direct ? r0_kernel(p, r) : kernel_reduction(p, r);
}

// Pick s in {+1, -1} making lhs == base + s * jump; both candidates must be
// decisively separated or the conventions are inconsistent.
int pick_sign(cplx lhs, cplx base, cplx jump, const char* what) {
  const double plus = std::abs(lhs - (base + jump));
  const double minus = std::abs(lhs - (base - jump));
  const double scale = std::max(1.0, std::abs(lhs));
  const double best = std::min(plus, minus), worst = std::max(plus, minus);
  if (!(best < 1e-12 * scale) || !(worst > 1e-3 * scale)) {
    throw std::logic_error(std::string("sign calibration failed for ") + what);
  }
  return plus < minus ? 1 : -1;
}

KMatrix prepare(const Potential2D& v, const LambdaPoint& p, SheetRoute route) {
  KMatrix k;
  k.point = p;
  k.n = v.n();
  k.cell = v.cell();
  k.route = route;
  for (int iy = 0; iy < v.n(); ++iy) {
    for (int ix = 0; ix < v.n(); ++ix) {
      const double val = v.at(ix, iy);
      if (val == 0.0) continue;
      k.active.push_back(iy * v.n() + ix);
      k.weight.push_back(std::sqrt(std::abs(val)));
      k.sign.push_back(val > 0.0 ? 1.0 : -1.0);
    }
  }
  if (k.n > 0) k.coarse = 2.0 * kPi / (p.modulus() * k.cell) < 8.0;
  k.entries.resize(static_cast<long>(k.active.size()), static_cast<long>(k.active.size()));
  return k;
}

Vec2 center_of(const Potential2D& v, int flat) {
  return {v.coord(flat % v.n()), v.coord(flat / v.n())};
}

// T weighted by |V|^{1/2} on both sides, with the cell area.
Eigen::MatrixXcd weighted_t(const KMatrix& k, const LambdaPoint& p) {
  const long n = static_cast<long>(k.active.size());
  Eigen::MatrixXcd t(n, n);
  const double h2 = k.cell * k.cell;
  parallel_for(n, true, [&](long a) {
    const int ax = k.active[a] % k.n, ay = k.active[a] / k.n;
    for (long b = 0; b < n; ++b) {
      const int bx = k.active[b] % k.n, by = k.active[b] / k.n;
      const double r = k.cell * std::hypot(ax - bx, ay - by);
      const cplx tv = r == 0.0 ? cplx(0.5) : 0.5 * eval_on_lambda(0, p.scaled(r)).j;
      t(a, b) = k.weight[a] * tv * h2 * k.weight[b];
    }
  });
  return t;
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& a) { return 0.5 * (a + a.adjoint()); }

FarFieldSMatrix farfield_with_constant(const Potential2D& v, const LambdaPoint& p, int n_angles, cplx c) {
  if (n_angles <= 0 || n_angles % 2 != 0) throw std::invalid_argument("n_angles must be positive and even");
  FarFieldSMatrix out;
  out.point = p;
  out.n_angles = n_angles;
  out.s = Eigen::MatrixXcd::Identity(n_angles, n_angles);
  const KMatrix k = k_matrix(v, p);
  const long n = static_cast<long>(k.active.size());
  if (n == 0) return out;
  const cplx lam = p.project();
  Eigen::MatrixXcd e_in(n, n_angles), e_out(n, n_angles);
  for (long i = 0; i < n; ++i) {
    const Vec2 x = center_of(v, k.active[i]);
    for (int j = 0; j < n_angles; ++j) {
      const double th = 2.0 * kPi * j / n_angles;
      const cplx phase = kI * lam * (x[0] * std::cos(th) + x[1] * std::sin(th));
      e_in(i, j) = k.sign[i] * k.weight[i] * std::exp(phase);
      e_out(i, j) = k.weight[i] * std::exp(-phase);
    }
  }
  Eigen::MatrixXcd ik = Eigen::MatrixXcd::Identity(n, n) + k.entries;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ik);
  if (!(lu.rcond() > 1e-14)) {
    out.pole = true;
    return out;
  }
  const Eigen::MatrixXcd x = lu.solve(e_in);
  const Eigen::MatrixXcd a = (k.cell * k.cell) * (e_out.transpose() * x);
  out.s += c * (2.0 * kPi / n_angles) * a;
  return out;
}

}  // namespace

cplx r0_kernel(const LambdaPoint& p, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("r0_kernel: r must be positive");
  return 0.25 * kI * eval_on_lambda(0, p.scaled(r)).h1;
}

cplx t_kernel(const LambdaPoint& p, const Vec2& x, const Vec2& y) {
  const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
  if (r == 0.0) return 0.5;
  return 0.5 * eval_on_lambda(0, p.scaled(r)).j;
}

int sheet_sign() {
  static const int s = [] {
    const LambdaPoint p(1.3, 0.4);
    const double r = 0.7;
    const auto e = eval_principal(0, p.scaled(r));
    return pick_sign(r0_kernel(rotate(p, 1), r), 0.25 * kI * e.h1, kI * 0.5 * e.j, "R0 sheet reduction");
  }();
  return s;
}

int resdiff_sign() {
  static const int s = [] {
    const LambdaPoint p(1.3, 0.4);
    const double r = 0.7;
    const cplx lhs = r0_kernel(p, r) - r0_kernel(rotate(p, 1), r);
    const cplx rhs = kAlpha2 * 2.0 * kPi * eval_principal(0, p.scaled(r)).j;
    return pick_sign(lhs, 0.0, rhs, "resolvent difference");
  }();
  return s;
}

cplx r0_cell_integral(const LambdaPoint& p, double h, SheetRoute route) {
  if (!(h > 0.0)) throw std::invalid_argument("cell size must be positive");
  const double s = 0.5 * h;
  // int_{[-s,s]^2} log|y| dy
  const double log_part = 2.0 * s * s * (2.0 * std::log(s) + std::log(2.0) - 3.0 + 0.5 * kPi);
  // R0(r) + log(r) / (2 pi) at r = 0
  cplx smooth;
  if (route == SheetRoute::Direct) {
    smooth = 0.25 * kI -
             (std::log(0.5 * p.modulus()) + kI * p.argument() + kEulerGamma) / (2.0 * kPi);
  } else {
    const auto pr = to_principal(p);
    smooth = 0.25 * kI -
             (std::log(0.5 * p.modulus()) + kI * pr.principal.argument() + kEulerGamma) / (2.0 * kPi) +
             static_cast<double>(sheet_sign() * pr.m) * kI * 0.5;
  }
  return -log_part / (2.0 * kPi) + smooth * h * h;
}

KMatrix k_matrix(const Potential2D& v, const LambdaPoint& p, SheetRoute route, Execution exec) {
  KMatrix k = prepare(v, p, route);
  const long n = static_cast<long>(k.active.size());
  if (n == 0) return k;
  const int g = k.n;
  const double h2 = k.cell * k.cell;
  // kernel times cell area over offsets (|dx|, |dy|)
  std::vector<cplx> table(static_cast<size_t>(g) * g);
  const bool par = exec == Execution::Parallel;
  parallel_for(static_cast<long>(table.size()), par, [&](long t) {
    const int dx = static_cast<int>(t % g), dy = static_cast<int>(t / g);
    table[t] = (dx == 0 && dy == 0) ? r0_cell_integral(p, k.cell, route)
                                    : kernel(p, k.cell * std::hypot(dx, dy), route) * h2;
  });
  parallel_for(n, par, [&](long a) {
    const int ax = k.active[a] % g, ay = k.active[a] / g;
    const double left = k.sign[a] * k.weight[a];
    for (long b = 0; b < n; ++b) {
      const int dx = std::abs(ax - k.active[b] % g), dy = std::abs(ay - k.active[b] / g);
      k.entries(a, b) = left * table[static_cast<size_t>(dy) * g + dx] * k.weight[b];
    }
  });
  return k;
}

KMatrix k_matrix_reference(const Potential2D& v, const LambdaPoint& p, SheetRoute route) {
  KMatrix k = prepare(v, p, route);
  const long n = static_cast<long>(k.active.size());
  const double h2 = k.cell * k.cell;
  for (long a = 0; a < n; ++a) {
    const Vec2 xa = center_of(v, k.active[a]);
    for (long b = 0; b < n; ++b) {
      cplx g;
      if (a == b) {
        g = r0_cell_integral(p, k.cell, route);
      } else {
        const Vec2 xb = center_of(v, k.active[b]);
        g = kernel(p, std::hypot(xa[0] - xb[0], xa[1] - xb[1]), route) * h2;
      }
      k.entries(a, b) = k.sign[a] * k.weight[a] * g * k.weight[b];
    }
  }
  return k;
}

FredholmDet fredholm_det(const KMatrix& k) {
  FredholmDet d;
  const long n = k.entries.rows();
  if (n == 0) {
    d.value = 1.0;
    d.log_value = 0.0;
    d.regularized_log = 0.0;
    return d;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Eigen::MatrixXcd::Identity(n, n) + k.entries);
  const auto& m = lu.matrixLU();
  cplx logd = 0.0;
  for (long i = 0; i < n; ++i) {
    if (m(i, i) == cplx(0.0)) {
      d.singular = true;
      d.value = 0.0;
      d.log_value = cplx(-HUGE_VAL, 0.0);
      d.regularized_log = d.log_value;
      return d;
    }
    logd += std::log(m(i, i));
  }
  if (lu.permutationP().determinant() < 0) logd += kI * kPi;
  d.log_value = logd;
  d.value = std::exp(logd);
  d.regularized_log = logd - k.entries.trace();
  return d;
}

FredholmDet fredholm_det(const Potential2D& v, const LambdaPoint& p) { return fredholm_det(k_matrix(v, p)); }

DetZero polish_det_zero(const Potential2D& v, const LambdaPoint& start, int multiplicity, double tol,
                        int max_iter) {
  if (multiplicity < 1) throw std::invalid_argument("polish_det_zero: multiplicity must be positive");
  DetZero out;
  out.location = start;
  for (int it = 1; it <= max_iter; ++it) {
    const LambdaPoint p = out.location;
    const double h = 1e-5 * p.modulus();
    // det values scaled by det(p) stay analytic through the zero, unlike log det
    const cplx l0 = fredholm_det(v, p).log_value;
    const cplx fp = std::exp(fredholm_det(v, lift_near(p.project() + h, p)).log_value - l0);
    const cplx fm = std::exp(fredholm_det(v, lift_near(p.project() - h, p)).log_value - l0);
    const cplx dlog = (fp - fm) / (2.0 * h);
    if (!std::isfinite(dlog.real()) || !std::isfinite(dlog.imag()) || dlog == cplx(0.0)) break;
    const cplx step = static_cast<double>(multiplicity) / dlog;
    const cplx z = p.project() - step;
    if (!(std::abs(z) > 0.0)) break;
    out.location = lift_near(z, p);
    out.iterations = it;
    out.last_step = std::abs(step) / std::abs(z);
    if (out.last_step < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::SkewAdjointT:
      return "skew-adjoint-T";
    case CertificateKind::PositiveBarrier:
      return "positive-barrier";
    case CertificateKind::WellEigenvalueMatch:
      return "well-eigenvalue-match";
  }
  return "?";
}

std::vector<Certificate> fixed_sign_certificates(const Potential2D& v, double sigma, int m) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const SignClass cls = sign_class(v);
  if (cls == SignClass::Mixed) throw std::invalid_argument("fixed-sign certificates need V >= 0 or V <= 0");
  const LambdaPoint base(sigma, 0.5 * kPi);
  const KMatrix k0 = k_matrix(v, base);
  const long n = k0.entries.rows();
  std::vector<Certificate> out;

  Certificate skew{CertificateKind::SkewAdjointT, sigma, m, 0.0, 0.0, 0.0, 0, false, {}};
  skew.threshold = 1e-10;
  if (m != 0 && n > 0) {
    const Eigen::MatrixXcd b = (kI * static_cast<double>(m)) * weighted_t(k0, base);
    const double nb = b.norm();
    skew.measured = nb > 0.0 ? (b + b.adjoint()).norm() / nb : 0.0;
  }
  skew.pass = skew.measured <= skew.threshold;
  skew.detail = m == 0 ? "B = 0 on the physical sheet" : "Frobenius norms";
  out.push_back(skew);

  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) + k0.entries;
  Eigen::VectorXd eig;
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    eig = es.eigenvalues();
  }

  if (cls == SignClass::NonNegative) {
    Certificate pos{CertificateKind::PositiveBarrier, sigma, m, 0.0, 0.0, 0.0, 0, false, {}};
    pos.threshold = 1.0 - 1e-8;
    pos.measured = n > 0 ? eig.minCoeff() : 1.0;
    const FredholmDet dm = fredholm_det(k_matrix(v, rotate(base, m)));
    const double log_abs = dm.log_value.real();
    pos.secondary = std::exp(log_abs);
    // Re sigma(A + B) >= min sigma(Herm A) when B is skew-adjoint
    const double bound = n > 0 ? static_cast<double>(n) * std::log(pos.measured) : 0.0;
    pos.pass = pos.measured >= pos.threshold && log_abs >= bound - 1e-8 * std::max<long>(n, 1);
    pos.detail = "log|det| = " + std::to_string(log_abs) + ", bound " + std::to_string(bound);
    out.push_back(pos);
  }

  if (cls == SignClass::NonPositive) {
    Certificate well{CertificateKind::WellEigenvalueMatch, sigma, m, 0.0, 0.0, 0.0, 0, false, {}};
    int bs = 0;
    for (long i = 0; i < eig.size(); ++i) bs += eig[i] < 0.0 ? 1 : 0;
    well.measured = bs;
    const double e = -sigma * sigma;
    const int at = lattice_count_below(v, e);
    const int lo = lattice_count_below(v, 1.05 * e);
    const int hi = lattice_count_below(v, 0.95 * e);
    well.oracle_total = lattice_count_below(v, 0.0);
    well.secondary = at;
    well.threshold = well.oracle_total;
    well.pass = bs <= well.oracle_total && lo <= bs && bs <= hi;
    well.detail = "lattice counts below -sigma^2 (x1.05, x1, x0.95): " + std::to_string(lo) + " " +
                  std::to_string(at) + " " + std::to_string(hi);
    out.push_back(well);
  }
  return out;
}

cplx farfield_constant() {
  static const cplx c = [] {
    const RadialPotential ref = RadialPotential::step(1.0, -3.0);
    const Potential2D grid = Potential2D::rasterize(ref, 32, Potential2D::snug_half_width(1.0, 32));
    const LambdaPoint p(1.2, 0.0);
    const int n = 32;
    const auto unit = farfield_with_constant(grid, p, n, 1.0);
    const cplx mode0 = (unit.s - Eigen::MatrixXcd::Identity(n, n)).sum() / static_cast<double>(n);
    const cplx s0 = smatrix_channel(Scatterer(ref), 0, p).s_value;
    const cplx measured = (s0 - 1.0) / mode0;
    // the rasterized disc is only accurate to a few digits: snap to the
    // nearest phase * 2^k / (4 pi)
    cplx best = measured;
    double best_err = HUGE_VAL;
    for (int q = 0; q < 4; ++q) {
      for (int k = -2; k <= 2; ++k) {
        const cplx cand = std::pow(kI, q) * std::ldexp(1.0, k) / (4.0 * kPi);
        const double err = std::abs(measured / cand - 1.0);
        if (err < best_err) {
          best_err = err;
          best = cand;
        }
      }
    }
    if (best_err > 0.1) throw std::logic_error("far-field constant calibration did not settle");
    return best;
  }();
  return c;
}

FarFieldSMatrix farfield_smatrix(const Potential2D& v, const LambdaPoint& p, int n_angles) {
  return farfield_with_constant(v, p, n_angles, farfield_constant());
}

Eigen::MatrixXcd parity_matrix(int n_angles) {
  if (n_angles <= 0 || n_angles % 2 != 0) throw std::invalid_argument("n_angles must be positive and even");
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n_angles, n_angles);
  for (int j = 0; j < n_angles; ++j) r(j, (j + n_angles / 2) % n_angles) = 1.0;
  return r;
}

}  // namespace lres
