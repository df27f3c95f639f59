#include "lambdares/channels.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

#include "lambdares/besselkit.hpp"
#include "lambdares/parallel.hpp"

namespace lres {
namespace {

constexpr cplx kI{0.0, 1.0};

// sqrt(k2) in the principal Bessel window 0 <= arg < pi.
LambdaPoint window_root(cplx k2) {
  const double mod = std::sqrt(std::abs(k2));
  double arg = 0.5 * std::arg(k2);  // (-pi/2, pi/2]
  if (arg < 0.0) arg += kPi;
  if (arg >= kPi) arg = 0.0;  // -0 rounded up
  return LambdaPoint(mod, arg);
}

struct RadialState {
  cplx r, rp;  // R and dR/dr
};

// Regular solution on the innermost disc r <= r1, normalized R ~ r^l.
std::vector<RadialState> inner_disc(int max_ell, cplx k2, double r1) {
  std::vector<RadialState> out(max_ell + 1);
  const double kr = std::sqrt(std::abs(k2)) * r1;
  if (k2 == cplx(0.0) || kr <= 2.0) {
    const cplx q = -k2 * r1 * r1 / 4.0;
    for (int l = 0; l <= max_ell; ++l) {
      cplx term = 1.0;
      cplx sum = 1.0;
      cplx dsum = static_cast<double>(l);
      for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (l + k));
        sum += term;
        dsum += static_cast<double>(l + 2 * k) * term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      }
      const double rl = std::pow(r1, l);
      out[l] = {rl * sum, rl / r1 * dsum};
    }
    return out;
  }
  const LambdaPoint kappa = window_root(k2);
  const cplx kc = kappa.project();
  const auto vals = eval_principal_all(max_ell, kappa.scaled(r1));
  for (int l = 0; l <= max_ell; ++l) {
    // l! (2/kappa)^l J_l(kappa r) is entire in kappa^2
    const cplx norm = std::exp(std::lgamma(l + 1.0) + static_cast<double>(l) * std::log(2.0 / kc));
    out[l] = {norm * vals[l].j, norm * kc * vals[l].jprime};
  }
  return out;
}

// Carries (R, R') across the annulus [r0, r1] where V is constant.
void transfer_annulus(std::vector<RadialState>& st, cplx k2, double r0, double r1) {
  const int max_ell = static_cast<int>(st.size()) - 1;
  if (k2 == cplx(0.0)) {
    for (int l = 0; l <= max_ell; ++l) {
      const cplx R = st[l].r, Rp = st[l].rp;
      if (l == 0) {
        const cplx b = Rp * r0;
        const cplx a = R - b * std::log(r0);
        st[l] = {a + b * std::log(r1), b / r1};
      } else {
        const double dl = l;
        const cplx a = (R + r0 * Rp / dl) / (2.0 * std::pow(r0, l));
        const cplx b = (R - r0 * Rp / dl) * std::pow(r0, l) / 2.0;
        st[l] = {a * std::pow(r1, l) + b * std::pow(r1, -l),
                 dl * (a * std::pow(r1, l - 1) - b * std::pow(r1, -l - 1))};
      }
    }
    return;
  }
  const LambdaPoint kappa = window_root(k2);
  const cplx kc = kappa.project();
  const auto at0 = eval_principal_all(max_ell, kappa.scaled(r0));
  const auto at1 = eval_principal_all(max_ell, kappa.scaled(r1));
  // W_r[H1(kappa r), H2(kappa r)] = -4i / (pi r)
  const cplx w0 = -4.0 * kI / (kPi * r0);
  for (int l = 0; l <= max_ell; ++l) {
    const cplx R = st[l].r, Rp = st[l].rp;
    const auto& e0 = at0[l];
    const cplx alpha = (R * kc * e0.h2prime - Rp * e0.h2) / w0;
    const cplx beta = (Rp * e0.h1 - R * kc * e0.h1prime) / w0;
    const auto& e1 = at1[l];
    st[l] = {alpha * e1.h1 + beta * e1.h2, kc * (alpha * e1.h1prime + beta * e1.h2prime)};
  }
}

std::vector<RadialState> piecewise_states(const RadialPotential& v, int max_ell, cplx zsq) {
  const auto& r = v.breakpoints();
  const auto& vals = v.values();
  auto st = inner_disc(max_ell, zsq - vals[0], r[0]);
  for (size_t i = 1; i < r.size(); ++i) transfer_annulus(st, zsq - vals[i], r[i - 1], r[i]);
  return st;
}

// y = R / r^l satisfies y'' + (2l+1)/r y' = (V - zsq) y with y(0) = 1.
RadialState sampled_state(const RadialPotential& v, int ell, cplx zsq) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<cplx, 2>;
  const double a = v.support();
  const double r0 = 1e-6 * a;
  const cplx c0 = (v(0.0) - zsq) / (2.0 * (ell + 1.0));
  State y = {1.0 + c0 * r0 * r0 / 2.0, c0 * r0};
  const double lfac = 2.0 * ell + 1.0;
  auto rhs = [&](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (v(r) - zsq) * s[0] - lfac / r * s[1];
  };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State, double, State, double,
                                                                    odeint::array_algebra>>(1e-13, 1e-13);
  // restart at every node so kinks of the interpolant fall on step boundaries
  double from = r0;
  for (double node : v.breakpoints()) {
    if (node <= from) continue;
    odeint::integrate_adaptive(stepper, rhs, y, from, node, (node - from) * 1e-3);
    from = node;
  }
  if (!std::isfinite(std::abs(y[0])) || !std::isfinite(std::abs(y[1]))) {
    throw std::runtime_error("radial integration failed to stay finite");
  }
  const double al = std::pow(a, ell);
  return {al * y[0], (ell == 0 ? 0.0 : ell * al / a) * y[0] + al * y[1]};
}

RadialSolution finish(int ell, double a, const RadialState& s) {
  RadialSolution out;
  out.ell = ell;
  out.a = a;
  out.r_at_a = s.r;
  out.rprime_at_a = s.rp;
  const double sa = std::sqrt(a);
  out.u_at_a = sa * s.r;
  out.uprime_at_a = s.r / (2.0 * sa) + sa * s.rp;
  return out;
}

ChannelScattering make_channel(int ell, const LambdaPoint& p, cplx cplus, cplx cminus) {
  ChannelScattering c;
  c.ell = ell;
  c.point = p;
  c.cplus = cplus;
  c.cminus = cminus;
  c.jost = cminus;
  const double scale = std::max(1.0, std::abs(cplus));
  if (std::abs(cminus) < 1e-300 * scale) {
    c.jost_zero = true;
    c.s_value = cplx(HUGE_VAL, 0.0);
  } else {
    c.s_value = cplus / cminus;
  }
  return c;
}

bool vanishes(const RadialPotential& v) {
  return std::all_of(v.values().begin(), v.values().end(), [](double x) { return x == 0.0; });
}

// V = 0: the regular solution is J = (H1 + H2) / 2 exactly
ChannelScattering free_channel(int ell, const LambdaPoint& p) { return make_channel(ell, p, 0.5, 0.5); }

std::vector<ChannelScattering> radial_channels(const RadialPotential& v, int max_ell,
                                               const LambdaPoint& p) {
  if (vanishes(v)) {
    std::vector<ChannelScattering> out;
    for (int l = 0; l <= max_ell; ++l) out.push_back(free_channel(l, p));
    return out;
  }
  const cplx lam = p.project();
  const double a = v.support();
  const auto sols = radial_solve_all(v, max_ell, lam * lam);
  const auto ext = eval_on_lambda_all(max_ell, p.scaled(a));
  const cplx w0 = -4.0 * kI / (kPi * a);
  std::vector<ChannelScattering> out;
  out.reserve(max_ell + 1);
  for (int l = 0; l <= max_ell; ++l) {
    const cplx R = sols[l].r_at_a, Rp = sols[l].rprime_at_a;
    const auto& e = ext[l];
    const cplx cminus = (e.h1 * Rp - lam * e.h1prime * R) / w0;
    const cplx cplus = (R * lam * e.h2prime - Rp * e.h2) / w0;
    out.push_back(make_channel(l, p, cplus, cminus));
  }
  return out;
}

std::vector<ChannelScattering> disc_channels(const DiscObstacle& d, int max_ell, const LambdaPoint& p) {
  const cplx lam = p.project();
  const auto ext = eval_on_lambda_all(max_ell, p.scaled(d.radius));
  std::vector<ChannelScattering> out;
  out.reserve(max_ell + 1);
  for (int l = 0; l <= max_ell; ++l) {
    const auto& e = ext[l];
    cplx b1, b2;
    if (d.condition == BoundaryCondition::Dirichlet) {
      b1 = e.h1;
      b2 = e.h2;
    } else {
      // B[H] = f H(lambda a) - d/dr H(lambda r) at r = a
      b1 = d.robin * e.h1 - lam * e.h1prime;
      b2 = d.robin * e.h2 - lam * e.h2prime;
    }
    out.push_back(make_channel(l, p, -b2, b1));
  }
  return out;
}

}  // namespace

std::vector<RadialSolution> radial_solve_all(const RadialPotential& v, int max_ell, cplx zsq) {
  if (max_ell < 0) throw std::invalid_argument("radial_solve: order must be >= 0");
  if (!std::isfinite(zsq.real()) || !std::isfinite(zsq.imag())) {
    throw std::invalid_argument("radial_solve: non-finite spectral parameter");
  }
  std::vector<RadialSolution> out;
  out.reserve(max_ell + 1);
  const double a = v.support();
  if (v.is_piecewise()) {
    const auto st = piecewise_states(v, max_ell, zsq);
    for (int l = 0; l <= max_ell; ++l) out.push_back(finish(l, a, st[l]));
  } else {
    for (int l = 0; l <= max_ell; ++l) out.push_back(finish(l, a, sampled_state(v, l, zsq)));
  }
  return out;
}

RadialSolution radial_solve(const RadialPotential& v, int ell, cplx zsq) {
  if (ell < 0) throw std::invalid_argument("radial_solve: order must be >= 0");
  if (!v.is_piecewise()) {
    return finish(ell, v.support(), sampled_state(v, ell, zsq));
  }
  return radial_solve_all(v, ell, zsq)[ell];
}

std::vector<ChannelScattering> smatrix_channels(const Scatterer& s, int max_ell, const LambdaPoint& p) {
  if (max_ell < 0 || max_ell > kMaxBesselOrder - 1) {
    throw std::invalid_argument("channel order out of range");
  }
  if (const auto* v = std::get_if<RadialPotential>(&s)) return radial_channels(*v, max_ell, p);
  if (const auto* d = std::get_if<DiscObstacle>(&s)) return disc_channels(*d, max_ell, p);
  throw std::invalid_argument("partial waves need a radial potential or a disc obstacle");
}

ChannelScattering smatrix_channel(const Scatterer& s, int ell, const LambdaPoint& p) {
  if (const auto* v = std::get_if<RadialPotential>(&s); v && vanishes(*v)) return free_channel(ell, p);
  if (const auto* v = std::get_if<RadialPotential>(&s); v && !v->is_piecewise()) {
    // sampled potentials integrate one order at a time
    const cplx lam = p.project();
    const double a = v->support();
    const auto sol = radial_solve(*v, ell, lam * lam);
    const auto e = eval_on_lambda(ell, p.scaled(a));
    const cplx w0 = -4.0 * kI / (kPi * a);
    const cplx cminus = (e.h1 * sol.rprime_at_a - lam * e.h1prime * sol.r_at_a) / w0;
    const cplx cplus = (sol.r_at_a * lam * e.h2prime - sol.rprime_at_a * e.h2) / w0;
    return make_channel(ell, p, cplus, cminus);
  }
  return smatrix_channels(s, ell, p)[ell];
}

cplx jost(const Scatterer& s, int ell, const LambdaPoint& p) { return smatrix_channel(s, ell, p).jost; }

int choose_truncation(const Scatterer& s, const LambdaPoint& p) {
  const double ka = p.modulus() * support_radius(s);
  int trial = std::min(kMaxChannels, static_cast<int>(std::ceil(ka + 8.0 + 3.0 * std::cbrt(ka))));
  while (true) {
    const auto ch = smatrix_channels(s, trial, p);
    for (int l = 0; l <= trial; ++l) {
      if (!ch[l].jost_zero && std::abs(ch[l].s_value - 1.0) < kTruncationTol) return l;
    }
    if (trial == kMaxChannels) return kMaxChannels;
    trial = std::min(kMaxChannels, 2 * trial);
  }
}

TruncatedSMatrix smatrix_truncated(const Scatterer& s, int truncation, const LambdaPoint& p) {
  if (truncation < 0) throw std::invalid_argument("truncation must be >= 0");
  const auto ch = smatrix_channels(s, truncation, p);
  TruncatedSMatrix m;
  m.truncation = truncation;
  m.diagonal.resize(2 * truncation + 1);
  m.parity.resize(2 * truncation + 1);
  for (int l = -truncation; l <= truncation; ++l) {
    m.diagonal[l + truncation] = ch[std::abs(l)].s_value;
    m.parity[l + truncation] = (l % 2 == 0) ? 1 : -1;
  }
  return m;
}

DetS det_s(const Scatterer& s, int truncation, const LambdaPoint& p) {
  if (truncation < 0) throw std::invalid_argument("truncation must be >= 0");
  const auto ch = smatrix_channels(s, truncation, p);
  DetS d;
  d.truncation = truncation;
  d.value = 1.0;
  for (int l = 0; l <= truncation; ++l) {
    if (ch[l].jost_zero) {
      d.pole = true;
      d.value = cplx(HUGE_VAL, 0.0);
      return d;
    }
    const cplx sl = ch[l].s_value;
    d.value *= l == 0 ? sl : sl * sl;
  }
  d.tail = std::abs(ch[truncation].s_value - 1.0);
  return d;
}

DetS det_s(const Scatterer& s, const LambdaPoint& p) { return det_s(s, choose_truncation(s, p), p); }

std::vector<std::vector<ChannelScattering>> channel_table(const Scatterer& s, int max_ell,
                                                          std::span<const LambdaPoint> points,
                                                          Execution exec) {
  std::vector<std::vector<ChannelScattering>> rows(points.size());
  parallel_for(static_cast<long>(points.size()), exec == Execution::Parallel,
               [&](long i) { rows[i] = smatrix_channels(s, max_ell, points[i]); });
  return rows;
}

}  // namespace lres
