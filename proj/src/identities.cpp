#include "lambdares/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <random>

#include "lambdares/besselkit.hpp"
#include "lambdares/channels.hpp"
#include "lambdares/multiplicity.hpp"

namespace lres {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kEulerGamma = 0.57721566490153286061;

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

IdentityReport start(std::string name, std::string scatterer, double threshold) {
  IdentityReport r;
  r.name = std::move(name);
  r.scatterer = std::move(scatterer);
  r.threshold = threshold;
  return r;
}

void finish(IdentityReport& r) { r.pass = r.max_residual <= r.threshold && std::isfinite(r.max_residual); }

void note_skip(IdentityReport& r, const LambdaPoint& p, const std::exception& e) {
  ++r.skipped;
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += "skipped " + to_string(p) + ": " + e.what();
}

// Truncation good enough on a small circle around p (the center itself may be a pole).
int truncation_near(const Scatterer& s, const LambdaPoint& p, double radius) {
  const LambdaContour c(p, radius > 0.0 ? radius : default_msc_radius(p));
  return choose_truncation(s, c.node(0));
}

int weighted(const std::vector<int>& orders, bool positive_part_only, int sign) {
  int sum = 0;
  for (size_t l = 0; l < orders.size(); ++l) {
    const int o = sign * orders[l];
    sum += (l == 0 ? 1 : 2) * (positive_part_only ? std::max(0, o) : o);
  }
  return sum;
}

int mu_r(const Scatterer& s, int truncation, const LambdaPoint& p, double radius) {
  return weighted(channel_orders(s, truncation, p, radius, ChannelQuantity::Jost), true, 1);
}

cplx det_s_value(const Scatterer& s, int truncation, const LambdaPoint& p) {
  return det_s(s, truncation, p).value;
}

// prod_{l=-L}^{L} (a S_l - b)
cplx affine_det(const Scatterer& s, int truncation, const LambdaPoint& p, double a, double b) {
  const auto ch = smatrix_channels(s, truncation, p);
  cplx out = 1.0;
  for (int l = 0; l <= truncation; ++l) {
    const cplx f = a * ch[l].s_value - b;
    out *= l == 0 ? f : f * f;
  }
  return out;
}

void integer_verdict(IdentityReport& r) {
  int spread = 0;
  for (size_t i = 1; i < r.integers.size(); ++i) spread = std::max(spread, std::abs(r.integers[i] - r.integers[0]));
  r.max_residual = spread;
  r.threshold = 0.0;
  finish(r);
}

// R0 minus its log singularity, at r = 0
cplx regular_part(const LambdaPoint& p) {
  return 0.25 * kI - (std::log(0.5 * p.modulus()) + kI * p.argument() + kEulerGamma) / (2.0 * kPi);
}

}  // namespace

double identity_residual(cplx value, cplx reference) {
  const double ref = std::abs(reference);
  const double diff = std::abs(value - reference);
  return ref > 1.0 ? diff / ref : diff;
}

std::vector<LambdaPoint> random_points(std::uint64_t seed, int count, double modulus_lo, double modulus_hi,
                                       int min_sheet, int max_sheet) {
  if (!(modulus_lo > 0.0) || !(modulus_hi >= modulus_lo) || max_sheet < min_sheet || count < 0) {
    throw std::invalid_argument("random_points: bad ranges");
  }
  std::mt19937_64 rng(seed);
  const int sheets = max_sheet - min_sheet + 1;
  constexpr double margin = 1e-3;
  std::vector<LambdaPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double mod = modulus_lo + (modulus_hi - modulus_lo) * unit_draw(rng);
    const int sheet = min_sheet + std::min(sheets - 1, static_cast<int>(unit_draw(rng) * sheets));
    const double frac = margin + (1.0 - 2.0 * margin) * unit_draw(rng);
    out.emplace_back(mod, (sheet + frac) * kPi);
  }
  return out;
}

IdentityReport check_correction(const Scatterer& s, std::span<const LambdaPoint> points, int truncation,
                                ParityMode mode) {
  auto r = start("correction", describe(s), 1e-8);
  r.points.assign(points.begin(), points.end());
  for (const auto& p : points) {
    try {
      const int L = truncation >= 0 ? truncation : choose_truncation(s, p);
      const auto inv = smatrix_channels(s, L, involute(p));
      const auto rot = smatrix_channels(s, L, rotate(p, 1));
      for (int l = 0; l <= L; ++l) {
        // (R S R)_l = S_l; one-sided R leaves (-1)^l S_l
        const double parity = (mode == ParityMode::OneSided && l % 2 == 1) ? -1.0 : 1.0;
        const cplx rhs = 2.0 - parity * rot[l].s_value;
        r.max_residual = std::max(r.max_residual, identity_residual(std::conj(inv[l].s_value), rhs));
      }
    } catch (const BesselOverflow& e) {
      note_skip(r, p, e);
    }
  }
  if (mode != ParityMode::Conjugated) r.name += mode == ParityMode::Dropped ? "[no-parity]" : "[one-sided-parity]";
  finish(r);
  return r;
}

IdentityReport check_correction_farfield(const Potential2D& v, std::span<const LambdaPoint> points, int n_angles,
                                         ParityMode mode) {
  auto r = start("correction-farfield", describe(Scatterer(v)), 1e-2);
  r.points.assign(points.begin(), points.end());
  const Eigen::MatrixXcd par = parity_matrix(n_angles);
  const Eigen::MatrixXcd two = 2.0 * Eigen::MatrixXcd::Identity(n_angles, n_angles);
  for (const auto& p : points) {
    const auto inv = farfield_smatrix(v, involute(p), n_angles);
    const auto rot = farfield_smatrix(v, rotate(p, 1), n_angles);
    if (inv.pole || rot.pole) {
      ++r.skipped;
      continue;
    }
    Eigen::MatrixXcd rhs;
    switch (mode) {
      case ParityMode::Conjugated:
        rhs = two - par * rot.s * par;
        break;
      case ParityMode::Dropped:
        rhs = two - rot.s;
        break;
      case ParityMode::OneSided:
        rhs = two - par * rot.s;
        break;
    }
    const double diff = (inv.s.adjoint() - rhs).cwiseAbs().maxCoeff();
    const double ref = rhs.cwiseAbs().maxCoeff();
    r.max_residual = std::max(r.max_residual, ref > 1.0 ? diff / ref : diff);
  }
  if (mode != ParityMode::Conjugated) r.name += mode == ParityMode::Dropped ? "[no-parity]" : "[one-sided-parity]";
  finish(r);
  return r;
}

IdentityReport check_product(const Scatterer& s, std::span<const LambdaPoint> points, int m, int truncation) {
  if (m < 0) throw std::invalid_argument("check_product: m must be >= 0");
  auto r = start("product[m=" + std::to_string(m) + "]", describe(s), 1e-8);
  r.points.assign(points.begin(), points.end());
  for (const auto& p : points) {
    try {
      const int L = truncation >= 0 ? truncation : choose_truncation(s, p);
      std::vector<cplx> prod(L + 1, 1.0);
      std::vector<ChannelScattering> base;
      for (int j = 0; j <= m; ++j) {
        const auto ch = smatrix_channels(s, L, rotate(p, j));
        if (j == 0) base = ch;
        for (int l = 0; l <= L; ++l) prod[l] *= ch[l].s_value;
      }
      for (int l = 0; l <= L; ++l) {
        const cplx rhs = (m + 1.0) * base[l].s_value - static_cast<double>(m);
        r.max_residual = std::max(r.max_residual, identity_residual(prod[l], rhs));
      }
    } catch (const BesselOverflow& e) {
      note_skip(r, p, e);
    }
  }
  finish(r);
  return r;
}

IdentityReport check_togettophys(const Scatterer& s, const LambdaPoint& p0, int m, double radius) {
  if (m < 0) throw std::invalid_argument("check_togettophys: m must be >= 0");
  auto r = start("togettophys[m=" + std::to_string(m) + "]", describe(s), 0.0);
  r.points = {p0};
  try {
    int L = 0;
    for (int j = 0; j <= m + 1; ++j) L = std::max(L, truncation_near(s, rotate(p0, j), radius));
    const double a = m + 1.0, b = m;
    const int lhs = msc([&](const LambdaPoint& p) { return affine_det(s, L, p, a, b); }, p0, radius);
    int sum = 0;
    for (int j = 0; j <= m; ++j) {
      sum += msc([&](const LambdaPoint& p) { return det_s_value(s, L, p); }, rotate(p0, j), radius);
    }
    const int mu = mu_s_max(s, L, rotate(p0, m + 1), radius) - mu_s_max(s, L, p0, radius);
    r.integers = {lhs, sum, mu};
    integer_verdict(r);
  } catch (const std::exception& e) {
    r.detail = e.what();
    r.max_residual = HUGE_VAL;
    r.pass = false;
  }
  return r;
}

IdentityReport check_prpsm(const Scatterer& s, const LambdaPoint& p0, double radius) {
  auto r = start("prpsm", describe(s), 0.0);
  const LambdaPoint q = involute(p0);
  r.points = {p0, q};
  try {
    const int L = std::max(truncation_near(s, p0, radius), truncation_near(s, q, radius));
    const int jost_diff = mu_r(s, L, p0, radius) - mu_r(s, L, q, radius);
    const int det_order = -msc([&](const LambdaPoint& p) { return det_s_value(s, L, p); }, p0, radius);
    const int mu_diff = mu_s_max(s, L, p0, radius) - mu_s_max(s, L, q, radius);
    r.integers = {jost_diff, det_order, mu_diff};
    integer_verdict(r);
  } catch (const std::exception& e) {
    r.detail = e.what();
    r.max_residual = HUGE_VAL;
    r.pass = false;
  }
  return r;
}

IdentityReport check_rpsp(const Scatterer& s, const LambdaPoint& p1, int m, double radius) {
  if (m < 1) throw std::invalid_argument("check_rpsp: m must be >= 1");
  auto r = start("rpsp[m=" + std::to_string(m) + "]", describe(s), 0.0);
  const LambdaPoint q = rotate(p1, m);
  r.points = {p1, q};
  try {
    const int L = std::max(truncation_near(s, p1, radius), truncation_near(s, q, radius));
    const int jost_diff = mu_r(s, L, q, radius) - mu_r(s, L, p1, radius);
    const double a = m, b = m - 1.0;
    const int order = msc([&](const LambdaPoint& p) { return affine_det(s, L, p, a, b); }, p1, radius);
    r.integers = {jost_diff, order};
    integer_verdict(r);
  } catch (const std::exception& e) {
    r.detail = e.what();
    r.max_residual = HUGE_VAL;
    r.pass = false;
  }
  return r;
}

IdentityReport check_pureimag(const Scatterer& s, std::span<const double> sigmas, int m) {
  auto r = start("pureimag[m=" + std::to_string(m) + "]", describe(s), 1e-8);
  double margin = HUGE_VAL;
  for (const double sigma : sigmas) {
    const LambdaPoint p(sigma, 0.5 * kPi);
    r.points.push_back(p);
    try {
      const int L = choose_truncation(s, p);
      const auto ch = smatrix_channels(s, L, p);
      for (const auto& c : ch) {
        const cplx d = c.s_value - 1.0;
        r.max_residual = std::max(r.max_residual, std::abs(d.real()) / std::max(1.0, std::abs(d)));
      }
      for (const auto& c : smatrix_channels(s, L, rotate(p, m))) {
        margin = std::min(margin, std::abs(c.cminus) / (std::abs(c.cminus) + std::abs(c.cplus)));
      }
    } catch (const BesselOverflow& e) {
      note_skip(r, p, e);
    }
  }
  finish(r);
  char buf[64];
  std::snprintf(buf, sizeof buf, "min jost margin %.3e", margin);
  r.detail = r.detail.empty() ? buf : std::string(buf) + "; " + r.detail;
  r.pass = r.pass && margin > 0.0;
  return r;
}

IdentityReport check_reduction(std::span<const LambdaPoint> points, int m, std::span<const double> distances) {
  auto r = start("reduction[m=" + std::to_string(m) + "]", "free", 1e-10);
  const int sign = sheet_sign();
  int disagreements = 0;
  for (const auto& p0 : points) {
    const LambdaPoint p = to_principal(p0).principal;
    r.points.push_back(p);
    for (const double d : distances) {
      const LambdaPoint q = rotate(p, m);
      const cplx direct = d == 0.0 ? regular_part(q) : r0_kernel(q, d);
      const cplx base = d == 0.0 ? regular_part(p) : r0_kernel(p, d);
      const cplx jump = kI * static_cast<double>(m) * t_kernel(p, {0.0, 0.0}, {d, 0.0});
      r.max_residual = std::max(r.max_residual, identity_residual(direct, base + static_cast<double>(sign) * jump));
      if (m != 0) {
        const int preferred = std::abs(direct - (base + jump)) < std::abs(direct - (base - jump)) ? 1 : -1;
        disagreements += preferred != sign ? 1 : 0;
      }
    }
  }
  finish(r);
  r.detail = "sheet sign " + std::to_string(sign) + ", pointwise disagreements " + std::to_string(disagreements);
  r.pass = r.pass && disagreements == 0;
  return r;
}

IdentityReport check_resdiff_free(std::span<const LambdaPoint> points, std::span<const double> distances) {
  auto r = start("resdiff-free", "free", 1e-10);
  const int sign = resdiff_sign();
  int disagreements = 0;
  for (const auto& p : points) {
    r.points.push_back(p);
    const LambdaPoint q = rotate(p, 1);
    for (const double d : distances) {
      cplx lhs, j0;
      if (d == 0.0) {
        lhs = regular_part(p) - regular_part(q);
        j0 = 1.0;
      } else {
        lhs = r0_kernel(p, d) - r0_kernel(q, d);
        j0 = eval_on_lambda(0, p.scaled(d)).j;
      }
      const cplx rhs = kAlpha2 * 2.0 * kPi * j0;
      r.max_residual = std::max(r.max_residual, identity_residual(lhs, static_cast<double>(sign) * rhs));
      const int preferred = std::abs(lhs - rhs) < std::abs(lhs + rhs) ? 1 : -1;
      disagreements += preferred != sign ? 1 : 0;
    }
  }
  finish(r);
  r.detail = "resolvent difference sign " + std::to_string(sign) + ", pointwise disagreements " +
             std::to_string(disagreements);
  r.pass = r.pass && disagreements == 0;
  return r;
}

std::string format_report(const IdentityReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-28s %-40s points=%-4zu max_residual=%.3e threshold=%.1e %s", r.name.c_str(),
                r.scatterer.c_str(), r.points.size(), r.max_residual, r.threshold, r.pass ? "PASS" : "FAIL");
  std::string out = buf;
  if (!r.integers.empty()) {
    out += " integers=";
    for (size_t i = 0; i < r.integers.size(); ++i) out += (i ? "," : "") + std::to_string(r.integers[i]);
  }
  if (r.skipped > 0) out += " skipped=" + std::to_string(r.skipped);
  return out;
}

std::string report_to_json(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["scatterer"] = r.scatterer;
  j["points"] = r.points.size();
  j["max_residual"] = std::isfinite(r.max_residual) ? nlohmann::ordered_json(r.max_residual) : nlohmann::ordered_json("inf");
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  if (!r.integers.empty()) j["integers"] = r.integers;
  j["skipped"] = r.skipped;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump();
}

}  // namespace lres
