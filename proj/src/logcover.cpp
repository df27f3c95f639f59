#include "lambdares/logcover.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lres {

LambdaPoint::LambdaPoint(double modulus, double argument) : modulus_(modulus), argument_(argument) {
  if (!(modulus > 0.0) || !std::isfinite(modulus)) {
    throw std::invalid_argument("LambdaPoint: modulus must be finite and positive");
  }
  if (!std::isfinite(argument)) {
    throw std::invalid_argument("LambdaPoint: argument must be finite");
  }
}

cplx LambdaPoint::project() const { return std::polar(modulus_, argument_); }

LambdaPoint LambdaPoint::scaled(double s) const { return LambdaPoint(modulus_ * s, argument_); }

LambdaPoint rotate(const LambdaPoint& p, int m) {
  if (m == 0) return p;
  return LambdaPoint(p.modulus(), p.argument() + m * kPi);
}

LambdaPoint involute(const LambdaPoint& p) { return LambdaPoint(p.modulus(), -p.argument()); }

SheetLocation sheet_of(const LambdaPoint& p) {
  const double t = p.argument() / kPi;
  const double k = std::round(t);
  SheetLocation loc;
  if (std::abs(t - k) <= kSheetBoundaryTol) {
    loc.on_boundary = true;
    loc.boundary_index = static_cast<int>(k);
    loc.sheet = static_cast<int>(k);
    return loc;
  }
  loc.sheet = static_cast<int>(std::floor(t));
  return loc;
}

PrincipalDecomposition to_principal(const LambdaPoint& p) {
  int m = static_cast<int>(std::floor(p.argument() / kPi));
  double a = p.argument() - m * kPi;
  // floor of the quotient can be off by one when arg is within an ulp of k*pi
  if (a < 0.0) {
    --m;
    a = p.argument() - m * kPi;
  } else if (a >= kPi) {
    ++m;
    a = p.argument() - m * kPi;
  }
  if (a < 0.0) a = 0.0;
  return {LambdaPoint(p.modulus(), a), m};
}

LambdaPoint lift_near(cplx z, const LambdaPoint& anchor) {
  const cplx ratio = z / anchor.project();
  return LambdaPoint(std::abs(z), anchor.argument() + std::arg(ratio));
}

std::string to_string(const LambdaPoint& p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g@%.17g", p.modulus(), p.argument());
  return buf;
}

LambdaPoint parse_lambda_point(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos) {
    throw std::invalid_argument("expected modulus@argument, got '" + std::string(text) + "'");
  }
  auto parse = [&](std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw std::invalid_argument("malformed real '" + std::string(s) + "'");
    }
    return v;
  };
  return LambdaPoint(parse(text.substr(0, at)), parse(text.substr(at + 1)));
}

LambdaContour::LambdaContour(LambdaPoint c, double r, int n) : center(c), radius(r), samples(n) {
  if (!(r > 0.0) || !(r < c.modulus())) {
    throw std::invalid_argument("LambdaContour: radius must lie in (0, |center|)");
  }
  if (n <= 0) throw std::invalid_argument("LambdaContour: samples must be positive");
}

cplx LambdaContour::offset(int k) const {
  return std::polar(radius, 2.0 * kPi * k / samples);
}

LambdaPoint LambdaContour::node(int k) const {
  return lift_near(center.project() + offset(k), center);
}

}  // namespace lres
