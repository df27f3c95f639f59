#pragma once

// Points, sheets and contours on the logarithmic cover of the punctured plane.
//
// A point carries its modulus and an unbounded continuous argument.  The
// sheet index is always derived from the argument and never stored.

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lres {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Tolerance on arg/pi used to classify a point as lying on a sheet boundary.
inline constexpr double kSheetBoundaryTol = 1e-12;

class LambdaPoint {
 public:
  /// Throws std::invalid_argument unless modulus is finite and positive.
  LambdaPoint(double modulus, double argument);

  double modulus() const { return modulus_; }
  double argument() const { return argument_; }

  /// Projection to the plane, modulus * exp(i * argument).
  cplx project() const;

  /// Point with the same argument and modulus scaled by s > 0.
  LambdaPoint scaled(double s) const;

  friend bool operator==(const LambdaPoint&, const LambdaPoint&) = default;

 private:
  double modulus_;
  double argument_;
};

struct SheetLocation {
  /// Sheet index m with m*pi < arg < (m+1)*pi; meaningful only off the boundary.
  int sheet = 0;
  /// Set when arg/pi is within kSheetBoundaryTol of an integer.
  bool on_boundary = false;
  /// The integer k with arg ~ k*pi when on_boundary.
  int boundary_index = 0;

  friend bool operator==(const SheetLocation&, const SheetLocation&) = default;
};

/// e^{i m pi} p: argument shifted by m*pi.
LambdaPoint rotate(const LambdaPoint& p, int m);

/// |p| exp(-i arg p).  Takes sheet m to sheet -m-1.
LambdaPoint involute(const LambdaPoint& p);

SheetLocation sheet_of(const LambdaPoint& p);

struct PrincipalDecomposition {
  LambdaPoint principal;  // argument in [0, pi)
  int m;                  // p == rotate(principal, m)
};

PrincipalDecomposition to_principal(const LambdaPoint& p);

/// Lift a plane point near `anchor` onto the same local chart: the returned
/// argument is anchor.argument + Arg(z / anchor.project()).
LambdaPoint lift_near(cplx z, const LambdaPoint& anchor);

/// "modulus@argument" with round-trip decimal precision.
std::string to_string(const LambdaPoint& p);

/// Parses "modulus@argument"; throws std::invalid_argument on malformed input.
LambdaPoint parse_lambda_point(std::string_view text);

/// Circle of the given radius around `center`, lifted to the cover.
struct LambdaContour {
  LambdaPoint center;
  double radius;
  int samples = 256;

  /// Throws std::invalid_argument unless 0 < radius < center.modulus() and samples > 0.
  LambdaContour(LambdaPoint c, double r, int n = 256);

  /// The k-th trapezoid node, angle 2*pi*k/samples measured in the plane.
  LambdaPoint node(int k) const;
  /// Plane displacement node(k) - center, i.e. radius * e^{i theta_k}.
  cplx offset(int k) const;
};

}  // namespace lres
