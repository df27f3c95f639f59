#pragma once

// Integer-order Bessel and Hankel functions on the logarithmic cover.
//
// Values are computed in the principal window 0 <= arg z < pi and carried to
// every other sheet by the monodromy relations
//
//   J_l(e^{i m pi} z)  = e^{i m l pi} J_l(z)
//   H1_l(e^{i m pi} z) = (-1)^{m l} [H1_l(z) - 2 m J_l(z)]
//
// with H2 := 2 J - H1 continued through the same relations.

#include <array>
#include <stdexcept>
#include <vector>

#include "lambdares/logcover.hpp"

namespace lres {

inline constexpr int kMaxBesselOrder = 200;

/// Raised when a requested value leaves the double exponent range.
class BesselOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

struct CylinderEval {
  cplx j, jprime;
  cplx h1, h1prime;
  cplx h2, h2prime;
};

/// J, H1, H2 and derivatives at z = |z| e^{i arg}, arg in [0, pi).
/// Throws std::invalid_argument for negative or too-large orders and for
/// points outside the window, BesselOverflow when values are not representable.
CylinderEval eval_principal(int order, const LambdaPoint& z);
CylinderEval eval_principal(int order, cplx z);

/// All orders 0..max_order at one principal-window point.
std::vector<CylinderEval> eval_principal_all(int max_order, const LambdaPoint& z);

/// Values of the globally holomorphic extensions at p.
CylinderEval eval_on_lambda(int order, const LambdaPoint& p);
std::vector<CylinderEval> eval_on_lambda_all(int max_order, const LambdaPoint& p);

/// Applies the sheet-m monodromy to principal-window values of order `order`.
CylinderEval continue_to_sheet(const CylinderEval& principal, int order, int m);

/// |z W[J, H1](z) - 2i/pi|, divided by max(1, |z|(|J H1'| + |H1 J'|)) so that
/// on deep sheets, where J and the continued H1 are both large, the residual
/// measures the identity at the precision the products carry.
double wronskian_residual(int order, const LambdaPoint& p);

using Vec2 = std::array<double, 2>;

struct JacobiAngerSum {
  cplx value;
  /// 2 |J_{L+1}(lambda r)|, the magnitude of the first omitted pair of terms.
  double tail_bound;
};

/// sum_{|l| <= L} i^l e^{i l (theta_x - theta_omega)} J_l(lambda |x|), which
/// approximates exp(i lambda x . omega).
JacobiAngerSum jacobi_anger(double lambda, const Vec2& x, const Vec2& omega, int truncation);

}  // namespace lres
