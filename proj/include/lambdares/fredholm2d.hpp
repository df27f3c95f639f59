#pragma once

// Nystrom discretization of K(lambda) = (sgn V)|V|^{1/2} R0(lambda) |V|^{1/2}
// for gridded potentials, its Fredholm determinant on every sheet, the
// far-field scattering matrix and the fixed-sign certificates.
//
// Kernel conventions (see docs/conventions.md):
//   R0(x, y; lambda) = (i/4) H1_0(lambda |x - y|)
//   T(x, y; lambda)  = (1/2) J0(lambda |x - y|)
//   R0(e^{i m pi} lambda) = R0(lambda) + sheet_sign() * i m T(lambda)

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lambdares/besselkit.hpp"
#include "lambdares/channels.hpp"
#include "lambdares/logcover.hpp"
#include "lambdares/scatterers.hpp"

namespace lres {

/// Free resolvent kernel at distance r > 0, continued to the sheet of p.
cplx r0_kernel(const LambdaPoint& p, double r);

/// Sheet-jump kernel (1/2) J0(lambda |x - y|).
cplx t_kernel(const LambdaPoint& p, const Vec2& x, const Vec2& y);

/// Sign s in R0(e^{i m pi} lambda) = R0(lambda) + s i m T(lambda), fixed
/// on first use by comparing both sides at a reference point.
int sheet_sign();

/// Sign s in R0(lambda) - R0(e^{i pi} lambda) = s alpha_2 (2 pi) J0(lambda r),
/// alpha_2 = -i / (4 pi), fixed the same way.
int resdiff_sign();

inline constexpr cplx kAlpha2{0.0, -1.0 / (4.0 * kPi)};

/// How the sheet index enters the matrix: through the explicit m T term with
/// R0 at the principal representative, or by continuing R0 itself.
enum class SheetRoute { Reduction, Direct };

/// Integral of R0(|x_i - y|) over the cell of side h centered at x_i: the
/// log part in closed form, the smooth remainder by its value at r = 0.
cplx r0_cell_integral(const LambdaPoint& p, double h, SheetRoute route = SheetRoute::Reduction);

struct KMatrix {
  LambdaPoint point{1.0, 0.0};
  int n = 0;
  double cell = 0.0;
  SheetRoute route = SheetRoute::Reduction;
  /// Flat indices iy * n + ix of the cells with V != 0, in increasing order.
  std::vector<int> active;
  std::vector<double> weight;  // |V|^{1/2}
  std::vector<double> sign;    // sgn V
  Eigen::MatrixXcd entries;
  /// Fewer than 8 cells per wavelength at this |lambda|.
  bool coarse = false;
};

/// Assembly through a table of kernel values over grid offsets.
KMatrix k_matrix(const Potential2D& v, const LambdaPoint& p, SheetRoute route = SheetRoute::Reduction,
                 Execution exec = Execution::Parallel);

/// Entry-by-entry serial assembly; kept as the reference for k_matrix.
KMatrix k_matrix_reference(const Potential2D& v, const LambdaPoint& p,
                           SheetRoute route = SheetRoute::Reduction);

struct FredholmDet {
  cplx value;
  /// sum of log pivots plus the permutation sign; imaginary part not reduced mod 2 pi.
  cplx log_value;
  /// log det(I+K) - tr K; same zeros, bounded under grid refinement.
  cplx regularized_log;
  bool singular = false;
};

FredholmDet fredholm_det(const KMatrix& k);
FredholmDet fredholm_det(const Potential2D& v, const LambdaPoint& p);

struct DetZero {
  LambdaPoint location{1.0, 0.0};
  int iterations = 0;
  bool converged = false;
  /// |lambda_k - lambda_{k-1}| / |lambda_k| at the last step.
  double last_step = 0.0;
};

/// Newton iteration lambda <- lambda - k / (d/dlambda log det(I + K)) from
/// `start` for a zero of known multiplicity k; the log-derivative comes from
/// central differences of det(I + K) normalized by its value at the iterate.
DetZero polish_det_zero(const Potential2D& v, const LambdaPoint& start, int multiplicity = 1,
                        double tol = 1e-10, int max_iter = 30);

enum class CertificateKind { SkewAdjointT, PositiveBarrier, WellEigenvalueMatch };

struct Certificate {
  CertificateKind kind;
  double sigma = 0.0;
  int sheet = 0;
  /// SkewAdjointT: ||B + B^*|| / ||B||.  PositiveBarrier: least eigenvalue
  /// of the Hermitian part of I + K(i sigma).  WellEigenvalueMatch: number of
  /// Birman-Schwinger eigenvalues above 1 at sigma.
  double measured = 0.0;
  double threshold = 0.0;
  /// PositiveBarrier: |det(I + K)| on the sheet.  WellEigenvalueMatch: lattice
  /// eigenvalue count below -sigma^2.
  double secondary = 0.0;
  /// WellEigenvalueMatch: N_V from the lattice.
  int oracle_total = 0;
  bool pass = false;
  std::string detail;
};

std::string to_string(CertificateKind k);

/// Certificates at lambda = sigma e^{i(pi/2 + m pi)}.  Throws
/// std::invalid_argument for mixed-sign potentials.
std::vector<Certificate> fixed_sign_certificates(const Potential2D& v, double sigma, int m);

struct FarFieldSMatrix {
  LambdaPoint point{1.0, 0.0};
  int n_angles = 0;
  /// Rows: outgoing direction theta_j = 2 pi j / n; columns: incoming omega_k.
  Eigen::MatrixXcd s;
  bool pole = false;
};

/// S(p) = I + c (2 pi / n) A with
///   A(theta, omega) = h^2 sum_i e^{-i lambda theta.x_i} |V_i|^{1/2}
///                     [(I + K)^{-1} (sgn V |V|^{1/2} e^{i lambda omega.x})]_i.
/// n_angles must be even.
FarFieldSMatrix farfield_smatrix(const Potential2D& v, const LambdaPoint& p, int n_angles);

/// The constant c, fixed on first use against partial waves.
cplx farfield_constant();

/// (R f)(theta) = f(theta + pi) on the angle grid.
Eigen::MatrixXcd parity_matrix(int n_angles);

}  // namespace lres
