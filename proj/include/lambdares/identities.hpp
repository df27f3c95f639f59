#pragma once

// Executable checks of the scattering-matrix identities on the logarithmic
// cover.  Every check returns a report; none of them throws on failure.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lambdares/fredholm2d.hpp"
#include "lambdares/logcover.hpp"
#include "lambdares/scatterers.hpp"

namespace lres {

struct IdentityReport {
  std::string name;
  std::string scatterer;
  std::vector<LambdaPoint> points;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Integer-valued checks: the quantities that must agree, in order.
  std::vector<int> integers;
  int skipped = 0;
  std::string detail;
};

/// |value - reference|, divided by |reference| when that exceeds 1.
double identity_residual(cplx value, cplx reference);

/// Deterministic points: modulus uniform in [lo, hi], argument uniform in the
/// interior of sheets min_sheet..max_sheet (margin 1e-3 from the boundary rays).
std::vector<LambdaPoint> random_points(std::uint64_t seed, int count, double modulus_lo, double modulus_hi,
                                       int min_sheet, int max_sheet);

/// How the parity operator enters the corrected symmetry.  Conjugated is the
/// identity; Dropped removes it; OneSided keeps only the left factor, which
/// is the corrupted form used as a negative control.
enum class ParityMode { Conjugated, Dropped, OneSided };

/// conj(S_l(involute p)) = 2 - S_l(rotate(p, 1)) per channel, l <= L with L
/// chosen adaptively per point when truncation < 0.  Threshold 1e-8.
IdentityReport check_correction(const Scatterer& s, std::span<const LambdaPoint> points, int truncation = -1,
                                ParityMode mode = ParityMode::Conjugated);

/// S(involute p)^* = 2I - R S(rotate(p, 1)) R on the angle grid.  Threshold 1e-2.
IdentityReport check_correction_farfield(const Potential2D& v, std::span<const LambdaPoint> points,
                                         int n_angles = 48, ParityMode mode = ParityMode::Conjugated);

/// prod_{j=0}^{m} S_l(rotate(p, j)) = (m+1) S_l(p) - m.  Threshold 1e-8.
IdentityReport check_product(const Scatterer& s, std::span<const LambdaPoint> points, int m,
                             int truncation = -1);

/// msc(det((m+1)S - m), p0) = sum_{j=0}^{m} msc(det S, rotate(p0, j))
///                          = mu_S(rotate(p0, m+1)) - mu_S(p0).
IdentityReport check_togettophys(const Scatterer& s, const LambdaPoint& p0, int m, double radius = 0.0);

/// mu_R(p0) - mu_R(involute p0) = -msc(det S, p0) = mu_S(p0) - mu_S(involute p0),
/// with mu_R the summed order of the Jost zeros over l = -L..L.
IdentityReport check_prpsm(const Scatterer& s, const LambdaPoint& p0, double radius = 0.0);

/// mu_R(rotate(p1, m)) - mu_R(p1) = msc(det(m S - (m-1)), p1).
IdentityReport check_rpsp(const Scatterer& s, const LambdaPoint& p1, int m, double radius = 0.0);

/// S_l(i sigma) - 1 purely imaginary for every l <= L, and the normalized
/// Jost margin |F_l| / (|F_l| + |c+_l|) at sigma e^{i(pi/2 + m pi)} positive.
IdentityReport check_pureimag(const Scatterer& s, std::span<const double> sigmas, int m);

/// r0_kernel(rotate(p, m), r) = r0_kernel(p, r) + sheet_sign() i m t_kernel(p, r)
/// at |x - y| = r over the given distances, p on the physical sheet.  Also
/// asserts that the sign preferred at each point equals sheet_sign().
IdentityReport check_reduction(std::span<const LambdaPoint> points, int m, std::span<const double> distances);

/// R0(p) - R0(rotate(p, 1)) = resdiff_sign() alpha_2 (2 pi) J0(lambda r); r = 0
/// compares the regular parts of the two kernels at the diagonal.
IdentityReport check_resdiff_free(std::span<const LambdaPoint> points, std::span<const double> distances);

/// "name  scatterer  points=N  max_residual=...  threshold=...  PASS|FAIL".
std::string format_report(const IdentityReport& r);
std::string report_to_json(const IdentityReport& r);

}  // namespace lres
