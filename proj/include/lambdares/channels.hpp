#pragma once

// Partial-wave scattering for radial potentials and disc obstacles.
//
// Outside the support the channel-l field is
//
//   R(r) = cminus * H2_l(lambda r) + cplus * H1_l(lambda r)
//
// with the Hankel functions continued to the sheet of lambda.  The channel
// scattering matrix is S_l = cplus / cminus and its poles are the zeros of
// the Jost denominator cminus.

#include <span>
#include <vector>

#include "lambdares/logcover.hpp"
#include "lambdares/scatterers.hpp"

namespace lres {

enum class Execution { Serial, Parallel };

inline constexpr int kMaxChannels = 64;
inline constexpr double kTruncationTol = 1e-12;

/// Regular interior solution at the support radius, normalized so that
/// R(r) ~ r^l at the origin; u = sqrt(r) R is the reduced solution.
struct RadialSolution {
  int ell = 0;
  double a = 0.0;
  cplx r_at_a, rprime_at_a;
  cplx u_at_a, uprime_at_a;
};

/// Solves u'' + (zsq - V - (l^2 - 1/4)/r^2) u = 0 on (0, a].  Piecewise
/// potentials are matched in closed form; sampled ones integrated with an
/// adaptive Dormand-Prince scheme from r = 1e-6 a.
RadialSolution radial_solve(const RadialPotential& v, int ell, cplx zsq);

/// Same for orders 0..max_ell, sharing the Bessel evaluations.
std::vector<RadialSolution> radial_solve_all(const RadialPotential& v, int max_ell, cplx zsq);

struct ChannelScattering {
  int ell = 0;
  LambdaPoint point{1.0, 0.0};
  cplx cplus, cminus;
  cplx s_value;
  cplx jost;
  /// cminus vanished to working precision: S_l has a pole at this point.
  bool jost_zero = false;
};

/// Channel data for a radial potential or disc obstacle; grid potentials are
/// rejected with std::invalid_argument.
ChannelScattering smatrix_channel(const Scatterer& s, int ell, const LambdaPoint& p);
std::vector<ChannelScattering> smatrix_channels(const Scatterer& s, int max_ell, const LambdaPoint& p);

cplx jost(const Scatterer& s, int ell, const LambdaPoint& p);

/// Smallest L <= kMaxChannels with |S_L(p) - 1| < kTruncationTol.
int choose_truncation(const Scatterer& s, const LambdaPoint& p);

/// Diagonal of S in the basis e^{i l theta}, l = -L..L, plus the parity
/// operator (R f)(theta) = f(theta + pi), diagonal (-1)^l.
struct TruncatedSMatrix {
  int truncation = 0;
  std::vector<cplx> diagonal;  // index l + L
  std::vector<int> parity;     // index l + L

  cplx at(int l) const { return diagonal[static_cast<size_t>(l + truncation)]; }
};

TruncatedSMatrix smatrix_truncated(const Scatterer& s, int truncation, const LambdaPoint& p);

struct DetS {
  cplx value;
  int truncation = 0;
  /// |S_L - 1| at the truncation order.
  double tail = 0.0;
  bool pole = false;
};

/// S_0 * prod_{l=1}^{L} S_l^2.
DetS det_s(const Scatterer& s, int truncation, const LambdaPoint& p);
DetS det_s(const Scatterer& s, const LambdaPoint& p);

/// Channel data for orders 0..max_ell at every point; rows follow `points`.
std::vector<std::vector<ChannelScattering>> channel_table(const Scatterer& s, int max_ell,
                                                          std::span<const LambdaPoint> points,
                                                          Execution exec = Execution::Parallel);

}  // namespace lres
