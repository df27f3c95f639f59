#pragma once

// Argument-principle counts and zero location for scalar functions on the
// logarithmic cover.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lambdares/logcover.hpp"
#include "lambdares/scatterers.hpp"

namespace lres {

using LambdaFunction = std::function<cplx(const LambdaPoint&)>;

/// A contour sample landed on (or numerically at) a zero or pole.
class ContourHit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A winding count stayed ambiguous after refinement.
class UnreliableCount : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRoundingThreshold = 0.1;
inline constexpr double kContourHitTol = 1e-13;
inline constexpr double kDedupTol = 1e-9;

struct MultiplicityReport {
  LambdaContour contour;
  cplx raw_integral;
  int rounded = 0;
  double residual = 0.0;
  bool reliable = false;
};

/// df/dlambda along the local chart at p, by Richardson-extrapolated central
/// differences with step 1e-6 |lambda|.
cplx lambda_derivative(const LambdaFunction& f, const LambdaPoint& p);

/// (1/2 pi i) \oint f'/f by the trapezoid rule.  Refines by doubling the
/// sample count (twice) while |raw - round(raw)| >= kRoundingThreshold; the
/// report is marked unreliable if that never settles.  Throws ContourHit when
/// |f| < kContourHitTol * max |f| on a sample.
MultiplicityReport winding(const LambdaFunction& f, const LambdaContour& c);

/// Default radius for msc: 1e-3 |p0|.
double default_msc_radius(const LambdaPoint& p0);

/// Order of f at p0 (positive for zeros, negative for poles) from the winding
/// on a circle of the given radius; radius <= 0 selects the default.  Throws
/// UnreliableCount when the report is unreliable.
MultiplicityReport msc_report(const LambdaFunction& f, const LambdaPoint& p0, double radius = 0.0);
int msc(const LambdaFunction& f, const LambdaPoint& p0, double radius = 0.0);

enum class ChannelQuantity { SMatrix, Jost };

/// Orders of S_l (or of the Jost denominator F_l) at p0 for l = 0..L from
/// one shared contour sweep.
std::vector<int> channel_orders(const Scatterer& s, int truncation, const LambdaPoint& p0, double radius = 0.0,
                                ChannelQuantity q = ChannelQuantity::SMatrix);

/// sum_{l=-L}^{L} max(0, -msc(S_|l|, p0)) for a radial scatterer or disc.
int mu_s_max(const Scatterer& s, int truncation, const LambdaPoint& p0, double radius = 0.0);

inline constexpr int kAggregateChannel = -1;

struct ResonanceRecord {
  LambdaPoint location{1.0, 0.0};
  int multiplicity = 1;
  /// Channel l, or kAggregateChannel.
  int channel = kAggregateChannel;
  /// |f| at the polished point.
  double residual = 0.0;
  /// max |f| on the enclosing cell boundary, for judging `residual`.
  double scale = 0.0;
  std::string method;
};

struct SearchWindow {
  int sheet = 0;
  double modulus_lo = 0.0, modulus_hi = 0.0;
  double arg_lo = 0.0, arg_hi = 0.0;

  /// Validates ordering and that the arg window lies inside the open sheet.
  void validate() const;
  /// Whole sheet between the two moduli, shrunk by `margin` at the boundary rays.
  static SearchWindow sheet_band(int m, double lo, double hi, double margin = 1e-6);
};

struct LocateOptions {
  /// Cells narrower than this in log-modulus and argument are not split.
  double min_cell = 1e-7;
  /// Count-one cells are split until this size before polishing.
  double polish_cell = 0.05;
  int max_cells = 200000;
  int edge_samples = 24;
  std::string method = "cells+newton";
  int channel = kAggregateChannel;
  bool parallel = true;
};

struct LocateResult {
  std::vector<ResonanceRecord> zeros;
  bool budget_exhausted = false;
  int cells_visited = 0;
};

/// Zeros of a holomorphic f in a polar rectangle of one sheet.  Cells in
/// w = log lambda are counted by the argument principle (adaptive phase
/// tracking along the edges), split until each holds at most one zero or
/// reaches min_cell, then Newton-polished (multiplicity-weighted) from the
/// cell center.  Results are sorted by (modulus, argument).
LocateResult locate_zeros(const LambdaFunction& f, const SearchWindow& w, const LocateOptions& opt = {});

/// Records at the same location (within kDedupTol relative) merged with
/// summed multiplicity and channel set to kAggregateChannel.
std::vector<ResonanceRecord> aggregate(const std::vector<ResonanceRecord>& records);

/// One JSON object: location, sheet, multiplicity, channel, residual, method.
std::string to_json_line(const ResonanceRecord& r);
ResonanceRecord parse_json_line(const std::string& line);

}  // namespace lres
