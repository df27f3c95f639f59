#pragma once

// Compactly supported perturbations of the planar Laplacian: radial
// potentials, gridded potentials and disc obstacles.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lres {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Interpolation { Linear, Pchip };

/// V(r) for r <= a, zero outside.  Either piecewise constant on annuli
/// (breakpoints r_1 < ... < r_n = a, values[i] on (r_{i-1}, r_i]) or a
/// sampled profile interpolated between nodes.
class RadialPotential {
 public:
  static RadialPotential piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static RadialPotential sampled(std::vector<double> radii, std::vector<double> values,
                                 Interpolation rule = Interpolation::Linear);
  /// Constant v on r <= a.
  static RadialPotential step(double a, double v) { return piecewise({a}, {v}); }

  bool is_piecewise() const { return piecewise_; }
  double support() const { return radii_.back(); }
  const std::vector<double>& breakpoints() const { return radii_; }
  const std::vector<double>& values() const { return values_; }
  Interpolation interpolation() const { return rule_; }

  double operator()(double r) const;

 private:
  RadialPotential() = default;
  bool piecewise_ = true;
  Interpolation rule_ = Interpolation::Linear;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::shared_ptr<const std::function<double(double)>> interp_;
};

/// Samples at the centers of an n x n grid of cells covering [-b, b]^2,
/// row-major with row index along y.  Cell centers are symmetric about the
/// origin exactly: x_i = (i + 1/2 - n/2) h.
class Potential2D {
 public:
  Potential2D() = default;
  /// Throws std::invalid_argument when the payload size mismatches, a value
  /// is not finite, or the boundary layer of cells is nonzero.
  Potential2D(int n, double half_width, std::vector<double> samples);

  /// Cell-averaged rasterization of a radial potential (sub x sub samples per cell).
  static Potential2D rasterize(const RadialPotential& v, int n, double half_width, int sub = 8);
  /// Smallest half-width for which an n x n raster of a potential supported
  /// in r <= support keeps its boundary layer of cells empty.
  static double snug_half_width(double support, int n);

  int n() const { return n_; }
  double half_width() const { return half_width_; }
  double cell() const { return n_ > 0 ? 2.0 * half_width_ / n_ : 0.0; }
  double coord(int i) const { return (i + 0.5 - 0.5 * n_) * cell(); }
  double at(int ix, int iy) const { return samples_[static_cast<size_t>(iy) * n_ + ix]; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  int n_ = 0;
  double half_width_ = 0.0;
  std::vector<double> samples_;
};

enum class BoundaryCondition { Dirichlet, Neumann, Robin };

/// Exterior of the disc |x| < a.  With the normal pointing into the disc the
/// boundary functional is B[u] = robin * u(a) - u'(a); Dirichlet is u(a) = 0
/// and Neumann u'(a) = 0.
struct DiscObstacle {
  double radius = 1.0;
  BoundaryCondition condition = BoundaryCondition::Dirichlet;
  double robin = 0.0;

  DiscObstacle(double a, BoundaryCondition bc, double f = 0.0);
};

using Scatterer = std::variant<RadialPotential, Potential2D, DiscObstacle>;

enum class SignClass { NonNegative, NonPositive, Mixed };

double support_radius(const Scatterer& s);

SignClass sign_class(const RadialPotential& v);
SignClass sign_class(const Potential2D& v);

/// V(-x) == V(x) exactly on the grid.
bool mirror_symmetric(const Potential2D& v);

/// Pointwise |V|.
Potential2D absolute(const Potential2D& v);
RadialPotential absolute(const RadialPotential& v);

std::string describe(const Scatterer& s);
std::string to_string(SignClass c);
std::string to_string(BoundaryCondition c);

/// Parses the JSON scatterer config; throws ConfigError on any schema violation.
Scatterer parse_scatterer(std::string_view json_text);
Scatterer load_scatterer(const std::string& path);
/// Inverse of parse_scatterer, with round-trip decimal precision.
std::string scatterer_to_json(const Scatterer& s);

}  // namespace lres
