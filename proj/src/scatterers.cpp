#include "lambdares/scatterers.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace lres {
namespace {

using nlohmann::json;

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

void require_increasing_positive(const std::vector<double>& r, bool allow_zero_first) {
  if (r.empty()) throw std::invalid_argument("radial potential: no breakpoints");
  for (size_t i = 0; i < r.size(); ++i) {
    const bool ok_first = allow_zero_first && i == 0 ? r[i] >= 0.0 : r[i] > 0.0;
    if (!ok_first) throw std::invalid_argument("radial potential: radii must be positive");
    if (i > 0 && !(r[i] > r[i - 1])) {
      throw std::invalid_argument("radial potential: radii must be strictly increasing");
    }
  }
}

SignClass classify(const std::vector<double>& v) {
  const bool nonneg = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
  if (nonneg) return SignClass::NonNegative;
  const bool nonpos = std::all_of(v.begin(), v.end(), [](double x) { return x <= 0.0; });
  return nonpos ? SignClass::NonPositive : SignClass::Mixed;
}

}  // namespace

RadialPotential RadialPotential::piecewise(std::vector<double> breakpoints,
                                           std::vector<double> values) {
  require_increasing_positive(breakpoints, false);
  if (values.size() != breakpoints.size()) {
    throw std::invalid_argument("radial potential: one value per annulus required");
  }
  require_finite(breakpoints, "radial potential");
  require_finite(values, "radial potential");
  RadialPotential v;
  v.piecewise_ = true;
  v.radii_ = std::move(breakpoints);
  v.values_ = std::move(values);
  return v;
}

RadialPotential RadialPotential::sampled(std::vector<double> radii, std::vector<double> values,
                                         Interpolation rule) {
  require_increasing_positive(radii, true);
  if (radii.size() < 2 || values.size() != radii.size()) {
    throw std::invalid_argument("sampled radial potential: need >= 2 nodes and one value each");
  }
  require_finite(radii, "sampled radial potential");
  require_finite(values, "sampled radial potential");
  RadialPotential v;
  v.piecewise_ = false;
  v.rule_ = rule;
  v.radii_ = std::move(radii);
  v.values_ = std::move(values);
  if (rule == Interpolation::Pchip) {
    if (v.radii_.size() < 4) {
      throw std::invalid_argument("pchip interpolation needs at least 4 nodes");
    }
    auto x = v.radii_;
    auto y = v.values_;
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(x), std::move(y));
    v.interp_ = std::make_shared<const std::function<double(double)>>(
        [spline](double r) { return spline(r); });
  }
  return v;
}

double RadialPotential::operator()(double r) const {
  if (r > radii_.back() || r < 0.0) return 0.0;
  if (piecewise_) {
    const auto it = std::lower_bound(radii_.begin(), radii_.end(), r);
    return values_[static_cast<size_t>(it - radii_.begin())];
  }
  if (r <= radii_.front()) return values_.front();
  if (interp_) return (*interp_)(r);
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const size_t hi = std::min<size_t>(static_cast<size_t>(it - radii_.begin()), radii_.size() - 1);
  const size_t lo = hi - 1;
  const double t = (r - radii_[lo]) / (radii_[hi] - radii_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

Potential2D::Potential2D(int n, double half_width, std::vector<double> samples)
    : n_(n), half_width_(half_width), samples_(std::move(samples)) {
  if (n < 0) throw std::invalid_argument("grid potential: negative size");
  if (n > 0 && !(half_width > 0.0)) throw std::invalid_argument("grid potential: half width must be positive");
  if (samples_.size() != static_cast<size_t>(n) * static_cast<size_t>(n)) {
    throw std::invalid_argument("grid potential: expected n*n samples");
  }
  require_finite(samples_, "grid potential");
  for (int i = 0; i < n; ++i) {
    if (at(i, 0) != 0.0 || at(i, n - 1) != 0.0 || at(0, i) != 0.0 || at(n - 1, i) != 0.0) {
      throw std::invalid_argument("grid potential: boundary layer of cells must vanish");
    }
  }
}

Potential2D Potential2D::rasterize(const RadialPotential& v, int n, double half_width, int sub) {
  if (n <= 0 || sub <= 0) throw std::invalid_argument("rasterize: grid sizes must be positive");
  const double h = 2.0 * half_width / n;
  const double hs = h / sub;
  std::vector<double> samples(static_cast<size_t>(n) * n, 0.0);
  auto center = [&](int i) { return (i + 0.5 - 0.5 * n) * h; };
  auto offset = [&](int s) { return (s + 0.5 - 0.5 * sub) * hs; };
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      double acc = 0.0;
      for (int sy = 0; sy < sub; ++sy) {
        const double y = center(iy) + offset(sy);
        for (int sx = 0; sx < sub; ++sx) {
          const double x = center(ix) + offset(sx);
          acc += v(std::sqrt(x * x + y * y));
        }
      }
      samples[static_cast<size_t>(iy) * n + ix] = acc / (sub * sub);
    }
  }
  return Potential2D(n, half_width, std::move(samples));
}

double Potential2D::snug_half_width(double support, int n) {
  if (n < 3) throw std::invalid_argument("snug_half_width: need n >= 3");
  // b - 2b/n >= support
  return support * n / (n - 2.0) * (1.0 + 1e-9);
}

DiscObstacle::DiscObstacle(double a, BoundaryCondition bc, double f)
    : radius(a), condition(bc), robin(f) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("disc obstacle: radius must be positive");
  if (bc == BoundaryCondition::Robin && (!(f >= 0.0) || !std::isfinite(f))) {
    throw std::invalid_argument("disc obstacle: Robin constant must be finite and >= 0");
  }
  if (bc != BoundaryCondition::Robin) robin = 0.0;
}

double support_radius(const Scatterer& s) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RadialPotential>) {
          return x.support();
        } else if constexpr (std::is_same_v<T, Potential2D>) {
          return x.half_width() * std::sqrt(2.0);
        } else {
          return x.radius;
        }
      },
      s);
}

SignClass sign_class(const RadialPotential& v) { return classify(v.values()); }
SignClass sign_class(const Potential2D& v) { return classify(v.samples()); }

bool mirror_symmetric(const Potential2D& v) {
  const int n = v.n();
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      if (v.at(ix, iy) != v.at(n - 1 - ix, n - 1 - iy)) return false;
    }
  }
  return true;
}

Potential2D absolute(const Potential2D& v) {
  auto s = v.samples();
  for (double& x : s) x = std::abs(x);
  return Potential2D(v.n(), v.half_width(), std::move(s));
}

RadialPotential absolute(const RadialPotential& v) {
  auto vals = v.values();
  for (double& x : vals) x = std::abs(x);
  if (v.is_piecewise()) return RadialPotential::piecewise(v.breakpoints(), std::move(vals));
  return RadialPotential::sampled(v.breakpoints(), std::move(vals), v.interpolation());
}

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::NonNegative: return "nonnegative";
    case SignClass::NonPositive: return "nonpositive";
    case SignClass::Mixed: return "mixed";
  }
  return "?";
}

std::string to_string(BoundaryCondition c) {
  switch (c) {
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Robin: return "robin";
  }
  return "?";
}

std::string describe(const Scatterer& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RadialPotential>) {
          os << (x.is_piecewise() ? "radial-piecewise" : "radial-sampled") << "(a=" << x.support()
             << ",annuli=" << x.values().size();
          if (x.is_piecewise() && x.values().size() <= 3) {
            os << ",V=";
            for (size_t i = 0; i < x.values().size(); ++i) os << (i ? "/" : "") << x.values()[i];
          }
          os << ")";
        } else if constexpr (std::is_same_v<T, Potential2D>) {
          os << "grid(n=" << x.n() << ",b=" << x.half_width() << ")";
        } else {
          os << "disc(a=" << x.radius << "," << to_string(x.condition);
          if (x.condition == BoundaryCondition::Robin) os << ",f=" << x.robin;
          os << ")";
        }
      },
      s);
  return os.str();
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError("unknown field '" + it.key() + "'");
  }
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Scatterer parse_scatterer(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scatterer config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scatterer config must be a JSON object");
  const auto kind = required<std::string>(j, "kind");
  try {
    if (kind == "radial") {
      reject_unknown(j, {"kind", "name", "profile", "breakpoints", "values", "interpolation"});
      const std::string profile = j.value("profile", std::string("piecewise"));
      auto r = required<std::vector<double>>(j, "breakpoints");
      auto v = required<std::vector<double>>(j, "values");
      if (profile == "piecewise") {
        if (j.contains("interpolation")) throw ConfigError("interpolation applies to sampled profiles only");
        return RadialPotential::piecewise(std::move(r), std::move(v));
      }
      if (profile != "sampled") throw ConfigError("profile must be 'piecewise' or 'sampled'");
      const std::string rule = j.value("interpolation", std::string("linear"));
      if (rule != "linear" && rule != "pchip") throw ConfigError("interpolation must be 'linear' or 'pchip'");
      return RadialPotential::sampled(std::move(r), std::move(v),
                                      rule == "pchip" ? Interpolation::Pchip : Interpolation::Linear);
    }
    if (kind == "grid") {
      reject_unknown(j, {"kind", "name", "n", "half_width", "samples"});
      return Potential2D(required<int>(j, "n"), required<double>(j, "half_width"),
                         required<std::vector<double>>(j, "samples"));
    }
    if (kind == "disc") {
      reject_unknown(j, {"kind", "name", "radius", "condition", "robin"});
      const auto cond = required<std::string>(j, "condition");
      BoundaryCondition bc;
      if (cond == "dirichlet") {
        bc = BoundaryCondition::Dirichlet;
      } else if (cond == "neumann") {
        bc = BoundaryCondition::Neumann;
      } else if (cond == "robin") {
        bc = BoundaryCondition::Robin;
      } else {
        throw ConfigError("condition must be dirichlet, neumann or robin");
      }
      if (bc != BoundaryCondition::Robin && j.contains("robin")) {
        throw ConfigError("field 'robin' only applies to the robin condition");
      }
      const double f = bc == BoundaryCondition::Robin ? required<double>(j, "robin") : 0.0;
      return DiscObstacle(required<double>(j, "radius"), bc, f);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("kind must be radial, grid or disc");
}

Scatterer load_scatterer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scatterer config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scatterer(ss.str());
}

std::string scatterer_to_json(const Scatterer& s) {
  json j;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RadialPotential>) {
          j["kind"] = "radial";
          j["profile"] = x.is_piecewise() ? "piecewise" : "sampled";
          j["breakpoints"] = x.breakpoints();
          j["values"] = x.values();
          if (!x.is_piecewise()) {
            j["interpolation"] = x.interpolation() == Interpolation::Pchip ? "pchip" : "linear";
          }
        } else if constexpr (std::is_same_v<T, Potential2D>) {
          j["kind"] = "grid";
          j["n"] = x.n();
          j["half_width"] = x.half_width();
          j["samples"] = x.samples();
        } else {
          j["kind"] = "disc";
          j["radius"] = x.radius;
          j["condition"] = to_string(x.condition);
          if (x.condition == BoundaryCondition::Robin) j["robin"] = x.robin;
        }
      },
      s);
  return j.dump();
}

}  // namespace lres
