#include "lambdares/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <tuple>

#include "lambdares/channels.hpp"
#include "lambdares/parallel.hpp"

namespace lres {
namespace {

using VectorFunction = std::function<std::vector<cplx>(const LambdaPoint&)>;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Central difference D(h) for every component.
std::vector<cplx> central(const VectorFunction& f, const LambdaPoint& p, double h) {
  const cplx z = p.project();
  auto fp = f(lift_near(z + h, p));
  const auto fm = f(lift_near(z - h, p));
  for (size_t i = 0; i < fp.size(); ++i) fp[i] = (fp[i] - fm[i]) / (2.0 * h);
  return fp;
}

std::vector<cplx> derivative_multi(const VectorFunction& f, const LambdaPoint& p) {
  const double h = 1e-6 * p.modulus();
  const auto d1 = central(f, p, h);
  auto d2 = central(f, p, 0.5 * h);
  for (size_t i = 0; i < d2.size(); ++i) d2[i] = (4.0 * d2[i] - d1[i]) / 3.0;
  return d2;
}

std::vector<cplx> raw_windings(const VectorFunction& f, const LambdaContour& c) {
  std::vector<std::vector<cplx>> vals(c.samples), ders(c.samples);
  for (int k = 0; k < c.samples; ++k) {
    const LambdaPoint node = c.node(k);
    vals[k] = f(node);
    ders[k] = derivative_multi(f, node);
  }
  const size_t width = vals[0].size();
  std::vector<cplx> raw(width, 0.0);
  for (size_t i = 0; i < width; ++i) {
    double scale = 0.0;
    for (int k = 0; k < c.samples; ++k) {
      if (!finite(vals[k][i]) || !finite(ders[k][i])) {
        throw ContourHit("non-finite value on contour around " + to_string(c.center));
      }
      scale = std::max(scale, std::abs(vals[k][i]));
    }
    cplx sum = 0.0;
    for (int k = 0; k < c.samples; ++k) {
      if (std::abs(vals[k][i]) < kContourHitTol * scale || vals[k][i] == cplx(0.0)) {
        throw ContourHit("contour around " + to_string(c.center) + " passes through a zero");
      }
      // dz = i * offset * dtheta, dtheta = 2 pi / n
      sum += ders[k][i] / vals[k][i] * c.offset(k);
    }
    raw[i] = sum / static_cast<double>(c.samples);
  }
  return raw;
}

std::vector<MultiplicityReport> winding_multi(const VectorFunction& f, const LambdaContour& c0) {
  LambdaContour c = c0;
  std::vector<MultiplicityReport> reports;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const auto raw = raw_windings(f, c);
    reports.clear();
    bool all_ok = true;
    for (const cplx r : raw) {
      MultiplicityReport rep{c, r, static_cast<int>(std::lround(r.real())), 0.0, false};
      rep.residual = std::abs(r - static_cast<double>(rep.rounded));
      rep.reliable = rep.residual < kRoundingThreshold;
      all_ok = all_ok && rep.reliable;
      reports.push_back(rep);
    }
    if (all_ok) break;
    c = LambdaContour(c.center, c.radius, 2 * c.samples);
  }
  return reports;
}

VectorFunction lift_scalar(const LambdaFunction& f) {
  return [&f](const LambdaPoint& p) { return std::vector<cplx>{f(p)}; };
}

struct Cell {
  double u0, u1, a0, a1;  // log-modulus and argument ranges
  int count = 0;
  double scale = 0.0;
};

LambdaPoint at_w(double u, double a) { return LambdaPoint(std::exp(u), a); }

struct EdgeTrace {
  double phase = 0.0;
  double scale = 0.0;
};

// Phase increment of f along the straight w-segment, refined until every
// piece changes arg by less than 0.4 and agrees with its midpoint split.
class PhaseTracker {
 public:
  explicit PhaseTracker(const LambdaFunction& f) : f_(f) {}

  EdgeTrace edge(double u0, double a0, double u1, double a1, int min_samples) {
    const double len = std::hypot(u1 - u0, a1 - a0);
    const int n = std::max(min_samples, static_cast<int>(std::ceil(len / 0.05)));
    EdgeTrace tr;
    double pu = u0, pa = a0;
    cplx pf = eval(pu, pa, tr);
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      const double qu = u0 + t * (u1 - u0), qa = a0 + t * (a1 - a0);
      const cplx qf = eval(qu, qa, tr);
      tr.phase += refine(pu, pa, pf, qu, qa, qf, 0, tr);
      pu = qu;
      pa = qa;
      pf = qf;
    }
    return tr;
  }

 private:
  cplx eval(double u, double a, EdgeTrace& tr) const {
    const cplx v = f_(at_w(u, a));
    if (!finite(v) || v == cplx(0.0)) throw ContourHit("cell edge passes through a zero");
    tr.scale = std::max(tr.scale, std::abs(v));
    return v;
  }

  double refine(double pu, double pa, cplx pf, double qu, double qa, cplx qf, int depth, EdgeTrace& tr) const {
    const double whole = std::arg(qf / pf);
    const double mu = 0.5 * (pu + qu), ma = 0.5 * (pa + qa);
    const cplx mf = eval(mu, ma, tr);
    const double left = std::arg(mf / pf), right = std::arg(qf / mf);
    if (std::abs(whole) < 0.4 && std::abs(left + right - whole) < 1e-6) return whole;
    if (depth > 40) throw ContourHit("cell edge too close to a zero");
    return refine(pu, pa, pf, mu, ma, mf, depth + 1, tr) + refine(mu, ma, mf, qu, qa, qf, depth + 1, tr);
  }

  const LambdaFunction& f_;
};

// Counterclockwise in (u, a) is counterclockwise in lambda as well.
void count_cell(const LambdaFunction& f, Cell& c, int samples) {
  PhaseTracker t(f);
  const EdgeTrace e[4] = {t.edge(c.u0, c.a0, c.u1, c.a0, samples), t.edge(c.u1, c.a0, c.u1, c.a1, samples),
                          t.edge(c.u1, c.a1, c.u0, c.a1, samples), t.edge(c.u0, c.a1, c.u0, c.a0, samples)};
  double total = 0.0, scale = 0.0;
  for (const auto& x : e) {
    total += x.phase;
    scale = std::max(scale, x.scale);
  }
  const double w = total / (2.0 * kPi);
  c.count = static_cast<int>(std::lround(w));
  c.scale = scale;
  if (std::abs(w - c.count) > 1e-3) throw ContourHit("cell phase did not close");
}

// Split into four; the split point is nudged off-center when an edge grazes a zero.
std::vector<Cell> split(const LambdaFunction& f, const Cell& c, int samples) {
  static constexpr double kNudge[] = {0.0, 0.0137, -0.0291, 0.0419};
  for (double nudge : kNudge) {
    const double um = 0.5 * (c.u0 + c.u1) + nudge * (c.u1 - c.u0);
    const double am = 0.5 * (c.a0 + c.a1) + nudge * (c.a1 - c.a0);
    std::vector<Cell> kids = {{c.u0, um, c.a0, am}, {um, c.u1, c.a0, am}, {c.u0, um, am, c.a1}, {um, c.u1, am, c.a1}};
    try {
      int sum = 0;
      for (auto& k : kids) {
        count_cell(f, k, samples);
        sum += k.count;
      }
      if (sum == c.count) return kids;
      for (auto& k : kids) count_cell(f, k, 2 * samples);
      return kids;
    } catch (const ContourHit&) {
    }
  }
  throw ContourHit("could not split cell away from zeros");
}

bool inside(const Cell& c, const LambdaPoint& p, double grow) {
  const double du = grow * (c.u1 - c.u0), da = grow * (c.a1 - c.a0);
  const double u = std::log(p.modulus());
  return u >= c.u0 - du && u <= c.u1 + du && p.argument() >= c.a0 - da && p.argument() <= c.a1 + da;
}

std::optional<ResonanceRecord> polish(const LambdaFunction& f, const Cell& c, const LocateOptions& opt) {
  const LambdaPoint anchor = at_w(0.5 * (c.u0 + c.u1), 0.5 * (c.a0 + c.a1));
  LambdaPoint p = anchor;
  const double k = c.count;
  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    const cplx fz = f(p);
    if (fz == cplx(0.0)) {
      converged = true;
      break;
    }
    const cplx d = lambda_derivative(f, p);
    if (!finite(d) || d == cplx(0.0)) break;
    const cplx step = k * fz / d;
    const cplx z = p.project() - step;
    if (!(std::abs(z) > 0.0)) break;
    p = lift_near(z, p);
    if (std::abs(step) < 1e-14 * std::abs(z)) {
      converged = true;
      break;
    }
  }
  if (!inside(c, p, 0.1)) return std::nullopt;
  ResonanceRecord r;
  r.location = p;
  r.multiplicity = c.count;
  r.channel = opt.channel;
  r.residual = std::abs(f(p));
  r.scale = c.scale;
  r.method = converged ? opt.method : opt.method + "(unconverged)";
  return r;
}

// A count-k cell whose multiplicity-k Newton iterate converges inside it and
// carries winding k on a small circle holds a single zero of order k.
std::optional<ResonanceRecord> confirmed_multiple(const LambdaFunction& f, const Cell& c, const LocateOptions& opt) {
  auto r = polish(f, c, opt);
  if (!r || r->method != opt.method || !inside(c, r->location, 0.0)) return std::nullopt;
  const double size = std::max(c.u1 - c.u0, c.a1 - c.a0);
  const double radius = r->location.modulus() * std::min(1e-4, 0.05 * size);
  try {
    const auto rep = winding(f, LambdaContour(r->location, radius));
    if (rep.reliable && rep.rounded == c.count) return r;
  } catch (const ContourHit&) {
  }
  return std::nullopt;
}

bool same_location(const LambdaPoint& a, const LambdaPoint& b) {
  const double scale = std::max(a.modulus(), b.modulus());
  return std::abs(a.modulus() - b.modulus()) <= kDedupTol * scale &&
         std::abs(a.argument() - b.argument()) <= kDedupTol * std::max(1.0, std::abs(a.argument()));
}

bool by_location(const ResonanceRecord& x, const ResonanceRecord& y) {
  if (x.location.modulus() != y.location.modulus()) return x.location.modulus() < y.location.modulus();
  if (x.location.argument() != y.location.argument()) return x.location.argument() < y.location.argument();
  return x.channel < y.channel;
}

}  // namespace

cplx lambda_derivative(const LambdaFunction& f, const LambdaPoint& p) {
  return derivative_multi(lift_scalar(f), p)[0];
}

MultiplicityReport winding(const LambdaFunction& f, const LambdaContour& c) {
  return winding_multi(lift_scalar(f), c)[0];
}

double default_msc_radius(const LambdaPoint& p0) { return 1e-3 * p0.modulus(); }

MultiplicityReport msc_report(const LambdaFunction& f, const LambdaPoint& p0, double radius) {
  return winding(f, LambdaContour(p0, radius > 0.0 ? radius : default_msc_radius(p0)));
}

int msc(const LambdaFunction& f, const LambdaPoint& p0, double radius) {
  const auto rep = msc_report(f, p0, radius);
  if (!rep.reliable) {
    throw UnreliableCount("winding around " + to_string(p0) + " did not settle (residual " +
                          std::to_string(rep.residual) + ")");
  }
  return rep.rounded;
}

std::vector<int> channel_orders(const Scatterer& s, int truncation, const LambdaPoint& p0, double radius,
                                ChannelQuantity q) {
  const VectorFunction f = [&](const LambdaPoint& p) {
    const auto ch = smatrix_channels(s, truncation, p);
    std::vector<cplx> out(ch.size());
    for (size_t i = 0; i < ch.size(); ++i) out[i] = q == ChannelQuantity::Jost ? ch[i].jost : ch[i].s_value;
    return out;
  };
  const auto reps = winding_multi(f, LambdaContour(p0, radius > 0.0 ? radius : default_msc_radius(p0)));
  std::vector<int> orders;
  for (size_t l = 0; l < reps.size(); ++l) {
    if (!reps[l].reliable) {
      throw UnreliableCount("channel " + std::to_string(l) + " winding around " + to_string(p0) +
                            " did not settle");
    }
    orders.push_back(reps[l].rounded);
  }
  return orders;
}

int mu_s_max(const Scatterer& s, int truncation, const LambdaPoint& p0, double radius) {
  const auto orders = channel_orders(s, truncation, p0, radius);
  int mu = 0;
  for (size_t l = 0; l < orders.size(); ++l) mu += (l == 0 ? 1 : 2) * std::max(0, -orders[l]);
  return mu;
}

void SearchWindow::validate() const {
  if (!(modulus_lo > 0.0) || !(modulus_hi > modulus_lo) || !std::isfinite(modulus_hi)) {
    throw std::invalid_argument("modulus window must satisfy 0 < lo < hi");
  }
  if (!(arg_hi > arg_lo)) throw std::invalid_argument("argument window must satisfy lo < hi");
  const double lo = sheet * kPi, hi = (sheet + 1) * kPi;
  const auto edge = [](double a) { return std::abs(a / kPi - std::round(a / kPi)) <= kSheetBoundaryTol; };
  if (arg_lo < lo || arg_hi > hi || edge(arg_lo) || edge(arg_hi)) {
    throw std::invalid_argument("argument window must lie inside the open sheet " + std::to_string(sheet));
  }
}

SearchWindow SearchWindow::sheet_band(int m, double lo, double hi, double margin) {
  return SearchWindow{m, lo, hi, m * kPi + margin, (m + 1) * kPi - margin};
}

LocateResult locate_zeros(const LambdaFunction& f, const SearchWindow& w, const LocateOptions& opt) {
  w.validate();
  LocateResult res;
  Cell root{std::log(w.modulus_lo), std::log(w.modulus_hi), w.arg_lo, w.arg_hi};
  count_cell(f, root, opt.edge_samples);
  res.cells_visited = 1;
  std::vector<Cell> frontier;
  if (root.count != 0) frontier.push_back(root);
  std::vector<Cell> finished;
  std::vector<ResonanceRecord> multiple;
  while (!frontier.empty()) {
    std::vector<Cell> next;
    std::mutex guard;
    parallel_for(static_cast<long>(frontier.size()), opt.parallel, [&](long i) {
      const Cell& c = frontier[i];
      const double size = std::max(c.u1 - c.u0, c.a1 - c.a0);
      const bool small = size <= opt.min_cell;
      const bool ready = c.count == 1 ? size <= opt.polish_cell : small;
      if (c.count <= 0 || ready) {
        std::lock_guard<std::mutex> lock(guard);
        if (c.count > 0) finished.push_back(c);
        return;
      }
      if (c.count >= 2 && size <= opt.polish_cell) {
        if (auto r = confirmed_multiple(f, c, opt)) {
          std::lock_guard<std::mutex> lock(guard);
          multiple.push_back(*r);
          return;
        }
      }
      auto kids = split(f, c, opt.edge_samples);
      std::lock_guard<std::mutex> lock(guard);
      for (auto& k : kids) {
        if (k.count != 0) next.push_back(k);
      }
      res.cells_visited += 4;
    });
    if (res.cells_visited > opt.max_cells) {
      res.budget_exhausted = true;
      for (auto& c : next) finished.push_back(c);
      break;
    }
    // keep processing order independent of thread scheduling
    std::sort(next.begin(), next.end(), [](const Cell& x, const Cell& y) {
      return std::tie(x.u0, x.a0) < std::tie(y.u0, y.a0);
    });
    frontier = std::move(next);
  }
  std::sort(finished.begin(), finished.end(),
            [](const Cell& x, const Cell& y) { return std::tie(x.u0, x.a0) < std::tie(y.u0, y.a0); });
  std::vector<std::optional<ResonanceRecord>> polished(finished.size());
  parallel_for(static_cast<long>(finished.size()), opt.parallel, [&](long i) {
    if (finished[i].count > 0) polished[i] = polish(f, finished[i], opt);
  });
  res.zeros = std::move(multiple);
  for (size_t i = 0; i < finished.size(); ++i) {
    if (polished[i]) {
      res.zeros.push_back(*polished[i]);
    } else if (finished[i].count > 0) {
      // Newton left the cell: report the center
      ResonanceRecord r;
      r.location = at_w(0.5 * (finished[i].u0 + finished[i].u1), 0.5 * (finished[i].a0 + finished[i].a1));
      r.multiplicity = finished[i].count;
      r.channel = opt.channel;
      r.residual = std::abs(f(r.location));
      r.scale = finished[i].scale;
      r.method = opt.method + "(cell-center)";
      res.zeros.push_back(r);
    }
  }
  std::sort(res.zeros.begin(), res.zeros.end(), by_location);
  std::vector<ResonanceRecord> unique;
  for (const auto& r : res.zeros) {
    if (!unique.empty() && same_location(unique.back().location, r.location)) {
      unique.back().multiplicity = std::max(unique.back().multiplicity, r.multiplicity);
      continue;
    }
    unique.push_back(r);
  }
  res.zeros = std::move(unique);
  return res;
}

std::vector<ResonanceRecord> aggregate(const std::vector<ResonanceRecord>& records) {
  std::vector<ResonanceRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), by_location);
  std::vector<ResonanceRecord> out;
  for (const auto& r : sorted) {
    bool merged = false;
    for (auto& o : out) {
      if (same_location(o.location, r.location)) {
        o.multiplicity += r.multiplicity;
        o.residual = std::max(o.residual, r.residual);
        o.channel = kAggregateChannel;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(r);
  }
  return out;
}

std::string to_json_line(const ResonanceRecord& r) {
  nlohmann::ordered_json j;
  j["location"] = to_string(r.location);
  j["sheet"] = sheet_of(r.location).sheet;
  j["multiplicity"] = r.multiplicity;
  if (r.channel == kAggregateChannel) {
    j["channel"] = "aggregate";
  } else {
    j["channel"] = r.channel;
  }
  j["residual"] = r.residual;
  j["method"] = r.method;
  return j.dump();
}

ResonanceRecord parse_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  ResonanceRecord r;
  r.location = parse_lambda_point(j.at("location").get<std::string>());
  r.multiplicity = j.at("multiplicity").get<int>();
  const auto& ch = j.at("channel");
  r.channel = ch.is_string() ? kAggregateChannel : ch.get<int>();
  r.residual = j.at("residual").get<double>();
  r.method = j.at("method").get<std::string>();
  return r;
}

}  // namespace lres
