#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "lambdares/besselkit.hpp"
#include "lambdares/channels.hpp"
#include "lambdares/cli.hpp"
#include "lambdares/fredholm2d.hpp"
#include "lambdares/identities.hpp"
#include "lambdares/lattice_spectrum.hpp"

namespace lres {
namespace {

constexpr int kDefaultGrid = 32;
constexpr int kLatticeGrid = 64;
constexpr double kRayHalfWidth = 1e-3;
constexpr double kCrossingTol = 1e-7;
constexpr int kMarginSamples = 64;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string real17(double v) { return fmt("%.17g", v); }

bool is_disc(const Scatterer& s) { return std::holds_alternative<DiscObstacle>(s); }

/// The Potential2D behind a grid run: the grid itself, or a radial potential
/// rasterized at --grid (or `fallback`) cells per side.
std::optional<Potential2D> grid_potential(const RunConfig& c, std::optional<int> fallback) {
  if (const auto* g = std::get_if<Potential2D>(&c.scatterer)) {
    if (c.grid && *c.grid != g->n()) throw InputError("--grid does not match the grid in the config");
    return *g;
  }
  if (const auto* r = std::get_if<RadialPotential>(&c.scatterer)) {
    const std::optional<int> n = c.grid ? c.grid : fallback;
    if (!n) return std::nullopt;
    if (*n < 3) throw InputError("--grid must be at least 3");
    return Potential2D::rasterize(*r, *n, Potential2D::snug_half_width(r->support(), *n));
  }
  if (c.grid) throw InputError("--grid applies to potentials, not obstacles");
  return std::nullopt;
}

int truncation_for(const RunConfig& c, double modulus_hi) {
  if (c.channels) {
    if (*c.channels < 0 || *c.channels > kMaxChannels) throw InputError("--channels out of range");
    return *c.channels;
  }
  return choose_truncation(c.scatterer, LambdaPoint(modulus_hi, 0.0));
}

double scale_length(const Scatterer& s) {
  const double a = support_radius(s);
  return a > 0.0 ? a : 1.0;
}

void sort_records(std::vector<ResonanceRecord>& v) {
  std::sort(v.begin(), v.end(), [](const ResonanceRecord& a, const ResonanceRecord& b) {
    const int sa = sheet_of(a.location).sheet, sb = sheet_of(b.location).sheet;
    if (sa != sb) return sa < sb;
    if (a.channel != b.channel) return a.channel < b.channel;
    if (a.location.modulus() != b.location.modulus()) return a.location.modulus() < b.location.modulus();
    return a.location.argument() < b.location.argument();
  });
}

std::vector<ResonanceRecord> channel_zeros(const Scatterer& s, int ell, const SearchWindow& w) {
  LocateOptions opt;
  opt.channel = ell;
  opt.method = "jost-cells+newton";
  return locate_zeros([&](const LambdaPoint& p) { return jost(s, ell, p); }, w, opt).zeros;
}

std::vector<ResonanceRecord> determinant_zeros(const Potential2D& v, const SearchWindow& w) {
  LocateOptions opt;
  opt.method = "fredholm-cells+newton";
  opt.edge_samples = 8;
  opt.parallel = false;
  return locate_zeros([&](const LambdaPoint& p) { return fredholm_det(v, p).value; }, w, opt).zeros;
}

void report_header(std::ostream& out, const RunConfig& c) {
  out << "# lambdares " << c.command << " config_hash=" << config_hash(c) << " scatterer=" << describe(c.scatterer);
  if (c.seed) out << " seed=" << *c.seed;
  out << '\n';
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return out;
}

// Integer identities at the smallest located resonances of sheets 1 and 2.
void resonance_identities(const Scatterer& s, std::vector<IdentityReport>& reports) {
  const double a = scale_length(s);
  for (const int m : {1, 2}) {
    std::vector<ResonanceRecord> found;
    for (int ell = 0; ell <= 2; ++ell) {
      auto z = channel_zeros(s, ell, SearchWindow::sheet_band(m, 0.2 / a, 4.0 / a));
      found.insert(found.end(), z.begin(), z.end());
    }
    sort_records(found);
    std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
      return x.location.modulus() < y.location.modulus();
    });
    if (found.size() > 2) found.resize(2);
    for (const auto& r : found) {
      const LambdaPoint& z = r.location;
      if (m == 1) {
        reports.push_back(check_prpsm(s, z));
        reports.push_back(check_rpsp(s, rotate(z, -1), 1));
      } else {
        reports.push_back(check_rpsp(s, rotate(z, -2), 2));
        reports.push_back(check_togettophys(s, rotate(z, -2), 1));
      }
    }
  }
}

IdentityReport certificate_report(const Potential2D& v, const std::string& name) {
  IdentityReport r;
  r.name = name;
  r.scatterer = describe(Scatterer(v));
  r.pass = true;
  double worst = 0.0;
  for (const double sigma : {0.5, 1.0, 2.0}) {
    for (const int m : {1, 2}) {
      for (const auto& cert : fixed_sign_certificates(v, sigma, m)) {
        r.points.emplace_back(sigma, 0.5 * kPi + m * kPi);
        r.pass = r.pass && cert.pass;
        if (cert.kind == CertificateKind::SkewAdjointT) worst = std::max(worst, cert.measured);
        if (!cert.pass) r.detail += (r.detail.empty() ? "" : "; ") + to_string(cert.kind) + ": " + cert.detail;
      }
    }
  }
  r.max_residual = worst;
  r.threshold = 1e-10;
  return r;
}

}  // namespace

int cmd_resonances(const RunConfig& c, std::ostream& out) {
  const auto windows = search_windows(c, 0.1 / scale_length(c.scatterer), 6.0 / scale_length(c.scatterer));
  std::vector<ResonanceRecord> records;
  if (const auto grid = grid_potential(c, std::nullopt)) {
    for (const auto& w : windows) {
      const auto z = determinant_zeros(*grid, w);
      records.insert(records.end(), z.begin(), z.end());
    }
  } else {
    for (const auto& w : windows) {
      const int L = truncation_for(c, w.modulus_hi);
      for (int ell = 0; ell <= L; ++ell) {
        const auto z = channel_zeros(c.scatterer, ell, w);
        records.insert(records.end(), z.begin(), z.end());
      }
    }
  }
  sort_records(records);
  write_catalog(out, c, records);
  return kExitOk;
}

int cmd_identity_suite(const RunConfig& c, std::ostream& out) {
  if (!c.seed) throw InputError("identities requires --seed");
  const std::uint64_t seed = *c.seed;
  const ParityMode parity = c.corrupt_parity ? ParityMode::OneSided : ParityMode::Conjugated;
  std::vector<IdentityReport> reports;
  const auto free_points = random_points(seed + 1, 20, 0.2, 5.0, 0, 0);
  const std::vector<double> distances{0.0, 0.05, 0.3, 1.0, 2.5};

  if (const auto* g = std::get_if<Potential2D>(&c.scatterer)) {
    const auto pts = random_points(seed, 8, 0.3, 3.0, -2, 1);
    reports.push_back(check_correction_farfield(*g, pts, 48, parity));
    if (sign_class(*g) != SignClass::Mixed) reports.push_back(certificate_report(*g, "fixed-sign-certificates"));
  } else {
    const double a = scale_length(c.scatterer);
    const auto pts = random_points(seed, 100, 0.1 / a, 8.0 / a, -3, 3);
    reports.push_back(check_correction(c.scatterer, pts, -1, parity));
    const auto shallow = random_points(seed + 2, 100, 0.1 / a, 8.0 / a, -2, 2);
    for (int m = 1; m <= 4; ++m) reports.push_back(check_product(c.scatterer, shallow, m));
    resonance_identities(c.scatterer, reports);
    const auto sigmas = log_spaced(0.05 / a, 20.0 / a, 40);
    for (const int m : {-2, -1, 1, 2}) reports.push_back(check_pureimag(c.scatterer, sigmas, m));
    if (const auto* r = std::get_if<RadialPotential>(&c.scatterer); r && sign_class(*r) != SignClass::Mixed) {
      const auto v = grid_potential(c, kDefaultGrid);
      reports.push_back(certificate_report(*v, "fixed-sign-certificates"));
    }
  }
  for (const int m : {-2, 1, 2}) reports.push_back(check_reduction(free_points, m, distances));
  reports.push_back(check_resdiff_free(free_points, distances));

  std::stable_sort(reports.begin(), reports.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  report_header(out, c);
  int failures = 0;
  for (const auto& r : reports) {
    out << format_report(r) << '\n';
    if (!r.pass && !r.detail.empty()) out << "#   " << r.detail << '\n';
    failures += r.pass ? 0 : 1;
  }
  out << "# " << reports.size() - failures << "/" << reports.size() << " identities passed\n";
  return failures == 0 ? kExitOk : kExitIdentityFailure;
}

int cmd_pure_imag_scan(const RunConfig& c, std::ostream& out) {
  RunConfig rc = c;
  if (rc.sheets.empty()) rc.sheets = {-3, -2, -1, 0, 1, 2, 3};
  if (rc.arg_window) throw InputError("pure-imag scans fixed rays; --arg-window does not apply");
  const double a = scale_length(c.scatterer);
  const double lo = c.window ? c.window->first : 0.01 / a;
  const double hi = c.window ? c.window->second : (is_disc(c.scatterer) ? 20.0 : 10.0) / a;
  if (!(lo > 0.0)) throw InputError("--window must be positive");
  const auto grid = grid_potential(c, std::nullopt);
  const int L = grid ? 0 : truncation_for(c, hi);
  const auto sigmas = log_spaced(lo, hi, kMarginSamples);

  // Expected bound on crossings per sheet; -1 when no theorem applies.
  int bound = -1;
  int n_v = -1;
  std::string basis;
  if (const auto* d = std::get_if<DiscObstacle>(&c.scatterer)) {
    if (d->condition != BoundaryCondition::Robin) bound = 0, basis = "obstacle";
  } else {
    const SignClass sc = grid ? sign_class(*grid) : sign_class(std::get<RadialPotential>(c.scatterer));
    if (sc == SignClass::NonNegative) {
      bound = 0, basis = "barrier";
    } else if (sc == SignClass::NonPositive) {
      const auto lattice = grid_potential(c, kLatticeGrid);
      n_v = lattice_count_below(*lattice, 0.0);
      bound = n_v, basis = "well";
    }
  }

  report_header(out, rc);
  out << "# sigma window " << real17(lo) << ":" << real17(hi) << ", ray half-width " << kRayHalfWidth << '\n';
  if (n_v >= 0) out << "# N_V = " << n_v << " (lattice, grid " << (c.grid ? *c.grid : kLatticeGrid) << ")\n";
  out << "# sheet channel crossings min_margin sigma_at_min skipped\n";
  int worst = 0;
  bool skipped_any = false;
  std::vector<ResonanceRecord> crossings;
  for (const int m : rc.sheets) {
    const double target = 0.5 * kPi + m * kPi;
    SearchWindow w{m, lo, hi, target - kRayHalfWidth, target + kRayHalfWidth};
    int sheet_total = 0;
    for (int ell = grid ? kAggregateChannel : 0; ell <= L; ++ell) {
      const int weight = ell >= 1 ? 2 : 1;
      int count = 0;
      double margin = HUGE_VAL, at = 0.0;
      std::string skipped = "-";
      try {
        std::vector<ResonanceRecord> z = grid ? determinant_zeros(*grid, w) : channel_zeros(c.scatterer, ell, w);
        for (auto& r : z) {
          if (std::abs(r.location.argument() - target) < kCrossingTol) {
            count += weight * r.multiplicity;
            crossings.push_back(r);
          }
        }
        for (const double sigma : sigmas) {
          const LambdaPoint p(sigma, target);
          double val;
          if (grid) {
            val = std::abs(fredholm_det(*grid, p).value);
          } else {
            const auto ch = smatrix_channel(c.scatterer, ell, p);
            val = std::abs(ch.cminus) / (std::abs(ch.cminus) + std::abs(ch.cplus));
          }
          if (val < margin) margin = val, at = sigma;
        }
      } catch (const BesselOverflow&) {
        skipped = "overflow";
        skipped_any = true;
      } catch (const ContourHit&) {
        skipped = "contour-hit";
        skipped_any = true;
      }
      sheet_total += count;
      out << m << ' ' << (grid ? std::string("aggregate") : std::to_string(ell)) << ' ' << count << ' '
          << fmt("%.6e", margin) << ' ' << fmt("%.6e", at) << ' ' << skipped << '\n';
    }
    out << "# sheet " << m << " total crossings " << sheet_total << '\n';
    worst = std::max(worst, sheet_total);
  }
  for (const auto& r : crossings) out << "# crossing " << to_json_line(r) << '\n';
  const bool ok = bound < 0 || (worst <= bound && !skipped_any);
  if (bound < 0) {
    out << "# no crossing bound applies to this scatterer\n";
  } else {
    out << "# " << basis << " bound " << bound << ", max crossings per sheet " << worst << ": "
        << (ok ? "PASS" : "FAIL") << '\n';
  }
  return ok ? kExitOk : kExitIdentityFailure;
}

int cmd_smatrix(const RunConfig& c, std::ostream& out) {
  std::vector<LambdaPoint> pts = c.points;
  if (pts.empty()) {
    if (!c.window) throw InputError("smatrix needs --point or --window");
    if (c.samples < 1) throw InputError("--samples must be positive");
    for (const double r : log_spaced(c.window->first, c.window->second, c.samples)) pts.emplace_back(r, c.arg);
  }
  if (const auto grid = grid_potential(c, std::nullopt)) {
    const int n = 48;
    out << "row,col,modulus,arg,re_s,im_s\n";
    for (const auto& p : pts) {
      const auto s = farfield_smatrix(*grid, p, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          out << i << ',' << j << ',' << real17(p.modulus()) << ',' << real17(p.argument()) << ','
              << real17(s.s(i, j).real()) << ',' << real17(s.s(i, j).imag()) << '\n';
        }
      }
    }
    return kExitOk;
  }
  out << "ell,modulus,arg,re_s,im_s\n";
  for (const auto& p : pts) {
    const int L = c.channels ? truncation_for(c, p.modulus()) : choose_truncation(c.scatterer, p);
    const auto ch = smatrix_channels(c.scatterer, L, p);
    for (int ell = -L; ell <= L; ++ell) {
      const cplx s = ch[std::abs(ell)].s_value;
      out << ell << ',' << real17(p.modulus()) << ',' << real17(p.argument()) << ',' << real17(s.real()) << ','
          << real17(s.imag()) << '\n';
    }
  }
  return kExitOk;
}

int cmd_bessel(const RunConfig& c, std::ostream& out) {
  if (c.points.size() != 1) throw InputError("bessel needs exactly one --point");
  if (c.order < 0 || c.order > kMaxBesselOrder) throw InputError("--order out of range");
  const LambdaPoint& p = c.points.front();
  const CylinderEval e = eval_on_lambda(c.order, p);
  const auto row = [&](const char* name, cplx v) {
    out << name << ' ' << real17(v.real()) << ' ' << real17(v.imag()) << '\n';
  };
  const SheetLocation loc = sheet_of(p);
  out << "# order " << c.order << " point " << to_string(p) << ' '
      << (loc.on_boundary ? "boundary " + std::to_string(loc.boundary_index) : "sheet " + std::to_string(loc.sheet))
      << '\n';
  row("j", e.j);
  row("jprime", e.jprime);
  row("h1", e.h1);
  row("h1prime", e.h1prime);
  row("h2", e.h2);
  row("h2prime", e.h2prime);
  out << "wronskian_residual " << fmt("%.3e", wronskian_residual(c.order, p)) << '\n';
  return kExitOk;
}

int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "resonances") return cmd_resonances(c, out);
    if (c.command == "identities") return cmd_identity_suite(c, out);
    if (c.command == "pure-imag") return cmd_pure_imag_scan(c, out);
    if (c.command == "smatrix") return cmd_smatrix(c, out);
    if (c.command == "bessel") return cmd_bessel(c, out);
    throw InputError("unknown command '" + c.command + "'");
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace lres
