#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lambdares/fredholm2d.hpp"
#include "lambdares/identities.hpp"
#include "lambdares/multiplicity.hpp"

using namespace lres;

namespace {

Potential2D raster(const RadialPotential& v, int n) {
  return Potential2D::rasterize(v, n, Potential2D::snug_half_width(v.support(), n));
}

RadialPotential smooth_bump() {
  std::vector<double> r, v;
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    r.push_back(x);
    v.push_back(-6.0 * (1.0 - x * x) * (1.0 - x * x));
  }
  return RadialPotential::sampled(r, v);
}

// Integral of R0 over [-s,s]^2 in polar form: 8 int_0^{pi/4} int_0^{s/cos t} R0(r) r dr dt.
cplx cell_quadrature(const LambdaPoint& p, double s) {
  using boost::math::quadrature::gauss_kronrod;
  auto part = [&](bool imag) {
    auto outer = [&](double t) {
      auto inner = [&](double r) {
        if (r == 0.0) return 0.0;
        const cplx g = r0_kernel(p, r) * r;
        return imag ? g.imag() : g.real();
      };
      return gauss_kronrod<double, 61>::integrate(inner, 0.0, s / std::cos(t), 8, 1e-14);
    };
    return 8.0 * gauss_kronrod<double, 61>::integrate(outer, 0.0, 0.25 * kPi, 8, 1e-14);
  };
  return {part(false), part(true)};
}

}  // namespace

TEST_SUITE("fredholm2d") {
  TEST_CASE("conventions resolve to fixed signs") {
    CHECK(sheet_sign() == -1);
    CHECK(resdiff_sign() == -1);
    CHECK(kAlpha2 == cplx(0.0, -1.0 / (4.0 * kPi)));
    CHECK(std::abs(farfield_constant() - cplx(0.0, -1.0 / (4.0 * kPi))) < 1e-15);
  }

  TEST_CASE("log part of the self-cell integral matches mpmath") {
    // int_{[-s,s]^2} log|y| dy from 40-digit mpmath
    const std::pair<double, double> frozen[] = {{0.05, -0.033637605198765700291}, {0.01, -0.0019892793729242681615}};
    for (const auto& [s, ref] : frozen) {
      for (const auto& p : {LambdaPoint(1.0, 0.5), LambdaPoint(2.0, 4.0)}) {
        const double h = 2.0 * s;
        const cplx smooth = 0.25 * cplx(0.0, 1.0) -
                            (std::log(0.5 * p.modulus()) + cplx(0.0, p.argument()) + 0.57721566490153286) / (2.0 * kPi);
        const cplx log_part = -2.0 * kPi * (r0_cell_integral(p, h, SheetRoute::Direct) - smooth * h * h);
        CHECK(std::abs(log_part - ref) < 1e-15);
      }
    }
  }

  TEST_CASE("self-cell integral agrees with adaptive quadrature") {
    for (const auto& p : {LambdaPoint(1.0, 0.5), LambdaPoint(3.0, 2.0), LambdaPoint(2.0, 4.0), LambdaPoint(1.5, -2.5)}) {
      for (double h : {0.1, 0.02}) {
        // local expansion drops |lambda|^2 r^2 log r terms: O(|lambda|^2 h^4 log h)
        const cplx q = cell_quadrature(p, 0.5 * h);
        const double bound = std::norm(p.project()) * std::pow(h, 4) * (1.0 - std::log(h)) / (8.0 * kPi);
        CHECK(std::abs(r0_cell_integral(p, h, SheetRoute::Direct) - q) < bound);
        CHECK(std::abs(r0_cell_integral(p, h, SheetRoute::Reduction) - q) < bound);
      }
    }
  }

  TEST_CASE("T kernel matches the angular trapezoid") {
    for (const auto& p : random_points(31, 20, 0.2, 5.0, -3, 3)) {
      const Vec2 x{0.3, -0.2}, y{-0.4, 0.5};
      const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
      cplx sum = 0.0;
      const int n = 512;
      for (int k = 0; k < n; ++k) sum += std::exp(cplx(0.0, 1.0) * p.project() * r * std::cos(2.0 * kPi * k / n));
      const cplx trap = sum / (2.0 * n);
      CHECK(std::abs(t_kernel(p, x, y) - trap) < 1e-12 * std::max(1.0, std::abs(trap)));
    }
    CHECK(t_kernel(LambdaPoint(1.0, 0.3), {0.1, 0.1}, {0.1, 0.1}) == cplx(0.5));
  }

  TEST_CASE("free resolvent reduction across sheets") {
    for (const auto& p : random_points(32, 20, 0.2, 5.0, 0, 0)) {
      for (double r : {0.05, 0.8, 2.0}) {
        const cplx j0 = eval_on_lambda(0, p.scaled(r)).j;
        for (int m = -3; m <= 3; ++m) {
          const cplx expect = r0_kernel(p, r) + static_cast<double>(sheet_sign() * m) * cplx(0.0, 0.5) * j0;
          CHECK(std::abs(r0_kernel(rotate(p, m), r) - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
        }
      }
    }
  }

  TEST_CASE("vanishing potential gives an empty operator") {
    const Potential2D zero(8, 1.0, std::vector<double>(64, 0.0));
    const auto k = k_matrix(zero, LambdaPoint(1.0, 0.5));
    CHECK(k.entries.size() == 0);
    const auto d = fredholm_det(k);
    CHECK(d.value == cplx(1.0));
    CHECK(d.log_value == cplx(0.0));
  }

  TEST_CASE("parallel, serial and reference assemblies agree") {
    const Potential2D v = raster(RadialPotential::step(1.0, -10.0), 16);
    for (const auto& p : {LambdaPoint(1.3, 0.4), LambdaPoint(2.0, 4.5), LambdaPoint(0.7, -1.0)}) {
      const auto par = k_matrix(v, p, SheetRoute::Reduction, Execution::Parallel);
      const auto ser = k_matrix(v, p, SheetRoute::Reduction, Execution::Serial);
      const auto ref = k_matrix_reference(v, p);
      CHECK((par.entries - ser.entries).norm() == 0.0);
      CHECK((par.entries - ref.entries).norm() <= 1e-14 * ref.entries.norm());
      const auto direct = k_matrix(v, p, SheetRoute::Direct);
      CHECK((direct.entries - par.entries).norm() <= 1e-12 * par.entries.norm());
      const auto d1 = fredholm_det(par), d2 = fredholm_det(direct);
      CHECK(std::abs(d1.value - d2.value) <= 1e-10 * std::abs(d1.value));
      CHECK(std::abs(std::exp(d1.log_value) - d1.value) <= 1e-12 * std::abs(d1.value));
    }
  }

  TEST_CASE("regularized determinant converges under grid refinement") {
    const auto bump = smooth_bump();
    auto change = [](cplx a, cplx b) { return std::abs(std::log(std::exp(a - b))); };
    for (const auto& p : {LambdaPoint(1.0, 0.3), LambdaPoint(2.5, 1.0), LambdaPoint(4.0, 0.05)}) {
      const auto coarse = fredholm_det(raster(bump, 48), p);
      const auto fine = fredholm_det(raster(bump, 96), p);
      CHECK(change(fine.regularized_log, coarse.regularized_log) <= 1e-3);
      // tr K grows like (int V / 2 pi) log n with int V = -2 pi, so the raw log-det drifts by -log 2
      const double drift = (fine.log_value - coarse.log_value).real();
      CHECK(drift == doctest::Approx(-std::log(2.0)).epsilon(0.1));
    }
    const LambdaPoint off(3.0, 4.0);
    const cplx d16 = fredholm_det(raster(bump, 16), off).regularized_log;
    const cplx d32 = fredholm_det(raster(bump, 32), off).regularized_log;
    const cplx d64 = fredholm_det(raster(bump, 64), off).regularized_log;
    CHECK(change(d64, d32) * 3.0 <= change(d32, d16));
  }

  TEST_CASE("far-field matrix is unitary and diagonal in Fourier modes") {
    const auto well = RadialPotential::step(1.0, -3.0);
    const Potential2D grid = raster(well, 48);
    const int n = 48;
    for (double k : {0.6, 1.5, 2.5}) {
      const LambdaPoint p(k, 0.0);
      const auto ff = farfield_smatrix(grid, p, n);
      REQUIRE_FALSE(ff.pole);
      const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
      CHECK((ff.s * ff.s.adjoint() - id).norm() / std::sqrt(double(n)) < 1e-2);
      for (int l = 0; l <= 4; ++l) {
        cplx mode = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) mode += ff.s(a, b) * std::exp(cplx(0.0, 2.0 * kPi * l * (b - a) / n));
        }
        mode /= static_cast<double>(n);
        CHECK(std::abs(mode - smatrix_channel(Scatterer(well), l, p).s_value) < 1e-2);
      }
    }
    const auto par = parity_matrix(n);
    CHECK((par * par - Eigen::MatrixXcd::Identity(n, n)).norm() == 0.0);
    CHECK_THROWS_AS(parity_matrix(7), std::invalid_argument);
  }

  TEST_CASE("fixed-sign certificates hold on barrier and well") {
    const Potential2D barrier = raster(RadialPotential::step(1.0, 10.0), 24);
    const Potential2D well = raster(RadialPotential::step(1.0, -10.0), 24);
    for (double sigma : {0.5, 2.0}) {
      for (int m : {1, 2}) {
        for (const auto* v : {&barrier, &well}) {
          const auto certs = fixed_sign_certificates(*v, sigma, m);
          CHECK_FALSE(certs.empty());
          for (const auto& c : certs) CHECK_MESSAGE(c.pass, (to_string(c.kind) + ": " + c.detail));
        }
      }
    }
    const Potential2D mixed = raster(RadialPotential::piecewise({0.5, 1.0}, {5.0, -5.0}), 16);
    CHECK_THROWS(fixed_sign_certificates(mixed, 1.0, 1));
  }

  TEST_CASE("Newton polish lands on a determinant zero near the partial-wave resonance") {
    const auto well = RadialPotential::step(1.0, -10.0);
    const Potential2D grid = raster(well, 32);
    const LambdaFunction j0 = [&](const LambdaPoint& p) { return jost(Scatterer(well), 0, p); };
    LocateOptions opt;
    opt.parallel = false;
    const auto z = locate_zeros(j0, SearchWindow::sheet_band(1, 0.2, 3.0), opt).zeros;
    REQUIRE_FALSE(z.empty());
    const auto d = polish_det_zero(grid, z.front().location);
    CHECK(d.converged);
    CHECK(sheet_of(d.location).sheet == 1);
    CHECK(std::abs(d.location.project() - z.front().location.project()) < 3e-2);
    const double at = std::abs(fredholm_det(grid, d.location).value);
    const double off = std::abs(fredholm_det(grid, d.location.scaled(1.01)).value);
    CHECK(at < 1e-6 * off);
  }
}
