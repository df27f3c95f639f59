#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "lambdares/channels.hpp"
#include "lambdares/identities.hpp"

using namespace lres;

namespace {

const Scatterer kWell = RadialPotential::step(1.0, -10.0);
const Scatterer kBarrier = RadialPotential::step(1.0, 10.0);
const Scatterer kDisc = DiscObstacle(1.0, BoundaryCondition::Dirichlet);
const Scatterer kRobin = DiscObstacle(1.5, BoundaryCondition::Robin, 0.7);
const Scatterer kShell = RadialPotential::piecewise({0.6, 1.2}, {4.0, -6.0});

// Step well with real k: interior J_l(kappa r) matched to H1, H2 with Boost.
cplx step_s(int l, double v, double a, double k) {
  using namespace boost::math;
  const double kappa = std::sqrt(k * k - v);
  const double j = cyl_bessel_j(l, kappa * a), jp = cyl_bessel_j_prime(l, kappa * a);
  const cplx h1(cyl_bessel_j(l, k * a), cyl_neumann(l, k * a));
  const cplx h1p(cyl_bessel_j_prime(l, k * a), cyl_neumann_prime(l, k * a));
  const cplx h2 = std::conj(h1), h2p = std::conj(h1p);
  return (k * j * h2p - kappa * jp * h2) / (kappa * jp * h1 - k * j * h1p);
}

}  // namespace

TEST_SUITE("channels") {
  TEST_CASE("free channels are trivial") {
    const Scatterer free = RadialPotential::step(1.0, 0.0);
    for (const auto& p : random_points(5, 20, 0.1, 10.0, -3, 3)) {
      const auto c = smatrix_channel(free, 3, p);
      CHECK(c.cplus == cplx(0.5));
      CHECK(c.cminus == cplx(0.5));
      CHECK(c.s_value == cplx(1.0));
    }
  }

  TEST_CASE("step well matches the Boost closed form on the positive axis") {
    for (double k : {0.3, 1.0, 2.7, 6.0}) {
      for (int l = 0; l <= 8; ++l) {
        const cplx s = smatrix_channel(kWell, l, LambdaPoint(k, 0.0)).s_value;
        CHECK(std::abs(s - step_s(l, -10.0, 1.0, k)) < 1e-11);
      }
    }
  }

  TEST_CASE("ODE integration of a flat sampled profile matches the closed form") {
    const Scatterer flat = RadialPotential::sampled({0.0, 1.0}, {-10.0, -10.0});
    for (const auto& p : random_points(6, 15, 0.2, 5.0, -2, 2)) {
      for (int l = 0; l <= 4; ++l) {
        CHECK(identity_residual(smatrix_channel(flat, l, p).s_value, smatrix_channel(kWell, l, p).s_value) < 1e-8);
      }
    }
  }

  TEST_CASE("unitarity on the positive axis") {
    for (const Scatterer* s : {&kWell, &kBarrier, &kDisc, &kRobin, &kShell}) {
      for (double k : {0.05, 0.9, 3.3, 12.0}) {
        for (const auto& c : smatrix_channels(*s, 20, LambdaPoint(k, 0.0))) {
          CHECK(std::abs(std::abs(c.s_value) - 1.0) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("sheet continuation follows the Moebius monodromy") {
    // S on sheet m equals ((m+1) S - m) / (m S - (m-1)) with S on sheet 0
    for (const Scatterer* s : {&kWell, &kDisc, &kShell}) {
      for (const auto& p : random_points(7, 25, 0.2, 6.0, 0, 0)) {
        for (int l = 0; l <= 5; ++l) {
          const cplx s0 = smatrix_channel(*s, l, p).s_value;
          for (int m = -3; m <= 3; ++m) {
            const cplx expect = ((m + 1.0) * s0 - static_cast<double>(m)) / (static_cast<double>(m) * s0 - (m - 1.0));
            CHECK(identity_residual(smatrix_channel(*s, l, rotate(p, m)).s_value, expect) < 1e-9);
          }
        }
      }
    }
  }

  TEST_CASE("corrected symmetry and product formula") {
    const auto pts = random_points(8, 40, 0.1, 8.0, -3, 3);
    for (const Scatterer* s : {&kWell, &kBarrier, &kDisc, &kRobin}) {
      const auto c = check_correction(*s, pts);
      CHECK_MESSAGE(c.pass, format_report(c));
      for (int m = 1; m <= 3; ++m) {
        const auto r = check_product(*s, pts, m);
        CHECK_MESSAGE(r.pass, format_report(r));
      }
    }
  }

  TEST_CASE("Dirichlet disc pole on the first sheet sits at a Hankel zero") {
    // H2_0 zero from mpmath: |z| = 2.42808486347655003, arg z = 3.00089403386009212
    const LambdaPoint pole(2.42808486347655003, 3.00089403386009212 + kPi);
    const double near = std::abs(jost(kDisc, 0, pole.scaled(1.001)));
    CHECK(std::abs(jost(kDisc, 0, pole)) < 1e-12 * std::max(1.0, near / 1e-3));
    CHECK(near > 1e-4);
  }

  TEST_CASE("truncation reaches the tail tolerance and grows with frequency") {
    int previous = 0;
    for (double k : {0.5, 2.0, 8.0, 20.0}) {
      const LambdaPoint p(k, 0.7);
      const int L = choose_truncation(kWell, p);
      CHECK(L >= previous);
      previous = L;
      CHECK(std::abs(smatrix_channel(kWell, L, p).s_value - 1.0) < kTruncationTol);
      CHECK(det_s(kWell, L, p).tail < kTruncationTol);
    }
    CHECK_THROWS_AS(smatrix_channels(kWell, kMaxBesselOrder, LambdaPoint(1.0, 0.5)), std::invalid_argument);
    CHECK_THROWS_AS(det_s(kWell, -1, LambdaPoint(1.0, 0.5)), std::invalid_argument);
  }

  TEST_CASE("serial and parallel channel tables agree bitwise") {
    const auto pts = random_points(9, 64, 0.1, 10.0, -3, 3);
    const auto a = channel_table(kShell, 12, pts, Execution::Serial);
    const auto b = channel_table(kShell, 12, pts, Execution::Parallel);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      for (int l = 0; l <= 12; ++l) CHECK(a[i][l].s_value == b[i][l].s_value);
    }
  }

  TEST_CASE("truncated matrix carries angular parity") {
    const auto m = smatrix_truncated(kWell, 3, LambdaPoint(1.0, 0.4));
    CHECK(m.diagonal.size() == 7);
    CHECK(m.at(-2) == m.at(2));
    CHECK(m.parity[0] == -1);
    CHECK(m.parity[3] == 1);
  }
}
