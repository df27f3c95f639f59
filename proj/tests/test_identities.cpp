#include <doctest.h>

#include <json.hpp>

#include "lambdares/channels.hpp"
#include "lambdares/identities.hpp"
#include "lambdares/multiplicity.hpp"

using namespace lres;

namespace {

const Scatterer kFree = RadialPotential::step(1.0, 0.0);
const Scatterer kDisc = DiscObstacle(1.0, BoundaryCondition::Dirichlet);
const Scatterer kWell = RadialPotential::step(1.0, -10.0);

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return out;
}

// Zeros on Lambda_0 of m c+ - (m-1) c- for channel l: images of the Lambda_m poles.
std::vector<LambdaPoint> numerator_zeros(const Scatterer& s, int l, int m, double lo, double hi) {
  const LambdaFunction f = [&](const LambdaPoint& p) {
    const auto c = smatrix_channel(s, l, p);
    return static_cast<double>(m) * c.cplus - (m - 1.0) * c.cminus;
  };
  LocateOptions opt;
  opt.parallel = false;
  std::vector<LambdaPoint> out;
  for (const auto& r : locate_zeros(f, SearchWindow::sheet_band(0, lo, hi), opt).zeros) out.push_back(r.location);
  return out;
}

}  // namespace

TEST_SUITE("identities") {
  TEST_CASE("residuals are relative above unit reference and absolute below") {
    CHECK(identity_residual(cplx(101.0), cplx(100.0)) == doctest::Approx(0.01));
    CHECK(identity_residual(cplx(0.5), cplx(0.25)) == doctest::Approx(0.25));
    CHECK(identity_residual(cplx(0.0, 1e-3), cplx(0.0)) == doctest::Approx(1e-3));
  }

  TEST_CASE("seeded point sets are deterministic and stay inside open sheets") {
    const auto a = random_points(42, 200, 0.1, 8.0, -3, 3);
    const auto b = random_points(42, 200, 0.1, 8.0, -3, 3);
    const auto c = random_points(43, 200, 0.1, 8.0, -3, 3);
    CHECK(a == b);
    CHECK(a != c);
    for (const auto& p : a) {
      const auto loc = sheet_of(p);
      CHECK_FALSE(loc.on_boundary);
      CHECK(loc.sheet >= -3);
      CHECK(loc.sheet <= 3);
      CHECK(p.modulus() >= 0.1);
      CHECK(p.modulus() <= 8.0);
    }
    CHECK_THROWS_AS(random_points(1, 3, 0.0, 1.0, 0, 0), std::invalid_argument);
    CHECK(format_report(check_correction(kWell, a)) == format_report(check_correction(kWell, b)));
  }

  TEST_CASE("every check passes on the free scatterer at 1e-12") {
    const auto pts = random_points(1, 50, 0.1, 8.0, -4, 4);
    const auto corr = check_correction(kFree, pts);
    CHECK(corr.pass);
    CHECK(corr.max_residual <= 1e-12);
    for (int m = 0; m <= 4; ++m) {
      const auto prod = check_product(kFree, pts, m);
      CHECK(prod.pass);
      CHECK(prod.max_residual <= 1e-12);
    }
    for (const auto& p : random_points(2, 5, 0.5, 4.0, 0, 1)) {
      const auto t = check_togettophys(kFree, p, 1);
      CHECK(t.pass);
      CHECK(t.integers == std::vector<int>{0, 0, 0});
      const auto pr = check_prpsm(kFree, p);
      CHECK(pr.pass);
      CHECK(pr.integers == std::vector<int>{0, 0, 0});
      const auto rp = check_rpsp(kFree, to_principal(p).principal, 2);
      CHECK(rp.pass);
      CHECK(rp.integers == std::vector<int>{0, 0});
    }
    const auto sig = log_spaced(0.01, 20.0, 20);
    for (int m : {-2, -1, 1, 2}) {
      const auto r = check_pureimag(kFree, sig, m);
      CHECK(r.pass);
      CHECK(r.max_residual <= 1e-12);
    }
    const auto base = random_points(3, 10, 0.2, 5.0, 0, 0);
    const std::vector<double> dist{0.0, 0.05, 0.3, 1.0, 2.5};
    for (int m = -3; m <= 3; ++m) {
      const auto r = check_reduction(base, m, dist);
      CHECK(r.pass);
      CHECK(r.max_residual <= 1e-12);
    }
    const auto rd = check_resdiff_free(base, dist);
    CHECK(rd.pass);
    CHECK(rd.max_residual <= 1e-12);
  }

  TEST_CASE("reduction at m = 0 is exact") {
    const auto base = random_points(4, 10, 0.2, 5.0, 0, 0);
    const std::vector<double> dist{0.0, 0.5, 1.5};
    CHECK(check_reduction(base, 0, dist).max_residual == 0.0);
  }

  TEST_CASE("product formula at m = 0 vanishes identically") {
    const auto pts = random_points(5, 30, 0.1, 8.0, -2, 2);
    CHECK(check_product(kWell, pts, 0).max_residual == 0.0);
    CHECK(check_product(kDisc, pts, 0).max_residual == 0.0);
  }

  TEST_CASE("Dirichlet disc corrected symmetry on sheets up to 3") {
    const auto pts = random_points(6, 50, 0.1, 8.0, -3, 3);
    const auto r = check_correction(kDisc, pts);
    CHECK_MESSAGE(r.pass, format_report(r));
    const auto bad = check_correction(kDisc, pts, -1, ParityMode::OneSided);
    CHECK_FALSE(bad.pass);
    CHECK(bad.name == "correction[one-sided-parity]");
  }

  TEST_CASE("disc resonance on the first sheet: pole/zero theorems") {
    const LambdaPoint pole(2.42808486347655003, 3.00089403386009212 + kPi);
    const auto pr = check_prpsm(kDisc, pole);
    CHECK_MESSAGE(pr.pass, format_report(pr));
    REQUIRE(pr.integers.size() == 3);
    CHECK(pr.integers[0] == 1);
    const auto conj = check_prpsm(kDisc, involute(pole));
    CHECK(conj.pass);
    CHECK(conj.integers[0] == -1);
    const auto rp = check_rpsp(kDisc, rotate(pole, -1), 1);
    CHECK_MESSAGE(rp.pass, format_report(rp));
    CHECK(rp.integers == std::vector<int>{1, 1});
  }

  TEST_CASE("zeros of 2 S0 - 1 on the physical sheet map to poles two sheets up") {
    const auto zeros = numerator_zeros(kDisc, 0, 2, 0.2, 6.0);
    REQUIRE_FALSE(zeros.empty());
    for (const auto& z : zeros) {
      CHECK(std::abs(jost(kDisc, 0, rotate(z, 2))) < 1e-10 * std::abs(jost(kDisc, 0, rotate(z, 2).scaled(1.01))));
      const auto t = check_togettophys(kDisc, z, 1);
      CHECK_MESSAGE(t.pass, format_report(t));
      REQUIRE(t.integers.size() == 3);
      CHECK(t.integers[0] == 1);
    }
  }

  TEST_CASE("well resonances on the second sheet match zeros of 2S - 1") {
    int tested = 0;
    for (int l = 0; l <= 2; ++l) {
      for (const auto& z : numerator_zeros(kWell, l, 2, 0.2, 4.0)) {
        ++tested;
        const auto r = check_rpsp(kWell, z, 2);
        CHECK_MESSAGE(r.pass, format_report(r));
        CHECK(r.integers[0] == r.integers[1]);
        CHECK(r.integers[0] >= 1);
      }
    }
    CHECK(tested > 0);
  }

  TEST_CASE("obstacles and barriers have no purely imaginary poles") {
    const auto sig = log_spaced(0.01, 20.0, 40);
    const Scatterer neumann = DiscObstacle(1.0, BoundaryCondition::Neumann);
    const Scatterer barrier = RadialPotential::step(1.0, 10.0);
    for (const Scatterer* s : {&kDisc, &neumann, &barrier}) {
      for (int m : {-2, -1, 1, 2}) {
        const auto r = check_pureimag(*s, sig, m);
        CHECK_MESSAGE(r.pass, format_report(r));
        CHECK(r.detail.find("min jost margin") != std::string::npos);
      }
    }
  }

  TEST_CASE("report formats") {
    const auto r = check_product(kWell, random_points(7, 4, 0.5, 2.0, 0, 1), 1);
    const std::string line = format_report(r);
    CHECK(line.rfind("product[m=1]", 0) == 0);
    CHECK(line.find("points=4") != std::string::npos);
    CHECK(line.find("PASS") != std::string::npos);
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j.at("name") == "product[m=1]");
    CHECK(j.at("pass") == true);
    CHECK(j.at("points") == 4);
  }
}
