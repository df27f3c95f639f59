#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lambdares/cli.hpp"

using namespace lres;

namespace {

const std::string kTmp = LAMBDARES_TEST_TMP;

std::string write_config(const std::string& name, const std::string& json) {
  const std::string path = kTmp + "/" + name;
  std::ofstream(path) << json;
  return path;
}

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args, const std::string& tag) {
  const std::string out = kTmp + "/cli_" + tag + ".out";
  const std::string cmd = std::string(LAMBDARES_CLI) + " " + args + " > " + out + " 2> " + out + ".err";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("range parsing") {
    CHECK(parse_range("0.5:3") == std::pair<double, double>(0.5, 3.0));
    CHECK(parse_range("-1e-3:2.5e1") == std::pair<double, double>(-1e-3, 25.0));
    CHECK_THROWS_AS(parse_range("3:0.5"), InputError);
    CHECK_THROWS_AS(parse_range("1:1"), InputError);
    CHECK_THROWS_AS(parse_range("1-2"), InputError);
    CHECK_THROWS_AS(parse_range("a:2"), InputError);
    CHECK_THROWS_AS(parse_range("1:2x"), InputError);
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("config hash depends only on run content") {
    RunConfig a;
    a.command = "resonances";
    a.scatterer = parse_scatterer(R"({"kind":"disc","radius":1,"condition":"dirichlet"})");
    a.sheets = {1};
    RunConfig b = a;
    b.config_path = "/some/other/path.json";
    b.out_path = "x";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.sheets = {2};
    CHECK(config_hash(a) != config_hash(b));
    RunConfig c = a;
    c.seed = 7;
    CHECK(config_hash(a) != config_hash(c));
  }

  TEST_CASE("search windows stay inside open sheets") {
    RunConfig c;
    c.sheets = {-1, 2};
    const auto w = search_windows(c, 0.1, 5.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0].sheet == -1);
    CHECK(w[1].arg_lo > 2.0 * kPi);
    RunConfig inferred;
    inferred.arg_window = std::pair<double, double>(3.5, 4.0);
    CHECK(search_windows(inferred, 0.1, 5.0).front().sheet == 1);
    RunConfig across;
    across.sheets = {0};
    across.arg_window = std::pair<double, double>(3.0, 3.5);
    CHECK_THROWS_AS(search_windows(across, 0.1, 5.0), InputError);
    RunConfig none;
    CHECK_THROWS_AS(search_windows(none, 0.1, 5.0), InputError);
  }

  TEST_CASE("catalog header and records round trip") {
    RunConfig c;
    c.command = "resonances";
    c.sheets = {1};
    ResonanceRecord r;
    r.location = LambdaPoint(2.4280848634765499, 6.1424866874498854);
    r.channel = 0;
    r.method = "jost-cells+newton";
    std::stringstream ss;
    write_catalog(ss, c, {r});
    const auto lines = lines_of(ss.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == catalog_header(c));
    CHECK(lines[0].find(config_hash(c)) != std::string::npos);
    const auto back = read_catalog(ss);
    REQUIRE(back.size() == 1);
    CHECK(back[0].location == r.location);
  }

  TEST_CASE("free scatterer catalog has only the header") {
    const auto cfg = write_config("free.json", R"({"kind":"radial","breakpoints":[1],"values":[0]})");
    const auto run = run_cli("resonances --config " + cfg + " --sheet 1 --sheet -1 --window 0.2:5", "free");
    CHECK(run.code == 0);
    const auto lines = lines_of(run.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].rfind("{\"run\":", 0) == 0);
  }

  TEST_CASE("disc catalog on the first sheet contains the Hankel zero") {
    const auto cfg = write_config("disc.json", R"({"kind":"disc","radius":1,"condition":"dirichlet"})");
    const auto run = run_cli("resonances --config " + cfg + " --sheet 1 --window 0.5:3", "disc");
    REQUIRE(run.code == 0);
    std::istringstream in(run.out);
    const auto records = read_catalog(in);
    bool found = false;
    for (const auto& r : records) {
      CHECK(sheet_of(r.location).sheet == 1);
      if (r.channel == 0 && std::abs(r.location.modulus() - 2.42808486347655003) < 1e-10 &&
          std::abs(r.location.argument() - (3.00089403386009212 + kPi)) < 1e-10) {
        found = true;
        CHECK(r.multiplicity == 1);
      }
    }
    CHECK(found);
  }

  TEST_CASE("input errors exit with code 3") {
    const auto cfg = write_config("disc3.json", R"({"kind":"disc","radius":1,"condition":"dirichlet"})");
    CHECK(run_cli("resonances --config " + cfg + " --arg-window 0:1", "edge").code == 3);
    CHECK(run_cli("resonances --config " + cfg + " --sheet 0 --arg-window 3:3.5", "across").code == 3);
    CHECK(run_cli("resonances --config " + cfg + " --sheet 1 --window 3:1", "order").code == 3);
    CHECK(run_cli("resonances --config " + kTmp + "/missing.json --sheet 1", "missing").code == 3);
    const auto bad = write_config("bad.json", R"({"kind":"disc","radius":1,"condition":"sticky"})");
    CHECK(run_cli("resonances --config " + bad + " --sheet 1", "bad").code == 3);
    CHECK(run_cli("identities --config " + cfg, "noseed").code == 3);
    CHECK(run_cli("frobnicate", "unknown").code == 3);
  }

  TEST_CASE("S-matrix rows on the positive axis are unitary") {
    const auto cfg = write_config("well.json", R"({"kind":"radial","breakpoints":[1],"values":[-10]})");
    const auto run = run_cli("smatrix --config " + cfg + " --window 0.5:4 --samples 5 --arg 0 --channels 6", "smx");
    REQUIRE(run.code == 0);
    const auto lines = lines_of(run.out);
    REQUIRE(lines.size() == 1 + 5 * 13);
    CHECK(lines[0] == "ell,modulus,arg,re_s,im_s");
    for (size_t i = 1; i < lines.size(); ++i) {
      int ell = 0;
      double mod = 0, arg = 0, re = 0, im = 0;
      REQUIRE(std::sscanf(lines[i].c_str(), "%d,%lf,%lf,%lf,%lf", &ell, &mod, &arg, &re, &im) == 5);
      CHECK(arg == 0.0);
      CHECK(std::abs(std::hypot(re, im) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("bessel command prints values and the Wronskian residual") {
    const auto run = run_cli("bessel --order 5 --point 10@7.330382858376184", "bes");
    REQUIRE(run.code == 0);
    CHECK(run.out.find("wronskian_residual") != std::string::npos);
    CHECK(run.out.find("h1") != std::string::npos);
    CHECK(run_cli("bessel --order 201 --point 1@0.5", "bes_bad").code == 3);
  }

  TEST_CASE("identity suite passes and the corrupted parity hook fails it") {
    const auto cfg = write_config("disc_id.json", R"({"kind":"disc","radius":1,"condition":"dirichlet"})");
    const auto good = run_cli("identities --config " + cfg + " --seed 11", "id_good");
    CHECK(good.code == 0);
    CHECK(good.out.find("FAIL") == std::string::npos);
    const auto bad = run_cli("identities --config " + cfg + " --seed 11 --corrupt-parity", "id_bad");
    CHECK(bad.code == 2);
    CHECK(bad.out.find("correction[one-sided-parity]") != std::string::npos);
  }

  TEST_CASE("repeated runs are byte identical") {
    const auto cfg = write_config("well_rep.json", R"({"kind":"radial","breakpoints":[1],"values":[-10]})");
    const std::string args = "resonances --config " + cfg + " --sheet 1 --sheet 2 --window 0.2:3";
    const auto a = run_cli(args, "rep_a"), b = run_cli(args, "rep_b");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(lines_of(a.out).size() > 1);
    const auto ia = run_cli("identities --config " + cfg + " --seed 3", "rep_ia");
    const auto ib = run_cli("identities --config " + cfg + " --seed 3", "rep_ib");
    CHECK(ia.out == ib.out);
  }

  TEST_CASE("pure-imag scan on the well respects the bound-state count") {
    const auto cfg = write_config("well_pi.json", R"({"kind":"radial","breakpoints":[1],"values":[-10]})");
    const auto run = run_cli("pure-imag --config " + cfg + " --sheet -1 --sheet 1", "pi");
    CHECK(run.code == 0);
    CHECK(run.out.find(": PASS") != std::string::npos);
  }
}
