// lambdares: resonance catalogs, identity suites, purely imaginary scans and
// point evaluations on the logarithmic cover.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lambdares/cli.hpp"

namespace {

struct RawFlags {
  std::string config;
  std::vector<int> sheets;
  std::string window, arg_window;
  int channels = -1;
  int grid = -1;
  long long seed = -1;
  std::string out;
  std::vector<std::string> points;
  int samples = 16;
  double arg = 0.0;
  int order = 0;
  bool corrupt_parity = false;
};

void add_common(CLI::App* sub, RawFlags& f, bool needs_config) {
  auto* cfg = sub->add_option("--config", f.config, "Scatterer config (JSON)");
  if (needs_config) cfg->required();
  sub->add_option("--sheet", f.sheets, "Sheet index m (repeatable)")->take_all();
  sub->add_option("--window", f.window, "Modulus window s1:s2");
  sub->add_option("--arg-window", f.arg_window, "Argument window a1:a2 inside one sheet");
  sub->add_option("--channels", f.channels, "Channel truncation L");
  sub->add_option("--grid", f.grid, "Grid cells per side for potentials");
  sub->add_option("--seed", f.seed, "Random seed")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", f.out, "Output path (default stdout)");
  sub->add_flag("--corrupt-parity", f.corrupt_parity)->group("");
}

lres::RunConfig to_config(const std::string& command, const RawFlags& f) {
  lres::RunConfig c;
  c.command = command;
  c.config_path = f.config;
  if (!f.config.empty()) c.scatterer = lres::load_scatterer(f.config);
  c.sheets = f.sheets;
  if (!f.window.empty()) c.window = lres::parse_range(f.window);
  if (!f.arg_window.empty()) c.arg_window = lres::parse_range(f.arg_window);
  if (f.channels >= 0) c.channels = f.channels;
  if (f.grid >= 0) c.grid = f.grid;
  if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
  c.out_path = f.out;
  for (const auto& p : f.points) c.points.push_back(lres::parse_lambda_point(p));
  c.samples = f.samples;
  c.arg = f.arg;
  c.order = f.order;
  c.corrupt_parity = f.corrupt_parity;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering resonances on the logarithmic cover"};
  app.require_subcommand(1);
  RawFlags f;

  auto* res = app.add_subcommand("resonances", "Resonance catalog (JSON lines) over sheets and windows");
  add_common(res, f, true);
  auto* ids = app.add_subcommand("identities", "Identity suite at seeded points");
  add_common(ids, f, true);
  auto* pim = app.add_subcommand("pure-imag", "Zero crossings on the rays arg = pi/2 + m pi");
  add_common(pim, f, true);
  auto* smx = app.add_subcommand("smatrix", "S-matrix table (CSV)");
  add_common(smx, f, true);
  smx->add_option("--point", f.points, "Point modulus@arg (repeatable)")->take_all();
  smx->add_option("--samples", f.samples, "Points in --window");
  smx->add_option("--arg", f.arg, "Argument for --window samples");
  auto* bes = app.add_subcommand("bessel", "Cylinder functions at one point of the cover");
  bes->add_option("--order", f.order, "Integer order")->required();
  bes->add_option("--point", f.points, "Point modulus@arg")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lres::kExitOk : lres::kExitInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  lres::RunConfig c;
  try {
    c = to_config(command, f);
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return lres::kExitInputError;
  }

  // Output is buffered so a failed run leaves no partial file.
  std::ostringstream buffer;
  const int code = lres::run_command(c, buffer, std::cerr);
  if (code == lres::kExitInputError || code == lres::kExitRuntime) return code;
  if (c.out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "input error: cannot write " << c.out_path << '\n';
      return lres::kExitInputError;
    }
    file << buffer.str();
  }
  return code;
}
