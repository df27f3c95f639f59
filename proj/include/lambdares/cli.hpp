#pragma once

// Command layer behind the lambdares CLI.  Every command writes its output to
// a stream and returns the process exit code.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lambdares/logcover.hpp"
#include "lambdares/multiplicity.hpp"
#include "lambdares/scatterers.hpp"

namespace lres {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitIdentityFailure = 2;
inline constexpr int kExitInputError = 3;

struct RunConfig {
  std::string command;
  std::string config_path;
  Scatterer scatterer = DiscObstacle(1.0, BoundaryCondition::Dirichlet);
  std::vector<int> sheets;
  /// Modulus window sigma1:sigma2.
  std::optional<std::pair<double, double>> window;
  /// Absolute argument window a1:a2; must sit inside one open sheet.
  std::optional<std::pair<double, double>> arg_window;
  /// Channel truncation L; unset selects it from the window.
  std::optional<int> channels;
  /// Grid size for rasterizing radial potentials onto the Fredholm engine.
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  /// smatrix: evaluation points; bessel: the single point.
  std::vector<LambdaPoint> points;
  int samples = 16;
  double arg = 0.0;
  int order = 0;
  /// Test hook: keep only the left parity factor in the corrected symmetry.
  bool corrupt_parity = false;
};

/// Thrown for invalid command parameters; maps to kExitInputError.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "x:y" into an ordered pair; throws InputError unless x < y.
std::pair<double, double> parse_range(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Canonical text of everything that determines a run's output.
std::string canonical_config(const RunConfig& c);
std::string config_hash(const RunConfig& c);

/// Search windows for the requested sheets, validated.  Throws InputError for
/// windows on or across a sheet boundary.
std::vector<SearchWindow> search_windows(const RunConfig& c, double default_lo, double default_hi);

/// First line of every catalog: {"run": {...}} with command, config hash and
/// scatterer.
std::string catalog_header(const RunConfig& c);
/// Catalog records, skipping the header line.
std::vector<ResonanceRecord> read_catalog(std::istream& in);
void write_catalog(std::ostream& out, const RunConfig& c, const std::vector<ResonanceRecord>& records);

int cmd_resonances(const RunConfig& c, std::ostream& out);
int cmd_identity_suite(const RunConfig& c, std::ostream& out);
int cmd_pure_imag_scan(const RunConfig& c, std::ostream& out);
int cmd_smatrix(const RunConfig& c, std::ostream& out);
int cmd_bessel(const RunConfig& c, std::ostream& out);

/// Dispatches on c.command; maps exceptions to exit codes with a message on err.
int run_command(const RunConfig& c, std::ostream& out, std::ostream& err);

}  // namespace lres
