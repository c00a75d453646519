#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpl/diagnostics.hpp"
#include "fpl/ldg_operator.hpp"

namespace fpl {

enum class InitialCondition { two_gaussian, maxwellian, file };
enum class CoefficientPath { convolution, direct };

/// Flat key = value run description. Blank lines and '#' comments are ignored.
struct RunConfig {
  double half_width = 4.0;
  int n = 4;
  int degree = 2;
  KernelSpec kernel;
  SchemeKind scheme = SchemeKind::upwind;
  std::optional<double> dt;  ///< empty: auto_time_step at t = 0
  double t_end = 0.04;
  InitialCondition initial_condition = InitialCondition::two_gaussian;
  MaxwellianSpec maxwellian;
  std::filesystem::path initial_file;  ///< checkpoint file for initial_condition = file
  std::filesystem::path output_dir = "output";
  int output_every = 1;
  int checkpoint_every = 0;
  std::vector<double> snapshot_times;
  int snapshot_samples = 8;
  int quad_order = -1;        ///< assembly rule, -1: k + 2
  int table_quad_order = -1;  ///< source-element rule of the table, -1: assembly rule
  CoefficientPath coefficients = CoefficientPath::convolution;
  std::filesystem::path convolution_cache;  ///< empty: no cache

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// All keys with defaults resolved, in a fixed order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Git-style object hash: SHA-1 of "blob <size>\0" followed by the bytes.
std::string content_hash(const std::string& bytes);

struct Checkpoint {
  int n = 0;
  int degree = 0;
  double half_width = 0.0;
  double t = 0.0;
  std::uint64_t step = 0;
  RowMatrix coeffs;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

double two_gaussian(const Vec3& p);

/// Values of f on the p_z = 0 plane at `samples` cell-centred points per
/// element edge. Where the plane is a mesh face the two traces are averaged.
struct PlaneSamples {
  std::vector<double> px, py;
  RowMatrix values;  ///< (py count) x (px count)
};
PlaneSamples sample_pz0(const DgField& f, int samples);

void write_moments_header(std::ostream& os);
void write_moments_row(std::ostream& os, const MomentRecord& r);
void write_snapshot(const std::filesystem::path& path, const PlaneSamples& s);

/// Diffusion-limited explicit step 0.5 h^2 / ((k+1)^4 max |D_h|). The
/// spectral radius of the k = 1..3 LDG diffusion operator grows like
/// (k+1)^4 |D| / h^2, so the bare h^2 / |D| scaling is not stable.
double auto_time_step(double h, int degree, double max_diffusion);

/// Builds the coefficient source selected by the config (loading or filling
/// the convolution cache when one is configured).
std::shared_ptr<const CoefficientSource> make_coefficient_source(const RunConfig& cfg, const SpacePtr& space,
                                                                 std::ostream* log = nullptr);

struct RunResult {
  std::vector<MomentRecord> records;
  DgField final_state;
  double dt = 0.0;
  std::uint64_t steps = 0;
  std::string config_hash;
};

using ProgressFn = std::function<void(const MomentRecord&, std::uint64_t step)>;

/// Full batch run: precompute, project the initial condition, RK3 loop with
/// diagnostics, snapshots and checkpoints, final checkpoint and metadata.
/// `resume` continues from a checkpoint instead of the initial condition.
RunResult run(const RunConfig& cfg, const std::optional<Checkpoint>& resume = std::nullopt,
              std::ostream* log = nullptr, const ProgressFn& progress = {});

/// Builds (and caches, when configured) the convolution table only.
void precompute(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace fpl
