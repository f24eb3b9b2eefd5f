#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "trimer/dynamics.hpp"
#include "trimer/dynrep.hpp"

namespace trimer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelParams model;
  double tol = 1e-10;
  ClassifyThresholds thresholds;
  int grid_resolution = 256;
  double tmax_periods = 4.0;
  int samples = 2000;
  std::string cache_path = "eigendata.bin";
  std::string out_dir = ".";

  void validate() const;  // throws ConfigError
};

// key=value lines, '#' comments, unknown keys rejected. Errors carry the
// line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);
// The part of the configuration that identifies an eigendata cache: model
// parameters plus the solver tolerance, as exact decimal text.
std::string parameter_block(const RunConfig& cfg);

// ---- state specs ----------------------------------------------------------
// Grammar: term ("+" term)?
//   term := [w=MAG] [g=PHASE] core
//   core := "#" INDEX | LABEL ":" INT "," INT  with LABEL one of A B C D E1
// Unset magnitudes default to an equal split, phases to zero.

struct StateTerm {
  bool raw = false;
  int index = -1;  // raw terms
  StateLabel label = StateLabel::E2;
  int qn1 = 0;
  int qn2 = 0;
  double weight = std::numeric_limits<double>::quiet_NaN();
  double phase = std::numeric_limits<double>::quiet_NaN();
};
bool operator==(const StateTerm& x, const StateTerm& y);

struct StateSpec {
  std::vector<StateTerm> terms;
};
bool operator==(const StateSpec& x, const StateSpec& y);

StateSpec parse_state_spec(const std::string& text);  // throws UsageError
std::string serialize_state_spec(const StateSpec& spec);

// Turn a parsed spec into concrete eigenstate indices and normalized
// magnitudes. Unresolvable terms throw ResolveError naming the closest
// available members.
SuperpositionSpec resolve_state_spec(const StateSpec& spec,
                                     const Classification& cls,
                                     const EigenSolution& eig);

// ---- eigendata cache ------------------------------------------------------

void save_cache(const std::filesystem::path& path, const RunConfig& cfg,
                const EigenSolution& eig);
EigenSolution load_cache(const std::filesystem::path& path,
                         const RunConfig& cfg);

// ---- tables ---------------------------------------------------------------

std::string format_sig(double x);  // 12 significant digits

void write_classification_csv(std::ostream& out, const Classification& cls,
                              const EigenSolution& eig);
void write_families_csv(std::ostream& out, const Classification& cls);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_chart_csv(std::ostream& out, const DynRepField& field);

// ---- driver ---------------------------------------------------------------

struct PipelineArgs {
  std::string state;
  double tmax_periods = -1.0;  // < 0: take from config
  int samples = -1;
  int index = -1;
  std::string output;
};

// Commands: diagonalize, classify, simulate, compare, grid. Writes outputs
// under cfg.out_dir (plus the cache at cfg.cache_path) and echoes the
// effective configuration alongside them.
int run_pipeline(const std::string& command, const RunConfig& cfg,
                 const PipelineArgs& args);

}  // namespace trimer
