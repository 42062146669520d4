#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hhdmft/dmft.hpp"
#include "hhdmft/greens.hpp"
#include "hhdmft/kvqa.hpp"
#include "hhdmft/model.hpp"
#include "hhdmft/time_evolution.hpp"
#include "hhdmft/vqe.hpp"

namespace hhdmft {

enum class DmftAction { Scan, Iterate, Both };
enum class SpectrumSource { Ed, Kvqa };

struct RunConfig {
  ModelParams model;
  MuConvention mu_convention = MuConvention::HalfFilling;

  LandscapeGrid landscape;
  EvalMode landscape_mode = EvalMode::Exact;

  KrylovSearchConfig krylov;
  int krylov_depth = 2;
  GroundStateSource krylov_ground_state = GroundStateSource::Vqe;
  SpectrumSide krylov_side = SpectrumSide::Hole;

  FrequencyGrid spectrum;
  SpectrumSource spectrum_source = SpectrumSource::Ed;

  NoiseSpec noise;

  DmftConfig dmft;
  DmftAction dmft_action = DmftAction::Both;
  double scan_v_min = 0.5;
  double scan_v_max = 1.1;
  int scan_points = 20;

  TimeGrid time;
  int n_t = 10;
  int vha_layers = 1;
  std::string ordering;

  std::uint64_t seed = 0;
  std::string output_dir = "out";
  bool emit_plots = false;

  void validate() const;
};

/// Parses an INI document with sections model, landscape, krylov, spectrum,
/// noise, dmft, time and run. Unknown sections or keys and invalid values
/// raise ConfigError naming "section.key".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Every field, defaults included, as an INI document that parse_config
/// reads back to the same configuration.
std::string render_config(const RunConfig& cfg);

/// SHA-1 of "blob <size>\0<text>", as computed by git hash-object.
std::string git_blob_hash(const std::string& text);

inline constexpr const char* kSubcommands[] = {"ed",       "trotter", "vqe", "kvqa",
                                               "spectrum", "dmft",    "vha", "compare"};

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Runs one pipeline and writes its artifacts plus manifest.json into
/// cfg.output_dir. Files written before a failure are removed.
RunOutcome run(const std::string& subcommand, const RunConfig& cfg);

}  // namespace hhdmft
