#pragma once

#include <json.hpp>

#include <string>

#include "qemit/emitter.hpp"
#include "qemit/fitting.hpp"
#include "qemit/holography.hpp"

namespace qemit::io {

// Exit codes of the command-line surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest-exact decimal formatting; identical bytes for identical doubles.
std::string format_double(double v);

// Delimited-text traces: columns tau_ns, g2[, sigma]; '#' comments.
void save_trace(const std::string& path, const CorrelationTrace& trace);
CorrelationTrace load_trace(const std::string& path);

// Two-column histogram files (tau_ns, counts) with optional '#' header.
CoincidenceHistogram load_histogram(const std::string& path);
void save_histogram(const std::string& path, const CoincidenceHistogram& hist);

// Phase mask export: 8-bit PGM with linear phase-to-gray map over [-pi, pi),
// a raw little-endian float64 grid, and a JSON sidecar describing both.
void save_mask(const std::string& path_prefix, const PhaseMask& mask);
PhaseMask load_mask_raw(const std::string& path_prefix);

struct RunConfig {
  std::string scenario;
  unsigned long long seed = 1;
  std::string output_dir = ".";
  nlohmann::json params;  // scenario section of the config
};

RunConfig load_config(const std::string& path);

// Executes one scenario, writing its outputs plus a bundle.json that echoes
// the configuration. Throws UsageError / DataError / std::runtime_error;
// the CLI maps these to exit codes.
void run_scenario(const RunConfig& config);

// Re-expresses produced traces as plot-ready panel files with columns
// (tau, data, model, residual where applicable).
void emit_plotdata(const std::string& data_path, const std::string& model_path,
                   const std::string& out_path);

}  // namespace qemit::io
