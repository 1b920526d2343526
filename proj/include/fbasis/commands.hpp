#pragma once

/// @file
/// CLI commands as library functions. Each returns the process exit code:
/// 0 success, 2 when a solver stopped on its wall-clock limit. Validation
/// failures throw fbasis::Error, which the executable maps to exit code 1.

#include <cstdint>
#include <optional>
#include <string>

#include "fbasis/semantic.hpp"
#include "fbasis/synth_net.hpp"
#include "json.hpp"

namespace fbasis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitMaxTime = 2;

/// FB_THREADS, 0 (sequential) when unset or unparsable.
unsigned threads_from_env();

struct LocalBasisOptions {
  std::string jacobians;
  double theta_pre = kDefaultThetaPre;
  std::string out;
  std::string dims_out;
  std::string manifest;
};
int local_basis(const LocalBasisOptions& opt);

struct SubspaceMeanOptions {
  std::string frames;
  int max_iter = 1000;
  double max_time = 2000.0;
  InitRule init = InitRule::First;
  /// Truncate input frames to this many columns.
  std::optional<int> dim;
  /// Local-dimension file from local-basis; d_W is its rounded mean.
  std::string dims;
  std::string out;
  std::string manifest;
  unsigned threads = 0;
};
int subspace_mean(const SubspaceMeanOptions& opt);

struct RefineOptions {
  /// Kind-0 single frame, or kind-1 single matrix of external basis vectors.
  std::string subspace;
  std::string frames;
  int max_iter = 200;
  double max_time = 10000.0;
  std::string out;
  std::string manifest;
  unsigned threads = 0;
};
int refine(const RefineOptions& opt);

struct PipelineOptions {
  std::string jacobians;
  double theta_pre = kDefaultThetaPre;
  int samples = 1000;
  InitRule init = InitRule::First;
  int subspace_max_iter = 1000;
  double subspace_max_time = 2000.0;
  int basis_max_iter = 200;
  double basis_max_time = 10000.0;
  std::string out_basis;
  std::string out_subspace;
  std::string manifest;
  unsigned threads = 0;
};
int pipeline(const PipelineOptions& opt);

struct DistortionOptions {
  /// Kind-1 bundle of 4P Jacobians: P random pairs then P ε-close pairs,
  /// each pair stored as consecutive items.
  std::string jacobians;
  /// Network description JSON (see net_spec_to_json).
  std::string net;
  double eps = 0.1;
  int pairs = 100;
  int power = 1;
  std::uint64_t seed = 0;
  double theta_pre = kDefaultThetaPre;
  std::string report;
  std::string manifest;
};
int distortion(const DistortionOptions& opt);

struct InterpolateOptions {
  std::string a;
  std::string b;
  int n = 6;
  std::string out_dir;
  std::string manifest;
};
int interpolate(const InterpolateOptions& opt);

struct ProjectSoOptions {
  std::string in;
  std::string out;
  std::string manifest;
};
int project_so(const ProjectSoOptions& opt);

struct RepresentOptions {
  std::string basis;
  std::string latents;
  std::string out;
  std::string manifest;
};
int represent(const RepresentOptions& opt);

struct SynthOptions {
  int layers = 3;
  /// Either one width for every layer or layers + 1 comma-separated widths
  /// (input first).
  std::string widths = "16,32,32,32";
  std::uint64_t seed = 0;
  int samples = 1000;
  double weight_scale = 1.0;
  bool linear_output = false;
  std::string out;
  std::string net_out;
  std::string manifest;
};
int synth(const SynthOptions& opt);

struct VerifyOptions {
  std::string manifest;
};
/// 0 when every recorded digest matches, 1 otherwise.
int verify(const VerifyOptions& opt);

nlohmann::json net_spec_to_json(const SynthNetSpec& spec);
SynthNetSpec net_spec_from_json(const nlohmann::json& j);
std::vector<int> parse_widths(const std::string& widths, int layers);

}  // namespace fbasis::cli
