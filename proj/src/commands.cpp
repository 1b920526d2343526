#include "fbasis/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fbasis/bundle.hpp"
#include "fbasis/distortion.hpp"
#include "fbasis/error.hpp"
#include "fbasis/manifest.hpp"

namespace fbasis::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kProducer = "fbasis";
// Separates the z-sampling stream from the weight-initialization stream.
constexpr std::uint64_t kSampleStream = 0x9E3779B97F4A7C15ULL;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, message);
}

void require_path(const std::string& path, const char* flag) {
  require(!path.empty(), std::string(flag) + " is required");
}

FrameBundle read_kind(const std::string& path, BundleKind kind, const char* what) {
  FrameBundle b = read_bundle(path);
  if (b.kind != kind) {
    throw Error(ErrorKind::Format, path + ": expected a " + what + " bundle (kind " +
                                       std::to_string(static_cast<int>(kind)) + ")");
  }
  if (b.items.empty()) throw Error(ErrorKind::EmptyInput, path + " holds no items");
  return b;
}

Frame read_single_frame(const std::string& path) {
  FrameBundle b = read_kind(path, BundleKind::Frames, "frame");
  require(b.items.size() == 1, path + ": expected exactly one frame");
  return bundle_frames(b).front();
}

std::vector<Frame> truncate_all(const std::vector<Frame>& frames, Eigen::Index k) {
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].cols() < k) {
      throw Error(ErrorKind::DimensionMismatch,
                  "frame has " + std::to_string(frames[i].cols()) + " columns, need " +
                      std::to_string(k),
                  i);
    }
    out.push_back(frames[i].leading(k));
  }
  return out;
}

// Deterministic part of a solver report, safe to embed in output files.
json stable_report(const SolverReport& r) {
  return {{"iterations", r.iterations},
          {"costs", r.costs},
          {"final_grad_norm", r.final_grad_norm},
          {"termination", to_string(r.termination)},
          {"restarted", r.restarted},
          {"fell_back_to_input", r.fell_back_to_input}};
}

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Format, path.string() + " is not valid JSON");
  return j;
}

SolverConfig solver_config(SolverConfig base, int max_iter, double max_time, unsigned threads) {
  base.max_iter = max_iter;
  base.max_time = max_time;
  base.threads = threads;
  base.validate();
  return base;
}

int exit_for(std::initializer_list<const SolverReport*> reports) {
  for (const SolverReport* r : reports) {
    if (r->termination == Termination::MaxTime) return kExitMaxTime;
  }
  return kExitOk;
}

const char* init_name(InitRule rule) { return rule == InitRule::Extrinsic ? "extrinsic" : "first"; }

void finish_manifest(const std::string& path, RunManifest& manifest) {
  if (!path.empty()) write_manifest(path, manifest);
}

std::vector<LocalChart> charts_of(const FrameBundle& jacobians, double theta_pre) {
  std::vector<LocalChart> charts;
  charts.reserve(jacobians.items.size());
  for (std::size_t i = 0; i < jacobians.items.size(); ++i) {
    try {
      charts.push_back(fbasis::local_basis(jacobians.items[i], theta_pre));
    } catch (const Error& e) {
      throw e.at_sample(i);
    }
  }
  return charts;
}

}  // namespace

unsigned threads_from_env() {
  const char* raw = std::getenv("FB_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0') return 0;
  return static_cast<unsigned>(v);
}

int local_basis(const LocalBasisOptions& opt) {
  require_path(opt.jacobians, "--jacobians");
  require_path(opt.out, "--out");
  validate_theta_pre(opt.theta_pre);
  const FrameBundle in = read_kind(opt.jacobians, BundleKind::Jacobians, "jacobian");
  const std::vector<LocalChart> charts = charts_of(in, opt.theta_pre);

  std::vector<Frame> frames;
  json dims = json::array();
  for (const LocalChart& c : charts) {
    frames.push_back(c.codomain_basis);
    dims.push_back({{"local_dim", c.local_dim},
                    {"sigma", std::vector<double>(c.sigma.data(), c.sigma.data() + c.sigma.size())}});
  }
  const json meta = {{"producer", std::string(kProducer) + " local-basis"}, {"theta_pre", opt.theta_pre}};
  write_bundle(opt.out, make_frame_bundle(frames, meta.dump()));
  if (!opt.dims_out.empty()) write_json(opt.dims_out, dims);

  RunManifest manifest;
  manifest.command = "local-basis";
  manifest.flags = {{"jacobians", opt.jacobians}, {"theta_pre", opt.theta_pre},
                    {"out", opt.out},             {"dims_out", opt.dims_out}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.jacobians);
    manifest.add_output(opt.out);
    if (!opt.dims_out.empty()) manifest.add_output(opt.dims_out);
  }
  finish_manifest(opt.manifest, manifest);
  return kExitOk;
}

int subspace_mean(const SubspaceMeanOptions& opt) {
  require_path(opt.frames, "--frames");
  require_path(opt.out, "--out");
  const SolverConfig config =
      solver_config(SolverConfig::subspace_defaults(), opt.max_iter, opt.max_time, opt.threads);
  const std::vector<Frame> all = bundle_frames(read_kind(opt.frames, BundleKind::Frames, "frame"));

  Eigen::Index dim = all.front().cols();
  if (opt.dim) {
    require(*opt.dim >= 1, "--dim must be positive");
    dim = *opt.dim;
  } else if (!opt.dims.empty()) {
    const json dims = read_json(opt.dims);
    require(dims.is_array(), opt.dims + ": expected a JSON array");
    std::vector<int> local;
    for (const auto& entry : dims) {
      local.push_back(entry.is_object() ? entry.at("local_dim").get<int>() : entry.get<int>());
    }
    dim = estimate_manifold_dim(local);
  }
  const std::vector<Frame> tangents = truncate_all(all, dim);
  const Frame init = initial_subspace(tangents, opt.init);
  const SemanticSubspace subspace = global_semantic_subspace(tangents, init, config);

  const json meta = {{"producer", std::string(kProducer) + " subspace-mean"},
                     {"manifold_dim", dim},
                     {"init", init_name(opt.init)},
                     {"report", stable_report(subspace.report)}};
  write_bundle(opt.out, make_frame_bundle(std::span<const Frame>(&subspace.frame, 1), meta.dump()));

  RunManifest manifest;
  manifest.command = "subspace-mean";
  manifest.flags = {{"frames", opt.frames},     {"max_iter", opt.max_iter}, {"max_time", opt.max_time},
                    {"init", init_name(opt.init)}, {"dim", dim},            {"out", opt.out},
                    {"threads", opt.threads}};
  manifest.reports = {{"subspace", to_json(subspace.report)}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.frames);
    if (!opt.dims.empty()) manifest.add_input(opt.dims);
    manifest.add_output(opt.out);
  }
  finish_manifest(opt.manifest, manifest);
  return exit_for({&subspace.report});
}

int refine(const RefineOptions& opt) {
  require_path(opt.subspace, "--subspace");
  require_path(opt.frames, "--frames");
  require_path(opt.out, "--out");
  const SolverConfig config =
      solver_config(SolverConfig::basis_defaults(), opt.max_iter, opt.max_time, opt.threads);

  const FrameBundle sub = read_bundle(opt.subspace);
  require(sub.items.size() == 1, opt.subspace + ": expected exactly one item");
  std::optional<SemanticSubspace> subspace;
  if (sub.kind == BundleKind::Frames) {
    subspace.emplace(SemanticSubspace{bundle_frames(sub).front(), SolverReport{}, SubspaceSource::Frechet});
  } else if (sub.kind == BundleKind::Jacobians) {
    subspace.emplace(
        SemanticSubspace{orthonormalize(sub.items.front()), SolverReport{}, SubspaceSource::External});
  } else {
    throw Error(ErrorKind::Format, opt.subspace + ": expected a frame or matrix bundle");
  }

  const std::vector<Frame> locals = truncate_all(
      bundle_frames(read_kind(opt.frames, BundleKind::Frames, "frame")), subspace->frame.cols());
  const SemanticBasis basis = refine_basis(*subspace, locals, config);

  const json meta = {{"producer", std::string(kProducer) + " refine"},
                     {"subspace_source", to_string(subspace->source)},
                     {"rotation", matrix_rows(basis.rotation.matrix())},
                     {"report", stable_report(basis.report)}};
  write_bundle(opt.out, make_frame_bundle(std::span<const Frame>(&basis.frame, 1), meta.dump()));

  RunManifest manifest;
  manifest.command = "refine";
  manifest.flags = {{"subspace", opt.subspace}, {"frames", opt.frames}, {"max_iter", opt.max_iter},
                    {"max_time", opt.max_time}, {"out", opt.out},       {"threads", opt.threads}};
  manifest.reports = {{"basis", to_json(basis.report)}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.subspace);
    manifest.add_input(opt.frames);
    manifest.add_output(opt.out);
  }
  finish_manifest(opt.manifest, manifest);
  return exit_for({&basis.report});
}

int pipeline(const PipelineOptions& opt) {
  require_path(opt.jacobians, "--jacobians");
  require_path(opt.out_basis, "--out-basis");
  validate_theta_pre(opt.theta_pre);
  require(opt.samples >= 1, "--samples must be positive");

  FrechetBasisConfig config;
  config.theta_pre = opt.theta_pre;
  config.init = opt.init;
  config.subspace = solver_config(SolverConfig::subspace_defaults(), opt.subspace_max_iter,
                                  opt.subspace_max_time, opt.threads);
  config.basis = solver_config(SolverConfig::basis_defaults(), opt.basis_max_iter,
                               opt.basis_max_time, opt.threads);

  const FrameBundle in = read_kind(opt.jacobians, BundleKind::Jacobians, "jacobian");
  const std::size_t used = std::min(in.items.size(), static_cast<std::size_t>(opt.samples));
  const FrechetBasisResult result =
      frechet_basis(std::span<const Matrix>(in.items.data(), used), config);
  const SemanticBasis& basis = result.basis;

  const json meta = {{"producer", std::string(kProducer) + " pipeline"},
                     {"theta_pre", opt.theta_pre},
                     {"samples_used", used},
                     {"manifold_dim", result.manifold_dim},
                     {"init", init_name(opt.init)},
                     {"rotation", matrix_rows(basis.rotation.matrix())},
                     {"subspace_report", stable_report(basis.subspace.report)},
                     {"basis_report", stable_report(basis.report)}};
  write_bundle(opt.out_basis, make_frame_bundle(std::span<const Frame>(&basis.frame, 1), meta.dump()));
  if (!opt.out_subspace.empty()) {
    const json sub_meta = {{"producer", std::string(kProducer) + " pipeline"},
                           {"manifold_dim", result.manifold_dim},
                           {"report", stable_report(basis.subspace.report)}};
    write_bundle(opt.out_subspace,
                 make_frame_bundle(std::span<const Frame>(&basis.subspace.frame, 1), sub_meta.dump()));
  }

  RunManifest manifest;
  manifest.command = "pipeline";
  manifest.flags = {{"jacobians", opt.jacobians},
                    {"theta_pre", opt.theta_pre},
                    {"samples", opt.samples},
                    {"init", init_name(opt.init)},
                    {"subspace_max_iter", opt.subspace_max_iter},
                    {"subspace_max_time", opt.subspace_max_time},
                    {"basis_max_iter", opt.basis_max_iter},
                    {"basis_max_time", opt.basis_max_time},
                    {"out_basis", opt.out_basis},
                    {"out_subspace", opt.out_subspace},
                    {"threads", opt.threads}};
  manifest.reports = {{"subspace", to_json(basis.subspace.report)},
                      {"basis", to_json(basis.report)},
                      {"manifold_dim", result.manifold_dim},
                      {"local_dims", result.local_dims},
                      {"samples_used", used}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.jacobians);
    manifest.add_output(opt.out_basis);
    if (!opt.out_subspace.empty()) manifest.add_output(opt.out_subspace);
  }
  finish_manifest(opt.manifest, manifest);
  return exit_for({&basis.subspace.report, &basis.report});
}

int distortion(const DistortionOptions& opt) {
  require(opt.jacobians.empty() != opt.net.empty(), "exactly one of --jacobians and --net is required");
  require(opt.power == 1 || opt.power == 2, "--power must be 1 or 2");
  require(opt.eps > 0.0, "--eps must be positive");
  require(opt.pairs >= 1, "--pairs must be positive");
  validate_theta_pre(opt.theta_pre);

  DistortionReport report;
  if (!opt.net.empty()) {
    const SynthNet net(net_spec_from_json(read_json(opt.net)));
    report = fbasis::distortion(net, opt.theta_pre, opt.eps, static_cast<std::size_t>(opt.pairs),
                                opt.seed, opt.power);
  } else {
    const FrameBundle in = read_kind(opt.jacobians, BundleKind::Jacobians, "jacobian");
    require(in.items.size() % 4 == 0,
            opt.jacobians + ": expected 4P jacobians (P random pairs, then P local pairs)");
    const std::vector<LocalChart> charts = charts_of(in, opt.theta_pre);
    const std::size_t p = charts.size() / 4;
    std::vector<ChartPair> random_pairs, local_pairs;
    for (std::size_t i = 0; i < p; ++i) random_pairs.emplace_back(charts[2 * i], charts[2 * i + 1]);
    for (std::size_t i = 0; i < p; ++i) {
      local_pairs.emplace_back(charts[2 * p + 2 * i], charts[2 * p + 2 * i + 1]);
    }
    report = distortion_from_pairs(random_pairs, local_pairs, opt.power, opt.eps);
  }

  const json out = {{"i_rand", report.i_rand},         {"i_local", report.i_local},
                    {"distortion", report.distortion}, {"pair_count", report.pair_count},
                    {"epsilon", report.epsilon},       {"norm_power", report.norm_power},
                    {"seed", opt.seed},                {"theta_pre", opt.theta_pre}};
  if (!opt.report.empty()) {
    write_json(opt.report, out);
  } else {
    std::cout << out.dump(2) << '\n';
  }

  RunManifest manifest;
  manifest.command = "distortion";
  manifest.flags = {{"jacobians", opt.jacobians}, {"net", opt.net},      {"eps", opt.eps},
                    {"pairs", opt.pairs},         {"power", opt.power},  {"theta_pre", opt.theta_pre},
                    {"report", opt.report}};
  manifest.seeds = {{"pairs", opt.seed}};
  manifest.reports = {{"distortion", out}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.net.empty() ? opt.jacobians : opt.net);
    if (!opt.report.empty()) manifest.add_output(opt.report);
  }
  finish_manifest(opt.manifest, manifest);
  return kExitOk;
}

int interpolate(const InterpolateOptions& opt) {
  require_path(opt.a, "--a");
  require_path(opt.b, "--b");
  require_path(opt.out_dir, "--out-dir");
  const Frame x = read_single_frame(opt.a);
  const Frame y = read_single_frame(opt.b);
  const auto schedule = interpolation_schedule(x, y, opt.n);

  fs::create_directories(opt.out_dir);
  json entries = json::array();
  std::vector<fs::path> written;
  for (const ScheduleEntry& e : schedule) {
    char name[32];
    std::snprintf(name, sizeof name, "S_%02d.frmb", e.index);
    const fs::path file = fs::path(opt.out_dir) / name;
    const json meta = {{"producer", std::string(kProducer) + " interpolate"}, {"index", e.index}, {"t", e.t}};
    write_bundle(file, make_frame_bundle(std::span<const Frame>(&e.frame, 1), meta.dump()));
    written.push_back(file);
    entries.push_back({{"index", e.index},
                       {"t", e.t},
                       {"file", name},
                       {"d_geo_to_a", geodesic_distance(x, e.frame)},
                       {"d_geo_to_b", geodesic_distance(y, e.frame)}});
  }
  const fs::path schedule_file = fs::path(opt.out_dir) / "schedule.json";
  write_json(schedule_file, entries);

  RunManifest manifest;
  manifest.command = "interpolate";
  manifest.flags = {{"a", opt.a}, {"b", opt.b}, {"n", opt.n}, {"out_dir", opt.out_dir}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.a);
    manifest.add_input(opt.b);
    for (const auto& f : written) manifest.add_output(f);
    manifest.add_output(schedule_file);
  }
  finish_manifest(opt.manifest, manifest);
  return kExitOk;
}

int project_so(const ProjectSoOptions& opt) {
  require_path(opt.in, "--in");
  require_path(opt.out, "--out");
  const FrameBundle in = read_bundle(opt.in);
  require(in.kind != BundleKind::Latents, opt.in + ": expected square matrices");
  require(!in.items.empty(), opt.in + " holds no items");
  std::vector<Matrix> rotations;
  for (std::size_t i = 0; i < in.items.size(); ++i) {
    try {
      rotations.push_back(project_special_orthogonal(in.items[i]).matrix());
    } catch (const Error& e) {
      throw e.at_sample(i);
    }
  }
  const json meta = {{"producer", std::string(kProducer) + " project-so"}};
  write_bundle(opt.out, make_bundle(BundleKind::Frames, std::move(rotations), meta.dump()));

  RunManifest manifest;
  manifest.command = "project-so";
  manifest.flags = {{"in", opt.in}, {"out", opt.out}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.in);
    manifest.add_output(opt.out);
  }
  finish_manifest(opt.manifest, manifest);
  return kExitOk;
}

int represent(const RepresentOptions& opt) {
  require_path(opt.basis, "--basis");
  require_path(opt.latents, "--latents");
  require_path(opt.out, "--out");
  const Frame basis = read_single_frame(opt.basis);
  const FrameBundle latents = read_kind(opt.latents, BundleKind::Latents, "latent");
  require(latents.cols == 1, opt.latents + ": latent items must be column vectors");
  std::vector<Matrix> coords;
  for (std::size_t i = 0; i < latents.items.size(); ++i) {
    try {
      coords.push_back(fbasis::represent(latents.items[i].col(0), basis));
    } catch (const Error& e) {
      throw e.at_sample(i);
    }
  }
  const json meta = {{"producer", std::string(kProducer) + " represent"}};
  write_bundle(opt.out, make_bundle(BundleKind::Latents, std::move(coords), meta.dump()));

  RunManifest manifest;
  manifest.command = "represent";
  manifest.flags = {{"basis", opt.basis}, {"latents", opt.latents}, {"out", opt.out}};
  if (!opt.manifest.empty()) {
    manifest.add_input(opt.basis);
    manifest.add_input(opt.latents);
    manifest.add_output(opt.out);
  }
  finish_manifest(opt.manifest, manifest);
  return kExitOk;
}

std::vector<int> parse_widths(const std::string& widths, int layers) {
  require(layers >= 1, "--layers must be positive");
  std::vector<int> parsed;
  std::stringstream ss(widths);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parsed.push_back(std::stoi(item, &used));
      require(used == item.size(), "bad width '" + item + "'");
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "bad width '" + item + "'");
    }
  }
  if (parsed.size() == 1) return std::vector<int>(static_cast<std::size_t>(layers) + 1, parsed.front());
  require(parsed.size() == static_cast<std::size_t>(layers) + 1,
          "--widths needs 1 or " + std::to_string(layers + 1) + " entries");
  return parsed;
}

nlohmann::json net_spec_to_json(const SynthNetSpec& spec) {
  return {{"widths", spec.widths},
          {"activation", spec.activation == Activation::Tanh ? "tanh" : "identity"},
          {"linear_output", spec.linear_output},
          {"weight_scale", spec.weight_scale},
          {"bias_scale", spec.bias_scale},
          {"seed", spec.seed}};
}

SynthNetSpec net_spec_from_json(const nlohmann::json& j) {
  SynthNetSpec spec;
  try {
    spec.widths = j.at("widths").get<std::vector<int>>();
    const std::string act = j.value("activation", "tanh");
    require(act == "tanh" || act == "identity", "activation must be tanh or identity");
    spec.activation = act == "tanh" ? Activation::Tanh : Activation::Identity;
    spec.linear_output = j.value("linear_output", false);
    spec.weight_scale = j.value("weight_scale", 1.0);
    spec.bias_scale = j.value("bias_scale", 0.1);
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("network spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

int synth(const SynthOptions& opt) {
  require_path(opt.out, "--out");
  require(opt.samples >= 1, "--samples must be positive");
  SynthNetSpec spec;
  spec.widths = parse_widths(opt.widths, opt.layers);
  spec.seed = opt.seed;
  spec.weight_scale = opt.weight_scale;
  spec.linear_output = opt.linear_output;
  const SynthNet net(spec);
  const auto samples = sample_jacobians(net, static_cast<std::size_t>(opt.samples), opt.seed ^ kSampleStream);

  std::vector<Matrix> jacobians;
  jacobians.reserve(samples.size());
  for (const auto& s : samples) jacobians.push_back(s.jacobian);
  const json meta = {{"producer", std::string(kProducer) + " synth"},
                     {"net", net_spec_to_json(spec)},
                     {"seed", opt.seed}};
  write_bundle(opt.out, make_bundle(BundleKind::Jacobians, std::move(jacobians), meta.dump()));
  if (!opt.net_out.empty()) write_json(opt.net_out, net_spec_to_json(spec));

  RunManifest manifest;
  manifest.command = "synth";
  manifest.flags = {{"layers", opt.layers},   {"widths", opt.widths},
                    {"samples", opt.samples}, {"weight_scale", opt.weight_scale},
                    {"linear_output", opt.linear_output}, {"out", opt.out},
                    {"net_out", opt.net_out}};
  manifest.seeds = {{"net", opt.seed}, {"samples", opt.seed ^ kSampleStream}};
  if (!opt.manifest.empty()) {
    manifest.add_output(opt.out);
    if (!opt.net_out.empty()) manifest.add_output(opt.net_out);
  }
  finish_manifest(opt.manifest, manifest);
  return kExitOk;
}

int verify(const VerifyOptions& opt) {
  require_path(opt.manifest, "--manifest");
  const RunManifest manifest = read_manifest(opt.manifest);
  const auto bad = verify_manifest(manifest);
  for (const auto& path : bad) std::cerr << "digest mismatch: " << path << '\n';
  if (bad.empty()) std::cout << "ok: " << manifest.inputs.size() + manifest.outputs.size() << " files verified\n";
  return bad.empty() ? kExitOk : kExitValidation;
}

}  // namespace fbasis::cli
