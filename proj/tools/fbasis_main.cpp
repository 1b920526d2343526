#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "fbasis/commands.hpp"
#include "fbasis/error.hpp"

namespace cli = fbasis::cli;

namespace {

const std::map<std::string, fbasis::InitRule> kInitRules{{"first", fbasis::InitRule::First},
                                                         {"extrinsic", fbasis::InitRule::Extrinsic}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frechet basis: global semantic bases from local tangent frames"};
  app.require_subcommand(1);
  const unsigned threads = cli::threads_from_env();

  cli::LocalBasisOptions lb;
  auto* lb_cmd = app.add_subcommand("local-basis", "Local Basis frames and local dimensions per Jacobian");
  lb_cmd->add_option("--jacobians", lb.jacobians, "Kind-1 bundle of Jacobians")->required();
  lb_cmd->add_option("--theta-pre", lb.theta_pre, "Relative singular-value threshold")->capture_default_str();
  lb_cmd->add_option("--out", lb.out, "Kind-0 bundle of codomain frames")->required();
  lb_cmd->add_option("--dims-out", lb.dims_out, "JSON array of local dims and spectra");
  lb_cmd->add_option("--manifest", lb.manifest, "Run manifest path");

  cli::SubspaceMeanOptions sm;
  sm.threads = threads;
  std::string sm_init = "first";
  int sm_dim = 0;
  auto* sm_cmd = app.add_subcommand("subspace-mean", "Frechet mean of tangent frames on the Grassmannian");
  sm_cmd->add_option("--frames", sm.frames, "Kind-0 bundle of tangent frames")->required();
  sm_cmd->add_option("--max-iter", sm.max_iter, "Solver iteration cap")->capture_default_str();
  sm_cmd->add_option("--max-time", sm.max_time, "Solver wall-clock cap (seconds)")->capture_default_str();
  sm_cmd->add_option("--init", sm_init, "Initial point: first|extrinsic")
      ->check(CLI::IsMember({"first", "extrinsic"}))
      ->capture_default_str();
  sm_cmd->add_option("--dim", sm_dim, "Truncate frames to this many columns");
  sm_cmd->add_option("--dims", sm.dims, "Local-dimension JSON; uses its rounded mean");
  sm_cmd->add_option("--out", sm.out, "Kind-0 bundle with the mean subspace")->required();
  sm_cmd->add_option("--manifest", sm.manifest, "Run manifest path");

  cli::RefineOptions rf;
  rf.threads = threads;
  auto* rf_cmd = app.add_subcommand("refine", "Basis refinement by the SO(d) Frechet mean");
  rf_cmd->add_option("--subspace", rf.subspace, "Kind-0 frame or kind-1 external basis matrix")->required();
  rf_cmd->add_option("--frames", rf.frames, "Kind-0 bundle of local frames")->required();
  rf_cmd->add_option("--max-iter", rf.max_iter, "Solver iteration cap")->capture_default_str();
  rf_cmd->add_option("--max-time", rf.max_time, "Solver wall-clock cap (seconds)")->capture_default_str();
  rf_cmd->add_option("--out", rf.out, "Kind-0 bundle with the refined basis")->required();
  rf_cmd->add_option("--manifest", rf.manifest, "Run manifest path");

  cli::PipelineOptions pl;
  pl.threads = threads;
  std::string pl_init = "first";
  auto* pl_cmd = app.add_subcommand("pipeline", "Jacobians to Frechet basis, end to end");
  pl_cmd->add_option("--jacobians", pl.jacobians, "Kind-1 bundle of Jacobians")->required();
  pl_cmd->add_option("--theta-pre", pl.theta_pre, "Relative singular-value threshold")->capture_default_str();
  pl_cmd->add_option("--samples", pl.samples, "Use the first N Jacobians")->capture_default_str();
  pl_cmd->add_option("--init", pl_init, "Subspace initial point: first|extrinsic")
      ->check(CLI::IsMember({"first", "extrinsic"}))
      ->capture_default_str();
  pl_cmd->add_option("--subspace-max-iter", pl.subspace_max_iter)->capture_default_str();
  pl_cmd->add_option("--subspace-max-time", pl.subspace_max_time)->capture_default_str();
  pl_cmd->add_option("--basis-max-iter", pl.basis_max_iter)->capture_default_str();
  pl_cmd->add_option("--basis-max-time", pl.basis_max_time)->capture_default_str();
  pl_cmd->add_option("--out-basis", pl.out_basis, "Kind-0 bundle with the basis")->required();
  pl_cmd->add_option("--out-subspace", pl.out_subspace, "Kind-0 bundle with the subspace");
  pl_cmd->add_option("--manifest", pl.manifest, "Run manifest path");

  cli::DistortionOptions ds;
  auto* ds_cmd = app.add_subcommand("distortion", "Distortion I_rand / I_local");
  auto* ds_jac = ds_cmd->add_option("--jacobians", ds.jacobians,
                                    "Kind-1 bundle: P random pairs then P local pairs");
  auto* ds_net = ds_cmd->add_option("--net", ds.net, "Network spec JSON (from synth --net-out)");
  ds_jac->excludes(ds_net);
  ds_cmd->add_option("--eps", ds.eps, "Local pair radius")->capture_default_str();
  ds_cmd->add_option("--pairs", ds.pairs, "Pairs per expectation")->capture_default_str();
  ds_cmd->add_option("--power", ds.power, "1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
  ds_cmd->add_option("--seed", ds.seed, "Pair sampling seed")->capture_default_str();
  ds_cmd->add_option("--theta-pre", ds.theta_pre, "Relative singular-value threshold")->capture_default_str();
  ds_cmd->add_option("--report", ds.report, "JSON report path (stdout when omitted)");
  ds_cmd->add_option("--manifest", ds.manifest, "Run manifest path");

  cli::InterpolateOptions ip;
  auto* ip_cmd = app.add_subcommand("interpolate", "Geodesic interpolation/extrapolation schedule");
  ip_cmd->add_option("--a", ip.a, "Kind-0 single frame (t = 0)")->required();
  ip_cmd->add_option("--b", ip.b, "Kind-0 single frame (t = 1)")->required();
  ip_cmd->add_option("--n", ip.n, "Steps between the endpoints")->capture_default_str();
  ip_cmd->add_option("--out-dir", ip.out_dir, "Output directory")->required();
  ip_cmd->add_option("--manifest", ip.manifest, "Run manifest path");

  cli::ProjectSoOptions ps;
  auto* ps_cmd = app.add_subcommand("project-so", "Nearest special orthogonal matrix");
  ps_cmd->add_option("--in", ps.in, "Bundle of square matrices")->required();
  ps_cmd->add_option("--out", ps.out, "Kind-0 bundle of rotations")->required();
  ps_cmd->add_option("--manifest", ps.manifest, "Run manifest path");

  cli::RepresentOptions rp;
  auto* rp_cmd = app.add_subcommand("represent", "Coordinates of latents in a basis");
  rp_cmd->add_option("--basis", rp.basis, "Kind-0 single frame")->required();
  rp_cmd->add_option("--latents", rp.latents, "Kind-2 bundle of column vectors")->required();
  rp_cmd->add_option("--out", rp.out, "Kind-2 bundle of coordinates")->required();
  rp_cmd->add_option("--manifest", rp.manifest, "Run manifest path");

  cli::SynthOptions sy;
  auto* sy_cmd = app.add_subcommand("synth", "Jacobians of a random tanh network");
  sy_cmd->add_option("--layers", sy.layers, "Number of layers")->capture_default_str();
  sy_cmd->add_option("--widths", sy.widths, "One width, or layers+1 comma-separated widths")
      ->capture_default_str();
  sy_cmd->add_option("--seed", sy.seed, "Seed for weights and inputs")->capture_default_str();
  sy_cmd->add_option("--samples", sy.samples, "Number of Jacobians")->capture_default_str();
  sy_cmd->add_option("--weight-scale", sy.weight_scale, "Weight scale")->capture_default_str();
  sy_cmd->add_flag("--linear-output", sy.linear_output, "Leave the last layer affine");
  sy_cmd->add_option("--out", sy.out, "Kind-1 bundle of Jacobians")->required();
  sy_cmd->add_option("--net-out", sy.net_out, "Network spec JSON");
  sy_cmd->add_option("--manifest", sy.manifest, "Run manifest path");

  cli::VerifyOptions vf;
  auto* vf_cmd = app.add_subcommand("verify-manifest", "Check recorded digests against files");
  vf_cmd->add_option("--manifest", vf.manifest, "Run manifest path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitValidation;
  }

  try {
    if (*lb_cmd) return cli::local_basis(lb);
    if (*sm_cmd) {
      sm.init = kInitRules.at(sm_init);
      if (sm_dim > 0) sm.dim = sm_dim;
      return cli::subspace_mean(sm);
    }
    if (*rf_cmd) return cli::refine(rf);
    if (*pl_cmd) {
      pl.init = kInitRules.at(pl_init);
      return cli::pipeline(pl);
    }
    if (*ds_cmd) return cli::distortion(ds);
    if (*ip_cmd) return cli::interpolate(ip);
    if (*ps_cmd) return cli::project_so(ps);
    if (*rp_cmd) return cli::represent(rp);
    if (*sy_cmd) return cli::synth(sy);
    if (*vf_cmd) return cli::verify(vf);
  } catch (const fbasis::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitValidation;
  }
  return cli::kExitValidation;
}
