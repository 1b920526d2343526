// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Oracles live here and in support.hpp; none of them call
// the SVD-based projections or log maps they check.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fbasis/bundle.hpp"
#include "fbasis/commands.hpp"
#include "fbasis/distortion.hpp"
#include "fbasis/error.hpp"
#include "fbasis/frechet.hpp"
#include "fbasis/semantic.hpp"
#include "fbasis/synth_net.hpp"
#include "support.hpp"

using namespace fbasis;
using namespace fbasis::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double line_angle(const Frame& f) { return std::atan2(f.matrix()(1, 0), f.matrix()(0, 0)); }

double so2_angle(const Matrix& r) { return std::atan2(r(1, 0), r(0, 0)); }

// Coarse grid at `step`, then a fine grid over the neighbouring cells.
double refined_grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step) {
  const double coarse = grid_argmin(f, lo, hi, step);
  return grid_argmin(f, coarse - step, coarse + step, step * 1e-4);
}

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

// ---------------------------------------------------------------------------

Outcome so_projection_optimality() {
  Outcome out;
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);

  std::vector<std::vector<Matrix>> pool(6);
  for (Eigen::Index k = 2; k <= 5; ++k) {
    pool[k].reserve(10000);
    for (int c = 0; c < 10000; ++c) pool[k].push_back(random_rotation(rng, k).matrix());
  }

  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_value_gap = 0.0, worst_entry_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index k = 2 + trial % 4;
    Matrix a = gaussian(rng, k, k);
    while (std::abs(a.determinant()) < 1e-6) a = gaussian(rng, k, k);
    const Matrix p = project_special_orthogonal(a).matrix();
    const double best = (p - a).norm();
    double nearest = std::numeric_limits<double>::infinity();
    for (const Matrix& c : pool[k]) nearest = std::min(nearest, (c - a).norm());
    worst_margin = std::min(worst_margin, nearest - best);

    if (k == 2) {
      const auto f = [&](double phi) { return (planar(phi) - a).norm(); };
      const double coarse = grid_argmin(f, 0.0, 2 * kPi, 1e-4);
      worst_value_gap = std::max(worst_value_gap, std::abs(f(coarse) - best));
      const double fine = grid_argmin(f, coarse - 1e-4, coarse + 1e-4, 1e-8);
      worst_entry_gap = std::max(worst_entry_gap, max_abs(planar(fine) - p));
    }
  }
  const double elapsed = seconds_since(start);
  out.require(worst_margin >= -1e-8, "margin >= -1e-8");
  out.require(worst_value_gap <= 1e-6, "k=2 grid objective within 1e-6");
  out.require(worst_entry_gap <= 1e-6, "k=2 refined grid entries within 1e-6");
  out.require(elapsed < 30.0, "runtime < 30 s");
  out.detail << "worst margin " << worst_margin << ", k=2 grid objective gap " << worst_value_gap
             << ", refined-grid entry gap " << worst_entry_gap << ", " << elapsed << " s";
  return out;
}

Outcome so_projection_analytic() {
  Outcome out;
  // For diagonal A the nearest rotation is a sign diagonal maximizing
  // tr(Rᵀ A): signs follow A, and when their product is negative the entry
  // of smallest magnitude flips.
  struct Case {
    Matrix a, want;
    const char* name;
  };
  std::vector<Case> cases{
      {diag({2, -3}), diag({-1, -1}), "diag(2,-3)"},
      {diag({3, 2}), diag({1, 1}), "diag(3,2)"},
      {diag({-2, 3}), diag({1, 1}), "diag(-2,3)"},
      {diag({2, 3, -4}), diag({-1, 1, -1}), "diag(2,3,-4)"},
      {diag({-1, -2, -3}), diag({1, -1, -1}), "diag(-1,-2,-3)"},
      {diag({1, 2, 3}), diag({1, 1, 1}), "diag(1,2,3)"},
      {diag({-5, -1, 2}), diag({-1, -1, 1}), "diag(-5,-1,2)"},
  };
  // Scaled planar rotations project to themselves.
  cases.push_back({5.0 * planar(0.7), planar(0.7), "5 R(0.7)"});
  cases.push_back({0.1 * planar(-2.5), planar(-2.5), "0.1 R(-2.5)"});
  // Conjugating by a rotation conjugates the answer.
  const Matrix q = planar(0.4);
  cases.push_back({q * diag({2, -3}) * q.transpose(), -Matrix::Identity(2, 2), "R diag(2,-3) R^T"});

  double worst = 0.0;
  for (const Case& c : cases) {
    const double err = max_abs(project_special_orthogonal(c.a).matrix() - c.want);
    worst = std::max(worst, err);
    out.require(err <= 1e-10, c.name);
  }
  out.detail << cases.size() << " cases, worst entry error " << worst;
  return out;
}

Outcome geodesic_linearity() {
  Outcome out;
  std::mt19937_64 rng(1003);
  double worst_linear = 0.0, worst_start = 0.0, worst_end = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index k = 1 + trial % 4;
    const Frame x = random_frame(rng, 16, k), y = random_frame(rng, 16, k);
    const double d = geodesic_distance(x, y);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const Frame g = grassmann_geodesic(x, y, t);
      worst_linear = std::max(worst_linear, std::abs(geodesic_distance(x, g) - t * d));
    }
    worst_start = std::max(worst_start, max_abs(grassmann_geodesic(x, y, 0.0).matrix() - x.matrix()));
    const Frame g1 = grassmann_geodesic(x, y, 1.0);
    const Matrix proj = g1.matrix() * g1.matrix().transpose() - y.matrix() * y.matrix().transpose();
    worst_end = std::max({worst_end, max_abs(proj), geodesic_distance(g1, y)});
  }
  out.require(worst_linear <= 1e-7, "linearity within 1e-7");
  out.require(worst_start <= 1e-9, "Gamma(0) = X within 1e-9");
  out.require(worst_end <= 1e-9, "Gamma(1) spans Y within 1e-9");
  out.detail << "worst |d(X,G(t)) - t d| " << worst_linear << ", start " << worst_start << ", end "
             << worst_end;
  return out;
}

Outcome frechet_oracles() {
  Outcome out;
  const auto start = Clock::now();
  const Grassmann gr;
  const SpecialOrthogonal so;
  std::mt19937_64 rng(1004);

  // Two points: the mean is equidistant at half the distance.
  double worst_two = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index k = 1 + trial % 3;
    const Frame x = random_frame(rng, 8, k);
    const Frame y = nearby_frame(rng, x, 1.2);
    const std::vector<Frame> pts{x, y};
    const auto r = frechet_mean(gr, std::span<const Frame>(pts), x, SolverConfig::subspace_defaults());
    const double half = geodesic_distance(x, y) / 2;
    worst_two = std::max({worst_two, std::abs(geodesic_distance(r.point, x) - half),
                          std::abs(geodesic_distance(r.point, y) - half),
                          geodesic_distance(r.point, grassmann_geodesic(x, y, 0.5))});
  }
  out.require(worst_two <= 1e-6, "two-point midpoint within 1e-6");

  // Lines at 0, 10 and 20 degrees.
  const double deg = kPi / 180;
  const std::vector<double> angles{0.0, 10 * deg, 20 * deg};
  std::vector<Frame> lines;
  for (double a : angles) lines.push_back(line(a));
  const auto line_cost = [&](double a) {
    double c = 0.0;
    for (double b : angles) c += line_distance(a, b) * line_distance(a, b);
    return c;
  };
  const double grid = refined_grid_argmin(line_cost, 0.0, kPi, 1e-4);
  const auto lm = frechet_mean(gr, std::span<const Frame>(lines), lines[0], SolverConfig::subspace_defaults());
  const double line_err = std::max(line_distance(line_angle(lm.point), grid),
                                   line_distance(line_angle(lm.point), 10 * deg));
  out.require(line_err <= 1e-6, "lines mean = 10 degree line within 1e-6");

  // SO(2): mean of I and R(phi) is R(phi/2).
  std::uniform_real_distribution<double> phi_dist(0.0, 3.0);
  double worst_so = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = phi_dist(rng);
    const std::vector<Rotation> pts{Rotation::identity(2), Rotation(planar(phi))};
    const auto r = frechet_mean(so, std::span<const Rotation>(pts), pts[0], SolverConfig::basis_defaults());
    const double oracle = refined_grid_argmin(
        [&](double a) {
          const double d0 = so2_distance(a, 0.0), d1 = so2_distance(a, phi);
          return d0 * d0 + d1 * d1;
        },
        -kPi, kPi, 1e-4);
    worst_so = std::max({worst_so, std::abs(so2_angle(r.point.matrix()) - phi / 2),
                         std::abs(so2_angle(r.point.matrix()) - oracle),
                         max_abs(r.point.matrix() - planar(phi / 2))});
  }
  out.require(worst_so <= 1e-6, "SO(2) half angle within 1e-6");

  const double elapsed = seconds_since(start);
  out.require(elapsed < 60.0, "runtime < 60 s");
  out.detail << "two-point " << worst_two << ", lines " << line_err << ", SO(2) " << worst_so << ", "
             << elapsed << " s";
  return out;
}

// Shared by the dominance and refinement criteria.
struct SynthCase {
  std::vector<Frame> tangents;
  SemanticSubspace subspace;
  Frame init;
};

std::vector<SynthCase> synth_cases() {
  std::vector<SynthCase> cases;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthNetSpec spec;
    spec.widths = {6, 32, 32};
    spec.seed = 500 + seed;
    const SynthNet net(spec);
    const auto samples = sample_jacobians(net, 200, 900 + seed);
    std::vector<LocalChart> charts;
    for (const auto& s : samples) charts.push_back(local_basis(s));
    const int d_w = estimate_manifold_dim(charts);
    std::vector<Frame> tangents;
    for (const auto& c : charts) tangents.push_back(dimension_matched_tangent(c, d_w));
    const Frame init = initial_subspace(tangents, InitRule::First);
    SemanticSubspace sub = global_semantic_subspace(tangents, init, SolverConfig::subspace_defaults());
    cases.push_back({std::move(tangents), std::move(sub), init});
  }
  return cases;
}

Outcome minimizer_dominance(const std::vector<SynthCase>& cases) {
  Outcome out;
  double worst = -std::numeric_limits<double>::infinity();
  int dim = 0;
  for (const SynthCase& c : cases) {
    const std::span<const Frame> t(c.tangents);
    const double at_result = i_global(c.subspace.frame, t, true);
    double smallest_other = i_global(c.init, t, true);
    for (const Frame& f : c.tangents) smallest_other = std::min(smallest_other, i_global(f, t, true));
    smallest_other = std::min(smallest_other, i_global(extrinsic_mean_grassmann(t), t, true));
    worst = std::max(worst, at_result - smallest_other);
    dim = static_cast<int>(c.subspace.frame.cols());
  }
  out.require(worst <= 1e-9, "result <= every competitor + 1e-9");
  out.detail << cases.size() << " bundles (n = 32, 200 samples, d_W = " << dim
             << "), worst excess over best competitor " << worst;
  return out;
}

Outcome refinement_contracts(const std::vector<SynthCase>& cases) {
  Outcome out;
  std::mt19937_64 rng(1006);
  std::bernoulli_distribution flip(0.5);
  double worst_dist = 0.0, worst_cost = -std::numeric_limits<double>::infinity(), worst_flip = 0.0;
  for (const SynthCase& c : cases) {
    const auto cfg = SolverConfig::basis_defaults();
    const SemanticBasis b = refine_basis(c.subspace, c.tangents, cfg);
    worst_dist = std::max(worst_dist, geodesic_distance(b.frame, c.subspace.frame));
    const auto projected = projected_rotations(c.subspace.frame, c.tangents);
    const std::span<const Rotation> p(projected);
    worst_cost = std::max(worst_cost, refinement_cost(b.rotation, p) -
                                          refinement_cost(Rotation::identity(b.rotation.dim()), p));

    std::vector<Frame> flipped;
    for (const Frame& f : c.tangents) {
      Matrix m = f.matrix();
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (flip(rng)) m.col(j) = -m.col(j);
      }
      flipped.emplace_back(std::move(m));
    }
    const SemanticBasis bf = refine_basis(c.subspace, flipped, cfg);
    worst_flip = std::max(worst_flip, max_abs(bf.frame.matrix() - b.frame.matrix()));
  }
  out.require(worst_dist <= 1e-8, "d_geo(basis, subspace) <= 1e-8");
  out.require(worst_cost <= 0.0, "cost(O) <= cost(I)");
  out.require(worst_flip <= 1e-9, "sign-flip invariance within 1e-9");
  out.detail << "worst d_geo " << worst_dist << ", worst cost(O) - cost(I) " << worst_cost
             << ", worst sign-flip change " << worst_flip;
  return out;
}

Outcome linear_map_end_to_end() {
  Outcome out;
  const auto start = Clock::now();
  std::mt19937_64 rng(1007);
  const Matrix a = gaussian(rng, 64, 32);
  const SynthNet net = SynthNet::linear(a);
  const auto samples = sample_jacobians(net, 500, 77);
  const auto result = frechet_basis(std::span<const JacobianSample>(samples), FrechetBasisConfig{});

  // Top-d_W eigenvectors of A Aᵀ span the top-d_W left singular space.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a * a.transpose());
  const Frame oracle(eig.eigenvectors().rightCols(result.manifold_dim));
  const double d = geodesic_distance(result.basis.frame, oracle);
  out.require(d <= 1e-6, "spans the top-d_W left singular space within 1e-6");

  bool degenerate = false;
  try {
    distortion(net, kDefaultThetaPre, 0.1, 100, 5, 1);
  } catch (const Error& e) {
    degenerate = e.kind() == ErrorKind::DegenerateLocalVariation;
  }
  out.require(degenerate, "distortion raises DegenerateLocalVariation");
  const double elapsed = seconds_since(start);
  out.require(elapsed < 10.0, "runtime < 10 s");
  out.detail << "d_W = " << result.manifold_dim << ", d_geo to oracle " << d << ", degenerate "
             << (degenerate ? "raised" : "not raised") << ", " << elapsed << " s";
  return out;
}

// Fourth-order central difference of a scalar function at 0.
double central_difference(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

Outcome gradient_checks() {
  Outcome out;
  std::mt19937_64 rng(1008);
  std::uniform_int_distribution<int> width(2, 10), depth(1, 3);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::bernoulli_distribution coin(0.5);

  double worst_jac = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    SynthNetSpec spec;
    const int layers = depth(rng);
    for (int l = 0; l <= layers; ++l) spec.widths.push_back(width(rng));
    spec.weight_scale = scale(rng);
    spec.linear_output = coin(rng);
    spec.seed = rng();
    const Vector z = gaussian(rng, spec.widths.front(), 1);
    const Matrix j = synth_jacobian(spec, z);
    for (Eigen::Index c = 0; c < j.cols(); ++c) {
      for (Eigen::Index r = 0; r < j.rows(); ++r) {
        const double fd = central_difference(
            [&](double t) {
              Vector zt = z;
              zt(c) += t;
              return synth_forward(spec, zt)(r);
            },
            1e-3);
        worst_jac = std::max(worst_jac, relative_error(j(r, c), fd));
      }
    }
  }
  out.require(worst_jac <= 1e-5, "synth Jacobian within 1e-5 relative per entry");

  const Grassmann gr;
  const SpecialOrthogonal so;
  double worst_gr = 0.0, worst_so = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const Eigen::Index n = 4 + draw % 6, k = 1 + draw % 3;
    const Frame mu = random_frame(rng, n, k);
    std::vector<Frame> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(nearby_frame(rng, mu, 1.0));
    const Matrix v = gr.project_tangent(mu, gaussian(rng, n, k)).direction();
    const double fd = central_difference(
        [&](double t) {
          return frechet_cost(gr, std::span<const Frame>(pts), gr.exp(mu, GrassmannTangent(mu, t * v)));
        },
        1e-4);
    const Matrix g = frechet_gradient(gr, std::span<const Frame>(pts), mu).direction();
    worst_gr = std::max(worst_gr, relative_error((g.array() * v.array()).sum(), fd));
  }
  for (int draw = 0; draw < 20; ++draw) {
    const Eigen::Index k = 2 + draw % 4;
    const Rotation mu = random_rotation(rng, k);
    std::vector<Rotation> pts;
    for (int i = 0; i < 6; ++i) pts.emplace_back(mu.matrix() * skew_exp(0.5 * skew(gaussian(rng, k, k))));
    const Matrix v = so.project_tangent(mu, gaussian(rng, k, k)).direction();
    const double fd = central_difference(
        [&](double t) {
          return frechet_cost(so, std::span<const Rotation>(pts), so.exp(mu, SoTangent(mu, t * v)));
        },
        1e-4);
    const Matrix g = frechet_gradient(so, std::span<const Rotation>(pts), mu).direction();
    worst_so = std::max(worst_so, relative_error((g.array() * v.array()).sum(), fd));
  }
  out.require(worst_gr <= 1e-5, "Grassmann cost gradient within 1e-5 relative");
  out.require(worst_so <= 1e-5, "SO(k) cost gradient within 1e-5 relative");
  out.detail << "synth Jacobian " << worst_jac << ", Grassmann gradient " << worst_gr << ", SO gradient "
             << worst_so << " (worst relative errors)";
  return out;
}

Outcome determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "fbasis_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  cli::SynthOptions s;
  s.layers = 2;
  s.widths = "6,24,24";
  s.samples = 120;
  s.seed = 31;
  s.out = (dir / "jac.frmb").string();
  cli::synth(s);

  const auto run = [&](const std::string& tag) {
    cli::PipelineOptions p;
    p.jacobians = s.out;
    p.out_basis = (dir / ("basis_" + tag + ".frmb")).string();
    p.out_subspace = (dir / ("subspace_" + tag + ".frmb")).string();
    p.manifest = (dir / ("manifest_" + tag + ".json")).string();
    p.threads = 0;
    cli::pipeline(p);
    return p;
  };
  const auto a = run("a"), b = run("b");
  const bool basis_same = read_file_bytes(a.out_basis) == read_file_bytes(b.out_basis);
  const bool subspace_same = read_file_bytes(a.out_subspace) == read_file_bytes(b.out_subspace);
  std::ifstream fa(a.manifest), fb(b.manifest);
  const auto ma = nlohmann::json::parse(fa), mb = nlohmann::json::parse(fb);
  const bool costs_same = ma["reports"]["subspace"]["costs"] == mb["reports"]["subspace"]["costs"] &&
                          ma["reports"]["basis"]["costs"] == mb["reports"]["basis"]["costs"];
  out.require(basis_same, "basis bundle byte-identical");
  out.require(subspace_same, "subspace bundle byte-identical");
  out.require(costs_same, "cost traces identical");
  out.detail << "basis bundles " << (basis_same ? "identical" : "differ") << ", subspace bundles "
             << (subspace_same ? "identical" : "differ") << ", cost traces "
             << (costs_same ? "identical" : "differ") << " ("
             << ma["reports"]["subspace"]["costs"].size() + ma["reports"]["basis"]["costs"].size()
             << " recorded costs)";
  return out;
}

Outcome schedule_shape() {
  Outcome out;
  std::mt19937_64 rng(1010);
  const Frame x = random_frame(rng, 16, 3);
  const Frame y = nearby_frame(rng, x, 1.0);
  const auto s = interpolation_schedule(x, y, 6);
  out.require(s.size() == 9, "9 frames");
  if (s.size() == 9) {
    out.require(std::abs(s.front().t + 1.0 / 6) <= 1e-15, "first t = -1/6");
    out.require(std::abs(s.back().t - 7.0 / 6) <= 1e-15, "last t = 7/6");
    out.require(s[1].t == 0.0 && s[1].index == 1, "index 1 at t = 0");
    out.require(s[7].t == 1.0 && s[7].index == 7, "index 7 at t = 1");
    out.require(max_abs(s[1].frame.matrix() - x.matrix()) == 0.0, "S_1 = X");
    out.require(geodesic_distance(s[7].frame, y) <= 1e-9, "S_7 spans Y");
    for (int i = 0; i < 9; ++i) out.require(s[i].index == i, "indices 0..8");
  }
  out.detail << s.size() << " frames, t from " << s.front().t << " to " << s.back().t;
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<SynthCase> cases;
  const std::vector<Criterion> criteria{
      {"so-projection-optimality", so_projection_optimality},
      {"so-projection-analytic", so_projection_analytic},
      {"grassmann-geodesic-linearity", geodesic_linearity},
      {"frechet-mean-oracles", frechet_oracles},
      {"minimizer-dominance",
       [&] {
         cases = synth_cases();
         return minimizer_dominance(cases);
       }},
      {"refinement-contracts", [&] { return refinement_contracts(cases); }},
      {"linear-map-end-to-end", linear_map_end_to_end},
      {"gradient-checks", gradient_checks},
      {"pipeline-determinism", determinism},
      {"interpolation-schedule-shape", schedule_shape},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "threw: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2zu %-30s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.str().c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
