#include "fbasis/semantic.hpp"

#include <cmath>
#include <string>

#include "fbasis/error.hpp"

namespace fbasis {

const char* to_string(SubspaceSource s) {
  switch (s) {
    case SubspaceSource::Frechet: return "frechet";
    case SubspaceSource::Extrinsic: return "extrinsic";
    case SubspaceSource::External: return "external";
  }
  return "unknown";
}

namespace {

void require_common_shape(std::span<const Frame> frames, Eigen::Index n, Eigen::Index k) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].ambient_dim() != n || frames[i].cols() != k) {
      throw Error(ErrorKind::DimensionMismatch, "frame shape differs from the subspace", i);
    }
  }
}

}  // namespace

Frame initial_subspace(std::span<const Frame> tangents, InitRule rule) {
  if (tangents.empty()) throw Error(ErrorKind::EmptyInput, "no tangent frames");
  if (rule == InitRule::Extrinsic) return extrinsic_mean_grassmann(tangents);
  return tangents.front();
}

SemanticSubspace global_semantic_subspace(std::span<const Frame> tangents, const Frame& init,
                                          const SolverConfig& config) {
  if (tangents.empty()) throw Error(ErrorKind::EmptyInput, "no tangent frames");
  require_common_shape(tangents, init.ambient_dim(), init.cols());
  auto result = frechet_mean(Grassmann{}, tangents, init, config);
  return SemanticSubspace{std::move(result.point), std::move(result.report), SubspaceSource::Frechet};
}

std::vector<Rotation> projected_rotations(const Frame& subspace, std::span<const Frame> locals) {
  require_common_shape(locals, subspace.ambient_dim(), subspace.cols());
  std::vector<Rotation> out;
  out.reserve(locals.size());
  for (std::size_t i = 0; i < locals.size(); ++i) {
    const Frame aligned = align_signs(locals[i], subspace);
    try {
      out.push_back(project_special_orthogonal(subspace.matrix().transpose() * aligned.matrix()));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Singular) throw;
      throw Error(ErrorKind::Singular, "projection of local basis onto the subspace is singular", i);
    }
  }
  return out;
}

double refinement_cost(const Rotation& o, std::span<const Rotation> projected) {
  return frechet_cost(SpecialOrthogonal{}, projected, o);
}

SemanticBasis refine_basis(const SemanticSubspace& subspace, std::span<const Frame> locals,
                           const SolverConfig& config) {
  if (locals.empty()) throw Error(ErrorKind::EmptyInput, "no local frames");
  const std::vector<Rotation> projected = projected_rotations(subspace.frame, locals);
  auto result = frechet_mean(SpecialOrthogonal{}, std::span<const Rotation>(projected),
                             Rotation::identity(subspace.frame.cols()), config);
  Frame basis(subspace.frame.matrix() * result.point.matrix());
  return SemanticBasis{std::move(basis), subspace, std::move(result.point), std::move(result.report)};
}

FrechetBasisResult frechet_basis(std::span<const Matrix> jacobians, const FrechetBasisConfig& config) {
  validate_theta_pre(config.theta_pre);
  if (jacobians.empty()) throw Error(ErrorKind::EmptyInput, "no jacobians");
  std::vector<LocalChart> charts;
  charts.reserve(jacobians.size());
  for (std::size_t i = 0; i < jacobians.size(); ++i) {
    try {
      charts.push_back(local_basis(jacobians[i], config.theta_pre));
    } catch (const Error& e) {
      throw e.at_sample(i);
    }
  }
  const int d_w = estimate_manifold_dim(charts);
  std::vector<int> local_dims;
  for (const LocalChart& c : charts) local_dims.push_back(c.local_dim);

  std::vector<Frame> tangents;
  tangents.reserve(charts.size());
  for (std::size_t i = 0; i < charts.size(); ++i) {
    try {
      tangents.push_back(dimension_matched_tangent(charts[i], d_w));
    } catch (const Error& e) {
      throw e.at_sample(i);
    }
  }
  const Frame init = initial_subspace(tangents, config.init);
  SemanticSubspace subspace = global_semantic_subspace(tangents, init, config.subspace);
  return FrechetBasisResult{refine_basis(subspace, tangents, config.basis), d_w, std::move(local_dims)};
}

FrechetBasisResult frechet_basis(std::span<const JacobianSample> samples,
                                 const FrechetBasisConfig& config) {
  std::vector<Matrix> jacobians;
  jacobians.reserve(samples.size());
  for (const auto& s : samples) jacobians.push_back(s.jacobian);
  return frechet_basis(std::span<const Matrix>(jacobians), config);
}

SemanticBasis refine_external_basis(const Matrix& external, std::span<const Frame> locals,
                                    const SolverConfig& config) {
  SemanticSubspace subspace{orthonormalize(external), SolverReport{}, SubspaceSource::External};
  return refine_basis(subspace, locals, config);
}

Vector represent(const Vector& w, const Frame& basis) {
  if (w.size() != basis.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "latent length " + std::to_string(w.size()) + " vs basis dimension " +
                    std::to_string(basis.ambient_dim()));
  }
  return basis.matrix().transpose() * w;
}

std::vector<ScheduleEntry> interpolation_schedule(const Frame& x, const Frame& y, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "schedule needs n >= 1");
  std::vector<ScheduleEntry> out;
  out.reserve(static_cast<std::size_t>(n) + 3);
  for (int i = 0; i <= n + 2; ++i) {
    const double t = static_cast<double>(i - 1) / n;
    out.push_back({i, t, grassmann_geodesic(x, y, t)});
  }
  return out;
}

std::vector<int> match_components(const Frame& reference, const Frame& candidate) {
  if (reference.ambient_dim() != candidate.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "bases live in different spaces");
  }
  const Matrix cosines = (reference.matrix().transpose() * candidate.matrix()).cwiseAbs();
  std::vector<int> out;
  for (Eigen::Index i = 0; i < cosines.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < cosines.cols(); ++j) {
      if (cosines(i, j) > cosines(i, best)) best = j;
    }
    out.push_back(static_cast<int>(best));
  }
  return out;
}

}  // namespace fbasis
