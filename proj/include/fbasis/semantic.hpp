#pragma once

/// @file
/// Two-stage global semantic basis. Stage one averages dimension-matched
/// tangent frames on the Grassmannian to get the global semantic subspace
/// M_S. Stage two aligns every local basis to M_S, projects M_Sᵀ M_w onto
/// SO(d_W), and averages those rotations; the basis is M_S · O.

#include <span>
#include <vector>

#include "fbasis/frechet.hpp"
#include "fbasis/local_geometry.hpp"

namespace fbasis {

enum class SubspaceSource { Frechet, Extrinsic, External };
enum class InitRule { First, Extrinsic };

const char* to_string(SubspaceSource s);

struct SemanticSubspace {
  Frame frame;
  SolverReport report;
  SubspaceSource source = SubspaceSource::Frechet;
};

struct SemanticBasis {
  Frame frame;  // B_s = M_S · O
  SemanticSubspace subspace;
  Rotation rotation;
  SolverReport report;
};

Frame initial_subspace(std::span<const Frame> tangents, InitRule rule);

SemanticSubspace global_semantic_subspace(std::span<const Frame> tangents, const Frame& init,
                                          const SolverConfig& config);

/// Sign alignment to M_S followed by P_so(M_Sᵀ M_w) for every local frame.
/// A singular projection throws Singular carrying the sample index.
std::vector<Rotation> projected_rotations(const Frame& subspace, std::span<const Frame> locals);

/// Σ d(O, P_so(M_Sᵀ M_{w_i}))².
double refinement_cost(const Rotation& o, std::span<const Rotation> projected);

/// Starts the SO(d_W) solver at the identity.
SemanticBasis refine_basis(const SemanticSubspace& subspace, std::span<const Frame> locals,
                           const SolverConfig& config);

struct FrechetBasisConfig {
  double theta_pre = kDefaultThetaPre;
  InitRule init = InitRule::First;
  SolverConfig subspace = SolverConfig::subspace_defaults();
  SolverConfig basis = SolverConfig::basis_defaults();
};

struct FrechetBasisResult {
  SemanticBasis basis;
  int manifold_dim;
  std::vector<int> local_dims;
};

FrechetBasisResult frechet_basis(std::span<const Matrix> jacobians, const FrechetBasisConfig& config);
FrechetBasisResult frechet_basis(std::span<const JacobianSample> samples,
                                 const FrechetBasisConfig& config);

/// Columns of `external` are the supplied basis vectors; they are
/// orthonormalized to form M_S before refinement.
SemanticBasis refine_external_basis(const Matrix& external, std::span<const Frame> locals,
                                    const SolverConfig& config);

/// (w·v_1, …, w·v_{d_W}).
Vector represent(const Vector& w, const Frame& basis);

struct ScheduleEntry {
  int index;
  double t;
  Frame frame;
};

/// S_i = Γ(X, Y, (i − 1)/n) for i = 0, …, n + 2.
std::vector<ScheduleEntry> interpolation_schedule(const Frame& x, const Frame& y, int n);

/// For each column of `reference`, the column of `candidate` with the largest
/// absolute cosine similarity; ties go to the lowest index.
std::vector<int> match_components(const Frame& reference, const Frame& candidate);

}  // namespace fbasis
