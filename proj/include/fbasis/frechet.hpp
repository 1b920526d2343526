#pragma once

/// @file
/// Fréchet mean argmin_μ Σ d(μ, x_i)² by Riemannian gradient descent on any
/// manifold satisfying RiemannianManifold, and the closed-form extrinsic mean
/// on the Grassmannian.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbasis/error.hpp"
#include "fbasis/manifolds.hpp"
#include "fbasis/parallel.hpp"

namespace fbasis {

/// Stalled: the line search found no step with a strict, sufficient decrease.
enum class Termination { Converged, MaxIter, MaxTime, Stalled };

const char* to_string(Termination t);

struct StepRule {
  enum class Kind { Fixed, Backtracking };
  Kind kind = Kind::Backtracking;
  /// Fixed step size, or the initial trial step when backtracking.
  /// Zero means 1/(2m) for m points.
  double eta = 0.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
};

struct SolverConfig {
  int max_iter = 1000;
  double max_time = 2000.0;  // seconds, wall clock
  /// Relative to the gradient norm at the initial point.
  double grad_tol = 1e-8;
  /// Absolute floor; log maps carry rounding noise around 1e−15 per point.
  double grad_abs_tol = 1e-12;
  StepRule step;
  std::uint64_t seed = 0;
  /// 0: sequential reduction in input order. >0: per-point work on this many
  /// threads, reduced by pairwise summation.
  unsigned threads = 0;
  /// Compare the result against every input point and return the best.
  bool check_input_candidates = true;

  void validate() const;

  static SolverConfig subspace_defaults();
  static SolverConfig basis_defaults();
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> costs;
  std::vector<double> grad_norms;
  /// Accepted step size per iteration; 0 for the input-candidate fallback.
  std::vector<double> step_sizes;
  double final_grad_norm = 0.0;
  Termination termination = Termination::Converged;
  double elapsed = 0.0;
  bool restarted = false;
  bool fell_back_to_input = false;
};

template <class Point>
struct FrechetResult {
  Point point;
  SolverReport report;
};

namespace detail {

template <RiemannianManifold M>
double cost_at(const M& manifold, std::span<const typename M::Point> points,
               const typename M::Point& mu, unsigned threads) {
  if (threads == 0) {
    double cost = 0.0;
    for (const auto& p : points) {
      const double d = manifold.distance(mu, p);
      cost += d * d;
    }
    return cost;
  }
  std::vector<double> terms(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const double d = manifold.distance(mu, points[i]);
    terms[i] = d * d;
  });
  return pairwise_sum(std::span<const double>(terms));
}

// Cost that maps an undefined metric (log at −1) to +inf.
template <RiemannianManifold M>
double safe_cost_at(const M& manifold, std::span<const typename M::Point> points,
                    const typename M::Point& mu, unsigned threads) {
  try {
    return cost_at(manifold, points, mu, threads);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LogUndefined) return std::numeric_limits<double>::infinity();
    throw;
  }
}

// Euclidean representative of grad F = −2 Σ log_μ(x_i).
template <RiemannianManifold M>
Matrix gradient_at(const M& manifold, std::span<const typename M::Point> points,
                   const typename M::Point& mu, unsigned threads) {
  if (threads == 0) {
    Matrix g = Matrix::Zero(mu.matrix().rows(), mu.matrix().cols());
    for (const auto& p : points) g -= 2.0 * manifold.log(mu, p).direction();
    return g;
  }
  std::vector<Matrix> terms(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    terms[i] = -2.0 * manifold.log(mu, points[i]).direction();
  });
  return pairwise_sum(std::span<const Matrix>(terms));
}

// F(x_i) for every input point. Bitwise-identical points share one row of
// the distance table and each unordered pair is evaluated once, so m copies
// of a point cost one distance instead of m².
template <RiemannianManifold M>
std::vector<double> input_costs(const M& manifold, std::span<const typename M::Point> points,
                                unsigned threads) {
  const std::size_t m = points.size();
  const auto entries = [&](std::size_t i) {
    const Matrix& a = points[i].matrix();
    return std::span<const double>(a.data(), static_cast<std::size_t>(a.size()));
  };
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto x = entries(a), y = entries(b);
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  std::vector<std::size_t> rep;  // first index of each distinct point
  std::vector<double> weight;    // multiplicity
  std::vector<std::size_t> group_of(m);
  for (std::size_t pos = 0; pos < m; ++pos) {
    const std::size_t i = order[pos];
    const auto x = entries(i);
    if (rep.empty() || !std::equal(x.begin(), x.end(), entries(rep.back()).begin(), entries(rep.back()).end())) {
      rep.push_back(i);
      weight.push_back(0.0);
    }
    weight.back() += 1.0;
    group_of[i] = rep.size() - 1;
  }

  const std::size_t g = rep.size();
  std::vector<double> sq(g * g, 0.0);
  const auto fill_row = [&](std::size_t r) {
    for (std::size_t s = r; s < g; ++s) {
      double d = std::numeric_limits<double>::infinity();
      try {
        d = manifold.distance(points[rep[r]], points[rep[s]]);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::LogUndefined) throw;
      }
      sq[r * g + s] = sq[s * g + r] = d * d;
    }
  };
  parallel_for(g, threads, fill_row);
  std::vector<double> group_cost(g, 0.0);
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t s = 0; s < g; ++s) group_cost[r] += weight[s] * sq[r * g + s];
  }
  std::vector<double> costs(m);
  for (std::size_t i = 0; i < m; ++i) costs[i] = group_cost[group_of[i]];
  return costs;
}

inline bool is_cut_locus(const Error& e) {
  return e.kind() == ErrorKind::CutLocus || e.kind() == ErrorKind::LogUndefined;
}

}  // namespace detail

/// Σ d(μ, x_i)².
template <RiemannianManifold M>
double frechet_cost(const M& manifold, std::span<const typename M::Point> points,
                    const typename M::Point& mu, unsigned threads = 0) {
  return detail::cost_at(manifold, points, mu, threads);
}

/// Riemannian gradient of Σ d(μ, x_i)² as a tangent at μ.
template <RiemannianManifold M>
typename M::Tangent frechet_gradient(const M& manifold,
                                     std::span<const typename M::Point> points,
                                     const typename M::Point& mu, unsigned threads = 0) {
  return manifold.project_tangent(mu, detail::gradient_at(manifold, points, mu, threads));
}

template <RiemannianManifold M>
FrechetResult<typename M::Point> frechet_mean(const M& manifold,
                                              std::span<const typename M::Point> points,
                                              const typename M::Point& init,
                                              const SolverConfig& config) {
  using Point = typename M::Point;
  using Clock = std::chrono::steady_clock;
  config.validate();
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "frechet_mean needs at least one point");

  const auto started = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };
  const unsigned threads = config.threads;
  const double m = static_cast<double>(points.size());
  const double eta0 = config.step.eta > 0.0 ? config.step.eta : 1.0 / (2.0 * m);

  const auto candidate_costs = [&] { return detail::input_costs(manifold, points, threads); };

  SolverReport report;
  std::optional<Point> start(init);

  for (;;) {
    Point mu = *start;
    report.iterations = 0;
    report.costs.assign(1, detail::safe_cost_at(manifold, points, mu, threads));
    report.grad_norms.clear();
    report.step_sizes.clear();
    try {
      Matrix grad = manifold.project_tangent(mu, detail::gradient_at(manifold, points, mu, threads))
                        .direction();
      double grad_norm = grad.norm();
      const double grad_target = std::max(config.grad_tol * grad_norm, config.grad_abs_tol);
      report.grad_norms.push_back(grad_norm);

      for (;;) {
        if (grad_norm <= grad_target) {
          report.termination = Termination::Converged;
          break;
        }
        if (report.iterations >= config.max_iter) {
          report.termination = Termination::MaxIter;
          break;
        }
        if (elapsed() > config.max_time) {
          report.termination = Termination::MaxTime;
          break;
        }
        const double cost = report.costs.back();
        double eta = eta0;
        std::optional<Point> accepted;
        double accepted_cost = 0.0;
        while (eta >= eta0 * 1e-15) {
          Point trial = manifold.exp(mu, manifold.project_tangent(mu, -eta * grad));
          const double trial_cost = detail::safe_cost_at(manifold, points, trial, threads);
          const bool fixed = config.step.kind == StepRule::Kind::Fixed;
          // Strict decrease as well: once the required decrease is below the
          // cost's rounding resolution, equal costs would pass forever.
          const double required = config.step.sufficient_decrease * eta * grad_norm * grad_norm;
          if (fixed || (trial_cost < cost && trial_cost <= cost - required)) {
            accepted.emplace(std::move(trial));
            accepted_cost = trial_cost;
            break;
          }
          eta *= config.step.shrink;
        }
        if (!accepted) {
          report.termination = Termination::Stalled;
          break;
        }
        mu = std::move(*accepted);
        ++report.iterations;
        report.step_sizes.push_back(eta);
        report.costs.push_back(accepted_cost);
        grad = manifold.project_tangent(mu, detail::gradient_at(manifold, points, mu, threads))
                   .direction();
        grad_norm = grad.norm();
        report.grad_norms.push_back(grad_norm);
      }
      report.final_grad_norm = grad_norm;
    } catch (const Error& e) {
      if (!detail::is_cut_locus(e)) throw;
      if (report.restarted) {
        throw Error(ErrorKind::CutLocusEncountered,
                    std::string("log undefined after restart: ") + e.what());
      }
      report.restarted = true;
      const auto costs = candidate_costs();
      const auto best = static_cast<std::size_t>(
          std::min_element(costs.begin(), costs.end()) - costs.begin());
      start.emplace(points[best]);
      continue;
    }

    if (config.check_input_candidates) {
      const auto costs = candidate_costs();
      const auto best = static_cast<std::size_t>(
          std::min_element(costs.begin(), costs.end()) - costs.begin());
      const double best_cost =
          costs[best] < report.costs.back() ? detail::safe_cost_at(manifold, points, points[best], threads)
                                            : costs[best];
      if (best_cost < report.costs.back()) {
        mu = points[best];
        report.fell_back_to_input = true;
        ++report.iterations;
        report.step_sizes.push_back(0.0);
        report.costs.push_back(best_cost);
        try {
          report.final_grad_norm =
              manifold.project_tangent(mu, detail::gradient_at(manifold, points, mu, threads))
                  .direction()
                  .norm();
        } catch (const Error& e) {
          if (!detail::is_cut_locus(e)) throw;
          report.final_grad_norm = std::numeric_limits<double>::infinity();
        }
        report.grad_norms.push_back(report.final_grad_norm);
      }
    }
    report.elapsed = elapsed();
    return {std::move(mu), std::move(report)};
  }
}

/// Top-k eigenvectors of (1/m) Σ M_i M_iᵀ. Throws EigengapDegenerate when
/// eigenvalues k and k+1 are within 1e−10.
Frame extrinsic_mean_grassmann(std::span<const Frame> points);

}  // namespace fbasis
