#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pbd/error.hpp"
#include "pbd/geometry.hpp"
#include "pbd/trajectory.hpp"

namespace pbd {

inline constexpr int kDefaultNumBasis = 20;
inline constexpr std::size_t kDefaultResample = 100;
inline constexpr int kModeledDims = 3;  // x, y, z

/// Normalized Gaussian basis over phase.
struct BasisConfig {
  int num_basis = kDefaultNumBasis;
  /// Squared-phase bandwidth h in exp(-(z - c)^2 / (2h)).
  double bandwidth = 1.0 / (2.0 * kDefaultNumBasis * kDefaultNumBasis);
  double ridge = 1e-6;
  /// Default via-point observation noise (variance, m^2).
  double noise = 0.0;
  /// Added to the diagonal of every fitted weight covariance.
  double covariance_reg = 1e-8;

  /// Defaults with the bandwidth tied to the basis count, h = 1 / (2 K^2).
  static BasisConfig with_basis(int num_basis);

  /// K centers evenly spanning [-2h, 1 + 2h]; a single basis sits at 0.5.
  Eigen::VectorXd centers() const;
};

void validate(const BasisConfig& cfg);

/// Row-normalized basis evaluated at each phase: an n x K matrix whose rows sum to 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> basis_matrix(
    const Eigen::MatrixBase<Derived>& phases, const BasisConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> centers = cfg.centers().template cast<Scalar>();
  const Eigen::Index n = phases.size();
  const Eigen::Index k = centers.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> phi(n, k);
  const Scalar inv_two_h = Scalar(1) / (Scalar(2) * Scalar(cfg.bandwidth));
  for (Eigen::Index i = 0; i < n; ++i) {
    using std::exp;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Scalar diff = phases(i) - centers(j);
      phi(i, j) = exp(-diff * diff * inv_two_h);
    }
    phi.row(i) /= phi.row(i).sum();
  }
  return phi;
}

Eigen::RowVectorXd basis_row(double phase, const BasisConfig& cfg);

/// Ridge regression w = (Phi^T Phi + ridge I)^-1 Phi^T y.
Eigen::VectorXd fit_weights(const Eigen::VectorXd& series, const Eigen::VectorXd& phases,
                            const BasisConfig& cfg);

struct WeightDistribution {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct ProMPModel {
  BasisConfig basis;
  std::array<WeightDistribution, kModeledDims> dims;
  Eigen::Quaterniond orientation = tool_down_orientation();
  /// Mean training-demo duration; converts marker timestamps to phase.
  double reference_duration = 1.0;

  Eigen::Vector3d mean_position(double phase) const;
  /// phi^T Sigma_w phi for one dimension.
  double variance(int dim, double phase) const;
};

struct ViaPoint {
  double phase = 0.0;
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  /// Observation variance sigma*^2 (m^2).
  double noise = 0.0;
  std::array<bool, kModeledDims> conditioned{true, true, true};
};

/// Demos are phase-resampled to `n_resample` points and fitted per dimension.
/// Throws Error(TooFewDemos) with fewer than two demos.
ProMPModel train_promp(const std::vector<Trajectory>& demos, std::size_t n_resample = kDefaultResample,
                       const BasisConfig& cfg = {});

/// Sequential Gaussian conditioning on each via point; returns a new model.
ProMPModel condition(const ProMPModel& model, const std::vector<ViaPoint>& via);

Trajectory mean_trajectory(const ProMPModel& model, std::size_t n, double duration);

/// Draws one weight vector per dimension from N(mean, cov); deterministic in `seed`.
Trajectory sample_trajectory(const ProMPModel& model, std::size_t n, double duration,
                             std::uint64_t seed);

/// Weights regressed affinely on a scalar task context: w = A [1, c]^T.
struct ContextualProMP {
  BasisConfig basis;
  std::array<Eigen::MatrixXd, kModeledDims> affine;  // K x 2 each
  Eigen::Quaterniond orientation = tool_down_orientation();
  double reference_duration = 1.0;

  Eigen::VectorXd weights(int dim, double context) const;
};

struct ContextDemo {
  Trajectory demo;
  double context = 0.0;
};

/// Throws Error(DegenerateContexts) when every context is the same.
ContextualProMP train_contextual(const std::vector<ContextDemo>& demos,
                                 std::size_t n_resample = kDefaultResample, const BasisConfig& cfg = {});

Trajectory predict_contextual(const ContextualProMP& model, double context, std::size_t n,
                              double duration);

nlohmann::json model_to_json(const ProMPModel& model);
ProMPModel model_from_json(const nlohmann::json& doc);
void save_model_file(const std::filesystem::path& path, const ProMPModel& model);
ProMPModel load_model_file(const std::filesystem::path& path);

}  // namespace pbd
