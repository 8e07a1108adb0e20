#include "pbd/promp.hpp"

#include <algorithm>
#include <random>

namespace pbd {

BasisConfig BasisConfig::with_basis(int num_basis) {
  BasisConfig cfg;
  cfg.num_basis = num_basis;
  cfg.bandwidth = 1.0 / (2.0 * num_basis * num_basis);
  return cfg;
}

Eigen::VectorXd BasisConfig::centers() const {
  if (num_basis == 1) return Eigen::VectorXd::Constant(1, 0.5);
  const double margin = 2.0 * bandwidth;
  return Eigen::VectorXd::LinSpaced(num_basis, -margin, 1.0 + margin);
}

void validate(const BasisConfig& cfg) {
  if (cfg.num_basis < 1) throw Error(Errc::PayloadValidation, "num_basis must be >= 1");
  if (!(cfg.bandwidth > 0.0)) throw Error(Errc::PayloadValidation, "bandwidth must be positive");
  if (!(cfg.ridge > 0.0)) throw Error(Errc::PayloadValidation, "ridge must be positive");
  if (!(cfg.noise >= 0.0)) throw Error(Errc::PayloadValidation, "noise must be non-negative");
  if (!(cfg.covariance_reg >= 0.0)) {
    throw Error(Errc::PayloadValidation, "covariance_reg must be non-negative");
  }
}

Eigen::RowVectorXd basis_row(double phase, const BasisConfig& cfg) {
  return basis_matrix(Eigen::VectorXd::Constant(1, phase), cfg).row(0);
}

namespace {

Eigen::VectorXd uniform_phases(std::size_t n) {
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 0.0, 1.0);
}

/// Factorized normal equations shared by every series fitted on the same phases.
class RidgeSolver {
 public:
  RidgeSolver(const Eigen::MatrixXd& phi, double ridge) : phi_(phi) {
    const Eigen::Index k = phi.cols();
    Eigen::MatrixXd gram = phi.transpose() * phi;
    gram.diagonal().array() += ridge;
    ldlt_.compute(gram);
    if (ldlt_.info() != Eigen::Success || !ldlt_.isPositive()) {
      throw Error(Errc::SingularSystem, "ridge normal equations are singular (K = " +
                                            std::to_string(k) + ")");
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& y) const { return ldlt_.solve(phi_.transpose() * y); }

 private:
  const Eigen::MatrixXd& phi_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

/// Resampled positions as an n x 3 matrix.
Eigen::MatrixXd resampled_positions(const Trajectory& demo, std::size_t n) {
  const auto samples = resample_phase(demo, n);
  Eigen::MatrixXd pos(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) pos.row(static_cast<Eigen::Index>(i)) = samples[i].pose.position.transpose();
  return pos;
}

/// Per-dimension weight matrices (one row per demo).
std::array<Eigen::MatrixXd, kModeledDims> fit_demo_weights(const std::vector<const Trajectory*>& demos,
                                                           std::size_t n_resample,
                                                           const BasisConfig& cfg) {
  const Eigen::MatrixXd phi = basis_matrix(uniform_phases(n_resample), cfg);
  const RidgeSolver solver(phi, cfg.ridge);
  std::array<Eigen::MatrixXd, kModeledDims> weights;
  for (auto& w : weights) w.resize(static_cast<Eigen::Index>(demos.size()), cfg.num_basis);
  for (std::size_t d = 0; d < demos.size(); ++d) {
    if (demos[d]->size() < 2) {
      throw Error(Errc::TooShort, "demo " + std::to_string(d) + " has fewer than 2 waypoints", d);
    }
    const Eigen::MatrixXd pos = resampled_positions(*demos[d], n_resample);
    for (int dim = 0; dim < kModeledDims; ++dim) {
      weights[dim].row(static_cast<Eigen::Index>(d)) = solver.solve(pos.col(dim)).transpose();
    }
  }
  return weights;
}

/// Lexicographic row order, so accumulation order does not depend on demo order.
Eigen::MatrixXd sorted_rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(a, j) != m(b, j)) return m(a, j) < m(b, j);
    }
    return false;
  });
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(order[i]);
  return out;
}

double mean_duration(const std::vector<const Trajectory*>& demos) {
  std::vector<double> durations;
  for (const auto* d : demos) durations.push_back(d->duration());
  std::sort(durations.begin(), durations.end());
  double sum = 0.0;
  for (double v : durations) sum += v;
  return sum / static_cast<double>(durations.size());
}

Trajectory reconstruct(const BasisConfig& basis, const std::array<Eigen::VectorXd, kModeledDims>& weights,
                       const Eigen::Quaterniond& orientation, std::size_t n, double duration) {
  if (n < 2) throw Error(Errc::TooShort, "output length must be at least 2");
  if (!(duration > 0.0)) throw Error(Errc::PayloadValidation, "duration must be positive");
  const Eigen::MatrixXd phi = basis_matrix(uniform_phases(n), basis);
  Trajectory out;
  out.sample_period = duration / static_cast<double>(n - 1);
  out.orientation_mode = OrientationMode::Fixed;
  out.waypoints.resize(n);
  std::array<Eigen::VectorXd, kModeledDims> series;
  for (int dim = 0; dim < kModeledDims; ++dim) series[dim] = phi * weights[dim];
  for (std::size_t i = 0; i < n; ++i) {
    auto& w = out.waypoints[i];
    const auto row = static_cast<Eigen::Index>(i);
    w.t = static_cast<double>(i) * out.sample_period;
    w.pose.position = Eigen::Vector3d(series[0](row), series[1](row), series[2](row));
    w.pose.orientation = orientation;
  }
  return out;
}

}  // namespace

Eigen::VectorXd fit_weights(const Eigen::VectorXd& series, const Eigen::VectorXd& phases,
                            const BasisConfig& cfg) {
  validate(cfg);
  if (series.size() < 2 || series.size() != phases.size()) {
    throw Error(Errc::TooShort, "need at least 2 samples with matching phases");
  }
  const Eigen::MatrixXd phi = basis_matrix(phases, cfg);
  return RidgeSolver(phi, cfg.ridge).solve(series);
}

Eigen::Vector3d ProMPModel::mean_position(double phase) const {
  const Eigen::RowVectorXd phi = basis_row(phase, basis);
  return Eigen::Vector3d(phi * dims[0].mean, phi * dims[1].mean, phi * dims[2].mean);
}

double ProMPModel::variance(int dim, double phase) const {
  const Eigen::RowVectorXd phi = basis_row(phase, basis);
  return phi * dims[static_cast<std::size_t>(dim)].cov * phi.transpose();
}

ProMPModel train_promp(const std::vector<Trajectory>& demos, std::size_t n_resample,
                       const BasisConfig& cfg) {
  validate(cfg);
  if (demos.size() < 2) {
    throw Error(Errc::TooFewDemos, "training needs at least 2 demos, got " + std::to_string(demos.size()));
  }
  if (n_resample < 2) throw Error(Errc::TooShort, "n_resample must be at least 2");
  std::vector<const Trajectory*> refs;
  for (const auto& d : demos) refs.push_back(&d);
  const auto weights = fit_demo_weights(refs, n_resample, cfg);

  ProMPModel model;
  model.basis = cfg;
  model.reference_duration = mean_duration(refs);
  const double count = static_cast<double>(demos.size());
  for (int dim = 0; dim < kModeledDims; ++dim) {
    const Eigen::MatrixXd w = sorted_rows(weights[dim]);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(cfg.num_basis);
    for (Eigen::Index r = 0; r < w.rows(); ++r) mean += w.row(r).transpose();
    mean /= count;
    const Eigen::MatrixXd centered = w.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / (count - 1.0);
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal().array() += cfg.covariance_reg;
    model.dims[dim] = WeightDistribution{std::move(mean), std::move(cov)};
  }
  return model;
}

ProMPModel condition(const ProMPModel& model, const std::vector<ViaPoint>& via) {
  ProMPModel out = model;
  const Eigen::Index k = model.basis.num_basis;
  for (const auto& point : via) {
    if (!(point.phase >= 0.0 && point.phase <= 1.0)) {
      throw Error(Errc::PayloadValidation, "via-point phase outside [0, 1]");
    }
    if (!(point.noise >= 0.0)) throw Error(Errc::PayloadValidation, "via-point noise must be >= 0");
    const Eigen::VectorXd phi = basis_row(point.phase, model.basis).transpose();
    for (int dim = 0; dim < kModeledDims; ++dim) {
      if (!point.conditioned[static_cast<std::size_t>(dim)]) continue;
      auto& dist = out.dims[static_cast<std::size_t>(dim)];
      const Eigen::VectorXd cov_phi = dist.cov * phi;
      const double innovation_var = point.noise + phi.dot(cov_phi);
      if (!(innovation_var > 0.0)) continue;  // zero gain
      const Eigen::VectorXd gain = cov_phi / innovation_var;
      dist.mean += gain * (point.value[dim] - phi.dot(dist.mean));
      // Joseph form keeps the update symmetric PSD under rounding.
      const Eigen::MatrixXd reduce = Eigen::MatrixXd::Identity(k, k) - gain * phi.transpose();
      Eigen::MatrixXd cov = reduce * dist.cov * reduce.transpose() + point.noise * gain * gain.transpose();
      dist.cov = 0.5 * (cov + cov.transpose());
    }
  }
  return out;
}

Trajectory mean_trajectory(const ProMPModel& model, std::size_t n, double duration) {
  return reconstruct(model.basis, {model.dims[0].mean, model.dims[1].mean, model.dims[2].mean},
                     model.orientation, n, duration);
}

Trajectory sample_trajectory(const ProMPModel& model, std::size_t n, double duration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<Eigen::VectorXd, kModeledDims> weights;
  for (int dim = 0; dim < kModeledDims; ++dim) {
    const auto& dist = model.dims[static_cast<std::size_t>(dim)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dist.cov);
    const Eigen::VectorXd scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::VectorXd z(dist.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    weights[dim] = dist.mean + eig.eigenvectors() * scale.asDiagonal() * z;
  }
  return reconstruct(model.basis, weights, model.orientation, n, duration);
}

Eigen::VectorXd ContextualProMP::weights(int dim, double context) const {
  return affine[static_cast<std::size_t>(dim)] * Eigen::Vector2d(1.0, context);
}

ContextualProMP train_contextual(const std::vector<ContextDemo>& demos, std::size_t n_resample,
                                 const BasisConfig& cfg) {
  validate(cfg);
  if (demos.size() < 2) throw Error(Errc::TooFewDemos, "contextual training needs at least 2 demos");
  const bool degenerate = std::all_of(demos.begin(), demos.end(), [&](const ContextDemo& d) {
    return d.context == demos.front().context;
  });
  if (degenerate) throw Error(Errc::DegenerateContexts, "all demo contexts are equal");

  std::vector<const Trajectory*> refs;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(demos.size()), 2);
  for (std::size_t i = 0; i < demos.size(); ++i) {
    refs.push_back(&demos[i].demo);
    design.row(static_cast<Eigen::Index>(i)) << 1.0, demos[i].context;
  }
  const auto weights = fit_demo_weights(refs, n_resample, cfg);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);

  ContextualProMP model;
  model.basis = cfg;
  model.reference_duration = mean_duration(refs);
  for (int dim = 0; dim < kModeledDims; ++dim) {
    model.affine[static_cast<std::size_t>(dim)] = qr.solve(weights[dim]).transpose();
  }
  return model;
}

Trajectory predict_contextual(const ContextualProMP& model, double context, std::size_t n, double duration) {
  return reconstruct(model.basis, {model.weights(0, context), model.weights(1, context), model.weights(2, context)},
                     model.orientation, n, duration);
}

}  // namespace pbd
