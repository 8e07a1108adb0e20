#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <random>

#include "pbd/promp.hpp"
#include "support/oracles.hpp"

using namespace pbd;

namespace {

Trajectory constant_demo(double c, std::size_t n = 20) {
  return oracle::grid_trajectory([c](double) { return Eigen::Vector3d::Constant(c); }, n, 0.2);
}

Eigen::Vector3d mj_start(0.4, -0.3, 0.2);
Eigen::Vector3d mj_goal(0.6, 0.3, 0.35);

Trajectory min_jerk_demo(std::size_t n = 40) {
  const double span = 0.2 * static_cast<double>(n - 1);
  return oracle::grid_trajectory([&](double t) { return oracle::minimum_jerk(mj_start, mj_goal, t / span); }, n, 0.2);
}

std::vector<Trajectory> noisy_min_jerk_demos(std::size_t count, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Trajectory> demos;
  for (std::size_t d = 0; d < count; ++d) {
    Trajectory t = min_jerk_demo();
    for (auto& w : t.waypoints) w.pose.position += Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    demos.push_back(t);
  }
  return demos;
}

double rmse(const Trajectory& a, const Trajectory& b) {
  const auto ra = resample_phase(a, 200);
  const auto rb = resample_phase(b, 200);
  double sq = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) sq += (ra[i].pose.position - rb[i].pose.position).squaredNorm();
  return std::sqrt(sq / static_cast<double>(ra.size()));
}

/// Basis evaluated with explicit loops and hand-placed centers.
Eigen::MatrixXd basis_oracle(const std::vector<double>& phases, int k, double h) {
  const double w = h;
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(phases.size()), k);
  for (std::size_t i = 0; i < phases.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double c = k == 1 ? 0.5 : -2.0 * w + (1.0 + 4.0 * w) * j / (k - 1);
      const double v = std::exp(-(phases[i] - c) * (phases[i] - c) / (2.0 * h));
      phi(static_cast<Eigen::Index>(i), j) = v;
      sum += v;
    }
    phi.row(static_cast<Eigen::Index>(i)) /= sum;
  }
  return phi;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("defaults") {
  const BasisConfig cfg;
  CHECK(cfg.num_basis == 20);
  CHECK(cfg.bandwidth == doctest::Approx(1.0 / 800.0));
  CHECK(cfg.ridge == 1e-6);
  CHECK(cfg.covariance_reg == 1e-8);
  CHECK(kDefaultResample == 100);
}

TEST_CASE("basis rows are normalized") {
  const BasisConfig cfg;
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(257, 0.0, 1.0);
  const Eigen::MatrixXd phi = basis_matrix(z, cfg);
  CHECK((phi.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(phi.minCoeff() > 0.0);
  CHECK(phi.maxCoeff() <= 1.0);
}

TEST_CASE("single basis is constant one") {
  const Eigen::MatrixXd phi = basis_matrix(Eigen::VectorXd::LinSpaced(11, 0.0, 1.0), BasisConfig::with_basis(1));
  CHECK((phi.array() == 1.0).all());
}

TEST_CASE("three symmetric bases at mid phase") {
  const BasisConfig cfg = BasisConfig::with_basis(3);
  const Eigen::RowVectorXd row = basis_row(0.5, cfg);
  const Eigen::MatrixXd expected = basis_oracle({0.5}, 3, cfg.bandwidth);
  CHECK((row - expected.row(0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(row(0) == doctest::Approx(row(2)).epsilon(1e-15));
  CHECK(row(1) > row(0));
  // Outer centers sit 0.5 + 2h from the middle.
  const double far = 0.5 + 2.0 * cfg.bandwidth;
  const double outer = std::exp(-far * far / (2.0 * cfg.bandwidth));
  CHECK(row(0) == doctest::Approx(outer / (1.0 + 2.0 * outer)).epsilon(1e-12));
}

TEST_CASE("basis matches the loop oracle at K = 20") {
  const BasisConfig cfg;
  std::vector<double> z;
  for (int i = 0; i <= 50; ++i) z.push_back(i / 50.0);
  const Eigen::MatrixXd expected = basis_oracle(z, 20, cfg.bandwidth);
  const Eigen::MatrixXd phi = basis_matrix(Eigen::Map<const Eigen::VectorXd>(z.data(), 51), cfg);
  CHECK((phi - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ridge fit recovers constants, zeros and generating weights") {
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0);
  SUBCASE("constant") {
    BasisConfig cfg;
    cfg.ridge = 1e-12;
    const Eigen::VectorXd w = fit_weights(Eigen::VectorXd::Constant(100, 0.37), z, cfg);
    CHECK(((basis_matrix(z, cfg) * w).array() - 0.37).abs().maxCoeff() < 1e-6);
  }
  SUBCASE("zero") {
    const Eigen::VectorXd w = fit_weights(Eigen::VectorXd::Zero(100), z, BasisConfig{});
    CHECK(w.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("generating weights") {
    BasisConfig cfg;
    cfg.ridge = 1e-8;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd truth(cfg.num_basis);
    for (Eigen::Index i = 0; i < truth.size(); ++i) truth(i) = u(rng);
    const Eigen::VectorXd dense = Eigen::VectorXd::LinSpaced(1000, 0.0, 1.0);
    const Eigen::VectorXd y = basis_oracle(std::vector<double>(dense.data(), dense.data() + 1000), 20, cfg.bandwidth) * truth;
    const Eigen::VectorXd w = fit_weights(y, dense, cfg);
    CHECK((w - truth).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("train_promp") {
  SUBCASE("two constants average") {
    const ProMPModel m = train_promp({constant_demo(0.2), constant_demo(0.6)});
    const Trajectory mean = mean_trajectory(m, 50, 3.0);
    for (const auto& w : mean.waypoints) CHECK((w.pose.position.array() - 0.4).abs().maxCoeff() < 1e-6);
  }
  SUBCASE("identical demos") {
    const std::vector<Trajectory> demos(10, min_jerk_demo());
    const ProMPModel m = train_promp(demos);
    CHECK(rmse(mean_trajectory(m, 100, demos[0].duration()), demos[0]) <= 1e-3);
    for (const auto& d : m.dims) {
      const Eigen::MatrixXd expected = 1e-8 * Eigen::MatrixXd::Identity(20, 20);
      CHECK((d.cov - expected).cwiseAbs().maxCoeff() <= 1e-10);
    }
    CHECK(m.reference_duration == doctest::Approx(demos[0].duration()));
  }
  SUBCASE("noisy demos average toward the clean curve") {
    const auto demos = noisy_min_jerk_demos(10, 0.01, 42);
    const ProMPModel m = train_promp(demos);
    CHECK(rmse(mean_trajectory(m, 100, 7.8), min_jerk_demo()) <= 0.005);
  }
  SUBCASE("permutation invariance is bitwise") {
    auto demos = noisy_min_jerk_demos(6, 0.01, 8);
    const ProMPModel a = train_promp(demos);
    std::reverse(demos.begin(), demos.end());
    std::swap(demos[1], demos[4]);
    const ProMPModel b = train_promp(demos);
    for (int d = 0; d < 3; ++d) {
      CHECK((a.dims[d].mean.array() == b.dims[d].mean.array()).all());
      CHECK((a.dims[d].cov.array() == b.dims[d].cov.array()).all());
    }
    CHECK(a.reference_duration == b.reference_duration);
  }
  SUBCASE("needs two demos") {
    try {
      train_promp({constant_demo(1.0)});
      FAIL("expected TooFewDemos");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::TooFewDemos);
    }
  }
  SUBCASE("covariance is symmetric PSD") {
    const ProMPModel m = train_promp(noisy_min_jerk_demos(5, 0.02, 3));
    for (const auto& d : m.dims) {
      CHECK((d.cov - d.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(min_eigenvalue(d.cov) >= -1e-10);
    }
  }
  SUBCASE("interactive deadline for 20 demos of 100 points") {
    std::vector<Trajectory> demos;
    const auto noisy = noisy_min_jerk_demos(20, 0.01, 99);
    for (auto d : noisy) {
      d = redraw_from(d, 0, {});
      for (int i = 0; i < 100; ++i) d.waypoints.push_back(Waypoint{(i + 1) * 0.2, noisy[0].waypoints[i % 40].pose});
      demos.push_back(d);
    }
    const auto start = std::chrono::steady_clock::now();
    (void)train_promp(demos);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
  }
}

TEST_CASE("conditioning") {
  const ProMPModel prior = train_promp(noisy_min_jerk_demos(10, 0.01, 42));

  SUBCASE("near-exact observation is interpolated") {
    const Eigen::Vector3d target(0.55, 0.05, 0.4);
    const ProMPModel post = condition(prior, {ViaPoint{0.5, target, 1e-12}});
    CHECK((post.mean_position(0.5) - target).norm() <= 1e-6);
  }
  SUBCASE("zero innovation keeps the mean and shrinks variance") {
    const ProMPModel post = condition(prior, {ViaPoint{0.3, prior.mean_position(0.3), 1e-6}});
    for (int d = 0; d < 3; ++d) {
      CHECK((post.dims[d].mean - prior.dims[d].mean).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(post.variance(d, 0.3) < prior.variance(d, 0.3));
    }
  }
  SUBCASE("zero covariance gives zero gain") {
    ProMPModel flat = prior;
    for (auto& d : flat.dims) d.cov.setZero();
    const ProMPModel post = condition(flat, {ViaPoint{0.7, Eigen::Vector3d(5, 5, 5), 0.0}});
    for (int d = 0; d < 3; ++d) {
      CHECK((post.dims[d].mean.array() == flat.dims[d].mean.array()).all());
      CHECK((post.dims[d].cov.array() == 0.0).all());
    }
  }
  SUBCASE("input model is untouched") {
    const ProMPModel copy = prior;
    (void)condition(prior, {ViaPoint{0.5, Eigen::Vector3d(1, 1, 1), 1e-6}});
    for (int d = 0; d < 3; ++d) {
      CHECK((copy.dims[d].mean.array() == prior.dims[d].mean.array()).all());
      CHECK((copy.dims[d].cov.array() == prior.dims[d].cov.array()).all());
    }
  }
  SUBCASE("variance never grows and covariance stays PSD") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> phase(0.0, 1.0), pos(-0.5, 0.5), logn(-12.0, -2.0);
    ProMPModel model = prior;
    for (int step = 0; step < 30; ++step) {
      const ProMPModel next =
          condition(model, {ViaPoint{phase(rng), Eigen::Vector3d(pos(rng), pos(rng), pos(rng)), std::pow(10.0, logn(rng))}});
      for (int i = 0; i < 100; ++i) {
        const double z = i / 99.0;
        for (int d = 0; d < 3; ++d) CHECK(next.variance(d, z) <= model.variance(d, z) + 1e-12);
      }
      for (const auto& d : next.dims) {
        CHECK((d.cov - d.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(min_eigenvalue(d.cov) >= -1e-10);
      }
      model = next;
    }
  }
  SUBCASE("order of via points does not matter") {
    const ViaPoint a{0.25, Eigen::Vector3d(0.45, -0.1, 0.3), 1e-5};
    const ViaPoint b{0.8, Eigen::Vector3d(0.6, 0.2, 0.33), 1e-4};
    const ProMPModel ab = condition(prior, {a, b});
    const ProMPModel ba = condition(prior, {b, a});
    for (int d = 0; d < 3; ++d) {
      CHECK((ab.dims[d].mean - ba.dims[d].mean).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((ab.dims[d].cov - ba.dims[d].cov).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  SUBCASE("masked dimensions are left alone") {
    ViaPoint v{0.5, Eigen::Vector3d(1, 1, 1), 1e-6};
    v.conditioned = {true, false, false};
    const ProMPModel post = condition(prior, {v});
    CHECK((post.dims[1].mean.array() == prior.dims[1].mean.array()).all());
    CHECK((post.dims[0].mean.array() != prior.dims[0].mean.array()).any());
  }
}

TEST_CASE("mean trajectory") {
  const ProMPModel m = train_promp(noisy_min_jerk_demos(4, 0.01, 5));
  SUBCASE("matches an independent matrix product at training phases") {
    const Trajectory t = mean_trajectory(m, 100, 9.9);
    std::vector<double> z;
    for (int i = 0; i < 100; ++i) z.push_back(i / 99.0);
    const Eigen::MatrixXd phi = basis_oracle(z, 20, m.basis.bandwidth);
    for (int d = 0; d < 3; ++d) {
      const Eigen::VectorXd expected = phi * m.dims[d].mean;
      for (int i = 0; i < 100; ++i) CHECK(std::abs(t.waypoints[i].pose.position[d] - expected(i)) <= 1e-12);
    }
    CHECK(t.waypoints[99].t == doctest::Approx(9.9));
    CHECK_NOTHROW(validate(t));
    CHECK(t.waypoints[0].pose.orientation.coeffs() == m.orientation.coeffs());
  }
  SUBCASE("two points are the endpoints") {
    const Trajectory t = mean_trajectory(m, 2, 1.0);
    REQUIRE(t.size() == 2);
    CHECK((t.waypoints[0].pose.position - m.mean_position(0.0)).norm() < 1e-15);
    CHECK((t.waypoints[1].pose.position - m.mean_position(1.0)).norm() < 1e-15);
  }
  SUBCASE("constant demos give constant output") {
    const ProMPModel c = train_promp({constant_demo(0.3), constant_demo(0.3)});
    for (const auto& w : mean_trajectory(c, 30, 2.0).waypoints) {
      CHECK((w.pose.position.array() - 0.3).abs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("sampling") {
  const ProMPModel m = train_promp(noisy_min_jerk_demos(10, 0.01, 21));
  SUBCASE("zero covariance reproduces the mean") {
    ProMPModel flat = m;
    for (auto& d : flat.dims) d.cov.setZero();
    CHECK(sample_trajectory(flat, 50, 4.0, 3) == mean_trajectory(flat, 50, 4.0));
  }
  SUBCASE("same seed, same draw") {
    CHECK(sample_trajectory(m, 50, 4.0, 123) == sample_trajectory(m, 50, 4.0, 123));
    CHECK_FALSE(sample_trajectory(m, 50, 4.0, 123) == sample_trajectory(m, 50, 4.0, 124));
  }
  SUBCASE("sample variance at a phase matches phi^T Sigma phi") {
    const std::size_t n = 11;  // phase 0.4 is sample 4
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < 1000; ++s) xs.push_back(sample_trajectory(m, n, 2.0, s).waypoints[4].pose.position.x());
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= xs.size();
    double var = 0.0;
    for (double v : xs) var += (v - mean) * (v - mean);
    var /= (xs.size() - 1);
    const double expected = m.variance(0, 0.4);
    CHECK(std::abs(var - expected) <= 0.2 * expected);
  }
}

TEST_CASE("contextual promp") {
  SUBCASE("affine interpolation between two constant demos") {
    const ContextualProMP m = train_contextual({{constant_demo(1.0), 0.1}, {constant_demo(2.0), 0.2}});
    for (const auto& w : predict_contextual(m, 0.15, 40, 3.0).waypoints) {
      CHECK((w.pose.position.array() - 1.5).abs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("identical demos ignore the context") {
    const Trajectory d = min_jerk_demo();
    const ContextualProMP m = train_contextual({{d, 0.1}, {d, 0.2}, {d, 0.3}});
    const Trajectory a = predict_contextual(m, 0.0, 30, 2.0);
    const Trajectory b = predict_contextual(m, 5.0, 30, 2.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK((a.waypoints[i].pose.position - b.waypoints[i].pose.position).norm() < 1e-9);
    }
  }
  SUBCASE("exact affine data reproduces the fitted weights at a training context") {
    // Demos whose positions move affinely with context are fitted exactly.
    std::vector<ContextDemo> demos;
    for (double c : {0.1, 0.2, 0.3}) {
      demos.push_back({oracle::grid_trajectory(
                           [c](double t) { return Eigen::Vector3d(t, std::sin(t) * c, 0.2 + c * t * t); }, 30, 0.2),
                       c});
    }
    const ContextualProMP m = train_contextual(demos);
    const BasisConfig cfg;
    const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0);
    const auto samples = resample_phase(demos[1].demo, 100);
    Eigen::VectorXd y(100);
    for (int i = 0; i < 100; ++i) y(i) = samples[i].pose.position.y();
    const Eigen::VectorXd fitted = fit_weights(y, z, cfg);
    CHECK((m.weights(1, 0.2) - fitted).cwiseAbs().maxCoeff() <= 1e-8);
    const Trajectory pred = predict_contextual(m, 0.2, 100, demos[1].demo.duration());
    const Eigen::VectorXd recon = basis_matrix(z, cfg) * fitted;
    for (int i = 0; i < 100; ++i) CHECK(std::abs(pred.waypoints[i].pose.position.y() - recon(i)) <= 1e-8);
  }
  SUBCASE("zero map gives the zero trajectory") {
    ContextualProMP m;
    for (auto& a : m.affine) a = Eigen::MatrixXd::Zero(20, 2);
    for (const auto& w : predict_contextual(m, 0.4, 10, 1.0).waypoints) CHECK(w.pose.position.norm() == 0.0);
  }
  SUBCASE("degenerate contexts") {
    try {
      train_contextual({{constant_demo(1.0), 0.2}, {constant_demo(2.0), 0.2}});
      FAIL("expected DegenerateContexts");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DegenerateContexts);
    }
  }
}

TEST_CASE("model file round trip") {
  const ProMPModel m = condition(train_promp(noisy_min_jerk_demos(5, 0.01, 1)),
                                 {ViaPoint{0.4, Eigen::Vector3d(0.5, 0.0, 0.3), 1e-6}});
  const auto path = std::filesystem::temp_directory_path() / "pbd_model_roundtrip.json";
  save_model_file(path, m);
  const ProMPModel back = load_model_file(path);
  std::filesystem::remove(path);
  for (int d = 0; d < 3; ++d) {
    const double mean_scale = m.dims[d].mean.cwiseAbs().maxCoeff();
    const double cov_scale = m.dims[d].cov.cwiseAbs().maxCoeff();
    CHECK((back.dims[d].mean - m.dims[d].mean).cwiseAbs().maxCoeff() <= 1e-15 * mean_scale);
    CHECK((back.dims[d].cov - m.dims[d].cov).cwiseAbs().maxCoeff() <= 1e-15 * cov_scale);
  }
  CHECK(back.basis.num_basis == m.basis.num_basis);
  CHECK(back.basis.bandwidth == m.basis.bandwidth);
  CHECK(back.reference_duration == m.reference_duration);
  CHECK(back.orientation.coeffs() == m.orientation.coeffs());
}
