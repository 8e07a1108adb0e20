#include <nlohmann/json.hpp>

#include "pbd/json_io.hpp"
#include "pbd/promp.hpp"

namespace pbd {

using nlohmann::json;
namespace jio = json_io;

namespace {

constexpr std::array<const char*, kModeledDims> kDimNames{"x", "y", "z"};

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field, std::size_t n) {
  jio::array(j, field, n);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = jio::number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace

json model_to_json(const ProMPModel& model) {
  json dims = json::object();
  for (int d = 0; d < kModeledDims; ++d) {
    const auto& dist = model.dims[static_cast<std::size_t>(d)];
    json cov = json::array();
    for (Eigen::Index r = 0; r < dist.cov.rows(); ++r) {
      for (Eigen::Index c = 0; c < dist.cov.cols(); ++c) cov.push_back(dist.cov(r, c));
    }
    dims[kDimNames[static_cast<std::size_t>(d)]] = {{"mean", vector_to_json(dist.mean)}, {"cov", cov}};
  }
  const auto& b = model.basis;
  return json{{"basis",
               {{"num_basis", b.num_basis},
                {"bandwidth", b.bandwidth},
                {"ridge", b.ridge},
                {"noise", b.noise},
                {"covariance_reg", b.covariance_reg}}},
              {"orientation", jio::to_json(model.orientation)},
              {"reference_duration", model.reference_duration},
              {"dims", dims}};
}

ProMPModel model_from_json(const json& doc) {
  ProMPModel model;
  const json& basis = jio::require(doc, "basis", "");
  const json& k = jio::require(basis, "num_basis", "basis");
  if (!k.is_number_integer() || k.get<int>() < 1) jio::fail("basis.num_basis", "expected positive integer");
  model.basis.num_basis = k.get<int>();
  model.basis.bandwidth = jio::number(basis, "bandwidth", "basis");
  model.basis.ridge = jio::number(basis, "ridge", "basis");
  model.basis.noise = jio::number(basis, "noise", "basis");
  model.basis.covariance_reg = jio::number(basis, "covariance_reg", "basis");
  try {
    validate(model.basis);
  } catch (const Error& e) {
    jio::fail("basis", e.what());
  }
  model.orientation = jio::quat(jio::require(doc, "orientation", ""), "orientation");
  model.reference_duration = jio::number(doc, "reference_duration", "");
  if (!(model.reference_duration > 0.0)) jio::fail("reference_duration", "must be positive");

  const auto n = static_cast<std::size_t>(model.basis.num_basis);
  const json& dims = jio::require(doc, "dims", "");
  for (int d = 0; d < kModeledDims; ++d) {
    const std::string name = kDimNames[static_cast<std::size_t>(d)];
    const std::string ctx = "dims." + name;
    const json& dim = jio::require(dims, name, "dims");
    auto& dist = model.dims[static_cast<std::size_t>(d)];
    dist.mean = vector_from_json(jio::require(dim, "mean", ctx), ctx + ".mean", n);
    const Eigen::VectorXd flat = vector_from_json(jio::require(dim, "cov", ctx), ctx + ".cov", n * n);
    dist.cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  }
  return model;
}

void save_model_file(const std::filesystem::path& path, const ProMPModel& model) {
  jio::write_file(path, model_to_json(model));
}

ProMPModel load_model_file(const std::filesystem::path& path) {
  return model_from_json(jio::read_file(path));
}

}  // namespace pbd
