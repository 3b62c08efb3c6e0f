#include "steerkit/states.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

namespace steerkit {

namespace {
constexpr double kQuarterPi = 0.78539816339744830961;
}

FamilyParams::FamilyParams(double p, double theta) : p(p), theta(theta) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParamError("family parameter p must lie in [0,1], got " + std::to_string(p));
  }
  if (!(theta >= 0.0 && theta <= kQuarterPi)) {
    throw ParamError("family parameter theta must lie in [0, pi/4], got " +
                     std::to_string(theta));
  }
}

TwoQubitState make_family_state(const FamilyParams& params) {
  const double c = std::cos(params.theta);
  const double s = std::sin(params.theta);
  Eigen::Vector4cd psi;
  psi << c, 0.0, 0.0, s;
  const Matrix4c projector = psi * psi.adjoint();

  Matrix2c rho_b = Matrix2c::Zero();
  rho_b(0, 0) = c * c;
  rho_b(1, 1) = s * s;

  const Matrix4c noise = kron(0.5 * Matrix2c::Identity(), rho_b);
  return TwoQubitState(params.p * projector + (1.0 - params.p) * noise);
}

TwoQubitState make_werner(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParamError("Werner parameter p must lie in [0,1], got " + std::to_string(p));
  }
  Eigen::Vector4cd phi;
  phi << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  const Matrix4c projector = phi * phi.adjoint();
  return TwoQubitState(p * projector + (1.0 - p) * 0.25 * Matrix4c::Identity());
}

void save_state(const TwoQubitState& state, const std::filesystem::path& path,
                const std::optional<FamilyParams>& meta) {
  nlohmann::json j;
  j["dim"] = {4, 4};
  auto rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    auto row = nlohmann::json::array();
    for (int k = 0; k < 4; ++k) {
      const auto& e = state.matrix()(i, k);
      row.push_back({e.real(), e.imag()});
    }
    rows.push_back(row);
  }
  j["matrix"] = rows;
  if (meta) j["meta"] = {{"p", meta->p}, {"theta", meta->theta}};

  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

TwoQubitState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open state file " + path.string());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("state file " + path.string() + ": " + e.what());
  }

  if (!j.contains("dim") || !j["dim"].is_array() || j["dim"] != nlohmann::json({4, 4})) {
    throw ParseError("state file " + path.string() + ": field \"dim\" must be [4,4]");
  }
  if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].size() != 4) {
    throw ParseError("state file " + path.string() +
                     ": field \"matrix\" must be a 4x4 array");
  }

  Matrix4c m;
  for (int i = 0; i < 4; ++i) {
    const auto& row = j["matrix"][i];
    if (!row.is_array() || row.size() != 4) {
      throw ParseError("state file " + path.string() + ": matrix[" +
                       std::to_string(i) + "] must have 4 entries");
    }
    for (int k = 0; k < 4; ++k) {
      const auto& e = row[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ParseError("state file " + path.string() + ": matrix[" +
                         std::to_string(i) + "][" + std::to_string(k) +
                         "] must be [re, im]");
      }
      m(i, k) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
  }

  return TwoQubitState(m);  // throws ValidationError on a non-physical matrix
}

}  // namespace steerkit
