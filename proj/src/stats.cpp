#include "steerkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "steerkit/errors.hpp"
#include "steerkit/lhsm.hpp"
#include "steerkit/rng.hpp"

namespace steerkit {
namespace {

constexpr const char* kBasisNames = "xyz";

MeasurementSetting basis_setting(int basis) {
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();
  axis[basis] = 1.0;
  return MeasurementSetting(axis);
}

/// Joint probability of (measuring outcome a, steered outcome sign) given
/// the (setting, basis) pair, as trace of the conditional against the
/// tomography effect. Clamped at zero against rounding.
double joint_probability(const Assemblage& assemblage, int setting, int a,
                         const MeasurementSetting& basis, int sign_index) {
  const Matrix2c& conditional = assemblage.member(setting, a).matrix;
  const double p = (conditional * effect(sign_index, basis)).trace().real();
  return std::max(p, 0.0);
}

CountRecord make_record(const TwoQubitState& rho,
                        const std::vector<MeasurementSetting>& settings,
                        Direction direction, double mean_total_counts,
                        const CounterRng* root) {
  if (settings.empty()) throw ParamError("count simulation needs at least one setting");
  if (!std::isfinite(mean_total_counts) || mean_total_counts < 100.0)
    throw ParamError("mean_total_counts must be >= 100");

  const Assemblage assemblage = build_assemblage(rho, settings, direction);
  const int k = static_cast<int>(settings.size());
  const double block_mean = mean_total_counts / (3.0 * k);

  CountRecord record;
  record.settings = settings;
  record.direction = direction;
  record.counts.assign(static_cast<std::size_t>(12 * k), 0.0);

  for (int b = 0; b < 3; ++b) {
    const MeasurementSetting basis = basis_setting(b);
    for (int j = 0; j < k; ++j) {
      for (int a = 0; a < 2; ++a) {
        for (int sign = 0; sign < 2; ++sign) {
          const double mean =
              block_mean * joint_probability(assemblage, j, a, basis, sign);
          const int cell = record.cell(j, a, b, sign);
          record.counts[static_cast<std::size_t>(cell)] =
              root ? root->derive(static_cast<std::uint64_t>(cell)).next_poisson(mean)
                   : mean;
        }
      }
    }
  }
  return record;
}

}  // namespace

double CountRecord::total() const {
  double sum = 0.0;
  for (double c : counts) sum += c;
  return sum;
}

CountRecord simulate_counts(const TwoQubitState& rho,
                            const std::vector<MeasurementSetting>& settings,
                            Direction direction, double mean_total_counts,
                            std::uint64_t seed) {
  // Tagged substream keeps cell streams disjoint from bootstrap resampling
  // streams when both are driven by the same user seed.
  const CounterRng root = CounterRng(seed).derive(0x73696dULL);
  return make_record(rho, settings, direction, mean_total_counts, &root);
}

CountRecord expected_counts(const TwoQubitState& rho,
                            const std::vector<MeasurementSetting>& settings,
                            Direction direction, double mean_total_counts) {
  return make_record(rho, settings, direction, mean_total_counts, nullptr);
}

Assemblage reconstruct_assemblage(const CountRecord& counts) {
  const int k = counts.setting_count();
  if (k < 1) throw ParamError("count record has no settings");
  if (counts.counts.size() != static_cast<std::size_t>(12 * k))
    throw ParamError("count record cell array has the wrong size");

  Assemblage out;
  out.settings = counts.settings;
  out.members.resize(static_cast<std::size_t>(2 * k));

  const Matrix2c identity = Matrix2c::Identity();
  for (int j = 0; j < k; ++j) {
    double block_total[3];
    for (int b = 0; b < 3; ++b) {
      block_total[b] = counts.at(j, 0, b, 0) + counts.at(j, 0, b, 1) +
                       counts.at(j, 1, b, 0) + counts.at(j, 1, b, 1);
      if (block_total[b] <= 0.0)
        throw InsufficientData("no counts for setting " + std::to_string(j) +
                               ", basis " + std::string(1, kBasisNames[b]));
    }
    for (int a = 0; a < 2; ++a) {
      double q = 0.0;
      Eigen::Vector3d w;
      for (int b = 0; b < 3; ++b) {
        q += (counts.at(j, a, b, 0) + counts.at(j, a, b, 1)) / block_total[b];
        w[b] = (counts.at(j, a, b, 0) - counts.at(j, a, b, 1)) / block_total[b];
      }
      q /= 3.0;
      Matrix2c matrix = 0.5 * q * identity;
      for (int b = 0; b < 3; ++b) matrix += 0.5 * w[b] * pauli(b);
      out.members[static_cast<std::size_t>(2 * j + a)] = {j, a, matrix};
    }
  }

  // No-signalling symmetrization: members of each setting are shifted by
  // half their gap to the settings-averaged reduced state.
  Matrix2c reduced = Matrix2c::Zero();
  for (int j = 0; j < k; ++j)
    reduced += out.member(j, 0).matrix + out.member(j, 1).matrix;
  reduced /= static_cast<double>(k);
  for (int j = 0; j < k; ++j) {
    const Matrix2c gap =
        reduced - out.member(j, 0).matrix - out.member(j, 1).matrix;
    out.members[static_cast<std::size_t>(2 * j)].matrix += 0.5 * gap;
    out.members[static_cast<std::size_t>(2 * j + 1)].matrix += 0.5 * gap;
  }
  out.reduced = reduced;
  return out;
}

BootstrapSummary bootstrap_radius(const CountRecord& counts, int k,
                                  Direction direction, int resamples,
                                  std::uint64_t seed) {
  if (k != counts.setting_count())
    throw ParamError("bootstrap k does not match the count record");
  if (direction != counts.direction)
    throw ParamError("bootstrap direction does not match the count record");
  if (resamples < 10) throw ParamError("bootstrap needs at least 10 resamples");

  const CounterRng root = CounterRng(seed).derive(0x626f6f74ULL);
  LhsmSolver solver(reconstruct_assemblage(counts));

  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(resamples));
  CountRecord resampled = counts;
  for (int i = 0; i < resamples; ++i) {
    CounterRng rng = root.derive(static_cast<std::uint64_t>(i));
    for (std::size_t c = 0; c < counts.counts.size(); ++c)
      resampled.counts[c] = rng.next_poisson(counts.counts[c]);
    solver.retarget(reconstruct_assemblage(resampled));
    radii.push_back(solver.min_max_radius(1e-5).r);
  }

  // Aggregate over a sorted buffer so the summary is independent of any
  // future parallel resampling order.
  std::sort(radii.begin(), radii.end());
  double mean = 0.0;
  for (double r : radii) mean += r;
  mean /= static_cast<double>(resamples);
  double var = 0.0;
  for (double r : radii) var += (r - mean) * (r - mean);
  var /= static_cast<double>(resamples - 1);

  BootstrapSummary summary;
  summary.mean_r = mean;
  summary.std_r = std::sqrt(var);
  summary.resamples = resamples;
  summary.seed = seed;
  return summary;
}

void save_counts(const CountRecord& counts, const std::string& path) {
  const int k = counts.setting_count();
  if (k < 1) throw ParamError("count record has no settings");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");

  char buf[160];
  out << "# steerkit counts v1\n";
  out << "# direction: "
      << (counts.direction == Direction::AliceToBob ? "ab" : "ba") << "\n";
  for (int j = 0; j < k; ++j) {
    const Eigen::Vector3d& axis = counts.settings[static_cast<std::size_t>(j)].axis;
    std::snprintf(buf, sizeof(buf), "# setting %d: %.17g %.17g %.17g\n", j,
                  axis.x(), axis.y(), axis.z());
    out << buf;
  }
  out << "setting_index,a,basis,bob_outcome,count\n";
  for (int j = 0; j < k; ++j) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (int sign = 0; sign < 2; ++sign) {
          std::snprintf(buf, sizeof(buf), "%d,%d,%c,%s,%.17g\n", j, a,
                        kBasisNames[b], sign == 0 ? "1" : "-1",
                        counts.at(j, a, b, sign));
          out << buf;
        }
      }
    }
  }
  if (!out.good()) throw ParseError("failed to write '" + path + "'");
}

CountRecord load_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  CountRecord record;
  std::vector<Eigen::Vector3d> axes;
  bool saw_header = false;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      std::istringstream comment(line.substr(1));
      std::string word;
      comment >> word;
      if (word == "direction:") {
        std::string dir;
        comment >> dir;
        if (dir == "ab") record.direction = Direction::AliceToBob;
        else if (dir == "ba") record.direction = Direction::BobToAlice;
        else throw ParseError(where + ": direction must be ab or ba");
      } else if (word == "setting") {
        int index = 0;
        char colon = 0;
        Eigen::Vector3d axis;
        if (!(comment >> index >> colon >> axis.x() >> axis.y() >> axis.z()) ||
            colon != ':')
          throw ParseError(where + ": malformed setting comment");
        if (index != static_cast<int>(axes.size()))
          throw ParseError(where + ": settings must appear in order 0,1,...");
        axes.push_back(axis);
      }
      continue;
    }
    if (!saw_header) {
      if (line != "setting_index,a,basis,bob_outcome,count")
        throw ParseError(where + ": unexpected header '" + line + "'");
      saw_header = true;
      if (axes.empty())
        throw ParseError(path + ": no '# setting' comments before the header");
      record.settings.reserve(axes.size());
      for (const auto& axis : axes) record.settings.emplace_back(axis);
      record.counts.assign(axes.size() * 12, 0.0);
      continue;
    }

    std::istringstream row(line);
    std::string field[5];
    for (int f = 0; f < 5; ++f)
      if (!std::getline(row, field[f], f < 4 ? ',' : '\n'))
        throw ParseError(where + ": expected 5 comma-separated fields");
    int j = 0, a = 0;
    double count = 0.0;
    try {
      j = std::stoi(field[0]);
      a = std::stoi(field[1]);
      count = std::stod(field[4]);
    } catch (const std::exception&) {
      throw ParseError(where + ": non-numeric field");
    }
    if (j < 0 || j >= record.setting_count())
      throw ParseError(where + ": setting_index out of range");
    if (a != 0 && a != 1) throw ParseError(where + ": a must be 0 or 1");
    if (field[2].size() != 1) throw ParseError(where + ": bad basis");
    const char* basis_pos = std::strchr(kBasisNames, field[2][0]);
    if (!basis_pos) throw ParseError(where + ": basis must be x, y, or z");
    int sign;
    if (field[3] == "1" || field[3] == "+1") sign = 0;
    else if (field[3] == "-1") sign = 1;
    else throw ParseError(where + ": bob_outcome must be 1 or -1");
    if (!(count >= 0.0) || !std::isfinite(count))
      throw ParseError(where + ": count must be finite and nonnegative");
    record.at(j, a, static_cast<int>(basis_pos - kBasisNames), sign) += count;
  }
  if (!saw_header) throw ParseError(path + ": missing header row");
  return record;
}

}  // namespace steerkit
