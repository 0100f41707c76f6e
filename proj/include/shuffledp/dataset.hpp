// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLEDP_DATASET_HPP_
#define SHUFFLEDP_DATASET_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "shuffledp/errors.hpp"
#include "shuffledp/query.hpp"
#include "shuffledp/random.hpp"

namespace shuffledp {

enum class DistKind { kUniform, kZipf, kGauss };

inline std::string ToString(DistKind d) {
  switch (d) {
    case DistKind::kUniform:
      return "unif";
    case DistKind::kZipf:
      return "zipf";
    case DistKind::kGauss:
      return "gauss";
  }
  return "?";
}

inline constexpr double kDefaultZipfExponent = 1.5;
inline constexpr std::int64_t kZipfTruncationFactor = 1'000'000;

// Samples k in [1, max_rank] with probability proportional to k^-exponent by
// rejection-inversion (Hormann and Derflinger), O(1) expected per draw.
class ZipfSampler {
 public:
  ZipfSampler(std::int64_t max_rank, double exponent)
      : n_(max_rank), s_(exponent) {
    if (max_rank < 1) throw ParameterError("zipf needs max_rank >= 1");
    if (!(exponent > 1)) throw ParameterError("zipf needs exponent > 1");
    h_x1_ = HIntegral(1.5) - 1.0;
    h_n_ = HIntegral(static_cast<double>(n_) + 0.5);
    cut_ = 2.0 - HIntegralInverse(HIntegral(2.5) - H(2.0));
  }

  std::int64_t operator()(Rng& rng) const {
    while (true) {
      const double u = h_n_ + rng.Uniform() * (h_x1_ - h_n_);
      const double x = HIntegralInverse(u);
      auto k = static_cast<std::int64_t>(x + 0.5);
      k = std::clamp<std::int64_t>(k, 1, n_);
      const double kd = static_cast<double>(k);
      if (kd - x <= cut_ || u >= HIntegral(kd + 0.5) - H(kd)) return k;
    }
  }

 private:
  static double Expm1Ratio(double x) {
    return std::abs(x) > 1e-8 ? std::expm1(x) / x : 1.0 + x / 2.0;
  }
  static double Log1pRatio(double x) {
    return std::abs(x) > 1e-8 ? std::log1p(x) / x : 1.0 - x / 2.0;
  }
  double H(double x) const { return std::exp(-s_ * std::log(x)); }
  double HIntegral(double x) const {
    const double log_x = std::log(x);
    return Expm1Ratio((1.0 - s_) * log_x) * log_x;
  }
  double HIntegralInverse(double x) const {
    double t = x * (1.0 - s_);
    if (t < -1.0) t = -1.0;
    return std::exp(Log1pRatio(t) * x);
  }

  std::int64_t n_;
  double s_;
  double h_x1_ = 0;
  double h_n_ = 0;
  double cut_ = 0;
};

// Synthetic dataset of n values in [0, U]. Zipf ranks are reduced modulo
// U + 1 so that rank 1 lands in bin 0; Gauss draws N(U/5, (U/5)^2), rounds
// and clamps.
inline Dataset GenDataset(DistKind dist, std::int64_t n, std::int64_t domain,
                          std::uint64_t seed,
                          double zipf_exponent = kDefaultZipfExponent) {
  if (n < 0) throw ParameterError("dataset size must be >= 0");
  if (domain < 1) throw ParameterError("domain U must be >= 1");
  Rng rng(seed);
  Dataset d;
  d.values.reserve(static_cast<std::size_t>(n));
  switch (dist) {
    case DistKind::kUniform: {
      std::uniform_int_distribution<std::int64_t> uni(0, domain);
      for (std::int64_t i = 0; i < n; ++i) d.values.push_back(uni(rng));
      break;
    }
    case DistKind::kZipf: {
      const ZipfSampler zipf(kZipfTruncationFactor * domain, zipf_exponent);
      for (std::int64_t i = 0; i < n; ++i)
        d.values.push_back((zipf(rng) - 1) % (domain + 1));
      break;
    }
    case DistKind::kGauss: {
      const double mu = static_cast<double>(domain) / 5.0;
      std::normal_distribution<double> normal(mu, mu);
      for (std::int64_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int64_t>(std::llround(normal(rng)));
        d.values.push_back(std::clamp<std::int64_t>(v, 0, domain));
      }
      break;
    }
  }
  return d;
}

struct CsvLoadResult {
  Dataset data;
  std::int64_t skipped_rows = 0;
  std::vector<std::string> warnings;
};

namespace internal {

// Splits one CSV record, honoring double-quoted fields.
inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else if (c != '\r') {
      cells.back() += c;
    }
  }
  return cells;
}

inline std::optional<double> ParseNumber(const std::string& cell) {
  const auto first = cell.find_first_not_of(" \t");
  if (first == std::string::npos) return std::nullopt;
  const auto last = cell.find_last_not_of(" \t");
  const std::string trimmed = cell.substr(first, last - first + 1);
  char* end = nullptr;
  const double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

inline std::optional<std::size_t> ParseIndex(const std::string& column) {
  if (column.empty() ||
      !std::all_of(column.begin(), column.end(),
                   [](unsigned char c) { return std::isdigit(c); }))
    return std::nullopt;
  return static_cast<std::size_t>(std::stoull(column));
}

}  // namespace internal

// Reads one numeric column (by header name or 0-based index) of a
// comma-separated file. Values are rounded and clamped to [0, cap].
inline CsvLoadResult LoadCsv(const std::string& path, const std::string& column,
                             std::optional<std::int64_t> cap = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  CsvLoadResult result;
  const std::optional<std::size_t> by_index = internal::ParseIndex(column);
  std::optional<std::size_t> col = by_index;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = internal::SplitCsvLine(line);
    if (first) {
      first = false;
      if (!col.has_value()) {
        const auto it = std::find(cells.begin(), cells.end(), column);
        if (it == cells.end())
          throw IoError("column '" + column + "' not found in header of '" +
                        path + "'");
        col = static_cast<std::size_t>(it - cells.begin());
        continue;
      }
      if (*col >= cells.size())
        throw IoError("column '" + column + "' out of range in '" + path +
                      "'");
      if (!internal::ParseNumber(cells[*col]).has_value()) continue;
    }
    if (*col >= cells.size()) {
      ++result.skipped_rows;
      continue;
    }
    const auto v = internal::ParseNumber(cells[*col]);
    if (!v.has_value()) {
      ++result.skipped_rows;
      continue;
    }
    auto x = static_cast<std::int64_t>(std::llround(std::max(0.0, *v)));
    if (cap.has_value()) x = std::min(x, *cap);
    result.data.values.push_back(x);
  }
  if (first) result.warnings.push_back("data file '" + path + "' is empty");
  if (result.skipped_rows > 0)
    result.warnings.push_back("skipped " + std::to_string(result.skipped_rows) +
                              " non-numeric rows in '" + path + "'");
  return result;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_DATASET_HPP_
