// core/src/metrics.cc

// Copyright 2026  msdgp authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "msdgp/metrics.h"

#include <cmath>

#include "msdgp/error.h"

namespace msdgp {

double mcd_db(const Tensor &reference, const Tensor &predicted) {
  if (!shapes_equal(reference.shape(), predicted.shape()) ||
      reference.rank() != 2)
    throw ShapeMismatch("mcd wants equal frames x C inputs");
  int64_t frames = reference.dim(0), c = reference.dim(1);
  if (c < 2) throw ShapeMismatch("mcd wants C >= 2 coefficients");
  if (frames == 0) return 0.0;
  const double scale = 10.0 / std::log(10.0);
  double total = 0.0;
  for (int64_t t = 0; t < frames; ++t) {
    double sq = 0.0;
    for (int64_t d = 1; d < c; ++d) {
      double diff = reference.at({t, d}) - predicted.at({t, d});
      sq += diff * diff;
    }
    total += scale * std::sqrt(2.0 * sq);
  }
  return total / static_cast<double>(frames);
}

F0Result f0_rmse_cents(const std::vector<double> &reference_hz,
                       const std::vector<double> &predicted_hz,
                       const std::vector<bool> &reference_voiced,
                       const std::vector<bool> &predicted_voiced) {
  if (reference_hz.size() != predicted_hz.size() ||
      reference_hz.size() != reference_voiced.size() ||
      reference_hz.size() != predicted_voiced.size())
    throw ShapeMismatch("f0_rmse_cents length mismatch");
  double sq = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < reference_hz.size(); ++i) {
    if (!reference_voiced[i] || !predicted_voiced[i]) continue;
    double f = reference_hz[i], f_hat = predicted_hz[i];
    if (!(f > 0.0) || !(f_hat > 0.0))
      throw NonPositiveF0("frame " + std::to_string(i));
    double cents = 1200.0 * std::log2(f / f_hat);
    sq += cents * cents;
    ++count;
  }
  F0Result result;
  if (count == 0) {
    result.empty_intersection = true;
    return result;
  }
  result.rmse_cents = std::sqrt(sq / static_cast<double>(count));
  return result;
}

F0Result f0_rmse_cents(const std::vector<double> &reference_hz,
                       const std::vector<double> &predicted_hz,
                       const std::vector<bool> &voiced_mask) {
  return f0_rmse_cents(reference_hz, predicted_hz, voiced_mask, voiced_mask);
}

double dur_rmse(const std::vector<double> &reference_ms,
                const std::vector<double> &predicted_ms) {
  if (reference_ms.size() != predicted_ms.size())
    throw ShapeMismatch("dur_rmse length mismatch");
  if (reference_ms.empty()) return 0.0;
  double sq = 0.0;
  for (size_t i = 0; i < reference_ms.size(); ++i) {
    double diff = reference_ms[i] - predicted_ms[i];
    sq += diff * diff;
  }
  return std::sqrt(sq / static_cast<double>(reference_ms.size()));
}

}  // namespace msdgp
