// core/include/msdgp/metrics.h

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

#ifndef MSDGP_METRICS_H_
#define MSDGP_METRICS_H_

#include <vector>

#include "msdgp/tensor.h"

namespace msdgp {

// Mel-cepstral distance in dB between frame sequences (frames x C):
// (10/ln 10) * sqrt(2 * sum_{d=1}^{C-1} (c_d - c_hat_d)^2) averaged over
// frames; the 0th coefficient is excluded.
double mcd_db(const Tensor &reference, const Tensor &predicted);

struct F0Result {
  double rmse_cents = 0.0;
  // Set when no frame is voiced in both sequences; the value is then 0.
  bool empty_intersection = false;
};

// RMSE of 1200*log2(f/f_hat) over frames voiced in both sequences. Throws
// NonPositiveF0 if a counted frame has a non-positive frequency.
F0Result f0_rmse_cents(const std::vector<double> &reference_hz,
                       const std::vector<double> &predicted_hz,
                       const std::vector<bool> &reference_voiced,
                       const std::vector<bool> &predicted_voiced);
// Single shared voicing mask.
F0Result f0_rmse_cents(const std::vector<double> &reference_hz,
                       const std::vector<double> &predicted_hz,
                       const std::vector<bool> &voiced_mask);

// Plain RMSE, in milliseconds.
double dur_rmse(const std::vector<double> &reference_ms,
                const std::vector<double> &predicted_ms);

}  // namespace msdgp

#endif  // MSDGP_METRICS_H_
