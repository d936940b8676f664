// core/include/msdgp/evaluation.h

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

#ifndef MSDGP_EVALUATION_H_
#define MSDGP_EVALUATION_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "msdgp/checkpoint.h"
#include "msdgp/corpus.h"

namespace msdgp {

struct SpeakerMetrics {
  int64_t speaker = -1;  // -1 for the aggregate row
  int64_t n_frames = 0;
  double mcd_db = 0.0;
  double f0_rmse_cent = 0.0;
  double dur_rmse_ms = 0.0;
  std::vector<double> rmse_per_dim;
  bool f0_empty_intersection = false;
};

// Objective evaluation of one model on one corpus split. Output dims map by
// convention: dims 0..D_y-3 are scored as mel-cepstra, dim D_y-2 as log-f0
// (exponentiated to Hz), dim D_y-1 thresholded at 0.5 as the voiced flag.
// The duration analog is per-utterance voiced duration (voiced frames x
// 5 ms). The aggregate row is the frame-weighted mean of per-speaker values.
struct Report {
  std::string model_id;
  std::string label;      // human row label for tables
  std::string corpus_id;
  std::string split;
  std::string situation;  // column group for tables (split kind by default)
  std::vector<SpeakerMetrics> per_speaker;
  SpeakerMetrics aggregate;
};

Report evaluate_model(const AnyModel &model, const Corpus &corpus,
                      const std::string &split_name);

nlohmann::json report_to_json(const Report &report);
Report report_from_json(const nlohmann::json &j);
void save_report(const Report &report, const std::string &path);
Report load_report(const std::string &path);

// Markdown comparison table: one row per model label, one column block per
// situation (MCD dB to 3 significant digits, F0 cents as integers, DUR ms to
// one decimal); the best value per column is bolded. Byte-identical output
// for identical reports.
std::string render_table(const std::vector<Report> &reports);

}  // namespace msdgp

#endif  // MSDGP_EVALUATION_H_
