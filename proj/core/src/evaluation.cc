// core/src/evaluation.cc

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

#include "msdgp/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "msdgp/error.h"
#include "msdgp/io_util.h"
#include "msdgp/metrics.h"
#include "msdgp/tensor_ops.h"

namespace msdgp {

using nlohmann::json;

namespace {

constexpr double kFrameMs = 5.0;

SpeakerMetrics speaker_metrics(const Corpus &corpus, const Tensor &y_ref,
                               const Tensor &y_pred,
                               const std::vector<int64_t> &utterances,
                               const std::vector<int64_t> &rows) {
  int64_t d_y = corpus.spec.output_dim;
  int64_t c = d_y - 2;           // mel-cepstra block
  int64_t f0_dim = d_y - 2;
  int64_t voiced_dim = d_y - 1;
  SpeakerMetrics out;
  out.n_frames = static_cast<int64_t>(rows.size());

  Tensor ref_cep = ops::slice(ops::take_rows(y_ref, rows), {0, 0},
                              {out.n_frames, c});
  Tensor pred_cep = ops::slice(ops::take_rows(y_pred, rows), {0, 0},
                               {out.n_frames, c});
  out.mcd_db = mcd_db(ref_cep, pred_cep);

  std::vector<double> ref_hz, pred_hz;
  std::vector<bool> ref_voiced, pred_voiced;
  std::map<int64_t, std::pair<double, double>> voiced_ms;  // utterance -> (ref, pred)
  for (int64_t r : rows) {
    double rv = y_ref.at({r, voiced_dim});
    double pv = y_pred.at({r, voiced_dim});
    bool rvoiced = rv > 0.5, pvoiced = pv > 0.5;
    ref_hz.push_back(std::exp(y_ref.at({r, f0_dim})));
    pred_hz.push_back(std::exp(y_pred.at({r, f0_dim})));
    ref_voiced.push_back(rvoiced);
    pred_voiced.push_back(pvoiced);
    int64_t utt = utterances[static_cast<size_t>(r)];
    auto &entry = voiced_ms[utt];
    if (rvoiced) entry.first += kFrameMs;
    if (pvoiced) entry.second += kFrameMs;
  }
  F0Result f0 = f0_rmse_cents(ref_hz, pred_hz, ref_voiced, pred_voiced);
  out.f0_rmse_cent = f0.rmse_cents;
  out.f0_empty_intersection = f0.empty_intersection;

  std::vector<double> dur_ref, dur_pred;
  for (const auto &[utt, ms] : voiced_ms) {
    (void)utt;
    dur_ref.push_back(ms.first);
    dur_pred.push_back(ms.second);
  }
  out.dur_rmse_ms = dur_rmse(dur_ref, dur_pred);

  out.rmse_per_dim.assign(static_cast<size_t>(d_y), 0.0);
  for (int64_t r : rows) {
    for (int64_t d = 0; d < d_y; ++d) {
      double diff = y_ref.at({r, d}) - y_pred.at({r, d});
      out.rmse_per_dim[static_cast<size_t>(d)] += diff * diff;
    }
  }
  for (double &v : out.rmse_per_dim)
    v = std::sqrt(v / static_cast<double>(std::max<int64_t>(out.n_frames, 1)));
  return out;
}

std::string format_mcd(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return std::string(buf);
}

std::string format_f0(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0f", v);
  return std::string(buf);
}

std::string format_dur(double v) { return format_fixed(v, 1); }

int model_rank(const std::string &label) {
  if (label.rfind("dnn", 0) == 0 || label.rfind("DNN", 0) == 0) return 0;
  if (label.rfind("dgplvm", 0) == 0 || label.rfind("DGPLVM", 0) == 0) return 2;
  if (label.rfind("dgp", 0) == 0 || label.rfind("DGP", 0) == 0) return 1;
  return 3;
}

}  // namespace

Report evaluate_model(const AnyModel &model, const Corpus &corpus,
                      const std::string &split_name) {
  if (!corpus.normalized) throw InvalidSpec("evaluate needs a normalized corpus");
  FrameDataset ds = split_dataset(corpus, split_name);
  if (ds.speakers.empty())
    throw InsufficientData("split '" + split_name + "' has no frames");
  Tensor pred_norm = model.predict(ds.x, ds.speakers);
  Tensor y_ref = denormalize_outputs(corpus, ds.y);
  Tensor y_pred = denormalize_outputs(corpus, pred_norm);

  // Row utterance labels are positional within the dataset here.
  std::vector<int64_t> row_utt = ds.utterances;
  std::set<int64_t> speaker_set(ds.speakers.begin(), ds.speakers.end());

  Report report;
  report.model_id = model.id();
  report.label = model.kind;
  report.corpus_id = corpus.id;
  report.split = split_name;
  report.situation = split_kind_name(corpus.split_kind);
  for (int64_t speaker : speaker_set) {
    std::vector<int64_t> rows;
    for (size_t i = 0; i < ds.speakers.size(); ++i)
      if (ds.speakers[i] == speaker) rows.push_back(static_cast<int64_t>(i));
    SpeakerMetrics sm = speaker_metrics(corpus, y_ref, y_pred, row_utt, rows);
    sm.speaker = speaker;
    report.per_speaker.push_back(std::move(sm));
  }
  // Frame-weighted aggregate.
  SpeakerMetrics agg;
  agg.speaker = -1;
  agg.rmse_per_dim.assign(static_cast<size_t>(corpus.spec.output_dim), 0.0);
  int64_t total = 0;
  for (const SpeakerMetrics &sm : report.per_speaker) total += sm.n_frames;
  for (const SpeakerMetrics &sm : report.per_speaker) {
    double w = static_cast<double>(sm.n_frames) / static_cast<double>(total);
    agg.n_frames += sm.n_frames;
    agg.mcd_db += w * sm.mcd_db;
    agg.f0_rmse_cent += w * sm.f0_rmse_cent;
    agg.dur_rmse_ms += w * sm.dur_rmse_ms;
    for (size_t d = 0; d < agg.rmse_per_dim.size(); ++d)
      agg.rmse_per_dim[d] += w * sm.rmse_per_dim[d];
    agg.f0_empty_intersection =
        agg.f0_empty_intersection || sm.f0_empty_intersection;
  }
  report.aggregate = agg;
  return report;
}

namespace {

json metrics_to_json(const SpeakerMetrics &m) {
  json j{{"speaker", m.speaker},
         {"n_frames", m.n_frames},
         {"mcd_db", m.mcd_db},
         {"f0_rmse_cent", m.f0_rmse_cent},
         {"dur_rmse_ms", m.dur_rmse_ms},
         {"rmse_per_dim", m.rmse_per_dim}};
  if (m.f0_empty_intersection) j["f0_empty_intersection"] = true;
  return j;
}

SpeakerMetrics metrics_from_json(const json &j) {
  SpeakerMetrics m;
  m.speaker = j.at("speaker").get<int64_t>();
  m.n_frames = j.at("n_frames").get<int64_t>();
  m.mcd_db = j.at("mcd_db").get<double>();
  m.f0_rmse_cent = j.at("f0_rmse_cent").get<double>();
  m.dur_rmse_ms = j.at("dur_rmse_ms").get<double>();
  m.rmse_per_dim = j.at("rmse_per_dim").get<std::vector<double>>();
  m.f0_empty_intersection = j.value("f0_empty_intersection", false);
  return m;
}

}  // namespace

json report_to_json(const Report &report) {
  json per_speaker = json::array();
  for (const SpeakerMetrics &m : report.per_speaker)
    per_speaker.push_back(metrics_to_json(m));
  return json{{"model", report.model_id},
              {"label", report.label},
              {"corpus", report.corpus_id},
              {"split", report.split},
              {"situation", report.situation},
              {"per_speaker", per_speaker},
              {"aggregate", metrics_to_json(report.aggregate)}};
}

Report report_from_json(const json &j) {
  Report report;
  report.model_id = j.at("model").get<std::string>();
  report.label = j.at("label").get<std::string>();
  report.corpus_id = j.at("corpus").get<std::string>();
  report.split = j.at("split").get<std::string>();
  report.situation = j.at("situation").get<std::string>();
  for (const auto &m : j.at("per_speaker"))
    report.per_speaker.push_back(metrics_from_json(m));
  report.aggregate = metrics_from_json(j.at("aggregate"));
  return report;
}

void save_report(const Report &report, const std::string &path) {
  write_file(path, report_to_json(report).dump(2) + "\n");
}

Report load_report(const std::string &path) {
  return report_from_json(json::parse(read_file(path)));
}

std::string render_table(const std::vector<Report> &reports) {
  if (reports.empty()) throw InvalidConfig("render_table needs reports");
  std::vector<std::string> situations;
  for (const Report &r : reports)
    if (std::find(situations.begin(), situations.end(), r.situation) ==
        situations.end())
      situations.push_back(r.situation);
  std::sort(situations.begin(), situations.end());

  std::vector<std::string> labels;
  for (const Report &r : reports)
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end())
      labels.push_back(r.label);
  std::sort(labels.begin(), labels.end(), [](const auto &a, const auto &b) {
    int ra = model_rank(a), rb = model_rank(b);
    return ra != rb ? ra < rb : a < b;
  });

  auto find_report = [&](const std::string &label,
                         const std::string &situation) -> const Report * {
    for (const Report &r : reports)
      if (r.label == label && r.situation == situation) return &r;
    return nullptr;
  };

  // Best (minimum) per column among present values.
  struct Col {
    std::string situation;
    int metric;  // 0 mcd, 1 f0, 2 dur
  };
  std::vector<Col> cols;
  for (const std::string &s : situations)
    for (int m = 0; m < 3; ++m) cols.push_back({s, m});
  auto metric_of = [](const Report &r, int m) {
    return m == 0 ? r.aggregate.mcd_db
                  : (m == 1 ? r.aggregate.f0_rmse_cent : r.aggregate.dur_rmse_ms);
  };
  std::vector<double> best(cols.size(), std::numeric_limits<double>::infinity());
  for (size_t c = 0; c < cols.size(); ++c)
    for (const std::string &label : labels)
      if (const Report *r = find_report(label, cols[c].situation))
        best[c] = std::min(best[c], metric_of(*r, cols[c].metric));

  static const char *kMetricNames[3] = {"MCD [dB]", "F0 [cent]", "DUR [ms]"};
  std::ostringstream md;
  md << "| Method |";
  for (const Col &c : cols) md << " " << c.situation << " " << kMetricNames[c.metric] << " |";
  md << "\n|---|";
  for (size_t c = 0; c < cols.size(); ++c) md << "---|";
  md << "\n";
  for (const std::string &label : labels) {
    md << "| " << label << " |";
    for (size_t c = 0; c < cols.size(); ++c) {
      const Report *r = find_report(label, cols[c].situation);
      if (r == nullptr) {
        md << " - |";
        continue;
      }
      double v = metric_of(*r, cols[c].metric);
      std::string text = cols[c].metric == 0
                             ? format_mcd(v)
                             : (cols[c].metric == 1 ? format_f0(v) : format_dur(v));
      if (v == best[c]) text = "**" + text + "**";
      md << " " << text << " |";
    }
    md << "\n";
  }
  return md.str();
}

}  // namespace msdgp
