// core/src/latent_export.cc

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

#include "msdgp/latent_export.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msdgp/error.h"
#include "msdgp/io_util.h"

namespace msdgp {

namespace {

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;
constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 40.0;

}  // namespace

void export_latents(const DgpModel &model, const std::vector<int64_t> &groups,
                    const std::string &out_csv, const std::string &out_svg) {
  if (model.conditioning.mode != ConditioningMode::kLatent ||
      !model.speaker_latent.has_value())
    throw WrongModelKind("export_latents wants a latent-mode model");
  const SpeakerLatent &latent = *model.speaker_latent;
  int64_t k = latent.mu.dim(0);
  int64_t q = latent.mu.dim(1);
  if (!groups.empty() && static_cast<int64_t>(groups.size()) != k)
    throw ShapeMismatch("groups length vs speakers");
  auto group_of = [&](int64_t i) {
    return groups.empty() ? 0 : groups[static_cast<size_t>(i)];
  };
  auto mu_at = [&](int64_t i, int64_t d) {
    return d < q ? latent.mu.at({i, d}) : 0.0;
  };
  auto sigma_at = [&](int64_t i, int64_t d) {
    return d < q ? std::exp(0.5 * latent.log_var.at({i, d})) : 0.0;
  };

  std::ostringstream csv;
  csv << "speaker_id,group,mu0,mu1,sigma0,sigma1\n";
  for (int64_t i = 0; i < k; ++i) {
    csv << i << "," << group_of(i) << "," << format_double(mu_at(i, 0)) << ","
        << format_double(mu_at(i, 1)) << "," << format_double(sigma_at(i, 0))
        << "," << format_double(sigma_at(i, 1)) << "\n";
  }
  write_file(out_csv, csv.str());

  double lo0 = 0.0, hi0 = 0.0, lo1 = 0.0, hi1 = 0.0;
  for (int64_t i = 0; i < k; ++i) {
    lo0 = std::min(lo0, mu_at(i, 0));
    hi0 = std::max(hi0, mu_at(i, 0));
    lo1 = std::min(lo1, mu_at(i, 1));
    hi1 = std::max(hi1, mu_at(i, 1));
  }
  auto pad = [](double &lo, double &hi) {
    double span = hi - lo;
    if (span <= 0.0) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      lo -= 0.1 * span;
      hi += 0.1 * span;
    }
  };
  pad(lo0, hi0);
  pad(lo1, hi1);
  auto sx = [&](double v) {
    return kMargin + (v - lo0) / (hi0 - lo0) * (kWidth - 2 * kMargin);
  };
  auto sy = [&](double v) {
    return kHeight - kMargin - (v - lo1) / (hi1 - lo1) * (kHeight - 2 * kMargin);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << format_fixed(kWidth, 0) << "\" height=\"" << format_fixed(kHeight, 0)
      << "\" viewBox=\"0 0 " << format_fixed(kWidth, 0) << " "
      << format_fixed(kHeight, 0) << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << format_fixed(kWidth, 0)
      << "\" height=\"" << format_fixed(kHeight, 0) << "\" fill=\"white\"/>\n"
      << "  <rect x=\"" << format_fixed(kMargin, 1) << "\" y=\""
      << format_fixed(kMargin, 1) << "\" width=\""
      << format_fixed(kWidth - 2 * kMargin, 1) << "\" height=\""
      << format_fixed(kHeight - 2 * kMargin, 1)
      << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  for (int64_t i = 0; i < k; ++i) {
    const char *color = kPalette[group_of(i) % kPaletteSize];
    double cx = sx(mu_at(i, 0)), cy = sy(mu_at(i, 1));
    svg << "  <circle cx=\"" << format_fixed(cx, 2) << "\" cy=\""
        << format_fixed(cy, 2) << "\" r=\"4\" fill=\"" << color << "\"/>\n"
        << "  <text x=\"" << format_fixed(cx + 6.0, 2) << "\" y=\""
        << format_fixed(cy + 4.0, 2) << "\" font-size=\"11\" fill=\"" << color
        << "\">" << i << "</text>\n";
  }
  svg << "</svg>\n";
  write_file(out_svg, svg.str());
}

}  // namespace msdgp
