// core/include/msdgp/latent_export.h

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

#ifndef MSDGP_LATENT_EXPORT_H_
#define MSDGP_LATENT_EXPORT_H_

#include <string>
#include <vector>

#include "msdgp/dgp_model.h"

namespace msdgp {

// Exports the learned speaker embedding (first two dims of mu_k with the
// matching standard deviations) as a CSV
// (speaker_id,group,mu0,mu1,sigma0,sigma1) and an SVG 1.1 scatter with
// group coloring, one marker per speaker, deterministic layout. Throws
// WrongModelKind unless the model is in latent mode. `groups` may be empty
// (all zero) or one entry per speaker.
void export_latents(const DgpModel &model, const std::vector<int64_t> &groups,
                    const std::string &out_csv, const std::string &out_svg);

}  // namespace msdgp

#endif  // MSDGP_LATENT_EXPORT_H_
