// core/src/log.cc

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

#include "msdgp/log.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace msdgp {

LogLevel log_level() {
  static LogLevel level = [] {
    const char *env = std::getenv("DGP_LOG");
    if (env == nullptr) return LogLevel::kInfo;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    return LogLevel::kInfo;
  }();
  return level;
}

void log_message(LogLevel level, const std::string &msg) {
  const char *tag = level == LogLevel::kError
                        ? "E"
                        : (level == LogLevel::kDebug ? "D" : "I");
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace msdgp
