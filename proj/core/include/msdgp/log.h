// core/include/msdgp/log.h

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

#ifndef MSDGP_LOG_H_
#define MSDGP_LOG_H_

#include <sstream>
#include <string>

namespace msdgp {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from the DGP_LOG environment variable ({error,info,debug},
// default info). Messages go to stderr; stdout is reserved for progress
// output that is never machine-parsed.
LogLevel log_level();
void log_message(LogLevel level, const std::string &msg);

}  // namespace msdgp

#define MSDGP_LOG(level, expr)                                      \
  do {                                                              \
    if (static_cast<int>(level) <=                                  \
        static_cast<int>(::msdgp::log_level())) {                   \
      std::ostringstream msdgp_log_oss__;                           \
      msdgp_log_oss__ << expr;                                      \
      ::msdgp::log_message(level, msdgp_log_oss__.str());           \
    }                                                               \
  } while (0)

#define MSDGP_INFO(expr) MSDGP_LOG(::msdgp::LogLevel::kInfo, expr)
#define MSDGP_DEBUG(expr) MSDGP_LOG(::msdgp::LogLevel::kDebug, expr)
#define MSDGP_ERROR(expr) MSDGP_LOG(::msdgp::LogLevel::kError, expr)

#endif  // MSDGP_LOG_H_
