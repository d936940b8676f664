// core/include/msdgp/io_util.h

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

#ifndef MSDGP_IO_UTIL_H_
#define MSDGP_IO_UTIL_H_

#include <cstdint>
#include <string>

namespace msdgp {

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double value);
// Exact inverse of format_double; throws IoError on malformed input.
double parse_double(const std::string &text);

// Fixed-point formatting for human-facing output (tables, SVG coordinates).
std::string format_fixed(double value, int decimals);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

uint64_t fnv1a64(const std::string &text);
std::string fnv1a64_hex(const std::string &text);

}  // namespace msdgp

#endif  // MSDGP_IO_UTIL_H_
