// SPDX-License-Identifier: Apache-2.0
//
// trsim: multiuser time-reversal precoding simulator for discrete multipath channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace trsim {

// Shortest decimal form that parses back to the exact same double.
// Used for CSV cells so re-runs are byte-identical across platforms.
std::string format_double_roundtrip(double v);

// Scientific form with 17 significant digits, enough to round-trip any
// double exactly. Used for tap and gain values in data files.
std::string format_double_full(double v);

// Parses a complete token as a double; returns false if the token is empty,
// has trailing characters, or is not a number ("inf"/"-inf" are accepted).
bool parse_double(std::string_view token, double &out);

// Parses a complete token as an unsigned integer.
bool parse_u64(std::string_view token, std::uint64_t &out);

// FNV-1a 64-bit digest of a byte string, as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Reads a whole file into memory; throws io_error if it cannot be opened.
std::string read_file(const std::string &path);

// Writes content to a temporary sibling then renames it over the target, so
// readers never observe a partially written file.
void atomic_write_file(const std::string &path, std::string_view content);

}  // namespace trsim
