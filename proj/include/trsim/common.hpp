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

#include <complex>
#include <stdexcept>
#include <vector>

namespace trsim {

using cdouble = std::complex<double>;
using cvec = std::vector<cdouble>;

// A data or config file violated its documented format. Messages carry the
// file and 1-based line number (or the config key path) where parsing stopped.
class format_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A file could not be opened, read, or written.
class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A channel, or a prefilter derived from one, carries no energy.
class degenerate_channel_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Composed prefilters cancelled to zero total energy.
class degenerate_sum_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace trsim
