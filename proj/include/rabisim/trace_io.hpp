// Copyright 2026 The rabisim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>

#include "rabisim/engine.hpp"
#include "rabisim/fit.hpp"

namespace rabisim {

/// Trace CSV: header "t_us,mx,my,mz,energy", 17 significant digits per value.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::string& path, const Trace& trace);

Trace read_trace_csv(std::istream& in);
Trace read_trace_csv(const std::string& path);

/// Structured text record: model kind, parameters, stderrs, residual RMS,
/// window, converged flag.
std::string format_fit_result(const FitResult& result);

void write_rates_csv(std::ostream& out, const RateSweep& sweep);
void write_rates_csv(const std::string& path, const RateSweep& sweep);

} // namespace rabisim
