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

#include "rabisim/trace_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace rabisim {

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t_us,mx,my,mz,energy\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << trace.times[i] << ',' << trace.mx[i] << ',' << trace.my[i] << ','
            << trace.mz[i] << ',' << trace.energy[i] << '\n';
    }
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open trace file for writing: " + path);
    write_trace_csv(out, trace);
}

Trace read_trace_csv(std::istream& in) {
    Trace trace;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trace CSV is empty");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string cell;
        double values[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(row, cell, i < 4 ? ',' : '\n'))
                throw std::runtime_error("trace CSV row has fewer than 5 columns");
            values[i] = std::stod(cell);
        }
        trace.times.push_back(values[0]);
        trace.mx.push_back(values[1]);
        trace.my.push_back(values[2]);
        trace.mz.push_back(values[3]);
        trace.energy.push_back(values[4]);
    }
    return trace;
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + path);
    return read_trace_csv(in);
}

std::string format_fit_result(const FitResult& result) {
    static const char* const kNames[3][5] = {
        {"a", "b", "c", "f", nullptr},
        {"a", "b", "c", nullptr, nullptr},
        {"A0", "Omega", "phi", "c", "m_inf"},
    };
    const int kind_idx = static_cast<int>(result.kind);

    std::ostringstream out;
    out << std::setprecision(17);
    out << "model " << fit_model_name(result.kind) << "\n";
    for (std::size_t i = 0; i < result.params.size(); ++i) {
        out << kNames[kind_idx][i] << " " << result.params[i] << " stderr "
            << result.stderrs[i] << "\n";
    }
    out << "residual_rms " << result.residual_rms << "\n";
    out << "window_us " << result.window_min << " " << result.window_max << "\n";
    out << "n_points " << result.n_points << "\n";
    out << "iterations " << result.iterations << "\n";
    out << "converged " << (result.converged ? 1 : 0) << "\n";
    out << "low_confidence " << (result.low_confidence ? 1 : 0) << "\n";
    return out.str();
}

void write_rates_csv(std::ostream& out, const RateSweep& sweep) {
    out << "hp,c_R,stderr,f,a,b\n";
    out << std::setprecision(17);
    for (const RateEntry& e : sweep.rates) {
        out << e.h_p << ',' << e.c << ',' << e.c_stderr << ',' << e.f << ','
            << e.a << ',' << e.b << '\n';
    }
}

void write_rates_csv(const std::string& path, const RateSweep& sweep) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open rates file for writing: " + path);
    write_rates_csv(out, sweep);
}

} // namespace rabisim
