#include "aperiod/format.hpp"

#include <charconv>
#include <ostream>
#include <system_error>

#include "aperiod/mild_solver.hpp"
#include "aperiod/noise.hpp"

namespace aperiod {

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

void write_noise_csv(std::ostream& out, const NoiseEnsemble& noise) {
    out << "path,t";
    for (std::size_t i = 0; i < noise.dim(); ++i) out << ",dW_" << (i + 1);
    out << '\n';
    for (std::size_t p = 0; p < noise.n_paths(); ++p) {
        for (std::size_t k = 0; k < noise.grid().n_steps; ++k) {
            out << p << ',' << format_number(noise.grid().time(k));
            for (double v : noise.increment(p, k)) out << ',' << format_number(v);
            out << '\n';
        }
    }
}

void write_path_csv(std::ostream& out, const PathEnsemble& paths) {
    out << "path,t";
    for (std::size_t i = 0; i < paths.dim; ++i) out << ",X_" << (i + 1);
    out << '\n';
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        for (std::size_t k = 0; k < paths.grid.n_nodes(); ++k) {
            out << p << ',' << format_number(paths.grid.time(k));
            for (double v : paths.state(p, k)) out << ',' << format_number(v);
            out << '\n';
        }
    }
}

}  // namespace aperiod
