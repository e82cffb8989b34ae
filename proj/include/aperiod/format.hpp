#pragma once

#include <iosfwd>
#include <string>

namespace aperiod {

class NoiseEnsemble;
struct PathEnsemble;

/// Shortest-free fixed-precision text: 17 significant digits, '.' separator,
/// locale independent. Negative zero prints as "0".
std::string format_number(double value);

/// Rows "path,t,dW_1..dW_m", one per (path, step).
void write_noise_csv(std::ostream& out, const NoiseEnsemble& noise);

/// Rows "path,t,X_1..X_d", one per (path, node).
void write_path_csv(std::ostream& out, const PathEnsemble& paths);

}  // namespace aperiod
