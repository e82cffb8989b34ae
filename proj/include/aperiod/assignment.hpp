#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aperiod {

/// Exact minimum-cost perfect matching on a dense n x n cost matrix (row-major)
/// by the shortest-augmenting-path Hungarian method with potentials, O(n^3).
/// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace aperiod
