#include "aperiod/assignment.hpp"

#include <limits>

#include "aperiod/error.hpp"

namespace aperiod {

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
    if (n == 0) throw InputError("solve_assignment: empty cost matrix");
    if (cost.size() != n * n) throw InputError("solve_assignment: cost matrix must be n x n");
    constexpr double inf = std::numeric_limits<double>::infinity();

    // 1-based rows/columns; column 0 is the virtual start of each augmenting path.
    std::vector<double> row_potential(n + 1, 0.0), col_potential(n + 1, 0.0), min_slack(n + 1);
    std::vector<std::size_t> row_of_col(n + 1, 0), previous(n + 1, 0);
    std::vector<char> visited(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        row_of_col[0] = row;
        std::size_t col = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(visited.begin(), visited.end(), 0);
        do {
            visited[col] = 1;
            const std::size_t current_row = row_of_col[col];
            const double* cost_row = cost.data() + (current_row - 1) * n;
            double step = inf;
            std::size_t next_col = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (visited[j]) continue;
                const double slack = cost_row[j - 1] - row_potential[current_row] - col_potential[j];
                if (slack < min_slack[j]) {
                    min_slack[j] = slack;
                    previous[j] = col;
                }
                if (min_slack[j] < step) {
                    step = min_slack[j];
                    next_col = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (visited[j]) {
                    row_potential[row_of_col[j]] += step;
                    col_potential[j] -= step;
                } else {
                    min_slack[j] -= step;
                }
            }
            col = next_col;
        } while (row_of_col[col] != 0);
        do {
            const std::size_t prior = previous[col];
            row_of_col[col] = row_of_col[prior];
            col = prior;
        } while (col != 0);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[row_of_col[j] - 1] = j - 1;
    return assignment;
}

}  // namespace aperiod
