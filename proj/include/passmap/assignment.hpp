#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace passmap {

// cost[i][j] is the cost of pairing row i with column j; nullopt forbids the
// pair. The result has the largest possible number of pairs and, among those,
// the least total cost. Pairs are sorted by row.
using CostMatrix = std::vector<std::vector<std::optional<double>>>;

std::vector<std::pair<std::size_t, std::size_t>> solve_assignment(const CostMatrix& cost);

}  // namespace passmap
