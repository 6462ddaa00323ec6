#include "passmap/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "passmap/errors.hpp"

namespace passmap {

std::vector<std::pair<std::size_t, std::size_t>> solve_assignment(const CostMatrix& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows == 0 ? 0 : cost[0].size();
  for (const auto& r : cost) {
    if (r.size() != cols) throw DegenerateInput("assignment cost matrix is ragged");
  }
  if (rows == 0 || cols == 0) return {};

  // Allowed pairs get cost - big, forbidden ones 0, so any extra pair beats
  // every possible saving in distance.
  double big = 1.0;
  for (const auto& r : cost) {
    for (const auto& c : r) {
      if (c) {
        if (!(*c >= 0.0) || !std::isfinite(*c)) throw DegenerateInput("assignment costs must be finite and >= 0");
        big += *c;
      }
    }
  }
  const std::size_t n = std::max(rows, cols);
  auto a = [&](std::size_t i, std::size_t j) -> double {
    if (i >= rows || j >= cols || !cost[i][j]) return 0.0;
    return *cost[i][j] - big;
  };

  // Shortest augmenting path Hungarian method, 1-based with potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1, c = j - 1;
    if (i < rows && c < cols && cost[i][c]) out.emplace_back(i, c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace passmap
