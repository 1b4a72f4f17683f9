#include "mgd/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mgd {

double assignment_value(const Eigen::MatrixXd& score, const Permutation& pi) {
  double total = 0.0;
  for (int i = 0; i < pi.size(); ++i) total += score(i, pi(i));
  return total;
}

Permutation linear_assignment(const Eigen::MatrixXd& score) {
  const auto n = static_cast<int>(score.rows());
  if (score.cols() != n) throw std::invalid_argument("linear_assignment: matrix not square");
  if (!score.allFinite()) {
    throw std::invalid_argument("linear_assignment: non-finite score entry");
  }
  if (n == 0) return Permutation{};

  // Minimize cost = -score. 1-based arrays; index 0 is the virtual column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  auto cost = [&](int r, int c) { return -score(r - 1, c - 1); };

  for (int r = 1; r <= n; ++r) {
    owner[0] = r;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r0 = owner[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0, c) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const int col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  // Back to 0-based matching and a tight-edge predicate.
  std::vector<int> row_to_col(n), col_to_row(n);
  for (int c = 1; c <= n; ++c) {
    row_to_col[owner[c] - 1] = c - 1;
    col_to_row[c - 1] = owner[c] - 1;
  }
  const double tol = 1e-10 * std::max(1.0, score.cwiseAbs().maxCoeff());
  auto tight = [&](int r, int c) { return cost(r + 1, c + 1) - u[r + 1] - v[c + 1] <= tol; };

  // Greedy lexicographic pass. Rows < i are frozen. For row i, find every
  // column it could take while the remaining rows re-route along tight edges
  // into the column it vacates.
  std::vector<int> via(n);
  std::vector<char> reach(n);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i) {
    const int home = row_to_col[i];
    std::fill(reach.begin(), reach.end(), 0);
    queue.assign(1, home);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int freed = queue[q];
      for (int r = i + 1; r < n; ++r) {
        if (reach[r] || row_to_col[r] == freed || !tight(r, freed)) continue;
        reach[r] = 1;
        via[r] = freed;
        queue.push_back(row_to_col[r]);
      }
    }
    int best = home;
    for (int r = i + 1; r < n; ++r) {
      if (reach[r] && row_to_col[r] < best && tight(i, row_to_col[r])) best = row_to_col[r];
    }
    if (best == home) continue;
    int r = col_to_row[best];
    row_to_col[i] = best;
    col_to_row[best] = i;
    while (true) {
      const int next = via[r];
      const int displaced = col_to_row[next];
      row_to_col[r] = next;
      col_to_row[next] = r;
      if (next == home) break;
      r = displaced;
    }
  }
  return Permutation(std::move(row_to_col));
}

}  // namespace mgd
