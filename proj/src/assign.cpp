/* Copyright 2026 The occmatch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "occmatch/assign.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "occmatch/error.hpp"

namespace occmatch {

CostMatrix CostMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m;
  m.rows = static_cast<int>(rows.size());
  m.cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  m.entries.reserve(static_cast<std::size_t>(m.rows) * m.cols);
  for (std::size_t g = 0; g < rows.size(); ++g) {
    if (static_cast<int>(rows[g].size()) != m.cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "cost row " + std::to_string(g) + " has " + std::to_string(rows[g].size()) +
                      " entries, expected " + std::to_string(m.cols));
    }
    for (double v : rows[g]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "cost row " + std::to_string(g) + " has a non-finite entry");
      }
      m.entries.push_back(v);
    }
  }
  return m;
}

std::vector<int> Assignment::PredictionForGroundTruth(int gt_count) const {
  std::vector<int> out(gt_count, kNoObject);
  for (std::size_t n = 0; n < sigma.size(); ++n) {
    if (sigma[n] != kNoObject) out[sigma[n]] = static_cast<int>(n);
  }
  return out;
}

CostMatrix BuildCostMatrix(const PredictionSet& preds, std::span<const GroundTruth> gts,
                           double lambda_pos, double lambda_class) {
  if (!(lambda_pos >= 0.0) || !(lambda_class >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "matching weights must be non-negative");
  }
  const std::size_t n_preds = preds.size();
  if (preds.class_logits.size() != n_preds || preds.delta.size() != n_preds) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction arrays disagree in length");
  }
  if (gts.size() > n_preds) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(gts.size()) + " ground truths but only " +
                    std::to_string(n_preds) + " predictions");
  }

  CostMatrix m;
  m.rows = static_cast<int>(gts.size());
  m.cols = static_cast<int>(n_preds);
  m.lambda_pos = lambda_pos;
  m.lambda_class = lambda_class;
  m.entries.resize(static_cast<std::size_t>(m.rows) * m.cols);

  std::vector<std::array<double, kNumClasses>> probs(n_preds);
  std::vector<Point2> positions(n_preds);
  for (std::size_t n = 0; n < n_preds; ++n) {
    probs[n] = ClassProbabilities(preds.class_logits[n]);
    positions[n] = preds.Position(n);
  }
  for (int g = 0; g < m.rows; ++g) {
    const int cls = static_cast<int>(gts[g].cls);
    for (int n = 0; n < m.cols; ++n) {
      m(g, n) = lambda_pos * Distance(positions[n], gts[g].position) -
                lambda_class * probs[n][cls];
    }
  }
  return m;
}

Assignment HungarianSolve(const CostMatrix& cost) {
  const int rows = cost.rows;
  const int cols = cost.cols;
  if (rows > cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                "assignment needs |G| <= |N|, got " + std::to_string(rows) + " x " +
                    std::to_string(cols));
  }
  if (cost.entries.size() != static_cast<std::size_t>(rows) * cols) {
    throw Error(ErrorCode::kDimensionMismatch, "cost entries do not match the declared shape");
  }

  Assignment result;
  result.sigma.assign(cols, kNoObject);
  if (rows == 0) return result;

  // 1-based potentials; column 0 is a virtual source.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0);
  std::vector<double> v(cols + 1, 0.0);
  std::vector<int> row_of_col(cols + 1, 0);
  std::vector<int> prev(cols + 1, 0);
  std::vector<double> dist(cols + 1);
  std::vector<char> done(cols + 1);

  for (int r = 1; r <= rows; ++r) {
    row_of_col[0] = r;
    int col = 0;
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    do {
      done[col] = 1;
      const int row = row_of_col[col];
      double delta = kInf;
      int next = 0;
      for (int j = 1; j <= cols; ++j) {
        if (done[j]) continue;
        const double reduced = cost(row - 1, j - 1) - u[row] - v[j];
        if (reduced < dist[j]) {
          dist[j] = reduced;
          prev[j] = col;
        }
        if (dist[j] < delta) {
          delta = dist[j];
          next = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (done[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          dist[j] -= delta;
        }
      }
      col = next;
    } while (row_of_col[col] != 0);
    // Flip the augmenting path.
    while (col != 0) {
      const int p = prev[col];
      row_of_col[col] = row_of_col[p];
      col = p;
    }
  }

  // Sum the chosen entries directly rather than trusting -v[0], which
  // accumulates rounding across augmentations.
  double total = 0.0;
  for (int j = 1; j <= cols; ++j) {
    if (row_of_col[j] != 0) result.sigma[j - 1] = row_of_col[j] - 1;
  }
  for (int n = 0; n < cols; ++n) {
    if (result.sigma[n] != kNoObject) total += cost(result.sigma[n], n);
  }
  result.total_cost = total;
  return result;
}

Assignment Match(const PredictionSet& preds, std::span<const GroundTruth> gts,
                 double lambda_pos, double lambda_class) {
  return HungarianSolve(BuildCostMatrix(preds, gts, lambda_pos, lambda_class));
}

}  // namespace occmatch
