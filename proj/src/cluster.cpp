#include "symnmf/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

namespace symnmf {

std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight) {
  const std::size_t n = weight.size();
  for (const auto& row : weight) {
    if (row.size() != n) throw DimensionError("assignment weights must be square");
  }
  if (n == 0) return {};

  // Shortest augmenting paths with potentials on cost = -weight, 1-based with a
  // virtual column 0.
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> row_pot(n + 1, 0), col_pot(n + 1, 0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t col = 0;
    std::vector<long long> min_slack(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col] = 1;
      const std::size_t row = match[col];
      long long delta = kInf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = -weight[row - 1][j - 1] - row_pot[row] - col_pot[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = col;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          next = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[match[j]] += delta;
          col_pot[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col = next;
    } while (match[col] != 0);
    do {
      const std::size_t prev = way[col];
      match[col] = match[prev];
      col = prev;
    } while (col != 0);
  }

  std::vector<int> assignment(n, -1);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = static_cast<int>(j - 1);
  return assignment;
}

namespace {

std::map<int, int> compact_alphabet(const std::vector<int>& labels, const char* what) {
  std::map<int, int> index;
  for (int l : labels) index.emplace(l, 0);
  if (index.size() > kMaxLabelAlphabet) {
    throw DomainError(std::string(what) + " uses more than " + std::to_string(kMaxLabelAlphabet) + " labels");
  }
  int next = 0;
  for (auto& [label, slot] : index) slot = next++;
  return index;
}

}  // namespace

double clustering_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionError("predicted and true label vectors differ in length");
  }
  if (predicted.empty()) throw DimensionError("no labels to score");
  const auto pred_index = compact_alphabet(predicted, "prediction");
  const auto truth_index = compact_alphabet(truth, "ground truth");
  const std::size_t size = std::max(pred_index.size(), truth_index.size());

  std::vector<std::vector<long long>> confusion(size, std::vector<long long>(size, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++confusion[pred_index.at(predicted[i])][truth_index.at(truth[i])];
  }
  const auto assignment = max_weight_assignment(confusion);
  long long matched = 0;
  for (std::size_t p = 0; p < size; ++p) matched += confusion[p][assignment[p]];
  return static_cast<double>(matched) / static_cast<double>(predicted.size());
}

}  // namespace symnmf
