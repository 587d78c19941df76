#pragma once

// Dynamic grouping partitions: G nonempty disjoint subsets covering the M
// cell indices. Cells are 0-based internally and 1-based in every serialized
// form (JSON, CSV, logs). Within each subset indices are kept ascending;
// block extraction and restoring rely on that order.

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris {

enum class FixedStrategy { Horizontal, Vertical, Interlaced };

inline const char* to_string(FixedStrategy s) {
  switch (s) {
    case FixedStrategy::Horizontal: return "horizontal";
    case FixedStrategy::Vertical: return "vertical";
    case FixedStrategy::Interlaced: return "interlaced";
  }
  return "?";
}

/// Partition validity report; empty `violations` means all three partition
/// clauses hold (nonempty groups, pairwise disjoint, union = all cells).
/// Validation never throws.
struct GroupingReport {
  std::vector<std::string> violations;
  bool valid() const { return violations.empty(); }
};

inline GroupingReport validate_grouping(
    const std::vector<std::vector<int>>& subsets, int num_cells, int num_groups) {
  GroupingReport report;
  auto add = [&report](const std::string& msg) { report.violations.push_back(msg); };

  if (static_cast<int>(subsets.size()) != num_groups)
    add("expected " + std::to_string(num_groups) + " groups, got " +
        std::to_string(subsets.size()));

  std::vector<int> count(std::max(num_cells, 0), 0);
  for (std::size_t g = 0; g < subsets.size(); ++g) {
    if (subsets[g].empty()) add("group " + std::to_string(g + 1) + " is empty");
    for (int m : subsets[g]) {
      if (m < 0 || m >= num_cells) {
        add("group " + std::to_string(g + 1) + " holds out-of-range cell " +
            std::to_string(m + 1));
      } else {
        ++count[m];
      }
    }
  }
  for (int m = 0; m < num_cells; ++m) {
    if (count[m] == 0) add("cell " + std::to_string(m + 1) + " is unassigned");
    if (count[m] > 1)
      add("cell " + std::to_string(m + 1) + " appears in " +
          std::to_string(count[m]) + " groups");
  }
  return report;
}

/// Immutable partition of {0..M-1} into G subsets. Mutation returns a new
/// value (`moved`).
class Grouping {
 public:
  Grouping(std::vector<std::vector<int>> subsets, int num_cells)
      : subsets_(std::move(subsets)), num_cells_(num_cells) {
    for (auto& s : subsets_) std::sort(s.begin(), s.end());
    const GroupingReport report =
        validate_grouping(subsets_, num_cells_, static_cast<int>(subsets_.size()));
    if (!report.valid()) {
      std::ostringstream oss;
      oss << "Grouping: invalid partition:";
      for (const auto& v : report.violations) oss << " [" << v << "]";
      throw std::invalid_argument(oss.str());
    }
    rebuild_index();
  }

  /// Balanced contiguous partition; when G divides M every group has M/G
  /// cells, otherwise the first (M mod G) groups take one extra.
  static Grouping uniform_adjacent(int num_cells, int num_groups) {
    if (num_cells < 1) throw std::invalid_argument("uniform_adjacent: M must be positive");
    if (num_groups < 1 || num_groups > num_cells)
      throw std::invalid_argument("uniform_adjacent: G must lie in [1, M]");
    const int base = num_cells / num_groups;
    const int extra = num_cells % num_groups;
    std::vector<std::vector<int>> subsets(num_groups);
    int next = 0;
    for (int g = 0; g < num_groups; ++g) {
      const int size = base + (g < extra ? 1 : 0);
      subsets[g].resize(size);
      std::iota(subsets[g].begin(), subsets[g].end(), next);
      next += size;
    }
    return Grouping(std::move(subsets), num_cells);
  }

  /// Fixed grid layouts. Cells are numbered row-major over the grid.
  /// horizontal: contiguous in row-major order; vertical: contiguous in
  /// column-major order; interlaced: cell m joins group m mod G.
  /// Requires G to divide rows*cols.
  static Grouping fixed_strategy(int grid_rows, int grid_cols, int num_groups,
                                 FixedStrategy strategy) {
    if (grid_rows >= 1 && grid_cols >= 1 &&
        (grid_rows * grid_cols) % std::max(num_groups, 1) != 0)
      throw std::invalid_argument("fixed_strategy: G must divide grid_rows*grid_cols");
    return balanced_strategy(grid_rows, grid_cols, num_groups, strategy);
  }

  /// fixed_strategy without the divisibility requirement: contiguous chunks
  /// whose sizes differ by at most one (the first M mod G chunks take the
  /// extra cell), interlaced unchanged. Used for baseline comparisons at
  /// group counts that do not divide the cell count.
  static Grouping balanced_strategy(int grid_rows, int grid_cols, int num_groups,
                                    FixedStrategy strategy) {
    if (grid_rows < 1 || grid_cols < 1)
      throw std::invalid_argument("fixed_strategy: grid must be nonempty");
    const int num_cells = grid_rows * grid_cols;
    if (num_groups < 1 || num_groups > num_cells)
      throw std::invalid_argument("fixed_strategy: G must lie in [1, M]");
    std::vector<int> chunk(num_cells);  // chunk index per enumeration position
    {
      const int base = num_cells / num_groups;
      const int extra = num_cells % num_groups;
      int pos = 0;
      for (int g = 0; g < num_groups; ++g)
        for (int i = 0; i < base + (g < extra ? 1 : 0); ++i) chunk[pos++] = g;
    }
    std::vector<std::vector<int>> subsets(num_groups);
    switch (strategy) {
      case FixedStrategy::Horizontal:
        for (int m = 0; m < num_cells; ++m) subsets[chunk[m]].push_back(m);
        break;
      case FixedStrategy::Vertical:
        for (int pos = 0, c = 0; c < grid_cols; ++c)
          for (int r = 0; r < grid_rows; ++r, ++pos)
            subsets[chunk[pos]].push_back(r * grid_cols + c);
        break;
      case FixedStrategy::Interlaced:
        for (int m = 0; m < num_cells; ++m) subsets[m % num_groups].push_back(m);
        break;
    }
    return Grouping(std::move(subsets), num_cells);
  }

  static Grouping singletons(int num_cells) { return uniform_adjacent(num_cells, num_cells); }
  static Grouping single_group(int num_cells) { return uniform_adjacent(num_cells, 1); }

  int num_cells() const { return num_cells_; }
  int num_groups() const { return static_cast<int>(subsets_.size()); }
  const std::vector<int>& cells(int g) const { return subsets_.at(g); }
  int size_of(int g) const { return static_cast<int>(subsets_.at(g).size()); }
  int group_of(int m) const { return cell_group_.at(m); }
  const std::vector<std::vector<int>>& subsets() const { return subsets_; }

  /// True when some grouping move is possible: at least two groups and a
  /// group with more than one cell.
  bool can_regroup() const {
    if (num_groups() < 2) return false;
    for (const auto& s : subsets_)
      if (s.size() > 1) return true;
    return false;
  }

  /// Move cell m from g_from to g_to (no-op when g_from == g_to). Rejects
  /// moving the last cell out of a group.
  Grouping moved(int m, int g_from, int g_to) const {
    if (g_from < 0 || g_from >= num_groups() || g_to < 0 || g_to >= num_groups())
      throw std::invalid_argument("moved: group index out of range");
    const auto& from = subsets_[g_from];
    if (!std::binary_search(from.begin(), from.end(), m))
      throw std::invalid_argument("moved: cell not in source group");
    if (g_from == g_to) return *this;
    if (from.size() <= 1)
      throw std::invalid_argument("moved: cannot empty a group");
    std::vector<std::vector<int>> subsets = subsets_;
    auto& f = subsets[g_from];
    f.erase(std::find(f.begin(), f.end(), m));
    auto& t = subsets[g_to];
    t.insert(std::upper_bound(t.begin(), t.end(), m), m);
    return Grouping(std::move(subsets), num_cells_);
  }

  /// 1-based list-of-lists, the serialized form used in CSV/JSON output.
  std::vector<std::vector<int>> to_one_based() const {
    std::vector<std::vector<int>> out = subsets_;
    for (auto& s : out)
      for (auto& m : s) ++m;
    return out;
  }

  std::string to_string() const {
    std::ostringstream oss;
    for (int g = 0; g < num_groups(); ++g) {
      oss << (g ? " " : "") << "{";
      for (std::size_t i = 0; i < subsets_[g].size(); ++i)
        oss << (i ? "," : "") << subsets_[g][i] + 1;
      oss << "}";
    }
    return oss.str();
  }

  bool operator==(const Grouping& other) const {
    return num_cells_ == other.num_cells_ && subsets_ == other.subsets_;
  }

 private:
  void rebuild_index() {
    cell_group_.assign(num_cells_, -1);
    for (int g = 0; g < num_groups(); ++g)
      for (int m : subsets_[g]) cell_group_[m] = g;
  }

  std::vector<std::vector<int>> subsets_;  // each ascending
  std::vector<int> cell_group_;
  int num_cells_;
};

}  // namespace bdris
