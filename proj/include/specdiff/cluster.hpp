#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specdiff/core.hpp"

namespace specdiff::cluster {

/// sqrt(max(1 - 4 D12 / (D1 + D2), 0)), i.e. the square root of the clipped
/// normalized distance R^2. Throws DegenerateInput when D1 + D2 == 0.
[[nodiscard]] double distance_from_statistics(double d1, double d2, double d12);

/// Normalized spectral distance in [0, 1]. The shorter series defines the
/// grid; equal lengths keep argument order.
[[nodiscard]] double spectral_distance(const TimeSeries& a, const TimeSeries& b, bool center = true);

/// Symmetric, zero-diagonal matrix of pairwise distances in [0, 1].
class DistanceMatrix {
 public:
  /// `values` is row-major m x m. Throws std::invalid_argument if the
  /// invariants do not hold.
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }

  /// Header row of labels, then one row per series prefixed by its label.
  [[nodiscard]] std::string to_csv() const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

/// All pairwise spectral distances. Each unordered pair is computed once;
/// equal-length pairs are ordered by label, then by input position, so the
/// matrix does not depend on input order. Degenerate series raise
/// DegenerateInput naming the label.
[[nodiscard]] DistanceMatrix distance_matrix(std::span<const TimeSeries> series, bool center = true);

enum class Linkage { average, complete, single };

[[nodiscard]] Linkage linkage_from_name(std::string_view name);
[[nodiscard]] std::string to_string(Linkage linkage);

/// Binary merge tree. Leaves come first (index i is input series i), internal
/// nodes follow in merge order, the root is last.
class Dendrogram {
 public:
  struct Node {
    std::string label;  ///< leaves only
    int left = -1;      ///< child indices; -1 for leaves
    int right = -1;
    double height = 0.0;

    [[nodiscard]] bool is_leaf() const noexcept { return left < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  Dendrogram() = default;
  /// Throws std::invalid_argument unless nodes form a valid binary tree with
  /// leaves first and the root last.
  explicit Dendrogram(std::vector<Node> nodes);

  [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t leaf_count() const noexcept { return (nodes_.size() + 1) / 2; }
  [[nodiscard]] std::size_t root() const noexcept { return nodes_.size() - 1; }

  /// Merge heights in merge order.
  [[nodiscard]] std::vector<double> heights() const;

  /// Cluster id per leaf after undoing the last k - 1 merges. Ids are
  /// numbered by first appearance in leaf order.
  [[nodiscard]] std::vector<int> cut(std::size_t k) const;

  /// Leaf labels under node i, in left-to-right order.
  [[nodiscard]] std::vector<std::string> leaves_under(std::size_t i) const;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;

 private:
  std::vector<Node> nodes_;
};

/// Sequential agglomerative clustering. The closest pair of clusters merges
/// first; exact ties go to the lexicographically smallest pair of cluster
/// keys (a cluster's key is its smallest leaf label). The child with the
/// smaller key is placed left.
[[nodiscard]] Dendrogram agglomerate(const DistanceMatrix& m, Linkage linkage = Linkage::average);

enum class TreeFormat { newick, json };

[[nodiscard]] TreeFormat tree_format_from_name(std::string_view name);

/// Newick with branch length = parent height - child height, printed with up
/// to 12 significant digits. Label characters outside [A-Za-z0-9_.-] are
/// percent-escaped.
[[nodiscard]] std::string to_newick(const Dendrogram& tree);

/// Nested {"label": ..., "height": 0} | {"children": [l, r], "height": h}.
[[nodiscard]] std::string to_json(const Dendrogram& tree);
[[nodiscard]] Dendrogram dendrogram_from_json(std::string_view text);

[[nodiscard]] std::string export_dendrogram(const Dendrogram& tree, TreeFormat format);

[[nodiscard]] std::string escape_label(std::string_view label);

}  // namespace specdiff::cluster
