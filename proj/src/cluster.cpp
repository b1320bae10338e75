#include "specdiff/cluster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "specdiff/inference.hpp"

namespace specdiff::cluster {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_length(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

double distance_from_statistics(double d1, double d2, double d12) {
  const double total = d1 + d2;
  if (!(total > 0.0)) throw DegenerateInput("spectral distance undefined: D1 + D2 = 0");
  return std::sqrt(std::max(1.0 - 4.0 * d12 / total, 0.0));
}

double spectral_distance(const TimeSeries& a, const TimeSeries& b, bool center) {
  const auto stats = inference::d_statistics(prepare_comparison(a, b, center));
  return std::min(1.0, distance_from_statistics(stats.d1, stats.d2, stats.d12));
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  const std::size_t m = labels_.size();
  if (values_.size() != m * m) throw std::invalid_argument("distance matrix has wrong shape");
  for (std::size_t i = 0; i < m; ++i) {
    if ((*this)(i, i) != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < m; ++j) {
      const double v = (*this)(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("distance outside [0, 1]");
      if (v != (*this)(j, i)) throw std::invalid_argument("distance matrix is not symmetric");
    }
  }
}

std::string DistanceMatrix::to_csv() const {
  std::ostringstream out;
  out << "label";
  for (const auto& l : labels_) out << ',' << csv_field(l);
  out << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out << csv_field(labels_[i]);
    for (std::size_t j = 0; j < size(); ++j) out << ',' << format_double((*this)(i, j));
    out << '\n';
  }
  return out.str();
}

DistanceMatrix distance_matrix(std::span<const TimeSeries> series, bool center) {
  const std::size_t m = series.size();
  if (m < 2) throw std::invalid_argument("distance matrix needs at least two series");
  std::vector<std::string> labels;
  labels.reserve(m);
  for (const auto& s : series) labels.push_back(s.label());

  std::vector<double> values(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const TimeSeries* a = &series[i];
      const TimeSeries* b = &series[j];
      if (a->size() == b->size() && b->label() < a->label()) std::swap(a, b);
      double d = 0.0;
      try {
        d = spectral_distance(*a, *b, center);
      } catch (const DegenerateInput& e) {
        throw DegenerateInput("series '" + a->label() + "' or '" + b->label() + "': " + e.what());
      }
      values[i * m + j] = d;
      values[j * m + i] = d;
    }
  }
  return DistanceMatrix(std::move(labels), std::move(values));
}

Linkage linkage_from_name(std::string_view name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  throw std::invalid_argument("unknown linkage '" + std::string(name) + "'");
}

std::string to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "average";
}

Dendrogram::Dendrogram(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty() || nodes_.size() % 2 == 0) throw std::invalid_argument("dendrogram needs 2L - 1 nodes");
  const std::size_t leaves = leaf_count();
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (i < leaves) {
      if (!n.is_leaf()) throw std::invalid_argument("dendrogram leaves must come first");
      continue;
    }
    if (n.is_leaf() || n.right < 0) throw std::invalid_argument("internal node without two children");
    for (int c : {n.left, n.right}) {
      if (static_cast<std::size_t>(c) >= i) throw std::invalid_argument("child must precede its parent");
      ++parents[static_cast<std::size_t>(c)];
    }
  }
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (parents[i] != 1) throw std::invalid_argument("every non-root node needs exactly one parent");
  }
}

std::vector<double> Dendrogram::heights() const {
  std::vector<double> out;
  for (std::size_t i = leaf_count(); i < nodes_.size(); ++i) out.push_back(nodes_[i].height);
  return out;
}

std::vector<int> Dendrogram::cut(std::size_t k) const {
  const std::size_t leaves = leaf_count();
  if (k < 1 || k > leaves) throw std::invalid_argument("cut needs 1 <= k <= leaf count");
  const std::size_t kept_merges = leaves - k;
  // Apply the first kept_merges merges; each leaf inherits the root of its subtree.
  std::vector<std::size_t> owner(nodes_.size());
  std::iota(owner.begin(), owner.end(), 0);
  for (std::size_t i = leaves; i < leaves + kept_merges; ++i) {
    for (int c : {nodes_[i].left, nodes_[i].right}) {
      for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
        if (owner[leaf] == static_cast<std::size_t>(c)) owner[leaf] = i;
      }
    }
  }
  std::vector<int> ids(leaves, -1);
  std::vector<std::pair<std::size_t, int>> seen;
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == owner[leaf]; });
    if (it == seen.end()) {
      seen.emplace_back(owner[leaf], static_cast<int>(seen.size()));
      ids[leaf] = seen.back().second;
    } else {
      ids[leaf] = it->second;
    }
  }
  return ids;
}

std::vector<std::string> Dendrogram::leaves_under(std::size_t i) const {
  const Node& n = nodes_.at(i);
  if (n.is_leaf()) return {n.label};
  auto out = leaves_under(static_cast<std::size_t>(n.left));
  const auto right = leaves_under(static_cast<std::size_t>(n.right));
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

Dendrogram agglomerate(const DistanceMatrix& m, Linkage linkage) {
  const std::size_t n = m.size();
  std::vector<Dendrogram::Node> nodes;
  nodes.reserve(2 * n - 1);
  for (const auto& label : m.labels()) nodes.push_back({label, -1, -1, 0.0});

  struct Cluster {
    std::size_t node;
    std::string key;
    std::size_t size;
  };
  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, m.labels()[i], 1});
  // dist[a][b] between active slots, updated by the Lance-Williams rule.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = m(i, j);
  }

  const auto pair_key = [&](std::size_t a, std::size_t b) {
    const auto& ka = active[a].key;
    const auto& kb = active[b].key;
    return ka < kb ? std::tie(ka, kb) : std::tie(kb, ka);
  };

  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist[a][b];
        const double best = dist[best_a][best_b];
        if (d < best || (d == best && pair_key(a, b) < pair_key(best_a, best_b))) {
          best_a = a;
          best_b = b;
        }
      }
    }
    const Cluster& ca = active[best_a];
    const Cluster& cb = active[best_b];
    const bool a_left = ca.key <= cb.key;
    const Cluster& left = a_left ? ca : cb;
    const Cluster& right = a_left ? cb : ca;
    nodes.push_back({"", static_cast<int>(left.node), static_cast<int>(right.node), dist[best_a][best_b]});
    Cluster merged{nodes.size() - 1, std::min(ca.key, cb.key), ca.size + cb.size};

    std::vector<double> row(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double da = dist[best_a][k];
      const double db = dist[best_b][k];
      switch (linkage) {
        case Linkage::single: row[k] = std::min(da, db); break;
        case Linkage::complete: row[k] = std::max(da, db); break;
        case Linkage::average:
          row[k] = (static_cast<double>(ca.size) * da + static_cast<double>(cb.size) * db) /
                   static_cast<double>(merged.size);
          break;
      }
    }
    // Put the merged cluster in slot best_a and drop slot best_b.
    active[best_a] = merged;
    for (std::size_t k = 0; k < active.size(); ++k) {
      dist[best_a][k] = row[k];
      dist[k][best_a] = row[k];
    }
    dist[best_a][best_a] = 0.0;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(best_b));
    for (auto& r : dist) r.erase(r.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return Dendrogram(std::move(nodes));
}

TreeFormat tree_format_from_name(std::string_view name) {
  if (name == "newick") return TreeFormat::newick;
  if (name == "json") return TreeFormat::json;
  throw std::invalid_argument("unknown tree format '" + std::string(name) + "'");
}

std::string escape_label(std::string_view label) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : label) {
    const bool plain = std::isalnum(c) || c == '_' || c == '.' || c == '-';
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

namespace {

void newick_node(const Dendrogram& t, std::size_t i, double parent_height, std::string& out) {
  const auto& n = t.nodes()[i];
  if (n.is_leaf()) {
    out += escape_label(n.label);
  } else {
    out += '(';
    newick_node(t, static_cast<std::size_t>(n.left), n.height, out);
    out += ',';
    newick_node(t, static_cast<std::size_t>(n.right), n.height, out);
    out += ')';
  }
  if (i != t.root()) {
    out += ':';
    out += format_length(parent_height - n.height);
  }
}

nlohmann::json json_node(const Dendrogram& t, std::size_t i) {
  const auto& n = t.nodes()[i];
  if (n.is_leaf()) return {{"label", n.label}, {"height", n.height}};
  return {{"children", {json_node(t, static_cast<std::size_t>(n.left)), json_node(t, static_cast<std::size_t>(n.right))}},
          {"height", n.height}};
}

// Rebuilds nodes from nested JSON: leaves numbered left to right, internal
// nodes in post-order, then stably ordered by height when that keeps every
// child ahead of its parent.
struct JsonBuilder {
  std::vector<Dendrogram::Node> leaves;
  std::vector<Dendrogram::Node> internal;  // child indices encoded as leaf i or ~internal j

  int visit(const nlohmann::json& j) {
    if (j.contains("label")) {
      leaves.push_back({j.at("label").get<std::string>(), -1, -1, j.value("height", 0.0)});
      return static_cast<int>(leaves.size()) - 1;
    }
    const auto& children = j.at("children");
    if (!children.is_array() || children.size() != 2) {
      throw std::invalid_argument("dendrogram JSON node needs exactly two children");
    }
    const int l = visit(children[0]);
    const int r = visit(children[1]);
    internal.push_back({"", l, r, j.at("height").get<double>()});
    return ~static_cast<int>(internal.size() - 1);
  }
};

}  // namespace

std::string to_newick(const Dendrogram& tree) {
  std::string out;
  newick_node(tree, tree.root(), tree.nodes()[tree.root()].height, out);
  return out + ";";
}

std::string to_json(const Dendrogram& tree) { return json_node(tree, tree.root()).dump(); }

Dendrogram dendrogram_from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  JsonBuilder b;
  b.visit(doc);
  const std::size_t nl = b.leaves.size();
  const std::size_t ni = b.internal.size();

  std::vector<std::size_t> order(ni);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> sorted = order;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](std::size_t x, std::size_t y) { return b.internal[x].height < b.internal[y].height; });
  const auto resolve = [&](const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> position(ni);
    for (std::size_t p = 0; p < ni; ++p) position[perm[p]] = p;
    std::vector<Dendrogram::Node> nodes = b.leaves;
    for (std::size_t p = 0; p < ni; ++p) {
      auto node = b.internal[perm[p]];
      for (int* c : {&node.left, &node.right}) {
        if (*c < 0) *c = static_cast<int>(nl + position[static_cast<std::size_t>(~*c)]);
      }
      if (static_cast<std::size_t>(std::max(node.left, node.right)) >= nl + p) return std::vector<Dendrogram::Node>{};
      nodes.push_back(node);
    }
    return nodes;
  };
  auto nodes = resolve(sorted);
  if (nodes.empty()) nodes = resolve(order);
  return Dendrogram(std::move(nodes));
}

std::string export_dendrogram(const Dendrogram& tree, TreeFormat format) {
  return format == TreeFormat::newick ? to_newick(tree) : to_json(tree);
}

}  // namespace specdiff::cluster
