#include "dlcot/similarity.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dlcot/digest.hpp"
#include "dlcot/errors.hpp"
#include "json.hpp"

namespace dlcot {

double FeatureVector::dot(const FeatureVector& other) const {
  double sum = 0.0;
  auto it_a = weights.begin();
  auto it_b = other.weights.begin();
  while (it_a != weights.end() && it_b != other.weights.end()) {
    if (it_a->first < it_b->first) {
      ++it_a;
    } else if (it_b->first < it_a->first) {
      ++it_b;
    } else {
      sum += it_a->second * it_b->second;
      ++it_a;
      ++it_b;
    }
  }
  return sum;
}

double FeatureVector::norm() const {
  double sum = 0.0;
  for (const auto& [key, w] : weights) sum += w * w;
  return std::sqrt(sum);
}

FeatureVector featurize(std::string_view text) {
  if (text.empty()) throw RecordError("featurize: empty text");

  // Lowercase and collapse whitespace runs to single spaces.
  std::string normalized;
  normalized.reserve(text.size());
  bool in_space = true;  // also trims leading whitespace
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) normalized += ' ';
      in_space = true;
    } else {
      normalized += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      in_space = false;
    }
  }
  while (!normalized.empty() && normalized.back() == ' ') normalized.pop_back();
  if (normalized.empty()) throw RecordError("featurize: text is all whitespace");

  FeatureVector vec;
  constexpr std::size_t kN = 3;
  if (normalized.size() < kN) {
    vec.weights[normalized] = 1.0;
    return vec;
  }
  for (std::size_t i = 0; i + kN <= normalized.size(); ++i) {
    vec.weights[normalized.substr(i, kN)] += 1.0;
  }
  const double norm = vec.norm();
  for (auto& [key, w] : vec.weights) w /= norm;
  return vec;
}

double cosine(const FeatureVector& a, const FeatureVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller index as root
    parent[b] = a;
  }
};

}  // namespace

ClusterAssignment cluster_vectors(const std::vector<FeatureVector>& items,
                                  const SimilarityConfig& config,
                                  ClusterItemKind kind) {
  if (items.empty()) throw RecordError("cluster: no items");
  if (config.threshold < 0.0 || config.threshold > 1.0) {
    throw FatalError("cluster: threshold must be in [0, 1]");
  }

  const int n = static_cast<int>(items.size());
  UnionFind uf(items.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (cosine(items[i], items[j]) >= config.threshold) {
        uf.unite(i, j);
      }
    }
  }

  ClusterAssignment assignment;
  assignment.item_kind = kind;
  assignment.cluster_of.assign(items.size(), -1);
  std::map<int, int> root_to_cluster;  // ordered by root = smallest member
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    auto [it, inserted] = root_to_cluster.emplace(root, 0);
    if (inserted) {
      it->second = static_cast<int>(assignment.clusters.size());
      assignment.clusters.emplace_back();
    }
    assignment.cluster_of[i] = it->second;
    assignment.clusters[it->second].push_back(i);
  }
  return assignment;
}

nlohmann::json ClusterAssignment::to_json() const {
  return nlohmann::json{
      {"item_kind", item_kind == ClusterItemKind::approach ? "approach" : "verification"},
      {"cluster_of", cluster_of},
      {"clusters", clusters}};
}

ClusterAssignment ClusterAssignment::from_json(const nlohmann::json& j) {
  ClusterAssignment assignment;
  assignment.item_kind = j.value("item_kind", std::string{"approach"}) == "verification"
                             ? ClusterItemKind::verification
                             : ClusterItemKind::approach;
  assignment.cluster_of = j.at("cluster_of").get<std::vector<int>>();
  assignment.clusters = j.at("clusters").get<std::vector<std::vector<int>>>();
  return assignment;
}

ClusterAssignment cluster_texts(const std::vector<std::string>& texts,
                                const SimilarityConfig& config,
                                ClusterItemKind kind) {
  std::vector<FeatureVector> vectors;
  vectors.reserve(texts.size());
  for (const auto& text : texts) vectors.push_back(featurize(text));
  return cluster_vectors(vectors, config, kind);
}

EmbeddingClient::EmbeddingClient(std::filesystem::path cache_dir, std::string model,
                                 std::unique_ptr<Transport> transport, bool offline)
    : cache_dir_(std::move(cache_dir)),
      model_(std::move(model)),
      transport_(std::move(transport)),
      offline_(offline) {}

FeatureVector EmbeddingClient::embed(std::string_view text) {
  const std::string key =
      sha256_hex("embedding\n" + model_ + "\n" + std::string(text));
  const std::filesystem::path path = cache_dir_ / key.substr(0, 2) / (key + ".json");

  auto vector_from_json = [](const nlohmann::json& values) {
    FeatureVector vec;
    std::size_t dim = 0;
    for (const auto& v : values) {
      char buffer[16];
      std::snprintf(buffer, sizeof(buffer), "%08zu", dim++);
      vec.weights[buffer] = v.get<double>();
    }
    return vec;
  };

  {
    std::ifstream in(path);
    if (in.is_open()) {
      nlohmann::json j;
      in >> j;
      return vector_from_json(j.at("embedding"));
    }
  }
  if (offline_) throw MissingFixtureError(key);
  if (!transport_) throw FatalError("embedding client has no transport");

  const nlohmann::json body{{"model", model_}, {"input", std::string(text)}};
  const TransportResult wire = transport_->post_json(body.dump(), "");
  if (!wire.ok()) {
    throw RecordError("embedding call failed: " +
                      (wire.error.empty() ? "http status " + std::to_string(wire.status)
                                          : wire.error));
  }
  try {
    const auto j = nlohmann::json::parse(wire.body);
    const auto& embedding = j.at("data").at(0).at("embedding");
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::trunc);
    out << nlohmann::json{{"embedding", embedding}}.dump() << "\n";
    return vector_from_json(embedding);
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(std::string("embedding response malformed: ") + e.what());
  }
}

}  // namespace dlcot
