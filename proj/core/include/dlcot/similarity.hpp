#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dlcot/transport.hpp"
#include "json.hpp"

namespace dlcot {

enum class Featurizer { char_ngram_tf, embedding_endpoint };

struct SimilarityConfig {
  Featurizer featurizer = Featurizer::char_ngram_tf;
  double threshold = 0.80;
  // linkage is fixed single-linkage: "keep one per cluster" only needs the
  // connected components of the threshold graph.
};

/// Sparse L2-normalized feature vector. Keys are trigram strings for the
/// n-gram featurizer and dimension indices for embeddings.
struct FeatureVector {
  std::map<std::string, double> weights;

  double dot(const FeatureVector& other) const;
  double norm() const;
};

/// Deterministic character-trigram term-frequency vector over lowercased,
/// whitespace-collapsed text, L2-normalized. Text shorter than one trigram
/// contributes itself as a single feature. Throws RecordError on empty text.
FeatureVector featurize(std::string_view text);

double cosine(const FeatureVector& a, const FeatureVector& b);

enum class ClusterItemKind { approach, verification };

/// A partition of items into similarity clusters. Cluster ids are dense from
/// 0, ordered by smallest member index, so identical inputs always produce
/// identical assignments.
struct ClusterAssignment {
  ClusterItemKind item_kind = ClusterItemKind::approach;
  std::vector<int> cluster_of;             // item index -> cluster id
  std::vector<std::vector<int>> clusters;  // cluster id -> ordered members

  std::size_t cluster_count() const { return clusters.size(); }

  nlohmann::json to_json() const;
  static ClusterAssignment from_json(const nlohmann::json& j);
};

/// Single-linkage connected components of the graph with an edge wherever
/// cosine(a, b) >= threshold.
ClusterAssignment cluster_vectors(const std::vector<FeatureVector>& items,
                                  const SimilarityConfig& config,
                                  ClusterItemKind kind = ClusterItemKind::approach);

ClusterAssignment cluster_texts(const std::vector<std::string>& texts,
                                const SimilarityConfig& config,
                                ClusterItemKind kind = ClusterItemKind::approach);

/// Embedding featurizer backed by an embeddings endpoint, content-cached on
/// disk. Used only when SimilarityConfig selects embedding_endpoint; the
/// default featurizer needs no network.
class EmbeddingClient {
 public:
  EmbeddingClient(std::filesystem::path cache_dir, std::string model,
                  std::unique_ptr<Transport> transport, bool offline);

  FeatureVector embed(std::string_view text);

 private:
  std::filesystem::path cache_dir_;
  std::string model_;
  std::unique_ptr<Transport> transport_;
  bool offline_;
};

}  // namespace dlcot
