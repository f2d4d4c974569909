#include "doctest.h"
#include "dlcot/errors.hpp"
#include "dlcot/similarity.hpp"
#include "fakes.hpp"
#include "temp_dir.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <random>

using namespace dlcot;

TEST_CASE("identical texts featurize identically") {
  const auto a = featurize("The sum reduces to 42 after cancellation.");
  const auto b = featurize("The sum reduces to 42 after cancellation.");
  CHECK(a.weights == b.weights);
  CHECK(cosine(a, b) == doctest::Approx(1.0));
}

TEST_CASE("featurization lowercases and collapses whitespace") {
  const auto a = featurize("The  Sum\n REDUCES");
  const auto b = featurize("the sum reduces");
  CHECK(a.weights == b.weights);
}

TEST_CASE("abc self-similarity is exactly 1") {
  CHECK(cosine(featurize("abc"), featurize("abc")) == doctest::Approx(1.0));
}

TEST_CASE("abcd vs abce has cosine 0.5") {
  // trigram sets {abc, bcd} vs {abc, bce}; one shared gram of weight
  // 1/sqrt(2) each side -> dot = 0.5
  CHECK(cosine(featurize("abcd"), featurize("abce")) == doctest::Approx(0.5));
}

TEST_CASE("short texts fall back to a whole-string feature") {
  CHECK(cosine(featurize("ab"), featurize("ab")) == doctest::Approx(1.0));
  CHECK(cosine(featurize("ab"), featurize("cd")) == doctest::Approx(0.0));
}

TEST_CASE("featurize rejects empty input") {
  CHECK_THROWS_AS(featurize(""), RecordError);
  CHECK_THROWS_AS(featurize("   "), RecordError);
}

TEST_CASE("single item forms a single cluster") {
  const auto assignment = cluster_texts({"only one"}, SimilarityConfig{});
  CHECK(assignment.cluster_count() == 1);
  CHECK(assignment.cluster_of == std::vector<int>{0});
}

TEST_CASE("identical pair clusters together, orthogonal item alone") {
  const std::vector<std::string> texts = {
      "integrate the polynomial term by term",
      "integrate the polynomial term by term",
      "zzzz qqqq xxxx wwww"};
  const auto assignment = cluster_texts(texts, SimilarityConfig{});
  CHECK(assignment.cluster_count() == 2);
  CHECK(assignment.cluster_of[0] == assignment.cluster_of[1]);
  CHECK(assignment.cluster_of[0] != assignment.cluster_of[2]);
  // ids dense from 0, ordered by smallest member
  CHECK(assignment.cluster_of[0] == 0);
  CHECK(assignment.cluster_of[2] == 1);
  CHECK(assignment.clusters[0] == std::vector<int>{0, 1});
}

namespace {

// Brute-force oracle: union-find over the full pairwise similarity matrix.
std::vector<int> brute_force_partition(const std::vector<FeatureVector>& items,
                                       double threshold) {
  const int n = static_cast<int>(items.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : (parent[x] = find(parent[x]));
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (cosine(items[i], items[j]) >= threshold) {
        parent[find(i)] = find(j);
      }
    }
  }
  // canonical labels: first-seen order of roots
  std::vector<int> label(n, -1);
  std::map<int, int> seen;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (seen.find(root) == seen.end()) {
      const int id = static_cast<int>(seen.size());
      seen[root] = id;
    }
    label[i] = seen[root];
  }
  return label;
}

std::string random_text(std::mt19937& rng) {
  static const char* kWords[] = {"sum",    "ratio",  "series", "integral",
                                 "matrix", "vector", "bound",  "term",
                                 "factor", "root"};
  std::string text;
  const int words = 3 + static_cast<int>(rng() % 6);
  for (int i = 0; i < words; ++i) {
    if (i) text += " ";
    text += kWords[rng() % std::size(kWords)];
  }
  return text;
}

}  // namespace

TEST_CASE("clustering matches the brute-force union-find oracle") {
  std::mt19937 rng(99);
  SimilarityConfig config;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<FeatureVector> items;
    for (int i = 0; i < n; ++i) items.push_back(featurize(random_text(rng)));

    const auto assignment = cluster_vectors(items, config);
    const auto oracle = brute_force_partition(items, config.threshold);
    REQUIRE(assignment.cluster_of.size() == oracle.size());
    CHECK(assignment.cluster_of == oracle);
  }
}

TEST_CASE("clustering is invariant under permutation up to relabeling") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::vector<std::string> texts;
    for (int i = 0; i < n; ++i) texts.push_back(random_text(rng));

    const auto base = cluster_texts(texts, SimilarityConfig{});
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> shuffled(n);
    for (int i = 0; i < n; ++i) shuffled[i] = texts[perm[i]];
    const auto permuted = cluster_texts(shuffled, SimilarityConfig{});

    // same partition: items in the same cluster before must share one after
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const bool together_before = base.cluster_of[perm[i]] == base.cluster_of[perm[j]];
        const bool together_after = permuted.cluster_of[i] == permuted.cluster_of[j];
        CHECK(together_before == together_after);
      }
    }
  }
}

TEST_CASE("embedding featurizer caches endpoint vectors") {
  dlcot::test::TempDir dir;
  auto transport = std::make_unique<dlcot::test::ScriptedTransport>(
      std::vector<TransportResult>{[] {
        TransportResult r;
        r.status = 200;
        r.body = nlohmann::json{
            {"data", {{{"embedding", {0.6, 0.8}}}}}}.dump();
        return r;
      }()});
  auto* transport_raw = transport.get();

  EmbeddingClient client(dir.path, "embed-model", std::move(transport), false);
  const FeatureVector first = client.embed("some text");
  CHECK(first.weights.size() == 2);
  CHECK(first.norm() == doctest::Approx(1.0));
  CHECK(transport_raw->bodies.size() == 1);

  const FeatureVector second = client.embed("some text");  // cache hit
  CHECK(second.weights == first.weights);
  CHECK(transport_raw->bodies.size() == 1);

  // offline client replays the cache and rejects misses
  EmbeddingClient offline(dir.path, "embed-model", nullptr, true);
  CHECK(offline.embed("some text").weights == first.weights);
  CHECK_THROWS_AS(offline.embed("uncached text"), dlcot::MissingFixtureError);
}

TEST_CASE("embedding call failures are recoverable per record") {
  dlcot::test::TempDir dir;
  auto transport = std::make_unique<dlcot::test::ScriptedTransport>(
      std::vector<TransportResult>{dlcot::test::http_error(500)});
  EmbeddingClient client(dir.path, "embed-model", std::move(transport), false);
  CHECK_THROWS_AS(client.embed("text"), RecordError);
}

TEST_CASE("raising the threshold only refines the partition") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::vector<FeatureVector> items;
    for (int i = 0; i < n; ++i) items.push_back(featurize(random_text(rng)));

    SimilarityConfig lower;
    lower.threshold = 0.5;
    SimilarityConfig higher;
    higher.threshold = 0.85;
    const auto coarse = cluster_vectors(items, lower);
    const auto fine = cluster_vectors(items, higher);

    CHECK(fine.cluster_count() >= coarse.cluster_count());
    // refinement: together at high threshold implies together at low
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (fine.cluster_of[i] == fine.cluster_of[j]) {
          CHECK(coarse.cluster_of[i] == coarse.cluster_of[j]);
        }
      }
    }
  }
}
