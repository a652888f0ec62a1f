#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace digtree {

enum class Family { BinaryTrie, MaryTrie, Patricia, BucketDST };

std::string_view family_name(Family family) noexcept;
/// Parses the CLI spelling ("binary-trie", "mary-trie", "patricia", "bucket-dst").
Family parse_family(std::string_view name);

/// A random digital tree model: the tree family, the symbol probabilities of
/// the memoryless source and (bucket DST only) the node capacity.
///
/// Construct through the named factories; they validate and throw
/// Error{InvalidProbs} or Error{InvalidModel}.
struct ModelSpec {
  Family family = Family::BinaryTrie;
  std::vector<double> probs;
  int bucket_capacity = 0;

  static ModelSpec binary_trie(double p);
  static ModelSpec mary_trie(std::vector<double> probs);
  static ModelSpec symmetric_mary_trie(int m);
  static ModelSpec patricia(std::vector<double> probs);
  static ModelSpec symmetric_patricia(int m);
  static ModelSpec bucket_dst(double p, int b);

  void validate() const;

  int alphabet_size() const noexcept { return static_cast<int>(probs.size()); }
  /// All symbol probabilities equal.
  bool is_symmetric() const noexcept;
  /// Binary PATRICIA: every split is proper, so S_n = n - 1.
  bool deterministic_size() const noexcept {
    return family == Family::Patricia && probs.size() == 2;
  }

  bool operator==(const ModelSpec&) const = default;
};

/// Shape of one tree: size S (internal nodes), key path length K
/// (sum of external-node depths) and node path length N (sum of
/// internal-node depths).
struct ShapeStats {
  std::uint64_t size = 0;
  std::uint64_t kpl = 0;
  std::uint64_t npl = 0;

  bool operator==(const ShapeStats&) const = default;
};

/// Finite keys over {0, ..., alphabet_size - 1}. Each character of a key is
/// one symbol written as a base-36 digit ('0'-'9', then 'a'-'z').
/// alphabet_size == 0 means "infer from the largest symbol present".
struct KeySet {
  std::vector<std::string> keys;
  int alphabet_size = 0;
};

enum class ShapeFamily { Trie, Patricia };

/// Exact shape of the tree built from explicit keys.
///
/// Throws Error{PrefixViolation} when a key is exhausted while it still shares
/// a node with another key, and Error{EmptyAlphabetSymbol} for a symbol
/// outside the alphabet.
ShapeStats shape_of_keys(const KeySet& keys, ShapeFamily family);

struct SimulationOptions {
  /// Maximum recursion depth; 0 selects 64 + 64 * log2(n + 2).
  std::uint64_t depth_guard = 0;
};

std::uint64_t default_depth_guard(std::uint64_t n) noexcept;

/// One random tree of `n` keys, grown by recursive multinomial splitting of
/// key counts. A deterministic function of (model, n, seed).
ShapeStats simulate_shape(const ModelSpec& model, std::uint64_t n,
                          std::uint64_t seed, const SimulationOptions& options = {});

/// `trials` independent trees; trial i is simulate_shape with seed
/// derive_subseed(seed, i). The result does not depend on `workers`
/// (0 = hardware concurrency).
std::vector<ShapeStats> sample_shapes(const ModelSpec& model, std::uint64_t n,
                                      std::uint64_t trials, std::uint64_t seed,
                                      unsigned workers = 0,
                                      const SimulationOptions& options = {});

}  // namespace digtree
