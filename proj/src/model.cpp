#include "digtree/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "digtree/error.hpp"
#include "digtree/random.hpp"

namespace digtree {

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::BinaryTrie: return "binary-trie";
    case Family::MaryTrie: return "mary-trie";
    case Family::Patricia: return "patricia";
    case Family::BucketDST: return "bucket-dst";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "binary-trie") return Family::BinaryTrie;
  if (name == "mary-trie") return Family::MaryTrie;
  if (name == "patricia") return Family::Patricia;
  if (name == "bucket-dst") return Family::BucketDST;
  throw Error(ErrorCode::UsageError, "unknown family '" + std::string(name) + "'");
}

ModelSpec ModelSpec::binary_trie(double p) {
  ModelSpec spec{Family::BinaryTrie, {p, 1.0 - p}, 0};
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::mary_trie(std::vector<double> probs) {
  ModelSpec spec{Family::MaryTrie, std::move(probs), 0};
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::symmetric_mary_trie(int m) {
  if (m < 2) throw Error(ErrorCode::InvalidModel, "alphabet size must be >= 2");
  return mary_trie(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
}

ModelSpec ModelSpec::patricia(std::vector<double> probs) {
  ModelSpec spec{Family::Patricia, std::move(probs), 0};
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::symmetric_patricia(int m) {
  if (m < 2) throw Error(ErrorCode::InvalidModel, "alphabet size must be >= 2");
  return patricia(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
}

ModelSpec ModelSpec::bucket_dst(double p, int b) {
  ModelSpec spec{Family::BucketDST, {p, 1.0 - p}, b};
  spec.validate();
  return spec;
}

void ModelSpec::validate() const {
  const bool binary_only = family == Family::BinaryTrie || family == Family::BucketDST;
  if (binary_only && probs.size() != 2) {
    throw Error(ErrorCode::InvalidModel,
                std::string(family_name(family)) + " needs exactly two probabilities");
  }
  if (probs.size() < 2) {
    throw Error(ErrorCode::InvalidModel, "alphabet size must be >= 2");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(ErrorCode::InvalidProbs, "probabilities must lie strictly in (0,1)");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidProbs, "probabilities must sum to 1");
  }
  if (family == Family::BucketDST && bucket_capacity < 2) {
    throw Error(ErrorCode::InvalidModel, "bucket capacity must be >= 2");
  }
  if (family != Family::BucketDST && bucket_capacity != 0) {
    throw Error(ErrorCode::InvalidModel, "bucket capacity only applies to bucket-dst");
  }
}

bool ModelSpec::is_symmetric() const noexcept {
  return std::all_of(probs.begin(), probs.end(),
                     [&](double p) { return p == probs.front(); });
}

// ---------------------------------------------------------------------------
// Explicit keys

namespace {

int symbol_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return 10 + (c - 'a');
  return -1;
}

struct KeyFrame {
  std::vector<std::size_t> members;
  std::size_t position;  // symbol index inspected at this node
  std::uint64_t depth;   // depth of the node in the (compressed) tree
};

}  // namespace

ShapeStats shape_of_keys(const KeySet& keyset, ShapeFamily family) {
  const auto& keys = keyset.keys;
  int alphabet = keyset.alphabet_size;
  int max_symbol = -1;
  for (const auto& key : keys) {
    for (char c : key) {
      const int s = symbol_value(c);
      if (s < 0 || (alphabet > 0 && s >= alphabet)) {
        throw Error(ErrorCode::EmptyAlphabetSymbol,
                    "symbol '" + std::string(1, c) + "' outside the alphabet");
      }
      max_symbol = std::max(max_symbol, s);
    }
  }
  if (alphabet == 0) alphabet = std::max(2, max_symbol + 1);

  ShapeStats stats;
  if (keys.size() <= 1) return stats;

  std::vector<KeyFrame> stack;
  std::vector<std::size_t> all(keys.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  stack.push_back({std::move(all), 0, 0});

  std::vector<std::vector<std::size_t>> children(static_cast<std::size_t>(alphabet));
  while (!stack.empty()) {
    KeyFrame frame = std::move(stack.back());
    stack.pop_back();
    const std::size_t count = frame.members.size();

    // PATRICIA skips one-way branchings: advance the inspected symbol without
    // creating a node until the keys actually separate.
    for (;;) {
      for (auto& child : children) child.clear();
      for (std::size_t idx : frame.members) {
        const std::string& key = keys[idx];
        if (frame.position >= key.size()) {
          throw Error(ErrorCode::PrefixViolation,
                      "key '" + key + "' is a prefix of another key");
        }
        children[static_cast<std::size_t>(symbol_value(key[frame.position]))].push_back(idx);
      }
      const bool one_way = std::any_of(children.begin(), children.end(),
                                       [&](const auto& c) { return c.size() == count; });
      if (family == ShapeFamily::Patricia && one_way) {
        ++frame.position;
        continue;
      }
      break;
    }

    stats.size += 1;
    stats.kpl += count;
    stats.npl += frame.depth;
    for (auto& child : children) {
      if (child.size() >= 2) {
        stack.push_back({std::move(child), frame.position + 1, frame.depth + 1});
        child = {};
      }
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Count splitting

std::uint64_t default_depth_guard(std::uint64_t n) noexcept {
  return 64 + static_cast<std::uint64_t>(64.0 * std::log2(static_cast<double>(n) + 2.0));
}

namespace {

struct CountFrame {
  std::uint64_t count;
  std::uint64_t depth;  // node depth in the tree
  std::uint64_t level;  // symbols consumed so far (differs from depth in PATRICIA)
};

[[noreturn]] void depth_guard_exceeded(std::uint64_t guard) {
  throw Error(ErrorCode::DepthGuardExceeded,
              "recursion depth exceeded the guard of " + std::to_string(guard));
}

void split_counts(Rng& rng, const ModelSpec& model, std::uint64_t count,
                  std::vector<std::uint64_t>& out) {
  if (model.probs.size() == 2) {
    out[0] = sample_binomial(rng, count, model.probs[0]);
    out[1] = count - out[0];
  } else {
    sample_multinomial(rng, count, model.probs, out);
  }
}

ShapeStats simulate_trie(const ModelSpec& model, std::uint64_t n, Rng& rng,
                         std::uint64_t guard) {
  ShapeStats stats;
  std::vector<CountFrame> stack{{n, 0, 0}};
  std::vector<std::uint64_t> split(model.probs.size());
  while (!stack.empty()) {
    const CountFrame frame = stack.back();
    stack.pop_back();
    if (frame.count < 2) continue;
    if (frame.depth > guard) depth_guard_exceeded(guard);
    stats.size += 1;
    stats.kpl += frame.count;
    stats.npl += frame.depth;
    split_counts(rng, model, frame.count, split);
    for (std::uint64_t c : split) {
      if (c >= 2) stack.push_back({c, frame.depth + 1, frame.depth + 1});
    }
  }
  return stats;
}

ShapeStats simulate_patricia(const ModelSpec& model, std::uint64_t n, Rng& rng,
                             std::uint64_t guard) {
  ShapeStats stats;
  std::vector<CountFrame> stack{{n, 0, 0}};
  std::vector<std::uint64_t> split(model.probs.size());
  while (!stack.empty()) {
    CountFrame frame = stack.back();
    stack.pop_back();
    if (frame.count < 2) continue;
    for (;;) {
      if (frame.level > guard) depth_guard_exceeded(guard);
      split_counts(rng, model, frame.count, split);
      const bool one_way = std::any_of(split.begin(), split.end(),
                                       [&](std::uint64_t c) { return c == frame.count; });
      if (!one_way) break;
      ++frame.level;
    }
    stats.size += 1;
    stats.kpl += frame.count;
    stats.npl += frame.depth;
    for (std::uint64_t c : split) {
      if (c >= 2) stack.push_back({c, frame.depth + 1, frame.level + 1});
    }
  }
  return stats;
}

ShapeStats simulate_bucket_dst(const ModelSpec& model, std::uint64_t n, Rng& rng,
                               std::uint64_t guard) {
  const auto capacity = static_cast<std::uint64_t>(model.bucket_capacity);
  const double p = model.probs[0];
  ShapeStats stats;
  std::vector<CountFrame> stack{{n, 0, 0}};
  while (!stack.empty()) {
    const CountFrame frame = stack.back();
    stack.pop_back();
    if (frame.count == 0) continue;
    if (frame.depth > guard) depth_guard_exceeded(guard);
    stats.size += 1;
    stats.npl += frame.depth;
    if (frame.count <= capacity) continue;
    // The node keeps `capacity` keys; every other key moves one level down.
    const std::uint64_t rest = frame.count - capacity;
    stats.kpl += rest;
    const std::uint64_t left = sample_binomial(rng, rest, p);
    stack.push_back({left, frame.depth + 1, frame.depth + 1});
    stack.push_back({rest - left, frame.depth + 1, frame.depth + 1});
  }
  return stats;
}

}  // namespace

ShapeStats simulate_shape(const ModelSpec& model, std::uint64_t n, std::uint64_t seed,
                          const SimulationOptions& options) {
  model.validate();
  const std::uint64_t guard =
      options.depth_guard != 0 ? options.depth_guard : default_depth_guard(n);
  Rng rng(seed);
  switch (model.family) {
    case Family::BinaryTrie:
    case Family::MaryTrie: return simulate_trie(model, n, rng, guard);
    case Family::Patricia: return simulate_patricia(model, n, rng, guard);
    case Family::BucketDST: return simulate_bucket_dst(model, n, rng, guard);
  }
  return {};
}

std::vector<ShapeStats> sample_shapes(const ModelSpec& model, std::uint64_t n,
                                      std::uint64_t trials, std::uint64_t seed,
                                      unsigned workers, const SimulationOptions& options) {
  model.validate();
  std::vector<ShapeStats> out(trials);
  if (trials == 0) return out;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));

  // Each worker owns a contiguous block of trial indices; errors are reported
  // for the smallest failing index so the outcome is schedule independent.
  std::mutex error_mutex;
  std::uint64_t error_index = trials;
  std::exception_ptr error;

  auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      try {
        out[i] = simulate_shape(model, n, derive_subseed(seed, i), options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        return;
      }
    }
  };

  if (workers == 1) {
    run_block(0, trials);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(trials, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_block, begin, end);
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace digtree
