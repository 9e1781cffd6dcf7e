#include "upm/mining.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>

namespace upm {

namespace {

constexpr std::size_t kBruteForceUniverseLimit = 20;

void validate(const TransactionDB& db, const MiningOptions& options) {
  if (!(options.beta > 0.0 && options.beta <= 1.0)) {
    throw Error(ErrorCode::InvalidBeta, "beta must lie in (0, 1], got " + std::to_string(options.beta));
  }
  if (options.max_len == 0) {
    throw Error(ErrorCode::InvalidArgument, "max_len must be >= 1");
  }
  for (const auto& t : db.transactions) {
    if (!t.empty() && t.back() >= db.universe_size()) {
      throw Error(ErrorCode::ItemOutOfRange, "transaction item " + std::to_string(t.back()) +
                                                 " outside universe of " +
                                                 std::to_string(db.universe_size()));
    }
  }
}

class Bitset {
 public:
  explicit Bitset(std::size_t bits) : words_((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

 private:
  std::vector<std::uint64_t> words_;
};

PatternSet empty_result(const MiningOptions& options) {
  PatternSet out;
  out.beta = options.beta;
  out.max_len = options.max_len;
  out.strict = options.strict;
  return out;
}

}  // namespace

bool meets_support(std::size_t count, std::size_t n, double beta, bool strict) {
  const double s = static_cast<double>(count) / static_cast<double>(n);
  return strict ? s > beta : s >= beta;
}

Itemset PatternSet::item_union() const {
  std::set<Item> items;
  for (const auto& p : patterns) items.insert(p.items.begin(), p.items.end());
  return Itemset(items.begin(), items.end());
}

double support(const TransactionDB& db, std::span<const Item> itemset) {
  if (db.transactions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "support over an empty database");
  }
  for (Item i : itemset) {
    if (i >= db.universe_size()) {
      throw Error(ErrorCode::ItemOutOfRange, "item " + std::to_string(i) + " outside universe of " +
                                                 std::to_string(db.universe_size()));
    }
  }
  Itemset sorted(itemset.begin(), itemset.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t hits = 0;
  for (const auto& t : db.transactions) {
    if (std::includes(t.begin(), t.end(), sorted.begin(), sorted.end())) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(db.transactions.size());
}

PatternSet apriori(const TransactionDB& db, const MiningOptions& options) {
  validate(db, options);
  PatternSet out = empty_result(options);
  const std::size_t n = db.size();
  if (n == 0) return out;

  std::vector<std::size_t> item_counts(db.universe_size(), 0);
  for (const auto& t : db.transactions) {
    for (Item i : t) ++item_counts[i];
  }

  std::vector<Itemset> level;
  for (std::size_t i = 0; i < item_counts.size(); ++i) {
    if (meets_support(item_counts[i], n, options.beta, options.strict)) {
      level.push_back({static_cast<Item>(i)});
      out.patterns.push_back({{static_cast<Item>(i)}, item_counts[i],
                              static_cast<double>(item_counts[i]) / static_cast<double>(n)});
    }
  }

  // Transactions restricted to frequent items, as bitsets for subset tests.
  std::vector<Bitset> bits;
  std::vector<std::size_t> lengths;
  if (options.max_len > 1 && level.size() > 1) {
    bits.reserve(n);
    for (const auto& t : db.transactions) {
      Bitset b(db.universe_size());
      std::size_t len = 0;
      for (Item i : t) {
        if (meets_support(item_counts[i], n, options.beta, options.strict)) {
          b.set(i);
          ++len;
        }
      }
      bits.push_back(std::move(b));
      lengths.push_back(len);
    }
  }

  for (std::size_t k = 2; k <= options.max_len && level.size() > 1; ++k) {
    // `level` is sorted lexicographically, so itemsets sharing a prefix are contiguous.
    std::vector<Itemset> candidates;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        if (!std::equal(level[a].begin(), level[a].end() - 1, level[b].begin())) break;
        Itemset cand = level[a];
        cand.push_back(level[b].back());
        bool all_frequent = true;
        Itemset sub(k - 1);
        for (std::size_t drop = 0; drop + 2 < k && all_frequent; ++drop) {
          std::copy(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(drop), sub.begin());
          std::copy(cand.begin() + static_cast<std::ptrdiff_t>(drop) + 1, cand.end(),
                    sub.begin() + static_cast<std::ptrdiff_t>(drop));
          all_frequent = std::binary_search(level.begin(), level.end(), sub);
        }
        if (all_frequent) candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty()) break;

    std::vector<std::size_t> counts(candidates.size(), 0);
    for (std::size_t t = 0; t < n; ++t) {
      if (lengths[t] < k) continue;
      const Bitset& b = bits[t];
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& cand = candidates[c];
        if (std::all_of(cand.begin(), cand.end(), [&](Item i) { return b.test(i); })) ++counts[c];
      }
    }

    std::vector<Itemset> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (meets_support(counts[c], n, options.beta, options.strict)) {
        out.patterns.push_back({candidates[c], counts[c],
                                static_cast<double>(counts[c]) / static_cast<double>(n)});
        next.push_back(std::move(candidates[c]));
      }
    }
    level = std::move(next);
  }
  return out;
}

PatternSet brute_force_mine(const TransactionDB& db, const MiningOptions& options) {
  validate(db, options);
  const std::size_t universe = db.universe_size();
  if (universe > kBruteForceUniverseLimit) {
    throw Error(ErrorCode::UniverseTooLarge, "brute-force mining limited to " +
                                                 std::to_string(kBruteForceUniverseLimit) +
                                                 " items, universe has " + std::to_string(universe));
  }
  PatternSet out = empty_result(options);
  const std::size_t n = db.size();
  if (n == 0) return out;

  std::vector<std::uint32_t> masks;
  masks.reserve(n);
  for (const auto& t : db.transactions) {
    std::uint32_t m = 0;
    for (Item i : t) m |= 1u << i;
    masks.push_back(m);
  }

  const std::size_t max_len = std::min(options.max_len, universe);
  for (std::size_t len = 1; len <= max_len; ++len) {
    // Lexicographic enumeration of len-combinations of [0, universe).
    std::vector<std::size_t> idx(len);
    for (std::size_t i = 0; i < len; ++i) idx[i] = i;
    while (true) {
      std::uint32_t m = 0;
      for (auto i : idx) m |= 1u << i;
      std::size_t count = 0;
      for (auto tm : masks) {
        if ((tm & m) == m) ++count;
      }
      if (meets_support(count, n, options.beta, options.strict)) {
        out.patterns.push_back({Itemset(idx.begin(), idx.end()), count,
                                static_cast<double>(count) / static_cast<double>(n)});
      }
      std::size_t pos = len;
      while (pos > 0 && idx[pos - 1] == universe - len + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < len; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

std::string format_patterns(const PatternSet& patterns) {
  std::ostringstream out;
  char buf[32];
  for (const auto& p : patterns.patterns) {
    std::snprintf(buf, sizeof buf, "%.9g", p.support);
    out << buf << '\t';
    for (std::size_t i = 0; i < p.items.size(); ++i) {
      if (i) out << ' ';
      out << p.items[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace upm
