#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "upm/transactions.hpp"

namespace upm {

struct Pattern {
  Itemset items;          // ascending
  std::size_t count = 0;  // transactions containing `items`
  double support = 0.0;   // count / N

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct MiningOptions {
  double beta = 0.07;
  std::size_t max_len = 3;
  // supp > β instead of supp ≥ β.
  bool strict = false;
};

/// Frequent itemsets in canonical order: by cardinality, then lexicographic.
struct PatternSet {
  double beta = 0.0;
  std::size_t max_len = 0;
  bool strict = false;
  std::vector<Pattern> patterns;

  std::size_t size() const noexcept { return patterns.size(); }
  bool empty() const noexcept { return patterns.empty(); }

  /// Distinct items that occur in at least one pattern, ascending.
  Itemset item_union() const;
};

/// Fraction of transactions that contain every item of `itemset`.
double support(const TransactionDB& db, std::span<const Item> itemset);

/// Level-wise Apriori: candidates of size k are joined from frequent
/// (k−1)-itemsets sharing a (k−2)-prefix, pruned when any (k−1)-subset is
/// infrequent, then counted in one pass over the transactions.
PatternSet apriori(const TransactionDB& db, const MiningOptions& options);

/// Exhaustive enumeration of every itemset up to `max_len` over the item
/// universe. Reference for apriori; refuses universes larger than 20 items.
PatternSet brute_force_mine(const TransactionDB& db, const MiningOptions& options);

/// "support<TAB>i1 i2 ..." per pattern, support printed with 9 significant digits.
std::string format_patterns(const PatternSet& patterns);

/// The frequency test shared by both miners.
bool meets_support(std::size_t count, std::size_t n, double beta, bool strict);

}  // namespace upm
