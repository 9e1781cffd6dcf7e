#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "upm/error.hpp"
#include "upm/transactions.hpp"

namespace upm::test {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("upm-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline TransactionDB make_db(std::size_t universe, std::vector<Itemset> rows) {
  TransactionDB db;
  db.height = 1;
  db.width = universe;
  db.transactions = std::move(rows);
  return db;
}

// Random database over `universe` items where each item joins a transaction
// with probability `density`.
inline TransactionDB random_db(std::mt19937_64& rng, std::size_t universe, std::size_t n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Itemset> rows(n);
  for (auto& t : rows) {
    for (Item i = 0; i < universe; ++i) {
      if (u(rng) < density) t.push_back(i);
    }
  }
  return make_db(universe, std::move(rows));
}

// Independent oracle: count transactions that contain every item.
inline std::size_t count_containing(const TransactionDB& db, const Itemset& items) {
  std::size_t c = 0;
  for (const auto& t : db.transactions) {
    c += std::all_of(items.begin(), items.end(),
                     [&](Item i) { return std::binary_search(t.begin(), t.end(), i); });
  }
  return c;
}

// Independent oracle: every itemset up to max_len with count/N >= beta,
// found by recursive enumeration (no bitmasks, no level-wise pruning).
inline std::map<Itemset, std::size_t> enumerate_frequent(const TransactionDB& db, double beta, std::size_t max_len) {
  std::map<Itemset, std::size_t> out;
  const double n = static_cast<double>(db.size());
  Itemset cur;
  auto rec = [&](auto&& self, Item next) -> void {
    for (Item i = next; i < db.universe_size(); ++i) {
      cur.push_back(i);
      const std::size_t c = count_containing(db, cur);
      if (static_cast<double>(c) / n >= beta) out[cur] = c;
      if (cur.size() < max_len) self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace upm::test

#define EXPECT_UPM_ERROR(stmt, expected_code)                                              \
  do {                                                                                     \
    bool upm_thrown_ = false;                                                              \
    try {                                                                                  \
      stmt;                                                                                \
    } catch (const ::upm::Error& upm_e_) {                                                 \
      upm_thrown_ = true;                                                                  \
      EXPECT_EQ(upm_e_.code(), expected_code) << upm_e_.what();                            \
    }                                                                                      \
    EXPECT_TRUE(upm_thrown_) << "expected " << ::upm::to_string(expected_code);            \
  } while (0)
