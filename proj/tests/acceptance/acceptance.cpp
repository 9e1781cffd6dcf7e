// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Every check uses an oracle written here, independent of the library code
// under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "upm/aligner.hpp"
#include "upm/classifier.hpp"
#include "upm/eigen.hpp"
#include "upm/kmeans.hpp"
#include "upm/localizer.hpp"
#include "upm/mining.hpp"
#include "upm/npy.hpp"
#include "upm/ops.hpp"
#include "upm/pipeline.hpp"
#include "upm/synth.hpp"
#include "upm/transactions.hpp"

namespace fs = std::filesystem;
using namespace upm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- oracles ----

struct RandomDb {
  TransactionDB db;
  std::size_t universe = 0;
};

RandomDb random_db(std::mt19937_64& rng, std::size_t max_items, std::size_t max_rows) {
  std::uniform_int_distribution<std::size_t> items(1, max_items), rows(1, max_rows);
  std::uniform_real_distribution<double> dens(0.15, 0.75), u(0, 1);
  RandomDb r;
  r.universe = items(rng);
  const std::size_t n = rows(rng);
  const double density = dens(rng);
  r.db.height = 1;
  r.db.width = r.universe;
  for (std::size_t t = 0; t < n; ++t) {
    Itemset row;
    for (Item i = 0; i < r.universe; ++i) {
      if (u(rng) < density) row.push_back(i);
    }
    r.db.transactions.push_back(std::move(row));
  }
  return r;
}

std::size_t count_containing(const TransactionDB& db, const Itemset& items) {
  std::size_t c = 0;
  for (const auto& t : db.transactions) {
    const std::set<Item> s(t.begin(), t.end());
    c += std::all_of(items.begin(), items.end(), [&](Item i) { return s.count(i) > 0; });
  }
  return c;
}

// Itemset → count for every set of ≤ max_len items with count/N ≥ β.
std::map<Itemset, std::size_t> oracle_frequent(const TransactionDB& db, std::size_t universe, double beta,
                                               std::size_t max_len) {
  std::map<Itemset, std::size_t> out;
  const double n = static_cast<double>(db.transactions.size());
  for (std::uint32_t mask = 1; mask < (1u << universe); ++mask) {
    Itemset s;
    for (Item i = 0; i < universe; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    if (s.size() > max_len) continue;
    const std::size_t c = count_containing(db, s);
    if (n > 0 && static_cast<double>(c) / n >= beta) out[s] = c;
  }
  return out;
}

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0, 1);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = g(rng);
  }
  return a;
}

bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::size_t, std::size_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.emplace(a[i], b[i]).first->second != b[i]) return false;
    if (ba.emplace(b[i], a[i]).first->second != a[i]) return false;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- criteria ----

Outcome mining_oracle() {
  std::mt19937_64 rng(2024);
  const auto t0 = Clock::now();
  std::size_t mismatches = 0, patterns = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RandomDb r = random_db(rng, 12, 25);
    MiningOptions o;
    o.beta = 0.2 + 0.1 * static_cast<double>(trial % 7);
    o.max_len = 1 + static_cast<std::size_t>(trial % 3);
    const PatternSet a = apriori(r.db, o);
    const PatternSet b = brute_force_mine(r.db, o);
    patterns += a.patterns.size();
    // Exact sets and supports, checked against a third, in-test enumeration too.
    const auto oracle = oracle_frequent(r.db, r.universe, o.beta, o.max_len);
    bool ok = a.patterns == b.patterns && a.patterns.size() == oracle.size();
    for (const auto& p : a.patterns) {
      const auto it = oracle.find(p.items);
      ok = ok && it != oracle.end() && it->second == p.count &&
           p.support == static_cast<double>(p.count) / static_cast<double>(r.db.transactions.size());
    }
    mismatches += !ok;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt("200 databases, %zu patterns, %zu mismatches, %.2f s (limit 10 s)", patterns, mismatches, secs)};
}

std::size_t antimonotone_violations(const PatternSet& ps) {
  std::map<Itemset, std::size_t> counts;
  for (const auto& p : ps.patterns) counts[p.items] = p.count;
  std::size_t bad = 0;
  for (const auto& p : ps.patterns) {
    const std::size_t m = p.items.size();
    for (std::uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
      Itemset sub;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask & (1u << i)) sub.push_back(p.items[i]);
      }
      const auto it = counts.find(sub);
      bad += it == counts.end() || it->second < p.count;
    }
  }
  return bad;
}

Outcome anti_monotonicity() {
  std::mt19937_64 rng(77);
  std::size_t violations = 0, checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RandomDb r = random_db(rng, 12, 25);
    MiningOptions o;
    o.beta = 0.2 + 0.1 * static_cast<double>(trial % 7);
    o.max_len = 3;
    const PatternSet ps = apriori(r.db, o);
    violations += antimonotone_violations(ps);
    checked += ps.patterns.size();
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlantedOptions po;
    po.seed = seed;
    const auto f = make_planted_fixture(po);
    const auto db = build_transactions(f.stack, compute_threshold(f.stack, ThresholdMode::Global));
    const PatternSet ps = apriori(db, MiningOptions{});
    violations += antimonotone_violations(ps);
    checked += ps.patterns.size();
  }
  return {violations == 0, fmt("%zu patterns over 205 fixtures, %zu violations", checked, violations)};
}

Outcome support_map_faithfulness() {
  std::mt19937_64 rng(9);
  std::size_t bad_cells = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> side(2, 6);
    const std::size_t h = side(rng), w = side(rng);
    TransactionDB db;
    db.height = h;
    db.width = w;
    std::uniform_real_distribution<double> u(0, 1);
    const double density = 0.1 + 0.5 * u(rng);
    const std::size_t n = 10 + trial % 30;
    for (std::size_t t = 0; t < n; ++t) {
      Itemset row;
      for (Item i = 0; i < h * w; ++i) {
        if (u(rng) < density) row.push_back(i);
      }
      db.transactions.push_back(std::move(row));
    }
    MiningOptions o;
    o.beta = 0.2 + 0.1 * static_cast<double>(trial % 6);
    const SupportMap s = build_support_map(apriori(db, o), db);
    for (Item i = 0; i < h * w; ++i) {
      const std::size_t c = count_containing(db, {i});
      const bool frequent = static_cast<double>(c) / static_cast<double>(n) >= o.beta;
      const float v = s.at(i / w, i % w);
      bad_cells += (v > 0) != frequent || (frequent && v != static_cast<float>(c));
    }
  }
  return {bad_cells == 0, fmt("50 databases, %zu cells disagree with item counts", bad_cells)};
}

// Smallest, over all one-to-one matchings, of the largest matched distance.
double matched_error(const std::vector<PixelPoint>& found, const std::vector<Point>& truth) {
  if (found.size() != truth.size()) return INFINITY;
  std::vector<std::size_t> perm(found.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double worst = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      worst = std::max(worst, std::hypot(found[perm[i]].x - truth[i].x, found[perm[i]].y - truth[i].y));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Outcome planted_recovery() {
  const auto t0 = Clock::now();
  std::size_t hits = 0, precondition_failures = 0;
  double worst = 0;
  PipelineConfig cfg;  // β = 0.07, K = 4
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PlantedOptions po;
    po.seed = seed;
    const auto f = make_planted_fixture(po);
    const double n = static_cast<double>(po.maps);

    // The fixture must satisfy the stated signal and noise levels.
    const auto db = build_transactions(f.stack, compute_threshold(f.stack, ThresholdMode::Global));
    std::vector<std::size_t> freq(po.grid * po.grid, 0);
    for (const auto& t : db.transactions) {
      for (Item i : t) ++freq[i];
    }
    bool ok = po.groups == 4 && f.stack.channels() == 1024 && f.stack.height() == 28 && f.stack.width() == 28;
    for (double g : f.group_freq) ok = ok && g >= 0.12;
    for (std::size_t y = 0; y < po.grid; ++y) {
      for (std::size_t x = 0; x < po.grid; ++x) {
        const bool in_blob = std::any_of(f.blobs.begin(), f.blobs.end(), [&](const Box& b) {
          return static_cast<int>(x) >= b.x && static_cast<int>(x) < b.x + b.width && static_cast<int>(y) >= b.y &&
                 static_cast<int>(y) < b.y + b.height;
        });
        if (!in_blob) ok = ok && static_cast<double>(freq[y * po.grid + x]) < 0.05 * n;
      }
    }
    precondition_failures += !ok;

    const auto result = localize_parts(f.stack, cfg, po.image_size, po.image_size);
    const double err = matched_error(result.layout.centers, f.image_centers);
    worst = std::max(worst, err);
    hits += err <= 32.0;
  }
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(hits) / 50.0;
  return {rate >= 0.95 && precondition_failures == 0 && secs < 60.0,
          fmt("%zu/50 trials within 32 px (%.0f%%, need 95%%), worst %.1f px, %zu fixture precondition "
              "failures, %.1f s (limit 60 s)",
              hits, 100 * rate, worst, precondition_failures, secs)};
}

Outcome numerics() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<float> uf(-5, 5);

  std::size_t bilinear_bad = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t c = 1 + trial % 3, h = 3 + trial, w = 5 + 2 * trial;
    Tensor t({c, h, w});
    for (auto& v : t.data()) v = uf(rng);
    const Tensor same = bilinear_resize(t, h, w);
    bilinear_bad += !std::ranges::equal(same.data(), t.data());
    Tensor k({c, h, w});
    const float value = uf(rng);
    for (auto& v : k.data()) v = value;
    for (const auto& out : {bilinear_resize(k, 448, 448), bilinear_resize(k, 2, 3), bilinear_resize(k, 28, 28)}) {
      bilinear_bad += std::any_of(out.data().begin(), out.data().end(), [&](float v) { return v != value; });
    }
  }

  double worst_ratio = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_symmetric(rng, 50);
    const auto e = sym_eigen(a);
    double norm = 0;
    for (double v : a.values()) norm += v * v;
    norm = std::sqrt(norm);
    double resid = 0;
    for (std::size_t j = 0; j < 50; ++j) {
      double col = 0;
      for (std::size_t i = 0; i < 50; ++i) {
        double av = 0;
        for (std::size_t k = 0; k < 50; ++k) av += a(i, k) * e.vectors(k, j);
        col += std::pow(av - e.values[j] * e.vectors(i, j), 2);
      }
      resid = std::max(resid, std::sqrt(col));
    }
    worst_ratio = std::max(worst_ratio, resid / norm);
  }

  std::size_t trace_bad = 0, traces = 0;
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + 7 * trial, dim = 1 + trial % 4;
    Matrix pts(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) pts(i, d) = g(rng) + 3.0 * static_cast<double>(i % 3);
    }
    KMeansOptions o;
    o.k = 2 + trial % 5;
    o.seed = static_cast<std::uint64_t>(trial);
    const auto r = kmeans_cluster(pts, o);
    ++traces;
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
      trace_bad += r.inertia_trace[i] > r.inertia_trace[i - 1];
    }
  }

  const bool pass = bilinear_bad == 0 && worst_ratio <= 1e-8 && trace_bad == 0;
  return {pass, fmt("bilinear violations %zu; eigen residual max %.2e x ||A|| (limit 1e-8); "
                    "%zu k-means traces, %zu increases",
                    bilinear_bad, worst_ratio, traces, trace_bad)};
}

Outcome spectral_alignment() {
  std::size_t runs = 0, exact = 0;
  for (std::size_t k = 2; k <= 4; ++k) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(1000 * k + seed);
      std::uniform_real_distribution<double> u(0.2, 1.0);
      const std::size_t n = 60;
      std::vector<std::size_t> truth(n);
      for (std::size_t i = 0; i < n; ++i) truth[i] = i % k;
      std::shuffle(truth.begin(), truth.end(), rng);
      Matrix w(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (truth[i] == truth[j]) w(i, j) = w(j, i) = u(rng);
        }
      }
      const auto r = spectral_cluster_affinity(w, k, seed);
      ++runs;
      exact += same_partition(r.labels, truth);
    }
  }
  return {exact == runs, fmt("%zu/%zu block-diagonal affinities recovered exactly", exact, runs)};
}

Outcome svm() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix x(200, 2);
  std::vector<std::string> y;
  for (std::size_t i = 0; i < 200;) {
    const double a = u(rng), b = u(rng), s = 0.8 * a - 0.6 * b + 0.1;
    if (std::abs(s) < 0.05) continue;
    x(i, 0) = a;
    x(i, 1) = b;
    y.push_back(s > 0 ? "up" : "down");
    ++i;
  }
  const auto report = train_linear_svm_report(x, y, SvmOptions{});
  std::size_t correct = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    // Argmax of w·x + b, computed here rather than through predict().
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t c = 0; c < report.model.classes.size(); ++c) {
      const double s = report.model.weights[c][0] * x(i, 0) + report.model.weights[c][1] * x(i, 1) +
                       report.model.biases[c];
      if (s > best_score) best_score = s, best = c;
    }
    correct += report.model.classes[best] == y[i];
  }
  std::size_t drops = 0, passes = 0;
  for (const auto& t : report.traces) {
    passes += t.dual_objective.size();
    for (std::size_t i = 1; i < t.dual_objective.size(); ++i) {
      drops += t.dual_objective[i] < t.dual_objective[i - 1] - 1e-12 * std::abs(t.dual_objective[i - 1]);
    }
  }
  return {correct == 200 && drops == 0 && passes > 0,
          fmt("training accuracy %zu/200; %zu passes, %zu dual decreases", correct, passes, drops)};
}

Outcome layout_arithmetic() {
  SupportMap s;
  s.values = Tensor({1, 448, 448});
  for (auto& v : s.values.data()) v = 1.0f;
  s.scale = MapScale::Image;
  const PartLayout l = derive_part_layout({{224, 224}}, s, 0.25, 448, 448);

  std::vector<Descriptor> blocks(4 + 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1);
  for (auto& b : blocks) {
    for (int i = 0; i < 512; ++i) b.values.push_back(u(rng));
  }
  const auto fused = fuse_features(blocks);
  return {l.side == 112 && fused.values.size() == 3072,
          fmt("part side %d (want 112); fused length %zu (want 3072)", l.side, fused.values.size())};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("upm-accept-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path in = root / "in";
  fs::create_directories(in);
  std::vector<std::string> ids;
  for (std::uint64_t i = 0; i < 6; ++i) {
    PlantedOptions po;
    po.seed = 500 + i;
    const auto f = make_planted_fixture(po);
    const std::string id = "d" + std::to_string(i);
    write_tensor(f.stack, in / (id + ".stack.npy"));
    write_tensor(render_fixture_image(f, po), in / (id + ".image.npy"));
    ids.push_back(id);
  }
  auto run = [&](const std::string& name, std::size_t jobs) {
    PipelineConfig cfg;
    cfg.features_dir = in;
    cfg.out_dir = root / name;
    cfg.jobs = jobs;
    cfg.seed = 3;
    return summary_to_json(run_pipeline(cfg), cfg, false).dump();
  };
  const std::string a = run("a", 1), b = run("b", 1), c = run("c", 4);
  std::size_t differing = a != b || a != c;
  std::size_t compared = 1;
  for (const auto& id : ids) {
    for (const std::string ext : {".layout.json", ".overlay.ppm"}) {
      const std::string ref = slurp(root / "a" / (id + ext));
      differing += ref.empty() || ref != slurp(root / "b" / (id + ext)) || ref != slurp(root / "c" / (id + ext));
      ++compared;
    }
  }
  fs::remove_all(root);
  return {differing == 0, fmt("%zu outputs compared across runs with jobs 1, 1, 4; %zu differ", compared, differing)};
}

}  // namespace

// With arguments, only the named criteria run.
int main(int argc, char** argv) {
  const std::set<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mining-oracle-equivalence", mining_oracle},
      {"anti-monotonicity", anti_monotonicity},
      {"support-map-faithfulness", support_map_faithfulness},
      {"planted-part-recovery", planted_recovery},
      {"numerics", numerics},
      {"spectral-alignment", spectral_alignment},
      {"svm", svm},
      {"layout-and-fusion-arithmetic", layout_arithmetic},
      {"determinism", determinism},
  };
  int failed = 0, ran = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    ++ran;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (ran == 0) {
    std::printf("FAIL no criterion matched the arguments\n");
    return 1;
  }
  std::printf("%d criteria, %d failed\n", ran, failed);
  return failed == 0 ? 0 : 1;
}
