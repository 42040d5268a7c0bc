#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "arcenv/env.hpp"
#include "arcenv/grid.hpp"
#include "arcenv/ops.hpp"
#include "arcenv/tasks.hpp"
#include "oracle/reference_ops.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return ARCENV_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return data_dir() / "golden"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("arcenv-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline oracle::Grid random_raw(std::mt19937_64& rng, int h, int w, int colors) {
  std::uniform_int_distribution<int> color(0, colors - 1);
  oracle::Grid g(h, std::vector<int>(w));
  for (auto& row : g) {
    for (auto& v : row) v = color(rng);
  }
  return g;
}

inline arcenv::PaddedGrid to_padded(const oracle::Grid& g) { return arcenv::pad_into_buffer(g); }

inline arcenv::SelectionMask to_mask(const oracle::Mask& m) {
  arcenv::SelectionMask out;
  for (int r = 0; r < static_cast<int>(m.size()); ++r) {
    for (int c = 0; c < static_cast<int>(m[r].size()); ++c) out.set(r, c, m[r][c]);
  }
  return out;
}

/// Masks of varied density over a rows x cols capacity: empty, one bit, two
/// bits, rectangles, sparse and dense random.
inline oracle::Mask random_mask(std::mt19937_64& rng, int rows, int cols) {
  oracle::Mask m(rows, std::vector<bool>(cols, false));
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> rr(0, rows - 1);
  std::uniform_int_distribution<int> cc(0, cols - 1);
  switch (kind(rng)) {
    case 0:
      break;
    case 1:
      m[rr(rng)][cc(rng)] = true;
      break;
    case 2:
      m[rr(rng)][cc(rng)] = true;
      m[rr(rng)][cc(rng)] = true;
      break;
    case 3: {
      int r0 = rr(rng), r1 = rr(rng), c0 = cc(rng), c1 = cc(rng);
      for (int r = std::min(r0, r1); r <= std::max(r0, r1); ++r) {
        for (int c = std::min(c0, c1); c <= std::max(c0, c1); ++c) m[r][c] = true;
      }
      break;
    }
    case 4: {
      std::bernoulli_distribution on(0.2);
      for (auto& row : m) {
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = on(rng);
      }
      break;
    }
    default: {
      std::bernoulli_distribution on(0.7);
      for (auto& row : m) {
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = on(rng);
      }
      break;
    }
  }
  return m;
}

inline oracle::Clip random_clip(std::mt19937_64& rng, int max_dim) {
  oracle::Clip c;
  std::bernoulli_distribution present(0.8);
  if (!present(rng)) return c;
  std::uniform_int_distribution<int> dim(1, max_dim);
  const int h = dim(rng);
  const int w = dim(rng);
  c.grid = random_raw(rng, h, w, 10);
  std::bernoulli_distribution on(0.6);
  c.shape.assign(h, std::vector<bool>(w, false));
  for (auto& row : c.shape) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = on(rng);
  }
  c.shape[0][0] = true;
  c.present = true;
  return c;
}

inline arcenv::Clipboard to_clipboard(const oracle::Clip& c) {
  arcenv::Clipboard out;
  if (!c.present) return out;
  out.grid = to_padded(c.grid);
  out.shape = to_mask(c.shape);
  out.present = true;
  return out;
}

inline oracle::Clip from_clipboard(const arcenv::Clipboard& c) {
  oracle::Clip out;
  if (!c.present) return out;
  out.grid = arcenv::crop(c.grid);
  out.shape.assign(c.grid.height(), std::vector<bool>(c.grid.width(), false));
  for (int i = 0; i < c.grid.height(); ++i) {
    for (int j = 0; j < c.grid.width(); ++j) out.shape[i][j] = c.shape.test(i, j);
  }
  out.present = true;
  return out;
}

inline bool same_clip(const oracle::Clip& a, const oracle::Clip& b) {
  return a.present == b.present && (!a.present || (a.grid == b.grid && a.shape == b.shape));
}

/// Every cell outside the logical region is zero and every inside cell is a color.
inline bool canonical(const arcenv::PaddedGrid& g) {
  for (int r = 0; r < arcenv::kMaxDim; ++r) {
    for (int c = 0; c < arcenv::kMaxDim; ++c) {
      const int v = g.at(r, c);
      if (g.in_region(r, c) ? v > 9 : v != 0) return false;
    }
  }
  return true;
}

/// A task with random pair counts and grid sizes within max_dim.
inline arcenv::RawTask random_task(std::mt19937_64& rng, const std::string& id, int max_dim, int max_demo,
                                   int max_test) {
  std::uniform_int_distribution<int> dim(1, max_dim);
  std::uniform_int_distribution<int> demos(1, max_demo);
  std::uniform_int_distribution<int> tests(1, max_test);
  arcenv::RawTask t;
  t.id = id;
  auto pair = [&] {
    const int h = dim(rng), w = dim(rng);
    return arcenv::RawPair{random_raw(rng, h, w, 10), random_raw(rng, dim(rng), dim(rng), 10)};
  };
  for (int i = demos(rng); i > 0; --i) t.demo_pairs.push_back(pair());
  for (int i = tests(rng); i > 0; --i) t.test_pairs.push_back(pair());
  return t;
}

/// 149 random 5x5-bounded tasks with 1..5 demo and 1..2 test pairs, as
/// MiniARC ships them. Files are created in a shuffled order.
inline std::vector<arcenv::RawTask> write_miniarc_fixture(const std::filesystem::path& dir, std::uint64_t seed,
                                                          std::uint64_t creation_seed) {
  constexpr int kTasks = 149;
  std::mt19937_64 rng(seed);
  std::vector<arcenv::RawTask> tasks;
  for (int i = 0; i < kTasks; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "mini_%03d_%c", i, static_cast<char>('a' + i % 26));
    tasks.push_back(random_task(rng, id, 5, 5, 2));
  }
  std::vector<int> order(kTasks);
  for (int i = 0; i < kTasks; ++i) order[i] = i;
  std::mt19937_64 shuffle_rng(creation_seed);
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  for (int i : order) write_file(dir / (tasks[i].id + ".json"), arcenv::serialize_task_json(tasks[i]));
  return tasks;
}

/// Buffer holding the given tasks, miniarc capacity.
inline arcenv::TaskBuffer mini_buffer(const std::vector<arcenv::RawTask>& tasks) {
  return arcenv::build_task_buffer(tasks, arcenv::BufferLayout{arcenv::Capacity::miniarc(), 5, 2});
}

}  // namespace testing_support
