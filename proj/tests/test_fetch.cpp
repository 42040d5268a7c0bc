#include <gtest/gtest.h>

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <optional>

#include "arcenv/errors.hpp"
#include "arcenv/tasks.hpp"
#include "support.hpp"

namespace arcenv {
namespace {

using namespace testing_support;
namespace fs = std::filesystem;

struct TarEntry {
  std::string name;
  std::string body;
  char type = '0';
};

// Minimal ustar writer.
std::string make_tar(const std::vector<TarEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    char h[512];
    std::memset(h, 0, sizeof(h));
    std::memcpy(h, e.name.data(), std::min<std::size_t>(e.name.size(), 100));
    std::snprintf(h + 100, 8, "%07o", 0644);
    std::snprintf(h + 108, 8, "%07o", 0);
    std::snprintf(h + 116, 8, "%07o", 0);
    std::snprintf(h + 124, 12, "%011o", static_cast<unsigned>(e.body.size()));
    std::snprintf(h + 136, 12, "%011o", 0);
    h[156] = e.type;
    std::memcpy(h + 257, "ustar", 6);
    std::memcpy(h + 263, "00", 2);
    std::memset(h + 148, ' ', 8);
    unsigned sum = 0;
    for (unsigned char c : h) sum += c;
    std::snprintf(h + 148, 8, "%06o", sum);
    out.append(h, 512);
    out += e.body;
    out.append((512 - e.body.size() % 512) % 512, '\0');
  }
  out.append(1024, '\0');
  return out;
}

std::string gzip(const std::string& data) {
  z_stream zs{};
  EXPECT_EQ(deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY), Z_OK);
  std::string out(deflateBound(&zs, data.size()) + 64, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  EXPECT_EQ(deflate(&zs, Z_FINISH), Z_STREAM_END);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

const std::string kTaskA = R"({"train": [{"input": [[1]], "output": [[2]]}], "test": [{"input": [[3]], "output": [[4]]}]})";
const std::string kTaskB = R"({"train": [{"input": [[5, 5]], "output": [[6, 6]]}], "test": [{"input": [[7]], "output": [[8]]}]})";

std::string fixture_archive() {
  return gzip(make_tar({
      {"Repo-main/", "", '5'},
      {"Repo-main/README", "readme"},
      {"Repo-main/data/", "", '5'},
      {"Repo-main/data/training/a.json", kTaskA},
      {"Repo-main/data/training/b.json", kTaskB},
      {"../escape.json", "x"},
      {"/abs.json", "x"},
  }));
}

struct Served {
  TempDir dir{"fetch"};
  fs::path archive = dir.path() / "ds.tar.gz";
  std::string digest;

  Served() {
    const std::string bytes = fixture_archive();
    write_file(archive, bytes);
    digest = sha256_hex(bytes);
  }

  std::vector<DatasetSource> table(const std::string& sha) const {
    return {DatasetSource{"toy", "file://" + archive.string(), sha, "Toy", "Repo-main/data"}};
  }
};

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Extract, StripsPrefixAndRejectsEscapes) {
  TempDir out("extract");
  extract_tar_gz(fixture_archive(), out.path(), "Repo-main/data");
  EXPECT_EQ(read_file(out.path() / "training" / "a.json"), kTaskA);
  EXPECT_TRUE(fs::exists(out.path() / "training" / "b.json"));
  EXPECT_FALSE(fs::exists(out.path() / "README"));
  EXPECT_FALSE(fs::exists(out.path().parent_path() / "escape.json"));
  EXPECT_FALSE(fs::exists(out.path() / "escape.json"));

  TempDir all("extract_all");
  extract_tar_gz(fixture_archive(), all.path());
  EXPECT_EQ(read_file(all.path() / "Repo-main" / "README"), "readme");
  EXPECT_THROW(extract_tar_gz("not gzip", all.path()), Error);
}

TEST(Fetch, PinnedDownloadLoads) {
  Served s;
  TempDir dest("dest");
  const fs::path dir = fetch_dataset("toy", dest.path(), s.table(s.digest));
  EXPECT_EQ(dir, dest.path() / "Toy");
  DatasetSpec spec;
  spec.root = dir;
  const auto tasks = load_dataset(spec);
  ASSERT_EQ(tasks.size(), 2u);
  EXPECT_EQ(tasks[0].id, "a");
  EXPECT_EQ(tasks[1].demo_pairs[0].output, (RawGrid{{6, 6}}));
}

TEST(Fetch, IdempotentWithoutNetwork) {
  Served s;
  TempDir dest("dest");
  fetch_dataset("toy", dest.path(), s.table(s.digest));
  fs::remove(s.archive);
  // Second call sees the completed download and never opens the URL.
  EXPECT_EQ(fetch_dataset("toy", dest.path(), s.table(s.digest)), dest.path() / "Toy");
}

TEST(Fetch, Errors) {
  Served s;
  TempDir dest("dest");
  auto code = [&](const std::string& name, const std::vector<DatasetSource>& table, bool unpinned = false) {
    try {
      fetch_dataset(name, dest.path(), table, FetchOptions{unpinned});
    } catch (const Error& e) {
      return std::optional<ErrorCode>(e.code());
    }
    return std::optional<ErrorCode>();
  };
  EXPECT_EQ(code("missing", s.table(s.digest)), ErrorCode::UnknownDataset);
  EXPECT_EQ(code("toy", s.table(std::string(64, '0'))), ErrorCode::DigestMismatch);
  EXPECT_FALSE(fs::exists(dest.path() / "Toy"));
  EXPECT_EQ(code("toy", s.table("")), ErrorCode::DigestMismatch);
  auto gone = s.table(s.digest);
  gone[0].url = "file://" + (s.dir.path() / "nope.tar.gz").string();
  EXPECT_EQ(code("toy", gone), ErrorCode::Network);
  EXPECT_EQ(code("toy", s.table(""), true), std::nullopt);
  EXPECT_TRUE(fs::exists(dest.path() / "Toy" / "training" / "a.json"));
}

TEST(DatasetTable, DefaultsAndParsing) {
  const auto table = default_dataset_table();
  ASSERT_EQ(table.size(), 3u);
  EXPECT_EQ(table[0].name, "miniarc");
  EXPECT_EQ(table[0].directory, "MiniARC");
  EXPECT_EQ(table[1].name, "arc-agi-1");
  EXPECT_EQ(table[2].name, "arc-agi-2");
  const auto parsed = parse_dataset_table("- name: x\n  url: file:///tmp/x.tar.gz\n");
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].directory, "x");
  EXPECT_TRUE(parsed[0].sha256.empty());
  EXPECT_THROW(parse_dataset_table("name: x\n"), Error);
  EXPECT_THROW(parse_dataset_table("- url: y\n"), Error);
}

}  // namespace
}  // namespace arcenv
