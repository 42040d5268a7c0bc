#include <gtest/gtest.h>

#include <random>

#include "arcenv/errors.hpp"
#include "arcenv/tasks.hpp"
#include "support.hpp"

namespace arcenv {
namespace {

using namespace testing_support;

ErrorCode parse_error(const std::string& text) {
  try {
    parse_task_json(text, "x");
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::InvalidArgument;
}

TEST(TaskJson, ParsesTrainAndTest) {
  const RawTask t = parse_task_json(
      R"({"train":[{"input":[[1,2]],"output":[[2,1]]}],"test":[{"input":[[3]],"output":[[4]]}]})", "abc");
  EXPECT_EQ(t.id, "abc");
  ASSERT_EQ(t.demo_pairs.size(), 1u);
  EXPECT_EQ(t.demo_pairs[0].input, (RawGrid{{1, 2}}));
  EXPECT_EQ(t.test_pairs[0].output, (RawGrid{{4}}));
}

TEST(TaskJson, Errors) {
  EXPECT_EQ(parse_error("{"), ErrorCode::MalformedJson);
  EXPECT_EQ(parse_error("[]"), ErrorCode::MalformedJson);
  EXPECT_EQ(parse_error(R"({"train":[]})"), ErrorCode::MissingKeys);
  EXPECT_EQ(parse_error(R"({"train":[{"input":[[1]]}],"test":[{"input":[[1]],"output":[[1]]}]})"),
            ErrorCode::MissingKeys);
  EXPECT_EQ(parse_error(R"({"train":[{"input":[[1],[1,2]],"output":[[1]]}],"test":[{"input":[[1]],"output":[[1]]}]})"),
            ErrorCode::RaggedMatrix);
  EXPECT_EQ(parse_error(R"({"train":[{"input":[[12]],"output":[[1]]}],"test":[{"input":[[1]],"output":[[1]]}]})"),
            ErrorCode::ValueOutOfRange);
}

TEST(TaskJson, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const RawTask t = random_task(rng, "t" + std::to_string(i), 30, 5, 2);
    EXPECT_EQ(parse_task_json(serialize_task_json(t), t.id), t);
  }
}

TEST(Dataset, ScanIsSortedAndFiltered) {
  DatasetSpec spec;
  spec.root = data_dir() / "mini";
  const auto all = DatasetIndex::scan(spec);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all.entries()[0].id, "Most_Common_color_l6ab0lf3xztbyxsu3p");
  EXPECT_EQ(all.entries()[1].id, "flip_rows_a1");
  EXPECT_EQ(all.entries()[2].id, "recolor_b2");

  spec.task_ids = {"recolor_b2"};
  EXPECT_EQ(DatasetIndex::scan(spec).size(), 1u);

  spec.task_ids = {"absent"};
  try {
    DatasetIndex::scan(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnresolvedSubsetId);
  }
}

TEST(Dataset, NamedSubsetFile) {
  TempDir dir("subset");
  std::mt19937_64 rng(1);
  for (const char* id : {"a", "b", "c"}) {
    write_file(dir.path() / "training" / (std::string(id) + ".json"), serialize_task_json(random_task(rng, id, 5, 2, 1)));
  }
  write_file(dir.path() / "subsets" / "pick.yaml", "- c\n- a\n");
  DatasetSpec spec;
  spec.root = dir.path();
  spec.subset = "pick";
  const auto tasks = load_dataset(spec);
  ASSERT_EQ(tasks.size(), 2u);
  EXPECT_EQ(tasks[0].id, "a");
  EXPECT_EQ(tasks[1].id, "c");

  spec.subset = "missing";
  EXPECT_THROW(DatasetIndex::scan(spec), Error);
}

TEST(Dataset, MissingDirectory) {
  DatasetSpec spec;
  spec.root = data_dir() / "does-not-exist";
  try {
    DatasetIndex::scan(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingDirectory);
  }
}

TEST(Dataset, ParseErrorNamesFile) {
  DatasetSpec spec;
  spec.root = data_dir() / "bad";
  try {
    load_dataset(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RaggedMatrix);
    EXPECT_NE(std::string(e.what()).find("ragged_c3.json"), std::string::npos);
  }
}

TEST(Dataset, UnknownParser) {
  DatasetSpec spec;
  spec.root = data_dir() / "mini";
  spec.parser = "nope";
  try {
    DatasetIndex::scan(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownParser);
  }
}

TEST(Buffer, SlotsAndCounts) {
  std::mt19937_64 rng(2);
  RawTask t = random_task(rng, "t", 5, 1, 1);
  t.demo_pairs.resize(3, t.demo_pairs[0]);
  const TaskBuffer b = mini_buffer({t});
  EXPECT_EQ(b.size(), 1);
  EXPECT_EQ(b.demo_count, std::vector<int>{3});
  EXPECT_EQ(b.test_count, std::vector<int>{1});
  EXPECT_EQ(b.demo_inputs.size(), 5u);
  for (int p = 0; p < 3; ++p) EXPECT_EQ(crop(b.demo_input(0, p)), t.demo_pairs[p].input);
  for (int p = 3; p < 5; ++p) {
    EXPECT_EQ(b.demo_input(0, p), PaddedGrid());
    EXPECT_EQ(b.demo_output(0, p), PaddedGrid());
  }
  EXPECT_EQ(b.test_input(0, 1), PaddedGrid());
  EXPECT_EQ(b.find("t"), 0);
  EXPECT_FALSE(b.find("u").has_value());
}

TEST(Buffer, TooManyPairs) {
  std::mt19937_64 rng(3);
  RawTask t = random_task(rng, "t", 5, 1, 1);
  t.demo_pairs.resize(6, t.demo_pairs[0]);
  try {
    mini_buffer({t});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyPairs);
  }
}

TEST(Buffer, CapacityEnforced) {
  RawTask t{"big", {{RawGrid(6, std::vector<int>(6, 1)), {{1}}}}, {{{{1}}, {{1}}}}};
  try {
    mini_buffer({t});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionOutOfRange);
  }
}

TEST(Buffer, EmptyBuffer) {
  try {
    mini_buffer({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBuffer);
  }
  EXPECT_THROW(sample_task(PrngKey::from_seed(0), TaskBuffer{}), Error);
}

TEST(Buffer, MiniArcShapedFixtureLoads) {
  TempDir dir("mini149");
  const auto tasks = write_miniarc_fixture(dir.path(), 11, 1);
  DatasetSpec spec;
  spec.root = dir.path();
  const BufferLayout layout{Capacity::miniarc(), 5, 2};
  const TaskBuffer b = build_task_buffer(DatasetIndex::scan(spec), layout);
  ASSERT_EQ(b.size(), 149);
  for (int t = 0; t < b.size(); ++t) {
    EXPECT_EQ(b.task_ids[t], tasks[t].id);
    EXPECT_EQ(b.demo_count[t], static_cast<int>(tasks[t].demo_pairs.size()));
    EXPECT_EQ(b.test_count[t], static_cast<int>(tasks[t].test_pairs.size()));
    for (int p = 0; p < b.max_demo_pairs; ++p) {
      if (p < b.demo_count[t]) {
        EXPECT_EQ(crop(b.demo_input(t, p)), tasks[t].demo_pairs[p].input);
        EXPECT_EQ(crop(b.demo_output(t, p)), tasks[t].demo_pairs[p].output);
        EXPECT_TRUE(canonical(b.demo_input(t, p)));
      } else {
        EXPECT_TRUE(b.demo_input(t, p).empty());
      }
    }
    for (int q = 0; q < b.test_count[t]; ++q) EXPECT_EQ(crop(b.test_output(t, q)), tasks[t].test_pairs[q].output);
  }
}

TEST(Buffer, IndependentOfFileCreationOrder) {
  TempDir a("order-a");
  TempDir b("order-b");
  write_miniarc_fixture(a.path(), 11, 1);
  write_miniarc_fixture(b.path(), 11, 999);
  DatasetSpec sa;
  sa.root = a.path();
  DatasetSpec sb;
  sb.root = b.path();
  const BufferLayout layout{Capacity::miniarc(), 5, 2};
  EXPECT_EQ(build_task_buffer(DatasetIndex::scan(sa), layout), build_task_buffer(DatasetIndex::scan(sb), layout));
}

TEST(Buffer, LazyEqualsEager) {
  TempDir dir("lazy");
  write_miniarc_fixture(dir.path(), 12, 2);
  DatasetSpec spec;
  spec.root = dir.path();
  const BufferLayout layout{Capacity::miniarc(), 5, 2};
  const auto eager = load_dataset(spec);
  EXPECT_EQ(build_task_buffer(eager, layout), build_task_buffer(DatasetIndex::scan(spec), layout));
}

TEST(SampleTask, SingleTaskAlwaysZero) {
  TaskBuffer b;
  b.task_ids = {"only"};
  PrngKey k = PrngKey::from_seed(4);
  for (int i = 0; i < 100; ++i) {
    auto [idx, next] = sample_task(k, b);
    EXPECT_EQ(idx, 0);
    EXPECT_NE(next, k);
    k = next;
  }
}

TEST(SampleTask, FixedSeedFixedIndex) {
  TaskBuffer b;
  b.task_ids.resize(149);
  const auto [i1, k1] = sample_task(PrngKey::from_seed(42), b);
  const auto [i2, k2] = sample_task(PrngKey::from_seed(42), b);
  EXPECT_EQ(i1, i2);
  EXPECT_EQ(k1, k2);
  // The index is drawn from the first child of the key.
  EXPECT_EQ(i1, static_cast<int>(uniform_index(split_child(PrngKey::from_seed(42), 0), 149)));
}

}  // namespace
}  // namespace arcenv
