#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aspen/harness/problem_spec.hpp"
#include "aspen/libsvm.hpp"
#include "test_support.hpp"

using namespace aspen;
using aspen::testing::data_path;

TEST_CASE("parses rows, labels and sparse entries") {
  const auto d = parse_libsvm("+1 1:0.5 4:-2\n-1 2:1e-3\n\n+1\n");
  REQUIRE(d.n_rows() == 3);
  CHECK(d.n_features == 4);
  CHECK(d.rows[0] == SparseRow{1, {{1, 0.5}, {4, -2.0}}});
  CHECK(d.rows[1] == SparseRow{-1, {{2, 1e-3}}});
  CHECK(d.rows[2].entries.empty());
}

TEST_CASE("label conventions map to -1/+1") {
  CHECK(parse_libsvm("0 1:1\n1 1:2\n").rows[0].label == -1);
  CHECK(parse_libsvm("0 1:1\n1 1:2\n").rows[1].label == 1);
  CHECK(parse_libsvm("2 1:1\n1 1:2\n").rows[0].label == -1);
  CHECK(parse_libsvm("2 1:1\n1 1:2\n").rows[1].label == 1);
  CHECK(parse_libsvm("-1 1:1\n1 1:2\n").rows[1].label == 1);
  CHECK(parse_libsvm("+1.0 1:1\n").rows[0].label == 1);
}

TEST_CASE("whitespace variants") {
  const auto d = parse_libsvm("  -1\t3:1.5   7:2 \r\n+1 1:1");
  REQUIRE(d.n_rows() == 2);
  CHECK(d.rows[0] == SparseRow{-1, {{3, 1.5}, {7, 2.0}}});
  CHECK(d.n_features == 7);
}

TEST_CASE("fixture round trip is the identity") {
  for (const char* name : {"heart_synth.libsvm", "splice_synth.libsvm", "breast_cancer_scale.libsvm"}) {
    CAPTURE(name);
    const std::string text = harness::read_file(data_path(name));
    const auto parsed = parse_libsvm(text);
    CHECK(serialize_libsvm(parsed) == text);
    CHECK(parse_libsvm(serialize_libsvm(parsed)) == parsed);
  }
  const auto tiny = load_libsvm(data_path("tiny10.libsvm"));
  CHECK(tiny.n_rows() == 10);
  CHECK(tiny.n_features == 5);
  CHECK(parse_libsvm(serialize_libsvm(tiny)) == tiny);
}

TEST_CASE("shortest round-trip values survive serialisation") {
  SparseDataset d;
  d.n_features = 3;
  d.rows.push_back({1, {{1, 0.1}, {2, 1.0 / 3.0}, {3, -5e-300}}});
  d.rows.push_back({-1, {{2, 123456789.125}}});
  CHECK(parse_libsvm(serialize_libsvm(d)) == d);
}

TEST_CASE("fixture shapes") {
  CHECK(load_libsvm(data_path("heart_synth.libsvm")).n_rows() == 270);
  CHECK(load_libsvm(data_path("heart_synth.libsvm")).n_features == 13);
  CHECK(load_libsvm(data_path("breast_cancer_scale.libsvm")).n_rows() == 569);
  CHECK(load_libsvm(data_path("splice_synth.libsvm")).n_rows() == 500);
}

TEST_CASE("malformed inputs are rejected with line numbers") {
  struct Case {
    const char* text;
    std::size_t line;
    const char* fragment;
  };
  const Case corpus[] = {
      {"+1 1:1\nabc 1:1\n", 2, "malformed label"},
      {"+1 1:1\n+1 1:1\n3 2:1\n", 3, "unsupported label"},
      {"0.5 1:1\n", 1, "unsupported label"},
      {"+1 1:1 2\n", 1, "expected <index>:<value>"},
      {"+1 x:1\n", 1, "malformed feature index"},
      {"+1 0:1\n", 1, "below 1"},
      {"+1 -3:1\n", 1, "below 1"},
      {"+1 3:1 2:1\n", 1, "does not increase"},
      {"+1 2:1 2:1\n", 1, "does not increase"},
      {"+1 1:abc\n", 1, "malformed feature value"},
      {"+1 1:\n", 1, "malformed feature value"},
      {"+1 1:nan\n", 1, "malformed feature value"},
      {"+1 1:inf\n", 1, "malformed feature value"},
      {"+1 1:1\n\n\n-1 1:1\n0 1:1\n", 5, "mixes label conventions"},
      {"+1 99999999999:1\n", 1, "too large"},
      {"", 1, "empty input"},
      {"\n \n", 2, "empty input"},
  };
  for (const auto& c : corpus) {
    CAPTURE(c.text);
    try {
      parse_libsvm(c.text);
      FAIL("accepted malformed input");
    } catch (const LibsvmParseError& e) {
      CHECK(e.line() == c.line);
      CHECK(std::string(e.what()).find("line " + std::to_string(c.line)) != std::string::npos);
      CHECK(std::string(e.detail()).find(c.fragment) != std::string::npos);
    }
  }
}

TEST_CASE("file errors name the file") {
  try {
    load_libsvm(data_path("bad.libsvm"));
    FAIL("bad.libsvm parsed");
  } catch (const LibsvmParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bad.libsvm:line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_libsvm(data_path("does_not_exist.libsvm")), std::runtime_error);
}

TEST_CASE("unit-norm row scaling") {
  auto d = parse_libsvm("+1 1:3 2:4\n-1\n+1 3:-2\n");
  scale_rows_to_unit_norm(d);
  CHECK(d.rows[0].entries[0].value == doctest::Approx(0.6));
  CHECK(d.rows[0].entries[1].value == doctest::Approx(0.8));
  CHECK(d.rows[1].entries.empty());
  CHECK(d.rows[2].entries[0].value == -1.0);
}
