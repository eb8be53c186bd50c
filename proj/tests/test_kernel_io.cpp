#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "wedgelab/kernel_io.hpp"

using namespace wedgelab;

TEST_CASE("chain round trip is bit exact") {
  ChainSequence chain = oracles::random_chain_raw(31, {3, 4, 2});
  std::string text = write_kernel_file(chain_to_file(chain));
  ChainSequence back = chain_from_file(read_kernel_file(text));
  REQUIRE(back.length() == chain.length());
  for (int l = 1; l <= chain.length(); ++l) {
    CHECK(back.space(l).labels == chain.space(l).labels);
    CHECK((back.kernel(l).weights().array() == chain.kernel(l).weights().array()).all());
  }
  // Writing the reread document reproduces the bytes.
  CHECK(write_kernel_file(chain_to_file(back)) == text);
}

TEST_CASE("reader reports the first violation with indices") {
  SUBCASE("row sum above one") {
    std::string text = R"({
      "spaces": [["a","b"], ["u","v"]],
      "kernels": [{"source_index": 1, "target_index": 0, "rows": [[0.9, 0.6], [0.1, 0.1]]}]
    })";
    try {
      read_kernel_file(text);
      CHECK(false);
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      CHECK(msg.find("kernels[0].rows") != std::string::npos);
      CHECK(msg.find("row 0") != std::string::npos);
    }
  }
  SUBCASE("negative weight") {
    std::string text = R"({
      "spaces": [["a","b"], ["u","v"]],
      "kernels": [{"source_index": 1, "target_index": 0, "rows": [[0.9, 0.0], [-0.2, 0.1]]}]
    })";
    CHECK_THROWS_WITH_AS(read_kernel_file(text),
                         doctest::Contains("kernels[0].rows"), ValidationError);
  }
  SUBCASE("bad space index") {
    std::string text = R"({
      "spaces": [["a","b"]],
      "kernels": [{"source_index": 3, "target_index": 0, "rows": [[0.5, 0.5]]}]
    })";
    CHECK_THROWS_WITH_AS(read_kernel_file(text),
                         doctest::Contains("kernels[0].source_index"), ValidationError);
  }
  SUBCASE("ragged rows") {
    std::string text = R"({
      "spaces": [["a","b"], ["u","v"]],
      "kernels": [{"source_index": 1, "target_index": 0, "rows": [[0.5, 0.5], [0.5]]}]
    })";
    CHECK_THROWS_WITH_AS(read_kernel_file(text), doctest::Contains("ragged"), ValidationError);
  }
  SUBCASE("duplicate labels") {
    std::string text = R"({"spaces": [["a","a"]], "kernels": []})";
    CHECK_THROWS_WITH_AS(read_kernel_file(text), doctest::Contains("spaces[0]"), ValidationError);
  }
  SUBCASE("invalid json") {
    CHECK_THROWS_WITH_AS(read_kernel_file("{nope"), doctest::Contains("invalid JSON"),
                         ValidationError);
  }
}

TEST_CASE("sidecar fields round trip") {
  KernelFile file;
  file.spaces = {FiniteStateSpace({"y"}), FiniteStateSpace({"x"})};
  MatrixXd rows(1, 1), counts(1, 1), errs(1, 1);
  rows << 0.5;
  counts << 50;
  errs << 0.070710678118654752;
  file.entries.push_back({1, 0, rows, counts, errs, std::string("n=100 seed=7")});
  KernelFile back = read_kernel_file(write_kernel_file(file));
  REQUIRE(back.entries.size() == 1);
  REQUIRE(back.entries[0].counts.has_value());
  REQUIRE(back.entries[0].stderrs.has_value());
  CHECK((*back.entries[0].counts)(0, 0) == 50.0);
  CHECK((*back.entries[0].stderrs)(0, 0) == errs(0, 0));
  CHECK(back.entries[0].meta == std::string("n=100 seed=7"));
}

TEST_CASE("17-digit values survive the round trip") {
  KernelFile file;
  file.spaces = {FiniteStateSpace({"y"}), FiniteStateSpace({"x"})};
  MatrixXd rows(1, 1);
  rows << 0.12345678901234567;
  file.entries.push_back({1, 0, rows, std::nullopt, std::nullopt, std::nullopt});
  KernelFile back = read_kernel_file(write_kernel_file(file));
  CHECK(back.entries[0].rows(0, 0) == rows(0, 0));
}
