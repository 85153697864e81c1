#include "r1tc/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace r1tc;
using namespace testing_support;

TEST_CASE("tensor text round trip") {
  std::mt19937_64 rng(5);
  const Shape s({2, 3, 2});
  DenseTensor t = expand(random_factors(s, rng, -1.0, 1.0));
  t(0) = 1e-300;
  t(1) = -3.0;
  std::stringstream io;
  write_tensor(io, t);
  const DenseTensor back = read_tensor(io);
  CHECK(back.shape() == s);
  CHECK(back.values() == t.values());  // bitwise: shortest round-trip formatting
}

TEST_CASE("tensor reader accepts magic line and comments") {
  std::istringstream in("R1T v1\n# a comment\n2\n2 2\n1 2 # trailing\n3 4e0\n");
  const DenseTensor t = read_tensor(in);
  CHECK(t.shape() == Shape({2, 2}));
  CHECK(t(3) == 4.0);
}

TEST_CASE("tensor reader errors carry line numbers") {
  auto fails_at = [](const std::string& text, int line) {
    std::istringstream in(text);
    try {
      read_tensor(in, "t.txt");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      return;
    }
    FAIL("no ParseError for: " << text);
  };
  fails_at("", 0);
  fails_at("2\n2\n", 2);
  fails_at("2\n2 2\n1 2 3\n", 3);
  fails_at("2\n2 2\n1 2 x 4\n", 3);
  fails_at("2\n2 2\n1 2\n3 4 5\n", 4);
  fails_at("2\n2 0\n", 2);
}

TEST_CASE("mask file with and without values") {
  std::istringstream bare("3\n2 2 2\n1 1 1\n2 2 2\n1 2 2\n");
  const MaskFile m = read_mask(bare);
  CHECK_FALSE(m.has_values);
  CHECK(m.mask.size() == 3);
  CHECK(m.mask.contains(cell_of(m.mask.shape(), {1, 2, 2})));
  CHECK_THROWS(m.observed());

  std::istringstream valued("3\n2 2 2\n2 2 2 -8\n1 1 1 1\n");
  const MaskFile v = read_mask(valued);
  CHECK(v.has_values);
  const ObservedTensor obs = v.observed();
  // Values follow the sorted cell order.
  CHECK(obs.values[0] == 1.0);
  CHECK(obs.values[1] == -8.0);
}

TEST_CASE("mask reader rejects bad input") {
  auto rejects = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(read_mask(in), ParseError);
  };
  rejects("2\n2 2\n1 1\n1 1\n");        // duplicate
  rejects("2\n2 2\n1 3\n");             // out of range
  rejects("2\n2 2\n0 1\n");             // 0-based coordinate
  rejects("2\n2 2\n1 1 5\n2 2\n");      // mixed
  rejects("2\n2 2\n1\n");               // short tuple
}

TEST_CASE("observed tensor round trip") {
  const Mask m = example_linear_system_mask();
  Eigen::VectorXd vals(4);
  vals << 1, -4, -4, -8;
  std::stringstream io;
  write_observed(io, ObservedTensor(m, vals));
  const MaskFile back = read_mask(io);
  CHECK(back.mask == m);
  CHECK(back.values == vals);
  std::stringstream io2;
  write_mask(io2, m);
  CHECK(io2.str() == "3\n2 2 2\n1 1 1\n1 2 2\n2 1 2\n2 2 2\n");
}
