/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "wvote/core.hpp"
#include "wvote/rng.hpp"

using namespace wvote;

TEST_CASE("clamp_profile") {
  CHECK(clamp_profile(1.2, 0.5, 1e-5) == doctest::Approx(0.99999).epsilon(1e-12));
  CHECK(clamp_profile(0.3, 0.5, 1e-5) == 0.5);
  CHECK(clamp_profile(0.9, 0.5, 1e-5) == 0.9);

  SUBCASE("output always satisfies the profile invariants") {
    SubRng rng(7, RngPurpose::generic);
    for (int i = 0; i < 1000; ++i) {
      const double raw = (rng.uniform01() - 0.5) * 1e6;
      const double p = clamp_profile(raw);
      CHECK(p >= 0.5);
      CHECK(p <= 1.0 - 1e-5);
    }
    CHECK(clamp_profile(1e308) == 1.0 - 1e-5);
    CHECK(clamp_profile(-1e308) == 0.5);
  }

  SUBCASE("tight cap variant") {
    CHECK(clamp_profile(2.0, 0.5, kTightCapMargin) == 1.0 - 1e-15);
  }
}

TEST_CASE("committee validation") {
  std::vector<CommitteeMember> ok{{0, 0.9, 1.0}, {1, 0.6, 2.0}};
  const Committee c = make_committee(3, ok, kDefaultCapMargin);
  CHECK(c.size() == 2);
  CHECK(c.slot == 3);
  CHECK(c.profiles() == std::vector<double>{0.9, 0.6});
  CHECK(c.stakes() == std::vector<double>{1.0, 2.0});

  CHECK_THROWS_AS(make_committee(0, {}, kDefaultCapMargin), std::invalid_argument);
  CHECK_THROWS_AS(make_committee(0, {{5, 0.9, 1.0}, {5, 0.6, 1.0}}, kDefaultCapMargin),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_committee(0, {{0, 0.4, 1.0}}, kDefaultCapMargin),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_committee(0, {{0, 1.0, 1.0}}, kDefaultCapMargin),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_committee(0, {{0, 0.9, -1.0}}, kDefaultCapMargin),
                  std::invalid_argument);
  // 0.99999 is legal under the default cap but not under a wider margin.
  CHECK_NOTHROW(make_committee(0, {{0, 1.0 - 1e-5, 0.0}}, kDefaultCapMargin));
  CHECK_THROWS_AS(make_committee(0, {{0, 1.0 - 1e-5, 0.0}}, 1e-3), std::invalid_argument);
}

TEST_CASE("welfare params") {
  WelfareParams w;
  CHECK_NOTHROW(w.validate());
  CHECK(!w.warning());

  WelfareParams bad = w;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.alpha = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = w;
  bad.loss_reject_valid = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = w;
  bad.loss_accept_invalid = -2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  WelfareParams inverted{0.5, 12.0, 1e-2};
  CHECK_NOTHROW(inverted.validate());  // warns, does not error
  CHECK(inverted.warning());
  WelfareParams equal{0.5, 1.0, 1.0};
  CHECK(equal.warning());
}

TEST_CASE("substreams are independent and reproducible") {
  SubRng a(42, RngPurpose::committee, 7);
  SubRng b(42, RngPurpose::committee, 7);
  SubRng c(42, RngPurpose::committee, 8);
  SubRng d(42, RngPurpose::validity, 7);
  bool all_equal_c = true;
  bool all_equal_d = true;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    all_equal_c = all_equal_c && x == c.next_u64();
    all_equal_d = all_equal_d && x == d.next_u64();
  }
  CHECK(!all_equal_c);
  CHECK(!all_equal_d);

  SubRng u(1, RngPurpose::generic);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    mean += x;
  }
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
