#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "binshift/bitstream.hpp"

using namespace binshift;

TEST_CASE("at: pinned examples") {
  CHECK(Bitstream::parse("evp:01/0").at(1) == 1);
  CHECK(Bitstream::parse("rule:squares").at(4) == 1);
  CHECK(Bitstream::parse("evp:0/1").at(7) == 1);
  CHECK(Bitstream::parse("evp:01/0").at(0) == 0);
}

TEST_CASE("rule streams") {
  const Bitstream sq = Bitstream::rule("squares");
  CHECK(sq.at(0) == 0);
  CHECK(sq.at(1) == 1);
  CHECK(sq.at(2) == 0);
  CHECK(sq.at(9) == 1);
  CHECK(sq.at(10) == 0);
  CHECK(sq.at(16) == 1);
  CHECK(sq.asserted_aperiodic());

  const Bitstream tm = Bitstream::rule("thue-morse");
  const std::vector<std::uint8_t> expected{0, 1, 1, 0, 1, 0, 0, 1};
  CHECK(tm.digits(8) == expected);

  CHECK_THROWS_AS(Bitstream::rule("fibonacci"), Error);
}

TEST_CASE("prefix tail policies") {
  const Bitstream zero = Bitstream::prefix({0, 1, 1});
  CHECK(zero.at(2) == 1);
  CHECK(zero.at(3) == 0);
  CHECK(zero.at(100) == 0);

  const Bitstream strict = Bitstream::prefix({0, 1, 1}, TailPolicy::ErrorBeyond);
  CHECK(strict.at(2) == 1);
  CHECK_THROWS_AS(strict.at(3), IndexBeyondPrefix);
  CHECK(strict.at_known(2).has_value());
  CHECK_FALSE(strict.at_known(3).has_value());
}

TEST_CASE("eventually periodic streams repeat with their period") {
  std::mt19937_64 rng(0xB1A5ED10);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t q = rng() % 6;
    const std::size_t p = 1 + rng() % 6;
    std::vector<std::uint8_t> pre(q), per(p);
    for (auto& b : pre) b = rng() & 1;
    for (auto& b : per) b = rng() & 1;
    (q ? pre[0] : per[0]) = 0;
    const Bitstream s = Bitstream::eventually_periodic(pre, per);
    for (std::size_t j = q; j < 4 * (q + p); ++j) CHECK(s.at(j) == s.at(j + p));
  }
}

TEST_CASE("parse: grammar cases") {
  const Bitstream e = Bitstream::parse("evp:01/0");
  CHECK(e.kind() == StreamKind::EventuallyPeriodic);
  CHECK(e.preperiod() == std::vector<std::uint8_t>{0, 1});
  CHECK(e.period() == std::vector<std::uint8_t>{0});

  const Bitstream r = Bitstream::parse("rule:squares");
  CHECK(r.kind() == StreamKind::Rule);
  CHECK(r.rule_name() == "squares");
  CHECK(r.asserted_aperiodic());

  const Bitstream p = Bitstream::parse("prefix:0010");
  CHECK(p.kind() == StreamKind::Prefix);
  CHECK(p.prefix_policy() == TailPolicy::ZeroExtend);

  const Bitstream pt = Bitstream::parse("perturbed:evp:01/0@3");
  CHECK(pt.kind() == StreamKind::Perturbed);
  CHECK(pt.perturbation_point() == 3);
  CHECK(pt.perturbation_base().format() == "evp:01/0");
}

TEST_CASE("parse: errors carry positions") {
  CHECK_THROWS_AS(Bitstream::parse("evp:0/"), ParseError);
  CHECK_THROWS_AS(Bitstream::parse("prefix:"), ParseError);
  CHECK_THROWS_AS(Bitstream::parse("bogus:01"), ParseError);
  CHECK_THROWS_AS(Bitstream::parse("evp:01/0 "), ParseError);
  CHECK_THROWS_AS(Bitstream::parse("rule:unknown-rule"), ParseError);
  CHECK_THROWS_AS(Bitstream::parse("perturbed:evp:01/0@0"), ParseError);
  try {
    Bitstream::parse("evp:0/");
  } catch (const ParseError& e) {
    CHECK(e.position == 6);
  }
}

TEST_CASE("parse round-trips the canonical format") {
  std::mt19937_64 rng(0xB1A5ED11);
  const auto roundtrip = [](const Bitstream& s) {
    const std::string text = s.format();
    CHECK(Bitstream::parse(text).format() == text);
  };
  for (int trial = 0; trial < 50; ++trial) {
    switch (rng() % 3) {
      case 0: {
        std::vector<std::uint8_t> bits(1 + rng() % 10);
        for (auto& b : bits) b = rng() & 1;
        roundtrip(Bitstream::prefix(std::move(bits)));
        break;
      }
      case 1: {
        std::vector<std::uint8_t> pre(rng() % 5), per(1 + rng() % 5);
        for (auto& b : pre) b = rng() & 1;
        for (auto& b : per) b = rng() & 1;
        roundtrip(Bitstream::eventually_periodic(std::move(pre), std::move(per)));
        break;
      }
      default: roundtrip(Bitstream::rule(rng() & 1 ? "squares" : "thue-morse")); break;
    }
  }
  roundtrip(Bitstream::parse("perturbed:evp:01/0@1"));
  roundtrip(Bitstream::parse("perturbed:perturbed:evp:01/0@1@1"));
}

TEST_CASE("nested perturbation depth limit") {
  std::string deep = "evp:01/0";
  for (int i = 0; i < 9; ++i) deep = "perturbed:" + deep;
  for (int i = 0; i < 9; ++i) deep += "@1";
  CHECK_THROWS_AS(Bitstream::parse(deep), ParseError);

  Bitstream::ParseOptions opts;
  opts.max_perturbation_depth = 2;
  CHECK_THROWS_AS(Bitstream::parse("perturbed:perturbed:perturbed:evp:01/0@1@1@1", opts),
                  ParseError);
}

TEST_CASE("validate: exact decisions for eventually periodic streams") {
  SUBCASE("mirror-periodic stream is rejected") {
    const Bitstream s = Bitstream::parse("evp:/011");
    CHECK_THROWS_AS(s.validate(8), MirrorPeriodic);
    try {
      s.validate(8);
    } catch (const MirrorPeriodic& e) {
      CHECK(e.period == 3);
    }
  }
  SUBCASE("aperiodic mirror accepted exactly") {
    const auto report = Bitstream::parse("evp:01/0").validate(8);
    CHECK(report.a0_ok);
    CHECK(report.verdict == MirrorVerdict::ExactAperiodic);
  }
  SUBCASE("redundant descriptor of a periodic stream is still detected") {
    // pre=01, per=01 is the purely periodic stream 010101...; its mirror has
    // period 2 (a_{2-i} = a_i holds).
    CHECK_THROWS_AS(Bitstream::parse("evp:01/01").validate(4), MirrorPeriodic);
  }
  SUBCASE("all-zero stream is mirror periodic") {
    CHECK_THROWS_AS(Bitstream::parse("evp:/0").validate(4), MirrorPeriodic);
  }
}

TEST_CASE("validate: a_0 constraint") {
  CHECK_THROWS_AS(Bitstream::prefix({1, 0}).validate(4), InvalidStream);
  CHECK_THROWS_AS(Bitstream::parse("evp:/10").validate(4), InvalidStream);
}

TEST_CASE("validate: bounded verdicts") {
  SUBCASE("rule stream") {
    const auto report = Bitstream::rule("squares").validate(12);
    CHECK(report.asserted_aperiodic);
    CHECK(report.verdict == MirrorVerdict::BoundedNoPeriod);
  }
  SUBCASE("zero-extended prefix with a one refutes every period") {
    const auto report = Bitstream::prefix({0, 1}).validate(10);
    CHECK(report.verdict == MirrorVerdict::BoundedNoPeriod);
  }
  SUBCASE("all-zero prefix cannot be refuted") {
    const auto report = Bitstream::prefix({0, 0, 0}).validate(6);
    CHECK(report.verdict == MirrorVerdict::BoundedUnrefuted);
    CHECK(report.unrefuted.size() == 6);
  }
  SUBCASE("strict prefix leaves long periods unrefuted") {
    const auto report =
        Bitstream::prefix({0, 1, 0, 0}, TailPolicy::ErrorBeyond).validate(8);
    CHECK(report.verdict == MirrorVerdict::BoundedUnrefuted);
    for (auto p : report.unrefuted) CHECK(p > 2);
  }
}

TEST_CASE("validate is monotone in the horizon") {
  std::mt19937_64 rng(0xB1A5ED12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> bits(1 + rng() % 8, 0);
    for (std::size_t i = 1; i < bits.size(); ++i) bits[i] = rng() & 1;
    const Bitstream s = Bitstream::prefix(std::move(bits), TailPolicy::ErrorBeyond);
    const auto lo = s.validate(4);
    const auto hi = s.validate(9);
    // A period refuted at the smaller horizon stays refuted at the larger.
    for (std::size_t p = 1; p <= 4; ++p) {
      const bool unrefuted_lo =
          std::find(lo.unrefuted.begin(), lo.unrefuted.end(), p) != lo.unrefuted.end();
      const bool unrefuted_hi =
          std::find(hi.unrefuted.begin(), hi.unrefuted.end(), p) != hi.unrefuted.end();
      if (unrefuted_hi) CHECK(unrefuted_lo);
    }
  }
}

TEST_CASE("format of strict prefixes uses the canonical grammar") {
  const Bitstream strict = Bitstream::prefix({0, 1}, TailPolicy::ErrorBeyond);
  CHECK(strict.format() == "prefix:01");
}
