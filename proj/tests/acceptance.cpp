// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <atomic>
#include <chrono>
#include <cstring>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "binshift/dense_oracle.hpp"
#include "binshift/invariants.hpp"
#include "binshift/perturbation.hpp"

using namespace binshift;

namespace {

unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : hw;
}

// Striped parallel loop; exceptions surface after the join.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  const unsigned jobs = std::min<std::size_t>(worker_count(), count ? count : 1);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned t = 0; t < jobs; ++t)
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += jobs) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Thread-safe pass/fail accumulator keeping the first failure detail.
class Check {
 public:
  void fail(const std::string& detail) {
    ok_.store(false);
    std::lock_guard<std::mutex> lock(mu_);
    if (detail_.empty()) detail_ = detail;
  }
  void require(bool pass, const std::string& detail) {
    if (!pass) fail(detail);
  }
  bool ok() const { return ok_.load(); }
  std::string detail() const {
    std::lock_guard<std::mutex> lock(mu_);
    return detail_;
  }

 private:
  std::atomic<bool> ok_{true};
  mutable std::mutex mu_;
  std::string detail_;
};

struct Outcome {
  bool pass = false;
  std::string note;
  double seconds = 0;
};

int failures = 0;

template <class Body>
void run_criterion(int id, const std::string& name, double budget_seconds, Body&& body) {
  Check check;
  std::string note;
  const auto start = std::chrono::steady_clock::now();
  try {
    note = body(check);
  } catch (const std::exception& e) {
    check.fail(std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool pass = check.ok();
  std::string detail = check.detail();
  if (pass && budget_seconds > 0 && seconds > budget_seconds) {
    pass = false;
    detail = "time budget exceeded";
  }
  std::ostringstream line;
  line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name << " (";
  if (!pass)
    line << detail << "; ";
  else if (!note.empty())
    line << note << "; ";
  line.setf(std::ios::fixed);
  line.precision(1);
  line << seconds << " s";
  if (budget_seconds > 0) line << " < " << budget_seconds << " s budget";
  line << ")";
  std::cout << line.str() << std::endl;
  if (!pass) ++failures;
}

// Every eventually periodic descriptor with preperiod+period <= max_total and
// a_0 = 0, keeping only mirror-aperiodic streams.
std::vector<Bitstream> valid_evp_streams(std::size_t max_total) {
  std::vector<Bitstream> out;
  for (std::size_t total = 1; total <= max_total; ++total) {
    for (std::size_t q = 0; q < total; ++q) {
      const std::size_t p = total - q;
      for (std::size_t bits = 0; bits < (std::size_t{1} << (total - 1)); ++bits) {
        std::vector<std::uint8_t> digits(total, 0);
        for (std::size_t i = 1; i < total; ++i)
          digits[i] = static_cast<std::uint8_t>((bits >> (i - 1)) & 1);
        std::vector<std::uint8_t> pre(digits.begin(), digits.begin() + q);
        std::vector<std::uint8_t> per(digits.begin() + q, digits.end());
        Bitstream s = Bitstream::eventually_periodic(std::move(pre), std::move(per));
        try {
          s.validate(1);
        } catch (const MirrorPeriodic&) {
          continue;
        }
        out.push_back(std::move(s));
        (void)p;
      }
    }
  }
  return out;
}

std::vector<BreakPoint> first_break_points(const Bitstream& s, std::size_t count) {
  for (std::size_t limit = 48; limit <= 384; limit *= 2) {
    auto bps = break_points(s, limit);
    if (bps.size() >= count) {
      bps.resize(count);
      return bps;
    }
  }
  return {};
}

Bitstream census_stream(std::size_t len, std::size_t idx) {
  std::vector<std::uint8_t> bits(len, 0);
  for (std::size_t j = 1; j < len; ++j)
    bits[j] = static_cast<std::uint8_t>((idx >> (j - 1)) & 1);
  return Bitstream::prefix(std::move(bits));
}

// Palindrome and plateau checks at one break point: the kernel generator is a
// palindrome with endpoints 1, ascending centers contain every shift of z up
// to the plateau, descending centers keep exactly the later shifts.
bool plateau_consistent(const Bitstream& s, const BreakPoint& bp, std::string& why) {
  const auto pal = check_palindrome_center(s, bp.n);
  if (!pal.consistent()) {
    why = "palindrome failure at n=" + std::to_string(bp.n);
    return false;
  }
  for (std::size_t m = 0; m < bp.depth; ++m) {
    const GF2Matrix a = toeplitz(s, bp.n + m);
    for (std::size_t t = 0; t <= m; ++t)
      if (!a.mul(bp.z.exps.shifted(t)).is_zero()) {
        why = "shift " + std::to_string(t) + " not central at n+" + std::to_string(m);
        return false;
      }
  }
  for (std::size_t shift_min = 1; shift_min < bp.depth; ++shift_min) {
    const GF2Matrix a = toeplitz(s, bp.n + bp.depth + shift_min - 1);
    for (std::size_t t = shift_min; t < bp.depth; ++t)
      if (!a.mul(bp.z.exps.shifted(t)).is_zero()) {
        why = "descent center misses shift " + std::to_string(t);
        return false;
      }
  }
  return true;
}

std::string criterion1(Check& check, const std::vector<Bitstream>& streams) {
  std::atomic<std::size_t> perturbations{0};
  parallel_for(streams.size(), [&](std::size_t idx) {
    const Bitstream& s = streams[idx];
    const auto bps = first_break_points(s, 3);
    if (bps.size() < 3) {
      check.fail("fewer than 3 break points for " + s.format());
      return;
    }
    for (const auto& bp : bps) {
      const PerturbationResult r = perturb(s, bp.n);
      check.require(r.first_difference() == bp.n + 2 * bp.depth - 1,
                    "first difference off for " + s.format());
      check.require(r.checks().generators_match_prefix,
                    "generator prefix mismatch for " + s.format());
      check.require(r.checks().all(), "construction checks failed for " + s.format());
      for (std::size_t m = 1; m <= 32; ++m)
        if (!span_check(r, m)) {
          check.fail("span failure at m=" + std::to_string(m) + " for " + s.format());
          break;
        }
      perturbations.fetch_add(1);
    }
  });
  return std::to_string(streams.size()) + " streams, " +
         std::to_string(perturbations.load()) + " perturbations";
}

std::string criterion2(Check& check, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Bitstream> streams;
  for (int i = 0; i < 200; ++i) {
    const std::size_t len = 1 + rng() % 12;
    std::vector<std::uint8_t> bits(len, 0);
    for (std::size_t j = 1; j < len; ++j) bits[j] = rng() & 1;
    streams.push_back(Bitstream::prefix(std::move(bits)));
  }
  parallel_for(streams.size(), [&](std::size_t idx) {
    const Bitstream& s = streams[idx];
    for (std::size_t n = 1; n <= 12; ++n) {
      std::size_t count = 0;
      for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        GF2Vector c(n);
        for (std::size_t i = 0; i < n; ++i)
          if ((bits >> i) & 1) c.set(i, true);
        const Word w = Word::from_exps(std::move(c));
        bool central = true;
        for (std::size_t j = 0; j < n && central; ++j)
          central = commutation_bit(w, Word::generator(j), s) == 0;
        if (central) ++count;
      }
      if (count != (std::size_t{1} << nullity_at(s, n))) {
        check.fail("count mismatch at n=" + std::to_string(n) + " for " + s.format());
        return;
      }
    }
  });
  return "200 prefixes, n <= 12 exhaustive";
}

std::string criterion3(Check& check) {
  const std::size_t len = 16;
  const std::size_t count = std::size_t{1} << (len - 1);
  parallel_for(count, [&](std::size_t idx) {
    const Bitstream s = census_stream(len, idx);
    try {
      parse_structure(nullity_sequence(s, len));
    } catch (const StructureViolation& e) {
      check.fail(s.format() + ": " + e.what());
    }
  });
  return "32768 prefixes parsed";
}

std::string criterion4(Check& check, const std::vector<Bitstream>& evp_streams) {
  std::atomic<std::size_t> checked{0};
  parallel_for(evp_streams.size(), [&](std::size_t idx) {
    for (const auto& bp : first_break_points(evp_streams[idx], 3)) {
      std::string why;
      if (!plateau_consistent(evp_streams[idx], bp, why))
        check.fail(evp_streams[idx].format() + ": " + why);
      checked.fetch_add(1);
    }
  });

  const std::size_t len = 16;
  parallel_for(std::size_t{1} << (len - 1), [&](std::size_t idx) {
    const Bitstream s = census_stream(len, idx);
    const auto profile = parse_structure(nullity_sequence(s, len));
    for (const auto& str : profile.strings) {
      const BreakPoint bp = break_point_at(s, str.start);
      if (bp.depth != str.r)
        check.fail("depth/parse mismatch for " + s.format());
      std::string why;
      if (!plateau_consistent(s, bp, why)) check.fail(s.format() + ": " + why);
      checked.fetch_add(1);
    }
  });
  return std::to_string(checked.load()) + " break points";
}

bool matrices_match_scaled(const GaussianMatrix& a, const GaussianMatrix& b,
                           Gaussian scale) {
  return a == b.scaled(scale);
}

std::string criterion5(Check& check, std::uint64_t seed) {
  struct Case {
    const char* desc;
    std::size_t n;
  };
  const Case cases[] = {{"prefix:010110", 6}, {"prefix:001011", 6},
                        {"prefix:011101", 5}, {"prefix:000010", 5}};

  for (const auto& c : cases) {
    const Bitstream s = Bitstream::parse(c.desc);
    const DenseRep rep = dense_representation(s, c.n);
    const std::size_t words = std::size_t{1} << c.n;

    std::vector<GaussianMatrix> mat;
    mat.reserve(words);
    for (std::size_t bits = 0; bits < words; ++bits) {
      GF2Vector e(c.n);
      for (std::size_t i = 0; i < c.n; ++i)
        if ((bits >> i) & 1) e.set(i, true);
      mat.push_back(word_matrix(rep, Word::from_exps(std::move(e))));
    }

    std::atomic<bool> adjoint_ok{true};
    parallel_for(words, [&](std::size_t b) {
      GF2Vector e(c.n);
      for (std::size_t i = 0; i < c.n; ++i)
        if ((b >> i) & 1) e.set(i, true);
      const Word w = Word::from_exps(std::move(e));
      if (word_matrix(rep, adjoint(w, s)) != mat[b].conj_transpose())
        adjoint_ok.store(false);
    });
    check.require(adjoint_ok.load(), std::string("adjoint mismatch on ") + c.desc);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t b1 = 0; b1 < words; ++b1)
      for (std::size_t b2 = b1; b2 < words; ++b2) pairs.emplace_back(b1, b2);
    parallel_for(pairs.size(), [&](std::size_t pi) {
      const auto [b1, b2] = pairs[pi];
      GF2Vector e1(c.n), e2(c.n);
      for (std::size_t i = 0; i < c.n; ++i) {
        if ((b1 >> i) & 1) e1.set(i, true);
        if ((b2 >> i) & 1) e2.set(i, true);
      }
      const Word w1 = Word::from_exps(std::move(e1));
      const Word w2 = Word::from_exps(std::move(e2));
      const GaussianMatrix p12 = mat[b1] * mat[b2];
      const Word prod = multiply(w1, w2, s);
      if (word_matrix(rep, prod) != p12) {
        check.fail(std::string("product mismatch on ") + c.desc);
        return;
      }
      if (b1 != b2) {
        const GaussianMatrix p21 = mat[b2] * mat[b1];
        const bool anti = commutation_bit(w1, w2, s) == 1;
        if (!matrices_match_scaled(p12, p21, anti ? Gaussian{-1, 0} : Gaussian{1, 0}))
          check.fail(std::string("commutation mismatch on ") + c.desc);
      }
    });

    std::mt19937_64 rng(seed ^ c.n);
    for (int trial = 0; trial < 256; ++trial) {
      GF2Vector e1(c.n), e2(c.n);
      for (std::size_t i = 0; i < c.n; ++i) {
        if (rng() & 1) e1.set(i, true);
        if (rng() & 1) e2.set(i, true);
      }
      const Word pw1 = Word::from_exps(std::move(e1), rng() % 4);
      const Word pw2 = Word::from_exps(std::move(e2), rng() % 4);
      if (word_matrix(rep, multiply(pw1, pw2, s)) !=
          word_matrix(rep, pw1) * word_matrix(rep, pw2))
        check.fail(std::string("phased product mismatch on ") + c.desc);
    }
  }

  // Full beta orbit u_0..u_5 against matrix conjugation, phases included.
  struct OrbitCase {
    const char* desc;
    std::size_t at;
  };
  // evp:0/1 at 3 runs the skew branch (z = v0v1v2, z* = -z).
  const OrbitCase orbits[] = {
      {"evp:01/0", 1}, {"evp:01/0", 3}, {"evp:001/0", 1}, {"evp:0/1", 3}};
  for (const auto& oc : orbits) {
    const Bitstream s = Bitstream::parse(oc.desc);
    const DenseRep rep = dense_representation(s, 6);
    const PerturbationResult r = perturb(s, oc.at);
    const Word z = r.breakpoint().z;
    const GaussianMatrix zmat = word_matrix(rep, z);
    const GaussianMatrix u_num =
        r.u_kind() == UKind::Skew
            ? GaussianMatrix::identity(rep.dim) + zmat
            : GaussianMatrix::identity(rep.dim) + zmat.scaled({0, 1});
    for (std::size_t i = 0; i + 1 <= 5; ++i) {
      const GaussianMatrix expected =
          conjugate_halved(u_num, word_matrix(rep, shift(r.generator(i), 1)));
      if (word_matrix(rep, r.generator(i + 1)) != expected) {
        check.fail(std::string("beta orbit mismatch for ") + oc.desc + " at u_" +
                   std::to_string(i + 1));
        break;
      }
    }
  }
  return "4 exhaustive streams (n=5,6), 3 beta orbits";
}

std::string criterion6(Check& check) {
  // Brute force, no elimination and no row-horizon reduction: scan every
  // support pattern below 2^12 against a long row window.
  const auto brute = [](const Bitstream& s, std::size_t k) -> std::optional<GF2Vector> {
    for (std::size_t c = 1; c < (std::size_t{1} << 12); ++c) {
      bool ok = true;
      for (std::size_t j = k; j <= k + 300 && ok; ++j) {
        unsigned parity = 0;
        for (std::size_t i = 0; i < 12; ++i)
          if ((c >> i) & 1)
            parity ^= static_cast<unsigned>(s.at(j > i ? j - i : i - j));
        ok = parity == 0;
      }
      if (ok) {
        GF2Vector v(12);
        for (std::size_t i = 0; i < 12; ++i)
          if ((c >> i) & 1) v.set(i, true);
        return v;
      }
    }
    return std::nullopt;
  };

  struct Pinned {
    const char* desc;
    std::vector<std::size_t> witness;
  };
  const Pinned pinned[] = {{"evp:01/0", {0}}, {"evp:0/1", {0, 1}}};
  for (const auto& p : pinned) {
    const Bitstream s = Bitstream::parse(p.desc);
    const auto r = commutant_index(s);
    check.require(r.verdict == IndexVerdict::Exact && r.k == 2,
                  std::string(p.desc) + " verdict is not exact(2)");
    GF2Vector expected;
    for (auto i : p.witness) expected.set(i, true);
    check.require(r.witness && *r.witness == expected,
                  std::string(p.desc) + " witness mismatch");
    check.require(!brute(s, 1).has_value(),
                  std::string(p.desc) + " brute force found k=1");
    const auto bf = brute(s, 2);
    check.require(bf.has_value() && *bf == expected,
                  std::string(p.desc) + " brute force disagrees at k=2");
  }

  ClassifyOptions opts;
  opts.digit_count = 16;
  opts.commutant.k_max = 18;
  opts.jobs = worker_count();
  const ClassificationTable table = census(16, opts);
  check.require(table.rows.size() == 32768, "census row count");

  std::size_t min_exact = 1000, invalid_rows = 0, lower_bound_rows = 0;
  for (const auto& row : table.rows) {
    if (row.index_kind == "exact")
      min_exact = std::min(min_exact, std::size_t(std::stoul(row.commutant_index)));
    else if (row.index_kind == "invalid")
      ++invalid_rows;
    else
      ++lower_bound_rows;
  }
  check.require(min_exact == 2, "census minimal exact index is not 2");
  check.require(invalid_rows == 1, "census should have exactly one inadmissible row");
  check.require(lower_bound_rows == 0, "census left verdicts undecided");
  return "2 pinned streams vs brute force, census 2^15 rows, min index " +
         std::to_string(min_exact);
}

std::string criterion7(Check& check, const std::vector<Bitstream>& streams) {
  std::atomic<std::size_t> compared{0};
  parallel_for(streams.size(), [&](std::size_t idx) {
    const Bitstream& s = streams[idx];
    const auto base_idx = commutant_index(s);
    const auto base_nu = nullity_sequence(s, 24);
    for (const auto& bp : first_break_points(s, 3)) {
      const PerturbationResult r = perturb(s, bp.n);
      const auto pert_idx = commutant_index(r.perturbed());
      if (pert_idx.verdict != base_idx.verdict || pert_idx.k != base_idx.k) {
        check.fail("index verdict changed for " + r.perturbed().format() + ": " +
                   base_idx.to_string() + " vs " + pert_idx.to_string());
        return;
      }
      if (nullity_sequence(r.perturbed(), 24) != base_nu) {
        check.fail("nullity sequence changed for " + r.perturbed().format());
        return;
      }
      const std::size_t fd = r.first_difference();
      if (r.perturbed().digits(fd + 1) == s.digits(fd + 1)) {
        check.fail("perturbed stream does not differ from " + s.format());
        return;
      }
      compared.fetch_add(1);
    }
  });
  return std::to_string(compared.load()) + " base/perturbed comparisons";
}

std::string criterion8(Check& check) {
  const Bitstream s = Bitstream::parse("evp:01/0");
  const auto fam = family(s, 5, 16);
  check.require(fam.size() == 5, "family size");
  std::vector<std::vector<std::uint8_t>> digit_sets;
  std::size_t prev = 0;
  for (const auto& r : fam) {
    check.require(r.first_difference() > prev, "first differences not increasing");
    prev = r.first_difference();
    digit_sets.push_back(r.digits(16));
  }
  for (std::size_t i = 0; i < digit_sets.size(); ++i)
    for (std::size_t j = i + 1; j < digit_sets.size(); ++j)
      check.require(digit_sets[i] != digit_sets[j], "family streams not distinct");
  return "5 perturbations, first differences 2..10";
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 20240612;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      seed = std::strtoull(argv[i + 1], nullptr, 10);

  std::cout << "acceptance suite (seed " << seed << ")" << std::endl;

  const std::vector<Bitstream> evp_streams = valid_evp_streams(10);

  run_criterion(1, "perturbation first difference, generator prefix, span", 60,
                [&](Check& c) { return criterion1(c, evp_streams); });
  run_criterion(2, "center dimension 2^nullity by exhaustive count", 60,
                [&](Check& c) { return criterion2(c, seed); });
  run_criterion(3, "nullity structure parse over the length-16 census", 60,
                [&](Check& c) { return criterion3(c); });
  run_criterion(4, "palindrome generators and plateau centers", 0,
                [&](Check& c) { return criterion4(c, evp_streams); });
  run_criterion(5, "word arithmetic against the dense matrix oracle", 120,
                [&](Check& c) { return criterion5(c, seed); });
  run_criterion(6, "commutant index pinned values, brute force, census minimum", 0,
                [&](Check& c) { return criterion6(c); });
  run_criterion(7, "cocycle invariants preserved by perturbation", 0,
                [&](Check& c) { return criterion7(c, evp_streams); });
  run_criterion(8, "family of five mutually distinct perturbations", 10,
                [&](Check& c) { return criterion8(c); });

  std::cout << "ACCEPTANCE: " << (8 - failures) << "/8 passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
