#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "binshift/bitstream.hpp"
#include "binshift/gf2.hpp"
#include "binshift/word.hpp"

namespace binshift {

/// Index n with nu_{n-1} = 0, nu_n = 1; z is the palindromic kernel generator
/// of the order-n center and depth is the length of the ascending nullity run
/// starting at n (1 for the short string "1,0").
struct BreakPoint {
  std::size_t n = 0;
  Word z;
  std::size_t depth = 0;
};

enum class UKind { Skew, SelfAdjoint };

/// Star classification of a phase-0 word: adjoint fixes exponents, so
/// w* = +w or -w always.
UKind classify_star(const Word& w, const Bitstream& stream);

/// All break points n <= limit in increasing order. Depth discovery walks the
/// nullity sequence past `limit` as needed, up to depth_cap (throws
/// DepthSearchExceeded beyond, which no admissible stream reaches).
std::vector<BreakPoint> break_points(const Bitstream& stream, std::size_t limit,
                                     std::size_t depth_cap = 256);

/// The break point at exactly n; throws NotABreakPoint.
BreakPoint break_point_at(const Bitstream& stream, std::size_t n,
                          std::size_t depth_cap = 256);

/// Kind of the perturbing unitary: u = (I+z)/sqrt2 when z* = -z,
/// u = (I+iz)/sqrt2 when z* = z.
UKind build_u(const BreakPoint& bp, const Bitstream& stream);

/// u* w u: w itself when z and w commute, else -zw (skew case) or -izw
/// (self-adjoint case), in normal form.
Word ad_u(const Word& w, const Word& z, UKind kind, const Bitstream& stream);

/// One application of the perturbed shift: w -> u* alpha(w) u.
Word beta_step(const Word& w, const Word& z, UKind kind, const Bitstream& stream);

struct PerturbationChecks {
  bool generators_match_prefix = false;  // u_i = v_i for i <= n+d-2
  bool break_generator_form = false;     // u_{n+d-1} is a phase times z v_{n+d-1}
  bool first_difference_at_expected = false;
  bool b0_zero = false;
  bool self_adjoint_generators = false;  // over the standard window
  bool translation_invariance = false;   // over the standard window
  bool span_full = false;                // span_check for all m <= window
  bool all() const {
    return generators_match_prefix && break_generator_form &&
           first_difference_at_expected && b0_zero && self_adjoint_generators &&
           translation_invariance && span_full;
  }
};

/// Result of perturbing at a break point: the generators u_i = beta^i(v_0),
/// the perturbed bitstream b_j = commutation bit of (u_0, u_j), and the
/// recorded construction checks. The generator list extends on demand under a
/// lock; distinct results are independent.
class PerturbationResult {
 public:
  const BreakPoint& breakpoint() const;
  UKind u_kind() const;
  const Bitstream& base() const;
  const Bitstream& perturbed() const { return perturbed_; }
  /// n + 2d - 1, the first index where the perturbed stream differs.
  std::size_t first_difference() const;
  Word generator(std::size_t i) const;
  std::vector<std::uint8_t> digits(std::size_t count) const;
  const PerturbationChecks& checks() const { return checks_; }

 private:
  friend PerturbationResult perturb(const Bitstream&, std::size_t);
  PerturbationResult(Bitstream perturbed, PerturbationChecks checks)
      : perturbed_(std::move(perturbed)), checks_(checks) {}
  Bitstream perturbed_;
  PerturbationChecks checks_;
};

/// Perturbs `stream` at break point n. Construction iterates beta on v_0,
/// asserts the structural identities of the construction (prefix agreement,
/// form of u_{n+d-1}, first difference at n+2d-1, b_0 = 0) and throws
/// InternalInconsistency with a diagnostic dump if any fails.
PerturbationResult perturb(const Bitstream& stream, std::size_t n);

/// Perturbs the original stream at its first `count` break points. The
/// resulting streams are pairwise distinct, with strictly increasing first
/// differences. Throws NotEnoughBreakPoints when fewer exist below `limit`.
std::vector<PerturbationResult> family(const Bitstream& stream, std::size_t count,
                                       std::size_t limit);

/// True iff the exponent vectors of u_0..u_{m-1} span GF(2)^m: the witness
/// that the first m old and new generators generate the same algebra.
bool span_check(const PerturbationResult& result, std::size_t m);

/// Generator data of an already constructed perturbed stream.
Word perturbed_generator(const Bitstream& perturbed_stream, std::size_t i);
const BreakPoint& perturbed_break_point(const Bitstream& perturbed_stream);
UKind perturbed_u_kind(const Bitstream& perturbed_stream);

struct PeriodicityGuess {
  std::size_t preperiod = 0;
  std::size_t period = 1;
  bool empirical = true;  // bounded scan, not a certificate
};

/// Bounded scan for (preperiod, period) with both <= bound, validated on
/// [preperiod, preperiod + 2*bound]. Minimal period, then minimal preperiod.
std::optional<PeriodicityGuess> detect_eventual_period(const Bitstream& stream,
                                                       std::size_t bound);

}  // namespace binshift
