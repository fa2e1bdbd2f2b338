#include "binshift/perturbation.hpp"

#include <mutex>
#include <sstream>

namespace binshift {

namespace {

// Extends nu_0, nu_1, ... on demand; nu_0 = 0 by convention.
class NullityCache {
 public:
  explicit NullityCache(const Bitstream& s) : stream_(s), nu_{0} {}

  std::size_t get(std::size_t n) {
    while (nu_.size() <= n) nu_.push_back(nullity_at(stream_, nu_.size()));
    return nu_[n];
  }

 private:
  const Bitstream& stream_;
  std::vector<std::size_t> nu_;
};

BreakPoint make_break_point(const Bitstream& stream, std::size_t n, NullityCache& nu,
                            std::size_t depth_cap) {
  if (n == 0 || nu.get(n - 1) != 0 || nu.get(n) != 1)
    throw NotABreakPoint("nullities at n-1 and n are not (0, 1) for n = " +
                         std::to_string(n));

  KernelBasis kb = kernel(toeplitz(stream, n));
  if (kb.nullity() != 1)
    throw InternalInconsistency("nullity 1 but kernel basis size " +
                                std::to_string(kb.nullity()));
  BreakPoint bp;
  bp.n = n;
  bp.z = Word::from_exps(std::move(kb.vectors.front()));

  for (std::size_t i = 0; i < n; ++i)
    if (bp.z.exps.get(i) != bp.z.exps.get(n - 1 - i) || (i == 0 && !bp.z.exps.get(0)))
      throw InternalInconsistency(
          "kernel generator at break point " + std::to_string(n) +
          " is not a palindrome with endpoints 1: " + bp.z.exps.to_string());

  std::size_t d = 0;
  for (std::size_t m = 1;; ++m) {
    if (m > depth_cap)
      throw DepthSearchExceeded("no nullity descent within " +
                                std::to_string(depth_cap) + " steps past n = " +
                                std::to_string(n));
    if (nu.get(n + m) < nu.get(n + m - 1)) {
      d = m;
      break;
    }
  }
  bp.depth = d;

  // The run from n must read 1, 2, ..., d with the first descent to d-1.
  for (std::size_t j = 0; j < d; ++j)
    if (nu.get(n + j) != j + 1)
      throw InternalInconsistency("nullity run at break point " + std::to_string(n) +
                                  " is not 1..d");
  if (nu.get(n + d) != d - 1)
    throw InternalInconsistency("nullity descent at break point " + std::to_string(n) +
                                " does not start at d-1");
  return bp;
}

}  // namespace

UKind classify_star(const Word& w, const Bitstream& stream) {
  const Word adj = adjoint(w, stream);
  if (adj == w) return UKind::SelfAdjoint;
  if (adj.exps == w.exps && adj.phase == (w.phase + 2) % 4) return UKind::Skew;
  throw InternalInconsistency("adjoint changed the exponent vector of a word");
}

std::vector<BreakPoint> break_points(const Bitstream& stream, std::size_t limit,
                                     std::size_t depth_cap) {
  NullityCache nu(stream);
  std::vector<BreakPoint> out;
  for (std::size_t n = 1; n <= limit; ++n)
    if (nu.get(n - 1) == 0 && nu.get(n) == 1)
      out.push_back(make_break_point(stream, n, nu, depth_cap));
  return out;
}

BreakPoint break_point_at(const Bitstream& stream, std::size_t n, std::size_t depth_cap) {
  NullityCache nu(stream);
  return make_break_point(stream, n, nu, depth_cap);
}

UKind build_u(const BreakPoint& bp, const Bitstream& stream) {
  return classify_star(bp.z, stream);
}

Word ad_u(const Word& w, const Word& z, UKind kind, const Bitstream& stream) {
  if (commutation_bit(z, w, stream) == 0) return w;
  Word out = multiply(z, w, stream);
  // -zw in the skew case, -izw in the self-adjoint case.
  out.phase = (out.phase + (kind == UKind::Skew ? 2u : 3u)) % 4;
  return out;
}

Word beta_step(const Word& w, const Word& z, UKind kind, const Bitstream& stream) {
  return ad_u(shift(w, 1), z, kind, stream);
}

namespace detail {

// Digit source of a perturbed stream: iterates the perturbed shift on v_0 and
// reads off b_j as the commutation bit of (u_0, u_j). Generator and digit
// extension is single-writer under a mutex; readers see a consistent prefix.
//
// The iteration is kept linear per step: z is supported below its break
// point, so the reordering sign of z * w touches only the low bits of w, and
// the anticommutation bit of (z, w) is a dot product against a precomputed
// row parity vector.
class PerturbationEngine : public LazyBits {
 public:
  PerturbationEngine(Bitstream base, std::size_t n) : base_(std::move(base)) {
    if (base_.at(0) != 0)
      throw InvalidStream("a_0 = 1: cannot perturb an inadmissible stream");
    if (base_.kind() == StreamKind::EventuallyPeriodic)
      base_.validate(1);  // exact mirror decision; throws MirrorPeriodic
    NullityCache nu(base_);
    bp_ = make_break_point(base_, n, nu, 256);
    kind_ = classify_star(bp_.z, base_);
    first_diff_ = bp_.n + 2 * bp_.depth - 1;
    check_window_ = std::max<std::size_t>(33, first_diff_ + 4);

    std::lock_guard<std::mutex> lock(mu_);
    extend_locked(check_window_);
    run_construction_checks();
  }

  int bit(std::size_t j) const override {
    std::lock_guard<std::mutex> lock(mu_);
    extend_locked(j + 1);
    return bits_[j];
  }

  const BreakPoint& breakpoint() const { return bp_; }
  UKind kind() const { return kind_; }
  const Bitstream& base() const { return base_; }
  std::size_t first_difference() const { return first_diff_; }
  const PerturbationChecks& checks() const { return checks_; }

  Word generator(std::size_t i) const {
    std::lock_guard<std::mutex> lock(mu_);
    extend_locked(i + 1);
    return u_[i];
  }

 private:
  void extend_rows_locked(std::size_t upto) const {
    while (arow_.size() < upto) {
      const std::size_t s = arow_.size();
      arow_.push_back(static_cast<std::uint8_t>(base_.at(s)));
      unsigned zr = 0;
      bp_.z.exps.for_each_set(
          [&](std::size_t i) { zr ^= static_cast<unsigned>(base_.at(s > i ? s - i : i - s)); });
      zrow_.push_back(static_cast<std::uint8_t>(zr));
      avec_.set(s, arow_.back());
      zvec_.set(s, zrow_.back());
    }
  }

  void extend_locked(std::size_t count) const {
    while (u_.size() < count) {
      extend_rows_locked(u_.size() + 2);
      if (u_.empty()) {
        u_.push_back(Word::generator(0));
      } else {
        Word w = shift(u_.back(), 1);
        if (w.exps.dot(zvec_)) {  // z anticommutes with alpha(u_last)
          unsigned sigma = 0;
          const std::size_t n = bp_.n;  // supp(z) is below n
          bp_.z.exps.for_each_set([&](std::size_t i) {
            for (std::size_t t = 0; t < i && t < n; ++t)
              if (w.exps.get(t)) sigma ^= static_cast<unsigned>(base_.at(i - t));
          });
          w.exps ^= bp_.z.exps;
          w.phase = (w.phase + 2 * sigma + (kind_ == UKind::Skew ? 2u : 3u)) % 4;
        }
        u_.push_back(std::move(w));
      }
      bits_.push_back(static_cast<std::uint8_t>(u_.back().exps.dot(avec_)));
    }
  }

  [[noreturn]] void inconsistent(const std::string& what) const {
    std::ostringstream os;
    os << what << "; stream=" << base_.format() << " n=" << bp_.n << " d=" << bp_.depth
       << " generators:";
    for (std::size_t i = 0; i < u_.size(); ++i) os << " u" << i << "=" << u_[i].to_string();
    throw InternalInconsistency(os.str());
  }

  // Structural identities of the construction; a failure here can only mean a
  // bug in the word arithmetic, never bad input.
  void run_construction_checks() {
    const std::size_t n = bp_.n, d = bp_.depth;
    const std::size_t w = check_window_;

    checks_.generators_match_prefix = true;
    for (std::size_t i = 0; i + 1 <= n + d - 1 && i < u_.size(); ++i)
      if (u_[i] != Word::generator(i)) checks_.generators_match_prefix = false;
    if (!checks_.generators_match_prefix)
      inconsistent("u_i != v_i below the break window");

    const GF2Vector expected = bp_.z.exps ^ GF2Vector::unit(n + d, n + d - 1);
    checks_.break_generator_form = u_[n + d - 1].exps == expected;
    if (!checks_.break_generator_form)
      inconsistent("u_{n+d-1} is not a phase times z v_{n+d-1}");

    checks_.b0_zero = bits_[0] == 0;
    if (!checks_.b0_zero) inconsistent("b_0 != 0");

    checks_.first_difference_at_expected = true;
    for (std::size_t j = 0; j < first_diff_; ++j)
      if (bits_[j] != base_.at(j)) checks_.first_difference_at_expected = false;
    if (bits_[first_diff_] != 1 - base_.at(first_diff_))
      checks_.first_difference_at_expected = false;
    if (!checks_.first_difference_at_expected)
      inconsistent("first difference is not at n+2d-1");

    checks_.self_adjoint_generators = true;
    for (std::size_t i = 0; i < w; ++i)
      if (adjoint(u_[i], base_) != u_[i]) checks_.self_adjoint_generators = false;

    // commutation bit of (u_i, u_{i+j}) = u_i^T A u_{i+j} with A the Toeplitz
    // matrix over a window covering every generator's support.
    checks_.translation_invariance = true;
    const GF2Matrix a = toeplitz(base_, w + 1);
    std::vector<GF2Vector> au;
    au.reserve(w);
    for (std::size_t t = 0; t < w; ++t) au.push_back(a.mul(u_[t].exps));
    for (std::size_t i = 0; i < w; ++i)
      for (std::size_t j = 0; i + j < w; ++j)
        if (u_[i].exps.dot(au[i + j]) != (bits_[j] != 0))
          checks_.translation_invariance = false;

    checks_.span_full = true;
    for (std::size_t m = 1; m <= std::min<std::size_t>(32, w); ++m) {
      GF2Matrix mat(m, m);
      for (std::size_t i = 0; i < m; ++i) mat.row(i) = u_[i].exps;
      if (rank(mat) != m) checks_.span_full = false;
    }
    if (!checks_.self_adjoint_generators || !checks_.translation_invariance ||
        !checks_.span_full)
      inconsistent("perturbed generators fail a structural property");
  }

  Bitstream base_;
  BreakPoint bp_;
  UKind kind_ = UKind::SelfAdjoint;
  std::size_t first_diff_ = 0;
  std::size_t check_window_ = 33;
  PerturbationChecks checks_;
  mutable std::mutex mu_;
  mutable std::vector<Word> u_;
  mutable std::vector<std::uint8_t> bits_;
  mutable std::vector<std::uint8_t> arow_, zrow_;
  mutable GF2Vector avec_, zvec_;
};

std::shared_ptr<LazyBits> make_perturbed_bits(const Bitstream& base, std::size_t n) {
  return std::make_shared<PerturbationEngine>(base, n);
}

}  // namespace detail

namespace {

std::shared_ptr<detail::PerturbationEngine> engine_of(const Bitstream& perturbed) {
  return std::static_pointer_cast<detail::PerturbationEngine>(perturbed.lazy_engine());
}

}  // namespace

const BreakPoint& PerturbationResult::breakpoint() const {
  return engine_of(perturbed_)->breakpoint();
}

UKind PerturbationResult::u_kind() const { return engine_of(perturbed_)->kind(); }

const Bitstream& PerturbationResult::base() const { return engine_of(perturbed_)->base(); }

std::size_t PerturbationResult::first_difference() const {
  return engine_of(perturbed_)->first_difference();
}

Word PerturbationResult::generator(std::size_t i) const {
  return engine_of(perturbed_)->generator(i);
}

std::vector<std::uint8_t> PerturbationResult::digits(std::size_t count) const {
  return perturbed_.digits(count);
}

Word perturbed_generator(const Bitstream& perturbed_stream, std::size_t i) {
  return engine_of(perturbed_stream)->generator(i);
}

const BreakPoint& perturbed_break_point(const Bitstream& perturbed_stream) {
  return engine_of(perturbed_stream)->breakpoint();
}

UKind perturbed_u_kind(const Bitstream& perturbed_stream) {
  return engine_of(perturbed_stream)->kind();
}

PerturbationResult perturb(const Bitstream& stream, std::size_t n) {
  Bitstream p = Bitstream::perturbed(stream, n);
  PerturbationChecks checks = engine_of(p)->checks();
  return PerturbationResult(std::move(p), checks);
}

std::vector<PerturbationResult> family(const Bitstream& stream, std::size_t count,
                                       std::size_t limit) {
  const std::vector<BreakPoint> bps = break_points(stream, limit);
  if (bps.size() < count)
    throw NotEnoughBreakPoints("found " + std::to_string(bps.size()) +
                               " break points below " + std::to_string(limit) +
                               ", need " + std::to_string(count));
  std::vector<PerturbationResult> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(perturb(stream, bps[i].n));

  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i - 1].first_difference() >= out[i].first_difference())
      throw InternalInconsistency("family first differences are not strictly increasing");
  return out;
}

bool span_check(const PerturbationResult& result, std::size_t m) {
  if (m == 0) throw Error("span_check needs m >= 1");
  GF2Matrix mat(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const Word u = result.generator(i);
    if (u.exps.highest_set() >= static_cast<long>(m)) return false;
    mat.row(i) = u.exps;
  }
  return rank(mat) == m;
}

std::optional<PeriodicityGuess> detect_eventual_period(const Bitstream& stream,
                                                       std::size_t bound) {
  if (bound == 0) throw Error("periodicity bound must be positive");
  const std::size_t window = 4 * bound + 2;
  const std::vector<std::uint8_t> d = stream.digits(window);
  for (std::size_t p = 1; p <= bound; ++p) {
    std::size_t q = 0;
    for (std::size_t j = window - p; j-- > 0;) {
      if (d[j] != d[j + p]) {
        q = j + 1;
        break;
      }
    }
    if (q <= bound) return PeriodicityGuess{q, p, true};
  }
  return std::nullopt;
}

}  // namespace binshift
