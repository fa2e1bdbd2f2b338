#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "binshift/errors.hpp"

namespace binshift {

class Bitstream;

namespace detail {

// Lazily evaluated digit source backing perturbed streams. Implementations
// memoize; reads from concurrent threads must observe a consistent sequence.
class LazyBits {
 public:
  virtual ~LazyBits() = default;
  virtual int bit(std::size_t j) const = 0;
};

// Defined by the perturbation machinery (perturbation.cpp).
std::shared_ptr<LazyBits> make_perturbed_bits(const Bitstream& base, std::size_t n);

struct Node;

}  // namespace detail

enum class TailPolicy { ZeroExtend, ErrorBeyond };

enum class StreamKind { Prefix, EventuallyPeriodic, Rule, Perturbed };

enum class MirrorVerdict {
  ExactAperiodic,    // decided from an eventually periodic descriptor
  BoundedNoPeriod,   // every candidate period <= horizon refuted by known digits
  BoundedUnrefuted,  // some candidate period(s) consistent with the digits seen
};

struct ValidityReport {
  bool a0_ok = false;
  MirrorVerdict verdict = MirrorVerdict::BoundedNoPeriod;
  std::size_t horizon = 0;
  bool asserted_aperiodic = false;
  std::vector<std::size_t> unrefuted;  // candidate mirror periods, ascending
};

struct ParseOptions {
  std::size_t max_perturbation_depth = 8;
};

/// An infinite sequence a_0,a_1,... over GF(2), held as a finite descriptor:
/// an explicit prefix (zero-extended or strict), an eventually periodic
/// pattern, a named total rule, or a lazily evaluated perturbation of another
/// stream. Values are immutable and cheap to copy.
class Bitstream {
 public:
  using ParseOptions = binshift::ParseOptions;

  Bitstream() = delete;

  static Bitstream prefix(std::vector<std::uint8_t> bits,
                          TailPolicy policy = TailPolicy::ZeroExtend);
  static Bitstream eventually_periodic(std::vector<std::uint8_t> pre,
                                       std::vector<std::uint8_t> period);
  static Bitstream rule(const std::string& name);
  // Validates that n is a break point of `base`; digits are computed on
  // demand and memoized.
  static Bitstream perturbed(const Bitstream& base, std::size_t n);

  // Grammar: prefix:<bits> | evp:<prebits>/<perbits> | rule:<name>
  //        | perturbed:<descriptor>@<n>
  static Bitstream parse(std::string_view text, const ParseOptions& opts = {});

  int at(std::size_t j) const;
  // As at(), but returns nullopt instead of throwing past a strict prefix.
  std::optional<int> at_known(std::size_t j) const;
  std::vector<std::uint8_t> digits(std::size_t count) const;

  StreamKind kind() const;
  const std::vector<std::uint8_t>& prefix_bits() const;
  TailPolicy prefix_policy() const;
  const std::vector<std::uint8_t>& preperiod() const;
  const std::vector<std::uint8_t>& period() const;
  const std::string& rule_name() const;
  bool asserted_aperiodic() const;
  const Bitstream& perturbation_base() const;
  std::size_t perturbation_point() const;
  std::shared_ptr<detail::LazyBits> lazy_engine() const;  // Perturbed only

  /// Canonical descriptor text; parse(format()) reproduces the descriptor.
  std::string format() const;

  /// Checks a_0 = 0 and that the mirror sequence ...,a_2,a_1,a_0,a_1,a_2,...
  /// is not periodic. Eventually periodic descriptors are decided exactly;
  /// the other kinds get a bounded verdict for periods <= horizon.
  /// Throws InvalidStream when a_0 != 0 and MirrorPeriodic when an exact
  /// periodic mirror is found.
  ValidityReport validate(std::size_t horizon) const;

 private:
  explicit Bitstream(std::shared_ptr<const detail::Node> node);
  std::shared_ptr<const detail::Node> node_;
};

}  // namespace binshift
