#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "binshift/bitstream.hpp"
#include "binshift/gf2.hpp"

namespace binshift {

/// A word i^phase * v_0^{c_0} v_1^{c_1} ... in normal form: generators in
/// ascending index order (the exponent vector determines the ordered product)
/// and a scalar that is always a fourth root of unity.
struct Word {
  unsigned phase = 0;  // exponent of i, mod 4
  GF2Vector exps;

  static Word identity() { return Word{}; }
  static Word generator(std::size_t i) { return Word{0, GF2Vector::unit(i + 1, i)}; }
  static Word from_exps(GF2Vector e, unsigned ph = 0) { return Word{ph % 4, std::move(e)}; }

  bool is_identity() const { return phase == 0 && exps.is_zero(); }

  friend bool operator==(const Word& a, const Word& b) {
    return a.phase == b.phase && a.exps == b.exps;
  }
  friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }

  /// Display form: optional phase token (+i, -i, -), then v<i> factors in
  /// ascending order; pure scalars render as 1, -1, +i, -i.
  std::string to_string() const;
};

/// Normal form of w1 * w2. Exponents add over GF(2); the phase picks up
/// 2 * sigma where sigma counts the anticommuting transpositions needed to
/// interleave the two ascending products.
Word multiply(const Word& w1, const Word& w2, const Bitstream& stream);

/// w*. Exponents are unchanged; reversing the ordered product of self-adjoint
/// generators costs a sign from each anticommuting pair in the support.
Word adjoint(const Word& w, const Bitstream& stream);

/// 0 when the words commute, 1 when they anticommute. Phases are irrelevant:
/// the bit is sum_{i,j} c_i d_j a_{|i-j|} mod 2.
int commutation_bit(const Word& w1, const Word& w2, const Bitstream& stream);

/// The shift endomorphism iterated k times: v_i -> v_{i+k}.
Word shift(const Word& w, std::size_t k);

/// One phase-0 word per kernel basis vector of the n x n Toeplitz matrix;
/// the center they generate has 2^{nullity} exponent vectors.
struct CentralWordSet {
  std::size_t n = 0;
  std::vector<Word> words;
  std::size_t nullity() const { return words.size(); }
};

CentralWordSet central_words(const Bitstream& stream, std::size_t n);

struct PalindromeReport {
  std::size_t n = 0;
  GF2Vector exponents;
  bool palindrome = false;
  bool endpoints_one = false;
  bool consistent() const { return palindrome && endpoints_one; }
};

/// Requires nu_{n-1} = 0 and nu_n = 1 (throws NotABreakPoint otherwise);
/// extracts the unique kernel generator and reports whether its exponents
/// form a palindrome with both endpoints 1. A false report would contradict
/// an identity valid for every admissible stream.
PalindromeReport check_palindrome_center(const Bitstream& stream, std::size_t n);

}  // namespace binshift
