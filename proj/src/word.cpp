#include "binshift/word.hpp"

namespace binshift {

std::string Word::to_string() const {
  std::string out;
  switch (phase % 4) {
    case 0: break;
    case 1: out = "+i"; break;
    case 2: out = "-"; break;
    case 3: out = "-i"; break;
  }
  if (exps.is_zero()) {
    if (phase % 4 == 0) return "1";
    if (phase % 4 == 2) return "-1";
    return out;  // pure scalar +i / -i
  }
  exps.for_each_set([&](std::size_t i) { out += "v" + std::to_string(i); });
  return out;
}

Word multiply(const Word& w1, const Word& w2, const Bitstream& stream) {
  // Interleaving the two ascending products transposes v_i (from w1) past
  // v_j (from w2) exactly once for each pair with i > j, costing
  // (-1)^{a_{i-j}} each; equal indices meet without a crossing and cancel.
  unsigned sigma = 0;
  w1.exps.for_each_set([&](std::size_t i) {
    w2.exps.for_each_set([&](std::size_t j) {
      if (i > j) sigma ^= static_cast<unsigned>(stream.at(i - j));
    });
  });
  Word out;
  out.exps = w1.exps ^ w2.exps;
  out.phase = (w1.phase + w2.phase + 2 * sigma) % 4;
  return out;
}

Word adjoint(const Word& w, const Bitstream& stream) {
  // The generators are self-adjoint, so the adjoint reverses the product;
  // restoring ascending order crosses each support pair i < j once.
  unsigned m = 0;
  w.exps.for_each_set([&](std::size_t i) {
    w.exps.for_each_set([&](std::size_t j) {
      if (i < j) m ^= static_cast<unsigned>(stream.at(j - i));
    });
  });
  Word out;
  out.exps = w.exps;
  out.phase = (4 - w.phase % 4 + 2 * m) % 4;
  return out;
}

int commutation_bit(const Word& w1, const Word& w2, const Bitstream& stream) {
  unsigned b = 0;
  w1.exps.for_each_set([&](std::size_t i) {
    w2.exps.for_each_set([&](std::size_t j) {
      if (i != j) b ^= static_cast<unsigned>(stream.at(i > j ? i - j : j - i));
    });
  });
  return static_cast<int>(b);
}

Word shift(const Word& w, std::size_t k) {
  Word out;
  out.phase = w.phase;
  out.exps = w.exps.shifted(k);
  return out;
}

CentralWordSet central_words(const Bitstream& stream, std::size_t n) {
  CentralWordSet set;
  set.n = n;
  for (auto& v : kernel(toeplitz(stream, n)).vectors)
    set.words.push_back(Word::from_exps(std::move(v)));
  return set;
}

PalindromeReport check_palindrome_center(const Bitstream& stream, std::size_t n) {
  if (n == 0) throw NotABreakPoint("n must be positive");
  if (nullity_at(stream, n - 1) != 0 || nullity_at(stream, n) != 1)
    throw NotABreakPoint("nullities at n-1 and n are not (0, 1) for n = " +
                         std::to_string(n));
  PalindromeReport report;
  report.n = n;
  report.exponents = kernel(toeplitz(stream, n)).vectors.front();
  report.palindrome = true;
  for (std::size_t i = 0; i < n; ++i)
    if (report.exponents.get(i) != report.exponents.get(n - 1 - i))
      report.palindrome = false;
  report.endpoints_one = report.exponents.get(0) && report.exponents.get(n - 1);
  return report;
}

}  // namespace binshift
