#include "binshift/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <variant>

namespace binshift {

namespace detail {

struct PrefixNode {
  std::vector<std::uint8_t> bits;
  TailPolicy policy;
};

struct EvpNode {
  std::vector<std::uint8_t> pre;
  std::vector<std::uint8_t> period;
};

struct RuleNode {
  std::string name;
  bool asserted_aperiodic;
  std::function<int(std::size_t)> fn;
};

struct PerturbedNode {
  Bitstream base;
  std::size_t n;
  std::shared_ptr<LazyBits> engine;
};

struct Node {
  std::variant<PrefixNode, EvpNode, RuleNode, PerturbedNode> v;
};

}  // namespace detail

using detail::EvpNode;
using detail::Node;
using detail::PerturbedNode;
using detail::PrefixNode;
using detail::RuleNode;

namespace {

int squares_rule(std::size_t j) {
  if (j == 0) return 0;
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(j)));
  while (r > 0 && r * r > j) --r;
  while ((r + 1) * (r + 1) <= j) ++r;
  return (r >= 1 && r * r == j) ? 1 : 0;
}

int thue_morse_rule(std::size_t j) {
  return std::popcount(static_cast<std::uint64_t>(j)) & 1;
}

struct RuleEntry {
  const char* name;
  bool asserted_aperiodic;
  int (*fn)(std::size_t);
};

// Catalog of named rules. Aperiodicity of each is classical; the flag records
// the assertion, the tool never tries to decide it from samples.
constexpr RuleEntry kRules[] = {
    {"squares", true, squares_rule},
    {"thue-morse", true, thue_morse_rule},
};

const RuleEntry* find_rule(std::string_view name) {
  for (const auto& r : kRules)
    if (name == r.name) return &r;
  return nullptr;
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

Bitstream::Bitstream(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Bitstream Bitstream::prefix(std::vector<std::uint8_t> bits, TailPolicy policy) {
  if (bits.empty()) throw Error("prefix stream needs at least one digit");
  for (auto b : bits)
    if (b > 1) throw Error("prefix digits must be 0 or 1");
  return Bitstream(std::make_shared<Node>(Node{PrefixNode{std::move(bits), policy}}));
}

Bitstream Bitstream::eventually_periodic(std::vector<std::uint8_t> pre,
                                         std::vector<std::uint8_t> period) {
  if (period.empty()) throw Error("eventually periodic stream needs a nonempty period");
  for (auto b : pre)
    if (b > 1) throw Error("preperiod digits must be 0 or 1");
  for (auto b : period)
    if (b > 1) throw Error("period digits must be 0 or 1");
  return Bitstream(
      std::make_shared<Node>(Node{EvpNode{std::move(pre), std::move(period)}}));
}

Bitstream Bitstream::rule(const std::string& name) {
  const RuleEntry* entry = find_rule(name);
  if (!entry) throw Error("unknown rule: " + name);
  return Bitstream(std::make_shared<Node>(
      Node{RuleNode{entry->name, entry->asserted_aperiodic, entry->fn}}));
}

Bitstream Bitstream::perturbed(const Bitstream& base, std::size_t n) {
  if (n == 0) throw Error("perturbation point must be positive");
  auto engine = detail::make_perturbed_bits(base, n);
  return Bitstream(std::make_shared<Node>(Node{PerturbedNode{base, n, std::move(engine)}}));
}

int Bitstream::at(std::size_t j) const {
  const Node& n = *node_;
  if (const auto* p = std::get_if<PrefixNode>(&n.v)) {
    if (j < p->bits.size()) return p->bits[j];
    if (p->policy == TailPolicy::ZeroExtend) return 0;
    throw IndexBeyondPrefix(j, p->bits.size());
  }
  if (const auto* e = std::get_if<EvpNode>(&n.v)) {
    if (j < e->pre.size()) return e->pre[j];
    return e->period[(j - e->pre.size()) % e->period.size()];
  }
  if (const auto* r = std::get_if<RuleNode>(&n.v)) return r->fn(j);
  return std::get<PerturbedNode>(n.v).engine->bit(j);
}

std::optional<int> Bitstream::at_known(std::size_t j) const {
  if (const auto* p = std::get_if<PrefixNode>(&node_->v)) {
    if (j >= p->bits.size() && p->policy == TailPolicy::ErrorBeyond) return std::nullopt;
  }
  return at(j);
}

std::vector<std::uint8_t> Bitstream::digits(std::size_t count) const {
  std::vector<std::uint8_t> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = static_cast<std::uint8_t>(at(j));
  return out;
}

StreamKind Bitstream::kind() const {
  switch (node_->v.index()) {
    case 0: return StreamKind::Prefix;
    case 1: return StreamKind::EventuallyPeriodic;
    case 2: return StreamKind::Rule;
    default: return StreamKind::Perturbed;
  }
}

const std::vector<std::uint8_t>& Bitstream::prefix_bits() const {
  return std::get<PrefixNode>(node_->v).bits;
}

TailPolicy Bitstream::prefix_policy() const {
  return std::get<PrefixNode>(node_->v).policy;
}

const std::vector<std::uint8_t>& Bitstream::preperiod() const {
  return std::get<EvpNode>(node_->v).pre;
}

const std::vector<std::uint8_t>& Bitstream::period() const {
  return std::get<EvpNode>(node_->v).period;
}

const std::string& Bitstream::rule_name() const {
  return std::get<RuleNode>(node_->v).name;
}

bool Bitstream::asserted_aperiodic() const {
  return std::get<RuleNode>(node_->v).asserted_aperiodic;
}

const Bitstream& Bitstream::perturbation_base() const {
  return std::get<PerturbedNode>(node_->v).base;
}

std::size_t Bitstream::perturbation_point() const {
  return std::get<PerturbedNode>(node_->v).n;
}

std::shared_ptr<detail::LazyBits> Bitstream::lazy_engine() const {
  return std::get<PerturbedNode>(node_->v).engine;
}

std::string Bitstream::format() const {
  const Node& n = *node_;
  if (const auto* p = std::get_if<PrefixNode>(&n.v)) {
    // TailPolicy is not part of the wire grammar; both policies format to the
    // canonical prefix identifier of the same digit data.
    return "prefix:" + bits_to_string(p->bits);
  }
  if (const auto* e = std::get_if<EvpNode>(&n.v))
    return "evp:" + bits_to_string(e->pre) + "/" + bits_to_string(e->period);
  if (const auto* r = std::get_if<RuleNode>(&n.v)) return "rule:" + r->name;
  const auto& pt = std::get<PerturbedNode>(n.v);
  return "perturbed:" + pt.base.format() + "@" + std::to_string(pt.n);
}

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  const Bitstream::ParseOptions& opts;

  bool starts_with(std::string_view tok) const {
    return text.substr(pos, tok.size()) == tok;
  }

  std::vector<std::uint8_t> parse_bits() {
    std::vector<std::uint8_t> bits;
    while (pos < text.size() && (text[pos] == '0' || text[pos] == '1')) {
      bits.push_back(static_cast<std::uint8_t>(text[pos] - '0'));
      ++pos;
    }
    return bits;
  }

  std::size_t parse_uint() {
    std::size_t value = 0;
    const auto first = pos;
    auto [ptr, ec] =
        std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{} || ptr == text.data() + pos)
      throw ParseError("expected integer", first, "digits");
    pos = static_cast<std::size_t>(ptr - text.data());
    return value;
  }

  Bitstream parse_descriptor(std::size_t depth) {
    if (starts_with("prefix:")) {
      pos += 7;
      auto bits = parse_bits();
      if (bits.empty()) throw ParseError("empty prefix", pos, "bits");
      return Bitstream::prefix(std::move(bits));
    }
    if (starts_with("evp:")) {
      pos += 4;
      auto pre = parse_bits();
      if (pos >= text.size() || text[pos] != '/')
        throw ParseError("malformed eventually periodic descriptor", pos, "'/'");
      ++pos;
      auto per = parse_bits();
      if (per.empty()) throw ParseError("empty period", pos, "period bits");
      return Bitstream::eventually_periodic(std::move(pre), std::move(per));
    }
    if (starts_with("rule:")) {
      pos += 5;
      const auto first = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '-' ||
              text[pos] == '_'))
        ++pos;
      if (pos == first) throw ParseError("empty rule name", pos, "rule name");
      const std::string name(text.substr(first, pos - first));
      if (!find_rule(name)) throw ParseError("unknown rule '" + name + "'", first, "");
      return Bitstream::rule(name);
    }
    if (starts_with("perturbed:")) {
      if (depth + 1 > opts.max_perturbation_depth)
        throw ParseError("perturbation nesting deeper than " +
                             std::to_string(opts.max_perturbation_depth),
                         pos, "");
      pos += 10;
      Bitstream base = parse_descriptor(depth + 1);
      if (pos >= text.size() || text[pos] != '@')
        throw ParseError("malformed perturbed descriptor", pos, "'@'");
      ++pos;
      const std::size_t n = parse_uint();
      if (n == 0) throw ParseError("perturbation point must be positive", pos, "");
      return Bitstream::perturbed(base, n);
    }
    throw ParseError("unknown descriptor", pos, "prefix:/evp:/rule:/perturbed:");
  }
};

}  // namespace

Bitstream Bitstream::parse(std::string_view text, const ParseOptions& opts) {
  Parser p{text, 0, opts};
  Bitstream s = p.parse_descriptor(0);
  if (p.pos != text.size())
    throw ParseError("trailing characters after descriptor", p.pos, "end of input");
  return s;
}

namespace {

// The mirror sequence m_t = a_{|t|} has period p exactly when the stream is
// purely periodic with period p and additionally a_{p-i} = a_i for
// 0 <= i <= p. Pure periodicity of an eventually periodic stream with
// descriptor (q, per) is decided on a window of length q + lcm(per, p) + p.
bool purely_periodic(const Bitstream& s, std::size_t p, std::size_t q,
                     std::size_t per) {
  const std::size_t window = q + std::lcm(per, p) + p;
  for (std::size_t j = 0; j + p < window + p; ++j)
    if (s.at(j) != s.at(j + p)) return false;
  return true;
}

bool palindromic_at(const Bitstream& s, std::size_t p) {
  for (std::size_t i = 0; i <= p; ++i)
    if (s.at(p - i) != s.at(i)) return false;
  return true;
}

}  // namespace

ValidityReport Bitstream::validate(std::size_t horizon) const {
  if (horizon == 0) throw Error("validate horizon must be positive");
  ValidityReport report;
  report.horizon = horizon;

  if (at(0) != 0)
    throw InvalidStream("a_0 = 1: the commutation relations force a_0 = 0");
  report.a0_ok = true;

  if (kind() == StreamKind::EventuallyPeriodic) {
    const std::size_t q = preperiod().size();
    const std::size_t per = period().size();
    // Every pure period of the stream divides one <= q + per, so this bound
    // decides mirror periodicity exactly.
    for (std::size_t p = 1; p <= q + per; ++p) {
      if (purely_periodic(*this, p, q, per) && palindromic_at(*this, p))
        throw MirrorPeriodic(
            "mirror sequence is periodic with period " + std::to_string(p) +
                "; no binary shift exists for this stream",
            p);
    }
    report.verdict = MirrorVerdict::ExactAperiodic;
    return report;
  }

  if (kind() == StreamKind::Rule) report.asserted_aperiodic = asserted_aperiodic();

  // Bounded verdict: a candidate period p <= horizon is refuted by a pure
  // periodicity violation within [0, 2*horizon + p] or a mirror-palindrome
  // violation. Unknown digits (strict prefixes) refute nothing.
  for (std::size_t p = 1; p <= horizon; ++p) {
    bool refuted = false;
    for (std::size_t i = 0; i <= p && !refuted; ++i) {
      const auto lo = at_known(p - i), hi = at_known(i);
      if (lo && hi && *lo != *hi) refuted = true;
    }
    for (std::size_t j = 0; j + p <= 2 * horizon + p && !refuted; ++j) {
      const auto lo = at_known(j), hi = at_known(j + p);
      if (lo && hi && *lo != *hi) refuted = true;
    }
    if (!refuted) report.unrefuted.push_back(p);
  }
  report.verdict = report.unrefuted.empty() ? MirrorVerdict::BoundedNoPeriod
                                            : MirrorVerdict::BoundedUnrefuted;
  return report;
}

}  // namespace binshift
