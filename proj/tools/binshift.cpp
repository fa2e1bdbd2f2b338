#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "binshift/bitstream.hpp"
#include "binshift/dense_oracle.hpp"
#include "binshift/gf2.hpp"
#include "binshift/invariants.hpp"
#include "binshift/perturbation.hpp"
#include "binshift/word.hpp"

namespace {

using namespace binshift;

// Exit codes: 0 success, 1 invalid input, 2 verification failure,
// 3 internal inconsistency (identities that hold for every admissible input).
constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitVerificationFailure = 2;
constexpr int kExitInternalInconsistency = 3;

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(output_path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + output_path);
  f << text;
}

std::string digits_string(const std::vector<std::uint8_t>& digits) {
  std::string s;
  s.reserve(digits.size());
  for (auto b : digits) s.push_back(b ? '1' : '0');
  return s;
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

const char* ukind_name(UKind kind) {
  return kind == UKind::SelfAdjoint ? "self-adjoint" : "skew";
}

std::string verdict_name(const CommutantIndexResult& r) {
  switch (r.verdict) {
    case IndexVerdict::Exact: return "exact";
    case IndexVerdict::LowerBound: return "lower_bound";
    case IndexVerdict::InfiniteByAperiodicity: return "infinite";
  }
  return "";
}

int run_nullity(const std::string& desc, std::size_t len, const std::string& format,
                const std::string& output) {
  const Bitstream stream = Bitstream::parse(desc);
  stream.validate(len);
  const auto nu = nullity_sequence(stream, len);
  const NullityProfile profile = parse_structure(nu);

  std::ostringstream os;
  if (format == "csv") {
    os << "descriptor,len,nullity_seq,structure\n"
       << stream.format() << ',' << len << ',' << join_sizes(nu) << ','
       << profile.structure_string() << '\n';
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    doc["descriptor"] = stream.format();
    doc["len"] = len;
    doc["nullity_seq"] = nu;
    doc["structure"] = profile.structure_string();
    os << doc.dump() << '\n';
  } else {
    os << join_sizes(nu) << " | " << profile.structure_string() << '\n';
  }
  emit(os.str(), output);
  return kExitOk;
}

int run_central(const std::string& desc, std::size_t n, const std::string& format,
                const std::string& output) {
  const Bitstream stream = Bitstream::parse(desc);
  stream.validate(std::max<std::size_t>(n, 1));
  const CentralWordSet set = central_words(stream, n);

  std::ostringstream os;
  if (format == "csv") {
    os << "descriptor,n,word\n";
    for (const auto& w : set.words)
      os << stream.format() << ',' << n << ',' << w.to_string() << '\n';
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    doc["descriptor"] = stream.format();
    doc["n"] = n;
    doc["nullity"] = set.nullity();
    auto words = nlohmann::ordered_json::array();
    for (const auto& w : set.words) words.push_back(w.to_string());
    doc["words"] = std::move(words);
    os << doc.dump() << '\n';
  } else {
    os << "n: " << n << '\n';
    os << "nullity: " << set.nullity() << '\n';
    os << "dimension: 2^" << set.nullity() << '\n';
    for (const auto& w : set.words) os << w.to_string() << '\n';
  }
  emit(os.str(), output);
  return kExitOk;
}

int run_perturb(const std::string& desc, std::size_t at, std::size_t count,
                const std::string& format, const std::string& output) {
  const Bitstream stream = Bitstream::parse(desc);
  stream.validate(std::max<std::size_t>(at + 1, 8));
  const PerturbationResult result = perturb(stream, at);
  const std::string digits = digits_string(result.digits(count));

  std::ostringstream os;
  if (format == "csv") {
    os << "descriptor,at,depth,u_kind,first_difference,digits,checks\n"
       << result.perturbed().format() << ',' << at << ',' << result.breakpoint().depth
       << ',' << ukind_name(result.u_kind()) << ',' << result.first_difference() << ','
       << digits << ',' << (result.checks().all() ? "ok" : "FAIL") << '\n';
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    doc["descriptor"] = result.perturbed().format();
    doc["at"] = at;
    doc["depth"] = result.breakpoint().depth;
    doc["u_kind"] = ukind_name(result.u_kind());
    doc["first_difference"] = result.first_difference();
    doc["digits"] = digits;
    doc["checks_ok"] = result.checks().all();
    os << doc.dump() << '\n';
  } else {
    os << "descriptor: " << result.perturbed().format() << '\n';
    os << "u-kind: " << ukind_name(result.u_kind()) << '\n';
    os << "depth: " << result.breakpoint().depth << '\n';
    os << "first-difference: " << result.first_difference() << '\n';
    os << "digits: " << digits << '\n';
    os << "checks: " << (result.checks().all() ? "ok" : "FAIL") << '\n';
  }
  emit(os.str(), output);
  return result.checks().all() ? kExitOk : kExitInternalInconsistency;
}

int run_family(const std::string& desc, std::size_t count, std::size_t limit,
               const std::string& format, const std::string& output) {
  const Bitstream stream = Bitstream::parse(desc);
  stream.validate(8);
  const auto results = family(stream, count, limit);

  std::ostringstream os;
  if (format == "csv") {
    os << "descriptor,break_point,depth,first_difference\n";
    for (const auto& r : results)
      os << r.perturbed().format() << ',' << r.breakpoint().n << ','
         << r.breakpoint().depth << ',' << r.first_difference() << '\n';
  } else if (format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      nlohmann::ordered_json item;
      item["descriptor"] = r.perturbed().format();
      item["break_point"] = r.breakpoint().n;
      item["depth"] = r.breakpoint().depth;
      item["first_difference"] = r.first_difference();
      arr.push_back(std::move(item));
    }
    os << arr.dump() << '\n';
  } else {
    for (const auto& r : results)
      os << r.perturbed().format() << "  first-difference=" << r.first_difference()
         << '\n';
  }
  emit(os.str(), output);
  return kExitOk;
}

int run_commutant(const std::string& desc, const CommutantOptions& opts,
                  const std::string& format, const std::string& output) {
  const Bitstream stream = Bitstream::parse(desc);
  stream.validate(8);
  const CommutantIndexResult r = commutant_index(stream, opts);
  const std::string witness =
      r.witness ? Word::from_exps(*r.witness).to_string() : std::string();

  std::ostringstream os;
  if (format == "csv") {
    os << "descriptor,verdict,k,witness,k_max,m_max,empirical,transported\n"
       << stream.format() << ',' << verdict_name(r) << ',' << r.k << ',' << witness
       << ',' << r.k_max << ',' << r.m_max << ',' << (r.empirical_periodicity ? 1 : 0)
       << ',' << (r.transported_witness ? 1 : 0) << '\n';
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    doc["descriptor"] = stream.format();
    doc["verdict"] = verdict_name(r);
    doc["k"] = r.k;
    doc["witness"] = witness;
    doc["k_max"] = r.k_max;
    doc["m_max"] = r.m_max;
    doc["empirical_periodicity"] = r.empirical_periodicity;
    doc["transported_witness"] = r.transported_witness;
    os << doc.dump() << '\n';
  } else {
    os << "verdict: " << verdict_name(r) << '\n';
    if (r.verdict != IndexVerdict::InfiniteByAperiodicity) os << "k: " << r.k << '\n';
    if (r.witness) os << "witness: " << witness << '\n';
    if (r.empirical_periodicity) os << "periodicity: empirical\n";
    if (r.transported_witness) os << "witness-route: transported\n";
  }
  emit(os.str(), output);
  return kExitOk;
}

int run_census(std::size_t len, const ClassifyOptions& opts, const std::string& format,
               const std::string& output) {
  const ClassificationTable table = census(len, opts);
  emit(format == "json" ? to_json(table) : to_csv(table), output);
  return kExitOk;
}

int run_classify(const std::vector<std::string>& descs, const ClassifyOptions& opts,
                 const std::string& format, const std::string& output) {
  std::vector<Bitstream> streams;
  streams.reserve(descs.size());
  for (const auto& d : descs) {
    Bitstream s = Bitstream::parse(d);
    s.validate(opts.digit_count);
    streams.push_back(std::move(s));
  }
  const ClassificationTable table = classify(streams, opts);

  std::ostringstream os;
  if (format == "json") {
    os << to_json(table);
  } else {
    os << to_csv(table);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      if (table.rows[i].duplicate_group >= 0)
        os << "# indistinguishable at horizon " << table.digit_count << ": row " << i
           << " (" << table.rows[i].descriptor << ") group "
           << table.rows[i].duplicate_group << '\n';
  }
  emit(os.str(), output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: the full identity suite on one stream.

class Verifier {
 public:
  explicit Verifier(std::ostream& os) : os_(os) {}

  void ok(const std::string& name, const std::string& detail = "") {
    os_ << "[ok] " << name;
    if (!detail.empty()) os_ << ": " << detail;
    os_ << '\n';
  }

  void fail(int level, const std::string& name, const std::string& detail) {
    os_ << "[FAIL] " << name << ": " << detail << '\n';
    worst_ = std::max(worst_, level);
  }

  void check(bool pass, int fail_level, const std::string& name,
             const std::string& detail = "") {
    if (pass)
      ok(name, detail);
    else
      fail(fail_level, name, detail.empty() ? "check failed" : detail);
  }

  int worst() const { return worst_; }

 private:
  std::ostream& os_;
  int worst_ = kExitOk;
};

Word random_word(std::mt19937_64& rng, std::size_t support) {
  GF2Vector exps(support);
  for (std::size_t i = 0; i < support; ++i)
    if (rng() & 1) exps.set(i, true);
  return Word::from_exps(std::move(exps), static_cast<unsigned>(rng() % 4));
}

int run_verify(const std::string& desc, std::size_t len, std::uint64_t seed,
               const std::string& output) {
  std::ostringstream os;
  Verifier v(os);
  const Bitstream stream = Bitstream::parse(desc);

  const ValidityReport report = stream.validate(len);
  switch (report.verdict) {
    case MirrorVerdict::ExactAperiodic:
      v.ok("mirror aperiodicity", "exact");
      break;
    case MirrorVerdict::BoundedNoPeriod:
      v.ok("mirror aperiodicity",
           "no mirror period <= " + std::to_string(len) +
               (report.asserted_aperiodic ? "; asserted aperiodic" : ""));
      break;
    case MirrorVerdict::BoundedUnrefuted:
      if (report.asserted_aperiodic)
        v.ok("mirror aperiodicity", "asserted aperiodic (bounded scan inconclusive)");
      else
        v.fail(kExitVerificationFailure, "mirror aperiodicity",
               "candidate periods not refuted at horizon " + std::to_string(len));
      break;
  }

  // Nullity structure: concatenation of the two admissible string shapes.
  const auto nu = nullity_sequence(stream, len);
  try {
    const NullityProfile profile = parse_structure(nu);
    v.ok("nullity structure", profile.structure_string());
  } catch (const StructureViolation& e) {
    v.fail(kExitInternalInconsistency, "nullity structure", e.what());
  }

  // Center dimension: exhaustive count of central exponent vectors is 2^nu_n.
  {
    bool pass = true;
    std::string detail;
    const std::size_t n_cap = std::min<std::size_t>(len, 10);
    for (std::size_t n = 1; n <= n_cap && pass; ++n) {
      std::size_t count = 0;
      for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        GF2Vector c(n);
        for (std::size_t i = 0; i < n; ++i)
          if ((bits >> i) & 1) c.set(i, true);
        const Word w = Word::from_exps(std::move(c));
        bool central = true;
        for (std::size_t j = 0; j < n && central; ++j)
          central = commutation_bit(w, Word::generator(j), stream) == 0;
        if (central) ++count;
      }
      if (count != (std::size_t{1} << nu[n - 1])) {
        pass = false;
        detail = "mismatch at n = " + std::to_string(n);
      }
    }
    v.check(pass, kExitInternalInconsistency, "center dimension 2^nu",
            pass ? "n <= " + std::to_string(n_cap) : detail);
  }

  // Break points: palindromic kernel generator and plateau centers generated
  // by the shifts of z.
  std::vector<BreakPoint> bps;
  try {
    bps = break_points(stream, len);
  } catch (const DepthSearchExceeded& e) {
    v.fail(kExitVerificationFailure, "break points", e.what());
  }
  {
    bool pass = true;
    std::string detail;
    for (const auto& bp : bps) {
      const PalindromeReport pal = check_palindrome_center(stream, bp.n);
      if (!pal.consistent()) {
        pass = false;
        detail = "palindrome failure at n = " + std::to_string(bp.n);
        break;
      }
      for (std::size_t m = 0; m < bp.depth && pass; ++m) {
        const GF2Matrix a = toeplitz(stream, bp.n + m);
        for (std::size_t t = 0; t <= m; ++t)
          if (!a.mul(bp.z.exps.shifted(t)).is_zero()) {
            pass = false;
            detail = "shifted generator not central at n+" + std::to_string(m);
          }
      }
      for (std::size_t s = 0; s + 1 < bp.depth && pass; ++s) {
        const GF2Matrix a = toeplitz(stream, bp.n + bp.depth + s);
        for (std::size_t t = s + 1; t < bp.depth; ++t)
          if (!a.mul(bp.z.exps.shifted(t)).is_zero()) {
            pass = false;
            detail = "descent center not generated by shifted z";
          }
      }
    }
    v.check(pass, kExitInternalInconsistency, "palindrome centers",
            pass ? std::to_string(bps.size()) + " break points" : detail);
  }

  // Construction identities at the first break points.
  const std::size_t bp_count = std::min<std::size_t>(bps.size(), 3);
  for (std::size_t i = 0; i < bp_count; ++i) {
    const std::size_t n = bps[i].n;
    const std::string tag = "perturbation at n=" + std::to_string(n);
    try {
      const PerturbationResult r = perturb(stream, n);
      v.check(r.checks().all(), kExitInternalInconsistency, tag,
              "first-difference=" + std::to_string(r.first_difference()));

      const auto base_nu = nullity_sequence(stream, 24);
      const auto pert_nu = nullity_sequence(r.perturbed(), 24);
      v.check(base_nu == pert_nu, kExitInternalInconsistency,
              tag + " nullity preservation", "N = 24");

      r.perturbed().validate(std::min<std::size_t>(len, 16));
      v.ok(tag + " perturbed validity", "bounded horizon");

      if (stream.kind() == StreamKind::EventuallyPeriodic) {
        const CommutantIndexResult base_idx = commutant_index(stream);
        const CommutantIndexResult pert_idx = commutant_index(r.perturbed());
        const bool same =
            base_idx.verdict == pert_idx.verdict && base_idx.k == pert_idx.k;
        v.check(same, kExitVerificationFailure, tag + " commutant invariance",
                base_idx.to_string() + " vs " + pert_idx.to_string());
      }
    } catch (const InternalInconsistency& e) {
      v.fail(kExitInternalInconsistency, tag, e.what());
    }
  }

  // The perturbed shift is a *-homomorphism on words (seeded spot check).
  if (!bps.empty()) {
    std::mt19937_64 rng(seed);
    const BreakPoint& bp = bps.front();
    const UKind kind = build_u(bp, stream);
    bool pass = true;
    for (int trial = 0; trial < 200 && pass; ++trial) {
      const Word w1 = random_word(rng, 10);
      const Word w2 = random_word(rng, 10);
      const Word lhs = beta_step(multiply(w1, w2, stream), bp.z, kind, stream);
      const Word rhs = multiply(beta_step(w1, bp.z, kind, stream),
                                beta_step(w2, bp.z, kind, stream), stream);
      if (lhs != rhs) pass = false;
      const Word star_lhs = beta_step(adjoint(w1, stream), bp.z, kind, stream);
      const Word star_rhs = adjoint(beta_step(w1, bp.z, kind, stream), stream);
      if (star_lhs != star_rhs) pass = false;
    }
    v.check(pass, kExitInternalInconsistency, "perturbed shift homomorphism",
            "200 seeded samples");
  }

  os << (v.worst() == kExitOk ? "verify: all checks passed\n" : "verify: FAILURES\n");
  emit(os.str(), output);
  return v.worst();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary shift invariants over GF(2)"};
  app.require_subcommand(1);

  std::string stream_desc, format = "text", output;
  std::vector<std::string> stream_descs;
  std::size_t len = 16, at = 1, emit_count = 16, count = 1, limit = 64, n_arg = 1;
  std::uint64_t seed = 20240612;
  CommutantOptions copts;
  unsigned jobs = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "text | csv | json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--output", output, "write to file instead of stdout");
  };

  auto* nullity_cmd = app.add_subcommand("nullity", "nullity sequence and its parse");
  nullity_cmd->add_option("--stream", stream_desc)->required();
  nullity_cmd->add_option("--len", len, "sequence length")->required();
  add_common(nullity_cmd);

  auto* central_cmd = app.add_subcommand("central", "central word generators at n");
  central_cmd->add_option("--stream", stream_desc)->required();
  central_cmd->add_option("--n", n_arg, "algebra size")->required();
  add_common(central_cmd);

  auto* perturb_cmd = app.add_subcommand("perturb", "perturb at a break point");
  perturb_cmd->add_option("--stream", stream_desc)->required();
  perturb_cmd->add_option("--at", at, "break point")->required();
  perturb_cmd->add_option("--emit", emit_count, "digits to print");
  add_common(perturb_cmd);

  auto* family_cmd = app.add_subcommand("family", "perturb at the first k break points");
  family_cmd->add_option("--stream", stream_desc)->required();
  family_cmd->add_option("--count", count)->required();
  family_cmd->add_option("--limit", limit, "break point scan limit");
  add_common(family_cmd);

  auto* commutant_cmd = app.add_subcommand("commutant-index", "combinatorial commutant index");
  commutant_cmd->add_option("--stream", stream_desc)->required();
  commutant_cmd->add_option("--kmax", copts.k_max);
  commutant_cmd->add_option("--mmax", copts.m_max, "0 = adaptive");
  commutant_cmd->add_option("--periodicity-bound", copts.periodicity_bound);
  add_common(commutant_cmd);

  auto* census_cmd = app.add_subcommand("census", "all valid prefixes of a length");
  census_cmd->add_option("--len", len)->required();
  census_cmd->add_option("--kmax", copts.k_max);
  census_cmd->add_option("--mmax", copts.m_max);
  census_cmd->add_option("--jobs", jobs, "worker threads (output is identical)");
  add_common(census_cmd);

  auto* classify_cmd = app.add_subcommand("classify", "classification table for streams");
  classify_cmd->add_option("--stream", stream_descs, "repeatable")->required();
  classify_cmd->add_option("--len", len, "digit horizon");
  classify_cmd->add_option("--kmax", copts.k_max);
  classify_cmd->add_option("--mmax", copts.m_max);
  classify_cmd->add_option("--jobs", jobs);
  add_common(classify_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "full identity suite on one stream");
  verify_cmd->add_option("--stream", stream_desc)->required();
  verify_cmd->add_option("--len", len, "horizon");
  verify_cmd->add_option("--seed", seed, "seed for randomized spot checks");
  verify_cmd->add_option("--output", output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(nullity_cmd)) return run_nullity(stream_desc, len, format, output);
    if (app.got_subcommand(central_cmd)) return run_central(stream_desc, n_arg, format, output);
    if (app.got_subcommand(perturb_cmd))
      return run_perturb(stream_desc, at, emit_count, format, output);
    if (app.got_subcommand(family_cmd))
      return run_family(stream_desc, count, limit, format, output);
    if (app.got_subcommand(commutant_cmd))
      return run_commutant(stream_desc, copts, format, output);
    if (app.got_subcommand(census_cmd)) {
      ClassifyOptions opts;
      opts.digit_count = len;
      opts.commutant = copts;
      if (copts.k_max == 16) opts.commutant.k_max = len + 2;
      opts.jobs = jobs;
      return run_census(len, opts, format, output);
    }
    if (app.got_subcommand(classify_cmd)) {
      ClassifyOptions opts;
      opts.digit_count = len;
      opts.commutant = copts;
      opts.jobs = jobs;
      return run_classify(stream_descs, opts, format, output);
    }
    if (app.got_subcommand(verify_cmd)) return run_verify(stream_desc, len, seed, output);
  } catch (const InternalInconsistency& e) {
    std::cerr << "internal inconsistency: " << e.what() << '\n';
    return kExitInternalInconsistency;
  } catch (const StructureViolation& e) {
    std::cerr << "internal inconsistency: " << e.what() << '\n';
    return kExitInternalInconsistency;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitOk;
}
