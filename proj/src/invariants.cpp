#include "binshift/invariants.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

namespace binshift {

const char* const kClassificationCsvHeader =
    "descriptor,digits,nullity_seq,structure,break_points,depths,commutant_index,"
    "index_kind,witness";
const char* const kClassificationSchemaVersion = "binshift.v1";

std::string ProfileString::to_string() const {
  if (shape == StringShape::Short) return "Short";
  return "Peak(" + std::to_string(r) + ")";
}

std::string NullityProfile::structure_string() const {
  std::string out;
  for (const auto& s : strings) {
    if (!out.empty()) out += ' ';
    out += s.to_string();
  }
  if (trailing_partial) {
    if (!out.empty()) out += ' ';
    out += "Partial";
  }
  return out;
}

NullityProfile parse_structure(const std::vector<std::size_t>& sequence) {
  NullityProfile profile;
  profile.sequence = sequence;
  const std::size_t N = sequence.size();
  std::size_t pos = 0;

  while (pos < N) {
    if (sequence[pos] != 1)
      throw StructureViolation("nullity string must start with 1", pos);
    const std::size_t start = pos + 1;  // 1-based index n
    if (pos + 1 == N) {
      profile.trailing_partial = true;
      profile.partial_start = start;
      break;
    }
    if (sequence[pos + 1] == 0) {
      profile.strings.push_back({StringShape::Short, 1, start});
      pos += 2;
      continue;
    }

    // Ascend 1, 2, ..., r, then require the descent r-1, ..., 1, 0.
    std::size_t i = pos;
    while (i + 1 < N && sequence[i + 1] == sequence[i] + 1) ++i;
    const std::size_t r = sequence[i];
    if (i + 1 == N) {
      profile.trailing_partial = true;
      profile.partial_start = start;
      break;
    }
    bool partial = false;
    for (std::size_t t = r; t-- > 0;) {
      ++i;
      if (i == N) {
        partial = true;
        break;
      }
      if (sequence[i] != t)
        throw StructureViolation("nullity string descent broken", i);
    }
    if (partial) {
      profile.trailing_partial = true;
      profile.partial_start = start;
      break;
    }
    profile.strings.push_back({StringShape::Peak, r, start});
    pos = i + 1;
  }
  return profile;
}

std::string CommutantIndexResult::to_string() const {
  std::ostringstream os;
  switch (verdict) {
    case IndexVerdict::Exact:
      os << "exact(" << k << ")";
      if (witness) os << " witness=" << Word::from_exps(*witness).to_string();
      break;
    case IndexVerdict::LowerBound:
      os << "no witness for k <= " << k_max << " (lower bound " << k << ")";
      break;
    case IndexVerdict::InfiniteByAperiodicity:
      os << "infinite (asserted aperiodic bitstream)";
      break;
  }
  if (empirical_periodicity) os << " [empirical periodicity]";
  if (transported_witness) os << " [transported witness]";
  return os.str();
}

namespace {

struct PeriodicShape {
  std::size_t preperiod = 0;
  std::size_t period = 1;
  bool empirical = false;
};

const Bitstream& perturbation_root(const Bitstream& s) {
  const Bitstream* p = &s;
  while (p->kind() == StreamKind::Perturbed) p = &p->perturbation_base();
  return *p;
}

bool exactly_invalid(const Bitstream& s) {
  if (s.at(0) != 0) return true;
  if (s.kind() == StreamKind::EventuallyPeriodic) {
    try {
      s.validate(1);
    } catch (const MirrorPeriodic&) {
      return true;
    }
    return false;
  }
  if (s.kind() == StreamKind::Prefix) {
    // Zero-extended: the mirror is periodic exactly when every digit is 0.
    for (auto b : s.prefix_bits())
      if (b) return false;
    return s.prefix_policy() == TailPolicy::ZeroExtend;
  }
  return false;
}

// Canonical witness: reduce the kernel basis on highest set bits and return
// the vector whose top index is least (the minimal-support representative).
GF2Vector minimal_support_witness(std::vector<GF2Vector> basis) {
  std::map<long, GF2Vector> by_top;
  for (auto v : basis) {
    while (!v.is_zero()) {
      const long top = v.highest_set();
      auto it = by_top.find(top);
      if (it == by_top.end()) {
        by_top.emplace(top, std::move(v));
        break;
      }
      v ^= it->second;
    }
  }
  // Back-substitute so lower entries clear their top bit from higher ones.
  for (auto it = by_top.begin(); it != by_top.end(); ++it)
    for (auto jt = std::next(it); jt != by_top.end(); ++jt)
      if (jt->second.get(static_cast<std::size_t>(it->first))) jt->second ^= it->second;
  return by_top.begin()->second;
}

std::size_t auto_support_bound(std::size_t k, const PeriodicShape& shape) {
  return std::min<std::size_t>(256, 2 * shape.preperiod + 6 * shape.period + 3 * k + 12);
}

// Smallest-k scan of the exact finite systems for digit data assumed
// eventually periodic with the given shape.
CommutantIndexResult periodic_index_scan(const Bitstream& stream,
                                         const CommutantOptions& opts,
                                         const PeriodicShape& shape) {
  CommutantIndexResult result;
  result.k_max = opts.k_max;
  result.empirical_periodicity = shape.empirical;
  const std::size_t q = shape.preperiod, p = shape.period;
  for (std::size_t k = 1; k <= opts.k_max; ++k) {
    const std::size_t m = opts.m_max ? opts.m_max : auto_support_bound(k, shape);
    result.m_max = m;
    // Row j imposes sum_i c_i a_{|j-i|} = 0. Once j >= q + m the row window
    // sits in the periodic tail, so rows repeat with period p; imposing
    // j in [k, max(k, q+m) + p) decides the full system over j >= k.
    const std::size_t row_end = std::max(k, q + m) + p;
    GF2Matrix system(row_end - k, m);
    for (std::size_t j = k; j < row_end; ++j)
      for (std::size_t i = 0; i < m; ++i)
        if (stream.at(j > i ? j - i : i - j)) system.set(j - k, i, true);

    KernelBasis kb = kernel(system);
    if (kb.nullity() > 0) {
      result.verdict = IndexVerdict::Exact;
      result.k = k;
      result.witness = minimal_support_witness(std::move(kb.vectors));
      if (!shape.empirical &&
          !verify_commutant_witness(stream, k, *result.witness, 2 * (q + m + p)))
        throw InternalInconsistency("solved commutant witness fails digit re-check");
      return result;
    }
  }
  result.verdict = IndexVerdict::LowerBound;
  result.k = opts.k_max + 1;
  return result;
}

// A witness X for the base shift at index k maps to a witness for the
// perturbed shift: Y = W_k^* X W_k with W_k = alpha^{k-1}(u)...alpha(u) u
// commutes with every perturbed generator u_j = W_j^* v_j W_j, j >= k,
// because the conjugated generator lies in the algebra generated by
// {v_t : t >= k}, with which X commutes. The map is linear and invertible on
// exponent vectors, so witness spaces correspond level by level and the
// index itself carries over. Y is re-expressed in the perturbed generators
// by a triangular solve (u_i has top exponent i).
GF2Vector transport_witness(const Bitstream& perturbed_stream, std::size_t k,
                            const GF2Vector& base_witness) {
  const Bitstream& base = perturbed_stream.perturbation_base();
  const BreakPoint& bp = perturbed_break_point(perturbed_stream);
  const UKind kind = perturbed_u_kind(perturbed_stream);

  Word y = Word::from_exps(base_witness);
  for (std::size_t t = k; t-- > 0;) y = ad_u(y, shift(bp.z, t), kind, base);

  GF2Vector coords;
  GF2Vector rest = y.exps;
  while (!rest.is_zero()) {
    const long top = rest.highest_set();
    coords.set(static_cast<std::size_t>(top), true);
    rest ^= perturbed_generator(perturbed_stream, static_cast<std::size_t>(top)).exps;
    if (!rest.is_zero() && rest.highest_set() >= top)
      throw InternalInconsistency("perturbed generator coordinates did not triangulate");
  }
  return coords;
}

}  // namespace

bool verify_commutant_witness(const Bitstream& stream, std::size_t k,
                              const GF2Vector& witness, std::size_t window) {
  if (witness.is_zero()) return false;
  for (std::size_t j = k; j <= k + window; ++j) {
    unsigned parity = 0;
    witness.for_each_set([&](std::size_t i) {
      parity ^= static_cast<unsigned>(stream.at(j > i ? j - i : i - j));
    });
    if (parity) return false;
  }
  return true;
}

CommutantIndexResult commutant_index(const Bitstream& stream,
                                     const CommutantOptions& opts) {
  if (stream.at(0) != 0)
    throw InvalidStream("a_0 = 1: commutant index undefined for this stream");
  if (stream.kind() == StreamKind::EventuallyPeriodic)
    stream.validate(1);  // throws MirrorPeriodic for inadmissible streams
  if (stream.kind() == StreamKind::Prefix && exactly_invalid(stream))
    throw MirrorPeriodic(
        "zero-extended all-zero prefix has a periodic mirror; no binary shift exists",
        1);

  CommutantIndexResult result;
  result.k_max = opts.k_max;

  const Bitstream& root = perturbation_root(stream);
  if (root.kind() == StreamKind::Rule && root.asserted_aperiodic()) {
    // Finite index happens exactly for eventually periodic streams, and the
    // index is invariant under the perturbation construction.
    result.verdict = IndexVerdict::InfiniteByAperiodicity;
    result.k = 0;
    return result;
  }
  if (root.kind() == StreamKind::Rule)
    throw Error("cannot decide commutant index for a rule without an aperiodicity assertion");

  if (stream.kind() == StreamKind::EventuallyPeriodic)
    return periodic_index_scan(
        stream, opts, {stream.preperiod().size(), stream.period().size(), false});
  if (stream.kind() == StreamKind::Prefix)
    return periodic_index_scan(stream, opts,
                               {stream.prefix_bits().size(), 1, false});  // zero tail

  // Perturbed stream. Transport is always available and exact; the bounded
  // periodicity scan, when it fires, recomputes the verdict independently
  // from the digits alone and the two are cross-checked.
  CommutantIndexResult transported = commutant_index(stream.perturbation_base(), opts);
  if (transported.verdict == IndexVerdict::Exact) {
    GF2Vector carried = transport_witness(stream, transported.k, *transported.witness);
    const std::size_t window =
        4 * (static_cast<std::size_t>(carried.highest_set() + 1) + transported.k + 32);
    if (!verify_commutant_witness(stream, transported.k, carried, window))
      throw InternalInconsistency("transported witness fails on the perturbed digits");
    transported.witness = std::move(carried);
  }
  transported.transported_witness = true;
  transported.k_max = opts.k_max;

  for (std::size_t bound = std::min<std::size_t>(16, opts.periodicity_bound);
       bound >= 1 && bound <= opts.periodicity_bound; bound *= 2) {
    const auto guess =
        detect_eventual_period(stream, std::min(bound, opts.periodicity_bound));
    if (!guess) continue;
    CommutantIndexResult empirical =
        periodic_index_scan(stream, opts, {guess->preperiod, guess->period, true});
    if (empirical.verdict == IndexVerdict::Exact) {
      const std::size_t window = 2 * (guess->preperiod + empirical.m_max + guess->period);
      if (!verify_commutant_witness(stream, empirical.k, *empirical.witness, window))
        break;  // the bounded periodicity guess was wrong; keep the transport
    }
    if (empirical.verdict == transported.verdict && empirical.k == transported.k)
      return empirical;
    break;
  }
  return transported;
}

namespace {

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string join_depths(const std::vector<std::size_t>& depths,
                        const std::vector<bool>& known) {
  std::string out;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (i) out += ' ';
    out += known[i] ? std::to_string(depths[i]) : std::string("-");
  }
  return out;
}

ClassificationRow make_row(const Bitstream& stream, const ClassifyOptions& opts) {
  ClassificationRow row;
  row.descriptor = stream.format();

  const std::size_t N = opts.digit_count;
  const auto digit_vec = stream.digits(N);
  row.digits.reserve(N);
  for (auto b : digit_vec) row.digits.push_back(b ? '1' : '0');

  row.nullities = nullity_sequence(stream, N);
  NullityProfile profile = parse_structure(row.nullities);
  row.structure = profile.structure_string();

  const std::size_t limit = opts.break_limit ? opts.break_limit : N;
  std::vector<std::size_t> nu_with_zero{0};
  nu_with_zero.insert(nu_with_zero.end(), row.nullities.begin(), row.nullities.end());
  for (std::size_t n = 1; n <= limit && n < nu_with_zero.size(); ++n) {
    if (nu_with_zero[n - 1] != 0 || nu_with_zero[n] != 1) continue;
    row.break_points.push_back(n);
    try {
      row.depths.push_back(break_point_at(stream, n).depth);
      row.depth_known.push_back(true);
    } catch (const DepthSearchExceeded&) {
      row.depths.push_back(0);
      row.depth_known.push_back(false);
    }
  }

  if (exactly_invalid(stream)) {
    row.index_kind = "invalid";
  } else {
    const CommutantIndexResult idx = commutant_index(stream, opts.commutant);
    switch (idx.verdict) {
      case IndexVerdict::Exact:
        row.commutant_index = std::to_string(idx.k);
        row.index_kind = "exact";
        row.witness = Word::from_exps(*idx.witness).to_string();
        break;
      case IndexVerdict::LowerBound:
        row.commutant_index = std::to_string(idx.k);
        row.index_kind = "lower_bound";
        break;
      case IndexVerdict::InfiniteByAperiodicity:
        row.commutant_index = "inf";
        row.index_kind = "infinite";
        break;
    }
    if (idx.empirical_periodicity) row.index_kind += "(empirical)";
    if (idx.transported_witness) row.index_kind += "(transported)";
  }
  return row;
}

void assign_duplicate_groups(ClassificationTable& table) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_digits;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    by_digits[table.rows[i].digits].push_back(i);
  int next_group = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].duplicate_group != -1) continue;
    const auto& peers = by_digits[table.rows[i].digits];
    if (peers.size() < 2) continue;
    for (auto j : peers) table.rows[j].duplicate_group = next_group;
    ++next_group;
  }
}

template <class MakeStream>
ClassificationTable run_rows(std::size_t count, MakeStream&& make,
                             const ClassifyOptions& opts) {
  ClassificationTable table;
  table.digit_count = opts.digit_count;
  table.rows.resize(count);

  const unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) table.rows[i] = make_row(make(i), opts);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < count; i += jobs)
            table.rows[i] = make_row(make(i), opts);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  assign_duplicate_groups(table);
  return table;
}

}  // namespace

ClassificationTable classify(const std::vector<Bitstream>& streams,
                             const ClassifyOptions& opts) {
  return run_rows(
      streams.size(), [&](std::size_t i) -> const Bitstream& { return streams[i]; },
      opts);
}

ClassificationTable census(std::size_t len, const ClassifyOptions& opts) {
  if (len < 1) throw Error("census length must be positive");
  if (len > 24) throw SizeTooLarge("census length limited to 24");
  const std::size_t count = std::size_t{1} << (len - 1);
  ClassifyOptions local = opts;
  if (local.digit_count == 0 || local.digit_count > len) local.digit_count = len;
  return run_rows(
      count,
      [&](std::size_t idx) {
        std::vector<std::uint8_t> bits(len, 0);
        for (std::size_t j = 1; j < len; ++j)
          bits[j] = static_cast<std::uint8_t>((idx >> (j - 1)) & 1);
        return Bitstream::prefix(std::move(bits));
      },
      local);
}

std::string to_csv(const ClassificationTable& table) {
  std::string out = kClassificationCsvHeader;
  out += '\n';
  for (const auto& row : table.rows) {
    out += row.descriptor;
    out += ',';
    out += row.digits;
    out += ',';
    out += join_sizes(row.nullities);
    out += ',';
    out += row.structure;
    out += ',';
    out += join_sizes(row.break_points);
    out += ',';
    out += join_depths(row.depths, row.depth_known);
    out += ',';
    out += row.commutant_index;
    out += ',';
    out += row.index_kind;
    out += ',';
    out += row.witness;
    out += '\n';
  }
  return out;
}

std::string to_json(const ClassificationTable& table) {
  nlohmann::ordered_json doc;
  doc["schema"] = kClassificationSchemaVersion;
  doc["digits"] = table.digit_count;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["descriptor"] = row.descriptor;
    r["digits"] = row.digits;
    r["nullity_seq"] = row.nullities;
    r["structure"] = row.structure;
    r["break_points"] = row.break_points;
    auto depths = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < row.depths.size(); ++i) {
      if (row.depth_known[i])
        depths.push_back(row.depths[i]);
      else
        depths.push_back(nullptr);
    }
    r["depths"] = std::move(depths);
    r["commutant_index"] = row.commutant_index;
    r["index_kind"] = row.index_kind;
    r["witness"] = row.witness;
    r["duplicate_group"] = row.duplicate_group;
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump() + "\n";
}

}  // namespace binshift
