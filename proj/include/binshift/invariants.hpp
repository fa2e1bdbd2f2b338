#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "binshift/bitstream.hpp"
#include "binshift/gf2.hpp"
#include "binshift/perturbation.hpp"
#include "binshift/word.hpp"

namespace binshift {

enum class StringShape { Short, Peak };

struct ProfileString {
  StringShape shape = StringShape::Short;
  std::size_t r = 1;      // peak height; 1 for the short string
  std::size_t start = 0;  // 1-based index n where the string begins
  std::string to_string() const;
};

/// Parse of a nullity sequence into strings "1,0" and "1,2,...,r,...,1,0".
struct NullityProfile {
  std::vector<std::size_t> sequence;  // nu_1..nu_N
  std::vector<ProfileString> strings;
  bool trailing_partial = false;
  std::size_t partial_start = 0;  // 1-based, valid when trailing_partial
  std::string structure_string() const;
};

/// Greedy left-to-right parse. A trailing incomplete string is allowed and
/// flagged; any other deviation throws StructureViolation, which for a
/// sequence produced by nullity_sequence indicates an upstream bug.
NullityProfile parse_structure(const std::vector<std::size_t>& sequence);

enum class IndexVerdict { Exact, LowerBound, InfiniteByAperiodicity };

struct CommutantIndexResult {
  IndexVerdict verdict = IndexVerdict::LowerBound;
  // Exact: the index k. LowerBound: k_max + 1 (no witness within bounds).
  std::size_t k = 0;
  std::optional<GF2Vector> witness;  // exponent vector, minimal support
  std::size_t k_max = 0;
  std::size_t m_max = 0;  // resolved support bound actually used
  // The digit data was treated as eventually periodic on the strength of a
  // bounded scan only.
  bool empirical_periodicity = false;
  // Verdict obtained by carrying a witness through the perturbation cocycle
  // instead of solving on the perturbed digits directly.
  bool transported_witness = false;
  std::string to_string() const;
};

struct CommutantOptions {
  std::size_t k_max = 16;
  std::size_t m_max = 0;  // 0 = adaptive bound from (preperiod, period, k)
  std::size_t periodicity_bound = 64;  // scan bound for perturbed streams
};

/// Least k such that some nontrivial word commutes with every v_j, j >= k
/// (the combinatorial commutant index). For eventually periodic digit data
/// the infinite row system over j is reduced exactly: rows repeat with the
/// period once j >= preperiod + support, so j in [k, max(k, q+m) + p) decides
/// it. Streams asserted aperiodic map to InfiniteByAperiodicity.
///
/// Perturbed streams can have eventual periods that grow exponentially in
/// the break point, so two routes are combined: a bounded periodicity scan
/// (verdicts flagged empirical) and, always, witness transport through the
/// perturbation cocycle u alpha(u)...alpha^{k-1}(u), which maps the base
/// witness space bijectively onto the perturbed one. When both routes
/// produce an answer they are cross-checked.
CommutantIndexResult commutant_index(const Bitstream& stream,
                                     const CommutantOptions& opts = {});

/// Re-derives a witness claim directly from digits: word(c) commutes with
/// v_j for all j in [k, k + window].
bool verify_commutant_witness(const Bitstream& stream, std::size_t k,
                              const GF2Vector& witness, std::size_t window);

struct ClassificationRow {
  std::string descriptor;
  std::string digits;
  std::vector<std::size_t> nullities;
  std::string structure;
  std::vector<std::size_t> break_points;
  std::vector<std::size_t> depths;       // aligned with break_points
  std::vector<bool> depth_known;         // false -> rendered "-"
  std::string commutant_index;           // numeral, "inf", or "" when invalid
  std::string index_kind;                // exact | lower_bound | infinite | invalid
  std::string witness;
  int duplicate_group = -1;  // rows sharing a digit prefix, -1 when unique
};

struct ClassificationTable {
  std::size_t digit_count = 0;
  std::vector<ClassificationRow> rows;
};

struct ClassifyOptions {
  std::size_t digit_count = 16;
  CommutantOptions commutant;
  std::size_t break_limit = 0;  // 0 = digit_count
  unsigned jobs = 1;
};

/// One row per stream; rows with identical digit prefixes share a duplicate
/// group (conjugacy-indistinguishable at this horizon). Output is identical
/// for every jobs value.
ClassificationTable classify(const std::vector<Bitstream>& streams,
                             const ClassifyOptions& opts);

/// All 2^(len-1) prefixes of length len with a_0 = 0, in ascending order of
/// the integer whose bit j-1 is a_j, as zero-extended prefix streams.
ClassificationTable census(std::size_t len, const ClassifyOptions& opts);

// Stable v1 schema:
// descriptor,digits,nullity_seq,structure,break_points,depths,commutant_index,index_kind,witness
extern const char* const kClassificationCsvHeader;
extern const char* const kClassificationSchemaVersion;

std::string to_csv(const ClassificationTable& table);
std::string to_json(const ClassificationTable& table);

}  // namespace binshift
