/// @file sequences.hpp
/// @brief Positive summable sequences with certified tails, the block
/// modulator c in c0 that keeps a/c summable with controlled norm, and the
/// adversarial construction showing no single c works for every a.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dinilab/errors.hpp"

namespace dinilab {

/// value +- error, with the exact quantity inside [lower(), upper()].
struct CertifiedValue {
  double value = 0.0;
  double error = 0.0;
  double lower() const { return value - error; }
  double upper() const { return value + error; }
};

/// A non-negative sequence indexed by k >= 1 together with an oracle that
/// bounds sum_{k >= n} a_k from above (and optionally from below).
class SummableSequence {
 public:
  using Terms = std::function<double(std::uint64_t)>;
  using Tail = std::function<double(std::uint64_t)>;

  /// `tail_upper(n)` must bound sum_{k>=n} a_k from above and be
  /// non-increasing with limit 0; `tail_lower` defaults to 0.
  static SummableSequence custom(Terms terms, Tail tail_upper, std::string label,
                                 Tail tail_lower = {});

  /// a_k = scale * ratio^k.
  static SummableSequence geometric(double ratio, double scale = 1.0);
  /// a_k = scale * k^-exponent, exponent > 1.
  static SummableSequence power(double exponent, double scale = 1.0);
  /// a_k = values[k-1], zero past the end.
  static SummableSequence finite(std::vector<double> values);
  /// Finite sequence read from a CSV with one value per line, or
  /// (index, value) pairs; a header line is skipped.
  static SummableSequence from_csv(const std::string& path);
  /// Termwise sum; tails add.
  static SummableSequence mixture(const std::vector<SummableSequence>& members,
                                  std::vector<double> weights = {});

  double term(std::uint64_t k) const;
  double operator()(std::uint64_t k) const { return term(k); }
  /// Certified upper bound on sum_{k >= n} a_k.
  double tail(std::uint64_t n) const;
  /// Certified lower bound on sum_{k >= n} a_k.
  double tail_lower(std::uint64_t n) const;
  const std::string& label() const;
  /// One past the last non-zero index for finite sequences.
  std::optional<std::uint64_t> support_end() const;

 private:
  struct State;
  explicit SummableSequence(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

/// ||a||_1 to within `precision` using the tail oracle. Throws NumericFailure
/// when more than `max_terms` terms would be needed.
CertifiedValue l1_norm(const SummableSequence& a, double precision,
                       std::uint64_t max_terms = std::uint64_t{1} << 26);

struct ModulatorOptions {
  /// Blocks are generated until n_j exceeds this index (at least two blocks
  /// are always produced).
  std::uint64_t horizon = std::uint64_t{1} << 16;
  /// Relative precision for the certified ||a||_1 used in the thresholds.
  double norm_precision = 1e-9;
  std::uint64_t max_norm_terms = std::uint64_t{1} << 24;
};

/// Bound check for one family member in the compact variant.
struct MemberCheck {
  std::size_t member = 0;
  CertifiedValue a_norm;
  CertifiedValue b_norm;       // computed ||a/c||_1 with remainder bound
  double bound_lower = 0.0;    // eps (1 - delta/2) ||a||
  double bound_upper = 0.0;    // eps (1 + delta) ||a||
  bool holds = false;
};

struct ModulatorResult {
  double epsilon = 0.0;
  double delta = 0.0;
  /// n_1 < n_2 < ... < n_J.
  std::vector<std::uint64_t> blocks;
  /// Certified ||a||_1. For the compact variant the norm, bounds, b_norm and
  /// block sums describe the member of smallest norm; member_checks covers all.
  CertifiedValue a_norm;
  /// [eps (1 - delta/2) ||a||, eps (1 + delta) ||a||] with ||a|| certified.
  double b_norm_lower_bound = 0.0;
  double b_norm_upper_bound = 0.0;
  /// Computed ||a/c||_1: exact sum over the first terms, tail-oracle
  /// brackets for the rest of the computed blocks and the per-block
  /// estimate past n_J.
  CertifiedValue b_norm;
  /// block_sums[j-1] = sum_{k=n_j}^{n_{j+1}-1} a_k / c_k, j = 1..J-1; a
  /// certified upper bound for blocks reaching past the summation limit.
  std::vector<double> block_sums;
  /// Empty for the single-sequence construction.
  std::vector<MemberCheck> member_checks;

  /// c_k: 1/eps before n_2, 1/(2^{j-1} eps) on [n_j, n_{j+1}). Indices past
  /// n_J keep the last block value.
  double c(std::uint64_t k) const;
  /// c_1 .. c_count.
  std::vector<double> c_values(std::uint64_t count) const;
  /// Block number j with n_j <= k < n_{j+1} (0 before n_1).
  std::size_t block_of(std::uint64_t k) const;
  /// Upper bound on sum_{k >= m} a_k / c_k for the sequence that built this
  /// result, given its tail oracle.
  double weighted_tail_bound(const SummableSequence& a, std::uint64_t m) const;
  /// The norm A in the thresholds delta A / 2^{2j-1}: the certified lower
  /// bound on ||a||_1 (on min ||a_i||_1 for the compact variant).
  double threshold_norm = 0.0;
  /// Computed b_norm interval lies inside the lemma bounds, every block sum
  /// is below eps delta A / 2^j, and every member check holds.
  bool within_bounds() const;
};

/// Block modulator for one sequence. epsilon > 0, 0 < delta < 1.
ModulatorResult dp_modulator(const SummableSequence& a, double epsilon, double delta,
                             const ModulatorOptions& options = {});

/// One modulator valid for every member of a finite family: thresholds use
/// r = min ||a_i|| and the largest member tail. Bounds are checked per member.
ModulatorResult dp_modulator_compact(const std::vector<SummableSequence>& family, double epsilon,
                                     double delta, const ModulatorOptions& options = {});

/// A positive non-increasing sequence c_j -> 0 that can be evaluated at
/// astronomically large indices through L = ln j.
class CoefficientSequence {
 public:
  using IndexFunction = std::function<double(std::uint64_t)>;
  using LogIndexFunction = std::function<double(double)>;

  CoefficientSequence(IndexFunction at_index, LogIndexFunction at_log_index, std::string label);
  /// Only integer indices below 2^53 are reachable.
  static CoefficientSequence from_function(IndexFunction at_index, std::string label);

  static CoefficientSequence harmonic();     // 1/j
  static CoefficientSequence geometric();    // 2^-j
  static CoefficientSequence inverse_log();  // 1/ln(j+1)

  double at(std::uint64_t j) const { return at_index_(j); }
  double at_log(double log_index) const { return at_log_index_(log_index); }
  bool has_log_form() const { return static_cast<bool>(at_log_index_); }
  const std::string& label() const { return label_; }

 private:
  IndexFunction at_index_;
  LogIndexFunction at_log_index_;
  std::string label_;
};

struct AdversaryBlock {
  std::size_t k = 0;                  // block number, 1-based
  double log_start = 0.0;             // ln n_k
  std::optional<std::uint64_t> start; // n_k when below 2^53
  double log_length = 0.0;            // ln (n_{k+1} - n_k)
  double value = 0.0;                 // common term a_j on the block (may underflow)
  double log_value = 0.0;             // ln a_j on the block
  double mass = 0.0;                  // 2^-(k+1)
  double c_at_start = 0.0;            // c_{n_k} < 2^-(2k+3)
  double contribution_lower = 0.0;    // mass / c_{n_k} >= 2^(k+2)
};

struct AdversaryOptions {
  std::size_t max_blocks = 400;
  double max_log_index = 1e300;       // search limit for the hit indices
  std::uint64_t direct_sum_limit = 10'000'000;
};

struct AdversaryResult {
  SummableSequence a;
  double log_head_end = 0.0;           // ln n_1; head is indices 1..n_1-1
  std::optional<std::uint64_t> head_end;
  double head_value = 0.0;             // 1/(2(n_1-1))
  double c_first = 0.0;                // c_1
  std::vector<AdversaryBlock> blocks;
  /// Index K = n_{k+1} - 1 past which the partial sum exceeds the target.
  double log_K = 0.0;
  std::optional<std::uint64_t> K;
  std::size_t blocks_to_target = 0;
  double partial_sum_lower = 0.0;      // certified lower bound on sum_{j<=K} a_j/c_j
  std::optional<double> partial_sum_direct;
  CertifiedValue norm;                 // sum of block masses, analytically 1
};

/// Builds a non-increasing a with ||a||_1 = 1 and sum_{j<=K} a_j/c_j > target.
/// Requires c non-increasing (checked on sampled points); throws
/// NumericFailure when c does not fall below the block thresholds within
/// the search limit.
AdversaryResult adversarial_for(const CoefficientSequence& c, double target,
                                const AdversaryOptions& options = {});

}  // namespace dinilab
