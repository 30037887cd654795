// Block modulator: given a in l1 (or a finite family), choose
// n_1 < n_2 < ... with tail(n_j) < delta A / 2^{2j-1} and set
// c = 1/(2^{j-1} eps) on [n_j, n_{j+1}), c = 1/eps before n_2.
// Then block j of a/c sums to at most 2^{j-1} eps tail(n_j) < eps delta A / 2^j.
#include <algorithm>
#include <cmath>
#include <limits>

#include "dinilab/sequences.hpp"
#include "internal/compensated_sum.hpp"

namespace dinilab {

namespace {

constexpr std::uint64_t kSearchLimit = std::uint64_t{1} << 62;
constexpr std::uint64_t kMaxSummedTerms = std::uint64_t{1} << 12;

using TailFn = std::function<double(std::uint64_t)>;

// Least n > previous with tail(n) < threshold (tail is non-increasing).
std::uint64_t least_index_below(const TailFn& tail, std::uint64_t previous, double threshold) {
  std::uint64_t lo = previous;  // tail(lo) >= threshold or lo == previous
  std::uint64_t hi = previous + 1;
  std::uint64_t step = 1;
  while (!(tail(hi) < threshold)) {
    lo = hi;
    if (hi >= kSearchLimit) throw NumericFailure("modulator: tail oracle never falls below the block threshold");
    step *= 2;
    hi = std::min(kSearchLimit, hi + step);
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (tail(mid) < threshold)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<std::uint64_t> select_blocks(const TailFn& tail, double scaled_norm,
                                         std::uint64_t horizon) {
  std::vector<std::uint64_t> blocks;
  std::uint64_t previous = 0;
  for (int j = 1;; ++j) {
    const double threshold = std::ldexp(scaled_norm, -(2 * j - 1));
    if (threshold < 1e-300 && j > 2) break;
    const std::uint64_t n = least_index_below(tail, previous, threshold);
    blocks.push_back(n);
    previous = n;
    if (j >= 2 && (n > horizon || tail(n) == 0.0)) break;
  }
  return blocks;
}

CertifiedValue certified_norm(const SummableSequence& a, const ModulatorOptions& options) {
  const double scale = a.tail(1);
  if (!(scale > 0.0)) throw ValidationError("modulator: zero sequence has no modulator (||a||_1 = 0)");
  CertifiedValue norm = l1_norm(a, options.norm_precision * scale, options.max_norm_terms);
  if (!(norm.upper() > 0.0)) throw ValidationError("modulator: zero sequence has no modulator (||a||_1 = 0)");
  if (!(norm.lower() > 0.0))
    throw NumericFailure("modulator: cannot certify a positive norm for " + a.label());
  return norm;
}

void validate(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("modulator: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("modulator: delta must lie in (0, 1)");
}

struct WeightedSum {
  CertifiedValue b_norm;
  std::vector<double> block_sums;
};

// sum_{k<m} a_k / c_k exactly. Past m, c is constant on each remaining
// block, so the block is bracketed by the sequence's tail oracles; past n_J
// the later blocks of the infinite construction add at most
// eps delta A / 2^J. Blocks not summed term by term report their certified
// upper bound in block_sums.
WeightedSum weighted_sum(const ModulatorResult& r, const SummableSequence& a) {
  const std::uint64_t last = r.blocks.back();
  std::uint64_t m = last;
  if (const auto end = a.support_end()) m = std::min(m, std::max<std::uint64_t>(*end, 1));
  m = std::min(m, kMaxSummedTerms);

  WeightedSum out;
  detail::CompensatedSum total;
  detail::CompensatedSum block;
  std::size_t current = r.block_of(1);
  for (std::uint64_t k = 1; k < m; ++k) {
    const std::size_t j = r.block_of(k);
    if (j != current) {
      if (current >= 1) out.block_sums.push_back(block.value());
      block = {};
      current = j;
    }
    const double v = a.term(k) / r.c(k);
    total.add(v);
    block.add(v);
  }

  const std::size_t J = r.blocks.size();
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t p = m;
  std::size_t j = r.block_of(p);
  if (j != current) {
    if (current >= 1) out.block_sums.push_back(block.value());
    block = {};
    current = j;
  }
  while (j < J) {
    const std::uint64_t end = r.blocks[j];
    const double weight = 1.0 / r.c(p);
    const double seg_lo = weight * std::max(0.0, a.tail_lower(p) - a.tail(end));
    const double seg_hi = weight * std::max(0.0, a.tail(p) - a.tail_lower(end));
    lower += seg_lo;
    upper += seg_hi;
    if (j >= 1) out.block_sums.push_back(block.value() + seg_hi);
    block = {};
    p = end;
    ++j;
  }
  const double weight = 1.0 / r.c(p);
  lower += weight * a.tail_lower(p);
  upper += weight * a.tail(p);
  if (a.tail(p) > 0.0) upper += std::ldexp(r.epsilon * r.delta * r.threshold_norm, -static_cast<int>(J));

  const double head = total.value();
  out.b_norm.value = head + 0.5 * (lower + upper);
  out.b_norm.error = 0.5 * (upper - lower) + 4.0 * std::numeric_limits<double>::epsilon() * (head + upper);
  return out;
}

}  // namespace

std::size_t ModulatorResult::block_of(std::uint64_t k) const {
  return static_cast<std::size_t>(std::upper_bound(blocks.begin(), blocks.end(), k) - blocks.begin());
}

double ModulatorResult::c(std::uint64_t k) const {
  if (k == 0) throw DomainError("modulator: indices start at 1");
  const std::size_t j = block_of(k);
  if (j <= 1) return 1.0 / epsilon;
  return std::ldexp(1.0 / epsilon, -static_cast<int>(j - 1));
}

std::vector<double> ModulatorResult::c_values(std::uint64_t count) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t k = 1; k <= count; ++k) out.push_back(c(k));
  return out;
}

double ModulatorResult::weighted_tail_bound(const SummableSequence& a, std::uint64_t m) const {
  const double t = a.tail(std::max<std::uint64_t>(m, 1));
  if (t == 0.0) return 0.0;
  const int j = static_cast<int>(std::max<std::size_t>(block_of(m), 1));
  // rest of block j at its own weight, later blocks by the per-block estimate
  return std::ldexp(epsilon * t, j - 1) + std::ldexp(epsilon * delta * threshold_norm, -j);
}

bool ModulatorResult::within_bounds() const {
  const double tol = 4.0 * std::numeric_limits<double>::epsilon();
  if (!(b_norm.lower() >= b_norm_lower_bound * (1.0 - tol))) return false;
  if (!(b_norm.upper() <= b_norm_upper_bound * (1.0 + tol))) return false;
  for (std::size_t j = 1; j <= block_sums.size(); ++j) {
    if (!(block_sums[j - 1] < std::ldexp(epsilon * delta * threshold_norm, -static_cast<int>(j)))) return false;
  }
  for (const MemberCheck& check : member_checks) {
    if (!check.holds) return false;
  }
  return true;
}

ModulatorResult dp_modulator(const SummableSequence& a, double epsilon, double delta,
                             const ModulatorOptions& options) {
  validate(epsilon, delta);
  ModulatorResult r;
  r.epsilon = epsilon;
  r.delta = delta;
  r.a_norm = certified_norm(a, options);
  r.threshold_norm = r.a_norm.lower();
  r.blocks = select_blocks([&a](std::uint64_t n) { return a.tail(n); }, delta * r.threshold_norm,
                           options.horizon);
  r.b_norm_lower_bound = epsilon * (1.0 - delta / 2.0) * r.a_norm.lower();
  r.b_norm_upper_bound = epsilon * (1.0 + delta) * r.a_norm.upper();
  WeightedSum sum = weighted_sum(r, a);
  r.b_norm = sum.b_norm;
  r.block_sums = std::move(sum.block_sums);
  return r;
}

ModulatorResult dp_modulator_compact(const std::vector<SummableSequence>& family, double epsilon,
                                     double delta, const ModulatorOptions& options) {
  validate(epsilon, delta);
  if (family.empty()) throw ValidationError("compact modulator: family is empty");
  std::vector<CertifiedValue> norms;
  norms.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    try {
      norms.push_back(certified_norm(family[i], options));
    } catch (const ValidationError&) {
      throw ValidationError("compact modulator: member " + std::to_string(i) +
                            " has zero norm (0 must not belong to the family)");
    }
  }
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < norms.size(); ++i) {
    if (norms[i].lower() < norms[smallest].lower()) smallest = i;
  }

  ModulatorResult r;
  r.epsilon = epsilon;
  r.delta = delta;
  r.threshold_norm = norms[smallest].lower();
  auto max_tail = [&family](std::uint64_t n) {
    double t = 0.0;
    for (const auto& a : family) t = std::max(t, a.tail(n));
    return t;
  };
  r.blocks = select_blocks(max_tail, delta * r.threshold_norm, options.horizon);

  for (std::size_t i = 0; i < family.size(); ++i) {
    WeightedSum sum = weighted_sum(r, family[i]);
    MemberCheck check;
    check.member = i;
    check.a_norm = norms[i];
    check.b_norm = sum.b_norm;
    check.bound_lower = epsilon * (1.0 - delta / 2.0) * norms[i].lower();
    check.bound_upper = epsilon * (1.0 + delta) * norms[i].upper();
    const double tol = 4.0 * std::numeric_limits<double>::epsilon();
    check.holds = check.b_norm.lower() >= check.bound_lower * (1.0 - tol) &&
                  check.b_norm.upper() <= check.bound_upper * (1.0 + tol);
    for (std::size_t j = 1; j <= sum.block_sums.size(); ++j) {
      if (!(sum.block_sums[j - 1] < std::ldexp(epsilon * delta * r.threshold_norm, -static_cast<int>(j))))
        check.holds = false;
    }
    if (i == smallest) {
      r.a_norm = norms[i];
      r.b_norm = sum.b_norm;
      r.block_sums = std::move(sum.block_sums);
      r.b_norm_lower_bound = check.bound_lower;
      r.b_norm_upper_bound = check.bound_upper;
    }
    r.member_checks.push_back(check);
  }
  return r;
}

}  // namespace dinilab
