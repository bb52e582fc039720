#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace avtse {

struct ErrorCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t ref_length = 0;

  std::int64_t total_errors() const { return substitutions + deletions + insertions; }
  ErrorCounts& operator+=(const ErrorCounts& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_length += o.ref_length;
    return *this;
  }
};

// Minimal unit-cost edit alignment over Unicode code points. The backtrace
// tie-break is fixed (substitution, then deletion, then insertion) so the
// individual counts are reproducible; the total is tie-break independent.
ErrorCounts align_and_count(const std::vector<std::uint32_t>& reference,
                            const std::vector<std::uint32_t>& hypothesis);
ErrorCounts align_and_count(const std::string& reference_utf8, const std::string& hypothesis_utf8);

// (S + D + I) / N * 100. Rejects N = 0.
double cer(const ErrorCounts& counts);

// Text normalization applied before alignment: strips whitespace and applies
// a code-point mapping table (defaults to identity).
struct TextNormalizer {
  std::map<std::uint32_t, std::uint32_t> char_map;
  std::vector<std::uint32_t> normalize(const std::string& utf8) const;
};

std::vector<std::uint32_t> utf8_decode(const std::string& s);
std::string utf8_encode(const std::vector<std::uint32_t>& cps);

// [frame or step][vocab] log-probabilities; rows logsumexp to 0 within 1e-6.
struct PosteriorMatrix {
  Eigen::MatrixXd log_probs;
  int blank = 0;

  void validate() const;
};

// CTC forward log-probability of the target under the blank-augmented
// alignment lattice. Returns -inf when frames < |target| + repeats.
double ctc_log_prob(const PosteriorMatrix& posteriors, const std::vector<int>& target);

// Stepwise cross-entropy log-probability: sum_u log p_u(y_u); steps == |target|.
double attention_ce_log_prob(const PosteriorMatrix& stepwise, const std::vector<int>& target);

// lambda * logp_ctc + (1 - lambda) * logp_att; lambda in [0,1].
double mtl_loss(double logp_ctc, double logp_att, double lambda);

inline constexpr double kDefaultMtlLambda = 0.3;

}  // namespace avtse
