#include "avtse/evalkit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace avtse {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}
}  // namespace

ErrorCounts align_and_count(const std::vector<std::uint32_t>& reference,
                            const std::vector<std::uint32_t>& hypothesis) {
  const std::size_t n = reference.size(), m = hypothesis.size();
  // cost[i][j]: edit distance between reference[:i] and hypothesis[:j]
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = cost[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      const int del = cost[i - 1][j] + 1;
      const int ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min({sub, del, ins});
    }

  ErrorCounts counts;
  counts.ref_length = static_cast<std::int64_t>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1)) {
      if (reference[i - 1] != hypothesis[j - 1]) ++counts.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

ErrorCounts align_and_count(const std::string& reference_utf8, const std::string& hypothesis_utf8) {
  return align_and_count(utf8_decode(reference_utf8), utf8_decode(hypothesis_utf8));
}

double cer(const ErrorCounts& counts) {
  if (counts.ref_length <= 0) throw std::invalid_argument("cer: reference length must be positive");
  return static_cast<double>(counts.total_errors()) / static_cast<double>(counts.ref_length) * 100.0;
}

std::vector<std::uint32_t> utf8_decode(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::uint32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      cp = b0 & 0x1f;
      len = 2;
    } else if ((b0 & 0xf0) == 0xe0) {
      cp = b0 & 0x0f;
      len = 3;
    } else if ((b0 & 0xf8) == 0xf0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw std::invalid_argument("utf8_decode: invalid lead byte");
    }
    if (i + len > s.size()) throw std::invalid_argument("utf8_decode: truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xc0) != 0x80) throw std::invalid_argument("utf8_decode: invalid continuation byte");
      cp = (cp << 6) | (b & 0x3f);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(const std::vector<std::uint32_t>& cps) {
  std::string out;
  for (std::uint32_t cp : cps) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }
  return out;
}

std::vector<std::uint32_t> TextNormalizer::normalize(const std::string& utf8) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t cp : utf8_decode(utf8)) {
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0x3000) continue;
    auto it = char_map.find(cp);
    out.push_back(it == char_map.end() ? cp : it->second);
  }
  return out;
}

void PosteriorMatrix::validate() const {
  if (log_probs.rows() == 0 || log_probs.cols() == 0)
    throw std::invalid_argument("PosteriorMatrix: empty matrix");
  if (blank < 0 || blank >= log_probs.cols())
    throw std::invalid_argument("PosteriorMatrix: blank index out of range");
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    double lse = kNegInf;
    for (Eigen::Index v = 0; v < log_probs.cols(); ++v) lse = log_add(lse, log_probs(t, v));
    if (std::abs(lse) > 1e-6)
      throw std::invalid_argument("PosteriorMatrix: row " + std::to_string(t) +
                                  " does not normalize (logsumexp " + std::to_string(lse) + ")");
  }
}

double ctc_log_prob(const PosteriorMatrix& posteriors, const std::vector<int>& target) {
  posteriors.validate();
  const Eigen::Index frames = posteriors.log_probs.rows();
  const int vocab = static_cast<int>(posteriors.log_probs.cols());
  for (int label : target)
    if (label < 0 || label >= vocab || label == posteriors.blank)
      throw std::invalid_argument("ctc_log_prob: target label out of vocab or equal to blank");

  // blank-augmented sequence: - y1 - y2 - ... - yL -
  const std::size_t ext_len = 2 * target.size() + 1;
  auto ext_label = [&](std::size_t s) {
    return s % 2 == 0 ? posteriors.blank : target[s / 2];
  };

  std::size_t repeats = 0;
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++repeats;
  if (static_cast<std::size_t>(frames) < target.size() + repeats) return kNegInf;

  std::vector<double> alpha(ext_len, kNegInf), next(ext_len, kNegInf);
  alpha[0] = posteriors.log_probs(0, posteriors.blank);
  if (ext_len > 1) alpha[1] = posteriors.log_probs(0, ext_label(1));

  for (Eigen::Index t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < ext_len; ++s) {
      double a = alpha[s];
      if (s >= 1) a = log_add(a, alpha[s - 1]);
      // Skip transition only between distinct non-blank labels.
      if (s >= 2 && s % 2 == 1 && ext_label(s) != ext_label(s - 2)) a = log_add(a, alpha[s - 2]);
      next[s] = a + posteriors.log_probs(t, ext_label(s));
    }
    std::swap(alpha, next);
  }
  double result = alpha[ext_len - 1];
  if (ext_len > 1) result = log_add(result, alpha[ext_len - 2]);
  return result;
}

double attention_ce_log_prob(const PosteriorMatrix& stepwise, const std::vector<int>& target) {
  stepwise.validate();
  if (static_cast<std::size_t>(stepwise.log_probs.rows()) != target.size())
    throw std::invalid_argument("attention_ce_log_prob: step count must equal target length");
  double sum = 0.0;
  for (std::size_t u = 0; u < target.size(); ++u) {
    if (target[u] < 0 || target[u] >= stepwise.log_probs.cols())
      throw std::invalid_argument("attention_ce_log_prob: target label out of vocab");
    sum += stepwise.log_probs(static_cast<Eigen::Index>(u), target[u]);
  }
  return sum;
}

double mtl_loss(double logp_ctc, double logp_att, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mtl_loss: lambda must be in [0,1]");
  return lambda * logp_ctc + (1.0 - lambda) * logp_att;
}

}  // namespace avtse
