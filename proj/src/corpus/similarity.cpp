#include "dpkit/corpus/similarity.hpp"

#include <cctype>
#include <cmath>

namespace dpkit::corpus {

namespace {
constexpr const char* kNumberToken = "<num>";
}

std::vector<std::string> mask_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isalpha(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isdigit(c)) {
      flush();
      while (i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) ++i;
      tokens.push_back(kNumberToken);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::map<std::string, double> token_frequencies(const std::string& text) {
  std::map<std::string, double> freq;
  for (const auto& token : mask_tokens(text)) freq[token] += 1.0;
  return freq;
}

double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (const auto& [token, weight] : a) {
    norm_a += weight * weight;
    auto it = b.find(token);
    if (it != b.end()) dot += weight * it->second;
  }
  for (const auto& [token, weight] : b) norm_b += weight * weight;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty() || a.size() != b.size()) return 0.0;
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

double text_similarity(const std::string& a, const std::string& b) {
  return cosine(token_frequencies(a), token_frequencies(b));
}

bool novelty_filter(const std::string& candidate_pnl, const std::string& seed_pnl,
                    double threshold) {
  return text_similarity(candidate_pnl, seed_pnl) <= threshold;
}

}  // namespace dpkit::corpus
