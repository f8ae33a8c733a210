#pragma once

#include <map>
#include <string>
#include <vector>

namespace dpkit::corpus {

// Lowercased alphabetic tokens with punctuation treated as separators and
// every maximal digit run collapsed to one placeholder token, so that
// parameter-only rewrites of a problem text compare as identical.
std::vector<std::string> mask_tokens(const std::string& text);

std::map<std::string, double> token_frequencies(const std::string& text);

// Cosine similarity of unit-normalized masked-token frequency vectors.
// Empty vs empty is defined as 1.0; empty vs nonempty as 0.0.
double text_similarity(const std::string& a, const std::string& b);

double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b);
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Rejects a candidate iff its similarity to the seed exceeds the threshold.
bool novelty_filter(const std::string& candidate_pnl, const std::string& seed_pnl,
                    double threshold = 0.85);

}  // namespace dpkit::corpus
