#include <fstream>
#include <sstream>

#include "dpkit/errors.hpp"
#include "dpkit/jsonl.hpp"
#include "dpkit/numeric.hpp"

namespace dpkit {

std::optional<double> parse_numeric_token(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return std::nullopt;
  const auto end = text.find_last_not_of(" \t\r\n");
  const std::string token = text.substr(begin, end - begin + 1);
  char* parse_end = nullptr;
  const double value = std::strtod(token.c_str(), &parse_end);
  if (parse_end != token.c_str() + token.size()) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << content;
  out.flush();
  require(out.good(), ErrorKind::Io, "write failed for " + path.string());
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto doc = nlohmann::json::parse(line, nullptr, false);
    require(!doc.is_discarded(), ErrorKind::Parse,
            path.string() + ":" + std::to_string(line_no) + ": invalid JSON line");
    rows.push_back(std::move(doc));
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += row.dump();
    out += '\n';
  }
  write_file(path, out);
}

nlohmann::json parse_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  require(!doc.is_discarded(), ErrorKind::Parse, "invalid JSON document");
  return doc;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_file(path));
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularEvaluation: return "SingularEvaluation";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidAfterPerturb: return "InvalidAfterPerturb";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::Provider: return "Provider";
    case ErrorKind::MockExhausted: return "MockExhausted";
    case ErrorKind::LabelParse: return "LabelParse";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::EmptyStore: return "EmptyStore";
    case ErrorKind::VerificationFailure: return "VerificationFailure";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::GroupTooSmall: return "GroupTooSmall";
  }
  return "Unknown";
}

}  // namespace dpkit
