#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpkit/corpus/records.hpp"

namespace dpkit::corpus {

enum class SampleKind { Standard, Reflected };

struct SFTSample {
  std::string problem;
  std::string target;
  SampleKind kind = SampleKind::Standard;
  Provenance provenance = Provenance::Forward;
};

// Render format for targets (fixed template, see README):
//   <attempt index="i"> <reasoning>..</reasoning> <model>..</model>
//   <code>..</code> </attempt> ... <answer>y*</answer>
// Attempts beyond the first carry kind="reflection".
std::string render_target(const Trajectory& trajectory);

SFTSample to_sft_sample(const TrainingRecord& record);

struct SFTManifest {
  std::size_t total = 0;
  std::size_t standard = 0;
  std::size_t reflected = 0;
  std::size_t forward = 0;
  std::size_t backward = 0;
  nlohmann::json to_json() const;
};

// Emits one SFTSample per record, in input order. Throws EmptyCorpus when
// given no records. The manifest reports counts by kind and provenance.
std::pair<std::vector<SFTSample>, SFTManifest> assemble_sft(
    const std::vector<TrainingRecord>& records);

// File-level wrapper: writes sft.jsonl and sft_manifest.json under out_dir.
SFTManifest assemble_sft_files(const std::vector<std::filesystem::path>& dataset_files,
                               const std::filesystem::path& out_dir);

nlohmann::json to_json(const SFTSample& sample);

}  // namespace dpkit::corpus
