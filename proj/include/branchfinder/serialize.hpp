#pragma once

#include <filesystem>

#include "branchfinder/extraction.hpp"
#include "branchfinder/network.hpp"
#include "json.hpp"

namespace branchfinder {

// All documents carry format_version = 1. nlohmann::json emits doubles with
// shortest round-trip formatting and sorted keys, so save/load is lossless
// and rerun output is byte-stable.

nlohmann::json model_to_json(const NetworkModel& model);
NetworkModel model_from_json(const nlohmann::json& j);

nlohmann::json extraction_to_json(const ExtractionResult& result);
ExtractionResult extraction_from_json(const nlohmann::json& j);

/// Canonical document writer: 2-space indent, trailing newline, binary mode.
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

void save_model(const NetworkModel& model, const std::filesystem::path& path);
NetworkModel load_model(const std::filesystem::path& path);

void save_extraction(const ExtractionResult& result,
                     const std::filesystem::path& path);
ExtractionResult load_extraction(const std::filesystem::path& path);

/// Companion table: header index,primary_branch,ambiguous; NA for unassigned,
/// ambiguous as 0/1.
void write_assignments_csv(const ExtractionResult& result,
                           const std::filesystem::path& path);

}  // namespace branchfinder
