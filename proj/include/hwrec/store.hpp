#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hwrec/domain.hpp"
#include "hwrec/fusion.hpp"

namespace hwrec {

// Filesystem-backed store:
//   <root>/registry/{models,hardware,tasks}.json   full-file JSON arrays
//   <root>/records/bench.jsonl                     append-only JSON lines
//   <root>/artifacts/scorer-<name>.json            trained scorer snapshots
//
// Appends hold an exclusive flock on the records file and write each record
// as one write() of the line plus '\n', so a reader never observes a torn
// line; readers take no lock and skip a trailing partial line if they race
// an in-flight append.
class Store {
 public:
  explicit Store(std::string root);

  const std::string& root() const { return root_; }

  enum class RegistryKind { Models, Hardware, Tasks };
  static const char* registry_kind_name(RegistryKind k);
  static std::optional<RegistryKind> parse_registry_kind(std::string_view s);

  struct IngestResult {
    std::size_t count = 0;
    ValidationReport report;
    bool accepted = false;
  };

  // Validates the whole file first and replaces the registry only when every
  // entry passes; a single bad entry rejects the file and leaves the previous
  // registry untouched. Entries are checked against the other registries too
  // (duplicate ids across files stay duplicates).
  IngestResult ingest_registry(const std::string& source_path, RegistryKind kind);

  std::vector<ModelCard> load_models() const;
  std::vector<HardwareProfile> load_hardware() const;
  std::vector<TaskDescriptor> load_tasks() const;

  struct RecordFilter {
    std::optional<std::string> model_id;
    std::optional<std::string> task_id;
    std::optional<std::string> hardware_id;
    std::optional<Phase> phase;
  };

  // Returns the byte offset of each appended line. One fsync per call.
  std::vector<std::uint64_t> append_records(const std::vector<BenchmarkRecord>& records);

  std::vector<BenchmarkRecord> query_records(const RecordFilter& filter = {}) const;

  std::string save_scorer(const ScorerParams& params, const std::string& name);
  ScorerParams load_scorer(const std::string& name) const;
  static ScorerParams load_scorer_file(const std::string& path);

  std::string registry_path(RegistryKind kind) const;
  std::string records_path() const;
  std::string scorer_path(const std::string& name) const;

 private:
  void ensure_layout() const;
  std::string root_;
};

}  // namespace hwrec
