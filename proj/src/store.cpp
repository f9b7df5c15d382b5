#include "hwrec/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <filesystem>

#include "hwrec/errors.hpp"
#include "hwrec/json_io.hpp"

namespace hwrec {

namespace fs = std::filesystem;

Store::Store(std::string root) : root_(std::move(root)) {
  if (root_.empty()) throw DataError("store root must not be empty");
  ensure_layout();
}

void Store::ensure_layout() const {
  std::error_code ec;
  for (const char* sub : {"registry", "records", "artifacts"}) {
    fs::create_directories(fs::path(root_) / sub, ec);
    if (ec)
      throw DataError("cannot create store directory '" + root_ + "/" + sub +
                      "': " + ec.message());
  }
}

const char* Store::registry_kind_name(RegistryKind k) {
  switch (k) {
    case RegistryKind::Models: return "models";
    case RegistryKind::Hardware: return "hardware";
    case RegistryKind::Tasks: return "tasks";
  }
  return "?";
}

std::optional<Store::RegistryKind> Store::parse_registry_kind(
    std::string_view s) {
  if (s == "models") return RegistryKind::Models;
  if (s == "hardware") return RegistryKind::Hardware;
  if (s == "tasks") return RegistryKind::Tasks;
  return std::nullopt;
}

std::string Store::registry_path(RegistryKind kind) const {
  return (fs::path(root_) / "registry" /
          (std::string(registry_kind_name(kind)) + ".json"))
      .string();
}

std::string Store::records_path() const {
  return (fs::path(root_) / "records" / "bench.jsonl").string();
}

std::string Store::scorer_path(const std::string& name) const {
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' &&
        c != '.')
      throw DataError("scorer name may only contain [A-Za-z0-9._-]: '" + name +
                      "'");
  return (fs::path(root_) / "artifacts" / ("scorer-" + name + ".json")).string();
}

namespace {

template <typename T>
std::vector<T> load_array(const std::string& path) {
  if (!fs::exists(path)) return {};
  const json j = parse_json_file(path);
  if (!j.is_array()) throw DataError(path + ": registry must be a JSON array");
  std::vector<T> out;
  out.reserve(j.size());
  for (const auto& element : j) out.push_back(element.get<T>());
  return out;
}

bool whitespace_only(const std::string& text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

std::vector<ModelCard> Store::load_models() const {
  return load_array<ModelCard>(registry_path(RegistryKind::Models));
}

std::vector<HardwareProfile> Store::load_hardware() const {
  return load_array<HardwareProfile>(registry_path(RegistryKind::Hardware));
}

std::vector<TaskDescriptor> Store::load_tasks() const {
  return load_array<TaskDescriptor>(registry_path(RegistryKind::Tasks));
}

Store::IngestResult Store::ingest_registry(const std::string& source_path,
                                           RegistryKind kind) {
  IngestResult result;
  const std::string text = read_text_file(source_path);
  json entries = json::array();
  if (!whitespace_only(text)) {
    entries = parse_json_text(text, source_path);
    if (!entries.is_array())
      throw DataError(source_path + ": expected a JSON array of entries");
  }

  // Issue kinds are the singular entity names used by validate_registry.
  const char* issue_kind = kind == RegistryKind::Models     ? "model"
                           : kind == RegistryKind::Hardware ? "hardware"
                                                            : "task";
  std::vector<ModelCard> models;
  std::vector<HardwareProfile> hardware;
  std::vector<TaskDescriptor> tasks;

  // Parse every entry; a malformed element becomes an issue, not an abort,
  // so the report covers the whole file.
  std::size_t index = 0;
  for (const auto& element : entries) {
    const std::string fallback_id =
        element.is_object() && element.contains("id") && element["id"].is_string()
            ? element["id"].get<std::string>()
            : "#" + std::to_string(index);
    try {
      switch (kind) {
        case RegistryKind::Models: models.push_back(element.get<ModelCard>()); break;
        case RegistryKind::Hardware:
          hardware.push_back(element.get<HardwareProfile>());
          break;
        case RegistryKind::Tasks:
          tasks.push_back(element.get<TaskDescriptor>());
          break;
      }
    } catch (const std::exception& e) {
      result.report.issues.push_back({issue_kind, fallback_id, e.what()});
    }
    ++index;
  }
  result.count = entries.size();

  if (result.report.ok()) {
    // Validate the candidate set in the context of the other registries.
    auto check_models = kind == RegistryKind::Models ? models : load_models();
    auto check_hw = kind == RegistryKind::Hardware ? hardware : load_hardware();
    auto check_tasks = kind == RegistryKind::Tasks ? tasks : load_tasks();
    result.report = validate_registry(check_models, check_hw, check_tasks);
    // Only issues of the ingested kind can reject this file; preexisting
    // problems elsewhere are not this ingest's fault.
    std::erase_if(result.report.issues, [&](const ValidationIssue& issue) {
      return issue.kind != issue_kind;
    });
  }

  result.accepted = result.report.ok();
  if (result.accepted) write_json_file(registry_path(kind), entries);
  return result;
}

namespace {

class LockedFd {
 public:
  LockedFd(const std::string& path, int flags) {
    fd_ = ::open(path.c_str(), flags, 0644);
    if (fd_ < 0)
      throw DataError("cannot open '" + path + "': " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX) != 0) {
      const int err = errno;
      ::close(fd_);
      throw DataError("cannot lock '" + path + "': " + std::strerror(err));
    }
  }
  ~LockedFd() {
    if (fd_ >= 0) ::close(fd_);  // also releases the flock
  }
  LockedFd(const LockedFd&) = delete;
  LockedFd& operator=(const LockedFd&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

void write_fully(int fd, const std::string& data, const std::string& path) {
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n =
        ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw DataError("write failed for '" + path + "': " +
                      std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

}  // namespace

std::vector<std::uint64_t> Store::append_records(
    const std::vector<BenchmarkRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto problems = record_issues(records[i]);
    if (!problems.empty())
      throw DataError("record #" + std::to_string(i) + ": " + problems.front());
  }

  const std::string path = records_path();
  LockedFd file(path, O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC);

  struct stat st {};
  if (::fstat(file.fd(), &st) != 0)
    throw DataError("fstat failed for '" + path + "': " + std::strerror(errno));

  std::vector<std::uint64_t> offsets;
  offsets.reserve(records.size());
  std::uint64_t offset = static_cast<std::uint64_t>(st.st_size);
  for (const auto& record : records) {
    const std::string line = json(record).dump() + "\n";
    // One write() per line: a reader sees the whole line or nothing of it.
    write_fully(file.fd(), line, path);
    offsets.push_back(offset);
    offset += line.size();
  }
  if (!records.empty() && ::fsync(file.fd()) != 0)
    throw DataError("fsync failed for '" + path + "': " + std::strerror(errno));
  return offsets;
}

std::vector<BenchmarkRecord> Store::query_records(
    const RecordFilter& filter) const {
  const std::string path = records_path();
  if (!fs::exists(path)) return {};
  const std::string text = read_text_file(path);

  std::vector<BenchmarkRecord> out;
  std::size_t line_start = 0, line_no = 1;
  while (line_start < text.size()) {
    const std::size_t newline = text.find('\n', line_start);
    if (newline == std::string::npos) break;  // trailing partial line: skip
    const std::string_view line(text.data() + line_start, newline - line_start);
    if (!line.empty()) {
      BenchmarkRecord record;
      try {
        json::parse(line).get_to(record);
      } catch (const std::exception& e) {
        throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      const bool keep =
          (!filter.model_id || record.model_id == *filter.model_id) &&
          (!filter.task_id || record.task_id == *filter.task_id) &&
          (!filter.hardware_id || record.hardware_id == *filter.hardware_id) &&
          (!filter.phase || record.phase == *filter.phase);
      if (keep) out.push_back(std::move(record));
    }
    line_start = newline + 1;
    ++line_no;
  }
  return out;
}

std::string Store::save_scorer(const ScorerParams& params,
                               const std::string& name) {
  const std::string path = scorer_path(name);
  write_json_file(path, scorer_to_json(params));
  return path;
}

ScorerParams Store::load_scorer(const std::string& name) const {
  return load_scorer_file(scorer_path(name));
}

ScorerParams Store::load_scorer_file(const std::string& path) {
  return scorer_from_json(parse_json_file(path));
}

}  // namespace hwrec
