#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lhv {

inline constexpr int kRecordSchemaVersion = 1;

// One optimization outcome inside a sweep. Lines of the records file are
// single JSON objects; the file starts with a '#' header comment.
struct SweepRecord {
  int schema_version = kRecordSchemaVersion;
  std::string state_json;   // canonical StateSpec serialization
  std::string param_name;   // swept parameter ("v", "delta", "arc", ...)
  double param_value = 0.0;
  std::string config_json;  // canonical TrainConfig serialization
  uint64_t config_hash = 0;
  uint64_t seed = 0;
  double plateau = 0.0;
  double floor = 0.0;
  double threshold_factor = 10.0;
  std::string classification;  // local | boundary | non-local
  double wall_seconds = 0.0;   // informational, excluded from determinism
  std::vector<std::pair<int64_t, double>> trace;  // downsampled (step, raw loss)
  std::string checkpoint;  // cloud file path, empty if not persisted
  std::string pass;        // warm-start pass tag, empty for independent runs
  std::string note;        // extra context (overlay values etc.)

  // Key for resumable sweeps: a grid point is done when a record with the
  // same state and same config identity is already on disk.
  uint64_t resume_key() const;  // sweep_key over this record's fields

  std::string to_line() const;
  static SweepRecord from_line(const std::string& line);
};

// Pure classification rule: plateaus above threshold_factor*floor are
// non-local, within [boundary_factor, threshold_factor]*floor boundary,
// below that local.
std::string classify_plateau(double plateau, double floor, double threshold_factor,
                             double boundary_factor = 3.0);

// Resume identity of one sweep point.
uint64_t sweep_key(const std::string& state_json, const std::string& param_name,
                   uint64_t config_hash);

// Append-only JSONL writer; creates the file (plus header comment) on first
// use and flushes line-by-line, so concurrent trainers can share one writer.
class RecordWriter {
 public:
  explicit RecordWriter(std::string path);
  void append(const SweepRecord& rec);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mu_;
};

// Loads all records. lenient=true skips unparsable lines (e.g. a torn final
// line after a crash) instead of throwing; schema mismatches always throw.
std::vector<SweepRecord> load_records(const std::string& path, bool lenient = false);

std::unordered_set<uint64_t> completed_keys(const std::string& path);

// Plot-ready table: parameter, plateau_loss, classification.
void export_csv(const std::vector<SweepRecord>& recs, const std::string& path);

}  // namespace lhv
