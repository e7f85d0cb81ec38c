#pragma once

#include <map>
#include <string>
#include <vector>

#include "lab/config.hpp"

namespace lab {

/// Version string embedded in manifests.
const char* lab_version();

/// RFC-4180 CSV writer: CRLF records, '.' decimal separator, 17 significant
/// digits for doubles.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void close();
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::string buf_;
    bool open_ = true;
};

std::string format_g17(double v);

struct TaskRecord {
    std::string name;
    std::string status;  // ok | failed | skipped
    double seconds = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::vector<TaskRecord> tasks;
    std::map<std::string, std::string> output_hashes;  // file -> fnv64 hex
    std::map<std::string, std::string> config_echo;
    double wall_seconds = 0.0;

    void write(const std::string& path) const;
};

/// Executes the configured task pipeline, writing outputs under out_dir.
/// Known tasks: horizons, evolve, norms, resonances, flow, carter.
RunManifest run_tasks(const LabConfig& cfg, const std::vector<std::string>& tasks,
                      const std::string& out_dir, std::uint64_t seed);

std::uint64_t hash_file(const std::string& path);

}  // namespace lab
