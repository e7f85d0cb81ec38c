#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lab/spacetime.hpp"

namespace lab {

/// Flat key = value configuration with dotted sections ([section] headers).
/// Unknown keys are rejected; every resolved value is echoed to the manifest.
class LabConfig {
  public:
    static LabConfig defaults();
    static LabConfig parse(const std::string& text);
    static LabConfig load(const std::string& path);

    double get(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::string get_str(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;
    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    /// Canonical serialization (sorted keys); identical configs serialize
    /// byte-identically.
    std::string echo() const;
    std::uint64_t hash() const { return fnv1a(echo()); }
    const std::map<std::string, std::string>& entries() const { return kv_; }

    // -- resolved physics ---------------------------------------------------
    BlackHoleParams black_hole() const;
    /// Extension parameters; auto fields are derived from the vacuum horizon
    /// radii with the documented defaults.
    ExtensionParams extension() const;

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace lab
