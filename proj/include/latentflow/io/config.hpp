#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lf::io {

struct KeyInfo {
  std::string key;
  std::string default_value;
  std::string help;
};

/// Every recognised configuration key with its default and description.
const std::vector<KeyInfo>& config_keys();

/// Key-value configuration. Files hold `key = value` lines; `#` starts a comment.
/// Unknown keys are rejected with their name, and typed getters name the key on parse errors.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_file(const std::filesystem::path& path);
  void merge_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  /// "key=value" form, as passed to --set.
  void set_assignment(const std::string& assignment);

  bool is_set(const std::string& key) const;  // explicitly set (not defaulted)
  std::string str(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const KeyInfo& info(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

/// Help text listing every key with its default.
std::string config_help();

}  // namespace lf::io
