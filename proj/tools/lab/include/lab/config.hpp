#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Read-tracking view over a YAML mapping; finish() rejects keys nobody asked for.
class Section {
 public:
  static Section root(YAML::Node node);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> texts(const std::string& key,
                                 const std::vector<std::string>& fallback) const;
  // Whole subtree marked as read; caller validates its structure.
  YAML::Node raw(const std::string& key) const;
  Section child(const std::string& key) const;
  const std::string& path() const { return path_; }

  // Throws ConfigError naming the first unread key, walking from this node down.
  void finish() const;

 private:
  struct Shared {
    std::map<std::string, bool> touched;  // path -> whole subtree consumed
  };
  Section(YAML::Node node, std::string path, std::shared_ptr<Shared> shared);
  YAML::Node lookup(const std::string& key, bool wholeSubtree) const;
  std::string join(const std::string& key) const;
  void walk(const YAML::Node& node, const std::string& path) const;

  YAML::Node node_;
  std::string path_;
  std::shared_ptr<Shared> shared_;
};

YAML::Node loadConfigText(const std::string& text);
YAML::Node loadConfigFile(const std::string& path);
// Canonical text of a node (keys sorted) used for hashing.
std::string canonicalText(const YAML::Node& node);

}  // namespace lab
