#include "lab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lab {

namespace {

template <class T>
T convert(const YAML::Node& n, const std::string& path, const char* what) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + path + "' must be " + what);
  }
}

void canonical(const YAML::Node& n, std::ostream& os) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      // nodes have reference semantics: never assign them, only construct
      std::map<std::string, YAML::Node> items;
      for (const auto& kv : n) items.emplace(kv.first.as<std::string>(), kv.second);
      os << "{";
      for (const auto& [k, v] : items) {
        os << k << ":";
        canonical(v, os);
        os << ";";
      }
      os << "}";
      break;
    }
    case YAML::NodeType::Sequence:
      os << "[";
      for (const auto& v : n) {
        canonical(v, os);
        os << ",";
      }
      os << "]";
      break;
    case YAML::NodeType::Scalar:
      os << n.Scalar();
      break;
    default:
      os << "~";
  }
}

}  // namespace

Section::Section(YAML::Node node, std::string path, std::shared_ptr<Shared> shared)
    : node_(std::move(node)), path_(std::move(path)), shared_(std::move(shared)) {}

Section Section::root(YAML::Node node) {
  if (!node || node.IsNull()) node = YAML::Node(YAML::NodeType::Map);
  if (!node.IsMap()) throw ConfigError("config root must be a mapping");
  return Section(node, "", std::make_shared<Shared>());
}

std::string Section::join(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool Section::has(const std::string& key) const {
  const YAML::Node& n = node_;
  return n.IsMap() && n[key];
}

YAML::Node Section::lookup(const std::string& key, bool wholeSubtree) const {
  const YAML::Node& self = node_;
  if (!self.IsMap() || !self[key]) return YAML::Node(YAML::NodeType::Undefined);
  bool& t = shared_->touched[join(key)];
  t = t || wholeSubtree;
  return self[key];
}

double Section::number(const std::string& key, double fallback) const {
  const YAML::Node n = lookup(key, true);
  return n ? convert<double>(n, join(key), "a number") : fallback;
}

int Section::integer(const std::string& key, int fallback) const {
  const YAML::Node n = lookup(key, true);
  return n ? convert<int>(n, join(key), "an integer") : fallback;
}

std::uint64_t Section::unsigned64(const std::string& key, std::uint64_t fallback) const {
  const YAML::Node n = lookup(key, true);
  return n ? convert<std::uint64_t>(n, join(key), "an unsigned integer") : fallback;
}

bool Section::flag(const std::string& key, bool fallback) const {
  const YAML::Node n = lookup(key, true);
  return n ? convert<bool>(n, join(key), "a boolean") : fallback;
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
  const YAML::Node n = lookup(key, true);
  return n ? convert<std::string>(n, join(key), "a string") : fallback;
}

std::vector<double> Section::numbers(const std::string& key,
                                     const std::vector<double>& fallback) const {
  const YAML::Node n = lookup(key, true);
  if (!n) return fallback;
  if (n.IsScalar()) return {convert<double>(n, join(key), "a number or list of numbers")};
  return convert<std::vector<double>>(n, join(key), "a list of numbers");
}

std::vector<std::string> Section::texts(const std::string& key,
                                        const std::vector<std::string>& fallback) const {
  const YAML::Node n = lookup(key, true);
  if (!n) return fallback;
  if (n.IsScalar()) return {n.Scalar()};
  return convert<std::vector<std::string>>(n, join(key), "a list of strings");
}

YAML::Node Section::raw(const std::string& key) const { return lookup(key, true); }

Section Section::child(const std::string& key) const {
  YAML::Node n = lookup(key, false);
  if (n && !n.IsMap() && !n.IsNull()) throw ConfigError("config key '" + join(key) + "' must be a mapping");
  return Section(n ? n : YAML::Node(YAML::NodeType::Map), join(key), shared_);
}

void Section::walk(const YAML::Node& node, const std::string& path) const {
  if (!node.IsMap()) return;
  for (const auto& kv : node) {
    const std::string p = (path.empty() ? "" : path + ".") + kv.first.as<std::string>();
    const auto it = shared_->touched.find(p);
    if (it == shared_->touched.end()) throw ConfigError("unknown config key '" + p + "'");
    if (!it->second) walk(kv.second, p);
  }
}

void Section::finish() const { walk(node_, path_); }

YAML::Node loadConfigText(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

YAML::Node loadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return loadConfigText(ss.str());
}

std::string canonicalText(const YAML::Node& node) {
  std::ostringstream os;
  canonical(node, os);
  return os.str();
}

}  // namespace lab
