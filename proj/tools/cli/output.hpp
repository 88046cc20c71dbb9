#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flagforge/rational.hpp"

namespace flagforge::cli {

struct Field {
  std::string key;
  std::string value;
  bool numeric = false;
};

using Record = std::vector<Field>;

inline Field text(std::string key, std::string value) { return {std::move(key), std::move(value), false}; }
inline Field num(std::string key, long long v) { return {std::move(key), std::to_string(v), true}; }
inline Field num(std::string key, const Integer& v) { return {std::move(key), v.get_str(10), true}; }
inline Field rational(std::string key, const Rational& q) {
  return {std::move(key), to_string(q), q.get_den() == 1};
}
inline Field decimal(std::string key, std::string digits) { return {std::move(key), std::move(digits), true}; }
inline Field flag(std::string key, bool b) { return {std::move(key), b ? "true" : "false", true}; }

// One record per line. text: key=value pairs; csv: a header whenever the
// key list changes; json-lines: one object per record.
class Emitter {
 public:
  Emitter(std::ostream& out, std::string format);
  void emit(const Record& r);
  const std::string& format() const { return format_; }

 private:
  std::ostream& out_;
  std::string format_;
  std::vector<std::string> header_;
};

}  // namespace flagforge::cli
