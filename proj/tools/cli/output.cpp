#include "cli/output.hpp"

#include <nlohmann/json.hpp>

#include "flagforge/errors.hpp"

namespace flagforge::cli {

Emitter::Emitter(std::ostream& out, std::string format) : out_(out), format_(std::move(format)) {
  if (format_ != "text" && format_ != "csv" && format_ != "json-lines")
    throw InputError("unknown format '" + format_ + "' (text, csv, json-lines)");
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void Emitter::emit(const Record& r) {
  if (format_ == "text") {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out_ << (i ? " " : "") << r[i].key << "=";
      if (r[i].value.find(' ') == std::string::npos)
        out_ << r[i].value;
      else
        out_ << '"' << r[i].value << '"';
    }
    out_ << "\n";
    return;
  }
  if (format_ == "csv") {
    std::vector<std::string> keys;
    for (const auto& f : r) keys.push_back(f.key);
    if (keys != header_) {
      for (std::size_t i = 0; i < keys.size(); ++i) out_ << (i ? "," : "") << csv_cell(keys[i]);
      out_ << "\n";
      header_ = keys;
    }
    for (std::size_t i = 0; i < r.size(); ++i) out_ << (i ? "," : "") << csv_cell(r[i].value);
    out_ << "\n";
    return;
  }
  // long integers stay strings so that no digits are lost
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : r) {
    if (f.numeric && (f.value == "true" || f.value == "false"))
      j[f.key] = f.value == "true";
    else if (f.numeric && f.value.size() <= 18)
      j[f.key] = nlohmann::ordered_json::parse(f.value);
    else
      j[f.key] = f.value;
  }
  out_ << j.dump() << "\n";
}

}  // namespace flagforge::cli
