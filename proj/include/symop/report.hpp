#pragma once

// Reports: an ordered list of named records, rendered as indented text or
// as JSON lines (one object per record, with the record name under "record").

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace symop {

enum class ReportFormat { Text, JsonLines };

class Report {
 public:
  using json = nlohmann::ordered_json;

  /// Start a record; fields are added with set() until the next record.
  Report& record(const std::string& name) {
    records_.push_back({name, json::object()});
    return *this;
  }

  template <typename T>
  Report& set(const std::string& key, T&& value) {
    if (records_.empty()) record("report");
    records_.back().fields[key] = std::forward<T>(value);
    return *this;
  }

  void write(std::ostream& os, ReportFormat fmt) const {
    for (const auto& r : records_) {
      if (fmt == ReportFormat::JsonLines) {
        json line = json::object();
        line["record"] = r.name;
        for (const auto& [k, v] : r.fields.items()) line[k] = v;
        os << line.dump() << '\n';
      } else {
        os << '[' << r.name << "]\n";
        for (const auto& [k, v] : r.fields.items()) os << "  " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
    }
  }

 private:
  struct Record {
    std::string name;
    json fields;
  };
  std::vector<Record> records_;
};

}  // namespace symop
