#include <cmath>
#include <cstdio>
#include <fstream>

#include "mor/errors.hpp"
#include "mor/experiments.hpp"

namespace mor::experiments {

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw Error(ErrorCode::kInternalConsistency, "csv row width differs from header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      if (std::isnan(row[i])) {
        out += "nan";
      } else {
        std::snprintf(buf, sizeof buf, "%.15e", row[i]);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const Config& cfg, const RunResult& result) {
  for (const auto& [stem, table] : result.tables) {
    write_text(cfg.output_dir / (stem + ".csv"), format_csv(table));
    Json meta;
    meta["table"] = stem;
    meta["experiment"] = to_string(result.experiment);
    meta["columns"] = table.columns;
    meta["rows"] = table.rows.size();
    meta["library_version"] = MOR_VERSION;
    meta["config"] = to_json(cfg);
    meta["run"] = result.metadata;
    meta["wall_seconds"] = result.wall_seconds;
    Json soft = Json::array();
    for (const auto& c : result.soft_checks) {
      soft.push_back({{"name", c.name}, {"status", c.passed ? "pass" : "warn"}, {"detail", c.detail}});
    }
    meta["soft_checks"] = soft;
    meta["failures"] = result.failures;
    write_text(cfg.output_dir / (stem + ".meta.json"), meta.dump(2) + "\n");
  }
}

}  // namespace mor::experiments
