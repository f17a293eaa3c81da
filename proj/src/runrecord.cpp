#include "qotl/runrecord.hpp"

#include <ctime>

#include "qotl/checkpoint.hpp"
#include "qotl/csv.hpp"

namespace qotl {

void RunRecord::add_output(const std::filesystem::path& path) {
  outputs.emplace_back(path.filename().string(), "fnv1a:" + digest_hex(fnv1a64_file(path)));
}

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_run_record(const std::filesystem::path& path, const RunRecord& record) {
  KvWriter w;
  w.put("tool", record.tool);
  w.put("version", std::string(kToolVersion));
  w.put("started_at", record.started_at);
  w.put("finished_at", record.finished_at);
  for (const auto& [k, v] : record.config) w.put("config." + k, v);
  for (const auto& [k, v] : record.outputs) w.put("output." + k, v);
  w.write_file(path);
}

}  // namespace qotl
