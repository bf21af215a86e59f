#include "zsb/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "zsb/errors.hpp"
#include "zsb/util.hpp"

namespace zsb {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& p) {
  std::vector<nlohmann::json> out;
  std::ifstream in(p);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw IntegrityError("malformed JSONL at " + p.string() + ":" +
                           std::to_string(line_no));
    }
    out.push_back(std::move(j));
  }
  return out;
}

void append_jsonl(const std::filesystem::path& p, const nlohmann::json& record) {
  std::ofstream out(p, std::ios::app);
  if (!out) throw RunError("cannot append to " + p.string());
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw RunError("append failed: " + p.string());
}

void write_jsonl_atomic(const std::filesystem::path& p,
                        const std::vector<nlohmann::json>& records) {
  std::ostringstream body;
  for (const auto& r : records) body << r.dump() << '\n';
  write_text_file_atomic(p.string(), body.str());
}

}  // namespace zsb
