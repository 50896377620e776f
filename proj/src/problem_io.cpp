#include "stowrl/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stowrl {

using nlohmann::json;

namespace {

int as_int(const json& v, const char* what) {
  if (!v.is_number_integer())
    throw FormatError(std::string("problem file: '") + what + "' must be an integer");
  return v.get<int>();
}

}  // namespace

ProblemInstance parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("problem file: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("problem file: top level must be an object");

  if (!doc.contains("version")) throw FormatError("problem file: missing 'version'");
  const int version = as_int(doc["version"], "version");
  if (version != kProblemFormatVersion)
    throw FormatError("problem file: unsupported version " + std::to_string(version));

  ProblemInstance p;
  if (!doc.contains("id") || !doc["id"].is_string())
    throw FormatError("problem file: 'id' must be a string");
  p.id = doc["id"].get<std::string>();

  p.yard.max_stack_height = kDefaultMaxStackHeight;
  if (doc.contains("max_stack_height")) {
    p.yard.max_stack_height = as_int(doc["max_stack_height"], "max_stack_height");
    if (p.yard.max_stack_height < 1)
      throw FormatError("problem file: 'max_stack_height' must be >= 1");
  }

  if (!doc.contains("slots") || !doc["slots"].is_array())
    throw FormatError("problem file: 'slots' must be an array");
  for (const auto& v : doc["slots"]) {
    const int m = as_int(v, "slots[]");
    if (m < 0) throw FormatError("problem file: negative slot mask " + std::to_string(m));
    p.ship.slots.push_back(MaskId{m});
  }

  if (!doc.contains("yard") || !doc["yard"].is_array())
    throw FormatError("problem file: 'yard' must be an array of arrays");
  for (const auto& stack : doc["yard"]) {
    if (!stack.is_array()) throw FormatError("problem file: yard stacks must be arrays");
    Stack st;
    for (const auto& v : stack) {
      const int m = as_int(v, "yard[][]");
      if (m < 1)
        throw FormatError("problem file: yard mask " + std::to_string(m) + " is not >= 1");
      st.push_back(MaskId{m});
    }
    if (static_cast<int>(st.size()) > p.yard.max_stack_height)
      throw FormatError("problem file: stack exceeds max_stack_height");
    p.yard.stacks.push_back(std::move(st));
  }
  return p;
}

std::string serialize_problem(const ProblemInstance& problem) {
  json doc = json::object();
  doc["version"] = kProblemFormatVersion;
  doc["id"] = problem.id;
  json slots = json::array();
  for (MaskId m : problem.ship.slots) slots.push_back(m.value);
  doc["slots"] = std::move(slots);
  json yard = json::array();
  for (const auto& st : problem.yard.stacks) {
    json s = json::array();
    for (MaskId m : st) s.push_back(m.value);
    yard.push_back(std::move(s));
  }
  doc["yard"] = std::move(yard);
  doc["max_stack_height"] = problem.yard.max_stack_height;
  return doc.dump() + "\n";
}

ProblemInstance read_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open problem file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

void write_problem(const ProblemInstance& problem, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write problem file " + path.string());
  out << serialize_problem(problem);
}

std::vector<ProblemInstance> read_problem_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ProblemInstance> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_problem(f));
  return out;
}

}  // namespace stowrl
