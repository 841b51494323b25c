#include "hyperchain/network_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

namespace hyperchain {

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

bool parse_int(std::string_view token, long long& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_double(std::string_view token, double& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

struct RawEdge {
  long long tail, head;
  double rate;
  std::string where;  // "line 4" or "edges[2]"
};

// Shared validation so both formats report violations against their source location.
HyperchainSystem build_system(long long n, const std::vector<RawEdge>& raw,
                              const std::string& header_where) {
  if (n < 1) throw Error(ErrorCode::ParseError, header_where + ": species count must be >= 1");
  if (n > 100000) throw Error(ErrorCode::ParseError, header_where + ": species count too large");
  if (raw.empty()) throw Error(ErrorCode::ParseError, header_where + ": no edges");

  std::map<std::pair<long long, long long>, std::string> seen;
  std::vector<bool> touched(static_cast<std::size_t>(n), false);
  std::vector<Edge> edges;
  Matrix k = Matrix::Zero(n, n);
  for (const RawEdge& e : raw) {
    if (e.tail < 1 || e.tail > n || e.head < 1 || e.head > n)
      throw Error(ErrorCode::ParseError, e.where + ": vertex index out of range 1.." +
                                             std::to_string(n));
    if (!(std::isfinite(e.rate) && e.rate > 0.0))
      throw Error(ErrorCode::ParseError, e.where + ": rate must be a positive number");
    auto [it, inserted] = seen.emplace(std::pair{e.tail, e.head}, e.where);
    if (!inserted)
      throw Error(ErrorCode::ParseError, e.where + ": duplicate edge " + std::to_string(e.tail) +
                                             " " + std::to_string(e.head) + " (first at " +
                                             it->second + ")");
    const int t = static_cast<int>(e.tail - 1), h = static_cast<int>(e.head - 1);
    touched[t] = touched[h] = true;
    edges.push_back({t, h});
    k(t, h) = e.rate;
  }
  for (long long v = 0; v < n; ++v)
    if (!touched[v])
      throw Error(ErrorCode::ParseError,
                  header_where + ": vertex " + std::to_string(v + 1) + " has no edges");
  return HyperchainSystem(Hyperchain(static_cast<int>(n), std::move(edges)),
                          RateMatrix(std::move(k)));
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

HyperchainSystem parse_network_text(std::string_view text) {
  std::optional<long long> n;
  std::string header_where = "line 1";
  std::vector<RawEdge> raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_tokens(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!n) {
      long long count = 0;
      if (tokens.size() != 2 || tokens[0] != "n" || !parse_int(tokens[1], count))
        fail_at(line_no, "expected header 'n <count>'");
      n = count;
      header_where = "line " + std::to_string(line_no);
      if (*n < 1) fail_at(line_no, "species count must be >= 1");
    } else {
      RawEdge e{};
      if (tokens.size() != 3 || !parse_int(tokens[0], e.tail) || !parse_int(tokens[1], e.head) ||
          !parse_double(tokens[2], e.rate))
        fail_at(line_no, "expected '<tail> <head> <rate>'");
      e.where = "line " + std::to_string(line_no);
      raw.push_back(std::move(e));
    }
    if (end == text.size()) break;
  }
  if (!n) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing header 'n <count>'");
  return build_system(*n, raw, header_where);
}

HyperchainSystem parse_network_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                    ": malformed JSON");
  }
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() ||
      !doc.contains("edges") || !doc["edges"].is_array())
    throw Error(ErrorCode::ParseError, "line 1: expected object with integer 'n' and array 'edges'");
  std::vector<RawEdge> raw;
  const auto& edges = doc["edges"];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& item = edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("tail") || !item.contains("head") ||
        !item.contains("rate") || !item["tail"].is_number_integer() ||
        !item["head"].is_number_integer() || !item["rate"].is_number())
      throw Error(ErrorCode::ParseError, where + ": expected {tail:int, head:int, rate:number}");
    raw.push_back({item["tail"].get<long long>(), item["head"].get<long long>(),
                   item["rate"].get<double>(), where});
  }
  return build_system(doc["n"].get<long long>(), raw, "n");
}

HyperchainSystem parse_network(std::string_view text) {
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (c == '{') return parse_network_json(text);
    break;
  }
  return parse_network_text(text);
}

HyperchainSystem load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_network(text);
}

std::string format_shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

double round_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
  return std::strtod(buf, nullptr);
}

std::string format_network_text(const HyperchainSystem& sys, std::string_view comment) {
  std::ostringstream os;
  os << "# HYPERCHAIN v1\n";
  if (!comment.empty()) {
    std::size_t pos = 0;
    while (pos < comment.size()) {
      std::size_t end = comment.find('\n', pos);
      if (end == std::string_view::npos) end = comment.size();
      os << "# " << comment.substr(pos, end - pos) << '\n';
      pos = end + 1;
    }
  }
  os << "n " << sys.size() << '\n';
  for (const Edge& e : sys.graph().edges())
    os << e.tail + 1 << ' ' << e.head + 1 << ' ' << format_shortest(sys.K()(e.tail, e.head)) << '\n';
  return os.str();
}

nlohmann::json network_to_json(const HyperchainSystem& sys) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : sys.graph().edges())
    edges.push_back({{"tail", e.tail + 1}, {"head", e.head + 1}, {"rate", sys.K()(e.tail, e.head)}});
  return {{"n", sys.size()}, {"edges", std::move(edges)}};
}

}  // namespace hyperchain
