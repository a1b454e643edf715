#include "anslab/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace anslab::io {

namespace {

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// token pair "name<TAB>value" (any whitespace run accepted as separator)
bool split_pair(const std::string& line, std::string& first, std::string& second) {
  const auto sep = line.find_first_of(" \t");
  if (sep == std::string::npos) return false;
  first = strip(line.substr(0, sep));
  second = strip(line.substr(sep + 1));
  return !first.empty() && !second.empty();
}

}  // namespace

DistFile read_dist_file(std::istream& in) {
  DistFile file;
  file.counts = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    std::string symbol, value;
    if (!split_pair(text, symbol, value))
      throw std::invalid_argument("dist file line " + std::to_string(line_no) +
                                  ": expected `symbol<TAB>value`");
    file.symbols.push_back(symbol);
    file.values.push_back(parse_rational(value));
    if (file.values.back().get_den() != 1) file.counts = false;
    if (file.values.back() <= 0)
      throw std::invalid_argument("dist file line " + std::to_string(line_no) +
                                  ": value must be positive");
  }
  if (file.symbols.size() < 2)
    throw std::invalid_argument("dist file needs at least 2 symbols");
  return file;
}

DistFile read_dist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dist file: " + path);
  return read_dist_file(in);
}

std::vector<Rational> dist_file_probs(const DistFile& file) {
  Rational sum = 0;
  for (const auto& v : file.values) sum += v;
  if (file.counts) {
    std::vector<Rational> probs;
    probs.reserve(file.values.size());
    for (const auto& v : file.values) {
      probs.push_back(v / sum);
      probs.back().canonicalize();
    }
    return probs;
  }
  if (sum != 1)
    throw std::invalid_argument("probabilities must sum to 1, got " + rational_string(sum));
  return file.values;
}

void write_dist_file(std::ostream& out, const SymbolDistribution& dist) {
  for (std::size_t s = 0; s < dist.alphabet_size(); ++s)
    out << dist.symbols()[s] << '\t' << rational_string(dist.prob(s)) << '\n';
}

SpreadFileRaw read_spread_file_raw(std::istream& in) {
  SpreadFileRaw raw;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> states;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    std::string state_str, symbol;
    if (!split_pair(text, state_str, symbol))
      throw std::invalid_argument("spread file line " + std::to_string(line_no) +
                                  ": expected `state<TAB>symbol`");
    try {
      states.push_back(static_cast<std::uint32_t>(std::stoul(state_str)));
    } catch (const std::exception&) {
      throw std::invalid_argument("spread file line " + std::to_string(line_no) +
                                  ": bad state " + state_str);
    }
    raw.symbols.push_back(symbol);
  }
  const std::size_t L = states.size();
  if (L < 2 || (L & (L - 1)) != 0)
    throw std::invalid_argument("spread file must cover L = 2^R states, got " +
                                std::to_string(L));
  for (std::size_t i = 0; i < L; ++i)
    if (states[i] != L + i)
      throw std::invalid_argument("spread file states must run " + std::to_string(L) +
                                  ".." + std::to_string(2 * L - 1) + " ascending");
  std::size_t l = L;
  raw.R = 0;
  while (l > 1) {
    l >>= 1;
    ++raw.R;
  }
  return raw;
}

SpreadFileRaw read_spread_file_raw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spread file: " + path);
  return read_spread_file_raw(in);
}

SymbolSpread read_spread_file(std::istream& in, const SymbolDistribution& dist) {
  const std::uint32_t L = dist.state_count();
  std::vector<std::uint32_t> assignment(L, UINT32_MAX);
  std::string line;
  std::size_t line_no = 0;
  std::uint32_t expected = L;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    std::string state_str, symbol;
    if (!split_pair(text, state_str, symbol))
      throw std::invalid_argument("spread file line " + std::to_string(line_no) +
                                  ": expected `state<TAB>symbol`");
    std::uint32_t x = 0;
    try {
      x = static_cast<std::uint32_t>(std::stoul(state_str));
    } catch (const std::exception&) {
      throw std::invalid_argument("spread file line " + std::to_string(line_no) +
                                  ": bad state " + state_str);
    }
    if (x != expected)
      throw std::invalid_argument("spread file line " + std::to_string(line_no) +
                                  ": states must cover I ascending; expected " +
                                  std::to_string(expected));
    assignment[x - L] = static_cast<std::uint32_t>(dist.index_of(symbol));
    ++expected;
  }
  if (expected != 2 * L)
    throw std::invalid_argument("spread file ended early; expected states up to " +
                                std::to_string(2 * L - 1));
  SymbolSpread spread(dist.table_exponent(), std::move(assignment));
  validate_spread(dist, spread);
  return spread;
}

SymbolSpread read_spread_file(const std::string& path, const SymbolDistribution& dist) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spread file: " + path);
  return read_spread_file(in, dist);
}

void write_spread_file(std::ostream& out, const SymbolSpread& spread,
                       const SymbolDistribution& dist) {
  const std::uint32_t L = spread.state_count();
  for (std::uint32_t x = L; x < 2 * L; ++x)
    out << x << '\t' << dist.symbols()[spread.symbol_of(x)] << '\n';
}

void write_spread_file(const std::string& path, const SymbolSpread& spread,
                       const SymbolDistribution& dist) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write spread file: " + path);
  write_spread_file(out, spread, dist);
}

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  std::size_t md_len = 0;
  if (!EVP_Q_digest(nullptr, "SHA256", nullptr, data, size, md, &md_len))
    throw std::runtime_error("SHA256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * md_len);
  for (std::size_t i = 0; i < md_len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256_file_hex(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return sha256_hex(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("file write failed: " + path);
}

}  // namespace anslab::io
