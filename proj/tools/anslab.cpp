// anslab: tabled-ANS laboratory CLI.
//
// Subcommands: analyze, tune, optimize, enumerate, encode, decode, keyed
// (derive/encode/decode), bench. Formats: dist files (symbol<TAB>prob|count),
// spread files (state<TAB>symbol), "ANS1"/"ANSK" containers, CSV reports.
//
// Exit codes: 0 ok, 2 parse/validation, 3 singular system, 4 cap exceeded.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "anslab/container.hpp"
#include "anslab/frame.hpp"
#include "anslab/io.hpp"
#include "anslab/keyed.hpp"
#include "anslab/markov.hpp"
#include "anslab/optimize.hpp"
#include "anslab/parallel.hpp"
#include "anslab/prng.hpp"
#include "anslab/tuning.hpp"
#include "anslab/version.hpp"

using namespace anslab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSingular = 3;
constexpr int kExitCap = 4;

unsigned thread_count_from(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ANSLAB_THREADS"))
    if (const int v = std::atoi(env); v > 0) return static_cast<unsigned>(v);
  return default_thread_count();
}

// ---------------------------------------------------------------- manifests

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> arithmetic;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add_input(const std::string& path) { inputs[path] = io::sha256_file_hex(path); }
  void add_output(const std::string& path) { outputs[path] = io::sha256_file_hex(path); }

  void write(const std::string& path) const {
    json m;
    m["tool"] = "anslab";
    m["version"] = kVersion;
    m["command"] = command;
    m["argv"] = argv;
    m["threads"] = threads;
    if (seed) m["seed"] = *seed;
    if (arithmetic) m["arithmetic"] = *arithmetic;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << m.dump(2) << '\n';
  }
};

// ---------------------------------------------------------------- loading

std::vector<Rational> load_probs(const std::string& dist_path) {
  return io::dist_file_probs(io::read_dist_file(dist_path));
}

/// Distribution + spread pair for `analyze`: R and the counts come from the
/// spread file, probabilities and symbol names from the dist file.
std::pair<SymbolDistribution, SymbolSpread> load_dist_and_spread(
    const std::string& dist_path, const std::string& spread_path) {
  const auto file = io::read_dist_file(dist_path);
  const auto probs = io::dist_file_probs(file);
  const auto raw = io::read_spread_file_raw(spread_path);

  std::vector<std::uint32_t> counts(file.symbols.size(), 0);
  std::vector<std::uint32_t> assignment;
  assignment.reserve(raw.symbols.size());
  for (const auto& name : raw.symbols) {
    const auto it = std::find(file.symbols.begin(), file.symbols.end(), name);
    if (it == file.symbols.end())
      throw std::invalid_argument("spread symbol `" + name + "` missing from " + dist_path);
    const auto idx = static_cast<std::uint32_t>(it - file.symbols.begin());
    ++counts[idx];
    assignment.push_back(idx);
  }
  SymbolDistribution dist(file.symbols, probs, raw.R, counts);
  SymbolSpread spread(raw.R, std::move(assignment));
  return {std::move(dist), std::move(spread)};
}

markov::Arithmetic pick_arithmetic(bool exact_flag, bool float_flag, std::uint32_t L) {
  if (exact_flag) return markov::Arithmetic::exact;
  if (float_flag) return markov::Arithmetic::floating;
  return L <= 256 ? markov::Arithmetic::exact : markov::Arithmetic::floating;
}

const char* arithmetic_name(markov::Arithmetic mode) {
  return mode == markov::Arithmetic::exact ? "exact" : "floating";
}

void print_report(std::ostream& out, const markov::RedundancyReport& rep, bool as_json,
                  const std::map<std::string, std::string>& extra = {}) {
  if (as_json) {
    json j;
    j["arithmetic"] = arithmetic_name(rep.mode);
    j["kappa"] = rep.kappa;
    j["entropy"] = rep.entropy;
    j["delta_h"] = rep.delta_h;
    if (rep.mode == markov::Arithmetic::exact)
      j["kappa_exact"] = rational_string(rep.kappa_exact);
    for (const auto& [k, v] : extra) j[k] = v;
    out << j.dump(2) << '\n';
    return;
  }
  out.precision(12);
  out << "arithmetic  " << arithmetic_name(rep.mode) << '\n';
  out << "kappa       " << rep.kappa << '\n';
  if (rep.mode == markov::Arithmetic::exact)
    out << "kappa_exact " << rational_string(rep.kappa_exact) << '\n';
  out << "entropy     " << rep.entropy << '\n';
  out << "delta_h     " << rep.delta_h << '\n';
  for (const auto& [k, v] : extra) out << k << "  " << v << '\n';
}

// ---------------------------------------------------------------- byte mode

std::string byte_symbol_name(unsigned byte) { return std::to_string(byte); }

/// Coding distribution whose probabilities are exactly L_s / L, rebuildable
/// on the decode side from the container's count table alone.
SymbolDistribution coding_dist_from_counts(const std::vector<std::uint32_t>& counts,
                                           std::uint32_t R,
                                           const std::vector<unsigned>& byte_values) {
  std::vector<std::string> names;
  names.reserve(byte_values.size());
  for (unsigned b : byte_values) names.push_back(byte_symbol_name(b));
  return distribution_from_counts(counts, R, std::move(names));
}

SymbolSpread derive_spread(const SymbolDistribution& dist, const std::string& method) {
  if (method == "tune") return tuning::tune_spread(dist);
  if (method == "rank") return tuning::rank_match_spread(dist);
  throw std::invalid_argument("unknown spread method: " + method);
}

/// Byte values of a dist file whose symbols must parse as integers 0..255.
std::vector<unsigned> byte_values_of(const std::vector<std::string>& symbols) {
  std::vector<unsigned> values;
  values.reserve(symbols.size());
  for (const auto& name : symbols) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(name, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != name.size() || v > 255)
      throw std::invalid_argument("byte-mode symbol `" + name +
                                  "` is not a byte value (0..255)");
    values.push_back(static_cast<unsigned>(v));
  }
  return values;
}

struct ByteCoder {
  SymbolDistribution dist;
  SymbolSpread spread;
  CodingTables tables;
  std::array<std::int32_t, 256> index_of;  // byte -> symbol index or -1
  std::vector<unsigned> byte_values;
};

ByteCoder make_byte_coder(std::vector<std::uint32_t> counts, std::uint32_t R,
                          std::vector<unsigned> byte_values, const std::string& method,
                          const std::string& spread_path) {
  auto dist = coding_dist_from_counts(counts, R, byte_values);
  SymbolSpread spread = spread_path.empty() ? derive_spread(dist, method)
                                            : io::read_spread_file(spread_path, dist);
  CodingTables tables = CodingTables::build(dist, spread);
  std::array<std::int32_t, 256> index;
  index.fill(-1);
  for (std::size_t i = 0; i < byte_values.size(); ++i)
    index[byte_values[i]] = static_cast<std::int32_t>(i);
  return ByteCoder{std::move(dist), std::move(spread), std::move(tables), index,
                   std::move(byte_values)};
}

std::vector<std::uint16_t> byte_count_table(const ByteCoder& coder) {
  std::vector<std::uint16_t> slots(256, 0);
  for (std::size_t i = 0; i < coder.byte_values.size(); ++i)
    slots[coder.byte_values[i]] = static_cast<std::uint16_t>(coder.dist.count(i));
  return slots;
}

SymbolFrame bytes_to_frame(const std::vector<std::uint8_t>& bytes, const ByteCoder& coder) {
  SymbolFrame frame;
  frame.symbols.reserve(bytes.size());
  for (std::uint8_t b : bytes) {
    const std::int32_t idx = coder.index_of[b];
    if (idx < 0)
      throw std::invalid_argument("input byte " + std::to_string(b) +
                                  " is outside the coder's alphabet");
    frame.symbols.push_back(static_cast<std::uint32_t>(idx));
  }
  return frame;
}

std::vector<std::uint8_t> frame_to_bytes(const SymbolFrame& frame, const ByteCoder& coder) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(frame.symbols.size());
  for (std::uint32_t s : frame.symbols)
    bytes.push_back(static_cast<std::uint8_t>(coder.byte_values[s]));
  return bytes;
}

// encode-side coder construction shared by `encode` and `keyed encode`
ByteCoder byte_coder_for_input(const std::vector<std::uint8_t>& bytes, std::uint32_t R,
                               const std::string& dist_path, const std::string& method,
                               const std::string& spread_path) {
  if (!dist_path.empty()) {
    const auto file = io::read_dist_file(dist_path);
    const auto probs = io::dist_file_probs(file);
    auto byte_values = byte_values_of(file.symbols);
    const auto quantized = quantize(probs, R, file.symbols);
    return make_byte_coder(quantized.counts(), R, std::move(byte_values), method,
                           spread_path);
  }
  // implicit statistics: count byte frequencies, then quantize
  std::array<std::uint64_t, 256> freq{};
  for (std::uint8_t b : bytes) ++freq[b];
  std::vector<unsigned> byte_values;
  std::vector<Rational> probs;
  for (unsigned b = 0; b < 256; ++b)
    if (freq[b] > 0) {
      byte_values.push_back(b);
      probs.emplace_back(static_cast<unsigned long>(freq[b]),
                         static_cast<unsigned long>(bytes.size()));
    }
  for (auto& p : probs) p.canonicalize();
  if (byte_values.size() < 2)
    throw std::invalid_argument(
        "input uses fewer than 2 distinct byte values; nothing to code");
  std::vector<std::string> names;
  for (unsigned b : byte_values) names.push_back(byte_symbol_name(b));
  const auto quantized = quantize(probs, R, names);
  return make_byte_coder(quantized.counts(), R, std::move(byte_values), method,
                         spread_path);
}

ByteCoder byte_coder_from_header(const ContainerHeader& header, const std::string& method,
                                 const std::string& spread_path) {
  std::vector<unsigned> byte_values;
  std::vector<std::uint32_t> counts;
  for (unsigned b = 0; b < header.counts.size(); ++b)
    if (header.counts[b] > 0) {
      byte_values.push_back(b);
      counts.push_back(header.counts[b]);
    }
  if (byte_values.size() < 2)
    throw std::invalid_argument("container alphabet has fewer than 2 symbols");
  return make_byte_coder(std::move(counts), header.R, std::move(byte_values), method,
                         spread_path);
}

void write_trace_file(const std::string& path, const opt::SearchTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "# iteration\tstate_a\tstate_b\tdelta_h\n";
  out.precision(17);
  for (const auto& swap : trace.good_swaps)
    out << swap.iteration << '\t' << swap.state_a << '\t' << swap.state_b << '\t'
        << swap.delta_h << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anslab: tabled-ANS entropy-coding laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads_flag = 0;
  app.add_option("-t,--threads", threads_flag,
                 "worker threads for fan-outs (default: ANSLAB_THREADS or hardware)");

  std::vector<std::string> raw_argv(argv, argv + argc);

  // ---- analyze ----------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "kappa/H/dH of a (dist, spread) pair");
  std::string an_dist, an_spread;
  bool an_exact = false, an_float = false, an_probs = false, an_json = false;
  analyze->add_option("--dist", an_dist, "distribution file")->required();
  analyze->add_option("--spread", an_spread, "spread file")->required();
  analyze->add_flag("--exact", an_exact, "exact rational arithmetic");
  analyze->add_flag("--float", an_float, "floating-point arithmetic");
  analyze->add_flag("--probs", an_probs, "also print the full p_x list");
  analyze->add_flag("--json", an_json, "machine-readable report");

  // ---- tune -------------------------------------------------------------
  auto* tune = app.add_subcommand("tune", "analytic spread construction");
  std::string tu_dist, tu_out, tu_method = "tune", tu_manifest;
  std::uint32_t tu_R = 0;
  bool tu_exact = false, tu_float = false, tu_json = false;
  tune->add_option("--dist", tu_dist, "distribution file")->required();
  tune->add_option("--R", tu_R, "table-size exponent")->required();
  tune->add_option("--method", tu_method, "tune | rank")
      ->check(CLI::IsMember({"tune", "rank"}));
  tune->add_option("--out", tu_out, "output spread file")->required();
  tune->add_option("--manifest", tu_manifest, "manifest path (default <out>.manifest.json)");
  tune->add_flag("--exact", tu_exact, "exact report");
  tune->add_flag("--float", tu_float, "floating report");
  tune->add_flag("--json", tu_json, "machine-readable report");

  // ---- optimize ---------------------------------------------------------
  auto* optimize = app.add_subcommand("optimize", "probabilistic swap search");
  std::string op_dist, op_out, op_init = "random", op_init_file, op_objective = "min",
              op_trace, op_manifest, op_seed_str = "0";
  std::uint32_t op_R = 0;
  double op_threshold = 0.0;
  std::uint64_t op_iters = 10000;
  bool op_exact = false, op_float = false, op_json = false;
  optimize->add_option("--dist", op_dist, "distribution file")->required();
  optimize->add_option("--R", op_R, "table-size exponent")->required();
  optimize->add_option("--threshold", op_threshold, "target dH (stop when beaten)");
  optimize->add_option("--iters", op_iters, "iteration budget (state visits)");
  optimize->add_option("--seed", op_seed_str, "search seed");
  optimize->add_option("--init", op_init, "random | tuned | rank | file")
      ->check(CLI::IsMember({"random", "tuned", "rank", "file"}));
  optimize->add_option("--init-file", op_init_file, "spread file for --init file");
  optimize->add_option("--objective", op_objective, "min | max")
      ->check(CLI::IsMember({"min", "max"}));
  optimize->add_option("--out", op_out, "output spread file")->required();
  optimize->add_option("--trace", op_trace, "good-swap trace file");
  optimize->add_option("--manifest", op_manifest, "manifest path");
  optimize->add_flag("--exact", op_exact, "exact final report");
  optimize->add_flag("--float", op_float, "floating final report");
  optimize->add_flag("--json", op_json, "machine-readable report");

  // ---- enumerate --------------------------------------------------------
  auto* enumerate = app.add_subcommand("enumerate", "exhaustive spread census");
  std::string en_dist, en_csv, en_min_out, en_max_out, en_mode = "exact", en_buckets,
              en_manifest;
  std::uint32_t en_R = 0;
  std::uint64_t en_cap = 1000000;
  enumerate->add_option("--dist", en_dist, "distribution file")->required();
  enumerate->add_option("--R", en_R, "table-size exponent")->required();
  enumerate->add_option("--cap", en_cap, "maximum spread count");
  enumerate->add_option("--mode", en_mode, "exact | float")
      ->check(CLI::IsMember({"exact", "float"}));
  enumerate->add_option("--buckets", en_buckets, "comma-separated kappa bucket edges");
  enumerate->add_option("--out-csv", en_csv, "histogram CSV path")->required();
  enumerate->add_option("--min-spread", en_min_out, "write a minimum-kappa spread here");
  enumerate->add_option("--max-spread", en_max_out, "write a maximum-kappa spread here");
  enumerate->add_option("--manifest", en_manifest, "manifest path");

  // ---- encode / decode --------------------------------------------------
  auto* encode_cmd = app.add_subcommand("encode", "compress a byte stream");
  std::string ec_in, ec_out, ec_dist, ec_spread, ec_method = "rank", ec_manifest;
  std::uint32_t ec_R = 11, ec_xinit = 0;
  encode_cmd->add_option("--in", ec_in, "input file")->required();
  encode_cmd->add_option("--out", ec_out, "output container")->required();
  encode_cmd->add_option("--R", ec_R, "table-size exponent (default 11)");
  encode_cmd->add_option("--dist", ec_dist, "explicit statistics (byte-valued symbols)");
  encode_cmd->add_option("--spread", ec_spread, "explicit spread file");
  encode_cmd->add_option("--method", ec_method, "derived spread: rank | tune")
      ->check(CLI::IsMember({"rank", "tune"}));
  encode_cmd->add_option("--x-init", ec_xinit, "initial state (default L)");
  encode_cmd->add_option("--manifest", ec_manifest, "manifest path");

  auto* decode_cmd = app.add_subcommand("decode", "decompress a container");
  std::string dc_in, dc_out, dc_dist, dc_spread, dc_method = "rank", dc_manifest;
  decode_cmd->add_option("--in", dc_in, "input container")->required();
  decode_cmd->add_option("--out", dc_out, "output file")->required();
  decode_cmd->add_option("--dist", dc_dist, "statistics file used at encode time");
  decode_cmd->add_option("--spread", dc_spread, "spread file used at encode time");
  decode_cmd->add_option("--method", dc_method, "derived spread: rank | tune")
      ->check(CLI::IsMember({"rank", "tune"}));
  decode_cmd->add_option("--manifest", dc_manifest, "manifest path");

  // ---- keyed ------------------------------------------------------------
  auto* keyed_cmd = app.add_subcommand("keyed", "key-derived secret spreads");
  keyed_cmd->require_subcommand(1);
  std::string ke_key, ke_dist, ke_in, ke_out, ke_spread_out, ke_manifest;
  std::uint32_t ke_R = 0, ke_iters = 1000, ke_xinit = 0;
  bool ke_json = false;
  auto add_keyed_common = [&](CLI::App* cmd) {
    cmd->add_option("--key-hex", ke_key, "256-bit key, 64 hex chars")->required();
    cmd->add_option("--dist-file", ke_dist, "public statistics (byte-valued symbols)")
        ->required();
    cmd->add_option("--R", ke_R, "table-size exponent")->required();
    cmd->add_option("--iters", ke_iters, "fixed search iterations (default 1000)");
  };
  auto* ke_derive = keyed_cmd->add_subcommand("derive", "derive and report the spread");
  add_keyed_common(ke_derive);
  ke_derive->add_option("--out-spread", ke_spread_out, "write the secret spread here");
  ke_derive->add_option("--manifest", ke_manifest, "manifest path");
  ke_derive->add_flag("--json", ke_json, "machine-readable report");
  auto* ke_encode = keyed_cmd->add_subcommand("encode", "compress with the keyed spread");
  add_keyed_common(ke_encode);
  ke_encode->add_option("--in", ke_in, "input file")->required();
  ke_encode->add_option("--out", ke_out, "output container")->required();
  ke_encode->add_option("--x-init", ke_xinit, "initial state (default L)");
  ke_encode->add_option("--manifest", ke_manifest, "manifest path");
  auto* ke_decode = keyed_cmd->add_subcommand("decode", "decompress and verify checksum");
  add_keyed_common(ke_decode);
  ke_decode->add_option("--in", ke_in, "input container")->required();
  ke_decode->add_option("--out", ke_out, "output file")->required();
  ke_decode->add_option("--manifest", ke_manifest, "manifest path");

  // ---- bench ------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "swap-search bounds per (R, seed)");
  std::string be_dist, be_csv = "-", be_rlist = "7", be_manifest;
  std::uint64_t be_iters = 100000, be_seeds = 1;
  bench->add_option("--dist", be_dist, "distribution file")->required();
  bench->add_option("--R-list", be_rlist, "comma-separated exponents");
  bench->add_option("--iters", be_iters, "iterations per run");
  bench->add_option("--seeds", be_seeds, "number of seeds (0 => header-only CSV)");
  bench->add_option("--out", be_csv, "CSV path (default stdout)");
  bench->add_option("--manifest", be_manifest, "manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const unsigned threads = thread_count_from(threads_flag);

  try {
    // ---- analyze --------------------------------------------------------
    if (*analyze) {
      auto [dist, spread] = load_dist_and_spread(an_dist, an_spread);
      const auto mode = pick_arithmetic(an_exact, an_float, dist.state_count());
      const auto tables = CodingTables::build(dist, spread);
      markov::EquilibriumDistribution eq;
      try {
        eq = markov::solve_equilibrium(tables, dist, mode);
      } catch (const markov::SingularSystemError&) {
        std::cerr << "error: spread " << an_spread
                  << " has no unique stationary distribution (singular system)\n";
        return kExitSingular;
      }
      const auto rep = markov::redundancy(eq, tables, dist);
      print_report(std::cout, rep, an_json);
      if (an_probs) {
        std::cout.precision(12);
        for (std::uint32_t x = dist.state_count(); x < 2 * dist.state_count(); ++x) {
          std::cout << "p_" << x << "  ";
          if (mode == markov::Arithmetic::exact)
            std::cout << rational_string(eq.prob_exact(x)) << '\n';
          else
            std::cout << eq.prob(x) << '\n';
        }
      }
      return kExitOk;
    }

    // ---- tune -----------------------------------------------------------
    if (*tune) {
      Manifest manifest;
      manifest.command = "tune";
      manifest.argv = raw_argv;
      manifest.threads = threads;
      manifest.add_input(tu_dist);

      const auto file = io::read_dist_file(tu_dist);
      const auto dist = quantize(io::dist_file_probs(file), tu_R, file.symbols);
      const auto spread = derive_spread(dist, tu_method);
      io::write_spread_file(tu_out, spread, dist);

      const auto mode = pick_arithmetic(tu_exact, tu_float, dist.state_count());
      manifest.arithmetic = arithmetic_name(mode);
      const auto tables = CodingTables::build(dist, spread);
      const auto rep =
          markov::redundancy(markov::solve_equilibrium(tables, dist, mode), tables, dist);
      const auto prefs = tuning::preferred_positions(dist);
      std::ostringstream d;
      d.precision(6);
      d << tuning::spread_distance(spread, prefs);
      print_report(std::cout, rep, tu_json, {{"distance", d.str()}});

      manifest.add_output(tu_out);
      manifest.write(tu_manifest.empty() ? tu_out + ".manifest.json" : tu_manifest);
      return kExitOk;
    }

    // ---- optimize -------------------------------------------------------
    if (*optimize) {
      Manifest manifest;
      manifest.command = "optimize";
      manifest.argv = raw_argv;
      manifest.threads = threads;
      manifest.add_input(op_dist);

      const auto file = io::read_dist_file(op_dist);
      const auto dist = quantize(io::dist_file_probs(file), op_R, file.symbols);

      opt::SearchConfig cfg;
      cfg.threshold = op_threshold;
      cfg.max_iterations = op_iters;
      cfg.seed = std::stoull(op_seed_str);
      cfg.objective =
          op_objective == "min" ? opt::Objective::minimize : opt::Objective::maximize;
      cfg.report_arithmetic = pick_arithmetic(op_exact, op_float, dist.state_count());
      if (op_init == "random") cfg.init = opt::InitSpread::random;
      if (op_init == "tuned") cfg.init = opt::InitSpread::tuned;
      if (op_init == "rank") cfg.init = opt::InitSpread::rank;
      if (op_init == "file") {
        if (op_init_file.empty())
          throw std::invalid_argument("--init file requires --init-file");
        manifest.add_input(op_init_file);
        cfg.init = opt::InitSpread::explicit_spread;
        cfg.initial = io::read_spread_file(op_init_file, dist);
      }
      manifest.seed = cfg.seed;
      manifest.arithmetic = arithmetic_name(cfg.report_arithmetic);

      const auto trace = opt::swap_search(dist, cfg);
      if (trace.final_singular) {
        std::cerr << "error: every evaluated spread was singular\n";
        return kExitSingular;
      }
      io::write_spread_file(op_out, trace.final_spread, dist);
      if (!op_trace.empty()) write_trace_file(op_trace, trace);

      std::map<std::string, std::string> extra;
      extra["iterations"] = std::to_string(trace.iterations);
      extra["swaps_attempted"] = std::to_string(trace.swaps_attempted);
      extra["good_swaps"] = std::to_string(trace.good_swaps.size());
      extra["singular_rejections"] = std::to_string(trace.singular_rejections);
      extra["reached_threshold"] = trace.reached_threshold ? "true" : "false";
      print_report(std::cout, trace.report, op_json, extra);

      manifest.add_output(op_out);
      if (!op_trace.empty()) manifest.add_output(op_trace);
      manifest.write(op_manifest.empty() ? op_out + ".manifest.json" : op_manifest);
      return kExitOk;
    }

    // ---- enumerate ------------------------------------------------------
    if (*enumerate) {
      Manifest manifest;
      manifest.command = "enumerate";
      manifest.argv = raw_argv;
      manifest.threads = threads;
      manifest.add_input(en_dist);

      const auto file = io::read_dist_file(en_dist);
      const auto dist = quantize(io::dist_file_probs(file), en_R, file.symbols);
      std::vector<Rational> edges;
      if (!en_buckets.empty()) {
        std::stringstream ss(en_buckets);
        std::string item;
        while (std::getline(ss, item, ',')) edges.push_back(parse_rational(item));
      }
      const auto mode = en_mode == "exact" ? markov::Arithmetic::exact
                                           : markov::Arithmetic::floating;
      manifest.arithmetic = arithmetic_name(mode);
      const auto hist = opt::exhaustive_spreads(dist, en_cap, mode, edges, threads);

      std::ofstream csv(en_csv);
      if (!csv) throw std::runtime_error("cannot write CSV: " + en_csv);
      csv << "bucket_low,bucket_high,count\n";
      csv << "min,min," << hist.min_count << '\n';
      std::string low = rational_string(hist.min_kappa);
      for (std::size_t e = 0; e < hist.edges.size(); ++e) {
        csv << low << ',' << rational_string(hist.edges[e]) << ','
            << hist.bucket_counts[e] << '\n';
        low = rational_string(hist.edges[e]);
      }
      csv << low << ',' << rational_string(hist.max_kappa) << ','
          << hist.bucket_counts.back() << '\n';
      csv << "max,max," << hist.max_count << '\n';
      csv << "singular,singular," << hist.failures << '\n';
      csv.close();

      std::cout << "total " << hist.total.get_str() << ", failures " << hist.failures
                << ", min kappa " << rational_string(hist.min_kappa) << " ("
                << hist.min_count << " spreads, ~2^"
                << std::log2(static_cast<double>(hist.min_count))
                << " keyspace), max kappa " << rational_string(hist.max_kappa) << " ("
                << hist.max_count << " spreads)\n";

      if (!en_min_out.empty()) {
        io::write_spread_file(en_min_out, hist.min_spread, dist);
        manifest.add_output(en_min_out);
      }
      if (!en_max_out.empty()) {
        io::write_spread_file(en_max_out, hist.max_spread, dist);
        manifest.add_output(en_max_out);
      }
      manifest.add_output(en_csv);
      manifest.write(en_manifest.empty() ? en_csv + ".manifest.json" : en_manifest);
      return kExitOk;
    }

    // ---- encode ---------------------------------------------------------
    if (*encode_cmd) {
      Manifest manifest;
      manifest.command = "encode";
      manifest.argv = raw_argv;
      manifest.threads = threads;
      manifest.add_input(ec_in);
      if (!ec_dist.empty()) manifest.add_input(ec_dist);
      if (!ec_spread.empty()) manifest.add_input(ec_spread);

      const auto bytes = io::read_file_bytes(ec_in);
      std::ofstream out(ec_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write container: " + ec_out);

      if (bytes.empty()) {
        ContainerHeader header;
        header.R = ec_R;
        write_container(out, header, {});
      } else {
        const auto coder = byte_coder_for_input(bytes, ec_R, ec_dist, ec_method, ec_spread);
        const auto frame = bytes_to_frame(bytes, coder);
        const std::uint32_t x_init = ec_xinit ? ec_xinit : coder.dist.state_count();
        const auto bf = encode(frame, coder.tables, x_init);

        ContainerHeader header;
        header.R = ec_R;
        {
          const auto slots = byte_count_table(coder);
          header.counts.assign(slots.begin(), slots.end());
        }
        header.frame_length = frame.length();
        header.final_state = bf.final_state;
        header.payload_bits = bf.bit_length;
        write_container(out, header, bf.payload);
      }
      out.close();
      std::cout << "encoded " << bytes.size() << " bytes -> "
                << io::read_file_bytes(ec_out).size() << " container bytes\n";
      manifest.add_output(ec_out);
      manifest.write(ec_manifest.empty() ? ec_out + ".manifest.json" : ec_manifest);
      return kExitOk;
    }

    // ---- decode ---------------------------------------------------------
    if (*decode_cmd) {
      Manifest manifest;
      manifest.command = "decode";
      manifest.argv = raw_argv;
      manifest.threads = threads;
      manifest.add_input(dc_in);

      std::ifstream in(dc_in, std::ios::binary);
      if (!in) throw std::invalid_argument("cannot open container: " + dc_in);
      std::vector<std::uint8_t> payload;
      const auto header = read_container(in, payload);
      if (header.checksum)
        throw std::invalid_argument("keyed container; use `keyed decode`");

      std::vector<std::uint8_t> bytes;
      if (header.frame_length > 0) {
        ByteCoder coder = dc_dist.empty()
                              ? byte_coder_from_header(header, dc_method, dc_spread)
                              : [&] {
                                  const auto file = io::read_dist_file(dc_dist);
                                  const auto probs = io::dist_file_probs(file);
                                  auto values = byte_values_of(file.symbols);
                                  const auto q = quantize(probs, header.R, file.symbols);
                                  return make_byte_coder(q.counts(), header.R,
                                                         std::move(values), dc_method,
                                                         dc_spread);
                                }();
        BinaryFrame bf;
        bf.payload = std::move(payload);
        bf.bit_length = header.payload_bits;
        bf.final_state = header.final_state;
        const auto frame = decode(bf, coder.tables, header.frame_length);
        bytes = frame_to_bytes(frame, coder);
      }
      io::write_file_bytes(dc_out, bytes);
      std::cout << "decoded " << bytes.size() << " bytes\n";
      manifest.add_output(dc_out);
      manifest.write(dc_manifest.empty() ? dc_out + ".manifest.json" : dc_manifest);
      return kExitOk;
    }

    // ---- keyed ----------------------------------------------------------
    if (*keyed_cmd) {
      const auto key = keyed::key_from_hex(ke_key);
      const auto file = io::read_dist_file(ke_dist);
      const auto probs = io::dist_file_probs(file);
      auto byte_values = byte_values_of(file.symbols);
      const auto session =
          keyed::derive_keyed_spread(key, probs, ke_R, ke_iters, file.symbols);
      std::array<std::int32_t, 256> index;
      index.fill(-1);
      for (std::size_t i = 0; i < byte_values.size(); ++i)
        index[byte_values[i]] = static_cast<std::int32_t>(i);
      ByteCoder coder{session.dist, session.spread, session.tables, index, byte_values};

      if (*ke_derive) {
        Manifest manifest;
        manifest.command = "keyed derive";
        manifest.argv = raw_argv;
        manifest.threads = threads;
        manifest.add_input(ke_dist);
        manifest.seed = session.seed;
        std::map<std::string, std::string> extra;
        extra["spread_digest"] = keyed::session_digest(session);
        extra["iterations"] = std::to_string(session.iterations);
        print_report(std::cout, session.report, ke_json, extra);
        if (!ke_spread_out.empty()) {
          io::write_spread_file(ke_spread_out, session.spread, session.dist);
          manifest.add_output(ke_spread_out);
          manifest.write(ke_manifest.empty() ? ke_spread_out + ".manifest.json"
                                             : ke_manifest);
        }
        return kExitOk;
      }

      if (*ke_encode) {
        Manifest manifest;
        manifest.command = "keyed encode";
        manifest.argv = raw_argv;
        manifest.threads = threads;
        manifest.add_input(ke_dist);
        manifest.add_input(ke_in);

        const auto bytes = io::read_file_bytes(ke_in);
        std::ofstream out(ke_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write container: " + ke_out);
        ContainerHeader header;
        header.R = ke_R;
        header.checksum = keyed::frame_checksum(bytes);
        if (!bytes.empty()) {
          const auto frame = bytes_to_frame(bytes, coder);
          const std::uint32_t x_init = ke_xinit ? ke_xinit : coder.dist.state_count();
          const auto bf = keyed::keyed_encode(session, frame, x_init);
          const auto slots = byte_count_table(coder);
          header.counts.assign(slots.begin(), slots.end());
          header.frame_length = frame.length();
          header.final_state = bf.final_state;
          header.payload_bits = bf.bit_length;
          write_container(out, header, bf.payload);
        } else {
          write_container(out, header, {});
        }
        out.close();
        std::cout << "encoded " << bytes.size() << " bytes (keyed)\n";
        manifest.add_output(ke_out);
        manifest.write(ke_manifest.empty() ? ke_out + ".manifest.json" : ke_manifest);
        return kExitOk;
      }

      if (*ke_decode) {
        Manifest manifest;
        manifest.command = "keyed decode";
        manifest.argv = raw_argv;
        manifest.threads = threads;
        manifest.add_input(ke_dist);
        manifest.add_input(ke_in);

        std::ifstream in(ke_in, std::ios::binary);
        if (!in) throw std::invalid_argument("cannot open container: " + ke_in);
        std::vector<std::uint8_t> payload;
        const auto header = read_container(in, payload);
        if (!header.checksum)
          throw std::invalid_argument("not a keyed container; use `decode`");

        std::vector<std::uint8_t> bytes;
        if (header.frame_length > 0) {
          BinaryFrame bf;
          bf.payload = std::move(payload);
          bf.bit_length = header.payload_bits;
          bf.final_state = header.final_state;
          const auto frame = keyed::keyed_decode(session, bf, header.frame_length);
          bytes = frame_to_bytes(frame, coder);
        }
        if (keyed::frame_checksum(bytes) != *header.checksum) {
          std::cerr << "error: checksum mismatch; wrong key or corrupted container\n";
          return kExitUsage;
        }
        io::write_file_bytes(ke_out, bytes);
        std::cout << "decoded " << bytes.size() << " bytes (checksum ok)\n";
        manifest.add_output(ke_out);
        manifest.write(ke_manifest.empty() ? ke_out + ".manifest.json" : ke_manifest);
        return kExitOk;
      }
    }

    // ---- bench ----------------------------------------------------------
    if (*bench) {
      Manifest manifest;
      manifest.command = "bench";
      manifest.argv = raw_argv;
      manifest.threads = threads;
      manifest.add_input(be_dist);

      const auto file = io::read_dist_file(be_dist);
      const auto probs = io::dist_file_probs(file);
      std::vector<std::uint32_t> r_list;
      {
        std::stringstream ss(be_rlist);
        std::string item;
        while (std::getline(ss, item, ','))
          r_list.push_back(static_cast<std::uint32_t>(std::stoul(item)));
      }

      struct Row {
        std::uint32_t R = 0;
        std::uint64_t seed = 0;
        bool maximize = false;
        opt::SearchTrace trace;
      };
      std::vector<Row> rows;
      for (auto R : r_list)
        for (std::uint64_t seed = 0; seed < be_seeds; ++seed)
          for (bool maximize : {false, true}) {
            Row row;
            row.R = R;
            row.seed = seed;
            row.maximize = maximize;
            rows.push_back(std::move(row));
          }

      parallel_chunks(rows.size(), threads, [&](unsigned, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          auto& row = rows[i];
          const auto dist = quantize(probs, row.R, file.symbols);
          opt::SearchConfig cfg;
          cfg.threshold = row.maximize ? 1e18 : 0.0;  // run the full budget
          cfg.max_iterations = be_iters;
          cfg.seed = row.seed;
          cfg.objective =
              row.maximize ? opt::Objective::maximize : opt::Objective::minimize;
          row.trace = opt::swap_search(dist, cfg);
        }
      });

      std::ostream* outp = &std::cout;
      std::ofstream csv_file;
      if (be_csv != "-") {
        csv_file.open(be_csv);
        if (!csv_file) throw std::runtime_error("cannot write CSV: " + be_csv);
        outp = &csv_file;
      }
      std::ostream& csv = *outp;
      csv << "R,seed,objective,initial_delta_h,final_delta_h,good_swaps,"
             "swaps_attempted,iterations,singular_rejections,wall_seconds\n";
      csv.precision(17);
      for (const auto& row : rows)
        csv << row.R << ',' << row.seed << ',' << (row.maximize ? "max" : "min") << ','
            << row.trace.initial_delta_h << ',' << row.trace.report.delta_h << ','
            << row.trace.good_swaps.size() << ',' << row.trace.swaps_attempted << ','
            << row.trace.iterations << ',' << row.trace.singular_rejections << ','
            << row.trace.wall_seconds << '\n';
      if (be_csv != "-") {
        csv_file.close();
        manifest.add_output(be_csv);
        manifest.write(be_manifest.empty() ? be_csv + ".manifest.json" : be_manifest);
      }
      return kExitOk;
    }
  } catch (const opt::CapExceededError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCap;
  } catch (const markov::SingularSystemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
