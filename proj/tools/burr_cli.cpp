// burr: build, query and benchmark bumped ribbon retrieval structures.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "burr/burr.hpp"

namespace {

burr::threshold_mode mode_arg(const std::string& s) {
  if (auto m = burr::parse_threshold_mode(s)) return *m;
  throw CLI::ValidationError("--mode", "unknown threshold mode '" + s + "'");
}

burr::cut_strategy strategy_arg(const std::string& s) {
  if (auto st = burr::parse_cut_strategy(s)) return *st;
  throw CLI::ValidationError("--strategy", "unknown cut strategy '" + s + "'");
}

struct common_options {
  burr::layer_config cfg;
  burr::thread_plan plan;
  std::string mode = "1plus";
  std::string strategy = "nosearch";

  void add_to(CLI::App* app) {
    app->add_option("--r", cfg.r, "Value / fingerprint bits (1..16)")->capture_default_str();
    app->add_option("--threads", plan.threads, "Construction threads")->capture_default_str();
    app->add_option("--minbpt", plan.minbpt, "Minimum buckets per thread")->capture_default_str();
    app->add_option("--mode", mode, "Threshold encoding: uncompressed, 2bit, 1plus")->capture_default_str();
    app->add_option("--strategy", strategy, "Cut strategy: nosearch, minbump, maxprev, diff")->capture_default_str();
    app->add_option("--search-range", plan.search_range, "Cut search radius in buckets")->capture_default_str();
    app->add_option("--overload", cfg.overload, "Layer overload factor")->capture_default_str();
    app->add_option("--layers", cfg.layers, "Bumping layers before the base layer")->capture_default_str();
    app->add_option("--seed", cfg.seed, "Global seed")->capture_default_str();
  }

  void finalize() {
    cfg.mode = mode_arg(mode);
    plan.strategy = strategy_arg(strategy);
    cfg.validate();
    plan.validate();
  }
};

// One key per line; an optional tab separates the key from a decimal value.
struct key_file {
  std::vector<std::string> keys;
  std::vector<std::uint16_t> values;
  bool has_values = true;
};

key_file read_keys(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open key file '" + path + "'");
  key_file kf;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      kf.keys.push_back(line);
      kf.values.push_back(0);
      kf.has_values = false;
    } else {
      kf.keys.push_back(line.substr(0, tab));
      kf.values.push_back(static_cast<std::uint16_t>(std::stoul(line.substr(tab + 1))));
    }
  }
  return kf;
}

void print_summary(const burr::retrieval_structure& s, std::size_t n, const burr::build_stats& st, double seconds) {
  const auto bytes = burr::structural_bytes(s);
  std::printf("keys              %zu\n", n);
  std::printf("structural bytes  %zu (%.4f bits/key)\n", bytes, n ? 8.0 * bytes / n : 0.0);
  std::printf("bumped per layer ");
  for (auto b : st.bumped_per_layer) std::printf(" %zu", b);
  std::printf("\nbase slots        %zu (attempts %u)\n", s.base().slots(), st.base_attempts);
  std::printf("threads per layer");
  for (auto t : st.threads_per_layer) std::printf(" %u", t);
  std::printf("\ntime              %.3f s (sort %.3f, insert %.3f, backsub %.3f)\n", seconds, st.sort_seconds,
              st.insert_seconds, st.backsub_seconds);
}

int run(int argc, char** argv) {
  CLI::App app{"Bumped ribbon retrieval: build, query, bench"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "Build a structure and save it");
  common_options bopt;
  bopt.add_to(build);
  std::size_t n = 0;
  std::string keys_path, out_path;
  bool retrieval = false;
  build->add_option("--n", n, "Number of synthetic 64-bit keys (seeded by --seed)");
  build->add_option("--keys", keys_path, "Key file: one key per line, optional <TAB>value");
  build->add_flag("--retrieval", retrieval, "Store the file's values instead of fingerprints");
  build->add_option("--out", out_path, "Output structure file")->required();

  // query
  auto* query = app.add_subcommand("query", "Query a saved structure");
  std::string in_path, key;
  std::int64_t synthetic_index = -1;
  query->add_option("--in", in_path, "Structure file")->required();
  auto* key_opt = query->add_option("--key", key, "String key");
  auto* idx_opt = query->add_option("--synthetic-index", synthetic_index, "Index of a synthetic key used by build --n");
  key_opt->excludes(idx_opt);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmarks (CSV on stdout)");
  bench->require_subcommand(1);

  auto* bconstruct = bench->add_subcommand("construct", "Construction time and space per thread count");
  common_options copt;
  copt.add_to(bconstruct);
  std::size_t cn = 1'000'000;
  std::vector<unsigned> thread_list{1, 2, 4, 8};
  unsigned repeats = 3;
  bconstruct->add_option("--n", cn, "Keys")->capture_default_str();
  bconstruct->add_option("--thread-list", thread_list, "Thread counts")->delimiter(',')->capture_default_str();
  bconstruct->add_option("--repeats", repeats, "Repeats per thread count")->capture_default_str();

  auto* bstrat = bench->add_subcommand("strategies", "Per-thread space overhead of each cut strategy");
  common_options sopt;
  sopt.plan.threads = 8;
  sopt.add_to(bstrat);
  std::size_t sn = 10'000'000;
  unsigned seeds = 5;
  std::vector<std::string> modes{"uncompressed", "2bit", "1plus"};
  std::vector<std::string> strategies{"nosearch", "minbump", "maxprev", "diff"};
  bstrat->add_option("--n", sn, "Keys")->capture_default_str();
  bstrat->add_option("--seeds", seeds, "Runs averaged per configuration")->capture_default_str();
  bstrat->add_option("--modes", modes, "Threshold encodings")->delimiter(',')->capture_default_str();
  bstrat->add_option("--strategies", strategies, "Cut strategies")->delimiter(',')->capture_default_str();

  auto* bfilter = bench->add_subcommand("filter", "False-positive rate and space of a filter");
  common_options fopt;
  fopt.add_to(bfilter);
  std::size_t fn = 1'000'000, negatives = 10'000'000;
  bfilter->add_option("--n", fn, "Keys")->capture_default_str();
  bfilter->add_option("--negatives", negatives, "Non-member probes")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (build->parsed()) {
    bopt.finalize();
    if ((n > 0) == !keys_path.empty()) throw CLI::ValidationError("build", "give exactly one of --n and --keys");
    burr::build_stats st;
    const auto t0 = std::chrono::steady_clock::now();
    burr::retrieval_structure s;
    std::size_t count = 0;
    if (!keys_path.empty()) {
      const auto kf = read_keys(keys_path);
      count = kf.keys.size();
      const std::vector<std::string_view> views(kf.keys.begin(), kf.keys.end());
      if (retrieval) {
        if (!kf.has_values) throw std::runtime_error("--retrieval needs a value on every line");
        s = burr::construct(burr::make_pairs<std::string_view>(views, kf.values, bopt.cfg), bopt.cfg, bopt.plan, &st);
      } else {
        s = burr::build_filter<std::string_view>(views, bopt.cfg, bopt.plan, &st).structure();
      }
    } else {
      if (retrieval) throw std::runtime_error("--retrieval needs --keys");
      count = n;
      const auto keys = burr::synthetic_keys(n, bopt.cfg.seed);
      s = burr::build_filter<std::uint64_t>(keys, bopt.cfg, bopt.plan, &st).structure();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    burr::save(s, out_path);
    print_summary(s, count, st, secs);
    std::printf("written           %s\n", out_path.c_str());
    return 0;
  }

  if (query->parsed()) {
    if (key_opt->count() == 0 && idx_opt->count() == 0) {
      throw CLI::ValidationError("query", "give --key or --synthetic-index");
    }
    const auto s = burr::load(in_path);
    const burr::master_hash h = key_opt->count()
                                    ? s.hash(std::string_view(key))
                                    : s.hash(burr::synthetic_keys(1, s.global_seed(),
                                                                  static_cast<std::uint64_t>(synthetic_index))[0]);
    const auto value = s.query_hash(h);
    const bool fp_match = value == burr::fingerprint(h, s.config().r);
    std::printf("value %u\nfingerprint_match %s\nlayer %zu\n", value, fp_match ? "yes" : "no", s.answering_layer(h));
    return 0;
  }

  if (bconstruct->parsed()) {
    copt.finalize();
    burr::bench_construct(cn, thread_list, repeats, copt.cfg, copt.plan, std::cout);
    return 0;
  }
  if (bstrat->parsed()) {
    sopt.finalize();
    std::vector<burr::threshold_mode> ms;
    for (const auto& m : modes) ms.push_back(mode_arg(m));
    std::vector<burr::cut_strategy> ss;
    for (const auto& st : strategies) ss.push_back(strategy_arg(st));
    burr::bench_strategies(sn, sopt.plan.threads, sopt.plan.minbpt, sopt.plan.search_range, ms, ss, seeds, sopt.cfg,
                           std::cout);
    return 0;
  }
  if (bfilter->parsed()) {
    fopt.finalize();
    burr::bench_filter(fn, negatives, fopt.cfg, fopt.plan, std::cout);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
