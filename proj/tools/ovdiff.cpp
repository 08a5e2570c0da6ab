#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ovdiff/embedding_http.hpp"
#include "ovdiff/ovdiff.hpp"

namespace fs = std::filesystem;
using namespace ovdiff;

namespace {

/// Bad flag values. Exit status 1.
struct UsageError : Error {
  using Error::Error;
};

/// Unreadable or malformed input. Exit status 2.
struct DataError : Error {
  using Error::Error;
};

template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DataError&) {
    throw;
  } catch (const SyntaxError& e) {
    throw DataError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what());
  } catch (const Error& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string slurp(const std::string& path) {
  if (!fs::is_regular_file(path)) throw DataError(path + ": no such file");
  return read_file(path);
}

TripleSet load_ontology(const std::string& path) {
  return with_path(path, [&] { return parse_rdf(slurp(path), syntax_for_path(path)); });
}

Alignment load_alignment(const std::string& path) {
  return with_path(path, [&] { return read_alignment(slurp(path)); });
}

std::set<Iri> load_entities(const std::string& path) {
  return with_path(path, [&] { return read_entity_list(slurp(path)); });
}

/// First of `names` that exists in `dir`.
std::string pick(const fs::path& dir, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (fs::exists(dir / n)) return (dir / n).string();
  }
  throw DataError((dir / *names.begin()).string() + ": no such file");
}

/// Reads a diff output directory or a generator refs directory.
VersionRefs load_result_dir(const std::string& dir) {
  fs::path d(dir);
  if (!fs::is_directory(d)) throw DataError(dir + ": not a directory");
  VersionRefs r;
  r.remain = load_alignment(pick(d, {"remain.xml", bundle_files::remain}));
  r.update = load_alignment(pick(d, {"update.xml", bundle_files::update}));
  r.add = load_entities(pick(d, {"add.txt", bundle_files::add}));
  r.del = load_entities(pick(d, {"delete.txt", bundle_files::del}));
  return r;
}

OvResult as_result(VersionRefs r) {
  return OvResult{std::move(r.remain), std::move(r.update), std::move(r.add), std::move(r.del)};
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    with_path(out, [&] { write_file(out, text); });
  }
}

/// Flags shared by diff and sweep.
struct MatchOptions {
  double threshold = 0.90;
  std::size_t top_k = 3;
  std::vector<std::string> matchers;
  std::string synonym_table;
  double synonym_score = 0.95;
  std::vector<std::string> cross_refs;
  bool strict_crossref = false;
  std::string embed_url;
  std::size_t jobs = 1;

  void add_to(CLI::App* app, bool with_threshold) {
    if (with_threshold) {
      app->add_option("--threshold,-s", threshold, "Similarity threshold")->capture_default_str();
    }
    app->add_option("--top-k,-k", top_k, "Candidates kept per source entity")->capture_default_str();
    app->add_option("--matcher,-m", matchers, "exact, edit, jaccard, synonym, embedding (repeatable)")
        ->delimiter(',');
    app->add_option("--synonym-table", synonym_table, "Tab-separated synonym pairs");
    app->add_option("--synonym-score", synonym_score, "Score of a synonym hit")->capture_default_str();
    app->add_option("--cross-ref", cross_refs, "R_OR.xml,R_O'R.xml (repeatable)");
    app->add_flag("--strict-crossref", strict_crossref, "Fail on cross-reference IRIs missing from an ontology");
    app->add_option("--embed-url", embed_url, "Embedding endpoint (default: $OVDIFF_EMBED_URL)");
    app->add_option("--jobs,-j", jobs, "Scoring threads")->capture_default_str();
  }

  OvParams params() const {
    OvParams p{threshold, top_k};
    try {
      p.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return p;
  }

  CrossRefPolicy policy() const { return strict_crossref ? CrossRefPolicy::Strict : CrossRefPolicy::WarnAndDrop; }

  Matcher matcher() const {
    MatcherConfig cfg;
    if (!matchers.empty()) {
      cfg.scorers.clear();
      try {
        for (const auto& m : matchers) cfg.scorers.insert(scorer_from_name(m));
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    cfg.synonym_value = synonym_score;
    SynonymTable table;
    if (cfg.scorers.count(Scorer::Synonym)) {
      if (synonym_table.empty()) throw UsageError("--matcher synonym needs --synonym-table");
      table = with_path(synonym_table, [&] { return read_synonym_table(slurp(synonym_table)); });
    }
    std::shared_ptr<EmbeddingCache> cache;
    if (cfg.scorers.count(Scorer::Embedding)) {
      auto url = embed_url.empty() ? embed_url_from_env() : std::optional<std::string>(embed_url);
      if (!url) throw UsageError("--matcher embedding needs --embed-url or $" + std::string(kEmbedUrlEnv));
      cfg.embedding_endpoint = url;
      try {
        cache = std::make_shared<EmbeddingCache>(std::make_shared<HttpEmbeddingProvider>(*url));
      } catch (const ProviderError& e) {
        throw UsageError(e.what());
      }
    }
    try {
      return Matcher(cfg, std::move(table), std::move(cache));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }

  std::vector<CrossRefPair> load_cross_refs() const {
    std::vector<CrossRefPair> out;
    for (const auto& arg : cross_refs) {
      auto comma = arg.find(',');
      if (comma == std::string::npos || arg.find(',', comma + 1) != std::string::npos) {
        throw UsageError("--cross-ref expects R_OR,R_O'R, got '" + arg + "'");
      }
      auto a = arg.substr(0, comma), b = arg.substr(comma + 1);
      out.push_back(CrossRefPair{load_alignment(a), load_alignment(b), arg});
    }
    return out;
  }
};

Proportions parse_proportions(const std::string& text) {
  Proportions p{};
  std::size_t i = 0, start = 0;
  try {
    for (; i < 4; ++i) {
      auto end = text.find(',', start);
      if ((end == std::string::npos) != (i == 3)) throw UsageError("");
      std::size_t used = 0;
      auto part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
      p[i] = std::stod(part, &used);
      if (used != part.size()) throw UsageError("");
      start = end + 1;
    }
    detail::validate_proportions(p);
  } catch (const std::exception& e) {
    std::string why = e.what();
    throw UsageError("--proportions expects four shares r,u,a,d summing to 1" + (why.empty() ? "" : " (" + why + ")"));
  }
  return p;
}

int run_gen(const std::string& source, const std::string& target, const std::string& reference,
            const std::string& out, std::uint64_t seed, const std::string& proportions,
            const std::string& intermediate) {
  auto p = parse_proportions(proportions);
  if (intermediate != "source" && intermediate != "target") {
    throw UsageError("--intermediate must be 'source' or 'target'");
  }
  auto side = intermediate == "source" ? IntermediateSide::Source : IntermediateSide::Target;
  auto src = load_ontology(source);
  auto tgt = load_ontology(target);
  auto ref = load_alignment(reference);
  auto bundle = with_path(reference, [&] { return generate(src, tgt, ref, seed, p, side); });
  for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << "\n";
  with_path(out, [&] { write_bundle(bundle, out); });
  const auto& c = bundle.manifest.counts;
  auto count = [&](const char* k) { return c.count(k) ? c.at(k) : 0; };
  std::cout << "remain " << count("remain") << "  update " << count("update") << "  add " << count("add")
            << "  delete " << count("delete") << "\n";
  return 0;
}

int run_diff(const std::string& o_path, const std::string& op_path, const std::string& out, const MatchOptions& opt) {
  auto params = opt.params();
  auto score = opt.matcher();
  auto o = load_ontology(o_path);
  auto op = load_ontology(op_path);
  auto crs = opt.load_cross_refs();
  std::vector<std::string> warnings;
  OvResult r;
  if (crs.empty()) {
    r = diff(o, op, score, params, nullptr, opt.jobs);
  } else {
    try {
      r = diff_with_cr(o, op, crs, score, params, opt.policy(), nullptr, opt.jobs, &warnings);
    } catch (const ScopeError& e) {
      throw DataError(e.what());
    }
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  fs::path dir(out);
  with_path(out, [&] {
    fs::create_directories(dir);
    write_file((dir / "remain.xml").string(), write_alignment(r.remain));
    write_file((dir / "update.xml").string(), write_alignment(r.update));
    write_file((dir / "add.txt").string(), write_entity_list(r.add));
    write_file((dir / "delete.txt").string(), write_entity_list(r.del));
  });

  auto n_o = extract_entities(o).size(), n_op = extract_entities(op).size();
  auto c = conservation_check(r, n_o, n_op);
  std::cout << "remain " << r.remain.size() << "  update " << r.update.size() << "  add " << r.add.size()
            << "  delete " << r.del.size() << "\n"
            << "N(O)+N(O') = " << c.lhs << ", 2(remain+update)+add+delete = " << c.rhs
            << (c.pass ? "  ok" : "  VIOLATED") << "\n";
  return c.pass ? 0 : 2;
}

int run_eval(const std::string& result_dir, const std::string& refs_dir, const std::string& format,
             const std::string& out) {
  ReportFormat fmt;
  try {
    fmt = report_format_from_name(format);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  auto system = as_result(load_result_dir(result_dir));
  auto refs = load_result_dir(refs_dir);
  emit(out, emit_report(evaluate(system, refs), fmt));
  return 0;
}

int run_sweep(const std::string& o_path, const std::string& op_path, const std::string& refs_dir, double from,
              double to, double step, std::optional<double> sigma, const std::string& format, const std::string& out,
              const MatchOptions& opt) {
  ReportFormat fmt;
  std::vector<double> grid;
  try {
    fmt = report_format_from_name(format);
    grid = threshold_grid(from, to, step);
    if (sigma) gaussian_kernel(*sigma);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (opt.top_k < 1) throw UsageError("top-k must be at least 1");
  auto score = opt.matcher();
  auto o = load_ontology(o_path);
  auto op = load_ontology(op_path);
  auto crs = opt.load_cross_refs();
  std::optional<VersionRefs> refs;
  if (!refs_dir.empty()) refs = load_result_dir(refs_dir);
  SweepSeries series;
  try {
    series = sweep(o, op, score, opt.top_k, grid, refs ? &*refs : nullptr, &crs, opt.policy(), nullptr, opt.jobs);
  } catch (const ScopeError& e) {
    throw DataError(e.what());
  } catch (const ProviderError& e) {
    throw DataError(e.what());
  }
  emit(out, emit_report(series, fmt, sigma));
  return 0;
}

int run_changelog(const std::string& result_dir, const std::string& old_iri, const std::string& new_iri,
                  const std::string& out) {
  Iri old_v, new_v;
  try {
    old_v = Iri(old_iri);
    new_v = Iri(new_iri);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  auto r = as_result(load_result_dir(result_dir));
  emit(out, emit_changelog(r, old_v, new_v));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology version diff: detect remain, update, add and delete entities between two versions."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ovdiff 0.1.0");

  std::string source, target, reference, gen_out, proportions = "0.25,0.25,0.25,0.25", intermediate = "source";
  std::uint64_t seed = kDefaultSeed;
  auto* gen = app.add_subcommand("gen", "Generate a versioning testbed from a matching task");
  gen->add_option("--source", source, "Source ontology (.ttl or .nt)")->required();
  gen->add_option("--target", target, "Target ontology (.ttl or .nt)")->required();
  gen->add_option("--reference", reference, "Reference alignment between source and target")->required();
  gen->add_option("--out,-o", gen_out, "Bundle directory")->required();
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--proportions", proportions, "Shares r,u,a,d")->capture_default_str();
  gen->add_option("--intermediate", intermediate, "source or target")->capture_default_str();

  std::string o_path, op_path, diff_out;
  MatchOptions diff_opt;
  auto* diffc = app.add_subcommand("diff", "Classify entities of O and O' into remain, update, add, delete");
  diffc->add_option("O", o_path, "Old version")->required();
  diffc->add_option("O_PRIME", op_path, "New version")->required();
  diffc->add_option("--out,-o", diff_out, "Output directory")->required();
  diff_opt.add_to(diffc, true);

  std::string result_dir, refs_dir, eval_format = "csv", eval_out;
  auto* evalc = app.add_subcommand("eval", "Compare a diff output directory with versioning references");
  evalc->add_option("RESULT_DIR", result_dir, "diff output directory")->required();
  evalc->add_option("REFS_DIR", refs_dir, "Directory with vr-* references")->required();
  evalc->add_option("--format", eval_format, "csv or json")->capture_default_str();
  evalc->add_option("--out,-o", eval_out, "Report file (default: stdout)");

  std::string sw_o, sw_op, sw_refs, sw_format = "csv", sw_out;
  double from = 0.90, to = 1.00, step = 0.01;
  std::optional<double> sigma;
  MatchOptions sweep_opt;
  auto* sweepc = app.add_subcommand("sweep", "Run diff over a threshold grid");
  sweepc->add_option("O", sw_o, "Old version")->required();
  sweepc->add_option("O_PRIME", sw_op, "New version")->required();
  sweepc->add_option("--refs", sw_refs, "Directory with vr-* references");
  sweepc->add_option("--from", from, "First threshold")->capture_default_str();
  sweepc->add_option("--to", to, "Last threshold")->capture_default_str();
  sweepc->add_option("--step", step, "Threshold step")->capture_default_str();
  sweepc->add_option("--smooth-sigma", sigma, "Gaussian smoothing of measure columns");
  sweepc->add_option("--format", sw_format, "csv or json")->capture_default_str();
  sweepc->add_option("--out,-o", sw_out, "Report file (default: stdout)");
  sweep_opt.add_to(sweepc, false);

  std::string cl_dir, old_iri, new_iri, cl_out;
  auto* clc = app.add_subcommand("changelog", "Write a Turtle change log for a diff output directory");
  clc->add_option("RESULT_DIR", cl_dir, "diff output directory")->required();
  clc->add_option("--old-iri", old_iri, "IRI of the old version")->required();
  clc->add_option("--new-iri", new_iri, "IRI of the new version")->required();
  clc->add_option("--out,-o", cl_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return run_gen(source, target, reference, gen_out, seed, proportions, intermediate);
    if (*diffc) return run_diff(o_path, op_path, diff_out, diff_opt);
    if (*evalc) return run_eval(result_dir, refs_dir, eval_format, eval_out);
    if (*sweepc) return run_sweep(sw_o, sw_op, sw_refs, from, to, step, sigma, sw_format, sw_out, sweep_opt);
    if (*clc) return run_changelog(cl_dir, old_iri, new_iri, cl_out);
  } catch (const UsageError& e) {
    std::cerr << "ovdiff: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ovdiff: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
