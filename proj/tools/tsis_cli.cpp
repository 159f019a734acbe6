// tsis: corpus generation, family building, evaluation and synthesis.
//
// Exit codes: 0 success, 1 data or provenance error, 2 usage error,
// 3 no program found.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "tsis/tsis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotFound = 3;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tsis::IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw tsis::IoError("write failed for '" + path + "'");
}

int gen_corpus(const tsis::SyntheticCorpusParams& params, const std::string& catalog_path, const std::string& out) {
  const auto cat = tsis::load_catalog(catalog_path);
  const auto records = tsis::generate_synthetic_corpus(params, cat);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw tsis::IoError("cannot write '" + out + "'");
  tsis::write_corpus(file, records);
  if (!file) throw tsis::IoError("write failed for '" + out + "'");
  std::cout << "wrote " << records.size() << " program units to " << out << "\n";
  return kExitOk;
}

int build(const std::string& corpus_path, const std::string& catalog_path, const tsis::AtlasOptions& opt,
          const std::string& out) {
  const auto cat = tsis::load_catalog(catalog_path);
  const auto records = tsis::load_corpus(corpus_path, cat);
  const auto table = tsis::to_puis(records, cat, opt.cap);
  auto atlas = tsis::build_atlas(table.puis, cat, opt);
  atlas.provenance.discarded = table.discarded;
  tsis::save_atlas(atlas, out);

  std::cout << "program units: " << records.size() << " (" << table.discarded << " over cap " << opt.cap
            << " discarded), unique subsets: " << table.puis.size() << "\n";
  std::cout << "baseline family: " << atlas.baseline.size() << " subsets\n";
  std::cout << "signature families: " << atlas.by_signature.size() << "\n";
  std::cout << "atlas written to " << out << "\n";
  return kExitOk;
}

int eval(const std::string& corpus_path, const std::string& catalog_path, const std::string& atlas_path,
         const std::string& out_dir, const tsis::ReportFormats& formats, unsigned threads) {
  const auto cat = tsis::load_catalog(catalog_path);
  const auto atlas = tsis::load_atlas(atlas_path);
  if (atlas.provenance.catalog_hash != tsis::catalog_fingerprint(cat))
    throw tsis::ProvenanceMismatch("atlas was built with a different catalog");
  const auto records = tsis::load_corpus(corpus_path, cat);
  const auto table = tsis::to_puis(records, cat, atlas.cap);
  const auto report = tsis::run_evaluation(atlas, table.puis, threads);
  const auto files = tsis::emit_report(report, tsis::atlas_stats(atlas), out_dir, formats);

  const auto& a = report.aggregates;
  std::cout << "signatures evaluated: " << report.rows.size() << ", program units: " << a.total_pus << "\n";
  std::cout << "total leading subsets  T1=" << a.sum_T1 << "  T2=" << a.sum_T2 << "  T3=" << a.sum_T3 << "\n";
  std::cout << "log10 reduction  T1/T2=" << tsis::reduction_text(a.reduction_T1_T2)
            << "  T1/T3=" << tsis::reduction_text(a.reduction_T1_T3) << "\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  return kExitOk;
}

int synth(const std::string& cases_path, const std::string& atlas_path, const std::string& catalog_path,
          const tsis::SynthOptions& opt, const std::string& out) {
  std::ifstream in(cases_path);
  if (!in) throw tsis::IoError("cannot open test cases '" + cases_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw tsis::CaseFileError(std::string("test cases: ") + e.what());
  }
  const auto cases = tsis::cases_from_json(doc);
  const auto cat = tsis::load_catalog(catalog_path);
  const auto atlas = tsis::load_atlas(atlas_path);
  const auto result = tsis::synthesize(cases, atlas, cat, opt);

  const auto text = tsis::synth_result_json(result).dump(2) + "\n";
  if (!out.empty()) write_text(out, text);
  std::cout << text;
  return result.found() ? kExitOk : kExitNotFound;
}

int signatures() {
  for (const auto& sig : tsis::enumerate_production_signatures()) std::cout << tsis::canonical_string(sig) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type-signature instruction subset families: build, evaluate and synthesize"};
  app.require_subcommand(1);

  unsigned threads = tsis::detail::default_threads();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // gen-corpus
  tsis::SyntheticCorpusParams gen;
  std::pair<std::size_t, std::size_t> group_size{gen.group_size_min, gen.group_size_max};
  std::string gen_catalog, gen_out;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Generate a seeded synthetic corpus (JSONL)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--pus", gen.n_pus, "Number of program units")->capture_default_str();
  gen_cmd->add_option("--catalog", gen_catalog, "Catalog JSON")->required();
  gen_cmd->add_option("--zipf", gen.zipf_exponent, "Zipf exponent")->capture_default_str();
  gen_cmd->add_option("--groups", gen.n_groups, "Co-occurrence groups")->capture_default_str();
  gen_cmd->add_option("--group-size", group_size, "Group size range MIN MAX")->capture_default_str();
  gen_cmd->add_option("--cap", gen.cap, "Unique-instruction cap the count law targets")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output JSONL")->required();

  // build
  tsis::AtlasOptions build_opt;
  std::string build_corpus, build_catalog, build_out;
  auto* build_cmd = app.add_subcommand("build", "Build the baseline and per-signature families");
  build_cmd->add_option("--corpus", build_corpus, "Corpus JSONL")->required();
  build_cmd->add_option("--catalog", build_catalog, "Catalog JSON")->required();
  build_cmd->add_option("--cap", build_opt.cap, "Maximum subset size")->capture_default_str();
  build_cmd->add_option("--amplify-factor", build_opt.amplify_factor, "Artificial subsets per input subset")
      ->capture_default_str();
  build_cmd->add_option("--seed", build_opt.seed, "Amplification seed")->capture_default_str();
  build_cmd->add_option("--out", build_out, "Atlas JSON")->required();
  std::string build_reorder = tsis::policy_name(build_opt.reorder);
  build_cmd->add_option("--reorder", build_reorder, "Signature family order: marginal-coverage or total-coverage")
      ->capture_default_str();

  // eval
  std::string eval_corpus, eval_catalog, eval_atlas, eval_dir, eval_formats = "csv,json,svg";
  auto* eval_cmd = app.add_subcommand("eval", "Count leading subsets and write the report");
  eval_cmd->add_option("--corpus", eval_corpus, "Corpus JSONL")->required();
  eval_cmd->add_option("--catalog", eval_catalog, "Catalog JSON")->required();
  eval_cmd->add_option("--atlas", eval_atlas, "Atlas JSON")->required();
  eval_cmd->add_option("--out-dir", eval_dir, "Report directory")->required();
  eval_cmd->add_option("--formats", eval_formats, "Comma-separated: csv,json,svg")->capture_default_str();

  // synth
  tsis::SynthOptions synth_opt;
  std::string synth_cases, synth_atlas, synth_catalog, synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a program from test cases");
  synth_cmd->add_option("--cases", synth_cases, "Test-case JSON")->required();
  synth_cmd->add_option("--atlas", synth_atlas, "Atlas JSON")->required();
  synth_cmd->add_option("--catalog", synth_catalog, "Catalog JSON")->required();
  synth_cmd->add_option("--max-depth", synth_opt.max_depth, "Maximum program depth")->capture_default_str();
  synth_cmd->add_option("--max-nodes", synth_opt.max_nodes, "Maximum program nodes")->capture_default_str();
  synth_cmd->add_option("--budget", synth_opt.per_subset_budget, "Programs enumerated per subset")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Also write the result JSON here");

  app.add_subcommand("signatures", "List the 225 production type signatures");

  auto* catalog_cmd = app.add_subcommand("default-catalog", "Write the bundled toy catalog");
  std::string catalog_out;
  catalog_cmd->add_option("--out", catalog_out, "Output JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) {
      gen.group_size_min = group_size.first;
      gen.group_size_max = group_size.second;
      return gen_corpus(gen, gen_catalog, gen_out);
    }
    if (*build_cmd) {
      build_opt.threads = threads;
      build_opt.reorder = tsis::parse_reorder_policy(build_reorder);
      return build(build_corpus, build_catalog, build_opt, build_out);
    }
    if (*eval_cmd) return eval(eval_corpus, eval_catalog, eval_atlas, eval_dir, tsis::parse_formats(eval_formats), threads);
    if (*synth_cmd) {
      synth_opt.threads = threads;
      return synth(synth_cases, synth_atlas, synth_catalog, synth_opt, synth_out);
    }
    if (*catalog_cmd) {
      const auto text = tsis::catalog_to_json(tsis::default_catalog()).dump(2) + "\n";
      if (catalog_out.empty()) std::cout << text;
      else write_text(catalog_out, text);
      return kExitOk;
    }
    return signatures();
  } catch (const tsis::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tsis::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
