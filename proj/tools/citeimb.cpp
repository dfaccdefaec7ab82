// citeimb: gender citation imbalance against reference models.
//
//   citeimb ingest papers.tsv citations.tsv
//   citeimb model archive --model hd --attrs rank,country,topic
//   citeimb imbalance archive --model-dir model-hd --stratify rank
//   citeimb rank archive --model-dir model-rd --metric pagerank
//   citeimb synth config.txt
//   citeimb report archive --model-dir model-rd --model-dir model-hd
//   citeimb match left.tsv right.tsv
//
// Every command writes into its own directory below --output-dir (default
// $CITEIMB_OUTPUT_DIR, else the working directory) unless --out is given,
// and drops a manifest.json next to its outputs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "citeimb/archive.hpp"
#include "citeimb/imbalance.hpp"
#include "citeimb/log.hpp"
#include "citeimb/ranking.hpp"
#include "citeimb/refmodels.hpp"
#include "citeimb/structure.hpp"
#include "citeimb/synth.hpp"

namespace fs = std::filesystem;
using namespace citeimb;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string output_dir;
  std::vector<std::string> argv;
};

fs::path out_dir(const Globals& g, const std::string& explicit_out, const std::string& fallback) {
  if (!explicit_out.empty()) return explicit_out;
  return fs::path(g.output_dir) / fallback;
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return in;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

RunManifest base_manifest(const Globals& g) {
  RunManifest m;
  m.command_line = g.argv;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    m.timestamp = std::strtoll(epoch, nullptr, 10);
  }
  return m;
}

void add_input(RunManifest& m, const fs::path& p) {
  if (fs::is_directory(p)) {
    for (const auto& name : {"papers.tsv", "citations.tsv", "model.json", "expected.tsv"}) {
      if (fs::exists(p / name)) m.inputs.emplace_back((p / name).generic_string(), sha256_file(p / name));
    }
  } else {
    m.inputs.emplace_back(p.generic_string(), sha256_file(p));
  }
}

void finish(RunManifest& m, const fs::path& dir) {
  record_outputs(m, dir);
  write_manifest(dir, m);
}

std::string file_label(std::string label) {
  for (auto& c : label) {
    if (c == '*') c = 's';
    else if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return label;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string papers, citations, out;
};

void run_ingest(const Globals& g, const IngestArgs& a) {
  auto papers_in = open_input(a.papers);
  auto cites_in = open_input(a.citations);
  auto papers = parse_papers(papers_in);
  const auto raw = parse_citations(cites_in);
  const auto net = filter_citations(std::move(papers), raw);
  if (net.empty()) throw IngestError("empty network: no citation survived filtering");

  const auto dir = out_dir(g, a.out, "archive");
  write_archive(dir, net);
  auto m = base_manifest(g);
  add_input(m, a.papers);
  add_input(m, a.citations);
  finish(m, dir);
  std::cout << "archive " << dir.string() << ": " << net.size() << " papers, "
            << net.num_citations() << " citations\n";
}

struct ModelArgs {
  std::string archive, model, attrs = "rank,country,topic", out;
  bool attrs_given = false;
  bool exact = false;
  bool dump_groups = false;
  double tie_tolerance = 1e-9;
};

void run_model(const Globals& g, const ModelArgs& a) {
  const auto net = load_archive(a.archive);
  ModelSpec spec;
  const auto model = parse_model(a.model);
  if (!model) throw std::invalid_argument("unknown model '" + a.model + "'");
  spec.model = *model;
  spec.attributes = AttributeSet::parse(a.attrs);
  if (spec.model == Model::RD && a.attrs_given) warn("--attrs is ignored by the rd model");
  spec.exact = a.exact;
  spec.tie_tolerance = a.tie_tolerance;

  const auto ec = build_model(net, spec);
  const auto dir = out_dir(g, a.out, "model-" + a.model);
  write_model_artifact(dir, spec, ec, net);
  if (a.dump_groups) write_groups(dir / "groups.tsv", ec, net);
  write_structural_report(structural_report(net, ec), dir / "structure");

  auto m = base_manifest(g);
  add_input(m, a.archive);
  m.model = a.model;
  if (spec.model != Model::RD) m.attributes = spec.attributes.to_string();
  finish(m, dir);
  const auto check = check_conservation(net, ec);
  std::cout << "model " << a.model << " -> " << dir.string()
            << " (max out-degree error " << check.max_out_degree_error << ")\n";
}

struct ImbalanceArgs {
  std::string archive, model_dir, from = "all", to = "all", stratify = "none", out;
  int bootstrap = 500;
};

void run_imbalance(const Globals& g, const ImbalanceArgs& a) {
  const auto net = load_archive(a.archive);
  const auto artifact = load_model_artifact(a.model_dir, net);
  const auto from = PaperFilter::parse(a.from);
  std::optional<BootstrapOptions> boot;
  if (a.bootstrap > 0) boot = BootstrapOptions{a.bootstrap, g.seed, 0.95, g.threads};

  const auto dir = out_dir(g, a.out, "imbalance-" + std::string(to_string(artifact.spec.model)));
  fs::create_directories(dir);
  const auto emit = [&](const std::string& stem, const std::vector<ImbalanceReport>& reports) {
    auto csv = open_output(dir / (stem + ".csv"));
    write_reports_csv(csv, reports);
    auto js = open_output(dir / (stem + ".json"));
    write_reports_json(js, reports);
  };

  if (a.stratify == "none") {
    emit("imbalance", imbalance_reports(net, artifact.expected, from, PaperFilter::parse(a.to), boot));
  } else {
    Stratifier s;
    if (a.stratify == "rank") s = Stratifier::ConferenceRank;
    else if (a.stratify == "subfield") s = Stratifier::Subfield;
    else throw std::invalid_argument("--stratify must be none, rank or subfield");
    if (a.to != "all") warn("--to is replaced by the stratum filter when stratifying");
    for (const auto& block : stratified_imbalance(net, artifact.expected, s, from, boot)) {
      emit("imbalance_" + a.stratify + "_" + file_label(block.label), block.reports);
    }
  }

  auto m = base_manifest(g);
  add_input(m, a.archive);
  add_input(m, a.model_dir);
  m.seed = g.seed;
  m.model = std::string(to_string(artifact.spec.model));
  if (artifact.spec.model != Model::RD) m.attributes = artifact.spec.attributes.to_string();
  if (boot) m.resamples = boot->resamples;
  finish(m, dir);
  std::cout << "imbalance -> " << dir.string() << '\n';
}

struct RankArgs {
  std::string archive, metric = "pagerank", out;
  std::vector<std::string> model_dirs;
  std::vector<double> d_grid = {1, 2, 5, 10, 20, 50, 100};
  double alpha = 0.85;
};

void run_rank(const Globals& g, const RankArgs& a) {
  const auto net = load_archive(a.archive);
  Metric metric;
  if (a.metric == "pagerank") metric = Metric::PageRank;
  else if (a.metric == "citations") metric = Metric::Citations;
  else throw std::invalid_argument("--metric must be citations or pagerank");
  if (net.num_citations() == 0) throw std::invalid_argument("network has no citations");

  std::vector<ModelArtifact> models;
  for (const auto& d : a.model_dirs) models.push_back(load_model_artifact(d, net));
  std::vector<ShareSource> sources{{"observed", nullptr}};
  for (const auto& m : models) sources.push_back({std::string(to_string(m.spec.model)), &m.expected});

  PageRankOptions opts;
  opts.alpha = a.alpha;
  const auto dir = out_dir(g, a.out, "rank-" + a.metric);
  fs::create_directories(dir);
  for (const auto& s : sources) {
    const auto r = rank(net, metric, s, opts);
    if (metric == Metric::PageRank && !r.converged) {
      warn("pagerank (" + s.label + ") stopped after " + std::to_string(r.iterations_used) +
           " iterations without converging");
    }
    auto out = open_output(dir / ("ranking_" + s.label + ".csv"));
    write_ranking_csv(out, r, net);
  }
  const auto curve = share_curve(net, metric, sources, a.d_grid, opts);
  auto out = open_output(dir / "share_curve.csv");
  write_share_curve_csv(out, curve);
  out.close();

  auto m = base_manifest(g);
  add_input(m, a.archive);
  for (const auto& d : a.model_dirs) add_input(m, d);
  finish(m, dir);
  std::cout << "rank -> " << dir.string() << '\n';
}

struct SynthArgs {
  std::string config, out;
};

void run_synth(const Globals& g, const SynthArgs& a) {
  auto in = open_input(a.config);
  auto cfg = parse_synth_config(in);
  if (g.seed_given) cfg.seed = g.seed;
  const auto corpus = generate_corpus(cfg);
  const auto dir = out_dir(g, a.out, "synth");
  write_corpus(dir, corpus);
  {
    auto out = open_output(dir / "config.txt");
    write_synth_config(out, cfg);
  }
  auto m = base_manifest(g);
  add_input(m, a.config);
  m.seed = cfg.seed;
  finish(m, dir);
  std::cout << "synth -> " << dir.string() << ": " << corpus.papers.size() << " papers, "
            << corpus.citations.size() << " citations\n";
}

struct ReportArgs {
  std::string archive, out;
  std::vector<std::string> model_dirs;
};

void run_report(const Globals& g, const ReportArgs& a) {
  const auto net = load_archive(a.archive);
  const auto dir = out_dir(g, a.out, "report");
  fs::create_directories(dir);
  fs::copy_file(fs::path(a.archive) / "summary.json", dir / "summary.json",
                fs::copy_options::overwrite_existing);
  for (const auto& d : a.model_dirs) {
    const auto artifact = load_model_artifact(d, net);
    const auto label = std::string(to_string(artifact.spec.model));
    write_structural_report(structural_report(net, artifact.expected), dir / label);
  }
  auto m = base_manifest(g);
  add_input(m, a.archive);
  for (const auto& d : a.model_dirs) add_input(m, d);
  finish(m, dir);
  std::cout << "report -> " << dir.string() << '\n';
}

struct MatchArgs {
  std::string left, right, out;
};

void run_match(const Globals& g, const MatchArgs& a) {
  auto lin = open_input(a.left);
  auto rin = open_input(a.right);
  const auto left = parse_records(lin);
  const auto right = parse_records(rin);
  const auto dir = out_dir(g, a.out, "match");
  fs::create_directories(dir);
  auto out = open_output(dir / "matches.tsv");
  out << "left_line\tright_line\tleft_title\tright_title\n";
  std::size_t found = 0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (!match_records(left[i], right[j])) continue;
      out << i + 2 << '\t' << j + 2 << '\t' << left[i].title << '\t' << right[j].title << '\n';
      ++found;
    }
  }
  out.close();
  auto m = base_manifest(g);
  add_input(m, a.left);
  add_input(m, a.right);
  finish(m, dir);
  std::cout << "match -> " << dir.string() << ": " << found << " pairs\n";
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  g.argv.assign(argv, argv + argc);
  if (const char* env = std::getenv("CITEIMB_OUTPUT_DIR"); env && *env) g.output_dir = env;
  else g.output_dir = ".";

  CLI::App app{"Gender citation imbalance against reference models"};
  app.require_subcommand(1);
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for resampling")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--output-dir", g.output_dir, "Base directory for outputs");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Filter raw tables into a network archive");
  c_ingest->add_option("papers", ingest.papers, "Paper table (TSV)")->required();
  c_ingest->add_option("citations", ingest.citations, "Citation table (TSV)")->required();
  c_ingest->add_option("-o,--out", ingest.out, "Archive directory");

  ModelArgs model;
  auto* c_model = app.add_subcommand("model", "Compute expected citations under a reference model");
  c_model->add_option("archive", model.archive, "Network archive")->required();
  c_model->add_option("--model", model.model, "rd, hd or pd")->required()
      ->check(CLI::IsMember({"rd", "hd", "pd"}));
  auto* attrs_opt = c_model->add_option("--attrs", model.attrs, "Homophily attributes")
                        ->capture_default_str();
  c_model->add_flag("--exact", model.exact, "Rational arithmetic");
  c_model->add_flag("--dump-groups", model.dump_groups, "Also write groups.tsv");
  c_model->add_option("--tie-tolerance", model.tie_tolerance, "PD tie tolerance")
      ->capture_default_str();
  c_model->add_option("-o,--out", model.out, "Artifact directory");

  ImbalanceArgs imb;
  auto* c_imb = app.add_subcommand("imbalance", "Over/under-citation per gender category");
  c_imb->add_option("archive", imb.archive, "Network archive")->required();
  c_imb->add_option("--model-dir", imb.model_dir, "Model artifact directory")->required();
  c_imb->add_option("--from", imb.from, "Citing-paper filter")->capture_default_str();
  c_imb->add_option("--to", imb.to, "Cited-paper filter")->capture_default_str();
  c_imb->add_option("--bootstrap", imb.bootstrap, "Resamples (0 disables)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  c_imb->add_option("--stratify", imb.stratify, "none, rank or subfield")
      ->check(CLI::IsMember({"none", "rank", "subfield"}))->capture_default_str();
  c_imb->add_option("-o,--out", imb.out, "Output directory");

  RankArgs rk;
  auto* c_rank = app.add_subcommand("rank", "Rankings and top-d% W|W shares");
  c_rank->add_option("archive", rk.archive, "Network archive")->required();
  c_rank->add_option("--model-dir", rk.model_dirs, "Model artifact directories");
  c_rank->add_option("--metric", rk.metric, "citations or pagerank")
      ->check(CLI::IsMember({"citations", "pagerank"}))->capture_default_str();
  c_rank->add_option("--d-grid", rk.d_grid, "Top-d percentages")->delimiter(',');
  c_rank->add_option("--alpha", rk.alpha, "PageRank damping")->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  c_rank->add_option("-o,--out", rk.out, "Output directory");

  SynthArgs syn;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  c_synth->add_option("config", syn.config, "key = value configuration")->required();
  c_synth->add_option("-o,--out", syn.out, "Output directory");

  ReportArgs rep;
  auto* c_report = app.add_subcommand("report", "Corpus summary and structural checks");
  c_report->add_option("archive", rep.archive, "Network archive")->required();
  c_report->add_option("--model-dir", rep.model_dirs, "Model artifact directories");
  c_report->add_option("-o,--out", rep.out, "Output directory");

  MatchArgs mt;
  auto* c_match = app.add_subcommand("match", "Match publication records across two sources");
  c_match->add_option("left", mt.left, "Records (title, year, last_names)")->required();
  c_match->add_option("right", mt.right, "Records (title, year, last_names)")->required();
  c_match->add_option("-o,--out", mt.out, "Output directory");

  CLI11_PARSE(app, argc, argv);
  g.seed_given = seed_opt->count() > 0;
  model.attrs_given = attrs_opt->count() > 0;

  try {
    if (c_ingest->parsed()) run_ingest(g, ingest);
    else if (c_model->parsed()) run_model(g, model);
    else if (c_imb->parsed()) run_imbalance(g, imb);
    else if (c_rank->parsed()) run_rank(g, rk);
    else if (c_synth->parsed()) run_synth(g, syn);
    else if (c_report->parsed()) run_report(g, rep);
    else if (c_match->parsed()) run_match(g, mt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
