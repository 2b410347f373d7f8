// nplink: simulate, index, predict, evaluate, compare

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nplink/eval.hpp"
#include "nplink/graph.hpp"
#include "nplink/kernel.hpp"
#include "nplink/lsh.hpp"
#include "nplink/simgen.hpp"

using namespace nplink;

namespace {

struct Options {
  std::string input;
  std::string out;
  std::string index;
  bool undirected = false;
  std::vector<std::string> methods;
  SimConfig sim;
  PredictorConfig np;
  BaselineParams baseline;
  std::uint64_t seed = 1;
  int seeds = 1;
  long long i = -1, j = -1;
};

void add_sim_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.sim.n, "nodes")->capture_default_str();
  cmd->add_option("--t", o.sim.T, "timesteps")->capture_default_str();
  cmd->add_option("--phi", o.sim.phi, "seasonality strength")->capture_default_str();
  cmd->add_option("--seasons", o.sim.seasons, "season count")->capture_default_str();
  cmd->add_option("--features", o.sim.features, "latent features")->capture_default_str();
  cmd->add_option("--eps", o.sim.eps, "background edge probability")->capture_default_str();
}

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--lag", o.np.cube.lag, "lag p")->capture_default_str();
  cmd->add_option("--rmax", o.np.cube.r_max, "neighborhood cap")->capture_default_str();
  cmd->add_option("--b", o.np.kernel.bandwidth, "kernel bandwidth in (0,1)")->capture_default_str();
  cmd->add_option("--topk", o.np.kernel.top_k, "neighbors kept with --lsh")->capture_default_str();
  cmd->add_option("--lambda", o.np.kernel.lambda, "cell smoothing decay")->capture_default_str();
  cmd->add_flag("--lsh,!--no-lsh", o.np.kernel.use_lsh, "retrieve neighbors through the LSH index");
  cmd->add_option("--k-bits", o.np.lsh.k_bits, "bits per hash")->capture_default_str();
  cmd->add_option("--tables", o.np.lsh.tables, "hash tables")->capture_default_str();
  cmd->add_option("--b1", o.np.lsh.b1, "histogram buckets per cell")->capture_default_str();
  cmd->add_option("--b2", o.np.lsh.b2, "bits per bucket")->capture_default_str();
}

void add_input_options(CLI::App* cmd, Options& o, bool required) {
  auto* opt = cmd->add_option("--input", o.input, "edge list: lines 't src dst'");
  if (required) opt->required();
  cmd->add_flag("--undirected", o.undirected, "insert both directions of every edge");
}

GraphSequence read_input(const Options& o) {
  return load_edge_list_file(o.input, {o.undirected});
}

std::vector<Method> chosen_methods(const Options& o) {
  if (o.methods.empty()) return all_methods();
  std::vector<Method> m;
  for (const auto& name : o.methods) m.push_back(parse_method(name));
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

int run_simulate(Options& o) {
  o.sim.seed = o.seed;
  const auto seq = generate(o.sim);
  if (o.out.empty()) {
    write_edge_list(std::cout, seq);
  } else {
    auto f = open_out(o.out);
    write_edge_list(f, seq);
  }
  return 0;
}

int run_index(Options& o) {
  const auto seq = read_input(o);
  const LinkPredictor pred(seq, o.np);
  const auto index = LshIndex::build(pred.shared_training_cubes(), o.np.lsh, o.np.kernel.lambda);
  index.save_file(o.out);
  std::fprintf(stderr, "indexed %zu cubes (%zu cells, %zu bits) -> %s\n", pred.num_training_cubes(),
               index.cell_vocab().size(), index.num_bits(), o.out.c_str());
  return 0;
}

int run_predict(Options& o) {
  const auto seq = read_input(o);
  if (!o.index.empty()) o.np.kernel.use_lsh = true;
  LinkPredictor pred(seq, o.np);
  if (!o.index.empty()) {
    pred.set_index(std::make_shared<const LshIndex>(LshIndex::load_file(
        o.index, pred.shared_training_cubes(), o.np.kernel.lambda, &o.np.lsh)));
  }
  if (o.i < 0 || o.i >= (long long)seq.num_nodes()) throw std::out_of_range("--i out of range");
  const auto q = pred.query(NodeId(o.i));
  if (o.j >= 0) {
    if (o.j >= (long long)seq.num_nodes() || o.j == o.i) throw std::out_of_range("--j out of range");
    std::printf("%.10g\n", pred.predict(q, NodeId(o.j)));
    return 0;
  }
  // no --j: every other node, one "j probability" line each
  for (NodeId j = 0; j < seq.num_nodes(); ++j) {
    if (j != NodeId(o.i)) std::printf("%u %.10g\n", unsigned(j), pred.predict(q, j));
  }
  return 0;
}

GraphSequence input_or_simulated(Options& o) {
  if (!o.input.empty()) return read_input(o);
  o.sim.seed = o.seed;
  return generate(o.sim);
}

int run_evaluate(Options& o) {
  o.baseline.seed = o.seed;
  EvalTask task{input_or_simulated(o), chosen_methods(o), o.np, o.baseline};
  const auto report = evaluate(task);
  if (o.out.empty()) {
    write_report_text(std::cout, report);
    return 0;
  }
  auto text = open_out(o.out);
  write_report_text(text, report);
  auto csv = open_out(o.out + ".csv");
  write_report_csv(csv, report);
  write_report_text(std::cout, report);
  return 0;
}

int run_compare(Options& o) {
  const auto methods = chosen_methods(o);
  std::vector<std::pair<std::string, EvalReport>> rows;
  if (!o.input.empty()) {
    o.baseline.seed = o.seed;
    EvalTask task{read_input(o), methods, o.np, o.baseline};
    rows.emplace_back(o.input, evaluate(task));
  } else {
    for (int s = 0; s < o.seeds; ++s) {
      const std::uint64_t seed = o.seed + std::uint64_t(s);
      o.sim.seed = seed;
      o.baseline.seed = seed;
      EvalTask task{generate(o.sim), methods, o.np, o.baseline};
      rows.emplace_back("seed " + std::to_string(seed), evaluate(task));
    }
  }

  std::size_t width = 8;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream table;
  table << std::string(width, ' ');
  char cell[32];
  for (Method m : methods) {
    std::snprintf(cell, sizeof(cell), " %6s", method_label(m).c_str());
    table << cell;
  }
  table << '\n';
  std::vector<double> mean(methods.size(), 0.0);
  for (const auto& [name, report] : rows) {
    table << name << std::string(width - name.size(), ' ');
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const double a = report.summary(methods[k]).mean_auc;
      mean[k] += a / double(rows.size());
      std::snprintf(cell, sizeof(cell), " %6.3f", a);
      table << cell;
    }
    table << '\n';
  }
  if (rows.size() > 1) {
    table << "mean" << std::string(width - 4, ' ');
    for (double a : mean) {
      std::snprintf(cell, sizeof(cell), " %6.3f", a);
      table << cell;
    }
    table << '\n';
  }
  std::cout << table.str();
  if (!o.out.empty()) open_out(o.out) << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-parametric link prediction on graph snapshot sequences"};
  app.set_config("--config", "", "TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "write a seasonal block-model sequence as an edge list");
  add_sim_options(sim, o);
  sim->add_option("--seed", o.seed, "random seed")->capture_default_str();
  sim->add_option("--out", o.out, "output edge list (stdout if omitted)");

  auto* idx = app.add_subcommand("index", "build and save the LSH index over training datacubes");
  add_input_options(idx, o, true);
  add_model_options(idx, o);
  idx->add_option("--seed", o.np.lsh.seed, "hash sampling seed")->capture_default_str();
  idx->add_option("--out", o.out, "index file")->required();

  auto* pred = app.add_subcommand("predict", "probability of i->j in the snapshot after the input");
  add_input_options(pred, o, true);
  add_model_options(pred, o);
  pred->add_option("--i", o.i, "source node (compacted id)")->required();
  pred->add_option("--j", o.j, "target node; omit to score every node");
  pred->add_option("--index", o.index, "saved LSH index (implies --lsh)");
  pred->add_option("--seed", o.np.lsh.seed, "hash sampling seed")->capture_default_str();

  auto* ev = app.add_subcommand("evaluate", "mean AUC per method on the last snapshot");
  add_input_options(ev, o, false);
  add_sim_options(ev, o);
  add_model_options(ev, o);
  ev->add_option("--method", o.methods, "np|ll|cn|aa|katz|rnd (repeatable; default all)")->delimiter(',');
  ev->add_option("--seed", o.seed, "seed for simulation and the random scorer")->capture_default_str();
  ev->add_option("--out", o.out, "report file; per-node CSV goes to <out>.csv");

  auto* cmp = app.add_subcommand("compare", "all methods side by side, one row per sequence");
  add_input_options(cmp, o, false);
  add_sim_options(cmp, o);
  add_model_options(cmp, o);
  cmp->add_option("--method", o.methods, "subset of methods (default all)")->delimiter(',');
  cmp->add_option("--seed", o.seed, "first seed")->capture_default_str();
  cmp->add_option("--seeds", o.seeds, "simulated sequences, seeds seed..seed+seeds-1")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmp->add_option("--out", o.out, "also write the table here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return run_simulate(o);
    if (*idx) return run_index(o);
    if (*pred) return run_predict(o);
    if (*ev) return run_evaluate(o);
    if (*cmp) return run_compare(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
