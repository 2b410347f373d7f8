#include "property_checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nplink/eval.hpp"
#include "nplink/kernel.hpp"
#include "nplink/lsh.hpp"
#include "nplink/simgen.hpp"

using namespace nplink;

namespace props {

namespace {

void fail(Outcome& out, const std::string& what) {
  if (out.ok) out.detail = what;
  out.ok = false;
}

SimConfig sim(int seed, TimeStep T = 8) {
  SimConfig c;
  c.seed = std::uint64_t(seed);
  c.T = T;
  return c;
}

std::string saved(const LshIndex& idx) {
  std::ostringstream out(std::ios::binary);
  idx.save(out);
  return out.str();
}

}  // namespace

Outcome bandwidth_limit(int seeds) {
  Outcome out;
  const double bandwidths[] = {0.9, 0.3, 1e-2, 1e-5, 1e-20, 1e-300};
  std::size_t checked = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    LinkPredictor pred(generate(sim(seed)), {});
    const auto& cubes = pred.training_cubes();
    for (std::size_t e = 0; e < cubes.size(); e += 37) {
      // a training cube queried against its own set always has D = 0 present
      std::vector<double> d(cubes.size());
      for (std::size_t k = 0; k < cubes.size(); ++k) d[k] = datacube_distance(cubes[e], cubes[k], 0.5);
      std::vector<double> prev(cubes.size(), 1.0);
      for (double b : bandwidths) {
        KernelConfig kc;
        kc.bandwidth = b;
        std::vector<double> w(cubes.size());
        for (std::size_t k = 0; k < cubes.size(); ++k) w[k] = kernel_weight(kc, d[k]);
        for (std::size_t k = 0; k < cubes.size(); ++k) {
          if (d[k] == 0.0 && w[k] != 1.0) fail(out, "D=0 cube lost weight 1");
          if (w[k] > prev[k]) fail(out, "weight grew as b shrank");
          // ranking by weight must agree with ranking by -D
          const std::size_t o = (k * 7919 + 13) % cubes.size();
          if (d[k] < d[o] && w[k] < w[o]) fail(out, "weight order disagrees with -D");
          if (d[k] == d[o] && w[k] != w[o]) fail(out, "equal D, unequal weight");
          ++checked;
        }
        prev = w;
      }
      for (std::size_t k = 0; k < cubes.size(); ++k) {
        if (d[k] >= 0.01 && prev[k] > 1e-2) fail(out, "weight of a D>0 cube did not vanish");
      }
    }
  }
  if (out.ok) out.detail = std::to_string(checked) + " weight comparisons";
  return out;
}

Outcome no_leakage(int seeds) {
  Outcome out;
  std::size_t checked = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto seq = generate(sim(seed, 9));
    const TimeStep T = 7;
    auto corrupted = seq.with_snapshot(T, {{0, 1}, {1, 0}, {2, 3}, {4, 5}});
    corrupted = corrupted.with_snapshot(T + 1, {});
    PredictorConfig cfg;
    for (NodeId i = 0; i < seq.num_nodes(); i += 5) {
      const NodeId j = (i + 11) % NodeId(seq.num_nodes());
      if (predict_link(seq, i, j, T, cfg) != predict_link(corrupted, i, j, T, cfg)) {
        fail(out, "NP prediction changed with snapshot T");
      }
      ++checked;
    }
    for (Method m : all_methods()) {
      const auto a = seq.prefix(T), b = corrupted.prefix(T);
      const CandidateScorer sa(a, m, cfg, {}), sb(b, m, cfg, {});
      for (NodeId i = 0; i < seq.num_nodes(); i += 7) {
        const auto cand = candidate_set(seq, i, T);
        if (cand != candidate_set(corrupted, i, T)) fail(out, "candidate set read snapshot T");
        if (sa.score(i, cand) != sb.score(i, cand)) fail(out, method_label(m) + " scores read snapshot T");
        ++checked;
      }
    }
  }
  if (out.ok) out.detail = std::to_string(checked) + " score comparisons";
  return out;
}

Outcome seed_determinism(int seeds) {
  Outcome out;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto a = generate(sim(seed)), b = generate(sim(seed));
    if (!(a == b)) fail(out, "generator differs for seed " + std::to_string(seed));
    LinkPredictor pred(a, {});
    LshParams lp;
    lp.seed = std::uint64_t(seed);
    const auto i1 = LshIndex::build(pred.shared_training_cubes(), lp, 0.5);
    const auto i2 = LshIndex::build(pred.shared_training_cubes(), lp, 0.5);
    if (saved(i1) != saved(i2)) fail(out, "index bytes differ for seed " + std::to_string(seed));
    EvalTask task{a};
    const auto r1 = evaluate(task), r2 = evaluate(task);
    if (r1.nodes.size() != r2.nodes.size()) {
      fail(out, "report size differs");
      continue;
    }
    for (std::size_t k = 0; k < r1.nodes.size(); ++k) {
      if (r1.nodes[k].auc != r2.nodes[k].auc || r1.nodes[k].node != r2.nodes[k].node) {
        fail(out, "report differs for seed " + std::to_string(seed));
      }
    }
  }
  if (out.ok) out.detail = std::to_string(seeds) + " seeds";
  return out;
}

Outcome count_conservation(int seeds) {
  Outcome out;
  std::size_t cubes = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    SimConfig c = sim(seed, 6);
    c.eps = 0.03;
    const auto seq = generate(c);
    for (const CubeParams params : {CubeParams{3, 400}, CubeParams{1, 12}}) {
      for (TimeStep t = 1; t < seq.length(); ++t) {
        for (NodeId i = 0; i < seq.num_nodes(); ++i) {
          const auto cube = build_datacube(seq, i, t, params);
          const auto members = neighborhood(seq, i, t - 1, params.lag, params.r_max).members;
          std::uint64_t n = 0, n_plus = 0, linked = 0;
          for (const auto& cell : cube.cells()) {
            n += cell.counts.n;
            n_plus += cell.counts.n_plus;
            if (cell.counts.n_plus > cell.counts.n) fail(out, "n+ > n");
          }
          for (NodeId u : members) {
            for (NodeId v : members) linked += u != v && seq[t].has_edge(u, v);
          }
          const std::uint64_t m = members.size();
          if (n != m * (m - 1)) fail(out, "sum n != m(m-1)");
          if (n_plus != linked) fail(out, "sum n+ != linked member pairs");
          ++cubes;
        }
      }
    }
  }
  if (out.ok) out.detail = std::to_string(cubes) + " cubes";
  return out;
}

Outcome hamming_bound(int seeds) {
  Outcome out;
  std::size_t pairs = 0;
  double worst = 0.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    LinkPredictor pred(generate(sim(seed)), {});
    for (const auto& [b1, b2] : {std::pair{4u, 16u}, std::pair{8u, 8u}, std::pair{2u, 5u}}) {
      LshParams lp;
      lp.b1 = b1;
      lp.b2 = b2;
      const auto idx = LshIndex::build(pred.shared_training_cubes(), lp, 0.5);
      const auto& cubes = pred.training_cubes();
      for (std::size_t e = 0; e + 1 < cubes.size(); e += 41) {
        const auto& x = cubes[e];
        const auto& y = cubes[(e * 31 + 7) % cubes.size()];
        double l1 = 0.0;
        std::size_t cells = 0;
        for (auto key : idx.cell_vocab()) {
          const auto s = PairFeature::from_key(key);
          const auto* cx = x.find(s);
          const auto* cy = y.find(s);
          if (!cx && !cy) continue;
          ++cells;
          auto masses = [&](const CellCounts* c) {
            return c ? histogram_masses(CellPosterior::from_counts(double(c->n), double(c->n_plus)), b1)
                     : std::vector<double>(b1, 0.0);
          };
          const auto mx = masses(cx), my = masses(cy);
          for (std::uint32_t m = 0; m < b1; ++m) l1 += std::abs(mx[m] - my[m]);
        }
        const double gap = std::abs(double(idx.hamming(x, y)) - b2 * l1);
        worst = std::max(worst, cells ? gap / double(cells) : 0.0);
        if (gap > double(b1 * cells) + 1e-9) fail(out, "hamming outside the B2*L1 bound");
        ++pairs;
      }
    }
  }
  if (out.ok) {
    std::ostringstream s;
    s << pairs << " pairs, worst gap " << worst << " bits per cell";
    out.detail = s.str();
  }
  return out;
}

}  // namespace props
