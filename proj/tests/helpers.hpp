#pragma once

#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nplink/graph.hpp"

namespace testutil {

using EdgeList = std::vector<std::pair<nplink::NodeId, nplink::NodeId>>;

inline nplink::GraphSequence make_seq(std::size_t n, std::vector<EdgeList> steps) {
  std::vector<nplink::Snapshot> snaps;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    snaps.emplace_back(static_cast<nplink::TimeStep>(t), n, steps[t]);
  }
  return nplink::GraphSequence(n, std::move(snaps));
}

inline nplink::GraphSequence parse(const std::string& text, bool undirected = false) {
  std::istringstream in(text);
  return nplink::load_edge_list(in, {undirected});
}

}  // namespace testutil
