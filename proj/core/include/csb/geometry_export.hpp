#pragma once

#include <span>
#include <string>

#include "csb/evaluator.hpp"

namespace csb {

/// Elevation drawing of one or more decoded bridges (deck, towers, stays)
/// with a scale bar. Geometries are overlaid in a fixed palette, first one
/// black; output bytes are deterministic for identical inputs.
std::string geometry_svg(std::span<const BridgeGeometry> geometries);

/// Node and member listing of the discretized models, one block per
/// geometry: rows are `node,<g>,<id>,<x>,<y>` and
/// `member,<g>,<kind>,<node1>,<node2>`.
std::string geometry_csv(std::span<const BridgeModel> models);

}  // namespace csb
