#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "hbss/cli.hpp"

namespace hbss::detail {

/// Engine objects described by a ProblemSpec.
struct Problem {
  std::optional<GradedRing> ring;
  std::optional<RegularSequence> sequence;
  /// Comodule mode.
  std::optional<BocksteinComodule> comodule;
  std::optional<GradedModule> abutment_module;
  /// Presentation mode.
  std::optional<GradedModule> module;
  Window window;
};

/// (line, column) of a field, or of its list item when index >= 0.
using Locator = std::function<std::optional<std::pair<int, int>>(const std::string& field, int index)>;

/// Builds every engine object, collecting each ValidationError under its
/// location and throwing one ValidationError listing all of them.
Problem materialize(const ProblemSpec& spec, const Locator& locate);

}  // namespace hbss::detail
